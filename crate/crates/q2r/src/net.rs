//! Network structure: undirected graphs with an optional two-class node
//! labeling used by the block-sequential update schedule.
//!
//! Invariants a *valid* network satisfies (see [`Network::validate`]):
//! - adjacency is symmetric, with no self-loops and no duplicate edges;
//! - every node has even degree, and degree >= 2 (no isolated nodes);
//! - when the two-class labeling is present, every edge crosses classes and
//!   neither class is empty.
//!
//! Constructors accept structurally broken graphs on purpose so the validator
//! can report exactly what is wrong; simulation entry points call
//! [`Network::ensure_valid`] first.

use serde::Serialize;

use crate::error::{Q2rError, Result};

/// Update class of a node. Class `A` nodes update in the first half-step of
/// the two-block schedule, class `B` nodes in the second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BlockClass {
    A,
    B,
}

impl BlockClass {
    pub fn other(self) -> BlockClass {
        match self {
            BlockClass::A => BlockClass::B,
            BlockClass::B => BlockClass::A,
        }
    }
}

/// A single structural defect found by validation. Node ids are 0-based here;
/// `Display` renders them 1-based to match the text format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    OddDegree { node: usize, degree: usize },
    IsolatedNode { node: usize },
    SelfLoop { node: usize },
    DuplicateEdge { a: usize, b: usize },
    AsymmetricAdjacency { from: usize, to: usize },
    NonCrossingEdge { a: usize, b: usize },
    EmptyClass { class: BlockClass },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Violation::OddDegree { node, degree } => {
                write!(f, "node {} has odd degree {}", node + 1, degree)
            }
            Violation::IsolatedNode { node } => write!(f, "node {} is isolated", node + 1),
            Violation::SelfLoop { node } => write!(f, "self-loop at node {}", node + 1),
            Violation::DuplicateEdge { a, b } => {
                write!(f, "duplicate edge {} {}", a + 1, b + 1)
            }
            Violation::AsymmetricAdjacency { from, to } => {
                write!(f, "adjacency lists node {} -> {} but not the reverse", from + 1, to + 1)
            }
            Violation::NonCrossingEdge { a, b } => {
                write!(f, "edge {} {} joins two nodes of the same class", a + 1, b + 1)
            }
            Violation::EmptyClass { class } => write!(f, "class {class:?} is empty"),
        }
    }
}

/// Everything validation found, in deterministic order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_valid() {
            return write!(f, "ok");
        }
        let shown: Vec<String> = self.violations.iter().take(8).map(|v| v.to_string()).collect();
        write!(f, "{}", shown.join("; "))?;
        if self.violations.len() > 8 {
            write!(f, "; and {} more", self.violations.len() - 8)?;
        }
        Ok(())
    }
}

/// Undirected network with adjacency in compressed sparse rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Network {
    n: usize,
    offsets: Vec<u32>,
    targets: Vec<u32>,
    classes: Option<Vec<BlockClass>>,
}

impl Network {
    /// Build from an undirected edge list. Both directions are stored, so the
    /// result is always symmetric; self-loops and duplicates are kept for the
    /// validator to flag.
    pub fn from_edges(
        n: usize,
        edges: &[(usize, usize)],
        classes: Option<Vec<BlockClass>>,
    ) -> Network {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for &(a, b) in edges {
            assert!(a < n && b < n, "edge ({a},{b}) out of range for n={n}");
            adj[a].push(b as u32);
            if a != b {
                adj[b].push(a as u32);
            } else {
                adj[a].push(a as u32);
            }
        }
        Network::from_adjacency(adj, classes)
    }

    /// Build from raw adjacency lists. No symmetry is enforced; this is the
    /// entry point that can represent an asymmetric graph for diagnostics.
    pub fn from_adjacency(adj: Vec<Vec<u32>>, classes: Option<Vec<BlockClass>>) -> Network {
        let n = adj.len();
        if let Some(c) = &classes {
            assert_eq!(c.len(), n, "class labels must cover every node");
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::new();
        offsets.push(0u32);
        for mut row in adj {
            row.sort_unstable();
            targets.extend_from_slice(&row);
            offsets.push(targets.len() as u32);
        }
        Network { n, offsets, targets, classes }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Number of undirected edges (meaningful on valid networks).
    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    #[inline]
    pub fn neighbors(&self, i: usize) -> &[u32] {
        &self.targets[self.offsets[i] as usize..self.offsets[i + 1] as usize]
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        (self.offsets[i + 1] - self.offsets[i]) as usize
    }

    pub fn classes(&self) -> Option<&[BlockClass]> {
        self.classes.as_deref()
    }

    pub fn class_of(&self, i: usize) -> Option<BlockClass> {
        self.classes.as_ref().map(|c| c[i])
    }

    /// Nodes of one class, ascending. Empty when the labeling is absent.
    pub fn class_nodes(&self, class: BlockClass) -> Vec<u32> {
        match &self.classes {
            None => Vec::new(),
            Some(c) => (0..self.n).filter(|&i| c[i] == class).map(|i| i as u32).collect(),
        }
    }

    /// Undirected edges as (i, j) with i <= j, ascending (valid networks).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| {
            self.neighbors(i)
                .iter()
                .filter(move |&&j| j as usize >= i)
                .map(move |&j| (i, j as usize))
        })
    }

    /// Maximum degree over all nodes (0 for the empty network).
    pub fn max_degree(&self) -> usize {
        (0..self.n).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// True when every node of the listed block has no neighbor inside it.
    pub fn is_independent(&self, block: &[u32]) -> bool {
        let mut inside = vec![false; self.n];
        for &i in block {
            inside[i as usize] = true;
        }
        block
            .iter()
            .all(|&i| self.neighbors(i as usize).iter().all(|&j| !inside[j as usize]))
    }

    /// True when the whole network is connected (the empty network counts).
    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in self.neighbors(i) {
                if !seen[j as usize] {
                    seen[j as usize] = true;
                    count += 1;
                    stack.push(j as usize);
                }
            }
        }
        count == self.n
    }

    /// Full structural check. Reports every defect instead of stopping at the
    /// first one.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for i in 0..self.n {
            let nbrs = self.neighbors(i);
            let d = nbrs.len();
            if d == 0 {
                violations.push(Violation::IsolatedNode { node: i });
                continue;
            }
            if d % 2 == 1 {
                violations.push(Violation::OddDegree { node: i, degree: d });
            }
            for (k, &j) in nbrs.iter().enumerate() {
                let j = j as usize;
                if j == i {
                    // a self-loop stores two entries; report it once
                    if k == 0 || nbrs[k - 1] as usize != i {
                        violations.push(Violation::SelfLoop { node: i });
                    }
                    continue;
                }
                if k > 0 && nbrs[k - 1] as usize == j && j > i {
                    violations.push(Violation::DuplicateEdge { a: i, b: j });
                }
                let back = self.neighbors(j).iter().filter(|&&t| t as usize == i).count();
                let fwd = nbrs.iter().filter(|&&t| t as usize == j).count();
                if back < fwd && (k == 0 || nbrs[k - 1] as usize != j) {
                    violations.push(Violation::AsymmetricAdjacency { from: i, to: j });
                }
                if let Some(classes) = &self.classes {
                    if j > i && classes[i] == classes[j] && (k == 0 || nbrs[k - 1] as usize != j) {
                        violations.push(Violation::NonCrossingEdge { a: i, b: j });
                    }
                }
            }
        }
        if let Some(classes) = &self.classes {
            if self.n > 0 {
                for class in [BlockClass::A, BlockClass::B] {
                    if !classes.contains(&class) {
                        violations.push(Violation::EmptyClass { class });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Q2rError::Invalid(report))
        }
    }
}
