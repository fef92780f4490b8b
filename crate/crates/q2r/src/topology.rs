//! Network generators: prime-length rings, composites of rings joined at
//! frozen ports, even tori, and random bipartite even-degree networks.

use rand::seq::index::sample;
use rand::Rng;
use std::collections::HashSet;

use crate::config::{Configuration, Spin};
use crate::error::{Q2rError, Result};
use crate::net::{BlockClass, Network};

/// A node that provably never flips from the canonical configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrozenPort {
    pub node: usize,
    pub spin: Spin,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Cycle on 2p nodes with the single-plus canonical configuration. Its orbit
/// under the two-block schedule has period exactly p, and both poles of the
/// mirror symmetry (nodes 1 and p+1 in file numbering) stay frozen.
#[derive(Debug, Clone)]
pub struct RingNetwork {
    pub p: u64,
    pub net: Network,
    pub canonical: Configuration,
    pub ports: [FrozenPort; 2],
    /// When set, class B updates first instead of class A.
    pub class_swapped: bool,
}

impl RingNetwork {
    /// Node pairs exchanged by the reflection that fixes both ports. Their
    /// values agree at every half-step of the canonical orbit.
    pub fn mirror_pairs(&self) -> Vec<(usize, usize)> {
        let n = 2 * self.p as usize;
        (1..self.p as usize).map(|k| (k, n - k)).collect()
    }
}

fn ring_parts(p: u64, offset: usize, swapped: bool) -> (Vec<(usize, usize)>, Vec<BlockClass>) {
    let n = 2 * p as usize;
    let edges = (0..n).map(|i| (offset + i, offset + (i + 1) % n)).collect();
    let classes = (0..n)
        .map(|i| if (i % 2 == 0) != swapped { BlockClass::A } else { BlockClass::B })
        .collect();
    (edges, classes)
}

pub fn build_ring(p: u64) -> Result<RingNetwork> {
    build_ring_oriented(p, false)
}

pub fn build_ring_oriented(p: u64, class_swapped: bool) -> Result<RingNetwork> {
    if !is_prime(p) {
        return Err(Q2rError::unsupported(format!("ring length parameter {p} is not prime")));
    }
    let n = 2 * p as usize;
    let (edges, classes) = ring_parts(p, 0, class_swapped);
    let net = Network::from_edges(n, &edges, Some(classes));
    let mut canonical = Configuration::all_minus(n);
    canonical.set(0, Spin::Plus);
    let ports = [
        FrozenPort { node: 0, spin: Spin::Plus },
        FrozenPort { node: p as usize, spin: Spin::Minus },
    ];
    Ok(RingNetwork { p, net, canonical, ports, class_swapped })
}

/// Several prime rings joined only at their frozen ports. The coupler is
/// built so every port keeps a balanced coupler neighborhood and therefore
/// stays frozen; each ring then runs its isolated orbit and the combined
/// canonical period is the product of the (distinct) primes.
#[derive(Debug, Clone)]
pub struct CompositeNetwork {
    pub primes: Vec<u64>,
    pub net: Network,
    pub canonical: Configuration,
    /// First node of each ring; ring i spans `offset[i] .. offset[i] + 2*p_i`.
    pub ring_offsets: Vec<usize>,
    /// Ring ports, two per ring.
    pub ports: Vec<FrozenPort>,
    /// Frozen coupler-internal nodes (empty for the two-ring coupler).
    pub balancers: Vec<FrozenPort>,
    pub expected_period: u64,
}

pub fn build_composite(primes: &[u64]) -> Result<CompositeNetwork> {
    if primes.len() < 2 {
        return Err(Q2rError::unsupported("a composite needs at least two rings"));
    }
    for &p in primes {
        if !is_prime(p) {
            return Err(Q2rError::unsupported(format!("{p} is not prime")));
        }
        if p == 2 {
            return Err(Q2rError::unsupported(
                "p=2 is excluded from composites: its ports are its entire first class",
            ));
        }
    }
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != primes.len() {
        return Err(Q2rError::unsupported("composite primes must be distinct"));
    }

    let k = primes.len();
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut classes: Vec<BlockClass> = Vec::new();
    let mut ring_offsets = Vec::with_capacity(k);
    let mut ports = Vec::with_capacity(2 * k);
    let mut offset = 0usize;
    for (idx, &p) in primes.iter().enumerate() {
        // the two-ring coupler wants the second ring's classes reversed so
        // all four coupler edges cross classes
        let swapped = k == 2 && idx == 1;
        let (mut e, mut c) = ring_parts(p, offset, swapped);
        edges.append(&mut e);
        classes.append(&mut c);
        ring_offsets.push(offset);
        ports.push(FrozenPort { node: offset, spin: Spin::Plus });
        ports.push(FrozenPort { node: offset + p as usize, spin: Spin::Minus });
        offset += 2 * p as usize;
    }

    let mut balancers = Vec::new();
    if k == 2 {
        let (u0, up) = (ports[0].node, ports[1].node);
        let (s0, sq) = (ports[2].node, ports[3].node);
        edges.extend([(u0, up), (s0, sq), (u0, s0), (up, sq)]);
    } else {
        // hub: two balanced nodes per class; plus-port neighbors live in
        // class B, minus-port neighbors in class A
        let hb_plus = offset;
        let hb_minus = offset + 1;
        let ha_plus = offset + 2;
        let ha_minus = offset + 3;
        classes.extend([BlockClass::B, BlockClass::B, BlockClass::A, BlockClass::A]);
        for pair in ports.chunks(2) {
            edges.extend([
                (pair[0].node, hb_plus),
                (pair[0].node, hb_minus),
                (pair[1].node, ha_plus),
                (pair[1].node, ha_minus),
            ]);
        }
        if k % 2 == 1 {
            // keep hub degrees even
            edges.extend([(hb_plus, ha_plus), (hb_minus, ha_minus)]);
        }
        balancers.extend([
            FrozenPort { node: hb_plus, spin: Spin::Plus },
            FrozenPort { node: hb_minus, spin: Spin::Minus },
            FrozenPort { node: ha_plus, spin: Spin::Plus },
            FrozenPort { node: ha_minus, spin: Spin::Minus },
        ]);
        offset += 4;
    }

    let net = Network::from_edges(offset, &edges, Some(classes));
    let mut canonical = Configuration::all_minus(offset);
    for port in ports.iter().chain(&balancers) {
        if port.spin == Spin::Plus {
            canonical.set(port.node, Spin::Plus);
        }
    }
    let expected_period = primes.iter().product();
    Ok(CompositeNetwork {
        primes: primes.to_vec(),
        net,
        canonical,
        ring_offsets,
        ports,
        balancers,
        expected_period,
    })
}

/// Flat torus with wrap-around in both directions, checkerboard classes.
#[derive(Debug, Clone)]
pub struct TorusNetwork {
    pub width: usize,
    pub height: usize,
    pub net: Network,
}

pub fn build_torus(width: usize, height: usize) -> Result<TorusNetwork> {
    for d in [width, height] {
        if d % 2 != 0 {
            return Err(Q2rError::unsupported(format!(
                "torus dimension {d} is odd: the checkerboard labeling breaks"
            )));
        }
        if d < 4 {
            return Err(Q2rError::unsupported(format!(
                "torus dimension {d} is degenerate: wrap-around duplicates a neighbor"
            )));
        }
    }
    let n = width * height;
    let idx = |x: usize, y: usize| y * width + x;
    let mut edges = Vec::with_capacity(2 * n);
    let mut classes = Vec::with_capacity(n);
    for y in 0..height {
        for x in 0..width {
            edges.push((idx(x, y), idx((x + 1) % width, y)));
            edges.push((idx(x, y), idx(x, (y + 1) % height)));
            classes.push(if (x + y) % 2 == 0 { BlockClass::A } else { BlockClass::B });
        }
    }
    Ok(TorusNetwork { width, height, net: Network::from_edges(n, &edges, Some(classes)) })
}

/// Random connected-enough bipartite network in which every node has even,
/// positive degree: the symmetric difference of a few random alternating
/// cycles. Nodes left isolated are dropped.
pub fn random_bipartite_even<R: Rng>(rng: &mut R, max_nodes: usize) -> Network {
    assert!(max_nodes >= 4, "need room for at least a 4-cycle");
    loop {
        let na = rng.gen_range(2..=max_nodes / 2);
        let nb = rng.gen_range(2..=max_nodes - na);
        let mut present: HashSet<(usize, usize)> = HashSet::new();
        let cycles = rng.gen_range(1..=3);
        for _ in 0..cycles {
            let len = rng.gen_range(2..=na.min(nb));
            let left = sample(rng, na, len).into_vec();
            let right = sample(rng, nb, len).into_vec();
            for i in 0..len {
                for e in [(left[i], right[i]), (left[(i + 1) % len], right[i])] {
                    if !present.remove(&e) {
                        present.insert(e);
                    }
                }
            }
        }
        if present.is_empty() {
            continue;
        }
        // drop isolated nodes, relabel the rest
        let mut keep_a = vec![false; na];
        let mut keep_b = vec![false; nb];
        for &(a, b) in &present {
            keep_a[a] = true;
            keep_b[b] = true;
        }
        let map = |keep: &[bool]| -> Vec<usize> {
            let mut id = 0;
            keep.iter()
                .map(|&k| {
                    let v = id;
                    if k {
                        id += 1;
                    }
                    v
                })
                .collect()
        };
        let map_a = map(&keep_a);
        let map_b = map(&keep_b);
        let na_kept = keep_a.iter().filter(|&&k| k).count();
        let nb_kept = keep_b.iter().filter(|&&k| k).count();
        let edges: Vec<(usize, usize)> =
            present.iter().map(|&(a, b)| (map_a[a], na_kept + map_b[b])).collect();
        let classes = (0..na_kept + nb_kept)
            .map(|i| if i < na_kept { BlockClass::A } else { BlockClass::B })
            .collect();
        let net = Network::from_edges(na_kept + nb_kept, &edges, Some(classes));
        debug_assert!(net.validate().is_valid(), "{}", net.validate());
        return net;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ring_shape() {
        let ring = build_ring(5).unwrap();
        assert_eq!(ring.net.len(), 10);
        assert_eq!(ring.net.edge_count(), 10);
        assert!(ring.net.validate().is_valid());
        assert_eq!(ring.canonical.to_text(), "1000000000");
        assert_eq!(ring.ports[0], FrozenPort { node: 0, spin: Spin::Plus });
        assert_eq!(ring.ports[1], FrozenPort { node: 5, spin: Spin::Minus });
        assert_eq!(ring.mirror_pairs(), vec![(1, 9), (2, 8), (3, 7), (4, 6)]);
        assert!(build_ring(4).is_err());
        assert!(build_ring(1).is_err());
    }

    #[test]
    fn swapped_ring_reverses_classes() {
        let ring = build_ring_oriented(3, true).unwrap();
        assert_eq!(ring.net.class_of(0), Some(BlockClass::B));
        assert_eq!(ring.net.class_of(1), Some(BlockClass::A));
        assert!(ring.net.validate().is_valid());
    }

    #[test]
    fn two_ring_composite_shape() {
        let c = build_composite(&[3, 5]).unwrap();
        assert_eq!(c.net.len(), 16);
        assert!(c.net.validate().is_valid(), "{}", c.net.validate());
        assert_eq!(c.expected_period, 15);
        assert_eq!(c.ring_offsets, vec![0, 6]);
        // every port has two ring neighbors plus two coupler neighbors
        for port in &c.ports {
            assert_eq!(c.net.degree(port.node), 4);
        }
        assert!(c.balancers.is_empty());
        assert_eq!(c.canonical.to_text(), "1000001000000000");
    }

    #[test]
    fn hub_composite_shape() {
        let c = build_composite(&[3, 5, 7]).unwrap();
        assert_eq!(c.net.len(), 6 + 10 + 14 + 4);
        assert!(c.net.validate().is_valid(), "{}", c.net.validate());
        assert_eq!(c.expected_period, 105);
        for port in &c.ports {
            assert_eq!(c.net.degree(port.node), 4);
        }
        // odd ring count: hub nodes pick up a parity edge
        for b in &c.balancers {
            assert_eq!(c.net.degree(b.node), 4);
        }
        let even = build_composite(&[3, 5, 7, 11]).unwrap();
        assert!(even.net.validate().is_valid());
        for b in &even.balancers {
            assert_eq!(even.net.degree(b.node), 4);
        }
    }

    #[test]
    fn composite_rejections() {
        assert!(build_composite(&[3]).is_err());
        assert!(build_composite(&[2, 3]).is_err());
        assert!(build_composite(&[3, 3]).is_err());
        assert!(build_composite(&[3, 9]).is_err());
    }

    #[test]
    fn torus_shape() {
        let t = build_torus(4, 6).unwrap();
        assert_eq!(t.net.len(), 24);
        assert_eq!(t.net.edge_count(), 48);
        assert!(t.net.validate().is_valid());
        for i in 0..24 {
            assert_eq!(t.net.degree(i), 4);
        }
        assert!(build_torus(5, 4).is_err());
        assert!(build_torus(2, 4).is_err());
        assert!(build_torus(4, 2).is_err());
    }

    #[test]
    fn random_networks_are_valid_and_seed_stable() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let net = random_bipartite_even(&mut rng, 40);
            let report = net.validate();
            assert!(report.is_valid(), "{report}");
            assert!(net.len() >= 2);
        }
        let a = random_bipartite_even(&mut ChaCha8Rng::seed_from_u64(9), 30);
        let b = random_bipartite_even(&mut ChaCha8Rng::seed_from_u64(9), 30);
        assert_eq!(a, b);
    }
}
