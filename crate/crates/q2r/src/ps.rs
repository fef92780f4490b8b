//! Parallel simulation of two-block dynamics.
//!
//! For a labeled network G on n nodes with blocks (A, B) updated A-first,
//! this builds a plain parallel-update network PS on 2n + 8a nodes
//! (a = max degree / 2) whose synchronous dynamics advance G's two-block
//! dynamics at half speed: two PS steps perform one (A then B) step of G.
//!
//! Layout, in deterministic node order:
//! - image nodes 0..n carry G's state and are wired exactly like G;
//! - mirror nodes n..2n carry the negated state, wired like G among
//!   themselves;
//! - a oscillator blocks of four nodes each, internal 4-cycles, initialized
//!   (-1,-1,+1,+1) so every oscillator node's neighbor sum is 0 and the
//!   block flips wholesale every step, acting as the phase clock;
//! - a frozen blocks of four nodes each, internal 4-cycles, all -1, whose
//!   nodes keep neighbor sum -2 and never move.
//!
//! A node w of G with degree d and its mirror attach to the first d/2
//! oscillator and frozen blocks: A-side nodes to oscillator slots 3,4 and
//! frozen slots 1,4; B-side nodes to oscillator slots 1,2 and frozen slots
//! 2,3. Image/mirror pairs cancel in every external sum, so oscillator
//! sums stay 0 and frozen sums stay -2 whatever G does. At even times the
//! clock contributes 0 to every A-side node (it updates freely, like its
//! G half-step) and -4(d/2) to every B-side node (pinned); at odd times
//! the roles swap. The mirror side keeps the negation invariant because
//! negating a configuration commutes with the tie-flip rule.

use serde::Serialize;

use crate::config::{Configuration, Spin};
use crate::error::{Q2rError, Result};
use crate::net::{BlockClass, Network};
use crate::schedule::UpdateSchedule;
use crate::sim::step;
use crate::textio::RoleLine;

/// The parallel-simulation network plus its bookkeeping: which original
/// node each PS node stands for, and the clock geometry.
#[derive(Debug, Clone)]
pub struct PsNetwork {
    /// Unlabeled: PS is not two-colorable and runs parallel-only.
    pub net: Network,
    /// Size of the simulated network.
    pub n: usize,
    /// Number of oscillator/frozen blocks: max degree over 2.
    pub alpha: usize,
}

impl PsNetwork {
    pub fn image(&self, v: usize) -> usize {
        v
    }

    pub fn mirror(&self, v: usize) -> usize {
        self.n + v
    }

    /// Oscillator node, block and slot 1-based.
    pub fn oscillator(&self, block: usize, slot: usize) -> usize {
        debug_assert!((1..=self.alpha).contains(&block) && (1..=4).contains(&slot));
        2 * self.n + 4 * (block - 1) + (slot - 1)
    }

    /// Frozen node, block and slot 1-based.
    pub fn frozen(&self, block: usize, slot: usize) -> usize {
        debug_assert!((1..=self.alpha).contains(&block) && (1..=4).contains(&slot));
        2 * self.n + 4 * self.alpha + 4 * (block - 1) + (slot - 1)
    }

    pub fn len(&self) -> usize {
        2 * self.n + 8 * self.alpha
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Role of every PS node, in node order; serializable as `role` lines.
    pub fn roles(&self) -> Vec<(usize, RoleLine)> {
        let mut roles = Vec::with_capacity(self.len());
        for v in 0..self.n {
            roles.push((v, RoleLine::Image { original: v }));
        }
        for v in 0..self.n {
            roles.push((self.mirror(v), RoleLine::Mirror { original: v }));
        }
        for block in 1..=self.alpha {
            for slot in 1..=4 {
                roles.push((self.oscillator(block, slot), RoleLine::Oscillator { block, slot }));
            }
        }
        for block in 1..=self.alpha {
            for slot in 1..=4 {
                roles.push((self.frozen(block, slot), RoleLine::Frozen { block, slot }));
            }
        }
        roles
    }

    /// Restrict a PS configuration to the image nodes.
    pub fn project(&self, x: &Configuration) -> Configuration {
        let mut out = Configuration::all_minus(self.n);
        for v in 0..self.n {
            out.set(v, x.get(v));
        }
        out
    }
}

/// Build the parallel simulator for a labeled network.
pub fn build_ps(net: &Network) -> Result<PsNetwork> {
    net.ensure_valid()?;
    let classes = net
        .classes()
        .ok_or_else(|| Q2rError::unsupported("parallel simulation needs block labels"))?
        .to_vec();
    let n = net.len();
    let alpha = net.max_degree() / 2;
    let ps = PsNetwork { net: Network::from_edges(0, &[], None), n, alpha };

    let mut edges: Vec<(usize, usize)> = Vec::new();
    for (u, v) in net.edges() {
        edges.push((u, v));
        edges.push((ps.mirror(u), ps.mirror(v)));
    }
    for block in 1..=alpha {
        for (a, b) in [(1, 2), (2, 3), (3, 4), (4, 1)] {
            edges.push((ps.oscillator(block, a), ps.oscillator(block, b)));
            edges.push((ps.frozen(block, a), ps.frozen(block, b)));
        }
    }
    for (w, &class) in classes.iter().enumerate() {
        let slots: [(bool, usize); 4] = match class {
            // A-side: oscillator slots 3,4 and frozen slots 1,4
            BlockClass::A => [(true, 3), (true, 4), (false, 1), (false, 4)],
            // B-side: oscillator slots 1,2 and frozen slots 2,3
            BlockClass::B => [(false, 2), (false, 3), (true, 1), (true, 2)],
        };
        for block in 1..=net.degree(w) / 2 {
            for &(osc, slot) in &slots {
                let clock = if osc { ps.oscillator(block, slot) } else { ps.frozen(block, slot) };
                edges.push((w, clock));
                edges.push((ps.mirror(w), clock));
            }
        }
    }

    let full = Network::from_edges(2 * n + 8 * alpha, &edges, None);
    full.ensure_valid()?;
    Ok(PsNetwork { net: full, n, alpha })
}

/// Canonical PS configuration for input x: image x, mirror -x, oscillators
/// (-1,-1,+1,+1), frozen blocks all -1.
pub fn ps_initial(ps: &PsNetwork, x: &Configuration) -> Result<Configuration> {
    if x.len() != ps.n {
        return Err(Q2rError::SizeMismatch { got: x.len(), want: ps.n });
    }
    let mut out = Configuration::all_minus(ps.len());
    for v in 0..ps.n {
        out.set(v, x.get(v));
        out.set(ps.mirror(v), x.get(v).flipped());
    }
    for block in 1..=ps.alpha {
        out.set(ps.oscillator(block, 3), Spin::Plus);
        out.set(ps.oscillator(block, 4), Spin::Plus);
    }
    Ok(out)
}

/// Which original block the NEXT parallel step will update, read off the
/// clock polarity: oscillator slots (3,4) high means the A side moves.
pub fn half_step_phase(ps: &PsNetwork, x: &Configuration) -> Result<BlockClass> {
    if x.len() != ps.len() {
        return Err(Q2rError::SizeMismatch { got: x.len(), want: ps.len() });
    }
    let canonical = |block: usize| {
        x.get(ps.oscillator(block, 1)) == Spin::Minus
            && x.get(ps.oscillator(block, 2)) == Spin::Minus
            && x.get(ps.oscillator(block, 3)) == Spin::Plus
            && x.get(ps.oscillator(block, 4)) == Spin::Plus
    };
    let flipped = |block: usize| {
        x.get(ps.oscillator(block, 1)) == Spin::Plus
            && x.get(ps.oscillator(block, 2)) == Spin::Plus
            && x.get(ps.oscillator(block, 3)) == Spin::Minus
            && x.get(ps.oscillator(block, 4)) == Spin::Minus
    };
    if (1..=ps.alpha).all(canonical) {
        Ok(BlockClass::A)
    } else if (1..=ps.alpha).all(flipped) {
        Ok(BlockClass::B)
    } else {
        Err(Q2rError::ps_verify("clock blocks are not in a canonical phase"))
    }
}

/// Where a verification run first left the contract.
#[derive(Debug, Clone, Serialize)]
pub struct PsDivergence {
    /// Parallel step at which the check failed (1-based).
    pub time: u64,
    /// Offending PS node, when one exists.
    pub node: Option<usize>,
    pub check: String,
}

impl std::fmt::Display for PsDivergence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "step {}: {}", self.time, self.check)?;
        if let Some(node) = self.node {
            write!(f, " (node {})", node + 1)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PsReport {
    /// Two-block steps of the original network that were cross-checked.
    pub steps: u64,
    pub nodes: usize,
    pub alpha: usize,
    pub ok: bool,
    pub divergence: Option<PsDivergence>,
}

impl std::fmt::Display for PsReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "nodes={} alpha={} steps={} {}",
            self.nodes,
            self.alpha,
            self.steps,
            if self.ok { "ok" } else { "FAILED" }
        )?;
        if let Some(d) = &self.divergence {
            write!(f, ": {d}")?;
        }
        Ok(())
    }
}

/// Run the simulator against the original dynamics for T two-block steps
/// and check every contract point: image projection at even times, mirror
/// negation at every step, frozen blocks constant, oscillators alternating,
/// and each parallel step touching only one side's image/mirror nodes.
pub fn verify_ps(net: &Network, x: &Configuration, t_steps: u64) -> Result<PsReport> {
    if t_steps == 0 {
        return Err(Q2rError::unsupported("verification needs at least one step"));
    }
    let ps = build_ps(net)?;
    if x.len() != net.len() {
        return Err(Q2rError::SizeMismatch { got: x.len(), want: net.len() });
    }
    let classes = net.classes().expect("build_ps checked labels").to_vec();
    let sched_g = UpdateSchedule::two_block(net)?;
    let sched_ps = UpdateSchedule::parallel(ps.net.len());

    let mut report =
        PsReport { steps: t_steps, nodes: ps.len(), alpha: ps.alpha, ok: true, divergence: None };
    let fail = |time: u64, node: Option<usize>, check: String| PsDivergence {
        time,
        node,
        check,
    };

    let mut g_state = x.clone();
    let mut ps_state = ps_initial(&ps, x)?;
    let frozen_snapshot = ps_state.clone();

    for k in 1..=2 * t_steps {
        let prev = ps_state.clone();
        ps_state = step(&ps.net, &sched_ps, &ps_state);

        // one side moves per parallel step: odd k is the A half, even k B
        let active = if k % 2 == 1 { BlockClass::A } else { BlockClass::B };
        for (v, &class) in classes.iter().enumerate() {
            let moved = ps_state.get(v) != prev.get(v)
                || ps_state.get(ps.mirror(v)) != prev.get(ps.mirror(v));
            if moved && class != active {
                report.ok = false;
                report.divergence =
                    Some(fail(k, Some(v), format!("{class:?}-side node moved out of phase")));
                return Ok(report);
            }
        }
        // mirrors negate images, always
        for v in 0..ps.n {
            if ps_state.get(ps.mirror(v)) != ps_state.get(v).flipped() {
                report.ok = false;
                report.divergence = Some(fail(k, Some(v), "mirror stopped negating its image".into()));
                return Ok(report);
            }
        }
        // clocks: frozen blocks constant, oscillator blocks alternating
        for block in 1..=ps.alpha {
            for slot in 1..=4 {
                let f = ps.frozen(block, slot);
                if ps_state.get(f) != frozen_snapshot.get(f) {
                    report.ok = false;
                    report.divergence = Some(fail(k, Some(f), "frozen block moved".into()));
                    return Ok(report);
                }
                let s = ps.oscillator(block, slot);
                if ps_state.get(s) == prev.get(s) {
                    report.ok = false;
                    report.divergence =
                        Some(fail(k, Some(s), "oscillator failed to flip".into()));
                    return Ok(report);
                }
            }
        }
        // even parallel times project onto the two-block trajectory
        if k % 2 == 0 {
            g_state = step(net, &sched_g, &g_state);
            for v in 0..ps.n {
                if ps_state.get(v) != g_state.get(v) {
                    report.ok = false;
                    report.divergence = Some(fail(
                        k,
                        Some(v),
                        format!("projection diverged from the two-block state at step {}", k / 2),
                    ));
                    return Ok(report);
                }
            }
        }
    }
    Ok(report)
}
