//! The update rule and its energy invariant.
//!
//! A node flips exactly when its neighborhood is balanced: as many +1
//! neighbors as -1 neighbors. Within one half-step every node of the block
//! reads the same snapshot, so updates commute when the block is independent
//! and the half-step is then an involution.

use crate::config::{Configuration, Spin};
use crate::error::{Q2rError, Result};
use crate::net::Network;
use crate::schedule::UpdateSchedule;

/// Sum of neighbor spins of node `i` in `x`.
#[inline]
pub fn neighbor_sum(net: &Network, x: &Configuration, i: usize) -> i64 {
    let nbrs = net.neighbors(i);
    let plus = x.count_plus(nbrs) as i64;
    2 * plus - nbrs.len() as i64
}

/// Value of node `i` after one half-step that includes it.
#[inline]
pub fn local_next(net: &Network, x: &Configuration, i: usize) -> Spin {
    let s = x.get(i);
    if neighbor_sum(net, x, i) == 0 {
        s.flipped()
    } else {
        s
    }
}

/// Synchronous update of one block, reading the snapshot `x`, writing into
/// `out`. `out` is fully overwritten.
pub fn half_step_into(net: &Network, x: &Configuration, block: &[u32], out: &mut Configuration) {
    out.clone_from(x);
    for &i in block {
        let i = i as usize;
        if neighbor_sum(net, x, i) == 0 {
            out.flip(i);
        }
    }
}

pub fn half_step(net: &Network, x: &Configuration, block: &[u32]) -> Configuration {
    let mut out = x.clone();
    for &i in block {
        let i = i as usize;
        if neighbor_sum(net, x, i) == 0 {
            out.flip(i);
        }
    }
    out
}

/// One full step: every block of the schedule, in order.
pub fn step(net: &Network, sched: &UpdateSchedule, x: &Configuration) -> Configuration {
    let mut cur = x.clone();
    let mut buf = x.clone();
    for block in sched.blocks() {
        half_step_into(net, &cur, block, &mut buf);
        std::mem::swap(&mut cur, &mut buf);
    }
    cur
}

/// Inverse of [`step`]: the blocks replayed in reverse order. Requires every
/// block to be independent (each half-step its own inverse); otherwise the
/// step need not be invertible at all and this returns an error.
pub fn inverse_step(
    net: &Network,
    sched: &UpdateSchedule,
    x: &Configuration,
) -> Result<Configuration> {
    if !sched.all_blocks_independent(net) {
        return Err(Q2rError::unsupported(
            "inverse step requires independent blocks",
        ));
    }
    let mut cur = x.clone();
    let mut buf = x.clone();
    for block in sched.blocks().iter().rev() {
        half_step_into(net, &cur, block, &mut buf);
        std::mem::swap(&mut cur, &mut buf);
    }
    Ok(cur)
}

/// Interaction energy: minus the sum of spin products over the edges.
pub fn energy(net: &Network, x: &Configuration) -> i64 {
    let mut e = 0i64;
    for i in 0..net.len() {
        let si = x.get(i).value();
        for &j in net.neighbors(i) {
            let j = j as usize;
            if j > i {
                e -= si * x.get(j).value();
            }
        }
    }
    e
}
