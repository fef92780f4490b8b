//! Orbit analysis: stepping with an energy audit, period detection, and
//! exhaustive checks on small networks.

use std::collections::HashMap;

use serde::Serialize;

use crate::config::Configuration;
use crate::error::{Q2rError, Result};
use crate::net::Network;
use crate::schedule::UpdateSchedule;
use crate::sim::{energy, half_step_into, step};

/// Default cap on the number of full steps any orbit search will take.
pub const DEFAULT_PERIOD_CAP: u64 = 1 << 26;

/// A stepping cursor over one orbit. Tracks half-step phase so callers can
/// observe intermediate panels, and optionally re-checks the energy after
/// every half-step.
pub struct Trajectory<'a> {
    net: &'a Network,
    sched: &'a UpdateSchedule,
    state: Configuration,
    buf: Configuration,
    time: u64,
    phase: usize,
    audit_energy: Option<i64>,
}

impl<'a> Trajectory<'a> {
    pub fn new(net: &'a Network, sched: &'a UpdateSchedule, start: Configuration) -> Self {
        let buf = start.clone();
        Trajectory { net, sched, state: start, buf, time: 0, phase: 0, audit_energy: None }
    }

    /// Enable the per-half-step energy check.
    pub fn with_energy_audit(mut self) -> Self {
        self.audit_energy = Some(energy(self.net, &self.state));
        self
    }

    pub fn state(&self) -> &Configuration {
        &self.state
    }

    /// Completed full steps. Meaningful when [`Self::phase`] is 0.
    pub fn time(&self) -> u64 {
        self.time
    }

    /// Index of the next block to run within the current step.
    pub fn phase(&self) -> usize {
        self.phase
    }

    /// Run one block. Returns the index of the block that ran.
    pub fn advance_half(&mut self) -> Result<usize> {
        let ran = self.phase;
        let block = &self.sched.blocks()[ran];
        half_step_into(self.net, &self.state, block, &mut self.buf);
        std::mem::swap(&mut self.state, &mut self.buf);
        self.phase += 1;
        if self.phase == self.sched.block_count() {
            self.phase = 0;
            self.time += 1;
        }
        if let Some(e0) = self.audit_energy {
            let e = energy(self.net, &self.state);
            if e != e0 {
                return Err(Q2rError::EnergyDrift { step: self.time, before: e0, after: e });
            }
        }
        Ok(ran)
    }

    /// Run all remaining blocks of the current step.
    pub fn advance(&mut self) -> Result<()> {
        loop {
            self.advance_half()?;
            if self.phase == 0 {
                return Ok(());
            }
        }
    }
}

/// Result of a period search. `cap_hit` means nothing was found within the
/// step budget and the other fields are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub period: u64,
    pub preperiod: u64,
    pub cap_hit: bool,
}

impl std::fmt::Display for PeriodReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "period={} preperiod={} cap_hit={}",
            self.period, self.preperiod, self.cap_hit
        )
    }
}

/// Find the eventual period of the orbit of `start`, and how many steps it
/// takes to enter it.
///
/// With an all-independent schedule the map is invertible, every orbit is a
/// pure cycle, and the first return to `start` is the period; that path costs
/// no memory. Otherwise Brent's cycle detection runs, which also reports a
/// possible transient.
pub fn find_period(
    net: &Network,
    sched: &UpdateSchedule,
    start: &Configuration,
    cap: u64,
) -> Result<PeriodReport> {
    net.ensure_valid()?;
    sched.validate(net)?;
    let capped = PeriodReport { period: 0, preperiod: 0, cap_hit: true };

    if sched.all_blocks_independent(net) {
        let mut x = step(net, sched, start);
        let mut t = 1u64;
        while &x != start {
            if t >= cap {
                return Ok(capped);
            }
            x = step(net, sched, &x);
            t += 1;
        }
        return Ok(PeriodReport { period: t, preperiod: 0, cap_hit: false });
    }

    // Brent: search for the cycle length with a teleporting tortoise, then
    // locate where the cycle starts.
    let mut budget = cap;
    let mut spend = |steps: u64| -> bool {
        if budget < steps {
            false
        } else {
            budget -= steps;
            true
        }
    };
    let mut power = 1u64;
    let mut lam = 1u64;
    let mut tortoise = start.clone();
    let mut hare = step(net, sched, start);
    if !spend(1) {
        return Ok(capped);
    }
    while tortoise != hare {
        if power == lam {
            tortoise = hare.clone();
            power *= 2;
            lam = 0;
        }
        if !spend(1) {
            return Ok(capped);
        }
        hare = step(net, sched, &hare);
        lam += 1;
    }
    let mut mu = 0u64;
    tortoise = start.clone();
    hare = start.clone();
    for _ in 0..lam {
        hare = step(net, sched, &hare);
    }
    while tortoise != hare {
        tortoise = step(net, sched, &tortoise);
        hare = step(net, sched, &hare);
        mu += 1;
    }
    Ok(PeriodReport { period: lam, preperiod: mu, cap_hit: false })
}

/// True when the orbit of `start` returns to `start` (no transient) within
/// `cap` steps; false when it provably enters a cycle elsewhere or the cap
/// is reached.
pub fn returns_to_start(
    net: &Network,
    sched: &UpdateSchedule,
    start: &Configuration,
    cap: u64,
) -> Result<bool> {
    let report = find_period(net, sched, start, cap)?;
    Ok(!report.cap_hit && report.preperiod == 0)
}

fn config_as_index(x: &Configuration) -> u64 {
    debug_assert!(x.len() <= 64);
    x.words().first().copied().unwrap_or(0)
}

/// All fixed points of the full step, by exhaustive enumeration. Guarded to
/// small networks.
pub fn brute_force_fixed_points(
    net: &Network,
    sched: &UpdateSchedule,
) -> Result<Vec<Configuration>> {
    let n = net.len();
    if n > 24 {
        return Err(Q2rError::unsupported(format!(
            "fixed-point enumeration is capped at 24 nodes, got {n}"
        )));
    }
    net.ensure_valid()?;
    sched.validate(net)?;
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << n) {
        let x = Configuration::from_bits_u64(n, bits);
        if step(net, sched, &x) == x {
            out.push(x);
        }
    }
    Ok(out)
}

/// Check that the full step permutes the whole state space, by exhaustive
/// image counting. Guarded to small networks.
pub fn brute_force_bijectivity(net: &Network, sched: &UpdateSchedule) -> Result<bool> {
    let n = net.len();
    if n > 20 {
        return Err(Q2rError::unsupported(format!(
            "bijectivity sweep is capped at 20 nodes, got {n}"
        )));
    }
    net.ensure_valid()?;
    sched.validate(net)?;
    let mut seen = vec![false; 1usize << n];
    for bits in 0u64..(1u64 << n) {
        let x = Configuration::from_bits_u64(n, bits);
        let y = config_as_index(&step(net, sched, &x));
        if seen[y as usize] {
            return Ok(false);
        }
        seen[y as usize] = true;
    }
    Ok(true)
}

/// Exhaustive orbit census for small networks: orbit count and a histogram
/// of cycle lengths, `length -> how many configurations lie on such cycles`.
pub fn orbit_census(net: &Network, sched: &UpdateSchedule) -> Result<HashMap<u64, u64>> {
    let n = net.len();
    if n > 20 {
        return Err(Q2rError::unsupported(format!(
            "orbit census is capped at 20 nodes, got {n}"
        )));
    }
    net.ensure_valid()?;
    sched.validate(net)?;
    let size = 1usize << n;
    let mut orbit_of: Vec<u64> = vec![u64::MAX; size];
    let mut census = HashMap::new();
    for bits in 0u64..(size as u64) {
        if orbit_of[bits as usize] != u64::MAX {
            continue;
        }
        let start = Configuration::from_bits_u64(n, bits);
        let mut x = start.clone();
        let mut len = 0u64;
        loop {
            orbit_of[config_as_index(&x) as usize] = bits;
            x = step(net, sched, &x);
            len += 1;
            if x == start {
                break;
            }
            if orbit_of[config_as_index(&x) as usize] != u64::MAX {
                return Err(Q2rError::unsupported(
                    "orbit census expects invertible dynamics; found a transient",
                ));
            }
        }
        *census.entry(len).or_insert(0) += len;
    }
    Ok(census)
}
