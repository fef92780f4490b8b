//! Algebraic fast-forward for degree-2 networks.
//!
//! With exactly two neighbors a, b, a balanced neighborhood means the two
//! neighbor spins disagree, which in the 0/1 encoding is `x_a XOR x_b = 1`.
//! The update is therefore `x_i' = x_i XOR x_a XOR x_b`: linear over GF(2)
//! with no affine part. One half-step is a bit matrix, a full step is the
//! ordered product of its block matrices, and t steps is a matrix power
//! computed by square-and-multiply.

use crate::config::Configuration;
use crate::error::{Q2rError, Result};
use crate::net::Network;
use crate::schedule::UpdateSchedule;

/// Dense bit matrix over GF(2), row-major, one row per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearStepMatrix {
    n: usize,
    words_per_row: usize,
    rows: Vec<u64>,
}

impl LinearStepMatrix {
    pub fn identity(n: usize) -> LinearStepMatrix {
        let words_per_row = n.div_ceil(64);
        let mut rows = vec![0u64; n * words_per_row];
        for i in 0..n {
            rows[i * words_per_row + i / 64] |= 1u64 << (i % 64);
        }
        LinearStepMatrix { n, words_per_row, rows }
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    fn flip_bit(&mut self, i: usize, j: usize) {
        self.rows[i * self.words_per_row + j / 64] ^= 1u64 << (j % 64);
    }

    /// Matrix of one full step of the schedule. Requires every node degree to
    /// be exactly 2 and every block independent, which is what makes each
    /// half-step linear and their composition well-defined block by block.
    pub fn for_schedule(net: &Network, sched: &UpdateSchedule) -> Result<LinearStepMatrix> {
        net.ensure_valid()?;
        sched.validate(net)?;
        let n = net.len();
        for i in 0..n {
            if net.degree(i) != 2 {
                return Err(Q2rError::unsupported(format!(
                    "linear fast-forward needs degree exactly 2 everywhere; node {} has {}",
                    i + 1,
                    net.degree(i)
                )));
            }
        }
        if !sched.all_blocks_independent(net) {
            return Err(Q2rError::unsupported(
                "linear fast-forward needs independent blocks",
            ));
        }
        let mut acc = LinearStepMatrix::identity(n);
        for block in sched.blocks() {
            let mut h = LinearStepMatrix::identity(n);
            for &i in block {
                let i = i as usize;
                let nbrs = net.neighbors(i);
                h.flip_bit(i, nbrs[0] as usize);
                h.flip_bit(i, nbrs[1] as usize);
            }
            acc = h.multiply(&acc);
        }
        Ok(acc)
    }

    /// `self * rhs` over GF(2): row i of the product is the XOR of the rhs
    /// rows selected by the bits of row i.
    pub fn multiply(&self, rhs: &LinearStepMatrix) -> LinearStepMatrix {
        assert_eq!(self.n, rhs.n);
        let n = self.n;
        let w = self.words_per_row;
        let mut out = LinearStepMatrix { n, words_per_row: w, rows: vec![0u64; n * w] };
        for i in 0..n {
            let src = self.row(i);
            let dst_start = i * w;
            for (word_idx, &word) in src.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let j = word_idx * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let rhs_row = rhs.row(j);
                    for (dst, src) in out.rows[dst_start..dst_start + w].iter_mut().zip(rhs_row) {
                        *dst ^= src;
                    }
                }
            }
        }
        out
    }

    /// `self^t` by square-and-multiply; also returns how many matrix
    /// multiplications were spent, which is at most `2 * ceil(log2(t + 1))`.
    pub fn pow(&self, t: u64) -> (LinearStepMatrix, usize) {
        let mut result = LinearStepMatrix::identity(self.n);
        let mut base = self.clone();
        let mut exp = t;
        let mut mults = 0usize;
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.multiply(&base);
                mults += 1;
            }
            exp >>= 1;
            if exp > 0 {
                base = base.multiply(&base);
                mults += 1;
            }
        }
        (result, mults)
    }

    /// Apply to a configuration: bit i of the output is the parity of
    /// `row_i AND x`.
    pub fn apply(&self, x: &Configuration) -> Configuration {
        assert_eq!(x.len(), self.n);
        let words = x.words();
        let mut out = Configuration::all_minus(self.n);
        for i in 0..self.n {
            let parity: u32 =
                self.row(i).iter().zip(words).map(|(r, w)| (r & w).count_ones()).sum();
            if parity % 2 == 1 {
                out.flip(i);
            }
        }
        out
    }
}

/// State after `t` full steps, computed in O(log t) matrix multiplications.
/// Returns the state and the multiplication count actually spent.
pub fn linear_fastforward(
    net: &Network,
    sched: &UpdateSchedule,
    start: &Configuration,
    t: u64,
) -> Result<(Configuration, usize)> {
    let m = LinearStepMatrix::for_schedule(net, sched)?;
    let (mt, mults) = m.pow(t);
    Ok((mt.apply(start), mults))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::BlockClass;
    use crate::sim::step;

    fn ring(n: usize) -> (Network, UpdateSchedule) {
        let edges: Vec<(usize, usize)> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        let classes =
            (0..n).map(|i| if i % 2 == 0 { BlockClass::A } else { BlockClass::B }).collect();
        let net = Network::from_edges(n, &edges, Some(classes));
        let sched = UpdateSchedule::two_block(&net).unwrap();
        (net, sched)
    }

    #[test]
    fn matrix_matches_stepping() {
        let (net, sched) = ring(10);
        let m = LinearStepMatrix::for_schedule(&net, &sched).unwrap();
        for bits in [0b1u64, 0b1011, 0b1111100110, 0b0101010101] {
            let x = Configuration::from_bits_u64(10, bits);
            assert_eq!(m.apply(&x), step(&net, &sched, &x));
        }
    }

    #[test]
    fn powers_match_iteration() {
        let (net, sched) = ring(14);
        let x0 = Configuration::from_bits_u64(14, 1);
        let mut x = x0.clone();
        for t in 0..40u64 {
            let (fast, _) = linear_fastforward(&net, &sched, &x0, t).unwrap();
            assert_eq!(fast, x, "t={t}");
            x = step(&net, &sched, &x);
        }
    }

    #[test]
    fn multiplication_count_is_logarithmic() {
        let (net, sched) = ring(6);
        let m = LinearStepMatrix::for_schedule(&net, &sched).unwrap();
        for (t, max_mults) in [(1u64, 2usize), (13, 8), (10_000, 28), (1 << 20, 42)] {
            let (_, mults) = m.pow(t);
            assert!(mults <= max_mults, "t={t} took {mults} multiplications");
            let bound = 2 * (64 - t.leading_zeros()) as usize;
            assert!(mults <= bound, "t={t}: {mults} > {bound}");
        }
    }

    #[test]
    fn degree_and_independence_guards() {
        let (net, _) = ring(6);
        let par = UpdateSchedule::parallel(6);
        assert!(LinearStepMatrix::for_schedule(&net, &par).is_err());

        let t = crate::topology::build_torus(4, 4).unwrap();
        let sched = UpdateSchedule::two_block(&t.net).unwrap();
        assert!(LinearStepMatrix::for_schedule(&t.net, &sched).is_err());
    }

    #[test]
    fn identity_power_zero() {
        let (net, sched) = ring(6);
        let m = LinearStepMatrix::for_schedule(&net, &sched).unwrap();
        let (m0, mults) = m.pow(0);
        assert_eq!(m0, LinearStepMatrix::identity(6));
        assert_eq!(mults, 0);
    }
}
