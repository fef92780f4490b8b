//! Update schedules: an ordered list of node blocks. One full step applies
//! one synchronous half-step per block, in order.

use crate::error::{Q2rError, Result};
use crate::net::{BlockClass, Network};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateSchedule {
    blocks: Vec<Vec<u32>>,
}

impl UpdateSchedule {
    /// Single block containing every node: fully synchronous update.
    pub fn parallel(n: usize) -> UpdateSchedule {
        UpdateSchedule { blocks: vec![(0..n as u32).collect()] }
    }

    /// Class A first, then class B. Requires the network to carry labels.
    pub fn two_block(net: &Network) -> Result<UpdateSchedule> {
        if net.classes().is_none() {
            return Err(Q2rError::unsupported(
                "two-block schedule needs a network with block labels",
            ));
        }
        Ok(UpdateSchedule {
            blocks: vec![net.class_nodes(BlockClass::A), net.class_nodes(BlockClass::B)],
        })
    }

    /// Two-block when labels are present, parallel otherwise.
    pub fn natural(net: &Network) -> UpdateSchedule {
        match UpdateSchedule::two_block(net) {
            Ok(s) => s,
            Err(_) => UpdateSchedule::parallel(net.len()),
        }
    }

    pub fn from_blocks(blocks: Vec<Vec<u32>>) -> UpdateSchedule {
        UpdateSchedule { blocks }
    }

    pub fn blocks(&self) -> &[Vec<u32>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// Every node appears in exactly one block and ids are in range.
    pub fn validate(&self, net: &Network) -> Result<()> {
        let n = net.len();
        let mut seen = vec![false; n];
        for block in &self.blocks {
            for &i in block {
                let i = i as usize;
                if i >= n {
                    return Err(Q2rError::unsupported(format!(
                        "schedule mentions node {} but the network has {} nodes",
                        i + 1,
                        n
                    )));
                }
                if seen[i] {
                    return Err(Q2rError::unsupported(format!(
                        "schedule lists node {} twice",
                        i + 1
                    )));
                }
                seen[i] = true;
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Q2rError::unsupported(format!(
                "schedule never updates node {}",
                missing + 1
            )));
        }
        Ok(())
    }

    /// True when no block contains two adjacent nodes. Under this condition
    /// each half-step is an involution and the full step is invertible.
    pub fn all_blocks_independent(&self, net: &Network) -> bool {
        self.blocks.iter().all(|b| net.is_independent(b))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::Network;

    fn ring4() -> Network {
        Network::from_edges(
            4,
            &[(0, 1), (1, 2), (2, 3), (3, 0)],
            Some(vec![BlockClass::A, BlockClass::B, BlockClass::A, BlockClass::B]),
        )
    }

    #[test]
    fn two_block_is_independent() {
        let net = ring4();
        let sched = UpdateSchedule::two_block(&net).unwrap();
        assert_eq!(sched.blocks(), &[vec![0, 2], vec![1, 3]]);
        sched.validate(&net).unwrap();
        assert!(sched.all_blocks_independent(&net));
    }

    #[test]
    fn parallel_on_a_ring_is_not_independent() {
        let net = ring4();
        let sched = UpdateSchedule::parallel(4);
        sched.validate(&net).unwrap();
        assert!(!sched.all_blocks_independent(&net));
    }

    #[test]
    fn natural_falls_back_to_parallel() {
        let net = Network::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)], None);
        let sched = UpdateSchedule::natural(&net);
        assert_eq!(sched.block_count(), 1);
    }

    #[test]
    fn validation_rejects_gaps_and_repeats() {
        let net = ring4();
        assert!(UpdateSchedule::from_blocks(vec![vec![0, 1]]).validate(&net).is_err());
        assert!(UpdateSchedule::from_blocks(vec![vec![0, 1, 2, 3, 3]]).validate(&net).is_err());
        assert!(UpdateSchedule::from_blocks(vec![vec![0, 1, 2, 4]]).validate(&net).is_err());
    }
}
