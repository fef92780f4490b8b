//! Property tests: the structural invariants of the rule, checked on seeded
//! random bipartite even-degree networks and random configurations.

use proptest::prelude::*;
use q2r::config::Configuration;
use q2r::schedule::UpdateSchedule;
use q2r::sim::{energy, half_step, inverse_step, step};
use q2r::textio::{parse_network, write_network};
use q2r::topology::random_bipartite_even;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn net_and_config(seed: u64, max_nodes: usize) -> (q2r::Network, Configuration) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let net = random_bipartite_even(&mut rng, max_nodes);
    let mut x = Configuration::all_minus(net.len());
    for i in 0..net.len() {
        if rng.gen::<bool>() {
            x.flip(i);
        }
    }
    (net, x)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn energy_is_constant_across_half_steps(seed in any::<u64>(), extra in 4usize..48) {
        let (net, mut x) = net_and_config(seed, extra);
        let sched = UpdateSchedule::two_block(&net).unwrap();
        let e0 = energy(&net, &x);
        for _ in 0..16 {
            for block in sched.blocks() {
                x = half_step(&net, &x, block);
                prop_assert_eq!(energy(&net, &x), e0);
            }
        }
    }

    #[test]
    fn class_half_steps_are_involutions(seed in any::<u64>(), extra in 4usize..48) {
        let (net, x) = net_and_config(seed, extra);
        let sched = UpdateSchedule::two_block(&net).unwrap();
        for block in sched.blocks() {
            let y = half_step(&net, &x, block);
            prop_assert_eq!(half_step(&net, &y, block), x.clone());
        }
    }

    #[test]
    fn inverse_step_undoes_step(seed in any::<u64>(), extra in 4usize..48) {
        let (net, x) = net_and_config(seed, extra);
        let sched = UpdateSchedule::two_block(&net).unwrap();
        let mut y = x.clone();
        for _ in 0..8 {
            y = step(&net, &sched, &y);
        }
        for _ in 0..8 {
            y = inverse_step(&net, &sched, &y).unwrap();
        }
        prop_assert_eq!(y, x);
    }

    #[test]
    fn network_text_round_trips(seed in any::<u64>(), extra in 4usize..48) {
        let (net, _) = net_and_config(seed, extra);
        let text = write_network(&net);
        let again = parse_network(&text).unwrap();
        prop_assert_eq!(&net, &again);
        prop_assert_eq!(write_network(&again), text);
    }

    #[test]
    fn config_text_round_trips(bits in proptest::collection::vec(any::<bool>(), 0..200)) {
        let mut x = Configuration::all_minus(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                x.flip(i);
            }
        }
        let text = x.to_text();
        prop_assert_eq!(Configuration::parse(&text).unwrap(), x);
    }

    #[test]
    fn stepping_is_deterministic(seed in any::<u64>(), extra in 4usize..48) {
        let (net, x) = net_and_config(seed, extra);
        let sched = UpdateSchedule::two_block(&net).unwrap();
        prop_assert_eq!(step(&net, &sched, &x), step(&net, &sched, &x));
    }
}
