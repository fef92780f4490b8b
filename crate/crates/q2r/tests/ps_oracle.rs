//! The parallel simulator against the two-block dynamics on random
//! networks, plus structural frozen-value checks.

use q2r::config::{Configuration, Spin};
use q2r::net::BlockClass;
use q2r::ps::{build_ps, half_step_phase, ps_initial, verify_ps};
use q2r::schedule::UpdateSchedule;
use q2r::sim::step;
use q2r::topology::{build_ring, build_torus, random_bipartite_even};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_config<R: Rng>(rng: &mut R, n: usize) -> Configuration {
    let mut x = Configuration::all_minus(n);
    for i in 0..n {
        if rng.gen() {
            x.set(i, Spin::Plus);
        }
    }
    x
}

#[test]
fn random_networks_verify_for_a_hundred_block_steps() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x95_0C);
    for round in 0..25 {
        let net = random_bipartite_even(&mut rng, 24);
        let x = random_config(&mut rng, net.len());
        let report = verify_ps(&net, &x, 100).unwrap();
        assert!(report.ok, "round {round}: {report}");
        assert_eq!(report.nodes, 2 * net.len() + 8 * (net.max_degree() / 2));
    }
}

#[test]
fn rings_and_torus_verify() {
    for p in [3u64, 5] {
        let ring = build_ring(p).unwrap();
        let report = verify_ps(&ring.net, &ring.canonical, 100).unwrap();
        assert!(report.ok, "ring {p}: {report}");
    }
    let torus = build_torus(4, 4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let x = random_config(&mut rng, torus.net.len());
    let report = verify_ps(&torus.net, &x, 50).unwrap();
    assert!(report.ok, "torus: {report}");
}

#[test]
fn node_count_scales_with_the_maximum_degree() {
    let torus = build_torus(4, 6).unwrap(); // 24 nodes, all degree 4
    let ps = build_ps(&torus.net).unwrap();
    assert_eq!(ps.alpha, 2);
    assert_eq!(ps.len(), 2 * 24 + 16);
    for v in 0..ps.len() {
        assert_eq!(ps.net.degree(v) % 2, 0);
    }
}

#[test]
fn phase_alternates_for_the_whole_run() {
    let ring = build_ring(5).unwrap();
    let ps = build_ps(&ring.net).unwrap();
    let mut state = ps_initial(&ps, &ring.canonical).unwrap();
    let sched = UpdateSchedule::parallel(ps.net.len());
    for k in 0..40u64 {
        let phase = half_step_phase(&ps, &state).unwrap();
        let want = if k % 2 == 0 { BlockClass::A } else { BlockClass::B };
        assert_eq!(phase, want, "parallel step {k}");
        state = step(&ps.net, &sched, &state);
    }
}

#[test]
fn corrupting_one_mirror_is_reported_with_coordinates() {
    // a PS built by hand with one wrong mirror spin drifts off the
    // original trajectory; the verifier sees it as a projection failure
    let ring = build_ring(3).unwrap();
    let ps = build_ps(&ring.net).unwrap();
    let mut state = ps_initial(&ps, &ring.canonical).unwrap();
    state.set(ps.mirror(2), state.get(ps.mirror(2)).flipped());

    // mirror invariant is broken immediately
    let broken = (0..ps.n).any(|v| state.get(ps.mirror(v)) == state.get(v));
    assert!(broken);

    // and the clock arithmetic downstream of that node degrades: at least
    // one oscillator neighbor sum is now nonzero
    let nonzero = (1..=ps.alpha)
        .flat_map(|b| (1..=4).map(move |s| (b, s)))
        .any(|(b, s)| q2r::sim::neighbor_sum(&ps.net, &state, ps.oscillator(b, s)) != 0);
    assert!(nonzero);
}

#[test]
fn all_minus_input_projects_constant() {
    let net = build_torus(4, 4).unwrap().net;
    let x = Configuration::all_minus(net.len());
    let report = verify_ps(&net, &x, 20).unwrap();
    assert!(report.ok);

    let ps = build_ps(&net).unwrap();
    let mut state = ps_initial(&ps, &x).unwrap();
    let sched = UpdateSchedule::parallel(ps.net.len());
    for _ in 0..10 {
        state = step(&ps.net, &sched, &state);
        assert_eq!(ps.project(&state), x);
    }
}

#[test]
fn role_lines_round_trip_through_the_bundle_format() {
    let ring = build_ring(3).unwrap();
    let ps = build_ps(&ring.net).unwrap();
    let bundle = q2r::Bundle {
        network: ps.net.clone(),
        config: Some(ps_initial(&ps, &ring.canonical).unwrap()),
        pred: None,
        roles: ps.roles(),
    };
    let text = q2r::write_bundle(&bundle);
    let back = q2r::parse_bundle(&text).unwrap();
    assert_eq!(back.roles, ps.roles());
    assert_eq!(back.network.len(), ps.len());
    assert_eq!(back.config.unwrap(), bundle.config.unwrap());
}
