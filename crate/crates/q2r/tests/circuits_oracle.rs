//! End-to-end circuit checks against independent oracles: the pure Boolean
//! evaluator, monotonicity of AND/OR networks, and hand-traced ring orbits
//! for the prediction problem.

use q2r::circuits::compile::{
    answer_pred, compile_circuit, pred_from_text, pred_to_text, random_as2m_circuit,
    random_assignment, to_pred_instance, Compiler, PredInstance,
};
use q2r::circuits::{evaluate_circuit, parse_assignment, parse_circuit, validate_as2m, Assignment};
use q2r::config::Spin;
use q2r::schedule::UpdateSchedule;
use q2r::sim::step;
use q2r::topology::build_ring;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn compiled_readouts_match_the_evaluator_across_fuzz_circuits() {
    let compiler = Compiler::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC1_8C01);
    for round in 0..120 {
        let c = random_as2m_circuit(&mut rng, 30);
        assert!(validate_as2m(&c).is_strict(), "round {round}: generator left the strict class");
        let asg = random_assignment(&mut rng, &c);
        let cc = compiler.compile(&c, &asg).unwrap();
        let want = evaluate_circuit(&c, &asg).unwrap();
        let got = cc.run_readouts(&cc.initial).unwrap();
        for (id, v) in &want {
            assert_eq!(got[id], *v, "round {round}, gate {id}");
        }
    }
}

#[test]
fn flipping_one_input_true_never_drops_a_readout() {
    // AND/OR circuits are monotone; the compiled network must agree.
    let compiler = Compiler::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD0_0D);
    for _ in 0..25 {
        let c = random_as2m_circuit(&mut rng, 24);
        let asg = random_assignment(&mut rng, &c);
        let cc = compiler.compile(&c, &asg).unwrap();
        let base = cc.run_readouts(&cc.initial).unwrap();
        for id in c.input_ids() {
            if asg.get(id) == Some(true) {
                continue;
            }
            let mut bumped = asg.clone();
            bumped.set(id, true);
            let raised = cc.run_readouts(&cc.initial_for(&bumped).unwrap()).unwrap();
            for (gate, &v) in &base {
                assert!(
                    !v || raised[gate],
                    "raising input {id} dropped gate {gate} from true to false"
                );
            }
        }
    }
}

#[test]
fn all_false_assignments_compile_to_exact_fixed_points() {
    let compiler = Compiler::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0x0F10);
    for _ in 0..15 {
        let c = random_as2m_circuit(&mut rng, 24);
        let mut asg = Assignment::default();
        for id in c.input_ids() {
            asg.set(id, false);
        }
        let cc = compiler.compile(&c, &asg).unwrap();
        let sched = UpdateSchedule::two_block(&cc.net).unwrap();
        let mut x = cc.initial.clone();
        for _ in 0..cc.horizon {
            x = step(&cc.net, &sched, &x);
            assert_eq!(x, cc.initial, "all-false network moved");
        }
        let got = cc.run_readouts(&cc.initial).unwrap();
        assert!(got.values().all(|&v| !v));
    }
}

#[test]
fn worked_example_single_or_from_text() {
    let c = parse_circuit("# one gate\ninput 1\ninput 2\ngate 3 or 1 2\noutput 3\n").unwrap();
    let asg = parse_assignment("assign 1=1 2=0\n").unwrap();
    let cc = compile_circuit(&c, &asg).unwrap();
    assert_eq!(cc.horizon, 4);
    let (node, time) = cc.readout[&3];
    assert_eq!(time, 4);

    let got = cc.run_readouts(&cc.initial).unwrap();
    assert!(got[&3]);

    // the PRED view of the same question
    let inst = to_pred_instance(&cc, 3).unwrap();
    assert_eq!(inst.node, node);
    assert_eq!(inst.t, 4);
    assert!(answer_pred(&inst).unwrap());

    let round = pred_from_text(&pred_to_text(&inst)).unwrap();
    assert_eq!(round.t, inst.t);
    assert_eq!(round.node, inst.node);
    assert!(answer_pred(&round).unwrap());
}

#[test]
fn pred_on_ring_six_matches_the_hand_trace() {
    // canonical C_6 orbit: 100000 -> 110001 -> 111011 -> 100000
    let ring = build_ring(3).unwrap();
    let expect = |t: u64, node: usize, want: bool| {
        let inst = PredInstance {
            net: ring.net.clone(),
            initial: ring.canonical.clone(),
            t,
            node,
        };
        assert_eq!(answer_pred(&inst).unwrap(), want, "t={t} node={node}");
    };
    expect(0, 0, false);
    expect(1, 1, true); // 0 -> 1 in 110001
    expect(1, 2, false);
    expect(2, 4, true); // 0 -> 1 in 111011
    expect(3, 1, false); // back at the start
    expect(3, 0, false);

    // node 0 is a frozen port: never changes at any sampled time
    for t in 0..12 {
        expect(t, 0, false);
    }
}

#[test]
fn pred_answers_are_stable_across_serialization() {
    let ring = build_ring(5).unwrap();
    for t in [0u64, 1, 4, 5, 9] {
        for node in [0usize, 2, 5, 7] {
            let inst = PredInstance {
                net: ring.net.clone(),
                initial: ring.canonical.clone(),
                t,
                node,
            };
            let direct = answer_pred(&inst).unwrap();
            let round = pred_from_text(&pred_to_text(&inst)).unwrap();
            assert_eq!(answer_pred(&round).unwrap(), direct, "t={t} node={node}");
        }
    }
}

#[test]
fn readout_timing_is_three_steps_per_layer() {
    let compiler = Compiler::new().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let c = random_as2m_circuit(&mut rng, 30);
        let asg = random_assignment(&mut rng, &c);
        let cc = compiler.compile(&c, &asg).unwrap();
        for (&gate, &(_, time)) in &cc.readout {
            let layer = c.layer(gate) as u64;
            assert_eq!(time, if layer == 0 { 1 } else { 3 * layer + 1 });
        }
        assert_eq!(cc.horizon, 3 * c.depth() as u64 + 1);
        assert!(cc.size_ratio <= 64.0);
    }
}

#[test]
fn compiled_initial_spins_match_the_assignment() {
    let compiler = Compiler::new().unwrap();
    let c = parse_circuit("input 1\ninput 2\ngate 3 or 1 2\noutput 3\n").unwrap();
    let asg = parse_assignment("assign 1=1 2=0\n").unwrap();
    let cc = compiler.compile(&c, &asg).unwrap();
    assert_eq!(cc.initial.get(cc.input_ports[&1]), Spin::Plus);
    assert_eq!(cc.initial.get(cc.input_ports[&2]), Spin::Minus);
}
