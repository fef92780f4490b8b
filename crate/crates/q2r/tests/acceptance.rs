//! The ten acceptance checks, one test per criterion, so the harness prints
//! one pass/fail line for each. Details (timings, counts, budgets) print
//! with `-- --nocapture` and always accompany a failure; `q2r verify-all`
//! runs the same checks from the command line.

use q2r::accept::{run_criterion, DEFAULT_SEED};

fn check(index: usize) {
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get()).min(8);
    let out = run_criterion(index, DEFAULT_SEED, jobs);
    println!("{out}");
    assert!(out.passed, "{out}");
}

#[test]
fn criterion_01_prime_ring_periods() {
    check(1);
}

#[test]
fn criterion_02_four_node_two_cycle_orbit() {
    check(2);
}

#[test]
fn criterion_03_ring_fixed_point_census() {
    check(3);
}

#[test]
fn criterion_04_composite_periods_and_frozen_ports() {
    check(4);
}

#[test]
fn criterion_05_half_step_energy_conservation() {
    check(5);
}

#[test]
fn criterion_06_reversibility_and_injectivity() {
    check(6);
}

#[test]
fn criterion_07_gadget_certification_and_identities() {
    check(7);
}

#[test]
fn criterion_08_compiler_against_the_evaluator() {
    check(8);
}

#[test]
fn criterion_09_parallel_simulator_equivalence() {
    check(9);
}

#[test]
fn criterion_10_algebraic_fast_forward() {
    check(10);
}
