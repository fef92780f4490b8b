//! `q2r`: command line front-end for the tie-flip automata toolkit.
//!
//! Subcommands read a plain-text bundle (network, optional configuration,
//! optional prediction query) from a file or stdin and write either a new
//! bundle or a report, so generators pipe into analyzers:
//!
//! ```text
//! q2r ring 13 | q2r period
//! q2r composite 3 5 7 | q2r simulate --steps 105 --audit-energy
//! q2r compile adder.cir | q2r pred
//! ```
//!
//! Exit codes: 0 success (or "yes"), 1 verification failure (or "no"),
//! 2 usage error, 3 invalid input.

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use q2r::accept::{run_all, run_criterion, CRITERIA, DEFAULT_SEED};
use q2r::circuits::compile::{answer_pred, pred_from_text, pred_to_text, to_pred_instance, Compiler};
use q2r::circuits::gadgets::{certify_gadget, GadgetSet, Outcome};
use q2r::circuits::{parse_assignment, parse_circuit, Assignment, Circuit};
use q2r::dynamics::{find_period, Trajectory};
use q2r::ps::{build_ps, ps_initial, verify_ps};
use q2r::sim::energy;
use q2r::topology::{build_composite, build_ring_oriented, build_torus, FrozenPort};
use q2r::{
    parse_bundle, write_bundle, Bundle, Configuration, Q2rError, Result, Spin, UpdateSchedule,
};

#[derive(Parser)]
#[command(
    name = "q2r",
    version,
    about = "Simulate, invert, compile into, and verify reversible tie-flip automata networks"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a bundle forward and print the final configuration
    Simulate(SimulateArgs),
    /// Find the period of the bundled configuration's orbit
    Period(PeriodArgs),
    /// Emit a prime ring with its canonical one-hot configuration
    Ring(RingArgs),
    /// Emit coupled rings whose canonical period is the product of the primes
    Composite(CompositeArgs),
    /// Emit an even-sided checkerboard torus
    Torus(TorusArgs),
    /// Compile a circuit and assignment into a prediction bundle
    Compile(CompileArgs),
    /// Answer the prediction query a bundle carries
    Pred(CommonInput),
    /// Build or verify the parallel twin construction
    #[command(subcommand)]
    Ps(PsCmd),
    /// Certify the gate gadget library
    CertifyGadgets(CertifyArgs),
    /// Run the ten acceptance checks
    VerifyAll(VerifyAllArgs),
}

#[derive(Args)]
struct CommonInput {
    /// Input file; stdin when omitted
    file: Option<PathBuf>,
    /// Emit the result as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchedArg {
    /// Two-block when the network carries classes, parallel otherwise
    Natural,
    /// Class A half-step, then class B
    TwoBlock,
    /// All nodes at once from the same snapshot
    Parallel,
}

impl SchedArg {
    fn build(self, net: &q2r::Network) -> Result<UpdateSchedule> {
        match self {
            SchedArg::Natural => Ok(UpdateSchedule::natural(net)),
            SchedArg::TwoBlock => UpdateSchedule::two_block(net),
            SchedArg::Parallel => Ok(UpdateSchedule::parallel(net.len())),
        }
    }
}

#[derive(Args)]
struct SimulateArgs {
    file: Option<PathBuf>,
    /// Number of full steps to run
    #[arg(short = 't', long, default_value_t = 1)]
    steps: u64,
    #[arg(long, value_enum, default_value_t = SchedArg::Natural)]
    schedule: SchedArg,
    /// Print every visited configuration, one line per step
    #[arg(long)]
    trace: bool,
    /// Check that the energy is unchanged across every half-step
    #[arg(long)]
    audit_energy: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct PeriodArgs {
    file: Option<PathBuf>,
    /// Give up after this many steps
    #[arg(long, default_value_t = 1 << 20)]
    cap: u64,
    #[arg(long, value_enum, default_value_t = SchedArg::Natural)]
    schedule: SchedArg,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RingArgs {
    /// Odd prime (or 2); the ring has 2p nodes and canonical period p
    p: u64,
    /// Let class B update first instead of class A
    #[arg(long)]
    swapped: bool,
}

#[derive(Args)]
struct CompositeArgs {
    /// Distinct odd primes, at least two
    #[arg(num_args = 2.., required = true)]
    primes: Vec<u64>,
}

#[derive(Args)]
struct TorusArgs {
    /// Even width, at least 4
    width: usize,
    /// Even height, at least 4
    height: usize,
}

#[derive(Args)]
struct CompileArgs {
    /// Circuit file (`input`/`gate`/`output` lines, optional `assign` lines)
    file: Option<PathBuf>,
    /// Input values, e.g. "1=1,2=0"; overrides `assign` lines in the file
    #[arg(long)]
    assign: Option<String>,
    /// Output gate to attach the prediction query to
    #[arg(long)]
    output: Option<usize>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum PsCmd {
    /// Lift a bundle to its parallel twin, with role annotations
    Build(CommonInput),
    /// Run the twin beside the original and check every invariant
    Verify(PsVerifyArgs),
}

#[derive(Args)]
struct PsVerifyArgs {
    file: Option<PathBuf>,
    /// Number of original-network steps to verify
    #[arg(short = 't', long, default_value_t = 100)]
    steps: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CertifyArgs {
    /// Break each gadget deliberately and require certification to fail
    #[arg(long)]
    tamper: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyAllArgs {
    /// Seed for the randomized checks
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for the heavy checks
    #[arg(long, default_value_t = default_jobs())]
    jobs: usize,
    /// Run a single criterion (1-10) instead of all ten
    #[arg(long)]
    criterion: Option<usize>,
    #[arg(long)]
    json: bool,
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get()).min(8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("q2r: {e}");
            let code = match e {
                Q2rError::EnergyDrift { .. }
                | Q2rError::PsVerify(_)
                | Q2rError::Certification(_) => 1,
                _ => 3,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Cmd) -> Result<u8> {
    match cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Period(a) => period(a),
        Cmd::Ring(a) => ring(a),
        Cmd::Composite(a) => composite(a),
        Cmd::Torus(a) => torus(a),
        Cmd::Compile(a) => compile(a),
        Cmd::Pred(a) => pred(a),
        Cmd::Ps(PsCmd::Build(a)) => ps_build(a),
        Cmd::Ps(PsCmd::Verify(a)) => ps_verify(a),
        Cmd::CertifyGadgets(a) => certify(a),
        Cmd::VerifyAll(a) => verify_all(a),
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String> {
    let mut text = String::new();
    match path {
        Some(p) => {
            text = std::fs::read_to_string(p)
                .map_err(|e| Q2rError::unsupported(format!("cannot read {}: {e}", p.display())))?;
        }
        None => {
            std::io::stdin()
                .read_to_string(&mut text)
                .map_err(|e| Q2rError::unsupported(format!("cannot read stdin: {e}")))?;
        }
    }
    Ok(text)
}

fn read_bundle(path: &Option<PathBuf>) -> Result<Bundle> {
    let bundle = parse_bundle(&read_input(path)?)?;
    bundle.network.ensure_valid()?;
    Ok(bundle)
}

fn require_config(bundle: &Bundle) -> Result<Configuration> {
    bundle
        .config
        .clone()
        .ok_or_else(|| Q2rError::parse(0, "the bundle carries no configuration line"))
}

fn spin_char(s: Spin) -> char {
    if s == Spin::Plus {
        '+'
    } else {
        '-'
    }
}

fn port_list(ports: &[FrozenPort]) -> String {
    ports
        .iter()
        .map(|p| format!("{}{}", p.node + 1, spin_char(p.spin)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn simulate(a: SimulateArgs) -> Result<u8> {
    let bundle = read_bundle(&a.file)?;
    let net = bundle.network;
    let x0 = bundle.config.unwrap_or_else(|| Configuration::all_minus(net.len()));
    if x0.len() != net.len() {
        return Err(Q2rError::SizeMismatch { got: x0.len(), want: net.len() });
    }
    let sched = a.schedule.build(&net)?;
    let e0 = energy(&net, &x0);
    let mut traj = Trajectory::new(&net, &sched, x0.clone());
    if a.audit_energy {
        traj = traj.with_energy_audit();
    }
    let mut trace = vec![(x0.to_string(), e0)];
    for _ in 0..a.steps {
        traj.advance()?;
        if a.trace {
            trace.push((traj.state().to_string(), energy(&net, traj.state())));
        }
    }
    let final_s = traj.state().to_string();
    let e1 = energy(&net, traj.state());
    if a.json {
        let lines: Vec<&String> = trace.iter().map(|(s, _)| s).collect();
        println!(
            "{}",
            json!({
                "steps": a.steps,
                "initial": trace[0].0,
                "final": final_s,
                "energy_initial": e0,
                "energy_final": e1,
                "trace": a.trace.then_some(&lines),
            })
        );
    } else if a.trace {
        for (t, (line, e)) in trace.iter().enumerate() {
            if a.audit_energy {
                println!("t={t} {line} E={e}");
            } else {
                println!("t={t} {line}");
            }
        }
    } else {
        println!("{final_s}");
        if a.audit_energy {
            println!("E={e1}");
        }
    }
    Ok(0)
}

fn period(a: PeriodArgs) -> Result<u8> {
    let bundle = read_bundle(&a.file)?;
    let x0 = require_config(&bundle)?;
    let sched = a.schedule.build(&bundle.network)?;
    let rep = find_period(&bundle.network, &sched, &x0, a.cap)?;
    if a.json {
        println!("{}", serde_json::to_string(&rep).expect("report serializes"));
    } else {
        println!("{rep}");
    }
    Ok(u8::from(rep.cap_hit))
}

fn ring(a: RingArgs) -> Result<u8> {
    let ring = build_ring_oriented(a.p, a.swapped)?;
    print!(
        "{}",
        write_bundle(&Bundle {
            network: ring.net,
            config: Some(ring.canonical),
            pred: None,
            roles: Vec::new(),
        })
    );
    println!("# ports: {}", port_list(&ring.ports));
    println!("# expected-period: {}", ring.p);
    Ok(0)
}

fn composite(a: CompositeArgs) -> Result<u8> {
    let comp = build_composite(&a.primes)?;
    print!(
        "{}",
        write_bundle(&Bundle {
            network: comp.net,
            config: Some(comp.canonical),
            pred: None,
            roles: Vec::new(),
        })
    );
    println!(
        "# ring-offsets: {}",
        comp.ring_offsets.iter().map(|o| (o + 1).to_string()).collect::<Vec<_>>().join(" ")
    );
    println!("# ports: {}", port_list(&comp.ports));
    if !comp.balancers.is_empty() {
        println!("# balancers: {}", port_list(&comp.balancers));
    }
    println!("# expected-period: {}", comp.expected_period);
    Ok(0)
}

fn torus(a: TorusArgs) -> Result<u8> {
    let torus = build_torus(a.width, a.height)?;
    print!(
        "{}",
        write_bundle(&Bundle {
            network: torus.net,
            config: None,
            pred: None,
            roles: Vec::new(),
        })
    );
    Ok(0)
}

/// Split a circuit file into its circuit lines and its `assign` lines.
fn parse_circuit_file(text: &str) -> Result<(Circuit, Assignment)> {
    let mut circuit_lines = String::new();
    let mut assign_lines = String::new();
    for raw in text.lines() {
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.split_whitespace().next() == Some("assign") {
            assign_lines.push_str(raw);
            assign_lines.push('\n');
        } else {
            circuit_lines.push_str(raw);
            circuit_lines.push('\n');
        }
    }
    Ok((parse_circuit(&circuit_lines)?, parse_assignment(&assign_lines)?))
}

fn compile(a: CompileArgs) -> Result<u8> {
    let (circuit, mut asg) = parse_circuit_file(&read_input(&a.file)?)?;
    if let Some(flag) = &a.assign {
        let text = format!("assign {}", flag.replace(',', " "));
        for (id, v) in parse_assignment(&text)?.values {
            asg.set(id, v);
        }
    }
    for id in circuit.input_ids() {
        if asg.get(id).is_none() {
            asg.set(id, false);
        }
    }
    let out_gate = match (a.output, circuit.outputs()) {
        (Some(g), outs) if outs.contains(&g) => g,
        (Some(g), _) => {
            return Err(Q2rError::circuit(format!("gate {g} is not a circuit output")))
        }
        (None, [only]) => *only,
        (None, outs) => {
            return Err(Q2rError::circuit(format!(
                "circuit has {} outputs ({}); pick one with --output",
                outs.len(),
                outs.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(", ")
            )))
        }
    };
    let compiler = Compiler::new()?;
    let cc = compiler.compile(&circuit, &asg)?;
    let inst = to_pred_instance(&cc, out_gate)?;
    let text = pred_to_text(&inst);
    if a.json {
        println!(
            "{}",
            json!({
                "nodes": cc.net.len(),
                "horizon": cc.horizon,
                "size_ratio": cc.size_ratio,
                "output_gate": out_gate,
                "pred": { "t": inst.t, "node": inst.node + 1 },
                "bundle": text,
            })
        );
    } else {
        print!("{text}");
        println!("# gates: {}, nodes: {}, size-ratio: {:.1}", circuit.gates().len(), cc.net.len(), cc.size_ratio);
        println!("# output gate {} reads node {} at step {}", out_gate, inst.node + 1, inst.t);
    }
    Ok(0)
}

fn pred(a: CommonInput) -> Result<u8> {
    let inst = pred_from_text(&read_input(&a.file)?)?;
    let answer = answer_pred(&inst)?;
    if a.json {
        println!(
            "{}",
            json!({ "answer": answer, "t": inst.t, "node": inst.node + 1 })
        );
    } else {
        println!("{}", if answer { "yes" } else { "no" });
    }
    Ok(u8::from(!answer))
}

fn ps_build(a: CommonInput) -> Result<u8> {
    let bundle = read_bundle(&a.file)?;
    let ps = build_ps(&bundle.network)?;
    let config = bundle.config.map(|x| ps_initial(&ps, &x)).transpose()?;
    let out = Bundle { network: ps.net.clone(), config, pred: None, roles: ps.roles() };
    if a.json {
        println!(
            "{}",
            json!({
                "original_nodes": ps.n,
                "alpha": ps.alpha,
                "nodes": ps.len(),
                "bundle": write_bundle(&out),
            })
        );
    } else {
        print!("{}", write_bundle(&out));
        println!("# original: n={} alpha={}", ps.n, ps.alpha);
    }
    Ok(0)
}

fn ps_verify(a: PsVerifyArgs) -> Result<u8> {
    let bundle = read_bundle(&a.file)?;
    let x0 = require_config(&bundle)?;
    let rep = verify_ps(&bundle.network, &x0, a.steps)?;
    if a.json {
        println!("{}", serde_json::to_string(&rep).expect("report serializes"));
    } else {
        println!("{rep}");
    }
    Ok(u8::from(!rep.ok))
}

fn certify(a: CertifyArgs) -> Result<u8> {
    if a.tamper {
        return certify_tampered(a.json);
    }
    let (_, reports) = GadgetSet::certified()?;
    if a.json {
        println!("{}", serde_json::to_string(&reports).expect("reports serialize"));
    } else {
        for r in &reports {
            let quiet = match r.quiescent {
                Some(true) => "quiescent",
                Some(false) => "not quiescent",
                None => "always active",
            };
            println!("{}: {} nodes, latency {}, {}", r.kind, r.nodes, r.latency, quiet);
        }
    }
    Ok(0)
}

/// Negative control: certification must reject deliberately broken specs.
fn certify_tampered(as_json: bool) -> Result<u8> {
    let set = GadgetSet::build();
    let mut rejected = 0usize;
    let mut tampered = Vec::new();
    for spec in set.all() {
        let mut wrong_latency = spec.clone();
        wrong_latency.latency += 1;
        tampered.push((format!("{} with latency {}", spec.kind, wrong_latency.latency), wrong_latency));
    }
    let mut silent_and = set.and_gate.clone();
    for (_, outcomes) in &mut silent_and.truth {
        for o in outcomes.iter_mut() {
            *o = Outcome::StaysPassive;
        }
    }
    tampered.push(("AND declared fully passive".into(), silent_and));
    let total = tampered.len();
    let mut lines = Vec::new();
    for (label, spec) in tampered {
        match certify_gadget(&spec) {
            Err(f) => {
                rejected += 1;
                lines.push(format!("rejected {label}: {f}"));
            }
            Ok(_) => lines.push(format!("ACCEPTED {label}: tampering went unnoticed")),
        }
    }
    if as_json {
        println!(
            "{}",
            json!({ "tampered": total, "rejected": rejected, "log": lines })
        );
    } else {
        for line in &lines {
            println!("{line}");
        }
        println!("rejected {rejected}/{total} tampered specs");
    }
    if rejected == total {
        Ok(0)
    } else {
        Err(Q2rError::certification("a tampered gadget passed certification"))
    }
}

fn verify_all(a: VerifyAllArgs) -> Result<u8> {
    let outcomes = match a.criterion {
        Some(i) if (1..=CRITERIA.len()).contains(&i) => {
            vec![run_criterion(i, a.seed, a.jobs)]
        }
        Some(i) => {
            return Err(Q2rError::unsupported(format!(
                "criterion {i} does not exist; pick 1 through {}",
                CRITERIA.len()
            )))
        }
        None => run_all(a.seed, a.jobs),
    };
    let all_passed = outcomes.iter().all(|o| o.passed);
    if a.json {
        println!("{}", serde_json::to_string(&outcomes).expect("outcomes serialize"));
    } else {
        for out in &outcomes {
            println!("{out}");
        }
        println!("{}", if all_passed { "all criteria passed" } else { "FAILURES above" });
    }
    Ok(u8::from(!all_passed))
}
