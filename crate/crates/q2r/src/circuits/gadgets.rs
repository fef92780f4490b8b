//! Gadgets: small network fragments that carry Boolean signals.
//!
//! Conventions shared by every fragment:
//! - All signal-bearing "junctions" (sources, gate cores, output collectors)
//!   live in class A; the degree-2 "side" nodes joining them live in class B.
//! - A signal is a junction turning +1. A junction firing at step T arms its
//!   outgoing side pairs at step T's second half; a neighbor junction whose
//!   other neighbors are still quiet then fires at step T+1. Pre-arming a
//!   junction in the initial configuration makes it fire at step 1.
//! - A side pair between junctions u and v contributes u's value twice to
//!   v's neighbor sum, so pairs count in units of +-2 and a junction with
//!   2k incident pairs fires exactly when half its pairs are armed.
//! - Constant +1 sites are kept frozen structurally: their neighbor sums are
//!   bounded away from 0 whatever the signal nodes do. Certification checks
//!   this by watching them for the whole horizon.

use crate::config::{Configuration, Spin};
use crate::error::{Q2rError, Result};
use crate::net::{BlockClass, Network};
use crate::schedule::UpdateSchedule;
use crate::sim::half_step_into;

/// Incremental builder for gadget fragments and compiled circuits. Keeps the
/// two-class labeling honest: every edge must cross classes.
#[derive(Debug, Default)]
pub struct NetAssembler {
    edges: Vec<(usize, usize)>,
    classes: Vec<BlockClass>,
    plus_sites: Vec<usize>,
}

impl NetAssembler {
    pub fn new() -> NetAssembler {
        NetAssembler::default()
    }

    pub fn node(&mut self, class: BlockClass) -> usize {
        self.classes.push(class);
        self.classes.len() - 1
    }

    /// A node that starts at +1 and is expected to stay there.
    pub fn plus_node(&mut self, class: BlockClass) -> usize {
        let id = self.node(class);
        self.plus_sites.push(id);
        id
    }

    pub fn class_of(&self, node: usize) -> BlockClass {
        self.classes[node]
    }

    pub fn plus_sites(&self) -> &[usize] {
        &self.plus_sites
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn edge(&mut self, a: usize, b: usize) {
        assert_ne!(
            self.classes[a], self.classes[b],
            "edge ({a},{b}) joins two class-{:?} nodes",
            self.classes[a]
        );
        self.edges.push((a, b));
    }

    /// Two fresh side nodes, each adjacent to both junctions: the diamond
    /// primitive. Returns the pair.
    pub fn side_pair(&mut self, j1: usize, j2: usize) -> (usize, usize) {
        assert_eq!(self.classes[j1], self.classes[j2], "a side pair joins same-class junctions");
        let side_class = self.classes[j1].other();
        let s1 = self.node(side_class);
        let s2 = self.node(side_class);
        self.edge(j1, s1);
        self.edge(j1, s2);
        self.edge(j2, s1);
        self.edge(j2, s2);
        (s1, s2)
    }

    /// A chain of `cells` diamonds starting at `from`; returns the far
    /// junction. Each cell moves a signal by one full step.
    pub fn wire(&mut self, from: usize, cells: usize) -> usize {
        let class = self.classes[from];
        let mut cur = from;
        for _ in 0..cells {
            let next = self.node(class);
            self.side_pair(cur, next);
            cur = next;
        }
        cur
    }

    /// One-cell dead-end wire: terminates a spare port slot with even parity.
    /// The far junction can never fire (its only pair cannot balance), so a
    /// stub also gives an output port the quiet -2 it needs to fire on cue.
    pub fn stub(&mut self, port: usize) -> usize {
        self.wire(port, 1)
    }

    /// Freeze a family of +1 "f" nodes with a shared triple of +1 "g" nodes:
    /// every f reads its host (at most +-1) plus three g (+3), every g reads
    /// an even number of f pairs, all sums stay far from 0.
    pub fn frozen_feed(&mut self, hosts: &[usize]) -> Vec<usize> {
        assert!(!hosts.is_empty() && hosts.len().is_multiple_of(2), "f nodes must come in pairs");
        let host_class = self.classes[hosts[0]];
        let f_class = host_class.other();
        let f_nodes: Vec<usize> = hosts
            .iter()
            .map(|&h| {
                let f = self.plus_node(f_class);
                self.edge(h, f);
                f
            })
            .collect();
        for _ in 0..3 {
            let g = self.plus_node(host_class);
            for &f in &f_nodes {
                self.edge(g, f);
            }
        }
        f_nodes
    }

    pub fn finish(self) -> (Network, Configuration) {
        let n = self.classes.len();
        let net = Network::from_edges(n, &self.edges, Some(self.classes));
        let mut init = Configuration::all_minus(n);
        for site in self.plus_sites {
            init.set(site, Spin::Plus);
        }
        (net, init)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub enum GadgetKind {
    Wire,
    And,
    Xor,
    Not,
    Or,
    Crossover,
}

impl std::fmt::Display for GadgetKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            GadgetKind::Wire => "WIRE",
            GadgetKind::And => "AND",
            GadgetKind::Xor => "XOR",
            GadgetKind::Not => "NOT",
            GadgetKind::Or => "OR",
            GadgetKind::Crossover => "CROSSOVER",
        };
        write!(f, "{name}")
    }
}

/// What one output must do for one input tuple.
///
/// Two passive grades exist because the dynamics are reversible: a fired
/// junction whose wave is not consumed melts back and re-excites its
/// surroundings. Where every unconsumed oscillation stays phase-locked
/// (all the single-stage gates) a passive output provably never fires and
/// gets the strong contract. Multi-stage fragments (the crossover) slosh
/// internally after the signal front passes, so their passive outputs are
/// certified quiet through the latency step, the instant the identity is
/// read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// -1 strictly before `latency`, +1 at exactly `latency`.
    FiresAtLatency,
    /// -1 through the whole certification horizon.
    StaysPassive,
    /// -1 at every step up to and including `latency`; free afterwards.
    PassiveThroughLatency,
}

/// Port handles of an instantiated fragment.
#[derive(Debug, Clone)]
pub struct FragmentPorts {
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
}

/// A gadget: fragment network, ports, initial state, and its contract.
#[derive(Debug, Clone)]
pub struct GadgetSpec {
    pub kind: GadgetKind,
    pub net: Network,
    pub inputs: Vec<usize>,
    pub outputs: Vec<usize>,
    /// All -1 except the constant +1 sites.
    pub initial: Configuration,
    /// Nodes that must hold their initial value at every step.
    pub pinned: Vec<usize>,
    /// Step at which a firing output first shows +1, inputs pre-armed.
    pub latency: u64,
    /// Per input tuple (little-endian over `inputs`), one outcome per output.
    pub truth: Vec<(Vec<bool>, Vec<Outcome>)>,
}

/// Straight wire of `cells` diamonds: head junction in, tail junction out.
pub fn wire_fragment(asm: &mut NetAssembler, cells: usize) -> FragmentPorts {
    assert!(cells >= 1);
    let head = asm.node(BlockClass::A);
    let tail = asm.wire(head, cells);
    FragmentPorts { inputs: vec![head], outputs: vec![tail] }
}

/// AND with twin cores: each input junction sends one single side to each
/// core, so a core fires exactly when its balanced 4-neighborhood
/// x + y - 2 = 0 holds, i.e. on (+1,+1); each core owns its own output
/// diamond, which keeps the two consumer corridors independent.
pub fn and_fragment(asm: &mut NetAssembler) -> FragmentPorts {
    let u_x = asm.node(BlockClass::A);
    let u_y = asm.node(BlockClass::A);
    let m1 = asm.node(BlockClass::A);
    let m2 = asm.node(BlockClass::A);
    let w1 = asm.node(BlockClass::A);
    let w2 = asm.node(BlockClass::A);
    for (input, core) in [(u_x, m1), (u_x, m2), (u_y, m1), (u_y, m2)] {
        let arm = asm.node(BlockClass::B);
        asm.edge(input, arm);
        asm.edge(core, arm);
    }
    asm.side_pair(m1, w1);
    asm.side_pair(m2, w2);
    FragmentPorts { inputs: vec![u_x, u_y], outputs: vec![w1, w2] }
}

/// XOR around one degree-8 core: two input diamonds, one frozen +1 pair, one
/// output diamond. Armed pairs sum to 2x + 2y + 2 - 2 = 2(x + y): zero (a
/// flip) exactly when the inputs disagree.
pub fn xor_fragment(asm: &mut NetAssembler) -> FragmentPorts {
    let u_x = asm.node(BlockClass::A);
    let u_y = asm.node(BlockClass::A);
    let core = asm.node(BlockClass::A);
    let w = asm.node(BlockClass::A);
    asm.side_pair(u_x, core);
    asm.side_pair(u_y, core);
    asm.side_pair(core, w);
    asm.frozen_feed(&[core, core]);
    FragmentPorts { inputs: vec![u_x, u_y], outputs: vec![w] }
}

/// NOT: an XOR whose second input is a pre-armed constant junction. The
/// constant's side pair always agrees, so the constant itself never flips.
pub fn not_fragment(asm: &mut NetAssembler) -> FragmentPorts {
    let ports = xor_fragment(asm);
    let (u_x, constant) = (ports.inputs[0], ports.inputs[1]);
    asm.plus_sites.push(constant);
    FragmentPorts { inputs: vec![u_x], outputs: ports.outputs }
}

/// OR as "exactly one of AND, XOR fires": twin AND cores driven by single
/// sides, twin XOR cores driven by diamonds, and two degree-8 combine
/// junctions that each read one AND corridor, one XOR corridor, a frozen +1
/// pair, and their consumer pair. On (+1,+1) only the AND corridor arms; on
/// a disagreement only the XOR corridor arms; either way the combine sum is
/// 2 - 2 + 2 - 2 = 0 and the output fires with the same latency as AND/XOR.
///
/// Each input port drives two single arms and two diamonds (quiet sum -6),
/// so it carries four frozen +1 feeds to present the same quiet -2 as an
/// AND port: an armed upstream wire then ties it exactly. The ballast also
/// pins the quiet port when its partner fires alone (+4 from the armed XOR
/// diamonds is cancelled against the wire and arm load, never reaching 0).
pub fn or_fragment(asm: &mut NetAssembler) -> FragmentPorts {
    let u_x = asm.node(BlockClass::A);
    let u_y = asm.node(BlockClass::A);
    let m1 = asm.node(BlockClass::A);
    let m2 = asm.node(BlockClass::A);
    let mx1 = asm.node(BlockClass::A);
    let mx2 = asm.node(BlockClass::A);
    let w1 = asm.node(BlockClass::A);
    let w2 = asm.node(BlockClass::A);
    // AND corridors: single sides into each core, one output diamond each
    for (input, core) in [(u_x, m1), (u_x, m2), (u_y, m1), (u_y, m2)] {
        let arm = asm.node(BlockClass::B);
        asm.edge(input, arm);
        asm.edge(core, arm);
    }
    asm.side_pair(m1, w1);
    asm.side_pair(m2, w2);
    // XOR corridors: input diamonds into each core, output diamond each
    for core in [mx1, mx2] {
        asm.side_pair(u_x, core);
        asm.side_pair(u_y, core);
    }
    asm.side_pair(mx1, w1);
    asm.side_pair(mx2, w2);
    // frozen +1 feeds: two per XOR core and combine junction, four per port
    asm.frozen_feed(&[
        u_x, u_x, u_x, u_x, u_y, u_y, u_y, u_y, mx1, mx1, mx2, mx2, w1, w1, w2, w2,
    ]);
    FragmentPorts { inputs: vec![u_x, u_y], outputs: vec![w1, w2] }
}

/// Signal crossover from three XORs: s = x XOR y, then s XOR x = y and
/// s XOR y = x. The middle result fans out through a degree-8 junction
/// (output diamond + frozen pair + two consumer wires); the raw inputs
/// reach the outer XORs through 3-cell delay wires so both operands of each
/// outer core arrive together.
pub fn crossover_fragment(asm: &mut NetAssembler) -> FragmentPorts {
    let u_x = asm.node(BlockClass::A);
    let u_y = asm.node(BlockClass::A);

    // middle XOR: s = x XOR y, collected at a fanout-2 junction w_s
    let core_s = asm.node(BlockClass::A);
    let w_s = asm.node(BlockClass::A);
    asm.side_pair(u_x, core_s);
    asm.side_pair(u_y, core_s);
    asm.side_pair(core_s, w_s);

    // outer XOR a: inputs s (1 cell from w_s) and x (3-cell delay)
    let core_a = asm.node(BlockClass::A);
    let w_a = asm.node(BlockClass::A);
    let s_in_a = asm.wire(w_s, 1);
    asm.side_pair(s_in_a, core_a);
    let x_in_a = asm.wire(u_x, 3);
    asm.side_pair(x_in_a, core_a);
    asm.side_pair(core_a, w_a);

    // outer XOR b: inputs s and y
    let core_b = asm.node(BlockClass::A);
    let w_b = asm.node(BlockClass::A);
    let s_in_b = asm.wire(w_s, 1);
    asm.side_pair(s_in_b, core_b);
    let y_in_b = asm.wire(u_y, 3);
    asm.side_pair(y_in_b, core_b);
    asm.side_pair(core_b, w_b);

    asm.frozen_feed(&[core_s, core_s, core_a, core_a, core_b, core_b, w_s, w_s]);
    // outputs swapped: the a-side computes y, the b-side computes x
    FragmentPorts { inputs: vec![u_x, u_y], outputs: vec![w_a, w_b] }
}

fn finish_spec(
    kind: GadgetKind,
    asm: NetAssembler,
    ports: FragmentPorts,
    latency: u64,
    truth: Vec<(Vec<bool>, Vec<Outcome>)>,
) -> GadgetSpec {
    let pinned = asm.plus_sites().to_vec();
    let (net, initial) = asm.finish();
    GadgetSpec {
        kind,
        net,
        inputs: ports.inputs,
        outputs: ports.outputs,
        initial,
        pinned,
        latency,
        truth,
    }
}

use Outcome::{FiresAtLatency as Fire, StaysPassive as Stay};

pub fn wire_segment(cells: usize) -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = wire_fragment(&mut asm, cells);
    let truth = vec![(vec![false], vec![Stay]), (vec![true], vec![Fire])];
    finish_spec(GadgetKind::Wire, asm, ports, cells as u64 + 1, truth)
}

pub fn and_gadget() -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = and_fragment(&mut asm);
    let truth = vec![
        (vec![false, false], vec![Stay, Stay]),
        (vec![true, false], vec![Stay, Stay]),
        (vec![false, true], vec![Stay, Stay]),
        (vec![true, true], vec![Fire, Fire]),
    ];
    finish_spec(GadgetKind::And, asm, ports, 3, truth)
}

pub fn xor_gadget() -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = xor_fragment(&mut asm);
    let truth = vec![
        (vec![false, false], vec![Stay]),
        (vec![true, false], vec![Fire]),
        (vec![false, true], vec![Fire]),
        (vec![true, true], vec![Stay]),
    ];
    finish_spec(GadgetKind::Xor, asm, ports, 3, truth)
}

pub fn not_gadget() -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = not_fragment(&mut asm);
    let truth = vec![(vec![false], vec![Fire]), (vec![true], vec![Stay])];
    finish_spec(GadgetKind::Not, asm, ports, 3, truth)
}

pub fn or_gadget() -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = or_fragment(&mut asm);
    let truth = vec![
        (vec![false, false], vec![Stay, Stay]),
        (vec![true, false], vec![Fire, Fire]),
        (vec![false, true], vec![Fire, Fire]),
        (vec![true, true], vec![Fire, Fire]),
    ];
    finish_spec(GadgetKind::Or, asm, ports, 3, truth)
}

pub fn crossover_gadget() -> GadgetSpec {
    let mut asm = NetAssembler::new();
    let ports = crossover_fragment(&mut asm);
    // A passive output sits downstream of a passive core whose armed input
    // diamonds drift out of phase as internal reflections bounce, so it can
    // stir well after the latency step: certify it quiet through the latency
    // only. The all-false tuple keeps the strong contract (nothing moves).
    let out = |a: bool, b: bool| {
        let grade = |fires: bool, any: bool| {
            if fires {
                Fire
            } else if any {
                Outcome::PassiveThroughLatency
            } else {
                Stay
            }
        };
        vec![grade(a, a || b), grade(b, a || b)]
    };
    // output a carries y, output b carries x
    let truth = vec![
        (vec![false, false], out(false, false)),
        (vec![true, false], out(false, true)),
        (vec![false, true], out(true, false)),
        (vec![true, true], out(true, true)),
    ];
    finish_spec(GadgetKind::Crossover, asm, ports, 6, truth)
}

/// Where and when certification diverged from the contract.
#[derive(Debug, Clone)]
pub struct CertFailure {
    pub kind: GadgetKind,
    pub tuple: Vec<bool>,
    pub step: u64,
    pub node: usize,
    pub detail: String,
}

impl std::fmt::Display for CertFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let bits: String =
            self.tuple.iter().map(|&b| if b { '1' } else { '0' }).collect();
        write!(
            f,
            "{} on inputs {}: step {}, node {}: {}",
            self.kind,
            bits,
            self.step,
            self.node + 1,
            self.detail
        )
    }
}

/// Certification result for one gadget: the observed first-activation step
/// per (tuple, output), and whether the all-false tuple left the whole
/// configuration untouched.
#[derive(Debug, Clone, serde::Serialize)]
pub struct CertReport {
    pub kind: GadgetKind,
    pub latency: u64,
    pub activations: Vec<(Vec<bool>, Vec<Option<u64>>)>,
    pub quiescent: Option<bool>,
    pub nodes: usize,
}

/// Exhaustively drive every input tuple through the gadget and check the
/// contract: firing outputs show +1 first at exactly `latency`, passive
/// outputs stay -1 through the horizon, pinned sites never move, and when
/// the all-false tuple is all-passive the initial configuration must be an
/// exact fixed point.
pub fn certify_gadget(spec: &GadgetSpec) -> std::result::Result<CertReport, CertFailure> {
    let fail = |tuple: &[bool], step: u64, node: usize, detail: String| CertFailure {
        kind: spec.kind,
        tuple: tuple.to_vec(),
        step,
        node,
        detail,
    };

    // close the fragment: stub every output port
    let mut asm = NetAssembler::new();
    for i in 0..spec.net.len() {
        asm.classes.push(spec.net.class_of(i).expect("gadget fragments carry classes"));
    }
    for (a, b) in spec.net.edges() {
        asm.edges.push((a, b));
    }
    for &out in &spec.outputs {
        asm.stub(out);
    }
    let n_frag = spec.net.len();
    let (net, _) = asm.finish();
    if let Err(e) = net.ensure_valid() {
        return Err(fail(&[], 0, 0, format!("stubbed fragment is invalid: {e}")));
    }
    let sched = UpdateSchedule::two_block(&net).expect("assembled nets carry classes");

    let horizon = spec.latency + 14;
    let mut report = CertReport {
        kind: spec.kind,
        latency: spec.latency,
        activations: Vec::new(),
        quiescent: None,
        nodes: spec.net.len(),
    };

    for (tuple, outcomes) in &spec.truth {
        assert_eq!(tuple.len(), spec.inputs.len(), "tuple arity");
        assert_eq!(outcomes.len(), spec.outputs.len(), "outcome arity");
        let mut x = Configuration::all_minus(net.len());
        for i in 0..n_frag {
            x.set(i, spec.initial.get(i));
        }
        for (&port, &bit) in spec.inputs.iter().zip(tuple) {
            x.set(port, Spin::from_bool(bit));
        }

        let x0 = x.clone();
        let mut first_plus: Vec<Option<u64>> = vec![None; spec.outputs.len()];
        let mut buf = x.clone();
        let mut moved = false;
        for step in 1..=horizon {
            for block in sched.blocks() {
                half_step_into(&net, &x, block, &mut buf);
                std::mem::swap(&mut x, &mut buf);
            }
            moved |= x != x0;
            for &pin in &spec.pinned {
                if x.get(pin) != Spin::Plus {
                    return Err(fail(tuple, step, pin, "constant +1 site moved".into()));
                }
            }
            for (k, &out) in spec.outputs.iter().enumerate() {
                if x.get(out) == Spin::Plus && first_plus[k].is_none() {
                    first_plus[k] = Some(step);
                }
            }
            // early contract checks keep failure reports tight
            for (k, (&out, outcome)) in spec.outputs.iter().zip(outcomes).enumerate() {
                match outcome {
                    Outcome::FiresAtLatency => {
                        if step < spec.latency && first_plus[k].is_some() {
                            return Err(fail(
                                tuple,
                                step,
                                out,
                                format!("fired early (latency is {})", spec.latency),
                            ));
                        }
                        if step == spec.latency && first_plus[k] != Some(spec.latency) {
                            return Err(fail(
                                tuple,
                                step,
                                out,
                                format!("failed to fire at latency {}", spec.latency),
                            ));
                        }
                    }
                    Outcome::StaysPassive => {
                        if let Some(t) = first_plus[k] {
                            return Err(fail(
                                tuple,
                                step,
                                out,
                                format!("passive output fired at step {t}"),
                            ));
                        }
                    }
                    Outcome::PassiveThroughLatency => {
                        if let Some(t) = first_plus[k].filter(|&t| t <= spec.latency) {
                            return Err(fail(
                                tuple,
                                step,
                                out,
                                format!(
                                    "output fired at step {t}, within its latency window {}",
                                    spec.latency
                                ),
                            ));
                        }
                    }
                }
            }
        }
        if tuple.iter().all(|&b| !b) && outcomes.iter().all(|o| *o == Outcome::StaysPassive) {
            report.quiescent = Some(!moved);
            if moved {
                return Err(fail(tuple, 0, 0, "all-false input is not quiescent".into()));
            }
        }
        report.activations.push((tuple.clone(), first_plus));
    }
    Ok(report)
}

/// The certified gadget family the compiler builds from. Constructing it via
/// [`GadgetSet::certified`] is the compiler's build gate.
#[derive(Debug, Clone)]
pub struct GadgetSet {
    pub wire: GadgetSpec,
    pub and_gate: GadgetSpec,
    pub xor_gate: GadgetSpec,
    pub not_gate: GadgetSpec,
    pub or_gate: GadgetSpec,
    pub crossover: GadgetSpec,
}

impl GadgetSet {
    /// All gadgets, uncertified. Useful for inspection and negative tests.
    pub fn build() -> GadgetSet {
        GadgetSet {
            wire: wire_segment(2),
            and_gate: and_gadget(),
            xor_gate: xor_gadget(),
            not_gate: not_gadget(),
            or_gate: or_gadget(),
            crossover: crossover_gadget(),
        }
    }

    /// Certify every gadget; fail loudly if any contract breaks.
    pub fn certified() -> Result<(GadgetSet, Vec<CertReport>)> {
        let set = GadgetSet::build();
        let mut reports = Vec::new();
        for spec in set.all() {
            reports.push(certify_gadget(spec).map_err(|f| Q2rError::certification(f.to_string()))?);
        }
        Ok((set, reports))
    }

    pub fn all(&self) -> [&GadgetSpec; 6] {
        [
            &self.wire,
            &self.and_gate,
            &self.xor_gate,
            &self.not_gate,
            &self.or_gate,
            &self.crossover,
        ]
    }
}
