//! Circuit-to-network compilation.
//!
//! Layout: one pre-armed input junction per circuit input, one gadget per
//! gate, and a one-cell wire from each producer output port to each consumer
//! input port. AND and OR gadgets share the same port arrival/output-arrival
//! latency, so timing is uniform per layer with no equalization padding:
//! input junctions fire at step 1, layer-l ports at T_l = 3l - 1, layer-l
//! outputs (the readout nodes) at 3l + 1. Unused output slots are closed
//! with stub wires; stub reflections and failed-gate back-chasers travel at
//! most one node per half-step, which keeps them provably behind every
//! readout (asserted below).

use std::collections::BTreeMap;

use rand::Rng;

use crate::config::{Configuration, Spin};
use crate::error::{Q2rError, Result};
use crate::net::Network;
use crate::schedule::UpdateSchedule;
use crate::sim::step;
use crate::textio::{parse_bundle, write_bundle, Bundle, PredQuery};

use super::gadgets::{and_fragment, or_fragment, FragmentPorts, GadgetSet, NetAssembler};
use super::{validate_as2m, Assignment, Circuit, GateKind};

/// Hard ceiling on nodes per (gate + wire cell); the measured ratio is far
/// below, but the assert pins linearity structurally.
pub const SIZE_RATIO_BOUND: f64 = 64.0;

/// A compiled circuit: the network, its assignment-applied initial
/// configuration, and where/when each gate's value can be read.
#[derive(Debug, Clone)]
pub struct CompiledCircuit {
    pub net: Network,
    pub initial: Configuration,
    /// circuit input id -> its junction node
    pub input_ports: BTreeMap<usize, usize>,
    /// gate id -> (readout node, readout step); inputs read at step 1
    pub readout: BTreeMap<usize, (usize, u64)>,
    /// circuit output gate ids
    pub outputs: Vec<usize>,
    /// readout step of the top layer
    pub horizon: u64,
    /// nodes per (gate + wire cell), the measured linearity constant
    pub size_ratio: f64,
}

impl CompiledCircuit {
    /// Initial configuration for a different assignment over the same
    /// compiled network.
    pub fn initial_for(&self, asg: &Assignment) -> Result<Configuration> {
        let mut x = self.initial.clone();
        for (&id, &node) in &self.input_ports {
            let v = asg
                .get(id)
                .ok_or_else(|| Q2rError::circuit(format!("no value assigned to input {id}")))?;
            x.set(node, Spin::from_bool(v));
        }
        Ok(x)
    }

    /// Simulate and return each gate's readout truth value.
    pub fn run_readouts(&self, x0: &Configuration) -> Result<BTreeMap<usize, bool>> {
        let sched = UpdateSchedule::two_block(&self.net)?;
        let mut values = BTreeMap::new();
        let mut x = x0.clone();
        for t in 1..=self.horizon {
            x = step(&self.net, &sched, &x);
            for (&gate, &(node, time)) in &self.readout {
                if time == t {
                    values.insert(gate, x.get(node) == Spin::Plus);
                }
            }
        }
        Ok(values)
    }
}

/// The compiler. Construction certifies the gadget family first; an
/// uncertified set never compiles anything.
pub struct Compiler {
    gadgets: GadgetSet,
}

impl Compiler {
    pub fn new() -> Result<Compiler> {
        let (gadgets, _) = GadgetSet::certified()?;
        Ok(Compiler { gadgets })
    }

    pub fn gadgets(&self) -> &GadgetSet {
        &self.gadgets
    }

    pub fn compile(&self, c: &Circuit, asg: &Assignment) -> Result<CompiledCircuit> {
        let report = validate_as2m(c);
        if !report.is_valid() {
            return Err(Q2rError::circuit(format!("not compilable: {report}")));
        }
        let depth = c.depth() as u64;

        let mut asm = NetAssembler::new();
        let mut input_ports: BTreeMap<usize, usize> = BTreeMap::new();
        let mut readout: BTreeMap<usize, (usize, u64)> = BTreeMap::new();
        // per producer: its output ports, handed to consumers in order
        let mut out_slots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut gate_ports: BTreeMap<usize, FragmentPorts> = BTreeMap::new();
        let mut wire_cells = 0usize;
        let mut gate_count = 0usize;

        for &id in c.topo_order() {
            let gate = c.gate(id).unwrap();
            match gate.kind {
                GateKind::Input => {
                    let junction = asm.node(crate::net::BlockClass::A);
                    input_ports.insert(id, junction);
                    readout.insert(id, (junction, 1));
                    // an input junction is its own pair of output slots
                    out_slots.insert(id, vec![junction, junction]);
                }
                kind => {
                    gate_count += 1;
                    let ports = match kind {
                        GateKind::And => and_fragment(&mut asm),
                        GateKind::Or => or_fragment(&mut asm),
                        GateKind::Input => unreachable!(),
                    };
                    let layer = c.layer(id) as u64;
                    readout.insert(id, (ports.outputs[0], 3 * layer + 1));
                    out_slots.insert(id, ports.outputs.clone());
                    gate_ports.insert(id, ports);
                }
            }
        }

        // wire each consumer port to the next free slot of its producer
        let mut next_slot: BTreeMap<usize, usize> = BTreeMap::new();
        for &id in c.topo_order() {
            let gate = c.gate(id).unwrap();
            if gate.kind == GateKind::Input {
                continue;
            }
            let ports = gate_ports[&id].inputs.clone();
            for (&src, &port) in gate.inputs.iter().zip(&ports) {
                let slot = next_slot.entry(src).or_insert(0);
                let producer = out_slots[&src][*slot];
                *slot += 1;
                asm.side_pair(producer, port);
                wire_cells += 1;
            }
        }

        // close spare slots: every unused gate output port gets a stub (it
        // both fixes parity and lets the port fire); an entirely unused
        // input junction gets one stub so it is not isolated. A stub on a
        // degree-4 output port leaks its reflection back through the port,
        // so those are tracked as disturbance origins; a stub on a degree-2
        // input junction oscillates between two nodes that can never tie
        // and stays confined.
        let mut stub_origins: Vec<(usize, u64)> = Vec::new();
        for &id in c.topo_order() {
            let used = next_slot.get(&id).copied().unwrap_or(0);
            let slots = &out_slots[&id];
            if c.gate(id).unwrap().kind == GateKind::Input {
                if used == 0 {
                    asm.stub(slots[0]);
                    wire_cells += 1;
                }
            } else {
                let fire_time = 3 * c.layer(id) as u64 + 1;
                for &port in slots.iter().skip(used) {
                    asm.stub(port);
                    wire_cells += 1;
                    stub_origins.push((port, fire_time + 1));
                }
            }
        }

        let (net, mut initial) = asm.finish();
        net.ensure_valid()?;
        for (&id, &node) in &input_ports {
            let v = asg
                .get(id)
                .ok_or_else(|| Q2rError::circuit(format!("no value assigned to input {id}")))?;
            initial.set(node, Spin::from_bool(v));
        }

        let size_ratio = net.len() as f64 / (gate_count + input_ports.len() + wire_cells) as f64;
        assert!(
            size_ratio <= SIZE_RATIO_BOUND,
            "compiled size blew past linearity: {size_ratio:.1} nodes per unit"
        );

        let cc = CompiledCircuit {
            net,
            initial,
            input_ports,
            readout,
            outputs: c.outputs().to_vec(),
            horizon: 3 * depth + 1,
            size_ratio,
        };
        assert_readouts_precede_reflections(c, &cc, &gate_ports, &stub_origins);
        Ok(cc)
    }
}

/// Disturbances other than the clean signal fronts originate at gadget
/// input ports (a port melts or back-fires from one step after its arrival,
/// whether or not its gate fires) and at stubbed output ports (the stub
/// reflection re-ties the port one step after it fires). Both spread at
/// most one node per half-step. Verify every readout observes its node
/// strictly before any disturbance could reach it:
/// origin_step + edge_distance/2 > readout_step.
fn assert_readouts_precede_reflections(
    c: &Circuit,
    cc: &CompiledCircuit,
    gate_ports: &BTreeMap<usize, FragmentPorts>,
    stub_origins: &[(usize, u64)],
) {
    // origins: (node, earliest step it can deviate from the front pattern)
    let mut origins: Vec<(usize, u64)> = stub_origins.to_vec();
    for &id in c.topo_order() {
        if c.gate(id).unwrap().kind == GateKind::Input {
            continue;
        }
        let arrival = 3 * c.layer(id) as u64 - 1;
        for &port in &gate_ports[&id].inputs {
            origins.push((port, arrival + 1));
        }
    }

    for (&gate, &(r_node, r_time)) in &cc.readout {
        if c.gate(gate).unwrap().kind == GateKind::Input {
            continue;
        }
        // BFS distances from the readout node
        let mut dist = vec![u32::MAX; cc.net.len()];
        let mut queue = std::collections::VecDeque::new();
        dist[r_node] = 0;
        queue.push_back(r_node);
        while let Some(v) = queue.pop_front() {
            for &w in cc.net.neighbors(v) {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for &(o_node, o_time) in &origins {
            if o_node == r_node {
                assert!(o_time > r_time, "readout of gate {gate} collides with a disturbance");
                continue;
            }
            let d = dist[o_node] as u64;
            assert!(
                2 * o_time + d > 2 * r_time,
                "gate {gate}: disturbance at node {o_node} (step {o_time}, distance {d} edges) \
                 could reach the readout at step {r_time}"
            );
        }
    }
}

/// One instance of the prediction problem: does `node` differ from its
/// initial value after `t` steps?
#[derive(Debug, Clone)]
pub struct PredInstance {
    pub net: Network,
    pub initial: Configuration,
    pub t: u64,
    pub node: usize,
}

/// PRED instance asking about one circuit output: the readout node starts at
/// -1, so "changed by time t" is exactly "the output is true".
pub fn to_pred_instance(cc: &CompiledCircuit, output_gate: usize) -> Result<PredInstance> {
    if !cc.outputs.contains(&output_gate) {
        return Err(Q2rError::circuit(format!("gate {output_gate} is not a circuit output")));
    }
    let (node, t) = cc.readout[&output_gate];
    Ok(PredInstance { net: cc.net.clone(), initial: cc.initial.clone(), t, node })
}

/// Simulate the instance under its natural schedule (two-block when the
/// network carries classes, otherwise parallel) and compare the node.
pub fn answer_pred(inst: &PredInstance) -> Result<bool> {
    inst.net.ensure_valid()?;
    if inst.node >= inst.net.len() {
        return Err(Q2rError::unsupported(format!(
            "objective node {} outside the network",
            inst.node + 1
        )));
    }
    let sched = UpdateSchedule::natural(&inst.net);
    let mut x = inst.initial.clone();
    for _ in 0..inst.t {
        x = step(&inst.net, &sched, &x);
    }
    Ok(x.get(inst.node) != inst.initial.get(inst.node))
}

pub fn pred_to_text(inst: &PredInstance) -> String {
    write_bundle(&Bundle {
        network: inst.net.clone(),
        config: Some(inst.initial.clone()),
        pred: Some(PredQuery { t: inst.t, node: inst.node }),
        roles: Vec::new(),
    })
}

pub fn pred_from_text(text: &str) -> Result<PredInstance> {
    let bundle = parse_bundle(text)?;
    let pred = bundle
        .pred
        .ok_or_else(|| Q2rError::parse(0, "missing 'pred t=<t> v=<id>' line"))?;
    let initial = bundle
        .config
        .ok_or_else(|| Q2rError::parse(0, "missing initial configuration line"))?;
    Ok(PredInstance { net: bundle.network, initial, t: pred.t, node: pred.node })
}

/// Convenience wrapper: certify, compile, done.
pub fn compile_circuit(c: &Circuit, asg: &Assignment) -> Result<CompiledCircuit> {
    Compiler::new()?.compile(c, asg)
}

/// Random strict circuit of the compiled class: rectangular layers of width
/// w and odd depth d, every producer feeding exactly two slots of the next
/// layer.
pub fn random_as2m_circuit<R: Rng>(rng: &mut R, max_gates: usize) -> Circuit {
    use super::Gate;
    let depth = [1usize, 3, 5][rng.gen_range(0..3)];
    let width_cap = (max_gates / (depth + 1)).max(1);
    let width = rng.gen_range(1..=width_cap);

    let mut gates = Vec::new();
    let mut next_id = 1usize;
    let mut layer_ids: Vec<usize> = Vec::new();
    for _ in 0..width {
        gates.push(Gate { id: next_id, kind: GateKind::Input, inputs: vec![] });
        layer_ids.push(next_id);
        next_id += 1;
    }
    for layer in 1..=depth {
        let kind = if layer % 2 == 1 { GateKind::Or } else { GateKind::And };
        let mut slots: Vec<usize> = layer_ids.iter().flat_map(|&id| [id, id]).collect();
        for i in (1..slots.len()).rev() {
            slots.swap(i, rng.gen_range(0..=i));
        }
        let mut new_layer = Vec::new();
        for pair in slots.chunks(2) {
            gates.push(Gate { id: next_id, kind, inputs: vec![pair[0], pair[1]] });
            new_layer.push(next_id);
            next_id += 1;
        }
        layer_ids = new_layer;
    }
    Circuit::new(gates, layer_ids).expect("generator builds structurally valid circuits")
}

pub fn random_assignment<R: Rng>(rng: &mut R, c: &Circuit) -> Assignment {
    let mut asg = Assignment::default();
    for id in c.input_ids() {
        asg.set(id, rng.gen());
    }
    asg
}
