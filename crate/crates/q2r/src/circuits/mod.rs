//! Boolean circuits of the kind the network compiler accepts: synchronous,
//! monotone, alternating AND/OR layers, fanin 2. Parsing builds any acyclic
//! netlist; [`validate_as2m`] reports how far it is from the strict class.

pub mod compile;
pub mod gadgets;

use std::collections::{BTreeMap, HashMap};

use crate::error::{Q2rError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateKind {
    Input,
    And,
    Or,
}

impl std::fmt::Display for GateKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GateKind::Input => write!(f, "input"),
            GateKind::And => write!(f, "and"),
            GateKind::Or => write!(f, "or"),
        }
    }
}

/// One gate. `id` is the external (file) id; `inputs` name other gates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: usize,
    pub kind: GateKind,
    pub inputs: Vec<usize>,
}

/// An acyclic netlist with computed layers: inputs at layer 0, every other
/// gate one past its deepest input.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    gates: Vec<Gate>,
    outputs: Vec<usize>,
    layers: HashMap<usize, usize>,
    topo: Vec<usize>,
}

impl Circuit {
    pub fn new(gates: Vec<Gate>, outputs: Vec<usize>) -> Result<Circuit> {
        let mut index: HashMap<usize, usize> = HashMap::new();
        for (pos, g) in gates.iter().enumerate() {
            if index.insert(g.id, pos).is_some() {
                return Err(Q2rError::circuit(format!("duplicate gate id {}", g.id)));
            }
            if g.kind == GateKind::Input && !g.inputs.is_empty() {
                return Err(Q2rError::circuit(format!("input {} cannot have inputs", g.id)));
            }
            if g.kind != GateKind::Input && g.inputs.len() != 2 {
                return Err(Q2rError::circuit(format!("gate {} needs exactly 2 inputs", g.id)));
            }
        }
        for g in &gates {
            for &src in &g.inputs {
                if !index.contains_key(&src) {
                    return Err(Q2rError::circuit(format!(
                        "gate {} references undefined gate {src}",
                        g.id
                    )));
                }
            }
        }
        for &out in &outputs {
            if !index.contains_key(&out) {
                return Err(Q2rError::circuit(format!("output references undefined gate {out}")));
            }
        }

        // Kahn topological order; leftovers mean a cycle
        let mut indegree: HashMap<usize, usize> =
            gates.iter().map(|g| (g.id, g.inputs.len())).collect();
        let mut consumers: HashMap<usize, Vec<usize>> = HashMap::new();
        for g in &gates {
            for &src in &g.inputs {
                consumers.entry(src).or_default().push(g.id);
            }
        }
        let mut ready: Vec<usize> =
            gates.iter().filter(|g| g.inputs.is_empty()).map(|g| g.id).collect();
        ready.sort_unstable();
        let mut topo = Vec::with_capacity(gates.len());
        let mut layers: HashMap<usize, usize> = HashMap::new();
        while let Some(id) = ready.pop() {
            let g = &gates[index[&id]];
            let layer = g.inputs.iter().map(|src| layers[src] + 1).max().unwrap_or(0);
            layers.insert(id, layer);
            topo.push(id);
            for &next in consumers.get(&id).map(Vec::as_slice).unwrap_or(&[]) {
                let d = indegree.get_mut(&next).unwrap();
                *d -= 1;
                if *d == 0 {
                    ready.push(next);
                }
            }
        }
        if topo.len() != gates.len() {
            return Err(Q2rError::circuit("circuit contains a cycle".to_string()));
        }
        Ok(Circuit { gates, outputs, layers, topo })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, id: usize) -> Option<&Gate> {
        self.gates.iter().find(|g| g.id == id)
    }

    pub fn outputs(&self) -> &[usize] {
        &self.outputs
    }

    pub fn layer(&self, id: usize) -> usize {
        self.layers[&id]
    }

    pub fn depth(&self) -> usize {
        self.layers.values().copied().max().unwrap_or(0)
    }

    /// Gate ids in dependency order (inputs first).
    pub fn topo_order(&self) -> &[usize] {
        &self.topo
    }

    pub fn input_ids(&self) -> Vec<usize> {
        self.gates.iter().filter(|g| g.kind == GateKind::Input).map(|g| g.id).collect()
    }

    /// How many gate input slots each gate feeds.
    pub fn fanout(&self, id: usize) -> usize {
        self.gates.iter().flat_map(|g| &g.inputs).filter(|&&src| src == id).count()
    }
}

/// Parse the netlist format:
///
/// ```text
/// input 1
/// input 2
/// gate 3 or 1 2
/// output 3
/// ```
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut outputs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let toks: Vec<&str> = body.split_whitespace().collect();
        let id_at = |k: usize, what: &str| -> Result<usize> {
            toks.get(k)
                .ok_or_else(|| Q2rError::parse(line, format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|_| Q2rError::parse(line, format!("bad {what} '{}'", toks[k])))
        };
        match toks[0] {
            "input" => {
                if toks.len() != 2 {
                    return Err(Q2rError::parse(line, "input takes one id"));
                }
                gates.push(Gate { id: id_at(1, "input id")?, kind: GateKind::Input, inputs: vec![] });
            }
            "gate" => {
                if toks.len() != 5 {
                    return Err(Q2rError::parse(line, "expected 'gate <id> and|or <a> <b>'"));
                }
                let kind = match toks[2] {
                    "and" => GateKind::And,
                    "or" => GateKind::Or,
                    other => {
                        return Err(Q2rError::parse(line, format!("unknown gate kind '{other}'")))
                    }
                };
                gates.push(Gate {
                    id: id_at(1, "gate id")?,
                    kind,
                    inputs: vec![id_at(3, "gate input")?, id_at(4, "gate input")?],
                });
            }
            "output" => {
                if toks.len() != 2 {
                    return Err(Q2rError::parse(line, "output takes one id"));
                }
                outputs.push(id_at(1, "output id")?);
            }
            other => return Err(Q2rError::parse(line, format!("unknown keyword '{other}'"))),
        }
    }
    Circuit::new(gates, outputs)
}

pub fn write_circuit(c: &Circuit) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    for g in c.gates() {
        match g.kind {
            GateKind::Input => {
                let _ = writeln!(out, "input {}", g.id);
            }
            kind => {
                let _ = writeln!(out, "gate {} {} {} {}", g.id, kind, g.inputs[0], g.inputs[1]);
            }
        }
    }
    for &o in c.outputs() {
        let _ = writeln!(out, "output {o}");
    }
    out
}

/// Strict class membership report. `violations` are hard failures;
/// `fanout_deficits` lists non-output gates feeding fewer than two slots,
/// which the compiler tolerates by terminating the spare slot.
#[derive(Debug, Clone, Default)]
pub struct As2mReport {
    pub violations: Vec<String>,
    pub fanout_deficits: Vec<(usize, usize)>,
}

impl As2mReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn is_strict(&self) -> bool {
        self.is_valid() && self.fanout_deficits.is_empty()
    }
}

impl std::fmt::Display for As2mReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_strict() {
            return write!(f, "ok");
        }
        if !self.violations.is_empty() {
            write!(f, "{}", self.violations.join("; "))?;
        }
        if !self.fanout_deficits.is_empty() {
            if !self.violations.is_empty() {
                write!(f, "; ")?;
            }
            let d: Vec<String> = self
                .fanout_deficits
                .iter()
                .map(|(id, have)| format!("gate {id} has fanout {have} < 2"))
                .collect();
            write!(f, "deficits: {}", d.join(", "))?;
        }
        Ok(())
    }
}

/// Check the synchronous-alternating-monotone constraints: inputs feed only
/// OR gates, layers alternate OR (odd) / AND (even), every gate's inputs sit
/// exactly one layer below, fanin 2, fanout at most 2 (exactly 2 to be
/// strict), and all outputs are OR gates on the common top layer.
pub fn validate_as2m(c: &Circuit) -> As2mReport {
    let mut report = As2mReport::default();
    let mut push = |msg: String| report.violations.push(msg);

    if c.outputs().is_empty() {
        push("circuit declares no outputs".to_string());
    }
    let depth = c.depth();
    for g in c.gates() {
        let layer = c.layer(g.id);
        match g.kind {
            GateKind::Input => {}
            kind => {
                let want = if layer % 2 == 1 { GateKind::Or } else { GateKind::And };
                if kind != want {
                    push(format!("gate {} is {} but layer {} must be {}", g.id, kind, layer, want));
                }
                for &src in &g.inputs {
                    if c.layer(src) + 1 != layer {
                        push(format!(
                            "gate {} at layer {} reads gate {} at layer {} (must be the previous layer)",
                            g.id,
                            layer,
                            src,
                            c.layer(src)
                        ));
                    }
                    if c.gate(src).unwrap().kind == GateKind::Input && kind != GateKind::Or {
                        push(format!("input {} feeds {} gate {} (inputs feed only OR)", src, kind, g.id));
                    }
                }
            }
        }
    }
    for &o in c.outputs() {
        let g = c.gate(o).unwrap();
        if g.kind != GateKind::Or {
            push(format!("output {} is {} (outputs must be OR gates)", o, g.kind));
        }
        if c.layer(o) != depth {
            push(format!("output {} sits at layer {} below the top layer {}", o, c.layer(o), depth));
        }
    }
    for g in c.gates() {
        let fanout = c.fanout(g.id);
        let is_output = c.outputs().contains(&g.id);
        if is_output && fanout != 0 {
            report.violations.push(format!("output {} also feeds {} slots", g.id, fanout));
        } else if !is_output {
            if fanout > 2 {
                report.violations.push(format!("gate {} has fanout {} > 2", g.id, fanout));
            } else if fanout < 2 {
                report.fanout_deficits.push((g.id, fanout));
            }
        }
    }
    report
}

/// Truth values for the circuit inputs, keyed by external gate id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    pub values: BTreeMap<usize, bool>,
}

impl Assignment {
    pub fn get(&self, id: usize) -> Option<bool> {
        self.values.get(&id).copied()
    }

    pub fn set(&mut self, id: usize, value: bool) {
        self.values.insert(id, value);
    }
}

/// Parse `assign <id>=<0|1> ...` lines ('#' comments allowed).
pub fn parse_assignment(text: &str) -> Result<Assignment> {
    let mut asg = Assignment::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        if toks.next() != Some("assign") {
            return Err(Q2rError::parse(line, "expected 'assign <id>=<0|1> ...'"));
        }
        for tok in toks {
            let (id, val) = tok
                .split_once('=')
                .ok_or_else(|| Q2rError::parse(line, format!("bad assignment '{tok}'")))?;
            let id: usize =
                id.parse().map_err(|_| Q2rError::parse(line, format!("bad gate id '{id}'")))?;
            let value = match val {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Q2rError::parse(line, format!("bad truth value '{other}'")))
                }
            };
            if asg.values.insert(id, value).is_some() {
                return Err(Q2rError::parse(line, format!("input {id} assigned twice")));
            }
        }
    }
    Ok(asg)
}

pub fn write_assignment(asg: &Assignment) -> String {
    let parts: Vec<String> =
        asg.values.iter().map(|(id, v)| format!("{id}={}", u8::from(*v))).collect();
    format!("assign {}\n", parts.join(" "))
}

/// Evaluate every gate. The reference oracle for the compiler.
pub fn evaluate_circuit(c: &Circuit, asg: &Assignment) -> Result<HashMap<usize, bool>> {
    let mut values: HashMap<usize, bool> = HashMap::new();
    for &id in c.topo_order() {
        let g = c.gate(id).unwrap();
        let v = match g.kind {
            GateKind::Input => asg
                .get(id)
                .ok_or_else(|| Q2rError::circuit(format!("no value assigned to input {id}")))?,
            GateKind::And => values[&g.inputs[0]] && values[&g.inputs[1]],
            GateKind::Or => values[&g.inputs[0]] || values[&g.inputs[1]],
        };
        values.insert(id, v);
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SINGLE_OR: &str = "input 1\ninput 2\ngate 3 or 1 2\noutput 3\n";

    #[test]
    fn parse_and_evaluate_single_or() {
        let c = parse_circuit(SINGLE_OR).unwrap();
        assert_eq!(c.gates().len(), 3);
        assert_eq!(c.layer(3), 1);
        assert_eq!(c.depth(), 1);
        for (x, y, want) in [(false, false, false), (true, false, true), (true, true, true)] {
            let mut asg = Assignment::default();
            asg.set(1, x);
            asg.set(2, y);
            let vals = evaluate_circuit(&c, &asg).unwrap();
            assert_eq!(vals[&3], want);
        }
    }

    #[test]
    fn structural_errors() {
        assert!(parse_circuit("input 1\ninput 1\n").is_err());
        assert!(parse_circuit("input 1\ngate 3 or 1 9\noutput 3\n").is_err());
        assert!(parse_circuit("gate 3 or 3 3\noutput 3\n").is_err());
        assert!(parse_circuit("input 1\ngate 2 nand 1 1\n").is_err());
        // mutual cycle
        assert!(parse_circuit("gate 1 or 2 2\ngate 2 or 1 1\n").is_err());
    }

    #[test]
    fn forward_references_are_fine_when_acyclic() {
        let c = parse_circuit("gate 3 or 1 2\ninput 1\ninput 2\noutput 3\n").unwrap();
        assert_eq!(c.layer(3), 1);
    }

    #[test]
    fn as2m_accepts_the_single_or_with_deficits_only() {
        let c = parse_circuit(SINGLE_OR).unwrap();
        let report = validate_as2m(&c);
        assert!(report.is_valid(), "{report}");
        assert!(!report.is_strict());
        assert_eq!(report.fanout_deficits, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn as2m_flags_input_feeding_and() {
        let text = "input 1\ninput 2\ngate 3 and 1 2\noutput 3\n";
        let c = parse_circuit(text).unwrap();
        let report = validate_as2m(&c);
        assert!(!report.is_valid());
        assert!(report.violations.iter().any(|v| v.contains("inputs feed only OR")));
    }

    #[test]
    fn as2m_flags_fanout_three_and_skipped_layers() {
        let text = "\
input 1
input 2
gate 3 or 1 2
gate 4 or 1 2
gate 5 or 1 2
gate 6 and 3 4
gate 7 and 4 5
gate 8 and 3 5
output 6
output 7
output 8
";
        // every input feeds 3 gates
        let c = parse_circuit(text).unwrap();
        let report = validate_as2m(&c);
        assert!(report.violations.iter().any(|v| v.contains("fanout 3")));
        assert!(report.violations.iter().any(|v| v.contains("outputs must be OR")));

        let skip = "input 1\ninput 2\ngate 3 or 1 2\ngate 4 and 3 1\noutput 4\n";
        let c = parse_circuit(skip).unwrap();
        let report = validate_as2m(&c);
        assert!(report.violations.iter().any(|v| v.contains("previous layer")));
    }

    #[test]
    fn strict_two_layer_circuit_passes() {
        let text = "\
input 1
input 2
input 3
gate 4 or 1 2
gate 5 or 2 3
gate 6 or 3 1
gate 7 and 4 5
gate 8 and 5 6
gate 9 and 6 4
gate 10 or 7 8
gate 11 or 8 9
gate 12 or 9 7
output 10
output 11
output 12
";
        let c = parse_circuit(text).unwrap();
        let report = validate_as2m(&c);
        assert!(report.is_strict(), "{report}");
    }

    #[test]
    fn assignment_round_trip() {
        let asg = parse_assignment("assign 1=1 2=0\nassign 5=1\n").unwrap();
        assert_eq!(asg.get(1), Some(true));
        assert_eq!(asg.get(2), Some(false));
        assert_eq!(asg.get(5), Some(true));
        let text = write_assignment(&asg);
        assert_eq!(parse_assignment(&text).unwrap(), asg);
        assert!(parse_assignment("assign 1=2\n").is_err());
        assert!(parse_assignment("assign 1=1 1=0\n").is_err());
    }

    #[test]
    fn evaluation_requires_every_input() {
        let c = parse_circuit(SINGLE_OR).unwrap();
        let mut asg = Assignment::default();
        asg.set(1, true);
        assert!(evaluate_circuit(&c, &asg).is_err());
    }
}
