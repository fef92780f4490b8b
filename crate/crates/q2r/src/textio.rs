//! Plain-text exchange format for networks and everything that rides along
//! with them in one file: an initial configuration, a prediction query, and
//! node role annotations.
//!
//! Grammar (node ids are 1-based on the wire, 0-based in memory):
//!
//! ```text
//! # comment, also allowed after any line
//! q2r <n>                      header, required first
//! block A <id> <id> ...        optional; A and B together must cover 1..=n
//! block B <id> <id> ...
//! edge <i> <j>                 one undirected edge per line
//! role <id> I <orig>           optional node annotations
//! role <id> GE <orig>
//! role <id> S <i> <j>
//! role <id> F <i> <j>
//! pred t=<t> v=<id>            optional prediction query
//! 01001...                     optional bare configuration line, length n
//! ```

use std::fmt::Write as _;

use crate::config::Configuration;
use crate::error::{Q2rError, Result};
use crate::net::{BlockClass, Network};

/// Node annotation attached by the parallel-simulator builder. `I` marks an
/// image of an original node, `GE` its mirrored twin; `S` and `F` mark the
/// j-th node of the i-th oscillating / frozen block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoleLine {
    Image { original: usize },
    Mirror { original: usize },
    Oscillator { block: usize, slot: usize },
    Frozen { block: usize, slot: usize },
}

/// Prediction query: does node `node` differ from its initial value at time
/// `t` under the network's natural schedule?
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PredQuery {
    pub t: u64,
    pub node: usize,
}

/// Everything one file can carry.
#[derive(Debug, Clone)]
pub struct Bundle {
    pub network: Network,
    pub config: Option<Configuration>,
    pub pred: Option<PredQuery>,
    pub roles: Vec<(usize, RoleLine)>,
}

fn parse_err(line: usize, msg: impl Into<String>) -> Q2rError {
    Q2rError::parse(line, msg)
}

fn parse_node(tok: &str, n: usize, line: usize) -> Result<usize> {
    let id: usize =
        tok.parse().map_err(|_| parse_err(line, format!("bad node id '{tok}'")))?;
    if id == 0 || id > n {
        return Err(parse_err(line, format!("node id {id} outside 1..={n}")));
    }
    Ok(id - 1)
}

/// Parse a full bundle. Unknown keywords are errors; order after the header
/// is free except that at most one configuration line is allowed.
pub fn parse_bundle(text: &str) -> Result<Bundle> {
    let mut n: Option<usize> = None;
    let mut edges: Vec<(usize, usize)> = Vec::new();
    let mut block_a: Option<Vec<usize>> = None;
    let mut block_b: Option<Vec<usize>> = None;
    let mut config: Option<Configuration> = None;
    let mut pred: Option<PredQuery> = None;
    let mut roles: Vec<(usize, RoleLine)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let head = toks.next().unwrap();

        if n.is_none() {
            if head != "q2r" {
                return Err(parse_err(line, "expected 'q2r <n>' header"));
            }
            let count = toks
                .next()
                .ok_or_else(|| parse_err(line, "missing node count"))?
                .parse::<usize>()
                .map_err(|_| parse_err(line, "node count must be a non-negative integer"))?;
            if toks.next().is_some() {
                return Err(parse_err(line, "trailing tokens after node count"));
            }
            n = Some(count);
            continue;
        }
        let n = n.unwrap();

        match head {
            "q2r" => return Err(parse_err(line, "duplicate header")),
            "edge" => {
                let a = parse_node(
                    toks.next().ok_or_else(|| parse_err(line, "edge needs two node ids"))?,
                    n,
                    line,
                )?;
                let b = parse_node(
                    toks.next().ok_or_else(|| parse_err(line, "edge needs two node ids"))?,
                    n,
                    line,
                )?;
                if toks.next().is_some() {
                    return Err(parse_err(line, "trailing tokens after edge"));
                }
                edges.push((a, b));
            }
            "block" => {
                let which = toks.next().ok_or_else(|| parse_err(line, "block needs A or B"))?;
                let slot = match which {
                    "A" => &mut block_a,
                    "B" => &mut block_b,
                    other => {
                        return Err(parse_err(line, format!("unknown block class '{other}'")))
                    }
                };
                if slot.is_some() {
                    return Err(parse_err(line, format!("block {which} given twice")));
                }
                let mut ids = Vec::new();
                for tok in toks {
                    ids.push(parse_node(tok, n, line)?);
                }
                *slot = Some(ids);
            }
            "role" => {
                let node = parse_node(
                    toks.next().ok_or_else(|| parse_err(line, "role needs a node id"))?,
                    n,
                    line,
                )?;
                let kind =
                    toks.next().ok_or_else(|| parse_err(line, "role needs a kind"))?;
                let mut arg = |what: &str| -> Result<usize> {
                    toks.next()
                        .ok_or_else(|| parse_err(line, format!("role {kind} needs {what}")))?
                        .parse::<usize>()
                        .map_err(|_| parse_err(line, format!("bad role argument for {what}")))
                };
                // original ids are 1-based on the wire, like every node id
                let mut orig = |what: &str| -> Result<usize> {
                    let v = arg(what)?;
                    if v == 0 {
                        return Err(parse_err(line, format!("{what} must be at least 1")));
                    }
                    Ok(v - 1)
                };
                let role = match kind {
                    "I" => RoleLine::Image { original: orig("an original id")? },
                    "GE" => RoleLine::Mirror { original: orig("an original id")? },
                    "S" => RoleLine::Oscillator { block: arg("a block index")?, slot: arg("a slot index")? },
                    "F" => RoleLine::Frozen { block: arg("a block index")?, slot: arg("a slot index")? },
                    other => return Err(parse_err(line, format!("unknown role kind '{other}'"))),
                };
                roles.push((node, role));
            }
            "pred" => {
                if pred.is_some() {
                    return Err(parse_err(line, "duplicate pred line"));
                }
                let mut t: Option<u64> = None;
                let mut v: Option<usize> = None;
                for tok in toks {
                    if let Some(val) = tok.strip_prefix("t=") {
                        t = Some(
                            val.parse()
                                .map_err(|_| parse_err(line, format!("bad time '{val}'")))?,
                        );
                    } else if let Some(val) = tok.strip_prefix("v=") {
                        v = Some(parse_node(val, n, line)?);
                    } else {
                        return Err(parse_err(line, format!("unknown pred field '{tok}'")));
                    }
                }
                let t = t.ok_or_else(|| parse_err(line, "pred needs t=<t>"))?;
                let node = v.ok_or_else(|| parse_err(line, "pred needs v=<id>"))?;
                pred = Some(PredQuery { t, node });
            }
            word if word.chars().all(|c| c == '0' || c == '1') && toks.next().is_none() => {
                if config.is_some() {
                    return Err(parse_err(line, "second configuration line"));
                }
                if word.len() != n {
                    return Err(parse_err(
                        line,
                        format!("configuration has {} nodes, network has {}", word.len(), n),
                    ));
                }
                config = Some(
                    Configuration::parse(word)
                        .map_err(|e| parse_err(line, e.to_string()))?,
                );
            }
            other => return Err(parse_err(line, format!("unknown keyword '{other}'"))),
        }
    }

    let n = n.ok_or_else(|| parse_err(text.lines().count().max(1), "missing 'q2r <n>' header"))?;

    let classes = match (block_a, block_b) {
        (None, None) => None,
        (a, b) => {
            let a = a.unwrap_or_default();
            let b = b.unwrap_or_default();
            let mut classes = vec![None; n];
            for (ids, class) in [(&a, BlockClass::A), (&b, BlockClass::B)] {
                for &i in ids {
                    if classes[i].is_some() {
                        return Err(Q2rError::parse(
                            0,
                            format!("node {} assigned to a block twice", i + 1),
                        ));
                    }
                    classes[i] = Some(class);
                }
            }
            let mut out = Vec::with_capacity(n);
            for (i, c) in classes.into_iter().enumerate() {
                match c {
                    Some(c) => out.push(c),
                    None => {
                        return Err(Q2rError::parse(
                            0,
                            format!("node {} belongs to neither block", i + 1),
                        ))
                    }
                }
            }
            Some(out)
        }
    };

    Ok(Bundle { network: Network::from_edges(n, &edges, classes), config, pred, roles })
}

/// Parse text that must contain a network and nothing else.
pub fn parse_network(text: &str) -> Result<Network> {
    let bundle = parse_bundle(text)?;
    if bundle.config.is_some() || bundle.pred.is_some() || !bundle.roles.is_empty() {
        return Err(Q2rError::parse(0, "expected a bare network without extra sections"));
    }
    Ok(bundle.network)
}

/// Canonical network serialization: header, blocks, then edges sorted.
pub fn write_network(net: &Network) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "q2r {}", net.len());
    if let Some(classes) = net.classes() {
        for (class, tag) in [(BlockClass::A, "A"), (BlockClass::B, "B")] {
            let ids: Vec<String> = classes
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == class)
                .map(|(i, _)| (i + 1).to_string())
                .collect();
            let _ = writeln!(out, "block {} {}", tag, ids.join(" "));
        }
    }
    let mut edges: Vec<(usize, usize)> = net.edges().collect();
    edges.sort_unstable();
    for (a, b) in edges {
        let _ = writeln!(out, "edge {} {}", a + 1, b + 1);
    }
    out
}

/// Serialize a full bundle in canonical order.
pub fn write_bundle(bundle: &Bundle) -> String {
    let mut out = write_network(&bundle.network);
    for &(node, role) in &bundle.roles {
        match role {
            RoleLine::Image { original } => {
                let _ = writeln!(out, "role {} I {}", node + 1, original + 1);
            }
            RoleLine::Mirror { original } => {
                let _ = writeln!(out, "role {} GE {}", node + 1, original + 1);
            }
            RoleLine::Oscillator { block, slot } => {
                let _ = writeln!(out, "role {} S {} {}", node + 1, block, slot);
            }
            RoleLine::Frozen { block, slot } => {
                let _ = writeln!(out, "role {} F {} {}", node + 1, block, slot);
            }
        }
    }
    if let Some(q) = bundle.pred {
        let _ = writeln!(out, "pred t={} v={}", q.t, q.node + 1);
    }
    if let Some(config) = &bundle.config {
        let _ = writeln!(out, "{}", config.to_text());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const RING: &str = "\
# four-node ring
q2r 4
block A 1 3
block B 2 4
edge 1 2
edge 2 3
edge 3 4
edge 1 4   # wrap
";

    #[test]
    fn network_round_trip() {
        let net = parse_network(RING).unwrap();
        assert_eq!(net.len(), 4);
        assert_eq!(net.edge_count(), 4);
        assert_eq!(net.class_of(0), Some(BlockClass::A));
        assert_eq!(net.class_of(1), Some(BlockClass::B));
        let text = write_network(&net);
        let again = parse_network(&text).unwrap();
        assert_eq!(net, again);
    }

    #[test]
    fn bundle_carries_config_and_pred() {
        let text = format!("{RING}pred t=7 v=3\n1000\n");
        let bundle = parse_bundle(&text).unwrap();
        assert_eq!(bundle.pred, Some(PredQuery { t: 7, node: 2 }));
        assert_eq!(bundle.config.unwrap().to_text(), "1000");
        let b2 = parse_bundle(&write_bundle(&parse_bundle(&text).unwrap())).unwrap();
        assert_eq!(b2.pred, Some(PredQuery { t: 7, node: 2 }));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let bad = "q2r 3\nedge 1 4\n";
        let err = parse_network(bad).unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");

        let bad = "edge 1 2\n";
        assert!(parse_network(bad).is_err());

        let bad = "q2r 2\nedge 1 2\n011\n";
        let err = parse_bundle(bad).unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }

    #[test]
    fn blocks_must_partition() {
        let bad = "q2r 2\nblock A 1\nedge 1 2\n";
        assert!(parse_bundle(bad).is_err());
        let bad = "q2r 2\nblock A 1 2\nblock B 2\nedge 1 2\n";
        assert!(parse_bundle(bad).is_err());
    }

    #[test]
    fn roles_round_trip() {
        let text = "q2r 4\nedge 1 2\nedge 2 3\nedge 3 4\nedge 1 4\nrole 1 I 1\nrole 2 GE 1\nrole 3 S 1 1\nrole 4 F 1 2\n";
        let bundle = parse_bundle(text).unwrap();
        assert_eq!(bundle.roles.len(), 4);
        assert_eq!(bundle.roles[2].1, RoleLine::Oscillator { block: 1, slot: 1 });
        let again = parse_bundle(&write_bundle(&bundle)).unwrap();
        assert_eq!(again.roles, bundle.roles);
    }
}
