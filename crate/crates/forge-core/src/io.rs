//! Netlist interchange: JSON read/write and structural Verilog export.
//!
//! The JSON document is `{name, inputs, outputs, nets, gates}` with an
//! optional trailing `const0` field; `nets` maps net id to a debug name
//! and lists only named nets. Gate ids ascend, and serialization is
//! byte-identical across runs for the same netlist.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::netlist::{Gate, GateId, GateKind, NetId, Netlist};

#[derive(Serialize, Deserialize)]
struct NetlistDoc {
    name: String,
    inputs: Vec<u32>,
    outputs: Vec<u32>,
    nets: BTreeMap<u32, String>,
    gates: Vec<GateDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    const0: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct GateDoc {
    id: u32,
    kind: GateKind,
    fanin: Vec<u32>,
    out: u32,
}

fn to_doc(nl: &Netlist) -> NetlistDoc {
    NetlistDoc {
        name: nl.name().to_string(),
        inputs: nl.inputs().iter().map(|n| n.0).collect(),
        outputs: nl.outputs().iter().map(|n| n.0).collect(),
        nets: nl.net_names().iter().map(|(n, s)| (n.0, s.clone())).collect(),
        gates: nl
            .gates()
            .iter()
            .map(|g| GateDoc {
                id: g.id.0,
                kind: g.kind,
                fanin: g.fanin.iter().map(|n| n.0).collect(),
                out: g.out.0,
            })
            .collect(),
        const0: nl.const0().map(|n| n.0),
    }
}

fn from_doc(doc: NetlistDoc) -> Result<Netlist> {
    let mut max_net = 0u32;
    let mut track = |n: u32| max_net = max_net.max(n);
    doc.inputs.iter().copied().for_each(&mut track);
    doc.outputs.iter().copied().for_each(&mut track);
    doc.nets.keys().copied().for_each(&mut track);
    if let Some(c) = doc.const0 {
        track(c);
    }
    for g in &doc.gates {
        g.fanin.iter().copied().for_each(&mut track);
        track(g.out);
    }
    let net_count = if doc.inputs.is_empty() && doc.gates.is_empty() && doc.const0.is_none() {
        0
    } else {
        max_net as usize + 1
    };
    let nl = Netlist {
        name: doc.name,
        net_count,
        inputs: doc.inputs.into_iter().map(NetId).collect(),
        outputs: doc.outputs.into_iter().map(NetId).collect(),
        const0: doc.const0.map(NetId),
        gates: doc
            .gates
            .into_iter()
            .map(|g| Gate {
                id: GateId(g.id),
                kind: g.kind,
                fanin: g.fanin.into_iter().map(NetId).collect(),
                out: NetId(g.out),
            })
            .collect(),
        net_names: doc.nets.into_iter().map(|(n, s)| (NetId(n), s)).collect(),
    };
    nl.validate()?;
    Ok(nl)
}

/// Serialize a netlist to the canonical JSON form.
pub fn to_json(netlist: &Netlist) -> String {
    let mut s = serde_json::to_string_pretty(&to_doc(netlist)).expect("netlist serialization");
    s.push('\n');
    s
}

/// Parse and validate a netlist from JSON text.
pub fn from_json(text: &str) -> Result<Netlist> {
    from_doc(serde_json::from_str(text)?)
}

/// Write the canonical JSON form to a file.
pub fn write_json(netlist: &Netlist, path: &Path) -> Result<()> {
    Ok(std::fs::write(path, to_json(netlist))?)
}

/// Read and validate a netlist from a JSON file.
pub fn read_json(path: &Path) -> Result<Netlist> {
    from_json(&std::fs::read_to_string(path)?)
}

fn sanitize_identifier(name: &str) -> String {
    let mut out: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if out.is_empty() || out.chars().next().unwrap().is_ascii_digit() {
        out.insert(0, '_');
    }
    out
}

/// Export as a structural Verilog-2001 module. Nets take deterministic
/// `n<id>` names; gates map to primitives, MUX2 and the constant-zero
/// net to `assign` statements. `module_name` defaults to the netlist
/// name.
pub fn to_verilog(netlist: &Netlist, module_name: Option<&str>) -> String {
    let nl = netlist;
    let module = sanitize_identifier(module_name.unwrap_or(nl.name()));
    let net = |n: NetId| format!("n{}", n.0);

    // An output position needs an alias wire when its net is also an
    // input port or already used by an earlier output position.
    let mut port_names: Vec<String> = nl.inputs().iter().map(|&n| net(n)).collect();
    let mut seen: Vec<NetId> = nl.inputs().to_vec();
    let mut out_ports: Vec<(String, Option<NetId>)> = Vec::new();
    for (pos, &o) in nl.outputs().iter().enumerate() {
        if seen.contains(&o) {
            out_ports.push((format!("n{}_o{}", o.0, pos), Some(o)));
        } else {
            out_ports.push((net(o), None));
            seen.push(o);
        }
    }
    port_names.extend(out_ports.iter().map(|(p, _)| p.clone()));

    let mut v = String::new();
    let _ = writeln!(v, "module {} ({});", module, port_names.join(", "));
    for &i in nl.inputs() {
        let _ = writeln!(v, "  input {};", net(i));
    }
    for (p, _) in &out_ports {
        let _ = writeln!(v, "  output {};", p);
    }
    let port_net: Vec<bool> = {
        let mut is_port = vec![false; nl.net_count()];
        for &i in nl.inputs() {
            is_port[i.index()] = true;
        }
        for (pos, &o) in nl.outputs().iter().enumerate() {
            if out_ports[pos].1.is_none() {
                is_port[o.index()] = true;
            }
        }
        is_port
    };
    for id in 0..nl.net_count() {
        if !port_net[id] {
            let _ = writeln!(v, "  wire n{};", id);
        }
    }
    if let Some(c) = nl.const0() {
        let _ = writeln!(v, "  assign {} = 1'b0;", net(c));
    }
    for g in nl.gates() {
        match g.kind {
            GateKind::Mux2 => {
                let _ = writeln!(
                    v,
                    "  assign {} = {} ? {} : {};",
                    net(g.out),
                    net(g.fanin[0]),
                    net(g.fanin[2]),
                    net(g.fanin[1])
                );
            }
            _ => {
                let prim = match g.kind {
                    GateKind::Inv => "not",
                    GateKind::Buf => "buf",
                    GateKind::And2 => "and",
                    GateKind::Or2 => "or",
                    GateKind::Nand2 => "nand",
                    GateKind::Nor2 => "nor",
                    GateKind::Xor2 => "xor",
                    GateKind::Xnor2 => "xnor",
                    GateKind::Mux2 => unreachable!(),
                };
                let fanins: Vec<String> = g.fanin.iter().map(|&f| net(f)).collect();
                let _ = writeln!(v, "  {} g{} ({}, {});", prim, g.id.0, net(g.out), fanins.join(", "));
            }
        }
    }
    for (pos, (p, alias)) in out_ports.iter().enumerate() {
        if alias.is_some() {
            let _ = writeln!(v, "  assign {} = {};", p, net(nl.outputs()[pos]));
        }
    }
    v.push_str("endmodule\n");
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::netlist::{BitAssignment, NetlistBuilder};

    fn sample() -> Netlist {
        let mut b = NetlistBuilder::new("sample");
        let a = b.add_input("a");
        let c = b.add_input("b");
        let z = b.const_zero();
        let x = b.add_gate(GateKind::Xor2, &[a, c]).unwrap();
        let m = b.add_gate(GateKind::Mux2, &[x, a, z]).unwrap();
        b.add_output(x).unwrap();
        b.add_output(m).unwrap();
        b.freeze()
    }

    #[test]
    fn json_round_trip_is_identity() {
        let nl = sample();
        let text = to_json(&nl);
        let back = from_json(&text).unwrap();
        assert_eq!(nl, back);
        assert_eq!(text, to_json(&back));
    }

    #[test]
    fn json_round_trip_preserves_behavior() {
        let nl = sample();
        let back = from_json(&to_json(&nl)).unwrap();
        for bits in 0..4u32 {
            let pattern = [bits & 1 != 0, bits & 2 != 0];
            let stim_a = BitAssignment::set_inputs(&nl, &pattern).unwrap();
            let stim_b = BitAssignment::set_inputs(&back, &pattern).unwrap();
            let va = nl.evaluate(&stim_a).unwrap();
            let vb = back.evaluate(&stim_b).unwrap();
            for (&oa, &ob) in nl.outputs().iter().zip(back.outputs()) {
                assert_eq!(va.get(oa), vb.get(ob));
            }
        }
    }

    #[test]
    fn json_field_order_is_fixed() {
        let text = to_json(&sample());
        let name = text.find("\"name\"").unwrap();
        let inputs = text.find("\"inputs\"").unwrap();
        let outputs = text.find("\"outputs\"").unwrap();
        let nets = text.find("\"nets\"").unwrap();
        let gates = text.find("\"gates\"").unwrap();
        // Key position, not the "const0" net-name string inside `nets`.
        let const0 = text.find("\"const0\":").unwrap();
        assert!(name < inputs && inputs < outputs && outputs < nets && nets < gates);
        assert!(gates < const0, "const0 is a trailing extension field");
    }

    #[test]
    fn json_rejects_a_cycle() {
        // g0 and g1 feed each other.
        let text = r#"{
            "name": "cyc",
            "inputs": [0],
            "outputs": [2],
            "nets": {},
            "gates": [
                {"id": 0, "kind": "AND2", "fanin": [0, 2], "out": 1},
                {"id": 1, "kind": "OR2", "fanin": [1, 0], "out": 2}
            ]
        }"#;
        let err = from_json(text).unwrap_err();
        assert!(matches!(err, Error::Cycle(_)), "got {err}");
    }

    #[test]
    fn json_rejects_duplicate_driver() {
        let text = r#"{
            "name": "dup",
            "inputs": [0],
            "outputs": [1],
            "nets": {},
            "gates": [
                {"id": 0, "kind": "INV", "fanin": [0], "out": 1},
                {"id": 1, "kind": "BUF", "fanin": [0], "out": 1}
            ]
        }"#;
        let err = from_json(text).unwrap_err();
        assert!(matches!(err, Error::DuplicateDriver(NetId(1))), "got {err}");
    }

    #[test]
    fn verilog_lists_ports_and_primitives() {
        let v = to_verilog(&sample(), None);
        assert!(v.starts_with("module sample (n0, n1, n3, n4);"));
        assert!(v.contains("  input n0;"));
        assert!(v.contains("  output n4;"));
        assert!(v.contains("  assign n2 = 1'b0;"));
        assert!(v.contains("  xor g0 (n3, n0, n1);"));
        assert!(v.contains("  assign n4 = n3 ? n2 : n0;"));
        assert!(v.ends_with("endmodule\n"));
    }

    #[test]
    fn verilog_aliases_output_that_is_an_input() {
        let mut b = NetlistBuilder::new("alias");
        let a = b.add_input("a");
        b.add_output(a).unwrap();
        let v = to_verilog(&b.freeze(), Some("alias"));
        assert!(v.contains("output n0_o0;"));
        assert!(v.contains("assign n0_o0 = n0;"));
    }
}
