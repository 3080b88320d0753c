//! Flat gate-level netlist: nets, gates, construction, evaluation.
//!
//! A [`Netlist`] is a directed acyclic graph of fixed-arity gates over
//! densely numbered nets. Nets are driven by exactly one of: a primary
//! input, the shared constant-zero pseudo-input, or a gate output.
//! Identifiers are assigned in construction order, so identical build
//! sequences yield identical netlists byte for byte.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of a net (wire). Dense, starting at 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NetId(pub u32);

/// Identifier of a gate. Equal to the gate's index in [`Netlist::gates`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GateId(pub u32);

impl NetId {
    /// Index form, for slice lookups.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GateId {
    /// Index form, for slice lookups.
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for GateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "g{}", self.0)
    }
}

/// The fixed cell library. MUX2 fanins are ordered (select, in0, in1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    Inv,
    Buf,
    And2,
    Or2,
    Nand2,
    Nor2,
    Xor2,
    Xnor2,
    Mux2,
}

impl GateKind {
    /// Every kind, in declaration order.
    pub const ALL: [GateKind; 9] = [
        GateKind::Inv,
        GateKind::Buf,
        GateKind::And2,
        GateKind::Or2,
        GateKind::Nand2,
        GateKind::Nor2,
        GateKind::Xor2,
        GateKind::Xnor2,
        GateKind::Mux2,
    ];

    /// Number of fanins the kind takes.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Inv | GateKind::Buf => 1,
            GateKind::Mux2 => 3,
            _ => 2,
        }
    }

    /// Canonical upper-case name, as used in files.
    pub fn name(self) -> &'static str {
        match self {
            GateKind::Inv => "INV",
            GateKind::Buf => "BUF",
            GateKind::And2 => "AND2",
            GateKind::Or2 => "OR2",
            GateKind::Nand2 => "NAND2",
            GateKind::Nor2 => "NOR2",
            GateKind::Xor2 => "XOR2",
            GateKind::Xnor2 => "XNOR2",
            GateKind::Mux2 => "MUX2",
        }
    }

    /// Parse a canonical name back into a kind.
    pub fn from_name(s: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Boolean function of the kind over one set of fanin values.
    pub fn eval(self, v: &[bool]) -> bool {
        debug_assert_eq!(v.len(), self.arity());
        match self {
            GateKind::Inv => !v[0],
            GateKind::Buf => v[0],
            GateKind::And2 => v[0] & v[1],
            GateKind::Or2 => v[0] | v[1],
            GateKind::Nand2 => !(v[0] & v[1]),
            GateKind::Nor2 => !(v[0] | v[1]),
            GateKind::Xor2 => v[0] ^ v[1],
            GateKind::Xnor2 => !(v[0] ^ v[1]),
            GateKind::Mux2 => {
                if v[0] {
                    v[2]
                } else {
                    v[1]
                }
            }
        }
    }

    /// Same function applied bitwise over 64 packed stimulus lanes.
    pub fn eval_word(self, v: &[u64]) -> u64 {
        debug_assert_eq!(v.len(), self.arity());
        match self {
            GateKind::Inv => !v[0],
            GateKind::Buf => v[0],
            GateKind::And2 => v[0] & v[1],
            GateKind::Or2 => v[0] | v[1],
            GateKind::Nand2 => !(v[0] & v[1]),
            GateKind::Nor2 => !(v[0] | v[1]),
            GateKind::Xor2 => v[0] ^ v[1],
            GateKind::Xnor2 => !(v[0] ^ v[1]),
            GateKind::Mux2 => (v[0] & v[2]) | (!v[0] & v[1]),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gate {
    pub id: GateId,
    pub kind: GateKind,
    pub fanin: Vec<NetId>,
    pub out: NetId,
}

/// An immutable, validated netlist.
#[derive(Debug, Clone, PartialEq)]
pub struct Netlist {
    pub(crate) name: String,
    pub(crate) net_count: usize,
    pub(crate) inputs: Vec<NetId>,
    pub(crate) outputs: Vec<NetId>,
    pub(crate) const0: Option<NetId>,
    pub(crate) gates: Vec<Gate>,
    pub(crate) net_names: BTreeMap<NetId, String>,
}

/// Mutable construction handle. `freeze` turns it into a [`Netlist`];
/// gates can only reference nets that already exist, so cycles and
/// dangling references are unrepresentable during construction.
#[derive(Debug, Clone)]
pub struct NetlistBuilder {
    name: String,
    net_count: usize,
    inputs: Vec<NetId>,
    outputs: Vec<NetId>,
    const0: Option<NetId>,
    gates: Vec<Gate>,
    net_names: BTreeMap<NetId, String>,
}

impl NetlistBuilder {
    /// Start an empty netlist with the given name.
    pub fn new(name: &str) -> Self {
        NetlistBuilder {
            name: name.to_string(),
            net_count: 0,
            inputs: Vec::new(),
            outputs: Vec::new(),
            const0: None,
            gates: Vec::new(),
            net_names: BTreeMap::new(),
        }
    }

    fn alloc_net(&mut self) -> NetId {
        let id = NetId(self.net_count as u32);
        self.net_count += 1;
        id
    }

    /// Add a named primary input and return its net.
    pub fn add_input(&mut self, name: &str) -> NetId {
        let id = self.alloc_net();
        self.inputs.push(id);
        self.net_names.insert(id, name.to_string());
        id
    }

    /// The shared constant-zero pseudo-input, created on first use.
    /// It evaluates to false and arrives at time 0; it is not listed
    /// among the primary inputs.
    pub fn const_zero(&mut self) -> NetId {
        if let Some(c) = self.const0 {
            return c;
        }
        let id = self.alloc_net();
        self.const0 = Some(id);
        self.net_names.insert(id, "const0".to_string());
        id
    }

    /// Add a gate; returns the freshly allocated output net.
    pub fn add_gate(&mut self, kind: GateKind, fanin: &[NetId]) -> Result<NetId> {
        if fanin.len() != kind.arity() {
            return Err(Error::ArityMismatch {
                kind,
                expected: kind.arity(),
                got: fanin.len(),
            });
        }
        for &f in fanin {
            if f.index() >= self.net_count {
                return Err(Error::UnknownNet(f));
            }
        }
        let out = self.alloc_net();
        let id = GateId(self.gates.len() as u32);
        self.gates.push(Gate {
            id,
            kind,
            fanin: fanin.to_vec(),
            out,
        });
        Ok(out)
    }

    /// Mark an existing net as a primary output. Order is significant.
    pub fn add_output(&mut self, net: NetId) -> Result<()> {
        if net.index() >= self.net_count {
            return Err(Error::UnknownNet(net));
        }
        self.outputs.push(net);
        Ok(())
    }

    /// Attach a debug name to a net (ports are named automatically).
    pub fn name_net(&mut self, net: NetId, name: &str) -> Result<()> {
        if net.index() >= self.net_count {
            return Err(Error::UnknownNet(net));
        }
        self.net_names.insert(net, name.to_string());
        Ok(())
    }

    /// Number of nets allocated so far.
    pub fn net_count(&self) -> usize {
        self.net_count
    }

    /// Expand the canonical full-adder macro; returns (sum, carry).
    ///
    /// sum = (a XOR b) XOR cin, carry = (a AND b) OR ((a XOR b) AND cin),
    /// five gates sharing the first XOR2.
    pub fn full_adder(&mut self, a: NetId, b: NetId, cin: NetId) -> Result<(NetId, NetId)> {
        let x = self.add_gate(GateKind::Xor2, &[a, b])?;
        let sum = self.add_gate(GateKind::Xor2, &[x, cin])?;
        let g = self.add_gate(GateKind::And2, &[a, b])?;
        let p = self.add_gate(GateKind::And2, &[x, cin])?;
        let carry = self.add_gate(GateKind::Or2, &[g, p])?;
        Ok((sum, carry))
    }

    /// Expand the half-adder macro; returns (sum, carry).
    pub fn half_adder(&mut self, a: NetId, b: NetId) -> Result<(NetId, NetId)> {
        let sum = self.add_gate(GateKind::Xor2, &[a, b])?;
        let carry = self.add_gate(GateKind::And2, &[a, b])?;
        Ok((sum, carry))
    }

    /// Splice another netlist's logic into this builder: `other`'s
    /// input ports are bound to `bindings` (net per port, in order),
    /// its constant-zero to this builder's, and its gates re-emitted in
    /// topological order. Returns `other`'s output nets remapped.
    pub fn import(&mut self, other: &Netlist, bindings: &[NetId]) -> Result<Vec<NetId>> {
        if bindings.len() != other.inputs.len() {
            return Err(Error::WidthMismatch {
                expected: other.inputs.len(),
                got: bindings.len(),
            });
        }
        let mut map: Vec<Option<NetId>> = vec![None; other.net_count];
        for (&port, &net) in other.inputs.iter().zip(bindings) {
            if net.index() >= self.net_count {
                return Err(Error::UnknownNet(net));
            }
            map[port.index()] = Some(net);
        }
        if let Some(z) = other.const0 {
            map[z.index()] = Some(self.const_zero());
        }
        for gi in other.topo_order()? {
            let gate = &other.gates[gi.index()];
            let fanin: Vec<NetId> = gate
                .fanin
                .iter()
                .map(|f| map[f.index()].expect("validated netlist drives every fanin"))
                .collect();
            map[gate.out.index()] = Some(self.add_gate(gate.kind, &fanin)?);
        }
        Ok(other
            .outputs
            .iter()
            .map(|o| map[o.index()].expect("validated netlist drives every output"))
            .collect())
    }

    /// Finish construction. The structural invariants are re-checked;
    /// a violation here would be a bug in the builder itself.
    pub fn freeze(self) -> Netlist {
        let nl = Netlist {
            name: self.name,
            net_count: self.net_count,
            inputs: self.inputs,
            outputs: self.outputs,
            const0: self.const0,
            gates: self.gates,
            net_names: self.net_names,
        };
        nl.validate().expect("builder produced an invalid netlist");
        nl
    }
}

/// Per-kind gate histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CellCounts {
    counts: [usize; 9],
}

impl CellCounts {
    /// Count for one kind.
    pub fn get(&self, kind: GateKind) -> usize {
        self.counts[kind as usize]
    }

    pub(crate) fn bump(&mut self, kind: GateKind) {
        self.counts[kind as usize] += 1;
    }

    /// Total number of gates.
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// True when no gates were counted.
    pub fn is_empty(&self) -> bool {
        self.total() == 0
    }

    /// Non-zero entries in kind order.
    pub fn iter(&self) -> impl Iterator<Item = (GateKind, usize)> + '_ {
        GateKind::ALL
            .into_iter()
            .map(|k| (k, self.get(k)))
            .filter(|&(_, c)| c > 0)
    }
}

impl fmt::Display for CellCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.iter() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}:{}", k, c)?;
            first = false;
        }
        Ok(())
    }
}

/// A (possibly partial) net -> boolean binding, used both as stimulus
/// and as evaluation result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitAssignment {
    values: Vec<Option<bool>>,
}

impl BitAssignment {
    /// All-unset assignment sized for `netlist`.
    pub fn for_netlist(netlist: &Netlist) -> Self {
        BitAssignment {
            values: vec![None; netlist.net_count],
        }
    }

    /// Bind one net.
    pub fn set(&mut self, net: NetId, value: bool) {
        self.values[net.index()] = Some(value);
    }

    /// Look one net up.
    pub fn get(&self, net: NetId) -> Option<bool> {
        self.values.get(net.index()).copied().flatten()
    }

    /// Bind the netlist's primary inputs, in port order.
    pub fn set_inputs(netlist: &Netlist, bits: &[bool]) -> Result<Self> {
        if bits.len() != netlist.inputs.len() {
            return Err(Error::WidthMismatch {
                expected: netlist.inputs.len(),
                got: bits.len(),
            });
        }
        let mut a = BitAssignment::for_netlist(netlist);
        for (&net, &b) in netlist.inputs.iter().zip(bits) {
            a.set(net, b);
        }
        Ok(a)
    }
}

impl Netlist {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn net_count(&self) -> usize {
        self.net_count
    }

    pub fn inputs(&self) -> &[NetId] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[NetId] {
        &self.outputs
    }

    /// The constant-zero pseudo-input, if the netlist uses one.
    pub fn const0(&self) -> Option<NetId> {
        self.const0
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Name attached to a net, if any.
    pub fn net_name(&self, net: NetId) -> Option<&str> {
        self.net_names.get(&net).map(|s| s.as_str())
    }

    pub(crate) fn net_names(&self) -> &BTreeMap<NetId, String> {
        &self.net_names
    }

    /// Gate driving `net`, if any.
    pub fn driver(&self, net: NetId) -> Option<&Gate> {
        // Gate outputs are allocated in construction order, but loaded
        // netlists may permute them, so scan via the driver map.
        self.driver_map()
            .get(net.index())
            .copied()
            .flatten()
            .map(|g| &self.gates[g.index()])
    }

    fn driver_map(&self) -> Vec<Option<GateId>> {
        let mut map = vec![None; self.net_count];
        for g in &self.gates {
            map[g.out.index()] = Some(g.id);
        }
        map
    }

    /// Number of fanin slots each net feeds.
    pub fn fanout_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.net_count];
        for g in &self.gates {
            for f in &g.fanin {
                counts[f.index()] += 1;
            }
        }
        counts
    }

    /// Check all structural invariants: ids in range and dense, fixed
    /// arities, exactly one driver per non-input net, acyclicity.
    pub fn validate(&self) -> Result<()> {
        for (i, g) in self.gates.iter().enumerate() {
            if g.id.index() != i {
                return Err(Error::GateOrder(g.id.0, i as u32));
            }
            if g.fanin.len() != g.kind.arity() {
                return Err(Error::ArityMismatch {
                    kind: g.kind,
                    expected: g.kind.arity(),
                    got: g.fanin.len(),
                });
            }
            for &f in &g.fanin {
                if f.index() >= self.net_count {
                    return Err(Error::UnknownNet(f));
                }
            }
            if g.out.index() >= self.net_count {
                return Err(Error::UnknownNet(g.out));
            }
        }
        for &n in self.inputs.iter().chain(self.outputs.iter()) {
            if n.index() >= self.net_count {
                return Err(Error::UnknownNet(n));
            }
        }
        let mut driven = vec![false; self.net_count];
        for g in &self.gates {
            if driven[g.out.index()] {
                return Err(Error::DuplicateDriver(g.out));
            }
            driven[g.out.index()] = true;
        }
        let mut is_source = vec![false; self.net_count];
        for &n in &self.inputs {
            is_source[n.index()] = true;
        }
        if let Some(c) = self.const0 {
            is_source[c.index()] = true;
        }
        for n in 0..self.net_count {
            let net = NetId(n as u32);
            if is_source[n] && driven[n] {
                return Err(Error::DrivenInput(net));
            }
            if !is_source[n] && !driven[n] {
                return Err(Error::Undriven(net));
            }
        }
        self.topo_order().map(|_| ())
    }

    /// Topological order over gates, deterministic: among ready gates,
    /// lowest id first. Fails with a net on the cycle if there is one.
    pub fn topo_order(&self) -> Result<Vec<GateId>> {
        let driver = self.driver_map();
        let mut indegree = vec![0usize; self.gates.len()];
        let mut consumers: Vec<Vec<GateId>> = vec![Vec::new(); self.gates.len()];
        for g in &self.gates {
            for &f in &g.fanin {
                if let Some(d) = driver.get(f.index()).copied().flatten() {
                    indegree[g.id.index()] += 1;
                    consumers[d.index()].push(g.id);
                }
            }
        }
        let mut ready: BinaryHeap<Reverse<u32>> = indegree
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == 0)
            .map(|(i, _)| Reverse(i as u32))
            .collect();
        let mut order = Vec::with_capacity(self.gates.len());
        let mut done = vec![false; self.gates.len()];
        while let Some(Reverse(i)) = ready.pop() {
            let id = GateId(i);
            order.push(id);
            done[id.index()] = true;
            for &c in &consumers[id.index()] {
                indegree[c.index()] -= 1;
                if indegree[c.index()] == 0 {
                    ready.push(Reverse(c.0));
                }
            }
        }
        if order.len() == self.gates.len() {
            return Ok(order);
        }
        // Walk predecessors through unfinished gates until one repeats;
        // that gate's output net lies on a cycle.
        let start = done.iter().position(|&d| !d).expect("unfinished gate");
        let mut seen = vec![false; self.gates.len()];
        let mut cur = start;
        loop {
            if seen[cur] {
                return Err(Error::Cycle(self.gates[cur].out));
            }
            seen[cur] = true;
            cur = self.gates[cur]
                .fanin
                .iter()
                .filter_map(|&f| driver.get(f.index()).copied().flatten())
                .find(|d| !done[d.index()])
                .expect("unfinished gate with no unfinished predecessor")
                .index();
        }
    }

    /// Evaluate the netlist under a stimulus that must bind every
    /// primary input. Returns values for all nets.
    pub fn evaluate(&self, stimulus: &BitAssignment) -> Result<BitAssignment> {
        let eval = Evaluator::new(self)?;
        let mut scratch = Vec::new();
        let bits = self.input_bits(stimulus)?;
        eval.run(&bits, &mut scratch);
        let mut out = BitAssignment::for_netlist(self);
        for (i, &v) in scratch.iter().enumerate() {
            out.set(NetId(i as u32), v);
        }
        Ok(out)
    }

    fn input_bits(&self, stimulus: &BitAssignment) -> Result<Vec<bool>> {
        self.inputs
            .iter()
            .map(|&n| stimulus.get(n).ok_or(Error::PartialStimulus(n)))
            .collect()
    }

    /// Histogram of gate kinds.
    pub fn count_cells(&self) -> CellCounts {
        let mut c = CellCounts::default();
        for g in &self.gates {
            c.bump(g.kind);
        }
        c
    }
}

/// Reusable single-pattern evaluator; precomputes the gate order once.
pub struct Evaluator<'a> {
    netlist: &'a Netlist,
    order: Vec<GateId>,
}

impl<'a> Evaluator<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self> {
        Ok(Evaluator {
            netlist,
            order: netlist.topo_order()?,
        })
    }

    /// Evaluate one input pattern (in port order) into `scratch`,
    /// which is resized to hold a value per net.
    pub fn run(&self, input_bits: &[bool], scratch: &mut Vec<bool>) {
        let nl = self.netlist;
        assert_eq!(input_bits.len(), nl.inputs.len(), "stimulus width");
        scratch.clear();
        scratch.resize(nl.net_count, false);
        for (&n, &b) in nl.inputs.iter().zip(input_bits) {
            scratch[n.index()] = b;
        }
        let mut fanin = [false; 3];
        for &g in &self.order {
            let gate = &nl.gates[g.index()];
            for (slot, &f) in fanin.iter_mut().zip(&gate.fanin) {
                *slot = scratch[f.index()];
            }
            scratch[gate.out.index()] = gate.kind.eval(&fanin[..gate.fanin.len()]);
        }
    }

    /// Output values for one input pattern.
    pub fn outputs(&self, input_bits: &[bool]) -> Vec<bool> {
        let mut scratch = Vec::new();
        self.run(input_bits, &mut scratch);
        self.netlist
            .outputs
            .iter()
            .map(|&n| scratch[n.index()])
            .collect()
    }
}

/// 64-lane packed evaluator: each u64 carries one bit per stimulus lane.
pub struct MultiEvaluator<'a> {
    netlist: &'a Netlist,
    order: Vec<GateId>,
}

impl<'a> MultiEvaluator<'a> {
    pub fn new(netlist: &'a Netlist) -> Result<Self> {
        Ok(MultiEvaluator {
            netlist,
            order: netlist.topo_order()?,
        })
    }

    /// Evaluate 64 lanes at once. `input_words[i]` packs the values of
    /// input port `i` across lanes; `scratch` receives one word per net.
    pub fn run(&self, input_words: &[u64], scratch: &mut Vec<u64>) {
        let nl = self.netlist;
        assert_eq!(input_words.len(), nl.inputs.len(), "stimulus width");
        scratch.clear();
        scratch.resize(nl.net_count, 0);
        for (&n, &w) in nl.inputs.iter().zip(input_words) {
            scratch[n.index()] = w;
        }
        let mut fanin = [0u64; 3];
        for &g in &self.order {
            let gate = &nl.gates[g.index()];
            for (slot, &f) in fanin.iter_mut().zip(&gate.fanin) {
                *slot = scratch[f.index()];
            }
            scratch[gate.out.index()] = gate.kind.eval_word(&fanin[..gate.fanin.len()]);
        }
    }
}
