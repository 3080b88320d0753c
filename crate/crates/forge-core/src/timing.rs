//! Static timing analysis: per-gate delay models, longest-path arrival
//! times, CPA input arrival profiles and adder completion times.
//!
//! Arrival semantics are the usual topological longest path:
//! `arrival(out) = delay(kind) + max(arrival of fanins)`, with primary
//! inputs at caller-given times and the constant-zero pseudo-input at 0.
//! Wire delay is ignored (pre-layout model).

use std::ops::Range;
use std::path::Path;

use crate::error::{Error, Result};
use crate::multiplier::MultiplierFrontEnd;
use crate::netlist::{GateKind, Netlist, NetlistBuilder};

/// Per-kind propagation delays, in arbitrary "delay units".
#[derive(Debug, Clone, PartialEq)]
pub struct DelayModel {
    delays: [f64; 9],
}

impl Default for DelayModel {
    /// The "unit-nand" normalization: INV/BUF/NAND2/NOR2 = 1,
    /// AND2/OR2/XOR2/XNOR2/MUX2 = 2.
    fn default() -> Self {
        let mut m = DelayModel { delays: [0.0; 9] };
        for kind in GateKind::ALL {
            m.delays[kind as usize] = match kind {
                GateKind::Inv | GateKind::Buf | GateKind::Nand2 | GateKind::Nor2 => 1.0,
                _ => 2.0,
            };
        }
        m
    }
}

impl DelayModel {
    /// Delay of one gate kind.
    pub fn delay(&self, kind: GateKind) -> f64 {
        self.delays[kind as usize]
    }

    /// Replace the delay of one kind (must be non-negative).
    pub fn set_delay(&mut self, kind: GateKind, delay: f64) -> Result<()> {
        if !(delay >= 0.0) {
            return Err(Error::Parse(format!(
                "delay for {kind} must be non-negative, got {delay}"
            )));
        }
        self.delays[kind as usize] = delay;
        Ok(())
    }

    /// Parse a model from `KIND = delay` lines (TOML key/value text).
    /// Keys not present keep their default value.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e| Error::Parse(format!("delay model: {e}")))?;
        let mut model = DelayModel::default();
        for (key, value) in table {
            let kind = GateKind::from_name(&key)
                .ok_or_else(|| Error::Parse(format!("delay model: unknown gate kind {key}")))?;
            let d = toml_number(&value)
                .ok_or_else(|| Error::Parse(format!("delay model: bad value for {key}")))?;
            model.set_delay(kind, d)?;
        }
        Ok(model)
    }

    /// Read a model file.
    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    /// Carry propagation time of one full adder under this model:
    /// the longest cin-to-carry path of the FA decomposition.
    /// Not hard-coded; probed on the actual macro netlist.
    pub fn fa_carry_delay(&self) -> f64 {
        let (nl, _, cout) = fa_probe();
        let cin = nl.inputs()[2];
        longest_path_delay(&nl, cin, crate::netlist::NetId(cout as u32), self)
            .expect("probe netlist")
            .expect("cin reaches cout")
    }

    /// Input-to-sum time of one full adder under this model.
    pub fn fa_sum_delay(&self) -> f64 {
        let (nl, sum, _) = fa_probe();
        let arr = sta_arrival(&nl, &[0.0, 0.0, 0.0], self).expect("probe netlist");
        arr[sum]
    }

    /// Default flatness tolerance for profile shape checks: half a
    /// full-adder carry delay.
    pub fn default_epsilon(&self) -> f64 {
        self.fa_carry_delay() / 2.0
    }
}

fn toml_number(v: &toml::Value) -> Option<f64> {
    match v {
        toml::Value::Integer(i) => Some(*i as f64),
        toml::Value::Float(f) => Some(*f),
        _ => None,
    }
}

/// One-FA probe netlist; returns (netlist, sum net index, carry net index).
/// Longest combinational path delay from `source` to `target`, or
/// `None` if no path exists. Exact sum-of-delays arithmetic (no
/// sentinel arrivals), so probe results subtract cleanly.
pub fn longest_path_delay(
    netlist: &Netlist,
    source: crate::netlist::NetId,
    target: crate::netlist::NetId,
    model: &DelayModel,
) -> Result<Option<f64>> {
    if source.index() >= netlist.net_count() {
        return Err(Error::UnknownNet(source));
    }
    if target.index() >= netlist.net_count() {
        return Err(Error::UnknownNet(target));
    }
    let mut dist = vec![f64::NEG_INFINITY; netlist.net_count()];
    dist[source.index()] = 0.0;
    for &gi in &netlist.topo_order()? {
        let g = &netlist.gates()[gi.index()];
        let best = g
            .fanin
            .iter()
            .map(|f| dist[f.index()])
            .fold(f64::NEG_INFINITY, f64::max);
        if best > f64::NEG_INFINITY {
            let cand = best + model.delay(g.kind);
            if cand > dist[g.out.index()] {
                dist[g.out.index()] = cand;
            }
        }
    }
    let d = dist[target.index()];
    Ok(if d > f64::NEG_INFINITY { Some(d) } else { None })
}

fn fa_probe() -> (Netlist, usize, usize) {
    let mut b = NetlistBuilder::new("fa_probe");
    let a = b.add_input("a");
    let x = b.add_input("b");
    let c = b.add_input("cin");
    let (sum, carry) = b.full_adder(a, x, c).expect("probe build");
    b.add_output(sum).expect("probe build");
    b.add_output(carry).expect("probe build");
    (b.freeze(), sum.index(), carry.index())
}

/// Arrival times at the final-adder inputs, one per CPA column.
#[derive(Debug, Clone, PartialEq)]
pub struct ArrivalProfile {
    arrivals: Vec<f64>,
}

impl ArrivalProfile {
    /// Wrap a column-indexed arrival vector (length 2n, n = operand width).
    pub fn new(arrivals: Vec<f64>) -> Result<Self> {
        if arrivals.is_empty() || arrivals.len() % 2 != 0 {
            return Err(Error::InvalidWidth {
                what: "arrival profile (length must be even 2n)",
                min: 2,
                got: arrivals.len(),
            });
        }
        Ok(ArrivalProfile { arrivals })
    }

    /// Operand width n; the profile spans 2n columns.
    pub fn n(&self) -> usize {
        self.arrivals.len() / 2
    }

    /// Number of columns (2n).
    pub fn len(&self) -> usize {
        self.arrivals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrivals.is_empty()
    }

    /// Column arrivals, LSB first.
    pub fn arrivals(&self) -> &[f64] {
        &self.arrivals
    }

    /// Largest arrival in the profile.
    pub fn max(&self) -> f64 {
        self.arrivals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Render as `bit,arrival` CSV rows.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("bit,arrival\n");
        for (bit, a) in self.arrivals.iter().enumerate() {
            s.push_str(&format!("{bit},{a}\n"));
        }
        s
    }

    /// Parse the `bit,arrival` CSV form.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some("bit,arrival") => {}
            other => {
                return Err(Error::Parse(format!(
                    "profile CSV: expected header 'bit,arrival', got {other:?}"
                )))
            }
        }
        let mut arrivals = Vec::new();
        for (i, line) in lines.enumerate() {
            if line.is_empty() {
                continue;
            }
            let (bit, arrival) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("profile CSV: bad row {line:?}")))?;
            let bit: usize = bit
                .parse()
                .map_err(|_| Error::Parse(format!("profile CSV: bad bit index {bit:?}")))?;
            if bit != i {
                return Err(Error::Parse(format!(
                    "profile CSV: expected bit {i}, got {bit}"
                )));
            }
            let arrival: f64 = arrival
                .parse()
                .map_err(|_| Error::Parse(format!("profile CSV: bad arrival {arrival:?}")))?;
            arrivals.push(arrival);
        }
        ArrivalProfile::new(arrivals)
    }

    /// Write the CSV form to a file.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        Ok(std::fs::write(path, self.to_csv())?)
    }

    /// Read the CSV form from a file.
    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }
}

/// Longest-path arrival time for every net. `input_arrivals` gives one
/// time per primary input, in port order; the constant-zero net is at 0.
pub fn sta_arrival(
    netlist: &Netlist,
    input_arrivals: &[f64],
    model: &DelayModel,
) -> Result<Vec<f64>> {
    if input_arrivals.len() != netlist.inputs().len() {
        return Err(match netlist.inputs().get(input_arrivals.len()) {
            Some(&n) => Error::MissingArrival(n),
            None => Error::WidthMismatch {
                expected: netlist.inputs().len(),
                got: input_arrivals.len(),
            },
        });
    }
    let order = netlist.topo_order()?;
    let mut arrival = vec![0.0f64; netlist.net_count()];
    for (&net, &t) in netlist.inputs().iter().zip(input_arrivals) {
        arrival[net.index()] = t;
    }
    for g in order {
        let gate = &netlist.gates()[g.index()];
        let latest = gate
            .fanin
            .iter()
            .map(|f| arrival[f.index()])
            .fold(f64::NEG_INFINITY, f64::max);
        arrival[gate.out.index()] = model.delay(gate.kind) + latest;
    }
    Ok(arrival)
}

/// Arrival profile seen by the final adder of a multiplier front-end:
/// per column, the later of the two CPA operand rows, with primary
/// inputs at time 0.
pub fn cpa_input_profile(frontend: &MultiplierFrontEnd, model: &DelayModel) -> ArrivalProfile {
    let zeros = vec![0.0; frontend.netlist.inputs().len()];
    let arrival = sta_arrival(&frontend.netlist, &zeros, model).expect("front-end netlist");
    let arrivals = frontend
        .row_a
        .iter()
        .zip(&frontend.row_b)
        .map(|(&a, &b)| arrival[a.index()].max(arrival[b.index()]))
        .collect();
    ArrivalProfile::new(arrivals).expect("front-end rows span 2n columns")
}

/// Completion time of an adder driven by `profile`: feeds arrival
/// `profile[c]` to both operand bits of column c and `cin_arrival` to
/// the carry input, then reports the latest output along with the full
/// per-output arrival vector.
pub fn completion_time(
    adder: &Netlist,
    profile: &ArrivalProfile,
    model: &DelayModel,
    cin_arrival: f64,
) -> Result<(f64, Vec<f64>)> {
    let w = profile.len();
    if adder.inputs().len() != 2 * w + 1 {
        return Err(Error::WidthMismatch {
            expected: 2 * w + 1,
            got: adder.inputs().len(),
        });
    }
    let mut input_arrivals = Vec::with_capacity(2 * w + 1);
    input_arrivals.extend_from_slice(profile.arrivals());
    input_arrivals.extend_from_slice(profile.arrivals());
    input_arrivals.push(cin_arrival);
    let arrival = sta_arrival(adder, &input_arrivals, model)?;
    let outputs: Vec<f64> = adder.outputs().iter().map(|o| arrival[o.index()]).collect();
    let completion = outputs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok((completion, outputs))
}

/// Would a plain ripple chain keep up with the profile over `region`?
/// True iff every successive arrival difference is at least one FA
/// carry delay; the margin is the minimum difference minus that delay
/// (+infinity for a single-bit region).
pub fn rca_sufficiency(
    profile: &ArrivalProfile,
    region: Range<usize>,
    model: &DelayModel,
) -> Result<(bool, f64)> {
    if region.is_empty() {
        return Err(Error::EmptyRegion);
    }
    if region.end > profile.len() {
        return Err(Error::PartitionMismatch(format!(
            "region {}..{} exceeds profile length {}",
            region.start,
            region.end,
            profile.len()
        )));
    }
    let fa_carry = model.fa_carry_delay();
    let arr = profile.arrivals();
    let mut min_diff = f64::INFINITY;
    for i in region.start..region.end - 1 {
        min_diff = min_diff.min(arr[i + 1] - arr[i]);
    }
    Ok((min_diff >= fa_carry, min_diff - fa_carry))
}
