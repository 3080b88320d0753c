//! Carry-propagate adder generators: ripple, lookahead, and the
//! carry-select family (plain and BEC-based), plus hybrid composition
//! of different architectures over contiguous bit regions.
//!
//! All adders share one port convention: inputs `a0..a{w-1}`,
//! `b0..b{w-1}`, `cin`; outputs `s0..s{w-1}`, `cout`.
//!
//! Naming note: `CSA` here is a *uniform-block dual-RCA carry-select*
//! adder (block width 4), not a 3:2 carry-save compressor. It is kept
//! distinct from `CSLA`, the square-root variable-block carry-select
//! adder, because the two occupy different cost points. `BCSA`/`BCSLA`
//! are the same structures with the cin=1 ripple copy replaced by a
//! binary-to-excess-1 converter (BEC) fed from the cin=0 copy, and
//! `BCLA` uses a lookahead core per block with a BEC for the cin=1
//! result.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{GateKind, NetId, Netlist, NetlistBuilder};
use crate::partition::RegionPartition;

/// The adder architectures this crate can generate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum AdderKind {
    Rca,
    Csa,
    Cla,
    Csla,
    Bcsa,
    Bcla,
    Bcsla,
    /// Composed per-region; build with [`compose_hybrid`].
    Hybrid,
}

impl AdderKind {
    /// Every monolithic kind (everything except `Hybrid`).
    pub const MONOLITHIC: [AdderKind; 7] = [
        AdderKind::Rca,
        AdderKind::Csa,
        AdderKind::Cla,
        AdderKind::Csla,
        AdderKind::Bcsa,
        AdderKind::Bcla,
        AdderKind::Bcsla,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AdderKind::Rca => "RCA",
            AdderKind::Csa => "CSA",
            AdderKind::Cla => "CLA",
            AdderKind::Csla => "CSLA",
            AdderKind::Bcsa => "BCSA",
            AdderKind::Bcla => "BCLA",
            AdderKind::Bcsla => "BCSLA",
            AdderKind::Hybrid => "HYBRID",
        }
    }

    pub fn from_name(s: &str) -> Result<AdderKind> {
        let up = s.to_ascii_uppercase();
        for k in AdderKind::MONOLITHIC {
            if k.name() == up {
                return Ok(k);
            }
        }
        if up == "HYBRID" {
            return Ok(AdderKind::Hybrid);
        }
        Err(Error::Parse(format!("unknown adder kind `{s}`")))
    }
}

impl std::fmt::Display for AdderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// What to generate: an architecture, a width, and (for the
/// uniform-block kinds CSA/CLA/BCSA) an optional block width override.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdderSpec {
    pub kind: AdderKind,
    pub width: usize,
    pub block: Option<usize>,
}

impl AdderSpec {
    pub fn new(kind: AdderKind, width: usize) -> Self {
        AdderSpec {
            kind,
            width,
            block: None,
        }
    }

    pub fn with_block(mut self, block: usize) -> Self {
        self.block = Some(block);
        self
    }
}

/// Default block width for the uniform-block kinds.
pub const DEFAULT_BLOCK: usize = 4;

/// Square-root block schedule: widths 2, 3, 4, ... ascending from the
/// LSB; the remainder becomes its own final block if that keeps the
/// list non-descending, otherwise it folds into the last block.
pub fn sqrt_block_sizes(width: usize) -> Result<Vec<usize>> {
    if width < 2 {
        return Err(Error::InvalidWidth {
            what: "sqrt_block_sizes",
            min: 2,
            got: width,
        });
    }
    let mut sizes = Vec::new();
    let mut total = 0usize;
    let mut k = 2usize;
    while total + k <= width {
        sizes.push(k);
        total += k;
        k += 1;
    }
    let rem = width - total;
    if rem > 0 {
        if rem >= *sizes.last().unwrap() {
            sizes.push(rem);
        } else {
            *sizes.last_mut().unwrap() += rem;
        }
    }
    Ok(sizes)
}

/// Uniform block schedule: `block`-wide blocks from the LSB, with the
/// remainder folded into the last block.
pub fn uniform_blocks(width: usize, block: usize) -> Result<Vec<usize>> {
    if width < 1 {
        return Err(Error::InvalidWidth {
            what: "uniform_blocks",
            min: 1,
            got: width,
        });
    }
    if block < 1 {
        return Err(Error::InvalidWidth {
            what: "uniform block width",
            min: 1,
            got: block,
        });
    }
    if width < block {
        return Ok(vec![width]);
    }
    let mut sizes = vec![block; width / block];
    *sizes.last_mut().unwrap() += width % block;
    Ok(sizes)
}

/// A carry value threaded between adder cells: a known constant (which
/// lets the first cell fold away) or a live net.
#[derive(Debug, Clone, Copy)]
enum Carry {
    Zero,
    One,
    Net(NetId),
}

/// One ripple cell: sum and carry-out of (a, b, cin). Constant carries
/// fold to the half-adder forms.
fn ripple_cell(b: &mut NetlistBuilder, x: NetId, y: NetId, cin: Carry) -> Result<(NetId, Carry)> {
    Ok(match cin {
        Carry::Zero => {
            let s = b.add_gate(GateKind::Xor2, &[x, y])?;
            let c = b.add_gate(GateKind::And2, &[x, y])?;
            (s, Carry::Net(c))
        }
        Carry::One => {
            let s = b.add_gate(GateKind::Xnor2, &[x, y])?;
            let c = b.add_gate(GateKind::Or2, &[x, y])?;
            (s, Carry::Net(c))
        }
        Carry::Net(c) => {
            let (s, co) = b.full_adder(x, y, c)?;
            (s, Carry::Net(co))
        }
    })
}

/// Ripple-carry chain over paired bit slices.
fn rca_bits(
    b: &mut NetlistBuilder,
    a: &[NetId],
    bb: &[NetId],
    cin: Carry,
) -> Result<(Vec<NetId>, Carry)> {
    let mut sums = Vec::with_capacity(a.len());
    let mut carry = cin;
    for (&x, &y) in a.iter().zip(bb) {
        let (s, c) = ripple_cell(b, x, y, carry)?;
        sums.push(s);
        carry = c;
    }
    Ok((sums, carry))
}

/// One carry-lookahead block: generate/propagate per bit, then each
/// carry as an explicit sum of products over the g/p terms (parallel
/// product chains rather than a ripple through carry nets).
fn cla_block(
    b: &mut NetlistBuilder,
    a: &[NetId],
    bb: &[NetId],
    cin: Carry,
) -> Result<(Vec<NetId>, Carry)> {
    let k = a.len();
    let mut g = Vec::with_capacity(k);
    let mut p = Vec::with_capacity(k);
    for (&x, &y) in a.iter().zip(bb) {
        g.push(b.add_gate(GateKind::And2, &[x, y])?);
        p.push(b.add_gate(GateKind::Xor2, &[x, y])?);
    }
    let mut carries = Vec::with_capacity(k + 1);
    carries.push(cin);
    for i in 0..k {
        // c_{i+1} = g_i + p_i g_{i-1} + p_i p_{i-1} g_{i-2} + ... + (p_i..p_0) c_0
        let mut terms = vec![g[i]];
        let mut prod = p[i];
        for j in (0..i).rev() {
            terms.push(b.add_gate(GateKind::And2, &[prod, g[j]])?);
            prod = b.add_gate(GateKind::And2, &[prod, p[j]])?;
        }
        match cin {
            Carry::Zero => {}
            Carry::One => terms.push(prod),
            Carry::Net(c0) => terms.push(b.add_gate(GateKind::And2, &[prod, c0])?),
        }
        let mut acc = terms[0];
        for &t in &terms[1..] {
            acc = b.add_gate(GateKind::Or2, &[acc, t])?;
        }
        carries.push(Carry::Net(acc));
    }
    let mut sums = Vec::with_capacity(k);
    for i in 0..k {
        let s = match carries[i] {
            Carry::Zero => p[i],
            Carry::One => b.add_gate(GateKind::Inv, &[p[i]])?,
            Carry::Net(c) => b.add_gate(GateKind::Xor2, &[p[i], c])?,
        };
        sums.push(s);
    }
    Ok((sums, carries[k]))
}

/// Inlined binary-to-excess-1 chain: outputs `in + 1 mod 2^w`, no
/// overflow gate (select-based adders never need it).
fn bec_bits(b: &mut NetlistBuilder, ins: &[NetId]) -> Result<Vec<NetId>> {
    let mut outs = Vec::with_capacity(ins.len());
    outs.push(b.add_gate(GateKind::Inv, &[ins[0]])?);
    let mut chain = ins[0];
    for (i, &x) in ins.iter().enumerate().skip(1) {
        outs.push(b.add_gate(GateKind::Xor2, &[x, chain])?);
        if i + 1 < ins.len() {
            chain = b.add_gate(GateKind::And2, &[chain, x])?;
        }
    }
    Ok(outs)
}

/// Core used for the cin=0 copy inside a select block.
#[derive(Clone, Copy)]
enum SelectCore {
    Ripple,
    Lookahead,
}

/// One carry-select block: precompute both carry assumptions, pick
/// with MUX2s driven by the incoming block carry. The cin=1 result
/// comes from a second core or, with `bec`, from a BEC over the cin=0
/// sums and carry.
fn select_block(
    b: &mut NetlistBuilder,
    a: &[NetId],
    bb: &[NetId],
    sel: NetId,
    core: SelectCore,
    bec: bool,
) -> Result<(Vec<NetId>, Carry)> {
    let build = |b: &mut NetlistBuilder, cin: Carry| -> Result<(Vec<NetId>, Carry)> {
        match core {
            SelectCore::Ripple => rca_bits(b, a, bb, cin),
            SelectCore::Lookahead => cla_block(b, a, bb, cin),
        }
    };
    let (s0, c0) = build(b, Carry::Zero)?;
    let c0 = match c0 {
        Carry::Net(n) => n,
        _ => unreachable!("non-empty block always produces a carry net"),
    };
    let (s1, c1) = if bec {
        let mut bec_in = s0.clone();
        bec_in.push(c0);
        let mut out = bec_bits(b, &bec_in)?;
        let c1 = out.pop().unwrap();
        (out, c1)
    } else {
        let (s1, c1) = build(b, Carry::One)?;
        let c1 = match c1 {
            Carry::Net(n) => n,
            _ => unreachable!("non-empty block always produces a carry net"),
        };
        (s1, c1)
    };
    let mut sums = Vec::with_capacity(a.len());
    for (&z, &o) in s0.iter().zip(&s1) {
        sums.push(b.add_gate(GateKind::Mux2, &[sel, z, o])?);
    }
    let cout = b.add_gate(GateKind::Mux2, &[sel, c0, c1])?;
    Ok((sums, Carry::Net(cout)))
}

/// Block schedule for one architecture over `width` bits.
fn block_plan(kind: AdderKind, width: usize, block: Option<usize>) -> Result<Vec<usize>> {
    match kind {
        AdderKind::Rca => Ok(vec![width]),
        AdderKind::Csa | AdderKind::Cla | AdderKind::Bcsa => {
            uniform_blocks(width, block.unwrap_or(DEFAULT_BLOCK))
        }
        AdderKind::Csla | AdderKind::Bcsla | AdderKind::Bcla => sqrt_block_sizes(width),
        AdderKind::Hybrid => Err(Error::InvalidSpec(
            "HYBRID has no block plan; use compose_hybrid".into(),
        )),
    }
}

/// Append one architecture over the given bit slices, threading the
/// carry. This is the shared engine behind [`gen_adder`] and
/// [`compose_hybrid`].
fn build_kind(
    b: &mut NetlistBuilder,
    kind: AdderKind,
    a: &[NetId],
    bb: &[NetId],
    cin: NetId,
    block: Option<usize>,
) -> Result<(Vec<NetId>, NetId)> {
    let plan = block_plan(kind, a.len(), block)?;
    let mut sums = Vec::with_capacity(a.len());
    let mut carry = cin;
    let mut lo = 0usize;
    for w in plan {
        let (ax, bx) = (&a[lo..lo + w], &bb[lo..lo + w]);
        let (s, c) = match kind {
            AdderKind::Rca => rca_bits(b, ax, bx, Carry::Net(carry))?,
            AdderKind::Cla => cla_block(b, ax, bx, Carry::Net(carry))?,
            AdderKind::Csla | AdderKind::Csa => {
                select_block(b, ax, bx, carry, SelectCore::Ripple, false)?
            }
            AdderKind::Bcsla | AdderKind::Bcsa => {
                select_block(b, ax, bx, carry, SelectCore::Ripple, true)?
            }
            AdderKind::Bcla => select_block(b, ax, bx, carry, SelectCore::Lookahead, true)?,
            AdderKind::Hybrid => unreachable!("rejected by block_plan"),
        };
        sums.extend(s);
        carry = match c {
            Carry::Net(n) => n,
            _ => unreachable!("blocks with a net carry-in produce a net carry-out"),
        };
        lo += w;
    }
    Ok((sums, carry))
}

/// Generate one monolithic adder from an [`AdderSpec`]. Inputs are
/// `a0..a{w-1}, b0..b{w-1}, cin`; outputs `s0..s{w-1}, cout`.
pub fn gen_adder(spec: &AdderSpec) -> Result<Netlist> {
    if spec.kind == AdderKind::Hybrid {
        return Err(Error::InvalidSpec(
            "HYBRID is composed per region; use compose_hybrid".into(),
        ));
    }
    if spec.width < 1 {
        return Err(Error::InvalidWidth {
            what: "adder width",
            min: 1,
            got: spec.width,
        });
    }
    if spec.block.is_some()
        && !matches!(spec.kind, AdderKind::Csa | AdderKind::Cla | AdderKind::Bcsa)
    {
        return Err(Error::InvalidSpec(format!(
            "block width applies only to the uniform-block kinds (CSA/CLA/BCSA), not {}",
            spec.kind
        )));
    }
    let w = spec.width;
    let mut b = NetlistBuilder::new(&format!("{}{}", spec.kind.name().to_lowercase(), w));
    let a: Vec<NetId> = (0..w).map(|i| b.add_input(&format!("a{i}"))).collect();
    let bb: Vec<NetId> = (0..w).map(|i| b.add_input(&format!("b{i}"))).collect();
    let cin = b.add_input("cin");
    let (sums, cout) = build_kind(&mut b, spec.kind, &a, &bb, cin, spec.block)?;
    for (i, &s) in sums.iter().enumerate() {
        b.name_net(s, &format!("s{i}"))?;
        b.add_output(s)?;
    }
    b.name_net(cout, "cout")?;
    b.add_output(cout)?;
    Ok(b.freeze())
}

/// Generate a standalone binary-to-excess-1 converter. Inputs
/// `in0..in{w-1}`; outputs `out0..out{w-1}` = in+1 mod 2^w, then
/// `overflow` = AND of all inputs.
pub fn gen_bec(width: usize) -> Result<Netlist> {
    if width < 1 {
        return Err(Error::InvalidWidth {
            what: "bec width",
            min: 1,
            got: width,
        });
    }
    let mut b = NetlistBuilder::new(&format!("bec{width}"));
    let ins: Vec<NetId> = (0..width).map(|i| b.add_input(&format!("in{i}"))).collect();
    let outs = bec_bits(&mut b, &ins)?;
    let mut overflow = ins[0];
    for &x in &ins[1..] {
        overflow = b.add_gate(GateKind::And2, &[overflow, x])?;
    }
    for (i, &o) in outs.iter().enumerate() {
        b.name_net(o, &format!("out{i}"))?;
        b.add_output(o)?;
    }
    b.name_net(overflow, "overflow")?;
    b.add_output(overflow)?;
    Ok(b.freeze())
}

/// Stitch one adder architecture per region into a single CPA: each
/// region's carry-out feeds the next region's carry-in (for
/// select-based regions that carry drives the block MUX2 selects).
pub fn compose_hybrid(partition: &RegionPartition, kinds: &[AdderKind]) -> Result<Netlist> {
    let regions = partition.regions();
    if regions.is_empty() {
        return Err(Error::PartitionMismatch("partition has no regions".into()));
    }
    if regions.len() != kinds.len() {
        return Err(Error::PartitionMismatch(format!(
            "{} non-empty regions but {} kinds",
            regions.len(),
            kinds.len()
        )));
    }
    let w = partition.width();
    let mut b = NetlistBuilder::new(&format!("hybrid{w}"));
    let a: Vec<NetId> = (0..w).map(|i| b.add_input(&format!("a{i}"))).collect();
    let bb: Vec<NetId> = (0..w).map(|i| b.add_input(&format!("b{i}"))).collect();
    let cin = b.add_input("cin");
    let mut sums = Vec::with_capacity(w);
    let mut carry = cin;
    for (range, &kind) in regions.iter().zip(kinds) {
        if kind == AdderKind::Hybrid {
            return Err(Error::InvalidSpec(
                "regions must use monolithic kinds, not HYBRID".into(),
            ));
        }
        let (s, c) = build_kind(
            &mut b,
            kind,
            &a[range.clone()],
            &bb[range.clone()],
            carry,
            None,
        )?;
        sums.extend(s);
        carry = c;
    }
    for (i, &s) in sums.iter().enumerate() {
        b.name_net(s, &format!("s{i}"))?;
        b.add_output(s)?;
    }
    b.name_net(carry, "cout")?;
    b.add_output(carry)?;
    Ok(b.freeze())
}
