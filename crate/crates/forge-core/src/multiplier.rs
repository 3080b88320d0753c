//! Dadda multiplier front-end: partial products and column compression
//! down to the two rows that feed the final carry-propagate adder.

use crate::error::{Error, Result};
use crate::netlist::{Gate, GateId, GateKind, NetId, Netlist, NetlistBuilder};

/// Descending per-stage height targets of a Dadda reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DaddaSchedule {
    heights: Vec<usize>,
}

impl DaddaSchedule {
    /// Stage targets, largest first, ending at 2. Empty for n = 2.
    pub fn heights(&self) -> &[usize] {
        &self.heights
    }

    /// Number of reduction stages.
    pub fn stages(&self) -> usize {
        self.heights.len()
    }
}

/// Dadda's height sequence d1=2, d_{j+1} = floor(1.5 * d_j), cut below
/// the operand width n: the stage targets are all d_j < n, descending.
pub fn dadda_heights(n: usize) -> Result<DaddaSchedule> {
    if n < 2 {
        return Err(Error::InvalidWidth {
            what: "dadda_heights",
            min: 2,
            got: n,
        });
    }
    let mut ascending = Vec::new();
    let mut d = 2usize;
    while d < n {
        ascending.push(d);
        d += d / 2;
    }
    ascending.reverse();
    Ok(DaddaSchedule {
        heights: ascending,
    })
}

/// The n*n AND plane, grouped by product column (bit weight).
#[derive(Debug)]
pub struct PartialProducts {
    pub n: usize,
    /// Column c holds the nets of weight 2^c; 2n-1 columns.
    pub columns: Vec<Vec<NetId>>,
    pub(crate) builder: NetlistBuilder,
}

/// Generate the partial-product plane: inputs a[0..n], b[0..n] and one
/// AND2 per (i, j) pair placed in column i + j.
pub fn gen_partial_products(n: usize) -> Result<PartialProducts> {
    if n < 2 {
        return Err(Error::InvalidWidth {
            what: "gen_partial_products",
            min: 2,
            got: n,
        });
    }
    let mut b = NetlistBuilder::new(&format!("dadda{n}x{n}"));
    let a_bits: Vec<NetId> = (0..n).map(|i| b.add_input(&format!("a{i}"))).collect();
    let b_bits: Vec<NetId> = (0..n).map(|i| b.add_input(&format!("b{i}"))).collect();
    let mut columns: Vec<Vec<NetId>> = vec![Vec::new(); 2 * n - 1];
    for (c, column) in columns.iter_mut().enumerate() {
        let lo = c.saturating_sub(n - 1);
        let hi = c.min(n - 1);
        for i in lo..=hi {
            let net = b.add_gate(GateKind::And2, &[a_bits[i], b_bits[c - i]])?;
            column.push(net);
        }
    }
    Ok(PartialProducts {
        n,
        columns,
        builder: b,
    })
}

/// A reduced multiplier front-end: the netlist up to (and excluding)
/// the final adder, plus the two CPA operand rows spanning columns
/// 0..2n-1. Single-bit columns carry their net in `row_a` with `row_b`
/// tied to the constant-zero pseudo-input; column 2n-1 is fully tied
/// low (it exists only to receive the final adder's carry).
#[derive(Debug)]
pub struct MultiplierFrontEnd {
    pub n: usize,
    pub netlist: Netlist,
    pub row_a: Vec<NetId>,
    pub row_b: Vec<NetId>,
    pub fa_count: usize,
    pub ha_count: usize,
    pub stage_count: usize,
}

/// Run the Dadda reduction over the partial-product columns with the
/// minimal placement rule: per stage, LSB to MSB, place full adders
/// first and at most one half adder, only when the column count plus
/// carries arriving from the column below exceeds the stage target;
/// adder outputs land in the next stage's matrix.
pub fn dadda_reduce(
    pp: PartialProducts,
    schedule: &DaddaSchedule,
) -> Result<MultiplierFrontEnd> {
    let n = pp.n;
    let mut b = pp.builder;
    let mut cols = pp.columns;
    cols.push(Vec::new()); // column 2n-1: receives nothing but keeps indexing uniform
    let width = cols.len();
    let mut fa_count = 0usize;
    let mut ha_count = 0usize;
    for &target in schedule.heights() {
        if target < 2 {
            return Err(Error::ScheduleInconsistent { column: 0, target });
        }
        let mut next: Vec<Vec<NetId>> = vec![Vec::new(); width];
        let mut carries: Vec<NetId> = Vec::new(); // from the column below, this stage
        for c in 0..width {
            let incoming = std::mem::take(&mut carries);
            let have = cols[c].len() + incoming.len();
            let excess = have.saturating_sub(target);
            let fas = excess / 2;
            let has = excess % 2;
            if cols[c].len() < 3 * fas + 2 * has {
                return Err(Error::ScheduleInconsistent { column: c, target });
            }
            let bits = &cols[c];
            let mut produced = Vec::with_capacity(fas + has);
            for i in 0..fas {
                let (sum, carry) = b.full_adder(bits[3 * i], bits[3 * i + 1], bits[3 * i + 2])?;
                produced.push(sum);
                carries.push(carry);
            }
            if has == 1 {
                let (sum, carry) = b.half_adder(bits[3 * fas], bits[3 * fas + 1])?;
                produced.push(sum);
                carries.push(carry);
            }
            next[c].extend_from_slice(&bits[3 * fas + 2 * has..]);
            next[c].extend(produced);
            next[c].extend(incoming);
            fa_count += fas;
            ha_count += has;
        }
        if !carries.is_empty() {
            return Err(Error::ScheduleInconsistent {
                column: width,
                target,
            });
        }
        for (c, col) in next.iter().enumerate() {
            if col.len() > target {
                return Err(Error::ScheduleInconsistent { column: c, target });
            }
        }
        cols = next;
    }

    let mut row_a = Vec::with_capacity(2 * n);
    let mut row_b = Vec::with_capacity(2 * n);
    let const0 = b.const_zero();
    for col in &cols {
        if col.len() > 2 {
            return Err(Error::ScheduleInconsistent {
                column: row_a.len(),
                target: 2,
            });
        }
        row_a.push(col.first().copied().unwrap_or(const0));
        row_b.push(col.get(1).copied().unwrap_or(const0));
    }
    for &net in row_a.iter().chain(&row_b) {
        b.add_output(net)?;
    }
    Ok(MultiplierFrontEnd {
        n,
        netlist: b.freeze(),
        row_a,
        row_b,
        fa_count,
        ha_count,
        stage_count: schedule.stages(),
    })
}

/// Generate partial products, run the Dadda reduction, and optionally
/// bound every primary input's fanout with buffer trees.
pub fn build_front_end(n: usize, max_fanout: Option<usize>) -> Result<MultiplierFrontEnd> {
    if !(2..=64).contains(&n) {
        return Err(Error::InvalidSpec(format!(
            "multiplier width must be in 2..=64, got {n}"
        )));
    }
    let schedule = dadda_heights(n)?;
    let pp = gen_partial_products(n)?;
    let mut fe = dadda_reduce(pp, &schedule)?;
    if let Some(mf) = max_fanout {
        let inputs = fe.netlist.inputs().to_vec();
        for net in inputs {
            fe.netlist = insert_buffer_tree(&fe.netlist, net, mf)?;
        }
    }
    Ok(fe)
}

/// Feed a front-end's two CPA rows into a final adder, producing the
/// complete multiplier: inputs `a0..`, `b0..`; outputs `p0..p{2n-1}`
/// plus the adder's carry-out (structurally always low — the product
/// fits in 2n bits). The adder must span 2n bits; its carry-in is tied
/// to constant zero, with no folding of the tied-low row bits.
pub fn attach_cpa(fe: &MultiplierFrontEnd, adder: &Netlist) -> Result<Netlist> {
    let n = fe.n;
    if adder.inputs().len() != 4 * n + 1 || adder.outputs().len() != 2 * n + 1 {
        return Err(Error::InvalidSpec(format!(
            "final adder must span {} bits (got {} inputs / {} outputs)",
            2 * n,
            adder.inputs().len(),
            adder.outputs().len()
        )));
    }
    let mut b = NetlistBuilder::new(&format!("mult{n}x{n}_{}", adder.name()));
    let a_in: Vec<NetId> = (0..n).map(|i| b.add_input(&format!("a{i}"))).collect();
    let b_in: Vec<NetId> = (0..n).map(|i| b.add_input(&format!("b{i}"))).collect();
    let bindings: Vec<NetId> = a_in.iter().chain(&b_in).copied().collect();
    let rows = b.import(&fe.netlist, &bindings)?;
    let mut adder_in = rows; // row_a then row_b, already CPA port order
    adder_in.push(b.const_zero());
    let outs = b.import(adder, &adder_in)?;
    for (i, &o) in outs.iter().enumerate() {
        if i < 2 * n {
            b.name_net(o, &format!("p{i}"))?;
        } else {
            b.name_net(o, "cout")?;
        }
        b.add_output(o)?;
    }
    Ok(b.freeze())
}

/// Convenience: build the front-end and attach a freshly generated
/// final adder of the given kind.
pub fn build_multiplier(
    n: usize,
    max_fanout: Option<usize>,
    kind: crate::adders::AdderKind,
    block: Option<usize>,
) -> Result<Netlist> {
    let fe = build_front_end(n, max_fanout)?;
    let adder = crate::adders::gen_adder(&crate::adders::AdderSpec {
        kind,
        width: 2 * n,
        block,
    })?;
    attach_cpa(&fe, &adder)
}

/// Rewire the sinks of `net` through a balanced tree of BUF gates so
/// that no driver (the net itself or any buffer) feeds more than
/// `max_fanout` fanin slots. A net within bound is returned unchanged.
pub fn insert_buffer_tree(netlist: &Netlist, net: NetId, max_fanout: usize) -> Result<Netlist> {
    if max_fanout < 2 {
        return Err(Error::InvalidSpec(format!(
            "max_fanout must be at least 2, got {max_fanout}"
        )));
    }
    if net.index() >= netlist.net_count() {
        return Err(Error::UnknownNet(net));
    }
    let mut sinks: Vec<(usize, usize)> = Vec::new();
    for (gi, g) in netlist.gates().iter().enumerate() {
        for (slot, &f) in g.fanin.iter().enumerate() {
            if f == net {
                sinks.push((gi, slot));
            }
        }
    }
    if sinks.len() <= max_fanout {
        return Ok(netlist.clone());
    }

    // Level sizes bottom-up: enough leaves for the sinks, then enough
    // parents for the leaves, until a single root remains.
    let mut level_sizes = vec![sinks.len().div_ceil(max_fanout)];
    while *level_sizes.last().unwrap() > 1 {
        level_sizes.push(level_sizes.last().unwrap().div_ceil(max_fanout));
    }

    let mut nl = netlist.clone();
    let add_buf = |nl: &mut Netlist, from: NetId| -> NetId {
        let out = NetId(nl.net_count as u32);
        nl.net_count += 1;
        let id = GateId(nl.gates.len() as u32);
        nl.gates.push(Gate {
            id,
            kind: GateKind::Buf,
            fanin: vec![from],
            out,
        });
        out
    };

    // Emit top-down so every buffer's driver already exists.
    let mut parents = vec![net];
    for &size in level_sizes.iter().rev() {
        let mut level = Vec::with_capacity(size);
        for i in 0..size {
            level.push(add_buf(&mut nl, parents[i / max_fanout]));
        }
        parents = level;
    }
    for (i, &(gi, slot)) in sinks.iter().enumerate() {
        nl.gates[gi].fanin[slot] = parents[i / max_fanout];
    }
    nl.validate()?;
    Ok(nl)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::BitAssignment;

    #[test]
    fn dadda_heights_matches_recurrence() {
        assert_eq!(dadda_heights(8).unwrap().heights(), &[6, 4, 3, 2]);
        assert_eq!(dadda_heights(16).unwrap().heights(), &[13, 9, 6, 4, 3, 2]);
        assert_eq!(
            dadda_heights(64).unwrap().heights(),
            &[63, 42, 28, 19, 13, 9, 6, 4, 3, 2]
        );
        assert_eq!(dadda_heights(32).unwrap().stages(), 8);
        assert!(dadda_heights(2).unwrap().heights().is_empty());
        assert!(dadda_heights(1).is_err());
    }

    #[test]
    fn partial_product_columns_are_diamond_shaped() {
        let pp = gen_partial_products(2).unwrap();
        let heights: Vec<usize> = pp.columns.iter().map(Vec::len).collect();
        assert_eq!(heights, vec![1, 2, 1]);

        let pp = gen_partial_products(8).unwrap();
        let heights: Vec<usize> = pp.columns.iter().map(Vec::len).collect();
        let expect: Vec<usize> = (0..15).map(|c| (c + 1).min(8).min(15 - c)).collect();
        assert_eq!(heights, expect);
        assert_eq!(heights.iter().sum::<usize>(), 64);
        assert!(gen_partial_products(1).is_err());
    }

    #[test]
    fn partial_products_weighted_sum_is_the_product() {
        let n = 3;
        let pp = gen_partial_products(n).unwrap();
        let columns = pp.columns.clone();
        let nl = pp.builder.freeze();
        let (a, b) = (3u64, 3u64);
        let mut bits = Vec::new();
        for i in 0..n {
            bits.push((a >> i) & 1 == 1);
        }
        for i in 0..n {
            bits.push((b >> i) & 1 == 1);
        }
        let stim = BitAssignment::set_inputs(&nl, &bits).unwrap();
        let vals = nl.evaluate(&stim).unwrap();
        let mut total = 0u64;
        for (c, col) in columns.iter().enumerate() {
            for &net in col {
                if vals.get(net).unwrap() {
                    total += 1 << c;
                }
            }
        }
        assert_eq!(total, a * b);
    }

    /// Integer oracle: weighted sum of the two CPA rows must equal a*b.
    fn rows_value(fe: &MultiplierFrontEnd, a: u64, b: u64) -> u128 {
        let n = fe.n;
        let mut bits = Vec::with_capacity(2 * n);
        for i in 0..n {
            bits.push((a >> i) & 1 == 1);
        }
        for i in 0..n {
            bits.push((b >> i) & 1 == 1);
        }
        let stim = BitAssignment::set_inputs(&fe.netlist, &bits).unwrap();
        let vals = fe.netlist.evaluate(&stim).unwrap();
        let mut total = 0u128;
        for (c, (&ra, &rb)) in fe.row_a.iter().zip(&fe.row_b).enumerate() {
            if vals.get(ra).unwrap() {
                total += 1 << c;
            }
            if vals.get(rb).unwrap() {
                total += 1 << c;
            }
        }
        total
    }

    #[test]
    fn four_bit_reduction_uses_three_has_and_three_fas() {
        let fe = build_front_end(4, None).unwrap();
        assert_eq!(fe.ha_count, 3);
        assert_eq!(fe.fa_count, 3);
        assert_eq!(fe.stage_count, 2);
        assert_eq!(fe.row_a.len(), 8);
        assert_eq!(fe.row_b.len(), 8);
        for a in 0..16u64 {
            for b in 0..16u64 {
                assert_eq!(rows_value(&fe, a, b), (a * b) as u128, "{a}*{b}");
            }
        }
    }

    #[test]
    fn eight_bit_counts_are_stable() {
        let fe1 = build_front_end(8, None).unwrap();
        let fe2 = build_front_end(8, None).unwrap();
        assert_eq!((fe1.fa_count, fe1.ha_count), (fe2.fa_count, fe2.ha_count));
        assert_eq!(fe1.netlist, fe2.netlist);
        // The minimal placement rule fixes these counts.
        assert_eq!(fe1.fa_count, 35);
        assert_eq!(fe1.ha_count, 7);
    }

    #[test]
    fn sixteen_bit_rows_match_the_integer_oracle() {
        use rand::{Rng, SeedableRng};
        let fe = build_front_end(16, None).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(16);
        for _ in 0..10_000 {
            let a: u64 = rng.gen_range(0..1 << 16);
            let b: u64 = rng.gen_range(0..1 << 16);
            assert_eq!(rows_value(&fe, a, b), (a * b) as u128, "{a}*{b}");
        }
    }

    #[test]
    fn buffer_tree_shape_16_sinks_fanout_4() {
        let mut b = NetlistBuilder::new("t");
        let x = b.add_input("x");
        let mut outs = Vec::new();
        for _ in 0..16 {
            outs.push(b.add_gate(GateKind::Inv, &[x]).unwrap());
        }
        for o in outs {
            b.add_output(o).unwrap();
        }
        let nl = b.freeze();
        let buffered = insert_buffer_tree(&nl, x, 4).unwrap();
        assert_eq!(buffered.count_cells().get(GateKind::Buf), 5);
        let fanout = buffered.fanout_counts();
        assert_eq!(fanout[x.index()], 1, "root buffer is the only sink");
        for g in buffered.gates() {
            if g.kind == GateKind::Buf {
                assert!(fanout[g.out.index()] <= 4);
            }
        }
    }

    #[test]
    fn buffer_tree_under_bound_is_a_no_op() {
        let mut b = NetlistBuilder::new("t");
        let x = b.add_input("x");
        for _ in 0..3 {
            let o = b.add_gate(GateKind::Inv, &[x]).unwrap();
            b.add_output(o).unwrap();
        }
        let nl = b.freeze();
        let same = insert_buffer_tree(&nl, x, 4).unwrap();
        assert_eq!(nl, same);
        assert!(insert_buffer_tree(&nl, x, 1).is_err());
    }

    #[test]
    fn full_multiplier_is_exhaustively_correct_at_4x4() {
        use crate::adders::AdderKind;
        let nl = build_multiplier(4, None, AdderKind::Rca, None).unwrap();
        assert_eq!(nl.inputs().len(), 8);
        assert_eq!(nl.outputs().len(), 9);
        for a in 0..16u64 {
            for b in 0..16u64 {
                let bits: Vec<bool> = (0..4)
                    .map(|i| (a >> i) & 1 == 1)
                    .chain((0..4).map(|i| (b >> i) & 1 == 1))
                    .collect();
                let stim = BitAssignment::set_inputs(&nl, &bits).unwrap();
                let vals = nl.evaluate(&stim).unwrap();
                let mut got = 0u64;
                for (i, &o) in nl.outputs().iter().enumerate() {
                    if vals.get(o).unwrap() {
                        got |= 1 << i;
                    }
                }
                assert_eq!(got, a * b, "{a}*{b}");
            }
        }
    }

    #[test]
    fn buffered_front_end_keeps_function_and_bounds_fanout() {
        use rand::{Rng, SeedableRng};
        let plain = build_front_end(8, None).unwrap();
        let buffered = build_front_end(8, Some(4)).unwrap();
        let fanout = buffered.netlist.fanout_counts();
        for &input in buffered.netlist.inputs() {
            assert!(fanout[input.index()] <= 4);
        }
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(84);
        for _ in 0..1_000 {
            let a: u64 = rng.gen_range(0..256);
            let b: u64 = rng.gen_range(0..256);
            assert_eq!(rows_value(&plain, a, b), rows_value(&buffered, a, b));
        }
    }
}
