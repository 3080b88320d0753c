//! Area and switching-power estimation from gate histograms and
//! simulated toggle activity.
//!
//! Both tables default to static-CMOS transistor counts, which double
//! as capacitance-proxy power weights. Activity is counted between
//! consecutive uniformly-random input vectors; every vector's bits are
//! derived from its index (one RNG stream per vector), so sharding the
//! simulation across threads cannot change the counts.

use std::path::Path;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netlist::{Evaluator, GateKind, MultiEvaluator, Netlist};

/// Default number of random vectors for activity estimation.
pub const DEFAULT_VECTORS: usize = 2_000;
/// Default activity seed.
pub const DEFAULT_SEED: u64 = 0xDADDA;

/// Per-gate-kind area units and power weights (both positive).
#[derive(Debug, Clone, PartialEq)]
pub struct CostTables {
    area: [f64; 9],
    power: [f64; 9],
}

impl Default for CostTables {
    /// Transistor counts: INV 2, BUF 4, NAND2/NOR2 4, AND2/OR2 6,
    /// XOR2/XNOR2 12, MUX2 12; power weights identical.
    fn default() -> Self {
        let mut t = CostTables {
            area: [0.0; 9],
            power: [0.0; 9],
        };
        for kind in GateKind::ALL {
            let a = match kind {
                GateKind::Inv => 2.0,
                GateKind::Buf => 4.0,
                GateKind::Nand2 | GateKind::Nor2 => 4.0,
                GateKind::And2 | GateKind::Or2 => 6.0,
                GateKind::Xor2 | GateKind::Xnor2 => 12.0,
                GateKind::Mux2 => 12.0,
            };
            t.area[kind as usize] = a;
            t.power[kind as usize] = a;
        }
        t
    }
}

impl CostTables {
    pub fn area_of(&self, kind: GateKind) -> f64 {
        self.area[kind as usize]
    }

    pub fn power_of(&self, kind: GateKind) -> f64 {
        self.power[kind as usize]
    }

    pub fn set_area(&mut self, kind: GateKind, value: f64) -> Result<()> {
        if !(value > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "area for {kind} must be positive, got {value}"
            )));
        }
        self.area[kind as usize] = value;
        Ok(())
    }

    pub fn set_power(&mut self, kind: GateKind, value: f64) -> Result<()> {
        if !(value > 0.0) {
            return Err(Error::InvalidSpec(format!(
                "power weight for {kind} must be positive, got {value}"
            )));
        }
        self.power[kind as usize] = value;
        Ok(())
    }

    /// Load overrides from TOML `[area]` / `[power]` sections keyed by
    /// gate-kind name; unlisted kinds keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<CostTables> {
        let value: toml::Value = text
            .parse()
            .map_err(|e| Error::Parse(format!("cost tables: {e}")))?;
        let table = value
            .as_table()
            .ok_or_else(|| Error::Parse("cost tables: expected a TOML table".into()))?;
        let mut tables = CostTables::default();
        for (section, apply) in [
            ("area", true),
            ("power", false),
        ] {
            let Some(entries) = table.get(section) else {
                continue;
            };
            let entries = entries.as_table().ok_or_else(|| {
                Error::Parse(format!("cost tables: [{section}] must be a table"))
            })?;
            for (key, v) in entries {
                let kind = GateKind::from_name(key)
                    .ok_or_else(|| Error::Parse(format!("cost tables: unknown gate `{key}`")))?;
                let num = v
                    .as_float()
                    .or_else(|| v.as_integer().map(|i| i as f64))
                    .ok_or_else(|| {
                        Error::Parse(format!("cost tables: {section}.{key} must be a number"))
                    })?;
                if apply {
                    tables.set_area(kind, num)?;
                } else {
                    tables.set_power(kind, num)?;
                }
            }
        }
        for (section, _) in table.iter() {
            if section != "area" && section != "power" {
                return Err(Error::Parse(format!(
                    "cost tables: unknown section [{section}]"
                )));
            }
        }
        Ok(tables)
    }

    pub fn from_path(path: &Path) -> Result<CostTables> {
        CostTables::from_toml_str(&std::fs::read_to_string(path)?)
    }
}

/// Total area: sum of per-kind counts times per-kind area.
pub fn area(netlist: &Netlist, tables: &CostTables) -> f64 {
    netlist
        .count_cells()
        .iter()
        .map(|(kind, count)| count as f64 * tables.area_of(kind))
        .sum()
}

/// Per-net toggle counts over a vector sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Activity {
    toggles: Vec<u64>,
    vectors: usize,
}

impl Activity {
    /// Toggles observed on net index `i`.
    pub fn toggles(&self, i: usize) -> u64 {
        self.toggles[i]
    }

    /// Number of vectors simulated (toggles are counted over the
    /// `vectors − 1` transitions between them).
    pub fn vectors(&self) -> usize {
        self.vectors
    }
}

/// Count toggles over an explicit vector sequence (each vector gives
/// the primary inputs in port order). Intended for directed stimuli;
/// use [`estimate_activity`] for random vectors.
pub fn activity_from_vectors(netlist: &Netlist, vectors: &[Vec<bool>]) -> Result<Activity> {
    if vectors.is_empty() {
        return Err(Error::InvalidSpec(
            "activity needs at least one vector".into(),
        ));
    }
    let sim = Evaluator::new(netlist)?;
    let mut toggles = vec![0u64; netlist.net_count()];
    let mut prev: Vec<bool> = Vec::new();
    let mut cur: Vec<bool> = Vec::new();
    for (i, v) in vectors.iter().enumerate() {
        if v.len() != netlist.inputs().len() {
            return Err(Error::WidthMismatch {
                expected: netlist.inputs().len(),
                got: v.len(),
            });
        }
        sim.run(v, &mut cur);
        if i > 0 {
            for (t, (&a, &b)) in toggles.iter_mut().zip(prev.iter().zip(&cur)) {
                *t += u64::from(a != b);
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    Ok(Activity {
        toggles,
        vectors: vectors.len(),
    })
}

/// Input words for a 64-lane chunk: lane `l` carries the bits of
/// vector `start + l`, each vector drawn from its own RNG stream.
fn pack_chunk(seed: u64, start: usize, lanes: usize, words: &mut [u64]) {
    for w in words.iter_mut() {
        *w = 0;
    }
    for lane in 0..lanes {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((start + lane) as u64);
        for w in words.iter_mut() {
            *w |= u64::from(rng.next_u32() & 1) << lane;
        }
    }
}

/// Toggle contribution of one chunk of consecutive vectors.
fn chunk_toggles(
    sim: &MultiEvaluator<'_>,
    width: usize,
    net_count: usize,
    seed: u64,
    start: usize,
    lanes: usize,
) -> Vec<u64> {
    let mut words = vec![0u64; width];
    pack_chunk(seed, start, lanes, &mut words);
    let mut values = Vec::new();
    sim.run(&words, &mut values);
    // Lane l vs lane l+1 is the transition between consecutive vectors;
    // bit j of w ^ (w >> 1) flags transition j -> j+1.
    let mask: u64 = if lanes >= 2 { (1 << (lanes - 1)) - 1 } else { 0 };
    let mut toggles = vec![0u64; net_count];
    for (t, &w) in toggles.iter_mut().zip(&values) {
        *t = u64::from(((w ^ (w >> 1)) & mask).count_ones());
    }
    toggles
}

// Chunk k evaluates lanes [63k, 63k + 63]; lane 0 repeats the last
// vector of the previous chunk so its incoming transition counts.
fn chunk_starts(vector_count: usize) -> Vec<usize> {
    (0..)
        .map(|k| 63 * k)
        .take_while(|&s| s + 1 < vector_count)
        .collect()
}

fn sum_toggles(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Estimate switching activity from `vector_count` uniformly-random
/// input vectors. Deterministic in (netlist, vector_count, seed), and
/// independent of thread count: chunks overlap by one vector so every
/// transition is counted exactly once, and vector bits depend only on
/// the vector index.
pub fn estimate_activity(netlist: &Netlist, vector_count: usize, seed: u64) -> Result<Activity> {
    #[cfg(feature = "parallel")]
    {
        if vector_count < 1 {
            return Err(Error::InvalidSpec(
                "activity needs at least one vector".into(),
            ));
        }
        let sim = MultiEvaluator::new(netlist)?;
        let width = netlist.inputs().len();
        let net_count = netlist.net_count();
        let starts = chunk_starts(vector_count);
        let toggles = starts
            .par_iter()
            .map(|&start| {
                let lanes = 64.min(vector_count - start);
                chunk_toggles(&sim, width, net_count, seed, start, lanes)
            })
            .reduce(|| vec![0u64; net_count], sum_toggles);
        Ok(Activity {
            toggles,
            vectors: vector_count,
        })
    }
    #[cfg(not(feature = "parallel"))]
    estimate_activity_seq(netlist, vector_count, seed)
}

/// Single-threaded reference implementation of [`estimate_activity`];
/// always produces identical counts. Exposed for benchmarking.
#[doc(hidden)]
pub fn estimate_activity_seq(
    netlist: &Netlist,
    vector_count: usize,
    seed: u64,
) -> Result<Activity> {
    if vector_count < 1 {
        return Err(Error::InvalidSpec(
            "activity needs at least one vector".into(),
        ));
    }
    let sim = MultiEvaluator::new(netlist)?;
    let width = netlist.inputs().len();
    let net_count = netlist.net_count();
    let toggles = chunk_starts(vector_count)
        .into_iter()
        .map(|start| {
            let lanes = 64.min(vector_count - start);
            chunk_toggles(&sim, width, net_count, seed, start, lanes)
        })
        .fold(vec![0u64; net_count], sum_toggles);
    Ok(Activity {
        toggles,
        vectors: vector_count,
    })
}

/// Switching-power proxy: per-gate toggles weighted by kind, averaged
/// over the vector count.
pub fn power(netlist: &Netlist, activity: &Activity, tables: &CostTables) -> f64 {
    let total: f64 = netlist
        .gates()
        .iter()
        .map(|g| activity.toggles(g.out.index()) as f64 * tables.power_of(g.kind))
        .sum();
    total / activity.vectors() as f64
}

/// One row of a cost comparison: a design, its completion time under
/// some arrival profile, and its area/power estimates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub name: String,
    pub completion: f64,
    pub area: f64,
    pub power: f64,
    pub seed: u64,
    pub vectors: usize,
}
