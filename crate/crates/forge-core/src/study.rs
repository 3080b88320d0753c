//! Pipeline orchestration: functional verification against integer
//! oracles, and the multi-width comparison study with its JSON and CSV
//! artifacts.

use std::path::{Path, PathBuf};

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adders::{compose_hybrid, gen_adder, AdderKind, AdderSpec};
use crate::costmodel::{
    area, estimate_activity, power, CostReport, CostTables, DEFAULT_SEED, DEFAULT_VECTORS,
};
use crate::error::{Error, Result};
use crate::multiplier::build_front_end;
use crate::netlist::{MultiEvaluator, Netlist};
use crate::partition::{
    closed_form_partition, compare_table, detect_regions, recommend, DivergenceReport,
    RegionPartition, RegionRecommendation,
};
use crate::timing::{completion_time, cpa_input_profile, ArrivalProfile, DelayModel};

/// Which integer function a netlist is checked against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// `a * b`: accepts a bare front-end (two output rows summing to
    /// the product) or a complete multiplier (product bits + carry).
    Mult,
    /// `a + b + cin` with the shared adder port convention.
    Add,
}

impl OracleKind {
    pub fn from_name(s: &str) -> Result<OracleKind> {
        match s.to_ascii_lowercase().as_str() {
            "mult" => Ok(OracleKind::Mult),
            "add" => Ok(OracleKind::Add),
            _ => Err(Error::Parse(format!("unknown oracle `{s}`"))),
        }
    }
}

/// Stimulus strategy for [`verify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every input combination, in ascending index order (the first
    /// failure is therefore the minimal one).
    Exhaustive,
    /// Corner patterns (all-zeros, all-ones, both alternating phases)
    /// followed by `count` seeded uniform vectors.
    Random { count: usize, seed: u64 },
}

/// The first failing stimulus, decoded into operands. Values wider
/// than 128 bits are recorded modulo 2^128; `inputs` is exact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub index: u64,
    pub inputs: Vec<bool>,
    pub a: u128,
    pub b: u128,
    pub cin: Option<bool>,
    pub expected: u128,
    pub got: u128,
}

impl std::fmt::Display for Counterexample {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "vector {}: a={:#x} b={:#x}", self.index, self.a, self.b)?;
        if let Some(c) = self.cin {
            write!(f, " cin={}", u8::from(c))?;
        }
        write!(f, " expected {:#x}, got {:#x}", self.expected, self.got)
    }
}

/// Result of a [`verify`] run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyOutcome {
    pub pass: bool,
    pub cases: u64,
    pub counterexample: Option<Counterexample>,
}

#[derive(Debug, Clone, Copy)]
enum PortShape {
    Adder { width: usize },
    FrontEnd { n: usize },
    FullMult { n: usize },
}

fn classify(netlist: &Netlist, oracle: OracleKind) -> Result<PortShape> {
    let ins = netlist.inputs().len();
    let outs = netlist.outputs().len();
    match oracle {
        OracleKind::Add => {
            if ins >= 3 && ins % 2 == 1 && outs == (ins - 1) / 2 + 1 && ins <= 257 {
                Ok(PortShape::Adder {
                    width: (ins - 1) / 2,
                })
            } else {
                Err(Error::InvalidSpec(format!(
                    "adder oracle needs 2w+1 inputs and w+1 outputs (w <= 128), got {ins}/{outs}"
                )))
            }
        }
        OracleKind::Mult => {
            if ins >= 4 && ins % 2 == 0 && ins <= 128 {
                let n = ins / 2;
                if outs == 4 * n {
                    return Ok(PortShape::FrontEnd { n });
                }
                if outs == 2 * n + 1 {
                    return Ok(PortShape::FullMult { n });
                }
            }
            Err(Error::InvalidSpec(format!(
                "multiplier oracle needs 2n inputs (n <= 64) and 4n or 2n+1 outputs, got {ins}/{outs}"
            )))
        }
    }
}

fn decode(bits: &[bool], lo: usize, len: usize) -> u128 {
    let mut v = 0u128;
    for i in 0..len {
        if bits[lo + i] {
            v |= 1 << i;
        }
    }
    v
}

/// Expected-vs-got comparison for one stimulus; `got_bits` are the
/// output values in port order. Returns (expected, got) on mismatch.
fn check_case(shape: PortShape, bits: &[bool], got_bits: &[bool]) -> Option<(u128, u128)> {
    match shape {
        PortShape::Adder { width } => {
            let a = decode(bits, 0, width);
            let b = decode(bits, width, width);
            let cin = bits[2 * width];
            let (s, c1) = a.overflowing_add(b);
            let (sum, c2) = s.overflowing_add(u128::from(cin));
            let cout = c1 || c2;
            // For width < 128 the u128 sum holds the carry bit itself;
            // only a width-128 adder needs the explicit overflow flag.
            let expect_bit = |i: usize| if i < 128 { (sum >> i) & 1 == 1 } else { cout };
            let ok = got_bits.iter().enumerate().all(|(i, &g)| g == expect_bit(i));
            if ok {
                None
            } else {
                Some((sum, decode(got_bits, 0, got_bits.len().min(128))))
            }
        }
        PortShape::FullMult { n } => {
            let a = decode(bits, 0, n);
            let b = decode(bits, n, n);
            let product = a * b;
            let expect_bit = |i: usize| i < 128 && (product >> i) & 1 == 1;
            let ok = got_bits.iter().enumerate().all(|(i, &g)| g == expect_bit(i));
            if ok {
                None
            } else {
                Some((product, decode(got_bits, 0, got_bits.len().min(128))))
            }
        }
        PortShape::FrontEnd { n } => {
            let a = decode(bits, 0, n);
            let b = decode(bits, n, n);
            let product = a * b;
            let mut total = 0u128;
            let mut overflow = false;
            for (i, &g) in got_bits.iter().enumerate() {
                if g {
                    let (t, o) = total.overflowing_add(1 << (i % (2 * n)));
                    total = t;
                    overflow |= o;
                }
            }
            if !overflow && total == product {
                None
            } else {
                Some((product, total))
            }
        }
    }
}

/// Check a netlist against an integer oracle. Stops at the first
/// mismatch and reports it; exhaustive mode scans stimuli in ascending
/// order, so the reported counterexample is minimal.
pub fn verify(netlist: &Netlist, oracle: OracleKind, mode: VerifyMode) -> Result<VerifyOutcome> {
    let shape = classify(netlist, oracle)?;
    let width = netlist.inputs().len();
    let stimuli: Box<dyn Iterator<Item = Vec<bool>>> = match mode {
        VerifyMode::Exhaustive => {
            if width > 26 {
                return Err(Error::InvalidSpec(format!(
                    "{width} inputs is too wide for exhaustive mode; use random"
                )));
            }
            Box::new((0..1u64 << width).map(move |v| {
                (0..width).map(|j| (v >> j) & 1 == 1).collect()
            }))
        }
        VerifyMode::Random { count, seed } => {
            use rand::{RngCore, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let corners = [
                vec![false; width],
                vec![true; width],
                (0..width).map(|j| j % 2 == 1).collect(),
                (0..width).map(|j| j % 2 == 0).collect(),
            ];
            let randoms = (0..count).map(move |_| {
                (0..width)
                    .map(|_| rng.next_u32() & 1 == 1)
                    .collect::<Vec<bool>>()
            });
            Box::new(corners.into_iter().chain(randoms))
        }
    };

    let sim = MultiEvaluator::new(netlist)?;
    let mut words = vec![0u64; width];
    let mut values = Vec::new();
    let mut chunk: Vec<Vec<bool>> = Vec::with_capacity(64);
    let mut cases = 0u64;
    let mut stimuli = stimuli.peekable();
    while stimuli.peek().is_some() {
        chunk.clear();
        chunk.extend(stimuli.by_ref().take(64));
        for w in words.iter_mut() {
            *w = 0;
        }
        for (lane, stim) in chunk.iter().enumerate() {
            for (j, &bit) in stim.iter().enumerate() {
                words[j] |= u64::from(bit) << lane;
            }
        }
        sim.run(&words, &mut values);
        for (lane, stim) in chunk.iter().enumerate() {
            let got_bits: Vec<bool> = netlist
                .outputs()
                .iter()
                .map(|o| (values[o.index()] >> lane) & 1 == 1)
                .collect();
            if let Some((expected, got)) = check_case(shape, stim, &got_bits) {
                let (a, b, cin) = match shape {
                    PortShape::Adder { width } => (
                        decode(stim, 0, width),
                        decode(stim, width, width),
                        Some(stim[2 * width]),
                    ),
                    PortShape::FrontEnd { n } | PortShape::FullMult { n } => {
                        (decode(stim, 0, n), decode(stim, n, n), None)
                    }
                };
                return Ok(VerifyOutcome {
                    pass: false,
                    cases: cases + lane as u64 + 1,
                    counterexample: Some(Counterexample {
                        index: cases + lane as u64,
                        inputs: stim.clone(),
                        a,
                        b,
                        cin,
                        expected,
                        got,
                    }),
                });
            }
        }
        cases += chunk.len() as u64;
    }
    Ok(VerifyOutcome {
        pass: true,
        cases,
        counterexample: None,
    })
}

/// Everything a study run needs. Paths for the delay model and cost
/// tables are resolved by the caller (the CLI); the config holds the
/// loaded values.
#[derive(Debug, Clone)]
pub struct StudyConfig {
    pub ns: Vec<usize>,
    pub vectors: usize,
    pub seed: u64,
    /// Flatness tolerance for region detection; `None` uses the delay
    /// model's default (half an FA carry delay).
    pub epsilon: Option<f64>,
    pub max_fanout: Option<usize>,
    pub delay_model: DelayModel,
    pub cost_tables: CostTables,
    pub out_dir: PathBuf,
}

impl Default for StudyConfig {
    fn default() -> Self {
        StudyConfig {
            ns: vec![8, 16, 32, 64],
            vectors: DEFAULT_VECTORS,
            seed: DEFAULT_SEED,
            epsilon: None,
            max_fanout: None,
            delay_model: DelayModel::default(),
            cost_tables: CostTables::default(),
            out_dir: PathBuf::from("study-out"),
        }
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    let r = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    r.map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
}

impl StudyConfig {
    /// Apply `key = value` lines (with `#` comments) on top of this
    /// config. Recognized keys: `n` (comma-separated), `vectors`,
    /// `seed`, `epsilon`, `max_fanout`, `delay_model` (path),
    /// `cost_tables` (path), `out_dir`.
    pub fn apply_kv_str(mut self, text: &str) -> Result<StudyConfig> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key = value", lineno + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "n" => {
                    self.ns = value
                        .split(',')
                        .map(|p| {
                            p.trim()
                                .parse::<usize>()
                                .map_err(|_| Error::Parse(format!("bad n `{p}`")))
                        })
                        .collect::<Result<_>>()?;
                }
                "vectors" => self.vectors = parse_u64(value)? as usize,
                "seed" => self.seed = parse_u64(value)?,
                "epsilon" => {
                    self.epsilon = Some(value.parse().map_err(|_| {
                        Error::Parse(format!("bad epsilon `{value}`"))
                    })?)
                }
                "max_fanout" => self.max_fanout = Some(parse_u64(value)? as usize),
                "delay_model" => self.delay_model = DelayModel::from_path(Path::new(value))?,
                "cost_tables" => self.cost_tables = CostTables::from_path(Path::new(value))?,
                "out_dir" => self.out_dir = PathBuf::from(value),
                _ => return Err(Error::Parse(format!("unknown config key `{key}`"))),
            }
        }
        Ok(self)
    }
}

/// Results for one operand width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyEntry {
    pub n: usize,
    pub stages: usize,
    pub fa_count: usize,
    pub ha_count: usize,
    /// CPA input arrival profile, bit 0 first.
    pub profile: Vec<f64>,
    pub detected: RegionPartition,
    pub closed_form: RegionPartition,
    pub divergence: DivergenceReport,
    /// Recommendation from the detected partition.
    pub recommendation: RegionRecommendation,
    /// Eight rows: the seven monolithic kinds then HYBRID.
    pub costs: Vec<CostReport>,
}

/// The full study: one entry per requested width.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub seed: u64,
    pub vectors: usize,
    pub entries: Vec<StudyEntry>,
}

/// Vectors used for the pre-cost oracle gate on every netlist.
const GATE_VECTORS: usize = 2_000;

fn gate_on_oracle(stage: &str, netlist: &Netlist, oracle: OracleKind, seed: u64) -> Result<()> {
    let outcome = verify(
        netlist,
        oracle,
        VerifyMode::Random {
            count: GATE_VECTORS,
            seed,
        },
    )?;
    if !outcome.pass {
        let cex = outcome.counterexample.expect("failed runs carry a witness");
        return Err(Error::Verify(format!("{stage}: {cex}")));
    }
    Ok(())
}

fn cost_row(
    name: &str,
    netlist: &Netlist,
    completion: f64,
    config: &StudyConfig,
) -> Result<CostReport> {
    let act = estimate_activity(netlist, config.vectors, config.seed)?;
    Ok(CostReport {
        name: name.to_string(),
        completion,
        area: area(netlist, &config.cost_tables),
        power: power(netlist, &act, &config.cost_tables),
        seed: config.seed,
        vectors: config.vectors,
    })
}

fn build_entry(n: usize, config: &StudyConfig) -> Result<StudyEntry> {
    let model = &config.delay_model;
    let fe = build_front_end(n, config.max_fanout)?;
    gate_on_oracle(
        &format!("front-end n={n}"),
        &fe.netlist,
        OracleKind::Mult,
        config.seed,
    )?;
    let profile = cpa_input_profile(&fe, model);
    let epsilon = config.epsilon.unwrap_or_else(|| model.default_epsilon());
    let detected = detect_regions(&profile, epsilon)?;
    let closed_form = closed_form_partition(n)?;
    let divergence = compare_table(&profile, &detected, &closed_form)?;
    let recommendation = recommend(&detected)?;

    let mut costs = Vec::with_capacity(8);
    for kind in AdderKind::MONOLITHIC {
        let nl = gen_adder(&AdderSpec::new(kind, 2 * n))?;
        gate_on_oracle(
            &format!("{kind} width {} (n={n})", 2 * n),
            &nl,
            OracleKind::Add,
            config.seed,
        )?;
        let (completion, _) = completion_time(&nl, &profile, model, 0.0)?;
        costs.push(cost_row(kind.name(), &nl, completion, config)?);
    }
    let hybrid_rec = recommend(&closed_form)?;
    let hybrid = compose_hybrid(&hybrid_rec.partition, &hybrid_rec.kinds)?;
    gate_on_oracle(
        &format!("hybrid width {} (n={n})", 2 * n),
        &hybrid,
        OracleKind::Add,
        config.seed,
    )?;
    let (completion, _) = completion_time(&hybrid, &profile, model, 0.0)?;
    costs.push(cost_row(AdderKind::Hybrid.name(), &hybrid, completion, config)?);

    Ok(StudyEntry {
        n,
        stages: fe.stage_count,
        fa_count: fe.fa_count,
        ha_count: fe.ha_count,
        profile: profile.arrivals().to_vec(),
        detected,
        closed_form,
        divergence,
        recommendation,
        costs,
    })
}

/// Run the comparison study and write its artifacts (`study.json`,
/// `profile_<n>.csv`, `costs.csv`, `divergence.csv`) into the
/// configured output directory. Every netlist must pass its integer
/// oracle before it is costed. Deterministic for a fixed config.
pub fn run_study(config: &StudyConfig) -> Result<StudyReport> {
    if config.ns.is_empty() {
        return Err(Error::InvalidSpec("study needs at least one width".into()));
    }
    for &n in &config.ns {
        if n < 4 {
            return Err(Error::InvalidWidth {
                what: "study operand width",
                min: 4,
                got: n,
            });
        }
    }
    #[cfg(feature = "parallel")]
    let entries: Vec<StudyEntry> = config
        .ns
        .par_iter()
        .map(|&n| build_entry(n, config))
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let entries: Vec<StudyEntry> = config
        .ns
        .iter()
        .map(|&n| build_entry(n, config))
        .collect::<Result<_>>()?;
    let report = StudyReport {
        seed: config.seed,
        vectors: config.vectors,
        entries,
    };

    std::fs::create_dir_all(&config.out_dir)?;
    std::fs::write(config.out_dir.join("study.json"), study_json(&report))?;
    for entry in &report.entries {
        let profile = ArrivalProfile::new(entry.profile.clone())?;
        profile.write_csv(&config.out_dir.join(format!("profile_{}.csv", entry.n)))?;
    }
    std::fs::write(config.out_dir.join("costs.csv"), costs_to_csv(&report))?;
    let divergences: Vec<DivergenceReport> =
        report.entries.iter().map(|e| e.divergence.clone()).collect();
    std::fs::write(
        config.out_dir.join("divergence.csv"),
        divergence_to_csv(&divergences),
    )?;
    Ok(report)
}

/// The canonical JSON rendering of a report (pretty, trailing newline).
pub fn study_json(report: &StudyReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serializes");
    text.push('\n');
    text
}

/// Read back a `study.json`.
pub fn read_study(path: &Path) -> Result<StudyReport> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

/// Cost rows as CSV, one line per (n, design).
pub fn costs_to_csv(report: &StudyReport) -> String {
    let mut out = String::from("n,kind,completion,area,power,seed,vectors\n");
    for entry in &report.entries {
        for row in &entry.costs {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                entry.n, row.name, row.completion, row.area, row.power, row.seed, row.vectors
            ));
        }
    }
    out
}

/// Parse [`costs_to_csv`] output back into (n, row) pairs.
pub fn costs_from_csv(text: &str) -> Result<Vec<(usize, CostReport)>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "n,kind,completion,area,power,seed,vectors" {
        return Err(Error::Parse(format!("unexpected costs header `{header}`")));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(Error::Parse(format!("bad costs row `{line}`")));
        }
        let field = |i: usize| -> Result<f64> {
            parts[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{}`", parts[i])))
        };
        rows.push((
            parts[0]
                .parse()
                .map_err(|_| Error::Parse(format!("bad n `{}`", parts[0])))?,
            CostReport {
                name: parts[1].to_string(),
                completion: field(2)?,
                area: field(3)?,
                power: field(4)?,
                seed: parse_u64(parts[5])?,
                vectors: parse_u64(parts[6])? as usize,
            },
        ));
    }
    Ok(rows)
}

/// Boundary divergences as CSV, one line per n.
pub fn divergence_to_csv(reports: &[DivergenceReport]) -> String {
    let mut out =
        String::from("n,b1_detected,b1_closed_form,b1_offset,b2_detected,b2_closed_form,b2_offset\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n, r.b1_detected, r.b1_closed_form, r.b1_offset, r.b2_detected, r.b2_closed_form,
            r.b2_offset
        ));
    }
    out
}

/// Parse [`divergence_to_csv`] output.
pub fn divergence_from_csv(text: &str) -> Result<Vec<DivergenceReport>> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    if header != "n,b1_detected,b1_closed_form,b1_offset,b2_detected,b2_closed_form,b2_offset" {
        return Err(Error::Parse(format!(
            "unexpected divergence header `{header}`"
        )));
    }
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != 7 {
            return Err(Error::Parse(format!("bad divergence row `{line}`")));
        }
        let unsigned = |i: usize| -> Result<usize> {
            parts[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad index `{}`", parts[i])))
        };
        let signed = |i: usize| -> Result<i64> {
            parts[i]
                .parse()
                .map_err(|_| Error::Parse(format!("bad offset `{}`", parts[i])))
        };
        rows.push(DivergenceReport {
            n: unsigned(0)?,
            b1_detected: unsigned(1)?,
            b1_closed_form: unsigned(2)?,
            b1_offset: signed(3)?,
            b2_detected: unsigned(4)?,
            b2_closed_form: unsigned(5)?,
            b2_offset: signed(6)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::GateKind;

    #[test]
    fn exhaustive_verify_passes_a_small_adder() {
        let nl = gen_adder(&AdderSpec::new(AdderKind::Rca, 4)).unwrap();
        let out = verify(&nl, OracleKind::Add, VerifyMode::Exhaustive).unwrap();
        assert!(out.pass);
        assert_eq!(out.cases, 512);
        assert!(out.counterexample.is_none());
    }

    #[test]
    fn exhaustive_verify_passes_a_small_front_end_and_multiplier() {
        let fe = build_front_end(4, None).unwrap();
        let out = verify(&fe.netlist, OracleKind::Mult, VerifyMode::Exhaustive).unwrap();
        assert!(out.pass);
        assert_eq!(out.cases, 256);

        let full = crate::multiplier::build_multiplier(4, None, AdderKind::Cla, None).unwrap();
        let out = verify(&full, OracleKind::Mult, VerifyMode::Exhaustive).unwrap();
        assert!(out.pass);
    }

    #[test]
    fn sabotage_is_caught_with_a_minimal_counterexample() {
        let mut nl = gen_adder(&AdderSpec::new(AdderKind::Rca, 4)).unwrap();
        let victim = nl
            .gates
            .iter()
            .position(|g| g.kind == GateKind::Xor2)
            .unwrap();
        nl.gates[victim].kind = GateKind::Xnor2;
        let out = verify(&nl, OracleKind::Add, VerifyMode::Exhaustive).unwrap();
        assert!(!out.pass);
        let cex = out.counterexample.unwrap();
        // Flipping an XOR in the s0 cell breaks a=b=cin=0 already.
        assert_eq!(cex.index, 0);
        assert_ne!(cex.expected, cex.got);

        let random = verify(
            &nl,
            OracleKind::Add,
            VerifyMode::Random { count: 50, seed: 1 },
        )
        .unwrap();
        assert!(!random.pass, "corners catch the stuck-at-flip too");
    }

    #[test]
    fn oracle_shape_mismatches_are_rejected() {
        let adder = gen_adder(&AdderSpec::new(AdderKind::Rca, 4)).unwrap();
        assert!(verify(&adder, OracleKind::Mult, VerifyMode::Exhaustive).is_err());
        let fe = build_front_end(4, None).unwrap();
        assert!(verify(&fe.netlist, OracleKind::Add, VerifyMode::Exhaustive).is_err());
        let wide = gen_adder(&AdderSpec::new(AdderKind::Rca, 16)).unwrap();
        assert!(verify(&wide, OracleKind::Add, VerifyMode::Exhaustive).is_err());
    }

    #[test]
    fn random_mode_counts_corners_plus_vectors() {
        let nl = gen_adder(&AdderSpec::new(AdderKind::Bcsla, 64)).unwrap();
        let out = verify(
            &nl,
            OracleKind::Add,
            VerifyMode::Random {
                count: 1_000,
                seed: 0,
            },
        )
        .unwrap();
        assert!(out.pass);
        assert_eq!(out.cases, 1_004);
    }

    #[test]
    fn config_lines_override_defaults() {
        let cfg = StudyConfig::default()
            .apply_kv_str("n = 8, 16\nseed = 0x2A # comment\nvectors=500\n\n# full line\n")
            .unwrap();
        assert_eq!(cfg.ns, vec![8, 16]);
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.vectors, 500);
        assert!(StudyConfig::default().apply_kv_str("bogus = 1").is_err());
        assert!(StudyConfig::default().apply_kv_str("just words").is_err());
    }

    #[test]
    fn mini_study_produces_consistent_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let config = StudyConfig {
            ns: vec![8],
            vectors: 200,
            out_dir: dir.path().to_path_buf(),
            ..StudyConfig::default()
        };
        let report = run_study(&config).unwrap();
        assert_eq!(report.entries.len(), 1);
        let entry = &report.entries[0];
        assert_eq!(entry.profile.len(), 16);
        assert_eq!(entry.costs.len(), 8);
        let names: Vec<&str> = entry.costs.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(
            names,
            ["RCA", "CSA", "CLA", "CSLA", "BCSA", "BCLA", "BCSLA", "HYBRID"]
        );

        // Every artifact round-trips through its reader.
        let back = read_study(&dir.path().join("study.json")).unwrap();
        assert_eq!(back, report);
        let costs_text = std::fs::read_to_string(dir.path().join("costs.csv")).unwrap();
        let rows = costs_from_csv(&costs_text).unwrap();
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].0, 8);
        assert_eq!(rows[0].1, entry.costs[0]);
        assert_eq!(costs_to_csv(&back), costs_text);
        let div_text = std::fs::read_to_string(dir.path().join("divergence.csv")).unwrap();
        let divs = divergence_from_csv(&div_text).unwrap();
        assert_eq!(divs, vec![entry.divergence.clone()]);
        let profile = ArrivalProfile::read_csv(&dir.path().join("profile_8.csv")).unwrap();
        assert_eq!(profile.arrivals(), entry.profile.as_slice());

        // Re-running the identical config is byte-identical.
        let again = run_study(&config).unwrap();
        assert_eq!(study_json(&again), study_json(&report));
    }
}
