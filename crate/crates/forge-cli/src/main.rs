//! `forge` — generate multiplier front-ends and final adders at gate
//! level, profile carry-propagate arrival times, partition and compose
//! hybrid adders, and run the multi-width comparison study.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use forge_core::costmodel::{DEFAULT_SEED, DEFAULT_VECTORS};
use forge_core::study::{self, OracleKind, StudyConfig, VerifyMode};
use forge_core::timing::sta_arrival;
use forge_core::{
    attach_cpa, build_front_end, build_multiplier, closed_form_partition, compare_table,
    compose_hybrid, detect_regions, estimate_activity, gen_adder, recommend, AdderKind, AdderSpec,
    ArrivalProfile, CostReport, CostTables, DelayModel, Error, Netlist, RegionPartition, Result,
};

#[derive(Parser)]
#[command(name = "forge", version, about = "Multiplier final-adder generator and analyzer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an n-by-n multiplier netlist (front end plus final adder)
    GenMult(GenMultArgs),
    /// Generate a final-adder netlist of one kind
    GenAdder(GenAdderArgs),
    /// Generate a region-partitioned hybrid final adder
    GenHybrid(GenHybridArgs),
    /// Compute the final-adder input arrival profile of a front end
    Profile(ProfileArgs),
    /// Detect profile regions and compare them with the closed form
    Partition(PartitionArgs),
    /// Report completion time, area, and switching power for a netlist
    Cost(CostArgs),
    /// Check a netlist against its integer oracle
    Verify(VerifyArgs),
    /// Run the multi-width comparison study and write its artifacts
    Study(StudyArgs),
    /// Emit structural Verilog for a netlist
    ExportHdl(ExportArgs),
}

#[derive(Args)]
struct GenMultArgs {
    /// Operand width n (2..=64)
    #[arg(long)]
    n: usize,
    /// Insert buffer trees so no net drives more than this many sinks
    #[arg(long)]
    max_fanout: Option<usize>,
    /// Final-adder kind; HYBRID uses the closed-form partition
    #[arg(long, default_value = "RCA")]
    cpa: String,
    /// Block size override for uniform-block kinds
    #[arg(long)]
    block: Option<usize>,
    /// Emit only the front end (two output rows, no final adder)
    #[arg(long, conflicts_with_all = ["cpa", "block"])]
    front_end: bool,
    /// Output path for the netlist JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenAdderArgs {
    /// Adder kind: RCA, CSA, CLA, CSLA, BCSA, BCLA, or BCSLA
    #[arg(long)]
    kind: String,
    /// Adder width in bits
    #[arg(long)]
    width: usize,
    /// Block size override for uniform-block kinds
    #[arg(long)]
    block: Option<usize>,
    /// Output path for the netlist JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenHybridArgs {
    /// Operand width n; the adder spans 2n bits with closed-form regions
    #[arg(long, conflicts_with = "partition")]
    n: Option<usize>,
    /// Explicit region widths, LSB to MSB (comma-separated, e.g. 4,10,2)
    #[arg(long)]
    partition: Option<String>,
    /// One adder kind per non-empty region (comma-separated)
    #[arg(long)]
    kinds: Option<String>,
    /// Output path for the netlist JSON (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProfileArgs {
    /// Operand width n
    #[arg(long)]
    n: usize,
    /// Delay model TOML (defaults to the unit-delay model)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Insert buffer trees before profiling
    #[arg(long)]
    max_fanout: Option<usize>,
    /// Output path for the bit,arrival CSV (stdout when omitted)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct PartitionArgs {
    /// Operand width n; the profile is computed from a fresh front end
    #[arg(long)]
    n: Option<usize>,
    /// Read the profile from a bit,arrival CSV instead of building one
    #[arg(long, conflicts_with = "closed_form")]
    from_profile: Option<PathBuf>,
    /// Report only the closed-form partition (no detection)
    #[arg(long)]
    closed_form: bool,
    /// Flatness tolerance (defaults to half an FA carry delay)
    #[arg(long)]
    epsilon: Option<f64>,
    /// Delay model TOML (defaults to the unit-delay model)
    #[arg(long)]
    model: Option<PathBuf>,
    /// Also write the result as JSON to this path
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct CostArgs {
    /// Netlist JSON to cost
    #[arg(long)]
    netlist: PathBuf,
    /// Cost tables TOML (defaults to transistor-count weights)
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Delay model TOML for the completion time
    #[arg(long)]
    model: Option<PathBuf>,
    /// Random vectors for the switching-activity estimate
    #[arg(long, default_value_t = DEFAULT_VECTORS)]
    vectors: usize,
    /// Stimulus seed (FORGE_SEED overrides)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Also write the report as JSON to this path
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Netlist JSON to check
    #[arg(long)]
    netlist: PathBuf,
    /// Oracle shape: `mult` or `add`
    #[arg(long)]
    oracle: String,
    /// Try every input combination (inputs must fit in 26 bits)
    #[arg(long, conflicts_with = "random")]
    exhaustive: bool,
    /// Corner patterns plus this many seeded random vectors
    #[arg(long)]
    random: Option<usize>,
    /// Stimulus seed for random mode (FORGE_SEED overrides)
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args)]
struct StudyArgs {
    /// Key=value config file; CLI flags override it
    #[arg(long)]
    config: Option<PathBuf>,
    /// Operand widths, comma-separated (default 8,16,32,64)
    #[arg(long)]
    n: Option<String>,
    /// Random vectors per activity estimate
    #[arg(long)]
    vectors: Option<usize>,
    /// Stimulus seed (FORGE_SEED overrides)
    #[arg(long)]
    seed: Option<u64>,
    /// Flatness tolerance for region detection
    #[arg(long)]
    epsilon: Option<f64>,
    /// Insert buffer trees in the front ends
    #[arg(long)]
    max_fanout: Option<usize>,
    /// Delay model TOML
    #[arg(long)]
    model: Option<PathBuf>,
    /// Cost tables TOML
    #[arg(long)]
    tables: Option<PathBuf>,
    /// Artifact directory (default study-out)
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ExportArgs {
    /// Netlist JSON to translate
    #[arg(long)]
    netlist: PathBuf,
    /// Verilog module name (defaults to the netlist name)
    #[arg(long)]
    module: Option<String>,
    /// Output path for the Verilog (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_u64_arg(s: &str) -> Result<u64> {
    let r = if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16)
    } else {
        s.parse()
    };
    r.map_err(|_| Error::Parse(format!("expected an integer, got `{s}`")))
}

/// FORGE_SEED wins over any seed from flags or config files.
fn effective_seed(cli_seed: u64) -> Result<u64> {
    match std::env::var("FORGE_SEED") {
        Ok(v) => parse_u64_arg(&v),
        Err(std::env::VarError::NotPresent) => Ok(cli_seed),
        Err(e) => Err(Error::Parse(format!("FORGE_SEED: {e}"))),
    }
}

fn parse_usize_list(s: &str, what: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad {what} `{p}`")))
        })
        .collect()
}

fn parse_kinds(s: &str) -> Result<Vec<AdderKind>> {
    s.split(',').map(|p| AdderKind::from_name(p.trim())).collect()
}

fn load_model(path: &Option<PathBuf>) -> Result<DelayModel> {
    match path {
        Some(p) => DelayModel::from_path(p),
        None => Ok(DelayModel::default()),
    }
}

fn load_tables(path: &Option<PathBuf>) -> Result<CostTables> {
    match path {
        Some(p) => CostTables::from_path(p),
        None => Ok(CostTables::default()),
    }
}

fn emit_netlist(netlist: &Netlist, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            forge_core::io::write_json(netlist, path)?;
            println!(
                "wrote {} ({} gates, {} inputs, {} outputs)",
                path.display(),
                netlist.gates().len(),
                netlist.inputs().len(),
                netlist.outputs().len()
            );
        }
        None => print!("{}", forge_core::io::to_json(netlist)),
    }
    Ok(())
}

fn emit_text(text: &str, out: &Option<PathBuf>) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn gen_mult(args: &GenMultArgs) -> Result<()> {
    let netlist = if args.front_end {
        build_front_end(args.n, args.max_fanout)?.netlist
    } else {
        let kind = AdderKind::from_name(&args.cpa)?;
        if kind == AdderKind::Hybrid {
            let rec = recommend(&closed_form_partition(args.n)?)?;
            let adder = compose_hybrid(&rec.partition, &rec.kinds)?;
            let fe = build_front_end(args.n, args.max_fanout)?;
            attach_cpa(&fe, &adder)?
        } else {
            build_multiplier(args.n, args.max_fanout, kind, args.block)?
        }
    };
    emit_netlist(&netlist, &args.out)
}

fn gen_hybrid(args: &GenHybridArgs) -> Result<()> {
    let partition = match (&args.n, &args.partition) {
        (Some(n), None) => closed_form_partition(*n)?,
        (None, Some(widths)) => {
            let w = parse_usize_list(widths, "region width")?;
            RegionPartition::from_widths(w.iter().sum(), &w)?
        }
        _ => {
            return Err(Error::Parse(
                "give exactly one of --n or --partition".to_string(),
            ))
        }
    };
    let netlist = match &args.kinds {
        Some(list) => compose_hybrid(&partition, &parse_kinds(list)?)?,
        None => {
            let rec = recommend(&partition)?;
            compose_hybrid(&rec.partition, &rec.kinds)?
        }
    };
    emit_netlist(&netlist, &args.out)
}

fn profile_cmd(args: &ProfileArgs) -> Result<()> {
    let model = load_model(&args.model)?;
    let fe = build_front_end(args.n, args.max_fanout)?;
    let profile = forge_core::timing::cpa_input_profile(&fe, &model);
    emit_text(&profile.to_csv(), &args.csv)
}

fn partition_cmd(args: &PartitionArgs) -> Result<()> {
    if args.closed_form {
        let n = args.n.ok_or_else(|| {
            Error::Parse("--closed-form needs --n".to_string())
        })?;
        let closed = closed_form_partition(n)?;
        println!("closed-form: {closed}");
        if let Some(path) = &args.json {
            let doc = serde_json::json!({ "closed_form": closed });
            std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
            println!("wrote {}", path.display());
        }
        return Ok(());
    }
    let model = load_model(&args.model)?;
    let profile = match &args.from_profile {
        Some(path) => {
            let p = ArrivalProfile::read_csv(path)?;
            if let Some(n) = args.n {
                if p.n() != n {
                    return Err(Error::WidthMismatch {
                        expected: 2 * n,
                        got: p.len(),
                    });
                }
            }
            p
        }
        None => {
            let n = args.n.ok_or_else(|| {
                Error::Parse("give --n or --from-profile".to_string())
            })?;
            let fe = build_front_end(n, None)?;
            forge_core::timing::cpa_input_profile(&fe, &model)
        }
    };
    let epsilon = args.epsilon.unwrap_or_else(|| model.default_epsilon());
    let detected = detect_regions(&profile, epsilon)?;
    let closed_form = closed_form_partition(profile.n())?;
    let divergence = compare_table(&profile, &detected, &closed_form)?;
    let recommendation = recommend(&detected)?;
    println!("detected:    {detected}");
    println!("closed-form: {closed_form}");
    println!(
        "offsets:     b1 {:+}, b2 {:+}",
        divergence.b1_offset, divergence.b2_offset
    );
    let kinds: Vec<&str> = recommendation.kinds.iter().map(|k| k.name()).collect();
    println!(
        "recommend:   {} over {}{}",
        kinds.join(","),
        recommendation.partition,
        if recommendation.degenerate {
            " (degenerate: single region)"
        } else {
            ""
        }
    );
    if let Some(path) = &args.json {
        let doc = serde_json::json!({
            "detected": detected,
            "closed_form": closed_form,
            "divergence": divergence,
            "recommendation": recommendation,
        });
        std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&doc)?))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn cost_cmd(args: &CostArgs) -> Result<()> {
    let netlist = forge_core::io::read_json(&args.netlist)?;
    let tables = load_tables(&args.tables)?;
    let model = load_model(&args.model)?;
    let seed = effective_seed(args.seed)?;
    let zeros = vec![0.0; netlist.inputs().len()];
    let arrivals = sta_arrival(&netlist, &zeros, &model)?;
    let completion = netlist
        .outputs()
        .iter()
        .map(|o| arrivals[o.index()])
        .fold(0.0, f64::max);
    let activity = estimate_activity(&netlist, args.vectors, seed)?;
    let report = CostReport {
        name: netlist.name().to_string(),
        completion,
        area: forge_core::area(&netlist, &tables),
        power: forge_core::costmodel::power(&netlist, &activity, &tables),
        seed,
        vectors: args.vectors,
    };
    println!(
        "{}: completion {:.3}  area {:.0}  power {:.3}  (seed {:#x}, {} vectors)",
        report.name, report.completion, report.area, report.power, report.seed, report.vectors
    );
    if let Some(path) = &args.json {
        std::fs::write(path, format!("{}\n", serde_json::to_string_pretty(&report)?))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn verify_cmd(args: &VerifyArgs) -> Result<ExitCode> {
    let netlist = forge_core::io::read_json(&args.netlist)?;
    let oracle = OracleKind::from_name(&args.oracle)?;
    let mode = match (args.exhaustive, args.random) {
        (true, None) => VerifyMode::Exhaustive,
        (false, Some(count)) => VerifyMode::Random {
            count,
            seed: effective_seed(args.seed)?,
        },
        _ => {
            return Err(Error::Parse(
                "give exactly one of --exhaustive or --random N".to_string(),
            ))
        }
    };
    let outcome = study::verify(&netlist, oracle, mode)?;
    if outcome.pass {
        println!("PASS ({} cases)", outcome.cases);
        Ok(ExitCode::SUCCESS)
    } else {
        let cex = outcome.counterexample.expect("failures carry a witness");
        println!("FAIL after {} cases: {}", outcome.cases, cex);
        Ok(ExitCode::from(1))
    }
}

fn study_cmd(args: &StudyArgs) -> Result<()> {
    let mut config = StudyConfig::default();
    if let Some(path) = &args.config {
        config = config.apply_kv_str(&std::fs::read_to_string(path)?)?;
    }
    if let Some(list) = &args.n {
        config.ns = parse_usize_list(list, "operand width")?;
    }
    if let Some(v) = args.vectors {
        config.vectors = v;
    }
    if let Some(s) = args.seed {
        config.seed = s;
    }
    if args.epsilon.is_some() {
        config.epsilon = args.epsilon;
    }
    if args.max_fanout.is_some() {
        config.max_fanout = args.max_fanout;
    }
    if let Some(path) = &args.model {
        config.delay_model = DelayModel::from_path(path)?;
    }
    if let Some(path) = &args.tables {
        config.cost_tables = CostTables::from_path(path)?;
    }
    if let Some(dir) = &args.out_dir {
        config.out_dir = dir.clone();
    }
    config.seed = effective_seed(config.seed)?;

    let report = study::run_study(&config)?;
    for entry in &report.entries {
        println!(
            "n={}: {} stages, {} FA + {} HA",
            entry.n, entry.stages, entry.fa_count, entry.ha_count
        );
        println!("  detected:    {}", entry.detected);
        println!("  closed-form: {}", entry.closed_form);
        let kinds: Vec<&str> = entry.recommendation.kinds.iter().map(|k| k.name()).collect();
        println!("  recommend:   {}", kinds.join(","));
        for row in &entry.costs {
            println!(
                "  {:<6} completion {:8.3}  area {:8.0}  power {:8.3}",
                row.name, row.completion, row.area, row.power
            );
        }
    }
    println!("artifacts in {}", config.out_dir.display());
    Ok(())
}

fn export_hdl(args: &ExportArgs) -> Result<()> {
    let netlist = forge_core::io::read_json(&args.netlist)?;
    let text = forge_core::io::to_verilog(&netlist, args.module.as_deref());
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text)?;
            println!("wrote {}", path.display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn gen_adder_cmd(args: &GenAdderArgs) -> Result<()> {
    let kind = AdderKind::from_name(&args.kind)?;
    let mut spec = AdderSpec::new(kind, args.width);
    if let Some(block) = args.block {
        spec = spec.with_block(block);
    }
    emit_netlist(&gen_adder(&spec)?, &args.out)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::GenMult(args) => gen_mult(args).map(|()| ExitCode::SUCCESS),
        Command::GenAdder(args) => gen_adder_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::GenHybrid(args) => gen_hybrid(args).map(|()| ExitCode::SUCCESS),
        Command::Profile(args) => profile_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::Partition(args) => partition_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::Cost(args) => cost_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::Verify(args) => verify_cmd(args),
        Command::Study(args) => study_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::ExportHdl(args) => export_hdl(args).map(|()| ExitCode::SUCCESS),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                // A netlist that fails its oracle is a verification
                // failure, not a usage problem.
                Error::Verify(_) => ExitCode::from(1),
                _ => ExitCode::from(2),
            }
        }
    }
}
