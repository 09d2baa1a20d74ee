use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use lcs_core::analysis::{distance_upper_bound, exact_distance, Distance};
use lcs_core::bench::{
    crossing_point, pseudo_threshold, read_curve_csv, run_experiment, CurvePoint, ExperimentConfig,
};
use lcs_core::circuit::{
    build_coloration_circuit, color_tanner_edges, extract_dem, fault_distance, memory_experiment, sample_circuit_level,
};
use lcs_core::decode::{DecoderSpec, MleDecoder, MleOptions};
use lcs_core::gates::verify_fold_gates;
use lcs_core::product::{lcs_code, CodeSpec};
use lcs_core::sampling::{count_failure_configs, per_cycle_rate, NoiseKind};
use lcs_core::{CssCode, Pauli};

#[derive(Parser)]
#[command(name = "lcs", version, about = "Lift-connected surface codes: construction, decoding and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and print its parameters or matrices.
    Construct {
        /// lcs:ELL:L[:J] or surface:ELL:L
        #[arg(long)]
        code: String,
        #[arg(long, value_enum, default_value_t = ConstructFormat::Summary)]
        format: ConstructFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimum distances as CSV rows `ell,L,d_X,d_Z,method`.
    Distance(DistanceArgs),
    /// Monte Carlo logical error rates, one CSV row per physical rate.
    Sample(SampleArgs),
    /// Exhaustively decode all weight-w X errors and count logical failures.
    CountFailures {
        #[arg(long)]
        code: String,
        #[arg(long = "weight", required = true, num_args = 1..)]
        weights: Vec<usize>,
        /// Refuse enumerations larger than this many configurations.
        #[arg(long, default_value_t = 100_000_000)]
        guard: u128,
    },
    /// Syndrome-extraction circuits.
    Circuit {
        #[command(subcommand)]
        command: CircuitCommand,
    },
    /// Fold-transversal gate checks.
    Gates {
        #[command(subcommand)]
        command: GatesCommand,
    },
    /// Threshold estimates from CSV curves.
    Analyze {
        #[command(subcommand)]
        command: AnalyzeCommand,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructFormat {
    Summary,
    Text,
    Tanner,
}

#[derive(Args)]
struct DistanceArgs {
    /// Codes to analyze; defaults to every LCS code with ell ≤ --ell-max and 2 ≤ L ≤ --lift-max.
    #[arg(long)]
    code: Vec<String>,
    #[arg(long, default_value_t = 2)]
    ell_max: usize,
    #[arg(long, default_value_t = 5)]
    lift_max: usize,
    #[arg(long, value_enum, default_value_t = DistanceMethod::Exact)]
    method: DistanceMethod,
    /// Weight cap for the exact search (default 2ℓ+2).
    #[arg(long)]
    w_cap: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistanceMethod {
    Exact,
    Random,
}

#[derive(Args)]
struct SampleArgs {
    /// TOML experiment config; command-line flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    code: Option<String>,
    #[arg(long, value_parser = parse_noise)]
    noise: Option<NoiseKind>,
    /// mle or bposd
    #[arg(long)]
    decoder: Option<String>,
    /// Physical error rates, comma separated.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    rounds: Option<usize>,
    #[arg(long)]
    basis: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    bp_max_iter: Option<usize>,
    #[arg(long)]
    osd_order: Option<usize>,
    /// CSV path (a JSON sidecar is written next to it); stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    s.parse().map_err(|e: lcs_core::Error| e.to_string())
}

#[derive(Subcommand)]
enum CircuitCommand {
    /// Print a memory-experiment circuit (and optionally its error model).
    Build {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, default_value_t = 0.001)]
        p: f64,
        /// Print the detector error model instead of the circuit.
        #[arg(long)]
        dem: bool,
    },
    /// Smallest undetectable logical fault set.
    FaultDistance {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, default_value_t = 3)]
        w_max: usize,
        #[arg(long, default_value_t = 1_000_000_000)]
        guard: u128,
    },
    /// Circuit-level memory sampling with BP+OSD.
    Sample {
        #[command(flatten)]
        circuit: CircuitArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        p: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Args)]
struct CircuitArgs {
    #[arg(long)]
    code: String,
    /// Syndrome cycles (default: code distance).
    #[arg(long)]
    cycles: Option<usize>,
    #[arg(long, default_value = "Z")]
    basis: String,
}

impl CircuitArgs {
    fn resolve(&self) -> Result<(CodeSpec, CssCode, usize, Pauli)> {
        let spec = CodeSpec::parse(&self.code)?;
        let code = spec.build()?;
        let cycles = self.cycles.unwrap_or(spec.expected_distance());
        Ok((spec, code, cycles, self.basis.parse()?))
    }
}

#[derive(Subcommand)]
enum GatesCommand {
    /// Check ZX duality, fold H, fold S and transversal CNOT.
    Verify {
        #[arg(long = "l", default_value_t = 1)]
        ell: usize,
        #[arg(long = "L")]
        lift: usize,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Crossing of a curve with 1-(1-p)^k.
    PseudoThreshold {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        k: usize,
        /// Use the per-cycle rate column.
        #[arg(long)]
        per_cycle: bool,
    },
    /// Common crossing of several curves.
    Crossing {
        #[arg(long = "csv", required = true, num_args = 1..)]
        csvs: Vec<PathBuf>,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Construct { code, format, out: path } => {
            let spec = CodeSpec::parse(&code)?;
            let code = spec.build()?;
            let text = match format {
                ConstructFormat::Summary => summary(&spec, &code),
                ConstructFormat::Text => code.to_text(),
                ConstructFormat::Tanner => code.tanner_adjacency(),
            };
            emit(&mut out, path, &text)?;
        }
        Command::Distance(args) => distance(&mut out, args)?,
        Command::Sample(args) => sample(&mut out, args)?,
        Command::CountFailures { code, weights, guard } => {
            let spec = CodeSpec::parse(&code)?;
            let code = spec.build()?;
            let dec = MleDecoder::new(code.hz.clone(), vec![0.1; code.n], MleOptions::default())?;
            writeln!(out, "code,weight,failures")?;
            for w in weights {
                let n = count_failure_configs(&code, &dec, w, guard)?;
                writeln!(out, "{},{w},{n}", spec.label())?;
            }
        }
        Command::Circuit { command } => circuit(&mut out, command)?,
        Command::Gates {
            command: GatesCommand::Verify { ell, lift },
        } => {
            let code = lcs_code(ell, lift, 1)?;
            writeln!(out, "code [[{},{},{}]] (ell={ell}, L={lift})", code.n, code.k, lift.min(2 * ell + 1))?;
            let reports = verify_fold_gates(&code);
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            if reports.iter().any(|r| !r.passed) {
                bail!("gate verification failed");
            }
        }
        Command::Analyze { command } => analyze(&mut out, command)?,
    }
    Ok(())
}

fn emit(out: &mut impl Write, path: Option<PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn summary(spec: &CodeSpec, code: &CssCode) -> String {
    format!(
        "code: {}\nn: {}\nk: {}\nexpected_distance: {}\nx_checks: {}\nz_checks: {}\nmax_check_weight: {}\nmax_qubit_degree: {}\ntanner_components: {}\n",
        spec.label(),
        code.n,
        code.k,
        spec.expected_distance(),
        code.hx.rows(),
        code.hz.rows(),
        code.max_check_weight(),
        code.max_qubit_degree(),
        code.tanner_components(),
    )
}

fn distance(out: &mut impl Write, args: DistanceArgs) -> Result<()> {
    let specs: Vec<CodeSpec> = if args.code.is_empty() {
        (1..=args.ell_max)
            .flat_map(|ell| (2..=args.lift_max).map(move |lift| CodeSpec::Lcs { ell, lift, shift: 1 }))
            .collect()
    } else {
        args.code.iter().map(|c| CodeSpec::parse(c)).collect::<lcs_core::Result<_>>()?
    };
    writeln!(out, "ell,L,d_X,d_Z,method")?;
    for spec in specs {
        let (ell, lift) = match spec {
            CodeSpec::Lcs { ell, lift, .. } | CodeSpec::Disjoint { ell, lift } => (ell, lift),
        };
        let code = spec.build()?;
        let (dx, dz, method) = match args.method {
            DistanceMethod::Exact => {
                let cap = args.w_cap.unwrap_or(2 * ell + 2);
                let d = |p| exact_distance(&code, p, cap);
                (d(Pauli::X), d(Pauli::Z), "exact")
            }
            DistanceMethod::Random => {
                let d = |p| distance_upper_bound(&code, p, args.trials, args.seed).map(Distance::Exact);
                (d(Pauli::X)?, d(Pauli::Z)?, "random-upper-bound")
            }
        };
        writeln!(out, "{ell},{lift},{dx},{dz},{method}")?;
    }
    Ok(())
}

fn sample(out: &mut impl Write, args: SampleArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig {
            code: args.code.clone().context("--code or --config is required")?,
            noise: args.noise.unwrap_or(NoiseKind::CodeCapacity),
            decoder: args.decoder.clone().unwrap_or_else(|| "mle".into()),
            p_grid: Vec::new(),
            shots: args.shots.unwrap_or(10_000),
            seed: args.seed,
            q: None,
            rounds: None,
            basis: None,
            bp_max_iter: None,
            osd_order: None,
            output: None,
        },
    };
    if let Some(c) = args.code {
        cfg.code = c;
    }
    if let Some(n) = args.noise {
        cfg.noise = n;
    }
    if let Some(d) = args.decoder {
        cfg.decoder = d;
    }
    if !args.p.is_empty() {
        cfg.p_grid = args.p;
    }
    cfg.seed = args.seed;
    cfg.shots = args.shots.unwrap_or(cfg.shots);
    cfg.q = args.q.or(cfg.q);
    cfg.rounds = args.rounds.or(cfg.rounds);
    cfg.basis = args.basis.or(cfg.basis);
    cfg.bp_max_iter = args.bp_max_iter.or(cfg.bp_max_iter);
    cfg.osd_order = args.osd_order.or(cfg.osd_order);
    cfg.output = args.out.or(cfg.output);
    if cfg.p_grid.is_empty() {
        bail!("no physical error rates given (--p or p_grid)");
    }
    let to_stdout = cfg.output.is_none();
    let points = run_experiment(&cfg)?;
    if to_stdout {
        writeln!(out, "p,shots,failures,p_L,stderr,per_cycle_p_L")?;
        for pt in points {
            let pc = pt.per_cycle_p_l.map(|v| v.to_string()).unwrap_or_default();
            writeln!(out, "{},{},{},{},{},{pc}", pt.p, pt.shots, pt.failures, pt.p_l, pt.stderr)?;
        }
    }
    Ok(())
}

fn circuit(out: &mut impl Write, command: CircuitCommand) -> Result<()> {
    match command {
        CircuitCommand::Build { circuit, p, dem } => {
            let (_, code, cycles, basis) = circuit.resolve()?;
            let c = memory_experiment(&code, basis, cycles, p)?;
            if dem {
                out.write_all(extract_dem(&c).to_text().as_bytes())?;
            } else {
                let bare = build_coloration_circuit(&code, 1)?;
                let colors = |b| color_tanner_edges(&code, b).map(|c| c.len());
                writeln!(
                    out,
                    "# colors Z={} X={}, cx layers per cycle {}",
                    colors(Pauli::Z)?,
                    colors(Pauli::X)?,
                    bare.cx_layers()
                )?;
                out.write_all(c.to_text().as_bytes())?;
            }
        }
        CircuitCommand::FaultDistance { circuit, w_max, guard } => {
            let (spec, code, cycles, basis) = circuit.resolve()?;
            let c = memory_experiment(&code, basis, cycles, 0.001)?;
            let dem = extract_dem(&c);
            let fd = fault_distance(&dem, w_max, guard)?;
            let value = fd.value().map(|v| v.to_string()).unwrap_or_else(|| format!(">{w_max}"));
            writeln!(out, "code,basis,cycles,mechanisms,fault_distance")?;
            writeln!(out, "{},{basis},{cycles},{},{value}", spec.label(), dem.mechanisms.len())?;
        }
        CircuitCommand::Sample { circuit, p, shots, seed } => {
            let (spec, code, cycles, basis) = circuit.resolve()?;
            let decoder = DecoderSpec::bposd_for_distance(spec.expected_distance());
            writeln!(out, "code,p,cycles,shots,failures,p_L,stderr,per_cycle_p_L")?;
            for p in p {
                let c = memory_experiment(&code, basis, cycles, p)?;
                let stats = sample_circuit_level(&c, &decoder, shots, seed)?;
                let pt = CurvePoint::from_stats(p, &stats, Some(cycles));
                writeln!(
                    out,
                    "{},{p},{cycles},{},{},{},{},{}",
                    spec.label(),
                    pt.shots,
                    pt.failures,
                    pt.p_l,
                    pt.stderr,
                    per_cycle_rate(pt.p_l, cycles)
                )?;
            }
        }
    }
    Ok(())
}

fn analyze(out: &mut impl Write, command: AnalyzeCommand) -> Result<()> {
    let load = |path: &PathBuf| -> Result<Vec<CurvePoint>> {
        Ok(read_curve_csv(path)
            .with_context(|| format!("reading {}", path.display()))?
            .iter()
            .map(|r| r.point())
            .collect())
    };
    match command {
        AnalyzeCommand::PseudoThreshold { csv, k, per_cycle } => {
            let est = pseudo_threshold(&load(&csv)?, k, per_cycle)?;
            writeln!(out, "pseudo_threshold,uncertainty")?;
            writeln!(out, "{},{}", est.value, est.uncertainty)?;
        }
        AnalyzeCommand::Crossing { csvs } => {
            if csvs.len() < 2 {
                bail!("a crossing needs at least two curves");
            }
            let curves = csvs.iter().map(load).collect::<Result<Vec<_>>>()?;
            let est = crossing_point(&curves)?;
            writeln!(out, "crossing,uncertainty")?;
            writeln!(out, "{},{}", est.value, est.uncertainty)?;
        }
    }
    Ok(())
}
