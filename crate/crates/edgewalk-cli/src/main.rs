//! Command-line front end for the walk-search toolkit.
//!
//! Subcommands: `spectrum` (verify the quantized-walk spectrum), `search`
//! (classical and quantum search batches), `reflect` (reflection-error
//! sweeps over qubit budgets), `apps` (application cost models and
//! simulated instances), and `chain` (build, validate, serialize chains).
//!
//! Output is canonical JSON (CSV for sweeps): identical parameters and
//! seed produce byte-identical bytes.  Exit codes: 0 success, 1 usage
//! error, 2 invariant violation, 3 capacity exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

use edgewalk::apps::{
    self, label_contains_elements, AppInstance, AppKind, ElementDistinctnessProblem,
    UnorderedSearchProblem,
};
use edgewalk::builders;
use edgewalk::chain::{analyze, ChainAnalysis, MarkovChain};
use edgewalk::jsonio::{fmt_f64, to_json_string};
use edgewalk::reflection::{reflection_error_suite, ReflectionConfig, ReflectionReport};
use edgewalk::search::{
    classical_search, marked_from_labels, quantum_search, ClassicalAlgorithm, ClassicalReport,
    CostWeights, NoOracle, QuantumReport, ReflectorKind, SearchOracle,
};
use edgewalk::walk::{discriminant_spectrum, walk_spectrum, DirectMode, SpectrumOptions};
use edgewalk::{Error, Result};

#[derive(Parser)]
#[command(
    name = "edgewalk",
    version,
    about = "Quantized-walk search toolkit: spectra, reflections, search runs, applications"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the walk eigenphase spectrum of a chain against the
    /// singular-value prediction and report the gap inequality margin.
    Spectrum(SpectrumArgs),
    /// Run a batch of seeded search trials on a chain.
    Search(SearchArgs),
    /// Sweep the approximate-reflection error over qubit budgets.
    Reflect(ReflectArgs),
    /// Application cost models (exponent sweeps) and simulated instances.
    Apps(AppsArgs),
    /// Build a chain, or validate and canonically re-serialize one.
    Chain(ChainArgs),
}

/// Where the chain comes from: a built-in family or a JSON file.
#[derive(Args)]
struct ChainSelect {
    /// Chain family to build.
    #[arg(long = "chain", value_enum)]
    family: Option<Family>,
    /// Ground-set size for the family.
    #[arg(long)]
    n: Option<usize>,
    /// Subset/tuple size (johnson and exchange families).
    #[arg(long)]
    r: Option<usize>,
    /// Load the chain from a JSON file instead of building a family.
    #[arg(long = "chain-file", conflicts_with_all = ["family", "n", "r"])]
    chain_file: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// Uniform walk on the complete graph K_n.
    Complete,
    /// Set walk on r-subsets of {1..n}.
    Johnson,
    /// Lazy exchange walk on r-tuples of distinct elements of {1..n}.
    Exchange,
}

impl ChainSelect {
    fn build(&self) -> Result<MarkovChain> {
        if let Some(path) = &self.chain_file {
            let text = std::fs::read_to_string(path)?;
            return MarkovChain::from_json_str(&text);
        }
        let family = self.family.ok_or_else(|| {
            Error::InvalidParameter(
                "select a chain: --chain <complete|johnson|exchange> with --n (and --r), \
                 or --chain-file <path>"
                    .into(),
            )
        })?;
        let n = self
            .n
            .ok_or_else(|| Error::InvalidParameter("--n is required with --chain".into()))?;
        match family {
            Family::Complete => builders::complete_graph(n),
            Family::Johnson => {
                let r = self.r.ok_or_else(|| {
                    Error::InvalidParameter("--r is required for the johnson family".into())
                })?;
                builders::johnson(n, r)
            }
            Family::Exchange => {
                let r = self.r.ok_or_else(|| {
                    Error::InvalidParameter("--r is required for the exchange family".into())
                })?;
                builders::exchange_walk(n, r)
            }
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectArg {
    /// Compute directly when the edge dimension fits the cap.
    Auto,
    /// Fail with a capacity error instead of skipping.
    Require,
    /// Predictions only.
    Skip,
}

impl From<DirectArg> for DirectMode {
    fn from(value: DirectArg) -> Self {
        match value {
            DirectArg::Auto => DirectMode::Auto,
            DirectArg::Require => DirectMode::Require,
            DirectArg::Skip => DirectMode::Skip,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    chain: ChainSelect,
    /// Direct eigenphase verification mode.
    #[arg(long, value_enum, default_value = "auto")]
    direct: DirectArg,
    /// Edge-dimension cap for the direct computation.
    #[arg(long = "direct-cap", default_value_t = 8192)]
    direct_cap: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    chain: ChainSelect,
    /// classical-1 | classical-2 | classical-3 | quantum-exact | quantum-pe.
    #[arg(long)]
    algorithm: String,
    /// Comma-separated marked state labels.
    #[arg(long, value_delimiter = ',')]
    marked: Vec<String>,
    /// Mark every state whose subset label contains all of these 1-based
    /// elements.
    #[arg(long = "marked-containing", value_delimiter = ',', conflicts_with = "marked")]
    marked_containing: Vec<usize>,
    /// Seeded measurement/run trials.
    #[arg(long, default_value_t = 100)]
    trials: u64,
    /// Master seed; trial i uses stream i.
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Override the rotation-optimal iteration count (quantum only).
    #[arg(long)]
    iterations: Option<u64>,
    /// Estimation bank width for quantum-pe (default: recommended for the
    /// chain's phase gap).
    #[arg(long)]
    s: Option<usize>,
    /// Estimation bank count for quantum-pe.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Cost units charged per stationary-sample setup.
    #[arg(long = "setup-cost", default_value_t = 1.0)]
    setup_cost: f64,
    /// Cost units charged per chain-step update.
    #[arg(long = "update-cost", default_value_t = 1.0)]
    update_cost: f64,
    /// Cost units charged per membership check.
    #[arg(long = "check-cost", default_value_t = 1.0)]
    check_cost: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReflectArgs {
    #[command(flatten)]
    chain: ChainSelect,
    /// Bank-width sweep, inclusive lo:hi.
    #[arg(long = "s-range", default_value = "2:4", value_parser = parse_range)]
    s_range: (usize, usize),
    /// Bank-count sweep, inclusive lo:hi.
    #[arg(long = "k-range", default_value = "1:2", value_parser = parse_range)]
    k_range: (usize, usize),
    /// Random invariant-subspace probes per configuration.
    #[arg(long = "random-states", default_value_t = 4)]
    random_states: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// csv (sweep table) or json (array of reports).
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write the sweep here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AppsArgs {
    /// Application kind, full name or alias (ed, mpv, assoc, triangle, gc,
    /// us).
    #[arg(long)]
    kind: String,
    /// Input size; plain integer or scientific notation (e.g. 1e6).
    #[arg(long, value_parser = parse_size)]
    n: u64,
    /// Subset size (required to simulate collision finding).
    #[arg(long)]
    r: Option<usize>,
    /// Run the concrete counted-query instance instead of the cost model.
    #[arg(long)]
    simulate: bool,
    /// Planted colliding pair a,b (1-based) for simulated collision
    /// finding; defaults to 1,2.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    collision: Vec<usize>,
    /// Marked cells (1-based) for simulated unordered search.
    #[arg(long, value_delimiter = ',')]
    marked: Vec<usize>,
    /// Load the instance table from a JSON file written by this tool.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Search algorithm for --simulate.
    #[arg(long, default_value = "quantum-exact")]
    algorithm: String,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Estimation bank width for quantum-pe (default: recommended).
    #[arg(long)]
    s: Option<usize>,
    /// Estimation bank count for quantum-pe.
    #[arg(long, default_value_t = 3)]
    k: usize,
    /// Default: csv for the cost model, json for simulations.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ChainArgs {
    #[command(flatten)]
    chain: ChainSelect,
    /// Emit the ergodicity/gap analysis summary instead of the chain.
    #[arg(long)]
    analyze: bool,
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_range(text: &str) -> std::result::Result<(usize, usize), String> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| "expected an inclusive range lo:hi".to_string())?;
    let lo: usize = a.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: usize = b.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo == 0 || hi < lo {
        return Err("expected 1 <= lo <= hi".into());
    }
    Ok((lo, hi))
}

fn parse_size(text: &str) -> std::result::Result<u64, String> {
    if let Ok(v) = text.parse::<u64>() {
        return Ok(v);
    }
    let f: f64 = text
        .parse()
        .map_err(|_| format!("{text:?} is not a size; pass an integer or e.g. 1e6"))?;
    if f.is_finite() && f >= 1.0 && f <= 9e15 && f == f.round() {
        Ok(f as u64)
    } else {
        Err(format!("{text:?} is not a whole positive size"))
    }
}

/// Exit-code contract: 0 success, 1 usage, 2 invariant violation,
/// 3 capacity.
fn error_code(err: &Error) -> u8 {
    match err {
        Error::DegenerateChain(_)
        | Error::InvalidParameter(_)
        | Error::Json(_)
        | Error::Io(_) => 1,
        Error::NotErgodic(_) | Error::InvalidChain(_) => 2,
        Error::CapacityExceeded { .. } => 3,
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Spectrum(args) => cmd_spectrum(args),
        Command::Search(args) => cmd_search(args),
        Command::Reflect(args) => cmd_reflect(args),
        Command::Apps(args) => cmd_apps(args),
        Command::Chain(args) => cmd_chain(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(error_code(&err))
        }
    }
}

fn cmd_spectrum(args: SpectrumArgs) -> Result<()> {
    let chain = args.chain.build()?;
    let analysis = analyze(&chain)?;
    let report = walk_spectrum(
        &chain,
        &analysis,
        SpectrumOptions {
            direct: args.direct.into(),
            direct_cap: args.direct_cap,
        },
    )?;
    emit(&args.out, &to_json_string(&report)?)
}

/// One search report, whichever loop produced it.
#[derive(Serialize)]
#[serde(untagged)]
enum SearchReport {
    Classical(Box<ClassicalReport>),
    Quantum(Box<QuantumReport>),
}

#[allow(clippy::too_many_arguments)]
fn run_search(
    chain: &MarkovChain,
    analysis: &ChainAnalysis,
    marked: &[bool],
    weights: CostWeights,
    algorithm: &str,
    iterations: Option<u64>,
    trials: u64,
    seed: u64,
    s: Option<usize>,
    k: usize,
    oracle: &mut dyn SearchOracle,
) -> Result<SearchReport> {
    enum Loop {
        Classical(ClassicalAlgorithm),
        Quantum(ReflectorKind),
    }
    let chosen = match algorithm {
        "classical-1" => Loop::Classical(ClassicalAlgorithm::Resample),
        "classical-2" => Loop::Classical(ClassicalAlgorithm::BlockWalk),
        "classical-3" => Loop::Classical(ClassicalAlgorithm::StepWalk),
        "quantum-exact" => Loop::Quantum(ReflectorKind::Exact),
        "quantum-pe" => {
            let s = match s {
                Some(s) => s,
                None => {
                    let disc = discriminant_spectrum(chain, analysis)?;
                    ReflectionConfig::recommended_s(disc.phase_gap)?
                }
            };
            Loop::Quantum(ReflectorKind::PhaseEstimation(ReflectionConfig { s, k }))
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown algorithm {other:?}; expected classical-1 | classical-2 | classical-3 \
                 | quantum-exact | quantum-pe"
            )))
        }
    };
    match chosen {
        Loop::Classical(alg) => Ok(SearchReport::Classical(Box::new(classical_search(
            chain, analysis, marked, weights, alg, trials, seed, oracle,
        )?))),
        Loop::Quantum(reflector) => Ok(SearchReport::Quantum(Box::new(quantum_search(
            chain, analysis, marked, weights, reflector, iterations, trials, seed, oracle,
        )?))),
    }
}

fn cmd_search(args: SearchArgs) -> Result<()> {
    let chain = args.chain.build()?;
    let analysis = analyze(&chain)?;
    let marked: Vec<bool> = if !args.marked.is_empty() {
        marked_from_labels(&chain, &args.marked)?
    } else if !args.marked_containing.is_empty() {
        chain
            .labels()
            .iter()
            .map(|l| label_contains_elements(l, &args.marked_containing))
            .collect()
    } else {
        return Err(Error::InvalidParameter(
            "pass --marked <labels> or --marked-containing <elements>".into(),
        ));
    };
    let weights = CostWeights {
        setup: args.setup_cost,
        update: args.update_cost,
        check: args.check_cost,
    };
    let mut oracle = NoOracle;
    let report = run_search(
        &chain,
        &analysis,
        &marked,
        weights,
        &args.algorithm,
        args.iterations,
        args.trials,
        args.seed,
        args.s,
        args.k,
        &mut oracle,
    )?;
    emit(&args.out, &to_json_string(&report)?)
}

fn reflect_csv(rows: &[ReflectionReport]) -> String {
    let mut text = String::from(
        "s,k,controlled_walk_calls,predicted_error,worst_eigenvector_error,\
         worst_random_error,measured_error,stationary_deviation,ancilla_leak,ancilla_restored",
    );
    for r in rows {
        text.push('\n');
        text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}",
            r.s,
            r.k,
            r.controlled_walk_calls,
            fmt_f64(r.predicted_error),
            fmt_f64(r.worst_eigenvector_error),
            fmt_f64(r.worst_random_error),
            fmt_f64(r.measured_error),
            fmt_f64(r.stationary_deviation),
            fmt_f64(r.ancilla_leak),
            r.ancilla_restored,
        ));
    }
    text
}

fn cmd_reflect(args: ReflectArgs) -> Result<()> {
    let chain = args.chain.build()?;
    let analysis = analyze(&chain)?;
    let mut rows = Vec::new();
    for s in args.s_range.0..=args.s_range.1 {
        for k in args.k_range.0..=args.k_range.1 {
            rows.push(reflection_error_suite(
                &chain,
                &analysis,
                ReflectionConfig { s, k },
                args.random_states,
                args.seed,
            )?);
        }
    }
    let text = match args.format {
        FormatArg::Csv => reflect_csv(&rows),
        FormatArg::Json => to_json_string(&rows)?,
    };
    emit(&args.out, &text)
}

fn exponent_csv(fit: &apps::ExponentFit) -> String {
    let mut text = String::from("kind,n,r_star,cost_star,fitted_exponent");
    for s in &fit.samples {
        text.push('\n');
        text.push_str(&format!(
            "{},{},{},{},{}",
            s.kind,
            s.n,
            s.r_star,
            fmt_f64(s.cost_star),
            fmt_f64(fit.exponent),
        ));
    }
    text
}

/// Everything a simulated application run reports: the instance facts, the
/// literal query count, the abstract cost total, and the search report.
#[derive(Serialize)]
struct AppSimulation {
    kind: String,
    n: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<usize>,
    /// 1-based colliding pairs (collision finding only).
    #[serde(skip_serializing_if = "Option::is_none")]
    collision_pairs: Option<Vec<(usize, usize)>>,
    marked_count: usize,
    epsilon: f64,
    /// Literal counted table reads over the whole run.
    oracle_queries: u64,
    /// Abstract cost-unit total over the whole run, with weights set to
    /// the per-event read counts — must equal `oracle_queries`.
    cost_units: f64,
    search: SearchReport,
}

fn simulation_totals(report: &SearchReport, trials: u64) -> f64 {
    match report {
        SearchReport::Classical(r) => r.per_trial_cost.total() * trials as f64,
        SearchReport::Quantum(r) => r.cost.total(),
    }
}

fn simulate_collisions(args: &AppsArgs) -> Result<AppSimulation> {
    let n = args.n as usize;
    let r = args.r.ok_or_else(|| {
        Error::InvalidParameter("--r is required to simulate collision finding".into())
    })?;
    let values = match &args.instance {
        Some(path) => {
            let inst = AppInstance::from_json_str(&std::fs::read_to_string(path)?)?;
            if AppKind::parse(&inst.kind)? != AppKind::ElementDistinctness {
                return Err(Error::InvalidParameter(format!(
                    "instance file holds kind {:?}, not a collision table",
                    inst.kind
                )));
            }
            if inst.n != n {
                return Err(Error::InvalidParameter(format!(
                    "instance table has {} entries but --n is {n}",
                    inst.n
                )));
            }
            inst.table
        }
        None => {
            let pair = if args.collision.is_empty() {
                (1, 2)
            } else {
                (args.collision[0], args.collision[1])
            };
            apps::element_distinctness_table(n, Some(pair))?
        }
    };
    let problem: ElementDistinctnessProblem = apps::element_distinctness_problem(n, r, &values)?;
    let analysis = analyze(&problem.chain)?;
    // Weights mirror the literal reads: a setup reads the subset, an
    // update reads one element, a check reads nothing.
    let weights = CostWeights {
        setup: r as f64,
        update: 1.0,
        check: 0.0,
    };
    let mut oracle = problem.oracle();
    let report = run_search(
        &problem.chain,
        &analysis,
        &problem.marked,
        weights,
        &args.algorithm,
        None,
        args.trials,
        args.seed,
        args.s,
        args.k,
        &mut oracle,
    )?;
    Ok(AppSimulation {
        kind: AppKind::ElementDistinctness.name().to_string(),
        n,
        r: Some(r),
        collision_pairs: Some(
            problem
                .collision_pairs
                .iter()
                .map(|&(a, b)| (a + 1, b + 1))
                .collect(),
        ),
        marked_count: problem.marked_count,
        epsilon: problem.epsilon,
        oracle_queries: oracle.queries(),
        cost_units: simulation_totals(&report, args.trials),
        search: report,
    })
}

fn simulate_unordered(args: &AppsArgs) -> Result<AppSimulation> {
    let n = args.n as usize;
    let problem: UnorderedSearchProblem = match &args.instance {
        Some(path) => {
            let inst = AppInstance::from_json_str(&std::fs::read_to_string(path)?)?;
            if AppKind::parse(&inst.kind)? != AppKind::UnorderedSearch {
                return Err(Error::InvalidParameter(format!(
                    "instance file holds kind {:?}, not an unordered-search table",
                    inst.kind
                )));
            }
            apps::unordered_search_from_table(&inst.table)?
        }
        None => {
            if args.marked.is_empty() {
                return Err(Error::InvalidParameter(
                    "pass --marked <cells> (1-based) to simulate unordered search".into(),
                ));
            }
            apps::unordered_search_problem(n, &args.marked)?
        }
    };
    let analysis = analyze(&problem.chain)?;
    // Only checks read the table.
    let weights = CostWeights {
        setup: 0.0,
        update: 0.0,
        check: 1.0,
    };
    let mut oracle = problem.oracle();
    let report = run_search(
        &problem.chain,
        &analysis,
        &problem.marked,
        weights,
        &args.algorithm,
        None,
        args.trials,
        args.seed,
        args.s,
        args.k,
        &mut oracle,
    )?;
    Ok(AppSimulation {
        kind: AppKind::UnorderedSearch.name().to_string(),
        n: problem.n,
        r: None,
        collision_pairs: None,
        marked_count: problem.marked_count,
        epsilon: problem.epsilon,
        oracle_queries: oracle.queries(),
        cost_units: simulation_totals(&report, args.trials),
        search: report,
    })
}

fn cmd_apps(args: AppsArgs) -> Result<()> {
    let kind = AppKind::parse(&args.kind)?;
    if args.simulate {
        let sim = match kind {
            AppKind::ElementDistinctness => simulate_collisions(&args)?,
            AppKind::UnorderedSearch => simulate_unordered(&args)?,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "{} has no executable instance; only {} and {} can be simulated",
                    other.name(),
                    AppKind::ElementDistinctness.name(),
                    AppKind::UnorderedSearch.name(),
                )))
            }
        };
        let text = match args.format.unwrap_or(FormatArg::Json) {
            FormatArg::Json => to_json_string(&sim)?,
            FormatArg::Csv => {
                return Err(Error::InvalidParameter(
                    "simulation reports are JSON only".into(),
                ))
            }
        };
        emit(&args.out, &text)
    } else {
        let fit = apps::fitted_exponent(kind, args.n)?;
        let text = match args.format.unwrap_or(FormatArg::Csv) {
            FormatArg::Csv => exponent_csv(&fit),
            FormatArg::Json => to_json_string(&fit)?,
        };
        emit(&args.out, &text)
    }
}

/// Serializable slice of the chain analysis.
#[derive(Serialize)]
struct AnalysisSummary {
    states: usize,
    ergodic: bool,
    reversible: bool,
    delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    signed_gap: Option<f64>,
    stationary: Vec<f64>,
}

fn cmd_chain(args: ChainArgs) -> Result<()> {
    let chain = args.chain.build()?;
    if args.analyze {
        let analysis = analyze(&chain)?;
        let summary = AnalysisSummary {
            states: chain.n(),
            ergodic: analysis.ergodic,
            reversible: analysis.reversible,
            delta: analysis.delta,
            signed_gap: analysis.signed_gap,
            stationary: analysis.stationary.clone(),
        };
        emit(&args.out, &to_json_string(&summary)?)
    } else {
        emit(&args.out, &chain.to_json_string()?)
    }
}
