//! `msbell` — exact Mermin-Svetlichny polynomial construction, communication
//! model maxima, quantum violation optimization, and nonlocality
//! certificates from the command line.
//!
//! Every command is a pure function of its arguments (plus the mandatory
//! seed for stochastic commands); repeated invocations produce byte
//! identical output. Failures print a machine-readable JSON record
//! `{command, stage, message}` on stderr and exit nonzero.

use clap::{Args, Parser, Subcommand, ValueEnum};
use msbell_core::classify::{classify, theta_critical};
use msbell_core::error::Error as CoreError;
use msbell_core::models::{
    broadcast_max_naive, conditional_max_with_limits, evaluate_strategies_exact,
    grouping_max_with_limits, local_max_with_limits, restrained_max_naive, tight_strategy,
    BroadcastSet, EnumerationLimits, Partition, RestrainedConfig,
};
use msbell_core::optimize::{
    maximize_with, sweep_ghz, sweep_w, w_asymptote, OptimizeOptions, DEFAULT_ASYMPTOTE_N,
};
use msbell_core::poly::{
    algebraic_bound, build_kind, build_s, local_bound, model_bound, MsPolynomial, PolyKind,
    PolynomialRecord,
};
use msbell_core::quantum::{
    correlation_ghz_closed, correlation_table_from_amplitudes, correlation_table_statevector,
    correlation_w_closed, Complex64, Settings, StateSpec,
};
use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Environment variable holding the default output directory.
const OUT_DIR_ENV: &str = "MSBELL_OUT_DIR";

#[derive(Parser)]
#[command(
    name = "msbell",
    about = "Mermin-Svetlichny polynomials, communication-model bounds, and quantum violations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    M,
    Mprime,
    Mplus,
    Mminus,
}

impl From<KindArg> for PolyKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::M => PolyKind::M,
            KindArg::Mprime => PolyKind::MPrime,
            KindArg::Mplus => PolyKind::MPlus,
            KindArg::Mminus => PolyKind::MMinus,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StateArg {
    Ghz,
    W,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Statevector,
    Closed,
}

#[derive(Args)]
struct OutputOpts {
    /// Write the result here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print a family polynomial's exact coefficients.
    Poly {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "m")]
        kind: KindArg,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Local, algebraic, and per-m communication-model bounds.
    Bounds {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exact maximum over deterministic local strategies.
    LhvMax {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "m")]
        kind: KindArg,
        /// JSON polynomial file overriding --n/--kind.
        #[arg(long)]
        poly_file: Option<PathBuf>,
        #[arg(long, default_value_t = 8)]
        max_local_parties: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exact maximum under a communication model (grouping, broadcasting,
    /// or restrained subset).
    ModelMax {
        #[arg(long)]
        n: usize,
        /// Family member; defaults to S_n^m selected by the model's m.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
        /// Grouping model partition, e.g. "1,2;3,4".
        #[arg(long, conflicts_with_all = ["broadcast", "subset"])]
        partition: Option<String>,
        /// Broadcasting model set, e.g. "1,3" (empty string for none).
        #[arg(long, conflicts_with = "subset")]
        broadcast: Option<String>,
        /// Restrained-subset model subset, e.g. "1,2".
        #[arg(long)]
        subset: Option<String>,
        /// Outside-party communication targets, e.g. "3:1,4:2".
        #[arg(long, requires = "subset")]
        targets: Option<String>,
        /// Validate with the doubly-exponential direct enumeration instead
        /// of the conditional decomposition (small n only).
        #[arg(long)]
        naive: bool,
        #[arg(long)]
        poly_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1u128 << 26)]
        max_candidates: u128,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Constructive strategies reaching |S_n^m| = 2^((n-m)/2) exactly.
    Tight {
        #[arg(long)]
        n: usize,
        /// Partition, e.g. "1,2;3,4".
        #[arg(long)]
        partition: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Correlation table of a GHZ or W state under given settings.
    QuantumCorr {
        #[arg(long, value_enum)]
        state: StateArg,
        #[arg(long)]
        n: usize,
        /// GHZ angle in radians (required for --state ghz).
        #[arg(long)]
        theta: Option<f64>,
        /// JSON settings file: one {setting0, setting1} object per party.
        #[arg(long)]
        settings_file: PathBuf,
        /// JSON amplitudes file ([[re, im], ...]) replacing the named state.
        #[arg(long, conflicts_with_all = ["state", "theta"])]
        amplitudes_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "statevector")]
        engine: EngineArg,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Maximize a family expectation over measurement settings.
    Optimize {
        #[arg(long, value_enum)]
        state: StateArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long, value_enum, default_value = "m")]
        kind: KindArg,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Seed for the restart streams (mandatory for reproducibility).
        #[arg(long)]
        seed: u64,
        /// Constrain all parties to identical settings.
        #[arg(long)]
        identical: bool,
        /// Record one trace row per restart.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Optimized GHZ violation across an entanglement-angle grid.
    SweepGhz {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 20)]
        grid_points: usize,
        #[arg(long, value_enum, default_value = "m")]
        kind: KindArg,
        #[arg(long, default_value_t = 12)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Optimized W-state violation across party counts.
    SweepW {
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 19)]
        n_max: usize,
        #[arg(long, value_enum, default_value = "mplus")]
        kind: KindArg,
        #[arg(long, default_value_t = 12)]
        restarts: usize,
        #[arg(long)]
        seed: u64,
        /// Largest n for the general (non-identical) optimization path.
        #[arg(long, default_value_t = 9)]
        general_limit: usize,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Asymptotic W-state maximum from the theta = c/sqrt(n) scaling.
    Asymptote {
        #[arg(long, value_enum, default_value = "mplus")]
        kind: KindArg,
        #[arg(long, default_value_t = DEFAULT_ASYMPTOTE_N)]
        eval_n: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Certify multipartite nonlocal content from observed values.
    Classify {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m_value: Option<f64>,
        #[arg(long)]
        mplus_value: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        margin: f64,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Regenerate the violation-curve datasets (GHZ grid and W range).
    ReproduceFigures {
        /// Output directory; falls back to $MSBELL_OUT_DIR, then ".".
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        ghz_grid: usize,
        #[arg(long, default_value_t = 6)]
        ghz_n_max: usize,
        #[arg(long, default_value_t = 19)]
        w_n_max: usize,
        #[arg(long, default_value_t = 9)]
        general_limit: usize,
        #[arg(long, default_value_t = 12)]
        restarts: usize,
    },
}

#[derive(Serialize)]
struct ErrorRecord {
    command: String,
    stage: String,
    message: String,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let record = ErrorRecord {
                    command: std::env::args().nth(1).unwrap_or_default(),
                    stage: "parse".to_string(),
                    message: e.to_string(),
                };
                eprintln!("{}", serde_json::to_string(&record).unwrap());
                return ExitCode::from(2);
            }
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    let name = command_name(&cli.command);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let record = ErrorRecord {
                command: name.to_string(),
                stage: err.stage.to_string(),
                message: err.message,
            };
            eprintln!("{}", serde_json::to_string(&record).unwrap());
            ExitCode::FAILURE
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Poly { .. } => "poly",
        Command::Bounds { .. } => "bounds",
        Command::LhvMax { .. } => "lhv-max",
        Command::ModelMax { .. } => "model-max",
        Command::Tight { .. } => "tight",
        Command::QuantumCorr { .. } => "quantum-corr",
        Command::Optimize { .. } => "optimize",
        Command::SweepGhz { .. } => "sweep-ghz",
        Command::SweepW { .. } => "sweep-w",
        Command::Asymptote { .. } => "asymptote",
        Command::Classify { .. } => "classify",
        Command::ReproduceFigures { .. } => "reproduce-figures",
    }
}

struct CliError {
    stage: &'static str,
    message: String,
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError { stage: "run", message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError { stage: "io", message: e.to_string() }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError { stage: "io", message: e.to_string() }
    }
}

fn invalid(message: impl Into<String>) -> CliError {
    CliError { stage: "run", message: message.into() }
}

fn emit(output: &OutputOpts, text: &str) -> Result<(), CliError> {
    match &output.out {
        Some(path) => {
            fs::write(path, text)?;
            Ok(())
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn json_pretty<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(format!("{}\n", serde_json::to_string_pretty(value)?))
}

fn parse_party_list(text: &str, n: usize) -> Result<Vec<usize>, CliError> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|tok| {
            let j: usize = tok
                .trim()
                .parse()
                .map_err(|_| invalid(format!("invalid party index '{tok}'")))?;
            if j == 0 || j > n {
                return Err(invalid(format!("party index {j} out of range for n={n}")));
            }
            Ok(j)
        })
        .collect()
}

fn parse_partition(text: &str, n: usize) -> Result<Partition, CliError> {
    let groups: Result<Vec<Vec<usize>>, CliError> =
        text.split(';').map(|g| parse_party_list(g, n)).collect();
    Ok(Partition::new(n, groups?)?)
}

fn load_polynomial(path: &Path) -> Result<MsPolynomial, CliError> {
    let text = fs::read_to_string(path)?;
    let record: PolynomialRecord = serde_json::from_str(&text)?;
    Ok(MsPolynomial::try_from(record)?)
}

fn load_settings(path: &Path, n: usize) -> Result<Settings, CliError> {
    let text = fs::read_to_string(path)?;
    let settings: Settings = serde_json::from_str(&text)?;
    if settings.len() != n {
        return Err(invalid(format!(
            "settings file has {} parties, expected {n}",
            settings.len()
        )));
    }
    Ok(settings)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Poly { n, kind, format, output } => {
            let poly = build_kind(n, kind.into())?;
            let record = PolynomialRecord::from(&poly);
            let text = match format {
                FormatArg::Json => json_pretty(&record)?,
                FormatArg::Csv => {
                    let mut out = String::from("assignment,numerator,half_exponent\n");
                    for t in &record.terms {
                        out.push_str(&format!(
                            "{},{},{}\n",
                            t.assignment, t.numerator, t.half_exponent
                        ));
                    }
                    out
                }
            };
            emit(&output, &text)
        }
        Command::Bounds { n, format, output } => {
            #[derive(Serialize)]
            struct ModelRow {
                m: usize,
                bound_exact: String,
                bound: f64,
            }
            #[derive(Serialize)]
            struct BoundsReport {
                n: usize,
                local_m: f64,
                local_mplus: f64,
                algebraic_m: f64,
                algebraic_mplus: f64,
                model: Vec<ModelRow>,
            }
            let model: Vec<ModelRow> = (1..=n)
                .map(|m| {
                    let b = model_bound(n, m)?;
                    Ok(ModelRow { m, bound_exact: b.to_string(), bound: b.to_f64() })
                })
                .collect::<Result<_, CoreError>>()?;
            let report = BoundsReport {
                n,
                local_m: local_bound(PolyKind::M).to_f64(),
                local_mplus: local_bound(PolyKind::MPlus).to_f64(),
                algebraic_m: algebraic_bound(PolyKind::M, n)?.to_f64(),
                algebraic_mplus: algebraic_bound(PolyKind::MPlus, n)?.to_f64(),
                model,
            };
            let text = match format {
                FormatArg::Json => json_pretty(&report)?,
                FormatArg::Csv => {
                    let mut out = String::from("m,bound_exact,bound\n");
                    for row in &report.model {
                        out.push_str(&format!("{},{},{}\n", row.m, row.bound_exact, row.bound));
                    }
                    out
                }
            };
            emit(&output, &text)
        }
        Command::LhvMax { n, kind, poly_file, max_local_parties, output } => {
            let poly = match &poly_file {
                Some(path) => load_polynomial(path)?,
                None => build_kind(n, kind.into())?,
            };
            let limits = EnumerationLimits { max_local_parties, ..Default::default() };
            let lm = local_max_with_limits(&poly, &limits)?;
            #[derive(Serialize)]
            struct LhvReport {
                value: f64,
                value_exact: String,
                witness: Vec<(i8, i8)>,
            }
            let report = LhvReport {
                value: lm.value.to_f64(),
                value_exact: lm.value.to_string(),
                witness: lm.witness,
            };
            emit(&output, &json_pretty(&report)?)
        }
        Command::ModelMax {
            n,
            kind,
            partition,
            broadcast,
            subset,
            targets,
            naive,
            poly_file,
            max_candidates,
            output,
        } => {
            let limits = EnumerationLimits { max_candidates, ..Default::default() };
            #[derive(Serialize)]
            struct ModelMaxReport {
                model: &'static str,
                engine: &'static str,
                polynomial: String,
                value: f64,
                value_exact: String,
                model_bound: Option<f64>,
                #[serde(skip_serializing_if = "Option::is_none")]
                witness: Option<serde_json::Value>,
            }
            let pick_poly = |m: usize| -> Result<(MsPolynomial, String), CliError> {
                match (&poly_file, kind) {
                    (Some(path), _) => Ok((load_polynomial(path)?, "custom".to_string())),
                    (None, Some(k)) => {
                        let pk: PolyKind = k.into();
                        Ok((build_kind(n, pk)?, pk.to_string()))
                    }
                    (None, None) => Ok((build_s(n, m)?, format!("S_{n}^{m}"))),
                }
            };
            let report = if let Some(text) = &partition {
                let part = parse_partition(text, n)?;
                let m = part.num_groups();
                let (poly, label) = pick_poly(m)?;
                let gm = grouping_max_with_limits(&poly, &part, &limits)?;
                ModelMaxReport {
                    model: "grouping",
                    engine: "enumeration",
                    polynomial: label,
                    value: gm.value.to_f64(),
                    value_exact: gm.value.to_string(),
                    model_bound: model_bound(n, m).ok().map(|b| b.to_f64()),
                    witness: Some(serde_json::to_value(&gm.witness)?),
                }
            } else if let Some(text) = &subset {
                let members: BTreeSet<usize> = parse_party_list(text, n)?.into_iter().collect();
                let m = members.len();
                let target_map: BTreeMap<usize, usize> = match &targets {
                    None => BTreeMap::new(),
                    Some(spec) => spec
                        .split(',')
                        .filter(|t| !t.trim().is_empty())
                        .map(|tok| {
                            let (a, b) = tok
                                .split_once(':')
                                .ok_or_else(|| invalid(format!("bad target '{tok}'")))?;
                            let outside: usize =
                                a.trim().parse().map_err(|_| invalid("bad target index"))?;
                            let source: usize =
                                b.trim().parse().map_err(|_| invalid("bad target index"))?;
                            Ok::<(usize, usize), CliError>((outside, source))
                        })
                        .collect::<Result<_, _>>()?,
                };
                let cfg = RestrainedConfig::new(n, members, target_map)?;
                let (poly, label) = pick_poly(m)?;
                let value = restrained_max_naive(&poly, &cfg, &limits)?;
                ModelMaxReport {
                    model: "restrained-subset",
                    engine: "naive-enumeration",
                    polynomial: label,
                    value: value.to_f64(),
                    value_exact: value.to_string(),
                    model_bound: model_bound(n, m).ok().map(|b| b.to_f64()),
                    witness: None,
                }
            } else {
                let text = broadcast.as_deref().unwrap_or("");
                let members: BTreeSet<usize> = parse_party_list(text, n)?.into_iter().collect();
                let k = members.len();
                let b = BroadcastSet::new(n, members)?;
                let m = n - k;
                let (poly, label) = pick_poly(m.max(1))?;
                if naive {
                    let value = broadcast_max_naive(&poly, &b, &limits)?;
                    ModelMaxReport {
                        model: "broadcasting",
                        engine: "naive-enumeration",
                        polynomial: label,
                        value: value.to_f64(),
                        value_exact: value.to_string(),
                        model_bound: model_bound(n, m.max(1)).ok().map(|v| v.to_f64()),
                        witness: None,
                    }
                } else {
                    let cm = conditional_max_with_limits(&poly, &b, &limits)?;
                    ModelMaxReport {
                        model: "broadcasting",
                        engine: "conditional-decomposition",
                        polynomial: label,
                        value: cm.value.to_f64(),
                        value_exact: cm.value.to_string(),
                        model_bound: model_bound(n, m.max(1)).ok().map(|v| v.to_f64()),
                        witness: Some(serde_json::to_value(&cm.branches)?),
                    }
                }
            };
            emit(&output, &json_pretty(&report)?)
        }
        Command::Tight { n, partition, output } => {
            let part = parse_partition(&partition, n)?;
            let m = part.num_groups();
            let strategies = tight_strategy(n, &part)?;
            let poly = build_s(n, m)?;
            let achieved = evaluate_strategies_exact(&poly, &strategies).abs();
            let bound = model_bound(n, m)?;
            #[derive(Serialize)]
            struct TightReport {
                n: usize,
                m: usize,
                polynomial: String,
                value: f64,
                value_exact: String,
                bound_exact: String,
                achieves_bound: bool,
                strategies: serde_json::Value,
            }
            let report = TightReport {
                n,
                m,
                polynomial: format!("S_{n}^{m}"),
                value: achieved.to_f64(),
                value_exact: achieved.to_string(),
                bound_exact: bound.to_string(),
                achieves_bound: achieved == bound,
                strategies: serde_json::to_value(&strategies)?,
            };
            emit(&output, &json_pretty(&report)?)
        }
        Command::QuantumCorr {
            state,
            n,
            theta,
            settings_file,
            amplitudes_file,
            engine,
            format,
            output,
        } => {
            let settings = load_settings(&settings_file, n)?;
            let table = match (&amplitudes_file, state, engine) {
                (Some(path), _, _) => {
                    let text = fs::read_to_string(path)?;
                    let pairs: Vec<[f64; 2]> = serde_json::from_str(&text)?;
                    let amps: Vec<Complex64> =
                        pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect();
                    correlation_table_from_amplitudes(&amps, &settings)?
                }
                (None, StateArg::Ghz, EngineArg::Statevector) => {
                    let spec = StateSpec::ghz(n, theta.ok_or_else(|| invalid("--theta required for ghz"))?)?;
                    correlation_table_statevector(&spec, &settings)?
                }
                (None, StateArg::Ghz, EngineArg::Closed) => {
                    let t = theta.ok_or_else(|| invalid("--theta required for ghz"))?;
                    correlation_ghz_closed(n, t, &settings)?
                }
                (None, StateArg::W, EngineArg::Statevector) => {
                    correlation_table_statevector(&StateSpec::w(n)?, &settings)?
                }
                (None, StateArg::W, EngineArg::Closed) => correlation_w_closed(n, &settings)?,
            };
            let text = match format {
                FormatArg::Csv => table.to_csv(),
                FormatArg::Json => json_pretty(&table)?,
            };
            emit(&output, &text)
        }
        Command::Optimize { state, n, theta, kind, restarts, seed, identical, trace, output } => {
            let spec = match state {
                StateArg::Ghz => StateSpec::ghz(
                    n,
                    theta.ok_or_else(|| invalid("--theta required for ghz"))?,
                )?,
                StateArg::W => StateSpec::w(n)?,
            };
            let mut opts = OptimizeOptions::new(restarts, seed).identical(identical);
            opts.record_trace = trace;
            let result = maximize_with(&spec, kind.into(), &opts)?;
            emit(&output, &json_pretty(&result)?)
        }
        Command::SweepGhz { n_min, n_max, grid_points, kind, restarts, seed, output } => {
            if n_min == 0 || n_min > n_max {
                return Err(invalid("need 1 <= n-min <= n-max"));
            }
            if grid_points == 0 {
                return Err(invalid("grid-points must be positive"));
            }
            let thetas: Vec<f64> = (0..grid_points)
                .map(|i| FRAC_PI_4 * (i as f64 + 0.5) / grid_points as f64)
                .collect();
            let mut out = String::from("n,kind,theta,max_value,conjecture,residual\n");
            for n in n_min..=n_max {
                let rows = sweep_ghz(n, &thetas, kind.into(), restarts, seed)?;
                for r in rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.n,
                        PolyKind::from(kind),
                        r.theta,
                        r.max_value,
                        r.conjecture,
                        r.residual
                    ));
                }
            }
            emit(&output, &out)
        }
        Command::SweepW { n_min, n_max, kind, restarts, seed, general_limit, output } => {
            if n_min == 0 || n_min > n_max {
                return Err(invalid("need 1 <= n-min <= n-max"));
            }
            let rows = sweep_w(n_min..=n_max, kind.into(), restarts, seed, general_limit)?;
            let mut out = String::from("n,kind,identical_max,general_max,agreement_gap\n");
            for r in rows {
                out.push_str(&format!(
                    "{},{},{},{},{}\n",
                    r.n,
                    PolyKind::from(kind),
                    r.identical_max,
                    r.general_max.map_or(String::new(), |v| v.to_string()),
                    r.agreement_gap.map_or(String::new(), |v| v.to_string()),
                ));
            }
            emit(&output, &out)
        }
        Command::Asymptote { kind, eval_n, seed, output } => {
            let result = w_asymptote(kind.into(), eval_n, seed)?;
            emit(&output, &json_pretty(&result)?)
        }
        Command::Classify { n, m_value, mplus_value, margin, output } => {
            let cert = classify(n, m_value, mplus_value, margin)?;
            #[derive(Serialize)]
            struct ClassifyReport {
                #[serde(flatten)]
                certificate: msbell_core::classify::NonlocalityCertificate,
                theta_critical_per_level: Vec<(usize, f64)>,
            }
            let theta_critical_per_level = (1..=n)
                .map(|m| Ok((m, theta_critical(m)?)))
                .collect::<Result<_, CoreError>>()?;
            let report = ClassifyReport { certificate: cert, theta_critical_per_level };
            emit(&output, &json_pretty(&report)?)
        }
        Command::ReproduceFigures {
            out_dir,
            seed,
            ghz_grid,
            ghz_n_max,
            w_n_max,
            general_limit,
            restarts,
        } => {
            let dir = out_dir
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("."));
            fs::create_dir_all(&dir)?;

            // GHZ dataset: optimized violations over the entanglement angle
            let thetas: Vec<f64> = (0..ghz_grid)
                .map(|i| FRAC_PI_4 * (i as f64 + 0.5) / ghz_grid.max(1) as f64)
                .collect();
            let mut ghz_csv = String::from("n,kind,theta,max_value,conjecture,residual\n");
            for n in 3..=ghz_n_max {
                for kind in [PolyKind::M, PolyKind::MPlus] {
                    for r in sweep_ghz(n, &thetas, kind, restarts, seed)? {
                        ghz_csv.push_str(&format!(
                            "{},{},{},{},{},{}\n",
                            r.n, kind, r.theta, r.max_value, r.conjecture, r.residual
                        ));
                    }
                }
            }
            let ghz_path = dir.join("ghz_violation_curves.csv");
            fs::write(&ghz_path, ghz_csv)?;

            // W dataset: general + identical maxima and the asymptote
            let mut w_csv =
                String::from("n,kind,identical_max,general_max,agreement_gap,asymptote\n");
            for kind in [PolyKind::M, PolyKind::MPlus] {
                let asymptote = w_asymptote(kind, DEFAULT_ASYMPTOTE_N, seed)?;
                for r in sweep_w(3..=w_n_max, kind, restarts, seed, general_limit)? {
                    w_csv.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        r.n,
                        kind,
                        r.identical_max,
                        r.general_max.map_or(String::new(), |v| v.to_string()),
                        r.agreement_gap.map_or(String::new(), |v| v.to_string()),
                        asymptote.limit
                    ));
                }
            }
            let w_path = dir.join("w_violation_curves.csv");
            fs::write(&w_path, w_csv)?;

            #[derive(Serialize)]
            struct FiguresReport {
                files: Vec<String>,
            }
            let report = FiguresReport {
                files: vec![ghz_path.display().to_string(), w_path.display().to_string()],
            };
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(())
        }
    }
}
