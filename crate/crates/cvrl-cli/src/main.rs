//! `cvrl` — command-line front end for the non-Gaussianity toolkit.
//!
//! Subcommands emit either a table (CSV rows / JSON array) or a key–value
//! report (CSV `key,value` rows / JSON object). Every stochastic choice is
//! pinned by `--seed`, so identical invocations produce byte-identical
//! output regardless of `CVRL_THREADS`.
//!
//! Exit codes: 0 when all gates pass, 2 when a numerical certificate or
//! tolerance gate fails, 1 on usage or internal errors.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cvrl::case_studies::{fock_scan, mixture_scan, mixture_state, MixtureSpec};
use cvrl::discrimination::{p_succ_binary, task_from_witness};
use cvrl::fock::{cyclic_shift, swap_operator, DensityState, FockOperator};
use cvrl::gaussian::{synthesize, GaussianParams};
use cvrl::optimize::OptimizerConfig;
use cvrl::robustness::{rel_entropy_nongaussianity, robustness_gaussian};
use cvrl::witness::{
    check_soundness, epsilon_bound, four_copy_witness, robustness_lower_from_witness,
    two_copy_witness, SoundnessConfig, WitnessReport,
};

const EXIT_OK: u8 = 0;
const EXIT_USAGE: u8 = 1;
const EXIT_CERT: u8 = 2;

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "cvrl",
    version,
    about = "Robustness of non-Gaussianity on truncated Fock spaces",
    propagate_version = true
)]
struct Cli {
    #[command(flatten)]
    run: RunOpts,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Args, Clone)]
struct RunOpts {
    /// Fock cutoff for single-copy computations.
    #[arg(long, global = true, default_value_t = 40)]
    cutoff: usize,
    /// Per-factor cutoff for two-copy constructions.
    #[arg(long, global = true, default_value_t = 20)]
    cutoff2: usize,
    /// Per-factor cutoff for four-copy constructions (heavy above 8).
    #[arg(long, global = true, default_value_t = 8)]
    cutoff4: usize,
    /// Seed pinning every stochastic choice.
    #[arg(long, global = true, default_value_t = 17)]
    seed: u64,
    /// Multistart count for reference searches.
    #[arg(long, global = true, default_value_t = 12)]
    starts: usize,
    /// Objective-evaluation budget per start.
    #[arg(long, global = true, default_value_t = 2000)]
    max_evals: usize,
    /// Relative tolerance for table gates (closed form vs optimizer).
    #[arg(long, global = true, default_value_t = 0.01)]
    tol: f64,
    /// Output encoding.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output destination; "-" writes to stdout.
    #[arg(long, global = true, default_value = "-")]
    out: String,
    /// Report entropies in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Fock-state scan: closed-form robustness vs the reference search.
    Fock {
        /// Inclusive range of photon numbers, e.g. "1..3" or "2".
        #[arg(long)]
        n_range: String,
    },
    /// Coherent-mixture scan: entropy and quadrature lower bounds over a
    /// separation grid.
    Mixture {
        /// Mixture bias q in [-1, 1].
        #[arg(long, default_value_t = 0.0)]
        q: f64,
        /// Separation grid "start:stop:step", inclusive of both ends.
        #[arg(long)]
        d_grid: String,
        /// Append a reference-search column (one search per grid point).
        #[arg(long)]
        optimizer: bool,
    },
    /// Build a purity witness for a state and certify its margin.
    WitnessDemo {
        /// State spec: "fock:N", "mixture:q=Q,d=D", or "gaussian:vacuum"
        /// (general "gaussian:nbar=..,r=..,phi=..,alpha_x=..,alpha_y=..").
        #[arg(long)]
        state: String,
        /// Copy count of the witness construction.
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=4))]
        copies: u8,
        /// Also sweep the Gaussian family for negativity (slow).
        #[arg(long)]
        soundness: bool,
    },
    /// Turn the witness into a channel-discrimination task and certify the
    /// non-Gaussian advantage.
    DiscrimDemo {
        /// State spec, as in witness-demo.
        #[arg(long)]
        state: String,
    },
    /// Export/import operators in the binary container format.
    #[command(subcommand)]
    Op(OpCommand),
    /// Configuration inspection.
    #[command(subcommand)]
    Config(ConfigCommand),
}

#[derive(Subcommand)]
enum OpCommand {
    /// Write a named operator at the global --cutoff to --out.
    Export {
        #[arg(long, value_enum)]
        what: OpKind,
    },
    /// Read an operator container and summarize it.
    Import {
        /// Path of the container file.
        #[arg(long)]
        input: String,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum OpKind {
    Identity,
    Number,
    Position,
    Momentum,
    Swap,
    Cyclic3,
    Cyclic4,
}

#[derive(Subcommand)]
enum ConfigCommand {
    /// Print the fully resolved run configuration.
    Dump,
}

// ---------------------------------------------------------------------------
// Error / exit-code plumbing
// ---------------------------------------------------------------------------

enum CliError {
    Usage(String),
    Certificate(String),
    Internal(String),
}

impl From<cvrl::Error> for CliError {
    fn from(e: cvrl::Error) -> Self {
        match e {
            cvrl::Error::IndistinguishableFromGaussian { .. }
            | cvrl::Error::WitnessUnsound { .. } => CliError::Certificate(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Internal(format!("i/o failure: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successful terminations; everything else is
            // a usage error under the 0/2/1 contract.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    init_worker_cap();
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Certificate(msg)) => {
            eprintln!("certificate failed: {msg}");
            ExitCode::from(EXIT_CERT)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

/// Cap the global worker pool from CVRL_THREADS. Output ordering never
/// depends on the pool size; this only bounds CPU use.
fn init_worker_cap() {
    if let Ok(raw) = std::env::var("CVRL_THREADS") {
        match raw.parse::<usize>() {
            Ok(n) if n >= 1 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => eprintln!("warning: ignoring invalid CVRL_THREADS value {raw:?}"),
        }
    }
}

fn dispatch(cli: &Cli) -> Result<u8, CliError> {
    match &cli.cmd {
        Command::Fock { n_range } => cmd_fock(&cli.run, n_range),
        Command::Mixture { q, d_grid, optimizer } => cmd_mixture(&cli.run, *q, d_grid, *optimizer),
        Command::WitnessDemo { state, copies, soundness } => {
            cmd_witness_demo(&cli.run, state, *copies as usize, *soundness)
        }
        Command::DiscrimDemo { state } => cmd_discrim_demo(&cli.run, state),
        Command::Op(op) => match op {
            OpCommand::Export { what } => cmd_op_export(&cli.run, *what),
            OpCommand::Import { input } => cmd_op_import(&cli.run, input),
        },
        Command::Config(ConfigCommand::Dump) => cmd_config_dump(&cli.run),
    }
}

// ---------------------------------------------------------------------------
// Output encoding
// ---------------------------------------------------------------------------

#[derive(Clone)]
enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Flag(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v}"),
            Cell::Text(v) => v.clone(),
            Cell::Flag(v) => v.to_string(),
        }
    }

    /// JSON mapping; non-finite floats become the strings "inf"/"-inf"/"nan"
    /// so the output stays standard-compliant.
    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(v) if v.is_nan() => json!("nan"),
            Cell::Num(v) if *v > 0.0 => json!("inf"),
            Cell::Num(_) => json!("-inf"),
            Cell::Text(v) => json!(v),
            Cell::Flag(v) => json!(v),
        }
    }
}

/// Render a table: CSV with a mandatory header row, or a JSON array of
/// per-row objects keyed by the header.
fn emit_table(opts: &RunOpts, header: &[&str], rows: &[Vec<Cell>]) -> Result<(), CliError> {
    let text = match opts.format {
        Format::Csv => {
            let mut s = header.join(",");
            s.push('\n');
            for row in rows {
                let cols: Vec<String> = row.iter().map(Cell::csv).collect();
                let _ = writeln!(s, "{}", cols.join(","));
            }
            s
        }
        Format::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|row| {
                    let mut obj = serde_json::Map::new();
                    for (key, cell) in header.iter().zip(row) {
                        obj.insert((*key).to_string(), cell.json());
                    }
                    Value::Object(obj)
                })
                .collect();
            let mut s = serde_json::to_string_pretty(&arr)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    write_out(opts, text.as_bytes())
}

/// Render a key–value report: CSV `key,value` rows, or one JSON object.
fn emit_report(opts: &RunOpts, pairs: &[(&str, Cell)]) -> Result<(), CliError> {
    let text = match opts.format {
        Format::Csv => {
            let mut s = String::from("key,value\n");
            for (key, cell) in pairs {
                let _ = writeln!(s, "{key},{}", cell.csv());
            }
            s
        }
        Format::Json => {
            let mut obj = serde_json::Map::new();
            for (key, cell) in pairs {
                obj.insert((*key).to_string(), cell.json());
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(obj))
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
    };
    write_out(opts, text.as_bytes())
}

fn write_out(opts: &RunOpts, bytes: &[u8]) -> Result<(), CliError> {
    if opts.out == "-" {
        io::stdout().write_all(bytes)?;
    } else {
        File::create(&opts.out)?.write_all(bytes)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Shared parsing helpers
// ---------------------------------------------------------------------------

fn optimizer_config(opts: &RunOpts) -> OptimizerConfig {
    OptimizerConfig {
        starts: opts.starts,
        max_evals: opts.max_evals,
        seed: opts.seed,
        ..OptimizerConfig::default()
    }
}

/// "A..B" (inclusive) or a single "N".
fn parse_n_range(raw: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad --n-range {raw:?}; expected \"A..B\" or \"N\""));
    if let Some((a, b)) = raw.split_once("..") {
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo == 0 || hi < lo {
            return Err(bad());
        }
        Ok((lo..=hi).collect())
    } else {
        let n: usize = raw.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(vec![n])
    }
}

/// "start:stop:step" inclusive of both endpoints (within half a step).
fn parse_grid(raw: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("bad --d-grid {raw:?}; expected \"start:stop:step\""));
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let step: f64 = parts[2].trim().parse().map_err(|_| bad())?;
    if !(start.is_finite() && stop.is_finite() && step > 0.0 && stop >= start) {
        return Err(bad());
    }
    let count = ((stop - start) / step).round() as usize + 1;
    Ok((0..count).map(|k| start + step * k as f64).collect())
}

/// Parse a state spec at the given cutoff. Returns the state and a label
/// echoed into reports.
fn parse_state(spec: &str, cutoff: usize) -> Result<(DensityState, String), CliError> {
    let usage = |msg: &str| CliError::Usage(format!("bad --state {spec:?}: {msg}"));
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| usage("expected \"kind:args\""))?;
    match kind {
        "fock" => {
            let n: usize = rest
                .parse()
                .map_err(|_| usage("fock takes a photon number, e.g. fock:1"))?;
            if n + 1 >= cutoff {
                return Err(usage(&format!("photon number {n} needs a cutoff above {cutoff}")));
            }
            Ok((DensityState::fock(n, cutoff)?, format!("fock:{n}")))
        }
        "mixture" => {
            let mut q = 0.0;
            let mut d = None;
            for part in rest.split(',') {
                let (key, value) = part
                    .split_once('=')
                    .ok_or_else(|| usage("mixture takes q=..,d=.."))?;
                let value: f64 = value
                    .trim()
                    .parse()
                    .map_err(|_| usage(&format!("bad number in {part:?}")))?;
                match key.trim() {
                    "q" => q = value,
                    "d" => d = Some(value),
                    other => return Err(usage(&format!("unknown mixture field {other:?}"))),
                }
            }
            let d = d.ok_or_else(|| usage("mixture needs d=.."))?;
            let spec_q = MixtureSpec::new(q, d).map_err(|e| usage(&e.to_string()))?;
            Ok((mixture_state(&spec_q, cutoff)?, format!("mixture:q={q},d={d}")))
        }
        "gaussian" => {
            let params = if rest == "vacuum" {
                GaussianParams::vacuum()
            } else {
                let mut p = GaussianParams::vacuum();
                for part in rest.split(',') {
                    let (key, value) = part
                        .split_once('=')
                        .ok_or_else(|| usage("gaussian takes vacuum or key=value pairs"))?;
                    let value: f64 = value
                        .trim()
                        .parse()
                        .map_err(|_| usage(&format!("bad number in {part:?}")))?;
                    match key.trim() {
                        "nbar" => p.nbar = value,
                        "r" => p.r = value,
                        "phi" => p.phi = value,
                        "alpha_x" => p.alpha[0] = value,
                        "alpha_y" => p.alpha[1] = value,
                        other => return Err(usage(&format!("unknown gaussian field {other:?}"))),
                    }
                }
                p
            };
            params.validate().map_err(|e| usage(&e.to_string()))?;
            Ok((synthesize(&params, cutoff)?, format!("gaussian:{rest}")))
        }
        other => Err(usage(&format!(
            "unknown state kind {other:?}; use fock, mixture, or gaussian"
        ))),
    }
}

fn entropy_unit(opts: &RunOpts) -> (&'static str, f64) {
    if opts.bits {
        ("bits", std::f64::consts::LN_2)
    } else {
        ("nats", 1.0)
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_fock(opts: &RunOpts, n_range: &str) -> Result<u8, CliError> {
    let ns = parse_n_range(n_range)?;
    let cfg = optimizer_config(opts);
    let scan = fock_scan(&ns, opts.cutoff, &cfg)?;
    let rows: Vec<Vec<Cell>> = scan
        .iter()
        .map(|row| {
            vec![
                Cell::Int(row.n as u64),
                Cell::Num(row.closed_form),
                Cell::Num(row.optimizer_value),
                Cell::Num(row.rel_err),
            ]
        })
        .collect();
    emit_table(opts, &["n", "closed_form", "optimizer_value", "rel_err"], &rows)?;
    let breach = scan.iter().any(|row| !(row.rel_err <= opts.tol));
    Ok(if breach { EXIT_CERT } else { EXIT_OK })
}

fn cmd_mixture(opts: &RunOpts, q: f64, d_grid: &str, optimizer: bool) -> Result<u8, CliError> {
    let grid = parse_grid(d_grid)?;
    let scan = mixture_scan(q, &grid).map_err(|e| match e {
        cvrl::Error::InvalidState(msg) => CliError::Usage(msg),
        other => other.into(),
    })?;
    let cfg = optimizer_config(opts);
    let mut header = vec!["d", "relent_bound", "homodyne_bound", "x_opt"];
    if optimizer {
        header.push("optimizer_value");
    }
    let mut rows = Vec::with_capacity(scan.len());
    for row in &scan {
        let mut cells = vec![
            Cell::Num(row.d),
            Cell::Num(row.relent_bound),
            Cell::Num(row.homodyne_bound),
            Cell::Num(row.x_opt),
        ];
        if optimizer {
            let spec = MixtureSpec::new(q, row.d).map_err(CliError::from)?;
            let state = mixture_state(&spec, opts.cutoff)?;
            cells.push(Cell::Num(robustness_gaussian(&state, &cfg)?.value));
        }
        rows.push(cells);
    }
    emit_table(opts, &header, &rows)?;
    // Gate: once the peaks separate, the quadrature bound must dominate the
    // entropy bound (only meaningful for the balanced mixture).
    let ordered = q != 0.0
        || scan
            .iter()
            .filter(|row| row.d >= 0.6)
            .all(|row| row.homodyne_bound >= row.relent_bound);
    Ok(if ordered { EXIT_OK } else { EXIT_CERT })
}

struct WitnessChain {
    label: String,
    rho: DensityState,
    epsilon: f64,
    hs_distance_sq: f64,
    witness: WitnessReport,
    lower_bound: f64,
}

/// Common front half of both demos: state → margin → witness → bound.
fn build_witness_chain(opts: &RunOpts, spec: &str, copies: usize) -> Result<WitnessChain, CliError> {
    let cutoff = match copies {
        2 => opts.cutoff2,
        4 => opts.cutoff4,
        other => return Err(CliError::Usage(format!("--copies {other} unsupported; use 2 or 4"))),
    };
    let (rho, label) = parse_state(spec, cutoff)?;
    let eps = epsilon_bound(&rho, &optimizer_config(opts))?;
    let witness = match copies {
        2 => two_copy_witness(&rho, eps.epsilon)?,
        _ => four_copy_witness(&rho, eps.epsilon)?,
    };
    let lower_bound = robustness_lower_from_witness(&rho, &witness)?;
    Ok(WitnessChain {
        label,
        rho,
        epsilon: eps.epsilon,
        hs_distance_sq: eps.hs_distance_sq,
        witness,
        lower_bound,
    })
}

fn cmd_witness_demo(
    opts: &RunOpts,
    spec: &str,
    copies: usize,
    soundness: bool,
) -> Result<u8, CliError> {
    if copies == 3 {
        return Err(CliError::Usage("--copies 3 unsupported; use 2 or 4".into()));
    }
    let chain = build_witness_chain(opts, spec, copies)?;
    let (unit, scale) = entropy_unit(opts);
    let defining = chain.witness.evaluations[0].value;
    let nong = rel_entropy_nongaussianity(&chain.rho)? / scale;

    let mut pairs = vec![
        ("state", Cell::Text(chain.label.clone())),
        ("copies", Cell::Int(copies as u64)),
        ("cutoff", Cell::Int(chain.witness.factor_cutoff() as u64)),
        ("epsilon", Cell::Num(chain.epsilon)),
        ("hs_distance_sq", Cell::Num(chain.hs_distance_sq)),
        ("op_norm", Cell::Num(chain.witness.op_norm)),
        ("defining_expectation", Cell::Num(defining)),
        ("witness_bound", Cell::Num(chain.lower_bound)),
        ("rel_entropy_nongaussianity", Cell::Num(nong)),
        ("entropy_unit", Cell::Text(unit.to_string())),
        ("witness_hash", Cell::Text(chain.witness.witness_hash())),
    ];

    let mut sound = true;
    if soundness {
        match check_soundness(&chain.witness, &SoundnessConfig::default()) {
            Ok(report) => {
                pairs.push(("soundness_min", Cell::Num(report.min_value)));
                pairs.push(("soundness_probes", Cell::Int(
                    (report.sobol_evaluated + report.adversarial_evaluated) as u64,
                )));
            }
            Err(cvrl::Error::WitnessUnsound { value, .. }) => {
                pairs.push(("soundness_min", Cell::Num(value)));
                sound = false;
            }
            Err(e) => return Err(e.into()),
        }
    }

    let certified = sound
        && chain.epsilon > 0.0
        && chain.witness.op_norm > 0.0
        && defining < 0.0
        && (defining + chain.epsilon).abs() <= 1e-6 * chain.epsilon.max(1.0)
        && chain.lower_bound > 0.0;
    pairs.push(("certified", Cell::Flag(certified)));
    emit_report(opts, &pairs)?;
    Ok(if certified { EXIT_OK } else { EXIT_CERT })
}

fn cmd_discrim_demo(opts: &RunOpts, spec: &str) -> Result<u8, CliError> {
    let chain = build_witness_chain(opts, spec, 2)?;
    let task = task_from_witness(&chain.witness)?;
    let p_succ = p_succ_binary(&task, &chain.rho)?;
    let cap = task.gaussian_cap();
    let ratio = p_succ / cap;

    let certified = ratio > 1.0 + 1e-9 && p_succ <= 1.0 && cap < 1.0 && chain.lower_bound > 0.0;
    let pairs = vec![
        ("state", Cell::Text(chain.label.clone())),
        ("copies", Cell::Int(2)),
        ("cutoff", Cell::Int(task.factor_cutoff() as u64)),
        ("epsilon", Cell::Num(chain.epsilon)),
        ("op_norm", Cell::Num(chain.witness.op_norm)),
        ("x_norm", Cell::Num(task.x_norm)),
        ("p_succ", Cell::Num(p_succ)),
        ("gaussian_cap", Cell::Num(cap)),
        ("advantage_ratio", Cell::Num(ratio)),
        ("witness_bound", Cell::Num(chain.lower_bound)),
        ("witness_hash", Cell::Text(task.witness_hash.clone())),
        ("certified", Cell::Flag(certified)),
    ];
    emit_report(opts, &pairs)?;
    Ok(if certified { EXIT_OK } else { EXIT_CERT })
}

fn cmd_op_export(opts: &RunOpts, what: OpKind) -> Result<u8, CliError> {
    let c = opts.cutoff;
    let op = match what {
        OpKind::Identity => FockOperator::identity(c, 1)?,
        OpKind::Number => FockOperator::number(c)?,
        OpKind::Position => FockOperator::position(c)?,
        OpKind::Momentum => FockOperator::momentum(c)?,
        OpKind::Swap => swap_operator(c, 1)?,
        OpKind::Cyclic3 => cyclic_shift(c, 1, 3)?,
        OpKind::Cyclic4 => cyclic_shift(c, 1, 4)?,
    };
    if opts.out == "-" {
        let mut buf = Vec::new();
        op.write_to(&mut buf)?;
        io::stdout().write_all(&buf)?;
    } else {
        let mut file = File::create(&opts.out)?;
        op.write_to(&mut file)?;
    }
    Ok(EXIT_OK)
}

fn cmd_op_import(opts: &RunOpts, input: &str) -> Result<u8, CliError> {
    let mut bytes = Vec::new();
    File::open(input)?.read_to_end(&mut bytes)?;
    let op = FockOperator::from_bytes(&bytes)?;
    let tr = op.trace();
    let pairs = vec![
        ("cutoff", Cell::Int(op.cutoff() as u64)),
        ("modes", Cell::Int(op.modes() as u64)),
        ("side", Cell::Int(op.side() as u64)),
        ("trace_re", Cell::Num(tr.re)),
        ("trace_im", Cell::Num(tr.im)),
        ("hermitian", Cell::Flag(op.is_hermitian(1e-12))),
        ("hs_norm", Cell::Num(op.hs_norm())),
    ];
    emit_report(opts, &pairs)?;
    Ok(EXIT_OK)
}

/// Everything that pins a run, in one place.
#[derive(Serialize)]
struct RunConfig {
    cutoff: usize,
    cutoff2: usize,
    cutoff4: usize,
    seed: u64,
    starts: usize,
    max_evals: usize,
    tol: f64,
    format: &'static str,
    out: String,
    bits: bool,
    threads: usize,
    box_upper: [f64; 5],
    box_lower: [f64; 5],
}

/// Array rendering that stays a single CSV column.
fn join_semicolons(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_config_dump(opts: &RunOpts) -> Result<u8, CliError> {
    let bounds = OptimizerConfig::default().bounds;
    let config = RunConfig {
        cutoff: opts.cutoff,
        cutoff2: opts.cutoff2,
        cutoff4: opts.cutoff4,
        seed: opts.seed,
        starts: opts.starts,
        max_evals: opts.max_evals,
        tol: opts.tol,
        format: match opts.format {
            Format::Csv => "csv",
            Format::Json => "json",
        },
        out: opts.out.clone(),
        bits: opts.bits,
        threads: rayon::current_num_threads(),
        box_upper: bounds.upper(),
        box_lower: bounds.lower(),
    };
    match opts.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&config)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            write_out(opts, s.as_bytes())?;
        }
        Format::Csv => {
            let pairs = vec![
                ("cutoff", Cell::Int(config.cutoff as u64)),
                ("cutoff2", Cell::Int(config.cutoff2 as u64)),
                ("cutoff4", Cell::Int(config.cutoff4 as u64)),
                ("seed", Cell::Int(config.seed)),
                ("starts", Cell::Int(config.starts as u64)),
                ("max_evals", Cell::Int(config.max_evals as u64)),
                ("tol", Cell::Num(config.tol)),
                ("format", Cell::Text(config.format.to_string())),
                ("out", Cell::Text(config.out.clone())),
                ("bits", Cell::Flag(config.bits)),
                ("threads", Cell::Int(config.threads as u64)),
                ("box_upper", Cell::Text(join_semicolons(&config.box_upper))),
                ("box_lower", Cell::Text(join_semicolons(&config.box_lower))),
            ];
            emit_report(opts, &pairs)?;
        }
    }
    Ok(EXIT_OK)
}
