//! `eebounds`: sweeps of the exponent bounds, zero-error analysis and
//! simulation runs. All quantities are in nats unless `--bits` is given,
//! which converts the printed values only.

use std::fmt::Write as _;
use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};

use channel_core::presets::parse_channel;
use channel_core::{capacity, constants::zero_error_positive, Channel, Error};
use clap::{Parser, Subcommand, ValueEnum};
use control_phase::{beta_profile, beta_sup};
use exponents::{haroutunian, random_coding_exponent, sphere_packing_exponent, ImprovedHaroutunian};
use inner_bound::{inner_envelope, InnerQuery, InnerWitness, Mode};
use outer_bound::{OuterBound, OuterQuery};
use simulator::{build_codebook, simulate, CodeConfig, SimResult};
use zero_error::exz_bounds;

#[derive(Debug, Parser)]
#[command(name = "eebounds", version, about = "Error and erasure exponent bounds for feedback codes on discrete memoryless channels")]
pub struct Cli {
    /// Preset (`bsc:p`, `z:q`, `noiseless:k`, `ex3x5`, `paper3x5`) or
    /// `matrix:path` to a whitespace-separated transition matrix.
    #[arg(long, global = true, default_value = "bsc:0.25")]
    pub channel: String,

    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print rates and exponents in bits.
    #[arg(long, global = true)]
    pub bits: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// E_r, e_sp, E_h and the improved E_h over a rate grid.
    Exponents {
        /// `lo:hi:n` or a comma list; `C` stands for the capacity.
        #[arg(long, default_value = "0:C:50")]
        rate_grid: String,
    },
    /// Inner and outer bounds on the error exponent over an erasure grid.
    Tradeoff {
        #[arg(long)]
        rate: f64,
        /// `lo:hi:n` or a comma list; `Er` and `Eh` stand for E_r(R) and E_h(R).
        #[arg(long, default_value = "0:Er:30")]
        ex_grid: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Both)]
        mode: ModeArg,
    },
    /// Bounds on the erasure exponent of error-free codes, plus the beta(s)
    /// profile.
    ZeroError {
        /// Rates must lie in `[0, C)`. Default: 20 points `k C / 20`.
        #[arg(long)]
        rate_grid: Option<String>,
        /// Where to write the beta profile; next to `--out` by default.
        #[arg(long)]
        beta_out: Option<PathBuf>,
        #[arg(long, default_value_t = 51)]
        beta_points: usize,
    },
    /// Monte Carlo run of the two-phase scheme from a JSON config.
    Simulate {
        config: PathBuf,
        /// Overrides the seed in the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the number of trials.
        #[arg(long)]
        trials: Option<u64>,
        /// Append one CSV line per run to this file.
        #[arg(long)]
        log: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Relaxed,
    Both,
}

impl ModeArg {
    fn modes(self) -> (bool, bool) {
        match self {
            ModeArg::Exact => (true, false),
            ModeArg::Relaxed => (false, true),
            ModeArg::Both => (true, true),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    /// 2 for bad input, 3 when a computation rejects the channel or query.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Core(Error::Parse(_) | Error::Invalid(_) | Error::OutOfRange(_) | Error::Dimension { .. }) => 2,
            CliError::Core(_) => 3,
        }
    }
}

type Out<'a> = &'a mut dyn Write;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.display().to_string(), source }
}

fn emit(text: &str, path: Option<&Path>, stdout: Out) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => stdout.write_all(text.as_bytes()).map_err(io_err(Path::new("<stdout>"))),
    }
}

/// `lo:hi:n` (inclusive, `n >= 1` points) or `a,b,c`. Each number may be one
/// of `names`.
pub fn parse_grid(text: &str, names: &[(&str, f64)]) -> Result<Vec<f64>, CliError> {
    let value = |tok: &str| -> Result<f64, CliError> {
        let tok = tok.trim();
        if let Some(&(_, v)) = names.iter().find(|(n, _)| *n == tok) {
            return Ok(v);
        }
        tok.parse().map_err(|_| CliError::Usage(format!("bad grid value '{tok}'")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    let grid = match parts.as_slice() {
        [lo, hi, n] => {
            let (lo, hi) = (value(lo)?, value(hi)?);
            let n: usize = n.trim().parse().map_err(|_| CliError::Usage(format!("bad point count '{n}'")))?;
            match n {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => text.split(',').map(value).collect::<Result<_, _>>()?,
        _ => return Err(CliError::Usage(format!("grid '{text}' is neither lo:hi:n nor a comma list"))),
    };
    if grid.is_empty() {
        return Err(CliError::Usage("empty grid".into()));
    }
    if let Some(v) = grid.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(CliError::Usage(format!("grid value {v} must be finite and nonnegative")));
    }
    Ok(grid)
}

fn check_rates(grid: &[f64], c: f64, open: bool) -> Result<(), CliError> {
    let bad = |r: f64| r > c + 1e-12 || (open && r >= c);
    if let Some(r) = grid.iter().find(|&&r| bad(r)) {
        let hi = if open { ")" } else { "]" };
        return Err(CliError::Usage(format!("rate {r} outside [0, {c}{hi}")));
    }
    Ok(())
}

pub fn load_channel(spec: &str) -> Result<Channel, CliError> {
    parse_channel(spec).map_err(|e| CliError::Usage(format!("channel '{spec}': {e}")))
}

/// Formats a value, or leaves the cell empty.
fn cell(v: Option<f64>, scale: f64) -> String {
    v.map_or_else(String::new, |v| format!("{}", v * scale))
}

fn scale(bits: bool) -> f64 {
    if bits {
        1.0 / std::f64::consts::LN_2
    } else {
        1.0
    }
}

/// Notes each failing column once on stderr and blanks the cell.
struct Notes<'a> {
    err: Out<'a>,
    seen: Vec<String>,
}

impl Notes<'_> {
    fn keep<T>(&mut self, what: &str, r: channel_core::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                if !self.seen.iter().any(|s| s == what) {
                    self.seen.push(what.to_string());
                    let _ = writeln!(self.err, "note: {what} left blank: {e}");
                }
                None
            }
        }
    }
}

pub fn cmd_exponents(w: &Channel, grid: &[f64], bits: bool, err: Out) -> Result<String, CliError> {
    let k = scale(bits);
    let mut notes = Notes { err, seen: Vec::new() };
    let improved = notes.keep("E_h_improved", ImprovedHaroutunian::new(w));
    let mut csv = String::from("R,E_r,e_sp,E_h,E_h_improved\n");
    for &r in grid {
        let er = notes.keep("E_r", random_coding_exponent(w, r, None).map(|e| e.value));
        let sp = notes.keep("e_sp", sphere_packing_exponent(w, r, None).map(|e| e.value));
        let eh = notes.keep("E_h", haroutunian(w, r));
        let eht = improved.as_ref().and_then(|imp| notes.keep("E_h_improved", imp.value(w, r)));
        writeln!(csv, "{},{},{},{},{}", r * k, cell(er, k), cell(sp, k), cell(eh, k), cell(eht, k)).expect("string write");
    }
    Ok(csv)
}

pub fn cmd_tradeoff(w: &Channel, rate: f64, grid: &[f64], mode: ModeArg, bits: bool, err: Out) -> Result<String, CliError> {
    let k = scale(bits);
    let mut notes = Notes { err, seen: Vec::new() };
    let outer = if zero_error_positive(w) {
        let _ = writeln!(
            notes.err,
            "note: the outer bound needs zero zero-error capacity; this channel has two inputs with disjoint outputs, so only the inner bound is given"
        );
        None
    } else {
        Some(OuterBound::new(w)?)
    };
    let (exact, relaxed) = mode.modes();
    let inner = |notes: &mut Notes, on: bool, m: Mode, ex: f64| -> Option<InnerWitness> {
        if !on {
            return None;
        }
        notes.keep(&format!("inner_{}", m.as_str()), inner_envelope(w, &InnerQuery::new(rate, ex, m)))
    };
    let mut csv = String::from("R,Ex,inner_exact,inner_relaxed,outer,alpha_exact,alpha_relaxed\n");
    for &ex in grid {
        let ie = inner(&mut notes, exact, Mode::Exact, ex);
        let ir = inner(&mut notes, relaxed, Mode::Relaxed, ex);
        let ov = outer.as_ref().and_then(|ob| notes.keep("outer", ob.envelope(&OuterQuery::new(rate, ex)).map(|p| p.value)));
        writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            rate * k,
            ex * k,
            cell(ie.as_ref().map(|w| w.value), k),
            cell(ir.as_ref().map(|w| w.value), k),
            cell(ov, k),
            cell(ie.as_ref().map(|w| w.alpha), 1.0),
            cell(ir.as_ref().map(|w| w.alpha), 1.0),
        )
        .expect("string write");
    }
    Ok(csv)
}

/// Main CSV and the beta sidecar.
pub fn cmd_zero_error(w: &Channel, grid: &[f64], beta_points: usize, bits: bool, err: Out) -> Result<(String, String), CliError> {
    let k = scale(bits);
    let mut csv = String::from("R,lower,upper,regime\n");
    for &r in grid {
        let b = exz_bounds(w, r)?;
        writeln!(csv, "{},{},{},{}", r * k, b.lower * k, b.upper * k, b.regime.as_str()).expect("string write");
    }
    let mut side = String::from("s,beta\n");
    for (s, b) in beta_profile(w, beta_points) {
        writeln!(side, "{s},{b}").expect("string write");
    }
    let sup = beta_sup(w);
    let _ = writeln!(err, "beta_sup = {} at s = {}", sup.value, sup.s);
    Ok((csv, side))
}

fn summary(res: &SimResult) -> String {
    let mut t = String::new();
    let row = |t: &mut String, name: &str, e: &simulator::RateEstimate| {
        writeln!(
            t,
            "{name:<9} {:>9} {:>12.4e} [{:.4e}, {:.4e}]  exponent {:.5} [{:.5}, {:.5}]",
            e.count, e.probability, e.probability_lower, e.probability_upper, e.exponent, e.exponent_lower, e.exponent_upper
        )
        .expect("string write");
    };
    writeln!(t, "n = {} (data phase {}), {} messages, {} trials", res.n, res.n1, res.messages, res.trials).expect("string write");
    if res.trivial_decoder {
        writeln!(t, "erasure exponent above alpha E_r(R/alpha, P): decoder never erases").expect("string write");
    }
    row(&mut t, "errors", &res.error);
    row(&mut t, "erasures", &res.erasure);
    writeln!(t, "tentative error rate {:.4e}", res.tentative_error_rate).expect("string write");
    let d = res.diagnostics;
    writeln!(t, "delta_n1 {:.4}, delta'_n {:.4}", d.delta_n1, d.delta_prime_n).expect("string write");
    t
}

pub fn cmd_simulate(config: &CodeConfig, log: Option<&Path>, out: Option<&Path>, stdout: Out, err: Out) -> Result<SimResult, CliError> {
    let code = config.prepare()?;
    let book = build_codebook(&code);
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let res = simulate(&code, &book, threads);
    let json = serde_json::to_string_pretty(&res).expect("SimResult serializes") + "\n";
    // the table goes wherever the JSON does not
    let table = summary(&res);
    match out {
        Some(p) => {
            std::fs::write(p, &json).map_err(io_err(p))?;
            stdout.write_all(table.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
        }
        None => {
            stdout.write_all(json.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
            err.write_all(table.as_bytes()).map_err(io_err(Path::new("<stderr>")))?;
        }
    }
    if let Some(p) = log {
        let fresh = !p.exists();
        let mut f = OpenOptions::new().create(true).append(true).open(p).map_err(io_err(p))?;
        if fresh {
            writeln!(f, "{}", SimResult::CSV_HEADER).map_err(io_err(p))?;
        }
        writeln!(f, "{}", res.csv_line(&code)).map_err(io_err(p))?;
    }
    Ok(res)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or_else(|| "zero_error".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}.beta.csv"))
}

pub fn run(cli: &Cli, stdout: Out, stderr: Out) -> Result<(), CliError> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Exponents { rate_grid } => {
            let w = load_channel(&cli.channel)?;
            let c = capacity(&w);
            let grid = parse_grid(rate_grid, &[("C", c)])?;
            check_rates(&grid, c, false)?;
            let csv = cmd_exponents(&w, &grid, cli.bits, stderr)?;
            emit(&csv, out, stdout)
        }
        Command::Tradeoff { rate, ex_grid, mode } => {
            let w = load_channel(&cli.channel)?;
            let c = capacity(&w);
            check_rates(&[*rate], c, false)?;
            if *rate < 0.0 {
                return Err(CliError::Usage(format!("rate {rate} is negative")));
            }
            let er = random_coding_exponent(&w, *rate, None)?.value;
            let eh = haroutunian(&w, rate.min(c)).unwrap_or(f64::NAN);
            let grid = parse_grid(ex_grid, &[("Er", er), ("Eh", eh)])?;
            let csv = cmd_tradeoff(&w, *rate, &grid, *mode, cli.bits, stderr)?;
            emit(&csv, out, stdout)
        }
        Command::ZeroError { rate_grid, beta_out, beta_points } => {
            let w = load_channel(&cli.channel)?;
            let c = capacity(&w);
            let grid = match rate_grid {
                Some(g) => parse_grid(g, &[("C", c)])?,
                None => (0..20).map(|i| c * i as f64 / 20.0).collect(),
            };
            check_rates(&grid, c, true)?;
            let (csv, side) = cmd_zero_error(&w, &grid, *beta_points, cli.bits, stderr)?;
            let side_path = beta_out.clone().or_else(|| out.map(sidecar_path));
            emit(&csv, out, stdout)?;
            match side_path {
                Some(p) => emit(&side, Some(&p), stdout),
                None => emit(&format!("\n{side}"), None, stdout),
            }
        }
        Command::Simulate { config, seed, trials, log } => {
            let mut cfg = CodeConfig::load(config)?;
            if let Some(s) = seed {
                cfg.seed = *s;
            }
            if let Some(t) = trials {
                cfg.trials = *t;
            }
            cmd_simulate(&cfg, log.as_deref(), out, stdout, stderr).map(|_| ())
        }
    }
}
