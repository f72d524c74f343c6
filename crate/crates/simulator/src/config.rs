use channel_core::presets::parse_channel;
use channel_core::{Channel, Distribution, Error, Result};
use control_phase::ControlType;
use exponents::random_coding_exponent;
use serde::{Deserialize, Serialize};

/// Largest codebook the simulator will store, in symbols.
const MAX_SYMBOLS: usize = 1 << 26;

/// A preset name (`bsc:0.05`, `z:0.2`, `noiseless:3`, `ex3x5`, `matrix:path`)
/// or the rows of a transition matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

impl ChannelSpec {
    pub fn load(&self) -> Result<Channel> {
        match self {
            ChannelSpec::Named(s) => parse_channel(s),
            ChannelSpec::Matrix(rows) => Channel::new(rows.clone()),
        }
    }
}

/// Parameters of one simulated scheme. See `docs/simulator.md` for the JSON
/// layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CodeConfig {
    pub channel: ChannelSpec,
    /// Block length.
    pub n: usize,
    /// Nats per channel use.
    pub rate: f64,
    /// Target erasure exponent used by the decoder threshold.
    pub erasure_exponent: f64,
    /// The data phase has `ceil(alpha n)` uses.
    pub alpha: f64,
    /// Composition of the data-phase codewords; uniform when absent.
    #[serde(default)]
    pub p: Option<Vec<f64>>,
    /// Joint type of the accept/reject pair as `|X|` rows of `|X|` weights;
    /// `ControlType::product(P)` when absent.
    #[serde(default)]
    pub x: Option<Vec<Vec<f64>>>,
    pub seed: u64,
    pub trials: u64,
}

impl CodeConfig {
    /// Parses JSON; errors carry the serde line and column.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("simulation config: {e}")))
    }

    pub fn load(path: impl AsRef<std::path::Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates the parameters and rounds the types to the block.
    pub fn prepare(&self) -> Result<Code> {
        let w = self.channel.load()?;
        let (nx, ny) = (w.nx(), w.ny());
        if nx > 256 || ny > 256 {
            return Err(Error::Unsupported(format!("{nx}x{ny} alphabets; at most 256 letters each")));
        }
        if self.trials == 0 {
            return Err(Error::Invalid("at least one trial is needed".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Invalid(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(self.rate > 0.0 && self.rate.is_finite()) {
            return Err(Error::Invalid(format!("rate {} must be positive", self.rate)));
        }
        if !(self.erasure_exponent >= 0.0 && self.erasure_exponent.is_finite()) {
            return Err(Error::Invalid(format!("erasure exponent {} must be finite and nonnegative", self.erasure_exponent)));
        }
        let n = self.n;
        let n1 = ((self.alpha * n as f64) - 1e-9).ceil().max(1.0) as usize;
        if n1 >= n {
            return Err(Error::Invalid(format!("data phase {n1} leaves no control phase in a block of {n}")));
        }
        let phase_rate = self.rate / self.alpha;
        let m = (n1 as f64 * phase_rate).exp().floor();
        if m < 2.0 {
            return Err(Error::Invalid(format!("exp({n1} * {phase_rate}) gives fewer than two messages")));
        }
        if m * n1 as f64 > MAX_SYMBOLS as f64 {
            return Err(Error::Unsupported(format!("{m:.3e} codewords of length {n1} do not fit in memory")));
        }
        let messages = m as usize;

        let p_req = match &self.p {
            Some(p) => Distribution::new(p.clone())?,
            None => Distribution::uniform(nx),
        };
        if p_req.len() != nx {
            return Err(Error::Dimension { expected: nx, got: p_req.len() });
        }
        let x_req = match &self.x {
            Some(rows) => {
                if rows.len() != nx {
                    return Err(Error::Dimension { expected: nx, got: rows.len() });
                }
                ControlType::new(nx, rows.concat())?
            }
            None => ControlType::product(&p_req)?,
        };

        let n2 = n - n1;
        let composition = largest_remainder(p_req.weights(), n1);
        let control = largest_remainder(x_req.weights(), n2);
        let p = Distribution::from_unnormalized(composition.iter().map(|&c| c as f64).collect())?;
        let x = ControlType::new(nx, control.iter().map(|&c| c as f64 / n2 as f64).collect())?;
        let alpha = n1 as f64 / n as f64;
        let er = random_coding_exponent(&w, phase_rate, Some(&p))?.value;
        let diagnostics = Diagnostics {
            delta_n1: delta(n1, nx, ny),
            delta_prime_n: delta_prime(n, nx, ny),
            composition_tv: tv(p_req.weights(), p.weights()),
            control_tv: tv(x_req.weights(), x.weights()),
            random_coding: alpha * er,
        };
        Ok(Code {
            w,
            n,
            n1,
            messages,
            composition,
            control,
            p,
            x,
            alpha,
            phase_rate,
            rate: self.rate,
            erasure_exponent: self.erasure_exponent,
            trivial: self.erasure_exponent > alpha * er,
            seed: self.seed,
            trials: self.trials,
            diagnostics,
        })
    }
}

/// Finite-length terms and rounding distortion of a prepared scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Packing slack of the data-phase code at length `n1`.
    pub delta_n1: f64,
    /// Slack in the error and erasure exponents at length `n`.
    pub delta_prime_n: f64,
    /// Total variation between the requested and realized `P`.
    pub composition_tv: f64,
    pub control_tv: f64,
    /// `alpha E_r(R/alpha, P)` at the realized `alpha` and `P`; above it the
    /// decoder never erases.
    pub random_coding: f64,
}

/// `(ln 4 + (4|X| + 6|X||Y|) ln(n+1)) / n`.
pub fn delta(n: usize, nx: usize, ny: usize) -> f64 {
    let n = n as f64;
    (4f64.ln() + (4 * nx + 6 * nx * ny) as f64 * (n + 1.0).ln()) / n
}

/// `(|X|+1)^2 |Y| ln(n+1) / n`.
pub fn delta_prime(n: usize, nx: usize, ny: usize) -> f64 {
    let n = n as f64;
    ((nx + 1) * (nx + 1) * ny) as f64 * (n + 1.0).ln() / n
}

fn tv(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Integer counts summing to `n` with `counts[i] ~ n w[i]`: floors first,
/// then the leftover units go to the largest fractional parts (lowest index
/// first on ties).
pub fn largest_remainder(w: &[f64], n: usize) -> Vec<usize> {
    let total: f64 = w.iter().sum();
    let exact: Vec<f64> = w.iter().map(|&v| v / total * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|&e| e.floor() as usize).collect();
    let left = n - counts.iter().sum::<usize>().min(n);
    let mut order: Vec<usize> = (0..w.len()).collect();
    order.sort_by(|&i, &j| (exact[j] - exact[j].floor()).total_cmp(&(exact[i] - exact[i].floor())).then(i.cmp(&j)));
    for &i in order.iter().take(left) {
        counts[i] += 1;
    }
    counts
}

/// A validated scheme with its types rounded to the block.
#[derive(Debug, Clone)]
pub struct Code {
    pub w: Channel,
    pub n: usize,
    /// Data-phase length `ceil(alpha n)`.
    pub n1: usize,
    pub messages: usize,
    /// Letter counts of every data-phase codeword.
    pub composition: Vec<usize>,
    /// Pair counts of the accept/reject codewords, row-major on `X x X`.
    pub control: Vec<usize>,
    /// Realized composition.
    pub p: Distribution,
    /// Realized control type.
    pub x: ControlType,
    /// Realized phase split `n1 / n`.
    pub alpha: f64,
    /// Nominal data-phase rate `R / alpha`.
    pub phase_rate: f64,
    pub rate: f64,
    pub erasure_exponent: f64,
    /// The decoder never erases.
    pub trivial: bool,
    pub seed: u64,
    pub trials: u64,
    pub diagnostics: Diagnostics,
}

impl Code {
    pub fn n2(&self) -> usize {
        self.n - self.n1
    }
}
