//! Named channels and the plain-text matrix format.
//!
//! Preset strings: `bsc:<p>`, `z:<q>`, `noiseless[:<n>]`, `matrix:<path>`,
//! and `ex3x5` for the 3-input, 5-output example channel. The matrix format
//! is a header line `|X| |Y|` followed by `|X|` whitespace-separated rows.

use std::path::Path;

use crate::dist::{Channel, ConditionalChannel};
use crate::error::{Error, Result};

pub fn bsc(p: f64) -> Result<Channel> {
    Channel::new(vec![vec![1.0 - p, p], vec![p, 1.0 - p]])
}

/// Rows `(1-q, q)` and `(0, 1)`: the second input is received noiselessly.
pub fn z_channel(q: f64) -> Result<Channel> {
    Channel::new(vec![vec![1.0 - q, q], vec![0.0, 1.0]])
}

pub fn noiseless(n: usize) -> Result<Channel> {
    Channel::from_conditional(ConditionalChannel::identity(n))
}

/// Three-input, five-output channel whose `beta(s)` profile peaks inside
/// `(0, 1/2)`.
pub fn example_3x5() -> Channel {
    Channel::new(vec![vec![0.16, 0.02, 0.22, 0.30, 0.30], vec![0.09, 0.40, 0.27, 0.0002, 0.2398], vec![0.18, 0.20, 0.30, 0.32, 0.0]])
        .expect("rows are stochastic")
}

pub fn parse_matrix(text: &str) -> Result<Channel> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty matrix file".into()))?;
    let dims: Vec<usize> =
        header.split_whitespace().map(|t| t.parse().map_err(|_| Error::Parse(format!("bad header token '{t}'")))).collect::<Result<_>>()?;
    let [nx, ny] = dims[..] else {
        return Err(Error::Parse(format!("header must be '|X| |Y|', got '{header}'")));
    };
    let mut rows = Vec::with_capacity(nx);
    for (i, line) in lines.enumerate() {
        let row: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::Parse(format!("row {}: bad number '{t}'", i + 1))))
            .collect::<Result<_>>()?;
        if row.len() != ny {
            return Err(Error::Parse(format!("row {} has {} entries, expected {ny}", i + 1, row.len())));
        }
        rows.push(row);
    }
    if rows.len() != nx {
        return Err(Error::Parse(format!("found {} rows, expected {nx}", rows.len())));
    }
    Channel::new(rows)
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<Channel> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_matrix(&text)
}

fn param(s: &str, what: &str) -> Result<f64> {
    let v: f64 = s.parse().map_err(|_| Error::Parse(format!("bad {what} parameter '{s}'")))?;
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::Parse(format!("{what} parameter {v} outside [0, 1]")));
    }
    Ok(v)
}

pub fn parse_channel(spec: &str) -> Result<Channel> {
    let (kind, arg) = match spec.split_once(':') {
        Some((k, a)) => (k, Some(a)),
        None => (spec, None),
    };
    match (kind, arg) {
        ("bsc", Some(p)) => bsc(param(p, "bsc")?),
        ("z", Some(q)) => z_channel(param(q, "z")?),
        ("noiseless", None) => noiseless(2),
        ("noiseless", Some(n)) => noiseless(n.parse().map_err(|_| Error::Parse(format!("bad size '{n}'")))?),
        ("matrix", Some(path)) => load_matrix(path),
        ("ex3x5" | "paper3x5", None) => Ok(example_3x5()),
        _ => Err(Error::Parse(format!("unknown channel '{spec}'"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_presets() {
        assert_eq!(parse_channel("bsc:0.25").unwrap().get(0, 1), 0.25);
        assert_eq!(parse_channel("z:0.2").unwrap().get(1, 0), 0.0);
        assert_eq!(parse_channel("noiseless:3").unwrap().nx(), 3);
        assert_eq!(parse_channel("ex3x5").unwrap().ny(), 5);
        assert!(parse_channel("bsc:1.5").is_err());
        assert!(parse_channel("awgn").is_err());
    }

    #[test]
    fn parses_matrix_text() {
        let w = parse_matrix("2 3\n0.5 0.5 0\n# comment\n0 0.1 0.9\n").unwrap();
        assert_eq!(w.row(1), &[0.0, 0.1, 0.9]);
        assert!(parse_matrix("2 2\n0.5 0.5\n").is_err());
        assert!(parse_matrix("2 2\n0.5 0.5\n0.5 0.6\n").is_err());
    }
}
