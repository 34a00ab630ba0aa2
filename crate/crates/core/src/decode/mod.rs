//! Reconstruction engines: interval passing (IP), node-based verification
//! (VB) and verification-based interval passing (VB-IP).
//!
//! All three run the same synchronized schedule. One iteration is a sweep
//! over every check node followed by a sweep over every variable node in
//! index order; the variable sweep only reads check-side quantities produced
//! by the preceding check sweep. This makes the per-iteration recovered sets
//! of the three engines directly comparable.
//!
//! Real-valued equality tests (residual equal to zero, two residuals equal,
//! a closed interval) use the absolute threshold
//! `eq_tol * max(1, max_m y_m)`.

mod ip;
mod vb;
mod vbip;

use std::fmt;
use std::io::Write;
use std::str::FromStr;

pub use ip::{decode_ip, decode_ip_observed, ip_check_update, ip_variable_update, IpMessages};
pub use vb::{decode_vb, decode_vb_observed, vb_check_update, vb_variable_update, Status, VerificationState};
pub use vbip::{decode_vbip, decode_vbip_observed};

use crate::error::{Error, Result};
use crate::graph::SensingMatrix;

/// Iteration cap used in all of the benchmark experiments.
pub const DEFAULT_MAX_ITER: usize = 50;
pub const DEFAULT_EQ_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Ip,
    Vb,
    Vbip,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Ip, Algorithm::Vb, Algorithm::Vbip];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ip => "ip",
            Algorithm::Vb => "vb",
            Algorithm::Vbip => "vbip",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ip" => Ok(Algorithm::Ip),
            "vb" => Ok(Algorithm::Vb),
            "vbip" | "vb-ip" => Ok(Algorithm::Vbip),
            other => Err(Error::InvalidConfig(format!(
                "unknown algorithm {other:?} (expected ip, vb or vbip)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecoderConfig {
    pub max_iter: usize,
    /// Relative equality tolerance, scaled by `max(1, max_m y_m)`.
    pub eq_tol: f64,
    /// Seeds the random choice among several degree-1 checks (VB only).
    pub seed: u64,
    /// Enables the identical-residual (coincidence) rule in VB and VB-IP.
    pub coincidence: bool,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            max_iter: DEFAULT_MAX_ITER,
            eq_tol: DEFAULT_EQ_TOL,
            seed: 0,
            coincidence: true,
        }
    }
}

impl DecoderConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    pub estimate: Vec<f64>,
    /// Every variable verified (VB, VB-IP) or every interval closed (IP).
    pub converged: bool,
    pub iterations: usize,
    /// `verified_history[l]` is the sorted set recovered after iteration `l + 1`.
    pub verified_history: Vec<Vec<usize>>,
}

impl DecodeResult {
    /// Recovered set after iteration `l` (1-based). Past the last executed
    /// iteration the final set is returned, since the decoder stopped at a
    /// fixed point or at convergence.
    pub fn verified_at(&self, l: usize) -> &[usize] {
        if self.verified_history.is_empty() || l == 0 {
            return &[];
        }
        let i = (l - 1).min(self.verified_history.len() - 1);
        &self.verified_history[i]
    }

    pub fn final_verified(&self) -> &[usize] {
        self.verified_history.last().map_or(&[], Vec::as_slice)
    }
}

/// Snapshot handed to an [`Observer`] after every iteration.
#[derive(Debug)]
pub struct IterationView<'a> {
    /// 1-based iteration number.
    pub iteration: usize,
    /// Per-variable interval `[L_n, U_n]` (IP and VB-IP).
    pub lower: Option<&'a [f64]>,
    pub upper: Option<&'a [f64]>,
    /// Per-variable verification status (VB and VB-IP).
    pub status: Option<&'a [Status]>,
    pub estimate: &'a [f64],
    pub verified: &'a [usize],
    /// Number of checks with a pending coincidence flag.
    pub coincidence_flags: usize,
}

impl IterationView<'_> {
    /// Largest `U_n − L_n`, if the engine carries intervals.
    pub fn max_width(&self) -> Option<f64> {
        let (lo, hi) = (self.lower?, self.upper?);
        Some(lo.iter().zip(hi).map(|(l, u)| u - l).fold(0.0, f64::max))
    }
}

pub trait Observer {
    fn observe(&mut self, view: &IterationView<'_>);
}

impl Observer for () {
    fn observe(&mut self, _: &IterationView<'_>) {}
}

impl<F: FnMut(&IterationView<'_>)> Observer for F {
    fn observe(&mut self, view: &IterationView<'_>) {
        self(view)
    }
}

/// Writes one line per iteration: `l |V^l| max_width xi_count`
/// (`-` for the width when the engine has no intervals).
pub struct TraceWriter<W: Write> {
    out: W,
}

impl<W: Write> TraceWriter<W> {
    pub fn new(mut out: W) -> Self {
        let _ = writeln!(out, "# iteration verified max_width coincidence_flags");
        TraceWriter { out }
    }

    pub fn into_inner(self) -> W {
        self.out
    }
}

impl<W: Write> Observer for TraceWriter<W> {
    fn observe(&mut self, v: &IterationView<'_>) {
        let width = v.max_width().map_or_else(|| "-".to_string(), |w| format!("{w:.6e}"));
        let _ = writeln!(
            self.out,
            "{} {} {} {}",
            v.iteration,
            v.verified.len(),
            width,
            v.coincidence_flags
        );
    }
}

/// Runs `algorithm` on `(h, y)`.
pub fn decode(algorithm: Algorithm, h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode_observed(algorithm, h, y, cfg, &mut ())
}

pub fn decode_observed(
    algorithm: Algorithm,
    h: &SensingMatrix,
    y: &[f64],
    cfg: &DecoderConfig,
    obs: &mut dyn Observer,
) -> Result<DecodeResult> {
    match algorithm {
        Algorithm::Ip => decode_ip_observed(h, y, cfg, obs),
        Algorithm::Vb => decode_vb_observed(h, y, cfg, obs),
        Algorithm::Vbip => decode_vbip_observed(h, y, cfg, obs),
    }
}

/// Validates the measurement vector and returns the absolute equality threshold.
pub(crate) fn check_inputs(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig) -> Result<f64> {
    if y.len() != h.n_checks() {
        return Err(Error::DimensionMismatch {
            expected: h.n_checks(),
            got: y.len(),
        });
    }
    if let Some((index, &value)) = y.iter().enumerate().find(|(_, v)| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::Negative {
            what: "measurement",
            index,
            value,
        });
    }
    if !(cfg.eq_tol >= 0.0) {
        return Err(Error::InvalidConfig(format!("eq_tol must be nonnegative, got {}", cfg.eq_tol)));
    }
    Ok(equality_threshold(y, cfg.eq_tol))
}

pub(crate) fn equality_threshold(y: &[f64], eq_tol: f64) -> f64 {
    eq_tol * y.iter().copied().fold(1.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm_names_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("bp".parse::<Algorithm>().is_err());
    }

    #[test]
    fn input_validation() {
        let h = SensingMatrix::from_dense(&[vec![1, 1]]).unwrap();
        let cfg = DecoderConfig::default();
        for a in Algorithm::ALL {
            assert!(matches!(decode(a, &h, &[1.0, 2.0], &cfg), Err(Error::DimensionMismatch { .. })));
            assert!(matches!(decode(a, &h, &[-1.0], &cfg), Err(Error::Negative { .. })));
            assert!(matches!(decode(a, &h, &[f64::NAN], &cfg), Err(Error::Negative { .. })));
        }
    }

    #[test]
    fn trace_lines() {
        let h = SensingMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let mut tw = TraceWriter::new(Vec::new());
        decode_vbip_observed(&h, &[2.0, 2.0], &DecoderConfig::default(), &mut tw).unwrap();
        let text = String::from_utf8(tw.into_inner()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[1], "1 0 2.000000e0 2");
        assert_eq!(lines[2], "2 3 0.000000e0 0");
    }
}
