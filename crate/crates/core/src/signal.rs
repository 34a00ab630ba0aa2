//! Nonnegative sparse test signals and the reconstruction-success predicate.

use std::fmt::Write as _;

use rand::seq::index;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::seed::rng_from_seed;

/// Default tolerance of [`reconstruction_success`].
pub const DEFAULT_SUCCESS_TOL: f64 = 1e-6;

/// A length-`len` signal with strictly positive values on `support` (0-based,
/// sorted) and zeros elsewhere.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseSignal {
    len: usize,
    support: Vec<usize>,
    values: Vec<f64>,
}

impl SparseSignal {
    /// Builds a signal from `(index, value)` pairs; indices must be distinct
    /// and in range, values strictly positive.
    pub fn new(len: usize, mut entries: Vec<(usize, f64)>) -> Result<Self> {
        entries.sort_by_key(|&(i, _)| i);
        for w in entries.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidConfig(format!("index {} appears twice", w[0].0)));
            }
        }
        for &(i, v) in &entries {
            if i >= len {
                return Err(Error::DimensionMismatch { expected: len, got: i + 1 });
            }
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "value at index {i} must be strictly positive, got {v}"
                )));
            }
        }
        let (support, values) = entries.into_iter().unzip();
        Ok(SparseSignal { len, support, values })
    }

    /// The zero signal of length `len`.
    pub fn zeros(len: usize) -> Self {
        SparseSignal {
            len,
            support: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Support size K.
    pub fn support_size(&self) -> usize {
        self.support.len()
    }

    /// k = K / N.
    pub fn sparsity(&self) -> f64 {
        if self.len == 0 {
            0.0
        } else {
            self.support.len() as f64 / self.len as f64
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.len];
        for (&i, &v) in self.support.iter().zip(&self.values) {
            x[i] = v;
        }
        x
    }

    /// Signal file: `N K`, then `K` lines `index value` (1-based indices,
    /// values with 17 significant digits).
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.len, self.support.len());
        for (&i, &v) in self.support.iter().zip(&self.values) {
            writeln!(out, "{} {:.16e}", i + 1, v).unwrap();
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "empty signal file"))?;
        let head: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(hl + 1, "header must be \"N K\""))?;
        if head.len() != 2 {
            return Err(Error::parse(hl + 1, "header must be \"N K\""));
        }
        let (len, k) = (head[0], head[1]);
        if k > len {
            return Err(Error::parse(hl + 1, format!("K = {k} exceeds N = {len}")));
        }
        let mut entries = Vec::with_capacity(k);
        let mut last = hl + 1;
        for _ in 0..k {
            let (i, line) = lines
                .next()
                .ok_or_else(|| Error::parse(last + 1, format!("expected {k} entries")))?;
            last = i + 1;
            let mut toks = line.split_whitespace();
            let (Some(idx), Some(val), None) = (toks.next(), toks.next(), toks.next()) else {
                return Err(Error::parse(i + 1, "expected \"index value\""));
            };
            let idx: usize = idx
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad index {idx:?}")))?;
            let val: f64 = val
                .parse()
                .map_err(|_| Error::parse(i + 1, format!("bad value {val:?}")))?;
            if idx == 0 || idx > len {
                return Err(Error::parse(i + 1, format!("index {idx} out of range 1..={len}")));
            }
            if !(val > 0.0) || !val.is_finite() {
                return Err(Error::parse(i + 1, format!("value {val} is not strictly positive")));
            }
            if entries.iter().any(|&(j, _)| j == idx - 1) {
                return Err(Error::parse(i + 1, format!("duplicate index {idx}")));
            }
            entries.push((idx - 1, val));
        }
        if let Some((i, _)) = lines.next() {
            return Err(Error::parse(i + 1, "trailing content after signal entries"));
        }
        SparseSignal::new(len, entries)
    }
}

/// Random K-sparse signal: uniform K-subset support, half-normal values
/// `|g|` with `g` standard normal. Deterministic in `(n_vars, support_size, seed)`.
pub fn generate_signal(n_vars: usize, support_size: usize, seed: u64) -> Result<SparseSignal> {
    if support_size > n_vars {
        return Err(Error::InvalidConfig(format!(
            "support size {support_size} exceeds signal length {n_vars}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut support = index::sample(&mut rng, n_vars, support_size).into_vec();
    support.sort_unstable();
    let values = support
        .iter()
        .map(|_| loop {
            let g: f64 = rng.sample(StandardNormal);
            if g != 0.0 {
                break g.abs();
            }
        })
        .collect();
    Ok(SparseSignal {
        len: n_vars,
        support,
        values,
    })
}

/// `max_n |x̂_n − x_n| ≤ tol · max(1, max_n x_n)`.
pub fn reconstruction_success(truth: &SparseSignal, estimate: &[f64], tol: f64) -> Result<bool> {
    if estimate.len() != truth.len() {
        return Err(Error::DimensionMismatch {
            expected: truth.len(),
            got: estimate.len(),
        });
    }
    let scale = truth.max_value().max(1.0);
    let x = truth.to_dense();
    let worst = x
        .iter()
        .zip(estimate)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, |acc: f64, d| if d.is_nan() { f64::INFINITY } else { acc.max(d) });
    Ok(worst <= tol * scale)
}
