//! Exhaustive minimum-support search for tiny instances.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::SensingMatrix;

/// Largest signal length the enumeration accepts.
pub const MAX_ORACLE_VARS: usize = 20;

#[derive(Clone, Debug, PartialEq)]
pub enum Sparsest {
    /// Exactly one support of minimum size admits a nonnegative solution.
    Unique { support: Vec<usize>, x: Vec<f64> },
    /// Several supports of this size fit.
    Ambiguous { support_size: usize },
    /// Nothing with at most `max_support` nonzeros fits.
    None,
}

/// Smallest-support nonnegative `x` with `H x = y`, by enumerating supports
/// in order of size and solving each restricted least-squares problem.
///
/// A support is accepted when its columns are linearly independent, the
/// residual is within `tol · max(1, max_m y_m)` and every entry exceeds that
/// same threshold. At the minimum size, a rank-deficient support cannot carry
/// a strictly positive solution without a smaller support also fitting, so
/// skipping those loses nothing.
pub fn brute_force_sparsest(h: &SensingMatrix, y: &[f64], max_support: usize, tol: f64) -> Result<Sparsest> {
    let n = h.n_vars();
    if n > MAX_ORACLE_VARS {
        return Err(Error::InvalidConfig(format!(
            "brute-force search supports at most {MAX_ORACLE_VARS} variables, got {n}"
        )));
    }
    if max_support > n {
        return Err(Error::InvalidConfig(format!(
            "max_support {max_support} exceeds the signal length {n}"
        )));
    }
    if y.len() != h.n_checks() {
        return Err(Error::DimensionMismatch {
            expected: h.n_checks(),
            got: y.len(),
        });
    }
    let threshold = tol * y.iter().fold(1.0_f64, |a, &v| a.max(v.abs()));
    if y.iter().all(|v| v.abs() <= threshold) {
        return Ok(Sparsest::Unique {
            support: Vec::new(),
            x: vec![0.0; n],
        });
    }

    let dense = h.to_dense();
    let target = DVector::from_column_slice(y);
    for size in 1..=max_support {
        let mut found: Option<(Vec<usize>, Vec<f64>)> = None;
        let mut support: Vec<usize> = (0..size).collect();
        loop {
            if let Some(values) = fit(&dense, &target, &support, threshold) {
                if found.is_some() {
                    return Ok(Sparsest::Ambiguous { support_size: size });
                }
                found = Some((support.clone(), values));
            }
            if !next_combination(&mut support, n) {
                break;
            }
        }
        if let Some((support, values)) = found {
            let mut x = vec![0.0; n];
            for (&i, &v) in support.iter().zip(&values) {
                x[i] = v;
            }
            return Ok(Sparsest::Unique { support, x });
        }
    }
    Ok(Sparsest::None)
}

fn fit(dense: &[Vec<u8>], y: &DVector<f64>, support: &[usize], threshold: f64) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(dense.len(), support.len(), |r, c| f64::from(dense[r][support[c]]));
    let svd = a.clone().svd(true, true);
    let sv = &svd.singular_values;
    let top = sv.max();
    if sv.min() <= 1e-10 * top.max(1.0) {
        return None;
    }
    let z = svd.solve(y, 0.0).ok()?;
    let residual = (&a * &z - y).amax();
    if residual > threshold || z.iter().any(|&v| v <= threshold) {
        return None;
    }
    Some(z.iter().copied().collect())
}

/// Advances `c` to the next k-subset of `0..n` in lexicographic order.
fn next_combination(c: &mut [usize], n: usize) -> bool {
    let k = c.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if c[i] < n - k + i {
            c[i] += 1;
            for j in i + 1..k {
                c[j] = c[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
