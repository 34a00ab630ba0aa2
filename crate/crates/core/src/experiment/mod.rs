//! Monte Carlo benchmark: success probability versus sparsity.
//!
//! Every trial is keyed by `(master seed, K, trial index)`. All algorithms
//! of a sweep point decode the very same instances, and a point keeps adding
//! trials until every algorithm has seen `min_failures` failures (or
//! `max_trials` is hit), so per-point probabilities of different algorithms
//! are computed over identical instance sets.

mod oracle;
mod report;

use rayon::prelude::*;

pub use oracle::{brute_force_sparsest, Sparsest, MAX_ORACLE_VARS};
pub use report::{parse_results, render_plot_svg, write_results, RESULTS_HEADER};

use crate::decode::{decode, Algorithm, DecodeResult, DecoderConfig, DEFAULT_EQ_TOL, DEFAULT_MAX_ITER};
use crate::error::{Error, Result};
use crate::graph::SensingMatrix;
use crate::seed::derive_seed;
use crate::signal::{generate_signal, reconstruction_success, SparseSignal, DEFAULT_SUCCESS_TOL};

/// Seed of trial `index` at support size `support_size`.
pub fn trial_seed(master: u64, support_size: usize, index: u64) -> u64 {
    derive_seed(master, &[support_size as u64, index])
}

#[derive(Clone, Debug)]
pub struct TrialOutcome {
    pub signal: SparseSignal,
    pub measurements: Vec<f64>,
    /// One entry per requested algorithm, in request order.
    pub runs: Vec<AlgorithmRun>,
}

#[derive(Clone, Debug)]
pub struct AlgorithmRun {
    pub algorithm: Algorithm,
    pub result: DecodeResult,
    pub success: bool,
}

/// Draws one instance from `seed` and decodes it with every algorithm.
///
/// `decoder.seed` is ignored; each decoder gets the same seed derived from
/// the trial seed.
pub fn run_trial(
    h: &SensingMatrix,
    support_size: usize,
    algorithms: &[Algorithm],
    seed: u64,
    decoder: &DecoderConfig,
    success_tol: f64,
) -> Result<TrialOutcome> {
    let signal = generate_signal(h.n_vars(), support_size, derive_seed(seed, &[0]))?;
    let measurements = h.measure(&signal.to_dense())?;
    let cfg = DecoderConfig {
        seed: derive_seed(seed, &[1]),
        ..decoder.clone()
    };
    let runs = algorithms
        .iter()
        .map(|&algorithm| {
            let result = decode(algorithm, h, &measurements, &cfg)?;
            let success = reconstruction_success(&signal, &result.estimate, success_tol)?;
            Ok(AlgorithmRun {
                algorithm,
                result,
                success,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(TrialOutcome {
        signal,
        measurements,
        runs,
    })
}

/// A sparsity level, either as a fraction `k = K/N` or as `K` directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Level {
    Fraction(f64),
    Count(usize),
}

impl Level {
    pub fn support_size(self, n_vars: usize) -> usize {
        match self {
            Level::Fraction(k) => (k * n_vars as f64).round() as usize,
            Level::Count(k) => k,
        }
    }

    pub fn fraction(self, n_vars: usize) -> f64 {
        match self {
            Level::Fraction(k) => k,
            Level::Count(k) => k as f64 / n_vars as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub levels: Vec<Level>,
    pub algorithms: Vec<Algorithm>,
    pub max_iter: usize,
    pub eq_tol: f64,
    /// Coincidence rule in VB and VB-IP; off only for ablations.
    pub coincidence: bool,
    pub min_failures: u64,
    pub max_trials: u64,
    /// Lower bound on trials per point regardless of failures.
    pub min_trials: u64,
    pub master_seed: u64,
    pub success_tol: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            levels: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            max_iter: DEFAULT_MAX_ITER,
            eq_tol: DEFAULT_EQ_TOL,
            coincidence: true,
            min_failures: 100,
            max_trials: 1_000_000,
            min_trials: 0,
            master_seed: 0,
            success_tol: DEFAULT_SUCCESS_TOL,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self, n_vars: usize) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.levels.is_empty() {
            return bad("no sparsity levels".into());
        }
        for &level in &self.levels {
            let ok = match level {
                Level::Fraction(k) => k > 0.0 && k <= 1.0,
                Level::Count(k) => k >= 1 && k <= n_vars,
            };
            if !ok {
                return bad(format!("sparsity level {level:?} outside (0, 1] for N = {n_vars}"));
            }
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        if self.min_failures < 1 {
            return bad("min_failures must be at least 1".into());
        }
        if self.max_trials < self.min_failures {
            return bad(format!(
                "max_trials {} is below min_failures {}",
                self.max_trials, self.min_failures
            ));
        }
        if self.min_trials > self.max_trials {
            return bad(format!(
                "min_trials {} exceeds max_trials {}",
                self.min_trials, self.max_trials
            ));
        }
        Ok(())
    }

    fn decoder(&self) -> DecoderConfig {
        DecoderConfig {
            max_iter: self.max_iter,
            eq_tol: self.eq_tol,
            seed: 0,
            coincidence: self.coincidence,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepPoint {
    pub algorithm: Algorithm,
    pub k: f64,
    pub support_size: usize,
    pub n_vars: usize,
    pub n_checks: usize,
    pub trials: u64,
    pub successes: u64,
    pub failures: u64,
    pub master_seed: u64,
}

impl SweepPoint {
    pub fn p_success(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

const BATCH: u64 = 64;

/// Runs the whole sweep; points are ordered by level, then by algorithm in
/// request order. Trials run in parallel, but the result equals a
/// sequential run trial by trial.
pub fn sweep(h: &SensingMatrix, cfg: &SweepConfig) -> Result<Vec<SweepPoint>> {
    cfg.validate(h.n_vars())?;
    let decoder = cfg.decoder();
    let n_alg = cfg.algorithms.len();
    let mut points = Vec::with_capacity(cfg.levels.len() * n_alg);

    for &level in &cfg.levels {
        let support_size = level.support_size(h.n_vars());
        let mut trials = 0u64;
        let mut failures = vec![0u64; n_alg];
        let done = |trials: u64, failures: &[u64]| {
            trials >= cfg.max_trials
                || (trials >= cfg.min_trials && failures.iter().all(|&f| f >= cfg.min_failures))
        };

        'level: while !done(trials, &failures) {
            let end = (trials + BATCH).min(cfg.max_trials);
            let batch = (trials..end)
                .into_par_iter()
                .map(|i| {
                    let seed = trial_seed(cfg.master_seed, support_size, i);
                    run_trial(h, support_size, &cfg.algorithms, seed, &decoder, cfg.success_tol)
                        .map(|t| t.runs.iter().map(|r| r.success).collect::<Vec<_>>())
                })
                .collect::<Result<Vec<_>>>()?;
            for outcome in batch {
                if done(trials, &failures) {
                    break 'level;
                }
                trials += 1;
                for (f, ok) in failures.iter_mut().zip(outcome) {
                    *f += u64::from(!ok);
                }
            }
        }

        for (a, &algorithm) in cfg.algorithms.iter().enumerate() {
            points.push(SweepPoint {
                algorithm,
                k: level.fraction(h.n_vars()),
                support_size,
                n_vars: h.n_vars(),
                n_checks: h.n_checks(),
                trials,
                successes: trials - failures[a],
                failures: failures[a],
                master_seed: cfg.master_seed,
            });
        }
    }
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate_regular, RegularParams};

    fn small() -> SensingMatrix {
        generate_regular(&RegularParams::new(60, 30, 3, 5).avoid_4cycles(true)).unwrap()
    }

    #[test]
    fn zero_support_always_succeeds() {
        let h = small();
        let t = run_trial(&h, 0, &Algorithm::ALL, 9, &DecoderConfig::default(), DEFAULT_SUCCESS_TOL).unwrap();
        assert!(t.runs.iter().all(|r| r.success && r.result.converged));
    }

    #[test]
    fn two_by_three_instance() {
        let h = SensingMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        // K = 1 on three variables: find a seed whose support is the middle variable.
        let seed = (0..)
            .find(|&s| generate_signal(3, 1, derive_seed(s, &[0])).unwrap().support() == [1])
            .unwrap();
        let t = run_trial(&h, 1, &Algorithm::ALL, seed, &DecoderConfig::default(), DEFAULT_SUCCESS_TOL).unwrap();
        let ok: Vec<bool> = t.runs.iter().map(|r| r.success).collect();
        assert_eq!(ok, vec![false, true, true]);
    }

    #[test]
    fn stopping_rule_edge() {
        let h = small();
        let cfg = SweepConfig {
            levels: vec![Level::Fraction(0.9)],
            min_failures: 1,
            max_trials: 1,
            ..SweepConfig::default()
        };
        let pts = sweep(&h, &cfg).unwrap();
        assert_eq!(pts.len(), 3);
        for p in &pts {
            assert_eq!((p.trials, p.successes, p.p_success()), (1, 0, 0.0));
        }
    }

    #[test]
    fn sweep_stops_once_every_algorithm_has_enough_failures() {
        let h = small();
        let cfg = SweepConfig {
            levels: vec![Level::Fraction(0.3), Level::Count(12)],
            min_failures: 5,
            max_trials: 400,
            master_seed: 3,
            ..SweepConfig::default()
        };
        let pts = sweep(&h, &cfg).unwrap();
        for chunk in pts.chunks(3) {
            let trials = chunk[0].trials;
            assert!(chunk.iter().all(|p| p.trials == trials));
            assert!(trials == 400 || chunk.iter().all(|p| p.failures >= 5));
            // the last trial was needed by at least one algorithm
            assert!(trials == 400 || chunk.iter().any(|p| p.failures == 5));
        }
        assert_eq!(pts, sweep(&h, &cfg).unwrap());
    }

    #[test]
    fn algorithm_subset_sees_the_same_instances() {
        let h = small();
        let all = SweepConfig {
            levels: vec![Level::Count(10)],
            min_failures: 3,
            max_trials: 200,
            min_trials: 200,
            ..SweepConfig::default()
        };
        let only_vb = SweepConfig {
            algorithms: vec![Algorithm::Vb],
            ..all.clone()
        };
        let a = sweep(&h, &all).unwrap();
        let b = sweep(&h, &only_vb).unwrap();
        assert_eq!(a[1], b[0]);
    }

    #[test]
    fn invalid_configs() {
        let h = small();
        let base = SweepConfig {
            levels: vec![Level::Fraction(0.1)],
            ..SweepConfig::default()
        };
        for bad in [
            SweepConfig { levels: vec![Level::Fraction(0.0)], ..base.clone() },
            SweepConfig { levels: vec![Level::Fraction(1.5)], ..base.clone() },
            SweepConfig { min_failures: 0, ..base.clone() },
            SweepConfig { max_trials: 10, min_failures: 20, ..base.clone() },
            SweepConfig { algorithms: vec![], ..base.clone() },
        ] {
            assert!(sweep(&h, &bad).is_err(), "{bad:?}");
        }
    }
}
