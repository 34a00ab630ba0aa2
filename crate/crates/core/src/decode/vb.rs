use rand::Rng;

use super::{check_inputs, DecodeResult, DecoderConfig, IterationView, Observer};
use crate::error::Result;
use crate::graph::SensingMatrix;
use crate::seed::rng_from_seed;

/// Verification status `s_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(i8)]
pub enum Status {
    /// Saw two or more identical nonzero residuals; its flagged checks will
    /// zero their other unverified neighbors.
    Marked = -1,
    Unverified = 0,
    Verified = 1,
}

/// Node-level verification state shared by VB and VB-IP.
///
/// Between iterations `residual[m] = y_m − Σ_{verified n ∈ N(m)} x̂_n` and
/// `unresolved_degree[m]` counts the neighbors of `m` that are not verified.
#[derive(Clone, Debug, PartialEq)]
pub struct VerificationState {
    pub status: Vec<Status>,
    /// `x̂_n`; meaningful once `status[n]` is `Verified`, never changed afterwards.
    pub estimate: Vec<f64>,
    /// `η_m`.
    pub residual: Vec<f64>,
    /// `d_m`.
    pub unresolved_degree: Vec<usize>,
    /// `ξ_m`.
    pub coincidence: Vec<bool>,
}

impl VerificationState {
    pub fn new(h: &SensingMatrix, y: &[f64]) -> Self {
        VerificationState {
            status: vec![Status::Unverified; h.n_vars()],
            estimate: vec![0.0; h.n_vars()],
            residual: y.to_vec(),
            unresolved_degree: (0..h.n_checks()).map(|m| h.check_degree(m)).collect(),
            coincidence: vec![false; h.n_checks()],
        }
    }

    /// Recomputes `η_m` and `d_m` from the current statuses.
    pub fn refresh(&mut self, h: &SensingMatrix, y: &[f64]) {
        for m in 0..h.n_checks() {
            let mut eta = y[m];
            let mut unresolved = 0;
            for &n in h.check_neighbors(m) {
                if self.status[n] == Status::Verified {
                    eta -= self.estimate[n];
                } else {
                    unresolved += 1;
                }
            }
            self.residual[m] = eta;
            self.unresolved_degree[m] = unresolved;
        }
    }

    /// Signal release: every flagged check with unverified (status 0)
    /// neighbors verifies them to zero and drops its flag. Returns the
    /// released variables in release order.
    pub fn release(&mut self, h: &SensingMatrix) -> Vec<usize> {
        let mut released = Vec::new();
        for m in 0..h.n_checks() {
            if !self.coincidence[m] {
                continue;
            }
            let before = released.len();
            for &n in h.check_neighbors(m) {
                if self.status[n] == Status::Unverified {
                    self.status[n] = Status::Verified;
                    self.estimate[n] = 0.0;
                    released.push(n);
                }
            }
            if released.len() > before {
                self.coincidence[m] = false;
            }
        }
        released
    }

    /// Zero release: every check whose residual is within `threshold` of
    /// zero verifies all its unresolved neighbors to zero. Uses the residuals
    /// as last refreshed; zeroing a neighbor does not change them.
    pub(crate) fn release_zero_residuals(&mut self, h: &SensingMatrix, threshold: f64, released: &mut Vec<usize>) {
        for m in 0..h.n_checks() {
            if self.unresolved_degree[m] == 0 || self.residual[m].abs() > threshold {
                continue;
            }
            for &n in h.check_neighbors(m) {
                if self.status[n] != Status::Verified {
                    self.status[n] = Status::Verified;
                    self.estimate[n] = 0.0;
                    released.push(n);
                }
            }
            self.unresolved_degree[m] = 0;
        }
    }

    /// Coincidence rule for variable `n`: groups the residuals of `M(n)` that
    /// exceed `threshold`, and for every group of two or more equal values
    /// (within `threshold`) flags its checks. Marks `n` if any group was found.
    pub(crate) fn mark_coincidence(
        &mut self,
        h: &SensingMatrix,
        n: usize,
        threshold: f64,
        scratch: &mut Vec<(f64, usize)>,
    ) -> bool {
        scratch.clear();
        scratch.extend(
            h.var_neighbors(n)
                .iter()
                .filter(|&&m| self.residual[m] > threshold)
                .map(|&m| (self.residual[m], m)),
        );
        if scratch.len() < 2 {
            return false;
        }
        scratch.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut found = false;
        let mut start = 0;
        for i in 1..=scratch.len() {
            if i == scratch.len() || scratch[i].0 - scratch[i - 1].0 > threshold {
                if i - start >= 2 {
                    found = true;
                    for &(_, m) in &scratch[start..i] {
                        self.coincidence[m] = true;
                    }
                }
                start = i;
            }
        }
        if found {
            self.status[n] = Status::Marked;
        }
        found
    }

    pub fn verified(&self) -> Vec<usize> {
        (0..self.status.len())
            .filter(|&n| self.status[n] == Status::Verified)
            .collect()
    }

    pub fn flag_count(&self) -> usize {
        self.coincidence.iter().filter(|&&f| f).count()
    }

    pub fn all_verified(&self) -> bool {
        self.status.iter().all(|&s| s == Status::Verified)
    }
}

/// Check-node half of a VB iteration: signal release on flagged checks,
/// then `η_m`, `d_m` are recomputed. Returns whether anything was released.
pub fn vb_check_update(state: &mut VerificationState, h: &SensingMatrix, y: &[f64]) -> bool {
    let released = state.release(h);
    state.refresh(h, y);
    !released.is_empty()
}

/// Variable-node half of a VB iteration.
///
/// Every variable not yet verified is visited in index order against the
/// residuals and degrees left by the check half:
/// 1. a neighbor with `|η_m| ≤ threshold` verifies it to zero;
/// 2. otherwise a neighbor with `d_m = 1` verifies it to `η_m` (one such
///    check drawn at random when there are several);
/// 3. otherwise, if still status 0, the coincidence rule may mark it.
///
/// `η_m`, `d_m` are recomputed at the end. Returns whether any status or
/// flag changed.
pub fn vb_variable_update<R: Rng>(
    state: &mut VerificationState,
    h: &SensingMatrix,
    y: &[f64],
    threshold: f64,
    rng: &mut R,
    coincidence: bool,
) -> bool {
    let mut changed = false;
    let mut scratch = Vec::new();
    let mut degree_one = Vec::new();
    for n in 0..h.n_vars() {
        if state.status[n] == Status::Verified {
            continue;
        }
        let checks = h.var_neighbors(n);
        if checks.iter().any(|&m| state.residual[m].abs() <= threshold) {
            state.status[n] = Status::Verified;
            state.estimate[n] = 0.0;
            changed = true;
            continue;
        }
        degree_one.clear();
        degree_one.extend(checks.iter().copied().filter(|&m| state.unresolved_degree[m] == 1));
        if !degree_one.is_empty() {
            let m = if degree_one.len() == 1 {
                degree_one[0]
            } else {
                degree_one[rng.random_range(0..degree_one.len())]
            };
            state.status[n] = Status::Verified;
            state.estimate[n] = state.residual[m];
            changed = true;
            continue;
        }
        if coincidence && state.status[n] == Status::Unverified {
            changed |= state.mark_coincidence(h, n, threshold, &mut scratch);
        }
    }
    state.refresh(h, y);
    changed
}

pub fn decode_vb(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode_vb_observed(h, y, cfg, &mut ())
}

/// Node-based verification decoding. Stops when every variable is verified,
/// when an iteration changes no status or flag, or at `max_iter`.
pub fn decode_vb_observed(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig, obs: &mut dyn Observer) -> Result<DecodeResult> {
    let threshold = check_inputs(h, y, cfg)?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut state = VerificationState::new(h, y);
    let mut history = Vec::new();
    let mut converged = false;

    for it in 1..=cfg.max_iter {
        let mut changed = vb_check_update(&mut state, h, y);
        changed |= vb_variable_update(&mut state, h, y, threshold, &mut rng, cfg.coincidence);
        let verified = state.verified();
        converged = verified.len() == h.n_vars();
        obs.observe(&IterationView {
            iteration: it,
            lower: None,
            upper: None,
            status: Some(&state.status),
            estimate: &state.estimate,
            verified: &verified,
            coincidence_flags: state.flag_count(),
        });
        history.push(verified);
        if converged || !changed {
            break;
        }
    }

    Ok(DecodeResult {
        iterations: history.len(),
        estimate: state.estimate,
        converged,
        verified_history: history,
    })
}
