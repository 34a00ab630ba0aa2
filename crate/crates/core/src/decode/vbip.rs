use super::ip::IpMessages;
use super::vb::{Status, VerificationState};
use super::{check_inputs, DecodeResult, DecoderConfig, IterationView, Observer};
use crate::error::Result;
use crate::graph::SensingMatrix;

pub fn decode_vbip(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode_vbip_observed(h, y, cfg, &mut ())
}

/// Verification-based interval passing.
///
/// Carries the full set of interval messages together with the verification
/// state. One iteration:
///
/// * check side: flagged checks release their status-0 neighbors as zeros,
///   and so does every check whose residual is already zero; then interval
///   messages and residuals `η_m` are recomputed. The zero release lets
///   values verified by interval closure act on the next check sweep the
///   same way a coincidence release does in VB;
/// * variable side, for every variable not yet verified: interval
///   aggregation, then the coincidence rule on the residuals (status 0
///   only), then closure: `U_n − L_n ≤ threshold` verifies `x̂_n = L_n`.
///
/// A verified variable sends `[x̂_n, x̂_n]` on every edge from then on. The
/// estimate is `L_n` for every variable.
pub fn decode_vbip_observed(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig, obs: &mut dyn Observer) -> Result<DecodeResult> {
    let threshold = check_inputs(h, y, cfg)?;
    let mut msg = IpMessages::new(h, y);
    let mut state = VerificationState::new(h, y);
    let mut history = Vec::new();
    let mut converged = false;
    let mut scratch = Vec::new();

    for it in 1..=cfg.max_iter {
        let mut released = state.release(h);
        state.release_zero_residuals(h, threshold, &mut released);
        let mut changed = !released.is_empty();
        for &n in &released {
            msg.pin(h, n, 0.0);
        }
        msg.check_sweep(h, y);
        state.refresh(h, y);

        for n in 0..h.n_vars() {
            if state.status[n] == Status::Verified {
                continue;
            }
            changed |= msg.update_variable(h, n);
            if cfg.coincidence && state.status[n] == Status::Unverified {
                changed |= state.mark_coincidence(h, n, threshold, &mut scratch);
            }
            if msg.var_upper[n] - msg.var_lower[n] <= threshold {
                let value = msg.var_lower[n];
                state.status[n] = Status::Verified;
                state.estimate[n] = value;
                msg.pin(h, n, value);
                changed = true;
            }
        }
        state.refresh(h, y);

        let verified = state.verified();
        converged = verified.len() == h.n_vars();
        obs.observe(&IterationView {
            iteration: it,
            lower: Some(&msg.var_lower),
            upper: Some(&msg.var_upper),
            status: Some(&state.status),
            estimate: &msg.var_lower,
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
        estimate: msg.var_lower,
        converged,
        verified_history: history,
    })
}
