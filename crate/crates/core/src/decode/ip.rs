use super::{check_inputs, DecodeResult, DecoderConfig, IterationView, Observer};
use crate::error::Result;
use crate::graph::SensingMatrix;

/// Check-node interval update for one check.
///
/// For every neighbor `i`:
/// `L_out[i] = max(0, y_m − Σ_{j≠i} U_in[j])`, `U_out[i] = y_m − Σ_{j≠i} L_in[j]`.
/// Exclusion sums are prefix + suffix sums, so each output is a monotone
/// function of every input even under rounding.
pub fn ip_check_update(y_m: f64, in_lower: &[f64], in_upper: &[f64], out_lower: &mut [f64], out_upper: &mut [f64]) {
    let d = in_lower.len();
    debug_assert!(in_upper.len() == d && out_lower.len() == d && out_upper.len() == d);
    // Forward pass parks the prefix sums in the output slots.
    let (mut pre_l, mut pre_u) = (0.0, 0.0);
    for i in 0..d {
        out_upper[i] = pre_l;
        out_lower[i] = pre_u;
        pre_l += in_lower[i];
        pre_u += in_upper[i];
    }
    let (mut suf_l, mut suf_u) = (0.0, 0.0);
    for i in (0..d).rev() {
        let excl_l = out_upper[i] + suf_l;
        let excl_u = out_lower[i] + suf_u;
        out_lower[i] = (y_m - excl_u).max(0.0);
        out_upper[i] = y_m - excl_l;
        suf_l += in_lower[i];
        suf_u += in_upper[i];
    }
}

/// Variable-node aggregation: `(max L_in, min U_in)`. Every outgoing edge
/// carries this same pair.
pub fn ip_variable_update(incoming: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    incoming
        .into_iter()
        .fold((f64::NEG_INFINITY, f64::INFINITY), |(lo, hi), (l, u)| (lo.max(l), hi.min(u)))
}

/// Interval messages on every edge, plus the per-variable aggregates.
///
/// Edge ids follow [`SensingMatrix`]'s check-major numbering.
#[derive(Clone, Debug, PartialEq)]
pub struct IpMessages {
    /// `L_{m→n}`, `U_{m→n}`.
    pub c2v_lower: Vec<f64>,
    pub c2v_upper: Vec<f64>,
    /// `L_{n→m}`, `U_{n→m}`.
    pub v2c_lower: Vec<f64>,
    pub v2c_upper: Vec<f64>,
    /// `L_n`, `U_n`.
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<f64>,
}

impl IpMessages {
    /// `L_{n→m} = 0`, `U_{n→m} = y_m`; the aggregates start at `[0, min_m y_m]`.
    pub fn new(h: &SensingMatrix, y: &[f64]) -> Self {
        let e = h.n_edges();
        let mut v2c_upper = vec![0.0; e];
        for m in 0..h.n_checks() {
            v2c_upper[h.check_edges(m)].fill(y[m]);
        }
        let var_upper = (0..h.n_vars())
            .map(|n| h.var_neighbors(n).iter().map(|&m| y[m]).fold(f64::INFINITY, f64::min))
            .collect();
        IpMessages {
            c2v_lower: vec![0.0; e],
            c2v_upper: vec![0.0; e],
            v2c_lower: vec![0.0; e],
            v2c_upper,
            var_lower: vec![0.0; h.n_vars()],
            var_upper,
        }
    }

    pub fn check_sweep(&mut self, h: &SensingMatrix, y: &[f64]) {
        for m in 0..h.n_checks() {
            let r = h.check_edges(m);
            ip_check_update(
                y[m],
                &self.v2c_lower[r.clone()],
                &self.v2c_upper[r.clone()],
                &mut self.c2v_lower[r.clone()],
                &mut self.c2v_upper[r],
            );
        }
    }

    /// Aggregates variable `n` and broadcasts; returns whether any outgoing
    /// message changed.
    pub fn update_variable(&mut self, h: &SensingMatrix, n: usize) -> bool {
        let edges = h.var_edges(n);
        let (lo, hi) = ip_variable_update(edges.iter().map(|&e| (self.c2v_lower[e], self.c2v_upper[e])));
        self.var_lower[n] = lo;
        self.var_upper[n] = hi;
        self.broadcast(h, n, lo, hi)
    }

    /// Fixes variable `n` to `[value, value]` on every outgoing edge.
    pub fn pin(&mut self, h: &SensingMatrix, n: usize, value: f64) -> bool {
        self.var_lower[n] = value;
        self.var_upper[n] = value;
        self.broadcast(h, n, value, value)
    }

    fn broadcast(&mut self, h: &SensingMatrix, n: usize, lo: f64, hi: f64) -> bool {
        let mut changed = false;
        for &e in h.var_edges(n) {
            changed |= self.v2c_lower[e].to_bits() != lo.to_bits() || self.v2c_upper[e].to_bits() != hi.to_bits();
            self.v2c_lower[e] = lo;
            self.v2c_upper[e] = hi;
        }
        changed
    }

}

pub fn decode_ip(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig) -> Result<DecodeResult> {
    decode_ip_observed(h, y, cfg, &mut ())
}

/// Interval passing. Stops when every interval is closed, when an iteration
/// leaves every message bit-identical (a fixed point), or at `max_iter`.
/// The estimate is the lower bound `L_n`.
///
/// A variable whose interval has closed (`U_n − L_n` within the equality
/// threshold) is fixed at `L_n` and its messages are pinned to that value.
/// In exact arithmetic this changes nothing; in floating point it stops
/// rounding errors from being amplified around cycles, which otherwise
/// grow until intervals cross and exclude the true signal.
pub fn decode_ip_observed(h: &SensingMatrix, y: &[f64], cfg: &DecoderConfig, obs: &mut dyn Observer) -> Result<DecodeResult> {
    let threshold = check_inputs(h, y, cfg)?;
    let mut msg = IpMessages::new(h, y);
    let mut history = Vec::new();
    let mut converged = false;
    let mut is_closed = vec![false; h.n_vars()];

    for it in 1..=cfg.max_iter {
        msg.check_sweep(h, y);
        let mut changed = false;
        for n in 0..h.n_vars() {
            if is_closed[n] {
                continue;
            }
            changed |= msg.update_variable(h, n);
            if msg.var_upper[n] - msg.var_lower[n] <= threshold {
                is_closed[n] = true;
                msg.pin(h, n, msg.var_lower[n]);
                changed = true;
            }
        }
        let closed: Vec<usize> = (0..h.n_vars()).filter(|&n| is_closed[n]).collect();
        converged = closed.len() == h.n_vars();
        obs.observe(&IterationView {
            iteration: it,
            lower: Some(&msg.var_lower),
            upper: Some(&msg.var_upper),
            status: None,
            estimate: &msg.var_lower,
            verified: &closed,
            coincidence_flags: 0,
        });
        history.push(closed);
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
