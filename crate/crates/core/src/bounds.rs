//! Closed-form upper bounds on the entropy rate and checks along traces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::{entropy_and_fisher, EntropyTrace, ManifoldSpec, SpectralField};

pub const SLACK_ABSOLUTE: f64 = 1e-9;
pub const SLACK_RELATIVE: f64 = 1e-6;

/// `lhs <= rhs + 1e-9 + 1e-6 |rhs|`.
pub fn within_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + SLACK_ABSOLUTE + SLACK_RELATIVE * rhs.abs()
}

/// Curvature-dimension bound `e^{-kt}/2 [1/q0 - (e^{-kt} - 1)/(nk)]^{-1}`,
/// `n q0 / (2 (n + q0 t))` at `k = 0`.
pub fn ricci_bound_rhs(n: usize, k: f64, q0: f64, t: f64) -> Result<f64> {
    if !(q0 > 0.0 && q0.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "initial Fisher information must be positive, got {q0}"
        )));
    }
    if !(t > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(format!(
            "need t > 0 and n >= 1, got t = {t}, n = {n}"
        )));
    }
    let n = n as f64;
    if k == 0.0 {
        return Ok(n * q0 / (2.0 * (n + q0 * t)));
    }
    // same expression multiplied through by e^{kt}; expm1 keeps k -> 0 continuous
    let kt = k * t;
    Ok(0.5 / (kt.exp() / q0 + kt.exp_m1() / (n * k)))
}

/// Large-time limit of [`ricci_bound_rhs`]: `-nk/2` for `k < 0`, else `0`.
pub fn ricci_bound_asymptote(n: usize, k: f64) -> f64 {
    if k < 0.0 {
        -(n as f64) * k / 2.0
    } else {
        0.0
    }
}

/// Gradient-estimate bound `(1/t - k) log(sup f)`.
pub fn hamilton_bound_rhs(k: f64, sup_f: f64, t: f64) -> f64 {
    (1.0 / t - k) * sup_f.ln()
}

/// Spectral-gap bound `(1/2) e^{-lambda1 t / 2} ||Lap f||_2 sqrt(Vol) (|log inf f| + |log sup f|)`.
pub fn spectral_gap_bound_rhs(
    lambda1: f64,
    norm_laplacian_f: f64,
    vol: f64,
    inf_f: f64,
    sup_f: f64,
    t: f64,
) -> f64 {
    0.5 * (-0.5 * lambda1 * t).exp()
        * norm_laplacian_f
        * vol.sqrt()
        * (inf_f.ln().abs() + sup_f.ln().abs())
}

/// `n / (2t)`, the entropy rate of the Euclidean heat kernel.
pub fn euclidean_rate_reference(n: usize, t: f64) -> f64 {
    n as f64 / (2.0 * t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub bound_name: String,
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub satisfied: Vec<bool>,
    pub min_margin: f64,
}

impl BoundReport {
    pub fn new(name: &str, times: &[f64], lhs: &[f64], rhs: Vec<f64>) -> Self {
        let satisfied: Vec<bool> = lhs.iter().zip(&rhs).map(|(&l, &r)| within_slack(l, r)).collect();
        let min_margin = lhs
            .iter()
            .zip(&rhs)
            .map(|(l, r)| r - l)
            .fold(f64::INFINITY, f64::min);
        BoundReport {
            bound_name: name.to_string(),
            times: times.to_vec(),
            lhs: lhs.to_vec(),
            rhs,
            satisfied,
            min_margin,
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied.iter().all(|&s| s)
    }
}

/// Right-hand side of every bound applicable to `initial` on `manifold` at
/// each of `times`, in reporting order.
///
/// - `ricci` (undrifted): the curvature-dimension bound with `k` and `n` of the manifold.
/// - `bakry_emery` (drifted): `e^{-kt} q0 / 2` with the effective `k`.
/// - `hamilton` (undrifted): the gradient-estimate bound with `k` replaced by
///   `min(k, 0)` and `sup f` measured against the normalized volume, i.e.
///   `Vol * sup f`. As printed it needs `Vol = 1`, and for `k > 0` it turns
///   negative after `t = 1/k`.
/// - `spectral_gap` (undrifted): uses grid extrema of the initial datum.
pub fn bound_rhs(
    manifold: &ManifoldSpec,
    initial: &SpectralField,
    times: &[f64],
) -> Result<Vec<(&'static str, Vec<f64>)>> {
    let q0 = entropy_and_fisher(initial)?.1;
    let k = manifold.ricci_lower_bound;
    let n = manifold.dimension;
    let mut out = Vec::new();

    if manifold.is_drifted() {
        out.push(("bakry_emery", times.iter().map(|&t| 0.5 * (-k * t).exp() * q0).collect()));
        return Ok(out);
    }

    let curvature = |t: f64| -> Result<f64> {
        if q0 > 0.0 {
            ricci_bound_rhs(n, k, q0, t)
        } else {
            Ok(0.0)
        }
    };
    out.push(("ricci", times.iter().map(|&t| curvature(t)).collect::<Result<Vec<f64>>>()?));

    let (inf_f, sup_f) = initial.grid_extrema();
    let normalized_sup = sup_f * manifold.volume / initial.mass();
    let k_clamped = k.min(0.0);
    out.push((
        "hamilton",
        times.iter().map(|&t| hamilton_bound_rhs(k_clamped, normalized_sup, t)).collect(),
    ));

    if let Some(lambda1) = manifold.spectral_gap() {
        let norm = initial.laplacian_l2_norm();
        out.push((
            "spectral_gap",
            times
                .iter()
                .map(|&t| spectral_gap_bound_rhs(lambda1, norm, manifold.volume, inf_f, sup_f, t))
                .collect(),
        ));
    }
    Ok(out)
}

/// Every applicable bound (see [`bound_rhs`]) evaluated along `trace`, whose
/// left-hand side is the measured rate `q_t / 2`.
pub fn check_bounds(
    trace: &EntropyTrace,
    manifold: &ManifoldSpec,
    initial: &SpectralField,
) -> Result<Vec<BoundReport>> {
    Ok(bound_rhs(manifold, initial, &trace.times)?
        .into_iter()
        .map(|(name, rhs)| BoundReport::new(name, &trace.times, &trace.rate_direct, rhs))
        .collect())
}
