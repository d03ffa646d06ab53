//! Pointwise checks of the drifted Bochner identity on the flat torus
//!
//! ```text
//! (L - d/dt) (|grad w|^2 / w) = (1/w) |Hess w - grad w grad w^T / w|^2 - (2/w) Hess V(grad w, grad w)
//! ```
//!
//! with `L = (1/2) Lap + grad V . grad` and `dw/dt = L w`, and of the trace
//! inequality `|Hess w - grad w grad w^T / w|^2 >= (w^2 / n) (Lap log w)^2`.

use serde::Serialize;

use crate::error::{Error, Result};

use super::fourier::FourierGrid;
use super::trig::TrigPoly;
use super::{Coefficients, ManifoldKind, ManifoldSpec, SpectralField, POSITIVITY_FLOOR};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_abs: f64,
    /// Largest magnitude of any single term on the grid.
    pub scale: f64,
}

impl ResidualReport {
    pub fn relative(&self) -> f64 {
        if self.scale == 0.0 {
            self.max_abs
        } else {
            self.max_abs / self.scale
        }
    }
}

/// `w` and its first and second derivatives on an `n x n` grid.
struct Jet {
    grid: FourierGrid,
    w: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    wxx: Vec<f64>,
    wxy: Vec<f64>,
    wyy: Vec<f64>,
    v_grad: Vec<[f64; 2]>,
    v_hess: Vec<[[f64; 2]; 2]>,
}

fn torus_parts(manifold: &ManifoldSpec) -> Result<(f64, f64, TrigPoly)> {
    match &manifold.kind {
        ManifoldKind::Torus2 { l1, l2 } => Ok((*l1, *l2, TrigPoly::constant(*l1, *l2, 0.0))),
        ManifoldKind::Torus2Drift { l1, l2, potential } => Ok((*l1, *l2, potential.clone())),
        _ => Err(Error::Unsupported("Bochner residual is evaluated on the flat torus")),
    }
}

fn jet(manifold: &ManifoldSpec, w: &SpectralField, n: usize) -> Result<Jet> {
    let (l1, l2, v) = torus_parts(manifold)?;
    let modes = match &w.coefficients {
        Coefficients::Fourier(m) => m,
        Coefficients::Zonal(_) => return Err(Error::Unsupported("zonal field on a torus")),
    };
    if 2 * modes.k1.max(modes.k2) >= n {
        return Err(Error::InvalidParameter(format!(
            "grid of {n} points does not resolve cutoff {}",
            modes.k1.max(modes.k2)
        )));
    }
    let grid = FourierGrid::new(n, n, l1, l2);
    let inv_root = 1.0 / w.manifold.volume.sqrt();
    let values = grid.synthesize(&modes.map(|_, _, c| c * inv_root));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= POSITIVITY_FLOOR {
        return Err(Error::PositivityLoss { min });
    }
    let spec = grid.analyze(&values);
    let points = grid.points();
    Ok(Jet {
        wx: grid.derivative(&spec, (1, 0)),
        wy: grid.derivative(&spec, (0, 1)),
        wxx: grid.derivative(&spec, (2, 0)),
        wxy: grid.derivative(&spec, (1, 1)),
        wyy: grid.derivative(&spec, (0, 2)),
        v_grad: points.iter().map(|&(x, y)| v.gradient(x, y)).collect(),
        v_hess: points.iter().map(|&(x, y)| v.hessian(x, y)).collect(),
        w: values,
        grid,
    })
}

impl Jet {
    /// `|Hess w - grad w grad w^T / w|^2` at grid point `i`.
    fn corrected_hessian_sq(&self, i: usize) -> f64 {
        let w = self.w[i];
        let a11 = self.wxx[i] - self.wx[i] * self.wx[i] / w;
        let a12 = self.wxy[i] - self.wx[i] * self.wy[i] / w;
        let a22 = self.wyy[i] - self.wy[i] * self.wy[i] / w;
        a11 * a11 + 2.0 * a12 * a12 + a22 * a22
    }

    fn grad_sq(&self, i: usize) -> f64 {
        self.wx[i] * self.wx[i] + self.wy[i] * self.wy[i]
    }
}

/// Maximum pointwise discrepancy between the two sides of the identity, with
/// `d/dt` expanded by the chain rule through `dw/dt = L w`.
pub fn bochner_residual(manifold: &ManifoldSpec, w: &SpectralField, n: usize) -> Result<ResidualReport> {
    let j = jet(manifold, w, n)?;
    let g = &j.grid;
    let len = g.len();

    let lw: Vec<f64> = (0..len)
        .map(|i| 0.5 * (j.wxx[i] + j.wyy[i]) + j.v_grad[i][0] * j.wx[i] + j.v_grad[i][1] * j.wy[i])
        .collect();
    let lw_spec = g.analyze(&lw);
    let lw_x = g.derivative(&lw_spec, (1, 0));
    let lw_y = g.derivative(&lw_spec, (0, 1));

    let f: Vec<f64> = (0..len).map(|i| j.grad_sq(i) / j.w[i]).collect();
    let f_spec = g.analyze(&f);
    let f_x = g.derivative(&f_spec, (1, 0));
    let f_y = g.derivative(&f_spec, (0, 1));
    let f_xx = g.derivative(&f_spec, (2, 0));
    let f_yy = g.derivative(&f_spec, (0, 2));

    let mut max_abs: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..len {
        let w = j.w[i];
        let half_lap = 0.5 * (f_xx[i] + f_yy[i]);
        let drift = j.v_grad[i][0] * f_x[i] + j.v_grad[i][1] * f_y[i];
        let dt = 2.0 * (j.wx[i] * lw_x[i] + j.wy[i] * lw_y[i]) / w - j.grad_sq(i) * lw[i] / (w * w);
        let hess_term = j.corrected_hessian_sq(i) / w;
        let h = &j.v_hess[i];
        let (gx, gy) = (j.wx[i], j.wy[i]);
        let drift_curv = 2.0 * (h[0][0] * gx * gx + 2.0 * h[0][1] * gx * gy + h[1][1] * gy * gy) / w;
        let lhs = half_lap + drift - dt;
        let rhs = hess_term - drift_curv;
        max_abs = max_abs.max((lhs - rhs).abs());
        scale = [half_lap, drift, dt, hess_term, drift_curv]
            .iter()
            .fold(scale, |s, t| s.max(t.abs()));
    }
    Ok(ResidualReport { max_abs, scale })
}

/// Minimum over the grid of `|Hess w - grad w grad w^T / w|^2 - (w^2/2)(Lap log w)^2`,
/// relative to the largest left-hand side.
pub fn trace_inequality_margin(manifold: &ManifoldSpec, w: &SpectralField, n: usize) -> Result<f64> {
    let j = jet(manifold, w, n)?;
    let mut min_margin = f64::INFINITY;
    let mut scale: f64 = 0.0;
    let mut margins = Vec::with_capacity(j.grid.len());
    for i in 0..j.grid.len() {
        let wv = j.w[i];
        let lap_log = (j.wxx[i] + j.wyy[i]) / wv - j.grad_sq(i) / (wv * wv);
        let lhs = j.corrected_hessian_sq(i);
        let rhs = wv * wv * lap_log * lap_log / 2.0;
        scale = scale.max(lhs);
        margins.push(lhs - rhs);
    }
    for m in margins {
        min_margin = min_margin.min(m);
    }
    Ok(if scale == 0.0 { min_margin } else { min_margin / scale })
}
