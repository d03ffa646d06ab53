//! Exact spectral heat flow on the compact model manifolds.
//!
//! A field is stored by its coefficients against an orthonormal Laplacian
//! eigenbasis: `exp(2 pi i m.x / L) / sqrt(Vol)` on the circle and flat
//! torus, `sqrt((2l+1)/(4 pi R^2)) P_l(cos theta)` for zonal data on the
//! sphere of radius `R`. Undrifted evolution is diagonal and exact; the
//! drifted torus is integrated in time with an integrating-factor RK4.
//!
//! Entropy is assembled as `-mass log(mean) - mean int phi(rho)` with
//! `rho = u / mean - 1` taken straight from the non-constant modes and
//! `phi(d) = (1+d) log(1+d) - d`, so late-time entropies keep their relative
//! accuracy long after `u` is constant to machine precision.

pub mod bochner;
pub mod fixtures;
pub mod fourier;
pub mod legendre;
pub mod trig;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use fourier::{drift_term, eigenvalue, grid_size, FourierGrid, ModeArray};
use legendre::{gauss_legendre, legendre_table};
use trig::TrigPoly;

/// Smallest admissible resolved value of a density.
pub const POSITIVITY_FLOOR: f64 = 1e-8;

/// Largest admissible relative energy outside the cutoff at projection.
pub const TAIL_ENERGY_LIMIT: f64 = 1e-20;

/// Grid used to bound the Hessian of a drift potential.
const HESSIAN_SCAN_POINTS: usize = 256;

#[derive(Debug, Clone, PartialEq)]
pub enum ManifoldKind {
    Circle { length: f64 },
    Torus2 { l1: f64, l2: f64 },
    Sphere2 { radius: f64 },
    Torus2Drift { l1: f64, l2: f64, potential: TrigPoly },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifoldSpec {
    pub kind: ManifoldKind,
    pub dimension: usize,
    pub ricci_lower_bound: f64,
    pub volume: f64,
}

fn check_length(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl ManifoldSpec {
    pub fn circle(length: f64) -> Result<Self> {
        check_length("length", length)?;
        Ok(ManifoldSpec {
            kind: ManifoldKind::Circle { length },
            dimension: 1,
            ricci_lower_bound: 0.0,
            volume: length,
        })
    }

    pub fn torus2(l1: f64, l2: f64) -> Result<Self> {
        check_length("l1", l1)?;
        check_length("l2", l2)?;
        Ok(ManifoldSpec {
            kind: ManifoldKind::Torus2 { l1, l2 },
            dimension: 2,
            ricci_lower_bound: 0.0,
            volume: l1 * l2,
        })
    }

    pub fn sphere2(radius: f64) -> Result<Self> {
        check_length("radius", radius)?;
        Ok(ManifoldSpec {
            kind: ManifoldKind::Sphere2 { radius },
            dimension: 2,
            ricci_lower_bound: 1.0 / (radius * radius),
            volume: 4.0 * PI * radius * radius,
        })
    }

    /// Flat torus with generator `(1/2) Lap + grad V . grad`. The curvature
    /// constant is `k = -2 max lambda_max(Hess V)` over a `256 x 256` grid.
    pub fn torus2_drift(l1: f64, l2: f64, potential: TrigPoly) -> Result<Self> {
        check_length("l1", l1)?;
        check_length("l2", l2)?;
        if potential.l1 != l1 || potential.l2 != l2 {
            return Err(Error::InvalidParameter(
                "potential periods differ from the torus side lengths".into(),
            ));
        }
        let n = HESSIAN_SCAN_POINTS;
        let mut top = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                let x = l1 * i as f64 / n as f64;
                let y = l2 * j as f64 / n as f64;
                top = top.max(potential.max_hessian_eigenvalue(x, y));
            }
        }
        Ok(ManifoldSpec {
            kind: ManifoldKind::Torus2Drift { l1, l2, potential },
            dimension: 2,
            ricci_lower_bound: -2.0 * top,
            volume: l1 * l2,
        })
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            ManifoldKind::Circle { .. } => "circle",
            ManifoldKind::Torus2 { .. } => "torus",
            ManifoldKind::Sphere2 { .. } => "sphere",
            ManifoldKind::Torus2Drift { .. } => "torus-drift",
        }
    }

    pub fn is_drifted(&self) -> bool {
        matches!(self.kind, ManifoldKind::Torus2Drift { .. })
    }

    pub fn potential(&self) -> Option<&TrigPoly> {
        match &self.kind {
            ManifoldKind::Torus2Drift { potential, .. } => Some(potential),
            _ => None,
        }
    }

    /// Side lengths of the periodic box, `(L, 1)` for the circle.
    pub fn periods(&self) -> Option<(f64, f64)> {
        match self.kind {
            ManifoldKind::Circle { length } => Some((length, 1.0)),
            ManifoldKind::Torus2 { l1, l2 } | ManifoldKind::Torus2Drift { l1, l2, .. } => {
                Some((l1, l2))
            }
            ManifoldKind::Sphere2 { .. } => None,
        }
    }

    /// Smallest nonzero Laplacian eigenvalue; `None` for the drifted torus,
    /// whose generator is not the Laplacian.
    pub fn spectral_gap(&self) -> Option<f64> {
        match self.kind {
            ManifoldKind::Circle { length } => Some((2.0 * PI / length).powi(2)),
            ManifoldKind::Torus2 { l1, l2 } => {
                Some((2.0 * PI / l1.max(l2)).powi(2))
            }
            ManifoldKind::Sphere2 { radius } => Some(2.0 / (radius * radius)),
            ManifoldKind::Torus2Drift { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Coefficients {
    Fourier(ModeArray),
    Zonal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub manifold: ManifoldSpec,
    pub coefficients: Coefficients,
    pub cutoff: usize,
}

/// A field resolved on its quadrature grid.
#[derive(Debug, Clone)]
pub(crate) struct Resolved {
    /// Quadrature weights of the reference measure (`dx`, or normalized `mu`).
    pub weights: Vec<f64>,
    pub u: Vec<f64>,
    /// `u / mean - 1`, from the non-constant modes.
    pub deviation: Vec<f64>,
    pub mean: f64,
    pub grad_sq: Vec<f64>,
    pub laplacian: Vec<f64>,
}

impl Resolved {
    fn min(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn integrate<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        self.weights.iter().enumerate().map(|(i, w)| w * f(i)).sum()
    }

    pub(crate) fn require_positive(&self) -> Result<()> {
        let min = self.min();
        if min > POSITIVITY_FLOOR {
            Ok(())
        } else {
            Err(Error::PositivityLoss { min })
        }
    }
}

/// `(1+d) log(1+d) - d`, without cancellation near zero.
pub fn phi(d: f64) -> f64 {
    if d.abs() < 0.05 {
        let mut power = d * d;
        let mut sum = 0.0;
        let mut k = 2.0;
        loop {
            let term = power / (k * (k - 1.0));
            sum += term;
            if term.abs() <= f64::EPSILON * 0.25 * sum.abs() {
                break;
            }
            power *= -d;
            k += 1.0;
        }
        sum
    } else {
        (1.0 + d) * d.ln_1p() - d
    }
}

/// Entropy pieces of a resolved density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyParts {
    pub entropy: f64,
    /// `mean int phi(rho)`, the distance of the entropy from its limit.
    pub deficit: f64,
    pub fisher: f64,
    pub mass: f64,
}

fn sphere_nodes(cutoff: usize) -> usize {
    (4 * (cutoff + 1)).max(64)
}

fn zonal_norm(l: usize, radius: f64) -> f64 {
    ((2 * l + 1) as f64 / (4.0 * PI * radius * radius)).sqrt()
}

/// Project a pointwise function. Fourier manifolds pass `[x]` or `[x, y]`;
/// the sphere passes `[theta]`.
pub fn project_initial(
    manifold: &ManifoldSpec,
    f: &dyn Fn(&[f64]) -> f64,
    cutoff: usize,
) -> Result<SpectralField> {
    let coefficients = match manifold.kind {
        ManifoldKind::Sphere2 { radius } => {
            let m = sphere_nodes(cutoff);
            let lmax = m / 2;
            let (nodes, weights) = gauss_legendre(m);
            let mut c = vec![0.0; lmax + 1];
            for (x, w) in nodes.iter().zip(&weights) {
                let value = f(&[x.acos()]);
                check_sample(value)?;
                let (p, _) = legendre_table(lmax, *x);
                for (l, cl) in c.iter_mut().enumerate() {
                    *cl += 2.0 * PI * radius * radius * w * value * zonal_norm(l, radius) * p[l];
                }
            }
            let total: f64 = c.iter().map(|v| v * v).sum();
            let tail: f64 = c[cutoff + 1..].iter().map(|v| v * v).sum();
            check_tail(tail, total)?;
            c.truncate(cutoff + 1);
            Coefficients::Zonal(c)
        }
        _ => {
            let (l1, l2) = manifold.periods().expect("periodic manifold");
            let k2 = if manifold.dimension == 1 { 0 } else { cutoff };
            let grid = FourierGrid::new(grid_size(cutoff), grid_size(k2), l1, l2);
            let mut values = Vec::with_capacity(grid.len());
            for (x, y) in grid.points() {
                let v = if manifold.dimension == 1 { f(&[x]) } else { f(&[x, y]) };
                check_sample(v)?;
                values.push(v);
            }
            let spectrum = grid.analyze(&values);
            let total: f64 = spectrum.iter().map(|c| c.norm_sqr()).sum();
            let (modes, tail) = grid.truncate(&spectrum, cutoff, k2);
            check_tail(tail, total)?;
            let root = manifold.volume.sqrt();
            Coefficients::Fourier(modes.map(|_, _, c| c * root))
        }
    };
    let field = SpectralField {
        manifold: manifold.clone(),
        coefficients,
        cutoff,
    };
    let min = field.resolve().min();
    if min <= POSITIVITY_FLOOR {
        return Err(Error::TruncationInsufficient(format!(
            "resolved minimum {min} is not positive"
        )));
    }
    Ok(field)
}

fn check_sample(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "initial datum must be positive and finite, got {v}"
        )))
    }
}

fn check_tail(tail: f64, total: f64) -> Result<()> {
    if tail <= TAIL_ENERGY_LIMIT * total {
        Ok(())
    } else {
        Err(Error::TruncationInsufficient(format!(
            "relative energy {} beyond the cutoff",
            tail / total
        )))
    }
}

impl SpectralField {
    /// Build a field from a trigonometric polynomial that fits in the cutoff.
    pub fn from_trig(manifold: &ManifoldSpec, poly: &TrigPoly, cutoff: usize) -> Result<Self> {
        let (l1, l2) = manifold
            .periods()
            .ok_or(Error::Unsupported("trigonometric data needs a periodic manifold"))?;
        if poly.l1 != l1 || poly.l2 != l2 {
            return Err(Error::InvalidParameter("polynomial periods differ from the manifold".into()));
        }
        let k2 = if manifold.dimension == 1 { 0 } else { cutoff };
        let mut modes = ModeArray::zeros(cutoff, k2);
        let root = manifold.volume.sqrt();
        for (m1, m2, c) in poly.exp_coefficients() {
            if !modes.contains(m1, m2) {
                return Err(Error::TruncationInsufficient(format!(
                    "mode ({m1}, {m2}) exceeds cutoff {cutoff}"
                )));
            }
            modes.set(m1, m2, c * root);
        }
        Ok(SpectralField {
            manifold: manifold.clone(),
            coefficients: Coefficients::Fourier(modes),
            cutoff,
        })
    }

    pub fn scaled(&self, factor: f64) -> SpectralField {
        let coefficients = match &self.coefficients {
            Coefficients::Fourier(m) => Coefficients::Fourier(m.map(|_, _, c| c * factor)),
            Coefficients::Zonal(c) => Coefficients::Zonal(c.iter().map(|v| v * factor).collect()),
        };
        SpectralField {
            coefficients,
            ..self.clone()
        }
    }

    /// Coefficient of the constant eigenfunction.
    pub fn c0(&self) -> f64 {
        match &self.coefficients {
            Coefficients::Fourier(m) => m.get(0, 0).re,
            Coefficients::Zonal(c) => c[0],
        }
    }

    /// `int u dmu` (the normalized measure on the drifted torus, `dx` otherwise).
    pub fn mass(&self) -> f64 {
        if self.manifold.is_drifted() {
            let r = self.resolve();
            r.integrate(|i| r.u[i])
        } else {
            self.c0() * self.manifold.volume.sqrt()
        }
    }

    /// Laplacian eigenvalue and coefficient magnitude of every mode.
    fn spectrum(&self) -> Vec<(f64, f64)> {
        match (&self.coefficients, &self.manifold.kind) {
            (Coefficients::Zonal(c), ManifoldKind::Sphere2 { radius }) => c
                .iter()
                .enumerate()
                .map(|(l, v)| ((l * (l + 1)) as f64 / (radius * radius), v.abs()))
                .collect(),
            (Coefficients::Fourier(m), _) => {
                let (l1, l2) = self.manifold.periods().expect("periodic manifold");
                m.modes()
                    .zip(m.data.iter())
                    .map(|((m1, m2), c)| (eigenvalue(m1, m2, l1, l2), c.norm()))
                    .collect()
            }
            _ => unreachable!("coefficient layout matches the manifold"),
        }
    }

    /// `||Lap f||_2 = (sum lambda_j^2 c_j^2)^{1/2}`.
    pub fn laplacian_l2_norm(&self) -> f64 {
        self.spectrum()
            .iter()
            .map(|(l, c)| (l * c).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Minimum and maximum over the evaluation grid.
    pub fn grid_extrema(&self) -> (f64, f64) {
        let r = self.resolve();
        r.u.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
    }

    pub(crate) fn resolve(&self) -> Resolved {
        match (&self.coefficients, &self.manifold.kind) {
            (Coefficients::Zonal(c), ManifoldKind::Sphere2 { radius }) => resolve_zonal(c, *radius, self.cutoff),
            (Coefficients::Fourier(m), _) => resolve_fourier(m, &self.manifold),
            _ => unreachable!("coefficient layout matches the manifold"),
        }
    }
}

fn finish_resolved(weights: Vec<f64>, u: Vec<f64>, p: Vec<f64>, c0_value: f64, grad_sq: Vec<f64>, laplacian: Vec<f64>) -> Resolved {
    let total: f64 = weights.iter().sum();
    let p_mean = weights.iter().zip(&p).map(|(w, p)| w * p).sum::<f64>() / total;
    let mean = c0_value + p_mean;
    let deviation = p.iter().map(|p| (p - p_mean) / mean).collect();
    Resolved {
        weights,
        u,
        deviation,
        mean,
        grad_sq,
        laplacian,
    }
}

fn resolve_zonal(c: &[f64], radius: f64, cutoff: usize) -> Resolved {
    let m = sphere_nodes(cutoff);
    let (nodes, gl) = gauss_legendre(m);
    let lmax = c.len() - 1;
    let r2 = radius * radius;
    let mut u = Vec::with_capacity(m);
    let mut p = Vec::with_capacity(m);
    let mut grad_sq = Vec::with_capacity(m);
    let mut laplacian = Vec::with_capacity(m);
    for &x in &nodes {
        let (pl, dpl) = legendre_table(lmax, x);
        let (mut nonconst, mut dx, mut lap) = (0.0, 0.0, 0.0);
        for l in 1..=lmax {
            let a = c[l] * zonal_norm(l, radius);
            nonconst += a * pl[l];
            dx += a * dpl[l];
            lap -= (l * (l + 1)) as f64 / r2 * a * pl[l];
        }
        let c0_value = c[0] * zonal_norm(0, radius);
        u.push(c0_value + nonconst);
        p.push(nonconst);
        grad_sq.push((1.0 - x * x) * dx * dx / r2);
        laplacian.push(lap);
    }
    let weights = gl.iter().map(|w| 2.0 * PI * r2 * w).collect();
    finish_resolved(weights, u, p, c[0] * zonal_norm(0, radius), grad_sq, laplacian)
}

fn resolve_fourier(m: &ModeArray, manifold: &ManifoldSpec) -> Resolved {
    let (l1, l2) = manifold.periods().expect("periodic manifold");
    let grid = FourierGrid::new(grid_size(m.k1), grid_size(m.k2), l1, l2);
    let inv_root = 1.0 / manifold.volume.sqrt();
    let plain = m.map(|_, _, c| c * inv_root);
    let u = grid.synthesize(&plain);
    let p = grid.synthesize(&plain.map(|m1, m2, c| if m1 == 0 && m2 == 0 { Complex64::new(0.0, 0.0) } else { c }));
    let ux = grid.synthesize(&plain.map(|m1, _, c| c * Complex64::new(0.0, 2.0 * PI * m1 as f64 / l1)));
    let uy = grid.synthesize(&plain.map(|_, m2, c| c * Complex64::new(0.0, 2.0 * PI * m2 as f64 / l2)));
    let laplacian = grid.synthesize(&plain.map(|m1, m2, c| c * -eigenvalue(m1, m2, l1, l2)));
    let grad_sq = ux.iter().zip(&uy).map(|(a, b)| a * a + b * b).collect();
    let weights = match manifold.potential() {
        Some(v) => {
            let raw: Vec<f64> = grid.points().iter().map(|&(x, y)| (2.0 * v.value(x, y)).exp()).collect();
            let z: f64 = raw.iter().sum();
            raw.into_iter().map(|w| w / z).collect()
        }
        None => vec![manifold.volume / grid.len() as f64; grid.len()],
    };
    finish_resolved(weights, u, p, plain.get(0, 0).re, grad_sq, laplacian)
}

/// Entropy, its deficit, Fisher information and mass.
pub fn entropy_parts(field: &SpectralField) -> Result<EntropyParts> {
    let r = field.resolve();
    r.require_positive()?;
    let total: f64 = r.weights.iter().sum();
    let deficit = r.mean * r.integrate(|i| phi(r.deviation[i]));
    let entropy = -r.mean * total * r.mean.ln() - deficit;
    let fisher = r.integrate(|i| r.grad_sq[i] / r.u[i]);
    let mass = r.integrate(|i| r.u[i]);
    Ok(EntropyParts {
        entropy,
        deficit,
        fisher,
        mass,
    })
}

/// `(-int u log u, int |grad u|^2 / u)` against the manifold's reference measure.
pub fn entropy_and_fisher(field: &SpectralField) -> Result<(f64, f64)> {
    let parts = entropy_parts(field)?;
    Ok((parts.entropy, parts.fisher))
}

fn check_time(t: f64) -> Result<()> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")))
    }
}

/// `c_j -> exp(-lambda_j t / 2) c_j`.
pub fn evolve(field: &SpectralField, t: f64) -> Result<SpectralField> {
    check_time(t)?;
    let coefficients = match (&field.coefficients, &field.manifold.kind) {
        (_, ManifoldKind::Torus2Drift { .. }) => {
            return Err(Error::Unsupported("drifted torus needs evolve_drift"))
        }
        (Coefficients::Zonal(c), ManifoldKind::Sphere2 { radius }) => Coefficients::Zonal(
            c.iter()
                .enumerate()
                .map(|(l, v)| v * (-0.5 * (l * (l + 1)) as f64 / (radius * radius) * t).exp())
                .collect(),
        ),
        (Coefficients::Fourier(m), _) => {
            let (l1, l2) = field.manifold.periods().expect("periodic manifold");
            Coefficients::Fourier(m.map(|m1, m2, c| c * (-0.5 * eigenvalue(m1, m2, l1, l2) * t).exp()))
        }
        _ => unreachable!("coefficient layout matches the manifold"),
    };
    Ok(SpectralField {
        coefficients,
        ..field.clone()
    })
}

/// Integrating-factor RK4 for `du/dt = (1/2) Lap u + grad V . grad u`.
struct DriftStepper {
    potential: Vec<(i64, i64, Complex64)>,
    l1: f64,
    l2: f64,
    h: f64,
    full: ModeArray,
    half: ModeArray,
}

impl DriftStepper {
    fn new(manifold: &ManifoldSpec, k1: usize, k2: usize, h: f64) -> Result<Self> {
        let (l1, l2, v) = match &manifold.kind {
            ManifoldKind::Torus2Drift { l1, l2, potential } => (*l1, *l2, potential),
            _ => return Err(Error::Unsupported("evolve_drift needs the drifted torus")),
        };
        let decay = |fraction: f64| {
            ModeArray::zeros(k1, k2).map(|m1, m2, _| {
                Complex64::new((-0.5 * eigenvalue(m1, m2, l1, l2) * h * fraction).exp(), 0.0)
            })
        };
        Ok(DriftStepper {
            potential: v.exp_coefficients().into_iter().filter(|e| e.0 != 0 || e.1 != 0).collect(),
            l1,
            l2,
            h,
            full: decay(1.0),
            half: decay(0.5),
        })
    }

    fn drift(&self, u: &ModeArray) -> ModeArray {
        drift_term(&self.potential, u, self.l1, self.l2)
    }

    fn step(&self, u: &ModeArray) -> ModeArray {
        let h = self.h;
        let mul = |a: &ModeArray, e: &ModeArray| a.map(|m1, m2, c| c * e.get(m1, m2));
        let axpy = |a: &ModeArray, s: f64, b: &ModeArray| {
            let mut out = a.clone();
            for (o, x) in out.data.iter_mut().zip(&b.data) {
                *o += x * s;
            }
            out
        };
        let k1 = self.drift(u);
        let k2 = self.drift(&mul(&axpy(u, 0.5 * h, &k1), &self.half));
        let k3 = self.drift(&axpy(&mul(u, &self.half), 0.5 * h, &k2));
        let k4 = self.drift(&axpy(&mul(u, &self.full), h, &mul(&k3, &self.half)));
        let mut out = mul(u, &self.full);
        let e_k1 = mul(&k1, &self.full);
        let mid = mul(&axpy(&k2, 1.0, &k3), &self.half);
        for i in 0..out.data.len() {
            out.data[i] += (e_k1.data[i] + mid.data[i] * 2.0 + k4.data[i]) * (h / 6.0);
        }
        out
    }
}

fn fourier_modes(field: &SpectralField) -> &ModeArray {
    match &field.coefficients {
        Coefficients::Fourier(m) => m,
        Coefficients::Zonal(_) => unreachable!("drifted fields are Fourier"),
    }
}

fn step_count(t: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("step must be positive, got {dt}")));
    }
    Ok(((t / dt) - 1e-9).ceil().max(0.0) as usize)
}

/// Galerkin evolution on the drifted torus to time `t` with steps of at most `dt`.
pub fn evolve_drift(field: &SpectralField, t: f64, dt: f64) -> Result<SpectralField> {
    check_time(t)?;
    let steps = step_count(t, dt)?;
    if steps == 0 {
        return Ok(field.clone());
    }
    let modes = fourier_modes_checked(field)?;
    let stepper = DriftStepper::new(&field.manifold, modes.k1, modes.k2, t / steps as f64)?;
    let mut u = modes.clone();
    for _ in 0..steps {
        u = stepper.step(&u);
    }
    let out = SpectralField {
        coefficients: Coefficients::Fourier(u),
        ..field.clone()
    };
    out.resolve().require_positive()?;
    Ok(out)
}

fn fourier_modes_checked(field: &SpectralField) -> Result<&ModeArray> {
    if !field.manifold.is_drifted() {
        return Err(Error::Unsupported("evolve_drift needs the drifted torus"));
    }
    Ok(fourier_modes(field))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyTrace {
    pub times: Vec<f64>,
    pub entropy: Vec<f64>,
    pub rate_direct: Vec<f64>,
    pub rate_fd: Vec<f64>,
    pub fisher: Vec<f64>,
}

/// Relative step of the five-point stencil on the exact path.
pub const TRACE_FD_RELATIVE_STEP: f64 = 5e-4;

fn five_point(values: [f64; 4], h: f64) -> f64 {
    // values at t - 2h, t - h, t + h, t + 2h
    (values[0] - 8.0 * values[1] + 8.0 * values[2] - values[3]) / (12.0 * h)
}

/// Entropy, `q/2`, and a five-point difference of the entropy at each time.
pub fn entropy_trace(field: &SpectralField, times: &[f64]) -> Result<EntropyTrace> {
    let mut trace = EntropyTrace {
        times: times.to_vec(),
        entropy: Vec::with_capacity(times.len()),
        rate_direct: Vec::with_capacity(times.len()),
        rate_fd: Vec::with_capacity(times.len()),
        fisher: Vec::with_capacity(times.len()),
    };
    for &t in times {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidParameter(format!("trace times must be positive, got {t}")));
        }
        let parts = entropy_parts(&evolve(field, t)?)?;
        let h = TRACE_FD_RELATIVE_STEP * t;
        let mut deficits = [0.0; 4];
        for (slot, offset) in deficits.iter_mut().zip([-2.0, -1.0, 1.0, 2.0]) {
            *slot = entropy_parts(&evolve(field, t + offset * h)?)?.deficit;
        }
        trace.entropy.push(parts.entropy);
        trace.fisher.push(parts.fisher);
        trace.rate_direct.push(0.5 * parts.fisher);
        trace.rate_fd.push(-five_point(deficits, h));
    }
    Ok(trace)
}

/// Time-stepped trace on the drifted torus, recorded at `i * record_every * dt`
/// for `i = 1..=count`; the difference uses the neighbouring steps.
#[allow(clippy::needless_range_loop)]
pub fn drift_entropy_trace(
    field: &SpectralField,
    dt: f64,
    record_every: usize,
    count: usize,
) -> Result<EntropyTrace> {
    let modes = fourier_modes_checked(field)?;
    if record_every < 2 || count == 0 {
        return Err(Error::InvalidParameter(
            "record_every must be at least 2 and count positive".into(),
        ));
    }
    step_count(1.0, dt)?;
    let stepper = DriftStepper::new(&field.manifold, modes.k1, modes.k2, dt)?;
    let last = count * record_every + 2;
    let mut deficits = vec![f64::NAN; last + 1];
    let mut trace = EntropyTrace {
        times: Vec::with_capacity(count),
        entropy: Vec::with_capacity(count),
        rate_direct: Vec::with_capacity(count),
        rate_fd: Vec::with_capacity(count),
        fisher: Vec::with_capacity(count),
    };
    let mut u = modes.clone();
    for s in 1..=last {
        u = stepper.step(&u);
        let offset = s % record_every;
        let near = s >= record_every - 2 && (offset <= 2 || offset >= record_every - 2);
        if !near {
            continue;
        }
        let state = SpectralField {
            coefficients: Coefficients::Fourier(u.clone()),
            ..field.clone()
        };
        let parts = entropy_parts(&state)?;
        deficits[s] = parts.deficit;
        if offset == 0 && s <= count * record_every {
            trace.times.push(s as f64 * dt);
            trace.entropy.push(parts.entropy);
            trace.fisher.push(parts.fisher);
            trace.rate_direct.push(0.5 * parts.fisher);
        }
    }
    for i in 1..=count {
        let s = i * record_every;
        let d = [deficits[s - 2], deficits[s - 1], deficits[s + 1], deficits[s + 2]];
        trace.rate_fd.push(-five_point(d, dt));
    }
    Ok(trace)
}

/// `((int u Lap log u)^2, int u |Lap log u|^2, int u Lap log u + q)` for an
/// undrifted density; the first two are the sides of the Cauchy step and the
/// last vanishes by integration by parts.
pub fn cauchy_terms(field: &SpectralField) -> Result<(f64, f64, f64)> {
    if field.manifold.is_drifted() {
        return Err(Error::Unsupported("Cauchy step is stated for the Laplacian"));
    }
    let r = field.resolve();
    r.require_positive()?;
    let lap_log = |i: usize| r.laplacian[i] / r.u[i] - r.grad_sq[i] / (r.u[i] * r.u[i]);
    let first = r.integrate(|i| r.u[i] * lap_log(i));
    let second = r.integrate(|i| r.u[i] * lap_log(i).powi(2));
    let q = r.integrate(|i| r.grad_sq[i] / r.u[i]);
    Ok((first * first, second, first + q))
}
