//! Named verification checks.
//!
//! Each check returns `{pass, max_error, details}`; a report maps check
//! names to outcomes in sorted order so repeated runs serialize identically.

use std::cell::OnceCell;
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds::{
    check_bounds, euclidean_rate_reference, ricci_bound_asymptote, within_slack, BoundReport,
};
use crate::error::{Error, Result};
use crate::h3::H3Params;
use crate::quadrature::{integrate_semi_infinite, QuadratureSpec};
use crate::specfun::{log_sinh_ratio, sinh_ratio_bounds, HyperbolicMoment};
use crate::spectral::bochner::{bochner_residual, trace_inequality_margin};
use crate::spectral::fixtures::{self, log_grid, Fixture};
use crate::spectral::trig::TrigPoly;
use crate::spectral::{cauchy_terms, evolve, evolve_drift, EntropyTrace, ManifoldSpec, SpectralField};

pub const CHECK_NAMES: [&str; 21] = [
    "band",
    "bochner",
    "bound_bakry_emery",
    "bound_hamilton",
    "bound_regimes",
    "bound_ricci",
    "bound_spectral_gap",
    "cauchy_step",
    "entropy_decomposition",
    "entropy_monotone",
    "envelopes",
    "euclidean_limit",
    "log_sinh_sandwich",
    "mass_conservation",
    "moments",
    "normalization",
    "rate_assembly",
    "second_moment",
    "sinh_ratio_ordering",
    "sinh_ratio_sharpness",
    "trace_inequality",
];

const KAPPAS: [f64; 3] = [0.5, 1.0, 2.0];
const MOMENT_TIMES: [f64; 3] = [0.1, 1.0, 10.0];
const IDENTITY_TOL: f64 = 1e-8;
const BAND_SLACK: f64 = 0.05;
const RATE_TOL: f64 = 1e-4;
const EUCLIDEAN_TOL: f64 = 0.01;
const BOCHNER_TOL: f64 = 1e-8;
const BOCHNER_GRID: usize = 128;
const TRACE_INEQUALITY_TOL: f64 = 1e-12;
const FAULT_NARROWING: f64 = 0.1;
const SEED: u64 = 20_240_601;
const QUANTITIES: [&str; 2] = ["eta", "etap"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    pub max_error: f64,
    pub details: Value,
}

impl CheckOutcome {
    fn new(pass: bool, max_error: f64, details: Value) -> Self {
        CheckOutcome {
            pass,
            max_error,
            details,
        }
    }

    fn failed(err: &Error) -> Self {
        CheckOutcome::new(false, f64::INFINITY, json!({ "error": err.to_string() }))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct VerifyOptions {
    pub quadrature: QuadratureSpec,
    /// Narrow the `eta` envelopes by 10% before the containment check.
    pub inject_fault: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VerifyReport {
    pub checks: BTreeMap<String, CheckOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.values().all(|c| c.pass)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.checks
            .iter()
            .filter(|(_, c)| !c.pass)
            .map(|(n, _)| n.as_str())
            .collect()
    }
}

/// Runs every check, or only `only` when given.
pub fn run(options: &VerifyOptions, only: Option<&str>) -> Result<VerifyReport> {
    let names: Vec<&str> = match only {
        Some(name) if CHECK_NAMES.contains(&name) => vec![name],
        Some(name) => {
            return Err(Error::InvalidParameter(format!(
                "unknown check {name:?}; available: {}",
                CHECK_NAMES.join(", ")
            )))
        }
        None => CHECK_NAMES.to_vec(),
    };
    let ctx = Context::new(*options);
    let mut checks = BTreeMap::new();
    for name in names {
        let outcome = ctx.run(name).unwrap_or_else(|e| CheckOutcome::failed(&e));
        checks.insert(name.to_string(), outcome);
    }
    Ok(VerifyReport { checks })
}

struct Context {
    options: VerifyOptions,
    traces: OnceCell<std::result::Result<Vec<(Fixture, EntropyTrace)>, Error>>,
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

impl Context {
    fn new(options: VerifyOptions) -> Self {
        Context {
            options,
            traces: OnceCell::new(),
        }
    }

    fn h3(&self, kappa: f64) -> Result<H3Params> {
        H3Params::new(kappa, self.options.quadrature)
    }

    fn traces(&self) -> Result<&[(Fixture, EntropyTrace)]> {
        let cached = self.traces.get_or_init(|| {
            fixtures::all()?
                .into_iter()
                .map(|f| {
                    let trace = f.trace()?;
                    Ok((f, trace))
                })
                .collect()
        });
        match cached {
            Ok(v) => Ok(v),
            Err(e) => Err(e.clone()),
        }
    }

    fn run(&self, name: &str) -> Result<CheckOutcome> {
        match name {
            "band" => self.band(),
            "bochner" => self.bochner(),
            "bound_bakry_emery" => self.bound("bakry_emery"),
            "bound_hamilton" => self.bound("hamilton"),
            "bound_regimes" => self.bound_regimes(),
            "bound_ricci" => self.bound("ricci"),
            "bound_spectral_gap" => self.bound("spectral_gap"),
            "cauchy_step" => self.cauchy_step(),
            "entropy_decomposition" => self.entropy_decomposition(),
            "entropy_monotone" => self.entropy_monotone(),
            "envelopes" => self.envelopes(),
            "euclidean_limit" => self.euclidean_limit(),
            "log_sinh_sandwich" => Ok(log_sinh_sandwich()),
            "mass_conservation" => self.mass_conservation(),
            "moments" => self.moments(),
            "normalization" => self.normalization(),
            "rate_assembly" => self.rate_assembly(),
            "second_moment" => self.second_moment(),
            "sinh_ratio_ordering" => Ok(sinh_ratio_ordering()),
            "sinh_ratio_sharpness" => Ok(sinh_ratio_sharpness()),
            "trace_inequality" => self.trace_inequality(),
            _ => Err(Error::InvalidParameter(format!("unknown check {name:?}"))),
        }
    }

    /// Nine Gaussian-hyperbolic closed forms against quadrature of the raw integrands.
    fn moments(&self) -> Result<CheckOutcome> {
        let mut worst = (0.0, String::new(), 0.0, 0.0);
        let mut cases = 0;
        for m in HyperbolicMoment::ALL {
            for kappa in KAPPAS {
                for t in MOMENT_TIMES {
                    let q = integrate_semi_infinite(|r| m.integrand(kappa, t, r), &self.options.quadrature)?
                        .into_value()?;
                    let e = rel(m.closed_form(kappa, t).value(), q);
                    cases += 1;
                    if e > worst.0 {
                        worst = (e, m.label(), kappa, t);
                    }
                }
            }
        }
        Ok(CheckOutcome::new(
            worst.0 <= IDENTITY_TOL,
            worst.0,
            json!({ "cases": cases, "worst": { "moment": worst.1, "kappa": worst.2, "t": worst.3 } }),
        ))
    }

    /// `I1 = (kappa^2 t + 3)/2` against quadrature of the second moment.
    fn second_moment(&self) -> Result<CheckOutcome> {
        let mut max_error: f64 = 0.0;
        for kappa in KAPPAS {
            let p = self.h3(kappa)?;
            for t in MOMENT_TIMES {
                max_error = max_error.max(rel(p.i1_quadrature(t)?, p.i1(t)));
            }
        }
        let unit = self.h3(1.0)?;
        let at_unit = unit.i1_quadrature(1.0)?;
        max_error = max_error.max(rel(at_unit, 2.0));
        Ok(CheckOutcome::new(
            max_error <= IDENTITY_TOL && unit.i1(1.0) == 2.0,
            max_error,
            json!({ "i1_at_unit_scale": at_unit }),
        ))
    }

    fn normalization(&self) -> Result<CheckOutcome> {
        let mut max_error: f64 = 0.0;
        for kappa in KAPPAS {
            let p = self.h3(kappa)?;
            for t in [0.1, 1.0, 10.0, 50.0] {
                max_error = max_error.max((p.total_mass(t)? - 1.0).abs());
            }
        }
        Ok(CheckOutcome::new(max_error <= IDENTITY_TOL, max_error, json!({ "cases": 12 })))
    }

    /// Strict containment of `eta` and `eta'` in their envelopes on a 40-point
    /// log grid, `kappa = 1`. `max_error` is the largest relative excursion
    /// outside an envelope.
    fn envelopes(&self) -> Result<CheckOutcome> {
        let p = self.h3(1.0)?;
        let narrow = if self.options.inject_fault { FAULT_NARROWING } else { 0.0 };
        let mut violations = Vec::new();
        let mut min_margin = [f64::INFINITY; 2];
        for t in log_grid(0.1, 100.0, 40) {
            let pairs = [
                (p.eta(t)?, p.eta_envelope(t).narrowed(narrow)),
                (p.eta_prime(t)?, p.eta_prime_envelope(t).narrowed(narrow)),
            ];
            for (i, (value, env)) in pairs.iter().enumerate() {
                let width = env.upper - env.lower;
                let margin = ((*value - env.lower) / width)
                    .value()
                    .min(((env.upper - *value) / width).value());
                min_margin[i] = min_margin[i].min(margin);
                if !env.strictly_contains(*value) {
                    violations.push(json!({ "t": t, "quantity": QUANTITIES[i] }));
                }
            }
        }
        let worst = min_margin[0].min(min_margin[1]);
        Ok(CheckOutcome::new(
            violations.is_empty(),
            (-worst).max(0.0),
            json!({
                "points": 40,
                "narrowed_by": narrow,
                "min_relative_margin_eta": min_margin[0],
                "min_relative_margin_etap": min_margin[1],
                "violations": violations,
            }),
        ))
    }

    /// The large-time rate band `kappa^2 (2 -+ log sqrt 2)`, widened by
    /// `0.05 kappa^2`, and the envelope bracket on `d/dt (xi eta)`.
    fn band(&self) -> Result<CheckOutcome> {
        let mut max_error: f64 = 0.0;
        let mut pass = true;
        let mut rows = Vec::new();
        for (kappa, times) in [(1.0, [20.0, 50.0, 100.0]), (2.0, [5.0, 12.5, 25.0])] {
            let p = self.h3(kappa)?;
            let (lo, hi) = p.asymptotic_band();
            let slack = BAND_SLACK * kappa * kappa;
            for t in times {
                let rate = p.entropy_rate(t)?;
                let outside = (lo - slack - rate).max(rate - hi - slack).max(0.0);
                let (b_lo, b_hi) = p.xi_eta_rate_bracket(t);
                let d_xi_eta = rate - 1.5 / t - kappa * kappa;
                let bracketed = b_lo <= d_xi_eta && d_xi_eta <= b_hi;
                pass &= outside == 0.0 && bracketed;
                max_error = max_error.max(outside);
                rows.push(json!({
                    "kappa": kappa, "t": t, "rate": rate,
                    "band": [lo - slack, hi + slack], "bracket_holds": bracketed,
                }));
            }
        }
        Ok(CheckOutcome::new(pass, max_error, json!({ "cases": rows })))
    }

    /// `|rate_direct - rate_fd| / rate` on the H3 grid and every fixture trace.
    fn rate_assembly(&self) -> Result<CheckOutcome> {
        let mut per_source = BTreeMap::new();
        let p = self.h3(1.0)?;
        let mut h3_err: f64 = 0.0;
        for t in log_grid(0.1, 100.0, 40) {
            h3_err = h3_err.max(rel(p.entropy_rate_fd(t)?, p.entropy_rate(t)?));
        }
        per_source.insert("h3".to_string(), h3_err);
        for (f, tr) in self.traces()? {
            let e = max_of(tr.rate_direct.iter().zip(&tr.rate_fd).map(|(&d, &fd)| rel(fd, d)));
            per_source.insert(f.name.to_string(), e);
        }
        let max_error = max_of(per_source.values().copied());
        Ok(CheckOutcome::new(max_error <= RATE_TOL, max_error, json!(per_source)))
    }

    fn euclidean_limit(&self) -> Result<CheckOutcome> {
        let rate = self.h3(0.01)?.entropy_rate(1.0)?;
        let reference = euclidean_rate_reference(3, 1.0);
        let e = rel(rate, reference);
        Ok(CheckOutcome::new(
            e <= EUCLIDEAN_TOL,
            e,
            json!({ "kappa": 0.01, "t": 1.0, "rate": rate, "reference": reference }),
        ))
    }

    /// `-int h log h` from `I1 + I2` against direct radial quadrature.
    fn entropy_decomposition(&self) -> Result<CheckOutcome> {
        let mut max_error: f64 = 0.0;
        for kappa in KAPPAS {
            let p = self.h3(kappa)?;
            for t in MOMENT_TIMES {
                max_error = max_error.max(rel(p.entropy(t)?, p.entropy_direct(t)?));
            }
        }
        Ok(CheckOutcome::new(max_error <= IDENTITY_TOL, max_error, json!({ "cases": 9 })))
    }

    /// Residual of the drifted Bochner identity for random `w` and `V`, the
    /// first case with `V = 0`, plus two fixed cases.
    fn bochner(&self) -> Result<CheckOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let mut cases: Vec<(ManifoldSpec, TrigPoly)> = Vec::new();
        for i in 0..10 {
            let w = TrigPoly::random_positive(&mut rng, 1.0, 1.0, 2, 0.2, 0.3);
            let m = if i == 0 {
                ManifoldSpec::torus2(1.0, 1.0)?
            } else {
                ManifoldSpec::torus2_drift(1.0, 1.0, TrigPoly::random_zero_mean(&mut rng, 1.0, 1.0, 2, 0.1))?
            };
            cases.push((m, w));
        }
        cases.push((
            ManifoldSpec::torus2(1.0, 1.0)?,
            TrigPoly::constant(1.0, 1.0, 2.0)
                .with_term(1, 1, 0.5, 0.0)
                .with_term(1, -1, 0.5, 0.0),
        ));
        cases.push((
            ManifoldSpec::torus2_drift(1.0, 1.0, TrigPoly::constant(1.0, 1.0, 0.0).with_term(0, 1, 0.0, 0.3))?,
            TrigPoly::constant(1.0, 1.0, 2.0).with_term(1, 0, 1.0, 0.0),
        ));
        let mut residuals = Vec::new();
        for (m, w) in &cases {
            let field = SpectralField::from_trig(m, w, 2)?;
            residuals.push(bochner_residual(m, &field, BOCHNER_GRID)?.relative());
        }
        let max_error = max_of(residuals.iter().copied());
        Ok(CheckOutcome::new(
            max_error <= BOCHNER_TOL,
            max_error,
            json!({ "cases": cases.len(), "grid": BOCHNER_GRID, "relative_residuals": residuals }),
        ))
    }

    /// Pointwise trace inequality for random positive polynomials.
    fn trace_inequality(&self) -> Result<CheckOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
        let m = ManifoldSpec::torus2(1.0, 1.0)?;
        let mut min_margin = f64::INFINITY;
        for i in 0..10 {
            let degree = 1 + i % 3;
            let w = TrigPoly::random_positive(&mut rng, 1.0, 1.0, degree, 0.2, 0.2);
            let field = SpectralField::from_trig(&m, &w, degree as usize)?;
            min_margin = min_margin.min(trace_inequality_margin(&m, &field, 64)?);
        }
        Ok(CheckOutcome::new(
            min_margin >= -TRACE_INEQUALITY_TOL,
            (-min_margin).max(0.0),
            json!({ "cases": 10, "min_relative_margin": min_margin }),
        ))
    }

    /// Cauchy step and the integration-by-parts identity on evolved fixtures.
    fn cauchy_step(&self) -> Result<CheckOutcome> {
        let mut violations = 0;
        let mut worst_ratio: f64 = 0.0;
        let mut worst_ibp: f64 = 0.0;
        for f in [fixtures::circle()?, fixtures::torus()?, fixtures::sphere()?] {
            for t in log_grid(0.01, 2.0, 8) {
                let (lhs, rhs, ibp) = cauchy_terms(&evolve(&f.field, t)?)?;
                if lhs > rhs * (1.0 + 1e-12) {
                    violations += 1;
                }
                worst_ratio = worst_ratio.max(lhs / rhs);
                // |int u Lap log u| <= sqrt(rhs) for a probability density, so
                // sqrt(rhs) scales the integration-by-parts residual
                worst_ibp = worst_ibp.max(ibp.abs() / rhs.sqrt());
            }
        }
        let ibp_ok = worst_ibp <= 1e-10;
        Ok(CheckOutcome::new(
            violations == 0 && ibp_ok,
            worst_ibp,
            json!({ "violations": violations, "max_lhs_over_rhs": worst_ratio, "max_relative_ibp_error": worst_ibp }),
        ))
    }

    fn mass_conservation(&self) -> Result<CheckOutcome> {
        let mut per_fixture = BTreeMap::new();
        let mut pass = true;
        for f in fixtures::all()? {
            let e = if f.field.manifold.is_drifted() {
                let e = (evolve_drift(&f.field, 1.0, 1e-3)?.mass() - 1.0).abs();
                pass &= e <= 1e-8;
                e
            } else {
                let e = max_of(
                    [0.01, 0.1, 1.0, 10.0]
                        .iter()
                        .map(|&t| evolve(&f.field, t).map(|u| (u.mass() - 1.0).abs()))
                        .collect::<Result<Vec<_>>>()?,
                );
                pass &= e <= 1e-12;
                e
            };
            per_fixture.insert(f.name.to_string(), e);
        }
        let max_error = max_of(per_fixture.values().copied());
        Ok(CheckOutcome::new(pass, max_error, json!(per_fixture)))
    }

    /// Entropy non-decreasing and rates non-negative along every trace.
    fn entropy_monotone(&self) -> Result<CheckOutcome> {
        let mut max_error: f64 = 0.0;
        let mut details = BTreeMap::new();
        for (f, tr) in self.traces()? {
            let drop = max_of(tr.entropy.windows(2).map(|w| w[0] - w[1]));
            let negative = max_of(tr.rate_direct.iter().map(|r| -r));
            max_error = max_error.max(drop).max(negative);
            details.insert(f.name, json!({ "max_entropy_drop": drop, "max_negative_rate": negative }));
        }
        Ok(CheckOutcome::new(max_error == 0.0, max_error, json!(details)))
    }

    fn bound(&self, bound_name: &str) -> Result<CheckOutcome> {
        let mut details = BTreeMap::new();
        let mut max_error: f64 = 0.0;
        let mut pass = true;
        for (f, tr) in self.traces()? {
            let reports = check_bounds(tr, &f.field.manifold, &f.field)?;
            if let Some(r) = reports.iter().find(|r| r.bound_name == bound_name) {
                let excess = max_of(r.lhs.iter().zip(&r.rhs).map(|(l, r)| l - r));
                pass &= r.all_satisfied();
                max_error = max_error.max(excess);
                details.insert(
                    f.name,
                    json!({ "points": r.times.len(), "min_margin": r.min_margin, "all_satisfied": r.all_satisfied() }),
                );
            }
        }
        if details.is_empty() {
            return Err(Error::InvalidParameter(format!("no fixture exercises {bound_name}")));
        }
        Ok(CheckOutcome::new(pass, max_error, json!(details)))
    }

    /// The three curvature regimes: `k < 0` through the hyperbolic rate
    /// against `-nk/2`, `k = 0` on the circle against `n/(2t)`, and `k > 0`
    /// on the sphere where the curvature bound beats the gradient bound at
    /// the final time.
    fn bound_regimes(&self) -> Result<CheckOutcome> {
        let p = self.h3(1.0)?;
        let asymptote = ricci_bound_asymptote(3, p.ricci_lower_bound());
        let mut negative_ok = true;
        let mut h3_rates = Vec::new();
        for t in [20.0, 50.0, 100.0] {
            let rate = p.entropy_rate(t)?;
            negative_ok &= within_slack(rate, asymptote);
            h3_rates.push(rate);
        }

        let traces = self.traces()?;
        let find = |name: &str| -> Result<(&Fixture, &EntropyTrace, Vec<BoundReport>)> {
            let (f, tr) = traces
                .iter()
                .find(|(f, _)| f.name == name)
                .ok_or_else(|| Error::InvalidParameter(format!("missing fixture {name}")))?;
            Ok((f, tr, check_bounds(tr, &f.field.manifold, &f.field)?))
        };
        let rhs = |reports: &[BoundReport], name: &str| -> Vec<f64> {
            reports
                .iter()
                .find(|r| r.bound_name == name)
                .map(|r| r.rhs.clone())
                .unwrap_or_default()
        };

        let (circle, circle_trace, circle_reports) = find("circle")?;
        let n = circle.field.manifold.dimension;
        let flat_ok = rhs(&circle_reports, "ricci")
            .iter()
            .zip(&circle_trace.times)
            .all(|(&r, &t)| r <= euclidean_rate_reference(n, t));

        let (_, sphere_trace, sphere_reports) = find("sphere")?;
        let last = sphere_trace.times.len() - 1;
        let ricci_last = rhs(&sphere_reports, "ricci")[last];
        let hamilton_last = rhs(&sphere_reports, "hamilton")[last];
        let positive_ok = ricci_last < hamilton_last;

        Ok(CheckOutcome::new(
            negative_ok && flat_ok && positive_ok,
            0.0,
            json!({
                "negative": { "h3_rates": h3_rates, "asymptote": asymptote, "holds": negative_ok },
                "flat": { "below_euclidean": flat_ok },
                "positive": {
                    "t": sphere_trace.times[last],
                    "ricci_rhs": ricci_last,
                    "hamilton_rhs": hamilton_last,
                    "holds": positive_ok,
                },
            }),
        ))
    }
}

/// `1/(1+2r) < (1 - e^{-2r})/(2r) < 1/(1+r)` on a log grid of `[1e-6, 1e3]`.
fn sinh_ratio_ordering() -> CheckOutcome {
    let mut violations = 0;
    let mut max_error: f64 = 0.0;
    for r in log_grid(1e-6, 1e3, 400) {
        let (lo, mid, hi) = sinh_ratio_bounds(r);
        if !(lo < mid && mid < hi) {
            violations += 1;
        }
        max_error = max_error.max(lo - mid).max(mid - hi);
    }
    CheckOutcome::new(violations == 0, max_error.max(0.0), json!({ "points": 400, "violations": violations }))
}

/// For `beta` in `(1, 2)`, `(1 - e^{-2r})/(2r) > 1/(1+beta r)` below
/// `(beta - 1)/beta`, and the inequality reverses somewhere on the grid.
fn sinh_ratio_sharpness() -> CheckOutcome {
    let grid = log_grid(1e-6, 1e3, 400);
    let mut pass = true;
    let mut rows = Vec::new();
    for beta in [1.25, 1.5, 1.75] {
        let threshold = (beta - 1.0) / beta;
        let mut below_violations = 0;
        let mut first_reversal = None;
        for &r in &grid {
            let (_, mid, _) = sinh_ratio_bounds(r);
            let other = 1.0 / (1.0 + beta * r);
            if r < threshold && mid <= other {
                below_violations += 1;
            }
            if mid < other && first_reversal.is_none() {
                first_reversal = Some(r);
            }
        }
        pass &= below_violations == 0 && first_reversal.is_some();
        rows.push(json!({ "beta": beta, "violations_below_threshold": below_violations, "first_reversal": first_reversal }));
    }
    CheckOutcome::new(pass, 0.0, json!({ "cases": rows }))
}

/// `x - log(1 + 2x) < log(sinh x / x) < x - log(1 + x)` with `x = kappa r`.
fn log_sinh_sandwich() -> CheckOutcome {
    let mut violations = 0;
    let mut points = 0;
    for kappa in KAPPAS {
        for r in log_grid(1e-6, 1e3, 200) {
            let x = kappa * r;
            let v = log_sinh_ratio(x);
            if !(x - (2.0 * x).ln_1p() < v && v < x - x.ln_1p()) {
                violations += 1;
            }
            points += 1;
        }
    }
    CheckOutcome::new(violations == 0, 0.0, json!({ "points": points, "violations": violations }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_sorted_and_dispatch() {
        assert!(CHECK_NAMES.windows(2).all(|w| w[0] < w[1]));
        assert!(run(&VerifyOptions::default(), Some("no_such_check")).is_err());
    }

    #[test]
    fn pure_checks_pass() {
        assert!(sinh_ratio_ordering().pass);
        assert!(sinh_ratio_sharpness().pass);
        assert!(log_sinh_sandwich().pass);
    }

    #[test]
    fn fault_injection_fails_envelopes() {
        let opts = VerifyOptions {
            inject_fault: true,
            ..VerifyOptions::default()
        };
        let report = run(&opts, Some("envelopes")).unwrap();
        assert_eq!(report.failing(), vec!["envelopes"]);
        let clean = run(&VerifyOptions::default(), Some("envelopes")).unwrap();
        assert!(clean.all_passed());
    }

    #[test]
    fn single_group_report_shape() {
        let report = run(&VerifyOptions::default(), Some("moments")).unwrap();
        assert_eq!(report.checks.len(), 1);
        let v = serde_json::to_value(&report).unwrap();
        assert!(v["moments"]["pass"].as_bool().unwrap());
        assert!(v["moments"]["max_error"].as_f64().unwrap() <= 1e-8);
    }
}
