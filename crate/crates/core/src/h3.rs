//! Heat kernel entropy on three-dimensional hyperbolic space.
//!
//! With sectional curvature `-kappa^2` the heat kernel of `(1/2) Lap` depends
//! only on the geodesic distance `d`:
//!
//! ```text
//! h(t, d) = (2 pi t)^{-3/2} exp(-d^2 / 2t) (kappa d / sinh(kappa d)) exp(-kappa^2 t / 2)
//! ```
//!
//! and, in polar coordinates, `dV = 4 pi sinh^2(kappa r) / kappa^2 dr`. The
//! entropy splits as
//!
//! ```text
//! Ent(t) = (3/2) log(2 pi t) + kappa^2 t / 2 + I1(t) + I2(t)
//! I1(t)  = (kappa^2 t + 3) / 2
//! I2(t)  = xi(t) eta(t)
//! xi(t)  = sqrt(2/pi) / (kappa t^{3/2}) exp(-kappa^2 t / 2)
//! eta(t) = int_0^inf exp(-r^2 / 2t) r sinh(kappa r) log(sinh(kappa r) / (kappa r)) dr
//! ```
//!
//! `xi` and `eta` carry the reciprocal factors `exp(-+kappa^2 t / 2)`; both are
//! kept as [`ExpScaled`] so the products that make up `I2` and its derivative
//! never form the exponentials explicitly.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate_semi_infinite, integrate_shifted_gaussian, QuadratureSpec};
use crate::scaled::ExpScaled;
use crate::specfun::{alpha, log_sinh, log_sinh_ratio, SQRT_HALF_PI};

const SQRT_TWO_OVER_PI: f64 = 0.797_884_560_802_865_4;

/// Relative step of the central differences used as cross-checks.
pub const FD_RELATIVE_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H3Params {
    kappa: f64,
    pub quadrature: QuadratureSpec,
}

/// A closed-form lower/upper pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Envelope {
    pub lower: ExpScaled,
    pub upper: ExpScaled,
}

impl Envelope {
    pub fn strictly_contains(&self, x: ExpScaled) -> bool {
        self.lower.lt(x) && x.lt(self.upper)
    }

    /// Shrink both ends toward each other by `fraction` of the width.
    pub fn narrowed(&self, fraction: f64) -> Envelope {
        let width = self.upper - self.lower;
        Envelope {
            lower: self.lower + width.scale(0.5 * fraction),
            upper: self.upper - width.scale(0.5 * fraction),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct H3EntropyRecord {
    pub t: f64,
    pub entropy: f64,
    pub i1: f64,
    pub i2: f64,
    pub rate_direct: f64,
    pub rate_fd: f64,
    pub eta: ExpScaled,
    pub eta_envelope: Envelope,
    pub eta_prime: ExpScaled,
    pub eta_prime_envelope: Envelope,
    pub band_lo: f64,
    pub band_hi: f64,
}

impl H3EntropyRecord {
    pub fn envelopes_hold(&self) -> bool {
        self.eta_envelope.strictly_contains(self.eta)
            && self.eta_prime_envelope.strictly_contains(self.eta_prime)
    }

    /// Rate inside the asymptotic band widened by `slack` (absolute).
    pub fn rate_in_band(&self, slack: f64) -> bool {
        self.rate_direct >= self.band_lo - slack && self.rate_direct <= self.band_hi + slack
    }
}

impl H3Params {
    pub fn new(kappa: f64, quadrature: QuadratureSpec) -> Result<Self> {
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "kappa must be positive and finite, got {kappa}"
            )));
        }
        quadrature.validate()?;
        Ok(H3Params { kappa, quadrature })
    }

    pub fn with_kappa(kappa: f64) -> Result<Self> {
        H3Params::new(kappa, QuadratureSpec::default())
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    /// `k = -kappa^2`.
    pub fn sectional_curvature(&self) -> f64 {
        -self.kappa * self.kappa
    }

    /// Lower Ricci bound `-2 kappa^2` of the three-dimensional space form.
    pub fn ricci_lower_bound(&self) -> f64 {
        2.0 * self.sectional_curvature()
    }

    fn check_time(t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "time must be positive and finite, got {t}"
            )))
        }
    }

    pub fn log_heat_kernel(&self, t: f64, d: f64) -> f64 {
        let k = self.kappa;
        -1.5 * (2.0 * PI * t).ln() - d * d / (2.0 * t) - log_sinh_ratio(k * d) - 0.5 * k * k * t
    }

    pub fn heat_kernel(&self, t: f64, d: f64) -> f64 {
        self.log_heat_kernel(t, d).exp()
    }

    /// `log(4 pi sinh^2(kappa r) / kappa^2)`, the polar volume density.
    pub fn log_volume_density(&self, r: f64) -> f64 {
        if r == 0.0 {
            return f64::NEG_INFINITY;
        }
        (4.0 * PI).ln() + 2.0 * log_sinh(self.kappa * r) - 2.0 * self.kappa.ln()
    }

    /// `int h(t, x, y) dV(y)`; equals one by stochastic completeness.
    pub fn total_mass(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        integrate_semi_infinite(
            |r| (self.log_heat_kernel(t, r) + self.log_volume_density(r)).exp(),
            &self.quadrature,
        )?
        .into_value()
    }

    /// `I1(t) = (kappa^2 t + 3) / 2`.
    pub fn i1(&self, t: f64) -> f64 {
        0.5 * (self.kappa * self.kappa * t + 3.0)
    }

    /// `I1` by quadrature of `(1/2t) int h d^2 dV`.
    pub fn i1_quadrature(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let second_moment = integrate_semi_infinite(
            |r| r * r * (self.log_heat_kernel(t, r) + self.log_volume_density(r)).exp(),
            &self.quadrature,
        )?
        .into_value()?;
        Ok(second_moment / (2.0 * t))
    }

    pub fn xi(&self, t: f64) -> ExpScaled {
        let k = self.kappa;
        ExpScaled::new(SQRT_TWO_OVER_PI / (k * t * t.sqrt()), -0.5 * k * k * t)
    }

    /// `xi'(t) = -(kappa^2 t + 3) / (2t) * xi(t)`, always negative.
    pub fn xi_prime(&self, t: f64) -> ExpScaled {
        let k2t = self.kappa * self.kappa * t;
        self.xi(t).scale(-(k2t + 3.0) / (2.0 * t))
    }

    /// `int_0^inf exp(-r^2/2t) r^power sinh(kappa r) log(sinh(kappa r)/(kappa r)) dr`
    /// via the shifted-Gaussian substitution `r = kappa t + s sqrt t`.
    fn log_sinh_moment(&self, t: f64, power: i32) -> Result<ExpScaled> {
        Self::check_time(t)?;
        let k = self.kappa;
        let sqrt_t = t.sqrt();
        let center = k * t;
        let result = integrate_shifted_gaussian(
            |s| {
                let r = center + s * sqrt_t;
                let kr = k * r;
                0.5 * (-0.5 * s * s).exp()
                    * (-(-2.0 * kr).exp_m1())
                    * r.powi(power)
                    * log_sinh_ratio(kr)
                    * sqrt_t
            },
            center,
            sqrt_t,
            &self.quadrature,
        )?;
        Ok(ExpScaled::new(result.into_value()?, 0.5 * k * k * t))
    }

    pub fn eta(&self, t: f64) -> Result<ExpScaled> {
        self.log_sinh_moment(t, 1)
    }

    /// `eta` by direct quadrature in `r` (no substitution), with the Gaussian
    /// and `sinh` combined in the exponent. The result overflows once
    /// `kappa^2 t` passes about 1400; kept as an independent check.
    pub fn eta_direct(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let k = self.kappa;
        integrate_semi_infinite(
            |r| {
                if r == 0.0 {
                    return 0.0;
                }
                (log_sinh(k * r) - r * r / (2.0 * t)).exp() * r * log_sinh_ratio(k * r)
            },
            &self.quadrature,
        )?
        .into_value()
    }

    /// `eta'(t) = (1/2t^2) int exp(-r^2/2t) r^3 sinh(kappa r) log(sinh(kappa r)/(kappa r)) dr`.
    pub fn eta_prime(&self, t: f64) -> Result<ExpScaled> {
        Ok(self.log_sinh_moment(t, 3)?.scale(1.0 / (2.0 * t * t)))
    }

    /// Closed-form bounds on `eta` obtained from `1/(1+2x) < (1-e^{-2x})/2x < 1/(1+x)`
    /// and Jensen's inequality.
    pub fn eta_envelope(&self, t: f64) -> Envelope {
        let k = self.kappa;
        let k2t = k * k * t;
        let half = 0.5 * k2t;
        let decay = (-half).exp();
        let al = alpha(k, t);
        let t32 = t * t.sqrt();
        let main = k * k * t * t * decay + k * t32 * (k2t + 1.0) * al;
        let log_weight = SQRT_HALF_PI * k * t32;
        let lower = main - log_weight * (2.0 * k2t + 4.0).ln();
        let upper = main - log_weight * (SQRT_HALF_PI * k2t / al).ln_1p();
        Envelope {
            lower: ExpScaled::new(lower, half),
            upper: ExpScaled::new(upper, half),
        }
    }

    /// Closed-form bounds on `eta'`.
    pub fn eta_prime_envelope(&self, t: f64) -> Envelope {
        let k = self.kappa;
        let k2t = k * k * t;
        let half = 0.5 * k2t;
        let decay = (-half).exp();
        let al = alpha(k, t);
        let sqrt_t = t.sqrt();
        let quartic = k2t * k2t + 6.0 * k2t + 3.0;
        let main = 0.5 * k2t * (k2t + 5.0) * decay + 0.5 * k * sqrt_t * quartic * al;
        let log_weight = 0.5 * SQRT_HALF_PI * k * sqrt_t * (k2t + 3.0);
        let lower_arg = 2.0 * k * SQRT_TWO_OVER_PI * sqrt_t * (k2t + 5.0) / (k2t + 3.0) * decay
            + 2.0 * SQRT_TWO_OVER_PI * quartic / (k2t + 3.0) * al;
        let upper_arg =
            SQRT_HALF_PI * k2t * (k2t + 3.0) / (k * sqrt_t * decay + (k2t + 1.0) * al);
        Envelope {
            lower: ExpScaled::new(main - log_weight * lower_arg.ln_1p(), half),
            upper: ExpScaled::new(main - log_weight * upper_arg.ln_1p(), half),
        }
    }

    pub fn i2(&self, t: f64) -> Result<f64> {
        Ok((self.xi(t) * self.eta(t)?).value())
    }

    pub fn entropy(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let k2t = self.kappa * self.kappa * t;
        Ok(1.5 * (2.0 * PI * t).ln() + 0.5 * k2t + self.i1(t) + self.i2(t)?)
    }

    /// `-int h log h dV` by direct radial quadrature, independent of the
    /// `I1 + I2` decomposition.
    pub fn entropy_direct(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        integrate_semi_infinite(
            |r| {
                let log_h = self.log_heat_kernel(t, r);
                let weight = (log_h + self.log_volume_density(r)).exp();
                if weight == 0.0 {
                    0.0
                } else {
                    -weight * log_h
                }
            },
            &self.quadrature,
        )?
        .into_value()
    }

    /// `d/dt Ent = 3/(2t) + kappa^2 + xi' eta + xi eta'`.
    pub fn entropy_rate(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let d_xi_eta = self.xi_prime(t) * self.eta(t)? + self.xi(t) * self.eta_prime(t)?;
        Ok(1.5 / t + self.kappa * self.kappa + d_xi_eta.value())
    }

    /// Central difference of [`H3Params::entropy`] with step `1e-4 t`.
    pub fn entropy_rate_fd(&self, t: f64) -> Result<f64> {
        Self::check_time(t)?;
        let h = FD_RELATIVE_STEP * t;
        Ok((self.entropy(t + h)? - self.entropy(t - h)?) / (2.0 * h))
    }

    /// Bounds on `d/dt (xi eta)` from the envelopes of `eta` and `eta'`
    /// (`xi' < 0` swaps the `eta` ends).
    pub fn xi_eta_rate_bracket(&self, t: f64) -> (f64, f64) {
        let xi = self.xi(t);
        let xi_p = self.xi_prime(t);
        let eta = self.eta_envelope(t);
        let eta_p = self.eta_prime_envelope(t);
        let lower = xi_p * eta.upper + xi * eta_p.lower;
        let upper = xi_p * eta.lower + xi * eta_p.upper;
        (lower.value(), upper.value())
    }

    /// `(kappa^2 (2 - log sqrt 2), kappa^2 (2 + log sqrt 2))`.
    pub fn asymptotic_band(&self) -> (f64, f64) {
        let k2 = self.kappa * self.kappa;
        let half_log2 = 0.5 * std::f64::consts::LN_2;
        (k2 * (2.0 - half_log2), k2 * (2.0 + half_log2))
    }

    pub fn record(&self, t: f64) -> Result<H3EntropyRecord> {
        Self::check_time(t)?;
        let eta = self.eta(t)?;
        let eta_prime = self.eta_prime(t)?;
        let xi = self.xi(t);
        let i2 = (xi * eta).value();
        let k2 = self.kappa * self.kappa;
        let entropy = 1.5 * (2.0 * PI * t).ln() + 0.5 * k2 * t + self.i1(t) + i2;
        let rate_direct = 1.5 / t + k2 + (self.xi_prime(t) * eta + xi * eta_prime).value();
        let (band_lo, band_hi) = self.asymptotic_band();
        Ok(H3EntropyRecord {
            t,
            entropy,
            i1: self.i1(t),
            i2,
            rate_direct,
            rate_fd: self.entropy_rate_fd(t)?,
            eta,
            eta_envelope: self.eta_envelope(t),
            eta_prime,
            eta_prime_envelope: self.eta_prime_envelope(t),
            band_lo,
            band_hi,
        })
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::needless_range_loop)]
mod tests {
    use super::*;

    // 30-digit reference values (adaptive mpmath quadrature of the raw integrals)
    const ETA_K1_T1: f64 = 1.17606571326688193050;
    const ETAP_K1_T1: f64 = 3.64801321888349778527;
    const ENT_K1_T1: f64 = 5.82596254505663926517;
    const RATE_K1_T1: f64 = 3.12713091237206238697;
    const ETA_K05_T10: f64 = 110.685027433288883683;
    const ETAP_K05_T10: f64 = 43.1821516381047941618;
    const RATE_K1_T10: f64 = 2.05595894208120135980;

    fn p(kappa: f64) -> H3Params {
        H3Params::with_kappa(kappa).unwrap()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn kernel_at_origin() {
        let h = p(1.0).heat_kernel(1.0, 0.0);
        let expected = (2.0 * PI).powf(-1.5) * (-0.5f64).exp();
        assert!(rel(h, expected) < 1e-15);
        assert!((h - 0.0385108).abs() < 1e-7);
    }

    #[test]
    fn kernel_flat_limit() {
        let flat = p(1e-9);
        for d in [0.0f64, 0.5, 2.0] {
            let gauss = (2.0 * PI).powf(-1.5) * (-d * d / 2.0).exp();
            assert!(rel(flat.heat_kernel(1.0, d), gauss) < 1e-12);
        }
    }

    #[test]
    fn kernel_is_normalized() {
        assert!((p(1.0).total_mass(1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((p(2.0).total_mass(50.0).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_parameters() {
        assert!(H3Params::with_kappa(0.0).is_err());
        assert!(H3Params::with_kappa(-1.0).is_err());
        assert!(p(1.0).entropy(0.0).is_err());
        assert!(p(1.0).eta(-1.0).is_err());
    }

    #[test]
    fn i1_closed_form_and_quadrature() {
        assert_eq!(p(1.0).i1(1.0), 2.0);
        assert_eq!(p(2.0).i1(0.25), 2.0);
        for (k, t) in [(0.5, 0.1), (1.0, 1.0), (2.0, 10.0)] {
            assert!(rel(p(k).i1_quadrature(t).unwrap(), p(k).i1(t)) < 1e-9);
        }
    }

    #[test]
    fn xi_values() {
        let x = p(1.0).xi(1.0).value();
        assert!(rel(x, SQRT_TWO_OVER_PI * (-0.5f64).exp()) < 1e-15);
        assert!((x - 0.4839414).abs() < 1e-7);
        for t in [0.01, 0.5, 1.0, 5.0, 500.0] {
            assert!(p(1.0).xi_prime(t).mantissa < 0.0);
        }
    }

    #[test]
    fn xi_prime_matches_central_difference() {
        let q = p(1.0);
        for t in [0.5, 1.0, 5.0] {
            let h = 1e-4 * t;
            let fd = (q.xi(t + h).value() - q.xi(t - h).value()) / (2.0 * h);
            assert!(rel(fd, q.xi_prime(t).value()) < 1e-6);
        }
    }

    #[test]
    fn eta_matches_reference() {
        assert!(rel(p(1.0).eta(1.0).unwrap().value(), ETA_K1_T1) < 1e-9);
        assert!(rel(p(1.0).eta_prime(1.0).unwrap().value(), ETAP_K1_T1) < 1e-9);
        assert!(rel(p(0.5).eta(10.0).unwrap().value(), ETA_K05_T10) < 1e-9);
        assert!(rel(p(0.5).eta_prime(10.0).unwrap().value(), ETAP_K05_T10) < 1e-9);
    }

    #[test]
    fn shifted_and_direct_eta_agree() {
        for (k, t) in [(1.0, 1.0), (1.0, 10.0), (2.0, 0.1), (0.5, 3.0)] {
            let shifted = p(k).eta(t).unwrap().value();
            let direct = p(k).eta_direct(t).unwrap();
            assert!(rel(shifted, direct) < 1e-8, "k={k} t={t}");
        }
    }

    #[test]
    fn eta_large_time_stays_finite() {
        let e = p(1.0).eta(100.0).unwrap();
        assert_eq!(e.log_scale, 50.0);
        assert!(e.mantissa.is_finite() && e.mantissa > 0.0);
        let e = p(2.0).eta(1000.0).unwrap();
        assert!(e.mantissa.is_finite() && e.value().is_infinite());
    }

    #[test]
    fn envelopes_contain_quadrature_values() {
        let q = p(1.0);
        for t in [0.1, 1.0, 2.0, 10.0, 100.0] {
            let env = q.eta_envelope(t);
            assert!(env.lower.lt(env.upper));
            assert!(env.strictly_contains(q.eta(t).unwrap()), "eta at t={t}");
            let envp = q.eta_prime_envelope(t);
            assert!(envp.strictly_contains(q.eta_prime(t).unwrap()), "eta' at t={t}");
        }
        let q = p(0.5);
        assert!(q.eta_prime_envelope(10.0).strictly_contains(q.eta_prime(10.0).unwrap()));
    }

    #[test]
    fn eta_envelope_gap_tends_to_log2() {
        // xi (upper - lower) = log((2 k^2 t + 4) / (1 + sqrt(pi/2) k^2 t / alpha)) -> log 2
        for k in [0.5, 1.0, 2.0] {
            let q = p(k);
            for t in [50.0 / (k * k), 100.0 / (k * k), 400.0 / (k * k)] {
                let env = q.eta_envelope(t);
                let gap = (q.xi(t) * (env.upper - env.lower)).value();
                assert!(gap > std::f64::consts::LN_2);
                assert!(gap <= std::f64::consts::LN_2 * 1.05, "gap {gap} at k={k} t={t}");
            }
        }
    }

    #[test]
    fn entropy_matches_reference_and_direct_quadrature() {
        let q = p(1.0);
        let e = q.entropy(1.0).unwrap();
        assert!(rel(e, ENT_K1_T1) < 1e-10);
        let direct = q.entropy_direct(1.0).unwrap();
        assert!(rel(e, direct) < 1e-6);
        for (k, t) in [(0.5, 0.3), (2.0, 2.0)] {
            let q = p(k);
            assert!(rel(q.entropy(t).unwrap(), q.entropy_direct(t).unwrap()) < 1e-6);
        }
    }

    #[test]
    fn entropy_flat_limit_is_gaussian() {
        let e = p(1e-4).entropy(1.0).unwrap();
        let gauss = 1.5 * (2.0 * PI * std::f64::consts::E).ln();
        assert!((e - gauss).abs() < 1e-6);
    }

    #[test]
    fn entropy_increases() {
        let q = p(1.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..30 {
            let t = 0.5 * (100f64).powf(i as f64 / 29.0);
            let e = q.entropy(t).unwrap();
            assert!(e > prev);
            prev = e;
        }
    }

    #[test]
    fn rate_matches_reference_and_difference() {
        let q = p(1.0);
        assert!(rel(q.entropy_rate(1.0).unwrap(), RATE_K1_T1) < 1e-9);
        assert!(rel(q.entropy_rate(10.0).unwrap(), RATE_K1_T10) < 1e-9);
        for t in [1.0, 5.0, 20.0] {
            let direct = q.entropy_rate(t).unwrap();
            let fd = q.entropy_rate_fd(t).unwrap();
            assert!(rel(fd, direct) < 1e-4);
        }
    }

    #[test]
    fn band_examples() {
        let (lo, hi) = p(1.0).asymptotic_band();
        assert!((lo - 1.6534264097200273).abs() < 1e-15);
        assert!((hi - 2.3465735902799727).abs() < 1e-15);
        let (lo2, hi2) = p(2.0).asymptotic_band();
        assert_eq!(lo2, 4.0 * lo);
        assert_eq!(hi2, 4.0 * hi);
        assert!((hi - lo - std::f64::consts::LN_2).abs() < 1e-15);

        let r = p(1.0).entropy_rate(50.0).unwrap();
        assert!((1.603..=2.397).contains(&r));
        let r = p(2.0).entropy_rate(25.0).unwrap();
        assert!((6.414..=9.386).contains(&r));
    }

    #[test]
    fn bracket_contains_rate_and_approaches_band() {
        let q = p(1.0);
        for t in [0.5, 2.0, 20.0, 100.0] {
            let (lo, hi) = q.xi_eta_rate_bracket(t);
            let inner = q.entropy_rate(t).unwrap() - 1.5 / t - 1.0;
            assert!(lo < inner && inner < hi, "t={t}: {lo} {inner} {hi}");
        }
        let (lo, hi) = q.xi_eta_rate_bracket(100.0);
        let half_log2 = 0.5 * std::f64::consts::LN_2;
        assert!((lo - (1.0 - half_log2)).abs() < 0.05, "{lo}");
        assert!((hi - (1.0 + half_log2)).abs() < 0.05, "{hi}");
    }
}
