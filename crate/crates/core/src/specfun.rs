//! Special functions and the closed-form Gaussian-hyperbolic moments.

use std::f64::consts::{FRAC_2_SQRT_PI, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scaled::ExpScaled;

/// `sqrt(pi / 2)`, the half-line Gaussian mass.
pub const SQRT_HALF_PI: f64 = 1.253_314_137_315_500_3;

/// Below this argument `log_sinh_ratio` uses its Taylor series.
pub const LOG_SINH_SERIES_THRESHOLD: f64 = 1e-2;

const ERF_SERIES_LIMIT: f64 = 3.0;

/// Error function.
///
/// For `|x| <= 3` the positive-term series
/// `erf x = 2/sqrt(pi) exp(-x^2) sum_n 2^n x^(2n+1) / (2n+1)!!`
/// is summed (no cancellation); beyond that `1 - erfc x` with the
/// continued fraction for `erfc`.
pub fn erf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return -erf(-x);
    }
    if x <= ERF_SERIES_LIMIT {
        erf_series(x)
    } else {
        1.0 - erfc_continued_fraction(x)
    }
}

/// Complementary error function, accurate in the far tail.
pub fn erfc(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    if x <= ERF_SERIES_LIMIT {
        1.0 - erf_series(x)
    } else {
        erfc_continued_fraction(x)
    }
}

fn erf_series(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = x;
    let mut sum = x;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= 2.0 * x2 / (2.0 * n + 1.0);
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-x2).exp() * sum
}

/// `erfc x = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))`,
/// evaluated with the modified Lentz scheme.
fn erfc_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut f = x;
    let mut c = x;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = x + a * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = x + a / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x * x).exp() / (PI.sqrt() * f)
}

/// `alpha(t) = int_0^{kappa sqrt t} exp(-r^2/2) dr = sqrt(pi/2) erf(kappa sqrt(t/2))`.
pub fn alpha(kappa: f64, t: f64) -> f64 {
    SQRT_HALF_PI * erf(kappa * (0.5 * t).sqrt())
}

/// Above this argument `log_sinh_ratio` uses the log form.
pub const LOG_SINH_LOG_FORM_THRESHOLD: f64 = 1.0;

/// `log(sinh x / x)`, continuous at zero and free of overflow.
pub fn log_sinh_ratio(x: f64) -> f64 {
    let x = x.abs();
    if x <= LOG_SINH_SERIES_THRESHOLD {
        log_sinh_ratio_series(x)
    } else if x < LOG_SINH_LOG_FORM_THRESHOLD {
        log_sinh_ratio_log1p_form(x)
    } else {
        log_sinh_ratio_log_form(x)
    }
}

/// `log1p(sinh x / x - 1)` with the bracket summed as a power series.
/// The log form loses about `6 eps / x^2` relative accuracy for small `x`.
pub fn log_sinh_ratio_log1p_form(x: f64) -> f64 {
    let x2 = x * x;
    let mut term = 1.0;
    let mut sum = 0.0;
    let mut n = 1.0;
    loop {
        term *= x2 / ((2.0 * n) * (2.0 * n + 1.0));
        sum += term;
        if term <= f64::EPSILON * 0.25 * sum {
            break;
        }
        n += 1.0;
    }
    sum.ln_1p()
}

/// The `x + log((1 - e^{-2x}) / 2x)` branch of [`log_sinh_ratio`].
pub fn log_sinh_ratio_log_form(x: f64) -> f64 {
    x + (-(-2.0 * x).exp_m1() / (2.0 * x)).ln()
}

/// The series branch of [`log_sinh_ratio`].
pub fn log_sinh_ratio_series(x: f64) -> f64 {
    let x2 = x * x;
    x2 * (1.0 / 6.0 - x2 * (1.0 / 180.0 - x2 / 2835.0))
}

/// `log sinh x` for `x > 0`.
pub fn log_sinh(x: f64) -> f64 {
    x.ln() + log_sinh_ratio(x)
}

/// `(1/(1+2r), (1 - e^{-2r})/(2r), 1/(1+r))`, strictly increasing for `r > 0`.
pub fn sinh_ratio_bounds(r: f64) -> (f64, f64, f64) {
    let mid = if r == 0.0 {
        1.0
    } else {
        -(-2.0 * r).exp_m1() / (2.0 * r)
    };
    (1.0 / (1.0 + 2.0 * r), mid, 1.0 / (1.0 + r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MomentKind {
    Sinh,
    Cosh,
}

impl MomentKind {
    pub fn name(self) -> &'static str {
        match self {
            MomentKind::Sinh => "sinh",
            MomentKind::Cosh => "cosh",
        }
    }

    pub fn eval(self, x: f64) -> f64 {
        match self {
            MomentKind::Sinh => x.sinh(),
            MomentKind::Cosh => x.cosh(),
        }
    }
}

/// `int_0^inf exp(-r^2/2t) r^power {sinh, cosh}(kappa r) dr`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HyperbolicMoment {
    power: u32,
    kind: MomentKind,
}

impl HyperbolicMoment {
    /// The nine moments with closed forms.
    pub const ALL: [HyperbolicMoment; 9] = [
        HyperbolicMoment::raw(0, MomentKind::Sinh),
        HyperbolicMoment::raw(0, MomentKind::Cosh),
        HyperbolicMoment::raw(1, MomentKind::Sinh),
        HyperbolicMoment::raw(1, MomentKind::Cosh),
        HyperbolicMoment::raw(2, MomentKind::Sinh),
        HyperbolicMoment::raw(2, MomentKind::Cosh),
        HyperbolicMoment::raw(3, MomentKind::Sinh),
        HyperbolicMoment::raw(3, MomentKind::Cosh),
        HyperbolicMoment::raw(4, MomentKind::Sinh),
    ];

    const fn raw(power: u32, kind: MomentKind) -> Self {
        HyperbolicMoment { power, kind }
    }

    pub fn new(power: u32, kind: MomentKind) -> Result<Self> {
        match (power, kind) {
            (0..=3, _) | (4, MomentKind::Sinh) => Ok(HyperbolicMoment { power, kind }),
            _ => Err(Error::UnsupportedMoment {
                power,
                kind: kind.name(),
            }),
        }
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn kind(&self) -> MomentKind {
        self.kind
    }

    pub fn label(&self) -> String {
        format!("r{}_{}", self.power, self.kind.name())
    }

    /// The raw integrand, for quadrature. The Gaussian and the growing
    /// exponential are combined before exponentiating.
    pub fn integrand(&self, kappa: f64, t: f64, r: f64) -> f64 {
        let x = kappa * r;
        let tail = (-2.0 * x).exp();
        let hyperbolic = match self.kind {
            MomentKind::Sinh => -(-2.0 * x).exp_m1(),
            MomentKind::Cosh => 1.0 + tail,
        };
        0.5 * (x - r * r / (2.0 * t)).exp() * hyperbolic * r.powi(self.power as i32)
    }

    /// The integrand with `exp(kappa^2 t / 2)` removed, in the variable
    /// `s` where `r = kappa t + s sqrt t` (Jacobian included).
    pub fn shifted_integrand(&self, kappa: f64, t: f64, s: f64) -> f64 {
        let sqrt_t = t.sqrt();
        let r = kappa * t + s * sqrt_t;
        let tail = (-2.0 * kappa * r).exp();
        let hyperbolic = match self.kind {
            MomentKind::Sinh => -(-2.0 * kappa * r).exp_m1(),
            MomentKind::Cosh => 1.0 + tail,
        };
        0.5 * (-0.5 * s * s).exp() * hyperbolic * r.powi(self.power as i32) * sqrt_t
    }

    /// Closed form as `a + b exp(kappa^2 t / 2)`, returned with the
    /// exponential carried in the log scale.
    pub fn closed_form(&self, kappa: f64, t: f64) -> ExpScaled {
        let k2t = kappa * kappa * t;
        let half = 0.5 * k2t;
        let sqrt_t = t.sqrt();
        let al = alpha(kappa, t);
        let (a, b) = match (self.power, self.kind) {
            (0, MomentKind::Sinh) => (0.0, sqrt_t * al),
            (0, MomentKind::Cosh) => (0.0, SQRT_HALF_PI * sqrt_t),
            (1, MomentKind::Sinh) => (0.0, SQRT_HALF_PI * kappa * t * sqrt_t),
            (1, MomentKind::Cosh) => (t, kappa * t * sqrt_t * al),
            (2, MomentKind::Sinh) => (kappa * t * t, t * sqrt_t * (k2t + 1.0) * al),
            (2, MomentKind::Cosh) => (0.0, SQRT_HALF_PI * t * sqrt_t * (k2t + 1.0)),
            (3, MomentKind::Sinh) => (0.0, SQRT_HALF_PI * kappa * t * t * sqrt_t * (k2t + 3.0)),
            (3, MomentKind::Cosh) => (
                t * t * (k2t + 2.0),
                kappa * t * t * sqrt_t * (k2t + 3.0) * al,
            ),
            (4, MomentKind::Sinh) => (
                kappa * t * t * t * (k2t + 5.0),
                t * t * sqrt_t * (k2t * k2t + 6.0 * k2t + 3.0) * al,
            ),
            _ => unreachable!("validated in HyperbolicMoment::new"),
        };
        ExpScaled::new(a * (-half).exp() + b, half)
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision, clippy::needless_range_loop)]
mod tests {
    use super::*;

    // reference values from a 30-digit evaluation
    const ERF_TABLE: [(f64, f64, f64); 6] = [
        (0.1, 0.112462916018284898404712251014, 0.887537083981715101595287748986),
        (0.5, 0.520499877813046537682746653892, 0.479500122186953462317253346108),
        (1.0, 0.842700792949714869341220635083, 0.157299207050285130658779364917),
        (2.0, 0.995322265018952734162069256367, 0.00467773498104726583793074363276),
        (3.0, 0.99997790950300141455862722387, 0.0000220904969985854413727761295783),
        (5.0, 0.99999999999846254020557196515, 1.53745979442803485019250987654e-12),
    ];

    #[test]
    fn erf_matches_reference_table() {
        for (x, e, c) in ERF_TABLE {
            assert!((erf(x) - e).abs() < 4e-16, "erf({x}) = {}", erf(x));
            assert!((erf(-x) + e).abs() < 4e-16);
            // erfc below 3 inherits the absolute accuracy of erf
            if x > 3.0 {
                assert!((erfc(x) / c - 1.0).abs() < 1e-14, "erfc({x})");
            } else {
                assert!((erfc(x) - c).abs() < 3e-16);
            }
        }
        assert_eq!(erf(0.0), 0.0);
        assert_eq!(erf(40.0), 1.0);
    }

    #[test]
    fn erf_branches_join_continuously() {
        let below = erf_series(ERF_SERIES_LIMIT);
        let above = 1.0 - erfc_continued_fraction(ERF_SERIES_LIMIT);
        assert!((below - above).abs() < 4e-16);
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(1.0, 0.0), 0.0);
        assert!((alpha(1.0, 1e6) - SQRT_HALF_PI).abs() < 1e-15);
        assert!((alpha(1.0, 1.0) - 0.855624391892148803173).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 1..200 {
            let a = alpha(0.7, i as f64 * 0.05);
            assert!(a > prev && a <= SQRT_HALF_PI);
            prev = a;
        }
    }

    #[test]
    fn log_sinh_ratio_values() {
        assert_eq!(log_sinh_ratio(0.0), 0.0);
        assert!((log_sinh_ratio(1.0) - 0.161439361571195633610).abs() < 1e-15);
        assert!((log_sinh_ratio(30.0) - 25.9056554377778993152).abs() < 1e-13);
        let big = log_sinh_ratio(700.0);
        assert!((big - 692.755772484396650017).abs() < 1e-12);
        assert!(log_sinh_ratio(1e5).is_finite());
        // naive formula is still representable at 30
        let naive = (30f64.sinh() / 30.0).ln();
        assert!((log_sinh_ratio(30.0) - naive).abs() < 1e-13);
    }

    #[test]
    fn log_sinh_branches_agree_at_switchover() {
        let x = LOG_SINH_SERIES_THRESHOLD;
        let s = log_sinh_ratio_series(x);
        let l = log_sinh_ratio_log1p_form(x);
        assert!(((s - l) / s).abs() < 1e-14, "{s} vs {l}");
        // the bare log form only reaches absolute accuracy here
        assert!((s - log_sinh_ratio_log_form(x)).abs() < 1e-12);

        let x = LOG_SINH_LOG_FORM_THRESHOLD;
        let m = log_sinh_ratio_log1p_form(x);
        let l = log_sinh_ratio_log_form(x);
        assert!(((m - l) / m).abs() < 1e-14, "{m} vs {l}");
    }

    #[test]
    fn sinh_ratio_bounds_examples() {
        let (lo, mid, hi) = sinh_ratio_bounds(1.0);
        assert!((lo - 1.0 / 3.0).abs() < 1e-16);
        assert!((mid - 0.432332358381693654053).abs() < 1e-15);
        assert_eq!(hi, 0.5);
        let (lo, mid, hi) = sinh_ratio_bounds(100.0);
        assert!((lo - 0.004975124378109453).abs() < 1e-15);
        assert!((mid - 0.005).abs() < 1e-15);
        assert!((hi - 0.009900990099009901).abs() < 1e-15);
        let (lo, mid, hi) = sinh_ratio_bounds(1e-12);
        for v in [lo, mid, hi] {
            assert!((v - 1.0).abs() < 1e-11);
        }
    }

    #[test]
    fn closed_form_examples() {
        let m1 = HyperbolicMoment::new(1, MomentKind::Sinh).unwrap();
        let v = m1.closed_form(1.0, 1.0).value();
        assert!((v - SQRT_HALF_PI * 0.5f64.exp()).abs() < 1e-14);
        assert!((v - 2.0663657).abs() < 1e-7);

        let m3 = HyperbolicMoment::new(3, MomentKind::Sinh).unwrap();
        let v = m3.closed_form(1.0, 1.0).value();
        assert!((v - 4.0 * SQRT_HALF_PI * 0.5f64.exp()).abs() < 1e-13);

        let c0 = HyperbolicMoment::new(0, MomentKind::Cosh).unwrap();
        let v = c0.closed_form(2.0, 0.5).value();
        assert!((v - SQRT_HALF_PI * 0.5f64.sqrt() * 1f64.exp()).abs() < 1e-14);
        assert!((v - 2.40901454734936102856).abs() < 1e-13);
    }

    #[test]
    fn closed_form_never_overflows() {
        for m in HyperbolicMoment::ALL {
            let v = m.closed_form(2.0, 500.0);
            assert!(v.is_finite());
            assert!(v.mantissa > 0.0);
            assert_eq!(v.log_scale, 1000.0);
        }
    }

    #[test]
    fn unsupported_moment_rejected() {
        assert!(matches!(
            HyperbolicMoment::new(4, MomentKind::Cosh),
            Err(Error::UnsupportedMoment { power: 4, .. })
        ));
        assert!(HyperbolicMoment::new(5, MomentKind::Sinh).is_err());
    }
}
