//! Numbers carried as `mantissa * exp(log_scale)`.
//!
//! Quantities on hyperbolic space pick up factors like `exp(kappa^2 t / 2)`
//! that overflow long before the interesting time range ends. Keeping the
//! exponent apart lets products such as `xi * eta` cancel the large factors
//! exactly before anything is materialized.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpScaled {
    pub mantissa: f64,
    pub log_scale: f64,
}

impl ExpScaled {
    pub const ZERO: ExpScaled = ExpScaled {
        mantissa: 0.0,
        log_scale: 0.0,
    };

    pub fn new(mantissa: f64, log_scale: f64) -> Self {
        ExpScaled {
            mantissa,
            log_scale,
        }
    }

    pub fn from_f64(x: f64) -> Self {
        ExpScaled::new(x, 0.0)
    }

    /// `exp(x)` with no rounding of the exponent.
    pub fn exp(x: f64) -> Self {
        ExpScaled::new(1.0, x)
    }

    /// The represented value. Overflows to infinity when it must.
    pub fn value(self) -> f64 {
        if self.mantissa == 0.0 {
            return 0.0;
        }
        self.mantissa * self.log_scale.exp()
    }

    /// Natural log of the absolute value.
    pub fn ln_abs(self) -> f64 {
        self.mantissa.abs().ln() + self.log_scale
    }

    pub fn is_sign_negative(self) -> bool {
        self.mantissa < 0.0
    }

    pub fn scale(self, factor: f64) -> Self {
        ExpScaled::new(self.mantissa * factor, self.log_scale)
    }

    /// Re-express with the given exponent. Exact when `log_scale` equals the
    /// current one; otherwise rounds the mantissa.
    pub fn rescaled(self, log_scale: f64) -> Self {
        if self.mantissa == 0.0 {
            return ExpScaled::new(0.0, log_scale);
        }
        ExpScaled::new(
            self.mantissa * (self.log_scale - log_scale).exp(),
            log_scale,
        )
    }

    pub fn is_finite(self) -> bool {
        self.mantissa.is_finite() && self.log_scale.is_finite()
    }

    /// Strict ordering of the represented values.
    pub fn lt(self, other: ExpScaled) -> bool {
        (other - self).mantissa > 0.0
    }
}

impl Default for ExpScaled {
    fn default() -> Self {
        ExpScaled::ZERO
    }
}

impl From<f64> for ExpScaled {
    fn from(x: f64) -> Self {
        ExpScaled::from_f64(x)
    }
}

impl Mul for ExpScaled {
    type Output = ExpScaled;
    fn mul(self, rhs: ExpScaled) -> ExpScaled {
        ExpScaled::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }
}

impl Mul<f64> for ExpScaled {
    type Output = ExpScaled;
    fn mul(self, rhs: f64) -> ExpScaled {
        self.scale(rhs)
    }
}

impl Div for ExpScaled {
    type Output = ExpScaled;
    fn div(self, rhs: ExpScaled) -> ExpScaled {
        ExpScaled::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }
}

impl Neg for ExpScaled {
    type Output = ExpScaled;
    fn neg(self) -> ExpScaled {
        ExpScaled::new(-self.mantissa, self.log_scale)
    }
}

impl Add for ExpScaled {
    type Output = ExpScaled;
    fn add(self, rhs: ExpScaled) -> ExpScaled {
        if self.mantissa == 0.0 {
            return rhs;
        }
        if rhs.mantissa == 0.0 {
            return self;
        }
        // align on the larger exponent so the smaller term underflows, never overflows
        let target = self.log_scale.max(rhs.log_scale);
        ExpScaled::new(
            self.rescaled(target).mantissa + rhs.rescaled(target).mantissa,
            target,
        )
    }
}

impl Sub for ExpScaled {
    type Output = ExpScaled;
    fn sub(self, rhs: ExpScaled) -> ExpScaled {
        self + (-rhs)
    }
}

impl fmt::Display for ExpScaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*exp({})", self.mantissa, self.log_scale)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn products_cancel_large_exponents() {
        let big = ExpScaled::new(2.0, 1000.0);
        let small = ExpScaled::new(3.0, -1000.0);
        assert_eq!((big * small).value(), 6.0);
        assert!(big.value().is_infinite());
    }

    #[test]
    fn addition_aligns_on_larger_exponent() {
        let a = ExpScaled::new(1.0, 800.0);
        let b = ExpScaled::new(1.0, 0.0);
        let s = a + b;
        assert_eq!(s.log_scale, 800.0);
        assert_eq!(s.mantissa, 1.0);
        let c = ExpScaled::new(1.5, 2.0) - ExpScaled::new(0.5, 2.0);
        assert_eq!(c.mantissa, 1.0);
        assert!((c.value() - 2f64.exp()).abs() < 1e-15);
    }

    #[test]
    fn ordering_across_scales() {
        let a = ExpScaled::new(1.0, 50.0);
        let b = ExpScaled::new(2.0, 50.0);
        assert!(a.lt(b));
        assert!(!b.lt(a));
        assert!(ExpScaled::new(-1.0, 900.0).lt(ExpScaled::from_f64(0.0)));
    }
}
