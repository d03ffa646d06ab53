//! Real trigonometric polynomials on a periodic box, with exact derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;

/// `cos * cos(theta) + sin * sin(theta)` with `theta = 2 pi (m1 x / l1 + m2 y / l2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub m1: i64,
    pub m2: i64,
    pub cos: f64,
    pub sin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoly {
    pub l1: f64,
    pub l2: f64,
    pub constant: f64,
    pub terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn constant(l1: f64, l2: f64, value: f64) -> Self {
        TrigPoly {
            l1,
            l2,
            constant: value,
            terms: Vec::new(),
        }
    }

    pub fn with_term(mut self, m1: i64, m2: i64, cos: f64, sin: f64) -> Self {
        self.terms.push(TrigTerm { m1, m2, cos, sin });
        self
    }

    fn wave(&self, term: &TrigTerm) -> (f64, f64) {
        (2.0 * PI * term.m1 as f64 / self.l1, 2.0 * PI * term.m2 as f64 / self.l2)
    }

    fn phase(&self, term: &TrigTerm, x: f64, y: f64) -> f64 {
        let (a, b) = self.wave(term);
        a * x + b * y
    }

    pub fn value(&self, x: f64, y: f64) -> f64 {
        self.terms.iter().fold(self.constant, |acc, term| {
            let th = self.phase(term, x, y);
            acc + term.cos * th.cos() + term.sin * th.sin()
        })
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for term in &self.terms {
            let th = self.phase(term, x, y);
            let (a, b) = self.wave(term);
            let d = -term.cos * th.sin() + term.sin * th.cos();
            g[0] += a * d;
            g[1] += b * d;
        }
        g
    }

    pub fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let mut h = [[0.0; 2]; 2];
        for term in &self.terms {
            let th = self.phase(term, x, y);
            let (a, b) = self.wave(term);
            let d2 = -(term.cos * th.cos() + term.sin * th.sin());
            h[0][0] += a * a * d2;
            h[0][1] += a * b * d2;
            h[1][1] += b * b * d2;
        }
        h[1][0] = h[0][1];
        h
    }

    /// Largest eigenvalue of the Hessian at `(x, y)`.
    pub fn max_hessian_eigenvalue(&self, x: f64, y: f64) -> f64 {
        let h = self.hessian(x, y);
        let mean = 0.5 * (h[0][0] + h[1][1]);
        let half_diff = 0.5 * (h[0][0] - h[1][1]);
        mean + half_diff.hypot(h[0][1])
    }

    /// Largest absolute mode index in each direction.
    pub fn degree(&self) -> (usize, usize) {
        self.terms.iter().fold((0, 0), |(d1, d2), t| {
            (d1.max(t.m1.unsigned_abs() as usize), d2.max(t.m2.unsigned_abs() as usize))
        })
    }

    /// Coefficients against `exp(i theta)`, merged per mode and sorted.
    pub fn exp_coefficients(&self) -> Vec<(i64, i64, Complex64)> {
        let mut out: Vec<(i64, i64, Complex64)> = Vec::new();
        let mut push = |m1: i64, m2: i64, c: Complex64| {
            if let Some(entry) = out.iter_mut().find(|e| e.0 == m1 && e.1 == m2) {
                entry.2 += c;
            } else {
                out.push((m1, m2, c));
            }
        };
        push(0, 0, Complex64::new(self.constant, 0.0));
        for t in &self.terms {
            if t.m1 == 0 && t.m2 == 0 {
                push(0, 0, Complex64::new(t.cos, 0.0));
                continue;
            }
            push(t.m1, t.m2, Complex64::new(0.5 * t.cos, -0.5 * t.sin));
            push(-t.m1, -t.m2, Complex64::new(0.5 * t.cos, 0.5 * t.sin));
        }
        out.retain(|e| e.2 != Complex64::new(0.0, 0.0));
        out.sort_by_key(|a| (a.0, a.1));
        out
    }

    /// Random polynomial of the given degree with `min >= constant - amplitude_sum > 0`.
    /// Every coefficient is drawn from `[-amplitude, amplitude]`; the constant is
    /// chosen so the polynomial stays at least `floor` everywhere.
    pub fn random_positive<R: Rng>(
        rng: &mut R,
        l1: f64,
        l2: f64,
        degree: i64,
        amplitude: f64,
        floor: f64,
    ) -> Self {
        let mut p = TrigPoly::constant(l1, l2, 0.0);
        let mut total = 0.0;
        for m1 in 0..=degree {
            for m2 in -degree..=degree {
                if m1 == 0 && m2 <= 0 {
                    continue;
                }
                let c = rng.gen_range(-amplitude..=amplitude);
                let s = rng.gen_range(-amplitude..=amplitude);
                total += c.abs() + s.abs();
                p = p.with_term(m1, m2, c, s);
            }
        }
        p.constant = floor + total;
        p
    }

    /// Random polynomial with zero mean.
    pub fn random_zero_mean<R: Rng>(rng: &mut R, l1: f64, l2: f64, degree: i64, amplitude: f64) -> Self {
        let mut p = TrigPoly::random_positive(rng, l1, l2, degree, amplitude, 0.0);
        p.constant = 0.0;
        p
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> TrigPoly {
        TrigPoly::constant(1.0, 2.0, 0.5)
            .with_term(1, 0, 0.3, 0.0)
            .with_term(1, -2, 0.1, -0.2)
    }

    #[test]
    fn derivatives_match_differences() {
        let p = sample();
        let (x, y, h) = (0.31, 0.77, 1e-5);
        let g = p.gradient(x, y);
        let gx = (p.value(x + h, y) - p.value(x - h, y)) / (2.0 * h);
        let gy = (p.value(x, y + h) - p.value(x, y - h)) / (2.0 * h);
        assert!((g[0] - gx).abs() < 1e-8 && (g[1] - gy).abs() < 1e-8);
        let hs = p.hessian(x, y);
        let hxy = (p.gradient(x, y + h)[0] - p.gradient(x, y - h)[0]) / (2.0 * h);
        assert!((hs[0][1] - hxy).abs() < 1e-7);
        assert_eq!(hs[0][1], hs[1][0]);
    }

    #[test]
    fn exponential_coefficients_reproduce_values() {
        let p = sample();
        let (x, y) = (0.2, 1.3);
        let sum: Complex64 = p
            .exp_coefficients()
            .iter()
            .map(|&(m1, m2, c)| {
                let th = 2.0 * PI * (m1 as f64 * x / p.l1 + m2 as f64 * y / p.l2);
                c * Complex64::from_polar(1.0, th)
            })
            .sum();
        assert!((sum.re - p.value(x, y)).abs() < 1e-14);
        assert!(sum.im.abs() < 1e-14);
        assert_eq!(p.degree(), (1, 2));
    }

    #[test]
    fn hessian_eigenvalue_of_single_sine() {
        let v = TrigPoly::constant(1.0, 1.0, 0.0).with_term(1, 0, 0.0, 0.1);
        // -0.4 pi^2 sin(2 pi x) is largest at x = 3/4
        let top = v.max_hessian_eigenvalue(0.75, 0.0);
        assert!((top - 0.4 * PI * PI).abs() < 1e-12);
        assert_eq!(v.max_hessian_eigenvalue(0.25, 0.0), 0.0);
    }
}
