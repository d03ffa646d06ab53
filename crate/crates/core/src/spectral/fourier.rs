//! Fourier modes on the circle and the flat 2-torus, and the FFT grids that
//! resolve them. The circle is the `k2 = 0`, `n2 = 1` case of the torus.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Coefficients for modes `|m1| <= k1`, `|m2| <= k2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeArray {
    pub k1: usize,
    pub k2: usize,
    pub data: Vec<Complex64>,
}

impl ModeArray {
    pub fn zeros(k1: usize, k2: usize) -> Self {
        ModeArray {
            k1,
            k2,
            data: vec![Complex64::new(0.0, 0.0); (2 * k1 + 1) * (2 * k2 + 1)],
        }
    }

    pub fn contains(&self, m1: i64, m2: i64) -> bool {
        m1.unsigned_abs() as usize <= self.k1 && m2.unsigned_abs() as usize <= self.k2
    }

    fn index(&self, m1: i64, m2: i64) -> usize {
        let row = (m1 + self.k1 as i64) as usize;
        let col = (m2 + self.k2 as i64) as usize;
        row * (2 * self.k2 + 1) + col
    }

    pub fn get(&self, m1: i64, m2: i64) -> Complex64 {
        if self.contains(m1, m2) {
            self.data[self.index(m1, m2)]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    pub fn set(&mut self, m1: i64, m2: i64, c: Complex64) {
        let i = self.index(m1, m2);
        self.data[i] = c;
    }

    /// `(m1, m2)` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (i64, i64)> + '_ {
        let (k1, k2) = (self.k1 as i64, self.k2 as i64);
        (-k1..=k1).flat_map(move |m1| (-k2..=k2).map(move |m2| (m1, m2)))
    }

    pub fn map<F: Fn(i64, i64, Complex64) -> Complex64>(&self, f: F) -> ModeArray {
        let mut out = self.clone();
        for ((m1, m2), c) in self.modes().zip(out.data.iter_mut()) {
            *c = f(m1, m2, *c);
        }
        out
    }
}

/// Frequency of FFT index `j` on `n` points; the Nyquist index maps to `+n/2`.
pub fn frequency(j: usize, n: usize) -> i64 {
    if j <= n / 2 {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

fn wrap(m: i64, n: usize) -> usize {
    m.rem_euclid(n as i64) as usize
}

/// Number of grid points resolving modes up to `k` with 4x oversampling.
pub fn grid_size(k: usize) -> usize {
    if k == 0 {
        1
    } else {
        (4 * (2 * k + 1)).next_power_of_two().max(32)
    }
}

/// An `n1 x n2` periodic grid over `[0, l1) x [0, l2)`, stored row-major in `x`.
pub struct FourierGrid {
    pub n1: usize,
    pub n2: usize,
    pub l1: f64,
    pub l2: f64,
    fwd: [Arc<dyn Fft<f64>>; 2],
    inv: [Arc<dyn Fft<f64>>; 2],
}

impl FourierGrid {
    pub fn new(n1: usize, n2: usize, l1: f64, l2: f64) -> Self {
        let mut planner = FftPlanner::new();
        FourierGrid {
            n1,
            n2,
            l1,
            l2,
            fwd: [planner.plan_fft_forward(n1), planner.plan_fft_forward(n2)],
            inv: [planner.plan_fft_inverse(n1), planner.plan_fft_inverse(n2)],
        }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> (f64, f64) {
        let (j1, j2) = (index / self.n2, index % self.n2);
        (
            self.l1 * j1 as f64 / self.n1 as f64,
            self.l2 * j2 as f64 / self.n2 as f64,
        )
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn transform(&self, buf: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 2]) {
        let (n1, n2) = (self.n1, self.n2);
        if n2 > 1 {
            plans[1].process(buf);
        }
        if n1 > 1 {
            let mut col = vec![Complex64::new(0.0, 0.0); n1];
            for j2 in 0..n2 {
                for j1 in 0..n1 {
                    col[j1] = buf[j1 * n2 + j2];
                }
                plans[0].process(&mut col);
                for j1 in 0..n1 {
                    buf[j1 * n2 + j2] = col[j1];
                }
            }
        }
    }

    /// Grid values of `sum_m c_m exp(2 pi i (m1 x / l1 + m2 y / l2))` (real part).
    pub fn synthesize(&self, modes: &ModeArray) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len()];
        for ((m1, m2), c) in modes.modes().zip(modes.data.iter()) {
            buf[wrap(m1, self.n1) * self.n2 + wrap(m2, self.n2)] += *c;
        }
        self.transform(&mut buf, &self.inv);
        buf.into_iter().map(|z| z.re).collect()
    }

    /// Full-grid coefficients against `exp(2 pi i (m1 x / l1 + m2 y / l2))`.
    pub fn analyze(&self, values: &[f64]) -> Vec<Complex64> {
        let scale = 1.0 / self.len() as f64;
        let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v * scale, 0.0)).collect();
        self.transform(&mut buf, &self.fwd);
        buf
    }

    /// Restrict a full-grid spectrum to `|m1| <= k1`, `|m2| <= k2`, returning
    /// the kept modes and the energy left outside.
    pub fn truncate(&self, spectrum: &[Complex64], k1: usize, k2: usize) -> (ModeArray, f64) {
        let mut modes = ModeArray::zeros(k1, k2);
        let mut tail = 0.0;
        for j1 in 0..self.n1 {
            for j2 in 0..self.n2 {
                let (m1, m2) = (frequency(j1, self.n1), frequency(j2, self.n2));
                let c = spectrum[j1 * self.n2 + j2];
                if modes.contains(m1, m2) {
                    modes.set(m1, m2, c);
                } else {
                    tail += c.norm_sqr();
                }
            }
        }
        (modes, tail)
    }

    /// Spectral partial derivative of grid values: `orders = (a, b)` gives
    /// `d^a/dx^a d^b/dy^b`. Nyquist modes are dropped for odd orders.
    pub fn derivative(&self, spectrum: &[Complex64], orders: (u32, u32)) -> Vec<f64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.len()];
        for j1 in 0..self.n1 {
            let m1 = frequency(j1, self.n1);
            if orders.0 % 2 == 1 && self.n1.is_multiple_of(2) && j1 == self.n1 / 2 {
                continue;
            }
            let f1 = Complex64::new(0.0, 2.0 * PI * m1 as f64 / self.l1).powu(orders.0);
            for j2 in 0..self.n2 {
                let m2 = frequency(j2, self.n2);
                if orders.1 % 2 == 1 && self.n2.is_multiple_of(2) && j2 == self.n2 / 2 {
                    continue;
                }
                let f2 = Complex64::new(0.0, 2.0 * PI * m2 as f64 / self.l2).powu(orders.1);
                buf[j1 * self.n2 + j2] = spectrum[j1 * self.n2 + j2] * f1 * f2;
            }
        }
        self.transform(&mut buf, &self.inv);
        buf.into_iter().map(|z| z.re).collect()
    }
}

/// Laplacian eigenvalue of mode `(m1, m2)`.
pub fn eigenvalue(m1: i64, m2: i64, l1: f64, l2: f64) -> f64 {
    let a = 2.0 * PI * m1 as f64 / l1;
    let b = 2.0 * PI * m2 as f64 / l2;
    a * a + b * b
}

/// `(grad V . grad u)` in coefficients, truncated to the modes of `u`.
/// `potential` lists `(p1, p2, V_p)` against plain exponentials.
pub fn drift_term(potential: &[(i64, i64, Complex64)], u: &ModeArray, l1: f64, l2: f64) -> ModeArray {
    let mut out = ModeArray::zeros(u.k1, u.k2);
    let four_pi2 = 4.0 * PI * PI;
    for (q1, q2) in u.modes() {
        let c = u.get(q1, q2);
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for &(p1, p2, v) in potential {
            let (m1, m2) = (p1 + q1, p2 + q2);
            if !out.contains(m1, m2) {
                continue;
            }
            let w = -four_pi2 * ((p1 * q1) as f64 / (l1 * l1) + (p2 * q2) as f64 / (l2 * l2));
            if w == 0.0 {
                continue;
            }
            let i = out.index(m1, m2);
            out.data[i] += v * c * w;
        }
    }
    out
}
