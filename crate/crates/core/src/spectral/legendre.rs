//! Legendre polynomials and Gauss-Legendre nodes for zonal data on the sphere.

use std::f64::consts::PI;

/// `(P_0(x) .. P_lmax(x), P_0'(x) .. P_lmax'(x))` by the three-term recurrences.
pub fn legendre_table(lmax: usize, x: f64) -> (Vec<f64>, Vec<f64>) {
    let mut p = vec![0.0; lmax + 1];
    let mut dp = vec![0.0; lmax + 1];
    p[0] = 1.0;
    if lmax >= 1 {
        p[1] = x;
        dp[1] = 1.0;
    }
    for l in 1..lmax {
        let lf = l as f64;
        p[l + 1] = ((2.0 * lf + 1.0) * x * p[l] - lf * p[l - 1]) / (lf + 1.0);
        dp[l + 1] = dp[l - 1] + (2.0 * lf + 1.0) * p[l];
    }
    (p, dp)
}

/// Nodes (ascending) and weights of the `m`-point Gauss-Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut derivative = 1.0;
        for _ in 0..100 {
            let (p, dp) = legendre_table(m, x);
            derivative = dp[m];
            let step = p[m] / derivative;
            x -= step;
            if step.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, dp) = legendre_table(m, x);
                derivative = dp[m];
                break;
            }
        }
        nodes[m - 1 - i] = x;
        weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * derivative * derivative);
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recurrence_values() {
        let (p, dp) = legendre_table(3, 0.5);
        assert!((p[2] - (-0.125)).abs() < 1e-15);
        assert!((p[3] - (-0.4375)).abs() < 1e-15);
        assert!((dp[3] - 0.375).abs() < 1e-14);
    }

    #[test]
    fn rule_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(12);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..24 {
            let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k)).sum();
            assert!((approx - exact).abs() < 1e-14, "x^{k}");
        }
    }

    #[test]
    fn orthogonality() {
        let (x, w) = gauss_legendre(20);
        let tables: Vec<Vec<f64>> = x.iter().map(|&x| legendre_table(8, x).0).collect();
        for a in 0..=8 {
            for b in 0..=8 {
                let s: f64 = tables.iter().zip(&w).map(|(p, w)| w * p[a] * p[b]).sum();
                let expected = if a == b { 2.0 / (2.0 * a as f64 + 1.0) } else { 0.0 };
                assert!((s - expected).abs() < 1e-14);
            }
        }
    }
}
