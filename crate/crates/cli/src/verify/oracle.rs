//! Independent root counting by companion-matrix eigenvalues.

use nalgebra::DMatrix;
use rand::Rng;
use tippe_core::RealPolynomial;

/// Imaginary parts below this count as real roots.
const REAL_TOL: f64 = 1e-6;

/// Real eigenvalues of the companion matrix of `q`.
pub fn real_roots(q: &RealPolynomial) -> Vec<f64> {
    let n = q.degree();
    if n == 0 {
        return Vec::new();
    }
    let c = q.coefficients();
    let lead = q.leading();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -c[i] / lead;
    }
    m.complex_eigenvalues().iter().filter(|z| z.im.abs() < REAL_TOL).map(|z| z.re).collect()
}

pub fn count_in(roots: &[f64], lo: f64, hi: f64) -> usize {
    roots.iter().filter(|&&r| r > lo && r <= hi).count()
}

/// Polynomial with distinct real roots on a 0.05 grid, up to two complex
/// pairs and a random leading factor, plus an interval whose ends sit
/// halfway between grid points.
pub fn constructed_case<R: Rng>(rng: &mut R) -> (RealPolynomial, f64, f64) {
    let n_real = rng.random_range(0..=6usize);
    let n_pairs = if n_real == 0 { rng.random_range(1..=2usize) } else { rng.random_range(0..=2usize) };
    let mut grid: Vec<i32> = (-40..=40).collect();
    let mut roots = Vec::with_capacity(n_real);
    for _ in 0..n_real {
        let k = grid.swap_remove(rng.random_range(0..grid.len()));
        roots.push(k as f64 * 0.05);
    }
    let mut q = RealPolynomial::from_roots(&roots);
    for _ in 0..n_pairs {
        let u: f64 = rng.random_range(-2.0..2.0);
        let v: f64 = rng.random_range(0.1..1.0);
        q = q.mul(&RealPolynomial::new(vec![u * u + v * v, -2.0 * u, 1.0]));
    }
    let lead = rng.random_range(0.5..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let lo = rng.random_range(-45..45) as f64 * 0.05 + 0.025;
    let hi = lo + rng.random_range(1..90) as f64 * 0.05;
    (q.scale(lead), lo, hi)
}
