//! Dense real polynomials and Sturm sequences.
//!
//! Coefficients are stored in ascending degree. Division remainders whose
//! coefficients fall below `ZERO_REL_TOL` times the rounding scale of the
//! division, `max(|dividend|, |quotient| |divisor|)`, are treated as zero.
//! That decides square-freeness and termination of the Euclidean chain in
//! floating point.

use crate::error::{Error, Result};

pub const ZERO_REL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct RealPolynomial {
    coeffs: Vec<f64>,
}

impl RealPolynomial {
    /// Builds a polynomial from ascending coefficients; exact trailing zeros
    /// are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(vec![c])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[f64]) -> Self {
        let mut p = Self::constant(1.0);
        for &r in roots {
            p = p.mul(&Self::new(vec![-r, 1.0]));
        }
        p
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn leading(&self) -> f64 {
        *self.coeffs.last().expect("never empty")
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::constant(0.0);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| i as f64 * c).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Quotient and remainder. Leading remainder coefficients below the
    /// relative zero threshold are removed.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        assert!(!divisor.is_zero(), "division by the zero polynomial");
        let n = self.degree();
        let d = divisor.degree();
        if n < d {
            return (Self::constant(0.0), self.clone());
        }
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0.0; n - d + 1];
        for k in (0..=n - d).rev() {
            let q = rem[k + d] / lead;
            quot[k] = q;
            for (j, &c) in divisor.coeffs.iter().enumerate() {
                rem[k + j] -= q * c;
            }
            rem[k + d] = 0.0;
        }
        rem.truncate(d.max(1));
        let quot = Self::new(quot);
        let tol = ZERO_REL_TOL * self.max_abs().max(quot.max_abs() * divisor.max_abs());
        for c in rem.iter_mut() {
            if c.abs() <= tol {
                *c = 0.0;
            }
        }
        (quot, Self::new(rem))
    }

    pub fn rem(&self, divisor: &Self) -> Self {
        self.div_rem(divisor).1
    }
}

/// Sturm chain `q0 = q, q1 = q', q_i = -rem(q_{i-2}, q_{i-1})`, ending at a
/// non-zero constant.
pub fn sturm_sequence(q: &RealPolynomial) -> Result<Vec<RealPolynomial>> {
    let mut seq = vec![q.clone()];
    if q.degree() == 0 {
        return Ok(seq);
    }
    seq.push(q.derivative());
    loop {
        let n = seq.len();
        let last = &seq[n - 1];
        if last.degree() == 0 {
            return Ok(seq);
        }
        let r = seq[n - 2].rem(last);
        if r.is_zero() {
            return Err(Error::NotSquareFree);
        }
        seq.push(r.scale(-1.0));
    }
}

/// Sign changes of the chain at `x`, zeros skipped.
pub fn sign_changes(seq: &[RealPolynomial], x: f64) -> usize {
    let mut count = 0;
    let mut prev = 0.0f64;
    for p in seq {
        let v = p.eval(x);
        if v == 0.0 {
            continue;
        }
        if prev != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        prev = v;
    }
    count
}

/// Number of distinct real roots of `q` in `(c, d]`.
pub fn count_roots(q: &RealPolynomial, c: f64, d: f64) -> Result<usize> {
    if !(c < d) {
        return Err(Error::InvalidParameter { name: "interval", value: d - c, reason: "requires c < d" });
    }
    let seq = sturm_sequence(q)?;
    Ok(sign_changes(&seq, c).saturating_sub(sign_changes(&seq, d)))
}

/// `q / gcd(q, q')`: the same roots, each simple.
pub fn square_free_part(q: &RealPolynomial) -> RealPolynomial {
    if q.degree() == 0 {
        return q.clone();
    }
    let mut a = q.clone();
    let mut b = q.derivative();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    if a.degree() == 0 {
        q.clone()
    } else {
        q.div_rem(&a).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn quadratic_sequence_by_hand() {
        let q = RealPolynomial::new(vec![-0.25, 0.0, 1.0]);
        let seq = sturm_sequence(&q).unwrap();
        assert_eq!(seq.len(), 3);
        assert_eq!(seq[1].coefficients(), &[0.0, 2.0]);
        assert_eq!(seq[2].coefficients(), &[0.25]);
        assert_eq!(count_roots(&q, -1.0, 1.0).unwrap(), 2);
    }

    #[test]
    fn positive_quadratic_ends_negative() {
        let q = RealPolynomial::new(vec![1.0, 0.0, 3.0]);
        let seq = sturm_sequence(&q).unwrap();
        assert_eq!(seq.last().unwrap().coefficients(), &[-1.0]);
        assert_eq!(count_roots(&q, -10.0, 10.0).unwrap(), 0);
    }

    #[test]
    fn half_open_interval() {
        let q = RealPolynomial::new(vec![-0.5, 1.0]);
        assert_eq!(count_roots(&q, 0.5, 1.0).unwrap(), 0);
        assert_eq!(count_roots(&q, 0.4, 0.5).unwrap(), 1);
    }

    #[test]
    fn repeated_root_rejected() {
        let q = RealPolynomial::from_roots(&[0.3, 0.3, -0.2]);
        assert_eq!(sturm_sequence(&q), Err(Error::NotSquareFree));
        let sf = square_free_part(&q);
        assert_eq!(sf.degree(), 2);
        assert_eq!(count_roots(&sf, -1.0, 1.0).unwrap(), 2);
    }

    #[test]
    fn near_degree_drop_keeps_small_remainders() {
        // Six grid roots, a complex pair, and a chain whose divisors grow to
        // 1e7 while the last remainder is about 4e-12.
        let roots = [-1.55, -0.6, -0.15, -0.05, 0.45, 0.9];
        let q = RealPolynomial::new(vec![
            0.001047850506767745,
            0.03175233498968553,
            0.2399513314429679,
            0.44562916607630987,
            -0.9004569190896107,
            -4.006309912293322,
            -1.8628221294289984,
            4.557012139548926,
            2.8294880064526096,
        ]);
        assert_eq!(count_roots(&q, -3.0, 3.0).unwrap(), 6);
        assert_eq!(count_roots(&q, -0.1, 1.0).unwrap(), 3);
        for r in roots {
            assert!(q.eval(r).abs() < 1e-12);
        }
    }

    #[test]
    fn bad_interval() {
        let q = RealPolynomial::new(vec![-0.5, 1.0]);
        assert!(count_roots(&q, 1.0, 1.0).is_err());
    }

    #[test]
    fn convexity_cubic_endpoint_values() {
        let (a, b) = (1.3f64, -0.4f64);
        let q = RealPolynomial::new(vec![a * a + b * b, 6.0 * a * b, 3.0 * (a * a + b * b), 2.0 * a * b]);
        let seq = sturm_sequence(&q).unwrap();
        assert_eq!(seq.len(), 4);
        let close = |x: f64, y: f64| (x - y).abs() <= 1e-12 * y.abs().max(1.0);
        let d2 = (a - b).powi(2);
        assert!(close(seq[0].eval(-1.0), 4.0 * d2));
        assert!(close(seq[1].eval(-1.0), -6.0 * d2));
        assert!(close(seq[2].eval(-1.0), -(a * a - b * b).powi(2) / (a * b)));
        assert!(close(seq[3].eval(-1.0), -6.0 * a * b));
        assert!(close(seq[2].eval(1.0), (a * a - b * b).powi(2) / (a * b)));
    }

    proptest! {
        #[test]
        fn div_rem_reconstructs(
            num in prop::collection::vec(-5.0f64..5.0, 1..8),
            den in prop::collection::vec(-5.0f64..5.0, 1..5),
        ) {
            let n = RealPolynomial::new(num);
            let d = RealPolynomial::new(den);
            prop_assume!(d.leading().abs() > 0.1);
            let (q, r) = n.div_rem(&d);
            for x in [-1.5, -0.3, 0.2, 1.1] {
                let back = q.eval(x) * d.eval(x) + r.eval(x);
                let scale = 1.0 + n.max_abs() + q.max_abs() * d.max_abs();
            prop_assert!((back - n.eval(x)).abs() < 1e-12 * scale * 1.5f64.powi(8));
            }
        }

        #[test]
        fn counts_constructed_roots(
            roots in prop::collection::btree_set(-40i32..40, 1..6),
            c in -45i32..45,
            width in 1i32..90,
        ) {
            // Roots on a 0.05 grid; interval endpoints offset by 0.025.
            let roots: Vec<f64> = roots.iter().map(|&k| k as f64 * 0.05).collect();
            let lo = c as f64 * 0.05 + 0.025;
            let hi = lo + width as f64 * 0.05;
            let q = RealPolynomial::from_roots(&roots);
            let expected = roots.iter().filter(|&&r| r > lo && r <= hi).count();
            prop_assert_eq!(count_roots(&q, lo, hi).unwrap(), expected);
        }
    }
}
