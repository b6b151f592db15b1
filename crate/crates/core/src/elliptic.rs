//! Complete elliptic integral of the first kind.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// `K(m) = int_0^1 ds / sqrt((1 - s^2)(1 - m s^2))` for `0 <= m < 1`, by the
/// arithmetic-geometric mean `K = pi / (2 AGM(1, sqrt(1 - m)))`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::OutOfDomain(m));
    }
    let mut a = 1.0f64;
    let mut g = (1.0 - m).sqrt();
    for _ in 0..64 {
        if (a - g).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let next = 0.5 * (a + g);
        g = (a * g).sqrt();
        a = next;
    }
    Ok(FRAC_PI_2 / a)
}
