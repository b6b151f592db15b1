//! Dormand–Prince 5(4) integrator with PI step-size control and the
//! fourth-order continuous extension for dense output.

use std::ops::ControlFlow;

use crate::error::Error;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];

const A21: f64 = 0.2;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

// PI controller constants
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-9, atol: 1e-12, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
    /// Largest normalized error estimate among accepted steps.
    pub max_error: f64,
}

/// Continuous extension over one accepted step.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    cont: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> [f64; N] {
        let s = (t - self.t0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        std::array::from_fn(|i| c[0][i] + s * (c[1][i] + s1 * (c[2][i] + s * (c[3][i] + s1 * c[4][i]))))
    }

    /// End-of-step value.
    pub fn end(&self) -> [f64; N] {
        std::array::from_fn(|i| self.cont[0][i] + self.cont[1][i])
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    std::array::from_fn(|i| {
        let mut acc = 0.0;
        for (w, k) in terms {
            acc += w * k[i];
        }
        y[i] + h * acc
    })
}

fn error_norm<const N: usize>(err: &[f64; N], y0: &[f64; N], y1: &[f64; N], tol: &Tolerances) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        let sc = tol.atol + tol.rtol * y0[i].abs().max(y1[i].abs());
        sum += (err[i] / sc).powi(2);
    }
    (sum / N as f64).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end`, handing every accepted
/// step to `on_step`. The callback may stop the integration early by
/// returning `ControlFlow::Break`.
///
/// On a right-hand-side failure the error is returned together with the
/// time of the last accepted step.
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    tol: &Tolerances,
    mut on_step: S,
) -> Result<StepStats, (StepStats, f64, Error)>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
    S: FnMut(&DenseStep<N>) -> ControlFlow<()>,
{
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = match f(t, &y) {
        Ok(k) => k,
        Err(e) => return Err((stats, t, e)),
    };
    stats.evaluations += 1;

    let span = t_end - t0;
    let mut h = match initial_step(&mut f, t, &y, &k1, span, tol) {
        Ok(h) => h,
        Err(e) => return Err((stats, t, e)),
    };
    stats.evaluations += 1;
    let mut err_old = 1e-4f64;
    let mut last_rejected = false;

    macro_rules! eval {
        ($t:expr, $y:expr) => {
            match f($t, &$y) {
                Ok(k) => {
                    stats.evaluations += 1;
                    k
                }
                Err(e) => return Err((stats, t, e)),
            }
        };
    }

    while t < t_end {
        if stats.accepted + stats.rejected >= tol.max_steps {
            return Err((stats, t, Error::TooManySteps(t)));
        }
        if h < 1e-14 * t.abs().max(span.abs()) {
            return Err((stats, t, Error::StepSizeUnderflow { t, h }));
        }
        if t + 1.01 * h >= t_end {
            h = t_end - t;
        }

        let k2 = eval!(t + C[1] * h, axpy(&y, h, &[(A21, &k1)]));
        let k3 = eval!(t + C[2] * h, axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = eval!(t + C[3] * h, axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = eval!(t + C[4] * h, axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = eval!(t + h, axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let y_new = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let k7 = eval!(t + h, y_new);

        let err_vec: [f64; N] =
            std::array::from_fn(|i| h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]));
        let err = error_norm(&err_vec, &y, &y_new, tol);
        if !err.is_finite() {
            h *= FAC_MIN;
            stats.rejected += 1;
            last_rejected = true;
            continue;
        }

        let fac = err.powf(EXPO) / err_old.powf(BETA);
        let fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
        let mut h_new = h / fac;

        if err <= 1.0 {
            err_old = err.max(1e-4);
            stats.accepted += 1;
            stats.max_error = stats.max_error.max(err);

            let ydiff: [f64; N] = std::array::from_fn(|i| y_new[i] - y[i]);
            let bspl: [f64; N] = std::array::from_fn(|i| h * k1[i] - ydiff[i]);
            let dense = DenseStep {
                t0: t,
                h,
                cont: [
                    y,
                    ydiff,
                    bspl,
                    std::array::from_fn(|i| ydiff[i] - h * k7[i] - bspl[i]),
                    std::array::from_fn(|i| {
                        h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i])
                    }),
                ],
            };

            t = if t + h >= t_end { t_end } else { t + h };
            y = y_new;
            k1 = k7;

            if let ControlFlow::Break(()) = on_step(&dense) {
                break;
            }
            if last_rejected {
                h_new = h_new.min(h);
            }
            last_rejected = false;
        } else {
            h_new = h / (err.powf(EXPO) / SAFETY).min(1.0 / FAC_MIN);
            stats.rejected += 1;
            last_rejected = true;
        }
        h = h_new;
    }
    Ok(stats)
}

fn initial_step<const N: usize, F>(
    f: &mut F,
    t: f64,
    y: &[f64; N],
    k1: &[f64; N],
    span: f64,
    tol: &Tolerances,
) -> Result<f64, Error>
where
    F: FnMut(f64, &[f64; N]) -> Result<[f64; N], Error>,
{
    let sc: [f64; N] = std::array::from_fn(|i| tol.atol + tol.rtol * y[i].abs());
    let norm = |v: &[f64; N]| (v.iter().zip(&sc).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / N as f64).sqrt();
    let d0 = norm(y);
    let d1 = norm(k1);
    let h0 = if d0 < 1e-10 || d1 < 1e-10 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span.abs());
    let y1 = axpy(y, h0, &[(1.0, k1)]);
    let k2 = f(t + h0, &y1)?;
    let diff: [f64; N] = std::array::from_fn(|i| k2[i] - k1[i]);
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 { (h0 * 1e-3).max(1e-6) } else { (0.01 / d1.max(d2)).powf(0.2) };
    Ok((100.0 * h0).min(h1).min(span.abs()))
}
