//! Embedded Dormand-Prince 5(4) step with its quartic dense output.
//!
//! The pair provides a 5th-order solution with a 4th-order error estimate and
//! the first-same-as-last property.  Dense output uses the method's standard
//! continuous extension (quartic in the step fraction, local error O(h^5)),
//! so interpolated samples carry the same accuracy class as the step itself.

use crate::math;
use alloc::vec;
use alloc::vec::Vec;

const STAGES: usize = 7;

#[rustfmt::skip]
const A: [[f64; 6]; STAGES] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

/// 5th-order weights (identical to the last row of `A`; FSAL).
const B5: [f64; STAGES] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];

/// 4th-order embedded weights.
const B4: [f64; STAGES] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Continuous-extension weights: stage `s` contributes
/// `sum_j P[s][j] theta^{j+1}` to the interpolant.
#[rustfmt::skip]
const P: [[f64; 4]; STAGES] = [
    [1.0,
     -8048581381.0 / 2820520608.0,
     8663915743.0 / 2820520608.0,
     -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0,
     131558114200.0 / 32700410799.0,
     -68118460800.0 / 10900136933.0,
     87487479700.0 / 32700410799.0],
    [0.0,
     -1754552775.0 / 470086768.0,
     14199869525.0 / 1410260304.0,
     -10690763975.0 / 1880347072.0],
    [0.0,
     127303824393.0 / 49829197408.0,
     -318862633887.0 / 49829197408.0,
     701980252875.0 / 199316789632.0],
    [0.0,
     -282668133.0 / 205662961.0,
     2019193451.0 / 616988883.0,
     -1453857185.0 / 822651844.0],
    [0.0,
     40617522.0 / 29380423.0,
     -110615467.0 / 29380423.0,
     69997945.0 / 29380423.0],
];

/// Polynomial coefficients of one accepted step's interpolant:
/// `y(t0 + theta h) = y0 + h (c[0] theta + c[1] theta^2 + c[2] theta^3 + c[3] theta^4)`.
#[derive(Debug, Clone)]
pub struct DenseCoeffs {
    c: [Vec<f64>; 4],
}

/// Result of one attempted step.
pub enum StepOutcome {
    Accepted {
        y_new: Vec<f64>,
        /// Derivative at the new point (stage 7, reusable as next stage 1).
        f_new: Vec<f64>,
        /// Suggested size for the next step.
        h_next: f64,
        dense: DenseCoeffs,
    },
    Rejected {
        h_retry: f64,
    },
}

pub struct Dopri5 {
    pub rel_tol: f64,
    pub abs_tol: f64,
    scratch: Vec<Vec<f64>>,
}

impl Dopri5 {
    pub fn new(rel_tol: f64, abs_tol: f64, dim: usize) -> Self {
        Dopri5 {
            rel_tol,
            abs_tol,
            scratch: vec![vec![0.0; dim]; STAGES],
        }
    }

    /// Attempts one step of size `h` from `(t, y)` with derivative `f0 = f(t, y)`.
    ///
    /// `rhs` must write the derivative of its first argument into its second
    /// and return `false` when the state is not evaluable (the step is then
    /// rejected with a halved retry size).
    pub fn step<F>(&mut self, y: &[f64], f0: &[f64], h: f64, mut rhs: F) -> StepOutcome
    where
        F: FnMut(&[f64], &mut [f64]) -> bool,
    {
        let dim = y.len();
        let mut stage_y = vec![0.0; dim];
        self.scratch[0].copy_from_slice(f0);

        for s in 1..STAGES {
            for i in 0..dim {
                let mut acc = 0.0;
                for (j, k) in self.scratch.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        acc += a * k[i];
                    }
                }
                stage_y[i] = y[i] + h * acc;
            }
            let stage_k = &mut self.scratch[s];
            if !rhs(&stage_y, stage_k) || stage_k.iter().any(|v| !v.is_finite()) {
                return StepOutcome::Rejected { h_retry: h * 0.5 };
            }
        }

        // Stage 7 was evaluated at y + h * (row 7 of A) = y_new (FSAL).
        let mut y_new = vec![0.0; dim];
        let mut err_norm_sq = 0.0;
        for i in 0..dim {
            let mut acc5 = 0.0;
            let mut err = 0.0;
            for (j, k) in self.scratch.iter().enumerate() {
                acc5 += B5[j] * k[i];
                err += (B5[j] - B4[j]) * k[i];
            }
            y_new[i] = y[i] + h * acc5;
            let scale = self.abs_tol + self.rel_tol * y[i].abs().max(y_new[i].abs());
            let e = h * err / scale;
            err_norm_sq += e * e;
        }
        let err_norm = math::sqrt(err_norm_sq / dim as f64);

        if !err_norm.is_finite() || y_new.iter().any(|v| !v.is_finite()) {
            return StepOutcome::Rejected { h_retry: h * 0.5 };
        }

        let factor = if err_norm == 0.0 {
            5.0
        } else {
            (0.9 * math::powf(err_norm, -0.2)).clamp(0.2, 5.0)
        };

        if err_norm <= 1.0 {
            let mut dense = DenseCoeffs {
                c: [vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]],
            };
            for (s, k) in self.scratch.iter().enumerate() {
                for j in 0..4 {
                    let p = P[s][j];
                    if p != 0.0 {
                        for i in 0..dim {
                            dense.c[j][i] += p * k[i];
                        }
                    }
                }
            }
            StepOutcome::Accepted {
                f_new: self.scratch[6].clone(),
                y_new,
                h_next: h * factor,
                dense,
            }
        } else {
            StepOutcome::Rejected { h_retry: h * factor }
        }
    }
}

/// Dense-output view over one accepted step.
pub struct DenseSegment<'a> {
    pub t0: f64,
    pub t1: f64,
    pub y0: &'a [f64],
    pub dense: &'a DenseCoeffs,
}

impl DenseSegment<'_> {
    pub fn eval(&self, t: f64, out: &mut [f64]) {
        let h = self.t1 - self.t0;
        let theta = if h == 0.0 { 0.0 } else { (t - self.t0) / h };
        let c = &self.dense.c;
        for i in 0..out.len() {
            let poly = theta
                * (c[0][i] + theta * (c[1][i] + theta * (c[2][i] + theta * c[3][i])));
            out[i] = self.y0[i] + h * poly;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The interpolant must hit both endpoints exactly: at theta = 1 its
    /// stage weights collapse to the 5th-order weights.
    #[test]
    fn dense_weights_collapse_to_b5_at_unit_theta() {
        for s in 0..STAGES {
            let row_sum: f64 = P[s].iter().sum();
            assert!(
                (row_sum - B5[s]).abs() < 1e-12,
                "stage {s}: row sum {row_sum} vs b5 {}",
                B5[s]
            );
        }
    }

    fn drive<F>(rhs: F, y0: Vec<f64>, t_end: f64, check_dense: bool) -> Vec<f64>
    where
        F: Fn(&[f64], &mut [f64]) -> bool + Copy,
    {
        let dim = y0.len();
        let mut solver = Dopri5::new(1e-12, 1e-14, dim);
        let mut t = 0.0;
        let mut y = y0;
        let mut f = vec![0.0; dim];
        rhs(&y, &mut f);
        let mut h: f64 = 1e-4;
        while t < t_end {
            h = h.min(t_end - t).min(0.1);
            match solver.step(&y, &f, h, rhs) {
                StepOutcome::Accepted { y_new, f_new, h_next, dense } => {
                    if check_dense {
                        // Interpolant endpoints reproduce the step endpoints.
                        let seg = DenseSegment { t0: t, t1: t + h, y0: &y, dense: &dense };
                        let mut buf = vec![0.0; dim];
                        seg.eval(t, &mut buf);
                        for i in 0..dim {
                            assert!((buf[i] - y[i]).abs() < 1e-13);
                        }
                        seg.eval(t + h, &mut buf);
                        for i in 0..dim {
                            assert!((buf[i] - y_new[i]).abs() < 1e-12 * (1.0 + y_new[i].abs()));
                        }
                        // Midpoint against the exact exponential solution.
                        seg.eval(t + 0.5 * h, &mut buf);
                        let exact = (t + 0.5 * h).exp();
                        assert!(
                            (buf[0] - exact).abs() < 1e-10 * exact,
                            "dense midpoint {} vs {exact}",
                            buf[0]
                        );
                    }
                    t += h;
                    y = y_new;
                    f = f_new;
                    h = h_next;
                }
                StepOutcome::Rejected { h_retry } => h = h_retry,
            }
        }
        y
    }

    /// Integrate y' = y over [0, 1]: endpoint and dense output match e^t.
    #[test]
    fn exponential_growth_and_dense_output() {
        let rhs = |y: &[f64], out: &mut [f64]| {
            out[0] = y[0];
            true
        };
        let y = drive(rhs, vec![1.0], 1.0, true);
        assert!((y[0] - 1.0f64.exp()).abs() < 1e-11, "y(1) = {}", y[0]);
    }

    /// Circular motion retains radius to tolerance over many revolutions.
    #[test]
    fn harmonic_oscillator_accuracy() {
        let rhs = |y: &[f64], out: &mut [f64]| {
            out[0] = y[1];
            out[1] = -y[0];
            true
        };
        let y = drive(rhs, vec![1.0, 0.0], 20.0 * core::f64::consts::PI, false);
        assert!((y[0] - 1.0).abs() < 1e-8, "cos error {}", (y[0] - 1.0).abs());
        assert!(y[1].abs() < 1e-8, "sin error {}", y[1].abs());
    }
}
