//! Heat-flow stepping: `u_t = a(x) lap u + (1/eps^2)(1 - |u|^2) u` with
//! `a = (1+r^2)^2/4`.
//!
//! Two schemes:
//!
//! * [`HeatStepper::Rk4`] — classic explicit RK4 on the full right-hand
//!   side.  Stability demands `dt <~ 0.35 h^2 / max a`; use
//!   [`stable_heat_dt`] for a safe default.  Best for convergence studies,
//!   where the `dt ~ h^2` coupling is wanted anyway.
//! * [`HeatStepper::SplitAdi`] — Strang splitting with the reaction factor
//!   advanced in closed form and the diffusion advanced by Peaceman-Rachford
//!   ADI (tridiagonal solves per row/column).  Unconditionally stable and
//!   second order; the workhorse for long horizons and large grids, where
//!   the explicit parabolic step-size bound is unaffordable.

use super::grid::{BoundaryKind, ComplexField};
use super::FieldError;
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Modulus guard: evolution aborts with [`FieldError::BlowUp`] beyond this.
pub const BLOWUP_GUARD: f64 = 1.1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeatStepper {
    Rk4,
    SplitAdi,
}

/// Safe explicit step size: `min(0.2 h^2 / max a, 0.5 eps^2)`.
pub fn stable_heat_dt(field: &ComplexField) -> f64 {
    let h = field.grid.spacing();
    let a_max = field.grid.max_conformal_coefficient();
    (0.2 * h * h / a_max).min(0.5 * field.epsilon * field.epsilon)
}

fn reaction_rhs(values: &[Complex64], inv_eps2: f64, out: &mut [Complex64]) {
    for (o, v) in out.iter_mut().zip(values.iter()) {
        *o += (1.0 - v.norm_sqr()) * inv_eps2 * v;
    }
}

/// One explicit RK4 step of the full right-hand side.
fn rk4_step(field: &ComplexField, coeff: &[f64], dt: f64) -> ComplexField {
    let n_total = field.values.len();
    let inv_eps2 = 1.0 / (field.epsilon * field.epsilon);
    let fixed = field.boundary == BoundaryKind::FixedOne;

    let rhs = |f: &ComplexField, out: &mut Vec<Complex64>| {
        f.beltrami(coeff, out);
        reaction_rhs(&f.values, inv_eps2, out);
        if fixed {
            // Boundary ring is pinned: zero its rate.
            let n = f.grid.nodes_per_side();
            for i in 0..n {
                let last = n - 1;
                out[f.grid.idx(i, 0)] = Complex64::new(0.0, 0.0);
                out[f.grid.idx(i, last)] = Complex64::new(0.0, 0.0);
                out[f.grid.idx(0, i)] = Complex64::new(0.0, 0.0);
                out[f.grid.idx(last, i)] = Complex64::new(0.0, 0.0);
            }
        }
    };

    let mut k1 = vec![Complex64::new(0.0, 0.0); n_total];
    rhs(field, &mut k1);

    let mut stage = field.clone();
    for i in 0..n_total {
        stage.values[i] = field.values[i] + 0.5 * dt * k1[i];
    }
    let mut k2 = vec![Complex64::new(0.0, 0.0); n_total];
    rhs(&stage, &mut k2);

    for i in 0..n_total {
        stage.values[i] = field.values[i] + 0.5 * dt * k2[i];
    }
    let mut k3 = vec![Complex64::new(0.0, 0.0); n_total];
    rhs(&stage, &mut k3);

    for i in 0..n_total {
        stage.values[i] = field.values[i] + dt * k3[i];
    }
    let mut k4 = vec![Complex64::new(0.0, 0.0); n_total];
    rhs(&stage, &mut k4);

    let mut out = field.clone();
    for i in 0..n_total {
        out.values[i] =
            field.values[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out.time = field.time + dt;
    out
}

/// Exact reaction relaxation over `tau`: the modulus obeys the logistic law
/// `s(tau) = s0 g / (1 + s0 (g - 1))`, `g = e^{2 tau / eps^2}`, `s = |u|^2`;
/// the phase is untouched.
fn reaction_exact(values: &mut [Complex64], epsilon: f64, tau: f64) {
    let g = math::exp(2.0 * tau / (epsilon * epsilon));
    for v in values.iter_mut() {
        let s = v.norm_sqr();
        if s > 0.0 {
            let factor = math::sqrt(g / (1.0 + s * (g - 1.0)));
            *v *= factor;
        }
    }
}

/// Solves the tridiagonal system
/// `-mu[i] x[i-1] + (1 + 2 mu[i]) x[i] - mu[i] x[i+1] = rhs[i]`
/// with either Dirichlet data folded into `rhs` or mirrored ends.
fn thomas_solve(
    mu: &[f64],
    rhs: &mut [Complex64],
    scratch: &mut [f64],
    mirrored: bool,
) {
    let n = rhs.len();
    debug_assert_eq!(mu.len(), n);
    debug_assert_eq!(scratch.len(), n);

    // Forward sweep.
    let lower = |i: usize| -> f64 {
        if mirrored && i == n - 1 {
            -2.0 * mu[i]
        } else {
            -mu[i]
        }
    };
    let upper = |i: usize| -> f64 {
        if mirrored && i == 0 {
            -2.0 * mu[i]
        } else {
            -mu[i]
        }
    };
    let diag = |i: usize| -> f64 { 1.0 + 2.0 * mu[i] };

    scratch[0] = upper(0) / diag(0);
    rhs[0] /= diag(0);
    for i in 1..n {
        let m = diag(i) - lower(i) * scratch[i - 1];
        scratch[i] = upper(i) / m;
        rhs[i] = (rhs[i] - lower(i) * rhs[i - 1]) / m;
    }
    for i in (0..n - 1).rev() {
        let next = rhs[i + 1];
        rhs[i] -= scratch[i] * next;
    }
}

/// Peaceman-Rachford ADI step for `u_t = a(x) (D_xx + D_yy) u`.
fn adi_diffusion_step(field: &mut ComplexField, coeff: &[f64], dt: f64) {
    let grid = field.grid;
    let n = grid.nodes_per_side();
    let h2 = grid.spacing() * grid.spacing();
    let mirrored = field.boundary == BoundaryKind::Neumann;
    let one = Complex64::new(1.0, 0.0);

    // Index ranges of the unknowns.
    let (lo, hi) = if mirrored { (0, n - 1) } else { (1, n - 2) };
    let m = hi - lo + 1;
    let mut mu = vec![0.0f64; m];
    let mut rhs = vec![Complex64::new(0.0, 0.0); m];
    let mut scratch = vec![0.0f64; m];

    let explicit_dyy = |v: &[Complex64], k: usize, iy: usize| -> Complex64 {
        let below = if iy > 0 { v[k - n] } else { v[k + n] };
        let above = if iy < n - 1 { v[k + n] } else { v[k - n] };
        below + above - 2.0 * v[k]
    };
    let explicit_dxx = |v: &[Complex64], k: usize, ix: usize| -> Complex64 {
        let left = if ix > 0 { v[k - 1] } else { v[k + 1] };
        let right = if ix < n - 1 { v[k + 1] } else { v[k - 1] };
        left + right - 2.0 * v[k]
    };

    // Half step 1: implicit in x, explicit in y.
    let mut star = field.values.clone();
    for iy in lo..=hi {
        for (j, ix) in (lo..=hi).enumerate() {
            let k = grid.idx(ix, iy);
            let m_k = 0.5 * dt * coeff[k] / h2;
            mu[j] = m_k;
            let mut r = field.values[k] + m_k * explicit_dyy(&field.values, k, iy);
            if !mirrored {
                // Dirichlet neighbors in x contribute known values.
                if ix == 1 {
                    r += m_k * one;
                }
                if ix == n - 2 {
                    r += m_k * one;
                }
            }
            rhs[j] = r;
        }
        thomas_solve(&mu, &mut rhs, &mut scratch, mirrored);
        for (j, ix) in (lo..=hi).enumerate() {
            star[grid.idx(ix, iy)] = rhs[j];
        }
    }

    // Half step 2: implicit in y, explicit in x.
    let mut out = star.clone();
    for ix in lo..=hi {
        for (j, iy) in (lo..=hi).enumerate() {
            let k = grid.idx(ix, iy);
            let m_k = 0.5 * dt * coeff[k] / h2;
            mu[j] = m_k;
            let mut r = star[k] + m_k * explicit_dxx(&star, k, ix);
            if !mirrored {
                if iy == 1 {
                    r += m_k * one;
                }
                if iy == n - 2 {
                    r += m_k * one;
                }
            }
            rhs[j] = r;
        }
        thomas_solve(&mu, &mut rhs, &mut scratch, mirrored);
        for (j, iy) in (lo..=hi).enumerate() {
            out[grid.idx(ix, iy)] = rhs[j];
        }
    }

    field.values = out;
}

/// Advances the heat flow by `dt` with the chosen scheme.
pub fn heat_flow_step(
    field: &ComplexField,
    dt: f64,
    stepper: HeatStepper,
) -> Result<ComplexField, FieldError> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(FieldError::InvalidParameter("dt must be positive"));
    }
    let coeff = field.grid.conformal_coefficients();
    let mut out = match stepper {
        HeatStepper::Rk4 => rk4_step(field, &coeff, dt),
        HeatStepper::SplitAdi => {
            let mut f = field.clone();
            reaction_exact(&mut f.values, f.epsilon, 0.5 * dt);
            adi_diffusion_step(&mut f, &coeff, dt);
            reaction_exact(&mut f.values, f.epsilon, 0.5 * dt);
            f.time = field.time + dt;
            f
        }
    };
    if out.boundary == BoundaryKind::FixedOne {
        out.pin_boundary();
    }
    let max_mod = out.max_modulus();
    if !(max_mod <= BLOWUP_GUARD) {
        return Err(FieldError::BlowUp { max_modulus: max_mod });
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxationOutcome {
    pub converged: bool,
    /// Final `max |u_t|` estimate (difference quotient over one step).
    pub rate: f64,
    pub time: f64,
    pub steps: usize,
}

/// Runs the split stepper until `max |u_t| < rate_tol` or `max_time` passes.
pub fn relax_to_stationary(
    field: &ComplexField,
    dt: f64,
    rate_tol: f64,
    max_time: f64,
) -> Result<(ComplexField, RelaxationOutcome), FieldError> {
    let mut current = field.clone();
    let mut steps = 0usize;
    let mut rate = f64::INFINITY;
    while current.time - field.time < max_time {
        let next = heat_flow_step(&current, dt, HeatStepper::SplitAdi)?;
        steps += 1;
        if steps % 8 == 0 || steps < 4 {
            rate = super::quad::max_rate(&current, &next, dt);
            if rate < rate_tol {
                return Ok((
                    next.clone(),
                    RelaxationOutcome { converged: true, rate, time: next.time, steps },
                ));
            }
        }
        current = next;
    }
    Ok((
        current.clone(),
        RelaxationOutcome { converged: false, rate, time: current.time, steps },
    ))
}
