//! Energies, weighted energies, and first moments by trapezoidal quadrature.
//!
//! All integrals are over the chart square with the conformal weight
//! `e^{2f} = 4/(1+r^2)^2`; the Dirichlet term needs no weight (conformal
//! invariance in two dimensions).  The sphere coordinates pull back as
//!
//! ```text
//! x1 = 2 p1 / (1 + r^2),  x2 = 2 p2 / (1 + r^2),  x3 = (r^2 - 1)/(1 + r^2).
//! ```
//!
//! Quadrature ranges only over the chart square; what the square misses of
//! the sphere (a cap around the north pole of area O(1/L^2)) is the domain
//! truncation error every report carries.  With the `u = 1` far field the
//! integrands vanish there and the truncation is immaterial.

use super::grid::ComplexField;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Total and weighted Ginzburg-Landau energies of a field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    /// `E = int |grad_g u|^2/2 + V(u) dv_g` with `V = (1-|u|^2)^2/(4 eps^2)`.
    pub total: f64,
    /// `F_i = int e(u) (1 - x_i)/2 dv_g` for `i = 1, 2, 3`.
    pub weighted: [f64; 3],
    /// First potential moments `int x_i V(u) dv_g`.
    pub moments: [f64; 3],
    /// `int (1 - |u|^2)^2 dv_g` (no `eps` factor).
    pub mass_defect: f64,
}

/// Trapezoidal node weight (1/2 on edges, 1/4 at corners, 1 inside).
#[inline]
fn trapezoid_weight(i: usize, n_last: usize) -> f64 {
    if i == 0 || i == n_last {
        0.5
    } else {
        1.0
    }
}

/// Squared modulus of the discrete gradient at a node: centered differences
/// inside, one-sided on the boundary ring.
fn grad_norm_sq(field: &ComplexField, ix: usize, iy: usize) -> f64 {
    let grid = &field.grid;
    let n = grid.nodes_per_side();
    let h = grid.spacing();
    let v = &field.values;
    let k = grid.idx(ix, iy);
    let dx = if ix == 0 {
        (v[k + 1] - v[k]) / h
    } else if ix == n - 1 {
        (v[k] - v[k - 1]) / h
    } else {
        (v[k + 1] - v[k - 1]) / (2.0 * h)
    };
    let dy = if iy == 0 {
        (v[k + n] - v[k]) / h
    } else if iy == n - 1 {
        (v[k] - v[k - n]) / h
    } else {
        (v[k + n] - v[k - n]) / (2.0 * h)
    };
    dx.norm_sqr() + dy.norm_sqr()
}

/// Computes the energy report of a field.
pub fn energy(field: &ComplexField) -> EnergyReport {
    let grid = &field.grid;
    let n = grid.nodes_per_side();
    let h = grid.spacing();
    let inv_4eps2 = 1.0 / (4.0 * field.epsilon * field.epsilon);

    let mut total = 0.0;
    let mut weighted = [0.0f64; 3];
    let mut moments = [0.0f64; 3];
    let mut mass_defect = 0.0;

    for iy in 0..n {
        let y = grid.coord(iy);
        let wy = trapezoid_weight(iy, n - 1);
        for ix in 0..n {
            let x = grid.coord(ix);
            let w_quad = wy * trapezoid_weight(ix, n - 1);
            let r2 = x * x + y * y;
            let denom = 1.0 + r2;
            let w_conf = 4.0 / (denom * denom);
            let coords = [2.0 * x / denom, 2.0 * y / denom, (r2 - 1.0) / denom];

            let v = field.values[grid.idx(ix, iy)];
            let defect = 1.0 - v.norm_sqr();
            let potential = defect * defect * inv_4eps2;
            let density = 0.5 * grad_norm_sq(field, ix, iy) + w_conf * potential;

            total += w_quad * density;
            mass_defect += w_quad * w_conf * defect * defect;
            for i in 0..3 {
                weighted[i] += w_quad * density * 0.5 * (1.0 - coords[i]);
                moments[i] += w_quad * w_conf * coords[i] * potential;
            }
        }
    }

    let cell = h * h;
    EnergyReport {
        total: total * cell,
        weighted: [weighted[0] * cell, weighted[1] * cell, weighted[2] * cell],
        moments: [moments[0] * cell, moments[1] * cell, moments[2] * cell],
        mass_defect: mass_defect * cell,
    }
}

/// Residuals of the weighted-energy dissipation identity
///
/// ```text
/// d/dt F_i(u) = - int ((1 - x_i)/2) |u_t|^2 + x_i V(u) dv_g
/// ```
///
/// for one (unrescaled) heat-flow step from `before` to `after` over `dt`:
/// `u_t` is the difference quotient and `V` is evaluated on the midpoint
/// field.  The residual vanishes at the scheme's order as `h, dt -> 0`.
pub fn weighted_identity_residual(
    before: &ComplexField,
    after: &ComplexField,
    dt: f64,
) -> [f64; 3] {
    assert_eq!(before.values.len(), after.values.len(), "grid mismatch");
    let grid = &before.grid;
    let n = grid.nodes_per_side();
    let h = grid.spacing();
    let inv_4eps2 = 1.0 / (4.0 * before.epsilon * before.epsilon);

    let f_before = energy(before).weighted;
    let f_after = energy(after).weighted;

    // Midpoint field for the potential, difference quotient for u_t.
    let mut correction = [0.0f64; 3];
    for iy in 0..n {
        let y = grid.coord(iy);
        let wy = trapezoid_weight(iy, n - 1);
        for ix in 0..n {
            let x = grid.coord(ix);
            let w_quad = wy * trapezoid_weight(ix, n - 1);
            let r2 = x * x + y * y;
            let denom = 1.0 + r2;
            let w_conf = 4.0 / (denom * denom);
            let coords = [2.0 * x / denom, 2.0 * y / denom, (r2 - 1.0) / denom];

            let k = grid.idx(ix, iy);
            let u_t = (after.values[k] - before.values[k]) / dt;
            let mid = 0.5 * (after.values[k] + before.values[k]);
            let defect = 1.0 - mid.norm_sqr();
            let potential = defect * defect * inv_4eps2;

            for i in 0..3 {
                correction[i] += w_quad
                    * w_conf
                    * (0.5 * (1.0 - coords[i]) * u_t.norm_sqr() + coords[i] * potential);
            }
        }
    }

    let cell = h * h;
    let mut residual = [0.0f64; 3];
    for i in 0..3 {
        residual[i] = (f_after[i] - f_before[i]) / dt + correction[i] * cell;
    }
    residual
}

/// Interior nodes' `|u_t|` estimate from two consecutive fields.
pub fn max_rate(before: &ComplexField, after: &ComplexField, dt: f64) -> f64 {
    let mut best = 0.0f64;
    for (a, b) in before.values.iter().zip(after.values.iter()) {
        best = best.max((b - a).norm_sqr());
    }
    crate::math::sqrt(best) / dt
}

#[allow(dead_code)]
pub(super) fn values_snapshot(field: &ComplexField) -> Vec<Complex64> {
    field.values.clone()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::grid::{BoundaryKind, ChartGrid};
    use core::f64::consts::PI;

    #[test]
    fn unit_field_has_zero_energy() {
        let grid = ChartGrid::new(4.0, 64).unwrap();
        let f = ComplexField::constant(grid, 0.2, BoundaryKind::FixedOne, Complex64::new(1.0, 0.0))
            .unwrap();
        let r = energy(&f);
        assert_eq!(r.total, 0.0);
        assert_eq!(r.weighted, [0.0; 3]);
        assert_eq!(r.moments, [0.0; 3]);
        assert_eq!(r.mass_defect, 0.0);
    }

    /// For u = 0: V = 1/(4 eps^2) everywhere, so on the full sphere
    /// E = pi/eps^2, F_i = pi/(2 eps^2), moments = 0.  The chart square
    /// misses the north cap, whose area 4 pi/(1 + L^2)-ish bounds the error.
    #[test]
    fn zero_field_energies_to_truncation_order() {
        for (l, n) in [(6.0, 192usize), (12.0, 384usize)] {
            let grid = ChartGrid::new(l, n).unwrap();
            let eps = 0.2;
            let f = ComplexField::constant(grid, eps, BoundaryKind::Neumann, Complex64::new(0.0, 0.0))
                .unwrap();
            let r = energy(&f);
            let cap = 4.0 * PI / (1.0 + l * l); // missing-cap area bound
            let e_exact = PI / (eps * eps);
            let tol = 1.2 * cap / (4.0 * eps * eps) + 1e-6;
            assert!(
                (r.total - e_exact).abs() < tol,
                "L={l}: E={} vs {e_exact} (tol {tol})",
                r.total
            );
            for i in 0..3 {
                assert!(
                    (r.weighted[i] - e_exact / 2.0).abs() < tol,
                    "L={l}: F{i}={} vs {}",
                    r.weighted[i],
                    e_exact / 2.0
                );
                assert!(r.moments[i].abs() < tol, "L={l}: m{i}={}", r.moments[i]);
            }
            // mass defect = area / 1 (integrand 1) up to the cap
            assert!((r.mass_defect - 4.0 * PI).abs() < 1.2 * cap + 1e-6);
        }
    }

    #[test]
    fn weighted_sum_bounded_by_energy() {
        // sum_i (1 - x_i)/2 <= (3 + sqrt(3))/2 pointwise.
        let grid = ChartGrid::new(3.0, 96).unwrap();
        let spec = crate::field::prepare::WellPreparedSpec::new(grid, 0.15);
        let f = crate::field::prepare::build_well_prepared(
            &[crate::geometry::ChartPoint::new(0.6, 0.2), crate::geometry::ChartPoint::new(-0.5, -0.3)],
            &[1, -1],
            &spec,
        )
        .unwrap();
        let r = energy(&f);
        assert!(r.total > 0.0);
        for i in 0..3 {
            assert!(r.weighted[i] >= 0.0);
        }
        let bound = (3.0 + 3.0f64.sqrt()) / 2.0 * r.total + 1e-12;
        assert!(r.weighted.iter().sum::<f64>() <= bound);
    }

    #[test]
    fn rotation_moves_planar_moments() {
        // Rotating the vortex positions about the x3-axis leaves E and F3
        // and rotates the (m1, m2) moment vector.
        let grid = ChartGrid::new(3.0, 128).unwrap();
        let eps = 0.15;
        let spec = crate::field::prepare::WellPreparedSpec::new(grid, eps);
        let p = [crate::geometry::ChartPoint::new(0.8, 0.0), crate::geometry::ChartPoint::new(-0.4, 0.0)];
        let f0 = crate::field::prepare::build_well_prepared(&p, &[1, -1], &spec).unwrap();
        let phi = 0.7f64;
        let (s, c) = phi.sin_cos();
        let rotated = [
            crate::geometry::ChartPoint::new(c * p[0].p1, s * p[0].p1),
            crate::geometry::ChartPoint::new(c * p[1].p1, s * p[1].p1),
        ];
        let f1 = crate::field::prepare::build_well_prepared(&rotated, &[1, -1], &spec).unwrap();
        let r0 = energy(&f0);
        let r1 = energy(&f1);
        let scale = r0.total;
        assert!((r0.total - r1.total).abs() < 2e-3 * scale, "{} vs {}", r0.total, r1.total);
        assert!((r0.weighted[2] - r1.weighted[2]).abs() < 2e-3 * scale);
        let expect_m1 = c * r0.moments[0] - s * r0.moments[1];
        let expect_m2 = s * r0.moments[0] + c * r0.moments[1];
        let m_scale = (r0.moments[0].powi(2) + r0.moments[1].powi(2)).sqrt().max(1e-3);
        assert!((r1.moments[0] - expect_m1).abs() < 2e-2 * m_scale + 1e-4);
        assert!((r1.moments[1] - expect_m2).abs() < 2e-2 * m_scale + 1e-4);
        assert!((r0.moments[2] - r1.moments[2]).abs() < 2e-3 * scale);
    }

    #[test]
    fn identity_residual_vanishes_for_stationary_unit_field() {
        let grid = ChartGrid::new(3.0, 32).unwrap();
        let f = ComplexField::constant(grid, 0.3, BoundaryKind::FixedOne, Complex64::new(1.0, 0.0))
            .unwrap();
        let r = weighted_identity_residual(&f, &f, 1e-3);
        assert_eq!(r, [0.0; 3]);
    }
}
