//! Chart grid and the discretized complex order parameter.

use super::FieldError;
use crate::geometry::ChartPoint;
use crate::math;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Behaviour of the chart-boundary ring.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// Far field pinned to `u = 1` (the physical choice: with net degree zero
    /// and vortices near the south pole, the true field is near-constant
    /// toward the north pole).
    FixedOne,
    /// Mirror (zero normal derivative).  Keeps spatially constant data
    /// exactly constant, which the scalar-ODE and phase-rotation oracles need.
    Neumann,
}

/// Uniform grid on `[-L, L]^2`: `resolution` cells per side, spacing
/// `h = 2L/resolution`, and `resolution + 1` sample points per side so both
/// boundaries carry nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartGrid {
    pub half_width: f64,
    pub resolution: usize,
}

impl ChartGrid {
    pub fn new(half_width: f64, resolution: usize) -> Result<Self, FieldError> {
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(FieldError::InvalidParameter("half_width must be positive"));
        }
        if resolution < 16 || resolution % 2 != 0 {
            return Err(FieldError::InvalidParameter("resolution must be even and >= 16"));
        }
        Ok(ChartGrid { half_width, resolution })
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.resolution as f64
    }

    /// Nodes per side (`resolution + 1`).
    #[inline]
    pub fn nodes_per_side(&self) -> usize {
        self.resolution + 1
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.nodes_per_side() * self.nodes_per_side()
    }

    #[inline]
    pub fn coord(&self, index: usize) -> f64 {
        -self.half_width + index as f64 * self.spacing()
    }

    #[inline]
    pub fn point(&self, ix: usize, iy: usize) -> ChartPoint {
        ChartPoint::new(self.coord(ix), self.coord(iy))
    }

    #[inline]
    pub fn idx(&self, ix: usize, iy: usize) -> usize {
        iy * self.nodes_per_side() + ix
    }

    /// Conformal coefficient `a = (1+r^2)^2/4` at every node.
    pub fn conformal_coefficients(&self) -> Vec<f64> {
        let n = self.nodes_per_side();
        let mut out = Vec::with_capacity(n * n);
        for iy in 0..n {
            let y = self.coord(iy);
            for ix in 0..n {
                let x = self.coord(ix);
                let d = 1.0 + x * x + y * y;
                out.push(d * d / 4.0);
            }
        }
        out
    }

    /// Largest conformal coefficient on the grid (attained at the corners).
    pub fn max_conformal_coefficient(&self) -> f64 {
        let r2 = 2.0 * self.half_width * self.half_width;
        let d = 1.0 + r2;
        d * d / 4.0
    }
}

/// Discretized complex order parameter with its grid, `eps`, and clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexField {
    pub grid: ChartGrid,
    pub epsilon: f64,
    pub time: f64,
    pub boundary: BoundaryKind,
    pub values: Vec<Complex64>,
}

impl ComplexField {
    /// Uniform field `u = c` everywhere.
    pub fn constant(
        grid: ChartGrid,
        epsilon: f64,
        boundary: BoundaryKind,
        c: Complex64,
    ) -> Result<Self, FieldError> {
        Self::from_fn(grid, epsilon, boundary, |_| c)
    }

    /// Samples `f` at every node.  The boundary ring is overwritten with `1`
    /// when the boundary kind is [`BoundaryKind::FixedOne`].
    pub fn from_fn<F>(
        grid: ChartGrid,
        epsilon: f64,
        boundary: BoundaryKind,
        mut f: F,
    ) -> Result<Self, FieldError>
    where
        F: FnMut(ChartPoint) -> Complex64,
    {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(FieldError::InvalidParameter("epsilon must be positive"));
        }
        let n = grid.nodes_per_side();
        let mut values = vec![Complex64::new(0.0, 0.0); n * n];
        for iy in 0..n {
            for ix in 0..n {
                values[grid.idx(ix, iy)] = f(grid.point(ix, iy));
            }
        }
        let mut field = ComplexField { grid, epsilon, time: 0.0, boundary, values };
        if boundary == BoundaryKind::FixedOne {
            field.pin_boundary();
        }
        Ok(field)
    }

    pub(super) fn pin_boundary(&mut self) {
        let n = self.grid.nodes_per_side();
        let one = Complex64::new(1.0, 0.0);
        for i in 0..n {
            let last = n - 1;
            self.values[self.grid.idx(i, 0)] = one;
            self.values[self.grid.idx(i, last)] = one;
            self.values[self.grid.idx(0, i)] = one;
            self.values[self.grid.idx(last, i)] = one;
        }
    }

    pub fn max_modulus(&self) -> f64 {
        math::sqrt(self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max))
    }

    /// Largest pointwise modulus of the difference to another field.
    pub fn max_difference(&self, other: &ComplexField) -> f64 {
        math::sqrt(
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| (a - b).norm_sqr())
                .fold(0.0, f64::max),
        )
    }

    /// Five-point Laplacian times the conformal coefficient, i.e. the
    /// Laplace-Beltrami term of the chart PDE, written into `out` (zero on a
    /// fixed boundary ring, mirrored across a Neumann one).
    pub(super) fn beltrami(&self, coeff: &[f64], out: &mut [Complex64]) {
        let n = self.grid.nodes_per_side();
        let h2 = self.grid.spacing() * self.grid.spacing();
        let v = &self.values;
        let mirror = self.boundary == BoundaryKind::Neumann;
        for iy in 0..n {
            for ix in 0..n {
                let k = iy * n + ix;
                let interior = ix > 0 && ix < n - 1 && iy > 0 && iy < n - 1;
                if !interior && !mirror {
                    out[k] = Complex64::new(0.0, 0.0);
                    continue;
                }
                let left = if ix > 0 { v[k - 1] } else { v[k + 1] };
                let right = if ix < n - 1 { v[k + 1] } else { v[k - 1] };
                let down = if iy > 0 { v[k - n] } else { v[k + n] };
                let up = if iy < n - 1 { v[k + n] } else { v[k - n] };
                let lap = (left + right + up + down - 4.0 * v[k]) / h2;
                out[k] = coeff[k] * lap;
            }
        }
    }
}
