//! Stereographic chart of the unit 2-sphere and its conformal metric.
//!
//! The chart maps the south pole `(0, 0, -1)` to the origin and the north
//! pole to infinity.  A sphere point `P = (x1, x2, x3)` and its chart image
//! `p` are related by
//!
//! ```text
//! p = (x1, x2) / (1 - x3),        P = (2 p, |p|^2 - 1) / (1 + |p|^2),
//! ```
//!
//! and the round metric pulls back to `e^{2f} (dp1^2 + dp2^2)` with
//! `f(p) = ln(2 / (1 + |p|^2))`.  All quantities are dimensionless; only the
//! unit sphere is supported.

use crate::math;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

/// Chart radius beyond which a point is considered to have escaped to the
/// north pole (`x3 > 1 - 2/(1 + r^2)` crosses the pole cutoff there).
pub const POLE_CHART_RADIUS: f64 = 4.5e4;

/// `x3` cutoff below the north pole; points at or above it are rejected by
/// the chart.  Keeps conformal factors representable in `f64`.
pub const POLE_CUTOFF: f64 = 1e-9;

/// Errors from chart operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryError {
    /// Point too close to the north pole for the south-pole chart.
    PoleSingularity,
}

impl fmt::Display for GeometryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeometryError::PoleSingularity => {
                write!(f, "point too close to the north pole for this chart")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GeometryError {}

/// A point on the unit sphere, stored as an embedding 3-vector.
///
/// The constructor renormalizes, so `x1^2 + x2^2 + x3^2 = 1` holds to within
/// roundoff on every value of this type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl SpherePoint {
    /// Builds a sphere point by normalizing `(x1, x2, x3)`.
    ///
    /// Panics if the vector is too short to normalize (norm below `1e-12`);
    /// such inputs are always programming errors in this crate.
    pub fn new(x1: f64, x2: f64, x3: f64) -> Self {
        let n = math::sqrt(x1 * x1 + x2 * x2 + x3 * x3);
        assert!(n > 1e-12, "cannot normalize near-zero vector to the sphere");
        SpherePoint {
            x1: x1 / n,
            x2: x2 / n,
            x3: x3 / n,
        }
    }

    pub const SOUTH_POLE: SpherePoint = SpherePoint {
        x1: 0.0,
        x2: 0.0,
        x3: -1.0,
    };

    pub const NORTH_POLE: SpherePoint = SpherePoint {
        x1: 0.0,
        x2: 0.0,
        x3: 1.0,
    };

    pub fn dot(&self, other: &SpherePoint) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    /// Euclidean distance in the ambient R^3 to another point (not geodesic).
    pub fn chordal_distance(&self, other: &SpherePoint) -> f64 {
        chordal_distance(self, other)
    }
}

/// A point in the stereographic chart (south pole at the origin).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint {
    pub p1: f64,
    pub p2: f64,
}

impl ChartPoint {
    pub fn new(p1: f64, p2: f64) -> Self {
        ChartPoint { p1, p2 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.p1 * self.p1 + self.p2 * self.p2
    }

    pub fn norm(&self) -> f64 {
        math::hypot(self.p1, self.p2)
    }

    pub fn distance(&self, other: &ChartPoint) -> f64 {
        math::hypot(self.p1 - other.p1, self.p2 - other.p2)
    }

    pub fn to_vec2(&self) -> Vec2 {
        Vec2::new(self.p1, self.p2)
    }

    pub fn offset(&self, v: Vec2) -> ChartPoint {
        ChartPoint::new(self.p1 + v.x, self.p2 + v.y)
    }
}

/// A plane vector (chart tangent vector, velocity, gradient, ...).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(&self, other: &Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(&self) -> f64 {
        math::hypot(self.x, self.y)
    }

    /// 90-degree rotation `J v = (v_y, -v_x)` (the skew-gradient convention).
    pub fn perp(&self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Projects a sphere point into the chart: `p = (x1, x2) / (1 - x3)`.
///
/// Fails with [`GeometryError::PoleSingularity`] when `x3 >= 1 - 1e-9`.
pub fn stereo_project(point: &SpherePoint) -> Result<ChartPoint, GeometryError> {
    if point.x3 >= 1.0 - POLE_CUTOFF {
        return Err(GeometryError::PoleSingularity);
    }
    let s = 1.0 - point.x3;
    Ok(ChartPoint::new(point.x1 / s, point.x2 / s))
}

/// Lifts a chart point back to the sphere: `P = (2p, |p|^2 - 1) / (1 + |p|^2)`.
///
/// The result lies on the unit sphere by construction.
pub fn stereo_unproject(p: &ChartPoint) -> SpherePoint {
    let r2 = p.norm_sq();
    let d = 1.0 + r2;
    SpherePoint {
        x1: 2.0 * p.p1 / d,
        x2: 2.0 * p.p2 / d,
        x3: (r2 - 1.0) / d,
    }
}

/// The conformal exponent `f(p) = ln(2 / (1 + |p|^2))`, so that the round
/// metric is `e^{2f}` times the flat chart metric.
pub fn conformal_exponent(p: &ChartPoint) -> f64 {
    math::ln(2.0 / (1.0 + p.norm_sq()))
}

/// The metric weight `e^{2f(p)} = 4 / (1 + |p|^2)^2`.
pub fn conformal_weight(p: &ChartPoint) -> f64 {
    let d = 1.0 + p.norm_sq();
    4.0 / (d * d)
}

/// Euclidean gradient of the conformal exponent, `grad f = -2p / (1 + |p|^2)`.
pub fn conformal_exponent_gradient(p: &ChartPoint) -> Vec2 {
    let d = 1.0 + p.norm_sq();
    Vec2::new(-2.0 * p.p1 / d, -2.0 * p.p2 / d)
}

/// Euclidean distance in R^3 between two sphere points; values lie in `[0, 2]`.
pub fn chordal_distance(a: &SpherePoint, b: &SpherePoint) -> f64 {
    let dx = a.x1 - b.x1;
    let dy = a.x2 - b.x2;
    let dz = a.x3 - b.x3;
    math::sqrt(dx * dx + dy * dy + dz * dz)
}

/// Chordal distance between the sphere images of two chart points:
/// `|P - Q| = 2 |p - q| / sqrt((1 + |p|^2)(1 + |q|^2))`.
pub fn chordal_distance_chart(p: &ChartPoint, q: &ChartPoint) -> f64 {
    2.0 * p.distance(q) / math::sqrt((1.0 + p.norm_sq()) * (1.0 + q.norm_sq()))
}

/// Converts a Euclidean chart gradient into the manifold gradient at `p`:
/// multiplies by `e^{-2f(p)} = (1 + |p|^2)^2 / 4`.
pub fn metric_gradient_from_euclidean(p: &ChartPoint, v: Vec2) -> Vec2 {
    let d = 1.0 + p.norm_sq();
    v * (d * d / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn project_south_pole_to_origin() {
        let p = stereo_project(&SpherePoint::SOUTH_POLE).unwrap();
        assert_eq!(p, ChartPoint::new(0.0, 0.0));
    }

    #[test]
    fn project_equator_to_unit_circle() {
        let p = stereo_project(&SpherePoint::new(1.0, 0.0, 0.0)).unwrap();
        assert!(close(p.p1, 1.0, 1e-15) && close(p.p2, 0.0, 1e-15));
    }

    #[test]
    fn project_north_pole_fails() {
        assert_eq!(
            stereo_project(&SpherePoint::NORTH_POLE),
            Err(GeometryError::PoleSingularity)
        );
    }

    #[test]
    fn unproject_examples() {
        let s = stereo_unproject(&ChartPoint::new(0.0, 0.0));
        assert_eq!(s, SpherePoint::SOUTH_POLE);

        let e = stereo_unproject(&ChartPoint::new(1.0, 0.0));
        assert!(close(e.x1, 1.0, 1e-15) && close(e.x2, 0.0, 1e-15) && close(e.x3, 0.0, 1e-15));

        // r^2 = 9: (2*3/10, 0, 8/10)
        let q = stereo_unproject(&ChartPoint::new(3.0, 0.0));
        assert!(close(q.x1, 0.6, 1e-15) && close(q.x3, 0.8, 1e-15));
    }

    #[test]
    fn conformal_exponent_examples() {
        assert!(close(
            conformal_exponent(&ChartPoint::new(0.0, 0.0)),
            2.0_f64.ln(),
            1e-15
        ));
        assert!(close(conformal_exponent(&ChartPoint::new(1.0, 0.0)), 0.0, 1e-15));
        assert!(close(
            conformal_exponent(&ChartPoint::new(3.0, 0.0)),
            -(5.0_f64.ln()),
            1e-15
        ));
    }

    #[test]
    fn chordal_distance_examples() {
        let a = SpherePoint::new(1.0, 0.0, 0.0);
        let b = SpherePoint::new(0.0, 1.0, 0.0);
        assert_eq!(chordal_distance(&a, &a), 0.0);
        assert!(close(chordal_distance(&a, &b), 2.0_f64.sqrt(), 1e-15));
        let anti = SpherePoint::new(-1.0, 0.0, 0.0);
        assert!(close(chordal_distance(&a, &anti), 2.0, 1e-15));
    }

    #[test]
    fn metric_gradient_examples() {
        let g = metric_gradient_from_euclidean(&ChartPoint::new(0.0, 0.0), Vec2::new(1.0, 0.0));
        assert!(close(g.x, 0.25, 1e-15) && g.y == 0.0);
        let g = metric_gradient_from_euclidean(&ChartPoint::new(1.0, 0.0), Vec2::new(0.0, 1.0));
        assert!(close(g.y, 1.0, 1e-15) && g.x == 0.0);
        let g = metric_gradient_from_euclidean(&ChartPoint::new(2.0, -1.0), Vec2::ZERO);
        assert_eq!(g, Vec2::ZERO);
    }

    /// Trapezoidal quadrature of e^{2f} over [-R, R]^2 approaches the sphere
    /// area 4*pi as the domain grows (the defect is the area of the missing
    /// polar cap, O(1/R^2)).
    #[test]
    fn conformal_area_converges_to_sphere_area() {
        let four_pi = 4.0 * core::f64::consts::PI;
        let mut last_defect = f64::INFINITY;
        for &r in &[10.0, 30.0, 90.0] {
            let n = 1200usize;
            let h = 2.0 * r / n as f64;
            let mut total = 0.0;
            for j in 0..=n {
                let y = -r + j as f64 * h;
                let wy = if j == 0 || j == n { 0.5 } else { 1.0 };
                let mut row = 0.0;
                for i in 0..=n {
                    let x = -r + i as f64 * h;
                    let wx = if i == 0 || i == n { 0.5 } else { 1.0 };
                    row += wx * conformal_weight(&ChartPoint::new(x, y));
                }
                total += wy * row;
            }
            let defect = (total * h * h - four_pi).abs();
            assert!(defect < last_defect, "area defect must shrink with R");
            last_defect = defect;
        }
        // At R = 90 the missing cap has area ~ 4*pi/R^2 ~ 1.6e-3.
        assert!(last_defect < 2e-3, "defect {last_defect}");
    }

    fn arb_sphere_point() -> impl Strategy<Value = SpherePoint> {
        // Uniform on the sphere via z = x3, azimuth phi; capped below x3 = 0.99.
        (-1.0..0.99f64, 0.0..core::f64::consts::TAU).prop_map(|(z, phi)| {
            let rho = (1.0 - z * z).max(0.0).sqrt();
            SpherePoint::new(rho * phi.cos(), rho * phi.sin(), z)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn round_trip(p in arb_sphere_point()) {
            let chart = stereo_project(&p).unwrap();
            let back = stereo_unproject(&chart);
            let err = chordal_distance(&p, &back);
            prop_assert!(err < 1e-12, "round-trip error {err}");
        }

        #[test]
        fn chordal_chart_identity(a in arb_sphere_point(), b in arb_sphere_point()) {
            let pa = stereo_project(&a).unwrap();
            let pb = stereo_project(&b).unwrap();
            let lhs = chordal_distance(&a, &b).powi(2);
            let rhs = 4.0 * pa.distance(&pb).powi(2)
                / ((1.0 + pa.norm_sq()) * (1.0 + pb.norm_sq()));
            prop_assert!((lhs - rhs).abs() < 1e-12, "identity violated: {lhs} vs {rhs}");
        }

        #[test]
        fn chart_chordal_distance_matches(a in arb_sphere_point(), b in arb_sphere_point()) {
            let pa = stereo_project(&a).unwrap();
            let pb = stereo_project(&b).unwrap();
            let direct = chordal_distance(&a, &b);
            let via_chart = chordal_distance_chart(&pa, &pb);
            prop_assert!((direct - via_chart).abs() < 1e-12);
        }
    }
}
