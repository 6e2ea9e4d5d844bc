//! Renormalized interaction energy of a vortex configuration.
//!
//! On a conformal chart with exponent `f`, a configuration of vortices at
//! chart points `b_i` with degrees `d_i` has renormalized energy
//!
//! ```text
//! W = pi * sum_i d_i^2 f(b_i)  -  pi * sum_{i != j} d_i d_j ln |b_i - b_j|.
//! ```
//!
//! For the sphere (degrees summing to zero, all `d_i = ±1`) the same value
//! can be written purely in terms of ambient chordal distances,
//!
//! ```text
//! W = -pi * sum_{i != j} d_i d_j ln |P_i - P_j|_{R^3},
//! ```
//!
//! which this module keeps as a redundant cross-check of the chart form.
//! The manifold gradient of `W` with respect to a vortex position is
//!
//! ```text
//! (1/pi) grad_g W|_{b_i} = e^{-2 f(b_i)} [ grad f(b_i)
//!     - 2 d_i sum_{j != i} d_j (b_i - b_j) / |b_i - b_j|^2 ],
//! ```
//!
//! and the skew gradient is its 90-degree rotation.

use crate::geometry::{
    chordal_distance, conformal_exponent, conformal_exponent_gradient, stereo_unproject,
    ChartPoint, Vec2,
};
use crate::math;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

/// Two chart positions closer than this are treated as coincident: the log
/// interaction is no longer meaningful in double precision below it.
pub const COINCIDENCE_THRESHOLD: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyError {
    /// Two vortex positions within the coincidence threshold.
    CoincidentVortices { i: usize, j: usize },
    /// A degree other than +1 / -1.
    InvalidDegree { index: usize },
    /// Degrees do not sum to zero.
    UnbalancedDegrees { total: i32 },
}

impl fmt::Display for EnergyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyError::CoincidentVortices { i, j } => {
                write!(f, "vortices {i} and {j} are coincident")
            }
            EnergyError::InvalidDegree { index } => {
                write!(f, "vortex {index} has a degree other than +1/-1")
            }
            EnergyError::UnbalancedDegrees { total } => {
                write!(f, "vortex degrees sum to {total}, expected 0")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for EnergyError {}

/// A single vortex: a chart position, a degree of `+1` or `-1`, and a stable
/// identifier used by trajectory traces across collisions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vortex {
    pub id: u32,
    pub position: ChartPoint,
    pub degree: i8,
}

/// An ordered list of vortices with net degree zero, plus the current time.
#[derive(Debug, Clone, PartialEq)]
pub struct VortexConfiguration {
    pub vortices: Vec<Vortex>,
    pub time: f64,
}

impl VortexConfiguration {
    /// Builds a configuration from `(position, degree)` pairs, assigning ids
    /// `0..n` in order.  Degrees must all be `±1` and sum to zero; positions
    /// must be pairwise distinct.
    pub fn new(pairs: &[(ChartPoint, i8)], time: f64) -> Result<Self, EnergyError> {
        let vortices = pairs
            .iter()
            .enumerate()
            .map(|(id, &(position, degree))| Vortex {
                id: id as u32,
                position,
                degree,
            })
            .collect();
        let cfg = VortexConfiguration { vortices, time };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EnergyError> {
        let mut total: i32 = 0;
        for (index, v) in self.vortices.iter().enumerate() {
            if v.degree != 1 && v.degree != -1 {
                return Err(EnergyError::InvalidDegree { index });
            }
            total += v.degree as i32;
        }
        if total != 0 {
            return Err(EnergyError::UnbalancedDegrees { total });
        }
        check_separation(self)?;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vortices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vortices.is_empty()
    }

    /// Sum of the sphere positions of all vortices (the `V_0` vector whose
    /// gradient-flow evolution is `V_0(t) = V_0(t_0) e^{t - t_0}`).
    pub fn sphere_position_sum(&self) -> [f64; 3] {
        let mut v = [0.0; 3];
        for vx in &self.vortices {
            let p = stereo_unproject(&vx.position);
            v[0] += p.x1;
            v[1] += p.x2;
            v[2] += p.x3;
        }
        v
    }

    /// Sum over unordered pairs of squared chordal distances.
    pub fn pair_distance_sq_sum(&self) -> f64 {
        let pts: Vec<_> = self
            .vortices
            .iter()
            .map(|v| stereo_unproject(&v.position))
            .collect();
        let mut s = 0.0;
        for i in 0..pts.len() {
            for j in 0..i {
                let d = chordal_distance(&pts[i], &pts[j]);
                s += d * d;
            }
        }
        s
    }

    /// Minimum pairwise chordal distance, or `+inf` for fewer than 2 vortices.
    pub fn min_pair_chordal_distance(&self) -> f64 {
        let pts: Vec<_> = self
            .vortices
            .iter()
            .map(|v| stereo_unproject(&v.position))
            .collect();
        let mut best = f64::INFINITY;
        for i in 0..pts.len() {
            for j in 0..i {
                best = best.min(chordal_distance(&pts[i], &pts[j]));
            }
        }
        best
    }
}

fn check_separation(cfg: &VortexConfiguration) -> Result<(), EnergyError> {
    for i in 0..cfg.vortices.len() {
        for j in 0..i {
            let d = cfg.vortices[i].position.distance(&cfg.vortices[j].position);
            if d < COINCIDENCE_THRESHOLD {
                return Err(EnergyError::CoincidentVortices { i: j, j: i });
            }
        }
    }
    Ok(())
}

/// Renormalized energy in the chart form
/// `W = pi sum d_i^2 f(b_i) - pi sum_{i != j} d_i d_j ln |b_i - b_j|`.
///
/// This is the primary form; flows differentiate it.
pub fn renormalized_energy_chart(cfg: &VortexConfiguration) -> Result<f64, EnergyError> {
    check_separation(cfg)?;
    let mut self_term = 0.0;
    let mut pair_term = 0.0;
    for (i, vi) in cfg.vortices.iter().enumerate() {
        let d2 = (vi.degree as f64) * (vi.degree as f64);
        self_term += d2 * conformal_exponent(&vi.position);
        for vj in cfg.vortices.iter().take(i) {
            // Each unordered pair appears twice in the double sum.
            pair_term += 2.0
                * (vi.degree as f64)
                * (vj.degree as f64)
                * math::ln(vi.position.distance(&vj.position));
        }
    }
    Ok(PI * self_term - PI * pair_term)
}

/// Renormalized energy in the chordal form
/// `W = -pi sum_{i != j} d_i d_j ln |P_i - P_j|_{R^3}`.
///
/// Equal to [`renormalized_energy_chart`] for every valid configuration
/// (net degree zero, degrees `±1`); kept as an independent oracle.
pub fn renormalized_energy_chordal(cfg: &VortexConfiguration) -> Result<f64, EnergyError> {
    check_separation(cfg)?;
    let pts: Vec<_> = cfg
        .vortices
        .iter()
        .map(|v| stereo_unproject(&v.position))
        .collect();
    let mut pair_term = 0.0;
    for i in 0..cfg.vortices.len() {
        for j in 0..i {
            pair_term += 2.0
                * (cfg.vortices[i].degree as f64)
                * (cfg.vortices[j].degree as f64)
                * math::ln(chordal_distance(&pts[i], &pts[j]));
        }
    }
    Ok(-PI * pair_term)
}

/// Manifold gradient `(grad_g W)|_{b_i}` of the renormalized energy with
/// respect to the position of vortex `i`.
pub fn grad_w(cfg: &VortexConfiguration, i: usize) -> Result<Vec2, EnergyError> {
    check_separation(cfg)?;
    let vi = &cfg.vortices[i];
    let mut interaction = Vec2::ZERO;
    for (j, vj) in cfg.vortices.iter().enumerate() {
        if j == i {
            continue;
        }
        let sep = vi.position.to_vec2() - vj.position.to_vec2();
        let dist_sq = sep.dot(&sep);
        interaction = interaction + sep * ((vj.degree as f64) / dist_sq);
    }
    let di = vi.degree as f64;
    let bracket = conformal_exponent_gradient(&vi.position) - interaction * (2.0 * di);
    let emf = math::exp(-2.0 * conformal_exponent(&vi.position));
    Ok(bracket * (PI * emf))
}

/// Skew gradient `(grad_g^perp W)|_{b_i}`: the 90-degree rotation
/// `J grad_g W` with `J = [[0, 1], [-1, 0]]`.
pub fn skew_grad_w(cfg: &VortexConfiguration, i: usize) -> Result<Vec2, EnergyError> {
    Ok(grad_w(cfg, i)?.perp())
}
