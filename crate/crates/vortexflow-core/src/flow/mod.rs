//! Time integration of the limiting point-vortex flows on the sphere.
//!
//! Two motion laws are supported, both expressed in the stereographic chart:
//!
//! * gradient flow     `db_i/dt = -(1/pi) (grad_g W)|_{b_i}`, equivalently
//!   `dp_i/dt = ((1+r_i^2)^2/2) (p_i/(1+r_i^2) + d_i sum_{j!=i} d_j (p_i-p_j)/|p_i-p_j|^2)`;
//! * Hamiltonian flow  `d_i db_i/dt = -(1/pi) (grad_g^perp W)|_{b_i}`.
//!
//! Trajectories are integrated with an adaptive embedded Runge-Kutta pair and
//! dense output.  When the minimum pairwise chordal distance crosses the
//! collision radius, the event time is refined by bisection, colliding
//! vortices are clustered by transitive closure, and the cluster either
//! annihilates (net degree 0) or merges into a single `±1` vortex (net degree
//! `±1`); integration then restarts from the reduced configuration.

mod diagnostics;
mod dopri;
mod integrate;
mod rhs;
mod scan;

pub use diagnostics::{diagnostics, DiagnosticsReport};
pub use integrate::integrate;
pub use rhs::flow_rhs;
pub use scan::{
    annihilation_scan, annihilation_trial, sample_cap_configuration, ScanReport, TrialOutcome,
};

use crate::energy::EnergyError;
use crate::geometry::{stereo_unproject, ChartPoint, SpherePoint};
use alloc::vec::Vec;
use core::fmt;

/// Which limiting dynamics to integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    Gradient,
    Hamiltonian,
}

/// Integration parameters for a point-vortex run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowSpec {
    pub kind: FlowKind,
    /// Relative local-error tolerance, in `(0, 1e-2]`.
    pub rk_rel_tol: f64,
    /// Absolute local-error tolerance, in `(0, 1e-2]`.
    pub rk_abs_tol: f64,
    /// Chordal collision radius `delta_c`, in `(0, 0.1]`.
    pub collision_radius: f64,
    /// Integration horizon (relative to the configuration's initial time).
    pub max_time: f64,
    /// Spacing of trace samples; `0` records only segment boundaries.
    pub output_stride: f64,
    /// Hard cap on the internal step size (bounds dense-output error).
    pub max_step: f64,
    /// Chart radius at which a vortex counts as escaped to the north pole.
    pub pole_escape_radius: f64,
    /// Continue Hamiltonian runs through collisions with the same rule as the
    /// gradient flow.  Off by default: the continuation rule is defined for
    /// the gradient flow, so Hamiltonian runs halt at the first collision.
    pub hamiltonian_continuation: bool,
}

/// Default chordal collision radius.
pub const DEFAULT_COLLISION_RADIUS: f64 = 1e-3;

impl FlowSpec {
    pub fn gradient(max_time: f64) -> Self {
        FlowSpec {
            kind: FlowKind::Gradient,
            rk_rel_tol: 1e-10,
            rk_abs_tol: 1e-12,
            collision_radius: DEFAULT_COLLISION_RADIUS,
            max_time,
            output_stride: 0.01,
            max_step: 0.005,
            pole_escape_radius: crate::geometry::POLE_CHART_RADIUS,
            hamiltonian_continuation: false,
        }
    }

    pub fn hamiltonian(max_time: f64) -> Self {
        FlowSpec {
            kind: FlowKind::Hamiltonian,
            ..FlowSpec::gradient(max_time)
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let tol_ok = |t: f64| t > 0.0 && t <= 1e-2;
        if !tol_ok(self.rk_rel_tol) || !tol_ok(self.rk_abs_tol) {
            return Err(FlowError::InvalidSpec("rk tolerances must lie in (0, 1e-2]"));
        }
        if !(self.collision_radius > 0.0 && self.collision_radius <= 0.1) {
            return Err(FlowError::InvalidSpec("collision radius must lie in (0, 0.1]"));
        }
        if !(self.max_time > 0.0) || !self.max_time.is_finite() {
            return Err(FlowError::InvalidSpec("max_time must be positive and finite"));
        }
        if self.output_stride < 0.0 || !self.output_stride.is_finite() {
            return Err(FlowError::InvalidSpec("output_stride must be non-negative"));
        }
        if !(self.max_step > 0.0) {
            return Err(FlowError::InvalidSpec("max_step must be positive"));
        }
        if !(self.pole_escape_radius > 1.0) {
            return Err(FlowError::InvalidSpec("pole_escape_radius must exceed 1"));
        }
        Ok(())
    }
}

/// What a collision cluster did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollisionAction {
    /// Net degree zero: all participants removed.
    Annihilate,
    /// Net degree `±1`: participants replaced by a single vortex.
    Merge,
}

/// A recorded collision.
#[derive(Debug, Clone, PartialEq)]
pub struct CollisionEvent {
    pub time: f64,
    /// Collision location: normalized chordal centroid of the cluster.
    pub location: SpherePoint,
    /// Ids of the vortices in the cluster.
    pub participants: Vec<u32>,
    pub net_degree: i32,
    pub action: CollisionAction,
}

/// One trace sample.  `segment` counts collision-free intervals; times are
/// strictly increasing within a segment and non-decreasing globally (the
/// state immediately before and after a collision share its time stamp).
#[derive(Debug, Clone, PartialEq)]
pub struct TraceSample {
    pub segment: u32,
    pub t: f64,
    pub configuration: crate::energy::VortexConfiguration,
    /// Renormalized energy (chart form); zero for an empty configuration.
    pub w: f64,
    /// Sum of sphere positions of the surviving vortices.
    pub v0: [f64; 3],
    /// Sum over unordered pairs of squared chordal distances.
    pub pair_sum: f64,
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    ReachedMaxTime,
    /// Every vortex has annihilated; the configuration is empty.
    AllAnnihilated,
    /// Hamiltonian run halted at its first collision (continuation disabled).
    HaltedAtCollision,
    /// A vortex reached the chart's pole cutoff at the recorded time.
    PoleEscape { vortex_id: u32, time: f64 },
}

/// A time-stamped vortex trajectory with diagnostics and collision records.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTrace {
    pub kind: FlowKind,
    pub samples: Vec<TraceSample>,
    pub collisions: Vec<CollisionEvent>,
    pub termination: Termination,
}

impl TrajectoryTrace {
    /// Time of the final annihilation, if the run emptied the configuration.
    pub fn annihilation_time(&self) -> Option<f64> {
        match self.termination {
            Termination::AllAnnihilated => self.collisions.last().map(|c| c.time),
            _ => None,
        }
    }

    pub fn final_configuration(&self) -> Option<&crate::energy::VortexConfiguration> {
        self.samples.last().map(|s| &s.configuration)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FlowError {
    /// Invalid flow parameters.
    InvalidSpec(&'static str),
    /// Invalid initial configuration.
    InvalidConfiguration(EnergyError),
    /// `flow_rhs` evaluated with two vortices closer than a tenth of the
    /// collision radius.
    NearCollision { i: usize, j: usize, chordal: f64 },
    /// A collision cluster had net degree outside `{-1, 0, 1}`; the
    /// continuation rule is undefined there.
    DegreeAssumptionViolated { time: f64, net_degree: i32 },
    /// A cluster with fewer than two vortices was passed to collision
    /// resolution.
    InvalidCluster,
    /// The clustering hypothesis `sqrt(1 - s^2) > (n-1)/n` fails.
    CapAssumptionViolated { n: usize, s: f64 },
}

impl fmt::Display for FlowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowError::InvalidSpec(msg) => write!(f, "invalid flow spec: {msg}"),
            FlowError::InvalidConfiguration(e) => write!(f, "invalid configuration: {e}"),
            FlowError::NearCollision { i, j, chordal } => write!(
                f,
                "vortices {i} and {j} are {chordal:.3e} apart (chordal), too close for the motion law"
            ),
            FlowError::DegreeAssumptionViolated { time, net_degree } => write!(
                f,
                "collision cluster at t={time} has net degree {net_degree}; continuation undefined"
            ),
            FlowError::InvalidCluster => write!(f, "collision cluster needs at least two vortices"),
            FlowError::CapAssumptionViolated { n, s } => write!(
                f,
                "cap hypothesis sqrt(1-s^2) > (n-1)/n fails for n={n}, s={s}"
            ),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FlowError {}

/// Resolves a collision cluster per the continuation rule: net degree `0`
/// removes every participant, net degree `±1` replaces them with a single
/// vortex of that degree at the cluster's normalized chordal centroid.
pub fn resolve_collision(
    cluster: &[(ChartPoint, i8)],
) -> Result<Option<(SpherePoint, i8)>, FlowError> {
    if cluster.len() < 2 {
        return Err(FlowError::InvalidCluster);
    }
    let net: i32 = cluster.iter().map(|&(_, d)| d as i32).sum();
    match net {
        0 => Ok(None),
        1 | -1 => {
            let mut c = [0.0f64; 3];
            for (p, _) in cluster {
                let s = stereo_unproject(p);
                c[0] += s.x1;
                c[1] += s.x2;
                c[2] += s.x3;
            }
            let location = SpherePoint::new(c[0], c[1], c[2]);
            Ok(Some((location, net as i8)))
        }
        _ => Err(FlowError::DegreeAssumptionViolated {
            time: f64::NAN,
            net_degree: net,
        }),
    }
}

/// Degree-mix admissibility of a collision cluster with `k` vortices of one
/// sign and `m` of the other: `C(k,2) + C(m,2) - k m < 1`.  Clusters that can
/// actually collide under the flow always satisfy this; a violation signals
/// integrator failure rather than physics.
pub fn degree_mix_admissible(k: usize, m: usize) -> bool {
    let choose2 = |n: usize| (n * n.saturating_sub(1)) / 2;
    let lhs = choose2(k) as i64 + choose2(m) as i64 - (k * m) as i64;
    lhs < 1
}
