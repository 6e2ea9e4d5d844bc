//! Fixed-`eps` evolution of the complex order parameter on the chart grid.
//!
//! The sphere is covered by the south-pole stereographic chart truncated to
//! the square `[-L, L]^2`; the PDEs transform to
//!
//! ```text
//! heat flow:      u_t = ((1+r^2)^2/4) lap u + (1/eps^2)(1-|u|^2) u
//! Schrödinger:  i u_t = ((1+r^2)^2/4) lap u + (1/eps^2)(1-|u|^2) u
//! ```
//!
//! with the conformal coefficient carrying the sphere geometry.  The grid is
//! uniform with spacing `h = 2L/N` and carries the far-field condition `u = 1`
//! on the boundary ring (callers who need spatially constant oracles can
//! select mirror boundaries instead).  Energies, weighted energies, first
//! moments, the current/Jacobian pair, phase-winding vortex location, and the
//! vortex-path comparison against the limiting ODE flows all live here.

mod compare;
mod gp;
mod grid;
mod heat;
mod jacobian;
mod prepare;
mod quad;
mod track;

pub use compare::{compare_to_ode, ComparisonReport, PdeFlow};
pub use gp::gp_flow_step;
pub use grid::{BoundaryKind, ChartGrid, ComplexField};
pub use heat::{heat_flow_step, relax_to_stationary, HeatStepper, RelaxationOutcome};
pub use jacobian::{current_and_jacobian, jacobian_disk_mass};
pub use prepare::{build_well_prepared, WellPreparedSpec};
pub use quad::{energy, weighted_identity_residual, EnergyReport};
pub use track::locate_vortices;

use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FieldError {
    /// Grid spacing too coarse to resolve vortex cores (`h >= eps/2`).
    Resolution { h: f64, epsilon: f64 },
    /// Seeded vortices closer than ten core lengths (chordal).
    Separation { i: usize, j: usize, chordal: f64 },
    /// A vortex position outside the trusted part of the chart (`|p| > L/2`).
    OutsideChart { index: usize },
    /// `|u|` exceeded the blow-up guard during evolution.
    BlowUp { max_modulus: f64 },
    /// Phase winding found in a cell where `|u|` is not small.
    UnresolvedCore { cell: (usize, usize), modulus: f64 },
    /// Vortex tracking returned an unexpected vortex count mid-run.
    TrackingLoss { expected: usize, found: usize, time: f64 },
    /// Invalid grid or stepping parameters.
    InvalidParameter(&'static str),
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::Resolution { h, epsilon } => {
                write!(f, "grid spacing {h} cannot resolve cores at eps {epsilon} (need h < eps/2)")
            }
            FieldError::Separation { i, j, chordal } => {
                write!(f, "vortices {i} and {j} are {chordal:.3e} apart, below ten core lengths")
            }
            FieldError::OutsideChart { index } => {
                write!(f, "vortex {index} lies outside the trusted chart region |p| <= L/2")
            }
            FieldError::BlowUp { max_modulus } => {
                write!(f, "field modulus reached {max_modulus}, beyond the blow-up guard")
            }
            FieldError::UnresolvedCore { cell, modulus } => write!(
                f,
                "winding in cell {cell:?} but modulus {modulus} is too large for a vortex core"
            ),
            FieldError::TrackingLoss { expected, found, time } => write!(
                f,
                "expected {expected} vortices at t={time}, tracking found {found}"
            ),
            FieldError::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for FieldError {}
