//! Limiting point-vortex dynamics on the 2-sphere and fixed-`eps`
//! Ginzburg-Landau / Gross-Pitaevskii field evolution on a stereographic chart.
//!
//! The crate is organized around four layers:
//!
//! * [`geometry`] — the stereographic chart (south pole at the origin), the
//!   conformal factor, chordal distances, and tangent-vector conversions.
//! * [`energy`] — the renormalized interaction energy `W` of a vortex
//!   configuration, in both its chart form and its chordal form, with its
//!   manifold gradient and skew gradient.
//! * [`flow`] — time integration of the gradient and Hamiltonian point-vortex
//!   flows, collision detection with annihilation/merging continuation,
//!   trajectory diagnostics, and the cap annihilation scan.
//! * [`field`] — the complex order parameter on a chart grid: well-prepared
//!   initial data, heat-flow and Schrödinger stepping, energies and weighted
//!   energies, the current/Jacobian, and vortex tracking.
//!
//! The crate is `no_std`-compatible (with `alloc`); enable the `libm` feature
//! when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("vortexflow-core requires either the `std` or the `libm` feature");

extern crate alloc;

pub(crate) mod math;
#[cfg(test)]
pub(crate) mod testutil;

pub mod energy;
pub mod field;
pub mod flow;
pub mod geometry;

pub use energy::{EnergyError, Vortex, VortexConfiguration};
pub use flow::{
    CollisionAction, CollisionEvent, DiagnosticsReport, FlowKind, FlowSpec, Termination,
    TrajectoryTrace,
};
pub use geometry::{ChartPoint, GeometryError, SpherePoint, Vec2};
