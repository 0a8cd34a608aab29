//! Equilibria and Coulomb control of vertex-charged planar polygonal linkages.
//!
//! The crate covers two mechanisms:
//!
//! * 4-bar linkages, whose planar moduli space is modelled by the compact oval
//!   of the Cayley–Menger relation between the squared diagonals
//!   ([`moduli::OvalModel`]). On top of it [`quad_control`] enumerates the
//!   critical points of the effective Coulomb potential, solves the inverse
//!   problem (which controlling charge makes a given convex shape the global
//!   minimum) and simulates the two-stage navigation by gradient flow.
//! * Equilateral 5-bar linkages, for which [`pentagon_control`] computes the
//!   unique positive pair of controlling charges that makes a strictly convex
//!   shape critical.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod geometry;
pub mod moduli;
pub mod numeric;
pub mod pentagon_control;
pub mod potential;
pub mod quad_control;
pub mod sampling;

pub use error::{Error, Result};
pub use geometry::{Linkage, PentagonBranches, PentagonConfig, Point, QuadConfig, QuadRegion, Side};
pub use moduli::{OvalModel, OvalPoint, SignPair};
pub use potential::{ChargeSystem, PotentialKind, QuadConvention};
pub use quad_control::{ChargeValue, CriticalPoint, FlowStage, FlowTrace, MorseType, QuadController};
