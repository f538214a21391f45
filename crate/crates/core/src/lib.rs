//! Deformable lattice modules: geometry, FCC configurations, motion rules,
//! gradient planning and a deterministic message-passing simulator.
//!
//! The crate is `no_std` and only needs `alloc`. File formats and the
//! command-line front end live in the `datom` crate.
#![no_std]

extern crate alloc;

pub mod geometry;
pub mod gradient;
pub mod lattice;
pub mod motion;
pub mod simkernel;

pub use geometry::{derive_params, DatomParams, LinkagePose, ThicknessConvention};
pub use gradient::{best_next, compute_field, descend, DistanceField, FieldError};
pub use lattice::{CellPos, Configuration, ModuleId, ModuleState, PistonAxis};
pub use motion::{apply, candidate_actions, inverse, validate, MotionAction, MotionKind, Verdict};
pub use simkernel::{run, SimError, SimOutcome, SimParams, SimTrace};
