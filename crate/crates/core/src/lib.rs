//! Constructions of integer sets whose representation functions match a
//! prescribed target, with brute-force verification of every step.
//!
//! The main entry points are [`order2::run`] for sums of two elements and
//! [`orderh::run_h`] for sums of `h` elements; both can be replayed
//! bit-for-bit from the step log stored in a [`format::BasisFile`].

pub mod construction;
pub mod error;
pub mod format;
pub mod growth;
pub mod order2;
pub mod orderh;
pub mod policy;
pub mod report;
pub mod sumset;
pub mod target;
pub mod useq;
pub mod verify;

pub use construction::Construction;
pub use error::{Error, Result};
pub use order2::{ConstructionState, RunConfig, StepRecord};
pub use orderh::HConstructionState;
pub use policy::ChoicePolicy;
pub use report::VerificationReport;
pub use sumset::{IntegerSet, RepTable};
pub use target::{Multiplicity, TargetFunction};
pub use useq::USequence;
