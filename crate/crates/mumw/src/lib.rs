//! Mutually unbiased measurements (MUMs), the positive map they induce, and
//! the entanglement witnesses and detection criteria built from it.
//!
//! The crate covers the full pipeline:
//!
//! * [`generators`]: orthonormal traceless Hermitian bases of d x d operator
//!   space and their partition into d + 1 groups of d - 1;
//! * [`measurements`]: construction of d + 1 mutually unbiased POVMs from a
//!   partitioned basis, with a tunable efficiency parameter kappa, plus
//!   mutually unbiased bases and transcribed reference families;
//! * [`rotations`]: orthogonal element-space rotations that deform a witness
//!   while preserving measurement completeness;
//! * [`witness`]: the induced positive map and two independent witness
//!   synthesis routes;
//! * [`criteria`]: witness, separability-index, and coincidence criteria with
//!   closed forms on isotropic and maximally entangled states;
//! * [`states`]: canonical and transcribed density matrices and seeded random
//!   states.
//!
//! Transcribed reference data (three-decimal print precision) is validated
//! under an explicit fixture policy and never silently repaired; exact
//! reconstructions of the same families are provided alongside.

pub mod criteria;
pub mod error;
pub mod generators;
pub mod measurements;
pub mod numerics;
pub mod rotations;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
pub use numerics::{CMat, CVec, HermitianOperator, MatrixData, ToleranceConfig, ValidationPolicy};
