//! Lattice-based dynamic k-times anonymous authentication.
//!
//! Building blocks (trapdoors, a rounding-based weak PRF, a tag-based
//! signature, static and dynamic accumulators), a compiler from every proof
//! statement into one quadratic relation over Z_q, the GM/AP/User protocol
//! with public tracing, and a communication-cost estimator.
//!
//! The bundled proof backend is transparent: it reveals the witness and is
//! **not zero-knowledge**. Nothing here is constant time.

pub mod acc_dynamic;
pub mod acc_static;
pub mod cli;
pub mod error;
pub mod estimator;
pub mod ktaa_protocol;
pub mod lattice_core;
pub mod proof_backend;
pub mod rng;
pub mod sep_sign;
pub mod trapdoor;
pub mod wprf;
pub mod zk_relations;

pub use error::{Error, Result};
pub use lattice_core::ParamSet;
