//! Every proof statement as one quadratic relation over Z_q: linear rows
//! plus product triples x[h] = x[i]·x[j], with named witness segments.

pub mod compilers;
pub mod conjoin;
pub mod instance;
pub mod sizes;
pub mod statement;

pub use conjoin::{conjoin, Conjoined};
pub use instance::{check_instance, Builder, RStarInstance, Segment, SparseRow, Violation};
pub use sizes::{clause_sizes, clause_totals, ClauseSize};
pub use statement::{compile_auth, compile_join, witness_auth, witness_join, AuthPublic, AuthSecret, AUTH_ALIASES};
