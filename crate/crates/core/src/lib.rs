//! Parameters for generalized MNT pairing-friendly curves whose group order
//! is a small cofactor times a large prime, for embedding degrees 3, 4 and 6.

pub mod arith;
pub mod cli;
pub mod error;
pub mod families;
pub mod pell;
pub mod poly;
pub mod published;
pub mod search;
pub mod serde_int;

pub use error::{Error, Result};
pub use families::{build_family, families_for, verify_family, Branch, FamilySpec, QuadraticFamily};
pub use pell::{PellInstance, PellSolution};
pub use search::{run_search, verify_candidate, CandidateRecord, CurveCandidate, Mode, SearchConfig};
