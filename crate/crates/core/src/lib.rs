//! Exact classification of simplicial affine semigroups S ⊆ ℕ^d: Apéry sets
//! with respect to the extremal rays, quasi-Frobenius elements, the
//! Cohen-Macaulay type, the canonical module and its trace, and the ladder
//! Gorenstein ⇒ nearly Gorenstein ⇒ Gorenstein on the punctured spectrum.
//!
//! ```
//! use sgclass::{AffineSemigroup, LatticeVector, apery::Limits, classify};
//!
//! let gens: Vec<LatticeVector> =
//!     [[6, 0], [0, 6], [2, 1], [1, 2]].into_iter().map(Into::into).collect();
//! let s = AffineSemigroup::build(&gens).unwrap();
//! let report = classify::classification_report(&s, &Limits::default()).unwrap();
//! assert!(report.is_cm);
//! assert_eq!(report.type_count, 2);
//! assert_eq!(report.is_nearly_gorenstein, Some(false));
//! assert_eq!(report.is_gps, Some(true));
//! ```

pub mod apery;
pub mod classify;
pub mod cli;
pub mod error;
pub mod harness;
pub mod lattice;
mod linalg;
pub mod membership;

pub use apery::{AperyData, Limits};
pub use classify::ClassificationReport;
pub use error::{Error, Result, ValidationError, ValidationKind};
pub use lattice::{build_semigroup, AffineSemigroup, LatticeVector, RationalVector};
pub use membership::{MembershipEngine, ShiftAnswer};
