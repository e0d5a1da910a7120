//! Density functionals and approximate progression search over finite unions
//! of integer intervals.
//!
//! The crate computes certified finite-horizon values of the r-density,
//! logarithmic density, r-Banach density and log Banach density, computes the
//! exact images `⌈log₂ x⌉` and `⌈x^r⌉` of interval unions, and searches for
//! geometric progressions and m-th powers of arithmetic progressions that
//! approximate members of a set, emitting exactly checkable certificates.

pub mod density;
pub mod error;
pub mod families;
pub mod numeric;
pub mod search;
pub mod set;
pub mod setspec;
pub mod transform;

pub use density::{DensityConfig, DensityEstimate, Enclosure, RExponent, WindowKind, WindowSpec};
pub use error::{Error, Result};
pub use families::{Family, FamilyConfig, FamilySpec, UnitFraction};
pub use numeric::Precision;
pub use search::{ApproxParams, ProgressionCertificate, VerifyReport};
pub use set::{IntInterval, IntegerSet};
pub use setspec::SetSpec;
