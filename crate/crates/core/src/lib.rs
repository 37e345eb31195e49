//! Minimum up-down closure sizes of set families: closures, generalised
//! shifting, the extremal function `Φ(n, m)`, explicit witness chains and
//! brute-force oracles for small ground sets.

pub mod error;
pub mod family;
pub mod oracle;
pub mod phi;
pub mod report;
pub mod shift;
pub mod suite;
pub mod witness;

pub use error::{Error, Result};
pub use family::{format_family, parse_family, Family, FamilyDoc, SubsetMask, MAX_N};
pub use phi::{phi_fast, phi_recursive, phi_table, DyadicRational, PhiRecursion, PhiTable};
pub use shift::{shift, strongly_shift, ShiftPair};
pub use witness::{canonical_chain, verify_chain, Chain, VerificationReport};
