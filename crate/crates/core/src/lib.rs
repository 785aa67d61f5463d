//! Néron–Tate heights on elliptic curves over number fields, prime
//! splitting densities in towers, and the auxiliary-section machinery
//! (formal groups, Siegel lemma, p-adic jets) used to study lower bounds
//! for heights over asymptotically positive extensions.
//!
//! The crate is organised bottom-up:
//!
//! * [`arith`]: exact integers, polynomials, number fields, p-adic fields,
//!   Weil heights and the product formula.
//! * [`splitting`]: Dedekind factorization, prime counts by norm, towers
//!   and splitting densities.
//! * [`elliptic`]: short Weierstrass curves, reduction, point counts and
//!   amplification.
//! * [`heights`]: naive and canonical heights, torsion certificates and
//!   small-point search.
//! * [`auxiliary`]: formal groups, the vanishing system, Siegel solve and
//!   jet evaluation.
//! * [`experiments`]: config-driven reports shared by the CLI and examples.

pub mod arith;
pub mod auxiliary;
pub mod elliptic;
pub mod error;
pub mod experiments;
pub mod heights;
pub mod splitting;

pub use error::{Error, Result};
