//! Exact calculator and cross-verifier for abelian quantum invariants of
//! closed oriented 3-manifolds.
//!
//! The library computes chiral and doubled abelian partition functions from
//! linking-form data, root-of-unity surgery invariants from framed links,
//! and state sums from cell decompositions, then cross-checks the
//! independent routes against each other and against gcd-product closed
//! forms.
//!
//! Everything upstream of a final complex evaluation is exact: integer
//! matrices are arbitrary precision, linking forms are rationals reduced
//! mod 1, and single phases are tracked as roots of unity. Floating point
//! appears only when a sum of phases is collapsed to one complex number.

/// Relative tolerance used by every verification report when a floating-point
/// quantity is compared against an exact evaluation.
pub const VERIFY_TOLERANCE: f64 = 1e-6;

pub mod category;
pub mod cli;
pub mod linalg;
pub mod manifolds;
pub mod partition;
pub mod report;
pub mod rt;
pub mod topology;
pub mod tv;
