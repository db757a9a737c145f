//! Classical knot invariants from braid words and Seifert matrices, exact
//! analysis of Alexander-polynomial zeros on the unit circle, and numerical
//! deformation of abelian elliptic representations of knot groups into
//! irreducible `SL(2,R)` / `SU(2)` representations.
//!
//! The exact side (`laurent`, `poly`, `braid`, `invariants`, `circle_zeros`)
//! never touches floating point except through certified ball arithmetic
//! (`ball`). The numerical side lives in `repspace`.

pub mod ball;
pub mod braid;
pub mod catalog;
pub mod circle_zeros;
mod error;
pub mod exec;
pub mod invariants;
pub mod laurent;
mod linalg;
pub mod poly;
pub mod repspace;
mod serde_int;

pub use error::{Error, Result};
pub use exec::Exec;

/// Starting precision (bits) for certified ball arithmetic.
pub const DEFAULT_PRECISION_BITS: u32 = 128;
/// Precision cap for certified ball arithmetic; escalation doubles up to here.
pub const MAX_PRECISION_BITS: u32 = 4096;
