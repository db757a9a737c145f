use thiserror::Error;

use crate::repspace::DeformationPath;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial has no unit multiple that is symmetric with value 1 at t = 1")]
    NotNormalizable,
    #[error("polynomial is not palindromic")]
    NotPalindromic,
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("generator index {index} out of range for {strands} strands")]
    IndexOutOfRange { index: i64, strands: usize },
    #[error("braid closure has {components} components, not a knot")]
    NotAKnot { components: usize },
    #[error("not a Seifert matrix: det(V - V^T) = {det}, expected 1")]
    NotSeifert { det: String },
    #[error("Seifert matrix inconsistent: V + V^T is singular")]
    NotSeifertConsistent,
    #[error("Hermitian form undecidable at angle {angle} with {bits} bits (angle at or near a zero)")]
    SingularNearZero { angle: String, bits: u32 },
    #[error("determinant {det} and signature {sgn} violate det = (-1)^(sgn/2) mod 4")]
    InconsistentPair { det: String, sgn: i64 },
    #[error("constant term a_0 = {a0} is even")]
    EvenConstantTerm { a0: String },
    #[error("comparison undecided at {bits} bits")]
    Undecided { bits: u32 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("continuation failed to converge at step {step}")]
    NoConvergence {
        step: usize,
        path: Box<DeformationPath>,
    },
    #[error("solver only reached reducible representations after {attempts} attempts")]
    StuckReducible { attempts: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),
}
