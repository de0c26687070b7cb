//! Universally decodable matrices over finite fields.
//!
//! A family of L matrices A_0, ..., A_{L-1} of size N x K over GF(q) is
//! universally decodable when every stack of per-matrix row prefixes totaling
//! at least K rows has full rank. Such families drive erasure coding for L
//! parallel channels that each deliver an unerased prefix of their codeword.
//!
//! The crate provides exact GF(p^s) arithmetic, polynomials with Hasse
//! derivatives and Taylor expansions, dense exact linear algebra, the
//! explicit Pascal-triangle family construction together with its monomial
//! and length-(q+2) variants, family-preserving transformations, an
//! exhaustive verifier, and two decoders for the prefix-erasure channel: a
//! generic Gaussian solver and a quadratic-time Newton interpolation
//! decoder.

pub mod codec;
pub mod fileio;
pub mod gf;
pub mod linalg;
pub mod poly;
pub mod transforms;
pub mod udm;

pub use gf::{field_new, FieldElement, FieldSpec};
pub use linalg::MatrixGF;
pub use poly::{EvalPoint, Poly, TaylorCoeffs};
pub use udm::{BetaSequence, ErasurePattern, PatternMode, UdmFamily, VerificationReport};
