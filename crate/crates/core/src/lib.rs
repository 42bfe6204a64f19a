//! Polynomial machinery behind improved KS_r paving bounds.
//!
//! The crate computes mixed characteristic polynomials and
//! (k,m)-characteristic polynomials through several independent routes,
//! replays the barrier-function argument that bounds their largest roots,
//! and turns the interlacing-family argument into a greedy algorithm that
//! partitions a PSD decomposition of the identity into pieces of small norm.
//!
//! Every routine is generic over [`Scalar`]: `f64` for speed and
//! `num::BigRational` when an identity should hold exactly.

pub mod error;
pub mod hermitian;
pub mod instance;
pub mod barrier;
pub mod bounds;
pub mod interp;
pub mod km;
pub mod linalg;
pub mod mixed;
pub mod paving;
pub mod poly;
pub mod reduce;
pub mod roots;
pub mod scalar;
pub mod suite;

pub use error::{Error, Result};
pub use hermitian::{HermitianMatrix, KPartition, VectorSystem};
pub use poly::RealPoly;
pub use roots::RootBundle;
pub use scalar::{Scalar, C64};
