//! Private-state resource theory toolkit.
//!
//! The crate builds and analyses (generalized) private states, runs a privacy
//! dilution protocol on symbolic and dense backends, and computes the entropy
//! and divergence bounds that certify key rates at desk scale.
//!
//! Numeric code is generic over the real scalar through [`scalar::Real`];
//! `f64` aliases are exported at the crate root. Combinatorics (typical sets,
//! codecs) use exact rational arithmetic and are scalar-free.

pub mod div;
pub mod error;
pub mod report;
pub mod scalar;
pub mod states;
pub mod tensor;
pub mod typ;

pub use error::{Error, Result};
pub use scalar::{Cx, Real};

/// Default-precision aliases.
pub type State64 = tensor::RegisterState<f64>;
pub type Unitary64 = tensor::UnitaryOperator<f64>;
pub type C64 = Cx<f64>;
