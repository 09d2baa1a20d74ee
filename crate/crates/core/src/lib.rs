//! Lift-connected surface codes.
//!
//! Construction of lifted-product CSS codes over circulant rings, exact and
//! belief-propagation decoders, Monte Carlo samplers for code-capacity,
//! phenomenological and circuit-level noise, syndrome-extraction circuit
//! synthesis, fold-transversal gate checks, and curve analysis.

pub mod analysis;
pub mod bench;
pub mod circuit;
pub mod circulant;
pub mod code;
mod combo;
pub mod decode;
pub mod error;
pub mod gates;
pub mod gf2;
pub mod product;
pub mod sampling;

pub use code::{CodeKind, CodeMeta, CssCode, LogicalBasis, Pauli};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
