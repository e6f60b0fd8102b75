//! Exact tiling and spectral set computations over prime fields `Z_p^d`.

pub mod budget;
pub mod certificate;
pub mod constructions;
pub mod davey;
pub mod error;
pub mod field;
pub mod fourier;
pub mod reproduce;
pub mod search;
pub mod spectral;
pub mod tiling;

pub use error::{Error, Result};
