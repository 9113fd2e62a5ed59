//! Finite certificates for amenability and paradoxicality of finitely generated
//! groups, a finite-window subshift engine, witness builders for compressible
//! subshifts, and a few explicit flow constructions.

pub mod certificates;
pub mod compressible;
pub mod error;
pub mod flow;
pub mod group;
pub mod matching;
pub mod subshift;

pub use error::{Error, Result};
