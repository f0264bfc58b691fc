//! Generating distributions of rotationally symmetric norms and numerical
//! zonoid certification, built around the barrel bodies `B_{n,r}` (the unit
//! ball plus a coaxial flat disc of radius `r`).

pub mod barrel;
pub mod certify;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod jet;
pub mod numerics;
pub mod profiles;
pub mod svg;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
