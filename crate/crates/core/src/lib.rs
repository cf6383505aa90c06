//! Numerical toolkit for prime counting asymptotics and the Riemann zeta function.

pub mod asymptotic;
pub mod curve;
pub mod error;
pub mod primes;
pub mod quad;
pub mod zeros;
pub mod zeta;

pub use error::{Error, Result};
