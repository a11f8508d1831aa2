//! Exact discrete maximal operators on `BV(ℤ)`, the fractional maximal
//! operator on compactly supported piecewise-linear functions, and a
//! reproducible lab for continuity experiments.

pub mod discrete;
pub mod error;
pub mod family;
pub mod fractional;
pub mod lab;
pub mod pwl;
pub mod rational;
pub mod signal;

pub use error::{Error, Result};
pub use family::Family;
pub use pwl::PwlFunction;
pub use rational::Rational;
pub use signal::DiscreteSignal;
