//! Controlling sets and evaders for Lipschitz maps `R^m -> R^d`.
//!
//! A pair `(x, y)` controls `f` when `|f(x) - y| < 1` in the max norm. This
//! crate builds pair sets that control every Lipschitz function of a given
//! class, builds Lipschitz functions that evade a given pair set, and checks
//! both exactly on finite truncations using rational box-union geometry.

pub mod error;
pub mod scalar;
pub mod geometry;
pub mod sequences;
pub mod feasibility;
pub mod controller1d;
pub mod controllermd;
pub mod fixedpoint;
pub mod harness;
pub mod cli;

pub use error::{Error, Result};
pub use scalar::{Rational, Scalar};

/// Exact region, the certified instantiation.
pub type Region = geometry::Region<Rational>;
/// Floating-point region for exploratory runs.
pub type RegionF64 = geometry::Region<f64>;
pub type Aab = geometry::Aab<Rational>;
pub type Pair = feasibility::ControlPair<Rational>;
pub type Seq = sequences::PointSeq<Rational>;
