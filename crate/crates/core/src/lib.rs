//! Weighted means and their sharp weighted Hardy constants.
//!
//! The crate is organized bottom-up:
//!
//! * [`weights`] builds weight sequences and their prefix sums, and profiles
//!   the limit `eta = lim lambda_n / Lambda_n`.
//! * [`means`] evaluates weighted power, quasi-arithmetic, Gini and
//!   quasideviation means.
//! * [`homogenize`] estimates the homogenization of a mean, normalizes
//!   quasideviation kernels and computes their limit generator `h_E`.
//! * [`hardy`] produces Hardy constants, both in closed form and by solving
//!   the characteristic equation of a concave generator.
//! * [`empirical`] runs finite-`N` experiments: Hardy ratios, witness
//!   sequences, weighted Riemann sums and randomized inequality checks.
//! * [`family`] parses the textual mean-family notation used by the CLI.

pub mod empirical;
pub mod family;
pub mod hardy;
pub mod homogenize;
pub mod means;
pub mod numerics;
pub mod weights;

pub use family::{MeanFamily, MethodChoice};
pub use hardy::{ConstantMethod, HardyConstantResult};
pub use means::{GeneratorFunction, MeanSpec, QuasideviationKernel};
pub use weights::WeightSequence;
