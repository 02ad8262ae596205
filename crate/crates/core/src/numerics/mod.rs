//! Numerical building blocks shared by the mean and constant modules.

pub mod quad;
pub mod roots;
pub mod sum;

pub use quad::{Quadrature, TanhSinh};
pub use roots::{brent, Root, RootError};
pub use sum::{compensated_sum, CompensatedSum, LogWeightedSum};
