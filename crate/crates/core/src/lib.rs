//! Approximation in Hilbert spaces of weighted power series kernels on [-1, 1].

pub mod approximators;
pub mod bounds;
pub mod certify;
pub mod classical;
pub mod error;
pub mod harness;
pub mod kernels;
pub mod precision;
pub mod quadrature;
pub mod rkhs;
pub mod search;
pub mod sequences;
pub mod worstcase;

pub use rug::Float;
pub use error::{Error, Result};
pub use precision::Precision;

/// Error norm on [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    /// `‖·‖_∞`
    Sup,
    /// `‖·‖_2`
    L2,
}

impl Norm {
    pub fn name(self) -> &'static str {
        match self {
            Norm::Sup => "inf",
            Norm::L2 => "l2",
        }
    }
}
