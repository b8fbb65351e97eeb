//! Commutants of real and complex square matrices through the kernel of the
//! commutator operator `A ⊗ I − I ⊗ Aᵀ`, together with set-level commutation
//! certificates, non-commuting witnesses, Kronecker-sum spectra and
//! commutation checks for matrix functions.

pub mod commutant;
pub mod error;
pub mod exact;
pub mod factor;
pub mod matfunc;
pub mod matrix;
mod qr;
pub mod spectral;
mod svd;

pub use error::{Error, Result};
pub use factor::{KernelBasis, Tolerance};
pub use matrix::{CMatrix, Complex, OperatorMode, RowVec};
