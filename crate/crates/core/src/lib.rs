//! Toeplitz matrices built from scaled kernels and permutation displacements,
//! with independent numerical and combinatorial checks of their properties.
//!
//! * [`toeplitz`]: coefficient storage, dense materialization, naive and FFT products.
//! * [`permutations`]: displacement counts, the matrix `P_n`, exact and Monte Carlo moments.
//! * [`spectra`]: cyclic Jacobi eigensolver, cosine-sum approximations, traces of powers.
//! * [`integral_operator`]: kernels on `[0,1]²`, Nyström matrices, residuals, and the discrepancy report.
//! * [`banded`]: the tridiagonal determinant as an exact polynomial.
//! * [`nilpotent`]: powers of `I + xN` and their path-counting form.
//! * [`cli`]: the `toeplitz-lab` command line.

pub mod banded;
pub mod cli;
pub mod dense;
pub mod error;
pub mod fft;
pub mod integral_operator;
pub mod nilpotent;
pub mod permutations;
pub mod rng;
pub mod spectra;
pub mod toeplitz;

pub use dense::DenseMatrix;
pub use error::{LabError, Result};
pub use toeplitz::{KernelFunction, ToeplitzSymbol};
