//! Pointer-state idealness for von Neumann measurements of a qubit.
//!
//! * [`grid`]: uniform grids, complex wavefunctions, Simpson quadrature.
//! * [`pointer`]: Gaussian, squeezed and faithful pointer families.
//! * [`ideality`]: formal and operational idealness, error measure, closed
//!   forms, objective, stationarity residual, faithfulness certificate.
//! * [`measurement`]: qubit state, composite state, channel probabilities,
//!   unsharp POVM, Monte-Carlo channel sampling.
//! * [`sweep`]: configuration, parameter sweeps and table output.
//! * [`reproduction`]: the regression checks run by `pointer paper-check`.

pub mod error;
pub mod grid;
pub mod ideality;
pub mod measurement;
pub mod pointer;
pub mod quad;
pub mod reproduction;
pub mod sweep;

pub use error::{Error, Result};
pub use grid::{Grid, ShiftMode, Wavefunction};
