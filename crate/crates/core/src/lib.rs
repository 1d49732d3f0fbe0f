//! One-dimensional quantum dynamics workbench for the arrival-time problem:
//! spectral propagation, complex absorbing potentials, pulsed measurements,
//! quantum Brownian motion, decoherent histories and arrival-time POVMs.
//!
//! Everything is generic over the scalar type; `f64` is the workhorse, `f32`
//! exists for quick scans. hbar = 1 throughout, the mass is carried per state.

pub mod arrival;
pub mod error;
pub mod fourier;
pub mod grid;
pub mod histories;
pub mod povm;
pub mod propagators;
pub mod scalar;

pub use error::{Error, Result};

use fourier::FftDispatch;
use scalar::Real;

/// Everything the pipeline needs from a scalar: float arithmetic plus an FFT
/// implementation. Implemented for `f32` and `f64`.
pub trait Scalar: Real + FftDispatch {}

impl<T: Real + FftDispatch> Scalar for T {}

pub type SimulationGrid64 = grid::SimulationGrid<f64>;
pub type SimulationGrid32 = grid::SimulationGrid<f32>;
pub type WaveFunction64 = grid::WaveFunction<f64>;
pub type WaveFunction32 = grid::WaveFunction<f32>;
pub type DensityMatrix64 = grid::DensityMatrix<f64>;
pub type DensityMatrix32 = grid::DensityMatrix<f32>;
pub type WignerFunction64 = grid::WignerFunction<f64>;
pub type WignerFunction32 = grid::WignerFunction<f32>;
