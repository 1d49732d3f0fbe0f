//! Uniform-grid representation of states and phase-space objects: the
//! spatial grid, wavefunctions, density matrices and the Wigner transform.

mod density;
mod wavefunction;
mod wigner;

pub use density::DensityMatrix;
pub use wavefunction::{energy_moments, prepare_gaussian, WaveFunction};
pub use wigner::{wigner_transform, WignerFunction};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Uniform spatial grid on [x_min, x_max) with n points, together with its
/// dual momentum grid of spacing dp = 2 pi / (n dx). hbar = 1 throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationGrid<T> {
    n: usize,
    x_min: T,
    x_max: T,
    dx: T,
    dp: T,
    zero_index: usize,
}

impl<T: Real> SimulationGrid<T> {
    pub fn new(n: usize, x_min: T, x_max: T) -> Result<Self> {
        if n == 0 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "n_points must be a positive power of two, got {n}"
            )));
        }
        if x_max <= x_min {
            return Err(Error::InvalidParameter(
                "x_max must exceed x_min".to_string(),
            ));
        }
        let zero = T::of(0.0);
        if x_min >= zero || x_max <= zero {
            return Err(Error::InvalidParameter(
                "x = 0 must lie strictly inside (x_min, x_max)".to_string(),
            ));
        }
        let dx = (x_max - x_min) / T::of(n as f64);
        let dp = T::of(2.0) * T::pi() / (T::of(n as f64) * dx);
        let mut zero_index = ((zero - x_min) / dx).ceil().to_f64() as usize;
        // guard against rounding in the division above
        while zero_index > 0 && x_min + dx * T::of((zero_index - 1) as f64) >= zero {
            zero_index -= 1;
        }
        while x_min + dx * T::of(zero_index as f64) < zero {
            zero_index += 1;
        }
        Ok(Self {
            n,
            x_min,
            x_max,
            dx,
            dp,
            zero_index,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn dp(&self) -> T {
        self.dp
    }

    #[inline]
    pub fn x_min(&self) -> T {
        self.x_min
    }

    #[inline]
    pub fn x_max(&self) -> T {
        self.x_max
    }

    /// Coordinate of grid point i.
    #[inline]
    pub fn x(&self, i: usize) -> T {
        self.x_min + self.dx * T::of(i as f64)
    }

    /// Momentum of FFT bin k (FFT ordering, negative branch above n/2).
    #[inline]
    pub fn momentum(&self, k: usize) -> T {
        crate::fourier::bin_momentum(k, self.n, self.dp)
    }

    /// Largest representable momentum magnitude (Nyquist).
    #[inline]
    pub fn p_max(&self) -> T {
        self.dp * T::of((self.n / 2) as f64)
    }

    /// Index of the first grid point with x >= 0. That point belongs to the
    /// positive-side projector P; x < 0 strictly belongs to the complement.
    #[inline]
    pub fn zero_index(&self) -> usize {
        self.zero_index
    }
}

/// Parameters of a Gaussian wavepacket: center x0, mean momentum p0 and
/// position width sigma (standard deviation of |psi|^2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacketSpec<T> {
    pub x0: T,
    pub p0: T,
    pub sigma: T,
}

impl<T: Real> GaussianPacketSpec<T> {
    pub fn new(x0: T, p0: T, sigma: T) -> Self {
        Self { x0, p0, sigma }
    }
}
