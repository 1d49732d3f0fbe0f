//! Time-evolution engines: free unitary propagation, the complex absorbing
//! potential, pulsed projective (Zeno) strings, the Dirichlet-wall restricted
//! propagator, and quantum Brownian motion in stepper, analytic-kernel and
//! coherence-field form.

mod cap;
mod coherence;
mod equivalence;
mod free;
mod pulsed;
mod qbm;
mod restricted;

pub use cap::{evolve_complex_potential, evolve_complex_potential_steps};
pub use coherence::CoherenceField;
pub use equivalence::{equivalence_check, EquivalenceReport};
pub use free::{evolve_free, evolve_free_density, evolve_free_unchecked};
pub use pulsed::evolve_pulsed;
pub use qbm::{channel_evolve_density, qbm_evolve, qbm_kernel_propagate, qbm_step};
pub use restricted::restricted_propagate;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The absorbing potential -i V0 theta(-x): constant strength on x < 0,
/// nothing elsewhere, no smoothing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexPotentialSpec<T> {
    v0: T,
}

impl<T: Real> ComplexPotentialSpec<T> {
    pub fn new(v0: T) -> Result<Self> {
        if v0 < T::of(0.0) || !v0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "absorption strength V0 must be non-negative, got {}",
                v0.to_f64()
            )));
        }
        Ok(Self { v0 })
    }

    #[inline]
    pub fn v0(&self) -> T {
        self.v0
    }
}

/// Projection schedule for the pulsed (Zeno) string: n_steps projections
/// spaced epsilon apart, total duration tau = n_steps * epsilon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulsedSchedule<T> {
    epsilon: T,
    n_steps: usize,
}

impl<T: Real> PulsedSchedule<T> {
    pub fn new(epsilon: T, n_steps: usize) -> Result<Self> {
        if epsilon <= T::of(0.0) || !epsilon.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "projection spacing epsilon must be positive, got {}",
                epsilon.to_f64()
            )));
        }
        Ok(Self { epsilon, n_steps })
    }

    /// Schedule covering total time tau with n_steps projections.
    pub fn covering(tau: T, n_steps: usize) -> Result<Self> {
        if n_steps == 0 {
            return Err(Error::InvalidParameter(
                "covering schedule needs at least one step".to_string(),
            ));
        }
        Self::new(tau / T::of(n_steps as f64), n_steps)
    }

    #[inline]
    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    #[inline]
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    #[inline]
    pub fn tau(&self) -> T {
        self.epsilon * T::of(self.n_steps as f64)
    }
}

/// High-temperature, negligible-dissipation quantum Brownian motion:
/// d rho/dt = (i/2m)(d^2_x - d^2_y) rho - D (x-y)^2 rho.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QBMParams<T> {
    d_coeff: T,
}

impl<T: Real> QBMParams<T> {
    pub fn new(d_coeff: T) -> Result<Self> {
        if d_coeff <= T::of(0.0) || !d_coeff.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "decoherence coefficient D must be positive, got {}",
                d_coeff.to_f64()
            )));
        }
        Ok(Self { d_coeff })
    }

    #[inline]
    pub fn d_coeff(&self) -> T {
        self.d_coeff
    }

    /// Localization time tau_l = sqrt(2m/D): the environment suppresses
    /// spatial coherences on this scale.
    pub fn tau_l(&self, m: T) -> T {
        (T::of(2.0) * m / self.d_coeff).sqrt()
    }

    /// Near-deterministic horizon tau_s = p0^2/D: momentum diffusion has not
    /// randomized the packet's direction before this.
    pub fn tau_s(&self, p0: T) -> T {
        p0 * p0 / self.d_coeff
    }
}

/// Which dynamics connects the scheduled times of an observable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Channel<T> {
    Unitary,
    Qbm(QBMParams<T>),
}
