use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{fft, signed_bin};
use crate::Scalar;

use super::{DensityMatrix, SimulationGrid};

/// W(q, p) on the phase-space lattice. The momentum axis inherits spacing
/// pi/(n dx), half the wavefunction momentum spacing, because the Fourier
/// variable xi of the Wigner integral advances by 2 dx per index step.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerFunction<T> {
    grid: SimulationGrid<T>,
    /// values[j * n + k]: q index j, momentum bin k (FFT ordering)
    values: Vec<T>,
}

impl<T: Scalar> WignerFunction<T> {
    #[inline]
    pub fn grid(&self) -> &SimulationGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Momentum-axis spacing of the phase-space lattice.
    #[inline]
    pub fn dp(&self) -> T {
        self.grid.dp() * T::of(0.5)
    }

    /// Momentum of phase-space bin k.
    #[inline]
    pub fn momentum(&self, k: usize) -> T {
        self.dp() * T::of(signed_bin(k, self.grid.len()) as f64)
    }

    #[inline]
    pub fn value(&self, j: usize, k: usize) -> T {
        self.values[j * self.grid.len() + k]
    }

    pub fn integral(&self) -> T {
        let mut s = T::of(0.0);
        for v in &self.values {
            s = s + *v;
        }
        s * self.grid.dx() * self.dp()
    }

    /// integral of W over p at each q — recovers the position density.
    pub fn marginal_position(&self) -> Vec<T> {
        let n = self.grid.len();
        (0..n)
            .map(|j| {
                let mut s = T::of(0.0);
                for k in 0..n {
                    s = s + self.values[j * n + k];
                }
                s * self.dp()
            })
            .collect()
    }

    /// integral of W over q at each momentum bin.
    pub fn marginal_momentum(&self) -> Vec<T> {
        let n = self.grid.len();
        (0..n)
            .map(|k| {
                let mut s = T::of(0.0);
                for j in 0..n {
                    s = s + self.values[j * n + k];
                }
                s * self.grid.dx()
            })
            .collect()
    }

    pub fn min_value(&self) -> T {
        let mut m = self.values[0];
        for v in &self.values {
            m = m.min(*v);
        }
        m
    }

    /// Integrated negative part, a positivity diagnostic: zero iff W >= 0.
    pub fn negative_volume(&self) -> T {
        let zero = T::of(0.0);
        let mut s = zero;
        for v in &self.values {
            if *v < zero {
                s = s - *v;
            }
        }
        s * self.grid.dx() * self.dp()
    }
}

/// W(q,p) = (1/2 pi) int d xi rho(q + xi/2, q - xi/2) e^{-i p xi},
/// evaluated along anti-diagonals of rho by FFT. Entries reaching outside
/// the grid are treated as zero (hard truncation).
pub fn wigner_transform<T: Scalar>(rho: &DensityMatrix<T>) -> Result<WignerFunction<T>> {
    let defect = rho.hermiticity_defect();
    if defect.to_f64() > 1e-10 {
        return Err(Error::NonHermitian {
            max_asym: defect.to_f64(),
        });
    }
    let grid = rho.grid().clone();
    let n = grid.len();
    let zero = Complex::new(T::of(0.0), T::of(0.0));
    let scale = grid.dx() / T::pi();
    let mut values = vec![T::of(0.0); n * n];
    let mut row = vec![zero; n];
    let half = (n / 2) as i64;
    for j in 0..n {
        for slot in row.iter_mut() {
            *slot = zero;
        }
        for l in -half..half {
            let a = j as i64 + l;
            let b = j as i64 - l;
            if a < 0 || b < 0 || a >= n as i64 || b >= n as i64 {
                continue;
            }
            let idx = l.rem_euclid(n as i64) as usize;
            row[idx] = rho.get(a as usize, b as usize);
        }
        fft(&mut row);
        for k in 0..n {
            values[j * n + k] = row[k].re * scale;
        }
    }
    Ok(WignerFunction { grid, values })
}
