use num_complex::Complex;

use crate::error::{Error, Result};
use crate::Scalar;

use super::{SimulationGrid, WaveFunction};

/// Mixed state on the grid: rho(x_i, y_j), row-major, with the continuum
/// normalization Tr rho = sum_i rho(x_i, x_i) dx.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    grid: SimulationGrid<T>,
    data: Vec<Complex<T>>,
    mass: T,
}

impl<T: Scalar> DensityMatrix<T> {
    pub fn new(grid: SimulationGrid<T>, data: Vec<Complex<T>>, mass: T) -> Result<Self> {
        if data.len() != grid.len() * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "density matrix data length {} does not match grid size {}^2",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, data, mass })
    }

    pub fn from_pure(psi: &WaveFunction<T>) -> Self {
        let n = psi.grid().len();
        let a = psi.amplitudes();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(a[i] * a[j].conj());
            }
        }
        Self {
            grid: psi.grid().clone(),
            data,
            mass: psi.mass(),
        }
    }

    #[inline]
    pub fn grid(&self) -> &SimulationGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn mass(&self) -> T {
        self.mass
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.grid.len() == 0
    }

    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.data[i * self.grid.len() + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        let n = self.grid.len();
        self.data[i * n + j] = v;
    }

    pub fn trace(&self) -> T {
        let n = self.grid.len();
        let mut s = T::of(0.0);
        for i in 0..n {
            s = s + self.data[i * n + i].re;
        }
        s * self.grid.dx()
    }

    /// Tr(rho^2) dx^2 — equals 1 for pure states.
    pub fn purity(&self) -> T {
        let mut s = T::of(0.0);
        for z in &self.data {
            s = s + z.norm_sqr();
        }
        s * self.grid.dx() * self.grid.dx()
    }

    pub fn position_density(&self) -> Vec<T> {
        let n = self.grid.len();
        (0..n).map(|i| self.data[i * n + i].re).collect()
    }

    /// Probability of x >= 0 (diagonal weight on the positive side).
    pub fn prob_positive(&self) -> T {
        let n = self.grid.len();
        let mut s = T::of(0.0);
        for i in self.grid.zero_index()..n {
            s = s + self.data[i * n + i].re;
        }
        s * self.grid.dx()
    }

    /// Largest |rho(x,y) - conj(rho(y,x))| over the matrix.
    pub fn hermiticity_defect(&self) -> T {
        let n = self.grid.len();
        let mut worst = T::of(0.0);
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm_sqr().sqrt();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Replace rho by (rho + rho^dagger)/2.
    pub fn hermitize(&mut self) {
        let n = self.grid.len();
        let half = T::of(0.5);
        for i in 0..n {
            for j in i..n {
                let avg = (self.data[i * n + j] + self.data[j * n + i].conj()).scale(half);
                self.data[i * n + j] = avg;
                self.data[j * n + i] = avg.conj();
            }
        }
    }

    /// Check Hermiticity, unit trace and approximate positivity.
    pub fn validate(&self) -> Result<()> {
        let defect = self.hermiticity_defect();
        if defect.to_f64() > 1e-10 {
            return Err(Error::NonHermitian {
                max_asym: defect.to_f64(),
            });
        }
        let trace_err = (self.trace() - T::of(1.0)).abs();
        if trace_err.to_f64() > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "density matrix trace deviates from 1 by {:.3e}",
                trace_err.to_f64()
            )));
        }
        let (vals, _) = T::hermitian_eigen(self.grid.len(), &self.data);
        let min = vals[0] * self.grid.dx();
        if min.to_f64() < -1e-8 {
            return Err(Error::NotPositiveDefinite {
                detail: format!("smallest eigenvalue {:.3e}", min.to_f64()),
            });
        }
        Ok(())
    }

    /// Apply P . P (keep only x >= 0 on both sides).
    pub fn project_positive(&mut self) {
        let n = self.grid.len();
        let zi = self.grid.zero_index();
        let zero = Complex::new(T::of(0.0), T::of(0.0));
        for i in 0..n {
            for j in 0..n {
                if i < zi || j < zi {
                    self.data[i * n + j] = zero;
                }
            }
        }
    }

    /// Apply Pbar . Pbar (keep only x < 0 on both sides).
    pub fn project_negative(&mut self) {
        let n = self.grid.len();
        let zi = self.grid.zero_index();
        let zero = Complex::new(T::of(0.0), T::of(0.0));
        for i in 0..n {
            for j in 0..n {
                if i >= zi || j >= zi {
                    self.data[i * n + j] = zero;
                }
            }
        }
    }

    pub fn scale(&mut self, c: T) {
        for z in &mut self.data {
            *z = z.scale(c);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: T) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a = *a + b.scale(c);
        }
    }

    /// (1/2) sum |eigenvalues(rho - sigma)| dx.
    pub fn trace_distance(&self, other: &Self) -> T {
        let n = self.grid.len();
        let diff: Vec<Complex<T>> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        let (vals, _) = T::hermitian_eigen(n, &diff);
        let mut s = T::of(0.0);
        for v in vals {
            s = s + v.abs();
        }
        s * self.grid.dx() * T::of(0.5)
    }

    pub fn expectation_x(&self) -> T {
        let n = self.grid.len();
        let mut s = T::of(0.0);
        for i in 0..n {
            s = s + self.grid.x(i) * self.data[i * n + i].re;
        }
        s * self.grid.dx() / self.trace()
    }
}
