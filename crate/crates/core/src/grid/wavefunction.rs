use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{fft, ifft};
use crate::scalar::cis;
use crate::Scalar;

use super::{GaussianPacketSpec, SimulationGrid};

/// Density threshold (per grid cell) above which a state is considered to
/// touch the grid boundary.
pub const BOUNDARY_LEAK_THRESHOLD: f64 = 1e-12;

/// A pure state on the spatial grid.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction<T> {
    grid: SimulationGrid<T>,
    amplitudes: Vec<Complex<T>>,
    mass: T,
}

impl<T: Scalar> WaveFunction<T> {
    pub fn new(grid: SimulationGrid<T>, amplitudes: Vec<Complex<T>>, mass: T) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::InvalidParameter(format!(
                "amplitude vector length {} does not match grid size {}",
                amplitudes.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid,
            amplitudes,
            mass,
        })
    }

    pub fn zeros(grid: SimulationGrid<T>, mass: T) -> Self {
        let n = grid.len();
        Self {
            grid,
            amplitudes: vec![Complex::new(T::of(0.0), T::of(0.0)); n],
            mass,
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
    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    #[inline]
    pub fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amplitudes
    }

    pub fn norm_sqr(&self) -> T {
        let mut s = T::of(0.0);
        for a in &self.amplitudes {
            s = s + a.norm_sqr();
        }
        s * self.grid.dx()
    }

    pub fn norm(&self) -> T {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > T::of(0.0) {
            let inv = T::of(1.0) / n;
            for a in &mut self.amplitudes {
                *a = a.scale(inv);
            }
        }
    }

    /// <self|other> with the grid measure.
    pub fn inner(&self, other: &Self) -> Complex<T> {
        let mut s = Complex::new(T::of(0.0), T::of(0.0));
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            s = s + a.conj() * b;
        }
        s * self.grid.dx()
    }

    pub fn l2_distance(&self, other: &Self) -> T {
        let mut s = T::of(0.0);
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            s = s + (a - b).norm_sqr();
        }
        (s * self.grid.dx()).sqrt()
    }

    pub fn scale(&mut self, c: Complex<T>) {
        for a in &mut self.amplitudes {
            *a = *a * c;
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: Complex<T>) {
        for (a, b) in self.amplitudes.iter_mut().zip(&other.amplitudes) {
            *a = *a + c * b;
        }
    }

    /// Momentum-space amplitudes (FFT bin ordering), normalized so that
    /// sum |psi_tilde|^2 dp = sum |psi|^2 dx.
    pub fn momentum_rep(&self) -> Vec<Complex<T>> {
        let n = self.grid.len();
        let mut data = self.amplitudes.clone();
        fft(&mut data);
        let scale = self.grid.dx() / (T::of(2.0) * T::pi()).sqrt();
        for (k, z) in data.iter_mut().enumerate() {
            let p = self.grid.momentum(k);
            *z = *z * cis(-p * self.grid.x_min()).scale(scale);
        }
        let _ = n;
        data
    }

    pub fn from_momentum_rep(
        grid: SimulationGrid<T>,
        mut data: Vec<Complex<T>>,
        mass: T,
    ) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidParameter(
                "momentum representation length does not match grid".to_string(),
            ));
        }
        let n = grid.len();
        let scale = grid.dp() * T::of(n as f64) / (T::of(2.0) * T::pi()).sqrt();
        for (k, z) in data.iter_mut().enumerate() {
            let p = grid.momentum(k);
            *z = *z * cis(p * grid.x_min()).scale(scale);
        }
        ifft(&mut data);
        WaveFunction::new(grid, data, mass)
    }

    pub fn expectation_x(&self) -> T {
        let mut s = T::of(0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            s = s + self.grid.x(i) * a.norm_sqr();
        }
        s * self.grid.dx() / self.norm_sqr()
    }

    pub fn variance_x(&self) -> T {
        let mean = self.expectation_x();
        let mut s = T::of(0.0);
        for (i, a) in self.amplitudes.iter().enumerate() {
            let d = self.grid.x(i) - mean;
            s = s + d * d * a.norm_sqr();
        }
        s * self.grid.dx() / self.norm_sqr()
    }

    pub fn expectation_p(&self) -> T {
        let rep = self.momentum_rep();
        let mut s = T::of(0.0);
        let mut w = T::of(0.0);
        for (k, z) in rep.iter().enumerate() {
            let d = z.norm_sqr();
            s = s + self.grid.momentum(k) * d;
            w = w + d;
        }
        s / w
    }

    pub fn variance_p(&self) -> T {
        let rep = self.momentum_rep();
        let mut s = T::of(0.0);
        let mut m = T::of(0.0);
        let mut w = T::of(0.0);
        for (k, z) in rep.iter().enumerate() {
            let d = z.norm_sqr();
            let p = self.grid.momentum(k);
            s = s + p * p * d;
            m = m + p * d;
            w = w + d;
        }
        let mean = m / w;
        s / w - mean * mean
    }

    /// Probability of x >= 0 (the projector P of the arrival problem).
    pub fn prob_positive(&self) -> T {
        let mut s = T::of(0.0);
        for a in &self.amplitudes[self.grid.zero_index()..] {
            s = s + a.norm_sqr();
        }
        s * self.grid.dx()
    }

    /// Zero out all amplitude at x < 0 (apply P).
    pub fn project_positive(&mut self) {
        let zero = Complex::new(T::of(0.0), T::of(0.0));
        let zi = self.grid.zero_index();
        for a in &mut self.amplitudes[..zi] {
            *a = zero;
        }
    }

    /// Zero out all amplitude at x >= 0 (apply the complement projector).
    pub fn project_negative(&mut self) {
        let zero = Complex::new(T::of(0.0), T::of(0.0));
        let zi = self.grid.zero_index();
        for a in &mut self.amplitudes[zi..] {
            *a = zero;
        }
    }

    /// Probability density sitting in the outermost grid cells.
    pub fn edge_leak(&self) -> T {
        let n = self.grid.len();
        (self.amplitudes[0].norm_sqr() + self.amplitudes[n - 1].norm_sqr()) * self.grid.dx()
    }

    /// d psi / dx computed spectrally.
    pub fn spectral_derivative(&self) -> Self {
        let n = self.grid.len();
        let mut data = self.amplitudes.clone();
        fft(&mut data);
        for (k, z) in data.iter_mut().enumerate() {
            let p = self.grid.momentum(k);
            *z = *z * Complex::new(T::of(0.0), p);
        }
        ifft(&mut data);
        let _ = n;
        Self {
            grid: self.grid.clone(),
            amplitudes: data,
            mass: self.mass,
        }
    }
}

/// Build a normalized Gaussian packet, checking that the grid can hold it.
pub fn prepare_gaussian<T: Scalar>(
    spec: &GaussianPacketSpec<T>,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<WaveFunction<T>> {
    let four = T::of(4.0);
    if spec.sigma < four * grid.dx() {
        return Err(Error::UnresolvableWidth {
            sigma: spec.sigma.to_f64(),
            dx: grid.dx().to_f64(),
        });
    }
    let half = T::of(0.5);
    if spec.p0.abs() > half * grid.p_max() {
        return Err(Error::Aliasing {
            p0: spec.p0.to_f64(),
            p_max: grid.p_max().to_f64(),
        });
    }
    let two = T::of(2.0);
    let s2 = spec.sigma * spec.sigma;
    // analytic tail density at the grid edges
    let norm = T::of(1.0) / ((two * T::pi()).sqrt() * spec.sigma);
    let tail = |x: T| {
        let d = x - spec.x0;
        norm * (-d * d / (two * s2)).exp() * grid.dx()
    };
    let leak = tail(grid.x_min()).max(tail(grid.x(grid.len() - 1)));
    let threshold = T::of(BOUNDARY_LEAK_THRESHOLD);
    if leak > threshold {
        return Err(Error::BoundaryLeak {
            leak: leak.to_f64(),
            threshold: BOUNDARY_LEAK_THRESHOLD,
        });
    }
    let amp_norm = T::of(1.0) / ((two * T::pi()).sqrt() * spec.sigma).sqrt();
    let mut amplitudes = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let x = grid.x(i);
        let d = x - spec.x0;
        let gauss = amp_norm * (-d * d / (four * s2)).exp();
        amplitudes.push(cis(spec.p0 * x).scale(gauss));
    }
    let mut psi = WaveFunction::new(grid.clone(), amplitudes, mass)?;
    psi.normalize();
    Ok(psi)
}

/// Mean energy and energy spread of a free-particle state, both computed
/// spectrally: E = <p^2>/2m, deltaH = sqrt(<H^2> - <H>^2).
pub fn energy_moments<T: Scalar>(psi: &WaveFunction<T>) -> (T, T) {
    let rep = psi.momentum_rep();
    let grid = psi.grid();
    let two_m = T::of(2.0) * psi.mass();
    let mut e1 = T::of(0.0);
    let mut e2 = T::of(0.0);
    let mut w = T::of(0.0);
    for (k, z) in rep.iter().enumerate() {
        let p = grid.momentum(k);
        let h = p * p / two_m;
        let d = z.norm_sqr();
        e1 = e1 + h * d;
        e2 = e2 + h * h * d;
        w = w + d;
    }
    let e = e1 / w;
    let var = (e2 / w - e * e).max(T::of(0.0));
    (e, var.sqrt())
}
