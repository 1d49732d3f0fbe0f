use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{bin_momentum, fft, ifft};
use crate::grid::GaussianPacketSpec;
use crate::scalar::cis;
use crate::Scalar;

use super::QBMParams;

/// Density matrix in mean/difference coordinates X = (x+y)/2, xi = x - y,
/// on a rectangular lattice. In these coordinates the QBM equation
///
///   d rho/dt = (i/m) dX dxi rho - D xi^2 rho
///
/// becomes, after a Fourier transform X -> K, an advection in xi with a decay
/// along characteristics, and has the exact one-shot solution
///
///   rho_hat(K, xi, t) = exp(-D (t xi^2 - xi K t^2/m + K^2 t^3 / 3 m^2))
///                       * rho_hat_0(K, xi - K t/m).
///
/// This makes long weak-environment evolutions (t >> tau_l) affordable: the
/// X axis can be thousands of points while the xi axis stays short, because
/// the environment confines coherence to |xi| ~ 1/sqrt(D t).
#[derive(Debug, Clone)]
pub struct CoherenceField<T> {
    nx: usize,
    nxi: usize,
    x_min: T,
    dx: T,
    xi_half: T,
    dxi: T,
    mass: T,
    /// values[ix * nxi + ixi] = rho(X_ix, xi_ixi)
    values: Vec<Complex<T>>,
}

impl<T: Scalar> CoherenceField<T> {
    /// Pure Gaussian initial state, written directly in (X, xi):
    /// rho(X, xi) = psi(X + xi/2) psi*(X - xi/2) in closed form.
    pub fn from_gaussian(
        spec: &GaussianPacketSpec<T>,
        nx: usize,
        x_min: T,
        x_max: T,
        nxi: usize,
        xi_half: T,
        mass: T,
    ) -> Result<Self> {
        if !nx.is_power_of_two() || !nxi.is_power_of_two() {
            return Err(Error::InvalidParameter(
                "coherence-field lattice sizes must be powers of two".to_string(),
            ));
        }
        if x_max <= x_min || xi_half <= T::of(0.0) {
            return Err(Error::InvalidParameter(
                "coherence-field extents must be positive".to_string(),
            ));
        }
        let dx = (x_max - x_min) / T::of(nx as f64);
        let dxi = T::of(2.0) * xi_half / T::of(nxi as f64);
        let two = T::of(2.0);
        let four = T::of(4.0);
        let s2 = spec.sigma * spec.sigma;
        let norm = T::of(1.0) / ((two * T::pi()).sqrt() * spec.sigma);
        let mut values = Vec::with_capacity(nx * nxi);
        for ix in 0..nx {
            let x_mean = x_min + dx * T::of(ix as f64);
            for ixi in 0..nxi {
                let xi = -xi_half + dxi * T::of(ixi as f64);
                let a = x_mean + xi * T::of(0.5) - spec.x0;
                let b = x_mean - xi * T::of(0.5) - spec.x0;
                let env = norm * (-(a * a + b * b) / (four * s2)).exp();
                values.push(cis(spec.p0 * xi).scale(env));
            }
        }
        Ok(Self {
            nx,
            nxi,
            x_min,
            dx,
            xi_half,
            dxi,
            mass,
            values,
        })
    }

    #[inline]
    pub fn nx(&self) -> usize {
        self.nx
    }

    #[inline]
    pub fn nxi(&self) -> usize {
        self.nxi
    }

    #[inline]
    pub fn dx(&self) -> T {
        self.dx
    }

    #[inline]
    pub fn x(&self, ix: usize) -> T {
        self.x_min + self.dx * T::of(ix as f64)
    }

    #[inline]
    pub fn xi(&self, ixi: usize) -> T {
        -self.xi_half + self.dxi * T::of(ixi as f64)
    }

    /// Exact one-shot QBM evolution by t.
    pub fn evolve(&mut self, t: T, params: &QBMParams<T>) {
        if t == T::of(0.0) {
            return;
        }
        let nx = self.nx;
        let nxi = self.nxi;
        let m = self.mass;
        let d = params.d_coeff();
        let dk_x = T::of(2.0) * T::pi() / (T::of(nx as f64) * self.dx);
        let dk_xi = T::of(2.0) * T::pi() / (T::of(nxi as f64) * self.dxi);

        // Fourier transform along X (columns of the row-major layout)
        let mut col = vec![Complex::new(T::of(0.0), T::of(0.0)); nx];
        let mut cols_fft: Vec<Vec<Complex<T>>> = Vec::with_capacity(nxi);
        for ixi in 0..nxi {
            for ix in 0..nx {
                col[ix] = self.values[ix * nxi + ixi];
            }
            fft(&mut col);
            cols_fft.push(col.clone());
        }

        // per-K: spectral shift in xi by K t/m, then decay along the
        // characteristic
        let mut row = vec![Complex::new(T::of(0.0), T::of(0.0)); nxi];
        for kx in 0..nx {
            let big_k = bin_momentum(kx, nx, dk_x);
            let shift = big_k * t / m;
            for ixi in 0..nxi {
                row[ixi] = cols_fft[ixi][kx];
            }
            // shift: f(xi) -> f(xi - shift) via phase in the xi-frequency
            fft(&mut row);
            for (kk, z) in row.iter_mut().enumerate() {
                let kappa = bin_momentum(kk, nxi, dk_xi);
                *z = *z * cis(-kappa * shift);
            }
            ifft(&mut row);
            // decay: exp(-D (t xi^2 - xi K t^2/m + K^2 t^3/(3 m^2)))
            for ixi in 0..nxi {
                let xi = self.xi(ixi);
                let expo = -d
                    * (t * xi * xi - xi * big_k * t * t / m
                        + big_k * big_k * t * t * t / (T::of(3.0) * m * m));
                row[ixi] = row[ixi].scale(expo.exp());
            }
            for ixi in 0..nxi {
                cols_fft[ixi][kx] = row[ixi];
            }
        }

        // back to X space
        for ixi in 0..nxi {
            let c = &mut cols_fft[ixi];
            ifft(c);
            for ix in 0..nx {
                self.values[ix * nxi + ixi] = c[ix];
            }
        }
    }

    /// Apply Pbar . Pbar: keep only points with both x = X + xi/2 < 0 and
    /// y = X - xi/2 < 0.
    pub fn project_negative(&mut self) {
        let zero = Complex::new(T::of(0.0), T::of(0.0));
        let half = T::of(0.5);
        for ix in 0..self.nx {
            let x_mean = self.x(ix);
            for ixi in 0..self.nxi {
                let xi = self.xi(ixi);
                let x = x_mean + xi * half;
                let y = x_mean - xi * half;
                if x >= T::of(0.0) || y >= T::of(0.0) {
                    self.values[ix * self.nxi + ixi] = zero;
                }
            }
        }
    }

    /// Index of the xi = 0 row (exact: the lattice is symmetric).
    fn xi_zero_index(&self) -> usize {
        self.nxi / 2
    }

    /// Tr rho = int rho(X, 0) dX.
    pub fn trace(&self) -> T {
        let i0 = self.xi_zero_index();
        let mut s = T::of(0.0);
        for ix in 0..self.nx {
            s = s + self.values[ix * self.nxi + i0].re;
        }
        s * self.dx
    }

    /// Probability of x >= 0 on the diagonal.
    pub fn prob_positive(&self) -> T {
        let i0 = self.xi_zero_index();
        let mut s = T::of(0.0);
        for ix in 0..self.nx {
            if self.x(ix) >= T::of(0.0) {
                s = s + self.values[ix * self.nxi + i0].re;
            }
        }
        s * self.dx
    }

    pub fn expectation_x(&self) -> T {
        let i0 = self.xi_zero_index();
        let mut s = T::of(0.0);
        let mut w = T::of(0.0);
        for ix in 0..self.nx {
            let v = self.values[ix * self.nxi + i0].re;
            s = s + self.x(ix) * v;
            w = w + v;
        }
        s / w
    }
}
