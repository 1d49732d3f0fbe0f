use num_complex::Complex;

use crate::fourier::{fft, ifft};
use crate::grid::{DensityMatrix, SimulationGrid, WaveFunction};
use crate::Scalar;

/// Probability current at the origin in the arrival-time sign convention,
///
///   J(t) = (i/2m) (psi* d_x psi - psi d_x psi*)|_{x=0}
///        = -(1/m) Im(psi*(0) psi'(0)),
///
/// which is positive while a left-moving packet crosses the origin, so that
/// the window integral of J is the probability of arriving in that window.
/// The derivative is spectral; the origin is the first grid point with
/// x >= 0.
pub fn current_at_origin<T: Scalar>(psi: &WaveFunction<T>) -> T {
    let zi = psi.grid().zero_index();
    let deriv = psi.spectral_derivative();
    let u = psi.amplitudes()[zi].conj() * deriv.amplitudes()[zi];
    -(u.im / psi.mass())
}

/// The same current for a mixed state,
///
///   J(t) = (i/2m) (d_x - d_y) rho(x, y)|_{x=y=0},
///
/// evaluated from the x-column and y-row of rho through the origin with
/// spectral derivatives. Reduces to `current_at_origin` on pure states.
pub fn current_qbm<T: Scalar>(rho: &DensityMatrix<T>) -> T {
    let g = rho.grid();
    let n = g.len();
    let zi = g.zero_index();
    let data = rho.data();
    // rho(x, 0) along x and rho(0, y) along y
    let mut col: Vec<Complex<T>> = (0..n).map(|i| data[i * n + zi]).collect();
    let mut row: Vec<Complex<T>> = data[zi * n..(zi + 1) * n].to_vec();
    derivative_in_place(&mut col, g);
    derivative_in_place(&mut row, g);
    let w = col[zi] - row[zi];
    // Re[(i/2m) w] = -Im(w) / 2m
    -(w.im / (T::of(2.0) * rho.mass()))
}

fn derivative_in_place<T: Scalar>(v: &mut [Complex<T>], g: &SimulationGrid<T>) {
    fft(v);
    for (k, z) in v.iter_mut().enumerate() {
        let p = g.momentum(k);
        *z = *z * Complex::new(T::of(0.0), p);
    }
    ifft(v);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{prepare_gaussian, GaussianPacketSpec, SimulationGrid};
    use crate::propagators::evolve_free_unchecked;
    use num_complex::Complex64;

    /// Closed-form free Gaussian: psi(x,t) obtained by Gaussian integration
    /// of the momentum representation, A = sigma^2 + i t / 2m.
    fn analytic_gaussian(x: f64, t: f64, x0: f64, p0: f64, sigma: f64, m: f64) -> Complex64 {
        let a = Complex64::new(sigma * sigma, t / (2.0 * m));
        let b = x - x0 - p0 * t / m;
        let pref = (2.0 * sigma * sigma / std::f64::consts::PI).powf(0.25)
            * (std::f64::consts::PI / a).sqrt()
            / (2.0 * std::f64::consts::PI).sqrt();
        let phase = Complex64::new(0.0, p0 * x - p0 * p0 * t / (2.0 * m));
        pref * (-Complex64::new(b * b, 0.0) / (4.0 * a) + phase).exp()
    }

    fn grid() -> SimulationGrid<f64> {
        // dx = 1/16, x = 0 on-grid
        SimulationGrid::new(1024, -40.0, 24.0).unwrap()
    }

    #[test]
    fn analytic_gaussian_matches_spectral_evolution() {
        // the oracle must be independent of the code under test, so first
        // pin it against the propagator it will be used to check
        let g = grid();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(10.0, -2.0, 1.0), &g, 1.0).unwrap();
        let out = evolve_free_unchecked(&psi, 5.0);
        let mut worst = 0.0_f64;
        for j in (0..g.len()).step_by(7) {
            let x = g.x(j);
            let exact = analytic_gaussian(x, 5.0, 10.0, -2.0, 1.0, 1.0);
            let got = out.amplitudes()[j];
            worst = worst.max((got - exact).norm());
        }
        assert!(worst < 1e-9, "worst amplitude deviation {worst:.3e}");
    }

    #[test]
    fn crossing_packet_matches_finite_difference_oracle() {
        // left-mover from x0 = 10 at speed 2: at t = 5 the packet straddles
        // the origin and the arrival current is positive with magnitude
        // ~ |p0|/m |psi(0)|^2
        let g = grid();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(10.0, -2.0, 1.0), &g, 1.0).unwrap();
        let out = evolve_free_unchecked(&psi, 5.0);
        let j = current_at_origin(&out);

        let h = 1e-5;
        let at = |x: f64| analytic_gaussian(x, 5.0, 10.0, -2.0, 1.0, 1.0);
        let dpsi = (at(h) - at(-h)) / (2.0 * h);
        let j_oracle = -(at(0.0).conj() * dpsi).im;

        assert!(j > 0.0, "arriving left-mover must have positive current");
        assert!(
            (j - j_oracle).abs() / j_oracle.abs() < 1e-6,
            "J = {j:.9e}, oracle {j_oracle:.9e}"
        );
        let density = at(0.0).norm_sqr();
        assert!((j - 2.0 * density).abs() / j < 0.05);
    }

    #[test]
    fn real_state_has_vanishing_current() {
        let g = grid();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(0.0, 0.0, 1.0), &g, 1.0).unwrap();
        // p0 = 0 gives purely real amplitudes; only FFT rounding survives
        assert!(current_at_origin(&psi).abs() < 1e-14);
    }

    #[test]
    fn current_is_tiny_where_the_state_is_tiny() {
        let g = grid();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(15.0, -2.0, 1.0), &g, 1.0).unwrap();
        assert!(current_at_origin(&psi).abs() < 1e-12);
    }

    #[test]
    fn mixed_state_current_reduces_to_pure_current() {
        let g = SimulationGrid::<f64>::new(256, -16.0, 16.0).unwrap();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let out = evolve_free_unchecked(&psi, 2.0);
        let rho = DensityMatrix::from_pure(&out);
        let jp = current_at_origin(&out);
        let jm = current_qbm(&rho);
        assert!((jp - jm).abs() < 1e-10, "pure {jp:.6e} vs mixed {jm:.6e}");
    }

    #[test]
    fn diagonal_real_density_has_zero_current() {
        // a classical (diagonal, real) mixture carries no coherence between
        // x and y, so the two directional derivatives cancel identically
        let g = SimulationGrid::new(128, -16.0, 16.0).unwrap();
        let psi = prepare_gaussian(&GaussianPacketSpec::new(1.0, -1.0, 1.0), &g, 1.0).unwrap();
        let mut rho = DensityMatrix::from_pure(&psi);
        let n = g.len();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    rho.set(i, j, Complex::new(0.0, 0.0));
                } else {
                    let d = rho.get(i, i).re;
                    rho.set(i, i, Complex::new(d, 0.0));
                }
            }
        }
        assert_eq!(current_qbm(&rho), 0.0);
    }
}
