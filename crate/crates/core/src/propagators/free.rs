use num_complex::Complex;

use crate::error::{Error, Result};
use crate::fourier::{fft, ifft};
use crate::grid::{DensityMatrix, WaveFunction};
use crate::scalar::cis;
use crate::Scalar;

/// Free spectral propagation: multiply each momentum component by
/// e^{-i p^2 t / 2m}. No boundary checks — see [`evolve_free`].
pub fn evolve_free_unchecked<T: Scalar>(psi: &WaveFunction<T>, t: T) -> WaveFunction<T> {
    if t == T::of(0.0) {
        return psi.clone();
    }
    let grid = psi.grid().clone();
    let two_m = T::of(2.0) * psi.mass();
    let mut data = psi.amplitudes().to_vec();
    fft(&mut data);
    for (k, z) in data.iter_mut().enumerate() {
        let p = grid.momentum(k);
        *z = *z * cis(-p * p * t / two_m);
    }
    ifft(&mut data);
    WaveFunction::new(grid, data, psi.mass()).expect("length preserved")
}

/// Free propagation with a preflight boundary check: a Gaussian estimate of
/// the evolved packet (center <x> + <p>t/m, width sigma_x + sigma_p t/m) must
/// clear both grid edges by 8 widths, keeping edge density below ~1e-12.
pub fn evolve_free<T: Scalar>(psi: &WaveFunction<T>, t: T) -> Result<WaveFunction<T>> {
    if t < T::of(0.0) {
        return Err(Error::InvalidParameter(
            "evolution time must be non-negative".to_string(),
        ));
    }
    let grid = psi.grid();
    let m = psi.mass();
    let mean = psi.expectation_x() + psi.expectation_p() * t / m;
    let width = psi.variance_x().sqrt() + psi.variance_p().sqrt() * t / m;
    let clearance = T::of(8.0) * width;
    let low = mean - clearance;
    let high = mean + clearance;
    if low < grid.x_min() || high > grid.x_max() {
        let d = (mean - grid.x_min()).abs().min((grid.x_max() - mean).abs());
        let leak = (-d * d / (T::of(2.0) * width * width)).exp()
            / ((T::of(2.0) * T::pi()).sqrt() * width)
            * grid.dx();
        return Err(Error::BoundaryLeak {
            leak: leak.to_f64(),
            threshold: 1e-12,
        });
    }
    Ok(evolve_free_unchecked(psi, t))
}

/// U rho U^dagger for the free unitary: forward phases on the ket (x) index,
/// conjugate phases on the bra (y) index.
pub fn evolve_free_density<T: Scalar>(rho: &DensityMatrix<T>, t: T) -> DensityMatrix<T> {
    if t == T::of(0.0) {
        return rho.clone();
    }
    let grid = rho.grid().clone();
    let n = grid.len();
    let two_m = T::of(2.0) * rho.mass();
    let phases: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let p = grid.momentum(k);
            cis(-p * p * t / two_m)
        })
        .collect();

    let mut out = rho.clone();
    let data = out.data_mut();
    // bra index: each row transforms with the conjugate phase
    let mut buf = vec![Complex::new(T::of(0.0), T::of(0.0)); n];
    for i in 0..n {
        let row = &mut data[i * n..(i + 1) * n];
        fft(row);
        for (k, z) in row.iter_mut().enumerate() {
            *z = *z * phases[k].conj();
        }
        ifft(row);
    }
    // ket index: columns with the forward phase
    for j in 0..n {
        for i in 0..n {
            buf[i] = data[i * n + j];
        }
        fft(&mut buf);
        for (k, z) in buf.iter_mut().enumerate() {
            *z = *z * phases[k];
        }
        ifft(&mut buf);
        for i in 0..n {
            data[i * n + j] = buf[i];
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{prepare_gaussian, GaussianPacketSpec, SimulationGrid};

    fn packet() -> WaveFunction<f64> {
        let g = SimulationGrid::new(1024, -30.0, 34.0).unwrap();
        prepare_gaussian(&GaussianPacketSpec::new(10.0, -2.0, 1.0), &g, 1.0).unwrap()
    }

    #[test]
    fn zero_time_is_identity() {
        let psi = packet();
        let out = evolve_free(&psi, 0.0).unwrap();
        assert!(psi.l2_distance(&out) == 0.0);
    }

    #[test]
    fn ehrenfest_center_motion() {
        let psi = packet();
        let out = evolve_free(&psi, 2.0).unwrap();
        assert!((out.expectation_x() - 6.0).abs() < 1e-8);
        assert!((out.expectation_p() + 2.0).abs() < 1e-10);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_spreading_matches_closed_form() {
        // var(t) = sigma^2 + t^2/(4 sigma^2 m^2) = 1 + 1 = 2 at t = 2
        let psi = packet();
        let out = evolve_free(&psi, 2.0).unwrap();
        assert!((out.variance_x() - 2.0).abs() < 1e-8);
    }

    #[test]
    fn semigroup_property() {
        let psi = packet();
        let ab = evolve_free(&evolve_free(&psi, 1.3).unwrap(), 0.9).unwrap();
        let once = evolve_free(&psi, 2.2).unwrap();
        assert!(ab.l2_distance(&once) < 1e-10);
    }

    #[test]
    fn rejects_runs_that_would_hit_the_boundary() {
        let psi = packet();
        assert!(matches!(
            evolve_free(&psi, 50.0),
            Err(Error::BoundaryLeak { .. })
        ));
        assert!(evolve_free(&psi, -1.0).is_err());
    }

    #[test]
    fn density_evolution_matches_pure_state() {
        let psi = packet();
        let rho = DensityMatrix::from_pure(&psi);
        let rho_t = evolve_free_density(&rho, 2.0);
        let psi_t = evolve_free(&psi, 2.0).unwrap();
        let rho_ref = DensityMatrix::from_pure(&psi_t);
        let mut worst = 0.0_f64;
        for (a, b) in rho_t.data().iter().zip(rho_ref.data()) {
            worst = worst.max((a - b).norm_sqr().sqrt());
        }
        assert!(worst < 1e-12);
        assert!((rho_t.trace() - 1.0).abs() < 1e-12);
    }
}
