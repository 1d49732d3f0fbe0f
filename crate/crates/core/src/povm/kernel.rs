use crate::error::{Error, Result};
use crate::scalar::Real;

/// A point z = (p, q) = (z0, z1) of the single-particle phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint<T> {
    /// Momentum component z0.
    pub p: T,
    /// Position component z1.
    pub q: T,
}

impl<T: Real> PhasePoint<T> {
    #[inline]
    pub fn new(p: T, q: T) -> Self {
        Self { p, q }
    }

    #[inline]
    pub(crate) fn is_finite(&self) -> bool {
        self.p.is_finite() && self.q.is_finite()
    }
}

/// Which sign to use for the 1/(4 s^2) term of the arrival covariance B.
///
/// The subtracted form keeps B + (coherent-state covariance) equal to the
/// spread accumulated by the environment, so expectation values reproduce
/// the evolved Wigner function exactly; it is positive definite only when
/// D t^2 / m is large enough. The added form is positive definite for every
/// t > s^2/2D at the price of a slightly over-smeared operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum B11Reading {
    /// B11 = 2Dt^3/3m^2 - 1/(4s^2).
    Subtracted,
    /// B11 = 2Dt^3/3m^2 + 1/(4s^2).
    Added,
}

/// A 2x2 symmetric positive-definite phase-space covariance, with entries
/// (momentum^2, momentum*length, length^2). Construction checks positive
/// definiteness and caches the determinant and inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmearingKernel<T> {
    a00: T,
    a01: T,
    a11: T,
    det: T,
    inv00: T,
    inv01: T,
    inv11: T,
}

impl<T: Real> SmearingKernel<T> {
    pub fn new(a00: T, a01: T, a11: T) -> Result<Self> {
        if !(a00.is_finite() && a01.is_finite() && a11.is_finite()) {
            return Err(Error::InvalidParameter(
                "covariance entries must be finite".to_string(),
            ));
        }
        let det = a00 * a11 - a01 * a01;
        if !(a00 > T::of(0.0) && det > T::of(0.0)) {
            return Err(Error::NotPositiveDefinite {
                detail: format!(
                    "covariance [[{}, {}], [{}, {}]] has det {}",
                    a00.to_f64(),
                    a01.to_f64(),
                    a01.to_f64(),
                    a11.to_f64(),
                    det.to_f64()
                ),
            });
        }
        let inv = T::of(1.0) / det;
        Ok(Self {
            a00,
            a01,
            a11,
            det,
            inv00: a11 * inv,
            inv01: -(a01 * inv),
            inv11: a00 * inv,
        })
    }

    /// The covariance B(t) of the arrival POVM for decoherence coefficient D,
    /// elapsed time t, mass m and smearing parameter s (reciprocal length):
    ///
    ///   B = [[2Dt - s^2,     -Dt^2/m             ],
    ///        [-Dt^2/m,    2Dt^3/3m^2 -+ 1/(4s^2)]].
    ///
    /// This is the environmental spread [[2Dt, Dt^2/m], [Dt^2/m, 2Dt^3/3m^2]]
    /// pulled back along the free flow (q, p) -> (q + pt/m, p), which flips
    /// the off-diagonal sign, minus the covariance of the coherent-state
    /// smearing, so that P_z samples the time-t state at the initial-condition
    /// label z. Rejected when not positive definite; the subtracted B11
    /// reading needs Dt^2/m > sqrt(3) + 3/2 at the optimal s.
    pub fn arrival_b(t: T, d: T, mass: T, s: T, reading: B11Reading) -> Result<Self> {
        if !(t > T::of(0.0)) || !(d > T::of(0.0)) || !(mass > T::of(0.0)) || !(s > T::of(0.0)) {
            return Err(Error::InvalidParameter(
                "arrival covariance needs t, D, m, s > 0".to_string(),
            ));
        }
        let s2 = s * s;
        let b00 = T::of(2.0) * d * t - s2;
        let b01 = -(d * t * t / mass);
        let spread = T::of(2.0) * d * t * t * t / (T::of(3.0) * mass * mass);
        let quarter = T::of(1.0) / (T::of(4.0) * s2);
        let b11 = match reading {
            B11Reading::Subtracted => spread - quarter,
            B11Reading::Added => spread + quarter,
        };
        Self::new(b00, b01, b11)
    }

    /// The s that maximizes det(B) for the subtracted reading:
    /// s^2 = (sqrt(3)/2) m/t.
    pub fn optimal_s(t: T, mass: T) -> T {
        (T::of(3.0).sqrt() * mass / (T::of(2.0) * t)).sqrt()
    }

    #[inline]
    pub fn a00(&self) -> T {
        self.a00
    }

    #[inline]
    pub fn a01(&self) -> T {
        self.a01
    }

    #[inline]
    pub fn a11(&self) -> T {
        self.a11
    }

    #[inline]
    pub fn det(&self) -> T {
        self.det
    }

    /// z^T A^{-1} z.
    pub fn quadratic(&self, z: &PhasePoint<T>) -> T {
        self.inv00 * z.p * z.p
            + T::of(2.0) * self.inv01 * z.p * z.q
            + self.inv11 * z.q * z.q
    }

    /// A^{-1} entries (row-major upper triangle: i00, i01, i11).
    #[inline]
    pub(crate) fn inverse(&self) -> (T, T, T) {
        (self.inv00, self.inv01, self.inv11)
    }

    /// b^T A b for a row vector b = (b0, b1).
    pub fn project(&self, b0: T, b1: T) -> T {
        self.a00 * b0 * b0 + T::of(2.0) * self.a01 * b0 * b1 + self.a11 * b1 * b1
    }
}

/// The normalized Gaussian phase-space function
/// g(z; A) = exp(-z^T A^{-1} z / 2) / (2 pi |A|^{1/2}).
pub fn gaussian_phase_kernel<T: Real>(z: &PhasePoint<T>, a: &SmearingKernel<T>) -> T {
    let norm = T::of(1.0) / (T::of(2.0) * T::pi() * a.det().sqrt());
    norm * (-(a.quadratic(z)) / T::of(2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn kernel_at_the_origin_is_the_inverse_normalization() {
        let a = SmearingKernel::new(2.0, 0.5, 1.0).unwrap();
        let v = gaussian_phase_kernel(&PhasePoint::new(0.0, 0.0), &a);
        let expected = 1.0 / (2.0 * std::f64::consts::PI * a.det().sqrt());
        assert!((v - expected).abs() < 1e-15);
        assert!((a.det() - 1.75).abs() < 1e-15);
    }

    #[test]
    fn identity_covariance_is_the_standard_bivariate_gaussian() {
        let a = SmearingKernel::new(1.0, 0.0, 1.0).unwrap();
        let v = gaussian_phase_kernel(&PhasePoint::new(1.0, 0.0), &a);
        let expected = (-0.5f64).exp() / (2.0 * std::f64::consts::PI);
        assert!((v - expected).abs() < 1e-15);
    }

    #[test]
    fn kernel_normalizes_to_one_under_quadrature() {
        let a = SmearingKernel::new(1.5, -0.7, 0.8).unwrap();
        let (sp, sq) = (a.a00().sqrt(), a.a11().sqrt());
        let (np, nq) = (400, 400);
        let (hp, hq) = (16.0 * sp / np as f64, 16.0 * sq / nq as f64);
        let mut total = 0.0;
        for i in 0..np {
            let p = -8.0 * sp + (i as f64 + 0.5) * hp;
            for j in 0..nq {
                let q = -8.0 * sq + (j as f64 + 0.5) * hq;
                total += gaussian_phase_kernel(&PhasePoint::new(p, q), &a) * hp * hq;
            }
        }
        assert!((total - 1.0).abs() < 1e-6, "integral {total}");
    }

    #[test]
    fn rejects_non_positive_definite_covariance() {
        assert!(matches!(
            SmearingKernel::new(-1.0, 0.0, 1.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(matches!(
            SmearingKernel::new(1.0, 2.0, 1.0),
            Err(Error::NotPositiveDefinite { .. })
        ));
        assert!(SmearingKernel::<f64>::new(1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn arrival_covariance_entry_arithmetic() {
        // D = 1, m = 1, t = tau_l = sqrt(2), s^2 = Dt/2: B00 = 3Dt/2
        let t = 2.0_f64.sqrt();
        let s = (t / 2.0).sqrt();
        let b = SmearingKernel::arrival_b(t, 1.0, 1.0, s, B11Reading::Added).unwrap();
        assert!((b.a00() - 1.5 * t).abs() < 1e-14);
        assert!((b.a01() + t * t).abs() < 1e-14);
        assert!((b.a11() - (2.0 * t.powi(3) / 3.0 + 1.0 / (4.0 * s * s))).abs() < 1e-14);
        // with s^2 = Dt/2 the added reading has det exactly 3/4
        assert!((b.det() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn subtracted_reading_needs_a_deep_enough_covariance() {
        // at the optimal s the subtracted reading is positive definite iff
        // u = Dt^2/m exceeds sqrt(3) + 3/2; t = 3 gives u = 9, t = 1 gives 1
        let s3 = SmearingKernel::optimal_s(3.0, 1.0);
        assert!((s3 * s3 - 3.0_f64.sqrt() / 6.0).abs() < 1e-15);
        assert!(SmearingKernel::arrival_b(3.0, 1.0, 1.0, s3, B11Reading::Subtracted).is_ok());
        let s1 = SmearingKernel::optimal_s(1.0, 1.0);
        assert!(matches!(
            SmearingKernel::arrival_b(1.0, 1.0, 1.0, s1, B11Reading::Subtracted),
            Err(Error::NotPositiveDefinite { .. })
        ));
        // the default s^2 = Dt/2 never admits the subtracted reading
        assert!(SmearingKernel::arrival_b(3.0, 1.0, 1.0, 1.5f64.sqrt(), B11Reading::Subtracted)
            .is_err());
    }

    #[test]
    fn quadratic_form_and_projection_agree_with_direct_arithmetic() {
        let a = SmearingKernel::new(2.0, 0.5, 1.0).unwrap();
        // A^{-1} = [[1, -0.5], [-0.5, 2]] / 1.75
        let z = PhasePoint::<f64>::new(1.0, 2.0);
        let expected = (1.0 * 1.0 + 2.0 * (-0.5) * 1.0 * 2.0 + 2.0 * 4.0) / 1.75;
        assert!((a.quadratic(&z) - expected).abs() < 1e-14);
        let proj: f64 = a.project(3.0, -1.0);
        assert!((proj - (2.0 * 9.0 + 2.0 * 0.5 * 3.0 * (-1.0) + 1.0)).abs() < 1e-14);
    }
}
