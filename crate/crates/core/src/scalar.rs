//! Scalar abstraction so the whole pipeline runs at f32 or f64.
//!
//! The trait deliberately re-exposes the float operations we need instead of
//! bounding on `num_traits::Float`, which would collide with the `Signed`
//! methods already required by `rustfft::FftNum`.

use nalgebra::{Complex as NaComplex, DMatrix};
use num_complex::Complex;
use rustfft::FftNum;

pub trait Real: FftNum + PartialOrd {
    fn of(x: f64) -> Self;
    fn to_f64(self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn atan2(self, other: Self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn floor(self) -> Self;
    fn ceil(self) -> Self;
    fn round(self) -> Self;
    fn erf(self) -> Self;
    fn is_finite(self) -> bool;

    fn pi() -> Self {
        Self::of(std::f64::consts::PI)
    }

    fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// Eigendecomposition of a Hermitian matrix given in row-major order.
    /// Returns eigenvalues in ascending order and eigenvectors as columns,
    /// column-major (`vecs[k * n + i]` is component `i` of eigenvector `k`).
    fn hermitian_eigen(n: usize, data: &[Complex<Self>]) -> (Vec<Self>, Vec<Complex<Self>>);
}

macro_rules! impl_real {
    ($t:ty, $erf:expr) => {
        impl Real for $t {
            #[inline]
            fn of(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn atan2(self, other: Self) -> Self {
                <$t>::atan2(self, other)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
            #[inline]
            fn floor(self) -> Self {
                <$t>::floor(self)
            }
            #[inline]
            fn ceil(self) -> Self {
                <$t>::ceil(self)
            }
            #[inline]
            fn round(self) -> Self {
                <$t>::round(self)
            }
            #[inline]
            fn erf(self) -> Self {
                $erf(self)
            }
            #[inline]
            fn is_finite(self) -> bool {
                <$t>::is_finite(self)
            }

            fn hermitian_eigen(
                n: usize,
                data: &[Complex<Self>],
            ) -> (Vec<Self>, Vec<Complex<Self>>) {
                assert_eq!(data.len(), n * n);
                // row-major in, nalgebra is column-major; a Hermitian matrix
                // transposes to its conjugate, which has the same spectrum and
                // conjugated eigenvectors, so just conjugate the output.
                let m = DMatrix::<NaComplex<$t>>::from_column_slice(n, n, data);
                let eig = m.symmetric_eigen();
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| {
                    eig.eigenvalues[a]
                        .partial_cmp(&eig.eigenvalues[b])
                        .unwrap()
                });
                let mut vals = Vec::with_capacity(n);
                let mut vecs = Vec::with_capacity(n * n);
                for &k in &order {
                    vals.push(eig.eigenvalues[k]);
                    for i in 0..n {
                        vecs.push(eig.eigenvectors[(i, k)].conj());
                    }
                }
                (vals, vecs)
            }
        }
    };
}

impl_real!(f64, libm::erf);
impl_real!(f32, |x: f32| libm::erf(x as f64) as f32);

/// e^{i theta}
#[inline]
pub fn cis<T: Real>(theta: T) -> Complex<T> {
    Complex::new(theta.cos(), theta.sin())
}

/// e^{z} for complex z without requiring `num_traits::Float` on T.
#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    cis(z.im) * z.re.exp()
}
