//! Thin wrappers over rustfft with cached plans and the momentum-grid
//! conventions used throughout: bin k of an n-point transform carries
//! momentum k*dp for k < n/2 and (k - n)*dp above.

use std::cell::RefCell;

use num_complex::Complex;
use rustfft::FftPlanner;

use crate::scalar::Real;

macro_rules! planner_for {
    ($t:ty, $name:ident) => {
        pub fn $name(data: &mut [Complex<$t>], inverse: bool) {
            thread_local! {
                static PLANNER: RefCell<FftPlanner<$t>> = RefCell::new(FftPlanner::new());
            }
            PLANNER.with(|p| {
                let mut p = p.borrow_mut();
                let fft = if inverse {
                    p.plan_fft_inverse(data.len())
                } else {
                    p.plan_fft_forward(data.len())
                };
                fft.process(data);
            });
            if inverse {
                let scale = <$t as Real>::of(1.0 / data.len() as f64);
                for z in data.iter_mut() {
                    *z = z.scale(scale);
                }
            }
        }
    };
}

planner_for!(f64, fft_dispatch_f64);
planner_for!(f32, fft_dispatch_f32);

pub trait FftDispatch: Real {
    fn fft_in_place(data: &mut [Complex<Self>], inverse: bool);
}

impl FftDispatch for f64 {
    fn fft_in_place(data: &mut [Complex<Self>], inverse: bool) {
        fft_dispatch_f64(data, inverse)
    }
}

impl FftDispatch for f32 {
    fn fft_in_place(data: &mut [Complex<Self>], inverse: bool) {
        fft_dispatch_f32(data, inverse)
    }
}

/// Unnormalized forward DFT.
pub fn fft<T: FftDispatch>(data: &mut [Complex<T>]) {
    T::fft_in_place(data, false);
}

/// Inverse DFT including the 1/n factor, so `ifft(fft(x)) == x`.
pub fn ifft<T: FftDispatch>(data: &mut [Complex<T>]) {
    T::fft_in_place(data, true);
}

/// Signed FFT bin index: k for k < n/2, k - n otherwise.
#[inline]
pub fn signed_bin(k: usize, n: usize) -> i64 {
    if k < n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Momentum carried by FFT bin `k` of an `n`-point grid with spacing `dp`.
#[inline]
pub fn bin_momentum<T: Real>(k: usize, n: usize, dp: T) -> T {
    dp * T::of(signed_bin(k, n) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let mut data: Vec<Complex<f64>> = (0..16)
            .map(|i| Complex::new(i as f64, (i * i) as f64 * 0.1))
            .collect();
        let orig = data.clone();
        fft(&mut data);
        ifft(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn bin_momenta_are_symmetric() {
        let n = 8;
        let dp = 0.5;
        let ps: Vec<f64> = (0..n).map(|k| bin_momentum(k, n, dp)).collect();
        assert_eq!(ps[0], 0.0);
        assert_eq!(ps[4], -2.0);
        assert_eq!(ps[7], -0.5);
        assert_eq!(ps[3], 1.5);
    }
}
