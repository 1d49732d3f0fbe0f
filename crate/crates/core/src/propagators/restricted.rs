use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::propagators::evolve_free_unchecked;
use crate::Scalar;

/// Dirichlet-wall propagation on x > 0 by the method of images: evolve the
/// antisymmetric extension psi(x) - psi(-x) freely, then keep the x > 0 half.
/// Exactly unitary on the subspace while the packet stays off the wall and
/// the grid boundary. Requires x = 0 to be a grid point (the mirror must map
/// grid points to grid points) and the input to live in x > 0.
pub fn restricted_propagate<T: Scalar>(psi: &WaveFunction<T>, t: T) -> Result<WaveFunction<T>> {
    if t < T::of(0.0) {
        return Err(Error::InvalidParameter(
            "evolution time must be non-negative".to_string(),
        ));
    }
    let grid = psi.grid();
    let zi = grid.zero_index();
    if grid.x(zi) != T::of(0.0) {
        return Err(Error::InvalidParameter(
            "restricted propagation requires x = 0 on the grid".to_string(),
        ));
    }
    let mut neg = psi.clone();
    neg.project_negative();
    let leak = neg.norm_sqr();
    if leak.to_f64() > 1e-10 {
        return Err(Error::SupportViolation {
            leak: leak.to_f64(),
        });
    }
    if t == T::of(0.0) {
        return Ok(psi.clone());
    }

    let n = grid.len();
    let zero = Complex::new(T::of(0.0), T::of(0.0));
    let mut ext = vec![zero; n];
    let amps = psi.amplitudes();
    // the mirror image occupies [-x, 0] for support at x: content beyond
    // |x_min| has no room for its image and would alias around the
    // periodic boundary
    let mut clipped = T::of(0.0);
    for j in zi..n {
        if grid.x(j) > -grid.x_min() {
            clipped = clipped + amps[j].norm_sqr();
        }
    }
    let clipped = (clipped * grid.dx()).to_f64();
    if clipped > 1e-10 {
        return Err(Error::BoundaryLeak {
            leak: clipped,
            threshold: 1e-10,
        });
    }
    for j in zi..n {
        ext[j] = amps[j];
        let mirror = 2 * zi as i64 - j as i64;
        if mirror >= 0 {
            ext[mirror as usize] = -amps[j];
        }
    }
    // the wall point itself must vanish in the odd extension
    ext[zi] = zero;
    let extended = WaveFunction::new(grid.clone(), ext, psi.mass())?;
    let mut out = evolve_free_unchecked(&extended, t);
    out.project_positive();
    Ok(out)
}
