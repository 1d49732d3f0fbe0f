use crate::error::{Error, Result};
use crate::Scalar;

/// Composite-Simpson time quadrature with Richardson extrapolation and
/// automatic panel doubling. The sampler is handed a panel count and must
/// return the `panels + 1` uniformly spaced integrand values on [t1, t2];
/// rebuilding the sample vector per level lets channels that are cheaper to
/// advance incrementally (the QBM stepper) walk the ladder themselves.
///
/// Convergence: two consecutive Richardson values must agree to `rel_tol`
/// relative (plus an absolute `noise_floor` for samplers whose values carry
/// their own convergence noise). Panels run from 4 to 2^14.
pub(crate) fn converge_simpson<T: Scalar>(
    t1: T,
    t2: T,
    rel_tol: f64,
    noise_floor: f64,
    mut sampler: impl FnMut(usize) -> Result<Vec<T>>,
) -> Result<T> {
    let width = t2 - t1;
    if width == T::of(0.0) {
        return Ok(T::of(0.0));
    }
    // Romberg rows seeded by trapezoid sums; column 1 is composite Simpson,
    // higher columns iterate the Richardson step. Depth is capped so noisy
    // samplers cannot destabilize the high-order differences.
    const MAX_COLS: usize = 6;
    let mut prev_row: Vec<T> = Vec::new();
    let mut prev_diag: Option<T> = None;
    let mut residual = f64::INFINITY;
    for level in 2..=14usize {
        let panels = 1usize << level;
        let vals = sampler(panels)?;
        debug_assert_eq!(vals.len(), panels + 1);
        let mut row = vec![trapezoid(&vals, width)];
        let mut pow4 = T::of(1.0);
        for k in 0..prev_row.len().min(MAX_COLS - 1) {
            pow4 = pow4 * T::of(4.0);
            let r = (pow4 * row[k] - prev_row[k]) / (pow4 - T::of(1.0));
            row.push(r);
        }
        let diag = *row.last().expect("row is non-empty");
        if let Some(pd) = prev_diag {
            residual = (diag - pd).abs().to_f64();
            let tol = rel_tol * (1.0 + diag.abs().to_f64()) + noise_floor;
            if row.len() >= 3 && residual <= tol {
                return Ok(diag);
            }
        }
        prev_diag = Some(diag);
        prev_row = row;
    }
    Err(Error::QuadratureNonConvergence {
        residual,
        levels: 14,
    })
}

fn trapezoid<T: Scalar>(vals: &[T], width: T) -> T {
    let panels = vals.len() - 1;
    let h = width / T::of(panels as f64);
    let mut s = (vals[0] + vals[panels]) * T::of(0.5);
    for v in vals.iter().take(panels).skip(1) {
        s = s + *v;
    }
    s * h
}
