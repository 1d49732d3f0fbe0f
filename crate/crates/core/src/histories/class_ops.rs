use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::WaveFunction;
use crate::propagators::{
    evolve_complex_potential_steps, evolve_free_unchecked, ComplexPotentialSpec,
};
use crate::Scalar;

use super::{HistorySpec, Side};

/// Apply one side projection in place.
fn project<T: Scalar>(psi: &mut WaveFunction<T>, side: Side) {
    match side {
        Side::Positive => psi.project_positive(),
        Side::Negative => psi.project_negative(),
    }
}

/// Apply the class operator C = P_side(t_n) ... P_side(t_1) to a state given
/// at t = 0, interleaving free evolutions with projections. Returns the
/// unnormalized branch in the Schroedinger picture at the final projection
/// time t_n (multiply by e^{iH t_n} to recover the Heisenberg-picture
/// C psi); the squared norm is the branch probability p(alpha) for pure
/// states.
pub fn apply_class_operator<T: Scalar>(
    spec: &HistorySpec<T>,
    psi: &WaveFunction<T>,
) -> WaveFunction<T> {
    let mut state = psi.clone();
    let mut now = T::of(0.0);
    for &(t, side) in spec.steps() {
        if t > now {
            state = evolve_free_unchecked(&state, t - now);
            now = t;
        }
        project(&mut state, side);
    }
    state
}

/// The crossing class operator built from the complex potential
/// V = V0 theta(-x),
///
///   C_[tk,tk1] psi = int_{tk}^{tk1} dt e^{-iH(tau - t)} V e^{-iHt - Vt} psi,
///
/// which describes absorption (detection at the origin) during [tk, tk1]
/// with time resolution ~ 1/V0, referred to the common horizon tau. The
/// integrand is sampled by walking the absorbed state e^{(-iH - V)t} psi
/// forward in fixed substeps and accumulating the Simpson sum in a frame
/// co-moving with the free evolution; the panel count doubles until the
/// result settles in L2.
pub fn crossing_class_operator_cp<T: Scalar>(
    psi: &WaveFunction<T>,
    t_k: T,
    t_k1: T,
    v0: T,
    tau: T,
) -> Result<WaveFunction<T>> {
    if t_k < T::of(0.0) || t_k1 < t_k || tau < t_k1 {
        return Err(Error::InvalidParameter(
            "crossing window needs 0 <= t_k <= t_k1 <= tau".to_string(),
        ));
    }
    let spec = ComplexPotentialSpec::new(v0)?;
    let width = t_k1 - t_k;
    if width == T::of(0.0) {
        let mut zero = psi.clone();
        zero.scale(Complex::new(T::of(0.0), T::of(0.0)));
        return Ok(zero);
    }

    // substeps per Simpson panel for the absorbed-state walk; halving the
    // panel width also halves the splitting step, so both errors shrink
    // together along the ladder
    const SUBSTEPS: usize = 4;
    let mut prev: Option<WaveFunction<T>> = None;
    let mut residual = f64::INFINITY;
    for level in 2..=13usize {
        let panels = 1usize << level;
        let h = width / T::of(panels as f64);
        // leg from 0 to t_k under the absorber, resolved commensurately
        let mut absorbed = if t_k > T::of(0.0) {
            let steps = ((t_k / h).to_f64().ceil() as usize).max(1) * SUBSTEPS;
            evolve_complex_potential_steps(psi, t_k, &spec, steps)
        } else {
            psi.clone()
        };
        // Simpson accumulation: S <- U_free(h) S + w_j V absorbed_j
        let third = h / T::of(3.0);
        let mut sum = sample(&absorbed, v0);
        sum.scale(Complex::new(third, T::of(0.0)));
        for j in 1..=panels {
            absorbed = evolve_complex_potential_steps(&absorbed, h, &spec, SUBSTEPS);
            sum = evolve_free_unchecked(&sum, h);
            let w = if j == panels {
                third
            } else if j % 2 == 1 {
                T::of(4.0) * third
            } else {
                T::of(2.0) * third
            };
            let v = sample(&absorbed, v0);
            sum.add_scaled(&v, Complex::new(w, T::of(0.0)));
        }
        let result = evolve_free_unchecked(&sum, tau - t_k1);
        if let Some(p) = &prev {
            residual = p.l2_distance(&result).to_f64();
            // the splitting error against the discontinuous absorber edge
            // dominates and shrinks slowly, so the ladder settles to a few
            // 1e-7 rather than the quadrature's own much finer scale
            let tol = 1e-8 + 3e-7 * result.norm().to_f64();
            if residual <= tol {
                return Ok(result);
            }
        }
        prev = Some(result);
    }
    Err(Error::QuadratureNonConvergence {
        residual,
        levels: 12,
    })
}

/// V psi with V = v0 theta(-x): multiplicative on the x < 0 samples.
fn sample<T: Scalar>(psi: &WaveFunction<T>, v0: T) -> WaveFunction<T> {
    let zi = psi.grid().zero_index();
    let mut out = psi.clone();
    let amps = out.amplitudes_mut();
    for z in &mut amps[..zi] {
        *z = z.scale(v0);
    }
    let zero = Complex::new(T::of(0.0), T::of(0.0));
    for z in &mut amps[zi..] {
        *z = zero;
    }
    out
}
