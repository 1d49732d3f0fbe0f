use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{SimulationGrid, WaveFunction};
use crate::propagators::QBMParams;
use crate::scalar::{cis, Real};
use crate::Scalar;

use super::kernel::{gaussian_phase_kernel, B11Reading, PhasePoint, SmearingKernel};

/// The default coherent-state position width tied to the smearing parameter
/// s: width = 1/(2s), the resolution scale the covariance B subtracts.
#[inline]
pub fn default_width<T: Real>(s: T) -> T {
    T::of(1.0) / (T::of(2.0) * s)
}

/// The time (3/16)^{1/4} tau_l after which the environment has rendered the
/// smeared arrival rate positive for generic states.
pub fn positivity_time<T: Real>(params: &QBMParams<T>, mass: T) -> T {
    (T::of(3.0) / T::of(16.0)).sqrt().sqrt() * params.tau_l(mass)
}

/// What an operator was assembled as, with the covariances that shaped it.
#[derive(Debug, Clone, Copy)]
pub enum PovmMeta<T> {
    /// The rank-one coherent projector |z><z|.
    Projector { z: PhasePoint<T>, width: T },
    /// The smeared phase-space operator P_z.
    Element {
        z: PhasePoint<T>,
        b: SmearingKernel<T>,
        width: T,
    },
    /// The arrival-rate operator F at time t. `early` flags t before the
    /// positivity time, where Tr(F rho) may still go negative.
    Flux {
        t: T,
        b: SmearingKernel<T>,
        width: T,
        early: bool,
    },
    /// The arrival-window operator E for [t1, t2] with per-edge covariances.
    Window {
        t1: T,
        t2: T,
        b1: SmearingKernel<T>,
        b2: SmearingKernel<T>,
        width: T,
    },
}

/// A Hermitian grid-basis operator K(x, x'); expectation values carry the
/// grid measure, <psi|K|psi> = dx^2 sum_ij conj(psi_i) K_ij psi_j.
#[derive(Debug, Clone)]
pub struct PovmOperator<T> {
    grid: SimulationGrid<T>,
    mass: T,
    data: Vec<Complex<T>>,
    meta: PovmMeta<T>,
}

impl<T: Scalar> PovmOperator<T> {
    fn assembled(
        grid: SimulationGrid<T>,
        mass: T,
        data: Vec<Complex<T>>,
        meta: PovmMeta<T>,
    ) -> Result<Self> {
        let n = grid.len();
        let mut scale = T::of(0.0);
        let mut max_asym = T::of(0.0);
        for i in 0..n {
            for j in i..n {
                let a = data[i * n + j];
                let b = data[j * n + i];
                scale = scale.max(a.norm_sqr().sqrt());
                let asym = (a - b.conj()).norm_sqr().sqrt();
                max_asym = max_asym.max(asym);
            }
        }
        if max_asym.to_f64() > 1e-10 * scale.to_f64().max(1.0) {
            return Err(Error::NonHermitian {
                max_asym: max_asym.to_f64(),
            });
        }
        Ok(Self {
            grid,
            mass,
            data,
            meta,
        })
    }

    #[inline]
    pub fn grid(&self) -> &SimulationGrid<T> {
        &self.grid
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    #[inline]
    pub fn meta(&self) -> &PovmMeta<T> {
        &self.meta
    }

    /// Row-major kernel entries K(x_i, x_j).
    #[inline]
    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn trace(&self) -> T {
        let n = self.len();
        let mut s = T::of(0.0);
        for i in 0..n {
            s = s + self.data[i * n + i].re;
        }
        s * self.grid.dx()
    }

    /// K|psi> with the grid measure.
    pub fn apply(&self, psi: &WaveFunction<T>) -> WaveFunction<T> {
        let n = self.len();
        assert_eq!(n, psi.grid().len(), "operator and state grids differ");
        let dx = self.grid.dx();
        let amps = psi.amplitudes();
        let mut out = WaveFunction::zeros(self.grid.clone(), psi.mass());
        for (i, o) in out.amplitudes_mut().iter_mut().enumerate() {
            let mut s = Complex::new(T::of(0.0), T::of(0.0));
            let row = &self.data[i * n..(i + 1) * n];
            for (k, a) in row.iter().zip(amps) {
                s = s + *k * *a;
            }
            *o = s.scale(dx);
        }
        out
    }

    /// <psi|K|psi>, real by Hermiticity.
    pub fn expectation(&self, psi: &WaveFunction<T>) -> T {
        psi.inner(&self.apply(psi)).re
    }

    /// Tr(K rho) = dx^2 sum_ij K_ij rho_ji.
    pub fn expectation_density(&self, rho: &crate::grid::DensityMatrix<T>) -> T {
        let n = self.len();
        assert_eq!(n, rho.len(), "operator and density grids differ");
        let dx = self.grid.dx();
        let rd = rho.data();
        let mut s = T::of(0.0);
        for i in 0..n {
            for j in 0..n {
                s = s + (self.data[i * n + j] * rd[j * n + i]).re;
            }
        }
        s * dx * dx
    }

    /// Operator eigenvalues (ascending): the spectrum of dx * K_ij.
    pub fn eigenvalues(&self) -> Vec<T> {
        let n = self.len();
        let dx = self.grid.dx();
        let scaled: Vec<Complex<T>> = self.data.iter().map(|z| z.scale(dx)).collect();
        T::hermitian_eigen(n, &scaled).0
    }

    /// Smallest eigenvalue of Pi K Pi, where Pi projects onto momenta
    /// p <= p_cut. The complement contributes exact zeros, so a value below
    /// zero certifies negativity on the restricted subspace.
    pub fn min_eigenvalue_below(&self, p_cut: T) -> T {
        let n = self.len();
        let mut work = self.data.clone();
        self.project_columns(&mut work, p_cut);
        conj_transpose(n, &mut work);
        self.project_columns(&mut work, p_cut);
        let dx = self.grid.dx();
        for z in &mut work {
            *z = z.scale(dx);
        }
        T::hermitian_eigen(n, &work).0[0]
    }

    fn project_columns(&self, work: &mut [Complex<T>], p_cut: T) {
        let n = self.len();
        for j in 0..n {
            let col: Vec<Complex<T>> = (0..n).map(|i| work[i * n + j]).collect();
            let psi = WaveFunction::new(self.grid.clone(), col, self.mass)
                .expect("column has grid length");
            let mut mom = psi.momentum_rep();
            for (k, z) in mom.iter_mut().enumerate() {
                if self.grid.momentum(k) > p_cut {
                    *z = Complex::new(T::of(0.0), T::of(0.0));
                }
            }
            let back = WaveFunction::from_momentum_rep(self.grid.clone(), mom, self.mass)
                .expect("momentum data has grid length");
            for (i, z) in back.amplitudes().iter().enumerate() {
                work[i * n + j] = *z;
            }
        }
    }
}

fn conj_transpose<T: Real>(n: usize, data: &mut [Complex<T>]) {
    for i in 0..n {
        data[i * n + i] = data[i * n + i].conj();
        for j in i + 1..n {
            let a = data[i * n + j].conj();
            let b = data[j * n + i].conj();
            data[i * n + j] = b;
            data[j * n + i] = a;
        }
    }
}

fn check_width<T: Real>(width: T, grid: &SimulationGrid<T>) -> Result<()> {
    if !width.is_finite() || width < T::of(2.0) * grid.dx() {
        return Err(Error::InvalidParameter(format!(
            "coherent width {} is not resolvable on a grid with dx {}",
            width.to_f64(),
            grid.dx().to_f64()
        )));
    }
    Ok(())
}

/// The normalized coherent state centered at (q, p) = (z.q, z.p) with
/// position width `width` (standard deviation of |<x|z>|^2); real-Gaussian
/// convention, phase e^{ipx}. Amplitudes falling outside the box are simply
/// truncated, so states near an edge carry slightly less than unit norm.
pub fn coherent_state<T: Scalar>(
    z: &PhasePoint<T>,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<WaveFunction<T>> {
    if !z.is_finite() {
        return Err(Error::InvalidParameter(
            "phase point must be finite".to_string(),
        ));
    }
    check_width(width, grid)?;
    if z.p.to_f64().abs() + 2.0 / width.to_f64() > grid.p_max().to_f64() {
        return Err(Error::InvalidParameter(format!(
            "coherent momentum {} exceeds the grid's representable band",
            z.p.to_f64()
        )));
    }
    let n = grid.len();
    let norm = (T::of(1.0) / (T::of(2.0) * T::pi() * width * width)).sqrt().sqrt();
    let four_w2 = T::of(4.0) * width * width;
    let mut amps = vec![Complex::new(T::of(0.0), T::of(0.0)); n];
    for (i, a) in amps.iter_mut().enumerate() {
        let x = grid.x(i);
        let d = x - z.q;
        let env = norm * (-(d * d) / four_w2).exp();
        *a = cis(z.p * x).scale(env);
    }
    WaveFunction::new(grid.clone(), amps, mass)
}

/// The rank-one projector |z><z| onto the coherent state at z. Requires the
/// state to sit well inside the box so the trace is 1 to 1e-10.
pub fn coherent_projector<T: Scalar>(
    z: &PhasePoint<T>,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<PovmOperator<T>> {
    if z.is_finite()
        && (z.q - T::of(7.0) * width < grid.x_min() || z.q + T::of(7.0) * width > grid.x_max())
    {
        return Err(Error::InvalidParameter(
            "coherent center too close to the box edge for a unit-trace projector".to_string(),
        ));
    }
    let phi = coherent_state(z, width, grid, mass)?;
    let n = grid.len();
    let amps = phi.amplitudes();
    let mut data = vec![Complex::new(T::of(0.0), T::of(0.0)); n * n];
    for i in 0..n {
        for j in 0..n {
            data[i * n + j] = amps[i] * amps[j].conj();
        }
    }
    PovmOperator::assembled(grid.clone(), mass, data, PovmMeta::Projector { z: *z, width })
}

/// A symbol over phase space, evaluated at lattice points (p', q').
type Symbol<'a, T> = &'a dyn Fn(T, T) -> T;

/// Quadrature of (dq' dp' / 2 pi) symbol(z') |z'><z'| over a deterministic
/// phase lattice spanning the box: steps width/2 in position and 1/(4 width)
/// in momentum, dense enough that the unweighted sum resolves the identity
/// to well below 1e-4. The lattice depends only on the grid and the width,
/// so operators built on the same grid combine entrywise.
fn assemble_phase_sum<T: Scalar>(
    grid: &SimulationGrid<T>,
    mass: T,
    width: T,
    cutoff: T,
    symbol: Symbol<'_, T>,
    meta: PovmMeta<T>,
) -> Result<PovmOperator<T>> {
    check_width(width, grid)?;
    let p_lim = grid.p_max() - T::of(2.0) / width;
    if !(p_lim > T::of(0.0)) {
        return Err(Error::InvalidParameter(
            "grid momentum band cannot hold a coherent state of this width".to_string(),
        ));
    }
    let n = grid.len();
    let dx = grid.dx();
    let dq = width / T::of(2.0);
    let dp = T::of(1.0) / (T::of(4.0) * width);
    // inset the position lattice so every coherent state fits in the box:
    // a state cut off by the edge acquires long momentum tails that bleed
    // spurious (possibly negative) weight into distant momentum subspaces
    let margin = T::of(8.0) * width;
    let q_lo = grid.x_min() + margin;
    let nq = ((grid.x_max() - margin - q_lo) / dq).to_f64().floor() as usize;
    let np_half = (p_lim / dp).to_f64().floor() as usize;
    let weight = dq * dp / (T::of(2.0) * T::pi());
    let norm = (T::of(1.0) / (T::of(2.0) * T::pi() * width * width)).sqrt().sqrt();
    let four_w2 = T::of(4.0) * width * width;
    // coherent support half-width: the envelope is below 2e-11 beyond 10w
    let reach = (T::of(10.0) * width / dx).to_f64().ceil() as isize;

    let mut data = vec![Complex::new(T::of(0.0), T::of(0.0)); n * n];
    let mut phi = vec![Complex::new(T::of(0.0), T::of(0.0)); n];
    for jq in 0..nq {
        let q = q_lo + dq * T::of(jq as f64 + 0.5);
        let center = ((q - grid.x_min()) / dx).to_f64().round() as isize;
        let lo = (center - reach).max(0) as usize;
        let hi = ((center + reach) as usize + 1).min(n);
        for kp in 0..2 * np_half {
            let p = dp * T::of(kp as f64 - np_half as f64 + 0.5);
            let s = symbol(p, q);
            if s.to_f64().abs() <= cutoff.to_f64() {
                continue;
            }
            let w = s * weight;
            for i in lo..hi {
                let x = grid.x(i);
                let d = x - q;
                let env = norm * (-(d * d) / four_w2).exp();
                phi[i] = cis(p * x).scale(env);
            }
            for i in lo..hi {
                let a = phi[i].scale(w);
                let row = &mut data[i * n..i * n + hi];
                for j in lo..hi {
                    row[j] = row[j] + a * phi[j].conj();
                }
            }
        }
    }
    PovmOperator::assembled(grid.clone(), mass, data, meta)
}

/// The smeared phase-space operator
/// P_z = integral (dq' dp' / 2 pi) |z'><z'| g(z - z'; B); positive by
/// construction, with trace 1/(2 pi).
pub fn povm_element<T: Scalar>(
    z: &PhasePoint<T>,
    b: &SmearingKernel<T>,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<PovmOperator<T>> {
    if !z.is_finite() {
        return Err(Error::InvalidParameter(
            "phase point must be finite".to_string(),
        ));
    }
    let peak = T::of(1.0) / (T::of(2.0) * T::pi() * b.det().sqrt());
    let cutoff = peak * T::of(1e-12);
    let zc = *z;
    let bc = *b;
    let symbol = move |p: T, q: T| {
        gaussian_phase_kernel(&PhasePoint::new(zc.p - p, zc.q - q), &bc)
    };
    assemble_phase_sum(
        grid,
        mass,
        width,
        cutoff,
        &symbol,
        PovmMeta::Element {
            z: *z,
            b: *b,
            width,
        },
    )
}

/// The arrival-rate symbol: the line integral of g(. - z'; B) along the
/// crossing manifold z = (p, -pt/m) with weight -p/m, in closed form.
fn flux_symbol<T: Real>(p1: T, q1: T, b: &SmearingKernel<T>, t: T, mass: T) -> T {
    let (i00, i01, i11) = b.inverse();
    let r = t / mass; // line direction u = (1, -t/m)
    let alpha = i00 - T::of(2.0) * r * i01 + r * r * i11;
    let beta = i00 * p1 + i01 * q1 - r * (i01 * p1 + i11 * q1);
    let gamma = b.quadratic(&PhasePoint::new(p1, q1));
    let expo = (gamma - beta * beta / alpha) / T::of(2.0);
    if expo.to_f64() > 200.0 {
        return T::of(0.0);
    }
    let norm = (T::of(2.0) * T::pi() / alpha).sqrt() / (T::of(2.0) * T::pi() * b.det().sqrt());
    -(beta / (alpha * mass)) * norm * (-expo).exp()
}

/// The arrival-rate operator F for a caller-supplied covariance:
/// F = integral dz P_z (-z0/m) delta(z1 + z0 t / m), so that Tr(F rho) is
/// the smeared probability current at time t evaluated on the initial state.
pub fn arrival_operator_f_with<T: Scalar>(
    b: &SmearingKernel<T>,
    t: T,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
    early: bool,
) -> Result<PovmOperator<T>> {
    if !(t > T::of(0.0)) || !(mass > T::of(0.0)) {
        return Err(Error::InvalidParameter(
            "arrival operator needs t, m > 0".to_string(),
        ));
    }
    let (i00, i01, i11) = b.inverse();
    let r = t / mass;
    let alpha = i00 - T::of(2.0) * r * i01 + r * r * i11;
    let fmax = grid.p_max() / mass * (T::of(2.0) * T::pi() / alpha).sqrt()
        / (T::of(2.0) * T::pi() * b.det().sqrt());
    let cutoff = fmax * T::of(1e-13);
    let bc = *b;
    let symbol = move |p: T, q: T| flux_symbol(p, q, &bc, t, mass);
    assemble_phase_sum(
        grid,
        mass,
        width,
        cutoff,
        &symbol,
        PovmMeta::Flux {
            t,
            b: *b,
            width,
            early,
        },
    )
}

/// The arrival-rate operator F(t) with the covariance B(t) built from the
/// environment parameters. Before the positivity time (3/16)^{1/4} tau_l the
/// operator is still assembled but flagged `early` in its metadata.
pub fn arrival_operator_f<T: Scalar>(
    t: T,
    params: &QBMParams<T>,
    s: T,
    reading: B11Reading,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<PovmOperator<T>> {
    let b = SmearingKernel::arrival_b(t, params.d_coeff(), mass, s, reading)?;
    let early = t < positivity_time(params, mass);
    arrival_operator_f_with(&b, t, width, grid, mass, early)
}

/// Standard normal CDF.
fn phi_cdf<T: Real>(x: T) -> T {
    (T::of(1.0) + (x / T::of(2.0).sqrt()).erf()) / T::of(2.0)
}

/// The arrival-window operator for caller-supplied per-edge covariances:
/// E = integral dz P_z [theta(z1 + z0 t1/m) - theta(z1 + z0 t2/m)], each
/// theta smeared by its own B(t_i), which keeps window telescoping exact.
pub fn arrival_operator_e_with<T: Scalar>(
    b1: &SmearingKernel<T>,
    b2: &SmearingKernel<T>,
    t1: T,
    t2: T,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<PovmOperator<T>> {
    if !(t2 >= t1) || !(t1 > T::of(0.0)) || !(mass > T::of(0.0)) {
        return Err(Error::InvalidParameter(
            "arrival window needs 0 < t1 <= t2".to_string(),
        ));
    }
    let meta = PovmMeta::Window {
        t1,
        t2,
        b1: *b1,
        b2: *b2,
        width,
    };
    if t1 == t2 {
        let n = grid.len();
        let data = vec![Complex::new(T::of(0.0), T::of(0.0)); n * n];
        return PovmOperator::assembled(grid.clone(), mass, data, meta);
    }
    let s1 = b1.project(t1 / mass, T::of(1.0)).sqrt();
    let s2 = b2.project(t2 / mass, T::of(1.0)).sqrt();
    let (r1, r2) = (t1 / mass, t2 / mass);
    let symbol = move |p: T, q: T| phi_cdf((q + p * r1) / s1) - phi_cdf((q + p * r2) / s2);
    assemble_phase_sum(grid, mass, width, T::of(1e-13), &symbol, meta)
}

/// The arrival-window operator E for [t1, t2] with per-edge covariances
/// B(t1), B(t2) built from the environment parameters.
pub fn arrival_operator_e<T: Scalar>(
    t1: T,
    t2: T,
    params: &QBMParams<T>,
    s: T,
    reading: B11Reading,
    width: T,
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<PovmOperator<T>> {
    let b1 = SmearingKernel::arrival_b(t1, params.d_coeff(), mass, s, reading)?;
    let b2 = SmearingKernel::arrival_b(t2, params.d_coeff(), mass, s, reading)?;
    arrival_operator_e_with(&b1, &b2, t1, t2, width, grid, mass)
}
