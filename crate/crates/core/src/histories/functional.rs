use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{DensityMatrix, SimulationGrid, WaveFunction};
use crate::propagators::{channel_evolve_density, evolve_free_unchecked, Channel};
use crate::Scalar;

use super::{apply_class_operator, HistorySpec, Side};

/// Environment timescales attached to a report when the channel carries an
/// environment: tau_l = sqrt(2m/D) (localization) and tau_s = p0^2/D
/// (system relaxation at the state's mean momentum).
#[derive(Debug, Clone, Copy)]
pub struct Timescales<T> {
    pub tau_l: T,
    pub tau_s: T,
}

/// The decoherence functional D(alpha, beta) = Tr(C_alpha rho C_beta^dag)
/// over a history set, together with the naive branch functionals
/// q(alpha) = Tr(C_alpha rho) and interference diagnostics.
#[derive(Debug, Clone)]
pub struct DecoherenceReport<T> {
    labels: Vec<String>,
    matrix: Vec<Complex<T>>,
    qs: Vec<Complex<T>>,
    timescales: Option<Timescales<T>>,
}

impl<T: Scalar> DecoherenceReport<T> {
    /// Number of histories in the set.
    #[inline]
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    #[inline]
    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    #[inline]
    pub fn entry(&self, i: usize, j: usize) -> Complex<T> {
        self.matrix[i * self.labels.len() + j]
    }

    /// Branch probability p(alpha) = D(alpha, alpha).
    #[inline]
    pub fn probability(&self, i: usize) -> T {
        self.entry(i, i).re
    }

    pub fn probabilities(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.probability(i)).collect()
    }

    /// Naive branch functional q(alpha) = Tr(C_alpha rho); real and equal
    /// to p(alpha) when the set decoheres.
    #[inline]
    pub fn q(&self, i: usize) -> Complex<T> {
        self.qs[i]
    }

    /// Sum over the whole matrix; equals 1 for a complete set on a unit-
    /// trace state.
    pub fn total(&self) -> Complex<T> {
        let mut s = Complex::new(T::of(0.0), T::of(0.0));
        for z in &self.matrix {
            s = s + *z;
        }
        s
    }

    /// max over alpha != beta of |D(alpha,beta)| / sqrt(p(alpha) p(beta)),
    /// the normalized interference measure. Pairs whose probabilities are
    /// below 1e-14 are skipped (empty branches carry no interference worth
    /// normalizing).
    pub fn max_normalized_offdiag(&self) -> T {
        let n = self.len();
        let mut worst = T::of(0.0);
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let pi = self.probability(i).max(T::of(0.0));
                let pj = self.probability(j).max(T::of(0.0));
                if (pi * pj).to_f64() < 1e-28 {
                    continue;
                }
                let z = self.entry(i, j).norm_sqr().sqrt() / (pi * pj).sqrt();
                worst = worst.max(z);
            }
        }
        worst
    }

    /// Decoherent at the given normalized-interference threshold (the
    /// conventional operational cut is 0.01).
    pub fn is_decoherent(&self, threshold: T) -> bool {
        self.max_normalized_offdiag() <= threshold
    }

    /// Environment timescales, when the channel carried an environment.
    pub fn timescales(&self) -> Option<&Timescales<T>> {
        self.timescales.as_ref()
    }
}

/// Deterministic generic probe state for the operator-level completeness
/// check: a fixed quasi-random amplitude pattern, normalized.
fn probe_state<T: Scalar>(grid: &SimulationGrid<T>, mass: T, seed: usize) -> WaveFunction<T> {
    let n = grid.len();
    let mut amps = Vec::with_capacity(n);
    for i in 0..n {
        let a = T::of(((seed * 2654435761 + i * 40503) % 65536) as f64 / 65536.0 - 0.5);
        let b = T::of(((seed * 40503 + i * 2654435761) % 65536) as f64 / 65536.0 - 0.5);
        amps.push(Complex::new(a, b));
    }
    let mut psi = WaveFunction::new(grid.clone(), amps, mass).expect("probe length matches");
    psi.normalize();
    psi
}

/// Verify sum_alpha C_alpha = 1 on deterministic probe states: the summed
/// branches, referred to a common horizon, must reproduce bare evolution.
fn check_completeness<T: Scalar>(
    alphas: &[HistorySpec<T>],
    grid: &SimulationGrid<T>,
    mass: T,
) -> Result<()> {
    let horizon = alphas
        .iter()
        .map(|s| s.final_time())
        .fold(T::of(0.0), |a, b| a.max(b));
    for seed in 1..=3usize {
        let probe = probe_state(grid, mass, seed);
        let mut total: Option<WaveFunction<T>> = None;
        for spec in alphas {
            let b = evolve_free_unchecked(
                &apply_class_operator(spec, &probe),
                horizon - spec.final_time(),
            );
            match &mut total {
                None => total = Some(b),
                Some(t) => t.add_scaled(&b, Complex::new(T::of(1.0), T::of(0.0))),
            }
        }
        let total = total.ok_or_else(|| {
            Error::InvalidParameter("history set must be non-empty".to_string())
        })?;
        let bare = evolve_free_unchecked(&probe, horizon);
        let residual = total.l2_distance(&bare).to_f64();
        if residual > 1e-10 {
            return Err(Error::CompletenessViolation { residual });
        }
    }
    Ok(())
}

fn complex_trace<T: Scalar>(rho: &DensityMatrix<T>) -> Complex<T> {
    let n = rho.len();
    let dx = rho.grid().dx();
    let mut s = Complex::new(T::of(0.0), T::of(0.0));
    for i in 0..n {
        s = s + rho.data()[i * n + i];
    }
    s.scale(dx)
}

/// Zero the rows (left index) outside the kept side: P_side rho.
fn project_left<T: Scalar>(rho: &mut DensityMatrix<T>, side: Side) {
    let n = rho.len();
    let zi = rho.grid().zero_index();
    let zero = Complex::new(T::of(0.0), T::of(0.0));
    let (lo, hi) = match side {
        Side::Positive => (0, zi),
        Side::Negative => (zi, n),
    };
    for i in lo..hi {
        for z in &mut rho.data_mut()[i * n..(i + 1) * n] {
            *z = zero;
        }
    }
}

/// Zero the columns (right index) outside the kept side: rho P_side.
fn project_right<T: Scalar>(rho: &mut DensityMatrix<T>, side: Side) {
    let n = rho.len();
    let zi = rho.grid().zero_index();
    let zero = Complex::new(T::of(0.0), T::of(0.0));
    let (lo, hi) = match side {
        Side::Positive => (0, zi),
        Side::Negative => (zi, n),
    };
    for i in 0..n {
        for z in &mut rho.data_mut()[i * n + lo..i * n + hi] {
            *z = zero;
        }
    }
}

/// Tr(C_alpha rho C_beta^dag): evolve through the merged schedule of the
/// two histories, applying alpha's projections from the left and beta's
/// from the right, then trace (invariant under further trace-preserving
/// evolution). `beta = None` computes Tr(C_alpha rho).
fn pair_trace<T: Scalar>(
    rho: &DensityMatrix<T>,
    alpha: &HistorySpec<T>,
    beta: Option<&HistorySpec<T>>,
    channel: &Channel<T>,
) -> Result<Complex<T>> {
    let mut state = rho.clone();
    let mut now = T::of(0.0);
    let a = alpha.steps();
    let empty: &[(T, Side)] = &[];
    let b = beta.map_or(empty, |s| s.steps());
    let (mut ia, mut ib) = (0usize, 0usize);
    while ia < a.len() || ib < b.len() {
        // next event time across both schedules
        let ta = a.get(ia).map(|s| s.0);
        let tb = b.get(ib).map(|s| s.0);
        let t = match (ta, tb) {
            (Some(x), Some(y)) => x.min(y),
            (Some(x), None) => x,
            (None, Some(y)) => y,
            (None, None) => unreachable!(),
        };
        if t > now {
            state = channel_evolve_density(&state, t - now, channel)?;
            now = t;
        }
        while ia < a.len() && a[ia].0 == t {
            project_left(&mut state, a[ia].1);
            ia += 1;
        }
        while ib < b.len() && b[ib].0 == t {
            project_right(&mut state, b[ib].1);
            ib += 1;
        }
    }
    Ok(complex_trace(&state))
}

/// The decoherence functional D(alpha, beta) = Tr(C_alpha rho C_beta^dag)
/// for a density matrix under the chosen channel: the state is evolved
/// through the merged projection schedule with alpha acting from the left
/// and beta from the right (for the QBM channel the environment trace is
/// implicit in the evolved segments). The history set is first checked for
/// operator completeness.
pub fn decoherence_functional<T: Scalar>(
    rho: &DensityMatrix<T>,
    alphas: &[HistorySpec<T>],
    channel: &Channel<T>,
) -> Result<DecoherenceReport<T>> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter(
            "history set must be non-empty".to_string(),
        ));
    }
    check_completeness(alphas, rho.grid(), rho.mass())?;
    let k = alphas.len();
    let mut matrix = vec![Complex::new(T::of(0.0), T::of(0.0)); k * k];
    for i in 0..k {
        for j in 0..=i {
            let z = pair_trace(rho, &alphas[i], Some(&alphas[j]), channel)?;
            matrix[i * k + j] = z;
            matrix[j * k + i] = z.conj();
        }
    }
    let mut qs = Vec::with_capacity(k);
    for spec in alphas {
        qs.push(pair_trace(rho, spec, None, channel)?);
    }
    Ok(DecoherenceReport {
        labels: alphas.iter().map(|s| s.label().to_string()).collect(),
        matrix,
        qs,
        timescales: channel_timescales(channel, rho.mass(), None),
        // mean momentum of a mixed state is not tracked; pure entry points
        // fill the relaxation timescale
    })
}

/// Pure-state entry point. For the unitary channel the matrix is the Gram
/// matrix of the branch states referred to a common horizon, which is both
/// cheaper and more accurate than the density path; the QBM channel
/// delegates to the density form.
pub fn decoherence_functional_pure<T: Scalar>(
    psi: &WaveFunction<T>,
    alphas: &[HistorySpec<T>],
    channel: &Channel<T>,
) -> Result<DecoherenceReport<T>> {
    if alphas.is_empty() {
        return Err(Error::InvalidParameter(
            "history set must be non-empty".to_string(),
        ));
    }
    let p0 = psi.expectation_p();
    match channel {
        Channel::Qbm(_) => {
            let rho = DensityMatrix::from_pure(psi);
            let mut report = decoherence_functional(&rho, alphas, channel)?;
            report.timescales = channel_timescales(channel, psi.mass(), Some(p0));
            Ok(report)
        }
        Channel::Unitary => {
            check_completeness(alphas, psi.grid(), psi.mass())?;
            let horizon = alphas
                .iter()
                .map(|s| s.final_time())
                .fold(T::of(0.0), |a, b| a.max(b));
            let branches: Vec<WaveFunction<T>> = alphas
                .iter()
                .map(|s| {
                    evolve_free_unchecked(
                        &apply_class_operator(s, psi),
                        horizon - s.final_time(),
                    )
                })
                .collect();
            let bare = evolve_free_unchecked(psi, horizon);
            let k = alphas.len();
            let mut matrix = vec![Complex::new(T::of(0.0), T::of(0.0)); k * k];
            for i in 0..k {
                for j in 0..=i {
                    // D(i, j) = <C_j psi | C_i psi>
                    let z = branches[j].inner(&branches[i]);
                    matrix[i * k + j] = z;
                    matrix[j * k + i] = z.conj();
                }
            }
            let qs: Vec<Complex<T>> = branches.iter().map(|b| bare.inner(b)).collect();
            Ok(DecoherenceReport {
                labels: alphas.iter().map(|s| s.label().to_string()).collect(),
                matrix,
                qs,
                timescales: None,
            })
        }
    }
}

fn channel_timescales<T: Scalar>(
    channel: &Channel<T>,
    mass: T,
    p0: Option<T>,
) -> Option<Timescales<T>> {
    match channel {
        Channel::Unitary => None,
        Channel::Qbm(params) => Some(Timescales {
            tau_l: params.tau_l(mass),
            tau_s: p0.map_or(T::of(0.0), |p| params.tau_s(p)),
        }),
    }
}

/// The interference bound pair for a crossing window:
/// Delta = Tr(P(t2) Pbar(t1) rho Pbar(t1)) and |d|^2 with
/// d = Tr(P(t2) Pbar(t1) rho); the Cauchy-Schwarz inequality |d|^2 <= Delta
/// holds exactly, so Delta small certifies decoherence of the pair.
#[derive(Debug, Clone, Copy)]
pub struct DeltaBound<T> {
    /// Delta: the probability to be found in x < 0 at t1 and then x > 0 at
    /// t2; small for left-moving states.
    pub delta: T,
    /// |d|^2, the squared interference term bounded by Delta.
    pub d_sq: T,
}

/// Compute the Delta diagnostic for a pure state under the chosen channel.
pub fn delta_bound<T: Scalar>(
    psi: &WaveFunction<T>,
    t1: T,
    t2: T,
    channel: &Channel<T>,
) -> Result<DeltaBound<T>> {
    if t2 < t1 || t1 < T::of(0.0) {
        return Err(Error::InvalidParameter(
            "delta bound needs t2 >= t1 >= 0".to_string(),
        ));
    }
    match channel {
        Channel::Unitary => {
            let at_t1 = evolve_free_unchecked(psi, t1);
            let mut cut = at_t1.clone();
            cut.project_negative();
            let cut_t2 = evolve_free_unchecked(&cut, t2 - t1);
            let delta = cut_t2.prob_positive();
            let full_t2 = evolve_free_unchecked(&at_t1, t2 - t1);
            let mut pos = cut_t2;
            pos.project_positive();
            let d = full_t2.inner(&pos);
            Ok(DeltaBound {
                delta,
                d_sq: d.norm_sqr(),
            })
        }
        Channel::Qbm(_) => delta_bound_density(&DensityMatrix::from_pure(psi), t1, t2, channel),
    }
}

/// The same diagnostic for a density matrix: Delta by two-sided projection
/// at t1 and Tr(P .) at t2, |d|^2 from the left-projected evolution.
pub fn delta_bound_density<T: Scalar>(
    rho: &DensityMatrix<T>,
    t1: T,
    t2: T,
    channel: &Channel<T>,
) -> Result<DeltaBound<T>> {
    if t2 < t1 || t1 < T::of(0.0) {
        return Err(Error::InvalidParameter(
            "delta bound needs t2 >= t1 >= 0".to_string(),
        ));
    }
    let at_t1 = channel_evolve_density(rho, t1, channel)?;
    let mut cut = at_t1.clone();
    cut.project_negative();
    let cut_t2 = channel_evolve_density(&cut, t2 - t1, channel)?;
    let delta = cut_t2.prob_positive();

    let mut left = at_t1;
    project_left(&mut left, Side::Negative);
    let left_t2 = channel_evolve_density(&left, t2 - t1, channel)?;
    let mut proj = left_t2;
    project_left(&mut proj, Side::Positive);
    let d = complex_trace(&proj);
    Ok(DeltaBound {
        delta,
        d_sq: d.norm_sqr(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{prepare_gaussian, GaussianPacketSpec};
    use crate::histories::first_crossing_operators;
    use crate::propagators::QBMParams;

    fn grid(n: usize, a: f64, b: f64) -> SimulationGrid<f64> {
        SimulationGrid::new(n, a, b).unwrap()
    }

    #[test]
    fn single_time_pair_is_exactly_diagonal() {
        // {Pbar(t), P(t)}: the two branches live on disjoint supports at the
        // common horizon, so the off-diagonal vanishes identically
        let g = grid(256, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let specs = first_crossing_operators(&[1.0]).unwrap();
        let rep = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        assert_eq!(rep.len(), 2);
        assert_eq!(rep.entry(0, 1).norm_sqr(), 0.0);
        assert!((rep.total().re - 1.0).abs() < 1e-12);
        assert!((rep.probability(0) + rep.probability(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matrix_sums_to_one_and_is_hermitian() {
        let g = grid(256, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let specs = first_crossing_operators(&[0.5, 1.5, 2.5, 3.5]).unwrap();
        let rep = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        let total = rep.total();
        assert!((total.re - 1.0).abs() < 1e-8, "sum {}", total.re);
        assert!(total.im.abs() < 1e-10);
        for i in 0..rep.len() {
            for j in 0..rep.len() {
                let d = (rep.entry(i, j) - rep.entry(j, i).conj()).norm_sqr().sqrt();
                assert!(d < 1e-14);
            }
            assert!(rep.probability(i) > -1e-10);
        }
    }

    #[test]
    fn density_path_matches_pure_path_for_unitary_channel() {
        let g = grid(128, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let specs = first_crossing_operators(&[1.0, 2.0, 3.0]).unwrap();
        let pure = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        let dens = decoherence_functional(&rho, &specs, &Channel::Unitary).unwrap();
        for i in 0..pure.len() {
            for j in 0..pure.len() {
                let d = (pure.entry(i, j) - dens.entry(i, j)).norm_sqr().sqrt();
                assert!(d < 1e-10, "D({i},{j}) mismatch {d:.3e}");
            }
            let dq = (pure.q(i) - dens.q(i)).norm_sqr().sqrt();
            assert!(dq < 1e-10);
        }
    }

    #[test]
    fn incomplete_history_set_is_rejected() {
        let g = grid(128, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let mut specs = first_crossing_operators(&[1.0, 2.0]).unwrap();
        specs.pop(); // drop the no-crossing complement
        let out = decoherence_functional_pure(&psi, &specs, &Channel::Unitary);
        assert!(matches!(out, Err(Error::CompletenessViolation { .. })));
    }

    #[test]
    fn narrow_momentum_gaussian_decoheres_with_the_free_particle_bound() {
        // sigma |p0| = 20, E0 (t2 - t1) = 12.5 >> 1: the free-particle
        // analysis bounds Delta by 1/(sigma |p0|) = 0.05, and off-diagonals
        // by sqrt(Delta)
        let g = grid(2048, -96.0, 96.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(12.0, -5.0, 4.0), &g, 1.0).unwrap();
        let times = [1.0, 2.0, 3.0, 4.0];
        let specs = first_crossing_operators(&times).unwrap();
        let rep = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        let bound = 1.0 / 20.0;
        let db = delta_bound(&psi, 2.0, 3.0, &Channel::Unitary).unwrap();
        assert!(db.delta < bound, "Delta = {:.3e}", db.delta);
        assert!(db.d_sq <= db.delta + 1e-12);
        for i in 0..rep.len() {
            for j in 0..rep.len() {
                if i != j {
                    let z = rep.entry(i, j).norm_sqr().sqrt();
                    assert!(z <= bound.sqrt(), "|D({i},{j})| = {z:.3e}");
                }
            }
        }
        // probability consistency under decoherence: p(alpha) ~ Re q(alpha)
        if rep.is_decoherent(0.01) {
            for i in 0..rep.len() {
                assert!((rep.probability(i) - rep.q(i).re).abs() < 0.02);
            }
        }
    }

    #[test]
    fn cauchy_schwarz_holds_for_random_states_and_windows() {
        let g = grid(128, -16.0, 16.0);
        for seed in 0..50usize {
            let psi = probe_state(&g, 1.0, seed + 17);
            let t1 = 0.1 + (seed % 7) as f64 * 0.3;
            let t2 = t1 + 0.2 + (seed % 5) as f64 * 0.4;
            let db = delta_bound(&psi, t1, t2, &Channel::Unitary).unwrap();
            assert!(db.d_sq <= db.delta + 1e-12, "seed {seed}");
            assert!(db.delta >= 0.0 && db.delta <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn left_gone_packet_has_negligible_delta() {
        // at t1 = 6 the packet is entirely in x < 0 and still left-moving:
        // the probability to reappear in x > 0 is numerically zero
        let g = grid(512, -40.0, 24.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(10.0, -5.0, 2.0), &g, 1.0).unwrap();
        let db = delta_bound(&psi, 6.0, 7.0, &Channel::Unitary).unwrap();
        assert!(db.delta < 1e-6, "Delta = {:.3e}", db.delta);
    }

    #[test]
    fn qbm_channel_with_negligible_noise_matches_the_unitary_functional() {
        let g = grid(128, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(3.0, -1.5, 1.0), &g, 1.0).unwrap();
        let specs = first_crossing_operators(&[1.0, 2.0]).unwrap();
        let unit = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        let params = QBMParams::new(1e-12).unwrap();
        let qbm =
            decoherence_functional_pure(&psi, &specs, &Channel::Qbm(params)).unwrap();
        for i in 0..unit.len() {
            for j in 0..unit.len() {
                let d = (unit.entry(i, j) - qbm.entry(i, j)).norm_sqr().sqrt();
                assert!(d < 1e-5, "D({i},{j}) drift {d:.3e}");
            }
        }
        let ts = qbm.timescales().unwrap();
        assert!(ts.tau_l > 1e5);
    }

    #[test]
    fn environment_suppresses_interference() {
        // same state and windows: a real environment must shrink the
        // normalized off-diagonal interference relative to unitary evolution
        let g = grid(128, -16.0, 16.0);
        let psi = prepare_gaussian(&GaussianPacketSpec::new(4.0, -2.0, 1.0), &g, 1.0).unwrap();
        let specs = first_crossing_operators(&[1.0, 2.0, 3.0]).unwrap();
        let unit = decoherence_functional_pure(&psi, &specs, &Channel::Unitary).unwrap();
        let params = QBMParams::new(2.0).unwrap();
        let qbm =
            decoherence_functional_pure(&psi, &specs, &Channel::Qbm(params)).unwrap();
        assert!((qbm.total().re - 1.0).abs() < 1e-6);
        assert!(qbm.max_normalized_offdiag() < unit.max_normalized_offdiag());
    }
}
