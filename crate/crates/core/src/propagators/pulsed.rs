use crate::grid::WaveFunction;
use crate::propagators::evolve_free_unchecked;
use crate::Scalar;

use super::PulsedSchedule;

/// The pulsed (Zeno) string e^{-iH tau} P(n eps) ... P(2 eps) P(eps) |psi>,
/// which telescopes to n rounds of (free evolution by eps, then the x >= 0
/// mask). n = 0 is the identity.
pub fn evolve_pulsed<T: Scalar>(psi: &WaveFunction<T>, sched: &PulsedSchedule<T>) -> WaveFunction<T> {
    let mut state = psi.clone();
    for _ in 0..sched.n_steps() {
        state = evolve_free_unchecked(&state, sched.epsilon());
        state.project_positive();
    }
    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{prepare_gaussian, GaussianPacketSpec, SimulationGrid};
    use crate::propagators::evolve_free;

    fn packet(x0: f64, p0: f64, sigma: f64) -> WaveFunction<f64> {
        let g = SimulationGrid::new(1024, -30.0, 34.0).unwrap();
        prepare_gaussian(&GaussianPacketSpec::new(x0, p0, sigma), &g, 1.0).unwrap()
    }

    #[test]
    fn zero_steps_is_identity() {
        let psi = packet(10.0, -2.0, 1.0);
        let sched = PulsedSchedule::new(0.5, 0).unwrap();
        assert_eq!(evolve_pulsed(&psi, &sched).l2_distance(&psi), 0.0);
    }

    #[test]
    fn single_step_is_projection_after_free_step() {
        let psi = packet(4.0, -1.0, 1.0);
        let sched = PulsedSchedule::new(0.7, 1).unwrap();
        let pulsed = evolve_pulsed(&psi, &sched);
        let mut reference = evolve_free(&psi, 0.7).unwrap();
        reference.project_positive();
        assert_eq!(pulsed.l2_distance(&reference), 0.0);
    }

    #[test]
    fn deep_right_mover_sees_only_free_evolution() {
        let psi = packet(15.0, 2.0, 1.0);
        let sched = PulsedSchedule::new(0.25, 6).unwrap();
        let pulsed = evolve_pulsed(&psi, &sched);
        let free = evolve_free(&psi, 1.5).unwrap();
        assert!(pulsed.l2_distance(&free) < 1e-8);
    }

    #[test]
    fn zeno_monotonicity_of_survival() {
        // left-moving packet approaching the wall: survival grows as eps
        // shrinks at fixed tau
        let psi = packet(4.0, -1.0, 1.0);
        let tau = 4.0;
        let mut last = -1.0_f64;
        for n in [5usize, 10, 20, 40, 80] {
            let sched = PulsedSchedule::covering(tau, n).unwrap();
            let survival = evolve_pulsed(&psi, &sched).norm_sqr();
            assert!(survival > last, "survival {survival} at n={n} not above {last}");
            last = survival;
        }
    }
}
