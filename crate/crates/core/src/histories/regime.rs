use crate::grid::GaussianPacketSpec;
use crate::propagators::QBMParams;
use crate::scalar::Real;

/// Which of the analytic decoherence regimes a run falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// Environment negligible on every relevant timescale.
    Free,
    /// Localized by the environment before the window (t1 >> tau_l) but
    /// effectively free while crossing ((t2 - t1) << tau_l).
    WeakEnvironment,
    /// Environment dominant throughout, with the window still short against
    /// the relaxation time ((t2 - t1) << tau_s).
    StrongEnvironment,
    /// Boundary ratios where none of the asymptotic analyses apply; bound
    /// checks must exclude these runs.
    OutOfTheory,
}

/// Timescale ratios and the regime tag for a Gaussian packet under quantum
/// Brownian motion.
#[derive(Debug, Clone, Copy)]
pub struct RegimeReport<T> {
    /// Localization time sqrt(2m/D).
    pub tau_l: T,
    /// Relaxation time p0^2/D.
    pub tau_s: T,
    /// Kinetic energy p0^2/2m of the packet's mean momentum.
    pub e0: T,
    pub t1_over_tau_l: T,
    pub dt_over_tau_l: T,
    pub dt_over_tau_s: T,
    /// E0 (t2 - t1): the clock resolution condition needs this >> 1.
    pub e0_dt: T,
    pub regime: Regime,
}

/// Classify a run by the environment timescales. "Much greater" and "much
/// less" are cut at 10 and 0.1: ratios in between are tagged out-of-theory,
/// since the paper's bounds hold only asymptotically.
pub fn regime_classify<T: Real>(
    params: &QBMParams<T>,
    state: &GaussianPacketSpec<T>,
    t1: T,
    t2: T,
    mass: T,
) -> RegimeReport<T> {
    let hi = T::of(10.0);
    let lo = T::of(0.1);
    let tau_l = params.tau_l(mass);
    let tau_s = params.tau_s(state.p0);
    let e0 = state.p0 * state.p0 / (T::of(2.0) * mass);
    let dt = t2 - t1;
    let r1 = t1 / tau_l;
    let r2 = dt / tau_l;
    let r3 = dt / tau_s;
    let regime = if r1 <= lo && r2 <= lo {
        Regime::Free
    } else if r1 >= hi && r2 <= lo {
        Regime::WeakEnvironment
    } else if r1 >= hi && r2 >= hi && r3 <= lo {
        Regime::StrongEnvironment
    } else {
        Regime::OutOfTheory
    };
    RegimeReport {
        tau_l,
        tau_s,
        e0,
        t1_over_tau_l: r1,
        dt_over_tau_l: r2,
        dt_over_tau_s: r3,
        e0_dt: e0 * dt,
        regime,
    }
}
