//! Experiment drivers: each maps a validated scenario onto the core
//! library and produces tables plus a summary.

use anyhow::Result;
use num_complex::Complex;

use arrival_core::arrival::{
    arrival_prob_current, arrival_prob_projector, backflow_search, current_at_origin, current_qbm,
};
use arrival_core::grid::{
    prepare_gaussian, wigner_transform, DensityMatrix, GaussianPacketSpec, SimulationGrid,
    WaveFunction,
};
use arrival_core::histories::{
    decoherence_functional_pure, delta_bound, first_crossing_operators, regime_classify, Regime,
};
use arrival_core::povm::{
    arrival_operator_e, default_width, positivity_time, B11Reading, SmearingKernel,
};
use arrival_core::propagators::{
    equivalence_check, evolve_free_unchecked, evolve_pulsed, qbm_evolve, Channel, PulsedSchedule,
    QBMParams,
};

use crate::config::{ChannelKind, ExperimentKind, ScenarioConfig};
use crate::table::{ResultTable, RunArtifacts, RunSummary};

/// How a run can fail, mapped onto the process exit codes.
#[derive(Debug)]
pub enum RunError {
    /// Exit 2: the configuration or the state it describes is unusable.
    Config(String),
    /// Exit 3: an adaptive computation failed to converge.
    Convergence(String),
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(m) => write!(f, "config error: {m}"),
            Self::Convergence(m) => write!(f, "convergence failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Sort a core error into the exit-code taxonomy.
fn classify(err: arrival_core::Error) -> RunError {
    use arrival_core::Error as E;
    match err {
        E::StepSizeDivergence { .. }
        | E::QuadratureNonConvergence { .. }
        | E::KernelNormalization { .. }
        | E::TruncationInsufficient { .. } => RunError::Convergence(err.to_string()),
        other => RunError::Config(other.to_string()),
    }
}

/// The grid, initial state and channel shared by every experiment.
pub struct Scenario {
    pub grid: SimulationGrid<f64>,
    pub psi: WaveFunction<f64>,
    pub mass: f64,
    pub channel: Channel<f64>,
}

impl Scenario {
    pub fn build(config: &ScenarioConfig) -> Result<Self, RunError> {
        let g = &config.grid;
        let grid = SimulationGrid::new(g.n_points, g.x_min, g.x_max)
            .map_err(|e| RunError::Config(e.to_string()))?;
        let mass = config.state.mass;
        let mut psi = WaveFunction::zeros(grid.clone(), mass);
        for p in &config.state.packets {
            let part = prepare_gaussian(&GaussianPacketSpec::new(p.x0, p.p0, p.sigma), &grid, mass)
                .map_err(|e| RunError::Config(e.to_string()))?;
            psi.add_scaled(&part, Complex::new(p.re, p.im));
        }
        if psi.norm() == 0.0 {
            return Err(RunError::Config(
                "state.packets: the packets cancel to the zero state".to_string(),
            ));
        }
        psi.normalize();
        let channel = match config.dynamics.channel {
            ChannelKind::Qbm => {
                let d = config.dynamics.d_coeff.ok_or_else(|| {
                    RunError::Config("dynamics.d_coeff: required for qbm".to_string())
                })?;
                Channel::Qbm(QBMParams::new(d).map_err(|e| RunError::Config(e.to_string()))?)
            }
            _ => Channel::Unitary,
        };
        Ok(Self {
            grid,
            psi,
            mass,
            channel,
        })
    }

    fn qbm_params(&self) -> Option<&QBMParams<f64>> {
        match &self.channel {
            Channel::Qbm(p) => Some(p),
            _ => None,
        }
    }
}

/// Run one resolved scenario to completion.
pub fn run_scenario(config: &ScenarioConfig) -> Result<RunArtifacts, RunError> {
    let requires = |ok: bool, msg: &str| -> Result<(), RunError> {
        if ok {
            Ok(())
        } else {
            Err(RunError::Config(msg.to_string()))
        }
    };
    let kind = config.experiment.kind;
    match kind {
        ExperimentKind::ArrivalDist => requires(
            matches!(
                config.dynamics.channel,
                ChannelKind::Unitary | ChannelKind::Qbm
            ),
            "experiment arrival-dist needs channel unitary or qbm",
        )?,
        ExperimentKind::Zeno => requires(
            config.dynamics.channel == ChannelKind::Pulsed,
            "experiment zeno needs channel pulsed",
        )?,
        ExperimentKind::Equivalence => requires(
            matches!(
                config.dynamics.channel,
                ChannelKind::Pulsed | ChannelKind::ComplexPotential
            ),
            "experiment equivalence needs channel pulsed or complex-potential",
        )?,
        ExperimentKind::Backflow => requires(
            config.dynamics.channel == ChannelKind::Unitary,
            "experiment backflow needs channel unitary",
        )?,
        ExperimentKind::PositivityTime | ExperimentKind::PovmCheck => requires(
            config.dynamics.channel == ChannelKind::Qbm,
            "experiments positivity-time and povm-check need channel qbm",
        )?,
        ExperimentKind::Decohere => requires(
            matches!(
                config.dynamics.channel,
                ChannelKind::Unitary | ChannelKind::Qbm
            ),
            "experiment decohere needs channel unitary or qbm",
        )?,
    }

    let scenario = Scenario::build(config)?;
    match kind {
        ExperimentKind::ArrivalDist => arrival_dist(config, &scenario),
        ExperimentKind::Equivalence => equivalence(config, &scenario),
        ExperimentKind::Zeno => zeno(config, &scenario),
        ExperimentKind::Backflow => backflow(config, &scenario),
        ExperimentKind::PositivityTime => positivity_scan(config, &scenario),
        ExperimentKind::Decohere => decohere(config, &scenario),
        ExperimentKind::PovmCheck => povm_check(config, &scenario),
    }
}

/// Arrival-time distribution: the current J(t) sampled over the window and
/// its cumulative integral, which must approach 1 for a packet given the
/// classical crossing headroom t >= 3 m x0 / |p0|.
fn arrival_dist(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let mut table = ResultTable::new(
        "arrival_dist",
        &[("t", "time"), ("current", "1/time"), ("cumulative", "1")],
    );
    let (t1, t2) = (config.experiment.t1, config.experiment.t2);
    let n = config.experiment.samples;
    let h = (t2 - t1) / (n - 1) as f64;

    let mut cumulative = 0.0;
    let mut prev_j = 0.0;
    match &sc.channel {
        Channel::Unitary => {
            for k in 0..n {
                let t = t1 + h * k as f64;
                let j = current_at_origin(&evolve_free_unchecked(&sc.psi, t));
                if k > 0 {
                    cumulative += 0.5 * h * (prev_j + j);
                }
                table.push(vec![t, j, cumulative]);
                prev_j = j;
            }
        }
        Channel::Qbm(params) => {
            let mut rho = DensityMatrix::from_pure(&sc.psi);
            let mut now = 0.0;
            for k in 0..n {
                let t = t1 + h * k as f64;
                rho = qbm_evolve(&rho, t - now, params).map_err(classify)?;
                now = t;
                let j = current_qbm(&rho);
                if k > 0 {
                    cumulative += 0.5 * h * (prev_j + j);
                }
                table.push(vec![t, j, cumulative]);
                prev_j = j;
            }
        }
    }

    // the converged window probability, independent of the sample ladder
    let window = arrival_prob_current(&sc.psi, t1, t2, &sc.channel).map_err(classify)?;
    summary.metric("window_probability", window);
    summary.metric("cumulative_sampled", cumulative);
    summary.metric(
        "sampling_defect",
        (window - (cumulative - 0.0)).abs(),
    );

    // normalization envelope: only judged when the window gives the packet
    // the classical crossing headroom
    let lead = &config.state.packets[0];
    let headroom = 3.0 * sc.mass * lead.x0.abs() / lead.p0.abs().max(1e-300);
    let judged = t1 == 0.0 && t2 >= headroom && lead.p0 < 0.0 && lead.x0 > 0.0;
    summary.flag("normalization_judged", judged);
    if judged {
        summary.metric("normalization_error", (window - 1.0).abs());
        if (window - 1.0).abs() > 0.01 {
            summary.violation(format!(
                "cumulative arrival probability {window:.6} misses 1 by more than 0.01 \
                 at t = {t2} >= 3 m x0/|p0| = {headroom:.3}"
            ));
        }
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Pulsed-vs-absorbing equivalence at the configured projection spacing.
fn equivalence(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let eps = config
        .dynamics
        .epsilon
        .ok_or_else(|| RunError::Config("dynamics.epsilon: required for equivalence".into()))?;
    let tau = config.experiment.t2;
    let report =
        equivalence_check(&sc.psi, tau, eps, config.dynamics.v0).map_err(classify)?;

    let mut table = ResultTable::new(
        "equivalence",
        &[
            ("epsilon", "time"),
            ("eps_energy", "1"),
            ("eps_delta_h", "1"),
            ("l2_difference", "1"),
            ("norm_pulsed", "1"),
            ("norm_absorbed", "1"),
            ("in_regime", "1"),
            ("reflection_flag", "1"),
        ],
    );
    table.push(vec![
        eps,
        report.eps_energy,
        report.eps_delta_h,
        report.l2_difference,
        report.norm_pulsed,
        report.norm_absorbed,
        report.in_regime as u8 as f64,
        report.reflection_flag as u8 as f64,
    ]);
    summary.metric("l2_difference", report.l2_difference);
    summary.metric("eps_energy", report.eps_energy);
    summary.metric("eps_delta_h", report.eps_delta_h);
    summary.flag("in_regime", report.in_regime);
    summary.flag("reflection_flag", report.reflection_flag);
    if report.in_regime && report.l2_difference > 0.05 {
        summary.violation(format!(
            "equivalence regime violated: l2 difference {:.4} > 0.05 with eps E = {:.2} and \
             eps dH = {:.4}",
            report.l2_difference, report.eps_energy, report.eps_delta_h
        ));
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Zeno ladder: survival under pulsed projections as epsilon halves.
fn zeno(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let eps0 = config
        .dynamics
        .epsilon
        .ok_or_else(|| RunError::Config("dynamics.epsilon: required for zeno".into()))?;
    let tau = config.experiment.t2;
    let base = (tau / eps0).round() as usize;
    if base == 0 {
        return Err(RunError::Config(
            "dynamics.epsilon: must be at most experiment.t2".to_string(),
        ));
    }
    let mut table = ResultTable::new(
        "zeno",
        &[("epsilon", "time"), ("n_steps", "1"), ("survival", "1")],
    );
    let mut survivals = Vec::new();
    for rung in 0..5u32 {
        let n = base << rung;
        let sched = PulsedSchedule::covering(tau, n).map_err(classify)?;
        let survival = evolve_pulsed(&sc.psi, &sched).norm_sqr();
        table.push(vec![sched.epsilon(), n as f64, survival]);
        survivals.push(survival);
    }
    let monotone = survivals.windows(2).all(|w| w[1] > w[0]);
    summary.metric("survival_finest", *survivals.last().unwrap());
    summary.flag("monotone", monotone);
    if !monotone {
        summary.violation("zeno survival is not monotone in the projection spacing".to_string());
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Maximal backflow over the incoming subspace in the configured window.
fn backflow(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let (t1, t2) = (config.experiment.t1, config.experiment.t2);
    let result = backflow_search(&sc.grid, t1, t2, sc.mass).map_err(classify)?;
    let mut table = ResultTable::new(
        "backflow",
        &[
            ("t1", "time"),
            ("t2", "time"),
            ("lambda_min", "1"),
            ("current_integral", "1"),
        ],
    );
    table.push(vec![t1, t2, result.lambda_min, result.amount]);
    summary.metric("lambda_min", result.lambda_min);
    summary.metric("current_integral", result.amount);
    summary.flag("backflow_found", result.lambda_min < -1e-3);
    if result.lambda_min >= -1e-3 {
        summary.violation(format!(
            "no backflow found: lambda_min {:.3e} >= -1e-3",
            result.lambda_min
        ));
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Wigner-positivity onset under QBM, against the (3/16)^(1/4) tau_l
/// prediction.
fn positivity_scan(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let params = sc.qbm_params().expect("qbm channel checked upstream");
    let predicted = positivity_time(params, sc.mass);
    let (t1, t2) = (config.experiment.t1, config.experiment.t2);
    let n = config.experiment.samples;
    let h = (t2 - t1) / (n - 1) as f64;

    let mut table = ResultTable::new(
        "positivity",
        &[("t", "time"), ("min_w", "1"), ("max_w", "1"), ("ratio", "1")],
    );
    let mut rho = DensityMatrix::from_pure(&sc.psi);
    let mut now = 0.0;
    let mut crossing: Option<f64> = None;
    for k in 0..n {
        let t = t1 + h * k as f64;
        rho = qbm_evolve(&rho, t - now, params).map_err(classify)?;
        now = t;
        let w = wigner_transform(&rho).map_err(classify)?;
        let min_w = w.min_value();
        let max_w = w.values().iter().cloned().fold(0.0f64, f64::max);
        let ratio = min_w / max_w;
        table.push(vec![t, min_w, max_w, ratio]);
        if crossing.is_none() && ratio >= -1e-6 {
            crossing = Some(t);
        }
    }
    summary.metric("predicted_positivity_time", predicted);
    match crossing {
        Some(t) => {
            summary.metric("measured_positivity_time", t);
            let within = t >= 0.5 * predicted && t <= 2.0 * predicted;
            summary.flag("within_factor_two", within);
            if t2 >= 2.0 * predicted && !within {
                summary.violation(format!(
                    "positivity onset {t:.4} outside [{:.4}, {:.4}]",
                    0.5 * predicted,
                    2.0 * predicted
                ));
            }
        }
        None => {
            summary.flag("within_factor_two", false);
            if t2 >= 2.0 * predicted {
                summary.violation(format!(
                    "Wigner function still negative at t = {t2} > 2 x predicted {predicted:.4}"
                ));
            }
        }
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Decoherence functional for the one-window crossing history set, with the
/// Delta diagnostic and regime classification.
fn decohere(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let (t1, t2) = (config.experiment.t1, config.experiment.t2);
    if t1 <= 0.0 {
        return Err(RunError::Config(
            "experiment.t1: decohere needs t1 > 0".to_string(),
        ));
    }
    let histories = first_crossing_operators(&[t1, t2]).map_err(classify)?;
    let report =
        decoherence_functional_pure(&sc.psi, &histories, &sc.channel).map_err(classify)?;
    let bound = delta_bound(&sc.psi, t1, t2, &sc.channel).map_err(classify)?;

    let mut table = ResultTable::new(
        "decohere",
        &[("branch", "1"), ("probability", "1"), ("q_re", "1"), ("q_im", "1")],
    );
    for i in 0..report.len() {
        let q = report.q(i);
        table.push(vec![i as f64, report.probability(i), q.re, q.im]);
    }
    summary.metric("max_offdiag", report.max_normalized_offdiag());
    summary.metric("delta", bound.delta);
    summary.metric("d_sq", bound.d_sq);
    summary.flag("decoherent_at_0p01", report.is_decoherent(0.01));
    summary.flag(
        "cauchy_schwarz",
        bound.d_sq <= bound.delta + 1e-12,
    );
    if bound.d_sq > bound.delta + 1e-12 {
        summary.violation(format!(
            "Cauchy-Schwarz violated: |d|^2 {:.3e} > Delta {:.3e}",
            bound.d_sq, bound.delta
        ));
    }
    if let (Channel::Qbm(params), Some(lead)) = (&sc.channel, config.state.packets.first()) {
        let spec = GaussianPacketSpec::new(lead.x0, lead.p0, lead.sigma);
        let regime = regime_classify(params, &spec, t1, t2, sc.mass);
        summary.metric("tau_l", regime.tau_l);
        summary.metric("tau_s", regime.tau_s);
        summary.metric("e0_dt", regime.e0_dt);
        summary.flag("in_theory", regime.regime != Regime::OutOfTheory);
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}

/// Arrival-window POVM versus the projector bookkeeping, plus positivity on
/// the near-deterministic momentum subspace.
fn povm_check(config: &ScenarioConfig, sc: &Scenario) -> Result<RunArtifacts, RunError> {
    let hash = config.hash();
    let mut summary = RunSummary::new(config.experiment.kind.name(), &hash);
    let params = sc.qbm_params().expect("qbm channel checked upstream");
    let (t1, t2) = (config.experiment.t1, config.experiment.t2);
    if t1 <= 0.0 {
        return Err(RunError::Config(
            "experiment.t1: povm-check needs t1 > 0".to_string(),
        ));
    }
    let s = config
        .dynamics
        .s
        .unwrap_or_else(|| SmearingKernel::optimal_s(t1, sc.mass));
    let width = default_width(s);
    let e = arrival_operator_e(
        t1,
        t2,
        params,
        s,
        B11Reading::Subtracted,
        width,
        &sc.grid,
        sc.mass,
    )
    .or_else(|_| {
        arrival_operator_e(
            t1,
            t2,
            params,
            s,
            B11Reading::Added,
            width,
            &sc.grid,
            sc.mass,
        )
    })
    .map_err(classify)?;

    let window = e.expectation(&sc.psi);
    let projector =
        arrival_prob_projector(&sc.psi, t1, t2, &sc.channel).map_err(classify)?;
    let p_cut = -2.0 * (10.0 * params.d_coeff() * t2).sqrt();
    let min_eig = if -p_cut < sc.grid.p_max() {
        e.min_eigenvalue_below(p_cut)
    } else {
        f64::NAN
    };

    let mut table = ResultTable::new(
        "povm_check",
        &[
            ("t1", "time"),
            ("t2", "time"),
            ("s", "momentum"),
            ("tr_e_rho", "1"),
            ("projector_window", "1"),
            ("min_eig_restricted", "1"),
        ],
    );
    table.push(vec![t1, t2, s, window, projector, min_eig]);
    summary.metric("tr_e_rho", window);
    summary.metric("projector_window", projector);
    let rel = (window - projector).abs() / projector.abs().max(1e-12);
    summary.metric("relative_difference", rel);
    summary.metric("min_eig_restricted", min_eig);
    if rel > 0.10 {
        summary.violation(format!(
            "Tr(E rho) {window:.5} differs from the projector window {projector:.5} by {:.1}%",
            100.0 * rel
        ));
    }
    if min_eig.is_finite() && min_eig < -1e-6 {
        summary.violation(format!(
            "arrival operator not positive on the incoming subspace: {min_eig:.3e}"
        ));
    }
    Ok(RunArtifacts {
        summary,
        tables: vec![table],
    })
}
