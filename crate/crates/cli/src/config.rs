//! Scenario configuration: TOML schema, validation, and the resolved form
//! whose serialization is hashed into every output artifact.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use arrival_core::grid::SimulationGrid;

/// Spatial lattice block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridBlock {
    pub n_points: usize,
    pub x_min: f64,
    pub x_max: f64,
}

/// One Gaussian component of the initial state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PacketBlock {
    pub x0: f64,
    pub p0: f64,
    pub sigma: f64,
    /// Complex coefficient, defaulting to 1 + 0i.
    #[serde(default = "one")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn one() -> f64 {
    1.0
}

/// Initial-state block: a normalized superposition of Gaussian packets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateBlock {
    #[serde(default = "one")]
    pub mass: f64,
    pub packets: Vec<PacketBlock>,
}

/// Evolution channel selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    Unitary,
    ComplexPotential,
    Pulsed,
    Qbm,
}

/// Dynamics block: the channel plus its parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DynamicsBlock {
    pub channel: ChannelKind,
    /// Absorber strength for channel = "complex-potential".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v0: Option<f64>,
    /// Projection spacing for channel = "pulsed".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// Decoherence coefficient for channel = "qbm".
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_coeff: Option<f64>,
    /// Phase-space smearing for the povm-check experiment; defaults to the
    /// determinant-maximizing choice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
}

/// Which study to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    ArrivalDist,
    Equivalence,
    Zeno,
    Backflow,
    PositivityTime,
    Decohere,
    PovmCheck,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::ArrivalDist => "arrival-dist",
            Self::Equivalence => "equivalence",
            Self::Zeno => "zeno",
            Self::Backflow => "backflow",
            Self::PositivityTime => "positivity-time",
            Self::Decohere => "decohere",
            Self::PovmCheck => "povm-check",
        }
    }
}

/// Experiment block: the study plus its window/sampling parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentBlock {
    pub kind: ExperimentKind,
    /// Window start (defaults to 0).
    #[serde(default)]
    pub t1: f64,
    /// Window end / horizon.
    pub t2: f64,
    /// Number of output samples for time-resolved tables.
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    64
}

/// Optional embedded sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepBlock {
    pub parameter: String,
    pub values: Vec<f64>,
}

/// Output block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputBlock {
    pub directory: String,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

fn default_formats() -> Vec<String> {
    vec!["csv".to_string(), "json".to_string()]
}

/// The whole scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: GridBlock,
    pub state: StateBlock,
    pub dynamics: DynamicsBlock,
    pub experiment: ExperimentBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepBlock>,
    pub output: OutputBlock,
}

impl ScenarioConfig {
    /// Parse a TOML document; syntax errors come back verbatim.
    pub fn parse(text: &str) -> Result<Self, String> {
        toml::from_str(text).map_err(|e| format!("config parse error: {e}"))
    }

    /// SHA-256 of the resolved (re-serialized) config, hex-encoded.
    pub fn hash(&self) -> String {
        let resolved = toml::to_string(self).expect("config reserialization");
        let mut hasher = Sha256::new();
        hasher.update(resolved.as_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Resolved output directory: the config value unless overridden by the
    /// ARRIVAL_LAB_OUTDIR environment variable.
    pub fn out_dir(&self) -> String {
        std::env::var("ARRIVAL_LAB_OUTDIR").unwrap_or_else(|_| self.output.directory.clone())
    }

    /// Exhaustive validation report: every problem found, with its field
    /// path. An empty list means the config is runnable.
    pub fn validate(&self) -> Vec<String> {
        let mut errors = Vec::new();
        let g = &self.grid;
        if !g.n_points.is_power_of_two() || g.n_points < 8 {
            errors.push(format!(
                "grid.n_points: must be a power of two >= 8, got {}",
                g.n_points
            ));
        }
        if !(g.x_max > g.x_min) {
            errors.push(format!(
                "grid.x_max: must exceed grid.x_min ({} vs {})",
                g.x_max, g.x_min
            ));
        }
        if g.x_min >= 0.0 || g.x_max <= 0.0 {
            errors.push("grid: the box must contain the origin (x_min < 0 < x_max)".to_string());
        }
        let dx = (g.x_max - g.x_min) / g.n_points as f64;
        let p_max = std::f64::consts::PI / dx;

        if !(self.state.mass > 0.0) {
            errors.push(format!("state.mass: must be positive, got {}", self.state.mass));
        }
        if self.state.packets.is_empty() {
            errors.push("state.packets: at least one Gaussian packet is required".to_string());
        }
        for (i, p) in self.state.packets.iter().enumerate() {
            if !(p.sigma > 0.0) {
                errors.push(format!("state.packets[{i}].sigma: must be positive"));
            } else if p.sigma < 4.0 * dx {
                errors.push(format!(
                    "state.packets[{i}].sigma: {} is unresolvable on this grid (needs >= 4 dx = {})",
                    p.sigma,
                    4.0 * dx
                ));
            }
            if p.p0.abs() > 0.5 * p_max {
                errors.push(format!(
                    "state.packets[{i}].p0: |{}| exceeds half the grid Nyquist momentum {}",
                    p.p0,
                    0.5 * p_max
                ));
            }
            if p.re == 0.0 && p.im == 0.0 {
                errors.push(format!("state.packets[{i}]: coefficient must be nonzero"));
            }
        }

        let d = &self.dynamics;
        match d.channel {
            ChannelKind::ComplexPotential => {
                match d.v0 {
                    None => errors.push(
                        "dynamics.v0: required when channel = \"complex-potential\"".to_string(),
                    ),
                    Some(v) if !(v > 0.0) => {
                        errors.push(format!("dynamics.v0: must be positive, got {v}"))
                    }
                    _ => {}
                }
            }
            ChannelKind::Pulsed => match d.epsilon {
                None => {
                    errors.push("dynamics.epsilon: required when channel = \"pulsed\"".to_string())
                }
                Some(e) if !(e > 0.0) => {
                    errors.push(format!("dynamics.epsilon: must be positive, got {e}"))
                }
                _ => {}
            },
            ChannelKind::Qbm => match d.d_coeff {
                None => {
                    errors.push("dynamics.d_coeff: required when channel = \"qbm\"".to_string())
                }
                Some(v) if !(v > 0.0) => {
                    errors.push(format!("dynamics.d_coeff: must be positive, got {v}"))
                }
                _ => {}
            },
            ChannelKind::Unitary => {}
        }
        if let Some(s) = d.s {
            if !(s > 0.0) {
                errors.push(format!("dynamics.s: must be positive, got {s}"));
            }
        }

        let e = &self.experiment;
        if e.t1 < 0.0 {
            errors.push(format!("experiment.t1: must be non-negative, got {}", e.t1));
        }
        if !(e.t2 > e.t1) {
            errors.push(format!(
                "experiment.t2: must exceed experiment.t1 ({} vs {})",
                e.t2, e.t1
            ));
        }
        if e.samples < 2 {
            errors.push(format!(
                "experiment.samples: needs at least 2, got {}",
                e.samples
            ));
        }
        match e.kind {
            ExperimentKind::Equivalence => {
                if self.dynamics.epsilon.is_none() && self.sweep.is_none() {
                    errors.push(
                        "dynamics.epsilon: the equivalence experiment needs epsilon (or a sweep over it)"
                            .to_string(),
                    );
                }
            }
            ExperimentKind::PositivityTime | ExperimentKind::PovmCheck => {
                if self.dynamics.d_coeff.is_none() {
                    errors.push(format!(
                        "dynamics.d_coeff: the {} experiment needs the qbm decoherence coefficient",
                        e.kind.name()
                    ));
                }
            }
            _ => {}
        }

        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                errors.push("sweep.values: must be non-empty".to_string());
            }
            if !SWEEPABLE.contains(&sweep.parameter.as_str()) {
                errors.push(format!(
                    "sweep.parameter: unknown parameter {:?} (one of {})",
                    sweep.parameter,
                    SWEEPABLE.join(", ")
                ));
            }
        }

        if self.output.directory.is_empty() {
            errors.push("output.directory: must be non-empty".to_string());
        }
        for f in &self.output.formats {
            if f != "csv" && f != "json" {
                errors.push(format!("output.formats: unknown format {f:?}"));
            }
        }

        // cross-check against the core grid constructor so the report and
        // the runner can never disagree
        if errors.is_empty() {
            if let Err(err) = SimulationGrid::<f64>::new(g.n_points, g.x_min, g.x_max) {
                errors.push(format!("grid: {err}"));
            }
        }
        errors
    }

    /// Apply one sweep assignment. The parameter set is closed so sweeps
    /// stay hashable and reproducible.
    pub fn with_parameter(&self, name: &str, value: f64) -> Result<Self, String> {
        let mut c = self.clone();
        match name {
            "dynamics.v0" => c.dynamics.v0 = Some(value),
            "dynamics.epsilon" => c.dynamics.epsilon = Some(value),
            "dynamics.d_coeff" => c.dynamics.d_coeff = Some(value),
            "dynamics.s" => c.dynamics.s = Some(value),
            "experiment.t1" => c.experiment.t1 = value,
            "experiment.t2" => c.experiment.t2 = value,
            "state.p0" => {
                for p in &mut c.state.packets {
                    p.p0 = value;
                }
            }
            "state.sigma" => {
                for p in &mut c.state.packets {
                    p.sigma = value;
                }
            }
            _ => return Err(format!("unknown sweep parameter {name:?}")),
        }
        Ok(c)
    }
}

/// Parameters a sweep may vary.
pub const SWEEPABLE: [&str; 8] = [
    "dynamics.v0",
    "dynamics.epsilon",
    "dynamics.d_coeff",
    "dynamics.s",
    "experiment.t1",
    "experiment.t2",
    "state.p0",
    "state.sigma",
];
