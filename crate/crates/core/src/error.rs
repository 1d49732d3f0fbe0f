use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("packet width sigma = {sigma} is not resolvable on grid with dx = {dx} (need sigma >= 4 dx)")]
    UnresolvableWidth { sigma: f64, dx: f64 },

    #[error("central momentum p0 = {p0} too close to the momentum-grid edge p_max = {p_max}")]
    Aliasing { p0: f64, p_max: f64 },

    #[error("state leaks {leak:.3e} probability at the grid boundary (threshold {threshold:.1e})")]
    BoundaryLeak { leak: f64, threshold: f64 },

    #[error("matrix is not Hermitian: max asymmetry {max_asym:.3e}")]
    NonHermitian { max_asym: f64 },

    #[error("split-step evolution did not converge under step halving: residual {residual:.3e} > {tol:.1e}")]
    StepSizeDivergence { residual: f64, tol: f64 },

    #[error("time quadrature did not converge: residual {residual:.3e} after {levels} refinements")]
    QuadratureNonConvergence { residual: f64, levels: usize },

    #[error("propagator kernel normalization drifted: trace changed by {drift:.3e}")]
    KernelNormalization { drift: f64 },

    #[error("state has {leak:.3e} probability outside the required support")]
    SupportViolation { leak: f64 },

    #[error("operator spectrum not converged under basis enlargement: change {change:.3e}")]
    TruncationInsufficient { change: f64 },

    #[error("smearing kernel is not positive definite: {detail}")]
    NotPositiveDefinite { detail: String },

    #[error("history set violates completeness: residual {residual:.3e}")]
    CompletenessViolation { residual: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
