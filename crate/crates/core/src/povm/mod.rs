//! Arrival-time POVMs: Gaussian phase-space smearing kernels, coherent-state
//! projectors, the smeared phase-space operators P_z, and the arrival
//! operators F (arrival rate at time t) and E (arrival in a window) whose
//! expectation values reproduce the probability current for open-system
//! states while remaining positive on deterministic left-movers.

mod kernel;
mod operators;

pub use kernel::{
    gaussian_phase_kernel, B11Reading, PhasePoint, SmearingKernel,
};
pub use operators::{
    arrival_operator_e, arrival_operator_e_with, arrival_operator_f, arrival_operator_f_with,
    coherent_projector, coherent_state, default_width, positivity_time, povm_element, PovmMeta,
    PovmOperator,
};
