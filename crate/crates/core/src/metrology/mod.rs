//! Phase and angle estimation: observables, error propagation, Monte Carlo
//! sampling and scaling experiments.

mod monte_carlo;
mod observables;
mod protocol;
mod ramsey;

pub use monte_carlo::{
    fit_scaling, outcome_distribution, run_monte_carlo, scaling_experiment, OutcomeDistribution, ScalingFamily,
    ScalingFit, ScalingRun,
};
pub use observables::{observable_a, observable_b, observable_r};
pub use protocol::{
    analytic_estimate, fringe_period, fringe_visibility, propagate_uncertainty, EstimationResult, Fringe, Method,
    Protocol, ProtocolSetup, ResponseCurve, CLASSICAL_VISIBILITY_BOUND, DERIVATIVE_FLOOR,
};
pub use ramsey::{ramsey_frequency_estimate, RamseyProtocol, RamseyResult};
