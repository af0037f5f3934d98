//! Executable versions of the explicit examples: the paraboloid with a
//! decaying gradient drift, the unbounded-drift counterexample, and the
//! exponential sharpness example.

pub mod counterexample;
pub mod paraboloid;
pub mod sharpness;

pub use counterexample::{
    constant_drift_loggrad, counterexample_bound_check, counterexample_loggrad_growth, counterexample_ode_residual,
    CounterexampleFamily,
};
pub use paraboloid::{paraboloid_hypothesis_check, paraboloid_printed_vs_ad, square_grid, ParaboloidClosedForms};
pub use sharpness::sharpness_example_check;
