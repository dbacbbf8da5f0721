//! Time-domain Gaussian engine, independent of the frequency-domain
//! solver: Lyapunov steady states, regression-theorem spectra and full
//! time-periodic propagation.

mod covariance;
mod periodic;
mod regression;

pub use covariance::{integrate_covariance, lyapunov_steady_state, CovarianceState};
pub use periodic::{
    periodic_propagation, rwa_validate, rwa_validate_with, PeriodicDrift, RwaOptions, RwaReport, Trajectory,
    STEPS_PER_PERIOD_MIN,
};
pub use regression::{output_spectrum_regression, output_spectrum_regression_with, RegressionOptions};
