//! Kalman filtering with lag-augmented AR models, an ensemble transform
//! filter with adaptive observation noise, and skill metrics.

mod enkf;
mod forecast;
mod kalman;
mod metrics;
mod records;
mod state;

pub use enkf::{
    adaptive_noise_estimate, enkf_step, AdaptiveNoise, Ensemble, EnkfStep, MIN_INNOVATIONS, MIN_SPREAD, NOISE_FLOOR,
};
pub use forecast::{ensemble_forecast, BATCH_PASSES, BATCH_TOL, ForecastConfig, ForecastResult, ForecastTrackRow, NoiseMode};
pub use kalman::{run_kalman, KalmanRun, SkillReport, TrackRow, MIN_CYCLES, SPIN_UP_CYCLES};
pub use metrics::{pattern_correlation, pattern_correlation_curve, rmse, rmse_values};
pub use records::{read_rows, write_results, write_rows, write_track, ResultRow};
pub use state::{kalman_forecast, kalman_update, FilterState, Propagator};
