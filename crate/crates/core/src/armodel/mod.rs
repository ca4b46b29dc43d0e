//! Complex AR(p) models: representation, stability and consistency checks,
//! regression fits, mean stochastic model parameters and simulation.

mod fit;
mod model;
mod msm;
mod series;
mod simulate;

pub use fit::{aic_criterion, aic_select, constrained_yule_walker_fit, yule_walker_fit, AicSelection, FitDiagnostics};
pub use model::{
    consistency_residuals, ArModel, ConsistencyCheck, ModelFile, Provenance, StabilityCheck, CONSISTENCY_TOL,
    STABILITY_MARGIN,
};
pub use msm::msm_parameters;
pub use series::TimeSeries;
pub use simulate::{complex_normal, simulate};
