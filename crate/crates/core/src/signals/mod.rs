//! Truth signals and their statistics: Lorenz-96 trajectories and their
//! Fourier modes, Ornstein-Uhlenbeck processes, equilibrium statistics and
//! CSV ingestion.

mod io;
mod lorenz;
mod multi;
mod stats;

pub use io::{
    load_multiseries, load_timeseries, read_multiseries, read_timeseries, save_multiseries, save_timeseries,
    write_multiseries, write_timeseries, SeriesFormat, DAY_DT,
};
pub use lorenz::{advance, integrate_lorenz96, lorenz96_rhs, rk4_step, Lorenz96Config};
pub use multi::{dft_coefficient, fourier_mode, MultiSeries};
pub use stats::{equilibrium_stats, regression_msm, simulate_ou, EquilibriumStats, ACF_CUTOFF};
