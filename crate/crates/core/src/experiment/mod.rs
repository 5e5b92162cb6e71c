//! Edge-count sweeps over G(n, k), knee detection and CSV output.

mod config;
mod csv;
mod knee;
mod sweep;

pub use config::{
    default_k_grid, stepped_k_grid, SweepConfig, WeightKind, WeightSpec, DEFAULT_REALIZATIONS, DEFAULT_SAMPLES,
    DEFAULT_THETA_MAX, DEFAULT_THETA_MIN,
};
pub use csv::{emit_csv, parse_csv, read_csv, render_csv, CSV_HEADER};
pub use knee::{knee_location, knee_of, moving_average, slope_over, Knee};
pub use sweep::{run_sweep, run_sweep_observed, CurveRow, EntropyCurve};
