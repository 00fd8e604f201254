//! Exit times of the flow from the shrinking projection family, and the
//! dimension and curvature read off from their small-size expansion.

mod family;
mod fit;
mod gamma;
mod invariants;
mod report;

pub use family::{convergents, nearest_integer_distance, ExitFamily, ExitMember};
pub use fit::{fit_asymptotics, log_log_slope, AsymptoticFit, SeriesPoint, MAX_INTRINSIC_DIMENSION, SLOPE_TOLERANCE};
pub use gamma::{
    compare_engines, exit_time_oracle_exact, gamma_estimate, Engine, EngineComparison, GammaEstimate, McSettings,
    PathOutcome, SURVIVAL_CUTOFF,
};
pub use invariants::{
    classical_circle_benchmark, extract_invariants, paper_series_check, sphere_constant, CircleBenchmark, CircleRow,
    Invariants, SeriesCheck, DEFAULT_CIRCLE_RADII,
};
pub use report::{run_exit_asymptotics, AsymptoticsReport, AsymptoticsRow};
