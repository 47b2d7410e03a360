//! Linear solves, the Maxwell pipeline, limiting absorption and frequency sweeps.

mod absorption;
mod linear;
mod maxwell;
mod sweep;

pub use absorption::{
    limiting_absorption, loglog_slope, AbsorptionOptions, AbsorptionReport, AbsorptionStep,
};
pub use linear::{relative_residual, solve_linear, DEFAULT_LINEAR_TOL};
pub use maxwell::{
    compute_delta0, power_balance, solve_maxwell, Delta0Policy, EnergyReport, FieldSolution,
    Prepared, SolveConfig, BALANCE_TOL,
};
pub use sweep::{
    find_peaks, frequency_sweep, parabola_vertex, Peak, SweepOptions, SweepPoint, SweepReport,
    DEFAULT_SWEEP_DELTA,
};
