//! Experiment drivers: Knudsen-number convergence sweeps, scaling studies
//! for the profile lemmas, and report output.

mod report;
mod scaling;
mod sweep;

pub use report::{emit_report, read_report, MacroSnapshot, ReportFormat};
pub use scaling::{run_scaling_study, ScalingConfig, ScalingReport, ScalingRow, ScalingStudy};
pub use sweep::{
    in_sigma, run_convergence_sweep, run_convergence_sweep_detailed, Refinement, SweepConfig, SweepFit,
    SweepResult, SweepRow, SweepRun,
};

/// `ε^{1/5}|ln ε|`, the rate envelope of the convergence theorem.
pub fn envelope(eps: f64) -> f64 {
    eps.powf(0.2) * eps.ln().abs()
}
