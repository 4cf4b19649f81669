//! Mild-solution time stepping with finite-delay forcing: history segments, delayed
//! forces, product-integration steps with per-panel Picard iteration, and the
//! contraction and blow-up monitors.

mod config;
mod force;
mod history;
mod monitor;
mod solver;

pub use config::{Mesh, SolverConfig};
pub use force::{evaluate_force, evaluate_force_with_head, DelayedForce, ForceKind, Modulation, Profile};
pub use history::HistorySegment;
pub use monitor::{blowup_monitor, contraction_monitor, ContractionMonitor, MonitorConstants, Verdict};
pub use solver::{PicardOutcome, RunState, RunSummary, Solver, StepRecord};
