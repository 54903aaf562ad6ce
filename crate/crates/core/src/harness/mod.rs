//! Monte Carlo harness: configuration, frame simulation, studies and CSV output.

pub mod config;
pub mod output;
pub mod sim;
pub mod studies;

pub use config::{Modulation, SimConfig};
pub use output::{emit_csv, fmt_float, output_readme, read_csv, CsvTable};
pub use sim::{binomial_sigma, separation_sigmas, BerPoint, Frame, FrameResult, RunOptions, Simulator, Tally};
pub use studies::{
    iterations_to_plateau, run_ber_sweep, run_complexity, run_convergence, run_esnr_study, run_path_study,
    run_sparsity_from_config, run_sparsity_report, with_iterations, ComplexityRow, ConvergenceRow, EsnrRow, PathRow,
    SparsityRow,
};
