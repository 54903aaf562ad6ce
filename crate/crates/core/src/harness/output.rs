//! CSV emission. Floats use nine significant digits.

use std::path::Path;

use super::sim::BerPoint;
use super::studies::{ComplexityRow, ConvergenceRow, EsnrRow, PathRow, SparsityRow};
use crate::error::{Error, Result};

/// Nine significant digits, plain notation where it stays short.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..9).contains(&e) {
        let s = format!("{:.*}", (8 - e).max(0) as usize, x);
        // rounding can carry into a new digit; re-check via scientific form
        let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
        if s.trim_start_matches('-').replace('.', "").trim_start_matches('0').len() > 9 {
            return format!("{:.8e}", x);
        }
        s
    } else {
        format!("{:.8e}", x)
    }
}

/// A table that can be written as CSV.
pub trait CsvTable {
    fn header() -> Vec<&'static str>;
    fn record(&self) -> Vec<String>;
    /// One-line meaning of each column, in header order.
    fn docs() -> Vec<&'static str>;
}

fn f(x: f64) -> String {
    fmt_float(x)
}

fn u(x: usize) -> String {
    x.to_string()
}

impl CsvTable for BerPoint {
    fn header() -> Vec<&'static str> {
        vec![
            "receiver", "ebn0_db", "n0", "ber", "fer", "frames", "frame_errors", "bit_errors", "bits",
            "avg_iterations", "mul", "add", "exp", "log", "detector_mul",
        ]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.receiver.to_string(),
            f(self.ebn0_db),
            f(self.n0),
            f(self.ber),
            f(self.fer),
            u(self.frames),
            u(self.frame_errors),
            u(self.bit_errors),
            u(self.bits),
            f(self.avg_iterations),
            f(self.op_counts.mul),
            f(self.op_counts.add),
            f(self.op_counts.exp),
            f(self.op_counts.log),
            f(self.detector_op_counts.mul),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "receiver kind",
            "Eb/N0 in dB",
            "noise variance per complex sample",
            "payload bit error rate",
            "frame error rate",
            "frames simulated",
            "frames with at least one payload error",
            "payload bit errors",
            "payload bits simulated",
            "mean iterations used per frame",
            "mean real multiplications per frame (detector and decoder)",
            "mean real additions per frame",
            "mean exponentials per frame",
            "mean logarithms per frame",
            "mean detector-only multiplications per frame",
        ]
    }
}

impl CsvTable for ConvergenceRow {
    fn header() -> Vec<&'static str> {
        vec!["receiver", "iterations", "ebn0_db", "ber", "fer", "frames", "bit_errors", "bits", "avg_iterations"]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.receiver.to_string(),
            u(self.iterations),
            f(self.ebn0_db),
            f(self.ber),
            f(self.fer),
            u(self.frames),
            u(self.bit_errors),
            u(self.bits),
            f(self.avg_iterations),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "receiver kind",
            "iteration cap (decoder iterations for MMSE_LDPC, outer rounds for Turbo-IDD)",
            "Eb/N0 in dB",
            "payload bit error rate",
            "frame error rate",
            "frames simulated (identical frames for every cap)",
            "payload bit errors",
            "payload bits simulated",
            "mean iterations actually run",
        ]
    }
}

impl CsvTable for EsnrRow {
    fn header() -> Vec<&'static str> {
        vec![
            "receiver", "threshold_db", "ebn0_db", "ber", "fer", "frames", "bit_errors", "bits", "avg_d_f",
            "sparsity", "mul_per_frame", "add_per_frame", "exp_per_frame", "avg_iterations",
        ]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.receiver.to_string(),
            f(self.threshold_db),
            f(self.ebn0_db),
            f(self.ber),
            f(self.fer),
            u(self.frames),
            u(self.bit_errors),
            u(self.bits),
            f(self.avg_d_f),
            f(self.sparsity),
            f(self.mul_per_frame),
            f(self.add_per_frame),
            f(self.exp_per_frame),
            f(self.avg_iterations),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "receiver kind",
            "eSNR pruning threshold in dB (-inf = full graph)",
            "Eb/N0 in dB",
            "payload bit error rate",
            "frame error rate",
            "frames simulated (identical frames for every threshold)",
            "payload bit errors",
            "payload bits simulated",
            "mean live symbol edges per likelihood node",
            "mean fraction of dropped cyclic shifts",
            "mean detector multiplications per frame",
            "mean detector additions per frame",
            "mean detector exponentials per frame",
            "mean iterations run",
        ]
    }
}

impl CsvTable for PathRow {
    fn header() -> Vec<&'static str> {
        vec!["waveform", "receiver", "paths", "ebn0_db", "ber", "fer", "frames", "bit_errors", "bits"]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.waveform.clone(),
            self.receiver.to_string(),
            u(self.paths),
            f(self.ebn0_db),
            f(self.ber),
            f(self.fer),
            u(self.frames),
            u(self.bit_errors),
            u(self.bits),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "AFDM, or OFDM (c1 = c2 = 0)",
            "receiver kind",
            "number of channel paths",
            "Eb/N0 in dB",
            "payload bit error rate",
            "frame error rate",
            "frames simulated",
            "payload bit errors",
            "payload bits simulated",
        ]
    }
}

impl CsvTable for SparsityRow {
    fn header() -> Vec<&'static str> {
        vec![
            "n", "paths", "nu_max", "c1", "threshold_db", "snr_db", "delay_max", "realizations", "mean", "std", "min",
            "max",
        ]
    }
    fn record(&self) -> Vec<String> {
        vec![
            u(self.n),
            u(self.paths),
            f(self.nu_max),
            f(self.c1),
            f(self.threshold_db),
            f(self.snr_db),
            u(self.delay_max),
            u(self.realizations),
            f(self.mean),
            f(self.std),
            f(self.min),
            f(self.max),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "frame size N",
            "number of paths",
            "maximum normalized Doppler",
            "chirp rate c1",
            "eSNR threshold in dB",
            "Es/N0 in dB used for the eSNR rule",
            "largest path delay",
            "channel realizations averaged",
            "mean fraction of dropped cyclic shifts",
            "standard deviation over realizations",
            "smallest realization value",
            "largest realization value",
        ]
    }
}

impl CsvTable for ComplexityRow {
    fn header() -> Vec<&'static str> {
        vec![
            "receiver", "n_v", "n_f", "d_f_ave", "d_v_ave", "formula_mul", "formula_add", "formula_exp", "formula_log",
            "measured_mul", "measured_add", "measured_exp", "measured_log", "mul_ratio", "latency",
        ]
    }
    fn record(&self) -> Vec<String> {
        vec![
            self.receiver.to_string(),
            u(self.n_v),
            u(self.n_f),
            f(self.d_f_ave),
            f(self.d_v_ave),
            f(self.formula.mul),
            f(self.formula.add),
            f(self.formula.exp),
            f(self.formula.log),
            f(self.measured.mul),
            f(self.measured.add),
            f(self.measured.exp),
            f(self.measured.log),
            f(self.mul_ratio),
            f(self.latency),
        ]
    }
    fn docs() -> Vec<&'static str> {
        vec![
            "receiver kind",
            "symbol variable nodes",
            "likelihood nodes",
            "mean live symbol edges per likelihood node",
            "mean edges per variable node",
            "closed-form multiplications per detector iteration",
            "closed-form additions per detector iteration",
            "closed-form exponentials per detector iteration",
            "closed-form logarithms per detector iteration",
            "tallied detector multiplications per detector iteration (per frame for MMSE)",
            "tallied detector additions per detector iteration",
            "tallied detector exponentials per detector iteration",
            "tallied detector logarithms per detector iteration",
            "measured_mul / formula_mul",
            "parametric detection and decoding latency",
        ]
    }
}

/// Writes a header and one row per item. An empty slice yields a header-only file.
pub fn emit_csv<T: CsvTable>(rows: &[T], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    w.write_record(T::header()).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r.record()).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

/// Header and rows of a CSV file as strings.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::Io(e.to_string()))?;
    let header = r.headers().map_err(|e| Error::Io(e.to_string()))?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        rows.push(rec.map_err(|e| Error::Parse(e.to_string()))?.iter().map(str::to_string).collect());
    }
    Ok((header, rows))
}

/// Markdown description of the columns of `file`.
pub fn column_docs<T: CsvTable>(file: &str) -> String {
    let mut s = format!("## {file}\n\n| column | meaning |\n|---|---|\n");
    for (h, d) in T::header().iter().zip(T::docs()) {
        s.push_str(&format!("| `{h}` | {d} |\n"));
    }
    s.push('\n');
    s
}

/// Column reference for every output file.
pub fn output_readme() -> String {
    let mut s = String::from(
        "# Output files\n\nAll floating-point values carry nine significant digits. Each run is fully \
         determined by its configuration and seed (`config.json` in this directory).\n\n",
    );
    s.push_str(&column_docs::<BerPoint>("ber.csv"));
    s.push_str(&column_docs::<ConvergenceRow>("convergence.csv"));
    s.push_str(&column_docs::<EsnrRow>("esnr.csv"));
    s.push_str(&column_docs::<PathRow>("paths.csv"));
    s.push_str(&column_docs::<SparsityRow>("sparsity.csv"));
    s.push_str(&column_docs::<ComplexityRow>("complexity.csv"));
    s
}
