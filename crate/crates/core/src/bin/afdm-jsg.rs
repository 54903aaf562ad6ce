use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use afdm_jsg::harness::{self, CsvTable, RunOptions, SimConfig};

#[derive(Parser)]
#[command(name = "afdm-jsg", version, about = "MIMO-AFDM link simulator with joint sparse graph receivers")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Every study below, written to one directory.
    Run(Common),
    /// BER and FER against Eb/N0 for each configured receiver.
    Ber(Common),
    /// BER against the iteration cap.
    Convergence(Common),
    /// BER, density and work against the eSNR pruning threshold.
    Esnr(Common),
    /// Fraction of cyclic shifts removed by eSNR pruning.
    Sparsity(Common),
    /// AFDM against OFDM over the number of paths.
    Paths(Common),
    /// Closed-form against tallied operation counts, plus latency.
    Complexity(ComplexityArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// JSON or TOML configuration; defaults apply to missing fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "AFDM_JSG_WORKERS")]
    workers: Option<usize>,
    /// Use N = 128 and code length 512.
    #[arg(long)]
    paper_scale: bool,
}

#[derive(Args, Clone)]
struct ComplexityArgs {
    #[command(flatten)]
    common: Common,
    /// Frames averaged for the tallied counts.
    #[arg(long, default_value_t = 20)]
    frames: usize,
}

impl Common {
    fn load(&self) -> Result<SimConfig> {
        let mut cfg = match &self.config {
            Some(p) => SimConfig::from_file(p).with_context(|| format!("reading {}", p.display()))?,
            None => SimConfig::desk(),
        };
        if self.paper_scale {
            cfg.to_paper_scale();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn opts(&self) -> RunOptions {
        RunOptions { workers: self.workers }
    }
}

fn write<T: CsvTable>(dir: &Path, name: &str, rows: &[T]) -> Result<()> {
    let p = dir.join(name);
    harness::emit_csv(rows, &p).with_context(|| format!("writing {}", p.display()))?;
    eprintln!("wrote {}", p.display());
    Ok(())
}

fn prepare(dir: &Path, cfg: &SimConfig) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    fs::write(dir.join("config.json"), cfg.to_json())?;
    fs::write(dir.join("README.md"), harness::output_readme())?;
    Ok(())
}

fn ber(c: &SimConfig, o: &RunOptions, d: &Path) -> Result<()> {
    write(d, "ber.csv", &harness::run_ber_sweep(c, o)?)
}

fn convergence(c: &SimConfig, o: &RunOptions, d: &Path) -> Result<()> {
    write(d, "convergence.csv", &harness::run_convergence(c, &c.convergence.iterations, o)?)
}

fn esnr(c: &SimConfig, o: &RunOptions, d: &Path) -> Result<()> {
    write(d, "esnr.csv", &harness::run_esnr_study(c, &c.esnr.thresholds_db, o)?)
}

fn sparsity(c: &SimConfig, d: &Path) -> Result<()> {
    write(d, "sparsity.csv", &[harness::run_sparsity_from_config(c)?])
}

fn paths(c: &SimConfig, o: &RunOptions, d: &Path) -> Result<()> {
    write(d, "paths.csv", &harness::run_path_study(c, &c.paths.paths, o)?)
}

fn complexity(c: &SimConfig, frames: usize, d: &Path) -> Result<()> {
    write(d, "complexity.csv", &harness::run_complexity(c, frames)?)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let common = match &cli.cmd {
        Cmd::Run(c) | Cmd::Ber(c) | Cmd::Convergence(c) | Cmd::Esnr(c) | Cmd::Sparsity(c) | Cmd::Paths(c) => c,
        Cmd::Complexity(a) => &a.common,
    };
    let cfg = common.load()?;
    let opts = common.opts();
    let dir = common.out.as_path();
    prepare(dir, &cfg)?;
    match &cli.cmd {
        Cmd::Run(_) => {
            sparsity(&cfg, dir)?;
            complexity(&cfg, 20, dir)?;
            ber(&cfg, &opts, dir)?;
            convergence(&cfg, &opts, dir)?;
            esnr(&cfg, &opts, dir)?;
            paths(&cfg, &opts, dir)?;
        }
        Cmd::Ber(_) => ber(&cfg, &opts, dir)?,
        Cmd::Convergence(_) => convergence(&cfg, &opts, dir)?,
        Cmd::Esnr(_) => esnr(&cfg, &opts, dir)?,
        Cmd::Sparsity(_) => sparsity(&cfg, dir)?,
        Cmd::Paths(_) => paths(&cfg, &opts, dir)?,
        Cmd::Complexity(a) => complexity(&cfg, a.frames, dir)?,
    }
    Ok(())
}
