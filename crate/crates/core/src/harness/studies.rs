//! BER sweeps and the convergence, pruning-threshold, path-count, sparsity and
//! complexity studies.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{ChannelSection, SimConfig};
use super::sim::{BerPoint, RunOptions, Simulator, Tally};
use crate::afdm::AfdmConfig;
use crate::channel::{build_effective, sample_channel, Band, PowerProfile};
use crate::error::{Error, Result};
use crate::jsg::{prune_esnr, GraphMode, JsgGraph};
use crate::ops::OpCountsF;
use crate::receivers::{count_ops_formula, latency_model, FormulaParams, ReceiverConfig, ReceiverKind};

/// BER curve of every configured receiver over the Eb/N0 grid.
pub fn run_ber_sweep(cfg: &SimConfig, opts: &RunOptions) -> Result<Vec<BerPoint>> {
    let sim = Simulator::new(cfg)?;
    let pool = opts.pool()?;
    pool.install(|| {
        let mut out = Vec::new();
        for (pi, &eb) in cfg.sweep.ebn0_db.iter().enumerate() {
            let n0 = sim.n0(eb);
            let tallies = sim.run_point(pi as u64, n0, &cfg.channel, &cfg.receivers)?;
            for (rc, t) in cfg.receivers.iter().zip(&tallies) {
                out.push(BerPoint::from_tally(rc.kind, eb, n0, t));
            }
        }
        Ok(out)
    })
}

fn receiver_for(cfg: &SimConfig, kind: ReceiverKind) -> ReceiverConfig {
    cfg.receivers.iter().find(|r| r.kind == kind).cloned().unwrap_or_else(|| {
        ReceiverConfig::new(kind).with_threshold(if kind.is_jsg() { Some(super::config::DEFAULT_ESNR_TH_DB) } else { None })
    })
}

/// Sets the iteration budget a convergence sweep varies: joint iterations for JSG kinds,
/// decoder iterations for MMSE-LDPC and outer rounds for Turbo-IDD.
pub fn with_iterations(mut rc: ReceiverConfig, iters: usize) -> ReceiverConfig {
    match rc.kind {
        ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => rc.n_out = iters,
        _ => rc.iters = iters,
    }
    rc
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub receiver: ReceiverKind,
    pub iterations: usize,
    pub ebn0_db: f64,
    pub ber: f64,
    pub fer: f64,
    pub frames: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub avg_iterations: f64,
}

/// BER against the iteration cap. Every cap sees the same frames.
pub fn run_convergence(cfg: &SimConfig, iterations: &[usize], opts: &RunOptions) -> Result<Vec<ConvergenceRow>> {
    let c = &cfg.convergence;
    let sim = Simulator::new(&SimConfig { mimo: c.mimo, ..cfg.clone() })?;
    let n0 = sim.n0(c.ebn0_db);
    let mut rcs = Vec::new();
    for &k in &c.receivers {
        for &it in iterations {
            rcs.push(with_iterations(receiver_for(cfg, k), it));
        }
    }
    let pool = opts.pool()?;
    let tallies = pool.install(|| fixed_frames(&sim, 0, c.frames, n0, &cfg.channel, &rcs))?;
    Ok(rcs
        .iter()
        .zip(&tallies)
        .map(|(rc, t)| ConvergenceRow {
            receiver: rc.kind,
            iterations: match rc.kind {
                ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => rc.n_out,
                _ => rc.iters,
            },
            ebn0_db: c.ebn0_db,
            ber: t.ber(),
            fer: t.fer(),
            frames: t.frames,
            bit_errors: t.bit_errors,
            bits: t.bits,
            avg_iterations: t.avg_iterations(),
        })
        .collect())
}

/// Smallest iteration cap whose BER is within `tol` (relative) of the BER at `reference`.
pub fn iterations_to_plateau(rows: &[ConvergenceRow], kind: ReceiverKind, reference: usize, tol: f64) -> Option<usize> {
    let mine: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.receiver == kind).collect();
    let target = mine.iter().find(|r| r.iterations == reference)?.ber;
    let mut sorted = mine.clone();
    sorted.sort_by_key(|r| r.iterations);
    sorted.iter().find(|r| r.ber <= target * (1.0 + tol)).map(|r| r.iterations)
}

fn fixed_frames(
    sim: &Simulator,
    point: u64,
    frames: usize,
    n0: f64,
    channel: &ChannelSection,
    rcs: &[ReceiverConfig],
) -> Result<Vec<Tally>> {
    let mut tallies = vec![Tally::default(); rcs.len()];
    let batch = sim.cfg.frames.batch.max(1) as u64;
    let mut next = 0u64;
    while (next as usize) < frames {
        let end = (next + batch).min(frames as u64);
        for fr in sim.run_frames(point, next..end, n0, channel, rcs)? {
            for (t, r) in tallies.iter_mut().zip(&fr) {
                t.add(r);
            }
        }
        next = end;
    }
    Ok(tallies)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EsnrRow {
    pub receiver: ReceiverKind,
    /// `-inf` for the unpruned graph.
    pub threshold_db: f64,
    pub ebn0_db: f64,
    pub ber: f64,
    pub fer: f64,
    pub frames: usize,
    pub bit_errors: usize,
    pub bits: usize,
    pub avg_d_f: f64,
    pub sparsity: f64,
    pub mul_per_frame: f64,
    pub add_per_frame: f64,
    pub exp_per_frame: f64,
    pub avg_iterations: f64,
}

/// BER, graph density and detector work against the pruning threshold, full graph first.
/// Early stopping is disabled so work depends only on the graph.
pub fn run_esnr_study(cfg: &SimConfig, thresholds: &[f64], opts: &RunOptions) -> Result<Vec<EsnrRow>> {
    let sim = Simulator::new(cfg)?;
    let e = &cfg.esnr;
    let n0 = sim.n0(e.ebn0_db);
    let channel = ChannelSection { paths: e.paths, nu_max: e.nu_max, ..cfg.channel };
    let mut grid = vec![f64::NEG_INFINITY];
    grid.extend_from_slice(thresholds);
    let base = receiver_for(cfg, e.receiver);
    let rcs: Vec<ReceiverConfig> = grid
        .iter()
        .map(|&th| ReceiverConfig {
            esnr_threshold_db: if th == f64::NEG_INFINITY { None } else { Some(th) },
            early_stop: false,
            ..base.clone()
        })
        .collect();
    let mode = if e.receiver == ReceiverKind::EJsg { GraphMode::Bit } else { GraphMode::Symbol };
    let pool = opts.pool()?;
    pool.install(|| {
        let tallies = fixed_frames(&sim, 0, e.frames, n0, &channel, &rcs)?;
        // graph statistics from a subset of the same frames
        let probe = e.frames.clamp(1, 50) as u64;
        let mut d_f = vec![0.0; grid.len()];
        let mut sp = vec![0.0; grid.len()];
        for i in 0..probe {
            let f = sim.draw_frame(0, i, n0, &channel)?;
            let segs = f.segments(e.receiver);
            for (k, &th) in grid.iter().enumerate() {
                let t = if th == f64::NEG_INFINITY { None } else { Some(th) };
                let g = JsgGraph::build(segs, &sim.link.constellation, mode, n0, t)?;
                d_f[k] += FormulaParams::from_graph(&g).d_f_ave / probe as f64;
                sp[k] += prune_esnr(&segs[0].h, n0, th).sparsity() / probe as f64;
            }
        }
        Ok(grid
            .iter()
            .enumerate()
            .map(|(k, &th)| {
                let t = &tallies[k];
                let ops = t.detector_ops_per_frame();
                EsnrRow {
                    receiver: e.receiver,
                    threshold_db: th,
                    ebn0_db: e.ebn0_db,
                    ber: t.ber(),
                    fer: t.fer(),
                    frames: t.frames,
                    bit_errors: t.bit_errors,
                    bits: t.bits,
                    avg_d_f: d_f[k],
                    sparsity: sp[k],
                    mul_per_frame: ops.mul,
                    add_per_frame: ops.add,
                    exp_per_frame: ops.exp,
                    avg_iterations: t.avg_iterations(),
                }
            })
            .collect())
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRow {
    pub waveform: String,
    pub receiver: ReceiverKind,
    pub paths: usize,
    pub ebn0_db: f64,
    pub ber: f64,
    pub fer: f64,
    pub frames: usize,
    pub bit_errors: usize,
    pub bits: usize,
}

/// BER against the number of paths for AFDM and OFDM (`c1 = c2 = 0`) at one Eb/N0.
/// Both waveforms see the same channels and noise.
pub fn run_path_study(cfg: &SimConfig, paths: &[usize], opts: &RunOptions) -> Result<Vec<PathRow>> {
    let afdm_sim = Simulator::new(cfg)?;
    let ps = &cfg.paths;
    let ofdm = AfdmConfig::ofdm(cfg.afdm.n, cfg.afdm.n_cpp)?;
    let sims = [("AFDM", afdm_sim.clone()), ("OFDM", afdm_sim.with_waveform(ofdm))];
    let rcs: Vec<ReceiverConfig> = ps.receivers.iter().map(|&k| receiver_for(cfg, k)).collect();
    let pool = opts.pool()?;
    let n0 = afdm_sim.n0(ps.ebn0_db);
    pool.install(|| {
        let mut out = Vec::new();
        for (pi, &p) in paths.iter().enumerate() {
            let channel = ChannelSection { paths: p, nu_max: ps.nu_max, ..cfg.channel };
            for (name, sim) in &sims {
                let tallies = fixed_frames(sim, pi as u64, ps.frames, n0, &channel, &rcs)?;
                for (rc, t) in rcs.iter().zip(&tallies) {
                    out.push(PathRow {
                        waveform: name.to_string(),
                        receiver: rc.kind,
                        paths: p,
                        ebn0_db: ps.ebn0_db,
                        ber: t.ber(),
                        fer: t.fer(),
                        frames: t.frames,
                        bit_errors: t.bit_errors,
                        bits: t.bits,
                    });
                }
            }
        }
        Ok(out)
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityRow {
    pub n: usize,
    pub paths: usize,
    pub nu_max: f64,
    pub c1: f64,
    pub threshold_db: f64,
    pub snr_db: f64,
    pub delay_max: usize,
    pub realizations: usize,
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

/// Fraction of cyclic shifts dropped by the eSNR rule on single-link channels with
/// uniform path powers, averaged over realizations.
#[allow(clippy::too_many_arguments)]
pub fn run_sparsity_report(
    n: usize,
    paths: usize,
    nu_max: f64,
    c1: f64,
    threshold_db: f64,
    snr_db: f64,
    delay_max: usize,
    realizations: usize,
    seed: u64,
) -> Result<SparsityRow> {
    if realizations == 0 {
        return Err(Error::InvalidConfig("need at least one realization".into()));
    }
    let cfg = AfdmConfig::new(n, c1, c1, delay_max)?;
    let n0 = 10f64.powf(-snr_db / 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut vals = Vec::with_capacity(realizations);
    for _ in 0..realizations {
        let ch = sample_channel(1, 1, paths, nu_max, delay_max, delay_max, PowerProfile::Uniform, &mut rng)?;
        let h = build_effective(&ch, &cfg, Band::Full)?;
        vals.push(prune_esnr(&h, n0, threshold_db).sparsity());
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / vals.len() as f64;
    Ok(SparsityRow {
        n,
        paths,
        nu_max,
        c1,
        threshold_db,
        snr_db,
        delay_max,
        realizations,
        mean,
        std: var.sqrt(),
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

pub fn run_sparsity_from_config(cfg: &SimConfig) -> Result<SparsityRow> {
    let s = &cfg.sparsity;
    run_sparsity_report(
        s.n,
        s.paths,
        s.nu_max,
        s.c1.unwrap_or(1.0 / s.n as f64),
        s.threshold_db,
        s.snr_db,
        s.delay_max,
        s.realizations,
        cfg.seed,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub receiver: ReceiverKind,
    pub n_v: usize,
    pub n_f: usize,
    pub d_f_ave: f64,
    pub d_v_ave: f64,
    pub formula: OpCountsF,
    /// Detector work per detector iteration (per frame for MMSE).
    pub measured: OpCountsF,
    pub mul_ratio: f64,
    pub latency: f64,
}

/// Closed-form against tallied per-iteration detector work on frames of the first sweep
/// point, plus the parametric latency of each receiver.
pub fn run_complexity(cfg: &SimConfig, frames: usize) -> Result<Vec<ComplexityRow>> {
    let sim = Simulator::new(cfg)?;
    let eb = cfg.sweep.ebn0_db.first().copied().unwrap_or(4.0);
    let n0 = sim.n0(eb);
    let frames = frames.max(1);
    let mut rows = Vec::new();
    for rc in &cfg.receivers {
        let rc = ReceiverConfig { early_stop: false, ..rc.clone() };
        let mut formula = OpCountsF::default();
        let mut measured = OpCountsF::default();
        let mut params_acc: Option<FormulaParams> = None;
        for i in 0..frames as u64 {
            let f = sim.draw_frame(0, i, n0, &cfg.channel)?;
            let segs = f.segments(rc.kind);
            let (mode, th) = match rc.kind {
                ReceiverKind::EJsg => (GraphMode::Bit, rc.esnr_threshold_db),
                _ => (GraphMode::Symbol, rc.esnr_threshold_db),
            };
            let g = JsgGraph::build(segs, &sim.link.constellation, mode, n0, th)?;
            let mut p = FormulaParams::from_graph(&g);
            if rc.kind == ReceiverKind::MmseLdpc {
                p.n = segs[0].h.cols();
            }
            formula = formula + count_ops_formula(rc.kind, &p).scale(1.0 / frames as f64);
            let (r, _) = sim.decode(&f, &rc)?;
            let per_iter = match rc.kind {
                ReceiverKind::MmseLdpc => 1.0,
                ReceiverKind::TurboIddBp | ReceiverKind::TurboIddEp => (r.iterations * rc.n_vi).max(1) as f64,
                _ => r.iterations.max(1) as f64,
            };
            measured = measured + r.ops_detector.scaled(1.0 / per_iter / frames as f64);
            params_acc = Some(p);
        }
        let p = params_acc.expect("at least one frame");
        rows.push(ComplexityRow {
            receiver: rc.kind,
            n_v: p.n_v,
            n_f: p.n_f,
            d_f_ave: p.d_f_ave,
            d_v_ave: p.d_v_ave,
            mul_ratio: measured.mul / formula.mul,
            formula,
            measured,
            latency: latency_model(rc.kind, &cfg.latency, &rc)?,
        });
    }
    Ok(rows)
}
