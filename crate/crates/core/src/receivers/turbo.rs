use super::{CodedLink, ReceiverConfig, ReceiverKind, ReceiverOutput};
use crate::error::{Error, Result};
use crate::jsg::{run_schedule, GraphMode, JsgGraph, MessageKind, ScheduleParams};
use crate::ldpc::ldpc_decode_warm;
use crate::link::Segment;
use crate::ops::OpCounts;

/// Outer loop of `n_out` rounds: detector (`n_vi` iterations, restarted each round with the
/// decoder's extrinsic as prior), deinterleave, LDPC (`n_ldpc` iterations resuming from the
/// previous round's check messages), extrinsic back.
pub fn turbo_idd(segments: &[Segment], n0: f64, link: &CodedLink, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let kind = match cfg.kind {
        ReceiverKind::TurboIddBp => MessageKind::Bp,
        ReceiverKind::TurboIddEp => MessageKind::Ep,
        k => return Err(Error::InvalidConfig(format!("{k} is not a Turbo-IDD receiver"))),
    };
    let mut g = JsgGraph::build(segments, &link.constellation, GraphMode::Symbol, n0, cfg.esnr_threshold_db)?;
    let params = ScheduleParams {
        kind,
        iters: cfg.n_vi,
        damping: cfg.damping,
        merged: cfg.merged,
        negative_variance: cfg.negative_variance,
        bit_precision_scale: cfg.bit_precision_scale,
        early_stop: false,
        record_hard: false,
    };
    let n = link.code.n();
    let mut det = OpCounts::default();
    let mut dec = OpCounts::default();
    let mut hard = vec![0u8; link.interleaver.len()];
    let mut parity_ok = false;
    let mut rounds = 0;
    let el = link.code.n_edges();
    let mut c2v = vec![0.0; link.interleaver.len() / n * el];
    for _ in 0..cfg.n_out {
        rounds += 1;
        let out = run_schedule(&g, &params)?;
        det += out.ops_detector;
        let a = link.interleaver.deinterleave(&out.extrinsic)?;
        let mut ext = vec![0.0; a.len()];
        parity_ok = true;
        for (w, cw) in a.chunks(n).enumerate() {
            let r = ldpc_decode_warm(&link.code, cw, cfg.n_ldpc, &mut c2v[w * el..(w + 1) * el], &mut dec, None)?;
            parity_ok &= r.success;
            for (k, (p, l)) in r.llrs.iter().zip(cw).enumerate() {
                ext[w * n + k] = p - l;
            }
            hard[w * n..(w + 1) * n].copy_from_slice(&r.bits);
        }
        dec.radd(a.len() as u64);
        if parity_ok && cfg.early_stop {
            break;
        }
        g.prior_bits = link.interleaver.interleave(&ext)?;
    }
    let (bits, ok) = link.finish(hard.clone());
    Ok(ReceiverOutput {
        bits,
        coded_bits: hard,
        iterations_used: rounds,
        op_counts: det + dec,
        ops_detector: det,
        ops_decoder: dec,
        parity_ok: parity_ok && ok,
    })
}
