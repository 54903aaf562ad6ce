use super::{CodedLink, ReceiverConfig, ReceiverKind, ReceiverOutput};
use crate::error::{Error, Result};
use crate::jsg::{run_schedule, GraphMode, JsgGraph, MessageKind, ScheduleOutput, ScheduleParams};
use crate::link::Segment;

fn params(kind: MessageKind, cfg: &ReceiverConfig) -> ScheduleParams {
    ScheduleParams {
        kind,
        iters: cfg.iters,
        damping: cfg.damping,
        merged: cfg.merged,
        negative_variance: cfg.negative_variance,
        bit_precision_scale: cfg.bit_precision_scale,
        early_stop: cfg.early_stop,
        record_hard: false,
    }
}

fn output(link: &CodedLink, out: ScheduleOutput) -> ReceiverOutput {
    let coded = out.hard_bits();
    let (bits, _) = link.finish(coded.clone());
    ReceiverOutput {
        bits,
        coded_bits: coded,
        iterations_used: out.iterations,
        op_counts: out.ops_detector + out.ops_decoder,
        ops_detector: out.ops_detector,
        ops_decoder: out.ops_decoder,
        parity_ok: out.parity_ok,
    }
}

/// Joint detection and decoding on one graph. E-JSG is delegated to [`ejsg_receive`].
pub fn jsg_receive(segments: &[Segment], n0: f64, link: &CodedLink, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let kind = match cfg.kind {
        ReceiverKind::BpJsg => MessageKind::Bp,
        ReceiverKind::EpJsg => MessageKind::Ep,
        ReceiverKind::EJsg => return ejsg_receive(segments, n0, link, cfg),
        k => return Err(Error::InvalidConfig(format!("{k} is not a JSG receiver"))),
    };
    let g = JsgGraph::build(segments, &link.constellation, GraphMode::Symbol, n0, cfg.esnr_threshold_db)?
        .with_ldpc(link.code.clone(), Some(link.interleaver.clone()))?;
    Ok(output(link, run_schedule(&g, &params(kind, cfg))?))
}

/// Bit-level joint receiver: coded bits map straight onto the ±1 bit variables.
pub fn ejsg_receive(segments: &[Segment], n0: f64, link: &CodedLink, cfg: &ReceiverConfig) -> Result<ReceiverOutput> {
    let g = JsgGraph::build(segments, &link.constellation, GraphMode::Bit, n0, cfg.esnr_threshold_db)?
        .with_ldpc(link.code.clone(), None)?;
    Ok(output(link, run_schedule(&g, &params(MessageKind::EJsg, cfg))?))
}
