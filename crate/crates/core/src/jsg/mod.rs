//! Joint sparse-graph detection: graph construction, eSNR pruning, node updates and the
//! flooding schedule.

pub mod graph;
pub mod llr;
pub mod message;
pub mod nodes;
pub mod pruning;
pub mod schedule;

pub use graph::{FnEdge, GraphDump, GraphMode, JsgGraph, LdpcAttachment};
pub use llr::{conversion_calls, llr_bit_to_symbol, llr_symbol_to_bit, reset_conversion_calls, ConversionCalls, Interleaver};
pub use message::{GaussianMessage, NegativeVariance, VAR_INIT, VAR_MAX, VAR_MIN};
pub use nodes::{
    bp_fn_update, ejsg_bvn_update, ejsg_fn_update, ep_avn_update, ep_fn_update, BvnBelief, MergedTerm, BP_DEGREE_CAP,
};
pub use pruning::{prune_esnr, EsnrPruning, MergedPolicy};
pub use schedule::{run_schedule, MessageKind, ScheduleOutput, ScheduleParams};
