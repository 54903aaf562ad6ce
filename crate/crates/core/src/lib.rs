//! Link-level simulation of MIMO-AFDM with joint sparse graph receivers.
//!
//! The crate is organised bottom-up:
//!
//! * [`afdm`] and [`constellation`]: DAFT kernels, chirp-periodic prefix, mapping.
//! * [`channel`]: doubly-selective channels and the DAFT-domain effective channel.
//! * [`ldpc`]: PEG code construction, encoding and sum-product decoding.
//! * [`jsg`]: joint sparse graphs, BP/EP/E-JSG message passing and eSNR pruning.
//! * [`receivers`]: MMSE-LDPC, Turbo-IDD and the JSG receivers, op counts, latency.
//! * [`harness`]: Monte Carlo sweeps, studies, CSV output and configuration.

// index loops mirror the matrix notation of the kernels
#![allow(clippy::needless_range_loop)]
// `!(a > b)` comparisons deliberately treat NaN as failing
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod afdm;
pub mod channel;
pub mod constellation;
pub mod error;
pub mod harness;
pub mod jsg;
pub mod ldpc;
pub mod link;
pub mod ops;
pub mod receivers;

pub use num_complex::Complex64;

pub use afdm::AfdmConfig;
pub use channel::{ChannelRealization, EffectiveChannel, PathSpec};
pub use constellation::Constellation;
pub use error::{Error, Result};
pub use ldpc::LdpcCode;
pub use receivers::{ReceiverConfig, ReceiverKind, ReceiverOutput};


