use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellation::Constellation;
use crate::ops::OpCounts;

pub const VAR_MIN: f64 = 1e-8;
pub const VAR_MAX: f64 = 1e8;

/// Initial message variance on every Gaussian edge.
pub const VAR_INIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMessage {
    pub mean: Complex64,
    pub var: f64,
}

impl GaussianMessage {
    pub fn new(mean: Complex64, var: f64) -> Self {
        GaussianMessage { mean, var: clamp_var(var) }
    }

    pub fn real(mean: f64, var: f64) -> Self {
        Self::new(Complex64::new(mean, 0.0), var)
    }

    pub fn initial() -> Self {
        GaussianMessage { mean: Complex64::new(0.0, 0.0), var: VAR_INIT }
    }
}

#[inline]
pub fn clamp_var(v: f64) -> f64 {
    if v.is_nan() {
        VAR_MAX
    } else {
        v.clamp(VAR_MIN, VAR_MAX)
    }
}

/// What to send when removing an incoming message leaves a non-positive precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum NegativeVariance {
    /// `(posterior mean, VAR_MAX)`.
    #[default]
    Uninformative,
    /// Resend the previous outgoing message.
    KeepPrevious,
}

/// Precision subtraction `post / incoming`. `scale` multiplies the incoming precision
/// (1 for a complex Gaussian, 2 for the real part of one). Returns `None` when the
/// extrinsic precision is not positive.
#[inline]
pub fn extrinsic_scaled(
    post_mean: Complex64,
    post_prec: f64,
    inc: &GaussianMessage,
    scale: f64,
    ops: &mut OpCounts,
) -> Option<GaussianMessage> {
    let inc_prec = scale / inc.var;
    let prec = post_prec - inc_prec;
    ops.rmul(2);
    ops.radd(1);
    if prec <= 1.0 / VAR_MAX {
        return None;
    }
    let var = 1.0 / prec;
    let mean = (post_mean * post_prec - inc.mean * inc_prec) * var;
    ops.crmul(3);
    ops.cadd(1);
    Some(GaussianMessage::new(mean, var))
}

/// `xi_out = (1/xi - 1/xi_in)^-1`, `mu_out = xi_out (mu/xi - mu_in/xi_in)`.
pub fn extrinsic(post: &GaussianMessage, inc: &GaussianMessage, policy: NegativeVariance, prev: &GaussianMessage) -> GaussianMessage {
    let mut ops = OpCounts::default();
    match extrinsic_scaled(post.mean, 1.0 / post.var, inc, 1.0, &mut ops) {
        Some(m) => m,
        None => match policy {
            NegativeVariance::Uninformative => GaussianMessage { mean: post.mean, var: VAR_MAX },
            NegativeVariance::KeepPrevious => *prev,
        },
    }
}

/// `delta * new + (1 - delta) * old` on mean and variance.
#[inline]
pub fn damp(new: GaussianMessage, old: &GaussianMessage, delta: f64, ops: &mut OpCounts) -> GaussianMessage {
    if delta >= 1.0 {
        return new;
    }
    ops.crmul(2);
    ops.rmul(2);
    ops.cadd(1);
    ops.radd(1);
    GaussianMessage {
        mean: new.mean * delta + old.mean * (1.0 - delta),
        var: clamp_var(new.var * delta + old.var * (1.0 - delta)),
    }
}

/// Normalized probabilities, mean and variance of the pmf `exp(llr)` over the points.
pub fn discrete_moments(llr: &[f64], c: &Constellation, probs: &mut [f64], ops: &mut OpCounts) -> GaussianMessage {
    let m = c.order();
    let mx = llr.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut z = 0.0;
    for a in 0..m {
        probs[a] = (llr[a] - mx).exp();
        z += probs[a];
    }
    let inv = 1.0 / z;
    let mut mean = Complex64::new(0.0, 0.0);
    let mut e2 = 0.0;
    for a in 0..m {
        probs[a] *= inv;
        let p = c.point(a);
        mean += p * probs[a];
        e2 += p.norm_sqr() * probs[a];
    }
    ops.exps(m as u64);
    ops.radd(3 * m as u64);
    ops.rmul(1 + m as u64);
    ops.crmul(m as u64);
    ops.cadd(m as u64);
    ops.rmul(m as u64);
    ops.abs2(1);
    GaussianMessage::new(mean, e2 - mean.norm_sqr())
}

/// `L(a) = -|a - mu|^2 / xi`.
pub fn gaussian_symbol_llrs(msg: &GaussianMessage, c: &Constellation, out: &mut [f64]) {
    for (a, o) in out.iter_mut().enumerate() {
        *o = -(c.point(a) - msg.mean).norm_sqr() / msg.var;
    }
}
