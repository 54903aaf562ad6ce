use serde::{Deserialize, Serialize};

use super::ReceiverKind;
use crate::jsg::{GraphMode, JsgGraph};
use crate::ops::OpCountsF;

/// Sizes entering the closed-form per-iteration counts. `n_v` counts symbol variables and
/// `d_f` holds per-likelihood-node symbol degrees; `n` is the MMSE system dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaParams {
    pub n_v: usize,
    pub n_f: usize,
    pub d_f: Vec<usize>,
    pub d_f_ave: f64,
    pub d_v_ave: f64,
    pub m: usize,
    pub n: usize,
}

impl FormulaParams {
    /// Reads the degrees of a built graph. Bit graphs are reported per symbol.
    pub fn from_graph(g: &JsgGraph) -> Self {
        let q = match g.mode {
            GraphMode::Symbol => 1,
            GraphMode::Bit => g.constellation.bits_per_symbol(),
        };
        let d_f: Vec<usize> = (0..g.n_fns()).map(|f| g.fn_degree(f) / q).collect();
        let n_v = g.n_vars() / q;
        FormulaParams {
            n_v,
            n_f: g.n_fns(),
            d_f_ave: g.n_edges() as f64 / q as f64 / g.n_fns() as f64,
            d_v_ave: g.average_var_degree(),
            d_f,
            m: g.constellation.order(),
            n: n_v,
        }
    }
}

/// Closed-form per-iteration operation counts. Turbo kinds report their detector row.
pub fn count_ops_formula(kind: ReceiverKind, p: &FormulaParams) -> OpCountsF {
    let (nv, nf, m) = (p.n_v as f64, p.n_f as f64, p.m as f64);
    let lm = m.log2();
    let (dv, df) = (p.d_v_ave, p.d_f_ave);
    match kind {
        ReceiverKind::MmseLdpc => {
            let n = p.n as f64;
            OpCountsF {
                mul: 6.0 * n.powi(3) + 2.0 * n * n + 2.0 * n,
                add: 0.0,
                exp: 2.0 * nv * (lm + m),
                log: 2.0 * nv * lm,
            }
        }
        ReceiverKind::BpJsg | ReceiverKind::TurboIddBp => {
            let pow: Vec<f64> = p.d_f.iter().map(|&d| m.powi(d as i32)).collect();
            OpCountsF {
                mul: 4.0 * p.d_f.iter().zip(&pow).map(|(&d, w)| d as f64 * w).sum::<f64>(),
                add: 2.0 * (pow.iter().sum::<f64>() + nv * (m * dv + 3.0 * lm - 1.0)),
                exp: 2.0 * nv * (lm + m),
                log: 2.0 * nv * lm,
            }
        }
        ReceiverKind::EpJsg | ReceiverKind::TurboIddEp => OpCountsF {
            mul: 4.0 * (nv * (3.0 * m + 8.0) + nf * (3.0 * df + 3.0 + 2.0 * m)),
            add: 2.0 * (nv * (m * dv + 2.0 * m + 3.0) + nf * (2.0 * df + 2.0 + m)),
            exp: 2.0 * nv * (lm + 3.0 * m),
            log: 2.0 * nv * lm,
        },
        ReceiverKind::EJsg => OpCountsF {
            mul: nv * lm * (dv + 7.0),
            add: 8.0 * nv * lm + 6.0 * nf * lm * df,
            exp: nv * lm,
            log: 0.0,
        },
    }
}
