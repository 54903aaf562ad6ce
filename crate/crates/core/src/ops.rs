//! Arithmetic tallies for complexity accounting.
//!
//! Conventions: complex x complex is 4 real multiplications and 2 additions, complex x real is
//! 2 multiplications, `|z|^2` is 2 multiplications and 1 addition, a real division counts as a
//! multiplication. `tanh` counts as one exponential.

use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub mul: u64,
    pub add: u64,
    pub exp: u64,
    pub log: u64,
}

impl OpCounts {
    #[inline]
    pub fn cmul(&mut self, k: u64) {
        self.mul += 4 * k;
        self.add += 2 * k;
    }
    #[inline]
    pub fn crmul(&mut self, k: u64) {
        self.mul += 2 * k;
    }
    #[inline]
    pub fn cadd(&mut self, k: u64) {
        self.add += 2 * k;
    }
    #[inline]
    pub fn abs2(&mut self, k: u64) {
        self.mul += 2 * k;
        self.add += k;
    }
    #[inline]
    pub fn rmul(&mut self, k: u64) {
        self.mul += k;
    }
    #[inline]
    pub fn radd(&mut self, k: u64) {
        self.add += k;
    }
    #[inline]
    pub fn exps(&mut self, k: u64) {
        self.exp += k;
    }
    #[inline]
    pub fn logs(&mut self, k: u64) {
        self.log += k;
    }

    pub fn scaled(&self, f: f64) -> OpCountsF {
        OpCountsF {
            mul: self.mul as f64 * f,
            add: self.add as f64 * f,
            exp: self.exp as f64 * f,
            log: self.log as f64 * f,
        }
    }
}

impl Add for OpCounts {
    type Output = OpCounts;
    fn add(self, o: OpCounts) -> OpCounts {
        OpCounts { mul: self.mul + o.mul, add: self.add + o.add, exp: self.exp + o.exp, log: self.log + o.log }
    }
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        *self = *self + o;
    }
}

/// Averaged or predicted counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct OpCountsF {
    pub mul: f64,
    pub add: f64,
    pub exp: f64,
    pub log: f64,
}

impl OpCountsF {
    pub fn scale(&self, f: f64) -> OpCountsF {
        OpCountsF { mul: self.mul * f, add: self.add * f, exp: self.exp * f, log: self.log * f }
    }
}

impl Add for OpCountsF {
    type Output = OpCountsF;
    fn add(self, o: OpCountsF) -> OpCountsF {
        OpCountsF { mul: self.mul + o.mul, add: self.add + o.add, exp: self.exp + o.exp, log: self.log + o.log }
    }
}
