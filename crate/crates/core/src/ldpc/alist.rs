//! alist text format (MacKay).

use super::LdpcCode;
use crate::error::{Error, Result};

pub fn to_alist(code: &LdpcCode) -> String {
    let mut s = String::new();
    let (n, m) = (code.n(), code.m());
    let max_v = code.vars().iter().map(|v| v.len()).max().unwrap_or(0);
    let max_c = code.checks().iter().map(|c| c.len()).max().unwrap_or(0);
    s.push_str(&format!("{n} {m}\n{max_v} {max_c}\n"));
    let join = |v: Vec<String>| v.join(" ");
    s.push_str(&join(code.vars().iter().map(|v| v.len().to_string()).collect()));
    s.push('\n');
    s.push_str(&join(code.checks().iter().map(|c| c.len().to_string()).collect()));
    s.push('\n');
    for v in code.vars() {
        let mut row: Vec<String> = v.iter().map(|c| (c + 1).to_string()).collect();
        row.resize(max_v, "0".into());
        s.push_str(&join(row));
        s.push('\n');
    }
    for c in code.checks() {
        let mut row: Vec<String> = c.iter().map(|v| (v + 1).to_string()).collect();
        row.resize(max_c, "0".into());
        s.push_str(&join(row));
        s.push('\n');
    }
    s
}

pub fn from_alist(text: &str) -> Result<LdpcCode> {
    let mut tok = text.split_whitespace().map(|t| t.parse::<usize>().map_err(|e| Error::Parse(e.to_string())));
    let mut next = || tok.next().unwrap_or_else(|| Err(Error::Parse("truncated alist".into())));
    let (n, m) = (next()?, next()?);
    let (max_v, max_c) = (next()?, next()?);
    let vdeg: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let cdeg: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    for _ in 0..n * max_v {
        next()?;
    }
    let mut checks = Vec::with_capacity(m);
    for &d in &cdeg {
        let mut row = Vec::with_capacity(d);
        for k in 0..max_c {
            let v = next()?;
            if k < d {
                if v == 0 || v > n {
                    return Err(Error::Parse(format!("variable index {v} out of range")));
                }
                row.push(v - 1);
            }
        }
        checks.push(row);
    }
    let total_v: usize = vdeg.iter().sum();
    if total_v != checks.iter().map(|c| c.len()).sum::<usize>() {
        return Err(Error::Parse("variable and check degree totals differ".into()));
    }
    LdpcCode::from_checks(n, checks)
}
