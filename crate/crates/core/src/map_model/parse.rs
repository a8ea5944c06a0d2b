//! Line-oriented map-definition documents.
//!
//! ```text
//! # full tent
//! domain 0 1
//! breakpoints 1/2
//! branch 0 affine slope=2 intercept=0
//! branch 1 affine slope=-2 intercept=2
//! ```
//!
//! Numeric literals are decimals or `p/q`; both are stored exactly.

use std::fmt::Write as _;

use super::{Branch, PiecewiseMap};
use crate::error::{Error, Result};
use crate::scalar::{fmt_rational, parse_rational, Rational};

pub fn parse_map(text: &str) -> Result<PiecewiseMap> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let err = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let num = |line: usize, tok: &str| parse_rational(tok).map_err(|e| err(line, &e.to_string()));

    let (ln, domain) = lines.next().ok_or_else(|| err(0, "empty document"))?;
    let toks: Vec<&str> = domain.split_whitespace().collect();
    if toks.len() != 3 || toks[0] != "domain" {
        return Err(err(ln, "expected `domain <lo> <hi>`"));
    }
    let lo = num(ln, toks[1])?;
    let hi = num(ln, toks[2])?;

    let (ln, bps) = lines.next().ok_or_else(|| err(ln + 1, "missing `breakpoints` line"))?;
    let mut toks = bps.split_whitespace();
    if toks.next() != Some("breakpoints") {
        return Err(err(ln, "expected `breakpoints <b_1> … <b_{L-1}>`"));
    }
    let interior: Vec<Rational> = toks.map(|t| num(ln, t)).collect::<Result<_>>()?;

    let mut branches = Vec::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 || toks[0] != "branch" {
            return Err(err(ln, "expected `branch <i> affine slope=<s> intercept=<t>`"));
        }
        let idx: usize = toks[1].parse().map_err(|_| err(ln, "branch index must be a non-negative integer"))?;
        if idx != branches.len() {
            return Err(err(ln, &format!("branch {idx} out of order, expected {}", branches.len())));
        }
        if toks[2] != "affine" {
            return Err(err(ln, &format!("unsupported branch kind `{}`", toks[2])));
        }
        let slope = toks[3].strip_prefix("slope=").ok_or_else(|| err(ln, "expected slope=<s>"))?;
        let intercept = toks[4].strip_prefix("intercept=").ok_or_else(|| err(ln, "expected intercept=<t>"))?;
        branches.push(Branch::affine(num(ln, slope)?, num(ln, intercept)?));
    }
    PiecewiseMap::new(lo, hi, interior, branches)
}

/// Serializes an affine map in the format read by [`parse_map`].
pub fn write_map(f: &PiecewiseMap) -> Result<String> {
    f.require_affine()?;
    let mut out = String::new();
    let _ = writeln!(out, "domain {} {}", fmt_rational(f.lo()), fmt_rational(f.hi()));
    let bps: Vec<String> = f.interior_breakpoints().iter().map(fmt_rational).collect();
    let _ = writeln!(out, "breakpoints {}", bps.join(" ").trim_end());
    for i in 0..f.branch_count() {
        let (s, t) = f.affine(i)?;
        let _ = writeln!(out, "branch {i} affine slope={} intercept={}", fmt_rational(s), fmt_rational(t));
    }
    Ok(out)
}
