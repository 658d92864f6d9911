//! Plain-text number and matrix formats.
//!
//! Reals are written like C's `%.17g`: seventeen significant digits, which
//! round-trips every `f64` and does not depend on the locale.

use std::fmt::Write as _;

use super::matrix::ComplexMatrix;
use super::C64;
use crate::error::{Error, Result};

/// Formats `x` as `printf("%.17g", x)` would.
pub fn fmt_g17(x: f64) -> String {
    const PRECISION: i32 = 17;
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", (PRECISION - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..PRECISION).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (PRECISION - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Square matrix as text: a `dim` line, then one line per row of
/// space-separated `re,im` pairs.
pub fn matrix_to_text(m: &ComplexMatrix) -> Result<String> {
    if !m.is_square() {
        return Err(Error::Validation(format!(
            "text format holds square matrices, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let mut out = format!("{}\n", m.rows());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            if j > 0 {
                out.push(' ');
            }
            let z = m[(i, j)];
            write!(out, "{},{}", fmt_g17(z.re), fmt_g17(z.im)).expect("write to String");
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn matrix_from_text(text: &str) -> Result<ComplexMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Validation("empty matrix text".into()))?;
    let dim: usize = header
        .trim()
        .parse()
        .map_err(|_| Error::Validation(format!("bad dimension header {header:?}")))?;
    let mut data = Vec::with_capacity(dim * dim);
    for (row, line) in lines.enumerate() {
        let before = data.len();
        for pair in line.split_whitespace() {
            let (re, im) = pair
                .split_once(',')
                .ok_or_else(|| Error::Validation(format!("row {row}: entry {pair:?} is not re,im")))?;
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Validation(format!("row {row}: bad number {s:?}")))
            };
            data.push(C64::new(parse(re)?, parse(im)?));
        }
        if data.len() - before != dim {
            return Err(Error::Validation(format!(
                "row {row} has {} entries, expected {dim}",
                data.len() - before
            )));
        }
    }
    ComplexMatrix::from_row_major(dim, dim, data)
}
