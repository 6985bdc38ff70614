//! Sparse, human-diffable matrix text format.
//!
//! Header: `<kind> <rows> <cols> [fill=inf|-inf]` with kind `bool` or
//! `extint`, then one entry per line, `<i> <j> [<value>]`, 1-based. Boolean
//! entries omit the value; extended-integer values are decimal, `inf` or
//! `-inf`. Unstated cells take the kind's absent value: 0 for bool, the
//! header fill (default `inf`) for extint. Blank lines and `#` comments are
//! skipped.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use qsemiring_core::{BoolMatrix, ExtInt, ExtMatrix};

#[derive(Debug)]
pub enum AnyMatrix {
    Bool(BoolMatrix),
    Ext(ExtMatrix),
}

pub fn parse_matrix(path: &Path) -> Result<AnyMatrix> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    parse_matrix_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn parse_ext(path: &Path) -> Result<ExtMatrix> {
    match parse_matrix(path)? {
        AnyMatrix::Ext(m) => Ok(m),
        AnyMatrix::Bool(_) => bail!("{}: expected an extint matrix", path.display()),
    }
}

pub fn parse_bool(path: &Path) -> Result<BoolMatrix> {
    match parse_matrix(path)? {
        AnyMatrix::Bool(m) => Ok(m),
        AnyMatrix::Ext(_) => bail!("{}: expected a bool matrix", path.display()),
    }
}

fn parse_value(tok: &str) -> Result<ExtInt> {
    match tok {
        "inf" => Ok(ExtInt::PosInf),
        "-inf" => Ok(ExtInt::NegInf),
        _ => tok
            .parse::<i64>()
            .map(ExtInt::Finite)
            .map_err(|_| anyhow!("invalid value {tok:?}")),
    }
}

pub fn parse_matrix_str(text: &str) -> Result<AnyMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(no, l)| (no + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (header_no, header) = lines.next().ok_or_else(|| anyhow!("empty file"))?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    if toks.len() < 3 {
        bail!("line {header_no}: header needs `<kind> <rows> <cols>`");
    }
    let rows: usize = toks[1]
        .parse()
        .map_err(|_| anyhow!("line {header_no}: bad row count {:?}", toks[1]))?;
    let cols: usize = toks[2]
        .parse()
        .map_err(|_| anyhow!("line {header_no}: bad column count {:?}", toks[2]))?;
    let fill = match toks.get(3) {
        None => ExtInt::PosInf,
        Some(&"fill=inf") => ExtInt::PosInf,
        Some(&"fill=-inf") => ExtInt::NegInf,
        Some(other) => bail!("line {header_no}: unknown header option {other:?}"),
    };
    let is_bool = match toks[0] {
        "bool" => true,
        "extint" => false,
        other => bail!("line {header_no}: unknown matrix kind {other:?}"),
    };

    let mut seen: HashSet<(usize, usize)> = HashSet::new();
    let mut bmat = BoolMatrix::zeros(rows, cols);
    let mut emat = ExtMatrix::filled(rows, cols, fill);
    for (no, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let want = if is_bool { 2 } else { 3 };
        if toks.len() != want {
            bail!("line {no}: expected {want} fields, found {}", toks.len());
        }
        let i: usize = toks[0]
            .parse()
            .map_err(|_| anyhow!("line {no}: bad row index {:?}", toks[0]))?;
        let j: usize = toks[1]
            .parse()
            .map_err(|_| anyhow!("line {no}: bad column index {:?}", toks[1]))?;
        if i < 1 || i > rows || j < 1 || j > cols {
            bail!("line {no}: index ({i}, {j}) outside {rows} x {cols}");
        }
        if !seen.insert((i, j)) {
            bail!("line {no}: duplicate coordinate ({i}, {j})");
        }
        if is_bool {
            bmat.set(i - 1, j - 1, true);
        } else {
            let v = parse_value(toks[2]).with_context(|| format!("line {no}"))?;
            emat.set(i - 1, j - 1, v);
        }
    }
    Ok(if is_bool { AnyMatrix::Bool(bmat) } else { AnyMatrix::Ext(emat) })
}

pub fn write_bool(m: &BoolMatrix) -> String {
    let mut out = format!("bool {} {}\n", m.rows(), m.cols());
    for i in 0..m.rows() {
        for j in m.row_indices(i) {
            let _ = writeln!(out, "{} {}", i + 1, j + 1);
        }
    }
    out
}

pub fn write_ext(m: &ExtMatrix, fill: ExtInt) -> String {
    let fill_opt = match fill {
        ExtInt::PosInf => "fill=inf",
        ExtInt::NegInf => "fill=-inf",
        ExtInt::Finite(_) => unreachable!("fill is always an infinity"),
    };
    let mut out = format!("extint {} {} {}\n", m.rows(), m.cols(), fill_opt);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            let v = m.get(i, j);
            if v != fill {
                let _ = writeln!(out, "{} {} {}", i + 1, j + 1, v);
            }
        }
    }
    out
}

/// Fill that keeps the written file smallest.
pub fn dominant_fill(m: &ExtMatrix) -> ExtInt {
    let pos = m.entries().iter().filter(|&&e| e == ExtInt::PosInf).count();
    let neg = m.entries().iter().filter(|&&e| e == ExtInt::NegInf).count();
    if neg > pos {
        ExtInt::NegInf
    } else {
        ExtInt::PosInf
    }
}
