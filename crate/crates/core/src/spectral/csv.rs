//! Plain-text measure files.
//!
//! Atoms:
//! ```text
//! location,weight
//! -1.0000000000000000e0,5.0000000000000000e-1
//! ```
//! Grids carry a three-line header followed by one density value per line:
//! ```text
//! a,0.0000000000000000e0
//! b,2.0000000000000000e0
//! n,4096
//! ```
//! Numbers are written with 17 significant digits, which round-trips `f64`
//! exactly.

use std::fmt::Write as _;

use super::measure::{Atoms, GridDensity, SpectralMeasure};
use crate::error::{Error, Result};

pub(crate) fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_csv(m: &SpectralMeasure) -> String {
    let mut out = String::new();
    match m {
        SpectralMeasure::Atoms(at) => {
            out.push_str("location,weight\n");
            for (x, w) in at.locations().iter().zip(at.weights()) {
                let _ = writeln!(out, "{},{}", fmt17(*x), fmt17(*w));
            }
        }
        SpectralMeasure::Grid(g) => {
            let _ = writeln!(out, "a,{}", fmt17(g.a()));
            let _ = writeln!(out, "b,{}", fmt17(g.b()));
            let _ = writeln!(out, "n,{}", g.n());
            for v in g.values() {
                let _ = writeln!(out, "{}", fmt17(*v));
            }
        }
    }
    out
}

fn num(s: &str, line: usize) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("line {line}: {e} ({s:?})")))
}

pub fn from_csv(text: &str) -> Result<SpectralMeasure> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines.next().ok_or_else(|| Error::Parse("empty measure file".into()))?;
    let first = first.trim();
    if first.eq_ignore_ascii_case("location,weight") {
        let mut locs = Vec::new();
        let mut ws = Vec::new();
        for (i, line) in lines {
            let (x, w) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", i + 1)))?;
            locs.push(num(x, i + 1)?);
            ws.push(num(w, i + 1)?);
        }
        return Ok(SpectralMeasure::Atoms(Atoms::new(locs, ws)?));
    }
    let header = |line: &str, key: &str, i: usize| -> Result<String> {
        match line.split_once(',') {
            Some((k, v)) if k.trim() == key => Ok(v.trim().to_string()),
            _ => Err(Error::Parse(format!("line {}: expected `{key},<value>`", i + 1))),
        }
    };
    let a = num(&header(first, "a", 0)?, 1)?;
    let (i, l) = lines.next().ok_or_else(|| Error::Parse("missing `b` header".into()))?;
    let b = num(&header(l, "b", i)?, i + 1)?;
    let (i, l) = lines.next().ok_or_else(|| Error::Parse("missing `n` header".into()))?;
    let n: usize = header(l, "n", i)?
        .parse()
        .map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
    let values = lines.map(|(i, l)| num(l, i + 1)).collect::<Result<Vec<_>>>()?;
    if values.len() != n {
        return Err(Error::Parse(format!("grid header says {n} values, found {}", values.len())));
    }
    Ok(SpectralMeasure::Grid(GridDensity::new(a, b, values)?))
}
