//! TSPLIB `EXPLICIT` / `FULL_MATRIX` writer and reader.

use std::fmt::Write as _;

use super::DistanceMatrix;
use crate::error::{Error, Result};

pub const TSPLIB_MAX_NODES: usize = 5000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TsplibInstance {
    pub name: String,
    /// `"TSP"` or `"ATSP"`.
    pub kind: String,
    pub dimension: usize,
    /// Factor the original rational distances were multiplied by, when the
    /// file carries a `COMMENT: scale <s>` line.
    pub scale: Option<i64>,
    pub entries: Vec<i64>,
}

/// Integer matrix scaled by the LCM of the denominators; `TYPE: TSP` when
/// symmetric, `ATSP` otherwise.
pub fn export_tsplib(m: &DistanceMatrix, name: &str) -> Result<String> {
    let n = m.n();
    guard(n)?;
    let (scale, data) = m.scaled();
    let kind = if m.is_symmetric() { "TSP" } else { "ATSP" };
    let mut out = String::new();
    let _ = writeln!(out, "NAME: {name}");
    let _ = writeln!(out, "TYPE: {kind}");
    let _ = writeln!(out, "COMMENT: scale {scale} (entries are exact distances times {scale})");
    let _ = writeln!(out, "DIMENSION: {n}");
    let _ = writeln!(out, "EDGE_WEIGHT_TYPE: EXPLICIT");
    let _ = writeln!(out, "EDGE_WEIGHT_FORMAT: FULL_MATRIX");
    let _ = writeln!(out, "EDGE_WEIGHT_SECTION");
    for row in data.chunks(n.max(1)) {
        let line: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    out.push_str("EOF\n");
    Ok(out)
}

fn guard(n: usize) -> Result<()> {
    if n > TSPLIB_MAX_NODES {
        return Err(Error::SizeGuard { what: "TSPLIB matrix", size: n, limit: TSPLIB_MAX_NODES });
    }
    Ok(())
}

pub fn parse_tsplib(text: &str) -> Result<TsplibInstance> {
    let mut name = String::new();
    let mut kind = String::new();
    let mut dimension = None;
    let mut scale = None;
    let mut entries = Vec::new();
    let mut in_section = false;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let parse_err = |msg: String| Error::Parse { line: i + 1, msg };
        if line.is_empty() {
            continue;
        }
        if line == "EOF" {
            break;
        }
        if in_section {
            for tok in line.split_whitespace() {
                entries.push(tok.parse::<i64>().map_err(|_| parse_err(format!("bad matrix entry {tok:?}")))?);
            }
            continue;
        }
        if line == "EDGE_WEIGHT_SECTION" {
            in_section = true;
            continue;
        }
        let (key, value) = line
            .split_once(':')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| parse_err(format!("expected `KEY: value`, got {line:?}")))?;
        match key {
            "NAME" => name = value.to_string(),
            "TYPE" => kind = value.to_string(),
            "DIMENSION" => dimension = Some(value.parse::<usize>().map_err(|_| parse_err(format!("bad dimension {value:?}")))?),
            "COMMENT" => {
                if let Some(rest) = value.strip_prefix("scale ") {
                    scale = rest.split_whitespace().next().and_then(|s| s.parse().ok());
                }
            }
            "EDGE_WEIGHT_TYPE" if value != "EXPLICIT" => {
                return Err(parse_err(format!("only EXPLICIT weights are supported, got {value}")));
            }
            "EDGE_WEIGHT_FORMAT" if value != "FULL_MATRIX" => {
                return Err(parse_err(format!("only FULL_MATRIX is supported, got {value}")));
            }
            _ => {}
        }
    }
    let dimension = dimension.ok_or_else(|| Error::input("TSPLIB file has no DIMENSION"))?;
    if entries.len() != dimension * dimension {
        return Err(Error::input(format!("expected {} matrix entries, found {}", dimension * dimension, entries.len())));
    }
    Ok(TsplibInstance { name, kind, dimension, scale, entries })
}
