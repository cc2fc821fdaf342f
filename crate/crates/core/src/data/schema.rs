//! Declarative schema files.
//!
//! One column per line, in table order:
//!
//! ```text
//! # comment
//! Si = element_fraction | wt.%
//! YS = property | MPa
//! Vf_FCC_A1 = microstructure
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::ColumnSpec;
use crate::error::{Error, Result};

pub fn parse_schema(text: &str) -> Result<Vec<ColumnSpec>> {
    let mut specs: Vec<ColumnSpec> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Schema {
            line: line_no,
            message,
        };
        let (name, rest) = line
            .split_once('=')
            .ok_or_else(|| err("expected `name = group`".into()))?;
        let name = name.trim();
        if name.is_empty() {
            return Err(err("empty column name".into()));
        }
        let (group, units) = match rest.split_once('|') {
            Some((g, u)) => (g, u.trim()),
            None => (rest, ""),
        };
        let group = group.parse().map_err(err)?;
        if specs.iter().any(|s| s.name == name) {
            return Err(Error::DuplicateColumn(name.to_string()));
        }
        specs.push(ColumnSpec::new(name, group, units));
    }
    Ok(specs)
}

pub fn load_schema(path: impl AsRef<Path>) -> Result<Vec<ColumnSpec>> {
    parse_schema(&std::fs::read_to_string(path)?)
}

pub fn write_schema(columns: &[ColumnSpec]) -> String {
    let mut out = String::new();
    for c in columns {
        if c.units.is_empty() {
            let _ = writeln!(out, "{} = {}", c.name, c.group);
        } else {
            let _ = writeln!(out, "{} = {} | {}", c.name, c.group, c.units);
        }
    }
    out
}
