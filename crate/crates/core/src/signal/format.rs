//! Columnar text format for sampled fields.
//!
//! A block of `# `-prefixed lines holds a TOML header (axes, realness, convention
//! tag); every following line is one sample: `[t] x re im`. Floats are written in
//! shortest round-trip form, so a write/read cycle is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::axis::Axis;
use super::field::{Convention, Realness, SampledField};
use crate::error::{Error, Result};

pub const FIELD_FORMAT: &str = "wavesig-field/1";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format: String,
    realness: Realness,
    convention: String,
    columns: Vec<String>,
    space: Axis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    time: Option<Axis>,
}

pub fn field_to_string(field: &SampledField) -> String {
    let columns = if field.time().is_some() {
        vec!["t", "x", "re", "im"]
    } else {
        vec!["x", "re", "im"]
    };
    let header = Header {
        format: FIELD_FORMAT.into(),
        realness: field.realness(),
        convention: Convention::tag(),
        columns: columns.into_iter().map(String::from).collect(),
        space: *field.space(),
        time: field.time().copied(),
    };
    let toml = toml::to_string(&header).expect("header serializes");
    let mut out = String::with_capacity(64 * field.values().len() + toml.len());
    for line in toml.lines() {
        out.push_str("# ");
        out.push_str(line);
        out.push('\n');
    }
    let space = field.space();
    for i in 0..field.n_time() {
        let row = field.row(i);
        for (j, v) in row.iter().enumerate() {
            if let Some(t) = field.time() {
                let _ = write!(out, "{:e} ", t.value(i));
            }
            let _ = writeln!(out, "{:e} {:e} {:e}", space.value(j), v.re, v.im);
        }
    }
    out
}

pub fn field_from_str(text: &str) -> Result<SampledField> {
    let mut header_text = String::new();
    let mut data = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            header_text.push_str(rest.strip_prefix(' ').unwrap_or(rest));
            header_text.push('\n');
        } else if !line.trim().is_empty() {
            data.push(line);
        }
    }
    let header: Header =
        toml::from_str(&header_text).map_err(|e| Error::Parse(format!("field header: {e}")))?;
    if header.format != FIELD_FORMAT {
        return Err(Error::Parse(format!("unsupported field format {:?}", header.format)));
    }
    let revalidate = |a: Axis| Axis::new(a.origin(), a.step(), a.count(), a.kind());
    let space = revalidate(header.space)?;
    let time = header.time.map(revalidate).transpose()?;
    let expected = space.count() * time.map_or(1, |t| t.count());
    if data.len() != expected {
        return Err(Error::Parse(format!(
            "expected {expected} sample rows, found {}",
            data.len()
        )));
    }
    let skip = if time.is_some() { 2 } else { 1 };
    let mut values = Vec::with_capacity(expected);
    for (n, line) in data.iter().enumerate() {
        let nums: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("row {n}: {e}")))?;
        if nums.len() != skip + 2 {
            return Err(Error::Parse(format!("row {n}: expected {} columns", skip + 2)));
        }
        values.push(Complex64::new(nums[skip], nums[skip + 1]));
    }
    SampledField::new(space, time, values, header.realness)
}

pub fn write_field(path: impl AsRef<Path>, field: &SampledField) -> Result<()> {
    fs::write(path, field_to_string(field))?;
    Ok(())
}

pub fn read_field(path: impl AsRef<Path>) -> Result<SampledField> {
    field_from_str(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::axis::AxisKind;

    #[test]
    fn rejects_wrong_row_count() {
        let x = Axis::periodic(0.0, 1.0, 3, AxisKind::Space).unwrap();
        let f = SampledField::real(x, None, &[1.0, 2.0, 3.0]).unwrap();
        let text = field_to_string(&f);
        let truncated: String = text.lines().take(text.lines().count() - 1).map(|l| format!("{l}\n")).collect();
        assert!(field_from_str(&truncated).is_err());
    }

    #[test]
    fn header_carries_convention_and_realness() {
        let x = Axis::periodic(0.0, 1.0, 3, AxisKind::Space).unwrap();
        let f = SampledField::real(x, None, &[1.0, 2.0, 3.0]).unwrap();
        let text = field_to_string(&f);
        assert!(text.contains("exp(+i*omega*t)"));
        assert!(text.contains("realness = \"real\""));
        assert!(field_from_str(&text).unwrap().is_real());
    }
}
