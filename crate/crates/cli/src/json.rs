//! JSON output with a fixed field order and 17 significant digits per float.

use std::io::{self, Write};
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use serde_json::ser::{Formatter, PrettyFormatter};

use fracsl_core::analysis::BoundRow;
use fracsl_core::ritz::SpectrumResult;

use crate::error::{io_at, Result};
use crate::table::format_float;

/// Pretty printer that writes every float as `d.dddddddddddddddde±x`.
struct FullPrecision<'a>(PrettyFormatter<'a>);

impl Formatter for FullPrecision<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, FullPrecision(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

pub fn write<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_bytes(value)?).map_err(io_at(path))
}

/// Serialized form of a [`SpectrumResult`].
#[derive(Serialize)]
pub struct SpectrumJson<'a> {
    pub alpha: f64,
    pub m: usize,
    pub eigenvalues: &'a [f64],
    #[serde(serialize_with = "traces_map")]
    pub traces: &'a [Vec<f64>],
    pub coefficients: &'a [Vec<f64>],
    pub m_values: &'a [usize],
    pub stagnation: &'a [Option<f64>],
    pub constraint_scale: f64,
}

impl<'a> From<&'a SpectrumResult> for SpectrumJson<'a> {
    fn from(r: &'a SpectrumResult) -> Self {
        Self {
            alpha: r.alpha,
            m: r.m,
            eigenvalues: &r.eigenvalues,
            traces: &r.traces,
            coefficients: &r.coefficients,
            m_values: &r.m_values,
            stagnation: &r.stagnation,
            constraint_scale: r.constraint_scale,
        }
    }
}

/// `{"1": [...], "2": [...]}` keyed by the 1-based eigenvalue index, in order.
fn traces_map<S: Serializer>(traces: &&[Vec<f64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(traces.len()))?;
    for (n, t) in traces.iter().enumerate() {
        map.serialize_entry(&(n + 1).to_string(), t)?;
    }
    map.end()
}

/// Serialized form of a [`BoundRow`].
#[derive(Serialize)]
pub struct BoundJson {
    pub alpha1: f64,
    pub alpha2: f64,
    pub j: usize,
    #[serde(rename = "K")]
    pub k: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

impl From<&BoundRow> for BoundJson {
    fn from(r: &BoundRow) -> Self {
        Self {
            alpha1: r.alpha1,
            alpha2: r.alpha2,
            j: r.j,
            k: r.k,
            lhs: r.lhs,
            rhs: r.rhs,
            margin: r.margin,
            pass: r.pass,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_every_bit_and_traces_stay_ordered() {
        let traces: Vec<Vec<f64>> = (0..11).map(|k| vec![k as f64 + 0.1]).collect();
        let json = SpectrumJson {
            alpha: 0.1 + 0.2,
            m: 3,
            eigenvalues: &[1.0, 4.0],
            traces: &traces,
            coefficients: &[],
            m_values: &[3],
            stagnation: &[None, Some(1e-300)],
            constraint_scale: std::f64::consts::FRAC_PI_2,
        };
        let text = String::from_utf8(to_bytes(&json).unwrap()).unwrap();
        assert!(text.contains("3.0000000000000004e-1"));
        let i2 = text.find("\"2\"").unwrap();
        let i10 = text.find("\"10\"").unwrap();
        assert!(i2 < i10);
        let value: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["alpha"].as_f64().unwrap(), 0.1 + 0.2);
        assert_eq!(
            value["constraint_scale"].as_f64().unwrap(),
            std::f64::consts::FRAC_PI_2
        );
        let keys: Vec<&str> = text
            .lines()
            .filter(|l| l.starts_with("  \""))
            .map(|l| l.trim().split('"').nth(1).unwrap())
            .collect();
        assert_eq!(
            keys,
            [
                "alpha",
                "m",
                "eigenvalues",
                "traces",
                "coefficients",
                "m_values",
                "stagnation",
                "constraint_scale"
            ]
        );
    }
}
