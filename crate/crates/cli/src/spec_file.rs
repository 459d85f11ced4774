//! Flat `key = value` problem files.
//!
//! ```text
//! # fractional oscillator on [0, pi]
//! interval.a = 0
//! interval.b = 3.141592653589793
//! alpha = 0.75
//! p.kind = constant
//! p.value = 1
//! q.kind = polynomial
//! q.coeffs = 0.5, 0, -1
//! w.kind = table
//! w.table = weight.csv
//! w.dtable = weight_slope.csv
//! ```
//!
//! Polynomial coefficients are in ascending powers. Table paths are relative
//! to the directory holding the problem file. Numbers are written in the
//! shortest form that parses back to the same `f64`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use fracsl_core::{CoefficientField, ProblemSpec};

use crate::error::{io_at, CliError, Result};
use crate::table::read_table;

/// One coefficient as written in a problem file.
#[derive(Debug, Clone, PartialEq)]
pub enum FieldEntry {
    Constant(f64),
    Polynomial(Vec<f64>),
    Table {
        path: PathBuf,
        derivative: Option<PathBuf>,
    },
}

/// Parsed problem file, before any table is loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct SpecFile {
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub p: FieldEntry,
    pub q: FieldEntry,
    pub w: FieldEntry,
}

impl SpecFile {
    pub fn oscillator(p0: f64, a: f64, b: f64, alpha: f64) -> Self {
        Self {
            a,
            b,
            alpha,
            p: FieldEntry::Constant(p0),
            q: FieldEntry::Constant(0.0),
            w: FieldEntry::Constant(1.0),
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_at(path))?;
        Self::parse(&text).map_err(|(line, message)| CliError::SpecSyntax {
            path: path.to_path_buf(),
            line,
            message,
        })
    }

    /// Parses the text of a problem file; errors carry a 1-based line number.
    pub fn parse(text: &str) -> std::result::Result<Self, (usize, String)> {
        let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or((k + 1, format!("expected key = value, got {line:?}")))?;
            let key = key.trim().to_string();
            if keys
                .insert(key.clone(), (k + 1, value.trim().to_string()))
                .is_some()
            {
                return Err((k + 1, format!("duplicate key {key}")));
            }
        }
        let mut reader = Keys { keys };
        let spec = Self {
            a: reader.number("interval.a")?,
            b: reader.number("interval.b")?,
            alpha: reader.number("alpha")?,
            p: reader.field("p")?,
            q: reader.field("q")?,
            w: reader.field("w")?,
        };
        if let Some((key, (line, _))) = reader.keys.into_iter().next() {
            return Err((line, format!("unknown key {key}")));
        }
        Ok(spec)
    }

    /// Builds the problem, loading tables relative to `base`.
    pub fn resolve(&self, base: &Path) -> Result<ProblemSpec> {
        Ok(ProblemSpec::new(
            self.a,
            self.b,
            self.alpha,
            resolve_field(&self.p, base)?,
            resolve_field(&self.q, base)?,
            resolve_field(&self.w, base)?,
        )?)
    }
}

fn resolve_field(entry: &FieldEntry, base: &Path) -> Result<CoefficientField> {
    Ok(match entry {
        FieldEntry::Constant(c) => CoefficientField::Constant(*c),
        FieldEntry::Polynomial(c) => CoefficientField::Polynomial(c.clone()),
        FieldEntry::Table { path, derivative } => CoefficientField::Table {
            samples: read_table(&base.join(path))?,
            derivative: derivative
                .as_ref()
                .map(|d| read_table(&base.join(d)))
                .transpose()?,
        },
    })
}

struct Keys {
    keys: BTreeMap<String, (usize, String)>,
}

impl Keys {
    fn take(&mut self, key: &str) -> std::result::Result<(usize, String), (usize, String)> {
        self.keys
            .remove(key)
            .ok_or((0, format!("missing key {key}")))
    }

    fn number(&mut self, key: &str) -> std::result::Result<f64, (usize, String)> {
        let (line, value) = self.take(key)?;
        parse_number(&value).map_err(|m| (line, format!("{key}: {m}")))
    }

    fn field(&mut self, name: &str) -> std::result::Result<FieldEntry, (usize, String)> {
        let (line, kind) = self.take(&format!("{name}.kind"))?;
        match kind.as_str() {
            "constant" => Ok(FieldEntry::Constant(self.number(&format!("{name}.value"))?)),
            "polynomial" => {
                let key = format!("{name}.coeffs");
                let (line, value) = self.take(&key)?;
                let coeffs = value
                    .split(',')
                    .map(|s| parse_number(s.trim()))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|m| (line, format!("{key}: {m}")))?;
                Ok(FieldEntry::Polynomial(coeffs))
            }
            "table" => {
                let (_, path) = self.take(&format!("{name}.table"))?;
                let derivative = self
                    .keys
                    .remove(&format!("{name}.dtable"))
                    .map(|(_, d)| PathBuf::from(d));
                Ok(FieldEntry::Table {
                    path: PathBuf::from(path),
                    derivative,
                })
            }
            other => Err((
                line,
                format!("{name}.kind must be constant, polynomial or table, got {other:?}"),
            )),
        }
    }
}

fn parse_number(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(format!("not a finite number: {s:?}")),
    }
}

impl fmt::Display for SpecFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "interval.a = {}", self.a)?;
        writeln!(f, "interval.b = {}", self.b)?;
        writeln!(f, "alpha = {}", self.alpha)?;
        for (name, entry) in [('p', &self.p), ('q', &self.q), ('w', &self.w)] {
            match entry {
                FieldEntry::Constant(c) => {
                    writeln!(f, "{name}.kind = constant")?;
                    writeln!(f, "{name}.value = {c}")?;
                }
                FieldEntry::Polynomial(c) => {
                    let list: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                    writeln!(f, "{name}.kind = polynomial")?;
                    writeln!(f, "{name}.coeffs = {}", list.join(", "))?;
                }
                FieldEntry::Table { path, derivative } => {
                    writeln!(f, "{name}.kind = table")?;
                    writeln!(f, "{name}.table = {}", path.display())?;
                    if let Some(d) = derivative {
                        writeln!(f, "{name}.dtable = {}", d.display())?;
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SAMPLE: &str = "
        # comment
        interval.a = 0
        interval.b = 3.141592653589793
        alpha = 0.75   # trailing comment
        p.kind = constant
        p.value = 1
        q.kind = polynomial
        q.coeffs = 0.5, 0, -1e-3
        w.kind = table
        w.table = w.csv
    ";

    #[test]
    fn parses_all_kinds() {
        let s = SpecFile::parse(SAMPLE).unwrap();
        assert_eq!(s.b, std::f64::consts::PI);
        assert_eq!(s.p, FieldEntry::Constant(1.0));
        assert_eq!(s.q, FieldEntry::Polynomial(vec![0.5, 0.0, -1e-3]));
        assert_eq!(
            s.w,
            FieldEntry::Table {
                path: "w.csv".into(),
                derivative: None
            }
        );
    }

    #[test]
    fn reports_line_numbers() {
        let bad = SAMPLE.replace("alpha = 0.75", "alpha = fast");
        assert_eq!(SpecFile::parse(&bad).unwrap_err().0, 5);
        let unknown = format!("{SAMPLE}\nextra = 1\n");
        assert!(SpecFile::parse(&unknown)
            .unwrap_err()
            .1
            .contains("unknown key extra"));
        let missing = SAMPLE.replace("p.value = 1", "");
        assert!(SpecFile::parse(&missing)
            .unwrap_err()
            .1
            .contains("missing key p.value"));
        let dup = format!("{SAMPLE}\nalpha = 0.8\n");
        assert!(SpecFile::parse(&dup).unwrap_err().1.contains("duplicate"));
    }

    fn finite() -> impl Strategy<Value = f64> {
        prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO
    }

    proptest! {
        #[test]
        fn text_round_trip_is_bit_exact(
            a in finite(),
            b in finite(),
            alpha in finite(),
            p in finite(),
            coeffs in prop::collection::vec(finite(), 1..6),
        ) {
            let spec = SpecFile {
                a,
                b,
                alpha,
                p: FieldEntry::Constant(p),
                q: FieldEntry::Polynomial(coeffs),
                w: FieldEntry::Table { path: "w.csv".into(), derivative: Some("dw.csv".into()) },
            };
            let back = SpecFile::parse(&spec.to_string()).unwrap();
            prop_assert_eq!(back.a.to_bits(), spec.a.to_bits());
            prop_assert_eq!(back.alpha.to_bits(), spec.alpha.to_bits());
            match (&back.q, &spec.q) {
                (FieldEntry::Polynomial(u), FieldEntry::Polynomial(v)) => {
                    let ub: Vec<u64> = u.iter().map(|x| x.to_bits()).collect();
                    let vb: Vec<u64> = v.iter().map(|x| x.to_bits()).collect();
                    prop_assert_eq!(ub, vb);
                }
                _ => prop_assert!(false),
            }
            prop_assert_eq!(back, spec);
        }
    }
}
