//! Curve tables written as CSV with `#` metadata lines above the header.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use mimo_duel::beamform::Scheme;
use mimo_duel::metrics::SampleSet;
use mimo_duel::SystemKind;

use crate::{CliError, Result};

/// `<kind>_<scheme>_dof<ζ>`
pub fn series_name(kind: SystemKind, scheme: &str, dof: usize) -> String {
    format!("{}_{}_dof{}", kind.tag(), scheme, dof)
}

pub fn scheme_series(kind: SystemKind, scheme: Scheme, dof: usize) -> String {
    series_name(kind, scheme.tag(), dof)
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CurveTable {
    pub x_name: String,
    pub x: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
    pub meta: BTreeMap<String, String>,
}

impl CurveTable {
    pub fn new(x_name: impl Into<String>, x: Vec<f64>) -> Result<Self> {
        if x.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(CliError::Core(mimo_duel::Error::Domain("curve table x values must increase".into())));
        }
        Ok(Self { x_name: x_name.into(), x, ..Default::default() })
    }

    pub fn push(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.x.len(), "series length must match the x grid");
        self.series.push((name.into(), values));
    }

    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.series.iter().find(|(n, _)| n == name).map(|(_, v)| v.as_slice())
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        for (k, v) in &self.meta {
            writeln!(out, "# {k}: {v}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec![self.x_name.clone()];
        header.extend(self.series.iter().map(|(n, _)| n.clone()));
        w.write_record(&header)?;
        for (i, x) in self.x.iter().enumerate() {
            let mut row = vec![format!("{x:e}")];
            row.extend(self.series.iter().map(|(_, v)| format!("{:e}", v[i])));
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut meta = BTreeMap::new();
        let mut body = String::new();
        for line in std::io::BufReader::new(f).lines() {
            let line = line?;
            match line.strip_prefix("# ") {
                Some(m) => {
                    if let Some((k, v)) = m.split_once(": ") {
                        meta.insert(k.to_string(), v.to_string());
                    }
                }
                None => {
                    body.push_str(&line);
                    body.push('\n');
                }
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let (x_name, names) = header
            .split_first()
            .ok_or_else(|| CliError::Io(format!("{}: missing header", path.display())))?;
        let mut x = Vec::new();
        let mut cols = vec![Vec::new(); names.len()];
        for rec in r.records() {
            let rec = rec?;
            let parse = |s: &str| s.parse::<f64>().map_err(|e| CliError::Io(format!("bad number `{s}`: {e}")));
            x.push(parse(&rec[0])?);
            for (c, col) in cols.iter_mut().enumerate() {
                col.push(parse(&rec[c + 1])?);
            }
        }
        Ok(Self {
            x_name: x_name.clone(),
            x,
            series: names.iter().cloned().zip(cols).collect(),
            meta,
        })
    }
}

/// `n` log-spaced points covering `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Range spanning the `[p, 1−p]` quantiles of every set.
pub fn pooled_range(sets: &[&SampleSet], p: f64) -> Result<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in sets {
        lo = lo.min(s.quantile(p)?);
        hi = hi.max(s.quantile(1.0 - p)?);
    }
    Ok((lo, hi))
}
