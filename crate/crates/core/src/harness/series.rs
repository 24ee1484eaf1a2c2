//! Per-snapshot norm tables and their CSV form.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const SERIES_SCHEMA: &str = "normseries/v1";

pub const SERIES_COLUMNS: [&str; 12] = [
    "t",
    "u_linf",
    "u_besov_heat",
    "u_besov_lp",
    "lin_linf",
    "u10_linf",
    "u10_besov_heat",
    "u10_besov_lp",
    "u11_linf",
    "u12_linf",
    "y_linf",
    "floor",
];

/// Norms of the solution and of its pieces at one snapshot. Columns that do
/// not apply (no closed-form first iterate) hold NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormRow {
    pub t: f64,
    pub u_linf: f64,
    pub u_besov_heat: f64,
    pub u_besov_lp: f64,
    /// `|e^{-t Lambda} u0|_inf`.
    pub lin_linf: f64,
    pub u10_linf: f64,
    pub u10_besov_heat: f64,
    pub u10_besov_lp: f64,
    pub u11_linf: f64,
    pub u12_linf: f64,
    pub y_linf: f64,
    /// `r^{1 - 2 beta} (1 - B)`.
    pub floor: f64,
}

impl NormRow {
    pub fn values(&self) -> [f64; 12] {
        [
            self.t,
            self.u_linf,
            self.u_besov_heat,
            self.u_besov_lp,
            self.lin_linf,
            self.u10_linf,
            self.u10_besov_heat,
            self.u10_besov_lp,
            self.u11_linf,
            self.u12_linf,
            self.y_linf,
            self.floor,
        ]
    }

    fn from_values(v: [f64; 12]) -> Self {
        Self {
            t: v[0],
            u_linf: v[1],
            u_besov_heat: v[2],
            u_besov_lp: v[3],
            lin_linf: v[4],
            u10_linf: v[5],
            u10_besov_heat: v[6],
            u10_besov_lp: v[7],
            u11_linf: v[8],
            u12_linf: v[9],
            y_linf: v[10],
            floor: v[11],
        }
    }
}

/// One row per snapshot, increasing in `t`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NormSeries {
    rows: Vec<NormRow>,
}

impl NormSeries {
    pub fn new(rows: Vec<NormRow>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[1].t > w[0].t)) {
            return Err(Error::InvalidParameter("norm series times must increase".into()));
        }
        Ok(Self { rows })
    }

    pub fn rows(&self) -> &[NormRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn first(&self) -> Option<&NormRow> {
        self.rows.first()
    }

    pub fn last(&self) -> Option<&NormRow> {
        self.rows.last()
    }

    /// Rows with `t` in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> impl Iterator<Item = &NormRow> {
        self.rows.iter().filter(move |r| r.t >= lo && r.t <= hi)
    }

    /// Schema line, header, then `{:.12e}` values.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# {SERIES_SCHEMA}\n{}\n", SERIES_COLUMNS.join(","));
        for row in &self.rows {
            let line: Vec<String> = row.values().iter().map(|v| format_value(*v)).collect();
            let _ = writeln!(s, "{}", line.join(","));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let bad = |line: usize, msg: &str| Error::Config {
            line,
            msg: msg.to_string(),
        };
        if lines.next().map(str::trim) != Some(&format!("# {SERIES_SCHEMA}")) {
            return Err(bad(1, "missing normseries/v1 schema tag"));
        }
        if lines.next().map(str::trim) != Some(&SERIES_COLUMNS.join(",")) {
            return Err(bad(2, "unexpected column header"));
        }
        let mut rows = Vec::new();
        for (i, line) in lines.enumerate() {
            let vals: Vec<f64> = line
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(i + 3, "unparsable value"))?;
            let vals: [f64; 12] = vals.try_into().map_err(|_| bad(i + 3, "expected 12 columns"))?;
            rows.push(NormRow::from_values(vals));
        }
        Self::new(rows)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

pub(crate) fn format_value(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else {
        format!("{v:.12e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(t: f64) -> NormRow {
        NormRow::from_values([t, 1.0, 0.5, 0.25, 2.0, 0.1, 0.05, 0.1, 1e-3, 2e-3, 1e-4, f64::NAN])
    }

    #[test]
    fn csv_round_trip() {
        let s = NormSeries::new(vec![row(0.0), row(1.0 / 3.0), row(0.5)]).unwrap();
        let text = s.to_csv();
        assert!(text.starts_with("# normseries/v1\nt,u_linf,"));
        let back = NormSeries::from_csv(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert_eq!(back.to_csv(), text);
        assert!(back.rows()[0].floor.is_nan());
        assert!((back.rows()[1].t - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_unsorted_and_bad_headers() {
        assert!(NormSeries::new(vec![row(1.0), row(0.5)]).is_err());
        assert!(NormSeries::from_csv("t,u\n").is_err());
        let text = NormSeries::new(vec![row(0.0)]).unwrap().to_csv() + "1,2\n";
        assert!(NormSeries::from_csv(&text).is_err());
    }
}
