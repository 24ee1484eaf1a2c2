//! Parallel sweeps over the number of wave pairs.

use std::fmt::Write as _;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::series::format_value;
use super::simulate::{run_simulation, write_outputs, SimulationReport};
use crate::construction::validate_parameters;
use crate::error::{Error, Result};

pub const SWEEP_SCHEMA: &str = "sweepsummary/v1";

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub r: u32,
    pub k_base: u64,
    pub t_final: f64,
    pub u0_besov_lp: f64,
    pub u0_besov_heat: f64,
    /// `|u(T)|_{B^{-s}}`.
    pub final_besov_lp: f64,
    pub final_besov_heat: f64,
    pub ratio_lp: f64,
    pub ratio_heat: f64,
    pub window_peak_lp: f64,
    pub floor: f64,
}

impl SweepRow {
    fn from_report(rep: &SimulationReport) -> Self {
        let c = &rep.config.inflation;
        let last = rep.series.last().expect("series is nonempty");
        Self {
            r: c.r,
            k_base: c.base_frequency(),
            t_final: c.final_time(),
            u0_besov_lp: rep.u0_besov_lp,
            u0_besov_heat: rep.u0_besov_heat,
            final_besov_lp: last.u_besov_lp,
            final_besov_heat: last.u_besov_heat,
            ratio_lp: rep.inflation.lp,
            ratio_heat: rep.inflation.heat,
            window_peak_lp: rep.window_peak.lp,
            floor: last.floor,
        }
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 || points.iter().any(|(x, y)| !(*x > 0.0) || !(*y > 0.0)) {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Fitted exponents in `r` with their predicted values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepFit {
    pub u0_slope_lp: Option<f64>,
    pub u0_slope_heat: Option<f64>,
    /// `-beta` (at `p = inf`).
    pub u0_predicted: f64,
    pub ratio_slope_lp: Option<f64>,
    pub ratio_slope_heat: Option<f64>,
    /// `1 - beta`.
    pub ratio_predicted: f64,
}

#[derive(Clone, Debug)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
    pub fit: SweepFit,
    pub reports: Vec<SimulationReport>,
}

impl SweepReport {
    /// LP ratios strictly increase with `r`.
    pub fn ratio_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].ratio_lp > w[0].ratio_lp)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# {SWEEP_SCHEMA}\nr,K,t_final,u0_besov_lp,u0_besov_heat,final_besov_lp,final_besov_heat,ratio_lp,ratio_heat,window_peak_lp,floor\n"
        );
        for r in &self.rows {
            let vals = [
                r.t_final,
                r.u0_besov_lp,
                r.u0_besov_heat,
                r.final_besov_lp,
                r.final_besov_heat,
                r.ratio_lp,
                r.ratio_heat,
                r.window_peak_lp,
                r.floor,
            ]
            .map(format_value);
            let _ = writeln!(s, "{},{},{}", r.r, r.k_base, vals.join(","));
        }
        s
    }

    pub fn fit_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map_or_else(|| "nan".to_string(), format_value);
        let f = &self.fit;
        format!(
            "# sweepfit/v1\nquantity,measured,predicted\nu0_besov_lp,{},{}\nu0_besov_heat,{},{}\nratio_lp,{},{}\nratio_heat,{},{}\n",
            opt(f.u0_slope_lp),
            format_value(f.u0_predicted),
            opt(f.u0_slope_heat),
            format_value(f.u0_predicted),
            opt(f.ratio_slope_lp),
            format_value(f.ratio_predicted),
            opt(f.ratio_slope_heat),
            format_value(f.ratio_predicted),
        )
    }
}

/// Run `base` at every `r` in parallel. Every member is validated before any
/// is run; one invalid member aborts the sweep.
pub fn run_sweep(base: &ExperimentConfig, rs: &[u32]) -> Result<SweepReport> {
    if rs.is_empty() {
        return Err(Error::InvalidParameter("empty r list".into()));
    }
    let members: Vec<ExperimentConfig> = rs
        .iter()
        .map(|&r| {
            let mut c = base.clone();
            c.inflation.r = r;
            c
        })
        .collect();
    if !base.override_constraints {
        let bad: Vec<String> = members
            .iter()
            .filter_map(|c| {
                let rep = validate_parameters(&c.inflation);
                (!rep.admissible()).then(|| {
                    let names: Vec<&str> = rep.violations().iter().map(|v| v.name).collect();
                    format!("r = {}: {}", c.inflation.r, names.join("; "))
                })
            })
            .collect();
        if !bad.is_empty() {
            return Err(Error::ConstraintViolation(bad.join(" | ")));
        }
    }
    let runs = members
        .par_iter()
        .map(|c| {
            let run = run_simulation(c)?;
            if let Some(dir) = &c.outdir {
                write_outputs(&run, &dir.join(format!("r{}", c.inflation.r)))?;
            }
            Ok(run.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports = runs;
    reports.sort_by_key(|r| r.config.inflation.r);
    let rows: Vec<SweepRow> = reports.iter().map(SweepRow::from_report).collect();
    let pts = |f: fn(&SweepRow) -> f64| rows.iter().map(|r| (r.r as f64, f(r))).collect::<Vec<_>>();
    let c = &base.inflation;
    let inv_p = if c.p.is_infinite() { 0.0 } else { 1.0 / c.p };
    let fit = SweepFit {
        u0_slope_lp: log_log_slope(&pts(|r| r.u0_besov_lp)),
        u0_slope_heat: log_log_slope(&pts(|r| r.u0_besov_heat)),
        u0_predicted: inv_p - c.beta,
        ratio_slope_lp: log_log_slope(&pts(|r| r.ratio_lp)),
        ratio_slope_heat: log_log_slope(&pts(|r| r.ratio_heat)),
        ratio_predicted: 1.0 - c.beta,
    };
    let report = SweepReport { rows, fit, reports };
    if let Some(dir) = &base.outdir {
        std::fs::create_dir_all(dir)?;
        std::fs::write(dir.join("summary.csv"), report.to_csv())?;
        std::fs::write(dir.join("fit.csv"), report.fit_csv())?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = [1.0, 2.0, 4.0, 8.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(0.55))).collect();
        assert!((log_log_slope(&pts).unwrap() - 0.55).abs() < 1e-12);
        assert!(log_log_slope(&pts[..1]).is_none());
        assert!(log_log_slope(&[(1.0, 1.0), (2.0, 0.0)]).is_none());
    }

    #[test]
    fn single_member_matches_simulation() {
        let mut base = ExperimentConfig::standard(2);
        base.snapshots = 8;
        let sweep = run_sweep(&base, &[2]).unwrap();
        let run = run_simulation(&base).unwrap();
        assert_eq!(sweep.reports[0].series.to_csv(), run.report.series.to_csv());
        assert_eq!(sweep.rows[0].ratio_lp, run.report.inflation.lp);
        assert!(sweep.fit.ratio_slope_lp.is_none());
    }

    #[test]
    fn invalid_member_aborts() {
        let mut base = ExperimentConfig::standard(2);
        base.inflation.gamma = 5.0;
        assert!(matches!(run_sweep(&base, &[2, 3]), Err(Error::ConstraintViolation(_))));
    }
}
