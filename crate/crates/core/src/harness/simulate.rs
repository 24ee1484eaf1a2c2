//! Single inflation experiments.

use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::series::{NormRow, NormSeries};
use crate::besov::{besov_norm_heat, besov_norm_lp, BesovIndex, HeatGrid};
use crate::construction::{build_u0_with_fault, predicted_bounds, validate_parameters, ConstraintReport};
use crate::error::{Error, Result};
use crate::quadrature::CompositeGauss;
use crate::solver::{
    decompose_by_quadrature, decompose_with_fault, mild_solve, write_snapshot, Decomposition, SolveOptions, TimeGrid,
    Trajectory,
};
use crate::spectral::{linf_norm, FractionalParams, Lattice, SpectralField};

/// `|u(t)|_{B^{-s}} / |u0|_{B^{-alpha}}` in both characterizations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InflationRatio {
    pub t: f64,
    pub lp: f64,
    pub heat: f64,
}

#[derive(Clone, Debug)]
pub struct SimulationReport {
    pub config: ExperimentConfig,
    pub constraints: ConstraintReport,
    /// Ran with violated constraints under the override flag.
    pub unsupported: bool,
    pub lattice: Lattice,
    pub series: NormSeries,
    /// `|u0|_{B^{-alpha}_{inf,inf}}`.
    pub u0_besov_lp: f64,
    pub u0_besov_heat: f64,
    /// Ratio at the final time, the headline number.
    pub inflation: InflationRatio,
    /// Largest LP ratio on `[window_start, T]`.
    pub window_peak: InflationRatio,
    /// Largest LP ratio over every snapshot, `t = 0` included.
    pub snapshot_peak: InflationRatio,
    pub steps: usize,
    pub max_divergence: f64,
    pub warnings: Vec<String>,
}

impl fmt::Display for SimulationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.config.inflation;
        let d = self.lattice.dims();
        writeln!(
            f,
            "r = {}  K = {}  alpha = {}  beta = {}  s = {}  T = {:.6e}  lattice {}x{}x{}",
            c.r,
            c.base_frequency(),
            c.alpha,
            c.beta,
            c.s,
            c.final_time(),
            d[0],
            d[1],
            d[2]
        )?;
        if self.unsupported {
            writeln!(f, "UNSUPPORTED: constraints overridden")?;
        }
        writeln!(f, "|u0|_B^-alpha   lp {:.6e}  heat {:.6e}", self.u0_besov_lp, self.u0_besov_heat)?;
        let r = &self.inflation;
        writeln!(f, "inflation ratio at t = {:.6e}: lp {:.6e}  heat {:.6e}", r.t, r.lp, r.heat)?;
        let w = &self.window_peak;
        writeln!(f, "window peak at t = {:.6e}: lp {:.6e}  heat {:.6e}", w.t, w.lp, w.heat)?;
        let p = &self.snapshot_peak;
        writeln!(f, "snapshot peak at t = {:.6e}: lp {:.6e}", p.t, p.lp)?;
        writeln!(f, "steps {}  max |div u| {:.3e}", self.steps, self.max_divergence)?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}

/// Report plus the raw trajectory and its decomposition.
#[derive(Clone, Debug)]
pub struct SimulationRun {
    pub report: SimulationReport,
    pub trajectory: Trajectory,
    pub decomposition: Decomposition,
}

/// Refuse configurations that fail validation, unless overridden.
pub fn check_constraints(cfg: &ExperimentConfig) -> Result<ConstraintReport> {
    let report = validate_parameters(&cfg.inflation);
    if !report.admissible() && !cfg.override_constraints {
        let names: Vec<&str> = report.violations().iter().map(|c| c.name).collect();
        return Err(Error::ConstraintViolation(names.join("; ")));
    }
    Ok(report)
}

fn norm_index(s: f64, alpha: f64) -> Result<BesovIndex> {
    BesovIndex::sup(s, alpha)
}

/// `|u0|_{B^{-alpha}_{inf,inf}}` as (LP, heat).
pub fn initial_norms(u0: &SpectralField, alpha: f64) -> Result<(f64, f64)> {
    let idx = norm_index(alpha, alpha)?;
    let grid = HeatGrid::standard(u0.lattice(), alpha);
    Ok((besov_norm_lp(u0, &idx).value, besov_norm_heat(u0, &idx, &grid)?.value))
}

fn row_norms(u: &SpectralField, idx: &BesovIndex, grid: &HeatGrid) -> Result<(f64, f64, f64)> {
    Ok((linf_norm(u), besov_norm_heat(u, idx, grid)?.value, besov_norm_lp(u, idx).value))
}

fn build_series(dec: &Decomposition, traj: &Trajectory, s: f64, floor: f64) -> Result<NormSeries> {
    let l = *traj.lattice();
    let alpha = traj.params().alpha();
    let idx = norm_index(s, alpha)?;
    let grid = HeatGrid::standard(&l, alpha);
    let rows = (0..traj.len())
        .into_par_iter()
        .map(|i| {
            let t = dec.times[i];
            let (u_linf, u_heat, u_lp) = row_norms(&traj.fields()[i], &idx, &grid)?;
            let (mut u10, mut u10h, mut u10l, mut u11, mut u12) = (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN);
            if let Some(first) = &dec.first {
                (u10, u10h, u10l) = row_norms(&first.resonant.to_field(l, t)?, &idx, &grid)?;
                u11 = linf_norm(&first.difference.to_field(l, t)?);
                u12 = linf_norm(&first.sum.to_field(l, t)?);
            }
            Ok(NormRow {
                t,
                u_linf,
                u_besov_heat: u_heat,
                u_besov_lp: u_lp,
                lin_linf: linf_norm(&dec.linear[i]),
                u10_linf: u10,
                u10_besov_heat: u10h,
                u10_besov_lp: u10l,
                u11_linf: u11,
                u12_linf: u12,
                y_linf: linf_norm(&dec.y[i]),
                floor,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    NormSeries::new(rows)
}

fn ratio_at(row: &NormRow, u0: (f64, f64)) -> InflationRatio {
    let div = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
    InflationRatio {
        t: row.t,
        lp: div(row.u_besov_lp, u0.0),
        heat: div(row.u_besov_heat, u0.1),
    }
}

fn peak<'a>(rows: impl Iterator<Item = &'a NormRow>, u0: (f64, f64)) -> Option<InflationRatio> {
    rows.map(|r| ratio_at(r, u0)).max_by(|a, b| a.lp.total_cmp(&b.lp))
}

/// Validate, solve from the construction's data, split `u = linear - u1 + y`
/// and tabulate norms at every snapshot.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<SimulationRun> {
    let constraints = check_constraints(cfg)?;
    let c = &cfg.inflation;
    let lattice = cfg.lattice()?;
    let params = c.params()?;
    let u0 = build_u0_with_fault(c, lattice, cfg.fault)?;
    let grid = cfg.time_grid()?;
    let traj = mild_solve(&u0, &params, &grid, SolveOptions::default())?;
    let dec = decompose_with_fault(&traj, c, cfg.fault)?;
    let series = build_series(&dec, &traj, c.s, predicted_bounds(c).certified_floor)?;
    let u0n = initial_norms(&u0, c.alpha)?;
    let last = series.last().ok_or(Error::EmptyGrid)?;
    let inflation = ratio_at(last, u0n);
    let window_peak = peak(series.window(c.window_start(), c.final_time()), u0n).unwrap_or(inflation);
    let snapshot_peak = peak(series.rows().iter(), u0n).unwrap_or(inflation);
    let mut warnings = cfg.notes.clone();
    warnings.extend(traj.warnings().iter().cloned());
    if !constraints.b_certified {
        warnings.push(format!(
            "B = {:.3} > 1/4: the floor column is not certified at this r",
            constraints.b_value
        ));
    }
    let report = SimulationReport {
        config: cfg.clone(),
        unsupported: !constraints.admissible(),
        constraints,
        lattice,
        series,
        u0_besov_lp: u0n.0,
        u0_besov_heat: u0n.1,
        inflation,
        window_peak,
        snapshot_peak,
        steps: traj.steps(),
        max_divergence: traj.max_divergence(),
        warnings,
    };
    Ok(SimulationRun {
        report,
        trajectory: traj,
        decomposition: dec,
    })
}

/// Norm series for arbitrary initial data; `u1` by quadrature, first-iterate
/// columns and the floor are NaN.
pub fn simulate_field(
    u0: &SpectralField,
    params: &FractionalParams,
    grid: &TimeGrid,
    s: f64,
    quad: &CompositeGauss,
) -> Result<(Trajectory, NormSeries)> {
    let traj = mild_solve(u0, params, grid, SolveOptions::default())?;
    let dec = decompose_by_quadrature(&traj, quad)?;
    let series = build_series(&dec, &traj, s, f64::NAN)?;
    Ok((traj, series))
}

/// `series.csv`, `report.txt`, `config.txt` and the first and last snapshots.
pub fn write_outputs(run: &SimulationRun, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let rep = &run.report;
    rep.series.write_csv(&dir.join("series.csv"))?;
    std::fs::write(dir.join("report.txt"), format!("{rep}\n{}", rep.constraints))?;
    std::fs::write(dir.join("config.txt"), rep.config.to_text())?;
    let traj = &run.trajectory;
    write_snapshot(&dir.join("u_initial.fnss"), traj.initial(), traj.params(), 0.0)?;
    let (t, u) = traj.last();
    write_snapshot(&dir.join("u_final.fnss"), u, traj.params(), t)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::DtPolicy;

    fn small(r: u32) -> ExperimentConfig {
        let mut c = ExperimentConfig::standard(r);
        c.snapshots = 12;
        c
    }

    #[test]
    fn series_has_one_row_per_snapshot() {
        let run = run_simulation(&small(2)).unwrap();
        let rep = &run.report;
        assert_eq!(rep.series.len(), run.trajectory.len());
        let first = rep.series.first().unwrap();
        assert_eq!(first.t, 0.0);
        assert_eq!(first.y_linf, 0.0);
        assert_eq!(first.u10_linf, 0.0);
        assert!((rep.inflation.t - rep.config.inflation.final_time()).abs() < 1e-15);
        assert!(rep.inflation.lp > 0.0 && rep.inflation.heat > 0.0);
        assert!((rep.snapshot_peak.lp - 1.0).abs() < 1e-12, "t = 0 ratio is one when s = alpha");
    }

    #[test]
    fn refuses_invalid_unless_overridden() {
        let mut c = small(2);
        c.inflation.beta = 0.6;
        assert!(matches!(run_simulation(&c), Err(Error::ConstraintViolation(_))));
        c.override_constraints = true;
        c.inflation.beta = 0.45;
        c.inflation.gamma = 10.0;
        let run = run_simulation(&c).unwrap();
        assert!(run.report.unsupported);
        assert!(run.report.to_string().contains("UNSUPPORTED"));
    }

    #[test]
    fn zero_data_gives_zero_norms() {
        let l = Lattice::new(16, 1, 16).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(0.1, 4, DtPolicy::default()).unwrap();
        let q = CompositeGauss::with_total_nodes(16).unwrap();
        let (_, s) = simulate_field(&SpectralField::zeros(l), &p, &grid, 1.0, &q).unwrap();
        for row in s.rows() {
            for v in [row.u_linf, row.u_besov_heat, row.u_besov_lp, row.lin_linf, row.y_linf] {
                assert_eq!(v, 0.0);
            }
        }
    }

    #[test]
    fn outputs_are_deterministic() {
        let run = run_simulation(&small(2)).unwrap();
        let again = run_simulation(&small(2)).unwrap();
        assert_eq!(run.report.series.to_csv(), again.report.series.to_csv());
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&run, dir.path()).unwrap();
        for f in ["series.csv", "report.txt", "config.txt", "u_initial.fnss", "u_final.fnss"] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
