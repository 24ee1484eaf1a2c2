use super::duhamel::{bilinear_b, relative_linf, HeatPath};
use super::integrate::{mild_solve, SolveOptions, TimeGrid, Trajectory};
use crate::construction::{build_u0_with_fault, Fault, InflationConfig};
use crate::error::{Error, Result};
use crate::oracles::{u1_closed_form_with_fault, FirstIterate};
use crate::quadrature::CompositeGauss;
use crate::spectral::{apply_decay, heat_semigroup, projected_flux, rate_table, SpectralField};

/// `u = linear - u1 + y` at every snapshot.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub times: Vec<f64>,
    /// `e^{-t Lambda} u0`.
    pub linear: Vec<SpectralField>,
    /// `B(linear, linear)`.
    pub u1: Vec<SpectralField>,
    /// Remainder `u - linear + u1`.
    pub y: Vec<SpectralField>,
    /// Closed form of `u1`, when it came from the construction.
    pub first: Option<FirstIterate>,
}

fn assemble(traj: &Trajectory, u1: Vec<SpectralField>, first: Option<FirstIterate>) -> Result<Decomposition> {
    let u0 = traj.initial();
    let linear: Vec<SpectralField> = traj
        .times()
        .iter()
        .map(|&t| heat_semigroup(u0, t, traj.params()))
        .collect::<Result<_>>()?;
    let y = traj
        .fields()
        .iter()
        .zip(&linear)
        .zip(&u1)
        .map(|((u, w), v)| {
            let mut y = u.sub(w)?;
            y.axpy(1.0, v)?;
            Ok(y)
        })
        .collect::<Result<_>>()?;
    Ok(Decomposition {
        times: traj.times().to_vec(),
        linear,
        u1,
        y,
        first,
    })
}

/// Split a trajectory started from the construction's `u0`, using the closed-form `u1`.
pub fn decompose(traj: &Trajectory, cfg: &InflationConfig) -> Result<Decomposition> {
    decompose_with_fault(traj, cfg, Fault::None)
}

/// [`decompose`] against a deliberately corrupted construction.
pub fn decompose_with_fault(traj: &Trajectory, cfg: &InflationConfig, fault: Fault) -> Result<Decomposition> {
    if *traj.params() != cfg.params()? {
        return Err(Error::InvalidParameter("trajectory and config disagree on (alpha, nu)".into()));
    }
    let expected = build_u0_with_fault(cfg, *traj.lattice(), fault)?;
    let scale = expected.max_coeff_abs().max(1e-300);
    if traj.initial().max_abs_diff(&expected) > 1e-12 * scale {
        return Err(Error::InvalidParameter("trajectory does not start from the configured initial data".into()));
    }
    let first = u1_closed_form_with_fault(cfg, fault)?;
    let total = first.total();
    let l = *traj.lattice();
    let u1 = traj
        .times()
        .iter()
        .map(|&t| total.to_field(l, t))
        .collect::<Result<_>>()?;
    assemble(traj, u1, Some(first))
}

/// Split any trajectory, computing `u1` by quadrature.
pub fn decompose_by_quadrature(traj: &Trajectory, quad: &CompositeGauss) -> Result<Decomposition> {
    let path = HeatPath::new(traj.initial().clone(), *traj.params());
    let u1 = traj
        .times()
        .iter()
        .map(|&t| bilinear_b(&path, &path, t, traj.params(), quad))
        .collect::<Result<_>>()?;
    assemble(traj, u1, None)
}

/// Source terms of the remainder equation `y = -int e^{-(t-tau) Lambda} (G0 + G1 + G2)`.
#[derive(Clone, Debug)]
pub struct GTerms {
    /// Independent of `y`.
    pub g0: SpectralField,
    /// Linear in `y`.
    pub g1: SpectralField,
    /// Quadratic in `y`.
    pub g2: SpectralField,
}

impl GTerms {
    pub fn total(&self) -> Result<SpectralField> {
        self.g0.add(&self.g1)?.add(&self.g2)
    }
}

/// `G0 = P[-(w.grad)u1 - (u1.grad)w + (u1.grad)u1]`,
/// `G1 = P[(w.grad)y - (u1.grad)y + (y.grad)w - (y.grad)u1]`, `G2 = P[(y.grad)y]`.
pub fn g_terms(w: &SpectralField, u1: &SpectralField, y: &SpectralField) -> Result<GTerms> {
    let f = projected_flux;
    let mut g0 = f(u1, u1)?;
    g0.axpy(-1.0, &f(w, u1)?)?;
    g0.axpy(-1.0, &f(u1, w)?)?;
    let mut g1 = f(w, y)?;
    g1.axpy(-1.0, &f(u1, y)?)?;
    g1.axpy(1.0, &f(y, w)?)?;
    g1.axpy(-1.0, &f(y, u1)?)?;
    let g2 = f(y, y)?;
    Ok(GTerms { g0, g1, g2 })
}

/// Remainder at `t` two ways: from the solver directly and rebuilt from the G terms.
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub t: f64,
    pub direct: SpectralField,
    pub rebuilt: SpectralField,
    pub relative_error: f64,
}

/// Solve with snapshots at the quadrature nodes of `[0, t]`, then compare
/// `y(t)` with `-int_0^t e^{-(t - tau) Lambda} (G0 + G1 + G2)(tau) dtau`.
pub fn reconstruct_remainder(
    cfg: &InflationConfig,
    u0: &SpectralField,
    t: f64,
    quad: &CompositeGauss,
    grid: &TimeGrid,
) -> Result<Reconstruction> {
    let nodes = quad.nodes(0.0, t);
    let taus: Vec<f64> = nodes.iter().map(|n| n.0).chain([t]).collect();
    let grid = TimeGrid::new(vec![0.0, t], grid.policy())?.with_times(&taus)?;
    let traj = mild_solve(u0, &cfg.params()?, &grid, SolveOptions::default())?;
    let dec = decompose(&traj, cfg)?;
    let l = *traj.lattice();
    let rates = rate_table(&l, traj.params());
    let mut rebuilt = SpectralField::zeros(l);
    for &(tau, wgt) in &nodes {
        let i = traj
            .index_of(tau)
            .ok_or_else(|| Error::InvalidParameter(format!("missing node snapshot at {tau}")))?;
        let mut g = g_terms(&dec.linear[i], &dec.u1[i], &dec.y[i])?.total()?;
        apply_decay(&mut g, &rates, t - tau);
        rebuilt.axpy(-wgt, &g)?;
    }
    let direct = dec.y[traj.index_of(t).expect("t is a snapshot")].clone();
    let relative_error = relative_linf(&rebuilt, &direct)?;
    Ok(Reconstruction {
        t,
        direct,
        rebuilt,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_u0, experiment_lattice};
    use crate::oracles::u1_closed_form;
    use crate::solver::DtPolicy;
    use crate::spectral::{linf_norm, FractionalParams, Lattice, Phase};

    fn cfg(r: u32) -> InflationConfig {
        InflationConfig::default_point(r, 1.0, 0.45, f64::INFINITY).0.with_k(4)
    }

    #[test]
    fn remainder_vanishes_at_zero_and_for_plane_wave() {
        let l = Lattice::new(16, 1, 16).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let u0 = SpectralField::plane_wave(l, [2, 0, 1], [0.0, 1.0, 0.0], Phase::Sin, 3.0).unwrap();
        let grid = TimeGrid::uniform(0.5, 5, DtPolicy::default()).unwrap();
        let traj = mild_solve(&u0, &p, &grid, SolveOptions::default()).unwrap();
        let dec = decompose_by_quadrature(&traj, &CompositeGauss::with_total_nodes(32).unwrap()).unwrap();
        for (u1, y) in dec.u1.iter().zip(&dec.y) {
            assert!(u1.max_coeff_abs() < 1e-15);
            assert!(y.max_coeff_abs() < 1e-12);
        }
        let g = g_terms(&dec.linear[2], &dec.u1[2], &dec.y[2]).unwrap();
        assert!(g.g0.max_coeff_abs() < 1e-15);
    }

    #[test]
    fn construction_split_starts_at_zero() {
        let c = cfg(2);
        let l = experiment_lattice(&c).unwrap();
        let u0 = build_u0(&c, l).unwrap();
        let grid = TimeGrid::inflation(c.final_time(), c.window_start(), 12, DtPolicy::default()).unwrap();
        let traj = mild_solve(&u0, &c.params().unwrap(), &grid, SolveOptions::default()).unwrap();
        let dec = decompose(&traj, &c).unwrap();
        assert!(dec.y[0].is_zero());
        assert!(dec.u1[0].is_zero());
        assert_eq!(dec.first.as_ref().unwrap().resonant.len(), 2);
        let mut other = c.clone();
        other.beta = 0.4;
        assert!(decompose(&traj, &other).is_err());
    }

    #[test]
    fn zero_remainder_has_no_g1_g2() {
        let c = cfg(2);
        let l = experiment_lattice(&c).unwrap();
        let w = build_u0(&c, l).unwrap();
        let u1 = u1_closed_form(&c).unwrap().total().to_field(l, 0.01).unwrap();
        let g = g_terms(&w, &u1, &SpectralField::zeros(l)).unwrap();
        assert!(g.g1.is_zero() && g.g2.is_zero());
        assert!(linf_norm(&g.g0) > 0.0);
    }

    #[test]
    fn remainder_is_rebuilt_from_g_terms() {
        let c = cfg(2);
        let l = experiment_lattice(&c).unwrap();
        let u0 = build_u0(&c, l).unwrap();
        let quad = CompositeGauss::new(16, 8).unwrap();
        let grid = TimeGrid::new(vec![0.0, 1.0], DtPolicy::default()).unwrap();
        let rec = reconstruct_remainder(&c, &u0, 0.05, &quad, &grid).unwrap();
        assert!(linf_norm(&rec.direct) > 0.0);
        assert!(rec.relative_error < 1e-4, "{}", rec.relative_error);
    }
}
