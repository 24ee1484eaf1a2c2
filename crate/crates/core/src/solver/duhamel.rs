use rayon::prelude::*;

use super::integrate::Trajectory;
use crate::error::{Error, Result};
use crate::oracles::Ensemble;
use crate::quadrature::CompositeGauss;
use crate::spectral::{apply_decay, heat_semigroup, linf_norm, projected_flux, rate_table, FractionalParams, Lattice, SpectralField};

/// A velocity field that can be evaluated at any requested time.
pub trait FieldPath: Sync {
    fn lattice(&self) -> Lattice;
    fn field_at(&self, t: f64) -> Result<SpectralField>;
}

/// `t -> e^{-t Lambda} u0`.
pub struct HeatPath {
    u0: SpectralField,
    params: FractionalParams,
}

impl HeatPath {
    pub fn new(u0: SpectralField, params: FractionalParams) -> Self {
        Self { u0, params }
    }
}

impl FieldPath for HeatPath {
    fn lattice(&self) -> Lattice {
        *self.u0.lattice()
    }

    fn field_at(&self, t: f64) -> Result<SpectralField> {
        heat_semigroup(&self.u0, t, &self.params)
    }
}

/// Closed-form ensemble synthesized on a fixed lattice.
pub struct EnsemblePath {
    ensemble: Ensemble,
    lattice: Lattice,
}

impl EnsemblePath {
    pub fn new(ensemble: Ensemble, lattice: Lattice) -> Self {
        Self { ensemble, lattice }
    }
}

impl FieldPath for EnsemblePath {
    fn lattice(&self) -> Lattice {
        self.lattice
    }

    fn field_at(&self, t: f64) -> Result<SpectralField> {
        self.ensemble.to_field(self.lattice, t)
    }
}

/// Arbitrary closure.
pub struct FnPath<F> {
    lattice: Lattice,
    f: F,
}

impl<F> FnPath<F>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    pub fn new(lattice: Lattice, f: F) -> Self {
        Self { lattice, f }
    }
}

impl<F> FieldPath for FnPath<F>
where
    F: Fn(f64) -> Result<SpectralField> + Sync,
{
    fn lattice(&self) -> Lattice {
        self.lattice
    }

    fn field_at(&self, t: f64) -> Result<SpectralField> {
        (self.f)(t)
    }
}

/// Recorded snapshots only; no interpolation.
impl FieldPath for Trajectory {
    fn lattice(&self) -> Lattice {
        *Trajectory::lattice(self)
    }

    fn field_at(&self, t: f64) -> Result<SpectralField> {
        self.at(t)
            .cloned()
            .ok_or_else(|| Error::InvalidParameter(format!("no snapshot recorded at t = {t}")))
    }
}

/// `B(u, v)(t) = int_0^t e^{-(t - tau) Lambda} P div(u(tau) (x) v(tau)) dtau`
/// by composite Gauss-Legendre quadrature.
pub fn bilinear_b(
    u: &dyn FieldPath,
    v: &dyn FieldPath,
    t: f64,
    params: &FractionalParams,
    quad: &CompositeGauss,
) -> Result<SpectralField> {
    let l = u.lattice();
    l.ensure_same(&v.lattice())?;
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    let mut acc = SpectralField::zeros(l);
    if t == 0.0 {
        return Ok(acc);
    }
    let rates = rate_table(&l, params);
    let same = std::ptr::eq(u as *const dyn FieldPath as *const u8, v as *const dyn FieldPath as *const u8);
    let samples: Vec<SpectralField> = quad
        .nodes(0.0, t)
        .par_iter()
        .map(|&(tau, w)| {
            let a = u.field_at(tau)?;
            let mut f = if same {
                projected_flux(&a, &a)?
            } else {
                projected_flux(&a, &v.field_at(tau)?)?
            };
            apply_decay(&mut f, &rates, t - tau);
            f.scale(w);
            Ok(f)
        })
        .collect::<Result<_>>()?;
    for f in &samples {
        acc.axpy(1.0, f)?;
    }
    Ok(acc)
}

/// `|a - b|_inf / |b|_inf` on the grid (`|a - b|_inf` when `b = 0`).
pub fn relative_linf(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let diff = linf_norm(&a.sub(b)?);
    let base = linf_norm(b);
    Ok(if base > 0.0 { diff / base } else { diff })
}

#[derive(Clone, Debug)]
pub struct QuadratureResult {
    /// Value with the doubled rule.
    pub field: SpectralField,
    /// Relative change between the rule and its doubling.
    pub change: f64,
    pub nodes: usize,
    pub converged: bool,
}

pub const QUADRATURE_TOLERANCE: f64 = 1e-8;

/// [`bilinear_b`] with `n` and `2n` nodes; converged when they agree to [`QUADRATURE_TOLERANCE`].
pub fn bilinear_b_checked(
    u: &dyn FieldPath,
    v: &dyn FieldPath,
    t: f64,
    params: &FractionalParams,
    quad: &CompositeGauss,
) -> Result<QuadratureResult> {
    let coarse = bilinear_b(u, v, t, params, quad)?;
    let fine_rule = quad.doubled();
    let field = bilinear_b(u, v, t, params, &fine_rule)?;
    let change = relative_linf(&coarse, &field)?;
    Ok(QuadratureResult {
        field,
        change,
        nodes: quad.total_nodes(),
        converged: change < QUADRATURE_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{build_u0, experiment_lattice, InflationConfig, PlaneWave};
    use crate::oracles::{pair_interaction, u1_closed_form};
    use crate::spectral::Phase;

    #[test]
    fn zero_time_is_zero() {
        let l = Lattice::new(8, 1, 8).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let u0 = SpectralField::plane_wave(l, [1, 0, 0], [0.0, 0.0, 1.0], Phase::Cos, 1.0).unwrap();
        let h = HeatPath::new(u0, p);
        let q = CompositeGauss::with_total_nodes(64).unwrap();
        assert!(bilinear_b(&h, &h, 0.0, &p, &q).unwrap().is_zero());
        assert!(bilinear_b(&h, &h, -1.0, &p, &q).is_err());
    }

    #[test]
    fn two_waves_match_pair_oracle() {
        let l = Lattice::new(32, 1, 16).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let w1 = PlaneWave::new([2, 0, 0], [0.0, 0.0, 1.0], Phase::Cos).unwrap();
        let w2 = PlaneWave::new([3, 0, 1], [0.0, 1.0, 0.0], Phase::Cos).unwrap();
        // amplitude 1/2 on w1 gives k2 . v1 = 1/2
        let a = HeatPath::new(w1.to_field(l, 0.5).unwrap(), p);
        let b = HeatPath::new(w2.to_field(l, 1.0).unwrap(), p);
        let q = CompositeGauss::with_total_nodes(64).unwrap();
        let oracle = pair_interaction(&w1, &w2, &p).unwrap();
        for t in [1e-3, 1e-2, 1e-1] {
            let num = bilinear_b(&a, &b, t, &p, &q).unwrap();
            let exact = oracle.to_field(l, t).unwrap().scaled(0.5);
            assert!(relative_linf(&num, &exact).unwrap() < 1e-8, "{t}");
        }
    }

    #[test]
    fn construction_matches_closed_form() {
        let cfg = InflationConfig::default_point(2, 1.0, 0.4, f64::INFINITY).0.with_k(4);
        let l = experiment_lattice(&cfg).unwrap();
        let p = cfg.params().unwrap();
        let h = HeatPath::new(build_u0(&cfg, l).unwrap(), p);
        let q = CompositeGauss::with_total_nodes(64).unwrap();
        let u1 = u1_closed_form(&cfg).unwrap().total();
        for t in [1e-3, 1e-2, 1e-1] {
            let res = bilinear_b_checked(&h, &h, t, &p, &q).unwrap();
            let exact = u1.to_field(l, t).unwrap();
            assert!(relative_linf(&res.field, &exact).unwrap() < 1e-6, "{t}");
        }
    }

    #[test]
    fn trajectory_path_requires_recorded_times() {
        let l = Lattice::new(8, 1, 8).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let u0 = SpectralField::plane_wave(l, [1, 0, 0], [0.0, 0.0, 1.0], Phase::Cos, 1.0).unwrap();
        let grid = crate::solver::TimeGrid::uniform(1.0, 4, Default::default()).unwrap();
        let traj = crate::solver::mild_solve(&u0, &p, &grid, Default::default()).unwrap();
        assert!(traj.field_at(0.25).is_ok());
        assert!(traj.field_at(0.3).is_err());
    }
}
