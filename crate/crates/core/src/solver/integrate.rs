use crate::error::{Error, Result};
use crate::spectral::{divergence, linf_norm, projected_flux, rate_table, FractionalParams, Lattice, SpectralField};

/// How the step size is chosen between snapshots.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    Fixed(f64),
    /// `dt = min(courant / (|u|_inf max|m|), t_final / min_steps)`, re-evaluated every step.
    Cfl { courant: f64, min_steps: usize },
}

impl Default for DtPolicy {
    fn default() -> Self {
        DtPolicy::Cfl {
            courant: 0.5,
            min_steps: 200,
        }
    }
}

/// Snapshot times (starting at 0, strictly increasing) plus the step policy.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid {
    snapshots: Vec<f64>,
    policy: DtPolicy,
}

fn merge_times(mut times: Vec<f64>) -> Vec<f64> {
    times.sort_by(f64::total_cmp);
    let scale = times.last().copied().unwrap_or(0.0).max(f64::MIN_POSITIVE);
    let mut out: Vec<f64> = Vec::with_capacity(times.len());
    for t in times {
        match out.last() {
            Some(&last) if t - last <= 1e-12 * scale => {}
            _ => out.push(t),
        }
    }
    out
}

impl TimeGrid {
    pub fn new(snapshots: Vec<f64>, policy: DtPolicy) -> Result<Self> {
        if snapshots.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if snapshots[0] != 0.0 {
            return Err(Error::InvalidParameter("time grid must start at t = 0".into()));
        }
        if snapshots.iter().any(|t| !t.is_finite()) || snapshots.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("snapshot times must be finite and strictly increasing".into()));
        }
        match policy {
            DtPolicy::Fixed(dt) if !(dt > 0.0) => {
                return Err(Error::InvalidParameter(format!("fixed dt must be positive, got {dt}")))
            }
            DtPolicy::Cfl { courant, min_steps } if !(courant > 0.0) || min_steps == 0 => {
                return Err(Error::InvalidParameter("CFL policy needs courant > 0 and min_steps >= 1".into()))
            }
            _ => {}
        }
        Ok(Self { snapshots, policy })
    }

    /// `count + 1` equally spaced snapshots on `[0, t_final]`.
    pub fn uniform(t_final: f64, count: usize, policy: DtPolicy) -> Result<Self> {
        if !(t_final > 0.0) || count == 0 {
            return Err(Error::InvalidParameter(format!("uniform grid needs t_final > 0 and count >= 1, got {t_final}, {count}")));
        }
        Self::new((0..=count).map(|i| t_final * i as f64 / count as f64).collect(), policy)
    }

    /// About `count` snapshots: two thirds log-spaced from `window_start / 8`
    /// to `t_final`, the rest linear, plus `0`, `window_start` and `t_final`.
    pub fn inflation(t_final: f64, window_start: f64, count: usize, policy: DtPolicy) -> Result<Self> {
        if !(t_final > 0.0) || !(window_start > 0.0) || count < 4 {
            return Err(Error::InvalidParameter(format!(
                "inflation schedule needs t_final > 0, window_start > 0, count >= 4; got {t_final}, {window_start}, {count}"
            )));
        }
        let n_log = 2 * count / 3;
        let n_lin = count - n_log;
        let lo = window_start.min(t_final) / 8.0;
        let ratio = (t_final / lo).ln();
        let mut times = vec![0.0, t_final];
        if window_start < t_final {
            times.push(window_start);
        }
        let anchors = times.clone();
        let near_anchor = |t: &f64| anchors.iter().any(|a| (t - a).abs() <= 1e-9 * t_final);
        times.extend((0..n_log).map(|i| lo * (ratio * i as f64 / (n_log - 1) as f64).exp()).filter(|t| !near_anchor(t)));
        times.extend((1..n_lin).map(|i| t_final * i as f64 / n_lin as f64).filter(|t| !near_anchor(t)));
        Self::new(merge_times(times), policy)
    }

    /// The same grid with extra snapshot times merged in (all must lie in `[0, t_final]`).
    pub fn with_times(&self, extra: &[f64]) -> Result<Self> {
        let tf = self.t_final();
        if extra.iter().any(|&t| !(0.0..=tf).contains(&t)) {
            return Err(Error::InvalidParameter("extra snapshot outside [0, t_final]".into()));
        }
        let mut times = self.snapshots.clone();
        times.extend_from_slice(extra);
        Self::new(merge_times(times), self.policy)
    }

    pub fn snapshots(&self) -> &[f64] {
        &self.snapshots
    }

    pub fn t_final(&self) -> f64 {
        *self.snapshots.last().expect("grid is nonempty")
    }

    pub fn policy(&self) -> DtPolicy {
        self.policy
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// Abort when `|u|_inf` exceeds this.
    pub blowup_ceiling: f64,
    /// Switch the nonlinearity off (pure heat flow through the same integrator).
    pub nonlinear: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            blowup_ceiling: 1e6,
            nonlinear: true,
        }
    }
}

/// Snapshots of a solution.
#[derive(Clone, Debug)]
pub struct Trajectory {
    lattice: Lattice,
    params: FractionalParams,
    times: Vec<f64>,
    fields: Vec<SpectralField>,
    steps: usize,
    max_divergence: f64,
    warnings: Vec<String>,
}

impl Trajectory {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn params(&self) -> &FractionalParams {
        &self.params
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn fields(&self) -> &[SpectralField] {
        &self.fields
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    /// Largest `|div u|_inf` over the snapshots.
    pub fn max_divergence(&self) -> f64 {
        self.max_divergence
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        let tol = 1e-12 * t.abs().max(1e-300) + 1e-300;
        let i = self.times.partition_point(|&s| s < t - tol);
        (i < self.times.len() && (self.times[i] - t).abs() <= tol).then_some(i)
    }

    /// Snapshot at exactly `t`, if recorded.
    pub fn at(&self, t: f64) -> Option<&SpectralField> {
        self.index_of(t).map(|i| &self.fields[i])
    }

    pub fn initial(&self) -> &SpectralField {
        &self.fields[0]
    }

    pub fn last(&self) -> (f64, &SpectralField) {
        let i = self.times.len() - 1;
        (self.times[i], &self.fields[i])
    }
}

fn scale_by(u: &mut SpectralField, factors: &[f64]) {
    for comp in u.components_mut() {
        for (c, f) in comp.iter_mut().zip(factors) {
            *c *= *f;
        }
    }
}

/// `a + s * b` into a fresh field (lattices already known to agree).
fn combine(a: &SpectralField, s: f64, b: &SpectralField) -> SpectralField {
    let mut out = a.clone();
    for (oc, bc) in out.components_mut().iter_mut().zip(b.components()) {
        for (o, x) in oc.iter_mut().zip(bc) {
            *o += *x * s;
        }
    }
    out
}

struct Stepper<'a> {
    rates: &'a [f64],
    nonlinear: bool,
    half: Vec<f64>,
    h: f64,
}

impl<'a> Stepper<'a> {
    fn tendency(&self, u: &SpectralField) -> Result<SpectralField> {
        if !self.nonlinear {
            return Ok(SpectralField::zeros(*u.lattice()));
        }
        let mut f = projected_flux(u, u)?;
        f.scale(-1.0);
        Ok(f)
    }

    fn set_step(&mut self, h: f64) {
        if h == self.h {
            return;
        }
        self.h = h;
        self.half = self.rates.iter().map(|r| (-r * h / 2.0).exp()).collect();
    }

    /// Integrating-factor RK4: the linear part is propagated exactly.
    fn step(&self, u: &SpectralField) -> Result<SpectralField> {
        let h = self.h;
        let k1 = self.tendency(u)?;
        let mut a = combine(u, h / 2.0, &k1);
        scale_by(&mut a, &self.half);
        let k2 = self.tendency(&a)?;
        let mut eu = u.clone();
        scale_by(&mut eu, &self.half);
        let b = combine(&eu, h / 2.0, &k2);
        let k3 = self.tendency(&b)?;
        let mut ek3 = k3.clone();
        scale_by(&mut ek3, &self.half);
        let mut e2u = eu.clone();
        scale_by(&mut e2u, &self.half);
        let c = combine(&e2u, h, &ek3);
        let k4 = self.tendency(&c)?;

        // E [ E (u + h/6 k1) + h/3 (k2 + k3) ] + h/6 k4
        let mut inner = combine(u, h / 6.0, &k1);
        scale_by(&mut inner, &self.half);
        let inner = combine(&combine(&inner, h / 3.0, &k2), h / 3.0, &k3);
        let mut out = inner;
        scale_by(&mut out, &self.half);
        Ok(combine(&out, h / 6.0, &k4))
    }
}

fn retained_max_norm(l: &Lattice) -> f64 {
    (0..3)
        .map(|a| {
            let c = if l.dims()[a] > 1 { l.dealias_cutoff(a) as f64 } else { 0.0 };
            c * c
        })
        .sum::<f64>()
        .sqrt()
}

/// Evolve `u0` through every snapshot of `grid`. Steps end exactly on
/// snapshot times; `|u|_inf` above the ceiling aborts with [`Error::BlowUp`].
pub fn mild_solve(u0: &SpectralField, params: &FractionalParams, grid: &TimeGrid, opts: SolveOptions) -> Result<Trajectory> {
    let l = *u0.lattice();
    let scale = u0.max_coeff_abs().max(1.0);
    let div0 = divergence(u0).linf_norm();
    if div0 > 1e-10 * scale * retained_max_norm(&l).max(1.0) {
        return Err(Error::NotDivergenceFree(div0));
    }
    let rates = rate_table(&l, params);
    let mmax = retained_max_norm(&l).max(1.0);
    let t_final = grid.t_final();
    let mut warnings = Vec::new();
    if u0.dealias_leak() > 0.0 {
        warnings.push("initial data has modes outside the dealias band".to_string());
    }
    let mut stepper = Stepper {
        rates: &rates,
        nonlinear: opts.nonlinear,
        half: Vec::new(),
        h: f64::NAN,
    };

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut sup = linf_norm(&u);
    let mut steps = 0usize;
    let mut times = vec![0.0];
    let mut fields = vec![u.clone()];
    let mut max_div = div0;
    let mut warned_cfl = false;

    for &target in &grid.snapshots()[1..] {
        while t < target {
            let cfl = if sup > 0.0 { opts_cfl(grid.policy(), sup, mmax) } else { f64::INFINITY };
            let mut h = match grid.policy() {
                DtPolicy::Fixed(dt) => {
                    if dt > cfl && !warned_cfl {
                        warnings.push(format!("fixed dt {dt:e} exceeds the CFL bound {cfl:e} at t = {t}"));
                        warned_cfl = true;
                    }
                    dt
                }
                DtPolicy::Cfl { min_steps, .. } => cfl.min(t_final / min_steps as f64),
            };
            let remaining = target - t;
            if h >= remaining * (1.0 - 1e-12) {
                h = remaining;
            }
            stepper.set_step(h);
            u = stepper.step(&u)?;
            steps += 1;
            t = if h == remaining { target } else { t + h };
            if opts.nonlinear {
                sup = linf_norm(&u);
            }
            if !sup.is_finite() || sup > opts.blowup_ceiling {
                return Err(Error::BlowUp { t, norm: sup });
            }
        }
        max_div = max_div.max(divergence(&u).linf_norm());
        times.push(target);
        fields.push(u.clone());
    }
    Ok(Trajectory {
        lattice: l,
        params: *params,
        times,
        fields,
        steps,
        max_divergence: max_div,
        warnings,
    })
}

fn opts_cfl(policy: DtPolicy, sup: f64, mmax: f64) -> f64 {
    let courant = match policy {
        DtPolicy::Cfl { courant, .. } => courant,
        DtPolicy::Fixed(_) => 0.5,
    };
    courant / (sup * mmax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{heat_semigroup, Phase};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_validation() {
        assert!(TimeGrid::new(vec![], DtPolicy::default()).is_err());
        assert!(TimeGrid::new(vec![0.1, 0.2], DtPolicy::default()).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.2, 0.2], DtPolicy::default()).is_err());
        assert!(TimeGrid::new(vec![0.0, 0.2], DtPolicy::Fixed(0.0)).is_err());
        let g = TimeGrid::inflation(0.5, 1.0 / 16.0, 50, DtPolicy::default()).unwrap();
        assert_eq!(g.snapshots()[0], 0.0);
        assert_eq!(g.t_final(), 0.5);
        assert!(g.snapshots().contains(&(1.0 / 16.0)));
        assert!((45..=53).contains(&g.snapshots().len()));
        let g2 = g.with_times(&[0.123, 0.5]).unwrap();
        assert_eq!(g2.snapshots().len(), g.snapshots().len() + 1);
        assert!(g.with_times(&[0.6]).is_err());
    }

    #[test]
    fn plane_wave_is_exact() {
        let l = Lattice::new(32, 1, 32).unwrap();
        for alpha in [1.0, 1.25] {
            let p = FractionalParams::new(alpha, 1.0).unwrap();
            let u0 = SpectralField::plane_wave(l, [2, 0, 0], [0.0, 0.0, 1.0], Phase::Cos, 1.0).unwrap();
            let grid = TimeGrid::uniform(1.0, 10, DtPolicy::default()).unwrap();
            let traj = mild_solve(&u0, &p, &grid, SolveOptions::default()).unwrap();
            for (t, u) in traj.times().iter().zip(traj.fields()) {
                let exact = (-(4f64).powf(alpha) * t).exp();
                let err = (linf_norm(u) - exact).abs() / exact;
                assert!(err < 1e-10, "alpha {alpha} t {t}: {err}");
                assert!(u.max_abs_diff(&u0.scaled(exact)) < 1e-12 * exact.max(1e-300));
            }
        }
    }

    #[test]
    fn zero_data_stays_zero() {
        let l = Lattice::new(8, 1, 8).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(1.0, 4, DtPolicy::default()).unwrap();
        let traj = mild_solve(&SpectralField::zeros(l), &p, &grid, SolveOptions::default()).unwrap();
        assert!(traj.fields().iter().all(|u| u.is_zero()));
    }

    fn random_solenoidal(l: Lattice, seed: u64, amp: f64) -> SpectralField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = crate::spectral::leray_project(&SpectralField::random(l, 3, &mut rng));
        u.dealias();
        let s = amp / linf_norm(&u);
        u.scaled(s)
    }

    #[test]
    fn linear_mode_equals_heat_semigroup() {
        let l = Lattice::new(16, 8, 16).unwrap();
        let u0 = random_solenoidal(l, 3, 5.0);
        let p = FractionalParams::new(1.25, 0.7).unwrap();
        let grid = TimeGrid::uniform(0.3, 3, DtPolicy::Fixed(0.01)).unwrap();
        let opts = SolveOptions { nonlinear: false, ..Default::default() };
        let traj = mild_solve(&u0, &p, &grid, opts).unwrap();
        for (t, u) in traj.times().iter().zip(traj.fields()) {
            let h = heat_semigroup(&u0, *t, &p).unwrap();
            assert!(u.max_abs_diff(&h) < 1e-15, "{t}");
        }
    }

    #[test]
    fn fourth_order_self_convergence() {
        let l = Lattice::new(16, 1, 16).unwrap();
        let u0 = random_solenoidal(l, 11, 3.0);
        let p = FractionalParams::new(1.0, 0.05).unwrap();
        let grid = |dt| TimeGrid::new(vec![0.0, 0.4], DtPolicy::Fixed(dt)).unwrap();
        let run = |dt| mild_solve(&u0, &p, &grid(dt), SolveOptions::default()).unwrap().last().1.clone();
        let a = run(0.02);
        let b = run(0.01);
        let c = run(0.005);
        let e1 = linf_norm(&a.sub(&b).unwrap());
        let e2 = linf_norm(&b.sub(&c).unwrap());
        let order = (e1 / e2).log2();
        assert!((3.6..4.6).contains(&order), "observed order {order} ({e1:e}, {e2:e})");
    }

    #[test]
    fn energy_decreases_and_divergence_stays_zero() {
        let l = Lattice::new(16, 8, 16).unwrap();
        let u0 = random_solenoidal(l, 5, 4.0);
        let p = FractionalParams::new(1.0, 0.1).unwrap();
        let grid = TimeGrid::uniform(0.5, 20, DtPolicy::default()).unwrap();
        let traj = mild_solve(&u0, &p, &grid, SolveOptions::default()).unwrap();
        let e: Vec<f64> = traj.fields().iter().map(|u| u.l2_norm()).collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-13)));
        assert!(traj.max_divergence() < 1e-10);
        assert!(traj.fields().iter().all(|u| u.hermitian_defect() < 1e-12));
    }

    #[test]
    fn blow_up_guard_trips() {
        let l = Lattice::new(16, 1, 16).unwrap();
        let u0 = random_solenoidal(l, 7, 3.0);
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(0.1, 2, DtPolicy::default()).unwrap();
        let opts = SolveOptions { blowup_ceiling: 1.0, ..Default::default() };
        assert!(matches!(mild_solve(&u0, &p, &grid, opts), Err(Error::BlowUp { .. })));
    }

    #[test]
    fn rejects_compressible_data() {
        let l = Lattice::new(8, 1, 8).unwrap();
        let u0 = SpectralField::plane_wave(l, [1, 0, 0], [1.0, 0.0, 0.0], Phase::Cos, 1.0).unwrap();
        let p = FractionalParams::new(1.0, 1.0).unwrap();
        let grid = TimeGrid::uniform(0.1, 2, DtPolicy::default()).unwrap();
        assert!(matches!(mild_solve(&u0, &p, &grid, SolveOptions::default()), Err(Error::NotDivergenceFree(_))));
    }

    /// `u_l(x, t) = l^{2a-1} u(l x, l^{2a} t)` with `l = 2`.
    #[test]
    fn scaling_symmetry() {
        let alpha = 1.0;
        let p = FractionalParams::new(alpha, 1.0).unwrap();
        let l = Lattice::new(12, 1, 12).unwrap();
        let u0 = random_solenoidal(l, 21, 6.0);
        let l2 = Lattice::new(24, 1, 24).unwrap();
        let mut v0 = SpectralField::zeros(l2);
        let lam = 2f64.powf(2.0 * alpha - 1.0);
        for idx in u0.support() {
            let m = l.mode(idx);
            for c in 0..3 {
                v0.set_coeff(c, [2 * m[0], 2 * m[1], 2 * m[2]], u0.component(c)[idx] * lam).unwrap();
            }
        }
        let t = 0.2;
        let ts = t / 2f64.powf(2.0 * alpha);
        let a = mild_solve(&u0, &p, &TimeGrid::new(vec![0.0, t], DtPolicy::Fixed(t / 400.0)).unwrap(), SolveOptions::default())
            .unwrap();
        let b = mild_solve(&v0, &p, &TimeGrid::new(vec![0.0, ts], DtPolicy::Fixed(ts / 400.0)).unwrap(), SolveOptions::default())
            .unwrap();
        let (_, ua) = a.last();
        let (_, ub) = b.last();
        let mut worst: f64 = 0.0;
        for idx in ua.support() {
            let m = l.mode(idx);
            for c in 0..3 {
                let lhs = ub.coeff(c, [2 * m[0], 2 * m[1], 2 * m[2]]);
                worst = worst.max((lhs - ua.component(c)[idx] * lam).norm());
            }
        }
        assert!(worst < 1e-12 * ua.max_coeff_abs() * lam, "{worst:e}");
        assert!((linf_norm(ub) - lam * linf_norm(ua)).abs() < 1e-10 * linf_norm(ub));
    }
}
