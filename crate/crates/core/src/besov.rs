//! Homogeneous Besov norms `B^{-s}_{inf,p}` of mean-zero periodic fields.
//!
//! Two characterizations are provided:
//!
//! * Littlewood-Paley: `|| { 2^{-sq} ||Delta_q u||_inf }_q ||_{l^p}` with sharp
//!   dyadic shells `2^q <= |m| < 2^{q+1}`.
//! * heat semigroup (`p = inf` only): `sup_{t>0} t^{s/(2 alpha)} ||e^{-t(-Lap)^alpha} u||_inf`,
//!   evaluated as a maximum over a log-spaced time grid.
//!
//! Both are grid maxima and therefore lower bounds for the continuum values.
//! Sharp shells make plane-wave norms exact; the two characterizations agree
//! up to constants, which [`norm_equivalence_report`] measures.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::spectral::{apply_decay, fractional_power, linf_norm, mode_norm_sq, Lattice, SpectralField};

/// Index of the norm `B^{-s}_{inf,p}`; `alpha` selects the semigroup used by the
/// heat characterization.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovIndex {
    pub s: f64,
    pub p: f64,
    pub alpha: f64,
}

impl BesovIndex {
    pub fn new(s: f64, p: f64, alpha: f64) -> Result<Self> {
        if !(s >= 0.0) || !s.is_finite() {
            return Err(Error::InvalidParameter(format!("Besov smoothness s = {s} must be >= 0")));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidParameter(format!("Besov summability p = {p} must be >= 1")));
        }
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("semigroup exponent {alpha} must be > 0")));
        }
        Ok(Self { s, p, alpha })
    }

    /// `p = inf`.
    pub fn sup(s: f64, alpha: f64) -> Result<Self> {
        Self::new(s, f64::INFINITY, alpha)
    }

    fn time_weight(&self, t: f64) -> f64 {
        if self.s == 0.0 {
            1.0
        } else {
            t.powf(self.s / (2.0 * self.alpha))
        }
    }
}

/// A norm value plus whether a nonzero mean had to be discarded.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BesovValue {
    pub value: f64,
    pub mean_dropped: bool,
}

/// Dyadic shell `q = floor(log2 |m|)`, or `None` for the zero mode.
pub fn shell_index(m: [i64; 3]) -> Option<i32> {
    let n = mode_norm_sq(m);
    if n == 0 {
        return None;
    }
    // largest q with 4^q <= |m|^2
    let mut q = 0;
    while (4i128).pow(q as u32 + 1) <= n as i128 {
        q += 1;
    }
    Some(q)
}

/// Sharp Littlewood-Paley block: the restriction of `u` to `2^q <= |m| < 2^{q+1}`.
pub fn lp_block(u: &SpectralField, q: i32) -> SpectralField {
    let l = *u.lattice();
    let mut out = SpectralField::zeros(l);
    for idx in u.support() {
        if shell_index(l.mode(idx)) == Some(q) {
            for c in 0..3 {
                out.component_mut(c)[idx] = u.component(c)[idx];
            }
        }
    }
    out
}

/// Shells holding at least one nonzero coefficient.
pub fn occupied_shells(u: &SpectralField) -> Vec<i32> {
    let l = *u.lattice();
    let set: BTreeSet<i32> = u
        .support()
        .into_iter()
        .filter_map(|idx| shell_index(l.mode(idx)))
        .collect();
    set.into_iter().collect()
}

fn lp_combine(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    if p.is_infinite() {
        values.fold(0.0, f64::max)
    } else {
        values.map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Littlewood-Paley norm `|| 2^{-sq} ||Delta_q u||_inf ||_{l^p}`; the mean is ignored.
pub fn besov_norm_lp(u: &SpectralField, idx: &BesovIndex) -> BesovValue {
    let shells = occupied_shells(u);
    let terms = shells
        .iter()
        .map(|&q| 2f64.powf(-idx.s * q as f64) * linf_norm(&lp_block(u, q)));
    BesovValue {
        value: lp_combine(terms, idx.p),
        mean_dropped: u.has_mean(),
    }
}

/// Log-spaced evaluation times for the heat characterization.
#[derive(Clone, Debug, PartialEq)]
pub struct HeatGrid {
    times: Vec<f64>,
}

impl HeatGrid {
    pub const DEFAULT_POINTS: usize = 400;
    pub const DEFAULT_T_MAX: f64 = 10.0;

    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if times.iter().any(|t| !(*t > 0.0)) {
            return Err(Error::InvalidParameter("heat grid times must be positive".into()));
        }
        Ok(Self { times })
    }

    pub fn log_spaced(t_min: f64, t_max: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::EmptyGrid);
        }
        if !(t_min > 0.0) || !(t_max >= t_min) {
            return Err(Error::InvalidParameter(format!("bad heat grid range [{t_min}, {t_max}]")));
        }
        if points == 1 {
            return Self::new(vec![t_min]);
        }
        let (a, b) = (t_min.ln(), t_max.ln());
        let times = (0..points)
            .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
            .collect();
        Self::new(times)
    }

    /// `t_min = 0.1 |m_max|^{-2 alpha}` over the lattice, `t_max = 10`, 400 points.
    pub fn standard(lattice: &Lattice, alpha: f64) -> Self {
        Self::standard_with(lattice, alpha, Self::DEFAULT_POINTS)
    }

    pub fn standard_with(lattice: &Lattice, alpha: f64, points: usize) -> Self {
        let kmax = lattice.max_resolved_norm().max(1.0);
        let t_min = 0.1 * kmax.powf(-2.0 * alpha);
        Self::log_spaced(t_min, Self::DEFAULT_T_MAX, points.max(1)).expect("valid standard grid")
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
}

/// Heat characterization `max_{t in grid} t^{s/(2 alpha)} ||e^{-t(-Lap)^alpha} u||_inf`.
///
/// Candidate times are visited in decreasing order of the triangle-inequality
/// bound `t^{s/(2 alpha)} sum_m |u_m| e^{-|m|^{2 alpha} t}`, and the scan stops once
/// that bound falls below the best value found, so the result equals the
/// brute-force grid maximum.
pub fn besov_norm_heat(u: &SpectralField, idx: &BesovIndex, grid: &HeatGrid) -> Result<BesovValue> {
    if grid.times.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mean_dropped = u.has_mean();
    let mut field = u.clone();
    field.remove_mean();
    let l = *field.lattice();
    let support = field.support();
    if support.is_empty() {
        return Ok(BesovValue {
            value: 0.0,
            mean_dropped,
        });
    }
    let rates_sparse: Vec<(f64, f64)> = support
        .iter()
        .map(|&i| (fractional_power(mode_norm_sq(l.mode(i)), idx.alpha), field.coeff_norm(i)))
        .collect();
    let mut candidates: Vec<(f64, f64)> = grid
        .times
        .iter()
        .map(|&t| {
            let b: f64 = rates_sparse.iter().map(|(r, a)| a * (-r * t).exp()).sum();
            (idx.time_weight(t) * b, t)
        })
        .collect();
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.total_cmp(&b.1)));

    let rates: Vec<f64> = (0..l.len())
        .map(|i| fractional_power(mode_norm_sq(l.mode(i)), idx.alpha))
        .collect();
    let mut best: f64 = 0.0;
    for (bound, t) in candidates {
        if bound <= best {
            break;
        }
        let mut w = field.clone();
        apply_decay(&mut w, &rates, t);
        best = best.max(idx.time_weight(t) * linf_norm(&w));
    }
    Ok(BesovValue {
        value: best,
        mean_dropped,
    })
}

/// Exact heat-characterization value for a unit plane wave of length `|k|`:
/// `(s/(2 alpha e))^{s/(2 alpha)} |k|^{-s}`, attained at `t = s / (2 alpha |k|^{2 alpha})`.
pub fn plane_wave_heat_norm(k_len: f64, s: f64, alpha: f64) -> f64 {
    if s == 0.0 {
        return 1.0;
    }
    let e = s / (2.0 * alpha);
    (e / std::f64::consts::E).powf(e) * k_len.powf(-s)
}

/// Range of `heat / LP` ratios (`p = inf`) across a corpus of fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EquivalenceBand {
    pub c_low: f64,
    pub c_high: f64,
    pub samples: usize,
}

impl EquivalenceBand {
    pub fn contains(&self, ratio: f64, rel_tol: f64) -> bool {
        ratio >= self.c_low * (1.0 - rel_tol) && ratio <= self.c_high * (1.0 + rel_tol)
    }
}

/// Min and max of `besov_norm_heat / besov_norm_lp` over the corpus, skipping
/// fields whose LP norm vanishes.
pub fn norm_equivalence_report(corpus: &[SpectralField], idx: &BesovIndex) -> Result<EquivalenceBand> {
    if corpus.is_empty() {
        return Err(Error::InvalidParameter("empty corpus".into()));
    }
    let idx = BesovIndex::sup(idx.s, idx.alpha)?;
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut samples = 0;
    for f in corpus {
        let lp = besov_norm_lp(f, &idx).value;
        if lp == 0.0 {
            continue;
        }
        let grid = HeatGrid::standard(f.lattice(), idx.alpha);
        let heat = besov_norm_heat(f, &idx, &grid)?.value;
        let r = heat / lp;
        lo = lo.min(r);
        hi = hi.max(r);
        samples += 1;
    }
    if samples == 0 {
        return Err(Error::InvalidParameter("corpus holds only zero fields".into()));
    }
    Ok(EquivalenceBand {
        c_low: lo,
        c_high: hi,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Phase;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_wave(l: Lattice, k: [i64; 3]) -> SpectralField {
        SpectralField::plane_wave(l, k, [0.0, 1.0, 0.0], Phase::Cos, 1.0).unwrap()
    }

    #[test]
    fn shells() {
        assert_eq!(shell_index([0, 0, 0]), None);
        assert_eq!(shell_index([1, 0, 0]), Some(0));
        assert_eq!(shell_index([4, 0, 0]), Some(2));
        assert_eq!(shell_index([4, 0, 1]), Some(2));
        assert_eq!(shell_index([7, 0, 7]), Some(3));
        assert_eq!(shell_index([8, 0, 0]), Some(3));
        assert_eq!(shell_index([3, 0, 0]), Some(1));
    }

    #[test]
    fn plane_wave_lives_in_one_block() {
        let l = Lattice::new(32, 1, 8).unwrap();
        let u = unit_wave(l, [4, 0, 0]);
        assert_eq!(occupied_shells(&u), vec![2]);
        assert_eq!(lp_block(&u, 2), u);
        assert!(lp_block(&u, 1).is_zero());
        assert!(lp_block(&u, 3).is_zero());
    }

    #[test]
    fn mean_in_no_block_and_partition() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = Lattice::new(32, 1, 16).unwrap();
        let mut u = SpectralField::random(l, 10, &mut rng);
        u.set_coeff(0, [0, 0, 0], 0.3.into()).unwrap();
        let mut sum = SpectralField::zeros(l);
        for q in occupied_shells(&u) {
            sum.axpy(1.0, &lp_block(&u, q)).unwrap();
        }
        let mut mean_free = u.clone();
        mean_free.remove_mean();
        assert!(sum.max_abs_diff(&mean_free) < 1e-14);
        let v = besov_norm_lp(&u, &BesovIndex::sup(1.0, 1.0).unwrap());
        assert!(v.mean_dropped);
    }

    #[test]
    fn lp_plane_wave_values() {
        let l = Lattice::new(32, 1, 8).unwrap();
        let u = unit_wave(l, [4, 0, 0]);
        let v = besov_norm_lp(&u, &BesovIndex::sup(1.0, 1.0).unwrap());
        assert_eq!(v.value, 0.25);
        assert!(!v.mean_dropped);
        for k in [1, 3, 5, 9] {
            let w = unit_wave(l, [k, 0, 0]);
            let v0 = besov_norm_lp(&w, &BesovIndex::new(0.0, 2.0, 1.0).unwrap()).value;
            assert!((v0 - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn lp_sum_of_shells_is_r_to_one_over_p() {
        // weights 2^{s q_i} make each shell contribute exactly 1
        let l = Lattice::new(128, 1, 4).unwrap();
        let s = 0.7;
        let mut u = SpectralField::zeros(l);
        let ks = [2i64, 4, 8, 16, 32];
        for &k in &ks {
            let q = shell_index([k, 0, 0]).unwrap();
            u.add_plane_wave([k, 0, 0], [0.0, 0.0, 1.0], Phase::Cos, 2f64.powf(s * q as f64))
                .unwrap();
        }
        for p in [1.0, 2.0, 3.5] {
            let v = besov_norm_lp(&u, &BesovIndex::new(s, p, 1.0).unwrap()).value;
            let expected = (ks.len() as f64).powf(1.0 / p);
            assert!((v - expected).abs() < 1e-12, "p={p}: {v} vs {expected}");
        }
    }

    #[test]
    fn heat_plane_wave_within_one_percent() {
        let l = Lattice::new(32, 1, 8).unwrap();
        for (k, s, alpha) in [([4, 0, 0], 1.0, 1.0), ([2, 0, 1], 0.5, 1.25), ([8, 0, 0], 2.0, 1.0)] {
            let u = unit_wave(l, k);
            let idx = BesovIndex::sup(s, alpha).unwrap();
            let grid = HeatGrid::standard(&l, alpha);
            let v = besov_norm_heat(&u, &idx, &grid).unwrap().value;
            let klen = (mode_norm_sq(k) as f64).sqrt();
            let exact = plane_wave_heat_norm(klen, s, alpha);
            assert!(v <= exact * (1.0 + 1e-12));
            assert!((v - exact).abs() / exact < 0.01, "{k:?}: {v} vs {exact}");
        }
    }

    #[test]
    fn heat_zero_and_s_zero() {
        let l = Lattice::new(16, 1, 8).unwrap();
        let idx = BesovIndex::sup(0.0, 1.0).unwrap();
        let grid = HeatGrid::standard(&l, 1.0);
        assert_eq!(besov_norm_heat(&SpectralField::zeros(l), &idx, &grid).unwrap().value, 0.0);
        let u = unit_wave(l, [3, 0, 0]);
        let v = besov_norm_heat(&u, &idx, &grid).unwrap().value;
        assert!((v - linf_norm(&u) * (-9.0 * grid.times()[0]).exp()).abs() < 1e-12);
        assert!(matches!(HeatGrid::new(vec![]), Err(Error::EmptyGrid)));
        assert!(HeatGrid::log_spaced(0.0, 1.0, 4).is_err());
    }

    #[test]
    fn pruned_scan_equals_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let l = Lattice::new(24, 1, 12).unwrap();
        let u = SpectralField::random(l, 7, &mut rng);
        let idx = BesovIndex::sup(1.0, 1.0).unwrap();
        let grid = HeatGrid::standard_with(&l, 1.0, 60);
        let fast = besov_norm_heat(&u, &idx, &grid).unwrap().value;
        let p = crate::spectral::FractionalParams::with_alpha(1.0).unwrap();
        let brute = grid
            .times()
            .iter()
            .map(|&t| t.sqrt() * linf_norm(&crate::spectral::heat_semigroup(&u, t, &p).unwrap()))
            .fold(0.0, f64::max);
        assert_eq!(fast, brute);
    }

    #[test]
    fn equivalence_constant_for_scaled_plane_waves() {
        let l = Lattice::new(64, 1, 4).unwrap();
        let corpus: Vec<_> = [4, 8, 16].iter().map(|&k| unit_wave(l, [k, 0, 0])).collect();
        let band = norm_equivalence_report(&corpus, &BesovIndex::sup(1.0, 1.0).unwrap()).unwrap();
        assert_eq!(band.samples, 3);
        assert!((band.c_high - band.c_low) / band.c_low < 0.01);
        let single = norm_equivalence_report(&vec![corpus[0].clone(); 3], &BesovIndex::sup(1.0, 1.0).unwrap())
            .unwrap();
        assert_eq!(single.c_low, single.c_high);
        assert!(norm_equivalence_report(&[SpectralField::zeros(l)], &BesovIndex::sup(1.0, 1.0).unwrap())
            .is_err());
    }
}
