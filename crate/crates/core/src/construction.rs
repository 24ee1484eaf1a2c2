//! Norm-inflation initial data
//!
//! ```text
//! u0 = r^{-beta} sum_{i=1..r} |k_i|^alpha ( v cos(k_i.x) + v' cos(k'_i.x) )
//! k_i = 2^{i-1} K (1,0,0),   k'_i = k_i + (0,0,1),   v = (0,0,1),   v' = (0,1,0)
//! ```
//!
//! and the admissibility constraints tying `(alpha, beta, gamma, zeta, p)` to the
//! final time `T = r^{-gamma}` and base frequency `K = round(r^zeta)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::spectral::{mode_dot, Lattice, Mode, Phase, SpectralField, FractionalParams};

/// Direction of the lacunary wave vectors.
pub const ZETA: Mode = [1, 0, 0];
/// Offset between paired wave vectors; also the mode that carries the inflation.
pub const ETA: Mode = [0, 0, 1];
/// Amplitude of the `k_i` waves.
pub const V: [f64; 3] = [0.0, 0.0, 1.0];
/// Amplitude of the `k'_i` waves.
pub const V_PRIME: [f64; 3] = [0.0, 1.0, 0.0];

/// Real divergence-free atom `v phase(k.x)` with `|v| = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlaneWave {
    pub k: Mode,
    pub v: [f64; 3],
    pub phase: Phase,
}

impl PlaneWave {
    pub fn new(k: Mode, v: [f64; 3], phase: Phase) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("amplitude {v:?} is not a unit vector")));
        }
        let dot = mode_dot(k, v);
        if dot.abs() > 1e-12 {
            return Err(Error::NotDivergenceFree(dot));
        }
        Ok(Self { k, v, phase })
    }

    pub fn to_field(&self, lattice: Lattice, amplitude: f64) -> Result<SpectralField> {
        SpectralField::plane_wave(lattice, self.k, self.v, self.phase, amplitude)
    }
}

/// Deliberate construction faults used to check that the lemma suite can tell
/// a broken construction from a correct one.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Fault {
    #[default]
    None,
    /// Flip the sign of the resonant (eta-mode) interaction term.
    FlipE0Sign,
    /// Drop the `|k_i|^alpha` amplitude weights.
    DropWeights,
}

/// Parameters of the construction.
#[derive(Clone, Debug, PartialEq)]
pub struct InflationConfig {
    pub alpha: f64,
    pub nu: f64,
    /// Number of wave pairs.
    pub r: u32,
    /// Fixed base frequency instead of `round(r^zeta)`.
    pub k_override: Option<u64>,
    pub beta: f64,
    pub gamma: f64,
    pub zeta: f64,
    /// Index of the measured norm `B^{-s}_{inf,inf}`.
    pub s: f64,
    /// Summability of the initial-data norm `B^{-alpha}_{inf,p}`.
    pub p: f64,
    pub t_final_override: Option<f64>,
}

/// Lower bound on `gamma`: `(1 - 2 beta) / (1 - 1/(2 alpha))`.
pub fn gamma_lower_bound(alpha: f64, beta: f64) -> f64 {
    (1.0 - 2.0 * beta) / (1.0 - 1.0 / (2.0 * alpha))
}

/// Upper bound on `zeta`: `(1 - beta) / alpha`.
pub fn zeta_upper_bound(alpha: f64, beta: f64) -> f64 {
    (1.0 - beta) / alpha
}

impl InflationConfig {
    /// Default experiment point: `zeta` midway in `(0, (1-beta)/alpha)` and
    /// `gamma` midway between its lower bound and `2 alpha zeta`. For finite `p`
    /// `beta` is raised to `(1 + 1/p)/3 + 0.01` when needed; the returned
    /// strings describe such adjustments.
    pub fn default_point(r: u32, alpha: f64, beta: f64, p: f64) -> (Self, Vec<String>) {
        let mut warnings = Vec::new();
        let mut beta = beta;
        if p.is_finite() {
            let min_beta = (1.0 + 1.0 / p) / 3.0 + 0.01;
            if beta < min_beta {
                warnings.push(format!(
                    "beta raised from {beta} to {min_beta:.6} so that 3 beta >= 1 + 1/p (p = {p})"
                ));
                beta = min_beta;
            }
        }
        let zeta = 0.5 * zeta_upper_bound(alpha, beta);
        let gamma = 0.5 * (gamma_lower_bound(alpha, beta) + 2.0 * alpha * zeta);
        (
            Self {
                alpha,
                nu: 1.0,
                r,
                k_override: None,
                beta,
                gamma,
                zeta,
                s: 1.0,
                p,
                t_final_override: None,
            },
            warnings,
        )
    }

    pub fn with_k(mut self, k: u64) -> Self {
        self.k_override = Some(k);
        self
    }

    pub fn params(&self) -> Result<FractionalParams> {
        FractionalParams::new(self.alpha, self.nu)
    }

    /// `K = round(r^zeta)` clamped to `>= 1`, unless overridden.
    pub fn base_frequency(&self) -> u64 {
        self.k_override
            .unwrap_or_else(|| (self.r as f64).powf(self.zeta).round().max(1.0) as u64)
    }

    /// `T = r^{-gamma}`, unless overridden.
    pub fn final_time(&self) -> f64 {
        self.t_final_override
            .unwrap_or_else(|| (self.r as f64).powf(-self.gamma))
    }

    /// Start of the inflation window `K^{-2 alpha}`.
    pub fn window_start(&self) -> f64 {
        (self.base_frequency() as f64).powf(-2.0 * self.alpha)
    }

    pub fn wave_pairs(&self) -> Result<Vec<WavePair>> {
        wave_vectors(self.r, self.base_frequency())
    }

    /// `B = r^{beta-1} K^alpha + r^{-beta} T^{1/2 - 1/(2alpha)} + r^{1-2beta} T^{1 - 1/(2alpha)}`.
    pub fn b_value(&self) -> f64 {
        let r = self.r as f64;
        let k = self.base_frequency() as f64;
        let t = self.final_time();
        let h = 0.5 - 1.0 / (2.0 * self.alpha);
        let o = 1.0 - 1.0 / (2.0 * self.alpha);
        r.powf(self.beta - 1.0) * k.powf(self.alpha)
            + r.powf(-self.beta) * t.powf(h)
            + r.powf(1.0 - 2.0 * self.beta) * t.powf(o)
    }

    /// Absorption quantity `A` evaluated at `t`.
    pub fn a_value(&self, t: f64) -> f64 {
        let r = self.r as f64;
        let h = 0.5 - 1.0 / (2.0 * self.alpha);
        let o = 1.0 - 1.0 / (2.0 * self.alpha);
        r.powf(-self.beta) * t.powf(h)
            + r.powf(1.0 - 2.0 * self.beta) * t.powf(o)
            + t.powf(o) * y_bound_shape(r, self.beta, self.alpha, t)
    }
}

/// `r^{1-3beta} t^{1/2-1/(2alpha)} + r^{2-4beta} t^{1-1/(2alpha)}`: the shape of the remainder bound.
pub fn y_bound_shape(r: f64, beta: f64, alpha: f64, t: f64) -> f64 {
    r.powf(1.0 - 3.0 * beta) * t.powf(0.5 - 1.0 / (2.0 * alpha))
        + r.powf(2.0 - 4.0 * beta) * t.powf(1.0 - 1.0 / (2.0 * alpha))
}

/// `(k_i, k'_i)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WavePair {
    pub k: Mode,
    pub k_prime: Mode,
}

/// `k_i = 2^{i-1} K zeta`, `k'_i = k_i + eta` for `i = 1..r`.
pub fn wave_vectors(r: u32, k_base: u64) -> Result<Vec<WavePair>> {
    if r == 0 || k_base == 0 {
        return Err(Error::InvalidParameter(format!("need r >= 1 and K >= 1, got r={r}, K={k_base}")));
    }
    (0..r)
        .map(|i| {
            let mag = 1i64
                .checked_shl(i)
                .filter(|v| *v > 0)
                .and_then(|p| p.checked_mul(k_base as i64))
                .filter(|v| *v < i64::MAX / 4)
                .ok_or_else(|| Error::InvalidParameter(format!("|k_{}| = 2^{i} K overflows", i + 1)))?;
            let k = [mag * ZETA[0], mag * ZETA[1], mag * ZETA[2]];
            Ok(WavePair {
                k,
                k_prime: [k[0] + ETA[0], k[1] + ETA[1], k[2] + ETA[2]],
            })
        })
        .collect()
}

fn mode_len(m: Mode) -> f64 {
    (crate::spectral::mode_norm_sq(m) as f64).sqrt()
}

/// Amplitude weight `r^{-beta} |k_i|^alpha` shared by both waves of pair `i`.
pub fn pair_weight(cfg: &InflationConfig, pair: &WavePair, fault: Fault) -> f64 {
    let rb = (cfg.r as f64).powf(-cfg.beta);
    match fault {
        Fault::DropWeights => rb,
        _ => rb * mode_len(pair.k).powf(cfg.alpha),
    }
}

/// The `2r` weighted atoms of `u0`.
pub fn initial_waves(cfg: &InflationConfig, fault: Fault) -> Result<Vec<(f64, PlaneWave)>> {
    let mut out = Vec::with_capacity(2 * cfg.r as usize);
    for pair in cfg.wave_pairs()? {
        let w = pair_weight(cfg, &pair, fault);
        out.push((w, PlaneWave::new(pair.k, V, Phase::Cos)?));
        out.push((w, PlaneWave::new(pair.k_prime, V_PRIME, Phase::Cos)?));
    }
    Ok(out)
}

/// Synthesize `u0` on `lattice`. Every `k_i` and `k'_i` must be resolved.
pub fn build_u0(cfg: &InflationConfig, lattice: Lattice) -> Result<SpectralField> {
    build_u0_with_fault(cfg, lattice, Fault::None)
}

pub fn build_u0_with_fault(cfg: &InflationConfig, lattice: Lattice, fault: Fault) -> Result<SpectralField> {
    let mut u = SpectralField::zeros(lattice);
    for (w, wave) in initial_waves(cfg, fault)? {
        u.add_plane_wave(wave.k, wave.v, wave.phase, w)?;
    }
    Ok(u)
}

/// Lattice whose dealias band holds every first-generation interaction
/// frequency (`|m_1| <= 2^r K`) and `|m_3| <= 5` for later generations.
pub fn experiment_lattice(cfg: &InflationConfig) -> Result<Lattice> {
    let top = cfg.wave_pairs()?.last().map(|p| p.k[0]).unwrap_or(0);
    Lattice::sized_for([2 * top, 0, 5])
}

/// Smallest lattice that merely represents `u0` (no room for products).
pub fn data_lattice(cfg: &InflationConfig) -> Result<Lattice> {
    let top = cfg.wave_pairs()?.last().map(|p| p.k[0]).unwrap_or(0);
    let n1 = smooth_at_least(2 * top as usize + 1);
    Lattice::new(n1, 1, 3)?.with_dealias(1, 1)
}

fn smooth_at_least(n: usize) -> usize {
    (n..)
        .find(|&m| {
            let mut x = m;
            for p in [2, 3, 5] {
                while x % p == 0 {
                    x /= p;
                }
            }
            x == 1
        })
        .expect("5-smooth numbers are unbounded")
}

/// One evaluated admissibility condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintCheck {
    pub name: &'static str,
    pub satisfied: bool,
    /// Signed slack; positive when satisfied.
    pub margin: f64,
    /// Hard constraints gate experiment runs; soft ones are reported only.
    pub hard: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstraintReport {
    pub checks: Vec<ConstraintCheck>,
    pub b_value: f64,
    pub b_certified: bool,
    /// `A` at `t = T`.
    pub a_value: f64,
    pub k_base: u64,
    pub t_final: f64,
}

impl ConstraintReport {
    pub fn admissible(&self) -> bool {
        self.checks.iter().filter(|c| c.hard).all(|c| c.satisfied)
    }

    pub fn violations(&self) -> Vec<&ConstraintCheck> {
        self.checks.iter().filter(|c| c.hard && !c.satisfied).collect()
    }

    pub fn check(&self, name: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ConstraintReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "K = {}, T = {:.6}", self.k_base, self.t_final)?;
        for c in &self.checks {
            writeln!(
                f,
                "  [{}] {:<28} margin {:+.6}{}",
                if c.satisfied { " ok " } else { "FAIL" },
                c.name,
                c.margin,
                if c.hard { "" } else { "  (soft)" }
            )?;
        }
        writeln!(
            f,
            "  B = {:.6} ({}), A(T) = {:.6}",
            self.b_value,
            if self.b_certified { "B <= 1/4" } else { "B > 1/4, floor not certified" },
            self.a_value
        )
    }
}

fn check(name: &'static str, margin: f64, strict: bool, hard: bool) -> ConstraintCheck {
    let satisfied = if strict { margin > 0.0 } else { margin >= 0.0 };
    ConstraintCheck {
        name,
        satisfied,
        margin,
        hard,
    }
}

/// Evaluate every admissibility condition with its numeric slack.
pub fn validate_parameters(cfg: &InflationConfig) -> ConstraintReport {
    let a = cfg.alpha;
    let b = cfg.beta;
    let k = cfg.base_frequency();
    let t = cfg.final_time();
    let p_margin = if cfg.p.is_infinite() { f64::INFINITY } else { cfg.p - 2.0 };
    let inv_p = if cfg.p.is_infinite() { 0.0 } else { 1.0 / cfg.p };
    let checks = vec![
        check("alpha >= 1", a - 1.0, false, true),
        check("nu > 0", cfg.nu, true, true),
        check("r >= 1", cfg.r as f64 - 1.0, false, true),
        check("0 < beta < 1/2", b.min(0.5 - b), true, true),
        check("s > 0", cfg.s, true, true),
        check("2 < p <= inf", p_margin, true, true),
        check("gamma > gamma_min", cfg.gamma - gamma_lower_bound(a, b), true, true),
        check("0 < zeta < (1-beta)/alpha", cfg.zeta.min(zeta_upper_bound(a, b) - cfg.zeta), true, true),
        check("gamma < 2 alpha zeta", 2.0 * a * cfg.zeta - cfg.gamma, true, true),
        check("K >= 1", k as f64 - 1.0, false, true),
        check("K^{-2alpha} < T", t - (k as f64).powf(-2.0 * a), true, true),
        check("3 beta >= 1 + 1/p", 3.0 * b - 1.0 - inv_p, false, true),
        check("B <= 1/4", 0.25 - cfg.b_value(), false, false),
    ];
    let b_value = cfg.b_value();
    ConstraintReport {
        checks,
        b_value,
        b_certified: b_value <= 0.25,
        a_value: cfg.a_value(t),
        k_base: k,
        t_final: t,
    }
}

/// Scalings predicted for the construction, to be compared with measurements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PredictedBounds {
    /// `r^{1/p - beta}` for `||u0||_{B^{-alpha}_{inf,p}}`.
    pub u0_besov: f64,
    /// `r^{-beta}`, prefactor of `t^{-1/2}` in `||e^{-t Lambda} u0||_inf`.
    pub heat_prefactor: f64,
    /// `r^{1 - 2 beta}`.
    pub inflation_floor: f64,
    /// `r^{1 - 2 beta} (1 - B)`.
    pub certified_floor: f64,
}

impl PredictedBounds {
    pub fn heat_linf(&self, t: f64) -> f64 {
        self.heat_prefactor / t.sqrt()
    }
}

pub fn predicted_bounds(cfg: &InflationConfig) -> PredictedBounds {
    let r = cfg.r as f64;
    let inv_p = if cfg.p.is_infinite() { 0.0 } else { 1.0 / cfg.p };
    let floor = r.powf(1.0 - 2.0 * cfg.beta);
    PredictedBounds {
        u0_besov: r.powf(inv_p - cfg.beta),
        heat_prefactor: r.powf(-cfg.beta),
        inflation_floor: floor,
        certified_floor: floor * (1.0 - cfg.b_value()),
    }
}

/// `t^{g/(2 alpha)} sum_i |k_i|^g e^{-|k_i|^{2 alpha} t}` for wave lengths `lens`.
pub fn heat_sum(lens: &[f64], g: f64, alpha: f64, t: f64) -> f64 {
    t.powf(g / (2.0 * alpha))
        * lens
            .iter()
            .map(|k| k.powf(g) * (-k.powf(2.0 * alpha) * t).exp())
            .sum::<f64>()
}

/// `sum_{j<i} |k_j|^alpha / |k_{i-1}|^alpha` for `i = 2..r` (primed when `primed`).
pub fn lacunarity_ratios(r: u32, k_base: u64, alpha: f64, primed: bool) -> Result<Vec<f64>> {
    let pairs = wave_vectors(r, k_base)?;
    let lens: Vec<f64> = pairs
        .iter()
        .map(|p| mode_len(if primed { p.k_prime } else { p.k }).powf(alpha))
        .collect();
    Ok((1..lens.len())
        .map(|i| lens[..i].iter().sum::<f64>() / lens[i - 1])
        .collect())
}
