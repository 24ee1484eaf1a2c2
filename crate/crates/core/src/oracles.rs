//! Closed-form first Picard iterate.
//!
//! Free heat evolution of a plane-wave sum and the bilinear Duhamel term of two
//! such evolutions are finite trigonometric sums whose time coefficients are
//! exponentials or the kernel
//!
//! ```text
//! D(a, b, t) = int_0^t e^{-a tau} e^{-b (t - tau)} dtau
//! ```
//!
//! These serve as ground truth for the numerical solver.

use rayon::prelude::*;

use crate::besov::{besov_norm_heat, BesovIndex, HeatGrid};
use crate::construction::{pair_weight, Fault, InflationConfig, PlaneWave, ETA, V, V_PRIME};
use crate::error::{Error, Result};
use crate::spectral::{linf_norm, mode_dot, mode_norm_sq, FractionalParams, Lattice, Mode, Phase, SpectralField};

const SERIES_SWITCH: f64 = 1e-6;

/// `int_0^t e^{-a tau} e^{-b (t - tau)} dtau = (e^{-bt} - e^{-at}) / (a - b)`,
/// with the confluent limit `t e^{-at}`.
pub fn duhamel_kernel(a: f64, b: f64, t: f64) -> Result<f64> {
    if a < 0.0 || b < 0.0 || a.is_nan() || b.is_nan() {
        return Err(Error::NegativeRate(a, b));
    }
    if t < 0.0 {
        return Err(Error::NegativeTime(t));
    }
    Ok(duhamel_kernel_unchecked(a, b, t))
}

fn duhamel_kernel_unchecked(a: f64, b: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let lo = a.min(b);
    let gap = (a - b).abs();
    let x = gap * t;
    if x < SERIES_SWITCH {
        // t e^{-lo t} (1 - e^{-x}) / x
        return t * (-lo * t).exp() * (1.0 - x / 2.0 + x * x / 6.0);
    }
    (-lo * t).exp() * (-(-x).exp_m1()) / gap
}

/// Composite trapezoid rule for the same integral; independent check of [`duhamel_kernel`].
pub fn duhamel_trapezoid(a: f64, b: f64, t: f64, points: usize) -> f64 {
    let n = points.max(2) - 1;
    let h = t / n as f64;
    let f = |tau: f64| (-a * tau - b * (t - tau)).exp();
    let inner: f64 = (1..n).map(|i| f(i as f64 * h)).sum();
    h * (0.5 * (f(0.0) + f(t)) + inner)
}

/// Closed-form time coefficient of one term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Profile {
    /// `e^{-rate t}`.
    Decay { rate: f64 },
    /// `D(a, b, t)`.
    Duhamel { a: f64, b: f64 },
}

impl Profile {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Profile::Decay { rate } => (-rate * t).exp(),
            Profile::Duhamel { a, b } => duhamel_kernel_unchecked(a, b, t),
        }
    }
}

/// Interaction class of a term of the first iterate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TermClass {
    /// Free evolution of an initial atom.
    Linear,
    /// Same-pair interaction landing on the low mode `eta`.
    Resonant,
    /// Difference mode `k'_j - k_i`, `i != j`.
    Difference,
    /// Sum mode `k'_j + k_i`.
    Sum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TermTag {
    /// `(i, j)`, zero-based; `(i, i)` for linear terms.
    pub pair: (usize, usize),
    pub class: TermClass,
}

/// `amplitude * profile(t) * direction * phase(mode . x)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnsembleTerm {
    pub amplitude: f64,
    pub direction: [f64; 3],
    pub mode: Mode,
    pub phase: Phase,
    pub profile: Profile,
    pub tag: TermTag,
}

impl EnsembleTerm {
    pub fn value(&self, t: f64) -> f64 {
        self.amplitude * self.profile.eval(t)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ensemble {
    terms: Vec<EnsembleTerm>,
}

impl Ensemble {
    pub fn new(terms: Vec<EnsembleTerm>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[EnsembleTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn push(&mut self, term: EnsembleTerm) {
        self.terms.push(term);
    }

    pub fn extend(&mut self, other: Ensemble) {
        self.terms.extend(other.terms);
    }

    pub fn count(&self, class: TermClass) -> usize {
        self.terms.iter().filter(|t| t.tag.class == class).count()
    }

    pub fn of_class(&self, class: TermClass) -> Ensemble {
        Ensemble::new(self.terms.iter().filter(|t| t.tag.class == class).copied().collect())
    }

    /// Largest `|m_j|` per axis.
    pub fn band(&self) -> [i64; 3] {
        let mut b = [0i64; 3];
        for t in &self.terms {
            for a in 0..3 {
                b[a] = b[a].max(t.mode[a].abs());
            }
        }
        b
    }

    /// Largest `|m . direction|` over the terms.
    pub fn divergence_defect(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| mode_dot(t.mode, t.direction).abs())
            .fold(0.0, f64::max)
    }

    /// Exact trigonometric synthesis at time `t`.
    pub fn to_field(&self, lattice: Lattice, t: f64) -> Result<SpectralField> {
        let mut u = SpectralField::zeros(lattice);
        for term in &self.terms {
            u.add_plane_wave(term.mode, term.direction, term.phase, term.value(t))?;
        }
        Ok(u)
    }

    /// Lattice with twice the points of the smallest one holding every mode
    /// in its dealias band; used for standalone norm evaluation.
    pub fn synthesis_lattice(&self) -> Result<Lattice> {
        Lattice::sized_for(self.band())?.refined(2)
    }

    /// Sampled `||.||_inf` at `t` on [`Ensemble::synthesis_lattice`].
    pub fn linf(&self, t: f64) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        Ok(linf_norm(&self.to_field(self.synthesis_lattice()?, t)?))
    }

    /// Heat-characterization Besov norm at `t` on [`Ensemble::synthesis_lattice`].
    pub fn besov(&self, t: f64, idx: &BesovIndex) -> Result<f64> {
        if self.is_empty() {
            return Ok(0.0);
        }
        let l = self.synthesis_lattice()?;
        let grid = HeatGrid::standard(&l, idx.alpha);
        Ok(besov_norm_heat(&self.to_field(l, t)?, idx, &grid)?.value)
    }
}

pub fn ensemble_to_field(e: &Ensemble, lattice: Lattice, t: f64) -> Result<SpectralField> {
    e.to_field(lattice, t)
}

pub fn ensemble_linf(e: &Ensemble, t: f64) -> Result<f64> {
    e.linf(t)
}

pub fn ensemble_besov(e: &Ensemble, t: f64, idx: &BesovIndex) -> Result<f64> {
    e.besov(t, idx)
}

fn add(a: Mode, b: Mode) -> Mode {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: Mode, b: Mode) -> Mode {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn derivative_phase(p: Phase) -> (Phase, f64) {
    match p {
        Phase::Cos => (Phase::Sin, -1.0),
        Phase::Sin => (Phase::Cos, 1.0),
    }
}

/// `phi1(A) phi2(B)` as `c_sum * psi(B + A) + c_diff * psi(B - A)` with a common phase `psi`.
fn product_to_sum(p1: Phase, p2: Phase) -> (Phase, f64, f64) {
    match (p1, p2) {
        (Phase::Cos, Phase::Cos) => (Phase::Cos, 0.5, 0.5),
        (Phase::Sin, Phase::Sin) => (Phase::Cos, -0.5, 0.5),
        (Phase::Cos, Phase::Sin) => (Phase::Sin, 0.5, 0.5),
        (Phase::Sin, Phase::Cos) => (Phase::Sin, 0.5, -0.5),
    }
}

/// `B(e^{-t Lambda} w1, e^{-t Lambda} w2)` for unit-amplitude atoms: the
/// Leray-projected `(w1 . grad) w2` at modes `k2 - k1` and `k2 + k1`, each
/// carried by the Duhamel kernel with rates `(|k1|^{2a} + |k2|^{2a}, |k2 -+ k1|^{2a})`.
pub fn pair_interaction(w1: &PlaneWave, w2: &PlaneWave, params: &FractionalParams) -> Result<Ensemble> {
    for w in [w1, w2] {
        let d = mode_dot(w.k, w.v);
        if d.abs() > 1e-12 {
            return Err(Error::NotDivergenceFree(d));
        }
    }
    let coupling = mode_dot(w2.k, w1.v);
    if coupling == 0.0 {
        return Ok(Ensemble::default());
    }
    let (dphase, dsign) = derivative_phase(w2.phase);
    let (phase, c_sum, c_diff) = product_to_sum(w1.phase, dphase);
    let a = params.rate(mode_norm_sq(w1.k)) + params.rate(mode_norm_sq(w2.k));
    let mut out = Ensemble::default();
    for (mode, c, class) in [
        (sub(w2.k, w1.k), c_diff, TermClass::Difference),
        (add(w2.k, w1.k), c_sum, TermClass::Sum),
    ] {
        if mode == [0, 0, 0] && phase == Phase::Sin {
            continue;
        }
        let n2 = mode_norm_sq(mode);
        let mut dir = w2.v;
        if n2 > 0 {
            let proj = mode_dot(mode, dir) / n2 as f64;
            for c in 0..3 {
                dir[c] -= proj * mode[c] as f64;
            }
        }
        let len = (dir[0] * dir[0] + dir[1] * dir[1] + dir[2] * dir[2]).sqrt();
        if len < 1e-14 {
            continue;
        }
        out.push(EnsembleTerm {
            amplitude: coupling * dsign * c * len,
            direction: dir.map(|x| x / len),
            mode,
            phase,
            profile: Profile::Duhamel {
                a,
                b: params.rate(n2),
            },
            tag: TermTag {
                pair: (0, 0),
                class,
            },
        });
    }
    Ok(out)
}

/// Free evolution `e^{-t Lambda} u0` as an ensemble.
pub fn free_evolution(cfg: &InflationConfig, fault: Fault) -> Result<Ensemble> {
    let params = cfg.params()?;
    let mut out = Ensemble::default();
    for (i, pair) in cfg.wave_pairs()?.iter().enumerate() {
        let w = pair_weight(cfg, pair, fault);
        for (k, v) in [(pair.k, V), (pair.k_prime, V_PRIME)] {
            out.push(EnsembleTerm {
                amplitude: w,
                direction: v,
                mode: k,
                phase: Phase::Cos,
                profile: Profile::Decay {
                    rate: params.rate(mode_norm_sq(k)),
                },
                tag: TermTag {
                    pair: (i, i),
                    class: TermClass::Linear,
                },
            });
        }
    }
    Ok(out)
}

/// The three parts of the first Picard iterate.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstIterate {
    /// `r` terms at `eta`.
    pub resonant: Ensemble,
    /// `r (r - 1)` terms at `k'_j - k_i`.
    pub difference: Ensemble,
    /// `r^2` terms at `k'_j + k_i`.
    pub sum: Ensemble,
}

impl FirstIterate {
    pub fn total(&self) -> Ensemble {
        let mut e = self.resonant.clone();
        e.extend(self.difference.clone());
        e.extend(self.sum.clone());
        e
    }
}

/// `u1 = B(e^{-t Lambda} u0, e^{-t Lambda} u0)` in closed form.
///
/// Only `(v cos(k_i.x) . grad)(v' cos(k'_j.x))` survives, since `v . k_j = 0`
/// and `v' . k_j = v' . k'_j = 0`; it equals
/// `-(1/2) v' [sin((k'_j + k_i).x) + sin((k'_j - k_i).x)]`.
pub fn u1_closed_form(cfg: &InflationConfig) -> Result<FirstIterate> {
    u1_closed_form_with_fault(cfg, Fault::None)
}

pub fn u1_closed_form_with_fault(cfg: &InflationConfig, fault: Fault) -> Result<FirstIterate> {
    let params = cfg.params()?;
    let pairs = cfg.wave_pairs()?;
    let weights: Vec<f64> = pairs.iter().map(|p| pair_weight(cfg, p, fault)).collect();
    let mut resonant = Ensemble::default();
    let mut difference = Ensemble::default();
    let mut sum = Ensemble::default();
    for (i, pi) in pairs.iter().enumerate() {
        for (j, pj) in pairs.iter().enumerate() {
            let coupling = mode_dot(pj.k_prime, V);
            let amp = -0.5 * weights[i] * weights[j] * coupling;
            let a = params.rate(mode_norm_sq(pi.k)) + params.rate(mode_norm_sq(pj.k_prime));
            for (mode, is_sum) in [(sub(pj.k_prime, pi.k), false), (add(pj.k_prime, pi.k), true)] {
                debug_assert_eq!(mode_dot(mode, V_PRIME), 0.0);
                let class = match (is_sum, i == j) {
                    (true, _) => TermClass::Sum,
                    (false, true) => TermClass::Resonant,
                    (false, false) => TermClass::Difference,
                };
                let sign = if class == TermClass::Resonant && fault == Fault::FlipE0Sign { -1.0 } else { 1.0 };
                let term = EnsembleTerm {
                    amplitude: sign * amp,
                    direction: V_PRIME,
                    mode,
                    phase: Phase::Sin,
                    profile: Profile::Duhamel {
                        a,
                        b: params.rate(mode_norm_sq(mode)),
                    },
                    tag: TermTag { pair: (i, j), class },
                };
                match class {
                    TermClass::Resonant => {
                        debug_assert_eq!(mode, ETA);
                        resonant.push(term)
                    }
                    TermClass::Difference => difference.push(term),
                    _ => sum.push(term),
                }
            }
        }
    }
    Ok(FirstIterate {
        resonant,
        difference,
        sum,
    })
}

/// Signed coefficient of `v' sin(eta . x)` in the resonant part at `t`.
pub fn resonant_amplitude(e: &FirstIterate, t: f64) -> f64 {
    e.resonant.terms().iter().map(|term| term.value(t)).sum()
}

/// Sampled `||.||_inf` of an ensemble at many times, in parallel.
pub fn linf_series(e: &Ensemble, lattice: Lattice, times: &[f64]) -> Result<Vec<f64>> {
    times
        .par_iter()
        .map(|&t| Ok(linf_norm(&e.to_field(lattice, t)?)))
        .collect()
}
