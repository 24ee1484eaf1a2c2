//! Exact Fourier-multiplier operators and the dealiased pseudo-spectral
//! products built on top of them.

use rustfft::num_complex::Complex64;

use super::field::{
    forward_scalar, inverse_scalar, transform_inverse, PhysicalField, ScalarField, SpectralField,
    TensorField,
};
use super::lattice::{mode_norm_sq, Lattice};
use crate::error::{Error, Result};

/// Dissipation exponent and viscosity of `u_t + (u.grad)u + grad p = -nu (-Lap)^alpha u`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalParams {
    alpha: f64,
    nu: f64,
}

impl FractionalParams {
    pub fn new(alpha: f64, nu: f64) -> Result<Self> {
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidParameter(format!("alpha must be >= 1, got {alpha}")));
        }
        if !(nu > 0.0) || !nu.is_finite() {
            return Err(Error::InvalidParameter(format!("nu must be > 0, got {nu}")));
        }
        Ok(Self { alpha, nu })
    }

    /// `alpha` with `nu = 1`.
    pub fn with_alpha(alpha: f64) -> Result<Self> {
        Self::new(alpha, 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `nu |m|^{2 alpha}` from the integer `|m|^2`.
    #[inline]
    pub fn rate(&self, norm_sq: i64) -> f64 {
        self.nu * fractional_power(norm_sq, self.alpha)
    }
}

/// `(|m|^2)^alpha`, exact for integer `alpha`.
#[inline]
pub fn fractional_power(norm_sq: i64, alpha: f64) -> f64 {
    let n = norm_sq as f64;
    if alpha == 1.0 {
        n
    } else if alpha == 2.0 {
        n * n
    } else {
        n.powf(alpha)
    }
}

/// Per-index decay rates `nu |m|^{2 alpha}` for a lattice.
pub fn rate_table(lattice: &Lattice, params: &FractionalParams) -> Vec<f64> {
    SpectralField::norm_sq_table(lattice)
        .into_iter()
        .map(|n| params.rate(n))
        .collect()
}

/// Multiply every coefficient by `exp(-rate * t)` in place.
pub fn apply_decay(u: &mut SpectralField, rates: &[f64], t: f64) {
    let factors: Vec<f64> = rates.iter().map(|r| (-r * t).exp()).collect();
    for c in u.components_mut().iter_mut() {
        for (v, f) in c.iter_mut().zip(&factors) {
            *v *= *f;
        }
    }
}

/// `e^{-t nu (-Lap)^alpha} u`.
pub fn heat_semigroup(u: &SpectralField, t: f64, params: &FractionalParams) -> Result<SpectralField> {
    if t < 0.0 || t.is_nan() {
        return Err(Error::NegativeTime(t));
    }
    let mut out = u.clone();
    if t == 0.0 {
        return Ok(out);
    }
    let rates = rate_table(u.lattice(), params);
    apply_decay(&mut out, &rates, t);
    Ok(out)
}

/// Orthogonal projection onto divergence-free fields; the mean passes through.
pub fn leray_project(u: &SpectralField) -> SpectralField {
    let mut out = u.clone();
    leray_project_in_place(&mut out);
    out
}

pub fn leray_project_in_place(u: &mut SpectralField) {
    let l = *u.lattice();
    let comps = u.components_mut();
    for idx in 1..l.len() {
        let m = l.mode(idx);
        let n2 = mode_norm_sq(m);
        if n2 == 0 {
            continue;
        }
        let mf = m.map(|x| x as f64);
        let dot = comps[0][idx] * mf[0] + comps[1][idx] * mf[1] + comps[2][idx] * mf[2];
        if dot == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = dot / n2 as f64;
        for c in 0..3 {
            comps[c][idx] -= k * mf[c];
        }
    }
}

/// Spectral derivative `d/dx_axis` of one component. The unpaired Nyquist
/// mode of an even axis is dropped.
pub fn derivative(lattice: &Lattice, coeffs: &[Complex64], axis: usize) -> Vec<Complex64> {
    let n = lattice.dims()[axis];
    let mut out = vec![Complex64::new(0.0, 0.0); coeffs.len()];
    if n == 1 {
        return out;
    }
    let nyquist = if n.is_multiple_of(2) { Some(-(n as i64) / 2) } else { None };
    for (idx, (o, c)) in out.iter_mut().zip(coeffs).enumerate() {
        if c.re == 0.0 && c.im == 0.0 {
            continue;
        }
        let m = lattice.mode(idx)[axis];
        if Some(m) == nyquist {
            continue;
        }
        *o = Complex64::new(-c.im * m as f64, c.re * m as f64);
    }
    out
}

/// Spectral coefficients of `div u`.
pub fn divergence_spectral(u: &SpectralField) -> Vec<Complex64> {
    let l = *u.lattice();
    let mut acc = vec![Complex64::new(0.0, 0.0); l.len()];
    for axis in 0..3 {
        let d = derivative(&l, u.component(axis), axis);
        for (a, b) in acc.iter_mut().zip(d) {
            *a += b;
        }
    }
    acc
}

/// `div u` on the physical grid.
pub fn divergence(u: &SpectralField) -> ScalarField {
    let l = *u.lattice();
    ScalarField {
        lattice: l,
        values: inverse_scalar(&l, &divergence_spectral(u)),
    }
}

/// `grad u` on the physical grid.
pub fn gradient(u: &SpectralField) -> TensorField {
    let l = *u.lattice();
    let d = [0, 1, 2].map(|i| {
        [0, 1, 2].map(|j| inverse_scalar(&l, &derivative(&l, u.component(i), j)))
    });
    TensorField { lattice: l, d }
}

/// Grid maximum of `|u(x)|` (a lower bound of the true supremum).
pub fn linf_norm(u: &SpectralField) -> f64 {
    if u.is_zero() {
        return 0.0;
    }
    transform_inverse(u).linf_norm()
}

/// Grid maximum after zero-padding every nontrivial axis by `factor`.
pub fn linf_norm_oversampled(u: &SpectralField, factor: usize) -> Result<f64> {
    if factor <= 1 {
        return Ok(linf_norm(u));
    }
    let fine = u.lattice().refined(factor)?;
    Ok(linf_norm(&u.resample(fine)?))
}

/// `(u . grad) v`, computed pseudo-spectrally and truncated to the dealias band.
pub fn convect(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.lattice().ensure_same(v.lattice())?;
    let l = *u.lattice();
    let up = transform_inverse(u);
    let mut out = SpectralField::zeros(l);
    for c in 0..3 {
        let mut acc = vec![0.0; l.len()];
        let mut touched = false;
        for j in 0..3 {
            let uj = up.component(j);
            if uj.iter().all(|x| *x == 0.0) {
                continue;
            }
            let dv = derivative(&l, v.component(c), j);
            if dv.iter().all(|x| x.re == 0.0 && x.im == 0.0) {
                continue;
            }
            let dvp = inverse_scalar(&l, &dv);
            for ((a, x), y) in acc.iter_mut().zip(uj).zip(&dvp) {
                *a += x * y;
            }
            touched = true;
        }
        if touched {
            out.component_mut(c).copy_from_slice(&forward_scalar(&l, &acc));
        }
    }
    out.dealias();
    Ok(out)
}

/// `div (u (x) v)`, i.e. component `c` is `sum_j d_j (u_j v_c)`, computed
/// pseudo-spectrally and truncated to the dealias band.
pub fn divergence_of_product(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    u.lattice().ensure_same(v.lattice())?;
    let l = *u.lattice();
    let same = std::ptr::eq(u, v) || u == v;
    let up = transform_inverse(u);
    let vp = if same { up.clone() } else { transform_inverse(v) };
    let zero_u = [0, 1, 2].map(|j| up.component(j).iter().all(|x| *x == 0.0));
    let zero_v = [0, 1, 2].map(|j| vp.component(j).iter().all(|x| *x == 0.0));
    let mut out = SpectralField::zeros(l);
    let mut prod = vec![0.0; l.len()];
    // flux[c][j] = F(u_j v_c); symmetric when u == v
    let mut flux: [[Option<Vec<Complex64>>; 3]; 3] = Default::default();
    for c in 0..3 {
        for j in 0..3 {
            if zero_u[j] || zero_v[c] || l.dims()[j] == 1 {
                continue;
            }
            if same && j > c {
                if let Some(f) = &flux[j][c] {
                    flux[c][j] = Some(f.clone());
                    continue;
                }
            }
            for ((p, a), b) in prod.iter_mut().zip(up.component(j)).zip(vp.component(c)) {
                *p = a * b;
            }
            flux[c][j] = Some(forward_scalar(&l, &prod));
        }
    }
    for c in 0..3 {
        let dst = out.component_mut(c);
        for j in 0..3 {
            if let Some(f) = &flux[c][j] {
                let d = derivative(&l, f, j);
                for (a, b) in dst.iter_mut().zip(d) {
                    *a += b;
                }
            }
        }
    }
    out.dealias();
    Ok(out)
}

/// `P div (u (x) v)`: the integrand of the bilinear Duhamel operator.
pub fn projected_flux(u: &SpectralField, v: &SpectralField) -> Result<SpectralField> {
    let mut f = divergence_of_product(u, v)?;
    leray_project_in_place(&mut f);
    Ok(f)
}

/// Physical samples of a field, re-exported for callers that need both
/// representations.
pub fn to_physical(u: &SpectralField) -> PhysicalField {
    transform_inverse(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{transform_forward, Phase};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn wave(l: Lattice, k: [i64; 3], v: [f64; 3], ph: Phase) -> SpectralField {
        SpectralField::plane_wave(l, k, v, ph, 1.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(FractionalParams::new(0.9, 1.0).is_err());
        assert!(FractionalParams::new(1.0, 0.0).is_err());
        assert!(FractionalParams::new(1.25, 2.0).is_ok());
    }

    #[test]
    fn heat_identity_at_zero_and_negative_time_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = Lattice::new(8, 1, 8).unwrap();
        let u = SpectralField::random(l, 3, &mut rng);
        let p = FractionalParams::with_alpha(1.0).unwrap();
        assert_eq!(heat_semigroup(&u, 0.0, &p).unwrap(), u);
        assert!(matches!(heat_semigroup(&u, -1e-3, &p), Err(Error::NegativeTime(_))));
    }

    #[test]
    fn heat_plane_wave_decay() {
        let l = Lattice::new(8, 1, 4).unwrap();
        let u = wave(l, [2, 0, 0], [0.0, 0.0, 1.0], Phase::Cos);
        let p = FractionalParams::with_alpha(1.0).unwrap();
        let out = heat_semigroup(&u, 0.25, &p).unwrap();
        // e^{-|k|^2 t} with |k| = 2, t = 1/4
        let expected = 0.367_879_441_171_442_3;
        assert!((out.coeff(2, [2, 0, 0]).re - 0.5 * expected).abs() < 1e-16);
        assert!((linf_norm(&out) - expected).abs() < 1e-15);
    }

    #[test]
    fn heat_semigroup_property() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = Lattice::new(12, 4, 6).unwrap();
        let u = SpectralField::random(l, 4, &mut rng);
        let p = FractionalParams::with_alpha(1.25).unwrap();
        let a = heat_semigroup(&heat_semigroup(&u, 0.01, &p).unwrap(), 0.03, &p).unwrap();
        let b = heat_semigroup(&u, 0.04, &p).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
    }

    #[test]
    fn leray_examples() {
        let l = Lattice::new(8, 1, 8).unwrap();
        let dfree = wave(l, [2, 0, 1], [0.0, 1.0, 0.0], Phase::Cos);
        assert!(leray_project(&dfree).max_abs_diff(&dfree) < 1e-16);
        // grad sin(k.x) = k cos(k.x)
        let k = [2.0, 0.0, 1.0];
        let grad = SpectralField::plane_wave(l, [2, 0, 1], k, Phase::Cos, 1.0).unwrap();
        assert!(leray_project(&grad).max_coeff_abs() < 1e-16);
    }

    #[test]
    fn leray_idempotent_and_self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let l = Lattice::new(8, 6, 10).unwrap();
        for _ in 0..5 {
            let u = SpectralField::random(l, 3, &mut rng);
            let v = SpectralField::random(l, 3, &mut rng);
            let pu = leray_project(&u);
            assert!(leray_project(&pu).max_abs_diff(&pu) < 1e-14);
            let lhs = pu.inner(&v).unwrap();
            let rhs = u.inner(&leray_project(&v)).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
            assert!(divergence(&pu).linf_norm() < 1e-12);
            assert!(pu.hermitian_defect() < 1e-15);
        }
    }

    #[test]
    fn self_interaction_of_plane_wave_vanishes() {
        let l = Lattice::new(16, 1, 8).unwrap();
        let u = wave(l, [3, 0, 1], [0.0, 1.0, 0.0], Phase::Cos);
        let c = convect(&u, &u).unwrap();
        assert!(c.max_coeff_abs() < 1e-15);
        let f = projected_flux(&u, &u).unwrap();
        assert!(f.max_coeff_abs() < 1e-15);
    }

    #[test]
    fn convect_two_waves_matches_product_formula() {
        // u1 = v1 cos(k1.x), u2 = v2 cos(k2.x) with k2.v1 = 1/2
        let l = Lattice::new(32, 1, 16).unwrap();
        let k1 = [2, 0, 0];
        let v1 = [0.0, 0.0, 1.0];
        let k2 = [3, 0, 1];
        let v2 = [0.0, 1.0, 0.0];
        let u1 = wave(l, k1, v1, Phase::Cos).scaled(0.5);
        let u2 = wave(l, k2, v2, Phase::Cos);
        let c = convect(&u1, &u2).unwrap();
        // (u1.grad)u2 = -v2 cos(k1.x) sin(k2.x) (k2.(v1/2))
        let direct = PhysicalField::from_fn(l, |x| {
            let a = 2.0 * x[0];
            let b = 3.0 * x[0] + x[2];
            [0.0, -0.5 * a.cos() * b.sin(), 0.0]
        });
        assert!(to_physical(&c).max_abs_diff(&direct) < 1e-14);
    }

    #[test]
    fn convect_with_constant_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = Lattice::new(12, 1, 12).unwrap();
        let u = SpectralField::random(l, 3, &mut rng);
        let c = transform_forward(&PhysicalField::from_fn(l, |_| [0.3, -1.0, 2.0]));
        assert!(convect(&u, &c).unwrap().max_coeff_abs() < 1e-15);
        let l2 = Lattice::new(12, 1, 6).unwrap();
        assert!(convect(&u, &SpectralField::zeros(l2)).is_err());
    }

    #[test]
    fn divergence_form_matches_advective_form_for_solenoidal_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = Lattice::new(24, 6, 24).unwrap();
        let u = leray_project(&SpectralField::random(l, 3, &mut rng));
        let v = leray_project(&SpectralField::random(l, 3, &mut rng));
        let a = convect(&u, &v).unwrap();
        let b = divergence_of_product(&u, &v).unwrap();
        assert!(a.max_abs_diff(&b) < 1e-14);
        let bs = divergence_of_product(&u, &u).unwrap();
        assert!(bs.max_abs_diff(&convect(&u, &u).unwrap()) < 1e-14);
        assert!(b.dealias_leak() == 0.0);
    }

    #[test]
    fn linf_examples() {
        let l = Lattice::new(16, 1, 8).unwrap();
        assert_eq!(linf_norm(&SpectralField::zeros(l)), 0.0);
        let u = wave(l, [4, 0, 0], [0.0, 0.0, 1.0], Phase::Cos);
        assert!((linf_norm(&u) - 1.0).abs() < 1e-15);
        // off-grid wave: oversampling tightens the estimate
        let w = wave(l, [5, 0, 0], [0.0, 1.0, 0.0], Phase::Sin);
        let coarse = linf_norm(&w);
        let fine = linf_norm_oversampled(&w, 2).unwrap();
        assert!(fine >= coarse - 1e-15);
        assert!((fine - 1.0).abs() < 0.01);
    }

    #[test]
    fn gradient_of_plane_wave() {
        let l = Lattice::new(16, 1, 8).unwrap();
        let u = wave(l, [3, 0, 1], [0.0, 1.0, 0.0], Phase::Cos);
        let g = gradient(&u);
        // d_j u_2 = -k_j sin(k.x)
        let expected = (3.0f64 * 3.0 + 1.0).sqrt();
        assert!((g.linf_norm() - expected).abs() < 1e-12);
    }
}
