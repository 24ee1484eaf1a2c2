use rand::Rng;
use rustfft::num_complex::Complex64;

use super::fft;
use super::lattice::{mode_norm_sq, Lattice, Mode};
use crate::error::{Error, Result};

/// Trigonometric phase of a real plane wave.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    Cos,
    Sin,
}

impl Phase {
    /// Coefficients `(c_plus, c_minus)` of `e^{+i m.x}` and `e^{-i m.x}`.
    pub fn exponential_pair(self) -> (Complex64, Complex64) {
        match self {
            Phase::Cos => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
            Phase::Sin => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
        }
    }

    pub fn eval(self, theta: f64) -> f64 {
        match self {
            Phase::Cos => theta.cos(),
            Phase::Sin => theta.sin(),
        }
    }
}

/// Real vector field sampled on the physical grid, one `Vec` per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    lattice: Lattice,
    comps: [Vec<f64>; 3],
}

impl PhysicalField {
    pub fn new(lattice: Lattice, comps: [Vec<f64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { lattice, comps })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        let n = lattice.len();
        Self {
            lattice,
            comps: [vec![0.0; n], vec![0.0; n], vec![0.0; n]],
        }
    }

    pub fn from_fn(lattice: Lattice, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let mut out = Self::zeros(lattice);
        for idx in 0..lattice.len() {
            let v = f(lattice.point(idx));
            for c in 0..3 {
                out.comps[c][idx] = v[c];
            }
        }
        out
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn component(&self, c: usize) -> &[f64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        &mut self.comps[c]
    }

    /// Euclidean length of the vector at grid point `idx`.
    pub fn magnitude_at(&self, idx: usize) -> f64 {
        let [a, b, c] = [self.comps[0][idx], self.comps[1][idx], self.comps[2][idx]];
        (a * a + b * b + c * c).sqrt()
    }

    /// Grid maximum of the pointwise Euclidean length.
    pub fn linf_norm(&self) -> f64 {
        (0..self.lattice.len())
            .map(|i| self.magnitude_at(i))
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &PhysicalField) -> f64 {
        let mut m: f64 = 0.0;
        for c in 0..3 {
            for (a, b) in self.comps[c].iter().zip(&other.comps[c]) {
                m = m.max((a - b).abs());
            }
        }
        m
    }
}

/// Real scalar sampled on the physical grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    pub lattice: Lattice,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn linf_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Physical samples of the velocity gradient, `d[i][j] = d_j u_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    pub lattice: Lattice,
    pub d: [[Vec<f64>; 3]; 3],
}

impl TensorField {
    /// Grid maximum of the Frobenius norm.
    pub fn linf_norm(&self) -> f64 {
        (0..self.lattice.len())
            .map(|idx| {
                let mut s = 0.0;
                for row in &self.d {
                    for comp in row {
                        s += comp[idx] * comp[idx];
                    }
                }
                s.sqrt()
            })
            .fold(0.0, f64::max)
    }
}

/// Three-component Fourier coefficients of a periodic vector field.
///
/// Coefficient `m` of component `c` multiplies `e^{i m.x}`; a real field has
/// `coeff(c, -m) = conj(coeff(c, m))`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    lattice: Lattice,
    comps: [Vec<Complex64>; 3],
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

impl SpectralField {
    pub fn zeros(lattice: Lattice) -> Self {
        let n = lattice.len();
        Self {
            lattice,
            comps: [vec![ZERO; n], vec![ZERO; n], vec![ZERO; n]],
        }
    }

    pub fn from_components(lattice: Lattice, comps: [Vec<Complex64>; 3]) -> Result<Self> {
        for c in &comps {
            if c.len() != lattice.len() {
                return Err(Error::DimensionMismatch {
                    expected: lattice.len(),
                    got: c.len(),
                });
            }
        }
        Ok(Self { lattice, comps })
    }

    /// Field `amplitude * direction * phase(k.x)`.
    pub fn plane_wave(
        lattice: Lattice,
        k: Mode,
        direction: [f64; 3],
        phase: Phase,
        amplitude: f64,
    ) -> Result<Self> {
        let mut f = Self::zeros(lattice);
        f.add_plane_wave(k, direction, phase, amplitude)?;
        Ok(f)
    }

    /// Accumulate `amplitude * direction * phase(k.x)` into the coefficients.
    pub fn add_plane_wave(
        &mut self,
        k: Mode,
        direction: [f64; 3],
        phase: Phase,
        amplitude: f64,
    ) -> Result<()> {
        let neg = [-k[0], -k[1], -k[2]];
        let (ip, im) = match (self.lattice.index_of(k), self.lattice.index_of(neg)) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Unresolved {
                    mode: k,
                    dims: self.lattice.dims(),
                    required: self.lattice.required_for(k),
                })
            }
        };
        if k == [0, 0, 0] {
            if phase == Phase::Cos {
                for c in 0..3 {
                    self.comps[c][ip] += Complex64::new(amplitude * direction[c], 0.0);
                }
            }
            return Ok(());
        }
        let (cp, cm) = phase.exponential_pair();
        for c in 0..3 {
            let a = amplitude * direction[c];
            if a == 0.0 {
                continue;
            }
            self.comps[c][ip] += cp * a;
            self.comps[c][im] += cm * a;
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        &self.comps[c]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.comps[c]
    }

    pub fn components(&self) -> &[Vec<Complex64>; 3] {
        &self.comps
    }

    pub(crate) fn components_mut(&mut self) -> &mut [Vec<Complex64>; 3] {
        &mut self.comps
    }

    /// Coefficient of component `c` at mode `m` (zero when unresolved).
    pub fn coeff(&self, c: usize, m: Mode) -> Complex64 {
        self.lattice
            .index_of(m)
            .map(|i| self.comps[c][i])
            .unwrap_or(ZERO)
    }

    pub fn set_coeff(&mut self, c: usize, m: Mode, value: Complex64) -> Result<()> {
        let i = self.lattice.index_of(m).ok_or(Error::Unresolved {
            mode: m,
            dims: self.lattice.dims(),
            required: self.lattice.required_for(m),
        })?;
        self.comps[c][i] = value;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.iter().all(|v| *v == ZERO))
    }

    /// Indices carrying a nonzero coefficient in any component.
    pub fn support(&self) -> Vec<usize> {
        (0..self.lattice.len())
            .filter(|&i| self.comps.iter().any(|c| c[i] != ZERO))
            .collect()
    }

    /// Euclidean length of the complex coefficient vector at `idx`.
    pub fn coeff_norm(&self, idx: usize) -> f64 {
        self.comps.iter().map(|c| c[idx].norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn mean(&self) -> [f64; 3] {
        [0, 1, 2].map(|c| self.comps[c][0].re)
    }

    pub fn has_mean(&self) -> bool {
        self.comps.iter().any(|c| c[0] != ZERO)
    }

    pub fn remove_mean(&mut self) {
        for c in self.comps.iter_mut() {
            c[0] = ZERO;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for c in self.comps.iter_mut() {
            for v in c.iter_mut() {
                *v *= factor;
            }
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        out.scale(factor);
        out
    }

    /// `self += factor * other`.
    pub fn axpy(&mut self, factor: f64, other: &SpectralField) -> Result<()> {
        self.lattice.ensure_same(&other.lattice)?;
        for (a, b) in self.comps.iter_mut().zip(&other.comps) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += *y * factor;
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(1.0, other)?;
        Ok(out)
    }

    pub fn sub(&self, other: &SpectralField) -> Result<Self> {
        let mut out = self.clone();
        out.axpy(-1.0, other)?;
        Ok(out)
    }

    /// Largest coefficient-wise absolute difference.
    pub fn max_abs_diff(&self, other: &SpectralField) -> f64 {
        let mut m: f64 = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                m = m.max((x - y).norm());
            }
        }
        m
    }

    pub fn max_coeff_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .fold(0.0, |m, v| m.max(v.norm()))
    }

    /// Largest violation of `coeff(-m) = conj(coeff(m))`.
    pub fn hermitian_defect(&self) -> f64 {
        let mut m: f64 = 0.0;
        for idx in 0..self.lattice.len() {
            let j = self.lattice.conjugate_index(idx);
            for c in &self.comps {
                m = m.max((c[idx] - c[j].conj()).norm());
            }
        }
        m
    }

    /// Project onto real fields by averaging each mode with its conjugate partner.
    pub fn symmetrize(&mut self) {
        let n = self.lattice.len();
        for c in self.comps.iter_mut() {
            let src = c.clone();
            for idx in 0..n {
                let j = self.lattice.conjugate_index(idx);
                c[idx] = (src[idx] + src[j].conj()) * 0.5;
            }
        }
    }

    /// Discrete inner product `sum_m Re(conj(a_m) . b_m)`, i.e. the spatial
    /// mean of `a . b`.
    pub fn inner(&self, other: &SpectralField) -> Result<f64> {
        self.lattice.ensure_same(&other.lattice)?;
        let mut s = 0.0;
        for (a, b) in self.comps.iter().zip(&other.comps) {
            for (x, y) in a.iter().zip(b) {
                s += (x.conj() * y).re;
            }
        }
        Ok(s)
    }

    /// Root-mean-square of `|u|` over the torus.
    pub fn l2_norm(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|c| c.iter())
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Zero every mode outside the dealias band.
    pub fn dealias(&mut self) {
        let l = self.lattice;
        let cut = [l.dealias_cutoff(0), l.dealias_cutoff(1), l.dealias_cutoff(2)];
        let [n1, n2, n3] = l.dims();
        for i1 in 0..n1 {
            let k1 = l.freq(0, i1).abs() > cut[0];
            for i2 in 0..n2 {
                let k2 = l.freq(1, i2).abs() > cut[1];
                for i3 in 0..n3 {
                    if k1 || k2 || l.freq(2, i3).abs() > cut[2] {
                        let idx = l.flat(i1, i2, i3);
                        for c in self.comps.iter_mut() {
                            c[idx] = ZERO;
                        }
                    }
                }
            }
        }
    }

    /// Largest retained-band violation: max coefficient outside the dealias band.
    pub fn dealias_leak(&self) -> f64 {
        let l = self.lattice;
        (0..l.len())
            .filter(|&i| !l.is_retained(l.mode(i)))
            .map(|i| self.coeff_norm(i))
            .fold(0.0, f64::max)
    }

    /// Copy coefficients mode-by-mode into another lattice. Modes the target
    /// cannot resolve are an error unless they are zero.
    pub fn resample(&self, target: Lattice) -> Result<Self> {
        let mut out = Self::zeros(target);
        for idx in self.support() {
            let m = self.lattice.mode(idx);
            match target.index_of(m) {
                Some(j) => {
                    for c in 0..3 {
                        out.comps[c][j] = self.comps[c][idx];
                    }
                }
                None => {
                    return Err(Error::Unresolved {
                        mode: m,
                        dims: target.dims(),
                        required: target.required_for(m),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Random real field with independent Gaussian-like coefficients on the
    /// modes `0 < |m|_inf <= band`, normalised to unit coefficient RMS.
    pub fn random<R: Rng>(lattice: Lattice, band: i64, rng: &mut R) -> Self {
        let mut f = Self::zeros(lattice);
        for idx in 0..lattice.len() {
            let m = lattice.mode(idx);
            let nyquist = (0..3).any(|a| {
                let n = lattice.dims()[a] as i64;
                n > 1 && n % 2 == 0 && m[a] == -n / 2
            });
            if m == [0, 0, 0] || nyquist || m.iter().any(|x| x.abs() > band) {
                continue;
            }
            for c in 0..3 {
                let re: f64 = rng.gen_range(-1.0..1.0);
                let im: f64 = rng.gen_range(-1.0..1.0);
                f.comps[c][idx] = Complex64::new(re, im);
            }
        }
        f.symmetrize();
        let n = f.l2_norm();
        if n > 0.0 {
            f.scale(1.0 / n);
        }
        f
    }

    /// `|m|^2` for each stored index (used by the diagonal operators).
    pub(crate) fn norm_sq_table(lattice: &Lattice) -> Vec<i64> {
        (0..lattice.len()).map(|i| mode_norm_sq(lattice.mode(i))).collect()
    }
}

/// Forward transform of a physical field: `c_m = mean(f e^{-i m.x})`.
pub fn transform_forward(field: &PhysicalField) -> SpectralField {
    let lattice = *field.lattice();
    let mut out = SpectralField::zeros(lattice);
    for c in 0..3 {
        let dst = out.component_mut(c);
        for (d, s) in dst.iter_mut().zip(field.component(c)) {
            *d = Complex64::new(*s, 0.0);
        }
        fft::forward(&lattice, dst);
    }
    out
}

/// Forward transform with an explicit dimension check against `lattice`.
pub fn transform_forward_checked(lattice: &Lattice, field: &PhysicalField) -> Result<SpectralField> {
    lattice.ensure_same(field.lattice())?;
    Ok(transform_forward(field))
}

/// Inverse transform, keeping the real part.
pub fn transform_inverse(field: &SpectralField) -> PhysicalField {
    let lattice = *field.lattice();
    let mut out = PhysicalField::zeros(lattice);
    let mut buf = vec![ZERO; lattice.len()];
    for c in 0..3 {
        if field.component(c).iter().all(|v| *v == ZERO) {
            continue;
        }
        buf.copy_from_slice(field.component(c));
        fft::inverse(&lattice, &mut buf);
        for (d, s) in out.component_mut(c).iter_mut().zip(&buf) {
            *d = s.re;
        }
    }
    out
}

/// Inverse transform of a single complex component.
pub(crate) fn inverse_scalar(lattice: &Lattice, coeffs: &[Complex64]) -> Vec<f64> {
    let mut buf = coeffs.to_vec();
    if buf.iter().any(|v| *v != ZERO) {
        fft::inverse(lattice, &mut buf);
    }
    buf.into_iter().map(|v| v.re).collect()
}

/// Forward transform of a real scalar.
pub(crate) fn forward_scalar(lattice: &Lattice, values: &[f64]) -> Vec<Complex64> {
    let mut buf: Vec<Complex64> = values.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    fft::forward(lattice, &mut buf);
    buf
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_field_has_only_mean() {
        let l = Lattice::new(8, 4, 6).unwrap();
        let f = PhysicalField::from_fn(l, |_| [1.0, 0.0, 0.0]);
        let s = transform_forward(&f);
        assert!((s.coeff(0, [0, 0, 0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let mut rest = s.clone();
        rest.remove_mean();
        assert!(rest.max_coeff_abs() < 1e-15);
    }

    #[test]
    fn cosine_coefficients_are_one_half() {
        let l = Lattice::new(16, 1, 8).unwrap();
        let f = PhysicalField::from_fn(l, |x| [0.0, 0.0, (4.0 * x[0]).cos()]);
        let s = transform_forward(&f);
        for m in [[4, 0, 0], [-4, 0, 0]] {
            assert!((s.coeff(2, m) - Complex64::new(0.5, 0.0)).norm() < 1e-14);
        }
        let analytic = SpectralField::plane_wave(l, [4, 0, 0], [0.0, 0.0, 1.0], Phase::Cos, 1.0).unwrap();
        assert!(s.max_abs_diff(&analytic) < 1e-14);
    }

    #[test]
    fn sine_wave_synthesis() {
        let l = Lattice::new(12, 1, 12).unwrap();
        let s = SpectralField::plane_wave(l, [2, 0, 1], [0.0, 1.0, 0.0], Phase::Sin, 0.7).unwrap();
        let p = transform_inverse(&s);
        let direct = PhysicalField::from_fn(l, |x| [0.0, 0.7 * (2.0 * x[0] + x[2]).sin(), 0.0]);
        assert!(p.max_abs_diff(&direct) < 1e-14);
        assert!(s.hermitian_defect() < 1e-16);
    }

    #[test]
    fn roundtrip_random_fields_all_shapes() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dims in [[8, 8, 8], [16, 1, 12], [5, 7, 3], [1, 1, 9], [30, 1, 1]] {
            let l = Lattice::new(dims[0], dims[1], dims[2]).unwrap();
            let f = PhysicalField::from_fn(l, |_| {
                [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
            });
            let back = transform_inverse(&transform_forward(&f));
            let rel = back.max_abs_diff(&f) / f.linf_norm();
            assert!(rel < 1e-12, "dims {dims:?}: {rel}");
        }
    }

    #[test]
    fn checked_forward_rejects_mismatch() {
        let a = Lattice::new(8, 1, 8).unwrap();
        let b = Lattice::new(8, 1, 4).unwrap();
        let f = PhysicalField::zeros(b);
        assert!(matches!(
            transform_forward_checked(&a, &f),
            Err(Error::LatticeMismatch { .. })
        ));
        assert!(PhysicalField::new(a, [vec![0.0; 3], vec![], vec![]]).is_err());
    }

    #[test]
    fn unresolved_plane_wave_is_reported() {
        let l = Lattice::new(8, 1, 4).unwrap();
        let err = SpectralField::plane_wave(l, [4, 0, 1], [0.0, 1.0, 0.0], Phase::Cos, 1.0).unwrap_err();
        match err {
            Error::Unresolved { required, .. } => assert_eq!(required[0], 9),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn random_field_is_real() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let l = Lattice::new(10, 3, 8).unwrap();
        let f = SpectralField::random(l, 3, &mut rng);
        assert!(f.hermitian_defect() < 1e-15);
        assert!(!f.has_mean());
    }
}
