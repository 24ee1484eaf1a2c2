use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// Integer wave vector on the torus.
pub type Mode = [i64; 3];

/// Physical grid of `N1 x N2 x N3` points on `[0, 2pi)^3` together with the
/// set of integer frequencies it resolves.
///
/// Axis `j` resolves `{-floor(N_j/2), ..., ceil(N_j/2) - 1}`. A mode survives
/// dealiasing when `|m_j| < f * N_j / 2` on every axis, where `f` is the
/// dealias fraction (2/3 by default).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dims: [usize; 3],
    dealias_num: u32,
    dealias_den: u32,
}

impl Lattice {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || n3 == 0 {
            return Err(Error::InvalidParameter(format!(
                "lattice dims must be positive, got ({n1}, {n2}, {n3})"
            )));
        }
        Ok(Self {
            dims: [n1, n2, n3],
            dealias_num: 2,
            dealias_den: 3,
        })
    }

    /// Replace the dealias fraction `num/den`, which must lie in `(0, 1]`.
    pub fn with_dealias(self, num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidParameter(format!(
                "dealias fraction {num}/{den} outside (0, 1]"
            )));
        }
        Ok(Self {
            dealias_num: num,
            dealias_den: den,
            ..self
        })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn dealias_fraction(&self) -> (u32, u32) {
        (self.dealias_num, self.dealias_den)
    }

    /// Number of grid points (and of Fourier coefficients per component).
    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Signed frequency stored at FFT index `i` on `axis`.
    #[inline]
    pub fn freq(&self, axis: usize, i: usize) -> i64 {
        let n = self.dims[axis];
        if i < n.div_ceil(2) {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Largest resolved positive frequency on `axis`.
    pub fn max_freq(&self, axis: usize) -> i64 {
        self.dims[axis].div_ceil(2) as i64 - 1
    }

    /// Largest resolved negative frequency magnitude on `axis`.
    pub fn min_freq(&self, axis: usize) -> i64 {
        -((self.dims[axis] / 2) as i64)
    }

    fn axis_index(&self, axis: usize, m: i64) -> Option<usize> {
        if m > self.max_freq(axis) || m < self.min_freq(axis) {
            return None;
        }
        let n = self.dims[axis] as i64;
        Some(m.rem_euclid(n) as usize)
    }

    /// Whether every component of `m` lies in the resolved band.
    pub fn resolves(&self, m: Mode) -> bool {
        self.index_of(m).is_some()
    }

    /// Flat storage index of mode `m`, if resolved.
    pub fn index_of(&self, m: Mode) -> Option<usize> {
        let i1 = self.axis_index(0, m[0])?;
        let i2 = self.axis_index(1, m[1])?;
        let i3 = self.axis_index(2, m[2])?;
        Some(self.flat(i1, i2, i3))
    }

    #[inline]
    pub fn flat(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.dims[1] + i2) * self.dims[2] + i3
    }

    #[inline]
    pub fn unflat(&self, idx: usize) -> [usize; 3] {
        let i3 = idx % self.dims[2];
        let rest = idx / self.dims[2];
        [rest / self.dims[1], rest % self.dims[1], i3]
    }

    /// Mode stored at flat index `idx`.
    #[inline]
    pub fn mode(&self, idx: usize) -> Mode {
        let [i1, i2, i3] = self.unflat(idx);
        [self.freq(0, i1), self.freq(1, i2), self.freq(2, i3)]
    }

    /// Flat index holding the mode `-m` under modular indexing.
    #[inline]
    pub fn conjugate_index(&self, idx: usize) -> usize {
        let [i1, i2, i3] = self.unflat(idx);
        let neg = |i: usize, n: usize| (n - i) % n;
        self.flat(
            neg(i1, self.dims[0]),
            neg(i2, self.dims[1]),
            neg(i3, self.dims[2]),
        )
    }

    /// Largest frequency magnitude kept on `axis` after dealiasing.
    pub fn dealias_cutoff(&self, axis: usize) -> i64 {
        // largest m with m * 2 * den < num * N
        let lim = self.dealias_num as i64 * self.dims[axis] as i64;
        let two_den = 2 * self.dealias_den as i64;
        let m = (lim - 1) / two_den;
        m.min(self.max_freq(axis))
    }

    pub fn is_retained(&self, m: Mode) -> bool {
        (0..3).all(|a| m[a].abs() <= self.dealias_cutoff(a))
    }

    /// Euclidean length of the largest resolved wave vector.
    pub fn max_resolved_norm(&self) -> f64 {
        (0..3)
            .map(|a| {
                let m = self.max_freq(a).max(-self.min_freq(a)) as f64;
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Physical coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let ii = self.unflat(idx);
        let mut x = [0.0; 3];
        for a in 0..3 {
            x[a] = TAU * ii[a] as f64 / self.dims[a] as f64;
        }
        x
    }

    /// Smallest lattice with 5-smooth axis sizes whose dealias band contains
    /// `|m_j| <= band[j]` on every axis.
    pub fn sized_for(band: [i64; 3]) -> Result<Self> {
        let probe = Self::new(1, 1, 1)?;
        let mut dims = [1usize; 3];
        for a in 0..3 {
            if band[a] < 0 {
                return Err(Error::InvalidParameter(format!("negative band {band:?}")));
            }
            if band[a] == 0 {
                continue;
            }
            let mut n = (3 * band[a] as usize).max(2);
            loop {
                let mut l = probe;
                l.dims = [n, 1, 1];
                if is_smooth(n) && l.dealias_cutoff(0) >= band[a] {
                    break;
                }
                n += 1;
            }
            dims[a] = n;
        }
        Self::new(dims[0], dims[1], dims[2])
    }

    /// Same as `self` but every axis with `N > 1` multiplied by `factor`.
    pub fn refined(&self, factor: usize) -> Result<Self> {
        let mut dims = self.dims;
        for d in dims.iter_mut() {
            if *d > 1 {
                *d *= factor;
            }
        }
        Self::new(dims[0], dims[1], dims[2])?.with_dealias(self.dealias_num, self.dealias_den)
    }

    pub(crate) fn ensure_same(&self, other: &Lattice) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::LatticeMismatch {
                left: self.dims,
                right: other.dims,
            });
        }
        Ok(())
    }

    /// Minimal axis sizes that resolve `m` (used in error reports).
    pub(crate) fn required_for(&self, m: Mode) -> [usize; 3] {
        let mut req = self.dims;
        for a in 0..3 {
            let need = 2 * m[a].unsigned_abs() as usize + 1;
            req[a] = req[a].max(need);
        }
        req
    }
}

fn is_smooth(mut n: usize) -> bool {
    for p in [2, 3, 5] {
        while n.is_multiple_of(p) {
            n /= p;
        }
    }
    n == 1
}

#[inline]
pub fn mode_norm_sq(m: Mode) -> i64 {
    m[0] * m[0] + m[1] * m[1] + m[2] * m[2]
}

#[inline]
pub fn mode_dot(m: Mode, v: [f64; 3]) -> f64 {
    m[0] as f64 * v[0] + m[1] as f64 * v[1] + m[2] as f64 * v[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolved_band_matches_fft_convention() {
        let l = Lattice::new(8, 1, 7).unwrap();
        let f0: Vec<i64> = (0..8).map(|i| l.freq(0, i)).collect();
        assert_eq!(f0, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        let f2: Vec<i64> = (0..7).map(|i| l.freq(2, i)).collect();
        assert_eq!(f2, vec![0, 1, 2, 3, -3, -2, -1]);
        assert!(l.resolves([-4, 0, 3]));
        assert!(!l.resolves([4, 0, 0]));
        assert!(!l.resolves([0, 1, 0]));
    }

    #[test]
    fn index_roundtrip() {
        let l = Lattice::new(6, 3, 4).unwrap();
        for idx in 0..l.len() {
            assert_eq!(l.index_of(l.mode(idx)), Some(idx));
            let c = l.conjugate_index(idx);
            let m = l.mode(idx);
            let mc = l.mode(c);
            for a in 0..3 {
                let n = l.dims()[a] as i64;
                assert_eq!((m[a] + mc[a]).rem_euclid(n), 0);
            }
        }
    }

    #[test]
    fn two_thirds_cutoff_is_alias_free() {
        for n in [3usize, 4, 16, 64, 384, 400, 512] {
            let l = Lattice::new(n, 1, 1).unwrap();
            let m = l.dealias_cutoff(0);
            assert!(3 * m < n as i64, "n={n} m={m}");
        }
        assert_eq!(Lattice::new(512, 1, 1).unwrap().dealias_cutoff(0), 170);
        assert_eq!(Lattice::new(1, 1, 1).unwrap().dealias_cutoff(0), 0);
    }

    #[test]
    fn sizing_rule() {
        let l = Lattice::sized_for([128, 0, 5]).unwrap();
        assert!(l.dealias_cutoff(0) >= 128);
        assert!(l.dealias_cutoff(2) >= 5);
        assert_eq!(l.dims()[1], 1);
        assert!(l.dims()[0] <= 400);
    }

    #[test]
    fn rejects_bad_dims() {
        assert!(Lattice::new(0, 1, 1).is_err());
        assert!(Lattice::new(4, 4, 4).unwrap().with_dealias(4, 3).is_err());
    }
}
