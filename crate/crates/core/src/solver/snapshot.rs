//! Binary snapshot files.
//!
//! ```text
//! offset  size  content
//! 0       8     magic "FNSSNAP1"
//! 8       4     u32 format version (1)
//! 12      12    u32 N1, N2, N3
//! 24      24    f64 alpha, nu, t
//! 48      ...   coefficients: component-major, then flat index
//!               (i1 N2 + i2) N3 + i3, each as f64 re, f64 im
//! ```
//!
//! All integers and floats are little-endian. Index `i` on an axis of length
//! `N` holds frequency `i` for `i < ceil(N/2)` and `i - N` otherwise.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{FractionalParams, Lattice, SpectralField};

const MAGIC: &[u8; 8] = b"FNSSNAP1";
const VERSION: u32 = 1;

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub field: SpectralField,
    pub params: FractionalParams,
    pub t: f64,
}

pub fn write_snapshot(path: &Path, field: &SpectralField, params: &FractionalParams, t: f64) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    for n in field.lattice().dims() {
        let n = u32::try_from(n).map_err(|_| Error::Snapshot(format!("axis length {n} exceeds u32")))?;
        w.write_all(&n.to_le_bytes())?;
    }
    for x in [params.alpha(), params.nu(), t] {
        w.write_all(&x.to_le_bytes())?;
    }
    for comp in field.components() {
        for c in comp {
            w.write_all(&c.re.to_le_bytes())?;
            w.write_all(&c.im.to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

fn read_array<const N: usize>(r: &mut impl Read) -> Result<[u8; N]> {
    let mut buf = [0u8; N];
    r.read_exact(&mut buf)
        .map_err(|e| Error::Snapshot(format!("truncated header: {e}")))?;
    Ok(buf)
}

pub fn read_snapshot(path: &Path) -> Result<Snapshot> {
    let mut r = BufReader::new(File::open(path)?);
    if &read_array::<8>(&mut r)? != MAGIC {
        return Err(Error::Snapshot("missing magic bytes".into()));
    }
    let version = u32::from_le_bytes(read_array(&mut r)?);
    if version != VERSION {
        return Err(Error::Snapshot(format!("unsupported version {version}")));
    }
    let mut dims = [0usize; 3];
    for d in dims.iter_mut() {
        *d = u32::from_le_bytes(read_array(&mut r)?) as usize;
    }
    let alpha = f64::from_le_bytes(read_array(&mut r)?);
    let nu = f64::from_le_bytes(read_array(&mut r)?);
    let t = f64::from_le_bytes(read_array(&mut r)?);
    let lattice = Lattice::new(dims[0], dims[1], dims[2]).map_err(|e| Error::Snapshot(e.to_string()))?;
    let params = FractionalParams::new(alpha, nu).map_err(|e| Error::Snapshot(e.to_string()))?;
    let n = lattice.len();
    let mut bytes = Vec::with_capacity(3 * n * 16);
    r.read_to_end(&mut bytes)?;
    if bytes.len() != 3 * n * 16 {
        return Err(Error::Snapshot(format!(
            "expected {} coefficient bytes, found {}",
            3 * n * 16,
            bytes.len()
        )));
    }
    let mut comps: [Vec<Complex64>; 3] = Default::default();
    for (c, chunk) in bytes.chunks_exact(n * 16).enumerate() {
        comps[c] = chunk
            .chunks_exact(16)
            .map(|b| {
                let re = f64::from_le_bytes(b[..8].try_into().expect("8 bytes"));
                let im = f64::from_le_bytes(b[8..].try_into().expect("8 bytes"));
                Complex64::new(re, im)
            })
            .collect();
    }
    Ok(Snapshot {
        field: SpectralField::from_components(lattice, comps)?,
        params,
        t,
    })
}
