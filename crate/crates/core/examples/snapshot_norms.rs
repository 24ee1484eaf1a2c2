//! Write a snapshot file, read it back and evaluate its norms.

use fnse::besov::{besov_norm_lp, BesovIndex};
use fnse::construction::{build_u0, experiment_lattice, InflationConfig};
use fnse::solver::{read_snapshot, write_snapshot};
use fnse::spectral::linf_norm;

fn main() -> fnse::Result<()> {
    let cfg = InflationConfig::default_point(3, 1.0, 0.45, f64::INFINITY).0.with_k(4);
    let u0 = build_u0(&cfg, experiment_lattice(&cfg)?)?;
    let path = std::env::temp_dir().join("fnse_u0.fnss");
    write_snapshot(&path, &u0, &cfg.params()?, 0.0)?;
    let snap = read_snapshot(&path)?;
    let idx = BesovIndex::sup(1.0, snap.params.alpha())?;
    println!("{}: {} bytes", path.display(), std::fs::metadata(&path)?.len());
    println!("|u0|_inf = {:.6}  |u0|_B^-1 = {:.6}", linf_norm(&snap.field), besov_norm_lp(&snap.field, &idx).value);
    Ok(())
}
