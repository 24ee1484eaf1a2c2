//! Littlewood-Paley and heat-semigroup Besov norms, and how far apart they sit.

use fnse::besov::{besov_norm_heat, besov_norm_lp, plane_wave_heat_norm, BesovIndex, HeatGrid};
use fnse::construction::V;
use fnse::harness::equivalence_band;
use fnse::spectral::{Lattice, Phase, SpectralField};

fn main() -> fnse::Result<()> {
    let lattice = Lattice::new(64, 1, 8)?;
    let idx = BesovIndex::sup(1.0, 1.0)?;
    let grid = HeatGrid::standard(&lattice, 1.0);
    println!("{:>4} {:>10} {:>10} {:>10}", "|k|", "lp", "heat", "exact");
    for k in [1, 2, 3, 4, 7, 8, 16] {
        let u = SpectralField::plane_wave(lattice, [k, 0, 0], V, Phase::Cos, 1.0)?;
        let lp = besov_norm_lp(&u, &idx).value;
        let heat = besov_norm_heat(&u, &idx, &grid)?.value;
        println!("{k:>4} {lp:>10.6} {heat:>10.6} {:>10.6}", plane_wave_heat_norm(k as f64, 1.0, 1.0));
    }
    let band = equivalence_band(1.0, 7)?;
    println!("heat / lp over {} fields: [{:.4}, {:.4}]", band.samples, band.c_low, band.c_high);
    Ok(())
}
