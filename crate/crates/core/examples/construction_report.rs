//! Wave vectors, parameter constraints and predicted scalings of the initial data.

use fnse::construction::{build_u0, data_lattice, predicted_bounds, validate_parameters, InflationConfig};
use fnse::harness::initial_norms;

fn main() -> fnse::Result<()> {
    let r = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(4);
    let (cfg, notes) = InflationConfig::default_point(r, 1.0, 0.45, f64::INFINITY);
    let cfg = cfg.with_k(4);
    for n in notes {
        println!("note: {n}");
    }
    println!("{}", validate_parameters(&cfg));
    for (i, pair) in cfg.wave_pairs()?.iter().enumerate() {
        println!("pair {i}: k = {:?}  k' = {:?}", pair.k, pair.k_prime);
    }
    let u0 = build_u0(&cfg, data_lattice(&cfg)?)?;
    let (lp, heat) = initial_norms(&u0, cfg.alpha)?;
    let pred = predicted_bounds(&cfg);
    println!("|u0|_B^-1: lp {lp:.5}  heat {heat:.5}  (target scale r^-beta = {:.5})", pred.u0_besov);
    println!("floor r^(1-2 beta)(1-B) = {:.5}", pred.certified_floor);
    Ok(())
}
