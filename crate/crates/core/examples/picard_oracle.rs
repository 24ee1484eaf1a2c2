//! Closed-form first Picard iterate: the resonant term lands on the lowest mode.

use fnse::besov::BesovIndex;
use fnse::construction::InflationConfig;
use fnse::oracles::{resonant_amplitude, u1_closed_form, TermClass};

fn main() -> fnse::Result<()> {
    let cfg = InflationConfig::default_point(3, 1.0, 0.45, f64::INFINITY).0.with_k(4);
    let first = u1_closed_form(&cfg)?;
    let all = first.total();
    for class in [TermClass::Resonant, TermClass::Difference, TermClass::Sum] {
        println!("{class:?}: {} terms", all.count(class));
    }
    let idx = BesovIndex::sup(1.0, 1.0)?;
    for t in [cfg.window_start(), 0.5 * cfg.final_time(), cfg.final_time()] {
        println!(
            "t = {t:.4}  eta amplitude {:.5}  |u10|_B {:.5}  |u11|_inf {:.5}  |u12|_inf {:.5}",
            resonant_amplitude(&first, t),
            first.resonant.besov(t, &idx)?,
            first.difference.linf(t)?,
            first.sum.linf(t)?,
        );
    }
    Ok(())
}
