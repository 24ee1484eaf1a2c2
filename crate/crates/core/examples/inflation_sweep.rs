//! Inflation ratio against the number of wave pairs, with fitted exponents.

use fnse::harness::{run_sweep, ExperimentConfig};

fn main() -> fnse::Result<()> {
    let sweep = run_sweep(&ExperimentConfig::standard(2), &[2, 3, 4, 5])?;
    print!("{}", sweep.to_csv());
    print!("{}", sweep.fit_csv());
    println!("ratio strictly increasing: {}", sweep.ratio_increasing());
    Ok(())
}
