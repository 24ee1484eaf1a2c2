//! One inflation experiment; writes the norm series when given an output directory.

use std::path::PathBuf;

use fnse::harness::{run_simulation, write_outputs, ExperimentConfig};

fn main() -> fnse::Result<()> {
    let mut args = std::env::args().skip(1);
    let r = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let cfg = ExperimentConfig::standard(r);
    let run = run_simulation(&cfg)?;
    print!("{}", run.report);
    println!("{:>10} {:>12} {:>12} {:>12} {:>12}", "t", "|u|_B lp", "|u10|_B lp", "|y|_inf", "|u|_inf");
    for row in run.report.series.rows().iter().step_by(5) {
        println!(
            "{:>10.4e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e}",
            row.t, row.u_besov_lp, row.u10_besov_lp, row.y_linf, row.u_linf
        );
    }
    if let Some(dir) = args.next().map(PathBuf::from) {
        write_outputs(&run, &dir)?;
        println!("wrote {}", dir.display());
    }
    Ok(())
}
