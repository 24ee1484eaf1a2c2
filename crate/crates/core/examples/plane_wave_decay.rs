//! A divergence-free plane wave is an exact solution: it only decays.

use fnse::construction::V;
use fnse::solver::{mild_solve, relative_linf, DtPolicy, SolveOptions, TimeGrid};
use fnse::spectral::{FractionalParams, Lattice, Phase, SpectralField};

fn main() -> fnse::Result<()> {
    let lattice = Lattice::new(32, 1, 32)?;
    let u0 = SpectralField::plane_wave(lattice, [2, 0, 0], V, Phase::Cos, 1.0)?;
    for alpha in [1.0, 1.25] {
        let params = FractionalParams::new(alpha, 1.0)?;
        let grid = TimeGrid::uniform(1.0, 4, DtPolicy::default())?;
        let traj = mild_solve(&u0, &params, &grid, SolveOptions::default())?;
        println!("alpha = {alpha}  ({} steps)", traj.steps());
        for (&t, u) in traj.times().iter().zip(traj.fields()) {
            let exact = u0.scaled((-params.rate(4) * t).exp());
            println!("  t = {t:.2}  rel err {:.2e}", relative_linf(u, &exact)?);
        }
    }
    Ok(())
}
