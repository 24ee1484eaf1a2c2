//! Quadratured bilinear term against the closed form, with a convergence check.

use fnse::construction::{build_u0, experiment_lattice, InflationConfig};
use fnse::oracles::u1_closed_form;
use fnse::quadrature::CompositeGauss;
use fnse::solver::{bilinear_b_checked, relative_linf, HeatPath};

fn main() -> fnse::Result<()> {
    let cfg = InflationConfig::default_point(2, 1.0, 0.4, f64::INFINITY).0.with_k(4);
    let lattice = experiment_lattice(&cfg)?;
    let params = cfg.params()?;
    let path = HeatPath::new(build_u0(&cfg, lattice)?, params);
    let exact = u1_closed_form(&cfg)?.total();
    for nodes in [16, 64] {
        let quad = CompositeGauss::with_total_nodes(nodes)?;
        for t in [1e-3, 1e-2, 1e-1] {
            let res = bilinear_b_checked(&path, &path, t, &params, &quad)?;
            let err = relative_linf(&res.field, &exact.to_field(lattice, t)?)?;
            println!("nodes {nodes:>3}  t = {t:.0e}  vs oracle {err:.2e}  doubling change {:.2e}  converged {}", res.change, res.converged);
        }
    }
    Ok(())
}
