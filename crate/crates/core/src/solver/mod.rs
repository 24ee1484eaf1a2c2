//! Time integration of the fractional Navier-Stokes equations, the bilinear
//! Duhamel operator by quadrature, and the splitting `u = w - u1 + y` with
//! `w = e^{-t Lambda} u0` and `u1 = B(w, w)`.

mod decompose;
mod duhamel;
mod integrate;
mod snapshot;

pub use decompose::{decompose, decompose_by_quadrature, decompose_with_fault, g_terms, reconstruct_remainder, Decomposition, GTerms, Reconstruction};
pub use duhamel::{
    bilinear_b, bilinear_b_checked, relative_linf, EnsemblePath, FieldPath, FnPath, HeatPath, QuadratureResult,
    QUADRATURE_TOLERANCE,
};
pub use integrate::{mild_solve, DtPolicy, SolveOptions, TimeGrid, Trajectory};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};
