//! Truncated Fourier representation of periodic vector fields on `[0, 2pi)^3`
//! and the exact linear operators acting on it.

mod fft;
mod field;
mod lattice;
mod ops;

pub use field::{
    transform_forward, transform_forward_checked, transform_inverse, Phase, PhysicalField,
    ScalarField, SpectralField, TensorField,
};
pub use lattice::{mode_dot, mode_norm_sq, Lattice, Mode};
pub use ops::{
    apply_decay, convect, derivative, divergence, divergence_of_product, divergence_spectral,
    fractional_power, gradient, heat_semigroup, leray_project, leray_project_in_place, linf_norm,
    linf_norm_oversampled, projected_flux, rate_table, to_physical, FractionalParams,
};
