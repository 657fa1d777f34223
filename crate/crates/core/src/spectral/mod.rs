//! Periodic Fourier analysis and singular-integral operators.

mod fft;
mod field;
mod grid;
mod hilbert;


pub use field::{identity_field, Field, TWO_PI};
pub use grid::Grid;
pub use hilbert::{
    commutator_h0, expansion_h1, expansion_h2, flat_hilbert, one_minus_h0, one_plus_h0,
    solve_real, CurveKernel, CHORD_ARC_THRESHOLD,
};

use crate::error::Result;
use num_complex::Complex64;

/// Default tolerance for the real-equation fixed-point solver.
pub const SOLVE_TOL: f64 = 1e-12;
/// Iteration cap for the real-equation fixed-point solver.
pub const SOLVE_MAX_ITER: usize = 50;

/// Mean value M(f) = (1/2 pi q) * integral of f.
pub fn mean(f: &Field) -> Complex64 {
    f.mean()
}

/// Curve Hilbert transform with chord-arc precondition check.
pub fn curve_hilbert(zeta: &Field, f: &Field) -> Result<Field> {
    Ok(CurveKernel::checked(zeta)?.hilbert(f))
}

/// S_zeta(f, g) = [g, H_zeta](f_alpha / zeta_alpha), checked.
pub fn commutator_bracket(zeta: &Field, g: &Field, f: &Field) -> Result<Field> {
    Ok(CurveKernel::checked(zeta)?.commutator(f, g))
}

/// Square-difference kernel quadrature, checked.
pub fn square_kernel(zeta: &Field, v: &Field, f: &Field) -> Result<Field> {
    Ok(CurveKernel::checked(zeta)?.square(v, f))
}

/// Double layer potential, checked.
pub fn double_layer(zeta: &Field, f: &Field) -> Result<Field> {
    Ok(CurveKernel::checked(zeta)?.double_layer(f))
}

/// Adjoint double layer potential, checked.
pub fn adjoint_double_layer(zeta: &Field, f: &Field) -> Result<Field> {
    Ok(CurveKernel::checked(zeta)?.adjoint_double_layer(f))
}

/// Solve (I - H_zeta) h = g (or the weighted variant) for real h, checked.
pub fn solve_real_hilbert(zeta: &Field, g: &Field, weighted: bool) -> Result<Field> {
    let kernel = CurveKernel::checked(zeta)?;
    let weight = if weighted {
        let dz = Field::from_samples(zeta.grid(), kernel.dzeta().to_vec());
        Some(dz.conj())
    } else {
        None
    };
    solve_real(&kernel, g, weight.as_ref(), None, SOLVE_TOL, SOLVE_MAX_ITER)
}
