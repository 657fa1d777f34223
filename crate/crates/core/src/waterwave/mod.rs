//! Evolution of the free interface in conformal modified-Lagrangian
//! coordinates: state representation, the auxiliary fields b and A, the
//! explicit right-hand side, an RK4 stepper with dealiasing and spectral
//! filtering, holomorphicity diagnostics, and the cubic forcing.

mod energy;
mod state;
mod stepper;


pub use energy::{basic_energy, energy_derivative_check};
pub use state::{holo_residuals, theta, HoloResiduals, WaterState};
pub use stepper::{evolve, step_rk4, Stepper};

use crate::spectral::Field;
use crate::Result;
use num_complex::Complex64;

/// Krasny-filter threshold relative to the peak spectral amplitude.
pub const KRASNY_THRESHOLD: f64 = 1e-13;

/// Advective velocity b of the state (cached).
pub fn compute_b(state: &WaterState) -> Result<Field> {
    Ok(state.quantities()?.b.clone())
}

/// Rayleigh-Taylor coefficient A of the state (cached).
pub fn compute_a(state: &WaterState) -> Result<Field> {
    Ok(state.quantities()?.a.clone())
}

/// The composite quantity (a_t / a) in interface coordinates.
pub fn compute_at_over_a(state: &WaterState) -> Result<Field> {
    state.at_over_a()
}

/// d/dt of (zeta - alpha, D_t zeta), dealiased.
pub fn time_derivative(state: &WaterState) -> Result<(Field, Field)> {
    state.time_derivative()
}

/// Cubic forcing (G1, G2) of the evolution of theta.
pub fn cubic_forcing(state: &WaterState) -> Result<(Field, Field)> {
    state.cubic_forcing()
}

pub(crate) const IM: Complex64 = Complex64::new(0.0, 1.0);
