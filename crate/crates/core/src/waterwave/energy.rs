//! Quadratic energy functional of a forced transport equation and its
//! time-derivative identity, used as a consistency diagnostic.

use super::state::WaterState;
use super::stepper::step_rk4;
use crate::spectral::Field;
use crate::Result;

/// E0 = integral of (1/A) |D_t Theta|^2 + i Theta d_alpha conj(Theta).
pub fn basic_energy(state: &WaterState, theta: &Field, dt_theta: &Field) -> Result<f64> {
    let a = super::compute_a(state)?;
    let grid = state.grid();
    let dtheta = theta.derivative();
    let mut acc = 0.0;
    for j in 0..grid.n() {
        let kinetic = dt_theta.samples()[j].norm_sqr() / a.samples()[j].re;
        let rotation = num_complex::Complex64::new(0.0, 1.0)
            * theta.samples()[j]
            * dtheta.samples()[j].conj();
        acc += kinetic + rotation.re;
    }
    Ok(acc * grid.spacing())
}

/// Compare a finite-difference dE0/dt along a short evolution with the
/// closed-form derivative built from the cubic forcing and a_t/a.
///
/// Theta is taken to be the holomorphic projection of the interface offset,
/// so the forcing is exactly the cubic pair (G1, G2).
pub fn energy_derivative_check(state: &WaterState, dt_probe: f64) -> Result<f64> {
    // five states centered at the current time
    let sp1 = step_rk4(state, dt_probe)?;
    let sp2 = step_rk4(&sp1, dt_probe)?;
    let sm1 = step_rk4(state, -dt_probe)?;
    let sm2 = step_rk4(&sm1, -dt_probe)?;
    let states = [&sm2, &sm1, state, &sp1, &sp2];

    let thetas: Vec<Field> = states
        .iter()
        .map(|s| s.theta_field())
        .collect::<Result<_>>()?;

    // D_t theta = centered d_t theta + b d_alpha theta at the three middle times
    let mut energies = Vec::new();
    for m in 1..4 {
        let ddt = thetas[m + 1]
            .sub(&thetas[m - 1])
            .scale(num_complex::Complex64::new(1.0 / (2.0 * dt_probe), 0.0));
        let b = super::compute_b(states[m])?;
        let dt_theta = ddt.add(&b.mul(&thetas[m].derivative()));
        energies.push(basic_energy(states[m], &thetas[m], &dt_theta)?);
    }
    let fd = (energies[2] - energies[0]) / (2.0 * dt_probe);

    // closed form at the center state
    let b = super::compute_b(state)?;
    let ddt_center = thetas[3]
        .sub(&thetas[1])
        .scale(num_complex::Complex64::new(1.0 / (2.0 * dt_probe), 0.0));
    let dt_theta = ddt_center.add(&b.mul(&thetas[2].derivative()));
    let (g1, g2) = state.cubic_forcing()?;
    let g = g1.add(&g2);
    let a = super::compute_a(state)?;
    let ata = state.at_over_a()?;
    let grid = state.grid();
    let mut rhs = 0.0;
    for j in 0..grid.n() {
        let aj = a.samples()[j].re;
        let dt_t = dt_theta.samples()[j];
        rhs += 2.0 / aj * (dt_t * g.samples()[j].conj()).re
            - ata.samples()[j].re / aj * dt_t.norm_sqr();
    }
    rhs *= grid.spacing();

    let scale = fd.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
    Ok((fd - rhs).abs() / scale)
}
