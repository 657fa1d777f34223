//! Traveling periodic waves: small-amplitude expansion, a Newton solver on
//! the relative-equilibrium condition, evaluation onto simulation grids,
//! distance to the traveling-wave family, and Eulerian elevation.

mod eulerian;
mod family;
mod newton;

#[cfg(test)]
mod tests;

pub use eulerian::{elevation, harmonic_amplitudes, EulerianElevation};
pub use family::{family_distance, FamilyFit, StokesFamily};
pub use newton::stokes_newton;

use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};
use crate::waterwave::WaterState;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Largest amplitude the expansion accepts.
pub const EXPANSION_MAX_EPS: f64 = 0.2;
/// Largest amplitude the Newton solver accepts.
pub const NEWTON_MAX_EPS: f64 = 0.15;

/// A traveling profile zeta = alpha + F(alpha + omega t), D_t zeta = G(...).
///
/// Coefficients are stored in value convention, F = sum_k fc[k] e^{ik Gamma}
/// on the 2 pi torus; fc(k) is purely imaginary and gc(k) purely real for
/// the symmetric waves constructed here (profile even about the crest).
#[derive(Debug, Clone)]
pub struct StokesWave {
    eps: f64,
    omega: f64,
    m: i64,
    fc: Vec<Complex64>,
    gc: Vec<Complex64>,
}

impl StokesWave {
    pub(crate) fn from_parts(eps: f64, omega: f64, m: i64, fc: Vec<Complex64>, gc: Vec<Complex64>) -> Self {
        assert_eq!(fc.len(), (2 * m + 1) as usize);
        assert_eq!(gc.len(), (2 * m + 1) as usize);
        StokesWave { eps, omega, m, fc, gc }
    }

    pub fn zero(m: i64) -> Self {
        let len = (2 * m + 1) as usize;
        StokesWave {
            eps: 0.0,
            omega: 1.0,
            m,
            fc: vec![Complex64::default(); len],
            gc: vec![Complex64::default(); len],
        }
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Highest retained profile mode.
    pub fn modes(&self) -> i64 {
        self.m
    }

    /// F coefficient of e^{ik Gamma}.
    pub fn f_coeff(&self, k: i64) -> Complex64 {
        if k.abs() > self.m {
            Complex64::default()
        } else {
            self.fc[(k + self.m) as usize]
        }
    }

    /// G coefficient of e^{ik Gamma}.
    pub fn g_coeff(&self, k: i64) -> Complex64 {
        if k.abs() > self.m {
            Complex64::default()
        } else {
            self.gc[(k + self.m) as usize]
        }
    }

    /// Evaluate the pair (F, G) at a point Gamma.
    pub fn profile_at(&self, gamma: f64) -> (Complex64, Complex64) {
        let mut f = Complex64::default();
        let mut g = Complex64::default();
        for k in -self.m..=self.m {
            let phase = Complex64::from_polar(1.0, k as f64 * gamma);
            f += self.f_coeff(k) * phase;
            g += self.g_coeff(k) * phase;
        }
        (f, g)
    }

    /// Worst deviation of the coefficients from the symmetry class
    /// (Im-only F, Re-only G).
    pub fn symmetry_defect(&self) -> f64 {
        let f = self.fc.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
        let g = self.gc.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
        f.max(g)
    }
}

/// Fourth-order small-amplitude expansion of the traveling wave.
///
/// F = i eps e^{i Gamma} + i eps^2 + (i/2) eps^3 e^{-i Gamma},
/// omega = 1 + eps^2 / 2, and G follows from the traveling identity
/// D_t zeta = omega F' + b (1 + F') with b = -omega eps^2.
pub fn stokes_expansion(eps: f64) -> Result<StokesWave> {
    if !(0.0..=EXPANSION_MAX_EPS).contains(&eps) {
        return Err(Error::AmplitudeOutOfRange(eps, EXPANSION_MAX_EPS));
    }
    let omega = 1.0 + eps * eps / 2.0;
    let m = 2;
    let mut wave = StokesWave::zero(m);
    wave.eps = eps;
    wave.omega = omega;
    let at = |w: &mut StokesWave, k: i64, f: Complex64, g: Complex64| {
        w.fc[(k + m) as usize] = f;
        w.gc[(k + m) as usize] = g;
    };
    at(&mut wave, 1, I * eps, Complex64::new(-eps + 0.5 * eps.powi(3), 0.0));
    at(&mut wave, 0, I * eps * eps, Complex64::new(-eps * eps, 0.0));
    at(&mut wave, -1, I * 0.5 * eps.powi(3), Complex64::new(0.5 * eps.powi(3), 0.0));
    Ok(wave)
}

/// Sample the traveling wave onto a simulation grid at time t with an extra
/// phase shift. The grid period factor must be a positive integer so the
/// profile modes embed exactly.
pub fn stokes_state(wave: &StokesWave, t: f64, grid: Grid, phase: f64) -> Result<WaterState> {
    let q = grid.q();
    let qi = q.round() as i64;
    if qi < 1 || (q - qi as f64).abs() > 1e-9 {
        return Err(Error::IncompatiblePeriod(format!(
            "grid period factor {q} is not a positive integer"
        )));
    }
    if wave.m * qi >= (grid.n() / 2) as i64 {
        return Err(Error::IncompatiblePeriod(format!(
            "grid with n = {} cannot hold profile mode {} at period factor {qi}",
            grid.n(),
            wave.m
        )));
    }
    let mut fco = vec![Complex64::default(); grid.n()];
    let mut gco = vec![Complex64::default(); grid.n()];
    let shift = phase + wave.omega * t;
    for k in -wave.m..=wave.m {
        let rot = Complex64::from_polar(1.0, k as f64 * shift);
        let bin = grid.bin(k * qi);
        fco[bin] = wave.f_coeff(k) * rot * grid.length();
        gco[bin] = wave.g_coeff(k) * rot * grid.length();
    }
    let offset = Field::from_spectrum(grid, fco);
    let u = Field::from_spectrum(grid, gco);
    Ok(WaterState::new(grid, t, offset, u))
}
