//! Distance from a state to the family of traveling waves.

use super::newton::stokes_newton;
use super::StokesWave;
use crate::error::{Error, Result};
use crate::spectral::TWO_PI;
use crate::waterwave::WaterState;
use num_complex::Complex64;

/// Precomputed amplitude grid of traveling waves, shareable across threads.
pub struct StokesFamily {
    gammas: Vec<f64>,
    waves: Vec<StokesWave>,
    m: i64,
}

/// Result of a family fit: the minimizing distance, amplitude and phase.
#[derive(Debug, Clone, Copy)]
pub struct FamilyFit {
    pub distance: f64,
    pub gamma: f64,
    pub phase: f64,
}

impl StokesFamily {
    /// Solve the traveling-wave problem on a uniform amplitude grid.
    pub fn build(gamma_max: f64, points: usize, n_modes: i64, tol: f64) -> Result<Self> {
        assert!(points >= 2);
        let gammas: Vec<f64> = (0..points)
            .map(|i| gamma_max * i as f64 / (points - 1) as f64)
            .collect();
        let mut waves = Vec::with_capacity(points);
        for &g in &gammas {
            waves.push(stokes_newton(g, n_modes, tol)?);
        }
        Ok(StokesFamily {
            gammas,
            waves,
            m: n_modes.max(4),
        })
    }

    pub fn gamma_max(&self) -> f64 {
        *self.gammas.last().unwrap()
    }

    pub fn wave_at_grid(&self, i: usize) -> &StokesWave {
        &self.waves[i]
    }

    /// Wave at an off-grid amplitude by cubic interpolation of coefficients.
    pub fn interpolate(&self, gamma: f64) -> StokesWave {
        let n = self.gammas.len();
        let h = self.gammas[1] - self.gammas[0];
        let pos = (gamma - self.gammas[0]) / h;
        let i1 = (pos.floor() as usize).min(n - 2).max(1).min(n - 3);
        // 4-point Lagrange on nodes i1-1 .. i1+2
        let t = pos - i1 as f64;
        let w = [
            -t * (t - 1.0) * (t - 2.0) / 6.0,
            (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
            -(t + 1.0) * t * (t - 2.0) / 2.0,
            (t + 1.0) * t * (t - 1.0) / 6.0,
        ];
        let idx = [i1 - 1, i1, i1 + 1, i1 + 2];
        let m = self.m;
        let len = (2 * m + 1) as usize;
        let mut fc = vec![Complex64::default(); len];
        let mut gc = vec![Complex64::default(); len];
        let mut omega = 0.0;
        for (wi, &ii) in w.iter().zip(&idx) {
            let wave = &self.waves[ii];
            omega += wi * wave.omega();
            for k in -m..=m {
                fc[(k + m) as usize] += wave.f_coeff(k) * Complex64::new(*wi, 0.0);
                gc[(k + m) as usize] += wave.g_coeff(k) * Complex64::new(*wi, 0.0);
            }
        }
        StokesWave::from_parts(gamma.max(0.0), omega, m, fc, gc)
    }

    /// L2 distance from the state offset to the best translated profile of a
    /// given wave, minimized over the profile phase by dense correlation
    /// plus a parabolic refinement.
    fn distance_to_wave(&self, state: &WaterState, wave: &StokesWave, n_phase: usize) -> (f64, f64) {
        let grid = state.grid();
        let qi = grid.q().round() as i64;
        let offset = state.offset();
        let m = self.m;

        let norm_state: f64 = offset.l2_norm();
        let norm_wave_sq: f64 = (-m..=m)
            .map(|k| wave.f_coeff(k).norm_sqr())
            .sum::<f64>()
            * grid.length();

        // cross-correlation coefficients: <offset, F(.+psi)> as a trig poly in psi
        let cross: Vec<Complex64> = (-m..=m)
            .map(|k| {
                if (k * qi).abs() >= (grid.n() / 2) as i64 {
                    Complex64::default()
                } else {
                    offset.coeff(k * qi) * wave.f_coeff(k).conj()
                }
            })
            .collect();

        let dist_sq = |psi: f64| -> f64 {
            let mut corr = Complex64::default();
            for (j, k) in (-m..=m).enumerate() {
                corr += cross[j] * Complex64::from_polar(1.0, -(k as f64) * psi);
            }
            (norm_state * norm_state + norm_wave_sq - 2.0 * corr.re).max(0.0)
        };

        let mut best = (f64::INFINITY, 0.0);
        for i in 0..n_phase {
            let psi = TWO_PI * i as f64 / n_phase as f64;
            let d = dist_sq(psi);
            if d < best.0 {
                best = (d, psi);
            }
        }
        // three-point parabolic refinement
        let hpsi = TWO_PI / n_phase as f64;
        let (d0, psi0) = best;
        let dm = dist_sq(psi0 - hpsi);
        let dp = dist_sq(psi0 + hpsi);
        let denom = dm - 2.0 * d0 + dp;
        let psi_star = if denom.abs() > 1e-300 {
            psi0 + 0.5 * hpsi * (dm - dp) / denom
        } else {
            psi0
        };
        (dist_sq(psi_star).max(0.0).sqrt(), psi_star)
    }

    /// Global fit over amplitude (grid scan plus golden-section refinement
    /// on interpolated coefficients) and phase (correlation).
    pub fn distance(&self, state: &WaterState, n_phase: usize) -> Result<FamilyFit> {
        let grid = state.grid();
        let qi = grid.q().round() as i64;
        if qi < 1 || (grid.q() - qi as f64).abs() > 1e-9 {
            return Err(Error::IncompatiblePeriod(
                "family distance needs an integer period factor".into(),
            ));
        }
        let t = state.t();

        let mut best_i = 0;
        let mut best = f64::INFINITY;
        let mut best_psi = 0.0;
        for (i, wave) in self.waves.iter().enumerate() {
            let (d, psi) = self.distance_to_wave(state, wave, n_phase);
            if d < best {
                best = d;
                best_i = i;
                best_psi = psi;
            }
        }

        // golden-section on gamma between the bracketing neighbors
        let lo = if best_i == 0 { self.gammas[0] } else { self.gammas[best_i - 1] };
        let hi = if best_i + 1 == self.gammas.len() {
            self.gammas[best_i]
        } else {
            self.gammas[best_i + 1]
        };
        let mut a = lo;
        let mut b = hi;
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let eval = |g: f64| -> (f64, f64) {
            let wave = self.interpolate(g);
            self.distance_to_wave(state, &wave, n_phase)
        };
        let mut x1 = b - phi * (b - a);
        let mut x2 = a + phi * (b - a);
        let mut f1 = eval(x1);
        let mut f2 = eval(x2);
        for _ in 0..40 {
            if f1.0 < f2.0 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - phi * (b - a);
                f1 = eval(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + phi * (b - a);
                f2 = eval(x2);
            }
            if (b - a).abs() < 1e-10 {
                break;
            }
        }
        let (gamma_star, (dist, psi)) = if f1.0 < f2.0 { (x1, f1) } else { (x2, f2) };

        let (distance, gamma, psi_star) = if dist < best {
            (dist, gamma_star, psi)
        } else {
            (best, self.gammas[best_i], best_psi)
        };
        let omega = self.interpolate(gamma).omega();
        let phase = (psi_star - omega * t).rem_euclid(TWO_PI);
        Ok(FamilyFit {
            distance,
            gamma,
            phase,
        })
    }
}

/// Convenience: distance of a state to a freshly built family.
pub fn family_distance(
    state: &WaterState,
    gamma_max: f64,
    points: usize,
    n_modes: i64,
    tol: f64,
    n_phase: usize,
) -> Result<FamilyFit> {
    StokesFamily::build(gamma_max, points, n_modes, tol)?.distance(state, n_phase)
}
