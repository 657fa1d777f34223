//! Gauss-Newton solve of the relative-equilibrium condition.
//!
//! The unknowns are the symmetry-class coefficient components of (F, G)
//! plus the speed omega; the amplitude is pinned through Im F(1) = eps.
//! The residual stacks the traveling condition (the evolution right-hand
//! side must equal omega times the profile derivative) with the two
//! holomorphic compatibility conditions, evaluated on a profile grid.

use super::{stokes_expansion, stokes_state, StokesWave, NEWTON_MAX_EPS};
use crate::error::{Error, Result};
use crate::spectral::{Field, Grid};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);
const CONTINUATION_START: f64 = 0.05;
const CONTINUATION_STEP: f64 = 0.01;
const MAX_GN_ITER: usize = 40;

struct Problem {
    m: i64,
    grid: Grid,
    eps: f64,
}

impl Problem {
    fn unknown_count(&self) -> usize {
        // Im F(k) for k != 1, Re G(k) for all k, omega
        (2 * self.m) as usize + (2 * self.m + 1) as usize + 1
    }

    fn pack(&self, wave: &StokesWave) -> DVector<f64> {
        let mut x = DVector::zeros(self.unknown_count());
        let mut idx = 0;
        for k in -self.m..=self.m {
            if k == 1 {
                continue;
            }
            x[idx] = wave.f_coeff(k).im;
            idx += 1;
        }
        for k in -self.m..=self.m {
            x[idx] = wave.g_coeff(k).re;
            idx += 1;
        }
        x[idx] = wave.omega();
        x
    }

    fn unpack(&self, x: &DVector<f64>) -> StokesWave {
        let len = (2 * self.m + 1) as usize;
        let mut fc = vec![Complex64::default(); len];
        let mut gc = vec![Complex64::default(); len];
        let mut idx = 0;
        for k in -self.m..=self.m {
            if k == 1 {
                continue;
            }
            fc[(k + self.m) as usize] = I * x[idx];
            idx += 1;
        }
        fc[(1 + self.m) as usize] = I * self.eps;
        for k in -self.m..=self.m {
            gc[(k + self.m) as usize] = Complex64::new(x[idx], 0.0);
            idx += 1;
        }
        let omega = x[idx];
        StokesWave::from_parts(self.eps, omega, self.m, fc, gc)
    }

    /// Residual vector; base quantities, when supplied, warm-start the solves.
    fn residual(&self, x: &DVector<f64>, warm: Option<&(Field, Field)>) -> Result<DVector<f64>> {
        let wave = self.unpack(x);
        let state = stokes_state(&wave, 0.0, self.grid, 0.0)?;
        let q = state.quantities_with_guess(warm.map(|(b, a)| (b, a)))?;
        let (b, a) = (&q.b, &q.a);
        let kernel = &q.kernel;
        let zeta_a = state.zeta_alpha();
        let omega = wave.omega();

        // traveling condition on both components
        let r1 = state
            .u()
            .sub(&b.mul(&zeta_a))
            .sub(&state.offset().derivative().scale(Complex64::new(omega, 0.0)));
        let accel = a.mul(&zeta_a).scale(I).map(|v| v - I);
        let du = state.u().derivative();
        let r2 = accel
            .sub(&b.mul(&du))
            .sub(&du.scale(Complex64::new(omega, 0.0)));
        // holomorphic compatibility
        let conj_off = state.offset().conj();
        let r3 = conj_off.sub(&kernel.hilbert(&conj_off));
        let conj_u = state.u().conj();
        let r4 = conj_u.sub(&kernel.hilbert(&conj_u));

        let norm = 1.0 / self.grid.length();
        let mut out = DVector::zeros(4 * (2 * self.m + 1) as usize);
        let mut idx = 0;
        for k in -self.m..=self.m {
            // value-convention coefficients of the residual fields
            out[idx] = (r1.coeff(k) * norm).re;
            idx += 1;
        }
        for k in -self.m..=self.m {
            out[idx] = (r2.coeff(k) * norm).im;
            idx += 1;
        }
        for k in -self.m..=self.m {
            out[idx] = (r3.coeff(k) * norm).im;
            idx += 1;
        }
        for k in -self.m..=self.m {
            out[idx] = (r4.coeff(k) * norm).re;
            idx += 1;
        }
        Ok(out)
    }
}

fn solve_at(eps: f64, guess: &StokesWave, m: i64, grid: Grid, tol: f64) -> Result<StokesWave> {
    let problem = Problem { m, grid, eps };
    let mut x = problem.pack(guess);
    let mut warm: Option<(Field, Field)> = None;

    let mut residual = problem.residual(&x, warm.as_ref())?;
    for iteration in 0..MAX_GN_ITER {
        let rnorm = residual.norm();
        if rnorm <= tol {
            return Ok(problem.unpack(&x));
        }
        // cache quantities of the current iterate for warm starting
        {
            let wave = problem.unpack(&x);
            let state = stokes_state(&wave, 0.0, grid, 0.0)?;
            let q = state.quantities_with_guess(warm.as_ref().map(|(b, a)| (b, a)))?;
            warm = Some((q.b.clone(), q.a.clone()));
        }

        // finite-difference Jacobian
        let nuk = problem.unknown_count();
        let mut jac = DMatrix::zeros(residual.len(), nuk);
        let h = 1e-7;
        for col in 0..nuk {
            let mut xp = x.clone();
            xp[col] += h;
            let rp = problem.residual(&xp, warm.as_ref())?;
            for row in 0..residual.len() {
                jac[(row, col)] = (rp[row] - residual[row]) / h;
            }
        }

        // damped Gauss-Newton step via regularized normal equations
        let jt = jac.transpose();
        let mut jtj = &jt * &jac;
        for d in 0..nuk {
            jtj[(d, d)] += 1e-14;
        }
        let rhs = &jt * &residual;
        let delta = jtj
            .cholesky()
            .map(|ch| ch.solve(&rhs))
            .ok_or(Error::NewtonDiverged {
                iterations: iteration,
                residual: rnorm,
            })?;

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..6 {
            let xn = &x - &delta * step;
            match problem.residual(&xn, warm.as_ref()) {
                Ok(rn) if rn.norm() < rnorm => {
                    x = xn;
                    residual = rn;
                    accepted = true;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !accepted {
            return Err(Error::NewtonDiverged {
                iterations: iteration,
                residual: rnorm,
            });
        }
    }
    let rnorm = residual.norm();
    if rnorm <= tol {
        Ok(problem.unpack(&x))
    } else {
        Err(Error::NewtonDiverged {
            iterations: MAX_GN_ITER,
            residual: rnorm,
        })
    }
}

/// Solve for the traveling wave of amplitude `eps`, with continuation in
/// amplitude when started above the cold-start range.
pub fn stokes_newton(eps: f64, n_modes: i64, tol: f64) -> Result<StokesWave> {
    if !(0.0..=NEWTON_MAX_EPS).contains(&eps) {
        return Err(Error::AmplitudeOutOfRange(eps, NEWTON_MAX_EPS));
    }
    if eps == 0.0 {
        return Ok(StokesWave::zero(n_modes));
    }
    let m = n_modes.max(4);
    let n_grid = (8 * m as usize).next_power_of_two().max(128);
    let grid = Grid::new(1.0, n_grid)?;

    let widen = |w: &StokesWave| -> StokesWave {
        let len = (2 * m + 1) as usize;
        let mut fc = vec![Complex64::default(); len];
        let mut gc = vec![Complex64::default(); len];
        for k in -w.modes()..=w.modes() {
            if k.abs() <= m {
                fc[(k + m) as usize] = w.f_coeff(k);
                gc[(k + m) as usize] = w.g_coeff(k);
            }
        }
        StokesWave::from_parts(w.eps(), w.omega(), m, fc, gc)
    };

    if eps <= CONTINUATION_START {
        let guess = widen(&stokes_expansion(eps)?);
        return solve_at(eps, &guess, m, grid, tol);
    }

    // continuation upward from the cold-start range
    let mut current_eps = CONTINUATION_START;
    let mut wave = solve_at(
        current_eps,
        &widen(&stokes_expansion(current_eps)?),
        m,
        grid,
        tol,
    )?;
    while current_eps < eps - 1e-12 {
        current_eps = (current_eps + CONTINUATION_STEP).min(eps);
        let mut guess = wave.clone();
        // rescale the pinned coefficient toward the target amplitude
        guess = StokesWave::from_parts(
            current_eps,
            guess.omega(),
            m,
            {
                let mut fc: Vec<Complex64> = (-m..=m).map(|k| guess.f_coeff(k)).collect();
                fc[(1 + m) as usize] = I * current_eps;
                fc
            },
            (-m..=m).map(|k| guess.g_coeff(k)).collect(),
        );
        wave = solve_at(current_eps, &guess, m, grid, tol)?;
    }
    Ok(wave)
}
