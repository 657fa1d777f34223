//! The interface state and its derived quantities.

use super::IM;
use crate::error::{Error, Result};
use crate::spectral::{identity_field, solve_real, CurveKernel, Field, Grid, SOLVE_MAX_ITER, SOLVE_TOL};
use num_complex::Complex64;
use std::sync::{Arc, OnceLock};

/// Cached per-state quantities: the curve kernel and the fields b, A.
pub(crate) struct Quantities {
    pub kernel: Arc<CurveKernel>,
    pub b: Field,
    pub a: Field,
}

/// Interface state: the pair (zeta - alpha, D_t zeta) at time t.
pub struct WaterState {
    grid: Grid,
    t: f64,
    offset: Field,
    u: Field,
    quantities: OnceLock<std::result::Result<Quantities, Error>>,
}

impl Clone for WaterState {
    fn clone(&self) -> Self {
        WaterState {
            grid: self.grid,
            t: self.t,
            offset: self.offset.clone(),
            u: self.u.clone(),
            quantities: OnceLock::new(),
        }
    }
}

impl WaterState {
    pub fn new(grid: Grid, t: f64, offset: Field, u: Field) -> Self {
        assert_eq!(offset.grid(), grid);
        assert_eq!(u.grid(), grid);
        WaterState {
            grid,
            t,
            offset,
            u,
            quantities: OnceLock::new(),
        }
    }

    pub fn rest(grid: Grid) -> Self {
        WaterState::new(grid, 0.0, Field::zeros(grid), Field::zeros(grid))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    /// zeta - alpha.
    pub fn offset(&self) -> &Field {
        &self.offset
    }

    /// D_t zeta.
    pub fn u(&self) -> &Field {
        &self.u
    }

    /// Full parametrization zeta = alpha + offset.
    pub fn zeta(&self) -> Field {
        self.offset.add(&identity_field(self.grid))
    }

    /// zeta_alpha = 1 + offset_alpha.
    pub fn zeta_alpha(&self) -> Field {
        self.offset
            .derivative()
            .map(|v| v + Complex64::new(1.0, 0.0))
    }

    pub(crate) fn quantities(&self) -> Result<&Quantities> {
        self.quantities_with_guess(None)
    }

    /// Compute (or fetch) kernel, b, A; optional warm starts for the solves.
    pub(crate) fn quantities_with_guess(
        &self,
        guess: Option<(&Field, &Field)>,
    ) -> Result<&Quantities> {
        let computed = self.quantities.get_or_init(|| {
            let kernel = Arc::new(CurveKernel::new(&self.zeta()));
            let zeta_bar_minus_alpha = self.offset.conj();

            // (I - H_zeta) b = -[u, H_zeta]((conj zeta_a - 1)/zeta_a)
            let rhs_b = kernel
                .commutator(&zeta_bar_minus_alpha, &self.u)
                .scale(Complex64::new(-1.0, 0.0));
            let b = solve_real(
                &kernel,
                &rhs_b,
                None,
                guess.map(|g| g.0),
                SOLVE_TOL,
                SOLVE_MAX_ITER,
            )?;

            // A by one extra fixed-point pass through D_t^2 zeta = -i + i A zeta_a.
            let zeta_a = self.zeta_alpha();
            let u_bar = self.u.conj();
            let mut a = match guess {
                Some((_, a0)) => a0.clone(),
                None => Field::constant(self.grid, Complex64::new(1.0, 0.0)),
            };
            let mut iterations = 0usize;
            let mut best_change = f64::INFINITY;
            let mut since_improve = 0usize;
            loop {
                let dtt = a.mul(&zeta_a).scale(IM).map(|v| v - IM);
                let (t1, t2) = kernel.commutator2(&u_bar, &self.u, &zeta_bar_minus_alpha, &dtt);
                let rhs_a = t1.add(&t2).scale(IM);
                let a_minus_1 = solve_real(
                    &kernel,
                    &rhs_a,
                    None,
                    Some(&a.map(|v| v - Complex64::new(1.0, 0.0))),
                    SOLVE_TOL,
                    SOLVE_MAX_ITER,
                )?;
                let next = a_minus_1.map(|v| v + Complex64::new(1.0, 0.0));
                let change = next.sub(&a).l2_norm();
                a = next;
                iterations += 1;
                if change <= SOLVE_TOL {
                    break;
                }
                if change < best_change {
                    best_change = change;
                    since_improve = 0;
                } else {
                    since_improve += 1;
                }
                if since_improve >= 3 && best_change <= 1e5 * SOLVE_TOL {
                    break;
                }
                if iterations >= 25 {
                    if best_change <= 1e5 * SOLVE_TOL {
                        break;
                    }
                    return Err(Error::NoConvergence {
                        iterations,
                        residual: change,
                    });
                }
            }
            Ok(Quantities { kernel, b, a })
        });
        match computed {
            Ok(q) => Ok(q),
            Err(e) => Err(e.clone()),
        }
    }

    /// D_t^2 zeta = -i + i A zeta_alpha.
    pub fn acceleration(&self) -> Result<Field> {
        let q = self.quantities()?;
        Ok(q.a.mul(&self.zeta_alpha()).scale(IM).map(|v| v - IM))
    }

    /// (a_t/a) composed back to interface coordinates: real solution of the
    /// conjugated momentum identity, solved with weight A * conj(zeta_alpha).
    pub fn at_over_a(&self) -> Result<Field> {
        let q = self.quantities()?;
        let dtt = self.acceleration()?;
        let u_bar = self.u.conj();
        let dtt_bar = dtt.conj();
        let (t1, t2) = q.kernel.commutator2(&u_bar, &dtt, &dtt_bar, &self.u);
        let sq = q.kernel.square(&self.u, &u_bar);
        let rhs = t1.add(&t2).scale(Complex64::new(2.0, 0.0)).sub(&sq).scale(IM);
        let weight = q.a.mul(&self.zeta_alpha().conj());
        solve_real(&q.kernel, &rhs, Some(&weight), None, SOLVE_TOL, SOLVE_MAX_ITER)
    }

    /// Right-hand side of the evolution, dealiased.
    pub fn time_derivative(&self) -> Result<(Field, Field)> {
        let q = self.quantities()?;
        let zeta_a = self.zeta_alpha();
        let d_offset = self.u.sub(&q.b.mul(&zeta_a)).dealias();
        let du = self
            .acceleration()?
            .sub(&q.b.mul(&self.u.derivative()))
            .dealias();
        Ok((d_offset, du))
    }

    /// theta = (I - H_zeta)(zeta - alpha).
    pub fn theta_field(&self) -> Result<Field> {
        let q = self.quantities()?;
        Ok(self.offset.sub(&q.kernel.hilbert(&self.offset)))
    }

    /// Cubic forcing (G1, G2) driving (D_t^2 - iA d_alpha) theta.
    pub fn cubic_forcing(&self) -> Result<(Field, Field)> {
        let q = self.quantities()?;
        let grid = self.grid;
        let du = self.u.derivative();
        let g1 = q
            .kernel
            .imag_cot(&self.u, &du)
            .scale(Complex64::new(-2.0 / (grid.q() * std::f64::consts::PI), 0.0));
        let zeta_minus_conj = self.offset.sub(&self.offset.conj());
        let g2 = q.kernel.square(&self.u, &zeta_minus_conj);
        Ok((g1, g2))
    }
}

/// theta = (I - H_zeta)(zeta - alpha).
pub fn theta(state: &WaterState) -> Result<Field> {
    state.theta_field()
}

#[derive(Debug, Clone, Copy)]
pub struct HoloResiduals {
    /// L2 deviation of (I - H_zeta)(conj zeta - alpha) from its Cauchy constant.
    pub interface: f64,
    /// Same for (I - H_zeta) conj(D_t zeta).
    pub velocity: f64,
}

/// Residuals of the holomorphic compatibility conditions.
pub fn holo_residuals(state: &WaterState) -> Result<HoloResiduals> {
    let q = state.quantities()?;
    let grid = state.grid();
    let zeta_a = state.zeta_alpha();
    let measure = |f: &Field| -> f64 {
        let w = f.sub(&q.kernel.hilbert(f));
        // Cauchy-integral constant (1/2 pi q) * integral f dzeta
        let c: Complex64 = (0..grid.n())
            .map(|j| f.samples()[j] * zeta_a.samples()[j])
            .sum::<Complex64>()
            * grid.spacing()
            / grid.length();
        w.map(|v| v - c).l2_norm()
    };
    Ok(HoloResiduals {
        interface: measure(&state.offset().conj()),
        velocity: measure(&state.u().conj()),
    })
}
