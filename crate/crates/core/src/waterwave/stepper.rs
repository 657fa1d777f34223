//! Explicit RK4 time stepping with dealiasing, spectral filtering, and a
//! blow-up guard.

use super::state::WaterState;
use super::KRASNY_THRESHOLD;
use crate::error::{Error, Result};
use crate::spectral::{CurveKernel, Field, CHORD_ARC_THRESHOLD};
use num_complex::Complex64;

const NORM_GUARD: f64 = 1e6;
const CHORD_ARC_CHECK_INTERVAL: usize = 100;

/// RK4 stepper carrying per-stage warm starts for the auxiliary solves.
pub struct Stepper {
    dt: f64,
    history: [Vec<(Field, Field)>; 4],
    steps: usize,
}

impl Stepper {
    pub fn new(dt: f64) -> Self {
        assert!(dt != 0.0 && dt.is_finite());
        Stepper {
            dt,
            history: Default::default(),
            steps: 0,
        }
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn predict(&self, stage: usize) -> Option<(Field, Field)> {
        let hist = &self.history[stage];
        match hist.len() {
            0 => None,
            1 => Some(hist[0].clone()),
            2 => {
                let lin = |a: &Field, b: &Field| {
                    a.scale(Complex64::new(2.0, 0.0)).sub(b)
                };
                Some((lin(&hist[0].0, &hist[1].0), lin(&hist[0].1, &hist[1].1)))
            }
            _ => {
                let quad = |a: &Field, b: &Field, c: &Field| {
                    a.scale(Complex64::new(3.0, 0.0))
                        .sub(&b.scale(Complex64::new(3.0, 0.0)))
                        .add(c)
                };
                Some((
                    quad(&hist[0].0, &hist[1].0, &hist[2].0),
                    quad(&hist[0].1, &hist[1].1, &hist[2].1),
                ))
            }
        }
    }

    fn record(&mut self, stage: usize, b: Field, a: Field) {
        let hist = &mut self.history[stage];
        hist.insert(0, (b, a));
        hist.truncate(3);
    }

    fn stage_derivative(
        &mut self,
        stage: usize,
        state: &WaterState,
    ) -> Result<(Field, Field)> {
        let guess = self.predict(stage);
        let q = state.quantities_with_guess(guess.as_ref().map(|(b, a)| (b, a)))?;
        let (b, a) = (q.b.clone(), q.a.clone());
        self.record(stage, b, a);
        state.time_derivative()
    }

    /// One classical RK4 step; the result is dealiased and filtered.
    pub fn step(&mut self, state: &WaterState) -> Result<WaterState> {
        let dt = self.dt;
        let grid = state.grid();
        let t = state.t();

        let (k1o, k1u) = self.stage_derivative(0, state)?;
        let s2 = advance(state, &k1o, &k1u, 0.5 * dt);
        let (k2o, k2u) = self.stage_derivative(1, &s2)?;
        let s3 = advance(state, &k2o, &k2u, 0.5 * dt);
        let (k3o, k3u) = self.stage_derivative(2, &s3)?;
        let s4 = advance(state, &k3o, &k3u, dt);
        let (k4o, k4u) = self.stage_derivative(3, &s4)?;

        let combine = |f0: &Field, k1: &Field, k2: &Field, k3: &Field, k4: &Field| {
            let sixth = Complex64::new(dt / 6.0, 0.0);
            let third = Complex64::new(dt / 3.0, 0.0);
            f0.add(&k1.scale(sixth))
                .add(&k2.scale(third))
                .add(&k3.scale(third))
                .add(&k4.scale(sixth))
        };
        let offset = combine(state.offset(), &k1o, &k2o, &k3o, &k4o)
            .dealias()
            .krasny_filter(KRASNY_THRESHOLD);
        let u = combine(state.u(), &k1u, &k2u, &k3u, &k4u)
            .dealias()
            .krasny_filter(KRASNY_THRESHOLD);

        // Project back onto the holomorphic compatibility manifold: the
        // complement carries a spurious e^{sqrt(k/q) t} instability seeded
        // by round-off, which the amplitude filter alone cannot contain.
        // Admissible states are fixed points of this projection.
        let (offset, u) = project_holomorphic(grid, &offset, &u);

        let next = WaterState::new(grid, t + dt, offset, u);
        self.steps += 1;
        self.guard(&next)?;
        Ok(next)
    }

    fn guard(&self, state: &WaterState) -> Result<()> {
        let t = state.t();
        if !state.offset().linf_norm().is_finite() || !state.u().linf_norm().is_finite() {
            return Err(Error::BlowupDetected {
                t,
                reason: "non-finite field values".into(),
            });
        }
        if state.offset().linf_norm() > NORM_GUARD || state.u().linf_norm() > NORM_GUARD {
            return Err(Error::BlowupDetected {
                t,
                reason: "field norm exceeded 1e6".into(),
            });
        }
        let slope = state.offset().derivative().linf_norm();
        if slope > 0.5 || self.steps % CHORD_ARC_CHECK_INTERVAL == 0 {
            let min_ratio = CurveKernel::new(&state.zeta()).chord_arc_min();
            if min_ratio < CHORD_ARC_THRESHOLD {
                return Err(Error::BlowupDetected {
                    t,
                    reason: format!("chord-arc ratio {min_ratio:.3e} below threshold"),
                });
            }
        }
        Ok(())
    }
}

/// Half-sum projection of both conjugated state fields onto boundary values
/// of functions holomorphic in the fluid region.
fn project_holomorphic(grid: crate::spectral::Grid, offset: &Field, u: &Field) -> (Field, Field) {
    let ident = crate::spectral::identity_field(grid);
    let kernel = CurveKernel::new(&ident.add(offset));
    let project = |f: &Field| -> Field {
        let fbar = f.conj();
        fbar.add(&kernel.hilbert(&fbar))
            .scale(Complex64::new(0.5, 0.0))
            .conj()
    };
    (project(offset), project(u))
}

fn advance(state: &WaterState, doffset: &Field, du: &Field, dt: f64) -> WaterState {
    let c = Complex64::new(dt, 0.0);
    WaterState::new(
        state.grid(),
        state.t() + dt,
        state.offset().add(&doffset.scale(c)),
        state.u().add(&du.scale(c)),
    )
}

/// Single RK4 step without history reuse.
pub fn step_rk4(state: &WaterState, dt: f64) -> Result<WaterState> {
    Stepper::new(dt).step(state)
}

/// Evolve to `t_end` with fixed steps, invoking the observer on the initial
/// state and after every step.
pub fn evolve(
    state: &WaterState,
    t_end: f64,
    dt: f64,
    mut observer: impl FnMut(&WaterState),
) -> Result<WaterState> {
    let span = t_end - state.t();
    let n_steps = (span / dt).round() as i64;
    assert!(n_steps >= 0, "t_end must lie forward of the state time");
    let mut stepper = Stepper::new(dt);
    let mut current = state.clone();
    observer(&current);
    for _ in 0..n_steps {
        current = stepper.step(&current)?;
        observer(&current);
    }
    Ok(current)
}
