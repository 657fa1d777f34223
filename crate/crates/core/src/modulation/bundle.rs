//! The multiscale bridge: envelope fields, tilde objects, the approximate
//! interface, tilde material derivatives, the remainder energy, and the
//! cubic remainder.

use super::slow::{FastDerivs, ModTerm, Modulated, SlowExpr};
use crate::error::{Error, Result};
use crate::nls::NlsState;
use crate::spectral::{identity_field, one_minus_h0, one_plus_h0, CurveKernel, Field, Grid};
use crate::waterwave::WaterState;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// All tilde objects for one envelope snapshot at fast time t.
pub struct EnvelopeBundle {
    eps: f64,
    omega: f64,
    t: f64,
    fast: Grid,
    /// zeta~ - alpha as modulated terms.
    tilde: Modulated,
    /// Stokes-tilde offset (the carrier-only counterpart).
    tilde_st: Modulated,
    /// b~ = -eps^2 omega |B|^2 and its Stokes value -eps^2 omega.
    b_tilde: Modulated,
    b_tilde_st: Modulated,
    z1: Field,
    z2: Field,
    z3: Field,
}

/// B_T from the envelope equation, and its T-derivative, as slow expressions.
fn envelope_slow_expr(b: &Field) -> SlowExpr {
    let rhs = |f: &Field, fsq_b: &Field| -> Field {
        // i(1/8 f_XX + 1/2 |B|^2-part - 1/2 f); caller supplies the cubic part
        f.derivative_n(2)
            .scale(Complex64::new(0.125, 0.0))
            .add(fsq_b)
            .sub(&f.scale(Complex64::new(0.5, 0.0)))
            .scale(I)
    };
    let cubic = |b: &Field| -> Field {
        b.map(|v| v * v.norm_sqr() * 0.5)
    };
    let bt = rhs(b, &cubic(b));
    // d/dT of the cubic term: (|B|^2 B)_T = 2 Re(conj B B_T) B + |B|^2 B_T
    let cubic_t = Field::from_samples(
        b.grid(),
        b.samples()
            .iter()
            .zip(bt.samples())
            .map(|(&bv, &btv)| {
                0.5 * (2.0 * (bv.conj() * btv).re * bv + bv.norm_sqr() * btv)
            })
            .collect(),
    );
    let btt = rhs(&bt, &cubic_t);
    SlowExpr {
        v: b.clone(),
        vt: bt,
        vtt: btt,
    }
}

impl EnvelopeBundle {
    /// Build from the envelope at slow time T = eps^2 t.
    pub fn new(b_state: &NlsState, eps: f64, omega: f64, t: f64, fast: Grid) -> Result<Self> {
        let q1 = b_state.q1();
        if (fast.q() * eps - q1).abs() > 1e-10 {
            return Err(Error::IncompatiblePeriod(format!(
                "fast period factor {} and slow factor {q1} violate q1 = eps q",
                fast.q()
            )));
        }
        let qi = fast.q().round();
        if (fast.q() - qi).abs() > 1e-9 || qi < 1.0 {
            return Err(Error::IncompatiblePeriod(
                "carrier requires an integer fast period factor".into(),
            ));
        }
        if (b_state.t_slow() - eps * eps * t).abs() > 1e-10 {
            return Err(Error::IncompatiblePeriod(format!(
                "envelope slow time {} does not match eps^2 t = {}",
                b_state.t_slow(),
                eps * eps * t
            )));
        }
        let slow_grid = b_state.b().grid();

        let b = envelope_slow_expr(b_state.b());
        let p = b.mul(&b.conj()); // |B|^2
        let z1s = b.clone();
        let z2s = p
            .map_linear(|f| one_plus_h0(f))
            .scale(I * 0.5)
            .add(&p.mean().scale(I * 0.5));
        let z3s_m = b.conj().mul(&p).scale(Complex64::new(-0.5, 0.0));
        let z3s_0 = b.conj().mul(&b.dx()).map_linear(|f| one_plus_h0(f)).scale(Complex64::new(0.5, 0.0));

        let e1 = Complex64::new(eps, 0.0);
        let e2 = Complex64::new(eps * eps, 0.0);
        let e3 = Complex64::new(eps * eps * eps, 0.0);
        let tilde = Modulated {
            terms: vec![
                ModTerm { m: 1, s: z1s.clone().scale(e1) },
                ModTerm { m: 0, s: z2s.clone().scale(e2) },
                ModTerm { m: -1, s: z3s_m.clone().scale(e3) },
                ModTerm { m: 0, s: z3s_0.clone().scale(e3) },
            ],
        };
        let tilde_st = Modulated {
            terms: vec![
                ModTerm { m: 1, s: SlowExpr::constant(slow_grid, I * eps) },
                ModTerm { m: 0, s: SlowExpr::constant(slow_grid, I * eps * eps) },
                ModTerm { m: -1, s: SlowExpr::constant(slow_grid, I * 0.5 * eps.powi(3)) },
            ],
        };
        let b_tilde = Modulated {
            terms: vec![ModTerm {
                m: 0,
                s: p.scale(Complex64::new(-eps * eps * omega, 0.0)),
            }],
        };
        let b_tilde_st = Modulated {
            terms: vec![ModTerm {
                m: 0,
                s: SlowExpr::constant(slow_grid, Complex64::new(-eps * eps * omega, 0.0)),
            }],
        };

        // plain envelope fields for inspection
        let z1 = ModTerm { m: 1, s: z1s }.fast_fields(fast, eps, omega, t).f;
        let z2 = ModTerm { m: 0, s: z2s }.fast_fields(fast, eps, omega, t).f;
        let z3 = ModTerm { m: -1, s: z3s_m }
            .fast_fields(fast, eps, omega, t)
            .f
            .add(&ModTerm { m: 0, s: z3s_0 }.fast_fields(fast, eps, omega, t).f);

        Ok(EnvelopeBundle {
            eps,
            omega,
            t,
            fast,
            tilde,
            tilde_st,
            b_tilde,
            b_tilde_st,
            z1,
            z2,
            z3,
        })
    }

    pub fn envelope_fields(&self) -> (&Field, &Field, &Field) {
        (&self.z1, &self.z2, &self.z3)
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    fn eval(&self, which: &Modulated) -> FastDerivs {
        which.evaluate(self.fast, self.eps, self.omega, self.t)
    }

    /// zeta~ - alpha.
    pub fn tilde_offset(&self) -> Field {
        self.eval(&self.tilde).f
    }

    /// zeta~_ST - alpha.
    pub fn tilde_offset_st(&self) -> Field {
        self.eval(&self.tilde_st).f
    }

    /// zeta_app - alpha = (zeta_ST - alpha) + (zeta~ - zeta~_ST).
    pub fn zeta_app_offset(&self, stokes_state: &WaterState) -> Field {
        stokes_state
            .offset()
            .add(&self.tilde_offset())
            .sub(&self.tilde_offset_st())
    }

    /// Tilde material derivative and acceleration of a modulated offset:
    /// D~_t f and D~_t^2 f with f = alpha + offset, for the given b~.
    fn material(&self, offset: &Modulated, b_mod: &Modulated) -> (Field, Field) {
        let f = self.eval(offset);
        let b = self.eval(b_mod);
        // d_alpha(alpha + offset) = 1 + f_a, d_t(alpha) = 0
        let one = Field::constant(self.fast, Complex64::new(1.0, 0.0));
        let fa_full = f.fa.add(&one);
        let velocity = f.ft.add(&b.f.mul(&fa_full));
        // D_t^2 = f_tt + 2 b f_ta + b^2 f_aa + (b_t + b b_a) f_a(full)
        let coeff = b.ft.add(&b.f.mul(&b.fa));
        let accel = f
            .ftt
            .add(&b.f.mul(&f.fta).scale(Complex64::new(2.0, 0.0)))
            .add(&b.f.mul(&b.f).mul(&f.faa))
            .add(&coeff.mul(&fa_full));
        (velocity, accel)
    }

    /// D~_t zeta~ and D~_t^2 zeta~.
    pub fn tilde_velocity(&self) -> (Field, Field) {
        self.material(&self.tilde, &self.b_tilde)
    }

    /// The Stokes counterparts D~_t^ST zeta~_ST and its acceleration.
    pub fn tilde_velocity_st(&self) -> (Field, Field) {
        self.material(&self.tilde_st, &self.b_tilde_st)
    }

    /// b~ sampled on the fast grid.
    pub fn b_tilde_field(&self) -> Field {
        self.eval(&self.b_tilde).f
    }
}

/// The remainder r = zeta - zeta_app and its energy.
pub struct Remainder {
    pub r: Field,
    pub dt_r: Field,
    pub dtt_r: Field,
    /// E_s^{1/2} = |D_t r|_{s+1/2} + |r_a|_s + |D_t^2 r|_s.
    pub es_sqrt: f64,
}

/// Assemble the remainder of a state against the modulated approximation.
/// The approximate velocity pairs the exact traveling-wave velocity with the
/// tilde material derivatives; accelerations come from the evolution
/// right-hand sides on the exact parts.
pub fn remainder(
    state: &WaterState,
    stokes_state: &WaterState,
    bundle: &EnvelopeBundle,
    s: f64,
) -> Result<Remainder> {
    let r = state.offset().sub(&bundle.zeta_app_offset(stokes_state));
    let (tv, ta) = bundle.tilde_velocity();
    let (sv, sa) = bundle.tilde_velocity_st();
    let v_app = stokes_state.u().add(&tv).sub(&sv);
    let dt_r = state.u().sub(&v_app);
    let a_app = stokes_state.acceleration()?.add(&ta).sub(&sa);
    let dtt_r = state.acceleration()?.sub(&a_app);
    let es_sqrt = dt_r.sobolev_norm(s + 0.5) + r.derivative().sobolev_norm(s) + dtt_r.sobolev_norm(s);
    Ok(Remainder {
        r,
        dt_r,
        dtt_r,
        es_sqrt,
    })
}

/// rho = (I - H_zeta)[theta - theta_ST - (theta~ - theta~_ST)].
pub fn cubic_remainder_rho(
    state: &WaterState,
    stokes_state: &WaterState,
    bundle: &EnvelopeBundle,
) -> Result<Field> {
    let theta = state.theta_field()?;
    let theta_st = stokes_state.theta_field()?;
    let ident = identity_field(state.grid());

    let tilde_off = bundle.tilde_offset();
    let tilde_kernel = CurveKernel::new(&ident.add(&tilde_off));
    let theta_tilde = tilde_off.sub(&tilde_kernel.hilbert(&tilde_off));

    let tilde_st_off = bundle.tilde_offset_st();
    let tilde_st_kernel = CurveKernel::new(&ident.add(&tilde_st_off));
    let theta_tilde_st = tilde_st_off.sub(&tilde_st_kernel.hilbert(&tilde_st_off));

    let w = theta
        .sub(&theta_st)
        .sub(&theta_tilde.sub(&theta_tilde_st));
    let q = state.quantities_with_guess(None)?;
    Ok(w.sub(&q.kernel.hilbert(&w)))
}

/// Left-hand norm of the wavepacket near-holomorphicity estimate:
/// |(I + sgn(lambda) H0) f(eps alpha) e^{i lambda alpha}|_{H^s(qT)}.
pub fn packet_holo_check(f_slow: &Field, lambda: i64, eps: f64, fast: Grid, s: f64) -> f64 {
    assert!(lambda != 0);
    let emb = super::slow::embed(fast, f_slow, eps);
    let shifted = Field::from_samples(
        fast,
        emb.samples()
            .iter()
            .enumerate()
            .map(|(j, &v)| v * Complex64::from_polar(1.0, lambda as f64 * fast.node(j)))
            .collect(),
    );
    let projected = if lambda > 0 {
        one_plus_h0(&shifted)
    } else {
        one_minus_h0(&shifted)
    };
    projected.sobolev_norm(s)
}
