//! Carrier-modulated slow fields and their exact space/time derivatives.
//!
//! Every multiscale object here is a sum of terms S(X, T) e^{i m (alpha +
//! omega t)} with X = eps (alpha + t/(2 omega)) and T = eps^2 t. A term
//! carries the slow samples of S together with its first two T-derivatives,
//! so d_t and d_alpha up to second order follow from the chain rule with no
//! finite differencing.

use crate::spectral::{Field, Grid};
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Slow-torus samples of S, S_T, S_TT.
#[derive(Clone)]
pub struct SlowExpr {
    pub v: Field,
    pub vt: Field,
    pub vtt: Field,
}

impl SlowExpr {
    pub fn constant(grid: Grid, c: Complex64) -> Self {
        SlowExpr {
            v: Field::constant(grid, c),
            vt: Field::zeros(grid),
            vtt: Field::zeros(grid),
        }
    }

    pub fn map_linear(&self, op: impl Fn(&Field) -> Field) -> SlowExpr {
        SlowExpr {
            v: op(&self.v),
            vt: op(&self.vt),
            vtt: op(&self.vtt),
        }
    }

    pub fn conj(&self) -> SlowExpr {
        self.map_linear(|f| f.conj())
    }

    pub fn dx(&self) -> SlowExpr {
        self.map_linear(|f| f.derivative())
    }

    pub fn scale(&self, c: Complex64) -> SlowExpr {
        self.map_linear(|f| f.scale(c))
    }

    pub fn add(&self, other: &SlowExpr) -> SlowExpr {
        SlowExpr {
            v: self.v.add(&other.v),
            vt: self.vt.add(&other.vt),
            vtt: self.vtt.add(&other.vtt),
        }
    }

    /// Product rule through second T-derivatives.
    pub fn mul(&self, other: &SlowExpr) -> SlowExpr {
        let v = self.v.mul(&other.v);
        let vt = self.vt.mul(&other.v).add(&self.v.mul(&other.vt));
        let vtt = self
            .vtt
            .mul(&other.v)
            .add(&self.vt.mul(&other.vt).scale(Complex64::new(2.0, 0.0)))
            .add(&self.v.mul(&other.vtt));
        SlowExpr { v, vt, vtt }
    }

    pub fn mean(&self) -> SlowExpr {
        let grid = self.v.grid();
        SlowExpr {
            v: Field::constant(grid, self.v.mean()),
            vt: Field::constant(grid, self.vt.mean()),
            vtt: Field::constant(grid, self.vtt.mean()),
        }
    }
}

/// One carrier harmonic m with a slow coefficient.
#[derive(Clone)]
pub struct ModTerm {
    pub m: i64,
    pub s: SlowExpr,
}

/// Fast-grid values of the term and its derivatives.
pub struct FastDerivs {
    pub f: Field,
    pub ft: Field,
    pub fa: Field,
    pub ftt: Field,
    pub fta: Field,
    pub faa: Field,
}

impl FastDerivs {
    pub fn zeros(grid: Grid) -> Self {
        FastDerivs {
            f: Field::zeros(grid),
            ft: Field::zeros(grid),
            fa: Field::zeros(grid),
            ftt: Field::zeros(grid),
            fta: Field::zeros(grid),
            faa: Field::zeros(grid),
        }
    }

    pub fn accumulate(&mut self, other: &FastDerivs) {
        self.f = self.f.add(&other.f);
        self.ft = self.ft.add(&other.ft);
        self.fa = self.fa.add(&other.fa);
        self.ftt = self.ftt.add(&other.ftt);
        self.fta = self.fta.add(&other.fta);
        self.faa = self.faa.add(&other.faa);
    }
}

/// Embed a slow field into the fast grid: slow mode k lands on fast index k
/// because q1 = eps q.
pub fn embed(fast: Grid, slow: &Field, eps: f64) -> Field {
    let q1 = slow.grid().q();
    assert!(
        (fast.q() * eps - q1).abs() < 1e-10,
        "fast and slow grids must satisfy q1 = eps q"
    );
    let mut coeffs = vec![Complex64::default(); fast.n()];
    for (mm, &c) in slow.spectrum().iter().enumerate() {
        let k = slow.grid().freq(mm);
        if c != Complex64::default() && k.abs() < (fast.n() / 2) as i64 {
            coeffs[fast.bin(k)] = c / eps;
        }
    }
    Field::from_spectrum(fast, coeffs)
}

impl ModTerm {
    /// Evaluate the term and its derivatives on the fast grid at time t.
    pub fn fast_fields(&self, fast: Grid, eps: f64, omega: f64, t: f64) -> FastDerivs {
        let a = eps / (2.0 * omega);
        let c = eps * eps;
        let im = I * self.m as f64;
        let imw = im * omega;

        // translate the slow coefficient to the current packet position
        let xshift = eps * t / (2.0 * omega);
        let s = self.s.map_linear(|f| f.translate(xshift));

        let sx = s.dx();
        let sxx = sx.dx();
        // slow arrays entering each derivative
        let coef_f = s.v.clone();
        let coef_t = sx.v.scale(Complex64::new(a, 0.0))
            .add(&s.vt.scale(Complex64::new(c, 0.0)))
            .add(&s.v.scale(imw));
        let coef_a = sx.v.scale(Complex64::new(eps, 0.0)).add(&s.v.scale(im));
        let coef_tt = sxx.v.scale(Complex64::new(a * a, 0.0))
            .add(&sx.vt.scale(Complex64::new(2.0 * a * c, 0.0)))
            .add(&s.vtt.scale(Complex64::new(c * c, 0.0)))
            .add(&sx.v.scale(imw * 2.0 * a))
            .add(&s.vt.scale(imw * 2.0 * c))
            .add(&s.v.scale(imw * imw));
        let coef_ta = sxx.v.scale(Complex64::new(eps * a, 0.0))
            .add(&sx.vt.scale(Complex64::new(eps * c, 0.0)))
            .add(&sx.v.scale(im * a + imw * eps))
            .add(&s.vt.scale(im * c))
            .add(&s.v.scale(im * imw));
        let coef_aa = sxx.v.scale(Complex64::new(eps * eps, 0.0))
            .add(&sx.v.scale(im * 2.0 * eps))
            .add(&s.v.scale(im * im));

        // carrier factor on the fast grid
        let carrier_phase = Complex64::from_polar(1.0, self.m as f64 * omega * t);
        let carrier = |f: &Field| -> Field {
            let emb = embed(fast, f, eps);
            Field::from_samples(
                fast,
                emb.samples()
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| {
                        v * carrier_phase
                            * Complex64::from_polar(1.0, self.m as f64 * fast.node(j))
                    })
                    .collect(),
            )
        };
        FastDerivs {
            f: carrier(&coef_f),
            ft: carrier(&coef_t),
            fa: carrier(&coef_a),
            ftt: carrier(&coef_tt),
            fta: carrier(&coef_ta),
            faa: carrier(&coef_aa),
        }
    }
}

/// Sum of carrier-modulated terms.
#[derive(Clone)]
pub struct Modulated {
    pub terms: Vec<ModTerm>,
}

impl Modulated {
    pub fn evaluate(&self, fast: Grid, eps: f64, omega: f64, t: f64) -> FastDerivs {
        let mut acc = FastDerivs::zeros(fast);
        for term in &self.terms {
            acc.accumulate(&term.fast_fields(fast, eps, omega, t));
        }
        acc
    }
}
