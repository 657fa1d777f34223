//! Construction of admissible interface data for a given envelope seed by
//! fixed-point iteration on the holomorphic compatibility conditions.

use crate::error::{Error, Result};
use crate::modulation::embed;
use crate::nls::NlsState;
use crate::spectral::{identity_field, CurveKernel, Field, Grid};
use crate::stokes::{stokes_state, StokesWave};
use crate::waterwave::WaterState;
use num_complex::Complex64;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Inputs of the construction.
pub struct SeedSpec<'a> {
    /// Envelope at slow time zero.
    pub b0: &'a NlsState,
    pub eps: f64,
    /// Traveling wave the data perturbs.
    pub wave: &'a StokesWave,
    /// Successive-iterate tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl<'a> SeedSpec<'a> {
    pub fn new(b0: &'a NlsState, eps: f64, wave: &'a StokesWave) -> Self {
        SeedSpec {
            b0,
            eps,
            wave,
            tol: 1e-12,
            max_iter: 60,
        }
    }
}

/// Output state plus iteration diagnostics.
pub struct AdmissibleData {
    pub state: WaterState,
    pub iterations: usize,
    /// Successive contraction factors of the interface iteration.
    pub contraction: Vec<f64>,
    /// The first-order packet eps (B0(eps a) - i) e^{i a} used in estimates.
    pub packet: Field,
}

/// Carrier-orthogonality functional: integral of B0(eps alpha) e^{i alpha}.
pub fn orthogonality_defect(b0: &NlsState, eps: f64, grid: Grid) -> f64 {
    let emb = embed(grid, b0.b(), eps);
    let qi = grid.q().round() as i64;
    emb.coeff(-qi).norm()
}

/// Build (zeta_0, v_0) satisfying the compatibility conditions, close to the
/// traveling wave modulated by the seed envelope.
pub fn build_initial_data(spec: &SeedSpec, grid: Grid) -> Result<AdmissibleData> {
    let eps = spec.eps;
    let qi = grid.q().round();
    if (grid.q() - qi).abs() > 1e-9 || qi < 1.0 {
        return Err(Error::IncompatiblePeriod(
            "initial data needs an integer fast period factor".into(),
        ));
    }
    let ortho = orthogonality_defect(spec.b0, eps, grid);
    if ortho > 1e-12 {
        return Err(Error::OrthogonalityViolated(ortho));
    }

    let st = stokes_state(spec.wave, 0.0, grid, 0.0)?;
    let omega = spec.wave.omega();

    // packet = eps (B0(eps a) - i) e^{i a}
    let b_minus_i = spec.b0.b().map(|v| v - I);
    let packet = Field::from_samples(
        grid,
        embed(grid, &b_minus_i, eps)
            .samples()
            .iter()
            .enumerate()
            .map(|(j, &v)| eps * v * Complex64::from_polar(1.0, grid.node(j)))
            .collect(),
    );

    // fixed-point iteration on the conjugate offset
    let g = st.offset().add(&packet).conj();
    let ident = identity_field(grid);
    let mut offset = st.offset().add(&packet);
    let mut contraction = Vec::new();
    let mut last_change = f64::INFINITY;
    let mut iterations = 0;
    for _ in 0..spec.max_iter {
        let kernel = CurveKernel::new(&ident.add(&offset));
        let half = g.add(&kernel.hilbert(&g)).scale(Complex64::new(0.5, 0.0));
        let next = half.conj();
        let change = next.sub(&offset).l2_norm();
        if last_change.is_finite() && last_change > 0.0 {
            contraction.push(change / last_change);
        }
        last_change = change;
        offset = next;
        iterations += 1;
        if change <= spec.tol {
            break;
        }
    }
    if last_change > spec.tol {
        return Err(Error::NoConvergence {
            iterations,
            residual: last_change,
        });
    }

    // subtract the Cauchy constant of the interface condition
    let zeta_a = offset.derivative().map(|v| v + Complex64::new(1.0, 0.0));
    let cauchy_const = |f: &Field| -> Complex64 {
        (0..grid.n())
            .map(|j| f.samples()[j] * zeta_a.samples()[j])
            .sum::<Complex64>()
            * grid.spacing()
            / grid.length()
    };
    let c_interface = cauchy_const(&offset.conj());
    let offset0 = offset.map(|v| v - c_interface.conj());

    // velocity: conj(v0) = (1/2)(I + H)(conj G_ST - i omega eps (conj B0 + i) e^{-ia}) + d
    let kernel = CurveKernel::new(&ident.add(&offset0));
    let h_bar = st.u().conj().add(&packet.conj().scale(-I * omega));
    let zeta0_a = offset0.derivative().map(|v| v + Complex64::new(1.0, 0.0));
    let d_v: Complex64 = -(0..grid.n())
        .map(|j| h_bar.samples()[j] * zeta0_a.samples()[j])
        .sum::<Complex64>()
        * grid.spacing()
        / (2.0 * grid.length());
    let v_bar = h_bar
        .add(&kernel.hilbert(&h_bar))
        .scale(Complex64::new(0.5, 0.0))
        .map(|v| v + d_v);
    let v0 = v_bar.conj();

    Ok(AdmissibleData {
        state: WaterState::new(grid, 0.0, offset0, v0),
        iterations,
        contraction,
        packet,
    })
}

/// Admissibility report of a state.
#[derive(Debug, Clone, Copy)]
pub struct Admissibility {
    pub interface: f64,
    pub velocity: f64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn verify_admissibility(state: &WaterState) -> Result<Admissibility> {
    let r = crate::waterwave::holo_residuals(state)?;
    let threshold = 1e-10 * state.grid().q().sqrt();
    Ok(Admissibility {
        interface: r.interface,
        velocity: r.velocity,
        threshold,
        pass: r.interface <= threshold && r.velocity <= threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nls::{lift_to_b, unstable_seed};
    use crate::stokes::stokes_newton;

    fn setup(eps: f64, delta: f64) -> (Grid, NlsState, StokesWave) {
        let q = (1.0 / eps).round();
        let grid = Grid::new(q, 512).unwrap();
        let slow = Grid::new(1.0, 32).unwrap();
        let seed = unstable_seed(slow, delta, 11.0, delta / 200.0).unwrap();
        let b0 = lift_to_b(&seed);
        let wave = stokes_newton(eps, 12, 1e-11).unwrap();
        (grid, b0, wave)
    }

    #[test]
    fn carrier_seed_reproduces_stokes() {
        let eps = 0.1;
        let grid = Grid::new(10.0, 512).unwrap();
        let slow = Grid::new(1.0, 32).unwrap();
        let b0 = NlsState::carrier(slow);
        let wave = stokes_newton(eps, 12, 1e-11).unwrap();
        let spec = SeedSpec::new(&b0, eps, &wave);
        let data = build_initial_data(&spec, grid).unwrap();
        let st = stokes_state(&wave, 0.0, grid, 0.0).unwrap();
        let d_off = data.state.offset().sub(st.offset()).l2_norm();
        let d_u = data.state.u().sub(st.u()).l2_norm();
        assert!(d_off <= 1e-10 && d_u <= 1e-10, "carrier data off by {d_off}, {d_u}");
    }

    #[test]
    fn construction_is_admissible_and_close() {
        let eps = 0.1;
        let delta = 0.01;
        let (grid, b0, wave) = setup(eps, delta);
        let spec = SeedSpec::new(&b0, eps, &wave);
        let data = build_initial_data(&spec, grid).unwrap();

        let adm = verify_admissibility(&data.state).unwrap();
        assert!(adm.pass, "admissibility {adm:?}");

        // interface closeness: zeta_0 - zeta_ST - packet is higher order
        let st = stokes_state(&wave, 0.0, grid, 0.0).unwrap();
        let seed_norm = b0.b().map(|v| v - I).sobolev_norm(11.0);
        let s = 4.0;
        let dev = data
            .state
            .offset()
            .sub(st.offset())
            .sub(&data.packet)
            .sobolev_norm(s + 1.0);
        let c_zeta = dev / (eps.powf(1.5) * seed_norm);
        assert!(c_zeta <= 5.0, "interface closeness constant {c_zeta}");

        // velocity closeness: v0 - G - i omega packet
        let vdev = data
            .state
            .u()
            .sub(st.u())
            .sub(&data.packet.scale(I * wave.omega()))
            .sobolev_norm(s + 1.0);
        let c_v = vdev / (eps.powf(1.5) * seed_norm);
        assert!(c_v <= 5.0, "velocity closeness constant {c_v}");

        // contraction factors are O(eps)
        for (i, f) in data.contraction.iter().enumerate() {
            if i + 1 < data.contraction.len() {
                assert!(*f <= 3.0 * eps, "contraction factor {f} at step {i}");
            }
        }

        // total perturbation size against the traveling wave's state pair
        let total = data.state.offset().sub(st.offset()).sobolev_norm(s + 1.0)
            + data.state.u().sub(st.u()).sobolev_norm(s + 0.5);
        assert!(
            total <= eps.sqrt() * 1.5 * delta,
            "perturbation size {total} vs {}",
            eps.sqrt() * 1.5 * delta
        );
    }

    #[test]
    fn naive_data_fails_admissibility() {
        let eps = 0.1;
        let delta = 0.01;
        let (grid, b0, wave) = setup(eps, delta);
        let spec = SeedSpec::new(&b0, eps, &wave);
        let data = build_initial_data(&spec, grid).unwrap();
        let st = stokes_state(&wave, 0.0, grid, 0.0).unwrap();
        let naive = WaterState::new(
            grid,
            0.0,
            st.offset().add(&data.packet),
            st.u().clone(),
        );
        let adm = verify_admissibility(&naive).unwrap();
        assert!(
            adm.interface > 100.0 * adm.threshold,
            "naive residual unexpectedly small: {adm:?}"
        );
    }

    #[test]
    fn orthogonality_is_checked() {
        let eps = 0.1;
        let grid = Grid::new(10.0, 512).unwrap();
        let slow = Grid::new(1.0, 32).unwrap();
        // a seed with a component exactly on the carrier-conjugate mode
        let bad = NlsState::new(
            1.0,
            0.0,
            Field::single_mode(slow, -10, Complex64::new(0.01, 0.0)).map(|v| v + I),
        );
        let wave = stokes_newton(eps, 10, 1e-11).unwrap();
        let spec = SeedSpec::new(&bad, eps, &wave);
        assert!(matches!(
            build_initial_data(&spec, grid),
            Err(Error::OrthogonalityViolated(_))
        ));
    }

    #[test]
    fn construction_is_deterministic() {
        let eps = 0.1;
        let delta = 0.01;
        let (grid, b0, wave) = setup(eps, delta);
        let spec = SeedSpec::new(&b0, eps, &wave);
        let d1 = build_initial_data(&spec, grid).unwrap();
        let d2 = build_initial_data(&spec, grid).unwrap();
        for j in 0..grid.n() {
            assert_eq!(d1.state.offset().samples()[j], d2.state.offset().samples()[j]);
            assert_eq!(d1.state.u().samples()[j], d2.state.u().samples()[j]);
        }
    }
}
