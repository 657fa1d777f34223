use super::*;
use crate::spectral::{Field, Grid};
use crate::waterwave::{
    self, basic_energy, compute_a, compute_b, evolve, holo_residuals, theta, time_derivative,
};
use num_complex::Complex64;
use once_cell::sync::Lazy;

const IM: Complex64 = Complex64::new(0.0, 1.0);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

static WAVE_005: Lazy<StokesWave> = Lazy::new(|| stokes_newton(0.05, 14, 1e-11).unwrap());
static WAVE_01: Lazy<StokesWave> = Lazy::new(|| stokes_newton(0.1, 16, 1e-11).unwrap());

#[test]
fn expansion_flat_and_coefficients() {
    let w = stokes_expansion(0.0).unwrap();
    assert_eq!(w.omega(), 1.0);
    assert!(w.f_coeff(1).norm() == 0.0 && w.g_coeff(0).norm() == 0.0);

    let w = stokes_expansion(0.1).unwrap();
    assert!((w.omega() - 1.005).abs() < 1e-15);
    assert!((w.f_coeff(1) - c(0.0, 0.1)).norm() < 1e-15);
    assert!((w.f_coeff(0) - c(0.0, 0.01)).norm() < 1e-15);
    assert!((w.f_coeff(-1) - c(0.0, 0.0005)).norm() < 1e-15);

    assert!(matches!(
        stokes_expansion(0.5),
        Err(crate::Error::AmplitudeOutOfRange(..))
    ));
}

#[test]
fn newton_dispersion_accuracy() {
    for eps in [0.02, 0.04] {
        let w = stokes_newton(eps, 12, 1e-11).unwrap();
        let err = (w.omega() - 1.0 - eps * eps / 2.0).abs();
        assert!(err <= 2.0 * eps.powi(3), "omega error {err} at eps {eps}");
    }
    // the speed is even in the amplitude, so the remainder beyond
    // 1 + eps^2/2 is quartic: doubling eps multiplies the error by ~16
    let e4 = (stokes_newton(0.04, 12, 1e-11).unwrap().omega() - 1.0 - 0.04f64.powi(2) / 2.0).abs();
    let e8 = (stokes_newton(0.08, 12, 1e-11).unwrap().omega() - 1.0 - 0.08f64.powi(2) / 2.0).abs();
    let ratio = e8 / e4;
    assert!((13.0..=19.0).contains(&ratio), "quartic remainder ratio {ratio}");
}

#[test]
fn newton_profile_matches_expansion_to_fourth_order() {
    let eps = 0.1;
    let w = &*WAVE_01;
    let ex = stokes_expansion(eps).unwrap();
    assert!(w.symmetry_defect() < 1e-11, "symmetry defect {}", w.symmetry_defect());

    // coefficient-level checks at eps = 0.1
    let tol = 5.0 * eps.powi(4);
    assert!((w.f_coeff(1) - c(0.0, eps)).norm() < 1e-13, "amplitude pin");
    assert!((w.f_coeff(0) - c(0.0, eps * eps)).norm() <= tol);
    assert!((w.f_coeff(-1) - c(0.0, 0.5 * eps.powi(3))).norm() <= tol);

    // whole-profile L2 difference
    let mut diff = 0.0;
    for k in -w.modes()..=w.modes() {
        diff += (w.f_coeff(k) - ex.f_coeff(k)).norm_sqr();
    }
    let diff = (diff * crate::spectral::TWO_PI).sqrt();
    assert!(diff <= 5.0 * eps.powi(4), "profile difference {diff}");
}

#[test]
fn stokes_state_phase_shift_identity() {
    let w = &*WAVE_005;
    let grid = Grid::new(1.0, 128).unwrap();
    let s1 = stokes_state(w, 0.0, grid, std::f64::consts::PI).unwrap();
    let s2 = stokes_state(w, 0.0, grid, 0.0).unwrap();
    let translated = s2.offset().translate(std::f64::consts::PI);
    assert!(s1.offset().sub(&translated).linf_norm() < 1e-13);

    // produced states satisfy the compatibility conditions near solver tolerance
    let r = holo_residuals(&s1).unwrap();
    assert!(r.interface <= 1e-10 && r.velocity <= 1e-10, "{r:?}");

    let bad = Grid::new(1.5, 128).unwrap();
    assert!(matches!(
        stokes_state(w, 0.0, bad, 0.0),
        Err(crate::Error::IncompatiblePeriod(_))
    ));
}

#[test]
fn auxiliary_quantities_have_expansion_orders() {
    for (eps, wave) in [(0.05, &*WAVE_005), (0.1, &*WAVE_01)] {
        let grid = Grid::new(1.0, 128).unwrap();
        let state = stokes_state(wave, 0.0, grid, 0.0).unwrap();
        let b = compute_b(&state).unwrap();
        let a = compute_a(&state).unwrap();
        let omega = wave.omega();
        let b_dev = b.map(|v| v + c(omega * eps * eps, 0.0)).linf_norm();
        assert!(b_dev <= 5.0 * eps.powi(3), "b deviation {b_dev} at eps {eps}");
        let a_dev = a.map(|v| v - c(1.0, 0.0)).linf_norm();
        assert!(a_dev <= 10.0 * eps.powi(4), "A deviation {a_dev} at eps {eps}");
        assert!(a.max_imag_abs() < 1e-12);
    }
}

#[test]
fn b_scales_quadratically() {
    let grid = Grid::new(1.0, 128).unwrap();
    let norm_b = |eps: f64| {
        let w = stokes_newton(eps, 12, 1e-11).unwrap();
        let s = stokes_state(&w, 0.0, grid, 0.0).unwrap();
        compute_b(&s).unwrap().linf_norm()
    };
    let ratio = norm_b(0.04) / norm_b(0.02);
    assert!((3.6..=4.4).contains(&ratio), "b scaling ratio {ratio}");
}

#[test]
fn at_over_a_is_small_and_scales() {
    let grid = Grid::new(1.0, 128).unwrap();
    let run = |eps: f64| {
        let w = stokes_newton(eps, 12, 1e-11).unwrap();
        let s = stokes_state(&w, 0.0, grid, 0.0).unwrap();
        waterwave::compute_at_over_a(&s).unwrap().linf_norm()
    };
    let h05 = run(0.05);
    assert!(h05 <= 10.0 * 0.05f64.powi(2), "a_t/a size {h05}");
    // on the traveling family the quantity is cubic in the amplitude
    let h025 = run(0.025);
    let ratio = h05 / h025;
    assert!((6.8..=9.2).contains(&ratio), "a_t/a scaling {ratio}");
}

#[test]
fn traveling_wave_round_trip_and_translation() {
    let wave = &*WAVE_01;
    let grid = Grid::new(1.0, 128).unwrap();
    let state = stokes_state(wave, 0.0, grid, 0.0).unwrap();
    let omega = wave.omega();

    // time derivative equals omega * profile derivative
    let (doff, du) = time_derivative(&state).unwrap();
    let err1 = doff
        .sub(&state.offset().derivative().scale(c(omega, 0.0)))
        .l2_norm();
    let err2 = du.sub(&state.u().derivative().scale(c(omega, 0.0))).l2_norm();
    assert!(err1 < 1e-9 && err2 < 1e-9, "traveling identity {err1} {err2}");
    // spatial mean of d_t zeta vanishes for periodic traveling motion
    assert!(doff.mean().norm() < 1e-8);

    // b is itself a traveling profile
    let b0 = compute_b(&state).unwrap();
    let dt = 0.1;
    let later = evolve(&state, dt, 0.005, |_| {}).unwrap();
    let b1 = compute_b(&later).unwrap();
    let shift_err = b1.sub(&b0.translate(omega * dt)).linf_norm();
    assert!(shift_err < 1e-6, "b translation error {shift_err}");

    // one full period returns to the same profile
    let period = crate::spectral::TWO_PI / omega;
    let back = evolve(&state, period, period / 1024.0, |_| {}).unwrap();
    let dev = back.offset().sub(state.offset()).l2_norm() + back.u().sub(state.u()).l2_norm();
    assert!(dev <= 1e-6, "period return deviation {dev}");
}

#[test]
fn energy_is_conserved_on_traveling_wave() {
    let wave = &*WAVE_005;
    let grid = Grid::new(1.0, 128).unwrap();
    let state = stokes_state(wave, 0.0, grid, 0.0).unwrap();
    let omega = wave.omega();
    let e_at = |s: &crate::waterwave::WaterState| {
        let th = theta(s).unwrap();
        let b = compute_b(s).unwrap();
        // traveling: d_t theta = omega theta', so D_t theta = (omega + b) theta'
        let dt_theta = th.derivative().mul(&b.map(|v| v + c(omega, 0.0)));
        basic_energy(s, &th, &dt_theta).unwrap()
    };
    let e0 = e_at(&state);
    let later = evolve(&state, 0.5, 0.005, |_| {}).unwrap();
    let e1 = e_at(&later);
    assert!((e1 - e0).abs() <= 1e-8, "energy drift {}", (e1 - e0).abs());
}

#[test]
fn cubic_forcing_structure_on_stokes() {
    let grid = Grid::new(1.0, 128).unwrap();
    let norm_g = |eps: f64| {
        let w = stokes_newton(eps, 12, 1e-11).unwrap();
        let s = stokes_state(&w, 0.0, grid, 0.0).unwrap();
        let (g1, g2) = waterwave::cubic_forcing(&s).unwrap();
        (g1.l2_norm() + g2.l2_norm(), g2)
    };
    let eps = 0.1;
    let (n1, g2) = norm_g(eps);
    // G2 = 2 eps^3 |z1|^2 z1 + O(eps^4) with z1 = i e^{i Gamma}
    let z1 = Field::from_fn(grid, |a| IM * (IM * a).exp());
    let lead = z1.scale(c(2.0 * eps.powi(3), 0.0));
    let dev = g2.sub(&lead).linf_norm();
    assert!(dev <= 20.0 * eps.powi(4), "G2 leading-order deviation {dev}");

    let (n2, _) = norm_g(eps / 2.0);
    let ratio = n1 / n2;
    assert!(
        (8.0 * 0.8..=8.0 * 1.2).contains(&ratio),
        "cubic scaling ratio {ratio}"
    );
}

#[test]
fn commutator_identities_u5_u6_on_stokes() {
    let wave = &*WAVE_005;
    let n = 512;
    let grid = Grid::new(1.0, n).unwrap();
    let state = stokes_state(wave, 0.0, grid, 0.0).unwrap();
    let q = state.quantities_with_guess(None).unwrap();
    let kernel = &q.kernel;
    let omega = wave.omega();
    let adv = q.b.map(|v| v + c(omega, 0.0)); // omega + b

    // traveling material derivative of any profile field
    let mat = |f: &Field| f.derivative().mul(&adv);
    let f = Field::from_fn(grid, |a| (IM * a).exp() + 0.3 * (2.0 * IM * a).exp());

    let hf = kernel.hilbert(&f);
    let d2_hf = mat(&mat(&hf));
    let d2_f = mat(&mat(&f));
    let dtf = mat(&f);
    let accel = state.acceleration().unwrap();
    let sq = kernel.square(state.u(), &f);

    // U5: [D_t^2, H] f = [D_t^2 zeta, H](f_a/zeta_a) + 2[D_t zeta, H](d_a D_t f/zeta_a) - sq
    let lhs5 = d2_hf.sub(&kernel.hilbert(&d2_f));
    let (t1, t2) = kernel.commutator2(&f, &accel, &dtf, state.u());
    let rhs5 = t1.add(&t2.scale(c(2.0, 0.0))).sub(&sq);
    let res5 = lhs5.sub(&rhs5).l2_norm();
    assert!(res5 <= 1e-6, "U5 residual {res5}");

    // U6: [D_t^2 - iA d_a, H] f = 2[D_t zeta, H](d_a D_t f / zeta_a) - sq
    let a_da_hf = q.a.mul(&hf.derivative()).scale(IM);
    let a_da_f = q.a.mul(&f.derivative()).scale(IM);
    let lhs6 = d2_hf.sub(&a_da_hf).sub(&kernel.hilbert(&d2_f.sub(&a_da_f)));
    let rhs6 = t2.scale(c(2.0, 0.0)).sub(&sq);
    let res6 = lhs6.sub(&rhs6).l2_norm();
    assert!(res6 <= 1e-6, "U6 residual {res6}");
}

#[test]
fn family_distance_recovers_members() {
    let family = StokesFamily::build(0.1, 21, 10, 1e-11).unwrap();
    let grid = Grid::new(2.0, 256).unwrap();

    // exact member, off the amplitude grid
    let gamma0 = 0.0625;
    let phase0 = 0.8;
    let w = stokes_newton(gamma0, 10, 1e-11).unwrap();
    let member = stokes_state(&w, 0.0, grid, phase0).unwrap();
    let fit = family.distance(&member, 512).unwrap();
    assert!(fit.distance <= 1e-6, "member distance {}", fit.distance);
    assert!((fit.gamma - gamma0).abs() <= 0.005, "gamma {}", fit.gamma);
    assert!(
        (fit.phase - phase0).abs() < 0.01
            || (fit.phase - phase0).abs() > crate::spectral::TWO_PI - 0.01,
        "phase {}",
        fit.phase
    );

    // member plus an orthogonal sideband reports the sideband size
    // (L2 norm of amp * e^{ikx} over the domain is amp * sqrt(2 pi q))
    let h = 1e-3;
    let amp = h / grid.length().sqrt();
    let sideband = Field::single_mode(grid, 5, c(amp, 0.0));
    let perturbed = crate::waterwave::WaterState::new(
        grid,
        0.0,
        member.offset().add(&sideband),
        member.u().clone(),
    );
    let fit2 = family.distance(&perturbed, 512).unwrap();
    assert!(
        (fit2.distance / h - 1.0).abs() <= 0.05,
        "sideband distance {} vs {h}",
        fit2.distance
    );

    // rest state sits at the zero-amplitude member
    let rest = crate::waterwave::WaterState::rest(grid);
    let fit3 = family.distance(&rest, 512).unwrap();
    assert!(fit3.distance <= 1e-10 && fit3.gamma <= 1e-6);
}

#[test]
fn eulerian_elevation_harmonics() {
    let grid = Grid::new(1.0, 256).unwrap();
    // flat water
    let flat = crate::waterwave::WaterState::rest(grid);
    let e = elevation(&flat, 256).unwrap();
    assert!(e.eta.iter().all(|v| v.abs() < 1e-14));

    let eps: f64 = 0.05;
    let wave = &*WAVE_005;
    let state = stokes_state(wave, 0.0, grid, 0.0).unwrap();
    let elev = elevation(&state, 512).unwrap();
    let (mean, amps) = harmonic_amplitudes(&elev, &[1, 2, 3]);
    let tol = 5.0 * eps.powi(4);
    assert!((amps[0] - (eps + eps.powi(3) / 8.0)).abs() <= tol, "mode 1 {}", amps[0]);
    assert!((amps[1] - 0.5 * eps * eps).abs() <= tol, "mode 2 {}", amps[1]);
    assert!((amps[2] - 3.0 * eps.powi(3) / 8.0).abs() <= tol, "mode 3 {}", amps[2]);

    // mean level is steady in time
    let later = evolve(&state, 0.3, 0.005, |_| {}).unwrap();
    let elev2 = elevation(&later, 512).unwrap();
    let (mean2, _) = harmonic_amplitudes(&elev2, &[1]);
    assert!((mean2 - mean).abs() <= 1e-8, "mean drift {}", (mean2 - mean).abs());
}
