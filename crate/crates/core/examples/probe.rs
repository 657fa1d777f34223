use sideband_core::initdata::{build_initial_data, SeedSpec};
use sideband_core::nls::{lift_to_b, unstable_seed};
use sideband_core::spectral::Grid;
use sideband_core::stokes::stokes_newton;
use sideband_core::waterwave::Stepper;
use std::time::Instant;

fn main() {
    let eps = 0.1;
    let q = 10.0;
    let delta = 0.01;
    let grid = Grid::new(q, 512).unwrap();
    let slow = Grid::new(1.0, 32).unwrap();
    let seed = unstable_seed(slow, delta, 11.0, delta / 200.0).unwrap();
    let b0 = lift_to_b(&seed);
    let wave = stokes_newton(eps, 16, 1e-11).unwrap();
    let data = build_initial_data(&SeedSpec::new(&b0, eps, &wave), grid).unwrap();

    let qi = q as i64;
    let dt = 0.02;
    let mut stepper = Stepper::new(dt);
    let mut s = data.state.clone();
    let mut series: Vec<(f64, f64, f64)> = Vec::new();
    let start = Instant::now();
    let t_end = 250.0;
    let steps = (t_end / dt) as usize;
    for i in 1..=steps {
        s = stepper.step(&s).unwrap();
        if i % 50 == 0 {
            series.push((s.t(), s.offset().coeff(qi - 1).norm(), s.offset().coeff(qi + 1).norm()));
        }
    }
    println!("n=512: {:.1} ms/step, total {:.1?}", start.elapsed().as_millis() as f64 / steps as f64, start.elapsed());
    let fit = |lo: f64, hi: f64| -> f64 {
        let pts: Vec<(f64, f64)> = series.iter().filter(|p| p.0 >= lo && p.0 <= hi).map(|p| (p.0, ((p.1 + p.2)/2.0).ln())).collect();
        let n_f = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0,0.0), |a, p| (a.0+p.0, a.1+p.1));
        let (sxx, sxy) = pts.iter().fold((0.0,0.0), |a, p| (a.0+p.0*p.0, a.1+p.0*p.1));
        (n_f*sxy - sx*sy)/(n_f*sxx - sx*sx)
    };
    println!("fitted sideband rate [20,250] = {:.5}", fit(20.0, 250.0));
    println!("fitted sideband rate [100,250] = {:.5}", fit(100.0, 250.0));
    println!("spec expectation eps^2 tau = {:.5}; envelope prediction = {:.5}",
        eps*eps*seed.tau, eps*eps*0.125*(8.0f64 - 1.0).sqrt());
    // growth of sideband amplitudes overall
    println!("sideband at t=20: {:.3e}, at t=250: {:.3e}", series[19].1, series.last().unwrap().1);

    // timing at n = 1024
    let grid2 = Grid::new(q, 1024).unwrap();
    let data2 = build_initial_data(&SeedSpec::new(&b0, eps, &wave), grid2).unwrap();
    let mut st2 = Stepper::new(dt);
    let mut s2 = data2.state.clone();
    let t0 = Instant::now();
    for _ in 0..20 { s2 = st2.step(&s2).unwrap(); }
    println!("n=1024: {:.1} ms/step -> {:.1} min for 12500 steps", t0.elapsed().as_millis() as f64/20.0, t0.elapsed().as_secs_f64()/20.0*12500.0/60.0);
}
