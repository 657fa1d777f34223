//! FFT plan cache.

use num_complex::Complex64;
use once_cell::sync::Lazy;
use rustfft::{Fft, FftPlanner};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

struct Plans {
    planner: FftPlanner<f64>,
    forward: HashMap<usize, Arc<dyn Fft<f64>>>,
    inverse: HashMap<usize, Arc<dyn Fft<f64>>>,
}

static PLANS: Lazy<Mutex<Plans>> = Lazy::new(|| {
    Mutex::new(Plans {
        planner: FftPlanner::new(),
        forward: HashMap::new(),
        inverse: HashMap::new(),
    })
});

/// Unnormalized forward DFT in place.
pub fn forward(buf: &mut [Complex64]) {
    let fft = {
        let mut plans = PLANS.lock().unwrap();
        let n = buf.len();
        if !plans.forward.contains_key(&n) {
            let p = plans.planner.plan_fft_forward(n);
            plans.forward.insert(n, p);
        }
        plans.forward[&n].clone()
    };
    fft.process(buf);
}

/// Unnormalized inverse DFT in place (caller divides by n).
pub fn inverse(buf: &mut [Complex64]) {
    let fft = {
        let mut plans = PLANS.lock().unwrap();
        let n = buf.len();
        if !plans.inverse.contains_key(&n) {
            let p = plans.planner.plan_fft_inverse(n);
            plans.inverse.insert(n, p);
        }
        plans.inverse[&n].clone()
    };
    fft.process(buf);
}
