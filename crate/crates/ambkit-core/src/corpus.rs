//! Reproducible seeded corpora for tests and benchmarks.
//!
//! Smooth signals are random combinations of the first few Hermite
//! functions: well sampled on the desk lattice, concentrated far from
//! the window edges, with finite moments of every order. Everything is
//! driven by [`crate::rng::Lcg64`], so a seed pins a corpus exactly.

use num_complex::Complex64;

use crate::rng::Lcg64;
use crate::signal::{Lattice, SampledSignal, SignalSet};
use crate::waveform::hermite_function;

/// Random unit-norm smooth signal: a seeded complex combination of
/// Hermite functions of order `< max_order`.
pub fn smooth_signal(lattice: Lattice, max_order: usize, seed: u64) -> SampledSignal {
    let max_order = max_order.max(1);
    let mut rng = Lcg64::new(seed);
    let coefficients: Vec<Complex64> = (0..max_order)
        .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    let mut samples = vec![Complex64::new(0.0, 0.0); lattice.n];
    for (order, c) in coefficients.iter().enumerate() {
        let h = hermite_function(lattice, order).expect("hermite order in range");
        for (acc, v) in samples.iter_mut().zip(h.samples()) {
            *acc += c * v;
        }
    }
    let signal = SampledSignal::new(lattice.t0, lattice.dt, samples).expect("finite combination");
    let norm = signal.energy().sqrt();
    signal.scaled(Complex64::new(1.0 / norm, 0.0))
}

/// Set of `m` independent smooth signals (labels `rand:<k>`).
pub fn smooth_set(lattice: Lattice, m: usize, max_order: usize, seed: u64) -> SignalSet {
    let mut rng = Lcg64::new(seed);
    let signals: Vec<SampledSignal> = (0..m)
        .map(|_| smooth_signal(lattice, max_order, rng.next_u64()))
        .collect();
    let labels = (0..m).map(|k| format!("rand:{k}")).collect();
    SignalSet::new(signals, labels).expect("shared lattice by construction")
}

/// Rough full-band complex signal with i.i.d. uniform samples in
/// `[-1,1]²`; used for transform-equivalence tests where smoothness is
/// irrelevant.
pub fn rough_signal(lattice: Lattice, seed: u64) -> SampledSignal {
    let mut rng = Lcg64::new(seed);
    let samples = (0..lattice.n)
        .map(|_| Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)))
        .collect();
    SampledSignal::new(lattice.t0, lattice.dt, samples).expect("finite samples")
}
