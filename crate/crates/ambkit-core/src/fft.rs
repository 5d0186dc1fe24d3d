//! Thin wrappers around `rustfft` plans.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

pub(crate) fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    FftPlanner::new().plan_fft(len, direction)
}

/// One-shot forward DFT: `X[r] = sum_k x[k] e^{-2 pi i k r / N}`.
pub(crate) fn forward(values: &mut [Complex64]) {
    plan(values.len(), FftDirection::Forward).process(values);
}

/// One-shot unnormalized inverse DFT: `X[r] = sum_k x[k] e^{+2 pi i k r / N}`.
pub(crate) fn inverse(values: &mut [Complex64]) {
    plan(values.len(), FftDirection::Inverse).process(values);
}
