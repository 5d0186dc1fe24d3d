//! Test-waveform generation: Gaussians, matched Gaussian pairs, Hermite
//! functions, Gaussian-enveloped LFM chirps, and phase codes.
//!
//! Generated signals carry labels of the form `family:key=value,...`
//! (e.g. `gauss:alpha=3.141592653589793`). The label family records how
//! a signal was produced; the verification suite reads it to decide
//! whether a set qualifies as a matched Gaussian family.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::signal::{Lattice, SampledSignal, SignalSet};

/// Waveform families understood by [`gen_waveform`].
#[derive(Debug, Clone, PartialEq)]
pub enum WaveformKind {
    /// `e^{-α t² + β t + θ}` with real `α > 0` and complex `β`, `θ`.
    /// With `normalize`, scaled to unit continuous 2-norm; `α = π`,
    /// `β = θ = 0` then yields `g(t) = 2^{1/4} e^{-π t²}`.
    Gaussian {
        alpha: f64,
        beta: Complex64,
        theta: Complex64,
        normalize: bool,
    },
    /// Two Gaussians sharing the same `α` (the Lieb equality family),
    /// with per-signal `β` and `θ`.
    MatchedGaussianPair {
        alpha: f64,
        beta: [Complex64; 2],
        theta: [Complex64; 2],
        normalize: bool,
    },
    /// Orthonormal Hermite functions `h_n`; `h_0` is the unit Gaussian.
    Hermite { orders: Vec<usize> },
    /// Gaussian-enveloped linear FM chirps
    /// `e^{-α t²} e^{j(π rate t² + 2π f0 t)}`, one signal per rate.
    LfmChirp {
        alpha: f64,
        rates: Vec<f64>,
        f0: Vec<f64>,
        normalize: bool,
    },
    /// Unit-modulus chips `e^{jφ_i}` on a rectangular chip pulse of
    /// width `chip`, starting at `start` (default: centered on 0).
    PhaseCode {
        phases: Vec<f64>,
        chip: f64,
        start: Option<f64>,
        normalize: bool,
    },
}

/// Sample a waveform family on a lattice.
pub fn gen_waveform(kind: &WaveformKind, lattice: Lattice) -> Result<SignalSet> {
    Lattice::new(lattice.t0, lattice.dt, lattice.n)?;
    match kind {
        WaveformKind::Gaussian {
            alpha,
            beta,
            theta,
            normalize,
        } => {
            let signal = gaussian_signal(lattice, *alpha, *beta, *theta, *normalize)?;
            SignalSet::new(vec![signal], vec![gauss_label(*alpha)])
        }
        WaveformKind::MatchedGaussianPair {
            alpha,
            beta,
            theta,
            normalize,
        } => {
            let signals = vec![
                gaussian_signal(lattice, *alpha, beta[0], theta[0], *normalize)?,
                gaussian_signal(lattice, *alpha, beta[1], theta[1], *normalize)?,
            ];
            SignalSet::new(signals, vec![gauss_label(*alpha), gauss_label(*alpha)])
        }
        WaveformKind::Hermite { orders } => {
            if orders.is_empty() {
                return Err(Error::InvalidParameter(
                    "hermite orders must be non-empty".to_string(),
                ));
            }
            let mut signals = Vec::with_capacity(orders.len());
            let mut labels = Vec::with_capacity(orders.len());
            for &n in orders {
                signals.push(hermite_function(lattice, n)?);
                labels.push(format!("hermite:order={n}"));
            }
            SignalSet::new(signals, labels)
        }
        WaveformKind::LfmChirp {
            alpha,
            rates,
            f0,
            normalize,
        } => {
            if rates.is_empty() {
                return Err(Error::InvalidParameter(
                    "chirp rates must be non-empty".to_string(),
                ));
            }
            if !f0.is_empty() && f0.len() != rates.len() {
                return Err(Error::InvalidParameter(format!(
                    "expected {} chirp center frequencies, got {}",
                    rates.len(),
                    f0.len()
                )));
            }
            require_positive_alpha(*alpha)?;
            for r in rates {
                if !r.is_finite() {
                    return Err(Error::InvalidParameter(format!("chirp rate {r}")));
                }
            }
            let scale = if *normalize {
                (2.0 * alpha / PI).powf(0.25)
            } else {
                1.0
            };
            let mut signals = Vec::with_capacity(rates.len());
            let mut labels = Vec::with_capacity(rates.len());
            for (m, &rate) in rates.iter().enumerate() {
                let center = if f0.is_empty() { 0.0 } else { f0[m] };
                let signal = SampledSignal::from_fn(lattice, |t| {
                    let envelope = scale * (-alpha * t * t).exp();
                    Complex64::from_polar(envelope, PI * rate * t * t + 2.0 * PI * center * t)
                })?;
                signals.push(signal);
                labels.push(format!("chirp:rate={rate},f0={center}"));
            }
            SignalSet::new(signals, labels)
        }
        WaveformKind::PhaseCode {
            phases,
            chip,
            start,
            normalize,
        } => {
            if phases.is_empty() {
                return Err(Error::InvalidParameter(
                    "phase code must have at least one chip".to_string(),
                ));
            }
            if !chip.is_finite() || *chip <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "chip duration must be positive, got {chip}"
                )));
            }
            let duration = phases.len() as f64 * chip;
            let start = start.unwrap_or(-duration / 2.0);
            let mut signal = SampledSignal::from_fn(lattice, |t| {
                let idx = ((t - start) / chip).floor();
                if idx >= 0.0 && (idx as usize) < phases.len() {
                    Complex64::from_polar(1.0, phases[idx as usize])
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })?;
            if *normalize {
                let norm = signal.energy().sqrt();
                if norm <= 0.0 {
                    return Err(Error::InvalidParameter(
                        "phase code lies outside the sampling window".to_string(),
                    ));
                }
                signal = signal.scaled(Complex64::new(1.0 / norm, 0.0));
            }
            let len = phases.len();
            SignalSet::new(vec![signal], vec![format!("pcode:len={len}")])
        }
    }
}

/// The unit Gaussian `g(t) = 2^{1/4} e^{-π t²}`.
pub fn unit_gaussian(lattice: Lattice) -> Result<SampledSignal> {
    gaussian_signal(
        lattice,
        PI,
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        true,
    )
}

fn require_positive_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "Gaussian width requires alpha > 0, got {alpha}"
        )));
    }
    Ok(())
}

fn gaussian_signal(
    lattice: Lattice,
    alpha: f64,
    beta: Complex64,
    theta: Complex64,
    normalize: bool,
) -> Result<SampledSignal> {
    require_positive_alpha(alpha)?;
    if !(beta.re.is_finite() && beta.im.is_finite() && theta.re.is_finite() && theta.im.is_finite())
    {
        return Err(Error::InvalidParameter(
            "beta and theta must be finite".to_string(),
        ));
    }
    // Continuous energy of e^{-α t² + β t + θ}:
    //   e^{2 Re θ} e^{(Re β)² / (2α)} sqrt(π / (2α))
    let scale = if normalize {
        let energy = (2.0 * theta.re + beta.re * beta.re / (2.0 * alpha)).exp()
            * (PI / (2.0 * alpha)).sqrt();
        1.0 / energy.sqrt()
    } else {
        1.0
    };
    SampledSignal::from_fn(lattice, |t| {
        let exponent = Complex64::new(-alpha * t * t, 0.0) + beta * t + theta;
        exponent.exp() * scale
    })
}

/// Orthonormal Hermite function of order `n` under the `e^{-j2πft}`
/// transform convention: `h_0 = 2^{1/4} e^{-π t²}`, and generally
/// `h_n(t) = 2^{1/4} H_n(√(2π) t) e^{-π t²} / √(2ⁿ n!)`.
pub fn hermite_function(lattice: Lattice, n: usize) -> Result<SampledSignal> {
    if n > 170 {
        return Err(Error::InvalidParameter(format!(
            "hermite order {n} overflows the normalization factorial"
        )));
    }
    let mut log_factor = 0.0f64; // log of 2^n n!
    for k in 1..=n {
        log_factor += (2.0 * k as f64).ln();
    }
    let norm = 2f64.powf(0.25) * (-0.5 * log_factor).exp();
    SampledSignal::from_fn(lattice, |t| {
        let y = (2.0 * PI).sqrt() * t;
        // Physicists' recurrence H_{k+1} = 2y H_k - 2k H_{k-1}.
        let mut h_prev = 1.0f64;
        let mut h = 2.0 * y;
        let value = match n {
            0 => 1.0,
            1 => h,
            _ => {
                for k in 1..n {
                    let next = 2.0 * y * h - 2.0 * k as f64 * h_prev;
                    h_prev = h;
                    h = next;
                }
                h
            }
        };
        Complex64::new(norm * value * (-PI * t * t).exp(), 0.0)
    })
}

fn gauss_label(alpha: f64) -> String {
    format!("gauss:alpha={alpha}")
}

/// Parse `alpha` out of a `gauss:...` label. Returns `None` for other
/// families or unlabeled signals.
pub fn gaussian_label_alpha(label: &str) -> Option<f64> {
    let rest = label.strip_prefix("gauss:")?;
    for part in rest.split(',') {
        if let Some(value) = part.strip_prefix("alpha=") {
            return value.parse().ok();
        }
    }
    None
}

/// True when every signal in the set was generated as a Gaussian with
/// one shared width `α` (a matched Gaussian family).
pub fn is_matched_gaussian_set(set: &SignalSet) -> bool {
    let mut alpha = None;
    for label in set.labels() {
        match gaussian_label_alpha(label) {
            None => return false,
            Some(a) => match alpha {
                None => alpha = Some(a),
                Some(first) => {
                    if (a - first).abs() > 1e-12 * first.abs().max(1.0) {
                        return false;
                    }
                }
            },
        }
    }
    alpha.is_some()
}
