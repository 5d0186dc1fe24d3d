//! Sampled waveforms and the per-signal quantities the inequality
//! checks consume: Lp norms, energy moments, Fourier transforms, and
//! inner products.
//!
//! All continuous integrals are discretized by the composite rectangle
//! rule on the sampling lattice; signals are treated as zero outside
//! their window. The forward Fourier kernel is `e^{-j2πft}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fft;

/// A uniform sampling lattice: `t_k = t0 + k*dt`, `k = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl Lattice {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !t0.is_finite() || !dt.is_finite() || dt <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "lattice requires finite t0 and dt > 0, got t0={t0}, dt={dt}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "lattice requires n >= 2, got n={n}"
            )));
        }
        Ok(Self { t0, dt, n })
    }

    /// Desk-scale default: `t ∈ [-8, 8)`, `dt = 1/32` (512 samples).
    /// Gaussian tails at the window edge are below 1e-80, so closed-form
    /// checks pass at tight tolerances.
    pub fn desk() -> Self {
        Self {
            t0: -8.0,
            dt: 1.0 / 32.0,
            n: 512,
        }
    }

    /// Symmetric lattice `[-half_extent, half_extent)` at step `dt`.
    pub fn centered(half_extent: f64, dt: f64) -> Result<Self> {
        if !half_extent.is_finite() || half_extent <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "half extent must be positive, got {half_extent}"
            )));
        }
        let n = (2.0 * half_extent / dt).round() as usize;
        Self::new(-half_extent, dt, n)
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }
}

/// A uniformly sampled complex waveform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    t0: f64,
    dt: f64,
    samples: Vec<Complex64>,
}

impl SampledSignal {
    pub fn new(t0: f64, dt: f64, samples: Vec<Complex64>) -> Result<Self> {
        Lattice::new(t0, dt, samples.len())?;
        if samples
            .iter()
            .any(|s| !s.re.is_finite() || !s.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "samples must be finite".to_string(),
            ));
        }
        Ok(Self { t0, dt, samples })
    }

    /// Sample a closed-form waveform on a lattice.
    pub fn from_fn(lattice: Lattice, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let samples = (0..lattice.n).map(|k| f(lattice.time_at(k))).collect();
        Self::new(lattice.t0, lattice.dt, samples)
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn lattice(&self) -> Lattice {
        Lattice {
            t0: self.t0,
            dt: self.dt,
            n: self.samples.len(),
        }
    }

    pub fn time_at(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.dt
    }

    /// Rectangle-rule energy `Σ |x_k|^2 dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum::<f64>() * self.dt
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            t0: self.t0,
            dt: self.dt,
            samples: self.samples.iter().map(|s| s * c).collect(),
        }
    }

    pub fn shares_lattice(&self, other: &Self) -> bool {
        self.t0 == other.t0 && self.dt == other.dt && self.samples.len() == other.samples.len()
    }
}

fn require_shared_lattice(u: &SampledSignal, v: &SampledSignal) -> Result<()> {
    if !u.shares_lattice(v) {
        return Err(Error::LatticeMismatch(format!(
            "(t0={}, dt={}, n={}) vs (t0={}, dt={}, n={})",
            u.t0,
            u.dt,
            u.len(),
            v.t0,
            v.dt,
            v.len()
        )));
    }
    Ok(())
}

/// An ordered transmit set sharing one sampling lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SignalSet {
    signals: Vec<SampledSignal>,
    labels: Vec<String>,
}

impl SignalSet {
    /// `labels` must be empty (unnamed) or one per signal.
    pub fn new(signals: Vec<SampledSignal>, labels: Vec<String>) -> Result<Self> {
        if signals.is_empty() {
            return Err(Error::InvalidParameter(
                "signal set must hold at least one signal".to_string(),
            ));
        }
        for s in &signals[1..] {
            require_shared_lattice(&signals[0], s)?;
        }
        if !labels.is_empty() && labels.len() != signals.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} labels, got {}",
                signals.len(),
                labels.len()
            )));
        }
        let labels = if labels.is_empty() {
            vec![String::new(); signals.len()]
        } else {
            labels
        };
        Ok(Self { signals, labels })
    }

    pub fn size(&self) -> usize {
        self.signals.len()
    }

    pub fn get(&self, i: usize) -> Result<&SampledSignal> {
        self.signals.get(i).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "signal index {i} out of range for set of {}",
                self.signals.len()
            ))
        })
    }

    pub fn signals(&self) -> &[SampledSignal] {
        &self.signals
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn lattice(&self) -> Lattice {
        self.signals[0].lattice()
    }

    /// Set with every signal multiplied by `c`.
    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            signals: self.signals.iter().map(|s| s.scaled(c)).collect(),
            labels: self.labels.clone(),
        }
    }

    /// FNV-1a 64-bit digest of the canonical JSON serialization, as a
    /// 16-hex-digit string. An identifier for reports, not a secure hash.
    pub fn digest(&self) -> String {
        let bytes = self.to_json_string();
        let mut h: u64 = 0xcbf29ce484222325;
        for b in bytes.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
        format!("{h:016x}")
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&WireSignalSet::from(self)).expect("signal set serialization")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let wire: WireSignalSet = serde_json::from_str(text)?;
        wire.try_into()
    }

    pub fn to_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }

    pub fn from_file(path: impl AsRef<std::path::Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

/// On-disk form: signals as arrays of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct WireSignalSet {
    t0: f64,
    dt: f64,
    n: usize,
    #[serde(default)]
    labels: Vec<String>,
    signals: Vec<Vec<[f64; 2]>>,
}

impl From<&SignalSet> for WireSignalSet {
    fn from(set: &SignalSet) -> Self {
        let lattice = set.lattice();
        Self {
            t0: lattice.t0,
            dt: lattice.dt,
            n: lattice.n,
            labels: set.labels.clone(),
            signals: set
                .signals
                .iter()
                .map(|s| s.samples().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }
}

impl TryFrom<WireSignalSet> for SignalSet {
    type Error = Error;

    fn try_from(wire: WireSignalSet) -> Result<Self> {
        let mut signals = Vec::with_capacity(wire.signals.len());
        for samples in &wire.signals {
            if samples.len() != wire.n {
                return Err(Error::Format(format!(
                    "signal of length {} does not match n={}",
                    samples.len(),
                    wire.n
                )));
            }
            let samples = samples
                .iter()
                .map(|[re, im]| Complex64::new(*re, *im))
                .collect();
            signals.push(SampledSignal::new(wire.t0, wire.dt, samples)?);
        }
        SignalSet::new(signals, wire.labels)
    }
}

/// A sampled spectrum on a uniform frequency lattice `f_j = f0 + j*df`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumGrid {
    f0: f64,
    df: f64,
    values: Vec<Complex64>,
}

impl SpectrumGrid {
    pub fn new(f0: f64, df: f64, values: Vec<Complex64>) -> Result<Self> {
        if !f0.is_finite() || !df.is_finite() || df <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "spectrum requires finite f0 and df > 0, got f0={f0}, df={df}"
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "spectrum values must be finite".to_string(),
            ));
        }
        Ok(Self { f0, df, values })
    }

    pub fn f0(&self) -> f64 {
        self.f0
    }

    pub fn df(&self) -> f64 {
        self.df
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn freq_at(&self, j: usize) -> f64 {
        self.f0 + j as f64 * self.df
    }

    /// Rectangle-rule spectral energy `Σ |X_j|^2 df`.
    pub fn energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.df
    }
}

/// Rectangle-rule Lp norm: `(Σ |x_k|^p dt)^{1/p}` for finite `p`,
/// `max_k |x_k|` for `p = ∞`. Requires `p >= 1`.
pub fn lp_norm(x: &SampledSignal, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "Lp norm requires p >= 1 (or inf), got {p}"
        )));
    }
    if p.is_infinite() {
        return Ok(x.samples().iter().map(|s| s.norm()).fold(0.0, f64::max));
    }
    let sum: f64 = x.samples().iter().map(|s| s.norm().powf(p)).sum();
    Ok((sum * x.dt()).powf(1.0 / p))
}

/// `Σ u_k conj(v_k) dt` on a shared lattice.
pub fn inner_product(u: &SampledSignal, v: &SampledSignal) -> Result<Complex64> {
    require_shared_lattice(u, v)?;
    let sum: Complex64 = u
        .samples()
        .iter()
        .zip(v.samples())
        .map(|(a, b)| a * b.conj())
        .sum();
    Ok(sum * u.dt())
}

/// Discrete approximation of `X(f) = ∫ x(t) e^{-j2πft} dt` on a centered
/// frequency lattice of step `df = 1 / (pad_factor * N * dt)`, including
/// the `e^{-j2πf t0}` origin phase.
pub fn fourier_transform(x: &SampledSignal, pad_factor: usize) -> Result<SpectrumGrid> {
    if pad_factor < 1 {
        return Err(Error::InvalidParameter(
            "pad_factor must be >= 1".to_string(),
        ));
    }
    let n = x.len();
    let len = n
        .checked_mul(pad_factor)
        .ok_or_else(|| Error::InvalidParameter("pad_factor overflow".to_string()))?;
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    buf[..n].copy_from_slice(x.samples());
    fft::forward(&mut buf);

    let df = 1.0 / (len as f64 * x.dt());
    let half = len / 2;
    let f0 = -(half as f64) * df;
    let values = (0..len)
        .map(|j| {
            let r = j as isize - half as isize;
            let bin = r.rem_euclid(len as isize) as usize;
            let f = f0 + j as f64 * df;
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * f * x.t0());
            buf[bin] * phase * x.dt()
        })
        .collect();
    SpectrumGrid::new(f0, df, values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentOrder {
    Mean,
    Variance,
}

/// Anything carrying a normalized energy density over a 1-D axis.
pub trait EnergyDensity {
    fn axis_at(&self, k: usize) -> f64;
    fn weight_at(&self, k: usize) -> f64;
    fn points(&self) -> usize;
}

impl EnergyDensity for SampledSignal {
    fn axis_at(&self, k: usize) -> f64 {
        self.time_at(k)
    }

    fn weight_at(&self, k: usize) -> f64 {
        self.samples[k].norm_sqr() * self.dt
    }

    fn points(&self) -> usize {
        self.len()
    }
}

impl EnergyDensity for SpectrumGrid {
    fn axis_at(&self, k: usize) -> f64 {
        self.freq_at(k)
    }

    fn weight_at(&self, k: usize) -> f64 {
        self.values[k].norm_sqr() * self.df
    }

    fn points(&self) -> usize {
        self.len()
    }
}

/// Mean or centered variance of the normalized energy density
/// `|x|^2 / ‖x‖₂²` (time) or `|X|^2 / ‖X‖₂²` (frequency).
pub fn moment<D: EnergyDensity>(density: &D, order: MomentOrder) -> Result<f64> {
    let total: f64 = (0..density.points()).map(|k| density.weight_at(k)).sum();
    if total <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let mean: f64 = (0..density.points())
        .map(|k| density.axis_at(k) * density.weight_at(k))
        .sum::<f64>()
        / total;
    match order {
        MomentOrder::Mean => Ok(mean),
        MomentOrder::Variance => {
            let var = (0..density.points())
                .map(|k| {
                    let d = density.axis_at(k) - mean;
                    d * d * density.weight_at(k)
                })
                .sum::<f64>()
                / total;
            Ok(var)
        }
    }
}

/// Exact band-limited x2 interpolation by zero-padding the DFT spectrum.
/// Output shares `t0`, halves `dt`, doubles the sample count. The even
/// output samples reproduce the input samples.
pub fn upsample2(x: &SampledSignal) -> SampledSignal {
    let n = x.len();
    let mut spec = x.samples().to_vec();
    fft::forward(&mut spec);

    let n2 = 2 * n;
    let mut spread = vec![Complex64::new(0.0, 0.0); n2];
    let half = n / 2;
    // Positive frequencies [0, half), negatives (half, n); the Nyquist
    // bin of an even-length input is split between +/- Nyquist.
    for (r, v) in spec.iter().enumerate() {
        if r < half || (n % 2 == 1 && r == half) {
            spread[r] = *v;
        } else if n.is_multiple_of(2) && r == half {
            spread[r] = v * 0.5;
            spread[n2 - r] = v * 0.5;
        } else {
            spread[n2 - (n - r)] = *v;
        }
    }
    fft::inverse(&mut spread);
    let scale = 1.0 / n as f64;
    let samples = spread.into_iter().map(|v| v * scale).collect();
    SampledSignal {
        t0: x.t0(),
        dt: x.dt() / 2.0,
        samples,
    }
}
