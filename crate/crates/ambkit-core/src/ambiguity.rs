//! Ambiguity functions and Wigner distributions on delay–Doppler grids.
//!
//! Kernels (rectangle rule on the sampling lattice, `e^{+j2πνt}` Doppler
//! convention):
//!
//! ```text
//! cross      χ(u,v)(τ,ν) = Σ_t u(t) v*(t+τ) e^{j2πνt} dt
//! symmetric  A(u,v)(τ,ν) = Σ_t u(t+τ/2) v*(t-τ/2) e^{j2πνt} dt
//! wigner     W(u,v)(t,f) = Σ_τ u(t+τ/2) v*(t-τ/2) e^{-j2πfτ} dτ
//! ```
//!
//! Half-lag shifts are made exact by upsampling both signals ×2 with
//! band-limited zero-pad interpolation before forming lag products. The
//! fast path evaluates each fixed-lag row with one zero-padded transform;
//! requested Doppler lattices must land on transform bins (off-lattice
//! values are rejected, never interpolated), which keeps the fast path
//! bit-for-bit equal to the direct summation oracle.
//!
//! Grid rows are computed in parallel; within-row sums keep a fixed
//! left-to-right order, so results are independent of thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fft;
use crate::signal::{upsample2, SampledSignal};

/// Rectangular (τ,ν) lattice: `τ_i = tau0 + i*dtau`, `ν_j = nu0 + j*dnu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub tau0: f64,
    pub dtau: f64,
    pub n_tau: usize,
    pub nu0: f64,
    pub dnu: f64,
    pub n_nu: usize,
}

impl GridSpec {
    pub fn new(
        tau0: f64,
        dtau: f64,
        n_tau: usize,
        nu0: f64,
        dnu: f64,
        n_nu: usize,
    ) -> Result<Self> {
        let spec = Self {
            tau0,
            dtau,
            n_tau,
            nu0,
            dnu,
            n_nu,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.tau0.is_finite()
            && self.nu0.is_finite()
            && self.dtau.is_finite()
            && self.dnu.is_finite()
            && self.dtau > 0.0
            && self.dnu > 0.0
            && self.n_tau >= 1
            && self.n_nu >= 1;
        if !ok {
            return Err(Error::InvalidParameter(format!("grid spec {self:?}")));
        }
        Ok(())
    }

    /// Symmetric grid over `[-extent, extent]²` with `n × n` points
    /// (`n >= 2`); step is `2*extent/(n-1)`, so odd `n` puts the origin
    /// on the lattice.
    pub fn centered(extent: f64, n: usize) -> Result<Self> {
        if !extent.is_finite() || extent <= 0.0 || n < 2 {
            return Err(Error::InvalidParameter(format!(
                "centered grid requires extent > 0 and n >= 2, got extent={extent}, n={n}"
            )));
        }
        let step = 2.0 * extent / (n - 1) as f64;
        Self::new(-extent, step, n, -extent, step, n)
    }

    pub fn tau_at(&self, i: usize) -> f64 {
        self.tau0 + i as f64 * self.dtau
    }

    pub fn nu_at(&self, j: usize) -> f64 {
        self.nu0 + j as f64 * self.dnu
    }

    pub fn cell_area(&self) -> f64 {
        self.dtau * self.dnu
    }

    pub fn points(&self) -> usize {
        self.n_tau * self.n_nu
    }

    /// Index of the lattice point nearest `(tau, nu)`, clamped to the grid.
    pub fn nearest_index(&self, tau: f64, nu: f64) -> (usize, usize) {
        let clamp = |x: f64, n: usize| -> usize {
            let r = x.round();
            if r <= 0.0 {
                0
            } else if r >= (n - 1) as f64 {
                n - 1
            } else {
                r as usize
            }
        };
        (
            clamp((tau - self.tau0) / self.dtau, self.n_tau),
            clamp((nu - self.nu0) / self.dnu, self.n_nu),
        )
    }
}

/// Complex surface over a [`GridSpec`], row-major with τ as the row index.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbiguityGrid {
    spec: GridSpec,
    values: Vec<Complex64>,
}

impl AmbiguityGrid {
    pub fn new(spec: GridSpec, values: Vec<Complex64>) -> Result<Self> {
        spec.validate()?;
        if values.len() != spec.points() {
            return Err(Error::InvalidParameter(format!(
                "expected {} grid values, got {}",
                spec.points(),
                values.len()
            )));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidParameter(
                "grid values must be finite".to_string(),
            ));
        }
        Ok(Self { spec, values })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, i_tau: usize, j_nu: usize) -> Complex64 {
        self.values[i_tau * self.spec.n_nu + j_nu]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// Ambiguity surface kinds shared by the fast path and the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceKind {
    Cross,
    Symmetric,
    Wigner,
}

impl std::fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SurfaceKind::Cross => write!(f, "cross"),
            SurfaceKind::Symmetric => write!(f, "symmetric"),
            SurfaceKind::Wigner => write!(f, "wigner"),
        }
    }
}

/// A measurable set `E` in the (τ,ν) plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    Rect {
        tau_min: f64,
        tau_max: f64,
        nu_min: f64,
        nu_max: f64,
    },
    Disk {
        center_tau: f64,
        center_nu: f64,
        radius: f64,
    },
}

impl Region {
    pub fn validate(&self) -> Result<()> {
        let ok = match self {
            Region::Rect {
                tau_min,
                tau_max,
                nu_min,
                nu_max,
            } => {
                tau_min.is_finite()
                    && tau_max.is_finite()
                    && nu_min.is_finite()
                    && nu_max.is_finite()
                    && tau_max > tau_min
                    && nu_max > nu_min
            }
            Region::Disk {
                center_tau,
                center_nu,
                radius,
            } => {
                center_tau.is_finite()
                    && center_nu.is_finite()
                    && radius.is_finite()
                    && *radius > 0.0
            }
        };
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "region must have positive measure and finite bounds: {self:?}"
            )));
        }
        Ok(())
    }

    /// Analytic measure |E|.
    pub fn measure(&self) -> f64 {
        match self {
            Region::Rect {
                tau_min,
                tau_max,
                nu_min,
                nu_max,
            } => (tau_max - tau_min) * (nu_max - nu_min),
            Region::Disk { radius, .. } => PI * radius * radius,
        }
    }

    /// Membership is decided by cell center, so discrete areas are
    /// reproducible bit-for-bit.
    pub fn contains(&self, tau: f64, nu: f64) -> bool {
        match self {
            Region::Rect {
                tau_min,
                tau_max,
                nu_min,
                nu_max,
            } => tau >= *tau_min && tau <= *tau_max && nu >= *nu_min && nu <= *nu_max,
            Region::Disk {
                center_tau,
                center_nu,
                radius,
            } => {
                let dt = tau - center_tau;
                let dn = nu - center_nu;
                dt * dt + dn * dn <= radius * radius
            }
        }
    }
}

// ── lattice alignment ───────────────────────────────────────────────────────

/// `x/step` as an integer, rejecting off-lattice values. The tolerance
/// absorbs accumulated float error in `x0 + i*dx` style lattices while
/// staying far below half a step.
fn int_ratio(x: f64, step: f64, what: &str) -> Result<i64> {
    let ratio = x / step;
    let rounded = ratio.round();
    if (ratio - rounded).abs() > 1e-6 + 1e-9 * ratio.abs() {
        return Err(Error::GridAlignment(format!(
            "{what} = {x} is not an integer multiple of {step}"
        )));
    }
    Ok(rounded as i64)
}

/// Doppler-lattice plan: transform length and the bin index of each
/// requested ν. Requires `1/(dnu*dt_work)` to be an integer `d` (the ν
/// lattice then lies on the bins of a length `lcm(d, >=min_len)`
/// transform) and `nu0/dnu` to be an integer.
struct NuPlan {
    fft_len: usize,
    bins: Vec<usize>,
    nus: Vec<f64>,
}

fn plan_nu(spec: &GridSpec, dt_work: f64, min_len: usize) -> Result<NuPlan> {
    let ratio = 1.0 / (spec.dnu * dt_work);
    let d = ratio.round();
    if !d.is_finite() || d < 1.0 || (ratio - d).abs() > 1e-6 * ratio {
        return Err(Error::GridAlignment(format!(
            "dnu = {} is not 1/(k*{dt_work}) for integer k",
            spec.dnu
        )));
    }
    let d = d as usize;
    let k0 = int_ratio(spec.nu0, spec.dnu, "nu0")?;
    let repeats = min_len.div_ceil(d).max(1);
    let fft_len = d * repeats;
    let bins = (0..spec.n_nu)
        .map(|j| {
            let bin = (k0 + j as i64) * repeats as i64;
            bin.rem_euclid(fft_len as i64) as usize
        })
        .collect();
    let nus = (0..spec.n_nu).map(|j| spec.nu_at(j)).collect();
    Ok(NuPlan { fft_len, bins, nus })
}

// ── fast paths ──────────────────────────────────────────────────────────────

/// `χ(u,v)(τ,ν) = Σ_k u_k conj(v(t_k+τ)) e^{j2πν t_k} dt` on `spec`.
/// The τ lattice must consist of multiples of the signal `dt`.
pub fn cross_ambiguity(
    u: &SampledSignal,
    v: &SampledSignal,
    spec: &GridSpec,
) -> Result<AmbiguityGrid> {
    spec.validate()?;
    require_shared(u, v)?;
    let n = u.len();
    let dt = u.dt();
    let s0 = int_ratio(spec.tau0, dt, "tau0")?;
    let sd = int_ratio(spec.dtau, dt, "dtau")?;
    let plan = plan_nu(spec, dt, n)?;
    let transform = fft::plan(plan.fft_len, FftDirection::Inverse);

    let rows = compute_rows(spec.n_tau, plan, u.t0(), &transform, |i, buf| {
        let shift = s0 + i as i64 * sd;
        fill_lag_product(buf, u.samples(), v.samples(), shift, dt);
    });
    AmbiguityGrid::new(*spec, rows)
}

/// `A(u,v)(τ,ν) = Σ_t u(t+τ/2) v*(t-τ/2) e^{j2πνt} dt` on `spec`, with
/// half-lag shifts made exact by internal ×2 upsampling. Satisfies
/// `A(τ,ν) = e^{-jπντ} χ(-τ,ν)` on shared lattice points.
pub fn symmetric_ambiguity(
    u: &SampledSignal,
    v: &SampledSignal,
    spec: &GridSpec,
) -> Result<AmbiguityGrid> {
    spec.validate()?;
    require_shared(u, v)?;
    let dt = u.dt();
    // τ must be a multiple of dt so that τ/2 lies on the fine lattice.
    let s0 = int_ratio(spec.tau0, dt, "tau0")?;
    let sd = int_ratio(spec.dtau, dt, "dtau")?;
    let u2 = upsample2(u);
    let v2 = upsample2(v);
    let dt2 = u2.dt();
    let n2 = u2.len();
    let plan = plan_nu(spec, dt2, n2)?;
    let transform = fft::plan(plan.fft_len, FftDirection::Inverse);

    let rows = compute_rows(spec.n_tau, plan, u.t0(), &transform, |i, buf| {
        let half_shift = s0 + i as i64 * sd; // τ/2 in units of dt2
        fill_symmetric_product(buf, u2.samples(), v2.samples(), half_shift, dt2);
    });
    AmbiguityGrid::new(*spec, rows)
}

/// `W(u,v)(t,f) = Σ_τ u(t+τ/2) v*(t-τ/2) e^{-j2πfτ} dτ` on `spec`
/// (rows = t, columns = f; dτ = signal dt). The t lattice must consist
/// of multiples of `dt/2`.
pub fn wigner(u: &SampledSignal, v: &SampledSignal, spec: &GridSpec) -> Result<AmbiguityGrid> {
    spec.validate()?;
    require_shared(u, v)?;
    let dt = u.dt();
    let dt2 = dt / 2.0;
    let i0 = int_ratio(spec.tau0 - u.t0(), dt2, "t0 offset")?;
    let id = int_ratio(spec.dtau, dt2, "dt step")?;
    let u2 = upsample2(u);
    let v2 = upsample2(v);
    let n2 = u2.len();
    // The within-row variable is the lag index s with τ = s*dt.
    let plan = plan_nu(spec, dt, n2)?;
    let transform = fft::plan(plan.fft_len, FftDirection::Forward);

    let n_nu = spec.n_nu;
    let fft_len = plan.fft_len;
    let bins = Arc::new(plan.bins);
    let mut values = vec![Complex64::new(0.0, 0.0); spec.points()];
    values.par_chunks_mut(n_nu).enumerate().for_each_init(
        || {
            (
                vec![Complex64::new(0.0, 0.0); fft_len],
                vec![Complex64::new(0.0, 0.0); transform.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), (row, out)| {
            buf.fill(Complex64::new(0.0, 0.0));
            let center = i0 + row as i64 * id;
            if center >= 0 && (center as usize) < n2 {
                let center = center as usize;
                let reach = center.min(n2 - 1 - center) as i64;
                for s in -reach..=reach {
                    let a = u2.samples()[(center as i64 + s) as usize];
                    let b = v2.samples()[(center as i64 - s) as usize];
                    let slot = s.rem_euclid(fft_len as i64) as usize;
                    buf[slot] += a * b.conj() * dt;
                }
            }
            transform.process_with_scratch(buf, scratch);
            for (j, out_v) in out.iter_mut().enumerate() {
                *out_v = buf[bins[j]];
            }
        },
    );
    AmbiguityGrid::new(*spec, values)
}

fn require_shared(u: &SampledSignal, v: &SampledSignal) -> Result<()> {
    if !u.shares_lattice(v) {
        return Err(Error::LatticeMismatch(format!(
            "(t0={}, dt={}, n={}) vs (t0={}, dt={}, n={})",
            u.t0(),
            u.dt(),
            u.len(),
            v.t0(),
            v.dt(),
            v.len()
        )));
    }
    Ok(())
}

/// Row driver shared by the cross and symmetric paths: fill the lag
/// product, transform, extract requested bins, apply the `e^{j2πν t0}`
/// origin phase.
fn compute_rows(
    n_rows: usize,
    plan: NuPlan,
    t0: f64,
    transform: &Arc<dyn rustfft::Fft<f64>>,
    fill: impl Fn(usize, &mut [Complex64]) + Sync,
) -> Vec<Complex64> {
    let NuPlan { fft_len, bins, nus } = plan;
    let n_nu = bins.len();
    let phases: Vec<Complex64> = nus
        .iter()
        .map(|nu| Complex64::from_polar(1.0, 2.0 * PI * nu * t0))
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); n_rows * n_nu];
    values.par_chunks_mut(n_nu).enumerate().for_each_init(
        || {
            (
                vec![Complex64::new(0.0, 0.0); fft_len],
                vec![Complex64::new(0.0, 0.0); transform.get_inplace_scratch_len()],
            )
        },
        |(buf, scratch), (row, out)| {
            buf.fill(Complex64::new(0.0, 0.0));
            fill(row, buf);
            transform.process_with_scratch(buf, scratch);
            for (j, out_v) in out.iter_mut().enumerate() {
                *out_v = buf[bins[j]] * phases[j];
            }
        },
    );
    values
}

/// `buf[k] = u[k] conj(v[k+shift]) dt` over in-range k.
fn fill_lag_product(buf: &mut [Complex64], u: &[Complex64], v: &[Complex64], shift: i64, dt: f64) {
    let n = u.len() as i64;
    let lo = 0.max(-shift);
    let hi = n.min(n - shift);
    for k in lo..hi {
        buf[k as usize] = u[k as usize] * v[(k + shift) as usize].conj() * dt;
    }
}

/// `buf[k] = u[k+half_shift] conj(v[k-half_shift]) dt` over in-range k.
fn fill_symmetric_product(
    buf: &mut [Complex64],
    u: &[Complex64],
    v: &[Complex64],
    half_shift: i64,
    dt: f64,
) {
    let n = u.len() as i64;
    let lo = half_shift.abs();
    let hi = n - half_shift.abs();
    for k in lo..hi {
        buf[k as usize] = u[(k + half_shift) as usize] * v[(k - half_shift) as usize].conj() * dt;
    }
}

// ── direct-quadrature oracle ────────────────────────────────────────────────

/// Evaluates the defining sum term by term with explicit complex
/// exponentials and no transform tricks; ground truth for the fast path.
/// Points must satisfy the same lattice-alignment rules as the grids.
pub fn ambiguity_direct(
    u: &SampledSignal,
    v: &SampledSignal,
    points: &[(f64, f64)],
    kind: SurfaceKind,
) -> Result<Vec<Complex64>> {
    require_shared(u, v)?;
    let dt = u.dt();
    match kind {
        SurfaceKind::Cross => points
            .iter()
            .map(|&(tau, nu)| {
                let shift = int_ratio(tau, dt, "tau")?;
                let n = u.len() as i64;
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0.max(-shift)..n.min(n - shift) {
                    let t = u.time_at(k as usize);
                    let kernel = Complex64::from_polar(1.0, 2.0 * PI * nu * t);
                    acc +=
                        u.samples()[k as usize] * v.samples()[(k + shift) as usize].conj() * kernel;
                }
                Ok(acc * dt)
            })
            .collect(),
        SurfaceKind::Symmetric => {
            let u2 = upsample2(u);
            let v2 = upsample2(v);
            let dt2 = u2.dt();
            points
                .iter()
                .map(|&(tau, nu)| {
                    let half = int_ratio(tau, dt, "tau")?; // τ/2 in dt2 units
                    let n = u2.len() as i64;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for k in half.abs()..n - half.abs() {
                        let t = u2.time_at(k as usize);
                        let kernel = Complex64::from_polar(1.0, 2.0 * PI * nu * t);
                        acc += u2.samples()[(k + half) as usize]
                            * v2.samples()[(k - half) as usize].conj()
                            * kernel;
                    }
                    Ok(acc * dt2)
                })
                .collect()
        }
        SurfaceKind::Wigner => {
            let u2 = upsample2(u);
            let v2 = upsample2(v);
            let dt2 = u2.dt();
            points
                .iter()
                .map(|&(t, f)| {
                    let center = int_ratio(t - u.t0(), dt2, "t offset")?;
                    let n = u2.len() as i64;
                    if center < 0 || center >= n {
                        return Ok(Complex64::new(0.0, 0.0));
                    }
                    let reach = center.min(n - 1 - center);
                    let mut acc = Complex64::new(0.0, 0.0);
                    for s in -reach..=reach {
                        let tau = s as f64 * dt;
                        let kernel = Complex64::from_polar(1.0, -2.0 * PI * f * tau);
                        acc += u2.samples()[(center + s) as usize]
                            * v2.samples()[(center - s) as usize].conj()
                            * kernel;
                    }
                    Ok(acc * dt)
                })
                .collect()
        }
    }
}

// ── grid functionals ────────────────────────────────────────────────────────

/// `Σ |value|^p dτ dν` over cells whose center lies in `region`
/// (everywhere when `region` is `None`). Requires `1 <= p < ∞`.
pub fn grid_lp_integral(grid: &AmbiguityGrid, p: f64, region: Option<&Region>) -> Result<f64> {
    validate_integral_exponent(p)?;
    if let Some(r) = region {
        r.validate()?;
    }
    let spec = grid.spec();
    let mut sum = 0.0;
    for i in 0..spec.n_tau {
        let tau = spec.tau_at(i);
        for j in 0..spec.n_nu {
            if let Some(r) = region {
                if !r.contains(tau, spec.nu_at(j)) {
                    continue;
                }
            }
            sum += abs_power(grid.value(i, j), p);
        }
    }
    Ok(sum * spec.cell_area())
}

/// `Σ |value|^p dτ dν` over cells selected by `mask` (one flag per grid
/// cell, row-major).
pub fn masked_lp_integral(grid: &AmbiguityGrid, p: f64, mask: &[bool]) -> Result<f64> {
    validate_integral_exponent(p)?;
    if mask.len() != grid.values().len() {
        return Err(Error::InvalidParameter(format!(
            "mask of {} cells on a grid of {}",
            mask.len(),
            grid.values().len()
        )));
    }
    let sum: f64 = grid
        .values()
        .iter()
        .zip(mask)
        .filter(|(_, keep)| **keep)
        .map(|(v, _)| abs_power(*v, p))
        .sum();
    Ok(sum * grid.spec().cell_area())
}

fn validate_integral_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 || p.is_infinite() {
        return Err(Error::InvalidParameter(format!(
            "grid integral requires finite p >= 1, got {p}"
        )));
    }
    Ok(())
}

fn abs_power(v: Complex64, p: f64) -> f64 {
    if p == 2.0 {
        v.norm_sqr()
    } else if p == 1.0 {
        v.norm()
    } else if p == 4.0 {
        let s = v.norm_sqr();
        s * s
    } else {
        v.norm().powf(p)
    }
}

/// Area of the ε-level set: `(count of cells with |value| > eps) * dτ dν`.
pub fn epsilon_support(grid: &AmbiguityGrid, eps: f64) -> Result<f64> {
    let mask = epsilon_mask(grid, eps)?;
    let count = mask.iter().filter(|m| **m).count();
    Ok(count as f64 * grid.spec().cell_area())
}

/// Cell mask of the ε-level set `{ |value| > eps }`, row-major.
pub fn epsilon_mask(grid: &AmbiguityGrid, eps: f64) -> Result<Vec<bool>> {
    if !eps.is_finite() || eps <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon must be positive and finite, got {eps}"
        )));
    }
    Ok(grid
        .values()
        .iter()
        .map(|v| v.norm_sqr() > eps * eps)
        .collect())
}
