//! Machine-checked norm identities and uncertainty inequalities.
//!
//! Every check produces an [`InequalityResult`]: both sides of the
//! relation as evaluated numbers, the sense (`le`, `ge`, `eq`), the
//! measured slack, the tolerance in force, and the verdict. Identities
//! inherit quadrature error and default to a 1e-3 relative tolerance;
//! one-sided theorems hold essentially exactly and get only a 1e-9
//! round-off guard.
//!
//! Relation catalog (suite keys, each may emit several results):
//!
//! | key        | statement                                                            |
//! |------------|----------------------------------------------------------------------|
//! | heisenberg | time–frequency spread product ≥ energy / 4π, per signal               |
//! | lieb       | ∫∫|A(u,v)|ᵖ ⋛ (2/p)‖u‖₂ᵖ‖v‖₂ᵖ per pair and p                          |
//! | local      | ∫∫_E |A|² ≤ |E|·max|A|² ≤ |E|·‖u‖₂²‖v‖₂², per signal and region       |
//! | R3.1       | spatially averaged MIMO 2-energy = ΣΣ‖u_m‖²‖u_m'‖²                    |
//! | R3.2       | ΣΣ‖u_m‖²‖u_m'‖² ≥ ΣΣ|A_mm'(τ,ν)|² at the worst lattice point          |
//! | R3.3       | region energy ≤ |E|·ΣΣ‖A_mm'‖∞² ≤ |E|·ΣΣ‖u_m‖²‖u_m'‖²                 |
//! | R3.3-supp  | measured ε-support ≥ captured energy / ΣΣ‖u_m‖²‖u_m'‖²                |
//! | R3.4       | equal-norm sets: region energy ≤ M²|E|‖u‖⁴ (corrected constant)       |
//! | R3.5       | matched Gaussian sets with |A|≤1: 2-energy ⋛ (2/p)ΣΣ‖u_m‖ᵖ‖u_m'‖ᵖ     |
//! | P4.1       | ∫∫‖R‖_F² = ΣΣ‖u_i‖²‖u_j‖²                                             |
//! | P4.2       | max ‖R‖₁ ≤ (Σ‖u_i‖₂)·max‖u_j‖₂, plus Hölder (p,q) variants            |
//! | P4.3       | max ‖R‖∞ ≤ (Σ‖u_j‖₂)·max‖u_i‖₂, plus Hölder (p,q) variants            |
//! | P4.4       | ∫∫_E‖R‖_F² ≤ |E|·ΣΣ‖u_i‖²‖u_j‖², plus its support bound               |
//! | P4.5       | ∫∫‖R‖ₚᵖ (entrywise) ⋛ (2/p)ΣΣ‖u_i‖₂ᵖ‖u_j‖₂ᵖ                           |
//! | P4.1norm   | ∫∫ΣΣ|A_ij| ≥ 2ΣΣ‖u_i‖₂‖u_j‖₂ and ≥ ΣΣ‖u_i‖₁‖u_j‖∞                     |

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::PI;

use crate::ambiguity::{
    epsilon_mask, epsilon_support, grid_lp_integral, masked_lp_integral, symmetric_ambiguity,
    AmbiguityGrid, GridSpec, Region,
};
use crate::error::{Error, Result};
use crate::mimo::{
    correlation_matrix_field, map_slices, matrix_norm_field, mimo_ambiguity, mimo_l2_energy,
    mimo_l2_energy_in_region, CorrelationKind, CorrelationMatrixField, MatrixNormKind,
    SteeringSpec,
};
use crate::signal::{fourier_transform, lp_norm, moment, MomentOrder, SampledSignal, SignalSet};
use crate::waveform::is_matched_gaussian_set;

/// Default relative tolerance for identities (they inherit quadrature error).
pub const EQ_REL_TOL: f64 = 1e-3;
/// Default relative round-off guard for one-sided theorems.
pub const GUARD_REL_TOL: f64 = 1e-9;

/// Which way an [`InequalityResult`] must point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

/// One verified relation: both sides, sense, slack, tolerance, verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityResult {
    pub id: String,
    pub lhs: f64,
    pub rhs: f64,
    pub sense: Sense,
    pub slack: f64,
    pub tol: f64,
    pub satisfied: bool,
    pub context: BTreeMap<String, Value>,
}

impl InequalityResult {
    /// Build a result, deriving slack (`rhs-lhs` for `le`, `lhs-rhs` for
    /// `ge`, `-|lhs-rhs|` for `eq`) and the verdict `slack >= -tol` with
    /// `tol = rel_tol * max(|lhs|, |rhs|)`.
    pub fn new(
        id: impl Into<String>,
        sense: Sense,
        lhs: f64,
        rhs: f64,
        rel_tol: f64,
        context: BTreeMap<String, Value>,
    ) -> Result<Self> {
        if !lhs.is_finite() || !rhs.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "non-finite relation sides: lhs={lhs}, rhs={rhs}"
            )));
        }
        let slack = match sense {
            Sense::Le => rhs - lhs,
            Sense::Ge => lhs - rhs,
            Sense::Eq => -(lhs - rhs).abs(),
        };
        let tol = rel_tol * lhs.abs().max(rhs.abs());
        Ok(Self {
            id: id.into(),
            lhs,
            rhs,
            sense,
            slack,
            tol,
            satisfied: slack >= -tol,
            context,
        })
    }

    /// Same relation re-judged at a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.tol = rel_tol * self.lhs.abs().max(self.rhs.abs());
        self.satisfied = self.slack >= -self.tol;
        self
    }
}

/// Suite parameters: the analysis grid, steering, exponent sweep,
/// local-uncertainty regions, support thresholds, and per-relation
/// relative tolerance overrides (key or full result id).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub grid: GridSpec,
    pub steering: SteeringSpec,
    pub kind: CorrelationKind,
    pub p_list: Vec<f64>,
    pub regions: Vec<Region>,
    pub eps_list: Vec<f64>,
    pub tolerances: BTreeMap<String, f64>,
}

impl SuiteConfig {
    /// Desk-scale defaults: 513×513 grid over `[-8,8]²`, γ = 1,
    /// `p ∈ {1, 1.5, 2, 3, 4}`, a unit disk and a 4×4 square,
    /// `ε ∈ {0.05, 0.1, 0.2, 0.4}`.
    pub fn desk(m: usize) -> Result<Self> {
        Ok(Self {
            grid: GridSpec::centered(8.0, 513)?,
            steering: SteeringSpec::new(1, m)?,
            kind: CorrelationKind::Symmetric,
            p_list: vec![1.0, 1.5, 2.0, 3.0, 4.0],
            regions: vec![
                Region::Disk {
                    center_tau: 0.0,
                    center_nu: 0.0,
                    radius: 1.0,
                },
                Region::Rect {
                    tau_min: -2.0,
                    tau_max: 2.0,
                    nu_min: -2.0,
                    nu_max: 2.0,
                },
            ],
            eps_list: vec![0.05, 0.1, 0.2, 0.4],
            tolerances: BTreeMap::new(),
        })
    }

    fn rel_tol(&self, key: &str, id: &str, default: f64) -> f64 {
        self.tolerances
            .get(id)
            .or_else(|| self.tolerances.get(key))
            .copied()
            .unwrap_or(default)
    }
}

/// Suite keys accepted by the `only` filter.
pub const RELATION_CATALOG: &[&str] = &[
    "heisenberg",
    "lieb",
    "local",
    "R3.1",
    "R3.2",
    "R3.3",
    "R3.3-supp",
    "R3.4",
    "R3.5",
    "P4.1",
    "P4.2",
    "P4.3",
    "P4.4",
    "P4.4-supp",
    "P4.5",
    "P4.1norm",
];

fn validate_filter(only: Option<&[String]>) -> Result<Option<BTreeSet<String>>> {
    match only {
        None => Ok(None),
        Some(keys) => {
            let mut set = BTreeSet::new();
            for key in keys {
                if !RELATION_CATALOG.contains(&key.as_str()) {
                    return Err(Error::UnknownRelation(key.clone()));
                }
                set.insert(key.clone());
            }
            Ok(Some(set))
        }
    }
}

fn enabled(filter: &Option<BTreeSet<String>>, key: &str) -> bool {
    filter.as_ref().is_none_or(|set| set.contains(key))
}

fn explicit(filter: &Option<BTreeSet<String>>, key: &str) -> bool {
    filter.as_ref().is_some_and(|set| set.contains(key))
}

fn fmt_p(p: f64) -> String {
    if p.is_infinite() {
        "inf".to_string()
    } else if p == p.trunc() {
        format!("{}", p as i64)
    } else {
        format!("{p}")
    }
}

fn p_value(p: f64) -> Value {
    if p.is_infinite() {
        Value::String("inf".to_string())
    } else {
        json!(p)
    }
}

// ── standalone checks ───────────────────────────────────────────────────────

/// Heisenberg: `sqrt(∫(t-m_t)²|x|²dt) · sqrt(∫(f-m_f)²|X|²df) ≥ ‖x‖₂²/4π`,
/// with centered moments and the spectrum from a 4× padded transform.
pub fn check_heisenberg(x: &SampledSignal) -> Result<InequalityResult> {
    let energy = x.energy();
    if energy <= 0.0 {
        return Err(Error::ZeroEnergy);
    }
    let time_var = moment(x, MomentOrder::Variance)?;
    let spectrum = fourier_transform(x, 4)?;
    let freq_var = moment(&spectrum, MomentOrder::Variance)?;
    let lhs = (time_var * energy).sqrt() * (freq_var * energy).sqrt();
    let rhs = energy / (4.0 * PI);
    let mut context = BTreeMap::new();
    context.insert("energy".to_string(), json!(energy));
    context.insert("time_variance".to_string(), json!(time_var));
    context.insert("freq_variance".to_string(), json!(freq_var));
    InequalityResult::new("heisenberg", Sense::Ge, lhs, rhs, GUARD_REL_TOL, context)
}

/// Lieb: `∫∫|A(u,v)|ᵖ ⋛ (2/p)(‖u‖₂‖v‖₂)ᵖ`: upper bound for p > 2,
/// lower bound for p < 2, the Moyal identity at p = 2.
pub fn check_lieb(
    u: &SampledSignal,
    v: &SampledSignal,
    p: f64,
    grid: &GridSpec,
) -> Result<InequalityResult> {
    let surface = symmetric_ambiguity(u, v, grid)?;
    let norm_u = lp_norm(u, 2.0)?;
    let norm_v = lp_norm(v, 2.0)?;
    lieb_from_grid(&surface, norm_u, norm_v, p, BTreeMap::new())
}

fn lieb_from_grid(
    surface: &AmbiguityGrid,
    norm_u: f64,
    norm_v: f64,
    p: f64,
    mut context: BTreeMap<String, Value>,
) -> Result<InequalityResult> {
    let lhs = grid_lp_integral(surface, p, None)?;
    let rhs = 2.0 / p * (norm_u * norm_v).powf(p);
    let (sense, tol) = if p > 2.0 {
        (Sense::Le, GUARD_REL_TOL)
    } else if p < 2.0 {
        (Sense::Ge, GUARD_REL_TOL)
    } else {
        (Sense::Eq, EQ_REL_TOL)
    };
    context.insert("p".to_string(), p_value(p));
    InequalityResult::new(format!("lieb.p{}", fmt_p(p)), sense, lhs, rhs, tol, context)
}

/// Local uncertainty chain on one surface:
/// `∫∫_E |A|² ≤ |E|·max|A|²` and `|E|·max|A|² ≤ |E|·energy_bound`,
/// with `energy_bound = ‖u‖₂²‖v‖₂²` supplied by the caller and |E|
/// computed analytically. Returns the two links in order.
pub fn check_local_uncertainty(
    grid: &AmbiguityGrid,
    region: &Region,
    energy_bound: f64,
) -> Result<Vec<InequalityResult>> {
    region.validate()?;
    if !energy_bound.is_finite() || energy_bound < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "energy bound must be finite and non-negative, got {energy_bound}"
        )));
    }
    let captured = grid_lp_integral(grid, 2.0, Some(region))?;
    let peak_sq = grid.max_abs().powi(2);
    let area = region.measure();
    let context = |extra: &str| {
        let mut ctx = BTreeMap::new();
        ctx.insert("region".to_string(), serde_json::to_value(region).unwrap());
        ctx.insert("bound".to_string(), Value::String(extra.to_string()));
        ctx
    };
    Ok(vec![
        InequalityResult::new(
            "local.inf",
            Sense::Le,
            captured,
            area * peak_sq,
            GUARD_REL_TOL,
            context("|E| * sup|A|^2"),
        )?,
        InequalityResult::new(
            "local.energy",
            Sense::Le,
            area * peak_sq,
            area * energy_bound,
            GUARD_REL_TOL,
            context("|E| * energy"),
        )?,
    ])
}

/// Support lower bound `numerator_energy / denominator`; callers pair it
/// with a measured ε-support for the verdict.
pub fn support_lower_bound(numerator_energy: f64, denominator: f64) -> Result<f64> {
    if !denominator.is_finite() || denominator <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "support bound denominator must be positive, got {denominator}"
        )));
    }
    if !numerator_energy.is_finite() || numerator_energy < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "support bound numerator must be finite and non-negative, got {numerator_energy}"
        )));
    }
    Ok(numerator_energy / denominator)
}

// ── the MIMO suite ──────────────────────────────────────────────────────────

struct SuiteState<'a> {
    set: &'a SignalSet,
    cfg: &'a SuiteConfig,
    field: &'a CorrelationMatrixField,
    norms2: Vec<f64>,
    energy_sum: f64, // ΣΣ ‖u_m‖²‖u_m'‖² = (Σ‖u_m‖²)²
    mimo_energy: Option<f64>,
    region_energy: BTreeMap<usize, f64>,
}

impl<'a> SuiteState<'a> {
    fn new(set: &'a SignalSet, cfg: &'a SuiteConfig, field: &'a CorrelationMatrixField) -> Self {
        let norms2: Vec<f64> = set.signals().iter().map(|s| s.energy()).collect();
        let total: f64 = norms2.iter().sum();
        Self {
            set,
            cfg,
            field,
            norms2,
            energy_sum: total * total,
            mimo_energy: None,
            region_energy: BTreeMap::new(),
        }
    }

    fn mimo_energy(&mut self) -> Result<f64> {
        if let Some(e) = self.mimo_energy {
            return Ok(e);
        }
        let e = mimo_l2_energy(self.field, &self.cfg.steering)?;
        self.mimo_energy = Some(e);
        Ok(e)
    }

    fn region_energy(&mut self, index: usize) -> Result<f64> {
        if let Some(e) = self.region_energy.get(&index) {
            return Ok(*e);
        }
        let e = mimo_l2_energy_in_region(self.field, &self.cfg.steering, &self.cfg.regions[index])?;
        self.region_energy.insert(index, e);
        Ok(e)
    }

    fn norm_power_sum(&self, p: f64) -> f64 {
        // ΣΣ ‖u_m‖ᵖ‖u_m'‖ᵖ = (Σ ‖u_m‖ᵖ)²
        let s: f64 = self.norms2.iter().map(|n2| n2.powf(p / 2.0)).sum();
        s * s
    }

    fn base_context(&self) -> BTreeMap<String, Value> {
        let mut ctx = BTreeMap::new();
        ctx.insert("m".to_string(), json!(self.set.size()));
        ctx.insert("gamma".to_string(), json!(self.cfg.steering.gamma));
        ctx.insert("k_s".to_string(), json!(self.cfg.steering.k_s));
        ctx
    }

    #[allow(clippy::too_many_arguments)]
    fn result(
        &self,
        key: &str,
        id: String,
        sense: Sense,
        lhs: f64,
        rhs: f64,
        default_tol: f64,
        context: BTreeMap<String, Value>,
    ) -> Result<InequalityResult> {
        let rel = self.cfg.rel_tol(key, &id, default_tol);
        InequalityResult::new(id, sense, lhs, rhs, rel, context)
    }
}

/// Equal-norm within a round-off guard.
fn equal_norms(norms2: &[f64]) -> bool {
    let max = norms2.iter().copied().fold(f64::MIN, f64::max);
    let min = norms2.iter().copied().fold(f64::MAX, f64::min);
    max - min <= 1e-9 * max.abs().max(1e-300)
}

/// Run the MIMO relations (R3.x, P4.x) on a transmit set. `only`
/// restricts to the named catalog keys; relations whose hypotheses the
/// set does not meet are skipped when unrequested and are an error when
/// explicitly requested.
pub fn run_mimo_suite(
    set: &SignalSet,
    cfg: &SuiteConfig,
    only: Option<&[String]>,
) -> Result<Vec<InequalityResult>> {
    let field = correlation_matrix_field(set, &cfg.grid, cfg.kind)?;
    mimo_suite_with_field(set, cfg, &field, validate_filter(only)?)
}

fn mimo_suite_with_field(
    set: &SignalSet,
    cfg: &SuiteConfig,
    field: &CorrelationMatrixField,
    filter: Option<BTreeSet<String>>,
) -> Result<Vec<InequalityResult>> {
    cfg.steering.validate_for(set.size())?;
    let m = set.size();
    let mut state = SuiteState::new(set, cfg, field);
    let mut results = Vec::new();

    // R3.1: MIMO energy identity.
    if enabled(&filter, "R3.1") {
        let lhs = state.mimo_energy()?;
        let ctx = state.base_context();
        results.push(state.result(
            "R3.1",
            "R3.1".to_string(),
            Sense::Eq,
            lhs,
            state.energy_sum,
            EQ_REL_TOL,
            ctx,
        )?);
    }

    // R3.2: pointwise bound at the worst lattice point.
    if enabled(&filter, "R3.2") {
        let points = cfg.grid.points();
        let mut worst = 0.0f64;
        let mut worst_idx = 0usize;
        for idx in 0..points {
            let mut sum = 0.0;
            for i in 0..m {
                for j in 0..m {
                    sum += field.entry(i, j).values()[idx].norm_sqr();
                }
            }
            if sum > worst {
                worst = sum;
                worst_idx = idx;
            }
        }
        let mut ctx = state.base_context();
        ctx.insert(
            "worst_tau".to_string(),
            json!(cfg.grid.tau_at(worst_idx / cfg.grid.n_nu)),
        );
        ctx.insert(
            "worst_nu".to_string(),
            json!(cfg.grid.nu_at(worst_idx % cfg.grid.n_nu)),
        );
        results.push(state.result(
            "R3.2",
            "R3.2".to_string(),
            Sense::Ge,
            state.energy_sum,
            worst,
            GUARD_REL_TOL,
            ctx,
        )?);
    }

    // Per-entry sup norms, shared by R3.3.
    let entry_sup_sq_sum = |field: &CorrelationMatrixField| -> f64 {
        let mut sum = 0.0;
        for i in 0..m {
            for j in 0..m {
                sum += field.entry(i, j).max_abs().powi(2);
            }
        }
        sum
    };

    // R3.3: local uncertainty of the MIMO surface, both bounds.
    if enabled(&filter, "R3.3") {
        if cfg.regions.is_empty() && explicit(&filter, "R3.3") {
            return Err(Error::Precondition(
                "R3.3 requested but no regions configured".to_string(),
            ));
        }
        let sup_sum = entry_sup_sq_sum(field);
        for (r_idx, region) in cfg.regions.iter().enumerate() {
            let lhs = state.region_energy(r_idx)?;
            let area = region.measure();
            let mut ctx = state.base_context();
            ctx.insert("region".to_string(), serde_json::to_value(region)?);
            results.push(state.result(
                "R3.3",
                format!("R3.3a.E{r_idx}"),
                Sense::Le,
                lhs,
                area * sup_sum,
                GUARD_REL_TOL,
                ctx.clone(),
            )?);
            results.push(state.result(
                "R3.3",
                format!("R3.3b.E{r_idx}"),
                Sense::Le,
                lhs,
                area * state.energy_sum,
                GUARD_REL_TOL,
                ctx,
            )?);
        }
    }

    // R3.3-supp: delay-Doppler support bound per ε. The smallest slice
    // level set must still hold the energy it captures, scaled by the
    // total norm budget.
    if enabled(&filter, "R3.3-supp") {
        if cfg.eps_list.is_empty() && explicit(&filter, "R3.3-supp") {
            return Err(Error::Precondition(
                "R3.3-supp requested but no epsilons configured".to_string(),
            ));
        }
        let k = cfg.steering.k_s;
        for &eps in &cfg.eps_list {
            let areas = map_slices(field, &cfg.steering, |slice| {
                epsilon_support(slice, eps).expect("validated eps")
            })?;
            let (argmin, min_area) = areas
                .iter()
                .copied()
                .enumerate()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("k_s >= 2 slices");
            let f_s = (argmin / k) as f64 / k as f64;
            let f_s_prime = (argmin % k) as f64 / k as f64;
            let min_slice = mimo_ambiguity(field, &cfg.steering, f_s, f_s_prime)?;
            let mask = epsilon_mask(&min_slice, eps)?;
            let captured = map_slices(field, &cfg.steering, |slice| {
                masked_lp_integral(slice, 2.0, &mask).expect("mask sized to grid")
            })?;
            let numerator = captured.iter().sum::<f64>() / (k * k) as f64;
            let bound = support_lower_bound(numerator, state.energy_sum)?;
            let mut ctx = state.base_context();
            ctx.insert("eps".to_string(), json!(eps));
            ctx.insert("min_slice_f_s".to_string(), json!(f_s));
            ctx.insert("min_slice_f_s_prime".to_string(), json!(f_s_prime));
            results.push(state.result(
                "R3.3-supp",
                format!("R3.3-supp.eps{eps}"),
                Sense::Ge,
                min_area,
                bound,
                GUARD_REL_TOL,
                ctx,
            )?);
        }
    }

    // R3.4: equal-norm specialization. The sharp constant is M²: the
    // double sum has M² terms of ‖u‖⁴ each, and the captured energy
    // approaches M²|E|‖u‖⁴ as E shrinks onto the origin for identical
    // signals, so no smaller multiple of |E|‖u‖⁴ can bound it.
    if enabled(&filter, "R3.4") {
        let equal = equal_norms(&state.norms2);
        if !equal {
            if explicit(&filter, "R3.4") {
                return Err(Error::Precondition(
                    "R3.4 requires an equal-norm set".to_string(),
                ));
            }
        } else {
            if cfg.regions.is_empty() && explicit(&filter, "R3.4") {
                return Err(Error::Precondition(
                    "R3.4 requested but no regions configured".to_string(),
                ));
            }
            let norm4 = {
                let mean = state.norms2.iter().sum::<f64>() / m as f64;
                mean * mean
            };
            for (r_idx, region) in cfg.regions.iter().enumerate() {
                let lhs = state.region_energy(r_idx)?;
                let rhs = (m * m) as f64 * region.measure() * norm4;
                let mut ctx = state.base_context();
                ctx.insert("region".to_string(), serde_json::to_value(region)?);
                ctx.insert(
                    "constant".to_string(),
                    Value::String("M^2 (corrected)".to_string()),
                );
                results.push(state.result(
                    "R3.4",
                    format!("R3.4.E{r_idx}"),
                    Sense::Le,
                    lhs,
                    rhs,
                    GUARD_REL_TOL,
                    ctx,
                )?);
            }
        }
    }

    // R3.5: Lieb sandwich for matched Gaussian sets with |A| ≤ 1.
    if enabled(&filter, "R3.5") {
        let matched = is_matched_gaussian_set(set);
        let max_entry = (0..m)
            .flat_map(|i| (0..m).map(move |j| (i, j)))
            .map(|(i, j)| field.entry(i, j).max_abs())
            .fold(0.0, f64::max);
        let admissible = matched && max_entry <= 1.0 + 1e-9;
        if !admissible {
            if explicit(&filter, "R3.5") {
                return Err(Error::Precondition(if matched {
                    format!("R3.5 requires max|A_mm'| <= 1, measured {max_entry}")
                } else {
                    "R3.5 requires a matched Gaussian set (gauss:alpha=... labels with one shared alpha)"
                        .to_string()
                }));
            }
        } else {
            let lhs = state.mimo_energy()?;
            for &p in &cfg.p_list {
                if !p.is_finite() || p < 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "p list entries must be finite and >= 1, got {p}"
                    )));
                }
                let rhs = 2.0 / p * state.norm_power_sum(p);
                let (sense, tol) = if p > 2.0 {
                    (Sense::Ge, GUARD_REL_TOL)
                } else if p < 2.0 {
                    (Sense::Le, GUARD_REL_TOL)
                } else {
                    (Sense::Eq, EQ_REL_TOL)
                };
                let mut ctx = state.base_context();
                ctx.insert("p".to_string(), p_value(p));
                ctx.insert("max_entry_abs".to_string(), json!(max_entry));
                results.push(state.result(
                    "R3.5",
                    format!("R3.5.p{}", fmt_p(p)),
                    sense,
                    lhs,
                    rhs,
                    tol,
                    ctx,
                )?);
            }
        }
    }

    // P4.x need the Frobenius surface.
    let frobenius = if ["P4.1", "P4.4", "P4.4-supp"]
        .iter()
        .any(|key| enabled(&filter, key))
    {
        Some(matrix_norm_field(field, MatrixNormKind::Frobenius)?)
    } else {
        None
    };

    // P4.1: Frobenius energy identity.
    if enabled(&filter, "P4.1") {
        let fro = frobenius.as_ref().expect("computed above");
        let lhs = fro.power_integral(2.0, None)?;
        let ctx = state.base_context();
        results.push(state.result(
            "P4.1",
            "P4.1".to_string(),
            Sense::Eq,
            lhs,
            state.energy_sum,
            EQ_REL_TOL,
            ctx,
        )?);
    }

    let norms: Vec<f64> = state.norms2.iter().map(|n2| n2.sqrt()).collect();
    let norm_sum: f64 = norms.iter().sum();
    let norm_max: f64 = norms.iter().copied().fold(0.0, f64::max);

    // P4.2 / P4.3: induced norm bounds, with Hölder variants.
    for (key, norm_kind) in [
        ("P4.2", MatrixNormKind::Induced1),
        ("P4.3", MatrixNormKind::InducedInf),
    ] {
        if !enabled(&filter, key) {
            continue;
        }
        let surface = matrix_norm_field(field, norm_kind)?;
        let lhs = surface.max();
        let ctx = state.base_context();
        results.push(state.result(
            key,
            key.to_string(),
            Sense::Le,
            lhs,
            norm_sum * norm_max,
            GUARD_REL_TOL,
            ctx,
        )?);
        for &p in &cfg.p_list {
            if p < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "p list entries must be >= 1, got {p}"
                )));
            }
            let q = if p == 1.0 {
                f64::INFINITY
            } else {
                p / (p - 1.0)
            };
            let mut sum_p = 0.0;
            let mut max_q = 0.0f64;
            for u in set.signals() {
                sum_p += lp_norm(u, p)?;
                max_q = max_q.max(lp_norm(u, q)?);
            }
            let mut ctx = state.base_context();
            ctx.insert("p".to_string(), p_value(p));
            ctx.insert("q".to_string(), p_value(q));
            results.push(state.result(
                key,
                format!("{key}h.p{}", fmt_p(p)),
                Sense::Le,
                lhs,
                sum_p * max_q,
                GUARD_REL_TOL,
                ctx,
            )?);
        }
    }

    // P4.4: local Frobenius bound and its support bound.
    if enabled(&filter, "P4.4") {
        if cfg.regions.is_empty() && explicit(&filter, "P4.4") {
            return Err(Error::Precondition(
                "P4.4 requested but no regions configured".to_string(),
            ));
        }
        let fro = frobenius.as_ref().expect("computed above");
        for (r_idx, region) in cfg.regions.iter().enumerate() {
            let lhs = fro.power_integral(2.0, Some(region))?;
            let rhs = region.measure() * state.energy_sum;
            let mut ctx = state.base_context();
            ctx.insert("region".to_string(), serde_json::to_value(region)?);
            results.push(state.result(
                "P4.4",
                format!("P4.4.E{r_idx}"),
                Sense::Le,
                lhs,
                rhs,
                GUARD_REL_TOL,
                ctx,
            )?);
        }
    }

    if enabled(&filter, "P4.4-supp") {
        if cfg.eps_list.is_empty() && explicit(&filter, "P4.4-supp") {
            return Err(Error::Precondition(
                "P4.4-supp requested but no epsilons configured".to_string(),
            ));
        }
        let fro = frobenius.as_ref().expect("computed above");
        for &eps in &cfg.eps_list {
            let area = fro.epsilon_support(eps)?;
            let mask = fro.epsilon_mask(eps)?;
            let captured = fro.masked_power_integral(2.0, &mask)?;
            let bound = support_lower_bound(captured, state.energy_sum)?;
            let mut ctx = state.base_context();
            ctx.insert("eps".to_string(), json!(eps));
            results.push(state.result(
                "P4.4-supp",
                format!("P4.4-supp.eps{eps}"),
                Sense::Ge,
                area,
                bound,
                GUARD_REL_TOL,
                ctx,
            )?);
        }
    }

    // P4.5: entrywise p-norm Lieb bounds.
    if enabled(&filter, "P4.5") {
        for &p in &cfg.p_list {
            let surface = matrix_norm_field(field, MatrixNormKind::EntrywiseP { p })?;
            let lhs = surface.power_integral(p, None)?;
            let rhs = 2.0 / p * state.norm_power_sum(p);
            let (sense, tol) = if p > 2.0 {
                (Sense::Le, GUARD_REL_TOL)
            } else if p < 2.0 {
                (Sense::Ge, GUARD_REL_TOL)
            } else {
                (Sense::Eq, EQ_REL_TOL)
            };
            let mut ctx = state.base_context();
            ctx.insert("p".to_string(), p_value(p));
            results.push(state.result(
                "P4.5",
                format!("P4.5.p{}", fmt_p(p)),
                sense,
                lhs,
                rhs,
                tol,
                ctx,
            )?);
        }
    }

    // P4.1norm: the two entrywise 1-norm integral claims. The first is
    // the Lieb p = 1 lower bound summed over entries and is equality-
    // adjacent on matched Gaussian sets, so it is judged at the identity
    // tolerance.
    if enabled(&filter, "P4.1norm") {
        let surface = matrix_norm_field(field, MatrixNormKind::EntrywiseP { p: 1.0 })?;
        let integral = surface.power_integral(1.0, None)?;
        let rhs_a = 2.0 * norm_sum * norm_sum;
        let mut l1_sum = 0.0;
        let mut sup_sum = 0.0;
        for u in set.signals() {
            l1_sum += lp_norm(u, 1.0)?;
            sup_sum += lp_norm(u, f64::INFINITY)?;
        }
        let mut ctx = state.base_context();
        ctx.insert(
            "norm".to_string(),
            Value::String("entrywise sum of |A_ij|".to_string()),
        );
        results.push(state.result(
            "P4.1norm",
            "P4.1norm.a".to_string(),
            Sense::Ge,
            integral,
            rhs_a,
            EQ_REL_TOL,
            ctx.clone(),
        )?);
        results.push(state.result(
            "P4.1norm",
            "P4.1norm.b".to_string(),
            Sense::Ge,
            integral,
            l1_sum * sup_sum,
            GUARD_REL_TOL,
            ctx,
        )?);
    }

    Ok(results)
}

/// Full catalog: per-signal Heisenberg, per-pair Lieb sweeps, per-signal
/// local uncertainty, then the MIMO relations, in catalog order.
pub fn run_full_suite(
    set: &SignalSet,
    cfg: &SuiteConfig,
    only: Option<&[String]>,
) -> Result<Vec<InequalityResult>> {
    let filter = validate_filter(only)?;
    let field = correlation_matrix_field(set, &cfg.grid, cfg.kind)?;
    let m = set.size();
    let mut results = Vec::new();

    if enabled(&filter, "heisenberg") {
        for (i, u) in set.signals().iter().enumerate() {
            let mut r = check_heisenberg(u)?;
            r.context.insert("signal".to_string(), json!(i));
            let rel = cfg.rel_tol("heisenberg", &r.id, GUARD_REL_TOL);
            results.push(r.with_rel_tol(rel));
        }
    }

    if enabled(&filter, "lieb") {
        for i in 0..m {
            for j in i..m {
                let surface = symmetric_ambiguity(set.get(i)?, set.get(j)?, &cfg.grid)?;
                let norm_u = lp_norm(set.get(i)?, 2.0)?;
                let norm_v = lp_norm(set.get(j)?, 2.0)?;
                for &p in &cfg.p_list {
                    let mut ctx = BTreeMap::new();
                    ctx.insert("i".to_string(), json!(i));
                    ctx.insert("j".to_string(), json!(j));
                    let r = lieb_from_grid(&surface, norm_u, norm_v, p, ctx)?;
                    let default = if p == 2.0 { EQ_REL_TOL } else { GUARD_REL_TOL };
                    let rel = cfg.rel_tol("lieb", &r.id, default);
                    results.push(r.with_rel_tol(rel));
                }
            }
        }
    }

    if enabled(&filter, "local") {
        for i in 0..m {
            let energy_bound = set.get(i)?.energy().powi(2);
            for region in &cfg.regions {
                for r in check_local_uncertainty(field.entry(i, i), region, energy_bound)? {
                    let mut r = r;
                    r.context.insert("signal".to_string(), json!(i));
                    let rel = cfg.rel_tol("local", &r.id, GUARD_REL_TOL);
                    results.push(r.with_rel_tol(rel));
                }
            }
        }
    }

    results.extend(mimo_suite_with_field(set, cfg, &field, filter)?);
    Ok(results)
}

// ── report serialization ────────────────────────────────────────────────────

/// Top-level verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool_version: String,
    pub set_digest: String,
    pub grid: GridSpec,
    pub steering: SteeringSpec,
    pub results: Vec<InequalityResult>,
}

impl Report {
    pub fn new(set: &SignalSet, cfg: &SuiteConfig, results: Vec<InequalityResult>) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            set_digest: set.digest(),
            grid: cfg.grid,
            steering: cfg.steering,
            results,
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.results.iter().all(|r| r.satisfied)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_file(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_json_string())?;
        Ok(())
    }
}
