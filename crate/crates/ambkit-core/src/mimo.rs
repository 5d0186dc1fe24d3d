//! MIMO correlation-matrix fields, steered MIMO ambiguity slices, and
//! matrix-norm surfaces.
//!
//! The correlation matrix `R(τ,ν)` holds the pairwise ambiguity of a
//! transmit set: `R_ij = A(u_i, u_j)`. The MIMO ambiguity function adds
//! uniform-linear-array steering phases:
//!
//! ```text
//! A(τ,ν,f_s,f'_s) = Σ_m Σ_m' R_{m,m'}(τ,ν) e^{i2πγ(f_s m - f'_s m')}
//! ```
//!
//! Spatial integrals over `(f_s, f'_s) ∈ [0,1)²` use the rectangle rule
//! on `k_s` uniform points per axis; the integrand is a trigonometric
//! polynomial, so the rule is exact once `k_s` exceeds the polynomial
//! degree `γ(M-1)`. γ is restricted to positive integers: the Doppler
//! phases `e^{i2πγ f_s m}` are orthonormal over `[0,1)` exactly when
//! `γ(m - m')` are integers, and the energy identity being verified
//! depends on that orthogonality. The 4-D object is never materialized;
//! it is evaluated one `(f_s, f'_s)` slice at a time.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

use crate::ambg;
use crate::ambiguity::{
    cross_ambiguity, grid_lp_integral, symmetric_ambiguity, AmbiguityGrid, GridSpec, Region,
};
use crate::error::{Error, Result};
use crate::signal::SignalSet;

/// Which ambiguity kernel fills the correlation entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Cross,
    Symmetric,
}

impl std::fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelationKind::Cross => write!(f, "cross"),
            CorrelationKind::Symmetric => write!(f, "symmetric"),
        }
    }
}

/// Steering parameters: sensor-spacing ratio γ (a positive integer) and
/// the number of spatial-frequency quadrature points per axis on `[0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteeringSpec {
    pub gamma: u32,
    pub k_s: usize,
}

impl SteeringSpec {
    /// Default quadrature: `k_s = max(2M, γ(M-1)+1)`, which is `2M` for
    /// γ ∈ {1, 2} and always exceeds the trigonometric degree.
    pub fn new(gamma: u32, m: usize) -> Result<Self> {
        if gamma < 1 {
            return Err(Error::InvalidParameter(
                "gamma must be a positive integer".to_string(),
            ));
        }
        let degree = gamma as usize * m.saturating_sub(1);
        Ok(Self {
            gamma,
            k_s: (2 * m).max(degree + 1),
        })
    }

    pub fn with_points(gamma: u32, k_s: usize, m: usize) -> Result<Self> {
        let spec = Self { gamma, k_s };
        spec.validate_for(m)?;
        Ok(spec)
    }

    pub fn validate_for(&self, m: usize) -> Result<()> {
        if self.gamma < 1 {
            return Err(Error::InvalidParameter(
                "gamma must be a positive integer".to_string(),
            ));
        }
        if self.k_s < 2 * m {
            return Err(Error::InvalidParameter(format!(
                "k_s = {} is below the required 2M = {}",
                self.k_s,
                2 * m
            )));
        }
        Ok(())
    }
}

/// M×M array of ambiguity grids sharing one [`GridSpec`]; the sampled
/// correlation matrix `R(τ,ν)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrixField {
    m: usize,
    kind: CorrelationKind,
    spec: GridSpec,
    entries: Vec<AmbiguityGrid>, // row-major, entries[i*m + j] = A(u_i, u_j)
}

impl CorrelationMatrixField {
    pub fn new(
        m: usize,
        kind: CorrelationKind,
        spec: GridSpec,
        entries: Vec<AmbiguityGrid>,
    ) -> Result<Self> {
        if m == 0 || entries.len() != m * m {
            return Err(Error::InvalidParameter(format!(
                "expected {}x{} entries, got {}",
                m,
                m,
                entries.len()
            )));
        }
        if entries.iter().any(|e| e.spec() != &spec) {
            return Err(Error::InvalidParameter(
                "all entry grids must share the field grid spec".to_string(),
            ));
        }
        Ok(Self {
            m,
            kind,
            spec,
            entries,
        })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn entry(&self, i: usize, j: usize) -> &AmbiguityGrid {
        &self.entries[i * self.m + j]
    }
}

/// Pairwise (cross or symmetric) ambiguity of every ordered pair in the
/// set, on a shared grid.
pub fn correlation_matrix_field(
    set: &SignalSet,
    spec: &GridSpec,
    kind: CorrelationKind,
) -> Result<CorrelationMatrixField> {
    spec.validate()?;
    let m = set.size();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).collect();
    let entries: Vec<AmbiguityGrid> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let u = set.get(i)?;
            let v = set.get(j)?;
            match kind {
                CorrelationKind::Cross => cross_ambiguity(u, v, spec),
                CorrelationKind::Symmetric => symmetric_ambiguity(u, v, spec),
            }
        })
        .collect::<Result<_>>()?;
    CorrelationMatrixField::new(m, kind, *spec, entries)
}

/// One `(f_s, f'_s)` slice of the MIMO ambiguity function. Defined for
/// all real spatial frequencies and `1/γ`-periodic in each.
pub fn mimo_ambiguity(
    field: &CorrelationMatrixField,
    steering: &SteeringSpec,
    f_s: f64,
    f_s_prime: f64,
) -> Result<AmbiguityGrid> {
    steering.validate_for(field.size())?;
    if !f_s.is_finite() || !f_s_prime.is_finite() {
        return Err(Error::InvalidParameter(
            "spatial frequencies must be finite".to_string(),
        ));
    }
    let m = field.size();
    let gamma = steering.gamma as f64;
    let tx_phase: Vec<Complex64> = (0..m)
        .map(|idx| Complex64::from_polar(1.0, 2.0 * PI * gamma * f_s * idx as f64))
        .collect();
    let rx_phase: Vec<Complex64> = (0..m)
        .map(|idx| Complex64::from_polar(1.0, -2.0 * PI * gamma * f_s_prime * idx as f64))
        .collect();
    let mut values = vec![Complex64::new(0.0, 0.0); field.spec().points()];
    for (i, tx) in tx_phase.iter().enumerate() {
        for (j, rx) in rx_phase.iter().enumerate() {
            let weight = tx * rx;
            for (acc, v) in values.iter_mut().zip(field.entry(i, j).values()) {
                *acc += weight * v;
            }
        }
    }
    AmbiguityGrid::new(*field.spec(), values)
}

/// Apply `f` to every quadrature slice `(a/k_s, b/k_s)` in row-major
/// `(a, b)` order; results keep that order regardless of thread count.
pub(crate) fn map_slices<T: Send>(
    field: &CorrelationMatrixField,
    steering: &SteeringSpec,
    f: impl Fn(&AmbiguityGrid) -> T + Sync,
) -> Result<Vec<T>> {
    steering.validate_for(field.size())?;
    let k = steering.k_s;
    (0..k * k)
        .into_par_iter()
        .map(|idx| {
            let f_s = (idx / k) as f64 / k as f64;
            let f_s_prime = (idx % k) as f64 / k as f64;
            let slice = mimo_ambiguity(field, steering, f_s, f_s_prime)?;
            Ok(f(&slice))
        })
        .collect()
}

/// `∫₀¹∫₀¹ ∫∫ |A(τ,ν,f_s,f'_s)|² dτ dν df_s df'_s`: spatial axes by the
/// (exact) rectangle rule over the quadrature lattice, the (τ,ν) plane
/// by the grid rule at p = 2.
pub fn mimo_l2_energy(field: &CorrelationMatrixField, steering: &SteeringSpec) -> Result<f64> {
    let per_slice = map_slices(field, steering, |slice| {
        grid_lp_integral(slice, 2.0, None).expect("p=2 is a valid exponent")
    })?;
    let k2 = (steering.k_s * steering.k_s) as f64;
    Ok(per_slice.iter().sum::<f64>() / k2)
}

/// Same spatial average with the (τ,ν) integral restricted to `region`.
pub fn mimo_l2_energy_in_region(
    field: &CorrelationMatrixField,
    steering: &SteeringSpec,
    region: &Region,
) -> Result<f64> {
    region.validate()?;
    let per_slice = map_slices(field, steering, |slice| {
        grid_lp_integral(slice, 2.0, Some(region)).expect("p=2 is a valid exponent")
    })?;
    let k2 = (steering.k_s * steering.k_s) as f64;
    Ok(per_slice.iter().sum::<f64>() / k2)
}

/// Matrix norms evaluated per lattice point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "norm", rename_all = "snake_case")]
pub enum MatrixNormKind {
    /// `sqrt(ΣΣ |A_ij|²)`
    Frobenius,
    /// max absolute column sum
    Induced1,
    /// max absolute row sum
    InducedInf,
    /// `(ΣΣ |A_ij|^p)^{1/p}` over the flattened entries
    EntrywiseP { p: f64 },
}

/// Non-negative surface of a matrix norm over the field's grid.
#[derive(Debug, Clone, PartialEq)]
pub struct NormField {
    spec: GridSpec,
    kind: MatrixNormKind,
    values: Vec<f64>,
}

impl NormField {
    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn kind(&self) -> MatrixNormKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i_tau: usize, j_nu: usize) -> f64 {
        self.values[i_tau * self.spec.n_nu + j_nu]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }

    /// `Σ value^power dτ dν` over cells whose center lies in `region`.
    pub fn power_integral(&self, power: f64, region: Option<&Region>) -> Result<f64> {
        if !power.is_finite() || power <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "integral power must be positive and finite, got {power}"
            )));
        }
        if let Some(r) = region {
            r.validate()?;
        }
        let mut sum = 0.0;
        for i in 0..self.spec.n_tau {
            let tau = self.spec.tau_at(i);
            for j in 0..self.spec.n_nu {
                if let Some(r) = region {
                    if !r.contains(tau, self.spec.nu_at(j)) {
                        continue;
                    }
                }
                sum += self.value(i, j).powf(power);
            }
        }
        Ok(sum * self.spec.cell_area())
    }

    /// `Σ value^power dτ dν` over cells selected by `mask`.
    pub fn masked_power_integral(&self, power: f64, mask: &[bool]) -> Result<f64> {
        if mask.len() != self.values.len() {
            return Err(Error::InvalidParameter(format!(
                "mask of {} cells on a field of {}",
                mask.len(),
                self.values.len()
            )));
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(mask)
            .filter(|(_, keep)| **keep)
            .map(|(v, _)| v.powf(power))
            .sum();
        Ok(sum * self.spec.cell_area())
    }

    /// Area of the level set `{ value > eps }`.
    pub fn epsilon_support(&self, eps: f64) -> Result<f64> {
        let mask = self.epsilon_mask(eps)?;
        let count = mask.iter().filter(|b| **b).count();
        Ok(count as f64 * self.spec.cell_area())
    }

    /// Cell mask of the level set `{ value > eps }`, row-major.
    pub fn epsilon_mask(&self, eps: f64) -> Result<Vec<bool>> {
        if !eps.is_finite() || eps <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be positive and finite, got {eps}"
            )));
        }
        Ok(self.values.iter().map(|v| *v > eps).collect())
    }
}

/// Evaluate a matrix norm of `R(τ,ν)` at every lattice point.
pub fn matrix_norm_field(
    field: &CorrelationMatrixField,
    kind: MatrixNormKind,
) -> Result<NormField> {
    if let MatrixNormKind::EntrywiseP { p } = kind {
        if p.is_nan() || p < 1.0 || p.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "entrywise norm requires finite p >= 1, got {p}"
            )));
        }
    }
    let m = field.size();
    let points = field.spec().points();
    let values = (0..points)
        .into_par_iter()
        .map(|idx| match kind {
            MatrixNormKind::Frobenius | MatrixNormKind::EntrywiseP { p: 2.0 } => {
                frobenius_at(field, m, idx)
            }
            MatrixNormKind::Induced1 => (0..m)
                .map(|j| (0..m).map(|i| field.entry(i, j).values()[idx].norm()).sum())
                .fold(0.0, f64::max),
            MatrixNormKind::InducedInf => (0..m)
                .map(|i| (0..m).map(|j| field.entry(i, j).values()[idx].norm()).sum())
                .fold(0.0, f64::max),
            MatrixNormKind::EntrywiseP { p } => {
                let mut sum = 0.0;
                for i in 0..m {
                    for j in 0..m {
                        let a = field.entry(i, j).values()[idx].norm();
                        sum += if p == 1.0 { a } else { a.powf(p) };
                    }
                }
                if p == 1.0 {
                    sum
                } else {
                    sum.powf(1.0 / p)
                }
            }
        })
        .collect();
    Ok(NormField {
        spec: *field.spec(),
        kind,
        values,
    })
}

fn frobenius_at(field: &CorrelationMatrixField, m: usize, idx: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..m {
        for j in 0..m {
            sum += field.entry(i, j).values()[idx].norm_sqr();
        }
    }
    sum.sqrt()
}

// ── on-disk layout ──────────────────────────────────────────────────────────

/// Manifest of a field directory: `field.json` plus M² AMBG files.
#[derive(Serialize, Deserialize)]
struct FieldManifest {
    m: usize,
    kind: CorrelationKind,
    spec: GridSpec,
    entries: Vec<Vec<String>>,
}

/// Write a field as a directory holding `field.json` and one
/// `r_<i>_<j>.ambg` file per entry.
pub fn write_field_dir(path: impl AsRef<Path>, field: &CorrelationMatrixField) -> Result<()> {
    let path = path.as_ref();
    std::fs::create_dir_all(path)?;
    let m = field.size();
    let mut names = vec![vec![String::new(); m]; m];
    for (i, row) in names.iter_mut().enumerate() {
        for (j, slot) in row.iter_mut().enumerate() {
            let name = format!("r_{i}_{j}.ambg");
            ambg::write(path.join(&name), field.entry(i, j))?;
            *slot = name;
        }
    }
    let manifest = FieldManifest {
        m,
        kind: field.kind(),
        spec: *field.spec(),
        entries: names,
    };
    std::fs::write(
        path.join("field.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(())
}

pub fn read_field_dir(path: impl AsRef<Path>) -> Result<CorrelationMatrixField> {
    let path = path.as_ref();
    let manifest: FieldManifest =
        serde_json::from_str(&std::fs::read_to_string(path.join("field.json"))?)?;
    if manifest.entries.len() != manifest.m
        || manifest.entries.iter().any(|row| row.len() != manifest.m)
    {
        return Err(Error::Format(format!(
            "manifest entries do not form an {0}x{0} array",
            manifest.m
        )));
    }
    let mut entries = Vec::with_capacity(manifest.m * manifest.m);
    for row in &manifest.entries {
        for name in row {
            let grid = ambg::read(path.join(name))?;
            if grid.spec() != &manifest.spec {
                return Err(Error::Format(format!(
                    "entry {name} grid spec does not match the manifest"
                )));
            }
            entries.push(grid);
        }
    }
    CorrelationMatrixField::new(manifest.m, manifest.kind, manifest.spec, entries)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::Lattice;
    use crate::waveform::{gen_waveform, unit_gaussian, WaveformKind};

    fn gaussian_set(m: usize) -> SignalSet {
        let g = unit_gaussian(Lattice::desk()).unwrap();
        SignalSet::new(vec![g; m], vec![]).unwrap()
    }

    fn hermite_set() -> SignalSet {
        gen_waveform(
            &WaveformKind::Hermite { orders: vec![0, 1] },
            Lattice::desk(),
        )
        .unwrap()
    }

    fn small_grid() -> GridSpec {
        GridSpec::centered(4.0, 129).unwrap()
    }

    #[test]
    fn single_signal_field_is_its_self_ambiguity() {
        let set = gaussian_set(1);
        let spec = small_grid();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let direct = symmetric_ambiguity(set.get(0).unwrap(), set.get(0).unwrap(), &spec).unwrap();
        assert_eq!(field.entry(0, 0), &direct);

        let steering = SteeringSpec::new(3, 1).unwrap();
        let slice = mimo_ambiguity(&field, &steering, 0.37, 0.81).unwrap();
        let worst = slice
            .values()
            .iter()
            .zip(direct.values())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(worst < 1e-12);
    }

    #[test]
    fn identical_signals_give_identical_entries() {
        let set = gaussian_set(2);
        let field =
            correlation_matrix_field(&set, &small_grid(), CorrelationKind::Symmetric).unwrap();
        let base = field.entry(0, 0);
        for i in 0..2 {
            for j in 0..2 {
                let worst = field
                    .entry(i, j)
                    .values()
                    .iter()
                    .zip(base.values())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                assert!(worst < 1e-12, "entry ({i},{j}) differs by {worst}");
            }
        }
    }

    #[test]
    fn orthonormal_entries_vanish_at_the_origin() {
        let set = hermite_set();
        let spec = small_grid();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let (i, j) = spec.nearest_index(0.0, 0.0);
        assert!(field.entry(0, 1).value(i, j).norm() < 1e-9);
    }

    #[test]
    fn hermitian_lag_symmetry_holds() {
        let set = hermite_set();
        let spec = small_grid();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let n = spec.n_tau;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..spec.n_nu {
                let a = field.entry(0, 1).value(i, j);
                let b = field.entry(1, 0).value(n - 1 - i, spec.n_nu - 1 - j).conj();
                worst = worst.max((a - b).norm());
            }
        }
        assert!(worst < 1e-9, "symmetry defect {worst}");
    }

    #[test]
    fn cross_kind_entries_have_symmetric_magnitudes() {
        // The cross kernel carries an e^{j2πντ} phase under the swap
        // (i,τ,ν) -> (j,-τ,-ν); only the magnitudes are symmetric.
        let set = hermite_set();
        let spec = small_grid();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Cross).unwrap();
        let n = spec.n_tau;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..spec.n_nu {
                let a = field.entry(0, 1).value(i, j).norm();
                let b = field.entry(1, 0).value(n - 1 - i, spec.n_nu - 1 - j).norm();
                worst = worst.max((a - b).abs());
            }
        }
        assert!(worst < 1e-9, "magnitude symmetry defect {worst}");
    }

    #[test]
    fn aligned_steering_of_identical_gaussians_scales_by_m_squared() {
        for m in [2usize, 3] {
            let set = gaussian_set(m);
            let spec = small_grid();
            let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
            let steering = SteeringSpec::new(1, m).unwrap();
            let slice = mimo_ambiguity(&field, &steering, 0.0, 0.0).unwrap();
            let scale = (m * m) as f64;
            let mut worst = 0.0f64;
            for i in 0..spec.n_tau {
                for j in 0..spec.n_nu {
                    let r_sq = spec.tau_at(i).powi(2) + spec.nu_at(j).powi(2);
                    let expected = scale * (-PI * r_sq / 2.0).exp();
                    worst = worst.max((slice.value(i, j).norm() - expected).abs());
                }
            }
            assert!(worst < 1e-6 * scale, "M={m}: max abs error {worst}");
        }
    }

    #[test]
    fn opposed_steering_phases_cancel_identical_signals() {
        let set = gaussian_set(2);
        let field =
            correlation_matrix_field(&set, &small_grid(), CorrelationKind::Symmetric).unwrap();
        let steering = SteeringSpec::new(1, 2).unwrap();
        let slice = mimo_ambiguity(&field, &steering, 0.5, 0.0).unwrap();
        let reference = field.entry(0, 0).max_abs();
        assert!(slice.max_abs() <= 1e-9 * reference);
    }

    #[test]
    fn steering_phases_are_periodic_in_one_over_gamma() {
        let set = hermite_set();
        let field =
            correlation_matrix_field(&set, &small_grid(), CorrelationKind::Symmetric).unwrap();
        for gamma in [1u32, 2] {
            let steering = SteeringSpec::new(gamma, 2).unwrap();
            let a = mimo_ambiguity(&field, &steering, 0.3, 0.45).unwrap();
            let b = mimo_ambiguity(&field, &steering, 0.3 + 1.0 / gamma as f64, 0.45).unwrap();
            let scale = a.max_abs();
            let worst = a
                .values()
                .iter()
                .zip(b.values())
                .map(|(x, y)| (x - y).norm())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-12 * scale.max(1.0), "gamma={gamma}: {worst}");
        }
    }

    #[test]
    fn l2_energy_matches_norm_identity() {
        // Orthonormal pair: (Σ ‖u‖²)² = 4.
        let set = hermite_set();
        let spec = GridSpec::centered(8.0, 257).unwrap();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let steering = SteeringSpec::new(1, 2).unwrap();
        let energy = mimo_l2_energy(&field, &steering).unwrap();
        assert!((energy - 4.0).abs() < 1e-3 * 4.0, "energy {energy}");

        // Single Gaussian reduces to the scalar norm identity.
        let single = gaussian_set(1);
        let field1 = correlation_matrix_field(&single, &spec, CorrelationKind::Symmetric).unwrap();
        let steering1 = SteeringSpec::new(1, 1).unwrap();
        let energy1 = mimo_l2_energy(&field1, &steering1).unwrap();
        assert!((energy1 - 1.0).abs() < 1e-4, "energy {energy1}");
    }

    #[test]
    fn scaling_one_signal_follows_the_norm_identity() {
        let base = hermite_set();
        let scaled = SignalSet::new(
            vec![
                base.get(0).unwrap().clone(),
                base.get(1).unwrap().scaled(Complex64::new(2.0, 0.0)),
            ],
            vec![],
        )
        .unwrap();
        let spec = GridSpec::centered(8.0, 257).unwrap();
        let field = correlation_matrix_field(&scaled, &spec, CorrelationKind::Symmetric).unwrap();
        let steering = SteeringSpec::new(1, 2).unwrap();
        let energy = mimo_l2_energy(&field, &steering).unwrap();
        // (1 + 4)² = 25 = 1 + 4 + 4 + 16.
        assert!((energy - 25.0).abs() < 1e-3 * 25.0, "energy {energy}");
    }

    #[test]
    fn doubling_quadrature_points_is_inert() {
        let set = hermite_set();
        let spec = small_grid();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let coarse = SteeringSpec::with_points(2, 4, 2).unwrap();
        let fine = SteeringSpec::with_points(2, 8, 2).unwrap();
        let a = mimo_l2_energy(&field, &coarse).unwrap();
        let b = mimo_l2_energy(&field, &fine).unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs(), "{a} vs {b}");
    }

    #[test]
    fn norm_fields_at_the_origin_match_hand_values() {
        let spec = small_grid();
        let (oi, oj) = spec.nearest_index(0.0, 0.0);

        let ones =
            correlation_matrix_field(&gaussian_set(2), &spec, CorrelationKind::Symmetric).unwrap();
        let fro = matrix_norm_field(&ones, MatrixNormKind::Frobenius).unwrap();
        let col = matrix_norm_field(&ones, MatrixNormKind::Induced1).unwrap();
        let row = matrix_norm_field(&ones, MatrixNormKind::InducedInf).unwrap();
        assert!((fro.value(oi, oj) - 2.0).abs() < 1e-6);
        assert!((col.value(oi, oj) - 2.0).abs() < 1e-6);
        assert!((row.value(oi, oj) - 2.0).abs() < 1e-6);

        let ident =
            correlation_matrix_field(&hermite_set(), &spec, CorrelationKind::Symmetric).unwrap();
        let fro2 = matrix_norm_field(&ident, MatrixNormKind::Frobenius).unwrap();
        assert!((fro2.value(oi, oj) - 2f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn entrywise_two_norm_equals_frobenius_exactly() {
        let field =
            correlation_matrix_field(&hermite_set(), &small_grid(), CorrelationKind::Symmetric)
                .unwrap();
        let fro = matrix_norm_field(&field, MatrixNormKind::Frobenius).unwrap();
        let ent = matrix_norm_field(&field, MatrixNormKind::EntrywiseP { p: 2.0 }).unwrap();
        assert_eq!(fro.values(), ent.values());
    }

    #[test]
    fn induced_norms_are_dominated_by_the_entrywise_sum() {
        let set = crate::corpus::smooth_set(Lattice::desk(), 2, 5, 77);
        let field =
            correlation_matrix_field(&set, &small_grid(), CorrelationKind::Symmetric).unwrap();
        let col = matrix_norm_field(&field, MatrixNormKind::Induced1).unwrap();
        let row = matrix_norm_field(&field, MatrixNormKind::InducedInf).unwrap();
        let sum = matrix_norm_field(&field, MatrixNormKind::EntrywiseP { p: 1.0 }).unwrap();
        for idx in 0..sum.values().len() {
            assert!(col.values()[idx] <= sum.values()[idx] * (1.0 + 1e-12));
            assert!(row.values()[idx] <= sum.values()[idx] * (1.0 + 1e-12));
        }
    }

    #[test]
    fn steering_spec_validates_gamma_and_quadrature() {
        assert!(SteeringSpec::new(0, 2).is_err());
        assert!(SteeringSpec::with_points(1, 3, 2).is_err());
        assert_eq!(SteeringSpec::new(1, 2).unwrap().k_s, 4);
        assert_eq!(SteeringSpec::new(2, 3).unwrap().k_s, 6);
        // Higher gamma needs more points than 2M to stay exact.
        assert_eq!(SteeringSpec::new(4, 2).unwrap().k_s, 5);
    }

    #[test]
    fn entrywise_norm_rejects_p_below_one() {
        let field =
            correlation_matrix_field(&gaussian_set(1), &small_grid(), CorrelationKind::Symmetric)
                .unwrap();
        assert!(matrix_norm_field(&field, MatrixNormKind::EntrywiseP { p: 0.5 }).is_err());
    }

    #[test]
    fn field_directory_rejects_inconsistent_manifests() {
        let set = hermite_set();
        let spec = GridSpec::centered(2.0, 33).unwrap();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let root = dir.path().join("field");
        write_field_dir(&root, &field).unwrap();

        // Manifest claiming the wrong set size.
        let manifest_path = root.join("field.json");
        let original = std::fs::read_to_string(&manifest_path).unwrap();
        std::fs::write(&manifest_path, original.replacen("\"m\": 2", "\"m\": 3", 1)).unwrap();
        assert!(read_field_dir(&root).is_err());

        // Entry grid that disagrees with the manifest spec.
        std::fs::write(&manifest_path, &original).unwrap();
        let other_spec = GridSpec::centered(1.0, 17).unwrap();
        let stray =
            symmetric_ambiguity(set.get(0).unwrap(), set.get(0).unwrap(), &other_spec).unwrap();
        crate::ambg::write(root.join("r_0_0.ambg"), &stray).unwrap();
        assert!(matches!(read_field_dir(&root), Err(Error::Format(_))));
    }

    #[test]
    fn field_directory_round_trips() {
        let set = hermite_set();
        let spec = GridSpec::centered(2.0, 33).unwrap();
        let field = correlation_matrix_field(&set, &spec, CorrelationKind::Symmetric).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_field_dir(dir.path().join("field"), &field).unwrap();
        let back = read_field_dir(dir.path().join("field")).unwrap();
        assert_eq!(field, back);
    }
}
