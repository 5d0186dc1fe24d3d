//! `ambkit`: generate waveform sets, compute ambiguity surfaces, and
//! verify the uncertainty-relation catalog from the command line.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use ambkit_core::ambg;
use ambkit_core::ambiguity::{
    ambiguity_direct, cross_ambiguity, epsilon_mask, epsilon_support, masked_lp_integral,
    symmetric_ambiguity, wigner, AmbiguityGrid, GridSpec, Region, SurfaceKind,
};
use ambkit_core::mimo::{
    correlation_matrix_field, matrix_norm_field, mimo_ambiguity, write_field_dir, CorrelationKind,
    MatrixNormKind, SteeringSpec,
};
use ambkit_core::rng::Lcg64;
use ambkit_core::signal::{Lattice, SignalSet};
use ambkit_core::uncertainty::{run_full_suite, support_lower_bound, Report, SuiteConfig};
use ambkit_core::waveform::{gen_waveform, WaveformKind};

#[derive(Parser)]
#[command(
    name = "ambkit",
    version,
    about = "Ambiguity functions, Wigner distributions, and uncertainty-relation verification for waveform sets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a waveform set and write it as SignalSet JSON.
    Gen(GenArgs),
    /// Compute an ambiguity surface (or Wigner distribution) to an AMBG file.
    Amb(AmbArgs),
    /// Compute the MIMO correlation-matrix field as a directory of AMBG files.
    Mimo(MimoArgs),
    /// Run the inequality suite and write a verification report.
    Verify(VerifyArgs),
    /// Measure epsilon-supports and support lower bounds.
    Support(SupportArgs),
    /// Evaluate a matrix-norm surface of the correlation field as CSV.
    Norms(NormsArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GenKind {
    Gaussian,
    MatchedGaussianPair,
    Hermite,
    LfmChirp,
    PhaseCode,
}

#[derive(clap::Args)]
struct GenArgs {
    /// Waveform family.
    #[arg(long, value_enum)]
    kind: GenKind,
    /// Half extent of the sampling window: t ∈ [-t, t).
    #[arg(long, default_value_t = 8.0)]
    t: f64,
    /// Sampling step.
    #[arg(long, default_value_t = 1.0 / 32.0)]
    dt: f64,
    /// Gaussian / envelope width (gaussian, matched_gaussian_pair, lfm_chirp).
    #[arg(long)]
    alpha: Option<f64>,
    /// Linear term "re,im" for the gaussian kind.
    #[arg(long, value_parser = parse_complex)]
    beta: Option<Complex64>,
    /// Constant term "re,im" for the gaussian kind.
    #[arg(long, value_parser = parse_complex)]
    theta: Option<Complex64>,
    /// Per-signal linear terms for the matched pair.
    #[arg(long, value_parser = parse_complex)]
    beta0: Option<Complex64>,
    #[arg(long, value_parser = parse_complex)]
    beta1: Option<Complex64>,
    /// Per-signal constant terms for the matched pair.
    #[arg(long, value_parser = parse_complex)]
    theta0: Option<Complex64>,
    #[arg(long, value_parser = parse_complex)]
    theta1: Option<Complex64>,
    /// Hermite orders, e.g. "0,1,2".
    #[arg(long)]
    orders: Option<String>,
    /// Chirp rates (one signal per rate), e.g. "0.1,0.25".
    #[arg(long)]
    rates: Option<String>,
    /// Chirp center frequencies, parallel to --rates.
    #[arg(long)]
    f0s: Option<String>,
    /// Phase-code chip phases in radians, e.g. "0,3.14159".
    #[arg(long)]
    code: Option<String>,
    /// Draw this many random binary (0/π) chips instead of --code.
    #[arg(long)]
    random_code: Option<usize>,
    /// Seed for random chips.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Chip duration for phase codes.
    #[arg(long, default_value_t = 1.0)]
    chip: f64,
    /// Start time of the first chip (default: centered on 0).
    #[arg(long)]
    start: Option<f64>,
    /// Keep raw amplitudes instead of normalizing to unit 2-norm.
    #[arg(long)]
    raw: bool,
    /// Output SignalSet JSON path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(clap::Args)]
struct AmbArgs {
    /// Input SignalSet JSON.
    #[arg(long)]
    set: PathBuf,
    /// First signal index.
    #[arg(long, default_value_t = 0)]
    i: usize,
    /// Second signal index.
    #[arg(long, default_value_t = 0)]
    j: usize,
    /// Surface kind.
    #[arg(long, value_enum, default_value_t = CliSurface::Symmetric)]
    kind: CliSurface,
    /// Grid half extent (τ,ν ∈ [-extent, extent]).
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    /// Points per grid axis.
    #[arg(long, default_value_t = 513)]
    n: usize,
    /// Re-check a 9x9 subsample against the direct-summation oracle.
    #[arg(long)]
    oracle: bool,
    /// Output AMBG path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CliSurface {
    Cross,
    Symmetric,
    Wigner,
}

impl From<CliSurface> for SurfaceKind {
    fn from(kind: CliSurface) -> Self {
        match kind {
            CliSurface::Cross => SurfaceKind::Cross,
            CliSurface::Symmetric => SurfaceKind::Symmetric,
            CliSurface::Wigner => SurfaceKind::Wigner,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CliCorrelation {
    Cross,
    Symmetric,
}

impl From<CliCorrelation> for CorrelationKind {
    fn from(kind: CliCorrelation) -> Self {
        match kind {
            CliCorrelation::Cross => CorrelationKind::Cross,
            CliCorrelation::Symmetric => CorrelationKind::Symmetric,
        }
    }
}

#[derive(clap::Args)]
struct MimoArgs {
    #[arg(long)]
    set: PathBuf,
    #[arg(long, value_enum, default_value_t = CliCorrelation::Symmetric)]
    kind: CliCorrelation,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    #[arg(long, default_value_t = 513)]
    n: usize,
    /// Output directory for field.json + `r_<i>_<j>.ambg` files.
    #[arg(short, long)]
    output: PathBuf,
    /// Also evaluate one steered slice "f_s,f_s'" to --slice-out.
    #[arg(long, value_parser = parse_pair)]
    slice: Option<(f64, f64)>,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
    #[arg(long)]
    slice_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct VerifyArgs {
    #[arg(long)]
    set: PathBuf,
    /// Restrict to these relation keys, e.g. "R3.1,P4.2".
    #[arg(long)]
    only: Option<String>,
    #[arg(long, value_enum, default_value_t = CliCorrelation::Symmetric)]
    kind: CliCorrelation,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    #[arg(long, default_value_t = 513)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    gamma: u32,
    /// Spatial quadrature points per axis (default: max(2M, γ(M-1)+1)).
    #[arg(long)]
    ks: Option<usize>,
    /// Exponent sweep, e.g. "1,1.5,2,3,4".
    #[arg(long, default_value = "1,1.5,2,3,4")]
    p: String,
    /// Local-uncertainty regions "rect:a,b,c,d" or "disk:x,y,r" (repeatable).
    #[arg(long)]
    region: Vec<String>,
    /// Support thresholds, e.g. "0.05,0.1,0.2,0.4".
    #[arg(long, default_value = "0.05,0.1,0.2,0.4")]
    eps: String,
    /// Report JSON path (stdout when omitted).
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct SupportArgs {
    /// Read the surface from an AMBG file...
    #[arg(long, conflicts_with = "set")]
    ambg: Option<PathBuf>,
    /// ...or compute it from a SignalSet.
    #[arg(long)]
    set: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    i: usize,
    #[arg(long, default_value_t = 0)]
    j: usize,
    #[arg(long, value_enum, default_value_t = CliSurface::Symmetric)]
    kind: CliSurface,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    #[arg(long, default_value_t = 513)]
    n: usize,
    /// Thresholds to sweep.
    #[arg(long, default_value = "0.05,0.1,0.2,0.4")]
    eps: String,
    /// Optional JSON output path.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct NormsArgs {
    #[arg(long)]
    set: PathBuf,
    /// frobenius | induced1 | inducedinf | `entrywise:<p>`
    #[arg(long, default_value = "frobenius")]
    kind: String,
    #[arg(long, value_enum, default_value_t = CliCorrelation::Symmetric)]
    amb_kind: CliCorrelation,
    #[arg(long, default_value_t = 8.0)]
    extent: f64,
    #[arg(long, default_value_t = 257)]
    n: usize,
    /// CSV output path ("tau,nu,value" rows); summary only when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> std::process::ExitCode {
    match run() {
        Ok(code) => code,
        Err(err) => {
            eprintln!("ambkit: {err:#}");
            std::process::ExitCode::FAILURE
        }
    }
}

fn run() -> anyhow::Result<std::process::ExitCode> {
    configure_threads()?;
    let cli = Cli::parse();
    match cli.command {
        Command::Gen(args) => cmd_gen(args)?,
        Command::Amb(args) => cmd_amb(args)?,
        Command::Mimo(args) => cmd_mimo(args)?,
        Command::Verify(args) => return cmd_verify(args),
        Command::Support(args) => cmd_support(args)?,
        Command::Norms(args) => cmd_norms(args)?,
    }
    Ok(std::process::ExitCode::SUCCESS)
}

/// AMBKIT_THREADS caps internal parallelism.
fn configure_threads() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("AMBKIT_THREADS") {
        let n: usize =
            raw.parse().ok().filter(|n| *n >= 1).with_context(|| {
                format!("AMBKIT_THREADS must be a positive integer, got {raw:?}")
            })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("thread pool already initialized")?;
    }
    Ok(())
}

// ── subcommands ─────────────────────────────────────────────────────────────

fn cmd_gen(args: GenArgs) -> anyhow::Result<()> {
    let lattice = Lattice::centered(args.t, args.dt)?;
    let normalize = !args.raw;
    let zero = Complex64::new(0.0, 0.0);
    let kind = match args.kind {
        GenKind::Gaussian => WaveformKind::Gaussian {
            alpha: args.alpha.context("--alpha is required for gaussian")?,
            beta: args.beta.unwrap_or(zero),
            theta: args.theta.unwrap_or(zero),
            normalize,
        },
        GenKind::MatchedGaussianPair => WaveformKind::MatchedGaussianPair {
            alpha: args
                .alpha
                .context("--alpha is required for matched_gaussian_pair")?,
            beta: [args.beta0.unwrap_or(zero), args.beta1.unwrap_or(zero)],
            theta: [args.theta0.unwrap_or(zero), args.theta1.unwrap_or(zero)],
            normalize,
        },
        GenKind::Hermite => WaveformKind::Hermite {
            orders: parse_list(&args.orders.context("--orders is required for hermite")?)?,
        },
        GenKind::LfmChirp => WaveformKind::LfmChirp {
            alpha: args.alpha.unwrap_or(std::f64::consts::PI),
            rates: parse_list(&args.rates.context("--rates is required for lfm_chirp")?)?,
            f0: match &args.f0s {
                Some(text) => parse_list(text)?,
                None => vec![],
            },
            normalize,
        },
        GenKind::PhaseCode => {
            let phases = match (&args.code, args.random_code) {
                (Some(code), None) => parse_list(code)?,
                (None, Some(len)) => {
                    let mut rng = Lcg64::new(args.seed);
                    (0..len)
                        .map(|_| {
                            if rng.next_f64() < 0.5 {
                                0.0
                            } else {
                                std::f64::consts::PI
                            }
                        })
                        .collect()
                }
                _ => bail!("phase_code needs exactly one of --code or --random-code"),
            };
            WaveformKind::PhaseCode {
                phases,
                chip: args.chip,
                start: args.start,
                normalize,
            }
        }
    };
    let set = gen_waveform(&kind, lattice)?;
    set.to_file(&args.output)?;
    for (idx, signal) in set.signals().iter().enumerate() {
        println!(
            "signal {idx} ({}): l2 norm {:.12}",
            set.labels()[idx],
            signal.energy().sqrt()
        );
    }
    println!("wrote {} signals to {}", set.size(), args.output.display());
    Ok(())
}

fn compute_surface(
    set: &SignalSet,
    i: usize,
    j: usize,
    kind: SurfaceKind,
    spec: &GridSpec,
) -> anyhow::Result<AmbiguityGrid> {
    let u = set.get(i)?;
    let v = set.get(j)?;
    Ok(match kind {
        SurfaceKind::Cross => cross_ambiguity(u, v, spec)?,
        SurfaceKind::Symmetric => symmetric_ambiguity(u, v, spec)?,
        SurfaceKind::Wigner => wigner(u, v, spec)?,
    })
}

fn cmd_amb(args: AmbArgs) -> anyhow::Result<()> {
    let set = SignalSet::from_file(&args.set)?;
    let spec = GridSpec::centered(args.extent, args.n)?;
    let kind = SurfaceKind::from(args.kind);
    let grid = compute_surface(&set, args.i, args.j, kind, &spec)?;

    if args.oracle {
        let picks: Vec<usize> = (0..9).map(|k| (k * (args.n - 1) + 4) / 8).collect();
        let mut points = Vec::new();
        for &ti in &picks {
            for &fj in &picks {
                points.push((spec.tau_at(ti), spec.nu_at(fj)));
            }
        }
        let oracle = ambiguity_direct(set.get(args.i)?, set.get(args.j)?, &points, kind)?;
        let mut worst = 0.0f64;
        for (idx, value) in oracle.iter().enumerate() {
            let (ti, fj) = (picks[idx / 9], picks[idx % 9]);
            worst = worst.max((grid.value(ti, fj) - value).norm());
        }
        if worst > 1e-9 {
            bail!("oracle check failed: max abs difference {worst:.3e} > 1e-9");
        }
        println!("oracle check passed: max abs difference {worst:.3e}");
    }

    ambg::write(&args.output, &grid)?;
    println!(
        "wrote {}x{} {} surface to {} (peak |A| = {:.9})",
        spec.n_tau,
        spec.n_nu,
        kind,
        args.output.display(),
        grid.max_abs()
    );
    Ok(())
}

fn cmd_mimo(args: MimoArgs) -> anyhow::Result<()> {
    let set = SignalSet::from_file(&args.set)?;
    let spec = GridSpec::centered(args.extent, args.n)?;
    let field = correlation_matrix_field(&set, &spec, args.kind.into())?;
    write_field_dir(&args.output, &field)?;
    println!(
        "wrote {0}x{0} correlation field to {1}",
        field.size(),
        args.output.display()
    );
    if let Some((f_s, f_s_prime)) = args.slice {
        let out = args
            .slice_out
            .context("--slice-out is required with --slice")?;
        let steering = SteeringSpec::new(args.gamma, set.size())?;
        let slice = mimo_ambiguity(&field, &steering, f_s, f_s_prime)?;
        ambg::write(&out, &slice)?;
        println!(
            "wrote slice (f_s={f_s}, f_s'={f_s_prime}, gamma={}) to {}",
            args.gamma,
            out.display()
        );
    }
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> anyhow::Result<std::process::ExitCode> {
    let set = SignalSet::from_file(&args.set)?;
    let steering = match args.ks {
        Some(ks) => SteeringSpec::with_points(args.gamma, ks, set.size())?,
        None => SteeringSpec::new(args.gamma, set.size())?,
    };
    let mut regions = Vec::new();
    for text in &args.region {
        regions.push(parse_region(text)?);
    }
    if regions.is_empty() {
        regions = vec![
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
        ];
    }
    let cfg = SuiteConfig {
        grid: GridSpec::centered(args.extent, args.n)?,
        steering,
        kind: args.kind.into(),
        p_list: parse_list(&args.p)?,
        regions,
        eps_list: parse_list(&args.eps)?,
        tolerances: BTreeMap::new(),
    };
    let only: Option<Vec<String>> = args
        .only
        .as_ref()
        .map(|text| text.split(',').map(|s| s.trim().to_string()).collect());
    let results = run_full_suite(&set, &cfg, only.as_deref())?;
    let report = Report::new(&set, &cfg, results);

    match &args.output {
        Some(path) => {
            report.to_file(path)?;
            for r in &report.results {
                println!(
                    "{:<18} {} lhs={:.6e} rhs={:.6e} slack={:+.3e}",
                    r.id,
                    if r.satisfied { "ok " } else { "FAIL" },
                    r.lhs,
                    r.rhs,
                    r.slack
                );
            }
            println!(
                "{} of {} relations satisfied; report written to {}",
                report.results.iter().filter(|r| r.satisfied).count(),
                report.results.len(),
                path.display()
            );
        }
        None => println!("{}", report.to_json_string()),
    }

    Ok(if report.all_satisfied() {
        std::process::ExitCode::SUCCESS
    } else {
        std::process::ExitCode::FAILURE
    })
}

fn cmd_support(args: SupportArgs) -> anyhow::Result<()> {
    // The support bound divides the energy the level set captures by the
    // norm budget when signals are available, or by the measured peak
    // squared when only a surface is given (both are valid budgets).
    let (grid, denominator) = if let Some(path) = &args.ambg {
        let grid = ambg::read(path)?;
        let peak_sq = grid.max_abs().powi(2);
        if peak_sq <= 0.0 {
            bail!("surface is identically zero; no support bound");
        }
        (grid, peak_sq)
    } else if let Some(path) = &args.set {
        let set = SignalSet::from_file(path)?;
        let spec = GridSpec::centered(args.extent, args.n)?;
        let grid = compute_surface(&set, args.i, args.j, args.kind.into(), &spec)?;
        let denom = set.get(args.i)?.energy() * set.get(args.j)?.energy();
        (grid, denom)
    } else {
        bail!("support needs --ambg or --set");
    };

    let eps_list: Vec<f64> = parse_list(&args.eps)?;
    let mut rows = Vec::new();
    for &eps in &eps_list {
        let area = epsilon_support(&grid, eps)?;
        let bound = if area > 0.0 {
            let mask = epsilon_mask(&grid, eps)?;
            let captured = masked_lp_integral(&grid, 2.0, &mask)?;
            support_lower_bound(captured, denominator)?
        } else {
            0.0
        };
        println!(
            "eps={eps:<8} area={area:<12.6} bound={bound:<12.6} margin={:+.6}",
            area - bound
        );
        rows.push(serde_json::json!({
            "eps": eps,
            "area": area,
            "bound": bound,
            "margin": area - bound,
        }));
    }
    if let Some(path) = &args.output {
        std::fs::write(path, serde_json::to_string_pretty(&rows)?)?;
    }
    Ok(())
}

fn cmd_norms(args: NormsArgs) -> anyhow::Result<()> {
    let set = SignalSet::from_file(&args.set)?;
    let spec = GridSpec::centered(args.extent, args.n)?;
    let field = correlation_matrix_field(&set, &spec, args.amb_kind.into())?;
    let kind = parse_norm_kind(&args.kind)?;
    let surface = matrix_norm_field(&field, kind)?;
    println!(
        "max norm {:.9}; integral of square {:.9}",
        surface.max(),
        surface.power_integral(2.0, None)?
    );
    if let Some(path) = &args.output {
        let mut csv = String::from("tau,nu,value\n");
        for i in 0..spec.n_tau {
            for j in 0..spec.n_nu {
                csv.push_str(&format!(
                    "{},{},{}\n",
                    spec.tau_at(i),
                    spec.nu_at(j),
                    surface.value(i, j)
                ));
            }
        }
        std::fs::write(path, csv)?;
        println!("wrote norm surface to {}", path.display());
    }
    Ok(())
}

// ── flag parsers ────────────────────────────────────────────────────────────

fn parse_list<T: std::str::FromStr>(text: &str) -> anyhow::Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',')
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|e| anyhow::anyhow!("bad list entry {s:?}: {e}"))
        })
        .collect()
}

fn parse_complex(text: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    match parts.as_slice() {
        [re] => re
            .trim()
            .parse()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|e| format!("bad real part: {e}")),
        [re, im] => {
            let re: f64 = re
                .trim()
                .parse()
                .map_err(|e| format!("bad real part: {e}"))?;
            let im: f64 = im
                .trim()
                .parse()
                .map_err(|e| format!("bad imag part: {e}"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err("expected \"re\" or \"re,im\"".to_string()),
    }
}

fn parse_pair(text: &str) -> Result<(f64, f64), String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 2 {
        return Err("expected \"a,b\"".to_string());
    }
    let a = parts[0].trim().parse().map_err(|e| format!("{e}"))?;
    let b = parts[1].trim().parse().map_err(|e| format!("{e}"))?;
    Ok((a, b))
}

fn parse_region(text: &str) -> anyhow::Result<Region> {
    let (kind, rest) = text
        .split_once(':')
        .with_context(|| format!("region {text:?} needs a rect: or disk: prefix"))?;
    let values: Vec<f64> = parse_list(rest)?;
    let region = match (kind, values.as_slice()) {
        ("rect", [tau_min, tau_max, nu_min, nu_max]) => Region::Rect {
            tau_min: *tau_min,
            tau_max: *tau_max,
            nu_min: *nu_min,
            nu_max: *nu_max,
        },
        ("disk", [center_tau, center_nu, radius]) => Region::Disk {
            center_tau: *center_tau,
            center_nu: *center_nu,
            radius: *radius,
        },
        _ => bail!("region {text:?} must be rect:tmin,tmax,numin,numax or disk:x,y,r"),
    };
    region.validate()?;
    Ok(region)
}

fn parse_norm_kind(text: &str) -> anyhow::Result<MatrixNormKind> {
    Ok(match text {
        "frobenius" => MatrixNormKind::Frobenius,
        "induced1" => MatrixNormKind::Induced1,
        "inducedinf" => MatrixNormKind::InducedInf,
        other => match other.strip_prefix("entrywise:") {
            Some(p) => MatrixNormKind::EntrywiseP {
                p: p.parse().with_context(|| format!("bad exponent {p:?}"))?,
            },
            None => bail!(
                "norm kind {text:?} must be frobenius, induced1, inducedinf, or entrywise:<p>"
            ),
        },
    })
}
