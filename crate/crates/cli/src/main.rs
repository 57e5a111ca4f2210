//! Single entry point wiring the solvers to files: subcommand parsing,
//! TOML config mirroring, deterministic CSV/JSON emission and run
//! manifests. Identical invocations produce byte-identical result files
//! (fixed seeds, fixed ordering, `%.12e` floats); the manifest carries the
//! wall time and is the one artifact allowed to differ between runs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use speclab::bounds::{neumann_bound_check, sharp_constant, unit_ball_steklov_report, BoundReport};
use speclab::disk::{
    concentrating_density, density_from_mobius, steklov_eigenvalues, FourierDensity,
    SteklovSpectrum,
};
use speclab::error::Error;
use speclab::geometry::{format_sci, Dimension, PointMeasure, RadialWeight};
use speclab::radial::{ball_weighted_neumann, GridSpec, Spectrum};
use speclab::trial::{
    ball_cloud, solve_centering, solve_centering_fold, CenteringProblem, HalfSpaceParams,
};

const DEFAULT_SEED: u64 = 0x5EED;

#[derive(Parser)]
#[command(
    name = "speclab",
    version,
    about = "Weighted Neumann spectra of balls, weighted Steklov spectra of the disk, \
             and the trial-map machinery behind their sharp normalized bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Weighted Neumann spectrum of the unit ball with a radial weight.
    Radial(RadialArgs),
    /// Weighted Steklov spectrum of the unit disk for a boundary density.
    Disk(DiskArgs),
    /// Centering solves: find c (or a fold pair (c, p)) zeroing the
    /// measure-averaged unit field.
    Center(CenterArgs),
    /// Two-ball folded-energy comparisons over configured cases.
    Foldcheck(FoldcheckArgs),
    /// Bound reports and the sharp-constants table.
    Bounds(BoundsArgs),
    /// Parameter sweeps (bump width, Moebius radius, dimension).
    Sweep(SweepArgs),
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct RadialArgs {
    /// TOML file whose keys mirror these flags; explicit flags win.
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Ambient dimension d >= 3.
    #[arg(long)]
    dim: Option<u32>,
    /// Radial weight: inv-square | constant.
    #[arg(long)]
    weight: Option<String>,
    /// Element count of the graded mesh.
    #[arg(long)]
    grid: Option<usize>,
    /// Inner cutoff delta in (0, 0.1].
    #[arg(long)]
    delta: Option<f64>,
    /// Mesh grading exponent gamma >= 1.
    #[arg(long)]
    gamma: Option<f64>,
    /// Largest spherical-harmonic sector.
    #[arg(long)]
    lmax: Option<u32>,
    /// Highest eigenvalue index (counting multiplicities).
    #[arg(long)]
    k: Option<usize>,
    /// Output CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct DiskArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Density as JSON {"M": int, "modes": [[m, re, im], ...]}.
    #[arg(long)]
    density: Option<PathBuf>,
    /// Moebius parameter a as RE,IM (|a| < 1): boundary density |f'| of
    /// f(z) = (z-a)/(1-conj(a)z).
    #[arg(long)]
    mobius: Option<String>,
    /// Bump mixture "theta1:mass1,theta2:mass2,...".
    #[arg(long)]
    bumps: Option<String>,
    /// Bump half-width epsilon in (0, 0.5].
    #[arg(long)]
    epsilon: Option<f64>,
    /// Trigonometric truncation order N.
    #[arg(long)]
    modes: Option<usize>,
    /// Highest eigenvalue index.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct CenterArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Atom measure CSV (header x1,...,xd,mass).
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Bounding-ball radius.
    #[arg(long)]
    radius: Option<f64>,
    /// Optional first-eigenfunction samples (CSV, header phi1, one value
    /// per atom); implies the fold variant.
    #[arg(long)]
    phi1: Option<PathBuf>,
    /// Solve the fold variant for the pair (c, p).
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    fold: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct FoldcheckArgs {
    /// TOML case file (see README for the schema).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Ambient dimension d >= 3 (overrides the config).
    #[arg(long)]
    dim: Option<u32>,
    /// Monte-Carlo sample count per case.
    #[arg(long)]
    samples: Option<usize>,
    /// RNG seed for the sample clouds.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct BoundsArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Emit the sharp-constants table instead of a single report.
    #[arg(long, default_value_t = false)]
    #[serde(default)]
    table: bool,
    #[arg(long)]
    dmin: Option<u32>,
    #[arg(long)]
    dmax: Option<u32>,
    /// Ambient dimension for a single report.
    #[arg(long)]
    dim: Option<u32>,
    /// Eigenvalue index k in {1, 2}.
    #[arg(long)]
    k: Option<u32>,
    /// Radial-spectrum CSV to read the eigenvalue from (else the spectrum
    /// is recomputed with the default grid).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Measure mass accompanying --input (defaults to the critical-weight
    /// ball mass for --dim).
    #[arg(long)]
    mass: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Deserialize, Default, Clone)]
#[serde(deny_unknown_fields)]
struct SweepArgs {
    #[arg(long)]
    #[serde(skip)]
    config: Option<PathBuf>,
    /// Sweep kind: bumps-epsilon | mobius-radius | dimension.
    #[arg(long)]
    kind: Option<String>,
    /// Comma-separated parameter values (epsilon, |a|, or d).
    #[arg(long)]
    values: Option<String>,
    /// Bump mixture for bumps-epsilon (default: two antipodal equal bumps).
    #[arg(long)]
    bumps: Option<String>,
    /// Trig truncation for disk sweeps.
    #[arg(long)]
    modes: Option<usize>,
    /// Eigenvalue index.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Run manifest written next to the primary output. The wall time is the
/// one field that legitimately varies between identical runs.
#[derive(Serialize)]
struct Manifest {
    tool: &'static str,
    version: &'static str,
    command: String,
    seed: u64,
    wall_time_ms: f64,
    outputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residuals: Option<serde_json::Value>,
}

fn main() -> ExitCode {
    init_thread_pool();
    let cli = Cli::parse();
    let start = Instant::now();
    let invocation: Vec<String> = std::env::args().skip(1).collect();
    let result = match cli.command {
        Command::Radial(args) => run_radial(args, start, &invocation),
        Command::Disk(args) => run_disk(args, start, &invocation),
        Command::Center(args) => run_center(args, start, &invocation),
        Command::Foldcheck(args) => run_foldcheck(args, start, &invocation),
        Command::Bounds(args) => run_bounds(args, start, &invocation),
        Command::Sweep(args) => run_sweep(args, start, &invocation),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            if e.is_validation() {
                ExitCode::from(2)
            } else {
                ExitCode::from(3)
            }
        }
    }
}

/// SPECLAB_THREADS caps the rayon pool.
fn init_thread_pool() {
    if let Ok(v) = std::env::var("SPECLAB_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

fn load_config<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, Error> {
    let text = std::fs::read_to_string(path)?;
    toml::from_str(&text).map_err(|e| Error::Parse(format!("config {path:?}: {e}")))
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing required --{flag}")))
}

/// Writes the primary artifact (file or stdout) and, for file outputs, a
/// sibling `<name>.manifest.json`.
fn emit(
    out: Option<&Path>,
    content: &str,
    start: Instant,
    invocation: &[String],
    seed: u64,
    residuals: Option<serde_json::Value>,
) -> Result<(), Error> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
            let manifest = Manifest {
                tool: "speclab",
                version: env!("CARGO_PKG_VERSION"),
                command: invocation.join(" "),
                seed,
                wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
                outputs: vec![path.display().to_string()],
                residuals,
            };
            let mut manifest_path = path.as_os_str().to_owned();
            manifest_path.push(".manifest.json");
            std::fs::write(
                PathBuf::from(manifest_path),
                serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n",
            )?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn parse_weight(name: &str) -> Result<RadialWeight, Error> {
    match name {
        "inv-square" => Ok(RadialWeight::inv_square()),
        "constant" => Ok(RadialWeight::constant()),
        other => Err(Error::InvalidParameter(format!(
            "unknown weight `{other}` (expected inv-square or constant)"
        ))),
    }
}

fn spectrum_csv(spec: &Spectrum, k_max: usize) -> String {
    let mut out = String::from("k,value,sector_ell,multiplicity,essential_flag\n");
    let mut cumulative = 0u64;
    let mut entry_iter = spec.entries.iter();
    let mut current = entry_iter.next();
    for k in 0..=k_max {
        while let Some(e) = current {
            if (k as u64) < cumulative + e.multiplicity {
                break;
            }
            cumulative += e.multiplicity;
            current = entry_iter.next();
        }
        let Some(e) = current else { break };
        let _ = writeln!(
            out,
            "{k},{},{},{},{}",
            format_sci(e.value),
            e.sector_ell,
            e.multiplicity,
            spec.essential_flag
        );
    }
    out
}

fn run_radial(mut args: RadialArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let base: RadialArgs = load_config(&path)?;
        args = RadialArgs {
            config: None,
            dim: args.dim.or(base.dim),
            weight: args.weight.or(base.weight),
            grid: args.grid.or(base.grid),
            delta: args.delta.or(base.delta),
            gamma: args.gamma.or(base.gamma),
            lmax: args.lmax.or(base.lmax),
            k: args.k.or(base.k),
            out: args.out.or(base.out),
        };
    }
    let d = Dimension::new(require(args.dim, "dim")?)?;
    let weight = parse_weight(&require(args.weight.clone(), "weight")?)?;
    let grid = GridSpec::new(
        require(args.grid, "grid")?,
        args.delta.unwrap_or(1e-6),
        args.gamma.unwrap_or(2.0),
    )?;
    let lmax = args.lmax.unwrap_or(4);
    let k = require(args.k, "k")?;
    let spec = ball_weighted_neumann(d, &weight, k, &grid, lmax)?;
    let csv = spectrum_csv(&spec, k);
    let residuals = serde_json::json!({
        "mass": spec.mass,
        "essential_estimate": spec.essential_estimate,
        "localized_sectors": spec.localized_sectors,
    });
    emit(
        args.out.as_deref(),
        &csv,
        start,
        invocation,
        DEFAULT_SEED,
        Some(residuals),
    )
}

fn parse_complex(text: &str) -> Result<num_complex::Complex64, Error> {
    let (re, im) = text
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("expected RE,IM, got `{text}`")))?;
    let re: f64 = re
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("real part: {e}")))?;
    let im: f64 = im
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("imaginary part: {e}")))?;
    Ok(num_complex::Complex64::new(re, im))
}

fn parse_bumps(text: &str) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let mut centers = Vec::new();
    let mut masses = Vec::new();
    for piece in text.split(',') {
        let (theta, mass) = piece
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected theta:mass, got `{piece}`")))?;
        centers.push(
            theta
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bump angle: {e}")))?,
        );
        masses.push(
            mass.trim()
                .parse()
                .map_err(|e| Error::Parse(format!("bump mass: {e}")))?,
        );
    }
    Ok((centers, masses))
}

fn disk_density(args: &DiskArgs, n_modes: usize) -> Result<FourierDensity, Error> {
    let sources = [
        args.density.is_some(),
        args.mobius.is_some(),
        args.bumps.is_some(),
    ];
    if sources.iter().filter(|s| **s).count() != 1 {
        return Err(Error::InvalidParameter(
            "give exactly one of --density, --mobius, --bumps".into(),
        ));
    }
    if let Some(path) = &args.density {
        let text = std::fs::read_to_string(path)?;
        return FourierDensity::from_json(&text);
    }
    // the boundary Gram matrix uses coefficients up to 2N
    let m_max = 2 * n_modes;
    if let Some(mobius) = &args.mobius {
        return density_from_mobius(parse_complex(mobius)?, m_max);
    }
    let bumps = args.bumps.as_ref().expect("one source is set");
    let (centers, masses) = parse_bumps(bumps)?;
    let epsilon = require(args.epsilon, "epsilon")?;
    let (rho, overlap) = concentrating_density(&centers, &masses, epsilon, m_max)?;
    if overlap {
        eprintln!("warning: bump centers closer than 4*epsilon; concentration degrades");
    }
    Ok(rho)
}

fn steklov_csv(spec: &SteklovSpectrum) -> String {
    let mut out = String::from("k,sigma,sigma_bar,mass,modes\n");
    for (k, (sigma, bar)) in spec.entries.iter().zip(spec.normalized()).enumerate() {
        let _ = writeln!(
            out,
            "{k},{},{},{},{}",
            format_sci(*sigma),
            format_sci(bar),
            format_sci(spec.mass),
            spec.truncation
        );
    }
    out
}

fn run_disk(mut args: DiskArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let base: DiskArgs = load_config(&path)?;
        args = DiskArgs {
            config: None,
            density: args.density.or(base.density),
            mobius: args.mobius.or(base.mobius),
            bumps: args.bumps.or(base.bumps),
            epsilon: args.epsilon.or(base.epsilon),
            modes: args.modes.or(base.modes),
            k: args.k.or(base.k),
            out: args.out.or(base.out),
        };
    }
    let n_modes = require(args.modes, "modes")?;
    let k = require(args.k, "k")?;
    let rho = disk_density(&args, n_modes)?;
    let spec = steklov_eigenvalues(&rho, k, n_modes)?;
    let csv = steklov_csv(&spec);
    emit(
        args.out.as_deref(),
        &csv,
        start,
        invocation,
        DEFAULT_SEED,
        Some(serde_json::json!({ "mass": spec.mass })),
    )
}

fn read_phi1(path: &Path, atoms: usize) -> Result<Vec<f64>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == "phi1" => {}
        other => {
            return Err(Error::Parse(format!(
                "phi1 file must start with header `phi1`, got {other:?}"
            )))
        }
    }
    let values: Result<Vec<f64>, Error> = lines
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            l.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("phi1 value: {e}")))
        })
        .collect();
    let values = values?;
    if values.len() != atoms {
        return Err(Error::InvalidParameter(format!(
            "phi1 has {} values for {} atoms",
            values.len(),
            atoms
        )));
    }
    Ok(values)
}

#[derive(Serialize)]
struct CenterOutput {
    c: Vec<f64>,
    p: Option<Vec<f64>>,
    residual: f64,
}

fn run_center(mut args: CenterArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let base: CenterArgs = load_config(&path)?;
        args = CenterArgs {
            config: None,
            measure: args.measure.or(base.measure),
            radius: args.radius.or(base.radius),
            phi1: args.phi1.or(base.phi1),
            fold: args.fold || base.fold,
            out: args.out.or(base.out),
        };
    }
    let measure_path = require(args.measure.clone(), "measure")?;
    let radius = require(args.radius, "radius")?;
    let file = std::fs::File::open(&measure_path)?;
    let mu = PointMeasure::read_csv(std::io::BufReader::new(file))?;
    let phi1 = match &args.phi1 {
        Some(path) => Some(read_phi1(path, mu.atoms().len())?),
        None => None,
    };
    let output = if args.fold || phi1.is_some() {
        let problem = CenteringProblem::new(mu, radius, phi1)?;
        let sol = solve_centering_fold(&problem)?;
        CenterOutput {
            c: sol.c,
            p: Some(sol.p),
            residual: sol.residual,
        }
    } else {
        let sol = solve_centering(&mu, radius)?;
        CenterOutput {
            c: sol.c,
            p: None,
            residual: sol.residual,
        }
    };
    let json = serde_json::to_string_pretty(&output).expect("output serializes") + "\n";
    let residuals = serde_json::json!({ "residual": output.residual });
    emit(
        args.out.as_deref(),
        &json,
        start,
        invocation,
        DEFAULT_SEED,
        Some(residuals),
    )
}

/// One foldcheck case: two disjoint unit balls separated by the fold plane
/// (the equality configuration reflects one center onto the other), or a
/// centered ball of volume 2|B| with a generic fold at magnitude |p|.
#[derive(Deserialize, Clone)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
enum FoldCase {
    TwoBalls { t: f64 },
    CenteredBall { p: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FoldcheckConfig {
    dim: Option<u32>,
    samples: Option<usize>,
    seed: Option<u64>,
    cases: Vec<FoldCase>,
}

fn run_foldcheck(args: FoldcheckArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    let path = require(args.config.clone(), "config")?;
    let config: FoldcheckConfig = load_config(&path)?;
    let d = Dimension::new(require(args.dim.or(config.dim), "dim")?)?;
    d.require_at_least(3, "foldcheck")?;
    let samples = args.samples.or(config.samples).unwrap_or(1_000_000);
    let seed = args.seed.or(config.seed).unwrap_or(DEFAULT_SEED);
    let du = d.get() as usize;

    let mut csv = String::from("case,kind,param,lhs,rhs,std_error,holds\n");
    for (i, case) in config.cases.iter().enumerate() {
        let (kind, param, omega, params) = match case {
            FoldCase::TwoBalls { t } => {
                let mut far = vec![0.0; du];
                far[0] = 2.0 * t;
                let near = ball_cloud(d, &vec![0.0; du], 1.0, samples / 2, seed)?;
                let far_cloud = ball_cloud(d, &far, 1.0, samples - samples / 2, seed + 1)?;
                let mut atoms = near.atoms().to_vec();
                atoms.extend_from_slice(far_cloud.atoms());
                let omega = PointMeasure::new(du, atoms)?;
                let mut p = vec![0.0; du];
                p[0] = 1.0;
                ("two-balls", *t, omega, HalfSpaceParams::new(p, *t)?)
            }
            FoldCase::CenteredBall { p } => {
                let rho = 2f64.powf(1.0 / d.as_f64());
                let omega = ball_cloud(d, &vec![0.0; du], rho, samples, seed)?;
                let mut dir = vec![0.0; du];
                dir[0] = *p;
                (
                    "centered-ball",
                    *p,
                    omega,
                    HalfSpaceParams::new(dir, (rho - p).max(0.0))?,
                )
            }
        };
        let report = speclab::trial::two_ball_comparison(&omega, &params, d)?;
        let holds = report.lhs <= report.rhs + 3.0 * report.lhs_std_error;
        let _ = writeln!(
            csv,
            "{i},{kind},{},{},{},{},{holds}",
            format_sci(param),
            format_sci(report.lhs),
            format_sci(report.rhs),
            format_sci(report.lhs_std_error)
        );
    }
    emit(args.out.as_deref(), &csv, start, invocation, seed, None)
}

fn run_bounds(mut args: BoundsArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let base: BoundsArgs = load_config(&path)?;
        args = BoundsArgs {
            config: None,
            table: args.table || base.table,
            dmin: args.dmin.or(base.dmin),
            dmax: args.dmax.or(base.dmax),
            dim: args.dim.or(base.dim),
            k: args.k.or(base.k),
            input: args.input.or(base.input),
            mass: args.mass.or(base.mass),
            out: args.out.or(base.out),
        };
    }
    if args.table {
        let dmin = args.dmin.unwrap_or(3);
        let dmax = args.dmax.unwrap_or(12);
        let mut csv = String::from("d,k,constant\n");
        for d in dmin..=dmax {
            let dd = Dimension::new(d)?;
            for k in [1u32, 2] {
                let _ = writeln!(csv, "{d},{k},{}", format_sci(sharp_constant(dd, k)?));
            }
        }
        return emit(
            args.out.as_deref(),
            &csv,
            start,
            invocation,
            DEFAULT_SEED,
            None,
        );
    }

    let d = Dimension::new(require(args.dim, "dim")?)?;
    let k = args.k.unwrap_or(1);
    let report: BoundReport = match &args.input {
        Some(path) => {
            let (lambda_k, essential) = read_spectrum_value(path, k as usize)?;
            let mass = match args.mass {
                Some(m) => m,
                None => RadialWeight::inv_square().ball_mass(d)?,
            };
            let spectrum = Spectrum {
                entries: vec![
                    speclab::radial::SpectrumEntry {
                        value: 0.0,
                        sector_ell: 0,
                        multiplicity: 1,
                    },
                    speclab::radial::SpectrumEntry {
                        value: lambda_k,
                        sector_ell: 1,
                        multiplicity: k as u64,
                    },
                ],
                mass,
                essential_flag: essential,
                essential_estimate: None,
                localized_sectors: vec![],
            };
            neumann_bound_check(d, &spectrum, k)?
        }
        None => {
            let grid = GridSpec::new(2048, 1e-6, 2.0)?;
            let spec = ball_weighted_neumann(d, &RadialWeight::inv_square(), k as usize, &grid, 4)?;
            neumann_bound_check(d, &spec, k)?
        }
    };
    let ball = unit_ball_steklov_report(d)?;
    let doc = serde_json::json!({ "neumann": report, "steklov_unit_ball": ball });
    let json = serde_json::to_string_pretty(&doc).expect("report serializes") + "\n";
    emit(
        args.out.as_deref(),
        &json,
        start,
        invocation,
        DEFAULT_SEED,
        None,
    )
}

/// Reads `λ_k` (and the essential flag) back from a radial-spectrum CSV.
fn read_spectrum_value(path: &Path, k: usize) -> Result<(f64, bool), Error> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header.trim() != "k,value,sector_ell,multiplicity,essential_flag" {
        return Err(Error::Parse(format!(
            "unexpected spectrum CSV header `{header}`"
        )));
    }
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            continue;
        }
        let row_k: usize = fields[0]
            .parse()
            .map_err(|e| Error::Parse(format!("row index: {e}")))?;
        if row_k == k {
            let value: f64 = fields[1]
                .parse()
                .map_err(|e| Error::Parse(format!("value: {e}")))?;
            let essential: bool = fields[4]
                .parse()
                .map_err(|e| Error::Parse(format!("flag: {e}")))?;
            return Ok((value, essential));
        }
    }
    Err(Error::InvalidParameter(format!(
        "spectrum file has no row with k = {k}"
    )))
}

fn parse_values(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("sweep value `{v}`: {e}")))
        })
        .collect()
}

fn run_sweep(mut args: SweepArgs, start: Instant, invocation: &[String]) -> Result<(), Error> {
    if let Some(path) = args.config.clone() {
        let base: SweepArgs = load_config(&path)?;
        args = SweepArgs {
            config: None,
            kind: args.kind.or(base.kind),
            values: args.values.or(base.values),
            bumps: args.bumps.or(base.bumps),
            modes: args.modes.or(base.modes),
            k: args.k.or(base.k),
            out: args.out.or(base.out),
        };
    }
    let kind = require(args.kind.clone(), "kind")?;
    let values = parse_values(&require(args.values.clone(), "values")?)?;
    use rayon::prelude::*;
    let csv = match kind.as_str() {
        "bumps-epsilon" => {
            let n_modes = args.modes.unwrap_or(512);
            let k = args.k.unwrap_or(2);
            let default_bumps = format!("0:1,{}:1", std::f64::consts::PI);
            let (centers, masses) = parse_bumps(args.bumps.as_deref().unwrap_or(&default_bumps))?;
            let rows: Vec<Result<String, Error>> = values
                .par_iter()
                .enumerate()
                .map(|(i, &eps)| {
                    let (rho, _) = concentrating_density(&centers, &masses, eps, 2 * n_modes)?;
                    let spec = steklov_eigenvalues(&rho, k, n_modes)?;
                    let bar = spec.normalized();
                    Ok(format!(
                        "{i},{},{},{}\n",
                        format_sci(eps),
                        format_sci(spec.entries[k]),
                        format_sci(bar[k])
                    ))
                })
                .collect();
            let mut csv = String::from("index,epsilon,sigma_k,sigma_bar_k\n");
            for row in rows {
                csv.push_str(&row?);
            }
            csv
        }
        "mobius-radius" => {
            let n_modes = args.modes.unwrap_or(256);
            let k = args.k.unwrap_or(1);
            let rows: Vec<Result<String, Error>> = values
                .par_iter()
                .enumerate()
                .map(|(i, &a)| {
                    let rho =
                        density_from_mobius(num_complex::Complex64::new(a, 0.0), 2 * n_modes)?;
                    let spec = steklov_eigenvalues(&rho, k, n_modes)?;
                    let bar = spec.normalized();
                    Ok(format!(
                        "{i},{},{},{}\n",
                        format_sci(a),
                        format_sci(spec.entries[k]),
                        format_sci(bar[k])
                    ))
                })
                .collect();
            let mut csv = String::from("index,a,sigma_k,sigma_bar_k\n");
            for row in rows {
                csv.push_str(&row?);
            }
            csv
        }
        "dimension" => {
            let rows: Vec<Result<String, Error>> = values
                .par_iter()
                .enumerate()
                .map(|(i, &dval)| {
                    let d = Dimension::new(dval as u32)?;
                    let grid = GridSpec::new(2048, 1e-6, 2.0)?;
                    let spec = ball_weighted_neumann(d, &RadialWeight::inv_square(), 1, &grid, 4)?;
                    let report = neumann_bound_check(d, &spec, 1)?;
                    Ok(format!(
                        "{i},{},{},{},{}\n",
                        d.get(),
                        format_sci(spec.value_at(1).unwrap_or(f64::NAN)),
                        format_sci(report.quantity),
                        format_sci(report.margin)
                    ))
                })
                .collect();
            let mut csv = String::from("index,d,lambda_1,lambda_bar_1,margin\n");
            for row in rows {
                csv.push_str(&row?);
            }
            csv
        }
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown sweep kind `{other}` (bumps-epsilon | mobius-radius | dimension)"
            )))
        }
    };
    emit(
        args.out.as_deref(),
        &csv,
        start,
        invocation,
        DEFAULT_SEED,
        None,
    )
}
