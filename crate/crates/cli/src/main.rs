use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mimo_lab::experiments::{reproduce, run, write_outputs, Experiment};
use mimo_lab::{Error, FamilyKind, GeometrySpec, Objective, RunConfig};

#[derive(Parser)]
#[command(name = "mimo-lab", version, about = "Line-of-sight massive MIMO array experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an array, print its summary and optionally write positions as CSV.
    Geometry(GeometryArgs),
    /// Run one experiment and write `<name>_<utc>_<seed>.csv` plus a JSON sidecar.
    Run(Box<RunArgs>),
    /// Parse and validate a JSON config without running anything.
    Validate { config: PathBuf },
    /// Re-run the experiment recorded in a JSON sidecar and compare the CSV.
    Reproduce {
        sidecar: PathBuf,
        #[arg(long, default_value_t = 0)]
        workers: usize,
        /// Directory for the regenerated files; defaults to the sidecar's directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long, default_value = "linear")]
    kind: String,
    #[arg(long, default_value_t = 200)]
    n: usize,
    /// Spacing in wavelengths (mean spacing for sparse arrays).
    #[arg(long, visible_alias = "d0", default_value_t = 0.5)]
    d: f64,
    /// Chebyshev coefficients, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Vec<f64>,
    #[arg(long, default_value_t = 60.0)]
    freq_ghz: f64,
    /// CSV output path for element positions.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    experiment: String,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, env = "MIMO_LAB_OUT")]
    out: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    freq_ghz: Option<f64>,
    /// Geometry family: linear, sparse or circular.
    #[arg(long, visible_alias = "kind")]
    geom: Option<String>,
    #[arg(long)]
    d: Option<f64>,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    alpha: Option<Vec<f64>>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    snr_db: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    d_values: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    k_values: Option<Vec<usize>>,
    #[arg(long)]
    bins: Option<usize>,
    /// `lo,hi` of the alpha search.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, num_args = 1)]
    alpha_range: Option<Vec<f64>>,
    #[arg(long)]
    alpha_points: Option<usize>,
    /// `mean` or `q<level>`, e.g. `q0.99`.
    #[arg(long)]
    objective: Option<String>,
    /// Zero-Forcing geometries as `kind:spacing[:alpha]`, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    zf_geoms: Option<Vec<String>>,
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    if e.is_validation() {
        ExitCode::from(2)
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Geometry(args) => cmd_geometry(args),
        Command::Run(args) => cmd_run(*args),
        Command::Validate { config } => cmd_validate(&config),
        Command::Reproduce { sidecar, workers, out } => cmd_reproduce(&sidecar, workers, out),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}

fn cmd_geometry(args: GeometryArgs) -> Result<ExitCode, Error> {
    let kind: FamilyKind = args.kind.parse()?;
    let spec = GeometrySpec { kind, spacing: args.d, alphas: args.alpha };
    if !(args.freq_ghz > 0.0 && args.freq_ghz.is_finite()) {
        return Err(Error::invalid("freq-ghz", "must be positive"));
    }
    let lambda = mimo_lab::geometry::wavelength(args.freq_ghz * 1e9);
    let geometry = spec.build(args.n, lambda).map_err(|e| match e {
        Error::MonotonicityViolation { .. } => Error::invalid("alpha", e.to_string()),
        other => other,
    })?;
    let s = geometry.summary();
    println!(
        "kind={} n={} wavelength_m={:.6} aperture_m={:.4} min_spacing_wl={:.2} max_spacing_wl={:.2} mean_spacing_wl={:.2} far_field_m={:.2}",
        kind,
        s.n,
        s.wavelength_m,
        s.aperture_m,
        s.min_spacing_wl,
        s.max_spacing_wl,
        s.mean_spacing_wl,
        s.far_field_m
    );
    if let Some(path) = args.out {
        geometry.write_csv(BufWriter::new(File::create(&path)?))?;
        println!("wrote {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn parse_objective(s: &str) -> Result<Objective, Error> {
    if s == "mean" {
        return Ok(Objective::MeanCondition);
    }
    s.strip_prefix('q')
        .and_then(|l| l.parse::<f64>().ok())
        .map(|level| Objective::QuantileCondition { level })
        .ok_or_else(|| Error::invalid("objective", format!("expected `mean` or `q<level>`, got `{s}`")))
}

fn parse_geom(s: &str) -> Result<GeometrySpec, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::invalid("zf-geoms", format!("expected kind:spacing[:alpha], got `{s}`"));
    let kind: FamilyKind = parts[0].parse()?;
    let spacing: f64 = parts.get(1).ok_or_else(bad)?.parse().map_err(|_| bad())?;
    let alphas = parts[2..]
        .iter()
        .map(|a| a.parse::<f64>().map_err(|_| bad()))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GeometrySpec { kind, spacing, alphas })
}

/// Applies command-line overrides on top of a config loaded from file or
/// defaults.
fn resolve_config(args: &RunArgs) -> Result<RunConfig, Error> {
    let mut c = match &args.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(v) = args.seed {
        c.master_seed = v;
    }
    if let Some(v) = args.workers {
        c.workers = v;
    }
    if let Some(v) = args.n {
        c.n_antennas = v;
    }
    if let Some(v) = args.freq_ghz {
        c.frequency_hz = v * 1e9;
    }
    if let Some(g) = &args.geom {
        c.geometry.kind = g.parse()?;
    }
    if let Some(v) = args.d.or(args.d0) {
        c.geometry.spacing = v;
    }
    if let Some(a) = &args.alpha {
        c.geometry.alphas = a.clone();
    }
    if let Some(v) = args.k {
        c.scenario.k_users = v;
    }
    if let Some(v) = args.m {
        c.m_scenarios = v;
    }
    if let Some(v) = args.snr_db {
        c.snr_db = v;
    }
    if let Some(v) = &args.d_values {
        c.d_values = v.clone();
    }
    if let Some(v) = &args.k_values {
        c.k_values = v.clone();
    }
    if let Some(v) = args.bins {
        c.bins = v;
    }
    if let Some(r) = &args.alpha_range {
        match r.as_slice() {
            [lo, hi] => {
                c.alpha_search.lo = *lo;
                c.alpha_search.hi = *hi;
            }
            _ => return Err(Error::invalid("alpha-range", "expected `lo,hi`")),
        }
    }
    if let Some(v) = args.alpha_points {
        c.alpha_search.points = v;
    }
    if let Some(o) = &args.objective {
        c.alpha_search.objective = parse_objective(o)?;
    }
    if let Some(g) = &args.zf_geoms {
        c.zf_geometries = g.iter().map(|s| parse_geom(s)).collect::<Result<_, _>>()?;
    }
    if args.d.is_some() && args.d0.is_some() {
        return Err(Error::invalid("d0", "give either --d or --d0, not both"));
    }
    Ok(c)
}

fn timestamp() -> String {
    chrono::Utc::now().format("%Y%m%dT%H%M%SZ").to_string()
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Error> {
    let experiment: Experiment = args.experiment.parse()?;
    let config = resolve_config(&args)?;
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let result = run(experiment, &config)?;
    let paths = write_outputs(&result, &out, &timestamp())?;
    println!("{} cells", result.cells.len());
    println!("wrote {}", paths.csv.display());
    println!("wrote {}", paths.json.display());
    if let Some(curve) = paths.curve {
        println!("wrote {}", curve.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(path: &Path) -> Result<ExitCode, Error> {
    let config = RunConfig::from_path(path)?;
    config.validate()?;
    println!("{}: ok", path.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_reproduce(sidecar: &Path, workers: usize, out: Option<PathBuf>) -> Result<ExitCode, Error> {
    let result = reproduce(sidecar, workers)?;
    let dir = out.unwrap_or_else(|| {
        sidecar.parent().map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."))
    });
    let paths = write_outputs(&result, &dir, &timestamp())?;
    println!("wrote {}", paths.csv.display());

    let original = sidecar.with_extension("csv");
    if !original.exists() {
        println!("no original CSV at {}, nothing to compare", original.display());
        return Ok(ExitCode::SUCCESS);
    }
    if std::fs::read(&original)? == std::fs::read(&paths.csv)? {
        println!("identical to {}", original.display());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("differs from {}", original.display());
        Ok(ExitCode::from(1))
    }
}
