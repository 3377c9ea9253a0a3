//! Command-line simulator for double-slit quantum trajectories.
//!
//! `simulate` integrates an ensemble and writes trajectory/hit CSVs plus a
//! reproducibility manifest; `screen` histograms arrivals against the
//! analytic density; `whichway` reports arrival separability and path
//! crossings; `helix` probes complexified paths plane by plane.

mod config;
mod files;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twoslit::analysis::{
    bin_average, compare, helix_probe, histogram, reference_density, screen_grid,
    which_way_report,
};
use twoslit::ensemble::run_ensemble;
use twoslit::errors::ConfigError;

use config::RunConfig;

#[derive(Parser)]
#[command(
    name = "twoslit",
    version,
    about = "Double-slit trajectory ensembles: real and complexified Bohmian dynamics"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate an ensemble; write trajectories.csv, hits.csv, manifest.txt
    Simulate(SimArgs),
    /// Histogram hits.csv against the analytic screen density
    Screen(ScreenArgs),
    /// Report arrival separability and pairwise path crossings
    Whichway(DirArgs),
    /// Interpolate trajectory crossings of intermediate screen planes
    Helix(HelixArgs),
}

#[derive(Args)]
struct SimArgs {
    /// Scenario preset: dbb-packet | dbb-stationary | mdbb-packet | mdbb-stationary
    #[arg(long)]
    preset: Option<String>,
    /// Flat key = value config file (a manifest.txt works)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Integrator step size
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Integration horizon
    #[arg(long = "t-max", allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Starting points per hole
    #[arg(long = "n-per-hole")]
    n_per_hole: Option<usize>,
    /// Packet scenarios: half-width of the starting interval
    #[arg(long, allow_negative_numbers = true)]
    delta: Option<f64>,
    /// Stationary scenarios: starting circle radius
    #[arg(long = "radius-a", allow_negative_numbers = true)]
    radius_a: Option<f64>,
    /// Start-point weighting: equidistant | psi2
    #[arg(long)]
    weighting: Option<String>,
    /// Histogram bin count
    #[arg(long)]
    bins: Option<usize>,
    /// Histogram window as LO,HI
    #[arg(long = "z-window", allow_hyphen_values = true)]
    z_window: Option<String>,
    /// Recorded in the manifest (placement is deterministic)
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ScreenArgs {
    /// Directory holding hits.csv and manifest.txt from a simulate run
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
    /// Histogram bin count (overrides the manifest)
    #[arg(long)]
    bins: Option<usize>,
    /// Histogram window as LO,HI (overrides the manifest)
    #[arg(long = "z-window", allow_hyphen_values = true)]
    z_window: Option<String>,
}

#[derive(Args)]
struct DirArgs {
    /// Directory holding trajectories.csv, hits.csv, manifest.txt
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct HelixArgs {
    /// Directory holding trajectories.csv and manifest.txt
    #[arg(long = "out-dir", default_value = "out")]
    out_dir: PathBuf,
    /// Probe planes as a comma-separated x list
    #[arg(long, default_value = "5,10,20,30,40,50", allow_hyphen_values = true)]
    planes: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.cmd {
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Screen(a) => cmd_screen(a),
        Cmd::Whichway(a) => cmd_whichway(a),
        Cmd::Helix(a) => cmd_helix(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
    }
}

fn parse_window(raw: &str) -> Result<(f64, f64), ConfigError> {
    let err = || ConfigError::new("z_window", format!("expected LO,HI (got '{raw}')"));
    let (lo, hi) = raw.split_once(',').ok_or_else(err)?;
    Ok((
        lo.trim().parse().map_err(|_| err())?,
        hi.trim().parse().map_err(|_| err())?,
    ))
}

fn apply_flags(cfg: &mut RunConfig, a: &SimArgs) -> Result<(), ConfigError> {
    if let Some(v) = a.dt {
        cfg.integration.dt = v;
    }
    if let Some(v) = a.t_max {
        cfg.integration.t_max = v;
    }
    if let Some(v) = a.n_per_hole {
        cfg.scenario.n_per_hole = v;
    }
    if let Some(v) = a.delta {
        cfg.scenario.delta = v;
    }
    if let Some(v) = a.radius_a {
        cfg.scenario.radius_a = v;
    }
    if let Some(w) = &a.weighting {
        cfg.apply_kv("weighting", w)?;
    }
    if let Some(v) = a.bins {
        cfg.bins = v;
    }
    if let Some(w) = &a.z_window {
        (cfg.z_min, cfg.z_max) = parse_window(w)?;
    }
    if let Some(v) = a.seed {
        cfg.scenario.seed = v;
    }
    Ok(())
}

fn write_file(dir: &Path, name: &str, content: &str) -> Result<(), ConfigError> {
    std::fs::write(dir.join(name), content).map_err(|e| {
        ConfigError::new(
            "out_dir",
            format!("cannot write {}: {e}", dir.join(name).display()),
        )
    })
}

fn cmd_simulate(a: SimArgs) -> Result<u8, ConfigError> {
    let mut cfg = config::resolve_base(a.preset.as_deref(), a.config.as_deref())?;
    apply_flags(&mut cfg, &a)?;
    cfg.validate()?;

    let result = run_ensemble(&cfg.scenario, &cfg.integration)?;

    std::fs::create_dir_all(&a.out_dir).map_err(|e| {
        ConfigError::new(
            "out_dir",
            format!("cannot create {}: {e}", a.out_dir.display()),
        )
    })?;
    let tcsv = files::trajectories_csv(&result.trajectories);
    let hcsv = files::hits_csv(&result.hits);
    write_file(&a.out_dir, "trajectories.csv", &tcsv)?;
    write_file(&a.out_dir, "hits.csv", &hcsv)?;
    let hashes = vec![
        ("trajectories.csv".to_string(), files::sha256_hex(tcsv.as_bytes())),
        ("hits.csv".to_string(), files::sha256_hex(hcsv.as_bytes())),
    ];
    let manifest = cfg.manifest(env!("CARGO_PKG_VERSION"), &hashes);
    write_file(&a.out_dir, "manifest.txt", &manifest)?;

    print!("{}", files::counts_summary(&result.counts, result.hits.len()));

    let abnormal = result.counts.abnormal();
    let total = result.counts.total();
    if 2 * abnormal > total {
        eprintln!(
            "degenerate run: {abnormal} of {total} trajectories terminated abnormally \
             (node/singularity/overflow/branch-cut)"
        );
        return Ok(3);
    }
    Ok(0)
}

fn cmd_screen(a: ScreenArgs) -> Result<u8, ConfigError> {
    let mut cfg = config::resolve_base(None, Some(&a.out_dir.join("manifest.txt")))?;
    if let Some(v) = a.bins {
        cfg.bins = v;
    }
    if let Some(w) = &a.z_window {
        (cfg.z_min, cfg.z_max) = parse_window(w)?;
    }
    cfg.validate()?;

    let hits = files::read_hits(&a.out_dir.join("hits.csv"))?;
    let hist = histogram(&hits, cfg.z_min, cfg.z_max, cfg.bins)?;

    let model = cfg.scenario.model();
    let t_eval = model.reference_time(cfg.integration.screen_x);
    // Dense grid so that per-bin averages of the reference are exact to
    // plotting accuracy: ≥ 40 interior points per bin.
    let dense_n = (40 * cfg.bins + 1).max(2001);
    let grid = screen_grid(cfg.z_min, cfg.z_max, dense_n);
    let dref = reference_density(&model, cfg.integration.screen_x, &grid, t_eval)?;
    let report = compare(&hist, &dref)?;
    let ref_binned = bin_average(&dref.grid, &dref.values, &hist.edges());

    let comparison = files::comparison_txt(&hist, &report, hits.len());
    write_file(&a.out_dir, "histogram.csv", &files::histogram_csv(&hist))?;
    write_file(
        &a.out_dir,
        "reference.csv",
        &files::reference_csv(&hist.centers(), &ref_binned),
    )?;
    write_file(&a.out_dir, "overlay.dat", &files::overlay_dat(&hist, &ref_binned))?;
    write_file(&a.out_dir, "comparison.txt", &comparison)?;
    print!("{comparison}");
    if !hist.normalized {
        eprintln!("warning: no in-window hits; histogram density is all zero and not normalized");
    }
    Ok(0)
}

fn cmd_whichway(a: DirArgs) -> Result<u8, ConfigError> {
    let cfg = config::resolve_base(None, Some(&a.out_dir.join("manifest.txt")))?;
    let scheme = cfg.scenario.scenario.scheme();
    let trajectories = files::read_trajectories(&a.out_dir.join("trajectories.csv"), scheme)?;
    let hits = files::read_hits(&a.out_dir.join("hits.csv"))?;
    let report = which_way_report(&hits, &trajectories);
    let text = files::whichway_txt(&report);
    write_file(&a.out_dir, "whichway.txt", &text)?;
    print!("{text}");
    Ok(0)
}

fn cmd_helix(a: HelixArgs) -> Result<u8, ConfigError> {
    let cfg = config::resolve_base(None, Some(&a.out_dir.join("manifest.txt")))?;
    let scheme = cfg.scenario.scenario.scheme();
    let mut planes = Vec::new();
    for part in a.planes.split(',') {
        let x: f64 = part.trim().parse().map_err(|_| {
            ConfigError::new("planes", format!("not a number: '{}'", part.trim()))
        })?;
        planes.push(x);
    }
    if planes.is_empty() {
        return Err(ConfigError::new("planes", "need at least one plane"));
    }
    let trajectories = files::read_trajectories(&a.out_dir.join("trajectories.csv"), scheme)?;
    let probes = helix_probe(&trajectories, &planes);
    write_file(&a.out_dir, "helix.csv", &files::helix_csv(&probes))?;
    for p in &probes {
        println!(
            "plane {}: {} crossings, {} missed",
            p.x,
            p.points.len(),
            p.missed
        );
    }
    Ok(0)
}
