//! Deterministic plain-text artifacts: CSV data files, key-value reports,
//! and content hashing for the manifest. All floats use Rust's shortest
//! round-trip formatting; all files end lines with LF.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use twoslit::analysis::{ComparisonReport, PlaneCrossings, ScreenHistogram, WhichWayReport};
use twoslit::ensemble::TerminationCounts;
use twoslit::errors::ConfigError;
use twoslit::integrator::{Hole, Sample, Scheme, ScreenHit, Termination, Trajectory};
use twoslit::point::Complex3;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut s = String::with_capacity(64);
    for b in digest {
        let _ = write!(s, "{b:02x}");
    }
    s
}

pub fn trajectories_csv(trajectories: &[Trajectory]) -> String {
    let mut s = String::from("traj_id,hole,t,x_r,x_i,y_r,y_i,z_r,z_i\n");
    for tr in trajectories {
        for sm in &tr.samples {
            let p = &sm.p;
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{}",
                tr.id,
                tr.hole.label(),
                sm.t,
                p.x.re,
                p.x.im,
                p.y.re,
                p.y.im,
                p.z.re,
                p.z.im
            );
        }
    }
    s
}

pub fn hits_csv(hits: &[ScreenHit]) -> String {
    let mut s = String::from("traj_id,hole,t_hit,z_r,z_i\n");
    for h in hits {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            h.traj_id,
            h.hole.label(),
            h.t_hit,
            h.z_r,
            h.z_i
        );
    }
    s
}

pub fn histogram_csv(hist: &ScreenHistogram) -> String {
    let mut s = String::from("bin_center,count,density\n");
    for ((c, n), d) in hist
        .centers()
        .iter()
        .zip(&hist.counts)
        .zip(&hist.density)
    {
        let _ = writeln!(s, "{c},{n},{d}");
    }
    s
}

pub fn reference_csv(centers: &[f64], values: &[f64]) -> String {
    let mut s = String::from("bin_center,density\n");
    for (c, v) in centers.iter().zip(values) {
        let _ = writeln!(s, "{c},{v}");
    }
    s
}

/// Two-column overlay with one block per series, plot-ready
/// (`plot 'overlay.dat' index 0 ..., '' index 1 ...`).
pub fn overlay_dat(hist: &ScreenHistogram, ref_binned: &[f64]) -> String {
    let centers = hist.centers();
    let mut s = String::from("# histogram density\n");
    for (c, d) in centers.iter().zip(&hist.density) {
        let _ = writeln!(s, "{c} {d}");
    }
    s.push_str("\n\n# reference density\n");
    for (c, v) in centers.iter().zip(ref_binned) {
        let _ = writeln!(s, "{c} {v}");
    }
    s
}

pub fn comparison_txt(
    hist: &ScreenHistogram,
    report: &ComparisonReport,
    n_hits: usize,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n_hits = {n_hits}");
    let _ = writeln!(s, "in_window = {}", hist.in_window());
    let _ = writeln!(s, "out_of_window = {}", hist.out_of_window);
    let _ = writeln!(s, "normalized = {}", hist.normalized);
    let _ = writeln!(s, "l1_distance = {}", report.l1_distance);
    let _ = writeln!(s, "peaks_hist = {}", join_floats(&report.peak_positions_hist));
    let _ = writeln!(s, "peaks_ref = {}", join_floats(&report.peak_positions_ref));
    let _ = writeln!(s, "max_peak_offset = {}", report.max_peak_offset);
    if !hist.normalized {
        let _ = writeln!(
            s,
            "warning = no in-window hits; histogram density is all zero and not normalized"
        );
    }
    s
}

pub fn whichway_txt(report: &WhichWayReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "separable = {}", report.separable);
    let fmt_range = |r: Option<(f64, f64)>| match r {
        Some((lo, hi)) => format!("[{lo}, {hi}]"),
        None => "none".to_string(),
    };
    let _ = writeln!(s, "range_a = {}", fmt_range(report.range_a));
    let _ = writeln!(s, "range_b = {}", fmt_range(report.range_b));
    let _ = writeln!(s, "crossings_ab = {}", report.crossings.ab);
    let _ = writeln!(s, "crossings_aa = {}", report.crossings.aa);
    let _ = writeln!(s, "crossings_bb = {}", report.crossings.bb);
    let _ = writeln!(s, "crossings_total = {}", report.crossings.total());
    s
}

pub fn helix_csv(probes: &[PlaneCrossings]) -> String {
    let mut s = String::from("plane_x,traj_id,hole,z_r,z_i\n");
    for p in probes {
        for q in &p.points {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.x,
                q.traj_id,
                q.hole.label(),
                q.z_r,
                q.z_i
            );
        }
    }
    s
}

pub fn counts_summary(counts: &TerminationCounts, n_hits: usize) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "trajectories = {}", counts.total());
    let _ = writeln!(s, "hits = {n_hits}");
    let _ = writeln!(s, "reached_screen = {}", counts.reached_screen);
    let _ = writeln!(s, "time_expired = {}", counts.time_expired);
    let _ = writeln!(s, "node_point = {}", counts.node_point);
    let _ = writeln!(s, "singular_point = {}", counts.singular_point);
    let _ = writeln!(s, "overflow = {}", counts.overflow);
    let _ = writeln!(s, "branch_cross = {}", counts.branch_cross);
    s
}

fn join_floats(xs: &[f64]) -> String {
    if xs.is_empty() {
        return "none".to_string();
    }
    xs.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_hole(s: &str, key: &str, line: usize) -> Result<Hole, ConfigError> {
    match s {
        "A" => Ok(Hole::A),
        "B" => Ok(Hole::B),
        _ => Err(ConfigError::new(
            key,
            format!("line {line}: unknown hole '{s}'"),
        )),
    }
}

fn split_row<'a>(
    line: &'a str,
    n: usize,
    key: &str,
    lineno: usize,
) -> Result<Vec<&'a str>, ConfigError> {
    let cols: Vec<&str> = line.split(',').collect();
    if cols.len() != n {
        return Err(ConfigError::new(
            key,
            format!("line {lineno}: expected {n} columns, got {}", cols.len()),
        ));
    }
    Ok(cols)
}

fn pf(key: &str, lineno: usize, v: &str) -> Result<f64, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("line {lineno}: not a number: '{v}'")))
}

fn pu(key: &str, lineno: usize, v: &str) -> Result<u64, ConfigError> {
    v.parse()
        .map_err(|_| ConfigError::new(key, format!("line {lineno}: not an integer: '{v}'")))
}

pub fn read_hits(path: &Path) -> Result<Vec<ScreenHit>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("hits", format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == "traj_id,hole,t_hit,z_r,z_i" => {}
        _ => return Err(ConfigError::new("hits", "missing or wrong header row")),
    }
    let mut hits = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let c = split_row(line, 5, "hits", i + 1)?;
        hits.push(ScreenHit {
            traj_id: pu("hits", i + 1, c[0])?,
            hole: parse_hole(c[1], "hits", i + 1)?,
            t_hit: pf("hits", i + 1, c[2])?,
            z_r: pf("hits", i + 1, c[3])?,
            z_i: pf("hits", i + 1, c[4])?,
        });
    }
    Ok(hits)
}

/// Read a trajectory file back into sample paths, grouping consecutive
/// rows by trajectory id. The file does not carry termination status (the
/// analysis functions never consume it), so a neutral placeholder is used.
pub fn read_trajectories(path: &Path, scheme: Scheme) -> Result<Vec<Trajectory>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ConfigError::new(
            "trajectories",
            format!("cannot read {}: {e}", path.display()),
        )
    })?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == "traj_id,hole,t,x_r,x_i,y_r,y_i,z_r,z_i" => {}
        _ => {
            return Err(ConfigError::new(
                "trajectories",
                "missing or wrong header row",
            ))
        }
    }
    let mut out: Vec<Trajectory> = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let c = split_row(line, 9, "trajectories", i + 1)?;
        let id = pu("trajectories", i + 1, c[0])?;
        let hole = parse_hole(c[1], "trajectories", i + 1)?;
        let sample = Sample {
            t: pf("trajectories", i + 1, c[2])?,
            p: Complex3::new(
                Complex64::new(
                    pf("trajectories", i + 1, c[3])?,
                    pf("trajectories", i + 1, c[4])?,
                ),
                Complex64::new(
                    pf("trajectories", i + 1, c[5])?,
                    pf("trajectories", i + 1, c[6])?,
                ),
                Complex64::new(
                    pf("trajectories", i + 1, c[7])?,
                    pf("trajectories", i + 1, c[8])?,
                ),
            ),
        };
        match out.last_mut() {
            Some(tr) if tr.id == id => tr.samples.push(sample),
            _ => out.push(Trajectory {
                id,
                hole,
                scheme,
                samples: vec![sample],
                termination: Termination::TimeExpired,
            }),
        }
    }
    Ok(out)
}
