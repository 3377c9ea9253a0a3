//! Screen-side analysis: arrival histograms, analytic reference densities,
//! distribution comparison, which-way classification, and the moving-plane
//! helix probe.

use num_complex::Complex64;

use crate::crossings::{count_crossings, CrossingCounts};
use crate::errors::ConfigError;
use crate::integrator::{Hole, ScreenHit, Trajectory, SCREEN_EPS};
use crate::point::Complex3;
use crate::wavefield::WaveModel;

/// Histogram and reference peaks below this fraction of the global maximum
/// are treated as noise.
pub const PEAK_PROMINENCE_FRAC: f64 = 0.05;

/// `n` grid points spanning [lo, hi] inclusive, linearly spaced.
pub fn screen_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..n)
        .map(|j| {
            let u = j as f64 / (n - 1) as f64;
            lo * (1.0 - u) + hi * u
        })
        .collect()
}

/// Histogram of screen arrivals over a z window.
///
/// Bins are half-open [edge_i, edge_{i+1}) except the last, which includes
/// its upper edge; arrivals outside the window are tallied separately and
/// excluded from normalization. `density` integrates to 1 over the window
/// whenever any hit lands inside (`normalized` records whether it does).
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenHistogram {
    pub z_min: f64,
    pub z_max: f64,
    pub n_bins: usize,
    pub counts: Vec<u64>,
    pub density: Vec<f64>,
    pub out_of_window: u64,
    pub normalized: bool,
}

impl ScreenHistogram {
    pub fn bin_width(&self) -> f64 {
        (self.z_max - self.z_min) / self.n_bins as f64
    }

    /// Bin edges, n_bins + 1 values from z_min to z_max inclusive.
    pub fn edges(&self) -> Vec<f64> {
        screen_grid(self.z_min, self.z_max, self.n_bins + 1)
    }

    /// Bin centers.
    pub fn centers(&self) -> Vec<f64> {
        let e = self.edges();
        (0..self.n_bins).map(|i| 0.5 * (e[i] + e[i + 1])).collect()
    }

    pub fn in_window(&self) -> u64 {
        self.counts.iter().sum()
    }
}

/// Bin screen hits by arrival z_r.
pub fn histogram(
    hits: &[ScreenHit],
    z_min: f64,
    z_max: f64,
    n_bins: usize,
) -> Result<ScreenHistogram, ConfigError> {
    if !(z_min < z_max) || !z_min.is_finite() || !z_max.is_finite() {
        return Err(ConfigError::new(
            "z_window",
            format!("window must satisfy z_min < z_max (got [{z_min}, {z_max}])"),
        ));
    }
    if n_bins == 0 {
        return Err(ConfigError::new("bins", "must be >= 1"));
    }
    let edges = screen_grid(z_min, z_max, n_bins + 1);
    let mut counts = vec![0u64; n_bins];
    let mut out = 0u64;
    for h in hits {
        let z = h.z_r;
        if !(z >= z_min && z <= z_max) {
            out += 1;
            continue;
        }
        // Interior edges partition the window half-open; z == z_max falls
        // into the last (closed) bin by construction.
        let bin = edges[1..n_bins].partition_point(|&e| e <= z);
        counts[bin] += 1;
    }
    let total: u64 = counts.iter().sum();
    let width = (z_max - z_min) / n_bins as f64;
    let normalized = total > 0;
    let density = if normalized {
        counts
            .iter()
            .map(|&c| c as f64 / (total as f64 * width))
            .collect()
    } else {
        vec![0.0; n_bins]
    };
    Ok(ScreenHistogram {
        z_min,
        z_max,
        n_bins,
        counts,
        density,
        out_of_window: out,
        normalized,
    })
}

/// |ψ|² on the screen line, normalized to unit trapezoidal integral over
/// the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceDensity {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl ReferenceDensity {
    /// Trapezoidal integral of the values over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.grid, &self.values)
    }
}

fn trapezoid(grid: &[f64], values: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 1..grid.len() {
        acc += 0.5 * (values[i - 1] + values[i]) * (grid[i] - grid[i - 1]);
    }
    acc
}

/// Evaluate the normalized analytic arrival density |ψ(D, 0, z, t)|² on a z
/// grid along the screen plane x = `screen_x`. For the packet model pass
/// the arrival time (`WaveModel::reference_time`); the stationary model
/// ignores `t_eval`.
pub fn reference_density(
    model: &WaveModel,
    screen_x: f64,
    grid: &[f64],
    t_eval: f64,
) -> Result<ReferenceDensity, ConfigError> {
    if grid.len() < 2 {
        return Err(ConfigError::new("grid", "needs at least two points"));
    }
    if !grid.windows(2).all(|w| w[0] < w[1]) {
        return Err(ConfigError::new("grid", "must be strictly increasing"));
    }
    let mut values = Vec::with_capacity(grid.len());
    for &z in grid {
        let p = Complex3::new(
            Complex64::new(screen_x, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(z, 0.0),
        );
        let psi = model.psi(p, t_eval).map_err(|e| {
            ConfigError::new("grid", format!("wave evaluation failed at z = {z}: {e}"))
        })?;
        values.push(psi.norm_sqr());
    }
    let total = trapezoid(grid, &values);
    if !(total > 0.0) || !total.is_finite() {
        return Err(ConfigError::new(
            "grid",
            format!("screen density does not integrate to a positive finite value (got {total})"),
        ));
    }
    for v in &mut values {
        *v /= total;
    }
    Ok(ReferenceDensity {
        grid: grid.to_vec(),
        values,
    })
}

/// Average of the piecewise-linear interpolant of (grid, values) over each
/// bin defined by `edges`. Exact: summing average × width over all bins
/// reproduces the trapezoidal integral to rounding error.
pub fn bin_average(grid: &[f64], values: &[f64], edges: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(edges.len().saturating_sub(1));
    let mut seg = 0usize; // current grid segment [grid[seg], grid[seg+1]]
    for bin in 0..edges.len() - 1 {
        let (lo, hi) = (edges[bin], edges[bin + 1]);
        let mut acc = 0.0;
        // Skip segments entirely below this bin.
        while seg + 2 < grid.len() && grid[seg + 1] <= lo {
            seg += 1;
        }
        let mut s = seg;
        while s + 1 < grid.len() && grid[s] < hi {
            let a = grid[s].max(lo);
            let b = grid[s + 1].min(hi);
            if b > a {
                let va = lerp_on(grid, values, s, a);
                let vb = lerp_on(grid, values, s, b);
                acc += 0.5 * (va + vb) * (b - a);
            }
            s += 1;
        }
        out.push(acc / (hi - lo));
    }
    out
}

fn lerp_on(grid: &[f64], values: &[f64], seg: usize, x: f64) -> f64 {
    let (g0, g1) = (grid[seg], grid[seg + 1]);
    if g1 == g0 {
        return values[seg];
    }
    let u = (x - g0) / (g1 - g0);
    values[seg] * (1.0 - u) + values[seg + 1] * u
}

/// Histogram-vs-reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    /// Σ |hist_density − ref_density| · bin_width ∈ [0, 2].
    pub l1_distance: f64,
    pub peak_positions_hist: Vec<f64>,
    pub peak_positions_ref: Vec<f64>,
    /// Largest |Δz| over greedily matched peak pairs (0 when either list is
    /// empty).
    pub max_peak_offset: f64,
}

/// Strict local maxima of `values` (plateau-aware), keeping those whose
/// prominence is at least `min_prominence`. A plateau peak's position is
/// the midpoint of its run of equal values; positions are read from
/// `centers`.
pub fn peak_positions(values: &[f64], centers: &[f64], min_prominence: f64) -> Vec<f64> {
    let n = values.len();
    let mut peaks = Vec::new();
    let mut l = 0usize;
    while l < n {
        let mut r = l;
        while r + 1 < n && values[r + 1] == values[l] {
            r += 1;
        }
        let v = values[l];
        let interior = l > 0 && r + 1 < n;
        if interior && values[l - 1] < v && values[r + 1] < v {
            // Walk outward to the nearest strictly higher value on each
            // side, tracking the minimum along the way; prominence is the
            // drop to the higher of the two valley floors.
            let mut left_min = f64::INFINITY;
            let mut i = l;
            while i > 0 {
                i -= 1;
                if values[i] > v {
                    break;
                }
                left_min = left_min.min(values[i]);
            }
            let mut right_min = f64::INFINITY;
            let mut i = r;
            while i + 1 < n {
                i += 1;
                if values[i] > v {
                    break;
                }
                right_min = right_min.min(values[i]);
            }
            let prominence = v - left_min.max(right_min);
            if prominence >= min_prominence {
                peaks.push(0.5 * (centers[l] + centers[r]));
            }
        }
        l = r + 1;
    }
    peaks
}

/// Greedy nearest matching between two position lists: repeatedly pair the
/// globally closest unmatched positions. Returns the largest matched
/// distance (0 if either list is empty).
fn greedy_max_offset(a: &[f64], b: &[f64]) -> f64 {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            pairs.push(((x - y).abs(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.partial_cmp(&q.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut max_offset = 0.0f64;
    let mut matched = 0usize;
    let target = a.len().min(b.len());
    for (d, i, j) in pairs {
        if matched == target {
            break;
        }
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        max_offset = max_offset.max(d);
        matched += 1;
    }
    max_offset
}

/// Compare an arrival histogram against an analytic reference density.
///
/// The reference is bin-averaged onto the histogram's bins (exact for its
/// piecewise-linear interpolant); the report carries the L1 distance of
/// the two per-bin densities and both peak lists. The reference grid must
/// span the histogram window.
pub fn compare(
    hist: &ScreenHistogram,
    reference: &ReferenceDensity,
) -> Result<ComparisonReport, ConfigError> {
    let g0 = *reference.grid.first().unwrap_or(&f64::NAN);
    let g1 = *reference.grid.last().unwrap_or(&f64::NAN);
    let span = hist.z_max - hist.z_min;
    if !((g0 - hist.z_min).abs() <= 1e-9 * span && (g1 - hist.z_max).abs() <= 1e-9 * span) {
        return Err(ConfigError::new(
            "z_window",
            format!(
                "reference grid [{g0}, {g1}] does not span the histogram window [{}, {}]",
                hist.z_min, hist.z_max
            ),
        ));
    }
    let edges = hist.edges();
    let ref_bins = bin_average(&reference.grid, &reference.values, &edges);
    let width = hist.bin_width();
    let l1_distance: f64 = hist
        .density
        .iter()
        .zip(&ref_bins)
        .map(|(h, r)| (h - r).abs() * width)
        .sum();

    let centers = hist.centers();
    let hist_max = hist.density.iter().cloned().fold(0.0, f64::max);
    let ref_max = ref_bins.iter().cloned().fold(0.0, f64::max);
    let peak_positions_hist =
        peak_positions(&hist.density, &centers, PEAK_PROMINENCE_FRAC * hist_max);
    let peak_positions_ref = peak_positions(&ref_bins, &centers, PEAK_PROMINENCE_FRAC * ref_max);
    let max_peak_offset = greedy_max_offset(&peak_positions_hist, &peak_positions_ref);
    Ok(ComparisonReport {
        l1_distance,
        peak_positions_hist,
        peak_positions_ref,
        max_peak_offset,
    })
}

/// Which-way classification of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct WhichWayReport {
    /// True when the two holes' arrival z_r ranges do not overlap, i.e. an
    /// arrival position identifies its hole.
    pub separable: bool,
    pub range_a: Option<(f64, f64)>,
    pub range_b: Option<(f64, f64)>,
    pub crossings: CrossingCounts,
}

fn hit_range(hits: &[ScreenHit], hole: Hole) -> Option<(f64, f64)> {
    let mut range: Option<(f64, f64)> = None;
    for h in hits.iter().filter(|h| h.hole == hole) {
        range = Some(match range {
            None => (h.z_r, h.z_r),
            Some((lo, hi)) => (lo.min(h.z_r), hi.max(h.z_r)),
        });
    }
    range
}

/// Classify which-way information: arrival-range separability plus
/// pairwise path-crossing counts.
pub fn which_way_report(hits: &[ScreenHit], trajectories: &[Trajectory]) -> WhichWayReport {
    let range_a = hit_range(hits, Hole::A);
    let range_b = hit_range(hits, Hole::B);
    let separable = match (range_a, range_b) {
        (Some((a_lo, a_hi)), Some((b_lo, b_hi))) => a_hi < b_lo || b_hi < a_lo,
        _ => true,
    };
    WhichWayReport {
        separable,
        range_a,
        range_b,
        crossings: count_crossings(trajectories),
    }
}

/// One trajectory's interpolated crossing of a probe plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub traj_id: u64,
    pub hole: Hole,
    pub z_r: f64,
    pub z_i: f64,
}

/// All crossings of one probe plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneCrossings {
    pub x: f64,
    pub points: Vec<PlanePoint>,
    /// Trajectories whose recorded path never reaches this plane.
    pub missed: u64,
}

/// Probe the ensemble at a sequence of screen positions: for each plane,
/// the first recorded crossing of x_r through it per trajectory, linearly
/// interpolated between samples. Trajectories that never reach a plane are
/// counted in `missed`.
pub fn helix_probe(trajectories: &[Trajectory], planes: &[f64]) -> Vec<PlaneCrossings> {
    planes
        .iter()
        .map(|&x| {
            let mut points = Vec::new();
            let mut missed = 0u64;
            for t in trajectories {
                match first_plane_crossing(t, x) {
                    Some((z_r, z_i)) => points.push(PlanePoint {
                        traj_id: t.id,
                        hole: t.hole,
                        z_r,
                        z_i,
                    }),
                    None => missed += 1,
                }
            }
            PlaneCrossings { x, points, missed }
        })
        .collect()
}

fn first_plane_crossing(t: &Trajectory, x: f64) -> Option<(f64, f64)> {
    let s = &t.samples;
    if s.is_empty() {
        return None;
    }
    if s[0].p.x.re >= x - SCREEN_EPS {
        return Some((s[0].p.z.re, s[0].p.z.im));
    }
    for w in s.windows(2) {
        let (a, b) = (&w[0].p, &w[1].p);
        if b.x.re >= x - SCREEN_EPS && a.x.re < x {
            let dx = b.x.re - a.x.re;
            let f = if dx > 0.0 {
                ((x - a.x.re) / dx).clamp(0.0, 1.0)
            } else {
                1.0
            };
            let z = a.z + (b.z - a.z) * f;
            return Some((z.re, z.im));
        }
    }
    None
}
