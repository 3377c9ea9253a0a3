//! Scenario configuration, starting-point placement, and ensemble runs.
//!
//! Four scenarios pair the two wave models with the two trajectory schemes.
//! Starting points are placed deterministically:
//!
//! * packet scenarios — equidistant (endpoints inclusive) on an interval:
//!   real z₀ ∈ [Z₀−δ, Z₀+δ] for dBB, imaginary offset z_i0 ∈ [−δ, +δ] at
//!   z_r0 = Z₀ for MdBB;
//! * dBB stationary — interior points of the semicircle of radius a around
//!   the hole in the real xz-plane (θ ∈ (−π/2, π/2), dividing the arc into
//!   n+1 equal parts so no point sits on the barrier plane x = 0);
//! * MdBB stationary — arc midpoints of n equal arcs of the full circle
//!   x_i0² + z_i0² = a² in the imaginary xz-plane, optionally re-weighted to
//!   the |ψ|² arc density by deterministic inverse-CDF quantile placement.
//!
//! Hole B always receives the exact mirror images (z ↦ −z) of hole A's
//! points, which keeps ensembles symmetric to the bit level.

use rayon::prelude::*;

use crate::errors::ConfigError;
use crate::integrator::{
    integrate, Hole, IntegrationConfig, Scheme, ScreenHit, Termination, Trajectory,
};
use crate::point::Complex3;
use crate::wavefield::{DisphericalModel, PacketModel, WaveModel};
use num_complex::Complex64;

/// Scenario: wave model × trajectory scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    DbbPacket,
    DbbStationary,
    MdbbPacket,
    MdbbStationary,
}

impl Scenario {
    pub fn scheme(&self) -> Scheme {
        match self {
            Scenario::DbbPacket | Scenario::DbbStationary => Scheme::Dbb,
            Scenario::MdbbPacket | Scenario::MdbbStationary => Scheme::Mdbb,
        }
    }

    pub fn is_packet(&self) -> bool {
        matches!(self, Scenario::DbbPacket | Scenario::MdbbPacket)
    }

    /// Integration settings sized to the scenario.
    ///
    /// The packet rides its carrier at unit speed, so every trajectory that
    /// can reach the screen at x = 50 does so by t = 50. Stationary-wave
    /// trajectories are slower and arrive over a broad span of times, so
    /// those scenarios get a larger time budget (sized so that every start
    /// whose arrival lands inside the usual |z| ≤ 40 analysis window has
    /// time to get there).
    pub fn integration_preset(&self) -> IntegrationConfig {
        let t_max = match self {
            Scenario::DbbPacket | Scenario::MdbbPacket => 50.0,
            Scenario::DbbStationary => 100.0,
            Scenario::MdbbStationary => 600.0,
        };
        IntegrationConfig {
            t_max,
            ..IntegrationConfig::default()
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Scenario::DbbPacket => "dbb-packet",
            Scenario::DbbStationary => "dbb-stationary",
            Scenario::MdbbPacket => "mdbb-packet",
            Scenario::MdbbStationary => "mdbb-stationary",
        }
    }

    pub fn parse(s: &str) -> Option<Scenario> {
        match s {
            "dbb-packet" => Some(Scenario::DbbPacket),
            "dbb-stationary" => Some(Scenario::DbbStationary),
            "mdbb-packet" => Some(Scenario::MdbbPacket),
            "mdbb-stationary" => Some(Scenario::MdbbStationary),
            _ => None,
        }
    }
}

/// How starting points are distributed over the placement domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Weighting {
    /// Uniform spacing over the interval / arc.
    Equidistant,
    /// Inverse-CDF quantiles of the |ψ|² arc density at t = 0 (defined for
    /// the MdBB stationary circle only).
    PsiSquared,
}

impl Weighting {
    pub fn label(&self) -> &'static str {
        match self {
            Weighting::Equidistant => "equidistant",
            Weighting::PsiSquared => "psi2",
        }
    }

    pub fn parse(s: &str) -> Option<Weighting> {
        match s {
            "equidistant" => Some(Weighting::Equidistant),
            "psi2" => Some(Weighting::PsiSquared),
            _ => None,
        }
    }
}

/// Full scenario configuration: placement parameters plus wave-model
/// parameters. `seed` is carried through to the manifest for forward
/// compatibility; all placement implemented here is deterministic.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub n_per_hole: usize,
    /// Packet scenarios: half-width δ of the starting interval.
    pub delta: f64,
    /// Stationary scenarios: circle/semicircle radius a.
    pub radius_a: f64,
    pub weighting: Weighting,
    /// Trapezoid cells used to discretize the |ψ|² arc weight.
    pub m_quadrature: usize,
    pub seed: u64,
    /// Initial packet width σ₀.
    pub sigma0: f64,
    /// Packet carrier wave number k_x.
    pub kx: f64,
    /// Half hole separation Z₀.
    pub z0: f64,
    /// ħ/m.
    pub hbar_over_m: f64,
    /// Dispherical wave number k.
    pub k: f64,
    /// Dispherical source-singularity radius.
    pub singular_radius: f64,
}

impl ScenarioConfig {
    /// The defaults used throughout: n = 50 per hole, δ = 3 (dBB packet) or
    /// 5 (MdBB packet), a = 10⁻³ (dBB semicircle) or 15 (MdBB circle), and
    /// unit-free model constants ħ/m = k_x = k = σ₀ = 1, Z₀ = 10.
    pub fn preset(scenario: Scenario) -> ScenarioConfig {
        ScenarioConfig {
            scenario,
            n_per_hole: 50,
            delta: match scenario {
                Scenario::MdbbPacket => 5.0,
                _ => 3.0,
            },
            radius_a: match scenario {
                Scenario::MdbbStationary => 15.0,
                _ => 1e-3,
            },
            weighting: Weighting::Equidistant,
            m_quadrature: 4096,
            seed: 0,
            sigma0: 1.0,
            kx: 1.0,
            z0: 10.0,
            hbar_over_m: 1.0,
            k: 1.0,
            singular_radius: 1e-6,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_per_hole == 0 {
            return Err(ConfigError::new("n_per_hole", "must be >= 1"));
        }
        if self.scenario.is_packet() {
            if !(self.delta > 0.0) || !self.delta.is_finite() {
                return Err(ConfigError::new(
                    "delta",
                    format!("must be > 0 (got {})", self.delta),
                ));
            }
        } else {
            if !(self.radius_a > 0.0) || !self.radius_a.is_finite() {
                return Err(ConfigError::new(
                    "radius_a",
                    format!("must be > 0 (got {})", self.radius_a),
                ));
            }
            if self.radius_a <= self.singular_radius {
                return Err(ConfigError::new(
                    "radius_a",
                    "starting circle lies inside the source singularity radius",
                ));
            }
        }
        if self.weighting == Weighting::PsiSquared && self.scenario != Scenario::MdbbStationary {
            return Err(ConfigError::new(
                "weighting",
                "psi2 weighting is defined only for the mdbb-stationary scenario",
            ));
        }
        if self.m_quadrature < 8 {
            return Err(ConfigError::new("m_quadrature", "must be >= 8"));
        }
        if !(self.sigma0 > 0.0) {
            return Err(ConfigError::new("sigma0", "must be > 0"));
        }
        if !(self.z0 > 0.0) {
            return Err(ConfigError::new("z0", "must be > 0"));
        }
        if !(self.hbar_over_m > 0.0) {
            return Err(ConfigError::new("hbar_over_m", "must be > 0"));
        }
        if !(self.kx > 0.0) {
            return Err(ConfigError::new("kx", "must be > 0"));
        }
        if !(self.k > 0.0) {
            return Err(ConfigError::new("k", "must be > 0"));
        }
        if !(self.singular_radius >= 0.0) {
            return Err(ConfigError::new("singular_radius", "must be >= 0"));
        }
        Ok(())
    }

    /// The wave model this scenario evolves under.
    pub fn model(&self) -> WaveModel {
        if self.scenario.is_packet() {
            WaveModel::Packet(PacketModel {
                sigma0: self.sigma0,
                kx: self.kx,
                z0: self.z0,
                hbar_over_m: self.hbar_over_m,
            })
        } else {
            WaveModel::Dispherical(DisphericalModel {
                k: self.k,
                z0: self.z0,
                singular_radius: self.singular_radius,
                hbar_over_m: self.hbar_over_m,
            })
        }
    }
}

/// `n` points spanning [lo, hi], endpoints included (the single point for
/// n = 1 is the midpoint).
fn linspace_inclusive(lo: f64, hi: f64, n: usize) -> Vec<f64> {
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

/// Hole-A starting points for the scenario (hole B mirrors these).
fn hole_a_points(cfg: &ScenarioConfig) -> Result<Vec<Complex3>, ConfigError> {
    let n = cfg.n_per_hole;
    match (cfg.scenario, cfg.weighting) {
        (Scenario::DbbPacket, _) => Ok(linspace_inclusive(
            cfg.z0 - cfg.delta,
            cfg.z0 + cfg.delta,
            n,
        )
        .into_iter()
        .map(|z| Complex3::real(0.0, 0.0, z))
        .collect()),
        (Scenario::MdbbPacket, _) => Ok(linspace_inclusive(-cfg.delta, cfg.delta, n)
            .into_iter()
            .map(|zi| {
                Complex3::new(
                    Complex64::new(0.0, 0.0),
                    Complex64::new(0.0, 0.0),
                    Complex64::new(cfg.z0, zi),
                )
            })
            .collect()),
        (Scenario::DbbStationary, _) => {
            // Interior division points of the semicircle θ ∈ (−π/2, π/2):
            // n+1 equal arcs, so for n = 3 the angles are −π/4, 0, +π/4.
            let pts = (0..n)
                .map(|j| {
                    let theta = -std::f64::consts::FRAC_PI_2
                        + std::f64::consts::PI * (j + 1) as f64 / (n + 1) as f64;
                    Complex3::real(
                        cfg.radius_a * theta.cos(),
                        0.0,
                        cfg.z0 + cfg.radius_a * theta.sin(),
                    )
                })
                .collect();
            Ok(pts)
        }
        (Scenario::MdbbStationary, Weighting::Equidistant) => {
            // Midpoints of n equal arcs of the full circle in the imaginary
            // xz-plane.
            let pts = (0..n)
                .map(|j| {
                    let theta = 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
                    circle_point(cfg, theta)
                })
                .collect();
            Ok(pts)
        }
        (Scenario::MdbbStationary, Weighting::PsiSquared) => psi_squared_quantiles(cfg),
    }
}

/// The hole-A circle point at angle θ: x = i·a·cosθ, z = Z₀ + i·a·sinθ.
fn circle_point(cfg: &ScenarioConfig, theta: f64) -> Complex3 {
    Complex3::new(
        Complex64::new(0.0, cfg.radius_a * theta.cos()),
        Complex64::new(0.0, 0.0),
        Complex64::new(cfg.z0, cfg.radius_a * theta.sin()),
    )
}

/// |ψ|² arc weight on the hole-A starting circle at t = 0, as a closure over
/// θ. |ψ|² means the squared modulus of the complex value at the complex
/// point.
fn arc_weight(
    cfg: &ScenarioConfig,
    model: &WaveModel,
    theta: f64,
) -> Result<f64, ConfigError> {
    let p = circle_point(cfg, theta);
    let psi = model.psi(p, 0.0).map_err(|e| {
        ConfigError::new(
            "weighting",
            format!("|ψ|² weight evaluation failed on the start circle: {e}"),
        )
    })?;
    Ok(psi.norm_sqr() * cfg.radius_a)
}

/// Deterministic ψ*ψ placement: build the trapezoid CDF of the arc weight
/// over an m_quadrature-cell grid on [0, 2π] and put the i-th of n points at
/// the (i − ½)/n quantile.
fn psi_squared_quantiles(cfg: &ScenarioConfig) -> Result<Vec<Complex3>, ConfigError> {
    let model = cfg.model();
    let m = cfg.m_quadrature;
    let n = cfg.n_per_hole;
    let h = 2.0 * std::f64::consts::PI / m as f64;

    let weights: Vec<f64> = (0..=m)
        .map(|g| arc_weight(cfg, &model, g as f64 * h))
        .collect::<Result<_, _>>()?;
    let mut cdf = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for g in 0..m {
        acc += 0.5 * (weights[g] + weights[g + 1]) * h;
        cdf.push(acc);
    }
    let total = *cdf.last().unwrap();
    if !(total > 0.0) || !total.is_finite() {
        return Err(ConfigError::new(
            "weighting",
            format!("|ψ|² arc weight does not integrate to a positive finite value (got {total})"),
        ));
    }

    let mut pts = Vec::with_capacity(n);
    let mut cell = 0usize;
    for i in 1..=n {
        let target = (i as f64 - 0.5) / n as f64 * total;
        while cell + 1 < m && cdf[cell + 1] < target {
            cell += 1;
        }
        let du = (target - cdf[cell]).max(0.0);
        let w0 = weights[cell];
        let dw = weights[cell + 1] - w0;
        // Invert the in-cell trapezoid mass h·(w₀·s + Δw·s²/2) = du.
        let q = du / h;
        let disc = (w0 * w0 + 2.0 * dw * q).max(0.0);
        let s = if disc.sqrt() + w0 > 0.0 {
            (2.0 * q / (w0 + disc.sqrt())).clamp(0.0, 1.0)
        } else {
            0.0
        };
        pts.push(circle_point(cfg, (cell as f64 + s) * h));
    }
    Ok(pts)
}

/// All starting points: hole A's block first, then hole B's exact mirror
/// images, in matching order. Trajectory ids follow this order.
pub fn initial_points(cfg: &ScenarioConfig) -> Result<Vec<(Complex3, Hole)>, ConfigError> {
    cfg.validate()?;
    let a = hole_a_points(cfg)?;
    let mut pts = Vec::with_capacity(2 * a.len());
    pts.extend(a.iter().map(|p| (*p, Hole::A)));
    pts.extend(a.iter().map(|p| (p.mirror_z(), Hole::B)));
    Ok(pts)
}

/// Tally of trajectory outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TerminationCounts {
    pub reached_screen: u64,
    pub time_expired: u64,
    pub node_point: u64,
    pub singular_point: u64,
    pub overflow: u64,
    pub branch_cross: u64,
}

impl TerminationCounts {
    pub fn add(&mut self, t: Termination) {
        match t {
            Termination::ReachedScreen => self.reached_screen += 1,
            Termination::TimeExpired => self.time_expired += 1,
            Termination::NodePoint => self.node_point += 1,
            Termination::SingularPoint => self.singular_point += 1,
            Termination::Overflow => self.overflow += 1,
            Termination::BranchCross => self.branch_cross += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.reached_screen
            + self.time_expired
            + self.node_point
            + self.singular_point
            + self.overflow
            + self.branch_cross
    }

    /// Failed terminations (everything except reaching the screen or running
    /// out the clock).
    pub fn abnormal(&self) -> u64 {
        self.node_point + self.singular_point + self.overflow + self.branch_cross
    }
}

/// The outcome of an ensemble run. Trajectories are ordered by id; hits
/// follow the trajectory order.
#[derive(Debug, Clone)]
pub struct EnsembleResult {
    pub trajectories: Vec<Trajectory>,
    pub hits: Vec<ScreenHit>,
    pub counts: TerminationCounts,
}

/// Integrate the full ensemble for a scenario.
///
/// Trajectories are integrated in parallel; results are keyed by trajectory
/// id, so the output is deterministic regardless of thread scheduling.
pub fn run_ensemble(
    cfg: &ScenarioConfig,
    icfg: &IntegrationConfig,
) -> Result<EnsembleResult, ConfigError> {
    cfg.validate()?;
    icfg.validate()?;
    let points = initial_points(cfg)?;
    let model = cfg.model();
    let scheme = cfg.scenario.scheme();

    let results: Result<Vec<_>, ConfigError> = points
        .par_iter()
        .enumerate()
        .map(|(i, (p, hole))| integrate(&model, scheme, i as u64, *hole, *p, icfg))
        .collect();
    let results = results?;

    let mut trajectories = Vec::with_capacity(results.len());
    let mut hits = Vec::new();
    let mut counts = TerminationCounts::default();
    for (traj, hit) in results {
        counts.add(traj.termination);
        if let Some(h) = hit {
            hits.push(h);
        }
        trajectories.push(traj);
    }
    Ok(EnsembleResult {
        trajectories,
        hits,
        counts,
    })
}
