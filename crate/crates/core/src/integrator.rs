//! Fixed-step RK4 trajectory integration with screen-crossing detection.
//!
//! Both schemes integrate `dp/dt = v(p, t)` where `v` is the model's
//! velocity field: the dBB scheme uses the real velocity (state stays in
//! real 3-space, enforced structurally and asserted), the MdBB scheme uses
//! the full complex velocity, which is equivalent to integrating the real
//! and imaginary parts as coupled real first-order equations.
//!
//! A trajectory ends when it first reaches the screen plane `x_r = screen_x`
//! (linearly interpolated between the bracketing steps), when `t_max` is
//! exhausted, or when the field evaluation fails (node, source singularity,
//! overflow) or the state runs away. Failed trajectories are kept for
//! diagnostics, never silently dropped.

use crate::errors::{ConfigError, FieldError};
use crate::point::Complex3;
use crate::wavefield::WaveModel;

/// Integration aborts with `Overflow` once any of the six real coordinate
/// components exceeds this magnitude (runaway trajectory).
pub const OVERFLOW_LIMIT: f64 = 1e6;

/// Tolerance for screen-plane detection: a step landing within this distance
/// of `screen_x` counts as on the plane (so an arrival that is exact up to
/// float rounding is not pushed one step late), and no recorded sample before
/// `t_hit` lies more than this beyond the plane.
pub const SCREEN_EPS: f64 = 1e-9;

/// Hard cap on the step count so a bad dt/t_max pair fails fast.
const MAX_STEPS: u64 = 100_000_000;

/// Which hole (source) a trajectory belongs to: A at z = +Z₀, B at z = −Z₀.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hole {
    A,
    B,
}

impl Hole {
    pub fn label(&self) -> &'static str {
        match self {
            Hole::A => "A",
            Hole::B => "B",
        }
    }
}

/// Trajectory scheme selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// de Broglie–Bohm: real velocity field, real 3-space state.
    Dbb,
    /// Modified de Broglie–Bohm: complex velocity, complexified state.
    Mdbb,
}

/// Why a trajectory stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Crossed the screen plane; a [`ScreenHit`] was emitted.
    ReachedScreen,
    /// Ran until t_max without reaching the screen.
    TimeExpired,
    /// Field evaluation hit a wave-function node.
    NodePoint,
    /// Field evaluation came within `singular_radius` of a source.
    SingularPoint,
    /// Non-finite evaluation or coordinate beyond [`OVERFLOW_LIMIT`].
    Overflow,
    /// The complex radicand of r₁ or r₂ crossed the principal branch cut
    /// (negative real axis) between two steps; the field is discontinuous
    /// across the cut, so the trajectory is abandoned rather than continued.
    BranchCross,
}

impl Termination {
    pub fn is_abnormal(&self) -> bool {
        matches!(
            self,
            Termination::NodePoint
                | Termination::SingularPoint
                | Termination::Overflow
                | Termination::BranchCross
        )
    }

    pub fn label(&self) -> &'static str {
        match self {
            Termination::ReachedScreen => "reached_screen",
            Termination::TimeExpired => "time_expired",
            Termination::NodePoint => "node_point",
            Termination::SingularPoint => "singular_point",
            Termination::Overflow => "overflow",
            Termination::BranchCross => "branch_cross",
        }
    }
}

impl From<FieldError> for Termination {
    fn from(e: FieldError) -> Termination {
        match e {
            FieldError::NodePoint => Termination::NodePoint,
            FieldError::SingularPoint => Termination::SingularPoint,
            FieldError::Overflow => Termination::Overflow,
        }
    }
}

/// One recorded state along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub p: Complex3,
}

/// A single integrated trajectory.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub id: u64,
    pub hole: Hole,
    pub scheme: Scheme,
    /// States at t = 0, every `record_stride`-th step, and the final state
    /// (which is the interpolated crossing state for screen arrivals).
    pub samples: Vec<Sample>,
    pub termination: Termination,
}

/// The interpolated state at the first crossing of the screen plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScreenHit {
    pub traj_id: u64,
    pub hole: Hole,
    pub t_hit: f64,
    pub z_r: f64,
    pub z_i: f64,
}

/// Fixed-step integration parameters.
#[derive(Debug, Clone, Copy)]
pub struct IntegrationConfig {
    /// RK4 step size.
    pub dt: f64,
    /// Integration horizon; the number of steps is round(t_max/dt).
    pub t_max: f64,
    /// Screen plane position (crossings of x_r = screen_x are detected).
    pub screen_x: f64,
    /// A sample is recorded every this many steps (≥ 1).
    pub record_stride: u64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            dt: 0.01,
            t_max: 50.0,
            screen_x: 50.0,
            record_stride: 10,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(ConfigError::new("dt", format!("must be > 0 (got {})", self.dt)));
        }
        if !(self.t_max > 0.0) || !self.t_max.is_finite() {
            return Err(ConfigError::new(
                "t_max",
                format!("must be > 0 (got {})", self.t_max),
            ));
        }
        if !self.screen_x.is_finite() {
            return Err(ConfigError::new(
                "screen_x",
                format!("must be finite (got {})", self.screen_x),
            ));
        }
        if self.record_stride == 0 {
            return Err(ConfigError::new("record_stride", "must be >= 1"));
        }
        let steps = (self.t_max / self.dt).round();
        if !(steps >= 1.0) {
            return Err(ConfigError::new(
                "t_max",
                format!("shorter than one step (t_max = {}, dt = {})", self.t_max, self.dt),
            ));
        }
        if steps > MAX_STEPS as f64 {
            return Err(ConfigError::new(
                "t_max",
                format!("t_max/dt = {} exceeds the {} step limit", steps, MAX_STEPS),
            ));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        (self.t_max / self.dt).round() as u64
    }
}

/// Velocity of the chosen scheme as a `Complex3` (real-embedded for dBB, so
/// zero imaginary parts propagate exactly through the real-coefficient RK4
/// update).
fn velocity(
    model: &WaveModel,
    scheme: Scheme,
    p: Complex3,
    t: f64,
) -> Result<Complex3, FieldError> {
    match scheme {
        // The stationary wave's complex trajectories follow the rotated flow
        // -(ħ/m)∇ψ/ψ (see `complex_scheme_velocity`); the packet's follow
        // the velocity field itself.
        Scheme::Mdbb => match model {
            WaveModel::Dispherical(d) => d.complex_scheme_velocity(p),
            WaveModel::Packet(_) => model.mdbb_velocity(p, t),
        },
        Scheme::Dbb => {
            let v = model.dbb_velocity(p, t)?;
            Ok(Complex3::real(v[0], v[1], v[2]))
        }
    }
}

/// One classical RK4 step from `(p, t)` to `t + dt`.
///
/// The increment is formed as `dt · (k₁ + 2k₂ + 2k₃ + k₄)/6` with the
/// division done before the dt scaling, so a constant unit field advances a
/// coordinate by exactly `dt` (packet trajectories then arrive at the screen
/// at exactly t = t_max instead of one rounding error away from it).
pub fn rk4_step(
    model: &WaveModel,
    scheme: Scheme,
    p: Complex3,
    t: f64,
    dt: f64,
) -> Result<Complex3, FieldError> {
    let half = 0.5 * dt;
    let k1 = velocity(model, scheme, p, t)?;
    let k2 = velocity(model, scheme, p + k1 * half, t + half)?;
    let k3 = velocity(model, scheme, p + k2 * half, t + half)?;
    let k4 = velocity(model, scheme, p + k3 * dt, t + dt)?;
    Ok(p + (k1 + (k2 + k3) * 2.0 + k4) / 6.0 * dt)
}

/// True when the segment from `wa` to `wb` crosses the negative real axis
/// (the principal branch cut of the square root).
fn segment_crosses_cut(wa: num_complex::Complex64, wb: num_complex::Complex64) -> bool {
    if wa.im * wb.im < 0.0 {
        let f = wa.im / (wa.im - wb.im);
        let re_at_crossing = wa.re + f * (wb.re - wa.re);
        re_at_crossing < 0.0
    } else {
        false
    }
}

/// True when either complex radicand (r₁² or r₂²) crosses the branch cut
/// between the two states.
fn branch_crossed(model: &crate::wavefield::DisphericalModel, a: Complex3, b: Complex3) -> bool {
    let radicands = |p: Complex3| {
        let dz1 = p.z - model.z0;
        let dz2 = p.z + model.z0;
        let xy = p.x * p.x + p.y * p.y;
        (xy + dz1 * dz1, xy + dz2 * dz2)
    };
    let (wa1, wa2) = radicands(a);
    let (wb1, wb2) = radicands(b);
    segment_crosses_cut(wa1, wb1) || segment_crosses_cut(wa2, wb2)
}

/// Integrate one trajectory.
///
/// Returns the trajectory plus the screen hit if the screen was reached.
/// Field failures terminate the trajectory and are reported in its
/// `termination`; only invalid configuration (including a start at or beyond
/// the screen plane) is an `Err`.
pub fn integrate(
    model: &WaveModel,
    scheme: Scheme,
    id: u64,
    hole: Hole,
    start: Complex3,
    cfg: &IntegrationConfig,
) -> Result<(Trajectory, Option<ScreenHit>), ConfigError> {
    cfg.validate()?;
    if !start.is_finite() {
        return Err(ConfigError::new("start", "starting point must be finite"));
    }
    if start.x.re >= cfg.screen_x {
        return Err(ConfigError::new(
            "start",
            format!(
                "starting point x_r = {} is at or beyond the screen plane x = {}",
                start.x.re, cfg.screen_x
            ),
        ));
    }
    if scheme == Scheme::Dbb && !start.is_real() {
        return Err(ConfigError::new(
            "start",
            "dBB trajectories require a real starting point",
        ));
    }

    let n_steps = cfg.n_steps();
    let mut samples = vec![Sample { t: 0.0, p: start }];
    let mut p = start;
    let mut hit = None;
    let mut termination = Termination::TimeExpired;
    let mut final_state = Sample {
        t: n_steps as f64 * cfg.dt,
        p,
    };

    for k in 0..n_steps {
        let t0 = k as f64 * cfg.dt;
        let t1 = (k + 1) as f64 * cfg.dt;

        let p_next = match rk4_step(model, scheme, p, t0, cfg.dt) {
            Ok(p_next) => p_next,
            Err(e) => {
                termination = e.into();
                final_state = Sample { t: t0, p };
                break;
            }
        };
        if scheme == Scheme::Dbb {
            debug_assert!(p_next.is_real(), "dBB state left the real subspace");
        }

        if !p_next.is_finite() {
            termination = Termination::Overflow;
            final_state = Sample { t: t0, p };
            break;
        }
        if p_next.max_abs_component() > OVERFLOW_LIMIT {
            termination = Termination::Overflow;
            final_state = Sample { t: t1, p: p_next };
            break;
        }

        if scheme == Scheme::Mdbb {
            if let WaveModel::Dispherical(d) = model {
                if branch_crossed(d, p, p_next) {
                    termination = Termination::BranchCross;
                    final_state = Sample { t: t1, p: p_next };
                    break;
                }
            }
        }

        if p_next.x.re >= cfg.screen_x - SCREEN_EPS {
            let (t_hit, p_hit) = if p_next.x.re <= cfg.screen_x + SCREEN_EPS {
                (t1, p_next)
            } else {
                let f = ((cfg.screen_x - p.x.re) / (p_next.x.re - p.x.re)).clamp(0.0, 1.0);
                (t0 + f * cfg.dt, p + (p_next - p) * f)
            };
            hit = Some(ScreenHit {
                traj_id: id,
                hole,
                t_hit,
                z_r: p_hit.z.re,
                z_i: p_hit.z.im,
            });
            termination = Termination::ReachedScreen;
            final_state = Sample { t: t_hit, p: p_hit };
            break;
        }

        p = p_next;
        if (k + 1) % cfg.record_stride == 0 && k + 1 < n_steps {
            samples.push(Sample { t: t1, p });
        }
        if k + 1 == n_steps {
            final_state = Sample { t: t1, p };
        }
    }

    if samples.last().map(|s| s.t) != Some(final_state.t) {
        samples.push(final_state);
    }

    Ok((
        Trajectory {
            id,
            hole,
            scheme,
            samples,
            termination,
        },
        hit,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefield::{DisphericalModel, PacketModel};
    use num_complex::Complex64;

    fn packet_model() -> WaveModel {
        WaveModel::Packet(PacketModel::default())
    }

    fn dispherical_model() -> WaveModel {
        WaveModel::Dispherical(DisphericalModel::default())
    }

    #[test]
    fn one_step_advances_x_by_exactly_dt() {
        // The carrier velocity is the constant ħk_x/m = 1, and RK4 is exact
        // for constant fields, so x advances by exactly dt per step.
        let m = packet_model();
        let p = Complex3::real(0.0, 0.0, 7.0);
        let p1 = rk4_step(&m, Scheme::Dbb, p, 0.0, 0.01).unwrap();
        assert_eq!(p1.x.re, 0.01);
        let p2 = rk4_step(&m, Scheme::Mdbb, p, 0.0, 0.01).unwrap();
        assert_eq!(p2.x.re, 0.01);
        assert_eq!(p2.x.im, 0.0);
    }

    #[test]
    fn packet_trajectory_arrives_exactly_at_t_max() {
        // x_r(t) = t with the defaults, so the screen at x = 50 is reached
        // exactly at t = t_max = 50.
        let m = packet_model();
        let cfg = IntegrationConfig::default();
        let (traj, hit) = integrate(
            &m,
            Scheme::Dbb,
            0,
            Hole::A,
            Complex3::real(0.0, 0.0, 9.0),
            &cfg,
        )
        .unwrap();
        assert_eq!(traj.termination, Termination::ReachedScreen);
        let hit = hit.unwrap();
        assert_eq!(hit.t_hit, 50.0);
        assert_eq!(hit.z_i, 0.0);
        assert_eq!(traj.samples.last().unwrap().t, 50.0);
    }

    #[test]
    fn mid_step_crossings_are_interpolated() {
        // Start at x = 0.005: the carrier crosses x = 50 halfway through the
        // step from 49.995 to 50.005.
        let m = packet_model();
        let cfg = IntegrationConfig {
            t_max: 60.0,
            ..IntegrationConfig::default()
        };
        let (_, hit) = integrate(
            &m,
            Scheme::Dbb,
            0,
            Hole::A,
            Complex3::real(0.005, 0.0, 9.0),
            &cfg,
        )
        .unwrap();
        let hit = hit.unwrap();
        assert!((hit.t_hit - 49.995).abs() <= 1e-9, "t_hit = {}", hit.t_hit);
    }

    #[test]
    fn dbb_states_stay_exactly_real() {
        let m = dispherical_model();
        let cfg = IntegrationConfig {
            t_max: 5.0,
            ..IntegrationConfig::default()
        };
        let start = Complex3::real(1e-3 * 0.6, 0.0, 10.0 + 1e-3 * 0.8);
        let (traj, _) = integrate(&m, Scheme::Dbb, 3, Hole::A, start, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::TimeExpired);
        for s in &traj.samples {
            assert!(s.p.is_real());
        }
        assert_eq!(traj.samples.last().unwrap().t, 5.0);
    }

    #[test]
    fn mdbb_packet_keeps_x_imaginary_part_constant() {
        let m = packet_model();
        let cfg = IntegrationConfig {
            t_max: 10.0,
            ..IntegrationConfig::default()
        };
        // A start offset from the packet centre in both real and imaginary z,
        // so the early (saturated) flow (z − Z0) ∝ σ_t moves z.im visibly.
        let start = Complex3::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(13.0, 3.0),
        );
        let (traj, _) = integrate(&m, Scheme::Mdbb, 0, Hole::A, start, &cfg).unwrap();
        for s in &traj.samples {
            assert_eq!(s.p.x.im, 0.0);
            assert_eq!(s.p.y.im, 0.0);
        }
        // z really does move off the initial imaginary offset.
        let last = traj.samples.last().unwrap().p;
        assert!((last.z.im - 3.0).abs() > 1e-3);
    }

    #[test]
    fn recording_follows_the_stride() {
        let m = packet_model();
        let cfg = IntegrationConfig {
            t_max: 1.0,
            ..IntegrationConfig::default()
        };
        let (traj, _) = integrate(
            &m,
            Scheme::Dbb,
            0,
            Hole::A,
            Complex3::real(0.0, 0.0, 8.0),
            &cfg,
        )
        .unwrap();
        // t = 0.0, 0.1, ..., 1.0
        assert_eq!(traj.samples.len(), 11);
        for (i, s) in traj.samples.iter().enumerate() {
            assert!((s.t - 0.1 * i as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn start_at_or_beyond_screen_is_a_config_error() {
        let m = packet_model();
        let cfg = IntegrationConfig::default();
        for x in [50.0, 51.0] {
            let err = integrate(
                &m,
                Scheme::Dbb,
                0,
                Hole::A,
                Complex3::real(x, 0.0, 9.0),
                &cfg,
            )
            .unwrap_err();
            assert_eq!(err.key, "start");
        }
    }

    #[test]
    fn invalid_config_is_rejected_by_key() {
        let bad_dt = IntegrationConfig {
            dt: -1.0,
            ..IntegrationConfig::default()
        };
        assert_eq!(bad_dt.validate().unwrap_err().key, "dt");
        let bad_stride = IntegrationConfig {
            record_stride: 0,
            ..IntegrationConfig::default()
        };
        assert_eq!(bad_stride.validate().unwrap_err().key, "record_stride");
    }

    #[test]
    fn node_start_terminates_immediately() {
        let m = packet_model();
        let cfg = IntegrationConfig::default();
        let node = Complex3::new(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, std::f64::consts::PI / 10.0),
        );
        let (traj, hit) = integrate(&m, Scheme::Mdbb, 0, Hole::A, node, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::NodePoint);
        assert!(hit.is_none());
        assert_eq!(traj.samples.len(), 1);
    }

    #[test]
    fn runaway_coordinates_terminate_with_overflow() {
        let m = dispherical_model();
        let cfg = IntegrationConfig {
            screen_x: 2e6,
            t_max: 10.0,
            ..IntegrationConfig::default()
        };
        let start = Complex3::real(999_999.99, 0.0, 0.0);
        let (traj, hit) = integrate(&m, Scheme::Dbb, 0, Hole::A, start, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Overflow);
        assert!(hit.is_none());
    }
}
