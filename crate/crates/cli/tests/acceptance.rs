//! Acceptance gate: one test per criterion, each ending in a single
//! `criterion N: PASS` line (or a panic whose message starts with
//! `criterion N: FAIL`). Tolerances are pinned as constants next to the
//! criteria they guard.
//!
//! Criterion 3 is encoded faithfully and is KNOWN NOT TO HOLD for three of
//! the four presets (dbb-stationary passes). The arrival map of the
//! trajectory flow folds over itself, so the complex-scheme histograms
//! develop stable peak pairs straddling the wave-intensity fringes, and the
//! real packet ensemble leaves the outer fringes below the prominence
//! threshold. The mismatches survive larger ensembles and finer steps —
//! they are properties of the dynamics, not sampling or integration
//! artifacts — so the test reports them as genuine failures instead of
//! hiding them behind looser bounds.

use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twoslit::analysis::{compare, histogram, reference_density, screen_grid, which_way_report};
use twoslit::crossings::count_crossings;
use twoslit::ensemble::{run_ensemble, EnsembleResult, Scenario, ScenarioConfig, Weighting};
use twoslit::integrator::{rk4_step, Hole, Scheme};
use twoslit::point::Complex3;
use twoslit::wavefield::{DisphericalModel, PacketModel, WaveModel};

/// Histogram geometry shared by the distribution criteria.
const N_BINS: usize = 100;
const Z_MIN: f64 = -40.0;
const Z_MAX: f64 = 40.0;
const BIN_WIDTH: f64 = 0.8;
/// Absolute float guard on peak-offset comparisons (an offset of exactly
/// one bin width comes out as 0.8 + O(1e-15) in float arithmetic).
const PEAK_OFFSET_EPS: f64 = 1e-9;

/// Criterion 4: L1 distance of the ψ²-weighted complex stationary ensemble
/// at 10× size (n_per_hole = 20000), computed once by the same pipeline on
/// this machine (single-core, ~23 min) and frozen here as the
/// self-convergence yardstick.
const SELF_CONVERGED_L1: f64 = 1.663043157795;
const L1_MARGIN: f64 = 0.05;
const MAX_RUNTIME: f64 = 300.0;

/// Criterion 5 bounds.
const RATIO_LO: f64 = 12.0;
const RATIO_HI: f64 = 20.0;
const FD_TOL: f64 = 1e-6;
const RESTRICTION_TOL: f64 = 1e-12;

/// Criterion 6 bounds.
const XI_CONSTANT_TOL: f64 = 1e-12;
const MIRROR_TOL: f64 = 1e-6;

fn preset_run(scenario: Scenario) -> EnsembleResult {
    let cfg = ScenarioConfig::preset(scenario);
    let icfg = scenario.integration_preset();
    run_ensemble(&cfg, &icfg).expect("preset run")
}

/// Run a larger ensemble keeping only endpoints in memory (the
/// distribution criteria consume hits, not full paths).
fn hits_only_run(scenario: Scenario, n_per_hole: usize, weighting: Weighting) -> EnsembleResult {
    let mut cfg = ScenarioConfig::preset(scenario);
    cfg.n_per_hole = n_per_hole;
    cfg.weighting = weighting;
    let mut icfg = scenario.integration_preset();
    icfg.record_stride = 1_000_000_000;
    run_ensemble(&cfg, &icfg).expect("ensemble run")
}

#[test]
fn criterion_1_real_runs_carry_which_way_information() {
    for scenario in [Scenario::DbbPacket, Scenario::DbbStationary] {
        let r = preset_run(scenario);
        assert!(!r.hits.is_empty(), "{}: no screen hits", scenario.label());
        for h in &r.hits {
            let on_its_side = match h.hole {
                Hole::A => h.z_r > 0.0,
                Hole::B => h.z_r < 0.0,
            };
            assert!(
                on_its_side,
                "criterion 1: FAIL — {}: hole-{} hit crossed to z = {}",
                scenario.label(),
                h.hole.label(),
                h.z_r
            );
        }
        let crossings = count_crossings(&r.trajectories);
        assert_eq!(
            crossings.ab,
            0,
            "criterion 1: FAIL — {}: {} A–B path crossings",
            scenario.label(),
            crossings.ab
        );
    }
    println!(
        "criterion 1: PASS — real-path arrivals keep their hole's side and opposite-hole paths never cross"
    );
}

#[test]
fn criterion_2_complex_runs_defeat_which_way_readout() {
    for scenario in [Scenario::MdbbPacket, Scenario::MdbbStationary] {
        let r = preset_run(scenario);
        assert!(!r.hits.is_empty(), "{}: no screen hits", scenario.label());
        let report = which_way_report(&r.hits, &r.trajectories);
        assert!(
            report.range_a.is_some() && report.range_b.is_some(),
            "criterion 2: FAIL — {}: a hole produced no hits",
            scenario.label()
        );
        assert!(
            !report.separable,
            "criterion 2: FAIL — {}: arrival ranges do not overlap (a = {:?}, b = {:?})",
            scenario.label(),
            report.range_a,
            report.range_b
        );
        let c = &report.crossings;
        assert!(
            c.ab > 0 && c.aa > 0 && c.bb > 0,
            "criterion 2: FAIL — {}: path crossings ab = {}, aa = {}, bb = {}",
            scenario.label(),
            c.ab,
            c.aa,
            c.bb
        );
    }
    println!(
        "criterion 2: PASS — complex-path arrival ranges overlap and paths cross within and across holes"
    );
}

#[test]
fn criterion_3_fringe_positions_match_the_reference() {
    let mut lines = Vec::new();
    let mut failures = Vec::new();
    for scenario in [
        Scenario::DbbPacket,
        Scenario::DbbStationary,
        Scenario::MdbbPacket,
        Scenario::MdbbStationary,
    ] {
        // The criterion holds for any ensemble of at least 500 starts per
        // hole; 2000 is used because the peak readout is converged there
        // (identical peak sets from n = 1000 up), whereas at the minimum
        // size sampling noise can push straddle-pair artifacts above the
        // prominence threshold even where the converged histogram agrees
        // with the reference.
        let r = hits_only_run(scenario, 2000, Weighting::Equidistant);
        let hist = histogram(&r.hits, Z_MIN, Z_MAX, N_BINS).unwrap();
        let model = ScenarioConfig::preset(scenario).model();
        let grid = screen_grid(Z_MIN, Z_MAX, 4001);
        let t_eval = model.reference_time(50.0);
        let dref = reference_density(&model, 50.0, &grid, t_eval).unwrap();
        let report = compare(&hist, &dref).unwrap();

        // Every histogram peak must have a reference partner within one
        // bin width, and the fringe counts may differ by at most one.
        let worst_offset = report
            .peak_positions_hist
            .iter()
            .map(|p| {
                report
                    .peak_positions_ref
                    .iter()
                    .map(|q| (p - q).abs())
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0f64, f64::max);
        let n_hist = report.peak_positions_hist.len();
        let n_ref = report.peak_positions_ref.len();
        let count_diff = (n_hist as i64 - n_ref as i64).unsigned_abs();
        let ok = worst_offset <= BIN_WIDTH + PEAK_OFFSET_EPS && count_diff <= 1;
        let line = format!(
            "{}: {} hits, worst peak offset {:.3}, fringes {} vs {} reference",
            scenario.label(),
            r.hits.len(),
            worst_offset,
            n_hist,
            n_ref
        );
        if !ok {
            failures.push(line.clone());
        }
        lines.push(format!("  [{}] {}", if ok { "ok " } else { "off" }, line));
    }
    println!("{}", lines.join("\n"));
    assert!(
        failures.is_empty(),
        "criterion 3: FAIL — arrival fringes depart from the wave intensity for: {}",
        failures.join("; ")
    );
    println!(
        "criterion 3: PASS — every arrival fringe matches a wave-intensity fringe on all four presets"
    );
}

#[test]
fn criterion_4_converged_arrival_statistics() {
    let started = Instant::now();
    let r = hits_only_run(Scenario::MdbbStationary, 2000, Weighting::PsiSquared);
    assert!(
        r.hits.len() >= 100,
        "criterion 4: FAIL — only {} hits reached the screen",
        r.hits.len()
    );
    let hist = histogram(&r.hits, Z_MIN, Z_MAX, N_BINS).unwrap();
    let model = ScenarioConfig::preset(Scenario::MdbbStationary).model();
    let grid = screen_grid(Z_MIN, Z_MAX, 4001);
    let dref = reference_density(&model, 50.0, &grid, 0.0).unwrap();
    let report = compare(&hist, &dref).unwrap();
    assert!(
        report.l1_distance <= SELF_CONVERGED_L1 + L1_MARGIN,
        "criterion 4: FAIL — l1 = {} exceeds the 10×-ensemble value {} + {}",
        report.l1_distance,
        SELF_CONVERGED_L1,
        L1_MARGIN
    );
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < MAX_RUNTIME,
        "criterion 4: FAIL — run took {elapsed:.0} s (limit {MAX_RUNTIME} s)"
    );
    println!(
        "criterion 4: PASS — l1 = {:.4} within {} of the 10×-ensemble value {:.4} ({} hits, {:.0} s)",
        report.l1_distance,
        L1_MARGIN,
        SELF_CONVERGED_L1,
        r.hits.len(),
        elapsed
    );
}

/// A start on the complexified circle of radius 15 around the upper hole.
fn circle_start(theta: f64) -> Complex3 {
    Complex3::new(
        Complex64::new(0.0, 15.0 * theta.cos()),
        Complex64::new(0.0, 0.0),
        Complex64::new(10.0, 15.0 * theta.sin()),
    )
}

fn rk4_endpoint(model: &WaveModel, start: Complex3, dt: f64, t_end: f64) -> Complex3 {
    let n = (t_end / dt).round() as u64;
    let mut p = start;
    for k in 0..n {
        p = rk4_step(model, Scheme::Mdbb, p, k as f64 * dt, dt).expect("integration step");
    }
    p
}

/// Central finite difference of ψ along each coordinate's real axis.
fn fd_gradient(model: &WaveModel, p: Complex3, t: f64, h: f64) -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (axis, slot) in out.iter_mut().enumerate() {
        let mut hi = p;
        let mut lo = p;
        match axis {
            0 => {
                hi.x += h;
                lo.x -= h;
            }
            1 => {
                hi.y += h;
                lo.y -= h;
            }
            _ => {
                hi.z += h;
                lo.z -= h;
            }
        }
        *slot = (model.psi(hi, t).unwrap() - model.psi(lo, t).unwrap()) / (2.0 * h);
    }
    out
}

fn grad_rel_error(model: &WaveModel, p: Complex3, t: f64) -> f64 {
    let g = model.grad_psi(p, t).unwrap();
    let fd = fd_gradient(model, p, t, 1e-5);
    let gn = (g.x.norm_sqr() + g.y.norm_sqr() + g.z.norm_sqr()).sqrt();
    let dn =
        ((fd[0] - g.x).norm_sqr() + (fd[1] - g.y).norm_sqr() + (fd[2] - g.z).norm_sqr()).sqrt();
    dn / gn
}

#[test]
fn criterion_5_numerical_integrity() {
    // (a) Fourth-order step halving: endpoint errors against a dt/100
    // reference must contract by ~16× (allowing [12, 20]) on ten complex
    // dispherical starts. The start arc spans the right half of the
    // radius-15 circle, staying clear of the square root's branch cut
    // (where the local order degrades by design), and the horizon and step
    // are sized so truncation error dominates rounding noise.
    let dm = WaveModel::Dispherical(DisphericalModel::default());
    let (t_end, dt) = (40.0, 0.4);
    for j in 0..10 {
        let theta = -1.0 + 2.0 * j as f64 / 9.0;
        let s = circle_start(theta);
        let reference = rk4_endpoint(&dm, s, dt / 100.0, t_end);
        let e1 = rk4_endpoint(&dm, s, dt, t_end).max_abs_diff(&reference);
        let e2 = rk4_endpoint(&dm, s, dt / 2.0, t_end).max_abs_diff(&reference);
        let ratio = e1 / e2;
        assert!(
            (RATIO_LO..=RATIO_HI).contains(&ratio),
            "criterion 5: FAIL — start {j}: step-halving ratio {ratio} outside [{RATIO_LO}, {RATIO_HI}]"
        );
    }

    // (b) Analytic gradients against central finite differences at 1000
    // random complexified points for both wave models. The sample box keeps
    // every point away from the sources and the branch cut, where the
    // finite-difference probe itself would break down.
    let pm = WaveModel::Packet(PacketModel::default());
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..1000 {
        let p = Complex3::new(
            Complex64::new(rng.gen_range(12.0..60.0), rng.gen_range(-5.0..5.0)),
            Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-2.0..2.0)),
            Complex64::new(rng.gen_range(-30.0..30.0), rng.gen_range(-5.0..5.0)),
        );
        let t = rng.gen_range(0.0..50.0);
        for (model, tt) in [(&pm, t), (&dm, 0.0)] {
            let rel = grad_rel_error(model, p, tt);
            assert!(
                rel < FD_TOL,
                "criterion 5: FAIL — gradient vs finite differences: rel = {rel} at {p:?}"
            );
        }
    }

    // (c) The real-point guidance law is the restriction of the complex one
    // at 1000 random real points.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let x = rng.gen_range(1.0..60.0);
        let y = rng.gen_range(-3.0..3.0);
        let t = rng.gen_range(0.0..50.0);
        let zp = rng.gen_range(-20.0..20.0);
        let zd = rng.gen_range(-30.0..30.0);
        for (model, z, tt) in [(&pm, zp, t), (&dm, zd, 0.0)] {
            let p = Complex3::real(x, y, z);
            let v = model.mdbb_velocity(p, tt).unwrap();
            let d = model.dbb_velocity(p, tt).unwrap();
            for (real, full) in d.iter().zip([v.x.re, v.y.re, v.z.re]) {
                assert!(
                    (real - full).abs() < RESTRICTION_TOL,
                    "criterion 5: FAIL — restriction gap {} at {p:?}",
                    (real - full).abs()
                );
            }
        }
    }
    println!(
        "criterion 5: PASS — step-halving ratios in [12, 20], gradients within 1e-6 of finite differences, real law = Re(complex law) to 1e-12"
    );
}

/// Hole B's starts mirror hole A's (id j + n mirrors id j), so the hit set
/// must be even under z → −z, partner by partner.
fn check_mirror_hits(r: &EnsembleResult, label: &str) {
    let n = (r.trajectories.len() / 2) as u64;
    let a_hits: Vec<_> = r.hits.iter().filter(|h| h.hole == Hole::A).collect();
    let b_hits: Vec<_> = r.hits.iter().filter(|h| h.hole == Hole::B).collect();
    assert_eq!(
        a_hits.len(),
        b_hits.len(),
        "criterion 6: FAIL — {label}: unequal hit counts per hole"
    );
    for h in &a_hits {
        let partner = b_hits
            .iter()
            .find(|g| g.traj_id == h.traj_id + n)
            .unwrap_or_else(|| {
                panic!(
                    "criterion 6: FAIL — {label}: hit {} has no mirror partner",
                    h.traj_id
                )
            });
        assert!(
            (partner.z_r + h.z_r).abs() <= MIRROR_TOL && (partner.z_i + h.z_i).abs() <= MIRROR_TOL,
            "criterion 6: FAIL — {label}: mirror gap at id {} (z = {} + {}i vs {} + {}i)",
            h.traj_id,
            h.z_r,
            h.z_i,
            partner.z_r,
            partner.z_i
        );
    }
}

#[test]
fn criterion_6_structural_invariants() {
    // (a) Real-scheme runs never leave real space: every recorded
    // coordinate keeps an imaginary part of exactly zero.
    for scenario in [Scenario::DbbPacket, Scenario::DbbStationary] {
        let r = preset_run(scenario);
        for tr in &r.trajectories {
            for s in &tr.samples {
                assert!(
                    s.p.x.im == 0.0 && s.p.y.im == 0.0 && s.p.z.im == 0.0,
                    "criterion 6: FAIL — {}: imaginary drift in a real run",
                    scenario.label()
                );
            }
        }
        for h in &r.hits {
            assert!(
                h.z_i == 0.0,
                "criterion 6: FAIL — {}: complex arrival in a real run",
                scenario.label()
            );
        }
        check_mirror_hits(&r, scenario.label());
    }

    // (b) The complex packet's x coordinate keeps a constant imaginary part
    // (the carrier velocity is exactly real).
    let r = preset_run(Scenario::MdbbPacket);
    for tr in &r.trajectories {
        let x0 = tr.samples[0].p.x.im;
        for s in &tr.samples {
            assert!(
                (s.p.x.im - x0).abs() <= XI_CONSTANT_TOL,
                "criterion 6: FAIL — complex packet x_i drifted by {}",
                (s.p.x.im - x0).abs()
            );
        }
    }
    check_mirror_hits(&r, "mdbb-packet");

    // (c) Mirror evenness holds for the complex stationary ensemble too.
    let r = preset_run(Scenario::MdbbStationary);
    check_mirror_hits(&r, "mdbb-stationary");

    // (d) A rerun driven by a manifest reproduces every output byte.
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_twoslit");
    let out = Command::new(bin)
        .args([
            "simulate",
            "--preset",
            "dbb-stationary",
            "--n-per-hole",
            "10",
            "--out-dir",
            d1.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "first simulate run failed");
    let out = Command::new(bin)
        .args([
            "simulate",
            "--config",
            d1.path().join("manifest.txt").to_str().unwrap(),
            "--out-dir",
            d2.path().to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "manifest-driven rerun failed");
    for name in ["trajectories.csv", "hits.csv", "manifest.txt"] {
        assert_eq!(
            std::fs::read(d1.path().join(name)).unwrap(),
            std::fs::read(d2.path().join(name)).unwrap(),
            "criterion 6: FAIL — {name} differs after a manifest rerun"
        );
    }
    println!(
        "criterion 6: PASS — real runs stay real, packet x_i constant, hit sets mirror-even, manifest reruns byte-identical"
    );
}
