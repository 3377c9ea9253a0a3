//! Property tests for the structural invariants: mirror symmetry of the
//! wave and velocity fields, restriction of the complex law to real points,
//! and mass/count conservation in the screen statistics.

use num_complex::Complex64;
use proptest::prelude::*;
use twoslit::analysis::{bin_average, histogram, screen_grid};
use twoslit::integrator::{Hole, ScreenHit};
use twoslit::point::Complex3;
use twoslit::wavefield::{DisphericalModel, PacketModel, WaveModel};

fn models() -> [WaveModel; 2] {
    [
        WaveModel::Packet(PacketModel::default()),
        WaveModel::Dispherical(DisphericalModel::default()),
    ]
}

/// Random complexified point kept away from the screen-far region and the
/// source singularities' immediate neighborhood (field errors are tolerated
/// and skipped where they occur).
fn complex_point() -> impl Strategy<Value = Complex3> {
    (
        1.0..60.0f64,
        -5.0..5.0f64,
        -3.0..3.0f64,
        -2.0..2.0f64,
        -30.0..30.0f64,
        -5.0..5.0f64,
    )
        .prop_map(|(xr, xi, yr, yi, zr, zi)| {
            Complex3::new(
                Complex64::new(xr, xi),
                Complex64::new(yr, yi),
                Complex64::new(zr, zi),
            )
        })
}

fn real_point() -> impl Strategy<Value = Complex3> {
    (1.0..60.0f64, -3.0..3.0f64, -30.0..30.0f64)
        .prop_map(|(x, y, z)| Complex3::real(x, y, z))
}

proptest! {
    /// ψ is exactly even under z → −z: the mirror swaps the two additive
    /// source terms, and float addition commutes, so the values (or the
    /// errors) are bitwise identical.
    #[test]
    fn psi_is_bitwise_even_under_the_mirror(p in complex_point(), t in 0.0..50.0f64) {
        for model in models() {
            prop_assert_eq!(model.psi(p, t), model.psi(p.mirror_z(), t));
        }
    }

    /// The real-point law is the real part of the complex law, component
    /// by component, exactly.
    #[test]
    fn real_velocity_restricts_the_complex_law(p in real_point(), t in 0.0..50.0f64) {
        for model in models() {
            let full = model.mdbb_velocity(p, t);
            let real = model.dbb_velocity(p, t);
            match (full, real) {
                (Ok(v), Ok(r)) => {
                    prop_assert_eq!(r, [v.x.re, v.y.re, v.z.re]);
                }
                (Err(a), Err(b)) => prop_assert_eq!(a, b),
                (a, b) => prop_assert!(false, "mismatched outcomes {:?} vs {:?}", a, b),
            }
        }
    }

    /// The packet's carrier fixes the x velocity at exactly ħk_x/m
    /// everywhere the field is defined, even at complex points.
    #[test]
    fn packet_velocity_keeps_the_carrier_x_component(p in complex_point(), t in 0.0..50.0f64) {
        let m = PacketModel::default();
        if let Ok(v) = m.mdbb_velocity(p, t) {
            prop_assert_eq!(v.x, Complex64::new(m.hbar_over_m * m.kx, 0.0));
        }
    }

    /// Both waves are even in y, so motion started in the y = 0 plane
    /// never leaves it: the y velocity vanishes identically there.
    #[test]
    fn velocity_stays_in_the_symmetry_plane(
        xr in 1.0..60.0f64, xi in -5.0..5.0f64,
        zr in -30.0..30.0f64, zi in -5.0..5.0f64,
        t in 0.0..50.0f64,
    ) {
        let p = Complex3::new(
            Complex64::new(xr, xi),
            Complex64::new(0.0, 0.0),
            Complex64::new(zr, zi),
        );
        for model in models() {
            if let Ok(v) = model.mdbb_velocity(p, t) {
                prop_assert_eq!(v.y, Complex64::new(0.0, 0.0));
            }
        }
    }

    /// Mirroring z → −z flips the sign of the z velocity and preserves the
    /// x velocity. Not bitwise (the dispherical evaluation factors out
    /// whichever source term dominates, and the mirror swaps that choice),
    /// so compare with a tolerance scaled to the velocity magnitude.
    #[test]
    fn mirror_reverses_the_z_velocity(p in complex_point(), t in 0.0..50.0f64) {
        for model in models() {
            if let (Ok(v), Ok(w)) = (model.mdbb_velocity(p, t), model.mdbb_velocity(p.mirror_z(), t)) {
                let scale = 1.0f64
                    .max(v.max_abs_component())
                    .max(w.max_abs_component());
                prop_assert!((w.z + v.z).norm() <= 1e-10 * scale,
                    "v_z {} vs mirrored {}", v.z, w.z);
                prop_assert!((w.x - v.x).norm() <= 1e-10 * scale,
                    "v_x {} vs mirrored {}", v.x, w.x);
            }
        }
    }

    /// Histogramming loses nothing: every hit is either in a bin or
    /// counted out-of-window, and the normalized density integrates to 1.
    #[test]
    fn histogram_conserves_counts_and_mass(
        zs in prop::collection::vec((-60.0..60.0f64, any::<bool>()), 0..200),
        n_bins in 5usize..150,
    ) {
        let hits: Vec<ScreenHit> = zs
            .iter()
            .enumerate()
            .map(|(i, (z, a))| ScreenHit {
                traj_id: i as u64,
                hole: if *a { Hole::A } else { Hole::B },
                t_hit: 1.0,
                z_r: *z,
                z_i: 0.0,
            })
            .collect();
        let h = histogram(&hits, -40.0, 40.0, n_bins).unwrap();
        prop_assert_eq!(h.in_window() + h.out_of_window, hits.len() as u64);
        let mass: f64 = h.density.iter().sum::<f64>() * h.bin_width();
        if h.normalized {
            prop_assert!((mass - 1.0).abs() <= 1e-9, "mass = {}", mass);
        } else {
            prop_assert_eq!(h.in_window(), 0);
            prop_assert_eq!(mass, 0.0);
        }
    }

    /// Averaging a piecewise-linear function over bins is exact: the bin
    /// averages times the bin widths sum back to the trapezoid integral.
    #[test]
    fn bin_average_preserves_the_integral(
        values in prop::collection::vec(0.0..10.0f64, 51..220),
        n_bins in 1usize..120,
    ) {
        let grid = screen_grid(-40.0, 40.0, values.len());
        let edges: Vec<f64> = (0..=n_bins)
            .map(|j| -40.0 + 80.0 * j as f64 / n_bins as f64)
            .collect();
        let avg = bin_average(&grid, &values, &edges);
        let binned: f64 = avg
            .iter()
            .zip(edges.windows(2))
            .map(|(a, e)| a * (e[1] - e[0]))
            .sum();
        let mut trapz = 0.0;
        for i in 1..grid.len() {
            trapz += 0.5 * (values[i - 1] + values[i]) * (grid[i] - grid[i - 1]);
        }
        prop_assert!((binned - trapz).abs() <= 1e-9 * (1.0 + trapz.abs()),
            "binned {} vs trapezoid {}", binned, trapz);
    }
}
