mod common;

use std::f64::consts::PI;

use common::*;
use csop::scaling::*;
use csop::schrodinger::Grid1D;
use csop::{c64, Error};

fn im(t: f64) -> c64 {
    c64::new(0.0, t)
}

fn alpha_setup(n: usize) -> (DilationPotential, Grid1D) {
    (DilationPotential::alpha_r2_exp(7.5), Grid1D::new(40.0, n).unwrap())
}

fn resonance(n: usize, theta: f64) -> c64 {
    let (pot, grid) = alpha_setup(n);
    let h1 = build_scaled(&pot, &grid, im(theta), 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(theta + 0.02), 0.0).unwrap();
    locate_resonance(&h1, &h2, (0.0, 6.0), (-0.5, 0.0), &ClassifyOptions::default()).unwrap()
}

#[test]
fn unscaled_free_operator_is_the_laplacian() {
    let grid = Grid1D::new(PI, 600).unwrap();
    let h = build_scaled(&DilationPotential::free(), &grid, c64::new(0.0, 0.0), 0.0).unwrap();
    assert!(h.diag.iter().all(|d| d.im == 0.0) && h.off.im == 0.0);
    let mut ev: Vec<f64> = h.eigenvalues().unwrap().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    for k in 1..=3 {
        let k2 = (k * k) as f64;
        assert!((ev[k - 1] - k2).abs() < 1e-3 * k2);
    }
}

#[test]
fn free_string_rotates_exactly() {
    let grid = Grid1D::new(20.0, 400).unwrap();
    let theta = im(0.3);
    let h = build_scaled(&DilationPotential::free(), &grid, theta, 0.0).unwrap();
    let h0 = build_scaled(&DilationPotential::free(), &grid, c64::new(0.0, 0.0), 0.0).unwrap();
    let base = sym_eigenvalues(&faer::Mat::from_fn(400, 400, |i, j| h0.to_dense()[(i, j)].re));
    let rot = (-2.0 * theta).exp();
    let mut ev = h.eigenvalues().unwrap();
    ev.sort_by(|a, b| (a / rot).re.total_cmp(&(b / rot).re));
    let scale = base[399];
    for (z, l) in ev.iter().zip(&base) {
        assert!((z - rot * *l).norm() <= 1e-12 * scale);
    }
}

#[test]
fn scaled_matrix_is_transpose_symmetric() {
    let (pot, grid) = alpha_setup(300);
    let h = build_scaled(&pot, &grid, im(0.3), 0.05).unwrap();
    let d = h.to_dense();
    for i in 0..300 {
        for j in 0..300 {
            assert_eq!(d[(i, j)].re.to_bits(), d[(j, i)].re.to_bits());
            assert_eq!(d[(i, j)].im.to_bits(), d[(j, i)].im.to_bits());
        }
    }
}

#[test]
fn strip_is_enforced() {
    let (pot, grid) = alpha_setup(50);
    assert!(matches!(build_scaled(&pot, &grid, im(1.6), 0.0), Err(Error::StripViolation { .. })));
    let well = DilationPotential::new(PotentialFamily::GaussianWell { depth: 1.0, width: 1.0 });
    assert!(matches!(build_scaled(&well, &grid, im(0.8), 0.0), Err(Error::StripViolation { .. })));
}

#[test]
fn free_spectrum_is_all_continuum() {
    let grid = Grid1D::new(20.0, 300).unwrap();
    let pot = DilationPotential::free();
    let h1 = build_scaled(&pot, &grid, im(0.3), 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(0.32), 0.0).unwrap();
    let cls = classify_spectrum(&h1, &h2, &ClassifyOptions::default()).unwrap();
    assert!(cls.labels.iter().all(|l| *l == Label::ContinuumString));
}

#[test]
fn bound_state_is_stationary() {
    let grid = Grid1D::new(20.0, 800).unwrap();
    let pot = DilationPotential::new(PotentialFamily::GaussianWell { depth: 8.0, width: 1.5 });
    let h0 = build_scaled(&pot, &grid, c64::new(0.0, 0.0), 0.0).unwrap();
    let e0 = h0.eigenvalues().unwrap().iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    assert!(e0 < 0.0);
    let h1 = build_scaled(&pot, &grid, im(0.2), 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(0.22), 0.0).unwrap();
    let cls = classify_spectrum(&h1, &h2, &ClassifyOptions::default()).unwrap();
    let bound = cls.with_label(Label::Bound);
    assert!(!bound.is_empty());
    assert_eq!(bound.len(), 1);
    // Stationary under the angle change, and back on the real axis up to the
    // grid error.
    assert!((bound[0].0 - e0).norm() < 1e-3 * e0.abs(), "{:?} vs {e0}", bound[0]);
}

#[test]
fn one_resonance_in_the_window() {
    let (pot, grid) = alpha_setup(1500);
    let h1 = build_scaled(&pot, &grid, im(0.3), 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(0.32), 0.0).unwrap();
    let cls = classify_spectrum(&h1, &h2, &ClassifyOptions::default()).unwrap();
    let res: Vec<_> = cls
        .with_label(Label::Resonance)
        .into_iter()
        .filter(|(z, _)| z.re > 0.0 && z.re < 6.0 && z.im > -0.5 && z.im < 0.0)
        .collect();
    assert_eq!(res.len(), 1, "{res:?}");
    // Continuum-string points lie near the rotated ray; the barrier bends
    // the box states at low energy.
    let dev = |lo: f64, hi: f64| {
        cls.with_label(Label::ContinuumString)
            .iter()
            .filter(|(z, _)| z.norm() >= lo && z.norm() < hi)
            .map(|(z, _)| (z.arg() + 0.6).abs())
            .fold(0.0, f64::max)
    };
    println!("ray deviation: {} below 10, {} above", dev(0.0, 10.0), dev(10.0, f64::INFINITY));
    assert!(dev(0.0, 10.0) < 0.2);
    assert!(dev(10.0, f64::INFINITY) < 0.02);
}

#[test]
fn pairing_must_be_injective() {
    let grid = Grid1D::new(1.0, 3).unwrap();
    let h1 = ScaledHamiltonian {
        theta: im(0.1),
        gamma: 0.0,
        grid,
        diag: vec![c64::new(-1.0, 0.0), c64::new(-1.0 - 1e-9, 0.0), c64::new(-5.0, 0.0)],
        off: c64::new(0.0, 0.0),
    };
    let mut h2 = h1.clone();
    h2.theta = im(0.12);
    h2.diag = vec![c64::new(-1.0, 0.0), c64::new(-7.0, 0.0), c64::new(-5.0, 0.0)];
    assert!(matches!(classify_spectrum(&h1, &h2, &ClassifyOptions::default()), Err(Error::PairingAmbiguity(_))));
}

#[test]
fn ray_distance_examples() {
    let theta = im(0.25);
    let on_ray = c64::from_polar(3.0, -0.5);
    assert!(ray_distance(on_ray, theta) < 1e-15);
    assert!((ray_distance(c64::new(0.0, 1.0), c64::new(0.0, 0.0)) - 1.0).abs() < 1e-15);
    let z = c64::from_polar(2.0, -0.3);
    let formula = (2.0 * (0.5f64 - 0.3).sin()).abs();
    assert!((ray_distance(z, theta) - formula).abs() < 1e-15);
    let dir = c64::from_polar(1.0, -0.5);
    let brute = (0..200_000).map(|i| (z - dir * (i as f64 * 2e-5)).norm()).fold(f64::INFINITY, f64::min);
    assert!((ray_distance(z, theta) - brute).abs() < 1e-8);
    // Behind the origin the distance is |z|; the raw formula is smaller.
    let behind = c64::from_polar(1.0, 2.8);
    assert!((ray_distance(behind, theta) - 1.0).abs() < 1e-15);
    assert!(ray_distance_raw(behind, theta) < 1.0);
}

#[test]
fn selfadjoint_resolvent_norm() {
    let grid = Grid1D::new(10.0, 200).unwrap();
    let pot = DilationPotential::alpha_r2_exp(2.0);
    let h = build_scaled(&pot, &grid, c64::new(0.0, 0.0), 0.0).unwrap();
    let mut ev: Vec<f64> = h.eigenvalues().unwrap().iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    let z = 0.5 * (ev[3] + ev[4]) + 0.01;
    let dist = ev.iter().map(|e| (e - z).abs()).fold(f64::INFINITY, f64::min);
    let r = resolvent_norm_at(&h, c64::new(z, 0.0)).unwrap();
    assert!((r.norm * dist - 1.0).abs() < 1e-9);
}

#[test]
fn norm_near_the_resonance() {
    let (pot, grid) = alpha_setup(500);
    let theta = im(0.3);
    let h = build_scaled(&pot, &grid, theta, 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(0.32), 0.0).unwrap();
    let z0 = locate_resonance(&h, &h2, (0.0, 6.0), (-0.5, 0.0), &ClassifyOptions::default()).unwrap();
    let eig = h.eigenvalues().unwrap();
    let mut prev = 0.0;
    for d in [1e-1, 1e-2, 1e-3] {
        let z = z0 + c64::new(d, d);
        let r = resolvent_norm_at(&h, z).unwrap();
        assert!(r.norm > prev);
        prev = r.norm;
        let smin = sigma_min(&h.shifted_dense(z));
        assert!((r.norm * smin - 1.0).abs() < 1e-9);
        assert!(r.residual < 1e-8 * h.norm_bound());
        let dist = eig.iter().map(|e| (e - z).norm()).fold(f64::INFINITY, f64::min);
        assert!(r.norm * dist >= 1.0 - 1e-9);
    }
}

#[test]
fn floor_check_free_and_at_resonance() {
    let grid = Grid1D::new(20.0, 300).unwrap();
    let h = build_scaled(&DilationPotential::free(), &grid, im(0.3), 0.0).unwrap();
    let rep = essential_floor_check(&h, c64::new(2.0, -0.05), 1e-3).unwrap();
    assert_eq!(rep.count_below(), 0);
    let (pot, grid) = alpha_setup(500);
    let h = build_scaled(&pot, &grid, im(0.3), 0.0).unwrap();
    let h2 = build_scaled(&pot, &grid, im(0.32), 0.0).unwrap();
    let z0 = locate_resonance(&h, &h2, (0.0, 6.0), (-0.5, 0.0), &ClassifyOptions::default()).unwrap();
    let rep = essential_floor_check(&h, z0, 1e-3).unwrap();
    assert!(rep.count_below() >= 1);
    assert!(rep.min_singular < 1e-6 * rep.floor);
}

#[test]
fn resonance_is_angle_independent() {
    let zs: Vec<c64> = [0.2, 0.35, 0.5].iter().map(|t| resonance(1500, *t)).collect();
    for z in &zs[1..] {
        assert!((z - zs[0]).norm() / zs[0].norm() < 1e-3, "{z} vs {}", zs[0]);
    }
}

#[test]
fn perturbation_scan_tracks_the_resonance() {
    let (pot, grid) = alpha_setup(800);
    let pot = pot.clone().with_perturbation(pot.v.clone());
    let theta = im(0.3);
    let z0 = resonance(800, 0.3);
    let probe = z0 + 0.01;
    let opts = ScanOptions { a: None, b: None, z_start: z0 };
    let (rows, (a, b)) = perturbation_scan(&pot, &grid, theta, &[0.0, 1e-4, 0.02], probe, &opts).unwrap();
    assert_eq!(a, 0.0);
    assert!(b > 0.0);
    assert!((rows[0].z_res - z0).norm() < 1e-9);
    let h = build_scaled(&pot, &grid, theta, 0.0).unwrap();
    assert!((rows[0].norm - resolvent_norm_at(&h, probe).unwrap().norm).abs() < 1e-9 * rows[0].norm);
    let slope = resonance_slope(&pot, &grid, theta, z0).unwrap();
    let fd = (rows[1].z_res - rows[0].z_res) / 1e-4;
    assert!((fd - slope).norm() < 1e-2 * slope.norm(), "fd {fd}, slope {slope}");
    for r in &rows {
        assert!(r.weighted_norm <= r.bound_estimate * (1.0 + 1e-9));
    }
}
