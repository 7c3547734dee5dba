use std::path::Path;

use faer::Mat;
use rayon::prelude::*;

use super::config::{RunConfig, Subcommand};
use super::io::{read_matrix_csv, read_potential_csv};
use super::table::ResultTable;
use crate::antilinear::{antilinear_spectrum, takagi, ComplexSymmetricMatrix, Conjugation};
use crate::decay::{bound_constant, bq_bound, critical_q, f_value, qbar_and_ebar, BoundInputs};
use crate::error::{Error, Result};
use crate::kronig_penney::{chain_decay_fit, fig1_sweep, log_spaced, Fig1Row, KPModel};
use crate::linalg::{c64, vec_norm};
use crate::random::{random_complex_symmetric, rng};
use crate::scaling::{
    build_scaled, locate_resonance, perturbation_scan, ray_distance, resolvent_norm_at, resonance_slope,
    ClassifyOptions, DilationPotential, PotentialFamily, ScanOptions,
};
use crate::schrodinger::{
    avg_resolvent_kernel_matrix, build_hamiltonian, default_separations, find_gap, projector_decay, GapOptions, Grid1D,
    PotentialSpec, ProjectorOptions,
};

/// Runs one subcommand. The table carries the full configuration (defaults
/// included) and the tolerances used as metadata.
pub fn run(cfg: &RunConfig) -> Result<ResultTable> {
    let mut table = match cfg.subcommand {
        Subcommand::Takagi => run_takagi(cfg)?,
        Subcommand::Antilinear => run_antilinear(cfg)?,
        Subcommand::DecayBound => run_decay_bound(cfg)?,
        Subcommand::KernelScan => run_kernel_scan(cfg)?,
        Subcommand::KpFig1 => run_kp_fig1(cfg)?,
        Subcommand::Resonance => run_resonance(cfg)?,
        Subcommand::ResolventMap => run_resolvent_map(cfg)?,
    };
    table.meta("subcommand", cfg.subcommand.name());
    table.meta("version", env!("CARGO_PKG_VERSION"));
    for (k, v) in cfg.entries() {
        table.meta(format!("config.{k}"), v);
    }
    Ok(table)
}

fn input_matrix(cfg: &RunConfig) -> Result<ComplexSymmetricMatrix> {
    match cfg.text("matrix") {
        Some(path) => ComplexSymmetricMatrix::new(read_matrix_csv(Path::new(path))?),
        None => {
            let n = cfg.usize("random_n").expect("checked at parse time");
            let seed = cfg.int("seed").unwrap_or(1) as u64;
            Ok(random_complex_symmetric(n, &mut rng(seed)))
        }
    }
}

/// A matrix file for `takagi` must already be symmetric; quietly averaging
/// with the transpose would hide a wrong input.
fn check_file_symmetric(cfg: &RunConfig) -> Result<()> {
    let Some(path) = cfg.text("matrix") else {
        return Ok(());
    };
    let m = read_matrix_csv(Path::new(path))?;
    if m.nrows() != m.ncols() {
        return Ok(());
    }
    let n = m.nrows();
    let fro = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| m[(i, j)].norm_sqr()).sum::<f64>().sqrt();
    let defect = (0..n)
        .flat_map(|i| (0..i).map(move |j| (i, j)))
        .map(|(i, j)| (m[(i, j)] - m[(j, i)]).norm())
        .fold(0.0, f64::max);
    let allowed = 1e-10 * fro;
    if defect > allowed {
        return Err(Error::NotCSymmetric { defect, allowed });
    }
    Ok(())
}

fn run_takagi(cfg: &RunConfig) -> Result<ResultTable> {
    check_file_symmetric(cfg)?;
    let a = input_matrix(cfg)?;
    let n = a.n();
    let f = takagi(&a)?;
    let mut cols = vec!["k".to_string(), "sigma".to_string()];
    for i in 0..n {
        cols.push(format!("u{i}_re"));
        cols.push(format!("u{i}_im"));
    }
    let mut t = ResultTable::new(cols);
    for k in 0..n {
        let mut row = vec![k as f64, f.sigma[k]];
        for i in 0..n {
            row.push(f.u[(i, k)].re);
            row.push(f.u[(i, k)].im);
        }
        t.push(row);
    }
    let r = f.reconstruct();
    let err = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| (r[(i, j)] - a.get(i, j)).norm_sqr())
        .sum::<f64>()
        .sqrt();
    t.meta("reconstruction_error_fro", format!("{err:.3e}"));
    t.meta("degenerate_clusters", f.warnings.len());
    t.meta("seed", cfg.int("seed").unwrap_or(1));
    Ok(t)
}

fn run_antilinear(cfg: &RunConfig) -> Result<ResultTable> {
    let a = match cfg.text("matrix") {
        Some(path) => read_matrix_csv(Path::new(path))?,
        None => input_matrix(cfg)?.into_inner(),
    };
    let n = a.nrows();
    let conj = match cfg.text("conjugation") {
        Some(path) => Conjugation::new(read_matrix_csv(Path::new(path))?)?,
        None => Conjugation::identity(n),
    };
    if conj.n() != n {
        return Err(Error::InvalidInput(format!("conjugation is {}x{} but the matrix is {n}x{n}", conj.n(), conj.n())));
    }
    let z = cfg.complex("shift").unwrap_or_default();
    let spec = antilinear_spectrum(a.as_ref(), &conj, z)?;
    let mut t = ResultTable::new(["k", "lambda", "residual"]);
    let shifted = Mat::from_fn(n, n, |i, j| if i == j { a[(i, j)] - z } else { a[(i, j)] });
    for (k, (lam, u)) in spec.lambdas.iter().zip(&spec.vectors).enumerate() {
        let cu = conj.apply(u);
        let r: Vec<c64> = (0..n).map(|i| (0..n).map(|j| shifted[(i, j)] * u[j]).sum::<c64>() - cu[i] * *lam).collect();
        t.push(vec![k as f64, *lam, vec_norm(&r)]);
    }
    if let Some((lmin, _)) = spec.min() {
        let norm = if lmin > 0.0 { 1.0 / lmin } else { f64::INFINITY };
        t.meta("resolvent_norm", super::table::format_float(norm));
    }
    t.meta("seed", cfg.int("seed").unwrap_or(1));
    Ok(t)
}

fn run_decay_bound(cfg: &RunConfig) -> Result<ResultTable> {
    let gap = crate::schrodinger::GapSpectrum::from_edges(cfg.float("e_minus").unwrap(), cfg.float("e_plus").unwrap())?;
    let eps = cfg.float("eps").unwrap();
    let d = cfg.int("d").unwrap() as u32;
    let energies: Vec<f64> = match cfg.float("energy") {
        Some(e) => vec![e],
        None => {
            let m = cfg.usize("points").unwrap();
            (1..=m).map(|i| gap.e_minus + gap.g() * i as f64 / (m + 1) as f64).collect()
        }
    };
    let single = energies.len() == 1;
    let mut t = ResultTable::new(["E", "q", "q_c", "F", "C", "bq_bound", "valid"]);
    for e in energies {
        let q_c = critical_q(&gap, e)?;
        let q = cfg.float("q").unwrap_or(cfg.float("q_fraction").unwrap() * q_c);
        let inputs = BoundInputs { gap, e, q, eps, d };
        inputs.validate()?;
        let (c, valid) = match bound_constant(&inputs) {
            Ok(b) => (b.c_value, b.valid),
            Err(err @ (Error::QBeyondCritical { .. } | Error::ShiftLeavesGap { .. })) => {
                if single {
                    return Err(err);
                }
                (f64::INFINITY, false)
            }
            Err(err) => return Err(err),
        };
        t.push(vec![e, q, q_c, f_value(&gap, q, e), c, bq_bound(&gap, q, e), if valid { 1.0 } else { 0.0 }]);
    }
    let qe = qbar_and_ebar(&gap)?;
    t.meta("q_bar_bound", super::table::format_float(qe.q_bar_bound));
    t.meta("e_bar", super::table::format_float(qe.e_bar));
    t.meta("tolerance.critical_q", "1e-13");
    Ok(t)
}

fn run_kernel_scan(cfg: &RunConfig) -> Result<ResultTable> {
    let n = cfg.usize("n").unwrap();
    let (grid, pot, hint) = match cfg.text("potential") {
        Some(path) => {
            let sampled = read_potential_csv(Path::new(path))?;
            let grid = Grid1D::new(cfg.float("length").unwrap(), n)?;
            let pot = PotentialSpec::from_fn(&grid, |x| sampled.eval(x));
            (grid, pot, cfg.usize("band_count"))
        }
        None => {
            let cells = cfg.usize("cells").unwrap();
            let grid = Grid1D::new(cells as f64, n)?;
            let positions = (1..cells).map(|c| c as f64).collect();
            let pot = PotentialSpec::DeltaComb { positions, v0: cfg.float("v0").unwrap() };
            (grid, pot, Some(cfg.usize("band_count").unwrap_or(cells)))
        }
    };
    let h = build_hamiltonian(&grid, &pot)?;
    let gap = find_gap(&h, hint, &GapOptions::default())?;
    let qe = qbar_and_ebar(&gap)?;
    let e = match cfg.float("energy") {
        Some(e) => e,
        None if qe.e_bar_in_gap => qe.e_bar,
        None => 0.5 * (gap.e_minus + gap.e_plus),
    };
    let eps = cfg.float("eps").unwrap();
    let q_c = critical_q(&gap, e)?;
    let q = cfg.float("q_fraction").unwrap() * q_c;
    let bound = bound_constant(&BoundInputs { gap, e, q, eps, d: 1 })?;

    let margin = cfg.float("margin").unwrap().max(eps);
    let spacing = cfg.float("spacing").unwrap();
    let length = grid.length();
    let points: Vec<f64> =
        (0..).map(|i| margin + spacing * i as f64).take_while(|x| *x <= length - margin + 1e-12).collect();
    let kernel = avg_resolvent_kernel_matrix(&h, c64::new(e, 0.0), &points, eps)?;
    let mut t = ResultTable::new(["x1", "x2", "separation", "G_re", "G_im", "G_abs", "envelope"]);
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let g = kernel[a][b];
            let s = points[b] - points[a];
            t.push(vec![points[a], points[b], s, g.re, g.im, g.norm(), bound.c_value * (-q * s).exp()]);
        }
    }
    let fit = projector_decay(&h, &gap, eps, &default_separations(length), &ProjectorOptions::default());
    match fit {
        Ok(f) => t.meta("projector_q_fit", super::table::format_float(f.q_fit)),
        Err(err) => t.meta("projector_q_fit", format!("unavailable ({err})")),
    };
    let fmt = super::table::format_float;
    t.meta("gap.e_bottom", fmt(gap.e_bottom));
    t.meta("gap.e_minus", fmt(gap.e_minus));
    t.meta("gap.e_plus", fmt(gap.e_plus));
    t.meta("energy", fmt(e));
    t.meta("q", fmt(q));
    t.meta("q_c", fmt(q_c));
    t.meta("C", fmt(bound.c_value));
    t.meta("q_bar_bound", fmt(qe.q_bar_bound));
    t.meta("grid.h", fmt(grid.h()));
    Ok(t)
}

fn run_kp_fig1(cfg: &RunConfig) -> Result<ResultTable> {
    let v0s = log_spaced(cfg.float("v0_min").unwrap(), cfg.float("v0_max").unwrap(), cfg.usize("points").unwrap());
    let rows = fig1_sweep(&v0s)?;
    let mut t = ResultTable::new(Fig1Row::COLUMNS);
    for r in &rows {
        t.push(r.values().to_vec());
    }
    if cfg.bool("cross_check").unwrap() {
        let ppc = cfg.usize("points_per_cell").unwrap();
        let fits: Vec<f64> = v0s
            .par_iter()
            .map(|&v0| chain_decay_fit(&KPModel::new(v0)?, ppc).map(|f| f.q_fit))
            .collect::<Result<_>>()?;
        let mut worst: f64 = 0.0;
        for (i, (r, q_fit)) in rows.iter().zip(&fits).enumerate() {
            let dev = (q_fit - r.q_exact).abs() / r.q_exact;
            worst = worst.max(dev);
            t.meta(format!("cross_check.{i:02}.q_fit"), super::table::format_float(*q_fit));
        }
        t.meta("cross_check.max_rel_dev", super::table::format_float(worst));
    }
    t.meta("tolerance.bisection", "1e-14 relative");
    Ok(t)
}

fn dilation_potential(cfg: &RunConfig) -> DilationPotential {
    let alpha = cfg.float("alpha").unwrap();
    let v = PotentialFamily::AlphaR2Exp { alpha };
    let w = match cfg.text("perturbation") {
        Some("gaussian") => PotentialFamily::GaussianWell { depth: 1.0, width: 1.0 },
        _ => v.clone(),
    };
    DilationPotential::new(v).with_perturbation(w)
}

fn run_resonance(cfg: &RunConfig) -> Result<ResultTable> {
    let pot = dilation_potential(cfg);
    let grid = Grid1D::new(cfg.float("length").unwrap(), cfg.usize("n").unwrap())?;
    let theta = c64::new(0.0, cfg.float("theta_im").unwrap());
    let dtheta = c64::new(0.0, cfg.float("dtheta_im").unwrap());
    let h1 = build_scaled(&pot, &grid, theta, 0.0)?;
    let h2 = build_scaled(&pot, &grid, theta + dtheta, 0.0)?;
    let rw = cfg.list("re_window").unwrap();
    let iw = cfg.list("im_window").unwrap();
    let z0 = locate_resonance(&h1, &h2, (rw[0], rw[1]), (iw[0], iw[1]), &ClassifyOptions::default())?;
    let z_probe = cfg.complex("z_probe").unwrap_or(z0 + 0.01);
    let opts = ScanOptions { a: cfg.float("a"), b: cfg.float("b"), z_start: z0 };
    let (rows, (a, b)) = perturbation_scan(&pot, &grid, theta, cfg.list("gammas").unwrap(), z_probe, &opts)?;
    let slope = resonance_slope(&pot, &grid, theta, z0)?;
    let mut t = ResultTable::new(["gamma", "z_re", "z_im", "norm", "weighted_norm", "bound_estimate"]);
    for r in rows {
        t.push(vec![r.gamma, r.z_res.re, r.z_res.im, r.norm, r.weighted_norm, r.bound_estimate]);
    }
    let fmt = super::table::format_float;
    t.meta("resonance_re", fmt(z0.re));
    t.meta("resonance_im", fmt(z0.im));
    t.meta("slope_re", fmt(slope.re));
    t.meta("slope_im", fmt(slope.im));
    t.meta("z_probe", format!("{}, {}", fmt(z_probe.re), fmt(z_probe.im)));
    t.meta("floor", fmt(ray_distance(z_probe, theta)));
    t.meta("a", fmt(a));
    t.meta("b", fmt(b));
    t.meta("tolerance.minpair", "1e-12");
    t.meta("tolerance.polish", "1e-10");
    Ok(t)
}

fn run_resolvent_map(cfg: &RunConfig) -> Result<ResultTable> {
    let pot = dilation_potential(cfg);
    let grid = Grid1D::new(cfg.float("length").unwrap(), cfg.usize("n").unwrap())?;
    let theta = c64::new(0.0, cfg.float("theta_im").unwrap());
    let h = build_scaled(&pot, &grid, theta, cfg.float("gamma").unwrap())?;
    let (nre, nim) = (cfg.usize("nre").unwrap(), cfg.usize("nim").unwrap());
    let axis =
        |lo: f64, hi: f64, m: usize, i: usize| if m == 1 { lo } else { lo + (hi - lo) * i as f64 / (m - 1) as f64 };
    let (re0, re1) = (cfg.float("re_min").unwrap(), cfg.float("re_max").unwrap());
    let (im0, im1) = (cfg.float("im_min").unwrap(), cfg.float("im_max").unwrap());
    let zs: Vec<c64> = (0..nim)
        .flat_map(|j| (0..nre).map(move |i| (i, j)))
        .map(|(i, j)| c64::new(axis(re0, re1, nre, i), axis(im0, im1, nim, j)))
        .collect();
    let norms: Vec<f64> = zs
        .par_iter()
        .map(|&z| match resolvent_norm_at(&h, z) {
            Ok(r) => Ok(r.norm),
            Err(Error::SingularShift { .. }) => Ok(f64::INFINITY),
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;
    let mut t = ResultTable::new(["z_re", "z_im", "norm", "floor"]);
    for (z, norm) in zs.iter().zip(norms) {
        t.push(vec![z.re, z.im, norm, ray_distance(*z, theta)]);
    }
    t.meta("tolerance.minpair", "1e-12");
    t.meta("grid.h", super::table::format_float(grid.h()));
    Ok(t)
}
