//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use bsshell_core::analysis::{
    estimate_coercivity, estimate_constants, estimate_equivalence_constant, estimate_korn_constant,
    expansion_check, linear_response, quartic_line_check, realized_korn_check,
    scale_for_uniqueness_ratio, threshold_report, uniqueness_probe, ConstantOptions, EigenMethod,
};
use bsshell_core::forces::{scale_to_magnitude, special_force, MagnitudeTarget};
use bsshell_core::geometry::{evaluate_frame, pointwise_coercivity};
use bsshell_core::kinematics::{
    compute_gamma, compute_gbs, compute_phi, compute_rho, compute_rho_bs,
};
use bsshell_core::solver::{minimize, random_field};
use bsshell_core::{Chart, ForceField, Mesh, Problem, SolverOptions, Space, SpecialForceSpec};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

const QUAD_ORDER: usize = 4;

fn ensure(ok: bool, detail: String) -> Result<String, String> {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("error: {e:?}")
}

fn space(chart: &Chart, n: usize) -> Result<Space, String> {
    Space::build(Mesh::new(chart.domain, n, n).map_err(err)?, QUAD_ORDER).map_err(err)
}

fn cylinder_problem(amplitude: f64) -> Result<Problem, String> {
    let chart = Chart::cylinder(2.0).map_err(err)?;
    let force = special_force(
        SpecialForceSpec::default_for(&chart.domain, amplitude),
        &chart.domain,
    )
    .map_err(err)?;
    Problem::new(chart, unit_material(0.01), space(&chart, 8)?, force).map_err(err)
}

/// Cylinder problem whose special force puts the uniqueness diagnostic at 1/2.
fn small_load_problem() -> Result<(Problem, f64, f64), String> {
    let base = cylinder_problem(1.0)?;
    let constants = estimate_constants(&base, &ConstantOptions::default())
        .map_err(err)?
        .as_set();
    let factor = scale_for_uniqueness_ratio(&base, &constants, 0.5).map_err(err)?;
    let problem = base.with_force(base.force.scaled(factor));
    let ratio = threshold_report(&problem, &constants, None)
        .map_err(err)?
        .uniqueness_ratio;
    Ok((problem, factor, ratio))
}

/// `grad_tol = min(10⁻⁸, 10⁻⁹ ‖∇J(0)‖∞)` so the tiny load is resolved.
fn small_load_options(problem: &Problem) -> Result<SolverOptions, String> {
    let g0 = problem
        .gradient(&problem.zero_field())
        .map_err(err)?
        .iter()
        .fold(0.0, |m: f64, g| m.max(g.abs()));
    Ok(SolverOptions {
        grad_tol: (1e-9 * g0).min(1e-8),
        max_iters: 50_000,
        ..SolverOptions::default()
    })
}

fn ac1() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_fd, mut worst_chr): (f64, f64) = (0.0, 0.0);
    let material = unit_material(0.01);
    for chart in charts() {
        for _ in 0..200 {
            let y = interior_point(&mut rng, &chart.domain, 1e-3);
            let c = frame_fd_check(&chart, &material, y, 1e-5);
            worst_fd = worst_fd
                .max(c.first_order)
                .max(c.second_order)
                .max(c.third_order);
            let frame = evaluate_frame(&chart, &material, y).map_err(err)?;
            worst_chr = worst_chr.max(christoffel_metric_residual(&frame, &chart));
        }
    }
    ensure(
        worst_fd <= 1e-5 && worst_chr <= 1e-10,
        format!("finite-difference {worst_fd:.2e} (tol 1e-5), Christoffel formula {worst_chr:.2e} (tol 1e-10)"),
    )
}

fn ac2() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut min_ce = f64::INFINITY;
    let mut plate_ce = f64::NAN;
    let mut violations = 0usize;
    for chart in charts() {
        let problem = Problem::new(
            chart,
            unit_material(0.01),
            space(&chart, 8)?,
            ForceField::zero(),
        )
        .map_err(err)?;
        let ce = estimate_coercivity(&problem).map_err(err)?.value;
        min_ce = min_ce.min(ce);
        if chart == Chart::plate() {
            plate_ce = ce;
        }
    }
    let material = unit_material(0.01);
    for i in 0..100_000 {
        let chart = charts()[i % 4];
        let y = interior_point(&mut rng, &chart.domain, 0.0);
        let frame = evaluate_frame(&chart, &material, y).map_err(err)?;
        let ce = pointwise_coercivity(&frame);
        let t = random_symmetric(&mut rng);
        let norm2: f64 = t.iter().flatten().map(|v| v * v).sum();
        if elastic_form(&frame.a_upper, &material, &t) < ce * norm2 * (1.0 - 1e-12) {
            violations += 1;
        }
    }
    ensure(
        min_ce > 0.0 && (plate_ce - 4.0).abs() <= 1e-10 && violations == 0,
        format!("min c_e {min_ce:.4}, plate c_e {plate_ce:.12}, violations {violations}/100000"),
    )
}

fn ac3() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let chart = Chart::plate();
    let material = unit_material(0.01);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let y = interior_point(&mut rng, &chart.domain, 0.0);
        let frame = evaluate_frame(&chart, &material, y).map_err(err)?;
        let jet = random_jet(&mut rng, 1.0);
        let d = &jet.d_eta;
        let mut sym = [[0.0; 2]; 2];
        let mut vk = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                sym[a][b] = 0.5 * (d[a][b] + d[b][a]);
                vk[a][b] = sym[a][b] + 0.5 * d[2][a] * d[2][b];
            }
        }
        let phi = compute_phi(&frame, &jet);
        worst = worst
            .max(mat_diff(&compute_gamma(&frame, &jet), &sym))
            .max((phi[0] - d[2][0]).abs())
            .max((phi[1] - d[2][1]).abs())
            .max(mat_diff(&compute_rho(&frame, &jet), &jet.dd_eta3))
            .max(mat_diff(&compute_rho_bs(&frame, &jet), &jet.dd_eta3))
            .max(mat_diff(&compute_gbs(&frame, &jet), &vk));
    }
    ensure(
        worst <= 1e-12,
        format!("worst deviation {worst:.2e} over 1000 jets (tol 1e-12)"),
    )
}

fn ac4() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let material = unit_material(0.01);
    let mut worst: f64 = 0.0;
    for chart in charts() {
        for _ in 0..1000 {
            let y = interior_point(&mut rng, &chart.domain, 0.0);
            let f = evaluate_frame(&chart, &material, y).map_err(err)?;
            let jet = random_jet(&mut rng, 1.0);
            // φ_α = ∂_α η₃ − b^σ_α η_σ and its partial derivatives, written out
            let mut phi = [0.0; 2];
            let mut dphi = [[0.0; 2]; 2];
            for a in 0..2 {
                phi[a] = jet.d_eta[2][a];
                for s in 0..2 {
                    phi[a] -= f.b_mixed[s][a] * jet.eta[s];
                }
                for b in 0..2 {
                    dphi[a][b] = jet.dd_eta3[a][b];
                    for s in 0..2 {
                        dphi[a][b] -=
                            f.db_mixed[b][s][a] * jet.eta[s] + f.b_mixed[s][a] * jet.d_eta[s][b];
                    }
                }
            }
            let mut half_cov = [[0.0; 2]; 2];
            for a in 0..2 {
                for b in 0..2 {
                    let mut v = dphi[a][b] + dphi[b][a];
                    for s in 0..2 {
                        v -= 2.0 * f.christoffel[s][a][b] * phi[s];
                    }
                    half_cov[a][b] = 0.5 * v;
                }
            }
            let rho = compute_rho_bs(&f, &jet);
            worst = worst.max(mat_diff(&rho, &half_cov) / (1.0 + max_abs(&rho)));
        }
    }
    ensure(
        worst <= 1e-10,
        format!("worst deviation {worst:.2e} over 4x1000 pairs (tol 1e-10)"),
    )
}

fn ac5() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for (i, chart) in [Chart::plate(), Chart::cylinder(2.0).map_err(err)?]
        .into_iter()
        .enumerate()
    {
        let force = special_force(
            SpecialForceSpec::default_for(&chart.domain, 1.0),
            &chart.domain,
        )
        .map_err(err)?;
        let problem =
            Problem::new(chart, unit_material(0.01), space(&chart, 8)?, force).map_err(err)?;
        let field = random_field(&problem, 0.5, 50 + i as u64);
        let grad = problem.gradient(&field).map_err(err)?;
        let h = 1e-3;
        let mut x = field.coeffs.clone();
        for (k, &g) in grad.iter().enumerate() {
            if g.abs() <= 1e-8 {
                continue;
            }
            let x0 = x[k];
            let fd = central_difference_4(
                |t| {
                    x[k] = x0 + t;
                    problem
                        .energy_coeffs(&x)
                        .map(|e| e.total)
                        .unwrap_or(f64::NAN)
                },
                h,
            );
            x[k] = x0;
            worst = worst.max((fd - g).abs() / g.abs());
            checked += 1;
        }
    }
    ensure(
        worst <= 1e-6,
        format!("worst relative error {worst:.2e} over {checked} coefficients (tol 1e-6)"),
    )
}

fn ac6() -> Result<String, String> {
    let problem = cylinder_problem(1.0)?;
    let (mut worst, mut doubled_best): (f64, f64) = (0.0, f64::INFINITY);
    for i in 0..20u64 {
        let eta_f = random_field(&problem, 1.0, 600 + 2 * i);
        let zeta = random_field(&problem, 1.0, 601 + 2 * i);
        let r = expansion_check(&problem, &eta_f, &zeta).map_err(err)?;
        worst = worst.max(r.residual);
        doubled_best = doubled_best.min(r.doubled_residual);
    }
    ensure(
        worst <= 1e-10,
        format!("worst residual {worst:.2e} (tol 1e-10); doubled cross coefficients give >= {doubled_best:.2e}"),
    )
}

fn ac7() -> Result<String, String> {
    let (problem, factor, ratio) = small_load_problem()?;
    let opts = small_load_options(&problem)?;
    let r = minimize(&problem, &problem.zero_field(), &opts).map_err(err)?;
    ensure(
        r.converged && r.grad_inf <= 1e-8 && r.energy.total <= 0.0 && r.x0_norm > 0.0,
        format!(
            "k {factor:.3e} (uniqueness ratio {ratio:.2}), {} iterations, grad_inf {:.2e}, J {:.3e}, |eta|_X0 {:.3e}",
            r.iterations, r.grad_inf, r.energy.total, r.x0_norm
        ),
    )
}

fn ac8() -> Result<String, String> {
    let (problem, _, ratio) = small_load_problem()?;
    let opts = SolverOptions {
        grad_tol: 1e-14,
        max_iters: 200_000,
        seed: 8,
        ..SolverOptions::default()
    };
    let report = uniqueness_probe(&problem, 4, &[0.1, 1.0], &opts).map_err(err)?;
    ensure(
        report.converged_runs == report.total_runs && report.dispersion <= 1e-6,
        format!(
            "ratio {ratio:.2}, {}/{} runs converged, dispersion {:.2e} (tol 1e-6)",
            report.converged_runs, report.total_runs, report.dispersion
        ),
    )
}

fn ac9() -> Result<String, String> {
    let material = unit_material(0.01);
    let mut lines = Vec::new();
    let mut ok = true;
    for chart in charts() {
        let m8 = Mesh::new(chart.domain, 8, 8).map_err(err)?;
        let m16 = Mesh::new(chart.domain, 16, 16).map_err(err)?;
        let k8 = estimate_korn_constant(&chart, &m8, &material, QUAD_ORDER, EigenMethod::Auto)
            .map_err(err)?;
        let e8 =
            estimate_equivalence_constant(&chart, &m8, &material, QUAD_ORDER, EigenMethod::Auto)
                .map_err(err)?;
        let k16 = estimate_korn_constant(&chart, &m16, &material, QUAD_ORDER, EigenMethod::Auto)
            .map_err(err)?;
        let drift = (k16.value - k8.value).abs() / k8.value;
        let check =
            realized_korn_check(&chart, &material, &space(&chart, 8)?, &k8, 100, 9).map_err(err)?;
        ok &= k8.lambda_min > 1e-8 && e8.lambda_min > 1e-8 && drift <= 0.2 && check.holds;
        lines.push(format!(
            "{}: lambda_korn {:.3e}, lambda_equiv {:.3e}, C_S drift {:.1}%, realized ratio {:.3} <= {:.3}",
            chart.kind.name(),
            k8.lambda_min,
            e8.lambda_min,
            100.0 * drift,
            check.worst_ratio,
            check.bound
        ));
    }
    ensure(ok, lines.join("; "))
}

fn ac10() -> Result<String, String> {
    let chart = Chart::cylinder(2.0).map_err(err)?;
    let material = unit_material(0.01);
    let sp = space(&chart, 8)?;
    let frames = sp.frames(&chart, &material).map_err(err)?;
    // independent quadrature: 32×32 mesh, order 8
    let fine = Space::build(Mesh::new(chart.domain, 32, 32).map_err(err)?, 8).map_err(err)?;
    let fine_frames = fine.frames(&chart, &material).map_err(err)?;
    let spec = SpecialForceSpec::default_for(&chart.domain, 1.0);

    let big = scale_to_magnitude(
        spec,
        &chart.domain,
        &sp,
        &frames,
        MagnitudeTarget::AtLeast(1e6),
    )
    .map_err(err)?;
    let small = scale_to_magnitude(
        spec,
        &chart.domain,
        &sp,
        &frames,
        MagnitudeTarget::AtMost(1e-9),
    )
    .map_err(err)?;
    let big_fine = special_force(big.spec, &chart.domain)
        .map_err(err)?
        .sum_norm(&fine, &fine_frames);
    let small_fine = special_force(small.spec, &chart.domain)
        .map_err(err)?
        .sum_norm(&fine, &fine_frames);

    let n1 = special_force(spec, &chart.domain)
        .map_err(err)?
        .component_norms(&sp, &frames);
    let mut linear: f64 = 0.0;
    for k in [-1.0, 3.7, -250.0, 1e-4] {
        let s = SpecialForceSpec {
            amplitude: k,
            ..spec
        };
        let nk = special_force(s, &chart.domain)
            .map_err(err)?
            .component_norms(&sp, &frames);
        for i in 0..3 {
            linear = linear.max((nk[i] - k.abs() * n1[i]).abs() / (k.abs() * n1[i]).max(1e-300));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let force = special_force(spec, &chart.domain).map_err(err)?;
    let mut leaks = 0usize;
    for _ in 0..1000 {
        let y = interior_point(&mut rng, &chart.domain, 0.0);
        let dist = ((y[0] - spec.center[0]).powi(2) + (y[1] - spec.center[1]).powi(2)).sqrt();
        if dist >= spec.support_radius() {
            let frame = evaluate_frame(&chart, &material, y).map_err(err)?;
            if force.eval(y, &frame) != [0.0; 3] {
                leaks += 1;
            }
        }
    }
    let near_edge = SpecialForceSpec {
        center: [0.1, 0.5],
        ..spec
    };
    let rejected =
        spec.validate(&chart.domain).is_ok() && near_edge.validate(&chart.domain).is_err();

    ensure(
        big.achieved_sum_norm > 1e6
            && big_fine > 1e6
            && small.achieved_sum_norm < 1e-9
            && small_fine < 1e-9
            && linear <= 1e-12
            && leaks == 0
            && rejected,
        format!(
            "large {:.4e} (refined {big_fine:.4e}), small {:.4e} (refined {small_fine:.4e}), linearity {linear:.1e}, \
             support leaks {leaks}, boundary rejection {rejected}",
            big.achieved_sum_norm, small.achieved_sum_norm
        ),
    )
}

fn ac11() -> Result<String, String> {
    let (problem, _, _) = small_load_problem()?;
    let opts = SolverOptions {
        max_iters: 50_000,
        ..SolverOptions::default()
    };
    let r = linear_response(&problem, &problem.force, [1e-3, 1e-4], 1e-9, &opts).map_err(err)?;
    let ok = r.results.iter().all(|x| x.converged)
        && r.x0_drift < 0.05
        && r.gbs_drift < 0.05
        && r.rhobs_drift < 0.05;
    ensure(
        ok,
        format!(
            "|eta|/s {:.4e} vs {:.4e}: drift {:.2e}; G^BS drift {:.2e}; rho^BS drift {:.2e} (tol 5%)",
            r.x0_per_scale[0], r.x0_per_scale[1], r.x0_drift, r.gbs_drift, r.rhobs_drift
        ),
    )
}

fn ac12() -> Result<String, String> {
    let problem = cylinder_problem(1.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let eta = random_field(&problem, 1.0, rng.random());
        let zeta = random_field(&problem, 1.0, rng.random());
        let r = quartic_line_check(&problem, &eta, &zeta, [-1.0, -0.5, 0.0, 0.5, 1.0], 1.7)
            .map_err(err)?;
        worst = worst.max(r.relative_error);
    }
    ensure(
        worst <= 1e-9,
        format!("worst relative error {worst:.2e} (tol 1e-9)"),
    )
}

fn main() -> ExitCode {
    let checks: [(&str, Check, u64); 12] = [
        ("AC-1 frame correctness", ac1, 5),
        ("AC-2 coercivity", ac2, 10),
        ("AC-3 plate degeneracy", ac3, 2),
        ("AC-4 rho^BS covariant identity", ac4, 5),
        ("AC-5 gradient exactness", ac5, 60),
        ("AC-6 expansion identity", ac6, 60),
        ("AC-7 existence", ac7, 300),
        ("AC-8 uniqueness probe", ac8, 1800),
        ("AC-9 Korn and equivalence constants", ac9, 600),
        ("AC-10 force family", ac10, 5),
        ("AC-11 linear response", ac11, 600),
        ("AC-12 quartic line", ac12, 10),
    ];
    let mut failures = 0;
    for (name, check, limit) in checks {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (status, detail) = match outcome {
            Ok(d) if in_time => ("PASS", d),
            Ok(d) => ("FAIL", format!("{d}; exceeded {limit} s")),
            Err(d) => ("FAIL", d),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!(
            "{name}: {status} [{:.2} s / {limit} s] {detail}",
            elapsed.as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failures} failed", 12 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
