//! Shared fixtures and independent oracles for the integration tests.
#![allow(dead_code)]

use bsshell_core::geometry::{evaluate_frame, Chart, ChartKind, GeometryFrame, Material, Rect};
use bsshell_core::kinematics::DisplacementJet;
use bsshell_core::{Mat2, Point};
use rand::Rng;

pub fn unit_material(epsilon: f64) -> Material {
    Material::new(1.0, 1.0, epsilon).unwrap()
}

/// The four reference charts: plate, cylinder `R = 2`, spherical cap `R = 1`,
/// hyperbolic paraboloid `z = ½y₁² − ½y₂²`.
pub fn charts() -> Vec<Chart> {
    vec![
        Chart::plate(),
        Chart::cylinder(2.0).unwrap(),
        Chart::with_default_domain(ChartKind::SphereCap { radius: 1.0 }).unwrap(),
        Chart::with_default_domain(ChartKind::Hypar { c1: 0.5, c2: 0.5 }).unwrap(),
    ]
}

/// Uniform random point at distance at least `margin` (relative) from the boundary.
pub fn interior_point<R: Rng>(rng: &mut R, domain: &Rect, margin: f64) -> Point {
    let (w, h) = (domain.width(), domain.height());
    [
        domain.min[0] + w * (margin + (1.0 - 2.0 * margin) * rng.random::<f64>()),
        domain.min[1] + h * (margin + (1.0 - 2.0 * margin) * rng.random::<f64>()),
    ]
}

pub fn random_jet<R: Rng>(rng: &mut R, scale: f64) -> DisplacementJet {
    let mut u = || scale * (2.0 * rng.random::<f64>() - 1.0);
    let mut j = DisplacementJet::zero();
    for i in 0..3 {
        j.eta[i] = u();
        j.d_eta[i] = [u(), u()];
    }
    let off = u();
    j.dd_eta3 = [[u(), off], [off, u()]];
    j
}

pub fn max_abs(m: &Mat2) -> f64 {
    m.iter().flatten().fold(0.0, |a: f64, v| a.max(v.abs()))
}

pub fn mat_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

fn v_sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn v_scale(s: f64, a: [f64; 3]) -> [f64; 3] {
    [s * a[0], s * a[1], s * a[2]]
}

fn v_dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn v_cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn shift(y: Point, axis: usize, h: f64) -> Point {
    let mut z = y;
    z[axis] += h;
    z
}

/// Worst discrepancies of a frame against reconstructions by central
/// differences with step `h`:
/// - `a_α` from `θ`; metric, inverse metric, `√a`, normal and dual basis from those;
/// - `b_{αβ} = a₃ · ∂_α a_β` and `Γ^σ_{αβ} = a^σ · ∂_β a_α` from differences of the frame's `a_α`;
/// - `∂_α b^τ_β` from differences of the frame's `b^τ_β`.
pub struct FrameCheck {
    pub first_order: f64,
    pub second_order: f64,
    pub third_order: f64,
}

pub fn frame_fd_check(chart: &Chart, material: &Material, y: Point, h: f64) -> FrameCheck {
    let f = evaluate_frame(chart, material, y).unwrap();
    let mut a = [[0.0; 3]; 2];
    for (al, slot) in a.iter_mut().enumerate() {
        *slot = v_scale(
            0.5 / h,
            v_sub(chart.theta(shift(y, al, h)), chart.theta(shift(y, al, -h))),
        );
    }
    let n = v_cross(a[0], a[1]);
    let sqrt_a = v_dot(n, n).sqrt();
    let a3 = v_scale(1.0 / sqrt_a, n);
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = v_dot(a[i], a[j]);
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let gi = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut first: f64 = (sqrt_a - f.sqrt_a).abs();
    for i in 0..3 {
        first = first
            .max((a3[i] - f.a_cov[2][i]).abs())
            .max((a3[i] - f.a_con[2][i]).abs());
        for al in 0..2 {
            first = first.max((a[al][i] - f.a_cov[al][i]).abs());
            let con = gi[al][0] * a[0][i] + gi[al][1] * a[1][i];
            first = first.max((con - f.a_con[al][i]).abs());
        }
    }
    first = first
        .max(mat_diff(&g, &f.a_lower))
        .max(mat_diff(&gi, &f.a_upper));

    let frame_at = |z: Point| evaluate_frame(chart, material, z).unwrap();
    let mut second: f64 = 0.0;
    let mut b = [[0.0; 2]; 2];
    for al in 0..2 {
        let (p, m) = (frame_at(shift(y, al, h)), frame_at(shift(y, al, -h)));
        for be in 0..2 {
            let d = v_scale(0.5 / h, v_sub(p.a_cov[be], m.a_cov[be]));
            b[al][be] = v_dot(f.a_cov[2], d);
            // ∂_α a_β is symmetric, so Γ^σ_{βα} = a^σ · ∂_α a_β
            for s in 0..2 {
                second = second.max((v_dot(f.a_con[s], d) - f.christoffel[s][be][al]).abs());
            }
        }
    }
    let mut bm = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            bm[i][j] = f.a_upper[i][0] * b[0][j] + f.a_upper[i][1] * b[1][j];
        }
    }
    second = second
        .max(mat_diff(&b, &f.b_lower))
        .max(mat_diff(&bm, &f.b_mixed));

    let mut third: f64 = 0.0;
    for al in 0..2 {
        let (p, m) = (frame_at(shift(y, al, h)), frame_at(shift(y, al, -h)));
        for t in 0..2 {
            for be in 0..2 {
                let d = (p.b_mixed[t][be] - m.b_mixed[t][be]) * 0.5 / h;
                third = third.max((d - f.db_mixed[al][t][be]).abs());
            }
        }
    }
    FrameCheck {
        first_order: first,
        second_order: second,
        third_order: third,
    }
}

/// `|Γ^σ_{αβ} − ½ a^{στ}(∂_α a_{βτ} + ∂_β a_{ατ} − ∂_τ a_{αβ})|` with the metric
/// derivatives formed from the analytic second derivatives of `θ`.
pub fn christoffel_metric_residual(frame: &GeometryFrame, chart: &Chart) -> f64 {
    let t = chart.theta_jet(frame.y);
    // da[γ][α][β] = ∂_γ a_{αβ}
    let mut da = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                da[c][a][b] = v_dot(t.dd[c][a], t.d[b]) + v_dot(t.d[a], t.dd[c][b]);
            }
        }
    }
    let mut worst: f64 = 0.0;
    for s in 0..2 {
        for a in 0..2 {
            for b in 0..2 {
                let mut g = 0.0;
                for tau in 0..2 {
                    g += 0.5
                        * frame.a_upper[s][tau]
                        * (da[a][b][tau] + da[b][a][tau] - da[tau][a][b]);
                }
                worst = worst.max((g - frame.christoffel[s][a][b]).abs());
            }
        }
    }
    worst
}

/// Random symmetric 2×2 matrix with entries in `[-1, 1]`.
pub fn random_symmetric<R: Rng>(rng: &mut R) -> Mat2 {
    let off = 2.0 * rng.random::<f64>() - 1.0;
    [
        [2.0 * rng.random::<f64>() - 1.0, off],
        [off, 2.0 * rng.random::<f64>() - 1.0],
    ]
}

/// `a^{αβστ} t_{στ} t_{αβ}` written out from `λ̄ a^{αβ}a^{στ} + 2μ(a^{ασ}a^{βτ} + a^{ατ}a^{βσ})`.
pub fn elastic_form(a_upper: &Mat2, material: &Material, t: &Mat2) -> f64 {
    let lb = 4.0 * material.lambda * material.mu / (material.lambda + 2.0 * material.mu);
    let mut tr = 0.0;
    let mut sq = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            tr += a_upper[a][b] * t[a][b];
            for s in 0..2 {
                for u in 0..2 {
                    sq += a_upper[a][s] * a_upper[b][u] * t[s][u] * t[a][b];
                }
            }
        }
    }
    // the two 2μ terms coincide for symmetric t
    lb * tr * tr + 4.0 * material.mu * sq
}

/// Fourth-order central difference `(−f(2h) + 8f(h) − 8f(−h) + f(−2h)) / 12h`,
/// exact for polynomials of degree four.
pub fn central_difference_4<F: FnMut(f64) -> f64>(mut f: F, h: f64) -> f64 {
    (-f(2.0 * h) + 8.0 * f(h) - 8.0 * f(-h) + f(-2.0 * h)) / (12.0 * h)
}
