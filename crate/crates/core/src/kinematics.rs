//! Pointwise strain and curvature measures of a displacement `η = η_i aⁱ`.
//!
//! Everything here works on jets (values and partial derivatives of the
//! covariant components at one point) so the formulas are independent of any
//! discretization.
//!
//! Two sign conventions meet in these formulas. With `b_{αβ} = a₃ · ∂_α a_β`
//! the normal part of `∂_α η` is `∂_α η₃ + b^σ_α η_σ`, whereas the rotation
//! field used by the model is `φ_β = ∂_β η₃ − b^σ_β η_σ`. The model formulas
//! are implemented as stated; [`metric_remainder_check`] measures the
//! discrepancy against the exact deformed metric under both signs.

use crate::geometry::{Chart, GeometryFrame};
use crate::vec3::{self, Vec3};
use crate::{Error, Mat2, Point, Result};

const DEGENERATE_AREA: f64 = 1e-12;

/// Covariant components `η_i`, their first partials and `∂_{αβ} η₃`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DisplacementJet {
    pub eta: [f64; 3],
    /// `d_eta[i][β] = ∂_β η_i`.
    pub d_eta: [[f64; 2]; 3],
    /// `dd_eta3[α][β] = ∂_{αβ} η₃`.
    pub dd_eta3: Mat2,
}

impl DisplacementJet {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.axpy(s - 1.0, self)
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        let mut out = *self;
        for i in 0..3 {
            out.eta[i] += s * other.eta[i];
            for b in 0..2 {
                out.d_eta[i][b] += s * other.d_eta[i][b];
            }
        }
        for a in 0..2 {
            for b in 0..2 {
                out.dd_eta3[a][b] += s * other.dd_eta3[a][b];
            }
        }
        out
    }
}

/// A [`DisplacementJet`] extended with the second partials of every component.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ExtendedJet {
    pub jet: DisplacementJet,
    /// `dd_eta[i][α][β] = ∂_{αβ} η_i`; `dd_eta[2]` agrees with `jet.dd_eta3`.
    pub dd_eta: [Mat2; 3],
}

impl ExtendedJet {
    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        out.jet = self.jet.scaled(s);
        for m in out.dd_eta.iter_mut() {
            for row in m.iter_mut() {
                for v in row.iter_mut() {
                    *v *= s;
                }
            }
        }
        out
    }
}

/// All strain measures at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointwiseStrain {
    pub phi: [f64; 2],
    pub gamma: Mat2,
    pub gbs: Mat2,
    pub rho: Mat2,
    pub rho_bs: Mat2,
}

impl PointwiseStrain {
    pub fn compute(frame: &GeometryFrame, jet: &DisplacementJet) -> Self {
        let phi = compute_phi(frame, jet);
        let gamma = compute_gamma(frame, jet);
        Self {
            phi,
            gamma,
            gbs: gbs_from(&gamma, &phi),
            rho: compute_rho(frame, jet),
            rho_bs: compute_rho_bs(frame, jet),
        }
    }
}

/// `φ_β = ∂_β η₃ − b^σ_β η_σ`.
pub fn compute_phi(frame: &GeometryFrame, jet: &DisplacementJet) -> [f64; 2] {
    let b = &frame.b_mixed;
    let mut phi = [0.0; 2];
    for beta in 0..2 {
        phi[beta] = jet.d_eta[2][beta] - b[0][beta] * jet.eta[0] - b[1][beta] * jet.eta[1];
    }
    phi
}

/// `γ_{αβ} = ½(∂_α η_β + ∂_β η_α) − Γ^σ_{αβ} η_σ − b_{αβ} η₃`.
pub fn compute_gamma(frame: &GeometryFrame, jet: &DisplacementJet) -> Mat2 {
    let mut g = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] = 0.5 * (jet.d_eta[b][a] + jet.d_eta[a][b])
                - frame.christoffel[0][a][b] * jet.eta[0]
                - frame.christoffel[1][a][b] * jet.eta[1]
                - frame.b_lower[a][b] * jet.eta[2];
        }
    }
    g
}

fn gbs_from(gamma: &Mat2, phi: &[f64; 2]) -> Mat2 {
    let mut g = *gamma;
    for a in 0..2 {
        for b in 0..2 {
            g[a][b] += 0.5 * phi[a] * phi[b];
        }
    }
    g
}

/// `G^BS_{αβ} = γ_{αβ} + ½ φ_α φ_β`.
pub fn compute_gbs(frame: &GeometryFrame, jet: &DisplacementJet) -> Mat2 {
    gbs_from(&compute_gamma(frame, jet), &compute_phi(frame, jet))
}

/// Modified linearized change of curvature `ρ^BS_{αβ}` (expanded form).
pub fn compute_rho_bs(frame: &GeometryFrame, jet: &DisplacementJet) -> Mat2 {
    let bm = &frame.b_mixed;
    let db = &frame.db_mixed;
    let gam = &frame.christoffel;
    let eta = &jet.eta;
    let de = &jet.d_eta;
    let mut r = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = jet.dd_eta3[a][b];
            for s in 0..2 {
                v -= 0.5 * (db[b][s][a] + db[a][s][b]) * eta[s];
                v -= 0.5 * (bm[s][a] * de[s][b] + bm[s][b] * de[s][a]);
            }
            for t in 0..2 {
                v -= gam[t][a][b] * de[2][t];
                for s in 0..2 {
                    v += gam[t][a][b] * eta[s] * bm[s][t];
                }
            }
            r[a][b] = v;
        }
    }
    r
}

/// Linearized change of curvature `ρ_{αβ}` (full three-line form).
pub fn compute_rho(frame: &GeometryFrame, jet: &DisplacementJet) -> Mat2 {
    let bm = &frame.b_mixed;
    let bl = &frame.b_lower;
    let db = &frame.db_mixed;
    let gam = &frame.christoffel;
    let eta = &jet.eta;
    let de = &jet.d_eta;
    let mut r = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = jet.dd_eta3[a][b];
            for s in 0..2 {
                v -= gam[s][a][b] * de[2][s];
                v -= bm[s][a] * bl[s][b] * eta[2];
                // b^σ_α (∂_β η_σ − Γ^τ_{βσ} η_τ)
                let mut cov = de[s][b];
                for t in 0..2 {
                    cov -= gam[t][b][s] * eta[t];
                }
                v += bm[s][a] * cov;
            }
            for t in 0..2 {
                // b^τ_β (∂_α η_τ − Γ^σ_{ατ} η_σ)
                let mut cov = de[t][a];
                for s in 0..2 {
                    cov -= gam[s][a][t] * eta[s];
                }
                v += bm[t][b] * cov;
                // (∂_α b^τ_β + Γ^τ_{ασ} b^σ_β − Γ^σ_{αβ} b^τ_σ) η_τ
                let mut coef = db[a][t][b];
                for s in 0..2 {
                    coef += gam[t][a][s] * bm[s][b] - gam[s][a][b] * bm[t][s];
                }
                v += coef * eta[t];
            }
            r[a][b] = v;
        }
    }
    r
}

/// `dphi[α][β] = ∂_β φ_α = ∂_{αβ} η₃ − ∂_β b^σ_α η_σ − b^σ_α ∂_β η_σ`.
pub fn phi_gradient(frame: &GeometryFrame, jet: &DisplacementJet) -> Mat2 {
    let mut d = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut v = jet.dd_eta3[a][b];
            for s in 0..2 {
                v -= frame.db_mixed[b][s][a] * jet.eta[s];
                v -= frame.b_mixed[s][a] * jet.d_eta[s][b];
            }
            d[a][b] = v;
        }
    }
    d
}

/// `v_{α|β} + v_{β|α}` with `v_{α|β} = ½(∂_α v_β + ∂_β v_α) − Γ^σ_{αβ} v_σ`.
///
/// `dv[α][β] = ∂_β v_α`.
pub fn covariant_sym_derivative(frame: &GeometryFrame, v: [f64; 2], dv: &Mat2) -> Mat2 {
    let mut e = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            e[a][b] = dv[b][a] + dv[a][b]
                - 2.0 * (frame.christoffel[0][a][b] * v[0] + frame.christoffel[1][a][b] * v[1]);
        }
    }
    e
}

/// Position derivatives of the deformed surface `θ + η` at one point.
#[derive(Debug, Clone, Copy)]
pub struct DeformedSurface {
    pub tangents: [Vec3; 2],
    pub second: [[Vec3; 2]; 2],
    pub reference_tangents: [Vec3; 2],
    pub reference_second: [[Vec3; 2]; 2],
}

impl DeformedSurface {
    pub fn new(chart: &Chart, y: Point, ext: &ExtendedJet) -> Result<Self> {
        if !chart.domain.contains(y) {
            return Err(Error::DomainViolation { y0: y[0], y1: y[1] });
        }
        let theta = chart.theta_jet(y);
        let basis = chart.basis_jet(y)?;
        let j = &ext.jet;
        let mut tangents = theta.d;
        let mut second = theta.dd;
        for i in 0..3 {
            let con = &basis.con[i];
            for a in 0..2 {
                tangents[a] = vec3::axpy(j.d_eta[i][a], con.v, tangents[a]);
                tangents[a] = vec3::axpy(j.eta[i], con.d[a], tangents[a]);
                for b in 0..2 {
                    let mut w = second[a][b];
                    w = vec3::axpy(ext.dd_eta[i][a][b], con.v, w);
                    w = vec3::axpy(j.d_eta[i][a], con.d[b], w);
                    w = vec3::axpy(j.d_eta[i][b], con.d[a], w);
                    w = vec3::axpy(j.eta[i], con.dd[a][b], w);
                    second[a][b] = w;
                }
            }
        }
        Ok(Self {
            tangents,
            second,
            reference_tangents: theta.d,
            reference_second: theta.dd,
        })
    }

    fn normal(&self) -> Result<Vec3> {
        let n = vec3::cross(self.tangents[0], self.tangents[1]);
        let area = vec3::norm(n);
        if area <= DEGENERATE_AREA {
            return Err(Error::DegenerateDeformation { area });
        }
        Ok(vec3::scale(1.0 / area, n))
    }

    /// `G_{αβ}(θ+η) = ½(a_{αβ}(θ+η) − a_{αβ})`.
    pub fn metric_change(&self) -> Result<Mat2> {
        self.normal()?;
        let mut g = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                g[a][b] = 0.5
                    * (vec3::dot(self.tangents[a], self.tangents[b])
                        - vec3::dot(self.reference_tangents[a], self.reference_tangents[b]));
            }
        }
        Ok(g)
    }

    /// `R_{αβ}(θ+η) = b_{αβ}(θ+η) − b_{αβ}`.
    pub fn curvature_change(&self) -> Result<Mat2> {
        let n = self.normal()?;
        let n0 = vec3::cross(self.reference_tangents[0], self.reference_tangents[1]);
        let n0 = vec3::scale(1.0 / vec3::norm(n0), n0);
        let mut r = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                r[a][b] =
                    vec3::dot(n, self.second[a][b]) - vec3::dot(n0, self.reference_second[a][b]);
            }
        }
        Ok(r)
    }
}

/// Exact change of metric of the deformed surface at `y`.
pub fn compute_exact_metric_change(chart: &Chart, y: Point, ext: &ExtendedJet) -> Result<Mat2> {
    DeformedSurface::new(chart, y, ext)?.metric_change()
}

/// Exact change of curvature of the deformed surface at `y`.
pub fn compute_exact_curvature_change(chart: &Chart, y: Point, ext: &ExtendedJet) -> Result<Mat2> {
    DeformedSurface::new(chart, y, ext)?.curvature_change()
}

/// Discrepancies of the metric decomposition
/// `G(θ+η) = G^BS(η) + ½ a^{στ} e_{ασ} e_{βτ}`, `e_{ασ} = ∂_α η_σ − Γ^γ_{ασ} η_γ − b_{ασ} η₃`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderReport {
    /// Max entrywise discrepancy with `φ` as used by the model.
    pub residual: f64,
    /// Same, with `φ` replaced by `∂_β η₃ + b^σ_β η_σ` (the normal part of `∂_β η`).
    pub residual_normal_convention: f64,
}

/// Evaluates both sides of the metric decomposition and returns the maximum
/// entrywise absolute discrepancy (model sign convention).
pub fn metric_remainder_check(
    frame: &GeometryFrame,
    chart: &Chart,
    ext: &ExtendedJet,
) -> Result<f64> {
    Ok(metric_remainder_report(frame, chart, ext)?.residual)
}

pub fn metric_remainder_report(
    frame: &GeometryFrame,
    chart: &Chart,
    ext: &ExtendedJet,
) -> Result<RemainderReport> {
    let exact = compute_exact_metric_change(chart, frame.y, ext)?;
    let j = &ext.jet;
    let gamma = compute_gamma(frame, j);
    let phi = compute_phi(frame, j);
    let mut normal_part = [0.0; 2];
    for b in 0..2 {
        normal_part[b] =
            j.d_eta[2][b] + frame.b_mixed[0][b] * j.eta[0] + frame.b_mixed[1][b] * j.eta[1];
    }
    let mut e = [[0.0; 2]; 2];
    for a in 0..2 {
        for s in 0..2 {
            e[a][s] = j.d_eta[s][a]
                - frame.christoffel[0][a][s] * j.eta[0]
                - frame.christoffel[1][a][s] * j.eta[1]
                - frame.b_lower[a][s] * j.eta[2];
        }
    }
    let mut residual: f64 = 0.0;
    let mut residual_alt: f64 = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut tangential = 0.0;
            for s in 0..2 {
                for t in 0..2 {
                    tangential += frame.a_upper[s][t] * e[a][s] * e[b][t];
                }
            }
            let rhs = gamma[a][b] + 0.5 * phi[a] * phi[b] + 0.5 * tangential;
            let rhs_alt = gamma[a][b] + 0.5 * normal_part[a] * normal_part[b] + 0.5 * tangential;
            residual = residual.max((exact[a][b] - rhs).abs());
            residual_alt = residual_alt.max((exact[a][b] - rhs_alt).abs());
        }
    }
    Ok(RemainderReport {
        residual,
        residual_normal_convention: residual_alt,
    })
}

/// Finite-`t` linearization data: `max |Q(θ + tη) − t L(η)|` for each `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearizationReport {
    pub steps: alloc::vec::Vec<f64>,
    pub errors: alloc::vec::Vec<f64>,
    /// Least-squares slope of `log error` against `log t`.
    pub order: f64,
}

fn fit_order(steps: &[f64], errors: &[f64]) -> f64 {
    let pts: alloc::vec::Vec<(f64, f64)> = steps
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&t, &e)| (libm::log(t), libm::log(e)))
        .collect();
    if pts.len() < 2 {
        return f64::INFINITY;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).abs());
        }
    }
    m
}

/// Order of `‖G(θ+tη) − tγ(η)‖` as `t → 0`; a correct linearization gives 2.
pub fn metric_linearization(
    frame: &GeometryFrame,
    chart: &Chart,
    ext: &ExtendedJet,
    steps: &[f64],
) -> Result<LinearizationReport> {
    let gamma = compute_gamma(frame, &ext.jet);
    let mut errors = alloc::vec::Vec::with_capacity(steps.len());
    for &t in steps {
        let g = compute_exact_metric_change(chart, frame.y, &ext.scaled(t))?;
        let scaled = [
            [t * gamma[0][0], t * gamma[0][1]],
            [t * gamma[1][0], t * gamma[1][1]],
        ];
        errors.push(max_abs_diff(&g, &scaled));
    }
    let order = fit_order(steps, &errors);
    Ok(LinearizationReport {
        steps: steps.to_vec(),
        errors,
        order,
    })
}

/// Same as [`metric_linearization`] for `R(θ+tη)` against `t ρ(η)`. A
/// systematic mismatch shows up as an order near 1 instead of 2.
pub fn curvature_linearization(
    frame: &GeometryFrame,
    chart: &Chart,
    ext: &ExtendedJet,
    steps: &[f64],
) -> Result<LinearizationReport> {
    let rho = compute_rho(frame, &ext.jet);
    let mut errors = alloc::vec::Vec::with_capacity(steps.len());
    for &t in steps {
        let r = compute_exact_curvature_change(chart, frame.y, &ext.scaled(t))?;
        let scaled = [
            [t * rho[0][0], t * rho[0][1]],
            [t * rho[1][0], t * rho[1][1]],
        ];
        errors.push(max_abs_diff(&r, &scaled));
    }
    let order = fit_order(steps, &errors);
    Ok(LinearizationReport {
        steps: steps.to_vec(),
        errors,
        order,
    })
}

/// `|ρ^BS − ½(φ_{α|β} + φ_{β|α})|`, the covariant form of the bending strain.
pub fn rho_bs_identity_residual(frame: &GeometryFrame, jet: &DisplacementJet) -> f64 {
    let rho = compute_rho_bs(frame, jet);
    let cov = covariant_sym_derivative(frame, compute_phi(frame, jet), &phi_gradient(frame, jet));
    let half = [
        [0.5 * cov[0][0], 0.5 * cov[0][1]],
        [0.5 * cov[1][0], 0.5 * cov[1][1]],
    ];
    max_abs_diff(&rho, &half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{evaluate_frame, ChartKind, Material};
    use approx::assert_abs_diff_eq;

    fn mat() -> Material {
        Material::new(1.0, 1.0, 1.0).unwrap()
    }

    #[test]
    fn phi_examples() {
        let plate = GeometryFrame::flat(&mat(), [0.5, 0.5]);
        let mut jet = DisplacementJet::zero();
        jet.d_eta[2] = [0.2, -0.1];
        assert_eq!(compute_phi(&plate, &jet), [0.2, -0.1]);
        assert_eq!(compute_phi(&plate, &DisplacementJet::zero()), [0.0, 0.0]);

        let cyl = evaluate_frame(&Chart::cylinder(2.0).unwrap(), &mat(), [0.3, 0.1]).unwrap();
        let mut jet = DisplacementJet::zero();
        jet.eta[0] = 0.5;
        assert_abs_diff_eq!(compute_phi(&cyl, &jet)[0], 0.25, epsilon = 1e-15);
    }

    #[test]
    fn gamma_on_cylinder_normal_displacement() {
        let cyl = evaluate_frame(&Chart::cylinder(2.0).unwrap(), &mat(), [0.3, 0.1]).unwrap();
        let mut jet = DisplacementJet::zero();
        jet.eta[2] = 1.0;
        let g = compute_gamma(&cyl, &jet);
        assert_abs_diff_eq!(g[0][0], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[0][1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g[1][1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn gbs_example() {
        let plate = GeometryFrame::flat(&mat(), [0.5, 0.5]);
        let mut jet = DisplacementJet::zero();
        jet.d_eta[0][0] = 0.1;
        jet.d_eta[2] = [0.2, 0.0];
        assert_abs_diff_eq!(compute_gbs(&plate, &jet)[0][0], 0.12, epsilon = 1e-15);
    }

    #[test]
    fn plate_plain_von_karman_metric() {
        let chart = Chart::plate();
        let mut ext = ExtendedJet::default();
        ext.jet.eta[2] = 0.3;
        ext.jet.d_eta[2] = [0.4, -0.2];
        let g = compute_exact_metric_change(&chart, [0.4, 0.6], &ext).unwrap();
        assert_abs_diff_eq!(g[0][0], 0.08, epsilon = 1e-15);
        assert_abs_diff_eq!(g[0][1], -0.04, epsilon = 1e-15);
        assert_abs_diff_eq!(g[1][1], 0.02, epsilon = 1e-15);
        let frame = GeometryFrame::flat(&mat(), [0.4, 0.6]);
        assert!(metric_remainder_check(&frame, &chart, &ext).unwrap() < 1e-15);
    }

    #[test]
    fn zero_jet_gives_zero_everything() {
        let chart = Chart::with_default_domain(ChartKind::Hypar { c1: 0.5, c2: 0.5 }).unwrap();
        let frame = evaluate_frame(&chart, &mat(), [0.1, 0.2]).unwrap();
        let s = PointwiseStrain::compute(&frame, &DisplacementJet::zero());
        assert_eq!(s, PointwiseStrain::default());
        let ext = ExtendedJet::default();
        assert_eq!(
            compute_exact_metric_change(&chart, frame.y, &ext).unwrap(),
            [[0.0; 2]; 2]
        );
        let r = compute_exact_curvature_change(&chart, frame.y, &ext).unwrap();
        assert!(max_abs_diff(&r, &[[0.0; 2]; 2]) < 1e-15);
        assert!(metric_remainder_check(&frame, &chart, &ext).unwrap() < 1e-15);
    }

    #[test]
    fn rigid_translation_preserves_curvature() {
        let chart = Chart::cylinder(2.0).unwrap();
        let y = [0.4, 0.3];
        let c = [0.3, -0.2, 0.5];
        // η_i = c · a_i and its derivatives
        let bj = chart.basis_jet(y).unwrap();
        let mut ext = ExtendedJet::default();
        for i in 0..3 {
            ext.jet.eta[i] = vec3::dot(c, bj.cov[i].v);
            for a in 0..2 {
                ext.jet.d_eta[i][a] = vec3::dot(c, bj.cov[i].d[a]);
                for b in 0..2 {
                    ext.dd_eta[i][a][b] = vec3::dot(c, bj.cov[i].dd[a][b]);
                }
            }
        }
        ext.jet.dd_eta3 = ext.dd_eta[2];
        let r = compute_exact_curvature_change(&chart, y, &ext).unwrap();
        let g = compute_exact_metric_change(&chart, y, &ext).unwrap();
        assert!(max_abs_diff(&r, &[[0.0; 2]; 2]) < 1e-13, "{r:?}");
        assert!(max_abs_diff(&g, &[[0.0; 2]; 2]) < 1e-13, "{g:?}");
    }

    #[test]
    fn degenerate_deformation_detected() {
        // η = −θ-tangent collapse on the plate: ∂₁(θ+η) = 0
        let mut ext = ExtendedJet::default();
        ext.jet.d_eta[0][0] = -1.0;
        ext.jet.d_eta[1][0] = 0.0;
        let r = compute_exact_metric_change(&Chart::plate(), [0.5, 0.5], &ext);
        assert!(matches!(r, Err(Error::DegenerateDeformation { .. })));
    }

    #[test]
    fn covariant_sym_derivative_on_plate() {
        let plate = GeometryFrame::flat(&mat(), [0.5, 0.5]);
        let e = covariant_sym_derivative(&plate, [1.0, 2.0], &[[0.1, 0.2], [0.3, 0.4]]);
        assert_abs_diff_eq!(e[0][0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(e[0][1], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(e[1][1], 0.8, epsilon = 1e-15);
        assert_eq!(
            covariant_sym_derivative(&plate, [0.0; 2], &[[0.0; 2]; 2]),
            [[0.0; 2]; 2]
        );
    }
}
