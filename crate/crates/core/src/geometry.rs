//! Differential geometry of the middle surface `θ(ω̄)` for a small catalog of
//! analytic charts.
//!
//! Orientation: `a₃ = a₁ ∧ a₂ / |a₁ ∧ a₂|` and `b_{αβ} = a₃ · ∂_α a_β`. With
//! this convention the cylinder `(R cos y₁, R sin y₁, y₂)` has an outward
//! normal and `b₁₁ = −R`; the sphere cap and the hyperbolic paraboloid are
//! graphs `(y₁, y₂, h(y))` with an upward normal, so the cap has
//! `b^α_β = −δ^α_β / R` at its pole.

use nalgebra::Matrix3;

use crate::vec3::{self, Vec3};
use crate::{Error, Mat2, Point, Result, Tensor4};

const IMMERSION_TOL: f64 = 1e-12;
const DOMAIN_TOL: f64 = 1e-12;

/// Axis-aligned parameter rectangle `[min₀, max₀] × [min₁, max₁]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(min: Point, max: Point) -> Result<Self> {
        if !(min[0] < max[0] && min[1] < max[1])
            || !(min[0].is_finite() && max[0].is_finite())
            || !(min[1].is_finite() && max[1].is_finite())
        {
            return Err(Error::InvalidParameter(
                "domain rectangle must satisfy min < max",
            ));
        }
        Ok(Self { min, max })
    }

    pub fn unit() -> Self {
        Self {
            min: [0.0, 0.0],
            max: [1.0, 1.0],
        }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point {
        [
            0.5 * (self.min[0] + self.max[0]),
            0.5 * (self.min[1] + self.max[1]),
        ]
    }

    /// Closed containment with a small relative slack.
    pub fn contains(&self, y: Point) -> bool {
        let sx = DOMAIN_TOL * (1.0 + self.width());
        let sy = DOMAIN_TOL * (1.0 + self.height());
        y[0] >= self.min[0] - sx
            && y[0] <= self.max[0] + sx
            && y[1] >= self.min[1] - sy
            && y[1] <= self.max[1] + sy
    }

    /// Distance from an interior point to the boundary (negative outside).
    pub fn distance_to_boundary(&self, y: Point) -> f64 {
        let dx = (y[0] - self.min[0]).min(self.max[0] - y[0]);
        let dy = (y[1] - self.min[1]).min(self.max[1] - y[1]);
        dx.min(dy)
    }
}

/// Analytic chart families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChartKind {
    /// `θ(y) = (y₁, y₂, 0)`.
    Plate,
    /// `θ(y) = (R cos y₁, R sin y₁, y₂)`.
    Cylinder { radius: f64 },
    /// Graph of `h(y) = √(R² − |y|²)`, a spherical cap with its pole at `y = 0`.
    SphereCap { radius: f64 },
    /// Graph of `h(y) = c₁ y₁² − c₂ y₂²`.
    Hypar { c1: f64, c2: f64 },
}

impl ChartKind {
    pub fn name(&self) -> &'static str {
        match self {
            ChartKind::Plate => "plate",
            ChartKind::Cylinder { .. } => "cylinder",
            ChartKind::SphereCap { .. } => "sphere_cap",
            ChartKind::Hypar { .. } => "hypar",
        }
    }

    /// Domain used when a configuration does not give one.
    pub fn default_domain(&self) -> Rect {
        match self {
            ChartKind::SphereCap { .. } | ChartKind::Hypar { .. } => Rect {
                min: [-0.5, -0.5],
                max: [0.5, 0.5],
            },
            _ => Rect::unit(),
        }
    }
}

/// `θ` and its partial derivatives up to order three at one point.
#[derive(Debug, Clone, Copy)]
pub struct ThetaJet {
    pub x: Vec3,
    pub d: [Vec3; 2],
    pub dd: [[Vec3; 2]; 2],
    pub ddd: [[[Vec3; 2]; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Chart {
    pub kind: ChartKind,
    pub domain: Rect,
}

impl Chart {
    pub fn new(kind: ChartKind, domain: Rect) -> Result<Self> {
        match kind {
            ChartKind::Plate => {}
            ChartKind::Cylinder { radius } if !(radius > 0.0 && radius.is_finite()) => {
                return Err(Error::InvalidParameter("cylinder radius must be positive"));
            }
            ChartKind::SphereCap { radius } => {
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidParameter("sphere radius must be positive"));
                }
                let corner = |x: f64, y: f64| x * x + y * y;
                let r2 = [
                    corner(domain.min[0], domain.min[1]),
                    corner(domain.min[0], domain.max[1]),
                    corner(domain.max[0], domain.min[1]),
                    corner(domain.max[0], domain.max[1]),
                ];
                if r2.iter().any(|&r| r >= 0.99 * radius * radius) {
                    return Err(Error::InvalidParameter(
                        "sphere cap domain must lie strictly inside the disk of radius R",
                    ));
                }
            }
            ChartKind::Hypar { c1, c2 } if !(c1.is_finite() && c2.is_finite()) => {
                return Err(Error::InvalidParameter("hypar coefficients must be finite"));
            }
            _ => {}
        }
        Ok(Self { kind, domain })
    }

    pub fn with_default_domain(kind: ChartKind) -> Result<Self> {
        Self::new(kind, kind.default_domain())
    }

    pub fn plate() -> Self {
        Self {
            kind: ChartKind::Plate,
            domain: Rect::unit(),
        }
    }

    pub fn cylinder(radius: f64) -> Result<Self> {
        Self::with_default_domain(ChartKind::Cylinder { radius })
    }

    /// The position `θ(y)`.
    pub fn theta(&self, y: Point) -> Vec3 {
        self.theta_jet(y).x
    }

    pub fn theta_jet(&self, y: Point) -> ThetaJet {
        match self.kind {
            ChartKind::Cylinder { radius: r } => {
                let (s, c) = (libm::sin(y[0]), libm::cos(y[0]));
                let mut jet = ThetaJet {
                    x: [r * c, r * s, y[1]],
                    d: [[-r * s, r * c, 0.0], [0.0, 0.0, 1.0]],
                    dd: [[vec3::ZERO; 2]; 2],
                    ddd: [[[vec3::ZERO; 2]; 2]; 2],
                };
                jet.dd[0][0] = [-r * c, -r * s, 0.0];
                jet.ddd[0][0][0] = [r * s, -r * c, 0.0];
                jet
            }
            ChartKind::Plate => graph_jet(y, 0.0, [0.0; 2], [[0.0; 2]; 2], [[[0.0; 2]; 2]; 2]),
            ChartKind::Hypar { c1, c2 } => graph_jet(
                y,
                c1 * y[0] * y[0] - c2 * y[1] * y[1],
                [2.0 * c1 * y[0], -2.0 * c2 * y[1]],
                [[2.0 * c1, 0.0], [0.0, -2.0 * c2]],
                [[[0.0; 2]; 2]; 2],
            ),
            ChartKind::SphereCap { radius } => {
                let h = libm::sqrt(radius * radius - y[0] * y[0] - y[1] * y[1]);
                let (h3, h5) = (h * h * h, h * h * h * h * h);
                let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
                let mut dh = [0.0; 2];
                let mut ddh = [[0.0; 2]; 2];
                let mut dddh = [[[0.0; 2]; 2]; 2];
                for i in 0..2 {
                    dh[i] = -y[i] / h;
                    for j in 0..2 {
                        ddh[i][j] = -delta(i, j) / h - y[i] * y[j] / h3;
                        for k in 0..2 {
                            dddh[i][j][k] =
                                -(delta(i, j) * y[k] + delta(i, k) * y[j] + delta(j, k) * y[i])
                                    / h3
                                    - 3.0 * y[i] * y[j] * y[k] / h5;
                        }
                    }
                }
                graph_jet(y, h, dh, ddh, dddh)
            }
        }
    }

    /// Covariant and contravariant bases with their first and second
    /// derivatives, built from exact chart derivatives.
    pub fn basis_jet(&self, y: Point) -> Result<BasisJet> {
        let t = self.theta_jet(y);
        let n = vec3::cross(t.d[0], t.d[1]);
        let area = vec3::norm(n);
        if area <= IMMERSION_TOL {
            return Err(Error::ImmersionFailure {
                y0: y[0],
                y1: y[1],
                norm: area,
            });
        }
        let mut dn = [vec3::ZERO; 2];
        let mut ddn = [[vec3::ZERO; 2]; 2];
        for a in 0..2 {
            dn[a] = vec3::add(
                vec3::cross(t.dd[0][a], t.d[1]),
                vec3::cross(t.d[0], t.dd[1][a]),
            );
        }
        for a in 0..2 {
            for b in 0..2 {
                let mut v = vec3::cross(t.ddd[0][a][b], t.d[1]);
                v = vec3::add(v, vec3::cross(t.dd[0][a], t.dd[1][b]));
                v = vec3::add(v, vec3::cross(t.dd[0][b], t.dd[1][a]));
                v = vec3::add(v, vec3::cross(t.d[0], t.ddd[1][a][b]));
                ddn[a][b] = v;
            }
        }
        let unit = normalize_jet(n, dn, ddn);

        // D = n·n
        let dsq = vec3::dot(n, n);
        let mut d_dsq = [0.0; 2];
        let mut dd_dsq = [[0.0; 2]; 2];
        for a in 0..2 {
            d_dsq[a] = 2.0 * vec3::dot(n, dn[a]);
            for b in 0..2 {
                dd_dsq[a][b] = 2.0 * (vec3::dot(dn[a], dn[b]) + vec3::dot(n, ddn[a][b]));
            }
        }
        let scalar = (dsq, d_dsq, dd_dsq);

        // a¹ = (a₂ ∧ n)/D, a² = (n ∧ a₁)/D
        let mut v1 = VecJet {
            v: vec3::cross(t.d[1], n),
            d: [vec3::ZERO; 2],
            dd: [[vec3::ZERO; 2]; 2],
        };
        let mut v2 = VecJet {
            v: vec3::cross(n, t.d[0]),
            d: [vec3::ZERO; 2],
            dd: [[vec3::ZERO; 2]; 2],
        };
        for a in 0..2 {
            v1.d[a] = vec3::add(vec3::cross(t.dd[1][a], n), vec3::cross(t.d[1], dn[a]));
            v2.d[a] = vec3::add(vec3::cross(dn[a], t.d[0]), vec3::cross(n, t.dd[0][a]));
            for b in 0..2 {
                let mut w = vec3::cross(t.ddd[1][a][b], n);
                w = vec3::add(w, vec3::cross(t.dd[1][a], dn[b]));
                w = vec3::add(w, vec3::cross(t.dd[1][b], dn[a]));
                w = vec3::add(w, vec3::cross(t.d[1], ddn[a][b]));
                v1.dd[a][b] = w;
                let mut w = vec3::cross(ddn[a][b], t.d[0]);
                w = vec3::add(w, vec3::cross(dn[a], t.dd[0][b]));
                w = vec3::add(w, vec3::cross(dn[b], t.dd[0][a]));
                w = vec3::add(w, vec3::cross(n, t.ddd[0][a][b]));
                v2.dd[a][b] = w;
            }
        }
        let con = [quotient_jet(&v1, scalar), quotient_jet(&v2, scalar), unit];
        let cov = [
            VecJet {
                v: t.d[0],
                d: t.dd[0],
                dd: t.ddd[0],
            },
            VecJet {
                v: t.d[1],
                d: t.dd[1],
                dd: t.ddd[1],
            },
            unit,
        ];
        Ok(BasisJet { cov, con })
    }
}

fn graph_jet(y: Point, h: f64, dh: [f64; 2], ddh: Mat2, dddh: [[[f64; 2]; 2]; 2]) -> ThetaJet {
    let mut jet = ThetaJet {
        x: [y[0], y[1], h],
        d: [[1.0, 0.0, dh[0]], [0.0, 1.0, dh[1]]],
        dd: [[vec3::ZERO; 2]; 2],
        ddd: [[[vec3::ZERO; 2]; 2]; 2],
    };
    for a in 0..2 {
        for b in 0..2 {
            jet.dd[a][b] = [0.0, 0.0, ddh[a][b]];
            for c in 0..2 {
                jet.ddd[a][b][c] = [0.0, 0.0, dddh[a][b][c]];
            }
        }
    }
    jet
}

/// A vector field with first and second partials at one point.
#[derive(Debug, Clone, Copy)]
pub struct VecJet {
    pub v: Vec3,
    pub d: [Vec3; 2],
    pub dd: [[Vec3; 2]; 2],
}

/// Both surface bases as [`VecJet`]s; index 2 is the unit normal `a₃ = a³`.
#[derive(Debug, Clone, Copy)]
pub struct BasisJet {
    pub cov: [VecJet; 3],
    pub con: [VecJet; 3],
}

fn quotient_jet(v: &VecJet, (q, dq, ddq): (f64, [f64; 2], Mat2)) -> VecJet {
    let mut out = VecJet {
        v: vec3::scale(1.0 / q, v.v),
        d: [vec3::ZERO; 2],
        dd: [[vec3::ZERO; 2]; 2],
    };
    let q2 = q * q;
    let q3 = q2 * q;
    for a in 0..2 {
        out.d[a] = vec3::sub(vec3::scale(1.0 / q, v.d[a]), vec3::scale(dq[a] / q2, v.v));
        for b in 0..2 {
            let mut w = vec3::scale(1.0 / q, v.dd[a][b]);
            w = vec3::axpy(-dq[b] / q2, v.d[a], w);
            w = vec3::axpy(-dq[a] / q2, v.d[b], w);
            w = vec3::axpy(-ddq[a][b] / q2 + 2.0 * dq[a] * dq[b] / q3, v.v, w);
            out.dd[a][b] = w;
        }
    }
    out
}

/// Jet of `n / |n|`.
pub(crate) fn normalize_jet(n: Vec3, dn: [Vec3; 2], ddn: [[Vec3; 2]; 2]) -> VecJet {
    let s = vec3::norm(n);
    let s3 = s * s * s;
    let s5 = s3 * s * s;
    let nd = [vec3::dot(n, dn[0]), vec3::dot(n, dn[1])];
    let mut out = VecJet {
        v: vec3::scale(1.0 / s, n),
        d: [vec3::ZERO; 2],
        dd: [[vec3::ZERO; 2]; 2],
    };
    for a in 0..2 {
        out.d[a] = vec3::axpy(-nd[a] / s3, n, vec3::scale(1.0 / s, dn[a]));
        for b in 0..2 {
            let mut w = vec3::scale(1.0 / s, ddn[a][b]);
            w = vec3::axpy(-nd[b] / s3, dn[a], w);
            w = vec3::axpy(-nd[a] / s3, dn[b], w);
            let ndd = vec3::dot(dn[a], dn[b]) + vec3::dot(n, ddn[a][b]);
            w = vec3::axpy(-ndd / s3 + 3.0 * nd[a] * nd[b] / s5, n, w);
            out.dd[a][b] = w;
        }
    }
    out
}

/// Lamé constants and the thickness parameter `ε`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material {
    pub lambda: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl Material {
    pub fn new(lambda: f64, mu: f64, epsilon: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter("lambda must be >= 0"));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter("mu must be > 0"));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter("epsilon must be > 0"));
        }
        Ok(Self {
            lambda,
            mu,
            epsilon,
        })
    }

    /// `4λμ / (λ + 2μ)`.
    pub fn lambda_bar(&self) -> f64 {
        4.0 * self.lambda * self.mu / (self.lambda + 2.0 * self.mu)
    }
}

/// All pointwise geometric data of the chart at one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFrame {
    pub y: Point,
    /// `a₁, a₂, a₃`.
    pub a_cov: [Vec3; 3],
    /// `a¹, a², a³`.
    pub a_con: [Vec3; 3],
    /// `a_{αβ}`.
    pub a_lower: Mat2,
    /// `a^{αβ}`.
    pub a_upper: Mat2,
    /// `b_{αβ}`.
    pub b_lower: Mat2,
    /// `b_mixed[α][β] = b^α_β`.
    pub b_mixed: Mat2,
    /// `christoffel[σ][α][β] = Γ^σ_{αβ}`.
    pub christoffel: [Mat2; 2],
    /// `db_mixed[α][τ][β] = ∂_α b^τ_β`.
    pub db_mixed: [Mat2; 2],
    /// `√a = |a₁ ∧ a₂|`.
    pub sqrt_a: f64,
    /// `a^{αβστ}`.
    pub elasticity: Tensor4,
}

impl GeometryFrame {
    /// Frame of the flat chart `θ(y) = (y₁, y₂, 0)` at `y`.
    pub fn flat(material: &Material, y: Point) -> Self {
        let id = [[1.0, 0.0], [0.0, 1.0]];
        let e = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
        Self {
            y,
            a_cov: e,
            a_con: e,
            a_lower: id,
            a_upper: id,
            b_lower: [[0.0; 2]; 2],
            b_mixed: [[0.0; 2]; 2],
            christoffel: [[[0.0; 2]; 2]; 2],
            db_mixed: [[[0.0; 2]; 2]; 2],
            sqrt_a: 1.0,
            elasticity: elasticity_tensor(&id, material),
        }
    }
}

/// Evaluates every geometric quantity of the chart at `y`.
pub fn evaluate_frame(chart: &Chart, material: &Material, y: Point) -> Result<GeometryFrame> {
    if !chart.domain.contains(y) {
        return Err(Error::DomainViolation { y0: y[0], y1: y[1] });
    }
    let t = chart.theta_jet(y);
    let n = vec3::cross(t.d[0], t.d[1]);
    let sqrt_a = vec3::norm(n);
    if sqrt_a <= IMMERSION_TOL {
        return Err(Error::ImmersionFailure {
            y0: y[0],
            y1: y[1],
            norm: sqrt_a,
        });
    }
    let a3 = vec3::scale(1.0 / sqrt_a, n);

    let mut a_lower = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            a_lower[a][b] = vec3::dot(t.d[a], t.d[b]);
        }
    }
    let a_upper = inverse2(&a_lower);

    let mut a_con = [vec3::ZERO, vec3::ZERO, a3];
    for s in 0..2 {
        a_con[s] = vec3::add(
            vec3::scale(a_upper[s][0], t.d[0]),
            vec3::scale(a_upper[s][1], t.d[1]),
        );
    }

    let mut b_lower = [[0.0; 2]; 2];
    let mut christoffel = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            b_lower[a][b] = vec3::dot(a3, t.dd[a][b]);
            for s in 0..2 {
                christoffel[s][a][b] = vec3::dot(a_con[s], t.dd[a][b]);
            }
        }
    }
    let b_mixed = matmul2(&a_upper, &b_lower);

    // ∂_α a₃ = −b_{ακ} a^κ
    let mut da3 = [vec3::ZERO; 2];
    for a in 0..2 {
        da3[a] = vec3::add(
            vec3::scale(-b_lower[a][0], a_con[0]),
            vec3::scale(-b_lower[a][1], a_con[1]),
        );
    }
    let mut db_mixed = [[[0.0; 2]; 2]; 2];
    for a in 0..2 {
        let mut da_lower = [[0.0; 2]; 2];
        let mut db_lower = [[0.0; 2]; 2];
        for k in 0..2 {
            for l in 0..2 {
                da_lower[k][l] = vec3::dot(t.dd[a][k], t.d[l]) + vec3::dot(t.d[k], t.dd[a][l]);
                db_lower[k][l] = vec3::dot(da3[a], t.dd[k][l]) + vec3::dot(a3, t.ddd[a][k][l]);
            }
        }
        let da_upper = {
            let m = matmul2(&matmul2(&a_upper, &da_lower), &a_upper);
            [[-m[0][0], -m[0][1]], [-m[1][0], -m[1][1]]]
        };
        let first = matmul2(&da_upper, &b_lower);
        let second = matmul2(&a_upper, &db_lower);
        for tau in 0..2 {
            for b in 0..2 {
                db_mixed[a][tau][b] = first[tau][b] + second[tau][b];
            }
        }
    }

    Ok(GeometryFrame {
        y,
        a_cov: [t.d[0], t.d[1], a3],
        a_con,
        a_lower,
        a_upper,
        b_lower,
        b_mixed,
        christoffel,
        db_mixed,
        sqrt_a,
        elasticity: elasticity_tensor(&a_upper, material),
    })
}

/// `a^{αβστ} = λ̄ a^{αβ}a^{στ} + 2μ(a^{ασ}a^{βτ} + a^{ατ}a^{βσ})` with `λ̄ = 4λμ/(λ+2μ)`.
pub fn elasticity_tensor(a_upper: &Mat2, material: &Material) -> Tensor4 {
    let lb = material.lambda_bar();
    let two_mu = 2.0 * material.mu;
    let mut c = [[[[0.0; 2]; 2]; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            for s in 0..2 {
                for t in 0..2 {
                    c[a][b][s][t] = lb * a_upper[a][b] * a_upper[s][t]
                        + two_mu * (a_upper[a][s] * a_upper[b][t] + a_upper[a][t] * a_upper[b][s]);
                }
            }
        }
    }
    c
}

/// `t ↦ a^{αβστ} t_{στ}` on 2×2 matrices.
#[inline]
pub fn contract(c: &Tensor4, t: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for a in 0..2 {
        for b in 0..2 {
            let mut acc = 0.0;
            for s in 0..2 {
                for u in 0..2 {
                    acc += c[a][b][s][u] * t[s][u];
                }
            }
            out[a][b] = acc;
        }
    }
    out
}

/// `a^{αβστ} s_{αβ} t_{στ}`.
#[inline]
pub fn quadratic_form(c: &Tensor4, s: &Mat2, t: &Mat2) -> f64 {
    frobenius(&contract(c, t), s)
}

#[inline]
pub fn frobenius(s: &Mat2, t: &Mat2) -> f64 {
    s[0][0] * t[0][0] + s[0][1] * t[0][1] + s[1][0] * t[1][0] + s[1][1] * t[1][1]
}

/// 3×3 representation of the elasticity quadratic form on symmetric matrices
/// in the Frobenius-orthonormal basis `{E₁₁, E₂₂, (E₁₂ + E₂₁)/√2}`.
pub fn symmetric_representation(c: &Tensor4) -> Matrix3<f64> {
    let r = core::f64::consts::FRAC_1_SQRT_2;
    let basis: [Mat2; 3] = [
        [[1.0, 0.0], [0.0, 0.0]],
        [[0.0, 0.0], [0.0, 1.0]],
        [[0.0, r], [r, 0.0]],
    ];
    Matrix3::from_fn(|i, j| quadratic_form(c, &basis[i], &basis[j]))
}

/// Smallest eigenvalue of the elasticity form on symmetric matrices, at one frame.
pub fn pointwise_coercivity(frame: &GeometryFrame) -> f64 {
    let m = symmetric_representation(&frame.elasticity);
    m.symmetric_eigenvalues().min()
}

/// Largest `c_e` with `a^{αβστ} t_{στ} t_{αβ} ≥ c_e Σ|t_{αβ}|²` over all given frames.
pub fn coercivity_constant<'a, I>(frames: I) -> Result<f64>
where
    I: IntoIterator<Item = &'a GeometryFrame>,
{
    frames
        .into_iter()
        .map(pointwise_coercivity)
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.min(v)))
        })
        .ok_or(Error::EmptyInput(
            "coercivity_constant needs at least one frame",
        ))
}

pub(crate) fn inverse2(m: &Mat2) -> Mat2 {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ]
}

pub(crate) fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut c = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    c
}

/// Largest deviations of a frame from its reconstruction by central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameResiduals {
    /// `a_i`, `a^i`, metric, inverse metric and `√a` against differences of `θ`.
    pub first_order: f64,
    /// `b_{αβ}`, `b^α_β` and `Γ^σ_{αβ}` against differences of the frame's `a_α`.
    pub second_order: f64,
    /// `∂_α b^τ_β` against differences of the frame's `b^τ_β`.
    pub third_order: f64,
    /// `Γ^σ_{αβ}` against `½ a^{στ}(∂_α a_{βτ} + ∂_β a_{ατ} − ∂_τ a_{αβ})`.
    pub christoffel_formula: f64,
}

impl FrameResiduals {
    pub fn finite_difference(&self) -> f64 {
        self.first_order
            .max(self.second_order)
            .max(self.third_order)
    }
}

fn max_dev(a: &Mat2, b: &Mat2) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max(libm::fabs(a[i][j] - b[i][j]));
        }
    }
    m
}

fn shifted(y: Point, axis: usize, h: f64) -> Point {
    let mut z = y;
    z[axis] += h;
    z
}

/// Compares the frame at `y` with central differences of step `h`; `y ± 2h`
/// must stay in the domain.
pub fn frame_residuals(
    chart: &Chart,
    material: &Material,
    y: Point,
    h: f64,
) -> Result<FrameResiduals> {
    if !(h > 0.0) {
        return Err(Error::InvalidParameter("difference step must be positive"));
    }
    let f = evaluate_frame(chart, material, y)?;
    let mut a = [vec3::ZERO; 2];
    for (al, slot) in a.iter_mut().enumerate() {
        let d = vec3::sub(
            chart.theta(shifted(y, al, h)),
            chart.theta(shifted(y, al, -h)),
        );
        *slot = vec3::scale(0.5 / h, d);
    }
    let n = vec3::cross(a[0], a[1]);
    let sqrt_a = vec3::norm(n);
    let a3 = vec3::scale(1.0 / sqrt_a, n);
    let mut g = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            g[i][j] = vec3::dot(a[i], a[j]);
        }
    }
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let gi = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut first = libm::fabs(sqrt_a - f.sqrt_a)
        .max(max_dev(&g, &f.a_lower))
        .max(max_dev(&gi, &f.a_upper));
    for i in 0..3 {
        first = first
            .max(libm::fabs(a3[i] - f.a_cov[2][i]))
            .max(libm::fabs(a3[i] - f.a_con[2][i]));
        for al in 0..2 {
            first = first.max(libm::fabs(a[al][i] - f.a_cov[al][i]));
            let con = gi[al][0] * a[0][i] + gi[al][1] * a[1][i];
            first = first.max(libm::fabs(con - f.a_con[al][i]));
        }
    }

    let mut second: f64 = 0.0;
    let mut third: f64 = 0.0;
    let mut b = [[0.0; 2]; 2];
    for al in 0..2 {
        let p = evaluate_frame(chart, material, shifted(y, al, h))?;
        let m = evaluate_frame(chart, material, shifted(y, al, -h))?;
        for be in 0..2 {
            let d = vec3::scale(0.5 / h, vec3::sub(p.a_cov[be], m.a_cov[be]));
            b[al][be] = vec3::dot(f.a_cov[2], d);
            for s in 0..2 {
                // ∂_α a_β = ∂_β a_α, so this is Γ^σ_{βα}
                second = second.max(libm::fabs(
                    vec3::dot(f.a_con[s], d) - f.christoffel[s][be][al],
                ));
            }
            for t in 0..2 {
                let db = 0.5 / h * (p.b_mixed[t][be] - m.b_mixed[t][be]);
                third = third.max(libm::fabs(db - f.db_mixed[al][t][be]));
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
        .max(max_dev(&b, &f.b_lower))
        .max(max_dev(&bm, &f.b_mixed));

    let t = chart.theta_jet(y);
    let mut da = [[[0.0; 2]; 2]; 2];
    for c in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                da[c][i][j] = vec3::dot(t.dd[c][i], t.d[j]) + vec3::dot(t.d[i], t.dd[c][j]);
            }
        }
    }
    let mut christoffel_formula: f64 = 0.0;
    for s in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut v = 0.0;
                for tau in 0..2 {
                    v += 0.5 * f.a_upper[s][tau] * (da[i][j][tau] + da[j][i][tau] - da[tau][i][j]);
                }
                christoffel_formula =
                    christoffel_formula.max(libm::fabs(v - f.christoffel[s][i][j]));
            }
        }
    }
    Ok(FrameResiduals {
        first_order: first,
        second_order: second,
        third_order: third,
        christoffel_formula,
    })
}
