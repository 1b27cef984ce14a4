//! Applied force densities `f = f^i a_i`, given by contravariant components.
//!
//! The special family is generated by a scalar potential `g`:
//! `f¹ = g(b¹₁ + b¹₂)`, `f² = g(b²₁ + b²₂)`, `f³ = ∂₁g + ∂₂g`, with `g` a
//! rescaled and translated smooth bump.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::discretization::Space;
use crate::geometry::{GeometryFrame, Rect};
use crate::{Error, Point, Result};

/// Below this exponent the bump is returned as exactly zero.
const EXPONENT_FLOOR: f64 = -700.0;

/// `p(x) = exp(1 / (|x − z|² − 1))` inside the unit ball around `z`, zero outside.
pub fn bump(x: Point, z: Point) -> f64 {
    let r2 = (x[0] - z[0]) * (x[0] - z[0]) + (x[1] - z[1]) * (x[1] - z[1]);
    if r2 >= 1.0 {
        return 0.0;
    }
    let e = 1.0 / (r2 - 1.0);
    if e < EXPONENT_FLOOR {
        0.0
    } else {
        libm::exp(e)
    }
}

/// Provenance of a force field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceKind {
    Zero,
    Special,
    PerturbedSpecial,
    Custom,
}

impl ForceKind {
    pub fn name(&self) -> &'static str {
        match self {
            ForceKind::Zero => "zero",
            ForceKind::Special => "special",
            ForceKind::PerturbedSpecial => "perturbed_special",
            ForceKind::Custom => "custom",
        }
    }
}

/// Force evaluator: contravariant components at a point, given its frame.
pub type ForceFn = Arc<dyn Fn(Point, &GeometryFrame) -> [f64; 3] + Send + Sync>;

/// Scalar function of the parameter point.
pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct ForceField {
    pub kind: ForceKind,
    /// Generating parameters when the field comes from the special family.
    pub special: Option<SpecialForceSpec>,
    eval: ForceFn,
}

impl core::fmt::Debug for ForceField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ForceField")
            .field("kind", &self.kind)
            .field("special", &self.special)
            .finish()
    }
}

impl ForceField {
    pub fn zero() -> Self {
        Self {
            kind: ForceKind::Zero,
            special: None,
            eval: Arc::new(|_, _| [0.0; 3]),
        }
    }

    pub fn custom(eval: ForceFn) -> Self {
        Self {
            kind: ForceKind::Custom,
            special: None,
            eval,
        }
    }

    /// Contravariant components `(f¹, f², f³)` at `y`.
    pub fn eval(&self, y: Point, frame: &GeometryFrame) -> [f64; 3] {
        (self.eval)(y, frame)
    }

    /// `s · f`.
    pub fn scaled(&self, s: f64) -> Self {
        let inner = self.eval.clone();
        Self {
            kind: self.kind,
            special: self.special.map(|sp| SpecialForceSpec {
                amplitude: sp.amplitude * s,
                ..sp
            }),
            eval: Arc::new(move |y, fr| {
                let f = inner(y, fr);
                [s * f[0], s * f[1], s * f[2]]
            }),
        }
    }

    /// `‖f^i‖₂` (flat measure) by the space's quadrature.
    pub fn component_norms(&self, space: &Space, frames: &[GeometryFrame]) -> [f64; 3] {
        let mut acc = [0.0; 3];
        for qp in space.quad_points() {
            let f = self.eval(qp.y, &frames[qp.index]);
            for i in 0..3 {
                acc[i] += qp.weight * f[i] * f[i];
            }
        }
        [libm::sqrt(acc[0]), libm::sqrt(acc[1]), libm::sqrt(acc[2])]
    }

    /// `Σᵢ ‖f^i‖₂`.
    pub fn sum_norm(&self, space: &Space, frames: &[GeometryFrame]) -> f64 {
        self.component_norms(space, frames).iter().sum()
    }

    /// `l = maxᵢ ‖f^i‖₂`.
    pub fn max_norm(&self, space: &Space, frames: &[GeometryFrame]) -> f64 {
        self.component_norms(space, frames)
            .iter()
            .fold(0.0, |a: f64, &b| a.max(b))
    }
}

/// Parameters of a special force: bump center `z`, scale `n` (support radius
/// `1/n`) and amplitude `k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialForceSpec {
    pub center: Point,
    pub scale: f64,
    pub amplitude: f64,
}

impl SpecialForceSpec {
    /// Center of the domain, support radius a quarter of the shorter side.
    pub fn default_for(domain: &Rect, amplitude: f64) -> Self {
        let radius = 0.25 * domain.width().min(domain.height());
        Self {
            center: domain.center(),
            scale: 1.0 / radius,
            amplitude,
        }
    }

    pub fn support_radius(&self) -> f64 {
        1.0 / self.scale
    }

    /// Checks that the closed ball `B̄(z, 1/n)` lies inside the open domain.
    pub fn validate(&self, domain: &Rect) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite() && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(
                "special force needs n > 0 and finite k",
            ));
        }
        if domain.distance_to_boundary(self.center) <= self.support_radius() {
            return Err(Error::SupportViolation);
        }
        Ok(())
    }

    /// `g(x) = k p(n(x − z) + z)` and its gradient.
    pub fn potential(&self, x: Point) -> (f64, [f64; 2]) {
        let z = self.center;
        let n = self.scale;
        let u = [n * (x[0] - z[0]) + z[0], n * (x[1] - z[1]) + z[1]];
        let p = bump(u, z);
        if p == 0.0 {
            return (0.0, [0.0; 2]);
        }
        let r2 = (u[0] - z[0]) * (u[0] - z[0]) + (u[1] - z[1]) * (u[1] - z[1]);
        let denom = r2 - 1.0;
        // ∂_x exp(1/(r²−1)) = exp(..) · (−2 (u − z) / (r²−1)²) · n
        let factor = -2.0 * n / (denom * denom);
        let g = self.amplitude * p;
        (g, [g * factor * (u[0] - z[0]), g * factor * (u[1] - z[1])])
    }

    /// Contravariant components of the force generated by this potential.
    pub fn components(&self, x: Point, frame: &GeometryFrame) -> [f64; 3] {
        let (g, dg) = self.potential(x);
        let b = &frame.b_mixed;
        [
            g * (b[0][0] + b[0][1]),
            g * (b[1][0] + b[1][1]),
            dg[0] + dg[1],
        ]
    }
}

/// Builds the special force of `spec` on `domain`.
pub fn special_force(spec: SpecialForceSpec, domain: &Rect) -> Result<ForceField> {
    spec.validate(domain)?;
    Ok(ForceField {
        kind: ForceKind::Special,
        special: Some(spec),
        eval: Arc::new(move |y, frame| spec.components(y, frame)),
    })
}

/// Magnitude requested from [`scale_to_magnitude`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MagnitudeTarget {
    /// `Σᵢ ‖f^i‖₂ > M`.
    AtLeast(f64),
    /// `Σᵢ ‖f^i‖₂ < δ`.
    AtMost(f64),
}

/// Outcome of [`scale_to_magnitude`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledSpecial {
    pub spec: SpecialForceSpec,
    /// `Σᵢ ‖f^i‖₂` at unit amplitude.
    pub base_sum_norm: f64,
    /// `Σᵢ ‖f^i‖₂` re-measured after scaling.
    pub achieved_sum_norm: f64,
}

const UPPER_SAFETY: f64 = 1.1;
const LOWER_SAFETY: f64 = 0.9;

/// Chooses the amplitude so that the special force exceeds `M` (or stays
/// below `δ`) in the sum of component `L²` norms.
pub fn scale_to_magnitude(
    spec: SpecialForceSpec,
    domain: &Rect,
    space: &Space,
    frames: &[GeometryFrame],
    target: MagnitudeTarget,
) -> Result<ScaledSpecial> {
    let unit = SpecialForceSpec {
        amplitude: 1.0,
        ..spec
    };
    let base = special_force(unit, domain)?.sum_norm(space, frames);
    if base <= 1e-14 {
        return Err(Error::DegenerateBase { norm: base });
    }
    let amplitude = match target {
        MagnitudeTarget::AtLeast(m) if m > 0.0 => UPPER_SAFETY * m / base,
        MagnitudeTarget::AtMost(d) if d > 0.0 => LOWER_SAFETY * d / base,
        _ => return Err(Error::InvalidParameter("magnitude target must be positive")),
    };
    let scaled = SpecialForceSpec { amplitude, ..spec };
    let achieved = special_force(scaled, domain)?.sum_norm(space, frames);
    let ok = match target {
        MagnitudeTarget::AtLeast(m) => achieved > m,
        MagnitudeTarget::AtMost(d) => achieved < d,
    };
    if !ok {
        return Err(Error::DegenerateBase { norm: achieved });
    }
    Ok(ScaledSpecial {
        spec: scaled,
        base_sum_norm: base,
        achieved_sum_norm: achieved,
    })
}

/// `f^i = f̄^i + h^i`; returns the perturbed field and `l = maxᵢ ‖h^i‖₂`.
pub fn perturb(base: &ForceField, h: [ScalarFn; 3], space: &Space) -> (ForceField, f64) {
    let mut acc = [0.0; 3];
    for qp in space.quad_points() {
        for i in 0..3 {
            let v = h[i](qp.y);
            acc[i] += qp.weight * v * v;
        }
    }
    let l = acc.iter().map(|&a| libm::sqrt(a)).fold(0.0, f64::max);
    let inner = base.eval.clone();
    let kind = match base.kind {
        ForceKind::Special | ForceKind::PerturbedSpecial => ForceKind::PerturbedSpecial,
        _ => ForceKind::Custom,
    };
    let field = ForceField {
        kind,
        special: base.special,
        eval: Arc::new(move |y, frame| {
            let f = inner(y, frame);
            [f[0] + h[0](y), f[1] + h[1](y), f[2] + h[2](y)]
        }),
    };
    (field, l)
}

/// Force components sampled on a tensor grid, bilinearly interpolated.
#[derive(Debug, Clone, PartialEq)]
pub struct GridForce {
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Row-major over `(ys, xs)`.
    values: Vec<[f64; 3]>,
}

impl GridForce {
    /// Builds the grid from `(y₁, y₂, f¹, f², f³)` rows in any order. Every
    /// combination of the distinct `y₁` and `y₂` values must appear exactly once.
    pub fn from_rows(rows: &[[f64; 5]]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("force grid has no rows"));
        }
        let mut xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
        let mut ys: Vec<f64> = rows.iter().map(|r| r[1]).collect();
        for v in [&mut xs, &mut ys] {
            v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(core::cmp::Ordering::Equal));
            v.dedup();
        }
        if xs.len() < 2 || ys.len() < 2 || xs.len() * ys.len() != rows.len() {
            return Err(Error::InvalidParameter(
                "force rows must form a complete grid with >= 2 points per axis",
            ));
        }
        let mut values = alloc::vec![[f64::NAN; 3]; rows.len()];
        for r in rows {
            let i = xs.iter().position(|&x| x == r[0]).unwrap_or(0);
            let j = ys.iter().position(|&y| y == r[1]).unwrap_or(0);
            values[j * xs.len() + i] = [r[2], r[3], r[4]];
        }
        if values.iter().any(|v| v[0].is_nan()) {
            return Err(Error::InvalidParameter("force grid has duplicate rows"));
        }
        Ok(Self { xs, ys, values })
    }

    fn bracket(axis: &[f64], x: f64) -> (usize, f64) {
        let n = axis.len();
        let x = x.clamp(axis[0], axis[n - 1]);
        let mut i = axis.partition_point(|&a| a <= x).saturating_sub(1);
        if i >= n - 1 {
            i = n - 2;
        }
        (i, (x - axis[i]) / (axis[i + 1] - axis[i]))
    }

    pub fn eval(&self, y: Point) -> [f64; 3] {
        let (i, s) = Self::bracket(&self.xs, y[0]);
        let (j, t) = Self::bracket(&self.ys, y[1]);
        let nx = self.xs.len();
        let v = |ii: usize, jj: usize| self.values[jj * nx + ii];
        let (a, b, c, d) = (v(i, j), v(i + 1, j), v(i, j + 1), v(i + 1, j + 1));
        let mut out = [0.0; 3];
        for k in 0..3 {
            out[k] = (1.0 - s) * (1.0 - t) * a[k]
                + s * (1.0 - t) * b[k]
                + (1.0 - s) * t * c[k]
                + s * t * d[k];
        }
        out
    }

    pub fn into_force(self) -> ForceField {
        ForceField::custom(Arc::new(move |y, _| self.eval(y)))
    }
}
