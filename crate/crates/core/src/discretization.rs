//! Conforming clamped finite-element space for `X₀`.
//!
//! Tangential components `η₁, η₂` use biquadratic Lagrange elements with all
//! boundary nodes removed. The normal component `η₃` uses the
//! Bogner–Fox–Schmit bicubic Hermite element with value, `∂₁`, `∂₂`, `∂₁₂`
//! degrees of freedom, all four removed at boundary nodes so that
//! `η₃ = ∂_ν η₃ = 0` on the boundary.
//!
//! Hermite derivative degrees of freedom are stored scaled by the cell size
//! (`h₁ ∂₁u`, `h₂ ∂₂u`, `h₁h₂ ∂₁₂u`), which keeps all coefficients on the
//! same scale as nodal values.
//!
//! Global ordering: the `η₁` block, then `η₂`, then `η₃`.

use alloc::vec;
use alloc::vec::Vec;

use crate::geometry::{evaluate_frame, Chart, GeometryFrame, Material, Rect};
use crate::kinematics::{compute_phi, DisplacementJet, ExtendedJet};
use crate::quadrature::QuadratureRule;
use crate::{Error, Mat2, Point, Result};

/// Uniform axis-aligned mesh of a rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mesh {
    pub domain: Rect,
    pub nx: usize,
    pub ny: usize,
}

impl Mesh {
    pub fn new(domain: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::MeshTooCoarse(
                "at least 2 cells per axis are required",
            ));
        }
        Ok(Self { domain, nx, ny })
    }

    pub fn hx(&self) -> f64 {
        self.domain.width() / self.nx as f64
    }

    pub fn hy(&self) -> f64 {
        self.domain.height() / self.ny as f64
    }

    pub fn num_cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Vertex `(i, j)`, `0 ≤ i ≤ nx`, `0 ≤ j ≤ ny`.
    pub fn node(&self, i: usize, j: usize) -> Point {
        [
            self.domain.min[0] + i as f64 * self.hx(),
            self.domain.min[1] + j as f64 * self.hy(),
        ]
    }

    /// Cell indices and reference coordinates of `y`.
    pub fn locate(&self, y: Point) -> Result<(usize, usize, Point)> {
        if !self.domain.contains(y) {
            return Err(Error::DomainViolation { y0: y[0], y1: y[1] });
        }
        let fx = (y[0] - self.domain.min[0]) / self.hx();
        let fy = (y[1] - self.domain.min[1]) / self.hy();
        let ci = (libm::floor(fx).max(0.0) as usize).min(self.nx - 1);
        let cj = (libm::floor(fy).max(0.0) as usize).min(self.ny - 1);
        Ok((ci, cj, [fx - ci as f64, fy - cj as f64]))
    }
}

/// Value and physical partial derivatives of one shape function.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ShapeValue {
    pub v: f64,
    pub d: [f64; 2],
    pub dd: Mat2,
}

// 1D quadratic Lagrange on [0,1] with nodes 0, ½, 1: (value, first, second)
fn lagrange_1d(a: usize, s: f64) -> [f64; 3] {
    match a {
        0 => [2.0 * (s - 0.5) * (s - 1.0), 4.0 * s - 3.0, 4.0],
        1 => [-4.0 * s * (s - 1.0), -8.0 * s + 4.0, -8.0],
        _ => [2.0 * s * (s - 0.5), 4.0 * s - 1.0, 4.0],
    }
}

// 1D cubic Hermite on [0,1]; end `a` in {0,1}, kind `p` in {value, slope}
fn hermite_1d(a: usize, p: usize, s: f64) -> [f64; 3] {
    let (s2, s3) = (s * s, s * s * s);
    match (a, p) {
        (0, 0) => [
            1.0 - 3.0 * s2 + 2.0 * s3,
            -6.0 * s + 6.0 * s2,
            -6.0 + 12.0 * s,
        ],
        (0, _) => [s - 2.0 * s2 + s3, 1.0 - 4.0 * s + 3.0 * s2, -4.0 + 6.0 * s],
        (_, 0) => [3.0 * s2 - 2.0 * s3, 6.0 * s - 6.0 * s2, 6.0 - 12.0 * s],
        _ => [-s2 + s3, -2.0 * s + 3.0 * s2, -2.0 + 6.0 * s],
    }
}

fn tensor_shape(fx: [f64; 3], fy: [f64; 3], hx: f64, hy: f64) -> ShapeValue {
    ShapeValue {
        v: fx[0] * fy[0],
        d: [fx[1] * fy[0] / hx, fx[0] * fy[1] / hy],
        dd: [
            [fx[2] * fy[0] / (hx * hx), fx[1] * fy[1] / (hx * hy)],
            [fx[1] * fy[1] / (hx * hy), fx[0] * fy[2] / (hy * hy)],
        ],
    }
}

/// Degree-of-freedom bookkeeping for the clamped space.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    pub nx: usize,
    pub ny: usize,
    /// Interior Lagrange nodes per tangential component, `(2nx−1)(2ny−1)`.
    pub n_lagrange: usize,
    /// Hermite degrees of freedom, `4(nx−1)(ny−1)`.
    pub n_bfs: usize,
}

impl BasisSet {
    pub fn new(mesh: &Mesh) -> Result<Self> {
        let n_lagrange = (2 * mesh.nx - 1) * (2 * mesh.ny - 1);
        let n_bfs = 4 * (mesh.nx - 1) * (mesh.ny - 1);
        if n_lagrange == 0 || n_bfs == 0 {
            return Err(Error::MeshTooCoarse("a basis block is empty"));
        }
        Ok(Self {
            nx: mesh.nx,
            ny: mesh.ny,
            n_lagrange,
            n_bfs,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n_lagrange + self.n_bfs
    }

    pub fn tangential_dim(&self) -> usize {
        2 * self.n_lagrange
    }

    /// Offset of component `c` (0, 1, 2) in the global vector.
    pub fn offset(&self, c: usize) -> usize {
        c * self.n_lagrange
    }

    /// Index inside a tangential block of Lagrange node `(gi, gj)`,
    /// `0 ≤ gi ≤ 2nx`, or `None` on the boundary.
    pub fn lagrange_index(&self, gi: usize, gj: usize) -> Option<usize> {
        let (mx, my) = (2 * self.nx, 2 * self.ny);
        if gi == 0 || gj == 0 || gi >= mx || gj >= my {
            return None;
        }
        Some((gj - 1) * (mx - 1) + (gi - 1))
    }

    /// Global index of Hermite dof `kind` (0 value, 1 `∂₁`, 2 `∂₂`, 3 `∂₁₂`)
    /// at vertex `(i, j)`, or `None` on the boundary.
    pub fn bfs_index(&self, i: usize, j: usize, kind: usize) -> Option<usize> {
        if i == 0 || j == 0 || i >= self.nx || j >= self.ny {
            return None;
        }
        Some(2 * self.n_lagrange + 4 * ((j - 1) * (self.nx - 1) + (i - 1)) + kind)
    }
}

/// Global dofs touching one cell. Lagrange entries index inside a component
/// block; Hermite entries are global.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDofs {
    pub lagrange: [Option<usize>; 9],
    pub bfs: [Option<usize>; 16],
}

/// A quadrature point of the mesh.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    /// Running index over all quadrature points (cell-major).
    pub index: usize,
    pub cell: usize,
    /// Index inside the reference rule.
    pub local: usize,
    pub y: Point,
    /// Physical weight (reference weight × cell area).
    pub weight: f64,
}

/// One basis function restricted to a point: global dof, component, shape data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisEntry {
    pub dof: usize,
    pub component: usize,
    pub shape: ShapeValue,
}

impl BasisEntry {
    /// Jet of this basis function (unit coefficient).
    pub fn jet(&self) -> ExtendedJet {
        let mut ext = ExtendedJet::default();
        let c = self.component;
        ext.jet.eta[c] = self.shape.v;
        ext.jet.d_eta[c] = self.shape.d;
        ext.dd_eta[c] = self.shape.dd;
        if c == 2 {
            ext.jet.dd_eta3 = self.shape.dd;
        }
        ext
    }
}

/// Coefficient vector over a [`BasisSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementField {
    pub coeffs: Vec<f64>,
}

impl DisplacementField {
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| s * c).collect(),
        }
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        Self {
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// Norms of a displacement field.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SobolevNorms {
    /// `‖η_α‖₁,₂`.
    pub eta_h1: [f64; 2],
    /// `‖η₃‖₂,₂`.
    pub eta3_h2: f64,
    /// `‖φ_α‖₄`.
    pub phi_l4: [f64; 2],
    /// `‖η₁‖₁,₂ + ‖η₂‖₁,₂ + ‖η₃‖₂,₂`.
    pub x0: f64,
}

/// Analytic displacement used by [`Space::interpolate`].
pub struct AnalyticField<'a> {
    pub eta1: &'a dyn Fn(Point) -> f64,
    pub eta2: &'a dyn Fn(Point) -> f64,
    /// `(u, ∂₁u, ∂₂u, ∂₁₂u)`.
    pub eta3: &'a dyn Fn(Point) -> [f64; 4],
}

const BOUNDARY_TOL: f64 = 1e-8;
const BOUNDARY_SAMPLES_PER_SIDE: usize = 250;

/// Mesh, basis and quadrature together.
#[derive(Debug, Clone, PartialEq)]
pub struct Space {
    pub mesh: Mesh,
    pub basis: BasisSet,
    pub quad: QuadratureRule,
    cells: Vec<CellDofs>,
    lag_shapes: Vec<[ShapeValue; 9]>,
    bfs_shapes: Vec<[ShapeValue; 16]>,
}

impl Space {
    /// Builds the clamped space with a `q × q` Gauss rule per cell (`q ≥ 4`).
    pub fn build(mesh: Mesh, quad_order: usize) -> Result<Self> {
        if quad_order < 4 {
            return Err(Error::InvalidParameter("quadrature order must be >= 4"));
        }
        let basis = BasisSet::new(&mesh)?;
        let quad = QuadratureRule::new(quad_order)?;
        let mut cells = Vec::with_capacity(mesh.num_cells());
        for cj in 0..mesh.ny {
            for ci in 0..mesh.nx {
                let mut lagrange = [None; 9];
                for b in 0..3 {
                    for a in 0..3 {
                        lagrange[3 * b + a] = basis.lagrange_index(2 * ci + a, 2 * cj + b);
                    }
                }
                let mut bfs = [None; 16];
                for (k, slot) in bfs.iter_mut().enumerate() {
                    let (corner, kind) = (k / 4, k % 4);
                    let (a, b) = (corner % 2, corner / 2);
                    *slot = basis.bfs_index(ci + a, cj + b, kind);
                }
                cells.push(CellDofs { lagrange, bfs });
            }
        }
        let (hx, hy) = (mesh.hx(), mesh.hy());
        let lag_shapes = quad
            .points
            .iter()
            .map(|&p| lagrange_shapes(p, hx, hy))
            .collect();
        let bfs_shapes = quad.points.iter().map(|&p| bfs_shapes(p, hx, hy)).collect();
        Ok(Self {
            mesh,
            basis,
            quad,
            cells,
            lag_shapes,
            bfs_shapes,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn zero_field(&self) -> DisplacementField {
        DisplacementField {
            coeffs: vec![0.0; self.dim()],
        }
    }

    pub fn field(&self, coeffs: Vec<f64>) -> Result<DisplacementField> {
        if coeffs.len() != self.dim() {
            return Err(Error::InvalidParameter(
                "coefficient vector length does not match the space",
            ));
        }
        Ok(DisplacementField { coeffs })
    }

    pub fn num_points(&self) -> usize {
        self.mesh.num_cells() * self.quad.len()
    }

    pub fn cell_dofs(&self, cell: usize) -> &CellDofs {
        &self.cells[cell]
    }

    /// All quadrature points, cell by cell in a fixed order.
    pub fn quad_points(&self) -> impl Iterator<Item = QuadPoint> + '_ {
        let (hx, hy) = (self.mesh.hx(), self.mesh.hy());
        let nq = self.quad.len();
        let area = hx * hy;
        (0..self.mesh.num_cells()).flat_map(move |cell| {
            let (ci, cj) = (cell % self.mesh.nx, cell / self.mesh.nx);
            let origin = self.mesh.node(ci, cj);
            (0..nq).map(move |local| {
                let p = self.quad.points[local];
                QuadPoint {
                    index: cell * nq + local,
                    cell,
                    local,
                    y: [origin[0] + p[0] * hx, origin[1] + p[1] * hy],
                    weight: self.quad.weights[local] * area,
                }
            })
        })
    }

    /// Nonzero basis functions at a quadrature point.
    pub fn point_basis(&self, qp: &QuadPoint) -> impl Iterator<Item = BasisEntry> + '_ {
        let dofs = self.cells[qp.cell];
        let lag = &self.lag_shapes[qp.local];
        let bfs = &self.bfs_shapes[qp.local];
        entries(&self.basis, dofs, lag, bfs)
    }

    /// Jet of `field` at a quadrature point.
    pub fn jet_at(&self, field: &DisplacementField, qp: &QuadPoint) -> DisplacementJet {
        accumulate(self.point_basis(qp), &field.coeffs).jet
    }

    pub fn extended_jet_at(&self, field: &DisplacementField, qp: &QuadPoint) -> ExtendedJet {
        accumulate(self.point_basis(qp), &field.coeffs)
    }

    /// Nonzero basis functions at an arbitrary point of the domain.
    pub fn basis_at(&self, y: Point) -> Result<Vec<BasisEntry>> {
        let (ci, cj, p) = self.mesh.locate(y)?;
        let dofs = self.cells[cj * self.mesh.nx + ci];
        let lag = lagrange_shapes(p, self.mesh.hx(), self.mesh.hy());
        let bfs = bfs_shapes(p, self.mesh.hx(), self.mesh.hy());
        Ok(entries(&self.basis, dofs, &lag, &bfs).collect())
    }

    pub fn evaluate_jet(&self, field: &DisplacementField, y: Point) -> Result<DisplacementJet> {
        Ok(self.evaluate_extended_jet(field, y)?.jet)
    }

    pub fn evaluate_extended_jet(
        &self,
        field: &DisplacementField,
        y: Point,
    ) -> Result<ExtendedJet> {
        self.check_len(field)?;
        Ok(accumulate(self.basis_at(y)?.into_iter(), &field.coeffs))
    }

    fn check_len(&self, field: &DisplacementField) -> Result<()> {
        if field.coeffs.len() != self.dim() {
            return Err(Error::InvalidParameter(
                "coefficient vector length does not match the space",
            ));
        }
        Ok(())
    }

    /// Nodal interpolation of an analytic displacement.
    pub fn interpolate(&self, f: &AnalyticField<'_>) -> Result<DisplacementField> {
        let d = &self.mesh.domain;
        let mut worst: f64 = 0.0;
        let n = BOUNDARY_SAMPLES_PER_SIDE;
        for k in 0..=n {
            let s = k as f64 / n as f64;
            let x = d.min[0] + s * d.width();
            let y = d.min[1] + s * d.height();
            for p in [[x, d.min[1]], [x, d.max[1]], [d.min[0], y], [d.max[0], y]] {
                let e3 = (f.eta3)(p);
                worst = worst
                    .max((f.eta1)(p).abs())
                    .max((f.eta2)(p).abs())
                    .max(e3[0].abs())
                    .max(e3[1].abs())
                    .max(e3[2].abs());
            }
        }
        if worst > BOUNDARY_TOL {
            return Err(Error::BoundaryViolation { max: worst });
        }

        let mut coeffs = vec![0.0; self.dim()];
        let (hx, hy) = (0.5 * self.mesh.hx(), 0.5 * self.mesh.hy());
        for gj in 0..=2 * self.mesh.ny {
            for gi in 0..=2 * self.mesh.nx {
                if let Some(idx) = self.basis.lagrange_index(gi, gj) {
                    let p = [d.min[0] + gi as f64 * hx, d.min[1] + gj as f64 * hy];
                    coeffs[self.basis.offset(0) + idx] = (f.eta1)(p);
                    coeffs[self.basis.offset(1) + idx] = (f.eta2)(p);
                }
            }
        }
        let (hx, hy) = (self.mesh.hx(), self.mesh.hy());
        for j in 0..=self.mesh.ny {
            for i in 0..=self.mesh.nx {
                if let Some(base) = self.basis.bfs_index(i, j, 0) {
                    let v = (f.eta3)(self.mesh.node(i, j));
                    coeffs[base] = v[0];
                    coeffs[base + 1] = hx * v[1];
                    coeffs[base + 2] = hy * v[2];
                    coeffs[base + 3] = hx * hy * v[3];
                }
            }
        }
        Ok(DisplacementField { coeffs })
    }

    /// `‖η_α‖₁,₂` and `‖η₃‖₂,₂` by quadrature (flat measure `dy`).
    pub fn component_norms(&self, field: &DisplacementField) -> ([f64; 2], f64) {
        let mut h1 = [0.0; 2];
        let mut h2 = 0.0;
        for qp in self.quad_points() {
            let j = self.extended_jet_at(field, &qp);
            for (c, acc) in h1.iter_mut().enumerate() {
                let d = j.jet.d_eta[c];
                *acc += qp.weight * (j.jet.eta[c] * j.jet.eta[c] + d[0] * d[0] + d[1] * d[1]);
            }
            let d = j.jet.d_eta[2];
            let dd = j.jet.dd_eta3;
            h2 += qp.weight
                * (j.jet.eta[2] * j.jet.eta[2]
                    + d[0] * d[0]
                    + d[1] * d[1]
                    + dd[0][0] * dd[0][0]
                    + 2.0 * dd[0][1] * dd[0][1]
                    + dd[1][1] * dd[1][1]);
        }
        ([libm::sqrt(h1[0]), libm::sqrt(h1[1])], libm::sqrt(h2))
    }

    /// The `X₀`-norm `‖η₁‖₁,₂ + ‖η₂‖₁,₂ + ‖η₃‖₂,₂`.
    pub fn x0_norm(&self, field: &DisplacementField) -> f64 {
        let (h1, h2) = self.component_norms(field);
        h1[0] + h1[1] + h2
    }

    /// Geometry frames at every quadrature point, in [`Space::quad_points`] order.
    pub fn frames(&self, chart: &Chart, material: &Material) -> Result<Vec<GeometryFrame>> {
        self.quad_points()
            .map(|qp| evaluate_frame(chart, material, qp.y))
            .collect()
    }

    /// All norms, with `φ` evaluated from `frames` (one per quadrature point,
    /// in [`Space::quad_points`] order).
    pub fn sobolev_norms(
        &self,
        field: &DisplacementField,
        frames: &[GeometryFrame],
    ) -> SobolevNorms {
        let (eta_h1, eta3_h2) = self.component_norms(field);
        let mut phi4 = [0.0; 2];
        for qp in self.quad_points() {
            let jet = self.jet_at(field, &qp);
            let phi = compute_phi(&frames[qp.index], &jet);
            for a in 0..2 {
                let p2 = phi[a] * phi[a];
                phi4[a] += qp.weight * p2 * p2;
            }
        }
        SobolevNorms {
            eta_h1,
            eta3_h2,
            phi_l4: [
                libm::sqrt(libm::sqrt(phi4[0])),
                libm::sqrt(libm::sqrt(phi4[1])),
            ],
            x0: eta_h1[0] + eta_h1[1] + eta3_h2,
        }
    }
}

fn lagrange_shapes(p: Point, hx: f64, hy: f64) -> [ShapeValue; 9] {
    let mut out = [ShapeValue::default(); 9];
    for b in 0..3 {
        for a in 0..3 {
            out[3 * b + a] = tensor_shape(lagrange_1d(a, p[0]), lagrange_1d(b, p[1]), hx, hy);
        }
    }
    out
}

fn bfs_shapes(p: Point, hx: f64, hy: f64) -> [ShapeValue; 16] {
    let mut out = [ShapeValue::default(); 16];
    for (k, slot) in out.iter_mut().enumerate() {
        let (corner, kind) = (k / 4, k % 4);
        let (a, b) = (corner % 2, corner / 2);
        let (px, py) = (kind % 2, kind / 2);
        *slot = tensor_shape(hermite_1d(a, px, p[0]), hermite_1d(b, py, p[1]), hx, hy);
    }
    out
}

fn entries<'a>(
    basis: &'a BasisSet,
    dofs: CellDofs,
    lag: &'a [ShapeValue; 9],
    bfs: &'a [ShapeValue; 16],
) -> impl Iterator<Item = BasisEntry> + 'a {
    let tangential = (0..2).flat_map(move |c| {
        (0..9).filter_map(move |k| {
            dofs.lagrange[k].map(|idx| BasisEntry {
                dof: basis.offset(c) + idx,
                component: c,
                shape: lag[k],
            })
        })
    });
    let normal = (0..16).filter_map(move |k| {
        dofs.bfs[k].map(|dof| BasisEntry {
            dof,
            component: 2,
            shape: bfs[k],
        })
    });
    tangential.chain(normal)
}

fn accumulate(entries: impl Iterator<Item = BasisEntry>, coeffs: &[f64]) -> ExtendedJet {
    let mut ext = ExtendedJet::default();
    for e in entries {
        let c = coeffs[e.dof];
        if c == 0.0 {
            continue;
        }
        let comp = e.component;
        ext.jet.eta[comp] += c * e.shape.v;
        for a in 0..2 {
            ext.jet.d_eta[comp][a] += c * e.shape.d[a];
            for b in 0..2 {
                ext.dd_eta[comp][a][b] += c * e.shape.dd[a][b];
            }
        }
    }
    ext.jet.dd_eta3 = ext.dd_eta[2];
    ext
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn space(n: usize) -> Space {
        Space::build(Mesh::new(Rect::unit(), n, n).unwrap(), 4).unwrap()
    }

    // enumeration oracle: count mesh nodes strictly inside the square
    fn count_interior(nodes_per_axis: usize) -> usize {
        let mut count = 0;
        for j in 0..nodes_per_axis {
            for i in 0..nodes_per_axis {
                if i > 0 && j > 0 && i + 1 < nodes_per_axis && j + 1 < nodes_per_axis {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn dimension_counts() {
        for (n, tang, bfs) in [(2, 18, 4), (4, 98, 36)] {
            let s = space(n);
            assert_eq!(s.basis.tangential_dim(), tang);
            assert_eq!(s.basis.n_bfs, bfs);
            assert_eq!(2 * count_interior(2 * n + 1), tang);
            assert_eq!(4 * count_interior(n + 1), bfs);
        }
    }

    #[test]
    fn coarse_meshes_rejected() {
        assert!(matches!(
            Mesh::new(Rect::unit(), 1, 3),
            Err(Error::MeshTooCoarse(_))
        ));
        let mesh = Mesh::new(Rect::unit(), 2, 2).unwrap();
        assert!(Space::build(mesh, 3).is_err());
    }

    #[test]
    fn quadrature_weights_cover_domain() {
        let s = Space::build(
            Mesh::new(Rect::new([0.0, -1.0], [2.0, 0.5]).unwrap(), 3, 5).unwrap(),
            4,
        )
        .unwrap();
        let total: f64 = s.quad_points().map(|q| q.weight).sum();
        assert_abs_diff_eq!(total, 3.0, epsilon = 1e-13);
        assert!(s.quad_points().all(|q| q.weight > 0.0));
        assert_eq!(s.quad_points().count(), s.num_points());
    }

    #[test]
    fn zero_field_gives_zero_jet() {
        let s = space(3);
        let j = s.evaluate_jet(&s.zero_field(), [0.3, 0.4]).unwrap();
        assert_eq!(j, DisplacementJet::zero());
    }

    #[test]
    fn hermite_reproduces_cubic_data() {
        // value and slope interpolation at both ends
        for s in [0.0, 1.0] {
            let end = s as usize;
            for a in 0..2 {
                for p in 0..2 {
                    let h = hermite_1d(a, p, s);
                    let expected_v = if a == end && p == 0 { 1.0 } else { 0.0 };
                    let expected_d = if a == end && p == 1 { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(h[0], expected_v, epsilon = 1e-15);
                    assert_abs_diff_eq!(h[1], expected_d, epsilon = 1e-15);
                }
            }
        }
    }

    #[test]
    fn out_of_domain_jet() {
        let s = space(2);
        assert!(matches!(
            s.evaluate_jet(&s.zero_field(), [1.2, 0.5]),
            Err(Error::DomainViolation { .. })
        ));
    }

    #[test]
    fn interpolation_rejects_boundary_violations() {
        let s = space(2);
        let one = |_: Point| 1.0;
        let zero = |_: Point| 0.0;
        let zero3 = |_: Point| [0.0; 4];
        let f = AnalyticField {
            eta1: &one,
            eta2: &zero,
            eta3: &zero3,
        };
        assert!(matches!(
            s.interpolate(&f),
            Err(Error::BoundaryViolation { .. })
        ));
    }

    #[test]
    fn zero_interpolant() {
        let s = space(3);
        let zero = |_: Point| 0.0;
        let zero3 = |_: Point| [0.0; 4];
        let f = AnalyticField {
            eta1: &zero,
            eta2: &zero,
            eta3: &zero3,
        };
        assert_eq!(s.interpolate(&f).unwrap(), s.zero_field());
        let n = s.component_norms(&s.zero_field());
        assert_eq!(n, ([0.0; 2], 0.0));
    }
}
