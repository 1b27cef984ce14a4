//! Total energy `J(η) = ∫ (ε/2) W^M + (ε³/6) W^F − f·η  √a dy` and its exact
//! gradient with respect to the basis coefficients.
//!
//! Every strain measure is linear in the jet except the `½φφ` term of `G^BS`,
//! so at each quadrature point the values of `γ`, `φ` and `ρ^BS` of every
//! active basis function are tabulated once. Energy and gradient then reduce
//! to small dense contractions, summed cell by cell in a fixed order so that
//! results are bitwise reproducible.

use alloc::vec;
use alloc::vec::Vec;

use crate::discretization::{DisplacementField, SobolevNorms, Space};
use crate::forces::ForceField;
use crate::geometry::{contract, frobenius, Chart, GeometryFrame, Material};
use crate::kinematics::{compute_gamma, compute_phi, compute_rho_bs, DisplacementJet};
use crate::{Error, Mat2, Result, Tensor4};

/// Energy split into its three parts.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EnergyBreakdown {
    /// `∫ (ε/2) a^{αβστ} G^BS_{στ} G^BS_{αβ} √a dy`.
    pub membrane: f64,
    /// `∫ (ε³/6) a^{αβστ} ρ^BS_{στ} ρ^BS_{αβ} √a dy`.
    pub flexural: f64,
    /// `∫ f^i η_i √a dy`.
    pub load: f64,
    /// `membrane + flexural − load`.
    pub total: f64,
}

impl EnergyBreakdown {
    fn new(membrane: f64, flexural: f64, load: f64) -> Self {
        Self {
            membrane,
            flexural,
            load,
            total: membrane + flexural - load,
        }
    }
}

/// Strain measures of one basis function at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
struct BasisStrain {
    dof: usize,
    component: usize,
    value: f64,
    gamma: Mat2,
    phi: [f64; 2],
    rho_bs: Mat2,
}

/// Per-point data that does not depend on the field.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PointData {
    /// Quadrature weight times `√a`.
    measure: f64,
    /// Flat quadrature weight.
    weight: f64,
    elasticity: Tensor4,
    force: [f64; 3],
}

/// Strain measures of a field at one quadrature point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PointStrain {
    pub eta: [f64; 3],
    pub phi: [f64; 2],
    pub gamma: Mat2,
    pub gbs: Mat2,
    pub rho_bs: Mat2,
}

/// A discretized energy: chart, material, space, load and all tabulated data.
#[derive(Debug, Clone)]
pub struct Problem {
    pub chart: Chart,
    pub material: Material,
    pub space: Space,
    /// Geometry at every quadrature point, in [`Space::quad_points`] order.
    pub frames: Vec<GeometryFrame>,
    pub force: ForceField,
    points: Vec<PointData>,
    offsets: Vec<usize>,
    table: Vec<BasisStrain>,
}

impl Problem {
    pub fn new(chart: Chart, material: Material, space: Space, force: ForceField) -> Result<Self> {
        if chart.domain != space.mesh.domain {
            return Err(Error::InvalidParameter(
                "mesh domain differs from the chart domain",
            ));
        }
        let frames = space.frames(&chart, &material)?;
        let mut offsets = Vec::with_capacity(space.num_points() + 1);
        let mut table = Vec::new();
        offsets.push(0);
        for qp in space.quad_points() {
            let frame = &frames[qp.index];
            for entry in space.point_basis(&qp) {
                let jet = entry.jet().jet;
                table.push(BasisStrain {
                    dof: entry.dof,
                    component: entry.component,
                    value: entry.shape.v,
                    gamma: compute_gamma(frame, &jet),
                    phi: compute_phi(frame, &jet),
                    rho_bs: compute_rho_bs(frame, &jet),
                });
            }
            offsets.push(table.len());
        }
        let points = sample_points(&space, &frames, &force);
        Ok(Self {
            chart,
            material,
            space,
            frames,
            force,
            points,
            offsets,
            table,
        })
    }

    /// Same discretization with a different load.
    pub fn with_force(&self, force: ForceField) -> Self {
        let points = sample_points(&self.space, &self.frames, &force);
        Self {
            force,
            points,
            ..self.clone()
        }
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn zero_field(&self) -> DisplacementField {
        self.space.zero_field()
    }

    fn check(&self, coeffs: &[f64]) -> Result<()> {
        if coeffs.len() != self.dim() {
            return Err(Error::InvalidParameter(
                "coefficient vector length does not match the space",
            ));
        }
        Ok(())
    }

    fn point_strain(&self, coeffs: &[f64], q: usize) -> PointStrain {
        let mut s = PointStrain::default();
        for e in &self.table[self.offsets[q]..self.offsets[q + 1]] {
            let c = coeffs[e.dof];
            if c == 0.0 {
                continue;
            }
            s.eta[e.component] += c * e.value;
            for a in 0..2 {
                s.phi[a] += c * e.phi[a];
                for b in 0..2 {
                    s.gamma[a][b] += c * e.gamma[a][b];
                    s.rho_bs[a][b] += c * e.rho_bs[a][b];
                }
            }
        }
        s.gbs = s.gamma;
        for a in 0..2 {
            for b in 0..2 {
                s.gbs[a][b] += 0.5 * s.phi[a] * s.phi[b];
            }
        }
        s
    }

    /// Strain measures at every quadrature point.
    pub fn point_strains(&self, field: &DisplacementField) -> Result<Vec<PointStrain>> {
        self.check(&field.coeffs)?;
        Ok((0..self.points.len())
            .map(|q| self.point_strain(&field.coeffs, q))
            .collect())
    }

    pub fn energy(&self, field: &DisplacementField) -> Result<EnergyBreakdown> {
        self.energy_coeffs(&field.coeffs)
    }

    pub fn energy_coeffs(&self, coeffs: &[f64]) -> Result<EnergyBreakdown> {
        self.check(coeffs)?;
        let eps = self.material.epsilon;
        let (mut mem, mut flex, mut load) = (0.0, 0.0, 0.0);
        for (q, p) in self.points.iter().enumerate() {
            let s = self.point_strain(coeffs, q);
            mem += p.measure * frobenius(&contract(&p.elasticity, &s.gbs), &s.gbs);
            flex += p.measure * frobenius(&contract(&p.elasticity, &s.rho_bs), &s.rho_bs);
            load +=
                p.measure * (p.force[0] * s.eta[0] + p.force[1] * s.eta[1] + p.force[2] * s.eta[2]);
        }
        Ok(EnergyBreakdown::new(
            0.5 * eps * mem,
            eps * eps * eps / 6.0 * flex,
            load,
        ))
    }

    pub fn gradient(&self, field: &DisplacementField) -> Result<Vec<f64>> {
        Ok(self.energy_and_gradient(&field.coeffs)?.1)
    }

    /// Energy and its gradient in one pass.
    pub fn energy_and_gradient(&self, coeffs: &[f64]) -> Result<(EnergyBreakdown, Vec<f64>)> {
        self.check(coeffs)?;
        let eps = self.material.epsilon;
        let bend = eps * eps * eps / 3.0;
        let mut grad = vec![0.0; coeffs.len()];
        let (mut mem, mut flex, mut load) = (0.0, 0.0, 0.0);
        for (q, p) in self.points.iter().enumerate() {
            let s = self.point_strain(coeffs, q);
            let cg = contract(&p.elasticity, &s.gbs);
            let cr = contract(&p.elasticity, &s.rho_bs);
            mem += p.measure * frobenius(&cg, &s.gbs);
            flex += p.measure * frobenius(&cr, &s.rho_bs);
            load +=
                p.measure * (p.force[0] * s.eta[0] + p.force[1] * s.eta[1] + p.force[2] * s.eta[2]);

            // membrane stress S = ε C:G^BS, its pairing with φ, bending moment M = (ε³/3) C:ρ^BS
            let mut stress = cg;
            let mut moment = cr;
            for a in 0..2 {
                for b in 0..2 {
                    stress[a][b] *= eps * p.measure;
                    moment[a][b] *= bend * p.measure;
                }
            }
            let t = [
                stress[0][0] * s.phi[0] + stress[0][1] * s.phi[1],
                stress[1][0] * s.phi[0] + stress[1][1] * s.phi[1],
            ];
            for e in &self.table[self.offsets[q]..self.offsets[q + 1]] {
                grad[e.dof] += frobenius(&stress, &e.gamma)
                    + t[0] * e.phi[0]
                    + t[1] * e.phi[1]
                    + frobenius(&moment, &e.rho_bs)
                    - p.measure * p.force[e.component] * e.value;
            }
        }
        Ok((
            EnergyBreakdown::new(0.5 * eps * mem, eps * eps * eps / 6.0 * flex, load),
            grad,
        ))
    }

    /// `dJ(η)[ζ]`.
    pub fn directional_derivative(
        &self,
        field: &DisplacementField,
        direction: &DisplacementField,
    ) -> Result<f64> {
        self.check(&direction.coeffs)?;
        let g = self.gradient(field)?;
        Ok(g.iter().zip(&direction.coeffs).map(|(a, b)| a * b).sum())
    }

    /// `(Σ_{αβ} ‖G^BS_{αβ}‖₂, Σ_{αβ} ‖ρ^BS_{αβ}‖₂)` over all four index pairs.
    pub fn strain_l2_sums(&self, field: &DisplacementField) -> Result<(f64, f64)> {
        let (g, r) = self.strain_l2_components(field)?;
        let sum = |m: Mat2| m.iter().flatten().map(|v| libm::sqrt(*v)).sum::<f64>();
        Ok((sum(g), sum(r)))
    }

    /// Squared component norms `‖G^BS_{αβ}‖₂²` and `‖ρ^BS_{αβ}‖₂²`.
    pub fn strain_l2_components(&self, field: &DisplacementField) -> Result<(Mat2, Mat2)> {
        self.check(&field.coeffs)?;
        let mut g = [[0.0; 2]; 2];
        let mut r = [[0.0; 2]; 2];
        for (q, p) in self.points.iter().enumerate() {
            let s = self.point_strain(&field.coeffs, q);
            for a in 0..2 {
                for b in 0..2 {
                    g[a][b] += p.weight * s.gbs[a][b] * s.gbs[a][b];
                    r[a][b] += p.weight * s.rho_bs[a][b] * s.rho_bs[a][b];
                }
            }
        }
        Ok((g, r))
    }

    pub fn sobolev_norms(&self, field: &DisplacementField) -> SobolevNorms {
        self.space.sobolev_norms(field, &self.frames)
    }

    pub fn x0_norm(&self, field: &DisplacementField) -> f64 {
        self.space.x0_norm(field)
    }

    /// Jet of `field` at quadrature point `q`, evaluated from the shape functions.
    pub fn jet_at(&self, field: &DisplacementField, q: usize) -> Result<DisplacementJet> {
        self.check(&field.coeffs)?;
        let qp = self
            .space
            .quad_points()
            .nth(q)
            .ok_or(Error::InvalidParameter(
                "quadrature point index out of range",
            ))?;
        Ok(self.space.jet_at(field, &qp))
    }

    /// Force samples `(f¹, f², f³)` at the quadrature points.
    pub fn force_samples(&self) -> impl Iterator<Item = [f64; 3]> + '_ {
        self.points.iter().map(|p| p.force)
    }
}

fn sample_points(space: &Space, frames: &[GeometryFrame], force: &ForceField) -> Vec<PointData> {
    space
        .quad_points()
        .map(|qp| {
            let frame = &frames[qp.index];
            PointData {
                measure: qp.weight * frame.sqrt_a,
                weight: qp.weight,
                elasticity: frame.elasticity,
                force: force.eval(qp.y, frame),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discretization::Mesh;
    use crate::geometry::Rect;
    use approx::assert_abs_diff_eq;

    fn plate_problem(n: usize) -> Problem {
        let chart = Chart::plate();
        let space = Space::build(Mesh::new(Rect::unit(), n, n).unwrap(), 4).unwrap();
        Problem::new(
            chart,
            Material::new(1.0, 1.0, 1.0).unwrap(),
            space,
            ForceField::zero(),
        )
        .unwrap()
    }

    #[test]
    fn zero_field_zero_energy_and_gradient() {
        let p = plate_problem(3);
        let e = p.energy(&p.zero_field()).unwrap();
        assert_eq!(e.total, 0.0);
        assert!(p
            .gradient(&p.zero_field())
            .unwrap()
            .iter()
            .all(|&g| g == 0.0));
    }

    #[test]
    fn flexural_is_quadratic_for_transverse_fields() {
        let p = plate_problem(3);
        let mut c = vec![0.0; p.dim()];
        let base = p.space.basis.offset(2);
        for (k, v) in c[base..].iter_mut().enumerate() {
            *v = libm::sin(k as f64 + 0.3);
        }
        let f = p.space.field(c).unwrap();
        let e1 = p.energy(&f).unwrap().flexural;
        let e3 = p.energy(&f.scaled(3.0)).unwrap().flexural;
        assert_abs_diff_eq!(e3, 9.0 * e1, epsilon = 1e-12 * e3.abs());
    }

    #[test]
    fn wrong_length_rejected() {
        let p = plate_problem(2);
        assert!(p.energy_coeffs(&[0.0; 3]).is_err());
    }

    #[test]
    fn mismatched_domain_rejected() {
        let space = Space::build(
            Mesh::new(Rect::new([0.0, 0.0], [2.0, 1.0]).unwrap(), 2, 2).unwrap(),
            4,
        )
        .unwrap();
        let r = Problem::new(
            Chart::plate(),
            Material::new(1.0, 1.0, 1.0).unwrap(),
            space,
            ForceField::zero(),
        );
        assert!(r.is_err());
    }
}
