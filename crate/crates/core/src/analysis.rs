//! Numerical realization of the inequality and identity machinery: the
//! Korn-type constant, the norm equivalence of `(γ, ρ^BS)`, the exact quartic
//! expansion of the energy about a field, smallness diagnostics and the
//! multi-start uniqueness probe.
//!
//! Constants come from generalized eigenproblems `A x = λ B x` between Gram
//! matrices of quadratic forms. Those forms are sums of squared norms, while
//! the inequalities they stand for use sums of norms; converting between the
//! two costs a factor `√2` per sum, recorded as [`ConstantEstimate::conversion_factor`].
//! All Gram matrices and strain norms use the flat measure `dy`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::discretization::{DisplacementField, Mesh, ShapeValue, Space};
use crate::energy::Problem;
use crate::forces::{ForceField, ForceKind};
use crate::geometry::{coercivity_constant, frobenius, Chart, Material};
use crate::kinematics::{
    compute_gamma, compute_gbs, compute_phi, compute_rho_bs, covariant_sym_derivative,
};
use crate::solver::{minimize, multi_start, MinimizerResult, MultiStartReport, SolverOptions};
use crate::{Error, Mat2, Result};

/// Analysis meshes need at least this many cells per axis.
pub const MIN_ANALYSIS_CELLS: usize = 4;

const EIGEN_TOL: f64 = 1e-10;
const EIGEN_MAX_ITERS: usize = 500;
const DENSE_LIMIT: usize = 200;
/// Largest problem solved densely when the Lanczos iteration stalls.
const DENSE_RESCUE_LIMIT: usize = 4000;
const EIGEN_SEED: u64 = 0x5eed;

/// Which constant an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstantKind {
    KornCs,
    EquivalenceCprime,
    CoercivityCe,
}

impl ConstantKind {
    pub fn name(&self) -> &'static str {
        match self {
            ConstantKind::KornCs => "korn_CS",
            ConstantKind::EquivalenceCprime => "equivalence_Cprime",
            ConstantKind::CoercivityCe => "coercivity_ce",
        }
    }
}

/// How a generalized eigenproblem was solved.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    /// Dense up to 200 unknowns, Lanczos above; a stalled Lanczos run on a
    /// problem of moderate size is finished densely.
    Auto,
    /// Cholesky reduction to a standard problem and a full symmetric eigensolve.
    Dense,
    /// Lanczos on the shift-0 inverse operator `A⁻¹B`.
    Iterative,
}

impl EigenMethod {
    pub fn name(&self) -> &'static str {
        match self {
            EigenMethod::Auto => "auto",
            EigenMethod::Dense => "dense",
            EigenMethod::Iterative => "inverse_lanczos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantEstimate {
    pub kind: ConstantKind,
    /// `1/√λ_min` for the Rayleigh-quotient constants, `c_e` itself for coercivity.
    pub value: f64,
    pub nx: usize,
    pub ny: usize,
    pub quad_order: usize,
    /// Dimension of the generalized eigenproblem (0 for coercivity).
    pub dim: usize,
    pub lambda_min: f64,
    pub converged: bool,
    pub iterations: usize,
    pub method: EigenMethod,
    /// Factor relating the squared-sum constant to the sum-of-norms form.
    pub conversion_factor: f64,
}

/// Smallest generalized eigenvalue and how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenOutcome {
    pub lambda_min: f64,
    pub iterations: usize,
    pub method: EigenMethod,
}

fn linalg(msg: &'static str) -> Error {
    Error::Linalg(msg)
}

/// Largest eigenvalue `θ` of `A⁻¹B` (so `λ_min = 1/θ`) by Lanczos in the
/// `B` inner product with full reorthogonalization. With Ritz residual
/// `r = β_k |s_k|` and Ritz gap `δ`, the eigenvalue error is bounded by
/// `min(r, r²/δ)`; iteration stops once that bound drops below the tolerance
/// relative to `θ`.
fn inverse_lanczos(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<EigenOutcome> {
    let n = a.nrows();
    let chol = a
        .clone()
        .cholesky()
        .ok_or_else(|| linalg("A is not positive definite"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(EIGEN_SEED);
    let mut q = DVector::from_fn(n, |_, _| StandardNormal.sample(&mut rng));
    let mut bq = b * &q;
    let norm = libm::sqrt(q.dot(&bq));
    q /= norm;
    bq /= norm;
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut bbasis: Vec<DVector<f64>> = Vec::new();
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let max_steps = EIGEN_MAX_ITERS.min(n);
    for k in 1..=max_steps {
        let mut w = chol.solve(&bq);
        alphas.push(bq.dot(&w));
        basis.push(q);
        bbasis.push(bq);
        // two passes of Gram–Schmidt in the B inner product
        for _ in 0..2 {
            for (v, bv) in basis.iter().zip(&bbasis) {
                let c = bv.dot(&w);
                w.axpy(-c, v, 1.0);
            }
        }
        let bw = b * &w;
        let beta = libm::sqrt(bw.dot(&w).max(0.0));

        let t = DMatrix::from_fn(k, k, |i, j| {
            if i == j {
                alphas[i]
            } else if i + 1 == j || j + 1 == i {
                betas[i.min(j)]
            } else {
                0.0
            }
        });
        let eig = t.symmetric_eigen();
        let (imax, theta) = eig.eigenvalues.iter().copied().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |acc, (i, v)| if v > acc.1 { (i, v) } else { acc },
        );
        let residual = beta * eig.eigenvectors[(k - 1, imax)].abs();
        let gap = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != imax)
            .map(|(_, v)| theta - v)
            .fold(f64::INFINITY, f64::min);
        // eigenvalue error is bounded by the residual, and by residual²/gap once separated
        let error = if k > 1 {
            residual.min(residual * residual / gap)
        } else {
            residual
        };
        if error <= EIGEN_TOL * theta.abs() || beta <= f64::EPSILON * theta.abs() || k == n {
            return Ok(EigenOutcome {
                lambda_min: 1.0 / theta,
                iterations: k,
                method: EigenMethod::Iterative,
            });
        }
        betas.push(beta);
        q = w / beta;
        bq = bw / beta;
    }
    Err(Error::EigenNotConverged {
        iterations: max_steps,
    })
}

/// Smallest eigenvalue of `A x = λ B x` for symmetric `A` and positive definite `B`.
pub fn smallest_generalized_eigenvalue(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    method: EigenMethod,
) -> Result<EigenOutcome> {
    if a.nrows() == 0 || a.shape() != b.shape() || a.nrows() != a.ncols() {
        return Err(Error::InvalidParameter(
            "eigenproblem matrices must be square, equal-sized and nonempty",
        ));
    }
    let dense = match method {
        EigenMethod::Dense => true,
        EigenMethod::Iterative => false,
        EigenMethod::Auto => a.nrows() <= DENSE_LIMIT,
    };
    if dense {
        return dense_smallest(a, b, 0);
    }
    match inverse_lanczos(a, b) {
        Err(Error::EigenNotConverged { iterations })
            if method == EigenMethod::Auto && a.nrows() <= DENSE_RESCUE_LIMIT =>
        {
            dense_smallest(a, b, iterations)
        }
        other => other,
    }
}

fn dense_smallest(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    prior_iterations: usize,
) -> Result<EigenOutcome> {
    let chol = b
        .clone()
        .cholesky()
        .ok_or_else(|| linalg("B is not positive definite"))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(a)
        .ok_or_else(|| linalg("singular Cholesky factor"))?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or_else(|| linalg("singular Cholesky factor"))?;
    let c = (&c + c.transpose()) * 0.5;
    let lambda_min = c.symmetric_eigenvalues().min();
    Ok(EigenOutcome {
        lambda_min,
        iterations: prior_iterations + 1,
        method: EigenMethod::Dense,
    })
}

fn analysis_space(mesh: &Mesh, quad_order: usize) -> Result<Space> {
    if mesh.nx < MIN_ANALYSIS_CELLS || mesh.ny < MIN_ANALYSIS_CELLS {
        return Err(Error::MeshTooCoarse(
            "constant estimation needs at least 4 cells per axis",
        ));
    }
    Space::build(*mesh, quad_order)
}

fn h1_product(u: &ShapeValue, v: &ShapeValue) -> f64 {
    u.v * v.v + u.d[0] * v.d[0] + u.d[1] * v.d[1]
}

fn h2_product(u: &ShapeValue, v: &ShapeValue) -> f64 {
    h1_product(u, v) + frobenius(&u.dd, &v.dd)
}

/// Gram matrices of the Korn form on the tangential block: `A` from
/// `Σ_{αβ} ∫ (v_{α|β}+v_{β|α})(w_{α|β}+w_{β|α}) dy` and `B` from
/// `Σ_α (v_α, w_α)₁,₂`.
pub fn korn_gram(
    chart: &Chart,
    material: &Material,
    space: &Space,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = space.basis.tangential_dim();
    let frames = space.frames(chart, material)?;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut local: Vec<(usize, usize, ShapeValue, Mat2)> = Vec::with_capacity(18);
    for qp in space.quad_points() {
        let frame = &frames[qp.index];
        local.clear();
        for e in space.point_basis(&qp).filter(|e| e.component < 2) {
            let mut v = [0.0; 2];
            let mut dv = [[0.0; 2]; 2];
            v[e.component] = e.shape.v;
            dv[e.component] = e.shape.d;
            local.push((
                e.dof,
                e.component,
                e.shape,
                covariant_sym_derivative(frame, v, &dv),
            ));
        }
        for &(i, ci, si, ei) in &local {
            for &(j, cj, sj, ej) in &local {
                a[(i, j)] += qp.weight * frobenius(&ei, &ej);
                if ci == cj {
                    b[(i, j)] += qp.weight * h1_product(&si, &sj);
                }
            }
        }
    }
    Ok((a, b))
}

/// Gram matrices of the equivalence form on the full space: `A` from
/// `Σ_{αβ} (‖γ_{αβ}‖₂² + ‖ρ^BS_{αβ}‖₂²)` and `B` from the squared `X₀` components.
pub fn equivalence_gram(
    chart: &Chart,
    material: &Material,
    space: &Space,
) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    let n = space.dim();
    let frames = space.frames(chart, material)?;
    let mut a = DMatrix::zeros(n, n);
    let mut b = DMatrix::zeros(n, n);
    let mut local: Vec<(usize, usize, ShapeValue, Mat2, Mat2)> = Vec::with_capacity(34);
    for qp in space.quad_points() {
        let frame = &frames[qp.index];
        local.clear();
        for e in space.point_basis(&qp) {
            let jet = e.jet().jet;
            local.push((
                e.dof,
                e.component,
                e.shape,
                compute_gamma(frame, &jet),
                compute_rho_bs(frame, &jet),
            ));
        }
        for &(i, ci, si, gi, ri) in &local {
            for &(j, cj, sj, gj, rj) in &local {
                a[(i, j)] += qp.weight * (frobenius(&gi, &gj) + frobenius(&ri, &rj));
                if ci == cj {
                    let inner = if ci == 2 {
                        h2_product(&si, &sj)
                    } else {
                        h1_product(&si, &sj)
                    };
                    b[(i, j)] += qp.weight * inner;
                }
            }
        }
    }
    Ok((a, b))
}

fn rayleigh_estimate(
    kind: ConstantKind,
    space: &Space,
    (a, b): (DMatrix<f64>, DMatrix<f64>),
    method: EigenMethod,
) -> Result<ConstantEstimate> {
    let out = smallest_generalized_eigenvalue(&a, &b, method)?;
    let value = if out.lambda_min > 0.0 {
        1.0 / libm::sqrt(out.lambda_min)
    } else {
        f64::INFINITY
    };
    Ok(ConstantEstimate {
        kind,
        value,
        nx: space.mesh.nx,
        ny: space.mesh.ny,
        quad_order: space.quad.order,
        dim: a.nrows(),
        lambda_min: out.lambda_min,
        converged: true,
        iterations: out.iterations,
        method: out.method,
        conversion_factor: core::f64::consts::SQRT_2,
    })
}

/// Discrete Korn-type constant `Ĉ_S = 1/√λ_min` on the clamped tangential space.
pub fn estimate_korn_constant(
    chart: &Chart,
    mesh: &Mesh,
    material: &Material,
    quad_order: usize,
    method: EigenMethod,
) -> Result<ConstantEstimate> {
    let space = analysis_space(mesh, quad_order)?;
    let gram = korn_gram(chart, material, &space)?;
    rayleigh_estimate(ConstantKind::KornCs, &space, gram, method)
}

/// Norm-equivalence constant `Ĉ′ = 1/√λ_min` on the full clamped space.
pub fn estimate_equivalence_constant(
    chart: &Chart,
    mesh: &Mesh,
    material: &Material,
    quad_order: usize,
    method: EigenMethod,
) -> Result<ConstantEstimate> {
    let space = analysis_space(mesh, quad_order)?;
    let gram = equivalence_gram(chart, material, &space)?;
    rayleigh_estimate(ConstantKind::EquivalenceCprime, &space, gram, method)
}

/// Coercivity constant `c_e` over the quadrature points of `problem`.
pub fn estimate_coercivity(problem: &Problem) -> Result<ConstantEstimate> {
    let ce = coercivity_constant(problem.frames.iter())?;
    Ok(ConstantEstimate {
        kind: ConstantKind::CoercivityCe,
        value: ce,
        nx: problem.space.mesh.nx,
        ny: problem.space.mesh.ny,
        quad_order: problem.space.quad.order,
        dim: 0,
        lambda_min: ce,
        converged: true,
        iterations: 0,
        method: EigenMethod::Dense,
        conversion_factor: 1.0,
    })
}

/// Outcome of [`realized_korn_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KornCheck {
    pub samples: usize,
    /// Largest `Σ_α ‖v_α‖₁,₂ / Σ_{αβ} ‖v_{α|β}+v_{β|α}‖₂` observed.
    pub worst_ratio: f64,
    /// The bound the ratio is compared against, `2 Ĉ_S`.
    pub bound: f64,
    pub holds: bool,
}

/// Draws random tangential fields and checks
/// `Σ_α ‖v_α‖₁,₂ ≤ 2 Ĉ_S Σ_{αβ} ‖v_{α|β}+v_{β|α}‖₂ + 10⁻⁸`.
pub fn realized_korn_check(
    chart: &Chart,
    material: &Material,
    space: &Space,
    korn: &ConstantEstimate,
    samples: usize,
    seed: u64,
) -> Result<KornCheck> {
    let frames = space.frames(chart, material)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bound = 2.0 * korn.value;
    let mut worst: f64 = 0.0;
    let mut holds = true;
    for _ in 0..samples {
        let mut coeffs = vec![0.0; space.dim()];
        for c in coeffs.iter_mut().take(space.basis.tangential_dim()) {
            *c = StandardNormal.sample(&mut rng);
        }
        let field = space.field(coeffs)?;
        let (h1, _) = space.component_norms(&field);
        let mut e2 = [[0.0; 2]; 2];
        for qp in space.quad_points() {
            let jet = space.jet_at(&field, &qp);
            let dv = [jet.d_eta[0], jet.d_eta[1]];
            let e = covariant_sym_derivative(&frames[qp.index], [jet.eta[0], jet.eta[1]], &dv);
            for a in 0..2 {
                for b in 0..2 {
                    e2[a][b] += qp.weight * e[a][b] * e[a][b];
                }
            }
        }
        let lhs = h1[0] + h1[1];
        let rhs: f64 = e2.iter().flatten().map(|v| libm::sqrt(*v)).sum();
        if lhs > bound * rhs + 1e-8 {
            holds = false;
        }
        if rhs > 0.0 {
            worst = worst.max(lhs / rhs);
        }
    }
    Ok(KornCheck {
        samples,
        worst_ratio: worst,
        bound,
        holds,
    })
}

/// Terms of the quartic expansion
/// `J(η_f + ζ) − J(η_f) − dJ(η_f)[ζ]` about `η_f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionReport {
    pub lhs: f64,
    /// `(ε/2) ∫ a^{αβστ} A_{στ} A_{αβ} √a dy` with
    /// `A = γ(ζ) + ½(φ(η_f)φ(ζ) + φ(ζ)φ(η_f)) + ½φ(ζ)φ(ζ)`.
    pub quadratic_term: f64,
    /// `∫ a^{αβ}a^{στ} G^BS_{αβ}(η_f) φ_σ(ζ)φ_τ(ζ) √a dy`, before its coefficient.
    pub trace_cross_integral: f64,
    /// `∫ a^{ασ}a^{βτ} G^BS_{αβ}(η_f) φ_σ(ζ)φ_τ(ζ) √a dy`, before its coefficient.
    pub shear_cross_integral: f64,
    /// `(ε³/6) ∫ a^{αβστ} ρ^BS_{στ}(ζ) ρ^BS_{αβ}(ζ) √a dy`.
    pub flexural_term: f64,
    /// Coefficients `(ελ̄/2, 2εμ)` that make the expansion exact.
    pub cross_coefficients: [f64; 2],
    pub rhs: f64,
    /// `|lhs − rhs| / (1 + |lhs|)`.
    pub residual: f64,
    /// Coefficients `(ελ̄, 4εμ)`, twice the exact ones.
    pub doubled_coefficients: [f64; 2],
    pub doubled_rhs: f64,
    pub doubled_residual: f64,
}

/// Evaluates both sides of the quartic expansion for `η_f` and `ζ`.
///
/// Expanding `(ε/2) a^{αβστ} G^BS G^BS` exactly gives the cross terms with
/// coefficients `ελ̄/2` and `2εμ`; the report also evaluates the right-hand
/// side with both coefficients doubled, which does not match.
pub fn expansion_check(
    problem: &Problem,
    eta_f: &DisplacementField,
    zeta: &DisplacementField,
) -> Result<ExpansionReport> {
    let sum = eta_f.axpy(1.0, zeta);
    let lhs = problem.energy(&sum)?.total
        - problem.energy(eta_f)?.total
        - problem.directional_derivative(eta_f, zeta)?;

    let eps = problem.material.epsilon;
    let (mut quad, mut trace, mut shear, mut flex) = (0.0, 0.0, 0.0, 0.0);
    for qp in problem.space.quad_points() {
        let frame = &problem.frames[qp.index];
        let jf = problem.space.jet_at(eta_f, &qp);
        let jz = problem.space.jet_at(zeta, &qp);
        let pf = compute_phi(frame, &jf);
        let pz = compute_phi(frame, &jz);
        let gf = compute_gbs(frame, &jf);
        let gz = compute_gamma(frame, &jz);
        let rz = compute_rho_bs(frame, &jz);
        let mut a_term = [[0.0; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                a_term[a][b] =
                    gz[a][b] + 0.5 * (pf[a] * pz[b] + pz[a] * pf[b]) + 0.5 * pz[a] * pz[b];
            }
        }
        let w = qp.weight * frame.sqrt_a;
        let c = &frame.elasticity;
        let au = &frame.a_upper;
        let mut tr = 0.0;
        let mut sh = 0.0;
        let mut qa = 0.0;
        let mut qr = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for s in 0..2 {
                    for t in 0..2 {
                        tr += au[a][b] * au[s][t] * gf[a][b] * pz[s] * pz[t];
                        sh += au[a][s] * au[b][t] * gf[a][b] * pz[s] * pz[t];
                        qa += c[a][b][s][t] * a_term[s][t] * a_term[a][b];
                        qr += c[a][b][s][t] * rz[s][t] * rz[a][b];
                    }
                }
            }
        }
        trace += w * tr;
        shear += w * sh;
        quad += w * qa;
        flex += w * qr;
    }
    let quadratic_term = 0.5 * eps * quad;
    let flexural_term = eps * eps * eps / 6.0 * flex;
    let lb = problem.material.lambda_bar();
    let mu = problem.material.mu;
    let exact = [0.5 * eps * lb, 2.0 * eps * mu];
    let doubled = [eps * lb, 4.0 * eps * mu];
    let rhs_with = |k: [f64; 2]| quadratic_term + k[0] * trace + k[1] * shear + flexural_term;
    let rhs = rhs_with(exact);
    let doubled_rhs = rhs_with(doubled);
    Ok(ExpansionReport {
        lhs,
        quadratic_term,
        trace_cross_integral: trace,
        shear_cross_integral: shear,
        flexural_term,
        cross_coefficients: exact,
        rhs,
        residual: (lhs - rhs).abs() / (1.0 + lhs.abs()),
        doubled_coefficients: doubled,
        doubled_rhs,
        doubled_residual: (lhs - doubled_rhs).abs() / (1.0 + lhs.abs()),
    })
}

/// Values `J(η + tζ)` on the line through `η` in direction `ζ` fitted by a
/// quartic through `fit_ts` (five values) and compared at `check_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuarticLineReport {
    pub predicted: f64,
    pub actual: f64,
    /// `|predicted − actual| / max(1, |actual|)`.
    pub relative_error: f64,
}

pub fn quartic_line_check(
    problem: &Problem,
    eta: &DisplacementField,
    zeta: &DisplacementField,
    fit_ts: [f64; 5],
    check_t: f64,
) -> Result<QuarticLineReport> {
    let mut values = [0.0; 5];
    for (v, &t) in values.iter_mut().zip(&fit_ts) {
        *v = problem.energy(&eta.axpy(t, zeta))?.total;
    }
    // Lagrange form of the interpolating quartic
    let mut predicted = 0.0;
    for i in 0..5 {
        let mut basis = 1.0;
        for j in 0..5 {
            if i != j {
                basis *= (check_t - fit_ts[j]) / (fit_ts[i] - fit_ts[j]);
            }
        }
        predicted += values[i] * basis;
    }
    let actual = problem.energy(&eta.axpy(check_t, zeta))?.total;
    Ok(QuarticLineReport {
        predicted,
        actual,
        relative_error: (predicted - actual).abs() / actual.abs().max(1.0),
    })
}

/// Estimated constants feeding the smallness diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConstantSet {
    pub coercivity: Option<f64>,
    pub korn: Option<f64>,
    pub equivalence: Option<f64>,
    /// `Ĉ₁ = max |a^{αβστ}| · (max |a^{αβ}|)²`.
    pub c1: Option<f64>,
    /// `Ĉ₂ = max Σ_α ‖φ_α‖₄² / Σ_{αβ} ‖ρ^BS_{αβ}‖₂²` over random fields.
    pub c2: Option<f64>,
}

/// `max |a^{αβστ}| · (max |a^{αβ}|)²` over the quadrature points.
pub fn surrogate_c1(problem: &Problem) -> f64 {
    let mut emax: f64 = 0.0;
    let mut amax: f64 = 0.0;
    for f in &problem.frames {
        for v in f.elasticity.iter().flatten().flatten().flatten() {
            emax = emax.max(v.abs());
        }
        for v in f.a_upper.iter().flatten() {
            amax = amax.max(v.abs());
        }
    }
    emax * amax * amax
}

/// Largest `Σ_α ‖φ_α‖₄² / Σ_{αβ} ‖ρ^BS_{αβ}‖₂²` over `samples` random fields.
pub fn surrogate_c2(problem: &Problem, samples: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let coeffs: Vec<f64> = (0..problem.dim())
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let field = problem.space.field(coeffs)?;
        let norms = problem.sobolev_norms(&field);
        let num = norms.phi_l4[0] * norms.phi_l4[0] + norms.phi_l4[1] * norms.phi_l4[1];
        let (_, rho) = problem.strain_l2_components(&field)?;
        let den: f64 = rho.iter().flatten().sum();
        if den > 0.0 {
            best = best.max(num / den);
        }
    }
    Ok(best)
}

/// Options for [`estimate_constants`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantOptions {
    pub method: EigenMethod,
    pub c2_samples: usize,
    pub seed: u64,
}

impl Default for ConstantOptions {
    fn default() -> Self {
        Self {
            method: EigenMethod::Auto,
            c2_samples: 100,
            seed: 0,
        }
    }
}

/// All estimates on the discretization of `problem`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantReport {
    pub coercivity: ConstantEstimate,
    pub korn: ConstantEstimate,
    pub equivalence: ConstantEstimate,
    pub c1: f64,
    pub c2: f64,
}

impl ConstantReport {
    pub fn as_set(&self) -> ConstantSet {
        ConstantSet {
            coercivity: Some(self.coercivity.value),
            korn: Some(self.korn.value),
            equivalence: Some(self.equivalence.value),
            c1: Some(self.c1),
            c2: Some(self.c2),
        }
    }
}

pub fn estimate_constants(problem: &Problem, opts: &ConstantOptions) -> Result<ConstantReport> {
    let mesh = problem.space.mesh;
    let q = problem.space.quad.order;
    Ok(ConstantReport {
        coercivity: estimate_coercivity(problem)?,
        korn: estimate_korn_constant(&problem.chart, &mesh, &problem.material, q, opts.method)?,
        equivalence: estimate_equivalence_constant(
            &problem.chart,
            &mesh,
            &problem.material,
            q,
            opts.method,
        )?,
        c1: surrogate_c1(problem),
        c2: surrogate_c2(problem, opts.c2_samples, opts.seed)?,
    })
}

/// Smallness diagnostics. The ratios order experiments; they certify nothing,
/// because the absolute constants they stand in for are not computable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdReport {
    /// `max_i ‖h^i‖₂` for perturbed special forces.
    pub l_perturbation: Option<f64>,
    /// `max_i ‖f^i‖₂`.
    pub l_force: f64,
    pub coercivity: f64,
    pub korn: f64,
    pub equivalence: f64,
    pub c1: f64,
    pub c2: f64,
    /// `M̂ = 96 Ĉ Ĉ′ / (c_e ε³)` with `Ĉ = 1`.
    pub m_hat: f64,
    /// `12 l Ĉ Ĉ′ / (c_e ε³)` with `l` the perturbation norm when present.
    pub existence_ratio: f64,
    /// `6 l Ĉ₁ Ĉ₂ M̂ / (c_e ε³)` with `l = max_i ‖f^i‖₂`.
    pub uniqueness_ratio: f64,
    pub existence_below: bool,
    pub uniqueness_below: bool,
    /// Always true: these numbers are diagnostics only.
    pub diagnostic: bool,
}

/// Computes the smallness ratios for the load of `problem`.
pub fn threshold_report(
    problem: &Problem,
    constants: &ConstantSet,
    l_perturbation: Option<f64>,
) -> Result<ThresholdReport> {
    let ce = constants
        .coercivity
        .ok_or(Error::MissingEstimate("coercivity constant"))?;
    let korn = constants
        .korn
        .ok_or(Error::MissingEstimate("Korn constant"))?;
    let cp = constants
        .equivalence
        .ok_or(Error::MissingEstimate("equivalence constant"))?;
    let c1 = constants.c1.ok_or(Error::MissingEstimate("C1 surrogate"))?;
    let c2 = constants.c2.ok_or(Error::MissingEstimate("C2 surrogate"))?;
    let l_force = problem.force.max_norm(&problem.space, &problem.frames);
    let eps3 = libm::pow(problem.material.epsilon, 3.0);
    let scale = ce * eps3;
    let m_hat = 96.0 * cp / scale;
    let l_exist = match problem.force.kind {
        ForceKind::PerturbedSpecial => l_perturbation.unwrap_or(l_force),
        _ => l_force,
    };
    let existence_ratio = 12.0 * l_exist * cp / scale;
    let uniqueness_ratio = 6.0 * l_force * c1 * c2 * m_hat / scale;
    Ok(ThresholdReport {
        l_perturbation,
        l_force,
        coercivity: ce,
        korn,
        equivalence: cp,
        c1,
        c2,
        m_hat,
        existence_ratio,
        uniqueness_ratio,
        existence_below: existence_ratio < 1.0,
        uniqueness_below: uniqueness_ratio < 1.0,
        diagnostic: true,
    })
}

/// Amplitude factor that brings the uniqueness ratio of `force` to `target`.
pub fn scale_for_uniqueness_ratio(
    problem: &Problem,
    constants: &ConstantSet,
    target: f64,
) -> Result<f64> {
    let r = threshold_report(problem, constants, None)?;
    if !(r.uniqueness_ratio > 0.0) {
        return Err(Error::DegenerateBase { norm: r.l_force });
    }
    Ok(target / r.uniqueness_ratio)
}

/// One magnitude of a uniqueness probe.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeEntry {
    pub magnitude: f64,
    pub report: MultiStartReport,
    pub min_energy: Option<f64>,
    /// Strain sums `Σ‖G^BS‖₂` and `Σ‖ρ^BS‖₂` of the lowest-energy converged run.
    pub gbs_l2_sum: Option<f64>,
    pub rhobs_l2_sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
    /// Largest pairwise `X₀`-distance over the converged runs of all magnitudes.
    pub dispersion: f64,
    pub total_runs: usize,
    pub converged_runs: usize,
}

/// Multi-start minimization at every magnitude in `magnitudes`.
pub fn uniqueness_probe(
    problem: &Problem,
    n_starts: usize,
    magnitudes: &[f64],
    opts: &SolverOptions,
) -> Result<ProbeReport> {
    if magnitudes.is_empty() {
        return Err(Error::EmptyInput(
            "uniqueness probe needs at least one magnitude",
        ));
    }
    let mut entries = Vec::with_capacity(magnitudes.len());
    for &m in magnitudes {
        let report = multi_start(problem, n_starts, m, opts)?;
        let best = report.best();
        entries.push(ProbeEntry {
            magnitude: m,
            min_energy: best.map(|r| r.energy.total),
            gbs_l2_sum: best.map(|r| r.gbs_l2_sum),
            rhobs_l2_sum: best.map(|r| r.rhobs_l2_sum),
            report,
        });
    }
    let converged: Vec<&MinimizerResult> = entries
        .iter()
        .flat_map(|e| e.report.runs.iter())
        .filter_map(|r| r.outcome.as_ref().ok())
        .filter(|r| r.converged)
        .collect();
    let mut dispersion: f64 = 0.0;
    for i in 0..converged.len() {
        for j in (i + 1)..converged.len() {
            dispersion = dispersion
                .max(problem.x0_norm(&converged[i].field.axpy(-1.0, &converged[j].field)));
        }
    }
    let converged_runs = converged.len();
    let total_runs = entries.iter().map(|e| e.report.runs.len()).sum();
    Ok(ProbeReport {
        entries,
        dispersion,
        total_runs,
        converged_runs,
    })
}

/// Response of the minimizer to two load scales `s₁ > s₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseReport {
    pub scales: [f64; 2],
    pub results: [MinimizerResult; 2],
    /// `‖η*(s f)‖_{X₀} / s` at both scales.
    pub x0_per_scale: [f64; 2],
    /// Relative change of `‖η*‖/s`, `Σ‖G^BS‖/s` and `Σ‖ρ^BS‖/s` between the scales.
    pub x0_drift: f64,
    pub gbs_drift: f64,
    pub rhobs_drift: f64,
}

/// Minimizes from zero under `s·f` for both scales and compares the responses.
///
/// `grad_tol_factor` sets each run's tolerance to that multiple of the
/// initial gradient norm (capped by `opts.grad_tol`).
pub fn linear_response(
    problem: &Problem,
    force: &ForceField,
    scales: [f64; 2],
    grad_tol_factor: f64,
    opts: &SolverOptions,
) -> Result<ResponseReport> {
    let mut results = Vec::with_capacity(2);
    for &s in &scales {
        let p = problem.with_force(force.scaled(s));
        let g0 = p
            .gradient(&p.zero_field())?
            .iter()
            .fold(0.0, |m: f64, g| m.max(g.abs()));
        let run_opts = SolverOptions {
            grad_tol: opts.grad_tol.min(grad_tol_factor * g0),
            ..*opts
        };
        results.push(minimize(&p, &p.zero_field(), &run_opts)?);
    }
    let r1 = results.pop().ok_or(Error::EmptyInput("no response runs"))?;
    let r0 = results.pop().ok_or(Error::EmptyInput("no response runs"))?;
    let drift = |a: f64, b: f64| {
        let (x, y) = (a / scales[0], b / scales[1]);
        (x - y).abs() / x.abs().max(y.abs())
    };
    Ok(ResponseReport {
        scales,
        x0_per_scale: [r0.x0_norm / scales[0], r1.x0_norm / scales[1]],
        x0_drift: drift(r0.x0_norm, r1.x0_norm),
        gbs_drift: drift(r0.gbs_l2_sum, r1.gbs_l2_sum),
        rhobs_drift: drift(r0.rhobs_l2_sum, r1.rhobs_l2_sum),
        results: [r0, r1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rect;

    #[test]
    fn dense_generalized_diagonal() {
        let a = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 9.0, 4.0]));
        let b = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 3.0, 1.0]));
        for method in [EigenMethod::Dense, EigenMethod::Iterative] {
            let out = smallest_generalized_eigenvalue(&a, &b, method).unwrap();
            assert!((out.lambda_min - 2.0).abs() < 1e-13, "{method:?}");
        }
    }

    #[test]
    fn iterative_matches_dense_on_random_spd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 40;
        let m = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let a = &m * m.transpose() + DMatrix::identity(n, n) * 0.1;
        let k = DMatrix::<f64>::from_fn(n, n, |_, _| StandardNormal.sample(&mut rng));
        let b = &k * k.transpose() + DMatrix::identity(n, n) * (n as f64);
        let d = smallest_generalized_eigenvalue(&a, &b, EigenMethod::Dense).unwrap();
        let it = smallest_generalized_eigenvalue(&a, &b, EigenMethod::Iterative).unwrap();
        assert!((d.lambda_min - it.lambda_min).abs() <= 1e-9 * d.lambda_min);
    }

    #[test]
    fn coarse_mesh_rejected() {
        let mesh = Mesh::new(Rect::unit(), 2, 2).unwrap();
        let m = Material::new(1.0, 1.0, 0.1).unwrap();
        let r = estimate_korn_constant(&Chart::plate(), &mesh, &m, 4, EigenMethod::Auto);
        assert!(matches!(r, Err(Error::MeshTooCoarse(_))));
    }

    #[test]
    fn missing_estimate_reported() {
        let chart = Chart::plate();
        let space = Space::build(Mesh::new(Rect::unit(), 2, 2).unwrap(), 4).unwrap();
        let p = Problem::new(
            chart,
            Material::new(1.0, 1.0, 0.1).unwrap(),
            space,
            ForceField::zero(),
        )
        .unwrap();
        let r = threshold_report(&p, &ConstantSet::default(), None);
        assert!(matches!(r, Err(Error::MissingEstimate(_))));
    }
}
