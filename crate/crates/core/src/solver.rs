//! Energy minimization: limited-memory BFGS (or plain gradient descent) with a
//! backtracking line search, plus seeded multi-start orchestration.
//!
//! The line search accepts a trial step when the Armijo condition holds. Near
//! a minimizer the energy decrease eventually drops below its own rounding
//! error, so a step is also accepted when the energy is unchanged within
//! rounding and the directional derivative has shrunk (the approximate Wolfe
//! test). Both keep the recorded energies nonincreasing up to rounding.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::discretization::DisplacementField;
use crate::energy::{EnergyBreakdown, Problem};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Lbfgs,
    GradientDescent,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Lbfgs => "lbfgs",
            Method::GradientDescent => "gradient_descent",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub method: Method,
    /// L-BFGS memory `m`.
    pub memory: usize,
    /// Threshold on `‖∇J‖∞` in coefficient space.
    pub grad_tol: f64,
    pub max_iters: usize,
    /// Armijo constant `c₁`.
    pub armijo: f64,
    /// Backtracking factor.
    pub backtrack: f64,
    pub initial_step: f64,
    /// Seed for random starts.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            method: Method::Lbfgs,
            memory: 10,
            grad_tol: 1e-8,
            max_iters: 5000,
            armijo: 1e-4,
            backtrack: 0.5,
            initial_step: 1.0,
            seed: 0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(Error::InvalidParameter(
                "armijo constant must lie in (0, 1)",
            ));
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::InvalidParameter(
                "backtracking factor must lie in (0, 1)",
            ));
        }
        if self.memory == 0 {
            return Err(Error::InvalidParameter("memory must be >= 1"));
        }
        if !(self.grad_tol >= 0.0) || !(self.initial_step > 0.0) {
            return Err(Error::InvalidParameter(
                "grad_tol must be >= 0 and initial_step > 0",
            ));
        }
        Ok(())
    }
}

/// Why the iteration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxIterations,
    /// The backtracking step fell below `10⁻¹⁶` of the iterate in every coefficient.
    LineSearchFailure,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Converged => "converged",
            Termination::MaxIterations => "max_iterations",
            Termination::LineSearchFailure => "line_search_failure",
        }
    }
}

/// One row of the convergence history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub energy: f64,
    pub grad_inf: f64,
    /// Accepted step length (0 for the initial point).
    pub step: f64,
}

/// Value and gradient of a smooth objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Size of the terms summed into `value`, used to judge rounding.
    pub magnitude: f64,
    pub gradient: Vec<f64>,
}

/// A smooth function of a coefficient vector.
pub trait Objective {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &[f64]) -> Result<Evaluation>;
}

impl Objective for Problem {
    fn dim(&self) -> usize {
        Problem::dim(self)
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let (e, gradient) = self.energy_and_gradient(x)?;
        Ok(Evaluation {
            value: e.total,
            magnitude: e.membrane + e.flexural + e.load.abs(),
            gradient,
        })
    }
}

/// Raw outcome of [`minimize_objective`].
#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    pub grad_inf: f64,
    pub iterations: usize,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
}

const ROUNDING: f64 = 1e-14;
const MIN_STEP_RATIO: f64 = 1e-16;
const CURVATURE_TOL: f64 = 1e-12;
// approximate Wolfe window on the directional derivative
const WOLFE_UPPER: f64 = 0.8;
const WOLFE_LOWER: f64 = 0.9;

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m: f64, x| m.max(x.abs()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn two_loop(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = g.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for (qi, yi) in q.iter_mut().zip(y) {
            *qi -= a * yi;
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = dot(s, y) / dot(y, y);
        for qi in q.iter_mut() {
            *qi *= gamma;
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        for (qi, si) in q.iter_mut().zip(s) {
            *qi += (a - b) * si;
        }
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Minimizes `obj` from `x0`.
pub fn minimize_objective<O: Objective + ?Sized>(
    obj: &O,
    x0: &[f64],
    opts: &SolverOptions,
) -> Result<Optimum> {
    opts.validate()?;
    if x0.len() != obj.dim() {
        return Err(Error::InvalidParameter(
            "initial vector length does not match the objective",
        ));
    }
    let mut x = x0.to_vec();
    let mut cur = obj.evaluate(&x)?;
    if !cur.value.is_finite() {
        return Err(Error::NonFiniteEnergy { iteration: 0 });
    }
    let mut grad_inf = inf_norm(&cur.gradient);
    let mut history = vec![IterationRecord {
        iter: 0,
        energy: cur.value,
        grad_inf,
        step: 0.0,
    }];
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(opts.memory);
    let mut last_step = 0.0;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;

    while iterations < opts.max_iters {
        if grad_inf <= opts.grad_tol {
            termination = Termination::Converged;
            break;
        }
        let mut d = match opts.method {
            Method::Lbfgs if !memory.is_empty() => two_loop(&cur.gradient, &memory),
            _ => cur.gradient.iter().map(|g| -g).collect(),
        };
        let mut slope = dot(&cur.gradient, &d);
        if !(slope < 0.0) {
            memory.clear();
            d = cur.gradient.iter().map(|g| -g).collect();
            slope = dot(&cur.gradient, &d);
        }
        let alpha0 = match opts.method {
            Method::Lbfgs if !memory.is_empty() => opts.initial_step,
            Method::GradientDescent if last_step > 0.0 => 2.0 * last_step,
            _ => opts.initial_step / inf_norm(&d),
        };

        let mut alpha = alpha0;
        let mut trial_x = vec![0.0; x.len()];
        let accepted = loop {
            for ((t, xi), di) in trial_x.iter_mut().zip(&x).zip(&d) {
                *t = xi + alpha * di;
            }
            let trial = obj.evaluate(&trial_x)?;
            if trial.value.is_nan() {
                return Err(Error::NonFiniteEnergy {
                    iteration: iterations + 1,
                });
            }
            if trial.value.is_finite() {
                let armijo = trial.value <= cur.value + opts.armijo * alpha * slope;
                let noise = ROUNDING * cur.magnitude.max(trial.magnitude);
                let new_slope = dot(&trial.gradient, &d);
                let flat = trial.value <= cur.value + noise
                    && new_slope <= -WOLFE_UPPER * slope
                    && new_slope >= WOLFE_LOWER * slope;
                if armijo || flat {
                    break Some(trial);
                }
            }
            alpha *= opts.backtrack;
            let underflow = x
                .iter()
                .zip(&d)
                .all(|(xi, di)| alpha * di.abs() <= MIN_STEP_RATIO * xi.abs());
            if underflow {
                break None;
            }
        };
        let Some(next) = accepted else {
            termination = Termination::LineSearchFailure;
            break;
        };

        iterations += 1;
        if opts.method == Method::Lbfgs {
            let s: Vec<f64> = d.iter().map(|v| alpha * v).collect();
            let y: Vec<f64> = next
                .gradient
                .iter()
                .zip(&cur.gradient)
                .map(|(a, b)| a - b)
                .collect();
            let sy = dot(&s, &y);
            let scale = libm::sqrt(dot(&s, &s) * dot(&y, &y));
            if sy > CURVATURE_TOL * scale {
                if memory.len() == opts.memory {
                    memory.pop_front();
                }
                memory.push_back((s, y, 1.0 / sy));
            }
        }
        core::mem::swap(&mut x, &mut trial_x);
        cur = next;
        grad_inf = inf_norm(&cur.gradient);
        last_step = alpha;
        history.push(IterationRecord {
            iter: iterations,
            energy: cur.value,
            grad_inf,
            step: alpha,
        });
    }
    if iterations >= opts.max_iters && grad_inf <= opts.grad_tol {
        termination = Termination::Converged;
    }
    Ok(Optimum {
        x,
        value: cur.value,
        gradient: cur.gradient,
        grad_inf,
        iterations,
        termination,
        history,
    })
}

/// Result of minimizing the shell energy.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizerResult {
    pub field: DisplacementField,
    pub energy: EnergyBreakdown,
    pub grad_inf: f64,
    pub iterations: usize,
    pub converged: bool,
    pub termination: Termination,
    pub history: Vec<IterationRecord>,
    /// `Σ_{αβ} ‖G^BS_{αβ}‖₂`.
    pub gbs_l2_sum: f64,
    /// `Σ_{αβ} ‖ρ^BS_{αβ}‖₂`.
    pub rhobs_l2_sum: f64,
    pub x0_norm: f64,
    pub seed: u64,
}

/// Minimizes the energy of `problem` starting from `init`.
pub fn minimize(
    problem: &Problem,
    init: &DisplacementField,
    opts: &SolverOptions,
) -> Result<MinimizerResult> {
    let opt = minimize_objective(problem, &init.coeffs, opts)?;
    let field = DisplacementField { coeffs: opt.x };
    let energy = problem.energy(&field)?;
    let (gbs_l2_sum, rhobs_l2_sum) = problem.strain_l2_sums(&field)?;
    let x0_norm = problem.x0_norm(&field);
    Ok(MinimizerResult {
        energy,
        grad_inf: opt.grad_inf,
        iterations: opt.iterations,
        converged: opt.termination == Termination::Converged,
        termination: opt.termination,
        history: opt.history,
        gbs_l2_sum,
        rhobs_l2_sum,
        x0_norm,
        seed: opts.seed,
        field,
    })
}

/// Random field with standard normal coefficients, rescaled to `X₀`-norm `magnitude`.
pub fn random_field(problem: &Problem, magnitude: f64, seed: u64) -> DisplacementField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..problem.dim())
        .map(|_| StandardNormal.sample(&mut rng))
        .collect();
    let field = DisplacementField { coeffs };
    let norm = problem.x0_norm(&field);
    if norm > 0.0 {
        field.scaled(magnitude / norm)
    } else {
        field
    }
}

/// One run of [`multi_start`].
#[derive(Debug, Clone, PartialEq)]
pub struct StartRun {
    pub index: usize,
    /// `None` for the zero start.
    pub seed: Option<u64>,
    pub start_norm: f64,
    pub outcome: core::result::Result<MinimizerResult, Error>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiStartReport {
    pub magnitude: f64,
    pub runs: Vec<StartRun>,
    /// Largest pairwise `X₀`-distance between converged results.
    pub dispersion: f64,
    pub converged: usize,
}

impl MultiStartReport {
    /// Converged run with the lowest energy.
    pub fn best(&self) -> Option<&MinimizerResult> {
        self.runs
            .iter()
            .filter_map(|r| r.outcome.as_ref().ok())
            .filter(|r| r.converged)
            .min_by(|a, b| {
                a.energy
                    .total
                    .partial_cmp(&b.energy.total)
                    .unwrap_or(core::cmp::Ordering::Equal)
            })
    }
}

/// Runs the zero start and `n_starts` seeded random starts of `X₀`-norm
/// `magnitude`. Run `i ≥ 1` uses seed `opts.seed + i − 1`.
pub fn multi_start(
    problem: &Problem,
    n_starts: usize,
    magnitude: f64,
    opts: &SolverOptions,
) -> Result<MultiStartReport> {
    if n_starts < 2 {
        return Err(Error::InvalidParameter(
            "multi-start needs at least 2 random starts",
        ));
    }
    opts.validate()?;
    let mut runs = Vec::with_capacity(n_starts + 1);
    for index in 0..=n_starts {
        let (seed, init) = if index == 0 {
            (None, problem.zero_field())
        } else {
            let seed = opts.seed.wrapping_add(index as u64 - 1);
            (Some(seed), random_field(problem, magnitude, seed))
        };
        let run_opts = SolverOptions {
            seed: seed.unwrap_or(opts.seed),
            ..*opts
        };
        let start_norm = problem.x0_norm(&init);
        let outcome = minimize(problem, &init, &run_opts);
        runs.push(StartRun {
            index,
            seed,
            start_norm,
            outcome,
        });
    }
    let converged: Vec<&MinimizerResult> = runs
        .iter()
        .filter_map(|r| r.outcome.as_ref().ok())
        .filter(|r| r.converged)
        .collect();
    let mut dispersion: f64 = 0.0;
    for i in 0..converged.len() {
        for j in (i + 1)..converged.len() {
            let diff = converged[i].field.axpy(-1.0, &converged[j].field);
            dispersion = dispersion.max(problem.x0_norm(&diff));
        }
    }
    Ok(MultiStartReport {
        magnitude,
        converged: converged.len(),
        runs,
        dispersion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl Objective for Rosenbrock {
        fn dim(&self) -> usize {
            2
        }
        fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
            let (a, b) = (1.0 - x[0], x[1] - x[0] * x[0]);
            Ok(Evaluation {
                value: a * a + 100.0 * b * b,
                magnitude: a * a + 100.0 * b * b,
                gradient: vec![-2.0 * a - 400.0 * x[0] * b, 200.0 * b],
            })
        }
    }

    struct Quadratic(Vec<f64>);

    impl Objective for Quadratic {
        fn dim(&self) -> usize {
            self.0.len()
        }
        fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
            let value = x
                .iter()
                .zip(&self.0)
                .map(|(xi, di)| 0.5 * di * xi * xi - xi)
                .sum::<f64>();
            let magnitude = x
                .iter()
                .zip(&self.0)
                .map(|(xi, di)| 0.5 * di * xi * xi + xi.abs())
                .sum();
            Ok(Evaluation {
                value,
                magnitude,
                gradient: x
                    .iter()
                    .zip(&self.0)
                    .map(|(xi, di)| di * xi - 1.0)
                    .collect(),
            })
        }
    }

    #[test]
    fn lbfgs_solves_rosenbrock() {
        let opts = SolverOptions {
            grad_tol: 1e-10,
            ..Default::default()
        };
        let r = minimize_objective(&Rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        assert!((r.x[0] - 1.0).abs() < 1e-8 && (r.x[1] - 1.0).abs() < 1e-8);
        for w in r.history.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-14 * w[0].energy.abs().max(1.0));
        }
    }

    #[test]
    fn gradient_descent_solves_diagonal_quadratic() {
        let q = Quadratic(vec![1.0, 2.0, 4.0]);
        let opts = SolverOptions {
            method: Method::GradientDescent,
            grad_tol: 1e-10,
            ..Default::default()
        };
        let r = minimize_objective(&q, &[0.0; 3], &opts).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        for (xi, di) in r.x.iter().zip(&q.0) {
            assert!((xi - 1.0 / di).abs() < 1e-9);
        }
    }

    #[test]
    fn max_iterations_reported() {
        let opts = SolverOptions {
            max_iters: 1,
            ..Default::default()
        };
        let r = minimize_objective(&Rosenbrock, &[-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.termination, Termination::MaxIterations);
        assert_eq!(r.iterations, 1);
        assert_eq!(r.history.len(), 2);
    }

    #[test]
    fn converged_start_takes_no_iterations() {
        let r = minimize_objective(&Rosenbrock, &[1.0, 1.0], &SolverOptions::default()).unwrap();
        assert_eq!(r.termination, Termination::Converged);
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn invalid_options_rejected() {
        for opts in [
            SolverOptions {
                armijo: 1.0,
                ..Default::default()
            },
            SolverOptions {
                backtrack: 0.0,
                ..Default::default()
            },
            SolverOptions {
                memory: 0,
                ..Default::default()
            },
        ] {
            assert!(minimize_objective(&Rosenbrock, &[0.0, 0.0], &opts).is_err());
        }
    }
}
