//! Run configuration: one JSON document, strictly validated.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use bsshell_core::analysis::EigenMethod;
use bsshell_core::forces::{
    perturb, scale_to_magnitude, special_force, GridForce, MagnitudeTarget, ScalarFn,
};
use bsshell_core::{
    Chart, ChartKind, ForceField, GeometryFrame, Material, Mesh, Method, Problem, Rect,
    SolverOptions, Space, SpecialForceSpec,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub chart: ChartConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default)]
    pub mesh: MeshConfig,
    #[serde(default)]
    pub force: ForceConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub geometry_check: SamplingConfig,
    #[serde(default)]
    pub kinematics: SamplingConfig,
    #[serde(default)]
    pub constants: ConstantsConfig,
    #[serde(default)]
    pub probe: ProbeConfig,
    #[serde(default)]
    pub force_family: ForceFamilyConfig,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartConfig {
    Plate {
        domain: Option<DomainConfig>,
    },
    Cylinder {
        radius: f64,
        domain: Option<DomainConfig>,
    },
    SphereCap {
        radius: f64,
        domain: Option<DomainConfig>,
    },
    Hypar {
        c1: f64,
        c2: f64,
        domain: Option<DomainConfig>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    pub lambda: f64,
    pub mu: f64,
    pub epsilon: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        Self {
            lambda: 1.0,
            mu: 1.0,
            epsilon: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub nx: usize,
    pub ny: usize,
    pub quad_order: usize,
}

impl Default for MeshConfig {
    fn default() -> Self {
        Self {
            nx: 8,
            ny: 8,
            quad_order: 4,
        }
    }
}

/// Magnitude requested from the special family, `Σᵢ‖fⁱ‖₂ > M` or `< δ`.
#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TargetConfig {
    AtLeast(f64),
    AtMost(f64),
}

impl From<TargetConfig> for MagnitudeTarget {
    fn from(t: TargetConfig) -> Self {
        match t {
            TargetConfig::AtLeast(m) => MagnitudeTarget::AtLeast(m),
            TargetConfig::AtMost(d) => MagnitudeTarget::AtMost(d),
        }
    }
}

/// `hⁱ(y) = amplitude[i] · sin(m₁π ŷ₁) sin(m₂π ŷ₂)` in normalized domain coordinates.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationConfig {
    pub amplitude: [f64; 3],
    #[serde(default = "default_modes")]
    pub modes: [u32; 2],
}

fn default_modes() -> [u32; 2] {
    [1, 1]
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum ForceConfig {
    #[default]
    Zero,
    Special {
        center: Option<[f64; 2]>,
        n: Option<f64>,
        #[serde(default = "default_amplitude")]
        k: f64,
        target: Option<TargetConfig>,
    },
    Perturbed {
        center: Option<[f64; 2]>,
        n: Option<f64>,
        #[serde(default = "default_amplitude")]
        k: f64,
        target: Option<TargetConfig>,
        perturbation: PerturbationConfig,
    },
    /// Rows `y1,y2,f1,f2,f3` after a header line; relative paths are
    /// resolved against the configuration file.
    Custom { file: PathBuf },
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum MethodConfig {
    Lbfgs,
    GradientDescent,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub method: MethodConfig,
    pub memory: usize,
    pub grad_tol: f64,
    /// When set, the tolerance becomes `min(grad_tol, grad_tol_relative · ‖∇J(init)‖∞)`.
    pub grad_tol_relative: Option<f64>,
    pub max_iters: usize,
    pub armijo: f64,
    pub backtrack: f64,
    pub initial_step: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverOptions::default();
        Self {
            method: MethodConfig::Lbfgs,
            memory: d.memory,
            grad_tol: d.grad_tol,
            grad_tol_relative: None,
            max_iters: d.max_iters,
            armijo: d.armijo,
            backtrack: d.backtrack,
            initial_step: d.initial_step,
            seed: d.seed,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> Result<SolverOptions, CliError> {
        let opts = SolverOptions {
            method: match self.method {
                MethodConfig::Lbfgs => Method::Lbfgs,
                MethodConfig::GradientDescent => Method::GradientDescent,
            },
            memory: self.memory,
            grad_tol: self.grad_tol,
            max_iters: self.max_iters,
            armijo: self.armijo,
            backtrack: self.backtrack,
            initial_step: self.initial_step,
            seed: self.seed,
        };
        opts.validate().map_err(CliError::config)?;
        if let Some(r) = self.grad_tol_relative {
            if !(r > 0.0 && r.is_finite()) {
                return Err(CliError::Config(
                    "solver.grad_tol_relative must be positive".into(),
                ));
            }
        }
        Ok(opts)
    }
}

/// Random sampling for the pointwise verification commands.
#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingConfig {
    pub samples: usize,
    /// Central-difference step.
    pub step: f64,
    /// Half-width of the uniform distribution of random jet entries.
    pub jet_scale: f64,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            samples: 200,
            step: 1e-5,
            jet_scale: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum EigenMethodConfig {
    Auto,
    Dense,
    Iterative,
}

impl From<EigenMethodConfig> for EigenMethod {
    fn from(m: EigenMethodConfig) -> Self {
        match m {
            EigenMethodConfig::Auto => EigenMethod::Auto,
            EigenMethodConfig::Dense => EigenMethod::Dense,
            EigenMethodConfig::Iterative => EigenMethod::Iterative,
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ConstantsConfig {
    pub method: EigenMethodConfig,
    pub c2_samples: usize,
    /// Random tangential fields for the realized Korn inequality.
    pub korn_samples: usize,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            method: EigenMethodConfig::Auto,
            c2_samples: 100,
            korn_samples: 100,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProbeConfig {
    pub n_starts: usize,
    pub magnitudes: Vec<f64>,
    /// When set, a dispersion above this value fails the command.
    pub assert_dispersion: Option<f64>,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        Self {
            n_starts: 4,
            magnitudes: vec![0.1, 1.0],
            assert_dispersion: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ForceFamilyConfig {
    pub targets: Vec<TargetConfig>,
    /// Points sampled for the support and transversality checks.
    pub samples: usize,
    /// Gauss points per axis of the refined verification quadrature.
    pub refined_quad_order: usize,
    /// Cells per axis of the refined verification mesh.
    pub refined_cells: usize,
}

impl Default for ForceFamilyConfig {
    fn default() -> Self {
        Self {
            targets: vec![TargetConfig::AtLeast(1e6), TargetConfig::AtMost(1e-9)],
            samples: 1000,
            refined_quad_order: 8,
            refined_cells: 32,
        }
    }
}

/// Everything a command needs, validated.
pub struct Setup {
    pub chart: Chart,
    pub material: Material,
    pub space: Space,
    pub frames: Vec<GeometryFrame>,
    pub force: ForceField,
    /// `maxᵢ‖hⁱ‖₂` for perturbed forces.
    pub l_perturbation: Option<f64>,
}

impl Setup {
    pub fn problem(&self) -> Result<Problem, CliError> {
        Problem::new(
            self.chart,
            self.material,
            self.space.clone(),
            self.force.clone(),
        )
        .map_err(CliError::config)
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
        let base = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok((cfg, base))
    }

    pub fn chart(&self) -> Result<Chart, CliError> {
        let (kind, domain) = match self.chart {
            ChartConfig::Plate { domain } => (ChartKind::Plate, domain),
            ChartConfig::Cylinder { radius, domain } => (ChartKind::Cylinder { radius }, domain),
            ChartConfig::SphereCap { radius, domain } => (ChartKind::SphereCap { radius }, domain),
            ChartConfig::Hypar { c1, c2, domain } => (ChartKind::Hypar { c1, c2 }, domain),
        };
        let chart = match domain {
            Some(d) => Chart::new(kind, Rect::new(d.min, d.max).map_err(CliError::config)?),
            None => Chart::with_default_domain(kind),
        };
        chart.map_err(CliError::config)
    }

    pub fn material(&self) -> Result<Material, CliError> {
        let m = self.material;
        Material::new(m.lambda, m.mu, m.epsilon).map_err(CliError::config)
    }

    pub fn space(&self, chart: &Chart) -> Result<Space, CliError> {
        let m = self.mesh;
        let mesh = Mesh::new(chart.domain, m.nx, m.ny).map_err(CliError::config)?;
        Space::build(mesh, m.quad_order).map_err(CliError::config)
    }

    /// Validates every block and builds chart, material, space and force.
    pub fn setup(&self, base_dir: &Path) -> Result<Setup, CliError> {
        let chart = self.chart()?;
        let material = self.material()?;
        let space = self.space(&chart)?;
        let frames = space.frames(&chart, &material).map_err(CliError::config)?;
        self.solver.options()?;
        let (force, l_perturbation) = self.force(&chart.domain, &space, &frames, base_dir)?;
        Ok(Setup {
            chart,
            material,
            space,
            frames,
            force,
            l_perturbation,
        })
    }

    fn force(
        &self,
        domain: &Rect,
        space: &Space,
        frames: &[GeometryFrame],
        base_dir: &Path,
    ) -> Result<(ForceField, Option<f64>), CliError> {
        let special =
            |center: Option<[f64; 2]>, n: Option<f64>, k: f64, target: Option<TargetConfig>| {
                let mut spec = SpecialForceSpec::default_for(domain, k);
                if let Some(c) = center {
                    spec.center = c;
                }
                if let Some(n) = n {
                    spec.scale = n;
                }
                if let Some(t) = target {
                    spec = scale_to_magnitude(spec, domain, space, frames, t.into())
                        .map_err(CliError::config)?
                        .spec;
                }
                special_force(spec, domain).map_err(CliError::config)
            };
        match &self.force {
            ForceConfig::Zero => Ok((ForceField::zero(), None)),
            ForceConfig::Special {
                center,
                n,
                k,
                target,
            } => Ok((special(*center, *n, *k, *target)?, None)),
            ForceConfig::Perturbed {
                center,
                n,
                k,
                target,
                perturbation,
            } => {
                let base = special(*center, *n, *k, *target)?;
                let h = perturbation_functions(perturbation, domain);
                let (f, l) = perturb(&base, h, space);
                Ok((f, Some(l)))
            }
            ForceConfig::Custom { file } => {
                let path = if file.is_absolute() {
                    file.clone()
                } else {
                    base_dir.join(file)
                };
                Ok((load_force_file(&path)?.into_force(), None))
            }
        }
    }
}

fn perturbation_functions(p: &PerturbationConfig, domain: &Rect) -> [ScalarFn; 3] {
    let d = *domain;
    let [m1, m2] = p.modes.map(f64::from);
    let make = |a: f64| -> ScalarFn {
        Arc::new(move |y| {
            let u = (y[0] - d.min[0]) / d.width();
            let v = (y[1] - d.min[1]) / d.height();
            a * (m1 * std::f64::consts::PI * u).sin() * (m2 * std::f64::consts::PI * v).sin()
        })
    };
    [
        make(p.amplitude[0]),
        make(p.amplitude[1]),
        make(p.amplitude[2]),
    ]
}

/// Header of a custom force file.
pub const FORCE_FILE_HEADER: [&str; 5] = ["y1", "y2", "f1", "f2", "f3"];

/// Reads a custom force table: a header `y1,y2,f1,f2,f3`, then one row per
/// grid point of a complete tensor grid.
pub fn load_force_file(path: &Path) -> Result<GridForce, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read force file {}: {e}", path.display())))?;
    let header = reader
        .headers()
        .map_err(|e| CliError::Config(format!("force file {}: {e}", path.display())))?;
    if header.iter().ne(FORCE_FILE_HEADER) {
        return Err(CliError::Config(format!(
            "force file {} must start with the header {}",
            path.display(),
            FORCE_FILE_HEADER.join(",")
        )));
    }
    let mut rows = Vec::new();
    for record in reader.deserialize::<[f64; 5]>() {
        let row =
            record.map_err(|e| CliError::Config(format!("force file {}: {e}", path.display())))?;
        if row.iter().any(|v| !v.is_finite()) {
            return Err(CliError::Config(format!(
                "force file {} contains non-finite values",
                path.display()
            )));
        }
        rows.push(row);
    }
    GridForce::from_rows(&rows).map_err(CliError::config)
}
