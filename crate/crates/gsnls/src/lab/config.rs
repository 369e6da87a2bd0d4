//! Experiment configuration: key-value blocks, cross-validation, builders.
//!
//! Configs load from TOML (the block grammar documented in the README) or
//! from an equivalent JSON object; which parser runs is decided by the file
//! extension, defaulting to TOML. Every randomized quantity downstream is
//! keyed off `ensemble.seed`, so a config plus a seed pins an experiment
//! bitwise.

use crate::integrator::{Scheme, SchemeConfig};
use crate::noise::{NoiseModel, NoiseProfile};
use crate::physics::{PowerNonlinearity, Sign};
use crate::spectral::{field, Field, GeometryKind, SpectralBasis};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeometryBlock {
    pub kind: GeometryKind,
    pub n_modes: usize,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "one")]
    pub eps_shift: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NonlinearityKind {
    Defocusing,
    Focusing,
    /// Linear Schrödinger dynamics; alpha is ignored.
    Off,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NonlinearityBlock {
    pub kind: NonlinearityKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    3.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NoiseBlock {
    /// Truncation count M.
    pub modes: usize,
    pub gamma: f64,
    #[serde(default = "default_s_dec")]
    pub s_dec: f64,
    #[serde(default = "default_profile")]
    pub profile: NoiseProfile,
}

fn default_s_dec() -> f64 {
    2.0
}

fn default_profile() -> NoiseProfile {
    NoiseProfile::Adapted
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeBlock {
    pub scheme: Scheme,
    pub dt: f64,
    pub horizon: f64,
    /// Galerkin level for single-level runs.
    pub level: u32,
    /// Level list for scans and coupled runs; falls back to `[level]`.
    #[serde(default)]
    pub levels: Option<Vec<u32>>,
    #[serde(default)]
    pub strang: bool,
    #[serde(default = "default_tol")]
    pub fixed_point_tol: f64,
    #[serde(default = "default_max_iter")]
    pub fixed_point_max_iter: usize,
    #[serde(default = "default_stride")]
    pub record_every: usize,
    #[serde(default = "default_blowup")]
    pub blowup_factor: f64,
}

fn default_tol() -> f64 {
    1e-12
}
fn default_max_iter() -> usize {
    50
}
fn default_stride() -> usize {
    10
}
fn default_blowup() -> f64 {
    1e6
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnsembleBlock {
    /// Monte-Carlo paths (doubles as the trial count for randomized probes).
    pub paths: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    /// Real coefficients with a Gaussian envelope exp(-(degree/width)^2),
    /// normalized to `amplitude` in the H norm.
    SpectralBump,
    /// `amplitude` on one basis mode (by index).
    SingleMode,
    /// Physically constant value `amplitude` (its L^2 projection where the
    /// basis has no constant mode).
    Constant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InitialBlock {
    pub kind: InitialKind,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default)]
    pub mode: usize,
    #[serde(default = "one")]
    pub amplitude: f64,
}

fn default_width() -> f64 {
    3.0
}

impl Default for InitialBlock {
    fn default() -> Self {
        InitialBlock {
            kind: InitialKind::SpectralBump,
            width: default_width(),
            mode: 0,
            amplitude: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct OutputBlock {
    /// Output directory; experiments refuse to run without one, the CLI
    /// supplies its `--out` flag here.
    pub dir: Option<std::path::PathBuf>,
    /// Also dump recorded coefficient frames as binary.
    #[serde(default)]
    pub write_frames: bool,
}

/// Full experiment configuration, one block per concern.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub geometry: GeometryBlock,
    pub nonlinearity: NonlinearityBlock,
    pub noise: NoiseBlock,
    pub scheme: SchemeBlock,
    pub ensemble: EnsembleBlock,
    #[serde(default)]
    pub initial: InitialBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

impl Default for ExperimentConfig {
    /// The desk-scale default: defocusing cubic on the torus, N = 256,
    /// dt = 1e-3 over [0, 1], M = 16 noise modes, 64 paths, levels 4..7.
    fn default() -> Self {
        ExperimentConfig {
            geometry: GeometryBlock {
                kind: GeometryKind::Torus1d,
                n_modes: 256,
                beta: 1.0,
                eps_shift: 1.0,
            },
            nonlinearity: NonlinearityBlock {
                kind: NonlinearityKind::Defocusing,
                alpha: 3.0,
            },
            noise: NoiseBlock {
                modes: 16,
                gamma: 0.5,
                s_dec: 2.0,
                profile: NoiseProfile::Adapted,
            },
            scheme: SchemeBlock {
                scheme: Scheme::SplitMidpoint,
                dt: 1e-3,
                horizon: 1.0,
                level: 4,
                levels: Some(vec![4, 5, 6, 7]),
                strang: false,
                fixed_point_tol: default_tol(),
                fixed_point_max_iter: default_max_iter(),
                record_every: default_stride(),
                blowup_factor: default_blowup(),
            },
            ensemble: EnsembleBlock { paths: 64, seed: 7 },
            initial: InitialBlock::default(),
            output: OutputBlock::default(),
        }
    }
}

/// Outcome of config cross-validation: hard errors and advisory warnings.
#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{path:?}: {e}")))
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{path:?}: {e}")))
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Stable hash of the canonical JSON form, recorded in summaries so a
    /// result file names the exact configuration that produced it.
    pub fn config_hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in canon.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100_0000_01b3);
        }
        format!("{h:016x}")
    }

    pub fn levels(&self) -> Vec<u32> {
        match &self.scheme.levels {
            Some(ls) if !ls.is_empty() => ls.clone(),
            _ => vec![self.scheme.level],
        }
    }

    pub fn build_basis(&self) -> Result<Arc<SpectralBasis>> {
        SpectralBasis::build(
            self.geometry.kind,
            self.geometry.n_modes,
            self.geometry.beta,
            self.geometry.eps_shift,
        )
    }

    pub fn build_nonlinearity(&self) -> Option<PowerNonlinearity> {
        match self.nonlinearity.kind {
            NonlinearityKind::Off => None,
            NonlinearityKind::Defocusing => {
                Some(PowerNonlinearity::new(self.nonlinearity.alpha, Sign::Defocusing))
            }
            NonlinearityKind::Focusing => {
                Some(PowerNonlinearity::new(self.nonlinearity.alpha, Sign::Focusing))
            }
        }
    }

    pub fn build_noise(&self, basis: &Arc<SpectralBasis>) -> Result<NoiseModel> {
        NoiseModel::new(
            basis,
            self.noise.modes,
            self.noise.gamma,
            self.noise.s_dec,
            self.noise.profile,
        )
    }

    pub fn scheme_config(&self) -> SchemeConfig {
        SchemeConfig {
            scheme: self.scheme.scheme,
            dt: self.scheme.dt,
            horizon: self.scheme.horizon,
            level: self.scheme.level,
            strang: self.scheme.strang,
            fixed_point_tol: self.scheme.fixed_point_tol,
            fixed_point_max_iter: self.scheme.fixed_point_max_iter,
            record_every: self.scheme.record_every,
            blowup_factor: self.scheme.blowup_factor,
        }
    }

    pub fn initial_state(&self, basis: &Arc<SpectralBasis>) -> Result<Field> {
        match self.initial.kind {
            InitialKind::SpectralBump => {
                let w = self.initial.width.max(1e-6);
                let mut f = Field::zero(Arc::clone(basis));
                for (c, &deg) in f.coeffs_mut().iter_mut().zip(basis.mode_degree()) {
                    let r = deg.unsigned_abs() as f64 / w;
                    *c = Complex64::new((-r * r).exp(), 0.0);
                }
                let norm = f.norm_h();
                Ok(f.scaled(Complex64::new(self.initial.amplitude / norm, 0.0)))
            }
            InitialKind::SingleMode => {
                if self.initial.mode >= basis.n_modes() {
                    return Err(Error::Config(format!(
                        "initial mode {} outside basis of {} modes",
                        self.initial.mode,
                        basis.n_modes()
                    )));
                }
                Ok(Field::unit_mode(Arc::clone(basis), self.initial.mode)
                    .scaled(Complex64::new(self.initial.amplitude, 0.0)))
            }
            InitialKind::Constant => {
                let samples =
                    vec![Complex64::new(self.initial.amplitude, 0.0); basis.grid().len()];
                field::analyze(&samples, basis)
            }
        }
    }

    /// Cross-validate the blocks against each other.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let basis = match self.build_basis() {
            Ok(b) => Some(b),
            Err(e) => {
                report.errors.push(format!("geometry: {e}"));
                None
            }
        };
        if self.nonlinearity.kind != NonlinearityKind::Off {
            if self.nonlinearity.alpha <= 1.0 {
                report
                    .errors
                    .push(format!("nonlinearity: alpha must exceed 1, got {}", self.nonlinearity.alpha));
            } else if let Some(nl) = self.build_nonlinearity() {
                if !nl.admissible_for(self.geometry.kind, self.geometry.beta) {
                    report.warnings.push(format!(
                        "alpha = {} is outside the subcritical window for {} (beta = {}); \
                         supercritical probing is allowed but global bounds are not expected",
                        self.nonlinearity.alpha, self.geometry.kind, self.geometry.beta
                    ));
                }
            }
        }
        if let Some(basis) = &basis {
            match self.build_noise(basis) {
                Ok(noise) => {
                    let sums = noise.summability_partial_sums();
                    if let Some(&total) = sums.last() {
                        if !total.is_finite() {
                            report.errors.push("noise: H^1 sums are not finite".into());
                        }
                    }
                }
                Err(e) => report.errors.push(format!("noise: {e}")),
            }
            let max_ls = *basis.lambda_s().last().unwrap();
            for &n in &self.levels() {
                if (2.0f64).powi(n as i32 + 1) > max_ls {
                    report.warnings.push(format!(
                        "level {n}: 2^{} exceeds max lambda_S = {max_ls}; the projectors are the identity there",
                        n + 1
                    ));
                }
                let dim = basis.level_dim(n);
                let lam_max = basis.lambda_a()[dim.saturating_sub(1)];
                if self.scheme.scheme == Scheme::EulerMaruyama && self.scheme.dt * lam_max > 1.0 {
                    report.warnings.push(format!(
                        "level {n}: dt * max lambda_A = {:.2} > 1; the explicit scheme will amplify stiff modes",
                        self.scheme.dt * lam_max
                    ));
                }
            }
            if let Err(e) = self.initial_state(basis) {
                report.errors.push(format!("initial: {e}"));
            }
        }
        if let Err(e) = self.scheme_config().validate() {
            report.errors.push(format!("scheme: {e}"));
        }
        if self.scheme.horizon > 0.0 && self.scheme.horizon < self.scheme.dt {
            report
                .warnings
                .push("horizon is shorter than one step; no steps will be taken".into());
        }
        if self.ensemble.paths == 0 {
            report.errors.push("ensemble: paths must be at least 1".into());
        }
        report
    }
}
