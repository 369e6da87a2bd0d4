//! Time integration of the finite-dimensional Galerkin dynamics.
//!
//! The default scheme composes three sub-flows per step, each an exact
//! isometry of the coefficient l^2 norm:
//!
//! 1. linear: `c_m <- exp(-i lambda_A[m] dt) c_m`;
//! 2. nonlinear: the exact pointwise phase flow of `u' = -i F(u)`, evaluated
//!    on the square unitary collocation grid of the level span H_n, so the
//!    rotation is an l^2 isometry and the state never leaves H_n;
//! 3. noise: the Stratonovich midpoint rule
//!    `u+ = u- - i K((u+ + u-)/2)`, `K = sum_m dbeta_m S_n B_m S_n`,
//!    a Cayley transform of a skew-Hermitian operator, solved by fixed-point
//!    iteration.
//!
//! Mass is therefore conserved to solver tolerance on every step of every
//! path. The explicit Euler-Maruyama scheme integrates the Ito form with the
//! correction drift `mu_n` instead; it conserves nothing exactly and serves
//! as the consistency cross-check for the correction term.

use crate::littlewood_paley::{Projector, ProjectorKind};
use crate::noise::{NoiseModel, WienerDriver};
use crate::physics::PowerNonlinearity;
use crate::spectral::{Field, SpectralBasis, Transform};
use crate::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    SplitMidpoint,
    EulerMaruyama,
}

/// Time-stepping parameters for one Galerkin level.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Horizon T; the number of steps is round(T / dt).
    pub horizon: f64,
    /// Galerkin level n.
    pub level: u32,
    /// Strang ordering (half linear, nonlinear, noise, half linear) instead
    /// of the default Lie composition.
    #[serde(default)]
    pub strang: bool,
    #[serde(default = "default_fixed_point_tol")]
    pub fixed_point_tol: f64,
    #[serde(default = "default_fixed_point_max_iter")]
    pub fixed_point_max_iter: usize,
    /// Record a frame every this many steps.
    #[serde(default = "default_record_every")]
    pub record_every: usize,
    /// Abort when the energy norm exceeds this multiple of its initial value.
    #[serde(default = "default_blowup_factor")]
    pub blowup_factor: f64,
}

fn default_fixed_point_tol() -> f64 {
    1e-12
}
fn default_fixed_point_max_iter() -> usize {
    50
}
fn default_record_every() -> usize {
    10
}
fn default_blowup_factor() -> f64 {
    1e6
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, dt: f64, horizon: f64, level: u32) -> Self {
        SchemeConfig {
            scheme,
            dt,
            horizon,
            level,
            strang: false,
            fixed_point_tol: default_fixed_point_tol(),
            fixed_point_max_iter: default_fixed_point_max_iter(),
            record_every: default_record_every(),
            blowup_factor: default_blowup_factor(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon >= 0.0) {
            return Err(Error::Config(format!(
                "horizon must be nonnegative, got {}",
                self.horizon
            )));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        (self.horizon / self.dt).round() as u64
    }
}

/// Recorded time series of one path.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Field>,
    /// ||u||_H^2 per frame.
    pub mass: Vec<f64>,
    pub energy: Vec<f64>,
    pub norm_energy: Vec<f64>,
    pub norm_lalpha: Vec<f64>,
}

impl Trajectory {
    fn with_capacity(frames: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(frames),
            states: Vec::with_capacity(frames),
            mass: Vec::with_capacity(frames),
            energy: Vec::with_capacity(frames),
            norm_energy: Vec::with_capacity(frames),
            norm_lalpha: Vec::with_capacity(frames),
        }
    }

    fn record(&mut self, t: f64, state: &Field, nl: Option<&PowerNonlinearity>) {
        self.times.push(t);
        self.mass.push(state.norm_h().powi(2));
        let (energy, lalpha) = match nl {
            Some(nl) => (
                nl.energy(state),
                state.norm_lp(nl.alpha() + 1.0).unwrap_or(f64::NAN),
            ),
            None => {
                let kinetic: f64 = state
                    .coeffs()
                    .iter()
                    .zip(state.basis().lambda_a())
                    .map(|(c, &la)| la * c.norm_sqr())
                    .sum();
                (0.5 * kinetic, state.norm_lp(2.0).unwrap_or(f64::NAN))
            }
        };
        self.energy.push(energy);
        self.norm_energy.push(state.norm_energy());
        self.norm_lalpha.push(lalpha);
        self.states.push(state.clone());
    }

    pub fn n_frames(&self) -> usize {
        self.times.len()
    }

    /// max_t |mass(t) - mass(0)| / mass(0).
    pub fn max_relative_mass_drift(&self) -> f64 {
        let m0 = self.mass[0];
        if m0 == 0.0 {
            return self.mass.iter().fold(0.0f64, |a, &m| a.max(m.abs()));
        }
        self.mass
            .iter()
            .fold(0.0f64, |a, &m| a.max((m - m0).abs() / m0))
    }

    /// max_t |energy(t) - energy(0)|.
    pub fn max_energy_drift(&self) -> f64 {
        let e0 = self.energy[0];
        self.energy.iter().fold(0.0f64, |a, &e| a.max((e - e0).abs()))
    }

    pub fn sup_norm_energy(&self) -> f64 {
        self.norm_energy.iter().fold(0.0f64, |a, &x| a.max(x))
    }
}

/// E_A-dual distance per shared frame of two trajectories on one basis.
pub fn gap_series(a: &Trajectory, b: &Trajectory) -> Result<Vec<f64>> {
    if a.n_frames() != b.n_frames() {
        return Err(Error::SizeMismatch {
            expected: a.n_frames(),
            got: b.n_frames(),
        });
    }
    Ok(a.states
        .iter()
        .zip(&b.states)
        .map(|(x, y)| {
            x.add_scaled(Complex64::new(-1.0, 0.0), y).norm_energy_dual()
        })
        .collect())
}

/// Reusable stepping machine for one (basis, level, noise) triple.
///
/// Holds the cached projector weights, the unitary collocation transform of
/// the level span, the noise profile table and all scratch buffers, so a step
/// costs a handful of transforms and no repeated setup.
pub struct Stepper<'a> {
    basis: Arc<SpectralBasis>,
    cfg: &'a SchemeConfig,
    nl: Option<&'a PowerNonlinearity>,
    noise: &'a NoiseModel,
    sharp: Projector,
    smooth: Projector,
    dim: usize,
    sub_transform: Transform,
    // cached linear phases for a full and a half step
    phase_full: Vec<Complex64>,
    phase_half: Vec<Complex64>,
    // scratch
    grid_a: Vec<Complex64>,
    grid_b: Vec<Complex64>,
    modes_a: Vec<Complex64>,
    modes_b: Vec<Complex64>,
    mid: Vec<Complex64>,
    iterate: Vec<Complex64>,
    next: Vec<Complex64>,
    sub_coeffs: Vec<Complex64>,
    sub_samples: Vec<Complex64>,
    profile: Vec<f64>,
    increments: Vec<f64>,
}

impl<'a> Stepper<'a> {
    pub fn new(
        basis: &Arc<SpectralBasis>,
        cfg: &'a SchemeConfig,
        nl: Option<&'a PowerNonlinearity>,
        noise: &'a NoiseModel,
    ) -> Result<Self> {
        cfg.validate()?;
        if !Arc::ptr_eq(noise.basis(), basis) {
            return Err(Error::BasisMismatch);
        }
        let dim = basis.level_dim(cfg.level);
        let (_, sub_transform) = basis.collocation_transform(dim);
        let n = basis.n_modes();
        let g = basis.grid().len();
        let phase = |dt: f64| {
            basis
                .lambda_a()
                .iter()
                .map(|&la| Complex64::new(0.0, -la * dt).exp())
                .collect::<Vec<_>>()
        };
        Ok(Stepper {
            basis: Arc::clone(basis),
            cfg,
            nl,
            noise,
            sharp: Projector::new(basis, ProjectorKind::Sharp, cfg.level),
            smooth: Projector::new(basis, ProjectorKind::Smooth, cfg.level),
            dim,
            sub_transform,
            phase_full: phase(cfg.dt),
            phase_half: phase(0.5 * cfg.dt),
            grid_a: vec![Complex64::new(0.0, 0.0); g],
            grid_b: vec![Complex64::new(0.0, 0.0); g],
            modes_a: vec![Complex64::new(0.0, 0.0); n],
            modes_b: vec![Complex64::new(0.0, 0.0); n],
            mid: vec![Complex64::new(0.0, 0.0); n],
            iterate: vec![Complex64::new(0.0, 0.0); n],
            next: vec![Complex64::new(0.0, 0.0); n],
            sub_coeffs: vec![Complex64::new(0.0, 0.0); dim],
            sub_samples: vec![Complex64::new(0.0, 0.0); dim],
            profile: vec![0.0; g],
            increments: vec![0.0; noise.mode_count()],
        })
    }

    pub fn level_dim(&self) -> usize {
        self.dim
    }

    /// Initial state of the Galerkin flow: the sharp projection of u0.
    pub fn project_initial(&self, u0: &Field) -> Field {
        self.sharp.apply(u0)
    }

    fn linear_substep(&self, coeffs: &mut [Complex64], half: bool) {
        let phase = if half { &self.phase_half } else { &self.phase_full };
        for (c, p) in coeffs.iter_mut().zip(phase) {
            *c *= p;
        }
    }

    /// Exact phase flow of -iF on the unitary collocation grid of H_n.
    fn nonlinear_substep(&mut self, coeffs: &mut [Complex64]) {
        let Some(nl) = self.nl else { return };
        self.sub_coeffs.copy_from_slice(&coeffs[..self.dim]);
        self.sub_transform
            .synthesize_into(&self.sub_coeffs, &mut self.sub_samples);
        nl.phase_rotate(&mut self.sub_samples, self.cfg.dt);
        self.sub_transform
            .analyze_into(&mut self.sub_samples, &mut self.sub_coeffs);
        coeffs[..self.dim].copy_from_slice(&self.sub_coeffs);
    }

    /// K(v) = sum_m dbeta_m S_n B_m S_n v with the increments folded into one
    /// physical profile; writes into `out`.
    fn apply_noise_operator(&mut self, input: &[Complex64], out: &mut [Complex64]) {
        self.modes_a.copy_from_slice(input);
        self.smooth.apply_in_place(&mut self.modes_a);
        self.basis
            .transform()
            .synthesize_into(&self.modes_a, &mut self.grid_a);
        for (g, &e) in self.grid_a.iter_mut().zip(&self.profile) {
            *g *= e;
        }
        self.basis.transform().analyze_into(&mut self.grid_a, out);
        self.smooth.apply_in_place(out);
    }

    fn build_profile(&mut self, scale: f64) -> f64 {
        self.profile.fill(0.0);
        let mut sup = 0.0f64;
        for m in 1..=self.noise.mode_count() {
            let db = self.increments[m - 1] * scale;
            if db == 0.0 {
                continue;
            }
            let values = self.noise.mode_values(m).expect("mode within range");
            for (p, &e) in self.profile.iter_mut().zip(values) {
                *p += db * e;
            }
        }
        for &p in &self.profile {
            sup = sup.max(p.abs());
        }
        sup
    }

    /// Stratonovich midpoint step for the noise with increments already in
    /// `self.increments`, scaled by `scale`. Recursively halves the
    /// increments when the fixed point refuses to contract.
    fn noise_substep(
        &mut self,
        coeffs: &mut [Complex64],
        scale: f64,
        step: usize,
        depth: usize,
    ) -> Result<()> {
        if self.noise.mode_count() == 0 {
            return Ok(());
        }
        let sup = self.build_profile(scale);
        if sup == 0.0 {
            return Ok(());
        }
        let norm_u = l2(coeffs);
        let tol = self.cfg.fixed_point_tol * norm_u;
        self.iterate.copy_from_slice(coeffs);
        let mut converged = false;
        for _ in 0..self.cfg.fixed_point_max_iter {
            for ((m, v), u) in self.mid.iter_mut().zip(&self.iterate).zip(coeffs.iter()) {
                *m = 0.5 * (v + u);
            }
            let mid = std::mem::take(&mut self.mid);
            let mut next = std::mem::take(&mut self.next);
            self.apply_noise_operator(&mid, &mut next);
            self.mid = mid;
            for (n, u) in next.iter_mut().zip(coeffs.iter()) {
                // u - i K(mid)
                *n = u - Complex64::new(0.0, 1.0) * *n;
            }
            let err = dist(&next, &self.iterate);
            std::mem::swap(&mut self.iterate, &mut next);
            self.next = next;
            if err <= tol {
                converged = true;
                break;
            }
        }
        if converged {
            coeffs.copy_from_slice(&self.iterate);
            return Ok(());
        }
        if depth >= 8 {
            return Err(Error::FixedPointDiverged {
                step,
                max_iter: self.cfg.fixed_point_max_iter,
            });
        }
        // rare large increment: compose two midpoint maps with half the jump
        self.noise_substep(coeffs, scale * 0.5, step, depth + 1)?;
        self.noise_substep(coeffs, scale * 0.5, step, depth + 1)
    }

    fn load_increments(&mut self, drv: &WienerDriver, step: u64) {
        for m in 1..=self.noise.mode_count() {
            self.increments[m - 1] = drv.increment(step, m as u64);
        }
    }

    /// One step of the mass-conserving splitting scheme.
    pub fn split_step(
        &mut self,
        coeffs: &mut [Complex64],
        drv: &WienerDriver,
        step: u64,
    ) -> Result<()> {
        self.load_increments(drv, step);
        if self.cfg.strang {
            self.linear_substep(coeffs, true);
            self.nonlinear_substep(coeffs);
            self.noise_substep(coeffs, 1.0, step as usize, 0)?;
            self.linear_substep(coeffs, true);
        } else {
            self.linear_substep(coeffs, false);
            self.nonlinear_substep(coeffs);
            self.noise_substep(coeffs, 1.0, step as usize, 0)?;
        }
        Ok(())
    }

    /// One explicit Euler-Maruyama step of the Ito form.
    pub fn euler_maruyama_step(
        &mut self,
        coeffs: &mut [Complex64],
        drv: &WienerDriver,
        step: u64,
    ) -> Result<()> {
        let dt = self.cfg.dt;
        let n = coeffs.len();
        // drift accumulates in modes_b
        for j in 0..n {
            self.modes_b[j] = Complex64::new(0.0, -self.basis.lambda_a()[j]) * coeffs[j];
        }
        if let Some(nl) = self.nl {
            self.basis.transform().synthesize_into(coeffs, &mut self.grid_a);
            let s = match nl.sign() {
                crate::physics::Sign::Defocusing => 1.0,
                crate::physics::Sign::Focusing => -1.0,
            };
            for u in self.grid_a.iter_mut() {
                *u *= s * nl.magnitude_power(u.norm_sqr());
            }
            let mut tmp = std::mem::take(&mut self.modes_a);
            self.basis.transform().analyze_into(&mut self.grid_a, &mut tmp);
            self.sharp.apply_in_place(&mut tmp);
            for j in 0..n {
                self.modes_b[j] += Complex64::new(0.0, -1.0) * tmp[j];
            }
            self.modes_a = tmp;
        }
        if self.noise.mode_count() > 0 {
            // mu_n(u): per-mode chain (S_n B_m S_n)^2 through shared buffers
            self.mid.copy_from_slice(coeffs);
            self.smooth.apply_in_place(&mut self.mid);
            self.basis.transform().synthesize_into(&self.mid, &mut self.grid_a);
            for m in 1..=self.noise.mode_count() {
                let values = self.noise.mode_values(m).expect("mode within range");
                for ((g, &base), &e) in self.grid_b.iter_mut().zip(&self.grid_a).zip(values) {
                    *g = base * e;
                }
                let mut tmp = std::mem::take(&mut self.modes_a);
                self.basis.transform().analyze_into(&mut self.grid_b, &mut tmp);
                self.smooth.apply_in_place(&mut tmp);
                self.smooth.apply_in_place(&mut tmp);
                self.basis.transform().synthesize_into(&tmp, &mut self.grid_b);
                for (g, &e) in self.grid_b.iter_mut().zip(values) {
                    *g *= e;
                }
                self.basis.transform().analyze_into(&mut self.grid_b, &mut tmp);
                self.smooth.apply_in_place(&mut tmp);
                for j in 0..n {
                    self.modes_b[j] -= 0.5 * tmp[j];
                }
                self.modes_a = tmp;
            }
        }
        // diffusion: -i K(u) with the step increments
        self.load_increments(drv, step);
        let sup = if self.noise.mode_count() > 0 {
            self.build_profile(1.0)
        } else {
            0.0
        };
        if sup > 0.0 {
            let mut tmp = std::mem::take(&mut self.modes_a);
            let input = std::mem::take(&mut self.mid);
            // reuse mid as a copy of the state for the operator input
            let mut state_copy = input;
            state_copy.copy_from_slice(coeffs);
            self.apply_noise_operator(&state_copy, &mut tmp);
            self.mid = state_copy;
            for j in 0..n {
                coeffs[j] += dt * self.modes_b[j] + Complex64::new(0.0, -1.0) * tmp[j];
            }
            self.modes_a = tmp;
        } else {
            for j in 0..n {
                coeffs[j] += dt * self.modes_b[j];
            }
        }
        for c in coeffs.iter() {
            if !c.re.is_finite() || !c.im.is_finite() {
                return Err(Error::NonFinite { step: step as usize });
            }
        }
        Ok(())
    }

    pub fn step(
        &mut self,
        coeffs: &mut [Complex64],
        drv: &WienerDriver,
        step: u64,
    ) -> Result<()> {
        match self.cfg.scheme {
            Scheme::SplitMidpoint => self.split_step(coeffs, drv, step),
            Scheme::EulerMaruyama => self.euler_maruyama_step(coeffs, drv, step),
        }
    }
}

fn l2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dist(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// One splitting step as a standalone call (builds the level caches afresh;
/// use [`run_path`] or a [`Stepper`] for whole trajectories).
pub fn step_split_midpoint(
    state: &Field,
    drv: &WienerDriver,
    step: u64,
    cfg: &SchemeConfig,
    nl: Option<&PowerNonlinearity>,
    noise: &NoiseModel,
) -> Result<Field> {
    let mut stepper = Stepper::new(state.basis(), cfg, nl, noise)?;
    let mut out = state.clone();
    stepper.split_step(out.coeffs_mut(), drv, step)?;
    Ok(out)
}

/// One Euler-Maruyama step as a standalone call.
pub fn step_euler_maruyama(
    state: &Field,
    drv: &WienerDriver,
    step: u64,
    cfg: &SchemeConfig,
    nl: Option<&PowerNonlinearity>,
    noise: &NoiseModel,
) -> Result<Field> {
    let mut stepper = Stepper::new(state.basis(), cfg, nl, noise)?;
    let mut out = state.clone();
    stepper.euler_maruyama_step(out.coeffs_mut(), drv, step)?;
    Ok(out)
}

/// Integrate one path from `u0` (projected onto H_n) to the horizon.
pub fn run_path(
    u0: &Field,
    cfg: &SchemeConfig,
    nl: Option<&PowerNonlinearity>,
    noise: &NoiseModel,
    drv: &WienerDriver,
) -> Result<Trajectory> {
    let mut stepper = Stepper::new(u0.basis(), cfg, nl, noise)?;
    let mut state = stepper.project_initial(u0);
    let n_steps = cfg.n_steps();
    let frames = (n_steps as usize) / cfg.record_every + 2;
    let mut traj = Trajectory::with_capacity(frames);
    traj.record(0.0, &state, nl);
    let ceiling = cfg.blowup_factor * state.norm_energy().max(f64::MIN_POSITIVE);
    for j in 0..n_steps {
        stepper.step(state.coeffs_mut(), drv, j)?;
        let t = (j + 1) as f64 * cfg.dt;
        let ea = state.norm_energy();
        if !ea.is_finite() {
            return Err(Error::NonFinite { step: j as usize });
        }
        if ea > ceiling {
            return Err(Error::BlowUp {
                step: j as usize,
                norm: ea,
                ceiling,
            });
        }
        if (j + 1) % cfg.record_every as u64 == 0 || j + 1 == n_steps {
            traj.record(t, &state, nl);
        }
    }
    Ok(traj)
}

/// Run the same path at several levels with identical Wiener increments.
///
/// `levels` must be ascending. The coupling is exact by construction: the
/// increments are a pure function of (seed, path, step, mode), so every level
/// sees the same noise and the trajectories differ only through the
/// projections.
pub fn coupled_runs(
    u0: &Field,
    levels: &[u32],
    cfg: &SchemeConfig,
    nl: Option<&PowerNonlinearity>,
    noise: &NoiseModel,
    drv: &WienerDriver,
) -> Result<Vec<Trajectory>> {
    if levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Config("levels must be ascending".into()));
    }
    levels
        .iter()
        .map(|&n| {
            let mut level_cfg = cfg.clone();
            level_cfg.level = n;
            run_path(u0, &level_cfg, nl, noise, drv)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseProfile;
    use crate::spectral::GeometryKind;

    fn torus(n: usize) -> Arc<SpectralBasis> {
        SpectralBasis::with_defaults(GeometryKind::Torus1d, n).unwrap()
    }

    fn silent_noise(basis: &Arc<SpectralBasis>) -> NoiseModel {
        NoiseModel::new(basis, 4, 0.0, 2.0, NoiseProfile::Adapted).unwrap()
    }

    #[test]
    fn linear_phase_on_single_mode() {
        // gamma = 0, no nonlinearity, lambda_A = 4 at k = 2, dt = 0.1
        let b = torus(8);
        let noise = silent_noise(&b);
        let cfg = SchemeConfig::new(Scheme::SplitMidpoint, 0.1, 0.1, 4);
        let drv = WienerDriver::new(1, 0, 0.1);
        let u = Field::unit_mode(Arc::clone(&b), 3);
        let v = step_split_midpoint(&u, &drv, 0, &cfg, None, &noise).unwrap();
        let expect = Complex64::new(0.0, -0.4).exp();
        assert!((v.coeffs()[3] - expect).norm() < 1e-15);
    }

    #[test]
    fn single_mode_cubic_flow_is_double_phase() {
        // u = e^{ix}: |u| = 1, lambda_A = 1, so one Lie step multiplies the
        // coefficient by e^{-i dt} twice.
        let b = torus(8);
        let noise = silent_noise(&b);
        let dt = 0.05;
        let cfg = SchemeConfig::new(Scheme::SplitMidpoint, dt, dt, 3);
        let drv = WienerDriver::new(1, 0, dt);
        let nl = PowerNonlinearity::defocusing(3.0);
        let amp = (2.0 * std::f64::consts::PI).sqrt();
        let u = Field::unit_mode(Arc::clone(&b), 1).scaled(Complex64::new(amp, 0.0));
        let v = step_split_midpoint(&u, &drv, 0, &cfg, Some(&nl), &noise).unwrap();
        let expect = Complex64::new(amp, 0.0) * Complex64::new(0.0, -2.0 * dt).exp();
        assert!((v.coeffs()[1] - expect).norm() < 1e-13, "{:?}", v.coeffs()[1]);
    }

    #[test]
    fn split_step_conserves_mass_with_noise_on() {
        let b = torus(32);
        let noise = NoiseModel::default_family(&b);
        let nl = PowerNonlinearity::defocusing(3.0);
        let cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 1e-3, 5);
        for path in 0..10 {
            let drv = WienerDriver::new(99, path, 1e-3);
            let u = Field::gaussian(Arc::clone(&b), 5, path).scaled(Complex64::new(0.3, 0.0));
            let u = Projector::new(&b, ProjectorKind::Sharp, 5).apply(&u);
            let v = step_split_midpoint(&u, &drv, 0, &cfg, Some(&nl), &noise).unwrap();
            let drift = (v.norm_h().powi(2) - u.norm_h().powi(2)).abs();
            assert!(
                drift <= 10.0 * cfg.fixed_point_tol * u.norm_h().powi(2),
                "path {path}: drift {drift:.3e}"
            );
        }
    }

    #[test]
    fn states_stay_in_the_level_span() {
        let b = torus(32);
        let noise = NoiseModel::default_family(&b);
        let nl = PowerNonlinearity::defocusing(3.0);
        let mut cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 0.05, 4);
        cfg.record_every = 7;
        let drv = WienerDriver::new(3, 1, 1e-3);
        let u0 = Field::gaussian(Arc::clone(&b), 8, 0);
        let traj = run_path(&u0, &cfg, Some(&nl), &noise, &drv).unwrap();
        let dim = b.level_dim(4);
        for state in &traj.states {
            assert!(state.coeffs()[dim..].iter().all(|c| c.re == 0.0 && c.im == 0.0));
        }
        // same config and seed: bitwise identical trajectory
        let again = run_path(&u0, &cfg, Some(&nl), &noise, &drv).unwrap();
        for (a, b) in traj.states.iter().zip(&again.states) {
            assert_eq!(a.coeffs(), b.coeffs());
        }
    }

    #[test]
    fn euler_growth_on_a_single_linear_mode() {
        // gamma = 0, F off: c+ = (1 - i lambda dt) c grows in modulus
        let b = torus(8);
        let noise = silent_noise(&b);
        let dt = 0.01;
        let cfg = SchemeConfig::new(Scheme::EulerMaruyama, dt, dt, 4);
        let drv = WienerDriver::new(1, 0, dt);
        let u = Field::unit_mode(Arc::clone(&b), 3); // lambda_A = 4
        let v = step_euler_maruyama(&u, &drv, 0, &cfg, None, &noise).unwrap();
        let expect = Complex64::new(1.0, -4.0 * dt);
        assert!((v.coeffs()[3] - expect).norm() < 1e-15);
        let growth = v.norm_h().powi(2) - 1.0;
        assert!((growth - (4.0 * dt).powi(2)) < 1e-12);
    }

    #[test]
    fn zero_state_stays_zero() {
        let b = torus(8);
        let noise = NoiseModel::default_family(&b);
        let cfg = SchemeConfig::new(Scheme::EulerMaruyama, 1e-3, 1e-3, 3);
        let drv = WienerDriver::new(5, 0, 1e-3);
        let z = Field::zero(Arc::clone(&b));
        let v = step_euler_maruyama(&z, &drv, 0, &cfg, None, &noise).unwrap();
        assert_eq!(v.norm_h(), 0.0);
    }

    #[test]
    fn horizon_zero_records_projected_initial_state() {
        let b = torus(16);
        let noise = silent_noise(&b);
        let cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 0.0, 2);
        let drv = WienerDriver::new(1, 0, 1e-3);
        let u0 = Field::gaussian(Arc::clone(&b), 1, 0);
        let traj = run_path(&u0, &cfg, None, &noise, &drv).unwrap();
        assert_eq!(traj.n_frames(), 1);
        let expect = Projector::new(&b, ProjectorKind::Sharp, 2).apply(&u0);
        assert_eq!(traj.states[0].coeffs(), expect.coeffs());
    }

    #[test]
    fn identical_levels_have_zero_gap() {
        let b = torus(32);
        let noise = NoiseModel::default_family(&b);
        let nl = PowerNonlinearity::defocusing(3.0);
        let mut cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 0.02, 5);
        cfg.record_every = 4;
        let drv = WienerDriver::new(11, 0, 1e-3);
        let u0 = Field::gaussian(Arc::clone(&b), 2, 0);
        let runs = coupled_runs(&u0, &[5, 5], &cfg, Some(&nl), &noise, &drv).unwrap();
        let gaps = gap_series(&runs[0], &runs[1]).unwrap();
        assert!(gaps.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn shared_band_dynamics_coincide_across_levels() {
        // Initial data and noise band well inside 2^n: every operator the
        // two levels apply agrees there, so the coupled paths are bitwise
        // equal. Euler-Maruyama exercises the nonlinearity too, since its
        // drift is the shared projected term rather than a per-level
        // collocation flow.
        let b = torus(64);
        let noise = NoiseModel::new(&b, 2, 0.4, 2.0, NoiseProfile::Adapted).unwrap();
        let nl = PowerNonlinearity::defocusing(3.0);
        let mut cfg = SchemeConfig::new(Scheme::EulerMaruyama, 1e-3, 0.02, 5);
        cfg.record_every = 5;
        let drv = WienerDriver::new(21, 0, 1e-3);
        // u0 on wavenumbers |k| <= 1: cubic band 3, noise pushes to 5,
        // lambda_S at k = 5 is 26 < 2^5, safely below both ramps.
        let mut u0 = Field::zero(Arc::clone(&b));
        u0.coeffs_mut()[0] = Complex64::new(0.4, 0.0);
        u0.coeffs_mut()[1] = Complex64::new(0.0, 0.5);
        u0.coeffs_mut()[2] = Complex64::new(0.3, 0.1);
        let runs = coupled_runs(&u0, &[5, 6], &cfg, Some(&nl), &noise, &drv).unwrap();
        let gaps = gap_series(&runs[0], &runs[1]).unwrap();
        assert!(gaps.iter().all(|&g| g == 0.0), "gaps {gaps:?}");

        // The splitting scheme coincides likewise when its per-level
        // collocation grids see the same dynamics: linear flow only.
        let mut cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 0.02, 5);
        cfg.record_every = 5;
        let runs = coupled_runs(&u0, &[5, 6], &cfg, None, &noise, &drv).unwrap();
        let gaps = gap_series(&runs[0], &runs[1]).unwrap();
        assert!(gaps.iter().all(|&g| g == 0.0), "linear gaps {gaps:?}");
    }

    #[test]
    fn blowup_guard_trips_loudly() {
        // Euler-Maruyama with a huge step on a stiff mode diverges; the
        // guard must turn that into an error rather than a quiet NaN.
        let b = torus(64);
        let noise = silent_noise(&b);
        let mut cfg = SchemeConfig::new(Scheme::EulerMaruyama, 0.9, 2000.0, 6);
        cfg.blowup_factor = 1e3;
        let drv = WienerDriver::new(1, 0, 0.9);
        let u0 = Field::gaussian(Arc::clone(&b), 1, 0);
        let err = run_path(&u0, &cfg, None, &noise, &drv).unwrap_err();
        assert!(matches!(err, Error::BlowUp { .. }), "got {err:?}");
    }

    #[test]
    fn rejects_mismatched_noise_basis() {
        let b1 = torus(8);
        let b2 = torus(8);
        let noise = NoiseModel::default_family(&b2);
        let cfg = SchemeConfig::new(Scheme::SplitMidpoint, 1e-3, 1e-3, 2);
        assert!(Stepper::new(&b1, &cfg, None, &noise).is_err());
    }
}
