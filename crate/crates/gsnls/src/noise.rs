//! Multiplicative noise: operators B_m u = e_m u, the Wiener increment
//! source, and the Stratonovich corrections mu and mu_n.
//!
//! The coefficient functions are a basis-adapted family scaled by a power
//! decay, `e_m(x) = gamma m^{-s_dec} phi_m(x)`, with `phi_m` a cosine on the
//! torus and the intervals and a Legendre polynomial on the zonal sphere.
//! Every `e_m` is real-valued, so each `B_m` is selfadjoint and the gauge
//! identity `Re<v, -i S_n B_m S_n v> = 0` holds at the discrete level, which
//! is exactly what makes the midpoint noise step mass-preserving.

use crate::littlewood_paley::{Projector, ProjectorKind};
use crate::spectral::{field, grid, Field, GeometryKind, SpectralBasis};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

/// Shape of the coefficient functions e_m.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseProfile {
    /// Basis-adapted family: cos(m x) on torus/intervals, P_m on the sphere.
    Adapted,
    /// Spatially constant e_m = c_m; handy for exactly solvable checks.
    Constant,
}

/// Truncated multiplication-operator noise on a fixed basis.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    basis: Arc<SpectralBasis>,
    m_count: usize,
    gamma: f64,
    s_dec: f64,
    profile: NoiseProfile,
    /// values[m-1][i] = e_m(x_i) on the padded grid, amplitude included
    values: Vec<Vec<f64>>,
}

impl NoiseModel {
    pub fn new(
        basis: &Arc<SpectralBasis>,
        m_count: usize,
        gamma: f64,
        s_dec: f64,
        profile: NoiseProfile,
    ) -> Result<Self> {
        if gamma < 0.0 {
            return Err(Error::Config(format!("gamma must be >= 0, got {gamma}")));
        }
        if !(s_dec > 1.5) {
            return Err(Error::Config(format!(
                "decay exponent must exceed 3/2 for square-summable H^1 norms, got {s_dec}"
            )));
        }
        let nodes = &basis.grid().nodes;
        let values = (1..=m_count)
            .map(|m| {
                let c = gamma * (m as f64).powf(-s_dec);
                match (profile, basis.kind()) {
                    (NoiseProfile::Constant, _) => vec![c; nodes.len()],
                    (NoiseProfile::Adapted, GeometryKind::SphereZonal) => nodes
                        .iter()
                        .map(|&x| c * grid::legendre_column(m, x)[m])
                        .collect(),
                    (NoiseProfile::Adapted, _) => {
                        nodes.iter().map(|&x| c * (m as f64 * x).cos()).collect()
                    }
                }
            })
            .collect();
        Ok(NoiseModel {
            basis: Arc::clone(basis),
            m_count,
            gamma,
            s_dec,
            profile,
            values,
        })
    }

    /// Default family: gamma = 0.5, s_dec = 2, M = 16, basis-adapted shapes.
    pub fn default_family(basis: &Arc<SpectralBasis>) -> Self {
        Self::new(basis, 16, 0.5, 2.0, NoiseProfile::Adapted)
            .expect("default parameters are valid")
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn mode_count(&self) -> usize {
        self.m_count
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn s_dec(&self) -> f64 {
        self.s_dec
    }

    pub fn profile(&self) -> NoiseProfile {
        self.profile
    }

    pub fn amplitude(&self, m: usize) -> f64 {
        self.gamma * (m as f64).powf(-self.s_dec)
    }

    /// Grid samples of e_m (amplitude included), m = 1..=M.
    pub fn mode_values(&self, m: usize) -> Result<&[f64]> {
        self.check_mode(m)?;
        Ok(&self.values[m - 1])
    }

    fn check_mode(&self, m: usize) -> Result<()> {
        if m == 0 || m > self.m_count {
            return Err(Error::ModeOutOfRange {
                mode: m,
                max: self.m_count,
            });
        }
        Ok(())
    }

    /// B_m f: pointwise product e_m * f on the padded grid, transformed back.
    pub fn apply_mode(&self, f: &Field, m: usize) -> Result<Field> {
        self.check_mode(m)?;
        let mut samples = f.synthesize();
        for (u, &e) in samples.iter_mut().zip(&self.values[m - 1]) {
            *u *= e;
        }
        field::analyze(&samples, &self.basis)
    }

    /// Stratonovich correction mu(f) = -1/2 sum_m B_m(B_m f).
    pub fn stratonovich_correction(&self, f: &Field) -> Result<Field> {
        let mut acc = Field::zero(Arc::clone(&self.basis));
        for m in 1..=self.m_count {
            let twice = self.apply_mode(&self.apply_mode(f, m)?, m)?;
            acc = acc.add_scaled(Complex64::new(1.0, 0.0), &twice);
        }
        Ok(acc.scaled(Complex64::new(-0.5, 0.0)))
    }

    /// Level-n correction mu_n(f) = -1/2 sum_m (S_n B_m S_n)^2 f.
    pub fn galerkin_correction(&self, f: &Field, level: u32) -> Result<Field> {
        let smooth = Projector::new(&self.basis, ProjectorKind::Smooth, level);
        let mut acc = Field::zero(Arc::clone(&self.basis));
        for m in 1..=self.m_count {
            let y = self.smoothed_mode(f, m, &smooth)?;
            let z = self.smoothed_mode(&y, m, &smooth)?;
            acc = acc.add_scaled(Complex64::new(1.0, 0.0), &z);
        }
        Ok(acc.scaled(Complex64::new(-0.5, 0.0)))
    }

    /// S_n B_m S_n f for one mode.
    pub fn smoothed_mode(&self, f: &Field, m: usize, smooth: &Projector) -> Result<Field> {
        self.check_mode(m)?;
        let mut inner = f.clone();
        smooth.apply_in_place(inner.coeffs_mut());
        let mut samples = inner.synthesize();
        for (u, &e) in samples.iter_mut().zip(&self.values[m - 1]) {
            *u *= e;
        }
        let mut out = field::analyze(&samples, &self.basis)?;
        smooth.apply_in_place(out.coeffs_mut());
        Ok(out)
    }

    /// Residual of the Ito-drift cancellation identity
    /// `2 Re<f, mu_n(f)> + sum_m ||S_n B_m S_n f||_H^2`, which selfadjointness
    /// forces to vanish.
    pub fn drift_cancellation_residual(&self, f: &Field, level: u32) -> Result<f64> {
        let smooth = Projector::new(&self.basis, ProjectorKind::Smooth, level);
        let mu_n = self.galerkin_correction(f, level)?;
        let mut diffusion = 0.0;
        for m in 1..=self.m_count {
            diffusion += self.smoothed_mode(f, m, &smooth)?.norm_h().powi(2);
        }
        Ok(2.0 * f.inner_h(&mu_n).re + diffusion)
    }

    /// Closed-form H^1 norms squared of the coefficient functions.
    pub fn h1_norm_sq(&self, m: usize) -> f64 {
        let c = self.amplitude(m);
        let mf = m as f64;
        match (self.profile, self.basis.kind()) {
            (NoiseProfile::Constant, k) => c * c * domain_measure(k),
            (NoiseProfile::Adapted, GeometryKind::Torus1d) => c * c * PI * (1.0 + mf * mf),
            (NoiseProfile::Adapted, GeometryKind::IntervalDirichlet)
            | (NoiseProfile::Adapted, GeometryKind::IntervalNeumann) => {
                c * c * 0.5 * PI * (1.0 + mf * mf)
            }
            (NoiseProfile::Adapted, GeometryKind::SphereZonal) => {
                c * c * (1.0 + mf * (mf + 1.0)) * 4.0 * PI / (2.0 * mf + 1.0)
            }
        }
    }

    /// Partial sums of sum_m ||e_m||_{H^1}^2, the summability diagnostic.
    pub fn summability_partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        (1..=self.m_count)
            .map(|m| {
                acc += self.h1_norm_sq(m);
                acc
            })
            .collect()
    }

    /// sum_m ||B_m||^2 as operators on L^{alpha+1}; for real multiplication
    /// operators this is the sum of squared sup norms. Reported as a
    /// diagnostic only.
    pub fn opnorm_lalpha_sum(&self) -> f64 {
        (1..=self.m_count)
            .map(|m| {
                let sup = self.values[m - 1].iter().fold(0.0f64, |a, &v| a.max(v.abs()));
                sup * sup
            })
            .sum()
    }
}

fn domain_measure(kind: GeometryKind) -> f64 {
    match kind {
        GeometryKind::Torus1d => 2.0 * PI,
        GeometryKind::IntervalDirichlet | GeometryKind::IntervalNeumann => PI,
        GeometryKind::SphereZonal => 4.0 * PI,
    }
}

/// Source of Wiener increments keyed by (seed, path, step, mode).
///
/// Increments are `Normal(0, dt)`, i.i.d. across steps and modes, and a pure
/// function of the key: identical keys give bitwise-identical values, so runs
/// at different Galerkin levels couple exactly.
#[derive(Debug, Clone, Copy)]
pub struct WienerDriver {
    seed: u64,
    path: u64,
    dt: f64,
    sqrt_dt: f64,
}

impl WienerDriver {
    pub fn new(seed: u64, path: u64, dt: f64) -> Self {
        assert!(dt > 0.0, "step size must be positive");
        WienerDriver {
            seed,
            path,
            dt,
            sqrt_dt: dt.sqrt(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> u64 {
        self.path
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Increment of beta_m over step j.
    #[inline]
    pub fn increment(&self, step: u64, mode: u64) -> f64 {
        self.sqrt_dt * crate::rng::standard_normal(self.seed, self.path, step, mode)
    }

    /// Same path, different step size (used by step-refinement studies).
    pub fn with_dt(&self, dt: f64) -> Self {
        WienerDriver::new(self.seed, self.path, dt)
    }

    pub fn with_path(&self, path: u64) -> Self {
        WienerDriver::new(self.seed, path, self.dt)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GeometryKind;

    fn torus(n: usize) -> Arc<SpectralBasis> {
        SpectralBasis::with_defaults(GeometryKind::Torus1d, n).unwrap()
    }

    #[test]
    fn constant_profile_correction_is_scalar() {
        let b = torus(8);
        // single mode, c_1 = 0.3: mu = -1/2 * 0.09 = -0.045 times identity
        let noise = NoiseModel::new(&b, 1, 0.3, 2.0, NoiseProfile::Constant).unwrap();
        let f = Field::gaussian(Arc::clone(&b), 2, 0);
        let mu = noise.stratonovich_correction(&f).unwrap();
        let expect = f.scaled(Complex64::new(-0.045, 0.0));
        let err = mu.add_scaled(Complex64::new(-1.0, 0.0), &expect).norm_h();
        assert!(err < 1e-13 * f.norm_h());
        let zero = noise.stratonovich_correction(&Field::zero(b)).unwrap();
        assert_eq!(zero.norm_h(), 0.0);
    }

    #[test]
    fn cosine_mode_shifts_wavenumbers() {
        // e_1 = cos x against u = e^{ikx}: product-to-sum gives half weight
        // on the neighbours k - 1 and k + 1.
        let b = torus(8);
        let noise = NoiseModel::new(&b, 1, 1.0, 2.0, NoiseProfile::Adapted).unwrap();
        let k_plus = 5; // mode index of k = 3
        let u = Field::unit_mode(Arc::clone(&b), k_plus);
        let bu = noise.apply_mode(&u, 1).unwrap();
        let degrees = b.mode_degree();
        for (j, c) in bu.coeffs().iter().enumerate() {
            let expect = match degrees[j] {
                2 | 4 => 0.5,
                _ => 0.0,
            };
            assert!((c.re - expect).abs() < 1e-13 && c.im.abs() < 1e-13, "mode {j}");
        }
    }

    #[test]
    fn correction_of_constant_state_is_minus_quarter_one_plus_cos2x() {
        let b = torus(8);
        let noise = NoiseModel::new(&b, 1, 1.0, 2.0, NoiseProfile::Adapted).unwrap();
        // physical u = 1: coefficient sqrt(2 pi) on the k = 0 mode
        let amp = (2.0 * PI).sqrt();
        let u = Field::unit_mode(Arc::clone(&b), 0).scaled(Complex64::new(amp, 0.0));
        let mu = noise.stratonovich_correction(&u).unwrap();
        let samples = mu.synthesize();
        for (x, v) in b.grid().nodes.iter().zip(&samples) {
            let expect = -0.25 - 0.25 * (2.0 * x).cos();
            assert!((v.re - expect).abs() < 1e-12 && v.im.abs() < 1e-13);
        }
    }

    #[test]
    fn multiplication_operators_are_selfadjoint() {
        for kind in [GeometryKind::Torus1d, GeometryKind::SphereZonal] {
            let b = SpectralBasis::with_defaults(kind, 16).unwrap();
            let noise = NoiseModel::new(&b, 4, 0.7, 2.0, NoiseProfile::Adapted).unwrap();
            for m in 1..=4 {
                let f = Field::gaussian(Arc::clone(&b), 13, 2 * m as u64);
                let g = Field::gaussian(Arc::clone(&b), 13, 2 * m as u64 + 1);
                let lhs = noise.apply_mode(&f, m).unwrap().inner_h(&g);
                let rhs = f.inner_h(&noise.apply_mode(&g, m).unwrap());
                assert!((lhs - rhs).norm() < 1e-12 * f.norm_h() * g.norm_h());
            }
        }
    }

    #[test]
    fn smoothed_modes_are_selfadjoint_and_gauge_free() {
        let b = torus(24);
        let noise = NoiseModel::default_family(&b);
        let smooth = Projector::new(&b, ProjectorKind::Smooth, 3);
        for m in [1usize, 2, 7] {
            let f = Field::gaussian(Arc::clone(&b), 5, 2 * m as u64);
            let g = Field::gaussian(Arc::clone(&b), 5, 2 * m as u64 + 1);
            let lhs = noise.smoothed_mode(&f, m, &smooth).unwrap().inner_h(&g);
            let rhs = f.inner_h(&noise.smoothed_mode(&g, m, &smooth).unwrap());
            assert!((lhs - rhs).norm() < 1e-12 * f.norm_h() * g.norm_h());
            // Re<f, -i S_n B_m S_n f> = 0
            let y = noise.smoothed_mode(&f, m, &smooth).unwrap();
            let gauge = (f.inner_h(&y.scaled(Complex64::new(0.0, -1.0)))).re;
            assert!(gauge.abs() < 1e-12 * f.norm_h().powi(2));
        }
    }

    #[test]
    fn drift_cancellation_residual_vanishes() {
        let b = torus(32);
        let noise = NoiseModel::default_family(&b);
        for (seed, level) in [(1u64, 2u32), (2, 4), (3, 6)] {
            let f = Field::gaussian(Arc::clone(&b), seed, 0);
            let r = noise.drift_cancellation_residual(&f, level).unwrap();
            assert!(
                r.abs() < 1e-11 * f.norm_h().powi(2),
                "level {level}: residual {r}"
            );
        }
        let zero = Field::zero(Arc::clone(&b));
        assert_eq!(noise.drift_cancellation_residual(&zero, 3).unwrap(), 0.0);
    }

    #[test]
    fn correction_collapses_once_smoothing_is_identity() {
        // Small basis: max lambda_S = 1 + 49 = 50 < 2^6, so S_6 multiplies
        // every retained mode by exactly 1 and mu_n composes to mu bitwise.
        let b = torus(15);
        let noise = NoiseModel::new(&b, 2, 0.4, 2.0, NoiseProfile::Adapted).unwrap();
        let f = Field::gaussian(Arc::clone(&b), 9, 0);
        let mu = noise.stratonovich_correction(&f).unwrap();
        let mu_n = noise.galerkin_correction(&f, 6).unwrap();
        assert_eq!(mu.coeffs(), mu_n.coeffs());
        // and the gap decreases monotonically below that level
        let mut last = f64::INFINITY;
        for level in 0..=6u32 {
            let gap = noise
                .galerkin_correction(&f, level)
                .unwrap()
                .add_scaled(Complex64::new(-1.0, 0.0), &mu)
                .norm_h();
            assert!(gap <= last * (1.0 + 1e-12), "level {level}");
            last = gap;
        }
        assert_eq!(last, 0.0);
    }

    #[test]
    fn summability_tail_is_cauchy() {
        let b = torus(8);
        let noise = NoiseModel::new(&b, 64, 0.5, 2.0, NoiseProfile::Adapted).unwrap();
        let sums = noise.summability_partial_sums();
        // increments decay, and the far tail is a small fraction of the total
        let total = *sums.last().unwrap();
        assert!(total.is_finite() && total > 0.0);
        let at_16 = sums[15];
        assert!((total - at_16) / total < 0.05, "tail fraction too large");
        let mut increments = sums[32..].windows(2).map(|w| w[1] - w[0]);
        assert!(increments.all(|d| d >= 0.0 && d < 1e-3));
    }

    #[test]
    fn rejects_shallow_decay_and_negative_gamma() {
        let b = torus(8);
        assert!(NoiseModel::new(&b, 4, 0.5, 1.5, NoiseProfile::Adapted).is_err());
        assert!(NoiseModel::new(&b, 4, -0.1, 2.0, NoiseProfile::Adapted).is_err());
    }

    #[test]
    fn mode_bounds_are_enforced() {
        let b = torus(8);
        let noise = NoiseModel::new(&b, 3, 0.5, 2.0, NoiseProfile::Adapted).unwrap();
        let f = Field::zero(Arc::clone(&b));
        assert!(noise.apply_mode(&f, 0).is_err());
        assert!(noise.apply_mode(&f, 4).is_err());
        assert!(noise.apply_mode(&f, 3).is_ok());
    }

    #[test]
    fn driver_streams_are_bitwise_reproducible() {
        let a = WienerDriver::new(77, 4, 1e-3);
        let b = WienerDriver::new(77, 4, 1e-3);
        for step in 0..50 {
            for mode in 1..=8 {
                assert_eq!(
                    a.increment(step, mode).to_bits(),
                    b.increment(step, mode).to_bits()
                );
            }
        }
        let c = WienerDriver::new(77, 5, 1e-3);
        assert_ne!(a.increment(0, 1).to_bits(), c.increment(0, 1).to_bits());
    }

    #[test]
    fn increment_variance_matches_dt() {
        let drv = WienerDriver::new(123, 0, 0.25);
        let n = 40_000u64;
        let mut sumsq = 0.0;
        for j in 0..n {
            sumsq += drv.increment(j, 1).powi(2);
        }
        let var = sumsq / n as f64;
        assert!((var - 0.25).abs() < 0.005, "var {var}");
    }
}
