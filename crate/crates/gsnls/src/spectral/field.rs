//! A state as spectral coefficients on a shared basis.

use super::{NormKind, OperatorKind, SpectralBasis};
use crate::{Error, Result};
use num_complex::Complex64;
use std::sync::Arc;

/// Spectral coefficients of a state in the eigenbasis of `S`.
///
/// All operations are pure: inputs are left untouched and results are fresh
/// fields on the same (shared, immutable) basis.
#[derive(Clone)]
pub struct Field {
    basis: Arc<SpectralBasis>,
    coeffs: Vec<Complex64>,
}

impl std::fmt::Debug for Field {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Field({} modes, |.|_H = {:.6e})", self.coeffs.len(), self.norm_h())
    }
}

impl Field {
    pub fn new(basis: Arc<SpectralBasis>, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != basis.n_modes() {
            return Err(Error::SizeMismatch {
                expected: basis.n_modes(),
                got: coeffs.len(),
            });
        }
        Ok(Field { basis, coeffs })
    }

    pub fn zero(basis: Arc<SpectralBasis>) -> Self {
        let n = basis.n_modes();
        Field {
            basis,
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Coefficient unit vector e_j, i.e. the j-th eigenfunction.
    pub fn unit_mode(basis: Arc<SpectralBasis>, j: usize) -> Self {
        let mut f = Field::zero(basis);
        f.coeffs[j] = Complex64::new(1.0, 0.0);
        f
    }

    pub fn basis(&self) -> &Arc<SpectralBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Samples on the padded quadrature grid.
    pub fn synthesize(&self) -> Vec<Complex64> {
        self.basis.transform().synthesize(&self.coeffs)
    }

    /// H inner product, conjugation on the second argument.
    pub fn inner_h(&self, other: &Field) -> Complex64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_h(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn norm_energy(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.basis.lambda_a())
            .map(|(z, &la)| (1.0 + la) * z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn norm_energy_dual(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.basis.lambda_a())
            .map(|(z, &la)| z.norm_sqr() / (1.0 + la))
            .sum::<f64>()
            .sqrt()
    }

    /// Quadrature L^p norm on the padded grid; `p = inf` takes the node max.
    pub fn norm_lp(&self, p: f64) -> Result<f64> {
        if !(p >= 1.0) {
            return Err(Error::InvalidLpExponent(p));
        }
        let samples = self.synthesize();
        if p.is_infinite() {
            return Ok(samples.iter().map(|u| u.norm()).fold(0.0, f64::max));
        }
        let q = self.basis.grid();
        let total: f64 = if p == 2.0 {
            samples.iter().zip(&q.weights).map(|(u, w)| w * u.norm_sqr()).sum()
        } else {
            samples
                .iter()
                .zip(&q.weights)
                .map(|(u, w)| w * u.norm().powf(p))
                .sum()
        };
        Ok(total.powf(1.0 / p))
    }

    pub fn norm(&self, which: NormKind) -> Result<f64> {
        match which {
            NormKind::H => Ok(self.norm_h()),
            NormKind::EnergyA => Ok(self.norm_energy()),
            NormKind::EnergyADual => Ok(self.norm_energy_dual()),
            NormKind::Lp(p) => self.norm_lp(p),
        }
    }

    /// Apply `A^power` or `S^power` as an eigenvalue multiplier.
    ///
    /// Negative powers require a strictly positive spectrum; `A` has a zero
    /// eigenvalue on the torus, the Neumann interval and the sphere.
    pub fn apply_power(&self, which: OperatorKind, power: f64) -> Result<Field> {
        let lambda = match which {
            OperatorKind::A => self.basis.lambda_a(),
            OperatorKind::S => self.basis.lambda_s(),
        };
        if power < 0.0 {
            if let Some(mode) = lambda.iter().position(|&l| l == 0.0) {
                return Err(Error::ZeroEigenvalue { power, mode });
            }
        }
        let mut out = self.clone();
        if power == 0.0 {
            return Ok(out);
        }
        for (c, &l) in out.coeffs.iter_mut().zip(lambda) {
            let factor = if power == 1.0 {
                l
            } else if power == 0.5 {
                l.sqrt()
            } else if power == -1.0 {
                1.0 / l
            } else {
                l.powf(power)
            };
            *c *= factor;
        }
        Ok(out)
    }

    /// self + scale * other, entrywise.
    pub fn add_scaled(&self, scale: Complex64, other: &Field) -> Field {
        debug_assert_eq!(self.coeffs.len(), other.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + scale * b)
            .collect();
        Field {
            basis: Arc::clone(&self.basis),
            coeffs,
        }
    }

    pub fn scaled(&self, scale: Complex64) -> Field {
        Field {
            basis: Arc::clone(&self.basis),
            coeffs: self.coeffs.iter().map(|c| c * scale).collect(),
        }
    }

    /// Field with i.i.d. complex Gaussian coefficients, keyed by (seed, stream).
    pub fn gaussian(basis: Arc<SpectralBasis>, seed: u64, stream: u64) -> Field {
        let coeffs = (0..basis.n_modes())
            .map(|j| {
                Complex64::new(
                    crate::rng::standard_normal(seed, stream, j as u64, 0),
                    crate::rng::standard_normal(seed, stream, j as u64, 1),
                )
            })
            .collect();
        Field { basis, coeffs }
    }
}

/// Project grid samples back onto the basis (quadrature adjoint of synthesis).
pub fn analyze(samples: &[Complex64], basis: &Arc<SpectralBasis>) -> Result<Field> {
    if samples.len() != basis.grid().len() {
        return Err(Error::SizeMismatch {
            expected: basis.grid().len(),
            got: samples.len(),
        });
    }
    Ok(Field {
        basis: Arc::clone(basis),
        coeffs: basis.transform().analyze(samples),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GeometryKind;

    #[test]
    fn unit_mode_synthesizes_the_eigenfunction() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 5).unwrap();
        let f = Field::unit_mode(Arc::clone(&b), 1); // k = 1
        let samples = f.synthesize();
        let scale = 1.0 / (2.0 * std::f64::consts::PI).sqrt();
        for (x, u) in b.grid().nodes.iter().zip(&samples) {
            let expect = Complex64::new(0.0, *x).exp() * scale;
            assert!((u - expect).norm() < 1e-13);
        }
        let back = analyze(&samples, &b).unwrap();
        assert!((back.coeffs()[1] - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!(back.coeffs().iter().enumerate().all(|(j, c)| j == 1 || c.norm() < 1e-13));
    }

    #[test]
    fn zero_field_has_zero_norms() {
        let b = SpectralBasis::with_defaults(GeometryKind::SphereZonal, 6).unwrap();
        let f = Field::zero(b);
        assert_eq!(f.norm_h(), 0.0);
        assert_eq!(f.norm_energy(), 0.0);
        assert_eq!(f.norm_energy_dual(), 0.0);
        assert_eq!(f.norm_lp(4.0).unwrap(), 0.0);
    }

    #[test]
    fn single_eigenmode_energy_norms() {
        // lambda_A = 4 at the k = 2 Dirichlet mode
        let b = SpectralBasis::with_defaults(GeometryKind::IntervalDirichlet, 4).unwrap();
        let f = Field::unit_mode(b, 1);
        assert!((f.norm_energy() - 5.0f64.sqrt()).abs() < 1e-15);
        assert!((f.norm_energy_dual() - 1.0 / 5.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn operator_power_on_eigenvectors() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 5).unwrap();
        let f = Field::unit_mode(Arc::clone(&b), 3); // k = 2, lambda_A = 4, lambda_S = 5
        let sf = f.apply_power(OperatorKind::S, 1.0).unwrap();
        assert_eq!(sf.coeffs()[3], Complex64::new(5.0, 0.0));
        let half = f.apply_power(OperatorKind::A, 0.5).unwrap();
        assert_eq!(half.coeffs()[3], Complex64::new(2.0, 0.0));
        let ident = f.apply_power(OperatorKind::A, 0.0).unwrap();
        assert_eq!(ident.coeffs(), f.coeffs());
    }

    #[test]
    fn half_power_squares_to_full_power() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 9).unwrap();
        for j in 0..9 {
            let f = Field::unit_mode(Arc::clone(&b), j);
            let twice = f
                .apply_power(OperatorKind::A, 0.5)
                .unwrap()
                .apply_power(OperatorKind::A, 0.5)
                .unwrap();
            let once = f.apply_power(OperatorKind::A, 1.0).unwrap();
            // k^2 is a perfect square, so this is exact in floating point
            assert_eq!(twice.coeffs()[j], once.coeffs()[j]);
        }
    }

    #[test]
    fn negative_power_rejects_zero_eigenvalue() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 5).unwrap();
        let f = Field::unit_mode(Arc::clone(&b), 0);
        assert!(f.apply_power(OperatorKind::A, -0.5).is_err());
        assert!(f.apply_power(OperatorKind::S, -0.5).is_ok());
    }

    #[test]
    fn torus_l4_norm_of_plane_wave() {
        // u(x) = e^{2ix} has |u| = 1, so ||u||_{L^4}^4 = 2 pi
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 8).unwrap();
        let two_pi = 2.0 * std::f64::consts::PI;
        let f = Field::unit_mode(b, 3).scaled(Complex64::new(two_pi.sqrt(), 0.0));
        let l4 = f.norm_lp(4.0).unwrap();
        assert!((l4.powi(4) - two_pi).abs() < 1e-12);
    }

    #[test]
    fn gelfand_ordering_and_duality_pairing() {
        let b = SpectralBasis::with_defaults(GeometryKind::SphereZonal, 16).unwrap();
        for seed in 0..20u64 {
            let coeffs: Vec<Complex64> = (0..16)
                .map(|j| {
                    Complex64::new(
                        crate::rng::standard_normal(seed, 1, j, 0),
                        crate::rng::standard_normal(seed, 1, j, 1),
                    )
                })
                .collect();
            let f = Field::new(Arc::clone(&b), coeffs.clone()).unwrap();
            let g = Field::new(
                Arc::clone(&b),
                coeffs.iter().rev().cloned().collect(),
            )
            .unwrap();
            assert!(f.norm_energy_dual() <= f.norm_h() + 1e-15);
            assert!(f.norm_h() <= f.norm_energy() + 1e-15);
            let pairing = f.inner_h(&g).norm();
            assert!(pairing <= f.norm_energy_dual() * g.norm_energy() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn lp_norm_rejects_p_below_one() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 4).unwrap();
        let f = Field::unit_mode(b, 0);
        assert!(f.norm_lp(0.5).is_err());
        assert!(f.norm_lp(f64::NAN).is_err());
    }

    #[test]
    fn analyze_rejects_wrong_sample_count() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 4).unwrap();
        let samples = vec![Complex64::new(0.0, 0.0); 3];
        assert!(analyze(&samples, &b).is_err());
    }
}
