//! The power nonlinearity F(u) = ±|u|^{alpha-1} u, its antiderivative, the
//! energy functional, and the Galerkin-projected nonlinear term.

use crate::littlewood_paley::{Projector, ProjectorKind};
use crate::spectral::{field, Field, GeometryKind};
use crate::Result;
use num_complex::Complex64;

/// Focusing lowers the energy, defocusing raises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Defocusing,
    Focusing,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Defocusing => 1.0,
            Sign::Focusing => -1.0,
        }
    }
}

/// F(u) = sign * |u|^{alpha-1} u with alpha > 1.
#[derive(Debug, Clone, Copy)]
pub struct PowerNonlinearity {
    alpha: f64,
    sign: Sign,
}

impl PowerNonlinearity {
    pub fn new(alpha: f64, sign: Sign) -> Self {
        assert!(alpha > 1.0, "power nonlinearity needs alpha > 1, got {alpha}");
        PowerNonlinearity { alpha, sign }
    }

    pub fn defocusing(alpha: f64) -> Self {
        Self::new(alpha, Sign::Defocusing)
    }

    pub fn focusing(alpha: f64) -> Self {
        Self::new(alpha, Sign::Focusing)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    /// Whether alpha sits in the subcritical window for the geometry:
    /// defocusing needs `alpha < 1 + 4 beta / (d - 2 beta)_+`, focusing
    /// `alpha < 1 + 4 beta / d`. Violations are allowed (supercritical
    /// probes), so this is a diagnostic, not a gate.
    pub fn admissible_for(&self, kind: GeometryKind, beta: f64) -> bool {
        let d = kind.dimension() as f64;
        let limit = match self.sign {
            Sign::Defocusing => {
                let denom = d - 2.0 * beta;
                if denom <= 0.0 {
                    f64::INFINITY
                } else {
                    1.0 + 4.0 * beta / denom
                }
            }
            Sign::Focusing => 1.0 + 4.0 * beta / d,
        };
        self.alpha < limit
    }

    /// |u|^{alpha-1} from |u|^2, with the removable singularity at 0 fixed to 0.
    #[inline]
    pub fn magnitude_power(&self, norm_sqr: f64) -> f64 {
        if self.alpha == 3.0 {
            norm_sqr
        } else if self.alpha == 2.0 {
            norm_sqr.sqrt()
        } else if norm_sqr == 0.0 {
            0.0
        } else {
            norm_sqr.powf(0.5 * (self.alpha - 1.0))
        }
    }

    /// Pointwise F on grid samples.
    pub fn apply_samples(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let s = self.sign.factor();
        samples
            .iter()
            .map(|u| u * (s * self.magnitude_power(u.norm_sqr())))
            .collect()
    }

    /// Exact flow of u' = -i F(u) over `dt`: a pointwise phase rotation that
    /// leaves |u| untouched at every node.
    pub fn phase_rotate(&self, samples: &mut [Complex64], dt: f64) {
        let s = self.sign.factor();
        for u in samples.iter_mut() {
            let theta = -s * self.magnitude_power(u.norm_sqr()) * dt;
            *u *= Complex64::new(0.0, theta).exp();
        }
    }

    /// Antiderivative functional: sign / (alpha+1) * ||u||_{L^{alpha+1}}^{alpha+1}.
    pub fn antiderivative(&self, f: &Field) -> f64 {
        let lp = f
            .norm_lp(self.alpha + 1.0)
            .expect("alpha + 1 > 2 is a valid exponent");
        self.sign.factor() / (self.alpha + 1.0) * lp.powf(self.alpha + 1.0)
    }

    /// Energy: 1/2 ||A^{1/2} u||_H^2 + antiderivative.
    pub fn energy(&self, f: &Field) -> f64 {
        let kinetic: f64 = f
            .coeffs()
            .iter()
            .zip(f.basis().lambda_a())
            .map(|(c, &la)| la * c.norm_sqr())
            .sum();
        0.5 * kinetic + self.antiderivative(f)
    }
}

/// Discrete realization of the projected drift term P_n F(u_n): synthesize on
/// the padded grid, apply F pointwise, analyze, cut off sharply at the level.
pub fn galerkin_nonlinearity(f: &Field, level: u32, nl: &PowerNonlinearity) -> Result<Field> {
    let samples = nl.apply_samples(&f.synthesize());
    let mut out = field::analyze(&samples, f.basis())?;
    Projector::new(f.basis(), ProjectorKind::Sharp, level).apply_in_place(out.coeffs_mut());
    Ok(out)
}
