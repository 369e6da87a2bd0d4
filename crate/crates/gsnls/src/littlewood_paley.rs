//! Dyadic partition of unity and the two spectral projector families.
//!
//! The partition is built from a concrete smooth cut-off
//!
//! ```text
//! psi(t) = g(2 - t) / (g(2 - t) + g(t - 1)),   g(s) = exp(-1/s) for s > 0, else 0,
//! ```
//!
//! which is identically 1 on (0, 1], identically 0 on [2, inf) and smooth in
//! between. With `rho_dot(t) = psi(t) - psi(2t)` (supported in [1/2, 2]) and
//! `rho_m = rho_dot(2^{-m} .)` the family telescopes:
//! `sum_{m=0}^{M} rho_m(t) = psi(2^{-M} t)`, hence sums to 1 once `2^{-M} t <= 1`.
//!
//! Two projector families act as eigenvalue multipliers of `S`:
//!
//! - sharp `P_n`: indicator of `lambda_S < 2^{n+1}` — an orthogonal projection;
//! - smooth `S_n = sum_{m<=n} rho_m(S)`: weight 1 below `2^n`, the ramp
//!   `rho_n(lambda)` on `[2^n, 2^{n+1})`, zero above.
//!
//! Both land in the span H_n of modes below the cut. The point of `S_n` is the
//! uniform L^p bound that `P_n` lacks; [`opnorm_lower_bound`] exhibits the gap
//! numerically.

use crate::spectral::{Field, NormKind, SpectralBasis};
use crate::{Error, Result};
use std::sync::Arc;

fn bump(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth cut-off: 1 on (0, 1], 0 on [2, inf).
///
/// Panics for `t <= 0`; the partition lives on the open half-line.
pub fn psi(t: f64) -> f64 {
    assert!(t > 0.0, "psi is defined for t > 0, got {t}");
    if t <= 1.0 {
        1.0
    } else if t >= 2.0 {
        0.0
    } else {
        let up = bump(2.0 - t);
        up / (up + bump(t - 1.0))
    }
}

/// Dyadic bump supported in [1/2, 2].
pub fn rho_dot(t: f64) -> f64 {
    psi(t) - psi(2.0 * t)
}

/// m-th member of the partition: `rho_0 = psi`, `rho_m = rho_dot(2^{-m} .)`.
pub fn rho_m(m: u32, t: f64) -> f64 {
    if m == 0 {
        psi(t)
    } else {
        rho_dot(t * (2.0f64).powi(-(m as i32)))
    }
}

/// Multiplier value of the sharp projector `P_n` at an eigenvalue of `S`.
pub fn sharp_weight(level: u32, lambda: f64) -> f64 {
    if lambda < (2.0f64).powi(level as i32 + 1) {
        1.0
    } else {
        0.0
    }
}

/// Multiplier value of the smooth projector `S_n` at an eigenvalue of `S`.
///
/// Evaluated through the telescoped closed form `psi(2^{-n} lambda)`, which
/// equals the partial sum `sum_{m<=n} rho_m(lambda)` exactly.
pub fn smooth_weight(level: u32, lambda: f64) -> f64 {
    psi(lambda * (2.0f64).powi(-(level as i32)))
}

/// Sharp cut-off or smooth Littlewood-Paley multiplier.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorKind {
    Sharp,
    Smooth,
}

impl std::fmt::Display for ProjectorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ProjectorKind::Sharp => "sharp",
            ProjectorKind::Smooth => "smooth",
        })
    }
}

/// A projector at a fixed level with its multiplier weights cached per basis,
/// so application is O(N).
#[derive(Debug, Clone)]
pub struct Projector {
    kind: ProjectorKind,
    level: u32,
    weights: Vec<f64>,
}

impl Projector {
    pub fn new(basis: &SpectralBasis, kind: ProjectorKind, level: u32) -> Self {
        let weights = basis
            .lambda_s()
            .iter()
            .map(|&l| match kind {
                ProjectorKind::Sharp => sharp_weight(level, l),
                ProjectorKind::Smooth => smooth_weight(level, l),
            })
            .collect();
        Projector { kind, level, weights }
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn apply(&self, f: &Field) -> Field {
        let mut out = f.clone();
        self.apply_in_place(out.coeffs_mut());
        out
    }

    pub fn apply_in_place(&self, coeffs: &mut [num_complex::Complex64]) {
        debug_assert_eq!(coeffs.len(), self.weights.len());
        for (c, &w) in coeffs.iter_mut().zip(&self.weights) {
            if w == 0.0 {
                *c = num_complex::Complex64::new(0.0, 0.0);
            } else if w != 1.0 {
                *c *= w;
            }
        }
    }
}

/// Randomized lower bound on the operator norm of `proj` in the given norm.
///
/// The trial set is `trials` Gaussian coefficient fields plus one band-limited
/// point bump per quadrature node (the projected delta reproduces the
/// classical partial-sum worst cases, where sharp cut-offs concentrate). The
/// returned max ratio is a valid lower bound on the discrete operator norm.
pub fn norm_ratio_probe(
    proj: &Projector,
    which: NormKind,
    basis: &Arc<SpectralBasis>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if trials < 1 {
        return Err(Error::InvalidProbe);
    }
    let mut best: f64 = 0.0;
    let mut consider = |g: &Field| -> Result<()> {
        let denom = g.norm(which)?;
        if denom > 0.0 {
            let num = proj.apply(g).norm(which)?;
            best = best.max(num / denom);
        }
        Ok(())
    };
    for t in 0..trials {
        let g = Field::gaussian(Arc::clone(basis), seed, t as u64);
        consider(&g)?;
    }
    let n_nodes = basis.grid().len();
    let mut one_hot = vec![num_complex::Complex64::new(0.0, 0.0); n_nodes];
    for i in 0..n_nodes {
        one_hot[i] = num_complex::Complex64::new(1.0, 0.0);
        let g = crate::spectral::field::analyze(&one_hot, basis)?;
        consider(&g)?;
        one_hot[i] = num_complex::Complex64::new(0.0, 0.0);
    }
    Ok(best)
}

/// Randomized lower bound on `||proj||_{L^p -> L^p}` for `p > 1`.
pub fn opnorm_lower_bound(
    proj: &Projector,
    p: f64,
    basis: &Arc<SpectralBasis>,
    trials: usize,
    seed: u64,
) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::InvalidProbe);
    }
    norm_ratio_probe(proj, NormKind::Lp(p), basis, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{GeometryKind, OperatorKind};
    use proptest::prelude::*;

    #[test]
    fn psi_plateaus_and_midpoint() {
        assert_eq!(psi(0.7), 1.0);
        assert_eq!(psi(1.0), 1.0);
        assert_eq!(psi(3.0), 0.0);
        assert_eq!(psi(2.0), 0.0);
        // g(2 - t) = g(t - 1) at t = 3/2
        assert!((psi(1.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    #[should_panic]
    fn psi_rejects_nonpositive_argument() {
        psi(0.0);
    }

    #[test]
    fn rho_dot_support_and_peak() {
        assert_eq!(rho_dot(1.0), 1.0); // psi(1) - psi(2) = 1
        assert_eq!(rho_dot(0.5), 0.0);
        assert_eq!(rho_dot(2.0), 0.0);
        assert_eq!(rho_dot(0.3), 0.0);
        assert_eq!(rho_dot(5.0), 0.0);
    }

    #[test]
    fn rho_3_at_12_is_one_half() {
        // rho_3(12) = rho_dot(1.5) = psi(1.5) - psi(3)
        assert!((rho_m(3, 12.0) - 0.5).abs() < 1e-15);
        assert!((smooth_weight(3, 12.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn partition_telescopes_to_one() {
        let t = 1000.0;
        let sum: f64 = (0..=20).map(|m| rho_m(m, t)).sum();
        assert!((sum - 1.0).abs() < 1e-14, "sum = {sum}");
    }

    proptest! {
        #[test]
        fn partition_of_unity_on_log_spaced_points(exp in -3.0f64..6.0) {
            let t = 10.0f64.powf(exp);
            let m_max = t.log2().ceil().max(0.0) as u32 + 1;
            let sum: f64 = (0..=m_max).map(|m| rho_m(m, t)).sum();
            prop_assert!((sum - 1.0).abs() < 1e-12);
        }

        #[test]
        fn psi_and_rho_stay_in_unit_interval(exp in -6.0f64..6.0, m in 0u32..12) {
            let t = 10.0f64.powf(exp);
            let p = psi(t);
            let r = rho_m(m, t);
            prop_assert!((0.0..=1.0).contains(&p));
            prop_assert!((0.0..=1.0).contains(&r));
        }
    }

    #[test]
    fn smooth_weight_matches_literal_partial_sum() {
        for level in 0..8u32 {
            for &lambda in &[1.0, 1.5, 2.0, 3.7, 8.0, 12.0, 100.0, 4096.0] {
                let literal: f64 = (0..=level).map(|m| rho_m(m, lambda)).sum();
                let closed = smooth_weight(level, lambda);
                assert!((literal - closed).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn sharp_cut_on_torus_level_zero() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 4).unwrap();
        let p = Projector::new(&b, ProjectorKind::Sharp, 0);
        // lambda_S = 1, 2, 2, 5; cut at 2 is exclusive
        assert_eq!(p.weights(), &[1.0, 0.0, 0.0, 0.0]);
        let s = Projector::new(&b, ProjectorKind::Smooth, 0);
        assert_eq!(s.weights()[0], 1.0); // psi(1) = 1
        assert_eq!(s.weights()[1], 0.0); // psi(2) = 0
    }

    #[test]
    fn projectors_land_in_the_level_span() {
        let b = SpectralBasis::with_defaults(GeometryKind::SphereZonal, 32).unwrap();
        let f = Field::gaussian(std::sync::Arc::clone(&b), 5, 0);
        for level in 0..6u32 {
            let dim = b.level_dim(level);
            for kind in [ProjectorKind::Sharp, ProjectorKind::Smooth] {
                let g = Projector::new(&b, kind, level).apply(&f);
                assert!(g.coeffs()[dim..].iter().all(|c| c.norm() == 0.0));
            }
        }
    }

    #[test]
    fn sharp_is_idempotent_exactly() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 32).unwrap();
        let p = Projector::new(&b, ProjectorKind::Sharp, 3);
        let f = Field::gaussian(std::sync::Arc::clone(&b), 11, 0);
        let once = p.apply(&f);
        let twice = p.apply(&once);
        assert_eq!(once.coeffs(), twice.coeffs());
    }

    #[test]
    fn selfadjoint_and_contractive() {
        let b = SpectralBasis::with_defaults(GeometryKind::IntervalDirichlet, 24).unwrap();
        for kind in [ProjectorKind::Sharp, ProjectorKind::Smooth] {
            for level in 0..6u32 {
                let p = Projector::new(&b, kind, level);
                for s in 0..6u64 {
                    let f = Field::gaussian(std::sync::Arc::clone(&b), 21, 2 * s);
                    let g = Field::gaussian(std::sync::Arc::clone(&b), 21, 2 * s + 1);
                    let lhs = p.apply(&f).inner_h(&g);
                    let rhs = f.inner_h(&p.apply(&g));
                    assert!((lhs - rhs).norm() < 1e-12 * f.norm_h() * g.norm_h());
                    assert!(p.apply(&f).norm_h() <= f.norm_h() * (1.0 + 1e-15));
                    assert!(p.apply(&f).norm_energy() <= f.norm_energy() * (1.0 + 1e-15));
                }
            }
        }
    }

    #[test]
    fn commutes_with_half_power_of_a() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 16).unwrap();
        let p = Projector::new(&b, ProjectorKind::Smooth, 2);
        for j in 0..16 {
            let e = Field::unit_mode(std::sync::Arc::clone(&b), j);
            let a = p.apply(&e.apply_power(OperatorKind::A, 0.5).unwrap());
            let c = p.apply(&e).apply_power(OperatorKind::A, 0.5).unwrap();
            assert_eq!(a.coeffs(), c.coeffs());
        }
    }

    #[test]
    fn smooth_converges_in_energy_norm() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 24).unwrap();
        let f = Field::gaussian(std::sync::Arc::clone(&b), 3, 0);
        let mut last = f64::INFINITY;
        let mut hit_zero = false;
        for level in 0..12u32 {
            let s = Projector::new(&b, ProjectorKind::Smooth, level);
            let res = f.add_scaled(num_complex::Complex64::new(-1.0, 0.0), &s.apply(&f));
            let r = res.norm_energy();
            assert!(r <= last * (1.0 + 1e-14), "residual not monotone at {level}");
            last = r;
            if (2.0f64).powi(level as i32) >= *b.lambda_s().last().unwrap() {
                assert_eq!(r, 0.0);
                hit_zero = true;
            }
        }
        assert!(hit_zero);
    }

    #[test]
    fn l2_probe_never_exceeds_one() {
        let b = SpectralBasis::with_defaults(GeometryKind::SphereZonal, 24).unwrap();
        for kind in [ProjectorKind::Sharp, ProjectorKind::Smooth] {
            let p = Projector::new(&b, kind, 3);
            let bound = opnorm_lower_bound(&p, 2.0, &b, 50, 7).unwrap();
            assert!(bound <= 1.0 + 1e-10, "{kind}: {bound}");
        }
    }

    #[test]
    fn identity_regime_ratio_is_one() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 8).unwrap();
        // max lambda_S = 17 < 2^{n+1} for n = 4
        let p = Projector::new(&b, ProjectorKind::Sharp, 4);
        assert!(p.weights().iter().all(|&w| w == 1.0));
        let bound = opnorm_lower_bound(&p, 6.0, &b, 25, 1).unwrap();
        assert!((bound - 1.0).abs() < 1e-12);
    }

    #[test]
    fn probe_rejects_bad_exponent_and_zero_trials() {
        let b = SpectralBasis::with_defaults(GeometryKind::Torus1d, 8).unwrap();
        let p = Projector::new(&b, ProjectorKind::Sharp, 2);
        assert!(opnorm_lower_bound(&p, 1.0, &b, 10, 0).is_err());
        assert!(opnorm_lower_bound(&p, 6.0, &b, 0, 0).is_err());
    }
}
