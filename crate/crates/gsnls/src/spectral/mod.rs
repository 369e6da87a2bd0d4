//! Discrete geometries as eigensystems of the auxiliary operator `S`.
//!
//! A [`SpectralBasis`] holds the first `N` eigenvalues of `S` and of `A`
//! together with a quadrature grid and the transform pair. The four supported
//! geometries, with their fixed length scales:
//!
//! | kind                | domain          | basis                | lambda_S      | lambda_A        |
//! |---------------------|-----------------|----------------------|---------------|-----------------|
//! | `torus1d`           | circle, 2 pi    | e^{ikx}/sqrt(2pi)    | 1 + k^2       | (k^2)^beta      |
//! | `interval_dirichlet`| (0, pi)         | sqrt(2/pi) sin(kx)   | k^2, k >= 1   | (k^2)^beta      |
//! | `interval_neumann`  | (0, pi)         | cos family           | eps + k^2     | (k^2)^beta      |
//! | `sphere_zonal`      | unit sphere     | normalized P_l(cos)  | 1 + l(l+1)    | (l(l+1))^beta   |
//!
//! Modes are ordered by nondecreasing `lambda_S`; on the torus the order is
//! k = 0, 1, -1, 2, -2, ... so that a dyadic threshold falling on a degenerate
//! pair behaves deterministically. The grid carries `2N` nodes (padding
//! factor 2): products of any two basis functions are integrated exactly,
//! while cubic and higher products keep a controlled aliasing remainder.

pub mod field;
pub mod grid;
pub mod transform;

pub use field::Field;
pub use grid::Quadrature;
pub use transform::Transform;

use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// The four supported 1-D eigengeometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    Torus1d,
    IntervalDirichlet,
    IntervalNeumann,
    SphereZonal,
}

impl GeometryKind {
    /// Spatial dimension entering the admissible-exponent bookkeeping.
    pub fn dimension(self) -> u32 {
        match self {
            GeometryKind::SphereZonal => 2,
            _ => 1,
        }
    }
}

impl std::fmt::Display for GeometryKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            GeometryKind::Torus1d => "torus1d",
            GeometryKind::IntervalDirichlet => "interval_dirichlet",
            GeometryKind::IntervalNeumann => "interval_neumann",
            GeometryKind::SphereZonal => "sphere_zonal",
        };
        f.write_str(s)
    }
}

/// Which operator a spectral multiplier acts through.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// The Hamiltonian `A` (Laplacian variant, possibly fractional).
    A,
    /// The auxiliary operator `S` defining projectors and dyadic blocks.
    S,
}

/// Norms available on a [`Field`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormKind {
    /// l^2 of the coefficients (the L^2 norm of the field).
    H,
    /// Energy norm: (sum (1 + lambda_A) |c|^2)^{1/2}.
    EnergyA,
    /// Dual energy norm: (sum |c|^2 / (1 + lambda_A))^{1/2}.
    EnergyADual,
    /// Quadrature L^p norm on the padded grid; `f64::INFINITY` for the max.
    Lp(f64),
}

/// A discrete geometry: eigenvalues, quadrature grid, transforms.
pub struct SpectralBasis {
    kind: GeometryKind,
    n_modes: usize,
    beta: f64,
    eps_shift: f64,
    /// Integer mode label: wavenumber k (torus/intervals) or degree l (sphere).
    mode_degree: Vec<i64>,
    lambda_s: Vec<f64>,
    lambda_a: Vec<f64>,
    grid: Quadrature,
    transform: Transform,
}

impl std::fmt::Debug for SpectralBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "SpectralBasis({}, N = {}, beta = {}, grid = {})",
            self.kind,
            self.n_modes,
            self.beta,
            self.grid.len()
        )
    }
}

fn fractional(base: f64, beta: f64) -> f64 {
    if beta == 1.0 {
        base
    } else {
        base.powf(beta)
    }
}

/// Torus wavenumber ordering k = 0, 1, -1, 2, -2, ...
fn torus_wavenumbers(n: usize) -> Vec<i64> {
    (0..n)
        .map(|j| {
            let j = j as i64;
            if j == 0 {
                0
            } else if j % 2 == 1 {
                (j + 1) / 2
            } else {
                -j / 2
            }
        })
        .collect()
}

impl SpectralBasis {
    /// Build a basis with `n_modes` modes, fractional exponent `beta` for `A`
    /// and Neumann shift `eps_shift` (ignored by the other geometries).
    pub fn build(
        kind: GeometryKind,
        n_modes: usize,
        beta: f64,
        eps_shift: f64,
    ) -> Result<Arc<Self>> {
        if n_modes < 2 {
            return Err(Error::BasisTooSmall(n_modes));
        }
        if !(beta > 0.0) {
            return Err(Error::Config(format!("beta must be positive, got {beta}")));
        }
        if !(eps_shift > 0.0) {
            return Err(Error::Config(format!(
                "eps_shift must be positive, got {eps_shift}"
            )));
        }

        let mode_degree: Vec<i64> = match kind {
            GeometryKind::Torus1d => torus_wavenumbers(n_modes),
            GeometryKind::IntervalDirichlet => (1..=n_modes as i64).collect(),
            GeometryKind::IntervalNeumann | GeometryKind::SphereZonal => {
                (0..n_modes as i64).collect()
            }
        };
        let mut lambda_s = Vec::with_capacity(n_modes);
        let mut lambda_a = Vec::with_capacity(n_modes);
        for &d in &mode_degree {
            let d = d as f64;
            let (ls, base_a) = match kind {
                GeometryKind::Torus1d => (1.0 + d * d, d * d),
                GeometryKind::IntervalDirichlet => (d * d, d * d),
                GeometryKind::IntervalNeumann => (eps_shift + d * d, d * d),
                GeometryKind::SphereZonal => (1.0 + d * (d + 1.0), d * (d + 1.0)),
            };
            lambda_s.push(ls);
            lambda_a.push(fractional(base_a, beta));
        }
        debug_assert!(lambda_s.windows(2).all(|w| w[0] <= w[1]));

        let n_nodes = 2 * n_modes;
        let (grid, transform) = Self::grid_and_transform(kind, &mode_degree, n_nodes);
        Ok(Arc::new(SpectralBasis {
            kind,
            n_modes,
            beta,
            eps_shift,
            mode_degree,
            lambda_s,
            lambda_a,
            grid,
            transform,
        }))
    }

    /// Basis with default fractional exponent (1) and Neumann shift (1).
    pub fn with_defaults(kind: GeometryKind, n_modes: usize) -> Result<Arc<Self>> {
        Self::build(kind, n_modes, 1.0, 1.0)
    }

    fn grid_and_transform(
        kind: GeometryKind,
        degrees: &[i64],
        n_nodes: usize,
    ) -> (Quadrature, Transform) {
        let n_modes = degrees.len();
        match kind {
            GeometryKind::Torus1d => {
                let q = grid::torus_grid(n_nodes);
                let t = Transform::torus(degrees, n_nodes);
                (q, t)
            }
            GeometryKind::IntervalDirichlet => {
                let q = grid::dirichlet_grid(n_nodes);
                let norm = (2.0 / std::f64::consts::PI).sqrt();
                let t = Transform::dense(n_modes, &q.weights, |j, i| {
                    norm * (degrees[j] as f64 * q.nodes[i]).sin()
                });
                (q, t)
            }
            GeometryKind::IntervalNeumann => {
                let q = grid::neumann_grid(n_nodes);
                let pi = std::f64::consts::PI;
                let t = Transform::dense(n_modes, &q.weights, |j, i| {
                    if degrees[j] == 0 {
                        1.0 / pi.sqrt()
                    } else {
                        (2.0 / pi).sqrt() * (degrees[j] as f64 * q.nodes[i]).cos()
                    }
                });
                (q, t)
            }
            GeometryKind::SphereZonal => {
                let q = grid::sphere_zonal_grid(n_nodes);
                let l_max = n_modes - 1;
                let four_pi = 4.0 * std::f64::consts::PI;
                let cols: Vec<Vec<f64>> = q
                    .nodes
                    .iter()
                    .map(|&x| grid::legendre_column(l_max, x))
                    .collect();
                let t = Transform::dense(n_modes, &q.weights, |j, i| {
                    let l = degrees[j] as f64;
                    ((2.0 * l + 1.0) / four_pi).sqrt() * cols[i][j]
                });
                (q, t)
            }
        }
    }

    pub fn kind(&self) -> GeometryKind {
        self.kind
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eps_shift(&self) -> f64 {
        self.eps_shift
    }

    pub fn lambda_s(&self) -> &[f64] {
        &self.lambda_s
    }

    pub fn lambda_a(&self) -> &[f64] {
        &self.lambda_a
    }

    pub fn mode_degree(&self) -> &[i64] {
        &self.mode_degree
    }

    /// Padded quadrature grid (2N nodes).
    pub fn grid(&self) -> &Quadrature {
        &self.grid
    }

    /// Transform between the N modes and the padded grid.
    pub fn transform(&self) -> &Transform {
        &self.transform
    }

    /// Dimension of the span of modes with `lambda_S < 2^{n+1}`.
    ///
    /// Eigenvalues are nondecreasing, so the span is always a prefix of the
    /// mode list; eigenvalues exactly on the threshold are excluded.
    pub fn level_dim(&self, level: u32) -> usize {
        let cut = (2.0f64).powi(level as i32 + 1);
        self.lambda_s.partition_point(|&l| l < cut)
    }

    /// Square unitary transform between the first `dim` modes and a `dim`-node
    /// grid of the same family. Pointwise unimodular multiplication on that
    /// grid is then exactly l^2-isometric, which is what makes the nonlinear
    /// phase flow of the splitting integrator mass-exact.
    pub fn collocation_transform(&self, dim: usize) -> (Quadrature, Transform) {
        assert!(dim >= 1 && dim <= self.n_modes);
        Self::grid_and_transform(self.kind, &self.mode_degree[..dim], dim)
    }
}
