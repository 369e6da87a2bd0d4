//! Quadrature grids for the four geometries.
//!
//! Each grid is chosen so that products of any two retained basis functions
//! are integrated exactly, which makes analysis the exact adjoint of
//! synthesis and keeps Parseval an identity rather than an approximation:
//!
//! - torus: equispaced nodes on [0, 2pi), trapezoid weights
//! - Dirichlet interval: interior equispaced nodes of (0, pi) (DST-I family)
//! - Neumann interval: midpoint nodes of (0, pi) (DCT-II family)
//! - zonal sphere: Gauss-Legendre nodes in x = cos(theta), measure 2*pi*dx

use std::f64::consts::PI;

/// Nodes and weights of a quadrature rule.
#[derive(Debug, Clone)]
pub struct Quadrature {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Quadrature {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Total measure of the domain (sum of weights).
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

pub fn torus_grid(n_nodes: usize) -> Quadrature {
    let h = 2.0 * PI / n_nodes as f64;
    Quadrature {
        nodes: (0..n_nodes).map(|i| i as f64 * h).collect(),
        weights: vec![h; n_nodes],
    }
}

/// Interior equispaced nodes of (0, pi); exact for sine products up to the
/// node count even at the top mode.
pub fn dirichlet_grid(n_nodes: usize) -> Quadrature {
    let h = PI / (n_nodes + 1) as f64;
    Quadrature {
        nodes: (1..=n_nodes).map(|i| i as f64 * h).collect(),
        weights: vec![h; n_nodes],
    }
}

/// Midpoint nodes of (0, pi); exact for cosine products below the node count.
pub fn neumann_grid(n_nodes: usize) -> Quadrature {
    let h = PI / n_nodes as f64;
    Quadrature {
        nodes: (0..n_nodes).map(|i| (i as f64 + 0.5) * h).collect(),
        weights: vec![h; n_nodes],
    }
}

/// Gauss-Legendre rule on [-1, 1] rescaled to the zonal surface measure
/// `2 pi dx`; exact for polynomial integrands up to degree `2 n_nodes - 1`.
pub fn sphere_zonal_grid(n_nodes: usize) -> Quadrature {
    let (nodes, mut weights) = gauss_legendre(n_nodes);
    for w in &mut weights {
        *w *= 2.0 * PI;
    }
    Quadrature { nodes, weights }
}

/// Legendre polynomial values P_0(x)..P_{l_max}(x) by the three-term recurrence.
pub fn legendre_column(l_max: usize, x: f64) -> Vec<f64> {
    let mut col = Vec::with_capacity(l_max + 1);
    let mut p_prev = 1.0;
    col.push(p_prev);
    if l_max == 0 {
        return col;
    }
    let mut p = x;
    col.push(p);
    for l in 1..l_max {
        let p_next = ((2 * l + 1) as f64 * x * p - l as f64 * p_prev) / (l + 1) as f64;
        p_prev = p;
        p = p_next;
        col.push(p);
    }
    col
}

/// P_l(x) and its derivative, used by the Gauss-Legendre Newton iteration.
fn legendre_with_derivative(l: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 1..l {
        let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
        p_prev = p;
        p = p_next;
    }
    let dp = l as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        // Tricomi-style initial guess, then Newton.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        weights[i] = w;
        nodes[n - 1 - i] = x;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        // the middle node is exactly zero for odd rules
        nodes[n / 2] = 0.0;
        let (_, dp) = legendre_with_derivative(n, 0.0);
        weights[n / 2] = 2.0 / (dp * dp);
    }
    (nodes, weights)
}
