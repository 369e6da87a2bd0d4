//! Forward/inverse transforms between spectral coefficients and grid samples.
//!
//! The torus uses an FFT with a mode-to-bin map matching the interleaved
//! wavenumber ordering; the other geometries use dense matrices built from
//! basis function values (mode counts there stay small). Analysis is always
//! the quadrature adjoint of synthesis, so both directions are exact on
//! band-limited data whenever the grid integrates basis products exactly.

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

pub struct Transform {
    n_modes: usize,
    n_nodes: usize,
    imp: Imp,
}

enum Imp {
    TorusFft {
        fwd: Arc<dyn Fft<f64>>,
        inv: Arc<dyn Fft<f64>>,
        bins: Vec<usize>,
        synth_scale: f64,
        analyze_scale: f64,
    },
    Dense {
        /// n_nodes x n_modes, row-major: basis value h_j(x_i)
        synth: Vec<f64>,
        /// n_modes x n_nodes, row-major: w_i * h_j(x_i)
        analyze: Vec<f64>,
    },
}

impl std::fmt::Debug for Transform {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let kind = match self.imp {
            Imp::TorusFft { .. } => "fft",
            Imp::Dense { .. } => "dense",
        };
        write!(f, "Transform({kind}, {} modes -> {} nodes)", self.n_modes, self.n_nodes)
    }
}

impl Transform {
    /// FFT-backed transform for complex exponentials `e^{ikx}/sqrt(2 pi)` on
    /// an equispaced grid. `wavenumbers[j]` is the integer frequency of mode j.
    pub fn torus(wavenumbers: &[i64], n_nodes: usize) -> Self {
        let g = n_nodes as i64;
        let bins: Vec<usize> = wavenumbers.iter().map(|&k| k.rem_euclid(g) as usize).collect();
        {
            let mut seen = vec![false; n_nodes];
            for &b in &bins {
                assert!(!seen[b], "wavenumbers must be distinct modulo the node count");
                seen[b] = true;
            }
        }
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n_nodes);
        let inv = planner.plan_fft_inverse(n_nodes);
        let two_pi = 2.0 * std::f64::consts::PI;
        Transform {
            n_modes: wavenumbers.len(),
            n_nodes,
            imp: Imp::TorusFft {
                fwd,
                inv,
                bins,
                synth_scale: 1.0 / two_pi.sqrt(),
                analyze_scale: two_pi.sqrt() / n_nodes as f64,
            },
        }
    }

    /// Dense transform from real basis values on the grid.
    /// `value(j, i)` must return h_j(x_i); `weights` are the quadrature weights.
    pub fn dense(n_modes: usize, weights: &[f64], value: impl Fn(usize, usize) -> f64) -> Self {
        let n_nodes = weights.len();
        let mut synth = vec![0.0; n_nodes * n_modes];
        let mut analyze = vec![0.0; n_modes * n_nodes];
        for i in 0..n_nodes {
            for j in 0..n_modes {
                let v = value(j, i);
                synth[i * n_modes + j] = v;
                analyze[j * n_nodes + i] = weights[i] * v;
            }
        }
        Transform {
            n_modes,
            n_nodes,
            imp: Imp::Dense { synth, analyze },
        }
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    /// Grid samples of the field with the given coefficients.
    pub fn synthesize_into(&self, coeffs: &[Complex64], out: &mut [Complex64]) {
        assert_eq!(coeffs.len(), self.n_modes);
        assert_eq!(out.len(), self.n_nodes);
        match &self.imp {
            Imp::TorusFft { inv, bins, synth_scale, .. } => {
                out.fill(Complex64::new(0.0, 0.0));
                for (c, &b) in coeffs.iter().zip(bins) {
                    out[b] = c * *synth_scale;
                }
                inv.process(out);
            }
            Imp::Dense { synth, .. } => {
                for (i, o) in out.iter_mut().enumerate() {
                    let row = &synth[i * self.n_modes..(i + 1) * self.n_modes];
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for (v, c) in row.iter().zip(coeffs) {
                        re += v * c.re;
                        im += v * c.im;
                    }
                    *o = Complex64::new(re, im);
                }
            }
        }
    }

    pub fn synthesize(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_nodes];
        self.synthesize_into(coeffs, &mut out);
        out
    }

    /// Quadrature projection of grid samples onto the basis. Consumes the
    /// sample buffer in the FFT case; pass a scratch copy if it must survive.
    pub fn analyze_into(&self, samples: &mut [Complex64], out: &mut [Complex64]) {
        assert_eq!(samples.len(), self.n_nodes);
        assert_eq!(out.len(), self.n_modes);
        match &self.imp {
            Imp::TorusFft { fwd, bins, analyze_scale, .. } => {
                fwd.process(samples);
                for (o, &b) in out.iter_mut().zip(bins) {
                    *o = samples[b] * *analyze_scale;
                }
            }
            Imp::Dense { analyze, .. } => {
                for (j, o) in out.iter_mut().enumerate() {
                    let row = &analyze[j * self.n_nodes..(j + 1) * self.n_nodes];
                    let mut re = 0.0;
                    let mut im = 0.0;
                    for (v, s) in row.iter().zip(samples.iter()) {
                        re += v * s.re;
                        im += v * s.im;
                    }
                    *o = Complex64::new(re, im);
                }
            }
        }
    }

    pub fn analyze(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut buf = samples.to_vec();
        let mut out = vec![Complex64::new(0.0, 0.0); self.n_modes];
        self.analyze_into(&mut buf, &mut out);
        out
    }
}
