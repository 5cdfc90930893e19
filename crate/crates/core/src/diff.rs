//! Periodic differentiation on the uniform lattice over [0, 2pi)^n.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

/// Derivative scheme used for all periodic stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Central2,
    Central4,
    Spectral,
}

impl Scheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "central2" => Some(Self::Central2),
            "central4" => Some(Self::Central4),
            "spectral" => Some(Self::Spectral),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Central2 => "central2",
            Self::Central4 => "central4",
            Self::Spectral => "spectral",
        }
    }

    /// Nominal convergence order of the stencil (spectral reported as infinite).
    pub fn order(self) -> f64 {
        match self {
            Self::Central2 => 2.0,
            Self::Central4 => 4.0,
            Self::Spectral => f64::INFINITY,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

// Stencil weights for offsets -r..=r, to be divided by h^order.
const C2: [&[f64]; 4] = [
    &[-0.5, 0.0, 0.5],
    &[1.0, -2.0, 1.0],
    &[-0.5, 1.0, 0.0, -1.0, 0.5],
    &[1.0, -4.0, 6.0, -4.0, 1.0],
];
const C4: [&[f64]; 4] = [
    &[1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0],
    &[
        -1.0 / 12.0,
        16.0 / 12.0,
        -30.0 / 12.0,
        16.0 / 12.0,
        -1.0 / 12.0,
    ],
    &[
        1.0 / 8.0,
        -1.0,
        13.0 / 8.0,
        0.0,
        -13.0 / 8.0,
        1.0,
        -1.0 / 8.0,
    ],
    &[
        -1.0 / 6.0,
        2.0,
        -39.0 / 6.0,
        56.0 / 6.0,
        -39.0 / 6.0,
        2.0,
        -1.0 / 6.0,
    ],
];

/// Integer wavenumber of FFT bin `j` on an `m`-point periodic grid of length 2pi.
pub fn wavenumber(j: usize, m: usize) -> f64 {
    if j <= m / 2 {
        j as f64
    } else {
        j as f64 - m as f64
    }
}

type FftPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

/// Differentiation engine for one lattice shape and scheme.
#[derive(Clone)]
pub struct PeriodicDiff {
    dim: usize,
    m: usize,
    scheme: Scheme,
    h: f64,
    fft: Option<FftPair>,
}

impl fmt::Debug for PeriodicDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PeriodicDiff")
            .field("dim", &self.dim)
            .field("m", &self.m)
            .field("scheme", &self.scheme)
            .finish()
    }
}

impl PeriodicDiff {
    pub fn new(dim: usize, m: usize, scheme: Scheme) -> Self {
        let fft = (scheme == Scheme::Spectral).then(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(m), planner.plan_fft_inverse(m))
        });
        Self {
            dim,
            m,
            scheme,
            h: 2.0 * PI / m as f64,
            fft,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    pub fn node_count(&self) -> usize {
        self.m.pow(self.dim as u32)
    }

    fn stride(&self, axis: usize) -> usize {
        self.m.pow((self.dim - 1 - axis) as u32)
    }

    /// `order`-th partial derivative (order 1..=4) along `axis`.
    pub fn derivative(&self, f: &[f64], axis: usize, order: usize) -> Vec<f64> {
        assert!((1..=4).contains(&order), "derivative order must be 1..=4");
        assert_eq!(f.len(), self.node_count());
        let m = self.m;
        let stride = self.stride(axis);
        let mut out = vec![0.0; f.len()];
        let mut line = vec![0.0; m];
        let mut dline = vec![0.0; m];
        let mut scratch = vec![Complex64::new(0.0, 0.0); m];
        for start in 0..f.len() {
            // line starts are nodes whose `axis` coordinate is zero
            if !(start / stride).is_multiple_of(m) {
                continue;
            }
            for (k, v) in line.iter_mut().enumerate() {
                *v = f[start + k * stride];
            }
            self.diff_line(&line, order, &mut dline, &mut scratch);
            for (k, v) in dline.iter().enumerate() {
                out[start + k * stride] = *v;
            }
        }
        out
    }

    /// Mixed partial with `counts[a]` derivatives along axis `a`.
    pub fn mixed(&self, f: &[f64], counts: &[usize]) -> Vec<f64> {
        let mut cur: Option<Vec<f64>> = None;
        for (axis, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let src = cur.as_deref().unwrap_or(f);
            cur = Some(self.derivative(src, axis, c));
        }
        cur.unwrap_or_else(|| f.to_vec())
    }

    /// Gradient field, component-major: `out[a]` is the partial along axis `a`.
    pub fn gradient(&self, f: &[f64]) -> Vec<Vec<f64>> {
        (0..self.dim).map(|a| self.derivative(f, a, 1)).collect()
    }

    fn diff_line(&self, line: &[f64], order: usize, out: &mut [f64], scratch: &mut [Complex64]) {
        let m = self.m;
        // constant data differentiates to exactly zero under every scheme
        if line.iter().all(|v| *v == line[0]) {
            out.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let scale = self.h.powi(order as i32);
        match self.scheme {
            Scheme::Central2 | Scheme::Central4 => {
                let w = if self.scheme == Scheme::Central2 {
                    C2[order - 1]
                } else {
                    C4[order - 1]
                };
                let r = (w.len() / 2) as isize;
                for (i, o) in out.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (k, wk) in w.iter().enumerate() {
                        if *wk == 0.0 {
                            continue;
                        }
                        let j = (i as isize + k as isize - r).rem_euclid(m as isize) as usize;
                        acc += wk * line[j];
                    }
                    *o = acc / scale;
                }
            }
            Scheme::Spectral => {
                let (fwd, inv) = self.fft.as_ref().expect("spectral plan");
                for (s, v) in scratch.iter_mut().zip(line) {
                    *s = Complex64::new(*v, 0.0);
                }
                fwd.process(scratch);
                for (j, s) in scratch.iter_mut().enumerate() {
                    let k = wavenumber(j, m);
                    if m.is_multiple_of(2) && j == m / 2 && !order.is_multiple_of(2) {
                        *s = Complex64::new(0.0, 0.0);
                        continue;
                    }
                    let ik = Complex64::new(0.0, k);
                    *s *= ik.powu(order as u32);
                }
                inv.process(scratch);
                let norm = 1.0 / m as f64;
                for (o, s) in out.iter_mut().zip(scratch.iter()) {
                    *o = s.re * norm;
                }
            }
        }
    }
}

/// Multi-dimensional real-to-complex transforms used by the implicit solves.
#[derive(Clone)]
pub struct NdFft {
    dim: usize,
    m: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for NdFft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NdFft")
            .field("dim", &self.dim)
            .field("m", &self.m)
            .finish()
    }
}

impl NdFft {
    pub fn new(dim: usize, m: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            m,
            fwd: planner.plan_fft_forward(m),
            inv: planner.plan_fft_inverse(m),
        }
    }

    fn apply(&self, data: &mut [Complex64], inverse: bool) {
        let m = self.m;
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        for axis in 0..self.dim {
            let stride = m.pow((self.dim - 1 - axis) as u32);
            for start in 0..data.len() {
                if !(start / stride).is_multiple_of(m) {
                    continue;
                }
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[start + k * stride];
                }
                plan.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
        self.apply(&mut data, false);
        data
    }

    pub fn inverse(&self, mut data: Vec<Complex64>) -> Vec<f64> {
        self.apply(&mut data, true);
        let norm = 1.0 / data.len() as f64;
        data.iter().map(|c| c.re * norm).collect()
    }

    /// Squared integer wavenumber |k|^2 of each coefficient in transform order.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let m = self.m;
        let total = m.pow(self.dim as u32);
        (0..total)
            .map(|idx| {
                (0..self.dim)
                    .map(|axis| {
                        let j = (idx / m.pow((self.dim - 1 - axis) as u32)) % m;
                        wavenumber(j, m).powi(2)
                    })
                    .sum()
            })
            .collect()
    }
}
