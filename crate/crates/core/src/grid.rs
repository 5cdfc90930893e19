//! The potential grid: a periodic lattice over the chart base [0, 2pi)^n.

use std::f64::consts::PI;

use crate::error::GeometryError;

/// Scalar potential on the periodic chart.
///
/// The stored `values` are the periodic part of the potential. A constant
/// background Hessian `Q` and gradient `b` may be attached, giving the full
/// potential `x.Q.x / 2 + b.x + values(x)`; this is how affine and quadratic
/// potentials (whose graphs are planes) are represented on a torus.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialGrid {
    dim: usize,
    m: usize,
    values: Vec<f64>,
    background_hessian: Vec<f64>,
    background_gradient: Vec<f64>,
    pub time: f64,
}

impl PotentialGrid {
    pub fn new(dim: usize, m: usize, values: Vec<f64>) -> Result<Self, GeometryError> {
        if !(1..=3).contains(&dim) {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        if m < 8 {
            return Err(GeometryError::GridTooSmall(m));
        }
        let expected = m.pow(dim as u32);
        if values.len() != expected {
            return Err(GeometryError::ShapeMismatch {
                expected,
                got: values.len(),
            });
        }
        let grid = Self {
            dim,
            m,
            values,
            background_hessian: vec![0.0; dim * dim],
            background_gradient: vec![0.0; dim],
            time: 0.0,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn zeros(dim: usize, m: usize) -> Result<Self, GeometryError> {
        Self::new(dim, m, vec![0.0; m.pow(dim.min(3) as u32)])
    }

    /// Sample `f` at every node.
    pub fn from_fn(dim: usize, m: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self, GeometryError> {
        if !(1..=3).contains(&dim) {
            return Err(GeometryError::UnsupportedDimension(dim));
        }
        let total = m.pow(dim as u32);
        let h = 2.0 * PI / m as f64;
        let mut x = vec![0.0; dim];
        let values = (0..total)
            .map(|idx| {
                for (a, xa) in x.iter_mut().enumerate() {
                    *xa = ((idx / m.pow((dim - 1 - a) as u32)) % m) as f64 * h;
                }
                f(&x)
            })
            .collect();
        Self::new(dim, m, values)
    }

    /// Attach a constant background Hessian (symmetric, row-major n*n).
    pub fn with_background_hessian(mut self, q: Vec<f64>) -> Self {
        assert_eq!(q.len(), self.dim * self.dim);
        self.background_hessian = q;
        self
    }

    pub fn with_background_gradient(mut self, b: Vec<f64>) -> Self {
        assert_eq!(b.len(), self.dim);
        self.background_gradient = b;
        self
    }

    /// Check the grid invariants: finite values at every node.
    pub fn validate(&self) -> Result<(), GeometryError> {
        if let Some((idx, v)) = self.values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(GeometryError::NonFinite {
                node: self.multi_index(idx),
                value: *v,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.m as f64
    }

    pub fn node_count(&self) -> usize {
        self.values.len()
    }

    /// Volume of one lattice cell, h^n.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn set_values(&mut self, values: Vec<f64>) {
        assert_eq!(values.len(), self.values.len());
        self.values = values;
    }

    pub fn background_hessian(&self) -> &[f64] {
        &self.background_hessian
    }

    pub fn background_gradient(&self) -> &[f64] {
        &self.background_gradient
    }

    pub fn has_background(&self) -> bool {
        self.background_hessian.iter().any(|v| *v != 0.0)
            || self.background_gradient.iter().any(|v| *v != 0.0)
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        (0..self.dim)
            .map(|a| (idx / self.m.pow((self.dim - 1 - a) as u32)) % self.m)
            .collect()
    }

    pub fn coords(&self, idx: usize) -> Vec<f64> {
        let h = self.spacing();
        self.multi_index(idx)
            .into_iter()
            .map(|i| i as f64 * h)
            .collect()
    }

    /// Full potential (background included) at node `idx`.
    pub fn total_value(&self, idx: usize) -> f64 {
        let x = self.coords(idx);
        let n = self.dim;
        let mut v = self.values[idx];
        for a in 0..n {
            v += self.background_gradient[a] * x[a];
            for b in 0..n {
                v += 0.5 * x[a] * self.background_hessian[a * n + b] * x[b];
            }
        }
        v
    }

    /// Translate the periodic data by a lattice offset: new[i] = old[i - shift].
    pub fn shifted(&self, shift: &[isize]) -> Self {
        assert_eq!(shift.len(), self.dim);
        let m = self.m as isize;
        let mut values = vec![0.0; self.values.len()];
        for (idx, out) in values.iter_mut().enumerate() {
            let src: usize = self
                .multi_index(idx)
                .iter()
                .zip(shift)
                .enumerate()
                .map(|(a, (i, s))| {
                    ((*i as isize - s).rem_euclid(m) as usize)
                        * self.m.pow((self.dim - 1 - a) as u32)
                })
                .sum();
            *out = self.values[src];
        }
        Self {
            values,
            ..self.clone()
        }
    }
}

/// Shift a per-node field the same way [`PotentialGrid::shifted`] shifts values.
pub fn shift_field(field: &[f64], comps: usize, dim: usize, m: usize, shift: &[isize]) -> Vec<f64> {
    let nodes = field.len() / comps;
    let mut out = vec![0.0; field.len()];
    for idx in 0..nodes {
        let mut src = 0usize;
        for a in 0..dim {
            let stride = m.pow((dim - 1 - a) as u32);
            let i = ((idx / stride) % m) as isize;
            src += ((i - shift[a]).rem_euclid(m as isize) as usize) * stride;
        }
        out[idx * comps..(idx + 1) * comps].copy_from_slice(&field[src * comps..(src + 1) * comps]);
    }
    out
}
