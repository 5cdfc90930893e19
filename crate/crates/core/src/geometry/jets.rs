use std::collections::HashMap;
use std::sync::Arc;

use crate::diff::{PeriodicDiff, Scheme};
use crate::error::GeometryError;
use crate::grid::PotentialGrid;

/// Derivatives of the potential of orders one through four at every node.
///
/// Order-k arrays are stored node-major with n^k entries per node, indexed
/// row-major by (a1, ..., ak). Every permutation of a multi-index reads the
/// same stencil output, so the arrays are exactly symmetric.
#[derive(Debug, Clone)]
pub struct JetField {
    pub dim: usize,
    pub nodes: usize,
    pub d1: Vec<f64>,
    pub d2: Vec<f64>,
    pub d3: Vec<f64>,
    pub d4: Vec<f64>,
    diff: Arc<PeriodicDiff>,
}

impl JetField {
    pub fn diff(&self) -> &PeriodicDiff {
        &self.diff
    }

    pub fn diff_arc(&self) -> Arc<PeriodicDiff> {
        Arc::clone(&self.diff)
    }

    pub fn scheme(&self) -> Scheme {
        self.diff.scheme()
    }

    pub fn m(&self) -> usize {
        self.diff.m()
    }

    pub fn d1_at(&self, node: usize) -> &[f64] {
        let n = self.dim;
        &self.d1[node * n..(node + 1) * n]
    }

    pub fn d2_at(&self, node: usize) -> &[f64] {
        let s = self.dim.pow(2);
        &self.d2[node * s..(node + 1) * s]
    }

    pub fn d3_at(&self, node: usize) -> &[f64] {
        let s = self.dim.pow(3);
        &self.d3[node * s..(node + 1) * s]
    }

    pub fn d4_at(&self, node: usize) -> &[f64] {
        let s = self.dim.pow(4);
        &self.d4[node * s..(node + 1) * s]
    }

    /// Chart coordinates of `node`.
    pub fn base_point(&self, node: usize) -> Vec<f64> {
        let (m, n, h) = (self.diff.m(), self.dim, self.diff.spacing());
        (0..n)
            .map(|a| ((node / m.pow((n - 1 - a) as u32)) % m) as f64 * h)
            .collect()
    }

    pub fn multi_index(&self, node: usize) -> Vec<usize> {
        let (m, n) = (self.diff.m(), self.dim);
        (0..n)
            .map(|a| (node / m.pow((n - 1 - a) as u32)) % m)
            .collect()
    }
}

/// Periodic derivative jets of the potential.
pub fn compute_jets(grid: &PotentialGrid, scheme: Scheme) -> Result<JetField, GeometryError> {
    let diff = Arc::new(PeriodicDiff::new(grid.dim(), grid.m(), scheme));
    compute_jets_with(grid, diff)
}

/// As [`compute_jets`], reusing an existing differentiation engine.
pub fn compute_jets_with(
    grid: &PotentialGrid,
    diff: Arc<PeriodicDiff>,
) -> Result<JetField, GeometryError> {
    grid.validate()?;
    assert_eq!(diff.dim(), grid.dim());
    assert_eq!(diff.m(), grid.m());
    let n = grid.dim();
    let nodes = grid.node_count();
    let values = grid.values();

    let mut cache: HashMap<Vec<usize>, Vec<f64>> = HashMap::new();
    let mut orders: Vec<Vec<f64>> = Vec::with_capacity(4);
    for k in 1..=4usize {
        let width = n.pow(k as u32);
        let mut out = vec![0.0; nodes * width];
        for flat in 0..width {
            let mut counts = vec![0usize; n];
            for slot in 0..k {
                counts[(flat / n.pow((k - 1 - slot) as u32)) % n] += 1;
            }
            let field = cache
                .entry(counts.clone())
                .or_insert_with(|| diff.mixed(values, &counts));
            for node in 0..nodes {
                out[node * width + flat] = field[node];
            }
        }
        orders.push(out);
    }
    let d4 = orders.pop().unwrap();
    let d3 = orders.pop().unwrap();
    let mut d2 = orders.pop().unwrap();
    let mut d1 = orders.pop().unwrap();

    if grid.has_background() {
        let q = grid.background_hessian();
        let b = grid.background_gradient();
        for node in 0..nodes {
            let x = grid.coords(node);
            for a in 0..n {
                let mut v = b[a];
                for c in 0..n {
                    v += q[a * n + c] * x[c];
                    d2[node * n * n + a * n + c] += q[a * n + c];
                }
                d1[node * n + a] += v;
            }
        }
    }

    Ok(JetField {
        dim: n,
        nodes,
        d1,
        d2,
        d3,
        d4,
        diff,
    })
}
