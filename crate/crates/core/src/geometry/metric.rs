use super::ambient::AmbientModel;
use super::jets::JetField;
use crate::error::GeometryError;
use crate::linalg;

/// Induced metric data of the graph (x, dphi(x)) at every node.
#[derive(Debug, Clone)]
pub struct ChartMetric {
    pub dim: usize,
    pub nodes: usize,
    /// g_ij, n*n per node.
    pub g: Vec<f64>,
    /// g^ij, n*n per node.
    pub g_inv: Vec<f64>,
    /// Gamma^k_ij of g, n^3 per node indexed [k][i][j].
    pub christoffel: Vec<f64>,
    /// sqrt(det g).
    pub vol_elem: Vec<f64>,
}

impl ChartMetric {
    pub fn g_at(&self, node: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.g[node * s..(node + 1) * s]
    }

    pub fn g_inv_at(&self, node: usize) -> &[f64] {
        let s = self.dim * self.dim;
        &self.g_inv[node * s..(node + 1) * s]
    }

    pub fn christoffel_at(&self, node: usize) -> &[f64] {
        let s = self.dim.pow(3);
        &self.christoffel[node * s..(node + 1) * s]
    }

    /// Largest squared spectral norm of g^-1 over all nodes.
    pub fn max_g_inv_norm_sq(&self) -> f64 {
        (0..self.nodes)
            .map(|node| linalg::sym_spectral_norm(self.g_inv_at(node), self.dim).powi(2))
            .fold(0.0, f64::max)
    }
}

/// Tangent frame e_i = E_i + phi_ik E_{k+n} as 2n-component vectors.
pub(crate) fn tangent_frame(hess: &[f64], n: usize) -> Vec<f64> {
    let d = 2 * n;
    let mut e = vec![0.0; n * d];
    for i in 0..n {
        e[i * d + i] = 1.0;
        for k in 0..n {
            e[i * d + n + k] = hess[i * n + k];
        }
    }
    e
}

/// Induced metric g_ij = h(e_i, e_j), its inverse, volume density and the
/// Christoffel symbols obtained by differentiating the assembled g field.
pub fn induced_metric(
    jet: &JetField,
    ambient: &AmbientModel,
) -> Result<ChartMetric, GeometryError> {
    let n = jet.dim;
    let nodes = jet.nodes;
    let d = 2 * n;
    let mut g = vec![0.0; nodes * n * n];
    let mut g_inv = vec![0.0; nodes * n * n];
    let mut vol_elem = vec![0.0; nodes];

    for node in 0..nodes {
        let s = jet.d2_at(node);
        let gn = &mut g[node * n * n..(node + 1) * n * n];
        if ambient.is_flat() {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = if i == j { 1.0 } else { 0.0 };
                    for k in 0..n {
                        acc += s[i * n + k] * s[k * n + j];
                    }
                    gn[i * n + j] = acc;
                }
            }
        } else {
            let x = jet.base_point(node);
            let h = ambient.check_admissible(n, &x, jet.d1_at(node), &jet.multi_index(node))?;
            let e = tangent_frame(s, n);
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0.0;
                    for a in 0..d {
                        for b in 0..d {
                            acc += e[i * d + a] * h[a * d + b] * e[j * d + b];
                        }
                    }
                    gn[i * n + j] = acc;
                }
            }
        }
        let min_ev = linalg::sym_eigenvalues(gn, n)[0];
        let det = linalg::det(gn, n);
        if !(min_ev > 0.0) || !(det > 0.0) {
            return Err(GeometryError::SingularGraph {
                node: jet.multi_index(node),
                min_eigenvalue: min_ev,
            });
        }
        let inv = linalg::inverse(gn, n).ok_or_else(|| GeometryError::SingularGraph {
            node: jet.multi_index(node),
            min_eigenvalue: min_ev,
        })?;
        g_inv[node * n * n..(node + 1) * n * n].copy_from_slice(&inv);
        vol_elem[node] = det.sqrt();
    }

    // dg[p][i][j] per node
    let diff = jet.diff();
    let mut dg = vec![0.0; nodes * n * n * n];
    for i in 0..n {
        for j in i..n {
            let comp: Vec<f64> = (0..nodes).map(|node| g[node * n * n + i * n + j]).collect();
            for p in 0..n {
                let der = diff.derivative(&comp, p, 1);
                for node in 0..nodes {
                    let base = node * n * n * n + p * n * n;
                    dg[base + i * n + j] = der[node];
                    dg[base + j * n + i] = der[node];
                }
            }
        }
    }

    let mut christoffel = vec![0.0; nodes * n * n * n];
    for node in 0..nodes {
        let gi = &g_inv[node * n * n..(node + 1) * n * n];
        let dgn = &dg[node * n * n * n..(node + 1) * n * n * n];
        let dgv = |p: usize, i: usize, j: usize| dgn[p * n * n + i * n + j];
        let out = &mut christoffel[node * n * n * n..(node + 1) * n * n * n];
        for k in 0..n {
            for i in 0..n {
                for j in i..n {
                    let mut acc = 0.0;
                    for l in 0..n {
                        acc += gi[k * n + l] * (dgv(i, j, l) + dgv(j, i, l) - dgv(l, i, j));
                    }
                    out[k * n * n + i * n + j] = 0.5 * acc;
                    out[k * n * n + j * n + i] = 0.5 * acc;
                }
            }
        }
    }

    Ok(ChartMetric {
        dim: n,
        nodes,
        g,
        g_inv,
        christoffel,
        vol_elem,
    })
}
