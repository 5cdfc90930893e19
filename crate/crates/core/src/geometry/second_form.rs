use super::ambient::AmbientModel;
use super::jets::JetField;
use super::metric::{tangent_frame, ChartMetric};
use crate::diff::PeriodicDiff;
use crate::error::GeometryError;
use crate::linalg;

/// Second fundamental form A_ijl = <D_{e_i} e_j, J e_l> in the frame
/// e_i = E_i + phi_ik E_{k+n}, with its first two covariant derivatives.
///
/// Rank-r arrays hold n^r entries per node, row-major. For the derivatives
/// the differentiation indices come first: grad_a[p][i][j][l] and
/// grad2_a[r][p][i][j][l].
#[derive(Debug, Clone)]
pub struct SecondFormField {
    pub dim: usize,
    pub nodes: usize,
    pub a: Vec<f64>,
    pub grad_a: Vec<f64>,
    pub grad2_a: Vec<f64>,
    pub norm_a: Vec<f64>,
    pub norm_grad_a: Vec<f64>,
    pub norm_grad2_a: Vec<f64>,
}

impl SecondFormField {
    pub fn a_at(&self, node: usize) -> &[f64] {
        let s = self.dim.pow(3);
        &self.a[node * s..(node + 1) * s]
    }

    pub fn sup_norm_a(&self) -> f64 {
        self.norm_a.iter().copied().fold(0.0, f64::max)
    }
}

/// The components A_ijl alone (no covariant derivatives).
///
/// With a flat ambient this is a copy of the third jet; otherwise the
/// ambient Christoffel terms are contracted against omega(e_l, .).
pub fn second_form_components(
    jet: &JetField,
    ambient: &AmbientModel,
) -> Result<Vec<f64>, GeometryError> {
    if ambient.is_flat() {
        return Ok(jet.d3.clone());
    }
    let n = jet.dim;
    let d = 2 * n;
    let mut a = vec![0.0; jet.nodes * n * n * n];
    for node in 0..jet.nodes {
        let x = jet.base_point(node);
        let v = jet.d1_at(node);
        ambient.check_admissible(n, &x, v, &jet.multi_index(node))?;
        let gam = ambient.christoffel_eval(n, &x, v);
        let s = jet.d2_at(node);
        let t = jet.d3_at(node);
        let e = tangent_frame(s, n);
        for i in 0..n {
            for j in 0..n {
                // V = D_{e_i} e_j in ambient coordinates
                let mut vb = vec![0.0; d];
                for k in 0..n {
                    vb[n + k] = t[j * n * n + k * n + i];
                }
                for (beta, vbeta) in vb.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for al in 0..d {
                        let ei = e[i * d + al];
                        if ei == 0.0 {
                            continue;
                        }
                        for ga in 0..d {
                            acc += ei * e[j * d + ga] * gam[beta * d * d + al * d + ga];
                        }
                    }
                    *vbeta += acc;
                }
                for l in 0..n {
                    let mut val = vb[n + l];
                    for sidx in 0..n {
                        val -= s[l * n + sidx] * vb[sidx];
                    }
                    a[node * n * n * n + i * n * n + j * n + l] = val;
                }
            }
        }
    }
    Ok(a)
}

/// Covariant derivative of a node-major covariant tensor field of rank `rank`.
/// The new index is placed first.
pub(crate) fn covariant_derivative(
    t: &[f64],
    rank: usize,
    metric: &ChartMetric,
    diff: &PeriodicDiff,
) -> Vec<f64> {
    let n = metric.dim;
    let nodes = metric.nodes;
    let width = n.pow(rank as u32);
    let out_width = width * n;
    let mut out = vec![0.0; nodes * out_width];
    for comp in 0..width {
        let field: Vec<f64> = (0..nodes).map(|node| t[node * width + comp]).collect();
        for p in 0..n {
            let der = diff.derivative(&field, p, 1);
            for node in 0..nodes {
                out[node * out_width + p * width + comp] = der[node];
            }
        }
    }
    for node in 0..nodes {
        let gam = metric.christoffel_at(node);
        let tn = &t[node * width..(node + 1) * width];
        let on = &mut out[node * out_width..(node + 1) * out_width];
        for p in 0..n {
            for comp in 0..width {
                let mut corr = 0.0;
                for slot in 0..rank {
                    let stride = n.pow((rank - 1 - slot) as u32);
                    let idx = (comp / stride) % n;
                    let base = comp - idx * stride;
                    for q in 0..n {
                        corr += gam[q * n * n + p * n + idx] * tn[base + q * stride];
                    }
                }
                on[p * width + comp] -= corr;
            }
        }
    }
    out
}

fn pointwise_norms(t: &[f64], rank: usize, metric: &ChartMetric) -> Vec<f64> {
    let n = metric.dim;
    let width = n.pow(rank as u32);
    (0..metric.nodes)
        .map(|node| {
            linalg::tensor_norm_sq(
                &t[node * width..(node + 1) * width],
                rank,
                n,
                metric.g_inv_at(node),
            )
            .sqrt()
        })
        .collect()
}

/// Pointwise |A|_g from components and metric.
pub fn second_form_norms(a: &[f64], metric: &ChartMetric) -> Vec<f64> {
    pointwise_norms(a, 3, metric)
}

/// A, grad A and grad^2 A with their pointwise g-norms.
pub fn second_form(
    jet: &JetField,
    metric: &ChartMetric,
    ambient: &AmbientModel,
) -> Result<SecondFormField, GeometryError> {
    let a = second_form_components(jet, ambient)?;
    let grad_a = covariant_derivative(&a, 3, metric, jet.diff());
    let grad2_a = covariant_derivative(&grad_a, 4, metric, jet.diff());
    Ok(SecondFormField {
        dim: jet.dim,
        nodes: jet.nodes,
        norm_a: pointwise_norms(&a, 3, metric),
        norm_grad_a: pointwise_norms(&grad_a, 4, metric),
        norm_grad2_a: pointwise_norms(&grad2_a, 5, metric),
        a,
        grad_a,
        grad2_a,
    })
}
