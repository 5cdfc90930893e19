use super::ambient::AmbientModel;
use super::jets::JetField;
use super::metric::ChartMetric;
use crate::diff::PeriodicDiff;
use crate::error::GeometryError;
use crate::linalg;

/// Mean curvature data. `h_comp` holds the components H^a in the normal
/// frame J e_a (n per node); the scalar fields are filled by [`div_jh`] and
/// [`theta_angle`] when requested.
#[derive(Debug, Clone)]
pub struct MeanCurvatureField {
    pub dim: usize,
    pub nodes: usize,
    pub h_comp: Vec<f64>,
    pub div_jh: Option<Vec<f64>>,
    pub theta: Option<Vec<f64>>,
}

impl MeanCurvatureField {
    pub fn h_at(&self, node: usize) -> &[f64] {
        &self.h_comp[node * self.dim..(node + 1) * self.dim]
    }
}

/// Covariant components h(H, J e_p), n per node.
///
/// Flat ambient keeps only g^ij phi_pij. Otherwise the nine ambient
/// Christoffel corrections are added term by term, with ambient indices
/// p+n written as `n + p`.
pub fn mean_curvature_covariant(
    jet: &JetField,
    metric: &ChartMetric,
    ambient: &AmbientModel,
) -> Result<Vec<f64>, GeometryError> {
    let n = jet.dim;
    let d = 2 * n;
    let mut out = vec![0.0; jet.nodes * n];
    for node in 0..jet.nodes {
        let gi = metric.g_inv_at(node);
        let t = jet.d3_at(node);
        let s = jet.d2_at(node);
        let gam = if ambient.is_flat() {
            None
        } else {
            let x = jet.base_point(node);
            Some(ambient.christoffel_eval(n, &x, jet.d1_at(node)))
        };
        for p in 0..n {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc += gi[i * n + j] * t[p * n * n + i * n + j];
                }
            }
            if let Some(gam) = &gam {
                let gt = |b: usize, a: usize, c: usize| gam[b * d * d + a * d + c];
                // sum over i, j of g^ij W^beta_ij, W = Gamma(e_i, e_j) with the
                // four blocks of the frame written out
                let w = |beta: usize| {
                    let mut total = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            let gij = gi[i * n + j];
                            let mut v = gt(beta, i, j);
                            for k in 0..n {
                                v += s[k * n + j] * gt(beta, i, n + k);
                                v += s[k * n + i] * gt(beta, n + k, j);
                                for l in 0..n {
                                    v += s[k * n + i] * s[l * n + j] * gt(beta, n + k, n + l);
                                }
                            }
                            total += gij * v;
                        }
                    }
                    total
                };
                acc += w(n + p);
                for q in 0..n {
                    acc -= w(q) * s[p * n + q];
                }
            }
            out[node * n + p] = acc;
        }
    }
    Ok(out)
}

/// H^a = g^ap h(H, J e_p).
pub fn mean_curvature(
    jet: &JetField,
    metric: &ChartMetric,
    ambient: &AmbientModel,
) -> Result<MeanCurvatureField, GeometryError> {
    let n = jet.dim;
    let cov = mean_curvature_covariant(jet, metric, ambient)?;
    let mut h_comp = vec![0.0; jet.nodes * n];
    for node in 0..jet.nodes {
        let gi = metric.g_inv_at(node);
        for a in 0..n {
            let mut acc = 0.0;
            for p in 0..n {
                acc += gi[a * n + p] * cov[node * n + p];
            }
            h_comp[node * n + a] = acc;
        }
    }
    Ok(MeanCurvatureField {
        dim: n,
        nodes: jet.nodes,
        h_comp,
        div_jh: None,
        theta: None,
    })
}

/// div(JH) = -d_a H^a - H^m Gamma^a_am, the velocity potential of the flow.
pub fn div_jh(h: &MeanCurvatureField, metric: &ChartMetric, jet: &JetField) -> Vec<f64> {
    let n = h.dim;
    let nodes = h.nodes;
    let diff = jet.diff();
    let mut out = vec![0.0; nodes];
    for a in 0..n {
        let comp: Vec<f64> = (0..nodes).map(|node| h.h_comp[node * n + a]).collect();
        let der = diff.derivative(&comp, a, 1);
        for (o, dv) in out.iter_mut().zip(der) {
            *o -= dv;
        }
    }
    for (node, o) in out.iter_mut().enumerate() {
        let gam = metric.christoffel_at(node);
        let hn = h.h_at(node);
        let mut acc = 0.0;
        for m in 0..n {
            let mut trace = 0.0;
            for a in 0..n {
                trace += gam[a * n * n + a * n + m];
            }
            acc += hn[m] * trace;
        }
        *o -= acc;
    }
    out
}

/// Lagrangian angle theta = sum_i arctan(lambda_i(D^2 phi)) (flat ambient).
pub fn theta_angle(jet: &JetField, ambient: &AmbientModel) -> Result<Vec<f64>, GeometryError> {
    if !ambient.is_flat() {
        return Err(GeometryError::RequiresFlatAmbient("theta_angle"));
    }
    Ok((0..jet.nodes)
        .map(|node| {
            linalg::sym_eigenvalues(jet.d2_at(node), jet.dim)
                .into_iter()
                .map(f64::atan)
                .sum()
        })
        .collect())
}

/// Laplace-Beltrami operator g^ij d_ij u - g^ij Gamma^k_ij d_k u.
pub fn laplace_beltrami(u: &[f64], metric: &ChartMetric, diff: &PeriodicDiff) -> Vec<f64> {
    let n = metric.dim;
    let nodes = metric.nodes;
    let grad = diff.gradient(u);
    let mut hess = vec![vec![]; n * n];
    for i in 0..n {
        for j in i..n {
            let mut counts = vec![0; n];
            counts[i] += 1;
            counts[j] += 1;
            let h = diff.mixed(u, &counts);
            hess[j * n + i] = h.clone();
            hess[i * n + j] = h;
        }
    }
    (0..nodes)
        .map(|node| {
            let gi = metric.g_inv_at(node);
            let gam = metric.christoffel_at(node);
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let gij = gi[i * n + j];
                    let mut v = hess[i * n + j][node];
                    for k in 0..n {
                        v -= gam[k * n * n + i * n + j] * grad[k][node];
                    }
                    acc += gij * v;
                }
            }
            acc
        })
        .collect()
}
