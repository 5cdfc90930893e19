use std::fmt;
use std::sync::Arc;

use crate::error::GeometryError;

/// Slope-condition / closeness constant c_n = 1 / (10 sqrt n).
pub fn slope_constant(n: usize) -> f64 {
    1.0 / (10.0 * (n as f64).sqrt())
}

/// Ambient metric in Darboux coordinates (x, v) with the canonical symplectic
/// form dx ^ dv. Coordinates 0..n are base directions, n..2n fibre directions.
pub trait AmbientMetric: Send + Sync {
    /// Symmetric positive definite 2n x 2n matrix h_ab, row-major.
    fn metric(&self, x: &[f64], v: &[f64]) -> Vec<f64>;

    /// Christoffel symbols of h as a (2n)^3 array indexed [upper][lower][lower].
    fn christoffel(&self, x: &[f64], v: &[f64]) -> Vec<f64>;
}

/// The ambient geometry queried by the chart computations.
#[derive(Clone, Default)]
pub enum AmbientModel {
    /// Euclidean C^n: h is the identity and all Christoffels vanish.
    #[default]
    Flat,
    Curved(Arc<dyn AmbientMetric>),
}

impl fmt::Debug for AmbientModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Flat => f.write_str("Flat"),
            Self::Curved(_) => f.write_str("Curved(..)"),
        }
    }
}

impl AmbientModel {
    pub fn curved(metric: impl AmbientMetric + 'static) -> Self {
        Self::Curved(Arc::new(metric))
    }

    pub fn is_flat(&self) -> bool {
        matches!(self, Self::Flat)
    }

    pub fn metric_eval(&self, n: usize, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Self::Flat => crate::linalg::identity(2 * n),
            Self::Curved(m) => m.metric(x, v),
        }
    }

    pub fn christoffel_eval(&self, n: usize, x: &[f64], v: &[f64]) -> Vec<f64> {
        match self {
            Self::Flat => vec![0.0; (2 * n).pow(3)],
            Self::Curved(m) => m.christoffel(x, v),
        }
    }

    /// Frobenius distance of h from the identity at one point, checked
    /// against c_n.
    pub fn check_admissible(
        &self,
        n: usize,
        x: &[f64],
        v: &[f64],
        node: &[usize],
    ) -> Result<Vec<f64>, GeometryError> {
        let h = self.metric_eval(n, x, v);
        if self.is_flat() {
            return Ok(h);
        }
        let dim = 2 * n;
        let mut dev = 0.0;
        for a in 0..dim {
            for b in 0..dim {
                let d = h[a * dim + b] - if a == b { 1.0 } else { 0.0 };
                dev += d * d;
            }
        }
        let dev = dev.sqrt();
        let bound = slope_constant(n);
        if !(dev < bound) {
            return Err(GeometryError::InadmissibleAmbient {
                node: node.to_vec(),
                deviation: dev,
                bound,
            });
        }
        Ok(h)
    }
}

/// Diagonal conformal metric h = (1 + eps * cos(x_0)) I on C^n.
///
/// Not Kaehler in general; it exists to exercise the curved-ambient code
/// paths with Christoffels that are known in closed form.
#[derive(Debug, Clone, Copy)]
pub struct ConformalBump {
    pub dim: usize,
    pub eps: f64,
}

impl AmbientMetric for ConformalBump {
    fn metric(&self, x: &[f64], _v: &[f64]) -> Vec<f64> {
        let d = 2 * self.dim;
        let s = 1.0 + self.eps * x[0].cos();
        let mut h = vec![0.0; d * d];
        for a in 0..d {
            h[a * d + a] = s;
        }
        h
    }

    fn christoffel(&self, x: &[f64], _v: &[f64]) -> Vec<f64> {
        // h = e^{2u} I with 2u = ln(s): Gamma^a_bc = du_b d^a_c + du_c d^a_b - du_a d_bc
        let d = 2 * self.dim;
        let s = 1.0 + self.eps * x[0].cos();
        let mut du = vec![0.0; d];
        du[0] = -0.5 * self.eps * x[0].sin() / s;
        let mut g = vec![0.0; d * d * d];
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let mut v = 0.0;
                    if a == c {
                        v += du[b];
                    }
                    if a == b {
                        v += du[c];
                    }
                    if b == c {
                        v -= du[a];
                    }
                    g[a * d * d + b * d + c] = v;
                }
            }
        }
        g
    }
}

/// Constant (position independent) ambient metric; all Christoffels vanish.
#[derive(Debug, Clone)]
pub struct ConstantMetric {
    pub dim: usize,
    pub h: Vec<f64>,
}

impl AmbientMetric for ConstantMetric {
    fn metric(&self, _x: &[f64], _v: &[f64]) -> Vec<f64> {
        self.h.clone()
    }

    fn christoffel(&self, _x: &[f64], _v: &[f64]) -> Vec<f64> {
        vec![0.0; (2 * self.dim).pow(3)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_model_is_identity() {
        let amb = AmbientModel::Flat;
        assert_eq!(amb.metric_eval(1, &[0.3], &[0.1]), vec![1.0, 0.0, 0.0, 1.0]);
        assert!(amb
            .christoffel_eval(2, &[0.0, 0.0], &[0.0, 0.0])
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn admissibility_uses_slope_constant() {
        let ok = AmbientModel::curved(ConformalBump { dim: 1, eps: 0.01 });
        assert!(ok.check_admissible(1, &[0.0], &[0.0], &[0]).is_ok());
        let bad = AmbientModel::curved(ConformalBump { dim: 1, eps: 0.2 });
        assert!(matches!(
            bad.check_admissible(1, &[0.0], &[0.0], &[4]),
            Err(GeometryError::InadmissibleAmbient { .. })
        ));
    }

    #[test]
    fn conformal_christoffels_match_finite_differences() {
        let amb = ConformalBump { dim: 1, eps: 0.05 };
        let x = [0.7];
        let v = [0.0];
        let gam = amb.christoffel(&x, &v);
        // Gamma^0_00 = (1/2) h^00 d_0 h_00 for a diagonal metric depending on x_0 only
        let eps = 1e-6;
        let dh =
            (amb.metric(&[x[0] + eps], &v)[0] - amb.metric(&[x[0] - eps], &v)[0]) / (2.0 * eps);
        let expected = 0.5 * dh / amb.metric(&x, &v)[0];
        assert!((gam[0] - expected).abs() < 1e-9);
        // Gamma^1_10 = same, Gamma^0_11 = -same
        assert!((gam[1 * 4 + 1 * 2 + 0] - expected).abs() < 1e-9);
        assert!((gam[0 * 4 + 1 * 2 + 1] + expected).abs() < 1e-9);
    }

    #[test]
    fn slope_constants() {
        assert_eq!(slope_constant(1), 0.1);
        assert!((slope_constant(2) - 1.0 / (10.0 * 2f64.sqrt())).abs() < 1e-16);
    }
}
