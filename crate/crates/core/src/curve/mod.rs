//! Closed plane curves and the curve diffusion flow (the n = 1 case).

mod flow;
mod graph_radius;
mod resample;

use serde::{Deserialize, Serialize};

use crate::error::CurveError;

pub use flow::{evolve_curve, CurveFlowConfig, CurveMethod, CurveRun, CurveStop};
pub use graph_radius::graph_radius_estimate;
pub use resample::{resample_arclength, spline_length};

pub const MIN_POINTS: usize = 16;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Ccw,
    Cw,
}

/// Ordered periodic polyline.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedCurve {
    points: Vec<Point>,
    pub time: f64,
}

impl ClosedCurve {
    pub fn new(points: Vec<Point>) -> Result<Self, CurveError> {
        let curve = Self { points, time: 0.0 };
        curve.validate()?;
        Ok(curve)
    }

    /// Sample `f` at m equally spaced parameters in [0, 2pi).
    pub fn from_fn(m: usize, f: impl Fn(f64) -> Point) -> Result<Self, CurveError> {
        let dt = 2.0 * std::f64::consts::PI / m as f64;
        Self::new((0..m).map(|i| f(i as f64 * dt)).collect())
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        let m = self.points.len();
        if m < MIN_POINTS {
            return Err(CurveError::TooFewPoints(m));
        }
        for (i, p) in self.points.iter().enumerate() {
            if !p[0].is_finite() || !p[1].is_finite() {
                return Err(CurveError::NonFinite(i));
            }
        }
        for i in 0..m {
            let j = (i + 1) % m;
            if self.points[i] == self.points[j] {
                return Err(CurveError::Degenerate(i, j));
            }
        }
        Ok(())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn orientation(&self) -> Orientation {
        if signed_area(&self.points) >= 0.0 {
            Orientation::Ccw
        } else {
            Orientation::Cw
        }
    }

    pub fn length(&self) -> f64 {
        polygon_length(&self.points)
    }

    pub fn signed_area(&self) -> f64 {
        signed_area(&self.points)
    }

    /// Largest distance between any two nodes.
    pub fn diameter(&self) -> f64 {
        let mut d = 0.0f64;
        for (i, p) in self.points.iter().enumerate() {
            for q in &self.points[i + 1..] {
                d = d.max((p[0] - q[0]).hypot(p[1] - q[1]));
            }
        }
        d
    }

    /// Rigid motion x -> R(angle) x + shift.
    pub fn transformed(&self, angle: f64, shift: Point) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            points: self
                .points
                .iter()
                .map(|p| {
                    [
                        c * p[0] - s * p[1] + shift[0],
                        s * p[0] + c * p[1] + shift[1],
                    ]
                })
                .collect(),
            time: self.time,
        }
    }

    pub(crate) fn with_points(&self, points: Vec<Point>) -> Self {
        Self {
            points,
            time: self.time,
        }
    }
}

pub(crate) fn polygon_length(p: &[Point]) -> f64 {
    let m = p.len();
    (0..m)
        .map(|i| {
            let q = p[(i + 1) % m];
            (q[0] - p[i][0]).hypot(q[1] - p[i][1])
        })
        .sum()
}

pub(crate) fn signed_area(p: &[Point]) -> f64 {
    let m = p.len();
    0.5 * (0..m)
        .map(|i| {
            let q = p[(i + 1) % m];
            p[i][0] * q[1] - q[0] * p[i][1]
        })
        .sum::<f64>()
}

/// Arclength geometry of a closed curve, all fields per node.
///
/// Derivatives use periodic central differences in the node index u with
/// sigma = |gamma_u| converting to arclength; the operator behind kappa_ss is
/// a five-point stencil.
#[derive(Debug, Clone)]
pub struct CurveGeometry {
    pub tangent: Vec<Point>,
    pub normal: Vec<Point>,
    pub kappa: Vec<f64>,
    pub kappa_s: Vec<f64>,
    pub kappa_ss: Vec<f64>,
    /// ds/du per node.
    pub speed: Vec<f64>,
    pub length: f64,
    pub signed_area: f64,
}

impl CurveGeometry {
    /// Quadrature of a nodal field against ds.
    pub fn integrate(&self, f: impl Fn(usize) -> f64) -> f64 {
        self.speed.iter().enumerate().map(|(i, s)| f(i) * s).sum()
    }

    pub fn sup_kappa(&self) -> f64 {
        self.kappa.iter().fold(0.0, |m, k| m.max(k.abs()))
    }

    /// Exact sum of exterior angles over 2pi.
    pub fn turning_number(&self) -> f64 {
        let m = self.tangent.len();
        let total: f64 = (0..m)
            .map(|i| {
                let a = self.tangent[i];
                let b = self.tangent[(i + 1) % m];
                (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
            })
            .sum();
        total / (2.0 * std::f64::consts::PI)
    }
}

fn central(f: &[f64], i: usize) -> f64 {
    let m = f.len();
    0.5 * (f[(i + 1) % m] - f[(i + m - 1) % m])
}

fn second(f: &[f64], i: usize) -> f64 {
    let m = f.len();
    f[(i + 1) % m] - 2.0 * f[i] + f[(i + m - 1) % m]
}

pub fn curve_geometry(curve: &ClosedCurve) -> Result<CurveGeometry, CurveError> {
    curve.validate()?;
    let p = curve.points();
    let m = p.len();
    let xs: Vec<f64> = p.iter().map(|q| q[0]).collect();
    let ys: Vec<f64> = p.iter().map(|q| q[1]).collect();
    let mut tangent = Vec::with_capacity(m);
    let mut normal = Vec::with_capacity(m);
    let mut kappa = Vec::with_capacity(m);
    let mut speed = Vec::with_capacity(m);
    for i in 0..m {
        let (xu, yu) = (central(&xs, i), central(&ys, i));
        let (xuu, yuu) = (second(&xs, i), second(&ys, i));
        let s = xu.hypot(yu);
        if s == 0.0 {
            return Err(CurveError::Degenerate((i + m - 1) % m, (i + 1) % m));
        }
        let t = [xu / s, yu / s];
        tangent.push(t);
        normal.push([-t[1], t[0]]);
        kappa.push((xu * yuu - yu * xuu) / (s * s * s));
        speed.push(s);
    }
    let mut kappa_s = Vec::with_capacity(m);
    let mut kappa_ss = Vec::with_capacity(m);
    for i in 0..m {
        let s = speed[i];
        let ku = central(&kappa, i);
        let kuu = second(&kappa, i);
        let su = central(&speed, i);
        kappa_s.push(ku / s);
        kappa_ss.push(kuu / (s * s) - ku * su / (s * s * s));
    }
    Ok(CurveGeometry {
        tangent,
        normal,
        kappa,
        kappa_s,
        kappa_ss,
        speed,
        length: polygon_length(p),
        signed_area: signed_area(p),
    })
}

/// Normal speed of the flow along the left normal: the curve moves by
/// v * normal with v = -kappa_ss, which decreases length.
pub fn curve_velocity(geom: &CurveGeometry) -> Vec<f64> {
    geom.kappa_ss.iter().map(|k| -k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(r: f64, m: usize) -> ClosedCurve {
        ClosedCurve::from_fn(m, |t| [r * t.cos(), r * t.sin()]).unwrap()
    }

    #[test]
    fn validation() {
        assert!(matches!(
            ClosedCurve::new(vec![[0.0, 0.0]; 4]),
            Err(CurveError::TooFewPoints(4))
        ));
        let mut pts = circle(1.0, 16).points().to_vec();
        pts[3] = pts[2];
        assert!(matches!(
            ClosedCurve::new(pts),
            Err(CurveError::Degenerate(2, 3))
        ));
    }

    #[test]
    fn circle_geometry() {
        let r = 1.5;
        let c = circle(r, 256);
        let g = curve_geometry(&c).unwrap();
        for k in &g.kappa {
            assert!((k * r - 1.0).abs() < 1e-3);
        }
        assert!((g.length - 2.0 * PI * r).abs() < 1e-3);
        assert!((g.signed_area - PI * r * r).abs() < 1e-3);
        assert_eq!(c.orientation(), Orientation::Ccw);
        assert!((g.turning_number() - 1.0).abs() < 1e-12);
        for (t, n) in g.tangent.iter().zip(&g.normal) {
            assert!((t[0] * n[0] + t[1] * n[1]).abs() < 1e-12);
            assert!((t[0].hypot(t[1]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reversed_circle_is_clockwise() {
        let c = ClosedCurve::from_fn(64, |t| [t.cos(), -t.sin()]).unwrap();
        assert_eq!(c.orientation(), Orientation::Cw);
        let g = curve_geometry(&c).unwrap();
        assert!(g.kappa.iter().all(|k| *k < 0.0));
        assert!((g.turning_number() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rigid_motion_preserves_length_and_area() {
        let c = ClosedCurve::from_fn(64, |t| [2.0 * t.cos(), t.sin()]).unwrap();
        let d = c.transformed(0.7, [3.0, -1.0]);
        assert!((c.length() - d.length()).abs() < 1e-12);
        assert!((c.signed_area() - d.signed_area()).abs() < 1e-12);
    }
}
