use super::{ClosedCurve, CurveGeometry};

/// Slope bound c_1 for curves.
const SLOPE: f64 = 0.1;

/// Radius of the largest tangent-line interval around `node` over which the
/// curve is a single-valued graph with slope below 1/10.
///
/// Marches node by node in both directions, reading the slope of the unit
/// tangent against the frame at `node` and interpolating the crossing
/// linearly. Each march covers at most half the curve.
pub fn graph_radius_estimate(curve: &ClosedCurve, geom: &CurveGeometry, node: usize) -> f64 {
    let p = curve.points();
    let m = p.len();
    let t0 = geom.tangent[node];
    let n0 = geom.normal[node];
    let origin = p[node];
    let march = |dir: isize| -> f64 {
        let sign = dir as f64;
        let mut prev_a = 0.0;
        let mut prev_slope = 0.0;
        for step in 1..=m / 2 {
            let j = (node as isize + dir * step as isize).rem_euclid(m as isize) as usize;
            let d = [p[j][0] - origin[0], p[j][1] - origin[1]];
            let a = sign * (d[0] * t0[0] + d[1] * t0[1]);
            let t = geom.tangent[j];
            let along = t[0] * t0[0] + t[1] * t0[1];
            let across = (t[0] * n0[0] + t[1] * n0[1]).abs();
            if along <= 0.0 || a <= prev_a {
                return prev_a;
            }
            let slope = across / along;
            if slope >= SLOPE {
                let w = (SLOPE - prev_slope) / (slope - prev_slope);
                return prev_a + w * (a - prev_a);
            }
            prev_a = a;
            prev_slope = slope;
        }
        prev_a
    };
    march(1).min(march(-1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::curve_geometry;

    #[test]
    fn circle_radius_matches_exact_geometry() {
        for r in [0.5, 1.0, 3.0] {
            let c = ClosedCurve::from_fn(2048, |t| [r * t.cos(), r * t.sin()]).unwrap();
            let g = curve_geometry(&c).unwrap();
            let est = graph_radius_estimate(&c, &g, 17);
            let exact = r * (0.1f64).atan().sin();
            assert!((est - exact).abs() < 1e-5 * r, "{est} {exact}");
        }
    }

    #[test]
    fn clockwise_circle_gives_same_radius() {
        let c = ClosedCurve::from_fn(512, |t| [t.cos(), -t.sin()]).unwrap();
        let g = curve_geometry(&c).unwrap();
        let exact = (0.1f64).atan().sin();
        assert!((graph_radius_estimate(&c, &g, 0) - exact).abs() < 1e-4);
    }
}
