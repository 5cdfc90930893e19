use super::{ClosedCurve, Point, MIN_POINTS};
use crate::error::CurveError;

/// Periodic cubic spline through the nodes, parameterized by cumulative chord.
#[derive(Debug, Clone)]
pub(crate) struct PeriodicSpline {
    knots: Vec<f64>,
    period: f64,
    values: Vec<Point>,
    second: Vec<Point>,
}

/// Solve a cyclic tridiagonal system with constant layout
/// a_i x_{i-1} + b_i x_i + c_i x_{i+1} = r_i (indices mod n).
fn solve_cyclic(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let alpha = c[n - 1];
    let beta = a[0];
    let gamma = -b[0];
    let mut bb = b.to_vec();
    bb[0] -= gamma;
    bb[n - 1] -= alpha * beta / gamma;
    let x = solve_tridiag(a, &bb, c, r);
    let mut u = vec![0.0; n];
    u[0] = gamma;
    u[n - 1] = alpha;
    let z = solve_tridiag(a, &bb, c, &u);
    let fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
    x.iter().zip(&z).map(|(xi, zi)| xi - fact * zi).collect()
}

fn solve_tridiag(a: &[f64], b: &[f64], c: &[f64], r: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut cp = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut bet = b[0];
    x[0] = r[0] / bet;
    for i in 1..n {
        cp[i] = c[i - 1] / bet;
        bet = b[i] - a[i] * cp[i];
        x[i] = (r[i] - a[i] * x[i - 1]) / bet;
    }
    for i in (0..n - 1).rev() {
        x[i] -= cp[i + 1] * x[i + 1];
    }
    x
}

impl PeriodicSpline {
    pub(crate) fn new(points: &[Point]) -> Self {
        let m = points.len();
        let h: Vec<f64> = (0..m)
            .map(|i| {
                let q = points[(i + 1) % m];
                (q[0] - points[i][0]).hypot(q[1] - points[i][1])
            })
            .collect();
        let mut knots = Vec::with_capacity(m);
        let mut acc = 0.0;
        for hi in &h {
            knots.push(acc);
            acc += hi;
        }
        let a: Vec<f64> = (0..m).map(|i| h[(i + m - 1) % m]).collect();
        let b: Vec<f64> = (0..m).map(|i| 2.0 * (h[(i + m - 1) % m] + h[i])).collect();
        let c: Vec<f64> = h.clone();
        let mut second = vec![[0.0; 2]; m];
        for axis in 0..2 {
            let r: Vec<f64> = (0..m)
                .map(|i| {
                    let prev = (i + m - 1) % m;
                    let next = (i + 1) % m;
                    6.0 * ((points[next][axis] - points[i][axis]) / h[i]
                        - (points[i][axis] - points[prev][axis]) / h[prev])
                })
                .collect();
            for (s, v) in second.iter_mut().zip(solve_cyclic(&a, &b, &c, &r)) {
                s[axis] = v;
            }
        }
        Self {
            knots,
            period: acc,
            values: points.to_vec(),
            second,
        }
    }

    pub(crate) fn period(&self) -> f64 {
        self.period
    }

    fn segment(&self, u: f64) -> (usize, f64) {
        let u = u.rem_euclid(self.period);
        let i = match self.knots.binary_search_by(|k| k.total_cmp(&u)) {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        (i, u - self.knots[i])
    }

    fn seg_len(&self, i: usize) -> f64 {
        let next = if i + 1 == self.knots.len() {
            self.period
        } else {
            self.knots[i + 1]
        };
        next - self.knots[i]
    }

    pub(crate) fn eval(&self, u: f64) -> Point {
        let (i, s) = self.segment(u);
        let j = (i + 1) % self.values.len();
        let h = self.seg_len(i);
        let (p0, p1, m0, m1) = (
            self.values[i],
            self.values[j],
            self.second[i],
            self.second[j],
        );
        let mut out = [0.0; 2];
        for a in 0..2 {
            let slope = (p1[a] - p0[a]) / h - h * (2.0 * m0[a] + m1[a]) / 6.0;
            out[a] = p0[a] + s * (slope + s * (m0[a] / 2.0 + s * (m1[a] - m0[a]) / (6.0 * h)));
        }
        out
    }

    fn eval_deriv(&self, u: f64) -> Point {
        let (i, s) = self.segment(u);
        let j = (i + 1) % self.values.len();
        let h = self.seg_len(i);
        let (p0, p1, m0, m1) = (
            self.values[i],
            self.values[j],
            self.second[i],
            self.second[j],
        );
        let mut out = [0.0; 2];
        for a in 0..2 {
            let slope = (p1[a] - p0[a]) / h - h * (2.0 * m0[a] + m1[a]) / 6.0;
            out[a] = slope + s * (m0[a] + s * (m1[a] - m0[a]) / (2.0 * h));
        }
        out
    }

    /// Arclength of the spline by 8-point Gauss-Legendre on every segment.
    pub(crate) fn arclength(&self) -> f64 {
        const X: [f64; 4] = [
            0.183_434_642_495_649_8,
            0.525_532_409_916_329,
            0.796_666_477_413_626_7,
            0.960_289_856_497_536_3,
        ];
        const W: [f64; 4] = [
            0.362_683_783_378_362,
            0.313_706_645_877_887_3,
            0.222_381_034_453_374_5,
            0.101_228_536_290_376_3,
        ];
        let mut total = 0.0;
        for i in 0..self.knots.len() {
            let h = self.seg_len(i);
            let mid = self.knots[i] + 0.5 * h;
            for (x, w) in X.iter().zip(W) {
                for sgn in [-1.0, 1.0] {
                    let d = self.eval_deriv(mid + sgn * x * 0.5 * h);
                    total += w * 0.5 * h * d[0].hypot(d[1]);
                }
            }
        }
        total
    }
}

/// Length of the periodic cubic spline through the nodes; a fourth-order
/// estimate of the length of the underlying smooth curve.
pub fn spline_length(curve: &ClosedCurve) -> f64 {
    PeriodicSpline::new(curve.points()).arclength()
}

/// Redistribute `m_out` nodes along the periodic cubic spline through the
/// curve so that consecutive chords are equal. Node 0 stays fixed.
pub fn resample_arclength(curve: &ClosedCurve, m_out: usize) -> Result<ClosedCurve, CurveError> {
    curve.validate()?;
    if m_out < MIN_POINTS {
        return Err(CurveError::TooFewPoints(m_out));
    }
    let spline = PeriodicSpline::new(curve.points());
    let period = spline.period();
    let mut u: Vec<f64> = (0..m_out)
        .map(|j| j as f64 * period / m_out as f64)
        .collect();
    let mut pts: Vec<Point> = u.iter().map(|&t| spline.eval(t)).collect();
    let mut prev_spread = f64::INFINITY;
    for _ in 0..100 {
        let chords: Vec<f64> = (0..m_out)
            .map(|j| {
                let q = pts[(j + 1) % m_out];
                (q[0] - pts[j][0]).hypot(q[1] - pts[j][1])
            })
            .collect();
        let total: f64 = chords.iter().sum();
        let mean = total / m_out as f64;
        let spread = chords.iter().fold(0.0f64, |s, c| s.max((c - mean).abs())) / mean;
        // stop at convergence or once roundoff stalls progress
        if spread < 1e-14 || (spread < 1e-11 && spread > 0.5 * prev_spread) {
            break;
        }
        prev_spread = spread;
        // parameter and chord length agree to second order, so a unit-gain
        // correction of the cumulative chord converges quickly
        let mut cum = 0.0;
        for j in 1..m_out {
            cum += chords[j - 1];
            u[j] += j as f64 * mean - cum;
        }
        let next: Vec<Point> = u.iter().map(|&t| spline.eval(t)).collect();
        pts = next;
    }
    let out = curve.with_points(pts);
    out.validate()?;
    Ok(out)
}
