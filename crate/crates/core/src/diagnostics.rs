//! Global functionals, dissipation residuals, the theta cross-check, the
//! Gronwall envelope monitor and slope surveillance.

use serde::{Deserialize, Serialize};

use crate::curve::{ClosedCurve, CurveGeometry};
use crate::error::{DiagnosticsError, GeometryError};
use crate::geometry::{
    laplace_beltrami, node_slope, second_form, slope_constant, theta_angle, AmbientModel,
    ChartMetric, GeometryBundle, JetField,
};
use crate::linalg;

/// One time-stamped row of diagnostics.
///
/// For curves the volume is the length, the dissipation is the integral of
/// kappa_s^2 and the norms are those of kappa, kappa_s and kappa_ss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub volume: f64,
    pub dissipation: f64,
    pub meanzero_residual: f64,
    pub a_norms: [f64; 3],
    pub sup_a: f64,
    pub theta_residual: Option<f64>,
    pub slope_margin: Option<f64>,
    pub isoperimetric: Option<f64>,
    pub signed_area: Option<f64>,
}

fn integrate(f: impl Iterator<Item = f64>, metric: &ChartMetric, cell: f64) -> f64 {
    f.zip(&metric.vol_elem).map(|(v, w)| v * w).sum::<f64>() * cell
}

/// Diagnostics of a scalar state from its geometry.
pub fn snapshot_scalar(
    time: f64,
    bundle: &GeometryBundle,
    ambient: &AmbientModel,
) -> Result<DiagnosticsRecord, GeometryError> {
    let jets = &bundle.jets;
    let metric = &bundle.metric;
    let cell = jets.diff().spacing().powi(jets.dim as i32);
    let div = bundle.div_jh();
    let sf = second_form(jets, metric, ambient)?;
    let sq = |v: &[f64]| integrate(v.iter().map(|x| x * x), metric, cell);
    let theta_residual = if ambient.is_flat() {
        let lap = bundle.laplace_theta(ambient)?;
        Some(
            div.iter()
                .zip(&lap)
                .fold(0.0f64, |m, (a, b)| m.max((a + b).abs())),
        )
    } else {
        None
    };
    Ok(DiagnosticsRecord {
        time,
        volume: integrate(std::iter::repeat(1.0), metric, cell),
        dissipation: sq(div),
        meanzero_residual: integrate(div.iter().copied(), metric, cell),
        a_norms: [sq(&sf.norm_a), sq(&sf.norm_grad_a), sq(&sf.norm_grad2_a)],
        sup_a: sf.sup_norm_a(),
        theta_residual,
        slope_margin: Some(slope_check(jets).margin),
        isoperimetric: None,
        signed_area: None,
    })
}

/// Diagnostics of a closed curve.
pub fn snapshot_curve(curve: &ClosedCurve, geom: &CurveGeometry) -> DiagnosticsRecord {
    let area = geom.signed_area;
    DiagnosticsRecord {
        time: curve.time,
        volume: geom.length,
        dissipation: geom.integrate(|i| geom.kappa_s[i].powi(2)),
        meanzero_residual: geom.integrate(|i| -geom.kappa_s[i]),
        a_norms: [
            geom.integrate(|i| geom.kappa[i].powi(2)),
            geom.integrate(|i| geom.kappa_s[i].powi(2)),
            geom.integrate(|i| geom.kappa_ss[i].powi(2)),
        ],
        sup_a: geom.sup_kappa(),
        theta_residual: None,
        slope_margin: None,
        isoperimetric: Some(geom.length * geom.length / (4.0 * std::f64::consts::PI * area)),
        signed_area: Some(area),
    }
}

fn check_times(series: &[DiagnosticsRecord]) -> Result<(), DiagnosticsError> {
    for i in 1..series.len() {
        if !(series[i].time > series[i - 1].time) {
            return Err(DiagnosticsError::NonMonotoneTime(i));
        }
    }
    Ok(())
}

/// r_i = (V_{i+1} - V_i) / dt + (D_i + D_{i+1}) / 2 for consecutive records.
pub fn dissipation_check(series: &[DiagnosticsRecord]) -> Result<Vec<f64>, DiagnosticsError> {
    if series.len() < 3 {
        return Err(DiagnosticsError::TooFewRecords {
            needed: 3,
            got: series.len(),
        });
    }
    check_times(series)?;
    Ok(series
        .windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            (w[1].volume - w[0].volume) / dt + 0.5 * (w[0].dissipation + w[1].dissipation)
        })
        .collect())
}

/// Pointwise max |div JH + Laplace_g theta|; flat ambient only.
pub fn theta_consistency(
    bundle: &GeometryBundle,
    ambient: &AmbientModel,
) -> Result<f64, GeometryError> {
    let lap = bundle.laplace_theta(ambient)?;
    Ok(bundle
        .div_jh()
        .iter()
        .zip(&lap)
        .fold(0.0, |m, (a, b)| m.max((a + b).abs())))
}

/// max |(theta_1 - theta_0) / dt + Laplace_g^2 theta| with the bilaplacian
/// taken at the midpoint state `mid`.
pub fn theta_trajectory_residual(
    before: &JetField,
    after: &JetField,
    mid: &GeometryBundle,
    dt: f64,
    ambient: &AmbientModel,
) -> Result<f64, GeometryError> {
    let t0 = theta_angle(before, ambient)?;
    let t1 = theta_angle(after, ambient)?;
    let tm = theta_angle(&mid.jets, ambient)?;
    let diff = mid.jets.diff();
    let lap = laplace_beltrami(&tm, &mid.metric, diff);
    let bilap = laplace_beltrami(&lap, &mid.metric, diff);
    Ok(t0
        .iter()
        .zip(&t1)
        .zip(&bilap)
        .fold(0.0, |m, ((a, b), l)| m.max(((b - a) / dt + l).abs())))
}

/// Slope surveillance result.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    /// c_n minus the largest tangent/vertical pairing.
    pub margin: f64,
    /// Node with the largest pairing.
    pub node: Vec<usize>,
    /// Spectral norm of D^2 phi at that node.
    pub hessian_norm: f64,
}

pub fn slope_check(jets: &JetField) -> SlopeReport {
    let n = jets.dim;
    let mut worst = 0usize;
    let mut worst_slope = -1.0;
    for node in 0..jets.nodes {
        let s = node_slope(jets.d2_at(node), n);
        if s > worst_slope {
            worst_slope = s;
            worst = node;
        }
    }
    SlopeReport {
        margin: slope_constant(n) - worst_slope.max(0.0),
        node: jets.multi_index(worst),
        hessian_norm: linalg::sym_spectral_norm(jets.d2_at(worst), n),
    }
}

/// Outcome of the split-window Gronwall monitor.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GronwallReport {
    pub k: usize,
    /// Constant fitted on the first half of the window.
    pub fitted_c: f64,
    pub slack: f64,
    /// `None` when the monitor abstains because sup|A| escaped.
    pub passed: Option<bool>,
    /// Largest second-half value of lhs / (slack C rhs + floor).
    pub worst_ratio: f64,
    pub sup_a_first_half: f64,
    pub sup_a_second_half: f64,
}

pub const GRONWALL_SLACK: f64 = 10.0;

/// Fit the smallest C with d/dt Q_{k-1} <= C sum_{l <= k-1} Q_l on the first
/// half of the series and test slack * C on the second half. Q_l is the
/// integral of |grad^l A|^2 from `a_norms`.
///
/// Differences are compared against a floor of 1e-10 max(sum Q) / dt so that
/// runs whose norms only move at roundoff level pass with C = 0.
pub fn gronwall_monitor(
    series: &[DiagnosticsRecord],
    k: usize,
) -> Result<GronwallReport, DiagnosticsError> {
    if !(2..=3).contains(&k) {
        return Err(DiagnosticsError::UnsupportedOrder(k));
    }
    if series.len() < 10 {
        return Err(DiagnosticsError::TooFewRecords {
            needed: 10,
            got: series.len(),
        });
    }
    check_times(series)?;
    let q = |r: &DiagnosticsRecord| r.a_norms[k - 1];
    let total = |r: &DiagnosticsRecord| r.a_norms[..k].iter().sum::<f64>();
    let scale = series.iter().map(total).fold(0.0, f64::max);
    let intervals: Vec<(f64, f64, f64)> = series
        .windows(2)
        .map(|w| {
            let dt = w[1].time - w[0].time;
            let lhs = (q(&w[1]) - q(&w[0])) / dt;
            let rhs = 0.5 * (total(&w[0]) + total(&w[1]));
            (lhs, rhs, 1e-10 * scale / dt)
        })
        .collect();
    let half = intervals.len() / 2;
    let mut c = 0.0f64;
    for &(lhs, rhs, floor) in &intervals[..half] {
        if lhs > floor && rhs > 0.0 {
            c = c.max(lhs / rhs);
        }
    }
    let split = half + 1;
    let sup_first = series[..split].iter().map(|r| r.sup_a).fold(0.0, f64::max);
    let sup_second = series[split..].iter().map(|r| r.sup_a).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for &(lhs, rhs, floor) in &intervals[half..] {
        worst = worst.max(lhs / (GRONWALL_SLACK * c * rhs + floor));
    }
    let passed = if sup_second > 2.0 * sup_first {
        None
    } else {
        Some(worst <= 1.0)
    };
    Ok(GronwallReport {
        k,
        fitted_c: c,
        slack: GRONWALL_SLACK,
        passed,
        worst_ratio: worst,
        sup_a_first_half: sup_first,
        sup_a_second_half: sup_second,
    })
}
