//! Named property suites, one per acceptance criterion.

use std::fmt;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use lagflow_core::curve::{
    curve_geometry, curve_velocity, evolve_curve, graph_radius_estimate, ClosedCurve,
    CurveFlowConfig, CurveMethod, CurveStop,
};
use lagflow_core::diagnostics::{dissipation_check, gronwall_monitor, theta_consistency};
use lagflow_core::geometry::AmbientModel;
use lagflow_core::scalar_flow::{FlowState, Method, ScalarFlow, StepperConfig, StopReason};
use lagflow_core::{PotentialGrid, Scheme};
use serde::Serialize;

use crate::config::parse_config;
use crate::presets::{lemniscate, perturbed_circle, random_field};
use crate::run::{self, Outcome};

pub const SUITES: &[&str] = &[
    "stationarity",
    "decay",
    "symbol",
    "theta",
    "dissipation",
    "conservation",
    "convergence",
    "blowup",
    "meanzero",
    "frame",
    "graph_radius",
    "gronwall",
    "all",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Equals,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::AtMost => "<=",
            Self::AtLeast => ">=",
            Self::Equals => "==",
        })
    }
}

/// One measured quantity against its threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn new(
        label: impl Into<String>,
        measured: f64,
        relation: Relation,
        threshold: f64,
    ) -> Self {
        let passed = match relation {
            Relation::AtMost => measured <= threshold,
            Relation::AtLeast => measured >= threshold,
            Relation::Equals => measured == threshold,
        };
        Self {
            label: label.into(),
            measured,
            relation,
            threshold,
            passed,
        }
    }

    fn at_most(label: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(label, measured, Relation::AtMost, threshold)
    }

    fn at_least(label: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self::new(label, measured, Relation::AtLeast, threshold)
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{} {:.3e} {} {:.3e}",
            if self.passed { "" } else { "!" },
            self.label,
            self.measured,
            self.relation,
            self.threshold
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
    pub runtime_limit_s: f64,
    pub error: Option<String>,
}

impl CriterionResult {
    /// Single human-readable line.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} [{:>2}] {:<13} {:>7.2}s/{}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed_s,
            self.runtime_limit_s
        );
        let parts: Vec<String> = self.checks.iter().map(Check::to_string).collect();
        if !parts.is_empty() {
            s.push_str("  ");
            s.push_str(&parts.join("; "));
        }
        if let Some(e) = &self.error {
            s.push_str(&format!("  error: {e}"));
        }
        s
    }
}

pub struct Criterion {
    pub id: u32,
    pub name: &'static str,
    pub runtime_limit_s: f64,
    body: fn() -> Result<Vec<Check>>,
}

impl Criterion {
    pub fn evaluate(&self) -> CriterionResult {
        let start = Instant::now();
        let outcome = (self.body)();
        let elapsed_s = start.elapsed().as_secs_f64();
        let (checks, error) = match outcome {
            Ok(c) => (c, None),
            Err(e) => (Vec::new(), Some(format!("{e:#}"))),
        };
        let passed = error.is_none()
            && !checks.is_empty()
            && checks.iter().all(|c| c.passed)
            && elapsed_s < self.runtime_limit_s;
        CriterionResult {
            id: self.id,
            name: self.name,
            passed,
            checks,
            elapsed_s,
            runtime_limit_s: self.runtime_limit_s,
            error,
        }
    }
}

pub const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "stationarity",
        runtime_limit_s: 1.0,
        body: stationarity,
    },
    Criterion {
        id: 2,
        name: "decay",
        runtime_limit_s: 5.0,
        body: decay,
    },
    Criterion {
        id: 3,
        name: "symbol",
        runtime_limit_s: 5.0,
        body: symbol,
    },
    Criterion {
        id: 4,
        name: "theta",
        runtime_limit_s: 30.0,
        body: theta,
    },
    Criterion {
        id: 5,
        name: "dissipation",
        runtime_limit_s: 60.0,
        body: dissipation,
    },
    Criterion {
        id: 6,
        name: "conservation",
        runtime_limit_s: 60.0,
        body: conservation,
    },
    Criterion {
        id: 7,
        name: "convergence",
        runtime_limit_s: 300.0,
        body: convergence,
    },
    Criterion {
        id: 8,
        name: "blowup",
        runtime_limit_s: 300.0,
        body: blowup,
    },
    Criterion {
        id: 9,
        name: "meanzero",
        runtime_limit_s: 1.0,
        body: meanzero,
    },
    Criterion {
        id: 10,
        name: "frame",
        runtime_limit_s: 30.0,
        body: frame,
    },
    Criterion {
        id: 11,
        name: "graph_radius",
        runtime_limit_s: 5.0,
        body: graph_radius,
    },
    Criterion {
        id: 12,
        name: "gronwall",
        runtime_limit_s: 60.0,
        body: gronwall,
    },
];

pub fn criterion(name: &str) -> Option<&'static Criterion> {
    CRITERIA.iter().find(|c| c.name == name)
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub criteria: Vec<CriterionResult>,
}

impl SuiteReport {
    pub fn outcome(&self) -> Outcome {
        if self.passed {
            Outcome::Completed
        } else {
            Outcome::CheckFailed {
                failed: self
                    .criteria
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| c.name.to_string())
                    .collect(),
            }
        }
    }
}

/// Run one suite, or every criterion for `all`.
pub fn run_suite(name: &str) -> Result<SuiteReport> {
    let selected: Vec<&Criterion> = if name == "all" {
        CRITERIA.iter().collect()
    } else {
        match criterion(name) {
            Some(c) => vec![c],
            None => bail!(
                "unknown suite `{name}` (expected one of {})",
                SUITES.join(", ")
            ),
        }
    };
    let criteria: Vec<CriterionResult> = selected.iter().map(|c| c.evaluate()).collect();
    Ok(SuiteReport {
        suite: name.to_string(),
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn scalar_flow(dim: usize, m: usize, scheme: Scheme, config: StepperConfig) -> Result<ScalarFlow> {
    Ok(ScalarFlow::new(dim, m, scheme, AmbientModel::Flat, config)?)
}

fn circle(m: usize, r: f64) -> Result<ClosedCurve> {
    Ok(ClosedCurve::from_fn(m, |t| [r * t.cos(), r * t.sin()])?)
}

fn imex(max_dt: f64, diag_every: usize) -> CurveFlowConfig {
    CurveFlowConfig {
        method: CurveMethod::Imex,
        max_dt,
        diag_every,
        ..CurveFlowConfig::default()
    }
}

fn stationarity() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let circle = circle(256, 1.0)?;
    let v = curve_velocity(&curve_geometry(&circle)?);
    checks.push(Check::at_most("circle max|V|", max_abs(&v), 1e-10));
    let quadratics: [(usize, Vec<f64>); 2] = [(1, vec![0.05]), (2, vec![0.05, 0.02, 0.02, -0.03])];
    for (dim, q) in quadratics {
        for scheme in [Scheme::Central2, Scheme::Spectral] {
            let grid = PotentialGrid::zeros(dim, 64)?.with_background_hessian(q.clone());
            let flow = scalar_flow(dim, 64, scheme, StepperConfig::default())?;
            let v = flow.rhs(&FlowState::new(grid))?;
            checks.push(Check::at_most(
                format!("quadratic n={dim} {} max|V|", scheme.name()),
                max_abs(&v),
                1e-10,
            ));
        }
    }
    Ok(checks)
}

/// Amplitude of the sin(k x) mode of a 1d grid.
fn sine_amplitude(grid: &PotentialGrid, k: f64) -> f64 {
    let m = grid.m();
    let s: f64 = (0..m)
        .map(|i| grid.values()[i] * (k * grid.coords(i)[0]).sin())
        .sum();
    2.0 * s / m as f64
}

fn decay() -> Result<Vec<Check>> {
    let (amp, t_end) = (1e-6, 0.1);
    let config = StepperConfig {
        method: Method::ImexSpectral,
        max_dt: 1e-4,
        ..StepperConfig::default()
    };
    let flow = scalar_flow(1, 64, Scheme::Spectral, config)?;
    let mut checks = Vec::new();
    for (k, tol) in [(1.0f64, 1e-3), (2.0, 1e-2)] {
        let grid = PotentialGrid::from_fn(1, 64, |x| amp * (k * x[0]).sin())?;
        let run = flow.evolve(FlowState::new(grid), t_end, usize::MAX, &mut |_| {})?;
        ensure!(
            run.stop == StopReason::Completed,
            "k={k} run stopped: {:?}",
            run.stop
        );
        let expected = amp * (-k.powi(4) * t_end).exp();
        let got = sine_amplitude(&run.state.grid, k);
        checks.push(Check::at_most(
            format!("k={k} rel err"),
            (got / expected - 1.0).abs(),
            tol,
        ));
    }
    Ok(checks)
}

fn symbol() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let cases: [&[i64]; 3] = [&[1], &[2], &[1, 1]];
    for k in cases {
        let dim = k.len();
        let flow = scalar_flow(dim, 128, Scheme::Spectral, StepperConfig::default())?;
        let state = FlowState::new(PotentialGrid::zeros(dim, 128)?);
        let got = flow.symbol_probe(&state, k, 1e-5)?;
        let k2: f64 = k.iter().map(|v| (v * v) as f64).sum();
        let expected = -k2 * k2;
        checks.push(Check::at_most(
            format!("k={k:?} rel err"),
            (got / expected - 1.0).abs(),
            0.02,
        ));
    }
    Ok(checks)
}

/// Least-squares slope of log r against log h.
pub fn fitted_order(ms: &[usize], residuals: &[f64]) -> f64 {
    let xs: Vec<f64> = ms.iter().map(|m| -(*m as f64).ln()).collect();
    let ys: Vec<f64> = residuals.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn theta() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let families: [(usize, &[usize]); 2] = [(1, &[64, 128, 256]), (2, &[32, 64])];
    for (dim, ms) in families {
        let mut residuals = Vec::new();
        for &m in ms {
            let grid = random_field(dim, m, 3, 0.05, 0)?;
            let flow = scalar_flow(dim, m, Scheme::Central2, StepperConfig::default())?;
            let bundle = flow.geometry(&grid)?;
            residuals.push(theta_consistency(&bundle, &AmbientModel::Flat)?);
        }
        checks.push(Check::at_least(
            format!("n={dim} order m={ms:?}"),
            fitted_order(ms, &residuals),
            1.9,
        ));
    }
    Ok(checks)
}

fn max_residual(records: &[lagflow_core::diagnostics::DiagnosticsRecord]) -> Result<f64> {
    Ok(max_abs(&dissipation_check(records)?))
}

fn dissipation() -> Result<Vec<Check>> {
    let t_end = 0.01;
    let mut scalar = Vec::new();
    for m in [32, 64] {
        // max_dt left large so that the CFL step (proportional to h^4) governs
        let config = StepperConfig {
            max_dt: 1.0,
            ..StepperConfig::default()
        };
        let flow = scalar_flow(1, m, Scheme::Central2, config)?;
        let grid = PotentialGrid::from_fn(1, m, |x| 0.05 * x[0].sin())?;
        let run = flow.evolve(FlowState::new(grid), t_end, 10, &mut |_| {})?;
        ensure!(
            run.stop == StopReason::Completed,
            "scalar m={m}: {:?}",
            run.stop
        );
        scalar.push(max_residual(&run.records)?);
    }
    let mut curve = Vec::new();
    for m in [64, 128] {
        let c = perturbed_circle(m, 1.0, 0.05, 3.0)?;
        let config = CurveFlowConfig {
            method: CurveMethod::Rk4,
            diag_every: 10,
            ..CurveFlowConfig::default()
        };
        let run = evolve_curve(&c, t_end, &config, &mut |_, _| {})?;
        ensure!(
            run.stop == CurveStop::Completed,
            "curve m={m}: {:?}",
            run.stop
        );
        curve.push(max_residual(&run.records)?);
    }
    Ok(vec![
        Check::at_least("scalar sine shrink", scalar[0] / scalar[1], 3.5),
        Check::at_least("perturbed circle shrink", curve[0] / curve[1], 3.5),
    ])
}

fn conservation_config() -> CurveFlowConfig {
    imex(5e-5, 1)
}

fn conservation() -> Result<Vec<Check>> {
    let c = perturbed_circle(512, 1.0, 0.05, 3.0)?;
    let run = evolve_curve(&c, 0.5, &conservation_config(), &mut |_, _| {})?;
    ensure!(
        run.stop == CurveStop::Completed,
        "run stopped: {:?}",
        run.stop
    );
    let area = |r: &lagflow_core::diagnostics::DiagnosticsRecord| r.signed_area.unwrap_or(f64::NAN);
    let a0 = area(&run.records[0]);
    let a1 = area(run.records.last().expect("records"));
    let rise = run
        .records
        .windows(2)
        .map(|w| w[1].volume - w[0].volume)
        .fold(0.0, f64::max);
    Ok(vec![
        Check::at_most("area drift", ((a1 - a0) / a0).abs(), 1e-5),
        Check::at_most("max length increase", rise, 1e-9),
    ])
}

fn convergence() -> Result<Vec<Check>> {
    let c = perturbed_circle(512, 1.0, 0.05, 3.0)?;
    let config = CurveFlowConfig {
        diag_every: 1000,
        ..conservation_config()
    };
    let run = evolve_curve(&c, 5.0, &config, &mut |_, _| {})?;
    ensure!(
        run.stop == CurveStop::Completed,
        "run stopped: {:?}",
        run.stop
    );
    let iso = run
        .records
        .last()
        .and_then(|r| r.isoperimetric)
        .context("no final record")?;
    let geom = curve_geometry(&run.curve)?;
    let (lo, hi) = geom
        .kappa
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), k| {
            (a.min(*k), b.max(*k))
        });
    let mean = geom.kappa.iter().sum::<f64>() / geom.kappa.len() as f64;
    Ok(vec![
        Check::at_most("isoperimetric - 1", iso - 1.0, 1e-4),
        Check::at_most("kappa spread", (hi - lo) / mean, 1e-3),
    ])
}

fn blowup() -> Result<Vec<Check>> {
    let t_end = 1.0;
    let c = lemniscate(256, 1.0)?;
    let run = evolve_curve(&c, t_end, &imex(1e-4, 100), &mut |_, _| {})?;
    let time = match run.stop {
        CurveStop::BlowUp { time, .. } => time,
        CurveStop::Completed => f64::INFINITY,
    };
    let mut checks = vec![
        Check::at_least("blow-up time", time, f64::MIN_POSITIVE),
        Check::at_most("blow-up time", time, t_end),
    ];

    let dir = std::env::temp_dir().join(format!("lagflow-blowup-{}", std::process::id()));
    let cfg = parse_config(&format!(
        "mode = curve\ncurve_m = 256\nt_end = {t_end}\nmax_dt = 1e-4\ninit = figure_eight\n"
    ))?;
    let outcome = run::run(&cfg, Some(&dir));
    let summary = std::fs::read_to_string(dir.join("summary.json"));
    let _ = std::fs::remove_dir_all(&dir);
    checks.push(Check::new(
        "exit code",
        outcome?.exit_code() as f64,
        Relation::Equals,
        2.0,
    ));
    let summary: serde_json::Value = serde_json::from_str(&summary?)?;
    let recorded = summary["blowup_time"].as_f64().unwrap_or(f64::NAN);
    checks.push(Check::at_least(
        "summary blowup_time",
        recorded,
        f64::MIN_POSITIVE,
    ));
    Ok(checks)
}

fn meanzero() -> Result<Vec<Check>> {
    let mut worst = 0.0f64;
    for (dim, m) in [(1, 64), (2, 32)] {
        let flow = scalar_flow(dim, m, Scheme::Spectral, StepperConfig::default())?;
        for seed in 0..4 {
            let grid = random_field(dim, m, 3, 0.05, seed)?;
            let bundle = flow.geometry(&grid)?;
            let w = &bundle.metric.vol_elem;
            let div = bundle.div_jh();
            let signed: f64 = div.iter().zip(w).map(|(d, v)| d * v).sum();
            let total: f64 = div.iter().zip(w).map(|(d, v)| d.abs() * v).sum();
            worst = worst.max(signed.abs() / total);
        }
    }
    Ok(vec![Check::at_most(
        "max |int div JH| / int |div JH|",
        worst,
        1e-6,
    )])
}

fn frame() -> Result<Vec<Check>> {
    let (angle, shift) = (0.7, [0.3, -0.2]);
    let c = perturbed_circle(128, 1.0, 0.05, 3.0)?;
    let config = imex(1e-4, 1000);
    let a = evolve_curve(&c, 0.2, &config, &mut |_, _| {})?;
    let b = evolve_curve(&c.transformed(angle, shift), 0.2, &config, &mut |_, _| {})?;
    let moved = a.curve.transformed(angle, shift);
    let gap = moved
        .points()
        .iter()
        .zip(b.curve.points())
        .map(|(p, q)| (p[0] - q[0]).hypot(p[1] - q[1]))
        .fold(0.0, f64::max);
    Ok(vec![Check::at_most("node-wise gap", gap, 1e-8)])
}

/// Smallest graph radius over the nodes, with sup|kappa|.
fn radius_and_curvature(curve: &ClosedCurve) -> Result<(f64, f64)> {
    let geom = curve_geometry(curve)?;
    let r = (0..curve.len())
        .map(|i| graph_radius_estimate(curve, &geom, i))
        .fold(f64::INFINITY, f64::min);
    Ok((r, geom.sup_kappa()))
}

fn graph_radius() -> Result<Vec<Check>> {
    let m = 2048;
    let mut circles = Vec::new();
    for r in [0.5, 1.0, 2.0] {
        circles.push((r, radius_and_curvature(&circle(m, r)?)?));
    }
    let c = circles
        .iter()
        .map(|(_, (rad, k))| rad * (k + 1.0))
        .fold(f64::INFINITY, f64::min);
    let mut checks = vec![Check::at_least("fitted c", c, f64::MIN_POSITIVE)];
    for (r, (rad, k)) in &circles {
        checks.push(Check::at_least(
            format!("circle R={r}"),
            *rad,
            c / (k + 1.0),
        ));
    }
    let ellipse = ClosedCurve::from_fn(m, |t| [2.0 * t.cos(), t.sin()])?;
    let (rad, k) = radius_and_curvature(&ellipse)?;
    checks.push(Check::at_least("ellipse 2x1", rad, c / (k + 1.0)));
    Ok(checks)
}

fn gronwall() -> Result<Vec<Check>> {
    let c = perturbed_circle(256, 1.0, 0.05, 3.0)?;
    let run = evolve_curve(&c, 0.5, &imex(1e-4, 100), &mut |_, _| {})?;
    ensure!(
        run.stop == CurveStop::Completed,
        "run stopped: {:?}",
        run.stop
    );
    let report = gronwall_monitor(&run.records, 2)?;
    Ok(vec![
        Check::at_least("records", run.records.len() as f64, 10.0),
        Check::at_most(
            "sup kappa growth",
            report.sup_a_second_half / report.sup_a_first_half,
            2.0,
        ),
        Check::at_most("worst envelope ratio", report.worst_ratio, 1.0),
        Check::at_least("fitted C", report.fitted_c, 0.0),
    ])
}
