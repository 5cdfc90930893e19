//! Executes a parsed configuration and writes its output files.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use lagflow_core::curve::{evolve_curve, ClosedCurve, CurveFlowConfig, CurveMethod, CurveStop};
use lagflow_core::diagnostics::DiagnosticsRecord;
use lagflow_core::geometry::AmbientModel;
use lagflow_core::scalar_flow::{FlowState, Method, ScalarFlow, StepperConfig, StopReason};
use serde::Serialize;

use crate::config::{Mode, RunConfig};
use crate::output::{self, SCHEMA_VERSION};
use crate::{presets, suites};

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Completed,
    BlowUp { time: f64 },
    SlopeViolation { time: f64, message: String },
    CheckFailed { failed: Vec<String> },
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Completed => 0,
            Self::BlowUp { .. } => 2,
            Self::SlopeViolation { .. } | Self::CheckFailed { .. } => 1,
        }
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    schema_version: u32,
    mode: Mode,
    status: &'static str,
    blowup: bool,
    blowup_time: Option<f64>,
    message: Option<String>,
    steps: u64,
    final_time: f64,
    #[serde(rename = "final")]
    last: Option<&'a DiagnosticsRecord>,
    config: &'a RunConfig,
}

/// Snapshot files `snapshot_<k>.csv`, numbered in order of writing.
struct Snapshots<'a> {
    dir: &'a Path,
    next: usize,
    error: Option<std::io::Error>,
}

impl<'a> Snapshots<'a> {
    fn new(dir: &'a Path) -> Self {
        Self {
            dir,
            next: 0,
            error: None,
        }
    }

    fn write(&mut self, f: impl FnOnce(&Path) -> std::io::Result<()>) {
        if self.error.is_some() {
            return;
        }
        let path = self.dir.join(format!("snapshot_{}.csv", self.next));
        self.next += 1;
        if let Err(e) = f(&path) {
            self.error = Some(e);
        }
    }

    fn finish(self) -> Result<()> {
        match self.error {
            Some(e) => Err(e).context("writing snapshot"),
            None => Ok(()),
        }
    }
}

fn stepper_config(cfg: &RunConfig) -> StepperConfig {
    StepperConfig {
        method: cfg.method,
        cfl_sigma: cfg.cfl_sigma,
        splitting_c: cfg.splitting_c,
        max_dt: cfg.max_dt,
        blowup_threshold: cfg.blowup_threshold,
    }
}

pub fn curve_config(cfg: &RunConfig) -> CurveFlowConfig {
    CurveFlowConfig {
        method: match cfg.method {
            Method::Rk4Explicit => CurveMethod::Rk4,
            Method::ImexSpectral => CurveMethod::Imex,
        },
        cfl_sigma: cfg.cfl_sigma,
        max_dt: cfg.max_dt,
        resample_every: cfg.resample_every,
        blowup_kappa: cfg.blowup_kappa,
        diag_every: cfg.diag_every,
    }
}

/// Run `cfg`, writing into `output_override` when given and into
/// `cfg.output_dir` otherwise.
pub fn run(cfg: &RunConfig, output_override: Option<&Path>) -> Result<Outcome> {
    let dir: PathBuf = output_override.map_or_else(|| cfg.output_dir.clone(), Path::to_path_buf);
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    match cfg.mode {
        Mode::Scalar => run_scalar(cfg, &dir),
        Mode::Curve => run_curve(cfg, &dir),
        Mode::Check => {
            let suite = cfg.suite.as_deref().context("check mode needs a suite")?;
            let report = suites::run_suite(suite)?;
            output::write_json(&dir.join("check.json"), &report)?;
            Ok(report.outcome())
        }
    }
}

fn finish(
    cfg: &RunConfig,
    dir: &Path,
    records: &[DiagnosticsRecord],
    outcome: &Outcome,
    steps: u64,
    final_time: f64,
) -> Result<()> {
    output::write_diagnostics(&dir.join("diagnostics.csv"), records)
        .context("writing diagnostics.csv")?;
    let (status, blowup_time, message) = match outcome {
        Outcome::Completed => ("completed", None, None),
        Outcome::BlowUp { time } => ("blowup", Some(*time), None),
        Outcome::SlopeViolation { message, .. } => ("slope_violation", None, Some(message.clone())),
        Outcome::CheckFailed { .. } => ("check_failed", None, None),
    };
    let summary = Summary {
        schema_version: SCHEMA_VERSION,
        mode: cfg.mode,
        status,
        blowup: blowup_time.is_some(),
        blowup_time,
        message,
        steps,
        final_time,
        last: records.last(),
        config: cfg,
    };
    output::write_json(&dir.join("summary.json"), &summary).context("writing summary.json")
}

fn run_scalar(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let spec = cfg.init.as_ref().context("scalar mode needs init")?;
    let grid = presets::scalar_initial(spec, cfg.dim, cfg.grid_m, cfg.seed)?;
    let flow = ScalarFlow::new(
        cfg.dim,
        cfg.grid_m,
        cfg.scheme,
        AmbientModel::Flat,
        stepper_config(cfg),
    )?;
    let state = FlowState::new(grid);
    let mut snaps = Snapshots::new(dir);
    snaps.write(|p| output::write_scalar_snapshot(p, &state.grid));
    let every = cfg.snapshot_every as u64;
    let run = flow.evolve(state, cfg.t_end, cfg.diag_every, &mut |s| {
        if every > 0 && s.step_count.is_multiple_of(every) {
            snaps.write(|p| output::write_scalar_snapshot(p, &s.grid));
        }
    })?;
    let state = &run.state;
    if every == 0 || !state.step_count.is_multiple_of(every) {
        snaps.write(|p| output::write_scalar_snapshot(p, &state.grid));
    }
    snaps.finish()?;
    let outcome = match &run.stop {
        StopReason::Completed => Outcome::Completed,
        StopReason::BlowUp { time, .. } => Outcome::BlowUp { time: *time },
        StopReason::SlopeViolation { time, message } => Outcome::SlopeViolation {
            time: *time,
            message: message.clone(),
        },
    };
    finish(
        cfg,
        dir,
        &run.records,
        &outcome,
        state.step_count,
        state.time(),
    )?;
    Ok(outcome)
}

fn run_curve(cfg: &RunConfig, dir: &Path) -> Result<Outcome> {
    let spec = cfg.init.as_ref().context("curve mode needs init")?;
    let curve = presets::curve_initial(spec, cfg.curve_m)?;
    let mut snaps = Snapshots::new(dir);
    snaps.write(|p| output::write_curve_snapshot(p, &curve));
    let every = cfg.snapshot_every as u64;
    let run = evolve_curve(
        &curve,
        cfg.t_end,
        &curve_config(cfg),
        &mut |c: &ClosedCurve, step| {
            if every > 0 && step.is_multiple_of(every) {
                snaps.write(|p| output::write_curve_snapshot(p, c));
            }
        },
    )?;
    if every == 0 || !run.steps.is_multiple_of(every) {
        snaps.write(|p| output::write_curve_snapshot(p, &run.curve));
    }
    snaps.finish()?;
    let outcome = match run.stop {
        CurveStop::Completed => Outcome::Completed,
        CurveStop::BlowUp { time, .. } => Outcome::BlowUp { time },
    };
    finish(cfg, dir, &run.records, &outcome, run.steps, run.curve.time)?;
    Ok(outcome)
}
