//! Time integration of phi_t = div(JH) on the periodic chart.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{self, DiagnosticsRecord};
use crate::diff::{NdFft, PeriodicDiff, Scheme};
use crate::error::FlowError;
use crate::geometry::{second_form_components, second_form_norms, AmbientModel, GeometryBundle};
use crate::grid::PotentialGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Rk4Explicit,
    ImexSpectral,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Self::Rk4Explicit => "rk4_explicit",
            Self::ImexSpectral => "imex_spectral",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rk4_explicit" | "rk4" => Ok(Self::Rk4Explicit),
            "imex_spectral" | "imex" => Ok(Self::ImexSpectral),
            other => Err(format!(
                "unknown method `{other}` (rk4_explicit, imex_spectral)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub method: Method,
    pub cfl_sigma: f64,
    /// Lower bound on the IMEX splitting weight; the weight actually used is
    /// max(splitting_c, max_node |g^-1|^2) refreshed every step.
    pub splitting_c: f64,
    pub max_dt: f64,
    pub blowup_threshold: f64,
}

impl Default for StepperConfig {
    fn default() -> Self {
        Self {
            method: Method::Rk4Explicit,
            cfl_sigma: 0.1,
            splitting_c: 1.0,
            max_dt: 1e-3,
            blowup_threshold: 1e3,
        }
    }
}

impl StepperConfig {
    pub fn validate(&self) -> Result<(), FlowError> {
        if !(self.cfl_sigma > 0.0 && self.cfl_sigma <= 1.0) {
            return Err(FlowError::InvalidConfig(format!(
                "cfl_sigma must lie in (0, 1], got {}",
                self.cfl_sigma
            )));
        }
        if !(self.splitting_c >= 1.0) || !self.splitting_c.is_finite() {
            return Err(FlowError::InvalidConfig(format!(
                "splitting_c must be >= 1, got {}",
                self.splitting_c
            )));
        }
        if !(self.max_dt > 0.0) || !self.max_dt.is_finite() {
            return Err(FlowError::InvalidConfig(format!(
                "max_dt must be positive, got {}",
                self.max_dt
            )));
        }
        if !(self.blowup_threshold > 0.0) {
            return Err(FlowError::InvalidConfig(format!(
                "blowup_threshold must be positive, got {}",
                self.blowup_threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub grid: PotentialGrid,
    pub step_count: u64,
    pub last_dt: f64,
}

impl FlowState {
    pub fn new(grid: PotentialGrid) -> Self {
        Self {
            grid,
            step_count: 0,
            last_dt: 0.0,
        }
    }

    pub fn time(&self) -> f64 {
        self.grid.time
    }
}

/// Why an evolution run ended.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StopReason {
    Completed,
    BlowUp { time: f64, sup_a: f64 },
    SlopeViolation { time: f64, message: String },
}

#[derive(Debug, Clone)]
pub struct ScalarRun {
    pub state: FlowState,
    pub records: Vec<DiagnosticsRecord>,
    pub stop: StopReason,
}

/// Scalar flow solver bound to one lattice, scheme and ambient model.
#[derive(Debug, Clone)]
pub struct ScalarFlow {
    diff: Arc<PeriodicDiff>,
    ambient: AmbientModel,
    config: StepperConfig,
    fft: Option<NdFft>,
}

impl ScalarFlow {
    pub fn new(
        dim: usize,
        m: usize,
        scheme: Scheme,
        ambient: AmbientModel,
        config: StepperConfig,
    ) -> Result<Self, FlowError> {
        config.validate()?;
        // validates dim and m
        PotentialGrid::zeros(dim, m)?;
        let fft = (config.method == Method::ImexSpectral).then(|| NdFft::new(dim, m));
        Ok(Self {
            diff: Arc::new(PeriodicDiff::new(dim, m, scheme)),
            ambient,
            config,
            fft,
        })
    }

    pub fn config(&self) -> &StepperConfig {
        &self.config
    }

    pub fn ambient(&self) -> &AmbientModel {
        &self.ambient
    }

    pub fn diff(&self) -> Arc<PeriodicDiff> {
        Arc::clone(&self.diff)
    }

    pub fn scheme(&self) -> Scheme {
        self.diff.scheme()
    }

    fn check_shape(&self, grid: &PotentialGrid) -> Result<(), FlowError> {
        if grid.dim() != self.diff.dim() || grid.m() != self.diff.m() {
            return Err(FlowError::InvalidConfig(format!(
                "state is {}d with m = {}, solver expects {}d with m = {}",
                grid.dim(),
                grid.m(),
                self.diff.dim(),
                self.diff.m()
            )));
        }
        Ok(())
    }

    /// Geometry of a state after checking the slope condition.
    pub fn geometry(&self, grid: &PotentialGrid) -> Result<GeometryBundle, FlowError> {
        self.check_shape(grid)?;
        let bundle = GeometryBundle::compute(grid, self.diff(), &self.ambient)?;
        let slope = diagnostics::slope_check(&bundle.jets);
        if slope.margin < 0.0 {
            return Err(FlowError::SlopeViolation {
                node: slope.node,
                hessian_norm: slope.hessian_norm,
                margin: slope.margin,
            });
        }
        Ok(bundle)
    }

    /// The velocity potential div(JH) of the current state.
    pub fn rhs(&self, state: &FlowState) -> Result<Vec<f64>, FlowError> {
        Ok(self.geometry(&state.grid)?.div_jh().to_vec())
    }

    fn raw_rhs(&self, grid: &PotentialGrid) -> Result<Vec<f64>, FlowError> {
        let bundle = GeometryBundle::compute(grid, self.diff(), &self.ambient)?;
        Ok(bundle.mean_curvature.div_jh.expect("div JH computed"))
    }

    fn dt_from_bundle(&self, bundle: &GeometryBundle) -> f64 {
        let n = self.diff.dim() as f64;
        let h = self.diff.spacing();
        let dt =
            self.config.cfl_sigma * h.powi(4) / (8.0 * n * n * bundle.metric.max_g_inv_norm_sq());
        dt.min(self.config.max_dt)
    }

    /// Explicit CFL step: sigma h^4 / (8 n^2 max |g^-1|^2), capped by max_dt.
    pub fn stable_dt(&self, state: &FlowState) -> Result<f64, FlowError> {
        Ok(self.dt_from_bundle(&self.geometry(&state.grid)?))
    }

    fn check_blowup(&self, bundle: &GeometryBundle, time: f64) -> Result<(), FlowError> {
        let a = second_form_components(&bundle.jets, &self.ambient)?;
        let sup_a = second_form_norms(&a, &bundle.metric)
            .into_iter()
            .fold(0.0, f64::max);
        if !(sup_a <= self.config.blowup_threshold) {
            return Err(FlowError::BlowUp { time, sup_a });
        }
        Ok(())
    }

    /// Advance by `dt`. Blow-up and slope violations are checked on the
    /// incoming state.
    pub fn step(&self, state: &FlowState, dt: f64) -> Result<FlowState, FlowError> {
        let bundle = self.geometry(&state.grid)?;
        self.check_blowup(&bundle, state.time())?;
        let k1 = bundle.div_jh().to_vec();
        let phi = state.grid.values();
        let next_values = match self.config.method {
            Method::Rk4Explicit => {
                let stage = |k: &[f64], w: f64| -> Result<Vec<f64>, FlowError> {
                    let mut g = state.grid.clone();
                    for (v, kv) in g.values_mut().iter_mut().zip(k) {
                        *v += w * dt * kv;
                    }
                    self.raw_rhs(&g)
                };
                let k2 = stage(&k1, 0.5)?;
                let k3 = stage(&k2, 0.5)?;
                let k4 = stage(&k3, 1.0)?;
                (0..phi.len())
                    .map(|i| phi[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
                    .collect()
            }
            Method::ImexSpectral => {
                let fft = self.fft.as_ref().expect("IMEX transform planned");
                let c = self
                    .config
                    .splitting_c
                    .max(bundle.metric.max_g_inv_norm_sq());
                let phi_hat = fft.forward(phi);
                let r_hat = fft.forward(&k1);
                let out: Vec<Complex64> = fft
                    .wavenumber_sq()
                    .into_iter()
                    .zip(phi_hat.iter().zip(&r_hat))
                    .map(|(k2, (p, r))| {
                        let sym = c * k2 * k2;
                        (p + dt * (r + p * sym)) / (1.0 + dt * sym)
                    })
                    .collect();
                fft.inverse(out)
            }
        };
        let mut grid = state.grid.clone();
        grid.set_values(next_values);
        grid.time = state.time() + dt;
        grid.validate()?;
        Ok(FlowState {
            grid,
            step_count: state.step_count + 1,
            last_dt: dt,
        })
    }

    fn next_dt(&self, state: &FlowState) -> Result<f64, FlowError> {
        match self.config.method {
            Method::Rk4Explicit => self.stable_dt(state),
            Method::ImexSpectral => Ok(self.config.max_dt),
        }
    }

    /// Step until `t_end`, recording diagnostics every `diag_every` steps
    /// (and at both ends). Blow-up and slope violations end the run early
    /// with the records gathered so far.
    pub fn evolve(
        &self,
        state: FlowState,
        t_end: f64,
        diag_every: usize,
        observer: &mut dyn FnMut(&FlowState),
    ) -> Result<ScalarRun, FlowError> {
        if !(t_end > state.time()) {
            return Err(FlowError::InvalidEndTime {
                time: state.time(),
                t_end,
            });
        }
        let diag_every = diag_every.max(1) as u64;
        let mut records = vec![self.snapshot(&state)?];
        let mut state = state;
        let mut last_recorded = state.step_count;
        let tol = 1e-12 * t_end.abs().max(1.0);
        let stop = loop {
            if state.time() >= t_end - tol {
                break StopReason::Completed;
            }
            let dt = match self.next_dt(&state) {
                Ok(dt) => dt.min(t_end - state.time()),
                Err(e) => break stop_from(e, state.time())?,
            };
            match self.step(&state, dt) {
                Ok(next) => state = next,
                Err(e) => break stop_from(e, state.time())?,
            }
            observer(&state);
            if state.step_count.is_multiple_of(diag_every) {
                if let Ok(rec) = self.snapshot(&state) {
                    records.push(rec);
                    last_recorded = state.step_count;
                }
            }
        };
        if last_recorded != state.step_count {
            if let Ok(rec) = self.snapshot(&state) {
                records.push(rec);
            }
        }
        Ok(ScalarRun {
            state,
            records,
            stop,
        })
    }

    pub fn snapshot(&self, state: &FlowState) -> Result<DiagnosticsRecord, FlowError> {
        let bundle = GeometryBundle::compute(&state.grid, self.diff(), &self.ambient)?;
        Ok(diagnostics::snapshot_scalar(
            state.time(),
            &bundle,
            &self.ambient,
        )?)
    }

    /// Linear response of the rhs to eps cos(k.x), projected on cos(k.x).
    pub fn symbol_probe(&self, state: &FlowState, k: &[i64], eps: f64) -> Result<f64, FlowError> {
        let grid = &state.grid;
        self.check_shape(grid)?;
        if k.len() != grid.dim() {
            return Err(FlowError::InvalidConfig(format!(
                "wavevector has {} components for a {}d grid",
                k.len(),
                grid.dim()
            )));
        }
        let base = self.rhs(state)?;
        let mode: Vec<f64> = (0..grid.node_count())
            .map(|idx| {
                let x = grid.coords(idx);
                x.iter()
                    .zip(k)
                    .map(|(xi, ki)| xi * *ki as f64)
                    .sum::<f64>()
                    .cos()
            })
            .collect();
        let mut perturbed = grid.clone();
        for (v, c) in perturbed.values_mut().iter_mut().zip(&mode) {
            *v += eps * c;
        }
        let resp = self.raw_rhs(&perturbed)?;
        let num: f64 = resp
            .iter()
            .zip(&base)
            .zip(&mode)
            .map(|((r, b), c)| (r - b) / eps * c)
            .sum();
        let den: f64 = mode.iter().map(|c| c * c).sum();
        Ok(num / den)
    }

    /// Principal part -g^ap g^ij phi_apij of the rhs.
    pub fn principal_part(&self, bundle: &GeometryBundle) -> Vec<f64> {
        let n = bundle.jets.dim;
        (0..bundle.jets.nodes)
            .map(|node| {
                let gi = bundle.metric.g_inv_at(node);
                let d4 = bundle.jets.d4_at(node);
                let mut acc = 0.0;
                for a in 0..n {
                    for p in 0..n {
                        for i in 0..n {
                            for j in 0..n {
                                acc -= gi[a * n + p]
                                    * gi[i * n + j]
                                    * d4[((a * n + p) * n + i) * n + j];
                            }
                        }
                    }
                }
                acc
            })
            .collect()
    }
}

fn stop_from(err: FlowError, time: f64) -> Result<StopReason, FlowError> {
    match err {
        FlowError::BlowUp { time, sup_a } => Ok(StopReason::BlowUp { time, sup_a }),
        e @ FlowError::SlopeViolation { .. } => Ok(StopReason::SlopeViolation {
            time,
            message: e.to_string(),
        }),
        e => Err(e),
    }
}
