//! Differential geometry of Lagrangian graphs (x, dphi(x)) in a Darboux chart.

pub mod ambient;
pub mod curvature;
pub mod jets;
pub mod metric;
pub mod second_form;

use std::sync::Arc;

pub use ambient::{slope_constant, AmbientMetric, AmbientModel, ConformalBump, ConstantMetric};
pub use curvature::{
    div_jh, laplace_beltrami, mean_curvature, mean_curvature_covariant, theta_angle,
    MeanCurvatureField,
};
pub use jets::{compute_jets, compute_jets_with, JetField};
pub use metric::{induced_metric, ChartMetric};
pub use second_form::{second_form, second_form_components, second_form_norms, SecondFormField};

use crate::diff::PeriodicDiff;
use crate::error::GeometryError;
use crate::grid::PotentialGrid;
use crate::linalg;

/// Jets, metric and mean curvature (with div JH filled) of one state.
#[derive(Debug, Clone)]
pub struct GeometryBundle {
    pub jets: JetField,
    pub metric: ChartMetric,
    pub mean_curvature: MeanCurvatureField,
}

impl GeometryBundle {
    pub fn compute(
        grid: &PotentialGrid,
        diff: Arc<PeriodicDiff>,
        ambient: &AmbientModel,
    ) -> Result<Self, GeometryError> {
        let jets = compute_jets_with(grid, diff)?;
        let metric = induced_metric(&jets, ambient)?;
        let mut mean_curvature = mean_curvature(&jets, &metric, ambient)?;
        mean_curvature.div_jh = Some(div_jh(&mean_curvature, &metric, &jets));
        Ok(Self {
            jets,
            metric,
            mean_curvature,
        })
    }

    pub fn div_jh(&self) -> &[f64] {
        self.mean_curvature
            .div_jh
            .as_deref()
            .expect("div JH computed")
    }

    /// Laplace-Beltrami of theta, computed from the Hessian eigenvalues.
    pub fn laplace_theta(&self, ambient: &AmbientModel) -> Result<Vec<f64>, GeometryError> {
        let theta = theta_angle(&self.jets, ambient)?;
        Ok(laplace_beltrami(&theta, &self.metric, self.jets.diff()))
    }
}

/// Slope of the tangent plane against the vertical directions at one node:
/// max over unit e in T_pL and unit vertical nu of e.nu, which for the graph
/// of dphi equals s / sqrt(1 + s^2) with s the spectral norm of D^2 phi.
pub fn node_slope(hess: &[f64], n: usize) -> f64 {
    let s = linalg::sym_spectral_norm(hess, n);
    s / (1.0 + s * s).sqrt()
}
