//! Initial-data presets.

use anyhow::{bail, Result};
use lagflow_core::curve::ClosedCurve;
use lagflow_core::PotentialGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::InitSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Scalar,
    Curve,
}

#[derive(Debug, Clone, Copy)]
pub struct Preset {
    pub name: &'static str,
    pub kind: Kind,
    /// Parameter names with defaults.
    pub params: &'static [(&'static str, f64)],
    pub about: &'static str,
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "zero",
        kind: Kind::Scalar,
        params: &[],
        about: "zero section, phi = 0",
    },
    Preset {
        name: "sine",
        kind: Kind::Scalar,
        params: &[("k", 1.0), ("amp", 1e-6), ("axis", 0.0)],
        about: "phi = amp sin(k x_axis)",
    },
    Preset {
        name: "quadratic",
        kind: Kind::Scalar,
        params: &[("c", 0.05), ("c12", 0.0)],
        about: "phi = x.Q.x / 2 with Q = c I plus c12 off the diagonal",
    },
    Preset {
        name: "random",
        kind: Kind::Scalar,
        params: &[("modes", 3.0), ("amp", 0.01)],
        about: "seeded band-limited field with wavenumbers |k_i| <= modes",
    },
    Preset {
        name: "circle",
        kind: Kind::Curve,
        params: &[("r", 1.0)],
        about: "circle of radius r, counter-clockwise",
    },
    Preset {
        name: "ellipse",
        kind: Kind::Curve,
        params: &[("a", 2.0), ("b", 1.0)],
        about: "ellipse with semi-axes a, b",
    },
    Preset {
        name: "perturbed_circle",
        kind: Kind::Curve,
        params: &[("r", 1.0), ("amp", 0.05), ("wave", 3.0)],
        about: "polar curve r (1 + amp cos(wave t))",
    },
    Preset {
        name: "figure_eight",
        kind: Kind::Curve,
        params: &[("scale", 1.0)],
        about: "lemniscate of Bernoulli with half-width scale",
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn int_param(spec: &InitSpec, key: &str, default: f64) -> Result<i64> {
    let v = spec.param(key, default);
    if v.fract() != 0.0 {
        bail!(
            "preset `{}`: `{key}` must be an integer, got {v}",
            spec.name
        );
    }
    Ok(v as i64)
}

/// Band-limited field amp / N * sum (a_k cos(k.x) + b_k sin(k.x)) / |k|^2
/// over half of the wavevectors with 0 < max |k_i| <= modes.
pub fn random_field(
    dim: usize,
    m: usize,
    modes: usize,
    amp: f64,
    seed: u64,
) -> Result<PotentialGrid> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = 2 * modes as i64 + 1;
    let mut terms: Vec<(Vec<f64>, f64, f64)> = Vec::new();
    for idx in 0..side.pow(dim as u32) {
        let k: Vec<i64> = (0..dim)
            .map(|a| (idx / side.pow(a as u32)) % side - modes as i64)
            .collect();
        // keep one of each +-k pair
        match k.iter().find(|v| **v != 0) {
            Some(v) if *v > 0 => {}
            _ => continue,
        }
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        terms.push((k.iter().map(|v| *v as f64).collect(), a, b));
    }
    let norm = amp / terms.len().max(1) as f64;
    Ok(PotentialGrid::from_fn(dim, m, |x| {
        terms
            .iter()
            .map(|(k, a, b)| {
                let phase: f64 = k.iter().zip(x).map(|(ki, xi)| ki * xi).sum();
                let k2: f64 = k.iter().map(|v| v * v).sum();
                (a * phase.cos() + b * phase.sin()) / k2
            })
            .sum::<f64>()
            * norm
    })?)
}

pub fn scalar_initial(spec: &InitSpec, dim: usize, m: usize, seed: u64) -> Result<PotentialGrid> {
    let grid = match spec.name.as_str() {
        "zero" => PotentialGrid::zeros(dim, m)?,
        "sine" => {
            let k = spec.param("k", 1.0);
            let amp = spec.param("amp", 1e-6);
            let axis = int_param(spec, "axis", 0.0)?;
            if axis < 0 || axis as usize >= dim {
                bail!("preset `sine`: axis {axis} out of range for dim {dim}");
            }
            PotentialGrid::from_fn(dim, m, |x| amp * (k * x[axis as usize]).sin())?
        }
        "quadratic" => {
            let c = spec.param("c", 0.05);
            let c12 = spec.param("c12", 0.0);
            let mut q = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    q[i * dim + j] = if i == j { c } else { c12 };
                }
            }
            PotentialGrid::zeros(dim, m)?.with_background_hessian(q)
        }
        "random" => {
            let modes = int_param(spec, "modes", 3.0)?;
            if modes < 1 {
                bail!("preset `random`: modes must be at least 1");
            }
            random_field(dim, m, modes as usize, spec.param("amp", 0.01), seed)?
        }
        other => bail!("`{other}` is not a scalar preset"),
    };
    Ok(grid)
}

pub fn lemniscate(m: usize, scale: f64) -> Result<ClosedCurve> {
    Ok(ClosedCurve::from_fn(m, |t| {
        let d = 1.0 + t.sin().powi(2);
        [scale * t.cos() / d, scale * t.sin() * t.cos() / d]
    })?)
}

pub fn perturbed_circle(m: usize, r: f64, amp: f64, wave: f64) -> Result<ClosedCurve> {
    Ok(ClosedCurve::from_fn(m, |t| {
        let rho = r * (1.0 + amp * (wave * t).cos());
        [rho * t.cos(), rho * t.sin()]
    })?)
}

pub fn curve_initial(spec: &InitSpec, m: usize) -> Result<ClosedCurve> {
    let curve = match spec.name.as_str() {
        "circle" => {
            let r = spec.param("r", 1.0);
            ClosedCurve::from_fn(m, |t| [r * t.cos(), r * t.sin()])?
        }
        "ellipse" => {
            let (a, b) = (spec.param("a", 2.0), spec.param("b", 1.0));
            ClosedCurve::from_fn(m, |t| [a * t.cos(), b * t.sin()])?
        }
        "perturbed_circle" => perturbed_circle(
            m,
            spec.param("r", 1.0),
            spec.param("amp", 0.05),
            spec.param("wave", 3.0),
        )?,
        "figure_eight" => lemniscate(m, spec.param("scale", 1.0))?,
        other => bail!("`{other}` is not a curve preset"),
    };
    Ok(curve)
}

/// Human-readable preset table.
pub fn listing() -> String {
    let mut out = String::new();
    for (kind, title) in [(Kind::Scalar, "scalar"), (Kind::Curve, "curve")] {
        out.push_str(&format!("{title} presets:\n"));
        for p in PRESETS.iter().filter(|p| p.kind == kind) {
            let params: Vec<String> = p.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
            out.push_str(&format!(
                "  {:<18} {:<28} {}\n",
                p.name,
                params.join(" "),
                p.about
            ));
        }
    }
    out
}
