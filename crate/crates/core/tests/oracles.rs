use std::f64::consts::PI;

use lagflow_core::curve::{
    curve_geometry, curve_velocity, evolve_curve, graph_radius_estimate, ClosedCurve,
    CurveFlowConfig, CurveMethod, CurveStop,
};
use lagflow_core::diagnostics::gronwall_monitor;
use lagflow_core::geometry::AmbientModel;
use lagflow_core::scalar_flow::{FlowState, Method, ScalarFlow, StepperConfig, StopReason};
use lagflow_core::{PotentialGrid, Scheme};

fn sine_mode(grid: &PotentialGrid, k: f64) -> f64 {
    let m = grid.m();
    2.0 / m as f64
        * (0..m)
            .map(|i| grid.values()[i] * (k * grid.coords(i)[0]).sin())
            .sum::<f64>()
}

#[test]
fn resolved_modes_decay_at_the_linear_rate() {
    let m = 32;
    for k in 1..=5 {
        let k4 = (k as f64).powi(4);
        let t_end = 1.0 / k4;
        let config = StepperConfig {
            method: Method::ImexSpectral,
            max_dt: t_end / 400.0,
            ..StepperConfig::default()
        };
        let flow = ScalarFlow::new(1, m, Scheme::Spectral, AmbientModel::Flat, config).unwrap();
        let grid = PotentialGrid::from_fn(1, m, |x| 1e-6 * (k as f64 * x[0]).sin()).unwrap();
        let run = flow
            .evolve(FlowState::new(grid), t_end, 1000, &mut |_| {})
            .unwrap();
        let got = sine_mode(&run.state.grid, k as f64) / 1e-6;
        let expected = (-1.0f64).exp();
        assert!(
            (got / expected - 1.0).abs() < 1e-2,
            "k={k}: {got} vs {expected}"
        );
    }
}

#[test]
fn mode_two_decays_sixteen_times_faster_in_log_amplitude() {
    let config = StepperConfig {
        method: Method::ImexSpectral,
        max_dt: 1e-5,
        ..StepperConfig::default()
    };
    let flow = ScalarFlow::new(1, 32, Scheme::Spectral, AmbientModel::Flat, config).unwrap();
    let rate = |k: f64| {
        let grid = PotentialGrid::from_fn(1, 32, |x| 1e-6 * (k * x[0]).sin()).unwrap();
        let run = flow
            .evolve(FlowState::new(grid), 0.01, 1000, &mut |_| {})
            .unwrap();
        -(sine_mode(&run.state.grid, k) / 1e-6).ln() / 0.01
    };
    let ratio = rate(2.0) / rate(1.0);
    assert!((ratio / 16.0 - 1.0).abs() < 1e-2, "{ratio}");
}

#[test]
fn explicit_step_scales_with_h_to_the_fourth() {
    let dt = |m: usize| {
        let flow = ScalarFlow::new(
            1,
            m,
            Scheme::Central2,
            AmbientModel::Flat,
            StepperConfig {
                max_dt: 1.0,
                ..StepperConfig::default()
            },
        )
        .unwrap();
        flow.stable_dt(&FlowState::new(PotentialGrid::zeros(1, m).unwrap()))
            .unwrap()
    };
    let h = 2.0 * PI / 64.0;
    assert!((dt(64) / (0.1 * h.powi(4) / 8.0) - 1.0).abs() < 1e-14);
    assert!((dt(64) / dt(128) / 16.0 - 1.0).abs() < 1e-12);
}

#[test]
fn random_state_volume_is_nonincreasing() {
    let m = 32;
    let grid = PotentialGrid::from_fn(1, m, |x| {
        0.02 * (x[0].sin() + 0.3 * (2.0 * x[0] + 1.0).cos() / 4.0 + 0.1 * (3.0 * x[0]).sin() / 9.0)
    })
    .unwrap();
    let flow = ScalarFlow::new(
        1,
        m,
        Scheme::Central2,
        AmbientModel::Flat,
        StepperConfig {
            max_dt: 1.0,
            ..StepperConfig::default()
        },
    )
    .unwrap();
    let run = flow
        .evolve(FlowState::new(grid), 0.05, 20, &mut |_| {})
        .unwrap();
    assert_eq!(run.stop, StopReason::Completed);
    assert!(run.records.len() > 5);
    for w in run.records.windows(2) {
        assert!(
            w[1].volume <= w[0].volume + 1e-14,
            "{} -> {}",
            w[0].volume,
            w[1].volume
        );
    }
}

#[test]
fn evolution_is_deterministic() {
    let grid = PotentialGrid::from_fn(2, 16, |x| 0.01 * (x[0] + 2.0 * x[1]).sin()).unwrap();
    for method in [Method::Rk4Explicit, Method::ImexSpectral] {
        let flow = ScalarFlow::new(
            2,
            16,
            Scheme::Spectral,
            AmbientModel::Flat,
            StepperConfig {
                method,
                ..StepperConfig::default()
            },
        )
        .unwrap();
        let a = flow
            .evolve(FlowState::new(grid.clone()), 0.002, 5, &mut |_| {})
            .unwrap();
        let b = flow
            .evolve(FlowState::new(grid.clone()), 0.002, 5, &mut |_| {})
            .unwrap();
        assert_eq!(a.state, b.state);
        assert_eq!(a.records, b.records);
    }
}

fn ellipse(m: usize) -> ClosedCurve {
    ClosedCurve::from_fn(m, |t| [2.0 * t.cos(), t.sin()]).unwrap()
}

#[test]
fn ellipse_geometry() {
    let g = curve_geometry(&ellipse(1024)).unwrap();
    assert!((g.kappa[0] - 2.0).abs() < 1e-3 * 2.0);
    // fine-polygon shoelace oracle
    let fine = 1 << 16;
    let area: f64 = (0..fine)
        .map(|i| {
            let (t0, t1) = (
                2.0 * PI * i as f64 / fine as f64,
                2.0 * PI * (i + 1) as f64 / fine as f64,
            );
            0.5 * (2.0 * t0.cos() * t1.sin() - 2.0 * t1.cos() * t0.sin())
        })
        .sum();
    assert!((g.signed_area - area).abs() < 1e-3);
    assert!((area - 2.0 * PI).abs() < 1e-6);
}

#[test]
fn ellipse_velocity_is_symmetric_under_axis_reflections() {
    let m = 256;
    let v = curve_velocity(&curve_geometry(&ellipse(m)).unwrap());
    let scale = v.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for i in 0..m {
        // node i at angle t reflects to -t (x-axis) and pi - t (y-axis)
        let x_axis = (m - i) % m;
        let y_axis = (m / 2 + m - i) % m;
        assert!((v[i] - v[x_axis]).abs() <= 1e-8 * scale);
        assert!((v[i] - v[y_axis]).abs() <= 1e-8 * scale);
    }
}

#[test]
fn perturbed_circle_velocity_is_linear_in_the_amplitude() {
    let m = 128;
    let velocity = |delta: f64| {
        let c = ClosedCurve::from_fn(m, |t| {
            let r = 1.0 + delta * (2.0 * t).cos();
            [r * t.cos(), r * t.sin()]
        })
        .unwrap();
        curve_velocity(&curve_geometry(&c).unwrap())
    };
    let (d, small) = (1e-4, 5e-5);
    let (a, b) = (velocity(d), velocity(small));
    // r = 1 + delta cos(k t) has kappa_ss = -delta k^2 (k^2 - 1) cos(k t) to first
    // order, so the speed along the inward normal is 12 delta cos(2t)
    for i in 0..m {
        let t = 2.0 * PI * i as f64 / m as f64;
        let expected = 12.0 * (2.0 * t).cos();
        assert!(
            (a[i] / d - expected).abs() < 2e-2 * 12.0,
            "{} vs {expected}",
            a[i] / d
        );
        assert!((a[i] / d - b[i] / small).abs() < 1e-2, "linear response");
    }
}

#[test]
fn turning_number_is_invariant_along_a_smooth_run() {
    let c = ClosedCurve::from_fn(128, |t| {
        let r = 1.0 + 0.05 * (3.0 * t).cos();
        [r * t.cos(), r * t.sin()]
    })
    .unwrap();
    let config = CurveFlowConfig {
        method: CurveMethod::Imex,
        max_dt: 1e-4,
        ..CurveFlowConfig::default()
    };
    // the discrete total curvature is the sum of exterior angles
    let mut worst = 0.0f64;
    let mut steps = 0;
    evolve_curve(&c, 0.05, &config, &mut |c, _| {
        let g = curve_geometry(c).unwrap();
        worst = worst.max((g.turning_number() - 1.0).abs());
        steps += 1;
    })
    .unwrap();
    assert!(steps >= 500);
    assert!(worst < 1e-6, "{worst}");
}

#[test]
fn circle_diagnostics_stay_constant() {
    let c = ClosedCurve::from_fn(64, |t| [t.cos(), t.sin()]).unwrap();
    let config = CurveFlowConfig {
        method: CurveMethod::Imex,
        max_dt: 1e-3,
        diag_every: 50,
        ..CurveFlowConfig::default()
    };
    let run = evolve_curve(&c, 1.0, &config, &mut |_, _| {}).unwrap();
    assert_eq!(run.stop, CurveStop::Completed);
    let first = &run.records[0];
    for r in &run.records {
        assert!((r.volume - first.volume).abs() < 1e-6);
        assert!((r.a_norms[0] - first.a_norms[0]).abs() < 1e-6);
        assert!((r.signed_area.unwrap() - first.signed_area.unwrap()).abs() < 1e-6);
    }
}

#[test]
fn figure_eight_monitor_abstains_past_blowup_onset() {
    let m = 256;
    let c = ClosedCurve::from_fn(m, |t| {
        let d = 1.0 + t.sin().powi(2);
        [t.cos() / d, t.sin() * t.cos() / d]
    })
    .unwrap();
    let config = CurveFlowConfig {
        method: CurveMethod::Imex,
        max_dt: 1e-4,
        diag_every: 200,
        ..CurveFlowConfig::default()
    };
    let run = evolve_curve(&c, 1.0, &config, &mut |_, _| {}).unwrap();
    assert!(matches!(run.stop, CurveStop::BlowUp { time, .. } if time > 0.0));
    let report = gronwall_monitor(&run.records, 2).unwrap();
    assert_eq!(report.passed, None, "{report:?}");
}

#[test]
fn straight_line_limit_of_the_graph_radius() {
    // huge radius: nearly straight at the node spacing
    let m = 256;
    let r = 1e4;
    let c = ClosedCurve::from_fn(m, |t| [r * t.cos(), r * t.sin()]).unwrap();
    let g = curve_geometry(&c).unwrap();
    let est = graph_radius_estimate(&c, &g, 0);
    let exact = r * (0.1f64).atan().sin();
    assert!((est / exact - 1.0).abs() < 1e-2, "{est} vs {exact}");
    let c_fit = 0.14;
    assert!(est >= c_fit / (g.sup_kappa() + 1.0));
}
