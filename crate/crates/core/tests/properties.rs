use std::f64::consts::PI;
use std::sync::Arc;

use lagflow_core::curve::{
    curve_geometry, curve_velocity, resample_arclength, spline_length, ClosedCurve,
};
use lagflow_core::diagnostics::{slope_check, snapshot_scalar};
use lagflow_core::diff::PeriodicDiff;
use lagflow_core::geometry::{compute_jets, AmbientModel, GeometryBundle};
use lagflow_core::grid::shift_field;
use lagflow_core::scalar_flow::{FlowState, ScalarFlow, StepperConfig};
use lagflow_core::{PotentialGrid, Scheme};
use proptest::prelude::*;

/// Band-limited trigonometric potential: sum of amp (a cos + b sin)(k.x) / |k|^2.
#[derive(Debug, Clone)]
struct Modes(Vec<([i64; 2], f64, f64)>);

fn modes() -> impl Strategy<Value = Modes> {
    prop::collection::vec(
        ((-3i64..=3, -3i64..=3), -1.0f64..1.0, -1.0f64..1.0)
            .prop_filter("nonzero wavevector", |((a, b), _, _)| *a != 0 || *b != 0)
            .prop_map(|((a, b), c, s)| ([a, b], c, s)),
        1..5,
    )
    .prop_map(Modes)
}

fn field(dim: usize, m: usize, modes: &Modes, amp: f64) -> PotentialGrid {
    PotentialGrid::from_fn(dim, m, |x| {
        modes
            .0
            .iter()
            .map(|(k, a, b)| {
                let k = &k[..dim];
                let k2: f64 = k.iter().map(|v| (v * v) as f64).sum();
                if k2 == 0.0 {
                    return 0.0;
                }
                let phase: f64 = k.iter().zip(x).map(|(ki, xi)| *ki as f64 * xi).sum();
                (a * phase.cos() + b * phase.sin()) / k2
            })
            .sum::<f64>()
            * amp
    })
    .unwrap()
}

fn bundle(grid: &PotentialGrid, scheme: Scheme) -> GeometryBundle {
    let diff = Arc::new(PeriodicDiff::new(grid.dim(), grid.m(), scheme));
    GeometryBundle::compute(grid, diff, &AmbientModel::Flat).unwrap()
}

fn scheme() -> impl Strategy<Value = Scheme> {
    prop_oneof![
        Just(Scheme::Central2),
        Just(Scheme::Central4),
        Just(Scheme::Spectral)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn lattice_shifts_commute_with_geometry(
        modes in modes(),
        dim in 1usize..=2,
        s0 in -20isize..20,
        s1 in -20isize..20,
        central4 in any::<bool>(),
    ) {
        let m = 16;
        let scheme = if central4 { Scheme::Central4 } else { Scheme::Central2 };
        let grid = field(dim, m, &modes, 0.02);
        let shift = &[s0, s1][..dim];
        let a = bundle(&grid, scheme);
        let b = bundle(&grid.shifted(shift), scheme);
        prop_assert_eq!(b.div_jh(), &shift_field(a.div_jh(), 1, dim, m, shift)[..]);
        prop_assert_eq!(&b.metric.g, &shift_field(&a.metric.g, dim * dim, dim, m, shift));
        prop_assert_eq!(
            &b.mean_curvature.h_comp,
            &shift_field(&a.mean_curvature.h_comp, dim, dim, m, shift)
        );
    }

    #[test]
    fn spectral_geometry_commutes_with_shifts_to_roundoff(
        modes in modes(),
        dim in 1usize..=2,
        s0 in -20isize..20,
        s1 in -20isize..20,
    ) {
        let m = 16;
        let grid = field(dim, m, &modes, 0.02);
        let shift = &[s0, s1][..dim];
        let a = bundle(&grid, Scheme::Spectral);
        let b = bundle(&grid.shifted(shift), Scheme::Spectral);
        let moved = shift_field(a.div_jh(), 1, dim, m, shift);
        let scale = moved.iter().fold(1e-300f64, |s, v| s.max(v.abs()));
        for (x, y) in b.div_jh().iter().zip(&moved) {
            prop_assert!((x - y).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn flat_metric_is_identity_plus_hessian_squared(modes in modes(), dim in 1usize..=2, scheme in scheme()) {
        let grid = field(dim, 16, &modes, 0.05);
        let b = bundle(&grid, scheme);
        for node in 0..grid.node_count() {
            let d2 = b.jets.d2_at(node);
            let mut expected = vec![0.0; dim * dim];
            for i in 0..dim {
                for j in 0..dim {
                    let mut acc = if i == j { 1.0 } else { 0.0 };
                    for k in 0..dim {
                        acc += d2[i * dim + k] * d2[k * dim + j];
                    }
                    expected[i * dim + j] = acc;
                }
            }
            prop_assert_eq!(b.metric.g_at(node), &expected[..]);
        }
    }

    #[test]
    fn third_jet_is_fully_symmetric(modes in modes(), scheme in scheme()) {
        let n = 2;
        let jets = compute_jets(&field(n, 16, &modes, 0.05), scheme).unwrap();
        for node in 0..jets.nodes {
            let d3 = jets.d3_at(node);
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = d3[(i * n + j) * n + k];
                        prop_assert_eq!(v, d3[(j * n + i) * n + k]);
                        prop_assert_eq!(v, d3[(k * n + j) * n + i]);
                        prop_assert_eq!(v, d3[(i * n + k) * n + j]);
                    }
                }
            }
        }
    }

    /// The explicit step is a nonincreasing function of max |g^-1|^2.
    #[test]
    fn stable_dt_is_monotone_in_inverse_metric(
        a in modes(),
        b in modes(),
        amp_a in 0.0f64..0.02,
        amp_b in 0.0f64..0.02,
        dim in 1usize..=2,
    ) {
        let m = 16;
        let flow = ScalarFlow::new(dim, m, Scheme::Central2, AmbientModel::Flat, StepperConfig {
            max_dt: 1.0,
            ..StepperConfig::default()
        }).unwrap();
        let mut seen = Vec::new();
        for (modes, amp) in [(&a, amp_a), (&b, amp_b)] {
            let state = FlowState::new(field(dim, m, modes, amp));
            let bundle = flow.geometry(&state.grid).unwrap();
            seen.push((bundle.metric.max_g_inv_norm_sq(), flow.stable_dt(&state).unwrap()));
        }
        let (lo, hi) = if seen[0].0 <= seen[1].0 { (seen[0], seen[1]) } else { (seen[1], seen[0]) };
        prop_assert!(hi.1 <= lo.1);
    }

    #[test]
    fn slope_margin_is_monotone_under_scaling(modes in modes(), dim in 1usize..=2, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let (small, large) = if s <= t { (s, t) } else { (t, s) };
        let grid = field(dim, 16, &modes, 0.05);
        let margin = |scale: f64| {
            let mut g = grid.clone();
            g.values_mut().iter_mut().for_each(|v| *v *= scale);
            slope_check(&compute_jets(&g, Scheme::Central2).unwrap()).margin
        };
        prop_assert!(margin(large) <= margin(small));
    }

    #[test]
    fn snapshot_is_pure_and_signed_quantities_hold(modes in modes(), dim in 1usize..=2, scheme in scheme()) {
        let grid = field(dim, 16, &modes, 0.02);
        let a = snapshot_scalar(0.5, &bundle(&grid, scheme), &AmbientModel::Flat).unwrap();
        let b = snapshot_scalar(0.5, &bundle(&grid.clone(), scheme), &AmbientModel::Flat).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.volume > 0.0);
        prop_assert!(a.dissipation >= 0.0);
        prop_assert!(a.a_norms.iter().all(|v| *v >= 0.0));
    }

    /// Node sums of trigonometric polynomials of degree below m/2 against the
    /// uniform circle measure equal the mean term exactly.
    #[test]
    fn curve_quadrature_is_exact_on_trigonometric_polynomials(
        coeffs in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..10),
        mean in -1.0f64..1.0,
        r in 0.5f64..3.0,
    ) {
        let m = 64;
        let c = ClosedCurve::from_fn(m, |t| [r * t.cos(), r * t.sin()]).unwrap();
        let geom = curve_geometry(&c).unwrap();
        let f = |i: usize| {
            let t = 2.0 * PI * i as f64 / m as f64;
            mean + coeffs
                .iter()
                .enumerate()
                .map(|(k, (a, b))| a * ((k + 1) as f64 * t).cos() + b * ((k + 1) as f64 * t).sin())
                .sum::<f64>()
        };
        let total: f64 = geom.speed.iter().sum();
        prop_assert!((geom.integrate(f) - mean * total).abs() <= 1e-12 * total);
    }

    #[test]
    fn curve_velocity_is_rigid_motion_invariant(
        amp in 0.0f64..0.1,
        wave in 2u32..6,
        angle in -PI..PI,
        dx in -5.0f64..5.0,
        dy in -5.0f64..5.0,
    ) {
        let c = ClosedCurve::from_fn(64, |t| {
            let r = 1.0 + amp * (wave as f64 * t).cos();
            [r * t.cos(), r * t.sin()]
        })
        .unwrap();
        let v = curve_velocity(&curve_geometry(&c).unwrap());
        let w = curve_velocity(&curve_geometry(&c.transformed(angle, [dx, dy])).unwrap());
        let scale = v.iter().fold(1.0f64, |s, x| s.max(x.abs()));
        for (a, b) in v.iter().zip(&w) {
            prop_assert!((a - b).abs() <= 1e-8 * scale, "{} vs {}", a, b);
        }
    }

    /// Length is read off the interpolating spline: the chord sum of the
    /// original, non-uniform nodes carries its own O(h^2) bias.
    #[test]
    fn resampling_preserves_length(amp in 0.0f64..0.05, wave in 2u32..4, r in 0.5f64..2.0) {
        let c = ClosedCurve::from_fn(256, |t| {
            let rho = r * (1.0 + amp * (wave as f64 * t).cos());
            [rho * t.cos(), rho * t.sin()]
        })
        .unwrap();
        let d = resample_arclength(&c, 256).unwrap();
        prop_assert!((spline_length(&d) / spline_length(&c) - 1.0).abs() <= 1e-8);
    }
}
