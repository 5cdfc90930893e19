//! Dense helpers for the small symmetric matrices (n <= 3) that appear at
//! every grid node. Matrices are stored row-major in flat slices of length n*n.

use std::f64::consts::PI;

pub fn identity(n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        out[i * n + i] = 1.0;
    }
    out
}

pub fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i * n + k] * b[k * n + j];
            }
            out[i * n + j] = acc;
        }
    }
    out
}

pub fn det(a: &[f64], n: usize) -> f64 {
    match n {
        1 => a[0],
        2 => a[0] * a[3] - a[1] * a[2],
        3 => {
            a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6])
        }
        _ => panic!("det: unsupported size {n}"),
    }
}

/// Adjugate inverse. Returns `None` for a singular matrix.
pub fn inverse(a: &[f64], n: usize) -> Option<Vec<f64>> {
    let d = det(a, n);
    if d == 0.0 || !d.is_finite() {
        return None;
    }
    let inv = match n {
        1 => vec![1.0 / a[0]],
        2 => vec![a[3] / d, -a[1] / d, -a[2] / d, a[0] / d],
        3 => {
            let c = |r0: usize, c0: usize, r1: usize, c1: usize| {
                a[r0 * 3 + c0] * a[r1 * 3 + c1] - a[r0 * 3 + c1] * a[r1 * 3 + c0]
            };
            vec![
                c(1, 1, 2, 2) / d,
                -c(0, 1, 2, 2) / d,
                c(0, 1, 1, 2) / d,
                -c(1, 0, 2, 2) / d,
                c(0, 0, 2, 2) / d,
                -c(0, 0, 1, 2) / d,
                c(1, 0, 2, 1) / d,
                -c(0, 0, 2, 1) / d,
                c(0, 0, 1, 1) / d,
            ]
        }
        _ => panic!("inverse: unsupported size {n}"),
    };
    Some(inv)
}

/// Eigenvalues of a symmetric matrix in ascending order.
///
/// n = 2 uses the closed form; n = 3 uses the trigonometric solution of the
/// characteristic cubic with the argument of `acos` clamped to [-1, 1] so that
/// repeated eigenvalues do not produce NaN.
pub fn sym_eigenvalues(a: &[f64], n: usize) -> Vec<f64> {
    match n {
        1 => vec![a[0]],
        2 => {
            let mean = 0.5 * (a[0] + a[3]);
            let half_diff = 0.5 * (a[0] - a[3]);
            let off = 0.5 * (a[1] + a[2]);
            let r = half_diff.hypot(off);
            vec![mean - r, mean + r]
        }
        3 => sym3_eigenvalues(a),
        _ => panic!("sym_eigenvalues: unsupported size {n}"),
    }
}

fn sym3_eigenvalues(a: &[f64]) -> Vec<f64> {
    let p1 = a[1] * a[1] + a[2] * a[2] + a[5] * a[5];
    let tr = a[0] + a[4] + a[8];
    let q = tr / 3.0;
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if p1 <= 1e-300 || p1 <= (f64::EPSILON * scale).powi(2) {
        let mut ev = vec![a[0], a[4], a[8]];
        ev.sort_by(|x, y| x.total_cmp(y));
        return ev;
    }
    let p2 = (a[0] - q).powi(2) + (a[4] - q).powi(2) + (a[8] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    if p == 0.0 {
        return vec![q, q, q];
    }
    let mut b = a.to_vec();
    for i in 0..3 {
        b[i * 4] -= q;
    }
    for v in b.iter_mut() {
        *v /= p;
    }
    let r = (0.5 * det(&b, 3)).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let largest = q + 2.0 * p * phi.cos();
    let smallest = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let middle = tr - largest - smallest;
    let mut ev = vec![smallest, middle, largest];
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

/// Largest absolute eigenvalue (the spectral norm for symmetric input).
pub fn sym_spectral_norm(a: &[f64], n: usize) -> f64 {
    sym_eigenvalues(a, n)
        .into_iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Raise every index of a rank-`rank` covariant tensor with `g_inv`.
pub fn raise_all(t: &[f64], rank: usize, n: usize, g_inv: &[f64]) -> Vec<f64> {
    let mut cur = t.to_vec();
    let len = cur.len();
    for slot in 0..rank {
        let stride = n.pow((rank - 1 - slot) as u32);
        let mut next = vec![0.0; len];
        for (idx, out) in next.iter_mut().enumerate() {
            let a = (idx / stride) % n;
            let base = idx - a * stride;
            let mut acc = 0.0;
            for b in 0..n {
                acc += g_inv[a * n + b] * cur[base + b * stride];
            }
            *out = acc;
        }
        cur = next;
    }
    cur
}

/// Squared g-norm of a covariant tensor: T_{a..} T^{a..}.
pub fn tensor_norm_sq(t: &[f64], rank: usize, n: usize, g_inv: &[f64]) -> f64 {
    let up = raise_all(t, rank, n, g_inv);
    t.iter().zip(&up).map(|(a, b)| a * b).sum::<f64>().max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_round_trips() {
        let a = [2.0, 0.3, -0.1, 0.3, 1.5, 0.2, -0.1, 0.2, 1.1];
        let inv = inverse(&a, 3).unwrap();
        let prod = matmul(&a, &inv, 3);
        for (p, e) in prod.iter().zip(identity(3)) {
            assert!((p - e).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let ev = sym_eigenvalues(&[2.0, 1.0, 1.0, 2.0], 2);
        assert!((ev[0] - 1.0).abs() < 1e-15 && (ev[1] - 3.0).abs() < 1e-15);

        // diag(1, 2, 3) rotated about the z axis keeps the spectrum
        let (c, s) = (0.6f64, 0.8f64);
        let a = [
            c * c * 1.0 + s * s * 2.0,
            c * s * (2.0 - 1.0),
            0.0,
            c * s * (2.0 - 1.0),
            s * s * 1.0 + c * c * 2.0,
            0.0,
            0.0,
            0.0,
            3.0,
        ];
        let ev = sym_eigenvalues(&a, 3);
        for (v, e) in ev.iter().zip([1.0, 2.0, 3.0]) {
            assert!((v - e).abs() < 1e-13, "{ev:?}");
        }
    }

    #[test]
    fn repeated_eigenvalues_are_finite() {
        let ev = sym_eigenvalues(&[1.0, 1e-20, 0.0, 1e-20, 1.0, 0.0, 0.0, 0.0, 1.0], 3);
        assert!(ev.iter().all(|v| (v - 1.0).abs() < 1e-12));
        let ev = sym_eigenvalues(&[2.0, 1.0, 1.0, 1.0, 2.0, 1.0, 1.0, 1.0, 2.0], 3);
        for (v, e) in ev.iter().zip([1.0, 1.0, 4.0]) {
            assert!((v - e).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn norm_of_rank_one_with_scaled_metric() {
        // g = 4 I in 2D -> g_inv = I/4, |v|^2 = |v|_e^2 / 4
        let g_inv = [0.25, 0.0, 0.0, 0.25];
        assert!((tensor_norm_sq(&[2.0, 2.0], 1, 2, &g_inv) - 2.0).abs() < 1e-15);
        // rank 3 picks up (1/4)^3
        let t = vec![1.0; 8];
        assert!((tensor_norm_sq(&t, 3, 2, &g_inv) - 8.0 / 64.0).abs() < 1e-15);
    }
}
