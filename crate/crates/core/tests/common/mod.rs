//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here goes through the crate's FFT or multiplier code: transforms
//! are direct O(N²) sums over the signed index set.
#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use capwave_core::{GridFunction, GridSpec};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn nodes(l: f64, n: usize) -> Vec<f64> {
    (0..n).map(|j| -l + 2.0 * l * j as f64 / n as f64).collect()
}

/// Applies the Fourier symbol `sym(k)` by direct summation. At the unpaired
/// Nyquist mode only the real part of the symbol acts.
pub fn dft_apply(values: &[f64], l: f64, sym: impl Fn(f64) -> Complex64) -> Vec<f64> {
    let n = values.len();
    // k_m (x_j + L) = 2π m j / N
    let table: Vec<Complex64> = (0..n)
        .map(|r| Complex64::from_polar(1.0, 2.0 * PI * r as f64 / n as f64))
        .collect();
    let mut out = vec![0.0; n];
    for m in 0..n {
        let idx = if m <= n / 2 { m as i64 } else { m as i64 - n as i64 };
        let k = PI * idx as f64 / l;
        let mut c = Complex64::new(0.0, 0.0);
        for (j, v) in values.iter().enumerate() {
            c += v * table[(n - (m * j) % n) % n];
        }
        c /= n as f64;
        let s = if m == n / 2 {
            Complex64::new(sym(k).re, 0.0)
        } else {
            sym(k)
        };
        let c = c * s;
        for (j, o) in out.iter_mut().enumerate() {
            *o += (c * table[(m * j) % n]).re;
        }
    }
    out
}

/// Coefficient `c_0 = (1/N) Σ f_j`.
pub fn mean_coefficient(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn ik(k: f64) -> Complex64 {
    Complex64::new(0.0, k)
}

pub fn real(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// Smooth random bump: sum of a few Gaussians with random centres and signs.
pub fn random_bumps(g: GridSpec, seed: u64, count: usize) -> GridFunction {
    let mut r = rng(seed);
    let l = g.half_length();
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                r.gen_range(-0.5..0.5) * l,
                r.gen_range(0.5..1.5) * l / 10.0,
                r.gen_range(-1.0..1.0),
            )
        })
        .collect();
    GridFunction::from_fn(g, |x| {
        bumps
            .iter()
            .map(|(c, w, a)| a * (-((x - c) / w).powi(2)).exp())
            .sum()
    })
}

/// White noise samples in `[-1, 1)`.
pub fn random_samples(g: GridSpec, seed: u64) -> GridFunction {
    let mut r = rng(seed);
    let v = (0..g.mode_count()).map(|_| r.gen_range(-1.0..1.0)).collect();
    GridFunction::new(g, v).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, y) in lower[0][col..n].iter_mut().zip(&upper[col][col..n]) {
                *x -= f * y;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Golden-section search for a minimum of a unimodal function on `[a, b]`.
pub fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    while (b - a).abs() > tol {
        if f(c) < f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}
