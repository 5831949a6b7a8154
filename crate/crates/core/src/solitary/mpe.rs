//! Minimal polynomial extrapolation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::State;

/// Columns whose component orthogonal to the previous differences falls
/// below this fraction of their norm are treated as linearly dependent.
const RANK_TOL: f64 = 1e-10;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// MPE limit estimate from consecutive iterates `x_0, ..., x_{k+1}`.
///
/// The differences `u_i = x_{i+1} - x_i` are orthogonalized in order. The
/// first difference that is (numerically) a combination of its predecessors
/// fixes the extrapolation degree; otherwise the degree is `k` and the
/// coefficients come from the least-squares problem
/// `min || sum_{i<k} c_i u_i + u_k ||`. Degenerate cases return the last
/// iterate.
pub fn mpe_extrapolate(iterates: &[Vec<f64>]) -> Vec<f64> {
    let last = match iterates.last() {
        Some(x) => x.clone(),
        None => return Vec::new(),
    };
    if iterates.len() < 2 {
        return last;
    }
    let len = last.len();
    let k = iterates.len() - 2;

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    // r[j] holds column j of R (entries 0..=j)
    let mut r: Vec<Vec<f64>> = Vec::with_capacity(k + 1);
    let mut degree = None;
    for j in 0..=k {
        let mut v: Vec<f64> = (0..len).map(|i| iterates[j + 1][i] - iterates[j][i]).collect();
        let norm0 = libm::sqrt(dot(&v, &v));
        let mut col = vec![0.0; j + 1];
        // two passes of modified Gram-Schmidt
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let h = dot(qi, &v);
                col[i] += h;
                for (vv, qq) in v.iter_mut().zip(qi) {
                    *vv -= h * qq;
                }
            }
        }
        let rjj = libm::sqrt(dot(&v, &v));
        col[j] = rjj;
        if norm0 == 0.0 || rjj <= RANK_TOL * norm0 || j == k {
            r.push(col);
            degree = Some(j);
            break;
        }
        for vv in v.iter_mut() {
            *vv /= rjj;
        }
        q.push(v);
        r.push(col);
    }
    let m = match degree {
        Some(0) | None => return last,
        Some(m) => m,
    };

    // Back substitution: R[0..m, 0..m] c = -r[0..m, m].
    let mut c = vec![0.0; m + 1];
    c[m] = 1.0;
    for i in (0..m).rev() {
        let mut acc = -r[m][i];
        for j in i + 1..m {
            acc -= r[j][i] * c[j];
        }
        c[i] = acc / r[i][i];
    }
    let total: f64 = c.iter().sum();
    let scale = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if !total.is_finite() || total.abs() <= 1e-12 * scale {
        return last;
    }
    let mut out = vec![0.0; len];
    for (ci, x) in c.iter().zip(iterates) {
        let g = ci / total;
        for (o, xv) in out.iter_mut().zip(x) {
            *o += g * xv;
        }
    }
    if out.iter().all(|v| v.is_finite()) {
        out
    } else {
        last
    }
}

/// Extrapolates from the last `width + 2` states of a fixed-point sequence.
pub fn mpe_accelerate(iterates: &[State], width: usize) -> Result<State> {
    let need = width + 2;
    if iterates.len() < need {
        return Err(Error::InvalidParameter {
            name: "iterates",
            reason: "need width + 2 consecutive iterates",
        });
    }
    let tail = &iterates[iterates.len() - need..];
    let first = &tail[0];
    let with_u = first.u.is_some();
    for s in tail {
        if s.grid() != first.grid() || s.u.is_some() != with_u {
            return Err(Error::ModelMismatch("iterates have inconsistent shapes"));
        }
    }
    let flat: Vec<Vec<f64>> = tail.iter().map(State::flatten).collect();
    let out = mpe_extrapolate(&flat);
    Ok(State::from_flat(*first.grid(), with_u, &out))
}
