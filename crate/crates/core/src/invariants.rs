//! Conserved and quasi-conserved functionals.
//!
//! rBenjamin family:
//!
//! ```text
//! C = ∫ ζ
//! D = ½ ∫ ζ² + √μ (α/γ) ζ𝓗ζ
//! E = (c_γ/2) ∫ ζ² − √μ ((1−2α)/(2γ)) ζ𝓗ζ − (ε/2) ζ³  +  (T̃/2) ∫ ζₓ²
//! ```
//!
//! Benjamin system: `I₁ = ∫ζ`, `I₂ = ∫u`, `I = ∫ζu` and
//!
//! ```text
//! H = ½ ∫ (1−γ)ζ² + u²/γ − (ε/γ) ζu² − (1−α)(√μ/γ²) u𝓗u + T ζₓ²
//! ```
//!
//! `I` and `H` are exact invariants only for `α = 0`; [`drift_rates`] gives
//! their time derivatives otherwise. Quadratic forms in `𝓗` and `∂ₓ` use
//! Parseval sums over the half spectrum.

use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::Result;
use crate::models::{rhs_system, ModelKind, ModelParams, State};
use crate::spectral::{GridFunction, GridSpec, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Functional {
    C,
    D,
    E,
    I1,
    I2,
    I,
    H,
}

impl Functional {
    pub fn name(&self) -> &'static str {
        match self {
            Functional::C => "C",
            Functional::D => "D",
            Functional::E => "E",
            Functional::I1 => "I1",
            Functional::I2 => "I2",
            Functional::I => "I",
            Functional::H => "H",
        }
    }

    pub fn applies_to(&self, kind: ModelKind) -> bool {
        matches!(self, Functional::C | Functional::D | Functional::E) != kind.has_velocity()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FunctionalValue {
    pub name: Functional,
    pub value: f64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemFunctionals {
    pub i1: f64,
    pub i2: f64,
    pub i: f64,
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriftRates {
    pub d_i_dt: f64,
    pub d_h_dt: f64,
}

/// `2L Σ w_n s(k_n) Re(conj(a_n) b_n)` over the half spectrum.
fn weighted_pairing(grid: &GridSpec, a: &[Complex64], b: &[Complex64], symbol: impl Fn(f64) -> f64) -> f64 {
    let nyq = grid.nyquist_index();
    let ks = grid.half_wavenumbers();
    let mut s = 0.0;
    for n in 0..a.len() {
        let prod = if n == nyq {
            a[n].re * b[n].re
        } else {
            (a[n].conj() * b[n]).re
        };
        s += grid.weight(n) * symbol(ks[n]) * prod;
    }
    2.0 * grid.half_length() * s
}

/// `∫ f 𝓗 g` by Parseval.
pub fn hilbert_pairing(f: &GridFunction, g: &GridFunction) -> f64 {
    let mut t = Transform::new(f.grid());
    let (a, b) = (t.forward(f), t.forward(g));
    weighted_pairing(f.grid(), &a, &b, f64::abs)
}

/// `∫ fₓ²` by Parseval; the Nyquist mode carries no derivative.
fn gradient_energy(grid: &GridSpec, spec: &[Complex64]) -> f64 {
    let nyq = grid.nyquist_index();
    weighted_pairing(grid, spec, spec, |k| k * k) - {
        let k = grid.half_wavenumbers()[nyq];
        2.0 * grid.half_length() * k * k * spec[nyq].re * spec[nyq].re
    }
}

pub fn eval_c(zeta: &GridFunction) -> f64 {
    zeta.integral()
}

pub fn eval_d(zeta: &GridFunction, p: &ModelParams) -> f64 {
    let grid = zeta.grid();
    let spec = Transform::new(grid).forward(zeta);
    let q = p.mu_sqrt() * p.alpha() / p.gamma();
    0.5 * weighted_pairing(grid, &spec, &spec, |k| 1.0 + q * k.abs())
}

pub fn eval_e(zeta: &GridFunction, p: &ModelParams) -> f64 {
    let grid = zeta.grid();
    let spec = Transform::new(grid).forward(zeta);
    let q = p.mu_sqrt() * (1.0 - 2.0 * p.alpha()) / (2.0 * p.gamma());
    let quad = weighted_pairing(grid, &spec, &spec, |k| 1.0 - q * k.abs());
    let cubic = zeta.map(|z| z * z * z).integral();
    0.5 * p.c_gamma() * (quad - 0.5 * p.epsilon() * cubic) + 0.5 * p.tension_reduced() * gradient_energy(grid, &spec)
}

pub fn eval_system_functionals(s: &State, p: &ModelParams) -> Result<SystemFunctionals> {
    let u = s.velocity()?;
    let z = &s.zeta;
    let grid = z.grid();
    let mut t = Transform::new(grid);
    let (zh, uh) = (t.forward(z), t.forward(u));
    let g = p.gamma();
    let zz = weighted_pairing(grid, &zh, &zh, |_| 1.0);
    let uu = weighted_pairing(grid, &uh, &uh, |_| 1.0);
    let uhu = weighted_pairing(grid, &uh, &uh, f64::abs);
    let zuu = z.zip_with(u, |a, b| a * b * b).integral();
    let h = 0.5
        * ((1.0 - g) * zz + uu / g
            - p.epsilon() / g * zuu
            - (1.0 - p.alpha()) * p.mu_sqrt() / (g * g) * uhu
            + p.tension() * gradient_energy(grid, &zh));
    Ok(SystemFunctionals {
        i1: z.integral(),
        i2: u.integral(),
        i: z.dot(u),
        h,
    })
}

/// Time derivatives of `I` and `H` along the system flow:
///
/// ```text
/// dI/dt = −(α√μ/γ) ∫ u 𝓗ζ_t
/// dH/dt = −(α√μ/γ) ∫ ((1−γ)ζ − (ε/2γ)u² − Tζₓₓ) 𝓗ζ_t
/// ```
pub fn drift_rates(s: &State, p: &ModelParams, g: &GridSpec) -> Result<DriftRates> {
    let u = s.velocity()?;
    let rate = rhs_system(s, p, g)?;
    let mut t = Transform::new(g);
    let zt = t.forward(&rate.zeta);
    let uh = t.forward(u);
    let zh = t.forward(&s.zeta);
    let pre = -p.alpha() * p.mu_sqrt() / p.gamma();
    let eps = p.epsilon() / (2.0 * p.gamma());
    let usq = t.forward(&u.map(|v| v * v));
    let nyq = g.nyquist_index();
    let ks = g.half_wavenumbers();
    // grad = (1−γ)ζ − (ε/2γ)u² − Tζₓₓ in coefficient space
    let grad: Vec<Complex64> = (0..zh.len())
        .map(|n| {
            let k2 = if n == nyq { 0.0 } else { ks[n] * ks[n] };
            zh[n] * ((1.0 - p.gamma()) + p.tension() * k2) - usq[n] * eps
        })
        .collect();
    Ok(DriftRates {
        d_i_dt: pre * weighted_pairing(g, &uh, &zt, f64::abs),
        d_h_dt: pre * weighted_pairing(g, &grad, &zt, f64::abs),
    })
}

/// Every functional of `kind`, stamped with time `t`.
pub fn evaluate_all(s: &State, kind: ModelKind, p: &ModelParams, t: f64) -> Vec<FunctionalValue> {
    let mk = |name, value| FunctionalValue { name, value, time: t };
    if kind.has_velocity() {
        match eval_system_functionals(s, p) {
            Ok(f) => [
                mk(Functional::I1, f.i1),
                mk(Functional::I2, f.i2),
                mk(Functional::I, f.i),
                mk(Functional::H, f.h),
            ]
            .into(),
            Err(_) => Vec::new(),
        }
    } else {
        [
            mk(Functional::C, eval_c(&s.zeta)),
            mk(Functional::D, eval_d(&s.zeta, p)),
            mk(Functional::E, eval_e(&s.zeta, p)),
        ]
        .into()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap()
    }

    #[test]
    fn constants_and_odd_functions() {
        let g = GridSpec::new(10.0, 64).unwrap();
        let one = GridFunction::from_fn(g, |_| 1.0);
        assert!((eval_c(&one) - 20.0).abs() < 1e-12);
        let odd = GridFunction::from_fn(g, |x| libm::sin(PI * x / 10.0));
        assert!(eval_c(&odd).abs() < 1e-12);
    }

    #[test]
    fn single_mode_closed_forms() {
        let l = 10.0;
        let g = GridSpec::new(l, 64).unwrap();
        let k = 3.0 * PI / l;
        let f = GridFunction::from_fn(g, |x| libm::cos(k * x));
        let p = params();
        // ∫cos² = L, ∫cos 𝓗cos = kL, ∫(∂cos)² = k²L
        let q = p.mu_sqrt() * p.alpha() / p.gamma();
        assert!((eval_d(&f, &p) - 0.5 * l * (1.0 + q * k)).abs() < 1e-12);
        let r = p.mu_sqrt() * (1.0 - 2.0 * p.alpha()) / (2.0 * p.gamma());
        let e = 0.5 * p.c_gamma() * l * (1.0 - r * k) + 0.5 * p.tension_reduced() * k * k * l;
        assert!((eval_e(&f, &p) - e).abs() < 1e-12);
    }

    #[test]
    fn zero_state() {
        let g = GridSpec::new(10.0, 64).unwrap();
        let s = State::zeros(ModelKind::BenjaminSystem, g);
        let f = eval_system_functionals(&s, &params()).unwrap();
        assert_eq!((f.i1, f.i2, f.i, f.h), (0.0, 0.0, 0.0, 0.0));
        let r = drift_rates(&s, &params(), &g).unwrap();
        assert_eq!((r.d_i_dt, r.d_h_dt), (0.0, 0.0));
        assert_eq!(eval_e(&s.zeta, &params()), 0.0);
        assert!(eval_system_functionals(&State::zeros(ModelKind::RBenjamin, g), &params()).is_err());
    }

    #[test]
    fn alpha_zero_has_no_drift() {
        let g = GridSpec::new(10.0, 64).unwrap();
        let z = GridFunction::from_fn(g, |x| libm::exp(-x * x));
        let u = GridFunction::from_fn(g, |x| x * libm::exp(-x * x));
        let s = State::pair(z, u).unwrap();
        let p = params().with_alpha(0.0).unwrap();
        let r = drift_rates(&s, &p, &g).unwrap();
        assert_eq!((r.d_i_dt, r.d_h_dt), (0.0, 0.0));
    }

    #[test]
    fn applicability() {
        assert!(Functional::C.applies_to(ModelKind::RBenjamin));
        assert!(!Functional::H.applies_to(ModelKind::RBenjamin));
        assert!(Functional::H.applies_to(ModelKind::BenjaminSystem));
        assert_eq!(evaluate_all(&State::zeros(ModelKind::Benjamin, GridSpec::new(1.0, 8).unwrap()), ModelKind::Benjamin, &params(), 2.0)[0].time, 2.0);
    }
}
