//! Dispersion relations, phase-speed functions and profile diagnostics.
//!
//! For the rBenjamin family `ω(k) = k m(k)` with `m(k) = c_γ φ(|k|)`,
//! `φ = P/Q`:
//!
//! ```text
//! P(x) = 1 + ((2α−1)/(2γ))√μ x + (T/(2(1−γ))) x²,   Q(x) = 1 + (α/γ)√μ x.
//! ```
//!
//! For the Benjamin system the linear frequencies are `ω±(k) = −k c_s ± k c_γ φ_s(|k|)`,
//! `φ_s = σ/c_γ`, which is real only when `1 + ((α−1)/γ)√μ|k| ≥ 0`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::models::{rbenjamin_m, ModelKind, ModelParams};
use crate::spectral::{j_symbol, wrap_periodic, GridFunction, Multiplier, Transform};

pub fn m_rbenjamin(k: f64, p: &ModelParams) -> f64 {
    rbenjamin_m(p, k)
}

/// Numerator `P` of the rBenjamin phase-speed function.
pub fn phi_numerator(x: f64, p: &ModelParams) -> f64 {
    let g = p.gamma();
    1.0 + (2.0 * p.alpha() - 1.0) / (2.0 * g) * p.mu_sqrt() * x + p.tension() / (2.0 * (1.0 - g)) * x * x
}

/// `φ(x) = P(x)/Q(x)` for `x ≥ 0`.
pub fn phi_rbenjamin(x: f64, p: &ModelParams) -> f64 {
    phi_numerator(x, p) / (1.0 + p.alpha() / p.gamma() * p.mu_sqrt() * x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiExtremum {
    pub x_star: f64,
    pub phi_min: f64,
    pub b: f64,
    pub c: f64,
}

/// Closed-form minimizer `x* = (−b + √(b² + 4c))/2`, `b = 2γ/(α√μ)`, `c = (1−γ)/(αT)`.
pub fn phi_minimizer(p: &ModelParams) -> Result<PhiExtremum> {
    if p.alpha() == 0.0 || p.tension() == 0.0 || p.mu_sqrt() == 0.0 {
        return Err(Error::UndefinedMinimizer);
    }
    let b = 2.0 * p.gamma() / (p.alpha() * p.mu_sqrt());
    let c = (1.0 - p.gamma()) / (p.alpha() * p.tension());
    let x_star = 0.5 * (-b + libm::sqrt(b * b + 4.0 * c));
    Ok(PhiExtremum {
        x_star,
        phi_min: phi_rbenjamin(x_star, p),
        b,
        c,
    })
}

fn system_radicand(x: f64, p: &ModelParams) -> f64 {
    let g = p.gamma();
    (1.0 + (p.alpha() - 1.0) / g * p.mu_sqrt() * x) * (1.0 + p.tension() / (1.0 - g) * x * x)
        / (1.0 + p.alpha() / g * p.mu_sqrt() * x)
}

/// Phase-speed function of the Benjamin system, `x ≥ 0`.
pub fn phi_system(x: f64, p: &ModelParams) -> Result<f64> {
    let r = system_radicand(x, p);
    if r < 0.0 {
        return Err(Error::IllPosedRegime { x });
    }
    Ok(libm::sqrt(r))
}

/// `σ(k) = sqrt(((1−γ+Tk²)/γ) Ĵ(α−1)(k)/Ĵ(α)(k))`, the nonzero eigenvalue modulus.
pub fn sigma_system(k: f64, p: &ModelParams) -> Result<f64> {
    let r = (1.0 - p.gamma() + p.tension() * k * k) / p.gamma() * j_symbol(p.alpha() - 1.0, p, k)
        / j_symbol(p.alpha(), p, k);
    if r < 0.0 {
        return Err(Error::IllPosedRegime { x: k.abs() });
    }
    Ok(libm::sqrt(r))
}

/// Linear dispersion of a model in a frame moving with speed `frame_speed`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionSpec {
    pub model: ModelKind,
    pub params: ModelParams,
    pub frame_speed: f64,
}

impl DispersionSpec {
    pub fn new(model: ModelKind, params: ModelParams, frame_speed: f64) -> Self {
        DispersionSpec {
            model,
            params: params.for_model(model),
            frame_speed,
        }
    }

    /// `ω(k) = −k c_s + k m(k)` (unidirectional models).
    pub fn omega(&self, k: f64) -> Result<f64> {
        self.unidirectional()?;
        Ok(k * (m_rbenjamin(k, &self.params) - self.frame_speed))
    }

    /// `v(k) = ω(k)/k`, continuous at `k = 0`.
    pub fn phase_speed(&self, k: f64) -> Result<f64> {
        self.unidirectional()?;
        Ok(m_rbenjamin(k, &self.params) - self.frame_speed)
    }

    /// `(ω₊, ω₋)` of the system.
    pub fn omega_pm(&self, k: f64) -> Result<(f64, f64)> {
        let (vp, vm) = self.phase_speed_pm(k)?;
        Ok((k * vp, k * vm))
    }

    /// `(v₊, v₋) = −c_s ± c_γ φ_s(|k|)`.
    pub fn phase_speed_pm(&self, k: f64) -> Result<(f64, f64)> {
        if !self.model.has_velocity() {
            return Err(Error::ModelMismatch("two-branch dispersion needs the system"));
        }
        let s = self.params.c_gamma() * phi_system(k.abs(), &self.params)?;
        Ok((-self.frame_speed + s, -self.frame_speed - s))
    }

    fn unidirectional(&self) -> Result<()> {
        if self.model.has_velocity() {
            Err(Error::ModelMismatch("single-branch dispersion needs a unidirectional model"))
        } else {
            Ok(())
        }
    }
}

/// Pairs `(ζ(x_j), ζ'(x_j))` with a spectral derivative.
pub fn phase_portrait(zeta: &GridFunction) -> Vec<(f64, f64)> {
    let d = Transform::new(zeta.grid()).apply(zeta, &Multiplier::derivative(*zeta.grid(), 1));
    zeta.values().iter().copied().zip(d.values().iter().copied()).collect()
}

/// Accumulated polar angle of `(ζ, ζ')` walking outwards from the peak along
/// the right-hand tail. Points inside the noise floor are skipped.
pub fn tail_winding(zeta: &GridFunction, noise_floor: f64) -> f64 {
    let pts = phase_portrait(zeta);
    let n = pts.len();
    let peak = argmax(zeta.values());
    let mut total = 0.0;
    let mut prev: Option<f64> = None;
    for j in 0..n / 2 {
        let (z, dz) = pts[(peak + j) % n];
        if libm::hypot(z, dz) <= noise_floor {
            continue;
        }
        let a = libm::atan2(dz, z);
        if let Some(p) = prev {
            total += wrap_periodic(a - p, core::f64::consts::PI);
        }
        prev = Some(a);
    }
    total.abs()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayKind {
    Oscillatory,
    Monotone,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayOptions {
    /// Tail starts this many half-height widths away from the peak.
    pub tail_factor: f64,
    pub noise_floor: f64,
    /// Largest admissible magnitude in the outer tenth of the window.
    pub edge_tolerance: f64,
}

impl Default for DecayOptions {
    fn default() -> Self {
        DecayOptions {
            tail_factor: 5.0,
            noise_floor: 1e-10,
            edge_tolerance: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayReport {
    pub kind: DecayKind,
    pub sign_changes: usize,
    /// Full width of the peak at half its height.
    pub half_height_width: f64,
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, x) in v.iter().enumerate() {
        if *x > v[best] {
            best = j;
        }
    }
    best
}

/// Strict sign changes in `values`, ignoring entries with `|v| ≤ floor`.
pub fn count_sign_changes(values: impl IntoIterator<Item = f64>, floor: f64) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for v in values {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            count += 1;
        }
        last = v;
    }
    count
}

/// Largest magnitude at `|x| ≥ 0.9 L`.
pub fn edge_magnitude(zeta: &GridFunction) -> f64 {
    let l = zeta.grid().half_length();
    zeta.grid()
        .nodes()
        .iter()
        .zip(zeta.values())
        .filter(|(x, _)| x.abs() >= 0.9 * l)
        .fold(0.0f64, |m, (_, v)| m.max(v.abs()))
}

/// Classifies the tail of a pulse by counting sign changes on both sides
/// beyond `tail_factor` half-height widths of the peak.
pub fn decay_classification(zeta: &GridFunction, opts: &DecayOptions) -> Result<DecayReport> {
    let edge = edge_magnitude(zeta);
    if edge > opts.edge_tolerance {
        return Err(Error::WindowTooSmall { edge });
    }
    let v = zeta.values();
    let n = v.len();
    let h = zeta.grid().spacing();
    let peak = argmax(v);
    let half = 0.5 * v[peak];
    // distance (in x) to the half-height crossing in one direction
    let reach = |dir: isize| -> f64 {
        let mut prev = v[peak];
        for j in 1..n / 2 {
            let cur = v[(peak as isize + dir * j as isize).rem_euclid(n as isize) as usize];
            if cur < half {
                return h * ((j - 1) as f64 + (prev - half) / (prev - cur));
            }
            prev = cur;
        }
        h * (n / 2) as f64
    };
    let width = reach(1) + reach(-1);
    let start = libm::ceil(opts.tail_factor * width / h) as usize;
    let side = |dir: isize| {
        (start.max(1)..n / 2).map(move |j| v[(peak as isize + dir * j as isize).rem_euclid(n as isize) as usize])
    };
    let sign_changes = count_sign_changes(side(1), opts.noise_floor) + count_sign_changes(side(-1), opts.noise_floor);
    Ok(DecayReport {
        kind: if sign_changes >= 2 {
            DecayKind::Oscillatory
        } else {
            DecayKind::Monotone
        },
        sign_changes,
        half_height_width: width,
    })
}
