//! Model parameters and right-hand sides.
//!
//! rBenjamin family (`alpha = 0` is the Benjamin equation):
//!
//! ```text
//! J(a) z_t = -c z_x + (3 eps / 4) c (z^2)_x + c (1 - 2a)/(2 g) sqrt(mu) H z_x + T~ z_xxx
//! ```
//!
//! Benjamin system:
//!
//! ```text
//! J(a) z_t = -(1/g) ((1 - eps z) u)_x + (1 - a) sqrt(mu)/g^2 H u_x
//!      u_t = -(1 - g) z_x + eps/(2 g) (u^2)_x + T z_xxx
//! ```
//!
//! with `H = |D|`, `J(a) = 1 + (a sqrt(mu)/g) |D|`, `c = sqrt((1-g)/g)` and
//! `T~ = T / (2 sqrt(g (1-g)))`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{j_symbol, GridFunction, GridSpec, Multiplier, Spectrum, Transform, I, ZERO};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    epsilon: f64,
    mu_sqrt: f64,
    gamma: f64,
    tension: f64,
    alpha: f64,
}

/// Soft regime checks; never fatal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegimeWarning {
    /// `eps / sqrt(mu)` outside `[1/2, 2]`.
    AmplitudeDispersionRatio(f64),
    /// `T / sqrt(mu)` outside `[1/10, 10]`.
    TensionScale(f64),
}

impl ModelParams {
    /// `epsilon` and `mu_sqrt` may be zero to obtain linearized models.
    pub fn new(epsilon: f64, mu_sqrt: f64, gamma: f64, tension: f64, alpha: f64) -> Result<Self> {
        fn check(ok: bool, name: &'static str, reason: &'static str) -> Result<()> {
            if ok {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, reason })
            }
        }
        check(epsilon.is_finite() && epsilon >= 0.0, "epsilon", "must be finite and >= 0")?;
        check(mu_sqrt.is_finite() && mu_sqrt >= 0.0, "mu_sqrt", "must be finite and >= 0")?;
        check(gamma > 0.0 && gamma < 1.0, "gamma", "must lie in (0, 1)")?;
        check(tension.is_finite() && tension >= 0.0, "tension", "must be finite and >= 0")?;
        check(alpha.is_finite() && alpha >= 0.0, "alpha", "must be finite and >= 0")?;
        Ok(ModelParams {
            epsilon,
            mu_sqrt,
            gamma,
            tension,
            alpha,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
    pub fn mu_sqrt(&self) -> f64 {
        self.mu_sqrt
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn tension(&self) -> f64 {
        self.tension
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Linear long-wave speed `sqrt((1 - gamma) / gamma)`.
    pub fn c_gamma(&self) -> f64 {
        libm::sqrt((1.0 - self.gamma) / self.gamma)
    }

    /// `T / (2 sqrt(gamma (1 - gamma)))`
    pub fn tension_reduced(&self) -> f64 {
        self.tension / (2.0 * libm::sqrt(self.gamma * (1.0 - self.gamma)))
    }

    pub fn with_alpha(mut self, alpha: f64) -> Result<Self> {
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: "must be finite and >= 0",
            });
        }
        self.alpha = alpha;
        Ok(self)
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: "must be finite and >= 0",
            });
        }
        self.epsilon = epsilon;
        Ok(self)
    }

    /// Parameters as seen by `kind`: the Benjamin equation forces `alpha = 0`.
    pub fn for_model(&self, kind: ModelKind) -> ModelParams {
        match kind {
            ModelKind::Benjamin => ModelParams { alpha: 0.0, ..*self },
            _ => *self,
        }
    }

    pub fn regime_warnings(&self) -> Vec<RegimeWarning> {
        let mut out = Vec::new();
        if self.mu_sqrt > 0.0 {
            let r = self.epsilon / self.mu_sqrt;
            if !(0.5..=2.0).contains(&r) {
                out.push(RegimeWarning::AmplitudeDispersionRatio(r));
            }
            let t = self.tension / self.mu_sqrt;
            if !(0.1..=10.0).contains(&t) {
                out.push(RegimeWarning::TensionScale(t));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Benjamin,
    RBenjamin,
    BenjaminSystem,
}

impl ModelKind {
    pub fn has_velocity(&self) -> bool {
        matches!(self, ModelKind::BenjaminSystem)
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::Benjamin => "benjamin",
            ModelKind::RBenjamin => "rbenjamin",
            ModelKind::BenjaminSystem => "system",
        }
    }

    pub const ALL: [ModelKind; 3] = [ModelKind::Benjamin, ModelKind::RBenjamin, ModelKind::BenjaminSystem];
}

/// Interface deviation and, for the system, the velocity variable.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub zeta: GridFunction,
    pub u: Option<GridFunction>,
}

impl State {
    pub fn scalar(zeta: GridFunction) -> Self {
        State { zeta, u: None }
    }

    pub fn pair(zeta: GridFunction, u: GridFunction) -> Result<Self> {
        if zeta.grid() != u.grid() {
            return Err(Error::DimensionMismatch {
                expected: zeta.grid().mode_count(),
                found: u.grid().mode_count(),
            });
        }
        Ok(State { zeta, u: Some(u) })
    }

    pub fn zeros(kind: ModelKind, grid: GridSpec) -> Self {
        State {
            zeta: GridFunction::zeros(grid),
            u: kind.has_velocity().then(|| GridFunction::zeros(grid)),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        self.zeta.grid()
    }

    pub fn velocity(&self) -> Result<&GridFunction> {
        self.u.as_ref().ok_or(Error::MissingVelocity)
    }

    pub fn check_model(&self, kind: ModelKind) -> Result<()> {
        match (kind.has_velocity(), self.u.is_some()) {
            (true, false) => Err(Error::MissingVelocity),
            (false, true) => Err(Error::ModelMismatch("unidirectional model given a velocity component")),
            _ => Ok(()),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let u = self.u.as_ref().map_or(0.0, |u| u.max_abs());
        self.zeta.max_abs().max(u)
    }

    pub fn max_abs_diff(&self, other: &State) -> f64 {
        let dz = self.zeta.max_abs_diff(&other.zeta);
        let du = match (&self.u, &other.u) {
            (Some(a), Some(b)) => a.max_abs_diff(b),
            _ => 0.0,
        };
        dz.max(du)
    }

    /// Concatenated physical samples (`zeta` then `u`).
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = self.zeta.values().to_vec();
        if let Some(u) = &self.u {
            v.extend_from_slice(u.values());
        }
        v
    }

    pub(crate) fn from_flat(grid: GridSpec, with_u: bool, flat: &[f64]) -> State {
        let n = grid.mode_count();
        let zeta = GridFunction::from_raw(grid, flat[..n].to_vec());
        let u = with_u.then(|| GridFunction::from_raw(grid, flat[n..2 * n].to_vec()));
        State { zeta, u }
    }
}

fn check_grid(s: &State, g: &GridSpec) -> Result<()> {
    if s.grid() != g {
        return Err(Error::DimensionMismatch {
            expected: g.mode_count(),
            found: s.grid().mode_count(),
        });
    }
    Ok(())
}

/// Dispersion multiplier `m(k)` of the rBenjamin family, `omega = k m(k)`.
pub(crate) fn rbenjamin_m(p: &ModelParams, k: f64) -> f64 {
    let c = p.c_gamma();
    let ka = k.abs();
    let num = c * (1.0 - (1.0 - 2.0 * p.alpha) / (2.0 * p.gamma) * p.mu_sqrt * ka) + p.tension_reduced() * k * k;
    num / j_symbol(p.alpha, p, k)
}

/// Pseudospectral rBenjamin operator with precomputed symbols.
#[derive(Debug, Clone)]
pub(crate) struct RBenjaminOp {
    pub transform: Transform,
    /// `-i k m(k)`, zero at the Nyquist mode.
    pub linear: Vec<Complex64>,
    /// `i k (3 eps / 4) c / J(alpha)`, zero at the Nyquist mode.
    pub quad: Vec<Complex64>,
    phys: Vec<f64>,
    scratch: Vec<f64>,
    prod: Spectrum,
}

impl RBenjaminOp {
    pub fn new(p: &ModelParams, g: &GridSpec) -> Self {
        let ks = g.half_wavenumbers();
        let nyq = g.nyquist_index();
        let c = p.c_gamma();
        let mut linear: Vec<Complex64> = ks.iter().map(|&k| -I * k * rbenjamin_m(p, k)).collect();
        let mut quad: Vec<Complex64> = ks
            .iter()
            .map(|&k| I * k * (0.75 * p.epsilon * c) / j_symbol(p.alpha, p, k))
            .collect();
        linear[nyq] = ZERO;
        quad[nyq] = ZERO;
        RBenjaminOp {
            transform: Transform::new(g),
            linear,
            quad,
            phys: vec![0.0; g.mode_count()],
            scratch: vec![0.0; g.mode_count()],
            prod: vec![ZERO; g.spectrum_len()],
        }
    }

    /// Nonlinear part of the right-hand side, in coefficient space.
    pub fn nonlinear(&mut self, zeta: &[Complex64], out: &mut [Complex64]) {
        self.transform.inverse_into(zeta, &mut self.phys);
        self.transform
            .product_spectrum(&self.phys, &self.phys, &mut self.scratch, &mut self.prod);
        for ((o, q), s) in out.iter_mut().zip(&self.quad).zip(&self.prod) {
            *o = q * s;
        }
    }

    pub fn rhs(&mut self, zeta: &[Complex64], out: &mut [Complex64]) {
        self.nonlinear(zeta, out);
        for ((o, l), z) in out.iter_mut().zip(&self.linear).zip(zeta) {
            *o += l * z;
        }
    }
}

/// Pseudospectral operator of the Benjamin system.
#[derive(Debug, Clone)]
pub(crate) struct SystemOp {
    pub transform: Transform,
    /// `zeta_t` from `u`: `-(i k / g) J(a-1) / J(a)`.
    pub a: Vec<Complex64>,
    /// `u_t` from `zeta`: `-i k (1 - g + T k^2)`.
    pub b: Vec<Complex64>,
    /// applied to `(zeta u)^`: `i k (eps / g) / J(a)`.
    pub nz: Vec<Complex64>,
    /// applied to `(u^2)^`: `i k eps / (2 g)`.
    pub nu: Vec<Complex64>,
    z: Vec<f64>,
    u: Vec<f64>,
    scratch: Vec<f64>,
    prod: Spectrum,
}

impl SystemOp {
    pub fn new(p: &ModelParams, g: &GridSpec) -> Self {
        let ks = g.half_wavenumbers();
        let nyq = g.nyquist_index();
        let gm = p.gamma;
        let eps = p.epsilon;
        let mut a: Vec<Complex64> = ks
            .iter()
            .map(|&k| -I * k / gm * j_symbol(p.alpha - 1.0, p, k) / j_symbol(p.alpha, p, k))
            .collect();
        let mut b: Vec<Complex64> = ks
            .iter()
            .map(|&k| -I * k * (1.0 - gm + p.tension * k * k))
            .collect();
        let mut nz: Vec<Complex64> = ks
            .iter()
            .map(|&k| I * k * (eps / gm) / j_symbol(p.alpha, p, k))
            .collect();
        let mut nu: Vec<Complex64> = ks.iter().map(|&k| I * k * eps / (2.0 * gm)).collect();
        for v in [&mut a, &mut b, &mut nz, &mut nu] {
            v[nyq] = ZERO;
        }
        let n = g.mode_count();
        SystemOp {
            transform: Transform::new(g),
            a,
            b,
            nz,
            nu,
            z: vec![0.0; n],
            u: vec![0.0; n],
            scratch: vec![0.0; n],
            prod: vec![ZERO; g.spectrum_len()],
        }
    }

    pub fn nonlinear(&mut self, zeta: &[Complex64], u: &[Complex64], out_z: &mut [Complex64], out_u: &mut [Complex64]) {
        self.transform.inverse_into(zeta, &mut self.z);
        self.transform.inverse_into(u, &mut self.u);
        self.transform
            .product_spectrum(&self.z, &self.u, &mut self.scratch, &mut self.prod);
        for ((o, m), s) in out_z.iter_mut().zip(&self.nz).zip(&self.prod) {
            *o = m * s;
        }
        self.transform
            .product_spectrum(&self.u, &self.u, &mut self.scratch, &mut self.prod);
        for ((o, m), s) in out_u.iter_mut().zip(&self.nu).zip(&self.prod) {
            *o = m * s;
        }
    }

    pub fn rhs(&mut self, zeta: &[Complex64], u: &[Complex64], out_z: &mut [Complex64], out_u: &mut [Complex64]) {
        self.nonlinear(zeta, u, out_z, out_u);
        for n in 0..zeta.len() {
            out_z[n] += self.a[n] * u[n];
            out_u[n] += self.b[n] * zeta[n];
        }
    }
}

/// `zeta_t` for the rBenjamin family (Benjamin equation when `alpha = 0`).
pub fn rhs_rbenjamin(s: &State, p: &ModelParams, g: &GridSpec) -> Result<State> {
    check_grid(s, g)?;
    if s.u.is_some() {
        return Err(Error::ModelMismatch("rBenjamin state must not carry a velocity"));
    }
    let mut op = RBenjaminOp::new(p, g);
    let zh = op.transform.forward(&s.zeta);
    let mut out = vec![ZERO; zh.len()];
    op.rhs(&zh, &mut out);
    Ok(State::scalar(op.transform.inverse(&out)))
}

/// `(zeta_t, u_t)` for the one-dimensional Benjamin system.
pub fn rhs_system(s: &State, p: &ModelParams, g: &GridSpec) -> Result<State> {
    check_grid(s, g)?;
    let u = s.velocity()?;
    let mut op = SystemOp::new(p, g);
    let zh = op.transform.forward(&s.zeta);
    let uh = op.transform.forward(u);
    let mut oz = vec![ZERO; zh.len()];
    let mut ou = vec![ZERO; zh.len()];
    op.rhs(&zh, &uh, &mut oz, &mut ou);
    let zt = op.transform.inverse(&oz);
    let ut = op.transform.inverse(&ou);
    Ok(State { zeta: zt, u: Some(ut) })
}

/// Right-moving velocity consistent with `zeta` to first order:
/// `u = sqrt(g (1-g)) (z + eps z^2 / 4 + sqrt(mu)/(2 g) H z - T/(2 (1-g)) z_xx)`.
pub fn unidirectional_u_from_zeta(zeta: &GridFunction, p: &ModelParams) -> Result<GridFunction> {
    let g = *zeta.grid();
    let gm = p.gamma;
    let lin = Multiplier::real(g, |k| {
        1.0 + p.mu_sqrt / (2.0 * gm) * k.abs() + p.tension / (2.0 * (1.0 - gm)) * k * k
    });
    let linear = crate::spectral::apply_multiplier(zeta, &lin)?;
    let scale = libm::sqrt(gm * (1.0 - gm));
    Ok(linear.zip_with(zeta, |l, z| scale * (l + 0.25 * p.epsilon * z * z)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn params() -> ModelParams {
        ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let p = params();
        assert!((p.c_gamma() - libm::sqrt(1.5)).abs() < 1e-15);
        assert!((p.tension_reduced() - 0.1 / (2.0 * libm::sqrt(0.24))).abs() < 1e-15);
        assert!(p.regime_warnings().is_empty());
        let q = ModelParams::new(0.5, 0.1, 0.4, 5.0, 0.0).unwrap();
        assert_eq!(q.regime_warnings().len(), 2);
        assert_eq!(p.for_model(ModelKind::Benjamin).alpha(), 0.0);
        assert_eq!(p.for_model(ModelKind::RBenjamin).alpha(), 1.2);
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(0.1, 0.1, 1.5, 0.1, 0.0).is_err());
        assert!(ModelParams::new(0.1, 0.1, 0.0, 0.1, 0.0).is_err());
        assert!(ModelParams::new(-0.1, 0.1, 0.5, 0.1, 0.0).is_err());
        assert!(ModelParams::new(0.1, 0.1, 0.5, -0.1, 0.0).is_err());
        assert!(ModelParams::new(0.1, 0.1, 0.5, 0.1, -1.0).is_err());
    }

    #[test]
    fn zero_state_is_fixed() {
        let g = GridSpec::new(20.0, 64).unwrap();
        let p = params();
        let r = rhs_rbenjamin(&State::zeros(ModelKind::RBenjamin, g), &p, &g).unwrap();
        assert_eq!(r.zeta.max_abs(), 0.0);
        let r = rhs_system(&State::zeros(ModelKind::BenjaminSystem, g), &p, &g).unwrap();
        assert_eq!(r.max_abs(), 0.0);
    }

    #[test]
    fn model_kind_mismatch() {
        let g = GridSpec::new(20.0, 64).unwrap();
        let p = params();
        let sys = State::zeros(ModelKind::BenjaminSystem, g);
        assert!(matches!(rhs_rbenjamin(&sys, &p, &g), Err(Error::ModelMismatch(_))));
        let uni = State::zeros(ModelKind::RBenjamin, g);
        assert_eq!(rhs_system(&uni, &p, &g).unwrap_err(), Error::MissingVelocity);
    }

    #[test]
    fn linear_rbenjamin_single_mode() {
        let g = GridSpec::new(20.0, 64).unwrap();
        let p = params().with_epsilon(0.0).unwrap();
        let n = 5.0;
        let k = PI * n / g.half_length();
        let zeta = GridFunction::from_fn(g, |x| libm::cos(k * x));
        let r = rhs_rbenjamin(&State::scalar(zeta), &p, &g).unwrap();
        // -i k m(k) e^{ikx} -> real part k m sin(kx)
        let m = rbenjamin_m(&p, k);
        let expected = GridFunction::from_fn(g, |x| k * m * libm::sin(k * x));
        assert!(r.zeta.max_abs_diff(&expected) < 1e-12);
        assert!(r.zeta.integral().abs() < 1e-12);
    }

    #[test]
    fn velocity_reduces_to_leading_order() {
        let g = GridSpec::new(20.0, 64).unwrap();
        let p = ModelParams::new(0.0, 0.0, 0.4, 0.0, 0.0).unwrap();
        let zeta = GridFunction::from_fn(g, |x| libm::exp(-x * x / 4.0));
        let u = unidirectional_u_from_zeta(&zeta, &p).unwrap();
        let expected = zeta.map(|z| libm::sqrt(0.24) * z);
        assert!(u.max_abs_diff(&expected) < 1e-14);
        let zero = unidirectional_u_from_zeta(&GridFunction::zeros(g), &params()).unwrap();
        assert_eq!(zero.max_abs(), 0.0);
    }
}
