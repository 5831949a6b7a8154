//! Traveling waves by Petviashvili iteration.
//!
//! Both fixed-point problems have the form `L U = N(U)` with `L` a Fourier
//! multiplier (a 2x2 matrix symbol for the system) and `N` homogeneous of
//! degree two. One step is
//!
//! ```text
//! s_n = <U_n, L U_n> / <U_n, N(U_n)>,    U_{n+1} = s_n^2 L^{-1} N(U_n)
//! ```
//!
//! with inner products over Fourier coefficients. Every `width + 1` plain
//! steps the iterates are combined by minimal polynomial extrapolation and
//! the cycle restarts from the extrapolated point.

mod mpe;

pub use mpe::{mpe_accelerate, mpe_extrapolate};

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::models::{ModelKind, ModelParams, State};
use crate::spectral::{
    j_symbol, locate_peak, shift_spectrum, GridFunction, GridSpec, Spectrum, Transform, ZERO,
};

/// Coefficient of `-zeta''` in the scalar traveling-wave equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TensionConvention {
    /// `T / (2 sqrt(gamma (1 - gamma)))`, obtained by integrating the
    /// rBenjamin equation once.
    #[default]
    Reduced,
    /// The bare capillarity parameter `T`.
    Bare,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialGuess {
    SechSquared { amplitude: f64, width: f64 },
    Gaussian { amplitude: f64, width: f64 },
    Supplied(State),
}

impl InitialGuess {
    /// `A sech^2(x / w)` with `A = 3 (c - |c_s|) / (2 eps c)`, `w = 1/sqrt(c - |c_s|)`.
    pub fn default_for(speed: f64, p: &ModelParams) -> Result<Self> {
        let c = p.c_gamma();
        if p.epsilon() == 0.0 {
            return Err(Error::InvalidParameter {
                name: "epsilon",
                reason: "the default guess needs epsilon > 0",
            });
        }
        let gap = (c - speed.abs()).abs().max(1e-3);
        Ok(InitialGuess::SechSquared {
            amplitude: 0.5 * 3.0 * gap / (p.epsilon() * c),
            width: 1.0 / libm::sqrt(gap),
        })
    }

    fn build(&self, kind: ModelKind, speed: f64, p: &ModelParams, g: &GridSpec) -> Result<State> {
        let profile = |amp: f64, width: f64, f: fn(f64) -> f64| -> Result<GridFunction> {
            if !(width > 0.0 && width.is_finite() && amp.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "initial_guess",
                    reason: "width must be positive and amplitude finite",
                });
            }
            Ok(GridFunction::from_fn(*g, |x| amp * f(x / width)))
        };
        let zeta = match self {
            InitialGuess::SechSquared { amplitude, width } => profile(*amplitude, *width, |s| {
                let c = libm::cosh(s);
                1.0 / (c * c)
            })?,
            InitialGuess::Gaussian { amplitude, width } => profile(*amplitude, *width, |s| libm::exp(-s * s))?,
            InitialGuess::Supplied(state) => {
                if state.grid() != g {
                    return Err(Error::DimensionMismatch {
                        expected: g.mode_count(),
                        found: state.grid().mode_count(),
                    });
                }
                state.check_model(kind)?;
                return Ok(state.clone());
            }
        };
        if kind.has_velocity() {
            // long-wave balance of the second equation: (1 - g) zeta = c_s u
            let factor = (1.0 - p.gamma()) / speed;
            let u = zeta.map(|z| factor * z);
            State::pair(zeta, u)
        } else {
            Ok(State::scalar(zeta))
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PetviashviliConfig {
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Plain steps between extrapolations is `width + 1`; `0` disables MPE.
    pub extrapolation_width: usize,
    /// `None` selects [`InitialGuess::default_for`].
    pub initial_guess: Option<InitialGuess>,
    pub tension: TensionConvention,
}

impl Default for PetviashviliConfig {
    fn default() -> Self {
        PetviashviliConfig {
            tolerance: 1e-10,
            max_iterations: 500,
            extrapolation_width: 6,
            initial_guess: None,
            tension: TensionConvention::Reduced,
        }
    }
}

impl PetviashviliConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "tolerance",
                reason: "must be positive",
            });
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iterations",
                reason: "must be positive",
            });
        }
        Ok(())
    }
}

/// A computed traveling wave.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveProfile {
    pub speed: f64,
    pub state: State,
    pub model: ModelKind,
    pub params: ModelParams,
    pub tension: TensionConvention,
}

impl WaveProfile {
    pub fn grid(&self) -> &GridSpec {
        self.state.grid()
    }

    pub fn amplitude(&self) -> f64 {
        self.state.zeta.values().iter().fold(f64::NEG_INFINITY, |a, &v| a.max(v))
    }

    /// Largest `|zeta|` (and `|u|`) over the outer tenth of the window.
    pub fn edge_magnitude(&self) -> f64 {
        let grid = self.grid();
        let cut = 0.9 * grid.half_length();
        let mut m = 0.0f64;
        for (j, x) in grid.nodes().into_iter().enumerate() {
            if x.abs() >= cut {
                m = m.max(self.state.zeta.values()[j].abs());
                if let Some(u) = &self.state.u {
                    m = m.max(u.values()[j].abs());
                }
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolverReport {
    pub iterations: usize,
    /// Independent physical-space residual after every plain step.
    pub residual_history: Vec<f64>,
    pub stabilizing_factor_history: Vec<f64>,
    /// Max-norm difference of successive plain iterates.
    pub increment_history: Vec<f64>,
    pub extrapolation_cycles: usize,
    pub converged: bool,
}

impl SolverReport {
    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(f64::NAN)
    }

    pub fn final_stabilizing_factor(&self) -> f64 {
        self.stabilizing_factor_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Scalar tension coefficient used by the traveling-wave equation.
fn tension_coefficient(p: &ModelParams, convention: TensionConvention) -> f64 {
    match convention {
        TensionConvention::Reduced => p.tension_reduced(),
        TensionConvention::Bare => p.tension(),
    }
}

trait FixedPoint {
    fn step(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)>;
    fn residual(&mut self, x: &[f64]) -> f64;
}

struct ScalarMap {
    transform: Transform,
    /// `l(k) = -c_s J(a) + c (1 + (2a-1)/(2g) sqrt(mu) |k|) + T' k^2`
    symbol: Vec<f64>,
    weights: Vec<f64>,
    kappa: f64,
    residual: ScalarResidual,
    spec: Spectrum,
    nl: Spectrum,
    scratch: Vec<f64>,
}

impl ScalarMap {
    fn new(speed: f64, p: &ModelParams, g: &GridSpec, convention: TensionConvention) -> Result<Self> {
        let c = p.c_gamma();
        let t = tension_coefficient(p, convention);
        let a = p.alpha();
        let ks = g.half_wavenumbers();
        let symbol: Vec<f64> = ks
            .iter()
            .map(|&k| {
                -speed * j_symbol(a, p, k)
                    + c * (1.0 + (2.0 * a - 1.0) / (2.0 * p.gamma()) * p.mu_sqrt() * k.abs())
                    + t * k * k
            })
            .collect();
        let scale = symbol.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        for (l, k) in symbol.iter().zip(&ks) {
            // a sign change means the continuous symbol vanishes between grid modes
            if l.abs() <= 1e-14 * scale || (*l > 0.0) != (symbol[0] > 0.0) {
                return Err(Error::Resonance { wavenumber: *k });
            }
        }
        Ok(ScalarMap {
            transform: Transform::new(g),
            weights: (0..ks.len()).map(|n| g.weight(n)).collect(),
            symbol,
            kappa: 0.75 * c * p.epsilon(),
            residual: ScalarResidual::new(speed, p, g, convention),
            spec: vec![ZERO; g.spectrum_len()],
            nl: vec![ZERO; g.spectrum_len()],
            scratch: vec![0.0; g.mode_count()],
        })
    }
}

impl FixedPoint for ScalarMap {
    fn step(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        self.transform.forward_into(x, &mut self.spec);
        self.transform.product_spectrum(x, x, &mut self.scratch, &mut self.nl);
        let mut num = 0.0;
        let mut den = 0.0;
        for n in 0..self.spec.len() {
            self.nl[n] *= self.kappa;
            let w = self.weights[n];
            num += w * self.symbol[n] * self.spec[n].norm_sqr();
            den += w * (self.spec[n].conj() * self.nl[n]).re;
        }
        let s = num / den;
        if !(den != 0.0 && s.is_finite()) {
            return Err(Error::DegenerateGuess);
        }
        let s2 = s * s;
        for n in 0..self.spec.len() {
            self.spec[n] = self.nl[n] * (s2 / self.symbol[n]);
        }
        let mut out = vec![0.0; x.len()];
        self.transform.inverse_into(&self.spec, &mut out);
        Ok((out, s))
    }

    fn residual(&mut self, x: &[f64]) -> f64 {
        self.residual.eval(x)
    }
}

struct SystemMap {
    transform: Transform,
    n: usize,
    // matrix symbol [[m11, m12], [m21, m22]] and its inverse
    m: Vec<[f64; 4]>,
    minv: Vec<[f64; 4]>,
    weights: Vec<f64>,
    coupling: f64,
    residual: SystemResidual,
    z: Spectrum,
    u: Spectrum,
    nz: Spectrum,
    nu: Spectrum,
    scratch: Vec<f64>,
}

impl SystemMap {
    fn new(speed: f64, p: &ModelParams, g: &GridSpec) -> Result<Self> {
        let ks = g.half_wavenumbers();
        let gm = p.gamma();
        let a = p.alpha();
        let m: Vec<[f64; 4]> = ks
            .iter()
            .map(|&k| {
                [
                    -speed * j_symbol(a, p, k),
                    j_symbol(a - 1.0, p, k) / gm,
                    (1.0 - gm) + p.tension() * k * k,
                    -speed,
                ]
            })
            .collect();
        let mut minv = Vec::with_capacity(m.len());
        let det0 = m[0][0] * m[0][3] - m[0][1] * m[0][2];
        for (row, k) in m.iter().zip(&ks) {
            let det = row[0] * row[3] - row[1] * row[2];
            let scale = (row[0] * row[3]).abs().max((row[1] * row[2]).abs());
            if det.abs() <= 1e-14 * scale || det == 0.0 || (det > 0.0) != (det0 > 0.0) {
                return Err(Error::Resonance { wavenumber: *k });
            }
            minv.push([row[3] / det, -row[1] / det, -row[2] / det, row[0] / det]);
        }
        let len = g.spectrum_len();
        Ok(SystemMap {
            transform: Transform::new(g),
            n: g.mode_count(),
            m,
            minv,
            weights: (0..len).map(|n| g.weight(n)).collect(),
            coupling: p.epsilon() / gm,
            residual: SystemResidual::new(speed, p, g),
            z: vec![ZERO; len],
            u: vec![ZERO; len],
            nz: vec![ZERO; len],
            nu: vec![ZERO; len],
            scratch: vec![0.0; g.mode_count()],
        })
    }
}

impl FixedPoint for SystemMap {
    fn step(&mut self, x: &[f64]) -> Result<(Vec<f64>, f64)> {
        let n = self.n;
        let (zeta, u) = x.split_at(n);
        self.transform.forward_into(zeta, &mut self.z);
        self.transform.forward_into(u, &mut self.u);
        self.transform.product_spectrum(zeta, u, &mut self.scratch, &mut self.nz);
        self.transform.product_spectrum(u, u, &mut self.scratch, &mut self.nu);
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..self.z.len() {
            self.nz[k] *= self.coupling;
            self.nu[k] *= 0.5 * self.coupling;
            let [m11, m12, m21, m22] = self.m[k];
            let mz = self.z[k] * m11 + self.u[k] * m12;
            let mu = self.z[k] * m21 + self.u[k] * m22;
            let w = self.weights[k];
            num += w * (self.z[k].conj() * mz + self.u[k].conj() * mu).re;
            den += w * (self.z[k].conj() * self.nz[k] + self.u[k].conj() * self.nu[k]).re;
        }
        let s = num / den;
        if !(den != 0.0 && s.is_finite()) {
            return Err(Error::DegenerateGuess);
        }
        let s2 = s * s;
        for k in 0..self.z.len() {
            let [i11, i12, i21, i22] = self.minv[k];
            let (a, b) = (self.nz[k], self.nu[k]);
            self.z[k] = (a * i11 + b * i12) * s2;
            self.u[k] = (a * i21 + b * i22) * s2;
        }
        let mut out = vec![0.0; 2 * n];
        let (oz, ou) = out.split_at_mut(n);
        self.transform.inverse_into(&self.z, oz);
        self.transform.inverse_into(&self.u, ou);
        Ok((out, s))
    }

    fn residual(&mut self, x: &[f64]) -> f64 {
        self.residual.eval(x)
    }
}

/// Physical-space evaluation of
/// `-c_s J(a) z + c (z - (3 eps/4) z^2 + (2a-1)/(2g) sqrt(mu) H z) - T' z''`.
struct ScalarResidual {
    transform: Transform,
    grid: GridSpec,
    speed: f64,
    params: ModelParams,
    tension: f64,
    spec: Spectrum,
    work: Spectrum,
    hz: Vec<f64>,
    zxx: Vec<f64>,
}

impl ScalarResidual {
    fn new(speed: f64, p: &ModelParams, g: &GridSpec, convention: TensionConvention) -> Self {
        ScalarResidual {
            transform: Transform::new(g),
            grid: *g,
            speed,
            params: *p,
            tension: tension_coefficient(p, convention),
            spec: vec![ZERO; g.spectrum_len()],
            work: vec![ZERO; g.spectrum_len()],
            hz: vec![0.0; g.mode_count()],
            zxx: vec![0.0; g.mode_count()],
        }
    }

    fn eval(&mut self, z: &[f64]) -> f64 {
        let p = &self.params;
        self.transform.forward_into(z, &mut self.spec);
        let ks = self.grid.half_wavenumbers();
        apply_real(&self.spec, &ks, |k| k.abs(), &mut self.work);
        self.transform.inverse_into(&self.work, &mut self.hz);
        apply_real(&self.spec, &ks, |k| -k * k, &mut self.work);
        self.transform.inverse_into(&self.work, &mut self.zxx);
        let c = p.c_gamma();
        let ja = p.alpha() * p.mu_sqrt() / p.gamma();
        let disp = (2.0 * p.alpha() - 1.0) / (2.0 * p.gamma()) * p.mu_sqrt();
        let mut r = 0.0f64;
        for ((&zj, &hz), &zxx) in z.iter().zip(&self.hz).zip(&self.zxx) {
            let jz = zj + ja * hz;
            let v = -self.speed * jz + c * (zj - 0.75 * p.epsilon() * zj * zj + disp * hz) - self.tension * zxx;
            r = r.max(v.abs());
        }
        r
    }
}

/// Physical-space evaluation of both rows of the system traveling-wave
/// equations.
struct SystemResidual {
    transform: Transform,
    grid: GridSpec,
    speed: f64,
    params: ModelParams,
    spec: Spectrum,
    work: Spectrum,
    hz: Vec<f64>,
    hu: Vec<f64>,
    zxx: Vec<f64>,
}

impl SystemResidual {
    fn new(speed: f64, p: &ModelParams, g: &GridSpec) -> Self {
        let n = g.mode_count();
        SystemResidual {
            transform: Transform::new(g),
            grid: *g,
            speed,
            params: *p,
            spec: vec![ZERO; g.spectrum_len()],
            work: vec![ZERO; g.spectrum_len()],
            hz: vec![0.0; n],
            hu: vec![0.0; n],
            zxx: vec![0.0; n],
        }
    }

    fn eval(&mut self, x: &[f64]) -> f64 {
        let p = self.params;
        let n = self.grid.mode_count();
        let (z, u) = x.split_at(n);
        let ks = self.grid.half_wavenumbers();
        self.transform.forward_into(z, &mut self.spec);
        apply_real(&self.spec, &ks, |k| k.abs(), &mut self.work);
        self.transform.inverse_into(&self.work, &mut self.hz);
        apply_real(&self.spec, &ks, |k| -k * k, &mut self.work);
        self.transform.inverse_into(&self.work, &mut self.zxx);
        self.transform.forward_into(u, &mut self.spec);
        apply_real(&self.spec, &ks, |k| k.abs(), &mut self.work);
        self.transform.inverse_into(&self.work, &mut self.hu);
        let gm = p.gamma();
        let eps = p.epsilon();
        let sm = p.mu_sqrt();
        let mut r = 0.0f64;
        for j in 0..n {
            let jz = z[j] + p.alpha() * sm / gm * self.hz[j];
            let ju = u[j] + (p.alpha() - 1.0) * sm / gm * self.hu[j];
            let row1 = -self.speed * jz + ju / gm - eps / gm * z[j] * u[j];
            let row2 = (1.0 - gm) * z[j] - p.tension() * self.zxx[j] - self.speed * u[j] - eps / (2.0 * gm) * u[j] * u[j];
            r = r.max(row1.abs()).max(row2.abs());
        }
        r
    }
}

fn apply_real(spec: &[Complex64], ks: &[f64], f: impl Fn(f64) -> f64, out: &mut [Complex64]) {
    let nyq = spec.len() - 1;
    for n in 0..spec.len() {
        out[n] = spec[n] * f(ks[n]);
    }
    out[nyq] = Complex64::new(out[nyq].re, 0.0);
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn iterate(map: &mut dyn FixedPoint, start: Vec<f64>, cfg: &PetviashviliConfig) -> Result<(Vec<f64>, SolverReport)> {
    let mut report = SolverReport::default();
    let tol = cfg.tolerance;
    let width = cfg.extrapolation_width;
    let mut x = start;
    'outer: loop {
        let mut window: Vec<Vec<f64>> = Vec::with_capacity(width + 2);
        if width > 0 {
            window.push(x.clone());
        }
        loop {
            let (next, s) = map.step(&x)?;
            let increment = max_abs_diff(&next, &x);
            x = next;
            let res = map.residual(&x);
            report.iterations += 1;
            report.increment_history.push(increment);
            report.residual_history.push(res);
            report.stabilizing_factor_history.push(s);
            if !res.is_finite() || x.iter().any(|v| !v.is_finite()) {
                break 'outer;
            }
            if increment < tol && res < 10.0 * tol && (s - 1.0).abs() < 1e-8 {
                report.converged = true;
                break 'outer;
            }
            if report.iterations >= cfg.max_iterations {
                break 'outer;
            }
            if width > 0 {
                window.push(x.clone());
                if window.len() == width + 2 {
                    break;
                }
            }
        }
        x = mpe_extrapolate(&window);
        report.extrapolation_cycles += 1;
    }
    Ok((x, report))
}

fn recenter(state: &mut State) {
    let grid = *state.grid();
    let mut t = Transform::new(&grid);
    let spec = t.forward(&state.zeta);
    let (x_peak, _, _) = locate_peak(&state.zeta, &spec);
    if x_peak.abs() < 1e-15 {
        return;
    }
    let shift = |f: &GridFunction, t: &mut Transform| {
        let mut s = t.forward(f);
        shift_spectrum(&grid, &mut s, x_peak);
        t.inverse(&s)
    };
    state.zeta = shift(&state.zeta, &mut t);
    if let Some(u) = &state.u {
        state.u = Some(shift(u, &mut t));
    }
}

fn solve_with(
    kind: ModelKind,
    speed: f64,
    p: &ModelParams,
    g: &GridSpec,
    cfg: &PetviashviliConfig,
) -> Result<(WaveProfile, SolverReport)> {
    cfg.validate()?;
    if !(speed != 0.0 && speed.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "speed",
            reason: "must be finite and non-zero",
        });
    }
    let p = p.for_model(kind);
    let guess = match &cfg.initial_guess {
        Some(guess) => guess.clone(),
        None => InitialGuess::default_for(speed, &p)?,
    };
    let start = guess.build(kind, speed, &p, g)?;
    let tension = if kind.has_velocity() {
        TensionConvention::Bare
    } else {
        cfg.tension
    };
    let (x, report) = if kind.has_velocity() {
        let mut map = SystemMap::new(speed, &p, g)?;
        iterate(&mut map, start.flatten(), cfg)?
    } else {
        let mut map = ScalarMap::new(speed, &p, g, tension)?;
        iterate(&mut map, start.flatten(), cfg)?
    };
    let mut state = State::from_flat(*g, kind.has_velocity(), &x);
    if report.converged {
        recenter(&mut state);
    }
    Ok((
        WaveProfile {
            speed,
            state,
            model: kind,
            params: p,
            tension,
        },
        report,
    ))
}

/// Traveling wave of the rBenjamin family (Benjamin equation when `alpha = 0`).
pub fn solve_rbenjamin(
    speed: f64,
    p: &ModelParams,
    g: &GridSpec,
    cfg: &PetviashviliConfig,
) -> Result<(WaveProfile, SolverReport)> {
    let kind = if p.alpha() == 0.0 {
        ModelKind::Benjamin
    } else {
        ModelKind::RBenjamin
    };
    solve_with(kind, speed, p, g, cfg)
}

/// Traveling wave `(zeta, u)` of the Benjamin system.
pub fn solve_system(
    speed: f64,
    p: &ModelParams,
    g: &GridSpec,
    cfg: &PetviashviliConfig,
) -> Result<(WaveProfile, SolverReport)> {
    solve_with(ModelKind::BenjaminSystem, speed, p, g, cfg)
}

/// Dispatches on the model kind; `Benjamin` ignores `p.alpha()`.
pub fn solve(
    kind: ModelKind,
    speed: f64,
    p: &ModelParams,
    g: &GridSpec,
    cfg: &PetviashviliConfig,
) -> Result<(WaveProfile, SolverReport)> {
    solve_with(kind, speed, p, g, cfg)
}

/// Max-norm of the traveling-wave equations evaluated at `w`, assembled in
/// physical space term by term.
pub fn residual(w: &WaveProfile) -> f64 {
    let g = *w.grid();
    match &w.state.u {
        Some(u) => {
            let mut x = w.state.zeta.values().to_vec();
            x.extend_from_slice(u.values());
            SystemResidual::new(w.speed, &w.params, &g).eval(&x)
        }
        None => ScalarResidual::new(w.speed, &w.params, &g, w.tension).eval(w.state.zeta.values()),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub speed: f64,
    /// `max zeta`; `NaN` when the solve failed outright.
    pub amplitude: f64,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub error: Option<Error>,
}

/// Amplitude of the traveling wave at each speed, warm-starting every solve
/// from the previous converged profile. Failures are recorded per row.
pub fn speed_amplitude_sweep(
    kind: ModelKind,
    p: &ModelParams,
    g: &GridSpec,
    speeds: &[f64],
    cfg: &PetviashviliConfig,
) -> Vec<SweepRow> {
    let mut rows = Vec::with_capacity(speeds.len());
    let mut previous: Option<State> = None;
    for &speed in speeds {
        let mut local = cfg.clone();
        if let Some(prev) = &previous {
            local.initial_guess = Some(InitialGuess::Supplied(prev.clone()));
        }
        let mut outcome = solve(kind, speed, p, g, &local);
        let warm_failed = !matches!(&outcome, Ok((_, r)) if r.converged);
        if warm_failed && previous.is_some() {
            outcome = solve(kind, speed, p, g, cfg);
        }
        match outcome {
            Ok((w, report)) => {
                if report.converged {
                    previous = Some(w.state.clone());
                }
                rows.push(SweepRow {
                    speed,
                    amplitude: w.amplitude(),
                    converged: report.converged,
                    iterations: report.iterations,
                    residual: report.final_residual(),
                    error: None,
                });
            }
            Err(e) => rows.push(SweepRow {
                speed,
                amplitude: f64::NAN,
                converged: false,
                iterations: 0,
                residual: f64::NAN,
                error: Some(e),
            }),
        }
    }
    rows
}

/// True when, over converged rows, amplitude strictly increases with
/// `c_gamma - |c_s|`.
pub fn amplitude_increases_with_gap(rows: &[SweepRow], c_gamma: f64) -> bool {
    let mut pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.converged)
        .map(|r| (c_gamma - r.speed.abs(), r.amplitude))
        .collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2).all(|w| w[1].1 > w[0].1)
}
