//! Periodic Fourier grid on `(-L, L)` and diagonal multiplier operators.
//!
//! Spectra are stored as the non-negative half of the Hermitian spectrum,
//! `c_n` for `n = 0..=N/2`, normalized so that
//! `f(x_j) = sum_n c_n exp(i k_n (x_j + L))` with `k_n = pi n / L`.
//! Index `N/2` is the unpaired Nyquist mode.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::RealFft;
use crate::models::ModelParams;

/// Half spectrum of a real grid function.
pub type Spectrum = Vec<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    half_length: f64,
    mode_count: usize,
    dealias: bool,
}

impl GridSpec {
    pub fn new(half_length: f64, mode_count: usize) -> Result<Self> {
        if !(half_length.is_finite() && half_length > 0.0) {
            return Err(Error::InvalidParameter {
                name: "half_length",
                reason: "must be finite and positive",
            });
        }
        if mode_count < 8 || !mode_count.is_multiple_of(2) {
            return Err(Error::InvalidParameter {
                name: "mode_count",
                reason: "must be an even integer >= 8",
            });
        }
        Ok(GridSpec {
            half_length,
            mode_count,
            dealias: false,
        })
    }

    /// Enables 2/3-rule truncation of quadratic products.
    pub fn with_dealiasing(mut self, on: bool) -> Self {
        self.dealias = on;
        self
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn dealiased(&self) -> bool {
        self.dealias
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_length / self.mode_count as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_length + self.spacing() * j as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.mode_count).map(|j| self.node(j)).collect()
    }

    pub fn spectrum_len(&self) -> usize {
        self.mode_count / 2 + 1
    }

    /// Wavenumber of DFT index `j` in the signed set `-N/2..N/2`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let n = self.mode_count as isize;
        let j = j as isize;
        let signed = if j < n / 2 { j } else { j - n };
        PI * signed as f64 / self.half_length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.mode_count).map(|j| self.wavenumber(j)).collect()
    }

    /// Non-negative wavenumbers `pi n / L`, `n = 0..=N/2`.
    pub fn half_wavenumbers(&self) -> Vec<f64> {
        (0..self.spectrum_len())
            .map(|n| PI * n as f64 / self.half_length)
            .collect()
    }

    pub fn nyquist_index(&self) -> usize {
        self.mode_count / 2
    }

    /// Multiplicity of half-spectrum index `n` in the full spectrum.
    pub(crate) fn weight(&self, n: usize) -> f64 {
        if n == 0 || n == self.nyquist_index() {
            1.0
        } else {
            2.0
        }
    }

    /// Returns the same grid with `factor` times the modes and window.
    pub fn scaled(&self, factor: usize) -> Result<Self> {
        Ok(GridSpec::new(self.half_length * factor as f64, self.mode_count * factor)?
            .with_dealiasing(self.dealias))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: len,
            });
        }
        Ok(())
    }

    fn same_as(&self, other: &GridSpec) -> Result<()> {
        if self.mode_count != other.mode_count {
            return Err(Error::DimensionMismatch {
                expected: self.mode_count,
                found: other.mode_count,
            });
        }
        if self.half_length != other.half_length {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: "operands live on windows of different length",
            });
        }
        Ok(())
    }
}

/// Physical samples of a real function on a [`GridSpec`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: GridSpec,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self> {
        grid.check_len(values.len())?;
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        GridFunction {
            grid,
            values: vec![0.0; grid.mode_count],
        }
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.mode_count).map(|j| f(grid.node(j))).collect();
        GridFunction { grid, values }
    }

    pub(crate) fn from_raw(grid: GridSpec, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.mode_count);
        GridFunction { grid, values }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Periodic rectangle rule over `(-L, L)`.
    pub fn integral(&self) -> f64 {
        self.grid.spacing() * self.values.iter().sum::<f64>()
    }

    /// Rectangle-rule `L^2` inner product.
    pub fn dot(&self, other: &GridFunction) -> f64 {
        self.grid.spacing()
            * self
                .values
                .iter()
                .zip(other.values.iter())
                .map(|(a, b)| a * b)
                .sum::<f64>()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_raw(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        GridFunction::from_raw(
            self.grid,
            self.values
                .iter()
                .zip(other.values.iter())
                .map(|(&a, &b)| f(a, b))
                .collect(),
        )
    }

    /// `a * self + b * other`
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> GridFunction {
        self.zip_with(other, |x, y| a * x + b * y)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(other.values.iter())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `g(x) = f(-x)` on the periodic grid (`x_j -> x_{N-j}`).
    pub fn reflected(&self) -> GridFunction {
        let n = self.values.len();
        let values = (0..n).map(|j| self.values[(n - j) % n]).collect();
        GridFunction::from_raw(self.grid, values)
    }
}

/// Fourier multiplier with a conjugate-symmetric symbol.
///
/// Only the symbol on `k >= 0` is stored; `symbol(-k) = conj(symbol(k))`.
/// At the Nyquist mode the real part of the symbol is used, which zeroes the
/// unpaired coefficient for odd symbols such as `ik` or `ik^3`.
#[derive(Debug, Clone, PartialEq)]
pub struct Multiplier {
    grid: GridSpec,
    symbol: Vec<Complex64>,
}

impl Multiplier {
    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let symbol = grid.half_wavenumbers().into_iter().map(f).collect();
        Multiplier { grid, symbol }
    }

    pub fn real(grid: GridSpec, f: impl Fn(f64) -> f64) -> Self {
        Multiplier::from_fn(grid, |k| Complex64::new(f(k), 0.0))
    }

    pub fn identity(grid: GridSpec) -> Self {
        Multiplier::real(grid, |_| 1.0)
    }

    /// Symbol `(ik)^order`.
    pub fn derivative(grid: GridSpec, order: u32) -> Self {
        Multiplier::from_fn(grid, |k| (I * k).powu(order))
    }

    /// Symbol `|k|`.
    pub fn abs_wavenumber(grid: GridSpec) -> Self {
        Multiplier::real(grid, |k| k.abs())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Stored symbol on `k_n = pi n / L`, `n = 0..=N/2`.
    pub fn half_symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    /// Symbol at full DFT index `j` (signed set, Nyquist at `j = N/2`).
    pub fn symbol_at(&self, j: usize) -> Complex64 {
        let n = self.grid.mode_count;
        let nyq = n / 2;
        if j == nyq {
            Complex64::new(self.symbol[nyq].re, 0.0)
        } else if j < nyq {
            self.symbol[j]
        } else {
            self.symbol[n - j].conj()
        }
    }

    /// Symbol aligned with [`GridSpec::wavenumbers`].
    pub fn full_symbol(&self) -> Vec<Complex64> {
        (0..self.grid.mode_count).map(|j| self.symbol_at(j)).collect()
    }

    pub fn compose(&self, other: &Multiplier) -> Result<Multiplier> {
        self.grid.same_as(&other.grid)?;
        Ok(Multiplier {
            grid: self.grid,
            symbol: self
                .symbol
                .iter()
                .zip(other.symbol.iter())
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn scale(&self, factor: f64) -> Multiplier {
        Multiplier {
            grid: self.grid,
            symbol: self.symbol.iter().map(|s| s * factor).collect(),
        }
    }

    pub fn reciprocal(&self) -> Result<Multiplier> {
        let ks = self.grid.half_wavenumbers();
        let mut symbol = Vec::with_capacity(self.symbol.len());
        for (s, k) in self.symbol.iter().zip(ks) {
            if s.norm() == 0.0 {
                return Err(Error::Resonance { wavenumber: k });
            }
            symbol.push(s.inv());
        }
        Ok(Multiplier {
            grid: self.grid,
            symbol,
        })
    }

    pub(crate) fn apply_in_place(&self, spec: &mut [Complex64]) {
        let nyq = self.symbol.len() - 1;
        for (c, s) in spec[..nyq].iter_mut().zip(self.symbol.iter()) {
            *c *= s;
        }
        spec[nyq] = Complex64::new((spec[nyq] * self.symbol[nyq].re).re, 0.0);
    }
}

/// Transform workspace tied to one grid. Not shared across threads.
#[derive(Debug, Clone)]
pub struct Transform {
    grid: GridSpec,
    fft: RealFft,
}

impl Transform {
    pub fn new(grid: &GridSpec) -> Self {
        Transform {
            grid: *grid,
            fft: RealFft::new(grid.mode_count),
        }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn forward_into(&mut self, values: &[f64], out: &mut [Complex64]) {
        self.fft.forward(values, out);
    }

    pub fn inverse_into(&mut self, spec: &[Complex64], out: &mut [f64]) {
        self.fft.inverse(spec, out);
    }

    pub fn forward(&mut self, f: &GridFunction) -> Spectrum {
        let mut out = vec![ZERO; self.grid.spectrum_len()];
        self.fft.forward(&f.values, &mut out);
        out
    }

    pub fn inverse(&mut self, spec: &[Complex64]) -> GridFunction {
        let mut values = vec![0.0; self.grid.mode_count];
        self.fft.inverse(spec, &mut values);
        GridFunction::from_raw(self.grid, values)
    }

    pub fn apply(&mut self, f: &GridFunction, m: &Multiplier) -> GridFunction {
        let mut spec = self.forward(f);
        m.apply_in_place(&mut spec);
        self.inverse(&spec)
    }

    /// Zeroes modes above `N/3` when the grid asks for dealiasing.
    pub fn truncate(&self, spec: &mut [Complex64]) {
        if self.grid.dealias {
            let cut = self.grid.mode_count / 3;
            for c in spec.iter_mut().skip(cut + 1) {
                *c = ZERO;
            }
        }
    }

    /// Spectrum of the pointwise product `a * b`.
    pub fn product_spectrum(&mut self, a: &[f64], b: &[f64], scratch: &mut [f64], out: &mut [Complex64]) {
        for ((s, x), y) in scratch.iter_mut().zip(a).zip(b) {
            *s = x * y;
        }
        self.fft.forward(scratch, out);
        self.truncate(out);
    }
}

fn check_finite(f: &GridFunction) -> Result<()> {
    if let Some(index) = f.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Ok(())
}

/// Inverse transform of `m` times the forward transform of `f`.
pub fn apply_multiplier(f: &GridFunction, m: &Multiplier) -> Result<GridFunction> {
    f.grid.same_as(&m.grid)?;
    check_finite(f)?;
    Ok(Transform::new(&f.grid).apply(f, m))
}

/// The nonlocal operator with symbol `|k|`; its output always has zero mean.
pub fn hilbert_like(f: &GridFunction) -> Result<GridFunction> {
    apply_multiplier(f, &Multiplier::abs_wavenumber(f.grid))
}

/// Spectral derivative of the given order.
pub fn derivative(f: &GridFunction, order: u32) -> Result<GridFunction> {
    apply_multiplier(f, &Multiplier::derivative(f.grid, order))
}

/// `1 + (r sqrt(mu) / gamma) |k|`; `r` may be negative.
pub(crate) fn j_symbol(r: f64, p: &ModelParams, k: f64) -> f64 {
    1.0 + r * p.mu_sqrt() / p.gamma() * k.abs()
}

/// Multiplier of the regularizing operator `J(alpha)`.
pub fn j_alpha(alpha: f64, p: &ModelParams, g: &GridSpec) -> Result<Multiplier> {
    if !alpha.is_finite() || alpha < 0.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "must be finite and non-negative",
        });
    }
    Ok(Multiplier::real(*g, |k| j_symbol(alpha, p, k)))
}

/// Evaluates the trigonometric interpolant of `spec` and its first two
/// derivatives at `x`.
pub(crate) fn evaluate_with_derivatives(grid: &GridSpec, spec: &[Complex64], x: f64) -> [f64; 3] {
    let l = grid.half_length;
    let nyq = grid.nyquist_index();
    let mut out = [0.0; 3];
    for (n, c) in spec.iter().enumerate() {
        let k = PI * n as f64 / l;
        let w = grid.weight(n);
        let theta = k * (x + l);
        let e = Complex64::new(libm::cos(theta), libm::sin(theta));
        let c = if n == nyq { Complex64::new(c.re, 0.0) } else { *c };
        let v = c * e;
        out[0] += w * v.re;
        out[1] += w * (I * k * v).re;
        out[2] += w * (-k * k * v).re;
    }
    out
}

/// Location and height of the maximum of the interpolant, refined from
/// the grid maximum by Newton's method. Ties pick the leftmost node;
/// the flag reports whether a tie occurred.
pub fn locate_peak(f: &GridFunction, spec: &[Complex64]) -> (f64, f64, bool) {
    let vals = f.values();
    let mut best = 0;
    let mut tie = false;
    for (j, &v) in vals.iter().enumerate().skip(1) {
        if v > vals[best] {
            best = j;
            tie = false;
        } else if v == vals[best] {
            tie = true;
        }
    }
    let grid = f.grid();
    let h = grid.spacing();
    let x0 = grid.node(best);
    let mut x = x0;
    for _ in 0..20 {
        let [_, d1, d2] = evaluate_with_derivatives(grid, spec, x);
        if d2.is_nan() || d2 >= 0.0 {
            break;
        }
        let dx = -d1 / d2;
        x = (x + dx).clamp(x0 - h, x0 + h);
        if dx.abs() < 1e-14 * (1.0 + x.abs()) {
            break;
        }
    }
    let [v, _, _] = evaluate_with_derivatives(grid, spec, x);
    if v < vals[best] {
        return (x0, vals[best], tie);
    }
    (x, v, tie)
}

/// Spectrum of `g(x) = f(x + s)`.
pub fn shift_spectrum(grid: &GridSpec, spec: &mut [Complex64], s: f64) {
    let nyq = grid.nyquist_index();
    for (n, c) in spec.iter_mut().enumerate() {
        let theta = PI * n as f64 / grid.half_length * s;
        *c *= Complex64::new(libm::cos(theta), libm::sin(theta));
        if n == nyq {
            *c = Complex64::new(c.re, 0.0);
        }
    }
}

/// Discrete `L^2` norm from the half spectrum (Parseval).
pub fn parseval_norm_sq(grid: &GridSpec, spec: &[Complex64]) -> f64 {
    let nyq = grid.nyquist_index();
    let s: f64 = spec
        .iter()
        .enumerate()
        .map(|(n, c)| {
            if n == nyq {
                grid.weight(n) * c.re * c.re
            } else {
                grid.weight(n) * c.norm_sqr()
            }
        })
        .sum();
    2.0 * grid.half_length * s
}

/// Wraps `d` into `[-L, L)`.
pub fn wrap_periodic(d: f64, half_length: f64) -> f64 {
    let period = 2.0 * half_length;
    let mut r = (d + half_length) % period;
    if r < 0.0 {
        r += period;
    }
    r - half_length
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(10.0, 64).unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(0.0, 64).is_err());
        assert!(GridSpec::new(1.0, 7).is_err());
        assert!(GridSpec::new(1.0, 6).is_err());
        assert!(GridSpec::new(f64::NAN, 64).is_err());
    }

    #[test]
    fn nodes_and_wavenumbers() {
        let g = grid();
        let x = g.nodes();
        assert_eq!(x[0], -10.0);
        for w in x.windows(2) {
            assert!((w[1] - w[0] - g.spacing()).abs() < 1e-14);
        }
        let k = g.wavenumbers();
        // symmetric except Nyquist
        for j in 1..32 {
            assert_eq!(k[j], -k[64 - j]);
        }
        assert!(k[32] < 0.0);
    }

    #[test]
    fn identity_and_derivative_on_single_modes() {
        let g = grid();
        let l = g.half_length();
        let f = GridFunction::from_fn(g, |x| libm::sin(PI * x / l));
        let same = apply_multiplier(&f, &Multiplier::identity(g)).unwrap();
        assert!(same.max_abs_diff(&f) < 1e-12);
        let df = derivative(&f, 1).unwrap();
        let expected = GridFunction::from_fn(g, |x| PI / l * libm::cos(PI * x / l));
        assert!(df.max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn hilbert_like_modes() {
        let g = grid();
        let l = g.half_length();
        let c = GridFunction::from_fn(g, |_| 2.5);
        assert!(hilbert_like(&c).unwrap().max_abs() < 1e-13);
        let f = GridFunction::from_fn(g, |x| libm::cos(3.0 * PI * x / l));
        let expected = f.map(|v| 3.0 * PI / l * v);
        assert!(hilbert_like(&f).unwrap().max_abs_diff(&expected) < 1e-12);
    }

    #[test]
    fn grid_mismatch_and_non_finite() {
        let g = grid();
        let other = GridSpec::new(10.0, 32).unwrap();
        let f = GridFunction::zeros(g);
        assert!(matches!(
            apply_multiplier(&f, &Multiplier::identity(other)),
            Err(Error::DimensionMismatch { .. })
        ));
        let mut v = vec![0.0; 64];
        v[3] = f64::INFINITY;
        assert_eq!(GridFunction::new(g, v).unwrap_err(), Error::NonFinite { index: 3 });
    }

    #[test]
    fn j_alpha_symbol() {
        let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap();
        let g = grid();
        let j0 = j_alpha(0.0, &p, &g).unwrap();
        assert!(j0.half_symbol().iter().all(|s| *s == Complex64::new(1.0, 0.0)));
        assert_eq!(j_symbol(1.2, &p, 1.0), 1.0 + 0.12 / 0.4);
        assert!((j_symbol(1.2, &p, 1.0) - 1.3).abs() < 1e-15);
        let j = j_alpha(1.2, &p, &g).unwrap();
        assert_eq!(j.half_symbol()[0].re, 1.0);
        assert!(j.half_symbol().iter().all(|s| s.re >= 1.0 && s.im == 0.0));
        let id = j.compose(&j.reciprocal().unwrap()).unwrap();
        assert!(id.half_symbol().iter().all(|s| (s - 1.0).norm() < 1e-12));
        assert!(j_alpha(-0.1, &p, &g).is_err());
    }

    #[test]
    fn nyquist_zeroed_for_odd_symbols() {
        let g = grid();
        let f = GridFunction::from_fn(g, |x| libm::cos(PI * 32.0 * (x + 10.0) / 10.0));
        let df = derivative(&f, 1).unwrap();
        assert!(df.max_abs() < 1e-12);
        let hf = hilbert_like(&f).unwrap();
        assert!((hf.max_abs() - PI * 32.0 / 10.0).abs() < 1e-10);
    }

    #[test]
    fn peak_location_is_subgrid() {
        let g = grid();
        let x0 = 0.0371;
        let f = GridFunction::from_fn(g, |x| libm::exp(-(x - x0) * (x - x0)));
        let spec = Transform::new(&g).forward(&f);
        let (x, v, tie) = locate_peak(&f, &spec);
        assert!((x - x0).abs() < 1e-8, "{x}");
        assert!((v - 1.0).abs() < 1e-8);
        assert!(!tie);
    }

    #[test]
    fn shift_matches_analytic() {
        let g = grid();
        let f = GridFunction::from_fn(g, |x| libm::exp(-x * x));
        let mut t = Transform::new(&g);
        let mut spec = t.forward(&f);
        shift_spectrum(&g, &mut spec, 0.3);
        let shifted = t.inverse(&spec);
        let expected = GridFunction::from_fn(g, |x| libm::exp(-(x + 0.3) * (x + 0.3)));
        assert!(shifted.max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn wrap() {
        assert_eq!(wrap_periodic(0.5, 1.0), 0.5);
        assert!((wrap_periodic(1.5, 1.0) + 0.5).abs() < 1e-15);
        assert!((wrap_periodic(-1.5, 1.0) - 0.5).abs() < 1e-15);
    }
}
