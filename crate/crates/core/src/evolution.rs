//! Time integration on the Fourier collocation semidiscretization.
//!
//! One step of size `dt` is the symmetric triple-jump composition of the
//! implicit midpoint rule with weights `w1 = w3 = 1/(2 - 2^{1/3})` and
//! `w2 = 1 - 2 w1`, which is fourth order and time reversible. Each
//! midpoint stage `Y = y0 + (h/2) f(Y)` with `f = Λ + N` is written as
//! `Y = (I - (h/2) Λ)^{-1} (y0 + (h/2) N(Y))` and solved by fixed-point
//! iteration on the Fourier coefficients.

// Failures carry the partial trace by value.
#![allow(clippy::result_large_err)]

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::invariants::{evaluate_all, Functional};
use crate::models::{ModelKind, ModelParams, RBenjaminOp, State, SystemOp};
use crate::spectral::{locate_peak, wrap_periodic, GridSpec, Transform, ZERO};

pub const INNER_TOLERANCE: f64 = 1e-12;
pub const MAX_INNER_ITERATIONS: usize = 100;
/// Upper bound on the number of steps a [`TimeGrid`] may request.
pub const STEP_BUDGET: usize = 50_000_000;

fn composition_weights() -> [f64; 3] {
    let w1 = 1.0 / (2.0 - libm::cbrt(2.0));
    [w1, 1.0 - 2.0 * w1, w1]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub t_end: f64,
    pub dt: f64,
    /// Steps between recorded snapshots.
    pub snapshot_stride: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, dt: f64, snapshot_stride: usize) -> Result<Self> {
        let tg = TimeGrid {
            t_end,
            dt,
            snapshot_stride,
        };
        tg.validate()?;
        Ok(tg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "t_end",
                reason: "must be positive",
            });
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must be positive",
            });
        }
        if self.snapshot_stride == 0 {
            return Err(Error::InvalidParameter {
                name: "snapshot_stride",
                reason: "must be at least 1",
            });
        }
        let ratio = self.t_end / self.dt;
        if (ratio - libm::round(ratio)).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "must divide t_end",
            });
        }
        if ratio > STEP_BUDGET as f64 {
            return Err(Error::InvalidParameter {
                name: "dt",
                reason: "step count exceeds the budget",
            });
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        libm::round(self.t_end / self.dt) as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvariantSeries {
    pub functional: Functional,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    pub model: ModelKind,
    pub params: ModelParams,
    pub times: Vec<f64>,
    pub snapshots: Vec<State>,
    /// One series per functional of the model, aligned with `times`.
    pub invariant_series: Vec<InvariantSeries>,
    /// Total inner fixed-point iterations of every step taken.
    pub step_iterations: Vec<usize>,
    /// False when the run stopped early.
    pub completed: bool,
}

impl EvolutionTrace {
    pub fn series(&self, f: Functional) -> Option<&[f64]> {
        self.invariant_series
            .iter()
            .find(|s| s.functional == f)
            .map(|s| s.values.as_slice())
    }

    /// `max_t |F(t) - F(0)| / max(1, |F(0)|)`.
    pub fn relative_drift(&self, f: Functional) -> Option<f64> {
        let v = self.series(f)?;
        let f0 = *v.first()?;
        let scale = f0.abs().max(1.0);
        Some(v.iter().fold(0.0f64, |m, x| m.max((x - f0).abs())) / scale)
    }

    pub fn last(&self) -> Option<&State> {
        self.snapshots.last()
    }
}

/// A failed run together with everything recorded before the failure.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionFailure {
    pub trace: EvolutionTrace,
    pub error: Error,
}

#[derive(Debug, Clone)]
enum Operator {
    Scalar(RBenjaminOp),
    System(SystemOp),
}

/// Reusable stepping workspace for one model on one grid.
#[derive(Debug, Clone)]
pub struct Integrator {
    kind: ModelKind,
    grid: GridSpec,
    op: Operator,
    len: usize,
    resolvents: Vec<(f64, Vec<[Complex64; 4]>)>,
    y0: Vec<Complex64>,
    stage: Vec<Complex64>,
    next: Vec<Complex64>,
    nl: Vec<Complex64>,
    last_iterations: usize,
}

impl Integrator {
    pub fn new(kind: ModelKind, p: &ModelParams, g: &GridSpec) -> Self {
        let p = p.for_model(kind);
        let len = g.spectrum_len();
        let comps = if kind.has_velocity() { 2 } else { 1 };
        let op = if kind.has_velocity() {
            Operator::System(SystemOp::new(&p, g))
        } else {
            Operator::Scalar(RBenjaminOp::new(&p, g))
        };
        Integrator {
            kind,
            grid: *g,
            op,
            len,
            resolvents: Vec::new(),
            y0: vec![ZERO; comps * len],
            stage: vec![ZERO; comps * len],
            next: vec![ZERO; comps * len],
            nl: vec![ZERO; comps * len],
            last_iterations: 0,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Inner iterations spent by the last call to [`Integrator::step_coefficients`].
    pub fn last_iterations(&self) -> usize {
        self.last_iterations
    }

    fn transform(&mut self) -> &mut Transform {
        match &mut self.op {
            Operator::Scalar(op) => &mut op.transform,
            Operator::System(op) => &mut op.transform,
        }
    }

    pub fn to_coefficients(&mut self, s: &State) -> Result<Vec<Complex64>> {
        s.check_model(self.kind)?;
        if s.grid() != &self.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.mode_count(),
                found: s.grid().mode_count(),
            });
        }
        // with dealiasing the state lives in the truncated space
        let mut out = self.transform().forward(&s.zeta);
        self.transform().truncate(&mut out);
        if let Some(u) = &s.u {
            let mut uh = self.transform().forward(u);
            self.transform().truncate(&mut uh);
            out.extend(uh);
        }
        Ok(out)
    }

    pub fn to_state(&mut self, y: &[Complex64]) -> State {
        let len = self.len;
        let zeta = self.transform().inverse(&y[..len]);
        let u = if self.kind.has_velocity() {
            Some(self.transform().inverse(&y[len..]))
        } else {
            None
        };
        State { zeta, u }
    }

    fn resolvent(&mut self, theta: f64) -> usize {
        if let Some(i) = self.resolvents.iter().position(|(t, _)| *t == theta) {
            return i;
        }
        let table: Vec<[Complex64; 4]> = match &self.op {
            Operator::Scalar(op) => op
                .linear
                .iter()
                .map(|l| {
                    let r = (Complex64::new(1.0, 0.0) - l * theta).inv();
                    [r, ZERO, ZERO, ZERO]
                })
                .collect(),
            Operator::System(op) => op
                .a
                .iter()
                .zip(&op.b)
                .map(|(a, b)| {
                    // (I - theta [[0, a], [b, 0]])^{-1}
                    let det = Complex64::new(1.0, 0.0) - a * b * theta * theta;
                    let inv = det.inv();
                    [inv, a * theta * inv, b * theta * inv, inv]
                })
                .collect(),
        };
        if self.resolvents.len() >= 8 {
            self.resolvents.remove(0);
        }
        self.resolvents.push((theta, table));
        self.resolvents.len() - 1
    }

    fn nonlinear(&mut self, y: &[Complex64]) {
        let len = self.len;
        match &mut self.op {
            Operator::Scalar(op) => op.nonlinear(y, &mut self.nl),
            Operator::System(op) => {
                let (nz, nu) = self.nl.split_at_mut(len);
                op.nonlinear(&y[..len], &y[len..], nz, nu);
            }
        }
    }

    /// Applies `(I - theta Λ)^{-1}` to `rhs`, writing into `out`.
    fn apply_resolvent(&self, idx: usize, rhs: &[Complex64], out: &mut [Complex64]) {
        let table = &self.resolvents[idx].1;
        let len = self.len;
        if self.kind.has_velocity() {
            for n in 0..len {
                let [r11, r12, r21, r22] = table[n];
                let (z, u) = (rhs[n], rhs[len + n]);
                out[n] = r11 * z + r12 * u;
                out[len + n] = r21 * z + r22 * u;
            }
        } else {
            for n in 0..len {
                out[n] = table[n][0] * rhs[n];
            }
        }
    }

    fn midpoint(&mut self, y: &mut [Complex64], h: f64) -> Result<usize> {
        let theta = 0.5 * h;
        let idx = self.resolvent(theta);
        self.y0.copy_from_slice(y);
        self.stage.copy_from_slice(y);
        let mut rhs = vec![ZERO; y.len()];
        let mut prev = f64::INFINITY;
        for it in 1..=MAX_INNER_ITERATIONS {
            let stage = core::mem::take(&mut self.stage);
            self.nonlinear(&stage);
            self.stage = stage;
            for ((r, a), b) in rhs.iter_mut().zip(&self.y0).zip(&self.nl) {
                *r = a + b * theta;
            }
            let mut next = core::mem::take(&mut self.next);
            self.apply_resolvent(idx, &rhs, &mut next);
            let mut diff = 0.0f64;
            let mut scale = 0.0f64;
            for (a, b) in next.iter().zip(&self.stage) {
                diff += (a - b).norm();
                scale += a.norm();
            }
            core::mem::swap(&mut self.stage, &mut next);
            self.next = next;
            if !diff.is_finite() {
                return Err(Error::NonFiniteState { time: f64::NAN });
            }
            let scale = scale.max(f64::MIN_POSITIVE);
            // accept on tolerance, or on round-off stagnation just above it
            if diff <= INNER_TOLERANCE * scale
                || (it > 2 && diff >= 0.5 * prev && diff <= 1e3 * INNER_TOLERANCE * scale)
            {
                for ((out, s), a) in y.iter_mut().zip(&self.stage).zip(&self.y0) {
                    *out = s * 2.0 - a;
                }
                return Ok(it);
            }
            prev = diff;
        }
        Err(Error::InnerSolverDiverged {
            iterations: MAX_INNER_ITERATIONS,
            increment: prev,
        })
    }

    /// Advances the coefficient vector by one composition step.
    pub fn step_coefficients(&mut self, y: &mut [Complex64], dt: f64) -> Result<()> {
        let mut total = 0;
        for w in composition_weights() {
            total += self.midpoint(y, w * dt)?;
        }
        self.last_iterations = total;
        if y.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFiniteState { time: f64::NAN });
        }
        Ok(())
    }

    /// Convenience wrapper over physical states. Negative `dt` steps backward.
    pub fn step(&mut self, s: &State, dt: f64) -> Result<State> {
        let mut y = self.to_coefficients(s)?;
        self.step_coefficients(&mut y, dt)?;
        Ok(self.to_state(&y))
    }
}

/// One fourth-order step of size `dt`.
pub fn step(s: &State, model: ModelKind, p: &ModelParams, g: &GridSpec, dt: f64) -> Result<State> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "dt",
            reason: "must be positive",
        });
    }
    if let Some(index) = s.flatten().iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Integrator::new(model, p, g).step(s, dt)
}

fn functionals_of(kind: ModelKind) -> &'static [Functional] {
    if kind.has_velocity() {
        &[Functional::I1, Functional::I2, Functional::I, Functional::H]
    } else {
        &[Functional::C, Functional::D, Functional::E]
    }
}

/// Runs `tg.steps()` steps, recording snapshots and functionals every
/// `tg.snapshot_stride` steps (and at the initial and final times).
pub fn evolve(
    s0: &State,
    model: ModelKind,
    p: &ModelParams,
    g: &GridSpec,
    tg: &TimeGrid,
) -> core::result::Result<EvolutionTrace, EvolutionFailure> {
    evolve_with(s0, model, p, g, tg, &mut |_, _| {})
}

/// As [`evolve`], handing each snapshot to `observer` as it is recorded.
pub fn evolve_with(
    s0: &State,
    model: ModelKind,
    p: &ModelParams,
    g: &GridSpec,
    tg: &TimeGrid,
    observer: &mut dyn FnMut(f64, &State),
) -> core::result::Result<EvolutionTrace, EvolutionFailure> {
    let p = p.for_model(model);
    let names = functionals_of(model);
    let mut trace = EvolutionTrace {
        model,
        params: p,
        times: Vec::new(),
        snapshots: Vec::new(),
        invariant_series: names
            .iter()
            .map(|&f| InvariantSeries {
                functional: f,
                values: Vec::new(),
            })
            .collect(),
        step_iterations: Vec::new(),
        completed: false,
    };
    let fail = |trace: EvolutionTrace, error: Error| Err(EvolutionFailure { trace, error });
    if let Err(e) = tg.validate().and_then(|_| s0.check_model(model)) {
        return fail(trace, e);
    }

    let mut record = |trace: &mut EvolutionTrace, t: f64, s: State| {
        let values = evaluate_all(&s, model, &p, t);
        for series in trace.invariant_series.iter_mut() {
            let v = values
                .iter()
                .find(|fv| fv.name == series.functional)
                .map_or(f64::NAN, |fv| fv.value);
            series.values.push(v);
        }
        observer(t, &s);
        trace.times.push(t);
        trace.snapshots.push(s);
    };

    let mut integ = Integrator::new(model, &p, g);
    let mut y = match integ.to_coefficients(s0) {
        Ok(y) => y,
        Err(e) => return fail(trace, e),
    };
    record(&mut trace, 0.0, s0.clone());
    let steps = tg.steps();
    for n in 1..=steps {
        let t = n as f64 * tg.dt;
        match integ.step_coefficients(&mut y, tg.dt) {
            Ok(()) => trace.step_iterations.push(integ.last_iterations()),
            Err(e) => {
                let e = match e {
                    Error::NonFiniteState { .. } => Error::NonFiniteState { time: t },
                    other => other,
                };
                return fail(trace, e);
            }
        }
        if n % tg.snapshot_stride == 0 || n == steps {
            let s = integ.to_state(&y);
            record(&mut trace, t, s);
        }
    }
    trace.completed = true;
    Ok(trace)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailRow {
    pub time: f64,
    /// Share of the off-pulse `L^2` mass located ahead of the pulse;
    /// `NaN` when the pulse window covers the whole domain.
    pub lead_fraction: f64,
    /// Off-pulse `L^2` mass relative to the total mass.
    pub outside_fraction: f64,
    pub peak_position: f64,
    pub peak_height: f64,
    /// Set when the maximum was not unique or the window was degenerate.
    pub flagged: bool,
}

/// Per-snapshot peak tracking and front/back split of the radiated mass.
///
/// Positions are measured periodically from the peak: "ahead" is
/// `halfwidth < x - x_peak < L`, "behind" is `-L <= x - x_peak < -halfwidth`.
pub fn tail_analysis(tr: &EvolutionTrace, pulse_window_halfwidth: f64) -> Result<Vec<TailRow>> {
    if tr.snapshots.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let grid = *tr.snapshots[0].grid();
    let l = grid.half_length();
    let mut transform = Transform::new(&grid);
    let nodes = grid.nodes();
    let mut rows = Vec::with_capacity(tr.snapshots.len());
    for (t, s) in tr.times.iter().zip(&tr.snapshots) {
        let spec = transform.forward(&s.zeta);
        let (x_peak, height, tie) = locate_peak(&s.zeta, &spec);
        let mut ahead = 0.0;
        let mut outside = 0.0;
        let mut total = 0.0;
        for (x, z) in nodes.iter().zip(s.zeta.values()) {
            let m = z * z;
            total += m;
            let d = wrap_periodic(x - x_peak, l);
            if d.abs() > pulse_window_halfwidth {
                outside += m;
                if d > 0.0 {
                    ahead += m;
                }
            }
        }
        let degenerate = pulse_window_halfwidth >= l || outside == 0.0;
        rows.push(TailRow {
            time: *t,
            lead_fraction: if degenerate { f64::NAN } else { ahead / outside },
            outside_fraction: if total > 0.0 { outside / total } else { f64::NAN },
            peak_position: x_peak,
            peak_height: height,
            flagged: tie || degenerate,
        });
    }
    Ok(rows)
}

/// Least-squares speed of the peak trajectory, unwrapping periodic jumps.
pub fn fit_peak_speed(rows: &[TailRow], half_length: f64) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let mut pos = Vec::with_capacity(rows.len());
    let mut offset = 0.0;
    pos.push(rows[0].peak_position);
    for w in rows.windows(2) {
        let jump = w[1].peak_position - w[0].peak_position;
        if jump > half_length {
            offset -= 2.0 * half_length;
        } else if jump < -half_length {
            offset += 2.0 * half_length;
        }
        pos.push(w[1].peak_position + offset);
    }
    let n = rows.len() as f64;
    let tm = rows.iter().map(|r| r.time).sum::<f64>() / n;
    let xm = pos.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (r, x) in rows.iter().zip(&pos) {
        sxy += (r.time - tm) * (x - xm);
        sxx += (r.time - tm) * (r.time - tm);
    }
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridFunction;

    fn params() -> ModelParams {
        ModelParams::new(0.1, 0.1, 0.6, 0.1, 1.2).unwrap()
    }

    #[test]
    fn weights_sum_to_one() {
        let w = composition_weights();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        // third-order condition of the triple jump
        assert!(w.iter().map(|x| x * x * x).sum::<f64>().abs() < 1e-14);
    }

    #[test]
    fn time_grid_validation() {
        assert!(TimeGrid::new(1.0, 0.1, 1).is_ok());
        assert_eq!(TimeGrid::new(1.0, 0.1, 1).unwrap().steps(), 10);
        assert!(TimeGrid::new(1.0, 0.3, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.1, 0).is_err());
        assert!(TimeGrid::new(-1.0, 0.1, 1).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 1).is_err());
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = GridSpec::new(32.0, 128).unwrap();
        for kind in ModelKind::ALL {
            let s = State::zeros(kind, g);
            let out = step(&s, kind, &params(), &g, 0.01).unwrap();
            assert_eq!(out.max_abs(), 0.0);
            let tr = evolve(&s, kind, &params(), &g, &TimeGrid::new(0.1, 0.01, 5).unwrap()).unwrap();
            assert!(tr.completed);
            assert_eq!(tr.times.len(), 3);
            assert!(tr.snapshots.iter().all(|s| s.max_abs() == 0.0));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = GridSpec::new(32.0, 128).unwrap();
        let s = State::zeros(ModelKind::RBenjamin, g);
        assert!(step(&s, ModelKind::RBenjamin, &params(), &g, 0.0).is_err());
        assert_eq!(
            step(&s, ModelKind::BenjaminSystem, &params(), &g, 0.01).unwrap_err(),
            Error::MissingVelocity
        );
        let failure = evolve(&s, ModelKind::BenjaminSystem, &params(), &g, &TimeGrid::new(0.1, 0.01, 1).unwrap())
            .unwrap_err();
        assert!(failure.trace.snapshots.is_empty());
    }

    #[test]
    fn blow_up_returns_partial_trace() {
        // alpha = 0 system is linearly ill-posed at high wavenumbers
        let g = GridSpec::new(16.0, 256).unwrap();
        let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 0.0).unwrap();
        let zeta = GridFunction::from_fn(g, |x| 0.1 * libm::exp(-x * x));
        let u = zeta.clone();
        let s = State::pair(zeta, u).unwrap();
        let tg = TimeGrid::new(20.0, 0.01, 10).unwrap();
        let failure = evolve(&s, ModelKind::BenjaminSystem, &p, &g, &tg).unwrap_err();
        assert!(!failure.trace.completed);
        assert!(!failure.trace.snapshots.is_empty());
    }

    #[test]
    fn tail_analysis_edge_cases() {
        let g = GridSpec::new(32.0, 128).unwrap();
        let empty = EvolutionTrace {
            model: ModelKind::RBenjamin,
            params: params(),
            times: vec![],
            snapshots: vec![],
            invariant_series: vec![],
            step_iterations: vec![],
            completed: true,
        };
        assert_eq!(tail_analysis(&empty, 1.0).unwrap_err(), Error::EmptyTrace);
        let s = State::scalar(GridFunction::from_fn(g, |x| libm::exp(-x * x)));
        let tr = EvolutionTrace {
            times: vec![0.0],
            snapshots: vec![s],
            ..empty
        };
        let rows = tail_analysis(&tr, 40.0).unwrap();
        assert!(rows[0].lead_fraction.is_nan());
        assert!(rows[0].flagged);
        let rows = tail_analysis(&tr, 2.0).unwrap();
        assert!((rows[0].lead_fraction - 0.5).abs() < 1e-6);
        assert!(!rows[0].flagged);
    }

    #[test]
    fn ties_pick_leftmost_and_flag() {
        let g = GridSpec::new(32.0, 128).unwrap();
        let mut v = vec![0.0; 128];
        v[30] = 1.0;
        v[90] = 1.0;
        let s = State::scalar(GridFunction::new(g, v).unwrap());
        let tr = EvolutionTrace {
            model: ModelKind::RBenjamin,
            params: params(),
            times: vec![0.0],
            snapshots: vec![s],
            invariant_series: vec![],
            step_iterations: vec![],
            completed: true,
        };
        let rows = tail_analysis(&tr, 1.0).unwrap();
        assert!(rows[0].flagged);
        assert!((rows[0].peak_position - g.node(30)).abs() <= g.spacing());
    }

    #[test]
    fn speed_fit_unwraps() {
        let rows: Vec<TailRow> = (0..10)
            .map(|i| {
                let t = i as f64;
                TailRow {
                    time: t,
                    lead_fraction: 0.5,
                    outside_fraction: 0.0,
                    peak_position: wrap_periodic(-5.0 + 3.0 * t, 10.0),
                    peak_height: 1.0,
                    flagged: false,
                }
            })
            .collect();
        assert!((fit_peak_speed(&rows, 10.0).unwrap() - 3.0).abs() < 1e-12);
    }
}
