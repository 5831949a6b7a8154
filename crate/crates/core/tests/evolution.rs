//! Integrator checks against exact linear propagators, translated traveling
//! waves and the conservation laws of the models.

mod common;

use capwave_core::analysis::sigma_system;
use capwave_core::evolution::{evolve, evolve_with, fit_peak_speed, tail_analysis, Integrator, TimeGrid};
use capwave_core::invariants::{drift_rates, eval_system_functionals, Functional};
use capwave_core::models::unidirectional_u_from_zeta;
use capwave_core::solitary::solve;
use capwave_core::spectral::{shift_spectrum, Transform};
use capwave_core::{GridFunction, GridSpec, ModelKind, ModelParams, State};
use capwave_core::analysis::m_rbenjamin;

fn linear_params() -> ModelParams {
    ModelParams::new(0.0, 0.1, 0.6, 0.1, 1.2).unwrap()
}

/// Max error of the numerical solution against `cos(k(x − v t))` after
/// `steps` steps of size `dt`, for a single grid mode of the linear rBenjamin
/// equation.
fn linear_mode_error(dt: f64, steps: usize) -> f64 {
    let g = GridSpec::new(std::f64::consts::PI, 32).unwrap();
    let p = linear_params();
    let k = 3.0;
    let v = m_rbenjamin(k, &p);
    let mut integ = Integrator::new(ModelKind::RBenjamin, &p, &g);
    let mut s = State::scalar(GridFunction::from_fn(g, |x| (k * x).cos()));
    for _ in 0..steps {
        s = integ.step(&s, dt).unwrap();
    }
    let t = dt * steps as f64;
    let exact = GridFunction::from_fn(g, |x| (k * (x - v * t)).cos());
    s.zeta.max_abs_diff(&exact)
}

#[test]
fn global_error_is_fourth_order() {
    let t_end = 4.0;
    let errs: Vec<f64> = [0.05, 0.025, 0.0125]
        .iter()
        .map(|&dt| linear_mode_error(dt, (t_end / dt).round() as usize))
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 16.0).abs() < 0.2 * 16.0, "{errs:?}");
    }
}

#[test]
fn one_step_error_is_fifth_order() {
    // local truncation error O(dt⁵): halving dt divides it by about 32
    let errs: Vec<f64> = [0.05, 0.025, 0.0125].iter().map(|&dt| linear_mode_error(dt, 1)).collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 32.0).abs() < 0.2 * 32.0, "{errs:?}");
    }
}

#[test]
fn linear_system_modes_travel_at_plus_minus_sigma() {
    let g = GridSpec::new(std::f64::consts::PI, 32).unwrap();
    let p = linear_params();
    let k = 2.0;
    let sigma = sigma_system(k, &p).unwrap();
    let ratio = ((1.0 - p.gamma()) + p.tension() * k * k) / sigma;
    for dir in [1.0, -1.0] {
        let wave = |t: f64| {
            let z = GridFunction::from_fn(g, |x| (k * (x - dir * sigma * t)).cos());
            let u = z.map(|v| dir * ratio * v);
            State::pair(z, u).unwrap()
        };
        let tr = evolve(&wave(0.0), ModelKind::BenjaminSystem, &p, &g, &TimeGrid::new(2.0, 0.01, 200).unwrap()).unwrap();
        let err = tr.last().unwrap().max_abs_diff(&wave(2.0));
        assert!(err < 1e-6, "{err}");
    }
}

#[test]
fn solitary_wave_is_translated() {
    let g = GridSpec::new(64.0, 1024).unwrap();
    let p = ModelParams::new(0.1, 0.1, 0.6, 0.1, 1.2).unwrap();
    let (w, _) = solve(ModelKind::RBenjamin, 0.75, &p, &g, &Default::default()).unwrap();
    let tr = evolve(&w.state, ModelKind::RBenjamin, &p, &g, &TimeGrid::new(5.0, 0.01, 100).unwrap()).unwrap();
    let mut t = Transform::new(&g);
    for (time, snap) in tr.times.iter().zip(&tr.snapshots) {
        let mut spec = t.forward(&w.state.zeta);
        shift_spectrum(&g, &mut spec, -0.75 * time);
        let exact = t.inverse(&spec);
        assert!(snap.zeta.max_abs_diff(&exact) < 1e-8, "t = {time}");
    }

    let rows = tail_analysis(&tr, 10.0).unwrap();
    let speed = fit_peak_speed(&rows, g.half_length()).unwrap();
    assert!((speed - 0.75).abs() < 1e-3, "{speed}");
    // an exact wave sheds nothing: its own symmetric tails split evenly
    for r in &rows {
        assert!((r.lead_fraction - 0.5).abs() < 1e-3, "{r:?}");
        assert!((r.peak_height - w.amplitude()).abs() < 1e-6);
    }
}

#[test]
fn means_are_conserved() {
    let g = GridSpec::new(30.0, 256).unwrap();
    let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap();
    let tg = TimeGrid::new(5.0, 0.01, 50).unwrap();
    let z = common::random_bumps(g, 3, 4).map(|v| 0.5 * v);
    let tr = evolve(&State::scalar(z.clone()), ModelKind::RBenjamin, &p, &g, &tg).unwrap();
    assert!(tr.relative_drift(Functional::C).unwrap() < 1e-12);
    let u = common::random_bumps(g, 4, 4).map(|v| 0.3 * v);
    let tr = evolve(&State::pair(z, u).unwrap(), ModelKind::BenjaminSystem, &p, &g, &tg).unwrap();
    assert!(tr.relative_drift(Functional::I1).unwrap() < 1e-12);
    assert!(tr.relative_drift(Functional::I2).unwrap() < 1e-12);
}

#[test]
fn rbenjamin_invariants_are_conserved() {
    let g = GridSpec::new(64.0, 1024).unwrap();
    let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap();
    let (w, _) = solve(ModelKind::Benjamin, 1.1, &p, &g, &Default::default()).unwrap();
    let tr = evolve(&w.state, ModelKind::RBenjamin, &p, &g, &TimeGrid::new(10.0, 0.01, 100).unwrap()).unwrap();
    for f in [Functional::C, Functional::D, Functional::E] {
        assert!(tr.relative_drift(f).unwrap() < 1e-8, "{f:?}");
    }
}

fn gaussian_pair(g: GridSpec, p: &ModelParams) -> State {
    let z = GridFunction::from_fn(g, |x| 0.5 * (-(x / 4.0).powi(2)).exp());
    let u = unidirectional_u_from_zeta(&z, p).unwrap();
    State::pair(z, u).unwrap()
}

#[test]
fn system_without_regularization_conserves_i_and_h() {
    // At α = 0 the linear symbol is real only for |k| < γ/√μ = 4 here, so the
    // grid keeps all modes below that; the 2/3 rule removes the aliasing that
    // otherwise breaks the discrete product rule behind the conservation of I.
    let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 0.0).unwrap();
    let g = GridSpec::new(128.0, 256).unwrap().with_dealiasing(true);
    let tr = evolve(&gaussian_pair(g, &p), ModelKind::BenjaminSystem, &p, &g, &TimeGrid::new(50.0, 0.01, 500).unwrap()).unwrap();
    assert!(tr.relative_drift(Functional::I).unwrap() < 1e-8);
    assert!(tr.relative_drift(Functional::H).unwrap() < 1e-8);
}

/// Fourth-order central difference of (I, H) along the discrete flow.
fn fd_rates(integ: &mut Integrator, s: &State, p: &ModelParams, h: f64) -> (f64, f64) {
    let mut vals = Vec::new();
    for m in [-2i32, -1, 1, 2] {
        let mut y = integ.to_coefficients(s).unwrap();
        for _ in 0..m.unsigned_abs() {
            integ.step_coefficients(&mut y, m.signum() as f64 * h).unwrap();
        }
        let f = eval_system_functionals(&integ.to_state(&y), p).unwrap();
        vals.push((f.i, f.h));
    }
    let d = |a: f64, b: f64, c: f64, e: f64| (a - 8.0 * b + 8.0 * c - e) / (12.0 * h);
    (
        d(vals[0].0, vals[1].0, vals[2].0, vals[3].0),
        d(vals[0].1, vals[1].1, vals[2].1, vals[3].1),
    )
}

#[test]
fn drift_rates_match_trajectory_differences() {
    let g = GridSpec::new(64.0, 1024).unwrap();
    let p = ModelParams::new(0.1, 0.1, 0.4, 0.1, 1.2).unwrap();
    let (w, _) = solve(ModelKind::Benjamin, 1.1, &p, &g, &Default::default()).unwrap();
    let u = unidirectional_u_from_zeta(&w.state.zeta, &p).unwrap();
    let s0 = State::pair(w.state.zeta.clone(), u).unwrap();
    let mut integ = Integrator::new(ModelKind::BenjaminSystem, &p, &g);
    let mut y = integ.to_coefficients(&s0).unwrap();
    for _ in 0..200 {
        integ.step_coefficients(&mut y, 0.01).unwrap();
    }
    let s = integ.to_state(&y);
    let rates = drift_rates(&s, &p, &g).unwrap();
    let (di, dh) = fd_rates(&mut integ, &s, &p, 0.005);
    assert!(rates.d_i_dt.abs() > 1e-6);
    assert!((di - rates.d_i_dt).abs() < 1e-6 * rates.d_i_dt.abs(), "{di} vs {}", rates.d_i_dt);
    assert!((dh - rates.d_h_dt).abs() < 1e-6 * rates.d_h_dt.abs(), "{dh} vs {}", rates.d_h_dt);
}

#[test]
fn observer_sees_every_snapshot_in_order() {
    let g = GridSpec::new(20.0, 64).unwrap();
    let p = ModelParams::new(0.1, 0.1, 0.6, 0.1, 1.2).unwrap();
    let s = State::scalar(common::random_bumps(g, 1, 2));
    let mut seen = Vec::new();
    let tr = evolve_with(&s, ModelKind::RBenjamin, &p, &g, &TimeGrid::new(1.0, 0.1, 3).unwrap(), &mut |t, st| {
        seen.push((t, st.clone()))
    })
    .unwrap();
    assert_eq!(seen.len(), tr.times.len());
    // t = 0, every third step, and the final step
    assert_eq!(tr.times.len(), 5);
    assert!((tr.times[4] - 1.0).abs() < 1e-12);
    for ((t, st), (tt, ss)) in seen.iter().zip(tr.times.iter().zip(&tr.snapshots)) {
        assert_eq!(t, tt);
        assert_eq!(st, ss);
    }
    assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    assert_eq!(tr.step_iterations.len(), 10);
}
