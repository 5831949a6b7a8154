//! The four subcommands and the run wrapper that emits the manifest.

use std::path::Path;
use std::time::Instant;

use capwave_core::analysis::{
    count_sign_changes, decay_classification, phase_portrait, phi_minimizer, phi_system, sigma_system, tail_winding,
    DecayKind, DecayOptions, DispersionSpec,
};
use capwave_core::evolution::{evolve, fit_peak_speed, tail_analysis};
use capwave_core::models::unidirectional_u_from_zeta;
use capwave_core::solitary::{amplitude_increases_with_gap, solve, speed_amplitude_sweep, SweepRow};
use capwave_core::{GridFunction, State};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, ExperimentConfig, ModelName};
use crate::error::{CliError, ErrorBody};
use crate::output::{json_bytes, num, FileRecord, OutputDir};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub toolkit: &'static str,
    pub version: &'static str,
    pub command: Command,
    pub preset: Option<&'a str>,
    pub config: &'a ExperimentConfig,
    pub status: &'static str,
    pub exit_code: i32,
    pub error: Option<ErrorBody>,
    pub wall_clock_seconds: f64,
    pub reports: &'a [Value],
    pub files: &'a [FileRecord],
}

fn model_name(m: ModelName) -> &'static str {
    m.kind().name()
}

fn core_err(e: capwave_core::Error) -> CliError {
    CliError::Solver(e.to_string())
}

/// Resolves the configuration, runs `cmd` and writes the manifest. Returns
/// the process exit code. A configuration that fails validation produces no
/// files at all.
pub fn run(cmd: Command, preset: Option<&str>, config: Option<&Path>, out: &Path) -> i32 {
    let cfg = match ExperimentConfig::resolve(preset, config).and_then(|c| c.validate(cmd).map(|_| c)) {
        Ok(c) => c,
        Err(e) => return report_error(&e),
    };
    let mut dir = match OutputDir::create(out) {
        Ok(d) => d,
        Err(e) => return report_error(&e),
    };
    let start = Instant::now();
    let mut reports = Vec::new();
    let result = match cmd {
        Command::Solve => cmd_solve(&cfg, &mut dir, &mut reports),
        Command::Evolve => cmd_evolve(&cfg, &mut dir, &mut reports),
        Command::Sweep => cmd_sweep(&cfg, &mut dir, &mut reports),
        Command::Dispersion => cmd_dispersion(&cfg, &mut dir, &mut reports),
    };
    let error = result.as_ref().err().map(CliError::body);
    let code = error.as_ref().map_or(0, |e| e.exit_code);
    let manifest = RunManifest {
        toolkit: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cmd,
        preset,
        config: &cfg,
        status: if code == 0 { "ok" } else { "error" },
        exit_code: code,
        error,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        reports: &reports,
        files: dir.files(),
    };
    if let Err(e) = json_bytes(&manifest).and_then(|b| dir.write_untracked(MANIFEST, &b)) {
        return report_error(&e);
    }
    for f in dir.files() {
        println!("{}", dir.root().join(&f.path).display());
    }
    match result {
        Ok(()) => 0,
        Err(e) => report_error(&e),
    }
}

fn report_error(e: &CliError) -> i32 {
    let body = e.body();
    eprintln!("{}", serde_json::to_string(&body).unwrap_or_else(|_| e.to_string()));
    body.exit_code
}

fn state_rows(s: &State) -> Vec<Vec<String>> {
    let x = s.grid().nodes();
    (0..x.len())
        .map(|j| {
            let mut row = vec![num(x[j]), num(s.zeta.values()[j])];
            if let Some(u) = &s.u {
                row.push(num(u.values()[j]));
            }
            row
        })
        .collect()
}

fn write_state(dir: &mut OutputDir, name: &str, s: &State) -> Result<(), CliError> {
    let header: &[&str] = if s.u.is_some() { &["x", "zeta", "u"] } else { &["x", "zeta"] };
    dir.write_csv(name, header, state_rows(s))
}

/// Full width at half maximum, counted on the grid.
fn half_height_width(z: &GridFunction) -> f64 {
    let peak = z.values().iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    z.values().iter().filter(|v| **v > 0.5 * peak).count() as f64 * z.grid().spacing()
}

#[derive(Debug, Serialize)]
struct DecaySummary {
    kind: &'static str,
    tail_sign_changes: usize,
    half_height_width: f64,
}

#[derive(Debug, Serialize)]
struct SolveReport {
    model: &'static str,
    speed: f64,
    converged: bool,
    iterations: usize,
    final_residual: f64,
    stabilizing_factor: f64,
    extrapolation_cycles: usize,
    amplitude: f64,
    edge_magnitude: f64,
    sign_changes: usize,
    tail_winding: f64,
    decay: Option<DecaySummary>,
    decay_error: Option<String>,
    profile: String,
    phase_portrait: String,
}

fn cmd_solve(cfg: &ExperimentConfig, dir: &mut OutputDir, reports: &mut Vec<Value>) -> Result<(), CliError> {
    let p = cfg.params()?;
    let g = cfg.grid()?;
    let pv = cfg.solver.petviashvili();
    let mut failures = Vec::new();
    for &m in &cfg.models {
        let name = model_name(m);
        let (w, rep) = match solve(m.kind(), cfg.speed, &p, &g, &pv) {
            Ok(r) => r,
            Err(e) => {
                reports.push(json!({ "model": name, "speed": cfg.speed, "error": e.to_string() }));
                failures.push(format!("{name}: {e}"));
                continue;
            }
        };
        let profile = format!("profile_{name}.csv");
        let phase = format!("phase_{name}.csv");
        write_state(dir, &profile, &w.state)?;
        let x = g.nodes();
        let pts = phase_portrait(&w.state.zeta);
        dir.write_csv(
            &phase,
            &["x", "zeta", "zeta_x"],
            x.iter().zip(&pts).map(|(x, (z, dz))| vec![num(*x), num(*z), num(*dz)]),
        )?;
        let z = &w.state.zeta;
        let decay = decay_classification(z, &DecayOptions::default())
            .map(|r| DecaySummary {
                kind: match r.kind {
                    DecayKind::Oscillatory => "oscillatory",
                    DecayKind::Monotone => "monotone",
                },
                tail_sign_changes: r.sign_changes,
                half_height_width: r.half_height_width,
            })
            .map_err(|e| e.to_string());
        let (decay, decay_error) = match decay {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e)),
        };
        reports.push(serde_json::to_value(SolveReport {
            model: name,
            speed: w.speed,
            converged: rep.converged,
            iterations: rep.iterations,
            final_residual: rep.final_residual(),
            stabilizing_factor: rep.final_stabilizing_factor(),
            extrapolation_cycles: rep.extrapolation_cycles,
            amplitude: w.amplitude(),
            edge_magnitude: w.edge_magnitude(),
            sign_changes: count_sign_changes(z.values().iter().copied(), DecayOptions::default().noise_floor),
            tail_winding: tail_winding(z, DecayOptions::default().noise_floor),
            decay,
            decay_error,
            profile,
            phase_portrait: phase,
        })?);
        if !rep.converged {
            failures.push(format!(
                "{name}: no convergence in {} iterations (residual {:e})",
                rep.iterations,
                rep.final_residual()
            ));
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Solver(failures.join("; ")))
    }
}

#[derive(Debug, Serialize)]
struct EvolveReport {
    model: &'static str,
    completed: bool,
    error: Option<String>,
    snapshot_times: Vec<f64>,
    snapshots: Vec<String>,
    relative_drift: Value,
    mean_inner_iterations: f64,
    pulse_halfwidth: f64,
    fitted_peak_speed: Option<f64>,
    initial_peak_height: f64,
    final_peak_height: f64,
    final_lead_fraction: f64,
}

fn cmd_evolve(cfg: &ExperimentConfig, dir: &mut OutputDir, reports: &mut Vec<Value>) -> Result<(), CliError> {
    let p = cfg.params()?;
    let g = cfg.grid()?;
    let tg = cfg.evolve.time_grid()?;
    let source = cfg.evolve.source;
    let (wave, rep) = solve(source.kind(), cfg.speed, &p, &g, &cfg.solver.petviashvili()).map_err(core_err)?;
    if !rep.converged {
        return Err(CliError::Solver(format!(
            "initial {} wave did not converge (residual {:e})",
            model_name(source),
            rep.final_residual()
        )));
    }
    write_state(dir, &format!("initial_{}.csv", model_name(source)), &wave.state)?;
    let zeta = &wave.state.zeta;
    let halfwidth = cfg.evolve.pulse_halfwidth.unwrap_or(5.0 * half_height_width(zeta));

    for &m in &cfg.models {
        let name = model_name(m);
        let kind = m.kind();
        let s0 = if kind.has_velocity() {
            let u = unidirectional_u_from_zeta(zeta, &p).map_err(core_err)?;
            State::pair(zeta.clone(), u).map_err(core_err)?
        } else {
            State::scalar(zeta.clone())
        };
        let (trace, failure) = match evolve(&s0, kind, &p, &g, &tg) {
            Ok(t) => (t, None),
            Err(f) => (f.trace, Some(f.error)),
        };
        let mut snapshots = Vec::new();
        for (i, s) in trace.snapshots.iter().enumerate() {
            let file = format!("{name}_snapshot_{i:03}.csv");
            write_state(dir, &file, s)?;
            snapshots.push(file);
        }
        let mut header = vec!["t"];
        header.extend(trace.invariant_series.iter().map(|s| s.functional.name()));
        dir.write_csv(
            &format!("{name}_invariants.csv"),
            &header,
            trace.times.iter().enumerate().map(|(i, t)| {
                let mut row = vec![num(*t)];
                row.extend(trace.invariant_series.iter().map(|s| num(s.values[i])));
                row
            }),
        )?;
        let rows = if trace.snapshots.is_empty() {
            Vec::new()
        } else {
            tail_analysis(&trace, halfwidth).map_err(|e| CliError::Evolution(e.to_string()))?
        };
        dir.write_csv(
            &format!("{name}_tail.csv"),
            &["t", "peak_position", "peak_height", "lead_fraction", "outside_fraction", "flagged"],
            rows.iter().map(|r| {
                vec![
                    num(r.time),
                    num(r.peak_position),
                    num(r.peak_height),
                    num(r.lead_fraction),
                    num(r.outside_fraction),
                    r.flagged.to_string(),
                ]
            }),
        )?;
        let drift: serde_json::Map<String, Value> = trace
            .invariant_series
            .iter()
            .map(|s| (s.functional.name().to_string(), json!(trace.relative_drift(s.functional))))
            .collect();
        let iters = &trace.step_iterations;
        reports.push(serde_json::to_value(EvolveReport {
            model: name,
            completed: trace.completed,
            error: failure.as_ref().map(|e| e.to_string()),
            snapshot_times: trace.times.clone(),
            snapshots,
            relative_drift: Value::Object(drift),
            mean_inner_iterations: iters.iter().sum::<usize>() as f64 / iters.len().max(1) as f64,
            pulse_halfwidth: halfwidth,
            fitted_peak_speed: fit_peak_speed(&rows, g.half_length()),
            initial_peak_height: rows.first().map_or(f64::NAN, |r| r.peak_height),
            final_peak_height: rows.last().map_or(f64::NAN, |r| r.peak_height),
            final_lead_fraction: rows.last().map_or(f64::NAN, |r| r.lead_fraction),
        })?);
        if let Some(e) = failure {
            return Err(CliError::Evolution(format!("{name}: {e}")));
        }
    }
    Ok(())
}

/// Rows converging below this share make `sweep` exit with a solver error.
const SWEEP_MIN_CONVERGED: f64 = 0.9;

fn cmd_sweep(cfg: &ExperimentConfig, dir: &mut OutputDir, reports: &mut Vec<Value>) -> Result<(), CliError> {
    let g = cfg.grid()?;
    let pv = cfg.solver.petviashvili();
    let mut jobs = Vec::new();
    for &gamma in &cfg.sweep.gammas {
        for &m in &cfg.models {
            jobs.push((gamma, m, cfg.params_at(gamma)?));
        }
    }
    let tables: Vec<Vec<SweepRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = jobs
            .iter()
            .map(|(_, m, p)| {
                let speeds: Vec<f64> = cfg.sweep.speed_fractions.iter().map(|f| f * p.c_gamma()).collect();
                let pv = &pv;
                let g = &g;
                scope.spawn(move || speed_amplitude_sweep(m.kind(), p, g, &speeds, pv))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sweep worker panicked")).collect()
    });

    let (mut total, mut converged) = (0usize, 0usize);
    for ((gamma, m, p), rows) in jobs.iter().zip(&tables) {
        let name = model_name(*m);
        let c = p.c_gamma();
        let monotone = amplitude_increases_with_gap(rows, c);
        let file = format!("sweep_g{gamma}_{name}.csv");
        dir.write_csv(
            &file,
            &["c_s", "fraction", "amplitude", "converged", "iterations", "residual", "monotone"],
            rows.iter().map(|r| {
                vec![
                    num(r.speed),
                    num(r.speed / c),
                    num(r.amplitude),
                    r.converged.to_string(),
                    r.iterations.to_string(),
                    num(r.residual),
                    monotone.to_string(),
                ]
            }),
        )?;
        let ok = rows.iter().filter(|r| r.converged).count();
        total += rows.len();
        converged += ok;
        let errors: Vec<Value> = rows
            .iter()
            .filter_map(|r| r.error.as_ref().map(|e| json!({ "speed": r.speed, "error": e.to_string() })))
            .collect();
        reports.push(json!({
            "gamma": gamma,
            "model": name,
            "c_gamma": c,
            "rows": rows.len(),
            "converged": ok,
            "monotone": monotone,
            "errors": errors,
            "table": file,
        }));
    }
    if (converged as f64) < SWEEP_MIN_CONVERGED * total as f64 {
        return Err(CliError::Solver(format!("only {converged} of {total} sweep rows converged")));
    }
    Ok(())
}

fn cmd_dispersion(cfg: &ExperimentConfig, dir: &mut OutputDir, reports: &mut Vec<Value>) -> Result<(), CliError> {
    let ks = cfg.dispersion.wavenumbers();
    for &m in &cfg.models {
        let name = model_name(m);
        let kind = m.kind();
        let p = cfg.params()?.for_model(kind);
        let spec = DispersionSpec::new(kind, p, cfg.speed);
        let file = format!("dispersion_{name}.csv");
        if kind.has_velocity() {
            let mut flagged = 0;
            let rows: Vec<Vec<String>> = ks
                .iter()
                .map(|&k| match (phi_system(k, &p), sigma_system(k, &p), spec.phase_speed_pm(k)) {
                    (Ok(phi), Ok(sigma), Ok((vp, vm))) => {
                        vec![num(k), num(phi), num(sigma), num(vp), num(vm), "false".into()]
                    }
                    _ => {
                        flagged += 1;
                        let nan = num(f64::NAN);
                        vec![num(k), nan.clone(), nan.clone(), nan.clone(), nan, "true".into()]
                    }
                })
                .collect();
            dir.write_csv(&file, &["k", "phi", "sigma", "v_plus", "v_minus", "ill_posed"], rows)?;
            reports.push(json!({ "model": name, "table": file, "rows": ks.len(), "ill_posed_rows": flagged }));
        } else {
            let rows: Vec<Vec<String>> = ks
                .iter()
                .map(|&k| {
                    let v = spec.phase_speed(k).map_err(core_err)?;
                    let mk = v + cfg.speed;
                    Ok(vec![num(k), num(mk / p.c_gamma()), num(mk), num(k * v), num(v)])
                })
                .collect::<Result<_, CliError>>()?;
            dir.write_csv(&file, &["k", "phi", "m", "omega", "v"], rows)?;
            let extremum = match phi_minimizer(&p) {
                Ok(e) => {
                    let record = json!({
                        "x_star": e.x_star,
                        "phi_min": e.phi_min,
                        "b": e.b,
                        "c": e.c,
                        "c_gamma": p.c_gamma(),
                        "speed_bound": p.c_gamma() * e.phi_min,
                    });
                    let ext = format!("extremum_{name}.json");
                    dir.write_json(&ext, &record)?;
                    json!({ "file": ext, "x_star": e.x_star, "phi_min": e.phi_min })
                }
                Err(e) => json!({ "error": e.to_string() }),
            };
            reports.push(json!({ "model": name, "table": file, "rows": ks.len(), "extremum": extremum }));
        }
    }
    Ok(())
}
