//! Subcommand bodies. Each returns the process exit code; JSON goes to the
//! `out` writer and human text to `err`.

use std::fs::File;
use std::io::{BufWriter, Write};

use nalgebra::DMatrix;
use scflab::catalog::{self, CatalogEntry};
use scflab::checks::{run_suite, CheckOptions, CheckStatus};
use scflab::curvature::{chern_ricci_adjoint, chern_ricci_trace, nijenhuis, norm_nijenhuis, norm_riemann, Geometry};
use scflab::flow::{integrate, static_flow_predictor, FlowState, Termination, Trajectory};
use serde_json::{json, Value};

use crate::config::{resolve, Format, Resolved, RunConfig};
use crate::series::{self, SeriesWriter};
use crate::{CliError, ConfigError, EXIT_CHECK_FAILED, EXIT_DEGENERATE, EXIT_DRIFT, EXIT_OK};

type CmdResult = Result<i32, CliError>;

fn rows(m: &DMatrix<f64>) -> Value {
    Value::from(
        (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect::<Vec<_>>())
            .collect::<Vec<_>>(),
    )
}

fn emit(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, v).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

pub fn list(out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let mut entries = Vec::new();
    for name in catalog::list_entries() {
        let e = catalog::entry_by_name(name, None, None, None).expect("catalog defaults are valid");
        let params: Vec<&str> = e.params().iter().map(|(p, _)| *p).collect();
        writeln!(err, "{name:<18} ({}) {}", params.join(", "), e.description())?;
        entries.push(json!({
            "name": name,
            "params": params,
            "defaults": e.params().into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
            "dim": e.algebra().dim(),
            "description": e.description(),
            "conserved": e.conserved_names(),
            "has_analytic_solution": e.analytic(0.0).is_some(),
        }));
    }
    emit(out, &json!({ "entries": entries }))?;
    Ok(EXIT_OK)
}

pub fn report(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let r = resolve(&cfg.source)?;
    let (l, omega, j) = (r.algebra(), r.structure.omega(), r.structure.j());
    let n = l.dim();
    let geo = Geometry::compute(l, omega, j).map_err(|e| ConfigError::new("source", e.to_string()))?;
    let p_trace = chern_ricci_trace(l, &geo.connection, j);
    let p_adjoint = chern_ricci_adjoint(l, j);
    let discrepancy = (p_trace.matrix() - p_adjoint.matrix()).amax();
    let nt = nijenhuis(l, j);
    let norm_n = norm_nijenhuis(&geo.metric, &nt);
    let norm_r = norm_riemann(&geo.metric, &geo.riemann);
    let primitive = l
        .exact_primitive(&p_adjoint)
        .map_err(|e| ConfigError::new("source", e.to_string()))?
        .map(|theta| theta.components().iter().copied().collect::<Vec<_>>());
    let check = r.structure.check(scflab::tol::STRUCTURE);

    // A[k][i][j]: coefficient of e_k in ∇_{e_j} e_i
    let connection: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|k| (0..n).map(|i| (0..n).map(|jj| geo.connection.get(k, i, jj)).collect()).collect())
        .collect();
    let nijenhuis_components: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|k| (0..n).map(|i| (0..n).map(|jj| nt.get(k, i, jj)).collect()).collect())
        .collect();

    let v = json!({
        "source": r.label,
        "dim": n,
        "brackets": l.bracket_table().iter().map(|&(i, j, k, c)| json!([i, j, k, c])).collect::<Vec<_>>(),
        "nilpotency_step": l.nilpotency_step(),
        "structure": {
            "j_squared": check.j_squared,
            "compatibility": check.compatibility,
            "closedness": check.closedness,
            "min_eig_g": check.min_eig_g,
            "metric_asymmetry": check.metric_asymmetry,
            "passed": check.passed(),
        },
        "metric": rows(geo.metric.matrix()),
        "connection": connection,
        "ricci": rows(&geo.ricci.form),
        "ricci_endomorphism": rows(geo.ricci_endomorphism.matrix()),
        "chern_ricci_trace": rows(p_trace.matrix()),
        "chern_ricci_adjoint": rows(p_adjoint.matrix()),
        "chern_ricci_discrepancy": discrepancy,
        "chern_ricci_primitive": primitive,
        "nijenhuis": nijenhuis_components,
        "norm_N_sq": norm_n,
        "norm_R_sq": norm_r,
    });

    writeln!(err, "source {} (dim {n}, step {:?})", r.label, l.nilpotency_step())?;
    writeln!(err, "|N|^2 = {norm_n:.12}  |R|^2 = {norm_r:.12}")?;
    writeln!(err, "max |P| = {:.3e}  trace vs adjoint = {discrepancy:.3e}", p_adjoint.max_abs())?;
    emit(out, &v)?;
    Ok(EXIT_OK)
}

/// Largest relative deviation of the recorded states from the closed form.
fn max_rel_err(entry: &CatalogEntry, traj: &Trajectory) -> Option<f64> {
    let mut worst = 0.0f64;
    for s in traj.states() {
        let exact = entry.analytic(s.t)?;
        let scale = exact.j.matrix().amax().max(exact.omega.max_abs());
        let e = (s.j.matrix() - exact.j.matrix())
            .amax()
            .max((s.omega.matrix() - exact.omega.matrix()).amax());
        worst = worst.max(e / scale);
    }
    Some(worst)
}

fn summary(r: &Resolved, cfg: &RunConfig, traj: &Trajectory) -> Value {
    let (last, diag): &(FlowState, _) = traj.last();
    let conserved: serde_json::Map<String, Value> =
        diag.conserved.iter().map(|(k, v)| (k.clone(), Value::from(*v))).collect();
    json!({
        "source": r.label,
        "termination": traj.termination.as_str(),
        "steps": traj.steps,
        "records": traj.records.len(),
        "t_final": last.t,
        "final_state": {
            "omega": last.omega.upper_triangle(),
            "J": last.j.row_major(),
        },
        "max_drift_Jsq": traj.max_drift_jsq,
        "max_drift_compat": traj.max_drift_compat,
        "max_drift_closed": traj.max_drift_closed,
        "final_min_eig_g": diag.min_eig_g,
        "final_norm_N_sq": diag.norm_n_sq,
        "final_norm_R_sq": diag.norm_r_sq,
        "final_conserved": conserved,
        "max_rel_err_vs_analytic": r.entry.as_ref().and_then(|e| max_rel_err(e, traj)),
        "out": cfg.output.path.as_ref().map(|p| p.display().to_string()),
    })
}

pub fn flow(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    cfg.flow.validate()?;
    let r = resolve(&cfg.source)?;
    let icfg = cfg.flow.integrator();
    let initial = FlowState::new(0.0, r.structure.omega().clone(), r.structure.j().clone());
    let traj = match &r.entry {
        Some(e) => scflab::flow::integrate_entry(e, &icfg),
        None => integrate(r.algebra(), &initial, &icfg),
    }
    .map_err(|e| ConfigError::new("flow", e.to_string()))?;

    let names = r.entry.as_ref().map(|e| e.conserved_names()).unwrap_or_default();
    let cols = series::columns(r.algebra().dim(), &names);
    let data: Vec<Vec<f64>> = traj.records.iter().map(|(s, d)| series::values(s, d, &names)).collect();
    let summary = summary(&r, cfg, &traj);

    match &cfg.output.path {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| ConfigError::new("output.path", format!("{}: {e}", path.display())))?;
            let mut w = SeriesWriter::new(BufWriter::new(file), cfg.output.format, cols)?;
            for row in &data {
                w.write_row(row)?;
            }
            w.finish()?.flush()?;
            emit(out, &summary)?;
        }
        None => {
            let mut w = SeriesWriter::new(&mut *out, cfg.output.format, cols)?;
            for row in &data {
                w.write_row(row)?;
            }
            let out = w.finish()?;
            match cfg.output.format {
                // keep stdout a clean CSV document
                Format::Csv => emit(err, &summary)?,
                Format::Jsonl => {
                    serde_json::to_writer(&mut *out, &json!({ "summary": summary })).map_err(std::io::Error::from)?;
                    writeln!(out)?;
                }
            }
        }
    }

    writeln!(
        err,
        "{}: {} after {} steps, t = {}",
        r.label,
        traj.termination.as_str(),
        traj.steps,
        traj.last().0.t
    )?;
    Ok(match traj.termination {
        Termination::ReachedEnd => EXIT_OK,
        Termination::DriftExceeded => EXIT_DRIFT,
        Termination::MetricDegenerated | Termination::Diverged => EXIT_DEGENERATE,
    })
}

pub fn check(cfg: &RunConfig, opts: &CheckOptions, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if !(opts.flow_dt > 0.0 && opts.flow_dt < opts.flow_t_end) {
        return Err(ConfigError::new("--dt", "need 0 < dt < t_end for the drift checks").into());
    }
    let r = resolve(&cfg.source)?;
    let outcomes = run_suite(&r.structure, opts);
    let mut table = Vec::new();
    let (mut pass, mut fail, mut skip) = (0, 0, 0);
    for o in &outcomes {
        let (status, reason) = match o.status {
            CheckStatus::Pass => {
                pass += 1;
                ("pass", None)
            }
            CheckStatus::Fail => {
                fail += 1;
                ("fail", None)
            }
            CheckStatus::Skipped(why) => {
                skip += 1;
                ("skipped", Some(why))
            }
        };
        match reason {
            Some(why) => writeln!(err, "{:<10} {:<30} {:<7} ({why})", o.group, o.name, status)?,
            None => writeln!(err, "{:<10} {:<30} {:<7} {:.3e} <= {:.1e}", o.group, o.name, status, o.value, o.tol)?,
        }
        table.push(json!({
            "group": o.group,
            "name": o.name,
            "status": status,
            "value": o.value,
            "tol": o.tol,
            "reason": reason,
        }));
    }
    writeln!(err, "{pass} passed, {fail} failed, {skip} skipped")?;
    emit(
        out,
        &json!({
            "source": r.label,
            "seed": opts.seed,
            "passed": fail == 0,
            "counts": { "pass": pass, "fail": fail, "skipped": skip },
            "checks": table,
        }),
    )?;
    Ok(if fail == 0 { EXIT_OK } else { EXIT_CHECK_FAILED })
}

pub fn static_law(n: u32, scale: f64, t: f64, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let p = static_flow_predictor(n, scale, t).map_err(|e| ConfigError::new("n", e.to_string()))?;
    writeln!(err, "n = {n}: {} with lambda = {}", p.behaviour.as_str(), p.lambda)?;
    if let Some(ts) = p.extinction_time {
        writeln!(err, "extinction at t* = {ts}")?;
    }
    emit(
        out,
        &json!({
            "n": n,
            "lambda": p.lambda,
            "behaviour": p.behaviour.as_str(),
            "extinction_time": p.extinction_time,
            "t": t,
            "scale": p.scale,
        }),
    )?;
    Ok(EXIT_OK)
}
