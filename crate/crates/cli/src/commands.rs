use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use rabi_core::cumulant::{
    delta_correction, integrate_cumulants, leading_sigma_z, stationary_normal, stationary_normal_numeric,
    CumulantState,
};
use rabi_core::hilbert::{FockCutoff, DEFAULT_TAIL_TOL};
use rabi_core::lindblad::{
    auto_cutoff, evolve, DensityMatrix, EvolveOptions, DEFAULT_CUTOFF, DEFAULT_RTOL, DEFAULT_STEADY_TOL,
};
use rabi_core::meanfield::{
    boundary_lambda_c, boundary_r_pm, classify_mf, np_stability, sp_fixed_points, tricritical_lambda,
    FixedPoint, NormalBranch,
};
use rabi_core::model::canonicalize;
use rabi_core::scaling::{collapse_curve, critical_point, scaling_coeffs, x2_stationary};
use rabi_core::DimlessParams;
use serde_json::{json, Map, Value};

use crate::config::{usage, Layer, Layers, Settings};
use crate::format::{Cell, Table};
use crate::grid::{build_grid, AxisName, Point};
use crate::layers::{column_names, empty_cells, evaluate, SolveOptions};
use crate::manifest::{config_hash, write_manifest, PointRecord, RunManifest, SCHEMA_VERSION};
use crate::sweep::{parallel_map, MemBudget};

struct Output<'a> {
    command: &'a str,
    settings: &'a Settings,
    tolerances: Value,
}

impl Output<'_> {
    fn dir(&self) -> Result<PathBuf> {
        let d = self.settings.out.clone();
        std::fs::create_dir_all(&d).with_context(|| format!("creating {}", d.display()))?;
        Ok(d)
    }

    fn manifest(&self, path: &Path, points: Vec<PointRecord>) -> Result<()> {
        let m = RunManifest {
            schema_version: SCHEMA_VERSION,
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            command: self.command.to_string(),
            config_hash: config_hash(&self.settings.config),
            config: self.settings.config.clone(),
            tolerances: self.tolerances.clone(),
            output: path.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string(),
            points,
        };
        write_manifest(path, &m)?;
        Ok(())
    }

    fn table(&self, name: &str, t: &Table, points: Vec<PointRecord>) -> Result<PathBuf> {
        let path = self.dir()?.join(name);
        t.write(&path)?;
        self.manifest(&path, points)?;
        Ok(path)
    }

    fn json(&self, name: &str, v: &Value, points: Vec<PointRecord>) -> Result<PathBuf> {
        let path = self.dir()?.join(name);
        std::fs::write(&path, serde_json::to_string_pretty(v)? + "\n")?;
        self.manifest(&path, points)?;
        Ok(path)
    }
}

fn tolerances(s: &Settings) -> Value {
    json!({
        "steady_tol": s.tol.unwrap_or(DEFAULT_STEADY_TOL),
        "tail_tol": DEFAULT_TAIL_TOL,
        "rtol": s.rtol.unwrap_or(DEFAULT_RTOL),
        "initial_cutoff": s.cutoff,
    })
}

fn require_point(s: &Settings) -> Result<Point> {
    s.point.complete().map_err(|e| usage(e.to_string()))
}

fn layers_or(s: &Settings, default: &[&str]) -> Layers {
    s.layers.clone().unwrap_or_else(|| Layers::parse_list(default).expect("valid default layers"))
}

fn point_json(p: &Point) -> Value {
    serde_json::to_value(p).expect("serializable point")
}

fn record(index: usize, p: Option<&Point>, cutoff: Option<usize>, start: Instant, errors: &[String]) -> PointRecord {
    PointRecord {
        index,
        params: p.map_or(Value::Null, point_json),
        cutoff,
        wall_time_s: start.elapsed().as_secs_f64(),
        status: if errors.is_empty() { "ok".into() } else { format!("error: {}", errors.join("; ")) },
    }
}

pub fn steady(s: &Settings) -> Result<Value> {
    let p = require_point(s)?;
    let layers = layers_or(s, &["exact", "effective"]);
    let out = Output { command: "steady", settings: s, tolerances: tolerances(s) };
    let budget = MemBudget::new(s.max_mem_bytes);
    let opts = SolveOptions { cutoff: s.cutoff, tol: SolveOptions::tol_or_default(s.tol), budget: &budget };
    let start = Instant::now();

    let mut results = Map::new();
    let mut cutoff = None;
    let mut dist = None;
    let mut errors = Vec::new();
    for layer in layers.iter() {
        match evaluate(layer, &p, &opts) {
            Ok(o) => {
                cutoff = cutoff.or(o.cutoff);
                dist = dist.or(o.observables);
                results.insert(layer.as_str().into(), Value::Object(o.values));
            }
            Err(e) if layer == Layer::Exact => return Err(e.context("exact steady-state solve failed")),
            Err(e) => {
                errors.push(format!("{}: {e}", layer.as_str()));
                results.insert(layer.as_str().into(), json!({ "error": e.to_string() }));
            }
        }
    }
    let rec = record(0, Some(&p), cutoff, start, &errors);
    let summary = json!({
        "params": point_json(&p),
        "layers": layers.names(),
        "config_hash": config_hash(&s.config),
        "results": results,
    });
    out.json("steady.json", &summary, vec![rec.clone()])?;
    if let Some(obs) = dist {
        let mut t = Table::new(&["n", "p", "p_up", "p_down"]);
        for n in 0..obs.photon_dist.len() {
            t.push(vec![
                Cell::I(n as i64),
                Cell::F(obs.photon_dist[n]),
                Cell::F(obs.photon_dist_up[n]),
                Cell::F(obs.photon_dist_down[n]),
            ]);
        }
        out.table("steady_photon_dist.csv", &t, vec![rec])?;
    }
    Ok(summary)
}

fn sample_times(s: &Settings, default_t: f64, default_n: usize) -> Result<Vec<f64>> {
    let t_max = s.t_max.unwrap_or(default_t);
    let n = s.samples.unwrap_or(default_n);
    if !(t_max > 0.0) || n < 2 {
        return Err(usage("need t_max > 0 and at least 2 samples"));
    }
    Ok((0..n).map(|i| t_max * i as f64 / (n - 1) as f64).collect())
}

pub fn evolve_cmd(s: &Settings) -> Result<Value> {
    let p = require_point(s)?;
    let layers = layers_or(s, &["exact"]);
    let times = sample_times(s, 100.0, 101)?;
    let up = s.init_up.unwrap_or(true);
    let out = Output { command: "evolve", settings: s, tolerances: tolerances(s) };
    let m = p.model();
    let eta = p.eta.abs();
    let start = Instant::now();

    let mut header = vec!["t".to_string()];
    let exact = if layers.has(Layer::Exact) {
        let cut = match s.cutoff {
            Some(n) => FockCutoff::new(n),
            None => auto_cutoff(&m, DEFAULT_CUTOFF),
        };
        let rho0 = DensityMatrix::basis_state(cut.n_max, up, 0);
        let opts = EvolveOptions { rtol: s.rtol.unwrap_or(DEFAULT_RTOL), ..EvolveOptions::default() };
        header.extend(["exact_n_over_eta", "exact_sigma_z", "exact_x2"].map(String::from));
        Some((cut.n_max, evolve(&rho0, &m, &times, &opts).context("master-equation evolution failed")?))
    } else {
        None
    };
    let cum = if layers.has(Layer::Cumulant) {
        header.extend(["cumulant_n_over_eta", "cumulant_sigma_z"].map(String::from));
        Some(integrate_cumulants(&CumulantState::vacuum(up), &m, &times, s.rtol.unwrap_or(DEFAULT_RTOL))?)
    } else {
        None
    };
    let mut t = Table::new(&header);
    for (i, &ti) in times.iter().enumerate() {
        let mut row = vec![Cell::F(ti)];
        if let Some((_, ex)) = &exact {
            let o = &ex[i].obs;
            row.extend([Cell::F(o.n_photon / eta), Cell::F(o.sigma_z), Cell::F(o.x2)]);
        }
        if let Some(c) = &cum {
            row.extend([Cell::F(c[i].state.n / eta), Cell::F(c[i].state.sz_mean)]);
        }
        t.push(row);
    }
    let rec = record(0, Some(&p), exact.as_ref().map(|e| e.0), start, &[]);
    let path = out.table("evolve.csv", &t, vec![rec])?;
    Ok(json!({ "output": path, "samples": times.len() }))
}

struct RowResult {
    cells: Vec<Cell>,
    record: PointRecord,
}

pub fn phase_diagram(s: &Settings) -> Result<Value> {
    let axis1 = s.axis1.ok_or_else(|| usage("phase-diagram needs --axis1"))?;
    let layers = layers_or(s, &["meanfield"]);
    let grid = build_grid(&s.point, &axis1, s.axis2.as_ref());
    let out = Output { command: "phase-diagram", settings: s, tolerances: tolerances(s) };
    let budget = MemBudget::new(s.max_mem_bytes);
    let opts = SolveOptions { cutoff: s.cutoff, tol: SolveOptions::tol_or_default(s.tol), budget: &budget };

    let mut header: Vec<String> = vec![format!("axis1_{}", axis1.name.as_str())];
    if let Some(a2) = &s.axis2 {
        header.push(format!("axis2_{}", a2.name.as_str()));
    }
    header.extend(["eta", "lam_m", "lam_p", "kappa_ratio"].map(String::from));
    for l in layers.iter() {
        header.extend(column_names(l));
    }
    header.push("error".into());

    let rows = parallel_map(&grid, s.workers, |g| {
        let start = Instant::now();
        let mut cells: Vec<Cell> = g.coords.iter().map(|&c| Cell::F(c)).collect();
        let mut errors = Vec::new();
        let mut cutoff = None;
        match &g.point {
            Ok(p) => {
                cells.extend([p.eta, p.lam_m, p.lam_p, p.kappa_ratio].map(Cell::F));
                for l in layers.iter() {
                    match evaluate(l, p, &opts) {
                        Ok(o) => {
                            cutoff = cutoff.or(o.cutoff);
                            cells.extend(o.cells(l));
                        }
                        Err(e) => {
                            errors.push(format!("{}: {e}", l.as_str()));
                            cells.extend(empty_cells(l));
                        }
                    }
                }
            }
            Err(e) => {
                errors.push(e.clone());
                cells.extend(vec![Cell::Empty; 4]);
                for l in layers.iter() {
                    cells.extend(empty_cells(l));
                }
            }
        }
        cells.push(Cell::S(errors.join("; ")));
        RowResult { cells, record: record(g.index, g.point.as_ref().ok(), cutoff, start, &errors) }
    })?;
    let mut t = Table::new(&header);
    let mut recs = Vec::with_capacity(rows.len());
    for r in rows {
        t.push(r.cells);
        recs.push(r.record);
    }
    let failed = recs.iter().filter(|r| r.status != "ok").count();
    let path = out.table("phase_diagram.csv", &t, recs)?;
    Ok(json!({ "output": path, "points": grid.len(), "failed": failed }))
}

/// `lam_m` where the steepest drop of `y` turns from concave to convex,
/// from the sign change of the second difference on a uniform grid.
pub fn inflection_point(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len();
    if n < 4 || y.len() != n || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let (k, drop) = (0..n - 1)
        .map(|i| (i, y[i + 1] - y[i]))
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if !(drop < 0.0) {
        return None;
    }
    let d2 = |j: usize| y[j + 1] - 2.0 * y[j] + y[j - 1];
    // sign changes d2(j) <= 0 <= d2(j+1) for interior j, nearest to the steep segment
    (1..n - 2)
        .filter(|&j| d2(j) <= 0.0 && d2(j + 1) >= 0.0 && d2(j) != d2(j + 1))
        .min_by_key(|&j| (j as i64 - k as i64).abs())
        .map(|j| {
            let (a, b) = (d2(j), d2(j + 1));
            x[j] + (x[j + 1] - x[j]) * a / (a - b)
        })
        .or(Some(0.5 * (x[k] + x[k + 1])))
}

pub fn scan_order_parameter(s: &Settings) -> Result<Value> {
    let axis = s.axis1.ok_or_else(|| usage("scan-order-parameter needs --axis1 lam_m:min:max:steps"))?;
    if axis.name != AxisName::LamM {
        return Err(usage("scan-order-parameter sweeps lam_m"));
    }
    let r = s.point.r.ok_or_else(|| usage("scan-order-parameter needs --r"))?;
    let etas = s.etas.clone().ok_or_else(|| usage("scan-order-parameter needs --etas"))?;
    let kappa = s.point.kappa_ratio.ok_or_else(|| usage("missing parameter 'kappa_ratio'"))?;
    let layers = layers_or(s, &["exact", "effective", "meanfield"]);
    let out = Output { command: "scan-order-parameter", settings: s, tolerances: tolerances(s) };
    let budget = MemBudget::new(s.max_mem_bytes);
    let opts = SolveOptions { cutoff: s.cutoff, tol: SolveOptions::tol_or_default(s.tol), budget: &budget };

    let lams = axis.values();
    let pts: Vec<Point> = lams
        .iter()
        .flat_map(|&lm| etas.iter().map(move |&eta| Point { eta, lam_m: lm, lam_p: r * lm, kappa_ratio: kappa }))
        .collect();
    let idx: Vec<usize> = (0..pts.len()).collect();
    let rows = parallel_map(&idx, s.workers, |&i| {
        let p = &pts[i];
        let start = Instant::now();
        let mut vals = [f64::NAN; 3];
        let mut errors = Vec::new();
        let mut cutoff = None;
        for (slot, l) in [(0, Layer::Exact), (1, Layer::Effective), (2, Layer::Meanfield)] {
            if !layers.has(l) {
                continue;
            }
            match evaluate(l, p, &opts) {
                Ok(o) => {
                    cutoff = cutoff.or(o.cutoff);
                    vals[slot] = o.values["n_over_eta"].as_f64().unwrap_or(f64::NAN);
                }
                Err(e) => errors.push(format!("{}: {e}", l.as_str())),
            }
        }
        (vals, cutoff, record(i, Some(p), cutoff, start, &errors), errors.join("; "))
    })?;

    let mut t = Table::new(&[
        "lam_m",
        "eta",
        "n_exact_over_eta",
        "n_effective_over_eta",
        "n_meanfield_over_eta",
        "exact_cutoff",
        "error",
    ]);
    let cell = |v: f64| if v.is_nan() { Cell::Empty } else { Cell::F(v) };
    let mut recs = Vec::new();
    for (p, (vals, cutoff, rec, err)) in pts.iter().zip(&rows) {
        t.push(vec![
            Cell::F(p.lam_m),
            Cell::F(p.eta),
            cell(vals[0]),
            cell(vals[1]),
            cell(vals[2]),
            cutoff.map_or(Cell::Empty, |c| Cell::I(c as i64)),
            Cell::S(err.clone()),
        ]);
        recs.push(rec.clone());
    }
    let path = out.table("scan_order_parameter.csv", &t, recs.clone())?;

    let lam_c_plus = boundary_lambda_c(r, kappa).map_or(f64::NAN, |b| b.1);
    let (src, slot) = if layers.has(Layer::Exact) { ("exact", 0) } else { ("effective", 1) };
    let mut inf = Table::new(&["eta", "lam_star", "lam_c_plus", "delta_lam", "source"]);
    let mut stars = Vec::new();
    for (j, &eta) in etas.iter().enumerate() {
        let y: Vec<f64> = (0..lams.len()).map(|i| rows[i * etas.len() + j].0[slot]).collect();
        let star = inflection_point(&lams, &y);
        stars.push(json!({ "eta": eta, "lam_star": star }));
        inf.push(vec![
            Cell::F(eta),
            Cell::opt_f(star),
            Cell::F(lam_c_plus),
            Cell::opt_f(star.map(|l| l - lam_c_plus)),
            Cell::S(src.into()),
        ]);
    }
    out.table("scan_inflection.csv", &inf, recs)?;
    Ok(json!({ "output": path, "lam_c_plus": lam_c_plus, "inflection": stars }))
}

pub fn scaling_cmd(s: &Settings) -> Result<Value> {
    let rs = s.rs.clone().ok_or_else(|| usage("scaling needs --rs"))?;
    let etas = s.etas.clone().ok_or_else(|| usage("scaling needs --etas"))?;
    let dlams = s.dlams.clone().ok_or_else(|| usage("scaling needs --dlams"))?;
    let kappa = s.point.kappa_ratio.ok_or_else(|| usage("missing parameter 'kappa_ratio'"))?;
    let layers = layers_or(s, &["exact", "scaling"]);
    let out = Output { command: "scaling", settings: s, tolerances: tolerances(s) };
    let budget = MemBudget::new(s.max_mem_bytes);
    let opts = SolveOptions { cutoff: s.cutoff, tol: SolveOptions::tol_or_default(s.tol), budget: &budget };

    let mut jobs = Vec::new();
    for &r in &rs {
        for &eta in &etas {
            for &dl in &dlams {
                jobs.push((r, eta, dl));
            }
        }
    }
    let header = [
        "r", "eta", "dlam", "lam_m", "lam_p", "p_minus", "c1", "c2", "x2_exact", "x2_theory",
        "x2_theory_linear", "x2_dicke_ref", "collapse_x", "collapse_y_exact", "collapse_y_theory",
        "collapse_residual", "exact_cutoff", "error",
    ];
    let idx: Vec<usize> = (0..jobs.len()).collect();
    let rows = parallel_map(&idx, s.workers, |&i| {
        let (r, eta, dl) = jobs[i];
        let start = Instant::now();
        let mut cells = vec![Cell::F(r), Cell::F(eta), Cell::F(dl)];
        let mut errors = Vec::new();
        let mut cutoff = None;
        let sc = match scaling_coeffs(r, kappa).and_then(|sc| critical_point(r, kappa).map(|cp| (sc, cp))) {
            Ok(v) => v,
            Err(e) => {
                errors.push(e.to_string());
                cells.extend(vec![Cell::Empty; header.len() - 4]);
                cells.push(Cell::S(errors.join("; ")));
                return (cells, record(i, None, None, start, &errors));
            }
        };
        let (sc, cp) = sc;
        let p = Point { eta, lam_m: cp.lam_m + dl, lam_p: r * (cp.lam_m + dl), kappa_ratio: kappa };
        let x2_exact = if layers.has(Layer::Exact) {
            match evaluate(Layer::Exact, &p, &opts) {
                Ok(o) => {
                    cutoff = o.cutoff;
                    o.values["x2"].as_f64()
                }
                Err(e) => {
                    errors.push(format!("exact: {e}"));
                    None
                }
            }
        } else {
            None
        };
        let d = DimlessParams::new(eta, p.lam_m, p.lam_p, kappa);
        let theory = if layers.has(Layer::Scaling) {
            match x2_stationary(&d, eta) {
                Ok(v) => Some(v),
                Err(e) => {
                    errors.push(format!("scaling: {e}"));
                    None
                }
            }
        } else {
            None
        };
        let lin = sc.x2_linearized(eta, dl);
        let u = sc.collapse_x(eta, dl);
        let y_th = collapse_curve(u);
        let y_exact = x2_exact.map(|x| sc.collapse_y(dl, x));
        cells.extend([
            Cell::F(p.lam_m),
            Cell::F(p.lam_p),
            Cell::F(cp.p_minus),
            Cell::F(sc.c1),
            Cell::F(sc.c2),
            Cell::opt_f(x2_exact),
            Cell::opt_f(theory),
            Cell::F(lin),
            Cell::opt_f(theory.map(|t| t / cp.p_minus)),
            Cell::F(u),
            Cell::opt_f(y_exact),
            Cell::F(y_th),
            Cell::opt_f(y_exact.map(|y| y - y_th)),
            cutoff.map_or(Cell::Empty, |c| Cell::I(c as i64)),
            Cell::S(errors.join("; ")),
        ]);
        (cells, record(i, Some(&p), cutoff, start, &errors))
    })?;
    let mut t = Table::new(&header);
    let mut recs = Vec::new();
    for (c, r) in rows {
        t.push(c);
        recs.push(r);
    }
    let path = out.table("scaling.csv", &t, recs)?;
    Ok(json!({ "output": path, "points": jobs.len() }))
}

fn fixed_point_row(f: &FixedPoint) -> Vec<Cell> {
    let e = f.jacobian_eigs;
    vec![
        Cell::S(serde_json::to_value(f.kind).unwrap().as_str().unwrap_or("?").to_string()),
        Cell::I(f.stable as i64),
        Cell::F(f.state.c.re),
        Cell::F(f.state.c.im),
        Cell::F(f.abs_c_sq()),
        Cell::F(f.state.s_z),
        Cell::F(e[0].re),
        Cell::F(e[0].im),
        Cell::F(e[1].re),
        Cell::F(e[1].im),
    ]
}

pub fn meanfield_cmd(s: &Settings) -> Result<Value> {
    let p = require_point(s)?;
    let out = Output { command: "meanfield", settings: s, tolerances: tolerances(s) };
    let start = Instant::now();
    let (q, _) = canonicalize(&p.model());
    let d = q.to_dimensionless()?;
    let mf = classify_mf(&d);
    let mut all = vec![np_stability(&d, NormalBranch::Up), np_stability(&d, NormalBranch::Down)];
    all.extend(sp_fixed_points(&d));
    let mut t = Table::new(&[
        "kind", "stable", "re_c", "im_c", "abs_c_sq", "s_z", "eig1_re", "eig1_im", "eig2_re", "eig2_im",
    ]);
    for f in &all {
        t.push(fixed_point_row(f));
    }
    let bounds = boundary_r_pm(d.kappa_ratio);
    let lam_c = d.r.and_then(|r| boundary_lambda_c(r, d.kappa_ratio).ok());
    let summary = json!({
        "params": point_json(&p),
        "region": mf.region.as_str(),
        "stable": mf.stable_points.iter().map(|f| f.kind).collect::<Vec<_>>(),
        "r_minus": bounds.r_minus,
        "r_plus": if bounds.r_plus.is_finite() { json!(bounds.r_plus) } else { json!("inf") },
        "lam_c_minus": lam_c.map(|b| b.0),
        "lam_c_plus": lam_c.and_then(|b| b.1.is_finite().then_some(b.1)),
        "lam_tricritical": tricritical_lambda(d.kappa_ratio),
    });
    let rec = record(0, Some(&p), None, start, &[]);
    out.table("meanfield_fixed_points.csv", &t, vec![rec.clone()])?;
    out.json("meanfield.json", &summary, vec![rec])?;
    Ok(summary)
}

pub fn cumulant_cmd(s: &Settings) -> Result<Value> {
    let p = require_point(s)?;
    let times = sample_times(s, 100.0, 101)?;
    let up = s.init_up.unwrap_or(true);
    let out = Output { command: "cumulant", settings: s, tolerances: tolerances(s) };
    let m = p.model();
    let eta = p.eta.abs();
    let start = Instant::now();
    let traj = integrate_cumulants(&CumulantState::vacuum(up), &m, &times, s.rtol.unwrap_or(DEFAULT_RTOL))?;
    let mut t = Table::new(&["t", "n_over_eta", "sigma_z", "re_a", "im_a", "re_a2", "im_a2"]);
    for smp in &traj {
        let st = &smp.state;
        t.push(vec![
            Cell::F(smp.tau),
            Cell::F(st.n / eta),
            Cell::F(st.sz_mean),
            Cell::F(st.a_mean.re),
            Cell::F(st.a_mean.im),
            Cell::F(st.a2.re),
            Cell::F(st.a2.im),
        ]);
    }
    let numeric = stationary_normal_numeric(&m).ok();
    let summary = json!({
        "params": point_json(&p),
        "sigma_z_leading": leading_sigma_z(&m),
        "delta": delta_correction(&m),
        "sigma_z_stationary": stationary_normal(&m).ok(),
        "sigma_z_stationary_numeric": numeric.map(|n| n.sz),
        "n_over_eta_stationary_numeric": numeric.map(|n| n.n / eta),
    });
    let rec = record(0, Some(&p), None, start, &[]);
    out.table("cumulant.csv", &t, vec![rec.clone()])?;
    out.json("cumulant_summary.json", &summary, vec![rec])?;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inflection_of_smooth_step() {
        let x: Vec<f64> = (0..41).map(|i| 2.0 + 0.05 * i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * (1.0 - ((v - 2.83) / 0.2).tanh())).collect();
        let s = inflection_point(&x, &y).unwrap();
        assert!((s - 2.83).abs() < 0.01, "{s}");
        assert!(inflection_point(&x, &vec![1.0; x.len()]).is_none());
        assert!(inflection_point(&x[..3], &y[..3]).is_none());
    }
}
