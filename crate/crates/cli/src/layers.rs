use anyhow::Result;
use rabi_core::cumulant::{delta_correction, stationary_normal, stationary_normal_numeric};
use rabi_core::effective::{effective_temperature, steady_phase, EffectiveTemperature, SteadyPhase};
use rabi_core::hilbert::FockCutoff;
use rabi_core::lindblad::{auto_cutoff, observables, steady_state, Observables, DEFAULT_CUTOFF, DEFAULT_STEADY_TOL};
use rabi_core::meanfield::classify_mf;
use rabi_core::model::canonicalize;
use rabi_core::scaling::{photon_from_x2, x2_stationary};
use serde_json::{json, Map, Value};

use crate::config::Layer;
use crate::format::Cell;
use crate::grid::Point;
use crate::sweep::{exact_solve_bytes, MemBudget};

pub struct SolveOptions<'a> {
    pub cutoff: Option<usize>,
    pub tol: f64,
    pub budget: &'a MemBudget,
}

impl SolveOptions<'_> {
    pub fn tol_or_default(tol: Option<f64>) -> f64 {
        tol.unwrap_or(DEFAULT_STEADY_TOL)
    }
}

pub fn keys(layer: Layer) -> &'static [&'static str] {
    match layer {
        Layer::Exact => &["n_over_eta", "sigma_z", "x2", "cutoff", "residual", "tail_population"],
        Layer::Meanfield => &["region", "n_stable", "n_over_eta"],
        Layer::Cumulant => &["sigma_z", "sigma_z_numeric", "n_over_eta", "delta"],
        Layer::Effective => &["phase", "n_over_eta", "sigma_z", "p_np_up", "p_np_down", "p_sp_down", "t_eff"],
        Layer::Scaling => &["x2", "n_over_eta"],
    }
}

pub fn column_names(layer: Layer) -> Vec<String> {
    keys(layer).iter().map(|k| format!("{}_{k}", layer.as_str())).collect()
}

pub struct LayerOutput {
    pub values: Map<String, Value>,
    pub cutoff: Option<usize>,
    pub observables: Option<Observables>,
}

impl LayerOutput {
    fn plain(values: Value) -> Self {
        Self {
            values: values.as_object().cloned().unwrap_or_default(),
            cutoff: None,
            observables: None,
        }
    }

    pub fn cells(&self, layer: Layer) -> Vec<Cell> {
        keys(layer)
            .iter()
            .map(|k| match self.values.get(*k) {
                Some(Value::Number(n)) if n.is_u64() => Cell::I(n.as_u64().unwrap() as i64),
                Some(Value::Number(n)) => Cell::F(n.as_f64().unwrap_or(f64::NAN)),
                Some(Value::String(s)) => Cell::S(s.clone()),
                _ => Cell::Empty,
            })
            .collect()
    }
}

pub fn empty_cells(layer: Layer) -> Vec<Cell> {
    vec![Cell::Empty; keys(layer).len()]
}

pub fn exact_steady(p: &Point, opts: &SolveOptions) -> Result<LayerOutput> {
    let m = p.model();
    let cut = match opts.cutoff {
        Some(n) => FockCutoff::new(n),
        None => auto_cutoff(&m, DEFAULT_CUTOFF),
    };
    let res = {
        let _guard = opts.budget.acquire(exact_solve_bytes(cut.n_max));
        steady_state(&m, cut, opts.tol)?
    };
    let obs = observables(&res.rho);
    let eta = p.eta.abs();
    Ok(LayerOutput {
        values: json!({
            "n_over_eta": obs.n_photon / eta,
            "sigma_z": obs.sigma_z,
            "x2": obs.x2,
            "cutoff": res.cutoff_used,
            "residual": res.residual,
            "tail_population": res.tail_population,
        })
        .as_object()
        .cloned()
        .unwrap(),
        cutoff: Some(res.cutoff_used),
        observables: Some(obs),
    })
}

pub fn meanfield(p: &Point) -> Result<LayerOutput> {
    let (q, _) = canonicalize(&p.model());
    let d = q.to_dimensionless()?;
    let mf = classify_mf(&d);
    let n = mf.sp().map_or(0.0, |f| f.abs_c_sq());
    Ok(LayerOutput::plain(json!({
        "region": mf.region.as_str(),
        "n_stable": mf.stable_points.len(),
        "n_over_eta": n,
    })))
}

pub fn cumulant(p: &Point) -> Result<LayerOutput> {
    let m = p.model();
    let num = stationary_normal_numeric(&m)?;
    Ok(LayerOutput::plain(json!({
        "sigma_z": stationary_normal(&m)?,
        "sigma_z_numeric": num.sz,
        "n_over_eta": num.n / p.eta.abs(),
        "delta": delta_correction(&m),
    })))
}

fn temperature_value(t: EffectiveTemperature) -> Value {
    match t {
        EffectiveTemperature::Finite(x) => x.into(),
        EffectiveTemperature::PlusInfinity => "inf".into(),
        EffectiveTemperature::PlusZero => "+0".into(),
        EffectiveTemperature::MinusZero => "-0".into(),
    }
}

pub fn effective(p: &Point) -> Result<LayerOutput> {
    let m = p.model();
    let (q, t) = canonicalize(&m);
    let pred = steady_phase(&q.to_dimensionless()?)?;
    let sz = if t.sigma_z_sign_flip { -pred.sigma_z } else { pred.sigma_z };
    Ok(LayerOutput::plain(json!({
        "phase": match pred.phase { SteadyPhase::NP => "NP", SteadyPhase::SP => "SP" },
        "n_over_eta": pred.n_photon_over_eta,
        "sigma_z": sz,
        "p_np_up": pred.populations.np_up,
        "p_np_down": pred.populations.np_down,
        "p_sp_down": pred.populations.sp_down,
        "t_eff": temperature_value(effective_temperature(&m)?),
    })))
}

pub fn scaling(p: &Point) -> Result<LayerOutput> {
    let (q, _) = canonicalize(&p.model());
    let d = q.to_dimensionless()?;
    let x2 = x2_stationary(&d, d.eta)?;
    Ok(LayerOutput::plain(json!({
        "x2": x2,
        "n_over_eta": photon_from_x2(&d, x2)? / d.eta,
    })))
}

pub fn evaluate(layer: Layer, p: &Point, opts: &SolveOptions) -> Result<LayerOutput> {
    match layer {
        Layer::Exact => exact_steady(p, opts),
        Layer::Meanfield => meanfield(p),
        Layer::Cumulant => cumulant(p),
        Layer::Effective => effective(p),
        Layer::Scaling => scaling(p),
    }
}
