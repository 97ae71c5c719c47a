//! Command-line front end: single-point solves, parameter sweeps and
//! scaling studies, with CSV output and per-file run manifests.

pub mod args;
pub mod commands;
pub mod config;
pub mod format;
pub mod grid;
pub mod layers;
pub mod manifest;
pub mod sweep;

use anyhow::Result;
use serde_json::Value;

use args::{Command, Common, PointArgs, TimeArgs};
use config::{ov, resolve, Settings};

fn common_overrides(c: &Common) -> Vec<(&'static str, Value)> {
    vec![
        ov("cutoff", &c.cutoff),
        ov("tol", &c.tol),
        ov("layers", &c.layers),
        ov("workers", &c.workers),
        ov("max_mem", &c.max_mem),
        ov("out", &c.out),
    ]
}

fn point_overrides(p: &PointArgs) -> Vec<(&'static str, Value)> {
    vec![
        ov("eta", &p.eta),
        ov("lam_m", &p.lam_m),
        ov("lam_p", &p.lam_p),
        ov("kappa_ratio", &p.kappa_ratio),
    ]
}

fn time_overrides(t: &TimeArgs) -> Vec<(&'static str, Value)> {
    vec![ov("t_max", &t.t_max), ov("samples", &t.samples), ov("init", &t.init), ov("rtol", &t.rtol)]
}

fn settings(name: &str, c: &Common, mut o: Vec<(&'static str, Value)>) -> Result<Settings> {
    o.extend(common_overrides(c));
    resolve(name, c.config.as_deref(), o)
}

/// Runs one subcommand and returns its JSON summary (also printed by the binary).
pub fn run(cmd: &Command) -> Result<Value> {
    match cmd {
        Command::Steady { point, common } => commands::steady(&settings("steady", common, point_overrides(point))?),
        Command::Evolve { point, time, common } => {
            let mut o = point_overrides(point);
            o.extend(time_overrides(time));
            commands::evolve_cmd(&settings("evolve", common, o)?)
        }
        Command::PhaseDiagram { point, axis1, axis2, common } => {
            let o = vec![
                ov("eta", &point.eta),
                ov("lam_m", &point.lam_m),
                ov("lam_p", &point.lam_p),
                ov("kappa_ratio", &point.kappa_ratio),
                ov("r", &point.r),
                ov("axis1", axis1),
                ov("axis2", axis2),
            ];
            commands::phase_diagram(&settings("phase-diagram", common, o)?)
        }
        Command::ScanOrderParameter { axis1, r, etas, kappa_ratio, common } => {
            let o = vec![ov("axis1", axis1), ov("r", r), ov("etas", etas), ov("kappa_ratio", kappa_ratio)];
            commands::scan_order_parameter(&settings("scan-order-parameter", common, o)?)
        }
        Command::Scaling { rs, etas, dlams, kappa_ratio, common } => {
            let o = vec![ov("rs", rs), ov("etas", etas), ov("dlams", dlams), ov("kappa_ratio", kappa_ratio)];
            commands::scaling_cmd(&settings("scaling", common, o)?)
        }
        Command::Meanfield { point, common } => {
            commands::meanfield_cmd(&settings("meanfield", common, point_overrides(point))?)
        }
        Command::Cumulant { point, time, common } => {
            let mut o = point_overrides(point);
            o.extend(time_overrides(time));
            commands::cumulant_cmd(&settings("cumulant", common, o)?)
        }
    }
}
