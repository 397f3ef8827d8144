use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};
use uncstates_core::fock::state_from_json;
use uncstates_core::par;
use uncstates_core::reps::{OperatorMatrix, RepSpec};
use uncstates_core::states::{canonical_cs, spin_cs, su11_cs};
use uncstates_core::uncertainty::{
    appendix_b_scan, converged_moments, moments, AppendixBGrid, AppendixBReport, MomentSet, OrderEntry,
    UncertaintyReport, CONVERGENCE_TOL,
};
use uncstates_core::C64;

use super::{parse_orders, resolve_ops, Ctx};
use crate::args::{AppendixBArgs, CheckArgs, Format, ScanArgs, ScanFamily};
use crate::report::{self, json_arg, pair, parse, pick_format, read_json, Cx, Meta, Outcome};

const REPORT_FORMATS: [Format; 2] = [Format::Json, Format::Csv];

#[derive(Serialize)]
struct CheckBody<'a> {
    n: usize,
    orders: &'a [OrderEntry],
    psd_min_eig: f64,
    tolerance: f64,
    char_sigma: &'a [f64],
    char_cmat: &'a [f64],
    holds: bool,
}

#[derive(Serialize)]
struct OrderRow {
    r: usize,
    lhs: f64,
    rhs: f64,
    slack: f64,
    equal: bool,
    tolerance: f64,
}

pub fn check(ctx: &Ctx, a: &CheckArgs) -> Result<Outcome> {
    let flag = if a.json { Some(Format::Json) } else { ctx.cli.format };
    let format = pick_format(flag, ctx.cfg.format, Format::Json, &REPORT_FORMATS)?;
    let state = state_from_json(&read_json(&a.state)?)?;
    let ops = resolve_ops(state.as_ref().rep(), &a.ops)?;
    let refs: Vec<&OperatorMatrix> = ops.iter().collect();
    let ms = moments(state.as_ref(), &refs)?;
    let orders = match &a.orders {
        Some(s) => parse_orders(s)?,
        None => Vec::new(),
    };
    let tol = ctx.cfg.tolerance.equality;
    let rep = UncertaintyReport::new(&ms, &orders, tol)?;
    let holds = rep.holds();
    let bytes = match format {
        Format::Csv => {
            let rows: Vec<OrderRow> = rep
                .orders
                .iter()
                .map(|o| OrderRow { r: o.r, lhs: o.lhs, rhs: o.rhs, slack: o.slack, equal: o.equal, tolerance: tol })
                .collect();
            report::csv(&rows)?
        }
        _ => {
            let body = CheckBody {
                n: ms.n(),
                orders: &rep.orders,
                psd_min_eig: rep.psd_min_eig,
                tolerance: tol,
                char_sigma: &rep.char_sigma,
                char_cmat: &rep.char_cmat,
                holds,
            };
            report::json(&Meta::new("ur check", ctx.cfg.seed), &body)?
        }
    };
    Ok(Outcome::checked(bytes, holds, || {
        let worst = rep.orders.iter().map(|o| o.slack).fold(f64::INFINITY, f64::min);
        format!("smallest slack {worst:e}, psd min eigenvalue {:e} (tolerance {tol:e})", rep.psd_min_eig)
    }))
}

/// Explicit points, or the polar product `radii x phases`.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanGrid {
    /// Bargmann index (su11-cs).
    k: Option<f64>,
    /// Spin (spin-cs).
    j: Option<f64>,
    points: Option<Vec<Cx>>,
    radii: Option<Vec<f64>>,
    phases: Option<Vec<f64>>,
}

impl ScanGrid {
    fn points(&self) -> Result<Vec<C64>> {
        match (&self.points, &self.radii, &self.phases) {
            (Some(p), None, None) => Ok(p.iter().map(|&z| z.into()).collect()),
            (None, Some(r), Some(ph)) => {
                Ok(r.iter().flat_map(|&r| ph.iter().map(move |&t| C64::from_polar(r, t))).collect())
            }
            _ => bail!("grid needs either points or radii and phases"),
        }
    }
}

#[derive(Serialize)]
struct ScanPoint {
    param: [f64; 2],
    dim: usize,
    lhs: f64,
    rhs: f64,
    slack: f64,
    equal: bool,
    psd_min_eig: f64,
}

#[derive(Serialize)]
struct ScanRow {
    param_re: f64,
    param_im: f64,
    dim: usize,
    lhs: f64,
    rhs: f64,
    slack: f64,
    equal: bool,
    tolerance: f64,
}

#[derive(Serialize)]
struct ScanBody<'a> {
    family: &'static str,
    /// `k` for su11-cs, `j` for spin-cs.
    label: Option<f64>,
    ops: &'a str,
    order: usize,
    tolerance: f64,
    points: &'a [ScanPoint],
    max_abs_slack: f64,
    min_slack: f64,
    holds: bool,
}

fn ladder(base: usize) -> Vec<usize> {
    [2, 3, 4, 6, 8].iter().map(|m| base * m / 2).collect()
}

pub fn scan(ctx: &Ctx, a: &ScanArgs) -> Result<Outcome> {
    let format = pick_format(ctx.cli.format, ctx.cfg.format, Format::Json, &REPORT_FORMATS)?;
    let grid: ScanGrid = parse(json_arg(&a.grid)?, "scan grid")?;
    let points = grid.points()?;
    let (name, label, ops_spec) = match a.family {
        ScanFamily::Cs => ("cs", None, "qp"),
        ScanFamily::Su11Cs => {
            ("su11-cs", Some(grid.k.ok_or_else(|| anyhow::anyhow!("su11-cs grid needs k"))?), "x1x2x3")
        }
        ScanFamily::SpinCs => {
            ("spin-cs", Some(grid.j.ok_or_else(|| anyhow::anyhow!("spin-cs grid needs j"))?), "x1x2x3")
        }
    };
    let ops_spec = a.ops.as_deref().unwrap_or(ops_spec);
    let tol = ctx.cfg.tolerance.equality;
    let dims = ladder(ctx.cfg.truncation.dim);
    let at = |z: C64, d: usize| -> uncstates_core::Result<(MomentSet, RepSpec)> {
        let psi = match a.family {
            ScanFamily::Cs => canonical_cs(z, d)?,
            ScanFamily::Su11Cs => su11_cs(z, label.unwrap_or(1.0), d)?,
            ScanFamily::SpinCs => spin_cs(z, label.unwrap_or(1.0))?,
        };
        let ops = resolve_ops(psi.rep, ops_spec).map_err(|e| uncstates_core::Error::InvalidInput(e.to_string()))?;
        let refs: Vec<&OperatorMatrix> = ops.iter().collect();
        Ok((moments(&psi, &refs)?, psi.rep))
    };
    let results = par::map(ctx.cfg.exec(), &points, |&z| -> uncstates_core::Result<ScanPoint> {
        let (ms, dim) = if a.family == ScanFamily::SpinCs {
            let (ms, rep) = at(z, 0)?;
            (ms, rep.dim())
        } else {
            converged_moments(&dims, CONVERGENCE_TOL, |d| at(z, d).map(|(ms, _)| ms))?
        };
        let rep = UncertaintyReport::new(&ms, &[a.order], tol)?;
        let o = &rep.orders[0];
        Ok(ScanPoint {
            param: pair(z),
            dim,
            lhs: o.lhs,
            rhs: o.rhs,
            slack: o.slack,
            equal: o.equal,
            psd_min_eig: rep.psd_min_eig,
        })
    });
    let points = results.into_iter().collect::<uncstates_core::Result<Vec<_>>>()?;
    let max_abs_slack = points.iter().map(|p| p.slack.abs()).fold(0.0, f64::max);
    let min_slack = points.iter().map(|p| p.slack).fold(f64::INFINITY, f64::min);
    let floor = -tol;
    let holds = points.iter().all(|p| p.slack >= floor * p.lhs.abs().max(1.0) && p.psd_min_eig >= floor);
    let bytes = match format {
        Format::Csv => {
            let rows: Vec<ScanRow> = points
                .iter()
                .map(|p| ScanRow {
                    param_re: p.param[0],
                    param_im: p.param[1],
                    dim: p.dim,
                    lhs: p.lhs,
                    rhs: p.rhs,
                    slack: p.slack,
                    equal: p.equal,
                    tolerance: tol,
                })
                .collect();
            report::csv(&rows)?
        }
        _ => {
            let body = ScanBody {
                family: name,
                label,
                ops: ops_spec,
                order: a.order,
                tolerance: tol,
                points: &points,
                max_abs_slack,
                min_slack,
                holds,
            };
            report::json(&Meta::new("ur scan", ctx.cfg.seed), &body)?
        }
    };
    Ok(Outcome::checked(bytes, holds, || format!("smallest slack {min_slack:e} (tolerance {tol:e})")))
}

#[derive(Serialize)]
struct AppendixBRow {
    u1_re: f64,
    u1_im: f64,
    v1_re: f64,
    v1_im: f64,
    z1_re: f64,
    z1_im: f64,
    condition_a: bool,
    dim: usize,
    slack_r2: f64,
    slack_r3: f64,
    equal_r2: bool,
    fidelity_to_cs: Option<f64>,
}

pub fn appendix_b(ctx: &Ctx, a: &AppendixBArgs) -> Result<Outcome> {
    let format = pick_format(ctx.cli.format, ctx.cfg.format, Format::Json, &REPORT_FORMATS)?;
    let grid =
        if a.grid == "default" { AppendixBGrid::default() } else { parse(json_arg(&a.grid)?, "Appendix B grid")? };
    let rep: AppendixBReport = appendix_b_scan(a.k, &grid, ctx.cfg.exec())?;
    let bytes = match format {
        Format::Csv => {
            let rows: Vec<AppendixBRow> = rep
                .points
                .iter()
                .map(|p| AppendixBRow {
                    u1_re: p.u1.re,
                    u1_im: p.u1.im,
                    v1_re: p.v1.re,
                    v1_im: p.v1.im,
                    z1_re: p.z1.re,
                    z1_im: p.z1.im,
                    condition_a: p.condition_a,
                    dim: p.dim,
                    slack_r2: p.slack_r2,
                    slack_r3: p.slack_r3,
                    equal_r2: p.equal_r2,
                    fidelity_to_cs: p.fidelity_to_cs,
                })
                .collect();
            report::csv(&rows)?
        }
        _ => report::json(&Meta::new("appendix-b", ctx.cfg.seed), &rep)?,
    };
    let unique = rep.unique_manifold;
    Ok(Outcome::checked(bytes, unique, || {
        format!(
            "equality manifold is not unique: max on-manifold slack {:e}, min off-manifold relative slack {:e}",
            rep.max_slack_on, rep.min_relative_slack_off
        )
    }))
}
