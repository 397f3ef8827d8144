use anyhow::{bail, Context, Result};
use serde::Serialize;
use uncstates_core::acceptance::{run_criterion, AcceptanceConfig, CriterionOutcome};
use uncstates_core::complementarity::{distance_r, GKind};
use uncstates_core::dynamics::{coherent_initial_data, run_dynamics, DynamicsSample, FrequencyProfile};
use uncstates_core::fock::state_from_json;
use uncstates_core::reps::{build_rep, OperatorMatrix, RepKind, RepSpec};

use super::{resolve_ops, Ctx};
use crate::args::{DistanceArgs, DumpOpsArgs, DynamicsArgs, Format, SelftestArgs};
use crate::report::{self, json_arg, pair, parse, parse_complex, pick_format, read_json, Meta, Outcome};

pub fn distance(ctx: &Ctx, a: &DistanceArgs) -> Result<Outcome> {
    let format = pick_format(ctx.cli.format, ctx.cfg.format, Format::Json, &[Format::Json, Format::Csv])?;
    let s1 = state_from_json(&read_json(&a.state1)?)?;
    let s2 = state_from_json(&read_json(&a.state2)?)?;
    let rep = s1.as_ref().rep();
    if rep != s2.as_ref().rep() {
        bail!("the two states live on different representations");
    }
    let ops = resolve_ops(rep, &a.ops)?;
    let refs: Vec<&OperatorMatrix> = ops.iter().collect();
    let xsq;
    let kind = match a.g.split_once(':') {
        None if a.g == "trace" => GKind::TraceOverlap,
        Some(("xsq", name)) => {
            xsq = resolve_ops(rep, name)?;
            match xsq.as_slice() {
                [x] => GKind::XSquared(x),
                _ => bail!("xsq needs exactly one operator"),
            }
        }
        _ => bail!("--g must be trace or xsq:<operator>, got {:?}", a.g),
    };
    let d = distance_r(s1.as_ref(), s2.as_ref(), &refs, a.order, kind)?;
    let bytes = match format {
        Format::Csv => report::csv(&[d])?,
        _ => report::json(&Meta::new("distance", ctx.cfg.seed), &d)?,
    };
    Ok(Outcome::ok(bytes))
}

/// One CSV line of the dynamics output.
#[derive(Serialize)]
struct DynamicsRow {
    t: f64,
    #[serde(rename = "Re u")]
    re_u: f64,
    #[serde(rename = "Im u")]
    im_u: f64,
    #[serde(rename = "Re v")]
    re_v: f64,
    #[serde(rename = "Im v")]
    im_v: f64,
    wronskian_drift: f64,
    invariant_residual: f64,
    fidelity_to_frame: f64,
}

impl From<&DynamicsSample> for DynamicsRow {
    fn from(s: &DynamicsSample) -> Self {
        DynamicsRow {
            t: s.t,
            re_u: s.u.re,
            im_u: s.u.im,
            re_v: s.v.re,
            im_v: s.v.im,
            wronskian_drift: s.wronskian_drift,
            invariant_residual: s.invariant_residual,
            fidelity_to_frame: s.fidelity_to_frame,
        }
    }
}

#[derive(Serialize)]
struct DynamicsBody<'a> {
    profile: &'a FrequencyProfile,
    alpha: [f64; 2],
    dim: usize,
    dt: f64,
    tolerance: f64,
    samples: Vec<DynamicsRow>,
}

pub fn dynamics(ctx: &Ctx, a: &DynamicsArgs) -> Result<Outcome> {
    let format = pick_format(ctx.cli.format, None, Format::Csv, &[Format::Csv, Format::Json])?;
    let profile: FrequencyProfile = parse(json_arg(&a.profile)?, "frequency profile")?;
    let alpha = parse_complex(&a.alpha)?;
    let dim = a.dim.unwrap_or(ctx.cfg.truncation.dim);
    let (e0, d0) = coherent_initial_data(profile.omega0());
    let samples = run_dynamics(&profile, e0, d0, alpha, a.t_end, a.dt, dim)?;
    let tol = ctx.cfg.tolerance.invariant;
    let worst = samples
        .iter()
        .map(|s| s.wronskian_drift.max((s.u.norm_sqr() - s.v.norm_sqr() - 1.0).abs()))
        .fold(0.0, f64::max);
    let rows: Vec<DynamicsRow> = samples.iter().map(DynamicsRow::from).collect();
    let bytes = match format {
        Format::Json => {
            let body =
                DynamicsBody { profile: &profile, alpha: pair(alpha), dim, dt: a.dt, tolerance: tol, samples: rows };
            report::json(&Meta::new("dynamics", ctx.cfg.seed), &body)?
        }
        _ => report::csv(&rows)?,
    };
    Ok(Outcome::checked(bytes, worst <= tol, || format!("invariant drift {worst:e} exceeds {tol:e}")))
}

#[derive(Serialize)]
struct OperatorDump<'a> {
    rep: RepSpec,
    name: &'a str,
    dim: usize,
    /// Row-major `[re, im]` pairs.
    entries: Vec<[f64; 2]>,
}

#[derive(Serialize)]
struct DumpBody<'a> {
    operators: Vec<OperatorDump<'a>>,
}

pub fn dump_ops(ctx: &Ctx, a: &DumpOpsArgs) -> Result<Outcome> {
    pick_format(ctx.cli.format, None, Format::Json, &[Format::Json])?;
    let kind: RepKind = parse(json_arg(&a.rep)?, "representation")?;
    let spec = RepSpec::new(kind, a.dim.unwrap_or(ctx.cfg.truncation.dim))?;
    let set = build_rep(&spec)?;
    let mut names: Vec<String> = match &a.names {
        Some(s) => s.split(',').map(|n| n.trim().to_lowercase()).collect(),
        None => ["lower", "raise", "cartan", "x1", "x2"].map(String::from).to_vec(),
    };
    if a.names.is_none() && set.position.is_some() {
        names.extend(["q", "p"].map(String::from));
    }
    let operators = names
        .iter()
        .map(|n| {
            let op = set.by_name(n).with_context(|| format!("unknown operator {n:?}"))?;
            let d = op.dim();
            let entries =
                (0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| pair(op.entries[(i, j)])).collect();
            Ok(OperatorDump { rep: spec, name: n, dim: d, entries })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome::ok(report::json(&Meta::new("dump-ops", ctx.cfg.seed), &DumpBody { operators })?))
}

#[derive(Serialize)]
struct SelftestBody<'a> {
    trials: usize,
    criteria: &'a [CriterionOutcome],
    passed: bool,
}

pub fn selftest(ctx: &Ctx, a: &SelftestArgs) -> Result<Outcome> {
    let format = pick_format(ctx.cli.format, ctx.cfg.format, Format::Text, &[Format::Text, Format::Json])?;
    let ids: Vec<u8> = match &a.only {
        Some(s) => s
            .split(',')
            .map(|p| p.trim().parse::<u8>().with_context(|| format!("bad criterion {p:?}")))
            .collect::<Result<_>>()?,
        None => (1..=12).collect(),
    };
    if let Some(bad) = ids.iter().find(|&&i| !(1..=12).contains(&i)) {
        bail!("no criterion {bad}");
    }
    let trials = a.trials.unwrap_or(ctx.cfg.trials);
    let cfg = AcceptanceConfig { seed: ctx.cfg.seed, exec: ctx.cfg.exec(), trials };
    let outcomes: Vec<CriterionOutcome> = ids.iter().map(|&id| run_criterion(id, &cfg)).collect();
    let passed = outcomes.iter().all(|o| o.passed);
    let bytes = match format {
        Format::Json => {
            report::json(&Meta::new("selftest", ctx.cfg.seed), &SelftestBody { trials, criteria: &outcomes, passed })?
        }
        _ => {
            let mut text =
                format!("# uncstates {} selftest seed={} trials={}\n", env!("CARGO_PKG_VERSION"), cfg.seed, trials);
            for o in &outcomes {
                text.push_str(&format!("{o}\n"));
            }
            text.into_bytes()
        }
    };
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    Ok(Outcome::checked(bytes, passed, || format!("failed criteria: {failed:?}")))
}
