use anyhow::{bail, Result};
use serde::Deserialize;
use serde_json::{json, Value};
use uncstates_core::fock::FockVector;
use uncstates_core::linalg::CMat;
use uncstates_core::reps::{build_rep, RepKind, RepSpec};
use uncstates_core::states::*;
use uncstates_core::C64;

use super::Ctx;
use crate::args::{BuildArgs, Family, Format};
use crate::report::{json_arg, pair, parse, pick_format, Cx, Outcome};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Cs {
    alpha: Cx,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Ss {
    alpha: Cx,
    u: Cx,
    v: Cx,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Spin {
    j: f64,
    tau: Option<Cx>,
    theta: Option<f64>,
    phi: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Su11 {
    xi: Cx,
    k: f64,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Bg {
    z: Cx,
    k: f64,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Qcs {
    alpha: Cx,
    q: f64,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Ous {
    rep: RepKind,
    u: Cx,
    v: Cx,
    z: Cx,
    w: Option<Cx>,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct Suq11 {
    u: Cx,
    v: Cx,
    z: Cx,
    q: f64,
    k: f64,
    dim: Option<usize>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MmSs {
    alphas: Vec<Cx>,
    /// Two-mode squeezing strength; alternative to `u` and `v`.
    r: Option<f64>,
    u: Option<Vec<Vec<Cx>>>,
    v: Option<Vec<Vec<Cx>>>,
    per_mode: Option<usize>,
}

fn matrix(rows: &[Vec<Cx>]) -> Result<CMat> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        bail!("Bogoliubov blocks must be square and non-empty");
    }
    Ok(CMat::from_fn(n, n, |i, j| rows[i][j].into()))
}

/// `||(u (X1 - i X2) + v (X1 + i X2) + w i[X1,X2] - z) psi||` on `rep`.
fn residual(rep: RepSpec, params: OusParams, psi: &FockVector) -> Result<f64> {
    let ops = build_rep(&rep)?;
    Ok(eigen_residual(&ous_combination(&ops.x1, &ops.x2, &params), params.z, psi))
}

fn c(z: Cx) -> C64 {
    z.into()
}

/// The state together with the eigenvalue equation it solves, when there
/// is one to check.
fn construct(family: Family, p: Value, dim: usize, per_mode: usize) -> Result<(FockVector, Option<Value>)> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let single = |psi: FockVector, params: OusParams| -> Result<(FockVector, Option<Value>)> {
        let r = residual(psi.rep, params, &psi)?;
        Ok((psi, Some(json!({ "eigenvalue": pair(params.z), "eigen_residual": r }))))
    };
    match family {
        Family::Cs => {
            let p: Cs = parse(p, "cs parameters")?;
            let psi = canonical_cs(c(p.alpha), p.dim.unwrap_or(dim))?;
            single(psi, OusParams::new(one, zero, c(p.alpha)))
        }
        Family::Ss => {
            let p: Ss = parse(p, "ss parameters")?;
            let frame = SqueezeFrame::new(c(p.u), c(p.v))?;
            let psi = displaced_squeezed(c(p.alpha), frame, p.dim.unwrap_or(dim))?;
            single(psi, OusParams::new(frame.u, frame.v, c(p.alpha)))
        }
        Family::Spin => {
            let p: Spin = parse(p, "spin parameters")?;
            let (psi, tau) = match (p.tau, p.theta, p.phi) {
                (Some(t), None, None) => (spin_cs(c(t), p.j)?, Some(c(t))),
                (None, Some(th), ph) => {
                    let ph = ph.unwrap_or(0.0);
                    let tau = (th < std::f64::consts::PI).then(|| C64::from_polar((th / 2.0).tan(), -ph));
                    (spin_cs_angles(th, ph, p.j)?, tau)
                }
                _ => bail!("spin parameters need either tau or theta (and optionally phi)"),
            };
            match tau {
                // e^{tau J+} J- e^{-tau J+} = J- + 2 tau J3 - tau^2 J+ annihilates the state,
                // and i[J1, J2] = -J3
                Some(t) => single(psi, OusParams { u: one, v: -t * t, w: -2.0 * t, z: zero }),
                None => Ok((psi, None)),
            }
        }
        Family::Su11 => {
            let p: Su11 = parse(p, "su11 parameters")?;
            let xi = c(p.xi);
            let psi = su11_cs(xi, p.k, p.dim.unwrap_or(dim))?;
            single(psi, OusParams::new(one, -xi * xi, 2.0 * p.k * xi))
        }
        Family::Bg => {
            let p: Bg = parse(p, "bg parameters")?;
            let psi = bg_cs(c(p.z), p.k, p.dim.unwrap_or(dim))?;
            single(psi, OusParams::new(one, zero, c(p.z)))
        }
        Family::Qcs => {
            let p: Qcs = parse(p, "qcs parameters")?;
            let psi = q_cs(c(p.alpha), p.q, p.dim.unwrap_or(dim))?;
            single(psi, OusParams::new(one, zero, c(p.alpha)))
        }
        Family::Ous => {
            let p: Ous = parse(p, "ous parameters")?;
            let rep = RepSpec::new(p.rep, p.dim.unwrap_or(dim))?;
            let params = OusParams { u: c(p.u), v: c(p.v), w: p.w.map(c).unwrap_or(zero), z: c(p.z) };
            let ops = build_rep(&rep)?;
            single(ladder_ous(&ops.x1, &ops.x2, &params, rep)?, params)
        }
        Family::Suq11Ous => {
            let p: Suq11 = parse(p, "suq11-ous parameters")?;
            let params = OusParams::new(c(p.u), c(p.v), c(p.z));
            single(suq11_ous(&params, p.q, p.k, p.dim.unwrap_or(dim))?, params)
        }
        Family::MmSs => {
            let p: MmSs = parse(p, "mm-ss parameters")?;
            let pair_uv = match (p.r, p.u, p.v) {
                (Some(r), None, None) => BogoliubovPair::two_mode_squeeze(r),
                (None, Some(u), Some(v)) => BogoliubovPair { u: matrix(&u)?, v: matrix(&v)? },
                _ => bail!("mm-ss parameters need either r or both u and v"),
            };
            let alphas: Vec<C64> = p.alphas.into_iter().map(c).collect();
            let psi = multimode_ss(&alphas, &pair_uv, p.per_mode.unwrap_or(per_mode))?;
            let res = multimode_eigen_residuals(&psi, &pair_uv, &alphas)?;
            let eig: Vec<[f64; 2]> = alphas.iter().map(|&a| pair(a)).collect();
            Ok((psi, Some(json!({ "eigenvalues": eig, "eigen_residuals": res }))))
        }
    }
}

pub fn build(ctx: &Ctx, a: &BuildArgs) -> Result<Outcome> {
    pick_format(ctx.cli.format, None, Format::Json, &[Format::Json])?;
    let trunc = &ctx.cfg.truncation;
    let (psi, eq) = construct(a.family, json_arg(&a.params)?, trunc.dim, trunc.per_mode)?;
    let diagnostics = a.check.then(|| {
        let mut d = json!({ "norm": psi.norm(), "boundary_mass": psi.boundary_mass() });
        if let (Some(Value::Object(extra)), Value::Object(map)) = (eq, &mut d) {
            map.extend(extra);
        }
        d
    });
    let mut bytes = serde_json::to_vec_pretty(&psi.to_json(diagnostics))?;
    bytes.push(b'\n');
    Ok(Outcome::ok(bytes))
}
