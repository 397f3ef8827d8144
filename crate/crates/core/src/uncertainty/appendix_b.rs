use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::{char_coeffs, moments, EQUALITY_TOL};
use crate::error::{Error, Result};
use crate::par::{self, Execution};
use crate::reps::{build_rep, RepSpec};
use crate::states::{adaptive, su11_analytic_ous, su11_cs};

/// Dimensions tried in turn until the state passes the tail guard.
pub const SCAN_DIMS: [usize; 4] = [64, 96, 128, 192];
/// Relative margin required of slacks off the equality manifold.
pub const SCAN_MARGIN: f64 = 1e-3;
/// Distance to the condition-(a) manifold below which a point counts as on it.
pub const MANIFOLD_TOL: f64 = 1e-9;

/// How the `z1` axis of the scan is laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "values", rename_all = "snake_case")]
pub enum Z1Axis {
    Absolute(Vec<C64>),
    /// `z1 = -2k s u1 + delta`, so `delta = 0` lies on the manifold.
    OffsetFromConditionA(Vec<C64>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixBGrid {
    pub u1: Vec<C64>,
    pub v1: Vec<C64>,
    pub z1: Z1Axis,
}

impl Default for AppendixBGrid {
    /// 5 x 5 x 5 points with `|v1/u1| <= 0.25`, one `z1` on the manifold per
    /// `(u1, v1)`.
    fn default() -> Self {
        let re = |x: f64| C64::new(x, 0.0);
        AppendixBGrid {
            u1: [1.0, 1.25, 1.5, 2.0, 2.5].map(re).to_vec(),
            v1: vec![re(-0.25), re(-0.1), re(0.15), C64::new(0.0, 0.2), C64::new(-0.1, 0.15)],
            z1: Z1Axis::OffsetFromConditionA(vec![re(0.0), re(1.0), re(-1.0), C64::new(0.0, 1.0), C64::new(-1.0, 1.0)]),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixBPoint {
    pub u1: C64,
    pub v1: C64,
    pub z1: C64,
    /// `min |z1 ± 2k s u1|`, zero on the condition-(a) manifold.
    pub manifold_distance: f64,
    pub condition_a: bool,
    /// `xi = ∓s` of the coherent state on the branch that was hit.
    pub xi: Option<C64>,
    pub dim: usize,
    pub scale_r2: f64,
    pub slack_r2: f64,
    pub slack_r3: f64,
    pub equal_r2: bool,
    /// Fidelity to `su11_cs(xi)`, recorded on the manifold only.
    pub fidelity_to_cs: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AppendixBReport {
    pub k: f64,
    pub tolerance: f64,
    pub margin: f64,
    pub points: Vec<AppendixBPoint>,
    /// Largest r = 2 slack on the manifold.
    pub max_slack_on: f64,
    /// Smallest `slack / max(1, scale)` off the manifold.
    pub min_relative_slack_off: f64,
    pub min_fidelity: f64,
    /// Equality exactly on the manifold, margin elsewhere, and manifold
    /// states identified with the su(1,1) coherent states.
    pub unique_manifold: bool,
}

fn scan_point(k: f64, u1: C64, v1: C64, z1: C64) -> Result<AppendixBPoint> {
    let s = (-v1 / u1).sqrt();
    // z1 = -2k sqrt(-u1 v1) on either branch of the root: a = 0 gives the
    // coherent state at xi = -s, a = 2k (1F1(2k; 2k; x) = e^x) the one at xi = s.
    let (d_minus, d_plus) = ((z1 + 2.0 * k * s * u1).norm(), (z1 - 2.0 * k * s * u1).norm());
    let manifold_distance = d_minus.min(d_plus);
    let condition_a = manifold_distance <= MANIFOLD_TOL;
    let xi = condition_a.then(|| if d_minus <= d_plus { -s } else { s });
    let built = adaptive(&SCAN_DIMS, |d| su11_analytic_ous(z1, u1, v1, k, d))?;
    let dim = built.state.dim();
    let ops = build_rep(&RepSpec::su11(k, dim))?;
    let ms = moments(&built.state, &[&ops.x1, &ops.x2, &ops.cartan])?;
    let cs = char_coeffs(&ms.sigma)?;
    let cc = char_coeffs(&ms.cmat)?;
    let slack_r2 = cs[2] - cc[2];
    let fidelity_to_cs = match xi {
        Some(xi) => Some(built.state.fidelity(&su11_cs(xi, k, dim)?)?),
        None => None,
    };
    Ok(AppendixBPoint {
        u1,
        v1,
        z1,
        manifold_distance,
        condition_a,
        xi,
        dim,
        scale_r2: cs[2],
        slack_r2,
        slack_r3: cs[3] - cc[3],
        equal_r2: slack_r2.abs() <= EQUALITY_TOL * cs[2].abs().max(1.0),
        fidelity_to_cs,
    })
}

/// Builds the analytic optimal state at every grid point and records the
/// second- and third-order slacks for `(K1, K2, K3)`.
pub fn appendix_b_scan(k: f64, grid: &AppendixBGrid, exec: Execution) -> Result<AppendixBReport> {
    let mut triples = Vec::new();
    for &u1 in &grid.u1 {
        for &v1 in &grid.v1 {
            if u1.norm() <= v1.norm() {
                return Err(Error::NonNormalizable(format!("grid point |u1| = {} <= |v1| = {}", u1.norm(), v1.norm())));
            }
            let base = -2.0 * k * (-v1 / u1).sqrt() * u1;
            match &grid.z1 {
                Z1Axis::Absolute(zs) => triples.extend(zs.iter().map(|&z| (u1, v1, z))),
                Z1Axis::OffsetFromConditionA(ds) => triples.extend(ds.iter().map(|&d| (u1, v1, base + d))),
            }
        }
    }
    if triples.is_empty() {
        return Err(Error::EmptyInput("appendix B grid"));
    }
    let points =
        par::map(exec, &triples, |&(u1, v1, z1)| scan_point(k, u1, v1, z1)).into_iter().collect::<Result<Vec<_>>>()?;
    let mut max_slack_on: f64 = 0.0;
    let mut min_relative_slack_off = f64::INFINITY;
    let mut min_fidelity: f64 = 1.0;
    let mut unique = true;
    for p in &points {
        if p.condition_a {
            max_slack_on = max_slack_on.max(p.slack_r2.abs());
            let f = p.fidelity_to_cs.unwrap_or(0.0);
            min_fidelity = min_fidelity.min(f);
            unique &= p.equal_r2 && f >= 1.0 - 1e-8;
        } else {
            let rel = p.slack_r2 / p.scale_r2.abs().max(1.0);
            min_relative_slack_off = min_relative_slack_off.min(rel);
            unique &= rel >= SCAN_MARGIN;
        }
    }
    Ok(AppendixBReport {
        k,
        tolerance: EQUALITY_TOL,
        margin: SCAN_MARGIN,
        points,
        max_slack_on,
        min_relative_slack_off,
        min_fidelity,
        unique_manifold: unique,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_points() {
        let on = scan_point(1.0, C64::new(1.0, 0.0), C64::new(-0.25, 0.0), C64::new(-1.0, 0.0)).unwrap();
        assert!(on.condition_a && on.equal_r2, "{on:?}");
        assert!(on.fidelity_to_cs.unwrap() >= 1.0 - 1e-8);
        let off = scan_point(1.0, C64::new(1.0, 0.0), C64::new(-0.25, 0.0), C64::new(0.5, 0.0)).unwrap();
        assert!(!off.condition_a && off.slack_r2 >= 1e-3, "{off:?}");
        // the other root of sqrt(-u1 v1)
        let conj = scan_point(0.5, C64::new(1.0, 0.0), C64::new(-0.25, 0.0), C64::new(0.5, 0.0)).unwrap();
        assert!(conj.condition_a && conj.equal_r2 && conj.xi == Some(C64::new(0.5, 0.0)));
        assert!(conj.fidelity_to_cs.unwrap() >= 1.0 - 1e-8);
    }
}
