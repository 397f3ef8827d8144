//! Complementary rewriting `P_r^2 + V_r^2 <= 1` of the characteristic
//! relations, and uncertainty-based distances between states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::StateRef;
use crate::reps::OperatorMatrix;
use crate::uncertainty::{char_coeffs, moments, UncertaintyReport};

/// Choice of the scale `alpha_r` in `C_r(sigma) = alpha_r (1 - P_r^2)`,
/// `C_r(C) = alpha_r V_r^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "snake_case")]
pub enum Scaling {
    /// `alpha_r = C_r(sigma) + C_r(C)`.
    SumRule,
    /// `alpha_r` equal to a known upper bound of `C_r(sigma)`.
    BoundedMax(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplementaryPair {
    pub r: usize,
    pub alpha_r: f64,
    pub p_sq: f64,
    pub v_sq: f64,
}

impl ComplementaryPair {
    pub fn sum(&self) -> f64 {
        self.p_sq + self.v_sq
    }
}

pub fn complementary_pair(report: &UncertaintyReport, r: usize, scaling: Scaling) -> Result<ComplementaryPair> {
    let n = report.char_sigma.len() - 1;
    if r == 0 || r > n {
        return Err(Error::InvalidInput(format!("order r = {r} outside 1..={n}")));
    }
    let (cs, cc) = (report.char_sigma[r], report.char_cmat[r]);
    let alpha_r = match scaling {
        Scaling::SumRule => cs + cc,
        Scaling::BoundedMax(max) => {
            if max > 0.0 && cs > max * (1.0 + 1e-12) {
                return Err(Error::InvalidInput(format!("C_r(sigma) = {cs} exceeds the supplied maximum {max}")));
            }
            max
        }
    };
    if !(alpha_r > 0.0) {
        return Err(Error::ZeroScale);
    }
    Ok(ComplementaryPair { r, alpha_r, p_sq: 1.0 - cs / alpha_r, v_sq: cc / alpha_r })
}

/// g-type functional between two states.
#[derive(Clone, Copy, Debug)]
pub enum GKind<'a> {
    /// `Tr(rho1 rho2) / sqrt(Tr rho1^2 Tr rho2^2)`.
    TraceOverlap,
    /// `|<2|X^2|1>| / sqrt(<X^2>_1 <X^2>_2)`, pure states only.
    XSquared(&'a OperatorMatrix),
}

pub fn g_functional<'a, 'b>(
    rho1: impl Into<StateRef<'a>>,
    rho2: impl Into<StateRef<'b>>,
    kind: GKind<'_>,
) -> Result<f64> {
    let (rho1, rho2) = (rho1.into(), rho2.into());
    if rho1.dim() != rho2.dim() {
        return Err(Error::DimensionMismatch { expected: rho1.dim(), got: rho2.dim() });
    }
    let g = match kind {
        GKind::TraceOverlap => match (rho1, rho2) {
            (StateRef::Pure(a), StateRef::Pure(b)) => {
                let (na, nb) = (a.coeffs.norm_squared(), b.coeffs.norm_squared());
                if na == 0.0 || nb == 0.0 {
                    return Err(Error::ZeroDenominator);
                }
                a.coeffs.dotc(&b.coeffs).norm_sqr() / (na * nb)
            }
            _ => {
                let (d1, d2) = (rho1.density(), rho2.density());
                let overlap = (d1.adjoint() * &d2).trace().re;
                let denom = (d1.norm_squared() * d2.norm_squared()).sqrt();
                if denom == 0.0 {
                    return Err(Error::ZeroDenominator);
                }
                overlap / denom
            }
        },
        GKind::XSquared(x) => {
            let (StateRef::Pure(a), StateRef::Pure(b)) = (rho1, rho2) else {
                return Err(Error::InvalidInput("the X^2 functional needs pure states".into()));
            };
            if x.dim() != a.dim() {
                return Err(Error::DimensionMismatch { expected: a.dim(), got: x.dim() });
            }
            // <2|X^2|1> = <X 2|X 1> for Hermitian X
            let (xa, xb) = (&x.entries * &a.coeffs, &x.entries * &b.coeffs);
            let denom = (xa.norm_squared() * xb.norm_squared()).sqrt();
            if denom == 0.0 {
                return Err(Error::ZeroDenominator);
            }
            xb.dotc(&xa).norm() / denom
        }
    };
    Ok(g.clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distance {
    #[serde(rename = "D2")]
    pub d2: f64,
    pub g: f64,
    #[serde(rename = "Cr1")]
    pub cr1: f64,
    #[serde(rename = "Cr2")]
    pub cr2: f64,
}

/// `D_r^2 = C_r(sigma_1) + C_r(sigma_2) - 2 sqrt(C_r(sigma_1) C_r(sigma_2)) g`.
pub fn distance_r<'a, 'b>(
    rho1: impl Into<StateRef<'a>>,
    rho2: impl Into<StateRef<'b>>,
    ops: &[&OperatorMatrix],
    r: usize,
    kind: GKind<'_>,
) -> Result<Distance> {
    let (rho1, rho2) = (rho1.into(), rho2.into());
    if r == 0 || r > ops.len() {
        return Err(Error::InvalidInput(format!("order r = {r} outside 1..={}", ops.len())));
    }
    let cr1 = char_coeffs(&moments(rho1, ops)?.sigma)?[r];
    let cr2 = char_coeffs(&moments(rho2, ops)?.sigma)?[r];
    for cr in [cr1, cr2] {
        if !(cr > 0.0) {
            return Err(Error::NonPositiveCoefficient(cr));
        }
    }
    let g = g_functional(rho1, rho2, kind)?;
    let d2 = (cr1 + cr2 - 2.0 * (cr1 * cr2).sqrt() * g).max(0.0);
    Ok(Distance { d2, g, cr1, cr2 })
}
