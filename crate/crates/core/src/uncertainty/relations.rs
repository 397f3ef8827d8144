use serde::{Deserialize, Serialize};

use super::{char_coeffs, moments, MomentSet, RMat};
use crate::error::{Error, Result};
use crate::fock::{FockVector, StateRef};
use crate::linalg::{c, CVec};
use crate::reps::OperatorMatrix;

/// `C_r(sum d_m sigma_m) - C_r(sum d_m C_m)` over several states.
pub fn extended_cur_slack(items: &[(MomentSet, f64)], r: usize) -> Result<f64> {
    let first = items.iter().find(|(_, d)| *d > 0.0).ok_or(Error::EmptyInput("positive weight"))?;
    let n = first.0.n();
    if r == 0 || r > n {
        return Err(Error::InvalidInput(format!("order r = {r} outside 1..={n}")));
    }
    let mut sigma = RMat::zeros(n, n);
    let mut cmat = RMat::zeros(n, n);
    for (ms, d) in items {
        if ms.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: ms.n() });
        }
        if *d < 0.0 || !d.is_finite() {
            return Err(Error::InvalidInput(format!("weight {d} must be nonnegative")));
        }
        sigma += &ms.sigma * *d;
        cmat += &ms.cmat * *d;
    }
    Ok(char_coeffs(&sigma)?[r] - char_coeffs(&cmat)?[r])
}

/// `1/2 [s_XX(1) s_YY(2) + s_XX(2) s_YY(1)] - s_XY(1) s_XY(2)
///  + 1/4 <[X,Y]>_1 <[X,Y]>_2`.
///
/// Each `<[X, Y]>` is `2i C_XY`, so the last term is `-C_XY(1) C_XY(2)`.
pub fn two_state_schrodinger_slack<'a, 'b>(
    psi1: impl Into<StateRef<'a>>,
    psi2: impl Into<StateRef<'b>>,
    x: &OperatorMatrix,
    y: &OperatorMatrix,
) -> Result<f64> {
    let (psi1, psi2) = (psi1.into(), psi2.into());
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch { expected: psi1.dim(), got: psi2.dim() });
    }
    let m1 = moments(psi1, &[x, y])?;
    let m2 = moments(psi2, &[x, y])?;
    let (s1, s2) = (&m1.sigma, &m2.sigma);
    Ok(0.5 * (s1[(0, 0)] * s2[(1, 1)] + s2[(0, 0)] * s1[(1, 1)])
        - s1[(0, 1)] * s2[(0, 1)]
        - m1.cmat[(0, 1)] * m2.cmat[(0, 1)])
}

/// Which reading of the one-observable two-state inequality to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Eq42Form {
    /// `s1 s2 - |<2|X^2|1>|^2 + s1 <X>_2^2 + s2 <X>_1^2`, term by term.
    AsPrinted,
    /// `s1 s2 - |<2|(X - m2)(X - m1)|1>|^2`, nonnegative by Schwarz.
    SchwarzForm,
}

pub fn one_obs_two_state_slack(
    psi1: &FockVector,
    psi2: &FockVector,
    x: &OperatorMatrix,
    form: Eq42Form,
) -> Result<f64> {
    if psi1.dim() != psi2.dim() {
        return Err(Error::DimensionMismatch { expected: psi1.dim(), got: psi2.dim() });
    }
    if x.dim() != psi1.dim() {
        return Err(Error::DimensionMismatch { expected: psi1.dim(), got: x.dim() });
    }
    psi1.check_physical()?;
    psi2.check_physical()?;
    let y1 = &x.entries * &psi1.coeffs;
    let y2 = &x.entries * &psi2.coeffs;
    let m1 = psi1.coeffs.dotc(&y1).re;
    let m2 = psi2.coeffs.dotc(&y2).re;
    let d1: CVec = &y1 - &psi1.coeffs * c(m1);
    let d2: CVec = &y2 - &psi2.coeffs * c(m2);
    let (s1, s2) = (d1.norm_squared(), d2.norm_squared());
    Ok(match form {
        Eq42Form::AsPrinted => s1 * s2 - y2.dotc(&y1).norm_sqr() + s1 * m2 * m2 + s2 * m1 * m1,
        Eq42Form::SchwarzForm => s1 * s2 - d2.dotc(&d1).norm_sqr(),
    })
}
