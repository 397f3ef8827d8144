use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::RMat;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, CMat};
use crate::reps::{mode_lowering, Interior, OperatorMatrix};
use crate::states::BogoliubovPair;

/// Second moments of an eigenstate of `u (X1 - i X2) + v (X1 + i X2)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedMoments {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
}

/// Moments forced by the eigenvalue equation, in terms of
/// `c12 = (i/2)<[X1, X2]>` (the negative of `MomentSet::cmat[(0, 1)]`):
/// `s11 = |u-v|^2 c12/(|u|^2-|v|^2)`, `s22 = |u+v|^2 c12/(|u|^2-|v|^2)`,
/// `s12 = 2 Im(u* v) c12/(|u|^2-|v|^2)`.
pub fn ous_predicted_moments(u: C64, v: C64, c12: f64) -> Result<PredictedMoments> {
    let denom = u.norm_sqr() - v.norm_sqr();
    if denom.abs() <= 1e-15 * (u.norm_sqr() + v.norm_sqr()) || denom == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let f = c12 / denom;
    Ok(PredictedMoments { s11: (u - v).norm_sqr() * f, s22: (u + v).norm_sqr() * f, s12: 2.0 * (u.conj() * v).im * f })
}

/// Quadratures `X_mu = (a_mu + a_mu^dagger)/2`, `X_{mu+N} = (a_mu - a_mu^dagger)/(2i)`,
/// ordered `X_1..X_N, X_{N+1}..X_{2N}`.
pub fn multimode_quadratures(per_mode: usize, modes: usize) -> Vec<OperatorMatrix> {
    let lowers: Vec<OperatorMatrix> = (0..modes).map(|m| mode_lowering(per_mode, modes, m)).collect();
    let interior = lowers.first().map(|a| a.interior).unwrap_or(Interior::Full);
    let mut out = Vec::with_capacity(2 * modes);
    for a in &lowers {
        let m = (&a.entries + a.entries.adjoint()).scale(0.5);
        out.push(OperatorMatrix::new((&m + m.adjoint()).scale(0.5), interior));
    }
    for a in &lowers {
        let m = (&a.entries - a.entries.adjoint()).map(|z| z * C64::new(0.0, -0.5));
        out.push(OperatorMatrix::new((&m + m.adjoint()).scale(0.5), interior));
    }
    out
}

/// `C~_{mu nu} = 1/2 <[A_mu, A_nu^dagger]> = 1/2 (U U^dagger - V V^dagger)_{mu nu}`,
/// state independent for linear Bogoliubov operators.
pub fn bogoliubov_ctilde(pair: &BogoliubovPair) -> CMat {
    (&pair.u * pair.u.adjoint() - &pair.v * pair.v.adjoint()).scale(0.5)
}

/// `sigma = B^{-1} [[0, C~], [C~^T, 0]] B^{-T}` with `B = [beta; beta*]`,
/// `beta = [U + V, i (U - V)]`, so that `(A; A^dagger) = B X`.
pub fn multimode_predicted_sigma(u: &CMat, v: &CMat, ctilde: &CMat) -> Result<RMat> {
    let n = u.nrows();
    if u.shape() != (n, n) || v.shape() != (n, n) || ctilde.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: v.nrows() });
    }
    let i = C64::new(0.0, 1.0);
    let mut b = CMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for s in 0..n {
            let plus = u[(r, s)] + v[(r, s)];
            let minus = (u[(r, s)] - v[(r, s)]) * i;
            b[(r, s)] = plus;
            b[(r, s + n)] = minus;
            b[(r + n, s)] = plus.conj();
            b[(r + n, s + n)] = minus.conj();
        }
    }
    let b_inv = b.clone().try_inverse().ok_or(Error::SingularFrameMatrix)?;
    if max_abs(&b_inv) * max_abs(&b) > 1e12 {
        return Err(Error::SingularFrameMatrix);
    }
    let mut sig = CMat::zeros(2 * n, 2 * n);
    for r in 0..n {
        for s in 0..n {
            sig[(r, s + n)] = ctilde[(r, s)];
            sig[(s + n, r)] = ctilde[(r, s)];
        }
    }
    let full = &b_inv * sig * b_inv.transpose();
    let imag = full.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    if imag > 1e-10 * max_abs(&full).max(1.0) {
        return Err(Error::ComplexExpectation(imag));
    }
    let re: RMat = DMatrix::from_fn(2 * n, 2 * n, |r, s| full[(r, s)].re);
    Ok((&re + re.transpose()) * 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c;

    #[test]
    fn predicted_special_frames() {
        let p = ous_predicted_moments(c(1.0), c(0.0), 0.25).unwrap();
        assert_eq!((p.s11, p.s22, p.s12), (0.25, 0.25, 0.0));
        let r: f64 = 0.4;
        let p = ous_predicted_moments(c(r.cosh()), c(r.sinh()), 0.5).unwrap();
        assert!((p.s11 - (-2.0 * r).exp() * 0.5).abs() < 1e-15);
        assert!((p.s22 - (2.0 * r).exp() * 0.5).abs() < 1e-14);
        assert!(matches!(ous_predicted_moments(c(1.0), c(1.0), 0.5), Err(Error::DegenerateFrame)));
    }

    #[test]
    fn single_mode_vacuum_sigma() {
        let one = CMat::identity(1, 1);
        let sigma = multimode_predicted_sigma(&one, &CMat::zeros(1, 1), &one.scale(0.5)).unwrap();
        assert!((sigma - RMat::identity(2, 2) * 0.25).amax() < 1e-15);
        assert!(matches!(multimode_predicted_sigma(&one, &one, &one.scale(0.5)), Err(Error::SingularFrameMatrix)));
    }

    #[test]
    fn quadrature_commutator() {
        let xs = multimode_quadratures(6, 2);
        let comm = xs[0].commutator(&xs[2]);
        // [X_1, X_3] = i/2 on the interior
        assert!((comm.entries[(0, 0)] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!(xs[1].commutator(&xs[2]).entries.iter().all(|z| z.norm() < 1e-15));
    }
}
