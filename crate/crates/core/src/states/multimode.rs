use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{c, expm_action, logm, max_abs, CMat, CVec, SparseMat};
use crate::reps::{mode_indices, mode_lowering, OperatorMatrix, RepKind, RepSpec};

/// Bogoliubov coefficients of `A_mu = sum_nu U_{mu nu} a_nu + V_{mu nu} a_nu^dagger`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BogoliubovPair {
    pub u: CMat,
    pub v: CMat,
}

const BOGOLIUBOV_TOL: f64 = 1e-10;
const MAX_TENSOR_DIM: usize = 4096;

impl BogoliubovPair {
    pub fn modes(&self) -> usize {
        self.u.nrows()
    }

    /// Checks `U U^dagger - V V^dagger = 1` and `U V^T = (U V^T)^T`.
    pub fn validate(&self) -> Result<()> {
        let n = self.u.nrows();
        if !self.u.is_square() || self.v.shape() != self.u.shape() || n == 0 {
            return Err(Error::InvalidBogoliubov("U and V must be square matrices of equal size".into()));
        }
        let gram = &self.u * self.u.adjoint() - &self.v * self.v.adjoint() - CMat::identity(n, n);
        let d1 = max_abs(&gram);
        if d1 > BOGOLIUBOV_TOL {
            return Err(Error::InvalidBogoliubov(format!("U U^dagger - V V^dagger deviates from 1 by {d1:.3e}")));
        }
        let uvt = &self.u * self.v.transpose();
        let d2 = max_abs(&(&uvt - uvt.transpose()));
        if d2 > BOGOLIUBOV_TOL {
            return Err(Error::InvalidBogoliubov(format!("U V^T is not symmetric (defect {d2:.3e})")));
        }
        Ok(())
    }

    /// Two-mode squeezing `U = cosh r 1`, `V = sinh r sigma_x`.
    pub fn two_mode_squeeze(r: f64) -> Self {
        let u = CMat::identity(2, 2).scale(r.cosh());
        let v = CMat::from_row_slice(2, 2, &[c(0.0), c(r.sinh()), c(r.sinh()), c(0.0)]);
        BogoliubovPair { u, v }
    }

    pub fn identity(modes: usize) -> Self {
        BogoliubovPair { u: CMat::identity(modes, modes), v: CMat::zeros(modes, modes) }
    }
}

/// `A_mu` on the tensor basis with `per_mode` levels per mode.
pub fn multimode_lowering(pair: &BogoliubovPair, per_mode: usize, mu: usize) -> OperatorMatrix {
    let n = pair.modes();
    let mut acc: Option<OperatorMatrix> = None;
    for nu in 0..n {
        let a = mode_lowering(per_mode, n, nu);
        let term = a.scale(pair.u[(mu, nu)]).add(&a.adjoint().scale(pair.v[(mu, nu)]));
        acc = Some(match acc {
            None => term,
            Some(x) => x.add(&term),
        });
    }
    acc.expect("at least one mode")
}

/// Product coherent state on the tensor basis.
fn product_cs(alphas: &[C64], per_mode: usize) -> CVec {
    let modes = alphas.len();
    let single: Vec<Vec<C64>> = alphas
        .iter()
        .map(|&a| {
            let mut amp = c((-a.norm_sqr() / 2.0).exp());
            (0..per_mode)
                .map(|n| {
                    let out = amp;
                    amp *= a / ((n + 1) as f64).sqrt();
                    out
                })
                .collect()
        })
        .collect();
    let dim = per_mode.pow(modes as u32);
    CVec::from_fn(dim, |i, _| mode_indices(i, per_mode, modes).iter().enumerate().map(|(m, &n)| single[m][n]).product())
}

#[derive(Clone, Copy)]
enum Ladder {
    Lower(usize),
    Raise(usize),
}

/// Applies a product of ladder operators (rightmost first) to the tensor
/// basis state `occ`; raising out of the top level gives zero.
fn apply_ladders(occ: &mut [usize], word: &[Ladder], per_mode: usize) -> Option<f64> {
    let mut amp = 1.0;
    for l in word.iter().rev() {
        match *l {
            Ladder::Lower(m) => {
                if occ[m] == 0 {
                    return None;
                }
                amp *= (occ[m] as f64).sqrt();
                occ[m] -= 1;
            }
            Ladder::Raise(m) => {
                if occ[m] + 1 >= per_mode {
                    return None;
                }
                occ[m] += 1;
                amp *= (occ[m] as f64).sqrt();
            }
        }
    }
    Some(amp)
}

/// Sparse `Q` on the tensor basis with `per_mode` levels per mode.
fn quadratic_generator(x: &CMat, y: &CMat, per_mode: usize) -> SparseMat {
    let n = x.nrows();
    let dim = per_mode.pow(n as u32);
    let mut words: Vec<([Ladder; 2], C64)> = Vec::new();
    for mu in 0..n {
        for nu in 0..n {
            words.push(([Ladder::Raise(mu), Ladder::Lower(nu)], x[(mu, nu)]));
            words.push(([Ladder::Raise(mu), Ladder::Raise(nu)], y[(mu, nu)] * 0.5));
            words.push(([Ladder::Lower(mu), Ladder::Lower(nu)], -y[(mu, nu)].conj() * 0.5));
        }
    }
    let mut triplets = Vec::new();
    for col in 0..dim {
        for (word, coef) in &words {
            if *coef == c(0.0) {
                continue;
            }
            let mut occ = mode_indices(col, per_mode, n);
            if let Some(amp) = apply_ladders(&mut occ, word, per_mode) {
                let row = occ.iter().fold(0, |acc, &m| acc * per_mode + m);
                triplets.push((row, col, coef * amp));
            }
        }
    }
    SparseMat::from_triplets(dim, triplets)
}

/// Common eigenstate of the `A_mu` with eigenvalues `alphas`.
///
/// The Bogoliubov matrix `M = [[U, V], [V*, U*]]` has logarithm
/// `[[X, Y], [Y*, X*]]`; with
/// `Q = sum X_{mu nu} a_mu^dagger a_nu + (1/2) sum (Y_{mu nu} a_mu^dagger a_nu^dagger - h.c.)`
/// the state is `exp(-Q)` applied to the product coherent state, computed on
/// a doubled working basis and cut back to `per_mode` levels.
pub fn multimode_ss(alphas: &[C64], pair: &BogoliubovPair, per_mode: usize) -> Result<FockVector> {
    pair.validate()?;
    let n = pair.modes();
    if alphas.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: alphas.len() });
    }
    let spec = RepSpec::new(RepKind::MultiMode { modes: n }, per_mode)?;
    let work = 2 * per_mode;
    if work.pow(n as u32) > MAX_TENSOR_DIM {
        return Err(Error::InvalidInput(format!("working tensor dimension {} too large", work.pow(n as u32))));
    }
    let mut big = CMat::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(&pair.u);
    big.view_mut((0, n), (n, n)).copy_from(&pair.v);
    big.view_mut((n, 0), (n, n)).copy_from(&pair.v.map(|z| z.conj()));
    big.view_mut((n, n), (n, n)).copy_from(&pair.u.map(|z| z.conj()));
    let g = logm(&big).ok_or_else(|| Error::InvalidBogoliubov("matrix logarithm failed".into()))?;
    let x = g.view((0, 0), (n, n)).into_owned();
    let y = g.view((0, n), (n, n)).into_owned();

    let q = quadratic_generator(&x, &y, work);
    let start = product_cs(alphas, work);
    let full = expm_action(&q, c(-1.0), &start);

    let coeffs = CVec::from_fn(spec.dim(), |i, _| {
        let idx = mode_indices(i, per_mode, n);
        let flat = idx.iter().fold(0, |acc, &m| acc * work + m);
        full[flat]
    });
    let state = FockVector::new(spec, coeffs)?.normalized()?.phase_fixed();
    state.check_physical()?;
    Ok(state)
}

/// `||(A_mu - alpha_mu) psi||` over interior rows, one entry per mode.
pub fn multimode_eigen_residuals(state: &FockVector, pair: &BogoliubovPair, alphas: &[C64]) -> Result<Vec<f64>> {
    let per_mode = state.rep.truncation;
    (0..pair.modes())
        .map(|mu| {
            let a = multimode_lowering(pair, per_mode, mu);
            let r = &a.entries * &state.coeffs - &state.coeffs * alphas[mu];
            Ok(r.iter()
                .enumerate()
                .filter(|(i, _)| a.interior.contains(*i))
                .map(|(_, z)| z.norm_sqr())
                .sum::<f64>()
                .sqrt())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::inner_product;
    use crate::states::canonical_cs;

    #[test]
    fn identity_pair_gives_product_state() {
        let alphas = [C64::new(0.4, 0.1), C64::new(-0.3, 0.2)];
        let psi = multimode_ss(&alphas, &BogoliubovPair::identity(2), 12).unwrap();
        let a = canonical_cs(alphas[0], 12).unwrap();
        let b = canonical_cs(alphas[1], 12).unwrap();
        let prod = a.coeffs.kronecker(&b.coeffs);
        let prod = FockVector::new(psi.rep, prod).unwrap();
        assert!((inner_product(&psi, &prod).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_mode_squeezed_vacuum_residuals() {
        let pair = BogoliubovPair::two_mode_squeeze(0.4);
        let alphas = [c(0.0), c(0.0)];
        let psi = multimode_ss(&alphas, &pair, 20).unwrap();
        for r in multimode_eigen_residuals(&psi, &pair, &alphas).unwrap() {
            assert!(r <= 1e-7, "{r}");
        }
    }

    #[test]
    fn displaced_two_mode_residuals() {
        let pair = BogoliubovPair::two_mode_squeeze(0.3);
        let alphas = [C64::new(0.3, -0.2), C64::new(0.1, 0.25)];
        let psi = multimode_ss(&alphas, &pair, 20).unwrap();
        for r in multimode_eigen_residuals(&psi, &pair, &alphas).unwrap() {
            assert!(r <= 1e-7, "{r}");
        }
    }

    #[test]
    fn rejects_invalid_pair() {
        let mut pair = BogoliubovPair::two_mode_squeeze(0.4);
        pair.u[(0, 0)] = c(2.0);
        assert!(matches!(multimode_ss(&[c(0.0), c(0.0)], &pair, 10), Err(Error::InvalidBogoliubov(_))));
    }
}
