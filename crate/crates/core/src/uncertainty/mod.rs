//! Uncertainty and mean-commutator matrices, characteristic coefficients,
//! and the slacks of the uncertainty relations built from them.

mod appendix_b;
mod predicted;
mod relations;
mod spectral;

pub use appendix_b::{appendix_b_scan, AppendixBGrid, AppendixBPoint, AppendixBReport, Z1Axis};
pub use predicted::{
    bogoliubov_ctilde, multimode_predicted_sigma, multimode_quadratures, ous_predicted_moments, PredictedMoments,
};
pub use relations::{extended_cur_slack, one_obs_two_state_slack, two_state_schrodinger_slack, Eq42Form};
pub use spectral::{gram_factor, psd_check, sheaf_spectrum, sheaf_spectrum_factored};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{StateRef, REAL_TOL};
use crate::linalg::{c, CMat, CVec};
use crate::reps::{Interior, OperatorMatrix};

pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Lower bound accepted for slacks that should be nonnegative.
pub const SLACK_FLOOR: f64 = -1e-10;
/// Relative tolerance deciding equality of the two sides.
pub const EQUALITY_TOL: f64 = 1e-8;
/// Largest tuple handled by principal-minor enumeration.
pub const MAX_MINOR_DIM: usize = 8;

/// Means, uncertainty matrix and mean-commutator matrix of an operator tuple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentSet {
    pub means: RVec,
    pub sigma: RMat,
    pub cmat: RMat,
}

impl MomentSet {
    /// Validates shapes, symmetry of `sigma` and antisymmetry of `cmat`.
    pub fn new(means: RVec, sigma: RMat, cmat: RMat) -> Result<Self> {
        let n = means.len();
        for m in [&sigma, &cmat] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::DimensionMismatch { expected: n, got: m.nrows() });
            }
        }
        let scale = sigma.amax().max(1.0);
        if (&sigma - sigma.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("sigma is not symmetric".into()));
        }
        if (&cmat + cmat.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidInput("C is not antisymmetric".into()));
        }
        Ok(MomentSet { means, sigma, cmat })
    }

    pub fn n(&self) -> usize {
        self.means.len()
    }

    /// The moments of the observables `(i, j)` only.
    pub fn pair(&self, i: usize, j: usize) -> MomentSet {
        let idx = [i, j];
        MomentSet {
            means: RVec::from_fn(2, |a, _| self.means[idx[a]]),
            sigma: RMat::from_fn(2, 2, |a, b| self.sigma[(idx[a], idx[b])]),
            cmat: RMat::from_fn(2, 2, |a, b| self.cmat[(idx[a], idx[b])]),
        }
    }
}

fn check_common_dim(state: &StateRef, ops: &[&OperatorMatrix]) -> Result<()> {
    for op in ops {
        if op.dim() != state.dim() {
            return Err(Error::DimensionMismatch { expected: state.dim(), got: op.dim() });
        }
        if !op.hermitian {
            return Err(Error::InvalidInput("moments need Hermitian observables".into()));
        }
    }
    Ok(())
}

fn real_checked(z: C64) -> Result<f64> {
    if z.im.abs() > REAL_TOL * z.re.abs().max(1.0) {
        Err(Error::ComplexExpectation(z.im))
    } else {
        Ok(z.re)
    }
}

/// Common interior of the tuple, as a 0/1 mask.
fn interior_mask(dim: usize, ops: &[&OperatorMatrix]) -> Option<Vec<bool>> {
    if ops.iter().all(|o| o.interior == Interior::Full) {
        return None;
    }
    Some((0..dim).map(|i| ops.iter().all(|o| o.interior.contains(i))).collect())
}

/// Moments of a Hermitian tuple in a physical state.
///
/// Symmetrized products use the truncated matrices as they are; the
/// commutators are restricted to the common interior before the mean is
/// taken, so truncation never feeds an artificial term into `C`.
pub fn moments<'a>(state: impl Into<StateRef<'a>>, ops: &[&OperatorMatrix]) -> Result<MomentSet> {
    let state = state.into();
    if ops.is_empty() {
        return Err(Error::EmptyInput("operator tuple"));
    }
    check_common_dim(&state, ops)?;
    state.check_physical()?;
    let n = ops.len();
    let dim = state.dim();
    let mask = interior_mask(dim, ops);
    let mut means = RVec::zeros(n);
    let mut sigma = RMat::zeros(n, n);
    let mut cmat = RMat::zeros(n, n);
    match state {
        StateRef::Pure(psi) => {
            let ys: Vec<CVec> = ops.iter().map(|o| &o.entries * &psi.coeffs).collect();
            let phi = match &mask {
                None => psi.coeffs.clone(),
                Some(m) => CVec::from_fn(dim, |i, _| if m[i] { psi.coeffs[i] } else { c(0.0) }),
            };
            let zs: Vec<CVec> = match &mask {
                None => ys.clone(),
                Some(_) => ops.iter().map(|o| &o.entries * &phi).collect(),
            };
            for i in 0..n {
                means[i] = real_checked(psi.coeffs.dotc(&ys[i]))?;
            }
            for i in 0..n {
                for j in i..n {
                    let sym = ys[i].dotc(&ys[j]).re - means[i] * means[j];
                    sigma[(i, j)] = sym;
                    sigma[(j, i)] = sym;
                    if i != j {
                        // C_ij = -(i/2)<[X_i, X_j]> = Im <X_i phi|X_j phi>
                        let cij = zs[i].dotc(&zs[j]).im;
                        cmat[(i, j)] = cij;
                        cmat[(j, i)] = -cij;
                    }
                }
            }
        }
        StateRef::Mixed(r) => {
            let rho = &r.entries;
            let rho_p = match &mask {
                None => rho.clone(),
                Some(m) => CMat::from_fn(dim, dim, |a, b| if m[a] && m[b] { rho[(a, b)] } else { c(0.0) }),
            };
            let trace_prod = |a: &CMat, b: &CMat| -> C64 {
                let mut acc = c(0.0);
                for p in 0..dim {
                    for q in 0..dim {
                        acc += a[(p, q)] * b[(q, p)];
                    }
                }
                acc
            };
            let rx: Vec<CMat> = ops.iter().map(|o| rho * &o.entries).collect();
            let rpx: Vec<CMat> = match &mask {
                None => rx.clone(),
                Some(_) => ops.iter().map(|o| &rho_p * &o.entries).collect(),
            };
            for i in 0..n {
                means[i] = real_checked(rx[i].trace())?;
            }
            for i in 0..n {
                for j in i..n {
                    let sym = trace_prod(&rx[i], &ops[j].entries).re - means[i] * means[j];
                    sigma[(i, j)] = sym;
                    sigma[(j, i)] = sym;
                    if i != j {
                        // Tr(rho X_i X_j) - Tr(rho X_j X_i) = 2i Im Tr(rho X_i X_j)
                        let cij = trace_prod(&rpx[i], &ops[j].entries).im;
                        cmat[(i, j)] = cij;
                        cmat[(j, i)] = -cij;
                    }
                }
            }
        }
    }
    Ok(MomentSet { means, sigma, cmat })
}

/// Relative change between successive truncations below which
/// [`converged_moments`] stops.
pub const CONVERGENCE_TOL: f64 = 1e-12;

/// Moments at the first dimension in `dims` whose `sigma` and `C` agree with
/// the previous dimension to `tol * max(1, |sigma|_max)`. Dimensions at
/// which `at` reports `NonPhysicalState` are skipped.
///
/// The tail guard bounds probability, not the `n^2`-weighted tails that
/// second moments see, so families with slowly decaying amplitudes or
/// growing matrix elements need this check on top of the guard.
pub fn converged_moments(
    dims: &[usize],
    tol: f64,
    at: impl Fn(usize) -> Result<MomentSet>,
) -> Result<(MomentSet, usize)> {
    let mut prev: Option<MomentSet> = None;
    for &d in dims {
        let ms = match at(d) {
            Err(Error::NonPhysicalState { .. }) => continue,
            other => other?,
        };
        if let Some(p) = &prev {
            let change = (&ms.sigma - &p.sigma).amax().max((&ms.cmat - &p.cmat).amax());
            if change <= tol * ms.sigma.amax().max(1.0) {
                return Ok((ms, d));
            }
        }
        prev = Some(ms);
    }
    Err(Error::DivergentSeries { terms: dims.last().copied().unwrap_or(0) })
}

/// `C_0..C_n` of `det(M - lambda I) = sum_r C_r (-lambda)^{n-r}`, each the
/// sum of the `r x r` principal minors.
pub fn char_coeffs(m: &RMat) -> Result<Vec<f64>> {
    let n = m.nrows();
    if m.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: m.ncols() });
    }
    if n > MAX_MINOR_DIM {
        return Err(Error::TooLarge(n));
    }
    let mut out = vec![0.0; n + 1];
    out[0] = 1.0;
    for subset in 1u32..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| subset & (1 << i) != 0).collect();
        let r = idx.len();
        let minor = RMat::from_fn(r, r, |a, b| m[(idx[a], idx[b])]);
        out[r] += minor.determinant();
    }
    Ok(out)
}

/// `C_r(sigma) - C_r(C)`.
pub fn cur_slack(ms: &MomentSet, r: usize) -> Result<f64> {
    let n = ms.n();
    if r == 0 || r > n {
        return Err(Error::InvalidInput(format!("order r = {r} outside 1..={n}")));
    }
    Ok(char_coeffs(&ms.sigma)?[r] - char_coeffs(&ms.cmat)?[r])
}

/// `det sigma - det C`.
pub fn robertson_slack(ms: &MomentSet) -> Result<f64> {
    cur_slack(ms, ms.n())
}

/// `sigma_ii sigma_jj - sigma_ij^2 - C_ij^2`.
pub fn schrodinger_slack(ms: &MomentSet, i: usize, j: usize) -> Result<f64> {
    let n = ms.n();
    if n < 2 || i >= n || j >= n || i == j {
        return Err(Error::InvalidInput(format!("pair ({i}, {j}) invalid for {n} observables")));
    }
    let s = &ms.sigma;
    Ok(s[(i, i)] * s[(j, j)] - s[(i, j)].powi(2) - ms.cmat[(i, j)].powi(2))
}

/// `sigma_ii sigma_jj - (C_ij)^2`, ignoring the covariance term.
pub fn heisenberg_slack(ms: &MomentSet, i: usize, j: usize) -> Result<f64> {
    schrodinger_slack(ms, i, j).map(|s| s + ms.sigma[(i, j)].powi(2))
}

/// Moments of `X' = Lambda X`: `sigma' = Lambda sigma Lambda^T`,
/// `C' = Lambda C Lambda^T`.
pub fn transform_covariances(ms: &MomentSet, lambda: &RMat) -> Result<MomentSet> {
    let n = ms.n();
    if lambda.nrows() != n || lambda.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: lambda.nrows() });
    }
    let det = lambda.determinant();
    if det.abs() <= 1e-14 * lambda.amax().max(1e-300).powi(n as i32) {
        return Err(Error::SingularTransform);
    }
    let lt = lambda.transpose();
    Ok(MomentSet { means: lambda * &ms.means, sigma: lambda * &ms.sigma * &lt, cmat: lambda * &ms.cmat * &lt })
}

/// One order of an [`UncertaintyReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderEntry {
    pub r: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub equal: bool,
}

/// Characteristic coefficients of `sigma` and `C` with per-order slacks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub char_sigma: Vec<f64>,
    pub char_cmat: Vec<f64>,
    pub orders: Vec<OrderEntry>,
    pub psd_min_eig: f64,
    pub tolerance: f64,
}

impl UncertaintyReport {
    /// Builds the report for the requested orders (all when `orders` is empty).
    pub fn new(ms: &MomentSet, orders: &[usize], tolerance: f64) -> Result<Self> {
        let char_sigma = char_coeffs(&ms.sigma)?;
        let char_cmat = char_coeffs(&ms.cmat)?;
        let all: Vec<usize> = (1..=ms.n()).collect();
        let orders = if orders.is_empty() { &all[..] } else { orders };
        let entries = orders
            .iter()
            .map(|&r| {
                if r == 0 || r > ms.n() {
                    return Err(Error::InvalidInput(format!("order r = {r} outside 1..={}", ms.n())));
                }
                let (lhs, rhs) = (char_sigma[r], char_cmat[r]);
                let slack = lhs - rhs;
                Ok(OrderEntry { r, lhs, rhs, slack, equal: slack.abs() <= tolerance * lhs.abs().max(1.0) })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(UncertaintyReport { char_sigma, char_cmat, orders: entries, psd_min_eig: psd_check(ms), tolerance })
    }

    pub fn order(&self, r: usize) -> Option<&OrderEntry> {
        self.orders.iter().find(|o| o.r == r)
    }

    /// Orders at which the relation holds with equality.
    pub fn equality_orders(&self) -> Vec<usize> {
        self.orders.iter().filter(|o| o.equal).map(|o| o.r).collect()
    }

    /// Whether every slack is at least `-tolerance` and `sigma + iC` is PSD
    /// to the same tolerance.
    pub fn holds(&self) -> bool {
        self.orders.iter().all(|o| o.slack >= -self.tolerance.max(-SLACK_FLOOR)) && self.psd_min_eig >= SLACK_FLOOR
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{DensityMatrix, FockVector};
    use crate::reps::{build_rep, RepSpec};

    fn qp(dim: usize) -> crate::reps::OperatorSet {
        build_rep(&RepSpec::heisenberg(dim)).unwrap()
    }

    #[test]
    fn vacuum_moments() {
        let ops = qp(16);
        let vac = FockVector::basis(ops.spec, 0);
        let q = ops.position.as_ref().unwrap();
        let p = ops.momentum.as_ref().unwrap();
        let ms = moments(&vac, &[q, p]).unwrap();
        assert!((ms.sigma[(0, 0)] - 0.5).abs() < 1e-15 && (ms.sigma[(1, 1)] - 0.5).abs() < 1e-15);
        assert!((ms.cmat[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((ms.sigma.determinant() - 0.25).abs() < 1e-15);
        assert!(robertson_slack(&ms).unwrap().abs() < 1e-15);
    }

    #[test]
    fn converged_moments_skips_small_dims() {
        use crate::states::canonical_cs;
        let alpha = C64::new(2.0, 1.0);
        let at = |d: usize| {
            let ops = qp(d);
            moments(&canonical_cs(alpha, d)?, &[ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()])
        };
        let (ms, dim) = converged_moments(&[8, 16, 32, 48, 64], CONVERGENCE_TOL, at).unwrap();
        assert!(dim >= 32);
        assert!((ms.sigma[(0, 0)] - 0.5).abs() < 1e-12);
        assert!(matches!(converged_moments(&[8, 12], CONVERGENCE_TOL, at), Err(Error::DivergentSeries { .. })));
    }

    #[test]
    fn lowest_weight_three_generators() {
        let k = 1.0;
        let ops = build_rep(&RepSpec::su11(k, 16)).unwrap();
        let lw = FockVector::basis(ops.spec, 0);
        let ms = moments(&lw, &[&ops.x1, &ops.x2, &ops.cartan]).unwrap();
        let expected = RMat::from_diagonal(&RVec::from_vec(vec![k / 2.0, k / 2.0, 0.0]));
        assert!((&ms.sigma - expected).amax() < 1e-15);
        assert!(cur_slack(&ms, 2).unwrap().abs() < 1e-15);
        assert!((char_coeffs(&ms.sigma).unwrap()[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mixed_fock_moments() {
        let ops = qp(16);
        let rho =
            DensityMatrix::mixture(&[(0.5, &FockVector::basis(ops.spec, 0)), (0.5, &FockVector::basis(ops.spec, 1))])
                .unwrap();
        let ms = moments(&rho, &[ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()]).unwrap();
        assert!((&ms.sigma - RMat::identity(2, 2)).amax() < 1e-14);
    }

    #[test]
    fn fock_one_schrodinger() {
        let ops = qp(16);
        let one = FockVector::basis(ops.spec, 1);
        let ms = moments(&one, &[ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()]).unwrap();
        assert!((schrodinger_slack(&ms, 0, 1).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn char_coeff_examples() {
        let d = RMat::from_diagonal(&RVec::from_vec(vec![1.0, 2.0, 3.0]));
        assert_eq!(char_coeffs(&d).unwrap(), vec![1.0, 6.0, 11.0, 6.0]);
        let a = RMat::from_row_slice(3, 3, &[0.0, 1.0, -2.0, -1.0, 0.0, 3.0, 2.0, -3.0, 0.0]);
        assert!(char_coeffs(&a).unwrap()[3].abs() < 1e-15);
        assert!(matches!(char_coeffs(&RMat::zeros(9, 9)), Err(Error::TooLarge(9))));
    }

    #[test]
    fn transform_identity_and_determinant() {
        let ops = qp(24);
        let psi = crate::states::canonical_cs(C64::new(0.3, 0.4), 24).unwrap();
        let ms = moments(&psi, &[ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()]).unwrap();
        let same = transform_covariances(&ms, &RMat::identity(2, 2)).unwrap();
        assert_eq!(same, ms);
        let l = RMat::from_row_slice(2, 2, &[2.0, 1.0, 0.5, 3.0]);
        let t = transform_covariances(&ms, &l).unwrap();
        let det_l = l.determinant();
        assert!((t.sigma.determinant() - det_l * det_l * ms.sigma.determinant()).abs() < 1e-12);
        assert!(robertson_slack(&t).unwrap().abs() < 1e-10);
        assert!(matches!(transform_covariances(&ms, &RMat::zeros(2, 2)), Err(Error::SingularTransform)));
    }

    #[test]
    fn report_flags() {
        let ops = qp(16);
        let vac = FockVector::basis(ops.spec, 0);
        let ms = moments(&vac, &[ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()]).unwrap();
        let rep = UncertaintyReport::new(&ms, &[2], EQUALITY_TOL).unwrap();
        assert_eq!(rep.equality_orders(), vec![2]);
        assert!(rep.holds());
        let rep = UncertaintyReport::new(&ms, &[], EQUALITY_TOL).unwrap();
        assert_eq!(rep.orders.len(), 2);
        assert!(!rep.orders[0].equal);
    }
}
