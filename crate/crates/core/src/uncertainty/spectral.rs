use nalgebra::linalg::SymmetricEigen;

use super::{MomentSet, RMat};
use crate::error::{Error, Result};
use crate::fock::StateRef;
use crate::linalg::{c, CMat, CVec};
use crate::reps::{Interior, OperatorMatrix};
use num_complex::Complex64 as C64;

/// Smallest eigenvalue of the Hermitian matrix `sigma + iC`.
pub fn psd_check(ms: &MomentSet) -> f64 {
    let n = ms.n();
    let h = CMat::from_fn(n, n, |i, j| C64::new(ms.sigma[(i, j)], ms.cmat[(i, j)]));
    SymmetricEigen::new(h).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Roots of `det(iC - lambda sigma) = 0`, ascending.
///
/// With `sigma = L L^T` these are the eigenvalues of the Hermitian matrix
/// `i L^{-1} C L^{-T}`.
pub fn sheaf_spectrum(sigma: &RMat, cmat: &RMat) -> Result<Vec<f64>> {
    let n = sigma.nrows();
    if sigma.ncols() != n || cmat.shape() != (n, n) {
        return Err(Error::DimensionMismatch { expected: n, got: cmat.nrows() });
    }
    let scale = sigma.amax();
    let min_eig = SymmetricEigen::new(sigma.clone()).eigenvalues.min();
    if scale == 0.0 || min_eig <= 1e-14 * scale {
        return Err(Error::SingularSigma);
    }
    let l = sigma.clone().cholesky().ok_or(Error::SingularSigma)?.l();
    let l_inv = l.try_inverse().ok_or(Error::SingularSigma)?;
    let m = &l_inv * cmat * l_inv.transpose();
    let z = CMat::from_fn(n, n, |i, j| C64::new(0.0, 0.5 * (m[(i, j)] - m[(j, i)])));
    let mut roots: Vec<f64> = SymmetricEigen::new(z).eigenvalues.iter().copied().collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

/// Factor `G` with `sigma + iC = G^dagger G`: column `i` stacks
/// `sqrt(p_k) (X_i - <X_i>) |v_k>` over the eigenvectors of the state.
///
/// Only defined for untruncated operators, where the masked commutator
/// coincides with the plain one.
pub fn gram_factor<'a>(state: impl Into<StateRef<'a>>, ops: &[&OperatorMatrix]) -> Result<CMat> {
    let state = state.into();
    if ops.is_empty() {
        return Err(Error::EmptyInput("operator tuple"));
    }
    if ops.iter().any(|o| o.interior != Interior::Full) {
        return Err(Error::InvalidInput("Gram factor needs untruncated operators".into()));
    }
    let dim = state.dim();
    if let Some(o) = ops.iter().find(|o| o.dim() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: o.dim() });
    }
    let branches: Vec<CVec> = match state {
        StateRef::Pure(psi) => vec![psi.coeffs.clone()],
        StateRef::Mixed(rho) => {
            let eig = SymmetricEigen::new(rho.entries.clone());
            (0..dim)
                .filter(|&k| eig.eigenvalues[k] > 0.0)
                .map(|k| eig.eigenvectors.column(k) * c(eig.eigenvalues[k].sqrt()))
                .collect()
        }
    };
    let mut g = CMat::zeros(dim * branches.len(), ops.len());
    for (i, op) in ops.iter().enumerate() {
        let images: Vec<CVec> = branches.iter().map(|v| &op.entries * v).collect();
        let mean: f64 = branches.iter().zip(&images).map(|(v, y)| v.dotc(y).re).sum();
        for (k, (v, y)) in branches.iter().zip(&images).enumerate() {
            g.view_mut((k * dim, i), (dim, 1)).copy_from(&(y - v * c(mean)));
        }
    }
    Ok(g)
}

/// Sheaf spectrum from a Gram factor, ascending.
///
/// With `[Re G; Im G] = Q T` we have `sigma = T^T T`, and the roots are
/// `mu - 1` for the eigenvalues `mu` of `W^dagger W`, `W = G T^{-1}`.
/// `W` has norm at most `sqrt 2`, so the roots carry an error of order
/// `eps sqrt(kappa(sigma))` instead of the `eps kappa(sigma)` that rounding
/// `sigma` and `C` to working precision already costs.
pub fn sheaf_spectrum_factored(g: &CMat) -> Result<Vec<f64>> {
    let (rows, n) = g.shape();
    if n == 0 {
        return Err(Error::EmptyInput("Gram factor"));
    }
    if 2 * rows < n {
        return Err(Error::SingularSigma);
    }
    let stacked = RMat::from_fn(2 * rows, n, |a, j| if a < rows { g[(a, j)].re } else { g[(a - rows, j)].im });
    let t = stacked.qr().r();
    // kappa(sigma) = kappa(T)^2, so this is the same cut as in sheaf_spectrum
    let sv = t.singular_values();
    if sv.max() == 0.0 || sv.min() <= 1e-7 * sv.max() {
        return Err(Error::SingularSigma);
    }
    let t_c = t.map(c);
    let w_t = t_c.transpose().solve_lower_triangular(&g.transpose()).ok_or(Error::SingularSigma)?;
    let gram = w_t.conjugate() * w_t.transpose();
    let mut roots: Vec<f64> = SymmetricEigen::new(gram).eigenvalues.iter().map(|mu| mu - 1.0).collect();
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}
