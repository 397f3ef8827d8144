use num_complex::Complex64 as C64;
use serde::Serialize;

use super::canonical::finish;
use super::OusParams;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{c, max_abs, CVec};
use crate::reps::{OperatorMatrix, RepKind, RepSpec};
use crate::special::dd::{Cdd, Dd};
use crate::special::{hyp2f1, pochhammer, q_bracket, q_double_factorial, q_shifted_product};

/// `u (X1 - i X2) + v (X1 + i X2) + w i[X1, X2]`.
pub fn ous_combination(x1: &OperatorMatrix, x2: &OperatorMatrix, p: &OusParams) -> OperatorMatrix {
    let i = C64::new(0.0, 1.0);
    let mut m = x1.scale(p.u + p.v).add(&x2.scale(-i * (p.u - p.v)));
    if p.w != c(0.0) {
        m = m.add(&x1.commutator(x2).scale(i * p.w));
    }
    m
}

/// `||(M - z) psi||` over the interior rows of `m`.
pub fn eigen_residual(m: &OperatorMatrix, z: C64, psi: &FockVector) -> f64 {
    let r = &m.entries * &psi.coeffs - &psi.coeffs * z;
    r.iter().enumerate().filter(|(i, _)| m.interior.contains(*i)).map(|(_, x)| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Sign of `i[X1, X2]` on the interior: `Some(true)` positive definite,
/// `Some(false)` negative definite, `None` indefinite.
fn commutator_sign(x1: &OperatorMatrix, x2: &OperatorMatrix) -> Option<bool> {
    let d = x1.commutator(x2).scale(C64::new(0.0, 1.0));
    let diag: Vec<f64> = (0..d.dim()).filter(|&i| d.interior.contains(i)).map(|i| d.entries[(i, i)].re).collect();
    if diag.iter().all(|&x| x > 0.0) {
        Some(true)
    } else if diag.iter().all(|&x| x < 0.0) {
        Some(false)
    } else {
        None
    }
}

/// Solves `[u (X1 - i X2) + v (X1 + i X2) + w i[X1,X2]] psi = z psi` on the
/// truncated ladder basis by forward recurrence.
///
/// The combination must be tridiagonal with nonvanishing superdiagonal.
/// For truncated infinite-dimensional representations with `i[X1,X2]`
/// definite, normalizability requires `|u| > |v|` (positive) or
/// `|v| > |u|` (negative). In finite representations `z` must be an
/// eigenvalue; otherwise the last row is inconsistent and
/// `NoSolutionInTruncation` is returned.
pub fn ladder_ous(x1: &OperatorMatrix, x2: &OperatorMatrix, params: &OusParams, rep: RepSpec) -> Result<FockVector> {
    let dim = rep.dim();
    if x1.dim() != dim || x2.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: x1.dim().min(x2.dim()) });
    }
    if !x1.hermitian || !x2.hermitian {
        return Err(Error::InvalidInput("ladder_ous needs Hermitian X1 and X2".into()));
    }
    if rep.is_truncated() {
        let (a, b) = (params.u.norm(), params.v.norm());
        match commutator_sign(x1, x2) {
            Some(true) if a <= b => {
                return Err(Error::NonNormalizable(format!("need |u| > |v|, got |u| = {a}, |v| = {b}")))
            }
            Some(false) if b <= a => {
                return Err(Error::NonNormalizable(format!("need |v| > |u|, got |u| = {a}, |v| = {b}")))
            }
            _ => {}
        }
    }
    let m = ous_combination(x1, x2, params).entries;
    let scale = max_abs(&m).max(1.0);
    for i in 0..dim {
        for j in 0..dim {
            if i.abs_diff(j) > 1 && m[(i, j)].norm() > 1e-13 * scale {
                return Err(Error::InvalidInput("operator combination is not tridiagonal".into()));
            }
        }
    }
    let z = params.z;
    let mut psi = CVec::zeros(dim);
    psi[0] = c(1.0);
    for n in 0..dim - 1 {
        let sup = m[(n, n + 1)];
        if sup.norm() <= 1e-300 {
            return Err(Error::ZeroParameter("superdiagonal of the eigenvalue operator"));
        }
        let lower = if n > 0 { m[(n, n - 1)] * psi[n - 1] } else { c(0.0) };
        psi[n + 1] = ((z - m[(n, n)]) * psi[n] - lower) / sup;
        let big = psi[n + 1].norm();
        if big > 1e100 {
            psi.unscale_mut(big);
        }
    }
    if !rep.is_truncated() {
        let last = dim - 1;
        let prev = if last > 0 { m[(last, last - 1)] * psi[last - 1] } else { c(0.0) };
        let resid = (prev + (m[(last, last)] - z) * psi[last]).norm() / psi.norm();
        if resid > 1e-8 * scale {
            return Err(Error::NoSolutionInTruncation(resid));
        }
    }
    finish(rep, psi)
}

/// Retries `build` at increasing dimensions while it reports
/// `NonPhysicalState`.
pub fn adaptive<T>(dims: &[usize], build: impl Fn(usize) -> Result<T>) -> Result<T> {
    let mut last = Err(Error::EmptyInput("dimension list"));
    for &d in dims {
        last = build(d);
        match last {
            Err(Error::NonPhysicalState { .. }) => continue,
            _ => return last,
        }
    }
    last
}

/// Unnormalized amplitudes `g_0..=g_{n_max}` of the su_q(1,1) optimal
/// state from `u sqrt([n+1][2k+n]) g_{n+1} + v sqrt([n][2k+n-1]) g_{n-1} = z g_n`,
/// `g_0 = 1`.
pub fn suq11_ous_coeffs(z: C64, u: C64, v: C64, q: f64, k: f64, n_max: usize) -> Result<Vec<C64>> {
    if u.norm() <= v.norm() {
        return Err(Error::NonNormalizable(format!("need |v| < |u|, got |u| = {}, |v| = {}", u.norm(), v.norm())));
    }
    RepSpec::new(RepKind::Suq11 { k, q }, 4)?;
    let mut g = Vec::with_capacity(n_max + 1);
    g.push(c(1.0));
    for n in 0..n_max {
        let nf = n as f64;
        let down =
            if n > 0 { v * (q_bracket(nf, q) * q_bracket(2.0 * k + nf - 1.0, q)).sqrt() * g[n - 1] } else { c(0.0) };
        let up = u * (q_bracket(nf + 1.0, q) * q_bracket(2.0 * k + nf, q)).sqrt();
        g.push((z * g[n] - down) / up);
    }
    Ok(g)
}

/// Normalized su_q(1,1) optimal state in `D+(k)` at deformation `q`.
pub fn suq11_ous(params: &OusParams, q: f64, k: f64, dim: usize) -> Result<FockVector> {
    let spec = RepSpec::new(RepKind::Suq11 { k, q }, dim)?;
    let g = suq11_ous_coeffs(params.z, params.u, params.v, q, k, dim - 1)?;
    finish(spec, CVec::from_vec(g))
}

/// Closed form at `z = 0`:
/// `g_{2n} = (-v/u)^n ([2n-1]!! ((2k))_{2n} / ([2n]!! ((2k+1))_{2n}))^{1/2}`,
/// odd coefficients zero.
pub fn suq11_ous_z0_closed_form(u: C64, v: C64, q: f64, k: f64, n: usize) -> C64 {
    if n % 2 == 1 {
        return c(0.0);
    }
    let m = n / 2;
    let num = q_double_factorial(n as i64 - 1, q) * q_shifted_product(2.0 * k, m, q);
    let den = q_double_factorial(n as i64, q) * q_shifted_product(2.0 * k + 1.0, m, q);
    (-v / u).powu(m as u32) * (num / den).sqrt()
}

/// Closed form at `q = 1`:
/// `g_n = (-l/2u)^n sqrt((2k)_n/n!) 2F1(k + z/l, -n; 2k; 2)`,
/// `l = 2 sqrt(-uv)` on the principal branch.
pub fn su11_ous_hypergeometric(z: C64, u: C64, v: C64, k: f64, n: usize) -> Result<C64> {
    if u.norm() == 0.0 {
        return Err(Error::ZeroParameter("u"));
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroParameter("v"));
    }
    let l = 2.0 * (-u * v).sqrt();
    let f = hyp2f1(k + z / l, c(-(n as f64)), c(2.0 * k), c(2.0))?;
    let norm = (pochhammer(2.0 * k, n) / pochhammer(1.0, n)).sqrt();
    Ok((-l / (2.0 * u)).powu(n as u32) * norm * f)
}

/// Branch data of the analytic construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BranchRecord {
    /// `s = sqrt(-v1/u1)`, principal branch.
    pub s: C64,
    /// First parameter of `1F1`, `k + z1/(2 s u1)`.
    pub a: C64,
    /// `2 sqrt(-u1 v1)`, principal branch.
    pub l: C64,
    /// Whether `a` vanishes, i.e. the state is an su(1,1) coherent state.
    pub condition_a: bool,
}

/// Result of [`su11_analytic_ous`].
#[derive(Clone, Debug)]
pub struct AnalyticOus {
    pub state: FockVector,
    pub branch: BranchRecord,
}

/// Eigenstate of `u1 K- + v1 K+` in `D+(k)` from its Barut-Girardello
/// function `Phi(eta) = e^{-s eta} 1F1(a; 2k; 2 s eta)`, `s = sqrt(-v1/u1)`,
/// `a = k + z1/(2 s u1)`.
///
/// `s u1` equals `sqrt(-u1 v1)` whenever `u1` is real positive; for other
/// `u1` the product `s u1` is the choice that solves the eigenvalue
/// equation, and it is what `branch.a` records.
///
/// The Taylor coefficients of the product are a convolution with
/// cancellation growing like `3^n`, so the sum runs in double-double.
pub fn su11_analytic_ous(z1: C64, u1: C64, v1: C64, k: f64, dim: usize) -> Result<AnalyticOus> {
    if u1.norm() <= v1.norm() {
        return Err(Error::NonNormalizable(format!("need |u1| > |v1|, got {} and {}", u1.norm(), v1.norm())));
    }
    if v1.norm() == 0.0 {
        return Err(Error::ZeroParameter("v1"));
    }
    let spec = RepSpec::new(RepKind::Su11Discrete { k }, dim)?;
    let s = (-v1 / u1).sqrt();
    let a = k + z1 / (2.0 * s * u1);
    let branch = BranchRecord { s, a, l: 2.0 * (-u1 * v1).sqrt(), condition_a: a.norm() <= 1e-12 * (1.0 + k) };

    // phi_n = (1/n!) sum_m C(n,m) A_m B_{n-m} with
    // A_m = (a)_m / (2k)_m (2 s_hat)^m and B_j = (-s_hat)^j
    let s_hat = s / s.norm();
    let two_s = Cdd::from_c64(2.0 * s_hat);
    let minus_s = Cdd::from_c64(-s_hat);
    let mut a_terms = Vec::with_capacity(dim);
    let mut b_terms = Vec::with_capacity(dim);
    let (mut acur, mut bcur) = (Cdd::from_c64(c(1.0)), Cdd::from_c64(c(1.0)));
    for m in 0..dim {
        a_terms.push(acur);
        b_terms.push(bcur);
        let a_plus_m = Cdd { re: Dd::from_f64(a.re) + Dd::from_f64(m as f64), im: Dd::from_f64(a.im) };
        acur = (acur * a_plus_m * two_s).div_f64(2.0 * k + m as f64);
        bcur = bcur * minus_s;
    }
    let mut coeffs = CVec::zeros(dim);
    // |s|^n sqrt((2k)_n / n!)
    let mut weight = 1.0;
    for n in 0..dim {
        let mut binom = Dd::from_f64(1.0);
        let mut acc = Cdd::default();
        for m in 0..=n {
            let b = Cdd { re: binom, im: Dd::default() };
            acc = acc + b * a_terms[m] * b_terms[n - m];
            binom = (binom * (n - m) as f64).div_f64((m + 1) as f64);
        }
        coeffs[n] = acc.to_c64() * weight;
        weight *= s.norm() * ((2.0 * k + n as f64) / (n + 1) as f64).sqrt();
    }
    let state = finish(spec, coeffs)?;
    Ok(AnalyticOus { state, branch })
}

/// The second normalizable solution for `k < 1/2`,
/// `eta^{1-2k} e^{-s eta} 1F1(z1/(2 s u1) - k + 1; 2(1-k); 2 s eta)`.
///
/// Conjugating the Barut-Girardello operators by `eta^{1-2k}` maps `D+(k)`
/// onto `D+(1-k)`, so this is the first solution in `D+(1-k)`.
pub fn su11_analytic_ous_second(z1: C64, u1: C64, v1: C64, k: f64, dim: usize) -> Result<AnalyticOus> {
    if !(k > 0.0 && k < 0.5) {
        return Err(Error::InvalidRepParameter(format!("second solution needs 0 < k < 1/2, got {k}")));
    }
    su11_analytic_ous(z1, u1, v1, 1.0 - k, dim)
}
