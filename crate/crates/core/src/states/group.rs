use num_complex::Complex64 as C64;

use super::canonical::finish;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{c, max_abs, CMat, CVec};
use crate::reps::{build_rep, RepKind, RepSpec};
use crate::special::q_bracket;

/// Amplitudes `c_0 = 1`, `c_{n+1} = c_n * ratio(n)`.
fn ratio_series(dim: usize, ratio: impl Fn(usize) -> C64) -> CVec {
    let mut coeffs = CVec::zeros(dim);
    let mut amp = c(1.0);
    for n in 0..dim {
        coeffs[n] = amp;
        amp *= ratio(n);
    }
    coeffs
}

/// Spin coherent state `(1 + |tau|^2)^{-j} e^{tau J+}|j,-j>`, the
/// exponential summed exactly (`J+` is nilpotent).
pub fn spin_cs(tau: C64, j: f64) -> Result<FockVector> {
    let ops = build_rep(&RepSpec::su2(j))?;
    let dim = ops.spec.dim();
    let mut term = CVec::zeros(dim);
    term[0] = c(1.0);
    let mut acc = term.clone();
    for n in 1..dim {
        term = (&ops.raise.entries * term) * (tau / n as f64);
        acc += &term;
    }
    let prefactor = (1.0 + tau.norm_sqr()).powf(-j);
    FockVector::new(ops.spec, acc * c(prefactor))
}

/// Spin coherent state at `tau = e^{-i phi} tan(theta/2)`, evaluated in
/// angle form so that `theta = pi` is regular.
pub fn spin_cs_angles(theta: f64, phi: f64, j: f64) -> Result<FockVector> {
    let spec = RepSpec::new(RepKind::Su2 { j }, 0)?;
    let dim = spec.dim();
    let (s, co) = ((theta / 2.0).sin(), (theta / 2.0).cos());
    let two_j = dim - 1;
    let mut binom = 1.0;
    let coeffs = CVec::from_fn(dim, |n, _| {
        if n > 0 {
            binom *= (two_j + 1 - n) as f64 / n as f64;
        }
        let mag = binom.sqrt() * co.powi((two_j - n) as i32) * s.powi(n as i32);
        C64::from_polar(mag, -(n as f64) * phi)
    });
    FockVector::new(spec, coeffs)
}

/// Perelomov su(1,1) coherent state
/// `(1 - |xi|^2)^k sum_n sqrt((2k)_n/n!) xi^n |k,k+n>`.
pub fn su11_cs(xi: C64, k: f64, dim: usize) -> Result<FockVector> {
    if xi.norm() >= 1.0 {
        return Err(Error::OutOfDisk(xi.norm()));
    }
    let spec = RepSpec::new(RepKind::Su11Discrete { k }, dim)?;
    let prefactor = (1.0 - xi.norm_sqr()).powf(k);
    let coeffs = ratio_series(dim, |n| xi * ((2.0 * k + n as f64) / (n + 1) as f64).sqrt()) * c(prefactor);
    let state = FockVector::new(spec, coeffs)?.normalized()?;
    state.check_physical()?;
    Ok(state)
}

/// Barut-Girardello state `K-|z;k> = z|z;k>`, amplitudes proportional to
/// `z^n / sqrt(n! Gamma(2k+n))`.
pub fn bg_cs(z: C64, k: f64, dim: usize) -> Result<FockVector> {
    let spec = RepSpec::new(RepKind::Su11Discrete { k }, dim)?;
    let coeffs = ratio_series(dim, |n| z / (((n + 1) as f64) * (2.0 * k + n as f64)).sqrt());
    finish(spec, coeffs)
}

/// q-deformed coherent state `a_q|alpha> = alpha|alpha>`, amplitudes
/// proportional to `alpha^n / sqrt([n]_q!)`.
pub fn q_cs(alpha: C64, q: f64, dim: usize) -> Result<FockVector> {
    let spec = RepSpec::new(RepKind::QBoson { q }, dim)?;
    let coeffs = ratio_series(dim, |n| alpha / q_bracket((n + 1) as f64, q).sqrt());
    finish(spec, coeffs)
}

/// Gauss-Legendre nodes and weights on [-1, 1].
fn gauss_legendre(order: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(order);
    let n = order as f64;
    for i in 0..order {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for m in 2..=order {
                let mf = m as f64;
                let p2 = ((2.0 * mf - 1.0) * x * p1 - (mf - 1.0) * p0) / mf;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 0 { 1.0 } else { p1 };
            dp = n * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Sup-norm deviation of `(2j+1)/(4 pi) * sum w |theta phi><theta phi|`
/// from the identity, with Gauss-Legendre nodes in `cos theta` and
/// `2 * order` uniform nodes in `phi`.
pub fn su2_resolution_check(j: f64, order: usize) -> Result<f64> {
    if order == 0 {
        return Err(Error::InvalidInput("quadrature order must be positive".into()));
    }
    let dim = RepSpec::new(RepKind::Su2 { j }, 0)?.dim();
    let n_phi = 2 * order;
    let mut acc = CMat::zeros(dim, dim);
    for (x, w) in gauss_legendre(order) {
        let theta = x.clamp(-1.0, 1.0).acos();
        for m in 0..n_phi {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / n_phi as f64;
            let psi = spin_cs_angles(theta, phi, j)?;
            let weight = w * 2.0 * std::f64::consts::PI / n_phi as f64;
            acc += (&psi.coeffs * psi.coeffs.adjoint()).scale(weight);
        }
    }
    let acc = acc.scale((2.0 * j + 1.0) / (4.0 * std::f64::consts::PI));
    Ok(max_abs(&(acc - CMat::identity(dim, dim))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation_value, inner_product};
    use crate::states::canonical_cs;

    #[test]
    fn spin_cs_lowest_weight_and_half_spin() {
        let psi = spin_cs(c(0.0), 1.5).unwrap();
        assert_eq!(psi.coeffs[0], c(1.0));
        let tau = C64::new(0.4, -1.3);
        let half = spin_cs(tau, 0.5).unwrap();
        let n = (1.0 + tau.norm_sqr()).sqrt();
        assert!((half.coeffs[0] - c(1.0 / n)).norm() < 1e-15);
        assert!((half.coeffs[1] - tau / n).norm() < 1e-15);
    }

    #[test]
    fn spin_cs_mean_j3() {
        let ops = build_rep(&RepSpec::su2(1.0)).unwrap();
        for tau in [c(1.0), C64::new(0.3, 0.2), c(2.5)] {
            let psi = spin_cs(tau, 1.0).unwrap();
            let t2 = tau.norm_sqr();
            // finite sum over m = -1, 0, 1 of m |c_m|^2
            let direct: f64 = (0..3).map(|n| (n as f64 - 1.0) * psi.coeffs[n].norm_sqr()).sum();
            let mean = expectation_value(&ops.cartan, &psi).unwrap().re;
            assert!((mean - direct).abs() < 1e-14);
            assert!((mean + (1.0 - t2) / (1.0 + t2)).abs() < 1e-14);
        }
    }

    #[test]
    fn angle_form_matches_tau_form() {
        let (theta, phi) = (1.1, 0.7);
        let tau = C64::from_polar(f64::tan(theta / 2.0), -phi);
        let a = spin_cs(tau, 2.0).unwrap();
        let b = spin_cs_angles(theta, phi, 2.0).unwrap();
        assert!((a.coeffs - b.coeffs).norm() < 1e-14);
    }

    #[test]
    fn su11_cs_is_normalized_by_prefactor() {
        let xi = C64::new(0.3, -0.2);
        let psi = su11_cs(xi, 1.0, 64).unwrap();
        let raw = (1.0 - xi.norm_sqr()).powf(1.0);
        assert!((psi.coeffs[0].re - raw).abs() < 1e-12);
        assert!(matches!(su11_cs(c(1.0), 1.0, 64), Err(Error::OutOfDisk(_))));
    }

    #[test]
    fn bg_ratio_and_eigen_residual() {
        let (z, k) = (c(1.0), 0.5);
        let psi = bg_cs(z, k, 48).unwrap();
        for n in 0..10 {
            let ratio = psi.coeffs[n + 1] / psi.coeffs[n];
            assert!((ratio - z / (((n + 1) as f64) * (2.0 * k + n as f64)).sqrt()).norm() < 1e-14);
        }
        let ops = build_rep(&psi.rep).unwrap();
        let res = &ops.lower.entries * &psi.coeffs - &psi.coeffs * z;
        assert!(res.rows(0, 46).norm() < 1e-9);
    }

    #[test]
    fn q_cs_limits() {
        let alpha = C64::new(0.6, 0.3);
        let a = q_cs(alpha, 1.0, 40).unwrap();
        let b = canonical_cs(alpha, 40).unwrap();
        assert!((a.coeffs - b.coeffs).norm() < 1e-14);
        assert_eq!(q_cs(c(0.0), 0.5, 10).unwrap().coeffs[0], c(1.0));
        let psi = q_cs(c(1.0), 0.8, 64).unwrap();
        let ops = build_rep(&psi.rep).unwrap();
        let res = &ops.lower.entries * &psi.coeffs - &psi.coeffs;
        assert!(res.rows(0, 62).norm() < 1e-9);
        assert!((inner_product(&psi, &psi).unwrap().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn resolution_of_unity() {
        assert!(su2_resolution_check(0.5, 8).unwrap() <= 1e-12);
        assert!(su2_resolution_check(2.0, 16).unwrap() <= 1e-10);
    }

    #[test]
    fn legendre_weights_integrate_polynomials() {
        let rule = gauss_legendre(5);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((total - 2.0).abs() < 1e-14);
        let x8: f64 = rule.iter().map(|(x, w)| w * x.powi(8)).sum();
        assert!((x8 - 2.0 / 9.0).abs() < 1e-14);
    }
}
