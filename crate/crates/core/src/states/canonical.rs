use num_complex::Complex64 as C64;

use super::SqueezeFrame;
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{c, expm, CMat, CVec};
use crate::reps::{build_rep, RepSpec};

/// Normalizes, fixes the global phase and applies the tail guard.
pub(crate) fn finish(rep: RepSpec, coeffs: CVec) -> Result<FockVector> {
    let state = FockVector::new(rep, coeffs)?.normalized()?.phase_fixed();
    state.check_physical()?;
    Ok(state)
}

/// Glauber coherent state `a|alpha> = alpha|alpha>` on `dim` Fock levels.
pub fn canonical_cs(alpha: C64, dim: usize) -> Result<FockVector> {
    let rep = RepSpec::new(crate::reps::RepKind::Heisenberg, dim)?;
    let mut coeffs = CVec::zeros(dim);
    let mut amp = c((-alpha.norm_sqr() / 2.0).exp());
    for n in 0..dim {
        coeffs[n] = amp;
        amp *= alpha / ((n + 1) as f64).sqrt();
    }
    let state = FockVector::new(rep, coeffs)?.normalized()?;
    state.check_physical()?;
    Ok(state)
}

/// Eigenstate of `u a + v a^dagger` with eigenvalue `alpha`, by forward
/// recurrence `u sqrt(n+1) c_{n+1} = alpha c_n - v sqrt(n) c_{n-1}`.
pub fn displaced_squeezed(alpha: C64, frame: SqueezeFrame, dim: usize) -> Result<FockVector> {
    let frame = SqueezeFrame::new(frame.u, frame.v)?;
    let rep = RepSpec::new(crate::reps::RepKind::Heisenberg, dim)?;
    let mut coeffs = CVec::zeros(dim);
    coeffs[0] = c(1.0);
    for n in 0..dim - 1 {
        let prev = if n > 0 { frame.v * (n as f64).sqrt() * coeffs[n - 1] } else { c(0.0) };
        coeffs[n + 1] = (alpha * coeffs[n] - prev) / (frame.u * ((n + 1) as f64).sqrt());
    }
    finish(rep, coeffs)
}

/// The same state as `e^{i arg u} S(zeta)|alpha e^{-i arg u}>`, with the
/// squeeze operator `S(zeta) = exp(zeta K+ - zeta* K-)` exponentiated on
/// a doubled working basis and cut back to `dim` levels.
pub fn displaced_squeezed_via_operator(alpha: C64, frame: SqueezeFrame, dim: usize) -> Result<FockVector> {
    let frame = SqueezeFrame::new(frame.u, frame.v)?;
    let work = 2 * dim;
    let ops = build_rep(&RepSpec::heisenberg(work))?;
    let k_plus = (&ops.raise.entries * &ops.raise.entries).scale(0.5);
    let zeta = frame.zeta();
    let gen: CMat = k_plus.map(|x| x * zeta) - k_plus.adjoint().map(|x| x * zeta.conj());
    let phase = C64::from_polar(1.0, frame.u.arg());
    let beta = alpha * phase.conj();
    let mut start = CVec::zeros(work);
    let mut amp = c((-beta.norm_sqr() / 2.0).exp());
    for n in 0..work {
        start[n] = amp;
        amp *= beta / ((n + 1) as f64).sqrt();
    }
    let full = expm(&gen) * start * phase;
    let rep = RepSpec::heisenberg(dim);
    let state = FockVector::new(rep, full.rows(0, dim).into_owned())?.normalized()?;
    state.check_physical()?;
    Ok(state)
}

/// Position-space wavefunction `sum_n c_n phi_n(q)` with Hermite functions
/// from the three-term recurrence.
pub fn coordinate_wavefunction(state: &FockVector, grid: &[f64]) -> Vec<C64> {
    let norm0 = std::f64::consts::PI.powf(-0.25);
    grid.iter()
        .map(|&q| {
            let mut prev = 0.0;
            let mut cur = norm0 * (-q * q / 2.0).exp();
            let mut acc = state.coeffs[0] * cur;
            for n in 0..state.dim() - 1 {
                let nf = n as f64;
                let next = (2.0 / (nf + 1.0)).sqrt() * q * cur - (nf / (nf + 1.0)).sqrt() * prev;
                prev = cur;
                cur = next;
                acc += state.coeffs[n + 1] * cur;
            }
            acc
        })
        .collect()
}

/// Closed-form wavefunction of the eigenstate of `u a + v a^dagger`:
/// `pi^{-1/4} (u - v)^{-1/2} exp[-(u+v)/(2(u-v)) (q - sqrt2 alpha/(u+v))^2
/// - ((|alpha|^2 - (u* + v*) alpha^2/(u + v))/2]`.
pub fn squeezed_wavefunction_closed_form(alpha: C64, frame: SqueezeFrame, q: f64) -> Result<C64> {
    let (u, v) = (frame.u, frame.v);
    if (u - v).norm() == 0.0 || (u + v).norm() == 0.0 {
        return Err(Error::DegenerateFrame);
    }
    let shift = c(q) - alpha * std::f64::consts::SQRT_2 / (u + v);
    let quad = -(u + v) / (2.0 * (u - v)) * shift * shift;
    let constant = -0.5 * (c(alpha.norm_sqr()) - (u.conj() + v.conj()) / (u + v) * alpha * alpha);
    Ok(std::f64::consts::PI.powf(-0.25) * (u - v).sqrt().inv() * (quad + constant).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{expectation_value, inner_product};

    fn overlap(a: &FockVector, b: &FockVector) -> f64 {
        inner_product(a, b).unwrap().norm()
    }

    #[test]
    fn vacuum_and_moments() {
        let vac = canonical_cs(c(0.0), 16).unwrap();
        assert_eq!(vac.coeffs[0], c(1.0));
        let ops = build_rep(&RepSpec::heisenberg(64)).unwrap();
        let psi = canonical_cs(c(1.0), 64).unwrap();
        let q = ops.position.as_ref().unwrap();
        let mean = expectation_value(q, &psi).unwrap().re;
        assert!((mean - std::f64::consts::SQRT_2).abs() < 1e-12);
        let var = expectation_value(&q.mul(q), &psi).unwrap().re - mean * mean;
        assert!((var - 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_frame_is_coherent() {
        let alpha = C64::new(0.7, -0.4);
        let a = displaced_squeezed(alpha, SqueezeFrame::identity(), 48).unwrap();
        let b = canonical_cs(alpha, 48).unwrap();
        assert!((overlap(&a, &b) - 1.0).abs() < 1e-13);
    }

    #[test]
    fn two_constructions_agree() {
        for (r, theta, alpha, dim) in [
            (0.3, 0.0, C64::new(0.5, 0.0), 64),
            (0.5, 1.1, C64::new(-0.3, 0.8), 64),
            (0.8, -2.0, C64::new(0.2, 0.1), 64),
            (1.0, 0.4, C64::new(0.5, 0.5), 96),
        ] {
            let frame = SqueezeFrame { u: C64::from_polar(f64::cosh(r), 0.3), v: C64::from_polar(f64::sinh(r), theta) };
            let a = displaced_squeezed(alpha, frame, dim).unwrap();
            let b = displaced_squeezed_via_operator(alpha, frame, dim).unwrap();
            assert!(overlap(&a, &b) >= 1.0 - 1e-8, "r = {r}: {}", overlap(&a, &b));
        }
    }

    #[test]
    fn wavefunction_of_vacuum() {
        let vac = canonical_cs(c(0.0), 8).unwrap();
        let grid: Vec<f64> = (0..21).map(|i| -5.0 + 0.5 * i as f64).collect();
        for (q, psi) in grid.iter().zip(coordinate_wavefunction(&vac, &grid)) {
            let expected = std::f64::consts::PI.powf(-0.25) * (-q * q / 2.0).exp();
            assert!((psi - c(expected)).norm() < 1e-15);
        }
    }

    #[test]
    fn hermite_series_matches_closed_form() {
        let frame = SqueezeFrame::real(0.3, 0.0);
        let alpha = c(0.5);
        let state = displaced_squeezed(alpha, frame, 64).unwrap();
        let grid: Vec<f64> = (0..2000).map(|i| -10.0 + 20.0 * i as f64 / 1999.0).collect();
        let series = coordinate_wavefunction(&state, &grid);
        let closed: Vec<C64> =
            grid.iter().map(|&q| squeezed_wavefunction_closed_form(alpha, frame, q).unwrap()).collect();
        // align the global phase at the peak
        let peak = (0..grid.len()).max_by(|&i, &j| closed[i].norm().total_cmp(&closed[j].norm())).unwrap();
        let phase = series[peak] / closed[peak] / (series[peak] / closed[peak]).norm();
        let h = grid[1] - grid[0];
        let mismatch: f64 = series.iter().zip(&closed).map(|(s, cl)| (s - cl * phase).norm_sqr() * h).sum();
        assert!(mismatch.sqrt() <= 1e-6, "{mismatch}");
        let norm: f64 = series.iter().map(|s| s.norm_sqr()).sum::<f64>() * h;
        assert!((norm - 1.0).abs() < 1e-6);
    }

    #[test]
    fn tail_guard_rejects_large_amplitude() {
        assert!(matches!(canonical_cs(c(5.0), 16), Err(Error::NonPhysicalState { .. })));
    }
}
