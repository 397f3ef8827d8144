//! Classical `eps` flow, the `(u, v)` frame it induces, and exponential
//! propagation of states under `H(t) = (p^2 + omega(t)^2 q^2)/2`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::linalg::{c, expm_action, CVec, SparseMat};
use crate::states::{displaced_squeezed, SqueezeFrame};

/// Largest `omega * dt` accepted by the integrators.
pub const MAX_PHASE_STEP: f64 = 0.5;
/// Tolerance on the Wronskian of initial data.
pub const WRONSKIAN_INIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FrequencyProfile {
    Constant {
        omega: f64,
    },
    SuddenJump {
        omega0: f64,
        omega1: f64,
        t_jump: f64,
    },
    /// `omega0 + (omega1 - omega0)(x - sin(2 pi x)/(2 pi))`, `x = t/t_ramp`
    /// clamped to [0, 1]; the rate vanishes at both ends.
    SmoothRamp {
        omega0: f64,
        omega1: f64,
        t_ramp: f64,
    },
}

impl FrequencyProfile {
    pub fn omega(&self, t: f64) -> f64 {
        match *self {
            FrequencyProfile::Constant { omega } => omega,
            FrequencyProfile::SuddenJump { omega0, omega1, t_jump } => {
                if t < t_jump {
                    omega0
                } else {
                    omega1
                }
            }
            FrequencyProfile::SmoothRamp { omega0, omega1, t_ramp } => {
                let x = (t / t_ramp).clamp(0.0, 1.0);
                let tau = std::f64::consts::TAU;
                omega0 + (omega1 - omega0) * (x - (tau * x).sin() / tau)
            }
        }
    }

    /// Frequency at `t = 0`, which also fixes the Fock basis.
    pub fn omega0(&self) -> f64 {
        match *self {
            FrequencyProfile::Constant { omega } => omega,
            FrequencyProfile::SuddenJump { omega0, .. } | FrequencyProfile::SmoothRamp { omega0, .. } => omega0,
        }
    }

    fn omega_max(&self) -> f64 {
        match *self {
            FrequencyProfile::Constant { omega } => omega,
            FrequencyProfile::SuddenJump { omega0, omega1, .. }
            | FrequencyProfile::SmoothRamp { omega0, omega1, .. } => omega0.max(omega1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, extra) = match *self {
            FrequencyProfile::Constant { omega } => (omega, 1.0),
            FrequencyProfile::SuddenJump { omega0, omega1, t_jump } => (omega0.min(omega1), t_jump),
            FrequencyProfile::SmoothRamp { omega0, omega1, t_ramp } => (omega0.min(omega1), t_ramp),
        };
        if !(lo > 0.0 && lo.is_finite()) {
            return Err(Error::InvalidInput(format!("frequency must stay positive, got {lo}")));
        }
        if !(extra > 0.0 && extra.is_finite()) {
            return Err(Error::InvalidInput(format!("profile time must be positive, got {extra}")));
        }
        Ok(())
    }

    /// Frequency seen by a step `[a, b]`: for a jump the value inside the
    /// step, so that the discontinuity only ever sits on a grid node.
    fn omega_on_step(&self, t: f64, a: f64, b: f64) -> f64 {
        match self {
            FrequencyProfile::SuddenJump { .. } => self.omega(0.5 * (a + b)),
            _ => self.omega(t),
        }
    }

    /// Uniform grid of `ceil(t_end/dt)` steps with the jump time inserted.
    pub fn time_grid(&self, t_end: f64, dt: f64) -> Result<Vec<f64>> {
        self.validate()?;
        if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidInput(format!("need dt > 0 and t_end >= 0, got dt = {dt}, t_end = {t_end}")));
        }
        if dt * self.omega_max() > MAX_PHASE_STEP {
            return Err(Error::StepTooLarge(dt));
        }
        let steps = ((t_end / dt) - 1e-9).ceil().max(0.0) as usize;
        let mut grid: Vec<f64> = (0..=steps).map(|i| if i == steps { t_end } else { i as f64 * dt }).collect();
        if let FrequencyProfile::SuddenJump { t_jump, .. } = *self {
            if t_jump > 0.0 && t_jump < t_end {
                let pos = grid.partition_point(|&t| t < t_jump);
                if (grid[pos] - t_jump).abs() > 1e-12 * t_end.max(1.0) {
                    grid.insert(pos, t_jump);
                } else {
                    grid[pos] = t_jump;
                }
            }
        }
        Ok(grid)
    }
}

/// `eps*(t) eps'(t) - eps(t) eps'*(t) - 2i` in modulus.
pub fn wronskian_defect(eps: C64, deps: C64) -> f64 {
    (eps.conj() * deps - eps * deps.conj() - C64::new(0.0, 2.0)).norm()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsTrajectory {
    pub times: Vec<f64>,
    pub eps: Vec<C64>,
    pub deps: Vec<C64>,
    pub wronskian_drift: Vec<f64>,
}

impl EpsTrajectory {
    pub fn max_wronskian_drift(&self) -> f64 {
        self.wronskian_drift.iter().copied().fold(0.0, f64::max)
    }
}

/// Classical RK4 for `eps'' + omega(t)^2 eps = 0`.
pub fn integrate_eps(profile: &FrequencyProfile, eps0: C64, deps0: C64, t_end: f64, dt: f64) -> Result<EpsTrajectory> {
    let w0 = wronskian_defect(eps0, deps0);
    if w0 > WRONSKIAN_INIT_TOL {
        return Err(Error::WronskianViolation(w0));
    }
    let times = profile.time_grid(t_end, dt)?;
    let mut eps = Vec::with_capacity(times.len());
    let mut deps = Vec::with_capacity(times.len());
    let (mut x, mut y) = (eps0, deps0);
    eps.push(x);
    deps.push(y);
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = b - a;
        let f = |t: f64, x: C64| -> C64 { -profile.omega_on_step(t, a, b).powi(2) * x };
        let (k1x, k1y) = (y, f(a, x));
        let (k2x, k2y) = (y + k1y * (h / 2.0), f(a + h / 2.0, x + k1x * (h / 2.0)));
        let (k3x, k3y) = (y + k2y * (h / 2.0), f(a + h / 2.0, x + k2x * (h / 2.0)));
        let (k4x, k4y) = (y + k3y * h, f(b, x + k3x * h));
        x += (k1x + 2.0 * k2x + 2.0 * k3x + k4x) * (h / 6.0);
        y += (k1y + 2.0 * k2y + 2.0 * k3y + k4y) * (h / 6.0);
        eps.push(x);
        deps.push(y);
    }
    let wronskian_drift = eps.iter().zip(&deps).map(|(&e, &d)| wronskian_defect(e, d)).collect();
    Ok(EpsTrajectory { times, eps, deps, wronskian_drift })
}

/// Initial data `eps = 1/sqrt(omega0)`, `eps' = i sqrt(omega0)`, for which
/// the invariant starts as the annihilation operator.
pub fn coherent_initial_data(omega0: f64) -> (C64, C64) {
    (c(1.0 / omega0.sqrt()), C64::new(0.0, omega0.sqrt()))
}

/// `u = (eps sqrt(w) - i eps'/sqrt(w))/2`, `v = -(eps sqrt(w) + i eps'/sqrt(w))/2`
/// at every sample, relative to the ladder operators of frequency `w`.
pub fn uv_from_eps(traj: &EpsTrajectory, omega_ref: f64) -> Vec<(C64, C64)> {
    let sw = omega_ref.sqrt();
    let i = C64::new(0.0, 1.0);
    traj.eps
        .iter()
        .zip(&traj.deps)
        .map(|(&e, &d)| ((e * sw - i * d / sw) / 2.0, -(e * sw + i * d / sw) / 2.0))
        .collect()
}

/// `H = (p^2 + omega^2 q^2)/2` in the Fock basis of frequency `omega_b`:
/// `((omega_b^2 + omega^2)/(2 omega_b))(n + 1/2) + ((omega^2 - omega_b^2)/(4 omega_b))(a^2 + a^dagger^2)`.
fn hamiltonian(dim: usize, omega: f64, omega_b: f64) -> SparseMat {
    let diag = (omega_b * omega_b + omega * omega) / (2.0 * omega_b);
    let off = (omega * omega - omega_b * omega_b) / (4.0 * omega_b);
    let mut triplets = Vec::with_capacity(3 * dim);
    for n in 0..dim {
        triplets.push((n, n, c(diag * (n as f64 + 0.5))));
        if n + 2 < dim && off != 0.0 {
            // <n|a^2|n+2> = sqrt((n+1)(n+2))
            let amp = c(off * (((n + 1) * (n + 2)) as f64).sqrt());
            triplets.push((n, n + 2, amp));
            triplets.push((n + 2, n, amp));
        }
    }
    SparseMat::from_triplets(dim, triplets)
}

#[derive(Clone, Debug)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<FockVector>,
}

impl StateTrajectory {
    pub fn max_norm_drift(&self) -> f64 {
        self.states.iter().map(|s| (s.norm() - 1.0).abs()).fold(0.0, f64::max)
    }
}

/// Midpoint exponential stepping `psi_{n+1} = exp(-i H(t_n + dt/2) dt) psi_n`
/// on the grid of [`FrequencyProfile::time_grid`]; the basis is that of
/// `omega(0)`.
pub fn propagate_state(psi0: &FockVector, profile: &FrequencyProfile, t_end: f64, dt: f64) -> Result<StateTrajectory> {
    psi0.check_physical()?;
    let times = profile.time_grid(t_end, dt)?;
    let dim = psi0.dim();
    let omega_b = profile.omega0();
    let mut states = Vec::with_capacity(times.len());
    states.push(psi0.clone());
    let mut psi: CVec = psi0.coeffs.clone();
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let h = hamiltonian(dim, profile.omega(0.5 * (a + b)), omega_b);
        psi = expm_action(&h, C64::new(0.0, -(b - a)), &psi);
        let state = FockVector { rep: psi0.rep, coeffs: psi.clone() };
        state.check_physical()?;
        states.push(state);
    }
    Ok(StateTrajectory { times, states })
}

/// `||(u a + v a^dagger - alpha) psi||` over the rows where the truncated
/// ladder operators act exactly.
pub fn invariant_residual(psi: &FockVector, u: C64, v: C64, alpha: C64) -> f64 {
    let d = psi.dim();
    let cf = &psi.coeffs;
    let mut acc = 0.0;
    for n in 0..d.saturating_sub(1) {
        let mut row = u * (((n + 1) as f64).sqrt()) * cf[n + 1] - alpha * cf[n];
        if n > 0 {
            row += v * (n as f64).sqrt() * cf[n - 1];
        }
        acc += row.norm_sqr();
    }
    acc.sqrt()
}

/// Fidelity of `psi` to the squeezed state of frame `(u, v)`, the frame
/// first rescaled to `|u|^2 - |v|^2 = 1`.
pub fn fidelity_to_frame(psi: &FockVector, u: C64, v: C64, alpha: C64) -> Result<f64> {
    let g = u.norm_sqr() - v.norm_sqr();
    if !(g > 0.0) {
        return Err(Error::DegenerateFrame);
    }
    let s = g.sqrt();
    let frame = SqueezeFrame::new(u / s, v / s)?;
    let target = displaced_squeezed(alpha / s, frame, psi.dim())?;
    psi.fidelity(&target)
}

/// One CSV-ready row per sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicsSample {
    pub t: f64,
    pub u: C64,
    pub v: C64,
    pub wronskian_drift: f64,
    pub invariant_residual: f64,
    pub fidelity_to_frame: f64,
}

/// Full run: squeezed state of the initial frame with eigenvalue `alpha`,
/// propagated and compared against the classical frame at every sample.
pub fn run_dynamics(
    profile: &FrequencyProfile,
    eps0: C64,
    deps0: C64,
    alpha: C64,
    t_end: f64,
    dt: f64,
    dim: usize,
) -> Result<Vec<DynamicsSample>> {
    let traj = integrate_eps(profile, eps0, deps0, t_end, dt)?;
    let uv = uv_from_eps(&traj, profile.omega0());
    let (u0, v0) = uv[0];
    let psi0 = displaced_squeezed(alpha, SqueezeFrame::new(u0, v0)?, dim)?;
    let states = propagate_state(&psi0, profile, t_end, dt)?;
    traj.times
        .iter()
        .zip(&uv)
        .zip(&states.states)
        .zip(&traj.wronskian_drift)
        .map(|(((&t, &(u, v)), psi), &w)| {
            Ok(DynamicsSample {
                t,
                u,
                v,
                wronskian_drift: w,
                invariant_residual: invariant_residual(psi, u, v, alpha),
                fidelity_to_frame: fidelity_to_frame(psi, u, v, alpha)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::canonical_cs;

    #[test]
    fn constant_frequency_is_exact_rotation() {
        let w = 1.3;
        let p = FrequencyProfile::Constant { omega: w };
        let (e0, d0) = coherent_initial_data(w);
        let traj = integrate_eps(&p, e0, d0, 5.0, 5e-3).unwrap();
        for (t, e) in traj.times.iter().zip(&traj.eps) {
            assert!((e - C64::from_polar(1.0 / w.sqrt(), w * t)).norm() < 1e-9);
        }
        assert!(traj.max_wronskian_drift() <= 1e-9);
        let uv = uv_from_eps(&traj, w);
        let (u, v) = *uv.last().unwrap();
        assert!((u - C64::from_polar(1.0, w * 5.0)).norm() < 1e-9 && v.norm() < 1e-9);
    }

    #[test]
    fn bad_initial_data_and_steps() {
        let p = FrequencyProfile::Constant { omega: 1.0 };
        assert!(matches!(integrate_eps(&p, c(1.0), c(1.0), 1.0, 1e-2), Err(Error::WronskianViolation(_))));
        let (e0, d0) = coherent_initial_data(1.0);
        assert!(matches!(integrate_eps(&p, e0, d0, 1.0, 1.0), Err(Error::StepTooLarge(_))));
    }

    #[test]
    fn jump_lands_on_grid() {
        let p = FrequencyProfile::SuddenJump { omega0: 1.0, omega1: 2.0, t_jump: 0.1234 };
        let grid = p.time_grid(1.0, 0.01).unwrap();
        assert!(grid.contains(&0.1234));
        assert!(grid.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn coherent_state_rotates() {
        let p = FrequencyProfile::Constant { omega: 1.0 };
        let alpha = C64::new(0.8, 0.3);
        let psi0 = canonical_cs(alpha, 48).unwrap();
        let tr = propagate_state(&psi0, &p, 2.0, 1e-2).unwrap();
        let last = tr.states.last().unwrap();
        let expected = canonical_cs(alpha * C64::from_polar(1.0, -2.0), 48).unwrap();
        assert!(last.fidelity(&expected).unwrap() >= 1.0 - 1e-10);
        assert!(tr.max_norm_drift() <= 1e-12);
    }
}
