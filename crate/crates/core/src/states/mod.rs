//! Constructors for coherent, squeezed, group-related and optimal
//! uncertainty states.

mod canonical;
mod group;
mod multimode;
mod ous;

pub use canonical::{
    canonical_cs, coordinate_wavefunction, displaced_squeezed, displaced_squeezed_via_operator,
    squeezed_wavefunction_closed_form,
};
pub use group::{bg_cs, q_cs, spin_cs, spin_cs_angles, su11_cs, su2_resolution_check};
pub use multimode::{multimode_eigen_residuals, multimode_lowering, multimode_ss, BogoliubovPair};
pub use ous::{
    adaptive, eigen_residual, ladder_ous, ous_combination, su11_analytic_ous, su11_analytic_ous_second,
    su11_ous_hypergeometric, suq11_ous, suq11_ous_coeffs, suq11_ous_z0_closed_form, AnalyticOus, BranchRecord,
};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the eigenvalue equation
/// `[u (X1 - i X2) + v (X1 + i X2) + w i[X1, X2]] psi = z psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OusParams {
    pub u: C64,
    pub v: C64,
    #[serde(default)]
    pub w: C64,
    pub z: C64,
}

impl OusParams {
    pub fn new(u: C64, v: C64, z: C64) -> Self {
        OusParams { u, v, w: C64::new(0.0, 0.0), z }
    }
}

/// Squeeze parameters `(u, v)` with `|u|^2 - |v|^2 = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SqueezeFrame {
    pub u: C64,
    pub v: C64,
}

impl SqueezeFrame {
    pub fn new(u: C64, v: C64) -> Result<Self> {
        if u.norm() <= v.norm() {
            return Err(Error::NonNormalizable(format!("|u| = {} must exceed |v| = {}", u.norm(), v.norm())));
        }
        let defect = u.norm_sqr() - v.norm_sqr() - 1.0;
        if defect.abs() > 1e-12 {
            return Err(Error::InvalidFrame(defect + 1.0));
        }
        Ok(SqueezeFrame { u, v })
    }

    pub fn identity() -> Self {
        SqueezeFrame { u: C64::new(1.0, 0.0), v: C64::new(0.0, 0.0) }
    }

    /// `u = cosh r`, `v = e^{i theta} sinh r`.
    pub fn real(r: f64, theta: f64) -> Self {
        SqueezeFrame { u: C64::new(r.cosh(), 0.0), v: C64::from_polar(r.sinh(), theta) }
    }

    /// Squeeze parameter `zeta` of `exp(zeta K+ - zeta* K-)`, `K+ = a^dagger^2/2`.
    ///
    /// `|zeta| = arcosh|u|` and `arg zeta = arg v - arg u + pi`; the extra
    /// `pi` is what makes `S(zeta)|alpha e^{-i arg u}>` an eigenvector of
    /// `u a + v a^dagger` with this sign of `K+`.
    pub fn zeta(&self) -> C64 {
        let r = self.u.norm().acosh();
        if r == 0.0 {
            return C64::new(0.0, 0.0);
        }
        C64::from_polar(r, self.v.arg() - self.u.arg() + std::f64::consts::PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_validation() {
        assert!(matches!(SqueezeFrame::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)), Err(Error::NonNormalizable(_))));
        assert!(matches!(SqueezeFrame::new(C64::new(2.0, 0.0), C64::new(1.0, 0.0)), Err(Error::InvalidFrame(_))));
        let f = SqueezeFrame::real(0.5, 0.3);
        assert!(SqueezeFrame::new(f.u, f.v).is_ok());
        assert!((f.zeta().norm() - 0.5).abs() < 1e-14);
    }
}
