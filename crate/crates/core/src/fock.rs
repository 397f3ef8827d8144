//! States on a truncated ladder basis: pure vectors and density matrices.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_defect, CMat, CVec};
use crate::reps::{OperatorMatrix, RepSpec};

/// Mass allowed in the top four slots of a physical state.
pub const TAIL_GUARD: f64 = 1e-10;

/// Imaginary part tolerated in expectation values of Hermitian operators.
pub const REAL_TOL: f64 = 1e-10;

/// A finite amplitude vector over the truncated basis of `rep`.
#[derive(Clone, Debug, PartialEq)]
pub struct FockVector {
    pub rep: RepSpec,
    pub coeffs: CVec,
}

/// A density matrix over the truncated basis of `rep`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub rep: RepSpec,
    pub entries: CMat,
}

impl FockVector {
    pub fn new(rep: RepSpec, coeffs: CVec) -> Result<Self> {
        if coeffs.len() != rep.dim() {
            return Err(Error::DimensionMismatch { expected: rep.dim(), got: coeffs.len() });
        }
        Ok(FockVector { rep, coeffs })
    }

    /// Basis vector `|n>`.
    pub fn basis(rep: RepSpec, n: usize) -> Self {
        let mut coeffs = CVec::zeros(rep.dim());
        coeffs[n] = c(1.0);
        FockVector { rep, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.norm()
    }

    pub fn normalized(mut self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0 && n.is_finite()) {
            return Err(Error::NonNormalizable(format!("vector norm is {n}")));
        }
        self.coeffs.unscale_mut(n);
        Ok(self)
    }

    /// Makes the first nonzero amplitude real and positive.
    pub fn phase_fixed(mut self) -> Self {
        crate::linalg::fix_global_phase(&mut self.coeffs);
        self
    }

    /// Squared norm over the basis window `window`.
    pub fn tail_mass(&self, window: std::ops::Range<usize>) -> f64 {
        self.coeffs.rows_range(window).norm_squared()
    }

    /// Squared norm over the representation's boundary slots.
    pub fn boundary_mass(&self) -> f64 {
        self.rep.boundary_slots().iter().fold(0.0, |acc, &i| acc + self.coeffs[i].norm_sqr())
    }

    /// Fails with `NonPhysicalState` when the boundary mass exceeds the guard.
    pub fn check_physical(&self) -> Result<()> {
        check_tail(self.boundary_mass())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &FockVector) -> Result<f64> {
        Ok(inner_product(self, other)?.norm_sqr())
    }

    pub fn apply(&self, op: &OperatorMatrix) -> Result<CVec> {
        check_dim(self.dim(), op.dim())?;
        Ok(&op.entries * &self.coeffs)
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix { rep: self.rep, entries: &self.coeffs * self.coeffs.adjoint() }
    }
}

fn check_tail(tail: f64) -> Result<()> {
    if tail > TAIL_GUARD || tail.is_nan() {
        Err(Error::NonPhysicalState { tail, guard: TAIL_GUARD })
    } else {
        Ok(())
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(rep: RepSpec, entries: CMat) -> Result<Self> {
        check_dim(rep.dim(), entries.nrows())?;
        check_dim(rep.dim(), entries.ncols())?;
        let defect = hermiticity_defect(&entries);
        if defect > 1e-12 {
            return Err(Error::InvalidInput(format!("density matrix not Hermitian (defect {defect:.3e})")));
        }
        let trace = entries.trace();
        if (trace - c(1.0)).norm() > 1e-12 {
            return Err(Error::InvalidInput(format!("density matrix trace is {trace}")));
        }
        let herm = (&entries + entries.adjoint()).scale(0.5);
        let min = SymmetricEigen::new(herm).eigenvalues.min();
        if min < -1e-10 {
            return Err(Error::InvalidInput(format!("density matrix has eigenvalue {min:.3e}")));
        }
        Ok(DensityMatrix { rep, entries })
    }

    /// Convex mixture `sum_i w_i |psi_i><psi_i|` with weights normalized to 1.
    pub fn mixture(states: &[(f64, &FockVector)]) -> Result<Self> {
        let first = states.first().ok_or(Error::EmptyInput("mixture"))?.1;
        let total: f64 = states.iter().map(|(w, _)| *w).sum();
        if total <= 0.0 || states.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::InvalidInput("mixture weights must be nonnegative with positive sum".into()));
        }
        let d = first.dim();
        let mut rho = CMat::zeros(d, d);
        for (w, psi) in states {
            check_dim(d, psi.dim())?;
            rho += (&psi.coeffs * psi.coeffs.adjoint()).scale(*w / total);
        }
        Ok(DensityMatrix { rep: first.rep, entries: rho })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn boundary_mass(&self) -> f64 {
        self.rep.boundary_slots().iter().fold(0.0, |acc, &i| acc + self.entries[(i, i)].re)
    }

    pub fn check_physical(&self) -> Result<()> {
        check_tail(self.boundary_mass())
    }

    pub fn purity(&self) -> f64 {
        (&self.entries * &self.entries).trace().re
    }
}

/// Pure or mixed input accepted by moment and distance routines.
#[derive(Clone, Copy, Debug)]
pub enum StateRef<'a> {
    Pure(&'a FockVector),
    Mixed(&'a DensityMatrix),
}

impl<'a> From<&'a FockVector> for StateRef<'a> {
    fn from(v: &'a FockVector) -> Self {
        StateRef::Pure(v)
    }
}

impl<'a> From<&'a DensityMatrix> for StateRef<'a> {
    fn from(r: &'a DensityMatrix) -> Self {
        StateRef::Mixed(r)
    }
}

impl StateRef<'_> {
    pub fn dim(&self) -> usize {
        match self {
            StateRef::Pure(v) => v.dim(),
            StateRef::Mixed(r) => r.dim(),
        }
    }

    pub fn rep(&self) -> RepSpec {
        match self {
            StateRef::Pure(v) => v.rep,
            StateRef::Mixed(r) => r.rep,
        }
    }

    pub fn check_physical(&self) -> Result<()> {
        match self {
            StateRef::Pure(v) => v.check_physical(),
            StateRef::Mixed(r) => r.check_physical(),
        }
    }

    /// `<psi|M|psi>` or `Tr(rho M)` for an arbitrary matrix, no checks.
    pub fn raw_expectation(&self, m: &CMat) -> C64 {
        match self {
            StateRef::Pure(v) => v.coeffs.dotc(&(m * &v.coeffs)),
            StateRef::Mixed(r) => {
                // Tr(rho M) = sum_ij rho_ij M_ji
                let mut acc = c(0.0);
                for i in 0..r.dim() {
                    for j in 0..r.dim() {
                        acc += r.entries[(i, j)] * m[(j, i)];
                    }
                }
                acc
            }
        }
    }

    pub fn density(&self) -> CMat {
        match self {
            StateRef::Pure(v) => &v.coeffs * v.coeffs.adjoint(),
            StateRef::Mixed(r) => r.entries.clone(),
        }
    }
}

/// `<a|b>`, conjugate-linear in `a`.
pub fn inner_product(a: &FockVector, b: &FockVector) -> Result<C64> {
    check_dim(a.dim(), b.dim())?;
    Ok(a.coeffs.dotc(&b.coeffs))
}

/// Mean of `op` in a physical state. For Hermitian operators the imaginary
/// part is checked against `REAL_TOL` rather than dropped.
pub fn expectation_value<'a>(op: &OperatorMatrix, state: impl Into<StateRef<'a>>) -> Result<C64> {
    let state = state.into();
    check_dim(state.dim(), op.dim())?;
    state.check_physical()?;
    let value = state.raw_expectation(&op.entries);
    if op.hermitian && value.im.abs() > REAL_TOL * value.re.abs().max(1.0) {
        return Err(Error::ComplexExpectation(value.im));
    }
    Ok(value)
}

/// Squared norm of `state` over `window`.
pub fn tail_mass(state: &FockVector, window: std::ops::Range<usize>) -> f64 {
    state.tail_mass(window)
}

#[derive(Serialize, Deserialize)]
struct StateFile {
    rep: RepSpec,
    dim: usize,
    coeffs: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diagnostics: Option<serde_json::Value>,
}

#[derive(Serialize, Deserialize)]
struct DensityFile {
    rep: RepSpec,
    dim: usize,
    entries: Vec<[f64; 2]>,
}

fn pairs(it: impl Iterator<Item = C64>) -> Vec<[f64; 2]> {
    it.map(|z| [z.re, z.im]).collect()
}

impl FockVector {
    pub fn to_json(&self, diagnostics: Option<serde_json::Value>) -> serde_json::Value {
        let file =
            StateFile { rep: self.rep, dim: self.dim(), coeffs: pairs(self.coeffs.iter().copied()), diagnostics };
        serde_json::to_value(file).expect("state serialization")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: StateFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(format!("state file: {e}")))?;
        file.rep.validate()?;
        check_dim(file.dim, file.coeffs.len())?;
        let coeffs = CVec::from_iterator(file.dim, file.coeffs.iter().map(|p| C64::new(p[0], p[1])));
        FockVector::new(file.rep, coeffs)
    }
}

impl DensityMatrix {
    pub fn to_json(&self) -> serde_json::Value {
        // row-major
        let d = self.dim();
        let entries = pairs((0..d).flat_map(|i| (0..d).map(move |j| (i, j))).map(|(i, j)| self.entries[(i, j)]));
        serde_json::to_value(DensityFile { rep: self.rep, dim: d, entries }).expect("density serialization")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let file: DensityFile =
            serde_json::from_value(value.clone()).map_err(|e| Error::InvalidInput(format!("density file: {e}")))?;
        file.rep.validate()?;
        check_dim(file.dim * file.dim, file.entries.len())?;
        let m = CMat::from_row_iterator(file.dim, file.dim, file.entries.iter().map(|p| C64::new(p[0], p[1])));
        DensityMatrix::new(file.rep, m)
    }
}

/// Reads either state format.
pub fn state_from_json(value: &serde_json::Value) -> Result<OwnedState> {
    if value.get("entries").is_some() {
        Ok(OwnedState::Mixed(DensityMatrix::from_json(value)?))
    } else {
        Ok(OwnedState::Pure(FockVector::from_json(value)?))
    }
}

/// Owned counterpart of [`StateRef`].
#[derive(Clone, Debug)]
pub enum OwnedState {
    Pure(FockVector),
    Mixed(DensityMatrix),
}

impl OwnedState {
    pub fn as_ref(&self) -> StateRef<'_> {
        match self {
            OwnedState::Pure(v) => StateRef::Pure(v),
            OwnedState::Mixed(r) => StateRef::Mixed(r),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::build_rep;

    fn cs(alpha: f64, dim: usize) -> FockVector {
        // direct Poisson amplitudes
        let mut coeffs = CVec::zeros(dim);
        let mut amp = (-alpha * alpha / 2.0).exp();
        for n in 0..dim {
            coeffs[n] = c(amp);
            amp *= alpha / ((n + 1) as f64).sqrt();
        }
        FockVector::new(RepSpec::heisenberg(dim), coeffs).unwrap()
    }

    #[test]
    fn orthonormal_basis() {
        let rep = RepSpec::heisenberg(8);
        let e0 = FockVector::basis(rep, 0);
        let e1 = FockVector::basis(rep, 1);
        assert_eq!(inner_product(&e0, &e0).unwrap(), c(1.0));
        assert_eq!(inner_product(&e0, &e1).unwrap(), c(0.0));
    }

    #[test]
    fn coherent_overlap() {
        let a = cs(0.5, 64);
        let b = cs(-0.5, 64);
        assert!((inner_product(&a, &b).unwrap().norm_sqr() - (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn conjugate_linear_first_slot() {
        let rep = RepSpec::heisenberg(4);
        let a = FockVector::new(rep, CVec::from_vec(vec![C64::new(0.0, 1.0), c(0.0), c(0.0), c(0.0)])).unwrap();
        let b = FockVector::basis(rep, 0);
        assert_eq!(inner_product(&a, &b).unwrap(), C64::new(0.0, -1.0));
    }

    #[test]
    fn vacuum_expectations() {
        let ops = build_rep(&RepSpec::heisenberg(16)).unwrap();
        let vac = FockVector::basis(ops.spec, 0);
        assert_eq!(expectation_value(&ops.cartan, &vac).unwrap(), c(0.0));
        let q = ops.position.as_ref().unwrap();
        let q2 = q.mul(q);
        assert!((expectation_value(&q2, &vac).unwrap().re - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lowest_weight_cartan() {
        let ops = build_rep(&RepSpec::su11(1.0, 16)).unwrap();
        let lw = FockVector::basis(ops.spec, 0);
        assert_eq!(expectation_value(&ops.cartan, &lw).unwrap(), c(1.0));
    }

    #[test]
    fn tail_guard() {
        assert!(cs(1.0, 64).tail_mass(60..64) < 1e-20);
        assert_eq!(FockVector::basis(RepSpec::heisenberg(16), 0).tail_mass(12..16), 0.0);
        let big = cs(5.0, 16).normalized().unwrap();
        assert!(big.tail_mass(12..16) > TAIL_GUARD);
        let ops = build_rep(&RepSpec::heisenberg(16)).unwrap();
        assert!(matches!(expectation_value(&ops.cartan, &big), Err(Error::NonPhysicalState { .. })));
    }

    #[test]
    fn pure_and_rank_one_density_agree() {
        let ops = build_rep(&RepSpec::heisenberg(32)).unwrap();
        let psi = cs(1.3, 32);
        let rho = psi.to_density();
        for op in [&ops.x1, &ops.x2, &ops.cartan] {
            let a = expectation_value(op, &psi).unwrap();
            let b = expectation_value(op, &rho).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn density_validation() {
        let rep = RepSpec::heisenberg(4);
        let mut m = CMat::zeros(4, 4);
        m[(0, 0)] = c(0.5);
        m[(1, 1)] = c(0.5);
        assert!(DensityMatrix::new(rep, m.clone()).is_ok());
        m[(0, 1)] = c(0.1);
        assert!(DensityMatrix::new(rep, m.clone()).is_err());
        m[(0, 1)] = c(0.0);
        m[(1, 1)] = c(0.6);
        assert!(DensityMatrix::new(rep, m).is_err());
    }

    #[test]
    fn json_round_trip() {
        let psi = cs(0.7, 12);
        let back = FockVector::from_json(&psi.to_json(None)).unwrap();
        assert_eq!(psi, back);
        let rho = DensityMatrix::mixture(&[(1.0, &psi), (1.0, &FockVector::basis(psi.rep, 1))]).unwrap();
        let text = serde_json::to_string(&rho.to_json()).unwrap();
        let back = DensityMatrix::from_json(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(rho, back);
    }

    #[test]
    fn dimension_mismatch() {
        let a = FockVector::basis(RepSpec::heisenberg(4), 0);
        let b = FockVector::basis(RepSpec::heisenberg(5), 0);
        assert_eq!(inner_product(&a, &b), Err(Error::DimensionMismatch { expected: 4, got: 5 }));
    }
}
