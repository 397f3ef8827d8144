//! Truncated matrix realizations of the Heisenberg-Weyl, su(1,1), su(2) and
//! q-deformed algebras.
//!
//! All ladder operators are built in the ladder basis `|n>`, `n = 0..dim`,
//! where `n` counts quanta above the lowest weight (`|k,k+n>`, `|j,-j+n>`,
//! or the Fock state `|n>`). The lowering operator has entries only on the
//! superdiagonal and the raising operator is built as its adjoint.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{c, hermiticity_defect, CMat};
use crate::special::q_bracket;

/// Parity sector of the one-mode boson realization of su(1,1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

/// Algebra and representation labels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RepKind {
    Heisenberg,
    Su11Discrete {
        k: f64,
    },
    Su11OneMode {
        parity: Parity,
    },
    Su2 {
        j: f64,
    },
    QBoson {
        q: f64,
    },
    Suq11 {
        k: f64,
        q: f64,
    },
    Suq2 {
        j: f64,
        q: f64,
    },
    /// Tensor product of `modes` truncated oscillators.
    MultiMode {
        modes: usize,
    },
}

/// A representation together with its truncation.
///
/// `truncation` is ignored by the finite-dimensional su(2) families, whose
/// dimension is always `2j + 1`; for `MultiMode` it is the number of levels
/// per mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepSpec {
    #[serde(flatten)]
    pub kind: RepKind,
    pub truncation: usize,
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidRepParameter(format!("{name} must be positive, got {x}")))
    }
}

fn check_spin(j: f64) -> Result<usize> {
    let twice = 2.0 * j;
    if j >= 0.5 && twice.fract() == 0.0 && twice < 1e6 {
        Ok(twice as usize)
    } else {
        Err(Error::InvalidRepParameter(format!("j must be a positive half-integer, got {j}")))
    }
}

impl RepSpec {
    pub fn new(kind: RepKind, truncation: usize) -> Result<Self> {
        let spec = RepSpec { kind, truncation };
        spec.validate()?;
        Ok(spec)
    }

    pub fn heisenberg(truncation: usize) -> Self {
        RepSpec { kind: RepKind::Heisenberg, truncation }
    }

    pub fn su11(k: f64, truncation: usize) -> Self {
        RepSpec { kind: RepKind::Su11Discrete { k }, truncation }
    }

    pub fn su2(j: f64) -> Self {
        RepSpec { kind: RepKind::Su2 { j }, truncation: (2.0 * j) as usize + 1 }
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            RepKind::Su11Discrete { k } => check_positive("k", k)?,
            RepKind::Su2 { j } => {
                check_spin(j)?;
            }
            RepKind::QBoson { q } => check_positive("q", q)?,
            RepKind::Suq11 { k, q } => {
                check_positive("k", k)?;
                check_positive("q", q)?;
            }
            RepKind::Suq2 { j, q } => {
                check_spin(j)?;
                check_positive("q", q)?;
            }
            RepKind::MultiMode { modes } => {
                if modes == 0 {
                    return Err(Error::InvalidRepParameter("modes must be at least 1".into()));
                }
            }
            RepKind::Heisenberg | RepKind::Su11OneMode { .. } => {}
        }
        if self.is_truncated() && self.truncation < 4 {
            return Err(Error::InvalidRepParameter(format!("truncation must be at least 4, got {}", self.truncation)));
        }
        Ok(())
    }

    /// Whether the representation is infinite-dimensional and cut off.
    pub fn is_truncated(&self) -> bool {
        !matches!(self.kind, RepKind::Su2 { .. } | RepKind::Suq2 { .. })
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            RepKind::Su2 { j } | RepKind::Suq2 { j, .. } => (2.0 * j).round() as usize + 1,
            RepKind::MultiMode { modes } => self.truncation.pow(modes as u32),
            _ => self.truncation,
        }
    }

    /// Bargmann index for the su(1,1) families.
    pub fn bargmann_index(&self) -> Option<f64> {
        match self.kind {
            RepKind::Su11Discrete { k } | RepKind::Suq11 { k, .. } => Some(k),
            RepKind::Su11OneMode { parity: Parity::Even } => Some(0.25),
            RepKind::Su11OneMode { parity: Parity::Odd } => Some(0.75),
            _ => None,
        }
    }

    /// Basis indices that lie in the top four slots of some truncated mode.
    pub fn boundary_slots(&self) -> Vec<usize> {
        if !self.is_truncated() {
            return Vec::new();
        }
        let d = self.truncation;
        match self.kind {
            RepKind::MultiMode { modes } => {
                (0..self.dim()).filter(|&i| mode_indices(i, d, modes).iter().any(|&m| m + 4 >= d)).collect()
            }
            _ => (d.saturating_sub(4)..d).collect(),
        }
    }

    /// The interior on which single ladder applications are exact.
    pub fn interior(&self) -> Interior {
        if !self.is_truncated() {
            return Interior::Full;
        }
        match self.kind {
            RepKind::MultiMode { modes } => {
                Interior::Tensor { per_mode: self.truncation, modes, bound: self.truncation - 2 }
            }
            _ => Interior::Below(self.truncation - 2),
        }
    }
}

/// Decomposes a tensor-basis index into per-mode occupation numbers, mode 0
/// being the most significant digit.
pub fn mode_indices(i: usize, per_mode: usize, modes: usize) -> Vec<usize> {
    let mut out = vec![0; modes];
    let mut rest = i;
    for m in (0..modes).rev() {
        out[m] = rest % per_mode;
        rest /= per_mode;
    }
    out
}

/// Index set free of truncation artifacts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Interior {
    Full,
    /// Indices `0..bound`.
    Below(usize),
    /// Tensor indices whose every mode occupation is below `bound`.
    Tensor {
        per_mode: usize,
        modes: usize,
        bound: usize,
    },
}

impl Interior {
    pub fn contains(&self, i: usize) -> bool {
        match *self {
            Interior::Full => true,
            Interior::Below(b) => i < b,
            Interior::Tensor { per_mode, modes, bound } => mode_indices(i, per_mode, modes).iter().all(|&m| m < bound),
        }
    }

    /// The stricter of two interiors (the first unless both are `Below`).
    fn meet(self, other: Interior) -> Interior {
        match (self, other) {
            (Interior::Full, o) => o,
            (s, Interior::Full) => s,
            (Interior::Below(a), Interior::Below(b)) => Interior::Below(a.min(b)),
            (s, _) => s,
        }
    }
}

/// A dense operator on a truncated basis.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix {
    pub entries: CMat,
    pub hermitian: bool,
    pub interior: Interior,
}

const HERMITIAN_TOL: f64 = 1e-14;

impl OperatorMatrix {
    pub fn new(entries: CMat, interior: Interior) -> Self {
        assert!(entries.is_square(), "operator matrix must be square");
        let hermitian = hermiticity_defect(&entries) <= HERMITIAN_TOL;
        OperatorMatrix { entries, hermitian, interior }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn adjoint(&self) -> Self {
        OperatorMatrix { entries: self.entries.adjoint(), hermitian: self.hermitian, interior: self.interior }
    }

    pub fn identity(dim: usize, interior: Interior) -> Self {
        OperatorMatrix::new(CMat::identity(dim, dim), interior)
    }

    pub fn from_diagonal(diag: &[f64], interior: Interior) -> Self {
        let mut m = CMat::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = c(d);
        }
        OperatorMatrix::new(m, interior)
    }

    /// Lowering operator with `<n-1|L|n> = amplitude(n)` for `n = 1..dim`.
    pub fn lowering(dim: usize, interior: Interior, amplitude: impl Fn(usize) -> f64) -> Self {
        let mut m = CMat::zeros(dim, dim);
        for n in 1..dim {
            m[(n - 1, n)] = c(amplitude(n));
        }
        OperatorMatrix::new(m, interior)
    }

    /// `self * other`, keeping the stricter interior.
    pub fn mul(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries * &other.entries, self.interior.meet(other.interior))
    }

    pub fn add(&self, other: &OperatorMatrix) -> OperatorMatrix {
        OperatorMatrix::new(&self.entries + &other.entries, self.interior.meet(other.interior))
    }

    pub fn scale(&self, s: C64) -> OperatorMatrix {
        OperatorMatrix::new(self.entries.map(|z| z * s), self.interior)
    }

    pub fn commutator(&self, other: &OperatorMatrix) -> OperatorMatrix {
        let ab = &self.entries * &other.entries;
        let ba = &other.entries * &self.entries;
        OperatorMatrix::new(ab - ba, self.interior.meet(other.interior))
    }

    /// Copy with every entry outside `interior x interior` set to zero.
    pub fn masked(&self) -> OperatorMatrix {
        let mut m = self.entries.clone();
        let n = m.nrows();
        for i in 0..n {
            let keep_i = self.interior.contains(i);
            for j in 0..n {
                if !keep_i || !self.interior.contains(j) {
                    m[(i, j)] = c(0.0);
                }
            }
        }
        OperatorMatrix { entries: m, hermitian: self.hermitian, interior: self.interior }
    }

    /// Applies `f` to the real diagonal (for functions of a Cartan element).
    pub fn map_diagonal(&self, f: impl Fn(f64) -> f64) -> OperatorMatrix {
        let n = self.dim();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(f(self.entries[(i, i)].re));
        }
        OperatorMatrix::new(m, self.interior)
    }
}

/// The operators of one representation.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub spec: RepSpec,
    pub lower: OperatorMatrix,
    pub raise: OperatorMatrix,
    pub cartan: OperatorMatrix,
    pub x1: OperatorMatrix,
    pub x2: OperatorMatrix,
    /// `q = (a + a^dagger)/sqrt 2` (Heisenberg only).
    pub position: Option<OperatorMatrix>,
    /// `p = i (a^dagger - a)/sqrt 2` (Heisenberg only).
    pub momentum: Option<OperatorMatrix>,
}

impl OperatorSet {
    /// Looks an operator up by its conventional name.
    pub fn by_name(&self, name: &str) -> Option<&OperatorMatrix> {
        match name {
            "lower" | "a" | "k-" | "j-" => Some(&self.lower),
            "raise" | "ad" | "k+" | "j+" => Some(&self.raise),
            "cartan" | "n" | "k3" | "j3" | "x3" => Some(&self.cartan),
            "x1" | "k1" | "j1" => Some(&self.x1),
            "x2" | "k2" | "j2" => Some(&self.x2),
            "q" => self.position.as_ref(),
            "p" => self.momentum.as_ref(),
            _ => None,
        }
    }
}

/// Builds the ladder, Cartan and Hermitian-component operators of `spec`.
pub fn build_rep(spec: &RepSpec) -> Result<OperatorSet> {
    spec.validate()?;
    let dim = spec.dim();
    let interior = spec.interior();
    let (lower, cartan_diag): (OperatorMatrix, Vec<f64>) = match spec.kind {
        RepKind::Heisenberg => {
            (OperatorMatrix::lowering(dim, interior, |n| (n as f64).sqrt()), (0..dim).map(|n| n as f64).collect())
        }
        RepKind::Su11Discrete { k } => (
            OperatorMatrix::lowering(dim, interior, |n| {
                let n = n as f64;
                (n * (2.0 * k + n - 1.0)).sqrt()
            }),
            (0..dim).map(|n| k + n as f64).collect(),
        ),
        RepKind::Su11OneMode { parity } => {
            // sector basis |2n + p>, K- = a^2/2, K3 = a^dagger a/2 + 1/4
            let p = match parity {
                Parity::Even => 0.0,
                Parity::Odd => 1.0,
            };
            (
                OperatorMatrix::lowering(dim, interior, |n| {
                    let m = 2.0 * n as f64 + p;
                    (m * (m - 1.0)).sqrt() / 2.0
                }),
                (0..dim).map(|n| (2.0 * n as f64 + p) / 2.0 + 0.25).collect(),
            )
        }
        RepKind::Su2 { j } => (
            OperatorMatrix::lowering(dim, interior, |n| {
                let n = n as f64;
                (n * (2.0 * j - n + 1.0)).sqrt()
            }),
            (0..dim).map(|n| n as f64 - j).collect(),
        ),
        RepKind::QBoson { q } => (
            OperatorMatrix::lowering(dim, interior, |n| q_bracket(n as f64, q).sqrt()),
            (0..dim).map(|n| n as f64).collect(),
        ),
        RepKind::Suq11 { k, q } => (
            OperatorMatrix::lowering(dim, interior, |n| {
                let n = n as f64;
                (q_bracket(n, q) * q_bracket(2.0 * k + n - 1.0, q)).sqrt()
            }),
            (0..dim).map(|n| k + n as f64).collect(),
        ),
        RepKind::Suq2 { j, q } => (
            OperatorMatrix::lowering(dim, interior, |n| {
                let n = n as f64;
                (q_bracket(n, q) * q_bracket(2.0 * j + 1.0 - n, q)).sqrt()
            }),
            (0..dim).map(|n| n as f64 - j).collect(),
        ),
        RepKind::MultiMode { .. } => {
            return Err(Error::InvalidRepParameter(
                "multimode representations have one ladder pair per mode; use mode_lowering".into(),
            ))
        }
    };
    let raise = lower.adjoint();
    let cartan = OperatorMatrix::from_diagonal(&cartan_diag, interior);
    let (x1, x2) = hermitian_components(&lower);
    let (position, momentum) = if spec.kind == RepKind::Heisenberg {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let q = lower.add(&raise).scale(c(s));
        let p = raise.add(&lower.scale(c(-1.0))).scale(C64::new(0.0, s));
        (Some(q), Some(p))
    } else {
        (None, None)
    };
    Ok(OperatorSet { spec: *spec, lower, raise, cartan, x1, x2, position, momentum })
}

/// Lowering operator of mode `which` on the tensor basis of `modes` modes.
pub fn mode_lowering(per_mode: usize, modes: usize, which: usize) -> OperatorMatrix {
    assert!(which < modes);
    let dim = per_mode.pow(modes as u32);
    let stride = per_mode.pow((modes - 1 - which) as u32);
    let mut m = CMat::zeros(dim, dim);
    for i in 0..dim {
        let n = (i / stride) % per_mode;
        if n > 0 {
            m[(i - stride, i)] = c((n as f64).sqrt());
        }
    }
    OperatorMatrix::new(m, Interior::Tensor { per_mode, modes, bound: per_mode - 2 })
}

/// Splits `A` as `A = X1 - i X2` with `X1 = (A + A^dagger)/2` and
/// `X2 = i (A - A^dagger)/2`, both Hermitian.
pub fn hermitian_components(a: &OperatorMatrix) -> (OperatorMatrix, OperatorMatrix) {
    let ad = a.entries.adjoint();
    let x1 = (&a.entries + &ad).scale(0.5);
    let x2 = (&a.entries - &ad).map(|z| z * C64::new(0.0, 0.5));
    // exact symmetrization so the Hermitian flag is structural
    let x1 = (&x1 + x1.adjoint()).scale(0.5);
    let x2 = (&x2 + x2.adjoint()).scale(0.5);
    (OperatorMatrix::new(x1, a.interior), OperatorMatrix::new(x2, a.interior))
}

/// Non-Hermitian su(1,1) realization built from `u K- + v K+`.
#[derive(Clone, Debug)]
pub struct PrimedOps {
    pub k3: OperatorMatrix,
    pub plus: OperatorMatrix,
    pub minus: OperatorMatrix,
    /// `sqrt(u v)` on the principal branch, as used for every square root.
    pub sqrt_uv: C64,
}

/// Builds `K'_3 = (i/2)(u K- + v K+)/sqrt(uv)` and
/// `K'_± = i K3 ∓ (sqrt(u/v) K- - sqrt(v/u) K+)/2`.
///
/// With `w = sqrt(uv)` fixed on the principal branch, `sqrt(u/v) = u/w` and
/// `sqrt(v/u) = w/u`, so the three operators close su(1,1):
/// `[K'_3, K'_±] = ±K'_±` and `[K'_+, K'_-] = -2 K'_3`.
pub fn primed_su11_ops(u: C64, v: C64, ops: &OperatorSet) -> Result<PrimedOps> {
    if u.norm() == 0.0 {
        return Err(Error::ZeroParameter("u"));
    }
    if v.norm() == 0.0 {
        return Err(Error::ZeroParameter("v"));
    }
    let w = (u * v).sqrt();
    let s = u / w;
    let comb = ops.lower.scale(u).add(&ops.raise.scale(v));
    let k3 = comb.scale(C64::new(0.0, 0.5) / w);
    let m = ops.lower.scale(s).add(&ops.raise.scale(-c(1.0) / s));
    let ik3 = ops.cartan.scale(C64::new(0.0, 1.0));
    let plus = ik3.add(&m.scale(c(-0.5)));
    let minus = ik3.add(&m.scale(c(0.5)));
    Ok(PrimedOps { k3, plus, minus, sqrt_uv: w })
}

/// Sup norm of `[a, b] - expected` over the common interior.
pub fn commutator_residual(a: &OperatorMatrix, b: &OperatorMatrix, expected: &OperatorMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: b.dim() });
    }
    if a.dim() != expected.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), got: expected.dim() });
    }
    let comm = a.commutator(b);
    let interior = comm.interior.meet(expected.interior);
    let diff = &comm.entries - &expected.entries;
    let mut worst: f64 = 0.0;
    for i in 0..diff.nrows() {
        if !interior.contains(i) {
            continue;
        }
        for j in 0..diff.ncols() {
            if interior.contains(j) {
                worst = worst.max(diff[(i, j)].norm());
            }
        }
    }
    Ok(worst)
}
