//! Dense complex matrix helpers: exponential, logarithm, norms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Induced 1-norm (max column sum).
pub fn norm1(m: &CMat) -> f64 {
    m.column_iter().map(|col| col.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of `m - m^dagger`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with the [13/13] Padé
/// approximant.
pub fn expm(a: &CMat) -> CMat {
    assert!(a.is_square(), "expm: matrix must be square");
    let n = a.nrows();
    if n == 0 {
        return a.clone();
    }
    let norm = norm1(a);
    let s = if norm > THETA13 { (norm / THETA13).log2().ceil() as i32 } else { 0 };
    let a = a.scale(0.5f64.powi(s));
    let ident = CMat::identity(n, n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;
    let u_inner = &a6 * (a6.scale(b[13]) + a4.scale(b[11]) + a2.scale(b[9]))
        + a6.scale(b[7])
        + a4.scale(b[5])
        + a2.scale(b[3])
        + ident.scale(b[1]);
    let u = &a * u_inner;
    let v = &a6 * (a6.scale(b[12]) + a4.scale(b[10]) + a2.scale(b[8]))
        + a6.scale(b[6])
        + a4.scale(b[4])
        + a2.scale(b[2])
        + ident.scale(b[0]);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("expm: singular Padé denominator");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Principal square root by the Denman-Beavers iteration.
fn sqrtm(m: &CMat) -> Option<CMat> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = CMat::identity(n, n);
    for _ in 0..100 {
        let yi = y.clone().try_inverse()?;
        let zi = z.clone().try_inverse()?;
        let y_next = (&y + zi).scale(0.5);
        let z_next = (&z + yi).scale(0.5);
        let delta = max_abs(&(&y_next - &y));
        y = y_next;
        z = z_next;
        if delta <= 1e-15 * max_abs(&y) {
            return Some(y);
        }
    }
    Some(y)
}

/// Principal matrix logarithm by inverse scaling and squaring.
pub fn logm(m: &CMat) -> Option<CMat> {
    let n = m.nrows();
    let ident = CMat::identity(n, n);
    let mut x = m.clone();
    let mut k = 0;
    while norm1(&(&x - &ident)) > 0.05 {
        x = sqrtm(&x)?;
        k += 1;
        if k > 60 {
            return None;
        }
    }
    let d = &x - &ident;
    let mut power = d.clone();
    let mut out = CMat::zeros(n, n);
    for j in 1..60 {
        let term = power.scale(if j % 2 == 1 { 1.0 } else { -1.0 } / j as f64);
        let small = max_abs(&term) < 1e-18;
        out += term;
        if small {
            break;
        }
        power = &power * &d;
    }
    Some(out.scale(2f64.powi(k)))
}

/// Makes the first entry with modulus above `1e-300` real and positive.
pub fn fix_global_phase(v: &mut CVec) {
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-300).copied() {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Compressed-row sparse matrix for repeated matrix-vector products.
#[derive(Clone, Debug)]
pub struct SparseMat {
    n: usize,
    row_start: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
}

impl SparseMat {
    pub fn from_dense(m: &CMat) -> Self {
        assert!(m.is_square());
        let n = m.nrows();
        let mut row_start = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            row_start.push(cols.len());
            for j in 0..n {
                let z = m[(i, j)];
                if z != C64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(z);
                }
            }
        }
        row_start.push(cols.len());
        SparseMat { n, row_start, cols, vals }
    }

    /// Builds from `(row, col, value)` entries, summing duplicates.
    pub fn from_triplets(n: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut row_start = vec![0; n + 1];
        let mut cols: Vec<usize> = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, col, v) in triplets {
            if last == Some((r, col)) {
                *vals.last_mut().expect("previous entry") += v;
                continue;
            }
            last = Some((r, col));
            cols.push(col);
            vals.push(v);
            row_start[r + 1] += 1;
        }
        for i in 0..n {
            row_start[i + 1] += row_start[i];
        }
        SparseMat { n, row_start, cols, vals }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn mul_vec(&self, v: &CVec) -> CVec {
        let mut out = CVec::zeros(self.n);
        for i in 0..self.n {
            let mut acc = C64::new(0.0, 0.0);
            for k in self.row_start[i]..self.row_start[i + 1] {
                acc += self.vals[k] * v[self.cols[k]];
            }
            out[i] = acc;
        }
        out
    }

    /// Induced 1-norm.
    pub fn norm1(&self) -> f64 {
        let mut col = vec![0.0; self.n];
        for (k, &j) in self.cols.iter().enumerate() {
            col[j] += self.vals[k].norm();
        }
        col.into_iter().fold(0.0, f64::max)
    }
}

/// `exp(t A) v` by a truncated Taylor series on `s` substeps with
/// `|t| ||A||_1 / s <= 1`.
pub fn expm_action(a: &SparseMat, t: C64, v: &CVec) -> CVec {
    let norm = a.norm1() * t.norm();
    let steps = norm.ceil().max(1.0) as usize;
    let h = t / steps as f64;
    let mut out = v.clone();
    for _ in 0..steps {
        let mut term = out.clone();
        let mut acc = out.clone();
        for j in 1..80 {
            term = a.mul_vec(&term) * (h / j as f64);
            acc += &term;
            if term.norm() <= 1e-17 * acc.norm() {
                break;
            }
        }
        out = acc;
    }
    out
}
