//! Seedable generators of random states, observables and frames for the
//! randomized suites. Every generator takes the RNG explicitly.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::Result;
use crate::fock::{DensityMatrix, FockVector};
use crate::linalg::{CMat, CVec};
use crate::reps::{Interior, OperatorMatrix, RepSpec};
use crate::states::SqueezeFrame;

pub type SuiteRng = ChaCha8Rng;

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 20_011_997;

pub fn rng_from_seed(seed: u64) -> SuiteRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `index` of `seed`, so trial `i` draws the same
/// numbers whichever thread runs it.
pub fn rng_for(seed: u64, index: u64) -> SuiteRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn gauss(rng: &mut impl Rng) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Haar-like random vector supported on the first `support` basis states
/// (all of them for exact representations, all but the top four slots for
/// truncated ones, so the tail guard holds exactly).
pub fn random_pure(rng: &mut impl Rng, rep: RepSpec, support: Option<usize>) -> Result<FockVector> {
    let dim = rep.dim();
    let default = if rep.is_truncated() { dim.saturating_sub(4).max(1) } else { dim };
    let support = support.unwrap_or(default).min(dim).max(1);
    let coeffs = CVec::from_fn(dim, |i, _| if i < support { gauss(rng) } else { C64::new(0.0, 0.0) });
    FockVector::new(rep, coeffs)?.normalized()
}

/// Mixture of `rank` random pure states with uniform random weights.
pub fn random_mixed(rng: &mut impl Rng, rep: RepSpec, rank: usize, support: Option<usize>) -> Result<DensityMatrix> {
    let states = (0..rank.max(1)).map(|_| random_pure(rng, rep, support)).collect::<Result<Vec<_>>>()?;
    let weights: Vec<f64> = states.iter().map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let parts: Vec<(f64, &FockVector)> = weights.iter().map(|w| w / total).zip(&states).collect();
    DensityMatrix::mixture(&parts)
}

/// Dense random Hermitian matrix `(G + G^dagger)/2` with Gaussian `G`.
pub fn random_hermitian(rng: &mut impl Rng, dim: usize) -> OperatorMatrix {
    let g: CMat = DMatrix::from_fn(dim, dim, |_, _| gauss(rng));
    OperatorMatrix::new((&g + g.adjoint()).scale(0.5), Interior::Full)
}

/// `u = e^{i a} cosh r`, `v = e^{i b} sinh r` with `r` uniform in `[0, r_max)`.
pub fn random_frame(rng: &mut impl Rng, r_max: f64) -> SqueezeFrame {
    let r = rng.random::<f64>() * r_max;
    let a = rng.random::<f64>() * std::f64::consts::TAU;
    let b = rng.random::<f64>() * std::f64::consts::TAU;
    SqueezeFrame { u: C64::from_polar(r.cosh(), a), v: C64::from_polar(r.sinh(), b) }
}

/// Uniform point of the disk `|z| < radius`.
pub fn random_in_disk(rng: &mut impl Rng, radius: f64) -> C64 {
    let r = radius * rng.random::<f64>().sqrt();
    C64::from_polar(r, rng.random::<f64>() * std::f64::consts::TAU)
}
