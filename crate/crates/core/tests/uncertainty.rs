use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::Rng;

use uncstates_core::fock::{DensityMatrix, FockVector};
use uncstates_core::random::{
    random_frame, random_hermitian, random_in_disk, random_mixed, random_pure, rng_from_seed,
};
use uncstates_core::reps::{build_rep, OperatorMatrix, OperatorSet, RepKind, RepSpec};
use uncstates_core::states::{bg_cs, canonical_cs, displaced_squeezed, ladder_ous, OusParams, SqueezeFrame};
use uncstates_core::uncertainty::*;
use uncstates_core::{Error, C64};

type Poly = Vec<f64>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &Poly, b: &Poly, sign: f64) -> Poly {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += sign * y;
    }
    out
}

/// Laplace expansion along the first row, entries polynomial in lambda.
fn poly_det(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 1 {
        return m[0][0].clone();
    }
    let mut acc = vec![0.0];
    for col in 0..n {
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|(j, _)| *j != col).map(|(_, p)| p.clone()).collect())
            .collect();
        let term = poly_mul(&m[0][col], &poly_det(&minor));
        acc = poly_add(&acc, &term, if col % 2 == 0 { 1.0 } else { -1.0 });
    }
    acc
}

/// Coefficients `C_r` read off `det(M + lambda I) = sum_r C_r lambda^{n-r}`.
fn cofactor_char_coeffs(m: &RMat) -> Vec<f64> {
    let n = m.nrows();
    let entries: Vec<Vec<Poly>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { vec![m[(i, j)], 1.0] } else { vec![m[(i, j)]] }).collect()).collect();
    let p = poly_det(&entries);
    (0..=n).map(|r| p.get(n - r).copied().unwrap_or(0.0)).collect()
}

fn heis(dim: usize) -> OperatorSet {
    build_rep(&RepSpec::heisenberg(dim)).unwrap()
}

fn qp(ops: &OperatorSet) -> [&OperatorMatrix; 2] {
    [ops.position.as_ref().unwrap(), ops.momentum.as_ref().unwrap()]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn char_coeffs_match_cofactor_expansion() {
    let mut rng = rng_from_seed(3);
    for n in 1..=6 {
        for _ in 0..20 {
            let m = RMat::from_fn(n, n, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let ours = char_coeffs(&m).unwrap();
            let oracle = cofactor_char_coeffs(&m);
            let scale = m.amax().max(1.0).powi(4);
            for (a, b) in ours.iter().zip(&oracle) {
                assert!((a - b).abs() <= 1e-10 * scale, "n = {n}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn char_coeffs_examples() {
    let d = RMat::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]));
    assert_eq!(char_coeffs(&d).unwrap(), vec![1.0, 6.0, 11.0, 6.0]);
    let a = RMat::from_row_slice(3, 3, &[0.0, 1.2, -0.4, -1.2, 0.0, 2.5, 0.4, -2.5, 0.0]);
    assert!(char_coeffs(&a).unwrap()[3].abs() < 1e-15);
    assert!(matches!(char_coeffs(&RMat::zeros(9, 9)), Err(Error::TooLarge(9))));
}

#[test]
fn moment_examples() {
    let ops = heis(32);
    let vac = FockVector::basis(ops.spec, 0);
    let ms = moments(&vac, &qp(&ops)).unwrap();
    assert!(close(ms.sigma.determinant(), 0.25, 1e-15) && close(ms.cmat.determinant(), 0.25, 1e-15));

    let rho = DensityMatrix::mixture(&[(0.5, &vac), (0.5, &FockVector::basis(ops.spec, 1))]).unwrap();
    let ms = moments(&rho, &qp(&ops)).unwrap();
    assert!(
        close(ms.sigma[(0, 0)], 1.0, 1e-14) && close(ms.sigma[(1, 1)], 1.0, 1e-14) && ms.sigma[(0, 1)].abs() < 1e-15
    );

    for k in [0.5, 1.0, 2.5] {
        let su = build_rep(&RepSpec::su11(k, 32)).unwrap();
        let low = FockVector::basis(su.spec, 0);
        let ms = moments(&low, &[&su.x1, &su.x2, &su.cartan]).unwrap();
        let expected = [k / 2.0, k / 2.0, 0.0];
        for (i, e) in expected.into_iter().enumerate() {
            assert!(close(ms.sigma[(i, i)], e, 1e-14));
        }
    }
}

#[test]
fn slack_examples() {
    let su = build_rep(&RepSpec::su11(1.0, 32)).unwrap();
    let low = FockVector::basis(su.spec, 0);
    let report =
        UncertaintyReport::new(&moments(&low, &[&su.x1, &su.x2, &su.cartan]).unwrap(), &[2], EQUALITY_TOL).unwrap();
    let o = report.order(2).unwrap();
    assert!(close(o.lhs, 0.25, 1e-14) && close(o.rhs, 0.25, 1e-14) && o.equal);

    let ops = heis(64);
    let one = FockVector::basis(ops.spec, 1);
    let ms = moments(&one, &qp(&ops)).unwrap();
    assert!(close(schrodinger_slack(&ms, 0, 1).unwrap(), 2.0, 1e-13));
    assert!(close(cur_slack(&ms, 1).unwrap(), ms.sigma.trace(), 1e-15));

    let psi = displaced_squeezed(C64::new(0.4, -0.3), SqueezeFrame::real(0.6, 0.9), 64).unwrap();
    assert!(schrodinger_slack(&moments(&psi, &qp(&ops)).unwrap(), 0, 1).unwrap().abs() <= 1e-10);

    let bg = bg_cs(C64::new(1.0, 0.0), 0.5, 64).unwrap();
    let su = build_rep(&bg.rep).unwrap();
    assert!(cur_slack(&moments(&bg, &[&su.x1, &su.x2, &su.cartan]).unwrap(), 2).unwrap() > 1e-3);
}

#[test]
fn transform_preserves_equality_and_scales_determinant() {
    let ops = heis(64);
    let mut rng = rng_from_seed(9);
    let psi = displaced_squeezed(C64::new(0.2, 0.5), SqueezeFrame::real(0.4, -0.7), 64).unwrap();
    let ms = moments(&psi, &qp(&ops)).unwrap();
    let same = transform_covariances(&ms, &RMat::identity(2, 2)).unwrap();
    assert_eq!(same.sigma, ms.sigma);
    for _ in 0..20 {
        let lambda = RMat::from_fn(2, 2, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        let det = lambda.determinant();
        if det.abs() < 0.05 {
            continue;
        }
        let t = transform_covariances(&ms, &lambda).unwrap();
        assert!(close(t.sigma.determinant(), det * det * ms.sigma.determinant(), 1e-12));
        assert!(robertson_slack(&t).unwrap().abs() <= 1e-10);
    }
    let singular = RMat::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]);
    assert!(matches!(transform_covariances(&ms, &singular), Err(Error::SingularTransform)));
}

#[test]
fn predicted_moment_examples() {
    let c12 = 0.37;
    let p = ous_predicted_moments(C64::new(1.0, 0.0), C64::new(0.0, 0.0), c12).unwrap();
    assert!(close(p.s11, c12, 1e-15) && close(p.s22, c12, 1e-15) && p.s12.abs() < 1e-15);
    let r = 0.8f64;
    let p = ous_predicted_moments(C64::new(r.cosh(), 0.0), C64::new(r.sinh(), 0.0), c12).unwrap();
    assert!(
        close(p.s11, (-2.0 * r).exp() * c12, 1e-14)
            && close(p.s22, (2.0 * r).exp() * c12, 1e-13)
            && p.s12.abs() < 1e-15
    );
    assert!(matches!(ous_predicted_moments(C64::new(1.0, 0.0), C64::new(0.0, 1.0), c12), Err(Error::DegenerateFrame)));

    // N = 1, U = 1, V = 0 by hand: sigma = diag(1/4, 1/4)
    let one = DMatrix::from_element(1, 1, C64::new(1.0, 0.0));
    let zero = DMatrix::from_element(1, 1, C64::new(0.0, 0.0));
    let ct = DMatrix::from_element(1, 1, C64::new(0.5, 0.0));
    let sigma = multimode_predicted_sigma(&one, &zero, &ct).unwrap();
    assert!((sigma - RMat::identity(2, 2) * 0.25).amax() < 1e-15);
}

#[test]
fn eq26_against_ladder_states() {
    let mut rng = rng_from_seed(26);
    let su = build_rep(&RepSpec::su11(1.0, 128)).unwrap();
    for _ in 0..10 {
        let frame = random_frame(&mut rng, 0.6);
        let z = random_in_disk(&mut rng, 1.0);
        let psi = ladder_ous(&su.x1, &su.x2, &OusParams::new(frame.u, frame.v, z), su.spec).unwrap();
        let ms = moments(&psi, &[&su.x1, &su.x2]).unwrap();
        let p = ous_predicted_moments(frame.u, frame.v, -ms.cmat[(0, 1)]).unwrap();
        assert!(
            close(p.s11, ms.sigma[(0, 0)], 1e-8)
                && close(p.s22, ms.sigma[(1, 1)], 1e-8)
                && close(p.s12, ms.sigma[(0, 1)], 1e-8)
        );
        assert!(schrodinger_slack(&ms, 0, 1).unwrap().abs() <= 1e-8);
    }
}

#[test]
fn extended_and_two_state_examples() {
    let ops = heis(64);
    let [q, p] = qp(&ops);
    let vac = FockVector::basis(ops.spec, 0);
    let one = FockVector::basis(ops.spec, 1);
    let m_vac = moments(&vac, &[q, p]).unwrap();
    let m_one = moments(&one, &[q, p]).unwrap();
    assert!(close(extended_cur_slack(&[(m_one.clone(), 1.0)], 2).unwrap(), cur_slack(&m_one, 2).unwrap(), 1e-15));
    assert!(close(extended_cur_slack(&[(m_vac.clone(), 1.0), (m_one, 1.0)], 2).unwrap(), 3.0, 1e-13));
    let a = moments(&canonical_cs(C64::new(0.5, 0.2), 64).unwrap(), &[q, p]).unwrap();
    let b = moments(&canonical_cs(C64::new(-0.3, 0.7), 64).unwrap(), &[q, p]).unwrap();
    assert!(extended_cur_slack(&[(a, 1.0), (b, 1.0)], 2).unwrap().abs() < 1e-12);
    assert!(matches!(extended_cur_slack(&[], 2), Err(Error::EmptyInput(_))));

    assert!(close(two_state_schrodinger_slack(&vac, &one, q, p).unwrap(), 0.5, 1e-13));
    let psi = displaced_squeezed(C64::new(0.3, 0.1), SqueezeFrame::real(0.5, 1.3), 64).unwrap();
    assert!(close(
        two_state_schrodinger_slack(&psi, &psi, q, p).unwrap(),
        schrodinger_slack(&moments(&psi, &[q, p]).unwrap(), 0, 1).unwrap(),
        1e-14
    ));
}

#[test]
fn eq42_forms() {
    let ops = heis(64);
    let q = ops.position.as_ref().unwrap();
    let vac = FockVector::basis(ops.spec, 0);
    let one = FockVector::basis(ops.spec, 1);
    for form in [Eq42Form::AsPrinted, Eq42Form::SchwarzForm] {
        assert!(one_obs_two_state_slack(&vac, &vac, q, form).unwrap().abs() < 1e-14);
    }
    assert!(close(one_obs_two_state_slack(&vac, &one, q, Eq42Form::AsPrinted).unwrap(), 0.75, 1e-13));
    let cs = canonical_cs(C64::new(1.0, 0.0), 64).unwrap();
    assert!(close(one_obs_two_state_slack(&cs, &cs, q, Eq42Form::AsPrinted).unwrap(), -4.0, 1e-11));
    assert!(one_obs_two_state_slack(&cs, &cs, q, Eq42Form::SchwarzForm).unwrap().abs() < 1e-11);
}

#[test]
fn psd_and_sheaf_examples() {
    let ops = heis(32);
    let ms = moments(&FockVector::basis(ops.spec, 0), &qp(&ops)).unwrap();
    assert!(psd_check(&ms).abs() < 1e-15);
    let roots = sheaf_spectrum(&ms.sigma, &ms.cmat).unwrap();
    assert!(close(roots[0], -1.0, 1e-14) && close(roots[1], 1.0, 1e-14));
    let ms = moments(&FockVector::basis(ops.spec, 1), &qp(&ops)).unwrap();
    assert!(close(psd_check(&ms), 1.0, 1e-13));
}

/// `det(iC - lambda sigma) = 0` with roots `±lambda_mu` gives
/// `det C / det sigma = prod_mu lambda_mu^2`.
#[test]
fn sheaf_determinant_identity() {
    let mut rng = rng_from_seed(41);
    for trial in 0..200 {
        let n = if trial % 2 == 0 { 2 } else { 4 };
        let dim = 6;
        let rep = RepSpec::new(RepKind::Su2 { j: 2.5 }, 0).unwrap();
        let ops: Vec<OperatorMatrix> = (0..n).map(|_| random_hermitian(&mut rng, dim)).collect();
        let refs: Vec<&OperatorMatrix> = ops.iter().collect();
        let rho = random_mixed(&mut rng, rep, 3, None).unwrap();
        let ms = moments(&rho, &refs).unwrap();
        let roots = sheaf_spectrum(&ms.sigma, &ms.cmat).unwrap();
        let factored = sheaf_spectrum_factored(&gram_factor(&rho, &refs).unwrap()).unwrap();
        let positive: f64 = roots[n / 2..].iter().map(|l| l * l).product();
        let ratio = ms.cmat.determinant() / ms.sigma.determinant();
        assert!((ratio - positive).abs() <= 1e-9 * ratio.abs().max(1.0), "{ratio} vs {positive}");
        for a in 0..n {
            assert!((roots[a] + roots[n - 1 - a]).abs() <= 1e-9);
            assert!((roots[a] - factored[a]).abs() <= 1e-9);
        }
    }
}

/// Equality of the Schrodinger relation coincides with the eigenvalue
/// equation: ladder eigenstates saturate it, Fock states and generic
/// superpositions do not.
#[test]
fn argmin_structure() {
    let su = build_rep(&RepSpec::su11(1.0, 96)).unwrap();
    let eq = ladder_ous(
        &su.x1,
        &su.x2,
        &OusParams::new(C64::new(2.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        su.spec,
    )
    .unwrap();
    assert!(schrodinger_slack(&moments(&eq, &[&su.x1, &su.x2]).unwrap(), 0, 1).unwrap().abs() <= 1e-8);
    let ops = heis(64);
    for n in 1..5 {
        let ms = moments(&FockVector::basis(ops.spec, n), &qp(&ops)).unwrap();
        assert!(schrodinger_slack(&ms, 0, 1).unwrap() > 1e-3);
    }
    let mut rng = rng_from_seed(5);
    for _ in 0..20 {
        let psi = random_pure(&mut rng, ops.spec, Some(12)).unwrap();
        assert!(schrodinger_slack(&moments(&psi, &qp(&ops)).unwrap(), 0, 1).unwrap() > 1e-8);
    }
}

fn random_tuple_state(seed: u64, n: usize, dim: usize, mixed: bool) -> MomentSet {
    let mut rng = rng_from_seed(seed);
    let rep = RepSpec::new(RepKind::Su2 { j: (dim - 1) as f64 / 2.0 }, 0).unwrap();
    let ops: Vec<OperatorMatrix> = (0..n).map(|_| random_hermitian(&mut rng, dim)).collect();
    let refs: Vec<&OperatorMatrix> = ops.iter().collect();
    if mixed {
        moments(&random_mixed(&mut rng, rep, 2, None).unwrap(), &refs).unwrap()
    } else {
        moments(&random_pure(&mut rng, rep, None).unwrap(), &refs).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn robertson_hierarchy_holds(seed in any::<u64>(), n in 2usize..=5, dim in 2usize..=7, mixed in any::<bool>()) {
        let ms = random_tuple_state(seed, n, dim, mixed);
        prop_assert!(psd_check(&ms) >= -1e-10);
        let cs = char_coeffs(&ms.sigma).unwrap();
        let cc = char_coeffs(&ms.cmat).unwrap();
        let scale = ms.sigma.amax().max(1.0);
        for r in 1..=n {
            prop_assert!((cs[r] - cc[r]) / scale.powi(r as i32) >= -1e-10);
        }
        prop_assert!(UncertaintyReport::new(&ms, &(1..=n).collect::<Vec<_>>(), EQUALITY_TOL).unwrap().holds());
    }

    #[test]
    fn two_state_relation_holds(seed in any::<u64>()) {
        let mut rng = rng_from_seed(seed);
        let ops = heis(40);
        let [q, p] = qp(&ops);
        let a = random_pure(&mut rng, ops.spec, Some(16)).unwrap();
        let b = random_pure(&mut rng, ops.spec, Some(16)).unwrap();
        prop_assert!(two_state_schrodinger_slack(&a, &b, q, p).unwrap() >= -1e-10);
        prop_assert!(one_obs_two_state_slack(&a, &b, q, Eq42Form::SchwarzForm).unwrap() >= -1e-10);
    }

    #[test]
    fn transform_keeps_robertson_sign(seed in any::<u64>(), n in 2usize..=4) {
        let ms = random_tuple_state(seed, n, 6, true);
        let mut rng = rng_from_seed(seed ^ 0x5eed);
        let lambda = RMat::from_fn(n, n, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        prop_assume!(lambda.determinant().abs() > 0.05);
        let t = transform_covariances(&ms, &lambda).unwrap();
        let before = robertson_slack(&ms).unwrap();
        let after = robertson_slack(&t).unwrap();
        let det2 = lambda.determinant().powi(2);
        prop_assert!((after - det2 * before).abs() <= 1e-9 * (1.0 + det2 * ms.sigma.determinant().abs()));
    }
}
