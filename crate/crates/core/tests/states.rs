use uncstates_core::reps::*;
use uncstates_core::states::*;
use uncstates_core::C64;

fn cx(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn sup(a: &OperatorMatrix, b: &OperatorMatrix) -> f64 {
    (&a.entries - &b.entries).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn all_reps() -> Vec<RepSpec> {
    [
        RepKind::Heisenberg,
        RepKind::Su11Discrete { k: 0.75 },
        RepKind::Su11OneMode { parity: Parity::Odd },
        RepKind::Su2 { j: 1.5 },
        RepKind::QBoson { q: 0.8 },
        RepKind::Suq11 { k: 1.0, q: 1.3 },
        RepKind::Suq2 { j: 2.0, q: 0.7 },
    ]
    .into_iter()
    .map(|kind| RepSpec::new(kind, 24).unwrap())
    .collect()
}

#[test]
fn ladder_pairs_and_components() {
    let i = cx(0.0, 1.0);
    for spec in all_reps() {
        let ops = build_rep(&spec).unwrap();
        assert_eq!(sup(&ops.raise, &ops.lower.adjoint()), 0.0, "{spec:?}");
        let back = ops.x1.add(&ops.x2.scale(-i));
        assert!(sup(&back, &ops.lower) < 1e-15, "{spec:?}");
        assert!(sup(&ops.x1, &ops.x1.adjoint()) < 1e-15 && sup(&ops.x2, &ops.x2.adjoint()) < 1e-15);
    }
}

#[test]
fn algebra_relations() {
    let su2 = build_rep(&RepSpec::su2(1.5)).unwrap();
    let two_j3 = su2.cartan.scale(cx(2.0, 0.0));
    assert!(commutator_residual(&su2.raise, &su2.lower, &two_j3).unwrap() < 1e-14);
    assert!(commutator_residual(&su2.cartan, &su2.raise, &su2.raise).unwrap() < 1e-14);

    let su11 = build_rep(&RepSpec::su11(0.75, 32)).unwrap();
    let two_k3 = su11.cartan.scale(cx(2.0, 0.0));
    assert!(commutator_residual(&su11.lower, &su11.raise, &two_k3).unwrap() < 1e-12);

    let h = build_rep(&RepSpec::heisenberg(32)).unwrap();
    let (q, p) = (h.position.as_ref().unwrap(), h.momentum.as_ref().unwrap());
    let i1 = OperatorMatrix::identity(32, q.interior).scale(cx(0.0, 1.0));
    assert!(commutator_residual(q, p, &i1).unwrap() < 1e-12);
}

#[test]
fn primed_operators_close_su11() {
    let ops = build_rep(&RepSpec::su11(1.0, 40)).unwrap();
    for (u, v) in [(cx(2.0, 0.0), cx(1.0, 0.0)), (cx(1.2, 0.5), cx(-0.3, 0.8))] {
        let p = primed_su11_ops(u, v, &ops).unwrap();
        assert!(commutator_residual(&p.k3, &p.plus, &p.plus).unwrap() < 1e-10);
        assert!(commutator_residual(&p.k3, &p.minus, &p.minus.scale(cx(-1.0, 0.0))).unwrap() < 1e-10);
        assert!(commutator_residual(&p.plus, &p.minus, &p.k3.scale(cx(-2.0, 0.0))).unwrap() < 1e-10);
    }
    let p = primed_su11_ops(cx(1.0, 0.0), cx(1.0, 0.0), &ops).unwrap();
    assert!(sup(&p.k3, &ops.x1.scale(cx(0.0, 1.0))) < 1e-15);
}

#[test]
fn perelomov_state_solves_the_ladder_equation() {
    // c_{n+1}/c_n = xi sqrt((2k+n)/(n+1)) turns K- - xi^2 K+ into 2k xi
    let (xi, k, dim) = (cx(0.3, -0.4), 1.5, 80);
    let spec = RepSpec::su11(k, dim);
    let ops = build_rep(&spec).unwrap();
    let params = OusParams::new(cx(1.0, 0.0), -xi * xi, 2.0 * k * xi);
    let via_ladder = ladder_ous(&ops.x1, &ops.x2, &params, spec).unwrap();
    let cs = su11_cs(xi, k, dim).unwrap();
    assert!(cs.fidelity(&via_ladder).unwrap() > 1.0 - 1e-12);
}

#[test]
fn three_routes_to_the_su11_optimal_state() {
    let (u, v, z, k, dim) = (cx(1.5, 0.0), cx(0.2, 0.4), cx(0.7, -0.3), 1.0, 80);
    let spec = RepSpec::su11(k, dim);
    let ops = build_rep(&spec).unwrap();
    let params = OusParams::new(u, v, z);
    let ladder = ladder_ous(&ops.x1, &ops.x2, &params, spec).unwrap();
    let deformed = suq11_ous(&params, 1.0, k, dim).unwrap();
    let analytic = su11_analytic_ous(z, u, v, k, dim).unwrap();
    assert!(ladder.fidelity(&deformed).unwrap() > 1.0 - 1e-12);
    assert!(ladder.fidelity(&analytic.state).unwrap() > 1.0 - 1e-10);
    assert!(!analytic.branch.condition_a);
    let m = ous_combination(&ops.x1, &ops.x2, &params);
    assert!(eigen_residual(&m, z, &analytic.state) < 1e-10);
}

#[test]
fn undeformed_limits() {
    let alpha = cx(0.8, 0.5);
    let cs = canonical_cs(alpha, 48).unwrap();
    let qcs = q_cs(alpha, 1.0, 48).unwrap();
    assert!((cs.coeffs.clone() - qcs.coeffs.clone()).norm() < 1e-14);
    let frame = SqueezeFrame::real(0.4, 0.3);
    let a = displaced_squeezed(alpha, frame, 64).unwrap();
    let b = displaced_squeezed_via_operator(alpha, frame, 64).unwrap();
    assert!(a.fidelity(&b).unwrap() > 1.0 - 1e-8);
}

#[test]
fn multimode_product_and_squeeze() {
    let (a0, a1, per) = (cx(0.3, 0.1), cx(-0.2, 0.4), 12);
    let prod = multimode_ss(&[a0, a1], &BogoliubovPair::identity(2), per).unwrap();
    let (c0, c1) = (canonical_cs(a0, per).unwrap(), canonical_cs(a1, per).unwrap());
    let overlap: C64 = (0..per * per).map(|i| (c0.coeffs[i / per] * c1.coeffs[i % per]).conj() * prod.coeffs[i]).sum();
    assert!(overlap.norm() > 1.0 - 1e-10);

    let pair = BogoliubovPair::two_mode_squeeze(0.3);
    let alphas = [cx(0.1, 0.0), cx(0.0, -0.1)];
    let state = multimode_ss(&alphas, &pair, 16).unwrap();
    for r in multimode_eigen_residuals(&state, &pair, &alphas).unwrap() {
        assert!(r < 1e-8);
    }
}
