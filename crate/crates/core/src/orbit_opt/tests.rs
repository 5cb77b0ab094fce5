use super::*;
use crate::closed_form::{gmax_pure_pure, gmax_werner_vs_pure_product, iso_extrema_vs_pure_product, SchmidtSpectrum};
use crate::fidelity::fidelity;
use crate::linalg::kron;
use crate::states::{isotropic, random_density, random_pure, werner};

fn quick() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 6,
        ..OptimizerConfig::default()
    }
}

fn reproduces(rho: &ComplexMatrix, sigma: &ComplexMatrix, rep: &OptimizationReport) {
    let tau = conjugate(&rep.local_unitary, sigma);
    let f = fidelity(rho, &tau).unwrap();
    assert!((f - rep.value).abs() < 1e-8, "{f} vs {}", rep.value);
    assert!(rep.local_unitary.unitarity_error() < 1e-10);
}

#[test]
fn identical_states_reach_one() {
    let rho = random_density(2, 2, 3, 1).unwrap();
    let rep = gmax_states(&rho, &rho, &quick()).unwrap();
    assert!((rep.value - 1.0).abs() < 1e-10);
    assert!((rep.per_restart_values[0] - 1.0).abs() < 1e-12);
    reproduces(rho.matrix(), rho.matrix(), &rep);
}

#[test]
fn pure_pairs_match_closed_form() {
    let mut r = rng::stream(11, 0);
    for (d1, d2) in [(2, 2), (2, 3), (3, 3)] {
        for _ in 0..5 {
            let a = random_pure(d1, d2, &mut r);
            let b = random_pure(d1, d2, &mut r);
            let (ra, rb) = (a.to_density(), b.to_density());
            let hi = gmax_states(&ra, &rb, &quick()).unwrap();
            let sa = SchmidtSpectrum::new(a.schmidt().reduced_spectrum()).unwrap();
            let sb = SchmidtSpectrum::new(b.schmidt().reduced_spectrum()).unwrap();
            assert!((hi.value - gmax_pure_pure(&sa, &sb)).abs() < 1e-9);
            reproduces(ra.matrix(), rb.matrix(), &hi);
            let lo = gmin_states(&ra, &rb, &quick()).unwrap();
            assert!(lo.value < 1e-6, "gmin {}", lo.value);
            reproduces(ra.matrix(), rb.matrix(), &lo);
        }
    }
}

#[test]
fn werner_vs_product() {
    for (d, t) in [(2, 1.0), (2, -0.4), (3, 0.5)] {
        let w = werner(d, t).unwrap();
        let p = crate::states::PureState::basis(d, d, 0, 0).unwrap().to_density();
        let rep = gmax_states(&w, &p, &quick()).unwrap();
        let want = gmax_werner_vs_pure_product(d, t).unwrap();
        assert!((rep.value - want).abs() < 1e-7, "d={d} t={t}: {} vs {want}", rep.value);
    }
}

#[test]
fn isotropic_vs_product() {
    let p = crate::states::PureState::basis(2, 2, 0, 0).unwrap().to_density();
    for lam in [0.0, 0.3, 0.9] {
        let iso = isotropic(2, lam).unwrap();
        let (hi, lo) = iso_extrema_vs_pure_product(2, lam).unwrap();
        let rh = gmax_states(&iso, &p, &quick()).unwrap();
        let rl = gmin_states(&iso, &p, &quick()).unwrap();
        assert!((rh.value - hi).abs() < 1e-6);
        assert!((rl.value - lo).abs() < 1e-6);
    }
}

#[test]
fn orbit_of_maximally_mixed_is_a_point() {
    let m = DensityMatrix::maximally_mixed(2, 2);
    let rep = gmin_states(&m, &m, &quick()).unwrap();
    assert!((rep.value - 1.0).abs() < 1e-12);
}

#[test]
fn sandwich_and_global_bounds() {
    for seed in 0..4 {
        let a = random_density(2, 2, 2 + seed as usize % 3, 20 + seed).unwrap();
        let b = random_density(2, 2, 4, 30 + seed).unwrap();
        let f = fidelity(a.matrix(), b.matrix()).unwrap();
        let hi = gmax_states(&a, &b, &quick()).unwrap();
        let lo = gmin_states(&a, &b, &quick()).unwrap();
        assert!(lo.value <= f + 1e-12 && f <= hi.value + 1e-12);
        let (fmax, fmin) =
            crate::closed_form::global_unitary_extrema(&a.spectrum(), &b.spectrum()).unwrap();
        assert!(hi.value <= fmax + 1e-8 && lo.value >= fmin - 1e-8);
        reproduces(a.matrix(), b.matrix(), &hi);
        reproduces(a.matrix(), b.matrix(), &lo);
        assert!(hi.commutator_norm.unwrap() >= 0.0);
    }
}

#[test]
fn deterministic_and_schedule_independent() {
    let a = random_density(2, 3, 3, 40).unwrap();
    let b = random_density(2, 3, 2, 41).unwrap();
    let par = quick();
    let seq = OptimizerConfig {
        execution: Execution::Sequential,
        ..quick()
    };
    let r1 = gmax_states(&a, &b, &par).unwrap();
    let r2 = gmax_states(&a, &b, &par).unwrap();
    let r3 = gmax_states(&a, &b, &seq).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(r1, r3);
    assert_eq!(
        serde_json::to_string(&r1).unwrap(),
        serde_json::to_string(&r3).unwrap()
    );
}

#[test]
fn more_restarts_never_hurt() {
    let a = random_density(2, 2, 2, 50).unwrap();
    let b = random_density(2, 2, 3, 51).unwrap();
    let mut last = f64::NEG_INFINITY;
    for restarts in [1, 3, 6, 10] {
        let cfg = OptimizerConfig { restarts, ..quick() };
        let v = gmax_states(&a, &b, &cfg).unwrap().value;
        assert!(v >= last);
        last = v;
    }
}

#[test]
fn config_validation() {
    let a = DensityMatrix::maximally_mixed(2, 2);
    let bad = OptimizerConfig { restarts: 0, ..quick() };
    assert!(matches!(gmax_states(&a, &a, &bad), Err(Error::BadConfig(_))));
    let bad = OptimizerConfig { grad_tol: 0.0, ..quick() };
    assert!(matches!(gmax_states(&a, &a, &bad), Err(Error::BadConfig(_))));
    let b = DensityMatrix::maximally_mixed(2, 3);
    assert!(matches!(gmax_states(&a, &b, &quick()), Err(Error::DimensionMismatch(_))));
    assert!(gmax(a.matrix(), a.matrix(), (2, 3), &quick()).is_err());
}

#[test]
fn unnormalized_inputs_are_not_rescaled() {
    let a = random_density(2, 2, 4, 60).unwrap();
    let b = random_density(2, 2, 4, 61).unwrap();
    let v = gmax_states(&a, &b, &quick()).unwrap().value;
    let scaled = gmax(a.matrix(), &b.matrix().scale(4.0), (2, 2), &quick()).unwrap().value;
    assert!((scaled - 2.0 * v).abs() < 1e-8);
}

fn random_tangent(d: usize, seed: u64) -> ComplexMatrix {
    let mut r = rng::stream(seed, 99);
    random_skew(d, &mut r)
}

fn check_gradient<O: OrbitObjective>(obj: &O, w: &LocalUnitary, seed: u64) -> f64 {
    let (d1, d2) = obj.dims();
    let o1 = random_tangent(d1, seed);
    let o2 = random_tangent(d2, seed + 1);
    let (_, g) = riemannian_gradient(obj, w).unwrap();
    let analytic = g.directional(&o1, &o2);
    let h = 1e-5;
    let fp = obj.value(&retract(w, &o1, &o2, h).unwrap()).unwrap();
    let fm = obj.value(&retract(w, &o1, &o2, -h).unwrap()).unwrap();
    let fd = (fp - fm) / (2.0 * h);
    (analytic - fd).abs() / analytic.abs().max(1e-3)
}

#[test]
fn fidelity_gradient_matches_finite_differences() {
    for (d1, d2) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        for k in 0..5u64 {
            let seed = 1000 + 10 * k + (d1 * 3 + d2) as u64 * 100;
            let a = random_density(d1, d2, d1 * d2, seed).unwrap();
            let b = random_density(d1, d2, 1 + k as usize % (d1 * d2), seed + 1).unwrap();
            let obj = FidelityObjective::new(a.matrix(), b.matrix(), (d1, d2)).unwrap();
            let w = LocalUnitary::haar(d1, d2, &mut rng::stream(seed, 3));
            let err = check_gradient(&obj, &w, seed);
            assert!(err < 1e-5, "({d1},{d2}) seed {seed}: rel err {err}");
        }
    }
}

#[test]
fn overlap_and_commutator_gradients() {
    let a = random_density(2, 3, 6, 70).unwrap();
    let b = random_density(2, 3, 3, 71).unwrap();
    let w = LocalUnitary::haar(2, 3, &mut rng::stream(72, 0));
    let o = OverlapObjective::new(a.matrix(), b.matrix(), (2, 3)).unwrap();
    assert!(check_gradient(&o, &w, 73) < 1e-6);
    let c = CommutatorObjective::new(a.matrix(), b.matrix(), (2, 3)).unwrap();
    assert!(check_gradient(&c, &w, 74) < 1e-6);
}

#[test]
fn gradient_vanishes_at_aligned_optimum() {
    let mut r = rng::stream(80, 0);
    let a = random_pure(3, 3, &mut r);
    let b = random_pure(3, 3, &mut r);
    let w = schmidt_alignment(&b, &a, false);
    let (ra, rb) = (a.to_density(), b.to_density());
    let obj = FidelityObjective::new(ra.matrix(), rb.matrix(), (3, 3)).unwrap();
    let (f, g) = riemannian_gradient(&obj, &w).unwrap();
    let sa = SchmidtSpectrum::new(a.schmidt().reduced_spectrum()).unwrap();
    let sb = SchmidtSpectrum::new(b.schmidt().reduced_spectrum()).unwrap();
    assert!((f - gmax_pure_pure(&sa, &sb)).abs() < 1e-12);
    assert!(g.norm() < 1e-8, "gradient norm {}", g.norm());
}

#[test]
fn cayley_retraction_stays_unitary() {
    let mut r = rng::stream(90, 0);
    let mut w = LocalUnitary::haar(3, 2, &mut r);
    for _ in 0..1000 {
        let o1 = random_skew(3, &mut r);
        let o2 = random_skew(2, &mut r);
        w = retract(&w, &o1, &o2, 0.3).unwrap();
    }
    assert!(w.unitarity_error() < 1e-12, "{}", w.unitarity_error());
}

#[test]
fn single_step_improves() {
    let a = random_density(2, 2, 4, 91).unwrap();
    let b = random_density(2, 2, 2, 92).unwrap();
    let w = LocalUnitary::haar(2, 2, &mut rng::stream(93, 0));
    let up = riemannian_step(a.matrix(), b.matrix(), (2, 2), &w, Mode::Maximize).unwrap();
    assert!(up.value_after >= up.value_before);
    let down = riemannian_step(a.matrix(), b.matrix(), (2, 2), &w, Mode::Minimize).unwrap();
    assert!(down.value_after <= down.value_before);
    assert!(up.gradient.norm() > 0.0);
}

#[test]
fn s1_norm_examples() {
    let cfg = quick();
    for (d, t) in [(2, -1.0), (2, 0.5), (3, -0.3), (3, 1.0)] {
        let w = werner(d, t).unwrap();
        let want = (1.0 + (-t).max(0.0)) / (d as f64 * (d as f64 - t));
        let got = s1_norm(w.matrix(), (d, d), &cfg).unwrap();
        assert!((got - want).abs() < 1e-9, "d={d} t={t}: {got} vs {want}");
    }
    let m = DensityMatrix::maximally_mixed(2, 3);
    assert!((s1_norm(m.matrix(), (2, 3), &cfg).unwrap() - 1.0 / 6.0).abs() < 1e-12);
    let omega = crate::states::max_entangled(3).unwrap().to_density();
    assert!((s1_norm(omega.matrix(), (3, 3), &cfg).unwrap() - 1.0 / 3.0).abs() < 1e-9);
    let bad = ComplexMatrix::from_fn(4, 4, |i, j| C64::new((i + 2 * j) as f64, 0.0));
    assert!(matches!(s1_norm(&bad, (2, 2), &cfg), Err(Error::NotHermitian(_))));
}

#[test]
fn s1_norm_of_indefinite_operator() {
    let z = ComplexMatrix::from_real_diag(&[1.0, -1.0]);
    let x = kron(&z, &z).scale(-2.0);
    assert!((s1_norm(&x, (2, 2), &quick()).unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn hs_overlap_examples() {
    let mut r = rng::stream(100, 0);
    let p = random_pure(2, 2, &mut r).to_density();
    let e = hs_overlap_extrema(&p, &p, &quick()).unwrap();
    assert!((e.max - 1.0).abs() < 1e-9);
    let p00 = crate::states::PureState::basis(2, 2, 0, 0).unwrap().to_density();
    let p11 = crate::states::PureState::basis(2, 2, 1, 1).unwrap().to_density();
    let e = hs_overlap_extrema(&p00, &p11, &quick()).unwrap();
    assert!(e.min.abs() < 1e-9);

    let a = random_density(2, 2, 4, 101).unwrap();
    let b = random_density(2, 2, 4, 102).unwrap();
    let e = hs_overlap_extrema(&a, &b, &quick()).unwrap();
    // direct minimization agrees with the complement route
    let obj = OverlapObjective::new(a.matrix(), b.matrix(), (2, 2)).unwrap();
    let direct = optimize(&obj, &OptimizerConfig { mode: Mode::Minimize, ..quick() }, &[]).unwrap();
    assert!((direct.value - e.min).abs() < 1e-7);
    // the overlap is dominated by the fidelity of the squares
    let a2 = a.matrix().matmul(a.matrix());
    let b2 = b.matrix().matmul(b.matrix());
    let g = gmax_with_starts(&a2, &b2, (2, 2), &quick(), std::slice::from_ref(&e.max_witness)).unwrap();
    assert!(e.max <= g.value + 1e-8);
}

#[test]
fn commutator_examples() {
    let a = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.4, 0.3, 0.2, 0.1]), 2, 2).unwrap();
    let b = DensityMatrix::new(ComplexMatrix::from_real_diag(&[0.1, 0.2, 0.3, 0.4]), 2, 2).unwrap();
    let rep = commutator_min(&a, &b, &quick()).unwrap();
    assert_eq!(rep.value, 0.0);
    assert_eq!(rep.best_restart, 0);

    let w = LocalUnitary::haar(2, 2, &mut rng::stream(110, 0));
    let planted = b.conjugate_local(&w);
    let rep = commutator_min(&a, &planted, &quick()).unwrap();
    assert!(rep.value < 1e-6, "{}", rep.value);
}
