mod common;

use lufid::bounds;
use lufid::fidelity::{affine_fidelity, fidelity, fidelity_nested, KrausChannel};
use lufid::linalg::{partial_trace, psd_eig, Subsystem};
use lufid::orbit_opt::{self, cayley, conjugate};
use lufid::probes::bipartite_tensor_power;
use lufid::rng::stream;
use lufid::sdp;
use lufid::states::{haar_unitary, random_density, StateJson};
use lufid::{ComplexMatrix, DensityMatrix, LocalUnitary, OptimizerConfig};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

fn dims() -> impl Strategy<Value = (usize, usize)> {
    prop_oneof![Just((2, 2)), Just((2, 3)), Just((3, 2)), Just((3, 3))]
}

fn state(d1: usize, d2: usize, rank_seed: u64, seed: u64) -> DensityMatrix {
    let n = d1 * d2;
    random_density(d1, d2, 1 + (rank_seed as usize) % n, seed).unwrap()
}

// fixed seed so the suite runs the same cases every time
fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, rng_seed: RngSeed::Fixed(20), failure_persistence: None, ..ProptestConfig::default() }
}

fn quick() -> OptimizerConfig {
    OptimizerConfig { restarts: 8, ..OptimizerConfig::default() }
}

proptest! {
    #![proptest_config(cases(48))]

    #[test]
    fn fidelity_is_symmetric_bounded_and_unitarily_invariant(
        (d1, d2) in dims(), r1 in 0u64..9, r2 in 0u64..9, seed in 0u64..1_000_000,
    ) {
        let a = state(d1, d2, r1, seed);
        let b = state(d1, d2, r2, seed + 1);
        let f = fidelity(a.matrix(), b.matrix()).unwrap();
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&f));
        prop_assert!((f - fidelity(b.matrix(), a.matrix()).unwrap()).abs() < 1e-9);
        prop_assert!((f - fidelity_nested(a.matrix(), b.matrix()).unwrap()).abs() < 1e-9);
        prop_assert!(affine_fidelity(a.matrix(), b.matrix()).unwrap() <= f + 1e-9);
        let u = haar_unitary(d1 * d2, seed + 2);
        let rot = |m: &ComplexMatrix| u.matmul(m).matmul(&u.adjoint()).hermitian_part();
        let g = fidelity(&rot(a.matrix()), &rot(b.matrix())).unwrap();
        prop_assert!((f - g).abs() < 1e-9);
    }

    #[test]
    fn channels_preserve_trace_and_do_not_decrease_fidelity(
        d in 2usize..5, ops in 1usize..4, seed in 0u64..1_000_000,
    ) {
        let ch = KrausChannel::random(d, ops, seed).unwrap();
        let a = random_density(1, d, d, seed + 1).unwrap();
        let b = random_density(1, d, 1, seed + 2).unwrap();
        let out = ch.apply(a.matrix()).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-12);
        let before = fidelity(a.matrix(), b.matrix()).unwrap();
        let after = fidelity(&out, &ch.apply(b.matrix()).unwrap()).unwrap();
        prop_assert!(after >= before - 1e-9);
    }

    #[test]
    fn state_json_round_trips_exactly((d1, d2) in dims(), r in 0u64..9, seed in 0u64..1_000_000) {
        let a = state(d1, d2, r, seed);
        let text = serde_json::to_string(&a.to_json()).unwrap();
        let back: StateJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(DensityMatrix::from_json(&back).unwrap(), a);
    }

    #[test]
    fn reduced_states_have_unit_trace((d1, d2) in dims(), r in 0u64..9, seed in 0u64..1_000_000) {
        let a = state(d1, d2, r, seed);
        for keep in [Subsystem::First, Subsystem::Second] {
            prop_assert!((a.reduced(keep).trace().re - 1.0).abs() < 1e-12);
        }
        let full = partial_trace(&partial_trace(a.matrix(), d1, d2, Subsystem::Second).unwrap(), d1, 1, Subsystem::First).unwrap();
        prop_assert!((full[(0, 0)].re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cayley_steps_stay_unitary(d in 2usize..5, eta in -5.0f64..5.0, seed in 0u64..1_000_000) {
        let u = haar_unitary(d, seed);
        let h = haar_unitary(d, seed + 1);
        let omega = (&h - &h.adjoint()).scale(0.5);
        let v = cayley(&omega, eta, &u).unwrap();
        prop_assert!(v.unitarity_error() < 1e-12);
    }

    #[test]
    fn sdp_certificate_sandwiches_fidelity(n in 2usize..8, r in 0usize..8, seed in 0u64..1_000_000) {
        let a = random_density(1, n, 1 + r % n, seed).unwrap();
        let b = random_density(1, n, n, seed + 1).unwrap();
        let mut p = sdp::build_problem(a.matrix(), b.matrix()).unwrap();
        let cert = sdp::certify(&mut p).unwrap();
        prop_assert!(cert.primal.feasible && cert.trivial_dual.feasible);
        prop_assert!(cert.primal.objective <= cert.trivial_dual.objective + 1e-12);
        prop_assert!((cert.primal.objective - cert.fidelity).abs() < 1e-9);
        if let Some(opt) = cert.optimal_dual {
            prop_assert!((opt.objective - cert.fidelity).abs() < 1e-8);
        }
    }

    #[test]
    fn tensor_powers_are_states(r in 0u64..4, seed in 0u64..1_000_000) {
        let a = state(2, 2, r, seed);
        let p = bipartite_tensor_power(&a, 2).unwrap();
        prop_assert!((p.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(psd_eig(&p).is_ok());
    }

    #[test]
    fn appendix_chains_are_ordered(n in 1usize..7, r in 0usize..7, scale in 0.1f64..10.0, seed in 0u64..1_000_000) {
        let x = random_density(1, n, 1 + r % n, seed).unwrap().matrix().scale(scale);
        let y = random_density(1, n, n, seed + 1).unwrap().matrix().clone();
        let (hi, mid, lo) = bounds::rank_trace_chain(&x).unwrap();
        prop_assert!(hi >= mid - 1e-12 && mid >= lo - 1e-12);
        let (hi, mid, lo) = bounds::product_trace_chain(&x, &y).unwrap();
        prop_assert!(hi >= mid - 1e-12 && mid >= lo - 1e-12);
    }
}

proptest! {
    #![proptest_config(cases(12))]

    #[test]
    fn orbit_extrema_bracket_fidelity_and_are_orbit_invariant(
        (d1, d2) in dims(), r1 in 0u64..9, r2 in 0u64..9, seed in 0u64..1_000_000,
    ) {
        let a = state(d1, d2, r1, seed);
        let b = state(d1, d2, r2, seed + 1);
        let f = fidelity(a.matrix(), b.matrix()).unwrap();
        let hi = orbit_opt::gmax_states(&a, &b, &quick()).unwrap();
        let lo = orbit_opt::gmin_states(&a, &b, &quick()).unwrap();
        prop_assert!(lo.value <= f + 1e-9 && f <= hi.value + 1e-9);
        let upper = bounds::gmax_upper_bound(&a, &b).unwrap().upper.unwrap();
        prop_assert!(hi.value <= upper + 1e-9);

        // the witness reproduces the reported value
        let moved = conjugate(&hi.local_unitary, b.matrix());
        prop_assert!((fidelity(a.matrix(), &moved).unwrap() - hi.value).abs() < 1e-9);

        // moving sigma along its orbit: each witness, carried across, reaches the same value
        let v = LocalUnitary::haar(d1, d2, &mut stream(seed, 9));
        let b2 = b.conjugate_local(&v);
        let hi2 = orbit_opt::gmax_states(&a, &b2, &quick()).unwrap();
        let w = &hi.local_unitary;
        let there = LocalUnitary::new(w.u1.matmul(&v.u1.adjoint()), w.u2.matmul(&v.u2.adjoint())).unwrap();
        prop_assert!((fidelity(a.matrix(), &conjugate(&there, b2.matrix())).unwrap() - hi.value).abs() < 1e-9);
        let w = &hi2.local_unitary;
        let back = LocalUnitary::new(w.u1.matmul(&v.u1), w.u2.matmul(&v.u2)).unwrap();
        prop_assert!((fidelity(a.matrix(), &conjugate(&back, b.matrix())).unwrap() - hi2.value).abs() < 1e-9);
    }

    #[test]
    fn oracle_fidelity_agrees(n in 2usize..6, seed in 0u64..1_000_000) {
        let a = random_density(1, n, n, seed).unwrap();
        let b = random_density(1, n, n, seed + 1).unwrap();
        let f = fidelity(a.matrix(), b.matrix()).unwrap();
        prop_assert!((f - common::fidelity_pd(a.matrix(), b.matrix())).abs() < 1e-10);
    }
}
