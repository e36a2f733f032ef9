mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use qbc1_core::adversary::{helstrom_success, uhlmann_local_unitary, AliceStrategy, BobStrategy};
use qbc1_core::protocol::{run_protocol, Outcome, Party, ProtocolConfig, Transcript};
use qbc1_core::qlin::{fidelity, svd, trace_distance, C64};

#[test]
fn jacobi_oracle_diagonalizes() {
    let mut rng = common::rng(1);
    for d in [1, 2, 5, 12] {
        let rho = common::random_density(&mut rng, d, d);
        let values = common::hermitian_eigenvalues(&rho);
        assert!((values.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let back = common::hermitian_function(&rho, |x| x);
        assert!(common::max_diff(&back, &rho) < 1e-12);
        let root = common::hermitian_function(&rho, |x| x.max(0.0).sqrt());
        assert!(common::max_diff(&(&root * &root), &rho) < 1e-12);
    }
}

#[test]
fn oracle_fidelity_of_pure_states_is_the_overlap() {
    let mut rng = common::rng(2);
    let a = common::random_vector(&mut rng, 6);
    let b = common::random_vector(&mut rng, 6);
    let want = a.dotc(&b).norm();
    assert!((common::fidelity(&common::outer(&a), &common::outer(&b)) - want).abs() < 1e-9);
}

#[test]
fn permutation_enumeration_is_complete() {
    let all = common::permutations(4);
    assert_eq!(all.len(), 24);
    let mut sorted = all.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), 24);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn uhlmann_overlap_is_the_fidelity(seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let dims = common::random_dims(&mut rng);
        let d: usize = dims.iter().product();
        let psi = common::state(&dims, common::random_vector(&mut rng, d));
        let phi = common::state(&dims, common::random_vector(&mut rng, d));
        let rest: Vec<String> = common::names(&(1..dims.len()).collect::<Vec<_>>());
        let f = fidelity(&psi.reduced(&rest).unwrap(), &phi.reduced(&rest).unwrap()).unwrap();
        let v = uhlmann_local_unitary(&psi, &phi, &["r0"]).unwrap();
        let reached = v.apply(&psi).unwrap().inner(&phi).unwrap().norm();
        prop_assert!(reached <= f + 1e-9);
        prop_assert!((reached - f).abs() <= 1e-9);
    }

    #[test]
    fn distances_stay_in_range(seed in any::<u64>(), r0 in 1usize..6, r1 in 1usize..6) {
        let mut rng = common::rng(seed);
        let dims = [2, 3];
        let a = common::density(&dims, common::random_density(&mut rng, 6, r0));
        let b = common::density(&dims, common::random_density(&mut rng, 6, r1));
        let td = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=2.0 + 1e-12).contains(&td));
        prop_assert!((td - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        let f = fidelity(&a, &b).unwrap();
        // Fuchs–van de Graaf
        prop_assert!(1.0 - f <= td / 2.0 + 1e-9);
        prop_assert!(td / 2.0 <= (1.0 - f * f).sqrt() + 1e-9);
        let p = helstrom_success(&a, &b).unwrap();
        prop_assert!((p - (2.0 + td) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), rows in 1usize..9, cols in 1usize..9) {
        let mut rng = common::rng(seed);
        let m = DMatrix::from_fn(rows, cols, |_, _| common::random_vector(&mut rng, 1)[0]);
        let (u, s, vt) = svd(&m);
        let sigma = DMatrix::from_diagonal(&s.map(|x| C64::new(x, 0.0)));
        prop_assert!(common::max_diff(&(&u * sigma * &vt), &m) < 1e-12);
        prop_assert!(s.iter().zip(s.iter().skip(1)).all(|(a, b)| a >= b));
    }

    #[test]
    fn honest_sessions_accept(seed in any::<u64>(), n in 2usize..=5, eq8 in any::<bool>()) {
        let cfg = ProtocolConfig { seed, eq8_check: eq8, ..ProtocolConfig::with_n(n) };
        let t = run_protocol(&cfg, AliceStrategy::Honest, BobStrategy::Honest).unwrap();
        prop_assert_eq!(t.outcome(), Some(Outcome::Accepted));
        t.validate().unwrap();
        // The opening hands every protocol register to Bob; Alice keeps only
        // the audit pairs she consumed.
        let holdings = t.final_holdings();
        let alice = holdings.get(&Party::Alice).cloned().unwrap_or_default();
        prop_assert!(alice.iter().all(|r| r.starts_with("audit_")), "alice holds {:?}", alice);
        let bob = &holdings[&Party::Bob];
        let returned = (0..n).all(|p| bob.contains(&qbc1_core::protocol::qubit(p)));
        prop_assert!(bob.contains("alice_anc") && returned);
    }

    #[test]
    fn transcripts_round_trip(seed in any::<u64>(), flipped in any::<bool>()) {
        let alice = if flipped { AliceStrategy::DeclareFlipped } else { AliceStrategy::Honest };
        let cfg = ProtocolConfig { seed, ..ProtocolConfig::with_n(3) };
        let t = run_protocol(&cfg, alice, BobStrategy::HelstromMeasure).unwrap();
        let back = Transcript::read_jsonl(t.to_jsonl().as_bytes()).unwrap();
        prop_assert_eq!(back.to_jsonl(), t.to_jsonl());
        prop_assert_eq!(back, t);
    }
}
