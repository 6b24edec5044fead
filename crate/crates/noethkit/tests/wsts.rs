use noethkit::space;
use noethkit::wsts::{
    backward_coverability, forward_coverable, pred_basis, run_alg, AlgRule, Coverage, Schedule, SystemFile,
    SystemSpec, UpwardSet, VasRule, DEFAULT_FUEL,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_vas(rng: &mut ChaCha8Rng) -> (SystemSpec, Vec<u64>, Vec<u64>) {
    let places = rng.random_range(1..=3);
    let rules = (0..rng.random_range(1..=4))
        .map(|_| VasRule {
            guard: vec![],
            delta: (0..places).map(|_| rng.random_range(-2..=2)).collect(),
        })
        .collect();
    let init = (0..places).map(|_| rng.random_range(0..=2)).collect();
    let target = (0..places).map(|_| rng.random_range(0..=4)).collect();
    (SystemSpec::Vas { places, rules }, init, target)
}

#[test]
fn backward_and_forward_search_agree_on_random_vas() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..50 {
        let (sys, init, target) = random_vas(&mut rng);
        let t = UpwardSet { basis: vec![space_vec(&target)] };
        let init = space_vec(&init);
        match backward_coverability(&sys, &init, &t, DEFAULT_FUEL).unwrap() {
            Coverage::Coverable { witness, .. } => {
                // a run of length k never exceeds init + 2k in any place
                let cap = 2 + 2 * witness as u64;
                assert_eq!(forward_coverable(&sys, &init, &t, cap, 0).unwrap(), Some(witness), "{sys:?}");
                yes += 1;
            }
            Coverage::Uncoverable { invariant, .. } => {
                assert_eq!(forward_coverable(&sys, &init, &t, 8, 0).unwrap(), None, "{sys:?}");
                assert!(invariant.contains(&sys.state_space(), &t.basis[0]));
                no += 1;
            }
        }
    }
    assert!(yes > 0 && no > 0, "{yes} coverable, {no} uncoverable");
}

fn space_vec(v: &[u64]) -> noethkit::space::PointTerm {
    noethkit::wsts::nat_vector(v)
}

#[test]
fn petri_net_fixture_matches_forward_search() {
    let file: SystemFile = serde_json::from_str(include_str!("fixtures/petri3.json")).unwrap();
    let init = file.init_state().unwrap();
    let target = file.target_set().unwrap();
    let verdict = backward_coverability(&file.system, &init, &target, DEFAULT_FUEL).unwrap();
    let forward = forward_coverable(&file.system, &init, &target, 8, 0).unwrap();
    assert_eq!(matches!(verdict, Coverage::Coverable { .. }), forward.is_some());
    let frozen: serde_json::Value = serde_json::from_str(include_str!("fixtures/petri3_verdict.json")).unwrap();
    assert_eq!(serde_json::to_value(&verdict).unwrap(), frozen);
}

#[test]
fn alg_terminates_on_small_inputs() {
    for a in 0..=6 {
        for b in 0..=6 {
            for c in 0..=6 {
                let s = [a, b, c];
                for sched in [Schedule::Always(AlgRule::L), Schedule::Always(AlgRule::R)] {
                    run_alg(s, &sched, 1 << 24).unwrap();
                }
                for seed in 0..20 {
                    run_alg(s, &Schedule::Random(seed), 1 << 24).unwrap();
                }
            }
        }
    }
}

fn arb_vas() -> impl Strategy<Value = (SystemSpec, Vec<Vec<u64>>)> {
    (1usize..=3).prop_flat_map(|n| {
        let rule = (prop::collection::vec(0u64..=2, n), prop::collection::vec(-2i64..=2, n))
            .prop_map(|(guard, delta)| VasRule { guard, delta });
        (
            prop::collection::vec(rule, 1..=4),
            prop::collection::vec(prop::collection::vec(0u64..=3, n), 1..=3),
        )
            .prop_map(move |(rules, target)| (SystemSpec::Vas { places: n, rules }, target))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pred_basis_is_an_exact_antichain((sys, target) in arb_vas()) {
        let space = sys.state_space();
        let t = UpwardSet::new(&space, target.iter().map(|v| space_vec(v)).collect());
        let pre = pred_basis(&sys, &t).unwrap();
        for (i, p) in pre.basis.iter().enumerate() {
            for (j, q) in pre.basis.iter().enumerate() {
                prop_assert!(i == j || !space::leq(&space, p, q));
            }
        }
        for x in space::enumerate_points(&space, 5).unwrap() {
            let one_step = sys.successors(&x).unwrap().iter().any(|y| t.contains(&space, y));
            prop_assert_eq!(pre.contains(&space, &x), one_step);
        }
    }
}
