use lcsud::costs::{cost_row, CostParams, CostRowId};
use lcsud::schemes::SchemeId;
use lcsud::sim::{run_simulation, AvailabilityPolicy, PlacementMode, SimConfig, StragglerPolicy};
use lcsud::Rational;
use proptest::prelude::*;

fn scheme() -> impl Strategy<Value = SchemeId> {
    prop::sample::select(SchemeId::ALL.to_vec())
}

fn config(scheme: SchemeId, seed: u64) -> SimConfig {
    SimConfig {
        n: 6,
        l: 2,
        s: 1,
        u: 2,
        scheme,
        p: 65537,
        q: 2 * 60,
        v: 60,
        r: 60,
        seed,
        placement: PlacementMode::PerRealization,
        schedule: None,
        steps: 3,
        straggler_policy: StragglerPolicy::AdversarialPerGroup,
        availability: AvailabilityPolicy::SeededRandom,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tolerated_stragglers_always_decode(scheme in scheme(), seed in any::<u64>(), union in any::<bool>()) {
        let mut cfg = config(scheme, seed);
        if union {
            cfg.placement = PlacementMode::Union;
        }
        let report = run_simulation(&cfg).unwrap();
        for step in &report.steps {
            prop_assert!(step.passed());
            prop_assert_eq!(step.groups_decoded, step.groups);
            prop_assert!(step.max_group_stragglers <= 1);
        }
        if union {
            prop_assert_eq!(report.replacements, 0);
        }
    }

    #[test]
    fn ledger_follows_cost_formulas(scheme in scheme(), seed in any::<u64>()) {
        let mut cfg = config(scheme, seed);
        cfg.straggler_policy = StragglerPolicy::None;
        let report = run_simulation(&cfg).unwrap();
        for step in &report.steps {
            let m = step.available.len();
            let row = cost_row(
                CostRowId::Scheme(scheme),
                &CostParams { m, l: cfg.l, s: cfg.s, q: cfg.q, v: cfg.v, r: cfg.r },
            )
            .unwrap();
            prop_assert_eq!(step.machines.len(), m);
            for ledger in &step.machines {
                prop_assert!(step.available.contains(&ledger.machine));
                prop_assert_eq!(Rational::from_integer(ledger.download_symbols as i128), row.download);
                prop_assert_eq!(Rational::from_integer(ledger.upload_symbols as i128), row.upload);
                prop_assert_eq!(Rational::from_integer(ledger.compute_mults as i128), row.computing);
            }
        }
    }

    #[test]
    fn overloaded_group_is_reported_not_raised(scheme in scheme(), seed in any::<u64>()) {
        let mut cfg = config(scheme, seed);
        cfg.u = 0;
        cfg.availability = AvailabilityPolicy::Full;
        // Two stragglers in W_1 = {1, 2, 3}.
        cfg.straggler_policy = StragglerPolicy::FixedSet { machines: vec![1, 2] };
        let report = run_simulation(&cfg).unwrap();
        for step in &report.steps {
            prop_assert!(!step.success);
            prop_assert_eq!(step.groups_decoded, step.groups - 2);
            prop_assert_eq!(step.stragglers_tolerated, 0);
        }
    }
}
