use std::collections::{BTreeMap, HashMap};

use basis_forge::construction::build;
use basis_forge::order2::ConstructionState;
use basis_forge::orderh::block;
use basis_forge::sumset::{full_rep_table, h_fold_sumset, rep_count, sumset, tuple_total};
use basis_forge::useq::{u_bound_audit, u_prefix};
use basis_forge::{ChoicePolicy, IntegerSet, Multiplicity, RunConfig, TargetFunction};
use proptest::prelude::*;

fn small_set(max_len: usize) -> impl Strategy<Value = IntegerSet> {
    prop::collection::vec(-40i64..40, 0..max_len).prop_map(IntegerSet::from)
}

fn multiplicity() -> impl Strategy<Value = Multiplicity> {
    prop_oneof![
        4 => (0u64..4).prop_map(Multiplicity::Finite),
        1 => Just(Multiplicity::Infinite),
    ]
}

fn target() -> impl Strategy<Value = TargetFunction> {
    let default = prop_oneof![
        (1u64..4).prop_map(Multiplicity::Finite),
        Just(Multiplicity::Infinite),
    ];
    (default, prop::collection::btree_map(-12i64..12, multiplicity(), 0..6))
        .prop_map(|(d, o)| TargetFunction::new(d, o).expect("default is nonzero"))
}

// independent enumeration of non-decreasing index tuples
fn brute(a: &[i64], h: usize, restricted: bool) -> HashMap<i64, u64> {
    fn rec(a: &[i64], start: usize, left: usize, acc: i64, restricted: bool, out: &mut HashMap<i64, u64>) {
        if left == 0 {
            *out.entry(acc).or_insert(0) += 1;
            return;
        }
        for i in start..a.len() {
            rec(a, if restricted { i + 1 } else { i }, left - 1, acc + a[i], restricted, out);
        }
    }
    let mut out = HashMap::new();
    rec(a, 0, h, 0, restricted, &mut out);
    out
}

proptest! {
    #[test]
    fn rep_table_matches_enumeration(a in small_set(9), h in 1usize..5, restricted: bool) {
        let table = full_rep_table(&a, h, restricted).unwrap();
        let expected = brute(a.as_slice(), h, restricted);
        prop_assert_eq!(table.total(), tuple_total(a.len(), h, restricted));
        for (&n, &c) in &expected {
            prop_assert_eq!(table.get(n), c);
            prop_assert_eq!(rep_count(&a, h, restricted, n), c);
        }
        prop_assert_eq!(table.nonzero().count(), expected.len());
    }

    #[test]
    fn h_fold_is_the_support(a in small_set(8), h in 1usize..4, restricted: bool) {
        let support = full_rep_table(&a, h, restricted).unwrap().support();
        prop_assert_eq!(h_fold_sumset(&a, h, restricted).unwrap(), support);
    }

    #[test]
    fn sumset_is_symmetric(a in small_set(10), b in small_set(10)) {
        prop_assert_eq!(sumset(&a, &b).unwrap(), sumset(&b, &a).unwrap());
        prop_assert_eq!(sumset(&a, &a).unwrap(), h_fold_sumset(&a, 2, false).unwrap());
    }

    #[test]
    fn counting_is_monotone(a in small_set(20), x in 0i64..50) {
        let here = a.counting(-x, x);
        prop_assert!(here <= a.counting(-x - 1, x + 1));
        prop_assert_eq!(here, a.iter().filter(|v| v.abs() <= x).count());
    }

    #[test]
    fn block_sums_to_u(a in -10_000i64..10_000, u in -10_000i64..10_000, h in 2usize..7) {
        let b = block(a, u, h).unwrap();
        if a == 0 {
            prop_assert_eq!(b, IntegerSet::from([u, 0]));
        } else {
            prop_assert_eq!(b.len(), h);
            prop_assert_eq!(b.iter().sum::<i64>(), u);
        }
    }

    #[test]
    fn evaluate_follows_overrides(d in 1u64..5, o in prop::collection::btree_map(-20i64..20, multiplicity(), 0..8), n in -30i64..30) {
        let f = TargetFunction::new(Multiplicity::Finite(d), o.clone()).unwrap();
        prop_assert_eq!(f.evaluate(n), o.get(&n).copied().unwrap_or(Multiplicity::Finite(d)));
        prop_assert_eq!(f.delta(), o.values().filter(|m| m.is_zero()).count());
    }

    #[test]
    fn u_multiplicities_match_the_target(f in target()) {
        let prefix = u_prefix(&f, 2000).unwrap();
        let values: Vec<i64> = prefix.iter().map(|t| t.value).collect();
        prop_assert!(u_bound_audit(&values, &f));
        let last_row = (prefix.last().unwrap().source - 1).isqrt();
        let mut seen: BTreeMap<i64, u64> = BTreeMap::new();
        // only rows before the last, which may be cut short
        for t in prefix.iter().filter(|t| t.source <= last_row * last_row) {
            *seen.entry(t.value).or_insert(0) += 1;
        }
        for n in -(last_row as i64 - 1)..(last_row as i64) {
            let got = seen.get(&n).copied().unwrap_or(0);
            let rows = last_row - n.unsigned_abs();
            match f.evaluate(n) {
                Multiplicity::Finite(l) => prop_assert_eq!(got, l.min(rows)),
                Multiplicity::Infinite => prop_assert_eq!(got, rows),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn fast_path_agrees_with_census(f in target(), steps in 1usize..5) {
        let cfg = RunConfig::default();
        let mut s = ConstructionState::new(f, &cfg);
        for _ in 0..steps {
            s.step().unwrap();
        }
        let (_, u) = s.clone().next_deficit().unwrap();
        let census = s.exclusion_census(u);
        for a in -400..=400 {
            prop_assert_eq!(s.admissible(u, a), !census.forbids(a), "a = {}", a);
        }
    }

    #[test]
    fn random_runs_audit_clean(f in target(), seed: u64, restricted: bool, steps in 1usize..8) {
        let cfg = RunConfig::new(ChoicePolicy::Seeded(seed), restricted);
        let c = build(&f, 2, steps, &cfg, None).unwrap();
        prop_assert_eq!(c.elements().len(), 2 * steps);
        prop_assert!(c.audit().passed());
    }
}
