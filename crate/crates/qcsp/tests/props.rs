//! Randomized invariants: tuple/assignment algebra, relaxation and
//! negation laws, outcome-set laws, agreement of the two outcome engines,
//! format round-trips, and the expression compiler against a direct
//! evaluator.

mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use qcsp::expr::{compile_expression_str, parse_expression};
use qcsp::format::{parse_qcsp, print_qcsp};
use qcsp::game::{
    enumerate_strategies, evaluate_truth, is_winning, outcomes_lex, outcomes_via_strategies,
    strategy_space_size,
};
use qcsp::harness::{random_qcsp, GenConfig};
use qcsp::local::project_single_constraint;
use qcsp::model::{Limits, Qcsp, Quantifier, Tuple, VariableDecl};

fn instance(seed: u64) -> Qcsp {
    random_qcsp(&GenConfig { seed, ..GenConfig::default() }).unwrap()
}

fn limits() -> Limits {
    Limits { max_strategies: 100_000, ..Limits::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tuple_assignment_round_trip(seed in any::<u64>()) {
        let phi = instance(seed);
        for t in phi.tuples() {
            let a = phi.tuple_to_assignment(&t);
            prop_assert_eq!(phi.assignment_to_tuple(&a).unwrap(), t);
        }
    }

    #[test]
    fn relaxation_keeps_solutions_and_equates_them_with_outcomes(seed in any::<u64>()) {
        let phi = instance(seed);
        let relaxed = phi.relax_existential();
        let limits = limits();
        let sol = phi.enumerate_solutions(&limits).unwrap();
        prop_assert_eq!(&relaxed.enumerate_solutions(&limits).unwrap(), &sol);
        let out = outcomes_lex(&relaxed, &limits).unwrap();
        prop_assert_eq!(out.tuples(), &sol);
    }

    #[test]
    fn negation_complements_solutions_and_flips_truth(seed in any::<u64>()) {
        let phi = instance(seed);
        let limits = limits();
        let neg = phi.negate(&limits).unwrap();
        let sol = phi.enumerate_solutions(&limits).unwrap();
        let neg_sol = neg.enumerate_solutions(&limits).unwrap();
        for t in phi.tuples() {
            prop_assert_eq!(sol.contains(&t), !neg_sol.contains(&t));
        }
        prop_assert_eq!(evaluate_truth(&neg), !evaluate_truth(&phi));
    }

    #[test]
    fn outcome_set_laws(seed in any::<u64>()) {
        let phi = instance(seed);
        let limits = limits();
        let out = outcomes_lex(&phi, &limits).unwrap();
        let sol = phi.enumerate_solutions(&limits).unwrap();
        prop_assert!(out.tuples().is_subset(&sol));
        prop_assert_eq!(evaluate_truth(&phi), !out.is_empty());
        if phi.universal_indices().is_empty() {
            prop_assert_eq!(out.tuples(), &sol);
        }
    }

    #[test]
    fn solutions_are_the_intersection_of_the_projections(seed in any::<u64>()) {
        let phi = instance(seed);
        let limits = limits();
        let mut expected: Option<BTreeSet<Tuple>> = None;
        for k in 0..phi.constraints().len() {
            let sub = project_single_constraint(&phi, k).unwrap();
            let sol = sub.enumerate_solutions(&limits).unwrap();
            expected = Some(match expected {
                None => sol,
                Some(acc) => acc.intersection(&sol).cloned().collect(),
            });
        }
        let whole = phi.enumerate_solutions(&limits).unwrap();
        if let Some(expected) = expected {
            prop_assert_eq!(whole, expected);
        } else {
            prop_assert_eq!(whole.len() as u128, phi.product_size());
        }
    }

    #[test]
    fn format_round_trip(seed in any::<u64>()) {
        let phi = instance(seed);
        let printed = print_qcsp(&phi);
        let again = parse_qcsp(&printed, &limits()).unwrap();
        prop_assert_eq!(&phi, &again);
        prop_assert_eq!(printed, print_qcsp(&again));
    }

    #[test]
    fn compiled_expressions_match_direct_evaluation(
        c1 in -3i64..=3, c2 in -3i64..=3, k in -5i64..=5, rhs in -5i64..=5,
        op in prop::sample::select(vec!["=", "!=", "<=", "<", ">=", ">"]),
    ) {
        let src = format!("{c1} * a + {c2}*b + {k} {op} {rhs}");
        let decls = vec![
            VariableDecl::new("a", Quantifier::Exists, vec![-1, 0, 2]),
            VariableDecl::new("b", Quantifier::Exists, vec![0, 1, 3]),
        ];
        let parsed = parse_expression(&src).unwrap();
        let rel = compile_expression_str(&decls, &src, &Limits::default()).unwrap();
        for &a in &[-1i64, 0, 2] {
            for &b in &[0i64, 1, 3] {
                let lhs = c1 * a + c2 * b + k;
                let direct = match op {
                    "=" => lhs == rhs,
                    "!=" => lhs != rhs,
                    "<=" => lhs <= rhs,
                    "<" => lhs < rhs,
                    ">=" => lhs >= rhs,
                    _ => lhs > rhs,
                };
                prop_assert_eq!(rel.contains(&[a, b]), direct);
                let lookup = |name: &str| if name == "a" { a } else { b };
                prop_assert_eq!(parsed.eval(&lookup), direct);
            }
        }
    }
}

/// On 200 instances whose strategy space fits the oracle limit, the
/// lexicographic scan and full strategy enumeration agree, and truth
/// coincides with the existence of a winning strategy.
#[test]
fn outcome_engines_agree_on_two_hundred_small_instances() {
    let limits = limits();
    let mut seed = 0u64;
    let mut tested = 0;
    while tested < 200 {
        let phi = instance(seed);
        seed += 1;
        if strategy_space_size(&phi) > limits.max_strategies as u128 {
            continue;
        }
        tested += 1;
        let via_lex = outcomes_lex(&phi, &limits).unwrap();
        let via_strategies = outcomes_via_strategies(&phi, &limits).unwrap();
        assert_eq!(via_lex.tuples(), via_strategies.tuples(), "seed {seed}");
        let any_winning = enumerate_strategies(&phi, &limits)
            .unwrap()
            .any(|s| is_winning(&phi, &s).unwrap());
        assert_eq!(evaluate_truth(&phi), any_winning, "seed {seed}");
    }
}
