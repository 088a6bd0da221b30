//! Random instance generation and machine-checked validation of the
//! library's guaranteed laws: truth/strategy agreement, right-hand-side
//! equivalences, the classical-to-deep and deep-to-shallow implications,
//! the inter-property relations, truth preservation of licensed edits,
//! agreement of the two outcome engines, and local-rule soundness.
//!
//! Fault injection deliberately mis-evaluates one side of a chosen law so
//! tests can confirm the harness detects seeded bugs.

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::format::print_qcsp;
use crate::game::{enumerate_strategies, evaluate_truth, is_winning, outcomes_lex, strategy_space_size};
use crate::local::project_single_constraint;
use crate::model::{Limits, Qcsp, Quantifier, Relation, Tuple, Value, VariableDecl};
use crate::properties::{deep_eval, shallow_eval, Kind, Rhs};
use crate::simplify::{fix_value, remove_value};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum HarnessError {
    #[error("infeasible generator config: {0}")]
    InfeasibleConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuantPattern {
    Random,
    Alternating,
    AllExists,
    AllForall,
    /// Alternating blocks of the given width, starting existential.
    Blocks(usize),
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub vars: RangeInclusive<usize>,
    pub domain_size: RangeInclusive<usize>,
    pub constraints: RangeInclusive<usize>,
    /// Fraction of each scope's tuples accepted by a generated relation.
    pub density: f64,
    pub pattern: QuantPattern,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            vars: 2..=4,
            domain_size: 2..=3,
            constraints: 1..=4,
            density: 0.5,
            pattern: QuantPattern::Random,
            seed: 0,
        }
    }
}

fn check_range(name: &str, r: &RangeInclusive<usize>, min: usize) -> Result<(), HarnessError> {
    if r.is_empty() {
        return Err(HarnessError::InfeasibleConfig(format!("empty {name} range")));
    }
    if *r.start() < min {
        return Err(HarnessError::InfeasibleConfig(format!("{name} must be at least {min}")));
    }
    Ok(())
}

/// Deterministically draw one instance: same config and seed, same problem.
pub fn random_qcsp(cfg: &GenConfig) -> Result<Qcsp, HarnessError> {
    check_range("variable count", &cfg.vars, 1)?;
    check_range("domain size", &cfg.domain_size, 1)?;
    check_range("constraint count", &cfg.constraints, 0)?;
    if !(0.0..=1.0).contains(&cfg.density) {
        return Err(HarnessError::InfeasibleConfig("density must lie in [0,1]".into()));
    }
    if matches!(cfg.pattern, QuantPattern::Blocks(0)) {
        return Err(HarnessError::InfeasibleConfig("block width must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = rng.gen_range(cfg.vars.clone());
    let vars: Vec<VariableDecl> = (0..n)
        .map(|i| {
            let quantifier = match cfg.pattern {
                QuantPattern::Random => {
                    if rng.gen_bool(0.5) {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    }
                }
                QuantPattern::Alternating => {
                    if i % 2 == 0 {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    }
                }
                QuantPattern::AllExists => Quantifier::Exists,
                QuantPattern::AllForall => Quantifier::Forall,
                QuantPattern::Blocks(w) => {
                    if (i / w) % 2 == 0 {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forall
                    }
                }
            };
            let size = rng.gen_range(cfg.domain_size.clone());
            let domain: Vec<Value> = (0..size as Value).collect();
            VariableDecl::new(format!("x{}", i + 1), quantifier, domain)
        })
        .collect();
    let m = rng.gen_range(cfg.constraints.clone());
    let mut constraints = Vec::with_capacity(m);
    for _ in 0..m {
        let scope_size = rng.gen_range(1..=n.min(3));
        let mut scope_idx = rand::seq::index::sample(&mut rng, n, scope_size).into_vec();
        scope_idx.sort_unstable();
        let scope: Vec<String> = scope_idx.iter().map(|&i| vars[i].name.clone()).collect();
        let domains: Vec<Vec<Value>> = scope_idx.iter().map(|&i| vars[i].domain.clone()).collect();
        let mut rows: Vec<Tuple> = Vec::new();
        let mut tuple = vec![0usize; scope_size];
        'rows: loop {
            if rng.gen_bool(cfg.density) {
                rows.push(tuple.iter().zip(&domains).map(|(&j, d)| d[j]).collect());
            }
            for k in (0..scope_size).rev() {
                tuple[k] += 1;
                if tuple[k] < domains[k].len() {
                    continue 'rows;
                }
                tuple[k] = 0;
            }
            break;
        }
        constraints.push(Relation::new(scope, rows));
    }
    Ok(Qcsp::new(vars, constraints).expect("generated instances satisfy model invariants"))
}

/// Draw `count` instances from consecutive seeds starting at `cfg.seed`.
pub fn random_suite(cfg: &GenConfig, count: usize) -> Result<Vec<Qcsp>, HarnessError> {
    (0..count)
        .map(|k| random_qcsp(&GenConfig { seed: cfg.seed.wrapping_add(k as u64), ..cfg.clone() }))
        .collect()
}

/// The laws the harness validates, one per guaranteed equivalence or
/// implication. Also the unit of fault injection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    TruthIffWinningStrategy,
    OutcomeVsSolutionRhs,
    ClassicalImpliesDeep,
    DeepImpliesShallow,
    PropertyRelations,
    RemovalPreservesTruth,
    FixPreservesTruth,
    DualRemovalPreservesTruth,
    DualFixPreservesTruth,
    OutcomeRoutesAgree,
    LocalSoundness,
}

impl Law {
    pub const ALL: [Law; 11] = [
        Law::TruthIffWinningStrategy,
        Law::OutcomeVsSolutionRhs,
        Law::ClassicalImpliesDeep,
        Law::DeepImpliesShallow,
        Law::PropertyRelations,
        Law::RemovalPreservesTruth,
        Law::FixPreservesTruth,
        Law::DualRemovalPreservesTruth,
        Law::DualFixPreservesTruth,
        Law::OutcomeRoutesAgree,
        Law::LocalSoundness,
    ];
}

impl std::fmt::Display for Law {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Law::TruthIffWinningStrategy => "truth-iff-winning-strategy",
            Law::OutcomeVsSolutionRhs => "outcome-vs-solution-rhs",
            Law::ClassicalImpliesDeep => "classical-implies-deep",
            Law::DeepImpliesShallow => "deep-implies-shallow",
            Law::PropertyRelations => "property-relations",
            Law::RemovalPreservesTruth => "removal-preserves-truth",
            Law::FixPreservesTruth => "fix-preserves-truth",
            Law::DualRemovalPreservesTruth => "dual-removal-preserves-truth",
            Law::DualFixPreservesTruth => "dual-fix-preserves-truth",
            Law::OutcomeRoutesAgree => "outcome-routes-agree",
            Law::LocalSoundness => "local-soundness",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LawStats {
    /// Instances on which the law ran.
    pub checked: u64,
    /// Instances skipped because an oracle limit was exceeded.
    pub skipped: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: Law,
    /// The offending instance in the text format; re-parsing it reproduces
    /// the violation.
    pub instance: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PropositionReport {
    pub instances: u64,
    pub stats: std::collections::BTreeMap<String, LawStats>,
    pub violations: Vec<Violation>,
}

impl PropositionReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: PropositionReport) {
        self.instances += other.instances;
        for (law, s) in other.stats {
            let e = self.stats.entry(law).or_default();
            e.checked += s.checked;
            e.skipped += s.skipped;
            e.violations += s.violations;
        }
        self.violations.extend(other.violations);
    }

    fn checked(&mut self, law: Law) {
        self.stats.entry(law.to_string()).or_default().checked += 1;
    }

    fn skipped(&mut self, law: Law) {
        self.stats.entry(law.to_string()).or_default().skipped += 1;
    }

    fn violation(&mut self, law: Law, phi: &Qcsp, detail: String) {
        self.stats.entry(law.to_string()).or_default().violations += 1;
        self.violations.push(Violation { law, instance: print_qcsp(phi), detail });
    }
}

struct Analysis {
    truth: bool,
    out: BTreeSet<Tuple>,
    relaxed: Qcsp,
    relaxed_out: BTreeSet<Tuple>,
    neg: Qcsp,
    neg_out: BTreeSet<Tuple>,
    sub_outs: Vec<(Qcsp, BTreeSet<Tuple>)>,
    /// Outcomes recomputed from strategy enumeration; `None` when the
    /// strategy space exceeds the limit.
    strat_out: Option<BTreeSet<Tuple>>,
    winning_exists: Option<bool>,
}

fn analyze(phi: &Qcsp, limits: &Limits) -> Option<Analysis> {
    let truth = evaluate_truth(phi);
    let out = outcomes_lex(phi, limits).ok()?.tuples().clone();
    let relaxed = phi.relax_existential();
    let relaxed_out = outcomes_lex(&relaxed, limits).ok()?.tuples().clone();
    let neg = phi.negate(limits).ok()?;
    let neg_out = outcomes_lex(&neg, limits).ok()?.tuples().clone();
    let mut sub_outs = Vec::with_capacity(phi.constraints().len());
    for k in 0..phi.constraints().len() {
        let sub = project_single_constraint(phi, k).ok()?;
        let sub_out = outcomes_lex(&sub, limits).ok()?.tuples().clone();
        sub_outs.push((sub, sub_out));
    }
    let (strat_out, winning_exists) = if strategy_space_size(phi) <= limits.max_strategies as u128
    {
        let mut tuples = BTreeSet::new();
        let mut any = false;
        for s in enumerate_strategies(phi, limits).ok()? {
            if is_winning(phi, &s).ok()? {
                any = true;
                tuples.extend(crate::game::scenarios(phi, &s).ok()?);
            }
        }
        (Some(tuples), Some(any))
    } else {
        (None, None)
    };
    Some(Analysis { truth, out, relaxed, relaxed_out, neg, neg_out, sub_outs, strat_out, winning_exists })
}

fn pairs(dom: &[Value]) -> Vec<(Value, Value)> {
    let mut out = Vec::new();
    for &a in dom {
        for &b in dom {
            if a != b {
                out.push((a, b));
            }
        }
    }
    out
}

/// Candidate determining sets for dependence checks: the empty set, all
/// other variables, and the universal prefix.
fn dependence_sets(phi: &Qcsp, i: usize) -> Vec<Vec<usize>> {
    let all_others: Vec<usize> = (0..phi.num_vars()).filter(|&j| j != i).collect();
    let mut sets = vec![Vec::new(), all_others, phi.universal_prefix(i)];
    sets.sort();
    sets.dedup();
    sets
}

fn describe_query(phi: &Qcsp, kind: Kind, i: usize, a: Option<Value>, b: Option<Value>) -> String {
    let name = &phi.var(i).name;
    match (a, b) {
        (Some(a), Some(b)) => format!("{kind}({name}, {a}, {b})"),
        (Some(a), None) => format!("{kind}({name}, {a})"),
        _ => format!("{kind}({name})"),
    }
}

fn check_truth_iff_winning(phi: &Qcsp, an: &Analysis, report: &mut PropositionReport, flip: bool) {
    match an.winning_exists {
        None => report.skipped(Law::TruthIffWinningStrategy),
        Some(any) => {
            report.checked(Law::TruthIffWinningStrategy);
            let truth = an.truth != flip;
            if truth != any {
                report.violation(
                    Law::TruthIffWinningStrategy,
                    phi,
                    format!("truth={truth} but winning strategy exists={any}"),
                );
            }
        }
    }
}

fn check_rhs_equivalence(phi: &Qcsp, an: &Analysis, report: &mut PropositionReport, flip: bool) {
    report.checked(Law::OutcomeVsSolutionRhs);
    // removability is excluded: the substitute value may have to depend on
    // universal variables quantified after the target, which no single
    // strategy can honor, so a solution-backed substitute need not yield an
    // outcome-backed one (see `removability_rhs_counterexample` in the tests)
    let mut queries: Vec<(Kind, usize, Option<Value>, Option<Value>)> = Vec::new();
    for i in 0..phi.num_vars() {
        for &a in phi.domain(i) {
            queries.push((Kind::Fixable, i, Some(a), None));
        }
        for (a, b) in pairs(phi.domain(i)) {
            queries.push((Kind::Substitutable, i, Some(a), Some(b)));
        }
        queries.push((Kind::Irrelevant, i, None, None));
    }
    for (kind, i, a, b) in queries {
        let via_out = deep_eval(phi, &an.out, Rhs::Outcomes, kind, i, a, b, None).0;
        let via_sol = deep_eval(phi, &an.out, Rhs::Solutions, kind, i, a, b, None).0 != flip;
        if via_out != via_sol {
            report.violation(
                Law::OutcomeVsSolutionRhs,
                phi,
                format!(
                    "{}: outcome-backed={via_out}, solution-backed={via_sol}",
                    describe_query(phi, kind, i, a, b)
                ),
            );
        }
    }
}

fn implication_queries(
    phi: &Qcsp,
    kinds_with_value: &[Kind],
    kinds_with_pair: &[Kind],
    kinds_plain: &[Kind],
    with_dependence: bool,
) -> Vec<(Kind, usize, Option<Value>, Option<Value>, Option<Vec<usize>>)> {
    let mut queries = Vec::new();
    for i in 0..phi.num_vars() {
        for &kind in kinds_with_value {
            for &a in phi.domain(i) {
                queries.push((kind, i, Some(a), None, None));
            }
        }
        for &kind in kinds_with_pair {
            for (a, b) in pairs(phi.domain(i)) {
                queries.push((kind, i, Some(a), Some(b), None));
            }
        }
        for &kind in kinds_plain {
            queries.push((kind, i, None, None, None));
        }
        if with_dependence {
            for set in dependence_sets(phi, i) {
                queries.push((Kind::Dependent, i, None, None, Some(set)));
            }
        }
    }
    queries
}

fn check_classical_implies_deep(
    phi: &Qcsp,
    an: &Analysis,
    report: &mut PropositionReport,
    flip: bool,
) {
    report.checked(Law::ClassicalImpliesDeep);
    // removability is excluded for the same reason as in the outcome-versus-
    // solution equivalence check: the implication fails on instances where
    // the substitute must vary with later universal variables
    let queries = implication_queries(
        phi,
        &[Kind::Inconsistent, Kind::Fixable],
        &[Kind::Substitutable, Kind::Interchangeable],
        &[Kind::Determined, Kind::Irrelevant],
        true,
    );
    for (kind, i, a, b, set) in queries {
        let classical = deep_eval(
            &an.relaxed,
            &an.relaxed_out,
            Rhs::Outcomes,
            kind,
            i,
            a,
            b,
            set.as_deref(),
        )
        .0;
        if !classical {
            continue;
        }
        let deep = deep_eval(phi, &an.out, Rhs::Outcomes, kind, i, a, b, set.as_deref()).0 != flip;
        if !deep {
            report.violation(
                Law::ClassicalImpliesDeep,
                phi,
                format!(
                    "classical {} holds but the deep property does not",
                    describe_query(phi, kind, i, a, b)
                ),
            );
        }
    }
}

fn check_deep_implies_shallow(
    phi: &Qcsp,
    an: &Analysis,
    report: &mut PropositionReport,
    flip: bool,
) {
    report.checked(Law::DeepImpliesShallow);
    let queries = implication_queries(
        phi,
        &[Kind::Fixable, Kind::Removable],
        &[Kind::Substitutable, Kind::Interchangeable],
        &[Kind::Irrelevant],
        false,
    );
    for (kind, i, a, b, _) in queries {
        let deep = deep_eval(phi, &an.out, Rhs::Outcomes, kind, i, a, b, None).0;
        if !deep {
            continue;
        }
        let shallow = shallow_eval(phi, &an.out, kind, i, a, b).0 != flip;
        if !shallow {
            report.violation(
                Law::DeepImpliesShallow,
                phi,
                format!(
                    "deep {} holds but the shallow property does not",
                    describe_query(phi, kind, i, a, b)
                ),
            );
        }
    }
}

fn check_property_relations(
    phi: &Qcsp,
    an: &Analysis,
    report: &mut PropositionReport,
    flip: bool,
) {
    report.checked(Law::PropertyRelations);
    let out = &an.out;
    let deep = |kind, i, a: Option<Value>, b: Option<Value>| {
        deep_eval(phi, out, Rhs::Outcomes, kind, i, a, b, None).0
    };
    let shallow = |kind, i, a: Option<Value>, b: Option<Value>| {
        shallow_eval(phi, out, kind, i, a, b).0
    };
    let mut fail = |detail: String| report.violation(Law::PropertyRelations, phi, detail);
    for i in 0..phi.num_vars() {
        let dom = phi.domain(i).to_vec();
        let name = phi.var(i).name.clone();
        for &a in &dom {
            let inconsistent = deep(Kind::Inconsistent, i, Some(a), None);
            if inconsistent {
                // an inconsistent value is substitutable to anything
                for &b in &dom {
                    if !deep(Kind::Substitutable, i, Some(a), Some(b)) {
                        fail(format!(
                            "inconsistent({name}, {a}) but not substitutable({name}, {a}, {b})"
                        ));
                    }
                }
                // ... and removable
                if !deep(Kind::Removable, i, Some(a), None) {
                    fail(format!("inconsistent({name}, {a}) but not removable({name}, {a})"));
                }
            }
            // implied iff every other value is inconsistent
            let implied = deep(Kind::Implied, i, Some(a), None);
            let others_inconsistent = dom
                .iter()
                .all(|&b| b == a || deep(Kind::Inconsistent, i, Some(b), None))
                != flip;
            if implied != others_inconsistent {
                fail(format!(
                    "implied({name}, {a})={implied} but all-others-inconsistent={others_inconsistent}"
                ));
            }
            // an implied value is fixable
            if implied && !deep(Kind::Fixable, i, Some(a), None) {
                fail(format!("implied({name}, {a}) but not fixable({name}, {a})"));
            }
            // substitutable to some other value implies removable (both depths)
            let sub_somewhere =
                dom.iter().any(|&b| b != a && deep(Kind::Substitutable, i, Some(a), Some(b)));
            if sub_somewhere && !deep(Kind::Removable, i, Some(a), None) {
                fail(format!("substitutable({name}, {a}, _) but not removable({name}, {a})"));
            }
            let s_sub_somewhere =
                dom.iter().any(|&b| b != a && shallow(Kind::Substitutable, i, Some(a), Some(b)));
            if s_sub_somewhere && !shallow(Kind::Removable, i, Some(a), None) {
                fail(format!(
                    "shallow substitutable({name}, {a}, _) but not shallow removable({name}, {a})"
                ));
            }
            // fixable to b iff every value is substitutable to b (both depths)
            let b = a;
            let fixable = deep(Kind::Fixable, i, Some(b), None);
            let all_sub = dom.iter().all(|&c| deep(Kind::Substitutable, i, Some(c), Some(b)));
            if fixable != all_sub {
                fail(format!("fixable({name}, {b})={fixable} but all-substitutable={all_sub}"));
            }
            let s_fixable = shallow(Kind::Fixable, i, Some(b), None);
            let s_all_sub =
                dom.iter().all(|&c| shallow(Kind::Substitutable, i, Some(c), Some(b)));
            if s_fixable != s_all_sub {
                fail(format!(
                    "shallow fixable({name}, {b})={s_fixable} but all-shallow-substitutable={s_all_sub}"
                ));
            }
        }
        // irrelevant iff every value is fixable (both depths)
        let irrelevant = deep(Kind::Irrelevant, i, None, None);
        let all_fixable = dom.iter().all(|&a| deep(Kind::Fixable, i, Some(a), None));
        if irrelevant != all_fixable {
            fail(format!("irrelevant({name})={irrelevant} but all-fixable={all_fixable}"));
        }
        let s_irrelevant = shallow(Kind::Irrelevant, i, None, None);
        let s_all_fixable = dom.iter().all(|&a| shallow(Kind::Fixable, i, Some(a), None));
        if s_irrelevant != s_all_fixable {
            fail(format!(
                "shallow irrelevant({name})={s_irrelevant} but all-shallow-fixable={s_all_fixable}"
            ));
        }
    }
}

fn check_licensed_edits(
    phi: &Qcsp,
    an: &Analysis,
    report: &mut PropositionReport,
    fault: Option<Law>,
) {
    for law in [
        Law::RemovalPreservesTruth,
        Law::FixPreservesTruth,
        Law::DualRemovalPreservesTruth,
        Law::DualFixPreservesTruth,
    ] {
        report.checked(law);
        let flip = fault == Some(law);
        let universal = matches!(law, Law::DualRemovalPreservesTruth | Law::DualFixPreservesTruth);
        let removal = matches!(law, Law::RemovalPreservesTruth | Law::DualRemovalPreservesTruth);
        let kind = if removal { Kind::Removable } else { Kind::Fixable };
        for i in 0..phi.num_vars() {
            if phi.is_universal(i) != universal {
                continue;
            }
            if removal && phi.domain(i).len() < 2 {
                continue;
            }
            let name = phi.var(i).name.clone();
            for &a in phi.domain(i) {
                let licensed = if universal {
                    shallow_eval(&an.neg, &an.neg_out, kind, i, Some(a), None).0
                } else {
                    shallow_eval(phi, &an.out, kind, i, Some(a), None).0
                };
                if !licensed {
                    continue;
                }
                let edited = if removal {
                    remove_value(phi, &name, a).expect("guarded removal")
                } else {
                    fix_value(phi, &name, a).expect("value from the domain")
                };
                let after = evaluate_truth(&edited) != flip;
                if after != an.truth {
                    report.violation(
                        law,
                        phi,
                        format!(
                            "licensed {} of ({name}, {a}) changed truth {} -> {after}",
                            if removal { "removal" } else { "fix" },
                            an.truth
                        ),
                    );
                }
            }
        }
    }
}

fn check_outcome_routes(phi: &Qcsp, an: &Analysis, report: &mut PropositionReport, flip: bool) {
    match &an.strat_out {
        None => report.skipped(Law::OutcomeRoutesAgree),
        Some(strat_out) => {
            report.checked(Law::OutcomeRoutesAgree);
            let mut lex = an.out.clone();
            if flip {
                let first = phi.tuples().next().expect("domains are nonempty");
                if !lex.remove(&first) {
                    lex.insert(first);
                }
            }
            if &lex != strat_out {
                let only_lex: Vec<_> = lex.difference(strat_out).collect();
                let only_strat: Vec<_> = strat_out.difference(&lex).collect();
                report.violation(
                    Law::OutcomeRoutesAgree,
                    phi,
                    format!(
                        "outcome engines disagree; lex-only={only_lex:?}, strategy-only={only_strat:?}"
                    ),
                );
            }
        }
    }
}

fn check_local_soundness(phi: &Qcsp, an: &Analysis, report: &mut PropositionReport, flip: bool) {
    report.checked(Law::LocalSoundness);
    let queries = implication_queries(
        phi,
        &[Kind::Inconsistent, Kind::Implied, Kind::Fixable],
        &[Kind::Substitutable, Kind::Interchangeable],
        &[Kind::Determined, Kind::Irrelevant],
        true,
    );
    for (kind, i, a, b, set) in queries {
        let verdicts = an
            .sub_outs
            .iter()
            .map(|(sub, out)| deep_eval(sub, out, Rhs::Outcomes, kind, i, a, b, set.as_deref()).0);
        let combined = match kind {
            Kind::Inconsistent | Kind::Implied | Kind::Determined | Kind::Dependent => {
                verdicts.into_iter().reduce(|x, y| x || y).unwrap_or(false)
            }
            _ => verdicts.into_iter().all(|v| v),
        } != flip;
        if !combined {
            continue;
        }
        let global = deep_eval(phi, &an.out, Rhs::Outcomes, kind, i, a, b, set.as_deref()).0;
        if !global {
            report.violation(
                Law::LocalSoundness,
                phi,
                format!(
                    "per-constraint certificate for {} but the global property fails",
                    describe_query(phi, kind, i, a, b)
                ),
            );
        }
    }
}

/// Validate one instance against every law, optionally mis-evaluating one
/// law to exercise the harness's own detection.
pub fn validate_instance_with_fault(
    phi: &Qcsp,
    limits: &Limits,
    fault: Option<Law>,
) -> PropositionReport {
    let mut report = PropositionReport { instances: 1, ..Default::default() };
    let an = match analyze(phi, limits) {
        Some(an) => an,
        None => {
            // oracle limits exceeded before any law could run
            for law in Law::ALL {
                report.skipped(law);
            }
            return report;
        }
    };
    let flip = |law: Law| fault == Some(law);
    check_truth_iff_winning(phi, &an, &mut report, flip(Law::TruthIffWinningStrategy));
    check_rhs_equivalence(phi, &an, &mut report, flip(Law::OutcomeVsSolutionRhs));
    check_classical_implies_deep(phi, &an, &mut report, flip(Law::ClassicalImpliesDeep));
    check_deep_implies_shallow(phi, &an, &mut report, flip(Law::DeepImpliesShallow));
    check_property_relations(phi, &an, &mut report, flip(Law::PropertyRelations));
    check_licensed_edits(phi, &an, &mut report, fault);
    check_outcome_routes(phi, &an, &mut report, flip(Law::OutcomeRoutesAgree));
    check_local_soundness(phi, &an, &mut report, flip(Law::LocalSoundness));
    report
}

pub fn validate_instance(phi: &Qcsp, limits: &Limits) -> PropositionReport {
    validate_instance_with_fault(phi, limits, None)
}

/// Validate a batch of instances and merge the reports.
pub fn validate_propositions(instances: &[Qcsp], limits: &Limits) -> PropositionReport {
    let mut report = PropositionReport::default();
    for phi in instances {
        report.merge(validate_instance(phi, limits));
    }
    report
}
