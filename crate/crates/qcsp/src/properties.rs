//! Value and variable properties over the outcome set: the deep family
//! (quantified over full outcomes), the shallow family (comparing outcomes
//! only on the prefix before the queried variable), the dual-shallow family
//! (shallow on the negated problem, for universal variables), and the
//! classical family (deep on the existential relaxation).

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::game::{outcomes_lex, GameError};
use crate::model::{Assignment, Limits, ModelError, Qcsp, Tuple, Value};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum PropertyError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("kind `{0}` requires a value")]
    MissingValue(Kind),
    #[error("kind `{0}` does not take a value")]
    UnexpectedValue(Kind),
    #[error("kind `{0}` requires a second value")]
    MissingSecondValue(Kind),
    #[error("kind `{0}` requires two distinct values")]
    EqualValues(Kind),
    #[error("kind `dependent` requires a variable set")]
    MissingSet,
    #[error("kind `{0}` does not take a variable set")]
    UnexpectedSet(Kind),
    #[error("kind `{0}` has no shallow form")]
    NoShallowForm(Kind),
    #[error("dual properties require a universal variable, but `{0}` is existential")]
    DualRequiresUniversal(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Deep,
    Shallow,
    #[value(name = "dual")]
    DualShallow,
    Classical,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Family::Deep => "deep",
            Family::Shallow => "shallow",
            Family::DualShallow => "dual",
            Family::Classical => "classical",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Inconsistent,
    Implied,
    Fixable,
    Substitutable,
    Removable,
    Interchangeable,
    Determined,
    Irrelevant,
    Dependent,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Kind::Inconsistent => "inconsistent",
            Kind::Implied => "implied",
            Kind::Fixable => "fixable",
            Kind::Substitutable => "substitutable",
            Kind::Removable => "removable",
            Kind::Interchangeable => "interchangeable",
            Kind::Determined => "determined",
            Kind::Irrelevant => "irrelevant",
            Kind::Dependent => "dependent",
        };
        write!(f, "{s}")
    }
}

/// A property question about one variable (and possibly one or two values,
/// or a variable set for dependence).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyQuery {
    pub family: Family,
    pub kind: Kind,
    pub variable: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub over: Option<Vec<String>>,
}

impl PropertyQuery {
    pub fn value(family: Family, kind: Kind, variable: impl Into<String>, a: Value) -> Self {
        PropertyQuery { family, kind, variable: variable.into(), a: Some(a), b: None, over: None }
    }

    pub fn pair(
        family: Family,
        kind: Kind,
        variable: impl Into<String>,
        a: Value,
        b: Value,
    ) -> Self {
        PropertyQuery {
            family,
            kind,
            variable: variable.into(),
            a: Some(a),
            b: Some(b),
            over: None,
        }
    }

    pub fn variable_only(family: Family, kind: Kind, variable: impl Into<String>) -> Self {
        PropertyQuery { family, kind, variable: variable.into(), a: None, b: None, over: None }
    }

    pub fn dependent(family: Family, over: Vec<String>, variable: impl Into<String>) -> Self {
        PropertyQuery {
            family,
            kind: Kind::Dependent,
            variable: variable.into(),
            a: None,
            b: None,
            over: Some(over),
        }
    }
}

/// A counterexample (or, for a removability that holds, the substitute value
/// found).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Witness {
    Tuple(Assignment),
    Pair(Assignment, Assignment),
    ChosenValue(Value),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub method: String,
}

/// Which set backs the membership test on the right-hand side of a deep
/// definition. The out- and sol-backed variants coincide for fixability,
/// substitutability, removability and irrelevance; determinacy is always
/// decided against outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rhs {
    Outcomes,
    Solutions,
}

struct Checked {
    var: usize,
    a: Option<Value>,
    b: Option<Value>,
    set: Option<Vec<usize>>,
}

fn validate(phi: &Qcsp, q: &PropertyQuery) -> Result<Checked, PropertyError> {
    let var = phi.require_var(&q.variable)?;
    let needs_a = matches!(
        q.kind,
        Kind::Inconsistent
            | Kind::Implied
            | Kind::Fixable
            | Kind::Substitutable
            | Kind::Removable
            | Kind::Interchangeable
    );
    let needs_b = matches!(q.kind, Kind::Substitutable | Kind::Interchangeable);
    if needs_a && q.a.is_none() {
        return Err(PropertyError::MissingValue(q.kind));
    }
    if !needs_a && q.a.is_some() {
        return Err(PropertyError::UnexpectedValue(q.kind));
    }
    if needs_b && q.b.is_none() {
        return Err(PropertyError::MissingSecondValue(q.kind));
    }
    if !needs_b && q.b.is_some() {
        return Err(PropertyError::UnexpectedValue(q.kind));
    }
    if needs_b && q.a == q.b {
        return Err(PropertyError::EqualValues(q.kind));
    }
    if q.kind == Kind::Dependent && q.over.is_none() {
        return Err(PropertyError::MissingSet);
    }
    if q.kind != Kind::Dependent && q.over.is_some() {
        return Err(PropertyError::UnexpectedSet(q.kind));
    }
    if matches!(q.family, Family::Shallow | Family::DualShallow)
        && !matches!(
            q.kind,
            Kind::Fixable
                | Kind::Substitutable
                | Kind::Removable
                | Kind::Interchangeable
                | Kind::Irrelevant
        )
    {
        return Err(PropertyError::NoShallowForm(q.kind));
    }
    if q.family == Family::DualShallow && !phi.is_universal(var) {
        return Err(PropertyError::DualRequiresUniversal(q.variable.clone()));
    }
    for v in [q.a, q.b].into_iter().flatten() {
        if !phi.domain(var).contains(&v) {
            return Err(PropertyError::Model(ModelError::ValueNotInDomain {
                var: q.variable.clone(),
                value: v,
            }));
        }
    }
    let set = match &q.over {
        Some(names) => {
            let mut idx = Vec::with_capacity(names.len());
            for n in names {
                idx.push(phi.require_var(n)?);
            }
            idx.sort_unstable();
            idx.dedup();
            Some(idx)
        }
        None => None,
    };
    Ok(Checked { var, a: q.a, b: q.b, set })
}

fn member(phi: &Qcsp, out: &BTreeSet<Tuple>, rhs: Rhs, t: &[Value]) -> bool {
    match rhs {
        Rhs::Outcomes => out.contains(t),
        Rhs::Solutions => phi.satisfies_tuple(t),
    }
}

fn swap(t: &Tuple, i: usize, v: Value) -> Tuple {
    let mut u = t.clone();
    u[i] = v;
    u
}

/// Deep-family evaluation over a given outcome set. `rhs` selects the set
/// backing membership tests where the two variants provably coincide;
/// determinacy ignores it and always uses outcomes.
pub(crate) fn deep_eval(
    phi: &Qcsp,
    out: &BTreeSet<Tuple>,
    rhs: Rhs,
    kind: Kind,
    var: usize,
    a: Option<Value>,
    b: Option<Value>,
    set: Option<&[usize]>,
) -> (bool, Option<Witness>) {
    let wit = |t: &Tuple| Some(Witness::Tuple(phi.tuple_to_assignment(t)));
    match kind {
        Kind::Inconsistent => {
            let a = a.unwrap();
            match out.iter().find(|t| t[var] == a) {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Implied => {
            let a = a.unwrap();
            match out.iter().find(|t| t[var] != a) {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Fixable => {
            let a = a.unwrap();
            match out.iter().find(|t| !member(phi, out, rhs, &swap(t, var, a))) {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Substitutable => {
            let (a, b) = (a.unwrap(), b.unwrap());
            match out
                .iter()
                .find(|t| t[var] == a && !member(phi, out, rhs, &swap(t, var, b)))
            {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Removable => {
            let a = a.unwrap();
            let mut chosen = None;
            for t in out.iter().filter(|t| t[var] == a) {
                let found = phi
                    .domain(var)
                    .iter()
                    .copied()
                    .find(|&v| v != a && member(phi, out, rhs, &swap(t, var, v)));
                match found {
                    Some(v) => {
                        if chosen.is_none() {
                            chosen = Some(v);
                        }
                    }
                    None => return (false, wit(t)),
                }
            }
            (true, chosen.map(Witness::ChosenValue))
        }
        Kind::Interchangeable => {
            let (a, b) = (a.unwrap(), b.unwrap());
            let (fwd, w1) = deep_eval(phi, out, rhs, Kind::Substitutable, var, Some(a), Some(b), None);
            if !fwd {
                return (false, w1);
            }
            deep_eval(phi, out, rhs, Kind::Substitutable, var, Some(b), Some(a), None)
        }
        Kind::Determined => {
            // always against outcomes: the sol-backed variant is weaker
            for t in out {
                for &v in phi.domain(var) {
                    if v != t[var] && out.contains(&swap(t, var, v)) {
                        return (false, wit(t));
                    }
                }
            }
            (true, None)
        }
        Kind::Irrelevant => {
            for t in out {
                for &v in phi.domain(var) {
                    if !member(phi, out, rhs, &swap(t, var, v)) {
                        return (false, wit(t));
                    }
                }
            }
            (true, None)
        }
        Kind::Dependent => {
            let set = set.unwrap();
            let mut groups: BTreeMap<Tuple, (Value, Tuple)> = BTreeMap::new();
            for t in out {
                let key: Tuple = set.iter().map(|&j| t[j]).collect();
                match groups.get(&key) {
                    Some((v, first)) if *v != t[var] => {
                        let pair = Witness::Pair(
                            phi.tuple_to_assignment(first),
                            phi.tuple_to_assignment(t),
                        );
                        return (false, Some(pair));
                    }
                    Some(_) => {}
                    None => {
                        groups.insert(key, (t[var], t.clone()));
                    }
                }
            }
            (true, None)
        }
    }
}

/// Shallow-family evaluation: outcomes are compared only on the prefix of
/// variables preceding `var`.
pub(crate) fn shallow_eval(
    phi: &Qcsp,
    out: &BTreeSet<Tuple>,
    kind: Kind,
    var: usize,
    a: Option<Value>,
    b: Option<Value>,
) -> (bool, Option<Witness>) {
    let wit = |t: &Tuple| Some(Witness::Tuple(phi.tuple_to_assignment(t)));
    let same_prefix_with = |t: &Tuple, pred: &dyn Fn(Value) -> bool| {
        out.iter().any(|u| u[..var] == t[..var] && pred(u[var]))
    };
    match kind {
        Kind::Fixable => {
            let a = a.unwrap();
            match out.iter().find(|t| !same_prefix_with(t, &|v| v == a)) {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Substitutable => {
            let (a, b) = (a.unwrap(), b.unwrap());
            match out
                .iter()
                .find(|t| t[var] == a && !same_prefix_with(t, &|v| v == b))
            {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Removable => {
            let a = a.unwrap();
            match out
                .iter()
                .find(|t| t[var] == a && !same_prefix_with(t, &|v| v != a))
            {
                Some(t) => (false, wit(t)),
                None => (true, None),
            }
        }
        Kind::Interchangeable => {
            let (a, b) = (a.unwrap(), b.unwrap());
            let (fwd, w1) = shallow_eval(phi, out, Kind::Substitutable, var, Some(a), Some(b));
            if !fwd {
                return (false, w1);
            }
            shallow_eval(phi, out, Kind::Substitutable, var, Some(b), Some(a))
        }
        Kind::Irrelevant => {
            for t in out {
                for &v in phi.domain(var) {
                    if !same_prefix_with(t, &|u| u == v) {
                        return (false, wit(t));
                    }
                }
            }
            (true, None)
        }
        _ => unreachable!("validated: kind has a shallow form"),
    }
}

/// Deep check against a caller-supplied outcome set.
pub fn check_deep_on(
    phi: &Qcsp,
    out: &BTreeSet<Tuple>,
    q: &PropertyQuery,
) -> Result<Verdict, PropertyError> {
    let c = validate(phi, q)?;
    let (holds, witness) =
        deep_eval(phi, out, Rhs::Outcomes, q.kind, c.var, c.a, c.b, c.set.as_deref());
    Ok(Verdict { holds, witness, method: "deep/outcome-scan".into() })
}

/// Deep check; the outcome set is computed by the lexicographic scan.
pub fn check_deep(phi: &Qcsp, q: &PropertyQuery, limits: &Limits) -> Result<Verdict, PropertyError> {
    let out = outcomes_lex(phi, limits)?;
    check_deep_on(phi, out.tuples(), q)
}

/// Shallow check against a caller-supplied outcome set.
pub fn check_shallow_on(
    phi: &Qcsp,
    out: &BTreeSet<Tuple>,
    q: &PropertyQuery,
) -> Result<Verdict, PropertyError> {
    let mut q2 = q.clone();
    q2.family = Family::Shallow;
    let c = validate(phi, &q2)?;
    let (holds, witness) = shallow_eval(phi, out, q.kind, c.var, c.a, c.b);
    Ok(Verdict { holds, witness, method: "shallow/outcome-scan".into() })
}

pub fn check_shallow(
    phi: &Qcsp,
    q: &PropertyQuery,
    limits: &Limits,
) -> Result<Verdict, PropertyError> {
    let out = outcomes_lex(phi, limits)?;
    check_shallow_on(phi, out.tuples(), q)
}

/// Dual-shallow check: the shallow property on the negated problem, where
/// the (universal) variable becomes existential.
pub fn check_dual(phi: &Qcsp, q: &PropertyQuery, limits: &Limits) -> Result<Verdict, PropertyError> {
    validate(phi, q)?; // enforces universality on the original problem
    let neg = phi.negate(limits)?;
    let out = outcomes_lex(&neg, limits)?;
    let mut v = check_shallow_on(&neg, out.tuples(), q)?;
    v.method = "dual-shallow/negation".into();
    Ok(v)
}

/// Classical check: the deep property on the existential relaxation, i.e.
/// plain CSP semantics where outcomes and solutions coincide.
pub fn check_classical(
    phi: &Qcsp,
    q: &PropertyQuery,
    limits: &Limits,
) -> Result<Verdict, PropertyError> {
    let relaxed = phi.relax_existential();
    let mut q2 = q.clone();
    q2.family = Family::Deep;
    let mut v = check_deep(&relaxed, &q2, limits)?;
    v.method = "classical/existential-relaxation".into();
    Ok(v)
}

/// Dispatch on the query's family.
pub fn check(phi: &Qcsp, q: &PropertyQuery, limits: &Limits) -> Result<Verdict, PropertyError> {
    match q.family {
        Family::Deep => check_deep(phi, q, limits),
        Family::Shallow => check_shallow(phi, q, limits),
        Family::DualShallow => check_dual(phi, q, limits),
        Family::Classical => check_classical(phi, q, limits),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Quantifier, Relation, VariableDecl};

    fn tiny() -> Qcsp {
        let vars = vec![
            VariableDecl::new("u", Quantifier::Forall, vec![0, 1]),
            VariableDecl::new("x", Quantifier::Exists, vec![0, 1]),
        ];
        let rel = Relation::new(
            vec!["u".into(), "x".into()],
            vec![vec![0, 0], vec![1, 1]],
        );
        Qcsp::new(vars, vec![rel]).unwrap()
    }

    #[test]
    fn query_validation() {
        let phi = tiny();
        let limits = Limits::default();
        // shallow inconsistency has no definition
        let q = PropertyQuery::value(Family::Shallow, Kind::Inconsistent, "x", 0);
        assert!(matches!(
            check(&phi, &q, &limits),
            Err(PropertyError::NoShallowForm(Kind::Inconsistent))
        ));
        // dual on an existential variable is rejected
        let q = PropertyQuery::value(Family::DualShallow, Kind::Removable, "x", 0);
        assert!(matches!(
            check(&phi, &q, &limits),
            Err(PropertyError::DualRequiresUniversal(_))
        ));
        // substitutable needs two distinct values
        let q = PropertyQuery::pair(Family::Deep, Kind::Substitutable, "x", 0, 0);
        assert!(matches!(check(&phi, &q, &limits), Err(PropertyError::EqualValues(_))));
        // value outside the domain
        let q = PropertyQuery::value(Family::Deep, Kind::Inconsistent, "x", 9);
        assert!(matches!(
            check(&phi, &q, &limits),
            Err(PropertyError::Model(ModelError::ValueNotInDomain { .. }))
        ));
        // dependent needs a set
        let q = PropertyQuery::variable_only(Family::Deep, Kind::Dependent, "x");
        assert!(matches!(check(&phi, &q, &limits), Err(PropertyError::MissingSet)));
    }

    #[test]
    fn vacuous_properties_on_a_false_problem() {
        let vars = vec![VariableDecl::new("x", Quantifier::Exists, vec![0, 1])];
        let empty = Relation::new(vec!["x".into()], Vec::<Tuple>::new());
        let phi = Qcsp::new(vars, vec![empty]).unwrap();
        let limits = Limits::default();
        for a in [0, 1] {
            let q = PropertyQuery::value(Family::Deep, Kind::Inconsistent, "x", a);
            assert!(check(&phi, &q, &limits).unwrap().holds);
        }
    }

    #[test]
    fn dependence_on_the_tiny_game() {
        let phi = tiny();
        let limits = Limits::default();
        let q = PropertyQuery::dependent(Family::Deep, vec!["u".into()], "x");
        assert!(check(&phi, &q, &limits).unwrap().holds);
        let q = PropertyQuery::dependent(Family::Deep, vec![], "x");
        let v = check(&phi, &q, &limits).unwrap();
        assert!(!v.holds);
        assert!(matches!(v.witness, Some(Witness::Pair(_, _))));
    }
}
