//! Game-theoretic semantics: truth evaluation by and/or recursion,
//! strategies and scenarios, winning strategies, and two independent routes
//! to the outcome set (strategy-union and lexicographic membership scan).

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    product_of, Assignment, Limits, ModelError, Qcsp, Quantifier, Relation, Tuple, Value,
};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum GameError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("strategy space of {needed} tables exceeds limit {limit}")]
    StrategyLimitExceeded { needed: u128, limit: u64 },
    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),
}

/// One existential variable's decision table: a value for every assignment
/// of the universal variables preceding it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StrategyTable {
    /// 0-based index of the existential variable this table decides.
    pub var: usize,
    /// Indices of the preceding universal variables, in prefix order.
    pub inputs: Vec<usize>,
    /// Outputs indexed by the mixed-radix rank of the input values
    /// (inputs enumerated in lexicographic order over their domains).
    pub outputs: Vec<Value>,
}

impl StrategyTable {
    fn rank(&self, phi: &Qcsp, key: &[Value]) -> Option<usize> {
        debug_assert_eq!(key.len(), self.inputs.len());
        let mut rank = 0usize;
        for (&var, &val) in self.inputs.iter().zip(key) {
            let dom = phi.domain(var);
            let pos = dom.iter().position(|&d| d == val)?;
            rank = rank * dom.len() + pos;
        }
        Some(rank)
    }
}

/// A family of decision tables, one per existential variable in prefix order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strategy {
    tables: Vec<StrategyTable>,
}

impl Strategy {
    /// Builds a strategy by calling `f(var_index, preceding_universal_values)`
    /// for every table cell. Returns an error if `f` picks a value outside
    /// the variable's domain.
    pub fn from_fn(
        phi: &Qcsp,
        mut f: impl FnMut(usize, &[Value]) -> Value,
    ) -> Result<Strategy, GameError> {
        let mut tables = Vec::new();
        for i in phi.existential_indices() {
            let inputs = phi.universal_prefix(i);
            let doms: Vec<&[Value]> = inputs.iter().map(|&j| phi.domain(j)).collect();
            let mut outputs = Vec::new();
            for key in product_of(doms) {
                let v = f(i, &key);
                if !phi.domain(i).contains(&v) {
                    return Err(GameError::MalformedStrategy(format!(
                        "value {v} outside the domain of `{}`",
                        phi.var(i).name
                    )));
                }
                outputs.push(v);
            }
            tables.push(StrategyTable { var: i, inputs, outputs });
        }
        Ok(Strategy { tables })
    }

    pub fn tables(&self) -> &[StrategyTable] {
        &self.tables
    }

    /// The value this strategy assigns to existential variable `var` given
    /// the values of its preceding universals.
    pub fn decide(&self, phi: &Qcsp, var: usize, key: &[Value]) -> Result<Value, GameError> {
        let table = self
            .tables
            .iter()
            .find(|t| t.var == var)
            .ok_or_else(|| GameError::MalformedStrategy(format!("no table for index {var}")))?;
        let rank = table.rank(phi, key).ok_or_else(|| {
            GameError::MalformedStrategy("key value outside a universal domain".into())
        })?;
        table
            .outputs
            .get(rank)
            .copied()
            .ok_or_else(|| GameError::MalformedStrategy("table is not total".into()))
    }

    fn validate(&self, phi: &Qcsp) -> Result<(), GameError> {
        let existentials = phi.existential_indices();
        if self.tables.len() != existentials.len() {
            return Err(GameError::MalformedStrategy(format!(
                "expected {} tables, found {}",
                existentials.len(),
                self.tables.len()
            )));
        }
        for (table, &i) in self.tables.iter().zip(&existentials) {
            if table.var != i {
                return Err(GameError::MalformedStrategy(format!(
                    "table order mismatch at index {i}"
                )));
            }
            let inputs = phi.universal_prefix(i);
            if table.inputs != inputs {
                return Err(GameError::MalformedStrategy(format!(
                    "wrong input set for `{}`",
                    phi.var(i).name
                )));
            }
            let keys: usize = inputs.iter().map(|&j| phi.domain(j).len()).product();
            if table.outputs.len() != keys {
                return Err(GameError::MalformedStrategy(format!(
                    "table for `{}` has {} outputs, expected {keys}",
                    phi.var(i).name,
                    table.outputs.len()
                )));
            }
            for &v in &table.outputs {
                if !phi.domain(i).contains(&v) {
                    return Err(GameError::MalformedStrategy(format!(
                        "output {v} outside the domain of `{}`",
                        phi.var(i).name
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Which engine produced an outcome set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    StrategyEnumeration,
    LexicographicScan,
}

/// A set of total tuples, each a scenario of some winning strategy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomeSet {
    tuples: BTreeSet<Tuple>,
    provenance: Provenance,
}

impl OutcomeSet {
    pub fn new(tuples: BTreeSet<Tuple>, provenance: Provenance) -> Self {
        OutcomeSet { tuples, provenance }
    }

    pub fn tuples(&self) -> &BTreeSet<Tuple> {
        &self.tuples
    }

    pub fn contains(&self, t: &[Value]) -> bool {
        self.tuples.contains(t)
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn iter(&self) -> impl Iterator<Item = &Tuple> {
        self.tuples.iter()
    }
}

/// Truth under the alternating semantics: disjunction over the domain at an
/// existential position, conjunction at a universal one, constraint
/// satisfaction at the leaves. Plain depth-first recursion with
/// short-circuiting and no other pruning.
pub fn evaluate_truth(phi: &Qcsp) -> bool {
    fn rec(phi: &Qcsp, i: usize, t: &mut Tuple) -> bool {
        if i == phi.num_vars() {
            return phi.satisfies_tuple(t);
        }
        let dom: Vec<Value> = phi.domain(i).to_vec();
        match phi.var(i).quantifier {
            Quantifier::Exists => dom.iter().any(|&v| {
                t[i] = v;
                rec(phi, i + 1, t)
            }),
            Quantifier::Forall => dom.iter().all(|&v| {
                t[i] = v;
                rec(phi, i + 1, t)
            }),
        }
    }
    let mut t = vec![0; phi.num_vars()];
    rec(phi, 0, &mut t)
}

/// Number of distinct strategies, saturating at `u128::MAX`.
pub fn strategy_space_size(phi: &Qcsp) -> u128 {
    let mut total = 1u128;
    for i in phi.existential_indices() {
        let keys = phi
            .universal_prefix(i)
            .iter()
            .fold(1u128, |acc, &j| acc.saturating_mul(phi.domain(j).len() as u128));
        let dom = phi.domain(i).len() as u128;
        let mut table_count = 1u128;
        let mut k = keys;
        while k > 0 {
            table_count = table_count.saturating_mul(dom);
            if table_count == u128::MAX {
                break;
            }
            k -= 1;
        }
        total = total.saturating_mul(table_count);
        if total == u128::MAX {
            break;
        }
    }
    total
}

/// Iterator over every strategy, each yielded exactly once.
pub struct StrategyIter<'a> {
    phi: &'a Qcsp,
    // flattened (existential var, cell) positions; counter per cell
    cells: Vec<usize>, // var index per cell, grouped by table
    table_bounds: Vec<(usize, usize)>, // (var, cell count) per table
    counters: Vec<usize>,
    done: bool,
}

impl<'a> StrategyIter<'a> {
    fn new(phi: &'a Qcsp) -> Self {
        let mut cells = Vec::new();
        let mut table_bounds = Vec::new();
        for i in phi.existential_indices() {
            let keys: usize = phi
                .universal_prefix(i)
                .iter()
                .map(|&j| phi.domain(j).len())
                .product();
            table_bounds.push((i, keys));
            cells.extend(std::iter::repeat(i).take(keys));
        }
        let counters = vec![0; cells.len()];
        StrategyIter { phi, cells, table_bounds, counters, done: false }
    }
}

impl Iterator for StrategyIter<'_> {
    type Item = Strategy;

    fn next(&mut self) -> Option<Strategy> {
        if self.done {
            return None;
        }
        let mut tables = Vec::with_capacity(self.table_bounds.len());
        let mut offset = 0;
        for &(var, keys) in &self.table_bounds {
            let outputs: Vec<Value> = self.counters[offset..offset + keys]
                .iter()
                .map(|&c| self.phi.domain(var)[c])
                .collect();
            tables.push(StrategyTable {
                var,
                inputs: self.phi.universal_prefix(var),
                outputs,
            });
            offset += keys;
        }
        // advance the mixed-radix counter
        let mut pos = self.counters.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.counters[pos] += 1;
            if self.counters[pos] < self.phi.domain(self.cells[pos]).len() {
                break;
            }
            self.counters[pos] = 0;
        }
        Some(Strategy { tables })
    }
}

/// Enumerates every strategy once. Errors when the strategy space exceeds
/// the limit.
pub fn enumerate_strategies<'a>(
    phi: &'a Qcsp,
    limits: &Limits,
) -> Result<StrategyIter<'a>, GameError> {
    let needed = strategy_space_size(phi);
    if needed > limits.max_strategies as u128 {
        return Err(GameError::StrategyLimitExceeded { needed, limit: limits.max_strategies });
    }
    Ok(StrategyIter::new(phi))
}

fn scenario_tuples<'a>(
    phi: &'a Qcsp,
    s: &'a Strategy,
) -> impl Iterator<Item = Tuple> + 'a {
    let universals = phi.universal_indices();
    let doms: Vec<&[Value]> = universals.iter().map(|&j| phi.domain(j)).collect();
    product_of(doms).map(move |u| {
        let mut t = vec![0; phi.num_vars()];
        let mut seen_universals: Vec<Value> = Vec::new();
        let mut table_pos = 0;
        for i in 0..phi.num_vars() {
            match phi.var(i).quantifier {
                Quantifier::Forall => {
                    t[i] = u[seen_universals.len()];
                    seen_universals.push(t[i]);
                }
                Quantifier::Exists => {
                    let table = &s.tables[table_pos];
                    let rank = table.rank(phi, &seen_universals).expect("validated key");
                    t[i] = table.outputs[rank];
                    table_pos += 1;
                }
            }
        }
        t
    })
}

/// All scenarios of a strategy: universal variables range freely, existential
/// values follow the tables.
pub fn scenarios(phi: &Qcsp, s: &Strategy) -> Result<BTreeSet<Tuple>, GameError> {
    s.validate(phi)?;
    Ok(scenario_tuples(phi, s).collect())
}

/// Whether every scenario of `s` satisfies the constraints.
pub fn is_winning(phi: &Qcsp, s: &Strategy) -> Result<bool, GameError> {
    s.validate(phi)?;
    Ok(scenario_tuples(phi, s).all(|t| phi.satisfies_tuple(&t)))
}

/// Outcome set by brute force: union of the scenarios of every winning
/// strategy.
pub fn outcomes_via_strategies(phi: &Qcsp, limits: &Limits) -> Result<OutcomeSet, GameError> {
    let mut tuples = BTreeSet::new();
    for s in enumerate_strategies(phi, limits)? {
        if scenario_tuples(phi, &s).all(|t| phi.satisfies_tuple(&t)) {
            tuples.extend(scenario_tuples(phi, &s));
        }
    }
    Ok(OutcomeSet::new(tuples, Provenance::StrategyEnumeration))
}

/// The augmented problem whose truth decides whether `t` is an outcome: for
/// each existential variable, adds a constraint forcing it to `t`'s value
/// whenever every preceding universal agrees with `t`.
pub fn outcome_augment(phi: &Qcsp, t: &Assignment) -> Result<Qcsp, GameError> {
    let tuple = phi.assignment_to_tuple(t)?;
    Ok(outcome_augment_tuple(phi, &tuple))
}

/// Dense-tuple form of `outcome_augment` (components in prefix order).
pub fn outcome_augment_tuple(phi: &Qcsp, t: &[Value]) -> Qcsp {
    let mut constraints = phi.constraints().to_vec();
    for i in phi.existential_indices() {
        let mut scope_idx = phi.universal_prefix(i);
        scope_idx.push(i);
        let scope: Vec<String> = scope_idx.iter().map(|&j| phi.var(j).name.clone()).collect();
        let doms: Vec<&[Value]> = scope_idx.iter().map(|&j| phi.domain(j)).collect();
        let key_len = scope_idx.len() - 1;
        let rows: Vec<Tuple> = product_of(doms)
            .filter(|row| {
                let antecedent = (0..key_len).all(|p| row[p] == t[scope_idx[p]]);
                !antecedent || row[key_len] == t[i]
            })
            .collect();
        constraints.push(Relation::new(scope, rows));
    }
    Qcsp::new_keeping_rows(phi.vars().to_vec(), constraints)
        .expect("augmentation preserves validity")
}

/// Membership of a single tuple in the outcome set, decided by solving the
/// augmented problem rather than materializing outcomes.
pub fn is_outcome(phi: &Qcsp, t: &Assignment) -> Result<bool, GameError> {
    let tuple = phi.assignment_to_tuple(t)?;
    Ok(is_outcome_tuple(phi, &tuple))
}

/// Dense-tuple form of `is_outcome`. Tuples outside the domain product are
/// never outcomes.
pub fn is_outcome_tuple(phi: &Qcsp, t: &[Value]) -> bool {
    if !phi.tuple_in_product(t) {
        return false;
    }
    evaluate_truth(&outcome_augment_tuple(phi, t))
}

/// Outcome set by lexicographic scan: every tuple of the domain product is
/// tested for outcome membership in order.
pub fn outcomes_lex(phi: &Qcsp, limits: &Limits) -> Result<OutcomeSet, GameError> {
    phi.check_tuple_limit(limits)?;
    let tuples: BTreeSet<Tuple> = phi
        .tuples()
        .filter(|t| is_outcome_tuple(phi, t))
        .collect();
    Ok(OutcomeSet::new(tuples, Provenance::LexicographicScan))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VariableDecl;

    fn all_universal() -> Qcsp {
        let vars = vec![
            VariableDecl::new("u", Quantifier::Forall, vec![0, 1]),
            VariableDecl::new("v", Quantifier::Forall, vec![0, 1]),
        ];
        Qcsp::new(vars, vec![]).unwrap()
    }

    #[test]
    fn all_universal_problem_has_one_empty_strategy() {
        let phi = all_universal();
        let strategies: Vec<_> =
            enumerate_strategies(&phi, &Limits::default()).unwrap().collect();
        assert_eq!(strategies.len(), 1);
        assert!(strategies[0].tables().is_empty());
        let sce = scenarios(&phi, &strategies[0]).unwrap();
        assert_eq!(sce.len(), 4);
        assert!(is_winning(&phi, &strategies[0]).unwrap());
    }

    #[test]
    fn single_existential_has_constant_strategies() {
        let vars = vec![VariableDecl::new("x", Quantifier::Exists, vec![1, 2, 3])];
        let phi = Qcsp::new(vars, vec![]).unwrap();
        let strategies: Vec<_> =
            enumerate_strategies(&phi, &Limits::default()).unwrap().collect();
        assert_eq!(strategies.len(), 3);
        for s in &strategies {
            assert_eq!(scenarios(&phi, s).unwrap().len(), 1);
        }
    }

    #[test]
    fn strategy_limit_is_enforced() {
        let vars = vec![
            VariableDecl::new("u", Quantifier::Forall, vec![0, 1, 2]),
            VariableDecl::new("x", Quantifier::Exists, vec![0, 1, 2]),
        ];
        let phi = Qcsp::new(vars, vec![]).unwrap();
        assert_eq!(strategy_space_size(&phi), 27);
        let tight = Limits { max_strategies: 10, ..Limits::default() };
        assert!(matches!(
            enumerate_strategies(&phi, &tight),
            Err(GameError::StrategyLimitExceeded { needed: 27, limit: 10 })
        ));
    }

    #[test]
    fn malformed_strategy_is_rejected() {
        let vars = vec![VariableDecl::new("x", Quantifier::Exists, vec![1, 2])];
        let phi = Qcsp::new(vars, vec![]).unwrap();
        let bad = Strategy {
            tables: vec![StrategyTable { var: 0, inputs: vec![], outputs: vec![9] }],
        };
        assert!(matches!(scenarios(&phi, &bad), Err(GameError::MalformedStrategy(_))));
        assert!(Strategy::from_fn(&phi, |_, _| 9).is_err());
    }

    #[test]
    fn out_of_product_tuple_is_not_an_outcome() {
        let vars = vec![VariableDecl::new("x", Quantifier::Exists, vec![1, 2])];
        let phi = Qcsp::new(vars, vec![]).unwrap();
        assert!(!is_outcome_tuple(&phi, &[99]));
        assert!(is_outcome_tuple(&phi, &[1]));
    }
}
