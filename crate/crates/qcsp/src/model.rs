//! Core problem representation: variables with an ordered quantifier prefix,
//! finite integer domains, extensional constraints, and tuple algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Domain element. Domains are finite sets of 64-bit integers.
pub type Value = i64;

/// A total assignment in prefix order, one value per variable.
pub type Tuple = Vec<Value>;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ModelError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(String),
    #[error("empty domain for variable `{0}`")]
    EmptyDomain(String),
    #[error("constraint row has {got} values but scope has {want}")]
    RowArity { want: usize, got: usize },
    #[error("constraint row value {value} is outside the domain of `{var}`")]
    RowValueOutOfDomain { var: String, value: Value },
    #[error("constraint scope repeats variable `{0}`")]
    DuplicateScopeVariable(String),
    #[error("assignment is not total: `{0}` is unassigned")]
    NotTotal(String),
    #[error("restriction target `{0}` is not assigned")]
    NotAssigned(String),
    #[error("enumeration limit exceeded: {needed} tuples > limit {limit}")]
    TupleLimitExceeded { needed: u128, limit: u64 },
    #[error("value {value} is not in the domain of `{var}`")]
    ValueNotInDomain { var: String, value: Value },
    #[error("removing {value} would empty the domain of `{var}`")]
    WouldEmptyDomain { var: String, value: Value },
    #[error("constraint index {index} out of range (have {count} constraints)")]
    ConstraintIndexOutOfRange { index: usize, count: usize },
}

/// Resource limits for exhaustive operations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum number of total tuples an enumeration may visit.
    pub max_tuples: u64,
    /// Maximum number of strategy tables an enumeration may visit.
    pub max_strategies: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_tuples: 1_000_000, max_strategies: 1_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantifier {
    Exists,
    Forall,
}

impl fmt::Display for Quantifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantifier::Exists => write!(f, "exists"),
            Quantifier::Forall => write!(f, "forall"),
        }
    }
}

/// One variable of the prefix. Position in the declaration sequence is the
/// variable's (0-based) index; declaration order is quantification order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDecl {
    pub name: String,
    pub quantifier: Quantifier,
    pub domain: Vec<Value>,
}

impl VariableDecl {
    pub fn new(name: impl Into<String>, quantifier: Quantifier, domain: Vec<Value>) -> Self {
        VariableDecl { name: name.into(), quantifier, domain }
    }
}

/// An extensional constraint: an ordered scope and the set of accepted rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    scope: Vec<String>,
    rows: BTreeSet<Tuple>,
}

impl Relation {
    pub fn new(scope: Vec<String>, rows: impl IntoIterator<Item = Tuple>) -> Self {
        Relation { scope, rows: rows.into_iter().collect() }
    }

    pub fn scope(&self) -> &[String] {
        &self.scope
    }

    pub fn rows(&self) -> &BTreeSet<Tuple> {
        &self.rows
    }

    pub fn contains(&self, row: &[Value]) -> bool {
        self.rows.contains(row)
    }
}

/// A partial or total mapping from variable names to values.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Assignment {
    values: BTreeMap<String, Value>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (impl Into<String>, Value)>) -> Self {
        Assignment { values: pairs.into_iter().map(|(k, v)| (k.into(), v)).collect() }
    }

    pub fn get(&self, var: &str) -> Option<Value> {
        self.values.get(var).copied()
    }

    pub fn is_assigned(&self, var: &str) -> bool {
        self.values.contains_key(var)
    }

    /// Pointwise update `t[x:=a]`: returns a copy with `var` bound to `value`.
    pub fn with(&self, var: impl Into<String>, value: Value) -> Assignment {
        let mut values = self.values.clone();
        values.insert(var.into(), value);
        Assignment { values }
    }

    /// Restriction `t|_U`: keeps exactly the named variables, which must all
    /// be assigned.
    pub fn restrict<'a>(
        &self,
        vars: impl IntoIterator<Item = &'a str>,
    ) -> Result<Assignment, ModelError> {
        let mut values = BTreeMap::new();
        for var in vars {
            match self.values.get(var) {
                Some(&v) => {
                    values.insert(var.to_string(), v);
                }
                None => return Err(ModelError::NotAssigned(var.to_string())),
            }
        }
        Ok(Assignment { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Value)> {
        self.values.iter().map(|(k, &v)| (k.as_str(), v))
    }
}

/// A quantified constraint satisfaction problem.
///
/// Immutable after construction; all operations return new values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qcsp {
    vars: Vec<VariableDecl>,
    constraints: Vec<Relation>,
    index: BTreeMap<String, usize>,
    scope_idx: Vec<Vec<usize>>,
}

impl Qcsp {
    /// Builds and validates a problem. Domains are sorted and deduplicated;
    /// constraint rows must fit their scope's arity and domains.
    pub fn new(vars: Vec<VariableDecl>, constraints: Vec<Relation>) -> Result<Self, ModelError> {
        Self::build(vars, constraints, true)
    }

    /// Like `new` but keeps constraint rows whose values fall outside the
    /// current domains. Domain-shrinking transformations leave rows intact;
    /// such rows are unreachable, not errors.
    pub(crate) fn new_keeping_rows(
        vars: Vec<VariableDecl>,
        constraints: Vec<Relation>,
    ) -> Result<Self, ModelError> {
        Self::build(vars, constraints, false)
    }

    fn build(
        mut vars: Vec<VariableDecl>,
        constraints: Vec<Relation>,
        check_row_domains: bool,
    ) -> Result<Self, ModelError> {
        let mut index = BTreeMap::new();
        for (i, v) in vars.iter_mut().enumerate() {
            v.domain.sort_unstable();
            v.domain.dedup();
            if v.domain.is_empty() {
                return Err(ModelError::EmptyDomain(v.name.clone()));
            }
            if index.insert(v.name.clone(), i).is_some() {
                return Err(ModelError::DuplicateVariable(v.name.clone()));
            }
        }
        let mut scope_idx = Vec::with_capacity(constraints.len());
        for c in &constraints {
            let mut seen = BTreeSet::new();
            let mut idx = Vec::with_capacity(c.scope.len());
            for name in &c.scope {
                let &i = index
                    .get(name)
                    .ok_or_else(|| ModelError::UnknownVariable(name.clone()))?;
                if !seen.insert(i) {
                    return Err(ModelError::DuplicateScopeVariable(name.clone()));
                }
                idx.push(i);
            }
            for row in &c.rows {
                if row.len() != c.scope.len() {
                    return Err(ModelError::RowArity { want: c.scope.len(), got: row.len() });
                }
                if check_row_domains {
                    for (pos, &v) in row.iter().enumerate() {
                        let var = &vars[idx[pos]];
                        if !var.domain.contains(&v) {
                            return Err(ModelError::RowValueOutOfDomain {
                                var: var.name.clone(),
                                value: v,
                            });
                        }
                    }
                }
            }
            scope_idx.push(idx);
        }
        Ok(Qcsp { vars, constraints, index, scope_idx })
    }

    pub fn vars(&self) -> &[VariableDecl] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn var(&self, i: usize) -> &VariableDecl {
        &self.vars[i]
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn require_var(&self, name: &str) -> Result<usize, ModelError> {
        self.var_index(name)
            .ok_or_else(|| ModelError::UnknownVariable(name.to_string()))
    }

    pub fn domain(&self, i: usize) -> &[Value] {
        &self.vars[i].domain
    }

    pub fn constraints(&self) -> &[Relation] {
        &self.constraints
    }

    pub fn scope_indices(&self, k: usize) -> &[usize] {
        &self.scope_idx[k]
    }

    pub fn is_existential(&self, i: usize) -> bool {
        self.vars[i].quantifier == Quantifier::Exists
    }

    pub fn is_universal(&self, i: usize) -> bool {
        self.vars[i].quantifier == Quantifier::Forall
    }

    /// Indices of the existential variables, in prefix order (the set E).
    pub fn existential_indices(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.is_existential(i)).collect()
    }

    /// Indices of the universal variables, in prefix order (the set A).
    pub fn universal_indices(&self) -> Vec<usize> {
        (0..self.vars.len()).filter(|&i| self.is_universal(i)).collect()
    }

    /// Universal variables strictly preceding position `i` (the set A_{i-1}).
    pub fn universal_prefix(&self, i: usize) -> Vec<usize> {
        (0..i).filter(|&j| self.is_universal(j)).collect()
    }

    /// Number of total tuples over the domain product, saturating.
    pub fn product_size(&self) -> u128 {
        self.vars
            .iter()
            .fold(1u128, |acc, v| acc.saturating_mul(v.domain.len() as u128))
    }

    pub(crate) fn check_tuple_limit(&self, limits: &Limits) -> Result<(), ModelError> {
        let needed = self.product_size();
        if needed > limits.max_tuples as u128 {
            return Err(ModelError::TupleLimitExceeded { needed, limit: limits.max_tuples });
        }
        Ok(())
    }

    /// Iterates all total tuples in lexicographic (prefix, ascending value)
    /// order. Does not check limits.
    pub fn tuples(&self) -> Product<'_> {
        Product::new(self.vars.iter().map(|v| v.domain.as_slice()).collect())
    }

    /// Whether a total tuple (prefix order) satisfies every constraint.
    /// Values outside the domains simply fail to match rows.
    pub fn satisfies_tuple(&self, t: &[Value]) -> bool {
        debug_assert_eq!(t.len(), self.vars.len());
        self.constraints.iter().zip(&self.scope_idx).all(|(c, idx)| {
            let row: Tuple = idx.iter().map(|&i| t[i]).collect();
            c.contains(&row)
        })
    }

    /// Membership of an assignment in the constraint conjunction. The
    /// assignment must be total on the problem's variables.
    pub fn satisfies(&self, t: &Assignment) -> Result<bool, ModelError> {
        let tuple = self.assignment_to_tuple(t)?;
        Ok(self.satisfies_tuple(&tuple))
    }

    /// `t[x:=a]` with the variable checked against the declaration list.
    pub fn instantiate(
        &self,
        t: &Assignment,
        var: &str,
        value: Value,
    ) -> Result<Assignment, ModelError> {
        self.require_var(var)?;
        Ok(t.with(var, value))
    }

    /// All total tuples satisfying every constraint, in lexicographic order.
    pub fn enumerate_solutions(&self, limits: &Limits) -> Result<BTreeSet<Tuple>, ModelError> {
        self.check_tuple_limit(limits)?;
        Ok(self.tuples().filter(|t| self.satisfies_tuple(t)).collect())
    }

    /// The same problem with every quantifier made existential.
    pub fn relax_existential(&self) -> Qcsp {
        let mut relaxed = self.clone();
        for v in &mut relaxed.vars {
            v.quantifier = Quantifier::Exists;
        }
        relaxed
    }

    /// The negated problem: quantifiers flipped, constraints replaced by one
    /// full-scope relation holding the complement of the solution set. The
    /// complement is materialized, so the domain product must fit the limit.
    pub fn negate(&self, limits: &Limits) -> Result<Qcsp, ModelError> {
        let sol = self.enumerate_solutions(limits)?;
        let rows: Vec<Tuple> = self.tuples().filter(|t| !sol.contains(t)).collect();
        let vars: Vec<VariableDecl> = self
            .vars
            .iter()
            .map(|v| {
                let quantifier = match v.quantifier {
                    Quantifier::Exists => Quantifier::Forall,
                    Quantifier::Forall => Quantifier::Exists,
                };
                VariableDecl::new(v.name.clone(), quantifier, v.domain.clone())
            })
            .collect();
        let scope = self.vars.iter().map(|v| v.name.clone()).collect();
        Qcsp::new(vars, vec![Relation::new(scope, rows)])
    }

    /// Same problem with the domain of variable `i` replaced. Constraint rows
    /// are kept as-is.
    pub(crate) fn with_domain(&self, i: usize, domain: Vec<Value>) -> Result<Qcsp, ModelError> {
        let mut vars = self.vars.clone();
        vars[i].domain = domain;
        Qcsp::new_keeping_rows(vars, self.constraints.clone())
    }

    pub fn tuple_to_assignment(&self, t: &[Value]) -> Assignment {
        Assignment::from_pairs(
            self.vars.iter().zip(t.iter()).map(|(v, &a)| (v.name.clone(), a)),
        )
    }

    pub fn assignment_to_tuple(&self, t: &Assignment) -> Result<Tuple, ModelError> {
        self.vars
            .iter()
            .map(|v| t.get(&v.name).ok_or_else(|| ModelError::NotTotal(v.name.clone())))
            .collect()
    }

    /// Whether every component of a total tuple lies in its domain.
    pub fn tuple_in_product(&self, t: &[Value]) -> bool {
        t.len() == self.vars.len()
            && self.vars.iter().zip(t.iter()).all(|(v, a)| v.domain.contains(a))
    }
}

/// Odometer over a list of domains, yielding tuples in lexicographic order.
pub struct Product<'a> {
    doms: Vec<&'a [Value]>,
    idx: Vec<usize>,
    done: bool,
}

impl<'a> Product<'a> {
    pub(crate) fn new(doms: Vec<&'a [Value]>) -> Self {
        let done = doms.iter().any(|d| d.is_empty());
        let idx = vec![0; doms.len()];
        Product { doms, idx, done }
    }
}

impl Iterator for Product<'_> {
    type Item = Tuple;

    fn next(&mut self) -> Option<Tuple> {
        if self.done {
            return None;
        }
        let out: Tuple = self.doms.iter().zip(&self.idx).map(|(d, &i)| d[i]).collect();
        // advance rightmost position first
        let mut pos = self.doms.len();
        loop {
            if pos == 0 {
                self.done = true;
                break;
            }
            pos -= 1;
            self.idx[pos] += 1;
            if self.idx[pos] < self.doms[pos].len() {
                break;
            }
            self.idx[pos] = 0;
        }
        Some(out)
    }
}

/// Product over an explicit list of domain slices (helper for engines that
/// enumerate sub-products such as constraint scopes).
pub(crate) fn product_of<'a>(doms: Vec<&'a [Value]>) -> Product<'a> {
    Product::new(doms)
}
