//! Truth-preserving transformations: removing or fixing a value licensed by
//! a shallow property (existential variables) or its dual on the negated
//! problem (universal variables), plus a justified fixpoint loop.

use serde::Serialize;

use crate::game::evaluate_truth;
use crate::model::{Limits, ModelError, Qcsp, Value};
use crate::properties::{check, Family, Kind, PropertyError, PropertyQuery};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Action {
    Removed,
    Fixed,
}

/// One applied transformation together with the query whose verdict
/// licensed it. Truth before/after are recorded in verification mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Step {
    pub variable: String,
    pub action: Action,
    pub value: Value,
    pub justification: PropertyQuery,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_before: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_after: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SimplificationLog {
    pub steps: Vec<Step>,
}

/// Shrink `x`'s domain by `a`. Constraint rows mentioning `a` stay in place
/// and simply become unreachable, which keeps steps invertible from the log.
pub fn remove_value(phi: &Qcsp, x: &str, a: Value) -> Result<Qcsp, ModelError> {
    let i = phi.require_var(x)?;
    let dom = phi.domain(i);
    if !dom.contains(&a) {
        return Err(ModelError::ValueNotInDomain { var: x.to_string(), value: a });
    }
    if dom.len() < 2 {
        return Err(ModelError::WouldEmptyDomain { var: x.to_string(), value: a });
    }
    let new_dom: Vec<Value> = dom.iter().copied().filter(|&v| v != a).collect();
    phi.with_domain(i, new_dom)
}

/// Collapse `x`'s domain to `{a}`.
pub fn fix_value(phi: &Qcsp, x: &str, a: Value) -> Result<Qcsp, ModelError> {
    let i = phi.require_var(x)?;
    if !phi.domain(i).contains(&a) {
        return Err(ModelError::ValueNotInDomain { var: x.to_string(), value: a });
    }
    phi.with_domain(i, vec![a])
}

fn licensing_query(phi: &Qcsp, var: usize, a: Value, action: Action) -> PropertyQuery {
    let family = if phi.is_existential(var) { Family::Shallow } else { Family::DualShallow };
    let kind = match action {
        Action::Removed => Kind::Removable,
        Action::Fixed => Kind::Fixable,
    };
    PropertyQuery::value(family, kind, phi.var(var).name.clone(), a)
}

/// Apply the transformation only when its licensing verdict holds; refusal
/// (a `None` return) is a normal outcome, not an error.
pub fn justified_step(
    phi: &Qcsp,
    x: &str,
    a: Value,
    action: Action,
    limits: &Limits,
    verify: bool,
) -> Result<Option<(Qcsp, Step)>, PropertyError> {
    let i = phi.require_var(x)?;
    if !phi.domain(i).contains(&a) {
        return Err(PropertyError::Model(ModelError::ValueNotInDomain {
            var: x.to_string(),
            value: a,
        }));
    }
    if action == Action::Removed && phi.domain(i).len() < 2 {
        return Ok(None);
    }
    let justification = licensing_query(phi, i, a, action);
    if !check(phi, &justification, limits)?.holds {
        return Ok(None);
    }
    let next = match action {
        Action::Removed => remove_value(phi, x, a)?,
        Action::Fixed => fix_value(phi, x, a)?,
    };
    let (truth_before, truth_after) = if verify {
        (Some(evaluate_truth(phi)), Some(evaluate_truth(&next)))
    } else {
        (None, None)
    };
    let step = Step {
        variable: x.to_string(),
        action,
        value: a,
        justification,
        truth_before,
        truth_after,
    };
    Ok(Some((next, step)))
}

/// Repeatedly apply justified steps until none applies. Candidate order:
/// ascending variable index, ascending value, removals before fixes; a fix
/// is attempted only while the domain still has more than one value. Each
/// applied step strictly shrinks the summed domain size, so the loop runs
/// at most that many iterations.
pub fn simplify_fixpoint(
    phi: &Qcsp,
    limits: &Limits,
    verify: bool,
) -> Result<(Qcsp, SimplificationLog), PropertyError> {
    let mut cur = phi.clone();
    let mut log = SimplificationLog::default();
    'progress: loop {
        for action in [Action::Removed, Action::Fixed] {
            for i in 0..cur.num_vars() {
                if cur.domain(i).len() < 2 {
                    continue;
                }
                let name = cur.var(i).name.clone();
                for a in cur.domain(i).to_vec() {
                    if let Some((next, step)) =
                        justified_step(&cur, &name, a, action, limits, verify)?
                    {
                        cur = next;
                        log.steps.push(step);
                        continue 'progress;
                    }
                }
            }
        }
        return Ok((cur, log));
    }
}
