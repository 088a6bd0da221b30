//! Per-constraint (local) property detection with sound combination rules,
//! and a pruning loop driven only by local certificates.
//!
//! A verdict on the single-constraint subproblem transfers to the full
//! problem by OR for inconsistent/implied/determined/dependent and by AND
//! for fixable/substitutable/interchangeable/irrelevant. There is no sound
//! rule for removability, and no sound per-constraint rule for shallow
//! properties; both are rejected outright.

use serde::Serialize;
use thiserror::Error;

use crate::game::{outcomes_lex, GameError};
use crate::model::{Limits, ModelError, Qcsp};
use crate::properties::{
    check_deep_on, Family, Kind, PropertyError, PropertyQuery, Verdict,
};
use crate::simplify::{remove_value, Action, SimplificationLog, Step};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum LocalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Property(#[from] PropertyError),
    #[error("no sound per-constraint rule exists for `removable`: every constraint can certify it while the full problem falsifies it")]
    NoSoundRule,
    #[error("per-constraint reasoning is unsound for the `{0}` family: a local certificate does not transfer to the full problem; only deep queries are accepted")]
    UnsoundFamily(Family),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CombineMode {
    AnyConstraint,
    EveryConstraint,
}

/// Per-constraint verdicts and their sound combination. `combined = true`
/// certifies the property on the full problem; `combined = false` is
/// inconclusive, never a refutation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalReport {
    pub query: PropertyQuery,
    pub mode: CombineMode,
    pub per_constraint: Vec<Verdict>,
    pub combined: bool,
}

/// The subproblem with the same prefix and domains but only the `k`-th
/// constraint (0-based).
pub fn project_single_constraint(phi: &Qcsp, k: usize) -> Result<Qcsp, LocalError> {
    let m = phi.constraints().len();
    if k >= m {
        return Err(LocalError::Model(ModelError::ConstraintIndexOutOfRange {
            index: k,
            count: m,
        }));
    }
    let c = phi.constraints()[k].clone();
    Ok(Qcsp::new_keeping_rows(phi.vars().to_vec(), vec![c])?)
}

fn combine_mode(kind: Kind) -> Result<CombineMode, LocalError> {
    match kind {
        Kind::Inconsistent | Kind::Implied | Kind::Determined | Kind::Dependent => {
            Ok(CombineMode::AnyConstraint)
        }
        Kind::Fixable | Kind::Substitutable | Kind::Interchangeable | Kind::Irrelevant => {
            Ok(CombineMode::EveryConstraint)
        }
        Kind::Removable => Err(LocalError::NoSoundRule),
    }
}

/// Run the deep check on every single-constraint subproblem and combine.
pub fn local_detect(
    phi: &Qcsp,
    q: &PropertyQuery,
    limits: &Limits,
) -> Result<LocalReport, LocalError> {
    if q.family != Family::Deep {
        return Err(LocalError::UnsoundFamily(q.family));
    }
    let mode = combine_mode(q.kind)?;
    let mut per_constraint = Vec::with_capacity(phi.constraints().len());
    for k in 0..phi.constraints().len() {
        let sub = project_single_constraint(phi, k)?;
        let out = outcomes_lex(&sub, limits)?;
        per_constraint.push(check_deep_on(&sub, out.tuples(), q)?);
    }
    let combined = match mode {
        CombineMode::AnyConstraint => per_constraint.iter().any(|v| v.holds),
        CombineMode::EveryConstraint => per_constraint.iter().all(|v| v.holds),
    };
    Ok(LocalReport { query: q.clone(), mode, per_constraint, combined })
}

/// Remove values certified by local inconsistency alone, to a fixpoint.
///
/// For an existential variable, a value absent from the outcomes of some
/// single-constraint subproblem is inconsistent there, hence inconsistent
/// globally (winning strategies of the full problem also win the
/// subproblem), hence removable. For a universal variable the same argument
/// runs on the negated subproblems. Inconclusive checks never prune.
pub fn local_prune_fixpoint(
    phi: &Qcsp,
    limits: &Limits,
) -> Result<(Qcsp, SimplificationLog), LocalError> {
    let mut cur = phi.clone();
    let mut log = SimplificationLog::default();
    'progress: loop {
        for k in 0..cur.constraints().len() {
            let sub = project_single_constraint(&cur, k)?;
            let out_e = outcomes_lex(&sub, limits)?;
            let out_u = outcomes_lex(&sub.negate(limits)?, limits)?;
            for i in 0..cur.num_vars() {
                if cur.domain(i).len() < 2 {
                    continue;
                }
                let existential = cur.is_existential(i);
                let out = if existential { &out_e } else { &out_u };
                let name = cur.var(i).name.clone();
                for a in cur.domain(i).to_vec() {
                    if out.iter().any(|t| t[i] == a) {
                        continue;
                    }
                    let justification = if existential {
                        PropertyQuery::value(Family::Deep, Kind::Inconsistent, &*name, a)
                    } else {
                        PropertyQuery::value(Family::DualShallow, Kind::Removable, &*name, a)
                    };
                    cur = remove_value(&cur, &name, a)?;
                    log.steps.push(Step {
                        variable: name,
                        action: Action::Removed,
                        value: a,
                        justification,
                        truth_before: None,
                        truth_after: None,
                    });
                    continue 'progress;
                }
            }
        }
        return Ok((cur, log));
    }
}
