//! Self-describing JSON documents emitted by the CLI, one per invocation,
//! tagged by the subcommand that produced them.

use serde::Serialize;

use crate::harness::PropositionReport;
use crate::local::LocalReport;
use crate::model::Tuple;
use crate::properties::{PropertyQuery, Verdict};
use crate::simplify::SimplificationLog;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Report {
    Solve {
        truth: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        expected: Option<bool>,
    },
    Outcomes {
        /// Total outcome count, before any `--limit` cap.
        count: usize,
        truncated: bool,
        tuples: Vec<Tuple>,
    },
    Membership {
        tuple: Tuple,
        is_outcome: bool,
    },
    Check {
        query: PropertyQuery,
        verdict: Verdict,
    },
    Simplify {
        /// The transformed problem in the text format.
        problem: String,
        log: SimplificationLog,
    },
    Local {
        report: LocalReport,
    },
    LocalPrune {
        problem: String,
        log: SimplificationLog,
    },
    Validate {
        report: PropositionReport,
    },
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }
}
