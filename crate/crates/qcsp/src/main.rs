use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcsp::format::{parse_qcsp, print_qcsp};
use qcsp::game::{evaluate_truth, is_outcome_tuple, outcomes_lex};
use qcsp::harness::{random_suite, validate_propositions, GenConfig};
use qcsp::local::{local_detect, local_prune_fixpoint};
use qcsp::model::{Limits, Qcsp, Value};
use qcsp::properties::{check, Family, Kind, PropertyQuery};
use qcsp::report::Report;
use qcsp::simplify::simplify_fixpoint;

#[derive(Parser)]
#[command(
    name = "qcsp",
    version,
    about = "Analyze quantified constraint satisfaction problems: truth, outcomes, value properties, simplification, local reasoning"
)]
struct Cli {
    /// Emit one JSON document instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Abort set enumerations larger than this many tuples
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_tuples: u64,
    /// Abort strategy enumerations larger than this many strategies
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_strategies: u64,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct QueryArgs {
    /// Property kind
    #[arg(long)]
    kind: Kind,
    /// Queried variable
    #[arg(long)]
    var: String,
    /// Value `a` of the query
    #[arg(long)]
    val: Option<Value>,
    /// Second value `b` for substitutable/interchangeable
    #[arg(long)]
    to: Option<Value>,
    /// Determining variable set for dependence, comma separated
    #[arg(long, value_delimiter = ',')]
    set: Option<Vec<String>>,
}

impl QueryArgs {
    fn into_query(self, family: Family) -> PropertyQuery {
        PropertyQuery {
            family,
            kind: self.kind,
            variable: self.var,
            a: self.val,
            b: self.to,
            over: self.set,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the problem is true
    Solve {
        file: PathBuf,
        /// Exit with status 1 when the problem is false
        #[arg(long)]
        expect_true: bool,
    },
    /// List the outcome set, or test one tuple for membership
    Outcomes {
        file: PathBuf,
        /// Print at most this many tuples
        #[arg(long)]
        limit: Option<usize>,
        /// Test membership of one tuple, values comma separated in prefix order
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        member: Option<Vec<Value>>,
    },
    /// Decide one property query
    Check {
        file: PathBuf,
        /// Property family
        #[arg(long)]
        family: Family,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Apply licensed removals and fixes to a fixpoint
    Simplify {
        file: PathBuf,
        /// Record truth before and after every step
        #[arg(long)]
        verify: bool,
    },
    /// Per-constraint detection, or certificate-driven pruning
    Local {
        file: PathBuf,
        /// Prune locally certified inconsistent values instead of querying
        #[arg(long, conflicts_with_all = ["kind", "var", "val", "to", "set"])]
        prune: bool,
        #[arg(long, required_unless_present = "prune")]
        kind: Option<Kind>,
        #[arg(long, required_unless_present = "prune")]
        var: Option<String>,
        #[arg(long)]
        val: Option<Value>,
        #[arg(long)]
        to: Option<Value>,
        #[arg(long, value_delimiter = ',')]
        set: Option<Vec<String>>,
    },
    /// Generate random instances and validate every guaranteed law
    Validate {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 4)]
        max_vars: usize,
        #[arg(long, default_value_t = 3)]
        max_dom: usize,
    },
}

fn load(path: &PathBuf, limits: &Limits) -> Result<Qcsp, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_qcsp(&text, limits).map_err(|e| format!("{}: {e}", path.display()))
}

fn format_tuple(t: &[Value]) -> String {
    let body: Vec<String> = t.iter().map(Value::to_string).collect();
    format!("({})", body.join(","))
}

fn emit(json: bool, report: &Report, text: impl FnOnce() -> String) {
    if json {
        println!("{}", report.to_json());
    } else {
        println!("{}", text());
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    let limits = Limits { max_tuples: cli.max_tuples, max_strategies: cli.max_strategies };
    let json = cli.json;
    match cli.cmd {
        Cmd::Solve { file, expect_true } => {
            let phi = load(&file, &limits)?;
            let truth = evaluate_truth(&phi);
            let report =
                Report::Solve { truth, expected: expect_true.then_some(true) };
            emit(json, &report, || truth.to_string());
            Ok(if expect_true && !truth { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Cmd::Outcomes { file, limit, member } => {
            let phi = load(&file, &limits)?;
            if let Some(tuple) = member {
                if tuple.len() != phi.num_vars() {
                    return Err(format!(
                        "--member has {} values but the problem has {} variables",
                        tuple.len(),
                        phi.num_vars()
                    ));
                }
                let is_outcome = is_outcome_tuple(&phi, &tuple);
                let report = Report::Membership { tuple: tuple.clone(), is_outcome };
                emit(json, &report, || {
                    format!("member {}: {is_outcome}", format_tuple(&tuple))
                });
                return Ok(ExitCode::SUCCESS);
            }
            let out = outcomes_lex(&phi, &limits).map_err(|e| e.to_string())?;
            let count = out.len();
            let cap = limit.unwrap_or(count);
            let tuples: Vec<_> = out.iter().take(cap).cloned().collect();
            let truncated = tuples.len() < count;
            let report = Report::Outcomes { count, truncated, tuples: tuples.clone() };
            emit(json, &report, || {
                let mut lines: Vec<String> = tuples.iter().map(|t| format_tuple(t)).collect();
                if truncated {
                    lines.push(format!("... ({count} total, showing {})", cap));
                }
                lines.join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check { file, family, query } => {
            let phi = load(&file, &limits)?;
            let q = query.into_query(family);
            let verdict = check(&phi, &q, &limits).map_err(|e| e.to_string())?;
            let report = Report::Check { query: q, verdict: verdict.clone() };
            emit(json, &report, || {
                let mut s = format!("holds: {}\nmethod: {}", verdict.holds, verdict.method);
                if let Some(w) = &verdict.witness {
                    s.push_str(&format!(
                        "\nwitness: {}",
                        serde_json::to_string(w).expect("witnesses serialize")
                    ));
                }
                s
            });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Simplify { file, verify } => {
            let phi = load(&file, &limits)?;
            let (result, log) =
                simplify_fixpoint(&phi, &limits, verify).map_err(|e| e.to_string())?;
            let problem = print_qcsp(&result);
            let report = Report::Simplify { problem: problem.clone(), log: log.clone() };
            emit(json, &report, || {
                let mut s = problem.clone();
                for step in &log.steps {
                    s.push_str(&serde_json::to_string(step).expect("steps serialize"));
                    s.push('\n');
                }
                s.pop();
                s
            });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Local { file, prune, kind, var, val, to, set } => {
            let phi = load(&file, &limits)?;
            if prune {
                let (result, log) =
                    local_prune_fixpoint(&phi, &limits).map_err(|e| e.to_string())?;
                let problem = print_qcsp(&result);
                let report = Report::LocalPrune { problem: problem.clone(), log: log.clone() };
                emit(json, &report, || {
                    let mut s = problem.clone();
                    for step in &log.steps {
                        s.push_str(&serde_json::to_string(step).expect("steps serialize"));
                        s.push('\n');
                    }
                    s.pop();
                    s
                });
                return Ok(ExitCode::SUCCESS);
            }
            let q = QueryArgs { kind: kind.expect("required"), var: var.expect("required"), val, to, set }
                .into_query(Family::Deep);
            let report = local_detect(&phi, &q, &limits).map_err(|e| e.to_string())?;
            let doc = Report::Local { report: report.clone() };
            emit(json, &doc, || {
                let mut lines = vec!["constraint  holds".to_string()];
                for (k, v) in report.per_constraint.iter().enumerate() {
                    lines.push(format!("{k:<11} {}", v.holds));
                }
                lines.push(format!(
                    "combined ({}): {}",
                    serde_json::to_value(report.mode)
                        .expect("modes serialize")
                        .as_str()
                        .unwrap_or_default(),
                    report.combined
                ));
                lines.join("\n")
            });
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Validate { count, seed, max_vars, max_dom } => {
            let cfg = GenConfig {
                vars: 2..=max_vars,
                domain_size: 2..=max_dom,
                seed,
                ..GenConfig::default()
            };
            let instances = random_suite(&cfg, count).map_err(|e| e.to_string())?;
            let report = validate_propositions(&instances, &limits);
            let clean = report.is_clean();
            let doc = Report::Validate { report: report.clone() };
            emit(json, &doc, || {
                let mut lines = Vec::new();
                lines.push(format!("instances: {}", report.instances));
                for (law, s) in &report.stats {
                    lines.push(format!(
                        "{law}: checked={} skipped={} violations={}",
                        s.checked, s.skipped, s.violations
                    ));
                }
                for v in &report.violations {
                    lines.push(format!("violation [{}]: {}", v.law, v.detail));
                    lines.push(v.instance.trim_end().to_string());
                }
                lines.push(format!("violations: {}", report.violations.len()));
                lines.join("\n")
            });
            Ok(if clean { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
