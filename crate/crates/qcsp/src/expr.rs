//! Linear comparison expressions and their compilation to extensional
//! constraint tables. An expression is `sum CMP sum` where each sum is an
//! integer-weighted combination of variables plus a constant, and CMP is one
//! of `=`, `!=`, `<=`, `<`, `>=`, `>`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::model::{product_of, Limits, Relation, Value, VariableDecl};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExprError {
    #[error("column {col}: unexpected character `{ch}`")]
    UnexpectedChar { col: usize, ch: char },
    #[error("column {col}: expected {expected}")]
    Expected { col: usize, expected: String },
    #[error("expression has no comparison operator")]
    MissingComparison,
    #[error("expression has more than one comparison operator")]
    ExtraComparison,
    #[error("unknown variable `{0}` in expression")]
    UnknownVariable(String),
    #[error("nonlinear term: `{0}` multiplied by a variable")]
    Nonlinear(String),
    #[error("scope product {needed} exceeds tuple limit {limit}")]
    LimitExceeded { needed: u128, limit: u64 },
}

impl ExprError {
    /// 1-based column of the offending token within the expression source,
    /// or 1 when the error has no position.
    pub fn column(&self) -> usize {
        match self {
            ExprError::UnexpectedChar { col, .. } | ExprError::Expected { col, .. } => *col,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Le,
    Lt,
    Ge,
    Gt,
}

impl CmpOp {
    pub fn eval(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CmpOp::Eq => lhs == rhs,
            CmpOp::Ne => lhs != rhs,
            CmpOp::Le => lhs <= rhs,
            CmpOp::Lt => lhs < rhs,
            CmpOp::Ge => lhs >= rhs,
            CmpOp::Gt => lhs > rhs,
        }
    }
}

/// A normalized linear comparison: coefficients per variable and a constant,
/// for each side of the operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonExpr {
    pub lhs: LinearSum,
    pub op: CmpOp,
    pub rhs: LinearSum,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinearSum {
    pub coeffs: BTreeMap<String, i64>,
    pub constant: i64,
}

impl LinearSum {
    fn add_term(&mut self, var: Option<String>, coeff: i64) {
        match var {
            Some(v) => *self.coeffs.entry(v).or_insert(0) += coeff,
            None => self.constant += coeff,
        }
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Value) -> i64 {
        self.coeffs
            .iter()
            .map(|(v, c)| c.wrapping_mul(env(v)))
            .fold(self.constant, i64::wrapping_add)
    }
}

impl ComparisonExpr {
    /// Variables mentioned on either side, unordered.
    pub fn variables(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .lhs
            .coeffs
            .keys()
            .chain(self.rhs.coeffs.keys())
            .map(|s| s.as_str())
            .collect();
        names.sort_unstable();
        names.dedup();
        names
    }

    pub fn eval(&self, env: &dyn Fn(&str) -> Value) -> bool {
        self.op.eval(self.lhs.eval(env), self.rhs.eval(env))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Cmp(CmpOp),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ExprError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let col = i + 1;
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                out.push((col, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((col, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((col, Token::Star));
                i += 1;
            }
            '=' => {
                out.push((col, Token::Cmp(CmpOp::Eq)));
                i += 1;
                if i < chars.len() && chars[i] == '=' {
                    i += 1; // accept `==` as well
                }
            }
            '!' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    out.push((col, Token::Cmp(CmpOp::Ne)));
                    i += 2;
                } else {
                    return Err(ExprError::UnexpectedChar { col, ch: '!' });
                }
            }
            '<' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    out.push((col, Token::Cmp(CmpOp::Le)));
                    i += 2;
                } else {
                    out.push((col, Token::Cmp(CmpOp::Lt)));
                    i += 1;
                }
            }
            '>' => {
                if i + 1 < chars.len() && chars[i + 1] == '=' {
                    out.push((col, Token::Cmp(CmpOp::Ge)));
                    i += 2;
                } else {
                    out.push((col, Token::Cmp(CmpOp::Gt)));
                    i += 1;
                }
            }
            _ if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let n = text.parse::<i64>().map_err(|_| ExprError::Expected {
                    col,
                    expected: "a 64-bit integer".into(),
                })?;
                out.push((col, Token::Int(n)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_alphanumeric() || chars[i] == '_')
                {
                    i += 1;
                }
                out.push((col, Token::Ident(chars[start..i].iter().collect())));
            }
            _ => return Err(ExprError::UnexpectedChar { col, ch: c }),
        }
    }
    Ok(out)
}

/// Parses `sum CMP sum`. Terms are `k`, `x`, `k*x`, or `x*k`, joined by `+`
/// and `-`.
pub fn parse_expression(src: &str) -> Result<ComparisonExpr, ExprError> {
    let tokens = tokenize(src)?;
    let mut split = None;
    for (pos, (_, tok)) in tokens.iter().enumerate() {
        if matches!(tok, Token::Cmp(_)) {
            if split.is_some() {
                return Err(ExprError::ExtraComparison);
            }
            split = Some(pos);
        }
    }
    let split = split.ok_or(ExprError::MissingComparison)?;
    let op = match tokens[split].1 {
        Token::Cmp(op) => op,
        _ => unreachable!(),
    };
    let lhs = parse_sum(&tokens[..split])?;
    let rhs = parse_sum(&tokens[split + 1..])?;
    Ok(ComparisonExpr { lhs, op, rhs })
}

fn parse_sum(tokens: &[(usize, Token)]) -> Result<LinearSum, ExprError> {
    let mut sum = LinearSum::default();
    let mut i = 0;
    if tokens.is_empty() {
        return Err(ExprError::Expected { col: 1, expected: "a term".into() });
    }
    let mut sign = 1i64;
    loop {
        // optional sign(s)
        while i < tokens.len() {
            match tokens[i].1 {
                Token::Plus => i += 1,
                Token::Minus => {
                    sign = -sign;
                    i += 1;
                }
                _ => break,
            }
        }
        if i >= tokens.len() {
            let col = tokens.last().map(|(c, _)| *c).unwrap_or(1);
            return Err(ExprError::Expected { col, expected: "a term".into() });
        }
        let (col, tok) = &tokens[i];
        match tok {
            Token::Int(n) => {
                i += 1;
                if i < tokens.len() && tokens[i].1 == Token::Star {
                    i += 1;
                    match tokens.get(i) {
                        Some((_, Token::Ident(name))) => {
                            sum.add_term(Some(name.clone()), sign * n);
                            i += 1;
                        }
                        _ => {
                            return Err(ExprError::Expected {
                                col: *col,
                                expected: "a variable after `*`".into(),
                            })
                        }
                    }
                } else {
                    sum.add_term(None, sign * n);
                }
            }
            Token::Ident(name) => {
                i += 1;
                if i < tokens.len() && tokens[i].1 == Token::Star {
                    i += 1;
                    match tokens.get(i) {
                        Some((_, Token::Int(n))) => {
                            sum.add_term(Some(name.clone()), sign * n);
                            i += 1;
                        }
                        Some((_, Token::Ident(other))) => {
                            return Err(ExprError::Nonlinear(format!("{name}*{other}")))
                        }
                        _ => {
                            return Err(ExprError::Expected {
                                col: *col,
                                expected: "an integer after `*`".into(),
                            })
                        }
                    }
                } else {
                    sum.add_term(Some(name.clone()), sign);
                }
            }
            _ => {
                return Err(ExprError::Expected { col: *col, expected: "a term".into() });
            }
        }
        sign = 1;
        match tokens.get(i) {
            None => break,
            Some((_, Token::Plus)) => {
                i += 1;
            }
            Some((_, Token::Minus)) => {
                sign = -1;
                i += 1;
            }
            Some((col, _)) => {
                return Err(ExprError::Expected { col: *col, expected: "`+` or `-`".into() })
            }
        }
    }
    Ok(sum)
}

/// Compiles an expression to an extensional relation over the mentioned
/// variables. The scope is ordered by prefix position; rows are exactly the
/// scope tuples satisfying the comparison.
pub fn compile_expression(
    decls: &[VariableDecl],
    expr: &ComparisonExpr,
    limits: &Limits,
) -> Result<Relation, ExprError> {
    let mut scope_decls: Vec<(usize, &VariableDecl)> = Vec::new();
    for name in expr.variables() {
        let pos = decls
            .iter()
            .position(|d| d.name == name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
        scope_decls.push((pos, &decls[pos]));
    }
    scope_decls.sort_by_key(|(pos, _)| *pos);

    let needed = scope_decls
        .iter()
        .fold(1u128, |acc, (_, d)| acc.saturating_mul(d.domain.len() as u128));
    if needed > limits.max_tuples as u128 {
        return Err(ExprError::LimitExceeded { needed, limit: limits.max_tuples });
    }

    let scope: Vec<String> = scope_decls.iter().map(|(_, d)| d.name.clone()).collect();
    let doms: Vec<&[Value]> = scope_decls.iter().map(|(_, d)| d.domain.as_slice()).collect();
    let mut rows = Vec::new();
    for row in product_of(doms) {
        let env = |name: &str| -> Value {
            let pos = scope.iter().position(|s| s == name).unwrap();
            row[pos]
        };
        if expr.eval(&env) {
            rows.push(row);
        }
    }
    Ok(Relation::new(scope, rows))
}

/// Convenience: parse then compile.
pub fn compile_expression_str(
    decls: &[VariableDecl],
    src: &str,
    limits: &Limits,
) -> Result<Relation, ExprError> {
    compile_expression(decls, &parse_expression(src)?, limits)
}
