//! The line-oriented QCSP text format: a `qcsp` header, one `var` line per
//! variable (declaration order is the quantifier prefix), and `constraint`
//! lines that are either linear comparison expressions or explicit tables.
//! `#` starts a comment. Printing is canonical: every constraint becomes a
//! table, rows restricted to the current domains, in lexicographic order.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::expr::compile_expression_str;
use crate::model::{Limits, Qcsp, Quantifier, Relation, Tuple, Value, VariableDecl};

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("line {line}, col {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

fn err<T>(line: usize, col: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError { line, col, msg: msg.into() })
}

/// Cursor over one significant line; columns are 1-based over the original
/// line text.
struct Cursor<'a> {
    line: usize,
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(line: usize, text: &'a str) -> Self {
        Cursor { line, text, pos: 0 }
    }

    fn col(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while self.text[self.pos..].starts_with([' ', '\t']) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, ch: char) -> Result<(), ParseError> {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += c.len_utf8();
                Ok(())
            }
            _ => err(self.line, self.col(), format!("expected `{ch}`")),
        }
    }

    fn try_eat(&mut self, ch: char) -> bool {
        match self.peek() {
            Some(c) if c == ch => {
                self.pos += c.len_utf8();
                true
            }
            _ => false,
        }
    }

    fn word(&mut self) -> Option<(usize, &'a str)> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        if len == 0 {
            return None;
        }
        self.pos += len;
        Some((start + 1, &rest[..len]))
    }

    fn int(&mut self) -> Result<Value, ParseError> {
        self.skip_ws();
        let col = self.col();
        let start = self.pos;
        if self.text[self.pos..].starts_with('-') {
            self.pos += 1;
        }
        let digits = self.text[self.pos..]
            .char_indices()
            .find(|(_, c)| !c.is_ascii_digit())
            .map(|(i, _)| i)
            .unwrap_or(self.text.len() - self.pos);
        if digits == 0 {
            return err(self.line, col, "expected an integer");
        }
        self.pos += digits;
        self.text[start..self.pos]
            .parse()
            .map_err(|_| ParseError { line: self.line, col, msg: "integer out of range".into() })
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            err(self.line, self.col(), "unexpected trailing input")
        }
    }
}

fn parse_domain(cur: &mut Cursor) -> Result<Vec<Value>, ParseError> {
    let col = {
        cur.skip_ws();
        cur.col()
    };
    if cur.try_eat('{') {
        let mut values = BTreeSet::new();
        if !cur.try_eat('}') {
            loop {
                values.insert(cur.int()?);
                if cur.try_eat('}') {
                    break;
                }
                cur.eat(',')?;
            }
        }
        if values.is_empty() {
            return err(cur.line, col, "empty domain");
        }
        Ok(values.into_iter().collect())
    } else {
        let lo = cur.int()?;
        cur.eat('.')?;
        cur.eat('.')?;
        let hi = cur.int()?;
        if lo > hi {
            return err(cur.line, col, format!("empty domain: {lo}..{hi}"));
        }
        Ok((lo..=hi).collect())
    }
}

fn parse_name_list(cur: &mut Cursor) -> Result<Vec<String>, ParseError> {
    cur.eat('(')?;
    let mut names = Vec::new();
    loop {
        match cur.word() {
            Some((_, w)) => names.push(w.to_string()),
            None => return err(cur.line, cur.col(), "expected a variable name"),
        }
        if cur.try_eat(')') {
            return Ok(names);
        }
        cur.eat(',')?;
    }
}

fn parse_var(
    cur: &mut Cursor,
    decls: &mut Vec<VariableDecl>,
) -> Result<(), ParseError> {
    let (col, name) = match cur.word() {
        Some(w) => w,
        None => return err(cur.line, cur.col(), "expected a variable name"),
    };
    if decls.iter().any(|d| d.name == name) {
        return err(cur.line, col, format!("duplicate variable `{name}`"));
    }
    let quantifier = match cur.word() {
        Some((_, "exists")) => Quantifier::Exists,
        Some((_, "forall")) => Quantifier::Forall,
        Some((col, w)) => {
            return err(cur.line, col, format!("expected `exists` or `forall`, found `{w}`"))
        }
        None => return err(cur.line, cur.col(), "expected `exists` or `forall`"),
    };
    let domain = parse_domain(cur)?;
    cur.expect_end()?;
    decls.push(VariableDecl::new(name, quantifier, domain));
    Ok(())
}

fn parse_table(cur: &mut Cursor, decls: &[VariableDecl]) -> Result<Relation, ParseError> {
    cur.skip_ws();
    let scope_col = cur.col();
    let scope = parse_name_list(cur)?;
    for name in &scope {
        if !decls.iter().any(|d| &d.name == name) {
            return err(cur.line, scope_col, format!("undeclared variable `{name}`"));
        }
    }
    let mut seen = BTreeSet::new();
    for name in &scope {
        if !seen.insert(name) {
            return err(cur.line, scope_col, format!("repeated scope variable `{name}`"));
        }
    }
    cur.eat(':')?;
    let mut rows: Vec<Tuple> = Vec::new();
    while !cur.at_end() {
        cur.skip_ws();
        let row_col = cur.col();
        cur.eat('(')?;
        let mut row = Vec::new();
        loop {
            row.push(cur.int()?);
            if cur.try_eat(')') {
                break;
            }
            cur.eat(',')?;
        }
        if row.len() != scope.len() {
            return err(
                cur.line,
                row_col,
                format!("row has {} values but the scope has {}", row.len(), scope.len()),
            );
        }
        for (name, &v) in scope.iter().zip(&row) {
            let decl = decls.iter().find(|d| &d.name == name).unwrap();
            if !decl.domain.contains(&v) {
                return err(
                    cur.line,
                    row_col,
                    format!("value {v} is outside the domain of `{name}`"),
                );
            }
        }
        rows.push(row);
    }
    Ok(Relation::new(scope, rows))
}

/// Parse the text format into a validated problem. Expression constraints
/// are compiled against the variables declared above them.
pub fn parse_qcsp(text: &str, limits: &Limits) -> Result<Qcsp, ParseError> {
    let mut decls: Vec<VariableDecl> = Vec::new();
    let mut constraints: Vec<Relation> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let mut cur = Cursor::new(line, content);
        if !saw_header {
            match cur.word() {
                Some((_, "qcsp")) => {
                    cur.expect_end()?;
                    saw_header = true;
                    continue;
                }
                _ => return err(line, 1, "expected the `qcsp` header before anything else"),
            }
        }
        match cur.word() {
            Some((_, "qcsp")) => return err(line, 1, "duplicate `qcsp` header"),
            Some((_, "var")) => parse_var(&mut cur, &mut decls)?,
            Some((_, "constraint")) => match cur.word() {
                Some((_, "expr")) => {
                    cur.skip_ws();
                    let offset = cur.pos;
                    let src = &content[offset..];
                    let rel = compile_expression_str(&decls, src, limits).map_err(|e| {
                        ParseError {
                            line,
                            col: offset + e.column(),
                            msg: e.to_string(),
                        }
                    })?;
                    constraints.push(rel);
                }
                Some((_, "table")) => constraints.push(parse_table(&mut cur, &decls)?),
                Some((col, w)) => {
                    return err(line, col, format!("expected `expr` or `table`, found `{w}`"))
                }
                None => return err(line, cur.col(), "expected `expr` or `table`"),
            },
            Some((col, w)) => {
                return err(line, col, format!("expected `var` or `constraint`, found `{w}`"))
            }
            None => return err(line, cur.col(), "expected `var` or `constraint`"),
        }
    }
    if !saw_header {
        return err(1, 1, "missing `qcsp` header");
    }
    Qcsp::new(decls, constraints)
        .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })
}

fn print_domain(dom: &[Value], out: &mut String) {
    let contiguous = dom.windows(2).all(|w| w[1] == w[0] + 1);
    if contiguous {
        let _ = write!(out, "{}..{}", dom[0], dom[dom.len() - 1]);
    } else {
        let body: Vec<String> = dom.iter().map(Value::to_string).collect();
        let _ = write!(out, "{{{}}}", body.join(","));
    }
}

/// Canonical text form: every constraint as a table, rows restricted to the
/// current domains so the output always re-parses.
pub fn print_qcsp(phi: &Qcsp) -> String {
    let mut out = String::from("qcsp\n");
    for d in phi.vars() {
        let _ = write!(out, "var {} {} ", d.name, d.quantifier);
        print_domain(&d.domain, &mut out);
        out.push('\n');
    }
    for (k, c) in phi.constraints().iter().enumerate() {
        let _ = write!(out, "constraint table ({}) :", c.scope().join(", "));
        let scope_idx = phi.scope_indices(k);
        for row in c.rows() {
            let reachable = row
                .iter()
                .zip(scope_idx)
                .all(|(v, &i)| phi.domain(i).contains(v));
            if !reachable {
                continue;
            }
            let body: Vec<String> = row.iter().map(Value::to_string).collect();
            let _ = write!(out, " ({})", body.join(","));
        }
        out.push('\n');
    }
    out
}
