//! Concrete syntax: a tokenizer, a recursive-descent parser with scope and
//! linearity checks, and printers for terms, frame stacks and nodes.
//!
//! ```text
//! e ::= int | 'atom' | #pid | X | 'f'/k | [] | [e, ..., e] | [e, ..., e | e]
//!     | fun 'f'/k(X, ...) -> e end | fun(X, ...) -> e end
//!     | let X = e in e | letrec 'f'/k = fun(X, ...) -> e [end] in e
//!     | apply e(e, ...) | call e(e, ...)
//!     | case e of p then e else e end
//!     | receive p -> e; ...; p -> e end | (e)
//! p ::= int | 'atom' | #pid | X | [] | [p, ..., p] | [p, ..., p | p]
//! ```

use std::fmt::Write as _;

use num_bigint::BigInt;

use crate::error::ParseError;
use crate::node::Node;
use crate::process::{Process, Signal};
use crate::seq::{Frame, FrameStack};
use crate::syntax::{Atom, Expr, FunId, Pattern, Value, Var};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(BigInt),
    Atom(String),
    Pid(u64),
    Var(String),
    Kw(&'static str),
    Punct(&'static str),
    Eof,
}

const KEYWORDS: &[&str] = &[
    "fun", "end", "let", "letrec", "in", "apply", "call", "case", "of", "then", "else", "receive",
];

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn syntax_err(line: usize, col: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        col,
        msg: msg.into(),
    }
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, c: char| {
        *i += 1;
        if c == '\n' {
            *line += 1;
            *col = 1;
        } else {
            *col += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, c);
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            continue;
        }
        let tok = if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            advance(&mut i, &mut line, &mut col, c);
            while i < chars.len() && chars[i].is_ascii_digit() {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let text: String = chars[start..i].iter().collect();
            Tok::Int(text.parse().expect("digits form an integer"))
        } else if c == '#' {
            advance(&mut i, &mut line, &mut col, c);
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let text: String = chars[start..i].iter().collect();
            let id = text
                .parse()
                .map_err(|_| syntax_err(tl, tc, "expected digits after '#'"))?;
            Tok::Pid(id)
        } else if c == '\'' {
            advance(&mut i, &mut line, &mut col, c);
            let mut name = String::new();
            loop {
                let Some(&d) = chars.get(i) else {
                    return Err(syntax_err(tl, tc, "unterminated atom"));
                };
                advance(&mut i, &mut line, &mut col, d);
                match d {
                    '\'' => break,
                    '\\' => {
                        let Some(&e) = chars.get(i) else {
                            return Err(syntax_err(tl, tc, "unterminated atom"));
                        };
                        advance(&mut i, &mut line, &mut col, e);
                        name.push(match e {
                            'n' => '\n',
                            't' => '\t',
                            other => other,
                        });
                    }
                    other => name.push(other),
                }
            }
            if name.is_empty() {
                return Err(syntax_err(tl, tc, "empty atom"));
            }
            Tok::Atom(name)
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            }
            let word: String = chars[start..i].iter().collect();
            if c.is_uppercase() || c == '_' {
                Tok::Var(word)
            } else if let Some(kw) = KEYWORDS.iter().find(|k| **k == word) {
                Tok::Kw(kw)
            } else {
                return Err(syntax_err(tl, tc, format!("unexpected word `{word}` (atoms are quoted)")));
            }
        } else {
            let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
            let p = if two == "->" {
                advance(&mut i, &mut line, &mut col, c);
                "->"
            } else {
                match c {
                    '(' => "(",
                    ')' => ")",
                    '[' => "[",
                    ']' => "]",
                    ',' => ",",
                    '|' => "|",
                    '/' => "/",
                    '=' => "=",
                    ';' => ";",
                    _ => return Err(syntax_err(tl, tc, format!("unexpected character `{c}`"))),
                }
            };
            { let c = chars[i]; advance(&mut i, &mut line, &mut col, c); }
            Tok::Punct(p)
        };
        out.push(Token { tok, line: tl, col: tc });
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    vars: Vec<Var>,
    funs: Vec<FunId>,
    anon: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn here(&self) -> (usize, usize) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.here();
        syntax_err(line, col, msg)
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Int(i) => i.to_string(),
            Tok::Atom(a) => format!("'{a}'"),
            Tok::Pid(p) => format!("#{p}"),
            Tok::Var(v) => v.clone(),
            Tok::Kw(k) => (*k).to_string(),
            Tok::Punct(p) => (*p).to_string(),
            Tok::Eof => "end of input".to_string(),
        }
    }

    fn expect_punct(&mut self, p: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Punct(p) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{p}`, found {}", Self::describe(self.peek()))))
        }
    }

    fn expect_kw(&mut self, k: &'static str) -> Result<(), ParseError> {
        if *self.peek() == Tok::Kw(k) {
            self.next();
            Ok(())
        } else {
            Err(self.error(format!("expected `{k}`, found {}", Self::describe(self.peek()))))
        }
    }

    fn eat_punct(&mut self, p: &'static str) -> bool {
        if *self.peek() == Tok::Punct(p) {
            self.next();
            true
        } else {
            false
        }
    }

    fn var_name(&mut self) -> Result<Var, ParseError> {
        match self.next() {
            Tok::Var(v) => Ok(Var::new(v)),
            t => {
                self.pos -= 1;
                Err(self.error(format!("expected a variable, found {}", Self::describe(&t))))
            }
        }
    }

    fn fun_id(&mut self) -> Result<FunId, ParseError> {
        let name = match self.next() {
            Tok::Atom(a) => a,
            t => {
                self.pos -= 1;
                return Err(self.error(format!("expected a function name, found {}", Self::describe(&t))));
            }
        };
        self.expect_punct("/")?;
        match self.next() {
            Tok::Int(k) => {
                let arity = usize::try_from(&k).map_err(|_| {
                    self.pos -= 1;
                    self.error("arity must be a natural number")
                })?;
                Ok(FunId::new(name, arity))
            }
            t => {
                self.pos -= 1;
                Err(self.error(format!("expected an arity, found {}", Self::describe(&t))))
            }
        }
    }

    fn params(&mut self) -> Result<Vec<Var>, ParseError> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if !self.eat_punct(")") {
            loop {
                let (line, col) = self.here();
                let v = self.var_name()?;
                if out.contains(&v) {
                    return Err(syntax_err(line, col, format!("parameter {} repeated", v.name())));
                }
                out.push(v);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        Ok(out)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.expect_punct("(")?;
        let mut out = Vec::new();
        if !self.eat_punct(")") {
            loop {
                out.push(self.expr()?);
                if self.eat_punct(")") {
                    break;
                }
                self.expect_punct(",")?;
            }
        }
        Ok(out)
    }

    /// Parses `body` with the given variables and function identifiers in scope.
    fn scoped<T>(
        &mut self,
        vars: &[Var],
        funs: &[FunId],
        body: impl FnOnce(&mut Self) -> Result<T, ParseError>,
    ) -> Result<T, ParseError> {
        let (nv, nf) = (self.vars.len(), self.funs.len());
        self.vars.extend_from_slice(vars);
        self.funs.extend_from_slice(funs);
        let out = body(self);
        self.vars.truncate(nv);
        self.funs.truncate(nf);
        out
    }

    /// `(X, ...) -> body` after the function identifier; `closing` demands `end`.
    fn fun_tail(&mut self, id: Option<FunId>, closing: bool) -> Result<Value, ParseError> {
        let (line, col) = self.here();
        let params = self.params()?;
        let id = match id {
            Some(id) => {
                if id.arity != params.len() {
                    return Err(syntax_err(
                        line,
                        col,
                        format!("{} parameters given for arity {}", params.len(), id.arity),
                    ));
                }
                id
            }
            None => {
                self.anon += 1;
                FunId::new(format!("-fun-{}-", self.anon), params.len())
            }
        };
        self.expect_punct("->")?;
        let body = self.scoped(&params, std::slice::from_ref(&id), Self::expr)?;
        if closing {
            self.expect_kw("end")?;
        }
        Ok(Value::fun(id, params, body))
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Int(i) => Ok(Expr::Val(Value::Int(i))),
            Tok::Pid(p) => Ok(Expr::Val(Value::pid(p))),
            Tok::Atom(a) => {
                if *self.peek() == Tok::Punct("/") && matches!(self.peek_at(1), Tok::Int(_)) {
                    self.pos -= 1;
                    let id = self.fun_id()?;
                    if !self.funs.contains(&id) {
                        return Err(ParseError::Unbound {
                            line,
                            col,
                            name: format!("'{}'/{}", id.name.name(), id.arity),
                        });
                    }
                    Ok(Expr::FunRef(id))
                } else {
                    Ok(Expr::Val(Value::atom(a)))
                }
            }
            Tok::Var(v) => {
                let v = Var::new(v);
                if !self.vars.contains(&v) {
                    return Err(ParseError::Unbound {
                        line,
                        col,
                        name: v.name().to_string(),
                    });
                }
                Ok(Expr::Var(v))
            }
            Tok::Punct("(") => {
                let e = self.expr()?;
                self.expect_punct(")")?;
                Ok(e)
            }
            Tok::Punct("[") => {
                if self.eat_punct("]") {
                    return Ok(Expr::Val(Value::Nil));
                }
                let mut items = vec![self.expr()?];
                while self.eat_punct(",") {
                    items.push(self.expr()?);
                }
                let tail = if self.eat_punct("|") {
                    self.expr()?
                } else {
                    Expr::Val(Value::Nil)
                };
                self.expect_punct("]")?;
                Ok(items.into_iter().rev().fold(tail, |t, h| Expr::cons(h, t)))
            }
            Tok::Kw("fun") => {
                let id = if matches!(self.peek(), Tok::Atom(_)) {
                    Some(self.fun_id()?)
                } else {
                    None
                };
                Ok(Expr::Val(self.fun_tail(id, true)?))
            }
            Tok::Kw("let") => {
                let x = self.var_name()?;
                self.expect_punct("=")?;
                let bound = self.expr()?;
                self.expect_kw("in")?;
                let body = self.scoped(std::slice::from_ref(&x), &[], Self::expr)?;
                Ok(Expr::Let {
                    var: x,
                    bound: bound.into(),
                    body: body.into(),
                })
            }
            Tok::Kw("letrec") => {
                let id = self.fun_id()?;
                self.expect_punct("=")?;
                self.expect_kw("fun")?;
                let f = self.fun_tail(Some(id.clone()), false)?;
                if *self.peek() == Tok::Kw("end") {
                    self.next();
                }
                self.expect_kw("in")?;
                let cont = self.scoped(&[], std::slice::from_ref(&id), Self::expr)?;
                let Value::Fun(f) = f else { unreachable!() };
                Ok(Expr::letrec(id, f.params.clone(), f.body.clone(), cont))
            }
            Tok::Kw(kw @ ("apply" | "call")) => {
                let fun = self.expr()?;
                let args = self.args()?;
                Ok(if kw == "apply" {
                    Expr::apply(fun, args)
                } else {
                    Expr::call(fun, args)
                })
            }
            Tok::Kw("case") => {
                let scrutinee = self.expr()?;
                self.expect_kw("of")?;
                let (pline, pcol) = self.here();
                let pat = self.pattern()?;
                let bound = linear_vars(&pat, pline, pcol)?;
                self.expect_kw("then")?;
                let then_branch = self.scoped(&bound, &[], Self::expr)?;
                self.expect_kw("else")?;
                let else_branch = self.expr()?;
                self.expect_kw("end")?;
                Ok(Expr::Case {
                    scrutinee: scrutinee.into(),
                    pat,
                    then_branch: then_branch.into(),
                    else_branch: else_branch.into(),
                })
            }
            Tok::Kw("receive") => {
                let mut clauses = Vec::new();
                loop {
                    let (pline, pcol) = self.here();
                    let pat = self.pattern()?;
                    let bound = linear_vars(&pat, pline, pcol)?;
                    self.expect_punct("->")?;
                    let body = self.scoped(&bound, &[], Self::expr)?;
                    clauses.push((pat, body));
                    if !self.eat_punct(";") {
                        break;
                    }
                }
                self.expect_kw("end")?;
                Ok(Expr::Receive(clauses.into()))
            }
            t => Err(syntax_err(line, col, format!("unexpected {}", Self::describe(&t)))),
        }
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let (line, col) = self.here();
        match self.next() {
            Tok::Int(i) => Ok(Pattern::Int(i)),
            Tok::Atom(a) => Ok(Pattern::atom(a)),
            Tok::Pid(p) => Ok(Pattern::Pid(crate::syntax::Pid(p))),
            Tok::Var(v) => Ok(Pattern::var(v)),
            Tok::Punct("[") => {
                if self.eat_punct("]") {
                    return Ok(Pattern::Nil);
                }
                let mut items = vec![self.pattern()?];
                while self.eat_punct(",") {
                    items.push(self.pattern()?);
                }
                let tail = if self.eat_punct("|") {
                    self.pattern()?
                } else {
                    Pattern::Nil
                };
                self.expect_punct("]")?;
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(tail, |t, h| Pattern::Cons(Box::new(h), Box::new(t))))
            }
            t => Err(syntax_err(line, col, format!("expected a pattern, found {}", Self::describe(&t)))),
        }
    }
}

fn linear_vars(p: &Pattern, line: usize, col: usize) -> Result<Vec<Var>, ParseError> {
    p.check_linear()
        .map_err(|source| ParseError::Term { line, col, source })?;
    Ok(p.variables().into_iter().cloned().collect())
}

fn parse_with<T>(src: &str, f: impl FnOnce(&mut Parser) -> Result<T, ParseError>) -> Result<T, ParseError> {
    let mut p = Parser {
        toks: tokenize(src)?,
        pos: 0,
        vars: Vec::new(),
        funs: Vec::new(),
        anon: 0,
    };
    let out = f(&mut p)?;
    if *p.peek() != Tok::Eof {
        return Err(p.error(format!("unexpected {} after expression", Parser::describe(p.peek()))));
    }
    Ok(out)
}

/// Parses a closed expression.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    parse_with(src, Parser::expr)
}

/// Parses a (linear) pattern.
pub fn parse_pattern(src: &str) -> Result<Pattern, ParseError> {
    parse_with(src, |p| {
        let (line, col) = p.here();
        let pat = p.pattern()?;
        linear_vars(&pat, line, col)?;
        Ok(pat)
    })
}

/// Parses a constant expression and folds it into a value.
pub fn parse_value(src: &str) -> Result<Value, ParseError> {
    let e = parse_expr(src)?;
    expr_to_value(&e).ok_or_else(|| ParseError::NotAValue(src.trim().to_string()))
}

/// Folds list constructions over values into a value.
pub fn expr_to_value(e: &Expr) -> Option<Value> {
    match e {
        Expr::Val(v) => Some(v.clone()),
        Expr::Cons(h, t) => Some(Value::cons(expr_to_value(h)?, expr_to_value(t)?)),
        _ => None,
    }
}

fn print_atom(out: &mut String, a: &Atom) {
    out.push('\'');
    for c in a.name().chars() {
        match c {
            '\'' => out.push_str("\\'"),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('\'');
}

fn print_fun_id(out: &mut String, id: &FunId) {
    print_atom(out, &id.name);
    let _ = write!(out, "/{}", id.arity);
}

fn print_vars(out: &mut String, vars: &[Var]) {
    out.push('(');
    for (i, v) in vars.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(v.name());
    }
    out.push(')');
}

fn write_value(out: &mut String, v: &Value) {
    match v {
        Value::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Value::Atom(a) => print_atom(out, a),
        Value::Pid(p) => {
            let _ = write!(out, "{p}");
        }
        Value::Nil => out.push_str("[]"),
        Value::Cons(h, t) => {
            out.push('[');
            write_value(out, h);
            write_value_tail(out, t);
            out.push(']');
        }
        Value::Fun(f) => {
            out.push_str("fun ");
            print_fun_id(out, &f.id);
            print_vars(out, &f.params);
            out.push_str(" -> ");
            write_expr(out, &f.body);
            out.push_str(" end");
        }
    }
}

fn write_pattern(out: &mut String, p: &Pattern) {
    match p {
        Pattern::Int(i) => {
            let _ = write!(out, "{i}");
        }
        Pattern::Atom(a) => print_atom(out, a),
        Pattern::Pid(p) => {
            let _ = write!(out, "{p}");
        }
        Pattern::Nil => out.push_str("[]"),
        Pattern::Var(v) => out.push_str(v.name()),
        Pattern::Cons(h, t) => {
            out.push('[');
            write_pattern(out, h);
            let mut cur: &Pattern = t;
            loop {
                match cur {
                    Pattern::Nil => break,
                    Pattern::Cons(h, t) => {
                        out.push_str(", ");
                        write_pattern(out, h);
                        cur = t;
                    }
                    other => {
                        out.push_str(" | ");
                        write_pattern(out, other);
                        break;
                    }
                }
            }
            out.push(']');
        }
    }
}

fn is_atomic(e: &Expr) -> bool {
    matches!(e, Expr::Val(_) | Expr::Var(_) | Expr::FunRef(_) | Expr::Cons(..))
}

fn write_callee(out: &mut String, e: &Expr) {
    if is_atomic(e) {
        write_expr(out, e);
    } else {
        out.push('(');
        write_expr(out, e);
        out.push(')');
    }
}

fn write_args<'a>(out: &mut String, args: impl IntoIterator<Item = &'a Expr>) {
    out.push('(');
    for (i, a) in args.into_iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_expr(out, a);
    }
    out.push(')');
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Val(v) => write_value(out, v),
        Expr::Var(x) => out.push_str(x.name()),
        Expr::FunRef(id) => print_fun_id(out, id),
        Expr::Apply { fun, args } => {
            out.push_str("apply ");
            write_callee(out, fun);
            write_args(out, args.iter());
        }
        Expr::Call { fun, args } => {
            out.push_str("call ");
            write_callee(out, fun);
            write_args(out, args.iter());
        }
        Expr::Case {
            scrutinee,
            pat,
            then_branch,
            else_branch,
        } => {
            out.push_str("case ");
            write_expr(out, scrutinee);
            out.push_str(" of ");
            write_pattern(out, pat);
            out.push_str(" then ");
            write_expr(out, then_branch);
            out.push_str(" else ");
            write_expr(out, else_branch);
            out.push_str(" end");
        }
        Expr::Let { var, bound, body } => {
            let _ = write!(out, "let {} = ", var.name());
            write_expr(out, bound);
            out.push_str(" in ");
            write_expr(out, body);
        }
        Expr::Cons(h, t) => {
            out.push('[');
            write_expr(out, h);
            let mut cur: &Expr = t;
            loop {
                match cur {
                    Expr::Val(v) if matches!(v, Value::Nil | Value::Cons(..)) => {
                        write_value_tail(out, v);
                        break;
                    }
                    Expr::Cons(h, t) => {
                        out.push_str(", ");
                        write_expr(out, h);
                        cur = t;
                    }
                    other => {
                        out.push_str(" | ");
                        write_expr(out, other);
                        break;
                    }
                }
            }
            out.push(']');
        }
        Expr::Letrec {
            id,
            params,
            body,
            cont,
        } => {
            out.push_str("letrec ");
            print_fun_id(out, id);
            out.push_str(" = fun");
            print_vars(out, params);
            out.push_str(" -> ");
            write_expr(out, body);
            out.push_str(" in ");
            write_expr(out, cont);
        }
        Expr::Receive(clauses) => {
            out.push_str("receive ");
            for (i, (p, body)) in clauses.iter().enumerate() {
                if i > 0 {
                    out.push_str("; ");
                }
                write_pattern(out, p);
                out.push_str(" -> ");
                write_expr(out, body);
            }
            out.push_str(" end");
        }
    }
}

/// The elements after the head of a printed list, and its improper tail.
fn write_value_tail(out: &mut String, mut cur: &Value) {
    loop {
        match cur {
            Value::Nil => break,
            Value::Cons(h, t) => {
                out.push_str(", ");
                write_value(out, h);
                cur = t;
            }
            other => {
                out.push_str(" | ");
                write_value(out, other);
                break;
            }
        }
    }
}

pub fn print_value(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v);
    out
}

pub fn print_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    write_pattern(&mut out, p);
    out
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

const HOLE: &str = "□";

fn write_partial_args(out: &mut String, done: &[Value], todo: &[Expr]) {
    out.push('(');
    let mut first = true;
    let mut sep = |out: &mut String| {
        if !first {
            out.push_str(", ");
        }
        first = false;
    };
    for v in done {
        sep(out);
        write_value(out, v);
    }
    sep(out);
    out.push_str(HOLE);
    for e in todo {
        sep(out);
        write_expr(out, e);
    }
    out.push(')');
}

pub fn print_frame(f: &Frame) -> String {
    let mut out = String::new();
    match f {
        Frame::CallFun(args) => {
            let _ = write!(out, "call {HOLE}");
            write_args(&mut out, args.iter());
        }
        Frame::ApplyFun(args) => {
            let _ = write!(out, "apply {HOLE}");
            write_args(&mut out, args.iter());
        }
        Frame::CallArgs { fun, done, todo } => {
            out.push_str("call ");
            write_value(&mut out, fun);
            write_partial_args(&mut out, done, todo);
        }
        Frame::ApplyArgs { fun, done, todo } => {
            out.push_str("apply ");
            write_value(&mut out, fun);
            write_partial_args(&mut out, done, todo);
        }
        Frame::Let { var, body } => {
            let _ = write!(out, "let {} = {HOLE} in ", var.name());
            write_expr(&mut out, body);
        }
        Frame::Case {
            pat,
            then_branch,
            else_branch,
        } => {
            let _ = write!(out, "case {HOLE} of ");
            write_pattern(&mut out, pat);
            out.push_str(" then ");
            write_expr(&mut out, then_branch);
            out.push_str(" else ");
            write_expr(&mut out, else_branch);
            out.push_str(" end");
        }
        Frame::ConsTail(h) => {
            out.push('[');
            write_expr(&mut out, h);
            let _ = write!(out, " | {HOLE}]");
        }
        Frame::ConsHead(t) => {
            let _ = write!(out, "[{HOLE} | ");
            write_value(&mut out, t);
            out.push(']');
        }
    }
    out
}

/// Frames top first, joined by `::`, ending in `Id`.
pub fn print_stack(k: &FrameStack) -> String {
    let mut out = String::new();
    for f in k.iter_top_first() {
        out.push_str(&print_frame(f));
        out.push_str(" :: ");
    }
    out.push_str("Id");
    out
}

pub fn print_signal(s: &Signal) -> String {
    s.to_string()
}

/// A multi-line human-readable rendering of a node.
pub fn print_node(n: &Node) -> String {
    let mut out = String::new();
    out.push_str("ether:");
    if n.ether.is_empty() {
        out.push_str(" empty");
    }
    out.push('\n');
    for (src, dst, q) in n.ether.edges() {
        let items: Vec<String> = q.iter().map(print_signal).collect();
        let _ = writeln!(out, "  {src} -> {dst}: [{}]", items.join(", "));
    }
    out.push_str("processes:");
    if n.pool.is_empty() {
        out.push_str(" none");
    }
    out.push('\n');
    for (pid, p) in n.pool.iter() {
        match p {
            Process::Live(l) => {
                let _ = writeln!(out, "  {pid}: live, trap_exit = {}", l.trap);
                let _ = writeln!(out, "    stack:   {}", print_stack(&l.stack));
                let _ = writeln!(out, "    redex:   {}", print_expr(&l.redex));
                let mb: Vec<String> = l.mailbox.iter().map(print_value).collect();
                let _ = writeln!(out, "    mailbox: [{}]", mb.join(", "));
                let links: Vec<String> = l.links.iter().map(|p| p.to_string()).collect();
                let _ = writeln!(out, "    links:   [{}]", links.join(", "));
            }
            Process::Dead(obl) => {
                let items: Vec<String> = obl.iter().map(|(p, r)| format!("({p}, {})", print_value(r))).collect();
                let _ = writeln!(out, "  {pid}: dead [{}]", items.join(", "));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MM: &str = "letrec 'mm'/2 = fun(F, E) ->
        case E of [H|T]
          then [ apply F(H) | apply 'mm'/2(F, T) ]
          else []
        end
      in apply 'mm'/2(fun(X) -> call '+'(X, 1) end, [0,1,2])";

    #[test]
    fn mm_round_trips() {
        let e = parse_expr(MM).unwrap();
        let printed = print_expr(&e);
        assert_eq!(parse_expr(&printed).unwrap(), e);
        assert_eq!(print_expr(&parse_expr(&printed).unwrap()), printed);
    }

    #[test]
    fn improper_list_is_cons_expression() {
        assert_eq!(parse_expr("[1|2]").unwrap(), Expr::cons(Expr::int(1), Expr::int(2)));
        assert_eq!(print_expr(&Expr::cons(Expr::int(1), Expr::int(2))), "[1 | 2]");
    }

    #[test]
    fn unbound_variable_is_a_scope_error() {
        let err = parse_expr("case E of [H|T] then X else [] end").unwrap_err();
        assert!(matches!(err, ParseError::Unbound { ref name, .. } if name == "E"));
        let err = parse_expr("let E = [] in case E of [H|T] then X else [] end").unwrap_err();
        assert!(matches!(err, ParseError::Unbound { ref name, .. } if name == "X"));
    }

    #[test]
    fn case_pattern_scopes_then_branch_only() {
        assert!(parse_expr("case 1 of X then X else 0 end").is_ok());
        assert!(parse_expr("case 1 of X then 0 else X end").is_err());
    }

    #[test]
    fn non_linear_patterns_are_rejected() {
        let err = parse_expr("receive [X|X] -> X end").unwrap_err();
        assert!(matches!(err, ParseError::Term { .. }));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr("let X = 1\n in ?").unwrap_err() {
            ParseError::Syntax { line, col, .. } => assert_eq!((line, col), (2, 5)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_expr("'abc").is_err());
        assert!(parse_expr("1 2").is_err());
    }

    #[test]
    fn literals() {
        assert_eq!(parse_expr("#3").unwrap(), Expr::Val(Value::pid(3)));
        assert_eq!(parse_expr("-7").unwrap(), Expr::int(-7));
        assert_eq!(parse_expr("'it\\'s'").unwrap(), Expr::atom("it's"));
        assert_eq!(print_expr(&Expr::atom("it's")), "'it\\'s'");
        assert_eq!(parse_value("['EXIT', #1, 'killed']").unwrap().to_string(), "['EXIT', #1, 'killed']");
        assert!(matches!(parse_value("apply 'f'/0()"), Err(ParseError::Unbound { .. })));
        assert!(matches!(parse_value("let X = 1 in X"), Err(ParseError::NotAValue(_))));
    }

    #[test]
    fn named_and_anonymous_funs() {
        let named = parse_expr("fun 'f'/1(X) -> apply 'f'/1(X) end").unwrap();
        let Expr::Val(Value::Fun(f)) = named else { panic!() };
        assert_eq!(f.id, FunId::new("f", 1));
        assert!(parse_expr("fun 'f'/2(X) -> X end").is_err());
        let anon = parse_expr("fun(X, Y) -> X end").unwrap();
        let Expr::Val(Value::Fun(f)) = anon else { panic!() };
        assert_eq!(f.id.arity, 2);
    }

    #[test]
    fn letrec_accepts_optional_end() {
        let a = parse_expr("letrec 'f'/0 = fun() -> 1 end in apply 'f'/0()").unwrap();
        let b = parse_expr("letrec 'f'/0 = fun() -> 1 in apply 'f'/0()").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn receive_with_several_clauses() {
        let e = parse_expr("receive 'a' -> 1; [X | _T] -> X end").unwrap();
        let Expr::Receive(cs) = &e else { panic!() };
        assert_eq!(cs.len(), 2);
        assert_eq!(parse_expr(&print_expr(&e)).unwrap(), e);
    }

    #[test]
    fn stack_rendering() {
        let k = FrameStack::from_top_first([Frame::CallArgs {
            fun: Value::atom("+"),
            done: vec![Value::int(1)],
            todo: vec![],
        }]);
        assert_eq!(print_stack(&k), "call '+'(1, □) :: Id");
    }
}
