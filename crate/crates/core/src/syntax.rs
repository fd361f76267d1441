//! Object-language terms: values, patterns and expressions, together with
//! simultaneous substitution and pattern matching.
//!
//! Variables are kept named. Every value substituted for a variable is
//! closed (function values only mention their own parameters and their own
//! identifier), so shadowing at binders is all that capture avoidance needs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::SyntaxError;

/// An atom such as `'ok'`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: impl AsRef<str>) -> Self {
        Atom(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "'{}'", self.0)
    }
}

/// Process identifier.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Pid(pub u64);

impl fmt::Debug for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl fmt::Display for Pid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// A variable name such as `X`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: impl AsRef<str>) -> Self {
        Var(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Function identifier `f/k`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FunId {
    pub name: Atom,
    pub arity: usize,
}

impl FunId {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        FunId {
            name: Atom::new(name),
            arity,
        }
    }
}

impl fmt::Debug for FunId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}/{}", self.name, self.arity)
    }
}

/// A named (possibly recursive) function `fun f/k(X1, ..., Xk) -> body`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct FunValue {
    pub id: FunId,
    pub params: Vec<Var>,
    pub body: Expr,
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Int(#[serde(with = "bigint_string")] BigInt),
    Atom(Atom),
    Pid(Pid),
    Nil,
    Cons(Arc<Value>, Arc<Value>),
    Fun(Arc<FunValue>),
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(i: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&i.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

impl Value {
    pub fn int(i: impl Into<BigInt>) -> Self {
        Value::Int(i.into())
    }

    pub fn atom(name: impl AsRef<str>) -> Self {
        Value::Atom(Atom::new(name))
    }

    pub fn pid(id: u64) -> Self {
        Value::Pid(Pid(id))
    }

    pub fn cons(head: Value, tail: Value) -> Self {
        Value::Cons(Arc::new(head), Arc::new(tail))
    }

    /// Builds a proper list from its elements.
    pub fn list(items: impl IntoIterator<Item = Value, IntoIter: DoubleEndedIterator>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(Value::Nil, |tail, head| Value::cons(head, tail))
    }

    pub fn fun(id: FunId, params: Vec<Var>, body: Expr) -> Self {
        Value::Fun(Arc::new(FunValue { id, params, body }))
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self {
            Value::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_pid(&self) -> Option<Pid> {
        match self {
            Value::Pid(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_atom(&self, name: &str) -> bool {
        matches!(self, Value::Atom(a) if a.name() == name)
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_value(self))
    }
}

/// Linear patterns: each variable occurs at most once.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pattern {
    Int(#[serde(with = "bigint_string")] BigInt),
    Atom(Atom),
    Pid(Pid),
    Nil,
    Cons(Box<Pattern>, Box<Pattern>),
    Var(Var),
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_pattern(self))
    }
}

impl Pattern {
    pub fn var(name: impl AsRef<str>) -> Self {
        Pattern::Var(Var::new(name))
    }

    pub fn atom(name: impl AsRef<str>) -> Self {
        Pattern::Atom(Atom::new(name))
    }

    /// Builds `[head | tail]`, rejecting a variable bound on both sides.
    pub fn try_cons(head: Pattern, tail: Pattern) -> Result<Self, SyntaxError> {
        let p = Pattern::Cons(Box::new(head), Box::new(tail));
        p.check_linear()?;
        Ok(p)
    }

    /// Variables in left-to-right order (with repetitions, if any).
    pub fn variables(&self) -> Vec<&Var> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a Var>) {
        match self {
            Pattern::Var(v) => out.push(v),
            Pattern::Cons(h, t) => {
                h.collect_vars(out);
                t.collect_vars(out);
            }
            _ => {}
        }
    }

    pub fn check_linear(&self) -> Result<(), SyntaxError> {
        let vars = self.variables();
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(SyntaxError::NonLinearPattern(v.name().to_string()));
            }
        }
        Ok(())
    }

    /// Rebuilds the value this pattern denotes under `b`; `None` if some
    /// variable is unbound.
    pub fn instantiate(&self, b: &Bindings) -> Option<Value> {
        Some(match self {
            Pattern::Int(i) => Value::Int(i.clone()),
            Pattern::Atom(a) => Value::Atom(a.clone()),
            Pattern::Pid(p) => Value::Pid(*p),
            Pattern::Nil => Value::Nil,
            Pattern::Cons(h, t) => Value::cons(h.instantiate(b)?, t.instantiate(b)?),
            Pattern::Var(v) => b.get_var(v)?.clone(),
        })
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expr {
    Val(Value),
    Var(Var),
    FunRef(FunId),
    Apply {
        fun: Arc<Expr>,
        args: Arc<[Expr]>,
    },
    Call {
        fun: Arc<Expr>,
        args: Arc<[Expr]>,
    },
    /// Two-branch case: `case e of p then e1 else e2 end`.
    Case {
        scrutinee: Arc<Expr>,
        pat: Pattern,
        then_branch: Arc<Expr>,
        else_branch: Arc<Expr>,
    },
    Let {
        var: Var,
        bound: Arc<Expr>,
        body: Arc<Expr>,
    },
    Cons(Arc<Expr>, Arc<Expr>),
    Letrec {
        id: FunId,
        params: Vec<Var>,
        body: Arc<Expr>,
        cont: Arc<Expr>,
    },
    Receive(Arc<[(Pattern, Expr)]>),
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::surface::print_expr(self))
    }
}

impl From<Value> for Expr {
    fn from(v: Value) -> Self {
        Expr::Val(v)
    }
}

impl Expr {
    pub fn var(name: impl AsRef<str>) -> Self {
        Expr::Var(Var::new(name))
    }

    pub fn atom(name: impl AsRef<str>) -> Self {
        Expr::Val(Value::atom(name))
    }

    pub fn int(i: impl Into<BigInt>) -> Self {
        Expr::Val(Value::int(i))
    }

    pub fn apply(fun: Expr, args: Vec<Expr>) -> Self {
        Expr::Apply {
            fun: Arc::new(fun),
            args: args.into(),
        }
    }

    pub fn call(fun: Expr, args: Vec<Expr>) -> Self {
        Expr::Call {
            fun: Arc::new(fun),
            args: args.into(),
        }
    }

    /// `call 'name'(args...)`
    pub fn bif(name: &str, args: Vec<Expr>) -> Self {
        Expr::call(Expr::atom(name), args)
    }

    pub fn let_in(var: impl AsRef<str>, bound: Expr, body: Expr) -> Self {
        Expr::Let {
            var: Var::new(var),
            bound: Arc::new(bound),
            body: Arc::new(body),
        }
    }

    pub fn cons(head: Expr, tail: Expr) -> Self {
        Expr::Cons(Arc::new(head), Arc::new(tail))
    }

    /// `[e1, ..., en]` as nested cons expressions.
    pub fn list(items: Vec<Expr>) -> Self {
        items
            .into_iter()
            .rev()
            .fold(Expr::Val(Value::Nil), |tail, head| Expr::cons(head, tail))
    }

    pub fn case(
        scrutinee: Expr,
        pat: Pattern,
        then_branch: Expr,
        else_branch: Expr,
    ) -> Result<Self, SyntaxError> {
        pat.check_linear()?;
        Ok(Expr::Case {
            scrutinee: Arc::new(scrutinee),
            pat,
            then_branch: Arc::new(then_branch),
            else_branch: Arc::new(else_branch),
        })
    }

    pub fn letrec(id: FunId, params: Vec<Var>, body: Expr, cont: Expr) -> Self {
        Expr::Letrec {
            id,
            params,
            body: Arc::new(body),
            cont: Arc::new(cont),
        }
    }

    pub fn receive(clauses: Vec<(Pattern, Expr)>) -> Result<Self, SyntaxError> {
        if clauses.is_empty() {
            return Err(SyntaxError::EmptyReceive);
        }
        for (p, _) in &clauses {
            p.check_linear()?;
        }
        Ok(Expr::Receive(clauses.into()))
    }

    pub fn as_value(&self) -> Option<&Value> {
        match self {
            Expr::Val(v) => Some(v),
            _ => None,
        }
    }
}

/// What a substitution can replace: a variable or a function identifier.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Binder {
    Var(Var),
    Fun(FunId),
}

/// A finite map from variables and function identifiers to values.
#[derive(Clone, Default, PartialEq, Eq, Hash, Debug)]
pub struct Bindings(BTreeMap<Binder, Value>);

impl Bindings {
    pub fn new() -> Self {
        Bindings::default()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn bind_var(&mut self, v: Var, value: Value) {
        self.0.insert(Binder::Var(v), value);
    }

    pub fn bind_fun(&mut self, id: FunId, value: Value) {
        self.0.insert(Binder::Fun(id), value);
    }

    pub fn with_var(mut self, v: impl AsRef<str>, value: Value) -> Self {
        self.bind_var(Var::new(v), value);
        self
    }

    pub fn get_var(&self, v: &Var) -> Option<&Value> {
        self.0.get(&Binder::Var(v.clone()))
    }

    pub fn get_fun(&self, id: &FunId) -> Option<&Value> {
        self.0.get(&Binder::Fun(id.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Binder, &Value)> {
        self.0.iter()
    }

    /// Union; on a shared key the right-hand side wins.
    pub fn union(&self, other: &Bindings) -> Bindings {
        let mut out = self.clone();
        out.0
            .extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    /// The bindings that stay visible under the given binders.
    fn without<'a>(&self, shadowed: impl IntoIterator<Item = &'a Binder>) -> ShadowedOrSame<'_> {
        let mut owned: Option<Bindings> = None;
        for b in shadowed {
            let present = owned.as_ref().unwrap_or(self).0.contains_key(b);
            if present {
                owned.get_or_insert_with(|| self.clone()).0.remove(b);
            }
        }
        match owned {
            Some(b) => ShadowedOrSame::Owned(b),
            None => ShadowedOrSame::Same(self),
        }
    }
}

impl FromIterator<(Binder, Value)> for Bindings {
    fn from_iter<T: IntoIterator<Item = (Binder, Value)>>(iter: T) -> Self {
        Bindings(iter.into_iter().collect())
    }
}

enum ShadowedOrSame<'a> {
    Same(&'a Bindings),
    Owned(Bindings),
}

impl ShadowedOrSame<'_> {
    fn get(&self) -> &Bindings {
        match self {
            ShadowedOrSame::Same(b) => b,
            ShadowedOrSame::Owned(b) => b,
        }
    }
}

/// Simultaneous substitution `e[b]`.
pub fn subst(e: &Expr, b: &Bindings) -> Expr {
    if b.is_empty() {
        return e.clone();
    }
    match e {
        Expr::Val(v) => Expr::Val(subst_value(v, b)),
        Expr::Var(x) => match b.get_var(x) {
            Some(v) => Expr::Val(v.clone()),
            None => e.clone(),
        },
        Expr::FunRef(id) => match b.get_fun(id) {
            Some(v) => Expr::Val(v.clone()),
            None => e.clone(),
        },
        Expr::Apply { fun, args } => Expr::Apply {
            fun: Arc::new(subst(fun, b)),
            args: args.iter().map(|a| subst(a, b)).collect(),
        },
        Expr::Call { fun, args } => Expr::Call {
            fun: Arc::new(subst(fun, b)),
            args: args.iter().map(|a| subst(a, b)).collect(),
        },
        Expr::Case {
            scrutinee,
            pat,
            then_branch,
            else_branch,
        } => {
            let pat_binders: Vec<Binder> = pat
                .variables()
                .into_iter()
                .map(|v| Binder::Var(v.clone()))
                .collect();
            let inner = b.without(&pat_binders);
            Expr::Case {
                scrutinee: Arc::new(subst(scrutinee, b)),
                pat: pat.clone(),
                then_branch: Arc::new(subst(then_branch, inner.get())),
                else_branch: Arc::new(subst(else_branch, b)),
            }
        }
        Expr::Let { var, bound, body } => {
            let binder = [Binder::Var(var.clone())];
            let inner = b.without(&binder);
            Expr::Let {
                var: var.clone(),
                bound: Arc::new(subst(bound, b)),
                body: Arc::new(subst(body, inner.get())),
            }
        }
        Expr::Cons(h, t) => Expr::Cons(Arc::new(subst(h, b)), Arc::new(subst(t, b))),
        Expr::Letrec {
            id,
            params,
            body,
            cont,
        } => {
            let self_binder = [Binder::Fun(id.clone())];
            let in_cont = b.without(&self_binder);
            let fun_binders: Vec<Binder> = std::iter::once(Binder::Fun(id.clone()))
                .chain(params.iter().map(|p| Binder::Var(p.clone())))
                .collect();
            let in_body = b.without(&fun_binders);
            Expr::Letrec {
                id: id.clone(),
                params: params.clone(),
                body: Arc::new(subst(body, in_body.get())),
                cont: Arc::new(subst(cont, in_cont.get())),
            }
        }
        Expr::Receive(clauses) => Expr::Receive(
            clauses
                .iter()
                .map(|(p, body)| {
                    let binders: Vec<Binder> = p
                        .variables()
                        .into_iter()
                        .map(|v| Binder::Var(v.clone()))
                        .collect();
                    let inner = b.without(&binders);
                    (p.clone(), subst(body, inner.get()))
                })
                .collect(),
        ),
    }
}

/// Substitution inside a value only reaches function bodies.
pub fn subst_value(v: &Value, b: &Bindings) -> Value {
    match v {
        Value::Fun(f) => {
            let binders: Vec<Binder> = std::iter::once(Binder::Fun(f.id.clone()))
                .chain(f.params.iter().map(|p| Binder::Var(p.clone())))
                .collect();
            let inner = b.without(&binders);
            if inner.get().is_empty() {
                return v.clone();
            }
            Value::Fun(Arc::new(FunValue {
                id: f.id.clone(),
                params: f.params.clone(),
                body: subst(&f.body, inner.get()),
            }))
        }
        Value::Cons(h, t) => {
            if !h.contains_fun() && !t.contains_fun() {
                return v.clone();
            }
            Value::cons(subst_value(h, b), subst_value(t, b))
        }
        _ => v.clone(),
    }
}

impl Value {
    fn contains_fun(&self) -> bool {
        match self {
            Value::Fun(_) => true,
            Value::Cons(h, t) => h.contains_fun() || t.contains_fun(),
            _ => false,
        }
    }
}

/// Whether `v` is built with the same constructors as `p`, up to pattern
/// variables.
pub fn is_match(p: &Pattern, v: &Value) -> bool {
    match (p, v) {
        (Pattern::Var(_), _) => true,
        (Pattern::Int(i), Value::Int(j)) => i == j,
        (Pattern::Atom(a), Value::Atom(b)) => a == b,
        (Pattern::Pid(a), Value::Pid(b)) => a == b,
        (Pattern::Nil, Value::Nil) => true,
        (Pattern::Cons(ph, pt), Value::Cons(vh, vt)) => is_match(ph, vh) && is_match(pt, vt),
        _ => false,
    }
}

/// The bindings produced by matching `v` against `p`; `None` when they do
/// not match.
pub fn match_bind(p: &Pattern, v: &Value) -> Option<Bindings> {
    let mut out = Bindings::new();
    if bind_into(p, v, &mut out) {
        Some(out)
    } else {
        None
    }
}

fn bind_into(p: &Pattern, v: &Value, out: &mut Bindings) -> bool {
    match (p, v) {
        (Pattern::Var(x), _) => {
            out.bind_var(x.clone(), v.clone());
            true
        }
        (Pattern::Cons(ph, pt), Value::Cons(vh, vt)) => bind_into(ph, vh, out) && bind_into(pt, vt, out),
        _ => is_match(p, v),
    }
}

/// Converts an object-level proper list into its elements. Improper lists
/// and non-lists give `None`.
pub fn list_to_meta(v: &Value) -> Option<Vec<Value>> {
    let mut out = Vec::new();
    let mut cur = v;
    loop {
        match cur {
            Value::Nil => return Some(out),
            Value::Cons(h, t) => {
                out.push((**h).clone());
                cur = t;
            }
            _ => return None,
        }
    }
}

pub fn bool_to_atom(b: bool) -> Atom {
    Atom::new(if b { "true" } else { "false" })
}

pub fn atom_to_bool(v: &Value) -> Option<bool> {
    match v {
        Value::Atom(a) if a.name() == "true" => Some(true),
        Value::Atom(a) if a.name() == "false" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_list(items: &[i64]) -> Value {
        Value::list(items.iter().map(|&i| Value::int(i)))
    }

    #[test]
    fn subst_direct_hit_and_shadowing() {
        let b = Bindings::new().with_var("X", Value::int(0));
        assert_eq!(subst(&Expr::var("X"), &b), Expr::int(0));

        let shadow = Expr::let_in("X", Expr::int(1), Expr::var("X"));
        assert_eq!(subst(&shadow, &b), shadow);
    }

    #[test]
    fn subst_leaves_unbound_variables() {
        let b = Bindings::new().with_var("X", Value::int(0));
        assert_eq!(subst(&Expr::var("Y"), &b), Expr::var("Y"));
    }

    #[test]
    fn subst_respects_function_binders() {
        let id = FunId::new("f", 1);
        let inner = Value::fun(id.clone(), vec![Var::new("X")], Expr::var("X"));
        let b = Bindings::new().with_var("X", Value::int(7));
        assert_eq!(subst(&Expr::Val(inner.clone()), &b), Expr::Val(inner));

        let open = Value::fun(id, vec![Var::new("X")], Expr::var("Y"));
        let b = Bindings::new().with_var("Y", Value::int(7));
        match subst(&Expr::Val(open), &b) {
            Expr::Val(Value::Fun(f)) => assert_eq!(f.body, Expr::int(7)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn case_pattern_variables_shadow_only_then_branch() {
        let e = Expr::case(
            Expr::var("E"),
            Pattern::var("X"),
            Expr::var("X"),
            Expr::var("X"),
        )
        .unwrap();
        let b = Bindings::new()
            .with_var("X", Value::int(1))
            .with_var("E", Value::int(2));
        let out = subst(&e, &b);
        let expected = Expr::case(Expr::int(2), Pattern::var("X"), Expr::var("X"), Expr::int(1)).unwrap();
        assert_eq!(out, expected);
    }

    #[test]
    fn match_examples() {
        let ht = Pattern::Cons(Box::new(Pattern::var("H")), Box::new(Pattern::var("T")));
        assert!(is_match(&ht, &int_list(&[0, 1, 2])));
        assert!(!is_match(&ht, &Value::Nil));
        assert!(is_match(&Pattern::var("X"), &Value::atom("anything")));

        let b = match_bind(&ht, &int_list(&[0, 1, 2])).unwrap();
        assert_eq!(b.get_var(&Var::new("H")), Some(&Value::int(0)));
        assert_eq!(b.get_var(&Var::new("T")), Some(&int_list(&[1, 2])));

        assert_eq!(match_bind(&Pattern::Nil, &Value::Nil), Some(Bindings::new()));

        let improper = Pattern::Cons(Box::new(Pattern::Int(1.into())), Box::new(Pattern::var("T")));
        let b = match_bind(&improper, &Value::cons(Value::int(1), Value::int(2))).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.get_var(&Var::new("T")), Some(&Value::int(2)));

        assert_eq!(match_bind(&ht, &Value::Nil), None);
    }

    #[test]
    fn pid_patterns_only_match_pids() {
        assert!(is_match(&Pattern::Pid(Pid(3)), &Value::pid(3)));
        assert!(!is_match(&Pattern::Pid(Pid(3)), &Value::int(3)));
    }

    #[test]
    fn list_conversion() {
        assert_eq!(
            list_to_meta(&int_list(&[0, 1, 2])),
            Some(vec![Value::int(0), Value::int(1), Value::int(2)])
        );
        assert_eq!(list_to_meta(&Value::Nil), Some(vec![]));
        assert_eq!(list_to_meta(&Value::cons(Value::int(1), Value::int(2))), None);
        assert_eq!(list_to_meta(&Value::atom("a")), None);
    }

    #[test]
    fn bool_conversion() {
        assert_eq!(bool_to_atom(true), Atom::new("true"));
        assert_eq!(atom_to_bool(&Value::atom("false")), Some(false));
        assert_eq!(atom_to_bool(&Value::atom("ok")), None);
        for b in [true, false] {
            assert_eq!(atom_to_bool(&Value::Atom(bool_to_atom(b))), Some(b));
        }
    }

    #[test]
    fn non_linear_patterns_are_rejected() {
        let err = Pattern::try_cons(Pattern::var("X"), Pattern::var("X")).unwrap_err();
        assert_eq!(err, SyntaxError::NonLinearPattern("X".into()));
        assert!(Expr::receive(vec![]).is_err());
    }
}
