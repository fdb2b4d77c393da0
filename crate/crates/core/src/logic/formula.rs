use std::collections::BTreeSet;
use std::fmt;

use super::regex::Regex;
use crate::error::{Error, Result};
use crate::lts::{is_identifier, split_tuple};

/// Argument of an atom: a variable or a vertex constant.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => f.write_str(v),
            Term::Const(c) if const_needs_no_quotes(c) => f.write_str(c),
            Term::Const(c) => write!(f, "'{c}'"),
        }
    }
}

fn const_needs_no_quotes(c: &str) -> bool {
    if !c.is_empty() && c.chars().all(|ch| ch.is_ascii_digit()) {
        return true;
    }
    match split_tuple(c) {
        Some(parts) => parts.iter().all(|p| {
            // Bare identifiers inside a tuple constant are vertex names.
            is_identifier(p) || const_needs_no_quotes(p)
        }),
        None => false,
    }
}

/// Transitive-closure node `[TC_{x̄,ȳ} body] s̄, t̄`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tc {
    pub xs: Vec<String>,
    pub ys: Vec<String>,
    pub body: Formula,
    pub s: Vec<Term>,
    pub t: Vec<Term>,
}

impl Tc {
    pub fn new(
        xs: Vec<String>,
        ys: Vec<String>,
        body: Formula,
        s: Vec<Term>,
        t: Vec<Term>,
    ) -> Result<Self> {
        let k = xs.len();
        if k == 0 || ys.len() != k || s.len() != k || t.len() != k {
            return Err(Error::Arity(format!(
                "TC needs equal nonzero tuple lengths, got {}/{}/{}/{}",
                xs.len(),
                ys.len(),
                s.len(),
                t.len()
            )));
        }
        let bound: BTreeSet<&String> = xs.iter().chain(&ys).collect();
        if bound.len() != 2 * k {
            return Err(Error::Arity(
                "TC bound variables must be pairwise distinct".into(),
            ));
        }
        Ok(Tc { xs, ys, body, s, t })
    }

    pub fn arity(&self) -> usize {
        self.xs.len()
    }

    /// Free variables of the body other than the bound tuples.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut p = self.body.free_vars();
        for v in self.xs.iter().chain(&self.ys) {
            p.remove(v);
        }
        p
    }
}

/// One AST for FO, FO(R), FO(Reg) and FO(TC).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    Edge(String, Term, Term),
    /// `Reach_Γ(s,t)`: reflexive-transitive reachability over the labels in `Γ`.
    Reach(BTreeSet<String>, Term, Term),
    /// `Reach_r(s,t)`: a path whose label word is in `L(r)`.
    ReachRe(Regex, Term, Term),
    Tc(Box<Tc>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

// Short constructors, used all over the gadget and composer code.
impl Formula {
    pub fn eq(a: Term, b: Term) -> Self {
        Formula::Eq(a, b)
    }

    pub fn eq_vars(a: &str, b: &str) -> Self {
        Formula::Eq(Term::var(a), Term::var(b))
    }

    pub fn edge(label: impl Into<String>, a: Term, b: Term) -> Self {
        Formula::Edge(label.into(), a, b)
    }

    pub fn edge_vars(label: impl Into<String>, a: &str, b: &str) -> Self {
        Formula::Edge(label.into(), Term::var(a), Term::var(b))
    }

    pub fn reach<I, S>(labels: I, a: Term, b: Term) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Formula::Reach(labels.into_iter().map(Into::into).collect(), a, b)
    }

    pub fn reach_vars<I, S>(labels: I, a: &str, b: &str) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::reach(labels, Term::var(a), Term::var(b))
    }

    pub fn tc(tc: Tc) -> Self {
        Formula::Tc(Box::new(tc))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn and_all<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn or_all<I: IntoIterator<Item = Formula>>(items: I) -> Self {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// `∃v₁ … ∃vₙ body`, innermost quantifier last.
    pub fn exists_all<I, S>(vars: I, body: Formula) -> Self
    where
        I: IntoIterator<Item = S>,
        I::IntoIter: DoubleEndedIterator,
        S: Into<String>,
    {
        vars.into_iter()
            .rev()
            .fold(body, |acc, v| Formula::exists(v, acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b)
            | Formula::Edge(_, a, b)
            | Formula::Reach(_, a, b)
            | Formula::ReachRe(_, a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Tc(tc) => {
                for t in tc.s.iter().chain(&tc.t) {
                    term(t, bound);
                }
                let depth = bound.len();
                bound.extend(tc.xs.iter().cloned());
                bound.extend(tc.ys.iter().cloned());
                tc.body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Every variable name occurring anywhere, bound or free.
    pub fn all_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Eq(a, b)
            | Formula::Edge(_, a, b)
            | Formula::Reach(_, a, b)
            | Formula::ReachRe(_, a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Tc(tc) => {
                out.extend(tc.xs.iter().cloned());
                out.extend(tc.ys.iter().cloned());
                for t in tc.s.iter().chain(&tc.t) {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Labels mentioned by edge atoms, reach sets and regexes.
    pub fn labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Edge(l, _, _) => {
                out.insert(l.clone());
            }
            Formula::Reach(ls, _, _) => out.extend(ls.iter().cloned()),
            Formula::ReachRe(r, _, _) => out.extend(r.symbols()),
            _ => {}
        });
        out
    }

    /// Pre-order traversal of all sub-formulas, TC bodies included.
    pub fn visit<F: FnMut(&Formula)>(&self, f: &mut F) {
        f(self);
        match self {
            Formula::Tc(tc) => tc.body.visit(f),
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Number of nested quantifiers on the deepest branch.
    pub fn quantifier_depth(&self) -> usize {
        match self {
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_depth(),
            Formula::Not(f) => f.quantifier_depth(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.quantifier_depth().max(b.quantifier_depth())
            }
            Formula::Tc(tc) => tc.body.quantifier_depth(),
            _ => 0,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(..) => 4,
            Formula::Exists(..) | Formula::Forall(..) => 0,
            _ => 5,
        }
    }
}

fn write_labels(f: &mut fmt::Formatter<'_>, labels: &BTreeSet<String>) -> fmt::Result {
    f.write_str("{")?;
    for (i, l) in labels.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        f.write_str(l)?;
    }
    f.write_str("}")
}

fn write_child(f: &mut fmt::Formatter<'_>, child: &Formula, min_prec: u8) -> fmt::Result {
    // Quantifiers extend maximally to the right, so they are parenthesized
    // whenever they are an operand.
    if child.precedence() < min_prec {
        write!(f, "({child})")
    } else {
        write!(f, "{child}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Edge(l, a, b) => write!(f, "E {l} ({a},{b})"),
            Formula::Reach(ls, a, b) => {
                f.write_str("Reach[")?;
                write_labels(f, ls)?;
                write!(f, "]({a},{b})")
            }
            Formula::ReachRe(r, a, b) => write!(f, "Reach[re:{r}]({a},{b})"),
            Formula::Tc(tc) => {
                write!(f, "TC[{};{}: {}](", tc.xs.join(","), tc.ys.join(","), tc.body)?;
                for (i, t) in tc.s.iter().chain(&tc.t).enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Formula::Not(a) => {
                f.write_str("!")?;
                write_child(f, a, 4)
            }
            Formula::And(a, b) => {
                write_child(f, a, 3)?;
                f.write_str(" & ")?;
                write_child(f, b, 4)
            }
            Formula::Or(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" | ")?;
                write_child(f, b, 3)
            }
            Formula::Implies(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(" -> ")?;
                write_child(f, b, 1)
            }
            Formula::Exists(v, a) => write!(f, "exists {v}. {a}"),
            Formula::Forall(v, a) => write!(f, "forall {v}. {a}"),
        }
    }
}

/// Returns a variable name based on `base` that is not in `avoid`.
pub fn fresh_var(base: &str, avoid: &BTreeSet<String>) -> String {
    if !avoid.contains(base) {
        return base.to_string();
    }
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded supply of names")
}
