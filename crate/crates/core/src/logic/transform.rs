use std::collections::{BTreeMap, BTreeSet};

use super::formula::{fresh_var, Formula, Tc, Term};
use super::fragment::recognize_reach;
use crate::error::{Error, Result};

fn subst_term(t: &Term, map: &BTreeMap<String, Term>) -> Term {
    match t {
        Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
        Term::Const(_) => t.clone(),
    }
}

fn image_vars(map: &BTreeMap<String, Term>) -> BTreeSet<String> {
    map.values()
        .filter_map(|t| t.as_var().map(str::to_string))
        .collect()
}

/// Keeps only the entries whose key is free in `f`.
fn restrict(map: &BTreeMap<String, Term>, f: &Formula) -> BTreeMap<String, Term> {
    let free = f.free_vars();
    map.iter()
        .filter(|(k, _)| free.contains(*k))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

impl Formula {
    /// Capture-avoiding simultaneous substitution of terms for free variables.
    pub fn substitute(&self, map: &BTreeMap<String, Term>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(subst_term(a, map), subst_term(b, map)),
            Formula::Edge(l, a, b) => {
                Formula::Edge(l.clone(), subst_term(a, map), subst_term(b, map))
            }
            Formula::Reach(ls, a, b) => {
                Formula::Reach(ls.clone(), subst_term(a, map), subst_term(b, map))
            }
            Formula::ReachRe(r, a, b) => {
                Formula::ReachRe(r.clone(), subst_term(a, map), subst_term(b, map))
            }
            Formula::Not(a) => Formula::not(a.substitute(map)),
            Formula::And(a, b) => Formula::and(a.substitute(map), b.substitute(map)),
            Formula::Or(a, b) => Formula::or(a.substitute(map), b.substitute(map)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(map), b.substitute(map)),
            Formula::Exists(v, body) | Formula::Forall(v, body) => {
                let (vs, body) = subst_under_binders(std::slice::from_ref(v), body, map);
                let v = vs.into_iter().next().expect("one binder");
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v, body)
                } else {
                    Formula::forall(v, body)
                }
            }
            Formula::Tc(tc) => {
                let k = tc.arity();
                let bound: Vec<String> = tc.xs.iter().chain(&tc.ys).cloned().collect();
                let (bound, body) = subst_under_binders(&bound, &tc.body, map);
                Formula::Tc(Box::new(Tc {
                    xs: bound[..k].to_vec(),
                    ys: bound[k..].to_vec(),
                    body,
                    s: tc.s.iter().map(|t| subst_term(t, map)).collect(),
                    t: tc.t.iter().map(|t| subst_term(t, map)).collect(),
                }))
            }
        }
    }

    /// Substitutes `terms[i]` for `vars[i]`.
    pub fn substitute_tuple(&self, vars: &[String], terms: &[Term]) -> Result<Formula> {
        if vars.len() != terms.len() {
            return Err(Error::Arity(format!(
                "cannot substitute {} terms for {} variables",
                terms.len(),
                vars.len()
            )));
        }
        let map = vars.iter().cloned().zip(terms.iter().cloned()).collect();
        Ok(self.substitute(&map))
    }

    /// Replaces free variables by vertex constants.
    pub fn assign<'a, I>(&self, pairs: I) -> Formula
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let map = pairs
            .into_iter()
            .map(|(v, c)| (v.to_string(), Term::constant(c)))
            .collect();
        self.substitute(&map)
    }
}

fn subst_under_binders(
    binders: &[String],
    body: &Formula,
    map: &BTreeMap<String, Term>,
) -> (Vec<String>, Formula) {
    let mut inner: BTreeMap<String, Term> = map.clone();
    for b in binders {
        inner.remove(b);
    }
    let inner = restrict(&inner, body);
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let images = image_vars(&inner);
    let mut avoid = body.all_vars();
    avoid.extend(images.iter().cloned());
    avoid.extend(inner.keys().cloned());
    avoid.extend(binders.iter().cloned());
    let mut renamed = Vec::with_capacity(binders.len());
    let mut map = inner;
    for b in binders {
        if images.contains(b) {
            let fresh = fresh_var(b, &avoid);
            avoid.insert(fresh.clone());
            map.insert(b.clone(), Term::Var(fresh.clone()));
            renamed.push(fresh);
        } else {
            renamed.push(b.clone());
        }
    }
    (renamed, body.substitute(&map))
}

/// Negation with double-negation and constant folding.
pub fn negate(f: Formula) -> Formula {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(a) => *a,
        other => Formula::not(other),
    }
}

/// Rewrites into the `¬ ∨ ∃` core: `∧`, `→` and `∀` are eliminated and
/// TC nodes of reachability shape become `Reach` atoms.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Edge(..)
        | Formula::Reach(..)
        | Formula::ReachRe(..) => f.clone(),
        Formula::Tc(tc) => match recognize_reach(tc) {
            Some(labels) => Formula::Reach(labels, tc.s[0].clone(), tc.t[0].clone()),
            None => Formula::Tc(Box::new(Tc {
                body: normalize(&tc.body),
                ..(**tc).clone()
            })),
        },
        Formula::Not(a) => negate(normalize(a)),
        Formula::Or(a, b) => Formula::or(normalize(a), normalize(b)),
        Formula::And(a, b) => negate(Formula::or(
            negate(normalize(a)),
            negate(normalize(b)),
        )),
        Formula::Implies(a, b) => Formula::or(negate(normalize(a)), normalize(b)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), normalize(a)),
        Formula::Forall(v, a) => negate(Formula::exists(v.clone(), negate(normalize(a)))),
    }
}

/// Canonical representative up to bound-variable renaming and the order
/// and multiplicity of `∧`/`∨` operands.
pub fn canonicalize(f: &Formula) -> Formula {
    let free = f.free_vars();
    let mut prefix = String::from("_b");
    while free.iter().any(|v| v.starts_with(&prefix)) {
        prefix.push('_');
    }
    canon(f, &prefix, 0, &BTreeMap::new())
}

fn canon(f: &Formula, prefix: &str, depth: usize, ren: &BTreeMap<String, String>) -> Formula {
    let term = |t: &Term| match t {
        Term::Var(v) => Term::Var(ren.get(v).cloned().unwrap_or_else(|| v.clone())),
        c => c.clone(),
    };
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => {
            let (a, b) = (term(a), term(b));
            if a <= b {
                Formula::Eq(a, b)
            } else {
                Formula::Eq(b, a)
            }
        }
        Formula::Edge(l, a, b) => Formula::Edge(l.clone(), term(a), term(b)),
        Formula::Reach(ls, a, b) => Formula::Reach(ls.clone(), term(a), term(b)),
        Formula::ReachRe(r, a, b) => Formula::ReachRe(r.clone(), term(a), term(b)),
        Formula::Not(a) => Formula::not(canon(a, prefix, depth, ren)),
        Formula::Implies(a, b) => Formula::implies(
            canon(a, prefix, depth, ren),
            canon(b, prefix, depth, ren),
        ),
        Formula::And(..) | Formula::Or(..) => {
            let is_and = matches!(f, Formula::And(..));
            let mut parts = Vec::new();
            flatten(f, is_and, &mut parts);
            let mut keyed: Vec<(String, Formula)> = parts
                .into_iter()
                .map(|p| {
                    let c = canon(p, prefix, depth, ren);
                    (c.to_string(), c)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.cmp(&b.0));
            keyed.dedup_by(|a, b| a.0 == b.0);
            let items = keyed.into_iter().map(|(_, c)| c);
            if is_and {
                Formula::and_all(items)
            } else {
                Formula::or_all(items)
            }
        }
        Formula::Exists(v, a) | Formula::Forall(v, a) => {
            let name = format!("{prefix}{depth}");
            let mut ren = ren.clone();
            ren.insert(v.clone(), name.clone());
            let body = canon(a, prefix, depth + 1, &ren);
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(name, body)
            } else {
                Formula::forall(name, body)
            }
        }
        Formula::Tc(tc) => {
            let mut inner = ren.clone();
            let mut names = Vec::new();
            for (j, v) in tc.xs.iter().chain(&tc.ys).enumerate() {
                let name = format!("{prefix}{}", depth + j);
                inner.insert(v.clone(), name.clone());
                names.push(name);
            }
            let k = tc.arity();
            Formula::Tc(Box::new(Tc {
                xs: names[..k].to_vec(),
                ys: names[k..].to_vec(),
                body: canon(&tc.body, prefix, depth + 2 * k, &inner),
                s: tc.s.iter().map(term).collect(),
                t: tc.t.iter().map(term).collect(),
            }))
        }
    }
}

fn flatten<'a>(f: &'a Formula, is_and: bool, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) if is_and => {
            flatten(a, is_and, out);
            flatten(b, is_and, out);
        }
        Formula::Or(a, b) if !is_and => {
            flatten(a, is_and, out);
            flatten(b, is_and, out);
        }
        other => out.push(other),
    }
}

/// Printed canonical form; the identity used for sharing formulas.
pub fn canonical_text(f: &Formula) -> String {
    canonicalize(f).to_string()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn p(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn simple_substitution() {
        let f = p("x = y");
        let map = BTreeMap::from([("x".to_string(), Term::var("z"))]);
        assert_eq!(f.substitute(&map), p("z = y"));
    }

    #[test]
    fn substitution_freshens_capturing_binder() {
        let f = p("exists y. E a (x,y)");
        let map = BTreeMap::from([("x".to_string(), Term::var("y"))]);
        let g = f.substitute(&map);
        assert_eq!(g, p("exists y1. E a (y,y1)"));
        let h = p("exists x. x = y").substitute(&BTreeMap::from([(
            "x".to_string(),
            Term::var("q"),
        )]));
        assert_eq!(h, p("exists x. x = y"));
    }

    #[test]
    fn tc_substitution_and_arity() {
        let f = p("TC[u;v: E a (u,v) & v = w](s,t)");
        let g = f
            .substitute_tuple(&["w".into(), "s".into()], &[Term::var("u"), Term::constant("3")])
            .unwrap();
        assert_eq!(g, p("TC[u1;v: E a (u1,v) & v = u](3,t)"));
        assert!(f.substitute_tuple(&["w".into()], &[]).is_err());
    }

    #[test]
    fn normalize_eliminates_sugar() {
        let f = normalize(&p("forall x. E a (x,y) -> x = y & true"));
        let mut ok = true;
        f.visit(&mut |g| {
            if matches!(g, Formula::And(..) | Formula::Implies(..) | Formula::Forall(..)) {
                ok = false;
            }
        });
        assert!(ok, "{f}");
        assert_eq!(
            normalize(&p("TC[x;y: x = y | E a (x,y) | E b (x,y)](s,t)")),
            p("Reach[{a,b}](s,t)")
        );
    }

    #[test]
    fn canonical_form_ignores_order_and_names() {
        let a = canonical_text(&p("(exists u. E a (u,x)) & x = y"));
        let b = canonical_text(&p("y = x & exists w. E a (w,x)"));
        assert_eq!(a, b);
        let c = canonical_text(&p("x = y | x = y"));
        assert_eq!(c, "x = y");
    }
}
