use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::formula::{fresh_var, Formula, Tc, Term};

/// Logic families, ordered by inclusion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    #[serde(rename = "FO")]
    Fo,
    #[serde(rename = "FO(R)")]
    FoR,
    #[serde(rename = "FO(Reg)")]
    FoReg,
    #[serde(rename = "FO(TC)")]
    FoTc,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Fo => "FO",
            Family::FoR => "FO(R)",
            Family::FoReg => "FO(Reg)",
            Family::FoTc => "FO(TC)",
        })
    }
}

/// Smallest family containing a formula, with its TC arity and nesting.
///
/// `Reach` atoms (set or regex form) count as arity-1 closure operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FragmentDescriptor {
    pub family: Family,
    pub max_tc_arity: usize,
    pub max_tc_nesting: usize,
    pub has_parameters: bool,
}

impl fmt::Display for FragmentDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} k={} l={} parameters={}",
            self.family, self.max_tc_arity, self.max_tc_nesting, self.has_parameters
        )
    }
}

/// If `tc` is `[TC_{x,y} (x=y ∨ ⋁_{a∈Γ} E_a xy)]`, returns `Γ`.
///
/// Disjuncts may appear in any order and nesting; `y=x` is accepted too.
pub fn recognize_reach(tc: &Tc) -> Option<BTreeSet<String>> {
    if tc.arity() != 1 {
        return None;
    }
    let (x, y) = (&tc.xs[0], &tc.ys[0]);
    let mut parts = Vec::new();
    disjuncts(&tc.body, &mut parts);
    let is = |t: &Term, v: &String| t.as_var() == Some(v.as_str());
    let mut saw_eq = false;
    let mut labels = BTreeSet::new();
    for p in parts {
        match p {
            Formula::Eq(a, b) if (is(a, x) && is(b, y)) || (is(a, y) && is(b, x)) => saw_eq = true,
            Formula::Edge(l, a, b) if is(a, x) && is(b, y) => {
                labels.insert(l.clone());
            }
            _ => return None,
        }
    }
    saw_eq.then_some(labels)
}

fn disjuncts<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Or(a, b) => {
            disjuncts(a, out);
            disjuncts(b, out);
        }
        other => out.push(other),
    }
}

/// The TC node that `Reach_Γ(s,t)` abbreviates.
pub fn reach_as_tc(labels: &BTreeSet<String>, s: &Term, t: &Term) -> Tc {
    let mut avoid: BTreeSet<String> = [s, t]
        .iter()
        .filter_map(|t| t.as_var().map(str::to_string))
        .collect();
    let x = fresh_var("x", &avoid);
    avoid.insert(x.clone());
    let y = fresh_var("y", &avoid);
    let body = Formula::or_all(
        std::iter::once(Formula::eq_vars(&x, &y))
            .chain(labels.iter().map(|l| Formula::edge_vars(l.clone(), &x, &y))),
    );
    Tc::new(vec![x], vec![y], body, vec![s.clone()], vec![t.clone()])
        .expect("well-formed reach pattern")
}

/// Replaces every `Reach_Γ` atom by its TC definition.
pub fn desugar_reach(f: &Formula) -> Formula {
    match f {
        Formula::Reach(ls, s, t) => Formula::tc(reach_as_tc(ls, s, t)),
        Formula::True
        | Formula::False
        | Formula::Eq(..)
        | Formula::Edge(..)
        | Formula::ReachRe(..) => f.clone(),
        Formula::Tc(tc) => Formula::Tc(Box::new(Tc {
            body: desugar_reach(&tc.body),
            ..(**tc).clone()
        })),
        Formula::Not(a) => Formula::not(desugar_reach(a)),
        Formula::And(a, b) => Formula::and(desugar_reach(a), desugar_reach(b)),
        Formula::Or(a, b) => Formula::or(desugar_reach(a), desugar_reach(b)),
        Formula::Implies(a, b) => Formula::implies(desugar_reach(a), desugar_reach(b)),
        Formula::Exists(v, a) => Formula::exists(v.clone(), desugar_reach(a)),
        Formula::Forall(v, a) => Formula::forall(v.clone(), desugar_reach(a)),
    }
}

pub fn classify(f: &Formula) -> FragmentDescriptor {
    match f {
        Formula::True | Formula::False | Formula::Eq(..) | Formula::Edge(..) => FragmentDescriptor {
            family: Family::Fo,
            max_tc_arity: 0,
            max_tc_nesting: 0,
            has_parameters: false,
        },
        Formula::Reach(..) => FragmentDescriptor {
            family: Family::FoR,
            max_tc_arity: 1,
            max_tc_nesting: 1,
            has_parameters: false,
        },
        Formula::ReachRe(..) => FragmentDescriptor {
            family: Family::FoReg,
            max_tc_arity: 1,
            max_tc_nesting: 1,
            has_parameters: false,
        },
        Formula::Tc(tc) => {
            if recognize_reach(tc).is_some() {
                return classify(&Formula::Reach(BTreeSet::new(), tc.s[0].clone(), tc.t[0].clone()));
            }
            let inner = classify(&tc.body);
            FragmentDescriptor {
                family: Family::FoTc,
                max_tc_arity: inner.max_tc_arity.max(tc.arity()),
                max_tc_nesting: inner.max_tc_nesting + 1,
                has_parameters: inner.has_parameters || !tc.parameters().is_empty(),
            }
        }
        Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => classify(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            let (a, b) = (classify(a), classify(b));
            FragmentDescriptor {
                family: a.family.max(b.family),
                max_tc_arity: a.max_tc_arity.max(b.max_tc_arity),
                max_tc_nesting: a.max_tc_nesting.max(b.max_tc_nesting),
                has_parameters: a.has_parameters || b.has_parameters,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;

    fn c(s: &str) -> FragmentDescriptor {
        classify(&parse_formula(s).unwrap())
    }

    #[test]
    fn families() {
        assert_eq!(c("x = y & !y = z").family, Family::Fo);
        let r = c("TC[x;y: x = y | E a (x,y)](s,t)");
        assert_eq!((r.family, r.max_tc_arity, r.max_tc_nesting), (Family::FoR, 1, 1));
        assert_eq!(c("Reach[re:a.b*](s,t)").family, Family::FoReg);
        let t = c("TC[u;v: E a (u,v)](s,t)");
        assert_eq!(t.family, Family::FoTc);
        let p = c("TC[u;v: E a (u,v) & v = w](s,t)");
        assert!(p.has_parameters);
    }

    #[test]
    fn nesting_counts_chains() {
        let d = c("TC[a;b: TC[u;v: E S (u,v) & !u = v](a,b)](s,t) & TC[p,q;r,w: E S (p,r) & E S (q,w)](s,s,t,t)");
        assert_eq!(d.max_tc_nesting, 2);
        assert_eq!(d.max_tc_arity, 2);
        assert!(!d.has_parameters);
    }

    #[test]
    fn desugar_is_stable() {
        let f = parse_formula("exists z. Reach[{a,b}](x,z) & !Reach[{}](z,y)").unwrap();
        let g = desugar_reach(&f);
        assert!(matches!(
            g,
            Formula::Exists(_, ref b) if matches!(**b, Formula::And(ref l, _) if matches!(**l, Formula::Tc(_)))
        ));
        assert_eq!(classify(&g), classify(&f));
    }
}
