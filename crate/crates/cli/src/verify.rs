//! Differential runs: composition against evaluation on the explicit
//! product, with greedy shrinking of disagreements.

use std::collections::BTreeMap;

use prodcheck::compose::{compose, eval_composed, profile_from_explicit, ComposeOptions, SyncProfile};
use prodcheck::eval::holds;
use prodcheck::system::{System, SystemJson};
use prodcheck::{build_product, Caps, Formula, Result};
use serde::Serialize;

/// Profile fault injection for testing the harness itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Fault {
    #[default]
    None,
    /// Every `ind` entry lowered by one.
    IndTooSmall,
}

impl Fault {
    fn apply(self, mut p: SyncProfile) -> SyncProfile {
        if self == Fault::IndTooSmall {
            for k in p.ind.values_mut() {
                *k = k.saturating_sub(1);
            }
        }
        p
    }
}

/// Both verdicts for one sentence on one system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Verdicts {
    pub composed: bool,
    pub oracle: bool,
}

pub fn verdicts(sys: &System, f: &Formula, fault: Fault, caps: &Caps) -> Result<Verdicts> {
    let profile = fault.apply(profile_from_explicit(&sys.spec)?);
    let cf = compose(f, &sys.spec, &profile, ComposeOptions::default(), caps)?;
    let composed = eval_composed(sys.spec.components(), &cf, &BTreeMap::new(), caps)?;
    let oracle = holds(&build_product(&sys.spec, caps)?, f, caps)?;
    Ok(Verdicts { composed, oracle })
}

fn disagrees(sys: &System, f: &Formula, fault: Fault, caps: &Caps) -> bool {
    verdicts(sys, f, fault, caps).is_ok_and(|v| v.composed != v.oracle)
}

/// One-step simplifications of a formula that keep its free variables.
pub fn formula_shrinks(f: &Formula) -> Vec<Formula> {
    let mut out = Vec::new();
    if !matches!(f, Formula::True | Formula::False) {
        out.push(Formula::True);
        out.push(Formula::False);
    }
    let b = |g: &Formula| Box::new(g.clone());
    match f {
        Formula::Reach(ls, s, t) if ls.len() > 1 => {
            for l in ls {
                let mut fewer = ls.clone();
                fewer.remove(l);
                out.push(Formula::Reach(fewer, s.clone(), t.clone()));
            }
        }
        Formula::Not(a) => {
            out.push((**a).clone());
            out.extend(formula_shrinks(a).into_iter().map(Formula::not));
        }
        Formula::And(x, y) | Formula::Or(x, y) | Formula::Implies(x, y) => {
            out.push((**x).clone());
            out.push((**y).clone());
            let rebuild = |l: Box<Formula>, r: Box<Formula>| match f {
                Formula::And(..) => Formula::And(l, r),
                Formula::Or(..) => Formula::Or(l, r),
                _ => Formula::Implies(l, r),
            };
            out.extend(formula_shrinks(x).into_iter().map(|s| rebuild(Box::new(s), b(y))));
            out.extend(formula_shrinks(y).into_iter().map(|s| rebuild(b(x), Box::new(s))));
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            out.push((**body).clone());
            let exists = matches!(f, Formula::Exists(..));
            out.extend(formula_shrinks(body).into_iter().map(|s| {
                if exists {
                    Formula::exists(v.clone(), s)
                } else {
                    Formula::forall(v.clone(), s)
                }
            }));
        }
        _ => {}
    }
    let free = f.free_vars();
    out.retain(|g| g.free_vars().is_subset(&free));
    out
}

/// One-step deletions of an edge, a vertex or a constraint tuple.
pub fn system_shrinks(j: &SystemJson) -> Vec<SystemJson> {
    let mut out = Vec::new();
    for t in 0..j.constraint.len() {
        let mut k = j.clone();
        k.constraint.remove(t);
        out.push(k);
    }
    for (c, comp) in j.components.iter().enumerate() {
        for v in &comp.vertices {
            if comp.vertices.len() == 1 {
                break;
            }
            let mut k = j.clone();
            let kc = &mut k.components[c];
            kc.vertices.retain(|w| w != v);
            kc.edges.retain(|e| e.from != *v && e.to != *v);
            out.push(k);
        }
        for e in 0..comp.edges.len() {
            let mut k = j.clone();
            k.components[c].edges.remove(e);
            out.push(k);
        }
    }
    out
}

/// Greedy shrinking: repeatedly takes the first simplification of the
/// formula or the system that still disagrees. Locally minimal only.
pub fn minimize(sys: &System, f: &Formula, fault: Fault, caps: &Caps) -> (System, Formula) {
    let mut f = f.clone();
    let mut j = sys.to_value();
    let mut cur = sys.clone();
    'outer: loop {
        for g in formula_shrinks(&f) {
            if disagrees(&cur, &g, fault, caps) {
                f = g;
                continue 'outer;
            }
        }
        for k in system_shrinks(&j) {
            if let Ok(s) = System::from_value(k.clone()) {
                if disagrees(&s, &f, fault, caps) {
                    j = k;
                    cur = s;
                    continue 'outer;
                }
            }
        }
        return (cur, f);
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Counterexample {
    pub item: usize,
    pub formula: String,
    pub verdicts: Verdicts,
    pub system: SystemJson,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub items: usize,
    pub agree: usize,
    pub errors: Vec<(usize, String)>,
    pub counterexamples: Vec<Counterexample>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.agree == self.items
    }
}

/// Checks every `(system, sentence)` pair; disagreements are minimized.
pub fn run(items: &[(System, Formula)], fault: Fault, caps: &Caps) -> Report {
    let mut report = Report {
        items: items.len(),
        agree: 0,
        errors: Vec::new(),
        counterexamples: Vec::new(),
    };
    for (i, (sys, f)) in items.iter().enumerate() {
        match verdicts(sys, f, fault, caps) {
            Ok(v) if v.composed == v.oracle => report.agree += 1,
            Ok(_) => {
                let (s, g) = minimize(sys, f, fault, caps);
                let v = verdicts(&s, &g, fault, caps).expect("minimized pair still evaluates");
                report.counterexamples.push(Counterexample {
                    item: i,
                    formula: g.to_string(),
                    verdicts: v,
                    system: s.to_value(),
                });
            }
            Err(e) => report.errors.push((i, e.to_string())),
        }
    }
    report
}
