//! Two-stack pushdown automata split into an asynchronous product of two
//! one-stack automata, with bounded configuration graphs.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::logic::{Formula, Regex, Term};
use crate::lts::{is_identifier, render_tuple, LabelAlphabet, Lts, ProductSpec, SyncConstraint, VertexId};

/// `(q, a, γ₁, γ₂, γ₃, γ₄, p)`: pop `γ₁`/`γ₂`, push `γ₃`/`γ₄`; `None` is ε.
pub type Transition2 = (String, String, Option<String>, Option<String>, Option<String>, Option<String>, String);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoPda {
    pub states: Vec<String>,
    pub input: Vec<String>,
    pub stack: Vec<String>,
    pub init: String,
    #[serde(rename = "final")]
    pub fin: String,
    pub delta: Vec<Transition2>,
}

/// Stack written top first, symbols joined by `_`; `eps` when empty.
pub fn stack_name(stack: &[String]) -> String {
    if stack.is_empty() {
        return "eps".into();
    }
    stack.iter().rev().cloned().collect::<Vec<_>>().join("_")
}

/// Vertex name `(q,stack)`.
pub fn config_name(q: &str, stack: &[String]) -> String {
    render_tuple(&[q, &stack_name(stack)])
}

/// Configuration of the two-stack machine; stack tops are last.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config2 {
    pub state: String,
    pub first: Vec<String>,
    pub second: Vec<String>,
}

impl Config2 {
    pub fn initial(state: &str) -> Self {
        Config2 {
            state: state.to_string(),
            first: Vec::new(),
            second: Vec::new(),
        }
    }

    /// Name of the matching vertex in the asynchronous product.
    pub fn product_name(&self) -> String {
        render_tuple(&[
            config_name(&self.state, &self.first),
            config_name(&self.state, &self.second),
        ])
    }
}

fn apply(stack: &[String], pop: &Option<String>, push: &Option<String>) -> Option<Vec<String>> {
    let mut s = stack.to_vec();
    if let Some(g) = pop {
        if s.last() != Some(g) {
            return None;
        }
        s.pop();
    }
    if let Some(g) = push {
        s.push(g.clone());
    }
    Some(s)
}

impl TwoPda {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut p: TwoPda = serde_json::from_str(text)?;
        let eps = |g: &mut Option<String>| {
            if g.as_deref() == Some("eps") {
                *g = None;
            }
        };
        for t in &mut p.delta {
            eps(&mut t.2);
            eps(&mut t.3);
            eps(&mut t.4);
            eps(&mut t.5);
        }
        p.validate()?;
        Ok(p)
    }

    /// Names, plus normalization: every state reachable from the initial
    /// one, the final state the only sink, no transition into the initial state.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        let states: BTreeSet<&String> = self.states.iter().collect();
        let input: BTreeSet<&String> = self.input.iter().collect();
        let stack: BTreeSet<&String> = self.stack.iter().collect();
        for s in self.states.iter().chain(&self.input) {
            if !is_identifier(s) {
                return bad(format!("`{s}` is not an identifier"));
            }
        }
        for g in &self.stack {
            if g.is_empty() || !g.chars().all(|c| c.is_ascii_alphanumeric()) || g == "eps" {
                return bad(format!("stack symbol `{g}` must be alphanumeric and not `eps`"));
            }
        }
        if !states.contains(&self.init) || !states.contains(&self.fin) {
            return bad("initial or final state is undeclared".into());
        }
        let mut succ: BTreeMap<&String, BTreeSet<&String>> = BTreeMap::new();
        for (q, a, g1, g2, g3, g4, p) in &self.delta {
            if !states.contains(q) || !states.contains(p) || !input.contains(a) {
                return bad(format!("transition from `{q}` mentions undeclared names"));
            }
            if [g1, g2, g3, g4].iter().any(|g| g.as_ref().is_some_and(|g| !stack.contains(g))) {
                return bad(format!("transition from `{q}` uses an undeclared stack symbol"));
            }
            if *p == self.init {
                return bad("the initial state has an incoming transition".into());
            }
            succ.entry(q).or_default().insert(p);
        }
        for q in &self.states {
            let sink = succ.get(q).is_none_or(|s| s.is_empty());
            if sink != (*q == self.fin) {
                return bad(format!("`{q}` violates: the final state is the only sink"));
            }
        }
        let mut seen = BTreeSet::from([&self.init]);
        let mut queue = VecDeque::from([&self.init]);
        while let Some(q) = queue.pop_front() {
            for p in succ.get(q).into_iter().flatten() {
                if seen.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        if let Some(q) = self.states.iter().find(|q| !seen.contains(q)) {
            return bad(format!("`{q}` is unreachable from the initial state"));
        }
        Ok(())
    }

    /// One-step successors, with the transition index; stacks stay within `h`.
    pub fn successors(&self, c: &Config2, h: usize) -> Vec<(usize, Config2)> {
        let mut out = Vec::new();
        for (i, (q, _, g1, g2, g3, g4, p)) in self.delta.iter().enumerate() {
            if *q != c.state {
                continue;
            }
            let (Some(first), Some(second)) = (apply(&c.first, g1, g3), apply(&c.second, g2, g4)) else {
                continue;
            };
            if first.len() <= h && second.len() <= h {
                out.push((
                    i,
                    Config2 {
                        state: p.clone(),
                        first,
                        second,
                    },
                ));
            }
        }
        out
    }

    /// Configurations reachable from `from` in at most `max_steps` steps with
    /// stack heights at most `h`, with their distances.
    pub fn reachable(&self, from: &Config2, h: usize, max_steps: usize) -> BTreeMap<Config2, usize> {
        let mut dist = BTreeMap::from([(from.clone(), 0)]);
        let mut queue = VecDeque::from([from.clone()]);
        while let Some(c) = queue.pop_front() {
            let d = dist[&c];
            if d == max_steps {
                continue;
            }
            for (_, n) in self.successors(&c, h) {
                if !dist.contains_key(&n) {
                    dist.insert(n.clone(), d + 1);
                    queue.push_back(n);
                }
            }
        }
        dist
    }

    /// All configurations with both stacks of height at most `h`.
    pub fn configurations(&self, h: usize) -> Vec<Config2> {
        let stacks = all_stacks(&self.stack, h);
        let mut out = Vec::new();
        for q in &self.states {
            for a in &stacks {
                for b in &stacks {
                    out.push(Config2 {
                        state: q.clone(),
                        first: a.clone(),
                        second: b.clone(),
                    });
                }
            }
        }
        out
    }
}

fn all_stacks(symbols: &[String], h: usize) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    let mut layer = vec![Vec::new()];
    for _ in 0..h {
        layer = layer
            .iter()
            .flat_map(|s: &Vec<String>| {
                symbols.iter().map(move |g| {
                    let mut t = s.clone();
                    t.push(g.clone());
                    t
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// A one-stack automaton `(q, label, pop, push, p)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pda {
    pub states: Vec<String>,
    pub stack: Vec<String>,
    pub init: String,
    pub fin: String,
    pub delta: Vec<(String, String, Option<String>, Option<String>, String)>,
}

impl Pda {
    pub fn labels(&self) -> BTreeSet<String> {
        self.delta.iter().map(|t| t.1.clone()).collect()
    }

    /// Configuration graph over every `(q, stack)` with height at most `h`.
    /// Labels are local, ready for an asynchronous product.
    pub fn config_graph(&self, h: usize, caps: &Caps) -> Result<Lts> {
        let stacks = all_stacks(&self.stack, h);
        check_cap(
            "expansion",
            (self.states.len() * stacks.len()) as u128,
            caps.expansion as u128,
        )?;
        let mut g = Lts::new(LabelAlphabet::local_only(self.labels())?);
        for q in &self.states {
            for s in &stacks {
                g.add_vertex(config_name(q, s));
            }
        }
        for q in &self.states {
            for s in &stacks {
                let from = g.vertex_id(&config_name(q, s)).expect("added");
                for (q2, label, pop, push, p) in &self.delta {
                    if q2 != q {
                        continue;
                    }
                    if let Some(t) = apply(s, pop, push).filter(|t| t.len() <= h) {
                        let to: VertexId = g.vertex_id(&config_name(p, &t)).expect("added");
                        g.add_edge(label, from, to)?;
                    }
                }
            }
        }
        Ok(g)
    }
}

/// Label of transition `i` reading `a` in the first half; the second half
/// appends `_bar`.
pub fn split_label(i: usize, a: &str, bar: bool) -> String {
    format!("t{i}_{a}{}", if bar { "_bar" } else { "" })
}

#[derive(Debug, Clone)]
pub struct Split {
    pub machine: TwoPda,
    pub first: Pda,
    pub second: Pda,
    /// `(⋁ (a,δ)(ā,δ̄))*`
    pub r: Regex,
}

pub fn split_2pda(m: &TwoPda) -> Result<Split> {
    m.validate()?;
    let half = |bar: bool| Pda {
        states: m.states.clone(),
        stack: m.stack.clone(),
        init: m.init.clone(),
        fin: m.fin.clone(),
        delta: m
            .delta
            .iter()
            .enumerate()
            .map(|(i, (q, a, g1, g2, g3, g4, p))| {
                let (pop, push) = if bar { (g2, g4) } else { (g1, g3) };
                (q.clone(), split_label(i, a, bar), pop.clone(), push.clone(), p.clone())
            })
            .collect(),
    };
    let pairs = m.delta.iter().enumerate().map(|(i, (_, a, ..))| {
        Regex::concat(Regex::symbol(split_label(i, a, false)), Regex::symbol(split_label(i, a, true)))
    });
    let r = Regex::star(pairs.reduce(Regex::union).unwrap_or(Regex::Empty));
    Ok(Split {
        machine: m.clone(),
        first: half(false),
        second: half(true),
        r,
    })
}

impl Split {
    /// `(ε + ⋁ (a,δ)(ā,δ̄))ⁿ`: at most `n` paired steps.
    pub fn bounded_r(&self, n: usize) -> Regex {
        let Regex::Star(pair) = &self.r else {
            unreachable!("r is a star")
        };
        let step = Regex::union(Regex::Epsilon, (**pair).clone());
        (0..n).fold(Regex::Epsilon, |acc, _| Regex::concat(acc, step.clone()))
    }

    /// Asynchronous product of the two bounded configuration graphs.
    pub fn product_spec(&self, h: usize, caps: &Caps) -> Result<ProductSpec> {
        ProductSpec::new(
            vec![self.first.config_graph(h, caps)?, self.second.config_graph(h, caps)?],
            SyncConstraint::new(Vec::new()),
        )
    }

    fn paired_step(&self, letter: Option<&str>, x: Term, mid: &str, y: Term) -> Formula {
        Formula::or_all(
            self.machine
                .delta
                .iter()
                .enumerate()
                .filter(|(_, t)| letter.is_none_or(|a| t.1 == a))
                .map(|(i, t)| {
                    Formula::exists(
                        mid,
                        Formula::and(
                            Formula::edge(split_label(i, &t.1, false), x.clone(), Term::var(mid)),
                            Formula::edge(split_label(i, &t.1, true), Term::var(mid), y.clone()),
                        ),
                    )
                }),
        )
    }

    /// `φ_w(x,y)`: `y` is reached from `x` by paired steps reading `w`.
    pub fn phi_w(&self, word: &[String], x: Term, y: Term) -> Formula {
        fn go(s: &Split, word: &[String], x: Term, y: &Term, k: usize) -> Formula {
            match word.split_first() {
                None => Formula::eq(x, y.clone()),
                Some((a, rest)) if rest.is_empty() => s.paired_step(Some(a), x, &format!("m{k}"), y.clone()),
                Some((a, rest)) => {
                    let next = format!("u{k}");
                    let step = s.paired_step(Some(a), x, &format!("m{k}"), Term::var(&next));
                    Formula::exists(
                        next.clone(),
                        Formula::and(step, go(s, rest, Term::var(&next), y, k + 1)),
                    )
                }
            }
        }
        go(self, word, x, &y, 0)
    }

    /// Sentence: after reading `w` from the initial configuration, the
    /// machine can reach the final state.
    pub fn halting_sentence(&self, word: &[String]) -> Formula {
        let init = Term::constant(Config2::initial(&self.machine.init).product_name());
        let into_final = Formula::or_all(
            self.machine
                .delta
                .iter()
                .enumerate()
                .filter(|(_, t)| t.6 == self.machine.fin)
                .map(|(i, t)| {
                    Formula::and(
                        Formula::edge_vars(split_label(i, &t.1, false), "z2", "z3"),
                        Formula::edge_vars(split_label(i, &t.1, true), "z3", "z4"),
                    )
                }),
        );
        Formula::exists_all(
            ["z1", "z2", "z3", "z4"],
            Formula::and_all([
                self.phi_w(word, init, Term::var("z1")),
                Formula::ReachRe(self.r.clone(), Term::var("z1"), Term::var("z2")),
                into_final,
            ]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> TwoPda {
        TwoPda {
            states: vec!["q0".into(), "f".into()],
            input: vec!["a".into()],
            stack: vec!["A".into()],
            init: "q0".into(),
            fin: "f".into(),
            delta: vec![("q0".into(), "a".into(), None, None, Some("A".into()), None, "f".into())],
        }
    }

    #[test]
    fn single_transition_splits_into_a_pair() {
        let s = split_2pda(&tiny()).unwrap();
        assert_eq!(s.first.delta.len(), 1);
        assert_eq!(s.second.delta.len(), 1);
        assert_eq!(s.first.delta[0].1, "t0_a");
        assert_eq!(s.second.delta[0].1, "t0_a_bar");
        assert_eq!(s.first.delta[0].3, Some("A".into()));
        assert_eq!(s.second.delta[0].3, None);
    }

    #[test]
    fn regex_rejects_unpaired_order() {
        let s = split_2pda(&tiny()).unwrap();
        assert!(s.r.matches(&["t0_a", "t0_a_bar"]));
        assert!(!s.r.matches(&["t0_a_bar", "t0_a"]));
        assert!(!s.r.matches(&["t0_a", "t0_a", "t0_a_bar", "t0_a_bar"]));
    }

    #[test]
    fn normalization_is_checked() {
        let mut m = tiny();
        m.delta.push(("f".into(), "a".into(), None, None, None, None, "f".into()));
        assert!(m.validate().is_err());
        let mut m = tiny();
        m.states.push("lost".into());
        assert!(m.validate().is_err());
    }

    #[test]
    fn names() {
        assert_eq!(config_name("q0", &[]), "(q0,eps)");
        assert_eq!(config_name("q", &["A".into(), "B".into()]), "(q,B_A)");
        assert_eq!(Config2::initial("q0").product_name(), "((q0,eps),(q0,eps))");
    }

    #[test]
    fn json_accepts_eps_and_null() {
        let text = r#"{"states":["q0","f"],"input":["a"],"stack":["A"],"init":"q0","final":"f",
            "delta":[["q0","a",null,"eps","A",null,"f"]]}"#;
        let m = TwoPda::from_json(text).unwrap();
        assert_eq!(m, tiny());
    }
}
