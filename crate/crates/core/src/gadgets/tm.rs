//! Deterministic Turing machines encoded as a ground tree rewriting system
//! synchronized with a star graph.
//!
//! A configuration `a₁…a_k q b_l…b₁` (head on `b_l`) is the tree
//! `•(X(a₁(…(a_k))), X(b₁(…(b_l(q)))))`. Each machine step takes two
//! rewrites: the right branch moves first with an unbarred label, then the
//! left branch catches up with the matching barred label. The star graph
//! forces that alternation.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::gtrs::{gtrs_expand_with, Arity, Gtrs, Rule, Tree};
use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::logic::Formula;
use crate::lts::{
    is_identifier, render_tuple, ClassCount, DeclaredSync, LabelAlphabet, Lts, ProductSpec, SyncConstraint,
    SyncTuple, VertexId,
};

/// Root symbol of every configuration tree.
pub const ROOT: &str = "•";
/// Bottom marker of both branches.
pub const MARK: &str = "X";
/// Center of the star graph.
pub const CENTER: &str = "v";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dtm {
    pub states: Vec<String>,
    pub alphabet: Vec<String>,
    pub blank: String,
    pub init: String,
    pub halt: String,
    /// Rows `[q, a, p, c, move]`: in state `q` reading `a`, write `c`, go to `p`.
    pub delta: Vec<(String, String, String, String, Move)>,
}

impl Dtm {
    pub fn from_json(text: &str) -> Result<Self> {
        let m: Dtm = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidMachine(m));
        let states: BTreeSet<&String> = self.states.iter().collect();
        let letters: BTreeSet<&String> = self.alphabet.iter().collect();
        if states.len() != self.states.len() || letters.len() != self.alphabet.len() {
            return bad("duplicate state or letter".into());
        }
        for s in self.states.iter().chain(&self.alphabet) {
            if !is_identifier(s) || s == MARK || s == CENTER {
                return bad(format!("`{s}` is not usable as a state or letter name"));
            }
        }
        if let Some(s) = states.iter().find(|s| letters.contains(**s)) {
            return bad(format!("`{s}` is both a state and a letter"));
        }
        if !letters.contains(&self.blank) {
            return bad("the blank is not in the alphabet".into());
        }
        if !states.contains(&self.init) || !states.contains(&self.halt) {
            return bad("initial or halting state is undeclared".into());
        }
        if self.init == self.halt {
            return bad("the initial state must differ from the halting state".into());
        }
        let mut seen = BTreeSet::new();
        for (q, a, p, c, _) in &self.delta {
            if !states.contains(q) || !states.contains(p) || !letters.contains(a) || !letters.contains(c) {
                return bad(format!("transition ({q},{a}) mentions undeclared names"));
            }
            if *q == self.halt {
                return bad("the halting state has no transitions".into());
            }
            if !seen.insert((q, a)) {
                return bad(format!("two transitions for ({q},{a})"));
            }
        }
        for q in self.states.iter().filter(|q| **q != self.halt) {
            for a in &self.alphabet {
                if !seen.contains(&(q, a)) {
                    return bad(format!("no transition for ({q},{a})"));
                }
            }
        }
        Ok(())
    }

    fn step_of(&self, q: &str, a: &str) -> Option<(&str, &str, Move)> {
        self.delta
            .iter()
            .find(|(q2, a2, ..)| q2 == q && a2 == a)
            .map(|(_, _, p, c, m)| (p.as_str(), c.as_str(), *m))
    }

    pub fn start(&self) -> Config {
        Config {
            left: Vec::new(),
            state: self.init.clone(),
            right: Vec::new(),
        }
    }

    /// One machine step, or `None` in the halting state.
    pub fn step(&self, cfg: &Config) -> Option<Config> {
        if cfg.state == self.halt {
            return None;
        }
        let mut next = cfg.clone();
        let read = next.right.pop().unwrap_or_else(|| self.blank.clone());
        let (p, c, m) = self.step_of(&cfg.state, &read).expect("validated machine is total");
        match m {
            Move::L => {
                let a = next.left.pop().unwrap_or_else(|| self.blank.clone());
                next.right.push(c.to_string());
                next.right.push(a);
            }
            Move::R => {
                if !(next.left.is_empty() && c == self.blank) {
                    next.left.push(c.to_string());
                }
            }
        }
        next.state = p.to_string();
        Some(next)
    }

    /// Runs from the empty tape; returns the number of steps to halt, if
    /// that happens within `max_steps`.
    pub fn halting_time(&self, max_steps: usize) -> Option<usize> {
        self.run(max_steps).iter().position(|c| c.state == self.halt)
    }

    /// Configurations of the first `max_steps` steps, starting with the initial one.
    pub fn run(&self, max_steps: usize) -> Vec<Config> {
        let mut out = vec![self.start()];
        while out.len() <= max_steps {
            match self.step(out.last().expect("nonempty")) {
                Some(c) => out.push(c),
                None => break,
            }
        }
        out
    }
}

/// Machine configuration laid out exactly as its encoding tree: `left` holds
/// `a₁…a_k`, `right` holds `b₁…b_l` with the scanned cell last.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Config {
    pub left: Vec<String>,
    pub state: String,
    pub right: Vec<String>,
}

impl Config {
    pub fn tree(&self) -> Tree {
        let mut left = vec![MARK.to_string()];
        left.extend(self.left.iter().cloned());
        let mut right = vec![MARK.to_string()];
        right.extend(self.right.iter().cloned());
        right.push(self.state.clone());
        Tree::node(ROOT, vec![Tree::chain(&left), Tree::chain(&right)])
    }
}

/// Rule label `add|del`, optional `bar`, letter, `bot|top`.
pub fn rule_label(add: bool, bar: bool, letter: &str, top: bool) -> String {
    format!(
        "{}{}_{letter}_{}",
        if add { "add" } else { "del" },
        if bar { "bar" } else { "" },
        if top { "top" } else { "bot" }
    )
}

fn barred(label: &str) -> String {
    let (op, rest) = label.split_at(3);
    format!("{op}bar{rest}")
}

/// Everything the reduction produces for one machine.
#[derive(Debug, Clone)]
pub struct TmGadget {
    pub machine: Dtm,
    pub gtrs: Gtrs,
    /// Star graph: center `v`, one leaf `w_σ` per unbarred label.
    pub star: Lts,
    pub constraint: SyncConstraint,
    pub phi_halt: Formula,
}

pub fn tm_to_gtrs(m: &Dtm) -> Result<TmGadget> {
    m.validate()?;
    let gamma = &m.alphabet;
    let flags = [false, true];
    let mut labels = BTreeSet::new();
    for a in gamma {
        for add in flags {
            for bar in flags {
                for top in flags {
                    labels.insert(rule_label(add, bar, a, top));
                }
            }
        }
    }

    let leaf = Tree::leaf;
    let mut rules = Vec::new();
    let mut push = |lhs: Tree, rhs: Option<Tree>, label: String| rules.push(Rule { lhs, rhs, label });
    for (q, b, p, c, mv) in &m.delta {
        let top = *p == m.halt;
        match mv {
            Move::L => {
                for a in gamma {
                    let label = rule_label(false, false, a, top);
                    push(Tree::chain(&[b, q]), Some(Tree::chain(&[c, a, p])), label.clone());
                    if *b == m.blank {
                        push(Tree::chain(&[MARK, q]), Some(Tree::chain(&[MARK, c, a, p])), label);
                    }
                }
            }
            Move::R => {
                let label = rule_label(true, false, c, top);
                for a in gamma.iter().map(String::as_str).chain([MARK]) {
                    push(Tree::chain(&[a, b, q]), Some(Tree::chain(&[a, p])), label.clone());
                }
                if *b == m.blank {
                    push(Tree::chain(&[MARK, q]), Some(Tree::chain(&[MARK, p])), label);
                }
            }
        }
    }
    for top in flags {
        push(leaf(MARK), Some(leaf(MARK)), rule_label(false, true, &m.blank, top));
        for a in gamma {
            push(leaf(a), None, rule_label(false, true, a, top));
            for c in gamma {
                push(leaf(a), Some(Tree::chain(&[a, c])), rule_label(true, true, c, top));
            }
            let grown = if *a == m.blank { leaf(MARK) } else { Tree::chain(&[MARK, a]) };
            push(leaf(MARK), Some(grown), rule_label(true, true, a, top));
        }
    }

    let mut ranked = BTreeMap::new();
    ranked.insert(ROOT.to_string(), Arity::One(2));
    for a in gamma.iter().map(String::as_str).chain([MARK]) {
        ranked.insert(a.to_string(), Arity::Many(BTreeSet::from([0, 1])));
    }
    for q in &m.states {
        ranked.insert(q.clone(), Arity::One(0));
    }
    let gtrs = Gtrs {
        ranked_alphabet: ranked,
        labels: labels.clone(),
        rules,
        init: m.start().tree(),
    };
    gtrs.validate()?;

    let mut star = Lts::new(LabelAlphabet::new(Vec::<String>::new(), labels.iter().cloned())?);
    let center = star.add_vertex(CENTER);
    for sigma in labels.iter().filter(|l| !l[3..].starts_with("bar")) {
        let w = star.add_vertex(format!("w_{sigma}"));
        star.add_edge(sigma, center, w)?;
        star.add_edge(&barred(sigma), w, center)?;
    }
    let constraint = SyncConstraint::new(labels.iter().map(|l| SyncTuple::new([l.as_str(), l.as_str()])).collect());
    let phi_halt = halting_sentence(&constraint, gamma);
    Ok(TmGadget {
        machine: m.clone(),
        gtrs,
        star,
        constraint,
        phi_halt,
    })
}

/// `∃x∃y[∀z ⋀ ¬E_σ zx ∧ ∃z(Reach_Σ(x,z) ∧ ⋁ E_σ̄⊤ zy)]` over tuple labels.
fn halting_sentence(constraint: &SyncConstraint, gamma: &[String]) -> Formula {
    let all: BTreeSet<String> = constraint.tuples.iter().map(SyncTuple::label).collect();
    let no_pred = Formula::forall(
        "z",
        Formula::and_all(all.iter().map(|l| Formula::not(Formula::edge_vars(l.clone(), "z", "x")))),
    );
    let halting_steps = gamma.iter().flat_map(|a| {
        [true, false].map(|add| {
            let l = rule_label(add, true, a, true);
            Formula::edge_vars(render_tuple(&[&l, &l]), "z", "y")
        })
    });
    let reaches = Formula::exists(
        "z",
        Formula::and(Formula::reach_vars(all.iter().cloned(), "x", "z"), Formula::or_all(halting_steps)),
    );
    Formula::exists_all(["x", "y"], Formula::and(no_pred, reaches))
}

impl TmGadget {
    fn star_state(&self, name: &str) -> VertexId {
        self.star.vertex_id(name).expect("star vertex")
    }

    /// The part of the synchronized product reachable from `(t₀, v)` in at
    /// most `depth` steps. Vertices are named `(tree,hvertex)`.
    pub fn bounded_product(&self, depth: usize, caps: &Caps) -> Result<Lts> {
        let tuple_labels: Vec<String> = self.constraint.tuples.iter().map(SyncTuple::label).collect();
        let mut out = Lts::new(LabelAlphabet::new(Vec::<String>::new(), tuple_labels)?);
        let root = (self.gtrs.init.clone(), self.star_state(CENTER));
        let name = |t: &Tree, h: VertexId| render_tuple(&[t.to_string().as_str(), self.star.vertex_name(h)]);
        let mut ids: HashMap<(Tree, VertexId), VertexId> = HashMap::new();
        ids.insert(root.clone(), out.add_vertex(name(&root.0, root.1)));
        let mut queue = VecDeque::from([(root, 0usize)]);
        while let Some(((t, h), d)) = queue.pop_front() {
            if d == depth {
                continue;
            }
            let from = ids[&(t.clone(), h)];
            for sigma in &self.gtrs.labels {
                let targets: Vec<VertexId> = self
                    .star
                    .edges(sigma)
                    .filter(|&(a, _)| a == h)
                    .map(|(_, b)| b)
                    .collect();
                if targets.is_empty() {
                    continue;
                }
                for s in self.gtrs.successors_with(&t, sigma) {
                    for &h2 in &targets {
                        let key = (s.clone(), h2);
                        let to = match ids.get(&key) {
                            Some(&id) => id,
                            None => {
                                check_cap("expansion", ids.len() as u128 + 1, caps.expansion as u128)?;
                                let id = out.add_vertex(name(&s, h2));
                                ids.insert(key.clone(), id);
                                queue.push_back((key, d + 1));
                                id
                            }
                        };
                        out.add_edge(&render_tuple(&[sigma, sigma]), from, to)?;
                    }
                }
            }
        }
        Ok(out)
    }

    /// Explicit truncation: the GTRS graph to `depth` rewrites next to the
    /// star graph. Its full product also contains unreachable pairs, so the
    /// halting sentence belongs on [`TmGadget::bounded_product`] instead.
    pub fn bounded_spec(&self, depth: usize, caps: &Caps) -> Result<ProductSpec> {
        let alphabet = LabelAlphabet::new(Vec::<String>::new(), self.gtrs.labels.iter().cloned())?;
        let g = gtrs_expand_with(&self.gtrs, depth, alphabet, caps)?;
        ProductSpec::new(vec![g, self.star.clone()], self.constraint.clone())
    }

    /// The tree side is infinite, so every tuple has infinitely many classes.
    pub fn declared_sync(&self) -> DeclaredSync {
        DeclaredSync {
            constraint: self.constraint.clone(),
            enabled: self
                .constraint
                .tuples
                .iter()
                .map(|_| BTreeMap::from([(0, ClassCount::Infinite), (1, ClassCount::Finite(1))]))
                .collect(),
        }
    }

    /// Product vertex of machine configuration `cfg` at the star center.
    pub fn config_vertex(&self, cfg: &Config) -> String {
        render_tuple(&[cfg.tree().to_string().as_str(), CENTER])
    }
}

/// Checks the halting sentence on the bounded product of depth `depth`.
pub fn halts_within(g: &TmGadget, depth: usize, caps: &Caps) -> Result<bool> {
    let product = g.bounded_product(depth, caps)?;
    crate::eval::holds(&product, &g.phi_halt, caps)
}
