//! Ground tree rewriting systems and their bounded expansion.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::lts::{LabelAlphabet, Lts, VertexId};

/// A finite ordered tree.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub symbol: String,
    pub children: Vec<Tree>,
}

impl Tree {
    pub fn leaf(symbol: impl Into<String>) -> Self {
        Tree {
            symbol: symbol.into(),
            children: Vec::new(),
        }
    }

    pub fn node(symbol: impl Into<String>, children: Vec<Tree>) -> Self {
        Tree {
            symbol: symbol.into(),
            children,
        }
    }

    /// `s₁(s₂(…(sₙ)))`, or `sₙ` alone for one symbol.
    pub fn chain<S: AsRef<str>>(symbols: &[S]) -> Self {
        let (last, rest) = symbols.split_last().expect("nonempty chain");
        rest.iter()
            .rev()
            .fold(Tree::leaf(last.as_ref()), |acc, s| Tree::node(s.as_ref(), vec![acc]))
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Tree::size).sum::<usize>()
    }

    fn check_ranks(&self, ranks: &BTreeMap<String, Arity>) -> Result<()> {
        match ranks.get(&self.symbol) {
            Some(a) if a.allows(self.children.len()) => {}
            Some(_) => {
                return Err(Error::InvalidMachine(format!(
                    "`{}` does not take {} children",
                    self.symbol,
                    self.children.len()
                )))
            }
            None => return Err(Error::InvalidMachine(format!("unknown symbol `{}`", self.symbol))),
        }
        self.children.iter().try_for_each(|c| c.check_ranks(ranks))
    }

    fn well_ranked(&self, ranks: &BTreeMap<String, Arity>) -> bool {
        self.check_ranks(ranks).is_ok()
    }
}

/// Parenthesized preorder, e.g. `•(X, X(q0))`.
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)?;
        if !self.children.is_empty() {
            f.write_str("(")?;
            for (i, c) in self.children.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{c}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Trees in JSON are nested arrays `[symbol, child, …]`; a bare string is a leaf.
impl Serialize for Tree {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.children.is_empty() {
            return s.serialize_str(&self.symbol);
        }
        let mut items: Vec<serde_json::Value> = vec![serde_json::Value::String(self.symbol.clone())];
        for c in &self.children {
            items.push(serde_json::to_value(c).map_err(serde::ser::Error::custom)?);
        }
        items.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Tree {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        tree_from_json(&v).map_err(serde::de::Error::custom)
    }
}

fn tree_from_json(v: &serde_json::Value) -> std::result::Result<Tree, String> {
    match v {
        serde_json::Value::String(s) => Ok(Tree::leaf(s.clone())),
        serde_json::Value::Array(items) => {
            let Some(serde_json::Value::String(sym)) = items.first() else {
                return Err("a tree array starts with its symbol".into());
            };
            let children = items[1..].iter().map(tree_from_json).collect::<std::result::Result<_, _>>()?;
            Ok(Tree::node(sym.clone(), children))
        }
        other => Err(format!("not a tree: {other}")),
    }
}

/// Permitted child counts of a symbol: one arity or several.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Arity {
    One(usize),
    Many(BTreeSet<usize>),
}

impl Arity {
    pub fn allows(&self, n: usize) -> bool {
        match self {
            Arity::One(k) => *k == n,
            Arity::Many(ks) => ks.contains(&n),
        }
    }
}

/// `t →ᵇ t′`; a missing right-hand side deletes the matched subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub lhs: Tree,
    pub rhs: Option<Tree>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gtrs {
    pub ranked_alphabet: BTreeMap<String, Arity>,
    pub labels: BTreeSet<String>,
    pub rules: Vec<Rule>,
    pub init: Tree,
}

impl Gtrs {
    pub fn validate(&self) -> Result<()> {
        self.init.check_ranks(&self.ranked_alphabet)?;
        for r in &self.rules {
            if !self.labels.contains(&r.label) {
                return Err(Error::InvalidMachine(format!("rule label `{}` is not declared", r.label)));
            }
            r.lhs.check_ranks(&self.ranked_alphabet)?;
            if let Some(t) = &r.rhs {
                t.check_ranks(&self.ranked_alphabet)?;
            }
        }
        LabelAlphabet::local_only(self.labels.iter().cloned())
            .map_err(|e| Error::InvalidMachine(e.to_string()))?;
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let g: Gtrs = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    /// All one-step successors `(label, tree)` of `t`, in rule order.
    pub fn successors(&self, t: &Tree) -> Vec<(String, Tree)> {
        let mut out = Vec::new();
        for r in &self.rules {
            for s in rewrite_all(t, &r.lhs, r.rhs.as_ref()) {
                if s.well_ranked(&self.ranked_alphabet) {
                    out.push((r.label.clone(), s));
                }
            }
        }
        out
    }

    /// Successors of `t` by rules carrying `label`.
    pub fn successors_with(&self, t: &Tree, label: &str) -> Vec<Tree> {
        let mut out = Vec::new();
        for r in self.rules.iter().filter(|r| r.label == label) {
            for s in rewrite_all(t, &r.lhs, r.rhs.as_ref()) {
                if s.well_ranked(&self.ranked_alphabet) {
                    out.push(s);
                }
            }
        }
        out
    }
}

/// Every tree obtained by replacing one occurrence of `lhs` in `t`.
fn rewrite_all(t: &Tree, lhs: &Tree, rhs: Option<&Tree>) -> Vec<Tree> {
    let mut out = Vec::new();
    if t == lhs {
        if let Some(r) = rhs {
            out.push(r.clone());
        }
    }
    for (i, c) in t.children.iter().enumerate() {
        if c == lhs && rhs.is_none() {
            let mut s = t.clone();
            s.children.remove(i);
            out.push(s);
            continue;
        }
        for replaced in rewrite_all(c, lhs, rhs) {
            let mut s = t.clone();
            s.children[i] = replaced;
            out.push(s);
        }
    }
    out
}

/// Breadth-first expansion from the initial tree, up to `depth` rewrite steps.
///
/// Vertices are named by the tree serialization; every label is local.
pub fn gtrs_expand(g: &Gtrs, depth: usize, caps: &Caps) -> Result<Lts> {
    gtrs_expand_with(g, depth, LabelAlphabet::local_only(g.labels.iter().cloned())?, caps)
}

/// [`gtrs_expand`] with a caller-chosen alphabet, e.g. to mark the rule
/// labels as synchronizing.
pub fn gtrs_expand_with(g: &Gtrs, depth: usize, alphabet: LabelAlphabet, caps: &Caps) -> Result<Lts> {
    g.validate()?;
    let mut lts = Lts::new(alphabet);
    let mut ids: HashMap<Tree, VertexId> = HashMap::new();
    let root = lts.add_vertex(g.init.to_string());
    ids.insert(g.init.clone(), root);
    let mut queue = VecDeque::from([(g.init.clone(), 0usize)]);
    while let Some((t, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        let from = ids[&t];
        for (label, s) in g.successors(&t) {
            let to = match ids.get(&s) {
                Some(&id) => id,
                None => {
                    check_cap("expansion", ids.len() as u128 + 1, caps.expansion as u128)?;
                    let id = lts.add_vertex(s.to_string());
                    ids.insert(s.clone(), id);
                    queue.push_back((s, d + 1));
                    id
                }
            };
            lts.add_edge(&label, from, to)?;
        }
    }
    Ok(lts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_rule() -> Gtrs {
        Gtrs {
            ranked_alphabet: BTreeMap::from([("a".into(), Arity::One(0)), ("c".into(), Arity::One(0))]),
            labels: BTreeSet::from(["b".into()]),
            rules: vec![Rule {
                lhs: Tree::leaf("a"),
                rhs: Some(Tree::leaf("c")),
                label: "b".into(),
            }],
            init: Tree::leaf("a"),
        }
    }

    #[test]
    fn expansion_depths() {
        let g = single_rule();
        let caps = Caps::default();
        let zero = gtrs_expand(&g, 0, &caps).unwrap();
        assert_eq!((zero.vertex_count(), zero.edge_count()), (1, 0));
        let one = gtrs_expand(&g, 1, &caps).unwrap();
        assert_eq!((one.vertex_count(), one.edge_count()), (2, 1));
        assert!(one.has_edge("b", 0, 1));
    }

    #[test]
    fn serialization_and_json() {
        let t = Tree::node("•", vec![Tree::chain(&["X", "a1", "a2"]), Tree::chain(&["X", "b1", "q"])]);
        assert_eq!(t.to_string(), "•(X(a1(a2)), X(b1(q)))");
        let json = serde_json::to_string(&t).unwrap();
        assert_eq!(json, r#"["•",["X",["a1","a2"]],["X",["b1","q"]]]"#);
        let back: Tree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn deletion_removes_a_child() {
        let t = Tree::chain(&["X", "a", "b"]);
        let out = rewrite_all(&t, &Tree::leaf("b"), None);
        assert_eq!(out, vec![Tree::chain(&["X", "a"])]);
    }

    #[test]
    fn caps_bound_expansion() {
        let g = Gtrs {
            ranked_alphabet: BTreeMap::from([("a".into(), Arity::Many(BTreeSet::from([0, 1])))]),
            labels: BTreeSet::from(["grow".into()]),
            rules: vec![Rule {
                lhs: Tree::leaf("a"),
                rhs: Some(Tree::chain(&["a", "a"])),
                label: "grow".into(),
            }],
            init: Tree::leaf("a"),
        };
        let caps = Caps {
            expansion: 5,
            ..Caps::default()
        };
        assert!(gtrs_expand(&g, 3, &caps).is_ok());
        assert!(matches!(gtrs_expand(&g, 10, &caps), Err(Error::Resource { .. })));
    }
}
