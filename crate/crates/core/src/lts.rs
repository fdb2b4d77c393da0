//! Labeled transition systems, synchronization constraints and synchronized
//! products.
//!
//! A [`ProductSpec`] is a family of components together with a
//! [`SyncConstraint`]. Local labels move exactly one component; a constraint
//! tuple moves every component whose entry is not [`EPS`] simultaneously and
//! keeps the others fixed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};

/// Reserved entry of a constraint tuple: "this component does not move".
pub const EPS: &str = "eps";

/// Dense vertex identifier inside one [`Lts`].
pub type VertexId = u32;

/// Returns true for identifiers matching `[A-Za-z0-9_]+`.
pub fn is_identifier(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// Returns true for product-level tuple labels such as `(a,eps,b)`.
pub fn is_tuple_label(s: &str) -> bool {
    match s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        Some(inner) => inner.split(',').all(is_identifier),
        None => false,
    }
}

/// Renders a tuple of names as `(a,b,c)`.
pub fn render_tuple<S: AsRef<str>>(items: &[S]) -> String {
    let mut out = String::from("(");
    for (i, s) in items.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(s.as_ref());
    }
    out.push(')');
    out
}

/// Splits `(a,(b,c),d)` into its top-level entries `a`, `(b,c)`, `d`.
///
/// Returns `None` when the text is not a parenthesized tuple.
pub fn split_tuple(s: &str) -> Option<Vec<&str>> {
    let inner = s.strip_prefix('(')?.strip_suffix(')')?;
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in inner.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth < 0 {
                    return None;
                }
            }
            ',' if depth == 0 => {
                parts.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if depth != 0 {
        return None;
    }
    parts.push(&inner[start..]);
    Some(parts)
}

/// Partition of one component's labels into local and synchronizing labels.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LabelAlphabet {
    pub local: BTreeSet<String>,
    pub sync: BTreeSet<String>,
}

impl LabelAlphabet {
    pub fn new<I, J, S, T>(local: I, sync: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let alphabet = LabelAlphabet {
            local: local.into_iter().map(Into::into).collect(),
            sync: sync.into_iter().map(Into::into).collect(),
        };
        alphabet.validate()?;
        Ok(alphabet)
    }

    /// Alphabet with only local labels.
    pub fn local_only<I, S>(local: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self::new(local, std::iter::empty::<String>())
    }

    fn validate(&self) -> Result<()> {
        for l in self.local.iter().chain(&self.sync) {
            if l == EPS {
                return Err(Error::InvalidSystem("`eps` is reserved".into()));
            }
            if !is_identifier(l) && !is_tuple_label(l) {
                return Err(Error::InvalidSystem(format!("malformed label `{l}`")));
            }
        }
        if let Some(l) = self.local.intersection(&self.sync).next() {
            return Err(Error::InvalidSystem(format!(
                "label `{l}` is both local and synchronizing"
            )));
        }
        Ok(())
    }

    pub fn contains(&self, label: &str) -> bool {
        self.local.contains(label) || self.sync.contains(label)
    }

    pub fn labels(&self) -> impl Iterator<Item = &String> {
        self.local.iter().chain(self.sync.iter())
    }
}

/// A finite labeled directed graph `G = (V, (E_a))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lts {
    names: Vec<String>,
    index: HashMap<String, VertexId>,
    edges: BTreeMap<String, BTreeSet<(VertexId, VertexId)>>,
    alphabet: LabelAlphabet,
}

impl Lts {
    pub fn new(alphabet: LabelAlphabet) -> Self {
        Lts {
            names: Vec::new(),
            index: HashMap::new(),
            edges: BTreeMap::new(),
            alphabet,
        }
    }

    /// Adds a vertex (idempotent) and returns its id.
    pub fn add_vertex(&mut self, name: impl Into<String>) -> VertexId {
        let name = name.into();
        if let Some(&id) = self.index.get(&name) {
            return id;
        }
        let id = self.names.len() as VertexId;
        self.index.insert(name.clone(), id);
        self.names.push(name);
        id
    }

    /// Adds an edge between two existing vertices.
    pub fn add_edge(&mut self, label: &str, from: VertexId, to: VertexId) -> Result<()> {
        if !self.alphabet.contains(label) {
            return Err(Error::UnknownLabel(label.to_string()));
        }
        let n = self.names.len() as VertexId;
        if from >= n || to >= n {
            return Err(Error::InvalidSystem(format!(
                "edge endpoint out of range for label `{label}`"
            )));
        }
        self.edges
            .entry(label.to_string())
            .or_default()
            .insert((from, to));
        Ok(())
    }

    /// Adds an edge by vertex names, creating the vertices when missing.
    pub fn add_named_edge(&mut self, label: &str, from: &str, to: &str) -> Result<()> {
        let f = self.add_vertex(from);
        let t = self.add_vertex(to);
        self.add_edge(label, f, t)
    }

    pub fn alphabet(&self) -> &LabelAlphabet {
        &self.alphabet
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn vertex_name(&self, id: VertexId) -> &str {
        &self.names[id as usize]
    }

    pub fn vertex_names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.index.get(name).copied()
    }

    /// Edge set of a label; empty for labels of the alphabet without edges.
    pub fn edges(&self, label: &str) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.edges.get(label).into_iter().flatten().copied()
    }

    pub fn edge_set(&self, label: &str) -> Option<&BTreeSet<(VertexId, VertexId)>> {
        self.edges.get(label)
    }

    pub fn has_edge(&self, label: &str, from: VertexId, to: VertexId) -> bool {
        self.edges
            .get(label)
            .is_some_and(|s| s.contains(&(from, to)))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.values().map(BTreeSet::len).sum()
    }

    /// Labels carrying at least one edge.
    pub fn used_labels(&self) -> impl Iterator<Item = &String> {
        self.edges.keys()
    }
}

/// One constraint tuple `c̄`, entry `i` drawn from `Σᵢˢ ∪ {eps}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SyncTuple(pub Vec<String>);

impl SyncTuple {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SyncTuple(entries.into_iter().map(Into::into).collect())
    }

    /// Components that move when the tuple fires (`X_c̄`, zero-based).
    pub fn sync_components(&self) -> BTreeSet<usize> {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, l)| l.as_str() != EPS)
            .map(|(i, _)| i)
            .collect()
    }

    /// Entry of component `i`, `None` for `eps`.
    pub fn entry(&self, i: usize) -> Option<&str> {
        self.0.get(i).map(String::as_str).filter(|l| *l != EPS)
    }

    /// Product-level label, e.g. `(a,eps)`.
    pub fn label(&self) -> String {
        render_tuple(&self.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for SyncTuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// `X_{c̄}`: components whose entry is not `eps`.
pub fn sync_components(tuple: &SyncTuple) -> BTreeSet<usize> {
    tuple.sync_components()
}

/// A synchronization constraint `C`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SyncConstraint {
    pub tuples: Vec<SyncTuple>,
}

impl SyncConstraint {
    pub fn new(tuples: Vec<SyncTuple>) -> Self {
        let mut tuples = tuples;
        tuples.sort();
        tuples.dedup();
        SyncConstraint { tuples }
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    /// Looks up a tuple by its product label.
    pub fn find(&self, label: &str) -> Option<usize> {
        self.tuples.iter().position(|t| t.label() == label)
    }

    /// `X_{C'}` for a set of tuple indices.
    pub fn sync_components_of(&self, subset: &[usize]) -> BTreeSet<usize> {
        subset
            .iter()
            .flat_map(|&t| self.tuples[t].sync_components())
            .collect()
    }
}

/// A family of components plus the constraint defining their product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductSpec {
    components: Vec<Lts>,
    constraint: SyncConstraint,
}

impl ProductSpec {
    pub fn new(components: Vec<Lts>, constraint: SyncConstraint) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidSystem("a product needs at least one component".into()));
        }
        let n = components.len();
        let mut seen_local: BTreeMap<&str, usize> = BTreeMap::new();
        for (i, c) in components.iter().enumerate() {
            c.alphabet().validate()?;
            for l in &c.alphabet().local {
                if let Some(j) = seen_local.insert(l, i) {
                    return Err(Error::InvalidSystem(format!(
                        "local label `{l}` shared by components {} and {}",
                        j + 1,
                        i + 1
                    )));
                }
            }
        }
        for t in &constraint.tuples {
            if t.len() != n {
                return Err(Error::InvalidSystem(format!(
                    "constraint tuple {t} has {} entries, expected {n}",
                    t.len()
                )));
            }
            if t.sync_components().is_empty() {
                return Err(Error::InvalidSystem(format!(
                    "constraint tuple {t} is all-eps"
                )));
            }
            for (i, e) in t.0.iter().enumerate() {
                if e != EPS && !components[i].alphabet().sync.contains(e) {
                    return Err(Error::InvalidSystem(format!(
                        "entry `{e}` of {t} is not a synchronizing label of component {}",
                        i + 1
                    )));
                }
            }
        }
        Ok(ProductSpec {
            components,
            constraint,
        })
    }

    pub fn components(&self) -> &[Lts] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Lts {
        &self.components[i]
    }

    pub fn constraint(&self) -> &SyncConstraint {
        &self.constraint
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Component owning a local label.
    pub fn local_owner(&self, label: &str) -> Option<usize> {
        self.components
            .iter()
            .position(|c| c.alphabet().local.contains(label))
    }

    /// All local labels `Σˡ`.
    pub fn local_labels(&self) -> BTreeSet<String> {
        self.components
            .iter()
            .flat_map(|c| c.alphabet().local.iter().cloned())
            .collect()
    }

    /// Product label set `Σ = Σˡ ∪ C`.
    pub fn product_alphabet(&self) -> LabelAlphabet {
        LabelAlphabet {
            local: self.local_labels(),
            sync: self.constraint.tuples.iter().map(SyncTuple::label).collect(),
        }
    }

    /// Number of product vertices, saturating.
    pub fn vertex_count(&self) -> u128 {
        self.components
            .iter()
            .map(|c| c.vertex_count() as u128)
            .product()
    }

    fn strides(&self) -> Vec<u64> {
        let mut strides = vec![1u64; self.components.len()];
        for i in (0..self.components.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.components[i + 1].vertex_count() as u64;
        }
        strides
    }

    /// Product vertex id of a tuple of component vertex ids.
    pub fn encode(&self, tuple: &[VertexId]) -> VertexId {
        let strides = self.strides();
        tuple
            .iter()
            .zip(&strides)
            .map(|(&v, &s)| v as u64 * s)
            .sum::<u64>() as VertexId
    }

    /// Component vertex ids of a product vertex id.
    pub fn decode(&self, id: VertexId) -> Vec<VertexId> {
        let mut rest = id as u64;
        self.strides()
            .iter()
            .map(|&s| {
                let v = rest / s;
                rest %= s;
                v as VertexId
            })
            .collect()
    }

    /// Canonical product vertex name `(v1,...,vn)`.
    pub fn tuple_name(&self, tuple: &[VertexId]) -> String {
        let names: Vec<&str> = tuple
            .iter()
            .enumerate()
            .map(|(i, &v)| self.components[i].vertex_name(v))
            .collect();
        render_tuple(&names)
    }

    /// Component states from which component `i` can perform label `l`.
    pub fn enabled_states(&self, i: usize, label: &str) -> BTreeSet<VertexId> {
        self.components[i].edges(label).map(|(s, _)| s).collect()
    }

    /// Per-component admissible states of `V_{C'}`; `None` entries are unconstrained.
    fn enabled_box(&self, subset: &[usize]) -> Vec<Option<BTreeSet<VertexId>>> {
        let mut boxed: Vec<Option<BTreeSet<VertexId>>> = vec![None; self.len()];
        for &t in subset {
            let tuple = &self.constraint.tuples[t];
            for i in tuple.sync_components() {
                let here = self.enabled_states(i, tuple.entry(i).expect("non-eps entry"));
                boxed[i] = Some(match boxed[i].take() {
                    Some(prev) => prev.intersection(&here).copied().collect(),
                    None => here,
                });
            }
        }
        boxed
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::InvalidSystem("subset of constraint tuples must be nonempty".into()));
        }
        if let Some(&t) = subset.iter().find(|&&t| t >= self.constraint.len()) {
            return Err(Error::InvalidSystem(format!("no constraint tuple #{t}")));
        }
        Ok(())
    }
}

/// Materializes the synchronized product as an explicit [`Lts`].
///
/// Vertex ids of the result agree with [`ProductSpec::encode`].
pub fn build_product(spec: &ProductSpec, caps: &Caps) -> Result<Lts> {
    check_cap(
        "product_vertices",
        spec.vertex_count(),
        caps.product_vertices as u128,
    )?;
    let mut product = Lts::new(spec.product_alphabet());
    let total = spec.vertex_count() as u64;
    for id in 0..total {
        let tuple = spec.decode(id as VertexId);
        product.add_vertex(spec.tuple_name(&tuple));
    }
    let strides = spec.strides();
    let n = spec.len();

    for (i, comp) in spec.components().iter().enumerate() {
        for label in &comp.alphabet().local {
            let Some(edges) = comp.edge_set(label) else {
                continue;
            };
            let set = product.edges.entry(label.clone()).or_default();
            for id in 0..total {
                let tuple = spec.decode(id as VertexId);
                for &(from, to) in edges.range((tuple[i], 0)..=(tuple[i], VertexId::MAX)) {
                    debug_assert_eq!(from, tuple[i]);
                    let target = id as i64 + (to as i64 - from as i64) * strides[i] as i64;
                    set.insert((id as VertexId, target as VertexId));
                }
            }
        }
    }

    for tuple in &spec.constraint().tuples {
        // Per-component moves: the c_i edges, or the identity for eps.
        let moves: Vec<Vec<(VertexId, VertexId)>> = (0..n)
            .map(|i| match tuple.entry(i) {
                Some(l) => spec.component(i).edges(l).collect(),
                None => (0..spec.component(i).vertex_count() as VertexId)
                    .map(|v| (v, v))
                    .collect(),
            })
            .collect();
        let count: u128 = moves.iter().map(|m| m.len() as u128).product();
        check_cap("tuples", count, caps.tuples as u128)?;
        let set = product.edges.entry(tuple.label()).or_default();
        let mut choice = vec![0usize; n];
        if moves.iter().any(Vec::is_empty) {
            continue;
        }
        'outer: loop {
            let mut from = 0u64;
            let mut to = 0u64;
            for i in 0..n {
                let (f, t) = moves[i][choice[i]];
                from += f as u64 * strides[i];
                to += t as u64 * strides[i];
            }
            set.insert((from as VertexId, to as VertexId));
            let mut k = n;
            loop {
                if k == 0 {
                    break 'outer;
                }
                k -= 1;
                choice[k] += 1;
                if choice[k] < moves[k].len() {
                    continue 'outer;
                }
                choice[k] = 0;
            }
        }
    }
    Ok(product)
}

/// `V_{C'}`: product vertices with an outgoing `c̄`-edge for every `c̄ ∈ C'`.
///
/// `subset` holds indices into the constraint's tuple list.
pub fn enabled_vertices(spec: &ProductSpec, subset: &[usize], caps: &Caps) -> Result<BTreeSet<VertexId>> {
    spec.check_subset(subset)?;
    check_cap(
        "product_vertices",
        spec.vertex_count(),
        caps.product_vertices as u128,
    )?;
    let boxed = spec.enabled_box(subset);
    if boxed.iter().any(|b| b.as_ref().is_some_and(BTreeSet::is_empty)) {
        return Ok(BTreeSet::new());
    }
    let axes: Vec<Vec<VertexId>> = boxed
        .iter()
        .enumerate()
        .map(|(i, b)| match b {
            Some(set) => set.iter().copied().collect(),
            None => (0..spec.component(i).vertex_count() as VertexId).collect(),
        })
        .collect();
    Ok(cartesian(&axes)
        .into_iter()
        .map(|t| spec.encode(&t))
        .collect())
}

/// All tuples of the Cartesian product of `axes`, in lexicographic order.
pub(crate) fn cartesian(axes: &[Vec<VertexId>]) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &v in axis {
                let mut t = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Partition of `V_{C'}` into `~_{C'}`-classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncClassIndex {
    /// Tuple indices forming `C'`.
    pub subset: Vec<usize>,
    /// `X_{C'}`, zero-based component indices.
    pub sync_components: BTreeSet<usize>,
    pub enabled_vertices: BTreeSet<VertexId>,
    /// Classes keyed by the projection `u[X_{C'}]` (component order).
    pub classes: BTreeMap<Vec<VertexId>, BTreeSet<VertexId>>,
}

impl SyncClassIndex {
    /// `ind(~_{C'})`.
    pub fn index(&self) -> usize {
        self.classes.len()
    }
}

/// Computes the `~_{C'}` classes of `V_{C'}`.
pub fn sim_classes(spec: &ProductSpec, subset: &[usize], caps: &Caps) -> Result<SyncClassIndex> {
    let enabled = enabled_vertices(spec, subset, caps)?;
    let mut subset_sorted = subset.to_vec();
    subset_sorted.sort_unstable();
    subset_sorted.dedup();
    let xs = spec.constraint().sync_components_of(&subset_sorted);
    let mut classes: BTreeMap<Vec<VertexId>, BTreeSet<VertexId>> = BTreeMap::new();
    for &v in &enabled {
        let tuple = spec.decode(v);
        let key = xs.iter().map(|&i| tuple[i]).collect();
        classes.entry(key).or_default().insert(v);
    }
    Ok(SyncClassIndex {
        subset: subset_sorted,
        sync_components: xs,
        enabled_vertices: enabled,
        classes,
    })
}

/// `ind(~_{C'})` computed from the component data alone, without
/// enumerating product vertices.
pub fn class_index(spec: &ProductSpec, subset: &[usize]) -> Result<usize> {
    spec.check_subset(subset)?;
    let boxed = spec.enabled_box(subset);
    Ok(boxed
        .iter()
        .flatten()
        .map(BTreeSet::len)
        .product())
}

/// Finiteness of `ind(~_c̄)` on the tuple-enabled vertices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassCount {
    Finite(usize),
    Infinite,
}

/// Result of [`is_finitely_synchronized`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncReport {
    pub finitely_synchronized: bool,
    /// One entry per constraint tuple: its label and `ind(~_c̄)`.
    pub per_tuple: Vec<(String, ClassCount)>,
}

/// Explicit finite components are always finitely synchronized; the report
/// carries the computed per-tuple indices.
pub fn is_finitely_synchronized(spec: &ProductSpec) -> SyncReport {
    let per_tuple: Vec<(String, ClassCount)> = spec
        .constraint()
        .tuples
        .iter()
        .enumerate()
        .map(|(t, tuple)| {
            let k = class_index(spec, &[t]).expect("valid tuple index");
            (tuple.label(), ClassCount::Finite(k))
        })
        .collect();
    SyncReport {
        finitely_synchronized: true,
        per_tuple,
    }
}

/// Synchronization data for products whose components are only described
/// by a generator (possibly infinite).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclaredSync {
    pub constraint: SyncConstraint,
    /// Per tuple, per component in `X_c̄`: how many component states enable
    /// the tuple's letter.
    pub enabled: Vec<BTreeMap<usize, ClassCount>>,
}

impl DeclaredSync {
    pub fn report(&self) -> SyncReport {
        let per_tuple: Vec<(String, ClassCount)> = self
            .constraint
            .tuples
            .iter()
            .zip(&self.enabled)
            .map(|(t, counts)| {
                let count = counts.values().try_fold(1usize, |acc, c| match c {
                    ClassCount::Finite(k) => Some(acc * k),
                    ClassCount::Infinite => None,
                });
                (
                    t.label(),
                    count.map_or(ClassCount::Infinite, ClassCount::Finite),
                )
            })
            .collect();
        SyncReport {
            finitely_synchronized: per_tuple
                .iter()
                .all(|(_, c)| matches!(c, ClassCount::Finite(_))),
            per_tuple,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_edge(v: &str, w: &str, label: &str, sync: bool) -> Lts {
        let alphabet = if sync {
            LabelAlphabet::new(Vec::<String>::new(), [label]).unwrap()
        } else {
            LabelAlphabet::local_only([label]).unwrap()
        };
        let mut g = Lts::new(alphabet);
        g.add_named_edge(label, v, w).unwrap();
        g
    }

    fn cycle(n: usize, label: &str) -> Lts {
        let mut g = Lts::new(LabelAlphabet::local_only([label]).unwrap());
        for i in 0..n {
            g.add_named_edge(label, &format!("{label}{i}"), &format!("{label}{}", (i + 1) % n))
                .unwrap();
        }
        g
    }

    #[test]
    fn sync_components_examples() {
        assert_eq!(SyncTuple::new(["a", "eps"]).sync_components(), BTreeSet::from([0]));
        assert_eq!(SyncTuple::new(["eps", "b"]).sync_components(), BTreeSet::from([1]));
        assert_eq!(SyncTuple::new(["a", "b"]).sync_components(), BTreeSet::from([0, 1]));
    }

    #[test]
    fn asynchronous_two_by_two() {
        let spec = ProductSpec::new(
            vec![single_edge("p", "p'", "a", false), single_edge("q", "q'", "b", false)],
            SyncConstraint::default(),
        );
        // `p'` is not an identifier but vertex names are opaque.
        let spec = spec.unwrap();
        let g = build_product(&spec, &Caps::default()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_set("a").unwrap().len(), 2);
        assert_eq!(g.edge_set("b").unwrap().len(), 2);
        let pq = g.vertex_id("(p,q)").unwrap();
        let p2q = g.vertex_id("(p',q)").unwrap();
        assert!(g.has_edge("a", pq, p2q));
    }

    #[test]
    fn fully_synchronized_single_edge() {
        let spec = ProductSpec::new(
            vec![single_edge("p", "p'", "a", true), single_edge("q", "q'", "b", true)],
            SyncConstraint::new(vec![SyncTuple::new(["a", "b"])]),
        )
        .unwrap();
        let g = build_product(&spec, &Caps::default()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 1);
        let from = g.vertex_id("(p,q)").unwrap();
        let to = g.vertex_id("(p',q')").unwrap();
        assert!(g.has_edge("(a,b)", from, to));

        let enabled = enabled_vertices(&spec, &[0], &Caps::default()).unwrap();
        assert_eq!(enabled, BTreeSet::from([from]));
        let classes = sim_classes(&spec, &[0], &Caps::default()).unwrap();
        assert_eq!(classes.index(), 1);
    }

    #[test]
    fn cycle_product_counts() {
        let spec = ProductSpec::new(vec![cycle(3, "a"), cycle(2, "b")], SyncConstraint::default())
            .unwrap();
        let g = build_product(&spec, &Caps::default()).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn classes_keyed_by_first_coordinate() {
        let mut g1 = Lts::new(LabelAlphabet::new(Vec::<String>::new(), ["a"]).unwrap());
        g1.add_named_edge("a", "p", "p").unwrap();
        g1.add_named_edge("a", "p'", "p'").unwrap();
        let mut g2 = Lts::new(LabelAlphabet::local_only(["l"]).unwrap());
        for v in ["r0", "r1", "r2"] {
            g2.add_vertex(v);
        }
        let spec = ProductSpec::new(
            vec![g1, g2],
            SyncConstraint::new(vec![SyncTuple::new(["a", "eps"])]),
        )
        .unwrap();
        let idx = sim_classes(&spec, &[0], &Caps::default()).unwrap();
        assert_eq!(idx.index(), 2);
        assert_eq!(idx.enabled_vertices.len(), 6);
        assert_eq!(class_index(&spec, &[0]).unwrap(), 2);
    }

    #[test]
    fn unrealizable_tuple_has_no_enabled_vertices() {
        let mut g1 = Lts::new(LabelAlphabet::new(Vec::<String>::new(), ["a"]).unwrap());
        g1.add_vertex("p");
        let g2 = single_edge("q", "q'", "b", true);
        let spec = ProductSpec::new(
            vec![g1, g2],
            SyncConstraint::new(vec![SyncTuple::new(["a", "b"])]),
        )
        .unwrap();
        assert!(enabled_vertices(&spec, &[0], &Caps::default()).unwrap().is_empty());
        assert_eq!(class_index(&spec, &[0]).unwrap(), 0);
    }

    #[test]
    fn rejects_bad_specs() {
        let a = single_edge("p", "q", "a", true);
        let b = single_edge("p", "q", "b", true);
        let all_eps = ProductSpec::new(
            vec![a.clone(), b.clone()],
            SyncConstraint::new(vec![SyncTuple::new(["eps", "eps"])]),
        );
        assert!(matches!(all_eps, Err(Error::InvalidSystem(_))));
        let short = ProductSpec::new(
            vec![a.clone(), b.clone()],
            SyncConstraint::new(vec![SyncTuple::new(["a"])]),
        );
        assert!(short.is_err());
        let shared = ProductSpec::new(
            vec![single_edge("p", "q", "l", false), single_edge("p", "q", "l", false)],
            SyncConstraint::default(),
        );
        assert!(shared.is_err());
        assert!(LabelAlphabet::new(["eps"], Vec::<String>::new()).is_err());
        assert!(LabelAlphabet::new(["a"], ["a"]).is_err());
    }

    #[test]
    fn product_cap_is_enforced() {
        let spec = ProductSpec::new(vec![cycle(30, "a"), cycle(30, "b")], SyncConstraint::default())
            .unwrap();
        let caps = Caps {
            product_vertices: 100,
            ..Caps::default()
        };
        assert!(matches!(
            build_product(&spec, &caps),
            Err(Error::Resource { cap: "product_vertices", .. })
        ));
    }

    #[test]
    fn split_tuple_nested() {
        assert_eq!(split_tuple("(a,(b,c),d)").unwrap(), vec!["a", "(b,c)", "d"]);
        assert_eq!(split_tuple("x"), None);
    }

    #[test]
    fn declared_semifinite_report() {
        let decl = DeclaredSync {
            constraint: SyncConstraint::new(vec![SyncTuple::new(["s", "s"])]),
            enabled: vec![BTreeMap::from([
                (0, ClassCount::Infinite),
                (1, ClassCount::Finite(1)),
            ])],
        };
        assert!(!decl.report().finitely_synchronized);
    }
}
