//! Compiling a formula about a synchronized product into formulas about
//! its components plus a Boolean combiner.
//!
//! [`compose`] returns sets `Ψᵢ` of component formulas and a Boolean formula
//! `α` over atoms `pᵢ(ψ)` such that the product satisfies the input at
//! `(v̄₁,…,v̄ₘ)` iff `α` is true when each `pᵢ(ψ)` is read as
//! "component `i` satisfies `ψ` at the `i`-th coordinates".

mod profile;
mod serial;
mod words;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use sha2::{Digest, Sha256};

pub use profile::{
    nonempty_subsets, profile_from_declared, profile_from_explicit, proper_subsets, SyncProfile,
    MAX_PROFILE_TUPLES,
};
pub use serial::ComposedJson;
pub use words::{bounded_words, representative_words};

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::eval::Evaluator;
use crate::logic::{
    canonical_text, classify, fresh_var, negate, normalize, BoolExpr, Family, Formula, PAtom, Term,
};
use crate::lts::{split_tuple, Lts, ProductSpec, SyncConstraint, VertexId};

/// Label structure of a product: local labels per component and the constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub local: Vec<BTreeSet<String>>,
    pub constraint: SyncConstraint,
}

impl Signature {
    pub fn of(spec: &ProductSpec) -> Self {
        Signature {
            local: spec
                .components()
                .iter()
                .map(|c| c.alphabet().local.clone())
                .collect(),
            constraint: spec.constraint().clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.local.len()
    }

    pub fn is_empty(&self) -> bool {
        self.local.is_empty()
    }
}

/// Bound on the number of hop points in the single-tuple reachability case.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SingletonBound {
    /// `m ≤ ind + 1`: enough for paths whose synchronized steps start in
    /// every class once.
    #[default]
    Sufficient,
    /// `m ≤ ind`, which misses paths using one synchronized step per class.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ComposeOptions {
    pub singleton_bound: SingletonBound,
    /// Treat single-tuple reachability like the multi-tuple case.
    pub singleton_as_words: bool,
    /// Never consult explicit components when eliminating quantifiers.
    ///
    /// By default a quantifier over explicit components is split along the
    /// combinations of atom values that actually occur in each component,
    /// which keeps `α` small.  The purely syntactic split can grow
    /// exponentially with the number of atoms.
    pub syntactic: bool,
}

/// `Ψ₁, …, Ψₙ` and `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComposedForm {
    /// Per component: formula id to formula.
    pub psi: Vec<BTreeMap<String, Formula>>,
    pub alpha: BoolExpr<PAtom>,
}

impl ComposedForm {
    pub fn atom_count(&self) -> usize {
        self.psi.iter().map(BTreeMap::len).sum()
    }

    /// The formula an atom refers to.
    pub fn formula(&self, atom: &PAtom) -> Option<&Formula> {
        self.psi.get(atom.component)?.get(&atom.id)
    }
}

/// Number of disjuncts generated per reachability label subset.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComposeStats {
    pub disjuncts: BTreeMap<Vec<usize>, usize>,
}

/// Deterministic id of a component formula: hash of its canonical text.
pub fn formula_id(f: &Formula) -> String {
    let digest = Sha256::digest(canonical_text(f).as_bytes());
    digest[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Compiles `f` for a product with explicit components.
///
/// Reachability over several constraint tuples uses the components to pick
/// one representative per distinct synchronization behaviour.
pub fn compose(f: &Formula, spec: &ProductSpec, profile: &SyncProfile, opts: ComposeOptions, caps: &Caps) -> Result<ComposedForm> {
    compose_with_stats(f, spec, profile, opts, caps).map(|(cf, _)| cf)
}

pub fn compose_with_stats(
    f: &Formula,
    spec: &ProductSpec,
    profile: &SyncProfile,
    opts: ComposeOptions,
    caps: &Caps,
) -> Result<(ComposedForm, ComposeStats)> {
    if let Some(i) = spec.components().iter().position(|c| c.vertex_count() == 0) {
        return Err(Error::InvalidSystem(format!("component {} has no vertices", i + 1)));
    }
    let sig = Signature::of(spec);
    Composer::new(&sig, profile, Some(spec), opts, caps).run(f)
}

/// Compiles `f` from the signature and a declared profile only.
pub fn compose_declared(
    f: &Formula,
    sig: &Signature,
    profile: &SyncProfile,
    opts: ComposeOptions,
    caps: &Caps,
) -> Result<(ComposedForm, ComposeStats)> {
    Composer::new(sig, profile, None, opts, caps).run(f)
}

struct Composer<'a> {
    sig: &'a Signature,
    profile: &'a SyncProfile,
    spec: Option<&'a ProductSpec>,
    opts: ComposeOptions,
    caps: &'a Caps,
    formulas: Vec<BTreeMap<String, Formula>>,
    ids: Vec<HashMap<String, String>>,
    words: HashMap<Vec<usize>, Vec<Vec<usize>>>,
    stats: ComposeStats,
    evaluators: Vec<Evaluator<'a>>,
}

impl<'a> Composer<'a> {
    fn new(
        sig: &'a Signature,
        profile: &'a SyncProfile,
        spec: Option<&'a ProductSpec>,
        opts: ComposeOptions,
        caps: &'a Caps,
    ) -> Self {
        let n = sig.len();
        let evaluators = match spec {
            Some(spec) if !opts.syntactic => spec
                .components()
                .iter()
                .map(|g| Evaluator::new(g, *caps))
                .collect(),
            _ => Vec::new(),
        };
        Composer {
            evaluators,
            sig,
            profile,
            spec,
            opts,
            caps,
            formulas: vec![BTreeMap::new(); n],
            ids: vec![HashMap::new(); n],
            words: HashMap::new(),
            stats: ComposeStats::default(),
        }
    }

    fn run(mut self, f: &Formula) -> Result<(ComposedForm, ComposeStats)> {
        let desc = classify(f);
        if desc.family > Family::FoR {
            return Err(Error::Unsupported(format!(
                "composition needs an FO(R) formula, got {desc}"
            )));
        }
        let alpha = self.comp(&normalize(f))?;
        let used = alpha.atoms();
        let psi = (0..self.sig.len())
            .map(|i| {
                self.formulas[i]
                    .iter()
                    .filter(|(id, _)| used.contains(&PAtom::new(i, (*id).clone())))
                    .map(|(id, f)| (id.clone(), f.clone()))
                    .collect()
            })
            .collect();
        Ok((ComposedForm { psi, alpha }, self.stats))
    }

    fn n(&self) -> usize {
        self.sig.len()
    }

    fn atom(&mut self, i: usize, f: Formula) -> BoolExpr<PAtom> {
        match f {
            Formula::True => return BoolExpr::Const(true),
            Formula::False => return BoolExpr::Const(false),
            _ => {}
        }
        let key = canonical_text(&f);
        if let Some(id) = self.ids[i].get(&key) {
            return BoolExpr::atom(PAtom::new(i, id.clone()));
        }
        let id = formula_id(&f);
        self.ids[i].insert(key, id.clone());
        self.formulas[i].entry(id.clone()).or_insert(f);
        BoolExpr::atom(PAtom::new(i, id))
    }

    fn project(&self, t: &Term, i: usize) -> Result<Term> {
        match t {
            Term::Var(_) => Ok(t.clone()),
            Term::Const(c) => match split_tuple(c) {
                Some(parts) if parts.len() == self.n() => Ok(Term::constant(parts[i])),
                _ if self.n() == 1 => Ok(t.clone()),
                _ => Err(Error::UnknownVertex(c.clone())),
            },
        }
    }

    /// `⋀ᵢ pᵢ(make(i))`.
    fn per_component(&mut self, mut make: impl FnMut(&Self, usize) -> Result<Formula>) -> Result<BoolExpr<PAtom>> {
        let mut parts = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let f = make(self, i)?;
            parts.push(self.atom(i, f));
        }
        Ok(BoolExpr::and_all(parts))
    }

    fn comp(&mut self, f: &Formula) -> Result<BoolExpr<PAtom>> {
        match f {
            Formula::True => Ok(BoolExpr::Const(true)),
            Formula::False => Ok(BoolExpr::Const(false)),
            Formula::Eq(a, b) => self.per_component(|c, i| Ok(Formula::Eq(c.project(a, i)?, c.project(b, i)?))),
            Formula::Edge(l, a, b) => {
                if let Some(owner) = self.sig.local.iter().position(|s| s.contains(l)) {
                    return self.per_component(|c, i| {
                        let (a, b) = (c.project(a, i)?, c.project(b, i)?);
                        Ok(if i == owner { Formula::Edge(l.clone(), a, b) } else { Formula::Eq(a, b) })
                    });
                }
                let Some(t) = self.sig.constraint.find(l) else {
                    return Err(Error::UnknownLabel(l.clone()));
                };
                let tuple = self.sig.constraint.tuples[t].clone();
                self.per_component(|c, i| {
                    let (a, b) = (c.project(a, i)?, c.project(b, i)?);
                    Ok(match tuple.entry(i) {
                        Some(letter) => Formula::Edge(letter.to_string(), a, b),
                        None => Formula::Eq(a, b),
                    })
                })
            }
            Formula::Reach(labels, a, b) => self.reach(labels, a, b),
            Formula::ReachRe(..) | Formula::Tc(..) => Err(Error::Unsupported(format!(
                "composition needs an FO(R) formula, got {}",
                classify(f)
            ))),
            Formula::Not(a) => Ok(BoolExpr::not(self.comp(a)?)),
            Formula::Or(a, b) => {
                let (a, b) = (self.comp(a)?, self.comp(b)?);
                Ok(BoolExpr::or_all([a, b]))
            }
            Formula::Exists(v, a) => {
                let inner = self.comp(a)?;
                self.exists(v, inner)
            }
            Formula::And(..) | Formula::Implies(..) | Formula::Forall(..) => self.comp(&normalize(f)),
        }
    }

    fn exists(&mut self, v: &str, inner: BoolExpr<PAtom>) -> Result<BoolExpr<PAtom>> {
        if !self.evaluators.is_empty() {
            return self.exists_by_types(v, inner);
        }
        let cubes = inner.dnf(self.caps.sat_assignments as u128)?;
        let mut vectors = Vec::with_capacity(cubes.len());
        for cube in cubes {
            let mut outside = Vec::new();
            let mut inside: Vec<Vec<Formula>> = vec![Vec::new(); self.n()];
            for (atom, value) in cube {
                let f = self.formulas[atom.component][&atom.id].clone();
                if !f.free_vars().contains(v) {
                    outside.push((atom, value));
                    continue;
                }
                inside[atom.component].push(if value { f } else { negate(f) });
            }
            let comps = inside
                .into_iter()
                .map(|lits| {
                    let body = Formula::and_all(lits);
                    if body.free_vars().contains(v) {
                        Formula::exists(v, body)
                    } else {
                        body
                    }
                })
                .collect();
            vectors.push(Vector { outside, comps });
        }
        Ok(self.emit(vectors))
    }

    /// `∃v α` over explicit components.
    ///
    /// Every assignment to component `i` realizes one truth vector (type) of
    /// the component-`i` atoms, so `α` is the union over type combinations
    /// it accepts, and `∃v` distributes over each combination.
    fn exists_by_types(&mut self, v: &str, inner: BoolExpr<PAtom>) -> Result<BoolExpr<PAtom>> {
        let n = self.n();
        let mut atoms: Vec<Vec<PAtom>> = vec![Vec::new(); n];
        for a in inner.atoms() {
            atoms[a.component].push(a);
        }
        let mut types: Vec<Vec<Vec<bool>>> = Vec::with_capacity(n);
        for (i, list) in atoms.iter().enumerate() {
            let formulas: Vec<&Formula> = list.iter().map(|a| &self.formulas[i][&a.id]).collect();
            types.push(self.realized_types(i, &formulas)?);
        }
        let mut found: Vec<Vec<BTreeSet<usize>>> = Vec::new();
        let mut fixed = BTreeMap::new();
        let mut choice = Vec::with_capacity(n);
        self.accept_types(&inner, &atoms, &types, &mut fixed, &mut choice, &mut found)?;
        let found = merge_index_vectors(found, n);

        let mut disjuncts = BTreeSet::new();
        for vector in found {
            let mut parts = Vec::with_capacity(n);
            for (i, set) in vector.iter().enumerate() {
                let f = if set.len() == types[i].len() {
                    Formula::True
                } else {
                    let options = set.iter().map(|&t| {
                        Formula::and_all(atoms[i].iter().zip(&types[i][t]).map(|(a, &b)| {
                            let f = self.formulas[i][&a.id].clone();
                            if b { f } else { negate(f) }
                        }))
                    });
                    let body = Formula::or_all(options);
                    if body.free_vars().contains(v) {
                        Formula::exists(v, body)
                    } else {
                        body
                    }
                };
                parts.push(self.atom(i, f));
            }
            disjuncts.insert(BoolExpr::and_all(parts));
        }
        Ok(BoolExpr::or_all(disjuncts))
    }

    /// Distinct truth vectors of `formulas` over all assignments of their
    /// free variables in component `i`.
    fn realized_types(&self, i: usize, formulas: &[&Formula]) -> Result<Vec<Vec<bool>>> {
        if formulas.is_empty() {
            return Ok(vec![Vec::new()]);
        }
        let ev = &self.evaluators[i];
        let vars: BTreeSet<String> = formulas.iter().flat_map(|f| f.free_vars()).collect();
        let size = ev.lts().vertex_count();
        let rels = formulas
            .iter()
            .map(|f| ev.relation(f))
            .collect::<Result<Vec<_>>>()?;
        let vars: Vec<String> = vars.into_iter().collect();
        let columns: Vec<Vec<usize>> = rels
            .iter()
            .map(|r| r.vars().iter().map(|v| vars.binary_search(v).expect("free var")).collect())
            .collect();
        let all = crate::eval::Relation::full(vars.clone(), size, self.caps.tuples)?;
        let mut seen = BTreeSet::new();
        for row in all.rows() {
            let vector: Vec<bool> = rels
                .iter()
                .zip(&columns)
                .map(|(r, cols)| {
                    let key: Vec<VertexId> = cols.iter().map(|&c| row[c]).collect();
                    r.contains(&key)
                })
                .collect();
            seen.insert(vector);
        }
        Ok(seen.into_iter().collect())
    }

    fn accept_types(
        &self,
        e: &BoolExpr<PAtom>,
        atoms: &[Vec<PAtom>],
        types: &[Vec<Vec<bool>>],
        fixed: &mut BTreeMap<PAtom, bool>,
        choice: &mut Vec<usize>,
        found: &mut Vec<Vec<BTreeSet<usize>>>,
    ) -> Result<()> {
        let i = choice.len();
        let e = if i == 0 { e.clone() } else { e.restrict(fixed) };
        match e {
            BoolExpr::Const(false) => return Ok(()),
            BoolExpr::Const(true) => {
                check_cap("sat_assignments", found.len() as u128 + 1, self.caps.sat_assignments as u128)?;
                let mut vector: Vec<BTreeSet<usize>> = choice.iter().map(|&t| BTreeSet::from([t])).collect();
                vector.extend(types[i..].iter().map(|ts| (0..ts.len()).collect()));
                found.push(vector);
                return Ok(());
            }
            _ => {}
        }
        for (t, vector) in types[i].iter().enumerate() {
            for (a, &b) in atoms[i].iter().zip(vector) {
                fixed.insert(a.clone(), b);
            }
            choice.push(t);
            self.accept_types(&e, atoms, types, fixed, choice, found)?;
            choice.pop();
        }
        for a in &atoms[i] {
            fixed.remove(a);
        }
        Ok(())
    }

    /// `⋁ (outside literals ∧ ⋀ᵢ pᵢ(compsᵢ))` after merging vectors that
    /// differ in one component only.
    fn emit(&mut self, vectors: Vec<Vector>) -> BoolExpr<PAtom> {
        let vectors = merge_vectors(vectors, self.n());
        let mut disjuncts = BTreeSet::new();
        for vec in vectors {
            let mut parts: Vec<BoolExpr<PAtom>> = vec
                .outside
                .into_iter()
                .map(|(a, b)| if b { BoolExpr::atom(a) } else { BoolExpr::not(BoolExpr::atom(a)) })
                .collect();
            for (i, f) in vec.comps.into_iter().enumerate() {
                parts.push(self.atom(i, f));
            }
            disjuncts.insert(BoolExpr::and_all(parts));
        }
        BoolExpr::or_all(disjuncts)
    }

    fn reach(&mut self, labels: &BTreeSet<String>, a: &Term, b: &Term) -> Result<BoolExpr<PAtom>> {
        let n = self.n();
        let mut locals: Vec<BTreeSet<String>> = vec![BTreeSet::new(); n];
        let mut subset = Vec::new();
        for l in labels {
            if let Some(i) = self.sig.local.iter().position(|s| s.contains(l)) {
                locals[i].insert(l.clone());
            } else if let Some(t) = self.sig.constraint.find(l) {
                subset.push(t);
            } else {
                return Err(Error::UnknownLabel(l.clone()));
            }
        }
        subset.sort_unstable();
        let ends: Vec<(Term, Term)> = (0..n)
            .map(|i| Ok((self.project(a, i)?, self.project(b, i)?)))
            .collect::<Result<_>>()?;

        if subset.is_empty() {
            return self.per_component(|_, i| {
                Ok(Formula::Reach(locals[i].clone(), ends[i].0.clone(), ends[i].1.clone()))
            });
        }
        let words = if subset.len() == 1 && !self.opts.singleton_as_words {
            self.hop_words(subset[0])?
        } else {
            self.words_for(&subset, &locals)?
        };
        let mut vectors = Vec::with_capacity(words.len());
        for w in &words {
            let comps = locals
                .iter()
                .enumerate()
                .map(|(i, local)| {
                    let letters: Vec<&str> = w
                        .iter()
                        .filter_map(|&t| self.sig.constraint.tuples[t].entry(i))
                        .collect();
                    chain(local, &letters, &ends[i].0, &ends[i].1)
                })
                .collect();
            vectors.push(Vector { outside: Vec::new(), comps });
        }
        self.stats.disjuncts.insert(subset, vectors.len());
        Ok(self.emit(vectors))
    }

    fn words_for(&mut self, subset: &[usize], locals: &[BTreeSet<String>]) -> Result<Vec<Vec<usize>>> {
        let cap = self.caps.sync_words;
        let words = match self.spec {
            Some(spec) => representative_words(spec, locals, subset, cap)?,
            None => {
                let key = subset.to_vec();
                if let Some(w) = self.words.get(&key) {
                    return Ok(w.clone());
                }
                let depth = self.profile.word_depth(subset)?;
                let w = bounded_words(subset, depth, cap)?;
                self.words.insert(key, w.clone());
                w
            }
        };
        Ok(words)
    }

    /// One constraint tuple: `m` hop points, i.e. `m - 1` synchronized steps,
    /// for `m` up to the bound.
    fn hop_words(&self, t: usize) -> Result<Vec<Vec<usize>>> {
        let k = self.profile.ind(&[t])?;
        let max_m = match self.opts.singleton_bound {
            SingletonBound::Sufficient => k + 1,
            SingletonBound::Literal => k,
        };
        check_cap("sync_words", max_m as u128, self.caps.sync_words as u128)?;
        Ok((1..=max_m).map(|m| vec![t; m - 1]).collect())
    }
}

/// One disjunct in product form: literals over existing atoms plus one
/// formula per component.
#[derive(Debug, Clone)]
struct Vector {
    outside: Vec<(PAtom, bool)>,
    comps: Vec<Formula>,
}

/// Merges `(…, fᵢ, …) ∨ (…, gᵢ, …)` into `(…, fᵢ ∨ gᵢ, …)` until no two
/// vectors differ in a single coordinate.
fn merge_vectors(vectors: Vec<Vector>, n: usize) -> Vec<Vector> {
    let mut vectors: Vec<Vector> = vectors
        .into_iter()
        .filter(|v| !v.comps.iter().any(|f| *f == Formula::False))
        .map(|mut v| {
            v.outside.sort();
            v.outside.dedup();
            v
        })
        .collect();
    loop {
        let before = vectors.len();
        for i in 0..n {
            type Key = (Vec<(PAtom, bool)>, Vec<String>);
            let mut order: Vec<Key> = Vec::new();
            let mut groups: BTreeMap<Key, (Vector, Vec<Formula>)> = BTreeMap::new();
            for v in vectors.drain(..) {
                let texts = v
                    .comps
                    .iter()
                    .enumerate()
                    .map(|(j, f)| if j == i { String::new() } else { canonical_text(f) })
                    .collect();
                let key = (v.outside.clone(), texts);
                let fi = v.comps[i].clone();
                match groups.get_mut(&key) {
                    Some((_, fs)) => fs.push(fi),
                    None => {
                        order.push(key.clone());
                        groups.insert(key, (v, vec![fi]));
                    }
                }
            }
            for key in order {
                let (mut v, mut fs) = groups.remove(&key).expect("grouped");
                v.comps[i] = if fs.contains(&Formula::True) {
                    Formula::True
                } else {
                    let mut seen = BTreeSet::new();
                    fs.retain(|f| seen.insert(canonical_text(f)));
                    Formula::or_all(fs)
                };
                vectors.push(v);
            }
        }
        if vectors.len() == before {
            return vectors;
        }
    }
}

/// `merge_vectors` for vectors of type-index sets.
fn merge_index_vectors(mut vectors: Vec<Vec<BTreeSet<usize>>>, n: usize) -> Vec<Vec<BTreeSet<usize>>> {
    loop {
        let before = vectors.len();
        for i in 0..n {
            let mut groups: BTreeMap<Vec<BTreeSet<usize>>, BTreeSet<usize>> = BTreeMap::new();
            for mut v in vectors.drain(..) {
                let own = std::mem::take(&mut v[i]);
                groups.entry(v).or_default().extend(own);
            }
            vectors = groups
                .into_iter()
                .map(|(mut v, own)| {
                    v[i] = own;
                    v
                })
                .collect();
        }
        if vectors.len() == before {
            return vectors;
        }
    }
}

fn term_vars(ts: &[&Term]) -> BTreeSet<String> {
    ts.iter().filter_map(|t| t.as_var().map(str::to_string)).collect()
}

/// Path `x →L* ·c₁· →L* … ·c_m· →L* y` in one component.
pub fn chain(local: &BTreeSet<String>, letters: &[&str], x: &Term, y: &Term) -> Formula {
    let reach = |a: Term, b: Term| Formula::Reach(local.clone(), a, b);
    if letters.is_empty() {
        return reach(x.clone(), y.clone());
    }
    let mut avoid = term_vars(&[x, y]);
    let mut names = Vec::new();
    for j in 1..=letters.len() {
        for base in ["z", "w"] {
            let v = fresh_var(&format!("{base}{j}"), &avoid);
            avoid.insert(v.clone());
            names.push(v);
        }
    }
    // Built from the end: rest_j(w_j) = ∃z_{j+1}(Reach(w_j,z_{j+1}) ∧ ∃w_{j+1}(E z w ∧ rest)).
    let mut acc = reach(Term::var(&names[2 * letters.len() - 1]), y.clone());
    for j in (0..letters.len()).rev() {
        let (z, w) = (&names[2 * j], &names[2 * j + 1]);
        let from = if j == 0 { x.clone() } else { Term::var(&names[2 * j - 1]) };
        acc = Formula::exists(
            z.clone(),
            Formula::and(
                reach(from, Term::var(z)),
                Formula::exists(
                    w.clone(),
                    Formula::and(Formula::edge(letters[j], Term::var(z), Term::var(w)), acc),
                ),
            ),
        );
    }
    acc
}

/// Evaluates a composed form on explicit components.
///
/// `assignment` maps each free variable to a product vertex given by its
/// component vertex ids.
pub fn eval_composed(
    components: &[Lts],
    cf: &ComposedForm,
    assignment: &BTreeMap<String, Vec<VertexId>>,
    caps: &Caps,
) -> Result<bool> {
    let evaluators: Vec<Evaluator> = components.iter().map(|g| Evaluator::new(g, *caps)).collect();
    let mut memo: BTreeMap<PAtom, bool> = BTreeMap::new();
    let mut failure = None;
    for atom in cf.alpha.atoms() {
        let i = atom.component;
        let Some(f) = cf.formula(&atom) else {
            return Err(Error::InvalidSystem(format!("atom {atom} has no formula")));
        };
        let g = evaluators.get(i).ok_or_else(|| Error::InvalidSystem(format!("no component for atom {atom}")))?;
        let mut a = BTreeMap::new();
        for v in f.free_vars() {
            let tuple = assignment.get(&v).ok_or_else(|| Error::UnboundVariable(v.clone()))?;
            let id = *tuple.get(i).ok_or_else(|| Error::Arity(format!("vertex for `{v}` has too few coordinates")))?;
            a.insert(v, id);
        }
        match g.eval(f, &a) {
            Ok(b) => {
                memo.insert(atom, b);
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(cf.alpha.eval(&mut |a| memo[a]))
}

/// Decides a sentence on a product by composition.
pub fn holds_composed(spec: &ProductSpec, f: &Formula, caps: &Caps) -> Result<bool> {
    let profile = profile_from_explicit(spec)?;
    let cf = compose(f, spec, &profile, ComposeOptions::default(), caps)?;
    eval_composed(spec.components(), &cf, &BTreeMap::new(), caps)
}
