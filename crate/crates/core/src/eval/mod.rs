//! Explicit-state evaluation of FO, FO(R), FO(Reg) and FO(TC) formulas over
//! a finite [`Lts`].
//!
//! Every sub-formula is turned into the relation of its satisfying
//! assignments over its free variables.

mod nfa;
mod relation;

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::rc::Rc;

pub use nfa::Nfa;
pub use relation::{Relation, Row};

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::logic::{Formula, Regex, Tc, Term};
use crate::lts::{Lts, VertexId};

/// Variable name to vertex.
pub type Assignment = BTreeMap<String, VertexId>;

/// Decides `G ⊨ f[a]`.
pub fn eval(g: &Lts, f: &Formula, a: &Assignment, caps: &Caps) -> Result<bool> {
    Evaluator::new(g, *caps).eval(f, a)
}

/// Decides a sentence.
pub fn holds(g: &Lts, f: &Formula, caps: &Caps) -> Result<bool> {
    eval(g, f, &Assignment::new(), caps)
}

/// The relation of all satisfying assignments of `f` over `free(f)`.
pub fn sat_relation(g: &Lts, f: &Formula, caps: &Caps) -> Result<Relation> {
    Evaluator::new(g, *caps).relation(f)
}

/// Vertices reachable from `from` over edges labeled in `labels` (reflexive).
pub fn reach_set(g: &Lts, labels: &BTreeSet<String>, from: VertexId) -> BTreeSet<VertexId> {
    let adj = Adjacency::new(g, labels.iter().map(String::as_str));
    adj.bfs(from, false).into_iter().collect()
}

/// Vertices `w` with a path `from → w` whose label word lies in `L(r)`.
pub fn reach_regex_set(g: &Lts, r: &Regex, from: VertexId) -> BTreeSet<VertexId> {
    let nfa = Nfa::from_regex(r);
    regex_targets(g, &nfa, &label_adjacency(g, &r.symbols()), from)
}

/// Transitive closure (paths with at least one step) of
/// `{(x̄,ȳ) | body(x̄,ȳ,z̄)}` for fixed parameter values `z̄`.
pub fn tc_relation(
    g: &Lts,
    xs: &[String],
    ys: &[String],
    body: &Formula,
    params: &Assignment,
    caps: &Caps,
) -> Result<BTreeSet<(Row, Row)>> {
    let pairs: Vec<(&str, &str)> = params
        .iter()
        .map(|(v, &id)| (v.as_str(), g.vertex_name(id)))
        .collect();
    let body = body.assign(pairs);
    let ev = Evaluator::new(g, *caps);
    let graph = ev.step_graph(xs, ys, &ev.relation(&body)?)?;
    let mut out = BTreeSet::new();
    for src in graph.keys() {
        for dst in closure_from(&graph, src) {
            out.insert((src.clone(), dst));
        }
    }
    Ok(out)
}

struct Adjacency {
    out: Vec<Vec<VertexId>>,
}

impl Adjacency {
    fn new<'a>(g: &Lts, labels: impl Iterator<Item = &'a str>) -> Self {
        let mut out = vec![Vec::new(); g.vertex_count()];
        for l in labels {
            for (a, b) in g.edges(l) {
                out[a as usize].push(b);
            }
        }
        Adjacency { out }
    }

    fn reversed(&self) -> Self {
        let mut out = vec![Vec::new(); self.out.len()];
        for (a, succ) in self.out.iter().enumerate() {
            for &b in succ {
                out[b as usize].push(a as VertexId);
            }
        }
        Adjacency { out }
    }

    /// Reflexive closure image, or the strict one (at least one step).
    fn bfs(&self, from: VertexId, strict: bool) -> Vec<VertexId> {
        let mut seen = vec![false; self.out.len()];
        let mut queue = VecDeque::new();
        let mut result = Vec::new();
        if strict {
            for &b in &self.out[from as usize] {
                if !seen[b as usize] {
                    seen[b as usize] = true;
                    queue.push_back(b);
                }
            }
        } else {
            seen[from as usize] = true;
            queue.push_back(from);
        }
        while let Some(v) = queue.pop_front() {
            result.push(v);
            for &w in &self.out[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    queue.push_back(w);
                }
            }
        }
        result
    }
}

fn label_adjacency(g: &Lts, labels: &BTreeSet<String>) -> HashMap<String, Vec<Vec<VertexId>>> {
    labels
        .iter()
        .map(|l| {
            let mut out = vec![Vec::new(); g.vertex_count()];
            for (a, b) in g.edges(l) {
                out[a as usize].push(b);
            }
            (l.clone(), out)
        })
        .collect()
}

/// BFS over `G × NFA` with on-the-fly ε-closure.
fn regex_targets(
    g: &Lts,
    nfa: &Nfa,
    adj: &HashMap<String, Vec<Vec<VertexId>>>,
    from: VertexId,
) -> BTreeSet<VertexId> {
    let q = nfa.state_count();
    let mut seen = vec![false; g.vertex_count() * q];
    let mut queue = VecDeque::new();
    let push = |v: VertexId, s: usize, seen: &mut Vec<bool>, queue: &mut VecDeque<(VertexId, usize)>| {
        let key = v as usize * q + s;
        if !seen[key] {
            seen[key] = true;
            queue.push_back((v, s));
        }
    };
    push(from, 0, &mut seen, &mut queue);
    let mut out = BTreeSet::new();
    while let Some((v, s)) = queue.pop_front() {
        if s == nfa.accept {
            out.insert(v);
        }
        for &p in &nfa.eps[s] {
            push(v, p, &mut seen, &mut queue);
        }
        for (sym, p) in &nfa.moves[s] {
            if let Some(succ) = adj.get(sym) {
                for &w in &succ[v as usize] {
                    push(w, *p, &mut seen, &mut queue);
                }
            }
        }
    }
    out
}

fn closure_from(graph: &HashMap<Row, Vec<Row>>, src: &Row) -> Vec<Row> {
    let mut seen: BTreeSet<&Row> = BTreeSet::new();
    let mut queue: VecDeque<&Row> = VecDeque::new();
    for n in graph.get(src).into_iter().flatten() {
        if seen.insert(n) {
            queue.push_back(n);
        }
    }
    while let Some(r) = queue.pop_front() {
        for n in graph.get(r).into_iter().flatten() {
            if seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen.into_iter().cloned().collect()
}

/// Relational evaluator with a per-instance sub-formula cache.
pub struct Evaluator<'g> {
    g: &'g Lts,
    caps: Caps,
    cache: RefCell<HashMap<Formula, Rc<Relation>>>,
}

impl<'g> Evaluator<'g> {
    pub fn new(g: &'g Lts, caps: Caps) -> Self {
        Evaluator {
            g,
            caps,
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn lts(&self) -> &Lts {
        self.g
    }

    fn n(&self) -> usize {
        self.g.vertex_count()
    }

    fn cap(&self) -> u64 {
        self.caps.tuples
    }

    fn check_labels(&self, f: &Formula) -> Result<()> {
        for l in f.labels() {
            if !self.g.alphabet().contains(&l) {
                return Err(Error::UnknownLabel(l));
            }
        }
        Ok(())
    }

    pub fn eval(&self, f: &Formula, a: &Assignment) -> Result<bool> {
        let free = f.free_vars();
        if let Some(v) = free.iter().find(|v| !a.contains_key(*v)) {
            return Err(Error::UnboundVariable(v.clone()));
        }
        let mut pairs = Vec::new();
        for v in &free {
            let id = a[v];
            if id as usize >= self.n() {
                return Err(Error::UnknownVertex(format!("#{id}")));
            }
            pairs.push((v.as_str(), self.g.vertex_name(id)));
        }
        Ok(self.relation(&f.assign(pairs))?.holds())
    }

    pub fn relation(&self, f: &Formula) -> Result<Relation> {
        self.check_labels(f)?;
        Ok((*self.rel(f)?).clone())
    }

    fn vertex(&self, name: &str) -> Result<VertexId> {
        self.g
            .vertex_id(name)
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    fn rel(&self, f: &Formula) -> Result<Rc<Relation>> {
        if let Some(r) = self.cache.borrow().get(f) {
            return Ok(r.clone());
        }
        let r = Rc::new(self.compute(f)?);
        if f.free_vars().len() <= 2 {
            self.cache.borrow_mut().insert(f.clone(), r.clone());
        }
        Ok(r)
    }

    /// Relation over the variables among `terms`, given a predicate on values.
    fn binary(&self, a: &Term, b: &Term, pairs: impl FnOnce() -> Result<Vec<(VertexId, VertexId)>>) -> Result<Relation> {
        let pairs = pairs()?;
        let mut vars = Vec::new();
        let mut fixed: Vec<Option<VertexId>> = Vec::new();
        for t in [a, b] {
            match t {
                Term::Var(v) => {
                    vars.push(v.clone());
                    fixed.push(None);
                }
                Term::Const(c) => fixed.push(Some(self.vertex(c)?)),
            }
        }
        let rows = pairs.into_iter().filter_map(|(x, y)| {
            if fixed[0].is_some_and(|c| c != x) || fixed[1].is_some_and(|c| c != y) {
                return None;
            }
            let mut row = Row::new();
            if fixed[0].is_none() {
                row.push(x);
            }
            if fixed[1].is_none() {
                row.push(y);
            }
            Some(row)
        });
        Ok(Relation::from_rows(vars, rows))
    }

    fn source_of(&self, t: &Term) -> Result<Option<VertexId>> {
        match t {
            Term::Const(c) => Ok(Some(self.vertex(c)?)),
            Term::Var(_) => Ok(None),
        }
    }

    fn compute(&self, f: &Formula) -> Result<Relation> {
        let n = self.n();
        let cap = self.cap();
        match f {
            Formula::True => Ok(Relation::boolean(true)),
            Formula::False => Ok(Relation::boolean(false)),
            Formula::Eq(a, b) => self.binary(a, b, || Ok((0..n as VertexId).map(|v| (v, v)).collect())),
            Formula::Edge(l, a, b) => self.binary(a, b, || Ok(self.g.edges(l).collect())),
            Formula::Reach(ls, a, b) => {
                let adj = Adjacency::new(self.g, ls.iter().map(String::as_str));
                match (self.source_of(a)?, self.source_of(b)?) {
                    (Some(s), _) => self.binary(a, b, || Ok(adj.bfs(s, false).into_iter().map(|w| (s, w)).collect())),
                    (None, Some(t)) => {
                        let rev = adj.reversed();
                        self.binary(a, b, || Ok(rev.bfs(t, false).into_iter().map(|v| (v, t)).collect()))
                    }
                    (None, None) => self.binary(a, b, || {
                        let mut pairs = Vec::new();
                        for v in 0..n as VertexId {
                            let reach = adj.bfs(v, false);
                            check_cap("tuples", (pairs.len() + reach.len()) as u128, cap as u128)?;
                            pairs.extend(reach.into_iter().map(|w| (v, w)));
                        }
                        Ok(pairs)
                    }),
                }
            }
            Formula::ReachRe(r, a, b) => {
                let nfa = Nfa::from_regex(r);
                let adj = label_adjacency(self.g, &r.symbols());
                let sources: Vec<VertexId> = match self.source_of(a)? {
                    Some(s) => vec![s],
                    None => (0..n as VertexId).collect(),
                };
                self.binary(a, b, || {
                    let mut pairs = Vec::new();
                    for s in sources {
                        let targets = regex_targets(self.g, &nfa, &adj, s);
                        check_cap("tuples", (pairs.len() + targets.len()) as u128, cap as u128)?;
                        pairs.extend(targets.into_iter().map(|w| (s, w)));
                    }
                    Ok(pairs)
                })
            }
            Formula::Tc(tc) => self.tc(tc),
            Formula::Not(a) => self.rel(a)?.complement(n, cap),
            Formula::And(..) => self.conjunction(f),
            Formula::Or(a, b) => self.rel(a)?.union(&*self.rel(b)?, n, cap),
            Formula::Implies(a, b) => {
                let na = Formula::not((**a).clone());
                self.rel(&na)?.union(&*self.rel(b)?, n, cap)
            }
            Formula::Exists(v, a) | Formula::Forall(v, a) => {
                let r = self.rel(a)?;
                if n == 0 {
                    // Empty domain: ∃ is false and ∀ is true everywhere.
                    let vars: Vec<String> = r.vars().iter().filter(|x| *x != v).cloned().collect();
                    return match f {
                        Formula::Exists(..) => Ok(Relation::from_rows(vars, [])),
                        _ => Relation::full(vars, 0, cap),
                    };
                }
                Ok(match f {
                    Formula::Exists(..) => r.project_out(v),
                    _ => r.forall_out(v, n),
                })
            }
        }
    }

    /// Joins positive conjuncts first, then filters by the negative ones.
    fn conjunction(&self, f: &Formula) -> Result<Relation> {
        let n = self.n();
        let cap = self.cap();
        let mut parts = Vec::new();
        flatten_and(f, &mut parts);
        let mut positive = Vec::new();
        let mut negative = Vec::new();
        for p in parts {
            match p {
                Formula::Not(inner) => negative.push(&**inner),
                other => positive.push(self.rel(other)?),
            }
        }
        positive.sort_by_key(|r| (r.len(), std::cmp::Reverse(r.vars().len())));
        let mut acc = Relation::boolean(true);
        let mut pending: Vec<Rc<Relation>> = positive;
        // Greedy: prefer partners sharing a column to avoid cross products.
        while !pending.is_empty() {
            let pick = pending
                .iter()
                .position(|r| acc.vars().is_empty() || r.vars().iter().any(|v| acc.column(v).is_some()))
                .unwrap_or(0);
            let next = pending.remove(pick);
            acc = acc.join(&next, cap)?;
            if acc.is_empty() {
                let vars: BTreeSet<String> = f.free_vars();
                return Ok(Relation::from_rows(vars.into_iter().collect(), []));
            }
        }
        for neg in negative {
            let covered = neg.free_vars().iter().all(|v| acc.column(v).is_some());
            if covered {
                acc = acc.anti_join(&*self.rel(neg)?);
            } else {
                let comp = self.rel(neg)?.complement(n, cap)?;
                acc = acc.join(&comp, cap)?;
            }
        }
        Ok(acc)
    }

    /// Successor map on `k`-tuples given the body relation.
    fn step_graph(&self, xs: &[String], ys: &[String], body: &Relation) -> Result<HashMap<Row, Vec<Row>>> {
        let vars: BTreeSet<String> = xs.iter().chain(ys).cloned().collect();
        let full = body.extend_to(&vars, self.n(), self.cap())?;
        let xi: Vec<usize> = xs.iter().map(|v| full.column(v).expect("extended")).collect();
        let yi: Vec<usize> = ys.iter().map(|v| full.column(v).expect("extended")).collect();
        let mut graph: HashMap<Row, Vec<Row>> = HashMap::new();
        for r in full.rows() {
            graph
                .entry(xi.iter().map(|&i| r[i]).collect())
                .or_default()
                .push(yi.iter().map(|&i| r[i]).collect());
        }
        Ok(graph)
    }

    fn tc(&self, tc: &Tc) -> Result<Relation> {
        let n = self.n();
        let cap = self.cap();
        let k = tc.arity();
        check_cap("tuples", (n as u128).saturating_pow(k as u32), cap as u128)?;
        let body = self.rel(&tc.body)?;
        let params: Vec<String> = tc.parameters().into_iter().collect();
        let param_cols: Vec<usize> = params.iter().filter_map(|p| body.column(p)).collect();
        // Parameters absent from the body relation cannot occur: free vars of the
        // body are exactly its columns.
        debug_assert_eq!(param_cols.len(), params.len());

        let mut groups: BTreeMap<Row, Vec<Row>> = BTreeMap::new();
        for r in body.rows() {
            groups
                .entry(param_cols.iter().map(|&i| r[i]).collect())
                .or_default()
                .push(r.clone());
        }

        let mut out_vars: Vec<String> = params.clone();
        let mut applied_vars: Vec<String> = Vec::new();
        for t in tc.s.iter().chain(&tc.t) {
            if let Term::Var(v) = t {
                if !out_vars.contains(v) && !applied_vars.contains(v) {
                    applied_vars.push(v.clone());
                }
            }
        }
        out_vars.extend(applied_vars.iter().cloned());

        let consts = |ts: &[Term]| -> Result<Vec<Option<VertexId>>> {
            ts.iter().map(|t| self.source_of(t)).collect()
        };
        let s_const = consts(&tc.s)?;
        let t_const = consts(&tc.t)?;

        let mut rows = Vec::new();
        for (pvals, group) in groups {
            let sub = Relation::from_rows(body.vars().to_vec(), group);
            let graph = self.step_graph(&tc.xs, &tc.ys, &sub)?;
            let mut binding: HashMap<&str, VertexId> = params
                .iter()
                .map(String::as_str)
                .zip(pvals.iter().copied())
                .collect();
            let base_len = binding.len();
            let fixed_src: Option<Row> = s_const.iter().copied().collect::<Option<Row>>();
            let candidates: Vec<&Row> = match &fixed_src {
                Some(src) => graph.get_key_value(src).map(|(k, _)| k).into_iter().collect(),
                None => graph.keys().collect(),
            };
            for src in candidates {
                let mut bound_src: Vec<&str> = Vec::new();
                if !bind_tuple(&tc.s, &s_const, src, &mut binding, &mut bound_src) {
                    unbind(&mut binding, &bound_src);
                    continue;
                }
                for dst in closure_from(&graph, src) {
                    let mut bound_dst: Vec<&str> = Vec::new();
                    if bind_tuple(&tc.t, &t_const, &dst, &mut binding, &mut bound_dst) {
                        check_cap("tuples", rows.len() as u128 + 1, cap as u128)?;
                        rows.push(out_vars.iter().map(|v| binding[v.as_str()]).collect::<Row>());
                    }
                    unbind(&mut binding, &bound_dst);
                }
                unbind(&mut binding, &bound_src);
                debug_assert_eq!(binding.len(), base_len);
            }
        }
        Ok(Relation::from_rows(out_vars, rows))
    }
}

/// Binds the variables of `terms` to `values`; false on a clash.
fn bind_tuple<'a>(
    terms: &'a [Term],
    consts: &[Option<VertexId>],
    values: &Row,
    binding: &mut HashMap<&'a str, VertexId>,
    newly: &mut Vec<&'a str>,
) -> bool {
    for (i, t) in terms.iter().enumerate() {
        if let Some(c) = consts[i] {
            if c != values[i] {
                return false;
            }
            continue;
        }
        let v = t.as_var().expect("non-constant term is a variable");
        match binding.get(v) {
            Some(&x) if x != values[i] => return false,
            Some(_) => {}
            None => {
                binding.insert(v, values[i]);
                newly.push(v);
            }
        }
    }
    true
}

fn unbind<'a>(binding: &mut HashMap<&'a str, VertexId>, vars: &[&'a str]) {
    for v in vars {
        binding.remove(v);
    }
}

fn flatten_and<'a>(f: &'a Formula, out: &mut Vec<&'a Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_and(a, out);
            flatten_and(b, out);
        }
        other => out.push(other),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_formula;
    use crate::lts::LabelAlphabet;

    fn chain(n: usize) -> Lts {
        let mut g = Lts::new(LabelAlphabet::local_only(["s"]).unwrap());
        for i in 0..n {
            g.add_vertex(i.to_string());
        }
        for i in 0..n.saturating_sub(1) {
            g.add_edge("s", i as u32, i as u32 + 1).unwrap();
        }
        g
    }

    fn check(g: &Lts, text: &str) -> bool {
        holds(g, &parse_formula(text).unwrap(), &Caps::default()).unwrap()
    }

    #[test]
    fn tc_is_directed() {
        let g = chain(3);
        assert!(check(&g, "TC[x;y: E s (x,y)](0,2)"));
        assert!(!check(&g, "TC[x;y: E s (x,y)](2,0)"));
        assert!(!check(&g, "TC[x;y: E s (x,y)](0,0)"));
        assert!(check(&g, "Reach[{s}](1,1)"));
    }

    #[test]
    fn quantifiers_and_connectives() {
        let g = chain(4);
        assert!(check(&g, "forall x. exists y. Reach[{s}](y,x)"));
        assert!(!check(&g, "forall x. exists y. E s (x,y)"));
        assert!(check(&g, "exists x. forall y. Reach[{s}](x,y)"));
        assert!(check(&g, "forall x. forall y. E s (x,y) -> !E s (y,x)"));
        assert!(check(&g, "exists x. !(exists y. E s (y,x)) & x = 0"));
    }

    #[test]
    fn regex_reachability() {
        let g = chain(5);
        assert!(check(&g, "Reach[re:(s.s)*](0,4)"));
        assert!(!check(&g, "Reach[re:(s.s)*](0,3)"));
        assert!(check(&g, "forall x. Reach[re:eps](x,x)"));
    }

    #[test]
    fn tc_with_parameters_and_pairs() {
        let g = chain(6);
        // steps of +1 that never pass through z
        assert!(check(&g, "exists z. TC[x;y: E s (x,y) & !y = z](0,3) & z = 5"));
        assert!(!check(&g, "exists z. z = 2 & TC[x;y: E s (x,y) & !y = z](0,3)"));
        // pairs moving together: (0,a) ->* (b,c) iff c - a = b
        assert!(check(&g, "TC[x1,x2;y1,y2: E s (x1,y1) & E s (x2,y2)](0,1,3,4)"));
        assert!(!check(&g, "TC[x1,x2;y1,y2: E s (x1,y1) & E s (x2,y2)](0,1,3,5)"));
    }

    #[test]
    fn helpers() {
        let g = chain(3);
        assert_eq!(reach_set(&g, &BTreeSet::new(), 1), BTreeSet::from([1]));
        let id = tc_relation(&g, &["x".into()], &["y".into()], &parse_formula("x = y").unwrap(), &Assignment::new(), &Caps::default()).unwrap();
        assert_eq!(id.len(), 3);
        assert!(id.iter().all(|(a, b)| a == b));
    }

    #[test]
    fn errors() {
        let g = chain(3);
        let caps = Caps::default();
        assert!(matches!(holds(&g, &parse_formula("E t (0,1)").unwrap(), &caps), Err(Error::UnknownLabel(_))));
        assert!(matches!(holds(&g, &parse_formula("x = 7").unwrap(), &caps), Err(Error::UnboundVariable(_))));
        assert!(matches!(holds(&g, &parse_formula("'zz' = 0").unwrap(), &caps), Err(Error::UnknownVertex(_))));
        let tight = Caps { tuples: 4, ..caps };
        assert!(matches!(holds(&g, &parse_formula("forall x. forall y. !E s (x,y) | true").unwrap(), &tight), Err(Error::Resource { .. })));
    }
}
