#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use prodcheck::logic::Tc;
use prodcheck::lts::{LabelAlphabet, VertexId};
use prodcheck::{Formula, Lts, ProductSpec, SyncConstraint, SyncTuple, Term};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Env = BTreeMap<String, VertexId>;

/// Plain Tarskian evaluation, kept deliberately naive.
pub fn naive(g: &Lts, f: &Formula, env: &Env) -> bool {
    let n = g.vertex_count() as VertexId;
    let val = |t: &Term| -> VertexId {
        match t {
            Term::Var(v) => env[v],
            Term::Const(c) => g.vertex_id(c).expect("known vertex"),
        }
    };
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Eq(a, b) => val(a) == val(b),
        Formula::Edge(l, a, b) => g.has_edge(l, val(a), val(b)),
        Formula::Reach(ls, a, b) => {
            let (s, t) = (val(a), val(b));
            bfs(g, ls, s).contains(&t)
        }
        Formula::ReachRe(..) => panic!("naive oracle has no regex support"),
        Formula::Tc(tc) => naive_tc(g, tc, env),
        Formula::Not(a) => !naive(g, a, env),
        Formula::And(a, b) => naive(g, a, env) && naive(g, b, env),
        Formula::Or(a, b) => naive(g, a, env) || naive(g, b, env),
        Formula::Implies(a, b) => !naive(g, a, env) || naive(g, b, env),
        Formula::Exists(v, a) => (0..n).any(|x| {
            let mut e = env.clone();
            e.insert(v.clone(), x);
            naive(g, a, &e)
        }),
        Formula::Forall(v, a) => (0..n).all(|x| {
            let mut e = env.clone();
            e.insert(v.clone(), x);
            naive(g, a, &e)
        }),
    }
}

pub fn bfs(g: &Lts, labels: &BTreeSet<String>, s: VertexId) -> BTreeSet<VertexId> {
    let mut seen = BTreeSet::from([s]);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        for l in labels {
            for (a, b) in g.edges(l) {
                if a == u && seen.insert(b) {
                    queue.push_back(b);
                }
            }
        }
    }
    seen
}

fn tuples(arity: usize, n: VertexId) -> Vec<Vec<VertexId>> {
    let mut out = vec![Vec::new()];
    for _ in 0..arity {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..n).map(move |v| {
                    let mut t = t.clone();
                    t.push(v);
                    t
                })
            })
            .collect();
    }
    out
}

/// Least fixpoint of the step relation, iterated until stable.
fn naive_tc(g: &Lts, tc: &Tc, env: &Env) -> bool {
    let n = g.vertex_count() as VertexId;
    let k = tc.xs.len();
    let all = tuples(k, n);
    let mut step = BTreeSet::new();
    for a in &all {
        for b in &all {
            let mut e = env.clone();
            for (v, &x) in tc.xs.iter().zip(a) {
                e.insert(v.clone(), x);
            }
            for (v, &y) in tc.ys.iter().zip(b) {
                e.insert(v.clone(), y);
            }
            if naive(g, &tc.body, &e) {
                step.insert((a.clone(), b.clone()));
            }
        }
    }
    let mut closure = step.clone();
    loop {
        let mut next = closure.clone();
        for (a, b) in &closure {
            for (c, d) in &step {
                if b == c {
                    next.insert((a.clone(), d.clone()));
                }
            }
        }
        if next.len() == closure.len() {
            break;
        }
        closure = next;
    }
    let term = |t: &Term| match t {
        Term::Var(v) => env[v],
        Term::Const(c) => g.vertex_id(c).expect("known vertex"),
    };
    let s: Vec<VertexId> = tc.s.iter().map(term).collect();
    let t: Vec<VertexId> = tc.t.iter().map(term).collect();
    closure.contains(&(s, t))
}

/// Random component with `states` vertices named `0..states`.
pub fn random_component<R: Rng>(rng: &mut R, i: usize, states: usize, local: &[String], sync: &[String]) -> Lts {
    let alphabet = LabelAlphabet::new(local.iter().cloned(), sync.iter().cloned()).unwrap();
    let mut g = Lts::new(alphabet);
    for v in 0..states {
        g.add_vertex(v.to_string());
    }
    let _ = i;
    for l in local.iter().chain(sync) {
        let density = rng.gen_range(0.05..0.4);
        for a in 0..states as VertexId {
            for b in 0..states as VertexId {
                if rng.gen_bool(density) {
                    g.add_edge(l, a, b).unwrap();
                }
            }
        }
    }
    g
}

/// Random product with `n` components of at most `max_states` states and
/// at most `max_tuples` constraint tuples.
pub fn random_spec<R: Rng>(rng: &mut R, n: usize, max_states: usize, max_tuples: usize) -> ProductSpec {
    let locals: Vec<Vec<String>> = (0..n)
        .map(|i| {
            (0..rng.gen_range(1..=2))
                .map(|k| format!("{}{i}", ["a", "b"][k]))
                .collect()
        })
        .collect();
    let syncs: Vec<Vec<String>> = (0..n)
        .map(|i| (0..2).map(|k| format!("{}{i}", ["s", "t"][k])).collect())
        .collect();
    let components = (0..n)
        .map(|i| {
            let states = rng.gen_range(1..=max_states);
            random_component(rng, i, states, &locals[i], &syncs[i])
        })
        .collect();
    let count = rng.gen_range(1..=max_tuples);
    let mut tuples = Vec::new();
    while tuples.len() < count {
        let entries: Vec<String> = (0..n)
            .map(|i| {
                if rng.gen_bool(0.3) {
                    "eps".to_string()
                } else {
                    syncs[i].choose(rng).unwrap().clone()
                }
            })
            .collect();
        if entries.iter().all(|e| e == "eps") {
            continue;
        }
        let t = SyncTuple(entries);
        if !tuples.contains(&t) {
            tuples.push(t);
        }
    }
    ProductSpec::new(components, SyncConstraint::new(tuples)).unwrap()
}

/// All labels of the product: local labels and tuple labels.
pub fn product_labels(spec: &ProductSpec) -> Vec<String> {
    let mut out: Vec<String> = spec.local_labels().into_iter().collect();
    out.extend(spec.constraint().tuples.iter().map(SyncTuple::label));
    out
}

/// Random formula over variables in `scope`; quantifier depth at most
/// `depth`, and at most `*reach` reachability atoms overall.
pub fn random_formula<R: Rng>(rng: &mut R, labels: &[String], scope: &mut Vec<String>, depth: usize, reach: &mut usize, size: usize) -> Formula {
    let pick = |rng: &mut R, scope: &[String]| Term::var(scope.choose(rng).unwrap());
    if size == 0 || (scope.len() >= 1 && rng.gen_bool(0.25) && depth == 0) {
        if scope.is_empty() {
            return if rng.gen() { Formula::True } else { Formula::False };
        }
        let a = pick(rng, scope);
        let b = pick(rng, scope);
        return match rng.gen_range(0..6) {
            0 => Formula::eq(a, b),
            1 | 2 if *reach > 0 => {
                *reach -= 1;
                let k = rng.gen_range(1..=labels.len().min(3));
                let set: BTreeSet<String> = labels.choose_multiple(rng, k).cloned().collect();
                Formula::Reach(set, a, b)
            }
            _ => Formula::edge(labels.choose(rng).unwrap().clone(), a, b),
        };
    }
    let choice = rng.gen_range(0..5);
    if depth > 0 && (choice < 2 || scope.is_empty()) {
        let v = ["x", "y", "z"][scope.len().min(2)].to_string();
        let v = if scope.contains(&v) { format!("{v}{}", scope.len()) } else { v };
        scope.push(v.clone());
        let body = random_formula(rng, labels, scope, depth - 1, reach, size - 1);
        scope.pop();
        return if rng.gen() { Formula::exists(v, body) } else { Formula::forall(v, body) };
    }
    match choice {
        2 => Formula::not(random_formula(rng, labels, scope, depth, reach, size - 1)),
        3 => {
            let a = random_formula(rng, labels, scope, depth, reach, size / 2);
            let b = random_formula(rng, labels, scope, depth, reach, size / 2);
            Formula::and(a, b)
        }
        _ => {
            let a = random_formula(rng, labels, scope, depth, reach, size / 2);
            let b = random_formula(rng, labels, scope, depth, reach, size / 2);
            if rng.gen() { Formula::or(a, b) } else { Formula::implies(a, b) }
        }
    }
}

/// Random sentence with quantifier depth at most 2 and at most 2 reachability atoms.
pub fn random_sentence<R: Rng>(rng: &mut R, labels: &[String]) -> Formula {
    loop {
        let mut reach = 2;
        let f = random_formula(rng, labels, &mut Vec::new(), 2, &mut reach, 6);
        if f.free_vars().is_empty() && f.quantifier_depth() >= 1 {
            return f;
        }
    }
}

/// `random_spec` restricted to tuples of class index at most `max_ind`.
pub fn random_spec_bounded<R: Rng>(rng: &mut R, n: usize, max_states: usize, max_tuples: usize, max_ind: usize) -> ProductSpec {
    loop {
        let spec = random_spec(rng, n, max_states, max_tuples);
        let ok = (0..spec.constraint().len())
            .all(|t| prodcheck::lts::class_index(&spec, &[t]).unwrap() <= max_ind);
        if ok {
            return spec;
        }
    }
}
