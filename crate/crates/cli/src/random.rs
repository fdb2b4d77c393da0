//! Seeded generators for differential runs.

use std::collections::BTreeSet;

use prodcheck::lts::{class_index, LabelAlphabet, VertexId};
use prodcheck::{Formula, Lts, ProductSpec, SyncConstraint, SyncTuple, Term};
use rand::seq::SliceRandom;
use rand::Rng;

/// Shape limits for [`random_spec`].
#[derive(Debug, Clone, Copy)]
pub struct SpecShape {
    pub components: (usize, usize),
    pub max_states: usize,
    pub max_tuples: usize,
    pub max_ind: usize,
}

impl Default for SpecShape {
    fn default() -> Self {
        SpecShape {
            components: (2, 3),
            max_states: 6,
            max_tuples: 2,
            max_ind: 3,
        }
    }
}

fn component<R: Rng>(rng: &mut R, states: usize, local: &[String], sync: &[String]) -> Lts {
    let mut g = Lts::new(LabelAlphabet::new(local.iter().cloned(), sync.iter().cloned()).expect("generated labels"));
    for v in 0..states {
        g.add_vertex(v.to_string());
    }
    for l in local.iter().chain(sync) {
        let density = rng.gen_range(0.05..0.4);
        for a in 0..states as VertexId {
            for b in 0..states as VertexId {
                if rng.gen_bool(density) {
                    g.add_edge(l, a, b).expect("declared label");
                }
            }
        }
    }
    g
}

fn attempt<R: Rng>(rng: &mut R, shape: &SpecShape) -> ProductSpec {
    let n = rng.gen_range(shape.components.0..=shape.components.1);
    let local: Vec<Vec<String>> = (0..n)
        .map(|i| (0..rng.gen_range(1..=2)).map(|k| format!("{}{i}", ["a", "b"][k])).collect())
        .collect();
    let sync: Vec<Vec<String>> = (0..n).map(|i| vec![format!("s{i}"), format!("t{i}")]).collect();
    let components = (0..n)
        .map(|i| {
            let states = rng.gen_range(1..=shape.max_states);
            component(rng, states, &local[i], &sync[i])
        })
        .collect();
    let want = rng.gen_range(1..=shape.max_tuples);
    let mut tuples: Vec<SyncTuple> = Vec::new();
    while tuples.len() < want {
        let entries: Vec<String> = sync
            .iter()
            .map(|s| if rng.gen_bool(0.3) { "eps".to_string() } else { s.choose(rng).expect("two letters").clone() })
            .collect();
        let t = SyncTuple(entries);
        if t.0.iter().any(|e| e != "eps") && !tuples.contains(&t) {
            tuples.push(t);
        }
    }
    ProductSpec::new(components, SyncConstraint::new(tuples)).expect("generated spec is well formed")
}

/// Random product whose constraint tuples each have class index at most
/// `shape.max_ind`.
pub fn random_spec<R: Rng>(rng: &mut R, shape: &SpecShape) -> ProductSpec {
    loop {
        let spec = attempt(rng, shape);
        let ok = (0..spec.constraint().len()).all(|t| class_index(&spec, &[t]).is_ok_and(|k| k <= shape.max_ind));
        if ok {
            return spec;
        }
    }
}

/// Local labels and tuple labels of a product.
pub fn product_labels(spec: &ProductSpec) -> Vec<String> {
    let mut out: Vec<String> = spec.local_labels().into_iter().collect();
    out.extend(spec.constraint().tuples.iter().map(SyncTuple::label));
    out
}

struct Gen<'a, R> {
    rng: &'a mut R,
    labels: &'a [String],
    reach: usize,
    scope: Vec<String>,
}

impl<R: Rng> Gen<'_, R> {
    fn var(&mut self) -> Term {
        Term::var(self.scope.choose(self.rng).expect("nonempty scope"))
    }

    fn atom(&mut self) -> Formula {
        if self.scope.is_empty() {
            return if self.rng.gen() { Formula::True } else { Formula::False };
        }
        let (a, b) = (self.var(), self.var());
        match self.rng.gen_range(0..6) {
            0 => Formula::eq(a, b),
            1 | 2 if self.reach > 0 => {
                self.reach -= 1;
                let k = self.rng.gen_range(1..=self.labels.len().min(3));
                let set: BTreeSet<String> = self.labels.choose_multiple(self.rng, k).cloned().collect();
                Formula::Reach(set, a, b)
            }
            _ => Formula::edge(self.labels.choose(self.rng).expect("labels").clone(), a, b),
        }
    }

    fn formula(&mut self, depth: usize, size: usize) -> Formula {
        if size == 0 || (!self.scope.is_empty() && depth == 0 && self.rng.gen_bool(0.25)) {
            return self.atom();
        }
        let choice = self.rng.gen_range(0..5);
        if depth > 0 && (choice < 2 || self.scope.is_empty()) {
            let v = format!("x{}", self.scope.len());
            self.scope.push(v.clone());
            let body = self.formula(depth - 1, size - 1);
            self.scope.pop();
            return if self.rng.gen() { Formula::exists(v, body) } else { Formula::forall(v, body) };
        }
        match choice {
            2 => Formula::not(self.formula(depth, size - 1)),
            3 => Formula::and(self.formula(depth, size / 2), self.formula(depth, size / 2)),
            _ => {
                let (a, b) = (self.formula(depth, size / 2), self.formula(depth, size / 2));
                if self.rng.gen() {
                    Formula::or(a, b)
                } else {
                    Formula::implies(a, b)
                }
            }
        }
    }
}

/// Closed sentence with quantifier depth 1 or 2 and at most two `Reach` atoms.
pub fn random_sentence<R: Rng>(rng: &mut R, labels: &[String]) -> Formula {
    loop {
        let mut g = Gen {
            rng: &mut *rng,
            labels,
            reach: 2,
            scope: Vec::new(),
        };
        let f = g.formula(2, 6);
        if f.free_vars().is_empty() && f.quantifier_depth() >= 1 {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn shapes_are_respected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shape = SpecShape::default();
        for _ in 0..50 {
            let spec = random_spec(&mut rng, &shape);
            assert!((2..=3).contains(&spec.len()));
            assert!(spec.constraint().len() <= 2);
            assert!(spec.components().iter().all(|c| c.vertex_count() <= 6));
            let f = random_sentence(&mut rng, &product_labels(&spec));
            assert!(f.quantifier_depth() <= 2);
            let mut reach = 0;
            f.visit(&mut |g| reach += matches!(g, Formula::Reach(..)) as usize);
            assert!(reach <= 2);
        }
    }
}
