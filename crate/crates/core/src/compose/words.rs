//! Synchronization words: which sequences of constraint tuples a
//! `Reach_Γ` atom has to consider.

use std::collections::{BTreeSet, HashSet, VecDeque};

use crate::error::{check_cap, Result};
use crate::lts::{ProductSpec, VertexId};

/// Square Boolean matrix, rows packed into `u64` words.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct BitMatrix {
    n: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    fn zero(n: usize) -> Self {
        let stride = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            stride,
            bits: vec![0; n * stride],
        }
    }

    fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.set(i, i);
        }
        m
    }

    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    fn mul(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = Self::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                if self.get(i, j) {
                    let src = other.row(j).to_vec();
                    for (d, s) in out.bits[i * self.stride..(i + 1) * self.stride]
                        .iter_mut()
                        .zip(src)
                    {
                        *d |= s;
                    }
                }
            }
        }
        out
    }

    fn from_edges(n: usize, edges: impl Iterator<Item = (VertexId, VertexId)>) -> Self {
        let mut m = Self::zero(n);
        for (a, b) in edges {
            m.set(a as usize, b as usize);
        }
        m
    }

    /// Reflexive-transitive closure.
    fn star(&self) -> BitMatrix {
        let mut acc = Self::identity(self.n);
        loop {
            let next = acc.mul(&self.plus_identity());
            if next == acc {
                return acc;
            }
            acc = next;
        }
    }

    fn plus_identity(&self) -> BitMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.set(i, i);
        }
        m
    }
}

/// One shortest representative per distinct tuple of component relations
/// `(L*·(E_{c₁}·L*)·…·(E_{cₘ}·L*))ᵢ`, as sequences of tuple indices.
///
/// Two words with the same relation tuple are interchangeable inside a
/// reachability atom, so the result is exact for these components.
pub fn representative_words(
    spec: &ProductSpec,
    locals: &[BTreeSet<String>],
    subset: &[usize],
    cap: u64,
) -> Result<Vec<Vec<usize>>> {
    let n = spec.len();
    let base: Vec<BitMatrix> = (0..n)
        .map(|i| {
            let g = spec.component(i);
            let local = BitMatrix::from_edges(
                g.vertex_count(),
                locals[i].iter().flat_map(|l| g.edges(l)),
            );
            local.star()
        })
        .collect();
    // step[t][i] = E_{c_i}·L*, or None when component i stays put.
    let steps: Vec<Vec<Option<BitMatrix>>> = subset
        .iter()
        .map(|&t| {
            let tuple = &spec.constraint().tuples[t];
            (0..n)
                .map(|i| {
                    tuple.entry(i).map(|letter| {
                        let g = spec.component(i);
                        BitMatrix::from_edges(g.vertex_count(), g.edges(letter)).mul(&base[i])
                    })
                })
                .collect()
        })
        .collect();

    let mut seen: HashSet<Vec<BitMatrix>> = HashSet::new();
    let mut words = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(base.clone());
    queue.push_back((base, Vec::new()));
    while let Some((image, word)) = queue.pop_front() {
        check_cap("sync_words", words.len() as u128 + 1, cap as u128)?;
        for (k, step) in steps.iter().enumerate() {
            let next: Vec<BitMatrix> = image
                .iter()
                .zip(step)
                .map(|(m, s)| match s {
                    Some(s) => m.mul(s),
                    None => m.clone(),
                })
                .collect();
            if seen.insert(next.clone()) {
                let mut w: Vec<usize> = word.clone();
                w.push(subset[k]);
                queue.push_back((next, w));
            }
        }
        words.push(word);
    }
    Ok(words)
}

/// Every word over `subset` of length at most `depth`.
pub fn bounded_words(subset: &[usize], depth: u128, cap: u64) -> Result<Vec<Vec<usize>>> {
    let k = subset.len() as u128;
    let total = if k == 1 {
        depth.saturating_add(1)
    } else {
        let mut t: u128 = 0;
        let mut layer: u128 = 1;
        for _ in 0..=depth.min(200) {
            t = t.saturating_add(layer);
            layer = layer.saturating_mul(k);
        }
        if depth > 200 {
            u128::MAX
        } else {
            t
        }
    };
    check_cap("sync_words", total, cap as u128)?;
    let mut words = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for w in &frontier {
            for &t in subset {
                let mut w2: Vec<usize> = w.clone();
                w2.push(t);
                next.push(w2);
            }
        }
        words.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure() {
        let m = BitMatrix::from_edges(3, [(0, 1), (1, 2)].into_iter());
        let s = m.star();
        assert!(s.get(0, 2) && s.get(1, 1) && !s.get(2, 0));
    }

    #[test]
    fn bounded_word_count() {
        assert_eq!(bounded_words(&[0, 1], 2, 100).unwrap().len(), 7);
        assert_eq!(bounded_words(&[3], 4, 100).unwrap().len(), 5);
        assert!(bounded_words(&[0, 1], 10, 100).is_err());
    }
}
