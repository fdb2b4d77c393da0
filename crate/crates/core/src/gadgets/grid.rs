//! Bounded successor chains and grids, and arithmetic defined by
//! transitive closure over the successor chain.

use crate::caps::Caps;
use crate::error::{check_cap, Error, Result};
use crate::logic::{Formula, Tc, Term};
use crate::lts::{LabelAlphabet, Lts, ProductSpec, SyncConstraint};

/// Successor label of the chain.
pub const S: &str = "s";
/// Grid successor along the first coordinate.
pub const S1: &str = "s1";
/// Grid successor along the second coordinate.
pub const S2: &str = "s2";

fn chain_with(n: usize, label: &str) -> Result<Lts> {
    let mut g = Lts::new(LabelAlphabet::local_only([label])?);
    for i in 0..=n {
        g.add_vertex(i.to_string());
    }
    for i in 0..n as u32 {
        g.add_edge(label, i, i + 1)?;
    }
    Ok(g)
}

/// `0 → 1 → … → n` under `s`.
pub fn chain(n: usize) -> Result<Lts> {
    chain_with(n, S)
}

/// Vertex name of grid point `(i,j)`.
pub fn point(i: usize, j: usize) -> String {
    format!("({i},{j})")
}

/// The `(n+1)×(n+1)` grid with `s1` to the right and `s2` upward.
pub fn grid(n: usize, caps: &Caps) -> Result<Lts> {
    if n == 0 {
        return Err(Error::InvalidSystem("a grid needs n ≥ 1".into()));
    }
    check_cap("product_vertices", ((n + 1) * (n + 1)) as u128, caps.product_vertices as u128)?;
    let mut g = Lts::new(LabelAlphabet::local_only([S1, S2])?);
    for i in 0..=n {
        for j in 0..=n {
            g.add_vertex(point(i, j));
        }
    }
    let id = |i: usize, j: usize| (i * (n + 1) + j) as u32;
    for i in 0..=n {
        for j in 0..=n {
            if i < n {
                g.add_edge(S1, id(i, j), id(i + 1, j))?;
            }
            if j < n {
                g.add_edge(S2, id(i, j), id(i, j + 1))?;
            }
        }
    }
    Ok(g)
}

/// The grid as the asynchronous product of two chains.
pub fn grid_spec(n: usize) -> Result<ProductSpec> {
    if n == 0 {
        return Err(Error::InvalidSystem("a grid needs n ≥ 1".into()));
    }
    ProductSpec::new(vec![chain_with(n, S1)?, chain_with(n, S2)?], SyncConstraint::new(Vec::new()))
}

fn v(name: &str) -> Term {
    Term::var(name)
}

fn tc2(body: Formula, s: [Term; 2], t: [Term; 2]) -> Formula {
    let tc = Tc::new(
        vec!["u1".into(), "u2".into()],
        vec!["v1".into(), "v2".into()],
        body,
        s.to_vec(),
        t.to_vec(),
    )
    .expect("arity two");
    Formula::tc(tc)
}

/// `b − a = d − c ≥ 1`: both coordinates advance in lockstep.
pub fn diff(a: Term, b: Term, c: Term, d: Term) -> Formula {
    let body = Formula::and(Formula::edge_vars(S, "u1", "v1"), Formula::edge_vars(S, "u2", "v2"));
    tc2(body, [a, c], [b, d])
}

/// `b − a = d − c ≥ 0`.
pub fn diff0(a: Term, b: Term, c: Term, d: Term) -> Formula {
    Formula::or(
        Formula::and(Formula::eq(a.clone(), b.clone()), Formula::eq(c.clone(), d.clone())),
        diff(a, b, c, d),
    )
}

/// `a + b = c`. The closure is strict, so `b = 0` needs its own disjunct.
pub fn plus(a: Term, b: Term, c: Term) -> Formula {
    diff0(Term::constant("0"), b, a, c)
}

/// Pairs `(k², (k+1)²)` for `k ≥ 1`, by iterating
/// `(x₁,x₂) ↦ (x₂, 2x₂ − x₁ + 2)` from `(0,1)`.
pub fn square_pairs(x: Term, y: Term) -> Formula {
    let step = Formula::and(
        Formula::eq_vars("v1", "u2"),
        Formula::exists_all(
            ["w1", "w2"],
            Formula::and_all([
                Formula::edge_vars(S, "u2", "w1"),
                Formula::edge_vars(S, "w1", "w2"),
                diff(v("u1"), v("w2"), v("u2"), v("v2")),
            ]),
        ),
    );
    tc2(step, [Term::constant("0"), Term::constant("1")], [x, y])
}

/// `y = x²`, for `x ≥ 2`; false at `x ∈ {0,1}`.
pub fn square(x: Term, y: Term) -> Formula {
    let halves = Formula::exists(
        "m",
        Formula::and(
            diff0(v("z1"), v("m"), Term::constant("0"), x.clone()),
            diff0(v("m"), v("w"), Term::constant("0"), x),
        ),
    );
    Formula::exists(
        "z1",
        Formula::and(
            square_pairs(v("z1"), y.clone()),
            Formula::exists("w", Formula::and(Formula::edge(S, y, v("w")), halves)),
        ),
    )
}

/// The arithmetic formulas over `(ℕ, s)` with free variables `a,b,c` and `x,y`.
#[derive(Debug, Clone)]
pub struct ArithFormulas {
    pub plus: Formula,
    pub square_pairs: Formula,
    pub square: Formula,
}

pub fn arith_formulas() -> ArithFormulas {
    ArithFormulas {
        plus: plus(v("a"), v("b"), v("c")),
        square_pairs: square_pairs(v("x"), v("y")),
        square: square(v("x"), v("y")),
    }
}

/// Chain length that keeps every witness of `a + b = c` with `a, b ≤ max` inside.
pub fn plus_margin(max: usize) -> usize {
    2 * max + 2
}

/// Chain length that keeps every witness of `y = x²` with `x ≤ max` inside:
/// the square itself, its successor, and two more for the inner step.
pub fn square_margin(max: usize) -> usize {
    max * max + 3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::holds;
    use crate::logic::Formula;

    fn at(f: &Formula, vals: &[(&str, usize)]) -> Formula {
        let names: Vec<(&str, String)> = vals.iter().map(|(k, n)| (*k, n.to_string())).collect();
        f.assign(names.iter().map(|(k, n)| (*k, n.as_str())))
    }

    #[test]
    fn two_by_two_grid() {
        let g = grid(1, &Caps::default()).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges(S1).count(), 2);
        assert_eq!(g.edges(S2).count(), 2);
        assert!(g.has_edge(S1, g.vertex_id("(0,0)").unwrap(), g.vertex_id("(1,0)").unwrap()));
    }

    #[test]
    fn product_is_the_grid() {
        let caps = Caps::default();
        let p = crate::lts::build_product(&grid_spec(3).unwrap(), &caps).unwrap();
        let g = grid(3, &caps).unwrap();
        assert_eq!(p.vertex_names(), g.vertex_names());
        for l in [S1, S2] {
            assert_eq!(p.edge_set(l), g.edge_set(l));
        }
    }

    #[test]
    fn plus_and_square_examples() {
        let caps = Caps::default();
        let f = arith_formulas();
        let g = chain(8).unwrap();
        assert!(holds(&g, &at(&f.plus, &[("a", 2), ("b", 3), ("c", 5)]), &caps).unwrap());
        assert!(holds(&g, &at(&f.plus, &[("a", 2), ("b", 0), ("c", 2)]), &caps).unwrap());
        assert!(!holds(&g, &at(&f.plus, &[("a", 2), ("b", 3), ("c", 6)]), &caps).unwrap());
        let g = chain(16).unwrap();
        assert!(holds(&g, &at(&f.square, &[("x", 3), ("y", 9)]), &caps).unwrap());
        assert!(!holds(&g, &at(&f.square, &[("x", 3), ("y", 8)]), &caps).unwrap());
    }
}
