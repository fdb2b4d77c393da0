//! Translations between the grid `(ω², s1, s2)` and the successor chain `(ω, s)`.
//!
//! Grid to chain splits every variable into its two coordinates and doubles
//! closure arities. Chain to grid identifies `n` with `(n,0)` and packs pairs
//! of chain variables into single grid points, halving closure arities.

use std::collections::BTreeSet;

use super::grid::{S, S1, S2};
use crate::error::{Error, Result};
use crate::logic::{recognize_reach, Formula, Tc, Term};
use crate::lts::split_tuple;

struct Names {
    used: BTreeSet<String>,
}

impl Names {
    fn new(f: &Formula) -> Self {
        Names { used: f.all_vars() }
    }

    fn fresh(&mut self, base: &str) -> String {
        let v = crate::logic::fresh_var(base, &self.used);
        self.used.insert(v.clone());
        v
    }
}

// Grid to chain.

fn coords(v: &str) -> (String, String) {
    (format!("{v}_1"), format!("{v}_2"))
}

fn split_term(t: &Term) -> Result<(Term, Term)> {
    match t {
        Term::Var(v) => {
            let (a, b) = coords(v);
            Ok((Term::Var(a), Term::Var(b)))
        }
        Term::Const(c) => match split_tuple(c).as_deref() {
            Some([i, j]) => Ok((Term::constant(*i), Term::constant(*j))),
            _ => Err(Error::UnknownVertex(c.clone())),
        },
    }
}

/// Grid formula to an equivalent chain formula: `x` becomes `x_1, x_2`.
///
/// Verdicts agree between `grid(n)` and `chain(n)` for every `n`, since the
/// bounded grid is exactly the product of two bounded chains.
pub fn translate_grid_to_n(f: &Formula) -> Result<Formula> {
    let clash = f
        .all_vars()
        .into_iter()
        .find(|v| f.all_vars().contains(&coords(v).0) || f.all_vars().contains(&coords(v).1));
    if let Some(v) = clash {
        return Err(Error::Unsupported(format!("variable `{v}` clashes with a coordinate name")));
    }
    to_n(f)
}

fn to_n(f: &Formula) -> Result<Formula> {
    let pair = |a: &Term, b: &Term| -> Result<((Term, Term), (Term, Term))> { Ok((split_term(a)?, split_term(b)?)) };
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => {
            let ((a1, a2), (b1, b2)) = pair(a, b)?;
            Formula::and(Formula::eq(a1, b1), Formula::eq(a2, b2))
        }
        Formula::Edge(l, a, b) => {
            let ((a1, a2), (b1, b2)) = pair(a, b)?;
            match l.as_str() {
                S1 => Formula::and(Formula::edge(S, a1, b1), Formula::eq(a2, b2)),
                S2 => Formula::and(Formula::eq(a1, b1), Formula::edge(S, a2, b2)),
                _ => return Err(Error::UnknownLabel(l.clone())),
            }
        }
        Formula::Reach(ls, a, b) => {
            if let Some(l) = ls.iter().find(|l| *l != S1 && *l != S2) {
                return Err(Error::UnknownLabel(l.clone()));
            }
            let ((a1, a2), (b1, b2)) = pair(a, b)?;
            let along = |yes: bool, x: Term, y: Term| {
                if yes {
                    Formula::reach([S], x, y)
                } else {
                    Formula::eq(x, y)
                }
            };
            if ls.is_empty() {
                return Ok(Formula::and(Formula::Reach(BTreeSet::new(), a1, b1), Formula::eq(a2, b2)));
            }
            Formula::and(along(ls.contains(S1), a1, b1), along(ls.contains(S2), a2, b2))
        }
        Formula::ReachRe(..) => {
            return Err(Error::Unsupported("regular reachability has no coordinate split".into()))
        }
        Formula::Tc(tc) => {
            let split_vars = |vs: &[String]| vs.iter().flat_map(|v| <[String; 2]>::from(coords(v))).collect();
            let split_terms = |ts: &[Term]| -> Result<Vec<Term>> {
                Ok(ts
                    .iter()
                    .map(split_term)
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flat_map(<[Term; 2]>::from)
                    .collect())
            };
            Formula::tc(Tc::new(
                split_vars(&tc.xs),
                split_vars(&tc.ys),
                to_n(&tc.body)?,
                split_terms(&tc.s)?,
                split_terms(&tc.t)?,
            )?)
        }
        Formula::Not(a) => Formula::not(to_n(a)?),
        Formula::And(a, b) => Formula::and(to_n(a)?, to_n(b)?),
        Formula::Or(a, b) => Formula::or(to_n(a)?, to_n(b)?),
        Formula::Implies(a, b) => Formula::implies(to_n(a)?, to_n(b)?),
        Formula::Exists(v, a) => {
            let (v1, v2) = coords(v);
            Formula::exists(v1, Formula::exists(v2, to_n(a)?))
        }
        Formula::Forall(v, a) => {
            let (v1, v2) = coords(v);
            Formula::forall(v1, Formula::forall(v2, to_n(a)?))
        }
    })
}

// Chain to grid: the definable operations.

fn var(v: &str) -> Term {
    Term::var(v)
}

/// `x` lies on the bottom row.
pub fn row0(x: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    let z = names("z");
    Formula::not(Formula::exists(z.clone(), Formula::edge(S2, var(&z), x)))
}

/// `x` lies on the leftmost column.
pub fn col0(x: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    let z = names("z");
    Formula::not(Formula::exists(z.clone(), Formula::edge(S1, var(&z), x)))
}

/// `π₁(x) = y`: `y = (x₁,0)`.
pub fn pi1(x: Term, y: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    Formula::and(Formula::reach([S2], y.clone(), x), row0(y, names))
}

/// `π₂(x) = y`: `y = (0,x₂)`.
pub fn pi2(x: Term, y: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    Formula::and(Formula::reach([S1], y.clone(), x), col0(y, names))
}

/// `swap₁(x) = y`: `x = (k,0)` and `y = (0,k)`.
pub fn swap1(x: Term, y: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    let (a, b, z) = (names("a"), names("b"), names("z"));
    let diagonal = Tc::new(
        vec![a.clone()],
        vec![b.clone()],
        Formula::exists(
            z.clone(),
            Formula::and(Formula::edge(S1, var(&a), var(&z)), Formula::edge(S2, var(&b), var(&z))),
        ),
        vec![y.clone()],
        vec![x.clone()],
    )
    .expect("arity one");
    Formula::and_all([
        row0(x.clone(), names),
        col0(y.clone(), names),
        Formula::or(Formula::eq(x, y), Formula::tc(diagonal)),
    ])
}

/// `swap₂(x) = y`: `x = (0,k)` and `y = (k,0)`.
pub fn swap2(x: Term, y: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    swap1(y, x, names)
}

/// `comb(x, y) = z`: `x = (a,0)`, `y = (0,b)`, `z = (a,b)`.
pub fn comb(x: Term, y: Term, z: Term, names: &mut impl FnMut(&str) -> String) -> Formula {
    Formula::and_all([
        row0(x.clone(), names),
        col0(y.clone(), names),
        Formula::reach([S2], x, z.clone()),
        Formula::reach([S1], y, z),
    ])
}

fn embed_term(t: &Term) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::Const(c) => Term::constant(format!("({c},0)")),
    }
}

/// Chain formula to an equivalent grid formula over the bottom row.
///
/// Closure operators must have even arity, except reachability patterns,
/// which map to `Reach` along `s1`.
pub fn translate_n_to_grid(f: &Formula) -> Result<Formula> {
    let mut names = Names::new(f);
    to_grid(f, &mut names)
}

fn to_grid(f: &Formula, names: &mut Names) -> Result<Formula> {
    Ok(match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Eq(a, b) => Formula::eq(embed_term(a), embed_term(b)),
        Formula::Edge(l, a, b) if l == S => Formula::edge(S1, embed_term(a), embed_term(b)),
        Formula::Edge(l, ..) => return Err(Error::UnknownLabel(l.clone())),
        Formula::Reach(ls, a, b) => {
            if let Some(l) = ls.iter().find(|l| *l != S) {
                return Err(Error::UnknownLabel(l.clone()));
            }
            let ls: BTreeSet<String> = ls.iter().map(|_| S1.to_string()).collect();
            Formula::Reach(ls, embed_term(a), embed_term(b))
        }
        Formula::ReachRe(..) => {
            return Err(Error::Unsupported("regular reachability is not translated".into()))
        }
        Formula::Tc(tc) => {
            if let Some(ls) = recognize_reach(tc) {
                return to_grid(&Formula::Reach(ls, tc.s[0].clone(), tc.t[0].clone()), names);
            }
            return pack_tc(tc, names);
        }
        Formula::Not(a) => Formula::not(to_grid(a, names)?),
        Formula::And(a, b) => Formula::and(to_grid(a, names)?, to_grid(b, names)?),
        Formula::Or(a, b) => Formula::or(to_grid(a, names)?, to_grid(b, names)?),
        Formula::Implies(a, b) => Formula::implies(to_grid(a, names)?, to_grid(b, names)?),
        Formula::Exists(v, a) => {
            let guard = row0(var(v), &mut |b: &str| names.fresh(b));
            Formula::exists(v.clone(), Formula::and(guard, to_grid(a, names)?))
        }
        Formula::Forall(v, a) => {
            let guard = row0(var(v), &mut |b: &str| names.fresh(b));
            Formula::forall(v.clone(), Formula::implies(guard, to_grid(a, names)?))
        }
    })
}

/// `[TC_{x̄,ȳ} φ](s̄,t̄)` of arity `2k` as an arity-`k` closure over packed points.
fn pack_tc(tc: &Tc, names: &mut Names) -> Result<Formula> {
    let k2 = tc.arity();
    if k2 % 2 != 0 {
        return Err(Error::Arity(format!("closure of odd arity {k2} cannot be packed")));
    }
    let k = k2 / 2;
    let us: Vec<String> = (0..k).map(|_| names.fresh("u")).collect();
    let vs: Vec<String> = (0..k).map(|_| names.fresh("v")).collect();
    let mut fresh = |b: &str| names.fresh(b);

    // x_{2i-1} = π₁(u_i), x_{2i} = swap₂(π₂(u_i)), likewise for y and v.
    let mut unpack = Vec::new();
    for (packed, plain) in [(&us, &tc.xs), (&vs, &tc.ys)] {
        for i in 0..k {
            let p = fresh("p");
            unpack.push(pi1(var(&packed[i]), var(&plain[2 * i]), &mut fresh));
            let second = Formula::and(
                pi2(var(&packed[i]), var(&p), &mut fresh),
                swap2(var(&p), var(&plain[2 * i + 1]), &mut fresh),
            );
            unpack.push(Formula::exists(p, second));
        }
    }
    let body = to_grid(&tc.body, names)?;
    let plain: Vec<String> = tc.xs.iter().chain(&tc.ys).cloned().collect();
    let step = Formula::exists_all(plain, Formula::and(Formula::and_all(unpack), body));

    let mut fresh = |b: &str| names.fresh(b);
    // u_i = comb(s_{2i-1}, swap₁(s_{2i})), likewise v_i from t̄.
    let mut pack = Vec::new();
    for (packed, terms) in [(&us, &tc.s), (&vs, &tc.t)] {
        for i in 0..k {
            let w = fresh("w");
            let swapped = swap1(embed_term(&terms[2 * i + 1]), var(&w), &mut fresh);
            let combined = comb(embed_term(&terms[2 * i]), var(&w), var(&packed[i]), &mut fresh);
            pack.push(Formula::exists(w, Formula::and(swapped, combined)));
        }
    }
    let closure = Tc::new(
        us.clone(),
        vs.clone(),
        step,
        us.iter().map(|u| var(u)).collect(),
        vs.iter().map(|v| var(v)).collect(),
    )?;
    let outer: Vec<String> = us.iter().chain(&vs).cloned().collect();
    Ok(Formula::exists_all(outer, Formula::and(Formula::and_all(pack), Formula::tc(closure))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::caps::Caps;
    use crate::eval::eval;
    use crate::gadgets::grid::{chain, grid, point};
    use crate::logic::parse_formula;
    use std::collections::BTreeMap;

    fn fresh_counter() -> impl FnMut(&str) -> String {
        let mut n = 0;
        move |b: &str| {
            n += 1;
            format!("{b}_{n}")
        }
    }

    #[test]
    fn reach_along_s1_round_trip() {
        let caps = Caps::default();
        let f = parse_formula("Reach[{s1}](x, y)").unwrap();
        let t = translate_grid_to_n(&f).unwrap();
        let gr = grid(8, &caps).unwrap();
        let ch = chain(8).unwrap();
        for (a, b, c, d) in [(0, 0, 3, 0), (2, 1, 2, 4), (5, 5, 3, 5), (1, 7, 8, 7)] {
            let on_grid = eval(
                &gr,
                &f,
                &BTreeMap::from([
                    ("x".into(), gr.vertex_id(&point(a, b)).unwrap()),
                    ("y".into(), gr.vertex_id(&point(c, d)).unwrap()),
                ]),
                &caps,
            )
            .unwrap();
            let on_chain = eval(
                &ch,
                &t,
                &BTreeMap::from([
                    ("x_1".into(), a as u32),
                    ("x_2".into(), b as u32),
                    ("y_1".into(), c as u32),
                    ("y_2".into(), d as u32),
                ]),
                &caps,
            )
            .unwrap();
            assert_eq!(on_grid, on_chain);
        }
    }

    #[test]
    fn swap_and_comb_on_small_grids() {
        let caps = Caps::default();
        let mut names = fresh_counter();
        let sw = swap1(var("x"), var("y"), &mut names);
        for k in 0..=3usize {
            let g = grid((2 * k).max(1), &caps).unwrap();
            let rel = crate::eval::sat_relation(&g, &sw, &caps).unwrap();
            let x = rel.column("x").unwrap();
            let pairs: Vec<(String, String)> = rel
                .rows()
                .iter()
                .map(|r| (g.vertex_name(r[x]).to_string(), g.vertex_name(r[1 - x]).to_string()))
                .filter(|(a, _)| *a == point(k, 0))
                .collect();
            assert_eq!(pairs, vec![(point(k, 0), point(0, k))]);
        }
        let g = grid(12, &caps).unwrap();
        let c = comb(var("x"), var("y"), var("z"), &mut names);
        for (a, b) in [(0, 0), (3, 5), (5, 2)] {
            let asg = BTreeMap::from([
                ("x".into(), g.vertex_id(&point(a, 0)).unwrap()),
                ("y".into(), g.vertex_id(&point(0, b)).unwrap()),
                ("z".into(), g.vertex_id(&point(a, b)).unwrap()),
            ]);
            assert!(eval(&g, &c, &asg, &caps).unwrap());
        }
    }

    #[test]
    fn odd_arity_is_rejected() {
        let f = parse_formula("TC[a;b: E s (a, b) & E s (b, a)](x, y)").unwrap();
        assert!(matches!(translate_n_to_grid(&f), Err(Error::Arity(_))));
    }
}
