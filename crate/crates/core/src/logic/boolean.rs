//! Boolean combinations of opaque atoms.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{check_cap, Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BoolExpr<A> {
    Const(bool),
    Atom(A),
    Not(Box<BoolExpr<A>>),
    And(Vec<BoolExpr<A>>),
    Or(Vec<BoolExpr<A>>),
}

/// A conjunction of literals.
pub type Cube<A> = Vec<(A, bool)>;

impl<A: Clone + Ord> BoolExpr<A> {
    pub fn atom(a: A) -> Self {
        BoolExpr::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Self) -> Self {
        match e {
            BoolExpr::Const(b) => BoolExpr::Const(!b),
            BoolExpr::Not(inner) => *inner,
            other => BoolExpr::Not(Box::new(other)),
        }
    }

    /// Conjunction with flattening and constant folding.
    pub fn and_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        let mut parts = Vec::new();
        for e in items {
            match e {
                BoolExpr::Const(true) => {}
                BoolExpr::Const(false) => return BoolExpr::Const(false),
                BoolExpr::And(es) => parts.extend(es),
                other => parts.push(other),
            }
        }
        match parts.len() {
            0 => BoolExpr::Const(true),
            1 => parts.pop().expect("one part"),
            _ => BoolExpr::And(parts),
        }
    }

    /// Disjunction with flattening and constant folding.
    pub fn or_all<I: IntoIterator<Item = Self>>(items: I) -> Self {
        let mut parts = Vec::new();
        for e in items {
            match e {
                BoolExpr::Const(false) => {}
                BoolExpr::Const(true) => return BoolExpr::Const(true),
                BoolExpr::Or(es) => parts.extend(es),
                other => parts.push(other),
            }
        }
        match parts.len() {
            0 => BoolExpr::Const(false),
            1 => parts.pop().expect("one part"),
            _ => BoolExpr::Or(parts),
        }
    }

    pub fn eval(&self, value: &mut impl FnMut(&A) -> bool) -> bool {
        match self {
            BoolExpr::Const(b) => *b,
            BoolExpr::Atom(a) => value(a),
            BoolExpr::Not(e) => !e.eval(value),
            BoolExpr::And(es) => es.iter().all(|e| e.eval(value)),
            BoolExpr::Or(es) => es.iter().any(|e| e.eval(value)),
        }
    }

    pub fn atoms(&self) -> BTreeSet<A> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<A>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Atom(a) => {
                out.insert(a.clone());
            }
            BoolExpr::Not(e) => e.collect_atoms(out),
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                for e in es {
                    e.collect_atoms(out);
                }
            }
        }
    }

    /// Number of atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            BoolExpr::Const(_) => 0,
            BoolExpr::Atom(_) => 1,
            BoolExpr::Not(e) => e.size(),
            BoolExpr::And(es) | BoolExpr::Or(es) => es.iter().map(BoolExpr::size).sum(),
        }
    }

    /// Partially evaluates under `fixed`, folding constants.
    pub fn restrict(&self, fixed: &BTreeMap<A, bool>) -> Self {
        match self {
            BoolExpr::Const(_) => self.clone(),
            BoolExpr::Atom(a) => match fixed.get(a) {
                Some(b) => BoolExpr::Const(*b),
                None => self.clone(),
            },
            BoolExpr::Not(e) => BoolExpr::not(e.restrict(fixed)),
            BoolExpr::And(es) => BoolExpr::and_all(es.iter().map(|e| e.restrict(fixed))),
            BoolExpr::Or(es) => BoolExpr::or_all(es.iter().map(|e| e.restrict(fixed))),
        }
    }

    pub fn map_atoms<B: Clone + Ord>(&self, f: &mut impl FnMut(&A) -> BoolExpr<B>) -> BoolExpr<B> {
        match self {
            BoolExpr::Const(b) => BoolExpr::Const(*b),
            BoolExpr::Atom(a) => f(a),
            BoolExpr::Not(e) => BoolExpr::not(e.map_atoms(f)),
            BoolExpr::And(es) => BoolExpr::and_all(es.iter().map(|e| e.map_atoms(f))),
            BoolExpr::Or(es) => BoolExpr::or_all(es.iter().map(|e| e.map_atoms(f))),
        }
    }

    /// All total assignments over `universe` that satisfy the expression.
    ///
    /// Fails with a resource error when `2^|universe|` exceeds `cap`.
    pub fn sat_assignments(&self, universe: &[A], cap: u128) -> Result<Vec<BTreeMap<A, bool>>> {
        if self.atoms().iter().any(|a| !universe.contains(a)) {
            return Err(Error::InvalidSystem(
                "Boolean formula mentions atoms outside the universe".into(),
            ));
        }
        let m = universe.len();
        let total = 1u128.checked_shl(m as u32).unwrap_or(u128::MAX);
        check_cap("sat_assignments", total, cap)?;
        let mut out = Vec::new();
        for bits in 0..total {
            let assignment: BTreeMap<A, bool> = universe
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), bits >> i & 1 == 1))
                .collect();
            if self.eval(&mut |a| assignment[a]) {
                out.push(assignment);
            }
        }
        Ok(out)
    }

    /// Pairwise-disjoint cubes whose union is the satisfying set.
    ///
    /// Branches on the most frequent remaining atom; each cube fixes only the
    /// atoms needed to decide the expression.  At most `cap` cubes.
    pub fn cube_cover(&self, cap: u128) -> Result<Vec<Cube<A>>> {
        let mut out = Vec::new();
        let mut fixed = BTreeMap::new();
        self.cover(&mut fixed, &mut Vec::new(), &mut out, cap)?;
        Ok(out)
    }

    fn cover(
        &self,
        fixed: &mut BTreeMap<A, bool>,
        cube: &mut Cube<A>,
        out: &mut Vec<Cube<A>>,
        cap: u128,
    ) -> Result<()> {
        let e = self.restrict(fixed);
        match e {
            BoolExpr::Const(false) => return Ok(()),
            BoolExpr::Const(true) => {
                check_cap("sat_assignments", out.len() as u128 + 1, cap)?;
                out.push(cube.clone());
                return Ok(());
            }
            _ => {}
        }
        let mut counts: BTreeMap<A, usize> = BTreeMap::new();
        e.count_atoms(&mut counts);
        let pivot = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0)))
            .map(|(a, _)| a.clone())
            .expect("non-constant expression has an atom");
        for value in [true, false] {
            fixed.insert(pivot.clone(), value);
            cube.push((pivot.clone(), value));
            e.cover(fixed, cube, out, cap)?;
            cube.pop();
            fixed.remove(&pivot);
        }
        Ok(())
    }

    /// Cubes whose union is the satisfying set, not necessarily disjoint.
    ///
    /// Contradictory and subsumed cubes are dropped.  At most `cap` cubes
    /// at every intermediate step.
    pub fn dnf(&self, cap: u128) -> Result<Vec<Cube<A>>> {
        Ok(self
            .dnf_of(true, cap)?
            .into_iter()
            .map(|c| c.into_iter().collect())
            .collect())
    }

    fn dnf_of(&self, positive: bool, cap: u128) -> Result<Vec<BTreeMap<A, bool>>> {
        match self {
            BoolExpr::Const(b) => Ok(if *b == positive { vec![BTreeMap::new()] } else { Vec::new() }),
            BoolExpr::Atom(a) => Ok(vec![BTreeMap::from([(a.clone(), positive)])]),
            BoolExpr::Not(e) => e.dnf_of(!positive, cap),
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                let conjunctive = matches!(self, BoolExpr::And(_)) == positive;
                if !conjunctive {
                    let mut all = Vec::new();
                    for e in es {
                        all.extend(e.dnf_of(positive, cap)?);
                        check_cap("sat_assignments", all.len() as u128, cap)?;
                    }
                    return Ok(minimize(all));
                }
                let mut acc = vec![BTreeMap::new()];
                for e in es {
                    let part = e.dnf_of(positive, cap)?;
                    check_cap("sat_assignments", acc.len() as u128 * part.len() as u128, cap)?;
                    let mut next = Vec::new();
                    for a in &acc {
                        'pair: for b in &part {
                            let mut c = a.clone();
                            for (k, v) in b {
                                if c.insert(k.clone(), *v).is_some_and(|old| old != *v) {
                                    continue 'pair;
                                }
                            }
                            next.push(c);
                        }
                    }
                    acc = minimize(next);
                    if acc.is_empty() {
                        break;
                    }
                }
                Ok(acc)
            }
        }
    }

    fn count_atoms(&self, counts: &mut BTreeMap<A, usize>) {
        match self {
            BoolExpr::Const(_) => {}
            BoolExpr::Atom(a) => *counts.entry(a.clone()).or_default() += 1,
            BoolExpr::Not(e) => e.count_atoms(counts),
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                for e in es {
                    e.count_atoms(counts);
                }
            }
        }
    }
}

/// Removes duplicate and subsumed cubes.
fn minimize<A: Ord>(mut cubes: Vec<BTreeMap<A, bool>>) -> Vec<BTreeMap<A, bool>> {
    cubes.sort_by_key(BTreeMap::len);
    let mut kept: Vec<BTreeMap<A, bool>> = Vec::new();
    for c in cubes {
        let subsumed = kept
            .iter()
            .any(|k| k.iter().all(|(a, v)| c.get(a) == Some(v)));
        if !subsumed {
            kept.push(c);
        }
    }
    kept
}

impl<A: fmt::Display> BoolExpr<A> {
    fn write(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let prec = match self {
            BoolExpr::Or(_) => 1,
            BoolExpr::And(_) => 2,
            _ => 3,
        };
        if prec < min {
            f.write_str("(")?;
        }
        match self {
            BoolExpr::Const(b) => write!(f, "{b}")?,
            BoolExpr::Atom(a) => write!(f, "{a}")?,
            BoolExpr::Not(e) => {
                f.write_str("!")?;
                e.write(f, 3)?;
            }
            BoolExpr::And(es) | BoolExpr::Or(es) => {
                let sep = if prec == 2 { " & " } else { " | " };
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    e.write(f, prec + 1)?;
                }
            }
        }
        if prec < min {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl<A: fmt::Display> fmt::Display for BoolExpr<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write(f, 0)
    }
}

/// `p<i>(<id>)`: component formula `id` holds at the `i`-th (0-based) coordinate.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PAtom {
    pub component: usize,
    pub id: String,
}

impl PAtom {
    pub fn new(component: usize, id: impl Into<String>) -> Self {
        PAtom {
            component,
            id: id.into(),
        }
    }
}

impl fmt::Display for PAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}({})", self.component, self.id)
    }
}

/// Parses the textual form printed by `Display` for `BoolExpr<PAtom>`.
pub fn parse_bool(text: &str) -> Result<BoolExpr<PAtom>> {
    let mut p = BoolParser {
        chars: text.chars().collect(),
        pos: 0,
    };
    let e = p.or()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return p.error("trailing input");
    }
    Ok(e)
}

struct BoolParser {
    chars: Vec<char>,
    pos: usize,
}

impl BoolParser {
    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.chars.get(self.pos) == Some(&c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: &str) -> Result<T> {
        Err(Error::Syntax {
            line: 1,
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn or(&mut self) -> Result<BoolExpr<PAtom>> {
        let mut parts = vec![self.and()?];
        while self.eat('|') {
            parts.push(self.and()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            BoolExpr::Or(parts)
        })
    }

    fn and(&mut self) -> Result<BoolExpr<PAtom>> {
        let mut parts = vec![self.unary()?];
        while self.eat('&') {
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().expect("one part")
        } else {
            BoolExpr::And(parts)
        })
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_')
        {
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn unary(&mut self) -> Result<BoolExpr<PAtom>> {
        if self.eat('!') {
            return Ok(BoolExpr::Not(Box::new(self.unary()?)));
        }
        if self.eat('(') {
            let e = self.or()?;
            if !self.eat(')') {
                return self.error("expected `)`");
            }
            return Ok(e);
        }
        self.skip_ws();
        let w = self.word();
        match w.as_str() {
            "true" => return Ok(BoolExpr::Const(true)),
            "false" => return Ok(BoolExpr::Const(false)),
            _ => {}
        }
        let Some(index) = w.strip_prefix('p').and_then(|d| d.parse::<usize>().ok()) else {
            return self.error("expected an atom `p<i>(<id>)`");
        };
        if !self.eat('(') {
            return self.error("expected `(`");
        }
        let id = self.word();
        if id.is_empty() || !self.eat(')') {
            return self.error("expected `<id>)`");
        }
        Ok(BoolExpr::Atom(PAtom::new(index, id)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(i: usize, id: &str) -> BoolExpr<PAtom> {
        BoolExpr::atom(PAtom::new(i, id))
    }

    #[test]
    fn eval_and_sat() {
        let e = BoolExpr::and_all([a(0, "x"), a(1, "y")]);
        assert!(e.eval(&mut |_| true));
        let taut = BoolExpr::or_all([a(0, "x"), BoolExpr::not(a(0, "x"))]);
        let sats = taut.sat_assignments(&[PAtom::new(0, "x")], 1 << 20).unwrap();
        assert_eq!(sats.len(), 2);
    }

    #[test]
    fn sat_cap_is_enforced() {
        let universe: Vec<PAtom> = (0..21).map(|i| PAtom::new(i, "x")).collect();
        let err = BoolExpr::Const(true).sat_assignments(&universe, 1 << 20).unwrap_err();
        assert!(matches!(err, Error::Resource { .. }));
    }

    #[test]
    fn print_parse_round_trip() {
        let e = BoolExpr::Or(vec![
            BoolExpr::And(vec![a(0, "ab12"), BoolExpr::Not(Box::new(a(1, "ff")))]),
            BoolExpr::Not(Box::new(BoolExpr::Or(vec![a(2, "x"), BoolExpr::Const(true)]))),
        ]);
        let text = e.to_string();
        assert_eq!(text, "p0(ab12) & !p1(ff) | !(p2(x) | true)");
        assert_eq!(parse_bool(&text).unwrap(), e);
        assert!(parse_bool("p0(").is_err());
        assert!(parse_bool("q(1)").is_err());
    }

    #[test]
    fn cube_cover_is_disjoint_partition() {
        let e = BoolExpr::or_all([
            BoolExpr::and_all([a(0, "x"), a(1, "y")]),
            BoolExpr::not(a(0, "z")),
        ]);
        let cubes = e.cube_cover(1000).unwrap();
        let universe: Vec<PAtom> = e.atoms().into_iter().collect();
        for bits in 0..8u32 {
            let asg: BTreeMap<PAtom, bool> = universe
                .iter()
                .enumerate()
                .map(|(i, p)| (p.clone(), bits >> i & 1 == 1))
                .collect();
            let hits = cubes
                .iter()
                .filter(|c| c.iter().all(|(p, v)| asg[p] == *v))
                .count();
            assert_eq!(hits, usize::from(e.eval(&mut |p| asg[p])));
        }
    }
}
