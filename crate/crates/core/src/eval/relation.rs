use std::collections::{BTreeSet, HashMap};

use smallvec::SmallVec;

use crate::error::{check_cap, Result};
use crate::lts::VertexId;

pub type Row = SmallVec<[VertexId; 4]>;

/// A finite relation over named columns; columns are kept sorted by name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    vars: Vec<String>,
    rows: BTreeSet<Row>,
}

impl Relation {
    /// The 0-ary relation: `{()}` when `value`, `{}` otherwise.
    pub fn boolean(value: bool) -> Self {
        let mut rows = BTreeSet::new();
        if value {
            rows.insert(Row::new());
        }
        Relation {
            vars: Vec::new(),
            rows,
        }
    }

    /// Builds a relation from rows whose columns follow `vars` (any order).
    pub fn from_rows<I>(vars: Vec<String>, rows: I) -> Self
    where
        I: IntoIterator<Item = Row>,
    {
        let mut order: Vec<usize> = (0..vars.len()).collect();
        order.sort_by(|&a, &b| vars[a].cmp(&vars[b]));
        let sorted: Vec<String> = order.iter().map(|&i| vars[i].clone()).collect();
        let identity = order.iter().enumerate().all(|(i, &j)| i == j);
        let rows = rows
            .into_iter()
            .map(|r| {
                if identity {
                    r
                } else {
                    order.iter().map(|&i| r[i]).collect()
                }
            })
            .collect();
        let mut rel = Relation { vars: sorted, rows };
        rel.dedup_columns();
        rel
    }

    /// Repeated column names in `from_rows` input mean equality constraints.
    fn dedup_columns(&mut self) {
        if self.vars.windows(2).all(|w| w[0] != w[1]) {
            return;
        }
        let mut keep = Vec::new();
        let mut pairs = Vec::new();
        for i in 0..self.vars.len() {
            if i > 0 && self.vars[i] == self.vars[i - 1] {
                pairs.push((*keep.last().expect("previous column"), i));
            } else {
                keep.push(i);
            }
        }
        let rows = std::mem::take(&mut self.rows);
        self.rows = rows
            .into_iter()
            .filter(|r| pairs.iter().all(|&(a, b)| r[a] == r[b]))
            .map(|r| keep.iter().map(|&i| r[i]).collect())
            .collect();
        self.vars = keep.iter().map(|&i| self.vars[i].clone()).collect();
    }

    /// All `n^|vars|` rows.
    pub fn full(vars: Vec<String>, n: usize, cap: u64) -> Result<Self> {
        let rows = all_rows(vars.len(), n, cap)?;
        Ok(Relation::from_rows(vars, rows))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn rows(&self) -> &BTreeSet<Row> {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Truth value of a 0-ary relation; nonemptiness otherwise.
    pub fn holds(&self) -> bool {
        !self.rows.is_empty()
    }

    pub fn column(&self, var: &str) -> Option<usize> {
        self.vars.binary_search_by(|v| v.as_str().cmp(var)).ok()
    }

    pub fn contains(&self, row: &[VertexId]) -> bool {
        self.rows.contains(&Row::from_slice(row))
    }

    /// Natural join on shared column names.
    pub fn join(&self, other: &Relation, cap: u64) -> Result<Relation> {
        let shared: Vec<String> = self
            .vars
            .iter()
            .filter(|v| other.column(v).is_some())
            .cloned()
            .collect();
        let (left_key, right_key): (Vec<usize>, Vec<usize>) = shared
            .iter()
            .map(|v| (self.column(v).expect("shared"), other.column(v).expect("shared")))
            .unzip();
        let right_rest: Vec<usize> = (0..other.vars.len())
            .filter(|i| !right_key.contains(i))
            .collect();
        let mut index: HashMap<Row, Vec<&Row>> = HashMap::new();
        for r in &other.rows {
            index
                .entry(right_key.iter().map(|&i| r[i]).collect())
                .or_default()
                .push(r);
        }
        let mut vars = self.vars.clone();
        vars.extend(right_rest.iter().map(|&i| other.vars[i].clone()));
        let mut rows = Vec::new();
        for l in &self.rows {
            let key: Row = left_key.iter().map(|&i| l[i]).collect();
            if let Some(matches) = index.get(&key) {
                check_cap("tuples", (rows.len() + matches.len()) as u128, cap as u128)?;
                for r in matches {
                    let mut row = l.clone();
                    row.extend(right_rest.iter().map(|&i| r[i]));
                    rows.push(row);
                }
            }
        }
        Ok(Relation::from_rows(vars, rows))
    }

    /// Rows of `self` with no partner in `other`; `other.vars ⊆ self.vars`.
    pub fn anti_join(&self, other: &Relation) -> Relation {
        let key: Vec<usize> = other
            .vars
            .iter()
            .map(|v| self.column(v).expect("anti-join columns are covered"))
            .collect();
        let rows = self
            .rows
            .iter()
            .filter(|r| {
                let k: Row = key.iter().map(|&i| r[i]).collect();
                !other.rows.contains(&k)
            })
            .cloned()
            .collect();
        Relation {
            vars: self.vars.clone(),
            rows,
        }
    }

    /// Semi-join: rows of `self` that have a partner in `other`; `other.vars ⊆ self.vars`.
    pub fn semi_join(&self, other: &Relation) -> Relation {
        let key: Vec<usize> = other
            .vars
            .iter()
            .map(|v| self.column(v).expect("semi-join columns are covered"))
            .collect();
        let rows = self
            .rows
            .iter()
            .filter(|r| {
                let k: Row = key.iter().map(|&i| r[i]).collect();
                other.rows.contains(&k)
            })
            .cloned()
            .collect();
        Relation {
            vars: self.vars.clone(),
            rows,
        }
    }

    /// Adds the missing `vars` as unconstrained columns over `0..n`.
    pub fn extend_to(&self, vars: &BTreeSet<String>, n: usize, cap: u64) -> Result<Relation> {
        let missing: Vec<String> = vars
            .iter()
            .filter(|v| self.column(v).is_none())
            .cloned()
            .collect();
        if missing.is_empty() {
            return Ok(self.clone());
        }
        let pad = Relation::full(missing, n, cap)?;
        check_cap("tuples", (self.len() as u128) * (pad.len() as u128), cap as u128)?;
        self.join(&pad, cap)
    }

    pub fn union(&self, other: &Relation, n: usize, cap: u64) -> Result<Relation> {
        let vars: BTreeSet<String> = self.vars.iter().chain(&other.vars).cloned().collect();
        let mut a = self.extend_to(&vars, n, cap)?;
        let b = other.extend_to(&vars, n, cap)?;
        a.rows.extend(b.rows);
        Ok(a)
    }

    pub fn complement(&self, n: usize, cap: u64) -> Result<Relation> {
        let rows: BTreeSet<Row> = all_rows(self.vars.len(), n, cap)?
            .filter(|r| !self.rows.contains(r))
            .collect();
        Ok(Relation {
            vars: self.vars.clone(),
            rows,
        })
    }

    /// Existential projection of one column.
    pub fn project_out(&self, var: &str) -> Relation {
        let Some(c) = self.column(var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(c);
        let rows = self
            .rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                r.remove(c);
                r
            })
            .collect();
        Relation { vars, rows }
    }

    /// Universal projection: rows whose extensions cover every `var` value in `0..n`.
    pub fn forall_out(&self, var: &str, n: usize) -> Relation {
        let Some(c) = self.column(var) else {
            return self.clone();
        };
        let mut counts: HashMap<Row, usize> = HashMap::new();
        for r in &self.rows {
            let mut r = r.clone();
            r.remove(c);
            *counts.entry(r).or_default() += 1;
        }
        let mut vars = self.vars.clone();
        vars.remove(c);
        Relation {
            vars,
            rows: counts
                .into_iter()
                .filter(|&(_, k)| k == n)
                .map(|(r, _)| r)
                .collect(),
        }
    }

    /// Keeps the rows whose `var` column equals `value`, dropping the column.
    pub fn select(&self, var: &str, value: VertexId) -> Relation {
        let Some(c) = self.column(var) else {
            return self.clone();
        };
        let mut vars = self.vars.clone();
        vars.remove(c);
        let rows = self
            .rows
            .iter()
            .filter(|r| r[c] == value)
            .map(|r| {
                let mut r = r.clone();
                r.remove(c);
                r
            })
            .collect();
        Relation { vars, rows }
    }
}

fn all_rows(arity: usize, n: usize, cap: u64) -> Result<impl Iterator<Item = Row>> {
    let total = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    check_cap("tuples", total, cap as u128)?;
    let total = total as u64;
    Ok((0..total).map(move |mut code| {
        let mut row = Row::from_elem(0, arity);
        for slot in row.iter_mut().rev() {
            *slot = (code % n as u64) as VertexId;
            code /= n as u64;
        }
        row
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(vars: &[&str], rows: &[&[u32]]) -> Relation {
        Relation::from_rows(
            vars.iter().map(|s| s.to_string()).collect(),
            rows.iter().map(|r| Row::from_slice(r)),
        )
    }

    #[test]
    fn columns_are_sorted() {
        let r = rel(&["y", "x"], &[&[1, 2]]);
        assert_eq!(r.vars(), ["x", "y"]);
        assert!(r.contains(&[2, 1]));
    }

    #[test]
    fn repeated_columns_filter() {
        let r = rel(&["x", "x"], &[&[1, 1], &[1, 2]]);
        assert_eq!(r.vars(), ["x"]);
        assert_eq!(r.len(), 1);
    }

    #[test]
    fn join_union_complement() {
        let a = rel(&["x", "y"], &[&[0, 1], &[1, 2]]);
        let b = rel(&["y", "z"], &[&[1, 0], &[2, 2]]);
        let j = a.join(&b, 100).unwrap();
        assert_eq!(j.vars(), ["x", "y", "z"]);
        assert_eq!(j.len(), 2);
        let u = a.union(&b, 3, 100).unwrap();
        assert_eq!(u.vars(), ["x", "y", "z"]);
        assert_eq!(u.len(), 10);
        let c = a.complement(3, 100).unwrap();
        assert_eq!(c.len(), 7);
        assert!(a.complement(3, 5).is_err());
        assert_eq!(a.project_out("x").len(), 2);
        let all = Relation::full(vec!["x".into(), "y".into()], 3, 100).unwrap();
        assert_eq!(all.forall_out("y", 3).len(), 3);
        assert_eq!(a.forall_out("y", 3).len(), 0);
    }
}
