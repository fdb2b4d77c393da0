use std::collections::BTreeSet;
use std::fmt;

/// Regular expressions over label identifiers.
///
/// Concrete syntax: `+` is union, `.` concatenation, postfix `*` star,
/// `eps` the empty word and `none` the empty language.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Regex {
    Empty,
    Epsilon,
    Symbol(String),
    Concat(Box<Regex>, Box<Regex>),
    Union(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn symbol(s: impl Into<String>) -> Self {
        Regex::Symbol(s.into())
    }

    pub fn concat(a: Regex, b: Regex) -> Self {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn union(a: Regex, b: Regex) -> Self {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Self {
        Regex::Star(Box::new(a))
    }

    /// Left-nested union of symbols, `none` when empty.
    pub fn any_of<I, S>(symbols: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        symbols
            .into_iter()
            .map(Regex::symbol)
            .reduce(Regex::union)
            .unwrap_or(Regex::Empty)
    }

    pub fn symbols(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<String>) {
        match self {
            Regex::Symbol(s) => {
                out.insert(s.clone());
            }
            Regex::Concat(a, b) | Regex::Union(a, b) => {
                a.collect(out);
                b.collect(out);
            }
            Regex::Star(a) => a.collect(out),
            Regex::Empty | Regex::Epsilon => {}
        }
    }

    /// Membership test by structural recursion (exponential; for tests).
    pub fn matches(&self, word: &[&str]) -> bool {
        match self {
            Regex::Empty => false,
            Regex::Epsilon => word.is_empty(),
            Regex::Symbol(s) => word.len() == 1 && word[0] == s,
            Regex::Union(a, b) => a.matches(word) || b.matches(word),
            Regex::Concat(a, b) => (0..=word.len())
                .any(|i| a.matches(&word[..i]) && b.matches(&word[i..])),
            Regex::Star(a) => {
                word.is_empty()
                    || (1..=word.len()).any(|i| a.matches(&word[..i]) && self.matches(&word[i..]))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Regex::Union(..) => 1,
            Regex::Concat(..) => 2,
            _ => 3,
        }
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, r: &Regex, min: u8) -> fmt::Result {
    if r.precedence() < min {
        write!(f, "({r})")
    } else {
        write!(f, "{r}")
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regex::Empty => f.write_str("none"),
            Regex::Epsilon => f.write_str("eps"),
            Regex::Symbol(s) => f.write_str(s),
            Regex::Union(a, b) => {
                write_child(f, a, 1)?;
                f.write_str("+")?;
                write_child(f, b, 2)
            }
            Regex::Concat(a, b) => {
                write_child(f, a, 2)?;
                f.write_str(".")?;
                write_child(f, b, 3)
            }
            Regex::Star(a) => {
                write_child(f, a, 3)?;
                f.write_str("*")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_small_words() {
        let r = Regex::star(Regex::concat(Regex::symbol("a"), Regex::symbol("b")));
        assert!(r.matches(&[]));
        assert!(r.matches(&["a", "b", "a", "b"]));
        assert!(!r.matches(&["a", "a"]));
        assert_eq!(r.to_string(), "(a.b)*");
    }
}
