//! Recursive-descent parser for the ASCII formula syntax.
//!
//! ```text
//! phi   := "true" | "false" | term "=" term | "E" label "(" term "," term ")"
//!        | "Reach" "[" ("{" labels "}" | "re:" regex) "]" "(" term "," term ")"
//!        | "TC" "[" vars (";" vars)? ":" phi "]" "(" terms ")"
//!        | "!" phi | phi "&" phi | phi "|" phi | phi "->" phi
//!        | ("exists" | "forall") var "." phi | "(" phi ")"
//! term  := var | digits | "'" name "'" | "(" name ("," name)* ")"
//! label := ident | "(" ident ("," ident)* ")"
//! ```
//!
//! Precedence is `!` > `&` > `|` > `->`; `->` associates to the right and
//! quantifiers extend as far right as possible.

use std::collections::BTreeSet;

use super::formula::{Formula, Tc, Term};
use super::regex::Regex;
use crate::error::{Error, Result};
use crate::lts::render_tuple;

const KEYWORDS: &[&str] = &[
    "true", "false", "E", "Reach", "TC", "exists", "forall", "re", "eps", "none",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(String),
    Quoted(String),
    Sym(&'static str),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    const SYMBOLS: &[&str] = &[
        "->", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "=", "!", "&", "|", "+", "*",
    ];
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        let (start_line, start_col) = (line, col);
        if c.is_ascii_alphabetic() || c == '_' {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .collect();
            i += s.len();
            col += s.len();
            out.push(Token {
                tok: Tok::Ident(s),
                line: start_line,
                column: start_col,
            });
        } else if c.is_ascii_digit() {
            let s: String = chars[i..]
                .iter()
                .take_while(|c| c.is_ascii_alphanumeric() || **c == '_')
                .collect();
            i += s.len();
            col += s.len();
            out.push(Token {
                tok: Tok::Number(s),
                line: start_line,
                column: start_col,
            });
        } else if c == '\'' {
            let rest: String = chars[i + 1..].iter().take_while(|c| **c != '\'').collect();
            if i + 1 + rest.len() >= chars.len() {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: "unterminated quoted constant".into(),
                });
            }
            i += rest.len() + 2;
            col += rest.chars().count() + 2;
            out.push(Token {
                tok: Tok::Quoted(rest),
                line: start_line,
                column: start_col,
            });
        } else {
            let rest: String = chars[i..].iter().take(2).collect();
            let Some(sym) = SYMBOLS.iter().find(|s| rest.starts_with(**s)) else {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{c}`"),
                });
            };
            i += sym.len();
            col += sym.len();
            out.push(Token {
                tok: Tok::Sym(sym),
                line: start_line,
                column: start_col,
            });
        }
    }
    out.push(Token {
        tok: Tok::End,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        let t = &self.toks[self.pos];
        Err(Error::Syntax {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_ident(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.is_sym(s) {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected `{s}`, found {}", describe(self.peek())))
        }
    }

    fn var(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected a variable, found {}", describe(&other))),
        }
    }

    fn formula(&mut self) -> Result<Formula> {
        self.implication()
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.is_sym("->") {
            self.next();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.conjunction()?;
        while self.is_sym("|") {
            self.next();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while self.is_sym("&") {
            self.next();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.is_sym("!") {
            self.next();
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_ident("exists") || self.is_ident("forall") {
            let exists = self.is_ident("exists");
            self.next();
            let v = self.var()?;
            self.expect_sym(".")?;
            let body = self.formula()?;
            return Ok(if exists {
                Formula::exists(v, body)
            } else {
                Formula::forall(v, body)
            });
        }
        self.atom()
    }

    /// Distinguishes `( phi )` from a tuple constant `(a,b)` used as a term.
    fn paren_is_tuple_term(&self) -> bool {
        let mut depth = 0i32;
        let mut k = 0;
        loop {
            match self.peek_at(k) {
                Tok::Sym("(") => depth += 1,
                Tok::Sym(")") => {
                    depth -= 1;
                    if depth == 0 {
                        return matches!(self.peek_at(k + 1), Tok::Sym("="));
                    }
                }
                Tok::Ident(_) | Tok::Number(_) | Tok::Quoted(_) | Tok::Sym(",") => {}
                _ => return false,
            }
            k += 1;
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" => {
                self.next();
                Ok(Formula::True)
            }
            Tok::Ident(s) if s == "false" => {
                self.next();
                Ok(Formula::False)
            }
            Tok::Ident(s) if s == "E" => {
                self.next();
                let label = self.label()?;
                let (a, b) = self.term_pair()?;
                Ok(Formula::Edge(label, a, b))
            }
            Tok::Ident(s) if s == "Reach" => {
                self.next();
                self.expect_sym("[")?;
                let f = if self.is_ident("re") {
                    self.next();
                    self.expect_sym(":")?;
                    let r = self.regex()?;
                    self.expect_sym("]")?;
                    let (a, b) = self.term_pair()?;
                    Formula::ReachRe(r, a, b)
                } else {
                    self.expect_sym("{")?;
                    let mut labels = BTreeSet::new();
                    if !self.is_sym("}") {
                        loop {
                            labels.insert(self.label()?);
                            if self.is_sym(",") {
                                self.next();
                            } else {
                                break;
                            }
                        }
                    }
                    self.expect_sym("}")?;
                    self.expect_sym("]")?;
                    let (a, b) = self.term_pair()?;
                    Formula::Reach(labels, a, b)
                };
                Ok(f)
            }
            Tok::Ident(s) if s == "TC" => {
                self.next();
                self.tc()
            }
            Tok::Sym("(") if !self.paren_is_tuple_term() => {
                self.next();
                let f = self.formula()?;
                self.expect_sym(")")?;
                Ok(f)
            }
            Tok::Ident(_) | Tok::Number(_) | Tok::Quoted(_) | Tok::Sym("(") => {
                let a = self.term()?;
                self.expect_sym("=")?;
                let b = self.term()?;
                Ok(Formula::Eq(a, b))
            }
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }

    fn tc(&mut self) -> Result<Formula> {
        self.expect_sym("[")?;
        let first = self.var_list()?;
        let (xs, ys) = if self.is_sym(";") {
            self.next();
            (first, self.var_list()?)
        } else {
            if first.len() % 2 != 0 {
                return self.error("TC needs an even number of bound variables");
            }
            let k = first.len() / 2;
            (first[..k].to_vec(), first[k..].to_vec())
        };
        self.expect_sym(":")?;
        let body = self.formula()?;
        self.expect_sym("]")?;
        self.expect_sym("(")?;
        let mut terms = vec![self.term()?];
        while self.is_sym(",") {
            self.next();
            terms.push(self.term()?);
        }
        self.expect_sym(")")?;
        let k = xs.len();
        if terms.len() != 2 * k {
            return self.error(format!(
                "TC of arity {k} is applied to {} terms",
                terms.len()
            ));
        }
        let t = terms.split_off(k);
        match Tc::new(xs, ys, body, terms, t) {
            Ok(tc) => Ok(Formula::tc(tc)),
            Err(e) => self.error(e.to_string()),
        }
    }

    fn var_list(&mut self) -> Result<Vec<String>> {
        let mut vs = vec![self.var()?];
        while self.is_sym(",") {
            self.next();
            vs.push(self.var()?);
        }
        Ok(vs)
    }

    fn label(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Ident(s) if s != "eps" => {
                self.next();
                Ok(s)
            }
            Tok::Number(s) => {
                self.next();
                Ok(s)
            }
            Tok::Sym("(") => {
                self.next();
                let mut parts = Vec::new();
                loop {
                    match self.next() {
                        Tok::Ident(s) | Tok::Number(s) => parts.push(s),
                        other => {
                            self.pos -= 1;
                            return self.error(format!(
                                "expected a label entry, found {}",
                                describe(&other)
                            ));
                        }
                    }
                    if self.is_sym(",") {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect_sym(")")?;
                Ok(render_tuple(&parts))
            }
            other => self.error(format!("expected a label, found {}", describe(&other))),
        }
    }

    fn term_pair(&mut self) -> Result<(Term, Term)> {
        self.expect_sym("(")?;
        let a = self.term()?;
        self.expect_sym(",")?;
        let b = self.term()?;
        self.expect_sym(")")?;
        Ok((a, b))
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                Ok(Term::Var(s))
            }
            Tok::Number(s) | Tok::Quoted(s) => {
                self.next();
                Ok(Term::Const(s))
            }
            Tok::Sym("(") => Ok(Term::Const(self.tuple_constant()?)),
            other => self.error(format!("expected a term, found {}", describe(&other))),
        }
    }

    fn tuple_constant(&mut self) -> Result<String> {
        self.expect_sym("(")?;
        let mut parts = Vec::new();
        loop {
            let part = match self.peek().clone() {
                Tok::Ident(s) | Tok::Number(s) | Tok::Quoted(s) => {
                    self.next();
                    s
                }
                Tok::Sym("(") => self.tuple_constant()?,
                other => {
                    return self.error(format!(
                        "expected a vertex name, found {}",
                        describe(&other)
                    ))
                }
            };
            parts.push(part);
            if self.is_sym(",") {
                self.next();
            } else {
                break;
            }
        }
        self.expect_sym(")")?;
        Ok(render_tuple(&parts))
    }

    fn regex(&mut self) -> Result<Regex> {
        let mut lhs = self.regex_concat()?;
        while self.is_sym("+") {
            self.next();
            let rhs = self.regex_concat()?;
            lhs = Regex::union(lhs, rhs);
        }
        Ok(lhs)
    }

    fn regex_concat(&mut self) -> Result<Regex> {
        let mut lhs = self.regex_star()?;
        while self.is_sym(".") {
            self.next();
            let rhs = self.regex_star()?;
            lhs = Regex::concat(lhs, rhs);
        }
        Ok(lhs)
    }

    fn regex_star(&mut self) -> Result<Regex> {
        let mut r = self.regex_atom()?;
        while self.is_sym("*") {
            self.next();
            r = Regex::star(r);
        }
        Ok(r)
    }

    fn regex_atom(&mut self) -> Result<Regex> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "eps" => {
                self.next();
                Ok(Regex::Epsilon)
            }
            Tok::Ident(s) if s == "none" => {
                self.next();
                Ok(Regex::Empty)
            }
            Tok::Ident(s) | Tok::Number(s) => {
                self.next();
                Ok(Regex::Symbol(s))
            }
            Tok::Sym("(") => {
                let tuple_label = matches!(self.peek_at(1), Tok::Ident(_) | Tok::Number(_))
                    && matches!(self.peek_at(2), Tok::Sym(","));
                if tuple_label {
                    Ok(Regex::Symbol(self.label()?))
                } else {
                    self.next();
                    let r = self.regex()?;
                    self.expect_sym(")")?;
                    Ok(r)
                }
            }
            other => self.error(format!("expected a regex, found {}", describe(&other))),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) | Tok::Number(s) => format!("`{s}`"),
        Tok::Quoted(s) => format!("'{s}'"),
        Tok::Sym(s) => format!("`{s}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses a formula.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(f)
}

/// Parses a regular expression in the `Reach[re: …]` syntax.
pub fn parse_regex(text: &str) -> Result<Regex> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let r = p.regex()?;
    if *p.peek() != Tok::End {
        return p.error(format!("unexpected {}", describe(p.peek())));
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reach_set() {
        assert_eq!(
            parse_formula("Reach[{a,b}](x,y)").unwrap(),
            Formula::reach_vars(["a", "b"], "x", "y")
        );
    }

    #[test]
    fn exists_conjunction() {
        let f = parse_formula("exists z. E a (x,z) & E a (z,y)").unwrap();
        assert_eq!(
            f,
            Formula::exists(
                "z",
                Formula::and(Formula::edge_vars("a", "x", "z"), Formula::edge_vars("a", "z", "y"))
            )
        );
    }

    #[test]
    fn tc_comma_form() {
        let f = parse_formula("TC[u,v : E s1 (u,v)](x, y)").unwrap();
        let Formula::Tc(tc) = f else { panic!() };
        assert_eq!(tc.xs, vec!["u"]);
        assert_eq!(tc.ys, vec!["v"]);
        assert_eq!(tc.s, vec![Term::var("x")]);
    }

    #[test]
    fn tc_semicolon_form_with_constants() {
        let f = parse_formula("TC[x1,x2;y1,y2: E S (x1,y1) & E S (x2,y2)](0,a,b,c)").unwrap();
        let Formula::Tc(tc) = f else { panic!() };
        assert_eq!(tc.arity(), 2);
        assert_eq!(tc.s, vec![Term::constant("0"), Term::var("a")]);
        assert_eq!(tc.t, vec![Term::var("b"), Term::var("c")]);
    }

    #[test]
    fn tuple_constants_and_sync_labels() {
        let f = parse_formula("Reach[{s1,s2}]((0,0),(1,1))").unwrap();
        assert_eq!(
            f,
            Formula::reach(["s1", "s2"], Term::constant("(0,0)"), Term::constant("(1,1)"))
        );
        let g = parse_formula("E (a,eps) (x,y)").unwrap();
        assert_eq!(g, Formula::edge_vars("(a,eps)", "x", "y"));
        let h = parse_formula("(p,q) = x").unwrap();
        assert_eq!(h, Formula::Eq(Term::constant("(p,q)"), Term::var("x")));
        let r = parse_formula("Reach[re: ((a,eps).b)*](x,y)").unwrap();
        let Formula::ReachRe(re, _, _) = r else { panic!() };
        assert_eq!(re.to_string(), "((a,eps).b)*");
    }

    #[test]
    fn precedence_and_sugar() {
        let f = parse_formula("!a = b & c = d | e = f -> g = h -> x = y").unwrap();
        let Formula::Implies(lhs, rhs) = &f else { panic!() };
        assert!(matches!(**lhs, Formula::Or(..)));
        assert!(matches!(**rhs, Formula::Implies(..)));
        let q = parse_formula("forall x. x = y & y = x").unwrap();
        assert!(matches!(q, Formula::Forall(_, ref b) if matches!(**b, Formula::And(..))));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_formula("exists x.\n  E a (x,").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("{other:?}"),
        }
        assert!(parse_formula("x = ").is_err());
        assert!(parse_formula("TC[x,y,z: true](a,b)").is_err());
        assert!(parse_formula("TC[x;x: true](a,b)").is_err());
    }

    #[test]
    fn printer_round_trip_examples() {
        for text in [
            "exists x. (exists y. x = y) & E a (x,y)",
            "!(forall x. Reach[{}](x,x)) | x = 'p q'",
            "TC[x;y: x = y | E a (x,y)](s,t) -> Reach[re:(a+b).c*+eps](s,(p,q))",
            "a = b -> (c = d -> e = f)",
            "(a = b -> c = d) -> e = f",
        ] {
            let f = parse_formula(text).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{text}");
        }
    }
}
