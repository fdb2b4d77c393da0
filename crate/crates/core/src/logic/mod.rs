//! Formulas of first-order logic with reachability, regular reachability
//! and transitive closure, plus Boolean combinations of opaque atoms.

mod boolean;
mod formula;
mod fragment;
mod parser;
mod regex;
mod transform;

pub use boolean::{parse_bool, BoolExpr, Cube, PAtom};
pub use formula::{fresh_var, Formula, Tc, Term};
pub use fragment::{classify, desugar_reach, reach_as_tc, recognize_reach, Family, FragmentDescriptor};
pub use parser::{parse_formula, parse_regex};
pub use regex::Regex;
pub use transform::{canonical_text, canonicalize, negate, normalize};
