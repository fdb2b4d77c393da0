//! Model checking first-order logic with reachability over synchronized
//! products of labeled transition systems, one component at a time.

pub mod caps;
pub mod compose;
pub mod error;
pub mod eval;
pub mod gadgets;
pub mod logic;
pub mod lts;
pub mod system;

pub use caps::Caps;
pub use error::{Error, Result};
pub use logic::{classify, parse_formula, Formula, Term};
pub use lts::{build_product, Lts, ProductSpec, SyncConstraint, SyncTuple};
