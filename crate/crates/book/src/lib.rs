//! The guide's chapters, compiled as doc comments so `cargo test` runs
//! every snippet against the current library.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}
#[doc = include_str!("../../../book/src/systems.md")]
pub mod systems {}
#[doc = include_str!("../../../book/src/logic.md")]
pub mod logic {}
#[doc = include_str!("../../../book/src/evaluation.md")]
pub mod evaluation {}
#[doc = include_str!("../../../book/src/classes.md")]
pub mod classes {}
#[doc = include_str!("../../../book/src/composition.md")]
pub mod composition {}
#[doc = include_str!("../../../book/src/gadgets.md")]
pub mod gadgets {}
#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}
#[doc = include_str!("../../../README.md")]
pub mod readme {}
