//! Reduction gadgets with bounded explicit expansions.

pub mod grid;
pub mod gtrs;
pub mod pda;
pub mod tm;
pub mod translate;

pub use gtrs::{gtrs_expand, gtrs_expand_with, Arity, Gtrs, Rule, Tree};
pub use pda::{split_2pda, Config2, Pda, Split, TwoPda};
pub use tm::{halts_within, tm_to_gtrs, Config, Dtm, Move, TmGadget};
