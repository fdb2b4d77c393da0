use serde::{Deserialize, Serialize};

/// Resource limits shared by every expensive operation.
///
/// Exceeding any of them is reported as [`crate::Error::Resource`]; nothing is
/// silently truncated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Caps {
    /// Maximum number of vertices of a materialized product.
    pub product_vertices: u64,
    /// Maximum number of tuples enumerated for one relation (`|V|^k`).
    pub tuples: u64,
    /// Maximum number of synchronization words per reachability atom.
    pub sync_words: u64,
    /// Maximum number of satisfying assignments / cubes enumerated for one quantifier.
    pub sat_assignments: u64,
    /// Maximum number of vertices produced by a bounded gadget expansion.
    pub expansion: u64,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            product_vertices: 1_000_000,
            tuples: 10_000_000,
            sync_words: 100_000,
            sat_assignments: 1 << 20,
            expansion: 200_000,
        }
    }
}
