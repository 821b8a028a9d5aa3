use serde::Serialize;

use super::{cuts::fundamental_cuts, Gf2Span, Network};
use crate::error::{Error, Result};

/// Relation between two networks on the same edge set, ordered by cut-space
/// inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TopologyOrder {
    Equivalent,
    /// The first cut space is strictly inside the second.
    FirstPrecedes,
    SecondPrecedes,
    Incomparable,
}

/// Compares cut spaces by reducing each basis against the other's span.
pub fn compare_topologies(first: &Network, second: &Network) -> Result<TopologyOrder> {
    let n = first.edge_count();
    if n != second.edge_count() {
        return Err(Error::EdgeSetMismatch(n, second.edge_count()));
    }
    let a = fundamental_cuts(first);
    let b = fundamental_cuts(second);
    let span_a = Gf2Span::from_vectors(n, &a);
    let span_b = Gf2Span::from_vectors(n, &b);
    let a_in_b = span_a.is_subspace_of(&span_b);
    let b_in_a = span_b.is_subspace_of(&span_a);
    Ok(match (a_in_b, b_in_a) {
        (true, true) => TopologyOrder::Equivalent,
        (true, false) => TopologyOrder::FirstPrecedes,
        (false, true) => TopologyOrder::SecondPrecedes,
        (false, false) => TopologyOrder::Incomparable,
    })
}
