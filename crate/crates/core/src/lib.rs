//! Certification of genuine multipartite entanglement in pair-entangled
//! quantum networks with sub-symmetric witnesses.

pub mod caps;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod lp;
pub mod numeric;
pub mod oracle;
pub mod sampling;
pub mod witness;

pub use caps::Caps;
pub use error::{Error, Result};
pub use graph::{EdgeSubset, Network};
