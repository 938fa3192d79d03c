//! Simulation of proof-labeling schemes: distributed languages verified by
//! nodes that see only a radius-t neighborhood plus certificates.

pub mod bits;
pub mod canon;
pub mod ccbridge;
pub mod graph;
pub mod harness;
pub mod language;
pub mod lowerbound;
pub mod proof;
pub mod schemes;
pub mod view;

pub use bits::{bits_for, Bits};
pub use graph::{Graph, GraphBuilder, GraphError, NodeId};
pub use proof::{GlobalProof, LocalProof, MixedProof, Proof, ProofError, Regime};
pub use view::{Ball, View, ViewRule};
pub use language::{Language, StdLanguage};
pub use schemes::{build_scheme, Scheme, SchemeParams, Verifier};
