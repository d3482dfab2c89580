//! Group extensions, wide-sense homomorphic encoders over abelian
//! extensions `Z_p ⊠ S`, their trellises, and controllability of the group
//! codes they generate.

pub mod control;
pub mod encoder;
pub mod error;
pub mod extension;
pub mod group;
pub mod sweep;
pub mod trellis;

pub use control::{
    check_predicates, decide_controllability, evaluate_predicates, forward_chain, past_kernel,
    ControlVerdict, PredicateReport, ReachabilityChain,
};
pub use encoder::{Encoder, EncoderSpec, HomSpec, Pairing, Past, Sequence};
pub use error::{Error, Result};
pub use extension::{ExtensionClass, ExtensionDecomposition};
pub use group::{
    enumerate_homs, index, quotient, recognize, CayleyTable, FiniteAbelianGroup, GroupElement,
    GroupHom, Quotient, Subgroup,
};
pub use sweep::{
    enumerate_encoders, enumerate_extensions, sweep_theorems, ExtensionInstance, SweepOptions,
    SweepReport,
};
pub use trellis::{branches, concatenate, connected, export_dot, is_codeword, Branch, TrellisPath};
