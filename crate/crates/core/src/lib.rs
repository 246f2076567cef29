//! Exact-repair determinant codes for `(n, k = d, d)` storage systems, their
//! Type-I / Type-II secure message layouts, and an exact auditor that turns
//! every eavesdropper view into rank computations over GF(q).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and anything touching the OS live in the `detcode-cli` crate.
//!
//! Indexing conventions: node ids, matrix rows of the message matrix and
//! subset elements are **1-based**, matching the usual mathematical notation
//! (`x ∈ [d]`, `i ∈ [n]`). Everything that indexes into a [`Mat`] directly is
//! **0-based**. Converting is always `label - 1` for rows/nodes and
//! [`LexIndexer::rank`] for subset-labelled columns.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod detcode;
mod error;
pub mod field;
pub mod leakage;
pub mod linalg;
pub mod secure_layout;
pub mod subsets;
pub mod tradeoff;

pub use crate::detcode::{
    build_encoder, build_message_matrix, build_repair_encoder, encode, multi_repair_rank, parity_value,
    recover_data, repair_data, repair_node, CellType, EncoderMatrix, MessageMatrix, NodeShare,
    PartialMessage, RepairEncoder, RepairPacket, SystemParams,
};
pub use crate::error::{Error, Result};
pub use crate::field::{smallest_prime_gt, Fe, Field};
pub use crate::linalg::{Mat, Solution};
pub use crate::secure_layout::{
    assemble, extract_keys, extract_secrets, layout, sample_keys, CellRole, Scheme, SecureMessageLayout,
    SecureParams,
};
pub use crate::subsets::{binom, ind, lex_less, LexIndexer, Subset};
