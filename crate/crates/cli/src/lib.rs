//! File-level front end for `detcode`: byte packing, the shard file format
//! and the operations behind the `detcode` binary.

pub mod commands;
pub mod error;
pub mod pack;
pub mod shard;

pub use commands::{
    audit_code, encode_bytes, parse_range, recover_bytes, repair_shard, AuditReport, CodeSpec, RepairOutcome,
};
pub use error::CliError;
pub use shard::{Shard, ShardHeader};
