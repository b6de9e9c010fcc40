use serde::Serialize;
use sha2::{Digest, Sha256};

use qdrop_core::Instance;

use crate::format::InstanceFile;

/// Hex SHA-256 of the compact JSON encoding of `value`.
pub fn digest_json<T: Serialize + ?Sized>(value: &T) -> String {
    let bytes = serde_json::to_vec(value).expect("serializable value");
    hex(&Sha256::digest(&bytes))
}

/// Identity of the optimization problem: spin count, clauses and planted
/// state. The difficulty label and metadata do not participate.
pub fn instance_digest(inst: &Instance) -> String {
    let mut file = InstanceFile::from_instance(inst, None);
    file.label = None;
    digest_json(&file)
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

pub(crate) fn short(digest: &str) -> &str {
    &digest[..12.min(digest.len())]
}
