//! Zero-knowledge extraction: the holder proves that hidden claims hash to
//! public curve points and satisfy a predicate, and the verifier checks the
//! aggregate signature against those points.

pub mod backend;
pub mod boolean;
pub mod emulated;
pub mod predicate;
pub mod protocol;
pub mod r1cs;
pub mod sha256;
pub mod statement;
pub mod witness;

use thiserror::Error;

use crate::bls::BlsError;
use crate::credential::CredentialError;

pub use backend::{Proof, ProofReject, ProverBackend, Transparent, TransparentParams};
pub use predicate::{CustomPredicate, PredicateSpec};
pub use protocol::{prove_extraction, prove_extraction_in, zk_setup, zk_verify, ZkReject, ZkVerdict};
pub use statement::{build_statement, statement_shape, ClaimPublic, PublicInputs, Statement};
pub use witness::{hash_to_curve_witness, HashToCurveWitness, MulStep};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZkError {
    #[error(transparent)]
    Credential(#[from] CredentialError),
    #[error(transparent)]
    Bls(#[from] BlsError),
    #[error("no witness for claim {0}")]
    MissingWitness(usize),
    #[error("claim {0} is hidden")]
    HiddenClaim(usize),
    #[error("predicate reads claim {index}, which is not extracted")]
    PredicateArity { index: usize },
    #[error("CEAS width {ceas} does not match credential length {credential}")]
    WidthMismatch { ceas: usize, credential: usize },
    #[error("invalid public inputs: {0}")]
    InvalidInputs(String),
    #[error("statement is not satisfied (constraint {constraint})")]
    Unsatisfied { constraint: usize },
}
