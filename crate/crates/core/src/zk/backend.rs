//! Proof systems for constraint systems, behind a setup/prove/verify interface.

use ark_bn254::Fr;
use thiserror::Error;

use super::r1cs::{decode_values, encode_values, ConstraintSystem};
use super::ZkError;

/// Backend-tagged opaque proof bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Proof {
    pub backend: String,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofReject {
    #[error("proof is for backend {found:?}, expected {expected:?}")]
    WrongBackend { expected: String, found: String },
    #[error("malformed proof: {0}")]
    Malformed(String),
    #[error("proof carries {found} witness values, statement needs {expected}")]
    WitnessLength { expected: usize, found: usize },
    #[error("constraint {0} is violated")]
    Unsatisfied(usize),
    #[error("public inputs do not define a statement: {0}")]
    Statement(String),
}

impl ProofReject {
    pub fn code(&self) -> &'static str {
        match self {
            ProofReject::WrongBackend { .. } => "wrong_backend",
            ProofReject::Malformed(_) => "malformed_proof",
            ProofReject::WitnessLength { .. } => "witness_length",
            ProofReject::Unsatisfied(_) => "unsatisfied",
            ProofReject::Statement(_) => "bad_statement",
        }
    }
}

pub trait ProverBackend {
    type Params;

    fn id(&self) -> &'static str;

    fn setup(&self, security_param: u32) -> Self::Params;

    /// `assignment` covers every variable, the constant one and public inputs first.
    fn prove(&self, params: &Self::Params, cs: &ConstraintSystem, assignment: &[Fr]) -> Result<Proof, ZkError>;

    /// `public` is the public part of the assignment, constant one first.
    fn verify(
        &self,
        params: &Self::Params,
        cs: &ConstraintSystem,
        public: &[Fr],
        proof: &Proof,
    ) -> Result<(), ProofReject>;
}

/// Proof = the witness itself. Sound and complete, neither succinct nor hiding.
#[derive(Clone, Copy, Debug, Default)]
pub struct Transparent;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TransparentParams;

impl ProverBackend for Transparent {
    type Params = TransparentParams;

    fn id(&self) -> &'static str {
        "transparent"
    }

    fn setup(&self, _security_param: u32) -> TransparentParams {
        TransparentParams
    }

    fn prove(&self, _: &TransparentParams, cs: &ConstraintSystem, assignment: &[Fr]) -> Result<Proof, ZkError> {
        if let Some(k) = cs.first_violation(assignment) {
            return Err(ZkError::Unsatisfied { constraint: k });
        }
        Ok(Proof {
            backend: self.id().to_string(),
            bytes: encode_values(&assignment[cs.num_public()..]),
        })
    }

    fn verify(
        &self,
        _: &TransparentParams,
        cs: &ConstraintSystem,
        public: &[Fr],
        proof: &Proof,
    ) -> Result<(), ProofReject> {
        if proof.backend != self.id() {
            return Err(ProofReject::WrongBackend {
                expected: self.id().to_string(),
                found: proof.backend.clone(),
            });
        }
        if public.len() != cs.num_public() {
            return Err(ProofReject::Statement(format!(
                "{} public values for {} public variables",
                public.len(),
                cs.num_public()
            )));
        }
        let witness = decode_values(&proof.bytes).map_err(|e| ProofReject::Malformed(e.to_string()))?;
        if witness.len() != cs.num_witness() {
            return Err(ProofReject::WitnessLength {
                expected: cs.num_witness(),
                found: witness.len(),
            });
        }
        let mut z = Vec::with_capacity(cs.num_vars());
        z.extend_from_slice(public);
        z.extend(witness);
        match cs.first_violation(&z) {
            None => Ok(()),
            Some(k) => Err(ProofReject::Unsatisfied(k)),
        }
    }
}
