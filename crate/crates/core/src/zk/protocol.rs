//! Setup, proving and verification of zero-knowledge extractions.
//!
//! The verifier learns `(x_i, sign_i)` for the extracted claims instead of
//! the claims themselves. It decompresses each point, checks the aggregate
//! pairing equation outside the proof, checks CEAS membership, and checks the
//! proof that the points are honest hashes of claims satisfying the predicate.

use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::bls::{self, keygen, BlsError, KeyPair, Signature};
use crate::credential::{ceas_contains, Ceas, Credential, ExtractionSet};
use crate::group::{BaseField, G1Point, G2Point};

use super::backend::{Proof, ProofReject, ProverBackend};
use super::predicate::PredicateSpec;
use super::statement::{build_statement, statement_shape, PublicInputs};
use super::witness::hash_to_curve_witness;
use super::ZkError;

/// Why one conjunct of `zk_verify` failed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZkReject {
    #[error("empty extraction set")]
    EmptyExtraction,
    #[error("extraction set {0} is not allowed by the CEAS")]
    NotInCeas(ExtractionSet),
    #[error("malformed public inputs: {0}")]
    BadInputs(String),
    #[error("x of claim {index} is not on the curve")]
    NotOnCurve { index: usize },
    #[error("public key is the identity")]
    IdentityPublicKey,
    #[error("malformed aggregate signature")]
    MalformedSignature,
    #[error("pairing check failed")]
    PairingFailed,
    #[error(transparent)]
    Proof(#[from] ProofReject),
}

impl ZkReject {
    pub fn code(&self) -> &'static str {
        match self {
            ZkReject::EmptyExtraction => "empty_extraction",
            ZkReject::NotInCeas(_) => "not_in_ceas",
            ZkReject::BadInputs(_) => "bad_inputs",
            ZkReject::NotOnCurve { .. } => "not_on_curve",
            ZkReject::IdentityPublicKey => "identity_public_key",
            ZkReject::MalformedSignature => "malformed_signature",
            ZkReject::PairingFailed => "pairing_failed",
            ZkReject::Proof(p) => p.code(),
        }
    }
}

/// The three conjuncts, each evaluated independently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZkVerdict {
    /// `X ∈ CEAS`.
    pub b1: Result<(), ZkReject>,
    /// Aggregate pairing equation over the decompressed points.
    pub b2: Result<(), ZkReject>,
    /// Proof verification.
    pub b3: Result<(), ZkReject>,
}

impl ZkVerdict {
    pub fn accepted(&self) -> bool {
        self.b1.is_ok() && self.b2.is_ok() && self.b3.is_ok()
    }

    /// `(conjunct, reason)` for each failed conjunct.
    pub fn failures(&self) -> Vec<(&'static str, &ZkReject)> {
        [("b1", &self.b1), ("b2", &self.b2), ("b3", &self.b3)]
            .into_iter()
            .filter_map(|(name, r)| r.as_ref().err().map(|e| (name, e)))
            .collect()
    }
}

pub fn zk_setup<B: ProverBackend, R: RngCore + CryptoRng>(
    backend: &B,
    security_param: u32,
    rng: &mut R,
) -> (KeyPair, B::Params) {
    (keygen(rng), backend.setup(security_param))
}

/// Proves that the claims of `cred` at `x` hash to the public points and satisfy `predicate`.
pub fn prove_extraction<B: ProverBackend>(
    backend: &B,
    params: &B::Params,
    cred: &Credential,
    ceas: &Ceas,
    x: &ExtractionSet,
    predicate: &PredicateSpec,
) -> Result<(Proof, PublicInputs), ZkError> {
    prove_extraction_in(BaseField::bn254(), backend, params, cred, ceas, x, predicate)
}

pub fn prove_extraction_in<B: ProverBackend>(
    field: &BaseField,
    backend: &B,
    params: &B::Params,
    cred: &Credential,
    ceas: &Ceas,
    x: &ExtractionSet,
    predicate: &PredicateSpec,
) -> Result<(Proof, PublicInputs), ZkError> {
    let n = cred.len();
    let mut witnesses = Vec::with_capacity(x.len());
    for i in x.iter() {
        let claim = cred
            .claim(i)
            .ok_or_else(|| ZkError::InvalidInputs(format!("index {i} out of range for {n} claims")))?;
        if claim.is_hidden() {
            return Err(ZkError::HiddenClaim(i));
        }
        witnesses.push(hash_to_curve_witness(field, i, claim, n, ceas)?.1);
    }
    let st = build_statement(field, cred, ceas, &witnesses, x, predicate)?;
    let proof = backend.prove(params, &st.cs, &st.assignment)?;
    Ok((proof, st.inputs))
}

pub fn check_membership(inputs: &PublicInputs) -> Result<(), ZkReject> {
    if inputs.extraction.is_empty() {
        return Err(ZkReject::EmptyExtraction);
    }
    match ceas_contains(&inputs.ceas, &inputs.extraction) {
        Ok(true) => Ok(()),
        Ok(false) => Err(ZkReject::NotInCeas(inputs.extraction.clone())),
        Err(e) => Err(ZkReject::BadInputs(e.to_string())),
    }
}

pub fn check_pairing(pk: &G2Point, sigma: &Signature, inputs: &PublicInputs) -> Result<(), ZkReject> {
    if inputs.claims.is_empty() {
        return Err(ZkReject::EmptyExtraction);
    }
    let mut terms: Vec<(G1Point, G2Point)> = Vec::with_capacity(inputs.claims.len());
    for c in &inputs.claims {
        let h = G1Point::decompress(&c.x, c.sign_bit).map_err(|_| ZkReject::NotOnCurve { index: c.index })?;
        terms.push((h, *pk));
    }
    match bls::verify_hashed(&terms, sigma) {
        Ok(()) => Ok(()),
        Err(BlsError::IdentityPublicKey) => Err(ZkReject::IdentityPublicKey),
        Err(BlsError::MalformedSignature(_)) => Err(ZkReject::MalformedSignature),
        Err(_) => Err(ZkReject::PairingFailed),
    }
}

pub fn check_proof<B: ProverBackend>(
    field: &BaseField,
    backend: &B,
    params: &B::Params,
    proof: &Proof,
    inputs: &PublicInputs,
) -> Result<(), ZkReject> {
    let (cs, public) = statement_shape(field, inputs).map_err(|e| ProofReject::Statement(e.to_string()))?;
    backend.verify(params, &cs, &public, proof)?;
    Ok(())
}

pub fn zk_verify<B: ProverBackend>(
    backend: &B,
    params: &B::Params,
    pk: &G2Point,
    sigma: &Signature,
    proof: &Proof,
    inputs: &PublicInputs,
) -> ZkVerdict {
    ZkVerdict {
        b1: check_membership(inputs),
        b2: check_pairing(pk, sigma, inputs),
        b3: check_proof(BaseField::bn254(), backend, params, proof, inputs),
    }
}
