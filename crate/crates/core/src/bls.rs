//! BLS signatures with signatures in G1 and public keys in G2, plus
//! aggregation.
//!
//! Messages are hashed to G1 by try-and-increment: `sha256(msg ‖ c)` for a
//! one-byte counter `c = 0, 1, …`. The first `bits(p)` digest bits are the
//! candidate abscissa, the next bit selects the root. A candidate is accepted
//! when `x < p` and `x^3 + b` is a nonzero square.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{CryptoRng, RngCore};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::group::{
    pairing_product_is_identity, BaseField, G1Point, G2Point, GroupError, Scalar,
    G1_COMPRESSED_LEN,
};

/// Number of counter values tried before giving up (`c` is one byte).
pub const COUNTER_BOUND: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlsError {
    #[error("try-and-increment exhausted all {COUNTER_BOUND} counters")]
    CounterExhausted,
    #[error("counter {0} does not land on the curve")]
    CounterMiss(u8),
    #[error("malformed signature: {0}")]
    MalformedSignature(GroupError),
    #[error("malformed signature at index {index}: {source}")]
    MalformedAt { index: usize, source: GroupError },
    #[error("signature does not verify")]
    VerificationFailed,
    #[error("public key is the identity")]
    IdentityPublicKey,
    #[error("{keys} public keys for {messages} messages")]
    LengthMismatch { keys: usize, messages: usize },
    #[error("nothing to verify")]
    Empty,
    #[error("messages {first} and {second} are identical")]
    DuplicateMessage { first: usize, second: usize },
}

/// Why a try-and-increment candidate was rejected, or the ordinate it produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateOutcome {
    Accepted { y: BigUint },
    OutOfRange,
    ZeroRhs,
    NonResidue,
}

/// One iteration of try-and-increment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveCandidate {
    pub counter: u8,
    pub digest: [u8; 32],
    pub x: BigUint,
    pub sign_bit: bool,
    pub outcome: CandidateOutcome,
}

impl CurveCandidate {
    pub fn is_accepted(&self) -> bool {
        matches!(self.outcome, CandidateOutcome::Accepted { .. })
    }
}

/// Splits a digest into (candidate x, sign bit, remaining spare bits).
pub fn split_digest(field: &BaseField, digest: &[u8; 32]) -> (BigUint, bool, BigUint) {
    let bits = field.bits() as usize;
    let d = BigUint::from_bytes_be(digest);
    let x = &d >> (256 - bits);
    let sign_bit = d.bit((255 - bits) as u64);
    let spare_mask = (BigUint::from(1u32) << (256 - bits)) - 1u32;
    (x, sign_bit, d & spare_mask)
}

pub fn candidate(field: &BaseField, msg: &[u8], counter: u8) -> CurveCandidate {
    let digest: [u8; 32] = Sha256::new()
        .chain_update(msg)
        .chain_update([counter])
        .finalize()
        .into();
    let (x, sign_bit, _) = split_digest(field, &digest);
    let outcome = if !field.contains(&x) {
        CandidateOutcome::OutOfRange
    } else {
        let rhs = field.rhs(&x);
        if rhs.is_zero() {
            CandidateOutcome::ZeroRhs
        } else if let Some(y) = field.y_from_x(&x, sign_bit) {
            CandidateOutcome::Accepted { y }
        } else {
            CandidateOutcome::NonResidue
        }
    };
    CurveCandidate {
        counter,
        digest,
        x,
        sign_bit,
        outcome,
    }
}

/// Affine result of hashing to a curve over `field`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveHash {
    pub x: BigUint,
    pub y: BigUint,
    pub sign_bit: bool,
    pub counter: u8,
    pub digest: [u8; 32],
}

impl TryFrom<CurveCandidate> for CurveHash {
    type Error = BlsError;

    fn try_from(c: CurveCandidate) -> Result<Self, BlsError> {
        match c.outcome {
            CandidateOutcome::Accepted { y } => Ok(CurveHash {
                x: c.x,
                y,
                sign_bit: c.sign_bit,
                counter: c.counter,
                digest: c.digest,
            }),
            _ => Err(BlsError::CounterMiss(c.counter)),
        }
    }
}

/// Try-and-increment over any supported field, returning the first accepted counter.
pub fn hash_to_curve(field: &BaseField, msg: &[u8]) -> Result<CurveHash, BlsError> {
    (0..COUNTER_BOUND)
        .map(|c| candidate(field, msg, c as u8))
        .find(CurveCandidate::is_accepted)
        .ok_or(BlsError::CounterExhausted)
        .and_then(CurveHash::try_from)
}

/// Only the final iteration, at a known counter.
pub fn hash_to_curve_at(field: &BaseField, msg: &[u8], counter: u8) -> Result<CurveHash, BlsError> {
    CurveHash::try_from(candidate(field, msg, counter))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashToG1Result {
    pub point: G1Point,
    pub counter: u8,
    pub x: BigUint,
    pub sign_bit: bool,
    /// Digest bits past the 254-bit abscissa (the top one is `sign_bit`).
    pub digest_spare_bits: u8,
}

impl HashToG1Result {
    fn from_curve_hash(h: CurveHash) -> Self {
        let point = G1Point::from_affine(&h.x, &h.y).expect("accepted candidate lies on the curve");
        HashToG1Result {
            point,
            counter: h.counter,
            x: h.x,
            sign_bit: h.sign_bit,
            digest_spare_bits: h.digest[31] & 0b11,
        }
    }
}

pub fn hash_to_g1(msg: &[u8]) -> Result<HashToG1Result, BlsError> {
    hash_to_curve(BaseField::bn254(), msg).map(HashToG1Result::from_curve_hash)
}

pub fn hash_to_g1_at(msg: &[u8], counter: u8) -> Result<HashToG1Result, BlsError> {
    hash_to_curve_at(BaseField::bn254(), msg, counter).map(HashToG1Result::from_curve_hash)
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KeyPair {
    pub sk: Scalar,
    pub pk: G2Point,
}

impl KeyPair {
    /// Panics on a zero secret key.
    pub fn from_secret(sk: Scalar) -> Self {
        assert!(!sk.is_zero(), "secret key must be nonzero");
        KeyPair {
            sk,
            pk: G2Point::generator().mul(&sk),
        }
    }
}

pub fn keygen<R: RngCore + CryptoRng>(rng: &mut R) -> KeyPair {
    KeyPair::from_secret(Scalar::random_nonzero(rng))
}

/// Compressed G1 point.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Signature(pub [u8; G1_COMPRESSED_LEN]);

impl std::fmt::Debug for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Signature({})", hex::encode(self.0))
    }
}

impl Signature {
    pub fn from_point(p: &G1Point) -> Self {
        Signature(p.compress())
    }

    pub fn identity() -> Self {
        Signature::from_point(&G1Point::identity())
    }

    pub fn point(&self) -> Result<G1Point, BlsError> {
        G1Point::from_compressed(&self.0).map_err(BlsError::MalformedSignature)
    }

    pub fn to_bytes(&self) -> [u8; G1_COMPRESSED_LEN] {
        self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_slice(bytes: &[u8]) -> Result<Self, BlsError> {
        let arr: [u8; G1_COMPRESSED_LEN] = bytes.try_into().map_err(|_| {
            BlsError::MalformedSignature(GroupError::InvalidEncoding("signature must be 32 bytes"))
        })?;
        Ok(Signature(arr))
    }
}

pub fn sign(sk: &Scalar, msg: &[u8]) -> Result<Signature, BlsError> {
    Ok(sign_hashed(sk, &hash_to_g1(msg)?))
}

pub fn sign_hashed(sk: &Scalar, h: &HashToG1Result) -> Signature {
    Signature::from_point(&h.point.mul(sk))
}

/// Accepts iff `e(H(msg), pk) = e(sigma, g2)`.
pub fn verify(pk: &G2Point, msg: &[u8], sig: &Signature) -> Result<(), BlsError> {
    let h = hash_to_g1(msg)?;
    verify_hashed(&[(h.point, *pk)], sig)
}

/// Checks `prod e(H_i, pk_i) = e(agg, g2)` for already-hashed messages.
pub fn verify_hashed(terms: &[(G1Point, G2Point)], agg: &Signature) -> Result<(), BlsError> {
    if terms.is_empty() {
        return Err(BlsError::Empty);
    }
    if terms.iter().any(|(_, pk)| pk.is_identity()) {
        return Err(BlsError::IdentityPublicKey);
    }
    let sigma = agg.point()?;
    let mut pairs = Vec::with_capacity(terms.len() + 1);
    pairs.extend_from_slice(terms);
    pairs.push((-sigma, G2Point::generator()));
    if pairing_product_is_identity(&pairs) {
        Ok(())
    } else {
        Err(BlsError::VerificationFailed)
    }
}

/// Sum of the signature points; the empty sum is the identity.
pub fn aggregate(sigs: &[Signature]) -> Result<Signature, BlsError> {
    let mut points = Vec::with_capacity(sigs.len());
    for (index, s) in sigs.iter().enumerate() {
        let p = G1Point::from_compressed(&s.0)
            .map_err(|source| BlsError::MalformedAt { index, source })?;
        points.push(p);
    }
    Ok(Signature::from_point(&points.into_iter().sum()))
}

pub fn verify_aggregate(
    pks: &[G2Point],
    msgs: &[&[u8]],
    agg: &Signature,
) -> Result<(), BlsError> {
    if pks.len() != msgs.len() {
        return Err(BlsError::LengthMismatch {
            keys: pks.len(),
            messages: msgs.len(),
        });
    }
    if msgs.is_empty() {
        return Err(BlsError::Empty);
    }
    let mut seen: HashMap<&[u8], usize> = HashMap::new();
    for (i, m) in msgs.iter().enumerate() {
        if let Some(&first) = seen.get(m) {
            return Err(BlsError::DuplicateMessage { first, second: i });
        }
        seen.insert(m, i);
    }
    let mut terms = Vec::with_capacity(msgs.len());
    for (m, pk) in msgs.iter().zip(pks) {
        terms.push((hash_to_g1(m)?.point, *pk));
    }
    verify_hashed(&terms, agg)
}
