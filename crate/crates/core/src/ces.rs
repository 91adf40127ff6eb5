//! Content extraction signatures built from BLS: one signature per claim,
//! extraction by aggregation, verification by one multi-pairing.

use thiserror::Error;

use crate::bls::{self, hash_to_g1, hash_to_g1_at, BlsError, Signature};
use crate::credential::{
    ceas_contains, clear_indices, encode_claim_message, BlindingMode, Ceas, Credential,
    CredentialError, ExtractionSet,
};
use crate::group::{G1Point, G2Point, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CesError {
    #[error(transparent)]
    Credential(#[from] CredentialError),
    #[error(transparent)]
    Bls(#[from] BlsError),
    #[error("CEAS width {ceas} does not match credential length {credential}")]
    WidthMismatch { ceas: usize, credential: usize },
    #[error("claim {0} is hidden")]
    HiddenClaim(usize),
    #[error("presentation was not made re-extractable")]
    NotReextractable,
    #[error("{signatures} signatures and {counters} counters for {claims} claims")]
    SignatureCount {
        claims: usize,
        signatures: usize,
        counters: usize,
    },
}

/// Why `ces_verify` rejected a presentation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CesReject {
    #[error("no visible claims")]
    EmptyExtraction,
    #[error("presentation has {presented} claims, CEAS was signed for {signed}")]
    LengthMismatch { signed: usize, presented: usize },
    #[error("extraction set {0} is not allowed by the CEAS")]
    NotInCeas(ExtractionSet),
    #[error("{found} counters for {expected} visible claims")]
    CounterCount { expected: usize, found: usize },
    #[error("counter {counter} for claim {index} does not hash onto the curve")]
    CounterMiss { index: usize, counter: u8 },
    #[error("malformed aggregate signature")]
    MalformedSignature,
    #[error("kept signatures do not aggregate to sigma")]
    KeptSignaturesInconsistent,
    #[error("pairing check failed")]
    PairingFailed,
    #[error("public key is the identity")]
    IdentityPublicKey,
    #[error("claim encoding failed: {0}")]
    Encoding(CredentialError),
}

impl CesReject {
    /// Stable short code for diagnostics.
    pub fn code(&self) -> &'static str {
        match self {
            CesReject::EmptyExtraction => "empty_extraction",
            CesReject::LengthMismatch { .. } => "length_mismatch",
            CesReject::NotInCeas(_) => "not_in_ceas",
            CesReject::CounterCount { .. } => "counter_count",
            CesReject::CounterMiss { .. } => "counter_miss",
            CesReject::MalformedSignature => "malformed_signature",
            CesReject::KeptSignaturesInconsistent => "kept_signatures_inconsistent",
            CesReject::PairingFailed => "pairing_failed",
            CesReject::IdentityPublicKey => "identity_public_key",
            CesReject::Encoding(_) => "encoding",
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SignedCredential {
    pub cred: Credential,
    pub ceas: Ceas,
    pub sigs: Vec<Signature>,
    pub counters: Vec<u8>,
}

/// Aggregate signature over the visible claims.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtractedSignature {
    pub ceas: Ceas,
    pub sigma: Signature,
    /// Counters of the visible claims, in index order.
    pub counters: Vec<u8>,
}

impl ExtractedSignature {
    pub fn to_bytes(&self) -> Vec<u8> {
        let ceas = self.ceas.canonical_bytes();
        let mut out = Vec::with_capacity(ceas.len() + 40 + self.counters.len());
        out.extend_from_slice(&(ceas.len() as u32).to_be_bytes());
        out.extend_from_slice(&ceas);
        out.extend_from_slice(&self.sigma.0);
        out.extend_from_slice(&(self.counters.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.counters);
        out
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ExtractedPresentation {
    pub sub_cred: Credential,
    pub ext_sig: ExtractedSignature,
    /// Per-claim signatures of the visible claims, kept for further extraction.
    pub kept_sigs: Option<Vec<Signature>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExtractOptions {
    pub reextractable: bool,
    pub blinding: BlindingMode,
}

/// Signs every claim over its canonical message and records the counters.
pub fn ces_sign(sk: &Scalar, cred: &Credential, ceas: &Ceas) -> Result<SignedCredential, CesError> {
    let n = cred.len();
    if ceas.width() != n {
        return Err(CesError::WidthMismatch {
            ceas: ceas.width(),
            credential: n,
        });
    }
    let mut sigs = Vec::with_capacity(n);
    let mut counters = Vec::with_capacity(n);
    for (i, claim) in cred.claims().iter().enumerate() {
        if claim.is_hidden() {
            return Err(CesError::HiddenClaim(i));
        }
        let msg = encode_claim_message(ceas, n, i, claim, None)?;
        let h = hash_to_g1(&msg)?;
        sigs.push(bls::sign_hashed(sk, &h));
        counters.push(h.counter);
    }
    Ok(SignedCredential {
        cred: cred.clone(),
        ceas: ceas.clone(),
        sigs,
        counters,
    })
}

/// Keeps the claims at `x`, hides the rest and aggregates the kept signatures.
///
/// `x` is not checked against the CEAS; the verifier does that.
pub fn ces_extract(
    sc: &SignedCredential,
    x: &ExtractionSet,
    opts: ExtractOptions,
) -> Result<ExtractedPresentation, CesError> {
    let n = sc.cred.len();
    if sc.sigs.len() != n || sc.counters.len() != n {
        return Err(CesError::SignatureCount {
            claims: n,
            signatures: sc.sigs.len(),
            counters: sc.counters.len(),
        });
    }
    extract_from(&sc.cred, &sc.ceas, |i| (sc.sigs[i], sc.counters[i]), x, opts)
}

/// Extracts `x` from a re-extractable presentation; `x` must be visible there.
pub fn ces_reextract(
    pres: &ExtractedPresentation,
    x: &ExtractionSet,
    opts: ExtractOptions,
) -> Result<ExtractedPresentation, CesError> {
    let kept = pres.kept_sigs.as_ref().ok_or(CesError::NotReextractable)?;
    let visible: Vec<usize> = clear_indices(&pres.sub_cred).iter().collect();
    if kept.len() != visible.len() || pres.ext_sig.counters.len() != visible.len() {
        return Err(CesError::SignatureCount {
            claims: visible.len(),
            signatures: kept.len(),
            counters: pres.ext_sig.counters.len(),
        });
    }
    if let Some(i) = x.iter().find(|i| !visible.contains(i)) {
        return Err(CesError::HiddenClaim(i));
    }
    let slot = |i: usize| {
        let k = visible.binary_search(&i).expect("checked visible");
        (kept[k], pres.ext_sig.counters[k])
    };
    extract_from(&pres.sub_cred, &pres.ext_sig.ceas, slot, x, opts)
}

fn extract_from(
    cred: &Credential,
    ceas: &Ceas,
    slot: impl Fn(usize) -> (Signature, u8),
    x: &ExtractionSet,
    opts: ExtractOptions,
) -> Result<ExtractedPresentation, CesError> {
    let n = cred.len();
    if x.is_empty() {
        return Err(CredentialError::EmptyExtraction.into());
    }
    if let Some(max) = x.last_index().filter(|&m| m >= n) {
        return Err(CredentialError::IndexOutOfRange { index: max, width: n }.into());
    }
    let (sigs, counters): (Vec<Signature>, Vec<u8>) = x.iter().map(&slot).unzip();
    let sigma = bls::aggregate(&sigs)?;
    Ok(ExtractedPresentation {
        sub_cred: cred.with_hidden_outside(x, opts.blinding),
        ext_sig: ExtractedSignature {
            ceas: ceas.clone(),
            sigma,
            counters,
        },
        kept_sigs: opts.reextractable.then_some(sigs),
    })
}

/// Everything the verifier derived from a presentation, in order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerifyTranscript {
    pub n: usize,
    pub visible: ExtractionSet,
    pub ceas_bytes: Vec<u8>,
    pub messages: Vec<Vec<u8>>,
    pub hashed: Vec<[u8; 32]>,
    pub sigma: Signature,
    pub verdict: Result<(), CesReject>,
}

pub fn ces_verify(pk: &G2Point, pres: &ExtractedPresentation) -> Result<(), CesReject> {
    ces_verify_transcript(pk, pres).verdict
}

/// Runs verification and records every intermediate value it used.
pub fn ces_verify_transcript(pk: &G2Point, pres: &ExtractedPresentation) -> VerifyTranscript {
    let mut t = VerifyTranscript {
        n: pres.sub_cred.len(),
        visible: clear_indices(&pres.sub_cred),
        ceas_bytes: pres.ext_sig.ceas.canonical_bytes(),
        messages: Vec::new(),
        hashed: Vec::new(),
        sigma: pres.ext_sig.sigma,
        verdict: Ok(()),
    };
    t.verdict = verify_into(pk, pres, &mut t);
    t
}

fn verify_into(
    pk: &G2Point,
    pres: &ExtractedPresentation,
    t: &mut VerifyTranscript,
) -> Result<(), CesReject> {
    let ceas = &pres.ext_sig.ceas;
    if t.visible.is_empty() {
        return Err(CesReject::EmptyExtraction);
    }
    if ceas.width() != t.n {
        return Err(CesReject::LengthMismatch {
            signed: ceas.width(),
            presented: t.n,
        });
    }
    if !ceas_contains(ceas, &t.visible).map_err(CesReject::Encoding)? {
        return Err(CesReject::NotInCeas(t.visible.clone()));
    }
    let counters = &pres.ext_sig.counters;
    if counters.len() != t.visible.len() {
        return Err(CesReject::CounterCount {
            expected: t.visible.len(),
            found: counters.len(),
        });
    }
    if pk.is_identity() {
        return Err(CesReject::IdentityPublicKey);
    }
    let sigma = pres.ext_sig.sigma.point().map_err(|_| CesReject::MalformedSignature)?;
    if let Some(kept) = &pres.kept_sigs {
        let agg = bls::aggregate(kept).map_err(|_| CesReject::KeptSignaturesInconsistent)?;
        if kept.len() != t.visible.len() || agg != pres.ext_sig.sigma {
            return Err(CesReject::KeptSignaturesInconsistent);
        }
    }
    let mut terms: Vec<(G1Point, G2Point)> = Vec::with_capacity(t.visible.len());
    for (index, &counter) in t.visible.clone().iter().zip(counters) {
        let claim = &pres.sub_cred.claims()[index];
        let msg = encode_claim_message(ceas, t.n, index, claim, None).map_err(CesReject::Encoding)?;
        let h = hash_to_g1_at(&msg, counter).map_err(|_| CesReject::CounterMiss { index, counter })?;
        t.hashed.push(h.point.compress());
        t.messages.push(msg);
        terms.push((h.point, *pk));
    }
    match bls::verify_hashed(&terms, &Signature::from_point(&sigma)) {
        Ok(()) => Ok(()),
        Err(BlsError::IdentityPublicKey) => Err(CesReject::IdentityPublicKey),
        Err(_) => Err(CesReject::PairingFailed),
    }
}
