//! JSON file formats. These are for people and tools; anything that gets
//! hashed or signed goes through the canonical byte encodings instead.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use num_bigint::BigUint;

use crate::bls::Signature;
use crate::ces::{ExtractedPresentation, ExtractedSignature, SignedCredential};
use crate::credential::{clear_indices, Ceas, Claim, ClaimField, Credential, CredentialError, ExtractionSet};
use crate::group::{field::to_bytes32, G2Point, GroupError, Scalar, G2_UNCOMPRESSED_LEN};
use crate::zk::{ClaimPublic, PredicateSpec, Proof, PublicInputs};

#[derive(Debug, Error)]
pub enum WireError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid hex in {field}: {source}")]
    Hex {
        field: &'static str,
        source: hex::FromHexError,
    },
    #[error("{field} must be {expected} bytes, got {found}")]
    Length {
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Credential(#[from] CredentialError),
    #[error("invalid {field}: {source}")]
    Group {
        field: &'static str,
        source: GroupError,
    },
    #[error("{0}")]
    Inconsistent(String),
}

fn hex_bytes<const N: usize>(field: &'static str, s: &str) -> Result<[u8; N], WireError> {
    let v = hex::decode(s).map_err(|source| WireError::Hex { field, source })?;
    let found = v.len();
    v.try_into().map_err(|_| WireError::Length {
        field,
        expected: N,
        found,
    })
}

/// A value with a JSON file representation.
pub trait Wire: Sized {
    type Dto: Serialize + DeserializeOwned;

    fn to_dto(&self) -> Self::Dto;
    fn from_dto(dto: Self::Dto) -> Result<Self, WireError>;

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_dto()).expect("DTOs always serialize");
        s.push('\n');
        s
    }

    fn from_json(s: &str) -> Result<Self, WireError> {
        Self::from_dto(serde_json::from_str(s)?)
    }
}

/// Current version of the credential document.
pub const CREDENTIAL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClaimDto {
    /// `null` is BLINDED.
    pub property: Option<String>,
    pub value: Option<String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CredentialDto {
    pub version: u32,
    pub subject: String,
    pub claims: Vec<ClaimDto>,
}

fn field_dto(f: &ClaimField) -> Option<String> {
    f.text().map(str::to_string)
}

fn field_from(o: Option<String>) -> ClaimField {
    o.map_or(ClaimField::Blinded, ClaimField::Text)
}

impl Wire for Credential {
    type Dto = CredentialDto;

    fn to_dto(&self) -> CredentialDto {
        CredentialDto {
            version: CREDENTIAL_VERSION,
            subject: self.subject().to_string(),
            claims: self
                .claims()
                .iter()
                .map(|c| ClaimDto {
                    property: field_dto(&c.property),
                    value: field_dto(&c.value),
                })
                .collect(),
        }
    }

    fn from_dto(dto: CredentialDto) -> Result<Self, WireError> {
        if dto.version != CREDENTIAL_VERSION {
            return Err(WireError::Inconsistent(format!("unsupported credential version {}", dto.version)));
        }
        let claims = dto
            .claims
            .into_iter()
            .map(|c| Claim {
                subject: dto.subject.clone(),
                property: field_from(c.property),
                value: field_from(c.value),
            })
            .collect();
        Ok(Credential::new(claims)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CeasDto {
    pub width: usize,
    /// Each permitted extraction set as a list of indices.
    pub subsets: Vec<Vec<usize>>,
}

impl Wire for Ceas {
    type Dto = CeasDto;

    fn to_dto(&self) -> CeasDto {
        CeasDto {
            width: self.width(),
            subsets: self.subsets().map(|s| s.iter().collect()).collect(),
        }
    }

    fn from_dto(dto: CeasDto) -> Result<Self, WireError> {
        let sets = dto
            .subsets
            .into_iter()
            .map(ExtractionSet::new)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Ceas::new(dto.width, sets)?)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SecretKeyDto {
    pub secret_key: String,
}

impl Wire for Scalar {
    type Dto = SecretKeyDto;

    fn to_dto(&self) -> SecretKeyDto {
        SecretKeyDto {
            secret_key: hex::encode(self.to_bytes()),
        }
    }

    fn from_dto(dto: SecretKeyDto) -> Result<Self, WireError> {
        let bytes = hex_bytes::<32>("secret_key", &dto.secret_key)?;
        let sk = Scalar::from_bytes(&bytes).map_err(|source| WireError::Group {
            field: "secret_key",
            source,
        })?;
        if sk.is_zero() {
            return Err(WireError::Inconsistent("secret key is zero".into()));
        }
        Ok(sk)
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PublicKeyDto {
    pub public_key: String,
}

impl Wire for G2Point {
    type Dto = PublicKeyDto;

    fn to_dto(&self) -> PublicKeyDto {
        PublicKeyDto {
            public_key: hex::encode(self.to_bytes()),
        }
    }

    fn from_dto(dto: PublicKeyDto) -> Result<Self, WireError> {
        let bytes = hex_bytes::<G2_UNCOMPRESSED_LEN>("public_key", &dto.public_key)?;
        G2Point::from_bytes(&bytes).map_err(|source| WireError::Group {
            field: "public_key",
            source,
        })
    }
}

fn sig_hex(s: &Signature) -> String {
    s.to_hex()
}

fn sig_from(field: &'static str, s: &str) -> Result<Signature, WireError> {
    Ok(Signature(hex_bytes::<32>(field, s)?))
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SignedCredentialDto {
    pub credential: CredentialDto,
    pub ceas: CeasDto,
    pub signatures: Vec<String>,
    pub counters: Vec<u8>,
}

impl Wire for SignedCredential {
    type Dto = SignedCredentialDto;

    fn to_dto(&self) -> SignedCredentialDto {
        SignedCredentialDto {
            credential: self.cred.to_dto(),
            ceas: self.ceas.to_dto(),
            signatures: self.sigs.iter().map(sig_hex).collect(),
            counters: self.counters.clone(),
        }
    }

    fn from_dto(dto: SignedCredentialDto) -> Result<Self, WireError> {
        let cred = Credential::from_dto(dto.credential)?;
        let sigs = dto
            .signatures
            .iter()
            .map(|s| sig_from("signatures", s))
            .collect::<Result<Vec<_>, _>>()?;
        if sigs.len() != cred.len() || dto.counters.len() != cred.len() {
            return Err(WireError::Inconsistent(format!(
                "{} signatures and {} counters for {} claims",
                sigs.len(),
                dto.counters.len(),
                cred.len()
            )));
        }
        Ok(SignedCredential {
            cred,
            ceas: Ceas::from_dto(dto.ceas)?,
            sigs,
            counters: dto.counters,
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PresentationDto {
    pub credential: CredentialDto,
    pub ceas: CeasDto,
    /// Visible indices; must match the credential.
    pub extraction: Vec<usize>,
    pub counters: Vec<u8>,
    pub signature: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kept_signatures: Option<Vec<String>>,
}

impl Wire for ExtractedPresentation {
    type Dto = PresentationDto;

    fn to_dto(&self) -> PresentationDto {
        PresentationDto {
            credential: self.sub_cred.to_dto(),
            ceas: self.ext_sig.ceas.to_dto(),
            extraction: clear_indices(&self.sub_cred).iter().collect(),
            counters: self.ext_sig.counters.clone(),
            signature: sig_hex(&self.ext_sig.sigma),
            kept_signatures: self.kept_sigs.as_ref().map(|k| k.iter().map(sig_hex).collect()),
        }
    }

    fn from_dto(dto: PresentationDto) -> Result<Self, WireError> {
        let sub_cred = Credential::from_dto(dto.credential)?;
        let visible: Vec<usize> = clear_indices(&sub_cred).iter().collect();
        if visible != dto.extraction {
            return Err(WireError::Inconsistent(format!(
                "extraction {:?} does not match visible claims {visible:?}",
                dto.extraction
            )));
        }
        let kept_sigs = dto
            .kept_signatures
            .map(|k| k.iter().map(|s| sig_from("kept_signatures", s)).collect::<Result<Vec<_>, _>>())
            .transpose()?;
        Ok(ExtractedPresentation {
            sub_cred,
            ext_sig: ExtractedSignature {
                ceas: Ceas::from_dto(dto.ceas)?,
                sigma: sig_from("signature", &dto.signature)?,
                counters: dto.counters,
            },
            kept_sigs,
        })
    }
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ClaimPublicDto {
    pub index: usize,
    /// 32-byte big-endian hex.
    pub x: String,
    pub sign_bit: bool,
    pub subject_len: usize,
    pub property_len: usize,
    pub value_len: usize,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PublicInputsDto {
    pub claims: Vec<ClaimPublicDto>,
    pub ceas: CeasDto,
    pub extraction: Vec<usize>,
    pub predicate: PredicateSpec,
}

impl Wire for PublicInputs {
    type Dto = PublicInputsDto;

    fn to_dto(&self) -> PublicInputsDto {
        PublicInputsDto {
            claims: self
                .claims
                .iter()
                .map(|c| ClaimPublicDto {
                    index: c.index,
                    x: hex::encode(to_bytes32(&c.x)),
                    sign_bit: c.sign_bit,
                    subject_len: c.subject_len,
                    property_len: c.property_len,
                    value_len: c.value_len,
                })
                .collect(),
            ceas: self.ceas.to_dto(),
            extraction: self.extraction.iter().collect(),
            predicate: self.predicate.clone(),
        }
    }

    fn from_dto(dto: PublicInputsDto) -> Result<Self, WireError> {
        let claims = dto
            .claims
            .into_iter()
            .map(|c| {
                Ok(ClaimPublic {
                    index: c.index,
                    x: BigUint::from_bytes_be(&hex_bytes::<32>("x", &c.x)?),
                    sign_bit: c.sign_bit,
                    subject_len: c.subject_len,
                    property_len: c.property_len,
                    value_len: c.value_len,
                })
            })
            .collect::<Result<Vec<_>, WireError>>()?;
        Ok(PublicInputs {
            claims,
            ceas: Ceas::from_dto(dto.ceas)?,
            extraction: ExtractionSet::new(dto.extraction)?,
            predicate: dto.predicate,
        })
    }
}

/// Everything a verifier needs for a zero-knowledge extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofBundle {
    pub inputs: PublicInputs,
    pub sigma: Signature,
    pub proof: Proof,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ProofBundleDto {
    pub backend: String,
    pub public_inputs: PublicInputsDto,
    pub signature: String,
    pub proof: String,
}

impl Wire for ProofBundle {
    type Dto = ProofBundleDto;

    fn to_dto(&self) -> ProofBundleDto {
        ProofBundleDto {
            backend: self.proof.backend.clone(),
            public_inputs: self.inputs.to_dto(),
            signature: sig_hex(&self.sigma),
            proof: hex::encode(&self.proof.bytes),
        }
    }

    fn from_dto(dto: ProofBundleDto) -> Result<Self, WireError> {
        Ok(ProofBundle {
            inputs: PublicInputs::from_dto(dto.public_inputs)?,
            sigma: sig_from("signature", &dto.signature)?,
            proof: Proof {
                backend: dto.backend,
                bytes: hex::decode(&dto.proof).map_err(|source| WireError::Hex { field: "proof", source })?,
            },
        })
    }
}
