//! Credentials as ordered subject-property-value claims, the extraction
//! access structure (CEAS) and the canonical per-claim message encoding.
//!
//! # Canonical bytes
//!
//! CEAS (`Ceas::canonical_bytes`):
//!
//! ```text
//! width: u32 BE ‖ count: u32 BE ‖ mask_0: u64 BE ‖ … ‖ mask_{count-1}: u64 BE
//! ```
//!
//! where bit `i` of a mask marks index `i`, and masks are strictly ascending.
//!
//! Claim message (`encode_claim_message`):
//!
//! ```text
//! len(ceas): u32 BE ‖ ceas ‖ n: u32 BE ‖ i: u32 BE
//!   ‖ len(subject): u32 BE ‖ subject ‖ len(property): u32 BE ‖ property
//!   ‖ len(value): u32 BE ‖ value [‖ counter: u8]
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Largest credential a CEAS can describe.
pub const MAX_CEAS_WIDTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CredentialError {
    #[error("a credential needs at least one claim")]
    Empty,
    #[error("claim {0}: a blinded property requires a blinded value")]
    PropertyBlindedValueVisible(usize),
    #[error("claim {index} has subject {found:?}, credential subject is {expected:?}")]
    SubjectMismatch {
        index: usize,
        expected: String,
        found: String,
    },
    #[error("CEAS width {0} is outside 1..={MAX_CEAS_WIDTH}")]
    CeasWidth(usize),
    #[error("CEAS must contain at least one subset")]
    EmptyCeas,
    #[error("extraction set must not be empty")]
    EmptyExtraction,
    #[error("index {index} is out of range for width {width}")]
    IndexOutOfRange { index: usize, width: usize },
    #[error("claim {0} is hidden and cannot be encoded")]
    HiddenClaim(usize),
}

/// A claim component: text, or the BLINDED sentinel.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClaimField {
    Text(String),
    Blinded,
}

impl ClaimField {
    pub fn text(&self) -> Option<&str> {
        match self {
            ClaimField::Text(s) => Some(s),
            ClaimField::Blinded => None,
        }
    }

    pub fn is_blinded(&self) -> bool {
        matches!(self, ClaimField::Blinded)
    }
}

impl fmt::Debug for ClaimField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClaimField::Text(s) => write!(f, "{s:?}"),
            ClaimField::Blinded => f.write_str("BLINDED"),
        }
    }
}

/// How a claim is hidden.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlindingMode {
    /// `subject-property-BLINDED`.
    #[default]
    ValueOnly,
    /// `subject-BLINDED-BLINDED`; hides the property as well.
    PropertyAndValue,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Claim {
    pub subject: String,
    pub property: ClaimField,
    pub value: ClaimField,
}

impl Claim {
    pub fn new(subject: impl Into<String>, property: impl Into<String>, value: impl Into<String>) -> Self {
        Claim {
            subject: subject.into(),
            property: ClaimField::Text(property.into()),
            value: ClaimField::Text(value.into()),
        }
    }

    pub fn is_hidden(&self) -> bool {
        self.value.is_blinded()
    }

    pub fn is_visible(&self) -> bool {
        !self.is_hidden()
    }

    pub fn blinded(&self, mode: BlindingMode) -> Claim {
        let property = match mode {
            BlindingMode::ValueOnly => self.property.clone(),
            BlindingMode::PropertyAndValue => ClaimField::Blinded,
        };
        Claim {
            subject: self.subject.clone(),
            property,
            value: ClaimField::Blinded,
        }
    }
}

/// Ordered claims about a single subject. Indices are part of what is signed.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Credential {
    claims: Vec<Claim>,
}

impl Credential {
    pub fn new(claims: Vec<Claim>) -> Result<Self, CredentialError> {
        let first = claims.first().ok_or(CredentialError::Empty)?;
        for (index, c) in claims.iter().enumerate() {
            if c.subject != first.subject {
                return Err(CredentialError::SubjectMismatch {
                    index,
                    expected: first.subject.clone(),
                    found: c.subject.clone(),
                });
            }
            if c.property.is_blinded() && !c.value.is_blinded() {
                return Err(CredentialError::PropertyBlindedValueVisible(index));
            }
        }
        Ok(Credential { claims })
    }

    /// Claims given as (property, value) pairs about one subject.
    pub fn from_pairs<'a>(
        subject: &str,
        pairs: impl IntoIterator<Item = (&'a str, &'a str)>,
    ) -> Result<Self, CredentialError> {
        Credential::new(pairs.into_iter().map(|(p, v)| Claim::new(subject, p, v)).collect())
    }

    pub fn subject(&self) -> &str {
        &self.claims[0].subject
    }

    pub fn len(&self) -> usize {
        self.claims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.claims.is_empty()
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    pub fn claim(&self, i: usize) -> Option<&Claim> {
        self.claims.get(i)
    }

    pub fn is_fully_visible(&self) -> bool {
        self.claims.iter().all(Claim::is_visible)
    }

    /// Copy with every claim outside `keep` hidden.
    pub fn with_hidden_outside(&self, keep: &ExtractionSet, mode: BlindingMode) -> Credential {
        let claims = self
            .claims
            .iter()
            .enumerate()
            .map(|(i, c)| if keep.contains(i) { c.clone() } else { c.blinded(mode) })
            .collect();
        Credential { claims }
    }
}

/// Indices of claims to disclose, ascending and deduplicated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ExtractionSet {
    indices: BTreeSet<usize>,
}

impl ExtractionSet {
    /// Non-empty set of indices.
    pub fn new(indices: impl IntoIterator<Item = usize>) -> Result<Self, CredentialError> {
        let indices: BTreeSet<usize> = indices.into_iter().collect();
        if indices.is_empty() {
            return Err(CredentialError::EmptyExtraction);
        }
        Ok(ExtractionSet { indices })
    }

    pub fn full(n: usize) -> Self {
        ExtractionSet {
            indices: (0..n).collect(),
        }
    }

    pub fn from_mask(mask: u64) -> Self {
        ExtractionSet {
            indices: (0..64).filter(|i| mask >> i & 1 == 1).collect(),
        }
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.contains(&i)
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn last_index(&self) -> Option<usize> {
        self.indices.iter().next_back().copied()
    }

    pub fn is_subset(&self, other: &ExtractionSet) -> bool {
        self.indices.is_subset(&other.indices)
    }

    /// Bit mask over `width` indices.
    pub fn to_mask(&self, width: usize) -> Result<u64, CredentialError> {
        let mut mask = 0u64;
        for i in self.iter() {
            if i >= width || i >= MAX_CEAS_WIDTH {
                return Err(CredentialError::IndexOutOfRange { index: i, width });
            }
            mask |= 1 << i;
        }
        Ok(mask)
    }
}

impl fmt::Display for ExtractionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// Explicitly enumerated family of permitted extraction sets.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Ceas {
    width: usize,
    subsets: BTreeSet<u64>,
}

impl Ceas {
    pub fn new(width: usize, subsets: impl IntoIterator<Item = ExtractionSet>) -> Result<Self, CredentialError> {
        let masks = subsets
            .into_iter()
            .map(|s| {
                if s.is_empty() {
                    Err(CredentialError::EmptyExtraction)
                } else {
                    s.to_mask(width)
                }
            })
            .collect::<Result<Vec<u64>, _>>()?;
        Ceas::from_masks(width, masks)
    }

    pub fn from_masks(width: usize, masks: impl IntoIterator<Item = u64>) -> Result<Self, CredentialError> {
        if width == 0 || width > MAX_CEAS_WIDTH {
            return Err(CredentialError::CeasWidth(width));
        }
        let limit = if width == 64 { u64::MAX } else { (1u64 << width) - 1 };
        let mut subsets = BTreeSet::new();
        for m in masks {
            if m == 0 {
                return Err(CredentialError::EmptyExtraction);
            }
            if m & !limit != 0 {
                return Err(CredentialError::IndexOutOfRange {
                    index: 63 - m.leading_zeros() as usize,
                    width,
                });
            }
            subsets.insert(m);
        }
        if subsets.is_empty() {
            return Err(CredentialError::EmptyCeas);
        }
        Ok(Ceas { width, subsets })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn masks(&self) -> impl Iterator<Item = u64> + '_ {
        self.subsets.iter().copied()
    }

    pub fn subsets(&self) -> impl Iterator<Item = ExtractionSet> + '_ {
        self.masks().map(ExtractionSet::from_mask)
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn contains_mask(&self, mask: u64) -> bool {
        self.subsets.contains(&mask)
    }

    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(8 + 8 * self.subsets.len());
        out.extend_from_slice(&(self.width as u32).to_be_bytes());
        out.extend_from_slice(&(self.subsets.len() as u32).to_be_bytes());
        for m in &self.subsets {
            out.extend_from_slice(&m.to_be_bytes());
        }
        out
    }
}

/// `sub` is a sub-credential of `full`: same length, at least one hidden
/// claim, and every visible claim equal to `full`'s claim at the same index.
pub fn is_sub_credential(sub: &Credential, full: &Credential) -> bool {
    sub.len() == full.len()
        && sub.claims().iter().any(Claim::is_hidden)
        && sub
            .claims()
            .iter()
            .zip(full.claims())
            .all(|(s, f)| s.is_hidden() || s == f)
}

/// Indices of the visible claims, ascending. Empty when everything is hidden.
pub fn clear_indices(c: &Credential) -> ExtractionSet {
    ExtractionSet {
        indices: c
            .claims()
            .iter()
            .enumerate()
            .filter(|(_, cl)| cl.is_visible())
            .map(|(i, _)| i)
            .collect(),
    }
}

/// Exact membership of `x` in the CEAS.
pub fn ceas_contains(ceas: &Ceas, x: &ExtractionSet) -> Result<bool, CredentialError> {
    Ok(ceas.contains_mask(x.to_mask(ceas.width())?))
}

fn put_len_prefixed(out: &mut Vec<u8>, bytes: &[u8]) {
    out.extend_from_slice(&(bytes.len() as u32).to_be_bytes());
    out.extend_from_slice(bytes);
}

/// Canonical message signed for claim `i` of an `n`-claim credential.
pub fn encode_claim_message(
    ceas: &Ceas,
    n: usize,
    i: usize,
    claim: &Claim,
    counter: Option<u8>,
) -> Result<Vec<u8>, CredentialError> {
    if i >= n {
        return Err(CredentialError::IndexOutOfRange { index: i, width: n });
    }
    let (Some(property), Some(value)) = (claim.property.text(), claim.value.text()) else {
        return Err(CredentialError::HiddenClaim(i));
    };
    let ceas_bytes = ceas.canonical_bytes();
    let mut out = Vec::with_capacity(
        ceas_bytes.len() + 25 + claim.subject.len() + property.len() + value.len(),
    );
    put_len_prefixed(&mut out, &ceas_bytes);
    out.extend_from_slice(&(n as u32).to_be_bytes());
    out.extend_from_slice(&(i as u32).to_be_bytes());
    put_len_prefixed(&mut out, claim.subject.as_bytes());
    put_len_prefixed(&mut out, property.as_bytes());
    put_len_prefixed(&mut out, value.as_bytes());
    if let Some(c) = counter {
        out.push(c);
    }
    Ok(out)
}
