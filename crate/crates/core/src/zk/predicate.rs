//! Predicates over hidden claim values, checked both directly and as constraints.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use ark_bn254::Fr;
use ark_ff::One;
use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::credential::Credential;

use super::boolean::{enforce_bit_equals, Bit};
use super::r1cs::{pow2, Builder, Lc};

/// Longest decimal string whose value always fits in 64 bits.
pub const MAX_DECIMAL_DIGITS: usize = 19;

/// A condition on claim values that the statement enforces.
pub trait CustomPredicate {
    /// Claims whose values the predicate reads.
    fn claim_indices(&self) -> Vec<usize>;

    /// Direct evaluation on a credential; hidden or missing claims evaluate to false.
    fn evaluate(&self, cred: &Credential) -> bool;

    /// Constraints over the value bits (8 per byte, most significant first)
    /// of the claims named by `claim_indices`.
    fn synthesize(&self, b: &mut Builder, values: &BTreeMap<usize, Vec<Bit>>);
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredicateSpec {
    #[default]
    True,
    /// The value is a decimal integer in `[min, max]`.
    IntegerRange { index: usize, min: u64, max: u64 },
    /// The value equals a constant string.
    Equals { index: usize, value: String },
}

fn parse_decimal(bytes: &[u8]) -> Option<u64> {
    if bytes.is_empty() || bytes.len() > MAX_DECIMAL_DIGITS || !bytes.iter().all(u8::is_ascii_digit) {
        return None;
    }
    Some(bytes.iter().fold(0u64, |acc, d| acc * 10 + (d - b'0') as u64))
}

fn enforce_false(b: &mut Builder) {
    b.enforce_zero(Lc::constant(Fr::one()));
}

/// `value = sum of 64 fresh bits`, i.e. `0 <= value < 2^64`.
fn enforce_u64(b: &mut Builder, value: Lc) {
    let v = b.eval(&value);
    let low = BigUint::from(v).to_u64_digits().first().copied().unwrap_or(0);
    let (_, sum) = b.alloc_bits(&BigUint::from(low), 64);
    b.enforce_equal(value, &sum);
}

impl CustomPredicate for PredicateSpec {
    fn claim_indices(&self) -> Vec<usize> {
        match self {
            PredicateSpec::True => vec![],
            PredicateSpec::IntegerRange { index, .. } | PredicateSpec::Equals { index, .. } => vec![*index],
        }
    }

    fn evaluate(&self, cred: &Credential) -> bool {
        let value = |i: usize| cred.claim(i).and_then(|c| c.value.text());
        match self {
            PredicateSpec::True => true,
            PredicateSpec::IntegerRange { index, min, max } => value(*index)
                .and_then(|v| parse_decimal(v.as_bytes()))
                .is_some_and(|v| *min <= v && v <= *max),
            PredicateSpec::Equals { index, value: expected } => value(*index) == Some(expected.as_str()),
        }
    }

    fn synthesize(&self, b: &mut Builder, values: &BTreeMap<usize, Vec<Bit>>) {
        match self {
            PredicateSpec::True => {}
            PredicateSpec::IntegerRange { index, min, max } => {
                let bits = &values[index];
                let len = bits.len() / 8;
                if len == 0 || len > MAX_DECIMAL_DIGITS || min > max {
                    enforce_false(b);
                    return;
                }
                let mut value = Lc::zero();
                for byte in bits.chunks(8) {
                    // ASCII digits are 0x30..=0x39: high nibble 0011, low nibble <= 9.
                    for (bit, expected) in byte[..4].iter().zip([false, false, true, true]) {
                        enforce_bit_equals(b, bit, expected);
                    }
                    let mut digit = Lc::zero();
                    for (j, bit) in byte[4..].iter().rev().enumerate() {
                        digit.add_scaled(&bit.lc(), pow2(j as u32));
                    }
                    let d = byte[4..].iter().fold(0u8, |acc, bit| acc << 1 | bit.value() as u8);
                    let slack = 9u8.wrapping_sub(d) & 0x0f;
                    let (_, slack_lc) = b.alloc_bits(&BigUint::from(slack), 4);
                    let mut nine = Lc::constant(Fr::from(9u64));
                    nine.add_scaled(&digit, -Fr::one());
                    b.enforce_equal(nine, &slack_lc);
                    value = value.scaled(Fr::from(10u64)) + &digit;
                }
                let mut above = value.clone();
                above.add_constant(-Fr::from(*min));
                enforce_u64(b, above);
                let mut below = value.scaled(-Fr::one());
                below.add_constant(Fr::from(*max));
                enforce_u64(b, below);
            }
            PredicateSpec::Equals { index, value } => {
                let bits = &values[index];
                if bits.len() != 8 * value.len() {
                    enforce_false(b);
                    return;
                }
                for (bit, byte_bit) in bits.iter().zip(super::boolean::const_bytes(value.as_bytes())) {
                    enforce_bit_equals(b, bit, byte_bit.value());
                }
            }
        }
    }
}

impl fmt::Display for PredicateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateSpec::True => f.write_str("none"),
            PredicateSpec::IntegerRange { index, min, max } => write!(f, "range:{index}:{min}:{max}"),
            PredicateSpec::Equals { index, value } => write!(f, "eq:{index}:{value}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad predicate {0:?}: expected none, range:INDEX:MIN:MAX or eq:INDEX:VALUE")]
pub struct ParsePredicateError(pub String);

impl FromStr for PredicateSpec {
    type Err = ParsePredicateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParsePredicateError(s.to_string());
        if s == "none" {
            return Ok(PredicateSpec::True);
        }
        let (kind, rest) = s.split_once(':').ok_or_else(err)?;
        match kind {
            "range" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [i, lo, hi] = parts[..] else { return Err(err()) };
                Ok(PredicateSpec::IntegerRange {
                    index: i.parse().map_err(|_| err())?,
                    min: lo.parse().map_err(|_| err())?,
                    max: hi.parse().map_err(|_| err())?,
                })
            }
            "eq" => {
                let (i, value) = rest.split_once(':').ok_or_else(err)?;
                Ok(PredicateSpec::Equals {
                    index: i.parse().map_err(|_| err())?,
                    value: value.to_string(),
                })
            }
            _ => Err(err()),
        }
    }
}
