//! Deterministic test vectors from a fixed seed.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::bls::{hash_to_curve, keygen, sign, BlsError, KeyPair};
use crate::ces::{ces_extract, ces_sign, CesError, ExtractOptions};
use crate::credential::{Ceas, Credential, ExtractionSet};
use crate::group::BaseField;
use crate::wire::{PresentationDto, SignedCredentialDto, Wire};

pub const GOLDEN_SEED: u64 = 42;
pub const GOLDEN_MESSAGE: &str = "abc";

pub fn seeded_rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn seeded_keypair(seed: u64) -> KeyPair {
    keygen(&mut seeded_rng(seed))
}

pub fn sample_credential() -> Credential {
    Credential::from_pairs(
        "did:example:alice",
        [("name", "Alice"), ("age", "30"), ("country", "FR")],
    )
    .expect("non-empty")
}

pub fn sample_ceas() -> Ceas {
    Ceas::from_masks(3, [0b001, 0b011, 0b110]).expect("valid masks")
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct GoldenVectors {
    pub seed: u64,
    pub secret_key: String,
    pub public_key: String,
    pub message: String,
    pub signature: String,
    pub counter: u8,
    pub signed_credential: SignedCredentialDto,
    pub presentation: PresentationDto,
}

pub fn golden_vectors(seed: u64) -> Result<GoldenVectors, CesError> {
    let kp = seeded_keypair(seed);
    let h = crate::bls::hash_to_g1(GOLDEN_MESSAGE.as_bytes())?;
    let sig = sign(&kp.sk, GOLDEN_MESSAGE.as_bytes())?;
    let sc = ces_sign(&kp.sk, &sample_credential(), &sample_ceas())?;
    let x = ExtractionSet::new([0, 1]).expect("non-empty");
    let pres = ces_extract(&sc, &x, ExtractOptions::default())?;
    Ok(GoldenVectors {
        seed,
        secret_key: hex::encode(kp.sk.to_bytes()),
        public_key: hex::encode(kp.pk.to_bytes()),
        message: GOLDEN_MESSAGE.to_string(),
        signature: sig.to_hex(),
        counter: h.counter,
        signed_credential: sc.to_dto(),
        presentation: pres.to_dto(),
    })
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ToyPoint {
    pub x: u64,
    /// Canonical (even) root of `x^3 + b`, absent when it is a non-residue.
    pub y: Option<u64>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ToyHash {
    pub message: String,
    pub counter: u8,
    pub x: u64,
    pub y: u64,
    pub sign_bit: bool,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct ToyVectors {
    pub modulus: u64,
    pub b: u64,
    pub points: Vec<ToyPoint>,
    pub euler: Vec<(u64, u64)>,
    pub hashes: Vec<ToyHash>,
}

fn small(a: &BigUint) -> u64 {
    a.to_u64_digits().first().copied().unwrap_or(0)
}

pub fn toy_vectors(messages: usize) -> Result<ToyVectors, BlsError> {
    let f = BaseField::toy();
    let p = small(f.modulus());
    let points = (0..p)
        .map(|x| {
            let x_big = BigUint::from(x);
            ToyPoint {
                x,
                y: f.y_from_x(&x_big, false).map(|y| small(&y)),
            }
        })
        .collect();
    let euler = (0..p)
        .map(|a| (a, small(&f.euler_criterion(&BigUint::from(a)))))
        .collect();
    let hashes = (0..messages)
        .map(|i| {
            let message = format!("m{i}");
            let h = hash_to_curve(&f, message.as_bytes())?;
            Ok(ToyHash {
                message,
                counter: h.counter,
                x: small(&h.x),
                y: small(&h.y),
                sign_bit: h.sign_bit,
            })
        })
        .collect::<Result<_, BlsError>>()?;
    Ok(ToyVectors {
        modulus: p,
        b: small(f.b()),
        points,
        euler,
        hashes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ces::ces_verify;
    use crate::ces::ExtractedPresentation;

    #[test]
    fn golden_vectors_are_deterministic_and_valid() {
        let a = golden_vectors(GOLDEN_SEED).unwrap();
        assert_eq!(a, golden_vectors(GOLDEN_SEED).unwrap());
        assert_ne!(a.secret_key, golden_vectors(GOLDEN_SEED + 1).unwrap().secret_key);
        let kp = seeded_keypair(GOLDEN_SEED);
        let pres = ExtractedPresentation::from_dto(a.presentation).unwrap();
        assert_eq!(ces_verify(&kp.pk, &pres), Ok(()));
    }

    #[test]
    fn toy_vectors_cover_the_field() {
        let t = toy_vectors(16).unwrap();
        assert_eq!(t.points.len(), 11);
        for pt in &t.points {
            if let Some(y) = pt.y {
                assert_eq!(y * y % 11, (pt.x.pow(3) + 3) % 11);
                assert_eq!(y % 2, 0);
            }
        }
        for h in &t.hashes {
            assert_eq!(h.y * h.y % 11, (h.x.pow(3) + 3) % 11);
        }
    }
}
