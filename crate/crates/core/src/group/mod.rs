//! Pairing-friendly groups G1, G2, GT over a BN-254-class curve.
//!
//! Everything above this module talks to the groups through the concrete
//! types re-exported here. [`PairingBackend`] names the operations those
//! modules rely on so a different vetted implementation can be slotted in.

mod bn254;
pub mod field;

use num_bigint::BigUint;
use thiserror::Error;

pub use bn254::{
    pairing, pairing_product_is_identity, G1Point, G2Point, Gt, Scalar, G1_COMPRESSED_LEN,
    G2_UNCOMPRESSED_LEN,
};
pub use field::BaseField;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("point is not in the prime-order subgroup")]
    NotInSubgroup,
    #[error("field element is not reduced modulo p")]
    NonCanonicalField,
    #[error("scalar is not reduced modulo r")]
    ScalarOutOfRange,
    #[error("invalid encoding: {0}")]
    InvalidEncoding(&'static str),
}

/// Operations the signature layers need from a pairing group.
pub trait PairingBackend {
    type Scalar;
    type G1;
    type G2;
    type Gt: PartialEq;

    fn g1_generator() -> Self::G1;
    fn g2_generator() -> Self::G2;
    fn g1_add(a: &Self::G1, b: &Self::G1) -> Self::G1;
    fn g1_scalar_mul(k: &Self::Scalar, p: &Self::G1) -> Self::G1;
    fn g2_scalar_mul(k: &Self::Scalar, q: &Self::G2) -> Self::G2;
    fn pairing(p: &Self::G1, q: &Self::G2) -> Self::Gt;
    fn pairing_product_is_identity(pairs: &[(Self::G1, Self::G2)]) -> bool;
    fn g1_compress(p: &Self::G1) -> [u8; 32];
    fn g1_decompress(bytes: &[u8; 32]) -> Result<Self::G1, GroupError>;
}

/// The shipped backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct Bn254;

impl PairingBackend for Bn254 {
    type Scalar = Scalar;
    type G1 = G1Point;
    type G2 = G2Point;
    type Gt = Gt;

    fn g1_generator() -> G1Point {
        G1Point::generator()
    }

    fn g2_generator() -> G2Point {
        G2Point::generator()
    }

    fn g1_add(a: &G1Point, b: &G1Point) -> G1Point {
        *a + *b
    }

    fn g1_scalar_mul(k: &Scalar, p: &G1Point) -> G1Point {
        p.mul(k)
    }

    fn g2_scalar_mul(k: &Scalar, q: &G2Point) -> G2Point {
        q.mul(k)
    }

    fn pairing(p: &G1Point, q: &G2Point) -> Gt {
        pairing(p, q)
    }

    fn pairing_product_is_identity(pairs: &[(G1Point, G2Point)]) -> bool {
        pairing_product_is_identity(pairs)
    }

    fn g1_compress(p: &G1Point) -> [u8; 32] {
        p.compress()
    }

    fn g1_decompress(bytes: &[u8; 32]) -> Result<G1Point, GroupError> {
        G1Point::from_compressed(bytes)
    }
}

/// Public parameters of the instantiated group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupParams {
    pub p: BigUint,
    pub r: BigUint,
    pub b: u64,
    pub g1: G1Point,
    pub g2: G2Point,
    pub embedding_degree: u32,
}

impl GroupParams {
    pub fn bn254() -> Self {
        GroupParams {
            p: BaseField::bn254().modulus().clone(),
            r: BigUint::parse_bytes(field::BN254_R_HEX.as_bytes(), 16).expect("valid hex"),
            b: 3,
            g1: G1Point::generator(),
            g2: G2Point::generator(),
            embedding_degree: 12,
        }
    }

    /// Largest `s` with `2^s | r - 1`.
    pub fn two_adicity(&self) -> u64 {
        (&self.r - 1u32).trailing_zeros().unwrap_or(0)
    }
}

pub fn g1_add(a: &G1Point, b: &G1Point) -> G1Point {
    Bn254::g1_add(a, b)
}

pub fn g1_scalar_mul(k: &Scalar, p: &G1Point) -> G1Point {
    Bn254::g1_scalar_mul(k, p)
}

pub fn g2_scalar_mul(k: &Scalar, q: &G2Point) -> G2Point {
    Bn254::g2_scalar_mul(k, q)
}

/// Canonical square root in the BN-254 base field.
pub fn sqrt_fp(a: &BigUint) -> Option<BigUint> {
    BaseField::bn254().sqrt(a)
}

pub fn g1_compress(p: &G1Point) -> [u8; 32] {
    p.compress()
}

pub fn g1_decompress(x_bytes: &[u8; 32], sign_bit: bool) -> Result<G1Point, GroupError> {
    if x_bytes[0] & 0xc0 != 0 {
        return Err(GroupError::NonCanonicalField);
    }
    G1Point::decompress(&BigUint::from_bytes_be(x_bytes), sign_bit)
}
