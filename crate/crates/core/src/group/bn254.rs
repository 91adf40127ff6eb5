//! BN-254 instantiation backed by arkworks.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use ark_bn254::{Fq, Fq2, Fr, G1Affine, G1Projective, G2Affine};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AffineRepr, CurveGroup, PrimeGroup};
use ark_ff::{BigInteger, PrimeField, Zero};
use num_bigint::BigUint;
use num_integer::Integer;
use rand::{CryptoRng, RngCore};

use super::field::{to_bytes32, BaseField};
use super::GroupError;

/// Compressed G1 flag: y is the odd root.
const SIGN_FLAG: u8 = 0x80;
/// Compressed G1 flag: point at infinity.
const IDENTITY_FLAG: u8 = 0x40;

pub const G1_COMPRESSED_LEN: usize = 32;
pub const G2_UNCOMPRESSED_LEN: usize = 128;

/// Integer modulo the group order `r`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Scalar(pub(crate) Fr);

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Fr::zero())
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::from(v))
    }

    /// Uniform nonzero scalar: 64 random bytes reduced mod r, retried on zero.
    pub fn random_nonzero<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let mut wide = [0u8; 64];
            rng.fill_bytes(&mut wide);
            let s = Fr::from_be_bytes_mod_order(&wide);
            if !s.is_zero() {
                return Scalar(s);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn to_bytes(&self) -> [u8; 32] {
        let mut out = [0u8; 32];
        out.copy_from_slice(&self.0.into_bigint().to_bytes_be());
        out
    }

    /// Strict decoding: values `>= r` are rejected.
    pub fn from_bytes(bytes: &[u8; 32]) -> Result<Self, GroupError> {
        let v = BigUint::from_bytes_be(bytes);
        if v >= Fr::MODULUS.into() {
            return Err(GroupError::ScalarOutOfRange);
        }
        Ok(Scalar(Fr::from(v)))
    }

    pub fn to_biguint(&self) -> BigUint {
        self.0.into()
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

fn fq_to_biguint(v: &Fq) -> BigUint {
    (*v).into()
}

fn fq_from_bytes(bytes: &[u8]) -> Result<Fq, GroupError> {
    let v = BigUint::from_bytes_be(bytes);
    if &v >= BaseField::bn254().modulus() {
        return Err(GroupError::NonCanonicalField);
    }
    Ok(Fq::from(v))
}

fn fq_to_bytes(v: &Fq) -> [u8; 32] {
    to_bytes32(&fq_to_biguint(v))
}

/// A point of G1 (the whole curve `y^2 = x^3 + 3` over F_p, cofactor 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct G1Point(pub(crate) G1Affine);

impl G1Point {
    pub fn identity() -> Self {
        G1Point(G1Affine::identity())
    }

    pub fn generator() -> Self {
        G1Point(G1Affine::generator())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    /// Builds a point from affine coordinates, checking the curve equation.
    pub fn from_affine(x: &BigUint, y: &BigUint) -> Result<Self, GroupError> {
        let field = BaseField::bn254();
        if !field.contains(x) || !field.contains(y) {
            return Err(GroupError::NonCanonicalField);
        }
        let p = G1Affine::new_unchecked(Fq::from(x.clone()), Fq::from(y.clone()));
        if !p.is_on_curve() {
            return Err(GroupError::NotOnCurve);
        }
        Ok(G1Point(p))
    }

    /// Affine coordinates, `None` for the identity.
    pub fn affine(&self) -> Option<(BigUint, BigUint)> {
        self.0
            .xy()
            .map(|(x, y)| (fq_to_biguint(&x), fq_to_biguint(&y)))
    }

    /// Point with abscissa `x` and ordinate `(-1)^sign_bit * sqrt(x^3 + 3)`.
    pub fn decompress(x: &BigUint, sign_bit: bool) -> Result<Self, GroupError> {
        let field = BaseField::bn254();
        if !field.contains(x) {
            return Err(GroupError::NonCanonicalField);
        }
        let y = field.y_from_x(x, sign_bit).ok_or(GroupError::NotOnCurve)?;
        G1Point::from_affine(x, &y)
    }

    /// 32-byte x with the sign flag in the top bit.
    pub fn compress(&self) -> [u8; 32] {
        match self.affine() {
            None => {
                let mut out = [0u8; 32];
                out[0] = IDENTITY_FLAG;
                out
            }
            Some((x, y)) => {
                let mut out = to_bytes32(&x);
                if y.is_odd() {
                    out[0] |= SIGN_FLAG;
                }
                out
            }
        }
    }

    pub fn from_compressed(bytes: &[u8; 32]) -> Result<Self, GroupError> {
        let flags = bytes[0] & (SIGN_FLAG | IDENTITY_FLAG);
        if flags & IDENTITY_FLAG != 0 {
            let clean = bytes[0] == IDENTITY_FLAG && bytes[1..].iter().all(|b| *b == 0);
            return if clean {
                Ok(G1Point::identity())
            } else {
                Err(GroupError::InvalidEncoding("malformed identity encoding"))
            };
        }
        let mut x_bytes = *bytes;
        x_bytes[0] &= !(SIGN_FLAG | IDENTITY_FLAG);
        let x = BigUint::from_bytes_be(&x_bytes);
        G1Point::decompress(&x, flags & SIGN_FLAG != 0)
    }

    pub fn mul(&self, k: &Scalar) -> Self {
        G1Point((self.0 * k.0).into_affine())
    }

    pub(crate) fn projective(&self) -> G1Projective {
        self.0.into_group()
    }
}

impl fmt::Debug for G1Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G1Point({})", hex::encode(self.compress()))
    }
}

impl Add for G1Point {
    type Output = G1Point;
    fn add(self, rhs: G1Point) -> G1Point {
        G1Point((self.0 + rhs.0).into_affine())
    }
}

impl AddAssign for G1Point {
    fn add_assign(&mut self, rhs: G1Point) {
        *self = *self + rhs;
    }
}

impl Sub for G1Point {
    type Output = G1Point;
    fn sub(self, rhs: G1Point) -> G1Point {
        G1Point((self.0.into_group() - rhs.0).into_affine())
    }
}

impl Neg for G1Point {
    type Output = G1Point;
    fn neg(self) -> G1Point {
        G1Point(-self.0)
    }
}

impl std::iter::Sum for G1Point {
    fn sum<I: Iterator<Item = G1Point>>(iter: I) -> G1Point {
        let acc: G1Projective = iter.map(|p| p.projective()).sum();
        G1Point(acc.into_affine())
    }
}

/// A point of the r-order subgroup of the sextic twist over F_p^2.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct G2Point(pub(crate) G2Affine);

impl G2Point {
    pub fn identity() -> Self {
        G2Point(G2Affine::identity())
    }

    pub fn generator() -> Self {
        G2Point(G2Affine::generator())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn mul(&self, k: &Scalar) -> Self {
        G2Point((self.0 * k.0).into_affine())
    }

    /// `x.c1 ‖ x.c0 ‖ y.c1 ‖ y.c0`, each 32-byte big-endian; identity is all zeros.
    pub fn to_bytes(&self) -> [u8; G2_UNCOMPRESSED_LEN] {
        let mut out = [0u8; G2_UNCOMPRESSED_LEN];
        if let Some((x, y)) = self.0.xy() {
            out[0..32].copy_from_slice(&fq_to_bytes(&x.c1));
            out[32..64].copy_from_slice(&fq_to_bytes(&x.c0));
            out[64..96].copy_from_slice(&fq_to_bytes(&y.c1));
            out[96..128].copy_from_slice(&fq_to_bytes(&y.c0));
        }
        out
    }

    /// Decodes and validates curve membership and the subgroup.
    pub fn from_bytes(bytes: &[u8; G2_UNCOMPRESSED_LEN]) -> Result<Self, GroupError> {
        if bytes.iter().all(|b| *b == 0) {
            return Ok(G2Point::identity());
        }
        let x = Fq2::new(fq_from_bytes(&bytes[32..64])?, fq_from_bytes(&bytes[0..32])?);
        let y = Fq2::new(fq_from_bytes(&bytes[96..128])?, fq_from_bytes(&bytes[64..96])?);
        let p = G2Affine::new_unchecked(x, y);
        if !p.is_on_curve() {
            return Err(GroupError::NotOnCurve);
        }
        if !p.is_in_correct_subgroup_assuming_on_curve() {
            return Err(GroupError::NotInSubgroup);
        }
        Ok(G2Point(p))
    }
}

impl fmt::Debug for G2Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "G2Point({})", hex::encode(self.to_bytes()))
    }
}

impl Add for G2Point {
    type Output = G2Point;
    fn add(self, rhs: G2Point) -> G2Point {
        G2Point((self.0 + rhs.0).into_affine())
    }
}

impl Neg for G2Point {
    type Output = G2Point;
    fn neg(self) -> G2Point {
        G2Point(-self.0)
    }
}

/// Element of the order-r subgroup of F_p^12.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Gt(pub(crate) PairingOutput<ark_bn254::Bn254>);

impl Gt {
    pub fn identity() -> Self {
        Gt(PairingOutput::zero())
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_zero()
    }

    pub fn pow(&self, k: &Scalar) -> Self {
        Gt(self.0.mul_bigint(k.0.into_bigint()))
    }
}

impl Mul for Gt {
    type Output = Gt;
    // PairingOutput is written additively.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Gt) -> Gt {
        Gt(self.0 + rhs.0)
    }
}

pub fn pairing(p: &G1Point, q: &G2Point) -> Gt {
    Gt(ark_bn254::Bn254::pairing(p.0, q.0))
}

/// `prod e(P_i, Q_i) == 1`, computed with one shared final exponentiation.
pub fn pairing_product_is_identity(pairs: &[(G1Point, G2Point)]) -> bool {
    let (g1, g2): (Vec<G1Affine>, Vec<G2Affine>) = pairs.iter().map(|(p, q)| (p.0, q.0)).unzip();
    ark_bn254::Bn254::multi_pairing(g1, g2).is_zero()
}
