//! Prime-field parameters for the curve `y^2 = x^3 + b`.
//!
//! The arithmetic here runs on arbitrary-precision integers so the same code
//! serves the BN-254 base field and the 11-element toy field used to check
//! hash-to-curve and residuosity logic by exhaustion.

use std::sync::LazyLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

/// BN-254 base field characteristic.
pub const BN254_P_HEX: &str = "30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47";
/// BN-254 group order.
pub const BN254_R_HEX: &str = "30644e72e131a029b85045b68181585d2833e84879b9709143e1f593f0000001";

static BN254: LazyLock<BaseField> = LazyLock::new(|| {
    BaseField::new(
        "bn254",
        BigUint::parse_bytes(BN254_P_HEX.as_bytes(), 16).expect("valid hex"),
        BigUint::from(3u32),
    )
});

/// A prime field `F_p` with `p ≡ 3 (mod 4)` together with the curve constant `b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseField {
    name: &'static str,
    modulus: BigUint,
    b: BigUint,
    bits: u32,
    euler_exponent: BigUint,
    sqrt_exponent: BigUint,
}

impl BaseField {
    /// Panics unless `modulus ≡ 3 (mod 4)`; the square-root shortcut depends on it.
    pub fn new(name: &'static str, modulus: BigUint, b: BigUint) -> Self {
        assert_eq!(
            &modulus % 4u32,
            BigUint::from(3u32),
            "modulus must be 3 mod 4"
        );
        let bits = modulus.bits() as u32;
        let euler_exponent = (&modulus - 1u32) >> 1;
        let sqrt_exponent = (&modulus + 1u32) >> 2;
        let b = b % &modulus;
        Self {
            name,
            modulus,
            b,
            bits,
            euler_exponent,
            sqrt_exponent,
        }
    }

    /// The BN-254 base field with `b = 3`.
    pub fn bn254() -> &'static BaseField {
        &BN254
    }

    /// Toy parameterisation `p = 11, b = 3`, small enough to check by exhaustion.
    pub fn toy() -> BaseField {
        BaseField::new("toy11", BigUint::from(11u32), BigUint::from(3u32))
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn b(&self) -> &BigUint {
        &self.b
    }

    /// Bit length of the modulus; also the number of digest bits read as a candidate x.
    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// `(p - 1) / 2`.
    pub fn euler_exponent(&self) -> &BigUint {
        &self.euler_exponent
    }

    pub fn contains(&self, a: &BigUint) -> bool {
        a < &self.modulus
    }

    pub fn reduce(&self, a: &BigUint) -> BigUint {
        a % &self.modulus
    }

    pub fn mul(&self, a: &BigUint, b: &BigUint) -> BigUint {
        (a * b) % &self.modulus
    }

    pub fn neg(&self, a: &BigUint) -> BigUint {
        let a = self.reduce(a);
        if a.is_zero() {
            a
        } else {
            &self.modulus - a
        }
    }

    pub fn pow(&self, base: &BigUint, exp: &BigUint) -> BigUint {
        base.modpow(exp, &self.modulus)
    }

    /// Right-hand side of the curve equation, `x^3 + b mod p`.
    pub fn rhs(&self, x: &BigUint) -> BigUint {
        let x = self.reduce(x);
        (&x * &x * &x + &self.b) % &self.modulus
    }

    /// `a^((p-1)/2) mod p`: 1 for nonzero residues, `p - 1` for non-residues, 0 for 0.
    pub fn euler_criterion(&self, a: &BigUint) -> BigUint {
        self.pow(a, &self.euler_exponent)
    }

    pub fn is_nonzero_square(&self, a: &BigUint) -> bool {
        self.euler_criterion(a).is_one()
    }

    /// Canonical square root: the root with least-significant bit 0.
    ///
    /// Returns `None` for non-residues. `sqrt(0) = 0`.
    pub fn sqrt(&self, a: &BigUint) -> Option<BigUint> {
        let a = self.reduce(a);
        if a.is_zero() {
            return Some(a);
        }
        let root = self.pow(&a, &self.sqrt_exponent);
        if (&root * &root) % &self.modulus != a {
            return None;
        }
        Some(if root.is_odd() {
            &self.modulus - root
        } else {
            root
        })
    }

    /// `(-1)^sign_bit * sqrt(rhs(x))`, or `None` when `x` is not an abscissa.
    pub fn y_from_x(&self, x: &BigUint, sign_bit: bool) -> Option<BigUint> {
        let root = self.sqrt(&self.rhs(x))?;
        Some(if sign_bit { self.neg(&root) } else { root })
    }
}

/// Big-endian 32-byte encoding; panics if the value does not fit.
pub fn to_bytes32(a: &BigUint) -> [u8; 32] {
    let bytes = a.to_bytes_be();
    assert!(bytes.len() <= 32, "value wider than 256 bits");
    let mut out = [0u8; 32];
    out[32 - bytes.len()..].copy_from_slice(&bytes);
    out
}
