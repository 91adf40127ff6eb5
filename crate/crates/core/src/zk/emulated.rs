//! Base-field arithmetic emulated with four 64-bit limbs inside the
//! scalar-field constraint system.
//!
//! A multiplication `a * b + c = q * p + r` is certified by the prover's
//! `(q, r)`: both are range-checked limb by limb, `r < p` is checked with a
//! borrow chain, and the integer identity is checked column by column with
//! signed carries. Every intermediate stays far below the scalar modulus, so
//! the identity holds over the integers, not just modulo the scalar field.

use ark_bn254::Fr;
use ark_ff::{One, Zero};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Signed;

use super::r1cs::{pow2, Builder, Lc};

pub const LIMBS: usize = 4;
pub const LIMB_BITS: u32 = 64;
/// Column carries live in `[-2^67, 2^67)` and are stored offset by `2^67`.
const CARRY_BITS: u32 = 68;
const CARRY_OFFSET_LOG: u32 = 67;

/// Low 256 bits of `v` as little-endian 64-bit limbs.
pub fn limbs_of(v: &BigUint) -> [u64; LIMBS] {
    let digits = v.to_u64_digits();
    std::array::from_fn(|i| digits.get(i).copied().unwrap_or(0))
}

fn from_limbs(l: &[u64; LIMBS]) -> BigUint {
    l.iter()
        .rev()
        .fold(BigUint::zero(), |acc, &x| (acc << LIMB_BITS) + x)
}

/// An emulated field element: limb combinations plus the value they carry.
#[derive(Clone, Debug)]
pub struct FpVar {
    pub limbs: [Lc; LIMBS],
    pub value: BigUint,
}

impl FpVar {
    pub fn constant(v: &BigUint) -> FpVar {
        let l = limbs_of(v);
        FpVar {
            limbs: l.map(|x| Lc::constant(Fr::from(x))),
            value: from_limbs(&l),
        }
    }

    /// Limbs that are already range-bounded by the caller.
    pub fn from_limbs(limbs: [Lc; LIMBS], value: BigUint) -> FpVar {
        FpVar { limbs, value }
    }

    fn limb_values(&self) -> [u64; LIMBS] {
        limbs_of(&self.value)
    }

    /// `self == v` limb by limb.
    pub fn enforce_equals_constant(&self, b: &mut Builder, v: &BigUint) {
        for (lc, x) in self.limbs.iter().zip(limbs_of(v)) {
            b.enforce_equal(lc.clone(), &Lc::constant(Fr::from(x)));
        }
    }
}

/// Four limb variables, each tied to a 64-bit boolean decomposition.
pub fn alloc_range_checked(b: &mut Builder, value: &BigUint) -> FpVar {
    let l = limbs_of(value);
    let limbs = l.map(|x| {
        let v = b.alloc(Fr::from(x));
        let (_, sum) = b.alloc_bits(&BigUint::from(x), LIMB_BITS);
        b.enforce_equal(Lc::var(v), &sum);
        Lc::var(v)
    });
    FpVar {
        limbs,
        value: from_limbs(&l),
    }
}

/// `v < p`, via `v + d = p - 1` with `d` range-checked and no final carry.
pub fn enforce_lt_modulus(b: &mut Builder, v: &FpVar, p: &BigUint) {
    let pm1 = limbs_of(&(p - 1u32));
    let vl = v.limb_values();
    let modulus = BigUint::one() << (LIMB_BITS * LIMBS as u32);
    let d_val = ((p - 1u32) + &modulus - &v.value) % &modulus;
    let dl = limbs_of(&d_val);
    let mut carry_in: Option<(Lc, u128)> = None;
    for k in 0..LIMBS {
        let (_, d_lc) = b.alloc_bits(&BigUint::from(dl[k]), LIMB_BITS);
        let (cin_lc, cin) = carry_in.take().unwrap_or((Lc::zero(), 0));
        let sum = vl[k] as u128 + dl[k] as u128 + cin;
        let mut lc = v.limbs[k].clone() + &d_lc + &cin_lc;
        lc.add_constant(-Fr::from(pm1[k]));
        if k + 1 < LIMBS {
            let c = (sum >> LIMB_BITS) as u64;
            let cv = b.alloc(Fr::from(c));
            b.enforce_boolean(cv);
            lc.push(cv, -pow2(LIMB_BITS));
            carry_in = Some((Lc::var(cv), c as u128));
        }
        b.enforce_zero(lc);
    }
}

/// Certifies `a * x + c = q * p + r` for prover-supplied `(q, r)` and
/// returns `r`, range-checked and reduced below `p`.
///
/// `square` reuses the symmetric limb products when `a` and `x` are the same value.
pub fn mul_add(
    b: &mut Builder,
    a: &FpVar,
    x: &FpVar,
    square: bool,
    c: &BigUint,
    (q, r): (&BigUint, &BigUint),
    p: &BigUint,
) -> FpVar {
    let qv = alloc_range_checked(b, q);
    let rv = alloc_range_checked(b, r);
    enforce_lt_modulus(b, &rv, p);

    let al = a.limb_values();
    let xl = x.limb_values();
    let ql = qv.limb_values();
    let rl = rv.limb_values();
    let cl = limbs_of(c);
    let pl = limbs_of(p);

    let columns = 2 * LIMBS - 1;
    let mut col_lc: Vec<Lc> = vec![Lc::zero(); columns];
    let mut col_val: Vec<BigInt> = vec![BigInt::zero(); columns];
    for i in 0..LIMBS {
        for j in 0..LIMBS {
            if square && j < i {
                continue;
            }
            let t = b.product(&a.limbs[i], &x.limbs[j]);
            let mut tv = BigInt::from(al[i]) * BigInt::from(xl[j]);
            let mut scale = Fr::one();
            if square && i != j {
                scale = Fr::from(2u64);
                tv *= 2;
            }
            col_lc[i + j].add_scaled(&t, scale);
            col_val[i + j] += tv;
        }
    }
    for i in 0..LIMBS {
        for j in 0..LIMBS {
            col_lc[i + j].add_scaled(&qv.limbs[i], -Fr::from(pl[j]));
            col_val[i + j] -= BigInt::from(ql[i]) * BigInt::from(pl[j]);
        }
    }
    for k in 0..LIMBS {
        col_lc[k].add_constant(Fr::from(cl[k]));
        col_val[k] += BigInt::from(cl[k]);
        col_lc[k].add_scaled(&rv.limbs[k], -Fr::one());
        col_val[k] -= BigInt::from(rl[k]);
    }

    let offset = BigInt::one() << CARRY_OFFSET_LOG;
    let carry_mod = BigInt::one() << CARRY_BITS;
    let mut carry_in: Option<(Lc, BigInt)> = None;
    for k in 0..columns {
        let mut lc = std::mem::take(&mut col_lc[k]);
        let mut total = col_val[k].clone();
        if let Some((cl, cv)) = carry_in.take() {
            lc = lc + &cl;
            total += cv;
        }
        if k + 1 < columns {
            let carry = total.div_floor(&(BigInt::one() << LIMB_BITS));
            let stored = (&carry + &offset).mod_floor(&carry_mod);
            debug_assert!(!stored.is_negative());
            let (_, bits) = b.alloc_bits(stored.magnitude(), CARRY_BITS);
            let mut carry_lc = bits;
            carry_lc.add_constant(-pow2(CARRY_OFFSET_LOG));
            lc.add_scaled(&carry_lc, -pow2(LIMB_BITS));
            carry_in = Some((carry_lc, carry));
        }
        b.enforce_zero(lc);
    }
    rv
}
