//! Bits and 32-bit words inside a constraint system, with constant folding.

use ark_bn254::Fr;
use ark_ff::{One, Zero};
use std::ops::Not;

use super::r1cs::{pow2, Builder, Lc, Var};

/// A bit that is either a known constant or a (possibly negated) boolean variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bit {
    Const(bool),
    Var { var: Var, value: bool, negated: bool },
}

impl Not for Bit {
    type Output = Bit;

    fn not(self) -> Bit {
        match self {
            Bit::Const(b) => Bit::Const(!b),
            Bit::Var { var, value, negated } => Bit::Var {
                var,
                value,
                negated: !negated,
            },
        }
    }
}

impl Bit {
    pub fn value(&self) -> bool {
        match *self {
            Bit::Const(b) => b,
            Bit::Var { value, negated, .. } => value ^ negated,
        }
    }

    pub fn lc(&self) -> Lc {
        match *self {
            Bit::Const(b) => Lc::constant(if b { Fr::one() } else { Fr::zero() }),
            Bit::Var { var, negated: false, .. } => Lc::var(var),
            Bit::Var { var, negated: true, .. } => {
                let mut lc = Lc::constant(Fr::one());
                lc.push(var, -Fr::one());
                lc
            }
        }
    }

    fn fresh(var: Var, value: bool) -> Bit {
        Bit::Var {
            var,
            value,
            negated: false,
        }
    }

    /// Strips the negation: `(raw, negated)`.
    fn raw(self) -> (Bit, bool) {
        match self {
            Bit::Var { var, value, negated } => (Bit::fresh(var, value), negated),
            c => (c, false),
        }
    }

    fn var(&self) -> Option<Var> {
        match *self {
            Bit::Var { var, .. } => Some(var),
            Bit::Const(_) => None,
        }
    }
}

fn fr_bool(b: bool) -> Fr {
    if b {
        Fr::one()
    } else {
        Fr::zero()
    }
}

pub fn alloc_bit(b: &mut Builder, value: bool) -> Bit {
    let v = b.alloc(fr_bool(value));
    b.enforce_boolean(v);
    Bit::fresh(v, value)
}

/// Eight bits per byte, most significant first.
pub fn alloc_bytes(b: &mut Builder, bytes: &[u8]) -> Vec<Bit> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| byte >> i & 1 == 1))
        .map(|v| alloc_bit(b, v))
        .collect()
}

pub fn const_bytes(bytes: &[u8]) -> Vec<Bit> {
    bytes
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| Bit::Const(byte >> i & 1 == 1)))
        .collect()
}

pub fn enforce_bit_equals(b: &mut Builder, x: &Bit, value: bool) {
    match x {
        Bit::Const(c) if *c == value => {}
        _ => b.enforce_equal(x.lc(), &Lc::constant(fr_bool(value))),
    }
}

pub fn xor(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    let ((x, nx), (y, ny)) = (x.raw(), y.raw());
    let flip = nx ^ ny;
    let out = match (x, y) {
        (Bit::Const(c), other) | (other, Bit::Const(c)) => {
            if c {
                other.not()
            } else {
                other
            }
        }
        _ if x.var() == y.var() => Bit::Const(false),
        _ => {
            let value = x.value() ^ y.value();
            let z = b.alloc(fr_bool(value));
            // 2xy = x + y - z
            b.enforce(
                x.lc().scaled(Fr::from(2u64)),
                y.lc(),
                x.lc() + &y.lc() - &Lc::var(z),
            );
            Bit::fresh(z, value)
        }
    };
    if flip {
        out.not()
    } else {
        out
    }
}

pub fn and(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    match (x, y) {
        (Bit::Const(false), _) | (_, Bit::Const(false)) => Bit::Const(false),
        (Bit::Const(true), o) | (o, Bit::Const(true)) => o,
        _ if x.var() == y.var() => {
            if x == y {
                x
            } else {
                Bit::Const(false)
            }
        }
        _ => {
            let value = x.value() && y.value();
            let z = b.alloc(fr_bool(value));
            b.enforce(x.lc(), y.lc(), Lc::var(z));
            Bit::fresh(z, value)
        }
    }
}

pub fn or(b: &mut Builder, x: Bit, y: Bit) -> Bit {
    and(b, x.not(), y.not()).not()
}

/// `e ? f : g`.
pub fn ch(b: &mut Builder, e: Bit, f: Bit, g: Bit) -> Bit {
    if let Bit::Const(c) = e {
        return if c { f } else { g };
    }
    if f == g {
        return f;
    }
    match (f, g) {
        (Bit::Const(true), Bit::Const(false)) => return e,
        (Bit::Const(false), Bit::Const(true)) => return e.not(),
        _ => {}
    }
    let value = if e.value() { f.value() } else { g.value() };
    let z = b.alloc(fr_bool(value));
    // e * (f - g) = z - g
    b.enforce(e.lc(), f.lc() - &g.lc(), Lc::var(z) - &g.lc());
    Bit::fresh(z, value)
}

/// Majority of three bits.
pub fn maj(b: &mut Builder, x: Bit, y: Bit, z: Bit) -> Bit {
    let mut bits = [x, y, z];
    bits.sort_by_key(|bit| matches!(bit, Bit::Var { .. }));
    match bits {
        [Bit::Const(c1), Bit::Const(c2), o] => {
            if c1 == c2 {
                Bit::Const(c1)
            } else {
                o
            }
        }
        [Bit::Const(false), p, q] => and(b, p, q),
        [Bit::Const(true), p, q] => or(b, p, q),
        [x, y, z] => {
            let value = (x.value() as u8 + y.value() as u8 + z.value() as u8) >= 2;
            let u = b.product(&y.lc(), &z.lc());
            let out = b.alloc(fr_bool(value));
            // x * (y + z - 2yz) = out - yz
            b.enforce(
                x.lc(),
                y.lc() + &z.lc() - &u.scaled(Fr::from(2u64)),
                Lc::var(out) - &u,
            );
            Bit::fresh(out, value)
        }
    }
}

/// 32 bits, least significant first.
pub type Word = [Bit; 32];

pub fn word_const(v: u32) -> Word {
    std::array::from_fn(|i| Bit::Const(v >> i & 1 == 1))
}

pub fn word_value(w: &Word) -> u32 {
    w.iter()
        .enumerate()
        .fold(0, |acc, (i, bit)| acc | (bit.value() as u32) << i)
}

pub fn rotr(w: &Word, n: usize) -> Word {
    std::array::from_fn(|i| w[(i + n) % 32])
}

pub fn shr(w: &Word, n: usize) -> Word {
    std::array::from_fn(|i| if i + n < 32 { w[i + n] } else { Bit::Const(false) })
}

pub fn xor_words(b: &mut Builder, x: &Word, y: &Word) -> Word {
    std::array::from_fn(|i| xor(b, x[i], y[i]))
}

/// Sum of `words` plus `konst` modulo `2^32`.
pub fn add_words(b: &mut Builder, words: &[&Word], konst: u32) -> Word {
    let mut lc = Lc::constant(Fr::from(konst as u64));
    let mut value = konst as u64;
    let mut max = konst as u64;
    let mut all_const = true;
    for w in words {
        for (i, bit) in w.iter().enumerate() {
            lc.add_scaled(&bit.lc(), pow2(i as u32));
            value += (bit.value() as u64) << i;
            match bit {
                Bit::Const(c) => max += (*c as u64) << i,
                Bit::Var { .. } => {
                    max += 1 << i;
                    all_const = false;
                }
            }
        }
    }
    if all_const {
        return word_const(value as u32);
    }
    let out: Word = std::array::from_fn(|i| alloc_bit(b, value >> i & 1 == 1));
    let carry_bits = 64 - (max >> 32).leading_zeros();
    for (i, bit) in out.iter().enumerate() {
        lc.add_scaled(&bit.lc(), -pow2(i as u32));
    }
    for j in 0..carry_bits {
        let c = alloc_bit(b, value >> (32 + j) & 1 == 1);
        lc.add_scaled(&c.lc(), -pow2(32 + j));
    }
    b.enforce_zero(lc);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check(b: Builder) {
        let (cs, z) = b.finish();
        assert_eq!(cs.first_violation(&z), None);
    }

    #[test]
    fn gates_match_truth_tables() {
        for bits in 0u8..8 {
            let (x, y, z) = (bits & 1 == 1, bits & 2 == 2, bits & 4 == 4);
            let mut b = Builder::new();
            let (vx, vy, vz) = (alloc_bit(&mut b, x), alloc_bit(&mut b, y), alloc_bit(&mut b, z));
            assert_eq!(xor(&mut b, vx, vy).value(), x ^ y);
            assert_eq!(xor(&mut b, vx.not(), vy).value(), !x ^ y);
            assert_eq!(and(&mut b, vx, vy.not()).value(), x && !y);
            assert_eq!(or(&mut b, vx, vy).value(), x || y);
            assert_eq!(ch(&mut b, vx, vy, vz).value(), if x { y } else { z });
            assert_eq!(maj(&mut b, vx, vy, vz).value(), (x as u8 + y as u8 + z as u8) >= 2);
            for c in [false, true] {
                assert_eq!(maj(&mut b, vx, Bit::Const(c), vz).value(), (x as u8 + c as u8 + z as u8) >= 2);
                assert_eq!(ch(&mut b, vx, Bit::Const(c), vz).value(), if x { c } else { z });
                assert_eq!(ch(&mut b, vx, vy, Bit::Const(c)).value(), if x { y } else { c });
            }
            check(b);
        }
    }

    #[test]
    fn constant_folding_adds_no_constraints() {
        let mut b = Builder::new();
        let x = alloc_bit(&mut b, true);
        let before = b.num_constraints();
        assert_eq!(xor(&mut b, x, x), Bit::Const(false));
        assert_eq!(xor(&mut b, x, x.not()), Bit::Const(true));
        assert_eq!(xor(&mut b, x, Bit::Const(true)), x.not());
        assert_eq!(and(&mut b, x, Bit::Const(true)), x);
        assert_eq!(ch(&mut b, x, Bit::Const(true), Bit::Const(false)), x);
        assert_eq!(maj(&mut b, Bit::Const(true), Bit::Const(true), x), Bit::Const(true));
        assert_eq!(b.num_constraints(), before);
    }

    #[test]
    fn add_words_wraps() {
        let mut b = Builder::new();
        let vals = [0xffff_fff0u32, 0x20, 0x8000_0000];
        let words: Vec<Word> = vals
            .iter()
            .map(|&v| std::array::from_fn(|i| alloc_bit(&mut b, v >> i & 1 == 1)))
            .collect();
        let refs: Vec<&Word> = words.iter().collect();
        let sum = add_words(&mut b, &refs, 7);
        assert_eq!(
            word_value(&sum),
            vals.iter().fold(7u32, |a, &v| a.wrapping_add(v))
        );
        check(b);
    }

    #[test]
    fn wrong_xor_output_violates() {
        let mut b = Builder::new();
        let x = alloc_bit(&mut b, true);
        let y = alloc_bit(&mut b, false);
        let z = xor(&mut b, x, y);
        let (cs, mut w) = b.finish();
        let Bit::Var { var, .. } = z else { panic!() };
        w[var as usize] = Fr::zero();
        assert!(!cs.is_satisfied(&w));
    }
}
