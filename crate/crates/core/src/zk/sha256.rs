//! SHA-256 as constraints over individual bits.

use super::boolean::{add_words, ch, maj, rotr, shr, word_const, xor_words, Bit, Word};
use super::r1cs::Builder;

const K: [u32; 64] = [
    0x428a2f98, 0x71374491, 0xb5c0fbcf, 0xe9b5dba5, 0x3956c25b, 0x59f111f1, 0x923f82a4, 0xab1c5ed5,
    0xd807aa98, 0x12835b01, 0x243185be, 0x550c7dc3, 0x72be5d74, 0x80deb1fe, 0x9bdc06a7, 0xc19bf174,
    0xe49b69c1, 0xefbe4786, 0x0fc19dc6, 0x240ca1cc, 0x2de92c6f, 0x4a7484aa, 0x5cb0a9dc, 0x76f988da,
    0x983e5152, 0xa831c66d, 0xb00327c8, 0xbf597fc7, 0xc6e00bf3, 0xd5a79147, 0x06ca6351, 0x14292967,
    0x27b70a85, 0x2e1b2138, 0x4d2c6dfc, 0x53380d13, 0x650a7354, 0x766a0abb, 0x81c2c92e, 0x92722c85,
    0xa2bfe8a1, 0xa81a664b, 0xc24b8b70, 0xc76c51a3, 0xd192e819, 0xd6990624, 0xf40e3585, 0x106aa070,
    0x19a4c116, 0x1e376c08, 0x2748774c, 0x34b0bcb5, 0x391c0cb3, 0x4ed8aa4a, 0x5b9cca4f, 0x682e6ff3,
    0x748f82ee, 0x78a5636f, 0x84c87814, 0x8cc70208, 0x90befffa, 0xa4506ceb, 0xbef9a3f7, 0xc67178f2,
];

const IV: [u32; 8] = [
    0x6a09e667, 0xbb67ae85, 0x3c6ef372, 0xa54ff53a, 0x510e527f, 0x9b05688c, 0x1f83d9ab, 0x5be0cd19,
];

/// Number of 64-byte blocks after padding a message of `len` bytes.
pub fn block_count(len: usize) -> usize {
    (len + 9).div_ceil(64)
}

fn xor3(b: &mut Builder, x: &Word, y: &Word, z: &Word) -> Word {
    let t = xor_words(b, x, y);
    xor_words(b, &t, z)
}

fn big_sigma(b: &mut Builder, w: &Word, r: [usize; 3]) -> Word {
    xor3(b, &rotr(w, r[0]), &rotr(w, r[1]), &rotr(w, r[2]))
}

fn small_sigma(b: &mut Builder, w: &Word, r: [usize; 2], s: usize) -> Word {
    xor3(b, &rotr(w, r[0]), &rotr(w, r[1]), &shr(w, s))
}

/// Big-endian word from 32 message bits (most significant first).
fn word_from_bits(bits: &[Bit]) -> Word {
    std::array::from_fn(|i| bits[31 - i])
}

pub fn compress(b: &mut Builder, state: &[Word; 8], block: &[Bit]) -> [Word; 8] {
    assert_eq!(block.len(), 512);
    let mut w: Vec<Word> = block.chunks(32).map(word_from_bits).collect();
    for t in 16..64 {
        let s0 = small_sigma(b, &w[t - 15], [7, 18], 3);
        let s1 = small_sigma(b, &w[t - 2], [17, 19], 10);
        let next = add_words(b, &[&w[t - 16], &s0, &w[t - 7], &s1], 0);
        w.push(next);
    }
    let [mut a, mut bb, mut c, mut d, mut e, mut f, mut g, mut h] = *state;
    for t in 0..64 {
        let s1 = big_sigma(b, &e, [6, 11, 25]);
        let chv: Word = std::array::from_fn(|i| ch(b, e[i], f[i], g[i]));
        let s0 = big_sigma(b, &a, [2, 13, 22]);
        let mj: Word = std::array::from_fn(|i| maj(b, a[i], bb[i], c[i]));
        let new_e = add_words(b, &[&d, &h, &s1, &chv, &w[t]], K[t]);
        let new_a = add_words(b, &[&h, &s1, &chv, &w[t], &s0, &mj], K[t]);
        h = g;
        g = f;
        f = e;
        e = new_e;
        d = c;
        c = bb;
        bb = a;
        a = new_a;
    }
    let out = [a, bb, c, d, e, f, g, h];
    std::array::from_fn(|i| add_words(b, &[&state[i], &out[i]], 0))
}

/// Digest of a whole-byte message given as bits, most significant first.
pub fn sha256(b: &mut Builder, msg: &[Bit]) -> [Bit; 256] {
    assert_eq!(msg.len() % 8, 0, "message must be whole bytes");
    let bit_len = msg.len() as u64;
    let mut padded = msg.to_vec();
    padded.push(Bit::Const(true));
    while padded.len() % 512 != 448 {
        padded.push(Bit::Const(false));
    }
    padded.extend((0..64).rev().map(|i| Bit::Const(bit_len >> i & 1 == 1)));
    let mut state: [Word; 8] = IV.map(word_const);
    for block in padded.chunks(512) {
        state = compress(b, &state, block);
    }
    std::array::from_fn(|k| state[k / 32][31 - k % 32])
}

/// Digest bytes read back from the bit values.
pub fn digest_bit_values(d: &[Bit; 256]) -> [u8; 32] {
    std::array::from_fn(|i| (0..8).fold(0u8, |acc, j| acc << 1 | d[8 * i + j].value() as u8))
}

#[cfg(test)]
mod tests {
    use super::super::boolean::{alloc_bytes, const_bytes};
    use super::*;
    use sha2::{Digest, Sha256};

    #[test]
    fn matches_reference_on_variable_input() {
        for len in [0usize, 3, 55, 56, 64, 100] {
            let msg: Vec<u8> = (0..len).map(|i| (i * 37 + 11) as u8).collect();
            let mut b = Builder::new();
            let bits = alloc_bytes(&mut b, &msg);
            let d = sha256(&mut b, &bits);
            assert_eq!(digest_bit_values(&d), <[u8; 32]>::from(Sha256::digest(&msg)), "len {len}");
            let (cs, z) = b.finish();
            assert_eq!(cs.first_violation(&z), None);
        }
    }

    #[test]
    fn constant_input_needs_no_constraints() {
        let mut b = Builder::new();
        let d = sha256(&mut b, &const_bytes(b"abc"));
        assert_eq!(b.num_constraints(), 0);
        assert_eq!(digest_bit_values(&d), <[u8; 32]>::from(Sha256::digest(b"abc")));
    }

    #[test]
    fn block_cost_is_bounded() {
        let mut b = Builder::new();
        let bits = alloc_bytes(&mut b, &[0x5a; 32]);
        let _ = sha256(&mut b, &bits);
        let n = b.num_constraints();
        assert!(n < 32_000, "{n} constraints for one block");
        assert_eq!(block_count(55), 1);
        assert_eq!(block_count(56), 2);
    }
}
