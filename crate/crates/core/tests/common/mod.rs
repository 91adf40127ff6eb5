//! Shared helpers: an independent BLS implementation on substrate-bn, test
//! backends and credential generators.
#![allow(dead_code)]

use ark_bn254::Fr as ArkFr;
use bn::{AffineG1, AffineG2, Fq, Fq2, Group, G1, G2};
use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::Rng;
use sha2::{Digest, Sha256};

use blsces::credential::{Ceas, Claim, Credential};
use blsces::zk::r1cs::ConstraintSystem;
use blsces::zk::{Proof, ProofReject, ProverBackend, ZkError};

pub const P_HEX: &str = "30644e72e131a029b85045b68181585d97816a916871ca8d3c208c16d87cfd47";

pub fn p() -> BigUint {
    BigUint::parse_bytes(P_HEX.as_bytes(), 16).unwrap()
}

/// Try-and-increment written from scratch with plain integers.
/// Returns `(x, y, counter)`.
pub fn oracle_hash(msg: &[u8]) -> (BigUint, BigUint, u8) {
    let p = p();
    let euler = (&p - 1u32) >> 1;
    let root = (&p + 1u32) >> 2;
    for c in 0..=255u8 {
        let mut h = Sha256::new();
        h.update(msg);
        h.update([c]);
        let d = BigUint::from_bytes_be(&h.finalize());
        let x = &d >> 2u32;
        let sign = d.bit(1);
        if x >= p {
            continue;
        }
        let rhs = (x.pow(3) + 3u32) % &p;
        if rhs.is_zero() || rhs.modpow(&euler, &p) != BigUint::one() {
            continue;
        }
        let mut y = rhs.modpow(&root, &p);
        if y.bit(0) {
            y = &p - y;
        }
        if sign {
            y = &p - y;
        }
        return (x, y, c);
    }
    panic!("no counter hit the curve");
}

fn fq(v: &BigUint) -> Fq {
    let mut b = [0u8; 32];
    let bytes = v.to_bytes_be();
    b[32 - bytes.len()..].copy_from_slice(&bytes);
    Fq::from_slice(&b).unwrap()
}

fn fq_bytes(v: Fq) -> [u8; 32] {
    let mut b = [0u8; 32];
    v.to_big_endian(&mut b).unwrap();
    b
}

pub fn oracle_scalar(sk: &[u8; 32]) -> bn::Fr {
    bn::Fr::from_slice(sk).unwrap()
}

pub fn oracle_hash_point(msg: &[u8]) -> G1 {
    let (x, y, _) = oracle_hash(msg);
    AffineG1::new(fq(&x), fq(&y)).unwrap().into()
}

/// x big-endian, top bit set when y is odd; identity is `0x40 ‖ 0…`.
pub fn oracle_compress(g: G1) -> [u8; 32] {
    match AffineG1::from_jacobian(g) {
        None => {
            let mut out = [0u8; 32];
            out[0] = 0x40;
            out
        }
        Some(a) => {
            let mut out = fq_bytes(a.x());
            if fq_bytes(a.y())[31] & 1 == 1 {
                out[0] |= 0x80;
            }
            out
        }
    }
}

pub fn oracle_decompress(bytes: &[u8; 32]) -> Option<G1> {
    let mut xb = *bytes;
    let odd = xb[0] & 0x80 != 0;
    xb[0] &= 0x3f;
    let x = BigUint::from_bytes_be(&xb);
    let p = p();
    if x >= p {
        return None;
    }
    let rhs = (x.pow(3) + 3u32) % &p;
    let mut y = rhs.modpow(&((&p + 1u32) >> 2), &p);
    if (&y * &y) % &p != rhs {
        return None;
    }
    if y.bit(0) != odd {
        y = (&p - y) % &p;
    }
    AffineG1::new(fq(&x), fq(&y)).ok().map(Into::into)
}

pub fn oracle_public_key(sk: &[u8; 32]) -> [u8; 128] {
    let pk = AffineG2::from_jacobian(G2::one() * oracle_scalar(sk)).unwrap();
    let mut out = [0u8; 128];
    out[0..32].copy_from_slice(&fq_bytes(pk.x().imaginary()));
    out[32..64].copy_from_slice(&fq_bytes(pk.x().real()));
    out[64..96].copy_from_slice(&fq_bytes(pk.y().imaginary()));
    out[96..128].copy_from_slice(&fq_bytes(pk.y().real()));
    out
}

fn oracle_g2(pk: &[u8; 128]) -> G2 {
    let c = |i: usize| Fq::from_slice(&pk[i..i + 32]).unwrap();
    AffineG2::new(Fq2::new(c(32), c(0)), Fq2::new(c(96), c(64))).unwrap().into()
}

pub fn oracle_sign(sk: &[u8; 32], msg: &[u8]) -> [u8; 32] {
    oracle_compress(oracle_hash_point(msg) * oracle_scalar(sk))
}

/// `e(sigma, g2) = prod e(H(m_i), pk)`.
pub fn oracle_verify_aggregate(pk: &[u8; 128], msgs: &[&[u8]], sigma: &[u8; 32]) -> bool {
    let Some(s) = oracle_decompress(sigma) else { return false };
    let q = oracle_g2(pk);
    let lhs = bn::pairing(s, G2::one());
    let rhs = msgs
        .iter()
        .fold(bn::Gt::one(), |acc, m| acc * bn::pairing(oracle_hash_point(m), q));
    lhs == rhs
}

/// Accepts every proof; isolates the other conjuncts of `zk_verify`.
pub struct AcceptAll;

impl ProverBackend for AcceptAll {
    type Params = ();

    fn id(&self) -> &'static str {
        "accept-all"
    }

    fn setup(&self, _: u32) {}

    fn prove(&self, _: &(), _: &ConstraintSystem, _: &[ArkFr]) -> Result<Proof, ZkError> {
        Ok(Proof {
            backend: self.id().into(),
            bytes: vec![],
        })
    }

    fn verify(&self, _: &(), _: &ConstraintSystem, _: &[ArkFr], _: &Proof) -> Result<(), ProofReject> {
        Ok(())
    }
}

pub fn random_text<R: Rng>(rng: &mut R, max: usize) -> String {
    let len = rng.gen_range(0..=max);
    (0..len).map(|_| rng.gen_range(b'a'..=b'z') as char).collect()
}

pub fn random_credential<R: Rng>(rng: &mut R, n: usize) -> Credential {
    let subject = format!("did:example:{}", random_text(rng, 6));
    let claims = (0..n)
        .map(|_| Claim::new(subject.clone(), random_text(rng, 8), random_text(rng, 8)))
        .collect();
    Credential::new(claims).unwrap()
}

/// A CEAS from `k` random non-empty masks.
pub fn random_ceas<R: Rng>(rng: &mut R, n: usize, k: usize) -> Ceas {
    let full = (1u64 << n) - 1;
    Ceas::from_masks(n, (0..k).map(|_| rng.gen_range(1..=full))).unwrap()
}

/// Single-variable mutations of a satisfying assignment that still satisfy
/// every constraint touching the variable.
pub struct SweepReport {
    pub mutations: usize,
    pub survivors: Vec<(usize, ArkFr)>,
}

/// Mutates every `stride`-th witness variable by +1, -1 and a random offset.
pub fn mutation_sweep<R: Rng>(cs: &ConstraintSystem, z: &[ArkFr], rng: &mut R, stride: usize) -> SweepReport {
    assert!(cs.is_satisfied(z));
    let occ = cs.occurrences();
    let mut z = z.to_vec();
    let mut report = SweepReport {
        mutations: 0,
        survivors: Vec::new(),
    };
    for v in (cs.num_public()..cs.num_vars()).step_by(stride.max(1)) {
        let original = z[v];
        let random = blsces::zk::r1cs::fr_from_biguint(&BigUint::from_bytes_be(&rng.gen::<[u8; 32]>()));
        for delta in [ArkFr::from(1u64), -ArkFr::from(1u64), random] {
            if delta == ArkFr::from(0u64) {
                continue;
            }
            z[v] = original + delta;
            report.mutations += 1;
            if occ.of(v as u32).iter().all(|&k| cs.constraint_holds(k as usize, &z)) {
                report.survivors.push((v, delta));
            }
        }
        z[v] = original;
    }
    report
}

/// `table[a]` lists every y in `0..p` with `y^2 = a mod p`.
pub fn square_table(p: u64) -> Vec<Vec<u64>> {
    let mut t = vec![Vec::new(); p as usize];
    for y in 0..p {
        t[(y * y % p) as usize].push(y);
    }
    t
}
