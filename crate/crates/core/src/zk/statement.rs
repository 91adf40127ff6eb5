//! The extraction statement: for every extracted claim, the hashed message,
//! the final try-and-increment iteration and the residuosity chain; plus
//! CEAS membership of the extraction set and the custom predicate.
//!
//! # Public inputs
//!
//! After the constant one, in this order:
//!
//! 1. for each extracted claim, by ascending index: the four 64-bit limbs of
//!    `x` (least significant first), then the sign bit;
//! 2. each CEAS subset mask, ascending;
//! 3. the extraction-set mask.
//!
//! The per-claim byte lengths of subject, property and value and the
//! predicate are public too; they fix the shape of the system rather than
//! occupying variables.

use std::collections::BTreeMap;

use ark_bn254::Fr;
use num_bigint::BigUint;
use num_traits::One;

use crate::credential::{Ceas, Claim, Credential, ExtractionSet};
use crate::group::BaseField;

use super::boolean::{alloc_bit, alloc_bytes, const_bytes, Bit};
use super::emulated::{enforce_lt_modulus, limbs_of, mul_add, FpVar, LIMBS, LIMB_BITS};
use super::predicate::{CustomPredicate, PredicateSpec};
use super::r1cs::{pow2, Builder, ConstraintSystem, Lc, Var};
use super::sha256::sha256;
use super::witness::{chain_schedule, HashToCurveWitness, MulStep, StepKind};
use super::ZkError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClaimPublic {
    pub index: usize,
    pub x: BigUint,
    pub sign_bit: bool,
    pub subject_len: usize,
    pub property_len: usize,
    pub value_len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PublicInputs {
    /// One entry per extracted claim, by ascending index.
    pub claims: Vec<ClaimPublic>,
    pub ceas: Ceas,
    pub extraction: ExtractionSet,
    pub predicate: PredicateSpec,
}

impl PublicInputs {
    /// Structural checks the statement relies on.
    pub fn validate(&self, field: &BaseField) -> Result<(), ZkError> {
        let invalid = |m: String| Err(ZkError::InvalidInputs(m));
        if self.extraction.is_empty() {
            return invalid("empty extraction set".into());
        }
        let indices: Vec<usize> = self.claims.iter().map(|c| c.index).collect();
        if !indices.iter().copied().eq(self.extraction.iter()) {
            return invalid(format!("claims {indices:?} do not list extraction set {}", self.extraction));
        }
        if let Some(i) = self.extraction.last_index().filter(|&i| i >= self.ceas.width()) {
            return invalid(format!("index {i} outside CEAS width {}", self.ceas.width()));
        }
        if let Some(c) = self.claims.iter().find(|c| c.x.bits() > field.bits() as u64) {
            return invalid(format!("x of claim {} is wider than {} bits", c.index, field.bits()));
        }
        if let Some(i) = self
            .predicate
            .claim_indices()
            .into_iter()
            .find(|i| !self.extraction.contains(*i))
        {
            return Err(ZkError::PredicateArity { index: i });
        }
        Ok(())
    }

    pub fn extraction_mask(&self) -> u64 {
        self.extraction.to_mask(self.ceas.width()).unwrap_or(0)
    }

    /// Public variable values in statement order, without the leading one.
    pub fn field_elements(&self) -> Vec<Fr> {
        let mut out = Vec::with_capacity(self.claims.len() * 5 + self.ceas.len() + 1);
        for c in &self.claims {
            out.extend(limbs_of(&c.x).map(Fr::from));
            out.push(Fr::from(c.sign_bit as u64));
        }
        out.extend(self.ceas.masks().map(Fr::from));
        out.push(Fr::from(self.extraction_mask()));
        out
    }
}

/// A built statement with the prover's assignment.
pub struct Statement {
    pub cs: ConstraintSystem,
    pub assignment: Vec<Fr>,
    pub inputs: PublicInputs,
}

struct ClaimPrivate<'a> {
    claim: &'a Claim,
    witness: &'a HashToCurveWitness,
}

/// Builds the statement for extracting `x` from `cred` with the given witnesses.
pub fn build_statement(
    field: &BaseField,
    cred: &Credential,
    ceas: &Ceas,
    witnesses: &[HashToCurveWitness],
    x: &ExtractionSet,
    predicate: &PredicateSpec,
) -> Result<Statement, ZkError> {
    if ceas.width() != cred.len() {
        return Err(ZkError::WidthMismatch {
            ceas: ceas.width(),
            credential: cred.len(),
        });
    }
    let mut claims = Vec::new();
    let mut private = Vec::new();
    for i in x.iter() {
        let claim = cred.claim(i).ok_or(ZkError::InvalidInputs(format!("index {i} out of range")))?;
        let (Some(property), Some(value)) = (claim.property.text(), claim.value.text()) else {
            return Err(ZkError::HiddenClaim(i));
        };
        let witness = witnesses
            .iter()
            .find(|w| w.index == i)
            .ok_or(ZkError::MissingWitness(i))?;
        claims.push(ClaimPublic {
            index: i,
            x: witness.x.clone(),
            sign_bit: witness.sign_bit,
            subject_len: claim.subject.len(),
            property_len: property.len(),
            value_len: value.len(),
        });
        private.push(ClaimPrivate { claim, witness });
    }
    let inputs = PublicInputs {
        claims,
        ceas: ceas.clone(),
        extraction: x.clone(),
        predicate: predicate.clone(),
    };
    inputs.validate(field)?;
    let (cs, assignment) = synthesize(field, &inputs, Some(&private));
    Ok(Statement { cs, assignment, inputs })
}

/// The constraint system determined by public data alone, with the public
/// part of the assignment (constant one first).
pub fn statement_shape(field: &BaseField, inputs: &PublicInputs) -> Result<(ConstraintSystem, Vec<Fr>), ZkError> {
    inputs.validate(field)?;
    let (cs, mut z) = synthesize(field, inputs, None);
    z.truncate(cs.num_public());
    Ok((cs, z))
}

fn u32_be(v: usize) -> [u8; 4] {
    (v as u32).to_be_bytes()
}

fn synthesize(
    field: &BaseField,
    inputs: &PublicInputs,
    private: Option<&[ClaimPrivate<'_>]>,
) -> (ConstraintSystem, Vec<Fr>) {
    let mut b = Builder::new();
    let p = field.modulus();

    let mut public_claims: Vec<([Var; LIMBS], Var)> = Vec::new();
    for c in &inputs.claims {
        let limbs = limbs_of(&c.x).map(|l| b.alloc_public(Fr::from(l)));
        let sign = b.alloc_public(Fr::from(c.sign_bit as u64));
        public_claims.push((limbs, sign));
    }
    let masks: Vec<Var> = inputs.ceas.masks().map(|m| b.alloc_public(Fr::from(m))).collect();
    let x_mask = b.alloc_public(Fr::from(inputs.extraction_mask()));

    // X in CEAS: prod_j (X - s_j) = 0.
    let mut acc: Option<Lc> = None;
    for &m in &masks {
        let diff = Lc::var(x_mask) - &Lc::var(m);
        acc = Some(match acc {
            None => diff,
            Some(prev) => b.product(&prev, &diff),
        });
    }
    b.enforce_zero(acc.expect("CEAS is non-empty"));

    let ceas_bytes = inputs.ceas.canonical_bytes();
    let n = inputs.ceas.width();
    let bits = field.bits() as usize;
    let schedule = chain_schedule(field.euler_exponent());
    let zero = BigUint::default();
    let blank_step = MulStep {
        a: zero.clone(),
        b: zero.clone(),
        addend: zero.clone(),
        quotient: zero.clone(),
        remainder: zero.clone(),
    };
    let mut values: BTreeMap<usize, Vec<Bit>> = BTreeMap::new();

    for (k, (c, (x_limbs, sign))) in inputs.claims.iter().zip(&public_claims).enumerate() {
        let priv_claim = private.map(|ps| &ps[k]);
        let text = |f: &dyn Fn(&Claim) -> Option<&str>, len: usize| -> Vec<u8> {
            priv_claim
                .and_then(|pc| f(pc.claim))
                .map(|s| s.as_bytes().to_vec())
                .unwrap_or_else(|| vec![0; len])
        };
        let subject = text(&|cl| Some(cl.subject.as_str()), c.subject_len);
        let property = text(&|cl| cl.property.text(), c.property_len);
        let value = text(&|cl| cl.value.text(), c.value_len);
        let counter = priv_claim.map_or(0, |pc| pc.witness.counter);

        let mut msg: Vec<Bit> = Vec::new();
        msg.extend(const_bytes(&u32_be(ceas_bytes.len())));
        msg.extend(const_bytes(&ceas_bytes));
        msg.extend(const_bytes(&u32_be(n)));
        msg.extend(const_bytes(&u32_be(c.index)));
        msg.extend(const_bytes(&u32_be(c.subject_len)));
        msg.extend(alloc_bytes(&mut b, &subject));
        msg.extend(const_bytes(&u32_be(c.property_len)));
        msg.extend(alloc_bytes(&mut b, &property));
        msg.extend(const_bytes(&u32_be(c.value_len)));
        let value_bits = alloc_bytes(&mut b, &value);
        msg.extend(value_bits.iter().copied());
        msg.extend((0..8).rev().map(|i| alloc_bit(&mut b, counter >> i & 1 == 1)));
        values.insert(c.index, value_bits);

        let digest = sha256(&mut b, &msg);

        // x is the first `bits` digest bits; bit `bits` is the sign.
        for (l, &limb) in x_limbs.iter().enumerate() {
            let mut sum = Lc::zero();
            for j in 0..LIMB_BITS as usize {
                let pos = l * LIMB_BITS as usize + j;
                if pos < bits {
                    sum.add_scaled(&digest[bits - 1 - pos].lc(), pow2(j as u32));
                }
            }
            b.enforce_equal(Lc::var(limb), &sum);
        }
        b.enforce_equal(Lc::var(*sign), &digest[bits].lc());

        let x = FpVar::from_limbs(x_limbs.map(Lc::var), c.x.clone());
        enforce_lt_modulus(&mut b, &x, p);

        let step = |i: usize| -> &MulStep {
            priv_claim.map_or(&blank_step, |pc| {
                if i < 2 {
                    &pc.witness.rhs_steps[i]
                } else {
                    pc.witness.chain.get(i - 2).unwrap_or(&blank_step)
                }
            })
        };
        let s = step(0);
        let sq = mul_add(&mut b, &x, &x, true, &zero, (&s.quotient, &s.remainder), p);
        let s = step(1);
        let base = mul_add(&mut b, &x, &sq, false, field.b(), (&s.quotient, &s.remainder), p);
        let mut acc = base.clone();
        for (i, kind) in schedule.iter().enumerate() {
            let s = step(i + 2);
            acc = match kind {
                StepKind::Square => mul_add(&mut b, &acc, &acc, true, &zero, (&s.quotient, &s.remainder), p),
                StepKind::Multiply => mul_add(&mut b, &acc, &base, false, &zero, (&s.quotient, &s.remainder), p),
            };
        }
        acc.enforce_equals_constant(&mut b, &BigUint::one());
    }

    inputs.predicate.synthesize(&mut b, &values);
    b.finish()
}
