//! Prover-side witnesses: the successful hash-to-curve iteration and the
//! square-and-multiply chain certifying that `x^3 + b` is a residue.

use num_bigint::BigUint;
use num_traits::One;

use crate::bls::hash_to_curve;
use crate::credential::{encode_claim_message, Ceas, Claim};
use crate::group::BaseField;

use super::ZkError;

/// One certified multiplication `a * b + addend = quotient * p + remainder`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MulStep {
    pub a: BigUint,
    pub b: BigUint,
    pub addend: BigUint,
    pub quotient: BigUint,
    pub remainder: BigUint,
}

impl MulStep {
    pub fn compute(field: &BaseField, a: &BigUint, b: &BigUint, addend: &BigUint) -> MulStep {
        let t = a * b + addend;
        MulStep {
            a: a.clone(),
            b: b.clone(),
            addend: addend.clone(),
            quotient: &t / field.modulus(),
            remainder: t % field.modulus(),
        }
    }

    pub fn holds(&self, field: &BaseField) -> bool {
        &self.a * &self.b + &self.addend == &self.quotient * field.modulus() + &self.remainder
            && field.contains(&self.remainder)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    Square,
    Multiply,
}

/// Left-to-right square-and-multiply after the leading bit of `e`.
pub fn chain_schedule(e: &BigUint) -> Vec<StepKind> {
    let bits = e.bits();
    let mut out = Vec::new();
    for i in (0..bits.saturating_sub(1)).rev() {
        out.push(StepKind::Square);
        if e.bit(i) {
            out.push(StepKind::Multiply);
        }
    }
    out
}

/// Steps computing `base^((p-1)/2)`, starting from `acc = base`.
pub fn euler_chain(field: &BaseField, base: &BigUint) -> Vec<MulStep> {
    let zero = BigUint::default();
    let mut acc = base.clone();
    chain_schedule(field.euler_exponent())
        .into_iter()
        .map(|kind| {
            let other = match kind {
                StepKind::Square => acc.clone(),
                StepKind::Multiply => base.clone(),
            };
            let s = MulStep::compute(field, &acc, &other, &zero);
            acc = s.remainder.clone();
            s
        })
        .collect()
}

/// Final value of a chain (`base` itself for an empty chain).
pub fn chain_result(base: &BigUint, chain: &[MulStep]) -> BigUint {
    chain.last().map_or_else(|| base.clone(), |s| s.remainder.clone())
}

/// `x^2` and `x * x^2 + b`.
pub fn rhs_steps(field: &BaseField, x: &BigUint) -> [MulStep; 2] {
    let sq = MulStep::compute(field, x, x, &BigUint::default());
    let rhs = MulStep::compute(field, x, &sq.remainder, field.b());
    [sq, rhs]
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HashToCurveWitness {
    pub index: usize,
    pub x: BigUint,
    pub sign_bit: bool,
    pub counter: u8,
    pub digest: [u8; 32],
    pub rhs_steps: [MulStep; 2],
    pub chain: Vec<MulStep>,
}

impl HashToCurveWitness {
    pub fn rhs(&self) -> &BigUint {
        &self.rhs_steps[1].remainder
    }

    /// Every step holds, the steps feed each other, and the chain ends at 1.
    pub fn is_consistent(&self, field: &BaseField) -> bool {
        let [sq, rhs] = &self.rhs_steps;
        let schedule = chain_schedule(field.euler_exponent());
        if schedule.len() != self.chain.len()
            || !sq.holds(field)
            || !rhs.holds(field)
            || sq.a != self.x
            || sq.b != self.x
            || rhs.a != self.x
            || rhs.b != sq.remainder
            || &rhs.addend != field.b()
        {
            return false;
        }
        let base = &rhs.remainder;
        let mut acc = base.clone();
        for (kind, s) in schedule.iter().zip(&self.chain) {
            let other = match kind {
                StepKind::Square => &acc,
                StepKind::Multiply => base,
            };
            if !s.holds(field) || s.a != acc || &s.b != other || s.addend != BigUint::default() {
                return false;
            }
            acc = s.remainder.clone();
        }
        acc.is_one()
    }
}

/// Runs try-and-increment on claim `i`'s message and records the final iteration.
pub fn hash_to_curve_witness(
    field: &BaseField,
    i: usize,
    claim: &Claim,
    n: usize,
    ceas: &Ceas,
) -> Result<((BigUint, bool), HashToCurveWitness), ZkError> {
    let msg = encode_claim_message(ceas, n, i, claim, None)?;
    let h = hash_to_curve(field, &msg)?;
    let rhs_steps = rhs_steps(field, &h.x);
    let chain = euler_chain(field, &rhs_steps[1].remainder);
    let w = HashToCurveWitness {
        index: i,
        x: h.x.clone(),
        sign_bit: h.sign_bit,
        counter: h.counter,
        digest: h.digest,
        rhs_steps,
        chain,
    };
    Ok(((h.x, h.sign_bit), w))
}
