//! Rank-1 constraint systems `<A, z> * <B, z> = <C, z>` over the BN-254
//! scalar field.
//!
//! Variable 0 is the constant one, followed by the public inputs, followed
//! by the witness. Linear combinations are stored in one flat term arena with
//! interned coefficients, because the statements here run to millions of
//! constraints.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io;

use ark_bn254::Fr;
use ark_ff::{BigInteger, One, PrimeField, Zero};
use num_bigint::{BigInt, BigUint, Sign};

pub type Var = u32;

/// The variable fixed to 1.
pub const ONE: Var = 0;

pub fn fr_from_biguint(v: &BigUint) -> Fr {
    Fr::from(v.clone())
}

pub fn fr_from_bigint(v: &BigInt) -> Fr {
    let mag = Fr::from(v.magnitude().clone());
    if v.sign() == Sign::Minus {
        -mag
    } else {
        mag
    }
}

pub fn fr_to_biguint(v: &Fr) -> BigUint {
    (*v).into()
}

/// `2^k` as a field element.
pub fn pow2(k: u32) -> Fr {
    Fr::from(BigUint::from(1u32) << k)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lc(pub Vec<(Var, Fr)>);

impl Lc {
    pub fn zero() -> Self {
        Lc(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Lc(vec![(v, Fr::one())])
    }

    pub fn constant(c: Fr) -> Self {
        if c.is_zero() {
            Lc::zero()
        } else {
            Lc(vec![(ONE, c)])
        }
    }

    pub fn term(v: Var, c: Fr) -> Self {
        Lc(vec![(v, c)])
    }

    pub fn push(&mut self, v: Var, c: Fr) {
        if !c.is_zero() {
            self.0.push((v, c));
        }
    }

    pub fn add_scaled(&mut self, other: &Lc, scale: Fr) {
        if scale.is_zero() {
            return;
        }
        for &(v, c) in &other.0 {
            self.0.push((v, c * scale));
        }
    }

    pub fn add_constant(&mut self, c: Fr) {
        self.push(ONE, c);
    }

    pub fn scaled(&self, scale: Fr) -> Lc {
        let mut out = Lc::zero();
        out.add_scaled(self, scale);
        out
    }

    /// `Some(c)` if the combination only involves the constant variable.
    pub fn as_constant(&self) -> Option<Fr> {
        self.0
            .iter()
            .try_fold(Fr::zero(), |acc, &(v, c)| (v == ONE).then_some(acc + c))
    }

    /// Merges duplicate variables and drops zero coefficients.
    pub fn compact(mut self) -> Lc {
        if self.0.len() < 2 {
            self.0.retain(|(_, c)| !c.is_zero());
            return self;
        }
        self.0.sort_by_key(|&(v, _)| v);
        let mut out: Vec<(Var, Fr)> = Vec::with_capacity(self.0.len());
        for (v, c) in self.0 {
            match out.last_mut() {
                Some((lv, lc)) if *lv == v => *lc += c,
                _ => out.push((v, c)),
            }
        }
        out.retain(|(_, c)| !c.is_zero());
        Lc(out)
    }

    pub fn eval(&self, z: &[Fr]) -> Fr {
        self.0.iter().map(|&(v, c)| c * z[v as usize]).sum()
    }
}

impl std::ops::Add<&Lc> for Lc {
    type Output = Lc;
    fn add(mut self, rhs: &Lc) -> Lc {
        self.0.extend_from_slice(&rhs.0);
        self
    }
}

impl std::ops::Sub<&Lc> for Lc {
    type Output = Lc;
    fn sub(mut self, rhs: &Lc) -> Lc {
        self.add_scaled(rhs, -Fr::one());
        self
    }
}

/// An immutable constraint system.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConstraintSystem {
    num_public: usize,
    num_vars: usize,
    coeffs: Vec<Fr>,
    terms: Vec<(Var, u32)>,
    /// Constraint `k` owns linear combinations `3k, 3k+1, 3k+2`; combination
    /// `j` spans `terms[bounds[j]..bounds[j+1]]`.
    bounds: Vec<u32>,
}

/// Which side of a constraint a term sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    A,
    B,
    C,
}

impl ConstraintSystem {
    /// Number of public variables, counting the constant one.
    pub fn num_public(&self) -> usize {
        self.num_public
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_witness(&self) -> usize {
        self.num_vars - self.num_public
    }

    pub fn num_constraints(&self) -> usize {
        (self.bounds.len() - 1) / 3
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn lc_terms(&self, j: usize) -> impl Iterator<Item = (Var, &Fr)> + '_ {
        let (lo, hi) = (self.bounds[j] as usize, self.bounds[j + 1] as usize);
        self.terms[lo..hi].iter().map(|&(v, c)| (v, &self.coeffs[c as usize]))
    }

    fn eval_lc(&self, j: usize, z: &[Fr]) -> Fr {
        self.lc_terms(j).map(|(v, c)| *c * z[v as usize]).sum()
    }

    pub fn constraint(&self, k: usize) -> [Lc; 3] {
        let lc = |j| Lc(self.lc_terms(j).map(|(v, c)| (v, *c)).collect());
        [lc(3 * k), lc(3 * k + 1), lc(3 * k + 2)]
    }

    pub fn constraint_holds(&self, k: usize, z: &[Fr]) -> bool {
        let c = self.eval_lc(3 * k + 2, z);
        let a = self.eval_lc(3 * k, z);
        if a.is_zero() {
            return c.is_zero();
        }
        a * self.eval_lc(3 * k + 1, z) == c
    }

    /// Index of the first violated constraint, if any.
    pub fn first_violation(&self, z: &[Fr]) -> Option<usize> {
        assert_eq!(z.len(), self.num_vars, "assignment length");
        if z[ONE as usize] != Fr::one() {
            return Some(0);
        }
        (0..self.num_constraints()).find(|&k| !self.constraint_holds(k, z))
    }

    pub fn is_satisfied(&self, z: &[Fr]) -> bool {
        z.len() == self.num_vars && self.first_violation(z).is_none()
    }

    /// For each variable, the constraints it occurs in (ascending, deduplicated).
    pub fn occurrences(&self) -> Occurrences {
        let mut counts = vec![0u32; self.num_vars + 1];
        let mut last = vec![u32::MAX; self.num_vars];
        for k in 0..self.num_constraints() {
            for j in 3 * k..3 * k + 3 {
                for (v, _) in self.lc_terms(j) {
                    if last[v as usize] != k as u32 {
                        last[v as usize] = k as u32;
                        counts[v as usize + 1] += 1;
                    }
                }
            }
        }
        for i in 0..self.num_vars {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut rows = vec![0u32; *counts.last().unwrap() as usize];
        last.fill(u32::MAX);
        for k in 0..self.num_constraints() {
            for j in 3 * k..3 * k + 3 {
                for (v, _) in self.lc_terms(j) {
                    if last[v as usize] != k as u32 {
                        last[v as usize] = k as u32;
                        rows[fill[v as usize] as usize] = k as u32;
                        fill[v as usize] += 1;
                    }
                }
            }
        }
        Occurrences { offsets: counts, rows }
    }

    /// One constraint per line: `k: (A) * (B) = (C)` with terms `coeff*vN`.
    pub fn dump(&self, mut w: impl io::Write) -> io::Result<()> {
        for k in 0..self.num_constraints() {
            let mut line = format!("{k}: ");
            for (side, j) in ["(", ") * (", ") = ("].iter().zip(3 * k..3 * k + 3) {
                line.push_str(side);
                let mut first = true;
                for (v, c) in self.lc_terms(j) {
                    if !first {
                        line.push_str(" + ");
                    }
                    first = false;
                    let _ = write!(line, "{}*v{v}", fmt_fr(c));
                }
            }
            line.push(')');
            writeln!(w, "{line}")?;
        }
        Ok(())
    }
}

/// Field element printed as a small signed integer when it is one.
pub fn fmt_fr(c: &Fr) -> String {
    let v = fr_to_biguint(c);
    let neg = fr_to_biguint(&-*c);
    if neg.bits() < v.bits() {
        format!("-{neg}")
    } else {
        v.to_string()
    }
}

/// Variable to constraint index, in compressed-row form.
pub struct Occurrences {
    offsets: Vec<u32>,
    rows: Vec<u32>,
}

impl Occurrences {
    pub fn of(&self, v: Var) -> &[u32] {
        &self.rows[self.offsets[v as usize] as usize..self.offsets[v as usize + 1] as usize]
    }
}

/// Builds a constraint system together with one assignment.
pub struct Builder {
    cs: ConstraintSystem,
    coeff_ids: HashMap<Fr, u32>,
    values: Vec<Fr>,
}

impl Default for Builder {
    fn default() -> Self {
        Builder::new()
    }
}

impl Builder {
    pub fn new() -> Self {
        Builder {
            cs: ConstraintSystem {
                num_public: 1,
                num_vars: 1,
                coeffs: Vec::new(),
                terms: Vec::new(),
                bounds: vec![0],
            },
            coeff_ids: HashMap::new(),
            values: vec![Fr::one()],
        }
    }

    /// Panics once any witness variable exists.
    pub fn alloc_public(&mut self, value: Fr) -> Var {
        assert_eq!(
            self.cs.num_public, self.cs.num_vars,
            "public inputs must be allocated before the witness"
        );
        let v = self.alloc(value);
        self.cs.num_public += 1;
        v
    }

    pub fn alloc(&mut self, value: Fr) -> Var {
        let v = self.cs.num_vars as Var;
        self.cs.num_vars += 1;
        self.values.push(value);
        v
    }

    pub fn value(&self, v: Var) -> Fr {
        self.values[v as usize]
    }

    pub fn eval(&self, lc: &Lc) -> Fr {
        lc.eval(&self.values)
    }

    pub fn num_constraints(&self) -> usize {
        self.cs.num_constraints()
    }

    fn push_lc(&mut self, lc: Lc) {
        for (v, c) in lc.compact().0 {
            let next = self.cs.coeffs.len() as u32;
            let id = *self.coeff_ids.entry(c).or_insert(next);
            if id == next {
                self.cs.coeffs.push(c);
            }
            self.cs.terms.push((v, id));
        }
        self.cs.bounds.push(self.cs.terms.len() as u32);
    }

    pub fn enforce(&mut self, a: Lc, b: Lc, c: Lc) {
        self.push_lc(a);
        self.push_lc(b);
        self.push_lc(c);
    }

    /// `lc = 0`.
    pub fn enforce_zero(&mut self, lc: Lc) {
        self.enforce(lc, Lc::var(ONE), Lc::zero());
    }

    pub fn enforce_equal(&mut self, a: Lc, b: &Lc) {
        self.enforce_zero(a - b);
    }

    /// `v * v = v`.
    pub fn enforce_boolean(&mut self, v: Var) {
        self.enforce(Lc::var(v), Lc::var(v), Lc::var(v));
    }

    /// New variable equal to `a * b`, or a linear combination when one side is constant.
    pub fn product(&mut self, a: &Lc, b: &Lc) -> Lc {
        if let Some(ca) = a.as_constant() {
            return b.scaled(ca);
        }
        if let Some(cb) = b.as_constant() {
            return a.scaled(cb);
        }
        let value = self.eval(a) * self.eval(b);
        let t = self.alloc(value);
        self.enforce(a.clone(), b.clone(), Lc::var(t));
        Lc::var(t)
    }

    /// Boolean variables for the low `n` bits of `value`, LSB first, and
    /// their weighted sum.
    pub fn alloc_bits(&mut self, value: &BigUint, n: u32) -> (Vec<Var>, Lc) {
        let mut bits = Vec::with_capacity(n as usize);
        let mut sum = Lc::zero();
        for i in 0..n {
            let b = self.alloc(if value.bit(i as u64) { Fr::one() } else { Fr::zero() });
            self.enforce_boolean(b);
            sum.push(b, pow2(i));
            bits.push(b);
        }
        (bits, sum)
    }

    pub fn finish(self) -> (ConstraintSystem, Vec<Fr>) {
        (self.cs, self.values)
    }
}

/// Minimal big-endian encoding of each value, each prefixed with its length.
pub fn encode_values(values: &[Fr]) -> Vec<u8> {
    let mut out = Vec::with_capacity(values.len() * 2);
    for v in values {
        let be = v.into_bigint().to_bytes_be();
        let start = be.iter().position(|&b| b != 0).unwrap_or(be.len());
        out.push((be.len() - start) as u8);
        out.extend_from_slice(&be[start..]);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("truncated value encoding")]
    Truncated,
    #[error("value {0} is not a canonical field element")]
    NonCanonical(usize),
}

pub fn decode_values(mut bytes: &[u8]) -> Result<Vec<Fr>, DecodeError> {
    let mut out = Vec::new();
    while let Some((&len, rest)) = bytes.split_first() {
        let len = len as usize;
        if rest.len() < len || len > 32 {
            return Err(DecodeError::Truncated);
        }
        let (be, rest) = rest.split_at(len);
        if be.first() == Some(&0) {
            return Err(DecodeError::NonCanonical(out.len()));
        }
        let n = BigUint::from_bytes_be(be);
        if n >= Fr::MODULUS.into() {
            return Err(DecodeError::NonCanonical(out.len()));
        }
        out.push(Fr::from(n));
        bytes = rest;
    }
    Ok(out)
}
