//! Embedding of GF(p^k) into GF(p^m) for k | m, coercion back, and the
//! relative trace tr_{p^m/p^k}.

use std::sync::Arc;

use super::{make_field, FFElement, FieldCtx};
use crate::error::{Error, Result};
use crate::linalg::left_inverse_mod_p;

#[derive(Debug, Clone)]
pub struct SubfieldEmbed {
    big: Arc<FieldCtx>,
    sub: Arc<FieldCtx>,
    k: usize,
    /// Images of the power basis 1, x, ..., x^{k-1} of the subfield.
    basis: Vec<FFElement>,
    /// k x m section: sub coordinates from big coordinates.
    section: Vec<Vec<u64>>,
}

impl SubfieldEmbed {
    /// Embeds the default GF(p^k) into `big`.
    pub fn new(big: &Arc<FieldCtx>, k: usize) -> Result<Self> {
        if k == 0 || big.degree() % k != 0 {
            return Err(Error::NotASubfield(k));
        }
        let sub = make_field(big.p(), k, None)?;
        Self::with_sub(big, &sub)
    }

    pub fn with_sub(big: &Arc<FieldCtx>, sub: &Arc<FieldCtx>) -> Result<Self> {
        let k = sub.degree();
        if sub.p() != big.p() {
            return Err(Error::WrongCharacteristic { expected: big.p().to_string(), got: sub.p() });
        }
        if big.degree() % k != 0 {
            return Err(Error::NotASubfield(k));
        }
        // A root of the subfield modulus inside big; roots lie in the image of
        // GF(p^k)^*, i.e. among the powers of gamma = beta^{(q^m-1)/(q^k-1)}.
        let gamma = big.beta_pow((big.order() - 1) / (sub.order() - 1));
        let modulus = sub.modulus();
        let eval_mod = |y: &FFElement| {
            let mut acc = big.zero();
            for &c in modulus.iter().rev() {
                acc = big.add(&big.mul(&acc, y), &big.scalar(c as i64));
            }
            acc
        };
        let root = if k == 1 {
            big.scalar(-(modulus[0] as i64))
        } else {
            let mut cur = gamma.clone();
            let mut found = None;
            for _ in 0..sub.order() - 1 {
                if eval_mod(&cur).is_zero() {
                    found = Some(cur.clone());
                    break;
                }
                cur = big.mul(&cur, &gamma);
            }
            found.expect("an irreducible of degree k | m splits in GF(p^m)")
        };
        let mut basis = Vec::with_capacity(k);
        let mut cur = big.one();
        for _ in 0..k {
            basis.push(cur.clone());
            cur = big.mul(&cur, &root);
        }
        let m = big.degree();
        let matrix: Vec<Vec<u64>> =
            (0..m).map(|row| basis.iter().map(|b| b.coeffs()[row] as u64).collect()).collect();
        let section = left_inverse_mod_p(&matrix, big.p())?;
        Ok(SubfieldEmbed { big: Arc::clone(big), sub: Arc::clone(sub), k, basis, section })
    }

    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn sub(&self) -> &Arc<FieldCtx> {
        &self.sub
    }

    pub fn sub_degree(&self) -> usize {
        self.k
    }

    /// [GF(p^m) : GF(p^k)].
    pub fn rel_degree(&self) -> usize {
        self.big.degree() / self.k
    }

    pub fn sub_order(&self) -> u64 {
        self.sub.order()
    }

    pub fn embed(&self, x: &FFElement) -> FFElement {
        debug_assert!(self.sub.same_field(x));
        let mut acc = self.big.zero();
        for (&c, b) in x.coeffs().iter().zip(&self.basis) {
            if c != 0 {
                acc = self.big.add(&acc, &self.big.mul_scalar(b, c as i64));
            }
        }
        acc
    }

    /// Membership test: fixed by the p^k-power Frobenius.
    pub fn contains(&self, y: &FFElement) -> bool {
        self.big.frobenius(y, self.k) == *y
    }

    /// Subfield coordinates of `y`, which must lie in the embedded subfield.
    pub fn coerce(&self, y: &FFElement) -> Result<FFElement> {
        if !self.big.same_field(y) {
            return Err(Error::FieldMismatch);
        }
        let p = self.big.p();
        let coords: Vec<u64> = self
            .section
            .iter()
            .map(|row| row.iter().zip(y.coeffs()).fold(0, |acc, (&a, &c)| (acc + a * c as u64) % p))
            .collect();
        let x = self.sub.from_coeffs(&coords)?;
        if self.embed(&x) != *y {
            return Err(Error::NotInSubfield { sub_order: self.sub.order() });
        }
        Ok(x)
    }

    /// sum_{i < m/k} x^{q^i}, q = p^k, left in the big field.
    pub fn trace_big(&self, x: &FFElement) -> FFElement {
        let mut acc = self.big.zero();
        let mut cur = x.clone();
        for _ in 0..self.rel_degree() {
            acc = self.big.add(&acc, &cur);
            cur = self.big.frobenius(&cur, self.k);
        }
        acc
    }

    /// Relative trace tr_{p^m/p^k}, coerced into the subfield.
    pub fn trace(&self, x: &FFElement) -> Result<FFElement> {
        if !self.big.same_field(x) {
            return Err(Error::FieldMismatch);
        }
        self.coerce(&self.trace_big(x))
    }

    /// The embedded subfield, in subfield codec order.
    pub fn subfield_in_big(&self) -> Vec<FFElement> {
        self.sub.elements().map(|x| self.embed(&x)).collect()
    }
}
