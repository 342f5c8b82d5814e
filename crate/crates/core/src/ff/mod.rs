//! Exact arithmetic in GF(p^m) over a power basis.
//!
//! A [`FieldCtx`] fixes the characteristic, the irreducible modulus and a
//! primitive element. Elements are coefficient vectors in the power basis of
//! the modulus; they carry the identifier of the context that produced them so
//! mixed-field operations can be rejected.

mod fp_poly;
pub mod subfield;

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize, Serializer};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::num::{gcd, is_prime, prime_factors};

pub(crate) use fp_poly::{inv_mod_p, mul_mod_p};
pub use subfield::SubfieldEmbed;

/// Largest characteristic accepted (trial-division primality).
pub const MAX_CHARACTERISTIC: u64 = 1 << 31;
/// Largest field for which the discrete-log table is built.
pub const LOG_TABLE_LIMIT: u64 = 1 << 20;
/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 62;

pub(crate) type Coeffs = SmallVec<[u32; 12]>;

/// An element of some GF(p^m), stored as `m` residues mod p, low-to-high.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FFElement {
    field: u64,
    coeffs: Coeffs,
}

impl FFElement {
    pub fn coeffs(&self) -> &[u32] {
        &self.coeffs
    }

    pub fn field_id(&self) -> u64 {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn to_vec(&self) -> Vec<u64> {
        self.coeffs.iter().map(|&c| c as u64).collect()
    }
}

impl fmt::Debug for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs.as_slice())
    }
}

impl fmt::Display for FFElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl Serialize for FFElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.coeffs.as_slice().serialize(serializer)
    }
}

/// On-disk description of a field. `modulus` and `beta` may be omitted on
/// input; they are always present on output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldSpec {
    pub p: u64,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<u64>>,
}

impl FieldSpec {
    pub fn new(p: u64, m: usize) -> Self {
        FieldSpec { p, m, modulus: None, beta: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
    Inv,
    Pow(u64),
}

/// Immutable description of GF(p^m).
pub struct FieldCtx {
    p: u64,
    m: usize,
    order: u64,
    modulus: Vec<u64>,
    id: u64,
    /// `reduction[i]` = x^(m+i) mod modulus, for i in 0..m-1.
    reduction: Vec<Vec<u64>>,
    lazy_reduce: bool,
    beta: FFElement,
    log_table: OnceLock<Vec<u32>>,
    trace_basis: OnceLock<Vec<u64>>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("m", &self.m)
            .field("modulus", &self.modulus)
            .field("beta", &self.beta)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

/// Builds GF(p^m). With no modulus the lexicographically smallest monic
/// irreducible (constant term compared first) is chosen.
pub fn make_field(p: u64, m: usize, modulus: Option<&[u64]>) -> Result<Arc<FieldCtx>> {
    FieldCtx::new(p, m, modulus)
}

fn field_id(p: u64, m: usize, modulus: &[u64]) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |v: u64| {
        for b in v.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    };
    eat(p);
    eat(m as u64);
    for &c in modulus {
        eat(c);
    }
    h
}

impl FieldCtx {
    pub fn new(p: u64, m: usize, modulus: Option<&[u64]>) -> Result<Arc<Self>> {
        Self::build(p, m, modulus, None)
    }

    pub fn from_spec(spec: &FieldSpec) -> Result<Arc<Self>> {
        Self::build(spec.p, spec.m, spec.modulus.as_deref(), spec.beta.as_deref())
    }

    fn build(p: u64, m: usize, modulus: Option<&[u64]>, beta: Option<&[u64]>) -> Result<Arc<Self>> {
        if p >= MAX_CHARACTERISTIC {
            return Err(Error::CharacteristicTooLarge(p));
        }
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("extension degree must be at least 1".into()));
        }
        let order = (p as u128).checked_pow(m as u32).filter(|&o| o <= MAX_ORDER as u128);
        let order = match order {
            Some(o) => o as u64,
            None => {
                return Err(Error::FieldTooLarge {
                    order: (p as u128).saturating_pow(m as u32),
                    limit: MAX_ORDER,
                })
            }
        };
        let modulus = match modulus {
            Some(f) => {
                if f.len() != m + 1 || f[m] != 1 {
                    return Err(Error::DegreeMismatch { expected: m, got: f.len().saturating_sub(1) });
                }
                if f.iter().any(|&c| c >= p) {
                    return Err(Error::InvalidParameter(format!("modulus coefficient out of range for p={p}")));
                }
                if !fp_poly::is_irreducible(f, p) {
                    return Err(Error::ReducibleModulus { p });
                }
                f.to_vec()
            }
            None => smallest_irreducible(p, m),
        };
        let reduction = reduction_table(&modulus, p);
        let lazy_reduce = (p as u128) * (p as u128) * (2 * m as u128 + 2) < (1u128 << 63);
        let id = field_id(p, m, &modulus);
        let mut ctx = FieldCtx {
            p,
            m,
            order,
            modulus,
            id,
            reduction,
            lazy_reduce,
            beta: FFElement { field: id, coeffs: Coeffs::new() },
            log_table: OnceLock::new(),
            trace_basis: OnceLock::new(),
        };
        ctx.beta = match beta {
            Some(b) => {
                let e = ctx.from_coeffs(b)?;
                if !ctx.is_primitive(&e) {
                    return Err(Error::NotPrimitive(e.to_string()));
                }
                e
            }
            None => (1..order)
                .map(|i| ctx.element(i))
                .find(|e| ctx.is_primitive(e))
                .expect("every finite field has a primitive element"),
        };
        Ok(Arc::new(ctx))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Extension degree m.
    pub fn degree(&self) -> usize {
        self.m
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn beta(&self) -> &FFElement {
        &self.beta
    }

    pub fn to_spec(&self) -> FieldSpec {
        FieldSpec {
            p: self.p,
            m: self.m,
            modulus: Some(self.modulus.clone()),
            beta: Some(self.beta.to_vec()),
        }
    }

    pub fn same_field(&self, x: &FFElement) -> bool {
        x.field == self.id && x.coeffs.len() == self.m
    }

    fn raw(&self, coeffs: Coeffs) -> FFElement {
        FFElement { field: self.id, coeffs }
    }

    pub fn zero(&self) -> FFElement {
        self.raw(smallvec::smallvec![0; self.m])
    }

    pub fn one(&self) -> FFElement {
        self.scalar(1)
    }

    /// The image of an integer under Z -> GF(p) -> GF(p^m).
    pub fn scalar(&self, c: i64) -> FFElement {
        let mut v: Coeffs = smallvec::smallvec![0; self.m];
        v[0] = c.rem_euclid(self.p as i64) as u32;
        self.raw(v)
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FFElement> {
        if coeffs.len() != self.m {
            return Err(Error::InvalidElement(format!(
                "expected {} coefficients, got {}",
                self.m,
                coeffs.len()
            )));
        }
        if let Some(&c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::InvalidElement(format!("coefficient {c} not reduced mod {}", self.p)));
        }
        Ok(self.raw(coeffs.iter().map(|&c| c as u32).collect()))
    }

    /// Codec: index = sum c_i p^i.
    pub fn index(&self, x: &FFElement) -> u64 {
        debug_assert!(self.same_field(x));
        x.coeffs.iter().rev().fold(0u64, |acc, &c| acc * self.p + c as u64)
    }

    pub fn element(&self, mut idx: u64) -> FFElement {
        debug_assert!(idx < self.order);
        let mut v: Coeffs = smallvec::smallvec![0; self.m];
        for c in v.iter_mut() {
            *c = (idx % self.p) as u32;
            idx /= self.p;
        }
        self.raw(v)
    }

    pub fn try_element(&self, idx: u64) -> Result<FFElement> {
        if idx >= self.order {
            return Err(Error::InvalidElement(format!("index {idx} >= field order {}", self.order)));
        }
        Ok(self.element(idx))
    }

    /// All elements in codec order.
    pub fn elements(&self) -> impl Iterator<Item = FFElement> + '_ {
        (0..self.order).map(move |i| self.element(i))
    }

    pub fn nonzero_elements(&self) -> impl Iterator<Item = FFElement> + '_ {
        (1..self.order).map(move |i| self.element(i))
    }

    pub fn add(&self, a: &FFElement, b: &FFElement) -> FFElement {
        debug_assert!(self.same_field(a) && self.same_field(b));
        let p = self.p as u32;
        self.raw(
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(&x, &y)| {
                    let s = x + y;
                    if s >= p {
                        s - p
                    } else {
                        s
                    }
                })
                .collect(),
        )
    }

    pub fn sub(&self, a: &FFElement, b: &FFElement) -> FFElement {
        debug_assert!(self.same_field(a) && self.same_field(b));
        let p = self.p as u32;
        self.raw(a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| if x >= y { x - y } else { x + p - y }).collect())
    }

    pub fn neg(&self, a: &FFElement) -> FFElement {
        debug_assert!(self.same_field(a));
        let p = self.p as u32;
        self.raw(a.coeffs.iter().map(|&x| if x == 0 { 0 } else { p - x }).collect())
    }

    pub fn mul(&self, a: &FFElement, b: &FFElement) -> FFElement {
        debug_assert!(self.same_field(a) && self.same_field(b));
        let p = self.p;
        let m = self.m;
        if m == 1 {
            return self.raw(smallvec::smallvec![mul_mod_p(a.coeffs[0] as u64, b.coeffs[0] as u64, p) as u32]);
        }
        let mut prod: SmallVec<[u64; 24]> = smallvec::smallvec![0; 2 * m - 1];
        if self.lazy_reduce {
            for (i, &x) in a.coeffs.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                for (j, &y) in b.coeffs.iter().enumerate() {
                    prod[i + j] += x as u64 * y as u64;
                }
            }
            for d in m..2 * m - 1 {
                let c = prod[d] % p;
                if c == 0 {
                    continue;
                }
                for (acc, &r) in prod[..m].iter_mut().zip(&self.reduction[d - m]) {
                    *acc += c * r;
                }
            }
            self.raw(prod[..m].iter().map(|&v| (v % p) as u32).collect())
        } else {
            for (i, &x) in a.coeffs.iter().enumerate() {
                for (j, &y) in b.coeffs.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + mul_mod_p(x as u64, y as u64, p)) % p;
                }
            }
            for d in m..2 * m - 1 {
                let c = prod[d];
                for (acc, &r) in prod[..m].iter_mut().zip(&self.reduction[d - m]) {
                    *acc = (*acc + mul_mod_p(c, r, p)) % p;
                }
            }
            self.raw(prod[..m].iter().map(|&v| v as u32).collect())
        }
    }

    pub fn square(&self, a: &FFElement) -> FFElement {
        self.mul(a, a)
    }

    /// Multiplication by an integer scalar.
    pub fn mul_scalar(&self, a: &FFElement, c: i64) -> FFElement {
        let c = c.rem_euclid(self.p as i64) as u64;
        self.raw(a.coeffs.iter().map(|&x| mul_mod_p(x as u64, c, self.p) as u32).collect())
    }

    /// Square-and-multiply; for a nonzero base the exponent is reduced mod q-1.
    /// `0^0 = 1`.
    pub fn pow(&self, a: &FFElement, e: u64) -> FFElement {
        if e == 0 {
            return self.one();
        }
        if a.is_zero() {
            return self.zero();
        }
        let mut e = e % (self.order - 1);
        if e == 0 {
            return self.one();
        }
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// `a^{p^j}`.
    pub fn frobenius(&self, a: &FFElement, j: usize) -> FFElement {
        let j = j % self.m;
        let mut out = a.clone();
        for _ in 0..j {
            out = self.pow(&out, self.p);
        }
        out
    }

    /// Inverse of `x -> x^{p^j}`.
    pub fn frobenius_inverse(&self, a: &FFElement, j: usize) -> FFElement {
        let j = j % self.m;
        self.frobenius(a, (self.m - j) % self.m)
    }

    pub fn inv(&self, a: &FFElement) -> Result<FFElement> {
        if a.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, self.order - 2))
    }

    pub fn div(&self, a: &FFElement, b: &FFElement) -> Result<FFElement> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    /// Checked entry point: verifies operand membership and arity.
    pub fn arith(&self, op: ArithOp, operands: &[FFElement]) -> Result<FFElement> {
        if operands.iter().any(|x| !self.same_field(x)) {
            return Err(Error::FieldMismatch);
        }
        let arity = match op {
            ArithOp::Add | ArithOp::Sub | ArithOp::Mul => 2,
            ArithOp::Neg | ArithOp::Inv | ArithOp::Pow(_) => 1,
        };
        if operands.len() != arity {
            return Err(Error::InvalidParameter(format!("{op:?} takes {arity} operand(s)")));
        }
        let a = &operands[0];
        Ok(match op {
            ArithOp::Add => self.add(a, &operands[1]),
            ArithOp::Sub => self.sub(a, &operands[1]),
            ArithOp::Mul => self.mul(a, &operands[1]),
            ArithOp::Neg => self.neg(a),
            ArithOp::Inv => self.inv(a)?,
            ArithOp::Pow(e) => self.pow(a, e),
        })
    }

    pub fn multiplicative_order(&self, a: &FFElement) -> Result<u64> {
        if a.is_zero() {
            return Err(Error::ZeroInput);
        }
        let mut ord = self.order - 1;
        for l in prime_factors(self.order - 1) {
            while ord % l == 0 && self.pow(a, ord / l) == self.one() {
                ord /= l;
            }
        }
        Ok(ord)
    }

    pub fn is_primitive(&self, a: &FFElement) -> bool {
        if a.is_zero() {
            return false;
        }
        let one = self.one();
        prime_factors(self.order - 1).into_iter().all(|l| self.pow(a, (self.order - 1) / l) != one)
    }

    pub fn beta_pow(&self, t: u64) -> FFElement {
        self.pow(&self.beta, t)
    }

    fn log_table(&self) -> Result<&Vec<u32>> {
        if self.order > LOG_TABLE_LIMIT {
            return Err(Error::FieldTooLarge { order: self.order as u128, limit: LOG_TABLE_LIMIT });
        }
        Ok(self.log_table.get_or_init(|| {
            let mut table = vec![u32::MAX; self.order as usize];
            let mut cur = self.one();
            for t in 0..self.order - 1 {
                table[self.index(&cur) as usize] = t as u32;
                cur = self.mul(&cur, &self.beta);
            }
            table
        }))
    }

    /// `t` in [0, q-1) with beta^t = x.
    pub fn discrete_log(&self, x: &FFElement) -> Result<u64> {
        if !self.same_field(x) {
            return Err(Error::FieldMismatch);
        }
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        let table = self.log_table()?;
        Ok(table[self.index(x) as usize] as u64)
    }

    /// Index j of the power-residue class: x^{(q-1)/g} = w^j with
    /// g = gcd(k, q-1) and w = beta^{(q-1)/g}. Class 0 is the g-th powers.
    pub fn power_class(&self, x: &FFElement, k: u64) -> Result<u64> {
        if !self.same_field(x) {
            return Err(Error::FieldMismatch);
        }
        if x.is_zero() {
            return Err(Error::ZeroInput);
        }
        if k == 0 {
            return Err(Error::InvalidParameter("power class needs k >= 1".into()));
        }
        let g = gcd(k, self.order - 1);
        if self.order <= LOG_TABLE_LIMIT {
            return Ok(self.discrete_log(x)? % g);
        }
        let y = self.pow(x, (self.order - 1) / g);
        let w = self.beta_pow((self.order - 1) / g);
        let mut cur = self.one();
        for j in 0..g {
            if cur == y {
                return Ok(j);
            }
            cur = self.mul(&cur, &w);
        }
        unreachable!("x^((q-1)/g) is a g-th root of unity")
    }

    /// Nonzero squares of the multiplicative group (every element when p = 2).
    pub fn is_square(&self, x: &FFElement) -> Result<bool> {
        Ok(self.power_class(x, 2)? == 0)
    }

    /// The subgroup of ell-th roots of unity listed as w^0, w^1, ..., w^{ell-1}
    /// with w = beta^{(q-1)/ell}.
    pub fn roots_of_unity(&self, ell: u64) -> Result<Vec<FFElement>> {
        if ell == 0 || (self.order - 1) % ell != 0 {
            return Err(Error::InvalidParameter(format!("{ell} does not divide q-1 = {}", self.order - 1)));
        }
        let w = self.beta_pow((self.order - 1) / ell);
        let mut out = Vec::with_capacity(ell as usize);
        let mut cur = self.one();
        for _ in 0..ell {
            out.push(cur.clone());
            cur = self.mul(&cur, &w);
        }
        Ok(out)
    }

    /// Absolute trace tr_{p^m/p}(x) as a residue mod p. The trace is GF(p)-linear,
    /// so it is a dot product with the traces of the basis monomials.
    pub fn abs_trace(&self, x: &FFElement) -> u64 {
        debug_assert!(self.same_field(x));
        let basis = self.trace_basis.get_or_init(|| {
            (0..self.m)
                .map(|i| {
                    let mut e = self.zero();
                    e.coeffs[i] = 1;
                    let mut acc = self.zero();
                    let mut cur = e;
                    for _ in 0..self.m {
                        acc = self.add(&acc, &cur);
                        cur = self.pow(&cur, self.p);
                    }
                    debug_assert!(acc.coeffs[1..].iter().all(|&c| c == 0));
                    acc.coeffs[0] as u64
                })
                .collect()
        });
        x.coeffs.iter().zip(basis).fold(0u64, |acc, (&c, &t)| (acc + mul_mod_p(c as u64, t, self.p)) % self.p)
    }

    /// Additive difference of codec indices, `index(element(a) - element(b))`.
    pub fn index_sub(&self, a: u64, b: u64) -> u64 {
        let p = self.p;
        let (mut a, mut b) = (a, b);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.m {
            let d = (a % p + p - b % p) % p;
            out += d * place;
            place = place.wrapping_mul(p);
            a /= p;
            b /= p;
        }
        out
    }
}

fn smallest_irreducible(p: u64, m: usize) -> Vec<u64> {
    if m == 1 {
        return vec![0, 1];
    }
    // Enumerate (c_0, ..., c_{m-1}) lexicographically with c_0 most significant.
    let mut digits = vec![0u64; m];
    loop {
        let mut f = digits.clone();
        f.push(1);
        if digits[0] != 0 && fp_poly::is_irreducible(&f, p) {
            return f;
        }
        let mut i = m;
        loop {
            assert!(i > 0, "an irreducible polynomial of every degree exists");
            i -= 1;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
    }
}

fn reduction_table(modulus: &[u64], p: u64) -> Vec<Vec<u64>> {
    let m = modulus.len() - 1;
    let mut out = Vec::with_capacity(m.saturating_sub(1));
    if m < 2 {
        return out;
    }
    // x^m = -(c_0 + ... + c_{m-1} x^{m-1})
    let mut cur: Vec<u64> = modulus[..m].iter().map(|&c| (p - c) % p).collect();
    for _ in 0..m - 1 {
        out.push(cur.clone());
        // multiply by x
        let top = cur[m - 1];
        for i in (1..m).rev() {
            cur[i] = cur[i - 1];
        }
        cur[0] = 0;
        for i in 0..m {
            cur[i] = (cur[i] + mul_mod_p(top, (p - modulus[i]) % p, p)) % p;
        }
    }
    out
}
