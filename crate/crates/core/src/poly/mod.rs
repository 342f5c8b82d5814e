//! Polynomials over a [`FieldCtx`], both as coefficient data and as maps.
//!
//! Storage is sparse: a sorted list of `(exponent, coefficient)` with nonzero
//! coefficients. Exponents are kept as given; reduction modulo `x^q - x` only
//! happens through [`PolyMap::reduce`].

mod linearized;
mod literal;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};

pub use linearized::LinearizedPoly;
pub use literal::{parse_poly, PolyLiteral};

/// Largest degree for which a dense coefficient vector is materialized.
pub const DENSE_LIMIT: u64 = 1 << 20;
/// Bound on operand degrees for symbolic composition.
pub const COMPOSE_LIMIT: u64 = 64;
/// Bound on the number of terms produced by symbolic products.
pub const TERM_LIMIT: usize = 1 << 16;
/// Largest domain evaluated in one table.
pub const TABLE_LIMIT: u64 = 1 << 22;
/// Largest field for the exhaustive additivity check.
pub const ADDITIVE_EXHAUSTIVE_LIMIT: u64 = 1 << 10;

#[derive(Clone)]
pub struct PolyMap {
    ctx: Arc<FieldCtx>,
    terms: Vec<(u64, FFElement)>,
}

/// Witness of `g(x) = a f(x + b) + c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affine {
    pub a: FFElement,
    pub b: FFElement,
    pub c: FFElement,
}

impl PartialEq for PolyMap {
    fn eq(&self, other: &Self) -> bool {
        *self.ctx == *other.ctx && self.terms == other.terms
    }
}

impl Eq for PolyMap {}

impl fmt::Debug for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyMap({self})")
    }
}

impl fmt::Display for PolyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&literal::format_expr(self))
    }
}

impl PolyMap {
    /// Builds from arbitrary `(exponent, coefficient)` pairs; duplicate
    /// exponents are summed and zero coefficients dropped.
    pub fn new(ctx: &Arc<FieldCtx>, terms: impl IntoIterator<Item = (u64, FFElement)>) -> Result<Self> {
        let mut acc: BTreeMap<u64, FFElement> = BTreeMap::new();
        for (e, c) in terms {
            if !ctx.same_field(&c) {
                return Err(Error::FieldMismatch);
            }
            add_into(ctx, &mut acc, e, &c);
        }
        Ok(Self::from_map(ctx, acc))
    }

    fn from_map(ctx: &Arc<FieldCtx>, acc: BTreeMap<u64, FFElement>) -> Self {
        PolyMap { ctx: Arc::clone(ctx), terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect() }
    }

    /// Dense coefficients, low to high.
    pub fn from_dense(ctx: &Arc<FieldCtx>, coeffs: Vec<FFElement>) -> Result<Self> {
        Self::new(ctx, coeffs.into_iter().enumerate().map(|(i, c)| (i as u64, c)))
    }

    pub fn zero(ctx: &Arc<FieldCtx>) -> Self {
        PolyMap { ctx: Arc::clone(ctx), terms: Vec::new() }
    }

    pub fn constant(ctx: &Arc<FieldCtx>, c: FFElement) -> Self {
        Self::monomial(ctx, 0, c)
    }

    pub fn x(ctx: &Arc<FieldCtx>) -> Self {
        Self::monomial(ctx, 1, ctx.one())
    }

    pub fn monomial(ctx: &Arc<FieldCtx>, e: u64, c: FFElement) -> Self {
        debug_assert!(ctx.same_field(&c));
        let terms = if c.is_zero() { Vec::new() } else { vec![(e, c)] };
        PolyMap { ctx: Arc::clone(ctx), terms }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> &[(u64, FFElement)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u64> {
        self.terms.last().map(|(e, _)| *e)
    }

    pub fn is_constant(&self) -> bool {
        self.degree().map_or(true, |d| d == 0)
    }

    pub fn coeff(&self, e: u64) -> FFElement {
        match self.terms.binary_search_by_key(&e, |(x, _)| *x) {
            Ok(i) => self.terms[i].1.clone(),
            Err(_) => self.ctx.zero(),
        }
    }

    pub fn leading_coeff(&self) -> Option<&FFElement> {
        self.terms.last().map(|(_, c)| c)
    }

    /// Dense coefficient vector of length `degree + 1`.
    pub fn dense_coeffs(&self) -> Result<Vec<FFElement>> {
        let Some(d) = self.degree() else {
            return Ok(Vec::new());
        };
        if d > DENSE_LIMIT {
            return Err(Error::DegreeTooHigh { degree: d, limit: DENSE_LIMIT });
        }
        let mut out = vec![self.ctx.zero(); d as usize + 1];
        for (e, c) in &self.terms {
            out[*e as usize] = c.clone();
        }
        Ok(out)
    }

    /// f(x) by term-wise powering.
    pub fn eval(&self, x: &FFElement) -> FFElement {
        debug_assert!(self.ctx.same_field(x));
        let ctx = &*self.ctx;
        let mut acc = ctx.zero();
        let mut prev_e = 0u64;
        let mut power = ctx.one();
        for (e, c) in &self.terms {
            if *e != prev_e {
                power = ctx.mul(&power, &ctx.pow(x, e - prev_e));
                prev_e = *e;
            }
            acc = ctx.add(&acc, &ctx.mul(c, &power));
        }
        acc
    }

    pub fn try_eval(&self, x: &FFElement) -> Result<FFElement> {
        if !self.ctx.same_field(x) {
            return Err(Error::FieldMismatch);
        }
        Ok(self.eval(x))
    }

    /// f(x) by Horner's rule over the dense form.
    pub fn eval_horner(&self, x: &FFElement) -> Result<FFElement> {
        if !self.ctx.same_field(x) {
            return Err(Error::FieldMismatch);
        }
        let dense = self.dense_coeffs()?;
        let ctx = &*self.ctx;
        Ok(dense.iter().rev().fold(ctx.zero(), |acc, c| ctx.add(&ctx.mul(&acc, x), c)))
    }

    /// Codec indices of f(x) for every x, in codec order.
    pub fn eval_table(&self) -> Result<Vec<u64>> {
        let q = self.ctx.order();
        if q > TABLE_LIMIT {
            return Err(Error::DomainTooLarge { size: q, limit: TABLE_LIMIT });
        }
        let ctx = &*self.ctx;
        Ok((0..q).into_par_iter().map(|i| ctx.index(&self.eval(&ctx.element(i)))).collect())
    }

    pub fn add(&self, other: &PolyMap) -> PolyMap {
        let mut acc: BTreeMap<u64, FFElement> = self.terms.iter().cloned().collect();
        for (e, c) in &other.terms {
            add_into(&self.ctx, &mut acc, *e, c);
        }
        Self::from_map(&self.ctx, acc)
    }

    pub fn neg(&self) -> PolyMap {
        PolyMap {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|(e, c)| (*e, self.ctx.neg(c))).collect(),
        }
    }

    pub fn sub(&self, other: &PolyMap) -> PolyMap {
        self.add(&other.neg())
    }

    pub fn scale(&self, a: &FFElement) -> PolyMap {
        if a.is_zero() {
            return Self::zero(&self.ctx);
        }
        PolyMap {
            ctx: Arc::clone(&self.ctx),
            terms: self.terms.iter().map(|(e, c)| (*e, self.ctx.mul(c, a))).collect(),
        }
    }

    pub fn mul(&self, other: &PolyMap) -> Result<PolyMap> {
        if self.terms.len().saturating_mul(other.terms.len()) > TERM_LIMIT * 16 {
            return Err(Error::DegreeTooHigh {
                degree: self.degree().unwrap_or(0) + other.degree().unwrap_or(0),
                limit: TERM_LIMIT as u64,
            });
        }
        let mut acc: BTreeMap<u64, FFElement> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.checked_add(*e2).ok_or(Error::DegreeTooHigh { degree: u64::MAX, limit: u64::MAX })?;
                add_into(&self.ctx, &mut acc, e, &self.ctx.mul(c1, c2));
            }
        }
        let out = Self::from_map(&self.ctx, acc);
        if out.terms.len() > TERM_LIMIT {
            return Err(Error::DegreeTooHigh { degree: out.degree().unwrap_or(0), limit: TERM_LIMIT as u64 });
        }
        Ok(out)
    }

    /// `f(x)^{p^j}` computed symbolically: coefficients go through the
    /// Frobenius and exponents are multiplied by p^j.
    pub fn frobenius_twist(&self, j: usize) -> Result<PolyMap> {
        let pj = self.ctx.p().checked_pow(j as u32).ok_or(Error::DegreeTooHigh { degree: u64::MAX, limit: u64::MAX })?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (e, c) in &self.terms {
            let e2 = e.checked_mul(pj).ok_or(Error::DegreeTooHigh { degree: u64::MAX, limit: u64::MAX })?;
            terms.push((e2, self.ctx.frobenius(c, j)));
        }
        Ok(PolyMap { ctx: Arc::clone(&self.ctx), terms })
    }

    /// `f^e` through the base-p digits of e: f^e = prod_i (f^{p^i})^{d_i}.
    /// This keeps the term count bounded by the digit sum rather than by e.
    pub fn pow(&self, e: u64) -> Result<PolyMap> {
        let mut acc = Self::constant(&self.ctx, self.ctx.one());
        let p = self.ctx.p();
        let mut rest = e;
        let mut j = 0usize;
        while rest > 0 {
            let d = rest % p;
            if d > 0 {
                let twisted = self.frobenius_twist(j)?;
                for _ in 0..d {
                    acc = acc.mul(&twisted)?;
                }
            }
            rest /= p;
            j += 1;
        }
        Ok(acc)
    }

    /// Symbolic composition `f(g(x))`, limited to operands of degree <= 64.
    pub fn compose(&self, g: &PolyMap) -> Result<PolyMap> {
        for d in [self.degree().unwrap_or(0), g.degree().unwrap_or(0)] {
            if d > COMPOSE_LIMIT {
                return Err(Error::DegreeTooHigh { degree: d, limit: COMPOSE_LIMIT });
            }
        }
        let dense = self.dense_coeffs()?;
        let mut acc = Self::zero(&self.ctx);
        for c in dense.iter().rev() {
            acc = acc.mul(g)?.add(&Self::constant(&self.ctx, c.clone()));
        }
        Ok(acc)
    }

    /// `f(x + b)`, expanded with [`PolyMap::pow`] so any degree is accepted.
    pub fn shift(&self, b: &FFElement) -> Result<PolyMap> {
        let lin = Self::new(&self.ctx, [(1, self.ctx.one()), (0, b.clone())])?;
        let mut acc = Self::zero(&self.ctx);
        for (e, c) in &self.terms {
            acc = acc.add(&lin.pow(*e)?.scale(c));
        }
        Ok(acc)
    }

    /// The unique representative of degree < q inducing the same map.
    pub fn reduce(&self) -> PolyMap {
        let q = self.ctx.order();
        let mut acc = BTreeMap::new();
        for (e, c) in &self.terms {
            let r = if *e == 0 { 0 } else { (e - 1) % (q - 1) + 1 };
            add_into(&self.ctx, &mut acc, r, c);
        }
        Self::from_map(&self.ctx, acc)
    }

    /// Interpolates a table `values[i] = f(element(i))` by
    /// c_0 = f(0), c_j = -sum_a f(a) a^{q-1-j} (with 0^0 = 1).
    pub fn interpolate(ctx: &Arc<FieldCtx>, values: &[FFElement]) -> Result<PolyMap> {
        let q = ctx.order();
        if values.len() as u64 != q {
            return Err(Error::InvalidParameter(format!("expected {q} values, got {}", values.len())));
        }
        if q > 1 << 12 {
            return Err(Error::DomainTooLarge { size: q, limit: 1 << 12 });
        }
        if values.iter().any(|v| !ctx.same_field(v)) {
            return Err(Error::FieldMismatch);
        }
        let qu = q as usize;
        let mut c = vec![ctx.zero(); qu];
        c[0] = values[0].clone();
        c[qu - 1] = ctx.neg(&values[0]);
        for (i, fa) in values.iter().enumerate().skip(1) {
            if fa.is_zero() {
                continue;
            }
            let a = ctx.element(i as u64);
            // k runs over 0..=q-2; the exponent q-1-j = k puts it into c[q-1-k].
            let mut term = fa.clone();
            for k in 0..qu - 1 {
                let j = qu - 1 - k;
                c[j] = ctx.sub(&c[j], &term);
                term = ctx.mul(&term, &a);
            }
        }
        Self::from_dense(ctx, c)
    }

    /// Normal form a f(x+b) + c: monic, vanishing at 0 and, when p does not
    /// divide the degree d, without an x^{d-1} term.
    pub fn normalize(&self) -> Result<(PolyMap, Affine)> {
        let ctx = &*self.ctx;
        let d = match self.degree() {
            Some(d) if d >= 1 => d,
            _ => return Err(Error::ConstantPolynomial),
        };
        let lead = self.leading_coeff().expect("nonzero").clone();
        let a = ctx.inv(&lead)?;
        let b = if d % ctx.p() != 0 {
            // coefficient of x^{d-1} in f(x+b) is c_{d-1} + d b c_d
            let cd1 = self.coeff(d - 1);
            let denom = ctx.mul_scalar(&lead, (d % ctx.p()) as i64);
            ctx.neg(&ctx.div(&cd1, &denom)?)
        } else {
            ctx.zero()
        };
        let shifted = self.shift(&b)?.scale(&a);
        let c = ctx.neg(&shifted.coeff(0));
        let g = shifted.add(&Self::constant(&self.ctx, c.clone()));
        Ok((g, Affine { a, b, c }))
    }

    /// `a f(x + b) + c`.
    pub fn apply_affine(&self, w: &Affine) -> Result<PolyMap> {
        Ok(self.shift(&w.b)?.scale(&w.a).add(&Self::constant(&self.ctx, w.c.clone())))
    }

    /// Every exponent is a power of p (so there is no constant term).
    pub fn is_additive_structural(&self) -> bool {
        let p = self.ctx.p();
        self.terms.iter().all(|(e, _)| {
            let mut e = *e;
            if e == 0 {
                return false;
            }
            while e % p == 0 {
                e /= p;
            }
            e == 1
        })
    }

    /// Checks f(x+y) = f(x) + f(y) over all pairs.
    pub fn is_additive_exhaustive(&self) -> Result<bool> {
        let ctx = &*self.ctx;
        let table = self.eval_table()?;
        let q = ctx.order();
        let vals: Vec<FFElement> = table.iter().map(|&i| ctx.element(i)).collect();
        Ok((0..q).into_par_iter().all(|x| {
            let ex = ctx.element(x);
            (0..q).all(|y| {
                let s = ctx.index(&ctx.add(&ex, &ctx.element(y)));
                ctx.add(&vals[x as usize], &vals[y as usize]) == vals[s as usize]
            })
        }))
    }

    /// Additivity as a map. A structural hit is conclusive; otherwise small
    /// fields are checked exhaustively and larger ones through the reduced
    /// representative, which is additive exactly when it is a p-polynomial.
    pub fn is_additive(&self) -> bool {
        if self.is_additive_structural() {
            return true;
        }
        if self.ctx.order() <= ADDITIVE_EXHAUSTIVE_LIMIT {
            return self.is_additive_exhaustive().expect("field within the exhaustive gate");
        }
        self.reduce().is_additive_structural()
    }

    pub fn to_literal(&self) -> PolyLiteral {
        PolyLiteral(self.terms.iter().map(|(e, c)| (*e, c.to_vec())).collect())
    }
}

fn add_into(ctx: &FieldCtx, acc: &mut BTreeMap<u64, FFElement>, e: u64, c: &FFElement) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&e) {
        Some(v) => *v = ctx.add(v, c),
        None => {
            acc.insert(e, c.clone());
        }
    }
}
