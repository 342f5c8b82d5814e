//! q-polynomials L(x) = sum a_i x^{q^i} over GF(q^r), q = p^k.

use std::sync::Arc;

use super::PolyMap;
use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::linalg::rank_mod_p;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearizedPoly {
    ctx: Arc<FieldCtx>,
    k: usize,
    coeffs: Vec<FFElement>,
}

impl LinearizedPoly {
    /// `coeffs[i]` multiplies x^{q^i} with q = p^k; at most m/k entries.
    pub fn new(ctx: &Arc<FieldCtx>, k: usize, coeffs: Vec<FFElement>) -> Result<Self> {
        if k == 0 || ctx.degree() % k != 0 {
            return Err(Error::NotASubfield(k));
        }
        let r = ctx.degree() / k;
        if coeffs.len() > r {
            return Err(Error::InvalidParameter(format!("{} coefficients for a degree-{r} extension", coeffs.len())));
        }
        if coeffs.iter().any(|c| !ctx.same_field(c)) {
            return Err(Error::FieldMismatch);
        }
        let mut coeffs = coeffs;
        coeffs.resize(r, ctx.zero());
        Ok(LinearizedPoly { ctx: Arc::clone(ctx), k, coeffs })
    }

    pub fn identity(ctx: &Arc<FieldCtx>, k: usize) -> Result<Self> {
        Self::new(ctx, k, vec![ctx.one()])
    }

    /// tr_{q^r/q}.
    pub fn trace(ctx: &Arc<FieldCtx>, k: usize) -> Result<Self> {
        if k == 0 || ctx.degree() % k != 0 {
            return Err(Error::NotASubfield(k));
        }
        Self::new(ctx, k, vec![ctx.one(); ctx.degree() / k])
    }

    /// x^q - x.
    pub fn frobenius_minus_identity(ctx: &Arc<FieldCtx>, k: usize) -> Result<Self> {
        if k == 0 || ctx.degree() % k != 0 || ctx.degree() == k {
            return Err(Error::NotASubfield(k));
        }
        Self::new(ctx, k, vec![ctx.neg(&ctx.one()), ctx.one()])
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[FFElement] {
        &self.coeffs
    }

    /// log_p of q.
    pub fn sub_degree(&self) -> usize {
        self.k
    }

    pub fn q(&self) -> u64 {
        self.ctx.p().pow(self.k as u32)
    }

    /// r with q^r the field order.
    pub fn rel_degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn eval(&self, x: &FFElement) -> FFElement {
        let ctx = &*self.ctx;
        let mut acc = ctx.zero();
        let mut cur = x.clone();
        for (i, a) in self.coeffs.iter().enumerate() {
            if !a.is_zero() {
                acc = ctx.add(&acc, &ctx.mul(a, &cur));
            }
            if i + 1 < self.coeffs.len() {
                cur = ctx.frobenius(&cur, self.k);
            }
        }
        acc
    }

    pub fn to_polymap(&self) -> PolyMap {
        let q = self.q();
        let terms = self.coeffs.iter().enumerate().map(|(i, a)| (q.pow(i as u32), a.clone()));
        PolyMap::new(&self.ctx, terms).expect("coefficients belong to ctx")
    }

    /// Rank as a GF(q)-linear map. L is GF(p)-linear too, and its GF(p)-rank
    /// on the power basis is k times the GF(q)-rank.
    pub fn rank(&self) -> usize {
        let m = self.ctx.degree();
        let rows: Vec<Vec<u64>> = (0..m)
            .map(|j| {
                let mut e = vec![0u64; m];
                e[j] = 1;
                let img = self.eval(&self.ctx.from_coeffs(&e).expect("basis vector"));
                img.to_vec()
            })
            .collect();
        let rp = rank_mod_p(rows, self.ctx.p());
        debug_assert_eq!(rp % self.k, 0);
        rp / self.k
    }

    pub fn kernel_dim(&self) -> usize {
        self.rel_degree() - self.rank()
    }

    /// Whether every coefficient lies in GF(q), i.e. L has coefficients in F_q[x].
    pub fn has_subfield_coeffs(&self) -> bool {
        self.coeffs.iter().all(|a| self.ctx.frobenius(a, self.k) == *a)
    }
}
