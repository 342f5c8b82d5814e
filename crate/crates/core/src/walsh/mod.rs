//! Exact Walsh transforms W_F(u, v) = sum_x w^{tr(v F(x)) + tr(u x)} and the
//! characterization sums built from W_F(0, .).

mod cyclo;
mod phi;

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

pub use cyclo::CycloInt;
pub use phi::{validate_phi, PhiGadget, PhiMode, MAX_PHI_DEGREE};

use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::poly::PolyMap;

/// Largest field for exhaustive Walsh summation.
pub const WALSH_LIMIT: u64 = 1 << 12;
/// Largest phi degree accepted by [`char_sum`].
pub const CHAR_SUM_MAX_DEGREE: usize = 3;

fn gate(ctx: &FieldCtx) -> Result<()> {
    if ctx.order() > WALSH_LIMIT {
        return Err(Error::DomainTooLarge { size: ctx.order(), limit: WALSH_LIMIT });
    }
    Ok(())
}

/// Gram matrix T[i][j] = tr(x^i x^j), so tr(a b) = a^T T b over GF(p).
fn trace_form(ctx: &FieldCtx) -> Vec<Vec<u64>> {
    let m = ctx.degree();
    let unit = |i: usize| {
        let mut c = vec![0u64; m];
        c[i] = 1;
        ctx.from_coeffs(&c).expect("basis vector")
    };
    (0..m).map(|i| (0..m).map(|j| ctx.abs_trace(&ctx.mul(&unit(i), &unit(j)))).collect()).collect()
}

fn bilinear(t: &[Vec<u64>], a: &[u32], b: &[u32], p: u64) -> u64 {
    let mut acc = 0u64;
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        let row: u64 = t[i].iter().zip(b).map(|(&tij, &bj)| tij * bj as u64 % p).sum::<u64>() % p;
        acc = (acc + ai as u64 * row) % p;
    }
    acc
}

/// W_F(u, v) for a single pair.
pub fn walsh(f: &PolyMap, u: &FFElement, v: &FFElement) -> Result<CycloInt> {
    let ctx = f.ctx();
    gate(ctx)?;
    if !ctx.same_field(u) || !ctx.same_field(v) {
        return Err(Error::FieldMismatch);
    }
    let p = ctx.p();
    let mut counts = vec![0u64; p as usize];
    for x in ctx.elements() {
        let e = (ctx.abs_trace(&ctx.mul(v, &f.eval(&x))) + ctx.abs_trace(&ctx.mul(u, &x))) % p;
        counts[e as usize] += 1;
    }
    Ok(CycloInt::from_exponent_counts(p, &counts))
}

/// The table v -> W_F(0, v) in codec order, with cached convolution powers.
#[derive(Debug, Clone)]
pub struct WalshSpectrum {
    ctx: Arc<FieldCtx>,
    values: Vec<CycloInt>,
}

impl WalshSpectrum {
    /// W_F(0, v) = sum_b #F^{-1}(b) w^{tr(v b)}, built from the value histogram.
    pub fn new(f: &PolyMap) -> Result<Self> {
        let ctx = Arc::clone(f.ctx());
        gate(&ctx)?;
        let q = ctx.order();
        let mut counts = vec![0u64; q as usize];
        for i in f.eval_table()? {
            counts[i as usize] += 1;
        }
        Ok(Self::from_counts(&ctx, &counts))
    }

    /// From preimage counts N_b indexed by codec.
    pub fn from_counts(ctx: &Arc<FieldCtx>, counts: &[u64]) -> Self {
        let p = ctx.p();
        let t = trace_form(ctx);
        let image: Vec<(FFElement, u64)> =
            counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(b, &c)| (ctx.element(b as u64), c)).collect();
        let values = (0..ctx.order())
            .into_par_iter()
            .map(|v| {
                let ve = ctx.element(v);
                let mut exps = vec![0u64; p as usize];
                for (b, c) in &image {
                    exps[bilinear(&t, ve.coeffs(), b.coeffs(), p) as usize] += c;
                }
                CycloInt::from_exponent_counts(p, &exps)
            })
            .collect();
        WalshSpectrum { ctx: Arc::clone(ctx), values }
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    /// W_F(0, v) by codec index.
    pub fn values(&self) -> &[CycloInt] {
        &self.values
    }

    fn convolve(&self, a: &[CycloInt]) -> Vec<CycloInt> {
        let q = self.ctx.order();
        let ctx = &*self.ctx;
        (0..q)
            .into_par_iter()
            .map(|v| {
                let mut acc = CycloInt::zero(ctx.p());
                for u in 0..q {
                    acc = acc.add(&a[u as usize].mul(&self.values[ctx.index_sub(v, u) as usize]));
                }
                acc
            })
            .collect()
    }

    /// S_j = sum over v_1 + ... + v_j = 0 of prod W_F(0, v_i), for j >= 1.
    pub fn constrained_sums(&self, jmax: usize) -> Vec<BigInt> {
        let mut out = Vec::with_capacity(jmax);
        if jmax == 0 {
            return out;
        }
        let mut cur = self.values.clone();
        let at_zero = |c: &CycloInt| {
            BigInt::from(c.as_integer().expect("constrained Walsh sums are rational integers"))
        };
        out.push(at_zero(&cur[0]));
        for j in 2..=jmax {
            if j == jmax {
                // only the value at 0 is needed for the last step
                let ctx = &*self.ctx;
                let mut acc = CycloInt::zero(ctx.p());
                for u in 0..ctx.order() {
                    acc = acc.add(&cur[u as usize].mul(&self.values[ctx.index_sub(0, u) as usize]));
                }
                out.push(at_zero(&acc));
            } else {
                cur = self.convolve(&cur);
                out.push(at_zero(&cur[0]));
            }
        }
        out
    }
}

/// A_0 p^m + sum_{j >= 1} A_j p^{m - jm} S_j, exactly.
pub fn char_sum(f: &PolyMap, g: &PhiGadget) -> Result<BigRational> {
    let spec = WalshSpectrum::new(f)?;
    char_sum_from(&spec, g)
}

pub fn char_sum_from(spec: &WalshSpectrum, g: &PhiGadget) -> Result<BigRational> {
    let ctx = spec.ctx();
    if g.p() != ctx.p() || g.m() as usize != ctx.degree() {
        return Err(Error::InvalidParameter(format!(
            "phi built for p={} m={}, field is p={} m={}",
            g.p(),
            g.m(),
            ctx.p(),
            ctx.degree()
        )));
    }
    let jmax = g.degree();
    if jmax > CHAR_SUM_MAX_DEGREE {
        return Err(Error::DegreeTooHigh { degree: jmax as u64, limit: CHAR_SUM_MAX_DEGREE as u64 });
    }
    let q = BigInt::from(ctx.order());
    let sums = spec.constrained_sums(jmax);
    let mut acc = &g.coeffs()[0] * BigRational::from_integer(q.clone());
    let mut scale = BigInt::from(1);
    for (j, s) in sums.into_iter().enumerate() {
        let a = &g.coeffs()[j + 1];
        if !a.is_zero() {
            acc += a * BigRational::new(s, scale.clone());
        }
        scale *= &q;
    }
    Ok(acc)
}

/// Whether the characterization sum attains the gadget's bound.
pub fn spectral_verdict(f: &PolyMap, g: &PhiGadget) -> Result<bool> {
    Ok(char_sum(f, g)? == g.bound())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use crate::poly::parse_poly;

    fn int(v: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(v))
    }

    /// sum_b phi(N_b) over all b, zero counts included.
    fn phi_oracle(f: &PolyMap, g: &PhiGadget) -> BigRational {
        let ctx = f.ctx();
        let mut counts = vec![0u64; ctx.order() as usize];
        for x in ctx.elements() {
            counts[ctx.index(&f.eval(&x)) as usize] += 1;
        }
        counts.iter().map(|&c| g.eval(c)).sum()
    }

    #[test]
    fn walsh_examples() {
        let f9 = make_field(3, 2, None).unwrap();
        let f = parse_poly(&f9, "x^5 + x").unwrap();
        assert_eq!(walsh(&f, &f9.zero(), &f9.zero()).unwrap().as_integer(), Some(9));
        let z = PolyMap::zero(&f9);
        assert_eq!(walsh(&z, &f9.zero(), f9.beta()).unwrap().as_integer(), Some(9));
        let f3 = make_field(3, 1, None).unwrap();
        let x = PolyMap::x(&f3);
        assert_eq!(walsh(&x, &f3.zero(), &f3.one()).unwrap().as_integer(), Some(0));
    }

    #[test]
    fn table_matches_pointwise() {
        let f25 = make_field(5, 2, None).unwrap();
        let f = parse_poly(&f25, "x^3 + [1,2]*x").unwrap();
        let spec = WalshSpectrum::new(&f).unwrap();
        for v in f25.elements().step_by(3) {
            assert_eq!(spec.values()[f25.index(&v) as usize], walsh(&f, &f25.zero(), &v).unwrap());
        }
    }

    #[test]
    fn fourier_inversion_at_zero() {
        for (p, m, src) in [(3, 2, "x^2 + x"), (5, 2, "x^4"), (3, 3, "x^3 - x"), (2, 4, "x^3 + x^2")] {
            let ctx = make_field(p, m, None).unwrap();
            let f = parse_poly(&ctx, src).unwrap();
            let spec = WalshSpectrum::new(&f).unwrap();
            let total = spec.values().iter().fold(CycloInt::zero(p), |a, w| a.add(w));
            let zeros = ctx.elements().filter(|x| f.eval(x).is_zero()).count() as i128;
            assert_eq!(total.as_integer(), Some(ctx.order() as i128 * zeros));
        }
    }

    #[test]
    fn linear_gadget_is_field_size() {
        let f9 = make_field(3, 2, None).unwrap();
        let g = PhiGadget::new(vec![int(0), int(1)], PhiMode::Nondivisor, 2, 3, 2).unwrap();
        let f = parse_poly(&f9, "x^7 + [0,1]*x^2").unwrap();
        assert_eq!(char_sum(&f, &g).unwrap(), int(9));
    }

    #[test]
    fn char_sum_examples() {
        let f9 = make_field(3, 2, None).unwrap();
        let phi1 = PhiGadget::phi1(3, 2).unwrap();
        let sq = parse_poly(&f9, "x^2").unwrap();
        assert_eq!(char_sum(&sq, &phi1).unwrap(), phi_oracle(&sq, &phi1));
        assert_eq!(char_sum(&sq, &phi1).unwrap(), int(1));

        let phi2 = PhiGadget::phi2(3, 2, 1).unwrap();
        let art = parse_poly(&f9, "x^3 - x").unwrap();
        assert_eq!(char_sum(&art, &phi2).unwrap(), int(0));
        assert!(!spectral_verdict(&PolyMap::x(&f9), &phi2).unwrap());

        let f7 = make_field(7, 1, None).unwrap();
        assert!(spectral_verdict(&parse_poly(&f7, "x^2").unwrap(), &PhiGadget::phi1(7, 1).unwrap()).unwrap());

        let f27 = make_field(3, 3, None).unwrap();
        let art = parse_poly(&f27, "x^3 - x").unwrap();
        assert!(spectral_verdict(&art, &PhiGadget::phi2(3, 3, 1).unwrap()).unwrap());
    }

    #[test]
    fn oracle_agreement_small_corpus() {
        let f25 = make_field(5, 2, None).unwrap();
        let phi1 = PhiGadget::phi1(5, 2).unwrap();
        let phi2 = PhiGadget::phi2(5, 2, 1).unwrap();
        for src in ["x^2", "x^4 + x", "x^5 - x", "[1,1]*x^3 + x^2 + 2", "x^12"] {
            let f = parse_poly(&f25, src).unwrap();
            assert_eq!(char_sum(&f, &phi1).unwrap(), phi_oracle(&f, &phi1), "{src}");
            assert_eq!(char_sum(&f, &phi2).unwrap(), phi_oracle(&f, &phi2), "{src}");
        }
    }

    #[test]
    fn gates() {
        let big = make_field(2, 13, None).unwrap();
        assert!(matches!(WalshSpectrum::new(&PolyMap::x(&big)), Err(Error::DomainTooLarge { .. })));
        let f9 = make_field(3, 2, None).unwrap();
        let quartic = PhiGadget::new(vec![int(0), int(0), int(0), int(0), int(1)], PhiMode::Divisor, 3, 3, 2).unwrap();
        assert!(matches!(char_sum(&PolyMap::x(&f9), &quartic), Err(Error::DegreeTooHigh { .. })));
    }
}
