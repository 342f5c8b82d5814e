//! Maps g(x^{q^k} - x + delta) + c x, reduced to
//! h(x) = g(x)^{q^k} - g(x) + c x + (1 - c) delta on S_delta, and the explicit
//! characteristic 3 and characteristic 2 instances built on them.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{image_of, Checks, FamilyInstance, Mode, TabulatedMap};
use crate::agw::DiagramSpec;
use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::num::{divisors, gcd};
use crate::poly::PolyMap;

/// A zcriterion instance together with the parameters that produced it.
#[derive(Debug, Clone)]
pub struct ZInstance {
    /// q = p^d.
    pub d: usize,
    pub k: usize,
    pub delta: FFElement,
    pub c: FFElement,
    pub g: PolyMap,
    pub instance: FamilyInstance,
}

fn symbolic_f(ctx: &Arc<FieldCtx>, qk: u64, delta: &FFElement, c: &FFElement, g: &PolyMap) -> Option<PolyMap> {
    let lam = PolyMap::new(ctx, [(qk, ctx.one()), (1, ctx.scalar(-1)), (0, delta.clone())]).ok()?;
    let mut acc = PolyMap::monomial(ctx, 1, c.clone());
    for (e, coeff) in g.terms() {
        acc = acc.add(&lam.pow(*e).ok()?.scale(coeff));
        if acc.terms().len() > 4096 {
            return None;
        }
    }
    Some(acc)
}

/// f(x) = g(x^{q^k} - x + delta) + c x over GF(q^m), q = p^d, with the reduced
/// map h on S_delta and lambda = lambdabar = x^{q^k} - x + delta.
#[allow(clippy::too_many_arguments)]
pub fn zcriterion(
    ctx: &Arc<FieldCtx>,
    d: usize,
    k: usize,
    delta: &FFElement,
    c: &FFElement,
    g: &PolyMap,
    n: u64,
    mode: Mode,
) -> Result<FamilyInstance> {
    if g.ctx().id() != ctx.id() || !ctx.same_field(delta) || !ctx.same_field(c) {
        return Err(Error::FieldMismatch);
    }
    let big_d = ctx.degree();
    if d == 0 || big_d % d != 0 {
        return Err(Error::NotASubfield(d));
    }
    let m = big_d / d;
    let order = ctx.order();
    let mut ck = Checks::new(mode);
    ck.require(k >= 1 && k < m, "k-range", || format!("k={k}, m={m}"))?;
    let ell = gcd(k, m);
    ck.require(!c.is_zero() && ctx.frobenius(c, d * ell) == *c, "c-in-subfield-units", || {
        format!("c={c} not in GF(p^{})^*", d * ell)
    })?;
    ck.require(n >= 1 && order % n == 0, "n-divides-field-order", || format!("n={n}, q^m={order}"))?;

    let steps = d * k;
    let lam_t: Vec<u64> = (0..order)
        .map(|x| {
            let xe = ctx.element(x);
            ctx.index(&ctx.add(&ctx.sub(&ctx.frobenius(&xe, steps), &xe), delta))
        })
        .collect();
    let all: Vec<u64> = (0..order).collect();
    let s_delta = image_of(&all, |x| lam_t[x as usize]);
    let g_at = |s: u64| g.eval(&ctx.element(s));
    let one_minus_c_delta = ctx.mul(&ctx.sub(&ctx.one(), c), delta);
    let h_at = |s: u64| {
        let gs = g_at(s);
        let v = ctx.add(&ctx.sub(&ctx.frobenius(&gs, steps), &gs), &ctx.mul(c, &ctx.element(s)));
        ctx.index(&ctx.add(&v, &one_minus_c_delta))
    };
    let g_on_s: std::collections::HashMap<u64, FFElement> = s_delta.iter().map(|&s| (s, g_at(s))).collect();
    let f_values: Vec<u64> = all
        .iter()
        .map(|&x| ctx.index(&ctx.add(&g_on_s[&lam_t[x as usize]], &ctx.mul(c, &ctx.element(x)))))
        .collect();
    let h_values: Vec<u64> = s_delta.iter().map(|&s| h_at(s)).collect();
    let h_lookup = |s: u64| h_values[s_delta.binary_search(&s).expect("carrier element")];
    let diagram = DiagramSpec::from_fns(
        all.clone(),
        s_delta.clone(),
        s_delta.clone(),
        |x| f_values[x as usize],
        h_lookup,
        |x| lam_t[x as usize],
        |x| lam_t[x as usize],
        n,
    )
    .ok();
    let qk = ctx.p().pow(steps as u32);
    Ok(FamilyInstance {
        family: "zcriterion",
        ctx: Arc::clone(ctx),
        f: symbolic_f(ctx, qk, delta, c, g),
        f_map: TabulatedMap { ctx: Arc::clone(ctx), domain: all, values: f_values },
        reduced: TabulatedMap { ctx: Arc::clone(ctx), domain: s_delta, values: h_values },
        diagram,
        predicate: None,
        n,
        warnings: ck.into_warnings(),
    })
}

/// A random instance over `ctx`: q = p^d for a random proper divisor d of the
/// degree, random k, delta, c in GF(q^gcd(k,m))^*, and a sparse random g. Half
/// the draws take n from the classification of h when that n divides q^m.
pub fn random_zcriterion<R: Rng>(rng: &mut R, ctx: &Arc<FieldCtx>) -> Result<ZInstance> {
    let big_d = ctx.degree();
    let ds: Vec<usize> = divisors(big_d as u64).into_iter().map(|x| x as usize).filter(|&x| x < big_d).collect();
    let &d = ds.choose(rng).ok_or_else(|| Error::InvalidParameter("field has no proper subfield".into()))?;
    let m = big_d / d;
    let k = rng.gen_range(1..m);
    let order = ctx.order();
    let delta = ctx.element(rng.gen_range(0..order));
    let sub_order = ctx.p().pow((d * gcd(k, m)) as u32);
    let c = ctx.beta_pow(rng.gen_range(0..sub_order - 1) * ((order - 1) / (sub_order - 1)));
    let nterms = rng.gen_range(1..=4);
    let g = PolyMap::new(
        ctx,
        (0..nterms).map(|_| (rng.gen_range(0..order), ctx.element(rng.gen_range(1..order)))).collect::<Vec<_>>(),
    )?;
    let probe = zcriterion(ctx, d, k, &delta, &c, &g, 1, Mode::Strict)?;
    let carrier = probe.reduced.domain.len() as u64;
    let powers: Vec<u64> = (0..=big_d as u32).map(|j| ctx.p().pow(j)).filter(|v| carrier % v == 0).collect();
    let mut n = *powers.choose(rng).expect("nonempty");
    if rng.gen_bool(0.5) {
        let hn = probe.reduced.classify()?.n;
        if hn > 0 && order % hn == 0 {
            n = hn;
        }
    }
    let instance = zcriterion(ctx, d, k, &delta, &c, &g, n, Mode::Strict)?;
    Ok(ZInstance { d, k, delta, c, g, instance })
}

/// Pairs (T, delta) with T running over GF(p^k) in codec order and
/// tr_{p^D/p^k}(delta) = T; delta = T w for a fixed w of trace 1.
pub fn trace_class_representatives(ctx: &Arc<FieldCtx>, k: usize) -> Result<Vec<(FFElement, FFElement)>> {
    if k == 0 || ctx.degree() % k != 0 {
        return Err(Error::NotASubfield(k));
    }
    let one = ctx.one();
    let w = ctx
        .elements()
        .find(|x| rel_trace(ctx, x, k) == one)
        .expect("the relative trace is onto");
    Ok(ctx
        .elements()
        .filter(|t| ctx.frobenius(t, k) == *t)
        .map(|t| {
            let delta = ctx.mul(&t, &w);
            (t, delta)
        })
        .collect())
}

fn rel_trace(ctx: &FieldCtx, x: &FFElement, k: usize) -> FFElement {
    let mut acc = ctx.zero();
    let mut cur = x.clone();
    for _ in 0..ctx.degree() / k {
        acc = ctx.add(&acc, &cur);
        cur = ctx.frobenius(&cur, k);
    }
    acc
}

/// Nonzero y of GF(q) outside the subgroup of e-th powers, tested in the big field.
fn non_power(ctx: &FieldCtx, y: &FFElement, q: u64, e: u64) -> bool {
    !y.is_zero() && ctx.pow(y, (q - 1) / e) != ctx.one()
}

fn half_degree(ctx: &FieldCtx) -> Result<usize> {
    let d = ctx.degree();
    if d % 2 != 0 {
        return Err(Error::InvalidParameter(format!("GF(p^{d}) is not a quadratic extension")));
    }
    Ok(d / 2)
}

fn check_q1(p: u64, q1: u64, half: usize) -> Result<u32> {
    let mut j = 0u32;
    let mut v = 1u64;
    while v < q1 {
        v = v.saturating_mul(p);
        j += 1;
    }
    if v != q1 || j == 0 || half % j as usize != 0 {
        return Err(Error::InvalidParameter(format!("q1={q1} is not a power of {p} with q a power of q1")));
    }
    Ok(j)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GouzaoVariant {
    /// e = 6 q1; T a non-square.
    V1,
    /// e = 3 q1 + 1; T nonzero and (T^{3 q1} - 1)/T a non-square.
    V2,
    /// e = 2 q + 1; T^2 - 1 a non-square.
    V3,
}

impl GouzaoVariant {
    pub fn exponent(self, q1: u64, q: u64) -> u64 {
        match self {
            GouzaoVariant::V1 => 6 * q1,
            GouzaoVariant::V2 => 3 * q1 + 1,
            GouzaoVariant::V3 => 2 * q + 1,
        }
    }

    fn id(self) -> &'static str {
        match self {
            GouzaoVariant::V1 => "gouzao1",
            GouzaoVariant::V2 => "gouzao2",
            GouzaoVariant::V3 => "gouzao3",
        }
    }
}

/// gcd((3 q1 q - 1)/2, q - 1) = 1.
pub fn gouzao_gate(q1: u64, q: u64) -> bool {
    gcd((3 * q1 * q - 1) / 2, q - 1) == 1
}

/// f = (x^q - x + delta)^e + x over GF(q^2) with n = 3.
pub fn construct_gouzao(
    ctx: &Arc<FieldCtx>,
    variant: GouzaoVariant,
    q1: u64,
    delta: &FFElement,
    mode: Mode,
) -> Result<FamilyInstance> {
    if ctx.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: "3".into(), got: ctx.p() });
    }
    let half = half_degree(ctx)?;
    let q = 3u64.pow(half as u32);
    check_q1(3, q1, half)?;
    let mut ck = Checks::new(mode);
    if variant != GouzaoVariant::V3 {
        ck.require(gouzao_gate(q1, q), "gcd-gate", || {
            format!("gcd({}, {}) = {}", (3 * q1 * q - 1) / 2, q - 1, gcd((3 * q1 * q - 1) / 2, q - 1))
        })?;
    }
    let g = PolyMap::monomial(ctx, variant.exponent(q1, q), ctx.one());
    let mut inst = zcriterion(ctx, half, 1, delta, &ctx.one(), &g, 3, mode)?;
    let t = rel_trace(ctx, delta, half);
    let one = ctx.one();
    let pred = match variant {
        GouzaoVariant::V1 => non_power(ctx, &t, q, 2),
        GouzaoVariant::V2 => match ctx.div(&ctx.sub(&ctx.pow(&t, 3 * q1), &one), &t) {
            Ok(v) => non_power(ctx, &v, q, 2),
            Err(_) => false,
        },
        GouzaoVariant::V3 => non_power(ctx, &ctx.sub(&ctx.square(&t), &one), q, 2),
    };
    inst.family = variant.id();
    inst.predicate = Some(pred);
    inst.warnings.splice(0..0, ck.into_warnings());
    Ok(inst)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryVariant {
    /// (x^q + x + delta)^{q1 + 1} + x, n = q1.
    A,
    /// (x^q + x + delta)^{3q} + x, n = 2.
    B,
}

/// The characteristic 2 instances over GF(q^2). `q1` is used by variant A only.
pub fn construct_binary(
    ctx: &Arc<FieldCtx>,
    variant: BinaryVariant,
    q1: u64,
    delta: &FFElement,
    mode: Mode,
) -> Result<FamilyInstance> {
    if ctx.p() != 2 {
        return Err(Error::WrongCharacteristic { expected: "2".into(), got: ctx.p() });
    }
    let half = half_degree(ctx)?;
    let q = 2u64.pow(half as u32);
    let (e, n) = match variant {
        BinaryVariant::A => {
            check_q1(2, q1, half)?;
            (q1 + 1, q1)
        }
        BinaryVariant::B => (3 * q, 2),
    };
    let g = PolyMap::monomial(ctx, e, ctx.one());
    let mut inst = zcriterion(ctx, half, 1, delta, &ctx.one(), &g, n, mode)?;
    let t = rel_trace(ctx, delta, half);
    let one = ctx.one();
    let pred = match variant {
        BinaryVariant::A => match ctx.inv(&t) {
            Ok(ti) => {
                let v = ctx.add(&one, &ti);
                !v.is_zero() && !non_power(ctx, &v, q, q1 - 1)
            }
            Err(_) => false,
        },
        BinaryVariant::B => !t.is_zero() && t != one,
    };
    inst.family = match variant {
        BinaryVariant::A => "2gouzao1",
        BinaryVariant::B => "2gouzao2",
    };
    inst.predicate = Some(pred);
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_g_is_a_permutation() {
        let f9 = make_field(3, 2, None).unwrap();
        let g = PolyMap::constant(&f9, f9.beta_pow(3));
        let inst = zcriterion(&f9, 1, 1, &f9.beta_pow(2), &f9.one(), &g, 1, Mode::Strict).unwrap();
        assert_eq!(inst.classify_f().unwrap().n, 1);
        assert_eq!(inst.reduced.classify().unwrap().n, 1);
    }

    #[test]
    fn gf9_square_example() {
        let f9 = make_field(3, 2, None).unwrap();
        let g = PolyMap::monomial(&f9, 2, f9.one());
        for (t, delta) in trace_class_representatives(&f9, 1).unwrap() {
            if t.is_zero() {
                continue;
            }
            let inst = zcriterion(&f9, 1, 1, &delta, &f9.one(), &g, 3, Mode::Strict).unwrap();
            assert_eq!(inst.reduced.domain.len(), 3);
            let v = inst.transfer().unwrap();
            assert!(v.forward_holds && v.backward_holds);
            assert_eq!(inst.f_is_n().unwrap(), inst.reduced_is_n().unwrap());
        }
    }

    #[test]
    fn c_outside_subfield_is_rejected() {
        let f16 = make_field(2, 4, None).unwrap();
        // q = 4, m = 2, k = 1: c must lie in GF(4)
        let g = PolyMap::x(&f16);
        let err = zcriterion(&f16, 2, 1, &f16.zero(), f16.beta(), &g, 1, Mode::Strict).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { hypothesis: "c-in-subfield-units", .. }));
    }

    #[test]
    fn random_instances_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (p, m) in [(2, 2), (2, 3), (3, 2), (2, 4)] {
            let ctx = make_field(p, m, None).unwrap();
            for _ in 0..25 {
                let z = random_zcriterion(&mut rng, &ctx).unwrap();
                let v = z.instance.transfer().unwrap();
                assert!(v.forward_holds);
                assert!(v.backward_holds);
            }
        }
    }

    #[test]
    fn trace_representatives_cover_subfield() {
        let f81 = make_field(3, 4, None).unwrap();
        let reps = trace_class_representatives(&f81, 2).unwrap();
        assert_eq!(reps.len(), 9);
        for (t, d) in &reps {
            assert_eq!(rel_trace(&f81, d, 2), *t);
        }
    }

    #[test]
    fn gouzao3_q3_delta_zero() {
        let f9 = make_field(3, 2, None).unwrap();
        let inst = construct_gouzao(&f9, GouzaoVariant::V3, 3, &f9.zero(), Mode::Strict).unwrap();
        assert_eq!(inst.predicate, Some(true));
        assert!(inst.f_is_n().unwrap());
    }

    #[test]
    fn symbolic_f_matches_table() {
        let f9 = make_field(3, 2, None).unwrap();
        let inst = construct_gouzao(&f9, GouzaoVariant::V3, 3, f9.beta(), Mode::Strict).unwrap();
        let f = inst.f.as_ref().unwrap();
        assert_eq!(f.eval_table().unwrap(), inst.f_map.values);
    }

    #[test]
    fn binary_b_delta_zero_fails() {
        let f16 = make_field(2, 4, None).unwrap();
        let inst = construct_binary(&f16, BinaryVariant::B, 0, &f16.zero(), Mode::Strict).unwrap();
        assert_eq!(inst.predicate, Some(false));
        assert!(!inst.f_is_n().unwrap());
    }

    #[test]
    fn gouzao_gate_holds_when_q_equals_q1() {
        for q in [3, 9, 27, 81] {
            assert!(gouzao_gate(q, q));
        }
    }
}
