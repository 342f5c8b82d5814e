//! Multiplicative families x^r h(x^s) over GF(q)^*: the reduction to mu_ell,
//! the piecewise (Vandermonde) construction, the class-triple theorems and the
//! lift to GF(q^m).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Checks, FamilyInstance, Mode, TabulatedMap};
use crate::agw::DiagramSpec;
use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx, SubfieldEmbed};
use crate::linalg::solve;
use crate::num::{divisors, gcd};
use crate::poly::PolyMap;

fn mu_indices(ctx: &FieldCtx, ell: u64) -> Result<Vec<u64>> {
    let mut v: Vec<u64> = ctx.roots_of_unity(ell)?.iter().map(|y| ctx.index(y)).collect();
    v.sort_unstable();
    Ok(v)
}

/// f = x^r h(x^s) on GF(q)^*, reduced to g = x^r h(x)^s on mu_{(q-1)/s} with
/// lambda = lambdabar = x^s.
pub fn build_xr_hxs(ctx: &Arc<FieldCtx>, r: u64, s: u64, h: &PolyMap, n: u64, mode: Mode) -> Result<FamilyInstance> {
    if h.ctx().id() != ctx.id() {
        return Err(Error::FieldMismatch);
    }
    let q = ctx.order();
    if s == 0 || (q - 1) % s != 0 {
        return Err(Error::hypothesis("s-divides-q-1", format!("s={s}, q-1={}", q - 1)));
    }
    let ell = (q - 1) / s;
    let mut ck = Checks::new(mode);
    ck.require(gcd(r, s) == 1, "gcd-r-s", || format!("gcd({r}, {s}) = {}", gcd(r, s)))?;
    ck.require(n >= 1 && ell % n == 0, "n-divides-ell", || format!("n={n}, ell={ell}"))?;
    let mu = mu_indices(ctx, ell)?;
    let zero_at = mu.iter().find(|&&y| h.eval(&ctx.element(y)).is_zero());
    ck.require(zero_at.is_none(), "h-nonvanishing", || format!("h({}) = 0", ctx.element(*zero_at.unwrap())))?;

    let f = PolyMap::new(ctx, h.terms().iter().map(|(j, c)| (r + s * j, c.clone())))?;
    let dom: Vec<u64> = (1..q).collect();
    let f_values: Vec<u64> = dom.iter().map(|&x| ctx.index(&f.eval(&ctx.element(x)))).collect();
    let g_at = |y: u64| {
        let ye = ctx.element(y);
        ctx.index(&ctx.mul(&ctx.pow(&ye, r), &ctx.pow(&h.eval(&ye), s)))
    };
    let g_values: Vec<u64> = mu.iter().map(|&y| g_at(y)).collect();
    let lam = |x: u64| ctx.index(&ctx.pow(&ctx.element(x), s));
    let diagram = DiagramSpec::from_fns(
        dom.clone(),
        mu.clone(),
        mu.clone(),
        |x| f_values[(x - 1) as usize],
        g_at,
        lam,
        lam,
        n,
    )
    .ok();
    Ok(FamilyInstance {
        family: "xr-hxs",
        ctx: Arc::clone(ctx),
        f: Some(f),
        f_map: TabulatedMap { ctx: Arc::clone(ctx), domain: dom, values: f_values },
        reduced: TabulatedMap { ctx: Arc::clone(ctx), domain: mu, values: g_values },
        diagram,
        predicate: None,
        n,
        warnings: ck.into_warnings(),
    })
}

/// Parameters of the piecewise construction. beta is the field's primitive
/// element; omega = beta^s generates mu_ell.
#[derive(Debug, Clone)]
pub struct PiecewiseSpec {
    ctx: Arc<FieldCtx>,
    ell: u64,
    n: u64,
    r: u64,
    a_assign: Vec<u64>,
    m_assign: Vec<u64>,
}

impl PiecewiseSpec {
    pub fn new(ctx: &Arc<FieldCtx>, ell: u64, n: u64, r: u64, a_assign: Vec<u64>, m_assign: Vec<u64>) -> Result<Self> {
        let q = ctx.order();
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if ell == 0 || (q - 1) % ell != 0 {
            return bad(format!("ell={ell} does not divide q-1={}", q - 1));
        }
        let s = (q - 1) / ell;
        if n == 0 || ell % n != 0 {
            return bad(format!("n={n} does not divide ell={ell}"));
        }
        if gcd(r, s) != 1 {
            return bad(format!("gcd(r, s) = gcd({r}, {s}) != 1"));
        }
        if a_assign.len() as u64 != ell || m_assign.len() as u64 != ell {
            return bad("a_assign and m_assign need ell entries".into());
        }
        if let Some(m) = m_assign.iter().find(|&&m| m >= s) {
            return bad(format!("m_i = {m} exceeds s-1 = {}", s - 1));
        }
        let mut counts = std::collections::BTreeMap::new();
        for &a in &a_assign {
            if a >= ell {
                return bad(format!("a_i = {a} exceeds ell-1"));
            }
            *counts.entry(a).or_insert(0u64) += 1;
        }
        if counts.values().any(|&c| c != n) {
            return bad("each residue in a_assign must occur exactly n times".into());
        }
        Ok(PiecewiseSpec { ctx: Arc::clone(ctx), ell, n, r, a_assign, m_assign })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn ell(&self) -> u64 {
        self.ell
    }

    pub fn s(&self) -> u64 {
        (self.ctx.order() - 1) / self.ell
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn a_assign(&self) -> &[u64] {
        &self.a_assign
    }

    pub fn m_assign(&self) -> &[u64] {
        &self.m_assign
    }

    /// beta^{ell m_i + a_i - i r}, the prescribed value of h(omega^i).
    pub fn target(&self, i: usize) -> FFElement {
        let qm1 = (self.ctx.order() - 1) as i128;
        let e = self.ell as i128 * self.m_assign[i] as i128 + self.a_assign[i] as i128 - i as i128 * self.r as i128;
        self.ctx.beta_pow(e.rem_euclid(qm1) as u64)
    }

    /// The solved instance; its predicate is the construction's claim (true).
    pub fn instance(&self, mode: Mode) -> Result<FamilyInstance> {
        let (h, _) = solve_piecewise(self)?;
        let mut inst = build_xr_hxs(&self.ctx, self.r, self.s(), &h, self.n, mode)?;
        inst.family = "piecewise";
        inst.predicate = Some(true);
        Ok(inst)
    }
}

/// Solves A H = B with A the Vandermonde matrix of 1, omega, ..., omega^{ell-1}.
/// Returns h (degree < ell) and f = x^r h(x^s).
pub fn solve_piecewise(spec: &PiecewiseSpec) -> Result<(PolyMap, PolyMap)> {
    let ctx = &spec.ctx;
    let ell = spec.ell as usize;
    let s = spec.s();
    let omega = ctx.beta_pow(s);
    let a: Vec<Vec<FFElement>> = (0..ell)
        .map(|i| (0..ell).map(|j| ctx.pow(&omega, (i * j) as u64)).collect())
        .collect();
    let b: Vec<FFElement> = (0..ell).map(|i| spec.target(i)).collect();
    let hv = solve(ctx, &a, &b).map_err(|e| {
        assert_ne!(e, Error::SingularMatrix, "Vandermonde matrix of distinct nodes is invertible");
        e
    })?;
    let h = PolyMap::from_dense(ctx, hv.clone())?;
    let f = PolyMap::new(ctx, hv.into_iter().enumerate().map(|(j, c)| (spec.r + s * j as u64, c)))?;
    Ok((h, f))
}

/// A random spec with the given n over `ctx`; ell ranges over the multiples of
/// n dividing q-1.
pub fn random_piecewise<R: Rng>(rng: &mut R, ctx: &Arc<FieldCtx>, n: u64) -> Result<PiecewiseSpec> {
    let q = ctx.order();
    let ells: Vec<u64> = divisors(q - 1).into_iter().filter(|l| n >= 1 && l % n == 0).collect();
    let &ell = ells
        .choose(rng)
        .ok_or_else(|| Error::InvalidParameter(format!("n={n} does not divide q-1={}", q - 1)))?;
    let s = (q - 1) / ell;
    let r = loop {
        let r = rng.gen_range(1..q);
        if gcd(r, s) == 1 {
            break r;
        }
    };
    let mut residues: Vec<u64> = (0..ell).collect();
    residues.shuffle(rng);
    let mut a_assign: Vec<u64> = residues[..(ell / n) as usize]
        .iter()
        .flat_map(|&c| std::iter::repeat(c).take(n as usize))
        .collect();
    a_assign.shuffle(rng);
    let m_assign: Vec<u64> = (0..ell).map(|_| rng.gen_range(0..s)).collect();
    PiecewiseSpec::new(ctx, ell, n, r, a_assign, m_assign)
}

/// Some j with class(values[i]) = j - i r (mod n) for every i.
fn class_pattern_holds(ctx: &FieldCtx, values: &[FFElement], n: u64, r: u64) -> Result<bool> {
    if values.iter().any(FFElement::is_zero) {
        return Ok(false);
    }
    let classes: Vec<u64> = values.iter().map(|v| ctx.power_class(v, n)).collect::<Result<_>>()?;
    let ir = |i: usize| (i as u64 % n) * (r % n) % n;
    let j = (classes[0] + ir(0)) % n;
    Ok(classes.iter().enumerate().all(|(i, &c)| c == (j + n - ir(i)) % n))
}

/// Degree < n interpolant with h(omega^i) = values[i], omega = beta^{(q-1)/n}.
fn interpolate_on_mu(ctx: &Arc<FieldCtx>, values: &[FFElement]) -> Result<PolyMap> {
    let n = values.len() as u64;
    let nodes = ctx.roots_of_unity(n)?;
    let a: Vec<Vec<FFElement>> = nodes.iter().map(|w| (0..n).map(|j| ctx.pow(w, j)).collect()).collect();
    PolyMap::from_dense(ctx, solve(ctx, &a, values)?)
}

fn class_family(
    ctx: &Arc<FieldCtx>,
    family: &'static str,
    r: u64,
    values: &[FFElement],
    mode: Mode,
) -> Result<FamilyInstance> {
    let n = values.len() as u64;
    let q = ctx.order();
    if (q - 1) % n != 0 {
        return Err(Error::hypothesis("n-divides-q-1", format!("n={n}, q={q}")));
    }
    let mut ck = Checks::new(mode);
    let z = values.iter().position(FFElement::is_zero);
    ck.require(z.is_none(), "nonzero-values", || format!("value {} is zero", z.unwrap()))?;
    let h = interpolate_on_mu(ctx, values)?;
    let mut inst = build_xr_hxs(ctx, r, (q - 1) / n, &h, n, mode)?;
    inst.family = family;
    inst.predicate = Some(class_pattern_holds(ctx, values, n, r)?);
    let mut w = ck.into_warnings();
    w.append(&mut inst.warnings);
    inst.warnings = w;
    Ok(inst)
}

/// f = (a-b)/2 x^{(q-1)/2+r} + (a+b)/2 x^r, q = 3 mod 4.
pub fn construct_miu2(ctx: &Arc<FieldCtx>, r: u64, a: &FFElement, b: &FFElement, mode: Mode) -> Result<FamilyInstance> {
    let mut ck = Checks::new(mode);
    let q = ctx.order();
    ck.require(q % 4 == 3, "q-3-mod-4", || format!("q={q}"))?;
    let mut inst = class_family(ctx, "miu2", r, &[a.clone(), b.clone()], mode)?;
    inst.warnings.splice(0..0, ck.into_warnings());
    Ok(inst)
}

/// n = 3 with h(1) = a, h(omega) = b, h(omega^2) = c.
pub fn construct_miu3(
    ctx: &Arc<FieldCtx>,
    r: u64,
    a: &FFElement,
    b: &FFElement,
    c: &FFElement,
    mode: Mode,
) -> Result<FamilyInstance> {
    class_family(ctx, "miu3", r, &[a.clone(), b.clone(), c.clone()], mode)
}

/// n = 4 with h(omega^i) = a, b, c, d.
pub fn construct_nmiu3(ctx: &Arc<FieldCtx>, r: u64, vals: [&FFElement; 4], mode: Mode) -> Result<FamilyInstance> {
    let values: Vec<FFElement> = vals.iter().map(|&v| v.clone()).collect();
    if ctx.p() == 2 {
        return Err(Error::WrongCharacteristic { expected: "odd".into(), got: 2 });
    }
    class_family(ctx, "nmiu3", r, &values, mode)
}

/// The printed closed form of the quadratic for n = 3, transcribed as is.
pub fn miu3_displayed_h(ctx: &Arc<FieldCtx>, a: &FFElement, b: &FFElement, c: &FFElement) -> Result<PolyMap> {
    let w = ctx.roots_of_unity(3)?[1].clone();
    let add = |x: &FFElement, y: &FFElement| ctx.add(x, y);
    let sub = |x: &FFElement, y: &FFElement| ctx.sub(x, y);
    let mul = |x: &FFElement, y: &FFElement| ctx.mul(x, y);
    let one = ctx.one();
    let w2 = ctx.square(&w);
    let w3 = mul(&w2, &w);
    let wm1sq = ctx.square(&sub(&w, &one));
    let wp1 = add(&w, &one);
    let c2 = ctx.div(&add(&sub(&sub(b, c), &mul(a, &w2)), &mul(b, &w2)), &mul(&wm1sq, &w))?;
    let c1 = ctx.div(&sub(&add(c, &mul(a, &w)), &mul(b, &wp1)), &mul(&mul(&wm1sq, &w), &wp1))?;
    let c0 = ctx.div(&sub(&add(c, &mul(a, &w3)), &mul(&mul(b, &w), &wp1)), &mul(&wm1sq, &wp1))?;
    PolyMap::from_dense(ctx, vec![c0, c1, c2])
}

/// The printed closed form of the cubic for n = 4, transcribed as is.
pub fn nmiu3_displayed_h(ctx: &Arc<FieldCtx>, vals: [&FFElement; 4]) -> Result<PolyMap> {
    let [a, b, c, d] = vals;
    let w = ctx.roots_of_unity(4)?[1].clone();
    let add = |x: &FFElement, y: &FFElement| ctx.add(x, y);
    let sub = |x: &FFElement, y: &FFElement| ctx.sub(x, y);
    let mul = |x: &FFElement, y: &FFElement| ctx.mul(x, y);
    let one = ctx.one();
    let two = ctx.scalar(2);
    let w2 = ctx.square(&w);
    let w3 = mul(&w2, &w);
    let s21 = add(&add(&w2, &w), &one); // w^2 + w + 1
    let s31 = add(&add(&w3, &w), &one); // w^3 + w + 1
    let s321 = add(&add(&w3, &w2), &one); // w^3 + w^2 + 1

    let n3 = add(&sub(&add(&ctx.neg(&mul(a, &w3)), &mul(&mul(b, &s21), &w)), &mul(c, &s21)), d);
    let d3 = sub(&mul(&two, &w), &mul(&two, &w3));
    let n2 = sub(&add(&sub(a, &mul(b, &s31)), &mul(c, &s31)), d);
    let d2 = sub(&two, &mul(&two, &w2));
    let n1 = add(&sub(&add(&ctx.neg(&mul(a, &w)), &mul(&mul(b, &s31), &w2)), &mul(c, &s321)), d);
    let d1 = add(&ctx.neg(&mul(&two, &w)), &mul(&two, &w3));
    let n0 = sub(&add(&sub(&mul(a, &w2), &mul(&mul(b, &s21), &w3)), &mul(&mul(c, &s21), &w)), d);
    let d0 = add(&ctx.neg(&two), &mul(&two, &w2));
    PolyMap::from_dense(ctx, vec![ctx.div(&n0, &d0)?, ctx.div(&n1, &d1)?, ctx.div(&n2, &d2)?, ctx.div(&n3, &d3)?])
}

/// f(x) = x^r h(x^{(Q-1)/(q-1)})^{1/p^t} over GF(Q)^*, Q = q^m, for h over
/// GF(q); the reduced map is x^r h~(x)^m on GF(q)^* with h~ = h^{1/p^t}.
/// `root_steps` is t; the p^t-th root is the inverse Frobenius.
pub fn lift_to_extension(
    big: &Arc<FieldCtx>,
    h: &PolyMap,
    r: u64,
    n: u64,
    root_steps: usize,
    mode: Mode,
) -> Result<FamilyInstance> {
    let small = h.ctx();
    let emb = SubfieldEmbed::with_sub(big, small)?;
    let q = small.order();
    let big_q = big.order();
    let m = emb.rel_degree() as u64;
    let s = (big_q - 1) / (q - 1);
    let mut ck = Checks::new(mode);
    ck.require(gcd(q - 1, m) == 1, "gcd-q-1-m", || format!("gcd({}, {m}) = {}", q - 1, gcd(q - 1, m)))?;
    ck.require(n >= 1 && (q - 1) % n == 0, "n-divides-q-1", || format!("n={n}, q={q}"))?;
    ck.require(gcd(r, s) == 1, "gcd-r-s", || format!("gcd({r}, {s}) = {}", gcd(r, s)))?;

    // x^{s j} raised to p^{-t} is x^{s j p^{D-t}} on GF(p^D)
    let d = big.degree();
    let t = root_steps % d;
    let shift = (big.p() as u128).pow((d - t) as u32 % d as u32) % (big_q as u128 - 1);
    let terms = h.terms().iter().map(|(j, c)| {
        let e = ((s as u128 * *j as u128 % (big_q as u128 - 1)) * shift % (big_q as u128 - 1)) as u64;
        let e = if *j > 0 && e == 0 { big_q - 1 } else { e };
        (r + e, big.frobenius_inverse(&emb.embed(c), t))
    });
    let f = PolyMap::new(big, terms.collect::<Vec<_>>())?;
    let htilde = |y: &FFElement| small.frobenius_inverse(&h.eval(y), t);

    let dom: Vec<u64> = (1..big_q).collect();
    let f_values: Vec<u64> = dom.iter().map(|&x| big.index(&f.eval(&big.element(x)))).collect();
    let mut carrier: Vec<(u64, FFElement)> = small.nonzero_elements().map(|y| (big.index(&emb.embed(&y)), y)).collect();
    carrier.sort_by_key(|(i, _)| *i);
    let g_small = |y: &FFElement| small.mul(&small.pow(y, r), &small.pow(&htilde(y), m));
    let g_values: Vec<u64> = carrier.iter().map(|(_, y)| big.index(&emb.embed(&g_small(y)))).collect();
    let sub_dom: Vec<u64> = carrier.iter().map(|(i, _)| *i).collect();
    let g_lookup = |y: u64| {
        let pos = sub_dom.binary_search(&y).expect("carrier element");
        g_values[pos]
    };
    let lam = |x: u64| big.index(&big.pow(&big.element(x), s));
    let diagram = DiagramSpec::from_fns(
        dom.clone(),
        sub_dom.clone(),
        sub_dom.clone(),
        |x| f_values[(x - 1) as usize],
        g_lookup,
        lam,
        lam,
        n,
    )
    .ok();
    Ok(FamilyInstance {
        family: "lift",
        ctx: Arc::clone(big),
        f: Some(f),
        f_map: TabulatedMap { ctx: Arc::clone(big), domain: dom, values: f_values },
        reduced: TabulatedMap { ctx: Arc::clone(big), domain: sub_dom, values: g_values },
        diagram,
        predicate: None,
        n,
        warnings: ck.into_warnings(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use crate::nto1::{classify_fn, classify_poly, monomial_oracle};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn gf7_s3_example() {
        let f7 = make_field(7, 1, None).unwrap();
        let h = PolyMap::new(&f7, [(1, f7.one()), (0, f7.scalar(2))]).unwrap();
        let inst = build_xr_hxs(&f7, 1, 3, &h, 2, Mode::Strict).unwrap();
        // independent: y^1 (y+2)^3 mod 7 on {1, 6}
        let g = |y: u64| y * (y + 2).pow(3) % 7;
        assert_eq!(inst.reduced.domain, vec![1, 6]);
        assert_eq!(inst.reduced.values, vec![g(1), g(6)]);
        let v = inst.transfer().unwrap();
        assert!(v.forward_holds && v.backward_holds);
        assert_eq!(inst.f_is_n().unwrap(), inst.reduced_is_n().unwrap());
    }

    #[test]
    fn constant_h_matches_monomial_oracle() {
        let f13 = make_field(13, 1, None).unwrap();
        for r in 1..12 {
            let inst = build_xr_hxs(&f13, r, 1, &PolyMap::constant(&f13, f13.one()), 1, Mode::Permissive).unwrap();
            let full = classify_poly(inst.f.as_ref().unwrap()).unwrap();
            assert_eq!(full.n, monomial_oracle(&f13, &f13.one(), r).unwrap());
        }
    }

    #[test]
    fn h_vanishing_on_mu_is_rejected() {
        let f7 = make_field(7, 1, None).unwrap();
        let h = PolyMap::new(&f7, [(1, f7.one()), (0, f7.scalar(-1))]).unwrap();
        let err = build_xr_hxs(&f7, 1, 3, &h, 2, Mode::Strict).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { hypothesis: "h-nonvanishing", .. }));
    }

    #[test]
    fn piecewise_gf13_example() {
        let f13 = make_field(13, 1, None).unwrap();
        let spec = PiecewiseSpec::new(&f13, 4, 2, 1, vec![0, 0, 1, 1], vec![0; 4]).unwrap();
        let (h, f) = solve_piecewise(&spec).unwrap();
        let w = f13.beta_pow(3);
        for i in 0..4 {
            assert_eq!(h.eval(&f13.pow(&w, i)), spec.target(i as usize));
        }
        assert_eq!(classify_poly(&f).unwrap().n, 2);
    }

    #[test]
    fn piecewise_ell2_matches_half_sums() {
        let f11 = make_field(11, 1, None).unwrap();
        let spec = PiecewiseSpec::new(&f11, 2, 2, 1, vec![1, 1], vec![3, 4]).unwrap();
        let (h, _) = solve_piecewise(&spec).unwrap();
        let (b0, b1) = (spec.target(0), spec.target(1));
        let half = f11.inv(&f11.scalar(2)).unwrap();
        assert_eq!(h.coeff(0), f11.mul(&half, &f11.add(&b0, &b1)));
        assert_eq!(h.coeff(1), f11.mul(&half, &f11.sub(&b0, &b1)));
    }

    #[test]
    fn random_piecewise_specs_are_n_to_1() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (p, m) in [(7, 1), (13, 1), (5, 2)] {
            let ctx = make_field(p, m, None).unwrap();
            for _ in 0..20 {
                let n = *[1u64, 2, 3, 4, 6].choose(&mut rng).unwrap();
                let Ok(spec) = random_piecewise(&mut rng, &ctx, n) else { continue };
                let inst = spec.instance(Mode::Strict).unwrap();
                assert!(inst.f_is_n().unwrap(), "{spec:?}");
            }
        }
    }

    #[test]
    fn miu2_gf7_examples() {
        let f7 = make_field(7, 1, None).unwrap();
        let inst = construct_miu2(&f7, 1, &f7.scalar(1), &f7.scalar(3), Mode::Strict).unwrap();
        assert_eq!(inst.f.as_ref().unwrap(), &PolyMap::new(&f7, [(4, f7.scalar(6)), (1, f7.scalar(2))]).unwrap());
        assert_eq!(inst.predicate, Some(true));
        assert!(inst.f_is_n().unwrap());
        let inst = construct_miu2(&f7, 1, &f7.scalar(1), &f7.scalar(2), Mode::Strict).unwrap();
        assert_eq!(inst.predicate, Some(false));
        assert!(!inst.f_is_n().unwrap());
    }

    #[test]
    fn miu3_interpolant_hits_values_and_display_swaps_b_and_c() {
        let f13 = make_field(13, 1, None).unwrap();
        let (a, b, c) = (f13.scalar(2), f13.scalar(5), f13.scalar(7));
        let inst = construct_miu3(&f13, 1, &a, &b, &c, Mode::Permissive).unwrap();
        let w = f13.roots_of_unity(3).unwrap();
        let h = interpolate_on_mu(&f13, &[a.clone(), b.clone(), c.clone()]).unwrap();
        assert_eq!([h.eval(&w[0]), h.eval(&w[1]), h.eval(&w[2])], [a.clone(), b.clone(), c.clone()]);
        assert_eq!(inst.f.unwrap().terms().len(), h.terms().len());
        // the printed quadratic takes b at omega^2 and c at omega
        let shown = miu3_displayed_h(&f13, &a, &b, &c).unwrap();
        assert_eq!([shown.eval(&w[0]), shown.eval(&w[1]), shown.eval(&w[2])], [a.clone(), c.clone(), b.clone()]);
        assert_eq!(miu3_displayed_h(&f13, &a, &c, &b).unwrap(), h);
    }

    #[test]
    fn nmiu3_display_matches_interpolation() {
        let f13 = make_field(13, 1, None).unwrap();
        let vals = [f13.scalar(1), f13.scalar(4), f13.scalar(6), f13.scalar(11)];
        let shown = nmiu3_displayed_h(&f13, [&vals[0], &vals[1], &vals[2], &vals[3]]).unwrap();
        assert_eq!(shown, interpolate_on_mu(&f13, &vals).unwrap());
    }

    #[test]
    fn lift_gate_and_monomial() {
        let f7 = make_field(7, 1, None).unwrap();
        let big = make_field(7, 3, None).unwrap();
        let one = PolyMap::constant(&f7, f7.one());
        let err = lift_to_extension(&big, &one, 1, 1, 0, Mode::Strict).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { hypothesis: "gcd-q-1-m", .. }));

        let f3 = make_field(3, 1, None).unwrap();
        let big = make_field(3, 3, None).unwrap();
        let one = PolyMap::constant(&f3, f3.one());
        let inst = lift_to_extension(&big, &one, 2, 2, 0, Mode::Permissive).unwrap();
        assert_eq!(inst.classify_f().unwrap().n, gcd(2, 26));
    }

    #[test]
    fn lift_of_miu2_over_gf27() {
        let f3 = make_field(3, 1, None).unwrap();
        let big = make_field(3, 3, None).unwrap();
        // miu2 over GF(3): a = 1 square, b = 2 non-square, r = 1
        let base = construct_miu2(&f3, 1, &f3.scalar(1), &f3.scalar(2), Mode::Strict).unwrap();
        assert!(base.f_is_n().unwrap());
        let h = interpolate_on_mu(&f3, &[f3.scalar(1), f3.scalar(2)]).unwrap();
        for t in [0, 1] {
            let inst = lift_to_extension(&big, &h, 1, 2, t, Mode::Strict).unwrap();
            let lifted = inst.classify_f().unwrap();
            let small = classify_fn(2, |i| {
                let y = f3.element(i + 1);
                let ht = f3.frobenius_inverse(&h.eval(&y), t);
                f3.index(&f3.mul(&y, &f3.pow(&ht, 3)))
            })
            .unwrap();
            assert_eq!(lifted.n, small.n);
            assert_eq!(lifted.n, 2);
            assert!(inst.transfer().unwrap().equivalent());
        }
    }
}
