//! Families built on additive maps: h(psi(x)) phi(x) + g(psi(x)) and
//! L1(x) + L2(x) g(L3(x)).

use std::sync::Arc;

use super::{image_of, Checks, FamilyInstance, Mode, TabulatedMap};
use crate::agw::DiagramSpec;
use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::num::gcd;
use crate::poly::{LinearizedPoly, PolyMap};

fn subfield_order(ctx: &FieldCtx, k: usize) -> Result<u64> {
    if k == 0 || ctx.degree() % k != 0 {
        return Err(Error::NotASubfield(k));
    }
    Ok(ctx.p().pow(k as u32))
}

fn in_subfield(ctx: &FieldCtx, y: &FFElement, k: usize) -> bool {
    ctx.frobenius(y, k) == *y
}

/// A generator of GF(p^k)^* inside ctx.
fn subfield_generator(ctx: &FieldCtx, k: usize) -> FFElement {
    let q = ctx.p().pow(k as u32);
    ctx.beta_pow((ctx.order() - 1) / (q - 1))
}

/// Additive and commuting with multiplication by GF(q).
fn is_q_linear(ctx: &FieldCtx, table: &[u64], f: &PolyMap, k: usize) -> bool {
    if !f.is_additive() {
        return false;
    }
    let gamma = subfield_generator(ctx, k);
    (0..ctx.order()).all(|x| {
        let gx = ctx.mul(&gamma, &ctx.element(x));
        table[ctx.index(&gx) as usize] == ctx.index(&ctx.mul(&gamma, &ctx.element(table[x as usize])))
    })
}

fn kernel(table: &[u64]) -> Vec<u64> {
    (0..table.len() as u64).filter(|&x| table[x as usize] == 0).collect()
}

/// Inputs to [`build_psi_family`]; q = p^k.
#[derive(Debug, Clone)]
pub struct PsiParams<'a> {
    pub psi: &'a PolyMap,
    pub phi: &'a PolyMap,
    pub psibar: &'a PolyMap,
    pub h: &'a PolyMap,
    pub g: &'a PolyMap,
    pub k: usize,
    pub n: u64,
}

/// f(x) = h(psi(x)) phi(x) + g(psi(x)) over GF(q^m), reduced to
/// h(x) phi(x) + psibar(g(x)) on psi(GF(q^m)).
pub fn build_psi_family(params: &PsiParams<'_>, mode: Mode) -> Result<FamilyInstance> {
    let PsiParams { psi, phi, psibar, h, g, k, n } = *params;
    let ctx = Arc::clone(psi.ctx());
    for other in [phi, psibar, h, g] {
        if other.ctx().id() != ctx.id() {
            return Err(Error::FieldMismatch);
        }
    }
    let q = subfield_order(&ctx, k)?;
    let mut ck = Checks::new(mode);
    ck.require(n >= 1 && q % n == 0, "n-divides-q", || format!("n={n}, q={q}"))?;
    ck.require(psi.is_additive(), "psi-additive", || psi.to_string())?;
    ck.require(phi.is_additive(), "phi-additive", || phi.to_string())?;

    let psi_t = psi.eval_table()?;
    let phi_t = phi.eval_table()?;
    let psibar_t = psibar.eval_table()?;
    ck.require(is_q_linear(&ctx, &psibar_t, psibar, k), "psibar-q-linear", || psibar.to_string())?;

    let all: Vec<u64> = (0..ctx.order()).collect();
    let s_set = image_of(&all, |x| psi_t[x as usize]);
    let sbar_set = image_of(&all, |x| psibar_t[x as usize]);
    let ns = s_set.len() as u64;
    ck.require(ns > 1 && ns % n == 0 && ns == sbar_set.len() as u64, "image-size", || {
        format!("#psi(F)={ns}, #psibar(F)={}, n={n}", sbar_set.len())
    })?;
    let bad_h = s_set.iter().find(|&&s| {
        let v = h.eval(&ctx.element(s));
        v.is_zero() || !in_subfield(&ctx, &v, k)
    });
    ck.require(bad_h.is_none(), "h-into-subfield-units", || format!("s={}", ctx.element(*bad_h.unwrap())))?;
    let ker_psi = kernel(&psi_t);
    let bad_ker = ker_psi.iter().find(|&&x| x != 0 && phi_t[x as usize] == 0);
    ck.require(bad_ker.is_none(), "kernel-intersection", || format!("x={}", ctx.element(*bad_ker.unwrap())))?;
    let ker_bar = kernel(&psibar_t).len();
    ck.require(ker_psi.len() == ker_bar, "kernel-dimension", || {
        format!("#ker psi={}, #ker psibar={ker_bar}", ker_psi.len())
    })?;

    let el = |i: u64| ctx.element(i);
    let f_at = |x: u64| {
        let s = el(psi_t[x as usize]);
        let v = ctx.add(&ctx.mul(&h.eval(&s), &el(phi_t[x as usize])), &g.eval(&s));
        ctx.index(&v)
    };
    let fbar_at = |s: u64| {
        let se = el(s);
        let v = ctx.add(&ctx.mul(&h.eval(&se), &phi.eval(&se)), &psibar.eval(&g.eval(&se)));
        ctx.index(&v)
    };
    let f_values: Vec<u64> = all.iter().map(|&x| f_at(x)).collect();
    let fbar_values: Vec<u64> = s_set.iter().map(|&s| fbar_at(s)).collect();
    let bad_comm = all.iter().find(|&&x| psibar_t[f_values[x as usize] as usize] != fbar_at(psi_t[x as usize]));
    ck.require(bad_comm.is_none(), "commutation", || format!("x={}", el(*bad_comm.unwrap())))?;

    let diagram = DiagramSpec::from_fns(
        all.clone(),
        s_set.clone(),
        sbar_set,
        |x| f_values[x as usize],
        fbar_at,
        |x| psi_t[x as usize],
        |x| psibar_t[x as usize],
        n,
    )
    .ok();
    Ok(FamilyInstance {
        family: "psi",
        ctx: Arc::clone(&ctx),
        f: None,
        f_map: TabulatedMap { ctx: Arc::clone(&ctx), domain: all, values: f_values },
        reduced: TabulatedMap { ctx: Arc::clone(&ctx), domain: s_set, values: fbar_values },
        diagram,
        predicate: None,
        n,
        warnings: ck.into_warnings(),
    })
}

fn trace_poly(ctx: &Arc<FieldCtx>, k: usize) -> Result<PolyMap> {
    Ok(LinearizedPoly::trace(ctx, k)?.to_polymap())
}

/// f = a tr(x)^d + g(tr(x)) with g(GF(q)) inside ker(tr) and g(0) = 0; the
/// claimed condition is gcd(d, q - 1) = n.
pub fn trace_corollary(
    ctx: &Arc<FieldCtx>,
    k: usize,
    a: &FFElement,
    d: u64,
    g: &PolyMap,
    n: u64,
    mode: Mode,
) -> Result<FamilyInstance> {
    let q = subfield_order(ctx, k)?;
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    let tr = trace_poly(ctx, k)?;
    let mut ck = Checks::new(mode);
    let bad = ctx.elements().filter(|y| in_subfield(ctx, y, k)).find(|y| !tr.eval(&g.eval(y)).is_zero());
    ck.require(bad.is_none(), "g-into-trace-kernel", || format!("y={}", bad.clone().unwrap()))?;
    ck.require(g.eval(&ctx.zero()).is_zero(), "g-vanishes-at-0", || g.to_string())?;
    let h = PolyMap::monomial(ctx, d, a.clone());
    let params = PsiParams { psi: &tr, phi: &PolyMap::x(ctx), psibar: &tr, h: &h, g, k, n };
    let mut inst = build_psi_family(&params, mode)?;
    inst.family = "trace-corollary";
    inst.predicate = Some(gcd(d, q - 1) == n);
    inst.warnings.splice(0..0, ck.into_warnings());
    Ok(inst)
}

/// q = 3^k, m odd: f = tr(x) x^2 - tr(x) x + x^2 - x + g(tr(x)), claimed 3-to-1.
pub fn char3_trace_corollary(ctx: &Arc<FieldCtx>, k: usize, g: &PolyMap, mode: Mode) -> Result<FamilyInstance> {
    if ctx.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: "3".into(), got: ctx.p() });
    }
    subfield_order(ctx, k)?;
    let mut ck = Checks::new(mode);
    let m = ctx.degree() / k;
    ck.require(m % 2 == 1, "m-odd", || format!("m={m}"))?;
    let tr = trace_poly(ctx, k)?;
    let bad = ctx.elements().filter(|y| in_subfield(ctx, y, k)).find(|y| !tr.eval(&g.eval(y)).is_zero());
    ck.require(bad.is_none(), "g-into-trace-kernel", || format!("y={}", bad.clone().unwrap()))?;
    let phi = PolyMap::new(ctx, [(2, ctx.one()), (1, ctx.scalar(-1))])?;
    let h = PolyMap::new(ctx, [(1, ctx.one()), (0, ctx.one())])?;
    let params = PsiParams { psi: &tr, phi: &phi, psibar: &tr, h: &h, g, k, n: 3 };
    let mut inst = build_psi_family(&params, mode)?;
    inst.family = "char3-trace-corollary";
    inst.predicate = Some(true);
    inst.warnings.splice(0..0, ck.into_warnings());
    Ok(inst)
}

/// f = L1 + L2 g(L3) over GF(q^m), q = p^k, reduced to L1 + L2 g on L3(GF(q^m)).
/// L1, L2, L3 are given as maps so that non-linearized inputs can be rejected
/// (or, in permissive mode, reported).
pub fn build_l1l2l3(
    l1: &PolyMap,
    l2: &PolyMap,
    l3: &PolyMap,
    g: &PolyMap,
    k: usize,
    n: u64,
    mode: Mode,
) -> Result<FamilyInstance> {
    let ctx = Arc::clone(l1.ctx());
    for other in [l2, l3, g] {
        if other.ctx().id() != ctx.id() {
            return Err(Error::FieldMismatch);
        }
    }
    let q = subfield_order(&ctx, k)?;
    let mut ck = Checks::new(mode);
    ck.require(n >= 1 && q % n == 0, "n-divides-q", || format!("n={n}, q={q}"))?;
    let tables = [l1.eval_table()?, l2.eval_table()?, l3.eval_table()?];
    for (name, l, t) in [("L1-q-linearized", l1, &tables[0]), ("L2-q-linearized", l2, &tables[1]), ("L3-q-linearized", l3, &tables[2])] {
        let sub_coeffs = l.terms().iter().all(|(_, c)| in_subfield(&ctx, c, k));
        ck.require(sub_coeffs && is_q_linear(&ctx, t, l, k), name, || l.to_string())?;
    }
    let [l1_t, l2_t, l3_t] = tables;
    let all: Vec<u64> = (0..ctx.order()).collect();
    let image = image_of(&all, |x| l3_t[x as usize]);
    let ni = image.len() as u64;
    ck.require(ni % n == 0, "n-divides-image", || format!("#L3(F)={ni}, n={n}"))?;
    ck.require(ni % n == q % n, "image-congruence", || format!("#L3(F)={ni}, q={q}, n={n}"))?;
    let el = |i: u64| ctx.element(i);
    let g_img: Vec<FFElement> = image.iter().map(|&y| g.eval(&el(y))).collect();
    let bad = g_img.iter().position(|v| !in_subfield(&ctx, v, k));
    ck.require(bad.is_none(), "g-into-subfield", || format!("y={}", el(image[bad.unwrap()])))?;
    let ker3 = kernel(&l3_t);
    let bad = image.iter().zip(&g_img).find_map(|(&y, gy)| {
        ker3.iter()
            .find(|&&x| x != 0 && ctx.add(&el(l1_t[x as usize]), &ctx.mul(&el(l2_t[x as usize]), gy)).is_zero())
            .map(|&x| (y, x))
    });
    ck.require(bad.is_none(), "kernel-intersection", || {
        let (y, x) = bad.unwrap();
        format!("y={}, x={}", el(y), el(x))
    })?;

    let f_values: Vec<u64> = all
        .iter()
        .map(|&x| {
            let gy = g.eval(&el(l3_t[x as usize]));
            ctx.index(&ctx.add(&el(l1_t[x as usize]), &ctx.mul(&el(l2_t[x as usize]), &gy)))
        })
        .collect();
    let fbar_at = |y: u64| {
        let ye = el(y);
        ctx.index(&ctx.add(&l1.eval(&ye), &ctx.mul(&l2.eval(&ye), &g.eval(&ye))))
    };
    let fbar_values: Vec<u64> = image.iter().map(|&y| fbar_at(y)).collect();
    let diagram = DiagramSpec::from_fns(
        all.clone(),
        image.clone(),
        image.clone(),
        |x| f_values[x as usize],
        fbar_at,
        |x| l3_t[x as usize],
        |x| l3_t[x as usize],
        n,
    )
    .ok();
    let f = g.compose(l3).and_then(|gl| l2.mul(&gl)).map(|t| l1.add(&t)).ok();
    Ok(FamilyInstance {
        family: "l1l2l3",
        ctx: Arc::clone(&ctx),
        f,
        f_map: TabulatedMap { ctx: Arc::clone(&ctx), domain: all, values: f_values },
        reduced: TabulatedMap { ctx: Arc::clone(&ctx), domain: image, values: fbar_values },
        diagram,
        predicate: None,
        n,
        warnings: ck.into_warnings(),
    })
}

/// q = 3^k, 3 not dividing m: f = x^2 + x (tr(x)^2 - tr(x) - a), claimed 3-to-1
/// when a is a square in GF(q).
pub fn char3_l1l2l3_corollary(ctx: &Arc<FieldCtx>, k: usize, a: &FFElement, mode: Mode) -> Result<FamilyInstance> {
    if ctx.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: "3".into(), got: ctx.p() });
    }
    subfield_order(ctx, k)?;
    if !in_subfield(ctx, a, k) {
        return Err(Error::NotInSubfield { sub_order: 3u64.pow(k as u32) });
    }
    let mut ck = Checks::new(mode);
    let m = ctx.degree() / k;
    ck.require(m % 3 != 0, "3-not-dividing-m", || format!("m={m}"))?;
    let l1 = PolyMap::monomial(ctx, 2, ctx.one());
    let l2 = PolyMap::x(ctx);
    let l3 = trace_poly(ctx, k)?;
    let g = PolyMap::new(ctx, [(2, ctx.one()), (1, ctx.scalar(-1)), (0, ctx.neg(a))])?;
    let mut inst = build_l1l2l3(&l1, &l2, &l3, &g, k, 3, mode)?;
    inst.family = "char3-l1l2l3-corollary";
    let sub = crate::ff::SubfieldEmbed::new(ctx, k)?;
    let a_sub = sub.coerce(a)?;
    inst.predicate = Some(!a_sub.is_zero() && sub.sub().is_square(&a_sub)?);
    inst.warnings.splice(0..0, ck.into_warnings());
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use crate::poly::parse_poly;

    #[test]
    fn psi_family_with_valid_hypotheses_transfers() {
        // psi = psibar = x^3 - x on GF(9), phi = x, h = 1, g = x^2; n | 3
        let f9 = make_field(3, 2, None).unwrap();
        let psi = parse_poly(&f9, "x^3 - x").unwrap();
        let one = PolyMap::constant(&f9, f9.one());
        let g = parse_poly(&f9, "x^2").unwrap();
        let params = PsiParams { psi: &psi, phi: &PolyMap::x(&f9), psibar: &psi, h: &one, g: &g, k: 1, n: 3 };
        let inst = build_psi_family(&params, Mode::Strict).unwrap();
        let v = inst.transfer().unwrap();
        assert!(v.forward_holds && v.backward_holds);
        assert_eq!(inst.f_is_n().unwrap(), inst.reduced_is_n().unwrap());
    }

    #[test]
    fn kernel_overlap_is_reported() {
        let f9 = make_field(3, 2, None).unwrap();
        let psi = parse_poly(&f9, "x^3 - x").unwrap();
        let one = PolyMap::constant(&f9, f9.one());
        let params = PsiParams { psi: &psi, phi: &psi, psibar: &psi, h: &one, g: &PolyMap::zero(&f9), k: 1, n: 3 };
        match build_psi_family(&params, Mode::Strict) {
            Err(Error::HypothesisViolated { hypothesis, .. }) => assert_eq!(hypothesis, "kernel-intersection"),
            other => panic!("expected a kernel violation, got {other:?}"),
        }
    }

    #[test]
    fn trace_corollary_breaks_on_zero_fiber() {
        // h = a x^d vanishes at tr = 0, so the strict builder refuses it
        let f9 = make_field(3, 2, None).unwrap();
        let g = PolyMap::zero(&f9);
        let err = trace_corollary(&f9, 1, &f9.one(), 1, &g, 1, Mode::Strict).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { hypothesis: "h-into-subfield-units", .. }));
        // permissive: gcd(1, 2) = 1 claims a permutation, but ker(tr) collapses to 0
        let inst = trace_corollary(&f9, 1, &f9.one(), 1, &g, 1, Mode::Permissive).unwrap();
        assert_eq!(inst.predicate, Some(true));
        assert!(!inst.f_is_n().unwrap());
    }

    #[test]
    fn l1l2l3_linear_case_reduces_to_rank() {
        // L2 = 0: f = L1 = x^3 - x over GF(27), L3 = tr; 3 | q
        let f27 = make_field(3, 3, None).unwrap();
        let l1 = parse_poly(&f27, "x^3 - x").unwrap();
        let l3 = trace_poly(&f27, 1).unwrap();
        let inst = build_l1l2l3(&l1, &PolyMap::zero(&f27), &l3, &PolyMap::zero(&f27), 1, 3, Mode::Permissive).unwrap();
        let lin = LinearizedPoly::frobenius_minus_identity(&f27, 1).unwrap();
        assert_eq!(inst.classify_f().unwrap().n, crate::nto1::linearized_oracle(&lin));
    }

    #[test]
    fn char3_l1l2l3_corollary_is_not_linearized() {
        let f81 = make_field(3, 4, None).unwrap();
        let err = char3_l1l2l3_corollary(&f81, 2, &f81.one(), Mode::Strict).unwrap_err();
        assert!(matches!(err, Error::HypothesisViolated { hypothesis: "L1-q-linearized", .. }));
    }
}
