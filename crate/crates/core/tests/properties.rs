use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use nto1_core::agw::{check_diagram, random_diagram};
use nto1_core::nto1::{classify_histogram, histogram_chunked, linearized_oracle};
use nto1_core::poly::Affine;
use nto1_core::theorems::{verify_theorem, RunOptions};
use nto1_core::walsh::WalshSpectrum;
use nto1_core::{classify_poly, is_n_to_1, make_field, FFElement, FieldCtx, FieldSpec, Histogram, LinearizedPoly, PolyMap};

const FIELDS: [(u64, usize); 8] = [(2, 3), (3, 2), (5, 1), (7, 1), (2, 4), (5, 2), (3, 3), (11, 1)];

fn field_strategy() -> impl Strategy<Value = Arc<FieldCtx>> {
    (0..FIELDS.len()).prop_map(|i| make_field(FIELDS[i].0, FIELDS[i].1, None).unwrap())
}

fn el(ctx: &FieldCtx, seed: u64) -> FFElement {
    ctx.element(seed % ctx.order())
}

fn poly(ctx: &Arc<FieldCtx>, terms: &[(u64, u64)]) -> PolyMap {
    PolyMap::new(ctx, terms.iter().map(|&(e, c)| (e, el(ctx, c)))).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn field_axioms(ctx in field_strategy(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (el(&ctx, a), el(&ctx, b), el(&ctx, c));
        prop_assert_eq!(ctx.mul(&a, &ctx.add(&b, &c)), ctx.add(&ctx.mul(&a, &b), &ctx.mul(&a, &c)));
        prop_assert_eq!(ctx.element(ctx.index(&a)), a.clone());
        prop_assert_eq!(ctx.pow(&a, ctx.order()), a.clone());
        prop_assert_eq!(ctx.frobenius(&ctx.add(&a, &b), 1), ctx.add(&ctx.frobenius(&a, 1), &ctx.frobenius(&b, 1)));
        if !a.is_zero() {
            prop_assert_eq!(ctx.mul(&a, &ctx.inv(&a).unwrap()), ctx.one());
        }
    }

    #[test]
    fn trace_is_additive(ctx in field_strategy(), a in any::<u64>(), b in any::<u64>()) {
        let (a, b) = (el(&ctx, a), el(&ctx, b));
        let p = ctx.p();
        prop_assert_eq!(ctx.abs_trace(&ctx.add(&a, &b)), (ctx.abs_trace(&a) + ctx.abs_trace(&b)) % p);
    }

    #[test]
    fn power_classes_multiply(ctx in field_strategy(), a in any::<u64>(), b in any::<u64>(), k in 1u64..12) {
        let q = ctx.order();
        let (a, b) = (ctx.element(1 + a % (q - 1)), ctx.element(1 + b % (q - 1)));
        let g = gcd(k, q - 1);
        let ca = ctx.power_class(&a, k).unwrap();
        let cb = ctx.power_class(&b, k).unwrap();
        prop_assert_eq!(ctx.power_class(&ctx.mul(&a, &b), k).unwrap(), (ca + cb) % g);
    }

    #[test]
    fn histogram_partition_independence(values in prop::collection::vec(0u64..17, 1..300), chunk in 1u64..64) {
        let n = values.len() as u64;
        let whole = histogram_chunked(n, n, |i| values[i as usize]).unwrap();
        let parts = histogram_chunked(n, chunk, |i| values[i as usize]).unwrap();
        prop_assert_eq!(&whole, &parts);
        prop_assert_eq!(whole.counts().values().sum::<u64>(), n);
    }

    #[test]
    fn classification_matches_definition(values in prop::collection::vec(0u64..9, 1..60)) {
        let h = Histogram::from_values(values.iter().copied());
        let total = h.total();
        let r = classify_histogram(h.clone()).unwrap();
        let fits: Vec<u64> = (1..=total).filter(|&n| is_n_to_1(&h, n)).collect();
        if r.irregular {
            prop_assert!(fits.is_empty());
            prop_assert_eq!(r.n, 0);
        } else {
            prop_assert_eq!(fits, vec![r.n]);
            prop_assert_eq!(r.exception.is_some(), total % r.n != 0);
        }
    }

    #[test]
    fn monomial_matches_gcd(ctx in field_strategy(), d in 1u64..200, c in any::<u64>()) {
        let q = ctx.order();
        let c = ctx.element(1 + c % (q - 1));
        let r = classify_poly(&PolyMap::monomial(&ctx, d, c)).unwrap();
        prop_assert_eq!(r.n, gcd(d, q - 1));
    }

    #[test]
    fn linearized_matches_rank(seed in any::<u64>(), which in 0usize..4) {
        let (p, m) = [(2, 4), (3, 2), (2, 6), (3, 3)][which];
        let ctx = make_field(p, m, None).unwrap();
        let coeffs: Vec<FFElement> = (0..m as u64).map(|i| el(&ctx, seed.rotate_left(7 * i as u32) ^ i)).collect();
        let l = LinearizedPoly::new(&ctx, 1, coeffs).unwrap();
        let r = classify_poly(&l.to_polymap()).unwrap();
        prop_assert!(r.exception.is_none());
        if l.rank() > 0 {
            prop_assert_eq!(r.n, linearized_oracle(&l));
        } else {
            prop_assert_eq!(r.n, ctx.order());
        }
    }

    #[test]
    fn affine_change_keeps_shape(
        ctx in field_strategy(),
        terms in prop::collection::vec((0u64..12, any::<u64>()), 1..5),
        a in any::<u64>(), b in any::<u64>(), c in any::<u64>(),
    ) {
        let f = poly(&ctx, &terms);
        prop_assume!(!f.is_constant());
        let q = ctx.order();
        let w = Affine { a: ctx.element(1 + a % (q - 1)), b: el(&ctx, b), c: el(&ctx, c) };
        let g = f.apply_affine(&w).unwrap();
        let (rf, rg) = (classify_poly(&f).unwrap(), classify_poly(&g).unwrap());
        let shape = |h: &Histogram| {
            let mut v: Vec<u64> = h.counts().values().copied().collect();
            v.sort_unstable();
            v
        };
        prop_assert_eq!(rf.n, rg.n);
        prop_assert_eq!(shape(&rf.histogram), shape(&rg.histogram));

        let (nf, w2) = f.normalize().unwrap();
        prop_assert!(nf.coeff(0).is_zero());
        prop_assert_eq!(nf.leading_coeff().cloned(), Some(ctx.one()));
        prop_assert_eq!(f.apply_affine(&w2).unwrap().reduce(), nf.reduce());
        prop_assert_eq!(classify_poly(&nf).unwrap().n, rf.n);
    }

    #[test]
    fn interpolation_reproduces_tables(ctx in field_strategy(), seed in any::<u64>()) {
        let q = ctx.order();
        let values: Vec<FFElement> = (0..q).map(|i| el(&ctx, seed.wrapping_mul(i + 1).rotate_left(i as u32))).collect();
        let f = PolyMap::interpolate(&ctx, &values).unwrap();
        prop_assert!(f.degree().map_or(true, |d| d < q));
        for (i, v) in values.iter().enumerate() {
            prop_assert_eq!(&f.eval(&ctx.element(i as u64)), v);
        }
    }

    #[test]
    fn walsh_at_zero_is_field_order(ctx in field_strategy(), terms in prop::collection::vec((0u64..10, any::<u64>()), 1..4)) {
        let f = poly(&ctx, &terms);
        let spec = WalshSpectrum::new(&f).unwrap();
        prop_assert_eq!(spec.values()[0].as_integer(), Some(ctx.order() as i128));
    }

    #[test]
    fn transfer_never_fails(seed in any::<u64>(), max_a in 4usize..60) {
        let d = random_diagram(&mut ChaCha8Rng::seed_from_u64(seed), max_a);
        let v = check_diagram(&d).unwrap();
        prop_assert!(v.forward_holds);
        prop_assert!(v.backward_holds);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn seeded_sweeps_are_deterministic(seed in any::<u64>()) {
        let opts = RunOptions { seed, field: Some(FieldSpec::new(7, 1)), ..Default::default() };
        let a = verify_theorem("piecewisegenerel", &opts).unwrap();
        let b = verify_theorem("piecewisegenerel", &opts).unwrap();
        prop_assert_eq!(a.to_csv(), b.to_csv());
        prop_assert!(a.pass);
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
