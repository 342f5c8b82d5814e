//! Closed-form 3-to-1 classifiers for normalized cubics and the exhaustive
//! quartic search.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::nto1::{classify_poly, is_n_to_1};
use crate::poly::PolyMap;

/// Largest field accepted by [`quartic_3to1_search`].
pub const QUARTIC_LIMIT: u64 = 343;
/// Exhaustive quartic search runs while q^4 stays below this.
pub const QUARTIC_EXHAUSTIVE_EVALS: u64 = 10_000_000;
pub const QUARTIC_SAMPLES: u64 = 100_000;

/// x^3 + a x^2 + b x; `a` is zero outside characteristic 3.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicSpec {
    pub ctx: Arc<FieldCtx>,
    pub a: FFElement,
    pub b: FFElement,
}

impl CubicSpec {
    pub fn poly(&self) -> PolyMap {
        let ctx = &self.ctx;
        PolyMap::new(ctx, [(3, ctx.one()), (2, self.a.clone()), (1, self.b.clone())]).expect("valid terms")
    }
}

/// Characteristic 3: 3-to-1 iff a = 0 and -b is a nonzero square.
pub fn cubic_char3_is3to1(ctx: &FieldCtx, a: &FFElement, b: &FFElement) -> Result<bool> {
    if ctx.p() != 3 {
        return Err(Error::WrongCharacteristic { expected: "3".into(), got: ctx.p() });
    }
    if !ctx.same_field(a) || !ctx.same_field(b) {
        return Err(Error::FieldMismatch);
    }
    if !a.is_zero() || b.is_zero() {
        return Ok(false);
    }
    ctx.is_square(&ctx.neg(b))
}

/// Characteristic other than 3: x^3 + b x is 3-to-1 iff b = 0 and either
/// p = 2 with m even or p > 3 with 3 | p^m - 1.
pub fn cubic_charne3_is3to1(ctx: &FieldCtx, b: &FFElement) -> Result<bool> {
    if ctx.p() == 3 {
        return Err(Error::WrongCharacteristic { expected: "p != 3".into(), got: 3 });
    }
    if !ctx.same_field(b) {
        return Err(Error::FieldMismatch);
    }
    if !b.is_zero() {
        return Ok(false);
    }
    Ok(match ctx.p() {
        2 => ctx.degree() % 2 == 0,
        _ => (ctx.order() - 1) % 3 == 0,
    })
}

/// One row of a cubic sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubicRow {
    pub a: FFElement,
    pub b: FFElement,
    pub predicted: bool,
    pub brute_force: bool,
}

impl CubicRow {
    pub fn agree(&self) -> bool {
        self.predicted == self.brute_force
    }
}

/// Every (a, b) in characteristic 3, every b (with a = 0) otherwise, in codec order.
pub fn cubic_sweep(ctx: &Arc<FieldCtx>) -> Result<Vec<CubicRow>> {
    let q = ctx.order();
    if q > QUARTIC_LIMIT {
        return Err(Error::DomainTooLarge { size: q, limit: QUARTIC_LIMIT });
    }
    let pairs: Vec<(u64, u64)> = if ctx.p() == 3 {
        (0..q).flat_map(|a| (0..q).map(move |b| (a, b))).collect()
    } else {
        (0..q).map(|b| (0, b)).collect()
    };
    pairs
        .into_par_iter()
        .map(|(ai, bi)| {
            let spec = CubicSpec { ctx: Arc::clone(ctx), a: ctx.element(ai), b: ctx.element(bi) };
            let predicted = if ctx.p() == 3 {
                cubic_char3_is3to1(ctx, &spec.a, &spec.b)?
            } else {
                cubic_charne3_is3to1(ctx, &spec.b)?
            };
            let brute_force = classify_poly(&spec.poly())?.is_n_to_1(3);
            Ok(CubicRow { a: spec.a, b: spec.b, predicted, brute_force })
        })
        .collect()
}

/// Result of the quartic search. `sampled` marks the randomized mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuarticSearch {
    pub hits: Vec<(FFElement, FFElement, FFElement)>,
    pub sampled: bool,
    pub triples_checked: u64,
}

/// Addition and multiplication tables on codec indices.
struct Tables {
    q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl Tables {
    fn new(ctx: &FieldCtx) -> Self {
        let q = ctx.order() as usize;
        let els: Vec<FFElement> = ctx.elements().collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for i in 0..q {
            for j in 0..q {
                add[i * q + j] = ctx.index(&ctx.add(&els[i], &els[j])) as u32;
                mul[i * q + j] = ctx.index(&ctx.mul(&els[i], &els[j])) as u32;
            }
        }
        Tables { q, add, mul }
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[a as usize * self.q + b as usize]
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[a as usize * self.q + b as usize]
    }
}

/// Power rows x, x^2, x^3, x^4 by codec index.
fn powers(ctx: &FieldCtx) -> Vec<[u32; 4]> {
    ctx.elements()
        .map(|x| {
            let mut out = [0u32; 4];
            let mut cur = x.clone();
            for slot in out.iter_mut() {
                *slot = ctx.index(&cur) as u32;
                cur = ctx.mul(&cur, &x);
            }
            out
        })
        .collect()
}

/// The n-to-1 test for n = 3 on a dense count vector, bailing out early.
fn counts_are_3to1(counts: &[u32], q: u64) -> bool {
    let t = (q % 3) as u32;
    let mut odd = 0;
    for &c in counts {
        if c == 0 || c == 3 {
            continue;
        }
        if t == 0 || c != t {
            return false;
        }
        odd += 1;
    }
    odd == usize::from(t != 0)
}

fn quartic_is_3to1(tab: &Tables, pw: &[[u32; 4]], a: u32, b: u32, c: u32, counts: &mut [u32]) -> bool {
    counts.iter_mut().for_each(|v| *v = 0);
    for row in pw {
        let [x1, x2, x3, x4] = *row;
        let v = tab.add(tab.add(tab.add(x4, tab.mul(a, x3)), tab.mul(b, x2)), tab.mul(c, x1));
        let slot = &mut counts[v as usize];
        *slot += 1;
        if *slot > 3 {
            return false;
        }
    }
    counts_are_3to1(counts, tab.q as u64)
}

/// All (a, b, c) with x^4 + a x^3 + b x^2 + c x 3-to-1. Exhaustive while q^4
/// stays under [`QUARTIC_EXHAUSTIVE_EVALS`], otherwise [`QUARTIC_SAMPLES`]
/// seeded random triples.
pub fn quartic_3to1_search(ctx: &FieldCtx, seed: u64) -> Result<QuarticSearch> {
    let q = ctx.order();
    if q > QUARTIC_LIMIT {
        return Err(Error::DomainTooLarge { size: q, limit: QUARTIC_LIMIT });
    }
    let tab = Tables::new(ctx);
    let pw = powers(ctx);
    let q32 = q as u32;
    let exhaustive = q.pow(4) < QUARTIC_EXHAUSTIVE_EVALS;
    let (mut hits, checked): (Vec<(u32, u32, u32)>, u64) = if exhaustive {
        let hits = (0..q32)
            .into_par_iter()
            .flat_map_iter(|a| {
                let mut counts = vec![0u32; q as usize];
                let mut local = Vec::new();
                for b in 0..q32 {
                    for c in 0..q32 {
                        if quartic_is_3to1(&tab, &pw, a, b, c, &mut counts) {
                            local.push((a, b, c));
                        }
                    }
                }
                local
            })
            .collect();
        (hits, q.pow(3))
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let triples: Vec<(u32, u32, u32)> =
            (0..QUARTIC_SAMPLES).map(|_| (rng.gen_range(0..q32), rng.gen_range(0..q32), rng.gen_range(0..q32))).collect();
        let hits = triples
            .into_par_iter()
            .map_init(|| vec![0u32; q as usize], |counts, (a, b, c)| {
                quartic_is_3to1(&tab, &pw, a, b, c, counts).then_some((a, b, c))
            })
            .flatten()
            .collect();
        (hits, QUARTIC_SAMPLES)
    };
    hits.sort_unstable();
    hits.dedup();
    let el = |i: u32| ctx.element(i as u64);
    Ok(QuarticSearch {
        hits: hits.into_iter().map(|(a, b, c)| (el(a), el(b), el(c))).collect(),
        sampled: !exhaustive,
        triples_checked: checked,
    })
}

/// Brute-force check of a single quartic through the general classifier.
pub fn quartic_is_3to1_slow(ctx: &Arc<FieldCtx>, a: &FFElement, b: &FFElement, c: &FFElement) -> Result<bool> {
    let f = PolyMap::new(ctx, [(4, ctx.one()), (3, a.clone()), (2, b.clone()), (1, c.clone())])?;
    Ok(is_n_to_1(&classify_poly(&f)?.histogram, 3))
}
