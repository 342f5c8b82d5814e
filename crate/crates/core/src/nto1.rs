//! Brute-force n-to-1 classification and the closed-form lemma oracles.
//!
//! A map on a finite set A is n-to-1 when every value has n or 0 preimages,
//! except that when n does not divide #A exactly one value has #A mod n.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};
use crate::num::gcd;
use crate::poly::{LinearizedPoly, PolyMap};

/// Largest domain accepted by [`histogram`].
pub const DOMAIN_LIMIT: u64 = 1 << 22;
const CHUNK: u64 = 1 << 12;

/// Preimage counts keyed by value. Keys iterate in ascending (codec) order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    counts: BTreeMap<u64, u64>,
    total: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, value: u64) {
        *self.counts.entry(value).or_insert(0) += 1;
        self.total += 1;
    }

    /// Associative, commutative merge.
    pub fn merge(mut self, other: Histogram) -> Histogram {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        self.total += other.total;
        self
    }

    pub fn from_values(values: impl IntoIterator<Item = u64>) -> Self {
        let mut h = Self::new();
        for v in values {
            h.record(v);
        }
        h
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn get(&self, value: u64) -> u64 {
        self.counts.get(&value).copied().unwrap_or(0)
    }

    /// Sum of all counts (the domain size).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct values hit.
    pub fn image_size(&self) -> usize {
        self.counts.len()
    }
}

/// Histogram of `f` over the domain `0..size`, accumulated in parallel chunks.
pub fn histogram<F>(size: u64, f: F) -> Result<Histogram>
where
    F: Fn(u64) -> u64 + Sync,
{
    histogram_chunked(size, CHUNK, f)
}

/// As [`histogram`] with an explicit partition width.
pub fn histogram_chunked<F>(size: u64, chunk: u64, f: F) -> Result<Histogram>
where
    F: Fn(u64) -> u64 + Sync,
{
    if size > DOMAIN_LIMIT {
        return Err(Error::DomainTooLarge { size, limit: DOMAIN_LIMIT });
    }
    let chunk = chunk.max(1);
    let nchunks = size.div_ceil(chunk);
    let h = (0..nchunks)
        .into_par_iter()
        .map(|c| Histogram::from_values((c * chunk..((c + 1) * chunk).min(size)).map(&f)))
        .reduce(Histogram::new, Histogram::merge);
    assert_eq!(h.total(), size, "histogram conservation");
    Ok(h)
}

/// Outcome of classification. `n == 0` together with `irregular` means no n fits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NTo1Report {
    pub n: u64,
    /// The exceptional value and its count t = #A mod n.
    pub exception: Option<(u64, u64)>,
    pub domain_size: u64,
    pub irregular: bool,
    /// For irregular maps, the two smallest distinct preimage counts.
    pub conflict: Option<(u64, u64)>,
    pub histogram: Histogram,
}

impl NTo1Report {
    /// Whether the map satisfies the n-to-1 definition for this particular n.
    pub fn is_n_to_1(&self, n: u64) -> bool {
        is_n_to_1(&self.histogram, n)
    }

    /// `{"n", "exception": [value, t] | null, "domain_size", "irregular"}`.
    pub fn to_json_with(&self, render: impl Fn(u64) -> Value) -> Value {
        json!({
            "n": self.n,
            "exception": self.exception.map(|(v, t)| json!([render(v), t])),
            "domain_size": self.domain_size,
            "irregular": self.irregular,
        })
    }

    /// JSON with values rendered as coefficient arrays of `ctx`.
    pub fn to_json(&self, ctx: &FieldCtx) -> Value {
        self.to_json_with(|v| json!(ctx.element(v)))
    }
}

/// The definition, checked for a given n.
pub fn is_n_to_1(h: &Histogram, n: u64) -> bool {
    if n == 0 || h.total() == 0 {
        return false;
    }
    let total = h.total();
    if total % n == 0 {
        return h.counts.values().all(|&c| c == n);
    }
    let t = total % n;
    let mut off = h.counts.values().filter(|&&c| c != n);
    matches!((off.next(), off.next()), (Some(&c), None) if c == t)
}

/// Finds the n for which the histogram is n-to-1. A map hitting a single
/// value is reported with n = #A.
pub fn classify_histogram(h: Histogram) -> Result<NTo1Report> {
    let total = h.total();
    if total == 0 {
        return Err(Error::EmptyDomain);
    }
    // distinct count -> multiplicity
    let mut dist: BTreeMap<u64, u64> = BTreeMap::new();
    for &c in h.counts.values() {
        *dist.entry(c).or_insert(0) += 1;
    }
    let mut report = NTo1Report {
        n: 0,
        exception: None,
        domain_size: total,
        irregular: false,
        conflict: None,
        histogram: Histogram::new(),
    };
    let keys: Vec<(u64, u64)> = dist.iter().map(|(&c, &k)| (c, k)).collect();
    match keys.as_slice() {
        [(c, _)] => report.n = *c,
        // the smaller count must occur once and equal #A mod n
        [(t, 1), (n, _)] if total % n == *t => {
            report.n = *n;
            let v = h.counts.iter().find(|(_, &c)| c == *t).map(|(&v, _)| v).expect("count present");
            report.exception = Some((v, *t));
        }
        _ => {
            report.irregular = true;
            report.conflict = Some((keys[0].0, keys[1].0));
        }
    }
    report.histogram = h;
    Ok(report)
}

pub fn classify_fn<F>(size: u64, f: F) -> Result<NTo1Report>
where
    F: Fn(u64) -> u64 + Sync,
{
    if size == 0 {
        return Err(Error::EmptyDomain);
    }
    classify_histogram(histogram(size, f)?)
}

/// Classifies a polynomial over its whole field; values are codec indices.
pub fn classify_poly(f: &PolyMap) -> Result<NTo1Report> {
    let ctx = f.ctx();
    classify_fn(ctx.order(), |i| ctx.index(&f.eval(&ctx.element(i))))
}

/// Classifies `f` restricted to an explicit domain.
pub fn classify_on<F>(ctx: &FieldCtx, domain: &[FFElement], f: F) -> Result<NTo1Report>
where
    F: Fn(&FFElement) -> FFElement + Sync,
{
    classify_fn(domain.len() as u64, |i| ctx.index(&f(&domain[i as usize])))
}

/// Predicted n for a x^d over GF(q): gcd(d, q - 1).
pub fn monomial_oracle(ctx: &FieldCtx, a: &FFElement, d: u64) -> Result<u64> {
    if a.is_zero() {
        return Err(Error::ZeroInput);
    }
    if d == 0 {
        return Err(Error::InvalidParameter("monomial exponent must be positive".into()));
    }
    Ok(gcd(d, ctx.order() - 1))
}

/// Predicted n = q^{r - rank} for a q-polynomial over GF(q^r).
pub fn linearized_oracle(l: &LinearizedPoly) -> u64 {
    l.q().pow((l.rel_degree() - l.rank()) as u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;

    #[test]
    fn histogram_examples() {
        let h = histogram(5, |i| i).unwrap();
        assert!(h.counts().values().all(|&c| c == 1));
        let h = histogram(5, |_| 0).unwrap();
        assert_eq!(h.counts().iter().collect::<Vec<_>>(), vec![(&0, &5)]);
        let f7 = make_field(7, 1, None).unwrap();
        let cube = PolyMap::monomial(&f7, 3, f7.one());
        let h = histogram(7, |i| f7.index(&cube.eval(&f7.element(i)))).unwrap();
        // independent: cubes mod 7 by integer arithmetic
        let mut expect = BTreeMap::new();
        for x in 0u64..7 {
            *expect.entry(x * x * x % 7).or_insert(0) += 1;
        }
        assert_eq!(h.counts(), &expect);
        assert_eq!(expect, BTreeMap::from([(0, 1), (1, 3), (6, 3)]));
    }

    #[test]
    fn classify_examples() {
        let f7 = make_field(7, 1, None).unwrap();
        let r = classify_poly(&PolyMap::monomial(&f7, 3, f7.one())).unwrap();
        assert_eq!((r.n, r.exception), (3, Some((0, 1))));
        let f9 = make_field(3, 2, None).unwrap();
        let g = PolyMap::new(&f9, [(3, f9.one()), (1, f9.scalar(-1))]).unwrap();
        let r = classify_poly(&g).unwrap();
        assert_eq!((r.n, r.exception), (3, None));
        let f8 = make_field(2, 3, None).unwrap();
        assert_eq!(classify_poly(&PolyMap::monomial(&f8, 2, f8.one())).unwrap().n, 1);
    }

    #[test]
    fn irregular_reports_conflict() {
        // counts {2, 2, 1, 1}: two values with the short count
        let r = classify_histogram(Histogram::from_values([0, 0, 1, 1, 2, 3])).unwrap();
        assert!(r.irregular);
        assert_eq!(r.n, 0);
        assert_eq!(r.conflict, Some((1, 2)));
        assert_eq!(classify_histogram(Histogram::new()).unwrap_err(), Error::EmptyDomain);
    }

    #[test]
    fn definition_for_given_n() {
        let h = Histogram::from_values([0, 0, 0, 1, 1, 1, 2]);
        assert!(is_n_to_1(&h, 3));
        assert!(!is_n_to_1(&h, 2));
        let h = Histogram::from_values([5, 5, 5]);
        assert!(is_n_to_1(&h, 3));
        // constant map on 3 points fits every n > 3 through the exception clause
        assert!(is_n_to_1(&h, 4));
    }

    #[test]
    fn partition_independence() {
        let f = |i: u64| (i * i + 3 * i) % 101;
        let a = histogram_chunked(1000, 1, f).unwrap();
        let b = histogram_chunked(1000, 17, f).unwrap();
        let c = histogram_chunked(1000, 5000, f).unwrap();
        assert_eq!(a, b);
        assert_eq!(b, c);
    }

    #[test]
    fn oracles() {
        let f7 = make_field(7, 1, None).unwrap();
        assert_eq!(monomial_oracle(&f7, &f7.one(), 3).unwrap(), 3);
        let f5 = make_field(5, 1, None).unwrap();
        assert_eq!(monomial_oracle(&f5, &f5.one(), 2).unwrap(), 2);
        let f8 = make_field(2, 3, None).unwrap();
        assert_eq!(monomial_oracle(&f8, &f8.one(), 2).unwrap(), 1);
        assert_eq!(monomial_oracle(&f8, &f8.zero(), 2).unwrap_err(), Error::ZeroInput);

        let f9 = make_field(3, 2, None).unwrap();
        assert_eq!(linearized_oracle(&LinearizedPoly::frobenius_minus_identity(&f9, 1).unwrap()), 3);
        assert_eq!(linearized_oracle(&LinearizedPoly::identity(&f9, 1).unwrap()), 1);
        let f27 = make_field(3, 3, None).unwrap();
        assert_eq!(linearized_oracle(&LinearizedPoly::trace(&f27, 1).unwrap()), 9);
    }

    #[test]
    fn report_json_shape() {
        let f7 = make_field(7, 1, None).unwrap();
        let r = classify_poly(&PolyMap::monomial(&f7, 3, f7.one())).unwrap();
        assert_eq!(
            r.to_json(&f7).to_string(),
            r#"{"domain_size":7,"exception":[[0],1],"irregular":false,"n":3}"#
        );
    }
}
