//! Named verification sweeps. Each id runs one exhaustive or randomized check
//! and returns its rows (CSV, elements as codec indices) and a verdict.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::agw::{check_diagram, random_diagram};
use crate::error::{Error, Result};
use crate::families::{
    construct_binary, construct_gouzao, construct_miu2, construct_miu3, construct_nmiu3, random_piecewise,
    random_zcriterion, solve_piecewise, trace_class_representatives, BinaryVariant, GouzaoVariant, Mode,
};
use crate::ff::{make_field, FFElement, FieldCtx, FieldSpec};
use crate::lowdeg::{cubic_sweep, quartic_3to1_search};
use crate::nto1::{classify_poly, linearized_oracle, NTo1Report};
use crate::num::{gcd, is_prime};
use crate::poly::{Affine, LinearizedPoly, PolyMap};
use crate::walsh::{char_sum_from, PhiGadget, WalshSpectrum};

/// Largest user-supplied field accepted without the nightly flag.
pub const DESK_GATE: u64 = 1 << 13;

pub const THEOREM_IDS: [&str; 18] = [
    "monomial",
    "linear",
    "de3p3",
    "de3pne3",
    "quartic",
    "walsh",
    "agwcore2",
    "miu2",
    "miu3",
    "nmiu3",
    "piecewisegenerel",
    "gouzao1",
    "gouzao2",
    "gouzao3",
    "2gouzao1",
    "2gouzao2",
    "zcriterion",
    "normalize",
];

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub seed: u64,
    pub nightly: bool,
    /// Replaces the default field list, where the check takes a field.
    pub field: Option<FieldSpec>,
    /// q1 for the gouzao and 2gouzao1 sweeps.
    pub q1: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TheoremReport {
    pub id: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub pass: bool,
    /// First disagreement, or the failed count.
    pub witness: Option<String>,
    pub summary: String,
}

impl TheoremReport {
    pub fn to_csv(&self) -> String {
        let mut out = format!("#schema=verify-theorem/{}/v1\n{}\n", self.id, self.columns.join(","));
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Row accumulator.
struct Tally {
    id: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    bad: usize,
    witness: Option<String>,
}

impl Tally {
    fn new(id: &'static str, columns: &[&'static str]) -> Self {
        Tally { id, columns: columns.to_vec(), rows: Vec::new(), bad: 0, witness: None }
    }

    fn push(&mut self, row: Vec<String>, ok: bool) {
        if !ok {
            self.bad += 1;
            if self.witness.is_none() {
                let cells: Vec<String> = self.columns.iter().zip(&row).map(|(c, v)| format!("{c}={v}")).collect();
                self.witness = Some(cells.join(" "));
            }
        }
        self.rows.push(row);
    }

    fn extend(&mut self, rows: Vec<(Vec<String>, bool)>) {
        for (r, ok) in rows {
            self.push(r, ok);
        }
    }

    /// Adds a failed count check on top of the row disagreements.
    fn expect_count(&mut self, what: &str, got: usize, want: usize) {
        if got != want {
            self.bad += 1;
            self.witness.get_or_insert_with(|| format!("{what}: expected {want}, got {got}"));
        }
    }

    fn finish(self, summary: String) -> TheoremReport {
        TheoremReport {
            id: self.id,
            columns: self.columns,
            pass: self.bad == 0,
            rows: self.rows,
            witness: self.witness,
            summary,
        }
    }
}

fn idx(ctx: &FieldCtx, x: &FFElement) -> String {
    ctx.index(x).to_string()
}

fn b(v: bool) -> String {
    v.to_string()
}

fn fields(opts: &RunOptions, defaults: &[(u64, usize)]) -> Result<Vec<Arc<FieldCtx>>> {
    match &opts.field {
        Some(spec) => {
            let ctx = FieldCtx::from_spec(spec)?;
            if ctx.order() > DESK_GATE && !opts.nightly {
                return Err(Error::GateExceeded(format!(
                    "field of order {} exceeds {DESK_GATE}; pass --nightly",
                    ctx.order()
                )));
            }
            Ok(vec![ctx])
        }
        None => defaults.iter().map(|&(p, m)| make_field(p, m, None)).collect(),
    }
}

fn rng_for(opts: &RunOptions, id: &str) -> ChaCha8Rng {
    let salt = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, c| (h ^ c as u64).wrapping_mul(0x100_0000_01b3));
    ChaCha8Rng::seed_from_u64(opts.seed ^ salt)
}

/// Runs one check by id.
pub fn verify_theorem(id: &str, opts: &RunOptions) -> Result<TheoremReport> {
    match id {
        "monomial" => monomial(opts),
        "linear" => linear(opts),
        "de3p3" => de3p3(opts),
        "de3pne3" => de3pne3(opts),
        "quartic" => quartic(opts),
        "walsh" => walsh(opts),
        "agwcore2" => agwcore2(opts),
        "miu2" => miu2(opts),
        "miu3" => class_sweep("miu3", 3, opts),
        "nmiu3" => class_sweep("nmiu3", 4, opts),
        "piecewisegenerel" => piecewise(opts),
        "gouzao1" => gouzao("gouzao1", GouzaoVariant::V1, 13, opts),
        "gouzao2" => gouzao("gouzao2", GouzaoVariant::V2, 13, opts),
        "gouzao3" => gouzao("gouzao3", GouzaoVariant::V3, 6, opts),
        "2gouzao1" => binary("2gouzao1", BinaryVariant::A, opts),
        "2gouzao2" => binary("2gouzao2", BinaryVariant::B, opts),
        "zcriterion" => zcriterion(opts),
        "normalize" => normalize(opts),
        _ => Err(Error::InvalidParameter(format!("unknown theorem id '{id}'"))),
    }
}

/// Every id in [`THEOREM_IDS`] order.
pub fn verify_all(opts: &RunOptions) -> Result<Vec<TheoremReport>> {
    THEOREM_IDS.iter().map(|id| verify_theorem(id, opts)).collect()
}

fn prime_powers_up_to(limit: u64) -> Vec<(u64, usize)> {
    let mut out = Vec::new();
    for p in 2..=limit {
        if !is_prime(p) {
            continue;
        }
        let mut q = p;
        let mut m = 1;
        while q <= limit {
            out.push((p, m));
            q *= p;
            m += 1;
        }
    }
    out.sort_by_key(|&(p, m)| p.pow(m as u32));
    out
}

fn monomial(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("monomial", &["p", "m", "d", "oracle", "n", "exception_count"]);
    let defaults = prime_powers_up_to(128);
    let fs = fields(opts, &defaults)?;
    for ctx in &fs {
        let q = ctx.order();
        let rows: Vec<(Vec<String>, bool)> = (1..q)
            .into_par_iter()
            .map(|d| -> Result<_> {
                let r = classify_poly(&PolyMap::monomial(ctx, d, ctx.one()))?;
                let oracle = gcd(d, q - 1);
                let expected = (oracle > 1).then_some((0, 1));
                let ok = r.n == oracle && r.exception == expected;
                let exc = r.exception.map_or("-".to_string(), |(_, c)| c.to_string());
                Ok((vec![ctx.p().to_string(), ctx.degree().to_string(), d.to_string(), oracle.to_string(), r.n.to_string(), exc], ok))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} monomials over {} fields", fs.len())))
}

fn linear(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("linear", &["p", "m", "k", "trial", "rank", "oracle", "n", "exception"]);
    let defaults = [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (7, 2), (2, 6), (3, 4), (5, 3), (2, 8), (7, 3), (3, 6), (2, 10), (2, 12)];
    let fs = fields(opts, &defaults)?;
    let mut rng = rng_for(opts, "linear");
    for ctx in &fs {
        let m = ctx.degree();
        let ks: Vec<usize> = (1..=m).filter(|k| m % k == 0).collect();
        let polys: Vec<LinearizedPoly> = (0..100)
            .map(|_| {
                let k = *ks.choose(&mut rng).expect("k = m always divides m");
                let r = m / k;
                let coeffs = (0..r)
                    .map(|_| if rng.gen_bool(0.5) { ctx.zero() } else { ctx.element(rng.gen_range(0..ctx.order())) })
                    .collect();
                LinearizedPoly::new(ctx, k, coeffs)
            })
            .collect::<Result<_>>()?;
        let rows: Vec<(Vec<String>, bool)> = polys
            .par_iter()
            .enumerate()
            .map(|(i, l)| -> Result<_> {
                let rep = classify_poly(&l.to_polymap())?;
                let oracle = linearized_oracle(l);
                let ok = rep.n == oracle && rep.exception.is_none() && !rep.irregular;
                Ok((
                    vec![
                        ctx.p().to_string(),
                        m.to_string(),
                        l.sub_degree().to_string(),
                        i.to_string(),
                        l.rank().to_string(),
                        oracle.to_string(),
                        rep.n.to_string(),
                        b(rep.exception.is_some()),
                    ],
                    ok,
                ))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    Ok(t.finish(format!("{} q-polynomials over {} fields", t_len(&fs, 100), fs.len())))
}

fn t_len(fs: &[Arc<FieldCtx>], per: usize) -> usize {
    fs.len() * per
}

fn cubic_rows(t: &mut Tally, ctx: &Arc<FieldCtx>) -> Result<usize> {
    let rows = cubic_sweep(ctx)?;
    let mut positives = 0;
    for r in rows {
        positives += usize::from(r.brute_force);
        let ok = r.agree();
        t.push(
            vec![
                ctx.p().to_string(),
                ctx.degree().to_string(),
                idx(ctx, &r.a),
                idx(ctx, &r.b),
                b(r.predicted),
                b(r.brute_force),
            ],
            ok,
        );
    }
    Ok(positives)
}

fn de3p3(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("de3p3", &["p", "m", "a", "b", "predicted", "brute_force"]);
    let fs = fields(opts, &[(3, 2), (3, 3)])?;
    let mut summary = Vec::new();
    for ctx in &fs {
        let pos = cubic_rows(&mut t, ctx)?;
        summary.push(format!("GF({}): {pos} positive", ctx.order()));
        if ctx.order() == 27 {
            t.expect_count("positive pairs over GF(27)", pos, 13);
        }
    }
    Ok(t.finish(summary.join("; ")))
}

fn de3pne3(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("de3pne3", &["p", "m", "a", "b", "predicted", "brute_force"]);
    let fs = fields(opts, &[(2, 2), (5, 1), (7, 1), (2, 3), (13, 1), (2, 4)])?;
    let mut summary = Vec::new();
    for ctx in &fs {
        let pos = cubic_rows(&mut t, ctx)?;
        summary.push(format!("GF({}): {pos} positive", ctx.order()));
    }
    Ok(t.finish(summary.join("; ")))
}

fn quartic(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("quartic", &["p", "m", "triples_checked", "sampled", "hits", "first_hit"]);
    let defaults = [(5, 1), (7, 1), (2, 3), (3, 2), (11, 1), (13, 1), (2, 4), (17, 1), (5, 2), (3, 3), (7, 2)];
    let fs = fields(opts, &defaults)?;
    for ctx in &fs {
        let s = quartic_3to1_search(ctx, opts.seed)?;
        let first = s
            .hits
            .first()
            .map_or("-".to_string(), |(a, bb, c)| format!("{}/{}/{}", idx(ctx, a), idx(ctx, bb), idx(ctx, c)));
        t.push(
            vec![
                ctx.p().to_string(),
                ctx.degree().to_string(),
                s.triples_checked.to_string(),
                b(s.sampled),
                s.hits.len().to_string(),
                first,
            ],
            s.hits.is_empty(),
        );
    }
    let total: usize = t.rows.iter().map(|r| r[4].parse::<usize>().unwrap_or(0)).sum();
    Ok(t.finish(format!("{total} 3-to-1 quartics over {} fields", fs.len())))
}

/// A random table that is n-to-1 by construction, as codec indices.
fn random_n_to_1_table<R: Rng>(rng: &mut R, q: u64, n: u64) -> Vec<u64> {
    let mut dom: Vec<u64> = (0..q).collect();
    dom.shuffle(rng);
    let mut vals: Vec<u64> = (0..q).collect();
    vals.shuffle(rng);
    let mut table = vec![0u64; q as usize];
    for (block, chunk) in dom.chunks(n as usize).enumerate() {
        for &x in chunk {
            table[x as usize] = vals[block];
        }
    }
    table
}

fn walsh_corpus<R: Rng>(rng: &mut R, ctx: &Arc<FieldCtx>, size: usize) -> Result<Vec<(&'static str, PolyMap)>> {
    let q = ctx.order();
    let p = ctx.p();
    let mut out = Vec::with_capacity(size);
    for i in 0..size {
        let rand_el = |rng: &mut R| ctx.element(rng.gen_range(0..q));
        let entry = match i % 5 {
            0 => {
                let nterms = rng.gen_range(1..=6);
                let terms: Vec<(u64, FFElement)> = (0..nterms).map(|_| (rng.gen_range(0..q), rand_el(rng))).collect();
                ("dense", PolyMap::new(ctx, terms)?)
            }
            1 => ("monomial", PolyMap::monomial(ctx, rng.gen_range(1..q), ctx.element(rng.gen_range(1..q)))),
            2 => {
                let coeffs = (0..ctx.degree()).map(|_| rand_el(rng)).collect();
                ("linearized", LinearizedPoly::new(ctx, 1, coeffs)?.to_polymap())
            }
            k => {
                let n = if k == 3 { 2 } else { p };
                let table = random_n_to_1_table(rng, q, n);
                let values: Vec<FFElement> = table.iter().map(|&v| ctx.element(v)).collect();
                (if k == 3 { "table2" } else { "tablep" }, PolyMap::interpolate(ctx, &values)?)
            }
        };
        out.push(entry);
    }
    Ok(out)
}

fn walsh(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t =
        Tally::new("walsh", &["p", "m", "map", "kind", "phi1_verdict", "is_2_to_1", "phi2_verdict", "is_p_to_1"]);
    let fs = fields(opts, &[(3, 2), (5, 2), (3, 3)])?;
    let mut rng = rng_for(opts, "walsh");
    for ctx in &fs {
        let (p, m) = (ctx.p(), ctx.degree() as u32);
        let phi1 = if p == 2 { None } else { Some(PhiGadget::phi1(p, m)?) };
        let phi2 = PhiGadget::phi2(p, m, 1)?;
        let corpus = walsh_corpus(&mut rng, ctx, 500)?;
        let rows: Vec<(Vec<String>, bool)> = corpus
            .par_iter()
            .enumerate()
            .map(|(i, (kind, f))| -> Result<_> {
                let spec = WalshSpectrum::new(f)?;
                let rep = classify_poly(f)?;
                let v2 = char_sum_from(&spec, &phi2)? == phi2.bound();
                let is_p = rep.is_n_to_1(p);
                let mut ok = v2 == is_p;
                let (v1s, is2s) = match &phi1 {
                    Some(g) => {
                        let v1 = char_sum_from(&spec, g)? == g.bound();
                        let is2 = rep.is_n_to_1(2);
                        ok &= v1 == is2;
                        (b(v1), b(is2))
                    }
                    None => ("-".into(), "-".into()),
                };
                Ok((vec![p.to_string(), m.to_string(), i.to_string(), kind.to_string(), v1s, is2s, b(v2), b(is_p)], ok))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} maps over {} fields", fs.len())))
}

fn agwcore2(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new(
        "agwcore2",
        &["trial", "size_a", "size_s", "n", "f_is_n", "g_is_n", "condition3", "forward", "backward"],
    );
    let mut rng = rng_for(opts, "agwcore2");
    let diagrams: Vec<_> = (0..200).map(|_| random_diagram(&mut rng, 100)).collect();
    let rows: Vec<(Vec<String>, bool)> = diagrams
        .par_iter()
        .enumerate()
        .map(|(i, d)| {
            let base = vec![i.to_string(), d.a().len().to_string(), d.s().len().to_string(), d.n().to_string()];
            match check_diagram(d) {
                Ok(v) => {
                    let mut row = base;
                    row.extend([b(v.f_is_n), b(v.g_is_n), b(v.condition3), b(v.forward_holds), b(v.backward_holds)]);
                    (row, v.forward_holds && v.backward_holds)
                }
                Err(e) => {
                    let mut row = base;
                    row.extend(["-".into(), "-".into(), "-".into(), format!("error: {e}").replace(',', ";"), "-".into()]);
                    (row, false)
                }
            }
        })
        .collect();
    t.extend(rows);
    let cond3 = t.rows.iter().filter(|r| r[6] == "true").count();
    Ok(t.finish(format!("200 diagrams, condition (3) in {cond3}")))
}

fn class_columns() -> Vec<&'static str> {
    vec!["p", "m", "r", "values", "predicate", "brute_force"]
}

fn miu2(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("miu2", &class_columns());
    let fs = fields(opts, &[(7, 1), (11, 1)])?;
    for ctx in &fs {
        let q = ctx.order();
        if q % 4 != 3 {
            return Err(Error::InvalidParameter(format!("q = {q} is not 3 mod 4")));
        }
        let s = (q - 1) / 2;
        let params: Vec<(u64, u64, u64)> = (1..q)
            .filter(|&r| gcd(r, s) == 1)
            .flat_map(|r| (1..q).flat_map(move |a| (1..q).map(move |bb| (r, a, bb))))
            .collect();
        let rows: Vec<(Vec<String>, bool)> = params
            .into_par_iter()
            .map(|(r, a, bb)| -> Result<_> {
                let inst = construct_miu2(ctx, r, &ctx.element(a), &ctx.element(bb), Mode::Strict)?;
                let bf = inst.f_is_n()?;
                let pred = inst.predicate.expect("miu2 has a predicate");
                let row = vec![ctx.p().to_string(), ctx.degree().to_string(), r.to_string(), format!("{a}/{bb}"), b(pred), b(bf)];
                Ok((row, pred == bf))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} (r, a, b) points")))
}

/// Class-representative sweep: each value runs over beta^0..beta^{n-1}.
fn class_sweep(id: &'static str, n: u64, opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new(id, &class_columns());
    let fs = fields(opts, &[(13, 1)])?;
    for ctx in &fs {
        let q = ctx.order();
        if (q - 1) % n != 0 {
            return Err(Error::InvalidParameter(format!("{n} does not divide q-1 = {}", q - 1)));
        }
        let s = (q - 1) / n;
        let reps: Vec<FFElement> = (0..n).map(|j| ctx.beta_pow(j)).collect();
        let mut tuples: Vec<Vec<u64>> = vec![vec![]];
        for _ in 0..n {
            tuples = tuples.into_iter().flat_map(|t| (0..n).map(move |j| [t.clone(), vec![j]].concat())).collect();
        }
        let params: Vec<(u64, Vec<u64>)> =
            (1..q).filter(|&r| gcd(r, s) == 1).flat_map(|r| tuples.iter().map(move |tu| (r, tu.clone()))).collect();
        let rows: Vec<(Vec<String>, bool)> = params
            .into_par_iter()
            .map(|(r, tu)| -> Result<_> {
                let v: Vec<&FFElement> = tu.iter().map(|&j| &reps[j as usize]).collect();
                let inst = if n == 3 {
                    construct_miu3(ctx, r, v[0], v[1], v[2], Mode::Strict)?
                } else {
                    construct_nmiu3(ctx, r, [v[0], v[1], v[2], v[3]], Mode::Strict)?
                };
                let bf = inst.f_is_n()?;
                let pred = inst.predicate.expect("class families have a predicate");
                let shown: Vec<String> = v.iter().map(|x| idx(ctx, x)).collect();
                let row =
                    vec![ctx.p().to_string(), ctx.degree().to_string(), r.to_string(), shown.join("/"), b(pred), b(bf)];
                Ok((row, pred == bf))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let pos = t.rows.iter().filter(|r| r[5] == "true").count();
    let n_rows = t.rows.len();
    Ok(t.finish(format!("{n_rows} points, {pos} {}-to-1", n)))
}

fn piecewise(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("piecewisegenerel", &["p", "m", "trial", "ell", "n", "r", "targets_hit", "classify_n"]);
    let fs = fields(opts, &[(7, 1), (13, 1), (5, 2)])?;
    let mut rng = rng_for(opts, "piecewisegenerel");
    for ctx in &fs {
        let ns: Vec<u64> = crate::num::divisors(ctx.order() - 1);
        let specs = (0..100)
            .map(|_| {
                let n = *ns.choose(&mut rng).expect("1 divides q-1");
                random_piecewise(&mut rng, ctx, n)
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<(Vec<String>, bool)> = specs
            .par_iter()
            .enumerate()
            .map(|(i, spec)| -> Result<_> {
                let (h, f) = solve_piecewise(spec)?;
                let omega = ctx.beta_pow(spec.s());
                let hit = (0..spec.ell()).all(|j| h.eval(&ctx.pow(&omega, j)) == spec.target(j as usize));
                let rep = classify_poly(&f)?;
                let ok = hit && rep.n == spec.n();
                Ok((
                    vec![
                        ctx.p().to_string(),
                        ctx.degree().to_string(),
                        i.to_string(),
                        spec.ell().to_string(),
                        spec.n().to_string(),
                        spec.r().to_string(),
                        b(hit),
                        rep.n.to_string(),
                    ],
                    ok,
                ))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} specs")))
}

fn trace_sweep_columns() -> Vec<&'static str> {
    vec!["p", "m", "trace", "delta", "predicate", "brute_force"]
}

fn gouzao(id: &'static str, variant: GouzaoVariant, expected: usize, opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new(id, &trace_sweep_columns());
    let fs = fields(opts, &[(3, 6)])?;
    let ctx = &fs[0];
    if ctx.p() != 3 || ctx.degree() % 2 != 0 {
        return Err(Error::InvalidParameter("expected GF(3^{2j})".into()));
    }
    let half = ctx.degree() / 2;
    let q1 = opts.q1.unwrap_or(3u64.pow(half as u32));
    let reps = trace_class_representatives(ctx, half)?;
    let rows: Vec<(Vec<String>, bool)> = reps
        .par_iter()
        .map(|(tr, delta)| -> Result<_> {
            let inst = construct_gouzao(ctx, variant, q1, delta, Mode::Strict)?;
            let bf = inst.f_is_n()?;
            let pred = inst.predicate.expect("gouzao has a predicate");
            let row =
                vec![ctx.p().to_string(), ctx.degree().to_string(), idx(ctx, tr), idx(ctx, delta), b(pred), b(bf)];
            Ok((row, pred == bf))
        })
        .collect::<Result<_>>()?;
    t.extend(rows);
    let positives = t.rows.iter().filter(|r| r[5] == "true").count();
    if ctx.order() == 729 && q1 == 27 {
        t.expect_count("positive trace classes", positives, expected);
    }
    Ok(t.finish(format!("{positives} of {} trace classes 3-to-1", reps.len())))
}

fn binary(id: &'static str, variant: BinaryVariant, opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new(id, &trace_sweep_columns());
    let (default, reference) = match variant {
        BinaryVariant::A => ((2, 12), (4096, 4, 20)),
        BinaryVariant::B => ((2, 8), (256, 2, 14)),
    };
    let fs = fields(opts, &[default])?;
    let ctx = &fs[0];
    if ctx.p() != 2 || ctx.degree() % 2 != 0 {
        return Err(Error::InvalidParameter("expected GF(2^{2j})".into()));
    }
    let half = ctx.degree() / 2;
    let q1 = opts.q1.unwrap_or(if half % 2 == 0 { 4 } else { 2 });
    let reps = trace_class_representatives(ctx, half)?;
    let rows: Vec<(Vec<String>, bool)> = reps
        .par_iter()
        .map(|(tr, delta)| -> Result<_> {
            let inst = construct_binary(ctx, variant, q1, delta, Mode::Strict)?;
            let bf = inst.f_is_n()?;
            let pred = inst.predicate.expect("binary families have a predicate");
            let row =
                vec![ctx.p().to_string(), ctx.degree().to_string(), idx(ctx, tr), idx(ctx, delta), b(pred), b(bf)];
            Ok((row, pred == bf))
        })
        .collect::<Result<_>>()?;
    t.extend(rows);
    let positives = t.rows.iter().filter(|r| r[5] == "true").count();
    let (order, ref_q1, expected) = reference;
    if ctx.order() == order && (variant == BinaryVariant::B || q1 == ref_q1) {
        t.expect_count("positive trace classes", positives, expected);
    }
    Ok(t.finish(format!("{positives} of {} trace classes positive", reps.len())))
}

fn zcriterion(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("zcriterion", &["p", "m", "d", "k", "n", "f_n", "h_n", "f_is_n", "h_is_n"]);
    let fs = fields(opts, &[(2, 2), (2, 3), (3, 2), (2, 4), (3, 3)])?;
    let per = 100 / fs.len();
    let mut rng = rng_for(opts, "zcriterion");
    for ctx in &fs {
        if ctx.degree() < 2 {
            return Err(Error::InvalidParameter("the field needs a proper subfield".into()));
        }
        let zs = (0..per).map(|_| random_zcriterion(&mut rng, ctx)).collect::<Result<Vec<_>>>()?;
        let rows: Vec<(Vec<String>, bool)> = zs
            .par_iter()
            .map(|z| -> Result<_> {
                let inst = &z.instance;
                let fr = inst.classify_f()?;
                let hr = inst.reduced.classify()?;
                let (fi, hi) = (fr.is_n_to_1(inst.n), hr.is_n_to_1(inst.n));
                let row = vec![
                    ctx.p().to_string(),
                    ctx.degree().to_string(),
                    z.d.to_string(),
                    z.k.to_string(),
                    inst.n.to_string(),
                    fr.n.to_string(),
                    hr.n.to_string(),
                    b(fi),
                    b(hi),
                ];
                Ok((row, fi == hi))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} instances")))
}

/// Everything in a report that survives relabeling of the codomain.
fn shape(r: &NTo1Report) -> (u64, bool, Option<u64>, Vec<u64>) {
    let mut counts: Vec<u64> = r.histogram.counts().values().copied().collect();
    counts.sort_unstable();
    (r.n, r.irregular, r.exception.map(|(_, c)| c), counts)
}

fn normalize(opts: &RunOptions) -> Result<TheoremReport> {
    let mut t = Tally::new("normalize", &["p", "m", "trial", "n_f", "n_affine", "n_normal"]);
    let defaults = [(5, 1), (7, 1), (2, 3), (3, 2), (2, 4), (5, 2), (3, 3), (7, 2), (2, 6), (3, 4), (5, 3), (7, 3)];
    let fs = fields(opts, &defaults)?;
    let mut rng = rng_for(opts, "normalize");
    for ctx in &fs {
        let q = ctx.order();
        let cases = (0..200)
            .map(|_| -> Result<(PolyMap, Affine)> {
                let d = rng.gen_range(1..=8u64);
                let mut terms: Vec<(u64, FFElement)> = (0..d).map(|e| (e, ctx.element(rng.gen_range(0..q)))).collect();
                terms.push((d, ctx.element(rng.gen_range(1..q))));
                let w = Affine {
                    a: ctx.element(rng.gen_range(1..q)),
                    b: ctx.element(rng.gen_range(0..q)),
                    c: ctx.element(rng.gen_range(0..q)),
                };
                Ok((PolyMap::new(ctx, terms)?, w))
            })
            .collect::<Result<Vec<_>>>()?;
        let rows: Vec<(Vec<String>, bool)> = cases
            .par_iter()
            .enumerate()
            .map(|(i, (f, w))| -> Result<_> {
                let rf = classify_poly(f)?;
                let ra = classify_poly(&f.apply_affine(w)?)?;
                let rn = classify_poly(&f.normalize()?.0)?;
                let ok = shape(&rf) == shape(&ra) && shape(&rf) == shape(&rn);
                let row = vec![
                    ctx.p().to_string(),
                    ctx.degree().to_string(),
                    i.to_string(),
                    rf.n.to_string(),
                    ra.n.to_string(),
                    rn.n.to_string(),
                ];
                Ok((row, ok))
            })
            .collect::<Result<_>>()?;
        t.extend(rows);
    }
    let n = t.rows.len();
    Ok(t.finish(format!("{n} affine pairs")))
}
