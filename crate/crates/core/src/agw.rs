//! Commutative squares
//!
//! ```text
//!   A --f--> A
//!   |lam     |lambar
//!   S --g--> Sbar
//! ```
//!
//! over enumerated finite sets, hypothesis checking, and transfer of the
//! n-to-1 property between f and g.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nto1::{classify_fn, is_n_to_1, NTo1Report};

/// Largest set accepted in a diagram.
pub const SET_LIMIT: usize = 1 << 20;

/// Maps are stored as position tables into the element lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagramSpec {
    a: Vec<u64>,
    s: Vec<u64>,
    sbar: Vec<u64>,
    f: Vec<usize>,
    g: Vec<usize>,
    lam: Vec<usize>,
    lambar: Vec<usize>,
    n: u64,
}

fn positions(set: &[u64], name: &str) -> Result<HashMap<u64, usize>> {
    if set.len() > SET_LIMIT {
        return Err(Error::SetTooLarge { size: set.len() as u64, limit: SET_LIMIT as u64 });
    }
    let mut pos = HashMap::with_capacity(set.len());
    for (i, &x) in set.iter().enumerate() {
        if pos.insert(x, i).is_some() {
            return Err(Error::InvalidParameter(format!("{name} lists {x} twice")));
        }
    }
    Ok(pos)
}

fn tabulate(
    dom: &[u64],
    cod: &HashMap<u64, usize>,
    name: &str,
    map: impl Fn(u64) -> u64 + Sync,
) -> Result<Vec<usize>> {
    dom.par_iter()
        .map(|&x| {
            let y = map(x);
            cod.get(&y)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("{name}({x}) = {y} lies outside its codomain")))
        })
        .collect()
}

impl DiagramSpec {
    /// Tabulates the four maps over the given element lists.
    #[allow(clippy::too_many_arguments)]
    pub fn from_fns(
        a: Vec<u64>,
        s: Vec<u64>,
        sbar: Vec<u64>,
        f: impl Fn(u64) -> u64 + Sync,
        g: impl Fn(u64) -> u64 + Sync,
        lam: impl Fn(u64) -> u64 + Sync,
        lambar: impl Fn(u64) -> u64 + Sync,
        n: u64,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be positive".into()));
        }
        let pa = positions(&a, "A")?;
        let ps = positions(&s, "S")?;
        let psb = positions(&sbar, "Sbar")?;
        let f = tabulate(&a, &pa, "f", f)?;
        let g = tabulate(&s, &psb, "g", g)?;
        let lam = tabulate(&a, &ps, "lam", lam)?;
        let lambar = tabulate(&a, &psb, "lambar", lambar)?;
        Ok(DiagramSpec { a, s, sbar, f, g, lam, lambar, n })
    }

    pub fn a(&self) -> &[u64] {
        &self.a
    }

    pub fn s(&self) -> &[u64] {
        &self.s
    }

    pub fn sbar(&self) -> &[u64] {
        &self.sbar
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn with_n(&self, n: u64) -> Self {
        DiagramSpec { n, ..self.clone() }
    }

    pub fn f(&self, x: u64) -> Option<u64> {
        self.lookup(&self.a, &self.a, &self.f, x)
    }

    pub fn g(&self, x: u64) -> Option<u64> {
        self.lookup(&self.s, &self.sbar, &self.g, x)
    }

    pub fn lam(&self, x: u64) -> Option<u64> {
        self.lookup(&self.a, &self.s, &self.lam, x)
    }

    pub fn lambar(&self, x: u64) -> Option<u64> {
        self.lookup(&self.a, &self.sbar, &self.lambar, x)
    }

    fn lookup(&self, dom: &[u64], cod: &[u64], table: &[usize], x: u64) -> Option<u64> {
        dom.iter().position(|&d| d == x).map(|i| cod[table[i]])
    }

    /// f as a table over A, by position.
    pub fn classify_f(&self) -> Result<NTo1Report> {
        classify_fn(self.a.len() as u64, |i| self.f[i as usize] as u64)
    }

    pub fn classify_g(&self) -> Result<NTo1Report> {
        classify_fn(self.s.len() as u64, |i| self.g[i as usize] as u64)
    }

    pub fn to_json(&self) -> DiagramJson {
        let pairs = |dom: &[u64], cod: &[u64], t: &[usize]| dom.iter().zip(t).map(|(&x, &y)| (x, cod[y])).collect();
        DiagramJson {
            a: self.a.clone(),
            s: self.s.clone(),
            sbar: self.sbar.clone(),
            f: pairs(&self.a, &self.a, &self.f),
            g: pairs(&self.s, &self.sbar, &self.g),
            lam: pairs(&self.a, &self.s, &self.lam),
            lambar: pairs(&self.a, &self.sbar, &self.lambar),
            n: self.n,
        }
    }

    pub fn from_json(j: &DiagramJson) -> Result<Self> {
        let table = |pairs: &[(u64, u64)], dom: &[u64], name: &str| -> Result<HashMap<u64, u64>> {
            let t: HashMap<u64, u64> = pairs.iter().copied().collect();
            if t.len() != pairs.len() || t.len() != dom.len() || dom.iter().any(|x| !t.contains_key(x)) {
                return Err(Error::Parse(format!("{name} must list each domain element exactly once")));
            }
            Ok(t)
        };
        let f = table(&j.f, &j.a, "f")?;
        let g = table(&j.g, &j.s, "g")?;
        let lam = table(&j.lam, &j.a, "lam")?;
        let lambar = table(&j.lambar, &j.a, "lambar")?;
        Self::from_fns(
            j.a.clone(),
            j.s.clone(),
            j.sbar.clone(),
            |x| f[&x],
            |x| g[&x],
            |x| lam[&x],
            |x| lambar[&x],
            j.n,
        )
    }
}

/// Explicit value tables, as read from and written to JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramJson {
    pub a: Vec<u64>,
    pub s: Vec<u64>,
    pub sbar: Vec<u64>,
    pub f: Vec<(u64, u64)>,
    pub g: Vec<(u64, u64)>,
    pub lam: Vec<(u64, u64)>,
    pub lambar: Vec<(u64, u64)>,
    pub n: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// #S = #Sbar > 1.
    Cardinality,
    /// #A = #S mod n.
    Congruence,
    LamSurjective,
    LambarSurjective,
    Commutation,
    FiberBijective,
}

impl Hypothesis {
    pub fn name(self) -> &'static str {
        match self {
            Hypothesis::Cardinality => "cardinality",
            Hypothesis::Congruence => "congruence",
            Hypothesis::LamSurjective => "lam-surjective",
            Hypothesis::LambarSurjective => "lambar-surjective",
            Hypothesis::Commutation => "commutation",
            Hypothesis::FiberBijective => "fiber-bijective",
        }
    }
}

/// A failed hypothesis. The witness is an element label: of A for
/// commutation, of S for fiber bijectivity and lam-surjectivity, of Sbar for
/// lambar-surjectivity; absent for the counting hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    pub witness: Option<u64>,
}

impl From<Violation> for Error {
    fn from(v: Violation) -> Error {
        Error::HypothesisViolated {
            hypothesis: v.hypothesis.name(),
            witness: v.witness.map_or_else(|| "-".into(), |w| w.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEntry {
    pub s: u64,
    /// #lam^{-1}(s)
    pub fiber: usize,
    /// #lambar^{-1}(g(s))
    pub image_fiber: usize,
    pub bijective: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberReport {
    pub entries: Vec<FiberEntry>,
}

impl FiberReport {
    pub fn all_bijective(&self) -> bool {
        self.entries.iter().all(|e| e.bijective)
    }
}

fn fibers(table: &[usize], size: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); size];
    for (x, &y) in table.iter().enumerate() {
        out[y].push(x);
    }
    out
}

/// Per-fiber bijectivity of f from lam^{-1}(s) to lambar^{-1}(g(s)), without
/// looking at the other hypotheses.
pub fn fiber_report(d: &DiagramSpec) -> FiberReport {
    let lam_f = fibers(&d.lam, d.s.len());
    let lambar_f = fibers(&d.lambar, d.sbar.len());
    let entries = (0..d.s.len())
        .into_par_iter()
        .map(|si| {
            let src = &lam_f[si];
            let tgt = &lambar_f[d.g[si]];
            let mut hit: Vec<usize> = src.iter().map(|&x| d.f[x]).collect();
            hit.sort_unstable();
            hit.dedup();
            let into = hit.iter().all(|&y| d.lambar[y] == d.g[si]);
            let bijective = into && hit.len() == src.len() && src.len() == tgt.len();
            FiberEntry { s: d.s[si], fiber: src.len(), image_fiber: tgt.len(), bijective }
        })
        .collect();
    FiberReport { entries }
}

/// Checks every hypothesis and returns the fiber report, or the first
/// violation with a witness.
pub fn verify_diagram(d: &DiagramSpec) -> std::result::Result<FiberReport, Violation> {
    let (na, ns, nsb) = (d.a.len() as u64, d.s.len(), d.sbar.len());
    if ns != nsb || ns <= 1 {
        return Err(Violation { hypothesis: Hypothesis::Cardinality, witness: None });
    }
    if na % d.n != ns as u64 % d.n {
        return Err(Violation { hypothesis: Hypothesis::Congruence, witness: None });
    }
    let lam_f = fibers(&d.lam, ns);
    if let Some(si) = lam_f.iter().position(Vec::is_empty) {
        return Err(Violation { hypothesis: Hypothesis::LamSurjective, witness: Some(d.s[si]) });
    }
    let lambar_f = fibers(&d.lambar, nsb);
    if let Some(si) = lambar_f.iter().position(Vec::is_empty) {
        return Err(Violation { hypothesis: Hypothesis::LambarSurjective, witness: Some(d.sbar[si]) });
    }
    if let Some(x) = (0..d.a.len()).into_par_iter().find_first(|&x| d.lambar[d.f[x]] != d.g[d.lam[x]]) {
        return Err(Violation { hypothesis: Hypothesis::Commutation, witness: Some(d.a[x]) });
    }
    let report = fiber_report(d);
    if let Some(e) = report.entries.iter().find(|e| !e.bijective) {
        return Err(Violation { hypothesis: Hypothesis::FiberBijective, witness: Some(e.s) });
    }
    Ok(report)
}

/// Outcome of [`transfer`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransferVerdict {
    pub f_report: NTo1Report,
    pub g_report: NTo1Report,
    /// f is n-to-1 over A.
    pub f_is_n: bool,
    /// g is n-to-1 from S to Sbar.
    pub g_is_n: bool,
    /// n | #S, or g's exceptional value s0 has a singleton lambar-fiber.
    pub condition3: bool,
    /// (1) => (2).
    pub forward_holds: bool,
    /// (2) and (3) => (1); vacuously true when (2) or (3) fails.
    pub backward_holds: bool,
}

impl TransferVerdict {
    pub fn backward_applies(&self) -> bool {
        self.g_is_n && self.condition3
    }

    /// f and g agree on being n-to-1.
    pub fn equivalent(&self) -> bool {
        self.f_is_n == self.g_is_n
    }
}

/// The exceptional value of g with its count, when exactly one value has a
/// count other than n. None for n | #S or when the exception is ambiguous.
fn locate_exception(g: &NTo1Report, n: u64) -> Option<(u64, u64)> {
    let mut off = g.histogram.counts().iter().filter(|(_, &c)| c != n);
    match (off.next(), off.next()) {
        (Some((&v, &c)), None) => Some((v, c)),
        _ => None,
    }
}

/// Classifies f and g and evaluates both implications. `report` must come
/// from a successful [`verify_diagram`] on `d`.
pub fn transfer(d: &DiagramSpec, report: &FiberReport) -> Result<TransferVerdict> {
    if report.entries.len() != d.s.len() || !report.all_bijective() {
        return Err(Error::HypothesesNotVerified("fiber report does not certify this diagram".into()));
    }
    let n = d.n;
    let f_report = d.classify_f()?;
    let g_report = d.classify_g()?;
    let f_is_n = is_n_to_1(&f_report.histogram, n);
    let g_is_n = is_n_to_1(&g_report.histogram, n);
    let ns = d.s.len() as u64;
    let t = d.a.len() as u64 % n;
    let condition3 = ns % n == 0
        || match locate_exception(&g_report, n) {
            Some((s0, c)) if c == t => d.lambar.iter().filter(|&&y| y as u64 == s0).count() == 1,
            _ => false,
        };
    let forward_holds = !f_is_n || g_is_n;
    let backward_holds = !(g_is_n && condition3) || f_is_n;
    Ok(TransferVerdict { f_report, g_report, f_is_n, g_is_n, condition3, forward_holds, backward_holds })
}

/// Verifies and transfers in one step.
pub fn check_diagram(d: &DiagramSpec) -> Result<TransferVerdict> {
    let report = verify_diagram(d).map_err(Error::from)?;
    transfer(d, &report)
}

/// A random diagram satisfying every hypothesis, with #A <= `max_a`.
///
/// Half the draws make g n-to-1 on purpose. Fiber sizes over Sbar are chosen
/// so that sum_s k(g(s)) = sum_sbar k(sbar), which lets lam and lambar
/// partition the same A.
pub fn random_diagram<R: Rng>(rng: &mut R, max_a: usize) -> DiagramSpec {
    assert!(max_a >= 4);
    loop {
        let ns = rng.gen_range(2..=10.min(max_a / 2));
        let n = rng.gen_range(1..=4u64);
        let g: Vec<usize> = if rng.gen_bool(0.5) {
            let mut targets: Vec<usize> = (0..ns).collect();
            targets.shuffle(rng);
            let mut g = Vec::with_capacity(ns);
            for (block, &t) in targets.iter().enumerate() {
                let take = (n as usize).min(ns - g.len());
                g.extend(std::iter::repeat(t).take(take));
                if g.len() == ns || block + 1 == targets.len() {
                    break;
                }
            }
            g.shuffle(rng);
            g
        } else {
            (0..ns).map(|_| rng.gen_range(0..ns)).collect()
        };
        let mut hits = vec![0usize; ns];
        for &y in &g {
            hits[y] += 1;
        }
        let mut k = vec![0usize; ns];
        let mut need = 0usize;
        for (y, &h) in hits.iter().enumerate() {
            if h > 0 {
                k[y] = rng.gen_range(1..=3);
                need += (h - 1) * k[y];
            }
        }
        let unhit: Vec<usize> = (0..ns).filter(|&y| hits[y] == 0).collect();
        for &y in &unhit {
            k[y] = 1;
        }
        for _ in unhit.len()..need {
            k[*unhit.choose(rng).expect("need > 0 implies unhit values")] += 1;
        }
        let na: usize = k.iter().sum();
        if na > max_a || (na as u64) % n != (ns as u64) % n {
            continue;
        }
        let mut slots: Vec<usize> = (0..na).collect();
        slots.shuffle(rng);
        let mut lambar = vec![0usize; na];
        let mut lambar_f = vec![Vec::new(); ns];
        let mut it = slots.iter();
        for y in 0..ns {
            for _ in 0..k[y] {
                let &x = it.next().expect("sizes sum to na");
                lambar[x] = y;
                lambar_f[y].push(x);
            }
        }
        slots.shuffle(rng);
        let mut lam = vec![0usize; na];
        let mut f = vec![0usize; na];
        let mut it = slots.iter();
        for (s, &y) in g.iter().enumerate() {
            let mut tgt = lambar_f[y].clone();
            tgt.shuffle(rng);
            for t in tgt {
                let &x = it.next().expect("sizes sum to na");
                lam[x] = s;
                f[x] = t;
            }
        }
        let label = |len: usize| (0..len as u64).collect::<Vec<_>>();
        return DiagramSpec { a: label(na), s: label(ns), sbar: label(ns), f, g, lam, lambar, n };
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::{make_field, SubfieldEmbed};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn trace_diagram(fsrc: &str, n: u64) -> DiagramSpec {
        let big = make_field(3, 2, None).unwrap();
        let e = SubfieldEmbed::new(&big, 1).unwrap();
        let sub = e.sub().clone();
        let f = crate::poly::parse_poly(&big, fsrc).unwrap();
        let tr = |x: u64| sub.index(&e.trace(&big.element(x)).unwrap());
        // g(s) = tr(f(x)) for any x over s; well defined for these f
        let g = |s: u64| {
            let x = big.elements().find(|x| e.trace(x).unwrap() == sub.element(s)).unwrap();
            tr(big.index(&f.eval(&x)))
        };
        DiagramSpec::from_fns(
            (0..9).collect(),
            (0..3).collect(),
            (0..3).collect(),
            |x| big.index(&f.eval(&big.element(x))),
            g,
            tr,
            tr,
            n,
        )
        .unwrap()
    }

    #[test]
    fn frobenius_over_trace_is_bijective_per_fiber() {
        let d = trace_diagram("x^3", 1);
        let r = verify_diagram(&d).unwrap();
        assert!(r.entries.iter().all(|e| e.fiber == 3 && e.image_fiber == 3));
        let v = transfer(&d, &r).unwrap();
        assert!(v.f_is_n && v.g_is_n && v.forward_holds && v.backward_holds);
        // x^3 is a permutation, so it is not 3-to-1 and neither is g = x
        let v3 = check_diagram(&d.with_n(3)).unwrap();
        assert!(!v3.f_is_n && !v3.g_is_n);
    }

    #[test]
    fn constant_lam_violates_surjectivity() {
        let d = DiagramSpec::from_fns(
            (0..4).collect(),
            vec![0, 1],
            vec![0, 1],
            |x| x,
            |s| s,
            |_| 0,
            |x| x % 2,
            1,
        )
        .unwrap();
        assert_eq!(verify_diagram(&d).unwrap_err(), Violation { hypothesis: Hypothesis::LamSurjective, witness: Some(1) });
    }

    #[test]
    fn identity_square_passes() {
        let d = DiagramSpec::from_fns(
            (0..12).collect(),
            (0..4).collect(),
            (0..4).collect(),
            |x| x,
            |s| s,
            |x| x % 4,
            |x| x % 4,
            1,
        )
        .unwrap();
        let v = check_diagram(&d).unwrap();
        assert!(v.f_is_n && v.g_is_n && v.condition3);
    }

    #[test]
    fn commutation_witness() {
        let d = DiagramSpec::from_fns(
            (0..4).collect(),
            vec![0, 1],
            vec![0, 1],
            |x| (x + 1) % 4,
            |s| s,
            |x| x % 2,
            |x| x % 2,
            1,
        )
        .unwrap();
        let v = verify_diagram(&d).unwrap_err();
        assert_eq!(v.hypothesis, Hypothesis::Commutation);
        let x = v.witness.unwrap();
        assert_ne!(d.lambar(d.f(x).unwrap()), d.g(d.lam(x).unwrap()));
    }

    #[test]
    fn json_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = random_diagram(&mut rng, 40);
        let j = serde_json::to_string(&d.to_json()).unwrap();
        let back = DiagramSpec::from_json(&serde_json::from_str(&j).unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn random_diagrams_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let d = random_diagram(&mut rng, 100);
            assert!(d.a().len() <= 100);
            let v = check_diagram(&d).unwrap();
            assert!(v.forward_holds);
            assert!(v.backward_holds);
        }
    }
}
