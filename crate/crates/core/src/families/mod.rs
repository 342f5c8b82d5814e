//! Generators for the explicit n-to-1 families. Each builder checks the
//! family's hypotheses, tabulates f over its domain, tabulates the reduced map
//! over its carrier, wires the commutative square, and evaluates the family's
//! closed-form condition when it has one.

mod additive;
mod cyclotomic;
mod trace_shift;

use std::sync::Arc;

use serde_json::{json, Value};

pub use additive::{
    build_l1l2l3, build_psi_family, char3_l1l2l3_corollary, char3_trace_corollary, trace_corollary, PsiParams,
};
pub use cyclotomic::{
    build_xr_hxs, construct_miu2, construct_miu3, construct_nmiu3, lift_to_extension, miu3_displayed_h,
    nmiu3_displayed_h, random_piecewise, solve_piecewise, PiecewiseSpec,
};
pub use trace_shift::{
    construct_binary, construct_gouzao, gouzao_gate, random_zcriterion, trace_class_representatives, zcriterion,
    BinaryVariant, GouzaoVariant, ZInstance,
};

use crate::agw::{check_diagram, DiagramSpec, TransferVerdict};
use crate::error::{Error, Result};
use crate::ff::FieldCtx;
use crate::nto1::{classify_fn, is_n_to_1, NTo1Report};
use crate::poly::PolyMap;

/// How builders treat a failed hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Return `HypothesisViolated`.
    #[default]
    Strict,
    /// Record a warning and build the instance anyway.
    Permissive,
}

/// Hypothesis bookkeeping shared by the builders.
#[derive(Debug, Default)]
pub(crate) struct Checks {
    mode: Mode,
    warnings: Vec<String>,
}

impl Checks {
    pub(crate) fn new(mode: Mode) -> Self {
        Checks { mode, warnings: Vec::new() }
    }

    pub(crate) fn require(&mut self, ok: bool, name: &'static str, witness: impl FnOnce() -> String) -> Result<()> {
        if ok {
            return Ok(());
        }
        let w = witness();
        match self.mode {
            Mode::Strict => Err(Error::hypothesis(name, w)),
            Mode::Permissive => {
                self.warnings.push(format!("{name}: {w}"));
                Ok(())
            }
        }
    }

    pub(crate) fn into_warnings(self) -> Vec<String> {
        self.warnings
    }
}

/// A map tabulated on an explicit carrier, values as codec indices of `ctx`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabulatedMap {
    pub ctx: Arc<FieldCtx>,
    pub domain: Vec<u64>,
    pub values: Vec<u64>,
}

impl TabulatedMap {
    pub fn classify(&self) -> Result<NTo1Report> {
        classify_fn(self.domain.len() as u64, |i| self.values[i as usize])
    }
}

#[derive(Debug, Clone)]
pub struct FamilyInstance {
    pub family: &'static str,
    pub ctx: Arc<FieldCtx>,
    /// Symbolic f, when it is cheap to write down.
    pub f: Option<PolyMap>,
    /// f over its domain (all of the field, or its nonzero elements).
    pub f_map: TabulatedMap,
    /// The reduced map on its carrier.
    pub reduced: TabulatedMap,
    pub diagram: Option<DiagramSpec>,
    /// The family's closed-form n-to-1 condition, if it states one.
    pub predicate: Option<bool>,
    pub n: u64,
    /// Hypotheses that failed in permissive mode.
    pub warnings: Vec<String>,
}

impl FamilyInstance {
    pub fn classify_f(&self) -> Result<NTo1Report> {
        self.f_map.classify()
    }

    pub fn f_is_n(&self) -> Result<bool> {
        Ok(is_n_to_1(&self.classify_f()?.histogram, self.n))
    }

    pub fn reduced_is_n(&self) -> Result<bool> {
        Ok(is_n_to_1(&self.reduced.classify()?.histogram, self.n))
    }

    /// Predicate against brute force; None when the family has no predicate.
    pub fn agrees(&self) -> Result<Option<bool>> {
        let bf = self.f_is_n()?;
        Ok(self.predicate.map(|p| p == bf))
    }

    /// Runs the square through the transfer engine.
    pub fn transfer(&self) -> Result<TransferVerdict> {
        let d = self
            .diagram
            .as_ref()
            .ok_or_else(|| Error::HypothesesNotVerified(format!("{} instance has no diagram", self.family)))?;
        check_diagram(d)
    }

    pub fn to_json(&self) -> Result<Value> {
        let report = self.classify_f()?;
        let bf = is_n_to_1(&report.histogram, self.n);
        Ok(json!({
            "family": self.family,
            "field": self.ctx.to_spec(),
            "n": self.n,
            "f": self.f.as_ref().map(PolyMap::to_literal),
            "predicate": self.predicate,
            "brute_force": bf,
            "reduced_n_to_1": self.reduced_is_n()?,
            "agree": self.predicate.map(|p| p == bf),
            "classification": report.to_json(&self.ctx),
            "warnings": self.warnings,
        }))
    }
}

/// Sorted, deduplicated codec indices of `map` over `domain`.
pub(crate) fn image_of(domain: &[u64], map: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut v: Vec<u64> = domain.iter().map(|&x| map(x)).collect();
    v.sort_unstable();
    v.dedup();
    v
}
