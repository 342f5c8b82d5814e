//! Shared fixtures for the criterion benches.

use std::sync::Arc;

use nto1_core::{make_field, FieldCtx, PolyMap};

pub fn field(p: u64, m: usize) -> Arc<FieldCtx> {
    make_field(p, m, None).expect("bench fields are valid")
}

/// (x^27 - x + beta^5)^162 + x over GF(3^6).
pub fn gouzao_shape() -> PolyMap {
    let f = field(3, 6);
    let inner = PolyMap::new(&f, [(27, f.one()), (1, f.scalar(-1)), (0, f.beta_pow(5))]).expect("same field");
    inner.pow(162).expect("digit-sum bounded").add(&PolyMap::x(&f))
}
