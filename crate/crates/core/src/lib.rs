//! Exact finite-field arithmetic and brute-force verification of n-to-1
//! mappings over GF(p^m).
pub mod agw;
pub mod error;
pub mod families;
pub mod ff;
pub mod linalg;
pub mod lowdeg;
pub mod nto1;
pub mod num;
pub mod poly;
pub mod theorems;
pub mod walsh;

pub use error::{Error, Result};
pub use ff::{make_field, ArithOp, FFElement, FieldCtx, FieldSpec, SubfieldEmbed};
pub use nto1::{classify_fn, classify_poly, is_n_to_1, Histogram, NTo1Report};
pub use poly::{LinearizedPoly, PolyMap};
pub use walsh::{CycloInt, PhiGadget};
