//! Exact computation of functional graphs `G(f, Z/mZ)` for integer polynomials `f`,
//! together with the machinery for predicting how the cycles of `G(f, Z/p^nZ)`
//! lift to `G(f, Z/p^{n+1}Z)`.
//!
//! Every prediction made by [`lifting`] has a brute-force counterpart, so the
//! crate can check its own answers against exhaustive enumeration.

pub mod crt;
pub mod error;
pub mod graph;
pub mod lifting;
pub mod limits;
pub mod poly;
pub mod residue;

pub use crate::crt::{check_crt_isomorphism, crt_map, lcm_cycle_check, CrtMap, LcmRow};
pub use crate::error::{Error, Result};
pub use crate::graph::{build_graph, Cycle, FunctionalGraph, LiftedGraph, ProductGraph};
pub use crate::lifting::{
    multiplier, predict_lift, r_value, tower, verify_lift, LiftCase, LiftPrediction, LiftReport,
    MultiplierData, Spectrum, TowerReport,
};
pub use crate::limits::Limits;
pub use crate::poly::PolyFunc;
pub use crate::residue::{make_modulus, mult_order, reduce, Modulus, PrimePower, Residue};
