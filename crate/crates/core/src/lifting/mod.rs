//! How a cycle of `G(f, Z/p^nZ)` lifts to `G(f, Z/p^{n+1}Z)`.
//!
//! A cycle `C` of size `k` has multiplier `lambda(C) = prod_{v in C} f'(v)`,
//! whose image `lambda_bar` in `Z/pZ` decides the shape of its lift:
//!
//! * `lambda_bar = 0`: one cycle of size `k`, the rest of the lifted graph is tails;
//! * `lambda_bar = 1`: `p` cycles of size `k` when `r = 0`, one cycle of size `kp`
//!   otherwise, where `r` is read off `f^k(a) = a + r p^n (mod p^{n+1})`;
//! * otherwise: one cycle of size `k` and `(p - 1) / m` cycles of size `mk`, with
//!   `m` the multiplicative order of `lambda_bar`.
//!
//! [`predict_lift`] applies these rules; [`verify_lift`] enumerates the lifted
//! graph and compares.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{lifted_subgraph_with_limits, validate_cycle, Cycle, LiftedGraph};
use crate::limits::Limits;
use crate::poly::{ModPoly, PolyFunc};
use crate::residue::{mul_mod, mult_order, sub_mod, PrimePower, Residue};

pub mod laws;
pub mod tower;
pub mod trials;

pub use self::laws::{check_lift_laws, Law, Violation};
pub use self::tower::{tower, tower_with_limits, TowerReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiplierData {
    /// `prod f'(v)` reduced modulo `p^n`.
    pub lambda: u64,
    /// `lambda` reduced modulo `p`.
    pub lambda_bar: u64,
    /// Multiplicative order of `lambda_bar`; absent when `lambda_bar = 0`.
    pub order: Option<u64>,
}

pub fn multiplier(f: &PolyFunc, level: PrimePower, cycle: &Cycle) -> Result<MultiplierData> {
    validate_cycle(f, level, cycle)?;
    let df = f.derivative().reduce_mod(level.value());
    Ok(multiplier_of(&df, level, cycle.vertices()))
}

/// `df` must be `f'` reduced modulo `p^n`.
pub(crate) fn multiplier_of(df: &ModPoly, level: PrimePower, vertices: &[u64]) -> MultiplierData {
    let pn = level.value();
    let lambda = vertices
        .iter()
        .fold(1 % pn, |acc, &v| mul_mod(acc, df.eval(v), pn));
    let p = level.prime();
    let lambda_bar = lambda % p;
    let order = (lambda_bar != 0).then(|| {
        mult_order(Residue::new_unchecked(lambda_bar, p)).expect("nonzero residue mod a prime")
    });
    MultiplierData {
        lambda,
        lambda_bar,
        order,
    }
}

/// `r` for an arbitrary representative `a` of a cycle vertex: the digit with
/// `f^k(a) = a + r p^n (mod p^{n+1})`. `upper` must be `f` reduced modulo `p^{n+1}`.
pub(crate) fn r_of(upper: &ModPoly, level: PrimePower, k: u64, a: u64) -> u64 {
    let m = upper.modulus();
    let a = a % m;
    let diff = sub_mod(upper.iterate(a, k), a, m);
    debug_assert_eq!(diff % level.value(), 0, "f^k fixes the vertex modulo p^n");
    diff / level.value()
}

/// `r_v` computed with the canonical representative `a_v = v` in `[0, p^n)`.
pub fn r_value(f: &PolyFunc, level: PrimePower, cycle: &Cycle, v: u64) -> Result<u64> {
    r_value_with_representative(f, level, cycle, v)
}

/// `r` computed with any integer `a` congruent to a vertex of `cycle` modulo `p^n`.
pub fn r_value_with_representative(
    f: &PolyFunc,
    level: PrimePower,
    cycle: &Cycle,
    a: u64,
) -> Result<u64> {
    validate_cycle(f, level, cycle)?;
    if !cycle.contains(a % level.value()) {
        return Err(Error::domain(format!(
            "{a} does not represent a vertex of the cycle"
        )));
    }
    let upper = f.reduce_mod(level.next()?.value());
    Ok(r_of(&upper, level, cycle.size() as u64, a))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LiftCase {
    LambdaZero,
    #[serde(rename = "LambdaOne_rZero")]
    LambdaOneRZero,
    #[serde(rename = "LambdaOne_rNonzero")]
    LambdaOneRNonzero,
    Generic,
}

impl fmt::Display for LiftCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LiftCase::LambdaZero => "LambdaZero",
            LiftCase::LambdaOneRZero => "LambdaOne_rZero",
            LiftCase::LambdaOneRNonzero => "LambdaOne_rNonzero",
            LiftCase::Generic => "Generic",
        })
    }
}

/// A multiset of cycle sizes, stored as `(size, count)` sorted by size.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Spectrum(Vec<(u64, u64)>);

impl Spectrum {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut all: Vec<(u64, u64)> = pairs.into_iter().filter(|&(_, c)| c > 0).collect();
        all.sort_unstable();
        let mut merged: Vec<(u64, u64)> = Vec::with_capacity(all.len());
        for (size, count) in all {
            match merged.last_mut() {
                Some(last) if last.0 == size => last.1 += count,
                _ => merged.push((size, count)),
            }
        }
        Spectrum(merged)
    }

    pub fn from_sizes(sizes: impl IntoIterator<Item = u64>) -> Self {
        Spectrum::from_pairs(sizes.into_iter().map(|s| (s, 1)))
    }

    pub fn pairs(&self) -> &[(u64, u64)] {
        &self.0
    }

    /// `sum size * count`: the number of periodic vertices described.
    pub fn total_vertices(&self) -> u64 {
        self.0.iter().map(|&(s, c)| s * c).sum()
    }

    pub fn cycle_count(&self) -> u64 {
        self.0.iter().map(|&(_, c)| c).sum()
    }
}

impl fmt::Display for Spectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(s, c)| format!("{c}x{s}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftPrediction {
    pub case: LiftCase,
    pub multiplier: MultiplierData,
    /// `r` at `v_0`, present when `lambda_bar = 1`.
    pub r: Option<u64>,
    pub spectrum: Spectrum,
}

/// The lift rules applied to precomputed invariants. `r_at_v0` is consulted
/// only when `lambda_bar = 1`.
pub(crate) fn predict_from(
    k: u64,
    p: u64,
    multiplier: MultiplierData,
    r_at_v0: impl FnOnce() -> u64,
) -> LiftPrediction {
    let (case, r, spectrum) = match (multiplier.lambda_bar, multiplier.order) {
        (0, _) => (LiftCase::LambdaZero, None, Spectrum::from_pairs([(k, 1)])),
        (1, _) => match r_at_v0() {
            0 => (
                LiftCase::LambdaOneRZero,
                Some(0),
                Spectrum::from_pairs([(k, p)]),
            ),
            r => (
                LiftCase::LambdaOneRNonzero,
                Some(r),
                Spectrum::from_pairs([(k * p, 1)]),
            ),
        },
        (_, Some(m)) => (
            LiftCase::Generic,
            None,
            Spectrum::from_pairs([(k, 1), (m * k, (p - 1) / m)]),
        ),
        (_, None) => unreachable!("nonzero multiplier without an order"),
    };
    LiftPrediction {
        case,
        multiplier,
        r,
        spectrum,
    }
}

pub fn predict_lift(f: &PolyFunc, level: PrimePower, cycle: &Cycle) -> Result<LiftPrediction> {
    let multiplier = multiplier(f, level, cycle)?;
    let upper = f.reduce_mod(level.next()?.value());
    let k = cycle.size() as u64;
    Ok(predict_from(k, level.prime(), multiplier, || {
        r_of(&upper, level, k, cycle.first())
    }))
}

/// A prediction next to what brute-force enumeration of the lifted graph found.
#[derive(Debug, Clone)]
pub struct LiftReport {
    pub level: PrimePower,
    pub cycle: Cycle,
    pub prediction: LiftPrediction,
    pub observed: Spectrum,
    pub matched: bool,
    pub lifted: LiftedGraph,
}

pub fn verify_lift(f: &PolyFunc, level: PrimePower, cycle: &Cycle) -> Result<LiftReport> {
    verify_lift_with_limits(f, level, cycle, &Limits::default())
}

pub fn verify_lift_with_limits(
    f: &PolyFunc,
    level: PrimePower,
    cycle: &Cycle,
    limits: &Limits,
) -> Result<LiftReport> {
    let lifted = lifted_subgraph_with_limits(f, level, cycle, limits)?;
    let prediction = predict_lift(f, level, cycle)?;
    let observed = Spectrum::from_sizes(lifted.cycles().iter().map(|c| c.size() as u64));
    let matched = observed == prediction.spectrum;
    Ok(LiftReport {
        level,
        cycle: cycle.clone(),
        prediction,
        observed,
        matched,
        lifted,
    })
}

/// The JSON shape shared by `lift` output and tower transitions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftRecord {
    pub modulus: u64,
    pub cycle: Vec<u64>,
    pub case: LiftCase,
    pub lambda_bar: u64,
    pub order: Option<u64>,
    pub r: Option<u64>,
    pub predicted: Spectrum,
    pub observed: Option<Spectrum>,
    #[serde(rename = "match")]
    pub matched: Option<bool>,
}

impl LiftRecord {
    pub fn predicted_only(level: PrimePower, cycle: &Cycle, prediction: &LiftPrediction) -> Self {
        LiftRecord {
            modulus: level.value(),
            cycle: cycle.vertices().to_vec(),
            case: prediction.case,
            lambda_bar: prediction.multiplier.lambda_bar,
            order: prediction.multiplier.order,
            r: prediction.r,
            predicted: prediction.spectrum.clone(),
            observed: None,
            matched: None,
        }
    }
}

impl From<&LiftReport> for LiftRecord {
    fn from(report: &LiftReport) -> Self {
        LiftRecord {
            observed: Some(report.observed.clone()),
            matched: Some(report.matched),
            ..LiftRecord::predicted_only(report.level, &report.cycle, &report.prediction)
        }
    }
}
