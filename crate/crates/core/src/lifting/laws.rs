//! Structural laws that every lift must satisfy, checked against brute force.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{multiplier_of, r_of, LiftReport};
use crate::error::Result;
use crate::poly::PolyFunc;

/// Per-cycle `r` checks look at no more than this many vertices of a cycle.
pub const R_SAMPLE_VERTICES: usize = 64;

/// Representative-independence of `r` is checked on this many vertices.
const REPRESENTATIVE_SAMPLE: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Law {
    /// Observed lift spectrum equals the predicted one.
    LiftPrediction,
    /// Every lifted cycle size is a multiple of the base cycle size.
    SizeMultiple,
    /// `lambda_bar != 0`: all `kp` lifted vertices are periodic; otherwise exactly `k` are.
    VertexAccounting,
    /// Same-size lifts keep `lambda_bar`, larger lifts have `lambda_bar = 1`.
    MultiplierTransfer,
    /// With `lambda_bar = 1`, `r` does not depend on the representative.
    RepresentativeIndependence,
    /// With `lambda_bar = 1`, `r` is zero on every vertex or on none.
    AllOrNothing,
    /// With `lambda_bar = 1`, `r != 0` and `p > 3` (or `p = 3`, `n > 1`),
    /// every lifted vertex again has `r != 0`.
    RPersistence,
    /// A tower cycle projects onto its recorded parent.
    ParentProjection,
    /// Root `lambda_bar = 0`: exactly one lifted cycle per level, of size `k`.
    ContractingChain,
    /// Root `lambda_bar != 0`: descendants cover all `k p^{n-1}` vertices.
    AllPeriodic,
    /// Root `lambda_bar = 1`, `p > 3`: once a descendant has size `kp`, its own
    /// descendants grow by a factor `p` per level.
    NeutralGrowth,
    /// Root `lambda_bar` not in {0, 1}: one size-`k` descendant per level, all
    /// others of size `k m p^j`.
    GenericStructure,
    /// Root `lambda_bar` not in {0, 1}, `p > 2`: once a descendant has size
    /// `kmp`, its own descendants grow by a factor `p` per level.
    GenericGrowth,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).unwrap();
        f.write_str(s.as_str().unwrap())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: Law,
    /// Exponent `n` of the level the offending cycle lives on.
    pub level: u32,
    /// `v_0` of the offending cycle.
    pub cycle: u64,
    pub detail: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at level {} (cycle through {}): {}",
            self.law, self.level, self.cycle, self.detail
        )
    }
}

/// All of `vertices` when short, otherwise `limit` evenly spaced ones starting at `v_0`.
pub(crate) fn sample_vertices(vertices: &[u64], limit: usize) -> Vec<u64> {
    if vertices.len() <= limit {
        return vertices.to_vec();
    }
    (0..limit)
        .map(|i| vertices[i * vertices.len() / limit])
        .collect()
}

/// Checks a verified lift against every law that concerns a single lift step.
pub fn check_lift_laws(f: &PolyFunc, report: &LiftReport) -> Result<Vec<Violation>> {
    let level = report.level;
    let (p, n, pn) = (level.prime(), level.exponent(), level.value());
    let cycle = &report.cycle;
    let k = cycle.size() as u64;
    let lambda_bar = report.prediction.multiplier.lambda_bar;
    let lifted = &report.lifted;
    let upper = lifted.modulus();
    let mut out = Vec::new();
    let mut violation = |law, level, cycle, detail: String| {
        out.push(Violation {
            law,
            level,
            cycle,
            detail,
        })
    };

    if !report.matched {
        violation(
            Law::LiftPrediction,
            n,
            cycle.first(),
            format!(
                "predicted {} ({}), observed {}",
                report.prediction.spectrum, report.prediction.case, report.observed
            ),
        );
    }

    for c in lifted.cycles() {
        if !(c.size() as u64).is_multiple_of(k) {
            violation(
                Law::SizeMultiple,
                n + 1,
                c.first(),
                format!("size {} is not a multiple of {k}", c.size()),
            );
        }
    }

    let periodic = lifted.periodic_count() as u64;
    let expected_periodic = if lambda_bar == 0 { k } else { k * p };
    if periodic != expected_periodic || report.observed.total_vertices() != expected_periodic {
        violation(
            Law::VertexAccounting,
            n,
            cycle.first(),
            format!(
                "{periodic} of {} lifted vertices periodic, expected {expected_periodic}",
                lifted.len()
            ),
        );
    }

    let df_upper = f.derivative().reduce_mod(upper.value());
    for c in lifted.cycles() {
        let child = multiplier_of(&df_upper, upper, c.vertices()).lambda_bar;
        let expected = if c.size() as u64 == k { lambda_bar } else { 1 };
        if child != expected {
            violation(
                Law::MultiplierTransfer,
                n + 1,
                c.first(),
                format!(
                    "size {} lift of a size {k} cycle has lambda_bar {child}, expected {expected}",
                    c.size()
                ),
            );
        }
    }

    if lambda_bar != 1 {
        return Ok(out);
    }

    let f_upper = f.reduce_mod(upper.value());
    let sample = sample_vertices(cycle.vertices(), R_SAMPLE_VERTICES);
    let rs: Vec<u64> = sample
        .iter()
        .map(|&v| r_of(&f_upper, level, k, v))
        .collect();
    if rs.contains(&0) && rs.iter().any(|&r| r != 0) {
        violation(
            Law::AllOrNothing,
            n,
            cycle.first(),
            format!("r on sampled vertices: {rs:?}"),
        );
    }

    for (&v, &r) in sample.iter().zip(&rs).take(REPRESENTATIVE_SAMPLE) {
        if let Some(c) = (1..p).find(|&c| r_of(&f_upper, level, k, v + c * pn) != r) {
            violation(
                Law::RepresentativeIndependence,
                n,
                cycle.first(),
                format!(
                    "r at {v} is {r} but differs for representative {}",
                    v + c * pn
                ),
            );
        }
    }

    let hypothesis = p > 3 || (p == 3 && n > 1);
    if rs[0] != 0 && hypothesis {
        let f_top = f.reduce_mod(upper.next()?.value());
        for c in lifted.cycles() {
            let kk = c.size() as u64;
            for v in sample_vertices(c.vertices(), R_SAMPLE_VERTICES) {
                if r_of(&f_top, upper, kk, v) == 0 {
                    violation(
                        Law::RPersistence,
                        n + 1,
                        c.first(),
                        format!("r = 0 at {v} although its parent has r = {}", rs[0]),
                    );
                    break;
                }
            }
        }
    }

    Ok(out)
}
