//! Cycle structure along the tower `G(f, Z/pZ) <- G(f, Z/p^2Z) <- ... <- G(f, Z/p^NZ)`.
//!
//! Every cycle at level `n > 1` projects onto a unique parent cycle at level
//! `n - 1`, and ultimately onto a root cycle at level 1. The report records
//! `(size, lambda_bar, r)` for every cycle and checks each transition and each
//! root's family of descendants against the lifting rules.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::laws::{sample_vertices, Law, Violation, R_SAMPLE_VERTICES};
use super::{multiplier_of, predict_from, r_of, LiftCase, MultiplierData, Spectrum};
use crate::error::{Error, Result};
use crate::graph::{build_graph_with_limits, cycle_reached_from, FunctionalGraph};
use crate::limits::Limits;
use crate::poly::PolyFunc;
use crate::residue::PrimePower;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerCycle {
    /// Position in the level's `(size, v_0)` ordering.
    pub id: usize,
    pub v0: u64,
    pub size: u64,
    pub lambda: u64,
    pub lambda_bar: u64,
    pub order: Option<u64>,
    /// `r` at `v_0`.
    pub r: u64,
    /// `r` at every vertex, in cycle order, for cycles of at most 64 vertices.
    pub r_vertices: Option<Vec<u64>>,
    pub parent: Option<usize>,
    /// Id of the level-1 ancestor.
    pub root: usize,
    /// Predicted shape of this cycle's lift into the next level.
    pub case: LiftCase,
    /// The `r` persistence hypothesis fails for the lift out of this cycle.
    pub edge_regime: bool,
}

impl TowerCycle {
    fn multiplier(&self) -> MultiplierData {
        MultiplierData {
            lambda: self.lambda,
            lambda_bar: self.lambda_bar,
            order: self.order,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerLevel {
    pub level: u32,
    pub modulus: u64,
    pub cycles: Vec<TowerCycle>,
}

/// Predicted against observed lift of one cycle into the next level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transition {
    /// Level of the parent cycle.
    pub level: u32,
    pub parent: usize,
    pub size: u64,
    pub case: LiftCase,
    pub lambda_bar: u64,
    pub order: Option<u64>,
    pub r: Option<u64>,
    pub predicted: Spectrum,
    pub observed: Spectrum,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootClass {
    LambdaZero,
    LambdaOne,
    Generic,
}

/// A level-1 cycle and what happened to its descendants.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootSummary {
    pub id: usize,
    pub size: u64,
    pub lambda_bar: u64,
    pub order: Option<u64>,
    pub class: RootClass,
    /// First level with a descendant larger than the root.
    pub growth_level: Option<u32>,
    /// For generic roots, the exponents `j` seen in descendant sizes `k m p^j`.
    pub generic_exponents: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TowerReport {
    pub poly: Value,
    pub prime: u64,
    pub depth: u32,
    /// `p = 2`, or `p = 3` with a lift out of level 1: the growth of
    /// `lambda_bar = 1` chains is recorded but not asserted.
    pub edge_regime: bool,
    pub levels: Vec<TowerLevel>,
    pub transitions: Vec<Transition>,
    pub roots: Vec<RootSummary>,
    pub violations: Vec<Violation>,
}

impl TowerReport {
    pub fn is_consistent(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn level(&self, n: u32) -> Option<&TowerLevel> {
        self.levels.get(n.checked_sub(1)? as usize)
    }

    pub fn cycle_with_v0(&self, n: u32, v0: u64) -> Option<&TowerCycle> {
        self.level(n)?.cycles.iter().find(|c| c.v0 == v0)
    }

    /// The cycle at level `n` that `v` eventually reaches under `f`.
    pub fn cycle_reached_from(&self, f: &PolyFunc, n: u32, v: u64) -> Option<&TowerCycle> {
        let modulus = self.level(n)?.modulus;
        self.cycle_with_v0(n, cycle_reached_from(f, modulus, v % modulus).first())
    }
}

/// Tower for `N = depth` levels under the default vertex limit.
pub fn tower(f: &PolyFunc, p: u64, depth: u32) -> Result<TowerReport> {
    tower_with_limits(f, p, depth, &Limits::default())
}

pub fn tower_with_limits(f: &PolyFunc, p: u64, depth: u32, limits: &Limits) -> Result<TowerReport> {
    if depth == 0 {
        return Err(Error::domain("a tower needs at least one level"));
    }
    let top = PrimePower::new(p, depth)?;
    limits.check_vertices(top.value())?;
    top.next()?;

    let df = f.derivative();
    let mut levels: Vec<TowerLevel> = Vec::with_capacity(depth as usize);
    let mut transitions = Vec::new();
    let mut violations = Vec::new();
    let mut prev_graph: Option<FunctionalGraph> = None;

    for n in 1..=depth {
        let level = PrimePower::new(p, n)?;
        let graph = build_graph_with_limits(f, &level.modulus(), limits)?;
        let df_mod = df.reduce_mod(level.value());
        let f_upper = f.reduce_mod(level.next()?.value());
        let mut cycles = Vec::with_capacity(graph.cycles().len());

        for (id, c) in graph.cycles().iter().enumerate() {
            let k = c.size() as u64;
            let multiplier = multiplier_of(&df_mod, level, c.vertices());
            let r = r_of(&f_upper, level, k, c.first());
            let r_vertices = (c.size() <= R_SAMPLE_VERTICES).then(|| {
                c.vertices()
                    .iter()
                    .map(|&v| r_of(&f_upper, level, k, v))
                    .collect::<Vec<_>>()
            });

            let (parent, root) = match (&prev_graph, levels.last()) {
                (Some(lower), Some(prev)) => {
                    let m = lower.len() as u64;
                    let pid = lower.cycle_index_of(c.first() % m);
                    let off = c.vertices().iter().find(|&&v| {
                        !lower.is_periodic(v % m) || lower.cycle_index_of(v % m) != pid
                    });
                    if let Some(v) = off {
                        violations.push(Violation {
                            law: Law::ParentProjection,
                            level: n,
                            cycle: c.first(),
                            detail: format!("vertex {v} does not project onto parent cycle {pid}"),
                        });
                    }
                    (Some(pid), prev.cycles[pid].root)
                }
                _ => (None, id),
            };

            if multiplier.lambda_bar == 1 {
                let sampled;
                let rs = match &r_vertices {
                    Some(rs) => rs,
                    None => {
                        sampled = sample_vertices(c.vertices(), R_SAMPLE_VERTICES)
                            .into_iter()
                            .map(|v| r_of(&f_upper, level, k, v))
                            .collect::<Vec<_>>();
                        &sampled
                    }
                };
                if rs.contains(&0) && rs.iter().any(|&x| x != 0) {
                    violations.push(Violation {
                        law: Law::AllOrNothing,
                        level: n,
                        cycle: c.first(),
                        detail: format!("r per vertex: {rs:?}"),
                    });
                }
                let pn = level.value();
                if let Some(j) = (1..p).find(|&j| r_of(&f_upper, level, k, c.first() + j * pn) != r)
                {
                    violations.push(Violation {
                        law: Law::RepresentativeIndependence,
                        level: n,
                        cycle: c.first(),
                        detail: format!(
                            "r = {r} at {} but not at {}",
                            c.first(),
                            c.first() + j * pn
                        ),
                    });
                }
            }

            cycles.push(TowerCycle {
                id,
                v0: c.first(),
                size: k,
                lambda: multiplier.lambda,
                lambda_bar: multiplier.lambda_bar,
                order: multiplier.order,
                r,
                r_vertices,
                parent,
                root,
                case: predict_from(k, p, multiplier, || r).case,
                edge_regime: p == 2 || (p == 3 && n == 1),
            });
        }

        if let Some(prev) = levels.last() {
            check_transition(p, prev, &cycles, &mut transitions, &mut violations);
        }
        levels.push(TowerLevel {
            level: n,
            modulus: level.value(),
            cycles,
        });
        prev_graph = Some(graph);
    }

    let roots = check_roots(p, &levels, &mut violations);
    let mut report = TowerReport {
        poly: f.to_json(),
        prime: p,
        depth,
        edge_regime: p == 2 || (p == 3 && depth >= 2),
        levels,
        transitions,
        roots,
        violations,
    };
    report.violations.sort_by_key(|v| (v.level, v.cycle));
    Ok(report)
}

fn check_transition(
    p: u64,
    prev: &TowerLevel,
    cycles: &[TowerCycle],
    transitions: &mut Vec<Transition>,
    violations: &mut Vec<Violation>,
) {
    let n = prev.level;
    let mut children: Vec<Vec<&TowerCycle>> = vec![Vec::new(); prev.cycles.len()];
    for c in cycles {
        if let Some(pid) = c.parent {
            children[pid].push(c);
        }
    }
    for (parent, kids) in prev.cycles.iter().zip(&children) {
        let k = parent.size;
        let prediction = predict_from(k, p, parent.multiplier(), || parent.r);
        let observed = Spectrum::from_sizes(kids.iter().map(|c| c.size));
        let matched = observed == prediction.spectrum;
        let mut violation = |law, level, cycle, detail: String| {
            violations.push(Violation {
                law,
                level,
                cycle,
                detail,
            })
        };
        if !matched {
            violation(
                Law::LiftPrediction,
                n,
                parent.v0,
                format!(
                    "predicted {} ({}), observed {observed}",
                    prediction.spectrum, prediction.case
                ),
            );
        }
        if parent.lambda_bar != 0 && observed.total_vertices() != k * p {
            violation(
                Law::VertexAccounting,
                n,
                parent.v0,
                format!(
                    "lifted cycles cover {} vertices, expected {}",
                    observed.total_vertices(),
                    k * p
                ),
            );
        }
        let persistence = parent.lambda_bar == 1 && parent.r != 0 && (p > 3 || (p == 3 && n > 1));
        for child in kids {
            if child.size % k != 0 {
                violation(
                    Law::SizeMultiple,
                    n + 1,
                    child.v0,
                    format!("size {} over a size {k} parent", child.size),
                );
            }
            let expected = if child.size == k {
                parent.lambda_bar
            } else {
                1
            };
            if child.lambda_bar != expected {
                violation(
                    Law::MultiplierTransfer,
                    n + 1,
                    child.v0,
                    format!(
                        "lambda_bar {} over parent lambda_bar {}, expected {expected}",
                        child.lambda_bar, parent.lambda_bar
                    ),
                );
            }
            let zero_r =
                child.r == 0 || child.r_vertices.as_ref().is_some_and(|rs| rs.contains(&0));
            if persistence && zero_r {
                violation(
                    Law::RPersistence,
                    n + 1,
                    child.v0,
                    format!("r vanished below a parent with r = {}", parent.r),
                );
            }
        }
        transitions.push(Transition {
            level: n,
            parent: parent.id,
            size: k,
            case: prediction.case,
            lambda_bar: parent.lambda_bar,
            order: parent.order,
            r: prediction.r,
            predicted: prediction.spectrum,
            observed,
            matched,
        });
    }
}

/// `Some(j)` when `x = p^j`.
fn log_exact(mut x: u64, p: u64) -> Option<u32> {
    let mut j = 0;
    while x > 1 {
        if !x.is_multiple_of(p) {
            return None;
        }
        x /= p;
        j += 1;
    }
    (x == 1).then_some(j)
}

fn check_roots(p: u64, levels: &[TowerLevel], violations: &mut Vec<Violation>) -> Vec<RootSummary> {
    let mut summaries: Vec<RootSummary> = levels[0]
        .cycles
        .iter()
        .map(|c| RootSummary {
            id: c.id,
            size: c.size,
            lambda_bar: c.lambda_bar,
            order: c.order,
            class: match c.lambda_bar {
                0 => RootClass::LambdaZero,
                1 => RootClass::LambdaOne,
                _ => RootClass::Generic,
            },
            growth_level: None,
            generic_exponents: Vec::new(),
        })
        .collect();

    // Per-level anchor: the earliest ancestor-or-self whose size starts a
    // geometric run, as (anchor level, anchor size).
    let mut anchors: Vec<Option<(u32, u64)>> = vec![None; levels[0].cycles.len()];

    for lvl in &levels[1..] {
        let n = lvl.level;
        let mut count = vec![0usize; summaries.len()];
        let mut total = vec![0u64; summaries.len()];
        let mut size_k = vec![0usize; summaries.len()];
        let mut next_anchors = Vec::with_capacity(lvl.cycles.len());

        for c in &lvl.cycles {
            let root = &mut summaries[c.root];
            let k = root.size;
            count[c.root] += 1;
            total[c.root] += c.size;
            if c.size == k {
                size_k[c.root] += 1;
            } else if root.growth_level.is_none() {
                root.growth_level = Some(n);
            }

            // Sizes that start a run: kp for lambda_bar = 1 with p > 3, kmp for
            // generic roots with p > 2.
            let run_start = match (root.class, root.order) {
                (RootClass::LambdaOne, _) if p > 3 => Some((k * p, Law::NeutralGrowth)),
                (RootClass::Generic, Some(m)) if p > 2 => Some((k * m * p, Law::GenericGrowth)),
                _ => None,
            };
            let inherited = c.parent.and_then(|pid| anchors[pid]);
            let anchor = match (inherited, run_start) {
                (Some(a), _) => Some(a),
                (None, Some((start, _))) if c.size == start => Some((n, start)),
                _ => None,
            };
            if let (Some((at, base)), Some((_, law))) = (anchor, run_start) {
                let expected = base * p.pow(n - at);
                if c.size != expected {
                    violations.push(Violation {
                        law,
                        level: n,
                        cycle: c.v0,
                        detail: format!(
                            "size {} but a size {base} ancestor at level {at} forces {expected}",
                            c.size
                        ),
                    });
                }
            }
            next_anchors.push(anchor);

            if let (RootClass::Generic, Some(m)) = (root.class, root.order) {
                if c.size != k {
                    match (c.size % (k * m) == 0)
                        .then(|| log_exact(c.size / (k * m), p))
                        .flatten()
                    {
                        Some(j) => {
                            if !root.generic_exponents.contains(&j) {
                                root.generic_exponents.push(j);
                            }
                        }
                        None => violations.push(Violation {
                            law: Law::GenericStructure,
                            level: n,
                            cycle: c.v0,
                            detail: format!("size {} is not k m p^j with k = {k}, m = {m}", c.size),
                        }),
                    }
                }
            }
        }

        for (id, root) in summaries.iter().enumerate() {
            let k = root.size;
            let v0 = levels[0].cycles[id].v0;
            let mut violation = |law, detail: String| {
                violations.push(Violation {
                    law,
                    level: n,
                    cycle: v0,
                    detail,
                })
            };
            match root.class {
                RootClass::LambdaZero => {
                    if count[id] != 1 || size_k[id] != 1 {
                        violation(
                            Law::ContractingChain,
                            format!("{} lifted cycles ({} of size {k}), expected exactly one of size {k}", count[id], size_k[id]),
                        );
                    }
                }
                RootClass::LambdaOne | RootClass::Generic => {
                    let expected = k * p.pow(n - 1);
                    if total[id] != expected {
                        violation(
                            Law::AllPeriodic,
                            format!(
                                "descendants cover {} vertices, expected {expected}",
                                total[id]
                            ),
                        );
                    }
                    if root.class == RootClass::Generic && size_k[id] != 1 {
                        violation(
                            Law::GenericStructure,
                            format!(
                                "{} descendants of size {k}, expected exactly one",
                                size_k[id]
                            ),
                        );
                    }
                }
            }
        }
        anchors = next_anchors;
    }

    for s in &mut summaries {
        s.generic_exponents.sort_unstable();
    }
    summaries
}
