//! Seeded randomized runs of the lift oracle and the tower checks.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

use super::laws::{check_lift_laws, Violation};
use super::tower::{tower_with_limits, RootSummary};
use super::verify_lift_with_limits;
use crate::error::{Error, Result};
use crate::graph::build_graph_with_limits;
use crate::limits::Limits;
use crate::poly::PolyFunc;
use crate::residue::PrimePower;

/// A polynomial of degree at most `max_degree` with coefficients drawn
/// uniformly from `[-bound, bound]`.
pub fn random_poly<R: Rng>(rng: &mut R, max_degree: usize, bound: i64) -> PolyFunc {
    let degree = rng.gen_range(0..=max_degree);
    PolyFunc::from_coeffs((0..=degree).map(|_| rng.gen_range(-bound..=bound)))
}

/// Largest `n` with `p^n <= max`, or `None` when even `p` is too large.
fn max_exponent(p: u64, max: u64) -> Option<u32> {
    let (mut n, mut value) = (0u32, 1u64);
    while let Some(next) = value.checked_mul(p).filter(|&v| v <= max) {
        value = next;
        n += 1;
    }
    (n > 0).then_some(n)
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub max_degree: usize,
    pub coeff_bound: i64,
    pub primes: Vec<u64>,
    pub limits: Limits,
}

impl TrialConfig {
    /// 500 lift trials over `p` in {2, 3, 5, 7, 11, 13}, degree at most 6,
    /// coefficients in `[-20, 20]`.
    pub fn lift(seed: u64) -> Self {
        TrialConfig {
            trials: 500,
            seed,
            max_degree: 6,
            coeff_bound: 20,
            primes: vec![2, 3, 5, 7, 11, 13],
            limits: Limits::default(),
        }
    }

    /// 50 tower trials over `p` in {2, 3, 5, 7}.
    pub fn tower(seed: u64) -> Self {
        TrialConfig {
            trials: 50,
            primes: vec![2, 3, 5, 7],
            ..TrialConfig::lift(seed)
        }
    }
}

/// One random `(f, p, n)`: every cycle of `G(f, Z/p^nZ)` lifted and checked.
#[derive(Debug, Clone, Serialize)]
pub struct LiftTrial {
    pub poly: Value,
    pub prime: u64,
    pub power: u32,
    pub cycles: usize,
    pub mismatches: usize,
    pub violations: Vec<Violation>,
}

impl LiftTrial {
    pub fn passed(&self) -> bool {
        self.mismatches == 0 && self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftTrialSummary {
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub cycles_checked: usize,
    pub mismatches: usize,
    pub violations: usize,
    /// Only the trials that failed.
    pub failures: Vec<LiftTrial>,
}

impl LiftTrialSummary {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

fn check_primes(config: &TrialConfig, floor: u32) -> Result<()> {
    if config.primes.is_empty() {
        return Err(Error::domain("no primes to sample from"));
    }
    for &p in &config.primes {
        PrimePower::new(p, 1)?;
        match max_exponent(p, config.limits.max_vertices) {
            Some(n) if n >= floor => {}
            _ => {
                return Err(Error::overflow(format!(
                    "vertex limit {} leaves no room for p = {p}",
                    config.limits.max_vertices
                )))
            }
        }
    }
    Ok(())
}

pub fn run_lift_trial(f: &PolyFunc, level: PrimePower, limits: &Limits) -> Result<LiftTrial> {
    let graph = build_graph_with_limits(f, &level.modulus(), limits)?;
    let mut mismatches = 0;
    let mut violations = Vec::new();
    for cycle in graph.cycles() {
        let report = verify_lift_with_limits(f, level, cycle, limits)?;
        if !report.matched {
            mismatches += 1;
        }
        violations.extend(check_lift_laws(f, &report)?);
    }
    Ok(LiftTrial {
        poly: f.to_json(),
        prime: level.prime(),
        power: level.exponent(),
        cycles: graph.cycles().len(),
        mismatches,
        violations,
    })
}

/// Samples `(f, p, n)` with `p^{n+1}` within the vertex limit and checks every cycle.
pub fn run_lift_trials(config: &TrialConfig) -> Result<LiftTrialSummary> {
    check_primes(config, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut summary = LiftTrialSummary {
        seed: config.seed,
        trials: config.trials,
        passed: 0,
        failed: 0,
        cycles_checked: 0,
        mismatches: 0,
        violations: 0,
        failures: Vec::new(),
    };
    for _ in 0..config.trials {
        let f = random_poly(&mut rng, config.max_degree, config.coeff_bound);
        let p = *config.primes.choose(&mut rng).unwrap();
        let top = max_exponent(p, config.limits.max_vertices).unwrap();
        let n = rng.gen_range(1..top);
        let trial = run_lift_trial(&f, PrimePower::new(p, n)?, &config.limits)?;
        summary.cycles_checked += trial.cycles;
        summary.mismatches += trial.mismatches;
        summary.violations += trial.violations.len();
        if trial.passed() {
            summary.passed += 1;
        } else {
            summary.failed += 1;
            summary.failures.push(trial);
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct TowerTrial {
    pub poly: Value,
    pub prime: u64,
    pub depth: u32,
    pub edge_regime: bool,
    pub cycles: usize,
    pub transitions: usize,
    pub roots: Vec<RootSummary>,
    pub violations: Vec<Violation>,
}

/// Samples `(f, p, N)` with `2 <= N` and `p^N` within the vertex limit.
pub fn run_tower_trials(config: &TrialConfig) -> Result<Vec<TowerTrial>> {
    check_primes(config, 2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::with_capacity(config.trials);
    for _ in 0..config.trials {
        let f = random_poly(&mut rng, config.max_degree, config.coeff_bound);
        let p = *config.primes.choose(&mut rng).unwrap();
        let top = max_exponent(p, config.limits.max_vertices).unwrap();
        let depth = rng.gen_range(2..=top);
        let report = tower_with_limits(&f, p, depth, &config.limits)?;
        out.push(TowerTrial {
            poly: report.poly,
            prime: p,
            depth,
            edge_regime: report.edge_regime,
            cycles: report.levels.iter().map(|l| l.cycles.len()).sum(),
            transitions: report.transitions.len(),
            roots: report.roots,
            violations: report.violations,
        });
    }
    Ok(out)
}
