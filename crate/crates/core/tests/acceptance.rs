//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the run
//! exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cyclelift::graph::lifted_subgraph;
use cyclelift::lifting::trials::{random_poly, run_lift_trials, run_tower_trials, TrialConfig};
use cyclelift::lifting::{r_value, verify_lift};
use cyclelift::{
    build_graph, check_crt_isomorphism, lcm_cycle_check, make_modulus, multiplier, tower, Cycle,
    PolyFunc, PrimePower,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LIFT_SEED: u64 = 0x5eed_0005;
const CRT_SEED: u64 = 0x5eed_0006;
const TOWER_SEED: u64 = 0x5eed_0008;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn poly(s: &str) -> PolyFunc {
    s.parse().unwrap()
}

fn sorted(vs: &[u64]) -> Vec<u64> {
    let mut v = vs.to_vec();
    v.sort_unstable();
    v
}

fn within(elapsed: Duration, limit: Duration, what: &str) -> Result<(), String> {
    ensure(
        elapsed < limit,
        format!("{what} took {elapsed:?}, limit {limit:?}"),
    )
}

/// x^3 + 2 over Z/3Z: one 3-cycle whose lifted graph is all of G(f, Z/9Z),
/// containing the single cycle {1, 3, 2}.
fn criterion_1() -> Outcome {
    let f = poly("x^3+2");
    let start = Instant::now();
    let level = PrimePower::new(3, 1).unwrap();
    let g3 = build_graph(&f, &level.modulus()).unwrap();
    let g9 = build_graph(&f, &make_modulus(9).unwrap()).unwrap();
    let lifted = lifted_subgraph(&f, level, &g3.cycles()[0]).unwrap();
    let elapsed = start.elapsed();

    ensure(g3.cycles().len() == 1, "G(f, Z/3Z) should have one cycle")?;
    ensure(
        sorted(g3.cycles()[0].vertices()) == [0, 1, 2],
        "cycle over Z/3Z should be {0,1,2}",
    )?;
    ensure(
        lifted.vertices() == (0..9).collect::<Vec<_>>(),
        "lifted graph should cover Z/9Z",
    )?;
    for v in 0..9 {
        ensure(
            lifted.successor(v) == Some(g9.successor(v)),
            format!("edge out of {v} differs from G(f, Z/9Z)"),
        )?;
    }
    ensure(
        lifted.cycles().len() == 1,
        "lifted graph should hold exactly one cycle",
    )?;
    ensure(
        lifted.cycles()[0].vertices() == [1, 3, 2],
        "lifted cycle should be 1 -> 3 -> 2",
    )?;
    within(elapsed, Duration::from_millis(1), "construction")?;
    Ok(format!(
        "lifted cycle {:?} in {elapsed:?}",
        lifted.cycles()[0].vertices()
    ))
}

/// x^2 + 1 over Z/3Z: cycle {2} has lambda_bar = 1, r = 1, lifts to {2, 5, 8}
/// whose r at 2 is 0.
fn criterion_2() -> Outcome {
    let f = poly("x^2+1");
    let l1 = PrimePower::new(3, 1).unwrap();
    let c = Cycle::from_orbit(vec![2], 3);
    let m = multiplier(&f, l1, &c).unwrap();
    let r = r_value(&f, l1, &c, 2).unwrap();
    ensure(m.lambda_bar == 1, format!("lambda_bar = {}", m.lambda_bar))?;
    ensure(r == 1, format!("r = {r}"))?;
    let report = verify_lift(&f, l1, &c).unwrap();
    let lifted = report.lifted.cycles();
    ensure(
        lifted.len() == 1 && sorted(lifted[0].vertices()) == [2, 5, 8],
        format!("lift {lifted:?}"),
    )?;
    ensure(report.matched, "prediction mismatch")?;
    let r2 = r_value(&f, PrimePower::new(3, 2).unwrap(), &lifted[0], 2).unwrap();
    ensure(r2 == 0, format!("level-2 r = {r2}"))?;
    let t = tower(&f, 3, 2).unwrap();
    ensure(
        t.edge_regime && t.level(1).unwrap().cycles.iter().all(|c| c.edge_regime),
        "edge regime not flagged",
    )?;
    ensure(t.is_consistent(), format!("{:?}", t.violations))?;
    Ok("lambda_bar=1, r=1, lift {2,5,8}, level-2 r=0".into())
}

/// 3x - x^3 over Z/5^nZ, n = 1..6: the cycle through 2 keeps size 2,
/// lambda_bar = 1 and r = 0.
fn criterion_3() -> Outcome {
    let f = poly("3x-x^3");
    let start = Instant::now();
    let report = tower(&f, 5, 6).unwrap();
    let elapsed = start.elapsed();
    for n in 1..=6 {
        let c = report
            .cycle_reached_from(&f, n, 2)
            .ok_or(format!("no cycle through 2 at level {n}"))?;
        ensure(
            (c.size, c.lambda_bar, c.r) == (2, 1, 0) && c.v0 == 2,
            format!(
                "level {n}: size {}, lambda_bar {}, r {}, v0 {}",
                c.size, c.lambda_bar, c.r, c.v0
            ),
        )?;
        ensure(
            c.r_vertices.as_deref() == Some(&[0, 0][..]),
            format!("level {n}: r per vertex {:?}", c.r_vertices),
        )?;
    }
    ensure(report.is_consistent(), format!("{:?}", report.violations))?;
    within(elapsed, Duration::from_secs(1), "tower")?;
    Ok(format!(
        "size 2, lambda_bar 1, r 0 at levels 1..6 in {elapsed:?}"
    ))
}

/// x^3 over Z/8Z: {3} has lambda_bar = 1, r = 1 and lifts to {3, 11} whose r is 0 at both vertices.
fn criterion_4() -> Outcome {
    let f = poly("x^3");
    let l3 = PrimePower::new(2, 3).unwrap();
    let c = Cycle::from_orbit(vec![3], 8);
    ensure(
        build_graph(&f, &l3.modulus()).unwrap().cycle_containing(3) == &c,
        "{3} is not a cycle mod 8",
    )?;
    let m = multiplier(&f, l3, &c).unwrap();
    let r = r_value(&f, l3, &c, 3).unwrap();
    ensure(
        (m.lambda_bar, r) == (1, 1),
        format!("lambda_bar {}, r {r}", m.lambda_bar),
    )?;
    let report = verify_lift(&f, l3, &c).unwrap();
    let lifted = report.lifted.cycles();
    ensure(
        lifted.len() == 1 && lifted[0].vertices() == [3, 11],
        format!("lift {lifted:?}"),
    )?;
    let l4 = PrimePower::new(2, 4).unwrap();
    for v in [3, 11] {
        let r = r_value(&f, l4, &lifted[0], v).unwrap();
        ensure(r == 0, format!("r at {v} is {r}"))?;
    }
    Ok("lambda_bar=1, r=1, lift {3,11} with r=0 at both".into())
}

/// Randomized lift oracle (criterion 5) and the lift law suite on the same trials (criterion 7).
fn criteria_5_and_7() -> (Outcome, Outcome) {
    let start = Instant::now();
    let summary = run_lift_trials(&TrialConfig::lift(LIFT_SEED)).unwrap();
    let elapsed = start.elapsed();
    let matched = summary.trials - summary.failures.iter().filter(|t| t.mismatches > 0).count();
    let c5 = ensure(summary.trials == 500, "expected 500 trials")
        .and_then(|_| {
            ensure(
                matched == 500,
                format!(
                    "{matched}/500 trials matched; first failure {:?}",
                    summary.failures.first()
                ),
            )
        })
        .and_then(|_| within(elapsed, Duration::from_secs(300), "500 trials"))
        .map(|_| {
            format!(
                "500/500 trials, {} cycles, {elapsed:?}",
                summary.cycles_checked
            )
        });

    let mut by_law = BTreeMap::new();
    for v in summary.failures.iter().flat_map(|t| &t.violations) {
        *by_law.entry(v.law.to_string()).or_insert(0) += 1;
    }
    let c7 = ensure(
        summary.violations == 0,
        format!("{} violations: {by_law:?}", summary.violations),
    )
    .map(|_| format!("0 violations over {} cycles", summary.cycles_checked));
    (c5, c7)
}

/// Randomized CRT isomorphism and lcm-cycle checks.
fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(CRT_SEED);
    let start = Instant::now();
    let (mut iso, mut rows) = (0, 0);
    for _ in 0..200 {
        let f = random_poly(&mut rng, 6, 20);
        let (m, n) = loop {
            let (m, n) = (rng.gen_range(2..=200u64), rng.gen_range(2..=200u64));
            if num_integer::gcd(m, n) == 1 {
                break (m, n);
            }
        };
        if check_crt_isomorphism(&f, m, n).unwrap() {
            iso += 1;
        } else {
            return Err(format!("not isomorphic for f = {f}, m = {m}, n = {n}"));
        }
        for row in lcm_cycle_check(&f, m, n).unwrap() {
            ensure(
                row.found,
                format!("f = {f}, m = {m}, n = {n}: no cycle of size {} ", row.lcm),
            )?;
            rows += 1;
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(120), "200 trials")?;
    Ok(format!(
        "{iso}/200 isomorphic, {rows} lcm rows found, {elapsed:?}"
    ))
}

/// Tower-level structure for 50 random (f, p <= 7, N).
fn criterion_8() -> Outcome {
    let trials = run_tower_trials(&TrialConfig::tower(TOWER_SEED)).unwrap();
    ensure(trials.len() == 50, "expected 50 tower runs")?;
    let violations: Vec<_> = trials.iter().flat_map(|t| &t.violations).collect();
    if let Some(first) = violations.first() {
        return Err(format!("{} violations, first: {first}", violations.len()));
    }
    let transitions: usize = trials.iter().map(|t| t.transitions).sum();
    let edge = trials.iter().filter(|t| t.edge_regime).count();
    let mut classes = BTreeMap::new();
    for root in trials.iter().flat_map(|t| &t.roots) {
        let key = format!(
            "{:?}{}",
            root.class,
            if root.growth_level.is_some() {
                "+growth"
            } else {
                ""
            }
        );
        *classes.entry(key).or_insert(0) += 1;
    }
    Ok(format!(
        "0 violations over {transitions} transitions ({edge} runs in the edge regime); roots {classes:?}"
    ))
}

fn main() -> ExitCode {
    let (c5, c7) = criteria_5_and_7();
    let results = [
        ("1", "x^3+2 over Z/3Z and Z/9Z", criterion_1()),
        ("2", "x^2+1, p = 3 counterexample", criterion_2()),
        ("3", "3x-x^3, p = 5, r stays 0", criterion_3()),
        ("4", "x^3, p = 2 anomaly", criterion_4()),
        ("5", "randomized lift oracle", c5),
        ("6", "randomized CRT isomorphism", criterion_6()),
        ("7", "lift law suite", c7),
        ("8", "randomized towers", criterion_8()),
    ];
    let mut failed = Vec::new();
    for (id, name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({name}): {detail}"),
            Err(why) => {
                println!("FAIL criterion {id} ({name}): {why}");
                failed.push(*id);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", results.len());
        ExitCode::SUCCESS
    } else {
        println!("failed criteria: {failed:?}");
        ExitCode::FAILURE
    }
}
