use cyclelift::graph::{build_graph_with_limits, cycle_reached_from};
use cyclelift::lifting::{check_lift_laws, verify_lift, LiftRecord, Spectrum};
use cyclelift::{
    build_graph, check_crt_isomorphism, lcm_cycle_check, make_modulus, multiplier, reduce, Limits,
    PolyFunc, PrimePower,
};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;

fn poly_strategy(max_degree: usize, bound: i64) -> impl Strategy<Value = PolyFunc> {
    prop::collection::vec(-bound..=bound, 1..=max_degree + 1).prop_map(PolyFunc::from_coeffs)
}

fn prime_strategy() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11, 13])
}

fn coprime_pair(max: u64) -> impl Strategy<Value = (u64, u64)> {
    (2..=max, 2..=max).prop_filter("coprime", |&(m, n)| m.gcd(&n) == 1)
}

/// Symbolic composition `f(g(x))`, used only as an oracle.
fn compose(f: &PolyFunc, g: &PolyFunc) -> PolyFunc {
    let mut acc = vec![BigInt::zero()];
    for c in f.coeffs().iter().rev() {
        let mut next = vec![BigInt::zero(); acc.len() + g.coeffs().len() - 1];
        for (i, a) in acc.iter().enumerate() {
            for (j, b) in g.coeffs().iter().enumerate() {
                next[i + j] += a * b;
            }
        }
        next[0] += c;
        acc = next;
    }
    PolyFunc::new(acc)
}

fn eval_mod(f: &PolyFunc, x: u64, m: u64) -> u64 {
    f.eval_integer(&BigInt::from(x))
        .mod_floor(&BigInt::from(m))
        .to_u64()
        .unwrap()
}

/// Lifted cycle sizes found in the full graph over `Z/p^{n+1}Z`, selecting
/// cycles that project into the base cycle.
fn brute_force_lift(f: &PolyFunc, p: u64, n: u32, base: &[u64]) -> Spectrum {
    let pn = p.pow(n);
    let upper = build_graph(f, &make_modulus(pn * p).unwrap()).unwrap();
    Spectrum::from_sizes(
        upper
            .cycles()
            .iter()
            .filter(|c| base.contains(&(c.first() % pn)))
            .map(|c| c.size() as u64),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reduce_respects_ring_operations(a in -(1i128 << 60)..(1i128 << 60), b in -(1i128 << 60)..(1i128 << 60), m in 2u64..1_000_000) {
        let modulus = make_modulus(m).unwrap();
        let (ra, rb) = (reduce(a, &modulus), reduce(b, &modulus));
        prop_assert_eq!(reduce(a + b, &modulus), ra + rb);
        prop_assert_eq!(reduce(a * b, &modulus), ra * rb);
    }

    #[test]
    fn iteration_splits(f in poly_strategy(6, 20), a in 0u64..10_000, m in 2u64..10_000, s in 0u64..200, t in 0u64..200) {
        let modulus = make_modulus(m).unwrap();
        let a = reduce(a as i128, &modulus);
        prop_assert_eq!(f.iterate_eval(a, s + t), f.iterate_eval(f.iterate_eval(a, s), t));
    }

    #[test]
    fn derivative_is_linear(f in poly_strategy(8, 1000), g in poly_strategy(8, 1000)) {
        prop_assert_eq!((&f + &g).derivative(), &f.derivative() + &g.derivative());
        prop_assert_eq!((&f - &g).derivative(), &f.derivative() - &g.derivative());
    }

    #[test]
    fn display_parses_back(f in poly_strategy(8, 1000)) {
        prop_assert_eq!(f.to_string().parse::<PolyFunc>().unwrap(), f.clone());
        let list: Vec<String> = f.coeffs().iter().map(ToString::to_string).collect();
        prop_assert_eq!(list.join(",").parse::<PolyFunc>().unwrap(), f);
    }

    #[test]
    fn reached_cycle_agrees_with_graph(f in poly_strategy(6, 20), m in 2u64..3000, v in 0u64..3000) {
        let g = build_graph(&f, &make_modulus(m).unwrap()).unwrap();
        prop_assert_eq!(&cycle_reached_from(&f, m, v % m), g.cycle_containing(v % m));
    }

    /// The multiplier equals `(f^k)'(v)` at every vertex of the cycle, with
    /// `f^k` composed symbolically.
    #[test]
    fn multiplier_matches_chain_rule(f in poly_strategy(3, 9), p in prime_strategy(), n in 1u32..=3) {
        let level = PrimePower::new(p, n).unwrap();
        let g = build_graph(&f, &level.modulus()).unwrap();
        for cycle in g.cycles().iter().filter(|c| c.size() <= 3) {
            let mut fk = f.clone();
            for _ in 1..cycle.size() {
                fk = compose(&f, &fk);
            }
            let dfk = fk.derivative();
            let lambda = multiplier(&f, level, cycle).unwrap().lambda;
            for &v in cycle.vertices() {
                prop_assert_eq!(eval_mod(&dfk, v, level.value()), lambda);
            }
        }
    }

    #[test]
    fn crt_isomorphism_holds((m, n) in coprime_pair(200), f in poly_strategy(6, 20)) {
        prop_assert!(check_crt_isomorphism(&f, m, n).unwrap());
        prop_assert!(lcm_cycle_check(&f, m, n).unwrap().iter().all(|r| r.found));
    }

    /// Prediction, lifted-graph enumeration and full-graph enumeration agree,
    /// and every single-step law holds.
    #[test]
    fn lifts_match_brute_force(f in poly_strategy(6, 20), p in prime_strategy(), n in 1u32..=4) {
        let level = PrimePower::new(p, n).unwrap();
        prop_assume!(p.pow(n + 1) <= 1 << 16);
        let g = build_graph(&f, &level.modulus()).unwrap();
        for cycle in g.cycles() {
            let report = verify_lift(&f, level, cycle).unwrap();
            prop_assert!(report.matched, "{} on {:?}: {:?} vs {:?}", f, cycle, report.prediction, report.observed);
            prop_assert_eq!(&report.observed, &brute_force_lift(&f, p, n, cycle.vertices()));
            let violations = check_lift_laws(&f, &report).unwrap();
            prop_assert!(violations.is_empty(), "{:?}", violations);
            let json = serde_json::to_string(&LiftRecord::from(&report)).unwrap();
            let back: LiftRecord = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(serde_json::to_string(&back).unwrap(), json);
        }
    }

    #[test]
    fn graph_limit_is_enforced(m in 2u64..5000, limit in 2u64..5000) {
        let f = PolyFunc::identity();
        let built = build_graph_with_limits(&f, &make_modulus(m).unwrap(), &Limits::new(limit));
        prop_assert_eq!(built.is_ok(), m <= limit);
    }
}
