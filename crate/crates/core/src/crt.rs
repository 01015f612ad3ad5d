//! The Chinese-remainder isomorphism `Z/mZ x Z/nZ -> Z/mnZ` and the graph
//! isomorphism `G(f, Z/mZ) (x) G(f, Z/nZ) ~ G(f, Z/mnZ)` it induces.

use num_integer::{ExtendedGcd, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{build_graph_with_limits, check_isomorphism_via_map, tensor_product};
use crate::limits::Limits;
use crate::poly::PolyFunc;
use crate::residue::{add_mod, make_modulus, mul_mod, MODULUS_BOUND};

/// `(x, y) -> b*n*x + a*m*y (mod mn)` where `a*m + b*n = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrtMap {
    m: u64,
    n: u64,
    a: i128,
    b: i128,
    /// `b*n` and `a*m` reduced into `[0, mn)`.
    x_weight: u64,
    y_weight: u64,
}

pub fn crt_map(m: u64, n: u64) -> Result<CrtMap> {
    if m < 2 || n < 2 {
        return Err(Error::domain(format!(
            "CRT factors must be at least 2, got ({m}, {n})"
        )));
    }
    let ExtendedGcd { gcd: g, x: a, y: b } = (m as i128).extended_gcd(&(n as i128));
    if g != 1 {
        return Err(Error::domain(format!("gcd({m}, {n}) = {g}, not 1")));
    }
    let mn = m
        .checked_mul(n)
        .filter(|&mn| mn < MODULUS_BOUND)
        .ok_or_else(|| Error::overflow(format!("{m} * {n} is not below 2^63")))?;
    let x_weight = (b * n as i128).rem_euclid(mn as i128) as u64;
    let y_weight = (a * m as i128).rem_euclid(mn as i128) as u64;
    Ok(CrtMap {
        m,
        n,
        a,
        b,
        x_weight,
        y_weight,
    })
}

impl CrtMap {
    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Bezout coefficients `(a, b)` with `a*m + b*n = 1`.
    pub fn bezout(&self) -> (i128, i128) {
        (self.a, self.b)
    }

    pub fn apply(&self, x: u64, y: u64) -> u64 {
        let mn = self.m * self.n;
        add_mod(
            mul_mod(self.x_weight, x, mn),
            mul_mod(self.y_weight, y, mn),
            mn,
        )
    }
}

/// Builds `G(f, Z/mZ)`, `G(f, Z/nZ)` and `G(f, Z/mnZ)` and checks that the CRT
/// map is an isomorphism from the tensor product of the first two onto the third.
pub fn check_crt_isomorphism(f: &PolyFunc, m: u64, n: u64) -> Result<bool> {
    check_crt_isomorphism_with_limits(f, m, n, &Limits::default())
}

pub fn check_crt_isomorphism_with_limits(
    f: &PolyFunc,
    m: u64,
    n: u64,
    limits: &Limits,
) -> Result<bool> {
    let phi = crt_map(m, n)?;
    let gm = build_graph_with_limits(f, &make_modulus(m)?, limits)?;
    let gn = build_graph_with_limits(f, &make_modulus(n)?, limits)?;
    let gmn = build_graph_with_limits(f, &make_modulus(m * n)?, limits)?;
    check_isomorphism_via_map(&tensor_product(&gm, &gn), &gmn, &phi)
}

/// One row of [`lcm_cycle_check`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LcmRow {
    pub k: u64,
    pub l: u64,
    pub lcm: u64,
    pub found: bool,
}

/// For each pair of cycle sizes `k` in `G(f, Z/mZ)` and `l` in `G(f, Z/nZ)`,
/// whether `G(f, Z/mnZ)` has a cycle of size `lcm(k, l)`. Rows are sorted by `(k, l)`.
pub fn lcm_cycle_check(f: &PolyFunc, m: u64, n: u64) -> Result<Vec<LcmRow>> {
    lcm_cycle_check_with_limits(f, m, n, &Limits::default())
}

pub fn lcm_cycle_check_with_limits(
    f: &PolyFunc,
    m: u64,
    n: u64,
    limits: &Limits,
) -> Result<Vec<LcmRow>> {
    crt_map(m, n)?;
    let sizes = |modulus: u64| -> Result<Vec<u64>> {
        let g = build_graph_with_limits(f, &make_modulus(modulus)?, limits)?;
        let mut s: Vec<u64> = g.cycles().iter().map(|c| c.size() as u64).collect();
        s.sort_unstable();
        s.dedup();
        Ok(s)
    };
    let (ks, ls, present) = (sizes(m)?, sizes(n)?, sizes(m * n)?);
    let mut rows = Vec::with_capacity(ks.len() * ls.len());
    for &k in &ks {
        for &l in &ls {
            let lcm = num_integer::lcm(k, l);
            rows.push(LcmRow {
                k,
                l,
                lcm,
                found: present.binary_search(&lcm).is_ok(),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    #[test]
    fn crt_map_examples() {
        let phi = crt_map(2, 3).unwrap();
        let (a, b) = phi.bezout();
        assert_eq!(a * 2 + b * 3, 1);
        assert_eq!((a, b), (-1, 1));
        assert_eq!(phi.apply(1, 2), 5);
        assert_eq!(crt_map(3, 5).unwrap().apply(0, 0), 0);
        assert!(matches!(crt_map(4, 6), Err(Error::Domain(_))));
        assert!(matches!(crt_map(1, 6), Err(Error::Domain(_))));
    }

    #[test]
    fn crt_map_inverts_projections() {
        for m in 2..40u64 {
            for n in (2..40u64).filter(|&n| num_integer::gcd(m, n) == 1) {
                let phi = crt_map(m, n).unwrap();
                let (a, b) = phi.bezout();
                assert_eq!(a * m as i128 + b * n as i128, 1);
                assert!(2 * a.unsigned_abs() <= n as u128, "({m}, {n}): a = {a}");
                let mut hit = vec![false; (m * n) as usize];
                for x in 0..m {
                    for y in 0..n {
                        let z = phi.apply(x, y);
                        assert_eq!((z % m, z % n), (x, y));
                        hit[z as usize] = true;
                    }
                }
                assert!(hit.into_iter().all(|h| h));
            }
        }
    }

    #[test]
    fn isomorphism_examples() {
        assert!(check_crt_isomorphism(&parse_poly("x^2+1").unwrap(), 2, 3).unwrap());
        assert!(check_crt_isomorphism(&parse_poly("x^3+2").unwrap(), 3, 5).unwrap());
        assert!(matches!(
            check_crt_isomorphism(&parse_poly("x").unwrap(), 4, 6),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lcm_examples() {
        let rows = lcm_cycle_check(&parse_poly("x+1").unwrap(), 2, 3).unwrap();
        assert_eq!(
            rows,
            vec![LcmRow {
                k: 2,
                l: 3,
                lcm: 6,
                found: true
            }]
        );

        let rows = lcm_cycle_check(&parse_poly("x").unwrap(), 5, 7).unwrap();
        assert_eq!(
            rows,
            vec![LcmRow {
                k: 1,
                l: 1,
                lcm: 1,
                found: true
            }]
        );

        let rows = lcm_cycle_check(&parse_poly("x^2+1").unwrap(), 3, 5).unwrap();
        assert!(!rows.is_empty());
        assert!(rows.iter().all(|r| r.found));
    }

    #[test]
    fn lcm_rows_serialize() {
        let row = LcmRow {
            k: 2,
            l: 3,
            lcm: 6,
            found: true,
        };
        assert_eq!(
            serde_json::to_string(&row).unwrap(),
            r#"{"k":2,"l":3,"lcm":6,"found":true}"#
        );
    }
}
