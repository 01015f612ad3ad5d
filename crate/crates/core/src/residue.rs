//! Exact residue arithmetic on `Z/mZ` with `m < 2^63`.
//!
//! Products are formed in `u128`, so no intermediate ever overflows.

use std::fmt;

use crate::error::{Error, Result};

/// Exclusive upper bound on every modulus handled by the crate.
pub const MODULUS_BOUND: u64 = 1 << 63;

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Trial division; factors are returned with strictly increasing primes.
fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut factors = Vec::new();
    let mut d = 2u64;
    while d <= n / d {
        if n.is_multiple_of(d) {
            let mut e = 0;
            while n.is_multiple_of(d) {
                n /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        factors.push((n, 1));
    }
    factors
}

/// The ring `Z/mZ` together with the prime factorization of `m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Modulus {
    m: u64,
    factorization: Vec<(u64, u32)>,
}

impl Modulus {
    pub fn value(&self) -> u64 {
        self.m
    }

    pub fn factorization(&self) -> &[(u64, u32)] {
        &self.factorization
    }

    /// `(p, n)` when `m = p^n`.
    pub fn as_prime_power(&self) -> Option<PrimePower> {
        match self.factorization.as_slice() {
            &[(p, n)] => Some(PrimePower {
                p,
                n,
                value: self.m,
            }),
            _ => None,
        }
    }

    pub fn reduce(&self, a: i128) -> Residue {
        reduce(a, self)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z/{}Z", self.m)
    }
}

pub fn make_modulus(m: u64) -> Result<Modulus> {
    if m < 2 {
        return Err(Error::domain(format!(
            "modulus must be at least 2, got {m}"
        )));
    }
    if m >= MODULUS_BOUND {
        return Err(Error::overflow(format!("modulus {m} is not below 2^63")));
    }
    Ok(Modulus {
        m,
        factorization: factorize(m),
    })
}

/// A prime-power modulus `p^n` with `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimePower {
    p: u64,
    n: u32,
    value: u64,
}

impl PrimePower {
    pub fn new(p: u64, n: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::domain(format!("{p} is not prime")));
        }
        if n == 0 {
            return Err(Error::domain("prime-power exponent must be at least 1"));
        }
        match p.checked_pow(n) {
            Some(value) if value < MODULUS_BOUND => Ok(PrimePower { p, n, value }),
            _ => Err(Error::overflow(format!("{p}^{n} is not below 2^63"))),
        }
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// `p^{n+1}`.
    pub fn next(&self) -> Result<Self> {
        PrimePower::new(self.p, self.n + 1)
    }

    /// `p^{n-1}`, or `None` at `n = 1`.
    pub fn previous(&self) -> Option<Self> {
        (self.n > 1).then(|| PrimePower {
            p: self.p,
            n: self.n - 1,
            value: self.value / self.p,
        })
    }

    pub fn modulus(&self) -> Modulus {
        Modulus {
            m: self.value,
            factorization: vec![(self.p, self.n)],
        }
    }
}

impl fmt::Display for PrimePower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.p, self.n)
    }
}

/// A canonical representative in `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn pow(self, exp: u64) -> Residue {
        Residue {
            value: pow_mod(self.value, exp, self.modulus),
            modulus: self.modulus,
        }
    }

    pub(crate) fn new_unchecked(value: u64, modulus: u64) -> Residue {
        debug_assert!(value < modulus);
        Residue { value, modulus }
    }
}

impl std::ops::Add for Residue {
    type Output = Residue;

    fn add(self, other: Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: add_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;

    fn mul(self, other: Residue) -> Residue {
        debug_assert_eq!(self.modulus, other.modulus);
        Residue {
            value: mul_mod(self.value, other.value, self.modulus),
            modulus: self.modulus,
        }
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}

/// Maps any integer to its representative in `[0, m)`; negatives included.
pub fn reduce(a: i128, modulus: &Modulus) -> Residue {
    let value = a.rem_euclid(modulus.m as i128) as u64;
    Residue {
        value,
        modulus: modulus.m,
    }
}

/// Least `k >= 1` with `u^k = 1` in `Z/pZ`, for `u` a nonzero residue modulo a prime.
pub fn mult_order(u: Residue) -> Result<u64> {
    let p = u.modulus;
    if !is_prime(p) {
        return Err(Error::domain(format!(
            "multiplicative order needs a prime modulus, got {p}"
        )));
    }
    if u.value == 0 {
        return Err(Error::domain("zero has no multiplicative order"));
    }
    let mut order = p - 1;
    for (q, _) in factorize(p - 1) {
        while order.is_multiple_of(q) && pow_mod(u.value, order / q, p) == 1 {
            order /= q;
        }
    }
    Ok(order)
}
