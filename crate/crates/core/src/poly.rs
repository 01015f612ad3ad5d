//! Integer polynomials viewed as self-maps of `Z/mZ`.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::residue::{add_mod, mul_mod, Residue};

/// Largest exponent accepted by the human-form parser.
const MAX_PARSED_DEGREE: usize = 1 << 16;

/// A polynomial with exact integer coefficients, ascending by degree.
///
/// Trailing zero coefficients are trimmed, so the zero polynomial is `[0]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyFunc {
    coeffs: Vec<BigInt>,
}

impl PolyFunc {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        let mut poly = PolyFunc { coeffs };
        poly.trim();
        poly
    }

    pub fn from_coeffs<I: Into<BigInt>>(coeffs: impl IntoIterator<Item = I>) -> Self {
        PolyFunc::new(coeffs.into_iter().map(Into::into).collect())
    }

    /// The identity map `x`.
    pub fn identity() -> Self {
        PolyFunc::from_coeffs([0, 1])
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(BigInt::zero());
        }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Index of the last nonzero coefficient; `0` for constants, including zero.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn derivative(&self) -> PolyFunc {
        PolyFunc::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Coefficients reduced into `[0, m)`, ready for repeated evaluation.
    pub fn reduce_mod(&self, m: u64) -> ModPoly {
        let modulus = BigInt::from(m);
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                c.mod_floor(&modulus)
                    .to_u64()
                    .expect("reduced coefficient fits in u64")
            })
            .collect();
        ModPoly { coeffs, m }
    }

    pub fn eval(&self, a: Residue) -> Residue {
        let m = a.modulus();
        Residue::new_unchecked(self.reduce_mod(m).eval(a.value()), m)
    }

    /// `f^t(a)`, by `t` successive evaluations.
    pub fn iterate_eval(&self, a: Residue, t: u64) -> Residue {
        let m = a.modulus();
        Residue::new_unchecked(self.reduce_mod(m).iterate(a.value(), t), m)
    }

    /// Coefficients as JSON numbers, exact at any magnitude.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coeffs
                .iter()
                .map(|c| {
                    let n: serde_json::Number = c.to_string().parse().expect("integer literal");
                    serde_json::Value::Number(n)
                })
                .collect(),
        )
    }

    /// Exact evaluation over the integers.
    pub fn eval_integer(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }
}

/// `text` in either coefficient-list form (`"2,0,0,1"`) or human form (`"x^3+2"`).
pub fn parse_poly(text: &str) -> Result<PolyFunc> {
    if text.contains(',') {
        parse_coeff_list(text)
    } else {
        HumanParser {
            src: text.as_bytes(),
            pos: 0,
        }
        .parse()
    }
}

impl FromStr for PolyFunc {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_poly(s)
    }
}

fn parse_coeff_list(text: &str) -> Result<PolyFunc> {
    let mut coeffs = Vec::new();
    let mut offset = 0;
    for piece in text.split(',') {
        let lead = piece.len() - piece.trim_start().len();
        let item = piece.trim();
        let coeff = item.parse::<BigInt>().map_err(|_| Error::Parse {
            position: offset + lead,
            message: format!("expected an integer coefficient, found {item:?}"),
        })?;
        coeffs.push(coeff);
        offset += piece.len() + 1;
    }
    Ok(PolyFunc::new(coeffs))
}

struct HumanParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> HumanParser<'a> {
    fn error<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            position: self.pos,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> Option<&'a str> {
        let start = self.pos;
        while self.src.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        (self.pos > start).then(|| std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }

    fn parse(mut self) -> Result<PolyFunc> {
        let mut coeffs: Vec<BigInt> = Vec::new();
        let mut first = true;
        loop {
            let negative = match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                None if first => return self.error("empty polynomial"),
                _ if first => false,
                None => break,
                Some(c) => {
                    return self.error(format!("expected '+' or '-', found {:?}", c as char))
                }
            };
            first = false;
            let (coeff, power) = self.term()?;
            if coeffs.len() <= power {
                coeffs.resize(power + 1, BigInt::zero());
            }
            if negative {
                coeffs[power] -= coeff;
            } else {
                coeffs[power] += coeff;
            }
        }
        Ok(PolyFunc::new(coeffs))
    }

    fn term(&mut self) -> Result<(BigInt, usize)> {
        self.skip_ws();
        let coeff = self.digits().map(|d| d.parse::<BigInt>().unwrap());
        match self.peek() {
            Some(b'x' | b'X') => {
                self.pos += 1;
                let power = if self.peek() == Some(b'^') {
                    self.pos += 1;
                    self.skip_ws();
                    let at = self.pos;
                    let Some(d) = self.digits() else {
                        return self.error("expected an exponent after '^'");
                    };
                    match d.parse::<usize>() {
                        Ok(e) if e <= MAX_PARSED_DEGREE => e,
                        _ => {
                            self.pos = at;
                            return self.error(format!("exponent {d} is too large"));
                        }
                    }
                } else {
                    1
                };
                Ok((coeff.unwrap_or_else(BigInt::one), power))
            }
            _ => match coeff {
                Some(c) => Ok((c, 0)),
                None => match self.peek() {
                    Some(c) => self.error(format!(
                        "expected a coefficient or 'x', found {:?}",
                        c as char
                    )),
                    None => self.error("expected a term"),
                },
            },
        }
    }
}

impl fmt::Display for PolyFunc {
    /// Human form, highest degree first; parses back to the same polynomial.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = c.abs();
            let coeff = if i > 0 && mag.is_one() {
                String::new()
            } else {
                mag.to_string()
            };
            let var = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            write!(f, "{sign}{coeff}{var}")?;
            first = false;
        }
        Ok(())
    }
}

fn zip_with(a: &PolyFunc, b: &PolyFunc, op: impl Fn(&BigInt, &BigInt) -> BigInt) -> PolyFunc {
    let zero = BigInt::zero();
    let len = a.coeffs.len().max(b.coeffs.len());
    PolyFunc::new(
        (0..len)
            .map(|i| {
                op(
                    a.coeffs.get(i).unwrap_or(&zero),
                    b.coeffs.get(i).unwrap_or(&zero),
                )
            })
            .collect(),
    )
}

impl Add for &PolyFunc {
    type Output = PolyFunc;

    fn add(self, rhs: &PolyFunc) -> PolyFunc {
        zip_with(self, rhs, |a, b| a + b)
    }
}

impl Sub for &PolyFunc {
    type Output = PolyFunc;

    fn sub(self, rhs: &PolyFunc) -> PolyFunc {
        zip_with(self, rhs, |a, b| a - b)
    }
}

impl Neg for &PolyFunc {
    type Output = PolyFunc;

    fn neg(self) -> PolyFunc {
        PolyFunc::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// A polynomial with coefficients already reduced modulo `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModPoly {
    coeffs: Vec<u64>,
    m: u64,
}

impl ModPoly {
    pub fn modulus(&self) -> u64 {
        self.m
    }

    /// Horner evaluation, reducing after every step. `x` must lie in `[0, m)`.
    #[inline]
    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| add_mod(mul_mod(acc, x, self.m), c, self.m))
    }

    pub fn iterate(&self, mut x: u64, t: u64) -> u64 {
        for _ in 0..t {
            x = self.eval(x);
        }
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::residue::{make_modulus, reduce};

    fn p(s: &str) -> PolyFunc {
        parse_poly(s).unwrap()
    }

    fn ints(f: &PolyFunc) -> Vec<i64> {
        f.coeffs().iter().map(|c| c.to_i64().unwrap()).collect()
    }

    fn res(a: i128, m: u64) -> Residue {
        reduce(a, &make_modulus(m).unwrap())
    }

    #[test]
    fn parse_examples() {
        assert_eq!(ints(&p("x^3+2")), vec![2, 0, 0, 1]);
        assert_eq!(ints(&p("3x-x^3")), vec![0, 3, 0, -1]);
        assert_eq!(ints(&p("0")), vec![0]);
        assert_eq!(ints(&p("2,0,0,1")), vec![2, 0, 0, 1]);
        assert_eq!(ints(&p("0, 3, 0, -1, 0, 0")), vec![0, 3, 0, -1]);
        assert_eq!(ints(&p(" - x ^ 2 + x + x - 7 ")), vec![-7, 2, -1]);
        assert_eq!(ints(&p("x^2+1")), vec![1, 0, 1]);
        assert_eq!(ints(&p("x - x")), vec![0]);
        assert_eq!(
            p("123456789012345678901234567890x").coeffs()[1].to_string(),
            "123456789012345678901234567890"
        );
    }

    #[test]
    fn parse_errors_carry_positions() {
        let pos = |s: &str| match parse_poly(s) {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s:?} parsed to {other:?}"),
        };
        assert_eq!(pos(""), 0);
        assert_eq!(pos("x^"), 2);
        assert_eq!(pos("x+*2"), 2);
        assert_eq!(pos("3y"), 1);
        assert_eq!(pos("1,2,a"), 4);
        assert_eq!(pos("x^99999999999999999999999"), 2);
        assert_eq!(pos("x+"), 2);
        assert_eq!(pos("2 3"), 2);
    }

    #[test]
    fn display_round_trips() {
        for s in ["x^3+2", "-x^3+3x", "0", "x", "-1", "5x^6-20x^2+x-3"] {
            assert_eq!(p(&p(s).to_string()), p(s));
        }
        assert_eq!(p("3x-x^3").to_string(), "-x^3+3x");
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("x^3+2").eval(res(1, 9)).value(), 3);
        assert_eq!(p("x^2+1").eval(res(2, 3)).value(), 2);
        assert_eq!(p("x").eval(res(5, 7)).value(), 5);
        assert_eq!(p("-x^3").eval(res(2, 5)).value(), 2);
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(ints(&p("x^3+2").derivative()), vec![0, 0, 3]);
        assert_eq!(ints(&p("3x-x^3").derivative()), vec![3, 0, -3]);
        assert_eq!(ints(&p("5").derivative()), vec![0]);
        assert_eq!(p("5").derivative().degree(), 0);
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(p("x^3").iterate_eval(res(3, 16), 2).value(), 3);
        assert_eq!(p("x^2+7").iterate_eval(res(4, 11), 0).value(), 4);
        assert_eq!(p("x^2+1").iterate_eval(res(2, 9), 3).value(), 2);
        let f = p("x^2+1");
        assert_ne!(f.iterate_eval(res(2, 9), 1).value(), 2);
        assert_ne!(f.iterate_eval(res(2, 9), 2).value(), 2);
    }

    #[test]
    fn eval_commutes_with_projection() {
        let polys = ["x^3+2", "3x-x^3", "7x^5-13x^2+x-20", "-x^4+11"].map(p);
        for m in 2..=1000u64 {
            let divisors: Vec<u64> = (2..=m).filter(|d| m % d == 0).collect();
            for f in &polys {
                let big = f.reduce_mod(m);
                let step = if m > 200 { 37 } else { 1 };
                for a in (0..m).step_by(step) {
                    let y = big.eval(a);
                    for &d in &divisors {
                        assert_eq!(y % d, f.reduce_mod(d).eval(a % d));
                    }
                }
            }
        }
    }

    #[test]
    fn eval_matches_integer_evaluation() {
        let f = p("-17x^6+20x^5-3x+19");
        for x in -50i64..50 {
            let exact = f.eval_integer(&BigInt::from(x));
            for m in [2u64, 9, 97, 1 << 40] {
                let expected = exact.mod_floor(&BigInt::from(m)).to_u64().unwrap();
                assert_eq!(f.eval(res(x as i128, m)).value(), expected);
            }
        }
    }
}
