//! Exact arithmetic: rationals, half-integers, and the constant field
//! ℚ[ln 2, √π, 1/√π] in which every identity side is evaluated.
//!
//! A [`SymConst`] is a finite ℚ-linear combination of monomials
//! `ln2^a · √π^b` with `a ≥ 0` and `b ∈ ℤ`. The monomials are treated as
//! linearly independent, so equality is coefficient-wise.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Renders a rational as `p` or `p/q`.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Format(format!("not a rational: `{text}`"));
    let (p, q) = match text.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (text, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(p, q))
}

/// An exact value `twice / 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt {
    twice: BigInt,
}

impl HalfInt {
    pub fn from_twice(twice: impl Into<BigInt>) -> Self {
        HalfInt {
            twice: twice.into(),
        }
    }

    pub fn from_int(n: impl Into<BigInt>) -> Self {
        HalfInt {
            twice: n.into() * 2,
        }
    }

    pub fn zero() -> Self {
        HalfInt::from_twice(0)
    }

    pub fn twice(&self) -> &BigInt {
        &self.twice
    }

    pub fn is_integer(&self) -> bool {
        self.twice.is_even()
    }

    pub fn is_negative_integer(&self) -> bool {
        self.is_integer() && self.twice.is_negative()
    }

    pub fn is_nonneg_integer(&self) -> bool {
        self.is_integer() && !self.twice.is_negative()
    }

    pub fn is_zero(&self) -> bool {
        self.twice.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.twice.is_negative()
    }

    /// The integer value, if this is an integer.
    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| &self.twice / 2)
    }

    pub fn to_i64(&self) -> Option<i64> {
        self.to_integer().and_then(|n| n.to_i64())
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.twice.clone(), BigInt::from(2))
    }

    pub fn from_rational(q: &Rational) -> Option<Self> {
        let twice = q * int(2);
        twice
            .is_integer()
            .then(|| HalfInt::from_twice(twice.to_integer()))
    }
}

impl Add for &HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: &HalfInt) -> HalfInt {
        HalfInt::from_twice(&self.twice + &rhs.twice)
    }
}

impl Sub for &HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: &HalfInt) -> HalfInt {
        HalfInt::from_twice(&self.twice - &rhs.twice)
    }
}

impl Add<i64> for &HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: i64) -> HalfInt {
        HalfInt::from_twice(&self.twice + 2 * rhs)
    }
}

impl Sub<i64> for &HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: i64) -> HalfInt {
        HalfInt::from_twice(&self.twice - 2 * rhs)
    }
}

impl Neg for &HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_twice(-&self.twice)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", &self.twice / 2)
        } else {
            write!(f, "{}/2", self.twice)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let q = parse_rational(s)?;
        HalfInt::from_rational(&q)
            .ok_or_else(|| Error::Format(format!("not a half-integer: `{s}`")))
    }
}

/// Exponents of the monomial `ln2^ln2 · √π^sqrtpi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    pub ln2: u32,
    pub sqrtpi: i32,
}

impl Monomial {
    pub const UNIT: Monomial = Monomial { ln2: 0, sqrtpi: 0 };
    pub const LN2: Monomial = Monomial { ln2: 1, sqrtpi: 0 };
    pub const SQRT_PI: Monomial = Monomial { ln2: 0, sqrtpi: 1 };

    fn times(self, other: Monomial) -> Monomial {
        Monomial {
            ln2: self.ln2 + other.ln2,
            sqrtpi: self.sqrtpi + other.sqrtpi,
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.ln2 {
            0 => {}
            1 => parts.push("L".to_string()),
            a => parts.push(format!("L^{a}")),
        }
        match self.sqrtpi {
            0 => {}
            1 => parts.push("P".to_string()),
            b => parts.push(format!("P^{b}")),
        }
        write!(f, "{}", parts.join("*"))
    }
}

/// A value of ℚ[ln 2, √π, 1/√π] in canonical form (no zero coefficients).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct SymConst {
    terms: BTreeMap<Monomial, Rational>,
}

impl SymConst {
    pub fn zero() -> Self {
        SymConst::default()
    }

    pub fn one() -> Self {
        SymConst::rational(Rational::one())
    }

    pub fn rational(q: Rational) -> Self {
        SymConst::monomial(q, Monomial::UNIT)
    }

    pub fn integer(n: i64) -> Self {
        SymConst::rational(int(n))
    }

    pub fn monomial(q: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(m, q);
        }
        SymConst { terms }
    }

    pub fn ln2() -> Self {
        SymConst::monomial(Rational::one(), Monomial::LN2)
    }

    pub fn sqrt_pi() -> Self {
        SymConst::monomial(Rational::one(), Monomial::SQRT_PI)
    }

    /// `√π^power`, negative powers allowed.
    pub fn sqrt_pi_pow(power: i32) -> Self {
        SymConst::monomial(
            Rational::one(),
            Monomial {
                ln2: 0,
                sqrtpi: power,
            },
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> Rational {
        self.terms.get(&m).cloned().unwrap_or_else(Rational::zero)
    }

    /// The rational value, if this constant has no ln2/√π part.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::UNIT).cloned(),
            _ => None,
        }
    }

    pub fn as_halfint(&self) -> Option<HalfInt> {
        self.as_rational().and_then(|q| HalfInt::from_rational(&q))
    }

    pub fn as_integer(&self) -> Option<BigInt> {
        self.as_rational()
            .filter(|q| q.is_integer())
            .map(|q| q.to_integer())
    }

    pub fn scale(&self, q: &Rational) -> SymConst {
        if q.is_zero() {
            return SymConst::zero();
        }
        SymConst {
            terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect(),
        }
    }

    /// Multiplicative inverse of a single monomial free of ln 2.
    pub fn inverse(&self) -> Result<SymConst> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("inverse of 0".into()));
        }
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (Some((m, c)), None) if m.ln2 == 0 => Ok(SymConst::monomial(
                c.recip(),
                Monomial {
                    ln2: 0,
                    sqrtpi: -m.sqrtpi,
                },
            )),
            _ => Err(Error::Type(format!(
                "`{self}` is not invertible in the constant field"
            ))),
        }
    }

    pub fn pow(&self, exp: i64) -> Result<SymConst> {
        let base = if exp < 0 {
            self.inverse()?
        } else {
            self.clone()
        };
        let mut acc = SymConst::one();
        let mut sq = base;
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            e >>= 1;
            if e > 0 {
                sq = &sq * &sq;
            }
        }
        Ok(acc)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(m).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&m);
        }
    }

    /// Numerical value with at least `precision_digits` correct digits.
    pub fn to_float(&self, precision_digits: u32) -> Float {
        let prec = float_precision(precision_digits);
        let ln2 = Float::with_val(prec, Constant::Log2);
        let sqrt_pi = Float::with_val(prec, Constant::Pi).sqrt();
        let mut acc = Float::with_val(prec, 0);
        for (m, c) in &self.terms {
            let mut term = rational_to_float(c, prec);
            term *= ln2.clone().pow(m.ln2);
            term *= sqrt_pi.clone().pow(m.sqrtpi);
            acc += term;
        }
        acc
    }
}

/// Working precision in bits for a requested number of decimal digits.
pub fn float_precision(digits: u32) -> u32 {
    (f64::from(digits) * std::f64::consts::LOG2_10).ceil() as u32 + 64
}

pub fn rational_to_float(q: &Rational, prec: u32) -> Float {
    let num = rug::Integer::from_str_radix(&q.numer().to_str_radix(16), 16)
        .expect("bigint renders as hex");
    let den = rug::Integer::from_str_radix(&q.denom().to_str_radix(16), 16)
        .expect("bigint renders as hex");
    Float::with_val(prec, num) / Float::with_val(prec, den)
}

impl From<Rational> for SymConst {
    fn from(q: Rational) -> Self {
        SymConst::rational(q)
    }
}

impl From<i64> for SymConst {
    fn from(n: i64) -> Self {
        SymConst::integer(n)
    }
}

impl Add<&SymConst> for &SymConst {
    type Output = SymConst;
    fn add(self, rhs: &SymConst) -> SymConst {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SymConst {
    type Output = SymConst;
    fn add(mut self, rhs: SymConst) -> SymConst {
        self += &rhs;
        self
    }
}

impl AddAssign<&SymConst> for SymConst {
    fn add_assign(&mut self, rhs: &SymConst) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, c.clone());
        }
    }
}

impl Sub<&SymConst> for &SymConst {
    type Output = SymConst;
    fn sub(self, rhs: &SymConst) -> SymConst {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for SymConst {
    type Output = SymConst;
    fn sub(mut self, rhs: SymConst) -> SymConst {
        self -= &rhs;
        self
    }
}

impl SubAssign<&SymConst> for SymConst {
    fn sub_assign(&mut self, rhs: &SymConst) {
        for (m, c) in &rhs.terms {
            self.add_term(*m, -c.clone());
        }
    }
}

impl Neg for &SymConst {
    type Output = SymConst;
    fn neg(self) -> SymConst {
        SymConst {
            terms: self.terms.iter().map(|(m, c)| (*m, -c.clone())).collect(),
        }
    }
}

impl Neg for SymConst {
    type Output = SymConst;
    fn neg(self) -> SymConst {
        -&self
    }
}

impl Mul<&SymConst> for &SymConst {
    type Output = SymConst;
    fn mul(self, rhs: &SymConst) -> SymConst {
        let mut out = SymConst::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.times(*mb), ca * cb);
            }
        }
        out
    }
}

impl Mul for SymConst {
    type Output = SymConst;
    fn mul(self, rhs: SymConst) -> SymConst {
        &self * &rhs
    }
}

impl MulAssign<&SymConst> for SymConst {
    fn mul_assign(&mut self, rhs: &SymConst) {
        *self = &*self * rhs;
    }
}

impl fmt::Display for SymConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (i, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = c.abs();
            if *m == Monomial::UNIT {
                write!(f, "{}", fmt_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&abs))?;
            }
        }
        Ok(())
    }
}

impl FromStr for SymConst {
    type Err = Error;

    /// Parses the canonical rendering, e.g. `46/15 - 2*L + 3*P^-2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Format(format!("not a constant-field value: `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        // Split into signed terms, keeping the `-` of `P^-1` attached.
        let bytes = compact.as_bytes();
        let mut pieces = Vec::new();
        let mut start = 0;
        for i in 1..bytes.len() {
            if (bytes[i] == b'+' || bytes[i] == b'-') && bytes[i - 1] != b'^' {
                pieces.push(&compact[start..i]);
                start = i;
            }
        }
        pieces.push(&compact[start..]);

        let mut out = SymConst::zero();
        for piece in pieces {
            let (sign, body) = match piece.as_bytes().first() {
                Some(b'-') => (-1, &piece[1..]),
                Some(b'+') => (1, &piece[1..]),
                _ => (1, piece),
            };
            if body.is_empty() {
                return Err(bad());
            }
            let mut coeff = int(sign);
            let mut mono = Monomial::UNIT;
            for factor in body.split('*') {
                let (head, exp) = match factor.split_once('^') {
                    Some((h, e)) => (h, e.parse::<i32>().map_err(|_| bad())?),
                    None => (factor, 1),
                };
                match head {
                    "L" => {
                        mono.ln2 += u32::try_from(exp).map_err(|_| bad())?;
                    }
                    "P" => mono.sqrtpi += exp,
                    _ if exp == 1 => coeff *= parse_rational(head).map_err(|_| bad())?,
                    _ => return Err(bad()),
                }
            }
            out.add_term(mono, coeff);
        }
        Ok(out)
    }
}
