//! Exact special values: factorials, harmonic numbers at half-integers,
//! Γ at half-integers, generalized binomial coefficients with pole
//! semantics, and Chebyshev polynomials of the second kind.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exact::{int, HalfInt, Rational, SymConst};

/// Value of a generalized binomial coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BinomValue {
    Finite(SymConst),
    /// The Γ-numerator has an uncancelled pole.
    Infinite,
}

impl BinomValue {
    pub fn finite(self) -> Option<SymConst> {
        match self {
            BinomValue::Finite(v) => Some(v),
            BinomValue::Infinite => None,
        }
    }
}

pub fn factorial(n: u64) -> Rational {
    Rational::from_integer((1..=n).fold(BigInt::one(), |acc, i| acc * i))
}

/// `H_q` for any half-integer `q` that is not a negative integer.
///
/// Integers use the finite sum; half-odd arguments are anchored at
/// `H_{-1/2} = -2 ln 2` and moved with `H_q = H_{q-1} + 1/q` in either
/// direction.
pub fn harmonic(q: &HalfInt) -> Result<SymConst> {
    if q.is_negative_integer() {
        return Err(Error::Pole(format!("H at negative integer {q}")));
    }
    if let Some(n) = q.to_integer() {
        let n = n
            .to_u64()
            .ok_or_else(|| Error::Type(format!("harmonic index {q} too large")))?;
        return Ok(SymConst::rational(harmonic_m(n, 1)));
    }
    // q = m - 1/2
    let m: BigInt = (q.twice() + 1) / 2;
    let m = m
        .to_i64()
        .ok_or_else(|| Error::Type(format!("harmonic index {q} too large")))?;
    let mut acc = Rational::zero();
    if m >= 0 {
        // H_{m-1/2} = H_{-1/2} + sum_{i=1}^{m} 1/(i - 1/2)
        for i in 1..=m {
            acc += Rational::new(BigInt::from(2), BigInt::from(2 * i - 1));
        }
    } else {
        // H_{q-1} = H_q - 1/q, stepping down from q = -1/2
        for i in (m + 1)..=0 {
            acc -= Rational::new(BigInt::from(2), BigInt::from(2 * i - 1));
        }
    }
    Ok(SymConst::rational(acc) - SymConst::ln2().scale(&int(2)))
}

/// `H_n^{(m)} = sum_{j=1}^n 1/j^m`.
pub fn harmonic_m(n: u64, m: u32) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, j| {
        acc + Rational::new(BigInt::one(), BigInt::from(j).pow(m))
    })
}

/// `O_n^{(m)} = sum_{j=1}^n 1/(2j-1)^m`.
pub fn odd_harmonic_m(n: u64, m: u32) -> Rational {
    (1..=n).fold(Rational::zero(), |acc, j| {
        acc + Rational::new(BigInt::one(), BigInt::from(2 * j - 1).pow(m))
    })
}

/// Γ(q) at a half-integer that is not a non-positive integer.
pub fn gamma_half(q: &HalfInt) -> Result<SymConst> {
    if q.is_integer() && !q.twice().is_positive() {
        return Err(Error::Pole(format!("Gamma at {q}")));
    }
    if let Some(n) = q.to_i64() {
        return Ok(SymConst::rational(factorial((n - 1) as u64)));
    }
    let m: i64 = ((q.twice() - BigInt::from(1)) / BigInt::from(2))
        .to_i64()
        .ok_or_else(|| Error::Type(format!("Gamma argument {q} too large")))?;
    // q = m + 1/2
    if m >= 0 {
        let m = m as u64;
        let c = factorial(2 * m)
            / (factorial(m) * Rational::from_integer(BigInt::from(4).pow(m as u32)));
        Ok(SymConst::sqrt_pi().scale(&c))
    } else {
        // Γ(x) = Γ(x+1)/x, from Γ(1/2) downward
        let mut c = Rational::one();
        for i in (m..0).rev() {
            c /= Rational::new(BigInt::from(2 * i + 1), BigInt::from(2));
        }
        Ok(SymConst::sqrt_pi().scale(&c))
    }
}

fn falling_factorial_binom(x: &HalfInt, y: u64) -> Rational {
    let xr = x.to_rational();
    let mut acc = Rational::one();
    for i in 0..y {
        acc *= &xr - int(i as i64);
    }
    acc / factorial(y)
}

/// Generalized binomial coefficient at half-integer arguments.
///
/// Rules, in order:
/// 1. integer `y`: zero for `y < 0` or `0 <= x < y` (integer `x`),
///    otherwise the falling factorial `x(x-1)...(x-y+1)/y!`;
/// 2. `x - y` a non-negative integer: symmetry, `binom(x, x - y)`;
/// 3. `Γ(x+1)/(Γ(y+1)Γ(x-y+1))`, where a denominator pole gives zero and an
///    uncancelled numerator pole gives [`BinomValue::Infinite`].
pub fn gen_binom(x: &HalfInt, y: &HalfInt) -> BinomValue {
    if let Some(yi) = y.to_integer() {
        if yi.is_negative() {
            return BinomValue::Finite(SymConst::zero());
        }
        if let Some(xi) = x.to_integer() {
            if !xi.is_negative() && xi < yi {
                return BinomValue::Finite(SymConst::zero());
            }
        }
        let y = yi.to_u64().expect("binomial lower index fits in u64");
        return BinomValue::Finite(SymConst::rational(falling_factorial_binom(x, y)));
    }
    let diff = x - y;
    if diff.is_nonneg_integer() {
        return gen_binom(x, &diff);
    }
    let num_arg = x + 1;
    let den_a = y + 1;
    let den_b = &diff + 1;
    let is_pole = |q: &HalfInt| q.is_integer() && !q.twice().is_positive();
    if is_pole(&den_a) || is_pole(&den_b) {
        return BinomValue::Finite(SymConst::zero());
    }
    if is_pole(&num_arg) {
        return BinomValue::Infinite;
    }
    let num = gamma_half(&num_arg).expect("pole excluded");
    let den =
        gamma_half(&den_a).expect("pole excluded") * gamma_half(&den_b).expect("pole excluded");
    BinomValue::Finite(
        num * den
            .inverse()
            .expect("Gamma values are invertible monomials"),
    )
}

/// `1 / binom(x, y)`, with an infinite coefficient contributing zero.
pub fn recip_binom(x: &HalfInt, y: &HalfInt) -> Result<SymConst> {
    match gen_binom(x, y) {
        BinomValue::Infinite => Ok(SymConst::zero()),
        BinomValue::Finite(v) if v.is_zero() => Err(Error::DivisionByZero(format!(
            "1/binom({x}, {y}) with binom({x}, {y}) = 0"
        ))),
        BinomValue::Finite(v) => v.inverse(),
    }
}

/// A polynomial with rational coefficients, index = power of `t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChebPoly {
    pub coefficients: Vec<Rational>,
}

impl ChebPoly {
    pub fn degree(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        self.coefficients
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * t + c)
    }

    /// Rewrites `p(√t)` as a polynomial in `t`; only defined for even `p`.
    pub fn in_sqrt(&self) -> Option<Vec<Rational>> {
        if self
            .coefficients
            .iter()
            .skip(1)
            .step_by(2)
            .any(|c| !c.is_zero())
        {
            return None;
        }
        Some(self.coefficients.iter().step_by(2).cloned().collect())
    }
}

/// `U_n` from `U_0 = 1`, `U_1 = 2t`, `U_{n+1} = 2t U_n - U_{n-1}`.
pub fn chebyshev_u(n: usize) -> ChebPoly {
    let mut prev = vec![Rational::one()];
    if n == 0 {
        return ChebPoly { coefficients: prev };
    }
    let mut cur = vec![Rational::zero(), int(2)];
    for _ in 1..n {
        let mut next = vec![Rational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c * int(2);
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c;
        }
        prev = cur;
        cur = next;
    }
    ChebPoly { coefficients: cur }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    fn sc(s: &str) -> SymConst {
        s.parse().unwrap()
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), int(1));
        assert_eq!(factorial(5), int(120));
        assert_eq!(factorial(10), int(3628800));
    }

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(&h("0")).unwrap(), SymConst::zero());
        assert_eq!(harmonic(&h("-1/2")).unwrap(), sc("-2*L"));
        assert_eq!(harmonic(&h("5/2")).unwrap(), sc("46/15 - 2*L"));
        assert_eq!(harmonic(&h("3")).unwrap(), sc("11/6"));
        assert_eq!(harmonic(&h("-3/2")).unwrap(), sc("2 - 2*L"));
        assert!(matches!(harmonic(&h("-1")), Err(Error::Pole(_))));
    }

    #[test]
    fn generalized_harmonics() {
        assert_eq!(harmonic_m(0, 2), int(0));
        assert_eq!(harmonic_m(2, 2), rat(5, 4));
        assert_eq!(harmonic_m(3, 1), rat(11, 6));
        assert_eq!(odd_harmonic_m(0, 1), int(0));
        assert_eq!(odd_harmonic_m(3, 1), rat(23, 15));
        assert_eq!(odd_harmonic_m(2, 2), rat(10, 9));
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_half(&h("1/2")).unwrap(), SymConst::sqrt_pi());
        assert_eq!(gamma_half(&h("5/2")).unwrap(), sc("3/4*P"));
        assert_eq!(gamma_half(&h("4")).unwrap(), sc("6"));
        assert_eq!(gamma_half(&h("-1/2")).unwrap(), sc("-2*P"));
        assert!(gamma_half(&h("0")).is_err());
        assert!(gamma_half(&h("-3")).is_err());
    }

    #[test]
    fn binomial_values() {
        let b = |x: &str, y: &str| gen_binom(&h(x), &h(y));
        assert_eq!(b("-1/2", "1"), BinomValue::Finite(sc("-1/2")));
        assert_eq!(b("3/2", "1"), BinomValue::Finite(sc("3/2")));
        assert_eq!(b("1/2", "2"), BinomValue::Finite(sc("-1/8")));
        assert_eq!(b("5", "2"), BinomValue::Finite(sc("10")));
        assert_eq!(b("-1", "1/2"), BinomValue::Infinite);
        assert_eq!(b("3", "5"), BinomValue::Finite(SymConst::zero()));
        assert_eq!(b("3", "-1"), BinomValue::Finite(SymConst::zero()));
        // Γ(1)/(Γ(3/2)Γ(3/2)) = 4/π
        assert_eq!(b("1", "1/2"), BinomValue::Finite(sc("4*P^-2")));
        // x - y = -1: denominator pole
        assert_eq!(b("1/2", "3/2"), BinomValue::Finite(SymConst::zero()));
    }

    #[test]
    fn reciprocal_binomials() {
        let r = |x: &str, y: &str| recip_binom(&h(x), &h(y));
        assert_eq!(r("-1", "1/2").unwrap(), SymConst::zero());
        assert_eq!(r("2", "1").unwrap(), sc("1/2"));
        assert_eq!(r("1/2", "2").unwrap(), sc("-8"));
        assert!(matches!(r("2", "3"), Err(Error::DivisionByZero(_))));
    }

    #[test]
    fn chebyshev_coefficients() {
        assert_eq!(chebyshev_u(0).coefficients, vec![int(1)]);
        assert_eq!(chebyshev_u(2).coefficients, vec![int(-1), int(0), int(4)]);
        assert_eq!(
            chebyshev_u(3).coefficients,
            vec![int(0), int(-4), int(0), int(8)]
        );
        assert_eq!(chebyshev_u(2).in_sqrt().unwrap(), vec![int(-1), int(4)]);
        assert!(chebyshev_u(3).in_sqrt().is_none());
    }
}
