//! Exact integer Laurent polynomials in one variable `t`.
//!
//! Storage is sparse (exponent → nonzero coefficient). Besides ring
//! arithmetic this module provides Conway normalization, the palindromic
//! coefficient form `a_0 + Σ a_j (t^j + t^-j)`, and the substitution
//! `x = t + t^-1` that turns a palindromic form into an ordinary integer
//! polynomial.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{ComplexBall, Precision};
use crate::poly::IntPoly;
use crate::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::monomial(c, 0)
    }

    /// The variable `t`.
    pub fn t() -> Self {
        Self::monomial(1, 1)
    }

    pub fn monomial(c: impl Into<BigInt>, exp: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, c.into());
        p
    }

    /// Coefficients `coeffs[k]` of `t^(lo + k)`.
    pub fn from_coeffs<C: Into<BigInt> + Clone>(lo: i64, coeffs: &[C]) -> Self {
        let mut p = Self::zero();
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(lo + k as i64, c.clone().into());
        }
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, BigInt)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, exp: i64, c: BigInt) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(BigInt::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: i64) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// Nonzero terms in ascending exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// Multiply by `t^r`.
    pub fn shift(&self, r: i64) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (e + r, c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(&e, v)| (e, v * c)).collect(),
        }
    }

    /// `p(t^-1)`.
    pub fn invert_variable(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect(),
        }
    }

    pub fn is_palindromic(&self) -> bool {
        self.terms.iter().all(|(&e, c)| self.terms.get(&-e) == Some(c))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(), |acc, _| &acc * self)
    }

    /// Value at `t = 1`.
    pub fn at_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// Value at `t = -1`.
    pub fn at_minus_one(&self) -> BigInt {
        self.terms
            .iter()
            .map(|(e, c)| if e.is_odd() { -c } else { c.clone() })
            .sum()
    }

    /// Exact division in `Z[t, t^-1]`; `None` if the quotient does not exist.
    pub fn div_exact(&self, divisor: &Self) -> Option<Self> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        let dlo = divisor.min_exp().unwrap();
        let dhi = divisor.max_exp().unwrap();
        let lead = divisor.coeff(dhi);
        let mut rem = self.clone();
        let mut quot = Self::zero();
        // Long division from the top; the remainder's span shrinks every round.
        while let Some(rhi) = rem.max_exp() {
            let rlo = rem.min_exp().unwrap();
            if rhi - rlo < dhi - dlo {
                return None;
            }
            let (q, r) = rem.coeff(rhi).div_rem(&lead);
            if !r.is_zero() {
                return None;
            }
            let term = Self::monomial(q, rhi - dhi);
            rem = &rem - &(&term * divisor);
            quot = &quot + &term;
        }
        Some(quot)
    }

    /// Certified enclosure of `p(z)`; `z` must be bounded away from 0.
    pub fn evaluate(&self, z: &ComplexBall, prec: Precision) -> ComplexBall {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return ComplexBall::zero();
        };
        // p(z) = z^lo * q(z) with q an ordinary polynomial; Horner on q.
        let mut acc = ComplexBall::zero();
        for e in (lo..=hi).rev() {
            acc = acc.mul(z, prec);
            let c = self.coeff(e);
            if !c.is_zero() {
                acc = acc.add(&ComplexBall::from_bigint(&c), prec);
            }
        }
        let base = if lo >= 0 {
            z.clone()
        } else {
            z.inv(prec).expect("evaluation point must be nonzero")
        };
        let mut factor = ComplexBall::one();
        for _ in 0..lo.unsigned_abs() {
            factor = factor.mul(&base, prec);
        }
        acc.mul(&factor, prec)
    }

    /// `"[c_lo, ..., c_hi]@lo"`.
    pub fn to_compact_string(&self) -> String {
        let (Some(lo), Some(hi)) = (self.min_exp(), self.max_exp()) else {
            return "[0]@0".to_string();
        };
        let cs: Vec<String> = (lo..=hi).map(|e| self.coeff(e).to_string()).collect();
        format!("[{}]@{}", cs.join(", "), lo)
    }

    /// Explicit-coefficient form, e.g. `"-1 + 1*t + 1*t^-1"`: constant term
    /// first, then exponents by increasing absolute value (positive first).
    pub fn to_explicit_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut exps: Vec<i64> = self.terms.keys().copied().collect();
        exps.sort_by_key(|&e| (e.abs(), e < 0));
        let mut out = String::new();
        for (k, e) in exps.into_iter().enumerate() {
            let c = self.coeff(e);
            let body = match e {
                0 => c.abs().to_string(),
                1 => format!("{}*t", c.abs()),
                _ => format!("{}*t^{}", c.abs(), e),
            };
            if k == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push_str(if c.is_negative() { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// Descending exponents, unit coefficients elided: `t - 1 + t^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let var = match e {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{e}"),
            };
            if e == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else {
                write!(f, "{mag}*{var}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly({self})")
    }
}

impl FromStr for LaurentPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            parse_compact(s)
        } else {
            parse_terms(s)
        }
    }
}

fn parse_compact(s: &str) -> Result<LaurentPoly> {
    let bad = || Error::Parse(format!("bad coefficient list {s:?}"));
    let close = s.find(']').ok_or_else(bad)?;
    let body = &s[1..close];
    let rest = s[close + 1..].trim();
    let lo = if rest.is_empty() {
        0
    } else {
        rest.strip_prefix('@')
            .ok_or_else(bad)?
            .trim()
            .parse::<i64>()
            .map_err(|_| bad())?
    };
    let coeffs = body
        .split(',')
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .map(|c| c.parse::<BigInt>().map_err(|_| bad()))
        .collect::<Result<Vec<_>>>()?;
    Ok(LaurentPoly::from_coeffs(lo, &coeffs))
}

fn parse_terms(s: &str) -> Result<LaurentPoly> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    // Split into signed terms; a '-' right after '^' belongs to an exponent.
    let chars: Vec<char> = compact.chars().collect();
    let mut terms = Vec::new();
    let mut start = 0;
    for i in 1..chars.len() {
        let c = chars[i];
        let prev = chars[i - 1];
        if (c == '+' || c == '-') && !matches!(prev, '^' | '(' | '{' | '+' | '-' | '*') {
            terms.push(chars[start..i].iter().collect::<String>());
            start = i;
        }
    }
    terms.push(chars[start..].iter().collect::<String>());
    let mut p = LaurentPoly::zero();
    for term in terms {
        let (exp, c) = parse_term(&term)?;
        p.add_term(exp, c);
    }
    Ok(p)
}

fn parse_term(term: &str) -> Result<(i64, BigInt)> {
    let bad = || Error::Parse(format!("bad term {term:?}"));
    let (sign, body) = match term.as_bytes().first() {
        Some(b'+') => (1, &term[1..]),
        Some(b'-') => (-1, &term[1..]),
        _ => (1, term),
    };
    if body.is_empty() {
        return Err(bad());
    }
    let (coef_part, var_part) = match body.find('t') {
        Some(i) => (&body[..i], Some(&body[i + 1..])),
        None => (body, None),
    };
    let coef_part = coef_part.strip_suffix('*').unwrap_or(coef_part);
    let coef = if coef_part.is_empty() {
        if var_part.is_none() {
            return Err(bad());
        }
        BigInt::one()
    } else {
        coef_part.parse::<BigInt>().map_err(|_| bad())?
    };
    let exp = match var_part {
        None => 0,
        Some("") => 1,
        Some(v) => {
            let v = v.strip_prefix('^').ok_or_else(bad)?;
            let v = v
                .trim_start_matches(['(', '{'])
                .trim_end_matches([')', '}']);
            v.parse::<i64>().map_err(|_| bad())?
        }
    };
    Ok((exp, coef * sign))
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Sub for &LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (&e, c) in &rhs.terms {
            out.add_term(e, -c);
        }
        out
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, rhs: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &rhs.terms {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly {
            terms: self.terms.iter().map(|(&e, c)| (e, -c)).collect(),
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for LaurentPoly {
            type Output = LaurentPoly;
            fn $m(self, rhs: LaurentPoly) -> LaurentPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        -&self
    }
}

impl Serialize for LaurentPoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LaurentPoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Find the unit `±t^r` making `p` symmetric with value 1 at `t = 1`.
pub fn conway_normalize(p: &LaurentPoly) -> Result<LaurentPoly> {
    let (Some(lo), Some(hi)) = (p.min_exp(), p.max_exp()) else {
        return Err(Error::NotNormalizable);
    };
    for r in -hi..=-lo {
        let shifted = p.shift(r);
        if !shifted.is_palindromic() {
            continue;
        }
        let v = shifted.at_one();
        if v.is_one() {
            return Ok(shifted);
        }
        if (-&v).is_one() {
            return Ok(-shifted);
        }
    }
    Err(Error::NotNormalizable)
}

/// `P(t) = a_0 + Σ_{j=1..d} a_j (t^j + t^-j)`, stored as `a = [a_0, ..., a_d]`
/// with `a_d ≠ 0` unless `d = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PalindromicForm {
    a: Vec<BigInt>,
}

impl Serialize for PalindromicForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_int::vec::serialize(&self.a, s)
    }
}

impl<'de> Deserialize<'de> for PalindromicForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Ok(Self::new(crate::serde_int::vec::deserialize(d)?))
    }
}

impl PalindromicForm {
    /// Trailing zero coefficients are dropped.
    pub fn new(mut a: Vec<BigInt>) -> Self {
        while a.len() > 1 && a.last().is_some_and(|c| c.is_zero()) {
            a.pop();
        }
        if a.is_empty() {
            a.push(BigInt::zero());
        }
        Self { a }
    }

    pub fn from_i64(a: &[i64]) -> Self {
        Self::new(a.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.a
    }

    pub fn coeff(&self, j: usize) -> &BigInt {
        &self.a[j]
    }

    pub fn degree(&self) -> usize {
        self.a.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.a.len() == 1 && self.a[0].is_zero()
    }

    pub fn expand(&self) -> LaurentPoly {
        let mut p = LaurentPoly::constant(self.a[0].clone());
        for (j, c) in self.a.iter().enumerate().skip(1) {
            p.add_term(j as i64, c.clone());
            p.add_term(-(j as i64), c.clone());
        }
        p
    }
}

impl fmt::Display for PalindromicForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.a.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", cs.join(", "))
    }
}

impl FromStr for PalindromicForm {
    type Err = Error;

    /// Comma- or whitespace-separated `a_0, a_1, ..., a_d`, brackets optional.
    fn from_str(s: &str) -> Result<Self> {
        let body = s.trim().trim_start_matches(['[', '(']).trim_end_matches([']', ')']);
        let a = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|c| !c.is_empty())
            .map(|c| {
                c.parse::<BigInt>()
                    .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if a.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        Ok(Self::new(a))
    }
}

pub fn to_palindromic(p: &LaurentPoly) -> Result<PalindromicForm> {
    if !p.is_palindromic() {
        return Err(Error::NotPalindromic);
    }
    let d = p.max_exp().unwrap_or(0).max(0);
    Ok(PalindromicForm::new((0..=d).map(|j| p.coeff(j)).collect()))
}

/// The integer polynomial `p(x)` with `P(t) = p(t + t^-1)`.
pub fn chebyshev_transform(f: &PalindromicForm) -> IntPoly {
    // c_j(x) = t^j + t^-j:  c_1 = x, c_2 = x^2 - 2, c_j = x c_{j-1} - c_{j-2}.
    let x = IntPoly::x();
    let mut out = IntPoly::constant(f.coeff(0).clone());
    let mut prev = IntPoly::constant(BigInt::from(2));
    let mut cur = x.clone();
    for j in 1..=f.degree() {
        out = &out + &cur.scale(f.coeff(j));
        let next = &(&x * &cur) - &prev;
        prev = cur;
        cur = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::{Angle, Ball};
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn lp(s: &str) -> LaurentPoly {
        s.parse().unwrap()
    }

    #[test]
    fn parse_and_display() {
        let p = lp("-1 + 1*t + 1*t^-1");
        assert_eq!(p, LaurentPoly::from_coeffs(-1, &[1, -1, 1]));
        assert_eq!(p.to_string(), "t - 1 + t^-1");
        assert_eq!(p.to_explicit_string(), "-1 + 1*t + 1*t^-1");
        assert_eq!(lp("-t + 3 - t^-1").to_string(), "-t + 3 - t^-1");
        assert_eq!(lp("2*t^2 - 3t + 2").coeff(1), BigInt::from(-3));
        assert_eq!(lp("t^{-2} + t^(3)").max_exp(), Some(3));
        assert_eq!(lp("[1, -1, 1]@-1"), p);
        assert_eq!(lp("[1,2]"), lp("1 + 2t"));
        assert_eq!(p.to_compact_string(), "[1, -1, 1]@-1");
        assert!("t^".parse::<LaurentPoly>().is_err());
        assert!("3x".parse::<LaurentPoly>().is_err());
        assert!("".parse::<LaurentPoly>().is_err());
    }

    #[test]
    fn conway_normalization_examples() {
        assert_eq!(conway_normalize(&lp("t^2 - t + 1")).unwrap(), lp("t - 1 + t^-1"));
        assert_eq!(conway_normalize(&lp("1")).unwrap(), lp("1"));
        let fig8 = lp("-t^-1 + 3 - t");
        assert_eq!(conway_normalize(&fig8).unwrap(), fig8);
        assert_eq!(conway_normalize(&lp("-t^3 + 3t^2 - t")).unwrap(), fig8);
        assert_eq!(conway_normalize(&lp("-1")).unwrap(), lp("1"));
        assert!(matches!(conway_normalize(&lp("t + 1")), Err(Error::NotNormalizable)));
        assert!(matches!(conway_normalize(&lp("3")), Err(Error::NotNormalizable)));
        assert!(conway_normalize(&LaurentPoly::zero()).is_err());
    }

    #[test]
    fn normalization_matches_exhaustive_unit_search() {
        // Oracle: enumerate every unit ±t^r over a wide window.
        let base = lp("t^2 - t + 1");
        let mut hits = Vec::new();
        for r in -6..=6 {
            for s in [1i64, -1] {
                let q = base.shift(r).scale(&BigInt::from(s));
                if q == q.invert_variable() && q.at_one().is_one() {
                    hits.push(q);
                }
            }
        }
        assert_eq!(hits, vec![lp("t - 1 + t^-1")]);
    }

    #[test]
    fn palindromic_forms() {
        let f = to_palindromic(&lp("t - 1 + t^-1")).unwrap();
        assert_eq!(f, PalindromicForm::from_i64(&[-1, 1]));
        assert_eq!(f.degree(), 1);
        assert_eq!(to_palindromic(&lp("1")).unwrap(), PalindromicForm::from_i64(&[1]));
        assert!(matches!(to_palindromic(&lp("t^2 + 1")), Err(Error::NotPalindromic)));
        assert_eq!(PalindromicForm::from_i64(&[1, 2, 0, 0]).degree(), 1);
        assert_eq!("(1, -1, 1)".parse::<PalindromicForm>().unwrap(), PalindromicForm::from_i64(&[1, -1, 1]));
    }

    #[test]
    fn chebyshev_examples() {
        let p = chebyshev_transform(&PalindromicForm::from_i64(&[-1, 1]));
        assert_eq!(p, IntPoly::from_i64(&[-1, 1]));
        assert_eq!(chebyshev_transform(&PalindromicForm::from_i64(&[1])), IntPoly::from_i64(&[1]));
        let q = chebyshev_transform(&PalindromicForm::from_i64(&[1, -1, 1]));
        assert_eq!(q, IntPoly::from_i64(&[-1, -1, 1]));
    }

    #[test]
    fn evaluation_examples() {
        let prec = 128;
        let tref = lp("t - 1 + t^-1");
        let at = |z: ComplexBall| tref.evaluate(&z, prec);
        let one = at(ComplexBall::one());
        assert!(one.re.contains_int(1) && one.im.contains_int(0));
        assert!(one.re.radius_f64() == 0.0);
        let m1 = at(ComplexBall::from_bigint(&BigInt::from(-1)));
        assert!(m1.re.contains_int(-3));
        let angle = Angle::pi_times(BigRational::new(1.into(), 3.into()));
        let w = ComplexBall::unit(&angle, prec);
        let v = at(w);
        assert!(v.re.contains_zero() && v.im.contains_zero());
        assert!(v.re.radius_f64() < 1e-30);
        // Exact rational points agree with exact evaluation.
        let z = ComplexBall::new(Ball::from_rational(&BigRational::new(3.into(), 2.into()), prec), Ball::zero());
        let v = at(z);
        // 3/2 - 1 + 2/3 = 7/6
        assert!(v.re.contains_rational(&BigRational::new(7.into(), 6.into())));
    }

    fn arb_form() -> impl Strategy<Value = PalindromicForm> {
        proptest::collection::vec(-20i64..=20, 1..8).prop_map(|a| PalindromicForm::from_i64(&a))
    }

    fn arb_laurent() -> impl Strategy<Value = LaurentPoly> {
        (-5i64..5, proptest::collection::vec(-50i64..=50, 0..8))
            .prop_map(|(lo, cs)| LaurentPoly::from_coeffs(lo, &cs))
    }

    proptest! {
        #[test]
        fn chebyshev_agrees_on_unit_circle(f in arb_form(), alpha in 0.0f64..std::f64::consts::PI) {
            let prec = 128;
            let angle = Angle::Radians(alpha);
            let x = Ball::cos(&angle.ball(prec), prec).mul(&Ball::from_int(2), prec);
            let lhs = chebyshev_transform(&f).eval_ball(&x, prec);
            let rhs = f.expand().evaluate(&ComplexBall::unit(&angle, prec), prec);
            let diff = lhs.sub(&rhs.re, prec);
            prop_assert!(diff.contains_zero());
            prop_assert!(rhs.im.contains_zero());
        }

        #[test]
        fn normalization_idempotent(f in arb_form(), r in -4i64..4, neg in any::<bool>()) {
            let p = f.expand().shift(r);
            let p = if neg { -p } else { p };
            if let Ok(q) = conway_normalize(&p) {
                prop_assert!(q.at_one().is_one());
                prop_assert_eq!(&q, &q.invert_variable());
                prop_assert_eq!(conway_normalize(&q).unwrap(), q);
            }
        }

        #[test]
        fn palindromic_round_trip(f in arb_form()) {
            prop_assert_eq!(to_palindromic(&f.expand()).unwrap(), f);
        }

        #[test]
        fn text_round_trip(p in arb_laurent()) {
            prop_assert_eq!(&p.to_string().parse::<LaurentPoly>().unwrap(), &p);
            prop_assert_eq!(&p.to_explicit_string().parse::<LaurentPoly>().unwrap(), &p);
            prop_assert_eq!(&p.to_compact_string().parse::<LaurentPoly>().unwrap(), &p);
        }

        #[test]
        fn exact_division_inverts_multiplication(a in arb_laurent(), b in arb_laurent()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(prod.div_exact(&b).unwrap(), a);
        }
    }
}
