//! Zeros on the unit circle of palindromic integer polynomials.
//!
//! A zero `t = e^{±iα}` of `P(t) = a_0 + Σ a_j (t^j + t^{-j})` corresponds to a
//! real root `x = 2cos α ∈ (-2, 2)` of the Chebyshev transform `p(x)`, with the
//! same multiplicity. Roots are isolated exactly: Yun square-free decomposition
//! gives the multiplicities, Sturm chains on the square-free part give disjoint
//! rational isolating intervals.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::ball::{Ball, Precision};
use crate::laurent::{chebyshev_transform, PalindromicForm};
use crate::poly::{sign_variations, IntPoly};
use crate::{Error, Result, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS};

/// Default isolating-interval width is below `2^-DEFAULT_REFINE_BITS`.
pub const DEFAULT_REFINE_BITS: u32 = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(m: u32) -> Self {
        if m % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// Exact `"p/q"` rendering; integers come out as `"p/1"`.
pub fn rational_string(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// A root `x*` of the Chebyshev transform with `lo < x* < hi`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootInterval {
    pub lo: BigRational,
    pub hi: BigRational,
    pub multiplicity: u32,
}

impl RootInterval {
    pub fn parity(&self) -> Parity {
        Parity::of(self.multiplicity)
    }

    pub fn midpoint(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(BigInt::from(2))
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo < x && x < &self.hi
    }

    /// Enclosure of `α = arccos(x*/2) ∈ (0, π)`, rounded outward.
    pub fn angle_enclosure(&self) -> (f64, f64) {
        let lo = self.hi.to_f64().unwrap_or(2.0) / 2.0;
        let hi = self.lo.to_f64().unwrap_or(-2.0) / 2.0;
        let slack = 4.0 * f64::EPSILON;
        let a_lo = (lo + slack).clamp(-1.0, 1.0).acos() - slack;
        let a_hi = (hi - slack).clamp(-1.0, 1.0).acos() + slack;
        (a_lo.max(0.0), a_hi.min(std::f64::consts::PI))
    }

    /// Certified position of a ball relative to the interval: `Less` if the
    /// ball lies entirely below `lo`, `Greater` if entirely above `hi`.
    pub fn compare_ball(&self, x: &Ball) -> Option<Ordering> {
        if x.cmp_rational(&self.lo) == Some(Ordering::Less) {
            Some(Ordering::Less)
        } else if x.cmp_rational(&self.hi) == Some(Ordering::Greater) {
            Some(Ordering::Greater)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCircleZeroReport {
    pub chebyshev: IntPoly,
    /// Sorted by increasing `x`, i.e. decreasing angle.
    pub roots: Vec<RootInterval>,
    /// Multiplicity of `x = 2` (`t = 1`).
    pub at_two: u32,
    /// Multiplicity of `x = -2` (`t = -1`).
    pub at_minus_two: u32,
    squarefree: IntPoly,
}

impl UnitCircleZeroReport {
    pub fn is_empty(&self) -> bool {
        self.roots.is_empty() && self.at_two == 0 && self.at_minus_two == 0
    }

    pub fn odd_roots(&self) -> impl Iterator<Item = &RootInterval> {
        self.roots.iter().filter(|r| r.parity() == Parity::Odd)
    }

    /// Bisect root `idx` until its width is below `2^-bits`.
    pub fn refine_root(&self, idx: usize, bits: u32) -> RootInterval {
        let mut r = self.roots[idx].clone();
        refine(&self.squarefree, &mut r, bits);
        r
    }
}

impl Serialize for RootInterval {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("RootInterval", 5)?;
        st.serialize_field("interval", &[rational_string(&self.lo), rational_string(&self.hi)])?;
        st.serialize_field("multiplicity", &self.multiplicity)?;
        st.serialize_field("parity", &self.parity())?;
        let (a, b) = self.angle_enclosure();
        st.serialize_field("angle", &[a, b])?;
        st.serialize_field("zero_angles", &[[a, b], [2.0 * std::f64::consts::PI - b, 2.0 * std::f64::consts::PI - a]])?;
        st.end()
    }
}

impl Serialize for UnitCircleZeroReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("UnitCircleZeroReport", 4)?;
        st.serialize_field("chebyshev", &self.chebyshev.to_string())?;
        st.serialize_field("roots", &self.roots)?;
        st.serialize_field("at_two", &self.at_two)?;
        st.serialize_field("at_minus_two", &self.at_minus_two)?;
        st.end()
    }
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// A split point strictly inside `(lo, hi)` where `q` does not vanish.
fn split_point(q: &IntPoly, lo: &BigRational, hi: &BigRational) -> BigRational {
    const FRACTIONS: [(i64, i64); 6] = [(1, 2), (1, 3), (2, 3), (2, 5), (3, 5), (3, 7)];
    let w = hi - lo;
    for &(a, b) in FRACTIONS.iter() {
        let m = lo + &w * BigRational::new(a.into(), b.into());
        if q.sign_at(&m) != Ordering::Equal {
            return m;
        }
    }
    let mut k = 11i64;
    loop {
        let m = lo + &w * BigRational::new(5.into(), k.into());
        if q.sign_at(&m) != Ordering::Equal {
            return m;
        }
        k += 2;
    }
}

fn isolate(q: &IntPoly, chain: &[IntPoly], lo: BigRational, hi: BigRational, out: &mut Vec<(BigRational, BigRational)>) {
    let count = sign_variations(chain, &lo) as i64 - sign_variations(chain, &hi) as i64;
    match count {
        0 => {}
        1 => out.push((lo, hi)),
        _ => {
            let m = split_point(q, &lo, &hi);
            isolate(q, chain, lo, m.clone(), out);
            isolate(q, chain, m, hi, out);
        }
    }
}

/// Shrink an interval around a simple root of the square-free `q`.
fn refine(q: &IntPoly, r: &mut RootInterval, bits: u32) {
    let target = BigRational::new(BigInt::one(), BigInt::one() << bits);
    let s_lo = q.sign_at(&r.lo);
    while r.width() >= target {
        let m = split_point(q, &r.lo, &r.hi);
        if q.sign_at(&m) == s_lo {
            r.lo = m;
        } else {
            r.hi = m;
        }
    }
}

/// Unit-circle zeros with intervals refined to width `< 2^-32`.
pub fn unit_circle_zeros(f: &PalindromicForm) -> Result<UnitCircleZeroReport> {
    unit_circle_zeros_refined(f, DEFAULT_REFINE_BITS)
}

pub fn unit_circle_zeros_refined(f: &PalindromicForm, refine_bits: u32) -> Result<UnitCircleZeroReport> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let p = chebyshev_transform(f);
    let at_two = p.root_multiplicity(2);
    let at_minus_two = p.root_multiplicity(-2);
    let factors = p.square_free_decomposition();

    // Square-free part with the endpoint roots removed.
    let mut q = IntPoly::constant(BigInt::one());
    for (g, _) in &factors {
        q = &q * g;
    }
    for c in [2, -2] {
        while let Some(d) = q.div_exact(&IntPoly::linear_root(c)) {
            q = d;
        }
    }
    let deflated: Vec<(IntPoly, u32)> = factors
        .iter()
        .map(|(g, i)| {
            let mut g = g.clone();
            for c in [2, -2] {
                while let Some(d) = g.div_exact(&IntPoly::linear_root(c)) {
                    g = d;
                }
            }
            (g, *i)
        })
        .collect();
    let mut roots = Vec::new();
    if q.degree().unwrap_or(0) > 0 {
        let chain = q.sturm_chain();
        let mut raw = Vec::new();
        isolate(&q, &chain, rat(-2), rat(2), &mut raw);
        for (lo, hi) in raw {
            // Exactly one Yun factor changes sign across the interval.
            let multiplicity = deflated
                .iter()
                .find(|(g, _)| {
                    let (a, b) = (g.sign_at(&lo), g.sign_at(&hi));
                    a != Ordering::Equal && b != Ordering::Equal && a != b
                })
                .map(|(_, i)| *i)
                .expect("isolated root belongs to a square-free factor");
            let mut r = RootInterval { lo, hi, multiplicity };
            refine(&q, &mut r, refine_bits);
            roots.push(r);
        }
    }
    roots.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(UnitCircleZeroReport { chebyshev: p, roots, at_two, at_minus_two, squarefree: q })
}

/// The odd-order zero of smallest angle (largest `x`) in `(-2, 2)`, if any.
/// Zeros at `t = ±1` are not witnesses.
pub fn has_odd_order_unit_zero(f: &PalindromicForm) -> Result<Option<RootInterval>> {
    let report = unit_circle_zeros(f)?;
    Ok(report.odd_roots().last().cloned())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CriterionVerdict {
    pub holds: bool,
    /// Largest `j` satisfying the inequality.
    pub witness_j: Option<usize>,
    /// Whether the inequality is strict at the witness.
    pub strict: bool,
    /// Every `j` satisfying the inequality, ascending.
    pub satisfied: Vec<usize>,
}

/// Outcome of `|a_j| ≥ |a_0| cos(π/n)`: `None` if false, else `Some(strict)`.
fn compare_cos(aj: &BigInt, a0: &BigInt, n: usize, start_bits: Precision) -> Result<Option<bool>> {
    let (aj, a0) = (aj.abs(), a0.abs());
    if a0.is_zero() {
        return Ok(Some(!aj.is_zero()));
    }
    match n {
        3 => {
            let lhs: BigInt = &aj * 2;
            Ok(match lhs.cmp(&a0) {
                Ordering::Less => None,
                Ordering::Equal => Some(false),
                Ordering::Greater => Some(true),
            })
        }
        // cos²(π/4) = 1/2; equality would make √2 rational.
        4 => Ok(if &aj * &aj * 2 >= &a0 * &a0 { Some(true) } else { None }),
        _ => {
            let mut bits = start_bits.max(64);
            loop {
                let angle = Ball::pi(bits).div(&Ball::from_int(n as i64), bits).expect("n > 0");
                let rhs = angle.cos(bits).mul(&Ball::from_bigint(&a0), bits);
                match Ball::from_bigint(&aj).cmp_ball(&rhs) {
                    Some(Ordering::Less) => return Ok(None),
                    Some(_) => return Ok(Some(true)),
                    None if bits >= MAX_PRECISION_BITS => return Err(Error::Undecided { bits }),
                    None => bits = (bits * 2).min(MAX_PRECISION_BITS),
                }
            }
        }
    }
}

/// Scan `j = 1..d` for `|a_j| ≥ |a_0|·cos(π/(⌊d/j⌋ + 2))`.
pub fn km_inequality(f: &PalindromicForm, strict_only: bool) -> Result<CriterionVerdict> {
    km_inequality_with(f, strict_only, DEFAULT_PRECISION_BITS)
}

pub fn km_inequality_with(f: &PalindromicForm, strict_only: bool, bits: Precision) -> Result<CriterionVerdict> {
    let d = f.degree();
    let a0 = f.coeff(0);
    let mut satisfied = Vec::new();
    let mut strict = false;
    for j in 1..=d {
        let n = d / j + 2;
        if let Some(s) = compare_cos(f.coeff(j), a0, n, bits)? {
            if s || !strict_only {
                satisfied.push(j);
                strict = s;
            }
        }
    }
    Ok(CriterionVerdict {
        holds: !satisfied.is_empty(),
        witness_j: satisfied.last().copied(),
        strict,
        satisfied,
    })
}

/// Verdict of the coefficient criterion for odd-order unit-circle zeros.
/// Requires `a_0` odd.
pub fn criterion_verdict(f: &PalindromicForm) -> Result<CriterionVerdict> {
    let a0 = f.coeff(0);
    if (a0 % 2u32).is_zero() {
        return Err(Error::EvenConstantTerm { a0: a0.to_string() });
    }
    km_inequality(f, false)
}

pub fn criterion_odd_order(f: &PalindromicForm) -> Result<bool> {
    Ok(criterion_verdict(f)?.holds)
}

/// Nonzero coefficients all `±1`, alternating in sign from `a_d` down to `a_0`.
pub fn is_lspace_form(f: &PalindromicForm) -> bool {
    if f.is_zero() || f.coeff(0).is_zero() {
        return false;
    }
    let nonzero: Vec<&BigInt> = f.coeffs().iter().rev().filter(|c| !c.is_zero()).collect();
    if nonzero.iter().any(|c| c.abs() != BigInt::one()) {
        return false;
    }
    nonzero.windows(2).all(|w| w[0] != w[1])
}
