//! Dense univariate integer polynomials: exact rational sign evaluation,
//! primitive remainder sequences, Yun square-free decomposition and Sturm
//! chains.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ball::{Ball, Precision};

/// `coeffs[i]` multiplies `x^i`; no trailing zeros, zero polynomial is empty.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_i64(cs: &[i64]) -> Self {
        Self::new(cs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigInt) -> Self {
        Self::new(vec![c])
    }

    pub fn x() -> Self {
        Self::from_i64(&[0, 1])
    }

    /// `x - c`.
    pub fn linear_root(c: i64) -> Self {
        Self::from_i64(&[-c, 1])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn lead(&self) -> Option<&BigInt> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::new(self.coeffs.iter().map(|v| v * c).collect())
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divide by the positive content; the sign of every value is preserved.
    pub fn primitive_part(&self) -> Self {
        let g = self.content();
        if g.is_zero() || g.is_one() {
            return self.clone();
        }
        Self::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn normalized(&self) -> Self {
        let p = self.primitive_part();
        match p.lead() {
            Some(l) if l.is_negative() => -&p,
            _ => p,
        }
    }

    /// Remainder of `|lc(d)|^(deg self - deg d + 1) * self` modulo `d`.
    /// The multiplier is positive, so signs of the true remainder survive.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.degree().expect("division by zero polynomial");
        let Some(sd) = self.degree() else {
            return Self::zero();
        };
        if sd < dd {
            return self.clone();
        }
        let lc = d.lead().unwrap().clone();
        let abs_lc = lc.abs();
        let mut r = self.coeffs.clone();
        let mut steps = sd - dd + 1;
        for top in (dd..=sd).rev() {
            // r <- |lc| r - sgn(lc) r_top x^(top-dd) d
            let coef = r[top].clone();
            for v in r.iter_mut() {
                *v *= &abs_lc;
            }
            let factor = if lc.is_negative() { -coef } else { coef };
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[top - dd + i] -= &factor * dc;
            }
            debug_assert!(r[top].is_zero());
            r.truncate(top);
            steps -= 1;
        }
        debug_assert_eq!(steps, 0);
        Self::new(r)
    }

    /// Exact quotient in `Z[x]`, `None` when it does not exist.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.degree()?;
        let Some(sd) = self.degree() else {
            return Some(Self::zero());
        };
        if sd < dd {
            return None;
        }
        let lc = d.lead().unwrap();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); sd - dd + 1];
        for top in (dd..=sd).rev() {
            let (c, rem) = r[top].div_rem(lc);
            if !rem.is_zero() {
                return None;
            }
            for (i, dc) in d.coeffs.iter().enumerate() {
                r[top - dd + i] -= &c * dc;
            }
            q[top - dd] = c;
        }
        if r.iter().any(|c| !c.is_zero()) {
            return None;
        }
        Some(Self::new(q))
    }

    /// Greatest common divisor, primitive with positive leading coefficient.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.normalized();
        let mut b = other.normalized();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).normalized();
            a = b;
            b = r;
        }
        a
    }

    /// Exact sign of the value at a rational point.
    pub fn sign_at(&self, r: &BigRational) -> Ordering {
        // Homogenized Horner: b^deg p(a/b) with b > 0.
        let (a, b) = (r.numer(), r.denom());
        let mut acc = BigInt::zero();
        let mut bpow = BigInt::one();
        for c in self.coeffs.iter().rev() {
            acc = acc * a + c * &bpow;
            bpow *= b;
        }
        acc.sign_ordering()
    }

    pub fn eval_rational(&self, r: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * r + BigRational::from_integer(c.clone());
        }
        acc
    }

    pub fn eval_ball(&self, x: &Ball, prec: Precision) -> Ball {
        let mut acc = Ball::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x, prec).add(&Ball::from_bigint(c), prec);
        }
        acc
    }

    /// Multiplicity of `x = c` as a root.
    pub fn root_multiplicity(&self, c: i64) -> u32 {
        if self.is_zero() {
            return 0;
        }
        let lin = Self::linear_root(c);
        let mut p = self.clone();
        let mut m = 0;
        while let Some(q) = p.div_exact(&lin) {
            p = q;
            m += 1;
        }
        m
    }

    /// Yun decomposition: `self = c · Π f_i^i` with pairwise coprime
    /// square-free primitive `f_i`. Returns `(f_i, i)` for nonconstant `f_i`.
    pub fn square_free_decomposition(&self) -> Vec<(IntPoly, u32)> {
        let a = self.normalized();
        if a.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let b = a.derivative();
        let c = a.gcd(&b);
        let mut w = a.div_exact(&c).expect("gcd divides");
        let mut y = b.div_exact(&c).expect("gcd divides derivative");
        let mut z = &y - &w.derivative();
        let mut out = Vec::new();
        let mut i = 1;
        while w.degree().unwrap_or(0) > 0 {
            let g = if z.is_zero() { w.normalized() } else { w.gcd(&z) };
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), i));
            }
            w = w.div_exact(&g).expect("gcd divides");
            y = z.div_exact(&g).expect("gcd divides");
            z = &y - &w.derivative();
            i += 1;
        }
        out
    }

    /// Sturm chain `q, q', -rem, ...` up to positive factors.
    pub fn sturm_chain(&self) -> Vec<IntPoly> {
        let mut chain = vec![self.primitive_part(), self.derivative().primitive_part()];
        loop {
            let n = chain.len();
            if chain[n - 1].is_zero() {
                chain.pop();
                break;
            }
            if chain[n - 1].degree() == Some(0) {
                break;
            }
            let r = chain[n - 2].pseudo_rem(&chain[n - 1]);
            chain.push((-&r).primitive_part());
        }
        chain
    }
}

/// Sign variations of a Sturm chain at `r`.
pub fn sign_variations(chain: &[IntPoly], r: &BigRational) -> usize {
    let signs: Vec<Ordering> = chain
        .iter()
        .map(|p| p.sign_at(r))
        .filter(|s| *s != Ordering::Equal)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

trait SignOrdering {
    fn sign_ordering(&self) -> Ordering;
}

impl SignOrdering for BigInt {
    fn sign_ordering(&self) -> Ordering {
        if self.is_positive() {
            Ordering::Greater
        } else if self.is_negative() {
            Ordering::Less
        } else {
            Ordering::Equal
        }
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigInt::zero();
        IntPoly::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        self + &(-rhs)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}*x")?,
                (_, true) => write!(f, "x^{e}")?,
                (_, false) => write!(f, "{mag}*x^{e}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}
