//! Midpoint–radius ball arithmetic at arbitrary binary precision.
//!
//! A [`Ball`] is a dyadic midpoint with an upward-rounded radius; every
//! operation returns a ball guaranteed to contain the exact result for all
//! inputs inside the operand balls. Midpoints are rounded to the requested
//! number of bits and the rounding error is folded into the radius.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Working precision in bits.
pub type Precision = u32;

/// Exact dyadic number `man · 2^exp`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dyadic {
    man: BigInt,
    exp: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { man: BigInt::zero(), exp: 0 }
    }

    pub fn new(man: BigInt, exp: i64) -> Self {
        Self { man, exp }.trimmed()
    }

    fn trimmed(mut self) -> Self {
        if self.man.is_zero() {
            self.exp = 0;
            return self;
        }
        let tz = self.man.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.man >>= tz;
            self.exp += tz as i64;
        }
        self
    }

    pub fn from_f64(x: f64) -> Self {
        assert!(x.is_finite(), "dyadic from non-finite float");
        if x == 0.0 {
            return Self::zero();
        }
        let bits = x.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1 };
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1 << 52), raw_exp - 1075)
        };
        Self::new(BigInt::from(m) * sign, e)
    }

    pub fn is_zero(&self) -> bool {
        self.man.is_zero()
    }

    pub fn abs(&self) -> Self {
        Self { man: self.man.abs(), exp: self.exp }
    }

    fn neg(&self) -> Self {
        Self { man: -&self.man, exp: self.exp }
    }

    /// Bit position just above the leading bit: `|x| < 2^top`.
    fn top(&self) -> i64 {
        self.man.bits() as i64 + self.exp
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.man << (self.exp - e) as u64;
        let b = &other.man << (other.exp - e) as u64;
        Self::new(a + b, e)
    }

    fn mul(&self, other: &Self) -> Self {
        Self::new(&self.man * &other.man, self.exp + other.exp)
    }

    fn sign(&self) -> Ordering {
        match self.man.sign() {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }

    pub fn cmp_value(&self, other: &Self) -> Ordering {
        self.add(&other.neg()).sign()
    }

    /// Round toward -∞ to at most `prec` mantissa bits; returns the bound
    /// `2^k` on the rounding error (zero when exact).
    fn round(&self, prec: Precision) -> (Self, Mag) {
        let bits = self.man.bits();
        if bits <= prec as u64 {
            return (self.clone(), Mag::zero());
        }
        let shift = bits - prec as u64;
        let man = &self.man >> shift;
        let exp = self.exp + shift as i64;
        (Self::new(man, exp), Mag::pow2(exp))
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.man.bits();
        let shift = bits.saturating_sub(60);
        let m = (&self.man >> shift).to_f64().unwrap_or(0.0);
        m * 2f64.powi((self.exp + shift as i64).clamp(-2000, 2000) as i32)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.man << self.exp as u64)
        } else {
            BigRational::new(self.man.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }
}

const MAG_BITS: u32 = 62;

/// Nonnegative upper bound `man · 2^exp` with a 62-bit mantissa.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mag {
    man: u64,
    exp: i64,
}

impl Mag {
    pub fn zero() -> Self {
        Self { man: 0, exp: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.man == 0
    }

    pub fn pow2(e: i64) -> Self {
        Self { man: 1 << (MAG_BITS - 1), exp: e - (MAG_BITS as i64 - 1) }
    }

    /// Normalize a wide mantissa, rounding up.
    fn from_u128_up(m: u128, e: i64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let bits = 128 - m.leading_zeros();
        if bits <= MAG_BITS {
            let s = MAG_BITS - bits;
            return Self { man: (m << s) as u64, exp: e - s as i64 };
        }
        let s = bits - MAG_BITS;
        let mut man = m >> s;
        if man << s != m {
            man += 1;
        }
        let mut exp = e + s as i64;
        if man >> MAG_BITS != 0 {
            man >>= 1;
            man += 1;
            exp += 1;
        }
        Self { man: man as u64, exp }
    }

    fn from_u128_down(m: u128, e: i64) -> Self {
        if m == 0 {
            return Self::zero();
        }
        let bits = 128 - m.leading_zeros();
        if bits <= MAG_BITS {
            let s = MAG_BITS - bits;
            return Self { man: (m << s) as u64, exp: e - s as i64 };
        }
        let s = bits - MAG_BITS;
        Self { man: (m >> s) as u64, exp: e + s as i64 }
    }

    fn from_bigint(m: &BigInt, e: i64, up: bool) -> Self {
        let m = m.abs();
        let bits = m.bits();
        if bits <= 120 {
            let v = m.to_u128().unwrap();
            return if up { Self::from_u128_up(v, e) } else { Self::from_u128_down(v, e) };
        }
        let s = bits - 120;
        let top = (&m >> s).to_u128().unwrap();
        if up {
            // Any discarded bits at all push the bound up by one unit.
            Self::from_u128_up(top + 1, e + s as i64)
        } else {
            Self::from_u128_down(top, e + s as i64)
        }
    }

    pub fn from_dyadic_up(d: &Dyadic) -> Self {
        Self::from_bigint(&d.man, d.exp, true)
    }

    pub fn from_dyadic_down(d: &Dyadic) -> Self {
        Self::from_bigint(&d.man, d.exp, false)
    }

    pub fn to_dyadic(self) -> Dyadic {
        Dyadic::new(BigInt::from(self.man), self.exp)
    }

    pub fn to_f64(self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        (self.man as f64) * 2f64.powi(self.exp.clamp(-2000, 2000) as i32)
    }
}

/// Upper bound on the sum.
impl Add for Mag {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let (hi, lo) = if self.exp >= other.exp { (self, other) } else { (other, self) };
        let diff = (hi.exp - lo.exp) as u64;
        // Keep 64 guard bits of headroom from u128.
        let hi_m = (hi.man as u128) << 64;
        let base = hi.exp - 64;
        let lo_m = if diff >= 126 {
            1
        } else {
            let shifted = (lo.man as u128) << 64;
            let v = shifted >> diff;
            if v << diff != shifted { v + 1 } else { v }
        };
        Self::from_u128_up(hi_m + lo_m, base)
    }
}

/// Upper bound on the product.
impl Mul for Mag {
    type Output = Self;

    fn mul(self, other: Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::from_u128_up(self.man as u128 * other.man as u128, self.exp + other.exp)
    }
}

/// Upper bound on the quotient.
impl Div for Mag {
    type Output = Self;

    fn div(self, other: Self) -> Self {
        assert!(!other.is_zero(), "magnitude division by zero");
        if self.is_zero() {
            return Self::zero();
        }
        let num = (self.man as u128) << 64;
        let den = other.man as u128;
        let q = num / den;
        let q = if q * den != num { q + 1 } else { q };
        Self::from_u128_up(q, self.exp - 64 - other.exp)
    }
}

/// Real ball `[mid - rad, mid + rad]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    mid: Dyadic,
    rad: Mag,
}

impl Ball {
    pub fn zero() -> Self {
        Self { mid: Dyadic::zero(), rad: Mag::zero() }
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn exact(mid: Dyadic) -> Self {
        Self { mid, rad: Mag::zero() }
    }

    pub fn from_int(v: i64) -> Self {
        Self::exact(Dyadic::new(BigInt::from(v), 0))
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::exact(Dyadic::new(v.clone(), 0))
    }

    pub fn from_f64(x: f64) -> Self {
        Self::exact(Dyadic::from_f64(x))
    }

    /// Enclosure of a rational number.
    pub fn from_rational(q: &BigRational, prec: Precision) -> Self {
        let (n, d) = (q.numer(), q.denom());
        if d.is_one() {
            return Self::from_bigint(n).rounded(prec);
        }
        // floor(n 2^k / d) has about prec bits; error below one unit.
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let k = k.max(0) as u64;
        let scaled = n << k;
        let quot = scaled.div_floor(d);
        let mid = Dyadic::new(quot, -(k as i64));
        let ball = Self { mid, rad: Mag::pow2(-(k as i64)) };
        ball.rounded(prec)
    }

    pub fn mid(&self) -> &Dyadic {
        &self.mid
    }

    pub fn rad(&self) -> Mag {
        self.rad
    }

    pub fn mid_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn radius_f64(&self) -> f64 {
        self.rad.to_f64()
    }

    fn rounded(self, prec: Precision) -> Self {
        let (mid, err) = self.mid.round(prec);
        Self { mid, rad: self.rad.add(err) }
    }

    /// Widen by an absolute amount.
    pub fn add_error(&self, err: Mag) -> Self {
        Self { mid: self.mid.clone(), rad: self.rad.add(err) }
    }

    pub fn neg(&self) -> Self {
        Self { mid: self.mid.neg(), rad: self.rad }
    }

    pub fn abs_upper(&self) -> Mag {
        Mag::from_dyadic_up(&self.mid).add(self.rad)
    }

    pub fn add(&self, other: &Self, prec: Precision) -> Self {
        // An operand far below the other's last bit only widens the radius.
        if !self.mid.is_zero() && !other.mid.is_zero() {
            let (big, small) = if self.mid.top() >= other.mid.top() {
                (self, other)
            } else {
                (other, self)
            };
            if small.mid.top() < big.mid.top() - prec as i64 - 64 {
                let rad = big
                    .rad
                    .add(small.rad)
                    .add(Mag::from_dyadic_up(&small.mid));
                return Self { mid: big.mid.clone(), rad }.rounded(prec);
            }
        }
        Self {
            mid: self.mid.add(&other.mid),
            rad: self.rad.add(other.rad),
        }
        .rounded(prec)
    }

    pub fn sub(&self, other: &Self, prec: Precision) -> Self {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Self, prec: Precision) -> Self {
        let mid = self.mid.mul(&other.mid);
        let a = Mag::from_dyadic_up(&self.mid);
        let b = Mag::from_dyadic_up(&other.mid);
        let rad = a
            .mul(other.rad)
            .add(b.mul(self.rad))
            .add(self.rad.mul(other.rad));
        Self { mid, rad }.rounded(prec)
    }

    pub fn mul_int(&self, k: i64, prec: Precision) -> Self {
        self.mul(&Self::from_int(k), prec)
    }

    /// Multiply by `2^e` exactly.
    pub fn mul_pow2(&self, e: i64) -> Self {
        Self {
            mid: Dyadic::new(self.mid.man.clone(), self.mid.exp + e),
            rad: Mag { man: self.rad.man, exp: self.rad.exp + e },
        }
    }

    /// `1 / self`, `None` if the ball contains zero.
    pub fn inv(&self, prec: Precision) -> Option<Self> {
        if self.contains_zero() {
            return None;
        }
        let m = &self.mid;
        // Midpoint: floor(2^k / man) * 2^(-k - exp).
        let k = prec as u64 + m.man.bits() + 2;
        let (q, r) = (BigInt::one() << k).div_mod_floor(&m.man);
        let mid = Dyadic::new(q, -(k as i64) - m.exp);
        let round_err = if r.is_zero() { Mag::zero() } else { Mag::pow2(-(k as i64) - m.exp) };
        // |1/x - 1/m| <= r / (|m| (|m| - r)) for |x - m| <= r < |m|.
        let rad = if self.rad.is_zero() {
            Mag::zero()
        } else {
            let abs_m = m.abs();
            let gap = abs_m.add(&self.rad.to_dyadic().neg());
            let denom = Mag::from_dyadic_down(&abs_m.mul(&gap));
            self.rad.div(denom)
        };
        Some(Self { mid, rad: rad.add(round_err) }.rounded(prec))
    }

    pub fn div(&self, other: &Self, prec: Precision) -> Option<Self> {
        Some(self.mul(&other.inv(prec)?, prec))
    }

    pub fn sqr(&self, prec: Precision) -> Self {
        self.mul(self, prec)
    }

    fn lower(&self) -> Dyadic {
        self.mid.add(&self.rad.to_dyadic().neg())
    }

    fn upper(&self) -> Dyadic {
        self.mid.add(&self.rad.to_dyadic())
    }

    pub fn contains_zero(&self) -> bool {
        Mag::from_dyadic_down(&self.mid).man == 0
            || self.mid.abs().cmp_value(&self.rad.to_dyadic()) != Ordering::Greater
    }

    pub fn contains_int(&self, v: i64) -> bool {
        self.sub(&Self::from_int(v), u32::MAX).contains_zero()
    }

    pub fn contains_rational(&self, q: &BigRational) -> bool {
        self.cmp_rational(q).is_none()
    }

    /// Certified sign, `None` if the ball contains zero.
    pub fn sign(&self) -> Option<Ordering> {
        if self.contains_zero() {
            None
        } else {
            Some(self.mid.sign())
        }
    }

    /// Certified comparison of every point of the ball against `q`.
    pub fn cmp_rational(&self, q: &BigRational) -> Option<Ordering> {
        let lo = self.lower().to_rational();
        let hi = self.upper().to_rational();
        if &hi < q {
            Some(Ordering::Less)
        } else if &lo > q {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Certified comparison against another ball.
    pub fn cmp_ball(&self, other: &Self) -> Option<Ordering> {
        if self.upper().cmp_value(&other.lower()) == Ordering::Less {
            Some(Ordering::Less)
        } else if self.lower().cmp_value(&other.upper()) == Ordering::Greater {
            Some(Ordering::Greater)
        } else {
            None
        }
    }

    /// Enclosure of π by Machin's formula.
    pub fn pi(prec: Precision) -> Self {
        let wp = prec as u64 + 64;
        let (a5, e5) = atan_recip(5, wp);
        let (a239, e239) = atan_recip(239, wp);
        let mid = a5 * 16 - a239 * 4;
        let err_units = 16 * e5 + 4 * e239;
        let ball = Self {
            mid: Dyadic::new(mid, -(wp as i64)),
            rad: Mag::from_u128_up(err_units as u128, -(wp as i64)),
        };
        ball.rounded(prec)
    }

    /// `(sin x, cos x)` enclosures.
    pub fn sin_cos(&self, prec: Precision) -> (Self, Self) {
        let mid = &self.mid;
        if mid.is_zero() {
            let s = Self { mid: Dyadic::zero(), rad: self.rad };
            let c = Self { mid: Dyadic::new(BigInt::one(), 0), rad: self.rad };
            return (s, c);
        }
        // Reduce to |y| < 2^-10 by halving k times, then double back up.
        let k = (mid.top() + 10).max(0);
        let wp = prec + 2 * k as u32 + 32;
        let y = Self::exact(Dyadic::new(mid.man.clone(), mid.exp - k));
        let y2 = y.sqr(wp);
        let threshold = Mag::pow2(-(wp as i64) - 4);
        let mut sin = Self::zero();
        let mut cos = Self::zero();
        let mut term_s = y.clone();
        let mut term_c = Self::one();
        let mut n: i64 = 1;
        loop {
            sin = sin.add(&term_s, wp);
            cos = cos.add(&term_c, wp);
            // next: term_c * (-y^2) / ((n)(n+1)), term_s * (-y^2) / ((n+1)(n+2))
            let dc = Self::from_int(-n * (n + 1));
            let ds = Self::from_int(-(n + 1) * (n + 2));
            term_c = term_c.mul(&y2, wp).div(&dc, wp).unwrap();
            term_s = term_s.mul(&y2, wp).div(&ds, wp).unwrap();
            n += 2;
            let tc = term_c.abs_upper();
            let ts = term_s.abs_upper();
            if tc.add(ts).to_dyadic().cmp_value(&threshold.to_dyadic()) == Ordering::Less {
                // Alternating, decreasing tails: bounded by the first omitted term.
                sin = sin.add_error(ts);
                cos = cos.add_error(tc);
                break;
            }
        }
        for _ in 0..k {
            let s2 = sin.mul(&cos, wp).mul_pow2(1);
            let c2 = cos.sqr(wp).mul_pow2(1).sub(&Self::one(), wp);
            sin = s2;
            cos = c2;
        }
        // sin and cos are 1-Lipschitz.
        (
            sin.add_error(self.rad).rounded(prec),
            cos.add_error(self.rad).rounded(prec),
        )
    }

    pub fn cos(&self, prec: Precision) -> Self {
        self.sin_cos(prec).1
    }

    pub fn sin(&self, prec: Precision) -> Self {
        self.sin_cos(prec).0
    }
}

/// Fixed-point `atan(1/k) · 2^wp` and its error bound in units.
fn atan_recip(k: u64, wp: u64) -> (BigInt, u64) {
    let kb = BigInt::from(k);
    let k2 = &kb * &kb;
    let mut power = (BigInt::one() << wp) / &kb; // floor(2^wp / k^(2n+1))
    let mut sum = BigInt::zero();
    let mut n: u64 = 0;
    while !power.is_zero() {
        let term = &power / BigInt::from(2 * n + 1);
        if n.is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &k2;
        n += 1;
    }
    // Two truncations per term plus the alternating tail (< 1 unit).
    (sum, 2 * n + 2)
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:e} +/- {:.3e}]", self.mid_f64(), self.radius_f64())
    }
}

/// Complex ball as a pair of real balls.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexBall {
    pub re: Ball,
    pub im: Ball,
}

impl ComplexBall {
    pub fn new(re: Ball, im: Ball) -> Self {
        Self { re, im }
    }

    pub fn zero() -> Self {
        Self::new(Ball::zero(), Ball::zero())
    }

    pub fn one() -> Self {
        Self::new(Ball::one(), Ball::zero())
    }

    pub fn from_bigint(v: &BigInt) -> Self {
        Self::new(Ball::from_bigint(v), Ball::zero())
    }

    /// `e^{iα}`.
    pub fn unit(angle: &Angle, prec: Precision) -> Self {
        let (s, c) = angle.ball(prec + 8).sin_cos(prec);
        Self::new(c, s)
    }

    pub fn add(&self, other: &Self, prec: Precision) -> Self {
        Self::new(self.re.add(&other.re, prec), self.im.add(&other.im, prec))
    }

    pub fn sub(&self, other: &Self, prec: Precision) -> Self {
        Self::new(self.re.sub(&other.re, prec), self.im.sub(&other.im, prec))
    }

    pub fn mul(&self, other: &Self, prec: Precision) -> Self {
        let re = self.re.mul(&other.re, prec).sub(&self.im.mul(&other.im, prec), prec);
        let im = self.re.mul(&other.im, prec).add(&self.im.mul(&other.re, prec), prec);
        Self::new(re, im)
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), self.im.neg())
    }

    pub fn norm_sqr(&self, prec: Precision) -> Ball {
        self.re.sqr(prec).add(&self.im.sqr(prec), prec)
    }

    pub fn inv(&self, prec: Precision) -> Option<Self> {
        let n = self.norm_sqr(prec).inv(prec)?;
        Some(Self::new(self.re.mul(&n, prec), self.im.neg().mul(&n, prec)))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }
}

/// An angle, exact as a rational multiple of π or given as a float in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    PiTimes(BigRational),
    Radians(f64),
}

impl Angle {
    pub fn pi_times(q: BigRational) -> Self {
        Angle::PiTimes(q)
    }

    /// `2π k / n`.
    pub fn turn_fraction(k: i64, n: i64) -> Self {
        Angle::PiTimes(BigRational::new(BigInt::from(2 * k), BigInt::from(n)))
    }

    pub fn ball(&self, prec: Precision) -> Ball {
        match self {
            Angle::PiTimes(q) => Ball::pi(prec + 8).mul(&Ball::from_rational(q, prec + 8), prec),
            Angle::Radians(x) => Ball::from_f64(*x),
        }
    }

    /// `2π - α`.
    pub fn reflect(&self) -> Self {
        match self {
            Angle::PiTimes(q) => Angle::PiTimes(BigRational::from_integer(2.into()) - q),
            Angle::Radians(x) => Angle::Radians(2.0 * std::f64::consts::PI - x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Angle::PiTimes(q) => q.to_f64().unwrap_or(f64::NAN) * std::f64::consts::PI,
            Angle::Radians(x) => *x,
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiTimes(q) if q.is_one() => write!(f, "pi"),
            Angle::PiTimes(q) => write!(f, "{q}*pi"),
            Angle::Radians(x) => write!(f, "{x}"),
        }
    }
}

impl std::str::FromStr for Angle {
    type Err = crate::Error;

    /// `pi`, `pi/3`, `2pi/3`, `2*pi/3`, `0.5pi`, or a plain number of radians.
    fn from_str(s: &str) -> crate::Result<Self> {
        let t: String = s.trim().to_ascii_lowercase().chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || crate::Error::Parse(format!("bad angle {s:?}"));
        if let Some(i) = t.find("pi") {
            let num = t[..i].trim_end_matches('*');
            let rest = &t[i + 2..];
            let num: BigRational = if num.is_empty() {
                BigRational::one()
            } else if num == "-" {
                -BigRational::one()
            } else {
                parse_rational(num).ok_or_else(bad)?
            };
            let den: BigRational = if rest.is_empty() {
                BigRational::one()
            } else {
                parse_rational(rest.strip_prefix('/').ok_or_else(bad)?).ok_or_else(bad)?
            };
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Angle::PiTimes(num / den))
        } else {
            t.parse::<f64>().map(Angle::Radians).map_err(|_| bad())
        }
    }
}

/// Integer, `p/q`, or a finite decimal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.parse().ok()?;
        let q: BigInt = q.parse().ok()?;
        if q.is_zero() {
            return None;
        }
        return Some(BigRational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        let neg = ip.starts_with('-');
        let ip = ip.trim_start_matches(['-', '+']);
        let digits = format!("{ip}{fp}");
        let n: BigInt = if digits.is_empty() { return None } else { digits.parse().ok()? };
        let d = num_traits::pow(BigInt::from(10), fp.len());
        let q = BigRational::new(n, d);
        return Some(if neg { -q } else { q });
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pi_enclosure() {
        let p = Ball::pi(128);
        assert!(p.radius_f64() < 1e-36);
        assert!((p.mid_f64() - std::f64::consts::PI).abs() < 1e-15);
        // 355/113 is above π by ~2.7e-7.
        assert_eq!(p.cmp_rational(&BigRational::new(355.into(), 113.into())), Some(Ordering::Less));
        let hi = Ball::pi(1024);
        assert!(hi.radius_f64() < 1e-300 || hi.radius_f64() == 0.0);
        assert!(p.cmp_ball(&hi).is_none());
    }

    #[test]
    fn trig_at_known_angles() {
        let prec = 200;
        let third = Angle::pi_times(BigRational::new(1.into(), 3.into())).ball(prec);
        let c = third.cos(prec);
        assert!(c.contains_rational(&BigRational::new(1.into(), 2.into())));
        assert!(c.radius_f64() < 1e-50);
        let half = Angle::pi_times(BigRational::new(1.into(), 2.into())).ball(prec);
        assert!(half.cos(prec).contains_zero());
        assert!(half.sin(prec).contains_int(1));
        let (s, c) = Ball::pi(prec).sin_cos(prec);
        assert!(s.contains_zero() && c.contains_int(-1));
        let quarter = Angle::pi_times(BigRational::new(1.into(), 4.into())).ball(prec);
        let c2 = quarter.cos(prec).sqr(prec);
        assert!(c2.contains_rational(&BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn inverse_and_division() {
        let prec = 100;
        let three = Ball::from_int(3);
        let t = three.inv(prec).unwrap();
        assert!(t.contains_rational(&BigRational::new(1.into(), 3.into())));
        assert!(t.mul(&three, prec).contains_int(1));
        let fuzzy = Ball::from_int(2).add_error(Mag::pow2(-3));
        let i = fuzzy.inv(prec).unwrap();
        assert!(i.contains_rational(&BigRational::new(8.into(), 17.into()))); // 1/2.125
        assert!(i.contains_rational(&BigRational::new(8.into(), 15.into()))); // 1/1.875
        assert!(Ball::from_int(0).inv(prec).is_none());
        assert!(Ball::from_int(1).add_error(Mag::pow2(1)).inv(prec).is_none());
    }

    #[test]
    fn angle_parsing() {
        assert_eq!("pi".parse::<Angle>().unwrap(), Angle::PiTimes(BigRational::one()));
        assert_eq!(
            "2pi/3".parse::<Angle>().unwrap(),
            Angle::PiTimes(BigRational::new(2.into(), 3.into()))
        );
        assert_eq!(
            "2*pi/3".parse::<Angle>().unwrap(),
            Angle::PiTimes(BigRational::new(2.into(), 3.into()))
        );
        assert_eq!("0.5".parse::<Angle>().unwrap(), Angle::Radians(0.5));
        assert!("pi/0".parse::<Angle>().is_err());
        assert_eq!(parse_rational("-1.25"), Some(BigRational::new((-5).into(), 4.into())));
    }

    #[test]
    fn mag_arithmetic_rounds_up() {
        let a = Mag::pow2(0);
        let b = Mag::pow2(-200);
        let s = a.add(b);
        assert!(s.to_dyadic().cmp_value(&a.to_dyadic()) == Ordering::Greater);
        let third = Mag::pow2(0).div(Mag::from_u128_up(3, 0));
        assert!(third.mul(Mag::from_u128_up(3, 0)).to_dyadic().cmp_value(&Mag::pow2(0).to_dyadic()) != Ordering::Less);
    }

    proptest! {
        #[test]
        fn ops_enclose_exact_rationals(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
            let prec = 64;
            let x = BigRational::new(a.into(), b.into());
            let y = BigRational::new(c.into(), d.into());
            let bx = Ball::from_rational(&x, prec);
            let by = Ball::from_rational(&y, prec);
            prop_assert!(bx.contains_rational(&x));
            prop_assert!(bx.add(&by, prec).contains_rational(&(&x + &y)));
            prop_assert!(bx.sub(&by, prec).contains_rational(&(&x - &y)));
            prop_assert!(bx.mul(&by, prec).contains_rational(&(&x * &y)));
            if c != 0 {
                prop_assert!(bx.div(&by, prec).unwrap().contains_rational(&(&x / &y)));
            }
        }

        #[test]
        fn trig_matches_float(x in -7.0f64..7.0) {
            let b = Ball::from_f64(x);
            let (s, c) = b.sin_cos(96);
            prop_assert!((s.mid_f64() - x.sin()).abs() < 1e-14);
            prop_assert!((c.mid_f64() - x.cos()).abs() < 1e-14);
            prop_assert!(s.radius_f64() < 1e-25);
            // sin^2 + cos^2 = 1
            prop_assert!(s.sqr(96).add(&c.sqr(96), 96).contains_int(1));
        }
    }
}
