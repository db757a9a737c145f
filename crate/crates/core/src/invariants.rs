//! Invariants from a Seifert matrix `V`: the Alexander polynomial
//! `det(tV - Vᵀ)·t^{-g}`, the Levine–Tristram signature of
//! `H(ω) = (1-ω)V + (1-ω̄)Vᵀ`, the Murasugi signature and the determinant.
//!
//! Signatures at irrational angles are decided by an LDLᵀ inertia count over
//! ball arithmetic with precision doubling; nothing is read off a float
//! eigenvalue.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::ball::{Angle, Ball, Precision};
use crate::circle_zeros::{rational_string, unit_circle_zeros, Parity, RootInterval};
use crate::braid::{permutation, BraidWord};
use crate::exec::Exec;
use crate::laurent::{to_palindromic, LaurentPoly};
use crate::linalg::determinant;
use crate::{Error, Result, DEFAULT_PRECISION_BITS, MAX_PRECISION_BITS};

/// Integer matrix with `det(V - Vᵀ) = 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct SeifertMatrix {
    #[serde(with = "crate::serde_int::matrix")]
    entries: Vec<Vec<BigInt>>,
}

impl SeifertMatrix {
    pub fn new(entries: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = entries.len();
        for row in &entries {
            if row.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: row.len() });
            }
        }
        if n % 2 == 1 {
            return Err(Error::InvalidInput(format!("Seifert matrix has odd size {n}")));
        }
        let skew: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| &entries[i][j] - &entries[j][i]).collect())
            .collect();
        let det = determinant(skew);
        if !det.is_one() {
            return Err(Error::NotSeifert { det: det.to_string() });
        }
        Ok(Self { entries })
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Self { entries: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn genus(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn entries(&self) -> &[Vec<BigInt>] {
        &self.entries
    }

    /// `V + Vᵀ`.
    pub fn symmetrized(&self) -> Vec<Vec<BigInt>> {
        let n = self.size();
        (0..n)
            .map(|i| (0..n).map(|j| &self.entries[i][j] + &self.entries[j][i]).collect())
            .collect()
    }
}

impl<'de> Deserialize<'de> for SeifertMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let m = crate::serde_int::matrix::deserialize(d)?;
        SeifertMatrix::new(m).map_err(serde::de::Error::custom)
    }
}

impl FromStr for SeifertMatrix {
    type Err = Error;

    /// JSON array of integer arrays, e.g. `[[-1,1],[0,-1]]`.
    fn from_str(s: &str) -> Result<Self> {
        let m: Vec<Vec<serde_json::Value>> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("Seifert matrix: {e}")))?;
        let entries = m
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|v| match v {
                        serde_json::Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().unwrap())),
                        serde_json::Value::String(s) => {
                            s.parse().map_err(|_| Error::Parse(format!("bad matrix entry {s:?}")))
                        }
                        other => Err(Error::Parse(format!("bad matrix entry {other}"))),
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }
}

impl fmt::Display for SeifertMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .iter()
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

/// `det(tV - Vᵀ)·t^{-g}`; already Conway-normalized for a valid `V`.
pub fn alexander_from_seifert(v: &SeifertMatrix) -> LaurentPoly {
    let n = v.size();
    let t = LaurentPoly::t();
    let m: Vec<Vec<LaurentPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| &t.scale(&v.entries[i][j]) - &LaurentPoly::constant(v.entries[j][i].clone()))
                .collect()
        })
        .collect();
    determinant(m).shift(-(v.genus() as i64))
}

/// `|Δ(-1)| = |det(V + Vᵀ)|`.
pub fn knot_determinant(v: &SeifertMatrix) -> Result<BigInt> {
    let d = determinant(v.symmetrized()).abs();
    if d.is_zero() {
        return Err(Error::NotSeifertConsistent);
    }
    Ok(d)
}

/// Exact inertia `(positive, negative, zero)` of a rational symmetric matrix
/// by symmetric-pivoted LDLᵀ with 2×2 blocks when the diagonal vanishes.
fn exact_inertia(mut m: Vec<Vec<BigRational>>) -> (usize, usize, usize) {
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..m.len()).collect();
    while !active.is_empty() {
        if let Some(&p) = active.iter().find(|&&i| !m[i][i].is_zero()) {
            let d = m[p][p].clone();
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            active.retain(|&i| i != p);
            for &i in &active {
                let f = &m[i][p] / &d;
                for &j in &active {
                    let delta = &f * &m[p][j];
                    m[i][j] -= delta;
                }
            }
            continue;
        }
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !m[i][j].is_zero());
        let Some((p, q)) = pair else { break };
        // Zero diagonal: the block [[0, b], [b, 0]] has one sign of each kind.
        pos += 1;
        neg += 1;
        let b = m[p][q].clone();
        active.retain(|&i| i != p && i != q);
        for &i in &active {
            let (ip, iq) = (m[i][p].clone(), m[i][q].clone());
            for &j in &active {
                // u_i [[0, 1/b], [1/b, 0]] u_jᵀ
                let delta = (&ip * &m[q][j] + &iq * &m[p][j]) / &b;
                m[i][j] -= delta;
            }
        }
    }
    (pos, neg, active.len())
}

/// `sgn(V + Vᵀ)`, exactly.
pub fn murasugi_signature(v: &SeifertMatrix) -> Result<i64> {
    let m: Vec<Vec<BigRational>> = v
        .symmetrized()
        .into_iter()
        .map(|r| r.into_iter().map(BigRational::from_integer).collect())
        .collect();
    let (p, n, z) = exact_inertia(m);
    if z > 0 {
        return Err(Error::NotSeifertConsistent);
    }
    Ok(p as i64 - n as i64)
}

/// Certified inertia `(positive, negative)` of a symmetric ball matrix, or
/// `None` if some pivot cannot be separated from zero at this precision.
fn ball_inertia(mut m: Vec<Vec<Ball>>, prec: Precision) -> Option<(usize, usize)> {
    const ALPHA: f64 = 0.6404; // (1 + √17) / 8
    let (mut pos, mut neg) = (0, 0);
    let mut active: Vec<usize> = (0..m.len()).collect();
    let bump = |s: Ordering, pos: &mut usize, neg: &mut usize| {
        if s == Ordering::Greater {
            *pos += 1
        } else {
            *neg += 1
        }
    };
    while !active.is_empty() {
        let mag = |b: &Ball| b.mid_f64().abs();
        let &p = active
            .iter()
            .max_by(|&&a, &&b| mag(&m[a][a]).total_cmp(&mag(&m[b][b])))
            .unwrap();
        let off = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .filter(|&(i, j)| i < j)
            .max_by(|&(a, b), &(c, d)| mag(&m[a][b]).total_cmp(&mag(&m[c][d])));
        let dmax = mag(&m[p][p]);
        let omax = off.map(|(i, j)| mag(&m[i][j])).unwrap_or(0.0);
        let one_by_one = off.is_none() || dmax >= ALPHA * omax;
        if one_by_one {
            let d = m[p][p].clone();
            bump(d.sign()?, &mut pos, &mut neg);
            let inv = d.inv(prec)?;
            active.retain(|&i| i != p);
            let w: Vec<Ball> = active.iter().map(|&i| m[i][p].mul(&inv, prec)).collect();
            for (a, &i) in active.iter().enumerate() {
                for &j in active.iter().filter(|&&j| j >= i) {
                    let e = m[i][j].sub(&w[a].mul(&m[p][j], prec), prec);
                    m[i][j] = e.clone();
                    m[j][i] = e;
                }
            }
        } else {
            let (p, q) = off.unwrap();
            let (a, b, c) = (m[p][p].clone(), m[p][q].clone(), m[q][q].clone());
            let det = a.mul(&c, prec).sub(&b.sqr(prec), prec);
            match det.sign()? {
                Ordering::Less => {
                    pos += 1;
                    neg += 1;
                }
                _ => {
                    let s = a.sign().or_else(|| c.sign())?;
                    bump(s, &mut pos, &mut neg);
                    bump(s, &mut pos, &mut neg);
                }
            }
            let inv_det = det.inv(prec)?;
            active.retain(|&i| i != p && i != q);
            // w_i = P⁻¹ u_i with u_i = (m[i][p], m[i][q])
            let w: Vec<(Ball, Ball)> = active
                .iter()
                .map(|&i| {
                    let (x, y) = (&m[i][p], &m[i][q]);
                    let w0 = c.mul(x, prec).sub(&b.mul(y, prec), prec).mul(&inv_det, prec);
                    let w1 = a.mul(y, prec).sub(&b.mul(x, prec), prec).mul(&inv_det, prec);
                    (w0, w1)
                })
                .collect();
            for (k, &i) in active.iter().enumerate() {
                for &j in active.iter().filter(|&&j| j >= i) {
                    let corr = w[k].0.mul(&m[p][j], prec).add(&w[k].1.mul(&m[q][j], prec), prec);
                    let e = m[i][j].sub(&corr, prec);
                    m[i][j] = e.clone();
                    m[j][i] = e;
                }
            }
        }
    }
    Some((pos, neg))
}

fn reduce_turns(q: &BigRational) -> BigRational {
    // q mod 2
    let two = BigRational::from_integer(BigInt::from(2));
    let k = (q / &two).floor();
    q - k * two
}

/// Levine–Tristram signature at `ω = e^{iα}`, starting at `prec` bits and
/// doubling up to the cap.
pub fn lt_signature(v: &SeifertMatrix, angle: &Angle, prec: Precision) -> Result<i64> {
    let n = v.size();
    if n == 0 {
        return Ok(0);
    }
    if let Angle::PiTimes(q) = angle {
        let r = reduce_turns(q);
        if r.is_zero() {
            return Err(Error::InvalidInput("signature angle must lie in (0, 2π)".into()));
        }
        if r.is_one() {
            return murasugi_signature(v);
        }
    }
    let sym = v.symmetrized();
    let mut bits = prec.max(32);
    loop {
        let (s, c) = angle.ball(bits + 16).sin_cos(bits);
        let one_minus_c = Ball::one().sub(&c, bits);
        // H = A + iB with A = (1 - cos α)(V + Vᵀ), B = sin α (Vᵀ - V);
        // the real form [[A, -B], [B, A]] carries each eigenvalue twice.
        let mut e = vec![vec![Ball::zero(); 2 * n]; 2 * n];
        for i in 0..n {
            for j in 0..n {
                let a = one_minus_c.mul(&Ball::from_bigint(&sym[i][j]), bits);
                let skew = &v.entries[j][i] - &v.entries[i][j];
                let b = s.mul(&Ball::from_bigint(&skew), bits);
                e[i][j] = a.clone();
                e[n + i][n + j] = a;
                e[i][n + j] = b.neg();
                e[n + i][j] = b;
            }
        }
        if let Some((p, m)) = ball_inertia(e, bits) {
            if p + m == 2 * n {
                return Ok((p as i64 - m as i64) / 2);
            }
        }
        if bits >= MAX_PRECISION_BITS {
            return Err(Error::SingularNearZero { angle: angle.to_string(), bits });
        }
        bits = (bits * 2).min(MAX_PRECISION_BITS);
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProfileSample {
    /// Grid index: `α = 2πk/N`.
    pub k: usize,
    pub angle: f64,
    pub signature: i64,
}

/// Angle enclosure of one unit-circle zero of `Δ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExcludedArc {
    pub lo: f64,
    pub hi: f64,
    /// Isolating interval of `x = 2cos α` as exact `"p/q"` strings.
    pub x_interval: [String; 2],
    pub multiplicity: u32,
    pub parity: Parity,
}

/// Change of the signature between two consecutive decided samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Jump {
    pub lo: f64,
    pub hi: f64,
    pub before: i64,
    pub after: i64,
    pub jump: i64,
    /// Total multiplicity of the zeros crossed.
    pub multiplicity: u32,
    pub jump_mod4: i64,
    pub expected_mod4: i64,
}

impl Jump {
    pub fn is_consistent(&self) -> bool {
        self.jump_mod4 == self.expected_mod4
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SignatureProfile {
    pub grid: usize,
    pub samples: Vec<ProfileSample>,
    /// Grid indices whose `2cos α` meets an isolating interval.
    pub excluded_samples: Vec<usize>,
    pub excluded: Vec<ExcludedArc>,
    pub jumps: Vec<Jump>,
    #[serde(skip)]
    regions: Vec<usize>,
}

impl SignatureProfile {
    /// Samples with no zero of `Δ` between them carry one value.
    pub fn is_piecewise_constant(&self) -> bool {
        self.samples
            .windows(2)
            .zip(self.regions.windows(2))
            .all(|(s, r)| r[0] != r[1] || s[0].signature == s[1].signature)
    }

    pub fn jumps_consistent(&self) -> bool {
        self.jumps.iter().all(Jump::is_consistent)
    }

    pub fn value_at(&self, k: usize) -> Option<i64> {
        self.samples.iter().find(|s| s.k == k).map(|s| s.signature)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("angle,signature\n");
        for s in &self.samples {
            out.push_str(&format!("{},{}\n", s.angle, s.signature));
        }
        out
    }
}

pub fn signature_profile(v: &SeifertMatrix, samples: usize) -> Result<SignatureProfile> {
    signature_profile_with(v, samples, Exec::default(), DEFAULT_PRECISION_BITS)
}

pub fn signature_profile_with(
    v: &SeifertMatrix,
    samples: usize,
    exec: Exec,
    prec: Precision,
) -> Result<SignatureProfile> {
    if samples < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 samples, got {samples}")));
    }
    let delta = alexander_from_seifert(v);
    let roots: Vec<RootInterval> = unit_circle_zeros(&to_palindromic(&delta)?)?.roots;
    let r = roots.len();
    let two_pi = 2.0 * std::f64::consts::PI;

    // Arcs by increasing angle: upper half by decreasing x, then the mirror.
    let mut excluded: Vec<ExcludedArc> = Vec::with_capacity(2 * r);
    for root in roots.iter().rev() {
        let (a, b) = root.angle_enclosure();
        excluded.push(arc(root, a, b));
    }
    for root in roots.iter() {
        let (a, b) = root.angle_enclosure();
        excluded.push(arc(root, two_pi - b, two_pi - a));
    }

    enum Outcome {
        Excluded,
        Value { region: usize, signature: i64 },
    }
    let results: Vec<Result<Outcome>> = exec.map_range(1..samples, |k| {
        let angle = Angle::turn_fraction(k as i64, samples as i64);
        let x = angle.ball(prec).cos(prec).mul_pow2(1);
        let mut region = 0;
        let upper_half = 2 * k <= samples;
        for root in &roots {
            match root.compare_ball(&x) {
                None => return Ok(Outcome::Excluded),
                Some(Ordering::Less) if upper_half => region += 1,
                Some(Ordering::Greater) if !upper_half => region += 1,
                _ => {}
            }
        }
        if !upper_half {
            region += r;
        }
        let signature = lt_signature(v, &angle, prec)?;
        Ok(Outcome::Value { region, signature })
    });

    let mut profile = SignatureProfile {
        grid: samples,
        samples: Vec::new(),
        excluded_samples: Vec::new(),
        excluded,
        jumps: Vec::new(),
        regions: Vec::new(),
    };
    for (k, res) in (1..samples).zip(results) {
        match res? {
            Outcome::Excluded => profile.excluded_samples.push(k),
            Outcome::Value { region, signature } => {
                if let (Some(prev), Some(&prev_region)) = (profile.samples.last(), profile.regions.last()) {
                    if region != prev_region {
                        let crossed = &profile.excluded[prev_region..region];
                        let multiplicity: u32 = crossed.iter().map(|a| a.multiplicity).sum();
                        let jump = signature - prev.signature;
                        profile.jumps.push(Jump {
                            lo: crossed.first().map_or(prev.angle, |a| a.lo),
                            hi: crossed.last().map_or(prev.angle, |a| a.hi),
                            before: prev.signature,
                            after: signature,
                            jump,
                            multiplicity,
                            jump_mod4: jump.rem_euclid(4),
                            expected_mod4: (2 * multiplicity as i64) % 4,
                        });
                    }
                }
                profile.samples.push(ProfileSample { k, angle: two_pi * k as f64 / samples as f64, signature });
                profile.regions.push(region);
            }
        }
    }
    Ok(profile)
}

fn arc(root: &RootInterval, lo: f64, hi: f64) -> ExcludedArc {
    ExcludedArc {
        lo,
        hi,
        x_interval: [rational_string(&root.lo), rational_string(&root.hi)],
        multiplicity: root.multiplicity,
        parity: root.parity(),
    }
}

/// Seifert matrix of the canonical surface of a positive braid closure: one
/// disk per strand, one band per crossing. The basis loops run through two
/// consecutive bands of the same generator.
pub fn seifert_from_positive_braid(b: &BraidWord) -> Result<SeifertMatrix> {
    if let Some(&l) = b.letters().iter().find(|&&l| l < 0) {
        return Err(Error::InvalidInput(format!("braid letter {l} is not positive")));
    }
    let components = permutation(b).orbit_count();
    if components != 1 {
        return Err(Error::NotAKnot { components });
    }
    let mut loops = Vec::new();
    for g in 1..b.strands() as i32 {
        let pos: Vec<usize> = b.letters().iter().enumerate().filter(|(_, &l)| l == g).map(|(k, _)| k).collect();
        loops.extend(pos.windows(2).map(|w| (g, w[0], w[1])));
    }
    let m = loops.len();
    let mut v = vec![vec![BigInt::zero(); m]; m];
    for (a, &(g, p, q)) in loops.iter().enumerate() {
        v[a][a] = BigInt::from(-1);
        for (c, &(h, r, s)) in loops.iter().enumerate() {
            if h == g && r == q {
                v[a][c] = BigInt::one();
            } else if h == g + 1 {
                if p < r && r < q && q < s {
                    v[a][c] = BigInt::from(-1);
                } else if r < p && p < s && s < q {
                    v[a][c] = BigInt::one();
                }
            }
        }
    }
    SeifertMatrix::new(v)
}

/// `det ≡ 3 (mod 4)`, after checking `det ≡ (-1)^{sgn/2} (mod 4)`.
pub fn mod4_criterion(det: &BigInt, sgn: i64) -> Result<bool> {
    let inconsistent = || Error::InconsistentPair { det: det.to_string(), sgn };
    if !det.is_positive() || det.is_even() || sgn % 2 != 0 {
        return Err(inconsistent());
    }
    let r = (det % 4u32).to_u32().unwrap();
    let expected = if (sgn / 2).rem_euclid(2) == 0 { 1 } else { 3 };
    if r != expected {
        return Err(inconsistent());
    }
    Ok(r == 3)
}

/// Whether `P(q_1, …, q_n)` is a knot, and `|Σ_i Π_{k≠i} q_k|`.
pub fn pretzel_determinant(q: &[i64]) -> Result<(bool, BigInt)> {
    if q.len() < 3 {
        return Err(Error::InvalidInput(format!("pretzel needs at least 3 tangles, got {}", q.len())));
    }
    if q.contains(&0) {
        return Err(Error::InvalidInput("pretzel tangles must be nonzero".into()));
    }
    let evens = q.iter().filter(|x| *x % 2 == 0).count();
    let is_knot = (q.len() % 2 == 1 && evens == 0) || evens == 1;
    let mut sum = BigInt::zero();
    for i in 0..q.len() {
        let prod: BigInt = q
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != i)
            .map(|(_, &x)| BigInt::from(x))
            .product();
        sum += prod;
    }
    Ok((is_knot, sum.abs()))
}
