//! Braid words, the Artin action of `B_n` on the free group `F_n`, knot-group
//! presentations of braid closures, and Alexander polynomials via the reduced
//! Burau representation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::laurent::{conway_normalize, LaurentPoly};
use crate::linalg::determinant;
use crate::{Error, Result};

/// A braid on `strands` strands. Letter `k > 0` is `σ_k`, `k < 0` is `σ_{|k|}⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BraidWord {
    strands: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(strands: usize, letters: Vec<i32>) -> Result<Self> {
        if strands < 2 {
            return Err(Error::InvalidInput(format!(
                "a braid needs at least 2 strands, got {strands}"
            )));
        }
        for &l in &letters {
            if l == 0 || l.unsigned_abs() as usize >= strands {
                return Err(Error::IndexOutOfRange { index: l as i64, strands });
            }
        }
        Ok(Self { strands, letters })
    }

    /// Whitespace- or comma-separated signed integers; `s1`, `s-1`, `S1`
    /// (capital = inverse) are also accepted.
    pub fn parse(text: &str, strands: usize) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in text.split(|c: char| c.is_whitespace() || c == ',').filter(|s| !s.is_empty()) {
            let (neg, body) = match tok.strip_prefix('S') {
                Some(rest) => (true, rest),
                None => (false, tok.strip_prefix('s').unwrap_or(tok)),
            };
            let body = body.trim_start_matches('_');
            let v: i32 = body
                .parse()
                .map_err(|_| Error::Parse(format!("bad braid letter {tok:?}")))?;
            letters.push(if neg { -v } else { v });
        }
        Self::new(strands, letters)
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            strands: self.strands,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    pub fn concat(&self, other: &Self) -> Self {
        assert_eq!(self.strands, other.strands, "strand counts differ");
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Self { strands: self.strands, letters }
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        f.write_str(&parts.join(" "))
    }
}

/// Freely reduced word in `x_1, …, x_n`. Letter `k > 0` is `x_k`, `k < 0` is `x_{|k|}⁻¹`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FreeWord {
    letters: Vec<i32>,
}

impl FreeWord {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(i: usize) -> Self {
        assert!(i >= 1, "generators are 1-based");
        Self { letters: vec![i as i32] }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = i32>) -> Self {
        let mut w = Self::identity();
        for l in letters {
            assert!(l != 0, "zero is not a free-group letter");
            w.push(l);
        }
        w
    }

    /// `x_1 x_2 ⋯ x_n`.
    pub fn full_product(n: usize) -> Self {
        Self { letters: (1..=n as i32).collect() }
    }

    fn push(&mut self, l: i32) {
        if self.letters.last() == Some(&-l) {
            self.letters.pop();
        } else {
            self.letters.push(l);
        }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    /// `(generator index, ±1)` pairs.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, i8)> + '_ {
        self.letters
            .iter()
            .map(|&l| (l.unsigned_abs() as usize, if l > 0 { 1 } else { -1 }))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_index(&self) -> usize {
        self.letters.iter().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut w = self.clone();
        for &l in &other.letters {
            w.push(l);
        }
        w
    }

    pub fn inverse(&self) -> Self {
        Self { letters: self.letters.iter().rev().map(|l| -l).collect() }
    }

    /// Image under the abelianization sending every generator to `t`.
    pub fn exponent_sum(&self) -> i64 {
        self.letters.iter().map(|&l| l.signum() as i64).sum()
    }

    /// Substitute `images[i - 1]` for `x_i`.
    pub fn substitute(&self, images: &[FreeWord]) -> Self {
        let mut w = Self::identity();
        for &l in &self.letters {
            let img = &images[l.unsigned_abs() as usize - 1];
            if l > 0 {
                for &m in &img.letters {
                    w.push(m);
                }
            } else {
                for &m in img.letters.iter().rev() {
                    w.push(-m);
                }
            }
        }
        w
    }
}

impl fmt::Display for FreeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .letters
            .iter()
            .map(|&l| if l > 0 { format!("x{l}") } else { format!("x{}^-1", -l) })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

impl FromStr for FreeWord {
    type Err = Error;

    /// `x1 x2 x1^-1`, or bare signed integers `1 2 -1`.
    fn from_str(s: &str) -> Result<Self> {
        let mut letters = Vec::new();
        for tok in s.split_whitespace() {
            if tok == "1" && s.trim() == "1" {
                break;
            }
            let (body, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let body = body.strip_prefix('x').unwrap_or(body);
            let v: i32 = body.parse().map_err(|_| Error::Parse(format!("bad free-group letter {tok:?}")))?;
            if v == 0 {
                return Err(Error::Parse("generator index 0".into()));
            }
            letters.push(if inv { -v } else { v });
        }
        Ok(Self::from_letters(letters))
    }
}

/// Images of all generators under a single braid letter.
fn letter_images(n: usize, letter: i32) -> Vec<FreeWord> {
    let mu = letter.unsigned_abs() as usize;
    let (a, b) = (mu as i32, mu as i32 + 1);
    let mut images: Vec<FreeWord> = (1..=n).map(FreeWord::generator).collect();
    if letter > 0 {
        // x_μ ↦ x_μ x_{μ+1} x_μ⁻¹, x_{μ+1} ↦ x_μ
        images[mu - 1] = FreeWord::from_letters([a, b, -a]);
        images[mu] = FreeWord::generator(mu);
    } else {
        // x_μ ↦ x_{μ+1}, x_{μ+1} ↦ x_{μ+1}⁻¹ x_μ x_{μ+1}
        images[mu - 1] = FreeWord::generator(mu + 1);
        images[mu] = FreeWord::from_letters([-b, a, b]);
    }
    images
}

/// Apply the braid to a free word, letter by letter from the left.
pub fn act(b: &BraidWord, w: &FreeWord) -> Result<FreeWord> {
    let n = b.strands;
    if w.max_index() > n {
        return Err(Error::IndexOutOfRange { index: w.max_index() as i64, strands: n });
    }
    let mut out = w.clone();
    for &l in &b.letters {
        out = out.substitute(&letter_images(n, l));
    }
    Ok(out)
}

/// Images `σ(x_1), …, σ(x_n)`.
pub fn generator_images(b: &BraidWord) -> Vec<FreeWord> {
    let n = b.strands;
    let mut images: Vec<FreeWord> = (1..=n).map(FreeWord::generator).collect();
    for &l in &b.letters {
        let step = letter_images(n, l);
        images = images.iter().map(|w| w.substitute(&step)).collect();
    }
    images
}

/// Permutation of `{1..n}` stored 0-based: `map[i]` is the image of `i + 1`, minus one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Self { map: (0..n).collect() }
    }

    pub fn image(&self, i: usize) -> usize {
        self.map[i - 1] + 1
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Cycles in 1-based notation, fixed points included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i] {
                seen[i] = true;
                cyc.push(i + 1);
                i = self.map[i];
            }
            out.push(cyc);
        }
        out
    }

    pub fn orbit_count(&self) -> usize {
        self.cycles().len()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nontrivial: Vec<_> = self.cycles().into_iter().filter(|c| c.len() > 1).collect();
        if nontrivial.is_empty() {
            return f.write_str("()");
        }
        for c in nontrivial {
            let s: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            write!(f, "({})", s.join(" "))?;
        }
        Ok(())
    }
}

pub fn permutation(b: &BraidWord) -> Permutation {
    let mut p = Permutation::identity(b.strands);
    for &l in &b.letters {
        let mu = l.unsigned_abs() as usize;
        p.map.swap(mu - 1, mu);
    }
    p
}

/// The group `⟨x_1..x_n | x_i = σ(x_i)⟩` of the braid closure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotPresentation {
    pub braid: BraidWord,
    /// `σ(x_i)` for `i = 1..n`.
    pub images: Vec<FreeWord>,
    /// `σ(x_i) x_i⁻¹` for `i = 1..n`.
    pub relators: Vec<FreeWord>,
    pub components: usize,
}

impl KnotPresentation {
    pub fn generators(&self) -> usize {
        self.braid.strands
    }

    pub fn is_knot(&self) -> bool {
        self.components == 1
    }
}

pub fn presentation(b: &BraidWord) -> KnotPresentation {
    let images = generator_images(b);
    let relators = images
        .iter()
        .enumerate()
        .map(|(i, w)| w.mul(&FreeWord::generator(i + 1).inverse()))
        .collect();
    KnotPresentation {
        braid: b.clone(),
        images,
        relators,
        components: permutation(b).orbit_count(),
    }
}

/// Reduced Burau matrix of one letter, `(n-1) × (n-1)`.
fn burau_letter(n: usize, letter: i32) -> Vec<Vec<LaurentPoly>> {
    let m = n - 1;
    let i = letter.unsigned_abs() as usize - 1;
    let mut mat: Vec<Vec<LaurentPoly>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { LaurentPoly::one() } else { LaurentPoly::zero() }).collect())
        .collect();
    let (left, diag, right) = if letter > 0 {
        (LaurentPoly::t(), LaurentPoly::monomial(-1, 1), LaurentPoly::one())
    } else {
        (LaurentPoly::one(), LaurentPoly::monomial(-1, -1), LaurentPoly::monomial(1, -1))
    };
    if i > 0 {
        mat[i][i - 1] = left;
    }
    mat[i][i] = diag;
    if i + 1 < m {
        mat[i][i + 1] = right;
    }
    mat
}

fn mat_mul(a: &[Vec<LaurentPoly>], b: &[Vec<LaurentPoly>]) -> Vec<Vec<LaurentPoly>> {
    let n = a.len();
    (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let mut acc = LaurentPoly::zero();
                    for k in 0..n {
                        if !a[r][k].is_zero() && !b[k][c].is_zero() {
                            acc = &acc + &(&a[r][k] * &b[k][c]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Reduced Burau matrix of the whole braid.
pub fn reduced_burau(b: &BraidWord) -> Vec<Vec<LaurentPoly>> {
    let m = b.strands - 1;
    let mut acc: Vec<Vec<LaurentPoly>> = (0..m)
        .map(|r| (0..m).map(|c| if r == c { LaurentPoly::one() } else { LaurentPoly::zero() }).collect())
        .collect();
    for &l in &b.letters {
        acc = mat_mul(&acc, &burau_letter(b.strands, l));
    }
    acc
}

/// Conway-normalized Alexander polynomial of the braid closure.
pub fn alexander_from_braid(b: &BraidWord) -> Result<LaurentPoly> {
    let components = permutation(b).orbit_count();
    if components != 1 {
        return Err(Error::NotAKnot { components });
    }
    let n = b.strands;
    let mut m = reduced_burau(b);
    for (r, row) in m.iter_mut().enumerate() {
        for (c, e) in row.iter_mut().enumerate() {
            *e = if r == c { &LaurentPoly::one() - e } else { -&*e };
        }
    }
    let det = determinant(m);
    // det(I - B)(1 - t) / (1 - t^n)
    let one_minus_t = LaurentPoly::from_coeffs(0, &[1, -1]);
    let one_minus_tn = &LaurentPoly::one() - &LaurentPoly::monomial(BigInt::from(1), n as i64);
    let delta = (&det * &one_minus_t)
        .div_exact(&one_minus_tn)
        .ok_or_else(|| Error::InvalidInput("Burau determinant not divisible by the closure factor".into()))?;
    conway_normalize(&delta)
}
