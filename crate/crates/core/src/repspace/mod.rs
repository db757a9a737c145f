//! Representations of braid-presented knot groups into SL(2,R) and SU(2) on
//! trace slices, and numerical continuation away from abelian points.
//!
//! SL(2,R) elements are stored row-major as `[a, b, c, d]`. SU(2) elements
//! are unit quaternions `[w, x, y, z]`, so the trace is `2w`.

mod group;
mod lm;
mod system;

use std::fmt;
use std::str::FromStr;

use nalgebra::{DVector, SVD};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::braid::{FreeWord, KnotPresentation};
use crate::{Error, Exec, Result};
use group::{Elem, Group2, Sl2R, Su2};
use lm::LmOptions;
use system::{
    eval_word, gram_schmidt, orbit_tangents, pack, rotate_tangent, unpack, BranchProblem, RelatorSystem,
    SliceProblem,
};

/// Residual below which a point is accepted.
pub const ACCEPT_RESIDUAL: f64 = 1e-10;
/// Commutator-trace margin below which a point counts as reducible.
pub const REDUCIBLE_MARGIN: f64 = 1e-6;
/// Reseeds before a deformation gives up.
pub const DEFAULT_RETRIES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Flavor {
    #[serde(rename = "SL2R")]
    Sl2r,
    #[serde(rename = "SU2")]
    Su2,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Sl2r => "SL2R",
            Flavor::Su2 => "SU2",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sl2r" | "sl2" => Ok(Flavor::Sl2r),
            "su2" => Ok(Flavor::Su2),
            _ => Err(Error::Parse(format!("unknown flavor `{s}` (expected sl2r or su2)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    fn sign(self) -> f64 {
        match self {
            Side::Upper => 1.0,
            Side::Lower => -1.0,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Upper => "upper",
            Side::Lower => "lower",
        })
    }
}

impl FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "upper" | "up" | "+" => Ok(Side::Upper),
            "lower" | "down" | "-" => Ok(Side::Lower),
            _ => Err(Error::Parse(format!("unknown side `{s}` (expected upper or lower)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CharacterClass {
    #[serde(rename = "SL2R")]
    Sl2r,
    #[serde(rename = "SU2")]
    Su2,
    #[serde(rename = "reducible-boundary")]
    ReducibleBoundary,
}

impl fmt::Display for CharacterClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CharacterClass::Sl2r => "SL2R",
            CharacterClass::Su2 => "SU2",
            CharacterClass::ReducibleBoundary => "reducible-boundary",
        })
    }
}

/// One representation on a trace slice.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepPoint {
    pub matrices: Vec<[f64; 4]>,
    pub tau: f64,
    pub residual: f64,
    pub flavor: Flavor,
}

impl RepPoint {
    /// Builds a point and fills in `residual` from the relator system.
    pub fn new(p: &KnotPresentation, matrices: Vec<[f64; 4]>, tau: f64, flavor: Flavor) -> Result<Self> {
        let mut r = RepPoint { matrices, tau, residual: 0.0, flavor };
        r.residual = norm(&relator_residual(p, &r)?);
        Ok(r)
    }

    pub fn generators(&self) -> usize {
        self.matrices.len()
    }

    pub fn trace(&self, i: usize) -> f64 {
        with_flavor!(self.flavor, G => G::trace(&self.matrices[i]))
    }

    pub fn det(&self, i: usize) -> f64 {
        with_flavor!(self.flavor, G => G::det(&self.matrices[i]))
    }

    /// Trace of the image of `w`.
    pub fn trace_of(&self, w: &FreeWord) -> f64 {
        with_flavor!(self.flavor, G => G::trace(&eval_word::<G>(w, &self.matrices)))
    }

    /// Conjugates every generator by `g` (same encoding as the matrices).
    pub fn conjugate(&self, g: &[f64; 4]) -> Self {
        let matrices = with_flavor!(self.flavor, G => {
            let mut g = *g;
            G::polish(&mut g);
            let gi = G::adj(&g);
            self.matrices.iter().map(|a| G::mul(&G::mul(&g, a), &gi)).collect()
        });
        RepPoint { matrices, ..self.clone() }
    }

    /// Each generator as a complex 2×2 matrix, entries `[re, im]` row-major.
    pub fn complex_matrices(&self) -> Vec<[[f64; 2]; 4]> {
        with_flavor!(self.flavor, G => self.matrices.iter().map(G::to_complex).collect())
    }
}

macro_rules! with_flavor {
    ($flavor:expr, $g:ident => $body:expr) => {
        match $flavor {
            Flavor::Sl2r => {
                type $g = Sl2R;
                $body
            }
            Flavor::Su2 => {
                type $g = Su2;
                $body
            }
        }
    };
}
use with_flavor;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Traces at a fixed list of words.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterCoords {
    pub words: Vec<FreeWord>,
    pub traces: Vec<f64>,
}

impl CharacterCoords {
    /// ∞-norm distance; panics if the word lists differ.
    pub fn distance(&self, other: &CharacterCoords) -> f64 {
        assert_eq!(self.words, other.words, "character coordinates over different words");
        self.traces.iter().zip(&other.traces).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn get(&self, w: &FreeWord) -> Option<f64> {
        self.words.iter().position(|x| x == w).map(|i| self.traces[i])
    }
}

impl Serialize for CharacterCoords {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.words.len()))?;
        for (w, t) in self.words.iter().zip(&self.traces) {
            m.serialize_entry(&w.to_string(), t)?;
        }
        m.end()
    }
}

/// Products `x_{i_1} ⋯ x_{i_r}` with `i_1 < ⋯ < i_r`, by length then
/// lexicographically. For more than four generators only lengths up to three
/// and the full product are kept.
pub fn character_words(n: usize) -> Vec<FreeWord> {
    fn subsets(n: usize, r: usize, start: usize, cur: &mut Vec<i32>, out: &mut Vec<FreeWord>) {
        if cur.len() == r {
            out.push(FreeWord::from_letters(cur.iter().copied()));
            return;
        }
        for i in start..n {
            cur.push(i as i32 + 1);
            subsets(n, r, i + 1, cur, out);
            cur.pop();
        }
    }
    let max_len = if n <= 4 { n } else { 3 };
    let mut out = Vec::new();
    for r in 1..=max_len {
        subsets(n, r, 0, &mut Vec::new(), &mut out);
    }
    if n > 4 {
        out.push(FreeWord::full_product(n));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct PathPoint {
    #[serde(flatten)]
    pub rep: RepPoint,
    pub margin: f64,
    pub character: CharacterCoords,
}

#[derive(Clone, Debug)]
pub struct DeformationPath {
    pub theta0: f64,
    pub tau0: f64,
    pub side: Side,
    pub flavor: Flavor,
    /// Seed of the attempt that produced the path.
    pub seed: u64,
    pub points: Vec<PathPoint>,
}

impl DeformationPath {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// The point whose τ is closest to τ₀.
    pub fn nearest_to_start(&self) -> Option<&PathPoint> {
        self.points
            .iter()
            .min_by(|a, b| (a.rep.tau - self.tau0).abs().total_cmp(&(b.rep.tau - self.tau0).abs()))
    }

    pub fn to_csv(&self) -> String {
        let words = self.points.first().map(|p| p.character.words.clone()).unwrap_or_default();
        let mut out = String::from("tau,residual,margin");
        for w in &words {
            out.push_str(&format!(",tr({w})"));
        }
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!("{:.12},{:.3e},{:.6e}", p.rep.tau, p.rep.residual, p.margin));
            for t in &p.character.traces {
                out.push_str(&format!(",{t:.12}"));
            }
            out.push('\n');
        }
        out
    }
}

impl Serialize for DeformationPath {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("DeformationPath", 6)?;
        st.serialize_field("theta0", &self.theta0)?;
        st.serialize_field("tau0", &self.tau0)?;
        st.serialize_field("side", &self.side)?;
        st.serialize_field("flavor", &self.flavor)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("points", &self.points)?;
        st.end()
    }
}

fn check_dims(p: &KnotPresentation, r: &RepPoint) -> Result<()> {
    if r.generators() != p.generators() {
        return Err(Error::DimensionMismatch { expected: p.generators(), got: r.generators() });
    }
    Ok(())
}

/// All generators sent to the rotation by `theta`.
pub fn abelian_elliptic_rep(p: &KnotPresentation, theta: f64) -> RepPoint {
    abelian_rep(p, theta, Flavor::Sl2r)
}

/// As [`abelian_elliptic_rep`], in either encoding.
pub fn abelian_rep(p: &KnotPresentation, theta: f64, flavor: Flavor) -> RepPoint {
    let m = with_flavor!(flavor, G => G::rotation(theta));
    let matrices = vec![m; p.generators()];
    let tau = 2.0 * theta.cos();
    let mut r = RepPoint { matrices, tau, residual: 0.0, flavor };
    r.residual = norm(&relator_residual(p, &r).expect("dimensions match by construction"));
    r
}

/// Relator entries for `i < n`, then trace rows, then determinant rows.
pub fn relator_residual(p: &KnotPresentation, r: &RepPoint) -> Result<Vec<f64>> {
    check_dims(p, r)?;
    let x = pack(&r.matrices);
    Ok(with_flavor!(r.flavor, G => RelatorSystem::<G>::new(&p.images).residual(x.as_slice(), r.tau))
        .as_slice()
        .to_vec())
}

/// `max |tr(A_i A_j A_i⁻¹ A_j⁻¹) - 2|` over generator pairs.
pub fn irreducibility_margin(r: &RepPoint, _p: &KnotPresentation) -> f64 {
    with_flavor!(r.flavor, G => margin::<G>(&r.matrices))
}

fn margin<G: Group2>(mats: &[Elem]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..mats.len() {
        for j in i + 1..mats.len() {
            let c = G::mul(&G::mul(&mats[i], &mats[j]), &G::mul(&G::adj(&mats[i]), &G::adj(&mats[j])));
            m = m.max((G::trace(&c) - 2.0).abs());
        }
    }
    m
}

pub fn character_coords(r: &RepPoint, _p: &KnotPresentation) -> CharacterCoords {
    let words = character_words(r.generators());
    let traces = words.iter().map(|w| r.trace_of(w)).collect();
    CharacterCoords { words, traces }
}

/// Character of the abelian representation at `theta`: a product of `r`
/// generators has trace `2cos(rθ)`.
pub fn abelian_character(p: &KnotPresentation, theta: f64) -> CharacterCoords {
    let words = character_words(p.generators());
    let traces = words.iter().map(|w| 2.0 * (w.len() as f64 * theta).cos()).collect();
    CharacterCoords { words, traces }
}

/// Two-generator classification by the sign of `x² + y² + z² - xyz - 4`.
pub fn classify_coords(x: f64, y: f64, z: f64) -> CharacterClass {
    let kappa = x * x + y * y + z * z - x * y * z - 4.0;
    if kappa.abs() < 1e-8 {
        CharacterClass::ReducibleBoundary
    } else if kappa > 0.0 {
        CharacterClass::Sl2r
    } else if [x, y, z].iter().all(|t| t.abs() <= 2.0) {
        CharacterClass::Su2
    } else {
        CharacterClass::Sl2r
    }
}

pub fn classify_real_character(r: &RepPoint, p: &KnotPresentation) -> CharacterClass {
    if r.generators() == 2 {
        let c = character_coords(r, p);
        return classify_coords(c.traces[0], c.traces[1], c.traces[2]);
    }
    if irreducibility_margin(r, p) < 1e-8 {
        return CharacterClass::ReducibleBoundary;
    }
    match r.flavor {
        Flavor::Sl2r => CharacterClass::Sl2r,
        Flavor::Su2 => CharacterClass::Su2,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct DeformOptions {
    pub steps: usize,
    pub step_size: f64,
    pub seed: u64,
    pub retries: usize,
    /// Distance from the abelian point used to locate the branch.
    pub probe: f64,
}

impl Default for DeformOptions {
    fn default() -> Self {
        Self { steps: 20, step_size: 2.5e-3, seed: 0, retries: DEFAULT_RETRIES, probe: 1e-3 }
    }
}

/// Continues from the abelian point at `theta0` along the trace slices
/// `τ_k = τ₀ ± k·step_size`.
///
/// Near the abelian point the irreducible branch is tangent to the slice, so
/// the first point is found by solving with τ free and the distance from the
/// abelian point pinned along a seeded direction in the kernel that is not
/// explained by conjugation. The leading coefficient of `τ - τ₀` in that
/// distance decides which side the branch lives on. Asking for the other side
/// fails at step 1.
pub fn deform(
    p: &KnotPresentation,
    theta0: f64,
    side: Side,
    flavor: Flavor,
    opts: &DeformOptions,
) -> Result<DeformationPath> {
    if !p.is_knot() {
        return Err(Error::NotAKnot { components: p.components });
    }
    if !(theta0 > 0.0 && theta0 < std::f64::consts::PI) {
        return Err(Error::InvalidInput(format!("theta0 = {theta0} is not in (0, pi)")));
    }
    if opts.steps == 0 || opts.step_size.is_nan() || opts.step_size <= 0.0 {
        return Err(Error::InvalidInput("steps and step size must be positive".into()));
    }
    if p.generators() < 2 {
        return Err(Error::StuckReducible { attempts: 0 });
    }
    with_flavor!(flavor, G => deform_in::<G>(p, theta0, side, flavor, opts))
}

struct Start {
    x0: DVector<f64>,
    tau0: f64,
    orbit: Vec<DVector<f64>>,
    kernel: Vec<DVector<f64>>,
}

fn start_data<G: Group2>(sys: &RelatorSystem<G>, theta0: f64) -> Start {
    let n = sys.generators();
    let x0 = pack(&vec![G::rotation(theta0); n]);
    let tau0 = 2.0 * theta0.cos();
    let j0 = sys.jacobian(x0.as_slice());
    let svd = SVD::new(j0.clone(), false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let s_max = svd.singular_values.iter().copied().fold(1.0, f64::max);
    let mut null = Vec::new();
    for k in 0..v_t.nrows() {
        let s = svd.singular_values.get(k).copied().unwrap_or(0.0);
        if s < 1e-8 * s_max {
            null.push(v_t.row(k).transpose());
        }
    }
    // Rows beyond the rank are missing from a thin SVD; recover them by
    // completing the row space.
    if v_t.nrows() < x0.len() {
        let rows: Vec<DVector<f64>> = (0..v_t.nrows()).map(|k| v_t.row(k).transpose()).collect();
        let basis = (0..x0.len()).map(|k| {
            let mut e = DVector::zeros(x0.len());
            e[k] = 1.0;
            e
        });
        let full = gram_schmidt(rows.iter().cloned().chain(basis), 1e-8);
        null.extend(full.into_iter().skip(rows.len()));
    }
    let orbit = gram_schmidt(orbit_tangents::<G>(x0.as_slice()), 1e-8);
    let kernel = gram_schmidt(orbit.iter().cloned().chain(null), 1e-6).split_off(orbit.len());
    Start { x0, tau0, orbit, kernel }
}

fn random_direction(start: &Start, rng: &mut ChaCha8Rng) -> DVector<f64> {
    let m = start.x0.len();
    let mut v = if start.kernel.is_empty() {
        let mut v = DVector::from_fn(m, |_, _| rng.sample::<f64, _>(StandardNormal));
        for o in &start.orbit {
            let d = v.dot(o);
            v -= o * d;
        }
        v
    } else {
        let mut v = DVector::zeros(m);
        for b in &start.kernel {
            v += b * rng.sample::<f64, _>(StandardNormal);
        }
        v
    };
    let n = v.norm();
    if n > 0.0 {
        v /= n;
    }
    v
}

/// Solves the τ-free system at distance `h` along `v`. Returns `(x, τ, ‖F‖)`.
fn branch_point<G: Group2>(
    sys: RelatorSystem<'_, G>,
    start: &Start,
    v: &DVector<f64>,
    jv: &DVector<f64>,
    h: f64,
) -> (DVector<f64>, f64, f64) {
    let m = start.x0.len();
    let mut rows = vec![(v.clone(), h)];
    rows.extend(start.orbit.iter().map(|o| (o.clone(), 0.0)));
    rows.push((jv.clone(), 0.0));
    let problem = BranchProblem { sys, x0: start.x0.clone(), rows };
    let guess = DVector::from_iterator(m + 1, (&start.x0 + v * h).iter().copied().chain([start.tau0]));
    let z = lm::solve(&problem, guess, LmOptions::default());
    let x = z.rows(0, m).into_owned();
    let tau = z[m];
    let f = problem.sys.residual(x.as_slice(), tau).norm();
    (x, tau, f)
}

/// Fixed-τ solve with the conjugation gauge pinned at `reference`.
fn slice_solve<G: Group2>(
    sys: RelatorSystem<'_, G>,
    tau: f64,
    guess: DVector<f64>,
    reference: &DVector<f64>,
) -> (DVector<f64>, f64) {
    let gauge = gram_schmidt(orbit_tangents::<G>(reference.as_slice()), 1e-8);
    let problem = SliceProblem { sys, tau, reference: Some(reference.clone()), gauge };
    let x = lm::solve(&problem, guess, LmOptions::default());
    let f = problem.sys.residual(x.as_slice(), tau).norm();
    (x, f)
}

enum Attempt {
    Done(DeformationPath),
    Reducible,
    Failed,
    Partial { step: usize, path: DeformationPath },
}

fn deform_in<G: Group2>(
    p: &KnotPresentation,
    theta0: f64,
    side: Side,
    flavor: Flavor,
    opts: &DeformOptions,
) -> Result<DeformationPath> {
    let sys = || RelatorSystem::<G>::new(&p.images);
    let start = start_data::<G>(&sys(), theta0);
    let empty = |seed| DeformationPath { theta0, tau0: start.tau0, side, flavor, seed, points: Vec::new() };
    let h = opts.probe;
    let mut reducible = 0;
    let attempts = opts.retries.max(1);
    for attempt in 0..attempts {
        let seed = opts.seed.wrapping_add(attempt as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_direction(&start, &mut rng);
        let jv = rotate_tangent::<G>(&v);
        let (xb, tau_b, f) = branch_point(sys(), &start, &v, &jv, h);
        if f >= ACCEPT_RESIDUAL {
            continue;
        }
        let mb = margin::<G>(&unpack(xb.as_slice()));
        let dist = (&xb - &start.x0).norm();
        if mb < 1e-2 * h * h || dist > 3.0 * h {
            reducible += 1;
            continue;
        }
        let c = (tau_b - start.tau0) / (h * h);
        if c * side.sign() <= 0.0 {
            return Err(Error::NoConvergence { step: 1, path: Box::new(empty(seed)) });
        }
        match walk::<G>(p, &sys, &start, &v, &jv, c, side, opts, empty(seed)) {
            Attempt::Done(path) => return Ok(path),
            Attempt::Reducible => reducible += 1,
            Attempt::Failed => {}
            Attempt::Partial { step, path } => {
                return Err(Error::NoConvergence { step, path: Box::new(path) });
            }
        }
    }
    if reducible == attempts {
        Err(Error::StuckReducible { attempts })
    } else {
        Err(Error::NoConvergence { step: 1, path: Box::new(empty(opts.seed)) })
    }
}

#[allow(clippy::too_many_arguments)]
fn walk<'a, G: Group2>(
    p: &KnotPresentation,
    sys: &dyn Fn() -> RelatorSystem<'a, G>,
    start: &Start,
    v: &DVector<f64>,
    jv: &DVector<f64>,
    c: f64,
    side: Side,
    opts: &DeformOptions,
    mut path: DeformationPath,
) -> Attempt {
    let mut xs: Vec<DVector<f64>> = Vec::new();
    for k in 1..=opts.steps {
        let tau = start.tau0 + side.sign() * k as f64 * opts.step_size;
        let (guess, reference) = if k == 1 {
            let h1 = ((tau - start.tau0) / c).sqrt();
            let (xb, _, _) = branch_point(sys(), start, v, jv, h1);
            (xb.clone(), xb)
        } else {
            let last = &xs[xs.len() - 1];
            let guess = if xs.len() >= 2 { last * 2.0 - &xs[xs.len() - 2] } else { last.clone() };
            (guess, last.clone())
        };
        let (x, f) = slice_solve(sys(), tau, guess, &reference);
        let mats = unpack(x.as_slice());
        let mg = margin::<G>(&mats);
        if f >= ACCEPT_RESIDUAL || mg <= REDUCIBLE_MARGIN {
            if k == 1 {
                return if f < ACCEPT_RESIDUAL { Attempt::Reducible } else { Attempt::Failed };
            }
            // A later failure is final: hand back what was accepted so far.
            return Attempt::Partial { step: k, path };
        }
        let rep = RepPoint { matrices: mats, tau, residual: f, flavor: path.flavor };
        let character = character_coords(&rep, p);
        path.points.push(PathPoint { rep, margin: mg, character });
        xs.push(x);
    }
    Attempt::Done(path)
}

/// Outcome of a multi-seed search on one trace slice.
#[derive(Clone, Debug, Serialize)]
pub struct SliceSearch {
    pub tau: f64,
    pub flavor: Flavor,
    pub attempts: usize,
    /// Seeds whose solve reached an irreducible point of the requested flavor.
    pub converged: usize,
    /// Distinct characters in order of first discovery.
    pub characters: Vec<CharacterCoords>,
}

impl SliceSearch {
    pub fn distinct(&self) -> usize {
        self.characters.len()
    }
}

/// Tolerance, in the ∞-norm on traces, under which two characters coincide.
pub const DEDUP_TOLERANCE: f64 = 1e-6;

/// Solves the τ-slice from `seeds` random starts and counts distinct
/// irreducible characters. Deterministic in `base_seed`.
pub fn slice_search(
    p: &KnotPresentation,
    tau: f64,
    flavor: Flavor,
    seeds: usize,
    base_seed: u64,
    exec: Exec,
) -> SliceSearch {
    let found: Vec<Option<CharacterCoords>> = exec.map_range(0..seeds, |s| {
        let seed = base_seed.wrapping_add(s as u64);
        let rep = with_flavor!(flavor, G => slice_attempt::<G>(p, tau, flavor, seed))?;
        let class = classify_real_character(&rep, p);
        let wanted = match flavor {
            Flavor::Sl2r => CharacterClass::Sl2r,
            Flavor::Su2 => CharacterClass::Su2,
        };
        (class == wanted).then(|| character_coords(&rep, p))
    });
    let converged = found.iter().flatten().count();
    let mut characters: Vec<CharacterCoords> = Vec::new();
    for c in found.into_iter().flatten() {
        if characters.iter().all(|d| d.distance(&c) > DEDUP_TOLERANCE) {
            characters.push(c);
        }
    }
    SliceSearch { tau, flavor, attempts: seeds, converged, characters }
}

fn random_on_slice<G: Group2>(tau: f64, flavor: Flavor, rng: &mut ChaCha8Rng) -> Elem {
    let mut normal = || rng.sample::<f64, _>(StandardNormal);
    let mut e = match flavor {
        Flavor::Sl2r => {
            let u = normal();
            let (a, d) = (tau / 2.0 + u, tau / 2.0 - u);
            let b = normal().exp() * if normal() < 0.0 { -1.0 } else { 1.0 };
            [a, b, (a * d - 1.0) / b, d]
        }
        Flavor::Su2 => {
            let w = (tau / 2.0).clamp(-1.0, 1.0);
            let r = (1.0 - w * w).sqrt();
            let v = [normal(), normal(), normal()];
            let n = norm(&v).max(1e-300);
            [w, r * v[0] / n, r * v[1] / n, r * v[2] / n]
        }
    };
    G::polish(&mut e);
    e
}

fn slice_attempt<G: Group2>(p: &KnotPresentation, tau: f64, flavor: Flavor, seed: u64) -> Option<RepPoint> {
    let n = p.generators();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start: Vec<Elem> = (0..n).map(|_| random_on_slice::<G>(tau, flavor, &mut rng)).collect();
    let sys = RelatorSystem::<G>::new(&p.images);
    let problem = SliceProblem { sys, tau, reference: None, gauge: Vec::new() };
    let x = lm::solve(&problem, pack(&start), LmOptions::default());
    let f = problem.sys.residual(x.as_slice(), tau).norm();
    let mats = unpack(x.as_slice());
    if f >= ACCEPT_RESIDUAL || margin::<G>(&mats) <= REDUCIBLE_MARGIN {
        return None;
    }
    Some(RepPoint { matrices: mats, tau, residual: f, flavor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{presentation, BraidWord};
    use std::f64::consts::PI;

    fn pres(word: &str, strands: usize) -> KnotPresentation {
        presentation(&BraidWord::parse(word, strands).unwrap())
    }

    fn check_path(p: &KnotPresentation, path: &DeformationPath, step: f64) {
        let z = FreeWord::from_letters([1, 2]);
        let chi0 = abelian_character(p, path.theta0);
        for w in path.points.windows(2) {
            assert!((w[1].rep.tau - w[0].rep.tau).abs() > 0.0);
            assert!(w[0].character.distance(&w[1].character) < 10.0 * step * 10.0);
        }
        for pt in &path.points {
            assert!(pt.rep.residual < ACCEPT_RESIDUAL);
            assert!(pt.margin > REDUCIBLE_MARGIN);
            for i in 0..pt.rep.generators() {
                assert!((pt.rep.det(i) - 1.0).abs() <= 1e-12);
                assert!((pt.rep.trace(i) - pt.rep.tau).abs() <= 1e-9);
            }
            let class = classify_real_character(&pt.rep, p);
            assert_eq!(class.to_string(), path.flavor.to_string());
            assert!(pt.character.get(&z).is_some());
        }
        let near = path.nearest_to_start().unwrap();
        assert!(near.character.distance(&chi0) < 5.0 * step);
    }

    #[test]
    fn abelian_point_is_exact_and_reducible() {
        let p = pres("1 1 1", 2);
        let r = abelian_elliptic_rep(&p, PI / 6.0);
        assert!(relator_residual(&p, &r).unwrap().iter().all(|x| x.abs() < 1e-14));
        assert!(irreducibility_margin(&r, &p) <= 1e-14);
        let c = character_coords(&r, &p);
        let t = 3f64.sqrt();
        assert!((c.traces[0] - t).abs() < 1e-15 && (c.traces[1] - t).abs() < 1e-15);
        assert!((c.traces[2] - 1.0).abs() < 1e-14);
        assert_eq!(classify_real_character(&r, &p), CharacterClass::ReducibleBoundary);
        assert!(abelian_rep(&p, PI / 2.0, Flavor::Su2).tau.abs() < 1e-15);
    }

    #[test]
    fn residual_checks_dimensions() {
        let p = pres("1 -2 1 -2", 3);
        let r = abelian_elliptic_rep(&pres("1 1 1", 2), 0.4);
        assert!(matches!(relator_residual(&p, &r), Err(Error::DimensionMismatch { expected: 3, got: 2 })));
    }

    #[test]
    fn explicit_trefoil_representation() {
        // A1 = [[λ,1],[0,1/λ]], A2 = [[λ,0],[-u,1/λ]] with tr(A1A2) = 1.
        let p = pres("1 1 1", 2);
        let lambda: f64 = 1.3;
        let tau = lambda + 1.0 / lambda;
        let u = tau * tau - 1.0 - 2.0;
        let a1 = [lambda, 1.0, 0.0, 1.0 / lambda];
        let a2 = [lambda, 0.0, -u, 1.0 / lambda];
        let r = RepPoint::new(&p, vec![a1, a2], tau, Flavor::Sl2r).unwrap();
        let res = relator_residual(&p, &r).unwrap();
        assert!(res[..4].iter().all(|x| x.abs() < 1e-12), "{res:?}");
        assert!((r.trace_of(&FreeWord::from_letters([1, 2])) - 1.0).abs() < 1e-12);
        assert_eq!(classify_real_character(&r, &p), CharacterClass::Sl2r);
        let q = r.conjugate(&[2.0, 1.0, 0.5, 0.75]);
        assert!(character_coords(&q, &p).distance(&character_coords(&r, &p)) < 1e-9);
        let rot = abelian_elliptic_rep(&p, PI / 6.0).matrices[0];
        let hyp = [2.0, 1.0, 1.0, 1.0];
        let mixed = RepPoint::new(&p, vec![rot, hyp], 3f64.sqrt(), Flavor::Sl2r).unwrap();
        assert!(irreducibility_margin(&mixed, &p) > 0.0);
    }

    #[test]
    fn classification_examples() {
        let t = 3f64.sqrt();
        assert_eq!(classify_coords(t + 0.05, t + 0.05, 1.0), CharacterClass::Sl2r);
        assert_eq!(classify_coords(t - 0.05, t - 0.05, 1.0), CharacterClass::Su2);
        for theta in [0.2, 0.9, 2.0] {
            let x = 2.0 * f64::cos(theta);
            assert_eq!(classify_coords(x, x, 2.0 * f64::cos(2.0 * theta)), CharacterClass::ReducibleBoundary);
        }
    }

    #[test]
    fn word_enumeration() {
        assert_eq!(character_words(2).len(), 3);
        assert_eq!(character_words(4).len(), 15);
        assert_eq!(character_words(5).len(), 5 + 10 + 10 + 1);
        assert_eq!(character_words(3)[3].to_string(), "x1 x2");
    }

    #[test]
    fn trefoil_upper_sl2r() {
        let p = pres("1 1 1", 2);
        let opts = DeformOptions::default();
        let path = deform(&p, PI / 6.0, Side::Upper, Flavor::Sl2r, &opts).unwrap();
        assert_eq!(path.len(), 20);
        let t0 = 3f64.sqrt();
        let z = FreeWord::from_letters([1, 2]);
        for pt in &path.points {
            assert!(pt.rep.tau > t0 && pt.rep.tau <= t0 + 0.05 + 1e-12);
            assert!(pt.margin > 1e-4);
            assert!((pt.character.get(&z).unwrap() - 1.0).abs() < 1e-6);
        }
        check_path(&p, &path, opts.step_size);
        let again = deform(&p, PI / 6.0, Side::Upper, Flavor::Sl2r, &opts).unwrap();
        assert_eq!(serde_json::to_string(&path).unwrap(), serde_json::to_string(&again).unwrap());
        assert!(path.to_csv().lines().count() == 21);
    }

    #[test]
    fn trefoil_lower_su2() {
        let p = pres("1 1 1", 2);
        let opts = DeformOptions::default();
        let path = deform(&p, PI / 6.0, Side::Lower, Flavor::Su2, &opts).unwrap();
        assert!(!path.is_empty());
        for pt in &path.points {
            assert!(pt.rep.tau < 3f64.sqrt());
            for m in &pt.rep.matrices {
                assert!((norm(m) - 1.0).abs() < 1e-12);
            }
        }
        check_path(&p, &path, opts.step_size);
    }

    #[test]
    fn trefoil_wrong_side_fails_at_first_step() {
        let p = pres("1 1 1", 2);
        let err = deform(&p, PI / 6.0, Side::Lower, Flavor::Sl2r, &DeformOptions::default()).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { step: 1, .. }));
    }

    #[test]
    fn torus_knot_2_5() {
        let p = pres("1 1 1 1 1", 2);
        let opts = DeformOptions::default();
        let path = deform(&p, PI / 10.0, Side::Upper, Flavor::Sl2r, &opts).unwrap();
        assert!(path.len() >= 15);
        let z = FreeWord::from_letters([1, 2]);
        let golden = 2.0 * (PI / 5.0).cos();
        for pt in &path.points {
            assert!((pt.character.get(&z).unwrap() - golden).abs() < 1e-6);
        }
        check_path(&p, &path, opts.step_size);
    }

    #[test]
    fn figure_eight_finds_nothing() {
        let p = pres("1 -2 1 -2", 3);
        let opts = DeformOptions { steps: 3, retries: 4, ..DeformOptions::default() };
        for theta in [0.3, 1.0] {
            for side in [Side::Upper, Side::Lower] {
                let err = deform(&p, theta, side, Flavor::Sl2r, &opts).unwrap_err();
                assert!(matches!(err, Error::StuckReducible { .. } | Error::NoConvergence { .. }), "{err}");
            }
        }
    }

    #[test]
    fn su2_count_below_trefoil_zero() {
        let p = pres("1 1 1", 2);
        let tau = 3f64.sqrt() - 0.02;
        let seq = slice_search(&p, tau, Flavor::Su2, 20, 0, Exec::Sequential);
        assert_eq!(seq.distinct(), 1);
        let par = slice_search(&p, tau, Flavor::Su2, 20, 0, Exec::default());
        assert_eq!(par.characters, seq.characters);
    }
}
