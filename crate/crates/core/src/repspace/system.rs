//! The slice equations for a braid presentation and their exact Jacobian.
//!
//! Unknowns are the packed generator images `x = (A_1, …, A_n)`. Rows are the
//! four entries of `σ(x_i)(A) - A_i` for `i < n`, then `tr A_i - τ`, then
//! `det A_i - 1`.

use std::marker::PhantomData;

use nalgebra::{DMatrix, DVector};

use super::group::{commutator, Elem, Group2};
use super::lm::LeastSquares;
use crate::braid::FreeWord;

pub(crate) struct RelatorSystem<'a, G: Group2> {
    images: &'a [FreeWord],
    _g: PhantomData<G>,
}

pub(crate) fn unpack(x: &[f64]) -> Vec<Elem> {
    x.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect()
}

pub(crate) fn pack(m: &[Elem]) -> DVector<f64> {
    DVector::from_iterator(4 * m.len(), m.iter().flat_map(|e| e.iter().copied()))
}

pub(crate) fn eval_word<G: Group2>(w: &FreeWord, mats: &[Elem]) -> Elem {
    let mut acc = G::ONE;
    for &l in w.letters() {
        let g = &mats[l.unsigned_abs() as usize - 1];
        acc = if l > 0 { G::mul(&acc, g) } else { G::mul(&acc, &G::adj(g)) };
    }
    acc
}

/// `(tangent of conjugation by X_k)` for each Lie basis element, as vectors.
pub(crate) fn orbit_tangents<G: Group2>(x: &[f64]) -> Vec<DVector<f64>> {
    let mats = unpack(x);
    G::LIE_BASIS
        .iter()
        .map(|b| pack(&mats.iter().map(|a| commutator::<G>(b, a)).collect::<Vec<_>>()))
        .collect()
}

/// `[J, v]` blockwise.
pub(crate) fn rotate_tangent<G: Group2>(v: &DVector<f64>) -> DVector<f64> {
    let blocks = unpack(v.as_slice());
    pack(&blocks.iter().map(|b| commutator::<G>(&G::ROTATION_GENERATOR, b)).collect::<Vec<_>>())
}

pub(crate) fn polish_all<G: Group2>(x: &mut DVector<f64>, n: usize) {
    for i in 0..n {
        let mut e = [x[4 * i], x[4 * i + 1], x[4 * i + 2], x[4 * i + 3]];
        G::polish(&mut e);
        for k in 0..4 {
            x[4 * i + k] = e[k];
        }
    }
}

/// Orthonormalize, dropping vectors whose remainder is below `tol`.
pub(crate) fn gram_schmidt(vs: impl IntoIterator<Item = DVector<f64>>, tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::new();
    for v in vs {
        let mut w = v;
        for _ in 0..2 {
            for u in &out {
                let d = w.dot(u);
                w -= u * d;
            }
        }
        let n = w.norm();
        if n > tol {
            out.push(w / n);
        }
    }
    out
}

impl<'a, G: Group2> RelatorSystem<'a, G> {
    pub fn new(images: &'a [FreeWord]) -> Self {
        Self { images, _g: PhantomData }
    }

    pub fn generators(&self) -> usize {
        self.images.len()
    }

    pub fn rows(&self) -> usize {
        let n = self.generators();
        4 * (n - 1) + 2 * n
    }

    pub fn residual(&self, x: &[f64], tau: f64) -> DVector<f64> {
        let n = self.generators();
        let mats = unpack(x);
        let mut out = DVector::zeros(self.rows());
        for i in 0..n - 1 {
            let e = eval_word::<G>(&self.images[i], &mats);
            for k in 0..4 {
                out[4 * i + k] = e[k] - mats[i][k];
            }
        }
        let base = 4 * (n - 1);
        for i in 0..n {
            out[base + i] = G::trace(&mats[i]) - tau;
            out[base + n + i] = G::det(&mats[i]) - 1.0;
        }
        out
    }

    /// Jacobian in `x` (τ held fixed), `rows × 4n`.
    pub fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let n = self.generators();
        let mats = unpack(x);
        let mut jac = DMatrix::zeros(self.rows(), 4 * n);
        let unit = |e: usize| {
            let mut u = [0.0; 4];
            u[e] = 1.0;
            u
        };
        for i in 0..n - 1 {
            let w = self.images[i].letters();
            let factors: Vec<Elem> = w
                .iter()
                .map(|&l| {
                    let g = &mats[l.unsigned_abs() as usize - 1];
                    if l > 0 { *g } else { G::adj(g) }
                })
                .collect();
            let m = factors.len();
            let mut prefix = vec![G::ONE; m + 1];
            for k in 0..m {
                prefix[k + 1] = G::mul(&prefix[k], &factors[k]);
            }
            let mut suffix = vec![G::ONE; m + 1];
            for k in (0..m).rev() {
                suffix[k] = G::mul(&factors[k], &suffix[k + 1]);
            }
            for (k, &l) in w.iter().enumerate() {
                let gen = l.unsigned_abs() as usize - 1;
                for e in 0..4 {
                    let d = if l > 0 { unit(e) } else { G::adj(&unit(e)) };
                    let contrib = G::mul(&G::mul(&prefix[k], &d), &suffix[k + 1]);
                    for r in 0..4 {
                        jac[(4 * i + r, 4 * gen + e)] += contrib[r];
                    }
                }
            }
            for r in 0..4 {
                jac[(4 * i + r, 4 * i + r)] -= 1.0;
            }
        }
        let base = 4 * (n - 1);
        for i in 0..n {
            let tg = G::trace_grad(&mats[i]);
            let dg = G::det_grad(&mats[i]);
            for e in 0..4 {
                jac[(base + i, 4 * i + e)] = tg[e];
                jac[(base + n + i, 4 * i + e)] = dg[e];
            }
        }
        jac
    }
}

/// Fixed-τ slice, optionally with linear gauge rows `⟨x - ref, u⟩ = 0`.
pub(crate) struct SliceProblem<'a, G: Group2> {
    pub sys: RelatorSystem<'a, G>,
    pub tau: f64,
    pub reference: Option<DVector<f64>>,
    pub gauge: Vec<DVector<f64>>,
}

impl<G: Group2> LeastSquares for SliceProblem<'_, G> {
    fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
        let f = self.sys.residual(x.as_slice(), self.tau);
        if self.gauge.is_empty() {
            return f;
        }
        let d = x - self.reference.as_ref().expect("gauge rows need a reference");
        let extra = self.gauge.iter().map(|u| d.dot(u));
        DVector::from_iterator(f.len() + self.gauge.len(), f.iter().copied().chain(extra))
    }

    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
        let j = self.sys.jacobian(x.as_slice());
        if self.gauge.is_empty() {
            return j;
        }
        let mut out = DMatrix::zeros(j.nrows() + self.gauge.len(), j.ncols());
        out.rows_mut(0, j.nrows()).copy_from(&j);
        for (k, u) in self.gauge.iter().enumerate() {
            out.row_mut(j.nrows() + k).copy_from(&u.transpose());
        }
        out
    }

    fn project(&self, x: &mut DVector<f64>) {
        polish_all::<G>(x, self.sys.generators());
    }
}

/// Free-τ system near the abelian point: unknowns `(x, τ)`, with linear rows
/// `⟨x - x0, u_k⟩ = c_k` pinning the distance along a chosen direction and
/// the gauge.
pub(crate) struct BranchProblem<'a, G: Group2> {
    pub sys: RelatorSystem<'a, G>,
    pub x0: DVector<f64>,
    pub rows: Vec<(DVector<f64>, f64)>,
}

impl<G: Group2> LeastSquares for BranchProblem<'_, G> {
    fn residual(&self, z: &DVector<f64>) -> DVector<f64> {
        let m = self.x0.len();
        let x = z.rows(0, m).into_owned();
        let f = self.sys.residual(x.as_slice(), z[m]);
        let d = &x - &self.x0;
        let extra = self.rows.iter().map(|(u, c)| d.dot(u) - c);
        DVector::from_iterator(f.len() + self.rows.len(), f.iter().copied().chain(extra))
    }

    fn jacobian(&self, z: &DVector<f64>) -> DMatrix<f64> {
        let m = self.x0.len();
        let n = self.sys.generators();
        let j = self.sys.jacobian(&z.as_slice()[..m]);
        let mut out = DMatrix::zeros(j.nrows() + self.rows.len(), m + 1);
        out.view_mut((0, 0), (j.nrows(), m)).copy_from(&j);
        let base = 4 * (n - 1);
        for i in 0..n {
            out[(base + i, m)] = -1.0;
        }
        for (k, (u, _)) in self.rows.iter().enumerate() {
            for c in 0..m {
                out[(j.nrows() + k, c)] = u[c];
            }
        }
        out
    }

    fn project(&self, z: &mut DVector<f64>) {
        let m = self.x0.len();
        let mut x = z.rows(0, m).into_owned();
        polish_all::<G>(&mut x, self.sys.generators());
        z.rows_mut(0, m).copy_from(&x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::{presentation, BraidWord};
    use crate::repspace::group::{Sl2R, Su2};

    fn numeric_jacobian<G: Group2>(sys: &RelatorSystem<G>, x: &[f64]) -> DMatrix<f64> {
        let h = 1e-6;
        let mut out = DMatrix::zeros(sys.rows(), x.len());
        for c in 0..x.len() {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[c] += h;
            xm[c] -= h;
            let d = (sys.residual(&xp, 0.3) - sys.residual(&xm, 0.3)) / (2.0 * h);
            out.set_column(c, &d);
        }
        out
    }

    fn check<G: Group2>(braid: &str, strands: usize) {
        let p = presentation(&BraidWord::parse(braid, strands).unwrap());
        let sys = RelatorSystem::<G>::new(&p.images);
        let x: Vec<f64> = (0..4 * strands).map(|k| ((k * 7 + 3) % 11) as f64 / 7.0 - 0.6).collect();
        let a = sys.jacobian(&x);
        let b = numeric_jacobian(&sys, &x);
        assert!((a - b).amax() < 1e-6);
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        check::<Sl2R>("1 1 1", 2);
        check::<Su2>("1 1 1", 2);
        check::<Sl2R>("1 -2 1 -2", 3);
        check::<Su2>("1 1 2 -1 -3 2 -3", 4);
    }
}
