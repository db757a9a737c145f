//! The two real forms of `SL(2,C)` used here, each element packed in four
//! reals. `SL(2,R)` stores `[a, b, c, d]` for `[[a, b], [c, d]]`; `SU(2)`
//! stores a quaternion `[w, x, y, z]`, i.e. `[[w + ix, y + iz], [-y + iz, w - ix]]`.
//! Multiplication is bilinear and `adj` (the inverse on the group) is linear
//! in the packed coordinates, which the Jacobian code relies on.

pub type Elem = [f64; 4];

pub trait Group2: Send + Sync + 'static {
    const ONE: Elem;
    /// Infinitesimal rotation generating the abelian family.
    const ROTATION_GENERATOR: Elem;
    /// A basis of the Lie algebra.
    const LIE_BASIS: [Elem; 3];

    fn mul(a: &Elem, b: &Elem) -> Elem;
    /// Adjugate; equals the inverse when `det = 1`.
    fn adj(a: &Elem) -> Elem;
    fn trace(a: &Elem) -> f64;
    fn det(a: &Elem) -> f64;
    fn trace_grad(a: &Elem) -> Elem;
    fn det_grad(a: &Elem) -> Elem;
    /// Rotation by `θ`, with trace `2cos θ`.
    fn rotation(theta: f64) -> Elem;
    /// Push back onto `det = 1` after an unconstrained update.
    fn polish(a: &mut Elem);
    /// As a complex 2×2 matrix `[[re, im]; 4]` in row-major order.
    fn to_complex(a: &Elem) -> [[f64; 2]; 4];
}

pub struct Sl2R;
pub struct Su2;

impl Group2 for Sl2R {
    const ONE: Elem = [1.0, 0.0, 0.0, 1.0];
    const ROTATION_GENERATOR: Elem = [0.0, -1.0, 1.0, 0.0];
    const LIE_BASIS: [Elem; 3] = [[1.0, 0.0, 0.0, -1.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]];

    fn mul(a: &Elem, b: &Elem) -> Elem {
        [
            a[0] * b[0] + a[1] * b[2],
            a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2],
            a[2] * b[1] + a[3] * b[3],
        ]
    }

    fn adj(a: &Elem) -> Elem {
        [a[3], -a[1], -a[2], a[0]]
    }

    fn trace(a: &Elem) -> f64 {
        a[0] + a[3]
    }

    fn det(a: &Elem) -> f64 {
        a[0] * a[3] - a[1] * a[2]
    }

    fn trace_grad(_: &Elem) -> Elem {
        [1.0, 0.0, 0.0, 1.0]
    }

    fn det_grad(a: &Elem) -> Elem {
        [a[3], -a[2], -a[1], a[0]]
    }

    fn rotation(theta: f64) -> Elem {
        let (s, c) = theta.sin_cos();
        [c, -s, s, c]
    }

    fn polish(a: &mut Elem) {
        let d = Self::det(a);
        if d > 0.0 {
            let s = d.sqrt();
            a.iter_mut().for_each(|x| *x /= s);
        }
    }

    fn to_complex(a: &Elem) -> [[f64; 2]; 4] {
        [[a[0], 0.0], [a[1], 0.0], [a[2], 0.0], [a[3], 0.0]]
    }
}

impl Group2 for Su2 {
    const ONE: Elem = [1.0, 0.0, 0.0, 0.0];
    const ROTATION_GENERATOR: Elem = [0.0, 1.0, 0.0, 0.0];
    const LIE_BASIS: [Elem; 3] = [[0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]];

    fn mul(p: &Elem, q: &Elem) -> Elem {
        let [w1, x1, y1, z1] = *p;
        let [w2, x2, y2, z2] = *q;
        [
            w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
            w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
            w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
            w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
        ]
    }

    fn adj(a: &Elem) -> Elem {
        [a[0], -a[1], -a[2], -a[3]]
    }

    fn trace(a: &Elem) -> f64 {
        2.0 * a[0]
    }

    fn det(a: &Elem) -> f64 {
        a.iter().map(|x| x * x).sum()
    }

    fn trace_grad(_: &Elem) -> Elem {
        [2.0, 0.0, 0.0, 0.0]
    }

    fn det_grad(a: &Elem) -> Elem {
        [2.0 * a[0], 2.0 * a[1], 2.0 * a[2], 2.0 * a[3]]
    }

    fn rotation(theta: f64) -> Elem {
        let (s, c) = theta.sin_cos();
        [c, s, 0.0, 0.0]
    }

    fn polish(a: &mut Elem) {
        let n = Self::det(a).sqrt();
        if n > 0.0 {
            a.iter_mut().for_each(|x| *x /= n);
        }
    }

    fn to_complex(a: &Elem) -> [[f64; 2]; 4] {
        let [w, x, y, z] = *a;
        [[w, x], [y, z], [-y, z], [w, -x]]
    }
}

pub fn commutator<G: Group2>(x: &Elem, a: &Elem) -> Elem {
    let l = G::mul(x, a);
    let r = G::mul(a, x);
    [l[0] - r[0], l[1] - r[1], l[2] - r[2], l[3] - r[3]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Elem, b: &Elem) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() < 1e-12)
    }

    fn check<G: Group2>(a: Elem, b: Elem) {
        let mut a = a;
        G::polish(&mut a);
        assert!((G::det(&a) - 1.0).abs() < 1e-12);
        assert!(close(&G::mul(&a, &G::adj(&a)), &G::ONE));
        // rotations compose additively
        let r = G::mul(&G::rotation(0.3), &G::rotation(0.4));
        assert!(close(&r, &G::rotation(0.7)));
        assert!((G::trace(&G::rotation(0.7)) - 2.0 * 0.7f64.cos()).abs() < 1e-15);
        // trace is conjugation invariant, det multiplicative
        let c = G::mul(&G::mul(&b, &a), &G::adj(&b));
        assert!((G::trace(&c) - G::trace(&a) * G::det(&b)).abs() < 1e-12);
        assert!((G::det(&G::mul(&a, &b)) - G::det(&a) * G::det(&b)).abs() < 1e-12);
        // the rotation generator commutes with rotations
        assert!(close(&commutator::<G>(&G::ROTATION_GENERATOR, &G::rotation(1.1)), &[0.0; 4]));
    }

    #[test]
    fn group_laws() {
        check::<Sl2R>([2.0, 1.0, 3.0, 2.0], [1.0, 0.5, -0.25, 0.875]);
        check::<Su2>([0.1, 0.7, -0.3, 0.2], [0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn complex_forms_are_consistent() {
        // SU(2) multiplication agrees with complex matrix multiplication
        let p = [0.3, 0.1, -0.5, 0.8];
        let q = [0.6, -0.2, 0.1, 0.4];
        let m = |a: &Elem| Su2::to_complex(a);
        let prod = m(&Su2::mul(&p, &q));
        let (a, b) = (m(&p), m(&q));
        let cm = |x: [f64; 2], y: [f64; 2]| [x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0]];
        let add = |x: [f64; 2], y: [f64; 2]| [x[0] + y[0], x[1] + y[1]];
        let expect = [
            add(cm(a[0], b[0]), cm(a[1], b[2])),
            add(cm(a[0], b[1]), cm(a[1], b[3])),
            add(cm(a[2], b[0]), cm(a[3], b[2])),
            add(cm(a[2], b[1]), cm(a[3], b[3])),
        ];
        for (x, y) in prod.iter().zip(expect.iter()) {
            assert!((x[0] - y[0]).abs() < 1e-12 && (x[1] - y[1]).abs() < 1e-12);
        }
    }
}
