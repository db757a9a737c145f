//! Damped least squares (Levenberg–Marquardt): solve `(JᵀJ + λI) δ = -Jᵀr`,
//! accept the step if `‖r‖` drops and divide `λ` by 10, otherwise multiply by 10.

use nalgebra::{DMatrix, DVector};

pub trait LeastSquares {
    fn residual(&self, x: &DVector<f64>) -> DVector<f64>;
    fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64>;
    /// Retraction applied after every update.
    fn project(&self, _x: &mut DVector<f64>) {}
}

#[derive(Clone, Copy, Debug)]
pub struct LmOptions {
    pub max_iterations: usize,
    pub initial_lambda: f64,
    /// Stop once `‖r‖` is below this.
    pub tolerance: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        Self { max_iterations: 200, initial_lambda: 1e-3, tolerance: 1e-13 }
    }
}

/// Returns the last accepted iterate.
pub fn solve<P: LeastSquares>(problem: &P, x0: DVector<f64>, opts: LmOptions) -> DVector<f64> {
    let mut x = x0;
    problem.project(&mut x);
    let mut r = problem.residual(&x);
    let mut cost = r.norm_squared();
    let mut lambda = opts.initial_lambda;
    let mut iterations = 0;
    while iterations < opts.max_iterations && cost.sqrt() >= opts.tolerance {
        iterations += 1;
        let j = problem.jacobian(&x);
        let jt = j.transpose();
        let jtj = &jt * &j;
        let g = &jt * &r;
        let mut improved = false;
        while lambda < 1e12 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda;
            }
            let Some(chol) = a.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let delta = chol.solve(&(-&g));
            let mut trial = &x + delta;
            problem.project(&mut trial);
            let r_trial = problem.residual(&trial);
            let c_trial = r_trial.norm_squared();
            if c_trial < cost {
                x = trial;
                r = r_trial;
                cost = c_trial;
                lambda = (lambda / 10.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 10.0;
        }
        if !improved {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rosenbrock;

    impl LeastSquares for Rosenbrock {
        fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]])
        }
        fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(2, 2, &[-20.0 * x[0], 10.0, -1.0, 0.0])
        }
    }

    struct Circle;

    impl LeastSquares for Circle {
        fn residual(&self, x: &DVector<f64>) -> DVector<f64> {
            DVector::from_vec(vec![x[0] * x[0] + x[1] * x[1] - 1.0])
        }
        fn jacobian(&self, x: &DVector<f64>) -> DMatrix<f64> {
            DMatrix::from_row_slice(1, 2, &[2.0 * x[0], 2.0 * x[1]])
        }
    }

    #[test]
    fn rosenbrock_converges() {
        let x = solve(&Rosenbrock, DVector::from_vec(vec![-1.2, 1.0]), LmOptions::default());
        assert!(Rosenbrock.residual(&x).norm() < 1e-12);
        assert!((x[0] - 1.0).abs() < 1e-10 && (x[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn underdetermined_lands_on_the_solution_set() {
        let x = solve(&Circle, DVector::from_vec(vec![2.0, 0.5]), LmOptions::default());
        assert!(Circle.residual(&x).norm() < 1e-12);
    }
}
