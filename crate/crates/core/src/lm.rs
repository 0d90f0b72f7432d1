//! Small dense Levenberg-Marquardt solver with a central-difference Jacobian.

use alloc::vec;
use alloc::vec::Vec;

/// Solver settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LmOptions {
    pub max_iterations: usize,
    /// Stop once `max_i |r_i|` falls below this.
    pub residual_tolerance: f64,
    /// Stop once the relative step falls below this.
    pub step_tolerance: f64,
    /// Relative Jacobian step.
    pub jacobian_step: f64,
}

impl Default for LmOptions {
    fn default() -> Self {
        LmOptions { max_iterations: 200, residual_tolerance: 1e-12, step_tolerance: 1e-15, jacobian_step: 1e-6 }
    }
}

/// Final state of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct LmOutcome {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
}

impl LmOutcome {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0f64, |m, r| m.max(r.abs()))
    }
}

fn cost(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Minimize `‖f(x)‖²` from `x0`. `f` returns `None` where it is undefined,
/// which the solver treats as a rejected step.
pub fn minimize<F>(f: F, x0: &[f64], opts: &LmOptions) -> Option<LmOutcome>
where
    F: Fn(&[f64]) -> Option<Vec<f64>>,
{
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x)?;
    let m = r.len();
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        if r.iter().all(|v| v.abs() < opts.residual_tolerance) {
            break;
        }
        iterations += 1;

        let mut jac = vec![0.0; m * n];
        for j in 0..n {
            let h = opts.jacobian_step * x[j].abs().max(1.0);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (rp, rm) = (f(&xp)?, f(&xm)?);
            for i in 0..m {
                jac[i * n + j] = (rp[i] - rm[i]) / (2.0 * h);
            }
        }
        let mut jtj = vec![0.0; n * n];
        let mut jtr = vec![0.0; n];
        for i in 0..m {
            for a in 0..n {
                jtr[a] += jac[i * n + a] * r[i];
                for b in 0..n {
                    jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
                }
            }
        }

        let mut accepted = false;
        while lambda < 1e16 {
            let mut lhs = jtj.clone();
            for a in 0..n {
                lhs[a * n + a] += lambda * (jtj[a * n + a] + 1e-12);
            }
            let rhs: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = solve_dense(lhs, rhs, n) else {
                lambda *= 4.0;
                continue;
            };
            let trial: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            match f(&trial) {
                Some(rt) if cost(&rt) < c => {
                    let step_norm = step.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                    let x_norm = x.iter().fold(0.0f64, |s, v| s.max(v.abs()));
                    x = trial;
                    r = rt;
                    c = cost(&r);
                    lambda = (lambda / 3.0).max(1e-12);
                    accepted = true;
                    if step_norm <= opts.step_tolerance * (x_norm + opts.step_tolerance) {
                        return Some(LmOutcome { x, residuals: r, iterations });
                    }
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !accepted {
            break;
        }
    }
    Some(LmOutcome { x, residuals: r, iterations })
}

/// Gaussian elimination with partial pivoting on a row-major `n × n` system.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>, n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i * n + col].abs().total_cmp(&a[j * n + col].abs()))?;
        if a[pivot * n + col].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        for row in col + 1..n {
            let factor = a[row * n + col] / a[col * n + col];
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}
