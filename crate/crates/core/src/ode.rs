//! Brute-force integration of the coupled amplitude equations.
//!
//! The propagator `M(z)` obeys `dM/dz = A(z) M` with `M(0) = I` and
//! `A = [[0, -iΩ e^{-iΦ}], [iΩ e^{iΦ}, 0]]`, `dΦ/dz = Δk + ε`. We integrate all
//! four entries with an adaptive Dormand-Prince 5(4) scheme, restarting at
//! every segment boundary, and never touch the closed forms of [`crate::su11`].

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::su11::{Design, Su11Matrix};
use crate::{Complex, Error, Result};

type State = [Complex; 4];

/// Integrator settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Relative tolerance of the coarse pass; the refined pass uses `rtol / 16`.
    pub rtol: f64,
    /// Step budget per pass.
    pub max_steps: usize,
    /// Allowed entrywise disagreement between the two passes, relative to
    /// `max(|x|, |y|, 1)`.
    pub consistency: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { rtol: 1e-10, max_steps: 2_000_000, consistency: 1e-8 }
    }
}

/// Integrate a design with the default tolerances and the given step budget.
pub fn ode_oracle(design: &Design, epsilon: f64, step_count: usize) -> Result<Su11Matrix> {
    ode_oracle_with(design, epsilon, &OracleOptions { max_steps: step_count, ..OracleOptions::default() })
}

pub fn ode_oracle_with(design: &Design, epsilon: f64, opts: &OracleOptions) -> Result<Su11Matrix> {
    design.validate()?;
    let coarse = integrate(design, epsilon, opts.rtol, opts.max_steps)?;
    let fine = integrate(design, epsilon, opts.rtol / 16.0, opts.max_steps)?;
    for k in 0..4 {
        let scale = coarse[k].norm().max(fine[k].norm()).max(1.0);
        let diff = (coarse[k] - fine[k]).norm();
        if diff > opts.consistency * scale {
            return Err(Error::OracleFailure(format!(
                "refinement changed entry {k} by {diff:e} (scale {scale:e})"
            )));
        }
    }
    let pseudo = (fine[2] - fine[1].conj()).norm().max((fine[3] - fine[0].conj()).norm());
    let scale = fine[0].norm().max(1.0);
    if pseudo > opts.consistency * scale {
        return Err(Error::OracleFailure(format!("integrated matrix lost its SU(1,1) structure ({pseudo:e})")));
    }
    Ok(Su11Matrix { alpha: fine[0], beta: fine[1] })
}

// Row-major [[m00, m01], [m10, m11]].
fn integrate(design: &Design, epsilon: f64, rtol: f64, max_steps: usize) -> Result<State> {
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let mut y: State = [one, zero, zero, one];
    let mut phi0 = 0.0;
    let mut steps = 0usize;
    for seg in &design.segments {
        let omega = seg.omega;
        let dk = seg.delta_k + epsilon;
        let rhs = |t: f64, m: &State| -> State {
            let e = Complex::from_polar(omega, -(phi0 + dk * t));
            let upper = Complex::new(e.im, -e.re); // -i Ω e^{-iΦ}
            let lower = Complex::new(e.im, e.re); // i Ω e^{iΦ}
            [upper * m[2], upper * m[3], lower * m[0], lower * m[1]]
        };
        let rate = omega.max(dk.abs()).max(1.0 / seg.length);
        let mut h = (0.05 / rate).min(seg.length);
        let mut t = 0.0;
        while t < seg.length {
            if steps >= max_steps {
                return Err(Error::OracleFailure(format!("step budget of {max_steps} exhausted")));
            }
            steps += 1;
            if t + h > seg.length {
                h = seg.length - t;
            }
            let (y_new, err) = dopri_step(&rhs, t, &y, h);
            let scale = y.iter().chain(y_new.iter()).fold(1.0f64, |m, c| m.max(c.norm()));
            let err_norm = err / (rtol * scale);
            if err_norm <= 1.0 || h < 1e-14 * seg.length {
                t += h;
                y = y_new;
            }
            let factor = if err_norm == 0.0 { 5.0 } else { (0.9 * err_norm.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        }
        phi0 += dk * seg.length;
    }
    Ok(y)
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// 5th-order weights are A[6]; E = b5 - b4.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn dopri_step<F: Fn(f64, &State) -> State>(f: &F, t: f64, y: &State, h: f64) -> (State, f64) {
    let mut k = [[Complex::new(0.0, 0.0); 4]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for i in 0..4 {
                    ys[i] += kj[i] * (h * a);
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
        if s == 6 {
            // FSAL: stage 7 is evaluated at the 5th-order solution
            let mut err = 0.0f64;
            for i in 0..4 {
                let mut e = Complex::new(0.0, 0.0);
                for (j, kj) in k.iter().enumerate() {
                    e += kj[i] * E[j];
                }
                err = err.max((e * h).norm());
            }
            return (ys, err);
        }
    }
    unreachable!()
}
