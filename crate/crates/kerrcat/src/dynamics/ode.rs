//! Adaptive embedded Runge–Kutta integration (Dormand–Prince 5(4)).
//!
//! States are flat complex vectors; density matrices are integrated in
//! flattened form. Requested output times are filled by cubic Hermite
//! interpolation inside accepted steps.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-8, atol: 1e-10, max_steps: 50_000_000 }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// (5th − 4th)-order error weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

fn combine(y: &Array1<C64>, h: f64, terms: &[(f64, &Array1<C64>)]) -> Array1<C64> {
    let mut out = y.clone();
    for (c, k) in terms {
        out.zip_mut_with(k, |o, v| *o += v * (h * c));
    }
    out
}

/// Integrate `y' = f(t, y)` from `t_grid[0]` to `t_grid.last()`, invoking
/// `observer(index, t, y)` at every grid time (including the first).
///
/// Returns the final state. `t_grid` must be strictly ascending.
pub fn integrate_grid<F, O>(
    mut rhs: F,
    y0: Array1<C64>,
    t_grid: &[f64],
    opts: &OdeOptions,
    mut observer: O,
) -> Result<Array1<C64>>
where
    F: FnMut(f64, &Array1<C64>) -> Array1<C64>,
    O: FnMut(usize, f64, &Array1<C64>),
{
    if t_grid.len() < 2 {
        return Err(Error::Domain("time grid needs at least two points".into()));
    }
    for w in t_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::Domain("time grid must be strictly ascending".into()));
        }
    }
    let t_start = t_grid[0];
    let t_end = *t_grid.last().unwrap();
    let span = t_end - t_start;

    let mut t = t_start;
    let mut y = y0;
    let mut k1 = rhs(t, &y);
    observer(0, t, &y);
    let mut next_out = 1usize;

    // crude initial step from the first derivative magnitude
    let scale_norm = |v: &Array1<C64>, reference: &Array1<C64>| -> f64 {
        let mut acc = 0.0;
        for (vi, ri) in v.iter().zip(reference.iter()) {
            let sc = opts.atol + opts.rtol * ri.norm();
            let r = vi.norm() / sc;
            acc += r * r;
        }
        (acc / v.len() as f64).sqrt()
    };
    let d1 = scale_norm(&k1, &y).max(1e-10);
    let mut h = (0.01 / d1).min(span / 10.0).max(span * 1e-12);

    let mut steps = 0usize;
    while t < t_end {
        if steps >= opts.max_steps {
            return Err(Error::IntegratorFailure(format!(
                "exceeded {} steps at t = {t}",
                opts.max_steps
            )));
        }
        steps += 1;
        if t + h > t_end {
            h = t_end - t;
        }
        if h < 1e-14 * span {
            return Err(Error::IntegratorFailure(format!("step size underflow at t = {t}")));
        }

        let y2 = combine(&y, h, &[(A21, &k1)]);
        let k2 = rhs(t + C2 * h, &y2);
        let y3 = combine(&y, h, &[(A31, &k1), (A32, &k2)]);
        let k3 = rhs(t + C3 * h, &y3);
        let y4 = combine(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
        let k4 = rhs(t + C4 * h, &y4);
        let y5 = combine(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
        let k5 = rhs(t + C5 * h, &y5);
        let y6 = combine(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        );
        let k6 = rhs(t + h, &y6);
        let y_new = combine(
            &y,
            h,
            &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
        );
        let k7 = rhs(t + h, &y_new);

        // embedded error estimate
        let mut err_acc = 0.0f64;
        for i in 0..y.len() {
            let e = k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7;
            let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
            let r = (e.norm() * h) / sc;
            err_acc += r * r;
        }
        let err = (err_acc / y.len() as f64).sqrt();

        if err <= 1.0 {
            let t_new = t + h;
            // emit all requested grid points inside (t, t_new]
            while next_out < t_grid.len() && t_grid[next_out] <= t_new + 1e-14 * span {
                let tq = t_grid[next_out].min(t_new);
                let theta = ((tq - t) / h).clamp(0.0, 1.0);
                let yi = hermite(&y, &k1, &y_new, &k7, h, theta);
                observer(next_out, t_grid[next_out], &yi);
                next_out += 1;
            }
            t = t_new;
            y = y_new;
            k1 = k7; // first-same-as-last
        }
        let factor = if err < 1e-30 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    Ok(y)
}

fn hermite(
    y0: &Array1<C64>,
    f0: &Array1<C64>,
    y1: &Array1<C64>,
    f1: &Array1<C64>,
    h: f64,
    theta: f64,
) -> Array1<C64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    let mut out = Array1::<C64>::zeros(y0.len());
    for i in 0..y0.len() {
        out[i] = y0[i] * h00 + f0[i] * (h * h10) + y1[i] * h01 + f1[i] * (h * h11);
    }
    out
}
