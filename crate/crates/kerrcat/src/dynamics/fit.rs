//! Exponential-decay fitting `y(t) = A e^{−t/T} + C` by Gauss–Newton with
//! Levenberg-style damping.

use serde::Serialize;

use crate::error::{Error, Result};

/// Fitted exponential decay with one-sigma uncertainties.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct DecayFit {
    pub amplitude: f64,
    pub offset: f64,
    pub time_constant: f64,
    pub sigma_amplitude: f64,
    pub sigma_offset: f64,
    pub sigma_time: f64,
    pub n_points: usize,
    /// Set when the series decays by less than 1e-4 of its window; the
    /// reported time constant is then a lower bound, not an estimate.
    pub is_lower_bound: bool,
}

/// Relative decay below which a fit is reported as a lower bound.
const SLOW_DECAY_FRACTION: f64 = 1e-4;

fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = m[r][col] / m[col][col];
            for c in col..3 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    Some([b[0] / m[0][0], b[1] / m[1][1], b[2] / m[2][2]])
}

/// Fit `A e^{−t/T} + C` to the series.
pub fn fit_exp_decay(t: &[f64], y: &[f64]) -> Result<DecayFit> {
    if t.len() != y.len() || t.len() < 4 {
        return Err(Error::FitFailure {
            reason: format!("need at least 4 matched points, got {}", t.len()),
            residual: f64::NAN,
        });
    }
    let n = t.len();
    let window = t[n - 1] - t[0];
    let y_scale = y.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-30);
    let total_change = (y[0] - y[n - 1]).abs();
    if total_change < SLOW_DECAY_FRACTION * y_scale {
        return Ok(DecayFit {
            amplitude: y[0] - y[n - 1],
            offset: y[n - 1],
            time_constant: window / SLOW_DECAY_FRACTION,
            sigma_amplitude: 0.0,
            sigma_offset: 0.0,
            sigma_time: 0.0,
            n_points: n,
            is_lower_bound: true,
        });
    }

    // initial guesses: C from the tail, A from the span, rate from a
    // log-linear regression over the first decade of decay
    let mut c = y[n - 1];
    let mut a = y[0] - c;
    let mut r = {
        let mut sx = 0.0;
        let mut sy = 0.0;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        let mut m = 0usize;
        for k in 0..n {
            let frac = (y[k] - c) / if a.abs() < 1e-300 { 1.0 } else { a };
            if frac > 0.1 {
                let ly = (frac).ln();
                sx += t[k];
                sy += ly;
                sxx += t[k] * t[k];
                sxy += t[k] * ly;
                m += 1;
            }
        }
        if m >= 2 && (m as f64 * sxx - sx * sx).abs() > 1e-300 {
            let slope = (m as f64 * sxy - sx * sy) / (m as f64 * sxx - sx * sx);
            (-slope).max(1e-3 / window)
        } else {
            3.0 / window
        }
    };

    let mut lambda = 1e-3;
    let residuals = |a: f64, c: f64, r: f64| -> Vec<f64> {
        t.iter()
            .zip(y.iter())
            .map(|(&tk, &yk)| a * (-r * tk).exp() + c - yk)
            .collect()
    };
    let ssr_of = |res: &[f64]| res.iter().map(|v| v * v).sum::<f64>();
    let mut res = residuals(a, c, r);
    let mut ssr = ssr_of(&res);
    let mut converged = false;
    for _ in 0..300 {
        // jacobian rows: (e^{-rt}, 1, -A t e^{-rt})
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for k in 0..n {
            let e = (-r * t[k]).exp();
            let row = [e, 1.0, -a * t[k] * e];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += row[i] * row[j];
                }
                jtr[i] += row[i] * res[k];
            }
        }
        let mut damped = jtj;
        for i in 0..3 {
            damped[i][i] *= 1.0 + lambda;
        }
        let Some(step) = solve3(damped, jtr) else {
            return Err(Error::FitFailure { reason: "singular normal equations".into(), residual: ssr.sqrt() });
        };
        let (na, nc, nr) = (a - step[0], c - step[1], r - step[2]);
        let nres = residuals(na, nc, nr);
        let nssr = ssr_of(&nres);
        if nssr <= ssr {
            let rel = (ssr - nssr) / ssr.max(1e-300);
            a = na;
            c = nc;
            r = nr;
            res = nres;
            ssr = nssr;
            lambda = (lambda * 0.3).max(1e-12);
            if rel < 1e-14 || step.iter().all(|s| s.abs() < 1e-14) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                converged = true; // damped to a standstill at the optimum
                break;
            }
        }
    }
    if !converged {
        return Err(Error::FitFailure { reason: "Gauss-Newton did not converge".into(), residual: ssr.sqrt() });
    }
    if r <= 0.0 {
        return Err(Error::FitFailure { reason: format!("non-decaying rate {r}"), residual: ssr.sqrt() });
    }

    // covariance from the linearization at the optimum
    let dof = (n as isize - 3).max(1) as f64;
    let s2 = ssr / dof;
    let mut jtj = [[0.0f64; 3]; 3];
    for k in 0..n {
        let e = (-r * t[k]).exp();
        let row = [e, 1.0, -a * t[k] * e];
        for i in 0..3 {
            for j in 0..3 {
                jtj[i][j] += row[i] * row[j];
            }
        }
    }
    // invert via column solves
    let mut cov = [[0.0f64; 3]; 3];
    for col in 0..3 {
        let mut e = [0.0; 3];
        e[col] = 1.0;
        let Some(x) = solve3(jtj, e) else {
            return Err(Error::FitFailure { reason: "singular covariance".into(), residual: ssr.sqrt() });
        };
        for rrow in 0..3 {
            cov[rrow][col] = x[rrow];
        }
    }
    let sigma_a = (s2 * cov[0][0].max(0.0)).sqrt();
    let sigma_c = (s2 * cov[1][1].max(0.0)).sqrt();
    let sigma_r = (s2 * cov[2][2].max(0.0)).sqrt();

    Ok(DecayFit {
        amplitude: a,
        offset: c,
        time_constant: 1.0 / r,
        sigma_amplitude: sigma_a,
        sigma_offset: sigma_c,
        sigma_time: sigma_r / (r * r),
        n_points: n,
        is_lower_bound: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_decay() {
        let t: Vec<f64> = (0..60).map(|k| k as f64 * 0.5).collect();
        let y: Vec<f64> = t.iter().map(|&tk| 0.8 * (-tk / 7.0).exp() + 0.1).collect();
        let fit = fit_exp_decay(&t, &y).unwrap();
        assert!((fit.amplitude - 0.8).abs() < 1e-9);
        assert!((fit.offset - 0.1).abs() < 1e-9);
        assert!((fit.time_constant - 7.0).abs() < 1e-8);
        assert!(!fit.is_lower_bound);
    }

    #[test]
    fn constant_series_reports_lower_bound() {
        let t: Vec<f64> = (0..50).map(|k| k as f64).collect();
        let y = vec![0.93; 50];
        let fit = fit_exp_decay(&t, &y).unwrap();
        assert!(fit.is_lower_bound);
        assert!(fit.time_constant >= 49.0 / 1e-4);
    }

    #[test]
    fn noisy_decay_within_uncertainty() {
        use rand::Rng;
        let mut hits = 0;
        for seed in 0..40u64 {
            let mut rng = crate::rng::stream(seed, &[99]);
            let t: Vec<f64> = (0..80).map(|k| k as f64 * 0.4).collect();
            let y: Vec<f64> = t
                .iter()
                .map(|&tk| (-tk / 9.0).exp() + 0.008 * (rng.random::<f64>() - 0.5))
                .collect();
            let fit = fit_exp_decay(&t, &y).unwrap();
            if (fit.time_constant - 9.0).abs() < 3.0 * fit.sigma_time.max(1e-12) {
                hits += 1;
            }
        }
        assert!(hits >= 36, "coverage {hits}/40");
    }
}
