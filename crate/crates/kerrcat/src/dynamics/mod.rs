//! Time evolution engines, the four-process noise model, quasi-static
//! frequency-noise averaging, and lifetime extraction.

pub mod fit;
pub mod lindblad;
pub mod ode;

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{annihilation_op, cat_state, number_op, FockOperator, FockState, Parity};
use crate::linalg;
use crate::model::{build_hamiltonian, cat_frame, KerrCatParams};
use crate::rng;

pub use fit::{fit_exp_decay, DecayFit};
pub use lindblad::{superoperator, CollapseOp, LindbladRhs, ReducedSpace};
pub use ode::OdeOptions;

/// Dissipation parameters of the four-process noise model, in units of K.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Single-photon decay rate κ₁ = 1/T₁.
    pub kappa1: f64,
    /// Thermal photon population.
    pub n_th: f64,
    /// Two-photon process scale κ⁽²⁾.
    pub kappa2: f64,
    /// Dephasing rate κ_φ.
    pub kappa_phi: f64,
    /// Quasi-static frequency-noise standard deviation ξ.
    pub xi: f64,
}

impl NoiseParams {
    pub fn new(kappa1: f64, n_th: f64, kappa2: f64, kappa_phi: f64, xi: f64) -> Result<Self> {
        for (name, v) in [
            ("kappa1", kappa1),
            ("n_th", n_th),
            ("kappa2", kappa2),
            ("kappa_phi", kappa_phi),
            ("xi", xi),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidRegime(format!("{name} must be ≥ 0, got {v}")));
            }
        }
        if n_th >= 0.5 {
            return Err(Error::InvalidRegime(format!("n_th must be < 0.5, got {n_th}")));
        }
        Ok(Self { kappa1, n_th, kappa2, kappa_phi, xi })
    }

    pub fn zero() -> Self {
        Self { kappa1: 0.0, n_th: 0.0, kappa2: 0.0, kappa_phi: 0.0, xi: 0.0 }
    }

    pub fn is_zero(&self) -> bool {
        self.kappa1 == 0.0 && self.kappa2 == 0.0 && self.kappa_phi == 0.0
    }
}

/// The thermal-Markovian collapse set
/// `{a: κ₁(1+n_th), a†: κ₁n_th, a²: κ₂(1+n_th)², a†²: κ₂n_th², a†a: κ_φ}`.
pub fn standard_collapse_set(np: &NoiseParams, dim: usize) -> Result<Vec<CollapseOp>> {
    let a = annihilation_op(dim)?;
    let adag = a.adjoint();
    let a2 = a.mul(&a);
    let ad2 = adag.mul(&adag);
    let n = number_op(dim)?;
    Ok(vec![
        CollapseOp::new(&a, np.kappa1 * (1.0 + np.n_th))?,
        CollapseOp::new(&adag, np.kappa1 * np.n_th)?,
        CollapseOp::new(&a2, np.kappa2 * (1.0 + np.n_th) * (1.0 + np.n_th))?,
        CollapseOp::new(&ad2, np.kappa2 * np.n_th * np.n_th)?,
        CollapseOp::new(&n, np.kappa_phi)?,
    ])
}

/// A density matrix on the truncated Fock space.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dim: usize,
    entries: Array2<C64>,
}

impl DensityMatrix {
    /// Wrap an explicit matrix, checking Hermiticity and unit trace.
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim < 2 || entries.ncols() != dim {
            return Err(Error::InvalidDimension(dim));
        }
        let scale = entries.iter().fold(0.0f64, |m, z| m.max(z.norm())).max(1.0);
        let dev = linalg::herm_deviation(&entries);
        if dev > 1e-10 * scale {
            return Err(Error::NotHermitian(dev));
        }
        let tr: C64 = (0..dim).map(|i| entries[[i, i]]).sum();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(Error::Model(format!("density matrix trace {tr} is not 1")));
        }
        Ok(Self { dim, entries })
    }

    pub fn from_pure(psi: &FockState) -> Self {
        let op = psi.outer(psi);
        Self { dim: psi.dim(), entries: op.into_entries() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.entries[[i, i]]).sum()
    }

    pub fn expectation(&self, op: &Array2<C64>) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            for j in 0..self.dim {
                acc += op[[i, j]] * self.entries[[j, i]];
            }
        }
        acc
    }

    /// Smallest eigenvalue (positivity diagnostic).
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let (vals, _) = linalg::eigh(&self.entries)?;
        Ok(vals[0])
    }
}

/// Named real observable series on a time grid.
#[derive(Clone, Debug, Serialize)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub series: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn new(times: Vec<f64>) -> Self {
        Self { times, series: Vec::new() }
    }

    pub fn push_series(&mut self, name: impl Into<String>, values: Vec<f64>) {
        assert_eq!(values.len(), self.times.len(), "series length mismatch");
        self.series.push((name.into(), values));
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    /// Concatenate a later segment (its first point must continue this one's
    /// last time).
    pub fn extend_with(&mut self, other: Trajectory) {
        assert_eq!(self.series.len(), other.series.len());
        self.times.extend_from_slice(&other.times);
        for ((_, dst), (_, src)) in self.series.iter_mut().zip(other.series.iter()) {
            dst.extend_from_slice(src);
        }
    }
}

/// Time-dependent Hamiltonian provider.
pub trait TimeDependentH: Sync {
    fn dim(&self) -> usize;
    fn matrix_at(&self, t: f64) -> Array2<C64>;
    /// `H(t) ψ`; override for providers with cheap structure.
    fn apply(&self, t: f64, psi: &Array1<C64>) -> Array1<C64> {
        self.matrix_at(t).dot(psi)
    }
    fn static_matrix(&self) -> Option<&Array2<C64>> {
        None
    }
}

/// A constant Hamiltonian.
pub struct StaticH(pub Array2<C64>);

impl TimeDependentH for StaticH {
    fn dim(&self) -> usize {
        self.0.nrows()
    }
    fn matrix_at(&self, _t: f64) -> Array2<C64> {
        self.0.clone()
    }
    fn apply(&self, _t: f64, psi: &Array1<C64>) -> Array1<C64> {
        self.0.dot(psi)
    }
    fn static_matrix(&self) -> Option<&Array2<C64>> {
        Some(&self.0)
    }
}

/// Hamiltonian given by a closure over time.
pub struct FnH<F: Fn(f64) -> Array2<C64> + Sync> {
    pub dim: usize,
    pub f: F,
}

impl<F: Fn(f64) -> Array2<C64> + Sync> TimeDependentH for FnH<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn matrix_at(&self, t: f64) -> Array2<C64> {
        (self.f)(t)
    }
}

/// Integrate the Schrödinger equation on `t_grid`, recording
/// `Re⟨ψ|O|ψ⟩` for each named observable plus the state norm.
pub fn schrodinger_evolve(
    h: &dyn TimeDependentH,
    psi0: &FockState,
    t_grid: &[f64],
    observables: &[(&str, &FockOperator)],
    opts: &OdeOptions,
) -> Result<(Trajectory, FockState)> {
    let minus_i = C64::new(0.0, -1.0);
    let mut records: Vec<Vec<f64>> = vec![Vec::with_capacity(t_grid.len()); observables.len() + 1];
    let yf = ode::integrate_grid(
        |t, y| h.apply(t, y).mapv(|v| v * minus_i),
        psi0.amplitudes().clone(),
        t_grid,
        opts,
        |_, _, y| {
            for (k, (_, op)) in observables.iter().enumerate() {
                let applied = op.entries().dot(y);
                let val: C64 = y.iter().zip(applied.iter()).map(|(a, b)| a.conj() * b).sum();
                records[k].push(val.re);
            }
            let norm = y.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            records[observables.len()].push(norm);
        },
    )?;
    let mut traj = Trajectory::new(t_grid.to_vec());
    for (k, (name, _)) in observables.iter().enumerate() {
        traj.push_series(*name, std::mem::take(&mut records[k]));
    }
    traj.push_series("norm", std::mem::take(&mut records[observables.len()]));
    Ok((traj, FockState::new(yf)?))
}

/// Exact propagation under a constant Hamiltonian via eigendecomposition:
/// `ψ(t) = V e^{−iλ(t−t₀)} V† ψ₀` at each grid time.
pub fn schrodinger_propagate_static(
    h: &FockOperator,
    psi0: &FockState,
    t_grid: &[f64],
) -> Result<Vec<FockState>> {
    let (vals, vecs) = linalg::eigh(h.entries())?;
    let dim = h.dim();
    let vdag_psi = {
        let mut out = Array1::<C64>::zeros(dim);
        for k in 0..dim {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..dim {
                acc += vecs[[i, k]].conj() * psi0.amplitudes()[i];
            }
            out[k] = acc;
        }
        out
    };
    let t0 = t_grid[0];
    let mut states = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let mut psi = Array1::<C64>::zeros(dim);
        for k in 0..dim {
            let phase = (C64::new(0.0, -1.0) * vals[k] * (t - t0)).exp();
            let w = vdag_psi[k] * phase;
            for i in 0..dim {
                psi[i] += vecs[[i, k]] * w;
            }
        }
        states.push(FockState::new(psi)?);
    }
    Ok(states)
}

/// Integrate the Lindblad master equation on `t_grid` with the adaptive
/// integrator, recording `Re Tr(Oρ)` per observable plus the trace.
pub fn lindblad_evolve(
    h: &dyn TimeDependentH,
    collapse: &[CollapseOp],
    rho0: &DensityMatrix,
    t_grid: &[f64],
    observables: &[(&str, &Array2<C64>)],
    opts: &OdeOptions,
) -> Result<(Trajectory, DensityMatrix)> {
    let dim = rho0.dim();
    let rhs_parts = LindbladRhs::new(dim, collapse);
    let h_static = h.static_matrix().cloned();
    let mut records: Vec<Vec<f64>> = vec![Vec::with_capacity(t_grid.len()); observables.len() + 1];
    let yf = ode::integrate_grid(
        |t, v| {
            let rho = lindblad::unvectorize(v, dim);
            let hm = match &h_static {
                Some(m) => m.clone(),
                None => h.matrix_at(t),
            };
            lindblad::vectorize(&rhs_parts.apply(&hm, &rho))
        },
        lindblad::vectorize(rho0.entries()),
        t_grid,
        opts,
        |_, _, v| {
            let rho = lindblad::unvectorize(v, dim);
            for (k, (_, op)) in observables.iter().enumerate() {
                let mut acc = C64::new(0.0, 0.0);
                for i in 0..dim {
                    for j in 0..dim {
                        acc += op[[i, j]] * rho[[j, i]];
                    }
                }
                records[k].push(acc.re);
            }
            let tr: C64 = (0..dim).map(|i| rho[[i, i]]).sum();
            records[observables.len()].push(tr.re);
        },
    )?;
    let mut traj = Trajectory::new(t_grid.to_vec());
    for (k, (name, _)) in observables.iter().enumerate() {
        traj.push_series(*name, std::mem::take(&mut records[k]));
    }
    traj.push_series("trace", std::mem::take(&mut records[observables.len()]));
    let rho_f = lindblad::unvectorize(&yf, dim);
    Ok((traj, DensityMatrix { dim, entries: rho_f }))
}

/// Lindblad propagation for a constant Hamiltonian over a uniform grid via
/// one superoperator exponential.
pub fn lindblad_propagate_static(
    h: &Array2<C64>,
    collapse: &[CollapseOp],
    rho0: &Array2<C64>,
    t_max: f64,
    n_steps: usize,
    observables: &[(&str, &Array2<C64>)],
) -> Result<(Trajectory, Array2<C64>)> {
    let l = superoperator(h, collapse);
    let dt = t_max / n_steps as f64;
    let obs_refs: Vec<&Array2<C64>> = observables.iter().map(|(_, o)| *o).collect();
    let (series, rho_f) = lindblad::propagate_uniform(&l, rho0, dt, n_steps, &obs_refs)?;
    let times: Vec<f64> = (0..=n_steps).map(|k| k as f64 * dt).collect();
    let mut traj = Trajectory::new(times);
    for ((name, _), values) in observables.iter().zip(series.into_iter()) {
        traj.push_series(*name, values);
    }
    Ok((traj, rho_f))
}

/// Average a Δ-shift-parameterized simulation over quasi-static Gaussian
/// frequency noise of strength `xi`.
///
/// Sample shifts are drawn from per-sample keyed streams and the reduction
/// runs in index order, so results are bit-identical for a fixed seed
/// regardless of thread count. `xi = 0` returns the single unshifted run.
pub fn quasi_static_average<F>(sim: F, xi: f64, n_samples: usize, seed: u64) -> Result<Trajectory>
where
    F: Fn(f64) -> Result<Trajectory> + Sync,
{
    if xi == 0.0 || n_samples == 1 {
        return sim(0.0);
    }
    use rand::Rng;
    use rand_distr::{Distribution, Normal};
    let normal = Normal::new(0.0, xi)
        .map_err(|e| Error::InvalidRegime(format!("bad noise strength: {e}")))?;
    let shifts: Vec<f64> = (0..n_samples)
        .map(|i| {
            let mut r = rng::stream(seed, &[0x5153, i as u64]);
            // burn one draw to decouple from any other use of the stream
            let _: u64 = r.random();
            normal.sample(&mut r)
        })
        .collect();
    let runs: Vec<Result<Trajectory>> = shifts.par_iter().map(|&d| sim(d)).collect();
    let mut acc: Option<Trajectory> = None;
    for run in runs {
        let traj = run?;
        match &mut acc {
            None => acc = Some(traj),
            Some(base) => {
                assert_eq!(base.times.len(), traj.times.len());
                for ((_, dst), (_, src)) in base.series.iter_mut().zip(traj.series.iter()) {
                    for (d, s) in dst.iter_mut().zip(src.iter()) {
                        *d += s;
                    }
                }
            }
        }
    }
    let mut traj = acc.expect("at least one sample");
    let inv = 1.0 / n_samples as f64;
    for (_, v) in traj.series.iter_mut() {
        for x in v.iter_mut() {
            *x *= inv;
        }
    }
    Ok(traj)
}

/// Options for the lifetime simulations.
#[derive(Clone, Copy, Debug)]
pub struct LifetimeOptions {
    /// Initial fit window, in 1/K.
    pub t_max: f64,
    /// Grid points over the window.
    pub n_points: usize,
    /// Quasi-static samples when ξ > 0.
    pub n_samples: usize,
    pub seed: u64,
    /// Eigenbasis truncation for the internal solver; `None` picks
    /// `min(dim, ceil(2 n̄) + 14)`.
    pub reduced_levels: Option<usize>,
    /// Double the window (up to `max_t_max`) until the tracked observable
    /// has decayed visibly.
    pub auto_extend: bool,
    pub max_t_max: f64,
}

impl LifetimeOptions {
    pub fn new(t_max: f64) -> Self {
        Self {
            t_max,
            n_points: 120,
            n_samples: 64,
            seed: 17,
            reduced_levels: None,
            auto_extend: true,
            max_t_max: t_max * 64.0,
        }
    }
}

fn default_reduced_levels(p: &KerrCatParams) -> usize {
    ((2.0 * p.mean_photon()).ceil() as usize + 14).min(p.dim)
}

/// One Lindblad trajectory of `Re Tr(obs ρ)` in the truncated eigenbasis of
/// the (possibly Δ-shifted) Hamiltonian.
fn reduced_lifetime_series(
    p: &KerrCatParams,
    np: &NoiseParams,
    psi0: &FockState,
    obs: &Array2<C64>,
    t_max: f64,
    n_points: usize,
    levels: usize,
) -> Result<Vec<f64>> {
    let h = build_hamiltonian(p)?;
    let collapse = standard_collapse_set(np, p.dim)?;
    if levels >= p.dim {
        let rho0 = psi0.outer(psi0).into_entries();
        let l = superoperator(h.entries(), &collapse);
        let dt = t_max / n_points as f64;
        let (series, _) = lindblad::propagate_uniform(&l, &rho0, dt, n_points, &[obs])?;
        return Ok(series.into_iter().next().unwrap());
    }
    let space = ReducedSpace::new(&h, levels)?;
    let m = space.m();
    let mut h_red = Array2::<C64>::zeros((m, m));
    for k in 0..m {
        h_red[[k, k]] = C64::new(space.energies[k], 0.0);
    }
    let collapse_red: Vec<CollapseOp> = collapse
        .iter()
        .filter(|c| c.rate > 0.0)
        .map(|c| CollapseOp { op: space.project_op(&c.op), rate: c.rate })
        .collect();
    let psi_red = space.project_state(psi0.amplitudes());
    let rho_red = Array2::from_shape_fn((m, m), |(i, j)| psi_red[i] * psi_red[j].conj());
    let obs_red = space.project_op(obs);
    let l = superoperator(&h_red, &collapse_red);
    let dt = t_max / n_points as f64;
    let (series, _) = lindblad::propagate_uniform(&l, &rho_red, dt, n_points, &[&obs_red])?;
    Ok(series.into_iter().next().unwrap())
}

/// Which logical axis a lifetime simulation tracks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LifetimeAxis {
    Z,
    Y,
}

fn lifetime_run(
    p: &KerrCatParams,
    np: &NoiseParams,
    axis: LifetimeAxis,
    opts: &LifetimeOptions,
) -> Result<(DecayFit, Trajectory)> {
    let frame = cat_frame(p)?;
    let (psi0, obs, name) = match axis {
        LifetimeAxis::Z => (
            frame.well_plus_state()?,
            frame.logical_z.entries().clone(),
            "expZ",
        ),
        LifetimeAxis::Y => (
            frame.plus_y_logical().normalized()?,
            frame.logical_y.entries().clone(),
            "expY",
        ),
    };
    let levels = opts.reduced_levels.unwrap_or_else(|| default_reduced_levels(p));

    let mut t_max = opts.t_max;
    loop {
        let sim = |shift: f64| -> Result<Trajectory> {
            let shifted = p.with_delta_shift(shift);
            let series = reduced_lifetime_series(
                &shifted, np, &psi0, &obs, t_max, opts.n_points, levels,
            )?;
            let dt = t_max / opts.n_points as f64;
            let mut traj = Trajectory::new((0..=opts.n_points).map(|k| k as f64 * dt).collect());
            traj.push_series(name, series);
            Ok(traj)
        };
        let traj = quasi_static_average(sim, np.xi, opts.n_samples, opts.seed)?;
        let series = traj.get(name).unwrap();
        let decayed = series.last().unwrap().abs() < 0.6 * series[0].abs().max(1e-12);
        if decayed || !opts.auto_extend || t_max >= opts.max_t_max {
            let fitted = fit_exp_decay(&traj.times, series)?;
            return Ok((fitted, traj));
        }
        t_max *= 2.0;
    }
}

/// Bit-flip time: prepare the +Z well state, evolve under the full collapse
/// set averaged over quasi-static detuning noise, fit `⟨Z⟩(t)` to
/// `A e^{−t/T} + C`.
pub fn bit_flip_time(
    p: &KerrCatParams,
    np: &NoiseParams,
    opts: &LifetimeOptions,
) -> Result<(DecayFit, Trajectory)> {
    lifetime_run(p, np, LifetimeAxis::Z, opts)
}

/// Phase-flip time: prepare the logical +Y state and fit the `⟨Y⟩(t)` decay.
pub fn phase_flip_time(
    p: &KerrCatParams,
    np: &NoiseParams,
    opts: &LifetimeOptions,
) -> Result<(DecayFit, Trajectory)> {
    lifetime_run(p, np, LifetimeAxis::Y, opts)
}

/// Initialization simulation: ramp the two-photon drive from zero with a
/// smooth tanh profile while tracking overlaps with the instantaneous cat
/// pair, then (optionally) relax under the full Lindblad set at the final
/// drive.
pub fn initialization_sim(
    p: &KerrCatParams,
    np: &NoiseParams,
    ramp_time: f64,
    relax_time: f64,
    n_points: usize,
) -> Result<Trajectory> {
    if ramp_time <= 0.0 {
        return Err(Error::Domain("ramp_time must be positive".into()));
    }
    let dim = p.dim;
    let a = annihilation_op(dim)?;
    let adag = a.adjoint();
    let n_op = number_op(dim)?;
    let ad2 = adag.mul(&adag).into_entries();
    let a2 = a.mul(&a).into_entries();
    let static_part = {
        let kerr_term = adag.mul(&adag).mul(&a.mul(&a));
        n_op.scaled(C64::new(p.delta, 0.0))
            .add(&kerr_term.scaled(C64::new(-p.kerr, 0.0)))
            .into_entries()
    };
    let profile = |t: f64| -> f64 {
        let u = (t / ramp_time).clamp(0.0, 1.0);
        (4.0 * u).tanh() / 4.0f64.tanh()
    };
    let eps_at = move |t: f64| p.eps2 * profile(t);

    let overlaps_of = |amps: &Array1<C64>, eps: f64| -> Result<(f64, f64, f64)> {
        let nbar = (eps + p.delta / 2.0) / p.kerr;
        let alpha = C64::new(nbar.max(0.0).sqrt(), 0.0);
        let even = cat_state(alpha, Parity::Even, dim)?;
        let odd = if alpha.norm() < 1e-8 {
            FockState::basis(dim, 1)?
        } else {
            cat_state(alpha, Parity::Odd, dim)?
        };
        let dotc = |s: &FockState| -> C64 {
            s.amplitudes()
                .iter()
                .zip(amps.iter())
                .map(|(x, y)| x.conj() * y)
                .sum()
        };
        let op = dotc(&even).norm_sqr();
        let om = dotc(&odd).norm_sqr();
        let vac = amps[0].norm_sqr();
        Ok((op, om, vac))
    };

    // ramp segment: pure-state Schrödinger evolution
    let grid: Vec<f64> = (0..=n_points)
        .map(|k| ramp_time * k as f64 / n_points as f64)
        .collect();
    let minus_i = C64::new(0.0, -1.0);
    let mut op_series = Vec::with_capacity(grid.len());
    let mut om_series = Vec::with_capacity(grid.len());
    let mut vac_series = Vec::with_capacity(grid.len());
    let mut leak_series = Vec::with_capacity(grid.len());
    let psi0 = FockState::vacuum(dim)?;
    let mut obs_err: Option<Error> = None;
    let yf = ode::integrate_grid(
        |t, y| {
            let eps = C64::new(eps_at(t), 0.0);
            let mut out = static_part.dot(y);
            out = out + ad2.dot(y).mapv(|v| v * eps) + a2.dot(y).mapv(|v| v * eps);
            out.mapv(|v| v * minus_i)
        },
        psi0.amplitudes().clone(),
        &grid,
        &OdeOptions::default(),
        |_, t, y| {
            if obs_err.is_some() {
                return;
            }
            match overlaps_of(y, eps_at(t)) {
                Ok((op, om, vac)) => {
                    op_series.push(op);
                    om_series.push(om);
                    vac_series.push(vac);
                    leak_series.push(1.0 - op - om);
                }
                Err(e) => obs_err = Some(e),
            }
        },
    )?;
    if let Some(e) = obs_err {
        return Err(e);
    }
    let mut traj = Trajectory::new(grid);
    traj.push_series("overlap_plus", op_series);
    traj.push_series("overlap_minus", om_series);
    traj.push_series("overlap_vacuum", vac_series);
    traj.push_series("leakage", leak_series);

    if relax_time > 0.0 {
        let h = build_hamiltonian(p)?;
        let collapse = standard_collapse_set(np, dim)?;
        let alpha = p.alpha();
        let even = cat_state(alpha, Parity::Even, dim)?;
        let odd = cat_state(alpha, Parity::Odd, dim)?;
        let proj_even = even.outer(&even).into_entries();
        let proj_odd = odd.outer(&odd).into_entries();
        let proj_vac = {
            let v = FockState::vacuum(dim)?;
            v.outer(&v).into_entries()
        };
        let rho0 = {
            let f = FockState::new(yf)?;
            f.outer(&f).into_entries()
        };
        let (relax, _) = lindblad_propagate_static(
            h.entries(),
            &collapse,
            &rho0,
            relax_time,
            n_points,
            &[("overlap_plus", &proj_even), ("overlap_minus", &proj_odd), ("overlap_vacuum", &proj_vac)],
        )?;
        // skip the duplicated t = ramp_time point
        let mut times = Vec::with_capacity(n_points);
        let mut seg: Vec<Vec<f64>> = vec![Vec::with_capacity(n_points); 4];
        for k in 1..=n_points {
            times.push(ramp_time + relax.times[k]);
            let op = relax.get("overlap_plus").unwrap()[k];
            let om = relax.get("overlap_minus").unwrap()[k];
            let vac = relax.get("overlap_vacuum").unwrap()[k];
            seg[0].push(op);
            seg[1].push(om);
            seg[2].push(vac);
            seg[3].push(1.0 - op - om);
        }
        let mut tail = Trajectory::new(times);
        tail.push_series("overlap_plus", std::mem::take(&mut seg[0]));
        tail.push_series("overlap_minus", std::mem::take(&mut seg[1]));
        tail.push_series("overlap_vacuum", std::mem::take(&mut seg[2]));
        tail.push_series("leakage", std::mem::take(&mut seg[3]));
        traj.extend_with(tail);
    }
    Ok(traj)
}
