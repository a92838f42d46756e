//! SNAIL potential analysis and the detuned Kerr-cat Hamiltonian.
//!
//! Internal units put the Kerr coefficient at K = 1: frequencies are in
//! units of K and times in 1/K. The Hamiltonian of the stabilized oscillator
//! in the frame rotating at half the stabilization-drive frequency is
//!
//! ```text
//! H = Δ a†a + ε₂ (a†² + a²) − K a†²a²
//! ```
//!
//! with the two-photon drive amplitude ε₂ taken real and non-negative. The
//! encoded-qubit manifold sits at the *top* of this spectrum (the double
//! well is inverted in this frame), so "pseudo-energy order" below means
//! eigenvalues sorted descending: the cat doublet first, excited well pairs
//! after it.

use ndarray::Array1;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{
    annihilation_op, cat_state, coherent_state, displacement_op, eig_hermitian, FockOperator,
    FockState, Parity,
};

/// SNAIL junction parameters: `U(φ) = −β E_J cos φ − 3 E_J cos((φ_ext−φ)/3)`.
#[derive(Clone, Copy, Debug)]
pub struct SnailParams {
    /// Josephson energy of the large junctions over ħ (angular frequency).
    pub e_j: f64,
    /// Small-to-large junction energy ratio.
    pub beta: f64,
    /// Scaled external flux (radians).
    pub phi_ext: f64,
}

impl SnailParams {
    pub fn new(e_j: f64, beta: f64, phi_ext: f64) -> Result<Self> {
        if e_j <= 0.0 {
            return Err(Error::InvalidRegime(format!("E_J must be positive, got {e_j}")));
        }
        if !(0.0 < beta && beta < 1.0) {
            return Err(Error::InvalidRegime(format!("beta must be in (0, 1), got {beta}")));
        }
        Ok(Self { e_j, beta, phi_ext })
    }
}

/// SNAIL potential energy at phase `phi`.
pub fn snail_potential(phi: f64, p: &SnailParams) -> f64 {
    -p.beta * p.e_j * phi.cos() - 3.0 * p.e_j * ((p.phi_ext - phi) / 3.0).cos()
}

/// Analytic derivatives of the SNAIL potential, orders 1 through 4.
pub fn snail_derivatives(phi: f64, p: &SnailParams) -> [f64; 4] {
    let c = (p.phi_ext - phi) / 3.0;
    let b = p.beta * p.e_j;
    let e = p.e_j;
    [
        b * phi.sin() - e * c.sin(),
        b * phi.cos() + e / 3.0 * c.cos(),
        -b * phi.sin() + e / 9.0 * c.sin(),
        -b * phi.cos() - e / 27.0 * c.cos(),
    ]
}

/// Fourth-order Taylor data of the SNAIL potential about its local minimum.
#[derive(Clone, Copy, Debug)]
pub struct SnailTaylor {
    pub phi_min: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

/// Locate the potential minimum in (−π, π) and expand to fourth order:
/// `g_k = U⁽ᵏ⁾(φ_min)/k!`.
pub fn snail_taylor(p: &SnailParams) -> Result<SnailTaylor> {
    // coarse scan, then Newton on U'
    let n_scan = 720;
    let mut best_phi = 0.0;
    let mut best_u = f64::INFINITY;
    for k in 0..=n_scan {
        let phi = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * k as f64 / n_scan as f64;
        let u = snail_potential(phi, p);
        if u < best_u {
            best_u = u;
            best_phi = phi;
        }
    }
    let mut phi = best_phi;
    let tol = 1e-13 * p.e_j;
    let mut converged = false;
    for _ in 0..100 {
        let d = snail_derivatives(phi, p);
        if d[1] <= 0.0 {
            return Err(Error::NumericFailure(
                "Newton iteration left the convex region of the SNAIL minimum".into(),
            ));
        }
        let step = d[0] / d[1];
        phi -= step;
        if step.abs() < 1e-15 || snail_derivatives(phi, p)[0].abs() < tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NumericFailure("SNAIL minimizer did not converge".into()));
    }
    let d = snail_derivatives(phi, p);
    if d[1] <= 0.0 {
        return Err(Error::NumericFailure("stationary point is not a minimum".into()));
    }
    Ok(SnailTaylor {
        phi_min: phi,
        g2: d[1] / 2.0,
        g3: d[2] / 6.0,
        g4: d[3] / 24.0,
    })
}

/// Detuned Kerr-cat Hamiltonian parameters, in units of K.
#[derive(Clone, Copy, Debug)]
pub struct KerrCatParams {
    /// Detuning Δ = ω_Q − ω_S/2.
    pub delta: f64,
    /// Two-photon drive amplitude ε₂ (real, ≥ 0).
    pub eps2: f64,
    /// Kerr coefficient K (> 0).
    pub kerr: f64,
    /// Fock truncation.
    pub dim: usize,
}

impl KerrCatParams {
    pub fn new(delta: f64, eps2: f64, kerr: f64, dim: usize) -> Result<Self> {
        if kerr <= 0.0 {
            return Err(Error::InvalidRegime(format!("K must be positive, got {kerr}")));
        }
        if eps2 < 0.0 {
            return Err(Error::InvalidRegime(format!("ε₂ must be ≥ 0, got {eps2}")));
        }
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        let nbar = (eps2 + delta / 2.0) / kerr;
        if nbar < 0.0 {
            return Err(Error::InvalidRegime(format!(
                "mean photon number (ε₂ + Δ/2)/K = {nbar} is negative"
            )));
        }
        Ok(Self { delta, eps2, kerr, dim })
    }

    /// Mean photon number `|α|² = (ε₂ + Δ/2)/K`.
    pub fn mean_photon(&self) -> f64 {
        (self.eps2 + self.delta / 2.0) / self.kerr
    }

    /// The canonical displacement `α = √((ε₂ + Δ/2)/K)`, real and ≥ 0.
    pub fn alpha(&self) -> C64 {
        C64::new(self.mean_photon().sqrt(), 0.0)
    }

    pub fn with_delta_shift(&self, shift: f64) -> Self {
        Self { delta: self.delta + shift, ..*self }
    }
}

/// Assemble `H = Δ a†a + ε₂ (a†² + a²) − K a†²a²` from ladder operators.
pub fn build_hamiltonian(p: &KerrCatParams) -> Result<FockOperator> {
    let a = annihilation_op(p.dim)?;
    let adag = a.adjoint();
    let n = adag.mul(&a);
    let ad2 = adag.mul(&adag);
    let a2 = a.mul(&a);
    let kerr_term = ad2.mul(&a2);
    let h = n
        .scaled(C64::new(p.delta, 0.0))
        .add(&ad2.scaled(C64::new(p.eps2, 0.0)))
        .add(&a2.scaled(C64::new(p.eps2, 0.0)))
        .add(&kerr_term.scaled(C64::new(-p.kerr, 0.0)));
    Ok(h)
}

/// Coefficients of the Hamiltonian in the displaced frame.
#[derive(Clone, Copy, Debug)]
pub struct DisplacedCoeffs {
    /// Constant offset E.
    pub e: f64,
    /// Residual single-photon drive Λ (zero at the canonical α).
    pub lambda: C64,
    /// Effective detuning Δ̃ = Δ − 4K|α|².
    pub delta_tilde: f64,
    /// Residual two-photon drive ε̃₂ = ε₂ − Kα².
    pub eps2_tilde: C64,
    /// Cubic coefficient Γ = −2Kα.
    pub gamma: C64,
}

/// Displaced-frame coefficients for displacement `alpha`.
pub fn displaced_coeffs(p: &KerrCatParams, alpha: C64) -> DisplacedCoeffs {
    let n = alpha.norm_sqr();
    let e = p.delta * n - p.kerr * n * n + p.eps2 * 2.0 * (alpha * alpha).re;
    let lambda =
        -p.delta * alpha + 2.0 * p.kerr * n * alpha.conj() - 2.0 * p.eps2 * alpha.conj();
    let delta_tilde = p.delta - 4.0 * p.kerr * n;
    let eps2_tilde = C64::new(p.eps2, 0.0) - p.kerr * alpha * alpha;
    let gamma = -2.0 * p.kerr * alpha;
    DisplacedCoeffs { e, lambda, delta_tilde, eps2_tilde, gamma }
}

/// Rebuild the displaced-frame Hamiltonian from its coefficients:
/// `E + Λa† + Λ*a + Δ̃a†a + ε̃₂a†² + ε̃₂*a² + Γa†²a + Γ*a†a² − K a†²a²`.
pub fn hamiltonian_from_coeffs(c: &DisplacedCoeffs, kerr: f64, dim: usize) -> Result<FockOperator> {
    let a = annihilation_op(dim)?;
    let adag = a.adjoint();
    let n = adag.mul(&a);
    let ad2 = adag.mul(&adag);
    let a2 = a.mul(&a);
    let h = FockOperator::identity(dim)?
        .scaled(C64::new(c.e, 0.0))
        .add(&adag.scaled(c.lambda))
        .add(&a.scaled(c.lambda.conj()))
        .add(&n.scaled(C64::new(c.delta_tilde, 0.0)))
        .add(&ad2.scaled(c.eps2_tilde))
        .add(&a2.scaled(c.eps2_tilde.conj()))
        .add(&ad2.mul(&a).scaled(c.gamma))
        .add(&adag.mul(&a2).scaled(c.gamma.conj()))
        .add(&ad2.mul(&a2).scaled(C64::new(-kerr, 0.0)));
    Ok(h)
}

/// The Hamiltonian conjugated into the displaced frame, `D†(α) H D(α)`.
pub fn displaced_hamiltonian(p: &KerrCatParams, alpha: C64) -> Result<FockOperator> {
    let h = build_hamiltonian(p)?;
    let d = displacement_op(alpha, p.dim)?;
    Ok(d.adjoint().mul(&h).mul(&d))
}

/// Perturbative ground (well) energy `(Δ/2+ε₂)²/K + Δ²K/(4ε₂+Δ)²`.
pub fn perturbative_ground_energy(p: &KerrCatParams) -> Result<f64> {
    let denom = 4.0 * p.eps2 + p.delta;
    if denom.abs() < 1e-12 * p.kerr.max(1.0) {
        return Err(Error::SingularInput("4ε₂ + Δ = 0 in perturbative energy".into()));
    }
    let lead = (p.delta / 2.0 + p.eps2).powi(2) / p.kerr;
    Ok(lead + p.delta * p.delta * p.kerr / (denom * denom))
}

/// Perturbative ground state to first order.
///
/// Returns the displaced-frame state `∝ |0⟩ − √2Δ/(4(4ε₂+Δ)) |2⟩` and the
/// lab-frame state `D†(α)` applied to it (approximately `|−α⟩`).
pub fn perturbative_ground_state(p: &KerrCatParams) -> Result<(FockState, FockState)> {
    let denom = 4.0 * p.eps2 + p.delta;
    if denom.abs() < 1e-12 * p.kerr.max(1.0) {
        return Err(Error::SingularInput("4ε₂ + Δ = 0 in perturbative state".into()));
    }
    let coeff = -(2.0f64).sqrt() * p.delta / (4.0 * denom);
    let zero = FockState::basis(p.dim, 0)?;
    let two = FockState::basis(p.dim, 2)?;
    let displaced = zero.add(&two.scaled(C64::new(coeff, 0.0))).normalized()?;
    let d = displacement_op(p.alpha(), p.dim)?;
    let lab = d.adjoint().apply(&displaced);
    Ok((displaced, lab))
}

/// Eigenvalues of `h` in pseudo-energy order (descending), i.e. the cat
/// doublet first.
pub fn pseudo_spectrum(h: &FockOperator) -> Result<Array1<f64>> {
    let (vals, _) = eig_hermitian(h)?;
    Ok(Array1::from_iter(vals.iter().rev().copied()))
}

/// Spectrum report at one detuning value.
#[derive(Clone, Debug)]
pub struct DetuningSpectrum {
    pub delta: f64,
    /// Lowest pseudo-energy levels (descending eigenvalues of H).
    pub levels: Vec<f64>,
    /// Gap within each level pair (0,1), (2,3), ….
    pub pair_gaps: Vec<f64>,
    /// Indices of pairs whose gap is below the degeneracy threshold.
    pub degenerate_pairs: Vec<usize>,
}

#[derive(Clone, Copy, Debug)]
pub struct SpectrumOptions {
    /// Number of levels to report.
    pub levels: usize,
    /// Pair-gap threshold flagging a degeneracy, in the same units as K.
    pub degeneracy_threshold: f64,
}

impl SpectrumOptions {
    pub fn defaults(kerr: f64) -> Self {
        Self { levels: 8, degeneracy_threshold: 1e-2 * kerr }
    }
}

/// Sweep the detuning and report the low-lying pseudo-spectrum with
/// degeneracy flags.
pub fn spectrum_vs_detuning(
    eps2: f64,
    kerr: f64,
    delta_grid: &[f64],
    dim: usize,
    opts: &SpectrumOptions,
) -> Result<Vec<DetuningSpectrum>> {
    let mut out = Vec::with_capacity(delta_grid.len());
    for &delta in delta_grid {
        let p = KerrCatParams::new(delta, eps2, kerr, dim)?;
        let h = build_hamiltonian(&p)?;
        let spec = pseudo_spectrum(&h)?;
        let m = opts.levels.min(dim);
        let levels: Vec<f64> = spec.iter().take(m).copied().collect();
        let mut pair_gaps = Vec::new();
        let mut degenerate_pairs = Vec::new();
        for i in 0..m / 2 {
            let gap = (levels[2 * i] - levels[2 * i + 1]).abs();
            if gap < opts.degeneracy_threshold {
                degenerate_pairs.push(i);
            }
            pair_gaps.push(gap);
        }
        out.push(DetuningSpectrum { delta, levels, pair_gaps, degenerate_pairs });
    }
    Ok(out)
}

/// The encoded qubit frame: near-degenerate doublet, logical Paulis and the
/// codespace projector.
#[derive(Clone, Debug)]
pub struct CatFrame {
    pub alpha: C64,
    /// Even-parity doublet member (≈ |C_α⁺⟩ = |+X⟩).
    pub even: FockState,
    /// Odd-parity doublet member (≈ |C_α⁻⟩ = |−X⟩).
    pub odd: FockState,
    pub logical_z: FockOperator,
    pub logical_x: FockOperator,
    pub logical_y: FockOperator,
    pub projector: FockOperator,
    /// Pseudo-energy gap from the doublet to the next level.
    pub gap: f64,
}

impl CatFrame {
    /// `|0_L⟩ = |+Z⟩ ≈ |+α⟩`.
    pub fn zero_logical(&self) -> FockState {
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        self.even.scaled(s).add(&self.odd.scaled(s))
    }

    /// `|1_L⟩ = |−Z⟩ ≈ |−α⟩`.
    pub fn one_logical(&self) -> FockState {
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        self.even.scaled(s).add(&self.odd.scaled(-s))
    }

    /// `|+Y⟩ = (|0_L⟩ + i |1_L⟩)/√2`.
    pub fn plus_y_logical(&self) -> FockState {
        let s = C64::new(1.0 / 2f64.sqrt(), 0.0);
        self.zero_logical()
            .scaled(s)
            .add(&self.one_logical().scaled(s * C64::new(0.0, 1.0)))
    }

    /// Projection of `|+α⟩` onto the codespace, normalized: the +Z well
    /// state used for bit-flip preparation.
    pub fn well_plus_state(&self) -> Result<FockState> {
        let coh = coherent_state(self.alpha, self.even.dim())?;
        self.projector.apply(&coh).normalized()
    }

    /// Codespace amplitudes `(⟨0_L|ψ⟩, ⟨1_L|ψ⟩)`.
    pub fn codespace_amplitudes(&self, psi: &FockState) -> (C64, C64) {
        (self.zero_logical().overlap(psi), self.one_logical().overlap(psi))
    }
}

/// Build the encoded-qubit frame for pseudo-energy doublet `pair_index`
/// (0 = ground doublet).
pub fn doublet_frame(p: &KerrCatParams, pair_index: usize) -> Result<CatFrame> {
    if p.eps2 < p.kerr {
        return Err(Error::InvalidRegime(format!(
            "codespace requires ε₂/K ≥ 1, got {}",
            p.eps2 / p.kerr
        )));
    }
    let h = build_hamiltonian(p)?;
    let (vals, states) = eig_hermitian(&h)?;
    let dim = p.dim;
    let i0 = dim - 1 - 2 * pair_index; // descending order indices
    let i1 = i0 - 1;
    if i1 == 0 {
        return Err(Error::IllDefinedCodespace("truncation too small for doublet".into()));
    }
    let gap = vals[i1] - vals[i1 - 1];
    if pair_index == 0 && gap < p.kerr {
        return Err(Error::IllDefinedCodespace(format!(
            "doublet separated from third level by only {gap:.3e} < K"
        )));
    }
    let parity = crate::fock::parity_op(dim)?;
    let pa = states[i0].expectation(&parity).re;
    let pb = states[i1].expectation(&parity).re;
    if pa * pb >= 0.0 {
        return Err(Error::IllDefinedCodespace(
            "doublet members do not split into even/odd parity sectors".into(),
        ));
    }
    let (mut even, mut odd) = if pa > 0.0 {
        (states[i0].clone(), states[i1].clone())
    } else {
        (states[i1].clone(), states[i0].clone())
    };
    let alpha = p.alpha();
    // fix global phases so ⟨C_α^±|member⟩ is real and positive; excited
    // doublets with negligible cat overlap fall back to making the largest
    // amplitude real positive
    let fix_phase = |state: &FockState, reference: &FockState| -> FockState {
        let ov = reference.overlap(state);
        if ov.norm() > 1e-9 {
            state.scaled(ov.conj() / ov.norm())
        } else {
            let z = state
                .amplitudes()
                .iter()
                .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap())
                .copied()
                .unwrap();
            state.scaled(z.conj() / z.norm())
        }
    };
    even = fix_phase(&even, &cat_state(alpha, Parity::Even, dim)?);
    odd = fix_phase(&odd, &cat_state(alpha, Parity::Odd, dim)?);
    // logical operators from outer products in the |0_L⟩, |1_L⟩ basis
    let ee = even.outer(&even);
    let oo = odd.outer(&odd);
    let eo = even.outer(&odd);
    let oe = odd.outer(&even);
    let logical_x = ee.add(&oo.scaled(C64::new(-1.0, 0.0)));
    let logical_z = eo.add(&oe);
    let logical_y = eo.scaled(C64::new(0.0, 1.0)).add(&oe.scaled(C64::new(0.0, -1.0)));
    let projector = ee.add(&oo);
    Ok(CatFrame {
        alpha,
        even,
        odd,
        logical_z,
        logical_x,
        logical_y,
        projector,
        gap,
    })
}

/// The encoded qubit in the ground doublet.
pub fn cat_frame(p: &KerrCatParams) -> Result<CatFrame> {
    doublet_frame(p, 0)
}
