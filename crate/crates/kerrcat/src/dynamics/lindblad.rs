//! Lindblad right-hand side, dense superoperator assembly, and the
//! constant-Hamiltonian propagator fast path.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::FockOperator;
use crate::linalg;

/// One dissipator `rate · D[op]`.
#[derive(Clone, Debug)]
pub struct CollapseOp {
    pub op: Array2<C64>,
    pub rate: f64,
}

impl CollapseOp {
    pub fn new(op: &FockOperator, rate: f64) -> Result<Self> {
        if rate < 0.0 {
            return Err(Error::InvalidRegime(format!("collapse rate must be ≥ 0, got {rate}")));
        }
        Ok(Self { op: op.entries().clone(), rate })
    }
}

/// Precomputed pieces of the Lindblad RHS:
/// `dρ/dt = −i[H,ρ] + Σ J ρ J† − (G ρ + ρ G)` with `J = √γ O`,
/// `G = ½ Σ J†J`.
pub struct LindbladRhs {
    jumps: Vec<(Array2<C64>, Array2<C64>)>, // (J, J†)
    damp: Array2<C64>,
}

impl LindbladRhs {
    pub fn new(dim: usize, collapse: &[CollapseOp]) -> Self {
        let mut jumps = Vec::new();
        let mut damp = Array2::<C64>::zeros((dim, dim));
        for c in collapse {
            if c.rate == 0.0 {
                continue;
            }
            let j = c.op.mapv(|z| z * c.rate.sqrt());
            let jdag = Array2::from_shape_fn((dim, dim), |(i, k)| j[[k, i]].conj());
            damp = damp + jdag.dot(&j).mapv(|z| z * 0.5);
            jumps.push((j, jdag));
        }
        Self { jumps, damp }
    }

    /// Apply the full RHS for Hamiltonian matrix `h`.
    pub fn apply(&self, h: &Array2<C64>, rho: &Array2<C64>) -> Array2<C64> {
        let i = C64::new(0.0, 1.0);
        let mut out = (h.dot(rho) - rho.dot(h)).mapv(|z| -i * z);
        out = out - self.damp.dot(rho) - rho.dot(&self.damp);
        for (j, jdag) in &self.jumps {
            out = out + j.dot(rho).dot(jdag);
        }
        out
    }
}

/// Dense superoperator of the Lindblad generator in row-major vectorization:
/// `vec(AXB) = (A ⊗ Bᵀ) vec(X)`.
pub fn superoperator(h: &Array2<C64>, collapse: &[CollapseOp]) -> Array2<C64> {
    let d = h.nrows();
    let eye = Array2::<C64>::eye(d);
    let i = C64::new(0.0, 1.0);
    let ht = h.t().to_owned();
    let mut l = (linalg::kron(h, &eye) - linalg::kron(&eye, &ht)).mapv(|z| -i * z);
    for c in collapse {
        if c.rate == 0.0 {
            continue;
        }
        let j = c.op.mapv(|z| z * c.rate.sqrt());
        let jconj = j.mapv(|z| z.conj());
        let jdag = Array2::from_shape_fn((d, d), |(a, b)| j[[b, a]].conj());
        let g = jdag.dot(&j).mapv(|z| z * 0.5);
        let gt = g.t().to_owned();
        l = l + linalg::kron(&j, &jconj) - linalg::kron(&g, &eye) - linalg::kron(&eye, &gt);
    }
    l
}

/// Flatten a density matrix row-major.
pub fn vectorize(rho: &Array2<C64>) -> Array1<C64> {
    Array1::from_iter(rho.iter().copied())
}

/// Inverse of [`vectorize`].
pub fn unvectorize(v: &Array1<C64>, dim: usize) -> Array2<C64> {
    Array2::from_shape_fn((dim, dim), |(i, j)| v[i * dim + j])
}

/// March `ρ` over a uniform grid with the one-step propagator
/// `P = exp(L Δt)` and record `Tr(O_k ρ)` for each observable at every grid
/// point (including t = 0).
///
/// Returns the recorded series and the final density matrix.
pub fn propagate_uniform(
    l: &Array2<C64>,
    rho0: &Array2<C64>,
    dt: f64,
    n_steps: usize,
    observables: &[&Array2<C64>],
) -> Result<(Vec<Vec<f64>>, Array2<C64>)> {
    let d = rho0.nrows();
    let n2 = d * d;
    assert_eq!(l.nrows(), n2, "superoperator/state dimension mismatch");
    let p = linalg::expm(&l.mapv(|z| z * dt));
    let pf = linalg::to_faer(&p);
    // weight vectors: Tr(Oρ) = Σ_{ij} O[i,j] ρ[j,i]
    let weights: Vec<Array1<C64>> = observables
        .iter()
        .map(|o| {
            let mut w = Array1::<C64>::zeros(n2);
            for i in 0..d {
                for j in 0..d {
                    w[j * d + i] = o[[i, j]];
                }
            }
            w
        })
        .collect();
    let mut v = faer::Mat::<C64>::zeros(n2, 1);
    for (idx, z) in vectorize(rho0).iter().enumerate() {
        v[(idx, 0)] = *z;
    }
    let mut series: Vec<Vec<f64>> = vec![Vec::with_capacity(n_steps + 1); observables.len()];
    let record = |v: &faer::Mat<C64>, series: &mut Vec<Vec<f64>>| {
        for (w, s) in weights.iter().zip(series.iter_mut()) {
            let mut acc = C64::new(0.0, 0.0);
            for idx in 0..n2 {
                acc += w[idx] * v[(idx, 0)];
            }
            s.push(acc.re);
        }
    };
    record(&v, &mut series);
    for _ in 0..n_steps {
        v = &pf * &v;
        record(&v, &mut series);
    }
    let mut rho = Array2::<C64>::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            rho[[i, j]] = v[(i * d + j, 0)];
        }
    }
    if rho.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NumericFailure("propagator produced non-finite state".into()));
    }
    Ok((series, rho))
}

/// A truncated eigenbasis of a Hamiltonian, kept in descending pseudo-energy
/// order (cat manifold first). Projecting the master equation into this
/// space preserves the slow dynamics while shrinking the superoperator.
pub struct ReducedSpace {
    /// dim × m matrix of kept eigenvector columns.
    pub basis: Array2<C64>,
    /// Eigenvalues matching the kept columns.
    pub energies: Vec<f64>,
}

impl ReducedSpace {
    /// Keep the `m` highest-pseudo-energy eigenvectors of Hermitian `h`.
    pub fn new(h: &FockOperator, m: usize) -> Result<Self> {
        let (vals, vecs) = linalg::eigh(h.entries())?;
        let dim = h.dim();
        let m = m.min(dim);
        let mut basis = Array2::<C64>::zeros((dim, m));
        let mut energies = Vec::with_capacity(m);
        for k in 0..m {
            let src = dim - 1 - k; // descending
            for i in 0..dim {
                basis[[i, k]] = vecs[[i, src]];
            }
            energies.push(vals[src]);
        }
        Ok(Self { basis, energies })
    }

    pub fn m(&self) -> usize {
        self.basis.ncols()
    }

    /// `V† O V`.
    pub fn project_op(&self, op: &Array2<C64>) -> Array2<C64> {
        let vdag = Array2::from_shape_fn((self.m(), self.basis.nrows()), |(k, i)| {
            self.basis[[i, k]].conj()
        });
        vdag.dot(&op.dot(&self.basis))
    }

    /// `V† ψ`.
    pub fn project_state(&self, psi: &Array1<C64>) -> Array1<C64> {
        let m = self.m();
        let mut out = Array1::<C64>::zeros(m);
        for k in 0..m {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..self.basis.nrows() {
                acc += self.basis[[i, k]].conj() * psi[i];
            }
            out[k] = acc;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{annihilation_op, number_op};
    use crate::model::{build_hamiltonian, KerrCatParams};

    #[test]
    fn superoperator_matches_rhs() {
        let p = KerrCatParams::new(1.0, 2.0, 1.0, 8).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let a = annihilation_op(8).unwrap();
        let n = number_op(8).unwrap();
        let collapse = vec![
            CollapseOp::new(&a, 0.05).unwrap(),
            CollapseOp::new(&n, 0.01).unwrap(),
        ];
        let rhs = LindbladRhs::new(8, &collapse);
        let mut rho = Array2::<C64>::zeros((8, 8));
        rho[[0, 0]] = C64::new(0.3, 0.0);
        rho[[1, 1]] = C64::new(0.7, 0.0);
        rho[[0, 1]] = C64::new(0.2, 0.1);
        rho[[1, 0]] = C64::new(0.2, -0.1);
        let direct = rhs.apply(h.entries(), &rho);
        let l = superoperator(h.entries(), &collapse);
        let via_super = unvectorize(&l.dot(&vectorize(&rho)), 8);
        assert!(linalg::max_abs_diff(&direct, &via_super) < 1e-12);
    }

    #[test]
    fn propagator_preserves_trace() {
        let p = KerrCatParams::new(0.0, 2.0, 1.0, 10).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let a = annihilation_op(10).unwrap();
        let collapse = vec![CollapseOp::new(&a, 0.1).unwrap()];
        let l = superoperator(h.entries(), &collapse);
        let mut rho = Array2::<C64>::zeros((10, 10));
        rho[[2, 2]] = C64::new(1.0, 0.0);
        let eye = Array2::<C64>::eye(10);
        let (series, rho_f) = propagate_uniform(&l, &rho, 0.5, 20, &[&eye]).unwrap();
        for tr in &series[0] {
            assert!((tr - 1.0).abs() < 1e-8);
        }
        let tr_f: C64 = (0..10).map(|i| rho_f[[i, i]]).sum();
        assert!((tr_f.re - 1.0).abs() < 1e-8);
        assert!(crate::linalg::herm_deviation(&rho_f) < 1e-8);
    }

    #[test]
    fn reduced_space_reproduces_full_dynamics() {
        // cat-manifold dynamics is unchanged when deep Kerr levels are cut
        let p = KerrCatParams::new(2.0, 3.0, 1.0, 24).unwrap();
        let h = build_hamiltonian(&p).unwrap();
        let a = annihilation_op(24).unwrap();
        let collapse = vec![CollapseOp::new(&a, 0.01).unwrap()];
        let frame = crate::model::cat_frame(&p).unwrap();
        let psi0 = frame.well_plus_state().unwrap();
        let rho0 = psi0.outer(&psi0).into_entries();
        let z = frame.logical_z.entries().clone();

        let l_full = superoperator(h.entries(), &collapse);
        let (full, _) = propagate_uniform(&l_full, &rho0, 1.0, 10, &[&z]).unwrap();

        let space = ReducedSpace::new(&h, 14).unwrap();
        let h_red = space.project_op(h.entries());
        let collapse_red: Vec<CollapseOp> = collapse
            .iter()
            .map(|c| CollapseOp { op: space.project_op(&c.op), rate: c.rate })
            .collect();
        let rho_red = space.project_op(&rho0);
        let z_red = space.project_op(&z);
        let l_red = superoperator(&h_red, &collapse_red);
        let (red, _) = propagate_uniform(&l_red, &rho_red, 1.0, 10, &[&z_red]).unwrap();

        for (a, b) in full[0].iter().zip(red[0].iter()) {
            assert!((a - b).abs() < 1e-6, "{a} vs {b}");
        }
    }
}
