//! States and operators on a truncated Fock space.
//!
//! Everything is dense and double precision; target truncations are
//! `dim <= 60` or so, where dense storage beats sparse and keeps the
//! eigensolvers simple.

use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg;

/// Hermiticity tolerance applied by [`eig_hermitian`].
pub const HERMITICITY_TOL: f64 = 1e-10;

/// A ket on a truncated oscillator Hilbert space.
#[derive(Clone, Debug)]
pub struct FockState {
    dim: usize,
    amplitudes: Array1<C64>,
}

impl FockState {
    pub fn new(amplitudes: Array1<C64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, amplitudes })
    }

    /// The Fock basis state `|n⟩`.
    pub fn basis(dim: usize, n: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if n >= dim {
            return Err(Error::Domain(format!("basis index {n} outside dim {dim}")));
        }
        let mut amplitudes = Array1::zeros(dim);
        amplitudes[n] = C64::new(1.0, 0.0);
        Ok(Self { dim, amplitudes })
    }

    /// The vacuum `|0⟩`.
    pub fn vacuum(dim: usize) -> Result<Self> {
        Self::basis(dim, 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &Array1<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Array1<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Rescale to unit norm. Errors on (near-)zero vectors.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n < 1e-14 {
            return Err(Error::ZeroVector("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            dim: self.dim,
            amplitudes: self.amplitudes.mapv(|z| z / n),
        })
    }

    /// `⟨self|other⟩`.
    pub fn overlap(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `⟨self|op|self⟩`.
    pub fn expectation(&self, op: &FockOperator) -> C64 {
        let applied = op.entries.dot(&self.amplitudes);
        self.amplitudes
            .iter()
            .zip(applied.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            amplitudes: self.amplitudes.mapv(|z| z * factor),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            amplitudes: &self.amplitudes + &other.amplitudes,
        }
    }

    /// Outer product `|self⟩⟨other|`.
    pub fn outer(&self, other: &Self) -> FockOperator {
        let d = self.dim;
        let entries = Array2::from_shape_fn((d, d), |(i, j)| {
            self.amplitudes[i] * other.amplitudes[j].conj()
        });
        FockOperator { dim: d, entries }
    }
}

/// A dense operator on a truncated Fock space.
#[derive(Clone, Debug)]
pub struct FockOperator {
    dim: usize,
    entries: Array2<C64>,
}

impl FockOperator {
    pub fn new(entries: Array2<C64>) -> Result<Self> {
        let dim = entries.nrows();
        if dim < 2 || entries.ncols() != dim {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self { dim, entries })
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            entries: Array2::zeros((dim, dim)),
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(Self {
            dim,
            entries: Array2::eye(dim),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &Array2<C64> {
        &self.entries
    }

    pub fn into_entries(self) -> Array2<C64> {
        self.entries
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        Self {
            dim: d,
            entries: Array2::from_shape_fn((d, d), |(i, j)| self.entries[[j, i]].conj()),
        }
    }

    pub fn apply(&self, state: &FockState) -> FockState {
        FockState {
            dim: self.dim,
            amplitudes: self.entries.dot(&state.amplitudes),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.dot(&other.entries),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            entries: &self.entries + &other.entries,
        }
    }

    pub fn scaled(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.mapv(|z| z * factor),
        }
    }

    pub fn herm_deviation(&self) -> f64 {
        linalg::herm_deviation(&self.entries)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.herm_deviation() <= tol
    }

    /// `exp(self)` by scaling-and-squaring.
    pub fn expm(&self) -> Self {
        Self {
            dim: self.dim,
            entries: linalg::expm(&self.entries),
        }
    }
}

/// Annihilation operator `â`: `entries[n-1, n] = √n`.
pub fn annihilation_op(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut entries = Array2::<C64>::zeros((dim, dim));
    for n in 1..dim {
        entries[[n - 1, n]] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(FockOperator { dim, entries })
}

/// Creation operator `â†`.
pub fn creation_op(dim: usize) -> Result<FockOperator> {
    Ok(annihilation_op(dim)?.adjoint())
}

/// Number operator `â†â = diag(0, 1, …, dim-1)`.
pub fn number_op(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut entries = Array2::<C64>::zeros((dim, dim));
    for n in 0..dim {
        entries[[n, n]] = C64::new(n as f64, 0.0);
    }
    Ok(FockOperator { dim, entries })
}

/// Parity operator `diag((-1)^n)`.
pub fn parity_op(dim: usize) -> Result<FockOperator> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut entries = Array2::<C64>::zeros((dim, dim));
    for n in 0..dim {
        entries[[n, n]] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Ok(FockOperator { dim, entries })
}

/// Displacement operator `D(α) = exp(α â† − α* â)`.
///
/// Unitary to ~1e-8 as long as `|α|² + 5|α| < dim` (caller-checked guidance).
pub fn displacement_op(alpha: C64, dim: usize) -> Result<FockOperator> {
    let a = annihilation_op(dim)?;
    let adag = a.adjoint();
    // α a† − α* a is anti-Hermitian; exponentiate through the Hermitian
    // generator −i(α a† − α* a).
    let gen = adag.scaled(alpha).add(&a.scaled(-alpha.conj()));
    let herm = gen.scaled(C64::new(0.0, -1.0));
    let entries = linalg::expm_hermitian(&herm.entries, C64::new(0.0, 1.0))?;
    Ok(FockOperator { dim, entries })
}

/// Coherent state `|α⟩` with Poissonian amplitudes, renormalized on the
/// truncated space.
pub fn coherent_state(alpha: C64, dim: usize) -> Result<FockState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let mut amplitudes = Array1::<C64>::zeros(dim);
    // amplitude(n) = e^{-|α|²/2} α^n / √(n!) built up iteratively
    let mut term = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    amplitudes[0] = term;
    for n in 1..dim {
        term *= alpha / C64::new((n as f64).sqrt(), 0.0);
        amplitudes[n] = term;
    }
    FockState { dim, amplitudes }.normalized()
}

/// Parity sector of a cat state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn from_sign(sign: i32) -> Result<Self> {
        match sign {
            1 => Ok(Parity::Even),
            -1 => Ok(Parity::Odd),
            other => Err(Error::Domain(format!("parity sign must be ±1, got {other}"))),
        }
    }
}

/// Cat state `|C_α^±⟩ ∝ |α⟩ ± |−α⟩`.
///
/// The even (+) cat has support only on even Fock levels and the odd (−) cat
/// only on odd levels; amplitudes on the opposite sector are exactly zero by
/// construction. The odd cat is undefined at α = 0.
pub fn cat_state(alpha: C64, parity: Parity, dim: usize) -> Result<FockState> {
    if dim < 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let keep_even = parity == Parity::Even;
    if !keep_even && alpha.norm() < 1e-14 {
        return Err(Error::ZeroVector(
            "odd cat state is the zero vector at α = 0".into(),
        ));
    }
    let mut amplitudes = Array1::<C64>::zeros(dim);
    let mut term = C64::new(1.0, 0.0); // α^n / √(n!) up to overall normalization
    for n in 0..dim {
        if n > 0 {
            term *= alpha / C64::new((n as f64).sqrt(), 0.0);
        }
        if (n % 2 == 0) == keep_even {
            amplitudes[n] = term;
        }
    }
    FockState { dim, amplitudes }.normalized()
}

/// Analytic cat-state normalization `N_± = [2(1 ± e^{−2|α|²})]^{−1/2}`.
pub fn cat_norm_factor(alpha: C64, parity: Parity) -> f64 {
    1.0 / (2.0 * (1.0 + parity.sign() * (-2.0 * alpha.norm_sqr()).exp())).sqrt()
}

/// Eigendecomposition of a Hermitian operator.
///
/// Rejects inputs whose Hermiticity deviation exceeds [`HERMITICITY_TOL`]
/// relative to the operator's largest entry. Eigenvalues come back ascending
/// with orthonormal eigenvector states.
pub fn eig_hermitian(op: &FockOperator) -> Result<(Array1<f64>, Vec<FockState>)> {
    let scale = op
        .entries
        .iter()
        .fold(0.0f64, |m, z| m.max(z.norm()))
        .max(1.0);
    let dev = op.herm_deviation();
    if dev > HERMITICITY_TOL * scale {
        return Err(Error::NotHermitian(dev));
    }
    let (vals, vecs) = linalg::eigh(&op.entries)?;
    let states = (0..op.dim)
        .map(|j| FockState {
            dim: op.dim,
            amplitudes: vecs.column(j).to_owned(),
        })
        .collect();
    Ok((vals, states))
}

/// Default truncation rule: `dim = ceil(|α|² + 6√(|α|²+1) + 10)`.
///
/// Keeps the coherent-state tail mass below ~1e-10 for `|α|² ≤ 12`.
pub fn default_dim(alpha: C64) -> usize {
    let n = alpha.norm_sqr();
    (n + 6.0 * (n + 1.0).sqrt() + 10.0).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{matmul, max_abs_diff};
    use proptest::prelude::*;

    #[test]
    fn annihilation_dim2_matches_definition() {
        let a = annihilation_op(2).unwrap();
        assert_eq!(a.entries()[[0, 1]], C64::new(1.0, 0.0));
        assert_eq!(a.entries()[[0, 0]], C64::new(0.0, 0.0));
        assert_eq!(a.entries()[[1, 0]], C64::new(0.0, 0.0));
        assert_eq!(a.entries()[[1, 1]], C64::new(0.0, 0.0));
    }

    #[test]
    fn annihilation_ladder_rule() {
        let a = annihilation_op(10).unwrap();
        let n3 = FockState::basis(10, 3).unwrap();
        let lowered = a.apply(&n3);
        let expected = FockState::basis(10, 2).unwrap().scaled(C64::new(3f64.sqrt(), 0.0));
        let diff: f64 = (&lowered.amplitudes - &expected.amplitudes)
            .iter()
            .map(|z| z.norm())
            .sum();
        assert!(diff < 1e-15);
    }

    #[test]
    fn truncated_commutator() {
        // [a, a†] = diag(1, …, 1, -(dim-1)) up to products of exact √n entries
        for dim in [2usize, 5, 17] {
            let a = annihilation_op(dim).unwrap();
            let adag = a.adjoint();
            let comm = a.mul(&adag).add(&adag.mul(&a).scaled(C64::new(-1.0, 0.0)));
            for i in 0..dim {
                for j in 0..dim {
                    let expected = if i != j {
                        0.0
                    } else if i == dim - 1 {
                        -((dim - 1) as f64)
                    } else {
                        1.0
                    };
                    let dev = (comm.entries()[[i, j]] - C64::new(expected, 0.0)).norm();
                    assert!(dev < 1e-13 * dim as f64, "({i},{j}): dev {dev:.3e}");
                }
            }
        }
    }

    #[test]
    fn rejects_dim_below_two() {
        assert!(matches!(annihilation_op(1), Err(Error::InvalidDimension(1))));
        assert!(matches!(annihilation_op(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn displacement_of_zero_is_identity() {
        let d = displacement_op(C64::new(0.0, 0.0), 12).unwrap();
        assert!(max_abs_diff(d.entries(), &Array2::eye(12)) < 1e-12);
    }

    #[test]
    fn displacement_generates_coherent_amplitudes() {
        let alpha = C64::new(1.0, 0.0);
        let d = displacement_op(alpha, 30).unwrap();
        let from_vacuum = d.apply(&FockState::vacuum(30).unwrap());
        // ⟨n|D(α)|0⟩ = e^{-|α|²/2} α^n/√n!
        let mut fact = 1.0f64;
        for n in 0..5 {
            if n > 0 {
                fact *= n as f64;
            }
            let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32)
                / C64::new(fact.sqrt(), 0.0);
            assert!(
                (from_vacuum.amplitudes()[n] - expected).norm() < 1e-8,
                "n = {n}"
            );
        }
    }

    #[test]
    fn displacement_inverse() {
        let alpha = C64::new(2.0, 0.0);
        let d = displacement_op(alpha, 40).unwrap();
        let dinv = displacement_op(-alpha, 40).unwrap();
        let prod = matmul(d.entries(), dinv.entries());
        assert!(max_abs_diff(&prod, &Array2::eye(40)) < 1e-8);
    }

    #[test]
    fn displacement_unitarity() {
        let alpha = C64::new(1.3, -0.8);
        let d = displacement_op(alpha, 40).unwrap();
        let prod = matmul(d.adjoint().entries(), d.entries());
        assert!(max_abs_diff(&prod, &Array2::eye(40)) < 1e-10);
    }

    #[test]
    fn coherent_state_at_zero_is_vacuum() {
        let c = coherent_state(C64::new(0.0, 0.0), 8).unwrap();
        let diff = (&c.amplitudes().to_owned()
            - &FockState::vacuum(8).unwrap().amplitudes().to_owned())
            .iter()
            .map(|z| z.norm())
            .sum::<f64>();
        assert!(diff < 1e-15);
    }

    #[test]
    fn coherent_overlap_identity() {
        // ⟨α|−α⟩ = e^{−2|α|²}
        let alpha = C64::new(1.5, 0.0);
        let p = coherent_state(alpha, 40).unwrap();
        let m = coherent_state(-alpha, 40).unwrap();
        let got = p.overlap(&m);
        let expected = (-2.0 * alpha.norm_sqr()).exp();
        assert!((got - C64::new(expected, 0.0)).norm() < 1e-8);
    }

    #[test]
    fn coherent_mean_photon() {
        let alpha = C64::new(5.2f64.sqrt(), 0.0);
        let c = coherent_state(alpha, 40).unwrap();
        let n = number_op(40).unwrap();
        let got = c.expectation(&n);
        assert!((got.re - 5.2).abs() < 1e-6);
        assert!(got.im.abs() < 1e-12);
    }

    #[test]
    fn coherent_matches_displaced_vacuum() {
        let alpha = C64::new(1.1, 0.7);
        let c = coherent_state(alpha, 30).unwrap();
        let d = displacement_op(alpha, 30).unwrap().apply(&FockState::vacuum(30).unwrap());
        let diff: f64 = (&c.amplitudes().to_owned() - &d.amplitudes().to_owned())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8);
    }

    #[test]
    fn cat_parity_sectors_disjoint_and_orthogonal() {
        let alpha = C64::new(2.0, 0.0);
        let even = cat_state(alpha, Parity::Even, 40).unwrap();
        let odd = cat_state(alpha, Parity::Odd, 40).unwrap();
        for n in 0..40 {
            if n % 2 == 1 {
                assert_eq!(even.amplitudes()[n], C64::new(0.0, 0.0));
            } else {
                assert_eq!(odd.amplitudes()[n], C64::new(0.0, 0.0));
            }
        }
        assert!(even.overlap(&odd).norm() < 1e-12);
    }

    #[test]
    fn even_cat_at_zero_is_vacuum() {
        let c = cat_state(C64::new(0.0, 0.0), Parity::Even, 10).unwrap();
        assert!((c.amplitudes()[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn odd_cat_at_zero_is_error() {
        assert!(matches!(
            cat_state(C64::new(0.0, 0.0), Parity::Odd, 10),
            Err(Error::ZeroVector(_))
        ));
    }

    #[test]
    fn cat_normalization_matches_closed_form() {
        let alpha = C64::new(1.2, 0.0);
        for parity in [Parity::Even, Parity::Odd] {
            let cat = cat_state(alpha, parity, 40).unwrap();
            let plus = coherent_state(alpha, 40).unwrap();
            let minus = coherent_state(-alpha, 40).unwrap();
            let n = cat_norm_factor(alpha, parity);
            let built = plus
                .add(&minus.scaled(C64::new(parity.sign(), 0.0)))
                .scaled(C64::new(n, 0.0));
            let diff: f64 = (&cat.amplitudes().to_owned() - &built.amplitudes().to_owned())
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max);
            assert!(diff < 1e-10, "parity {parity:?}");
        }
    }

    #[test]
    fn cat_sum_reproduces_coherent() {
        // (N₊⁻¹|C⁺⟩ + N₋⁻¹|C⁻⟩)/2 = |α⟩ exactly; overlap after normalization
        let alpha = C64::new(2.28, 0.0);
        let dim = default_dim(alpha);
        let even = cat_state(alpha, Parity::Even, dim).unwrap();
        let odd = cat_state(alpha, Parity::Odd, dim).unwrap();
        let ne = cat_norm_factor(alpha, Parity::Even);
        let no = cat_norm_factor(alpha, Parity::Odd);
        let combo = even
            .scaled(C64::new(0.5 / ne, 0.0))
            .add(&odd.scaled(C64::new(0.5 / no, 0.0)))
            .normalized()
            .unwrap();
        let target = coherent_state(alpha, dim).unwrap();
        assert!(combo.overlap(&target).norm() >= 1.0 - 1e-8);
    }

    #[test]
    fn eig_hermitian_diag() {
        let mut entries = Array2::<C64>::zeros((3, 3));
        entries[[0, 0]] = C64::new(3.0, 0.0);
        entries[[1, 1]] = C64::new(1.0, 0.0);
        entries[[2, 2]] = C64::new(2.0, 0.0);
        let op = FockOperator::new(entries).unwrap();
        let (vals, _) = eig_hermitian(&op).unwrap();
        assert_eq!(vals.to_vec(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_hermitian_number_operator() {
        let n = number_op(5).unwrap();
        let (vals, _) = eig_hermitian(&n).unwrap();
        for (k, v) in vals.iter().enumerate() {
            assert!((v - k as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn eig_hermitian_rejects_non_hermitian() {
        let a = annihilation_op(4).unwrap();
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn eig_hermitian_reconstruction_random() {
        use rand::Rng;
        let mut rng = crate::rng::stream(42, &[7]);
        let dim = 20;
        let raw = Array2::from_shape_fn((dim, dim), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let herm = &raw + &Array2::from_shape_fn((dim, dim), |(i, j)| raw[[j, i]].conj());
        let op = FockOperator::new(herm.clone()).unwrap();
        let (vals, vecs) = eig_hermitian(&op).unwrap();
        let mut rec = Array2::<C64>::zeros((dim, dim));
        for (k, v) in vecs.iter().enumerate() {
            rec = rec + v.outer(v).entries().mapv(|z| z * vals[k]);
        }
        let norm = crate::linalg::one_norm(&herm);
        assert!(max_abs_diff(&rec, &herm) < 1e-8 * norm);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn coherent_poisson_expansion(re in -1.5f64..1.5, im in -1.5f64..1.5) {
            // amplitudes match the closed-form Poissonian whenever
            // |α|² + 5|α| < dim
            let alpha = C64::new(re, im);
            let dim = 30;
            prop_assume!(alpha.norm_sqr() + 5.0 * alpha.norm() < dim as f64);
            let c = coherent_state(alpha, dim).unwrap();
            let mut fact = 1.0f64;
            for n in 0..6 {
                if n > 0 { fact *= n as f64; }
                let expected = (-alpha.norm_sqr() / 2.0).exp() * alpha.powu(n as u32)
                    / C64::new(fact.sqrt(), 0.0);
                prop_assert!((c.amplitudes()[n] - expected).norm() < 1e-8);
            }
        }

        #[test]
        fn eigvec_orthonormality_random_hermitian(seed in 0u64..512) {
            use rand::Rng;
            let mut rng = crate::rng::stream(seed, &[1]);
            let dim = 40;
            let raw = Array2::from_shape_fn((dim, dim), |_| {
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
            });
            let herm = &raw + &Array2::from_shape_fn((dim, dim), |(i, j)| raw[[j, i]].conj());
            let (_, vecs) = eig_hermitian(&FockOperator::new(herm).unwrap()).unwrap();
            for i in 0..dim {
                for j in i..dim {
                    let ov = vecs[i].overlap(&vecs[j]);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((ov - C64::new(expected, 0.0)).norm() < 1e-8);
                }
            }
        }
    }
}
