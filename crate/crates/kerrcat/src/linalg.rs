//! Dense complex linear algebra helpers.
//!
//! Operators are stored as `ndarray::Array2<Complex64>`; the heavy kernels
//! (matrix products, Hermitian and general eigendecompositions, LU solves)
//! are routed through `faer`. Matrix exponentials use eigendecomposition for
//! Hermitian generators and scaling-and-squaring with a Padé approximant for
//! general matrices.

use faer::linalg::solvers::{PartialPivLu, Solve};
use faer::Mat;
use ndarray::{Array1, Array2};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub fn to_faer(a: &Array2<C64>) -> Mat<C64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

pub fn from_faer(m: &Mat<C64>) -> Array2<C64> {
    Array2::from_shape_fn((m.nrows(), m.ncols()), |(i, j)| m[(i, j)])
}

/// Matrix product through faer's gemm.
pub fn matmul(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let c = to_faer(a) * to_faer(b);
    from_faer(&c)
}

/// Maximum absolute entry of `a - a†`.
pub fn herm_deviation(a: &Array2<C64>) -> f64 {
    let n = a.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((a[[i, j]] - a[[j, i]].conj()).norm());
        }
    }
    dev
}

/// Maximum absolute entry difference.
pub fn max_abs_diff(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    a.iter()
        .zip(b.iter())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).norm()))
}

/// Induced 1-norm (maximum absolute column sum).
pub fn one_norm(a: &Array2<C64>) -> f64 {
    let mut best = 0.0f64;
    for j in 0..a.ncols() {
        let s: f64 = a.column(j).iter().map(|z| z.norm()).sum();
        best = best.max(s);
    }
    best
}

/// Eigendecomposition of a Hermitian matrix.
///
/// Returns eigenvalues in ascending order with matching orthonormal
/// eigenvector columns. The input is *not* re-checked for Hermiticity here;
/// callers enforce their own tolerance.
pub fn eigh(a: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let n = a.nrows();
    let m = to_faer(a);
    let evd = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::NumericFailure(format!("hermitian eigendecomposition: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| s[i].re.partial_cmp(&s[j].re).unwrap());
    let vals = Array1::from_iter(idx.iter().map(|&i| s[i].re));
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| u[(i, idx[j])]);
    Ok((vals, vecs))
}

/// Eigendecomposition of a general complex matrix: `a = V diag(w) V^{-1}`.
pub fn eig(a: &Array2<C64>) -> Result<(Array1<C64>, Array2<C64>)> {
    let n = a.nrows();
    let m = to_faer(a);
    let evd = m
        .eigen()
        .map_err(|e| Error::NumericFailure(format!("eigendecomposition: {e:?}")))?;
    let s = evd.S();
    let u = evd.U();
    let vals = Array1::from_iter((0..n).map(|i| s[i]));
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((vals, vecs))
}

/// Solve `a x = b` by partial-pivot LU.
pub fn solve(a: &Array2<C64>, b: &Array2<C64>) -> Result<Array2<C64>> {
    let fa = to_faer(a);
    let lu = PartialPivLu::new(fa.as_ref());
    let x = lu.solve(to_faer(b));
    let xa = from_faer(&x);
    if xa.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::SingularInput("LU solve produced non-finite entries".into()));
    }
    Ok(xa)
}

/// `exp(scale * h)` for Hermitian `h` via eigendecomposition.
pub fn expm_hermitian(h: &Array2<C64>, scale: C64) -> Result<Array2<C64>> {
    let n = h.nrows();
    let (vals, vecs) = eigh(h)?;
    // V diag(e^{scale λ}) V†
    let mut scaled = Array2::<C64>::zeros((n, n));
    for j in 0..n {
        let f = (scale * vals[j]).exp();
        for i in 0..n {
            scaled[[i, j]] = vecs[[i, j]] * f;
        }
    }
    let vdag = Array2::from_shape_fn((n, n), |(i, j)| vecs[[j, i]].conj());
    Ok(matmul(&scaled, &vdag))
}

const PADE3: [f64; 4] = [120., 60., 12., 1.];
const PADE5: [f64; 6] = [30240., 15120., 3360., 420., 30., 1.];
const PADE7: [f64; 8] = [17_297_280., 8_648_640., 1_995_840., 277_200., 25_200., 1512., 56., 1.];
const PADE9: [f64; 10] = [
    17_643_225_600.,
    8_821_612_800.,
    2_075_673_600.,
    302_702_400.,
    30_270_240.,
    2_162_160.,
    110_880.,
    3960.,
    90.,
    1.,
];
const PADE13: [f64; 14] = [
    64_764_752_532_480_000.,
    32_382_376_266_240_000.,
    7_771_770_303_897_600.,
    1_187_353_796_428_800.,
    129_060_195_264_000.,
    10_559_470_521_600.,
    670_442_572_800.,
    33_522_128_640.,
    1_323_241_920.,
    40_840_800.,
    960_960.,
    16_380.,
    182.,
    1.,
];

const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539398330063230e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068;
const THETA13: f64 = 5.371920351148152;

fn pade_low(a: &Array2<C64>, b: &[f64]) -> Array2<C64> {
    // U = A (b3 A2 + b1 I), V = b2 A2 + b0 I and so on for higher orders
    let n = a.nrows();
    let eye = Array2::<C64>::eye(n);
    let a2 = matmul(a, a);
    let mut powers = vec![eye.clone(), a2.clone()]; // A^0, A^2, A^4, ...
    while powers.len() < b.len() / 2 {
        let next = matmul(powers.last().unwrap(), &a2);
        powers.push(next);
    }
    let mut u_poly = Array2::<C64>::zeros((n, n));
    let mut v = Array2::<C64>::zeros((n, n));
    for (k, p) in powers.iter().enumerate() {
        u_poly = u_poly + p.mapv(|z| z * b[2 * k + 1]);
        v = v + p.mapv(|z| z * b[2 * k]);
    }
    let u = matmul(a, &u_poly);
    solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is singular")
}

fn pade13(a: &Array2<C64>) -> Array2<C64> {
    let n = a.nrows();
    let b = &PADE13;
    let eye = Array2::<C64>::eye(n);
    let a2 = matmul(a, a);
    let a4 = matmul(&a2, &a2);
    let a6 = matmul(&a4, &a2);
    let w1 = a6.mapv(|z| z * b[13]) + a4.mapv(|z| z * b[11]) + a2.mapv(|z| z * b[9]);
    let w2 = a6.mapv(|z| z * b[7])
        + a4.mapv(|z| z * b[5])
        + a2.mapv(|z| z * b[3])
        + eye.mapv(|z| z * b[1]);
    let u = matmul(a, &(matmul(&a6, &w1) + w2));
    let z1 = a6.mapv(|z| z * b[12]) + a4.mapv(|z| z * b[10]) + a2.mapv(|z| z * b[8]);
    let v = matmul(&a6, &z1)
        + a6.mapv(|z| z * b[6])
        + a4.mapv(|z| z * b[4])
        + a2.mapv(|z| z * b[2])
        + eye.mapv(|z| z * b[0]);
    solve(&(&v - &u), &(&v + &u)).expect("Padé denominator is singular")
}

/// Matrix exponential by scaling-and-squaring with Padé approximants.
pub fn expm(a: &Array2<C64>) -> Array2<C64> {
    let norm = one_norm(a);
    if norm <= THETA3 {
        return pade_low(a, &PADE3);
    }
    if norm <= THETA5 {
        return pade_low(a, &PADE5);
    }
    if norm <= THETA7 {
        return pade_low(a, &PADE7);
    }
    if norm <= THETA9 {
        return pade_low(a, &PADE9);
    }
    let s = ((norm / THETA13).log2().ceil() as i32).max(0);
    let scaled = a.mapv(|z| z / 2f64.powi(s));
    let mut x = pade13(&scaled);
    for _ in 0..s {
        x = matmul(&x, &x);
    }
    x
}

/// Kronecker product.
pub fn kron(a: &Array2<C64>, b: &Array2<C64>) -> Array2<C64> {
    ndarray::linalg::kron(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn random_matrix(n: usize, seed: u64) -> Array2<C64> {
        let mut rng = stream(seed, &[0]);
        Array2::from_shape_fn((n, n), |_| {
            C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    fn random_hermitian(n: usize, seed: u64) -> Array2<C64> {
        let a = random_matrix(n, seed);
        let adag = Array2::from_shape_fn((n, n), |(i, j)| a[[j, i]].conj());
        a + adag
    }

    #[test]
    fn eigh_reconstructs() {
        let h = random_hermitian(20, 11);
        let (vals, vecs) = eigh(&h).unwrap();
        let n = 20;
        let mut rec = Array2::<C64>::zeros((n, n));
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    rec[[i, j]] += vecs[[i, k]] * vals[k] * vecs[[j, k]].conj();
                }
            }
        }
        let scale = one_norm(&h);
        assert!(max_abs_diff(&rec, &h) < 1e-12 * scale.max(1.0));
        // ascending order
        for k in 1..n {
            assert!(vals[k] >= vals[k - 1]);
        }
    }

    #[test]
    fn eigh_orthonormal_eigenvectors() {
        let h = random_hermitian(40, 3);
        let (_, v) = eigh(&h).unwrap();
        let vdag = Array2::from_shape_fn((40, 40), |(i, j)| v[[j, i]].conj());
        let g = matmul(&vdag, &v);
        assert!(max_abs_diff(&g, &Array2::eye(40)) < 1e-8);
    }

    #[test]
    fn expm_agrees_with_hermitian_path() {
        let h = random_hermitian(12, 5);
        let e1 = expm(&h.mapv(|z| z * C64::new(0.0, -0.7)));
        let e2 = expm_hermitian(&h, C64::new(0.0, -0.7)).unwrap();
        assert!(max_abs_diff(&e1, &e2) < 1e-10 * one_norm(&e1).max(1.0));
    }

    #[test]
    fn expm_inverse_property() {
        let a = random_matrix(15, 9).mapv(|z| z * 2.0);
        let e = expm(&a);
        let em = expm(&a.mapv(|z| -z));
        let prod = matmul(&e, &em);
        assert!(max_abs_diff(&prod, &Array2::eye(15)) < 1e-9);
    }

    #[test]
    fn expm_large_norm_scaling() {
        // spectral content far beyond θ13 exercises the squaring phase
        let h = random_hermitian(10, 17).mapv(|z| z * 40.0);
        let e1 = expm(&h.mapv(|z| z * C64::new(0.0, -1.0)));
        let e2 = expm_hermitian(&h, C64::new(0.0, -1.0)).unwrap();
        assert!(max_abs_diff(&e1, &e2) < 1e-8);
    }

    #[test]
    fn solve_roundtrip() {
        let a = random_matrix(25, 23) + Array2::<C64>::eye(25).mapv(|z| z * 5.0);
        let b = random_matrix(25, 29);
        let x = solve(&a, &b).unwrap();
        let ax = matmul(&a, &x);
        assert!(max_abs_diff(&ax, &b) < 1e-9);
    }

    #[test]
    fn general_eig_reconstructs() {
        let a = random_matrix(8, 31);
        let (w, v) = eig(&a).unwrap();
        let mut vs = v.clone();
        for j in 0..8 {
            for i in 0..8 {
                vs[[i, j]] *= w[j];
            }
        }
        let vinv = solve(&v, &Array2::eye(8)).unwrap();
        let rec = matmul(&vs, &vinv);
        assert!(max_abs_diff(&rec, &a) < 1e-10);
    }
}
