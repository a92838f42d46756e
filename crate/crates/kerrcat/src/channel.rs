//! 4×4 Pauli-transfer-matrix error-channel algebra: error generators,
//! exponentiation, twirling, and channel metrics.
//!
//! PTMs act on Pauli coefficient vectors in the fixed basis order
//! (I, X, Y, Z): a state ρ = ½ Σ xᵢ σᵢ maps through a channel as x → R x.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;

pub type Mat4 = [[f64; 4]; 4];

/// A 4×4 real Pauli transfer matrix in (I, X, Y, Z) order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ptm(pub Mat4);

impl Ptm {
    pub fn identity() -> Self {
        Ptm(mat4_identity())
    }

    pub fn mul(&self, other: &Ptm) -> Ptm {
        Ptm(mat4_mul(&self.0, &other.0))
    }

    pub fn transpose(&self) -> Ptm {
        let mut out = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = self.0[j][i];
            }
        }
        Ptm(out)
    }

    pub fn max_abs_diff(&self, other: &Ptm) -> f64 {
        let mut d = 0.0f64;
        for i in 0..4 {
            for j in 0..4 {
                d = d.max((self.0[i][j] - other.0[i][j]).abs());
            }
        }
        d
    }

    /// Deviation of the first row from (1, 0, 0, 0).
    pub fn trace_preservation_deviation(&self) -> f64 {
        let mut d = (self.0[0][0] - 1.0).abs();
        for j in 1..4 {
            d = d.max(self.0[0][j].abs());
        }
        d
    }

    /// Apply to a Pauli coefficient vector.
    pub fn apply(&self, x: &[f64; 4]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i] += self.0[i][j] * x[j];
            }
        }
        out
    }

    pub fn diagonal(&self) -> [f64; 4] {
        [self.0[0][0], self.0[1][1], self.0[2][2], self.0[3][3]]
    }
}

pub fn mat4_identity() -> Mat4 {
    let mut m = [[0.0; 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    m
}

pub fn mat4_mul(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn mat4_add(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

pub fn mat4_scale(a: &Mat4, s: f64) -> Mat4 {
    let mut out = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[i][j] * s;
        }
    }
    out
}

pub fn mat4_one_norm(a: &Mat4) -> f64 {
    let mut best = 0.0f64;
    for j in 0..4 {
        let s: f64 = (0..4).map(|i| a[i][j].abs()).sum();
        best = best.max(s);
    }
    best
}

/// Gauss-Jordan inverse; errors when a pivot collapses.
pub fn mat4_inverse(a: &Mat4) -> Result<Mat4> {
    let mut m = *a;
    let mut inv = mat4_identity();
    for col in 0..4 {
        let mut piv = col;
        for r in col + 1..4 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        if m[piv][col].abs() < 1e-12 {
            return Err(Error::SingularInput("4×4 matrix is singular".into()));
        }
        m.swap(col, piv);
        inv.swap(col, piv);
        let d = m[col][col];
        for j in 0..4 {
            m[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..4 {
            if r == col {
                continue;
            }
            let f = m[r][col];
            for j in 0..4 {
                m[r][j] -= f * m[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    Ok(inv)
}

/// 1-norm condition number.
pub fn mat4_cond(a: &Mat4) -> Result<f64> {
    Ok(mat4_one_norm(a) * mat4_one_norm(&mat4_inverse(a)?))
}

/// Coherent and stochastic error amplitudes of an error generator
/// `L = Σ hₘ Hₘ + Σ pₘ Pₘ`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ErrorGenerator {
    /// Coherent rotation errors (h_x, h_y, h_z), radians.
    pub h: [f64; 3],
    /// Stochastic Pauli error probabilities (p_x, p_y, p_z).
    pub p: [f64; 3],
}

impl ErrorGenerator {
    pub fn new(h: [f64; 3], p: [f64; 3]) -> Result<Self> {
        if p.iter().any(|&v| v < 0.0) {
            return Err(Error::InvalidRegime(format!(
                "stochastic amplitudes must be ≥ 0: {p:?}"
            )));
        }
        Ok(Self { h, p })
    }

    pub fn zero() -> Self {
        Self { h: [0.0; 3], p: [0.0; 3] }
    }
}

/// The six fixed generator matrices (H_x, H_y, H_z, P_x, P_y, P_z).
pub fn generator_matrices() -> [Mat4; 6] {
    let h_x = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
    ];
    let h_y = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -1.0, 0.0, 0.0],
    ];
    let h_z = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    let p_x = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, -2.0, 0.0],
        [0.0, 0.0, 0.0, -2.0],
    ];
    let p_y = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -2.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, -2.0],
    ];
    let p_z = [
        [0.0, 0.0, 0.0, 0.0],
        [0.0, -2.0, 0.0, 0.0],
        [0.0, 0.0, -2.0, 0.0],
        [0.0, 0.0, 0.0, 0.0],
    ];
    [h_x, h_y, h_z, p_x, p_y, p_z]
}

/// Assemble `L = h·H + p·P`.
pub fn build_error_generator(g: &ErrorGenerator) -> Mat4 {
    let basis = generator_matrices();
    let mut l = [[0.0; 4]; 4];
    for k in 0..3 {
        l = mat4_add(&l, &mat4_scale(&basis[k], g.h[k]));
        l = mat4_add(&l, &mat4_scale(&basis[k + 3], g.p[k]));
    }
    l
}

fn frob_dot(a: &Mat4, b: &Mat4) -> f64 {
    let mut acc = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            acc += a[i][j] * b[i][j];
        }
    }
    acc
}

/// Least-squares projection of `l` onto the six-generator basis.
///
/// Returns the coefficients and the Frobenius norm of the residual
/// `l − Σ cᵢ Gᵢ`.
pub fn decompose_generator(l: &Mat4) -> (ErrorGenerator, f64) {
    let basis = generator_matrices();
    let mut gram = [[0.0f64; 6]; 6];
    let mut rhs = [0.0f64; 6];
    for i in 0..6 {
        for j in 0..6 {
            gram[i][j] = frob_dot(&basis[i], &basis[j]);
        }
        rhs[i] = frob_dot(&basis[i], l);
    }
    let mut m = gram;
    let mut b = rhs;
    for col in 0..6 {
        let mut piv = col;
        for r in col + 1..6 {
            if m[r][col].abs() > m[piv][col].abs() {
                piv = r;
            }
        }
        m.swap(col, piv);
        b.swap(col, piv);
        for r in 0..6 {
            if r == col {
                continue;
            }
            let f = m[r][col] / m[col][col];
            for c in col..6 {
                m[r][c] -= f * m[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut coeff = [0.0f64; 6];
    for k in 0..6 {
        coeff[k] = b[k] / m[k][k];
    }
    let mut rec = [[0.0; 4]; 4];
    for k in 0..6 {
        rec = mat4_add(&rec, &mat4_scale(&basis[k], coeff[k]));
    }
    let mut resid = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let d = l[i][j] - rec[i][j];
            resid += d * d;
        }
    }
    let g = ErrorGenerator {
        h: [coeff[0], coeff[1], coeff[2]],
        p: [coeff[3], coeff[4], coeff[5]],
    };
    (g, resid.sqrt())
}

/// Gram-matrix condition number of the six-generator basis (λ_max/λ_min).
pub fn generator_gram_condition() -> f64 {
    let basis = generator_matrices();
    let mut gram = [[0.0f64; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            gram[i][j] = frob_dot(&basis[i], &basis[j]);
        }
    }
    let matvec = |m: &[[f64; 6]; 6], v: &[f64; 6]| -> [f64; 6] {
        let mut out = [0.0; 6];
        for i in 0..6 {
            for j in 0..6 {
                out[i] += m[i][j] * v[j];
            }
        }
        out
    };
    let norm = |v: &[f64; 6]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut v = [1.0, 0.3, -0.4, 0.9, -0.2, 0.5];
    let mut lmax = 0.0;
    for _ in 0..300 {
        let w = matvec(&gram, &v);
        lmax = norm(&w) / norm(&v);
        let n = norm(&w);
        v = w.map(|x| x / n);
    }
    let mut shifted = [[0.0f64; 6]; 6];
    for i in 0..6 {
        for j in 0..6 {
            shifted[i][j] = if i == j { lmax - gram[i][j] } else { -gram[i][j] };
        }
    }
    let mut v = [0.2, -0.8, 0.5, 0.1, 0.9, -0.3];
    let mut mu = 0.0;
    for _ in 0..300 {
        let w = matvec(&shifted, &v);
        mu = norm(&w) / norm(&v);
        let n = norm(&w);
        v = w.map(|x| x / n);
    }
    let lmin = lmax - mu;
    lmax / lmin
}

/// `exp(L)` for a 4×4 generator, by scaling-and-squaring on a Taylor series.
pub fn ptm_exp(l: &Mat4) -> Ptm {
    let norm = mat4_one_norm(l);
    let s = if norm > 0.25 { (norm / 0.25).log2().ceil() as i32 } else { 0 };
    let scaled = mat4_scale(l, 0.5f64.powi(s));
    let mut term = mat4_identity();
    let mut acc = mat4_identity();
    for k in 1..=24 {
        term = mat4_scale(&mat4_mul(&term, &scaled), 1.0 / k as f64);
        acc = mat4_add(&acc, &term);
        if mat4_one_norm(&term) < 1e-18 {
            break;
        }
    }
    for _ in 0..s {
        acc = mat4_mul(&acc, &acc);
    }
    Ptm(acc)
}

/// Principal matrix logarithm of a PTM via complex eigendecomposition.
///
/// Rejects inputs with eigenvalues on or near the negative real axis
/// (rotations approaching π have an ambiguous branch).
pub fn ptm_log(e: &Ptm) -> Result<Mat4> {
    let a = Array2::from_shape_fn((4, 4), |(i, j)| C64::new(e.0[i][j], 0.0));
    let (vals, vecs) = linalg::eig(&a)?;
    for v in vals.iter() {
        if v.norm() < 1e-12 {
            return Err(Error::AmbiguousLog("channel eigenvalue at zero".into()));
        }
        if v.re < 0.0 && v.im.abs() < 1e-9 * v.norm().max(1.0) {
            return Err(Error::AmbiguousLog(format!(
                "eigenvalue {v} on the negative real axis (rotation ≥ π)"
            )));
        }
    }
    let mut vlog = vecs.clone();
    for j in 0..4 {
        let ln = vals[j].ln();
        for i in 0..4 {
            vlog[[i, j]] = vecs[[i, j]] * ln;
        }
    }
    let vinv = linalg::solve(&vecs, &Array2::eye(4))?;
    let lc = vlog.dot(&vinv);
    let mut out = [[0.0; 4]; 4];
    let mut imag_resid = 0.0f64;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = lc[[i, j]].re;
            imag_resid = imag_resid.max(lc[[i, j]].im.abs());
        }
    }
    if imag_resid > 1e-8 {
        return Err(Error::AmbiguousLog(format!(
            "logarithm has imaginary residue {imag_resid:.3e}"
        )));
    }
    let back = ptm_exp(&out);
    if back.max_abs_diff(e) > 1e-8 {
        return Err(Error::NumericFailure("matrix log round trip failed".into()));
    }
    Ok(out)
}

/// PTMs of the Pauli gates in (I, X, Y, Z) order.
pub fn pauli_ptms() -> [Ptm; 4] {
    let sign = |sx: f64, sy: f64, sz: f64| {
        let mut m = [[0.0; 4]; 4];
        m[0][0] = 1.0;
        m[1][1] = sx;
        m[2][2] = sy;
        m[3][3] = sz;
        Ptm(m)
    };
    [
        Ptm::identity(),
        sign(1.0, -1.0, -1.0),
        sign(-1.0, 1.0, -1.0),
        sign(-1.0, -1.0, 1.0),
    ]
}

/// Rotation axis for [`rotation_ptm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// PTM of the unitary rotation `exp(−i θ σ_axis / 2)`.
pub fn rotation_ptm(axis: Axis, theta: f64) -> Ptm {
    let (c, s) = (theta.cos(), theta.sin());
    let mut m = mat4_identity();
    match axis {
        Axis::Z => {
            m[1][1] = c;
            m[1][2] = -s;
            m[2][1] = s;
            m[2][2] = c;
        }
        Axis::X => {
            m[2][2] = c;
            m[2][3] = -s;
            m[3][2] = s;
            m[3][3] = c;
        }
        Axis::Y => {
            m[1][1] = c;
            m[1][3] = s;
            m[3][1] = -s;
            m[3][3] = c;
        }
    }
    Ptm(m)
}

/// Average a channel over conjugation by the Pauli group:
/// `(1/4) Σ_P R_P E R_P`. The output is diagonal.
pub fn pauli_twirl(e: &Ptm) -> Ptm {
    let paulis = pauli_ptms();
    let mut acc = [[0.0; 4]; 4];
    for p in &paulis {
        // Pauli PTMs are involutions: R_P⁻¹ = R_P
        let conj = p.mul(e).mul(p);
        acc = mat4_add(&acc, &conj.0);
    }
    Ptm(mat4_scale(&acc, 0.25))
}

/// All 16 PTMs of the D8 dihedral group `X(π)^b · Z(kπ/4)`.
pub fn dihedral_group_ptms() -> Vec<Ptm> {
    let xpi = rotation_ptm(Axis::X, std::f64::consts::PI);
    let mut out = Vec::with_capacity(16);
    for b in 0..2 {
        for k in 0..8 {
            let z = rotation_ptm(Axis::Z, k as f64 * std::f64::consts::FRAC_PI_4);
            let g = if b == 0 { z } else { xpi.mul(&z) };
            out.push(g);
        }
    }
    out
}

/// Average a channel over conjugation by the 16 D8 elements:
/// `(1/16) Σ_g R_g† E R_g`.
pub fn dihedral_twirl(e: &Ptm) -> Ptm {
    let mut acc = [[0.0; 4]; 4];
    for g in dihedral_group_ptms() {
        let conj = g.transpose().mul(e).mul(&g);
        acc = mat4_add(&acc, &conj.0);
    }
    Ptm(mat4_scale(&acc, 1.0 / 16.0))
}

/// Stochastic Pauli amplitudes read off a twirled (diagonal) channel:
/// `p_x = (1 + d_x − d_y − d_z)/4` and cyclic.
pub fn stochastic_from_twirled(e: &Ptm) -> [f64; 3] {
    let d = e.diagonal();
    [
        (1.0 + d[1] - d[2] - d[3]) / 4.0,
        (1.0 - d[1] + d[2] - d[3]) / 4.0,
        (1.0 - d[1] - d[2] + d[3]) / 4.0,
    ]
}

/// Total stochastic Pauli error after twirling: `Σ (pₘ + 0.25 hₘ²)`.
pub fn pauli_channel_infidelity(g: &ErrorGenerator) -> f64 {
    (0..3).map(|m| g.p[m] + 0.25 * g.h[m] * g.h[m]).sum()
}

/// Process fidelity `Tr(ideal⁻¹ · ptm) / 4`, clamped to [0, 1].
pub fn process_fidelity(ptm: &Ptm, ideal: &Ptm) -> Result<f64> {
    let inv = mat4_inverse(&ideal.0)?;
    let prod = mat4_mul(&inv, &ptm.0);
    let tr: f64 = (0..4).map(|i| prod[i][i]).sum();
    Ok((tr / 4.0).clamp(0.0, 1.0))
}
