//! Hermitian eigendecomposition and the matrix functions built on it.
//!
//! Every matrix function in the crate (square root, logarithm, the Fréchet
//! derivative of the logarithm) goes through [`HermitianEigen`]. Eigenvalues in
//! `[-CLAMP_TOL, 0]` are clamped to zero before a function is applied.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::CMatrix;

/// Eigenvalues in `[-CLAMP_TOL, 0)` are treated as exact zeros.
pub const CLAMP_TOL: f64 = 1e-10;

fn has_nan(vals: &[f64], vecs: &CMatrix) -> bool {
    vals.iter().any(|x| !x.is_finite())
        || vecs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
}

/// Unsorted eigenpairs. The complex Householder reduction can break down
/// (NaN) on highly degenerate inputs; those are retried in a basis rotated by
/// a fixed seeded Haar unitary.
fn raw_eigen(herm: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = herm.nrows();
    if (0..n).all(|i| (0..n).all(|j| i == j || herm[(i, j)] == Complex64::new(0.0, 0.0))) {
        return (
            (0..n).map(|i| herm[(i, i)].re).collect(),
            CMatrix::identity(n, n),
        );
    }
    let eig = herm.clone().symmetric_eigen();
    let mut out: (Vec<f64>, CMatrix) =
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors);
    if !has_nan(&out.0, &out.1) || herm.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return out;
    }
    for seed in 0..8 {
        let v = super::random::random_unitary(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let eig = hermitian_part(&(&v * herm * v.adjoint())).symmetric_eigen();
        out = (
            eig.eigenvalues.iter().copied().collect(),
            v.adjoint() * eig.eigenvectors,
        );
        if !has_nan(&out.0, &out.1) {
            break;
        }
    }
    out
}

/// Eigendecomposition `M = V diag(values) V†` of a Hermitian matrix.
///
/// Eigenpairs are sorted by eigenvalue (descending); ties within 1e-12 are
/// broken lexicographically on the real parts of the eigenvector components.
/// Each eigenvector is rotated so its first non-negligible component is real
/// and positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let herm = hermitian_part(m);
        let (vals, vecs) = raw_eigen(&herm);
        let mut order: Vec<usize> = (0..n).collect();
        let mut cols: Vec<Vec<Complex64>> = (0..n)
            .map(|j| {
                let mut v: Vec<Complex64> = vecs.column(j).iter().copied().collect();
                normalize_phase(&mut v);
                v
            })
            .collect();
        order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
        // within a cluster of (nearly) equal eigenvalues, order by eigenvector
        let lex = |a: usize, b: usize| {
            cols[a]
                .iter()
                .zip(cols[b].iter())
                .map(|(x, y)| x.re.total_cmp(&y.re))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        };
        let mut start = 0;
        while start < n {
            let mut end = start + 1;
            while end < n && (vals[order[end - 1]] - vals[order[end]]).abs() <= 1e-12 {
                end += 1;
            }
            order[start..end].sort_by(|&a, &b| lex(a, b));
            start = end;
        }
        let values = order.iter().map(|&i| vals[i]).collect();
        let mut vectors = CMatrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            let col = std::mem::take(&mut cols[src]);
            for (i, z) in col.into_iter().enumerate() {
                vectors[(i, dst)] = z;
            }
        }
        HermitianEigen { values, vectors }
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn min_value(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn max_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    /// `V f(Λ) V†`, with eigenvalues clamped at zero first.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(clamp(self.values[j]));
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    /// `V f(Λ) V†` without clamping (used for indefinite matrices).
    pub fn map_raw(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.dim();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = f(self.values[j]);
            for i in 0..n {
                scaled[(i, j)] *= fj;
            }
        }
        &scaled * self.vectors.adjoint()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.vectors.column(j).iter().copied().collect()
    }
}

fn clamp(x: f64) -> f64 {
    if (-CLAMP_TOL..0.0).contains(&x) {
        0.0
    } else {
        x
    }
}

fn normalize_phase(v: &mut [Complex64]) {
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-8).copied() {
        let phase = pivot.conj() / pivot.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// `(M + M†) / 2`.
pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Entrywise `max |M - M†|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Principal square root of a PSD matrix.
pub fn sqrt_psd(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).map(|x| x.max(0.0).sqrt())
}

/// Sum of absolute eigenvalues of a Hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    HermitianEigen::new(m).values.iter().map(|x| x.abs()).sum()
}

/// Projector onto the eigenspace of eigenvalues `>= 0` of a Hermitian matrix.
pub fn nonnegative_projector(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).map_raw(|x| if x >= 0.0 { 1.0 } else { 0.0 })
}

/// Projection onto the PSD cone in Frobenius norm.
pub fn psd_part(m: &CMatrix) -> CMatrix {
    HermitianEigen::new(m).map_raw(|x| x.max(0.0))
}

/// Fréchet derivative of the natural logarithm at `sigma` in direction `x`,
/// evaluated through divided differences in the eigenbasis of `sigma`.
///
/// Eigenvalues of `sigma` below `floor` are replaced by `floor`.
pub fn log_derivative(sigma: &HermitianEigen, x: &CMatrix, floor: f64) -> CMatrix {
    let n = sigma.dim();
    let w: Vec<f64> = sigma.values.iter().map(|&v| v.max(floor)).collect();
    let lw: Vec<f64> = w.iter().map(|v| v.ln()).collect();
    let v = &sigma.vectors;
    let mut r = v.adjoint() * x * v;
    for i in 0..n {
        for j in 0..n {
            let dw = w[i] - w[j];
            let g = if dw.abs() > 1e-12 * w[i].max(w[j]) {
                (lw[i] - lw[j]) / dw
            } else {
                1.0 / w[i]
            };
            r[(i, j)] *= g;
        }
    }
    v * r * v.adjoint()
}

/// Real part of `Tr[A B]`.
pub fn trace_product_re(a: &CMatrix, b: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (a[(i, k)] * b[(k, i)]).re;
        }
    }
    acc
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::identity(n, n)
}

/// Real trace.
pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}
