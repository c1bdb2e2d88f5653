//! Kronecker products, partial traces and partial transposes.
//!
//! Multi-party indices are A-major: for subsystem dimensions `[d0, d1, ..]`
//! the flat index is `i0 * (d1 * d2 ..) + i1 * (d2 ..) + ..`.

use num_complex::Complex64;

use super::{CMatrix, CVector};
use crate::error::{Error, Result};

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

/// `m ⊗ m ⊗ .. ⊗ m` (`n` factors); `n = 0` gives the 1x1 identity.
pub fn tensor_power(m: &CMatrix, n: usize) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for _ in 0..n {
        out = out.kronecker(m);
    }
    out
}

pub fn tensor_power_vec(v: &CVector, n: usize) -> CVector {
    let mut out = CVector::from_element(1, Complex64::new(1.0, 0.0));
    for _ in 0..n {
        out = out.kronecker(v);
    }
    out
}

fn check_dims(total: usize, dims: &[usize]) -> Result<()> {
    let prod: usize = dims.iter().product();
    if prod != total {
        return Err(Error::DimensionMismatch {
            expected: prod,
            found: total,
        });
    }
    Ok(())
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn split(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Reorders the subsystems of `m`: output subsystem `i` is input subsystem
/// `perm[i]`.
pub fn permute_subsystems(m: &CMatrix, dims: &[usize], perm: &[usize]) -> Result<CMatrix> {
    check_dims(m.nrows(), dims)?;
    let mut seen = vec![false; dims.len()];
    if perm.len() != dims.len()
        || perm
            .iter()
            .any(|&p| p >= dims.len() || std::mem::replace(&mut seen[p], true))
    {
        return Err(Error::OutOfRange(format!(
            "{perm:?} is not a permutation of {} subsystems",
            dims.len()
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let new_strides = strides(&new_dims);
    let n = m.nrows();
    let map: Vec<usize> = (0..n)
        .map(|i| {
            let parts = split(i, dims);
            perm.iter()
                .zip(&new_strides)
                .map(|(&p, s)| parts[p] * s)
                .sum()
        })
        .collect();
    let mut out = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            out[(map[i], map[j])] = m[(i, j)];
        }
    }
    Ok(out)
}

/// Reduces `rho` to the subsystems listed in `keep` (in their original
/// order), tracing out the rest.
pub fn partial_trace_keep(rho: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(rho.nrows(), dims)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::OutOfRange("subsystem index".into()));
    }
    let traced: Vec<usize> = (0..dims.len())
        .filter(|k| !keep_sorted.contains(k))
        .collect();
    let kd: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let td: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let dk: usize = kd.iter().product();
    let dt: usize = td.iter().product();
    let st = strides(dims);
    let offset = |kidx: &[usize], tidx: &[usize]| -> usize {
        let mut o = 0;
        for (p, &k) in keep_sorted.iter().enumerate() {
            o += kidx[p] * st[k];
        }
        for (p, &k) in traced.iter().enumerate() {
            o += tidx[p] * st[k];
        }
        o
    };
    let kept_off: Vec<Vec<usize>> = (0..dk).map(|i| split(i, &kd)).collect();
    let traced_off: Vec<usize> = (0..dt)
        .map(|t| offset(&vec![0; kd.len()], &split(t, &td)))
        .collect();
    let kept_base: Vec<usize> = kept_off
        .iter()
        .map(|k| offset(k, &vec![0; td.len()]))
        .collect();
    let mut out = CMatrix::zeros(dk, dk);
    for i in 0..dk {
        for j in 0..dk {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_off {
                acc += rho[(kept_base[i] + t, kept_base[j] + t)];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(out)
}

/// Reduced density matrix of a pure state on the subsystems in `keep`.
pub fn reduce_pure(psi: &CVector, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    check_dims(psi.len(), dims)?;
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    let traced: Vec<usize> = (0..dims.len())
        .filter(|k| !keep_sorted.contains(k))
        .collect();
    let m = to_matrix(psi, dims, &keep_sorted, &traced);
    Ok(&m * m.adjoint())
}

/// Reshapes a pure state into the matrix `Ψ[row, col]` whose rows run over
/// the `rows` subsystems and columns over the `cols` subsystems.
pub fn to_matrix(psi: &CVector, dims: &[usize], rows: &[usize], cols: &[usize]) -> CMatrix {
    let rd: Vec<usize> = rows.iter().map(|&k| dims[k]).collect();
    let cd: Vec<usize> = cols.iter().map(|&k| dims[k]).collect();
    let nr: usize = rd.iter().product();
    let nc: usize = cd.iter().product();
    let st = strides(dims);
    let row_off: Vec<usize> = (0..nr)
        .map(|r| {
            split(r, &rd)
                .iter()
                .zip(rows)
                .map(|(i, &k)| i * st[k])
                .sum()
        })
        .collect();
    let col_off: Vec<usize> = (0..nc)
        .map(|c| {
            split(c, &cd)
                .iter()
                .zip(cols)
                .map(|(i, &k)| i * st[k])
                .sum()
        })
        .collect();
    let mut m = CMatrix::zeros(nr, nc);
    for (r, ro) in row_off.iter().enumerate() {
        for (c, co) in col_off.iter().enumerate() {
            m[(r, c)] = psi[ro + co];
        }
    }
    m
}

/// Inverse of [`to_matrix`].
pub fn from_matrix(m: &CMatrix, dims: &[usize], rows: &[usize], cols: &[usize]) -> CVector {
    let rd: Vec<usize> = rows.iter().map(|&k| dims[k]).collect();
    let cd: Vec<usize> = cols.iter().map(|&k| dims[k]).collect();
    let st = strides(dims);
    let total: usize = dims.iter().product();
    let mut v = CVector::zeros(total);
    for r in 0..m.nrows() {
        let ro: usize = split(r, &rd)
            .iter()
            .zip(rows)
            .map(|(i, &k)| i * st[k])
            .sum();
        for c in 0..m.ncols() {
            let co: usize = split(c, &cd)
                .iter()
                .zip(cols)
                .map(|(i, &k)| i * st[k])
                .sum();
            v[ro + co] = m[(r, c)];
        }
    }
    v
}

/// Transpose on the second factor of a `dA ⊗ dB` operator.
pub fn partial_transpose_b(m: &CMatrix, d_a: usize, d_b: usize) -> CMatrix {
    let n = d_a * d_b;
    let mut out = CMatrix::zeros(n, n);
    for a in 0..d_a {
        for b in 0..d_b {
            for a2 in 0..d_a {
                for b2 in 0..d_b {
                    out[(a * d_b + b2, a2 * d_b + b)] = m[(a * d_b + b, a2 * d_b + b2)];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;

    #[test]
    fn permutation_swaps_factors() {
        let a = diag(&[0.7, 0.3]);
        let b = diag(&[0.1, 0.5, 0.4]);
        let swapped = permute_subsystems(&kron(&a, &b), &[2, 3], &[1, 0]).unwrap();
        assert!(crate::linalg::max_abs(&(swapped - kron(&b, &a))) < 1e-15);
        assert!(permute_subsystems(&a, &[2], &[1]).is_err());
    }

    fn diag(v: &[f64]) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(
            v.len(),
            v.iter().map(|&x| C::new(x, 0.0)),
        ))
    }

    #[test]
    fn kron_basis_states() {
        let p0 = diag(&[1.0, 0.0]);
        let p1 = diag(&[0.0, 1.0]);
        assert_eq!(kron(&p0, &p1), diag(&[0.0, 1.0, 0.0, 0.0]));
        assert_eq!(
            kron(&CMatrix::identity(2, 2), &CMatrix::identity(2, 2)),
            CMatrix::identity(4, 4)
        );
    }

    #[test]
    fn partial_trace_of_product_three_party() {
        let a = diag(&[0.25, 0.75]);
        let b = diag(&[0.5, 0.3, 0.2]);
        let c = diag(&[0.9, 0.1]);
        let abc = kron(&kron(&a, &b), &c);
        let ac = partial_trace_keep(&abc, &[2, 3, 2], &[0, 2]).unwrap();
        assert!((ac - kron(&a, &c)).norm() < 1e-14);
        let b_only = partial_trace_keep(&abc, &[2, 3, 2], &[1]).unwrap();
        assert!((b_only - b).norm() < 1e-14);
    }

    #[test]
    fn reduce_pure_agrees_with_partial_trace() {
        let psi = CVector::from_vec(vec![
            C::new(0.1, 0.2),
            C::new(0.3, -0.1),
            C::new(0.0, 0.5),
            C::new(-0.4, 0.2),
            C::new(0.2, 0.2),
            C::new(0.1, 0.0),
            C::new(0.3, 0.3),
            C::new(-0.2, 0.1),
        ]);
        let rho = &psi * psi.adjoint();
        for keep in [vec![0], vec![1], vec![2], vec![0, 2], vec![1, 2]] {
            let a = partial_trace_keep(&rho, &[2, 2, 2], &keep).unwrap();
            let b = reduce_pure(&psi, &[2, 2, 2], &keep).unwrap();
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn matrix_reshape_round_trip() {
        let psi = CVector::from_iterator(12, (0..12).map(|i| C::new(i as f64, -(i as f64))));
        let m = to_matrix(&psi, &[2, 3, 2], &[2, 0], &[1]);
        assert_eq!(from_matrix(&m, &[2, 3, 2], &[2, 0], &[1]), psi);
    }

    #[test]
    fn partial_transpose_is_involution() {
        let m = CMatrix::from_iterator(6, 6, (0..36).map(|i| C::new(i as f64, (i % 5) as f64)));
        let t = partial_transpose_b(&m, 2, 3);
        assert_eq!(partial_transpose_b(&t, 2, 3), m);
        assert_ne!(t, m);
    }
}
