//! Distances, overlaps and entropies. All logarithms are base 2.

use super::spectral::{trace_norm_hermitian, HermitianEigen};
use super::state::DensityMatrix;
use super::CMatrix;
use super::SUPPORT_TOL;
use crate::error::{Error, Result};

fn same_dim(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<()> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: sigma.dim(),
        });
    }
    Ok(())
}

/// `½‖ρ − σ‖₁`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    let d = 0.5 * trace_norm_hermitian(&(rho.matrix() - sigma.matrix()));
    Ok(d.clamp(0.0, 1.0))
}

/// `Tr √(√ρ σ √ρ)`.
pub fn root_fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    // √ρ σ √ρ has the nonzero spectrum of B†σB with B = V_r √D_r on supp ρ
    let er = rho.eigen();
    let cut = rho.dim() as f64 * f64::EPSILON * er.max_value().max(0.0);
    let support: Vec<usize> = (0..er.dim()).filter(|&j| er.values[j] > cut).collect();
    let b = CMatrix::from_fn(rho.dim(), support.len(), |i, j| {
        er.vectors[(i, support[j])] * er.values[support[j]].sqrt()
    });
    let inner = b.adjoint() * sigma.matrix() * &b;
    let eig = HermitianEigen::new(&inner);
    // rounding noise in the kernel would otherwise contribute √ε per eigenvalue
    let floor = rho.dim() as f64 * f64::EPSILON * eig.max_value().max(0.0);
    let f: f64 = eig
        .values
        .iter()
        .filter(|&&x| x > floor)
        .map(|&x| x.sqrt())
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Squared fidelity `(Tr √(√ρ σ √ρ))²`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    root_fidelity(rho, sigma).map(|f| (f * f).clamp(0.0, 1.0))
}

/// `−Σ p log₂ p` with `0 log 0 = 0`; entries are clamped at zero.
pub fn shannon_entropy(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.log2())
        .sum::<f64>()
        .max(0.0)
}

pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    shannon_entropy(rho.eigen().values)
}

/// `D(ρ‖σ) = Tr ρ (log ρ − log σ)` in bits; `+∞` when the support of ρ is
/// not contained in the support of σ.
///
/// Supports are the eigenspaces with eigenvalue above [`SUPPORT_TOL`]; ρ is
/// outside supp(σ) when it puts weight above the same tolerance on ker(σ).
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    same_dim(rho, sigma)?;
    Ok(relative_entropy_eig(&rho.eigen(), &sigma.eigen()))
}

pub(crate) fn relative_entropy_eig(er: &HermitianEigen, es: &HermitianEigen) -> f64 {
    relative_entropy_eig_raw(er, es).max(0.0)
}

/// `Tr ρ log₂ ρ − Tr ρ log₂ σ` without clamping; σ need not have unit trace.
pub(crate) fn relative_entropy_eig_raw(er: &HermitianEigen, es: &HermitianEigen) -> f64 {
    let n = er.dim();
    let overlap = er.vectors.adjoint() * &es.vectors;
    let mut neg_entropy = 0.0;
    let mut cross = 0.0;
    let mut kernel_weight = 0.0;
    for i in 0..n {
        let l = er.values[i];
        if l <= 0.0 {
            continue;
        }
        neg_entropy += l * l.log2();
        for j in 0..n {
            let w = overlap[(i, j)].norm_sqr();
            let m = es.values[j];
            if m <= SUPPORT_TOL {
                kernel_weight += l * w;
            } else {
                cross += l * w * m.log2();
            }
        }
    }
    if kernel_weight > SUPPORT_TOL {
        return f64::INFINITY;
    }
    neg_entropy - cross
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::state::PureState;

    fn plus() -> DensityMatrix {
        PureState::from_real(&[1.0, 1.0]).unwrap().density()
    }

    #[test]
    fn trace_distance_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        assert_eq!(trace_distance(&z0, &z0).unwrap(), 0.0);
        assert!((trace_distance(&z0, &z1).unwrap() - 1.0).abs() < 1e-15);
        // ρ − σ = [[1/2, −1/2], [−1/2, −1/2]], eigenvalues ±1/√2.
        assert!(
            (trace_distance(&z0, &plus()).unwrap() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14
        );
    }

    #[test]
    fn fidelity_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        assert!((fidelity(&z0, &z0).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity(&z0, &z1).unwrap().abs() < 1e-14);
        // |⟨0|+⟩|² = 1/2
        assert!((fidelity(&z0, &plus()).unwrap() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn entropy_examples() {
        assert!(von_neumann_entropy(&plus()).abs() < 1e-12);
        assert!((von_neumann_entropy(&DensityMatrix::maximally_mixed(8)) - 3.0).abs() < 1e-12);
        let d = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        // −¾ log₂ ¾ − ¼ log₂ ¼
        assert!((von_neumann_entropy(&d) - 0.811_278_124_459_132_8).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_examples() {
        let z0 = DensityMatrix::basis(2, 0);
        let z1 = DensityMatrix::basis(2, 1);
        let mm = DensityMatrix::maximally_mixed(2);
        assert!(relative_entropy(&plus(), &plus()).unwrap().abs() < 1e-10);
        assert_eq!(relative_entropy(&z0, &z1).unwrap(), f64::INFINITY);
        assert!((relative_entropy(&z0, &mm).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_is_error() {
        let a = DensityMatrix::maximally_mixed(2);
        let b = DensityMatrix::maximally_mixed(3);
        assert!(trace_distance(&a, &b).is_err());
        assert!(fidelity(&a, &b).is_err());
        assert!(relative_entropy(&a, &b).is_err());
    }
}
