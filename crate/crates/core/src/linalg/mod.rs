//! Dense complex linear algebra on small Hilbert spaces.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub mod helstrom;
pub mod measures;
pub mod random;
pub mod spectral;
pub mod state;
pub mod tensor;

pub use helstrom::{helstrom_measurement, PovmPair};
pub use measures::{
    fidelity, relative_entropy, root_fidelity, shannon_entropy, trace_distance, von_neumann_entropy,
};
pub use spectral::HermitianEigen;
pub use state::{partial_trace, BipartiteState, DensityMatrix, PureState, Side};

/// Dense complex matrix, row/column indices A-major.
pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Hermiticity, positivity, trace and norm tolerance for validated states.
pub const VALIDITY_TOL: f64 = 1e-10;

/// Eigenvalues at or below this value are outside the support.
pub const SUPPORT_TOL: f64 = 1e-10;

/// Kronecker product `A ⊗ B`.
pub fn tensor_product(a: &CMatrix, b: &CMatrix) -> CMatrix {
    tensor::kron(a, b)
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Checks `U† U = I` within `tol`.
pub fn check_unitary(u: &CMatrix, tol: f64) -> crate::error::Result<()> {
    if u.nrows() != u.ncols() {
        return Err(crate::error::Error::NotSquare {
            rows: u.nrows(),
            cols: u.ncols(),
        });
    }
    let deviation = max_abs(&(u.adjoint() * u - CMatrix::identity(u.nrows(), u.nrows())));
    if deviation > tol {
        return Err(crate::error::Error::NotUnitary { deviation });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bell_from_hadamard_and_cnot() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(s, 0.0), c(s, 0.0), c(-s, 0.0)]);
        let mut cnot = CMatrix::zeros(4, 4);
        for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
            cnot[(i, j)] = c(1.0, 0.0);
        }
        let u = &cnot * tensor_product(&h, &CMatrix::identity(2, 2));
        let mut ket00 = CVector::zeros(4);
        ket00[0] = c(1.0, 0.0);
        let out = u * ket00;
        let want = [s, 0.0, 0.0, s];
        for (z, w) in out.iter().zip(want) {
            assert!((z - c(w, 0.0)).norm() < 1e-15);
        }
    }
}
