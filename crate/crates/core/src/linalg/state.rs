use num_complex::Complex64;

use super::spectral::{hermiticity_deviation, trace_re, HermitianEigen};
use super::tensor;
use super::{CMatrix, CVector, VALIDITY_TOL};
use crate::error::{Error, Result};

/// A validated `d x d` density matrix: Hermitian, PSD and unit trace within
/// [`VALIDITY_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        let (rows, cols) = mat.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = hermiticity_deviation(&mat);
        if deviation > VALIDITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = trace_re(&mat);
        if (trace - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::BadTrace { trace });
        }
        let min_eigenvalue = HermitianEigen::new(&mat).min_value();
        if min_eigenvalue < -VALIDITY_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix { mat })
    }

    /// Symmetrises, clips negative eigenvalues and renormalises before
    /// validating. Used for outputs of numerical routines.
    pub fn from_numerical(mat: CMatrix) -> Result<Self> {
        if mat.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let (rows, cols) = mat.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        let h = super::spectral::hermitian_part(&mat);
        let e = HermitianEigen::new(&h);
        let psd = if e.min_value() >= 0.0 {
            h
        } else {
            e.map_raw(|x| x.max(0.0))
        };
        let t = trace_re(&psd);
        if !(t > 0.0) {
            return Err(Error::BadTrace { trace: t });
        }
        Ok(DensityMatrix {
            mat: psd.unscale(t),
        })
    }

    pub(crate) fn from_trusted(mat: CMatrix) -> Self {
        DensityMatrix { mat }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        DensityMatrix {
            mat: CMatrix::identity(d, d).unscale(d as f64),
        }
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut mat = CMatrix::zeros(d, d);
        mat[(i, i)] = Complex64::new(1.0, 0.0);
        DensityMatrix { mat }
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        let v = CVector::from_iterator(probs.len(), probs.iter().map(|&p| Complex64::new(p, 0.0)));
        Self::new(CMatrix::from_diagonal(&v))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        super::spectral::trace_product_re(&self.mat, &self.mat)
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.eigen().values.iter().filter(|&&x| x > tol).count()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_trusted(tensor::kron(&self.mat, &other.mat))
    }

    pub fn tensor_power(&self, n: usize) -> DensityMatrix {
        DensityMatrix::from_trusted(tensor::tensor_power(&self.mat, n))
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.nrows(),
            });
        }
        Ok(DensityMatrix::from_trusted(u * &self.mat * u.adjoint()))
    }

    /// Uniform mixture of equally sized states.
    pub fn average<'a>(
        states: impl IntoIterator<Item = &'a DensityMatrix>,
    ) -> Result<DensityMatrix> {
        let mut acc: Option<CMatrix> = None;
        let mut count = 0usize;
        for s in states {
            match acc.as_mut() {
                None => acc = Some(s.mat.clone()),
                Some(a) => {
                    if a.nrows() != s.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: a.nrows(),
                            found: s.dim(),
                        });
                    }
                    *a += &s.mat;
                }
            }
            count += 1;
        }
        let acc = acc.ok_or_else(|| Error::OutOfRange("empty mixture".into()))?;
        Ok(DensityMatrix::from_trusted(acc.unscale(count as f64)))
    }

    /// Convex combination `Σ p_i ρ_i`; weights must be non-negative and sum to 1.
    pub fn mixture(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::OutOfRange("mixture weights/states length".into()));
        }
        let mut acc = CMatrix::zeros(states[0].dim(), states[0].dim());
        for (w, s) in weights.iter().zip(states) {
            if *w < 0.0 {
                return Err(Error::OutOfRange("negative mixture weight".into()));
            }
            acc += s.mat.scale(*w);
        }
        DensityMatrix::new(acc)
    }
}

/// A normalised state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amps: CVector,
}

impl PureState {
    pub fn new(amps: CVector) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::OutOfRange("empty state vector".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amps.norm();
        if (norm - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState { amps })
    }

    /// Normalises `amps` first; fails only on a zero or non-finite vector.
    pub fn normalized(amps: CVector) -> Result<Self> {
        let norm = amps.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(amps.unscale(norm))
    }

    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Self::normalized(CVector::from_iterator(
            amps.len(),
            amps.iter().map(|&a| Complex64::new(a, 0.0)),
        ))
    }

    pub fn basis(d: usize, i: usize) -> Self {
        let mut amps = CVector::zeros(d);
        amps[i] = Complex64::new(1.0, 0.0);
        PureState { amps }
    }

    /// `(|00⟩ + |11⟩)/√2`.
    pub fn bell() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        PureState {
            amps: CVector::from_vec(vec![
                Complex64::new(s, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(s, 0.0),
            ]),
        }
    }

    /// `Σ_i |ii⟩ / √d` on `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut amps = CVector::zeros(d * d);
        let s = 1.0 / (d as f64).sqrt();
        for i in 0..d {
            amps[i * d + i] = Complex64::new(s, 0.0);
        }
        PureState { amps }
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amps
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_trusted(&self.amps * self.amps.adjoint())
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        PureState {
            amps: tensor::kron_vec(&self.amps, &other.amps),
        }
    }

    pub fn tensor_power(&self, n: usize) -> PureState {
        PureState {
            amps: tensor::tensor_power_vec(&self.amps, n),
        }
    }

    pub fn overlap(&self, other: &PureState) -> Complex64 {
        self.amps.dotc(&other.amps)
    }

    pub fn apply(&self, u: &CMatrix) -> Result<PureState> {
        if u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: u.ncols(),
            });
        }
        Ok(PureState {
            amps: u * &self.amps,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// A state on `dA ⊗ dB` (A-major indexing). Keeps the state vector when the
/// state was built from one.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteState {
    rho: DensityMatrix,
    pure: Option<PureState>,
    d_a: usize,
    d_b: usize,
}

impl BipartiteState {
    pub fn mixed(rho: DensityMatrix, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != rho.dim() {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: rho.dim(),
            });
        }
        Ok(BipartiteState {
            rho,
            pure: None,
            d_a,
            d_b,
        })
    }

    pub fn pure(psi: PureState, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || d_a * d_b != psi.dim() {
            return Err(Error::DimensionMismatch {
                expected: d_a * d_b,
                found: psi.dim(),
            });
        }
        Ok(BipartiteState {
            rho: psi.density(),
            pure: Some(psi),
            d_a,
            d_b,
        })
    }

    pub fn density(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn pure_state(&self) -> Option<&PureState> {
        self.pure.as_ref()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_a, self.d_b)
    }

    pub fn dim(&self) -> usize {
        self.d_a * self.d_b
    }

    /// Reduced state on the kept side.
    pub fn partial_trace(&self, keep: Side) -> DensityMatrix {
        let k = match keep {
            Side::A => 0,
            Side::B => 1,
        };
        let dims = [self.d_a, self.d_b];
        let m = match &self.pure {
            Some(p) => tensor::reduce_pure(p.amplitudes(), &dims, &[k]),
            None => tensor::partial_trace_keep(self.rho.matrix(), &dims, &[k]),
        }
        .expect("dimensions validated at construction");
        DensityMatrix::from_trusted(m)
    }

    /// Partial transpose on B.
    pub fn partial_transpose(&self) -> CMatrix {
        tensor::partial_transpose_b(self.rho.matrix(), self.d_a, self.d_b)
    }

    /// Smallest eigenvalue of the partial transpose.
    pub fn ppt_min_eigenvalue(&self) -> f64 {
        HermitianEigen::new(&self.partial_transpose()).min_value()
    }

    /// Entanglement entropy `S(ρ_A)` in bits; meaningful for pure states.
    pub fn entanglement_entropy(&self) -> f64 {
        super::measures::von_neumann_entropy(&self.partial_trace(Side::A))
    }
}

/// Partial trace of a bipartite state (free-function form).
pub fn partial_trace(state: &BipartiteState, keep: Side) -> DensityMatrix {
    state.partial_trace(keep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_trace() {
        let err = DensityMatrix::diagonal(&[0.5, 0.48]).unwrap_err();
        assert!(matches!(err, Error::BadTrace { .. }));
    }

    #[test]
    fn rejects_negative_and_non_hermitian() {
        assert!(matches!(
            DensityMatrix::diagonal(&[1.1, -0.1]).unwrap_err(),
            Error::NotPositive { .. }
        ));
        let mut m = CMatrix::identity(2, 2).unscale(2.0);
        m[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            DensityMatrix::new(m).unwrap_err(),
            Error::NotHermitian { .. }
        ));
    }

    #[test]
    fn tolerates_tiny_negative_eigenvalue() {
        assert!(DensityMatrix::diagonal(&[1.0 + 5e-11, -5e-11]).is_ok());
    }

    #[test]
    fn bipartite_dims_must_match() {
        assert!(BipartiteState::mixed(DensityMatrix::maximally_mixed(4), 2, 3).is_err());
    }

    #[test]
    fn partial_trace_examples() {
        let bell = BipartiteState::pure(PureState::bell(), 2, 2).unwrap();
        let r = bell.partial_trace(Side::B);
        assert!((r.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);

        let psi = PureState::from_real(&[0.9f64.sqrt(), 0.0, 0.0, 0.1f64.sqrt()]).unwrap();
        let st = BipartiteState::pure(psi, 2, 2).unwrap();
        let r = st.partial_trace(Side::B);
        let want = DensityMatrix::diagonal(&[0.9, 0.1]).unwrap();
        assert!((r.matrix() - want.matrix()).norm() < 1e-14);

        let ra = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let rb = DensityMatrix::diagonal(&[0.6, 0.1, 0.3]).unwrap();
        let prod = BipartiteState::mixed(ra.tensor(&rb), 2, 3).unwrap();
        assert!((prod.partial_trace(Side::A).matrix() - ra.matrix()).norm() < 1e-15);
        assert!((prod.partial_trace(Side::B).matrix() - rb.matrix()).norm() < 1e-15);
    }
}
