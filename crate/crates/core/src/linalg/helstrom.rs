use super::spectral::{nonnegative_projector, trace_product_re};
use super::state::DensityMatrix;
use super::{CMatrix, VALIDITY_TOL};
use crate::error::{Error, Result};

/// Two-outcome POVM `{E0, E1}` with `E0 + E1 = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmPair {
    e0: CMatrix,
    e1: CMatrix,
}

impl PovmPair {
    pub fn new(e0: CMatrix, e1: CMatrix) -> Result<Self> {
        let d = e0.nrows();
        if e0.shape() != (d, d) || e1.shape() != (d, d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: e1.nrows(),
            });
        }
        let dev = super::max_abs(&(&e0 + &e1 - CMatrix::identity(d, d)));
        if dev > VALIDITY_TOL {
            return Err(Error::OutOfRange(format!(
                "E0 + E1 deviates from I by {dev:e}"
            )));
        }
        for e in [&e0, &e1] {
            let min = super::spectral::HermitianEigen::new(e).min_value();
            if min < -VALIDITY_TOL {
                return Err(Error::NotPositive {
                    min_eigenvalue: min,
                });
            }
        }
        Ok(PovmPair { e0, e1 })
    }

    /// `{E, I − E}`.
    pub fn from_effect(e0: CMatrix) -> Result<Self> {
        let d = e0.nrows();
        let e1 = CMatrix::identity(d, d) - &e0;
        Self::new(e0, e1)
    }

    pub fn e0(&self) -> &CMatrix {
        &self.e0
    }

    pub fn e1(&self) -> &CMatrix {
        &self.e1
    }

    /// `½(Tr[E0 ρ] + Tr[E1 σ])`: success probability guessing ρ on outcome 0
    /// with equal priors.
    pub fn success_probability(&self, rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
        0.5 * (trace_product_re(&self.e0, rho.matrix())
            + trace_product_re(&self.e1, sigma.matrix()))
    }
}

/// Optimal measurement for telling ρ from σ with equal priors.
///
/// `E0` projects onto the non-negative eigenspace of `ρ − σ`; the returned
/// probability is the analytic value `½(1 + Δ(ρ, σ))`.
pub fn helstrom_measurement(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<(PovmPair, f64)> {
    let delta = super::measures::trace_distance(rho, sigma)?;
    let e0 = nonnegative_projector(&(rho.matrix() - sigma.matrix()));
    let povm = PovmPair::from_effect(e0)?;
    Ok((povm, 0.5 * (1.0 + delta)))
}
