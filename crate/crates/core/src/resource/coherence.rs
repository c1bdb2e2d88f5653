use super::{Bracket, FreeSetOracle, FreeWitness, Membership};
use crate::error::{Error, Result};
use crate::linalg::{von_neumann_entropy, CMatrix, DensityMatrix};

/// Free states are the diagonal states; `R(ρ) = S(diag ρ) − S(ρ)` exactly.
#[derive(Debug, Clone)]
pub struct CoherenceOracle {
    d: usize,
    kappa: f64,
}

impl CoherenceOracle {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::OutOfRange(format!(
                "coherence oracle needs d >= 2, got {d}"
            )));
        }
        Ok(CoherenceOracle {
            d,
            kappa: (d as f64).log2(),
        })
    }

    /// Same oracle with a declared diameter `kappa ≥ log₂ d`.
    pub fn with_kappa(d: usize, kappa: f64) -> Result<Self> {
        let mut o = Self::new(d)?;
        if !(kappa >= o.kappa - 1e-12) {
            return Err(Error::OutOfRange(format!(
                "kappa {kappa} below log2 d = {}",
                o.kappa
            )));
        }
        o.kappa = kappa;
        Ok(o)
    }

    /// Dephased state `diag ρ`, the closest free state.
    pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
        let m = rho.matrix();
        let n = m.nrows();
        DensityMatrix::from_trusted(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                m[(i, i)]
            } else {
                0.0.into()
            }
        }))
    }
}

impl FreeSetOracle for CoherenceOracle {
    fn name(&self) -> &str {
        "coherence"
    }

    fn dim(&self) -> usize {
        self.d
    }

    fn closest_free(&self, rho: &DensityMatrix) -> Result<Bracket> {
        if rho.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                found: rho.dim(),
            });
        }
        let diag = Self::dephase(rho);
        let v = (von_neumann_entropy(&diag) - von_neumann_entropy(rho)).max(0.0);
        Ok(Bracket {
            lower: v,
            upper: v,
            witness: FreeWitness::Diagonal(diag),
            converged: true,
        })
    }

    fn diameter_kappa(&self) -> f64 {
        self.kappa
    }

    fn full_rank_witness(&self) -> DensityMatrix {
        DensityMatrix::maximally_mixed(self.d)
    }

    fn contains(&self, rho: &DensityMatrix) -> Membership {
        let m = rho.matrix();
        let off = (0..self.d).any(|i| (0..self.d).any(|j| i != j && m[(i, j)].norm() > 1e-10));
        if off {
            Membership::NotFree
        } else {
            Membership::Free
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::PureState;
    use crate::resource::relative_entropy_of_resource;

    #[test]
    fn closed_form_examples() {
        let o = CoherenceOracle::new(2).unwrap();
        let plus = PureState::from_real(&[1.0, 1.0]).unwrap().density();
        let b = relative_entropy_of_resource(&plus, &o).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-12 && (b.upper - 1.0).abs() < 1e-12);

        let d = DensityMatrix::diagonal(&[0.3, 0.7]).unwrap();
        let b = relative_entropy_of_resource(&d, &o).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert_eq!(o.contains(&d), Membership::Free);

        for n in 1..=4 {
            let dim = 1 << n;
            let o = CoherenceOracle::new(dim).unwrap();
            let uniform = PureState::from_real(&vec![1.0; dim]).unwrap().density();
            let b = relative_entropy_of_resource(&uniform, &o).unwrap();
            assert!((b.upper - n as f64).abs() < 1e-10);
            let b = relative_entropy_of_resource(&DensityMatrix::maximally_mixed(dim), &o).unwrap();
            assert!(b.upper.abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_override_must_dominate() {
        assert!(CoherenceOracle::with_kappa(4, 1.5).is_err());
        assert_eq!(
            CoherenceOracle::with_kappa(4, 8.0)
                .unwrap()
                .diameter_kappa(),
            8.0
        );
        assert!(CoherenceOracle::new(1).is_err());
    }
}
