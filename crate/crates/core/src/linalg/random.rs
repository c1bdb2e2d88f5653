//! Seeded random states, unitaries and POVMs.
//!
//! Density matrices are drawn from the Hilbert–Schmidt ensemble (`G G† / Tr`,
//! `G` complex Ginibre); pure states and unitaries are Haar distributed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::helstrom::PovmPair;
use super::state::{DensityMatrix, PureState};
use super::{CMatrix, CVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    DMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PureState {
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(v).expect("gaussian vector is nonzero")
}

/// Full-rank Hilbert–Schmidt random state.
pub fn random_density_matrix<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_density_matrix_rank(d, d, rng)
}

/// Random state of rank at most `rank` (induced measure).
pub fn random_density_matrix_rank<R: Rng + ?Sized>(
    d: usize,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let g = ginibre(d, rank.max(1), rng);
    let m = &g * g.adjoint();
    let t: f64 = m.diagonal().iter().map(|z| z.re).sum();
    DensityMatrix::from_numerical(m.unscale(t)).expect("Ginibre product is PSD")
}

/// Haar-random unitary (QR of a Ginibre matrix with the phase correction).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let z = r[(j, j)];
        let ph = if z.norm() > 0.0 {
            z / z.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= ph;
        }
    }
    q
}

/// Random two-outcome POVM: `E0 = U diag(u) U†` with `u` uniform in `[0,1]`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, rng: &mut R) -> PovmPair {
    let u = random_unitary(d, rng);
    let diag = CVector::from_fn(d, |_, _| Complex64::new(rng.random::<f64>(), 0.0));
    let e0 = &u * CMatrix::from_diagonal(&diag) * u.adjoint();
    let e0 = super::spectral::hermitian_part(&e0);
    PovmPair::from_effect(e0).expect("eigenvalues in [0,1]")
}
