//! Random states and unitaries for sampling-based checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::{CMatrix, CVector};
use super::state::{DensityOperator, PureState};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

/// Haar-random pure state.
pub fn random_pure_state<R: Rng + ?Sized>(dims: Vec<usize>, rng: &mut R) -> PureState {
    let d: usize = dims.iter().product();
    let v = CVector::from_fn(d, |_, _| gaussian(rng));
    PureState::normalized(v, dims).expect("gaussian vector is nonzero")
}

/// Random density operator of the given rank (Ginibre ensemble).
pub fn random_density<R: Rng + ?Sized>(dims: Vec<usize>, rank: usize, rng: &mut R) -> DensityOperator {
    let d: usize = dims.iter().product();
    let g = ginibre(d, rank.max(1), rng);
    DensityOperator::from_trusted(&g * g.adjoint(), dims)
}

/// Haar-random unitary via QR of a Ginibre matrix with phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q.clone();
    for c in 0..d {
        let diag = r[(c, c)];
        let phase = if diag.norm() > 0.0 {
            diag / diag.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        for row in 0..d {
            u[(row, c)] = q[(row, c)] * phase;
        }
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::linalg::max_abs_diff;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = haar_unitary(4, &mut rng);
        assert!(max_abs_diff(&(&u * u.adjoint()), &CMatrix::identity(4, 4)) < 1e-12);
    }

    #[test]
    fn random_density_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density(vec![2, 3], 6, &mut rng);
        assert!(DensityOperator::new(rho.matrix().clone(), vec![2, 3]).is_ok());
    }
}
