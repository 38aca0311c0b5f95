//! Von Neumann and relative entropies. All values are in nats.

use std::f64::consts::LN_2;

use super::linalg::{HermitianEigen, EIGEN_ZERO};
use super::state::DensityOperator;
use crate::error::{Error, Result};

/// Overlap of `sigma` with the kernel of `rho` above which the relative
/// entropy is declared infinite.
pub const SUPPORT_TOL: f64 = 1e-10;

/// `-sum p ln p`, skipping `p <= EIGEN_ZERO`.
pub fn shannon_nats(probs: impl IntoIterator<Item = f64>) -> f64 {
    probs
        .into_iter()
        .filter(|&p| p > EIGEN_ZERO)
        .map(|p| -p * p.ln())
        .sum()
}

pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    shannon_nats(rho.eigen().values)
}

/// `S(sigma || rho) = tr(sigma ln sigma - sigma ln rho)`.
///
/// Returns `f64::INFINITY` when the support of `sigma` is not contained in
/// the support of `rho`.
pub fn quantum_relative_entropy(sigma: &DensityOperator, rho: &DensityOperator) -> Result<f64> {
    if sigma.dims() != rho.dims() {
        return Err(Error::DimensionMismatch(sigma.dim(), rho.dim()));
    }
    let neg_entropy = -von_neumann_entropy(sigma);
    Ok(neg_entropy + cross_entropy(sigma, &rho.eigen()))
}

/// `-tr(sigma ln rho)` given the spectral decomposition of `rho`.
pub(crate) fn cross_entropy(sigma: &DensityOperator, rho_eig: &HermitianEigen) -> f64 {
    let u = &rho_eig.vectors;
    let rotated = u.adjoint() * sigma.matrix() * u;
    let mut acc = 0.0;
    for (j, &lam) in rho_eig.values.iter().enumerate() {
        let weight = rotated[(j, j)].re;
        if lam <= EIGEN_ZERO {
            if weight > SUPPORT_TOL {
                return f64::INFINITY;
            }
            continue;
        }
        acc -= weight * lam.ln();
    }
    acc
}

/// `S(A) + S(B) - S(AB)` for a bipartite state.
pub fn mutual_information(sigma: &DensityOperator) -> Result<f64> {
    if sigma.dims().len() != 2 {
        return Err(Error::NotBipartite(sigma.dims().len()));
    }
    let a = sigma.partial_trace(&[0])?;
    let b = sigma.partial_trace(&[1])?;
    Ok(von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(sigma))
}

/// Display-only conversion.
pub fn nats_to_bits(nats: f64) -> f64 {
    nats / LN_2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::state::PureState;

    #[test]
    fn pure_state_has_zero_entropy() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_real(&[s, 0.0, 0.0, s], vec![2, 2]).unwrap();
        assert!(von_neumann_entropy(&psi.to_density()).abs() < 1e-12);
    }

    #[test]
    fn maximally_mixed_qubit_is_ln2() {
        let rho = DensityOperator::maximally_mixed(vec![2]);
        assert!((von_neumann_entropy(&rho) - LN_2).abs() < 1e-12);
    }

    #[test]
    fn biased_qubit_entropy() {
        // -(0.9 ln 0.9 + 0.1 ln 0.1)
        let rho = DensityOperator::diagonal(&[0.9, 0.1], vec![2]).unwrap();
        assert!((von_neumann_entropy(&rho) - 0.325_082_973_391_448).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_cases() {
        let sigma = DensityOperator::diagonal(&[0.75, 0.25], vec![2]).unwrap();
        assert!(quantum_relative_entropy(&sigma, &sigma).unwrap().abs() < 1e-12);

        // ln 2 - H(0.75, 0.25)
        let mixed = DensityOperator::maximally_mixed(vec![2]);
        let v = quantum_relative_entropy(&sigma, &mixed).unwrap();
        assert!((v - 0.130_812_035_941_137_8).abs() < 1e-12, "{v}");

        let zero = PureState::basis(0, vec![2]).unwrap().to_density();
        let one = PureState::basis(1, vec![2]).unwrap().to_density();
        assert_eq!(
            quantum_relative_entropy(&zero, &one).unwrap(),
            f64::INFINITY
        );
        // support of sigma inside support of rho: finite
        assert!((quantum_relative_entropy(&zero, &mixed).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_dimension_mismatch() {
        let a = DensityOperator::maximally_mixed(vec![2]);
        let b = DensityOperator::maximally_mixed(vec![3]);
        assert!(matches!(
            quantum_relative_entropy(&a, &b),
            Err(Error::DimensionMismatch(2, 3))
        ));
    }

    #[test]
    fn mutual_information_of_bell_pair() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = PureState::from_real(&[s, 0.0, 0.0, s], vec![2, 2]).unwrap();
        let mi = mutual_information(&psi.to_density()).unwrap();
        assert!((mi - 2.0 * LN_2).abs() < 1e-12);
    }
}
