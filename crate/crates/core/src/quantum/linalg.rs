//! Dense complex linear algebra helpers built on `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues at or below this are treated as exact zeros in entropy sums.
pub const EIGEN_ZERO: f64 = 1e-12;

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    /// Columns are the eigenvectors matching `values`.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn new(m: &CMatrix) -> Self {
        // Symmetrize first so tiny anti-Hermitian noise never reaches the solver.
        let h = (m + m.adjoint()).scale(0.5);
        let eig = h.symmetric_eigen();
        let n = eig.eigenvalues.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Self { values, vectors }
    }

    /// Rebuilds `f(M)` from the decomposition.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for (c, &v) in self.values.iter().enumerate() {
            let fv = Complex64::new(f(v), 0.0);
            for r in 0..n {
                scaled[(r, c)] *= fv;
            }
        }
        &scaled * self.vectors.adjoint()
    }
}

/// Kronecker product.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Largest elementwise deviation of `m` from its adjoint.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest elementwise absolute difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Gradient of `rho -> -tr(sigma ln rho)` with respect to `rho`, under the
/// Hilbert-Schmidt pairing `df = tr(G dX)`.
///
/// Uses the first divided differences of `ln` on the spectrum of `rho`.
/// Requires `rho` to be strictly positive.
pub fn neg_log_gradient(eig: &HermitianEigen, sigma: &CMatrix) -> CMatrix {
    let u = &eig.vectors;
    let rotated = u.adjoint() * sigma * u;
    let n = eig.values.len();
    let lam = &eig.values;
    let mut weighted = rotated;
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (lam[i], lam[j]);
            let dd = if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()) {
                2.0 / (a + b)
            } else {
                (a.ln() - b.ln()) / (a - b)
            };
            weighted[(i, j)] *= Complex64::new(-dd, 0.0);
        }
    }
    u * weighted * u.adjoint()
}
