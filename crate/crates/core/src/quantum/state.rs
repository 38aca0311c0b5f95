//! Pure states and density operators on finite tensor-product spaces.
//!
//! Subsystems are ordered row-major: for dims `[d0, d1, ..., dk]` the basis
//! index of `|i0 i1 ... ik>` is `((i0 * d1 + i1) * d2 + i2) ...`, so the last
//! subsystem varies fastest.

use num_complex::Complex64;

use super::linalg::{hermiticity_defect, kron, trace, CMatrix, CVector, HermitianEigen};
use crate::error::{Error, Result};

pub const NORM_TOL: f64 = 1e-12;
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

fn check_dims(dims: &[usize], len: usize) -> Result<()> {
    if dims.is_empty() || dims.contains(&0) || dims.iter().product::<usize>() != len {
        return Err(Error::BadDims {
            dims: dims.to_vec(),
            len,
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    dims: Vec<usize>,
}

impl PureState {
    /// Wraps already-normalized amplitudes.
    pub fn new(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm2 = amplitudes.norm_squared();
        if (norm2 - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm2));
        }
        Ok(Self { amplitudes, dims })
    }

    /// Normalizes arbitrary nonzero amplitudes.
    pub fn normalized(amplitudes: CVector, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, amplitudes.len())?;
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized(norm * norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            dims,
        })
    }

    pub fn from_real(amplitudes: &[f64], dims: Vec<usize>) -> Result<Self> {
        let v = CVector::from_iterator(
            amplitudes.len(),
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)),
        );
        Self::normalized(v, dims)
    }

    /// Computational basis state `|index>`.
    pub fn basis(index: usize, dims: Vec<usize>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if index >= len {
            return Err(Error::DimensionMismatch(index, len));
        }
        let mut v = CVector::zeros(len);
        v[index] = Complex64::new(1.0, 0.0);
        Self::new(v, dims)
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            dims,
        }
    }

    /// Reorders subsystems: subsystem `k` of the result is subsystem
    /// `order[k]` of `self`.
    pub fn permute(&self, order: &[usize]) -> Result<PureState> {
        let count = self.dims.len();
        let mut seen = vec![false; count];
        if order.len() != count {
            return Err(Error::DimensionMismatch(order.len(), count));
        }
        for &k in order {
            if k >= count || seen[k] {
                return Err(Error::SubsystemOutOfRange { index: k, count });
            }
            seen[k] = true;
        }
        let new_dims: Vec<usize> = order.iter().map(|&k| self.dims[k]).collect();
        let old_strides = strides(&self.dims);
        let new_strides = strides(&new_dims);
        let mut out = CVector::zeros(self.dim());
        for (idx, amp) in self.amplitudes.iter().enumerate() {
            let target: usize = order
                .iter()
                .enumerate()
                .map(|(pos, &k)| ((idx / old_strides[k]) % self.dims[k]) * new_strides[pos])
                .sum();
            out[target] = *amp;
        }
        Ok(PureState {
            amplitudes: out,
            dims: new_dims,
        })
    }

    pub fn inner(&self, other: &PureState) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// `|<a|b>|` close to 1 means equal rays.
    pub fn fidelity(&self, other: &PureState) -> f64 {
        self.inner(other).norm()
    }

    /// Largest amplitude difference after removing the relative global phase.
    pub fn phase_aligned_distance(&self, other: &PureState) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let overlap = self.inner(other);
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator {
            matrix: m,
            dims: self.dims.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
    dims: Vec<usize>,
}

impl DensityOperator {
    /// Validates Hermiticity, positivity and unit trace.
    pub fn new(matrix: CMatrix, dims: Vec<usize>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch(matrix.nrows(), matrix.ncols()));
        }
        check_dims(&dims, matrix.nrows())?;
        let defect = hermiticity_defect(&matrix);
        if defect > HERMITIAN_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::BadTrace(tr.re));
        }
        let min_eig = HermitianEigen::new(&matrix).values[0];
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { matrix, dims })
    }

    /// Builds from a matrix known to be a density operator up to rounding;
    /// symmetrizes and renormalizes the trace without further checks.
    pub(crate) fn from_trusted(matrix: CMatrix, dims: Vec<usize>) -> Self {
        let mut m = (&matrix + matrix.adjoint()).scale(0.5);
        let tr = trace(&m).re;
        m.unscale_mut(tr);
        Self { matrix: m, dims }
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
            dims,
        }
    }

    /// Diagonal operator in the computational basis.
    pub fn diagonal(probs: &[f64], dims: Vec<usize>) -> Result<Self> {
        let m = CMatrix::from_diagonal(&CVector::from_iterator(
            probs.len(),
            probs.iter().map(|&p| Complex64::new(p, 0.0)),
        ));
        Self::new(m, dims)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> f64 {
        trace(&self.matrix).re
    }

    pub fn eigen(&self) -> HermitianEigen {
        HermitianEigen::new(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        DensityOperator {
            matrix: kron(&self.matrix, &other.matrix),
            dims,
        }
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, unitary: &CMatrix) -> Result<DensityOperator> {
        if unitary.nrows() != self.dim() || unitary.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(unitary.nrows(), self.dim()));
        }
        Ok(DensityOperator::from_trusted(
            unitary * &self.matrix * unitary.adjoint(),
            self.dims.clone(),
        ))
    }

    /// Expectation value `tr(rho A)` (real part).
    pub fn expectation(&self, op: &CMatrix) -> f64 {
        trace(&(&self.matrix * op)).re
    }

    /// Traces out every subsystem not listed in `keep`. Kept subsystems
    /// appear in ascending index order regardless of the order given.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityOperator> {
        partial_trace(self, keep)
    }
}

/// Either kind of state, for operations that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum QuantumObject {
    Pure(PureState),
    Mixed(DensityOperator),
}

impl From<PureState> for QuantumObject {
    fn from(s: PureState) -> Self {
        QuantumObject::Pure(s)
    }
}

impl From<DensityOperator> for QuantumObject {
    fn from(s: DensityOperator) -> Self {
        QuantumObject::Mixed(s)
    }
}

/// Kronecker composition of two states of the same kind.
pub fn tensor_product(a: &QuantumObject, b: &QuantumObject) -> Result<QuantumObject> {
    match (a, b) {
        (QuantumObject::Pure(x), QuantumObject::Pure(y)) => Ok(QuantumObject::Pure(x.tensor(y))),
        (QuantumObject::Mixed(x), QuantumObject::Mixed(y)) => {
            Ok(QuantumObject::Mixed(x.tensor(y)))
        }
        _ => Err(Error::KindMismatch),
    }
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Splits every basis index into (kept index, traced index).
fn split_indices(dims: &[usize], keep: &[usize]) -> Vec<(usize, usize)> {
    let total: usize = dims.iter().product();
    let st = strides(dims);
    let kept_dims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let traced_dims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kst = strides(&kept_dims);
    let tst = strides(&traced_dims);
    (0..total)
        .map(|idx| {
            let digit = |k: usize| (idx / st[k]) % dims[k];
            let a = keep.iter().zip(&kst).map(|(&k, &s)| digit(k) * s).sum();
            let t = traced.iter().zip(&tst).map(|(&k, &s)| digit(k) * s).sum();
            (a, t)
        })
        .collect()
}

pub fn partial_trace(rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
    if keep.is_empty() {
        return Err(Error::EmptyKeep);
    }
    let count = rho.dims.len();
    let mut keep: Vec<usize> = keep.to_vec();
    keep.sort_unstable();
    keep.dedup();
    if let Some(&bad) = keep.iter().find(|&&k| k >= count) {
        return Err(Error::SubsystemOutOfRange { index: bad, count });
    }
    let kept_dims: Vec<usize> = keep.iter().map(|&k| rho.dims[k]).collect();
    let dk: usize = kept_dims.iter().product();
    let split = split_indices(&rho.dims, &keep);
    let mut out = CMatrix::zeros(dk, dk);
    for (i, &(ai, ti)) in split.iter().enumerate() {
        for (j, &(aj, tj)) in split.iter().enumerate() {
            if ti == tj {
                out[(ai, aj)] += rho.matrix[(i, j)];
            }
        }
    }
    Ok(DensityOperator {
        matrix: out,
        dims: kept_dims,
    })
}
