use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::EntanglementResult;
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityOperator};

/// Density matrix as rows of `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityInput {
    pub dims: Vec<usize>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

impl DensityInput {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("density input: {e}")))
    }

    pub fn from_density(rho: &DensityOperator) -> Self {
        let m = rho.matrix();
        Self {
            dims: rho.dims().to_vec(),
            matrix: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
                .collect(),
        }
    }

    pub fn to_density(&self) -> Result<DensityOperator> {
        let d = self.matrix.len();
        if let Some(row) = self.matrix.iter().find(|r| r.len() != d) {
            return Err(Error::Input(format!("row of length {} in a {d}x{d} matrix", row.len())));
        }
        let m = CMatrix::from_fn(d, d, |r, c| {
            let [re, im] = self.matrix[r][c];
            Complex64::new(re, im)
        });
        DensityOperator::new(m, self.dims.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReeOutput {
    pub value_nats: f64,
    pub value_bits: f64,
    pub converged: bool,
    pub restarts: usize,
}

impl From<&EntanglementResult> for ReeOutput {
    fn from(r: &EntanglementResult) -> Self {
        Self {
            value_nats: r.value,
            value_bits: r.value_bits(),
            converged: r.converged,
            restarts: r.restarts_used,
        }
    }
}
