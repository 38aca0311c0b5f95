//! Dense state-vector verification of the symbolic swapping engine.

use super::cat::{CatCollection, CatState, MeasurementSpec, ParticleId, Sign};
use super::engine::{enumerate_outcomes, SwapOutcome};
use crate::error::{Error, Result};
use crate::quantum::{CVector, PureState};

pub const ORACLE_PARTICLE_LIMIT: usize = 14;
const ZERO_PROBABILITY: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct DenseOutcome {
    pub basis_bits: Vec<u8>,
    pub basis_sign: Sign,
    pub probability: f64,
    /// Normalized state of every unselected particle in ascending id order.
    pub residual: Option<PureState>,
}

/// Projects the full state vector onto each of the `2^p` cat-basis vectors of
/// the selected particles. Zero-probability outcomes are dropped; the order
/// matches [`enumerate_outcomes`].
pub fn brute_force_oracle(coll: &CatCollection, spec: &MeasurementSpec) -> Result<Vec<DenseOutcome>> {
    spec.validate(coll)?;
    let n = coll.particle_count();
    if n > ORACLE_PARTICLE_LIMIT {
        return Err(Error::TooManyParticles {
            got: n,
            limit: ORACLE_PARTICLE_LIMIT,
        });
    }
    let all = coll.particles();
    let selected: Vec<ParticleId> = spec.selected().iter().copied().collect();
    let p = selected.len();
    let rest: Vec<ParticleId> = all
        .iter()
        .copied()
        .filter(|x| !spec.selected().contains(x))
        .collect();
    let position = |id: ParticleId| all.binary_search(&id).expect("particle present");
    let order: Vec<usize> = selected.iter().chain(&rest).map(|&id| position(id)).collect();
    let psi = coll.to_pure_state()?.permute(&order)?;
    let amps = psi.amplitudes();
    let rest_dim = 1usize << rest.len();

    let mut out = Vec::new();
    for pattern in 0..(1usize << (p - 1)) {
        let bits: Vec<u8> = (0..p).map(|k| ((pattern >> (p - 1 - k)) & 1) as u8).collect();
        let complement = (!pattern) & ((1 << p) - 1);
        for sign in [Sign::Plus, Sign::Minus] {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let mut v = CVector::zeros(rest_dim);
            for r in 0..rest_dim {
                v[r] = (amps[pattern * rest_dim + r] + amps[complement * rest_dim + r] * sign.value())
                    * s;
            }
            let probability = v.norm_squared();
            if probability <= ZERO_PROBABILITY {
                continue;
            }
            let residual = if rest.is_empty() {
                None
            } else {
                Some(PureState::normalized(v, vec![2; rest.len()])?)
            };
            out.push(DenseOutcome {
                basis_bits: bits.clone(),
                basis_sign: sign,
                probability,
                residual,
            });
        }
    }
    Ok(out)
}

/// Dense vector of a symbolic outcome's post-measurement state on the
/// unselected particles in ascending id order.
pub fn symbolic_residual_state(outcome: &SwapOutcome) -> Result<Option<PureState>> {
    let mut cats: Vec<CatState> = outcome.untouched.clone();
    if let Some(r) = &outcome.residual {
        cats.push(r.clone());
    }
    if cats.is_empty() {
        return Ok(None);
    }
    CatCollection::new(cats)?.to_pure_state().map(Some)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub symbolic_count: usize,
    pub dense_count: usize,
    pub support_matches: bool,
    pub max_probability_error: f64,
    pub max_residual_distance: f64,
    pub symbolic_total: f64,
    pub dense_total: f64,
}

impl OracleComparison {
    pub fn agrees(&self, tol: f64) -> bool {
        self.support_matches
            && self.max_probability_error <= tol
            && self.max_residual_distance <= tol
    }
}

/// Runs both engines and reports how far they disagree.
pub fn compare_with_oracle(coll: &CatCollection, spec: &MeasurementSpec) -> Result<OracleComparison> {
    let symbolic = enumerate_outcomes(coll, spec)?;
    let dense = brute_force_oracle(coll, spec)?;
    let support_matches = symbolic.len() == dense.len()
        && symbolic
            .iter()
            .zip(&dense)
            .all(|(s, d)| s.basis.bits() == d.basis_bits.as_slice() && s.basis.sign() == d.basis_sign);
    let mut max_probability_error: f64 = 0.0;
    let mut max_residual_distance: f64 = 0.0;
    if support_matches {
        for (s, d) in symbolic.iter().zip(&dense) {
            max_probability_error = max_probability_error.max((s.probability - d.probability).abs());
            let dist = match (symbolic_residual_state(s)?, &d.residual) {
                (None, None) => 0.0,
                (Some(a), Some(b)) if a.dims() == b.dims() => a.phase_aligned_distance(b),
                _ => f64::INFINITY,
            };
            max_residual_distance = max_residual_distance.max(dist);
        }
    } else {
        max_probability_error = f64::INFINITY;
        max_residual_distance = f64::INFINITY;
    }
    Ok(OracleComparison {
        symbolic_count: symbolic.len(),
        dense_count: dense.len(),
        support_matches,
        max_probability_error,
        max_residual_distance,
        symbolic_total: symbolic.iter().map(|o| o.probability).sum(),
        dense_total: dense.iter().map(|o| o.probability).sum(),
    })
}
