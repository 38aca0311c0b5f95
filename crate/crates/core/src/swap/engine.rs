use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::cat::{CatCollection, CatState, MeasurementSpec, ParticleId, Sign};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwapOutcome {
    pub basis: CatState,
    pub probability: f64,
    /// Cat on the unmeasured particles of every touched cat, or `None` when
    /// the measurement consumed all of them.
    pub residual: Option<CatState>,
    /// Cats with no selected particle, unchanged.
    pub untouched: Vec<CatState>,
}

struct Partition<'a> {
    touched: Vec<&'a CatState>,
    untouched: Vec<CatState>,
    selected: &'a BTreeSet<ParticleId>,
}

impl<'a> Partition<'a> {
    fn new(coll: &'a CatCollection, spec: &'a MeasurementSpec) -> Result<Self> {
        spec.validate(coll)?;
        let selected = spec.selected();
        let (touched, untouched): (Vec<&CatState>, Vec<&CatState>) = coll
            .cats()
            .iter()
            .partition(|c| c.particles().iter().any(|p| selected.contains(p)));
        Ok(Self {
            touched,
            untouched: untouched.into_iter().cloned().collect(),
            selected,
        })
    }

    /// Per touched cat, the value of `u ⊕ b` over its selected particles,
    /// or `None` if it is not constant.
    fn flips(&self, basis: &CatState) -> Option<Vec<u8>> {
        self.touched
            .iter()
            .map(|cat| {
                let mut flip = None;
                for (&p, &u) in cat.particles().iter().zip(cat.bits()) {
                    if let Some(b) = basis.bit_of(p) {
                        let f = u ^ b;
                        match flip {
                            None => flip = Some(f),
                            Some(prev) if prev != f => return None,
                            _ => {}
                        }
                    }
                }
                flip
            })
            .collect()
    }

    fn residual_particles(&self) -> Vec<(ParticleId, u8, usize)> {
        let mut out = Vec::new();
        for (k, cat) in self.touched.iter().enumerate() {
            for (&p, &u) in cat.particles().iter().zip(cat.bits()) {
                if !self.selected.contains(&p) {
                    out.push((p, u, k));
                }
            }
        }
        out.sort_unstable_by_key(|e| e.0);
        out
    }

    fn project(&self, basis: &CatState) -> Result<Option<SwapOutcome>> {
        let Some(flips) = self.flips(basis) else {
            return Ok(None);
        };
        let sign = self
            .touched
            .iter()
            .fold(basis.sign(), |acc, c| acc * c.sign());
        let rest = self.residual_particles();
        let t = self.touched.len() as i32;
        let (probability, residual) = if rest.is_empty() {
            if sign == Sign::Minus {
                return Ok(None);
            }
            (2f64.powi(1 - t), None)
        } else {
            let ids: Vec<ParticleId> = rest.iter().map(|e| e.0).collect();
            let bits: Vec<u8> = rest.iter().map(|e| e.1 ^ flips[e.2]).collect();
            (2f64.powi(-t), Some(CatState::new(&ids, &bits, sign)?))
        };
        Ok(Some(SwapOutcome {
            basis: basis.clone(),
            probability,
            residual,
            untouched: self.untouched.clone(),
        }))
    }
}

/// All outcomes of a complete cat-basis measurement on the selected
/// particles that occur with nonzero probability.
///
/// Order: basis bits lexicographic (ascending particle id), then `+` before `-`.
pub fn enumerate_outcomes(coll: &CatCollection, spec: &MeasurementSpec) -> Result<Vec<SwapOutcome>> {
    let part = Partition::new(coll, spec)?;
    let ids: Vec<ParticleId> = part.selected.iter().copied().collect();
    let n = part.touched.len();
    // The cat holding the lowest selected id is pinned so that its flip makes
    // the basis canonical; every other touched cat flips freely.
    let lead = part
        .touched
        .iter()
        .position(|c| c.particles().contains(&ids[0]))
        .expect("lowest selected particle lies in a touched cat");
    let lead_flip = part.touched[lead].bit_of(ids[0]).expect("present");
    let mut outcomes = Vec::with_capacity(1 << n);
    for mask in 0u64..(1u64 << n) {
        let flip = |k: usize| ((mask >> k) & 1) as u8;
        if flip(lead) != lead_flip {
            continue;
        }
        let bits: Vec<u8> = ids
            .iter()
            .map(|&p| {
                let k = part
                    .touched
                    .iter()
                    .position(|c| c.bit_of(p).is_some())
                    .expect("selected particle is covered");
                part.touched[k].bit_of(p).expect("present") ^ flip(k)
            })
            .collect();
        for sign in [Sign::Plus, Sign::Minus] {
            let basis = CatState::raw(&ids, &bits, sign)?;
            if let Some(o) = part.project(&basis)? {
                outcomes.push(o);
            }
        }
    }
    outcomes.sort_by(|a, b| {
        a.basis
            .bits()
            .cmp(b.basis.bits())
            .then(a.basis.sign().cmp(&b.basis.sign()))
    });
    Ok(outcomes)
}

/// Projects onto one basis cat. Returns `None` for a zero-probability outcome.
pub fn project_outcome(
    coll: &CatCollection,
    spec: &MeasurementSpec,
    basis: &CatState,
) -> Result<Option<SwapOutcome>> {
    let part = Partition::new(coll, spec)?;
    if !basis.particles().iter().copied().eq(part.selected.iter().copied()) {
        return Err(Error::BasisMismatch);
    }
    part.project(&basis.canonicalize())
}

/// Sizes `(p, n - p)` of the measured-side and residual-side cats, where `n`
/// counts particles of the touched cats only.
pub fn polygon_counts(coll: &CatCollection, spec: &MeasurementSpec) -> Result<(usize, usize)> {
    let part = Partition::new(coll, spec)?;
    let total: usize = part.touched.iter().map(|c| c.len()).sum();
    Ok((spec.len(), total - spec.len()))
}
