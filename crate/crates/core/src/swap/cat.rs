use std::collections::BTreeSet;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CVector, PureState};

pub type ParticleId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        }
    }
}

impl Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// Normalized cat state `(|u> ± |u^c>)/sqrt(2)` on a set of qubits.
///
/// Particles are stored in ascending id order with their bits alongside.
/// A single particle is the degenerate cat `(|0> ± |1>)/sqrt(2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CatState {
    particles: Vec<ParticleId>,
    bits: Vec<u8>,
    sign: Sign,
}

impl CatState {
    /// Builds a cat and canonicalizes it.
    pub fn new(particles: &[ParticleId], bits: &[u8], sign: Sign) -> Result<Self> {
        Ok(Self::raw(particles, bits, sign)?.canonicalize())
    }

    /// Builds a cat keeping the given bit representative.
    pub fn raw(particles: &[ParticleId], bits: &[u8], sign: Sign) -> Result<Self> {
        if particles.is_empty() {
            return Err(Error::EmptyCat);
        }
        if bits.len() != particles.len() {
            return Err(Error::BitCount {
                bits: bits.len(),
                particles: particles.len(),
            });
        }
        if let Some(&b) = bits.iter().find(|&&b| b > 1) {
            return Err(Error::Input(format!("bit value {b} is not 0 or 1")));
        }
        let mut pairs: Vec<(ParticleId, u8)> =
            particles.iter().copied().zip(bits.iter().copied()).collect();
        pairs.sort_unstable_by_key(|p| p.0);
        if let Some(w) = pairs.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(Error::DuplicateParticle(w[0].0));
        }
        Ok(Self {
            particles: pairs.iter().map(|p| p.0).collect(),
            bits: pairs.iter().map(|p| p.1).collect(),
            sign,
        })
    }

    pub fn particles(&self) -> &[ParticleId] {
        &self.particles
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn bit_of(&self, particle: ParticleId) -> Option<u8> {
        self.particles
            .binary_search(&particle)
            .ok()
            .map(|i| self.bits[i])
    }

    pub fn is_canonical(&self) -> bool {
        self.bits[0] == 0
    }

    /// Representative whose lowest-id particle carries bit 0. Complementing
    /// every bit maps `|u> ± |u^c>` to `±(|u> ± |u^c>)`, so the sign is kept
    /// and only a global phase is dropped.
    pub fn canonicalize(&self) -> CatState {
        if self.is_canonical() {
            return self.clone();
        }
        CatState {
            particles: self.particles.clone(),
            bits: self.bits.iter().map(|b| 1 - b).collect(),
            sign: self.sign,
        }
    }

    /// Dense state vector over the particles in ascending id order.
    pub fn to_pure_state(&self) -> PureState {
        let n = self.len();
        let mut v = CVector::zeros(1 << n);
        let index = |bits: &mut dyn Iterator<Item = u8>| {
            bits.fold(0usize, |acc, b| (acc << 1) | b as usize)
        };
        let direct = index(&mut self.bits.iter().copied());
        let complement = index(&mut self.bits.iter().map(|b| 1 - b));
        let s = std::f64::consts::FRAC_1_SQRT_2;
        v[direct].re += s;
        v[complement].re += s * self.sign.value();
        PureState::new(v, vec![2; n]).expect("cat vector is normalized")
    }

    pub fn particle_set(&self) -> BTreeSet<ParticleId> {
        self.particles.iter().copied().collect()
    }
}

impl fmt::Display for CatState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.particles.iter().map(|p| p.to_string()).collect();
        let u: String = self.bits.iter().map(|b| char::from(b'0' + b)).collect();
        let uc: String = self.bits.iter().map(|b| char::from(b'1' - b)).collect();
        write!(f, "|{u}> {} |{uc}> on ({})", self.sign, ids.join(","))
    }
}

/// Bell state `|u_i u_j> ± |u_i^c u_j^c>` on particles `i`, `j`.
pub fn make_bell(i: ParticleId, j: ParticleId, u_i: u8, u_j: u8, sign: Sign) -> Result<CatState> {
    CatState::new(&[i, j], &[u_i, u_j], sign)
}

/// Product of cat states on pairwise-disjoint particle sets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatCollection {
    cats: Vec<CatState>,
}

impl CatCollection {
    pub fn new(cats: Vec<CatState>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for cat in &cats {
            for &p in cat.particles() {
                if !seen.insert(p) {
                    return Err(Error::DuplicateParticle(p));
                }
            }
        }
        Ok(Self { cats })
    }

    pub fn cats(&self) -> &[CatState] {
        &self.cats
    }

    pub fn particle_count(&self) -> usize {
        self.cats.iter().map(CatState::len).sum()
    }

    /// All particle ids, ascending.
    pub fn particles(&self) -> Vec<ParticleId> {
        let mut all: Vec<ParticleId> = self
            .cats
            .iter()
            .flat_map(|c| c.particles().iter().copied())
            .collect();
        all.sort_unstable();
        all
    }

    pub fn cat_of(&self, particle: ParticleId) -> Option<usize> {
        self.cats
            .iter()
            .position(|c| c.particles().binary_search(&particle).is_ok())
    }

    /// Dense state over all particles in ascending id order, assembled as a
    /// tensor product of the cats followed by a subsystem permutation.
    pub fn to_pure_state(&self) -> Result<PureState> {
        let mut order: Vec<ParticleId> = Vec::new();
        let mut state: Option<PureState> = None;
        for cat in &self.cats {
            let s = cat.to_pure_state();
            state = Some(match state {
                None => s,
                Some(acc) => acc.tensor(&s),
            });
            order.extend_from_slice(cat.particles());
        }
        let state = state.ok_or(Error::EmptySelection)?;
        let mut sorted: Vec<(ParticleId, usize)> =
            order.iter().copied().enumerate().map(|(i, p)| (p, i)).collect();
        sorted.sort_unstable();
        let perm: Vec<usize> = sorted.iter().map(|&(_, i)| i).collect();
        state.permute(&perm)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSpec {
    selected: BTreeSet<ParticleId>,
}

impl MeasurementSpec {
    pub fn new(selected: impl IntoIterator<Item = ParticleId>) -> Result<Self> {
        let selected: BTreeSet<ParticleId> = selected.into_iter().collect();
        if selected.is_empty() {
            return Err(Error::EmptySelection);
        }
        Ok(Self { selected })
    }

    pub fn selected(&self) -> &BTreeSet<ParticleId> {
        &self.selected
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// Checks every selected particle belongs to the collection.
    pub fn validate(&self, coll: &CatCollection) -> Result<()> {
        if self.selected.is_empty() {
            return Err(Error::EmptySelection);
        }
        match self.selected.iter().find(|&&p| coll.cat_of(p).is_none()) {
            Some(&p) => Err(Error::UnknownParticle(p)),
            None => Ok(()),
        }
    }

    /// Number of selected particles `p_m` in each cat, in collection order.
    pub fn per_cat_counts(&self, coll: &CatCollection) -> Vec<usize> {
        coll.cats()
            .iter()
            .map(|c| {
                c.particles()
                    .iter()
                    .filter(|p| self.selected.contains(p))
                    .count()
            })
            .collect()
    }
}
