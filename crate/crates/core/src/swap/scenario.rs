use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::cat::{CatCollection, CatState, MeasurementSpec, ParticleId, Sign};
use super::engine::{enumerate_outcomes, SwapOutcome};
use super::exchange::telephone_exchange;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatSpec {
    pub particles: Vec<ParticleId>,
    pub bits: Vec<u8>,
    pub sign: Sign,
}

impl From<&CatState> for CatSpec {
    fn from(c: &CatState) -> Self {
        Self {
            particles: c.particles().to_vec(),
            bits: c.bits().to_vec(),
            sign: c.sign(),
        }
    }
}

impl CatSpec {
    pub fn build(&self) -> Result<CatState> {
        CatState::new(&self.particles, &self.bits, self.sign)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scenario {
    Swap {
        cats: Vec<CatSpec>,
        measure: Vec<ParticleId>,
    },
    Exchange {
        users: Vec<String>,
        request: Vec<String>,
    },
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Input(format!("scenario: {e}")))
    }

    pub fn from_parts(coll: &CatCollection, spec: &MeasurementSpec) -> Self {
        Scenario::Swap {
            cats: coll.cats().iter().map(CatSpec::from).collect(),
            measure: spec.selected().iter().copied().collect(),
        }
    }

    /// Collection and measurement described by the scenario. Exchange
    /// scenarios are expanded into their Bell pairs.
    pub fn resolve(&self) -> Result<(CatCollection, MeasurementSpec)> {
        match self {
            Scenario::Swap { cats, measure } => {
                let cats = cats.iter().map(CatSpec::build).collect::<Result<Vec<_>>>()?;
                let coll = CatCollection::new(cats)?;
                let spec = MeasurementSpec::new(measure.iter().copied())?;
                spec.validate(&coll)?;
                Ok((coll, spec))
            }
            Scenario::Exchange { users, request } => {
                let r = telephone_exchange(users, request)?;
                Ok((r.collection, r.spec))
            }
        }
    }

    pub fn run(&self) -> Result<Vec<OutcomeRecord>> {
        let (coll, spec) = self.resolve()?;
        Ok(enumerate_outcomes(&coll, &spec)?.iter().map(OutcomeRecord::from).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub basis_particles: Vec<ParticleId>,
    pub basis_bits: Vec<u8>,
    pub basis_sign: Sign,
    pub probability: f64,
    pub residual: Option<CatSpec>,
    pub untouched: Vec<CatSpec>,
}

impl From<&SwapOutcome> for OutcomeRecord {
    fn from(o: &SwapOutcome) -> Self {
        Self {
            basis_particles: o.basis.particles().to_vec(),
            basis_bits: o.basis.bits().to_vec(),
            basis_sign: o.basis.sign(),
            probability: o.probability,
            residual: o.residual.as_ref().map(CatSpec::from),
            untouched: o.untouched.iter().map(CatSpec::from).collect(),
        }
    }
}

/// Random disjoint cats with shuffled particle ids and a random nonempty
/// selection.
pub fn random_scenario<R: Rng + ?Sized>(
    rng: &mut R,
    max_particles: usize,
    max_cats: usize,
) -> (CatCollection, MeasurementSpec) {
    let cat_count = rng.random_range(1..=max_cats.min(max_particles).max(1));
    let total = rng.random_range(cat_count..=max_particles.max(cat_count));
    let mut sizes = vec![1usize; cat_count];
    for _ in cat_count..total {
        let k = rng.random_range(0..cat_count);
        sizes[k] += 1;
    }
    let mut ids: Vec<ParticleId> = (0..(2 * total) as ParticleId).collect();
    ids.shuffle(rng);
    ids.truncate(total);
    let mut cats = Vec::with_capacity(cat_count);
    let mut cursor = 0;
    for &size in &sizes {
        let particles = &ids[cursor..cursor + size];
        cursor += size;
        let bits: Vec<u8> = (0..size).map(|_| rng.random_range(0..=1u8)).collect();
        let sign = if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus };
        cats.push(CatState::new(particles, &bits, sign).expect("distinct ids"));
    }
    let mut selected: Vec<ParticleId> = ids.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
    if selected.is_empty() {
        selected.push(ids[rng.random_range(0..total)]);
    }
    (
        CatCollection::new(cats).expect("disjoint"),
        MeasurementSpec::new(selected).expect("nonempty"),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn json_round_trip() {
        let text = r#"{"cats":[{"particles":[1,2],"bits":[0,0],"sign":"+"},
                               {"particles":[3,4],"bits":[0,1],"sign":"-"}],
                       "measure":[2,3]}"#;
        let sc = Scenario::from_json(text).unwrap();
        let out = sc.run().unwrap();
        assert_eq!(out.len(), 4);
        let json = serde_json::to_string(&out).unwrap();
        assert!(json.contains("\"basis_sign\":\"+\""));
        let back: Vec<OutcomeRecord> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, out);
    }

    #[test]
    fn exchange_scenario() {
        let sc = Scenario::from_json(r#"{"users":["A","B","C"],"request":["A","C"]}"#).unwrap();
        let out = sc.run().unwrap();
        assert!(out.iter().all(|o| o.residual.as_ref().unwrap().particles == vec![1, 6]));
    }

    #[test]
    fn malformed_scenarios() {
        assert!(matches!(Scenario::from_json("{}"), Err(Error::Input(_))));
        let bad = r#"{"cats":[{"particles":[1],"bits":[0],"sign":"+"}],"measure":[9]}"#;
        assert_eq!(
            Scenario::from_json(bad).unwrap().run().unwrap_err(),
            Error::UnknownParticle(9)
        );
    }

    #[test]
    fn random_scenarios_respect_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let (coll, spec) = random_scenario(&mut rng, 12, 4);
            assert!(coll.particle_count() <= 12);
            assert!(coll.cats().len() <= 4);
            assert!(spec.validate(&coll).is_ok());
        }
    }
}
