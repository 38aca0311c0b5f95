use std::collections::BTreeSet;

use serde::Serialize;

use super::cat::{make_bell, CatCollection, MeasurementSpec, ParticleId, Sign};
use super::engine::{enumerate_outcomes, SwapOutcome};
use crate::error::{Error, Result};

pub const EXCHANGE_OWNER: &str = "exchange";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserLink {
    pub user: String,
    pub user_particle: ParticleId,
    pub exchange_particle: ParticleId,
}

/// Star network: user `k` shares the Bell pair `(2k+1, 2k+2)` with the
/// central exchange. The first user keeps the odd particle and every later
/// user keeps the even one, so four users A..D hold 1, 4, 6, 8.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TelephoneExchange {
    links: Vec<UserLink>,
}

impl TelephoneExchange {
    pub fn new<S: AsRef<str>>(users: &[S]) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut links = Vec::with_capacity(users.len());
        for (k, name) in users.iter().enumerate() {
            let name = name.as_ref().to_string();
            if !seen.insert(name.clone()) {
                return Err(Error::DuplicateUser(name));
            }
            let (low, high) = (2 * k as ParticleId + 1, 2 * k as ParticleId + 2);
            let (user_particle, exchange_particle) = if k == 0 { (low, high) } else { (high, low) };
            links.push(UserLink {
                user: name,
                user_particle,
                exchange_particle,
            });
        }
        if links.is_empty() {
            return Err(Error::InvalidParameter("at least one user is required".into()));
        }
        Ok(Self { links })
    }

    pub fn links(&self) -> &[UserLink] {
        &self.links
    }

    pub fn link(&self, user: &str) -> Result<&UserLink> {
        self.links
            .iter()
            .find(|l| l.user == user)
            .ok_or_else(|| Error::UnknownUser(user.to_string()))
    }

    pub fn owner_of(&self, particle: ParticleId) -> Option<&str> {
        self.links.iter().find_map(|l| {
            if l.user_particle == particle {
                Some(l.user.as_str())
            } else if l.exchange_particle == particle {
                Some(EXCHANGE_OWNER)
            } else {
                None
            }
        })
    }

    /// All pairs in `Φ⁺`.
    pub fn collection(&self) -> CatCollection {
        let cats = self
            .links
            .iter()
            .map(|l| {
                let (a, b) = (l.user_particle.min(l.exchange_particle), l.user_particle.max(l.exchange_particle));
                make_bell(a, b, 0, 0, Sign::Plus).expect("distinct particles")
            })
            .collect();
        CatCollection::new(cats).expect("pairs are disjoint")
    }

    /// Exchange-side particles of the requested users.
    pub fn measurement<S: AsRef<str>>(&self, request: &[S]) -> Result<MeasurementSpec> {
        if request.is_empty() {
            return Err(Error::EmptySelection);
        }
        let ids = request
            .iter()
            .map(|u| self.link(u.as_ref()).map(|l| l.exchange_particle))
            .collect::<Result<Vec<_>>>()?;
        MeasurementSpec::new(ids)
    }

    pub fn connect<S: AsRef<str>>(&self, request: &[S]) -> Result<ExchangeResult> {
        let coll = self.collection();
        let spec = self.measurement(request)?;
        let mut user_particles: Vec<ParticleId> = request
            .iter()
            .map(|u| self.link(u.as_ref()).map(|l| l.user_particle))
            .collect::<Result<_>>()?;
        user_particles.sort_unstable();
        user_particles.dedup();
        let outcomes = enumerate_outcomes(&coll, &spec)?;
        Ok(ExchangeResult {
            measured: spec.selected().iter().copied().collect(),
            user_particles,
            collection: coll,
            spec,
            outcomes,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ExchangeResult {
    pub measured: Vec<ParticleId>,
    pub user_particles: Vec<ParticleId>,
    pub collection: CatCollection,
    pub spec: MeasurementSpec,
    pub outcomes: Vec<SwapOutcome>,
}

impl ExchangeResult {
    /// True when every outcome leaves exactly the requested users' particles
    /// in one cat.
    pub fn users_share_cat(&self) -> bool {
        self.outcomes.iter().all(|o| {
            o.residual
                .as_ref()
                .is_some_and(|r| r.particles() == self.user_particles.as_slice())
        })
    }
}

/// Builds the exchange and connects the requested users.
pub fn telephone_exchange<S: AsRef<str>, T: AsRef<str>>(users: &[S], request: &[T]) -> Result<ExchangeResult> {
    TelephoneExchange::new(users)?.connect(request)
}
