//! Damped Jaynes-Cummings dynamics of a trapped-ion qubit.
//!
//! The qubit couples to one motional mode through `H = g (a S+ + a† S-)`
//! (with hbar = 1 inside this module). Dephasing inside each dressed doublet
//! is introduced through one of two reservoir couplings, selected by
//! [`CouplingModel`]. Dimensionless time is `g t` throughout.
//!
//! The doublet `n` is spanned by `|up, n>` and `|down, n+1>`. The initial
//! motional weight `p_n` of a [`VibrationalDistribution`] populates the
//! doublet `n`, so the lower-state population oscillates at `B_n` with
//! `B_n -> 2 g sqrt(n+1)` in the undamped limit.

mod oracle;

pub use oracle::{dephasing_oracle_evolve, undamped_state, DephasingOracle, OracleSample};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::{CVector, PureState};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant, J/K.
pub const K_BOLTZMANN: f64 = 1.380_649e-23;

/// Tail probability allowed beyond the truncation of a distribution.
pub const TAIL_MASS: f64 = 1e-8;
/// Motional levels kept above the last populated one.
pub const GUARD_LEVELS: usize = 2;

/// Internal-state index of `|down>` in the (internal, motional) product basis.
pub const DOWN: usize = 0;
/// Internal-state index of `|up>`.
pub const UP: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingModel {
    /// Reservoir coupled through `a S+ + a† S-` (laser intensity noise).
    ImperfectDipole,
    /// Reservoir coupled through `a† a` (trap potential noise).
    TrapFluctuation,
}

impl CouplingModel {
    /// Exponent of `(n + 1)` in the high-temperature normalized rate.
    pub fn rate_exponent(self, d: f64) -> f64 {
        match self {
            CouplingModel::ImperfectDipole => (d + 1.0) / 2.0,
            CouplingModel::TrapFluctuation => (d - 1.0) / 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceParams {
    /// Rabi scale in rad/s. Only dimensional operations use it.
    pub g: f64,
    /// Normalized base rate `gamma_0 / g`.
    pub gamma0_tilde: f64,
    /// Reservoir spectral exponent.
    pub d: f64,
    /// Reservoir temperature in kelvin.
    pub temperature: Option<f64>,
    /// Prefactor of `kappa(n) = kappa0 (n+1)^(d/2)` in rad/s. When absent it
    /// is calibrated so the high-temperature rate at `n = 0` equals
    /// `gamma0_tilde * g`.
    pub kappa0: Option<f64>,
}

impl DecoherenceParams {
    pub fn normalized(gamma0_tilde: f64, d: f64) -> Result<Self> {
        let p = Self {
            g: 1.0,
            gamma0_tilde,
            d,
            temperature: None,
            kappa0: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma0_tilde >= 0.0) || !self.gamma0_tilde.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gamma0_tilde must be >= 0, got {}",
                self.gamma0_tilde
            )));
        }
        if !self.d.is_finite() {
            return Err(Error::InvalidParameter("d must be finite".into()));
        }
        Ok(())
    }

    fn require_g(&self) -> Result<()> {
        if self.g > 0.0 && self.g.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("g must be > 0, got {}", self.g)))
        }
    }

    fn require_temperature(&self) -> Result<f64> {
        match self.temperature {
            Some(t) if t > 0.0 && t.is_finite() => Ok(t),
            _ => Err(Error::MissingTemperature),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum VibrationalDistribution {
    Fock { n: usize },
    /// Poissonian occupation with mean `mean_n = |alpha|^2`.
    Coherent { mean_n: f64 },
    /// Bose-Einstein occupation with mean `mean_n`.
    Thermal { mean_n: f64 },
}

impl VibrationalDistribution {
    /// Occupation probabilities `p_0 ..= p_nmax`, truncated at the first
    /// `n_max` whose tail mass falls below [`TAIL_MASS`] and renormalized.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let mut p = self.truncated()?;
        let total: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= total);
        Ok(p)
    }

    fn truncated(&self) -> Result<Vec<f64>> {
        match *self {
            VibrationalDistribution::Fock { n } => {
                let mut p = vec![0.0; n + 1];
                p[n] = 1.0;
                Ok(p)
            }
            VibrationalDistribution::Coherent { mean_n } => {
                check_mean(mean_n)?;
                let mut p = vec![(-mean_n).exp()];
                let mut cumulative = p[0];
                while 1.0 - cumulative >= TAIL_MASS {
                    let k = p.len() as f64;
                    let next = p[p.len() - 1] * mean_n / k;
                    cumulative += next;
                    p.push(next);
                    if p.len() > 100_000 {
                        return Err(Error::InvalidParameter("mean_n too large".into()));
                    }
                }
                Ok(p)
            }
            VibrationalDistribution::Thermal { mean_n } => {
                check_mean(mean_n)?;
                let ratio = mean_n / (1.0 + mean_n);
                let mut p = vec![1.0 / (1.0 + mean_n)];
                // tail beyond n is ratio^(n+1)
                while ratio.powi(p.len() as i32) >= TAIL_MASS {
                    p.push(p[p.len() - 1] * ratio);
                    if p.len() > 100_000 {
                        return Err(Error::InvalidParameter("mean_n too large".into()));
                    }
                }
                Ok(p)
            }
        }
    }

    /// Number of motional levels needed to represent every populated doublet
    /// plus the guard levels.
    pub fn motional_levels(&self) -> Result<usize> {
        let n_max = self.probabilities()?.len() - 1;
        Ok(n_max + 2 + GUARD_LEVELS)
    }

    /// Parses `fock:N`, `coherent:MEAN` or `thermal:MEAN`.
    pub fn parse(spec: &str) -> Result<Self> {
        let (kind, value) = spec
            .split_once(':')
            .ok_or_else(|| Error::Input(format!("distribution '{spec}' is not KIND:VALUE")))?;
        let bad = || Error::Input(format!("bad distribution value in '{spec}'"));
        match kind.trim().to_ascii_lowercase().as_str() {
            "fock" => Ok(Self::Fock {
                n: value.trim().parse().map_err(|_| bad())?,
            }),
            "coherent" => Ok(Self::Coherent {
                mean_n: value.trim().parse().map_err(|_| bad())?,
            }),
            "thermal" => Ok(Self::Thermal {
                mean_n: value.trim().parse().map_err(|_| bad())?,
            }),
            other => Err(Error::Input(format!("unknown distribution kind '{other}'"))),
        }
    }
}

fn check_mean(mean_n: f64) -> Result<()> {
    if mean_n >= 0.0 && mean_n.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "mean occupation must be >= 0, got {mean_n}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DressedLabel {
    pub n: usize,
    pub branch: Branch,
}

impl DressedLabel {
    /// Eigenvalue of `H / (hbar g)`.
    pub fn energy(&self) -> f64 {
        self.branch.sign() * ((self.n + 1) as f64).sqrt()
    }
}

/// Product-basis index of `|internal, m>` with `levels` motional levels.
pub fn basis_index(internal: usize, m: usize, levels: usize) -> usize {
    internal * levels + m
}

/// Dressed doublet `n` as `(|n,+>, |n,->)` with
/// `|n,±> = (|up,n> ± |down,n+1>)/sqrt(2)`, embedded in a space with
/// `levels` motional levels.
pub fn dressed_states(n: usize, levels: usize) -> Result<(PureState, PureState)> {
    if levels < n + 2 {
        return Err(Error::TruncationTooSmall { n, n_max: levels });
    }
    let dim = 2 * levels;
    let build = |sign: f64| {
        let mut v = CVector::zeros(dim);
        v[basis_index(UP, n, levels)] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        v[basis_index(DOWN, n + 1, levels)] = Complex64::new(sign * FRAC_1_SQRT_2, 0.0);
        PureState::new(v, vec![2, levels])
    };
    Ok((build(1.0)?, build(-1.0)?))
}

/// Mean reservoir occupation at the doublet splitting `2 hbar g sqrt(n+1)`.
pub fn mean_reservoir_occupation(n: usize, params: &DecoherenceParams) -> Result<f64> {
    params.require_g()?;
    let t = params.require_temperature()?;
    let x = 2.0 * HBAR * params.g * ((n + 1) as f64).sqrt() / (K_BOLTZMANN * t);
    Ok(1.0 / x.exp_m1())
}

/// Normalized dephasing rate `A_n / g` in the high-temperature limit.
pub fn damping_rate_normalized(model: CouplingModel, n: usize, params: &DecoherenceParams) -> f64 {
    params.gamma0_tilde * ((n + 1) as f64).powf(model.rate_exponent(params.d))
}

/// Calibrated `kappa0` (rad/s) reproducing `gamma0_tilde * g` at `n = 0` in
/// the high-temperature limit.
pub fn calibrated_kappa0(model: CouplingModel, params: &DecoherenceParams) -> Result<f64> {
    params.require_g()?;
    let t = params.require_temperature()?;
    let base = 2.0 * HBAR * params.g * params.g * params.gamma0_tilde / (K_BOLTZMANN * t);
    Ok(match model {
        CouplingModel::ImperfectDipole => base,
        CouplingModel::TrapFluctuation => 2.0 * base,
    })
}

/// Dimensional dephasing rate in rad/s at finite temperature.
pub fn damping_rate_dimensional(
    model: CouplingModel,
    n: usize,
    params: &DecoherenceParams,
) -> Result<f64> {
    let occupation = mean_reservoir_occupation(n, params)?;
    let kappa0 = match params.kappa0 {
        Some(k) => k,
        None => calibrated_kappa0(model, params)?,
    };
    let kappa = kappa0 * ((n + 1) as f64).powf(params.d / 2.0);
    let bath = occupation + 0.5;
    Ok(match model {
        CouplingModel::ImperfectDipole => (n + 1) as f64 * kappa * bath,
        CouplingModel::TrapFluctuation => 0.5 * kappa * bath,
    })
}

/// `B_n = sqrt(4 g^2 (n+1) - A_n^2)`; fails outside the underdamped regime.
pub fn coherent_frequency(n: usize, g: f64, rate: f64) -> Result<f64> {
    let limit = 2.0 * g * ((n + 1) as f64).sqrt();
    if rate.abs() >= limit {
        return Err(Error::Overdamped { rate, limit });
    }
    Ok((limit * limit - rate * rate).sqrt())
}

/// Lower-state population `P_down(gt)` from the analytic dressed-state
/// solution. `grid` is in units of `g t`.
///
/// Doublets past the overdamped boundary (unreachable for realistic rates)
/// contribute `cosh(k t) e^{-A t}` with `k = sqrt(A^2 - 4(n+1))`.
pub fn population_lower(
    grid: &[f64],
    dist: &VibrationalDistribution,
    params: &DecoherenceParams,
    model: CouplingModel,
) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    params.validate()?;
    let probs = dist.probabilities()?;
    let terms: Vec<(f64, f64, f64)> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(n, &p)| {
            let a = damping_rate_normalized(model, n, params);
            let w2 = 4.0 * (n + 1) as f64 - a * a;
            (p, a, w2)
        })
        .collect();
    Ok(grid
        .iter()
        .map(|&t| {
            let sum: f64 = terms
                .iter()
                .map(|&(p, a, w2)| {
                    if w2 >= 0.0 {
                        p * (w2.sqrt() * t).cos() * (-a * t).exp()
                    } else {
                        let k = (-w2).sqrt();
                        0.5 * p * (((k - a) * t).exp() + ((-k - a) * t).exp())
                    }
                })
                .sum();
            0.5 * (1.0 + sum)
        })
        .collect())
}

/// Least-squares fit of `ln A = ln gamma0 + x ln(1+n)`; returns `(gamma0, x)`.
pub fn fit_rate_exponent(rates: &[(usize, f64)]) -> Result<(f64, f64)> {
    if rates.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: rates.len(),
        });
    }
    if let Some(&(n, a)) = rates.iter().find(|(_, a)| !(*a > 0.0)) {
        return Err(Error::NonPositiveRate(a, n));
    }
    let pts: Vec<(f64, f64)> = rates
        .iter()
        .map(|&(n, a)| (((n + 1) as f64).ln(), a.ln()))
        .collect();
    let (intercept, slope) = linear_fit(&pts)?;
    Ok((intercept.exp(), slope))
}

/// Ordinary least squares `y = c + m x`; returns `(c, m)`.
pub(crate) fn linear_fit(pts: &[(f64, f64)]) -> Result<(f64, f64)> {
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter(
            "fit needs at least two distinct abscissae".into(),
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok((my - slope * mx, slope))
}

/// Decay rate of the oscillation envelope of `P_down`: fits the logarithm
/// of the local maxima of `|2 P - 1|` against time.
pub fn fit_envelope_rate(grid: &[f64], p_down: &[f64]) -> Result<f64> {
    let x: Vec<f64> = p_down.iter().map(|p| (2.0 * p - 1.0).abs()).collect();
    let peaks: Vec<(f64, f64)> = (1..x.len().saturating_sub(1))
        .filter(|&i| x[i] > x[i - 1] && x[i] >= x[i + 1] && x[i] > 1e-12)
        .map(|i| (grid[i], x[i].ln()))
        .collect();
    if peaks.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: peaks.len(),
        });
    }
    Ok(-linear_fit(&peaks)?.1)
}

/// Uniform grid `0, dt, ..., t_max` with `steps + 1` points.
pub fn uniform_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps)
        .map(|i| t_max * i as f64 / steps as f64)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::CMatrix;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    /// `H / (hbar g)` in the product basis, built independently of the oracle.
    fn jc_hamiltonian(levels: usize) -> CMatrix {
        let mut h = CMatrix::zeros(2 * levels, 2 * levels);
        for m in 0..levels - 1 {
            let c = Complex64::new(((m + 1) as f64).sqrt(), 0.0);
            let up = basis_index(UP, m, levels);
            let down = basis_index(DOWN, m + 1, levels);
            h[(up, down)] = c;
            h[(down, up)] = c;
        }
        h
    }

    #[test]
    fn ground_doublet() {
        let (plus, minus) = dressed_states(0, 3).unwrap();
        assert!(plus.inner(&minus).norm() < 1e-12);
        let h = jc_hamiltonian(3);
        let hp = &h * plus.amplitudes();
        assert!((hp - plus.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn dressed_eigenvalues_follow_sqrt_law() {
        let levels = 9;
        let h = jc_hamiltonian(levels);
        for n in 0..levels - 1 {
            let (plus, minus) = dressed_states(n, levels).unwrap();
            let e = ((n + 1) as f64).sqrt();
            assert!((&h * plus.amplitudes() - plus.amplitudes().scale(e)).norm() < 1e-10);
            assert!((&h * minus.amplitudes() + minus.amplitudes().scale(e)).norm() < 1e-10);
        }
        let label = DressedLabel {
            n: 3,
            branch: Branch::Minus,
        };
        assert_eq!(label.energy(), -2.0);
    }

    #[test]
    fn dressed_truncation_error() {
        assert_eq!(
            dressed_states(4, 5).unwrap_err(),
            Error::TruncationTooSmall { n: 4, n_max: 5 }
        );
    }

    fn thermal_params(t: f64) -> DecoherenceParams {
        DecoherenceParams {
            g: 2.0 * std::f64::consts::PI * 1e5,
            gamma0_tilde: 0.127,
            d: 0.4,
            temperature: Some(t),
            kappa0: None,
        }
    }

    #[test]
    fn occupation_limits() {
        let mut p = thermal_params(1e-9);
        assert!(mean_reservoir_occupation(0, &p).unwrap() < 1e-12);

        // choose T so that 2 hbar g sqrt(n+1) / kT = ln 2
        let n = 3;
        p.temperature = Some(2.0 * HBAR * p.g * 2.0 / (K_BOLTZMANN * std::f64::consts::LN_2));
        assert_relative_eq!(mean_reservoir_occupation(n, &p).unwrap(), 1.0, epsilon = 1e-12);

        let x = 2.0 * HBAR * p.g * 2.0;
        p.temperature = Some(100.0 * x / K_BOLTZMANN);
        let occ = mean_reservoir_occupation(n, &p).unwrap();
        assert!((occ * x / (K_BOLTZMANN * p.temperature.unwrap()) - 1.0).abs() < 0.01);

        p.temperature = None;
        assert_eq!(mean_reservoir_occupation(0, &p), Err(Error::MissingTemperature));
    }

    #[test]
    fn occupation_increases_with_temperature() {
        let mut last = 0.0;
        for t in [1e-7, 1e-6, 1e-5, 1e-4, 1e-3] {
            let occ = mean_reservoir_occupation(2, &thermal_params(t)).unwrap();
            assert!(occ > last);
            last = occ;
        }
    }

    #[test]
    fn normalized_rates() {
        let p = DecoherenceParams::normalized(0.127, 0.4).unwrap();
        for model in [CouplingModel::ImperfectDipole, CouplingModel::TrapFluctuation] {
            assert_eq!(damping_rate_normalized(model, 0, &p), 0.127);
        }
        // 0.127 * 4^0.7
        let di = damping_rate_normalized(CouplingModel::ImperfectDipole, 3, &p);
        assert_relative_eq!(di, 0.335_155_009_336_315, epsilon = 1e-12);
        let pv = DecoherenceParams::normalized(0.127, 2.4).unwrap();
        let vi = damping_rate_normalized(CouplingModel::TrapFluctuation, 3, &pv);
        assert_relative_eq!(vi, di, epsilon = 1e-14);
    }

    #[test]
    fn dimensional_rate_ratio_and_floor() {
        let mut p = thermal_params(1e-3);
        p.kappa0 = Some(1234.5);
        for n in 0..6 {
            let di = damping_rate_dimensional(CouplingModel::ImperfectDipole, n, &p).unwrap();
            let vi = damping_rate_dimensional(CouplingModel::TrapFluctuation, n, &p).unwrap();
            assert_relative_eq!(di / vi, 2.0 * (n + 1) as f64, epsilon = 1e-12);
        }
        p.temperature = Some(1e-12);
        let floor = damping_rate_dimensional(CouplingModel::ImperfectDipole, 0, &p).unwrap();
        assert_relative_eq!(floor, 1234.5 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn dimensional_matches_normalized_at_high_temperature() {
        let mut p = thermal_params(1.0);
        // kT / (hbar g) ~ 2e4: deep in the classical-noise regime
        p.temperature = Some(1e4 * HBAR * p.g / K_BOLTZMANN);
        for (model, d) in [
            (CouplingModel::ImperfectDipole, 0.4),
            (CouplingModel::TrapFluctuation, 2.4),
        ] {
            p.d = d;
            for n in 0..8 {
                let dim = damping_rate_dimensional(model, n, &p).unwrap() / p.g;
                let norm = damping_rate_normalized(model, n, &p);
                assert_relative_eq!(dim, norm, max_relative = 1e-6);
            }
        }
    }

    #[test]
    fn coherent_frequency_cases() {
        assert_eq!(coherent_frequency(3, 1.0, 0.0).unwrap(), 4.0);
        assert!(matches!(
            coherent_frequency(0, 1.0, 2.0),
            Err(Error::Overdamped { .. })
        ));
        // sqrt(4 - 0.254^2)
        assert_relative_eq!(
            coherent_frequency(0, 1.0, 0.254).unwrap(),
            1.983_805_434_008_083,
            epsilon = 1e-12
        );
    }

    #[test]
    fn population_starts_at_one() {
        let p = DecoherenceParams::normalized(0.127, 0.4).unwrap();
        for dist in [
            VibrationalDistribution::Fock { n: 2 },
            VibrationalDistribution::Coherent { mean_n: 3.0 },
            VibrationalDistribution::Thermal { mean_n: 1.5 },
        ] {
            let v = population_lower(&[0.0], &dist, &p, CouplingModel::ImperfectDipole).unwrap();
            assert!((v[0] - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn undamped_fock_is_pure_rabi() {
        let p = DecoherenceParams::normalized(0.0, 0.4).unwrap();
        for n in 0..5 {
            let dist = VibrationalDistribution::Fock { n };
            let w = 2.0 * ((n + 1) as f64).sqrt();
            let grid = uniform_grid(10.0, 200);
            let v = population_lower(&grid, &dist, &p, CouplingModel::ImperfectDipole).unwrap();
            for (t, pv) in grid.iter().zip(&v) {
                assert!((pv - 0.5 * (1.0 + (w * t).cos())).abs() < 1e-14);
            }
            let zero = std::f64::consts::PI / (2.0 * ((n + 1) as f64).sqrt());
            let at = population_lower(&[zero], &dist, &p, CouplingModel::ImperfectDipole).unwrap();
            assert!(at[0].abs() < 1e-14);
        }
    }

    #[test]
    fn coherent_collapse_by_gt_15() {
        let p = DecoherenceParams::normalized(0.127, 0.4).unwrap();
        let dist = VibrationalDistribution::Coherent { mean_n: 3.0 };
        let early = population_lower(&uniform_grid(2.0, 400), &dist, &p, CouplingModel::ImperfectDipole)
            .unwrap();
        let late: Vec<f64> = (0..400).map(|i| 15.0 + 10.0 * i as f64 / 400.0).collect();
        let late = population_lower(&late, &dist, &p, CouplingModel::ImperfectDipole).unwrap();
        let swing = |v: &[f64]| {
            v.iter().cloned().fold(f64::MIN, f64::max) - v.iter().cloned().fold(f64::MAX, f64::min)
        };
        assert!(swing(&early) > 0.5);
        assert!(swing(&late) < 0.05, "late swing {}", swing(&late));
    }

    #[test]
    fn population_empty_grid() {
        let p = DecoherenceParams::normalized(0.1, 0.4).unwrap();
        assert_eq!(
            population_lower(&[], &VibrationalDistribution::Fock { n: 0 }, &p, CouplingModel::ImperfectDipole),
            Err(Error::EmptyGrid)
        );
    }

    #[test]
    fn fit_recovers_power_law() {
        let rates: Vec<(usize, f64)> = (0..9)
            .map(|n| (n, 0.127 * ((n + 1) as f64).powf(0.7)))
            .collect();
        let (g0, x) = fit_rate_exponent(&rates).unwrap();
        assert!((g0 - 0.127).abs() < 1e-10);
        assert!((x - 0.7).abs() < 1e-10);
    }

    #[test]
    fn fit_errors() {
        assert!(matches!(
            fit_rate_exponent(&[(0, 1.0), (1, 2.0)]),
            Err(Error::TooFewPoints { .. })
        ));
        assert_eq!(
            fit_rate_exponent(&[(0, 1.0), (1, 0.0), (2, 3.0)]),
            Err(Error::NonPositiveRate(0.0, 1))
        );
    }

    #[test]
    fn distribution_tails() {
        for dist in [
            VibrationalDistribution::Coherent { mean_n: 3.0 },
            VibrationalDistribution::Coherent { mean_n: 0.0 },
            VibrationalDistribution::Thermal { mean_n: 2.0 },
        ] {
            let p = dist.probabilities().unwrap();
            assert!(p.iter().all(|&x| x >= 0.0));
            let total: f64 = p.iter().sum();
            assert!(total >= 1.0 - 1e-8 && total <= 1.0 + 1e-12, "{total}");
        }
        assert!(VibrationalDistribution::Thermal { mean_n: -1.0 }
            .probabilities()
            .is_err());
    }

    #[test]
    fn distribution_parsing() {
        assert_eq!(
            VibrationalDistribution::parse("coherent:3.0").unwrap(),
            VibrationalDistribution::Coherent { mean_n: 3.0 }
        );
        assert_eq!(
            VibrationalDistribution::parse("fock:2").unwrap(),
            VibrationalDistribution::Fock { n: 2 }
        );
        assert!(VibrationalDistribution::parse("squeezed:1").is_err());
        assert!(VibrationalDistribution::parse("fock").is_err());
    }

    proptest! {
        #[test]
        fn population_stays_in_unit_interval(
            gamma in 0.0f64..0.5,
            d in 0.0f64..3.0,
            mean in 0.0f64..6.0,
            thermal in any::<bool>(),
            t in 0.0f64..40.0,
        ) {
            let p = DecoherenceParams::normalized(gamma, d).unwrap();
            let dist = if thermal {
                VibrationalDistribution::Thermal { mean_n: mean }
            } else {
                VibrationalDistribution::Coherent { mean_n: mean }
            };
            for model in [CouplingModel::ImperfectDipole, CouplingModel::TrapFluctuation] {
                let v = population_lower(&[t], &dist, &p, model).unwrap()[0];
                prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v), "{}", v);
            }
        }

        #[test]
        fn exponent_identity(gamma in 0.01f64..1.0, d in -0.5f64..4.0) {
            let p = DecoherenceParams::normalized(gamma, d).unwrap();
            for model in [CouplingModel::ImperfectDipole, CouplingModel::TrapFluctuation] {
                let rates: Vec<(usize, f64)> =
                    (0..=8).map(|n| (n, damping_rate_normalized(model, n, &p))).collect();
                let (_, x) = fit_rate_exponent(&rates).unwrap();
                prop_assert!((x - model.rate_exponent(d)).abs() < 1e-9);
            }
        }
    }
}
