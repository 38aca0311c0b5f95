//! Numerical master-equation integrator for the dephased Jaynes-Cummings
//! system, used to cross-check the analytic lower-state population.
//!
//! The generator is `-i[H, rho] + sum_n D[L_n] rho` with
//! `L_n = sqrt(A_n / 2) Z_n`, where `Z_n = |n,+><n,+| - |n,-><n,-|` is the
//! dressed population difference of doublet `n`. That choice makes the
//! doublet coherence `<n,+|rho|n,->` decay at exactly `A_n`. Everything is
//! expressed in the bare product basis and integrated with fixed-step RK4.

use num_complex::Complex64;

use super::{
    basis_index, damping_rate_normalized, linear_fit, CouplingModel, DecoherenceParams,
    VibrationalDistribution, DOWN, UP,
};
use crate::error::{Error, Result};
use crate::quantum::{CMatrix, DensityOperator};

/// Step size times the largest doublet frequency.
const PHASE_PER_STEP: f64 = 0.01;
const TRACE_DRIFT_LIMIT: f64 = 1e-8;

/// Sparse operator as `(row, col, value)` triples.
#[derive(Debug, Clone, Default)]
struct SparseOp {
    entries: Vec<(usize, usize, Complex64)>,
}

impl SparseOp {
    fn push(&mut self, r: usize, c: usize, v: Complex64) {
        self.entries.push((r, c, v));
    }

    /// Overwrites `out` with `self * rho` on the support of the state.
    fn left_mul_into(&self, rho: &CMatrix, support: &Support, out: &mut CMatrix) {
        for &(i, j) in &support.entries {
            out[(i, j)] = Complex64::new(0.0, 0.0);
        }
        for &(r, c, v) in &self.entries {
            for &j in &support.rows[c] {
                out[(r, j)] += v * rho[(c, j)];
            }
        }
    }

    /// Adds `self * rho * self^dagger` into `out`.
    fn sandwich_into(&self, rho: &CMatrix, out: &mut CMatrix) {
        for &(r1, c1, v1) in &self.entries {
            for &(r2, c2, v2) in &self.entries {
                out[(r1, r2)] += v1 * v2.conj() * rho[(c1, c2)];
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSample {
    /// Dimensionless time `g t`.
    pub t: f64,
    pub p_down: f64,
    pub energy: f64,
    pub trace: f64,
}

#[derive(Debug, Clone)]
pub struct DephasingOracle {
    levels: usize,
    rates: Vec<f64>,
    hamiltonian: SparseOp,
    /// `-i H - 1/2 sum L^dagger L`
    drift: SparseOp,
    jumps: Vec<SparseOp>,
    rho: CMatrix,
    t: f64,
    max_step: f64,
    support: Support,
    scratch: Rk4Scratch,
}

/// Matrix entries that can ever become nonzero under the generator, starting
/// from the initial state. Everything outside stays exactly zero.
#[derive(Debug, Clone)]
struct Support {
    entries: Vec<(usize, usize)>,
    rows: Vec<Vec<usize>>,
}

impl Support {
    fn closure(rho: &CMatrix, drift: &SparseOp, jumps: &[SparseOp]) -> Self {
        let dim = rho.nrows();
        let mut mask = vec![false; dim * dim];
        let mut queue: Vec<(usize, usize)> = Vec::new();
        let mark = |i: usize, j: usize, mask: &mut Vec<bool>, queue: &mut Vec<(usize, usize)>| {
            for (a, b) in [(i, j), (j, i)] {
                if !mask[a * dim + b] {
                    mask[a * dim + b] = true;
                    queue.push((a, b));
                }
            }
        };
        for j in 0..dim {
            for i in 0..dim {
                if rho[(i, j)] != Complex64::new(0.0, 0.0) {
                    mark(i, j, &mut mask, &mut queue);
                }
            }
        }
        while let Some((c, j)) = queue.pop() {
            for &(r, c2, _) in &drift.entries {
                if c2 == c {
                    mark(r, j, &mut mask, &mut queue);
                }
            }
            for l in jumps {
                for &(r1, c1, _) in &l.entries {
                    for &(r2, c2, _) in &l.entries {
                        if (c1, c2) == (c, j) {
                            mark(r1, r2, &mut mask, &mut queue);
                        }
                    }
                }
            }
        }
        let entries: Vec<(usize, usize)> =
            (0..dim * dim).filter(|&k| mask[k]).map(|k| (k / dim, k % dim)).collect();
        let mut rows = vec![Vec::new(); dim];
        for &(i, j) in &entries {
            rows[i].push(j);
        }
        Self { entries, rows }
    }
}

/// Stage buffers reused across RK4 steps.
#[derive(Debug, Clone)]
struct Rk4Scratch {
    k: [CMatrix; 4],
    stage: CMatrix,
    product: CMatrix,
}

impl Rk4Scratch {
    fn new(dim: usize) -> Self {
        let z = || CMatrix::zeros(dim, dim);
        Self { k: [z(), z(), z(), z()], stage: z(), product: z() }
    }
}

/// Writes the Lindblad generator applied to `rho` into `out`.
fn lindblad_into(
    drift: &SparseOp,
    jumps: &[SparseOp],
    support: &Support,
    rho: &CMatrix,
    product: &mut CMatrix,
    out: &mut CMatrix,
) {
    drift.left_mul_into(rho, support, product);
    for &(i, j) in &support.entries {
        out[(i, j)] = product[(i, j)] + product[(j, i)].conj();
    }
    for l in jumps {
        l.sandwich_into(rho, out);
    }
}

impl DephasingOracle {
    pub fn new(
        dist: &VibrationalDistribution,
        params: &DecoherenceParams,
        model: CouplingModel,
    ) -> Result<Self> {
        params.validate()?;
        let probs = dist.probabilities()?;
        let levels = dist.motional_levels()?;
        Ok(Self::with_levels(&probs, levels, params, model))
    }

    fn with_levels(
        probs: &[f64],
        levels: usize,
        params: &DecoherenceParams,
        model: CouplingModel,
    ) -> Self {
        let dim = 2 * levels;
        let doublets = levels - 1;
        let rates: Vec<f64> = (0..doublets)
            .map(|n| damping_rate_normalized(model, n, params))
            .collect();

        let mut hamiltonian = SparseOp::default();
        let mut drift = SparseOp::default();
        let mut jumps = Vec::with_capacity(doublets);
        let minus_i = Complex64::new(0.0, -1.0);
        for (n, &rate) in rates.iter().enumerate() {
            let up = basis_index(UP, n, levels);
            let down = basis_index(DOWN, n + 1, levels);
            let coupling = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
            hamiltonian.push(up, down, coupling);
            hamiltonian.push(down, up, coupling);
            drift.push(up, down, minus_i * coupling);
            drift.push(down, up, minus_i * coupling);
            if rate > 0.0 {
                // Z_n is sigma_x on {|up,n>, |down,n+1>}; Z_n^2 is the doublet projector.
                let amp = Complex64::new((rate / 2.0).sqrt(), 0.0);
                let mut z = SparseOp::default();
                z.push(up, down, amp);
                z.push(down, up, amp);
                jumps.push(z);
                let half = Complex64::new(-rate / 4.0, 0.0);
                drift.push(up, up, half);
                drift.push(down, down, half);
            }
        }

        let mut rho = CMatrix::zeros(dim, dim);
        for (n, &p) in probs.iter().enumerate() {
            let i = basis_index(DOWN, n + 1, levels);
            rho[(i, i)] = Complex64::new(p, 0.0);
        }
        let support = Support::closure(&rho, &drift, &jumps);
        let max_step = PHASE_PER_STEP / (2.0 * (doublets as f64).sqrt());
        Self {
            levels,
            rates,
            hamiltonian,
            drift,
            jumps,
            rho,
            t: 0.0,
            max_step,
            support,
            scratch: Rk4Scratch::new(dim),
        }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn step_size(&self) -> f64 {
        self.max_step
    }

    /// Dephasing rate assigned to doublet `n`.
    pub fn rate(&self, n: usize) -> Option<f64> {
        self.rates.get(n).copied()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    pub fn state(&self) -> DensityOperator {
        DensityOperator::from_trusted(self.rho.clone(), vec![2, self.levels])
    }

    fn rk4(&mut self, h: f64) {
        let Self { drift, jumps, rho, support, scratch, .. } = self;
        let Rk4Scratch { k, stage, product } = scratch;
        lindblad_into(drift, jumps, support, rho, product, &mut k[0]);
        for (i, w) in [(1, h / 2.0), (2, h / 2.0), (3, h)] {
            for &e in &support.entries {
                stage[e] = rho[e] + k[i - 1][e] * w;
            }
            lindblad_into(drift, jumps, support, stage, product, &mut k[i]);
        }
        let (sixth, third) = (h / 6.0, h / 3.0);
        for &e in &support.entries {
            rho[e] += k[0][e] * sixth + (k[1][e] + k[2][e]) * third + k[3][e] * sixth;
        }
        self.t += h;
    }

    /// Integrates forward to time `target` (which must not lie in the past).
    pub fn advance_to(&mut self, target: f64) -> Result<()> {
        let span = target - self.t;
        if span < -1e-15 || !target.is_finite() {
            return Err(Error::Integration {
                t: self.t,
                reason: format!("cannot integrate backwards to {target}"),
            });
        }
        if span <= 0.0 {
            return Ok(());
        }
        let steps = (span / self.max_step).ceil() as usize;
        let h = span / steps as f64;
        for _ in 0..steps {
            self.rk4(h);
        }
        self.t = target;
        let tr = self.trace();
        if !tr.is_finite() || (tr - 1.0).abs() > TRACE_DRIFT_LIMIT.max(1e-8) {
            return Err(Error::Integration {
                t: self.t,
                reason: format!("trace drifted to {tr} (step {h:e})"),
            });
        }
        Ok(())
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn p_down(&self) -> f64 {
        (0..self.levels)
            .map(|m| {
                let i = basis_index(DOWN, m, self.levels);
                self.rho[(i, i)].re
            })
            .sum()
    }

    /// `<H>/(hbar g)`.
    pub fn energy(&self) -> f64 {
        self.hamiltonian
            .entries
            .iter()
            .map(|&(r, c, v)| (v * self.rho[(c, r)]).re)
            .sum()
    }

    /// `<n,+| rho |n,->`.
    pub fn dressed_coherence(&self, n: usize) -> Option<Complex64> {
        if n + 2 > self.levels {
            return None;
        }
        let up = basis_index(UP, n, self.levels);
        let down = basis_index(DOWN, n + 1, self.levels);
        let r = |a: usize, b: usize| self.rho[(a, b)];
        // |±> = (|up> ± |down>)/sqrt2
        Some((r(up, up) - r(up, down) + r(down, up) - r(down, down)) * 0.5)
    }

    pub fn sample(&self) -> OracleSample {
        OracleSample {
            t: self.t,
            p_down: self.p_down(),
            energy: self.energy(),
            trace: self.trace(),
        }
    }

    /// Samples the trajectory on an increasing grid.
    pub fn run(&mut self, grid: &[f64]) -> Result<Vec<OracleSample>> {
        if grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        grid.iter()
            .map(|&t| {
                self.advance_to(t)?;
                Ok(self.sample())
            })
            .collect()
    }
}

impl DephasingOracle {
    /// Decay rate of `|<n,+| rho |n,->|`, fitted as a log-linear slope over
    /// `samples` points spanning the next `span` units of `g t`.
    pub fn coherence_decay_rate(&mut self, n: usize, span: f64, samples: usize) -> Result<f64> {
        if samples < 2 {
            return Err(Error::TooFewPoints { needed: 2, got: samples });
        }
        let start = self.t;
        let mut pts = Vec::with_capacity(samples);
        for i in 0..samples {
            let t = start + span * i as f64 / (samples - 1) as f64;
            self.advance_to(t)?;
            let c = self
                .dressed_coherence(n)
                .ok_or(Error::TruncationTooSmall { n, n_max: self.levels.saturating_sub(2) })?;
            pts.push((t, c.norm().ln()));
        }
        Ok(-linear_fit(&pts)?.1)
    }
}

/// Evolves the initial product state to `g t = t` and returns the density
/// operator on (internal, motional) with dims `[2, levels]`.
pub fn dephasing_oracle_evolve(
    dist: &VibrationalDistribution,
    params: &DecoherenceParams,
    model: CouplingModel,
    t: f64,
) -> Result<DensityOperator> {
    let mut oracle = DephasingOracle::new(dist, params, model)?;
    oracle.advance_to(t)?;
    Ok(oracle.state())
}

/// Closed-form undamped evolution: every doublet rotates as
/// `cos(w t)|down,n+1> - i sin(w t)|up,n>` with `w = sqrt(n+1)`.
pub fn undamped_state(dist: &VibrationalDistribution, t: f64) -> Result<DensityOperator> {
    let probs = dist.probabilities()?;
    let levels = dist.motional_levels()?;
    let dim = 2 * levels;
    let mut rho = CMatrix::zeros(dim, dim);
    for (n, &p) in probs.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let w = ((n + 1) as f64).sqrt();
        let mut psi = vec![Complex64::new(0.0, 0.0); dim];
        psi[basis_index(DOWN, n + 1, levels)] = Complex64::new((w * t).cos(), 0.0);
        psi[basis_index(UP, n, levels)] = Complex64::new(0.0, -(w * t).sin());
        for i in 0..dim {
            for j in 0..dim {
                rho[(i, j)] += psi[i] * psi[j].conj() * p;
            }
        }
    }
    Ok(DensityOperator::from_trusted(rho, vec![2, levels]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jc::{population_lower, uniform_grid};
    use crate::quantum::linalg::max_abs_diff;

    fn params(gamma: f64) -> DecoherenceParams {
        DecoherenceParams::normalized(gamma, 0.4).unwrap()
    }

    #[test]
    fn undamped_matches_closed_form() {
        for dist in [
            VibrationalDistribution::Fock { n: 0 },
            VibrationalDistribution::Fock { n: 3 },
            VibrationalDistribution::Thermal { mean_n: 0.5 },
        ] {
            let mut oracle =
                DephasingOracle::new(&dist, &params(0.0), CouplingModel::ImperfectDipole).unwrap();
            for t in [0.7, 3.1, 9.4] {
                oracle.advance_to(t).unwrap();
                let exact = undamped_state(&dist, t).unwrap();
                let err = max_abs_diff(oracle.matrix(), exact.matrix());
                assert!(err < 1e-8, "{dist:?} t={t} err={err:e}");
            }
        }
    }

    #[test]
    fn coherence_decays_at_rate() {
        let p = params(0.127);
        let dist = VibrationalDistribution::Fock { n: 0 };
        let mut oracle = DephasingOracle::new(&dist, &p, CouplingModel::ImperfectDipole).unwrap();
        let rate = oracle.coherence_decay_rate(0, 10.0, 21).unwrap();
        assert!((rate - 0.127).abs() / 0.127 < 0.02, "{rate}");
    }

    #[test]
    fn energy_conserved_without_dephasing() {
        let dist = VibrationalDistribution::Coherent { mean_n: 1.0 };
        let mut oracle =
            DephasingOracle::new(&dist, &params(0.0), CouplingModel::ImperfectDipole).unwrap();
        let e0 = oracle.energy();
        for s in oracle.run(&uniform_grid(5.0, 10)).unwrap() {
            assert!((s.energy - e0).abs() < 1e-9);
        }
    }

    #[test]
    fn trace_and_positivity_preserved() {
        let dist = VibrationalDistribution::Thermal { mean_n: 0.8 };
        let mut oracle =
            DephasingOracle::new(&dist, &params(0.3), CouplingModel::TrapFluctuation).unwrap();
        for t in [1.0, 4.0, 8.0] {
            oracle.advance_to(t).unwrap();
            assert!((oracle.trace() - 1.0).abs() < 1e-8);
            assert!(oracle.state().eigen().values[0] > -1e-8);
        }
    }

    #[test]
    fn p_down_tracks_analytic_envelope() {
        let p = params(0.127);
        let dist = VibrationalDistribution::Fock { n: 2 };
        let model = CouplingModel::ImperfectDipole;
        let grid = uniform_grid(12.0, 1200);
        let mut oracle = DephasingOracle::new(&dist, &p, model).unwrap();
        let numeric: Vec<f64> = oracle.run(&grid).unwrap().iter().map(|s| s.p_down).collect();
        let analytic = population_lower(&grid, &dist, &p, model).unwrap();
        let rn = crate::jc::fit_envelope_rate(&grid, &numeric).unwrap();
        let ra = crate::jc::fit_envelope_rate(&grid, &analytic).unwrap();
        assert!((rn - ra).abs() / ra < 0.05, "{rn} vs {ra}");
    }

    #[test]
    fn cannot_run_backwards() {
        let dist = VibrationalDistribution::Fock { n: 0 };
        let mut oracle =
            DephasingOracle::new(&dist, &params(0.1), CouplingModel::ImperfectDipole).unwrap();
        oracle.advance_to(1.0).unwrap();
        assert!(matches!(
            oracle.advance_to(0.5),
            Err(Error::Integration { .. })
        ));
        assert_eq!(oracle.run(&[]).unwrap_err(), Error::EmptyGrid);
    }

    #[test]
    fn evolve_returns_valid_state() {
        let rho = dephasing_oracle_evolve(
            &VibrationalDistribution::Fock { n: 1 },
            &params(0.05),
            CouplingModel::ImperfectDipole,
            2.0,
        )
        .unwrap();
        assert_eq!(rho.dims(), &[2, 5]);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }
}
