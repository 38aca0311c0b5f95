//! Relative entropy of entanglement for bipartite states.
//!
//! `E(σ) = min_{ρ separable} S(σ‖ρ)` is estimated by minimizing over convex
//! mixtures of `K` product pure states. Weights are a softmax of free logits
//! and each local state is an unnormalized complex vector, so the search is
//! unconstrained and runs through L-BFGS from several starting points. The
//! first start is the product of the marginals, which bounds the result from
//! above by `S(σ‖σ_A⊗σ_B)`.

mod axioms;
mod io;
pub mod lbfgs;

use std::f64::consts::LN_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::quantum::entropy::cross_entropy;
use crate::quantum::linalg::{neg_log_gradient, HermitianEigen};
use crate::quantum::{
    quantum_relative_entropy, von_neumann_entropy, CMatrix, CVector, DensityOperator, PureState,
};

pub use axioms::{
    axiom_harness, random_local_instrument, AxiomCheck, AxiomReport, EntanglementMeasure, HarnessConfig,
    RelativeEntropyMeasure,
};
pub use io::{DensityInput, ReeOutput};
use lbfgs::{minimize, LbfgsConfig};

pub const MAX_TOTAL_DIM: usize = 16;
const GRADIENT_FLOOR: f64 = 1e-15;
const PURITY_TOL: f64 = 1e-10;

/// `Σ_k w_k |a_k⟩⟨a_k| ⊗ |b_k⟩⟨b_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableAnsatz {
    weights: Vec<f64>,
    locals: Vec<(CVector, CVector)>,
    dims: [usize; 2],
}

impl SeparableAnsatz {
    pub fn new(weights: Vec<f64>, locals: Vec<(CVector, CVector)>, dims: [usize; 2]) -> Result<Self> {
        if weights.len() != locals.len() || weights.is_empty() {
            return Err(Error::InvalidParameter("one weight per product term is required".into()));
        }
        if weights.iter().any(|&w| !(w >= 0.0)) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::BadTrace(total));
        }
        for (a, b) in &locals {
            if a.len() != dims[0] || b.len() != dims[1] {
                return Err(Error::DimensionMismatch(a.len() * b.len(), dims[0] * dims[1]));
            }
            for v in [a, b] {
                let n = v.norm();
                if (n - 1.0).abs() > 1e-12 {
                    return Err(Error::NotNormalized(n));
                }
            }
        }
        Ok(Self { weights, locals, dims })
    }

    /// Random mixture of `terms` Haar-random product states with
    /// Dirichlet(1) weights.
    pub fn random<R: Rng + ?Sized>(dims: [usize; 2], terms: usize, rng: &mut R) -> Self {
        let raw: Vec<f64> = (0..terms.max(1)).map(|_| -rng.random::<f64>().max(1e-300).ln()).collect();
        let total: f64 = raw.iter().sum();
        let weights = raw.iter().map(|w| w / total).collect();
        let locals = (0..terms.max(1))
            .map(|_| (random_unit(dims[0], rng), random_unit(dims[1], rng)))
            .collect();
        Self { weights, locals, dims }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn locals(&self) -> &[(CVector, CVector)] {
        &self.locals
    }

    pub fn dims(&self) -> [usize; 2] {
        self.dims
    }

    pub fn to_density(&self) -> DensityOperator {
        let d = self.dims[0] * self.dims[1];
        let mut m = CMatrix::zeros(d, d);
        for (w, (a, b)) in self.weights.iter().zip(&self.locals) {
            let v = product_vector(a, b);
            m += (&v * v.adjoint()).scale(*w);
        }
        DensityOperator::from_trusted(m, self.dims.to_vec())
    }
}

fn random_unit<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    let v = CVector::from_fn(d, |_, _| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let n = v.norm();
    v.unscale(n)
}

fn product_vector(a: &CVector, b: &CVector) -> CVector {
    CVector::from_fn(a.len() * b.len(), |r, _| a[r / b.len()] * b[r % b.len()])
}

#[derive(Debug, Clone)]
pub struct ReeConfig {
    /// Number of product terms; `None` picks `max(8, d_A d_B)`.
    pub terms: Option<usize>,
    pub restarts: usize,
    pub seed: u64,
    pub optimizer: LbfgsConfig,
}

impl Default for ReeConfig {
    fn default() -> Self {
        Self {
            terms: None,
            restarts: 16,
            seed: 0,
            optimizer: LbfgsConfig::default(),
        }
    }
}

impl ReeConfig {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }
}

#[derive(Debug, Clone)]
pub struct EntanglementResult {
    /// Nats.
    pub value: f64,
    pub closest_state: DensityOperator,
    pub iterations: usize,
    pub converged: bool,
    pub restarts_used: usize,
    /// Objective per accepted step of the winning restart.
    pub history: Vec<f64>,
    /// `S(σ‖σ_A⊗σ_B)`.
    pub marginal_bound: f64,
}

impl EntanglementResult {
    pub fn value_bits(&self) -> f64 {
        self.value / LN_2
    }
}

fn bipartite_dims(sigma: &DensityOperator) -> Result<[usize; 2]> {
    match sigma.dims() {
        &[a, b] => {
            if a * b > MAX_TOTAL_DIM {
                Err(Error::DimensionTooLarge(a * b, MAX_TOTAL_DIM))
            } else {
                Ok([a, b])
            }
        }
        other => Err(Error::NotBipartite(other.len())),
    }
}

struct Objective<'a> {
    sigma: &'a DensityOperator,
    neg_entropy: f64,
    dims: [usize; 2],
    terms: usize,
}

impl<'a> Objective<'a> {
    fn block(&self) -> usize {
        2 * (self.dims[0] + self.dims[1])
    }

    fn len(&self) -> usize {
        self.terms * (1 + self.block())
    }

    fn unpack(&self, x: &[f64]) -> (Vec<f64>, Vec<(CVector, CVector)>) {
        let k = self.terms;
        let max = x[..k].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let exps: Vec<f64> = x[..k].iter().map(|t| (t - max).exp()).collect();
        let z: f64 = exps.iter().sum();
        let weights = exps.iter().map(|e| e / z).collect();
        let [da, db] = self.dims;
        let raw = (0..k)
            .map(|j| {
                let off = k + j * self.block();
                let v = CVector::from_fn(da, |i, _| Complex64::new(x[off + 2 * i], x[off + 2 * i + 1]));
                let w = CVector::from_fn(db, |i, _| {
                    Complex64::new(x[off + 2 * da + 2 * i], x[off + 2 * da + 2 * i + 1])
                });
                (v, w)
            })
            .collect();
        (weights, raw)
    }

    fn pack(&self, weights: &[f64], locals: &[(CVector, CVector)]) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.len());
        x.extend(weights.iter().map(|w| (w + 1e-9).ln()));
        for (a, b) in locals {
            for c in a.iter().chain(b.iter()) {
                x.push(c.re);
                x.push(c.im);
            }
        }
        x
    }

    fn ansatz(&self, x: &[f64]) -> SeparableAnsatz {
        let (weights, raw) = self.unpack(x);
        let locals = raw
            .into_iter()
            .map(|(v, w)| {
                let (nv, nw) = (v.norm(), w.norm());
                (v.unscale(nv), w.unscale(nw))
            })
            .collect();
        SeparableAnsatz { weights, locals, dims: self.dims }
    }

    fn evaluate(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let k = self.terms;
        let [da, db] = self.dims;
        let (weights, raw) = self.unpack(x);
        let norms: Vec<(f64, f64)> = raw.iter().map(|(v, w)| (v.norm(), w.norm())).collect();
        if norms.iter().any(|&(a, b)| !(a > 1e-150 && b > 1e-150)) {
            return (f64::INFINITY, vec![0.0; x.len()]);
        }
        let units: Vec<(CVector, CVector)> = raw
            .iter()
            .zip(&norms)
            .map(|((v, w), &(nv, nw))| (v.unscale(nv), w.unscale(nw)))
            .collect();
        let d = da * db;
        let mut rho = CMatrix::zeros(d, d);
        for (w, (a, b)) in weights.iter().zip(&units) {
            let p = product_vector(a, b);
            rho += (&p * p.adjoint()).scale(*w);
        }
        let mut eig = HermitianEigen::new(&rho);
        let value = self.neg_entropy + cross_entropy(self.sigma, &eig);
        if !value.is_finite() {
            return (f64::INFINITY, vec![0.0; x.len()]);
        }
        eig.values.iter_mut().for_each(|l| *l = l.max(GRADIENT_FLOOR));
        let g = neg_log_gradient(&eig, self.sigma.matrix());

        let mut grad = vec![0.0; x.len()];
        let mut overlaps = vec![0.0; k];
        for (j, (a, b)) in units.iter().enumerate() {
            // M = <b| G |b> over B, N = <a| G |a> over A.
            let mut m = CMatrix::zeros(da, da);
            let mut n = CMatrix::zeros(db, db);
            for i in 0..da {
                for i2 in 0..da {
                    for l in 0..db {
                        for l2 in 0..db {
                            let gij = g[(i * db + l, i2 * db + l2)];
                            m[(i, i2)] += b[l].conj() * gij * b[l2];
                            n[(l, l2)] += a[i].conj() * gij * a[i2];
                        }
                    }
                }
            }
            let ma = &m * a;
            overlaps[j] = a.dotc(&ma).re;
            let nb = &n * b;
            let off = k + j * self.block();
            for (target, unit, norm, shift) in [(ma, a, norms[j].0, 0usize), (nb, b, norms[j].1, 2 * da)] {
                let ga = target.scale(2.0 * weights[j]);
                let radial = unit.dotc(&ga).re;
                for i in 0..unit.len() {
                    let gv = (ga[i] - unit[i] * radial) / norm;
                    grad[off + shift + 2 * i] = gv.re;
                    grad[off + shift + 2 * i + 1] = gv.im;
                }
            }
        }
        let mean: f64 = weights.iter().zip(&overlaps).map(|(w, o)| w * o).sum();
        for j in 0..k {
            grad[j] = weights[j] * (overlaps[j] - mean);
        }
        (value, grad)
    }
}

fn marginal_start(sigma: &DensityOperator, terms: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<f64>, Vec<(CVector, CVector)>)> {
    let ea = sigma.partial_trace(&[0])?.eigen();
    let eb = sigma.partial_trace(&[1])?.eigen();
    let mut weights = Vec::with_capacity(terms);
    let mut locals = Vec::with_capacity(terms);
    for (i, &la) in ea.values.iter().enumerate() {
        for (j, &lb) in eb.values.iter().enumerate() {
            weights.push((la * lb).max(0.0));
            locals.push((ea.vectors.column(i).into_owned(), eb.vectors.column(j).into_owned()));
        }
    }
    let dims = [ea.values.len(), eb.values.len()];
    while weights.len() < terms {
        weights.push(0.0);
        locals.push((random_unit(dims[0], rng), random_unit(dims[1], rng)));
    }
    Ok((weights, locals))
}

struct RestartRun {
    value: f64,
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

/// Minimizes `S(σ‖ρ)` over separable `ρ` for a bipartite `σ` with total
/// dimension at most 16.
pub fn relative_entropy_of_entanglement(sigma: &DensityOperator, config: &ReeConfig) -> Result<EntanglementResult> {
    let dims = bipartite_dims(sigma)?;
    let terms = config.terms.unwrap_or(8.max(dims[0] * dims[1]));
    if terms == 0 || config.restarts == 0 {
        return Err(Error::InvalidParameter("terms and restarts must be positive".into()));
    }
    let objective = Objective {
        sigma,
        neg_entropy: -von_neumann_entropy(sigma),
        dims,
        terms,
    };
    let marginals = sigma.partial_trace(&[0])?.tensor(&sigma.partial_trace(&[1])?);
    let marginal_bound = quantum_relative_entropy(sigma, &marginals)?;

    let runs: Vec<Result<RestartRun>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x9E37_79B9).wrapping_add(r as u64));
            let x0 = if r == 0 {
                let (w, l) = marginal_start(sigma, terms, &mut rng)?;
                objective.pack(&w, &l)
            } else {
                let mut x: Vec<f64> = (0..objective.len()).map(|_| rng.sample(StandardNormal)).collect();
                x[..terms].iter_mut().for_each(|t| *t *= 0.5);
                x
            };
            let out = minimize(|x| objective.evaluate(x), x0, &config.optimizer);
            Ok(RestartRun {
                value: out.value,
                x: out.x,
                iterations: out.iterations,
                converged: out.converged,
                history: out.history,
            })
        })
        .collect();
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let best = runs
        .iter()
        .enumerate()
        .filter(|(_, r)| r.value.is_finite())
        .min_by(|(i, a), (j, b)| a.value.total_cmp(&b.value).then(i.cmp(j)))
        .map(|(_, r)| r);
    let converged = runs.iter().any(|r| r.converged);
    let iterations = runs.iter().map(|r| r.iterations).sum();

    let result = match best {
        Some(run) if run.value <= marginal_bound => EntanglementResult {
            value: run.value.max(0.0),
            closest_state: objective.ansatz(&run.x).to_density(),
            iterations,
            converged,
            restarts_used: config.restarts,
            history: run.history.clone(),
            marginal_bound,
        },
        other => EntanglementResult {
            value: marginal_bound.max(0.0),
            closest_state: marginals,
            iterations,
            converged,
            restarts_used: config.restarts,
            history: other.map(|r| r.history.clone()).unwrap_or_default(),
            marginal_bound,
        },
    };
    Ok(result)
}

/// Entropy of the reduced state of a bipartite pure state.
pub fn pure_state_entanglement(psi: &PureState) -> Result<f64> {
    if psi.dims().len() != 2 {
        return Err(Error::NotBipartite(psi.dims().len()));
    }
    let norm = psi.amplitudes().norm();
    if (norm - 1.0).abs() > crate::quantum::state::NORM_TOL {
        return Err(Error::NotNormalized(norm));
    }
    let rho = psi.to_density();
    let a = von_neumann_entropy(&rho.partial_trace(&[0])?);
    let b = von_neumann_entropy(&rho.partial_trace(&[1])?);
    Ok(0.5 * (a + b))
}

/// `min S(σ‖ρ_A⊗ρ_B)` over product states, found numerically with
/// `ρ = XX†/tr(XX†)` on each side.
pub fn classical_correlations(sigma: &DensityOperator) -> Result<f64> {
    classical_correlations_with(sigma, 4, 0, &LbfgsConfig { tolerance: 1e-12, ..Default::default() })
}

pub fn classical_correlations_with(
    sigma: &DensityOperator,
    restarts: usize,
    seed: u64,
    optimizer: &LbfgsConfig,
) -> Result<f64> {
    let [da, db] = match sigma.dims() {
        &[a, b] => [a, b],
        other => return Err(Error::NotBipartite(other.len())),
    };
    let sa = sigma.partial_trace(&[0])?;
    let sb = sigma.partial_trace(&[1])?;
    let neg_entropy = -von_neumann_entropy(sigma);
    let side = |x: &[f64], d: usize, s: &DensityOperator| -> (f64, Vec<f64>) {
        let xm = CMatrix::from_fn(d, d, |i, j| Complex64::new(x[2 * (i * d + j)], x[2 * (i * d + j) + 1]));
        let gram = &xm * xm.adjoint();
        let t = gram.trace().re;
        if !(t > 1e-300) {
            return (f64::INFINITY, vec![0.0; x.len()]);
        }
        let rho = gram.unscale(t);
        let mut eig = HermitianEigen::new(&rho);
        let value = cross_entropy(s, &eig);
        if !value.is_finite() {
            return (f64::INFINITY, vec![0.0; x.len()]);
        }
        eig.values.iter_mut().for_each(|l| *l = l.max(GRADIENT_FLOOR));
        let g = neg_log_gradient(&eig, s.matrix());
        let tr_g_rho = (&g * &rho).trace().re;
        let grad_m = (&g * &xm - xm.scale(tr_g_rho)).scale(2.0 / t);
        let mut grad = Vec::with_capacity(x.len());
        for i in 0..d {
            for j in 0..d {
                grad.push(grad_m[(i, j)].re);
                grad.push(grad_m[(i, j)].im);
            }
        }
        (value, grad)
    };
    let na = 2 * da * da;
    let f = |x: &[f64]| {
        let (va, ga) = side(&x[..na], da, &sa);
        let (vb, gb) = side(&x[na..], db, &sb);
        let mut g = ga;
        g.extend(gb);
        (neg_entropy + va + vb, g)
    };
    let mut best = f64::INFINITY;
    for r in 0..restarts.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(r as u64));
        let x0: Vec<f64> = (0..na + 2 * db * db).map(|_| rng.sample(StandardNormal)).collect();
        best = best.min(minimize(f, x0, optimizer).value);
    }
    Ok(best.max(0.0))
}

/// Largest `M` with `M ln 2 <= N E(σ)`.
///
/// Pure states use the reduced-state entropy; mixed states use the numerical
/// minimum, which can only overestimate `E`.
pub fn distillation_bound(n: u64, sigma: &DensityOperator, config: &ReeConfig) -> Result<u64> {
    let eig = sigma.eigen();
    let top = *eig.values.last().expect("nonempty spectrum");
    let e = if (1.0 - top).abs() < PURITY_TOL {
        let v = eig.vectors.column(eig.values.len() - 1).into_owned();
        pure_state_entanglement(&PureState::normalized(v, sigma.dims().to_vec())?)?
    } else {
        relative_entropy_of_entanglement(sigma, config)?.value
    };
    Ok(distillation_bound_from_value(n, e))
}

pub fn distillation_bound_from_value(n: u64, e_nats: f64) -> u64 {
    let m = (n as f64 * e_nats / LN_2 * (1.0 + 1e-12)).floor();
    m.max(0.0) as u64
}
