mod output;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qlimits::entanglement::{
    axiom_harness, relative_entropy_of_entanglement, AxiomReport, DensityInput, HarnessConfig, ReeConfig,
    ReeOutput, RelativeEntropyMeasure,
};
use qlimits::feasibility::{feasibility_report, parse_ion_config, FeasibilityInput};
use qlimits::jc::{population_lower, uniform_grid, CouplingModel, DecoherenceParams, DephasingOracle, VibrationalDistribution};
use qlimits::swap::{compare_with_oracle, polygon_counts, telephone_exchange, OracleComparison, OutcomeRecord, Scenario};

use output::{emit, json, sig};

#[derive(Parser, Debug)]
#[command(name = "qlimits", version, about = "Decoherence budgets, entanglement swapping and entanglement measures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lower-level population of a dephased Jaynes-Cummings ion as CSV.
    Jc(JcArgs),
    /// Decoherence-limited time and error budgets for an ion-trap computer.
    Budget(BudgetArgs),
    /// Outcome table of a cat-basis measurement described in a JSON file.
    Swap(SwapArgs),
    /// Star network of Bell pairs connected by one measurement at the hub.
    Exchange(ExchangeArgs),
    /// Relative entropy of entanglement of a bipartite density matrix.
    Ree(ReeArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Model {
    /// Imperfect dipole coupling (rate exponent (d+1)/2).
    Di,
    /// Trap-potential fluctuations (rate exponent (d-1)/2).
    Vi,
}

impl From<Model> for CouplingModel {
    fn from(m: Model) -> Self {
        match m {
            Model::Di => CouplingModel::ImperfectDipole,
            Model::Vi => CouplingModel::TrapFluctuation,
        }
    }
}

fn parse_dist(s: &str) -> Result<VibrationalDistribution, String> {
    let d = VibrationalDistribution::parse(s).map_err(|e| e.to_string())?;
    d.probabilities().map_err(|e| e.to_string())?;
    Ok(d)
}

fn parse_positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a positive number, got '{s}'")),
    }
}

fn parse_nonnegative(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.is_finite() => Ok(v),
        _ => Err(format!("expected a non-negative number, got '{s}'")),
    }
}

#[derive(Args, Debug)]
struct JcArgs {
    /// Initial motional distribution: fock:N, coherent:MEAN or thermal:MEAN.
    #[arg(long, default_value = "coherent:3.0", value_parser = parse_dist)]
    dist: VibrationalDistribution,
    /// Reservoir spectral exponent.
    #[arg(long, default_value_t = 0.4, allow_negative_numbers = true)]
    d: f64,
    /// Normalized base rate gamma_0 / g.
    #[arg(long, default_value_t = 0.127, value_parser = parse_nonnegative)]
    gamma0: f64,
    /// Final dimensionless time g t.
    #[arg(long, default_value_t = 25.0, value_parser = parse_positive)]
    tmax: f64,
    /// Number of time steps on the output grid.
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u32).range(1..))]
    steps: u32,
    /// Coupling model.
    #[arg(long, value_enum, default_value_t = Model::Di)]
    model: Model,
    /// Rabi scale g in rad/s, used for the dimensional rate printed on stderr.
    #[arg(long, value_parser = parse_positive)]
    g: Option<f64>,
    /// Add a column computed by the numerical dephasing integrator.
    #[arg(long)]
    oracle: bool,
    /// Output file (stdout if absent).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BudgetArgs {
    /// Register sizes L (bits of the number to factor).
    #[arg(long = "L", value_delimiter = ',', default_values_t = [4u32, 40])]
    l: Vec<u32>,
    #[arg(long, default_value_t = 500.0, value_parser = parse_positive)]
    epsilon: f64,
    /// Lamb-Dicke parameter.
    #[arg(long, default_value_t = 1.0, value_parser = parse_positive)]
    eta: f64,
    /// Gamma / Omega^2 in seconds.
    #[arg(long, default_value_t = 1e-16, value_parser = parse_positive)]
    ratio: f64,
    /// JSON file with ion constants.
    #[arg(long)]
    ions: Option<PathBuf>,
    /// Gate count used for emission probabilities.
    #[arg(long = "N", default_value_t = 1e6, value_parser = parse_positive)]
    gates: f64,
    /// Write the full report as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SwapArgs {
    /// Scenario file.
    scenario: PathBuf,
    /// Cross-check against the dense state-vector oracle; exit 4 on mismatch.
    #[arg(long)]
    verify: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExchangeArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    users: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    request: Vec<String>,
    #[arg(long)]
    verify: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReeArgs {
    /// Density matrix file: {"dims": [dA, dB], "matrix": [[[re, im], ...], ...]}.
    input: Option<PathBuf>,
    /// Run the axiom checks.
    #[arg(long)]
    axioms: bool,
    #[arg(long, env = "QLIMITS_SEED", default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(1..))]
    restarts: u32,
    /// Samples per axiom check.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    samples: u32,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Input(String),
    Mismatch(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Input(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Input(m) | Failure::Mismatch(m) => m,
        }
    }
}

impl From<qlimits::Error> for Failure {
    fn from(e: qlimits::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write(path: Option<&Path>, contents: &str) -> Result<(), Failure> {
    emit(path, contents).map_err(|e| Failure::Input(format!("writing output: {e}")))
}

fn cmd_jc(a: &JcArgs) -> Result<(), Failure> {
    let mut params = DecoherenceParams::normalized(a.gamma0, a.d)?;
    if let Some(g) = a.g {
        params.g = g;
        eprintln!("gamma_0 = {} rad/s", sig(a.gamma0 * g));
    }
    let model = CouplingModel::from(a.model);
    let grid = uniform_grid(a.tmax, a.steps as usize);
    let analytic = population_lower(&grid, &a.dist, &params, model)?;
    let numeric = if a.oracle {
        let mut oracle = DephasingOracle::new(&a.dist, &params, model)?;
        Some(oracle.run(&grid)?.into_iter().map(|s| s.p_down).collect::<Vec<_>>())
    } else {
        None
    };
    let mut csv = String::from(if a.oracle { "gt,p_down,p_down_oracle\n" } else { "gt,p_down\n" });
    for (i, (t, p)) in grid.iter().zip(&analytic).enumerate() {
        let _ = write!(csv, "{},{}", sig(*t), sig(*p));
        if let Some(col) = &numeric {
            let _ = write!(csv, ",{}", sig(col[i]));
        }
        csv.push('\n');
    }
    write(a.output.as_deref(), &csv)
}

fn cmd_budget(a: &BudgetArgs) -> Result<(), Failure> {
    let ions = match &a.ions {
        Some(path) => parse_ion_config(&read(path)?)?,
        None => Vec::new(),
    };
    let report = feasibility_report(&FeasibilityInput {
        epsilon: a.epsilon,
        eta: a.eta,
        ratio: a.ratio,
        l_values: a.l.clone(),
        gates: a.gates,
        ions,
    })
    .map_err(|e| match e {
        qlimits::Error::IonConfig(_) => Failure::Input(e.to_string()),
        other => Failure::Usage(other.to_string()),
    })?;
    if let Some(path) = &a.json {
        write(Some(path), &json(&report))?;
    }
    write(None, &report.to_table())
}

#[derive(Serialize)]
struct Verification {
    agrees: bool,
    symbolic_outcomes: usize,
    dense_outcomes: usize,
    max_probability_error: f64,
    max_residual_distance: f64,
}

impl From<&OracleComparison> for Verification {
    fn from(c: &OracleComparison) -> Self {
        Self {
            agrees: c.agrees(1e-10) && (c.dense_total - 1.0).abs() <= 1e-12,
            symbolic_outcomes: c.symbolic_count,
            dense_outcomes: c.dense_count,
            max_probability_error: c.max_probability_error,
            max_residual_distance: c.max_residual_distance,
        }
    }
}

#[derive(Serialize)]
struct SwapSummary {
    particles: usize,
    measured: Vec<u32>,
    /// Measured-side and residual-side cat sizes.
    polygon_counts: (usize, usize),
    outcome_count: usize,
    total_probability: f64,
}

#[derive(Serialize)]
struct SwapReport {
    summary: SwapSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    exchange: Option<ExchangeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
    outcomes: Vec<OutcomeRecord>,
}

#[derive(Serialize)]
struct ExchangeSummary {
    user_particles: Vec<u32>,
    users_share_cat: bool,
}

fn swap_report(scenario: &Scenario, verify: bool) -> Result<SwapReport, Failure> {
    let (coll, spec) = scenario.resolve()?;
    let outcomes = scenario.run()?;
    let verification = if verify {
        Some(Verification::from(&compare_with_oracle(&coll, &spec)?))
    } else {
        None
    };
    Ok(SwapReport {
        summary: SwapSummary {
            particles: coll.particle_count(),
            measured: spec.selected().iter().copied().collect(),
            polygon_counts: polygon_counts(&coll, &spec)?,
            outcome_count: outcomes.len(),
            total_probability: outcomes.iter().map(|o| o.probability).sum(),
        },
        exchange: None,
        verification,
        outcomes,
    })
}

fn finish_swap(report: &SwapReport, output: Option<&Path>) -> Result<(), Failure> {
    write(output, &json(report))?;
    match &report.verification {
        Some(v) if !v.agrees => Err(Failure::Mismatch(format!(
            "symbolic and dense outcomes disagree (probability error {:e}, residual distance {:e})",
            v.max_probability_error, v.max_residual_distance
        ))),
        _ => Ok(()),
    }
}

fn cmd_swap(a: &SwapArgs) -> Result<(), Failure> {
    let scenario = Scenario::from_json(&read(&a.scenario)?)?;
    let report = swap_report(&scenario, a.verify)?;
    finish_swap(&report, a.output.as_deref())
}

fn cmd_exchange(a: &ExchangeArgs) -> Result<(), Failure> {
    let result = telephone_exchange(&a.users, &a.request)?;
    let scenario = Scenario::Exchange {
        users: a.users.clone(),
        request: a.request.clone(),
    };
    let mut report = swap_report(&scenario, a.verify)?;
    report.exchange = Some(ExchangeSummary {
        user_particles: result.user_particles.clone(),
        users_share_cat: result.users_share_cat(),
    });
    finish_swap(&report, a.output.as_deref())
}

#[derive(Serialize)]
struct ReeWithAxioms {
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<ReeOutput>,
    axioms: AxiomReport,
}

fn cmd_ree(a: &ReeArgs) -> Result<(), Failure> {
    if a.input.is_none() && !a.axioms {
        return Err(Failure::Usage("ree needs an input file or --axioms".into()));
    }
    let config = ReeConfig {
        restarts: a.restarts as usize,
        seed: a.seed,
        ..ReeConfig::default()
    };
    let result = match &a.input {
        Some(path) => {
            let sigma = DensityInput::from_json(&read(path)?)?.to_density()?;
            Some(ReeOutput::from(&relative_entropy_of_entanglement(&sigma, &config)?))
        }
        None => None,
    };
    let text = if a.axioms {
        let harness = HarnessConfig {
            seed: a.seed,
            ..HarnessConfig::with_samples(a.samples as usize)
        };
        let axioms = axiom_harness(&RelativeEntropyMeasure { config }, &harness)?;
        json(&ReeWithAxioms { result, axioms })
    } else {
        json(&result.expect("input present"))
    };
    write(a.output.as_deref(), &text)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Jc(a) => cmd_jc(a),
        Command::Budget(a) => cmd_budget(a),
        Command::Swap(a) => cmd_swap(a),
        Command::Exchange(a) => cmd_exchange(a),
        Command::Ree(a) => cmd_ree(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
