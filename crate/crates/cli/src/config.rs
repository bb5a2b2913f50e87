//! JSON experiment configs.
//!
//! A classical config names a group, a step law (or an explicit transition
//! matrix), an initial vector and a step count. A quantum config is
//! recognized by its top-level `mode` key.

use std::path::Path;

use abelian_walk::birkhoff::{subpolytope_membership, transition_matrix};
use abelian_walk::quantum::{ChannelWeights, DensityMatrix, FiducialVector, MeasurementMode};
use abelian_walk::{GroupSpec, ProbabilityVector, StepDistribution, TransitionMatrix, WalkError};
use serde::Deserialize;

use crate::error::CliError;

/// Largest group order whose dense transition matrix is built.
pub const MAX_ORDER: usize = 1024;
/// Largest step count accepted from a config.
pub const MAX_STEPS: usize = 100_000;
/// Largest dimension for the coherent-state POVM walk (W has d^4 entries).
pub const MAX_POVM_DIM: usize = 15;
/// Largest dimension for the projective walk.
pub const MAX_PROJECTIVE_DIM: usize = 256;
/// Used when a config does not give `fiducial_seed` and no override is set.
pub const DEFAULT_FIDUCIAL_SEED: u64 = 1;
pub const DEFAULT_EPSILON: f64 = 0.01;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum StepSpec {
    Weights(Vec<f64>),
    Binomial { binomial: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum InitialSpec {
    Vector(Vec<f64>),
    Delta { delta: usize },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClassical {
    name: Option<String>,
    group: GroupSpec,
    step_distribution: Option<StepSpec>,
    transition_matrix: Option<Vec<Vec<f64>>>,
    initial: Option<InitialSpec>,
    steps: usize,
    epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawMode {
    Projective,
    Povm,
}

#[derive(Debug, Deserialize)]
enum RawRho {
    #[serde(rename = "basis_state")]
    Basis(usize),
    #[serde(rename = "momentum_state")]
    Momentum(usize),
    #[serde(rename = "maximally_mixed")]
    Mixed(bool),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuantum {
    name: Option<String>,
    mode: RawMode,
    d: usize,
    weights: Vec<f64>,
    fiducial_seed: Option<u64>,
    steps: usize,
    rho0: RawRho,
    epsilon: Option<f64>,
}

/// A validated classical walk.
#[derive(Debug, Clone)]
pub struct Classical {
    pub group: GroupSpec,
    pub matrix: TransitionMatrix,
    pub initial: ProbabilityVector,
    pub steps: usize,
    pub epsilon: f64,
}

impl Classical {
    /// The step law of the matrix, when the matrix lies in `B(G)`.
    pub fn step_distribution(&self) -> Option<&StepDistribution> {
        self.matrix.certificate()
    }
}

/// A validated measurement walk.
#[derive(Debug, Clone)]
pub struct Quantum {
    pub mode: MeasurementMode,
    pub d: usize,
    pub weights: ChannelWeights,
    pub fiducial: Option<FiducialVector>,
    pub fiducial_seed: Option<u64>,
    pub rho0: DensityMatrix,
    pub steps: usize,
    pub epsilon: f64,
}

#[derive(Debug, Clone)]
pub enum Experiment {
    Classical(Classical),
    Quantum(Quantum),
}

#[derive(Debug, Clone)]
pub struct Config {
    /// File stem used for output names.
    pub name: String,
    pub experiment: Experiment,
}

/// Prefixes a library error with the config key it came from.
fn at(key: &str) -> impl Fn(WalkError) -> CliError + '_ {
    move |e| CliError::from_walk(key, e)
}

fn check_steps(steps: usize) -> Result<(), CliError> {
    if steps > MAX_STEPS {
        return Err(CliError::Capacity(format!(
            "steps: {steps} exceeds the limit of {MAX_STEPS}"
        )));
    }
    Ok(())
}

fn check_epsilon(epsilon: Option<f64>) -> Result<f64, CliError> {
    let eps = epsilon.unwrap_or(DEFAULT_EPSILON);
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CliError::Validation(format!(
            "epsilon: must lie in (0, 1), got {eps}"
        )));
    }
    Ok(eps)
}

fn deserialize<T: serde::de::DeserializeOwned>(value: serde_json::Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        // Out-of-range group moduli surface as serde errors but are semantic.
        let message = inner.to_string();
        if path.starts_with("group") && message.contains("modulus") {
            CliError::Validation(format!("{path}: {message}"))
        } else {
            CliError::Parse(format!("{path}: {message}"))
        }
    })
}

fn classical(raw: RawClassical) -> Result<Experiment, CliError> {
    let group = raw.group;
    let n = group.order();
    if n > MAX_ORDER {
        return Err(CliError::Capacity(format!(
            "group: order {n} exceeds the limit of {MAX_ORDER}"
        )));
    }
    check_steps(raw.steps)?;
    let epsilon = check_epsilon(raw.epsilon)?;

    let matrix = match (raw.step_distribution, raw.transition_matrix) {
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(
                "step_distribution, transition_matrix: give exactly one of them".into(),
            ))
        }
        (None, None) => {
            return Err(CliError::Validation(
                "step_distribution: missing (or give transition_matrix)".into(),
            ))
        }
        (Some(spec), None) => {
            let p = match spec {
                StepSpec::Weights(w) => {
                    if w.len() != n {
                        return Err(CliError::Validation(format!(
                            "step_distribution: expected {n} weights for this group, got {}",
                            w.len()
                        )));
                    }
                    StepDistribution::from_weights(group, w).map_err(at("step_distribution"))?
                }
                StepSpec::Binomial { binomial } => StepDistribution::binomial(group, binomial)
                    .map_err(at("step_distribution.binomial"))?,
            };
            transition_matrix(group, &p).map_err(at("step_distribution"))?
        }
        (None, Some(rows)) => {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(CliError::Validation(format!(
                    "transition_matrix: expected a {n}x{n} matrix for this group"
                )));
            }
            let m = TransitionMatrix::from_rows(&rows).map_err(at("transition_matrix"))?;
            match subpolytope_membership(group, &m) {
                Some(cert) => m.with_certificate(cert),
                None => m,
            }
        }
    };

    let initial = match raw.initial {
        None => ProbabilityVector::delta(n, 0).map_err(at("initial"))?,
        Some(InitialSpec::Delta { delta }) => {
            if delta >= n {
                return Err(CliError::Validation(format!(
                    "initial.delta: index {delta} out of range for order {n}"
                )));
            }
            ProbabilityVector::delta(n, delta).map_err(at("initial.delta"))?
        }
        Some(InitialSpec::Vector(v)) => {
            if v.len() != n {
                return Err(CliError::Validation(format!(
                    "initial: expected {n} entries, got {}",
                    v.len()
                )));
            }
            ProbabilityVector::new(v).map_err(at("initial"))?
        }
    };

    Ok(Experiment::Classical(Classical {
        group,
        matrix,
        initial,
        steps: raw.steps,
        epsilon,
    }))
}

fn quantum(raw: RawQuantum, seed_override: Option<u64>) -> Result<Experiment, CliError> {
    let d = raw.d;
    check_steps(raw.steps)?;
    let epsilon = check_epsilon(raw.epsilon)?;
    let mode = match raw.mode {
        RawMode::Projective => MeasurementMode::Projective,
        RawMode::Povm => MeasurementMode::Povm,
    };
    if d < 2 {
        return Err(CliError::Validation(format!("d: must be >= 2, got {d}")));
    }
    let (limit, outcomes) = match mode {
        MeasurementMode::Projective => (MAX_PROJECTIVE_DIM, d),
        MeasurementMode::Povm => (MAX_POVM_DIM, d * d),
    };
    if d > limit {
        return Err(CliError::Capacity(format!(
            "d: {d} exceeds the limit of {limit} for this mode"
        )));
    }
    if mode == MeasurementMode::Povm && d % 2 == 0 {
        return Err(CliError::Validation(format!(
            "d: the POVM walk needs odd d, got {d}"
        )));
    }
    if raw.weights.len() != outcomes {
        return Err(CliError::Validation(format!(
            "weights: expected {outcomes} entries for d = {d}, got {}",
            raw.weights.len()
        )));
    }
    let weights = ChannelWeights::new(raw.weights).map_err(at("weights"))?;
    let rho0 = match raw.rho0 {
        RawRho::Basis(j) | RawRho::Momentum(j) if j >= d => {
            return Err(CliError::Validation(format!(
                "rho0: index {j} out of range for d = {d}"
            )))
        }
        RawRho::Basis(j) => DensityMatrix::basis_state(d, j),
        RawRho::Momentum(j) => DensityMatrix::momentum_state(d, j),
        RawRho::Mixed(true) => DensityMatrix::maximally_mixed(d),
        RawRho::Mixed(false) => {
            return Err(CliError::Validation(
                "rho0.maximally_mixed: must be true".into(),
            ))
        }
    }
    .map_err(at("rho0"))?;
    let (fiducial, fiducial_seed) = match mode {
        MeasurementMode::Projective => (None, None),
        MeasurementMode::Povm => {
            let seed = seed_override
                .or(raw.fiducial_seed)
                .unwrap_or(DEFAULT_FIDUCIAL_SEED);
            let eta = FiducialVector::from_seed(d, seed).map_err(at("fiducial_seed"))?;
            (Some(eta), Some(seed))
        }
    };
    Ok(Experiment::Quantum(Quantum {
        mode,
        d,
        weights,
        fiducial,
        fiducial_seed,
        rho0,
        steps: raw.steps,
        epsilon,
    }))
}

/// Parses and validates a config document.
pub fn parse(
    text: &str,
    default_name: &str,
    seed_override: Option<u64>,
) -> Result<Config, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Parse("config must be a JSON object".into()))?;
    let (name, experiment) = if obj.contains_key("mode") {
        let raw: RawQuantum = deserialize(value)?;
        (raw.name.clone(), quantum(raw, seed_override)?)
    } else {
        let raw: RawClassical = deserialize(value)?;
        (raw.name.clone(), classical(raw)?)
    };
    let name = name.unwrap_or_else(|| default_name.to_string());
    if name.is_empty() || name.contains(['/', '\\']) || name.starts_with('.') {
        return Err(CliError::Validation(format!(
            "name: {name:?} is not a usable file stem"
        )));
    }
    Ok(Config { name, experiment })
}

pub fn load(path: &Path, seed_override: Option<u64>) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("walk")
        .to_string();
    parse(&text, &stem, seed_override)
}
