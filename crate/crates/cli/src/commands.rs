//! Subcommand implementations. Each returns its stdout text and the files it
//! would write; nothing touches the disk until every output has been computed.

use abelian_walk::birkhoff::{evolve, mixing_time_empirical, spectrum, trajectory};
use abelian_walk::measures::{entropy, gini, majorizes, tv_to_uniform};
use abelian_walk::polytope::{contains, dimension, full_polytope, subgroup_polytope, CONTAINS_TOL};
use abelian_walk::quantum::{measured_walk, MeasuredWalk, MeasurementMode};
use abelian_walk::{GroupKind, GroupSpec, ProbabilityVector, Spectrum, WalkError};
use serde::Serialize;

use crate::config::{Classical, Config, Experiment, Quantum};
use crate::error::CliError;
use crate::report::{
    csv_table, fmt12, json_bytes, nums, trajectory_csv, trajectory_rows, Artifact, Num,
    TrajectoryRow,
};

/// Largest group order for which subgroup polytopes are built.
pub const MAX_POLYTOPE_ORDER: usize = 64;
/// Budget (steps times order squared) for the empirical mixing-time search.
const MIXING_WORK_BUDGET: usize = 200_000_000;
const MAX_MIXING_STEPS: usize = 10_000;
/// Consecutive pairs checked by `verify` for the polytope chain.
const MAX_CHAIN_CHECKS: usize = 50;
const MONOTONE_SLACK: f64 = 1e-12;
const BRIDGE_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-9;
const TRACE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// What a subcommand produced.
pub struct Outcome {
    /// Printed when no output directory is given (and always for `verify`).
    pub stdout: Vec<u8>,
    pub artifacts: Vec<Artifact>,
    /// Only `verify` sets this.
    pub failed_checks: usize,
}

impl Outcome {
    fn single(artifact: Artifact) -> Self {
        Outcome {
            stdout: artifact.bytes.clone(),
            artifacts: vec![artifact],
            failed_checks: 0,
        }
    }
}

fn walk_err(key: &'static str) -> impl Fn(WalkError) -> CliError {
    move |e| CliError::from_walk(key, e)
}

#[derive(Serialize)]
struct GroupOut {
    kind: GroupKind,
    d: usize,
    order: usize,
}

impl From<GroupSpec> for GroupOut {
    fn from(g: GroupSpec) -> Self {
        GroupOut {
            kind: g.kind(),
            d: g.modulus(),
            order: g.order(),
        }
    }
}

#[derive(Serialize)]
struct Monotone {
    majorization_chain: bool,
    entropy_nondecreasing: bool,
    gini_nonincreasing: bool,
    tv_nonincreasing: bool,
}

fn monotone(path: &[ProbabilityVector]) -> Monotone {
    let pairs = || path.windows(2);
    Monotone {
        majorization_chain: pairs().all(|w| majorizes(&w[0], &w[1]).unwrap_or(false)),
        entropy_nondecreasing: pairs().all(|w| entropy(&w[1]) >= entropy(&w[0]) - MONOTONE_SLACK),
        gini_nonincreasing: pairs().all(|w| gini(&w[1]) <= gini(&w[0]) + MONOTONE_SLACK),
        tv_nonincreasing: pairs()
            .all(|w| tv_to_uniform(&w[1]) <= tv_to_uniform(&w[0]) + MONOTONE_SLACK),
    }
}

/// The classical walk a measurement sequence follows: `V` or `W` from `q^(0)`.
fn induced(q: &Quantum) -> Result<(Classical, MeasuredWalk), CliError> {
    let walk = measured_walk(&q.rho0, q.mode, &q.weights, q.fiducial.as_ref(), q.steps)
        .map_err(walk_err("quantum"))?;
    let group = match q.mode {
        MeasurementMode::Projective => GroupSpec::cyclic(q.d),
        MeasurementMode::Povm => GroupSpec::product(q.d),
    }
    .map_err(walk_err("d"))?;
    let classical = Classical {
        group,
        matrix: walk.transition.clone(),
        initial: walk.trajectory[0].clone(),
        steps: q.steps,
        epsilon: q.epsilon,
    };
    Ok((classical, walk))
}

fn as_classical(config: &Config) -> Result<Classical, CliError> {
    match &config.experiment {
        Experiment::Classical(c) => Ok(c.clone()),
        Experiment::Quantum(q) => induced(q).map(|(c, _)| c),
    }
}

fn classical_path(c: &Classical) -> Result<Vec<ProbabilityVector>, CliError> {
    trajectory(&c.initial, &c.matrix, c.steps).map_err(walk_err("initial"))
}

#[derive(Serialize)]
struct WalkReport {
    name: String,
    group: GroupOut,
    steps: usize,
    rows: Vec<TrajectoryRow>,
    monotone: Monotone,
}

pub fn walk(config: &Config, format: Format) -> Result<Outcome, CliError> {
    let c = as_classical(config)?;
    let path = classical_path(&c)?;
    Ok(Outcome::single(match format {
        Format::Csv => Artifact {
            file_name: format!("{}_trajectory.csv", config.name),
            bytes: trajectory_csv(&path)?,
        },
        Format::Json => Artifact {
            file_name: format!("{}_trajectory.json", config.name),
            bytes: json_bytes(&WalkReport {
                name: config.name.clone(),
                group: c.group.into(),
                steps: c.steps,
                rows: trajectory_rows(&path),
                monotone: monotone(&path),
            })?,
        },
    }))
}

#[derive(Serialize)]
struct EigenOut {
    character: usize,
    re: Num,
    im: Num,
    modulus: Num,
}

#[derive(Serialize)]
struct SpectrumSummary {
    e_max: Num,
    ergodic: bool,
    epsilon: Num,
    /// `ln(eps) / ln(e_max)`; absent for non-ergodic walks.
    mixing_time_heuristic: Option<Num>,
    /// First `n` with `||q^(n) - u|| <= eps`, searched up to `mixing_search_limit`.
    mixing_time_empirical: Option<usize>,
    mixing_search_limit: usize,
}

fn character_spectrum(c: &Classical) -> Result<Spectrum, CliError> {
    let p = c.step_distribution().ok_or_else(|| {
        CliError::Validation(
            "transition_matrix: not a group circulant for the configured group, so it has no character spectrum".into(),
        )
    })?;
    spectrum(c.group, p).map_err(walk_err("step_distribution"))
}

fn spectrum_summary(c: &Classical, s: &Spectrum) -> Result<SpectrumSummary, CliError> {
    let n = c.group.order();
    let limit = (MIXING_WORK_BUDGET / (n * n)).clamp(1, MAX_MIXING_STEPS);
    let empirical = mixing_time_empirical(&c.initial, &c.matrix, c.epsilon, limit)
        .map_err(walk_err("epsilon"))?;
    Ok(SpectrumSummary {
        e_max: Num(s.e_max()),
        ergodic: s.is_ergodic(abelian_walk::birkhoff::ERGODIC_TOL),
        epsilon: Num(c.epsilon),
        mixing_time_heuristic: s.mixing_time_heuristic(c.epsilon).ok().map(Num),
        mixing_time_empirical: empirical,
        mixing_search_limit: limit,
    })
}

#[derive(Serialize)]
struct SpectrumReport {
    name: String,
    group: GroupOut,
    eigenvalues: Vec<EigenOut>,
    #[serde(flatten)]
    summary: SpectrumSummary,
}

pub fn spectrum_cmd(config: &Config, format: Format) -> Result<Outcome, CliError> {
    let c = as_classical(config)?;
    let s = character_spectrum(&c)?;
    let eigen: Vec<EigenOut> = s
        .eigenvalues()
        .iter()
        .map(|e| EigenOut {
            character: e.character,
            re: Num(e.value.re),
            im: Num(e.value.im),
            modulus: Num(e.value.norm()),
        })
        .collect();
    Ok(Outcome::single(match format {
        Format::Csv => {
            let header = ["character", "re", "im", "modulus"].map(String::from);
            let rows = s.eigenvalues().iter().map(|e| {
                vec![
                    e.character.to_string(),
                    fmt12(e.value.re),
                    fmt12(e.value.im),
                    fmt12(e.value.norm()),
                ]
            });
            Artifact {
                file_name: format!("{}_spectrum.csv", config.name),
                bytes: csv_table(&header, rows)?,
            }
        }
        Format::Json => Artifact {
            file_name: format!("{}_spectrum.json", config.name),
            bytes: json_bytes(&SpectrumReport {
                name: config.name.clone(),
                group: c.group.into(),
                eigenvalues: eigen,
                summary: spectrum_summary(&c, &s)?,
            })?,
        },
    }))
}

#[derive(Serialize)]
struct PolytopeRow {
    n: usize,
    vertices: usize,
    dimension: usize,
    circumradius: Num,
    /// `A[q^(n); B(G)]` inside `A[q^(n-1); B(G)]`; absent for `n = 0`.
    subset_of_previous: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_vertices: Option<usize>,
    /// Vertex coordinates, one probability vector each.
    points: Vec<Vec<Num>>,
}

fn check_polytope_capacity(g: GroupSpec) -> Result<(), CliError> {
    if g.order() > MAX_POLYTOPE_ORDER {
        return Err(CliError::Capacity(format!(
            "group: polytopes are built for orders up to {MAX_POLYTOPE_ORDER}, got {}",
            g.order()
        )));
    }
    Ok(())
}

/// `true` when every vertex of `inner` lies in `outer`.
fn inside(
    inner: &abelian_walk::ProbPolytope,
    outer: &abelian_walk::ProbPolytope,
) -> Result<bool, CliError> {
    for v in inner.vertices() {
        if !contains(outer, v, CONTAINS_TOL).map_err(walk_err("polytope"))? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn polytope_rows(
    c: &Classical,
    path: &[ProbabilityVector],
    full: bool,
) -> Result<Vec<PolytopeRow>, CliError> {
    check_polytope_capacity(c.group)?;
    let mut rows = Vec::with_capacity(path.len());
    let mut previous: Option<abelian_walk::ProbPolytope> = None;
    for (n, q) in path.iter().enumerate() {
        let poly = subgroup_polytope(q, c.group).map_err(walk_err("polytope"))?;
        let subset = match &previous {
            Some(prev) => Some(inside(&poly, prev)?),
            None => None,
        };
        let full_vertices = if full {
            Some(
                full_polytope(q)
                    .map_err(walk_err("polytope"))?
                    .vertex_count(),
            )
        } else {
            None
        };
        rows.push(PolytopeRow {
            n,
            vertices: poly.vertex_count(),
            dimension: dimension(&poly).map_err(|e| CliError::from_walk("polytope", e))?,
            circumradius: Num(poly.circumradius()),
            subset_of_previous: subset,
            full_vertices,
            points: poly.vertices().iter().map(|v| nums(v.as_slice())).collect(),
        });
        previous = Some(poly);
    }
    Ok(rows)
}

#[derive(Serialize)]
struct PolytopeReport {
    name: String,
    group: GroupOut,
    rows: Vec<PolytopeRow>,
}

pub fn polytope_cmd(config: &Config, format: Format, full: bool) -> Result<Outcome, CliError> {
    let c = as_classical(config)?;
    let path = classical_path(&c)?;
    let rows = polytope_rows(&c, &path, full)?;
    Ok(Outcome::single(match format {
        Format::Csv => {
            let mut header: Vec<String> = [
                "n",
                "vertices",
                "dimension",
                "circumradius",
                "subset_of_previous",
            ]
            .map(String::from)
            .to_vec();
            if full {
                header.push("full_vertices".into());
            }
            let cells = rows.iter().map(|r| {
                let mut row = vec![
                    r.n.to_string(),
                    r.vertices.to_string(),
                    r.dimension.to_string(),
                    fmt12(r.circumradius.0),
                    r.subset_of_previous
                        .map(|b| b.to_string())
                        .unwrap_or_default(),
                ];
                if let Some(f) = r.full_vertices {
                    row.push(f.to_string());
                }
                row
            });
            Artifact {
                file_name: format!("{}_polytope.csv", config.name),
                bytes: csv_table(&header, cells)?,
            }
        }
        Format::Json => Artifact {
            file_name: format!("{}_polytope.json", config.name),
            bytes: json_bytes(&PolytopeReport {
                name: config.name.clone(),
                group: c.group.into(),
                rows,
            })?,
        },
    }))
}

#[derive(Serialize)]
struct TransitionOut {
    mode: &'static str,
    d: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    fiducial_seed: Option<u64>,
    group: GroupOut,
    /// Row-stochastic matrix acting on row vectors, `q -> q M`.
    matrix: Vec<Vec<Num>>,
    in_subpolytope: bool,
    step_distribution: Option<Vec<Num>>,
}

#[derive(Serialize)]
struct QuantumReport {
    name: String,
    steps: usize,
    rows: Vec<TrajectoryRow>,
    transition: TransitionOut,
    min_eigenvalue: Num,
    max_trace_error: Num,
}

fn require_quantum(config: &Config) -> Result<&Quantum, CliError> {
    match &config.experiment {
        Experiment::Quantum(q) => Ok(q),
        Experiment::Classical(_) => Err(CliError::Validation(
            "mode: this subcommand needs a quantum config (top-level \"mode\")".into(),
        )),
    }
}

fn transition_out(q: &Quantum, c: &Classical) -> TransitionOut {
    TransitionOut {
        mode: match q.mode {
            MeasurementMode::Projective => "projective",
            MeasurementMode::Povm => "povm",
        },
        d: q.d,
        fiducial_seed: q.fiducial_seed,
        group: c.group.into(),
        matrix: c.matrix.rows().iter().map(|r| nums(r)).collect(),
        in_subpolytope: c.step_distribution().is_some(),
        step_distribution: c
            .step_distribution()
            .map(|p| nums(p.probabilities().as_slice())),
    }
}

pub fn quantum_cmd(config: &Config, format: Format) -> Result<Outcome, CliError> {
    let q = require_quantum(config)?;
    let (c, walk) = induced(q)?;
    let transition = transition_out(q, &c);
    match format {
        Format::Csv => {
            let csv = Artifact {
                file_name: format!("{}_trajectory.csv", config.name),
                bytes: trajectory_csv(&walk.trajectory)?,
            };
            let matrix = Artifact {
                file_name: format!("{}_transition.json", config.name),
                bytes: json_bytes(&transition)?,
            };
            Ok(Outcome {
                stdout: csv.bytes.clone(),
                artifacts: vec![csv, matrix],
                failed_checks: 0,
            })
        }
        Format::Json => Ok(Outcome::single(Artifact {
            file_name: format!("{}_quantum.json", config.name),
            bytes: json_bytes(&QuantumReport {
                name: config.name.clone(),
                steps: q.steps,
                rows: trajectory_rows(&walk.trajectory),
                transition,
                min_eigenvalue: Num(walk.min_eigenvalue),
                max_trace_error: Num(walk.max_trace_error),
            })?,
        })),
    }
}

#[derive(Serialize)]
struct PolytopeSummary {
    vertex_counts: Vec<usize>,
    subset_chain: Vec<bool>,
}

#[derive(Serialize)]
struct RunReport {
    name: String,
    group: GroupOut,
    steps: usize,
    rows: Vec<TrajectoryRow>,
    monotone: Monotone,
    spectrum: Option<SpectrumSummary>,
    polytope: Option<PolytopeSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    transition: Option<TransitionOut>,
}

/// Trajectory plus spectrum and polytope summaries in one report.
pub fn run(config: &Config, format: Format) -> Result<Outcome, CliError> {
    let (c, path, transition) = match &config.experiment {
        Experiment::Classical(c) => (c.clone(), classical_path(c)?, None),
        Experiment::Quantum(q) => {
            let (c, walk) = induced(q)?;
            let t = transition_out(q, &c);
            (c, walk.trajectory, Some(t))
        }
    };
    let spectrum = match character_spectrum(&c) {
        Ok(s) => Some(spectrum_summary(&c, &s)?),
        Err(CliError::Validation(_)) => None,
        Err(e) => return Err(e),
    };
    let polytope = if c.group.order() <= MAX_POLYTOPE_ORDER {
        let rows = polytope_rows(&c, &path, false)?;
        Some(PolytopeSummary {
            vertex_counts: rows.iter().map(|r| r.vertices).collect(),
            subset_chain: rows.iter().filter_map(|r| r.subset_of_previous).collect(),
        })
    } else {
        None
    };
    let report = Artifact {
        file_name: format!("{}_report.json", config.name),
        bytes: json_bytes(&RunReport {
            name: config.name.clone(),
            group: c.group.into(),
            steps: c.steps,
            rows: trajectory_rows(&path),
            monotone: monotone(&path),
            spectrum,
            polytope,
            transition,
        })?,
    };
    match format {
        Format::Json => Ok(Outcome::single(report)),
        Format::Csv => {
            let csv = Artifact {
                file_name: format!("{}_trajectory.csv", config.name),
                bytes: trajectory_csv(&path)?,
            };
            Ok(Outcome {
                stdout: csv.bytes.clone(),
                artifacts: vec![csv, report],
                failed_checks: 0,
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Verdict {
    Pass,
    Fail,
    Skip,
}

#[derive(Serialize)]
struct Check {
    check: &'static str,
    verdict: Verdict,
    detail: String,
}

fn check(name: &'static str, ok: bool, detail: String) -> Check {
    Check {
        check: name,
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
        detail,
    }
}

/// Index of the first pair that breaks `holds`, if any.
fn first_break(
    path: &[ProbabilityVector],
    holds: impl Fn(&ProbabilityVector, &ProbabilityVector) -> bool,
) -> Option<usize> {
    path.windows(2).position(|w| !holds(&w[0], &w[1]))
}

fn monotone_check(
    name: &'static str,
    path: &[ProbabilityVector],
    holds: impl Fn(&ProbabilityVector, &ProbabilityVector) -> bool,
) -> Check {
    match first_break(path, holds) {
        None => check(name, true, format!("{} steps", path.len() - 1)),
        Some(k) => check(
            name,
            false,
            format!("breaks between n = {k} and n = {}", k + 1),
        ),
    }
}

pub fn verify(config: &Config, format: Format) -> Result<Outcome, CliError> {
    let (c, path, walk) = match &config.experiment {
        Experiment::Classical(c) => (c.clone(), classical_path(c)?, None),
        Experiment::Quantum(q) => {
            let (c, walk) = induced(q)?;
            (c, walk.trajectory.clone(), Some(walk))
        }
    };
    let mut checks = vec![
        check(
            "doubly stochastic",
            c.matrix.margin_error() <= abelian_walk::birkhoff::SUM_TOL,
            format!("margin error {:e}", c.matrix.margin_error()),
        ),
        monotone_check("majorization chain", &path, |a, b| {
            majorizes(a, b).unwrap_or(false)
        }),
        monotone_check("entropy nondecreasing", &path, |a, b| {
            entropy(b) >= entropy(a) - MONOTONE_SLACK
        }),
        monotone_check("gini nonincreasing", &path, |a, b| {
            gini(b) <= gini(a) + MONOTONE_SLACK
        }),
        monotone_check("tv to uniform nonincreasing", &path, |a, b| {
            tv_to_uniform(b) <= tv_to_uniform(a) + MONOTONE_SLACK
        }),
    ];

    let chain = if c.step_distribution().is_none() {
        Check {
            check: "polytope subset chain",
            verdict: Verdict::Skip,
            detail: "transition matrix is not in B(G)".into(),
        }
    } else if c.group.order() > MAX_POLYTOPE_ORDER {
        Check {
            check: "polytope subset chain",
            verdict: Verdict::Skip,
            detail: format!("group order {} above {MAX_POLYTOPE_ORDER}", c.group.order()),
        }
    } else {
        let upto = path.len().min(MAX_CHAIN_CHECKS + 1);
        let polys = path[..upto]
            .iter()
            .map(|q| subgroup_polytope(q, c.group))
            .collect::<Result<Vec<_>, _>>()
            .map_err(walk_err("polytope"))?;
        let mut broken = None;
        for (k, w) in polys.windows(2).enumerate() {
            if !inside(&w[1], &w[0])? {
                broken = Some(k);
                break;
            }
        }
        match broken {
            None => check("polytope subset chain", true, format!("{} steps", upto - 1)),
            Some(k) => check(
                "polytope subset chain",
                false,
                format!("breaks between n = {k} and n = {}", k + 1),
            ),
        }
    };
    checks.push(chain);

    if let Some(walk) = &walk {
        let gap = walk
            .trajectory
            .iter()
            .enumerate()
            .map(|(n, q)| {
                evolve(&walk.trajectory[0], &walk.transition, n).map(|r| q.max_abs_diff(&r))
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(walk_err("quantum"))?
            .into_iter()
            .fold(0.0, f64::max);
        checks.push(check(
            "measurement walk matches classical walk",
            gap <= BRIDGE_TOL,
            format!("max deviation {gap:e}"),
        ));
        checks.push(check(
            "states positive",
            walk.min_eigenvalue >= -PSD_TOL,
            format!("min eigenvalue {:e}", walk.min_eigenvalue),
        ));
        checks.push(check(
            "trace preserved",
            walk.max_trace_error <= TRACE_TOL,
            format!("max trace error {:e}", walk.max_trace_error),
        ));
    }

    let failed = checks.iter().filter(|c| c.verdict == Verdict::Fail).count();
    let mut text = String::new();
    for ch in &checks {
        let tag = match ch.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skip => "SKIP",
        };
        text.push_str(&format!("{tag} {}: {}\n", ch.check, ch.detail));
    }
    let ran = checks.iter().filter(|c| c.verdict != Verdict::Skip).count();
    text.push_str(&format!("{} of {ran} checks passed\n", ran - failed));

    let artifact = match format {
        Format::Csv => {
            let header = ["check", "verdict", "detail"].map(String::from);
            let rows = checks.iter().map(|c| {
                vec![
                    c.check.to_string(),
                    serde_json::to_value(c.verdict)
                        .ok()
                        .and_then(|v| v.as_str().map(String::from))
                        .unwrap_or_default(),
                    c.detail.clone(),
                ]
            });
            Artifact {
                file_name: format!("{}_verify.csv", config.name),
                bytes: csv_table(&header, rows)?,
            }
        }
        Format::Json => Artifact {
            file_name: format!("{}_verify.json", config.name),
            bytes: json_bytes(&checks)?,
        },
    };
    Ok(Outcome {
        stdout: text.into_bytes(),
        artifacts: vec![artifact],
        failed_checks: failed,
    })
}
