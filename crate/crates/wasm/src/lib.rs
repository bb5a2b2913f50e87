//! Browser bindings for the walk demo. Every export takes plain numbers and
//! strings and returns a JSON document, so the page needs no glue beyond
//! `JSON.parse`.

use abelian_walk::measures::{entropy, gini, lorenz, tv_to_uniform};
use abelian_walk::polytope::{contains, dimension, residual, subgroup_polytope};
use abelian_walk::{
    birkhoff, GroupKind, GroupSpec, ProbabilityVector, StepDistribution, WalkError,
};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest group order the demo accepts for walks and spectra.
pub const MAX_ORDER: usize = 256;
/// Largest group order for polytopes, whose vertex count equals the order.
pub const MAX_POLYTOPE_ORDER: usize = 64;
pub const MAX_STEPS: usize = 1000;
const CONTAINS_TOL: f64 = 1e-9;

fn group(kind: &str, d: usize) -> Result<GroupSpec, String> {
    let kind = match kind {
        "cyclic" => GroupKind::Cyclic,
        "product" => GroupKind::Product,
        other => return Err(format!("unknown group kind {other:?}")),
    };
    let g = GroupSpec::new(kind, d).map_err(text)?;
    if g.order() > MAX_ORDER {
        return Err(format!("group order {} above {MAX_ORDER}", g.order()));
    }
    Ok(g)
}

fn text(e: WalkError) -> String {
    e.to_string()
}

/// Parses `binomial:<f>` or comma-separated weights over the group elements.
fn step_law(g: GroupSpec, spec: &str) -> Result<StepDistribution, String> {
    let spec = spec.trim();
    if let Some(f) = spec.strip_prefix("binomial:") {
        let f: f64 = f
            .trim()
            .parse()
            .map_err(|_| format!("bad binomial parameter {f:?}"))?;
        return StepDistribution::binomial(g, f).map_err(text);
    }
    let weights = spec
        .split(',')
        .map(|w| {
            w.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad weight {w:?}"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    StepDistribution::from_weights(g, weights).map_err(text)
}

fn path(
    kind: &str,
    d: usize,
    step: &str,
    start: usize,
    steps: usize,
) -> Result<(GroupSpec, StepDistribution, Vec<ProbabilityVector>), String> {
    if steps > MAX_STEPS {
        return Err(format!("steps {steps} above {MAX_STEPS}"));
    }
    let g = group(kind, d)?;
    let p = step_law(g, step)?;
    let matrix = birkhoff::transition_matrix(g, &p).map_err(text)?;
    let q0 = ProbabilityVector::delta(g.order(), start).map_err(text)?;
    let path = birkhoff::trajectory(&q0, &matrix, steps).map_err(text)?;
    Ok((g, p, path))
}

fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report serializes")
}

#[derive(Serialize)]
struct WalkOut {
    q: Vec<Vec<f64>>,
    lorenz: Vec<Vec<f64>>,
    entropy: Vec<f64>,
    gini: Vec<f64>,
    tv_to_u: Vec<f64>,
}

pub fn walk_report(
    kind: &str,
    d: usize,
    step: &str,
    start: usize,
    steps: usize,
) -> Result<String, String> {
    let (_, _, path) = path(kind, d, step, start, steps)?;
    Ok(json(&WalkOut {
        q: path.iter().map(|q| q.as_slice().to_vec()).collect(),
        lorenz: path.iter().map(|q| lorenz(q).values().to_vec()).collect(),
        entropy: path.iter().map(entropy).collect(),
        gini: path.iter().map(gini).collect(),
        tv_to_u: path.iter().map(tv_to_uniform).collect(),
    }))
}

#[derive(Serialize)]
struct SpectrumOut {
    re: Vec<f64>,
    im: Vec<f64>,
    e_max: f64,
    /// Steps until `e_max^k` falls to `epsilon`; absent for non-ergodic walks.
    mixing_time: Option<f64>,
}

pub fn spectrum_report(kind: &str, d: usize, step: &str, epsilon: f64) -> Result<String, String> {
    let g = group(kind, d)?;
    let p = step_law(g, step)?;
    let s = birkhoff::spectrum(g, &p).map_err(text)?;
    let values = s.values();
    Ok(json(&SpectrumOut {
        re: values.iter().map(|z| z.re).collect(),
        im: values.iter().map(|z| z.im).collect(),
        e_max: s.e_max(),
        mixing_time: s.mixing_time_heuristic(epsilon).ok(),
    }))
}

#[derive(Serialize)]
struct PolytopeOut {
    vertices: Vec<Vec<f64>>,
    dimension: usize,
    circumradius: f64,
    /// `q^(n+1)` lies in the polytope of `q^(n)`.
    next_inside: bool,
    next_residual: f64,
}

/// The polytope `A[q^(n); B(G)]` spanned by the group translates of `q^(n)`.
pub fn polytope_report(
    kind: &str,
    d: usize,
    step: &str,
    start: usize,
    n: usize,
) -> Result<String, String> {
    let (g, _, path) = path(kind, d, step, start, n + 1)?;
    if g.order() > MAX_POLYTOPE_ORDER {
        return Err(format!(
            "polytopes are drawn for orders up to {MAX_POLYTOPE_ORDER}"
        ));
    }
    let poly = subgroup_polytope(&path[n], g).map_err(text)?;
    let next = &path[n + 1];
    Ok(json(&PolytopeOut {
        vertices: poly
            .vertices()
            .iter()
            .map(|v| v.as_slice().to_vec())
            .collect(),
        dimension: dimension(&poly).map_err(text)?,
        circumradius: poly.circumradius(),
        next_inside: contains(&poly, next, CONTAINS_TOL).map_err(text)?,
        next_residual: residual(&poly, next).map_err(text)?,
    }))
}

fn js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Trajectory with Lorenz values, entropy, Gini index and distance to uniform.
#[wasm_bindgen]
pub fn walk(
    kind: &str,
    d: usize,
    step: &str,
    start: usize,
    steps: usize,
) -> Result<String, JsError> {
    js(walk_report(kind, d, step, start, steps))
}

/// Character eigenvalues of the transition matrix.
#[wasm_bindgen]
pub fn spectrum(kind: &str, d: usize, step: &str, epsilon: f64) -> Result<String, JsError> {
    js(spectrum_report(kind, d, step, epsilon))
}

/// Vertices of the subgroup polytope of `q^(n)`.
#[wasm_bindgen]
pub fn polytope(
    kind: &str,
    d: usize,
    step: &str,
    start: usize,
    n: usize,
) -> Result<String, JsError> {
    js(polytope_report(kind, d, step, start, n))
}
