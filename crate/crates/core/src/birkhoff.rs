//! Doubly stochastic matrices in the Birkhoff subpolytope `B(G)` and the
//! random walks they drive.
//!
//! Probability vectors are row vectors and act on matrices from the left:
//! one step of a walk is `q -> q P`. A step distribution `p` over a group
//! `G` generates the group circulant `P[a][b] = p(g_a^{-1} g_b)`, which is
//! the convex combination `sum_r p(g_r) M(r)` of the regular permutation
//! matrices and therefore lies in `B(G)`.

use nalgebra::{DMatrix, RowDVector};
use num_complex::Complex64;

use crate::error::{Result, WalkError};
use crate::group::{GroupKind, GroupSpec};

/// Tolerance on row/column/vector sums at construction.
pub const SUM_TOL: f64 = 1e-12;
/// Largest violation that [`Normalization::Renormalize`] will repair.
pub const RENORMALIZE_LIMIT: f64 = 1e-9;
/// Entrywise tolerance when reconstructing a group circulant.
pub const MEMBERSHIP_TOL: f64 = 1e-10;
/// Default gap below 1 required of `e_max` for ergodicity.
pub const ERGODIC_TOL: f64 = 1e-10;

/// How construction treats inputs that are almost, but not exactly, normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Normalization {
    /// Reject anything outside [`SUM_TOL`].
    #[default]
    Strict,
    /// Repair violations up to [`RENORMALIZE_LIMIT`]; reject worse ones.
    Renormalize,
}

/// A nonnegative real vector whose entries sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector {
    entries: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        Self::with_normalization(entries, Normalization::Strict)
    }

    pub fn with_normalization(mut entries: Vec<f64>, mode: Normalization) -> Result<Self> {
        if entries.is_empty() {
            return Err(WalkError::invariant("probability vector", "empty"));
        }
        if let Some(bad) = entries.iter().find(|x| !x.is_finite()) {
            return Err(WalkError::invariant(
                "probability vector",
                format!("non-finite entry {bad}"),
            ));
        }
        let slack = match mode {
            Normalization::Strict => 0.0,
            Normalization::Renormalize => RENORMALIZE_LIMIT,
        };
        for (i, x) in entries.iter_mut().enumerate() {
            if *x < -slack {
                return Err(WalkError::invariant(
                    "probability vector",
                    format!("entry {i} is negative ({x})"),
                ));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let sum: f64 = entries.iter().sum();
        let err = (sum - 1.0).abs();
        if err > SUM_TOL {
            if mode == Normalization::Renormalize && err <= RENORMALIZE_LIMIT {
                entries.iter_mut().for_each(|x| *x /= sum);
            } else {
                return Err(WalkError::invariant(
                    "probability vector",
                    format!("entries sum to {sum}, not 1"),
                ));
            }
        }
        Ok(ProbabilityVector { entries })
    }

    /// Skips validation; for results of operations that preserve the invariants.
    pub(crate) fn from_raw(entries: Vec<f64>) -> Self {
        ProbabilityVector { entries }
    }

    /// The most uncertain vector `u = (1/n, ..., 1/n)`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(WalkError::invariant("probability vector", "empty"));
        }
        Ok(ProbabilityVector {
            entries: vec![1.0 / n as f64; n],
        })
    }

    /// A certain vector: all mass on `index`.
    pub fn delta(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(WalkError::Domain(format!(
                "delta index {index} out of range for length {n}"
            )));
        }
        let mut entries = vec![0.0; n];
        entries[index] = 1.0;
        Ok(ProbabilityVector { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    /// One step `x -> x P`.
    pub fn step(&self, p: &TransitionMatrix) -> Result<ProbabilityVector> {
        WalkError::check_len(p.size(), self.len())?;
        let row = RowDVector::from_row_slice(&self.entries) * &p.entries;
        Ok(ProbabilityVector::from_raw(row.iter().copied().collect()))
    }

    pub fn max_abs_diff(&self, other: &ProbabilityVector) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl AsRef<[f64]> for ProbabilityVector {
    fn as_ref(&self) -> &[f64] {
        &self.entries
    }
}

/// The law `p(g)` of a single step of a walk on a group.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDistribution {
    group: GroupSpec,
    p: ProbabilityVector,
}

impl StepDistribution {
    pub fn new(group: GroupSpec, p: ProbabilityVector) -> Result<Self> {
        WalkError::check_len(group.order(), p.len())?;
        Ok(StepDistribution { group, p })
    }

    pub fn from_weights(group: GroupSpec, weights: Vec<f64>) -> Result<Self> {
        Self::new(group, ProbabilityVector::new(weights)?)
    }

    pub fn uniform(group: GroupSpec) -> Self {
        let p = ProbabilityVector::uniform(group.order()).expect("group order is positive");
        StepDistribution { group, p }
    }

    pub fn delta(group: GroupSpec, index: usize) -> Result<Self> {
        Self::new(group, ProbabilityVector::delta(group.order(), index)?)
    }

    /// Binomial law over element indices: `p(nu) = C(l-1, nu) f^nu (1-f)^(l-1-nu)`.
    pub fn binomial(group: GroupSpec, f: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&f) {
            return Err(WalkError::Domain(format!(
                "binomial parameter f = {f} not in [0, 1]"
            )));
        }
        let trials = group.order() - 1;
        let mut weights = Vec::with_capacity(group.order());
        let mut coeff = 1.0_f64;
        for k in 0..=trials {
            if k > 0 {
                coeff = coeff * (trials - k + 1) as f64 / k as f64;
            }
            weights.push(coeff * f.powi(k as i32) * (1.0 - f).powi((trials - k) as i32));
        }
        Self::new(
            group,
            ProbabilityVector::with_normalization(weights, Normalization::Renormalize)?,
        )
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn probabilities(&self) -> &ProbabilityVector {
        &self.p
    }

    pub fn weight(&self, index: usize) -> f64 {
        self.p.as_slice()[index]
    }
}

/// A square doubly stochastic matrix, optionally certified to lie in `B(G)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    entries: DMatrix<f64>,
    certificate: Option<StepDistribution>,
}

impl TransitionMatrix {
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        Self::with_normalization(entries, Normalization::Strict)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows_with(rows, Normalization::Strict)
    }

    pub fn from_rows_with(rows: &[Vec<f64>], mode: Normalization) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().position(|r| r.len() != n) {
            return Err(WalkError::invariant(
                "transition matrix",
                format!(
                    "row {bad} has length {} but the matrix has {n} rows",
                    rows[bad].len()
                ),
            ));
        }
        let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::with_normalization(m, mode)
    }

    pub fn with_normalization(mut m: DMatrix<f64>, mode: Normalization) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(WalkError::invariant(
                "transition matrix",
                format!(
                    "shape {}x{} is not square and nonempty",
                    m.nrows(),
                    m.ncols()
                ),
            ));
        }
        let slack = match mode {
            Normalization::Strict => 0.0,
            Normalization::Renormalize => RENORMALIZE_LIMIT,
        };
        for ((i, j), x) in indexed(&mut m) {
            if !x.is_finite() || *x < -slack {
                return Err(WalkError::invariant(
                    "transition matrix",
                    format!("entry ({i}, {j}) = {x} is not a nonnegative number"),
                ));
            }
            if *x < 0.0 {
                *x = 0.0;
            }
        }
        let worst = max_margin_error(&m);
        if worst.err > SUM_TOL {
            if mode == Normalization::Renormalize && worst.err <= RENORMALIZE_LIMIT {
                sinkhorn(&mut m);
            } else {
                return Err(WalkError::invariant("transition matrix", worst.describe()));
            }
        }
        Ok(TransitionMatrix {
            entries: m,
            certificate: None,
        })
    }

    pub(crate) fn from_raw(entries: DMatrix<f64>, certificate: Option<StepDistribution>) -> Self {
        TransitionMatrix {
            entries,
            certificate,
        }
    }

    /// `(1/n) J_n`, the matrix with every entry equal to `1/n`.
    pub fn uniform(n: usize) -> Self {
        TransitionMatrix::from_raw(DMatrix::from_element(n, n, 1.0 / n as f64), None)
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[(row, col)]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries
            .row_iter()
            .map(|r| r.iter().copied().collect())
            .collect()
    }

    /// The step distribution proving membership in `B(G)`, if known.
    pub fn certificate(&self) -> Option<&StepDistribution> {
        self.certificate.as_ref()
    }

    pub fn with_certificate(mut self, cert: StepDistribution) -> Self {
        self.certificate = Some(cert);
        self
    }

    /// Largest deviation of a row or column sum from 1.
    pub fn margin_error(&self) -> f64 {
        max_margin_error(&self.entries).err
    }

    pub fn product(&self, other: &TransitionMatrix) -> Result<TransitionMatrix> {
        WalkError::check_len(self.size(), other.size())?;
        Ok(TransitionMatrix::from_raw(
            &self.entries * &other.entries,
            None,
        ))
    }

    /// `P^n` by repeated multiplication.
    pub fn power(&self, n: usize) -> TransitionMatrix {
        let mut acc = DMatrix::identity(self.size(), self.size());
        for _ in 0..n {
            acc = &acc * &self.entries;
        }
        TransitionMatrix::from_raw(acc, None)
    }

    pub fn transpose(&self) -> TransitionMatrix {
        TransitionMatrix::from_raw(self.entries.transpose(), None)
    }
}

fn indexed(m: &mut DMatrix<f64>) -> impl Iterator<Item = ((usize, usize), &mut f64)> {
    let nrows = m.nrows();
    m.iter_mut()
        .enumerate()
        .map(move |(k, x)| ((k % nrows, k / nrows), x))
}

struct MarginError {
    err: f64,
    is_row: bool,
    index: usize,
    sum: f64,
}

impl MarginError {
    fn describe(&self) -> String {
        let which = if self.is_row { "row" } else { "column" };
        format!("{which} {} sums to {}, not 1", self.index, self.sum)
    }
}

fn max_margin_error(m: &DMatrix<f64>) -> MarginError {
    let mut worst = MarginError {
        err: 0.0,
        is_row: true,
        index: 0,
        sum: 1.0,
    };
    for (i, row) in m.row_iter().enumerate() {
        let sum = row.sum();
        if (sum - 1.0).abs() > worst.err {
            worst = MarginError {
                err: (sum - 1.0).abs(),
                is_row: true,
                index: i,
                sum,
            };
        }
    }
    for (j, col) in m.column_iter().enumerate() {
        let sum = col.sum();
        if (sum - 1.0).abs() > worst.err {
            worst = MarginError {
                err: (sum - 1.0).abs(),
                is_row: false,
                index: j,
                sum,
            };
        }
    }
    worst
}

fn sinkhorn(m: &mut DMatrix<f64>) {
    for _ in 0..64 {
        for mut row in m.row_iter_mut() {
            let s = row.sum();
            if s > 0.0 {
                row /= s;
            }
        }
        for mut col in m.column_iter_mut() {
            let s = col.sum();
            if s > 0.0 {
                col /= s;
            }
        }
        if max_margin_error(m).err <= SUM_TOL * 0.1 {
            break;
        }
    }
}

/// The group circulant `P[a][b] = p(g_a^{-1} g_b)`, certified by `p`.
pub fn transition_matrix(spec: GroupSpec, p: &StepDistribution) -> Result<TransitionMatrix> {
    WalkError::check_len(spec.order(), p.probabilities().len())?;
    if p.group() != spec {
        return Err(WalkError::Domain(format!(
            "step distribution belongs to {:?}, not {:?}",
            p.group(),
            spec
        )));
    }
    let n = spec.order();
    let w = p.probabilities().as_slice();
    let m = DMatrix::from_fn(n, n, |a, b| {
        w[spec.add_unchecked(spec.inverse_unchecked(a), b)]
    });
    Ok(TransitionMatrix::from_raw(m, Some(p.clone())))
}

/// `q0 P^n`, applying the matrix one step at a time.
pub fn evolve(q0: &ProbabilityVector, p: &TransitionMatrix, n: usize) -> Result<ProbabilityVector> {
    WalkError::check_len(p.size(), q0.len())?;
    let mut q = q0.clone();
    for _ in 0..n {
        q = q.step(p)?;
    }
    Ok(q)
}

/// `q^(0), q^(1), ..., q^(n)`.
pub fn trajectory(
    q0: &ProbabilityVector,
    p: &TransitionMatrix,
    n: usize,
) -> Result<Vec<ProbabilityVector>> {
    WalkError::check_len(p.size(), q0.len())?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(q0.clone());
    for k in 0..n {
        let next = out[k].step(p)?;
        out.push(next);
    }
    Ok(out)
}

/// One eigenvalue of a group circulant together with the character that produces it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Eigenvalue {
    /// Index of the character: `k` for `Z(d)`, `d*j + k` for `Z(d) x Z(d)`.
    pub character: usize,
    pub value: Complex64,
}

/// Eigenvalues of a matrix in `B(G)`, trivial character first.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<Eigenvalue>,
    e_max: f64,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[Eigenvalue] {
        &self.eigenvalues
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.eigenvalues.iter().map(|e| e.value).collect()
    }

    /// Largest modulus over the nontrivial characters (0 for the trivial group).
    pub fn e_max(&self) -> f64 {
        self.e_max
    }

    pub fn is_ergodic(&self, tol: f64) -> bool {
        self.e_max < 1.0 - tol
    }

    /// The `k` at which `e_max^k = epsilon`, i.e. `ln(epsilon) / ln(e_max)`.
    pub fn mixing_time_heuristic(&self, epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0) {
            return Err(WalkError::Domain(format!(
                "epsilon must be positive, got {epsilon}"
            )));
        }
        if !self.is_ergodic(ERGODIC_TOL) {
            return Err(WalkError::NotErgodic(self.e_max));
        }
        if self.e_max == 0.0 {
            return Ok(0.0);
        }
        Ok(epsilon.ln() / self.e_max.ln())
    }
}

/// Eigenvalues via characters: `e_chi = sum_g p(g) chi(g)`.
pub fn spectrum(spec: GroupSpec, p: &StepDistribution) -> Result<Spectrum> {
    WalkError::check_len(spec.order(), p.probabilities().len())?;
    let d = spec.modulus();
    let w = p.probabilities().as_slice();
    let omega = |k: usize| {
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (k % d) as f64 / d as f64)
    };
    let eigenvalues: Vec<Eigenvalue> = (0..spec.order())
        .map(|chi| {
            let value = (0..spec.order())
                .filter(|&g| w[g] != 0.0)
                .map(|g| {
                    let phase = match spec.kind() {
                        GroupKind::Cyclic => chi * g,
                        GroupKind::Product => (chi / d) * (g / d) + (chi % d) * (g % d),
                    };
                    omega(phase) * w[g]
                })
                .sum();
            Eigenvalue {
                character: chi,
                value,
            }
        })
        .collect();
    let e_max = eigenvalues[1..]
        .iter()
        .map(|e| e.value.norm())
        .fold(0.0, f64::max);
    Ok(Spectrum { eigenvalues, e_max })
}

/// Smallest `n <= max_steps` with `||q^(n) - u|| <= epsilon`.
pub fn mixing_time_empirical(
    q0: &ProbabilityVector,
    p: &TransitionMatrix,
    epsilon: f64,
    max_steps: usize,
) -> Result<Option<usize>> {
    WalkError::check_len(p.size(), q0.len())?;
    let u = ProbabilityVector::uniform(q0.len())?;
    let mut q = q0.clone();
    for n in 0..=max_steps {
        if crate::measures::tv_distance(&q, &u)? <= epsilon {
            return Ok(Some(n));
        }
        if n < max_steps {
            q = q.step(p)?;
        }
    }
    Ok(None)
}

/// Recovers `p` with `P = sum_r p(g_r) M(r)` if `P` is a group circulant for `spec`.
pub fn subpolytope_membership(spec: GroupSpec, p: &TransitionMatrix) -> Option<StepDistribution> {
    let n = spec.order();
    if p.size() != n {
        return None;
    }
    // Row 0 holds p(g_0^{-1} g_b) = p(g_b).
    let candidate: Vec<f64> = (0..n).map(|b| p.get(0, b)).collect();
    let dist = ProbabilityVector::with_normalization(candidate, Normalization::Renormalize)
        .ok()
        .and_then(|pv| StepDistribution::new(spec, pv).ok())?;
    let rebuilt = transition_matrix(spec, &dist).ok()?;
    let max_dev = (rebuilt.matrix() - p.matrix()).amax();
    (max_dev <= MEMBERSHIP_TOL).then_some(dist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn z5() -> GroupSpec {
        GroupSpec::cyclic(5).unwrap()
    }

    fn hw3() -> GroupSpec {
        GroupSpec::product(3).unwrap()
    }

    fn hw3_example() -> StepDistribution {
        StepDistribution::from_weights(hw3(), vec![0.3, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0, 0.2, 0.2])
            .unwrap()
    }

    #[test]
    fn probability_vector_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.6, 0.5]).is_err());
        assert!(ProbabilityVector::new(vec![1.1, -0.1]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        assert!(ProbabilityVector::new(vec![0.5, 0.5 + 1e-10]).is_err());
        let fixed = ProbabilityVector::with_normalization(
            vec![0.5, 0.5 + 1e-10],
            Normalization::Renormalize,
        )
        .unwrap();
        assert!((fixed.as_slice().iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(ProbabilityVector::with_normalization(
            vec![0.5, 0.5 + 1e-6],
            Normalization::Renormalize
        )
        .is_err());
    }

    #[test]
    fn z5_matrix_matches_circulant_form() {
        let p = StepDistribution::from_weights(z5(), vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        let m = transition_matrix(z5(), &p).unwrap();
        // p(0) 1 + p(4) X + p(3) X^2 + p(2) X^3 + p(1) X^4
        let x = DMatrix::from_fn(5, 5, |i, j| if i == (j + 1) % 5 { 1.0 } else { 0.0 });
        let mut expected = DMatrix::identity(5, 5) * 0.1;
        let mut xp = DMatrix::identity(5, 5);
        for k in 1..5 {
            xp = &xp * &x;
            expected += &xp * p.weight((5 - k) % 5);
        }
        assert!((m.matrix() - expected).amax() < 1e-15);
        for a in 0..5 {
            for b in 0..5 {
                assert_eq!(m.get(a, b), p.weight((b + 5 - a) % 5));
            }
        }
        assert_eq!(m.certificate(), Some(&p));
    }

    #[test]
    fn uniform_and_delta_matrices() {
        for spec in [z5(), hw3()] {
            let n = spec.order();
            let m = transition_matrix(spec, &StepDistribution::uniform(spec)).unwrap();
            assert!((m.matrix() - TransitionMatrix::uniform(n).matrix()).amax() < 1e-15);
            let id = transition_matrix(spec, &StepDistribution::delta(spec, 0).unwrap()).unwrap();
            assert_eq!(id.matrix(), &DMatrix::<f64>::identity(n, n));
        }
    }

    #[test]
    fn hw3_matrix_matches_permutation_expansion() {
        let g = hw3();
        let p = hw3_example();
        let m = transition_matrix(g, &p).unwrap();
        // Explicit first rows of the 9x9 group circulant.
        let rows: [[usize; 9]; 3] = [
            [0, 1, 2, 3, 4, 5, 6, 7, 8],
            [2, 0, 1, 5, 3, 4, 8, 6, 7],
            [1, 2, 0, 4, 5, 3, 7, 8, 6],
        ];
        for (a, row) in rows.iter().enumerate() {
            for (b, &k) in row.iter().enumerate() {
                assert_eq!(m.get(a, b), p.weight(k));
            }
        }
        let mut expected = DMatrix::<f64>::zeros(9, 9);
        for r in g.elements() {
            expected += g.permutation_rep(r).unwrap().to_dense() * p.weight(r.index());
        }
        assert!((m.matrix() - expected).amax() < 1e-15);
    }

    #[test]
    fn z5_walk_exact_binomial_folding() {
        // q^(8) is Binomial(8, 1/2) folded mod 5: (57, 36, 36, 57, 70) / 256.
        let p = StepDistribution::from_weights(z5(), vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let m = transition_matrix(z5(), &p).unwrap();
        let q0 = ProbabilityVector::delta(5, 0).unwrap();
        let q8 = evolve(&q0, &m, 8).unwrap();
        let expected = [57.0, 36.0, 36.0, 57.0, 70.0].map(|x| x / 256.0);
        for (a, b) in q8.as_slice().iter().zip(expected) {
            assert!((a - b).abs() < 1e-14);
        }
        assert_eq!(evolve(&q0, &m, 0).unwrap(), q0);
        let traj = trajectory(&q0, &m, 8).unwrap();
        assert_eq!(traj.len(), 9);
        assert!(traj[8].max_abs_diff(&q8) < 1e-15);
        assert!(evolve(&ProbabilityVector::uniform(4).unwrap(), &m, 1).is_err());
    }

    #[test]
    fn hw3_walk_reported_trajectory() {
        let m = transition_matrix(hw3(), &hw3_example()).unwrap();
        let q4 = evolve(&ProbabilityVector::delta(9, 0).unwrap(), &m, 4).unwrap();
        let reported = [
            0.088, 0.088, 0.106, 0.108, 0.129, 0.108, 0.139, 0.116, 0.116,
        ];
        for (a, b) in q4.as_slice().iter().zip(reported) {
            assert!((a - b).abs() <= 1e-3, "{a} vs {b}");
        }
    }

    #[test]
    fn spectra_closed_forms() {
        // Z(5), p(0)=p(1)=1/2: |1/2 + 1/2 w^k| = |cos(pi k / 5)|, max = cos(pi/5).
        let p = StepDistribution::from_weights(z5(), vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let s = spectrum(z5(), &p).unwrap();
        assert!((s.eigenvalues()[0].value - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((s.e_max() - (std::f64::consts::PI / 5.0).cos()).abs() < 1e-14);
        assert!(s.is_ergodic(ERGODIC_TOL));

        // HW(3) example: e_max = sqrt(7)/5 from the (j,k) = (0,1) character.
        let s = spectrum(hw3(), &hw3_example()).unwrap();
        assert!((s.e_max() - 7f64.sqrt() / 5.0).abs() < 1e-14);
        assert!((s.e_max() - 0.53).abs() <= 5e-3);

        let s = spectrum(hw3(), &StepDistribution::binomial(hw3(), 0.3).unwrap()).unwrap();
        assert!((s.e_max() - 0.493).abs() <= 5e-3);

        let s = spectrum(hw3(), &StepDistribution::uniform(hw3())).unwrap();
        assert!(s.eigenvalues()[1..].iter().all(|e| e.value.norm() < 1e-15));
        assert!(s.is_ergodic(ERGODIC_TOL));
    }

    #[test]
    fn permutation_walk_is_not_ergodic() {
        let p = StepDistribution::delta(z5(), 1).unwrap();
        let s = spectrum(z5(), &p).unwrap();
        assert!(s
            .eigenvalues()
            .iter()
            .all(|e| (e.value.norm() - 1.0).abs() < 1e-14));
        assert!(!s.is_ergodic(ERGODIC_TOL));
        assert!(matches!(
            s.mixing_time_heuristic(0.1),
            Err(WalkError::NotErgodic(_))
        ));
    }

    fn spectrum_with_emax(e_max: f64) -> Spectrum {
        Spectrum {
            eigenvalues: vec![],
            e_max,
        }
    }

    #[test]
    fn heuristic_mixing_times() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-12;
        assert!(close(
            spectrum_with_emax(0.5).mixing_time_heuristic(0.5).unwrap(),
            1.0
        ));
        assert!(close(
            spectrum_with_emax(0.1).mixing_time_heuristic(0.01).unwrap(),
            2.0
        ));
        let k = spectrum_with_emax(0.80)
            .mixing_time_heuristic(0.12)
            .unwrap();
        assert!(close(k, 0.12f64.ln() / 0.8f64.ln()));
        assert!((k - 9.50).abs() < 5e-3);
        assert_eq!(
            spectrum_with_emax(0.0).mixing_time_heuristic(0.3).unwrap(),
            0.0
        );
        assert!(spectrum_with_emax(0.5).mixing_time_heuristic(0.0).is_err());
    }

    #[test]
    fn empirical_mixing_times() {
        let p = StepDistribution::from_weights(z5(), vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let m = transition_matrix(z5(), &p).unwrap();
        let c = ProbabilityVector::delta(5, 0).unwrap();
        let n = mixing_time_empirical(&c, &m, 0.12, 100).unwrap().unwrap();
        assert!(n <= 8);
        assert_eq!(mixing_time_empirical(&c, &m, 1.0, 100).unwrap(), Some(0));
        let shift = transition_matrix(z5(), &StepDistribution::delta(z5(), 1).unwrap()).unwrap();
        assert_eq!(mixing_time_empirical(&c, &shift, 0.1, 50).unwrap(), None);
    }

    #[test]
    fn membership_round_trip_and_rejection() {
        let p = hw3_example();
        let m = transition_matrix(hw3(), &p).unwrap();
        let recovered = subpolytope_membership(hw3(), &m).unwrap();
        assert!(recovered.probabilities().max_abs_diff(p.probabilities()) < 1e-15);

        let j = TransitionMatrix::uniform(9);
        let u = subpolytope_membership(hw3(), &j).unwrap();
        assert!(
            u.probabilities()
                .max_abs_diff(&ProbabilityVector::uniform(9).unwrap())
                < 1e-15
        );

        let odd = TransitionMatrix::from_rows(&[
            vec![1.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.5],
            vec![0.0, 0.5, 0.5],
        ])
        .unwrap();
        assert!(subpolytope_membership(GroupSpec::cyclic(3).unwrap(), &odd).is_none());
        // Z(5)-circulant is not a Z(3)xZ(3) circulant and sizes differ anyway.
        assert!(subpolytope_membership(
            hw3(),
            &transition_matrix(z5(), &StepDistribution::uniform(z5())).unwrap()
        )
        .is_none());
    }

    #[test]
    fn product_group_circulant_is_not_cyclic_circulant() {
        let m = transition_matrix(hw3(), &hw3_example()).unwrap();
        assert!(subpolytope_membership(GroupSpec::cyclic(9).unwrap(), &m).is_none());
    }

    #[test]
    fn transition_matrix_validation() {
        let bad = TransitionMatrix::from_rows(&[
            vec![0.5, 0.5, 0.0],
            vec![0.5, 0.5, 0.0],
            vec![0.1, 0.0, 1.0],
        ]);
        match bad {
            Err(WalkError::Invariant { reason, .. }) => {
                assert!(reason.contains("row 2"), "{reason}")
            }
            other => panic!("expected invariant error, got {other:?}"),
        }
        assert!(TransitionMatrix::from_rows(&[vec![1.0, 0.0]]).is_err());
        let near = vec![vec![0.5 + 2e-10, 0.5 - 2e-10], vec![0.5, 0.5]];
        assert!(TransitionMatrix::from_rows(&near).is_err());
        let fixed = TransitionMatrix::from_rows_with(&near, Normalization::Renormalize).unwrap();
        assert!(fixed.margin_error() <= SUM_TOL);
    }

    #[test]
    fn ergodic_limit_rate() {
        let p = StepDistribution::from_weights(z5(), vec![0.5, 0.5, 0.0, 0.0, 0.0]).unwrap();
        let m = transition_matrix(z5(), &p).unwrap();
        let e_max = spectrum(z5(), &p).unwrap().e_max();
        let j = TransitionMatrix::uniform(5);
        let mut last = f64::INFINITY;
        for k in [10, 20, 40] {
            let dev = (m.power(k).matrix() - j.matrix()).amax();
            assert!(dev <= e_max.powi(k as i32) * 5.0);
            assert!(dev < last);
            last = dev;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn binomial_helper() {
        let p = StepDistribution::binomial(hw3(), 0.3).unwrap();
        assert!((p.weight(0) - 0.7f64.powi(8)).abs() < 1e-15);
        assert!((p.weight(8) - 0.3f64.powi(8)).abs() < 1e-18);
        assert!((p.weight(3) - 56.0 * 0.3f64.powi(3) * 0.7f64.powi(5)).abs() < 1e-15);
        assert!(StepDistribution::binomial(hw3(), 1.5).is_err());
    }
}
