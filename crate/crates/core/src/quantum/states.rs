//! Density matrices, fiducial vectors and coherent states.

use itertools::Itertools;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::operators::{displacement_indexed, fourier_matrix, half, omega, require_odd};
use super::{ComplexMatrix, StateVector};
use crate::error::{Result, WalkError};
use crate::linalg;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues below this reject a density matrix.
pub const PSD_FLOOR: f64 = -1e-9;
pub const FIDUCIAL_NORM_TOL: f64 = 1e-12;
/// Minimum `|det|` of any `d` coherent states in the exhaustive screen.
pub const INDEPENDENCE_DET_TOL: f64 = 1e-8;

/// A Hermitian, unit-trace, positive semidefinite `d x d` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: ComplexMatrix,
    min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let n = m.nrows();
        if n == 0 || m.ncols() != n {
            return Err(WalkError::invariant(
                "density matrix",
                format!("shape {}x{} is not square", m.nrows(), m.ncols()),
            ));
        }
        let asym = super::max_modulus(&(&m - m.adjoint()));
        if !(asym <= HERMITIAN_TOL) {
            return Err(WalkError::invariant(
                "density matrix",
                format!("not Hermitian (max |rho - rho^dagger| = {asym:e})"),
            ));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(WalkError::invariant(
                "density matrix",
                format!("trace is {tr}, not 1"),
            ));
        }
        let herm = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let min_eigenvalue = linalg::hermitian_eigenvalues(&herm)?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eigenvalue < PSD_FLOOR {
            return Err(WalkError::invariant(
                "density matrix",
                format!("not positive semidefinite (eigenvalue {min_eigenvalue:e})"),
            ));
        }
        Ok(DensityMatrix {
            m: herm,
            min_eigenvalue,
        })
    }

    /// `|psi><psi|` for a state that is normalized here.
    pub fn pure(psi: &StateVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0) {
            return Err(WalkError::Domain("cannot normalize a zero state".into()));
        }
        let v = psi / Complex64::new(norm, 0.0);
        Self::new(&v * v.adjoint())
    }

    /// Position eigenstate `|X;j><X;j|`.
    pub fn basis_state(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(WalkError::Domain(format!("basis index {j} >= d = {d}")));
        }
        let mut m = DMatrix::zeros(d, d);
        m[(j, j)] = Complex64::new(1.0, 0.0);
        Self::new(m)
    }

    /// Momentum eigenstate `F|X;j>`.
    pub fn momentum_state(d: usize, j: usize) -> Result<Self> {
        if j >= d {
            return Err(WalkError::Domain(format!("momentum index {j} >= d = {d}")));
        }
        let f = fourier_matrix(d)?;
        Self::pure(&f.column(j).into_owned())
    }

    pub fn maximally_mixed(d: usize) -> Result<Self> {
        Self::new(ComplexMatrix::identity(d, d) * Complex64::new(1.0 / d as f64, 0.0))
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.m
    }

    /// Smallest eigenvalue found during validation.
    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn trace(&self) -> Complex64 {
        self.m.trace()
    }

    /// `<psi| rho |psi>`, real for Hermitian `rho`.
    pub fn expectation(&self, psi: &StateVector) -> f64 {
        (psi.adjoint() * &self.m * psi)[(0, 0)].re
    }
}

/// How thoroughly [`FiducialVector`] checks that its coherent states are generic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GenericityCheck {
    /// All `C(d^2, d)` subsets at `d = 3`; a rank and overlap screen above that.
    #[default]
    Standard,
    /// All `C(d^2, d)` subsets at every `d`. Combinatorial in cost.
    Exhaustive,
}

/// Seed state `eta` of a coherent-state family.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialVector {
    eta: StateVector,
}

impl FiducialVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::with_check(amplitudes, GenericityCheck::Standard)
    }

    pub fn with_check(amplitudes: Vec<Complex64>, check: GenericityCheck) -> Result<Self> {
        let d = amplitudes.len();
        require_odd(d)?;
        let eta = DVector::from_vec(amplitudes);
        let norm = eta.norm();
        if (norm - 1.0).abs() > FIDUCIAL_NORM_TOL {
            return Err(WalkError::invariant(
                "fiducial vector",
                format!("norm is {norm}, not 1"),
            ));
        }
        let fid = FiducialVector { eta };
        fid.screen(check)?;
        Ok(fid)
    }

    /// Normalizes `amplitudes` before validating.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(WalkError::Domain("fiducial vector is zero".into()));
        }
        Self::new(amplitudes.into_iter().map(|a| a / norm).collect())
    }

    /// Deterministic pseudo-random fiducial: amplitudes uniform in the unit square, normalized.
    pub fn from_seed(d: usize, seed: u64) -> Result<Self> {
        require_odd(d)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last_err = None;
        for _ in 0..32 {
            let amps: Vec<Complex64> = (0..d)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            match Self::normalized(amps) {
                Ok(f) => return Ok(f),
                Err(e) => last_err = Some(e),
            }
        }
        Err(last_err.expect("loop ran"))
    }

    pub fn dim(&self) -> usize {
        self.eta.len()
    }

    pub fn amplitudes(&self) -> &StateVector {
        &self.eta
    }

    fn screen(&self, check: GenericityCheck) -> Result<()> {
        let d = self.dim();
        let family = CoherentFamily::build(self);
        let exhaustive = d == 3 || check == GenericityCheck::Exhaustive;
        if exhaustive {
            for subset in (0..d * d).combinations(d) {
                let m = DMatrix::from_fn(d, d, |r, c| family.states[subset[c]][r]);
                let det = m.determinant().norm();
                if det <= INDEPENDENCE_DET_TOL {
                    return Err(WalkError::invariant(
                        "fiducial vector",
                        format!(
                            "coherent states {subset:?} are linearly dependent (|det| = {det:e})"
                        ),
                    ));
                }
            }
            return Ok(());
        }
        let stacked = DMatrix::from_fn(d, d * d, |r, c| family.states[c][r]);
        let rank = linalg::complex_singular_values(&stacked)?
            .iter()
            .filter(|&&s| s > INDEPENDENCE_DET_TOL)
            .count();
        if rank < d {
            return Err(WalkError::invariant(
                "fiducial vector",
                format!("coherent family has rank {rank} < {d}"),
            ));
        }
        for (nu, mu) in (0..d * d).tuple_combinations() {
            let overlap = family.states[nu].dotc(&family.states[mu]).norm();
            if overlap > 1.0 - 1e-9 {
                return Err(WalkError::invariant(
                    "fiducial vector",
                    format!("coherent states {nu} and {mu} differ only by a phase"),
                ));
            }
        }
        Ok(())
    }
}

/// `|C;nu> = D(nu)|eta>`.
pub fn coherent_state(eta: &FiducialVector, nu: usize) -> Result<StateVector> {
    let d = eta.dim();
    Ok(displacement_indexed(d, nu)? * eta.amplitudes())
}

/// Closed form `<X;r|C;alpha,beta> = omega(-2^{-1} alpha beta + alpha r) eta_{r - beta}`.
pub fn coherent_component(eta: &FiducialVector, alpha: usize, beta: usize, r: usize) -> Complex64 {
    let d = eta.dim();
    let phase = -half(d) * (alpha * beta) as i64 + (alpha * r) as i64;
    omega(d, phase) * eta.amplitudes()[(r + d * d - beta) % d]
}

/// All `d^2` coherent states of a fiducial, with their projectors' normalization `1/d`.
#[derive(Debug, Clone)]
pub struct CoherentFamily {
    d: usize,
    states: Vec<StateVector>,
}

impl CoherentFamily {
    pub fn new(eta: &FiducialVector) -> Self {
        Self::build(eta)
    }

    fn build(eta: &FiducialVector) -> Self {
        let d = eta.dim();
        let states = (0..d * d)
            .map(|nu| coherent_state(eta, nu).expect("index below d^2, odd d"))
            .collect();
        CoherentFamily { d, states }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn state(&self, nu: usize) -> &StateVector {
        &self.states[nu]
    }

    /// `Pi(nu) = |C;nu><C;nu|`.
    pub fn projector(&self, nu: usize) -> ComplexMatrix {
        &self.states[nu] * self.states[nu].adjoint()
    }

    /// `(1/d) sum_nu Pi(nu)`, which equals the identity for a valid fiducial.
    pub fn resolution(&self) -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(self.d, self.d);
        for nu in 0..self.d * self.d {
            acc += self.projector(nu);
        }
        acc / Complex64::new(self.d as f64, 0.0)
    }
}
