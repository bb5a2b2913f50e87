//! Non-selective measurements and random unitary channels.

use num_complex::Complex64;

use super::operators::unitarity_defect;
use super::states::{CoherentFamily, DensityMatrix, FiducialVector};
use super::ComplexMatrix;
use crate::birkhoff::{Normalization, ProbabilityVector};
use crate::error::{Result, WalkError};

/// Largest `|U U^dagger - 1|` entry accepted for a channel unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Probabilities `p_a` of the unitaries in a random unitary channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelWeights(ProbabilityVector);

impl ChannelWeights {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        Ok(ChannelWeights(ProbabilityVector::new(weights)?))
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Ok(ChannelWeights(ProbabilityVector::uniform(n)?))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn probabilities(&self) -> &ProbabilityVector {
        &self.0
    }
}

impl From<ProbabilityVector> for ChannelWeights {
    fn from(p: ProbabilityVector) -> Self {
        ChannelWeights(p)
    }
}

/// Outcome probabilities from the diagonal of a (nearly) trace-one operator.
fn outcome_distribution(raw: Vec<f64>) -> Result<ProbabilityVector> {
    ProbabilityVector::with_normalization(raw, Normalization::Renormalize)
}

/// Position-basis measurement with the outcome discarded:
/// `sigma = sum_j q_j |X;j><X;j|`, `q_j = <X;j|rho|X;j>`.
pub fn projective_nonselective(rho: &DensityMatrix) -> Result<(DensityMatrix, ProbabilityVector)> {
    let d = rho.dim();
    let q = outcome_distribution((0..d).map(|j| rho.matrix()[(j, j)].re).collect())?;
    let mut sigma = ComplexMatrix::zeros(d, d);
    for (j, &p) in q.as_slice().iter().enumerate() {
        sigma[(j, j)] = Complex64::new(p, 0.0);
    }
    Ok((DensityMatrix::new(sigma)?, q))
}

/// Result of a non-selective coherent-state POVM measurement.
#[derive(Debug, Clone)]
pub struct PovmMeasurement {
    /// `sigma = sum_nu q_nu Pi(nu)`.
    pub sigma: DensityMatrix,
    /// `q_nu = Tr[rho Pi(nu)] / d` over the `d^2` outcomes.
    pub outcomes: ProbabilityVector,
    /// The part `rho - sigma` destroyed by the measurement; traceless.
    pub residual: ComplexMatrix,
}

pub fn povm_nonselective(rho: &DensityMatrix, eta: &FiducialVector) -> Result<PovmMeasurement> {
    povm_with_family(rho, &CoherentFamily::new(eta))
}

pub fn povm_with_family(rho: &DensityMatrix, family: &CoherentFamily) -> Result<PovmMeasurement> {
    let d = family.dim();
    WalkError::check_len(d, rho.dim())?;
    let raw: Vec<f64> = family
        .states()
        .iter()
        .map(|c| rho.expectation(c) / d as f64)
        .collect();
    let outcomes = outcome_distribution(raw)?;
    let mut sigma = ComplexMatrix::zeros(d, d);
    for (nu, &p) in outcomes.as_slice().iter().enumerate() {
        if p != 0.0 {
            sigma += family.projector(nu) * Complex64::new(p, 0.0);
        }
    }
    let residual = rho.matrix() - &sigma;
    Ok(PovmMeasurement {
        sigma: DensityMatrix::new(sigma)?,
        outcomes,
        residual,
    })
}

fn check_family(family: &[ComplexMatrix], weights: &ChannelWeights, d: usize) -> Result<()> {
    WalkError::check_len(family.len(), weights.len())?;
    for (a, u) in family.iter().enumerate() {
        if u.nrows() != d || u.ncols() != d {
            return Err(WalkError::DimensionMismatch {
                expected: d,
                got: u.nrows(),
            });
        }
        let defect = unitarity_defect(u);
        if !(defect <= UNITARY_TOL) {
            return Err(WalkError::Domain(format!(
                "channel member {a} is not unitary (defect {defect:e})"
            )));
        }
    }
    Ok(())
}

/// `rho -> sum_a p_a U_a rho U_a^dagger`.
pub fn random_unitary_channel(
    rho: &DensityMatrix,
    family: &[ComplexMatrix],
    weights: &ChannelWeights,
) -> Result<DensityMatrix> {
    let d = rho.dim();
    check_family(family, weights, d)?;
    let mut out = ComplexMatrix::zeros(d, d);
    for (u, &p) in family.iter().zip(weights.as_slice()) {
        if p != 0.0 {
            out += u * rho.matrix() * u.adjoint() * Complex64::new(p, 0.0);
        }
    }
    DensityMatrix::new(out)
}

pub(crate) fn validate_family(
    family: &[ComplexMatrix],
    weights: &ChannelWeights,
    d: usize,
) -> Result<()> {
    check_family(family, weights, d)
}
