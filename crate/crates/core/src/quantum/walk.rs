//! Random walks realized by repeated non-selective measurements.
//!
//! Between measurements the state passes through a random unitary channel.
//! The measured outcome distributions then follow a classical walk whose
//! transition matrix is `V` (position measurements, shifts `X^a`) or `W`
//! (coherent-state POVM, displacements `D(a)`).

use nalgebra::DMatrix;

use super::channels::{
    povm_with_family, projective_nonselective, random_unitary_channel, validate_family,
    ChannelWeights,
};
use super::operators::{displacement_indexed, require_odd, shift_power};
use super::states::{CoherentFamily, DensityMatrix, FiducialVector};
use super::ComplexMatrix;
use crate::birkhoff::{
    subpolytope_membership, Normalization, ProbabilityVector, StepDistribution, TransitionMatrix,
};
use crate::error::{Result, WalkError};
use crate::group::GroupSpec;

/// Attaches a `B(G)` certificate when `m` is a group circulant for `spec`.
fn certify(m: TransitionMatrix, spec: GroupSpec) -> TransitionMatrix {
    match subpolytope_membership(spec, &m) {
        Some(cert) => m.with_certificate(cert),
        None => m,
    }
}

/// `V[k][j] = sum_a p_a |<X;j|U_a|X;k>|^2` for an arbitrary unitary family.
///
/// The result is doubly stochastic; it carries a `B(Z(d))` certificate only
/// when it happens to be a cyclic circulant.
pub fn projective_transition_for(
    family: &[ComplexMatrix],
    weights: &ChannelWeights,
) -> Result<TransitionMatrix> {
    let d = family.first().map(|u| u.nrows()).unwrap_or(0);
    if d < 2 {
        return Err(WalkError::Domain(
            "channel family must act on d >= 2".into(),
        ));
    }
    validate_family(family, weights, d)?;
    let mut v = DMatrix::zeros(d, d);
    for (u, &p) in family.iter().zip(weights.as_slice()) {
        for k in 0..d {
            for j in 0..d {
                v[(k, j)] += p * u[(j, k)].norm_sqr();
            }
        }
    }
    let m = TransitionMatrix::with_normalization(v, Normalization::Renormalize)?;
    Ok(certify(m, GroupSpec::cyclic(d)?))
}

/// `V` for the shift family `U_a = X^a`, `a = 0..d-1`: the cyclic circulant of the weights.
pub fn projective_walk_transition(weights: &ChannelWeights) -> Result<TransitionMatrix> {
    let d = weights.len();
    if d < 2 {
        return Err(WalkError::Domain(format!(
            "need d >= 2 shift weights, got {d}"
        )));
    }
    let family: Vec<ComplexMatrix> = (0..d).map(|a| shift_power(d, a)).collect();
    projective_transition_for(&family, weights)
}

/// `W[nu][mu] = (1/d) sum_a p_a |<C;mu|D(a)|C;nu>|^2` over `a = 0..d^2-1`.
pub fn povm_walk_transition(
    eta: &FiducialVector,
    weights: &ChannelWeights,
) -> Result<TransitionMatrix> {
    let family = CoherentFamily::new(eta);
    let d = family.dim();
    require_odd(d)?;
    WalkError::check_len(d * d, weights.len())?;
    let displacements = displacement_family(d)?;
    povm_transition_matrix(&family, &displacements, weights)
}

fn displacement_family(d: usize) -> Result<Vec<ComplexMatrix>> {
    (0..d * d).map(|a| displacement_indexed(d, a)).collect()
}

fn povm_transition_matrix(
    family: &CoherentFamily,
    unitaries: &[ComplexMatrix],
    weights: &ChannelWeights,
) -> Result<TransitionMatrix> {
    let d = family.dim();
    let n = d * d;
    let mut w = DMatrix::zeros(n, n);
    for (u, &p) in unitaries.iter().zip(weights.as_slice()) {
        if p == 0.0 {
            continue;
        }
        for nu in 0..n {
            let moved = u * family.state(nu);
            for mu in 0..n {
                w[(nu, mu)] += p * family.state(mu).dotc(&moved).norm_sqr() / d as f64;
            }
        }
    }
    let m = TransitionMatrix::with_normalization(w, Normalization::Renormalize)?;
    Ok(certify(m, GroupSpec::product(d)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeasurementMode {
    /// Position-basis projectors, shifts `X^a` between measurements.
    Projective,
    /// Coherent-state POVM, displacements `D(a)` between measurements.
    Povm,
}

/// A simulated measurement sequence and the classical matrix that explains it.
#[derive(Debug, Clone)]
pub struct MeasuredWalk {
    /// Outcome distributions `q^(0), ..., q^(n)`.
    pub trajectory: Vec<ProbabilityVector>,
    /// Post-measurement states `sigma(0), ..., sigma(n)`.
    pub states: Vec<DensityMatrix>,
    /// `V` or `W`.
    pub transition: TransitionMatrix,
    /// Smallest eigenvalue of every density matrix produced along the way.
    pub min_eigenvalue: f64,
    /// Largest `|Tr - 1|` of every density matrix produced along the way.
    pub max_trace_error: f64,
}

/// Simulates `rho(0) -> sigma(0) -> rho(1) -> sigma(1) -> ...` for `steps` channel applications.
pub fn measured_walk(
    rho0: &DensityMatrix,
    mode: MeasurementMode,
    weights: &ChannelWeights,
    fiducial: Option<&FiducialVector>,
    steps: usize,
) -> Result<MeasuredWalk> {
    let d = rho0.dim();
    let (unitaries, family) = match mode {
        MeasurementMode::Projective => {
            if d < 2 {
                return Err(WalkError::Domain("projective walk needs d >= 2".into()));
            }
            WalkError::check_len(d, weights.len())?;
            ((0..d).map(|a| shift_power(d, a)).collect::<Vec<_>>(), None)
        }
        MeasurementMode::Povm => {
            let eta = fiducial
                .ok_or_else(|| WalkError::Domain("POVM walk requires a fiducial vector".into()))?;
            require_odd(d)?;
            WalkError::check_len(d, eta.dim())?;
            WalkError::check_len(d * d, weights.len())?;
            (displacement_family(d)?, Some(CoherentFamily::new(eta)))
        }
    };
    let measure = |rho: &DensityMatrix| -> Result<(DensityMatrix, ProbabilityVector)> {
        match &family {
            None => projective_nonselective(rho),
            Some(fam) => povm_with_family(rho, fam).map(|m| (m.sigma, m.outcomes)),
        }
    };
    let transition = match &family {
        None => projective_transition_for(&unitaries, weights)?,
        Some(fam) => povm_transition_matrix(fam, &unitaries, weights)?,
    };

    let mut min_eigenvalue = rho0.min_eigenvalue();
    let mut max_trace_error = (rho0.trace().re - 1.0).abs();
    let mut track = |rho: &DensityMatrix| {
        min_eigenvalue = min_eigenvalue.min(rho.min_eigenvalue());
        max_trace_error = max_trace_error.max((rho.trace() - 1.0).norm());
    };

    let (sigma, q) = measure(rho0)?;
    track(&sigma);
    let mut states = vec![sigma];
    let mut trajectory = vec![q];
    for _ in 0..steps {
        let rho = random_unitary_channel(states.last().expect("nonempty"), &unitaries, weights)?;
        track(&rho);
        let (sigma, q) = measure(&rho)?;
        track(&sigma);
        states.push(sigma);
        trajectory.push(q);
    }
    Ok(MeasuredWalk {
        trajectory,
        states,
        transition,
        min_eigenvalue,
        max_trace_error,
    })
}

/// Step distribution of `V` or `W` when it lies in `B(G)`.
pub fn induced_step_distribution(walk: &MeasuredWalk) -> Option<&StepDistribution> {
    walk.transition.certificate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::birkhoff::{evolve, transition_matrix};
    use crate::quantum::operators::{fourier_matrix, unitarity_defect};

    #[test]
    fn shift_with_certainty_gives_regular_permutation() {
        let v = projective_walk_transition(
            &ChannelWeights::new(vec![0.0, 1.0, 0.0, 0.0, 0.0]).unwrap(),
        )
        .unwrap();
        let z5 = GroupSpec::cyclic(5).unwrap();
        let m1 = z5
            .permutation_rep(z5.element(1).unwrap())
            .unwrap()
            .to_dense();
        assert_eq!(v.matrix(), &m1);
        // The 0/1 pattern of the unitary X, read in row-vector convention.
        let x = shift_power(5, 1).map(|c| c.re);
        assert_eq!(v.matrix(), &x.transpose());
        assert_eq!(v.certificate().unwrap().weight(1), 1.0);
    }

    #[test]
    fn uniform_shift_weights_give_flat_matrix() {
        let v = projective_walk_transition(&ChannelWeights::uniform(4).unwrap()).unwrap();
        assert!((v.matrix() - TransitionMatrix::uniform(4).matrix()).amax() < 1e-15);
    }

    #[test]
    fn shift_weights_are_the_certificate() {
        let w = ChannelWeights::new(vec![0.1, 0.4, 0.2, 0.3]).unwrap();
        let v = projective_walk_transition(&w).unwrap();
        let cert = v.certificate().expect("V lies in B(Z(d))");
        assert!(cert.probabilities().max_abs_diff(w.probabilities()) < 1e-15);
        let z4 = GroupSpec::cyclic(4).unwrap();
        let direct = transition_matrix(z4, cert).unwrap();
        assert!((direct.matrix() - v.matrix()).amax() < 1e-15);
    }

    #[test]
    fn general_unitary_reports_membership() {
        // The Fourier transform gives a doubly stochastic V = J/d, which is in B(Z(d)).
        let f = fourier_matrix(3).unwrap();
        let v = projective_transition_for(&[f], &ChannelWeights::new(vec![1.0]).unwrap()).unwrap();
        assert!(v.margin_error() < 1e-12);
        assert!(v.certificate().is_some());
        // A real rotation mixing only the first two levels: doubly stochastic, not circulant.
        let (c, s) = (0.6f64, 0.8f64);
        let rot = ComplexMatrix::from_row_slice(
            3,
            3,
            &[c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0].map(|x| num_complex::Complex64::new(x, 0.0)),
        );
        assert!(unitarity_defect(&rot) < 1e-15);
        let v =
            projective_transition_for(&[rot], &ChannelWeights::new(vec![1.0]).unwrap()).unwrap();
        assert!(v.margin_error() < 1e-12);
        assert!(v.certificate().is_none());
    }

    #[test]
    fn povm_transition_uniform_and_single() {
        let d = 3;
        let eta = FiducialVector::from_seed(d, 3).unwrap();
        let w = povm_walk_transition(&eta, &ChannelWeights::uniform(d * d).unwrap()).unwrap();
        assert!((w.matrix() - TransitionMatrix::uniform(d * d).matrix()).amax() < 1e-10);

        let mut single = vec![0.0; d * d];
        single[0] = 1.0;
        let w = povm_walk_transition(&eta, &ChannelWeights::new(single).unwrap()).unwrap();
        let fam = CoherentFamily::new(&eta);
        for nu in 0..d * d {
            for mu in 0..d * d {
                let expected = fam.state(mu).dotc(fam.state(nu)).norm_sqr() / d as f64;
                assert!((w.get(nu, mu) - expected).abs() < 1e-14);
            }
        }
        assert!(w.margin_error() < 1e-10);
    }

    #[test]
    fn povm_transition_near_uniform_is_certified() {
        let d = 3;
        let eta = FiducialVector::from_seed(d, 4).unwrap();
        let eps = [0.01, -0.02, 0.005, 0.0, 0.015, -0.01, 0.0, 0.01, -0.01];
        let weights: Vec<f64> = eps.iter().map(|e| 1.0 / 9.0 + e).collect();
        let w = povm_walk_transition(&eta, &ChannelWeights::new(weights).unwrap()).unwrap();
        assert!(w.certificate().is_some());
    }

    #[test]
    fn projective_shift_walk_moves_deterministically() {
        let d = 5;
        let w = ChannelWeights::new(vec![0.0, 1.0, 0.0, 0.0, 0.0]).unwrap();
        let rho0 = DensityMatrix::basis_state(d, 0).unwrap();
        let walk = measured_walk(&rho0, MeasurementMode::Projective, &w, None, 3).unwrap();
        assert_eq!(walk.trajectory[3], ProbabilityVector::delta(d, 3).unwrap());
        let walk0 = measured_walk(&rho0, MeasurementMode::Projective, &w, None, 0).unwrap();
        assert_eq!(walk0.trajectory.len(), 1);
        assert_eq!(walk0.trajectory[0], ProbabilityVector::delta(d, 0).unwrap());
    }

    #[test]
    fn bridge_projective() {
        let d = 5;
        let w = ChannelWeights::new(vec![0.3, 0.25, 0.0, 0.05, 0.4]).unwrap();
        let rho0 = DensityMatrix::momentum_state(d, 2).unwrap();
        let walk = measured_walk(&rho0, MeasurementMode::Projective, &w, None, 12).unwrap();
        for (n, q) in walk.trajectory.iter().enumerate() {
            let classical = evolve(&walk.trajectory[0], &walk.transition, n).unwrap();
            assert!(q.max_abs_diff(&classical) < 1e-9);
        }
        assert!(walk.min_eigenvalue >= -1e-9);
        assert!(walk.max_trace_error < 1e-10);
    }

    #[test]
    fn bridge_povm() {
        let d = 3;
        let eta = FiducialVector::from_seed(d, 77).unwrap();
        let weights: Vec<f64> = (1..=9).map(|k| k as f64 / 45.0).collect();
        let w = ChannelWeights::new(weights).unwrap();
        let rho0 = DensityMatrix::basis_state(d, 1).unwrap();
        let walk = measured_walk(&rho0, MeasurementMode::Povm, &w, Some(&eta), 6).unwrap();
        assert_eq!(walk.trajectory[0].len(), 9);
        for (n, q) in walk.trajectory.iter().enumerate() {
            let classical = evolve(&walk.trajectory[0], &walk.transition, n).unwrap();
            assert!(q.max_abs_diff(&classical) < 1e-9);
        }
        assert!(walk.min_eigenvalue >= -1e-9);
    }

    #[test]
    fn povm_uniform_weights_flatten_in_one_step() {
        let d = 3;
        let eta = FiducialVector::from_seed(d, 5).unwrap();
        let w = ChannelWeights::uniform(9).unwrap();
        let rho0 = DensityMatrix::basis_state(d, 2).unwrap();
        let walk = measured_walk(&rho0, MeasurementMode::Povm, &w, Some(&eta), 1).unwrap();
        assert!(walk.trajectory[1].max_abs_diff(&ProbabilityVector::uniform(9).unwrap()) < 1e-10);
    }

    #[test]
    fn inconsistent_inputs() {
        let rho0 = DensityMatrix::basis_state(3, 0).unwrap();
        let w3 = ChannelWeights::uniform(3).unwrap();
        assert!(measured_walk(&rho0, MeasurementMode::Povm, &w3, None, 1).is_err());
        let eta = FiducialVector::from_seed(3, 1).unwrap();
        assert!(measured_walk(&rho0, MeasurementMode::Povm, &w3, Some(&eta), 1).is_err());
        assert!(measured_walk(
            &rho0,
            MeasurementMode::Projective,
            &ChannelWeights::uniform(9).unwrap(),
            None,
            1
        )
        .is_err());
        let rho4 = DensityMatrix::basis_state(4, 0).unwrap();
        let eta5 = FiducialVector::from_seed(5, 1).unwrap();
        assert!(measured_walk(
            &rho4,
            MeasurementMode::Povm,
            &ChannelWeights::uniform(16).unwrap(),
            Some(&eta5),
            1
        )
        .is_err());
        // Even d is fine for the projective realization.
        assert!(measured_walk(
            &rho4,
            MeasurementMode::Projective,
            &ChannelWeights::uniform(4).unwrap(),
            None,
            2
        )
        .is_ok());
    }
}
