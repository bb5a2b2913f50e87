//! Physical realizations of the walks on `Z(d)` and `Z(d) x Z(d)` by sequences
//! of non-selective quantum measurements on a `d`-level system.
//!
//! Everything that depends on displacement operators requires odd `d`, since
//! `2^{-1} = (d+1)/2` must exist in `Z(d)`.

mod channels;
mod operators;
mod states;
mod walk;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type StateVector = DVector<Complex64>;

pub use channels::{
    povm_nonselective, povm_with_family, projective_nonselective, random_unitary_channel,
    ChannelWeights, PovmMeasurement, UNITARY_TOL,
};
pub use operators::{
    clock_power, displacement, displacement_indexed, fourier_matrix, half, omega, require_odd,
    shift_power, unitarity_defect,
};
pub use states::{
    coherent_component, coherent_state, CoherentFamily, DensityMatrix, FiducialVector,
    GenericityCheck, PSD_FLOOR,
};
pub use walk::{
    induced_step_distribution, measured_walk, povm_walk_transition, projective_transition_for,
    projective_walk_transition, MeasuredWalk, MeasurementMode,
};

/// Largest entry modulus of a complex matrix.
pub fn max_modulus(m: &ComplexMatrix) -> f64 {
    m.iter().fold(0.0, |acc, c| acc.max(c.norm()))
}
