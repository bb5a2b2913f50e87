//! Finite Fourier transform and Weyl-Heisenberg displacement operators on `C^d`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ComplexMatrix;
use crate::error::{Result, WalkError};

/// `omega(k) = exp(2 pi i k / d)`, with `k` taken modulo `d`.
pub fn omega(d: usize, k: i64) -> Complex64 {
    let r = k.rem_euclid(d as i64);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * r as f64 / d as f64)
}

/// Rejects even or too-small dimensions for displacement-dependent objects.
pub fn require_odd(d: usize) -> Result<()> {
    if d >= 3 && d % 2 == 1 {
        Ok(())
    } else {
        Err(WalkError::Unsupported(format!(
            "displacement operators need an odd dimension d >= 3, got {d}"
        )))
    }
}

/// The inverse of 2 in `Z(d)` for odd `d`.
pub fn half(d: usize) -> i64 {
    d.div_ceil(2) as i64
}

/// `F[j][k] = omega(jk) / sqrt(d)`.
pub fn fourier_matrix(d: usize) -> Result<ComplexMatrix> {
    require_odd(d)?;
    let norm = 1.0 / (d as f64).sqrt();
    Ok(DMatrix::from_fn(d, d, |j, k| {
        omega(d, (j * k) as i64) * norm
    }))
}

/// Shift `X^b`: `|X;j> -> |X;j+b>`. Defined for every `d >= 1`.
pub fn shift_power(d: usize, b: usize) -> ComplexMatrix {
    DMatrix::from_fn(d, d, |row, col| {
        if row == (col + b) % d {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Clock `Z^a = diag(omega(a j))`.
pub fn clock_power(d: usize, a: usize) -> ComplexMatrix {
    DMatrix::from_fn(d, d, |row, col| {
        if row == col {
            omega(d, (a * row) as i64)
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `D(alpha, beta)|X;j> = omega(2^{-1} alpha beta + alpha j) |X;j+beta>`.
pub fn displacement(d: usize, alpha: usize, beta: usize) -> Result<ComplexMatrix> {
    require_odd(d)?;
    let (alpha, beta) = (alpha % d, beta % d);
    let h = half(d);
    let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
    for j in 0..d {
        let phase = h * (alpha * beta) as i64 + (alpha * j) as i64;
        m[((j + beta) % d, j)] = omega(d, phase);
    }
    Ok(m)
}

/// `D(nu)` in single-index notation, `nu = d alpha + beta`.
pub fn displacement_indexed(d: usize, nu: usize) -> Result<ComplexMatrix> {
    if nu >= d * d {
        return Err(WalkError::Domain(format!(
            "displacement index {nu} >= d^2 = {}",
            d * d
        )));
    }
    displacement(d, nu / d, nu % d)
}

/// Largest entry of `|U U^dagger - 1|`.
pub fn unitarity_defect(u: &ComplexMatrix) -> f64 {
    let n = u.nrows();
    if u.ncols() != n {
        return f64::INFINITY;
    }
    super::max_modulus(&(u * u.adjoint() - ComplexMatrix::identity(n, n)))
}
