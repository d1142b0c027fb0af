//! Qubit states and the Pauli basis.
//!
//! A density matrix and its Bloch (coherent) vector are related by
//! `rho = (I + s . sigma) / 2` and `s_v = tr(rho sigma_v)`. Operator
//! expansions use the half-trace convention `c_v = tr(M sigma_v) / 2`, which
//! is the normalization under which `M = c0 I + sum_v c_v sigma_v` holds
//! exactly (since `tr(sigma_m sigma_n) = 2 delta_mn`).

use nalgebra::{Complex, Matrix2, Vector3};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type Mat2 = Matrix2<C64>;

/// Absolute tolerance for Hermiticity, trace and positivity checks.
pub const STATE_TOL: f64 = 1e-12;

/// Slack on `|s| <= 1` for a Bloch vector to count as physical.
pub const BLOCH_TOL: f64 = 1e-9;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn identity() -> Mat2 {
    Mat2::new(ONE, ZERO, ZERO, ONE)
}

/// Pauli matrix `sigma_{v+1}` for `v` in `0..3`.
pub fn pauli(v: usize) -> Mat2 {
    match v {
        0 => Mat2::new(ZERO, ONE, ONE, ZERO),
        1 => Mat2::new(ZERO, -I, I, ZERO),
        2 => Mat2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("pauli index {v} out of range"),
    }
}

/// Completely antisymmetric structure constant of su(2) (0-based indices).
pub fn levi_civita(i: usize, j: usize, k: usize) -> f64 {
    match (i, j, k) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

pub fn kronecker(i: usize, j: usize) -> f64 {
    if i == j {
        1.0
    } else {
        0.0
    }
}

pub(crate) fn hermitian_deviation(m: &Mat2) -> f64 {
    (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Validated 2x2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(Mat2);

impl DensityMatrix {
    pub fn new(m: Mat2) -> Result<Self> {
        let herm = hermitian_deviation(&m);
        if herm > STATE_TOL {
            return Err(Error::NonPhysicalState(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr - ONE).norm() > STATE_TOL {
            return Err(Error::NonPhysicalState(format!(
                "trace is {tr}, expected 1"
            )));
        }
        // For a unit-trace Hermitian 2x2 matrix both eigenvalues are
        // non-negative iff the determinant is.
        let det = m.determinant().re;
        if det < -STATE_TOL {
            return Err(Error::NonPhysicalState(format!(
                "not positive semidefinite (det = {det:e})"
            )));
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[C64; 2]; 2]) -> Result<Self> {
        Self::new(Mat2::new(rows[0][0], rows[0][1], rows[1][0], rows[1][1]))
    }

    pub fn maximally_mixed() -> Self {
        Self(identity() * C64::new(0.5, 0.0))
    }

    pub fn matrix(&self) -> &Mat2 {
        &self.0
    }

    pub fn into_inner(self) -> Mat2 {
        self.0
    }

    /// Smaller eigenvalue; non-negative up to [`STATE_TOL`].
    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.0.trace().re;
        let det = self.0.determinant().re;
        0.5 * (tr - (tr * tr - 4.0 * det).max(0.0).sqrt())
    }
}

/// Real coherent vector of a qubit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector(Vector3<f64>);

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self(Vector3::new(x, y, z))
    }

    pub fn from_vector(v: Vector3<f64>) -> Self {
        Self(v)
    }

    pub fn vector(&self) -> &Vector3<f64> {
        &self.0
    }

    pub fn norm(&self) -> f64 {
        self.0.norm()
    }

    pub fn is_physical(&self) -> bool {
        self.norm() <= 1.0 + BLOCH_TOL
    }
}

impl From<Vector3<f64>> for BlochVector {
    fn from(v: Vector3<f64>) -> Self {
        Self(v)
    }
}

/// Expansion `M = identity * I + sum_v coefficients[v] * sigma_v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PauliCoefficients {
    pub identity: C64,
    pub coefficients: Vector3<C64>,
}

impl PauliCoefficients {
    pub fn reconstruct(&self) -> Mat2 {
        (0..3).fold(identity() * self.identity, |acc, v| {
            acc + pauli(v) * self.coefficients[v]
        })
    }

    /// Real parts of the sigma coefficients, failing if any imaginary part
    /// exceeds [`STATE_TOL`].
    pub fn real(&self) -> Option<Vector3<f64>> {
        if self.coefficients.iter().any(|c| c.im.abs() > STATE_TOL) {
            None
        } else {
            Some(self.coefficients.map(|c| c.re))
        }
    }
}

pub fn pauli_coefficients(m: &Mat2) -> PauliCoefficients {
    let half = C64::new(0.5, 0.0);
    PauliCoefficients {
        identity: m.trace() * half,
        coefficients: Vector3::from_fn(|v, _| (m * pauli(v)).trace() * half),
    }
}

/// `tr(M sigma_v)` for each `v`; the Bloch image of an arbitrary operator.
pub fn pauli_traces(m: &Mat2) -> Vector3<C64> {
    Vector3::from_fn(|v, _| (m * pauli(v)).trace())
}

pub fn density_to_bloch(rho: &DensityMatrix) -> Result<BlochVector> {
    let traces = pauli_traces(rho.matrix());
    let residue = traces.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if residue > STATE_TOL {
        return Err(Error::NonPhysicalState(format!(
            "Bloch components carry imaginary residue {residue:e}"
        )));
    }
    Ok(BlochVector(traces.map(|c| c.re)))
}

pub fn bloch_to_density(s: &BlochVector) -> Result<DensityMatrix> {
    if !s.is_physical() {
        return Err(Error::NonPhysicalState(format!(
            "Bloch vector norm {} exceeds 1",
            s.norm()
        )));
    }
    Ok(DensityMatrix(bloch_matrix(s.vector())))
}

/// `(I + s . sigma) / 2` without any physicality check.
pub(crate) fn bloch_matrix(s: &Vector3<f64>) -> Mat2 {
    let half = 0.5;
    Mat2::new(
        C64::new(half * (1.0 + s[2]), 0.0),
        C64::new(half * s[0], -half * s[1]),
        C64::new(half * s[0], half * s[1]),
        C64::new(half * (1.0 - s[2]), 0.0),
    )
}

/// Uhlmann fidelity in its qubit closed form,
/// `F = tr(rho sigma) + 2 sqrt(det rho det sigma)`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> f64 {
    fidelity_of_matrices(rho.matrix(), sigma.matrix())
}

pub(crate) fn fidelity_of_matrices(rho: &Mat2, sigma: &Mat2) -> f64 {
    let overlap = (rho * sigma).trace().re;
    let dets = rho.determinant().re.max(0.0) * sigma.determinant().re.max(0.0);
    (overlap + 2.0 * dets.sqrt()).clamp(0.0, 1.0)
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    (rho.matrix() * rho.matrix()).trace().re
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn rho0() -> DensityMatrix {
        DensityMatrix::from_rows([[c(0.8, 0.0), c(0.0, 0.4)], [c(0.0, -0.4), c(0.2, 0.0)]]).unwrap()
    }

    fn rho_d() -> DensityMatrix {
        DensityMatrix::from_rows([[c(0.1, 0.0), c(-0.3, 0.0)], [c(-0.3, 0.0), c(0.9, 0.0)]])
            .unwrap()
    }

    fn close(a: &Vector3<f64>, b: [f64; 3], tol: f64) -> bool {
        (0..3).all(|i| (a[i] - b[i]).abs() <= tol)
    }

    #[test]
    fn structure_constants() {
        assert_eq!(levi_civita(0, 1, 2), 1.0);
        assert_eq!(levi_civita(1, 0, 2), -1.0);
        assert_eq!(levi_civita(0, 0, 2), 0.0);
        for m in 0..3 {
            for n in 0..3 {
                let anti = pauli(m) * pauli(n) + pauli(n) * pauli(m);
                let expected = identity() * c(2.0 * kronecker(m, n), 0.0);
                assert!((anti - expected).norm() < 1e-15);
                let comm = pauli(m) * pauli(n) - pauli(n) * pauli(m);
                let rhs = (0..3).fold(Mat2::zeros(), |acc, l| {
                    acc + pauli(l) * c(0.0, 2.0 * levi_civita(m, n, l))
                });
                assert!((comm - rhs).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bloch_of_reference_states() {
        let mixed = density_to_bloch(&DensityMatrix::maximally_mixed()).unwrap();
        assert!(close(mixed.vector(), [0.0, 0.0, 0.0], 1e-15));
        let s0 = density_to_bloch(&rho0()).unwrap();
        assert!(close(s0.vector(), [0.0, -0.8, 0.6], 1e-15));
        let sd = density_to_bloch(&rho_d()).unwrap();
        assert!(close(sd.vector(), [-0.6, 0.0, -0.8], 1e-15));
    }

    #[test]
    fn density_of_reference_vectors() {
        let mixed = bloch_to_density(&BlochVector::new(0.0, 0.0, 0.0)).unwrap();
        assert!((mixed.matrix() - DensityMatrix::maximally_mixed().matrix()).norm() < 1e-15);
        let north = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        assert!((north.matrix() - Mat2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0))).norm() < 1e-15);
        let target = bloch_to_density(&BlochVector::new(-0.6, 0.0, -0.8)).unwrap();
        assert!((target.matrix() - rho_d().matrix()).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_physical_inputs() {
        assert!(matches!(
            bloch_to_density(&BlochVector::new(0.0, 0.8, 0.8)),
            Err(Error::NonPhysicalState(_))
        ));
        let not_hermitian = Mat2::new(c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0));
        assert!(DensityMatrix::new(not_hermitian).is_err());
        let bad_trace = Mat2::new(c(0.7, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.7, 0.0));
        assert!(DensityMatrix::new(bad_trace).is_err());
        let negative = Mat2::new(c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0));
        assert!(DensityMatrix::new(negative).is_err());
    }

    #[test]
    fn coefficients_of_known_operators() {
        let x = pauli_coefficients(&pauli(0));
        assert_eq!(x.identity, c(0.0, 0.0));
        assert_eq!(x.coefficients, Vector3::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)));

        let lowering = Mat2::new(c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0));
        let l = pauli_coefficients(&lowering);
        assert_eq!(l.identity, c(0.0, 0.0));
        assert_eq!(l.coefficients, Vector3::new(c(0.5, 0.0), c(0.0, -0.5), c(0.0, 0.0)));
        assert!(l.real().is_none());

        let h0 = pauli(2) * c(5.0, 0.0);
        let h = pauli_coefficients(&h0).real().unwrap();
        assert_eq!(h, Vector3::new(0.0, 0.0, 5.0));
    }

    #[test]
    fn reference_terminal_state_fidelity() {
        let final_state = DensityMatrix::from_rows([
            [c(0.10, 0.0), c(-0.29, 0.03)],
            [c(-0.29, -0.03), c(0.90, 0.0)],
        ])
        .unwrap();
        // rho_d is pure, so only the overlap term survives up to rounding in det.
        assert!((fidelity(&final_state, &rho_d()) - 0.994).abs() < 1e-8);
        assert!((fidelity(&rho_d(), &rho_d()) - 1.0).abs() < 1e-12);
        let up = bloch_to_density(&BlochVector::new(0.0, 0.0, 1.0)).unwrap();
        let down = bloch_to_density(&BlochVector::new(0.0, 0.0, -1.0)).unwrap();
        assert!(fidelity(&up, &down).abs() < 1e-15);
    }

    #[test]
    fn purity_values() {
        assert!((purity(&DensityMatrix::maximally_mixed()) - 0.5).abs() < 1e-15);
        assert!((purity(&rho0()) - 1.0).abs() < 1e-12);
        let partial = bloch_to_density(&BlochVector::new(0.36, 0.0, 0.48)).unwrap();
        assert!((purity(&partial) - 0.68).abs() < 1e-12);
    }
}
