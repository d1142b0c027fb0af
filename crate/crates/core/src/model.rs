//! The affine Bloch control system `s' = A s + u1 K1 s + u2 K2 s + g` built
//! from Hamiltonian and Lindblad data, plus the density-matrix generator it
//! is derived from.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::pauli::{
    hermitian_deviation, levi_civita, pauli, pauli_coefficients, DensityMatrix, Mat2, C64,
    STATE_TOL,
};

/// One Lindblad dissipation channel `gamma * D_L[rho]`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecoherenceChannel {
    pub operator: Mat2,
    pub rate: f64,
}

/// Hamiltonian and dissipation data of an open qubit (hbar = 1).
#[derive(Clone, Debug, PartialEq)]
pub struct OpenSystemSpec {
    pub drift: Mat2,
    pub controls: Vec<Mat2>,
    pub channels: Vec<DecoherenceChannel>,
}

impl OpenSystemSpec {
    /// `H0 = omega0 sigma3 / 2` driven through `H1 = sigma1`, `H2 = sigma2`.
    pub fn driven_qubit(omega0: f64, channels: Vec<DecoherenceChannel>) -> Self {
        Self {
            drift: pauli(2) * C64::new(0.5 * omega0, 0.0),
            controls: vec![pauli(0), pauli(1)],
            channels,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |name: String, m: &Mat2| {
            let deviation = hermitian_deviation(m);
            if deviation > STATE_TOL {
                Err(Error::NonHermitianInput { name, deviation })
            } else {
                Ok(())
            }
        };
        check("H0".into(), &self.drift)?;
        if self.controls.len() != 2 {
            return Err(Error::ControlCount(self.controls.len()));
        }
        for (r, h) in self.controls.iter().enumerate() {
            check(format!("H{}", r + 1), h)?;
        }
        for (index, ch) in self.channels.iter().enumerate() {
            if !(ch.rate > 0.0) || !ch.rate.is_finite() {
                return Err(Error::NonPositiveRate {
                    index,
                    rate: ch.rate,
                });
            }
        }
        Ok(())
    }

    fn hamiltonian(&self, u: [f64; 2]) -> Mat2 {
        self.drift
            + self.controls[0] * C64::new(u[0], 0.0)
            + self.controls[1] * C64::new(u[1], 0.0)
    }
}

/// Real coefficient matrices of the Bloch equation.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemModel {
    pub a: Matrix3<f64>,
    pub k: [Matrix3<f64>; 2],
    pub g: Vector3<f64>,
}

fn rotation_generator(h: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::from_fn(|l, m| 2.0 * (0..3).map(|p| h[p] * levi_civita(p, m, l)).sum::<f64>())
}

fn real_hamiltonian_coefficients(h: &Mat2) -> Vector3<f64> {
    // Hermitian input guarantees real coefficients; the identity part only
    // shifts the energy and never enters the dynamics.
    pauli_coefficients(h).coefficients.map(|c| c.re)
}

pub fn build_system(spec: &OpenSystemSpec) -> Result<SystemModel> {
    spec.validate()?;

    // An operator with a trace part, L = a I + B, dissipates like B plus the
    // Hamiltonian i(conj(a) B - a B^dag)/2, whose Pauli coefficients are
    // -Im(conj(a) beta).
    let mut h0 = real_hamiltonian_coefficients(&spec.drift);
    for ch in &spec.channels {
        let coeffs = pauli_coefficients(&ch.operator);
        let a = coeffs.identity.conj();
        h0 -= coeffs.coefficients.map(|b| ch.rate * (a * b).im);
    }
    let mut a = rotation_generator(&h0);
    let k = [
        rotation_generator(&real_hamiltonian_coefficients(&spec.controls[0])),
        rotation_generator(&real_hamiltonian_coefficients(&spec.controls[1])),
    ];

    let mut g = Vector3::<C64>::zeros();
    for ch in &spec.channels {
        let beta = pauli_coefficients(&ch.operator).coefficients;
        let gamma = ch.rate;
        for l in 0..3 {
            for m in 0..3 {
                if l == m {
                    let off: f64 = (0..3).filter(|&n| n != l).map(|n| beta[n].norm_sqr()).sum();
                    a[(l, l)] -= 2.0 * gamma * off;
                } else {
                    let sym = beta[l] * beta[m].conj() + beta[m] * beta[l].conj();
                    a[(l, m)] += gamma * sym.re;
                }
            }
            let mut acc = C64::new(0.0, 0.0);
            for m in 0..3 {
                for p in 0..3 {
                    acc += beta[m] * beta[p].conj() * levi_civita(m, p, l);
                }
            }
            g[l] += C64::new(0.0, 2.0 * gamma) * acc;
        }
    }

    let residue = g.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    debug_assert!(residue < STATE_TOL, "g carries imaginary residue {residue:e}");

    Ok(SystemModel {
        a,
        k,
        g: g.map(|c| c.re),
    })
}

impl SystemModel {
    pub fn rhs(&self, s: &Vector3<f64>, u: [f64; 2]) -> Vector3<f64> {
        self.a * s + (self.k[0] * s) * u[0] + (self.k[1] * s) * u[1] + self.g
    }
}

pub fn bloch_rhs(s: &Vector3<f64>, model: &SystemModel, u: [f64; 2]) -> Vector3<f64> {
    model.rhs(s, u)
}

fn dissipator(l: &Mat2, rho: &Mat2) -> Mat2 {
    let ld = l.adjoint();
    let ldl = ld * l;
    l * rho * ld - (ldl * rho + rho * ldl) * C64::new(0.5, 0.0)
}

/// Right-hand side of the master equation for an arbitrary 2x2 operator.
///
/// Used directly by the density-matrix integrator, whose intermediate stages
/// need not be exactly positive.
pub fn lindblad_generator(rho: &Mat2, spec: &OpenSystemSpec, u: [f64; 2]) -> Mat2 {
    let h = spec.hamiltonian(u);
    let mut out = (h * rho - rho * h) * C64::new(0.0, -1.0);
    for ch in &spec.channels {
        out += dissipator(&ch.operator, rho) * C64::new(ch.rate, 0.0);
    }
    out
}

pub fn lindblad_rhs(rho: &DensityMatrix, spec: &OpenSystemSpec, u: [f64; 2]) -> Mat2 {
    lindblad_generator(rho.matrix(), spec, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{bloch_matrix, pauli_traces};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn lowering() -> Mat2 {
        Mat2::new(c(0.0), c(0.0), c(1.0), c(0.0))
    }

    fn assert_matrix(actual: &Matrix3<f64>, expected: [[f64; 3]; 3]) {
        for l in 0..3 {
            for m in 0..3 {
                assert!(
                    (actual[(l, m)] - expected[l][m]).abs() <= 1e-12,
                    "entry ({l},{m}): {} vs {}",
                    actual[(l, m)],
                    expected[l][m]
                );
            }
        }
    }

    #[test]
    fn amplitude_damping_model() {
        let spec = OpenSystemSpec::driven_qubit(
            10.0,
            vec![DecoherenceChannel {
                operator: lowering(),
                rate: 0.1,
            }],
        );
        let model = build_system(&spec).unwrap();
        assert_matrix(
            &model.a,
            [[-0.05, -10.0, 0.0], [10.0, -0.05, 0.0], [0.0, 0.0, -0.1]],
        );
        assert!((model.g - Vector3::new(0.0, 0.0, -0.1)).amax() <= 1e-12);
        assert_matrix(&model.k[0], [[0.0, 0.0, 0.0], [0.0, 0.0, -2.0], [0.0, 2.0, 0.0]]);
        assert_matrix(&model.k[1], [[0.0, 0.0, 2.0], [0.0, 0.0, 0.0], [-2.0, 0.0, 0.0]]);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut spec = OpenSystemSpec::driven_qubit(
            1.0,
            vec![DecoherenceChannel {
                operator: pauli(2),
                rate: 0.0,
            }],
        );
        assert!(matches!(
            build_system(&spec),
            Err(Error::NonPositiveRate { index: 0, .. })
        ));
        spec.channels.clear();
        spec.controls.pop();
        assert!(matches!(build_system(&spec), Err(Error::ControlCount(1))));
        spec.controls.push(lowering());
        assert!(matches!(
            build_system(&spec),
            Err(Error::NonHermitianInput { .. })
        ));
    }

    #[test]
    fn bloch_rhs_examples() {
        let spec = OpenSystemSpec::driven_qubit(
            10.0,
            vec![DecoherenceChannel {
                operator: lowering(),
                rate: 0.1,
            }],
        );
        let model = build_system(&spec).unwrap();
        let at_origin = bloch_rhs(&Vector3::zeros(), &model, [0.0, 0.0]);
        assert!((at_origin - Vector3::new(0.0, 0.0, -0.1)).amax() < 1e-15);

        let north = Vector3::new(0.0, 0.0, 1.0);
        let kick = bloch_rhs(&north, &model, [1.0, 0.0]) - bloch_rhs(&north, &model, [0.0, 0.0]);
        assert!((kick - Vector3::new(0.0, -2.0, 0.0)).amax() < 1e-15);

        let dephasing = build_system(&OpenSystemSpec::driven_qubit(
            10.0,
            vec![DecoherenceChannel {
                operator: pauli(2),
                rate: 0.1,
            }],
        ))
        .unwrap();
        let polar = bloch_rhs(&Vector3::new(0.0, 0.0, 0.3), &dephasing, [0.0, 0.0]);
        assert!(polar.amax() < 1e-15);
    }

    #[test]
    fn ground_state_is_fixed_by_lowering_channel() {
        let spec = OpenSystemSpec::driven_qubit(
            10.0,
            vec![DecoherenceChannel {
                operator: lowering(),
                rate: 0.1,
            }],
        );
        let ground = DensityMatrix::new(Mat2::new(c(0.0), c(0.0), c(0.0), c(1.0))).unwrap();
        let rhs = lindblad_rhs(&ground, &spec, [0.0, 0.0]);
        assert!(rhs.norm() < 1e-15);
    }

    #[test]
    fn density_and_bloch_generators_agree() {
        let spec = OpenSystemSpec::driven_qubit(
            10.0,
            vec![DecoherenceChannel {
                operator: lowering(),
                rate: 0.1,
            }],
        );
        let model = build_system(&spec).unwrap();
        let s = Vector3::new(0.3, -0.4, 0.5);
        let u = [1.7, -0.6];
        let image = pauli_traces(&lindblad_generator(&bloch_matrix(&s), &spec, u)).map(|z| z.re);
        assert!((image - bloch_rhs(&s, &model, u)).amax() < 1e-13);
    }
}
