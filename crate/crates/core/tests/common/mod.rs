//! Randomized checks shared by the property suite and the acceptance runner.

#![allow(dead_code)]

use nalgebra::Vector3;
use proptest::prelude::*;
use qswitch::model::{build_system, lindblad_rhs, DecoherenceChannel, OpenSystemSpec};
use qswitch::pauli::{
    bloch_to_density, density_to_bloch, identity, pauli, BlochVector, DensityMatrix, Mat2, C64,
};

pub const CASES: u32 = 1000;

fn coord(r: f64) -> impl Strategy<Value = f64> {
    -r..=r
}

/// Points of the closed unit ball.
pub fn ball() -> impl Strategy<Value = Vector3<f64>> {
    (coord(1.0), coord(1.0), coord(1.0), 0.0..=1.0_f64).prop_map(|(x, y, z, r)| {
        let v = Vector3::new(x, y, z);
        let n = v.norm();
        if n == 0.0 {
            v
        } else {
            v * (r.cbrt() / n)
        }
    })
}

/// Points of a cube around the ball, kept away from the unit sphere so the
/// floating-point verdict is unambiguous.
pub fn cube_off_sphere() -> impl Strategy<Value = Vector3<f64>> {
    (coord(1.5), coord(1.5), coord(1.5))
        .prop_map(|(x, y, z)| Vector3::new(x, y, z))
        .prop_filter("too close to the sphere", |v| (v.norm() - 1.0).abs() > 1e-9)
}

pub fn complex() -> impl Strategy<Value = C64> {
    (coord(2.0), coord(2.0)).prop_map(|(re, im)| C64::new(re, im))
}

pub fn operator() -> impl Strategy<Value = Mat2> {
    (complex(), complex(), complex(), complex()).prop_map(|(a, b, c, d)| Mat2::new(a, b, c, d))
}

pub fn hermitian() -> impl Strategy<Value = Mat2> {
    (coord(2.0), coord(2.0), complex()).prop_map(|(a, d, b)| {
        Mat2::new(C64::new(a, 0.0), b, b.conj(), C64::new(d, 0.0))
    })
}

fn rate() -> impl Strategy<Value = f64> {
    0.001..1.0_f64
}

pub fn spec(channel_op: BoxedStrategy<Mat2>) -> impl Strategy<Value = OpenSystemSpec> {
    (
        hermitian(),
        hermitian(),
        hermitian(),
        prop::collection::vec((channel_op, rate()), 0..4),
    )
        .prop_map(|(drift, h1, h2, chans)| OpenSystemSpec {
            drift,
            controls: vec![h1, h2],
            channels: chans
                .into_iter()
                .map(|(operator, rate)| DecoherenceChannel { operator, rate })
                .collect(),
        })
}

pub fn any_spec() -> impl Strategy<Value = OpenSystemSpec> {
    spec(operator().boxed())
}

pub fn hermitian_spec() -> impl Strategy<Value = OpenSystemSpec> {
    spec(hermitian().boxed())
}

pub fn controls() -> impl Strategy<Value = [f64; 2]> {
    (coord(5.0), coord(5.0)).prop_map(|(a, b)| [a, b])
}

fn matrix_of(s: &Vector3<f64>) -> Mat2 {
    let mut m = identity();
    for v in 0..3 {
        m += pauli(v) * C64::new(s[v], 0.0);
    }
    m * C64::new(0.5, 0.0)
}

pub fn bloch_round_trip(s: Vector3<f64>) -> Result<(), String> {
    let rho = bloch_to_density(&BlochVector::from_vector(s)).map_err(|e| e.to_string())?;
    let back = density_to_bloch(&rho).map_err(|e| e.to_string())?;
    let err = (back.vector() - s).amax();
    if err > 1e-14 {
        return Err(format!("s -> rho -> s drifted by {err:e}"));
    }
    let again = bloch_to_density(&back).map_err(|e| e.to_string())?;
    let err = (again.matrix() - rho.matrix()).camax();
    if err > 1e-12 {
        return Err(format!("rho -> s -> rho drifted by {err:e}"));
    }
    Ok(())
}

pub fn positivity_iff_inside_ball(s: Vector3<f64>) -> Result<(), String> {
    let accepted = DensityMatrix::new(matrix_of(&s)).is_ok();
    let inside = s.norm() <= 1.0;
    if accepted == inside {
        Ok(())
    } else {
        Err(format!("|s| = {}, accepted as a state: {accepted}", s.norm()))
    }
}

pub fn generator_is_traceless_and_hermitian(
    spec: OpenSystemSpec,
    s: Vector3<f64>,
    u: [f64; 2],
) -> Result<(), String> {
    let rho = DensityMatrix::new(matrix_of(&s)).map_err(|e| e.to_string())?;
    let d = lindblad_rhs(&rho, &spec, u);
    let scale = 1.0 + d.camax();
    let trace = d.trace().norm();
    let herm = (d - d.adjoint()).camax();
    if trace > 1e-12 * scale || herm > 1e-12 * scale {
        return Err(format!("trace {trace:e}, anti-Hermitian part {herm:e}"));
    }
    Ok(())
}

pub fn control_generators_are_antisymmetric(spec: OpenSystemSpec) -> Result<(), String> {
    let model = build_system(&spec).map_err(|e| e.to_string())?;
    for (r, k) in model.k.iter().enumerate() {
        let asym = (k + k.transpose()).amax();
        if asym > 1e-12 {
            return Err(format!("K{} + K{}^T has entry {asym:e}", r + 1, r + 1));
        }
    }
    Ok(())
}

pub fn hermitian_channels_have_no_offset(spec: OpenSystemSpec) -> Result<(), String> {
    let model = build_system(&spec).map_err(|e| e.to_string())?;
    let g = model.g.amax();
    if g > 1e-12 {
        return Err(format!("|g|_inf = {g:e}"));
    }
    Ok(())
}
