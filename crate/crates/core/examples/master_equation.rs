//! The Bloch equation against the master equation it comes from: one free
//! evolution integrated both ways.

use nalgebra::Vector3;
use qswitch::model::{bloch_rhs, build_system, lindblad_generator, DecoherenceChannel, OpenSystemSpec};
use qswitch::pauli::{bloch_to_density, pauli_traces, BlochVector, Mat2, C64};

fn main() -> qswitch::Result<()> {
    let z = C64::new(0.0, 0.0);
    let spec = OpenSystemSpec::driven_qubit(
        10.0,
        vec![DecoherenceChannel {
            operator: Mat2::new(z, z, C64::new(1.0, 0.0), z),
            rate: 0.1,
        }],
    );
    let model = build_system(&spec)?;
    let u = [0.3, -0.2];
    let dt = 1e-3;

    let mut s = Vector3::new(0.0, -0.8, 0.6);
    let mut rho = *bloch_to_density(&BlochVector::from_vector(s))?.matrix();
    for step in 1..=5000 {
        // Forward Euler is enough to show both routes stay in lock step.
        s += bloch_rhs(&s, &model, u) * dt;
        rho += lindblad_generator(&rho, &spec, u) * C64::new(dt, 0.0);
        if step % 1000 == 0 {
            let image = pauli_traces(&rho).map(|c| c.re);
            println!(
                "t = {:.1}  s = ({:+.5}, {:+.5}, {:+.5})  |s - s_rho| = {:.1e}",
                step as f64 * dt,
                s[0],
                s[1],
                s[2],
                (image - s).norm()
            );
        }
    }
    Ok(())
}
