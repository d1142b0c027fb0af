//! Bloch-equation coefficients for the three decoherence channels.

use qswitch::model::{build_system, DecoherenceChannel, OpenSystemSpec};
use qswitch::pauli::{pauli, Mat2, C64};

fn main() -> qswitch::Result<()> {
    let z = C64::new(0.0, 0.0);
    let lowering = Mat2::new(z, z, C64::new(1.0, 0.0), z);
    let cases = [
        ("amplitude", vec![(lowering, 0.1)]),
        ("dephasing", vec![(pauli(2), 0.1)]),
        ("polarization", vec![(pauli(2), 0.01), (pauli(1), 0.01), (pauli(0), 0.01)]),
    ];
    for (name, chans) in cases {
        let channels = chans
            .into_iter()
            .map(|(operator, rate)| DecoherenceChannel { operator, rate })
            .collect();
        let model = build_system(&OpenSystemSpec::driven_qubit(10.0, channels))?;
        println!("{name}\n  A ={}  g = {:?}", model.a, model.g.as_slice());
    }
    let model = build_system(&OpenSystemSpec::driven_qubit(10.0, vec![]))?;
    println!("control generators\n  K1 ={}  K2 ={}", model.k[0], model.k[1]);
    Ok(())
}
