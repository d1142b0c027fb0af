//! Feedback laws of both controller families evaluated at the initial state.

use nalgebra::Vector3;
use qswitch::control::{
    closed_loop_vdot, control, lyapunov_value, vdot, ControllerSpec, ErrorState, Family, GammaFn,
    Mode, Weight,
};
use qswitch::scenario::presets;

fn main() -> qswitch::Result<()> {
    let model = presets::amplitude().build()?.model;
    let err = ErrorState::new(Vector3::new(0.0, -0.8, 0.6), Vector3::new(-0.6, 0.0, -0.8));
    for family in [Family::Standard, Family::Contractive] {
        for mode in [Mode::One, Mode::Two] {
            let ctrl = ControllerSpec {
                weight: Weight::scaled_identity(0.078)?,
                xi: 1.0,
                family,
                gamma: GammaFn::Constant { value: -1.5 },
                theta_hat: -0.001,
                mode,
            };
            let u = control(&err, &model, &ctrl, 0.0)?;
            println!(
                "{family:?} {mode}: u = ({:+.4}, {:+.4})  V = {:.5}  dV/dt = {:+.5} (closed form {:+.5})",
                u[0],
                u[1],
                lyapunov_value(&err, &ctrl.weight),
                vdot(&err, &model, &ctrl.weight, u),
                closed_loop_vdot(&err, &model, &ctrl, 0.0)
            );
        }
    }
    Ok(())
}
