//! Finite-time certificate arithmetic and the trajectory checks behind it.

use nalgebra::Vector3;
use qswitch::certificates::{
    eta_bound, ftcs_check, fts_check, verify_fts_trajectory, FtsCertificate, FTCS_GRID,
    NORM_CONVENTION,
};
use qswitch::control::Weight;
use qswitch::scenario::presets;

fn main() -> qswitch::Result<()> {
    println!("{NORM_CONVENTION}");

    let unit = Weight::scaled_identity(1.0)?;
    let toy = FtsCertificate {
        weight: unit,
        w: unit,
        alpha: 0.1,
        c1: 1.0,
        c2: 4.0,
        t_final: 10.0,
        zeta: 1.0,
    };
    let r = fts_check(&toy, &Vector3::zeros())?;
    println!("toy FTS: horizon bound {:.6} (10 ln 4 = {:.6}), pass {}", r.horizon_bound, 10.0 * 4f64.ln(), r.pass());

    let amp = presets::amplitude().build()?;
    let fts = fts_check(amp.fts.as_ref().unwrap(), &amp.model.g)?;
    println!(
        "amplitude FTS: bound {:.4} vs T_f {} -> pass {}",
        fts.horizon_bound, amp.settings.t_final, fts.pass()
    );

    let ftcs = amp.ftcs.as_ref().unwrap();
    let (_, lambda2) = amp.controller.weight.extreme_eigenvalues();
    for t in [7.0, 8.0, 9.0, 10.0] {
        println!("  eta bound at t = {t}: {:.5}", eta_bound(ftcs, lambda2, t)?);
    }
    let rep = ftcs_check(ftcs, FTCS_GRID)?;
    println!("FTCS inequality: max lhs {:.4e} at t = {:.3}, pass {}", rep.max_lhs, rep.argmax_t, rep.pass);

    for name in presets::NAMES {
        let sc = presets::preset(name).unwrap().build()?;
        let out = sc.simulate()?;
        let cert = sc.fts.as_ref().unwrap();
        let check = fts_check(cert, &sc.model.g)?;
        let traj = verify_fts_trajectory(&out.trajectory, &sc.sd, cert.c1, cert.c2);
        println!(
            "{name}: FTS conditions {}, trajectory max |e|^2 = {:.3} < c2 = {} -> {}",
            check.pass(),
            traj.max_sq_error,
            cert.c2,
            traj.pass
        );
    }
    Ok(())
}
