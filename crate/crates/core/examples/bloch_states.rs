//! Moving between density matrices and Bloch vectors.

use qswitch::pauli::{
    bloch_to_density, density_to_bloch, fidelity, purity, BlochVector, DensityMatrix, Mat2, C64,
};

fn main() -> qswitch::Result<()> {
    let c = C64::new;
    let rho0 = DensityMatrix::new(Mat2::new(c(0.8, 0.0), c(0.0, 0.4), c(0.0, -0.4), c(0.2, 0.0)))?;
    let s0 = density_to_bloch(&rho0)?;
    println!("rho0 -> s = {:?}, purity {:.3}", s0.vector().as_slice(), purity(&rho0));

    let target = bloch_to_density(&BlochVector::new(-0.6, 0.0, -0.8))?;
    println!("target rho = {}", target.matrix());

    let mixed = DensityMatrix::maximally_mixed();
    println!("F(rho0, target) = {:.4}", fidelity(&rho0, &target));
    println!("F(I/2, target)  = {:.4}", fidelity(&mixed, &target));

    // Outside the ball the matrix has a negative eigenvalue and is rejected.
    match bloch_to_density(&BlochVector::new(0.9, 0.9, 0.0)) {
        Ok(_) => println!("unexpectedly accepted"),
        Err(e) => println!("|s| > 1: {e}"),
    }
    Ok(())
}
