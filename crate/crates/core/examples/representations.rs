//! Integral representations of Fox–Wright functions through their
//! H-function measure kernel.
//!
//! ```text
//! cargo run -p foxh --example representations
//! ```

use foxh::foxwright::eval_fw;
use foxh::spec::FoxWrightSpec;
use foxh::transforms::{self, exp_shifted_rep, integral_rep_fw, measure_kernel, stieltjes_rep};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // ₂Ψ₁ with a positive kernel on (0, 1/ρ)
    let fw = FoxWrightSpec::new(vec![(2.35, 0.5), (0.85, 0.5)], vec![(3.2, 1.0)])?;
    let kernel = measure_kernel(&fw)?;
    println!("kernel {kernel}");
    transforms::assert_kernel_nonnegative(&fw)?;
    for z in [0.5, 3.0] {
        let rep = integral_rep_fw(&fw, -z, 1e-10)?;
        println!("  Ψ(-{z}) = {:.12}  via ∫e^(-zt)dμ: {rep:.12}", eval_fw(&fw, -z, 1e-14)?.value);
    }

    let sigma = 1.5;
    let z = 0.4;
    let rep = stieltjes_rep(&fw, sigma, z, 1e-10)?;
    println!("  Stieltjes form with σ = {sigma} at z = {z}: {rep:.12}");

    // μ = 0: the measure carries an atom at 1/ρ
    let atomic = FoxWrightSpec::new(vec![(2.35, 0.5), (0.85, 0.5)], vec![(2.7, 1.0)])?;
    for z in [0.5, 2.0, 6.0] {
        let (cont, c) = exp_shifted_rep(&atomic, z, 1e-10)?;
        let total = cont + c.eta * (-c.atom * z).exp();
        println!(
            "  Ψ(-{z}) = {:.12} = η e^(-z/ρ) + ∫ = {total:.12}  (η = {:.6}, ρ = {})",
            eval_fw(&atomic, -z, 1e-14)?.value,
            c.eta,
            c.rho
        );
    }
    Ok(())
}
