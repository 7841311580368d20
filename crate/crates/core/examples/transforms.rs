//! Laplace and Hankel images of H-functions, each checked against direct
//! quadrature, plus the radial Fourier transform in ℝ^d.
//!
//! ```text
//! cargo run -p foxh --example transforms
//! ```

use foxh::spec::HFunctionSpec;
use foxh::transforms::{self, hankel_numeric, hankel_of_h, laplace_closed_form, laplace_numeric, laplace_of_h};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ml = HFunctionSpec::mittag_leffler(0.7, 1.0, 1.0)?;
    let image = laplace_of_h(&ml)?;
    println!("Laplace image of {ml}:\n  {image}");
    for s in [0.5, 1.0, 2.0] {
        let closed = laplace_closed_form(&image, s, 1e-10)?;
        let numeric = laplace_numeric(&ml, s, 1e-10)?;
        println!("  s = {s}: closed {closed:.10}  quadrature {:.10}", numeric.value);
    }
    let exp = HFunctionSpec::exponential();
    let exp_image = laplace_of_h(&exp)?;
    println!("  e^(-t) at s = 2: {:.12}, exact 1/3", laplace_closed_form(&exp_image, 2.0, 1e-12)?);

    let (rho, nu, sigma, b) = (1.5, 0.0, 1.0, 1.0);
    let hankel = hankel_of_h(&exp, rho, nu, sigma)?;
    for x in [0.5, 1.0, 3.0] {
        let closed = hankel.evaluate(b, x, 1e-10)?;
        let numeric = hankel_numeric(&exp, rho, nu, sigma, b, x, 1e-8)?;
        println!("  ∫ t^{{ρ-1}} J₀(xt) e^{{-t}} dt at x = {x}: closed {closed:.10}  quadrature {:.10}", numeric.value);
    }

    // e^{-r²} in ℝ³: both sides are Gaussians in ξ
    for xi in [0.5, 2.0] {
        let closed = transforms::radial_fourier_closed(&exp, 2.0, 3, xi, 1e-10)?;
        let numeric = transforms::radial_fourier(&exp, 2.0, 3, xi, 1e-10)?;
        println!("  radial Fourier of e^{{-r²}} in ℝ³ at ξ = {xi}: {closed:.10} vs {:.10}", numeric.value);
    }
    Ok(())
}
