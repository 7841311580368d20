//! Fox–Wright series, their classification, and the hypergeometric and
//! Mittag-Leffler special cases.
//!
//! ```text
//! cargo run -p foxh --example fox_wright
//! ```

use foxh::foxwright::{self, classify, eval_fw};
use foxh::spec::FoxWrightSpec;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // ₁Ψ₁[(1,1);(1,1)](z) = e^z
    let exp = FoxWrightSpec::new(vec![(1.0, 1.0)], vec![(1.0, 1.0)])?;
    println!("₁Ψ₁[(1,1);(1,1)](1) = {:.12}", eval_fw(&exp, 1.0, 1e-15)?.value);

    let fw = FoxWrightSpec::new(vec![(2.35, 0.5), (0.85, 0.5)], vec![(2.7, 1.0)])?;
    let c = classify(&fw);
    println!("₂Ψ₁ with half weights: Δ = {}, ρ = {}, μ = {:?}", c.delta, c.radius, c.mu);
    for z in [-0.5, -2.0, 0.3] {
        println!("  Ψ({z}) = {:.12}", eval_fw(&fw, z, 1e-14)?.value);
    }

    // unit weights reduce to ₚF_q with a Gamma prefactor
    let unit = FoxWrightSpec::new(vec![(0.5, 1.0), (1.5, 1.0)], vec![(2.5, 1.0)])?;
    let form = foxwright::to_generalized_hypergeometric(&unit)?;
    let f = foxwright::hypergeometric_pfq(&form.upper, &form.lower, 0.4, 1e-15)?;
    println!(
        "Ψ(0.4) = {:.12} = {:.6} · ₂F₁(0.4) = {:.12}",
        eval_fw(&unit, 0.4, 1e-15)?.value,
        form.coefficient,
        form.coefficient * f
    );

    for (a, b, g, z) in [(1.0, 1.0, 1.0, -1.0), (0.5, 1.0, 1.0, -1.0), (0.8, 0.9, 2.0, 3.0)] {
        let e = foxwright::mittag_leffler(a, b, g, z, 1e-15)?;
        println!("E^{g}_{{{a},{b}}}({z}) = {:.12}  ({} terms)", e.value, e.work);
    }
    Ok(())
}
