//! Evaluating H-functions: closed-form special cases, the evaluator
//! diagnostics, and specs read from JSON.
//!
//! ```text
//! cargo run -p foxh --example evaluate_h
//! ```

use foxh::eval::{self, HFunction};
use foxh::spec::{self, HFunctionSpec, SpecInput};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let exp = HFunctionSpec::exponential();
    println!("spec  {exp}");
    for z in [0.25, 1.0, 4.0] {
        let e = eval::evaluate(&exp, z, 1e-12)?;
        println!(
            "  e^-z at {z:<5} = {:.15}  exact {:.15}  method {:?}  error {:.1e}",
            e.value,
            (-z).exp(),
            e.method,
            e.error
        );
    }

    // Γ(γ) E^γ_{α,β}(-z) as an H-function
    let (alpha, beta, gamma_p) = (0.6, 0.9, 1.3);
    let ml = HFunctionSpec::mittag_leffler(alpha, beta, gamma_p)?;
    let h = HFunction::new(&ml, 1e-12)?;
    let g = foxh::gamma::gamma_real(gamma_p)?;
    for z in [0.5, 2.0, 8.0] {
        let direct = foxh::foxwright::mittag_leffler(alpha, beta, gamma_p, -z, 1e-14)?;
        println!(
            "  Γ(γ)E(-{z}) = {:.12}  series {:.12} (error {:.1e}, converged {})",
            h.value(z)?,
            g * direct.value,
            g * direct.error,
            direct.converged
        );
    }

    // the same spec written in the standard H^{m,n}_{p,q} layout
    let json = r#"{
        "convention": "standard",
        "m": 1, "n": 0,
        "upper": [],
        "lower": [[0.0, 1.0]]
    }"#;
    let SpecInput::H(parsed) = spec::parse_spec(json)? else { unreachable!() };
    println!("parsed standard-layout spec: {parsed}, value at 1 = {:.12}", eval::evaluate(&parsed, 1.0, 1e-12)?.value);

    let report = spec::convergence_params(&ml);
    println!("Mittag-Leffler spec: Δ = {}, D = {}, series radius {:?}", report.delta, report.big_d, report.series_radius);
    Ok(())
}
