//! Structural quantities of a spec and the parameter-level identities:
//! argument inversion, scaling, power shifts, cancellation, Meijer G.
//!
//! ```text
//! cargo run -p foxh --example classify_and_reshape
//! ```

use foxh::eval::evaluate;
use foxh::spec::{self, HFunctionSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let h = HFunctionSpec::new(1, 2, vec![(0.0, 1.0), (0.3, 0.5)], vec![(0.4, 1.0), (0.2, 0.5)])?;
    let r = spec::convergence_params(&h);
    println!("{h}");
    println!("  Δ = {}  D = {}  C = {}  μ = {:?}", r.delta, r.big_d, r.big_c, r.mu);
    println!("  behaviour at 0 ~ z^{:?}, at ∞ ~ z^{:?}", r.zero_exponent, r.inf_exponent);
    let (left, right) = spec::pole_sets(&h);
    println!("  first poles: left {:?}  right {:?}", left.iter().map(|l| l.point(0)).collect::<Vec<_>>(), right.iter().map(|l| l.point(0)).collect::<Vec<_>>());

    let z = 0.7;
    let base = evaluate(&h, z, 1e-12)?.value;
    let inv = spec::invert_argument(&h);
    println!("H(z) = {base:.12}, inverted spec at 1/z = {:.12}", evaluate(&inv, 1.0 / z, 1e-12)?.value);

    let (scaled, k) = spec::scale_argument(&h, 2.0)?;
    println!("H(z) = k·H'(z^k) = {:.12}", k * evaluate(&scaled, z.powf(k), 1e-12)?.value);

    let shifted = spec::shift_power(&h, 0.5);
    println!("z^{{0.5}} H(z) = {:.12}, shifted spec = {:.12}", z.sqrt() * base, evaluate(&shifted, z, 1e-12)?.value);

    // Γ(0.4 + s) above and below the line
    let padded = HFunctionSpec::new(0, 2, vec![(0.0, 1.0), (0.4, 1.0)], vec![(0.4, 1.0)])?;
    let reduced = spec::reduce_matching_pair(&padded)?;
    println!("{padded}  reduces to  {reduced}");

    let unit = HFunctionSpec::new(1, 1, vec![(0.0, 1.0), (0.5, 1.0)], vec![(0.25, 1.0)])?;
    let (g, c) = spec::to_meijer_g(&unit)?;
    println!("unit weights give a Meijer G (constant {c}): {:?}", g);
    Ok(())
}
