//! The numerical property checkers on functions with known answers.
//!
//! ```text
//! cargo run -p foxh --example checkers
//! ```

use foxh::harness::{
    chebyshev_check, check_complete_monotonicity, check_log_complete_monotonicity, check_nonnegativity,
    check_positive_definite, check_ratio_monotone, CheckReport, Direction, GridSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn show(r: &CheckReport) {
    println!(
        "  {:<32} passed {:<5} worst margin {:>10.3e} at {:?}",
        r.name, r.passed, r.worst_margin, r.worst_point
    );
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = GridSpec::linear(0.05, 10.0, 100);
    let mixture = |x: f64| 0.3 * (-0.5 * x).exp() + 0.7 * (-2.0 * x).exp();

    println!("complete monotonicity");
    show(&check_complete_monotonicity(&mixture, &grid, 6, 1e-6)?);
    show(&check_complete_monotonicity(&f64::exp, &GridSpec::linear(0.05, 3.0, 50), 6, 1e-6)?);
    show(&check_log_complete_monotonicity(&|x: f64| 1.0 / (1.0 + x), &grid, 4, 1e-6)?);

    println!("nonnegativity");
    show(&check_nonnegativity(&|x: f64| (x - 1.0).powi(2), &GridSpec::log(0.01, 100.0, 80), 1e-9)?);
    show(&check_nonnegativity(&f64::sin, &grid, 1e-9)?);

    println!("ratio monotonicity");
    show(&check_ratio_monotone(&|x: f64| (-x).exp(), &|x: f64| 1.0 / (1.0 + x), &grid, Direction::Decreasing, 1e-9)?);

    println!("positive definiteness");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    show(&check_positive_definite(&|r: f64| (-r * r).exp(), 3, 12, 20, 1e-9, &mut rng)?);
    show(&check_positive_definite(&|r: f64| -r * r, 3, 12, 20, 1e-9, &mut rng)?);

    println!("Chebyshev");
    let c = chebyshev_check(|t: f64| (-t).exp(), |t: f64| t, |t: f64| t * t, 0.0, 2.0, 1e-12);
    println!("  same monotonicity: {:.8} ≥ {:.8}: {}", c.lhs, c.rhs, c.holds);
    Ok(())
}
