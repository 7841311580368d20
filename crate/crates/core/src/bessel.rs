//! Bessel functions of the first kind on the real half-line.
//!
//! `puruspe` covers `ν ≥ 0, 0 < x ≲ 10⁴`; small arguments go through the
//! power series, large ones through the Hankel expansion, and orders in
//! `(-1, 0)` through `J_{-μ} = cos(μπ) J_μ - sin(μπ) Y_μ`.

use std::f64::consts::PI;

use crate::gamma;

const SERIES_LIMIT: f64 = 1.0;
const ASYMPTOTIC_LIMIT: f64 = 1000.0;

fn series(nu: f64, x: f64) -> f64 {
    // J_ν(x) = (x/2)^ν Σ (-x²/4)^k / (k! Γ(ν+k+1))
    let q = -0.25 * x * x;
    let mut term = gamma::rgamma_real(nu + 1.0);
    let mut sum = term;
    for k in 1..60 {
        term *= q / (k as f64 * (nu + k as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    if nu == 0.0 {
        sum
    } else {
        (0.5 * x).powf(nu) * sum
    }
}

fn hankel_expansion(nu: f64, x: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 0..30 {
        let signed = if (k / 2) % 2 == 0 { a } else { -a };
        if k % 2 == 0 {
            p += signed;
        } else {
            q += signed;
        }
        let odd = (2 * k + 1) as f64;
        let next = a * (mu - odd * odd) / ((k + 1) as f64 * 8.0 * x);
        if next.abs() < 1e-17 || next.abs() > last {
            break;
        }
        last = a.abs();
        a = next;
    }
    let w = x - 0.5 * nu * PI - 0.25 * PI;
    let amp = (2.0 / (PI * x)).sqrt();
    (amp * (p * w.cos() - q * w.sin()), amp * (p * w.sin() + q * w.cos()))
}

fn jy_nonnegative(nu: f64, x: f64) -> (f64, f64) {
    if x > ASYMPTOTIC_LIMIT {
        hankel_expansion(nu, x)
    } else {
        let (j, y, _, _) = puruspe::besseljy(nu, x);
        (j, y)
    }
}

/// `J_ν(x)` for `x ≥ 0` and `ν > -1`.
pub fn bessel_j(nu: f64, x: f64) -> f64 {
    assert!(nu > -1.0, "order must exceed -1");
    assert!(x >= 0.0, "argument must be non-negative");
    if x == 0.0 {
        return if nu == 0.0 { 1.0 } else { 0.0 };
    }
    if x < SERIES_LIMIT {
        return series(nu, x);
    }
    if nu >= 0.0 {
        return jy_nonnegative(nu, x).0;
    }
    let m = -nu;
    let (j, y) = jy_nonnegative(m, x);
    (PI * m).cos() * j - (PI * m).sin() * y
}

/// Normalised kernel `𝓙_ν(x) = 2^ν Γ(ν+1) J_ν(x) / x^ν`, even in `x`, with `𝓙_ν(0) = 1`.
pub fn rescaled_bessel(nu: f64, x: f64) -> f64 {
    let x = x.abs();
    if x < SERIES_LIMIT {
        // Γ(ν+1) Σ (-x²/4)^k / (k! Γ(ν+k+1))
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= q / (k as f64 * (nu + k as f64));
            sum += term;
            if term.abs() < 1e-17 {
                break;
            }
        }
        return sum;
    }
    let log_pref = nu * std::f64::consts::LN_2 + gamma::ln_gamma_signed(nu + 1.0).map_or(0.0, |v| v.0)
        - nu * x.ln();
    log_pref.exp() * bessel_j(nu, x)
}

/// McMahon estimate of the `k`-th positive zero of `J_ν` (`k ≥ 1`).
pub fn zero_estimate(nu: f64, k: usize) -> f64 {
    let b = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let e = 8.0 * b;
    b - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_order_closed_forms() {
        for x in [0.3, 1.0, 2.5, 17.0, 250.0, 1500.0, 12000.0] {
            let j = (2.0 / (PI * x)).sqrt() * x.sin();
            assert!((bessel_j(0.5, x) - j).abs() < 1e-12, "{x}");
            let jm = (2.0 / (PI * x)).sqrt() * x.cos();
            assert!((bessel_j(-0.5, x) - jm).abs() < 1e-12, "{x}");
        }
    }

    #[test]
    fn reference_values() {
        // J_0(1), J_1(2.5), J_2(10), J_0(2000), J_{1/3}(0.4)
        let cases = [
            (0.0, 1.0, 0.765_197_686_557_966_6),
            (1.0, 2.5, 0.497_094_102_464_274_2),
            (2.0, 10.0, 0.254_630_313_685_120_6),
            (0.0, 2000.0, 0.007_098_341_833_199_617),
            (1.0 / 3.0, 0.4, 0.635_411_240_449_503_99),
        ];
        for (nu, x, want) in cases {
            let got = bessel_j(nu, x);
            assert!((got - want).abs() < 1e-12, "J_{nu}({x}) = {got}, want {want}");
        }
    }

    #[test]
    fn rescaled_kernel_is_normalised() {
        for nu in [-0.25, 0.0, 0.5, 1.0, 2.0] {
            assert_eq!(rescaled_bessel(nu, 0.0), 1.0);
            for k in 1..200 {
                let x = 0.1 * k as f64;
                assert!(rescaled_bessel(nu, x).abs() <= 1.0 + 1e-14, "nu={nu} x={x}");
            }
        }
        // 𝓙_{1/2}(x) = sin x / x
        assert!((rescaled_bessel(0.5, 2.0) - 2f64.sin() / 2.0).abs() < 1e-14);
        assert!((rescaled_bessel(0.5, 0.5) - 0.5f64.sin() / 0.5).abs() < 1e-15);
    }

    #[test]
    fn zero_estimates_are_close() {
        assert!((zero_estimate(0.0, 1) - 2.404_825_557_695_773).abs() < 2e-3);
        assert!(bessel_j(1.0, zero_estimate(1.0, 5)).abs() < 1e-6);
    }
}
