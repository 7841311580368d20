//! Direct series summation of Fox–Wright and Mittag-Leffler functions.

use serde::Serialize;

use crate::eval::{EvalError, Evaluation, Method};
use crate::gamma;
use crate::spec::{ConvergenceReport, FoxWrightSpec, ModelError};

const MAX_TERMS: usize = 100_000;
const ZERO_RUN: usize = 1000;
const BOUNDARY_TOL: f64 = 1e-12;

/// Δ, ρ, μ of the series, plus `C`, `D`, `c`, `d` of its H-image.
pub fn classify(fw: &FoxWrightSpec) -> ConvergenceReport {
    fw.classify_parts()
}

/// One series term in log form: `sign·exp(log_abs)`; `log_scale` bounds the
/// magnitude of the logs that were added up (for the rounding estimate).
struct Term {
    log_abs: f64,
    sign: f64,
    log_scale: f64,
}

/// Sums terms until three consecutive non-zero terms fall below `tol`
/// relative to the running sum.
fn sum_series<F>(tol: f64, mut term: F) -> Result<Evaluation, EvalError>
where
    F: FnMut(usize) -> Result<Option<Term>, EvalError>,
{
    let mut sum = 0.0;
    let mut rounding = 0.0;
    let mut small = 0;
    let mut zeros = 0;
    let mut last = 0.0;
    for k in 0..MAX_TERMS {
        let Some(t) = term(k)? else {
            zeros += 1;
            if zeros >= ZERO_RUN {
                return Ok(done(sum, last, rounding, k + 1, tol));
            }
            continue;
        };
        zeros = 0;
        if t.log_abs > 709.0 {
            return Err(EvalError::Divergent(format!("term {k} overflows (log magnitude {:.1})", t.log_abs)));
        }
        let v = t.sign * t.log_abs.exp();
        sum += v;
        last = v.abs();
        rounding += 4e-16 * last * (1.0 + t.log_scale);
        if last <= tol * sum.abs() {
            small += 1;
            if small >= 3 {
                return Ok(done(sum, last, rounding, k + 1, tol));
            }
        } else {
            small = 0;
        }
    }
    Err(EvalError::Divergent(format!("no convergence within {MAX_TERMS} terms")))
}

/// Cancellation shows up as a rounding estimate above the tolerance and
/// clears `converged`.
fn done(sum: f64, last: f64, rounding: f64, terms: usize, tol: f64) -> Evaluation {
    let error = (3.0 * last).max(rounding);
    Evaluation {
        value: sum,
        error,
        imag_residual: 0.0,
        method: Method::Series,
        work: terms,
        converged: error <= 100.0 * tol.max(1e-14) * sum.abs().max(f64::MIN_POSITIVE),
    }
}

fn check_domain(fw: &FoxWrightSpec, z: f64) -> Result<(), EvalError> {
    if !z.is_finite() {
        return Err(EvalError::Domain(format!("argument must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(());
    }
    let r = classify(fw);
    if r.delta > BOUNDARY_TOL {
        return Ok(());
    }
    if r.delta.abs() <= BOUNDARY_TOL {
        if z.abs() < r.radius {
            return Ok(());
        }
        return Err(EvalError::Divergent(format!(
            "Δ = 0 and |z| = {} is not below the radius {}",
            z.abs(),
            r.radius
        )));
    }
    Err(EvalError::Divergent(format!("Δ = {} < 0: the series diverges for z ≠ 0", r.delta)))
}

/// `ₚΨ_q(z)` by its defining series.
pub fn eval_fw(fw: &FoxWrightSpec, z: f64, tol: f64) -> Result<Evaluation, EvalError> {
    check_domain(fw, z)?;
    let ln_z = z.abs().ln();
    let zsign = z.signum();
    sum_series(tol, |k| {
        if k > 0 && z == 0.0 {
            return Ok(None);
        }
        let kf = k as f64;
        let lf = gamma::ln_gamma_signed(kf + 1.0).map(|v| v.0).unwrap_or(0.0);
        let mut log_abs = if k == 0 { 0.0 } else { kf * ln_z } - lf;
        let mut log_scale = log_abs.abs();
        let mut sign = if k % 2 == 1 && zsign < 0.0 { -1.0 } else { 1.0 };
        for &(a, aw) in &fw.upper {
            let (lg, s) = gamma::ln_gamma_signed(a + kf * aw)
                .map_err(|_| EvalError::Domain(format!("Γ({}) is infinite in term {k}", a + kf * aw)))?;
            log_abs += lg;
            log_scale += lg.abs();
            sign *= s;
        }
        for &(b, bw) in &fw.lower {
            match gamma::ln_gamma_signed(b + kf * bw) {
                Ok((lg, s)) => {
                    log_abs -= lg;
                    log_scale += lg.abs();
                    sign *= s;
                }
                Err(_) => return Ok(None),
            }
        }
        Ok(Some(Term { log_abs, sign, log_scale }))
    })
}

/// `E^γ_{α,β}(z) = Σ (γ)_k z^k / (Γ(β + kα) k!)`.
pub fn mittag_leffler(alpha: f64, beta: f64, gamma_p: f64, z: f64, tol: f64) -> Result<Evaluation, EvalError> {
    if !(alpha > 0.0) {
        return Err(EvalError::Model(ModelError::NonPositiveWeight(format!("α = {alpha} must be positive"))));
    }
    if !z.is_finite() {
        return Err(EvalError::Domain(format!("argument must be finite, got {z}")));
    }
    let ln_z = z.abs().ln();
    let zsign = z.signum();
    // running log|(γ)_k| and its sign
    let mut poch_log = 0.0;
    let mut poch_sign = 1.0;
    let mut poch_zero = false;
    sum_series(tol, move |k| {
        if k > 0 {
            let f = gamma_p + (k - 1) as f64;
            if f == 0.0 {
                poch_zero = true;
            } else {
                poch_log += f.abs().ln();
                poch_sign *= f.signum();
            }
        }
        if poch_zero || (k > 0 && z == 0.0) {
            return Ok(None);
        }
        let kf = k as f64;
        let (lg, s) = match gamma::ln_gamma_signed(beta + kf * alpha) {
            Ok(v) => v,
            Err(_) => return Ok(None),
        };
        let lf = gamma::ln_gamma_signed(kf + 1.0).map(|v| v.0).unwrap_or(0.0);
        let log_abs = poch_log + if k == 0 { 0.0 } else { kf * ln_z } - lg - lf;
        let sign = poch_sign * s * if k % 2 == 1 && zsign < 0.0 { -1.0 } else { 1.0 };
        Ok(Some(Term { log_abs, sign, log_scale: poch_log.abs() + lg.abs() + lf }))
    })
}

/// `ₚΨ_q` with unit weights written as `coefficient · ₚF_q(upper; lower; z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypergeometricForm {
    pub coefficient: f64,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

pub fn to_generalized_hypergeometric(fw: &FoxWrightSpec) -> Result<HypergeometricForm, ModelError> {
    if let Some(&(_, w)) = fw.upper.iter().chain(&fw.lower).find(|p| (p.1 - 1.0).abs() > BOUNDARY_TOL) {
        return Err(ModelError::NonUniformWeights(format!("all weights must equal 1, found {w}")));
    }
    let mut coefficient = 1.0;
    for &(a, _) in &fw.upper {
        coefficient *= gamma::gamma_real(a).map_err(|e| ModelError::Invalid(format!("Γ({a}): {e}")))?;
    }
    for &(b, _) in &fw.lower {
        coefficient *= gamma::rgamma_real(b);
    }
    Ok(HypergeometricForm {
        coefficient,
        upper: fw.upper.iter().map(|p| p.0).collect(),
        lower: fw.lower.iter().map(|p| p.0).collect(),
    })
}

/// Partial sums of `ₚF_q(upper; lower; z)`.
pub fn hypergeometric_pfq(upper: &[f64], lower: &[f64], z: f64, tol: f64) -> Result<f64, EvalError> {
    let (p, q) = (upper.len(), lower.len());
    if p > q + 1 || (p == q + 1 && z.abs() >= 1.0) {
        return Err(EvalError::Divergent(format!("{p}F{q} series at z = {z}")));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small = 0;
    for k in 0..MAX_TERMS {
        let kf = k as f64;
        let num: f64 = upper.iter().map(|a| a + kf).product();
        let den: f64 = lower.iter().map(|b| b + kf).product();
        if num == 0.0 {
            return Ok(sum);
        }
        if den == 0.0 {
            return Err(EvalError::Domain("lower parameter is a non-positive integer".into()));
        }
        term *= num / den * z / (kf + 1.0);
        sum += term;
        if term.abs() <= tol * sum.abs() {
            small += 1;
            if small >= 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(EvalError::Divergent(format!("no convergence within {MAX_TERMS} terms")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn fw(upper: Vec<(f64, f64)>, lower: Vec<(f64, f64)>) -> FoxWrightSpec {
        FoxWrightSpec::new(upper, lower).unwrap()
    }

    #[test]
    fn classify_examples() {
        let r = classify(&fw(vec![(1.0, 1.0)], vec![(1.0, 1.0)]));
        assert_eq!(r.delta, 1.0);
        assert_eq!(r.mu, Some(0.0));
        let r = classify(&fw(vec![(1.0, 1.0)], vec![]));
        assert_eq!(r.delta, 0.0);
        assert_eq!(r.radius, 1.0);
        let r = classify(&fw(vec![(1.0, 0.5), (1.0, 0.5)], vec![(1.0, 1.0)]));
        assert!((r.radius - 2.0).abs() < 1e-14);
    }

    #[test]
    fn series_examples() {
        let e = eval_fw(&fw(vec![(1.0, 1.0)], vec![(1.0, 1.0)]), 1.0, 1e-15).unwrap();
        assert!((e.value - E).abs() < 1e-14);
        let g = eval_fw(&fw(vec![(1.0, 1.0)], vec![]), 0.5, 1e-15).unwrap();
        assert!((g.value - 2.0).abs() < 1e-13);
        assert!(matches!(eval_fw(&fw(vec![(1.0, 1.0)], vec![]), 1.0, 1e-12), Err(EvalError::Divergent(_))));
        assert!(matches!(
            eval_fw(&fw(vec![(1.0, 2.0)], vec![(1.0, 0.5)]), 0.1, 1e-12),
            Err(EvalError::Divergent(_))
        ));
    }

    #[test]
    fn unit_weights_reduce_to_hypergeometric() {
        let spec = fw(vec![(0.7, 1.0), (1.3, 1.0)], vec![(2.1, 1.0)]);
        let form = to_generalized_hypergeometric(&spec).unwrap();
        let f = hypergeometric_pfq(&form.upper, &form.lower, 0.3, 1e-16).unwrap();
        let direct = eval_fw(&spec, 0.3, 1e-16).unwrap().value;
        assert!((form.coefficient * f - direct).abs() < 1e-13 * direct.abs());
        let kummer = to_generalized_hypergeometric(&fw(vec![(2.0, 1.0)], vec![(3.0, 1.0)])).unwrap();
        assert!((kummer.coefficient - 0.5).abs() < 1e-15);
        assert!(to_generalized_hypergeometric(&fw(vec![(2.0, 2.0)], vec![(3.0, 1.0)])).is_err());
    }

    #[test]
    fn mittag_leffler_examples() {
        assert!((mittag_leffler(1.0, 1.0, 1.0, 1.0, 1e-16).unwrap().value - E).abs() < 1e-14);
        assert!((mittag_leffler(2.0, 1.0, 1.0, 1.0, 1e-16).unwrap().value - 1f64.cosh()).abs() < 1e-14);
        let at0 = mittag_leffler(0.7, 2.5, 1.3, 0.0, 1e-16).unwrap().value;
        assert!((at0 - gamma::rgamma_real(2.5)).abs() < 1e-15);
        // γ = 0 leaves only the constant term
        let g0 = mittag_leffler(0.7, 2.5, 0.0, 3.0, 1e-16).unwrap().value;
        assert!((g0 - gamma::rgamma_real(2.5)).abs() < 1e-15);
        // E_{1/2,1}(-x) = exp(x²) erfc(x); at x = 1: 0.4275835761558070
        let half = mittag_leffler(0.5, 1.0, 1.0, -1.0, 1e-16).unwrap().value;
        assert!((half - 0.427_583_576_155_807).abs() < 1e-13);
    }

    #[test]
    fn mittag_leffler_is_scaled_fox_wright() {
        for (a, b, g) in [(0.5, 1.0, 0.8), (1.5, 0.7, 2.2), (0.9, 1.9, 1.0)] {
            let ml = mittag_leffler(a, b, g, -0.8, 1e-16).unwrap().value;
            let psi = eval_fw(&fw(vec![(g, 1.0)], vec![(b, a)]), -0.8, 1e-16).unwrap().value;
            assert!((ml * gamma::gamma_real(g).unwrap() - psi).abs() < 1e-12);
        }
    }
}
