//! Transform identities as spec rewrites, with independent numerical
//! evaluations of their left-hand sides.

use std::cell::RefCell;
use std::f64::consts::PI;

use serde::Serialize;

use crate::bessel;
use crate::eval::{self, EvalError, HFunction, ResidueExpansion, SeriesOptions};
use crate::foxwright;
use crate::gamma;
use crate::quad::{self, Integral};
use crate::spec::{self, FoxWrightSpec, HFunctionSpec, ModelError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TransformError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("kernel is negative at t = {t}: {value:e}")]
    NegativeKernel { t: f64, value: f64 },
    #[error("integral does not converge: {0}")]
    Nonintegrable(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, TransformError>;

fn zero_exponent(spec: &HFunctionSpec) -> Option<f64> {
    spec.upper[..spec.n].iter().map(|&(a, aw)| a / aw).reduce(f64::min)
}

/// Laplace image: `ℒ{H}(s) = (1/s)·H'(1/s)` with `H'` the returned spec.
pub fn laplace_of_h(spec: &HFunctionSpec) -> Result<HFunctionSpec> {
    spec.validate()?;
    let (big_c, big_d) = spec::structural_sums(spec);
    if !(big_d > 0.0 || (big_d == 0.0 && big_c >= 0.0)) {
        return Err(TransformError::Precondition(format!(
            "need D > 0, or D = 0 and C ≥ 0; have C = {big_c}, D = {big_d}"
        )));
    }
    if let Some(c) = zero_exponent(spec) {
        if !(c + 1.0 > 0.0) {
            return Err(TransformError::Precondition(format!("need min a_j/A_j + 1 > 0; have {}", c + 1.0)));
        }
    }
    let mut lower = vec![(0.0, 1.0)];
    lower.extend_from_slice(&spec.lower);
    Ok(HFunctionSpec::new(spec.m + 1, spec.n, spec.upper.clone(), lower)?)
}

/// `(1/s)·H'(1/s)` for the Laplace image `H'`.
pub fn laplace_closed_form(image: &HFunctionSpec, s: f64, tol: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(TransformError::Precondition(format!("need s > 0, got {s}")));
    }
    Ok(HFunction::new(image, tol)?.value(1.0 / s)? / s)
}

fn first_error<T>(slot: &RefCell<Option<EvalError>>, r: std::result::Result<T, EvalError>, fallback: T) -> T {
    match r {
        Ok(v) => v,
        Err(e) => {
            slot.borrow_mut().get_or_insert(e);
            fallback
        }
    }
}

/// `∫₀^∞ e^{-st} H(t) dt` by quadrature in `u = ln t`, truncated where both
/// ends fall below `10⁻³·tol`.
pub fn laplace_numeric(spec: &HFunctionSpec, s: f64, tol: f64) -> Result<Integral> {
    laplace_of_h(spec)?;
    if !(s > 0.0) {
        return Err(TransformError::Precondition(format!("need s > 0, got {s}")));
    }
    let h = HFunction::new(spec, tol * 1e-2)?;
    let c = zero_exponent(spec).unwrap_or(0.0);
    let growth = eval::leading_exponent_at_infinity(spec).unwrap_or(0.0).max(0.0);
    let target = 1e-3 * tol;
    let mut upper = 1.0 / s;
    while (-s * upper).exp() * upper.powf(growth + 1.0) > target {
        upper *= 1.5;
    }
    let lower = target.powf(1.0 / (1.0 + c)).clamp(1e-300, 1e-3);
    let err = RefCell::new(None);
    let body = quad::adaptive_gauss(lower.ln(), upper.ln(), tol * 1e-2, |u| {
        let t = u.exp();
        t * (-s * t).exp() * first_error(&err, h.value(t), 0.0)
    });
    // power-law head on (0, lower)
    let head = first_error(&err, h.value(lower), 0.0) * lower / (1.0 + c);
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    Ok(Integral { value: body.value + head, error: body.error + head.abs() * 1e-2, converged: body.converged })
}

/// Closed-form Hankel image: the left side equals
/// `2^{ρ-1} x^{-ρ} H'[b (2/x)^σ]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HankelImage {
    pub spec: HFunctionSpec,
    pub rho_p: f64,
    pub nu: f64,
    pub sigma: f64,
}

impl HankelImage {
    pub fn evaluate(&self, b: f64, x: f64, tol: f64) -> Result<f64> {
        if !(x > 0.0 && b > 0.0) {
            return Err(TransformError::Precondition(format!("need x, b > 0, got x = {x}, b = {b}")));
        }
        let arg = b * (2.0 / x).powf(self.sigma);
        let h = HFunction::new(&self.spec, tol)?;
        Ok(2f64.powf(self.rho_p - 1.0) * x.powf(-self.rho_p) * h.value(arg)?)
    }
}

/// The two inequalities of the Hankel lemma; an empty minimum is vacuous.
pub fn hankel_preconditions(spec: &HFunctionSpec, rho_p: f64, nu: f64) -> Result<()> {
    spec.validate()?;
    let (_, big_d) = spec::structural_sums(spec);
    if !(big_d > 0.0) {
        return Err(TransformError::Precondition(format!("need D > 0; have D = {big_d}")));
    }
    if let Some(c) = zero_exponent(spec) {
        if !(rho_p + nu + c > -1.0) {
            return Err(TransformError::Precondition(format!(
                "need ρ + ν + min a_j/A_j > -1; have {}",
                rho_p + nu + c
            )));
        }
    }
    if let Some(r) = spec.lower[..spec.m].iter().map(|&(b, bw)| (1.0 - b) / bw).reduce(f64::min) {
        if !(rho_p + r < 1.5) {
            return Err(TransformError::Precondition(format!(
                "need ρ + min (1 - b_j)/B_j < 3/2; have {}",
                rho_p + r
            )));
        }
    }
    Ok(())
}

pub fn hankel_of_h(spec: &HFunctionSpec, rho_p: f64, nu: f64, sigma: f64) -> Result<HankelImage> {
    if !(sigma > 0.0) {
        return Err(TransformError::Precondition(format!("need σ > 0, got {sigma}")));
    }
    hankel_preconditions(spec, rho_p, nu)?;
    let mut lower = Vec::with_capacity(spec.q() + 2);
    lower.push((1.0 - 0.5 * (rho_p + nu), 0.5 * sigma));
    lower.extend_from_slice(&spec.lower);
    lower.push((1.0 - 0.5 * (rho_p - nu), 0.5 * sigma));
    // the new first pair is a numerator factor, the trailing one a denominator factor
    let image = HFunctionSpec::new(spec.m + 1, spec.n, spec.upper.clone(), lower)?;
    eval::separating_abscissa(&image)?;
    Ok(HankelImage { spec: image, rho_p, nu, sigma })
}

const MAX_CELLS: usize = 200;

/// `∫₀^∞ r^{ρ-1} J_ν(xr) H[b r^σ] dr`, integrated cell by cell between
/// Bessel zeros with Wynn acceleration of the partial sums.  An unconverged
/// result after 200 cells is returned with `converged = false`.
#[allow(clippy::too_many_arguments)]
pub fn hankel_numeric(
    spec: &HFunctionSpec,
    rho_p: f64,
    nu: f64,
    sigma: f64,
    b: f64,
    x: f64,
    tol: f64,
) -> Result<Integral> {
    hankel_preconditions(spec, rho_p, nu)?;
    if !(x > 0.0 && b > 0.0 && sigma > 0.0) {
        return Err(TransformError::Precondition(format!("need x, b, σ > 0, got {x}, {b}, {sigma}")));
    }
    let h = HFunction::new(spec, tol * 1e-2)?;
    let err = RefCell::new(None);
    let f = |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let hv = first_error(&err, h.value(b * r.powf(sigma)), 0.0);
        r.powf(rho_p - 1.0) * bessel::bessel_j(nu, x * r) * hv
    };
    let mut edges = vec![0.0];
    let mut partial = Vec::new();
    let mut sum = 0.0f64;
    let mut quiet = 0;
    let mut settled = 0;
    let mut last_extrapolated = f64::NAN;
    let mut error = f64::INFINITY;
    for k in 1..=MAX_CELLS {
        let prev = *edges.last().unwrap();
        let next = (bessel::zero_estimate(nu, k) / x).max(prev + 0.1 * PI / x);
        edges.push(next);
        let cell = if k == 1 {
            quad::tanh_sinh(prev, next, tol * 1e-2, |r, _| f(r))
        } else {
            quad::adaptive_gauss_floor(prev, next, tol * 1e-2, tol * 1e-3 * sum.abs(), f)
        };
        if let Some(e) = err.borrow_mut().take() {
            return Err(e.into());
        }
        sum += cell.value;
        partial.push(sum);
        if cell.value.abs() <= 1e-3 * tol * sum.abs() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(Integral { value: sum, error: cell.value.abs().max(cell.error), converged: true });
            }
        } else {
            quiet = 0;
        }
        if partial.len() >= 6 {
            let window = &partial[partial.len().saturating_sub(40)..];
            let extrapolated = quad::wynn_epsilon(window);
            error = (extrapolated - last_extrapolated).abs();
            if error <= tol * extrapolated.abs() {
                settled += 1;
                if settled >= 2 {
                    return Ok(Integral { value: extrapolated, error, converged: true });
                }
            } else {
                settled = 0;
            }
            last_extrapolated = extrapolated;
        }
    }
    Ok(Integral { value: last_extrapolated, error, converged: false })
}

/// Radial Fourier transform in `ℝ^d` of the profile `f(r) = H[r^σ]`:
/// `|ξ|^{(2-d)/2} ∫₀^∞ r^{d/2} J_{(d-2)/2}(r|ξ|) f(r) dr`.
pub fn radial_fourier(spec: &HFunctionSpec, sigma: f64, d: u32, xi: f64, tol: f64) -> Result<Integral> {
    if d == 0 {
        return Err(TransformError::Precondition("dimension must be positive".into()));
    }
    let df = d as f64;
    let r = hankel_numeric(spec, 0.5 * df + 1.0, 0.5 * df - 1.0, sigma, 1.0, xi, tol)?;
    let scale = xi.powf(1.0 - 0.5 * df);
    Ok(Integral { value: scale * r.value, error: scale * r.error, converged: r.converged })
}

/// Closed form of [`radial_fourier`] through the Hankel image.
pub fn radial_fourier_closed(spec: &HFunctionSpec, sigma: f64, d: u32, xi: f64, tol: f64) -> Result<f64> {
    let df = d as f64;
    let image = hankel_of_h(spec, 0.5 * df + 1.0, 0.5 * df - 1.0, sigma)?;
    Ok(xi.powf(1.0 - 0.5 * df) * image.evaluate(1.0, xi, tol)?)
}

/// The kernel `H^{p,0}_{q,p}` whose measure `H(t) dt/t` represents `fw`.
pub fn measure_kernel(fw: &FoxWrightSpec) -> Result<HFunctionSpec> {
    if fw.upper.is_empty() {
        return Err(TransformError::Hypothesis("at least one upper pair is needed".into()));
    }
    for &(_, w) in fw.upper.iter().chain(&fw.lower) {
        if !(w > 0.0) {
            return Err(ModelError::NonPositiveWeight(format!("weight {w}")).into());
        }
    }
    Ok(HFunctionSpec::new(0, fw.p(), fw.upper.clone(), fw.lower.clone())?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MuCondition {
    Positive,
    Zero,
}

fn check_representation(fw: &FoxWrightSpec, mu: MuCondition) -> Result<f64> {
    let sum_a: f64 = fw.upper.iter().map(|p| p.1).sum();
    let sum_b: f64 = fw.lower.iter().map(|p| p.1).sum();
    if (sum_a - sum_b).abs() > 1e-10 {
        return Err(TransformError::Hypothesis(format!("need ΣA = ΣB; have {sum_a} vs {sum_b}")));
    }
    let g = fw.upper.iter().map(|&(a, aw)| a / aw).fold(f64::INFINITY, f64::min);
    if !(g >= 1.0) {
        return Err(TransformError::Hypothesis(format!("need min a_j/A_j ≥ 1; have {g}")));
    }
    let report = foxwright::classify(fw);
    let m = report.mu.unwrap_or(f64::NAN);
    match mu {
        MuCondition::Positive if !(m > 0.0) => {
            Err(TransformError::Hypothesis(format!("need μ > 0; have μ = {m}")))
        }
        MuCondition::Zero if m.abs() > 1e-10 => Err(TransformError::Hypothesis(format!("need μ = 0; have μ = {m}"))),
        _ => Ok(m),
    }
}

/// Fraction of the support cut off before the endpoint correction.
const END_CUT: f64 = 1e-3;

/// `∫ w(t) H(t) dt/t` over the support `(0, 1/ρ)` of the measure kernel.
fn integrate_measure<W: Fn(f64) -> f64>(fw: &FoxWrightSpec, mu: f64, tol: f64, w: W) -> Result<f64> {
    let kernel = measure_kernel(fw)?;
    let report = foxwright::classify(fw);
    let end = 1.0 / report.radius;
    let expansion = ResidueExpansion::new(&kernel, SeriesOptions { tol: 1e-14, allow_multiple: true })?;
    let cut = end * (1.0 - END_CUT);
    let err = RefCell::new(None);
    let body = quad::tanh_sinh(0.0, cut, tol * 1e-2, |t, _| {
        let k = first_error(&err, expansion.eval(t).map(|e| e.value), 0.0);
        w(t) * k / t
    });
    if let Some(e) = err.into_inner() {
        return Err(e.into());
    }
    // near the endpoint the density is (end - t)^e (c₀ + c₁ (end - t) + …)
    let e = if mu <= 0.0 && mu.fract() == 0.0 { mu } else { mu - 1.0 };
    let gap = end - cut;
    let reduced = |t: f64| -> Result<f64> { Ok(w(t) * expansion.eval(t)?.value / t / (end - t).powf(e)) };
    // quadratic in u = end - t through u = gap, 2 gap, 3 gap
    let (g1, g2, g3) = (reduced(cut)?, reduced(end - 2.0 * gap)?, reduced(end - 3.0 * gap)?);
    let c2 = (g3 - 2.0 * g2 + g1) / (2.0 * gap * gap);
    let c1 = (g2 - g1) / gap - 3.0 * gap * c2;
    let c0 = g1 - c1 * gap - c2 * gap * gap;
    let tail = c0 * gap.powf(e + 1.0) / (e + 1.0) + c1 * gap.powf(e + 2.0) / (e + 2.0) + c2 * gap.powf(e + 3.0) / (e + 3.0);
    Ok(body.value + tail)
}

/// `∫₀^{1/ρ} e^{zt} H(t) dt/t` for the measure kernel of `fw`.
pub fn integral_rep_fw(fw: &FoxWrightSpec, z: f64, tol: f64) -> Result<f64> {
    let mu = check_representation(fw, MuCondition::Positive)?;
    integrate_measure(fw, mu, tol, |t| (z * t).exp())
}

/// `∫₀^{1/ρ} (1 + tz)^{-σ} dμ(t)`, after checking the kernel on a 200-point
/// log grid.
pub fn stieltjes_rep(fw: &FoxWrightSpec, sigma: f64, z: f64, tol: f64) -> Result<f64> {
    let mu = check_representation(fw, MuCondition::Positive)?;
    if !(sigma >= 0.0) {
        return Err(TransformError::Precondition(format!("need σ ≥ 0, got {sigma}")));
    }
    if !(0.0..1.0).contains(&z) {
        return Err(TransformError::Precondition(format!("need z in [0, 1), got {z}")));
    }
    assert_kernel_nonnegative(fw)?;
    integrate_measure(fw, mu, tol, |t| (1.0 + t * z).powf(-sigma))
}

/// Samples the measure kernel on a log grid over its support.
pub fn assert_kernel_nonnegative(fw: &FoxWrightSpec) -> Result<()> {
    let kernel = measure_kernel(fw)?;
    let end = 1.0 / foxwright::classify(fw).radius;
    let expansion = ResidueExpansion::new(&kernel, SeriesOptions { tol: 1e-14, allow_multiple: true })?;
    let values = (0..200)
        .map(|j| {
            let t = end * 10f64.powf(-6.0 + 6.0 * j as f64 / 199.0) * (1.0 - END_CUT);
            expansion.eval(t).map(|e| (t, e.value))
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let scale = values.iter().map(|v| v.1.abs()).fold(1.0, f64::max);
    match values.iter().find(|v| v.1 < -1e-8 * scale) {
        Some(&(t, value)) => Err(TransformError::NegativeKernel { t, value }),
        None => Ok(()),
    }
}

/// Constants of the exponential-shift representation and of the shifted
/// CM theorems.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RepresentationConstants {
    pub eta: f64,
    /// Convergence radius `Π A^{-A} Π B^{B}` of the series.
    pub rho: f64,
    /// Location `1/ρ` of the point mass of the measure.
    pub atom: f64,
    pub eta_variant: Option<f64>,
    pub rho_variant: Option<f64>,
}

/// `η = (2π)^{(p-q)/2} Π A_i^{a_i - 1/2} Π B_j^{1/2 - b_j}`.
pub fn lemma_eta(fw: &FoxWrightSpec) -> f64 {
    let log = 0.5 * (fw.p() as f64 - fw.q() as f64) * (2.0 * PI).ln()
        + fw.upper.iter().map(|&(a, aw)| (a - 0.5) * aw.ln()).sum::<f64>()
        + fw.lower.iter().map(|&(b, bw)| (0.5 - b) * bw.ln()).sum::<f64>();
    log.exp()
}

/// `∫₀^{1/ρ} e^{-zt} dμ(t)` and the constants for which
/// `ₚΨ_q(-z) - η e^{-z/ρ}` equals it.
pub fn exp_shifted_rep(fw: &FoxWrightSpec, z: f64, tol: f64) -> Result<(f64, RepresentationConstants)> {
    let mu = check_representation(fw, MuCondition::Zero)?;
    let rho = foxwright::classify(fw).radius;
    let value = integrate_measure(fw, mu, tol, |t| (-z * t).exp())?;
    Ok((value, RepresentationConstants { eta: lemma_eta(fw), rho, atom: 1.0 / rho, eta_variant: None, rho_variant: None }))
}

/// `η₁ = √π 2^{τ - d/2 + 1/2}`, without the hypothesis check.
pub fn eta1(tau: f64, d: f64) -> f64 {
    PI.sqrt() * 2f64.powf(tau - 0.5 * d + 0.5)
}

/// `(η₂, ρ₂)` as printed.
pub fn eta2_rho2(alpha: f64, gamma_p: f64, d: f64) -> (f64, f64) {
    let u = (1.0 - alpha) / (2.0 * alpha);
    let v = 1.0 / (2.0 * alpha);
    let eta = (2.0 * PI).sqrt()
        * 0.5f64.powf(0.5 * d - 1.5)
        * u.powf((2.0 + 2.0 * gamma_p * (1.0 - alpha) - alpha) / (2.0 * alpha))
        * v.powf(gamma_p * (alpha - 1.0) - 0.5);
    let rho = 2f64.sqrt() * v.powf(v) * u.powf((alpha - 1.0) / (2.0 * alpha));
    (eta, rho)
}

/// `(η₃, ρ₃)` as printed.
pub fn eta3_rho3(alpha: f64, beta: f64, gamma_p: f64) -> (f64, f64) {
    let v = 1.0 / (2.0 * alpha);
    let w = 1.0 / (2.0 * alpha * beta);
    let eta = 2f64.sqrt() * v.powf(-0.5 - gamma_p / beta) * w.powf((gamma_p + beta) / (alpha * beta) - 0.5);
    let rho = 0.5f64.sqrt() * v.powf(v) * w.powf(w);
    (eta, rho)
}

/// η₁, (η₂, ρ₂) or (η₃, ρ₃) after validating the parameters against H8, H9
/// or H10.
pub fn hypothesis_constants(theorem_id: &str, params: &crate::harness::Params) -> Result<RepresentationConstants> {
    let set = crate::harness::hypothesis_set(theorem_id)
        .ok_or_else(|| TransformError::Hypothesis(format!("no representation constants for {theorem_id}")))?;
    set.check(params).map_err(|e| TransformError::Hypothesis(e.to_string()))?;
    let get = |k: &str| params.get(k).copied().unwrap_or(f64::NAN);
    let (eta_variant, rho_variant) = match set.id {
        "H8" => (eta1(get("tau"), get("d")), 2.0),
        "H9" => eta2_rho2(get("alpha"), get("gamma"), get("d")),
        "H10" => eta3_rho3(get("alpha"), get("beta"), get("gamma")),
        other => return Err(TransformError::Hypothesis(format!("no representation constants for {other}"))),
    };
    Ok(RepresentationConstants {
        eta: eta_variant,
        rho: rho_variant,
        atom: 1.0 / rho_variant,
        eta_variant: Some(eta_variant),
        rho_variant: Some(rho_variant),
    })
}

/// `Γ(σ)` factor relating [`stieltjes_rep`] to the `ₚ₊₁Ψ_q` series.
pub fn stieltjes_normalisation(sigma: f64) -> f64 {
    gamma::gamma_real(sigma).unwrap_or(f64::INFINITY)
}
