//! H-function parameter algebra.
//!
//! Storage follows the `H_{q,p}^{n,m}` layout: `upper` holds the `(a_i, A_i)`
//! pairs and `lower` the `(b_j, B_j)` pairs, with Mellin kernel
//!
//! ```text
//! 𝓗(s) = Π_{i≤n} Γ(a_i + A_i s) Π_{j≤m} Γ(1 - b_j - B_j s)
//!        / [ Π_{j>m} Γ(b_j + B_j s) Π_{i>n} Γ(1 - a_i - A_i s) ]
//! ```
//!
//! and `H(z) = (1/2πi) ∫ 𝓗(s) z^{-s} ds`.  The more common `H^{m,n}_{p,q}`
//! layout is accepted through [`Convention::Standard`].

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::gamma::{self, GammaError};

/// `(shift, weight)` pair.
pub type Pair = (f64, f64);

/// Tolerance used when comparing parameters for equality.
const PARAM_EQ_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid spec: {0}")]
    Invalid(String),
    #[error("kernel pole: {family} factor {index} hits its lattice point {point}")]
    KernelPole {
        family: Family,
        index: usize,
        point: i64,
    },
    #[error("kernel overflow (Re log 𝓗 = {0:.3})")]
    Overflow(f64),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("no matching pair: {0}")]
    NoMatchingPair(String),
    #[error("positive weights required: {0}")]
    NonPositiveWeight(String),
    #[error("weights are not uniform: {0}")]
    NonUniformWeights(String),
    #[error("spec parse error: {0}")]
    Parse(String),
}

/// Which parameter list a kernel factor comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Upper,
    Lower,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Upper => write!(f, "upper"),
            Family::Lower => write!(f, "lower"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunctionSpec {
    pub m: usize,
    pub n: usize,
    /// `(a_i, A_i)`, length `p`.
    pub upper: Vec<Pair>,
    /// `(b_j, B_j)`, length `q`.
    pub lower: Vec<Pair>,
}

impl HFunctionSpec {
    pub fn new(m: usize, n: usize, upper: Vec<Pair>, lower: Vec<Pair>) -> Result<Self, ModelError> {
        let spec = Self { m, n, upper, lower };
        spec.validate()?;
        Ok(spec)
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n > self.p() {
            return Err(ModelError::Invalid(format!("n = {} exceeds p = {}", self.n, self.p())));
        }
        if self.m > self.q() {
            return Err(ModelError::Invalid(format!("m = {} exceeds q = {}", self.m, self.q())));
        }
        if self.m + self.n == 0 {
            return Err(ModelError::Invalid("m + n must be at least 1".into()));
        }
        for (family, list) in [(Family::Upper, &self.upper), (Family::Lower, &self.lower)] {
            for (i, &(shift, weight)) in list.iter().enumerate() {
                if !shift.is_finite() || !weight.is_finite() {
                    return Err(ModelError::Invalid(format!("{family} pair {} is not finite", i + 1)));
                }
                if weight <= 0.0 {
                    return Err(ModelError::NonPositiveWeight(format!(
                        "{family} pair {} has weight {weight}",
                        i + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// The `e^{-z}` spec: `n = 1`, `upper = [(0, 1)]`.
    pub fn exponential() -> Self {
        Self { m: 0, n: 1, upper: vec![(0.0, 1.0)], lower: vec![] }
    }

    /// `H` form of `Γ(γ) E^γ_{α,β}(-z)`.
    pub fn mittag_leffler(alpha: f64, beta: f64, gamma_p: f64) -> Result<Self, ModelError> {
        Self::new(1, 1, vec![(0.0, 1.0), (1.0 - beta, alpha)], vec![(1.0 - gamma_p, 1.0)])
    }
}

impl fmt::Display for HFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |v: &[Pair]| {
            v.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(", ")
        };
        write!(
            f,
            "H[q={},p={}; n={},m={}] upper [{}] lower [{}]",
            self.q(),
            self.p(),
            self.n,
            self.m,
            list(&self.upper),
            list(&self.lower)
        )
    }
}

fn factor_log(
    arg: Complex64,
    family: Family,
    index: usize,
    numerator: bool,
) -> Result<Option<Complex64>, ModelError> {
    match gamma::log_gamma(arg) {
        Ok(v) => Ok(Some(if numerator { v } else { -v })),
        Err(GammaError::Pole(k)) => {
            if numerator {
                Err(ModelError::KernelPole { family, index: index + 1, point: k })
            } else {
                Ok(None)
            }
        }
        Err(GammaError::Overflow(v)) => Err(ModelError::Overflow(v)),
    }
}

/// `log 𝓗(s)`, or `None` when a denominator factor sits on a pole of `Γ`
/// (the kernel is then exactly zero).
pub fn log_mellin_kernel(spec: &HFunctionSpec, s: Complex64) -> Result<Option<Complex64>, ModelError> {
    let mut acc = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    for (i, &(a, aw)) in spec.upper.iter().enumerate() {
        let numerator = i < spec.n;
        let arg = if numerator { a + aw * s } else { one - a - aw * s };
        match factor_log(arg, Family::Upper, i, numerator)? {
            Some(v) => acc += v,
            None => return Ok(None),
        }
    }
    for (j, &(b, bw)) in spec.lower.iter().enumerate() {
        let numerator = j < spec.m;
        let arg = if numerator { one - b - bw * s } else { b + bw * s };
        match factor_log(arg, Family::Lower, j, numerator)? {
            Some(v) => acc += v,
            None => return Ok(None),
        }
    }
    Ok(Some(acc))
}

/// The Mellin kernel `𝓗(s)`.
pub fn mellin_kernel(spec: &HFunctionSpec, s: Complex64) -> Result<Complex64, ModelError> {
    match log_mellin_kernel(spec, s)? {
        None => Ok(Complex64::new(0.0, 0.0)),
        Some(lg) if lg.re > 709.78 => Err(ModelError::Overflow(lg.re)),
        Some(lg) => Ok(lg.exp()),
    }
}

/// Arithmetic progression `offset + k·spacing`, `k = 0, 1, 2, …`, of poles
/// contributed by one gamma factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lattice {
    pub factor: usize,
    pub offset: f64,
    pub spacing: f64,
}

impl Lattice {
    pub fn point(&self, k: u64) -> f64 {
        self.offset + k as f64 * self.spacing
    }
}

/// Left poles `-(a_i + l)/A_i` (`i ≤ n`) and right poles `(1 - b_j + k)/B_j` (`j ≤ m`).
pub fn pole_sets(spec: &HFunctionSpec) -> (Vec<Lattice>, Vec<Lattice>) {
    let left = spec.upper[..spec.n]
        .iter()
        .enumerate()
        .map(|(i, &(a, aw))| Lattice { factor: i + 1, offset: -a / aw, spacing: -1.0 / aw })
        .collect();
    let right = spec.lower[..spec.m]
        .iter()
        .enumerate()
        .map(|(j, &(b, bw))| Lattice { factor: j + 1, offset: (1.0 - b) / bw, spacing: 1.0 / bw })
        .collect();
    (left, right)
}

/// Convergence and structural parameters of a spec.
///
/// `delta`, `radius` and `mu` carry their Fox–Wright meaning.  For an image of
/// a Fox–Wright function they are computed on the preimage; for other specs
/// `delta` and `radius` are the corresponding quantities of the left-pole
/// residue series (`delta = C`, `radius = Π A_i^{A_i} Π B_j^{-B_j}`), which
/// coincide with the Fox–Wright values on images.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ConvergenceReport {
    pub delta: f64,
    /// `ΣB - ΣA` of the Fox–Wright form, i.e. `delta - 1`.
    pub weight_balance: f64,
    pub radius: f64,
    /// Radius of convergence of the series: `None` when it converges everywhere.
    pub series_radius: Option<f64>,
    pub mu: Option<f64>,
    #[serde(rename = "bigC")]
    pub big_c: f64,
    #[serde(rename = "bigD")]
    pub big_d: f64,
    pub zero_exponent: Option<f64>,
    pub inf_exponent: Option<f64>,
    pub fox_wright_image: bool,
}

impl ConvergenceReport {
    pub fn series_converges_at(&self, z: f64) -> bool {
        match self.series_radius {
            None => true,
            Some(r) => z.abs() < r,
        }
    }
}

fn series_radius(delta: f64, radius: f64) -> Option<f64> {
    if delta > PARAM_EQ_TOL {
        None
    } else if delta.abs() <= PARAM_EQ_TOL {
        Some(radius)
    } else {
        Some(0.0)
    }
}

fn min_or_none(it: impl Iterator<Item = f64>) -> Option<f64> {
    it.fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.min(v))))
}

/// `C` and `D` of the Hankel/Laplace lemmas.
pub fn structural_sums(spec: &HFunctionSpec) -> (f64, f64) {
    let sum_a: f64 = spec.upper.iter().map(|p| p.1).sum();
    let sum_b: f64 = spec.lower.iter().map(|p| p.1).sum();
    let big_c = sum_a - sum_b;
    let head_b: f64 = spec.lower[..spec.m].iter().map(|p| p.1).sum();
    let head_a: f64 = spec.upper[..spec.n].iter().map(|p| p.1).sum();
    let big_d = head_b - (sum_b - head_b) + head_a - (sum_a - head_a);
    (big_c, big_d)
}

pub fn convergence_params(spec: &HFunctionSpec) -> ConvergenceReport {
    let (big_c, big_d) = structural_sums(spec);
    let zero_exponent = min_or_none(spec.upper[..spec.n].iter().map(|&(a, aw)| a / aw));
    let inf_exponent = min_or_none(spec.lower[..spec.m].iter().map(|&(b, bw)| (b - 1.0) / bw));
    if let Some(fw) = fox_wright_preimage(spec) {
        let mut report = fw.classify_parts();
        report.big_c = big_c;
        report.big_d = big_d;
        report.zero_exponent = zero_exponent;
        report.inf_exponent = inf_exponent;
        return report;
    }
    let log_radius: f64 = spec.upper.iter().map(|&(_, w)| w * w.ln()).sum::<f64>()
        - spec.lower.iter().map(|&(_, w)| w * w.ln()).sum::<f64>();
    let radius = log_radius.exp();
    ConvergenceReport {
        delta: big_c,
        weight_balance: big_c - 1.0,
        radius,
        series_radius: series_radius(big_c, radius),
        mu: None,
        big_c,
        big_d,
        zero_exponent,
        inf_exponent,
        fox_wright_image: false,
    }
}

fn same(a: Pair, b: Pair) -> bool {
    (a.0 - b.0).abs() <= PARAM_EQ_TOL * (1.0 + a.0.abs()) && (a.1 - b.1).abs() <= PARAM_EQ_TOL * (1.0 + a.1.abs())
}

/// Argument inversion: the returned spec evaluated at `z` equals the input at `1/z`.
pub fn invert_argument(spec: &HFunctionSpec) -> HFunctionSpec {
    HFunctionSpec {
        m: spec.n,
        n: spec.m,
        upper: spec.lower.iter().map(|&(b, bw)| (1.0 - b, bw)).collect(),
        lower: spec.upper.iter().map(|&(a, aw)| (1.0 - a, aw)).collect(),
    }
}

/// Multiplies all weights by `k`; returns the new spec and the prefactor `k`
/// with `H_in(z) = k·H_out(z^k)`.
pub fn scale_argument(spec: &HFunctionSpec, k: f64) -> Result<(HFunctionSpec, f64), ModelError> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(ModelError::NonPositiveScale(k));
    }
    let out = HFunctionSpec {
        m: spec.m,
        n: spec.n,
        upper: spec.upper.iter().map(|&(a, aw)| (a, aw * k)).collect(),
        lower: spec.lower.iter().map(|&(b, bw)| (b, bw * k)).collect(),
    };
    Ok((out, k))
}

/// Cancels the last upper pair against the first lower pair.
///
/// Two placements cancel: the upper pair in the numerator (`n = p`) against
/// a denominator lower pair (`m = 0`), giving orders `(n - 1, m)`; or the
/// upper pair in the denominator (`n < p`) against a numerator lower pair
/// (`m ≥ 1`), giving `(n, m - 1)`.
pub fn reduce_matching_pair(spec: &HFunctionSpec) -> Result<HFunctionSpec, ModelError> {
    let (Some(&last), Some(&first)) = (spec.upper.last(), spec.lower.first()) else {
        return Err(ModelError::NoMatchingPair("both parameter lists must be non-empty".into()));
    };
    if !same(last, first) {
        return Err(ModelError::NoMatchingPair(format!(
            "last upper pair {last:?} differs from first lower pair {first:?}"
        )));
    }
    let p = spec.p();
    let (n, m) = if spec.n == p && spec.m == 0 {
        (spec.n - 1, spec.m)
    } else if spec.n < p && spec.m >= 1 {
        (spec.n, spec.m - 1)
    } else {
        return Err(ModelError::NoMatchingPair(format!(
            "orders (n = {}, m = {}) put both factors on the same side of the kernel",
            spec.n, spec.m
        )));
    };
    let reduced = HFunctionSpec {
        m,
        n,
        upper: spec.upper[..p - 1].to_vec(),
        lower: spec.lower[1..].to_vec(),
    };
    reduced.validate()?;
    Ok(reduced)
}

/// Absorbs `z^σ` into the parameters: `a_i + σA_i`, `b_j + σB_j`.
pub fn shift_power(spec: &HFunctionSpec, sigma: f64) -> HFunctionSpec {
    HFunctionSpec {
        m: spec.m,
        n: spec.n,
        upper: spec.upper.iter().map(|&(a, aw)| (a + sigma * aw, aw)).collect(),
        lower: spec.lower.iter().map(|&(b, bw)| (b + sigma * bw, bw)).collect(),
    }
}

/// Parameters of `ₚΨ_q`: numerator pairs `(a_l, A_l)`, denominator pairs `(b_l, B_l)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoxWrightSpec {
    pub upper: Vec<Pair>,
    pub lower: Vec<Pair>,
}

impl FoxWrightSpec {
    pub fn new(upper: Vec<Pair>, lower: Vec<Pair>) -> Result<Self, ModelError> {
        for (family, list) in [(Family::Upper, &upper), (Family::Lower, &lower)] {
            for (i, &(shift, weight)) in list.iter().enumerate() {
                if !shift.is_finite() || !weight.is_finite() || weight < 0.0 {
                    return Err(ModelError::Invalid(format!(
                        "{family} pair {} = ({shift}, {weight}) needs a finite shift and a nonnegative weight",
                        i + 1
                    )));
                }
            }
        }
        Ok(Self { upper, lower })
    }

    pub fn p(&self) -> usize {
        self.upper.len()
    }

    pub fn q(&self) -> usize {
        self.lower.len()
    }

    /// Δ, ρ, μ plus the `C`, `D`, `c`, `d` of the H-image (computed even when
    /// a weight vanishes and the image itself is not available).
    pub(crate) fn classify_parts(&self) -> ConvergenceReport {
        let sum_a: f64 = self.upper.iter().map(|p| p.1).sum();
        let sum_b: f64 = self.lower.iter().map(|p| p.1).sum();
        let delta = 1.0 + sum_b - sum_a;
        let xlnx = |w: f64| if w > 0.0 { w * w.ln() } else { 0.0 };
        let log_radius: f64 = -self.upper.iter().map(|p| xlnx(p.1)).sum::<f64>()
            + self.lower.iter().map(|p| xlnx(p.1)).sum::<f64>();
        let radius = log_radius.exp();
        let mu = self.lower.iter().map(|p| p.0).sum::<f64>() - self.upper.iter().map(|p| p.0).sum::<f64>()
            + (self.p() as f64 - self.q() as f64) / 2.0;
        let inf_exponent = min_or_none(self.upper.iter().filter(|p| p.1 > 0.0).map(|&(a, aw)| -a / aw));
        ConvergenceReport {
            delta,
            weight_balance: sum_b - sum_a,
            radius,
            series_radius: series_radius(delta, radius),
            mu: Some(mu),
            big_c: delta,
            big_d: 1.0 + sum_a - sum_b,
            zero_exponent: Some(0.0),
            inf_exponent,
            fox_wright_image: true,
        }
    }
}

/// `ₚΨ_q(z) = H(-z)` for the returned spec (`upper = [(0,1), (1-b_j, B_j)]`,
/// `n = 1`, `lower = [(1-a_i, A_i)]`, `m = p`).
pub fn from_fox_wright(fw: &FoxWrightSpec) -> Result<HFunctionSpec, ModelError> {
    for (family, list) in [(Family::Upper, &fw.upper), (Family::Lower, &fw.lower)] {
        if let Some((i, p)) = list.iter().enumerate().find(|(_, p)| !(p.1 > 0.0)) {
            return Err(ModelError::NonPositiveWeight(format!(
                "{family} pair {} has weight {}; the H representation holds only for positive weights",
                i + 1,
                p.1
            )));
        }
    }
    let mut upper = vec![(0.0, 1.0)];
    upper.extend(fw.lower.iter().map(|&(b, bw)| (1.0 - b, bw)));
    let lower = fw.upper.iter().map(|&(a, aw)| (1.0 - a, aw)).collect();
    HFunctionSpec::new(fw.p(), 1, upper, lower)
}

/// Recognises specs produced by [`from_fox_wright`].
pub fn fox_wright_preimage(spec: &HFunctionSpec) -> Option<FoxWrightSpec> {
    if spec.n != 1 || spec.m != spec.q() || spec.upper.is_empty() || !same(spec.upper[0], (0.0, 1.0)) {
        return None;
    }
    Some(FoxWrightSpec {
        upper: spec.lower.iter().map(|&(b, bw)| (1.0 - b, bw)).collect(),
        lower: spec.upper[1..].iter().map(|&(a, aw)| (1.0 - a, aw)).collect(),
    })
}

/// Meijer G parameters in the same layout as [`HFunctionSpec`] with unit weights.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeijerGSpec {
    pub m: usize,
    pub n: usize,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

impl MeijerGSpec {
    pub fn to_h_spec(&self) -> HFunctionSpec {
        HFunctionSpec {
            m: self.m,
            n: self.n,
            upper: self.upper.iter().map(|&a| (a, 1.0)).collect(),
            lower: self.lower.iter().map(|&b| (b, 1.0)).collect(),
        }
    }
}

/// With all weights equal to `A`: `H(z) = (1/A)·G(z^{1/A})`.  Returns the G
/// spec and the scale `1/A`.
pub fn to_meijer_g(spec: &HFunctionSpec) -> Result<(MeijerGSpec, f64), ModelError> {
    let mut weights = spec.upper.iter().chain(&spec.lower).map(|p| p.1);
    let w0 = weights.next().ok_or_else(|| ModelError::Invalid("empty spec".into()))?;
    if let Some(w) = weights.find(|w| (w - w0).abs() > PARAM_EQ_TOL * w0) {
        return Err(ModelError::NonUniformWeights(format!("found weights {w0} and {w}")));
    }
    let g = MeijerGSpec {
        m: spec.m,
        n: spec.n,
        upper: spec.upper.iter().map(|p| p.0).collect(),
        lower: spec.lower.iter().map(|p| p.0).collect(),
    };
    Ok((g, 1.0 / w0))
}

/// Index convention of a serialized spec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// `H_{q,p}^{n,m}` with `upper = (a, A)` pairs as stored here.
    #[default]
    Paper,
    /// `H^{m,n}_{p,q}`: `m` counts `Γ(b_j + B_j s)` lower factors and `n`
    /// counts `Γ(1 - a_j - A_j s)` upper factors.
    Standard,
}

/// On-disk form of a spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecDocument {
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub convention: Convention,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub upper: Vec<Pair>,
    #[serde(default)]
    pub lower: Vec<Pair>,
}

/// A parsed spec file.
#[derive(Debug, Clone, PartialEq)]
pub enum SpecInput {
    H(HFunctionSpec),
    FoxWright(FoxWrightSpec),
}

impl SpecDocument {
    pub fn from_h(spec: &HFunctionSpec) -> Self {
        Self {
            kind: Some("h".into()),
            convention: Convention::Paper,
            m: Some(spec.m),
            n: Some(spec.n),
            upper: spec.upper.clone(),
            lower: spec.lower.clone(),
        }
    }

    pub fn from_fox_wright(fw: &FoxWrightSpec) -> Self {
        Self {
            kind: Some("fw".into()),
            convention: Convention::Paper,
            m: None,
            n: None,
            upper: fw.upper.clone(),
            lower: fw.lower.clone(),
        }
    }

    pub fn into_input(self) -> Result<SpecInput, ModelError> {
        match self.kind.as_deref() {
            Some("fw") | Some("fox-wright") => {
                Ok(SpecInput::FoxWright(FoxWrightSpec::new(self.upper, self.lower)?))
            }
            None | Some("h") => {
                let (Some(m), Some(n)) = (self.m, self.n) else {
                    return Err(ModelError::Parse("H spec needs integer fields m and n".into()));
                };
                let spec = match self.convention {
                    Convention::Paper => HFunctionSpec { m, n, upper: self.upper, lower: self.lower },
                    Convention::Standard => HFunctionSpec { m: n, n: m, upper: self.lower, lower: self.upper },
                };
                spec.validate()?;
                Ok(SpecInput::H(spec))
            }
            Some(other) => Err(ModelError::Parse(format!("unknown spec kind {other:?}"))),
        }
    }
}

/// Parses the JSON spec format.
pub fn parse_spec(json: &str) -> Result<SpecInput, ModelError> {
    let doc: SpecDocument = serde_json::from_str(json).map_err(|e| ModelError::Parse(e.to_string()))?;
    doc.into_input()
}

/// Serializes a spec in the given convention.
pub fn spec_to_json(spec: &HFunctionSpec, convention: Convention) -> String {
    let mut doc = SpecDocument::from_h(spec);
    if convention == Convention::Standard {
        doc.convention = Convention::Standard;
        doc.m = Some(spec.n);
        doc.n = Some(spec.m);
        doc.upper = spec.lower.clone();
        doc.lower = spec.upper.clone();
    }
    serde_json::to_string_pretty(&doc).expect("spec serialization cannot fail")
}
