//! Evaluation of H-functions on the positive real ray.
//!
//! Two independent routes: quadrature of the Mellin–Barnes integral along a
//! vertical line ([`eval_h`], [`HEvaluator`]) and summation of residues at the
//! left poles ([`eval_h_series`], [`ResidueExpansion`]).

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock, RwLock};

use num_complex::Complex64;
use serde::Serialize;

use crate::gamma;
use crate::quad::GaussLegendre;
use crate::spec::{self, HFunctionSpec, ModelError};

/// Minimum width of the pole-free strip.
const MIN_GAP: f64 = 1e-9;
/// Panel refinement levels tried before giving up.
const MAX_LEVEL: usize = 8;
/// Upper bound on the truncation height.
const MAX_HALF_HEIGHT: f64 = 4000.0;
/// Hard cap on the number of residue groups summed.
const MAX_TERMS: usize = 100_000;
/// Consecutive growing terms that signal divergence.
const GROWTH_RUN: usize = 20;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("no separating line: left poles reach {left_max}, right poles start at {right_min}")]
    NoSeparatingLine { left_max: f64, right_min: f64 },
    #[error("argument out of domain: {0}")]
    Domain(String),
    #[error("integrand does not decay along the contour: {0}")]
    NonConvergent(String),
    #[error("left poles coincide near s = {at}; residues are not simple")]
    MultiplePole { at: f64 },
    #[error("left pole at s = {at} coincides with a right pole")]
    Overlap { at: f64 },
    #[error("the kernel has no left poles (n = 0)")]
    NoLeftPoles,
    #[error("residue series diverges: {0}")]
    Divergent(String),
    #[error("asymptotic condition violated: {0}")]
    Condition(String),
}

/// Vertical contour `Re s = abscissa`, truncated to `|Im s| ≤ half_height`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ContourSpec {
    pub abscissa: f64,
    pub half_height: f64,
    pub nodes: usize,
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Contour,
    Series,
}

/// A computed value with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Evaluation {
    pub value: f64,
    pub error: f64,
    pub imag_residual: f64,
    pub method: Method,
    /// Quadrature nodes or series terms used.
    pub work: usize,
    /// `false` when the requested tolerance was not reached; `error` then
    /// carries the achieved estimate.
    pub converged: bool,
}

fn gap_bounds(spec: &HFunctionSpec) -> (Option<f64>, Option<f64>) {
    let left_max = spec.upper[..spec.n].iter().map(|&(a, aw)| -a / aw).reduce(f64::max);
    let right_min = spec.lower[..spec.m].iter().map(|&(b, bw)| (1.0 - b) / bw).reduce(f64::min);
    (left_max, right_min)
}

/// Abscissa of a separating line: the midpoint of the pole gap, with an
/// empty side capped one unit away from the other lattice.
pub fn separating_abscissa(spec: &HFunctionSpec) -> Result<f64, EvalError> {
    match gap_bounds(spec) {
        (Some(l), Some(r)) => {
            if r - l <= MIN_GAP {
                Err(EvalError::NoSeparatingLine { left_max: l, right_min: r })
            } else {
                Ok(0.5 * (l + r))
            }
        }
        (Some(l), None) => Ok(l + 0.5),
        (None, Some(r)) => Ok(r - 0.5),
        (None, None) => Err(EvalError::Model(ModelError::Invalid("m + n must be at least 1".into()))),
    }
}

fn log_abs_kernel(spec: &HFunctionSpec, s: Complex64) -> Result<f64, EvalError> {
    Ok(spec::log_mellin_kernel(spec, s)?.map_or(f64::NEG_INFINITY, |v| v.re))
}

/// Plans the contour: abscissa at the gap midpoint, height from the decay
/// `|𝓗(c+it)| ~ exp(-πD|t|/2)` so the dropped tail is below `tol·1e-3` of the peak.
pub fn choose_contour(spec: &HFunctionSpec, tol: f64) -> Result<ContourSpec, EvalError> {
    spec.validate()?;
    if !(tol > 0.0) {
        return Err(EvalError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let c = separating_abscissa(spec)?;
    let (_, big_d) = spec::structural_sums(spec);
    let half_height = if big_d > 0.0 {
        let decay = 0.5 * PI * big_d;
        let target = (tol * 1e-3 * decay).ln();
        let mut peak = f64::NEG_INFINITY;
        let mut t = 0.0;
        loop {
            let v = log_abs_kernel(spec, Complex64::new(c, t))?;
            peak = peak.max(v);
            if t >= 2.0 && v < peak + target {
                break t;
            }
            if t >= MAX_HALF_HEIGHT {
                break MAX_HALF_HEIGHT;
            }
            t += 0.5;
        }
    } else {
        MAX_HALF_HEIGHT
    };
    let nodes = (16 * half_height.ceil() as usize).max(32);
    Ok(ContourSpec { abscissa: c, half_height, nodes, tol })
}

struct Level {
    t: Vec<f64>,
    w: Vec<f64>,
    log_kernel: Vec<Option<Complex64>>,
}

/// Contour evaluator that caches kernel values on the line, so evaluating
/// many arguments costs one exponential per node and argument.
pub struct HEvaluator {
    spec: HFunctionSpec,
    contour: ContourSpec,
    big_d: f64,
    /// `log|𝓗|` at the top of the truncated line.
    edge_log_kernel: f64,
    base_panels: usize,
    levels: Vec<OnceLock<Result<Level, ModelError>>>,
    mirror: OnceLock<Result<Vec<Option<Complex64>>, ModelError>>,
}

impl HEvaluator {
    pub fn new(spec: &HFunctionSpec, contour: ContourSpec) -> Result<Self, EvalError> {
        spec.validate()?;
        let (left, right) = gap_bounds(spec);
        let c = contour.abscissa;
        if left.is_some_and(|l| c <= l) || right.is_some_and(|r| c >= r) {
            return Err(EvalError::Domain(format!(
                "abscissa {c} does not separate the poles (left max {left:?}, right min {right:?})"
            )));
        }
        let (_, big_d) = spec::structural_sums(spec);
        let base_panels = (contour.nodes / 16).max(2);
        let edge_log_kernel = log_abs_kernel(spec, Complex64::new(c, contour.half_height))?;
        Ok(Self {
            spec: spec.clone(),
            contour,
            big_d,
            edge_log_kernel,
            base_panels,
            levels: (0..MAX_LEVEL).map(|_| OnceLock::new()).collect(),
            mirror: OnceLock::new(),
        })
    }

    /// Chooses the contour with [`choose_contour`].
    pub fn with_tolerance(spec: &HFunctionSpec, tol: f64) -> Result<Self, EvalError> {
        Self::new(spec, choose_contour(spec, tol)?)
    }

    pub fn spec(&self) -> &HFunctionSpec {
        &self.spec
    }

    pub fn contour(&self) -> &ContourSpec {
        &self.contour
    }

    fn level(&self, k: usize) -> Result<&Level, EvalError> {
        let lvl = self.levels[k].get_or_init(|| {
            let rule = GaussLegendre::sixteen();
            let panels = self.base_panels << k;
            let width = self.contour.half_height / panels as f64;
            let mut t = Vec::with_capacity(panels * 16);
            let mut w = Vec::with_capacity(panels * 16);
            for p in 0..panels {
                let mid = (p as f64 + 0.5) * width;
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    t.push(mid + 0.5 * width * x);
                    w.push(0.5 * width * wt);
                }
            }
            let log_kernel = t
                .iter()
                .map(|&ti| spec::log_mellin_kernel(&self.spec, Complex64::new(self.contour.abscissa, ti)))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(Level { t, w, log_kernel })
        });
        lvl.as_ref().map_err(|e| EvalError::Model(e.clone()))
    }

    fn sum(&self, level: &Level, ln_z: f64) -> (f64, f64) {
        let c = self.contour.abscissa;
        let mut acc = 0.0;
        let mut l1 = 0.0;
        for ((&t, &w), lk) in level.t.iter().zip(&level.w).zip(&level.log_kernel) {
            if let Some(lk) = lk {
                let e = lk - Complex64::new(c, t) * ln_z;
                let mag = e.re.exp();
                acc += w * mag * e.im.cos();
                l1 += w * mag;
            }
        }
        (acc / PI, l1 / PI)
    }

    /// Imaginary part of the full-line sum on the coarsest level, with the
    /// lower half of the line evaluated independently.
    fn imag_residual(&self, ln_z: f64) -> Result<f64, EvalError> {
        let level = self.level(0)?;
        let mirror = self.mirror.get_or_init(|| {
            level
                .t
                .iter()
                .map(|&ti| spec::log_mellin_kernel(&self.spec, Complex64::new(self.contour.abscissa, -ti)))
                .collect()
        });
        let mirror = mirror.as_ref().map_err(|e| EvalError::Model(e.clone()))?;
        let c = self.contour.abscissa;
        let mut acc = Complex64::new(0.0, 0.0);
        for (((&t, &w), up), down) in level.t.iter().zip(&level.w).zip(&level.log_kernel).zip(mirror) {
            if let Some(up) = up {
                acc += w * (up - Complex64::new(c, t) * ln_z).exp();
            }
            if let Some(down) = down {
                acc += w * (down - Complex64::new(c, -t) * ln_z).exp();
            }
        }
        Ok((acc / (2.0 * PI)).im.abs())
    }

    /// `H(z)` for `z > 0`.
    pub fn eval(&self, z: f64) -> Result<Evaluation, EvalError> {
        if !(z > 0.0) || !z.is_finite() {
            return Err(EvalError::Domain(format!("contour evaluation needs z > 0, got {z}")));
        }
        if !(self.big_d > 0.0) {
            return Err(EvalError::NonConvergent(format!(
                "D = {} must be positive on the positive ray",
                self.big_d
            )));
        }
        let tol = self.contour.tol;
        let ln_z = z.ln();
        let (mut prev, _) = self.sum(self.level(0)?, ln_z);
        let mut last_diff = f64::INFINITY;
        let mut value = prev;
        let mut work = self.level(0)?.t.len();
        let mut converged = false;
        let mut l1 = 0.0;
        for k in 1..MAX_LEVEL {
            let level = self.level(k)?;
            let (v, norm) = self.sum(level, ln_z);
            work = level.t.len();
            last_diff = (v - prev).abs();
            value = v;
            l1 = norm;
            if last_diff <= tol * v.abs().max(1e-13 * norm) {
                converged = true;
                break;
            }
            prev = v;
        }
        // the part of the line beyond the half-height, assuming exponential decay from there on
        let c = self.contour.abscissa;
        let tail = (self.edge_log_kernel - c * ln_z).exp() / (PI * 0.5 * PI * self.big_d);
        if tail > tol * value.abs().max(1e-13 * l1) {
            converged = false;
        }
        if !value.is_finite() {
            return Err(EvalError::NonConvergent(format!("non-finite quadrature sum at z = {z}")));
        }
        let roundoff = 1e-16 * l1 * (work as f64).sqrt();
        let imag_residual = self.imag_residual(ln_z)?;
        if imag_residual > 1e-6 * l1.max(value.abs()) {
            return Err(EvalError::NonConvergent(format!(
                "imaginary residue {imag_residual:e} on a real-valued integral"
            )));
        }
        Ok(Evaluation {
            value,
            error: last_diff.max(roundoff).max(tail),
            imag_residual,
            method: Method::Contour,
            work,
            converged,
        })
    }
}

/// Mellin–Barnes quadrature along the given contour.
pub fn eval_h(spec: &HFunctionSpec, z: f64, contour: ContourSpec) -> Result<Evaluation, EvalError> {
    HEvaluator::new(spec, contour)?.eval(z)
}

/// Contour quadrature when `D > 0`, otherwise the residue series (with
/// multiple poles allowed).  An unconverged contour result is replaced by
/// the series value when that has the smaller error.
pub fn evaluate(spec: &HFunctionSpec, z: f64, tol: f64) -> Result<Evaluation, EvalError> {
    let (big_c, big_d) = spec::structural_sums(spec);
    let series = || ResidueExpansion::new(spec, SeriesOptions { tol, allow_multiple: true })?.eval(z);
    if big_d > 0.0 && z > 0.0 {
        let contour = eval_h(spec, z, choose_contour(spec, tol)?)?;
        if contour.converged || spec.n == 0 || big_c < -1e-12 {
            return Ok(contour);
        }
        Ok(better(contour, series().ok()))
    } else {
        series()
    }
}

fn better(first: Evaluation, other: Option<Evaluation>) -> Evaluation {
    match other {
        Some(o) if o.converged && !first.converged => o,
        Some(o) if o.converged == first.converged && o.error < first.error => o,
        _ => first,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesOptions {
    pub tol: f64,
    /// Sum coincident poles by circle quadrature instead of failing.
    pub allow_multiple: bool,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { tol: 1e-12, allow_multiple: false }
    }
}

const CIRCLE_POINTS: usize = 64;
const STRICT_MERGE: f64 = 1e-10;
const LOOSE_MERGE: f64 = 1e-4;

enum Group {
    /// Residue `sign·exp(log_abs)·z^{-s0}`; `log_abs = -∞` for a vanishing residue.
    Simple { s0: f64, log_abs: f64, sign: f64, log_scale: f64 },
    /// Residue by the trapezoid rule on a circle.
    Circle { center: f64, radius: f64, log_kernel: Vec<Option<Complex64>> },
}

struct PoleCursor {
    next: Vec<u64>,
}

/// Residue expansion over the left poles, extended lazily and shared between
/// evaluations.
pub struct ResidueExpansion {
    spec: HFunctionSpec,
    opts: SeriesOptions,
    report: spec::ConvergenceReport,
    state: RwLock<(Vec<Arc<Group>>, PoleCursor, bool)>,
}

impl ResidueExpansion {
    pub fn new(spec: &HFunctionSpec, opts: SeriesOptions) -> Result<Self, EvalError> {
        spec.validate()?;
        if spec.n == 0 {
            return Err(EvalError::NoLeftPoles);
        }
        Ok(Self {
            spec: spec.clone(),
            opts,
            report: spec::convergence_params(spec),
            state: RwLock::new((Vec::new(), PoleCursor { next: vec![0; spec.n] }, false)),
        })
    }

    fn left_pole(&self, i: usize, l: u64) -> f64 {
        let (a, aw) = self.spec.upper[i];
        -(a + l as f64) / aw
    }

    /// Produces the next pole cluster, or `None` if generation must stop.
    fn next_group(&self, cursor: &mut PoleCursor) -> Result<Group, EvalError> {
        let n = self.spec.n;
        let (lead, s0) = (0..n)
            .map(|i| (i, self.left_pole(i, cursor.next[i])))
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
        let merge = if self.opts.allow_multiple { LOOSE_MERGE } else { STRICT_MERGE };
        let mut members = vec![(lead, cursor.next[lead], s0)];
        cursor.next[lead] += 1;
        // absorb every pole within the merge distance of the cluster
        loop {
            let lowest = members.iter().map(|m| m.2).fold(f64::INFINITY, f64::min);
            let mut added = false;
            for i in 0..n {
                let s = self.left_pole(i, cursor.next[i]);
                if (lowest - s).abs() <= merge + 1e-13 * s.abs() || s > lowest {
                    members.push((i, cursor.next[i], s));
                    cursor.next[i] += 1;
                    added = true;
                }
            }
            if !added {
                break;
            }
        }
        for &(_, _, s) in &members {
            self.check_overlap(s)?;
        }
        if members.len() == 1 {
            let (i, l, s) = members[0];
            return self.simple_group(i, l, s);
        }
        let spread = members.iter().map(|m| m.2).fold(f64::NEG_INFINITY, f64::max)
            - members.iter().map(|m| m.2).fold(f64::INFINITY, f64::min);
        if !self.opts.allow_multiple && spread <= STRICT_MERGE * (1.0 + s0.abs()) {
            return Err(EvalError::MultiplePole { at: s0 });
        }
        if !self.opts.allow_multiple {
            // distinct but close poles: sum their simple residues
            return Err(EvalError::MultiplePole { at: s0 });
        }
        let center = members.iter().map(|m| m.2).sum::<f64>() / members.len() as f64;
        let outside = (0..n)
            .map(|i| (self.left_pole(i, cursor.next[i]) - center).abs())
            .fold(f64::INFINITY, f64::min);
        let previous = members
            .iter()
            .filter_map(|&(i, l, _)| (l > 0).then(|| (self.left_pole(i, l - 1) - center).abs()))
            .fold(f64::INFINITY, f64::min);
        let right = self.nearest_right_pole(center);
        let radius = (0.5 * outside.min(previous).min(right)).min(0.25).max(2.0 * spread);
        let log_kernel = (0..CIRCLE_POINTS)
            .map(|j| {
                let th = 2.0 * PI * (j as f64 + 0.5) / CIRCLE_POINTS as f64;
                let s = Complex64::new(center + radius * th.cos(), radius * th.sin());
                spec::log_mellin_kernel(&self.spec, s)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Group::Circle { center, radius, log_kernel })
    }

    fn nearest_right_pole(&self, s: f64) -> f64 {
        self.spec.lower[..self.spec.m]
            .iter()
            .map(|&(b, bw)| {
                let first = (1.0 - b) / bw;
                if s <= first {
                    first - s
                } else {
                    let k = ((s - first) * bw).ceil();
                    (first + k / bw - s).abs().min((s - first - (k - 1.0) / bw).abs())
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn check_overlap(&self, s: f64) -> Result<(), EvalError> {
        for &(b, bw) in &self.spec.lower[..self.spec.m] {
            let x = 1.0 - b - bw * s;
            let k = x.round();
            if k <= 0.0 && (x - k).abs() < STRICT_MERGE * (1.0 + x.abs()) {
                return Err(EvalError::Overlap { at: s });
            }
        }
        Ok(())
    }

    fn simple_group(&self, i: usize, l: u64, s0: f64) -> Result<Group, EvalError> {
        let (_, aw) = self.spec.upper[i];
        let mut log_abs = -gamma::ln_gamma_signed(l as f64 + 1.0).map(|v| v.0).unwrap_or(0.0) - aw.ln();
        let mut log_scale = log_abs.abs();
        let mut sign = if l.is_multiple_of(2) { 1.0 } else { -1.0 };
        let factors = self
            .spec
            .upper
            .iter()
            .enumerate()
            .map(|(k, &(a, w))| if k < self.spec.n { (a + w * s0, true, k == i) } else { (1.0 - a - w * s0, false, false) })
            .chain(self.spec.lower.iter().enumerate().map(|(k, &(b, w))| {
                if k < self.spec.m {
                    (1.0 - b - w * s0, true, false)
                } else {
                    (b + w * s0, false, false)
                }
            }));
        for (x, numerator, skip) in factors {
            if skip {
                continue;
            }
            match gamma::ln_gamma_signed(x) {
                Ok((lg, sg)) => {
                    log_abs += if numerator { lg } else { -lg };
                    log_scale += lg.abs();
                    sign *= sg;
                }
                Err(_) if !numerator => {
                    return Ok(Group::Simple { s0, log_abs: f64::NEG_INFINITY, sign: 0.0, log_scale: 0.0 });
                }
                Err(_) => return Err(EvalError::MultiplePole { at: s0 }),
            }
        }
        Ok(Group::Simple { s0, log_abs, sign, log_scale })
    }

    fn term(group: &Group, ln_z: f64, z: f64) -> Result<f64, EvalError> {
        match group {
            Group::Simple { s0, log_abs, sign, .. } => {
                if *sign == 0.0 || *log_abs == f64::NEG_INFINITY {
                    return Ok(0.0);
                }
                if z == 0.0 {
                    return if *s0 < 0.0 {
                        Ok(0.0)
                    } else if *s0 == 0.0 {
                        Ok(sign * log_abs.exp())
                    } else {
                        Err(EvalError::Domain("series is singular at z = 0".into()))
                    };
                }
                Ok(sign * (log_abs - s0 * ln_z).exp())
            }
            Group::Circle { center, radius, log_kernel } => {
                if z == 0.0 {
                    return if *center + radius < 0.0 {
                        Ok(0.0)
                    } else {
                        Err(EvalError::Domain("multiple pole at z = 0 needs z > 0".into()))
                    };
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for (j, lk) in log_kernel.iter().enumerate() {
                    if let Some(lk) = lk {
                        let th = 2.0 * PI * (j as f64 + 0.5) / CIRCLE_POINTS as f64;
                        let e = Complex64::new(0.0, th).exp();
                        let s = *center + radius * e;
                        acc += (lk - s * ln_z).exp() * e;
                    }
                }
                Ok((acc * (*radius / CIRCLE_POINTS as f64)).re)
            }
        }
    }

    fn extend(&self, target: usize) -> Result<(), EvalError> {
        let mut guard = self.state.write().expect("residue cache poisoned");
        let (groups, cursor, _) = &mut *guard;
        while groups.len() < target {
            let g = self.next_group(cursor)?;
            groups.push(Arc::new(g));
        }
        Ok(())
    }

    /// Sum of residues at `z ≥ 0`.
    pub fn eval(&self, z: f64) -> Result<Evaluation, EvalError> {
        if !(z >= 0.0) || !z.is_finite() {
            return Err(EvalError::Domain(format!("series evaluation needs z ≥ 0, got {z}")));
        }
        let r = &self.report;
        if r.big_c < -1e-12 {
            return Err(EvalError::Divergent(format!("C = {} < 0: the left residue series diverges", r.big_c)));
        }
        if !r.series_converges_at(z) && r.big_c.abs() <= 1e-12 {
            return Err(EvalError::Divergent(format!(
                "z = {z} lies outside the convergence radius {}",
                r.radius
            )));
        }
        let tol = self.opts.tol;
        let ln_z = if z > 0.0 { z.ln() } else { f64::NEG_INFINITY };
        let mut sum = 0.0;
        let mut abs_sum = 0.0f64;
        let mut rounding = 0.0;
        let mut small_run = 0;
        let mut zero_run = 0;
        let mut growth_run = 0;
        let mut last_mag = f64::NAN;
        let mut last_ratio = 0.0;
        let mut idx = 0;
        let mut available = self.state.read().expect("residue cache poisoned").0.len();
        loop {
            if idx >= MAX_TERMS {
                return Err(EvalError::Divergent(format!("no convergence within {MAX_TERMS} terms at z = {z}")));
            }
            if idx >= available {
                self.extend((available * 2).max(64).min(MAX_TERMS))?;
                available = self.state.read().expect("residue cache poisoned").0.len();
            }
            let group = self.state.read().expect("residue cache poisoned").0[idx].clone();
            let t = Self::term(&group, ln_z, z)?;
            idx += 1;
            sum += t;
            let mag = t.abs();
            abs_sum = abs_sum.max(mag);
            // relative error of exp(log) grows with the size of the log
            let scale = match &*group {
                Group::Simple { log_scale, .. } => 1.0 + log_scale + if z > 0.0 { (s0_of(&group) * ln_z).abs() } else { 0.0 },
                Group::Circle { .. } => 1e3,
            };
            rounding += 4e-16 * mag * scale;
            if t == 0.0 {
                zero_run += 1;
                if zero_run >= 1000 {
                    break;
                }
                continue;
            }
            zero_run = 0;
            if mag.is_nan() || mag.is_infinite() {
                return Err(EvalError::Divergent(format!("term overflow at index {idx}")));
            }
            if last_mag.is_finite() && mag > last_mag {
                let ratio = mag / last_mag;
                if ratio >= last_ratio {
                    growth_run += 1;
                } else {
                    growth_run = 0;
                }
                last_ratio = ratio;
                if growth_run >= GROWTH_RUN {
                    return Err(EvalError::Divergent(format!(
                        "terms grew for {GROWTH_RUN} consecutive indices with non-decreasing ratio at z = {z}"
                    )));
                }
            } else {
                growth_run = 0;
                last_ratio = 0.0;
            }
            last_mag = mag;
            if mag <= tol * sum.abs() {
                small_run += 1;
                if small_run >= 3 {
                    break;
                }
            } else {
                small_run = 0;
            }
            if z == 0.0 && idx > 0 && matches!(&*group, Group::Simple { s0, .. } if *s0 < 0.0) {
                break;
            }
        }
        let roundoff = rounding + 1e-16 * abs_sum * (idx as f64).sqrt();
        let error = (last_mag * 3.0).max(roundoff);
        Ok(Evaluation {
            value: sum,
            error,
            imag_residual: 0.0,
            method: Method::Series,
            work: idx,
            // cancellation leaves a rounding estimate far above the tolerance
            converged: error <= 100.0 * tol.max(1e-14) * sum.abs().max(f64::MIN_POSITIVE),
        })
    }
}

fn s0_of(group: &Group) -> f64 {
    match group {
        Group::Simple { s0, .. } => *s0,
        Group::Circle { center, .. } => *center,
    }
}

/// Residue sum over the left poles; fails on coincident poles.
pub fn eval_h_series(spec: &HFunctionSpec, z: f64, tol: f64) -> Result<Evaluation, EvalError> {
    ResidueExpansion::new(spec, SeriesOptions { tol, allow_multiple: false })?.eval(z)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Zero,
    Infinity,
}

/// `c = min_{j≤n} a_j/A_j` at zero, `d = min_{j≤m} (b_j - 1)/B_j` at infinity.
pub fn asymptotic_exponent(spec: &HFunctionSpec, regime: Regime) -> Result<f64, EvalError> {
    let (big_c, big_d) = spec::structural_sums(spec);
    let report = spec::convergence_params(spec);
    match regime {
        Regime::Zero => {
            if !(big_c >= 0.0 || big_d > 0.0) {
                return Err(EvalError::Condition(format!("need C ≥ 0 or D > 0, have C = {big_c}, D = {big_d}")));
            }
            report
                .zero_exponent
                .ok_or_else(|| EvalError::Condition("n = 0: the minimum over j ≤ n is empty".into()))
        }
        Regime::Infinity => {
            if !(big_c <= 0.0 || big_d > 0.0) {
                return Err(EvalError::Condition(format!("need C ≤ 0 or D > 0, have C = {big_c}, D = {big_d}")));
            }
            report
                .inf_exponent
                .ok_or_else(|| EvalError::Condition("m = 0: the minimum over j ≤ m is empty".into()))
        }
    }
}

/// Exponent of the leading power term at infinity, `max_{j≤m} (b_j - 1)/B_j`
/// (the nearest right pole dominates).
pub fn leading_exponent_at_infinity(spec: &HFunctionSpec) -> Option<f64> {
    spec.lower[..spec.m].iter().map(|&(b, bw)| (b - 1.0) / bw).reduce(f64::max)
}

/// An H-function ready for repeated evaluation on `[0, ∞)`: residue series
/// for small arguments, contour quadrature elsewhere.
pub struct HFunction {
    spec: HFunctionSpec,
    contour: Option<HEvaluator>,
    series: Option<ResidueExpansion>,
    series_limit: f64,
}

impl HFunction {
    pub fn new(spec: &HFunctionSpec, tol: f64) -> Result<Self, EvalError> {
        spec.validate()?;
        let report = spec::convergence_params(spec);
        let contour = if report.big_d > 0.0 {
            match HEvaluator::with_tolerance(spec, tol) {
                Ok(ev) => Some(ev),
                Err(EvalError::NoSeparatingLine { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        let series = if spec.n > 0 && report.big_c >= -1e-12 {
            Some(ResidueExpansion::new(spec, SeriesOptions { tol: tol * 1e-2, allow_multiple: true })?)
        } else {
            None
        };
        let radius = report.series_radius.unwrap_or(f64::INFINITY);
        let series_limit = match (&contour, &series) {
            (_, None) => -1.0,
            (None, Some(_)) => radius,
            (Some(_), Some(_)) => (0.5 * radius).min(1.0),
        };
        if contour.is_none() && series.is_none() {
            return Err(EvalError::NonConvergent(format!(
                "neither the contour (D = {}) nor the residue series (C = {}) is available",
                report.big_d, report.big_c
            )));
        }
        Ok(Self { spec: spec.clone(), contour, series, series_limit })
    }

    pub fn spec(&self) -> &HFunctionSpec {
        &self.spec
    }

    pub fn eval(&self, z: f64) -> Result<Evaluation, EvalError> {
        if let Some(series) = &self.series {
            if z < self.series_limit || (z == 0.0 && self.series_limit >= 0.0) {
                match (series.eval(z), &self.contour) {
                    (Ok(v), _) => return Ok(v),
                    (Err(e), None) => return Err(e),
                    (Err(_), Some(_)) => {}
                }
            }
        }
        match &self.contour {
            Some(c) => {
                let v = c.eval(z)?;
                if v.converged {
                    return Ok(v);
                }
                Ok(better(v, self.series.as_ref().and_then(|s| s.eval(z).ok())))
            }
            None => Err(EvalError::Divergent(format!(
                "z = {z} is outside the residue series radius {} and no contour exists",
                self.series_limit
            ))),
        }
    }

    /// The value alone.
    pub fn value(&self, z: f64) -> Result<f64, EvalError> {
        self.eval(z).map(|e| e.value)
    }
}
