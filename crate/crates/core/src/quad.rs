//! Quadrature rules shared by the evaluators and the transform verifiers.

use std::sync::OnceLock;

/// Nodes and weights of an `n`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Shared 16-point rule used for panel quadrature.
    pub fn sixteen() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(16))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Tanh–sinh (double exponential) quadrature on `[a, b]`.
///
/// Tolerates integrable endpoint singularities; `f` is never evaluated at
/// the endpoints themselves.  The callback receives `(x, distance to the
/// nearest endpoint)` so singular integrands can use the accurate gap.
pub fn tanh_sinh<F>(a: f64, b: f64, tol: f64, mut f: F) -> Integral
where
    F: FnMut(f64, f64) -> f64,
{
    let half = 0.5 * (b - a);
    let h0 = 1.0;
    let tmax = 6.5;
    let mut eval = |t: f64| -> f64 {
        let u = std::f64::consts::FRAC_PI_2 * t.sinh();
        let cu = u.cosh();
        let x = u.tanh();
        // distance of mid + half*x from the nearer endpoint: half * (1 - |x|)
        let gap = half / (cu * cu * (1.0 + x.abs()));
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / (cu * cu);
        if gap <= 0.0 {
            return 0.0;
        }
        let xx = if x < 0.0 { a + gap } else { b - gap };
        let v = f(xx, gap);
        if v.is_finite() {
            w * v
        } else {
            0.0
        }
    };
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h0 <= tmax {
        let t = k as f64 * h0;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h0 * half;
    let mut h = h0;
    let mut error = f64::INFINITY;
    for _ in 0..9 {
        h *= 0.5;
        let mut add = 0.0;
        let mut t = h;
        while t <= tmax {
            add += eval(t) + eval(-t);
            t += 2.0 * h;
        }
        sum += add;
        let next = sum * h * half;
        error = (next - estimate).abs();
        estimate = next;
        if error <= tol * estimate.abs().max(1e-300) {
            return Integral { value: estimate, error, converged: true };
        }
    }
    Integral { value: estimate, error, converged: false }
}

/// Adaptive composite Gauss–Legendre on `[a, b]` by bisection, comparing a
/// panel against its two halves.
pub fn adaptive_gauss<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, f: F) -> Integral {
    adaptive_gauss_floor(a, b, tol, 0.0, f)
}

const MAX_PANELS: usize = 1 << 14;

/// [`adaptive_gauss`] that also accepts an absolute error of `floor`, for
/// integrands known only to an absolute accuracy.
pub fn adaptive_gauss_floor<F: FnMut(f64) -> f64>(a: f64, b: f64, tol: f64, floor: f64, mut f: F) -> Integral {
    let rule = GaussLegendre::sixteen();
    let whole = rule.integrate(a, b, &mut f);
    let mut stack = vec![(a, b, whole, 0u32)];
    let mut value = 0.0;
    let mut error = 0.0;
    let mut converged = true;
    let mut panels = 0;
    let scale = whole.abs().max(1e-300);
    while let Some((lo, hi, coarse, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = rule.integrate(lo, mid, &mut f);
        let right = rule.integrate(mid, hi, &mut f);
        panels += 1;
        let fine = left + right;
        let diff = (fine - coarse).abs();
        let width_share = (hi - lo) / (b - a);
        let allowed = (tol * scale.max(fine.abs())).max(floor) * width_share.max(1e-3);
        let exhausted = depth >= 30 || panels >= MAX_PANELS;
        if diff <= allowed || exhausted {
            if exhausted && diff > allowed {
                converged = false;
            }
            value += fine;
            error += diff;
        } else {
            stack.push((lo, mid, left, depth + 1));
            stack.push((mid, hi, right, depth + 1));
        }
    }
    Integral { value, error, converged }
}

/// Wynn's epsilon algorithm applied to a sequence of partial sums; returns
/// the latest extrapolated limit.
pub fn wynn_epsilon(partial_sums: &[f64]) -> f64 {
    let n = partial_sums.len();
    if n < 3 {
        return *partial_sums.last().unwrap_or(&0.0);
    }
    let mut prev = vec![0.0; n + 1];
    let mut cur: Vec<f64> = partial_sums.to_vec();
    let mut best = cur[n - 1];
    let mut col = 0;
    while cur.len() > 1 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        for i in 0..cur.len() - 1 {
            let d = cur[i + 1] - cur[i];
            let base = prev[i + 1];
            next.push(if d.abs() < 1e-300 { f64::INFINITY } else { base + 1.0 / d });
        }
        prev = cur;
        cur = next;
        col += 1;
        if col % 2 == 0 {
            if let Some(v) = cur.last() {
                if v.is_finite() {
                    best = *v;
                }
            }
        }
        if cur.iter().any(|v| !v.is_finite()) {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15) + 3.0 * x * x);
        assert!((v - (2f64.powi(16) / 16.0 + 8.0)).abs() < 1e-9);
        let s: f64 = rule.weights.iter().sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let r = tanh_sinh(0.0, 1.0, 1e-12, |x, _| 1.0 / x.sqrt());
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
        let r = tanh_sinh(0.0, 1.0, 1e-12, |x, _| x.ln());
        assert!((r.value + 1.0).abs() < 1e-11, "{r:?}");
        // Right endpoint singularity through the gap argument.
        let r = tanh_sinh(0.0, 1.0, 1e-12, |x, gap| if x > 0.5 { gap.powf(-0.5) } else { (1.0 - x).powf(-0.5) });
        assert!((r.value - 2.0).abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn adaptive_gauss_oscillatory() {
        let r = adaptive_gauss(0.0, 20.0, 1e-12, |x| (3.0 * x).sin() * (-x).exp());
        let exact = 3.0 / 10.0 * (1.0 - (-20.0f64).exp() * ((60.0f64).cos() + (60.0f64).sin() / 3.0));
        assert!((r.value - exact).abs() < 1e-11, "{} vs {exact}", r.value);
    }

    #[test]
    fn wynn_accelerates_alternating_series() {
        // log 2 = 1 - 1/2 + 1/3 - ...
        let mut s = 0.0;
        let sums: Vec<f64> = (1..=15)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 } else { -1.0 } / k as f64;
                s
            })
            .collect();
        assert!((wynn_epsilon(&sums) - std::f64::consts::LN_2).abs() < 1e-9);
    }
}
