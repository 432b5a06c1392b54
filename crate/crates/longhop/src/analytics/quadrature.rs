//! Numerical integration used by the random-position analytics: adaptive
//! composite Simpson (default) and Gauss-Legendre with panel doubling.

use std::sync::Arc;

use super::AnalyticsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadMethod {
    CompositeSimpson,
    GaussLegendre,
}

/// How an integral is evaluated and when to give up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub abs_tolerance: f64,
    pub max_subdivisions: u32,
}

impl Default for QuadratureSpec {
    /// Adaptive composite Simpson, absolute tolerance 1e-10, at most 20
    /// subdivision levels. The integrands here (polynomial decision
    /// functions times smooth densities) are smooth, so Simpson converges
    /// fast.
    fn default() -> Self {
        Self {
            method: QuadMethod::CompositeSimpson,
            abs_tolerance: 1e-10,
            max_subdivisions: 20,
        }
    }
}

impl QuadratureSpec {
    pub fn new(
        method: QuadMethod,
        abs_tolerance: f64,
        max_subdivisions: u32,
    ) -> Result<Self, AnalyticsError> {
        if !(abs_tolerance.is_finite() && abs_tolerance > 0.0) {
            return Err(AnalyticsError::InvalidTolerance(abs_tolerance));
        }
        if max_subdivisions == 0 {
            return Err(AnalyticsError::InvalidSubdivisions);
        }
        Ok(Self {
            method,
            abs_tolerance,
            max_subdivisions,
        })
    }

    /// ∫_a^b f(x) dx to the configured absolute tolerance.
    pub fn integrate<F: Fn(f64) -> f64>(
        &self,
        f: F,
        a: f64,
        b: f64,
    ) -> Result<f64, AnalyticsError> {
        if a == b {
            return Ok(0.0);
        }
        match self.method {
            QuadMethod::CompositeSimpson => {
                adaptive_simpson(&f, a, b, self.abs_tolerance, self.max_subdivisions)
            }
            QuadMethod::GaussLegendre => {
                gauss_legendre_doubling(&f, a, b, self.abs_tolerance, self.max_subdivisions)
            }
        }
    }
}

fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<f64, AnalyticsError> {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, max_depth)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, AnalyticsError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(fa, flm, fm, m - a);
    let right = simpson(fm, frm, fb, b - m);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        // Richardson extrapolation knocks out the leading error term.
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(AnalyticsError::QuadratureDidNotConverge);
    }
    let l = simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?;
    let r = simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?;
    Ok(l + r)
}

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1],
/// computed by Newton iteration on the Legendre polynomial.
pub fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi initial guess for the i-th root.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

const GL_POINTS: usize = 16;

fn gauss_legendre_doubling<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_doublings: u32,
) -> Result<f64, AnalyticsError> {
    let rule = gauss_legendre_nodes(GL_POINTS);
    let eval_panels = |panels: usize| -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mid = lo + 0.5 * h;
            let half = 0.5 * h;
            let mut s = 0.0;
            for &(x, w) in &rule {
                s += w * f(mid + half * x);
            }
            total += half * s;
        }
        total
    };
    let mut panels = 1usize;
    let mut prev = eval_panels(panels);
    for _ in 0..max_doublings {
        panels *= 2;
        let next = eval_panels(panels);
        if (next - prev).abs() <= tol {
            return Ok(next);
        }
        prev = next;
    }
    Err(AnalyticsError::QuadratureDidNotConverge)
}

type DensityFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A node-position density on `[0, line_length]`. Random-position analytics
/// integrate against it; it must integrate to 1 (checked by the operations
/// that consume it).
#[derive(Clone)]
pub struct Density {
    line_length: f64,
    f: DensityFn,
    label: String,
}

impl Density {
    /// The uniform density 1/L on [0, L].
    pub fn uniform(line_length: f64) -> Self {
        let inv = 1.0 / line_length;
        Self {
            line_length,
            f: Arc::new(move |_| inv),
            label: format!("uniform[0,{line_length}]"),
        }
    }

    /// An arbitrary nonnegative density on [0, line_length].
    pub fn new<F>(line_length: f64, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            line_length,
            f: Arc::new(f),
            label: label.into(),
        }
    }

    pub fn line_length(&self) -> f64 {
        self.line_length
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl std::fmt::Debug for Density {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Density({})", self.label)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_integrates_polynomials_exactly() {
        let spec = QuadratureSpec::default();
        let v = spec.integrate(|x| x * x * x, 0.0, 1.0).unwrap();
        assert!((v - 0.25).abs() < 1e-12);
        let v = spec.integrate(|x| 3.0 * x * x, -1.0, 2.0).unwrap();
        assert!((v - 9.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_handles_oscillatory_integrand() {
        let spec = QuadratureSpec::default();
        let v = spec.integrate(f64::sin, 0.0, std::f64::consts::PI).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn gauss_legendre_matches_simpson() {
        let gl = QuadratureSpec::new(QuadMethod::GaussLegendre, 1e-12, 20).unwrap();
        let v = gl.integrate(|x| x.exp(), 0.0, 1.0).unwrap();
        assert!((v - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn gauss_nodes_are_symmetric_and_normalized() {
        let rule = gauss_legendre_nodes(GL_POINTS);
        let weight_sum: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((weight_sum - 2.0).abs() < 1e-13);
        for (&(x1, _), &(x2, _)) in rule.iter().zip(rule.iter().rev()) {
            assert!((x1 + x2).abs() < 1e-13);
        }
    }

    #[test]
    fn singular_integrand_reports_non_convergence() {
        let spec = QuadratureSpec::new(QuadMethod::CompositeSimpson, 1e-12, 8).unwrap();
        let err = spec.integrate(|x| 1.0 / x.sqrt(), 1e-300, 1.0);
        assert!(matches!(err, Err(AnalyticsError::QuadratureDidNotConverge)));
    }

    #[test]
    fn spec_validation() {
        assert!(QuadratureSpec::new(QuadMethod::CompositeSimpson, 0.0, 5).is_err());
        assert!(QuadratureSpec::new(QuadMethod::CompositeSimpson, 1e-8, 0).is_err());
    }
}
