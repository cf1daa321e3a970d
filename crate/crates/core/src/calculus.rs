//! Delta and nabla derivatives, and definite delta/nabla integrals.
//!
//! Integrals walk the [`SegmentDecomposition`] of the window: dense pieces go
//! through adaptive Simpson quadrature, scattered points contribute
//! `gap * f(point)`. Per-segment results are reduced left to right, so the
//! value is the same whichever [`Execution`] mode computed the terms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::expr::Expr;
use crate::multivalue::Complex;
use crate::timescale::{Segment, TimeScale};

/// Numerical tolerances shared by integration and comparison routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Absolute tolerance of adaptive quadrature on each dense piece.
    pub quad_tol: f64,
    /// Function values with smaller modulus count as zero.
    pub eps_min: f64,
    /// Tolerance for comparisons modulo `2*pi*i`.
    pub cmp_tol: f64,
    pub max_quad_depth: u32,
    #[serde(skip)]
    pub execution: Execution,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        ToleranceConfig {
            quad_tol: 1e-10,
            eps_min: 1e-10,
            cmp_tol: 1e-8,
            max_quad_depth: 40,
            execution: Execution::default(),
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let pos = |x: f64| x.is_finite() && x > 0.0;
        if !pos(self.quad_tol) || !pos(self.eps_min) || !pos(self.cmp_tol) {
            return Err(Error::InvalidConfig("tolerances must be positive and finite".into()));
        }
        if self.max_quad_depth < 10 {
            return Err(Error::InvalidConfig("max_quad_depth must be at least 10".into()));
        }
        Ok(())
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// A point of the time scale as seen by an integrand.
///
/// For delta integrals `gap = mu(t)` and `neighbor = sigma(t)`; for nabla
/// integrals `gap = nu(t)` and `neighbor = rho(t)`. At dense points
/// `gap = 0` and `neighbor = t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalePoint {
    pub t: f64,
    pub gap: f64,
    pub neighbor: f64,
}

impl ScalePoint {
    pub fn dense(t: f64) -> Self {
        ScalePoint {
            t,
            gap: 0.0,
            neighbor: t,
        }
    }

    pub fn is_scattered(&self) -> bool {
        self.gap > 0.0
    }
}

/// Something that can be evaluated at points of a time scale.
pub trait PointFn: Sync {
    fn at(&self, pt: &ScalePoint) -> Result<Complex>;
}

impl<F> PointFn for F
where
    F: Fn(&ScalePoint) -> Result<Complex> + Sync,
{
    fn at(&self, pt: &ScalePoint) -> Result<Complex> {
        self(pt)
    }
}

/// A complex-valued function of `t` together with its symbolic derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFunction {
    body: Expr,
    derivative: Expr,
    label: String,
}

impl ScaleFunction {
    pub fn new(body: Expr) -> Self {
        let label = body.to_string();
        Self::with_label(body, label)
    }

    pub fn with_label(body: Expr, label: impl Into<String>) -> Self {
        let derivative = body.differentiate();
        ScaleFunction {
            body,
            derivative,
            label: label.into(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(Self::with_label(Expr::parse(text)?, text.trim()))
    }

    pub fn body(&self) -> &Expr {
        &self.body
    }

    pub fn derivative(&self) -> &Expr {
        &self.derivative
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64) -> Result<Complex> {
        self.body.eval_real(t)
    }

    /// Classical derivative, used at right-dense (or left-dense) points.
    pub fn derivative_at(&self, t: f64) -> Result<Complex> {
        self.derivative.eval_real(t)
    }

    /// Value at `t`, failing when its modulus is below `eps_min`.
    pub fn nonvanishing(&self, t: f64, eps_min: f64) -> Result<Complex> {
        let v = self.value(t)?;
        let modulus = v.norm();
        if modulus < eps_min {
            return Err(Error::NonvanishingViolation { t, modulus });
        }
        Ok(v)
    }

    pub fn product(&self, other: &ScaleFunction) -> ScaleFunction {
        ScaleFunction::with_label(
            Expr::Mul(Box::new(self.body.clone()), Box::new(other.body.clone())),
            format!("({})*({})", self.label, other.label),
        )
    }

    pub fn quotient(&self, other: &ScaleFunction) -> ScaleFunction {
        ScaleFunction::with_label(
            Expr::Div(Box::new(self.body.clone()), Box::new(other.body.clone())),
            format!("({})/({})", self.label, other.label),
        )
    }

    pub fn power(&self, alpha: f64) -> ScaleFunction {
        ScaleFunction::with_label(
            Expr::Pow(Box::new(self.body.clone()), alpha),
            format!("({})^({alpha})", self.label),
        )
    }
}

impl PointFn for ScaleFunction {
    fn at(&self, pt: &ScalePoint) -> Result<Complex> {
        self.value(pt.t)
    }
}

/// `p^Delta(t)`: forward difference quotient at right-scattered points,
/// symbolic derivative at right-dense ones.
pub fn delta_derivative(p: &ScaleFunction, ts: &TimeScale, t: f64) -> Result<Complex> {
    let n = ts.locate_delta(t)?;
    if n.right_scattered() {
        Ok((p.value(n.sigma)? - p.value(n.t)?) / n.mu())
    } else {
        p.derivative_at(n.t)
    }
}

/// `p^Nabla(t)`: backward difference quotient at left-scattered points.
pub fn nabla_derivative(p: &ScaleFunction, ts: &TimeScale, t: f64) -> Result<Complex> {
    let n = ts.locate_nabla(t)?;
    if n.left_scattered() {
        Ok((p.value(n.t)? - p.value(n.rho)?) / n.nu())
    } else {
        p.derivative_at(n.t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Delta,
    Nabla,
}

/// `int_s^t f(tau) Delta tau`.
pub fn delta_integral<F: PointFn + ?Sized>(
    f: &F,
    ts: &TimeScale,
    s: f64,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<Complex> {
    integral(f, ts, s, t, cfg, Direction::Delta)
}

/// `int_s^t f(tau) Nabla tau`: scattered contributions come from the
/// left-scattered points of `(s, t]`.
pub fn nabla_integral<F: PointFn + ?Sized>(
    f: &F,
    ts: &TimeScale,
    s: f64,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<Complex> {
    integral(f, ts, s, t, cfg, Direction::Nabla)
}

fn integral<F: PointFn + ?Sized>(
    f: &F,
    ts: &TimeScale,
    s: f64,
    t: f64,
    cfg: &ToleranceConfig,
    dir: Direction,
) -> Result<Complex> {
    cfg.validate()?;
    if s > t {
        return Ok(-integral(f, ts, t, s, cfg, dir)?);
    }
    let segments = ts.decompose(s, t)?.into_segments();
    let terms = exec::map(cfg.execution, &segments, |seg| segment_term(f, seg, cfg, dir));
    let mut acc = Complex::new(0.0, 0.0);
    for term in terms {
        acc += term?;
    }
    Ok(acc)
}

fn segment_term<F: PointFn + ?Sized>(
    f: &F,
    seg: &Segment,
    cfg: &ToleranceConfig,
    dir: Direction,
) -> Result<Complex> {
    match *seg {
        Segment::Continuous { a, b } => adaptive_simpson(&|x| f.at(&ScalePoint::dense(x)), a, b, cfg),
        Segment::Jump { tau, mu, next } => {
            let pt = match dir {
                Direction::Delta => ScalePoint {
                    t: tau,
                    gap: mu,
                    neighbor: next,
                },
                Direction::Nabla => ScalePoint {
                    t: next,
                    gap: mu,
                    neighbor: tau,
                },
            };
            let v = f.at(&pt)?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::NonFiniteIntegrand { t: pt.t });
            }
            Ok(v * mu)
        }
    }
}

/// Number of panels a dense piece is split into before adaptive refinement.
const PANELS: usize = 8;

/// Adaptive Simpson quadrature of a complex integrand on `[a, b]` with
/// absolute tolerance `cfg.quad_tol`.
pub fn adaptive_simpson<G>(g: &G, a: f64, b: f64, cfg: &ToleranceConfig) -> Result<Complex>
where
    G: Fn(f64) -> Result<Complex> + Sync,
{
    if a == b {
        return Ok(Complex::new(0.0, 0.0));
    }
    let eval = |x: f64| -> Result<Complex> {
        let v = g(x)?;
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFiniteIntegrand { t: x })
        }
    };
    let width = (b - a) / PANELS as f64;
    let edges: Vec<(f64, f64)> = (0..PANELS)
        .map(|i| {
            let lo = a + i as f64 * width;
            let hi = if i + 1 == PANELS { b } else { a + (i + 1) as f64 * width };
            (lo, hi)
        })
        .collect();
    let tol = cfg.quad_tol / PANELS as f64;
    let parts = exec::map_coarse(cfg.execution, &edges, |&(lo, hi)| {
        let mid = 0.5 * (lo + hi);
        let (flo, fmid, fhi) = (eval(lo)?, eval(mid)?, eval(hi)?);
        let whole = (flo + fmid * 4.0 + fhi) * ((hi - lo) / 6.0);
        refine(&eval, lo, flo, mid, fmid, hi, fhi, whole, tol, 0, cfg.max_quad_depth)
    });
    let mut acc = Complex::new(0.0, 0.0);
    for p in parts {
        acc += p?;
    }
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn refine<G>(
    g: &G,
    a: f64,
    fa: Complex,
    m: f64,
    fm: Complex,
    b: f64,
    fb: Complex,
    whole: Complex,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<Complex>
where
    G: Fn(f64) -> Result<Complex>,
{
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let (flm, frm) = (g(lm)?, g(rm)?);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let delta = left + right - whole;
    let roundoff = 32.0 * f64::EPSILON * (left.norm() + right.norm());
    if delta.norm() <= 15.0 * tol || delta.norm() <= roundoff {
        return Ok(left + right + delta / 15.0);
    }
    if depth >= max_depth || !(lm > a && rm < b) {
        return Err(Error::QuadratureFailure { a, b });
    }
    let l = refine(g, a, fa, lm, flm, m, fm, left, tol / 2.0, depth + 1, max_depth)?;
    let r = refine(g, m, fm, rm, frm, b, fb, right, tol / 2.0, depth + 1, max_depth)?;
    Ok(l + r)
}
