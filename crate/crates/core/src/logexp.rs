//! Exponential and logarithm functions on time scales.
//!
//! The logarithm of a nonvanishing `p` integrates a cylinder transform of the
//! logarithmic derivative `p^Delta / p` over the window. On dense pieces the
//! integrand is `p'/p` and quadrature produces the analytically continued
//! value (winding included); at a scattered point `tau` the contribution is
//! `mu * xi_mu(p^Delta/p) = Log(p(sigma) / p(tau))` with the principal branch.
//! Multi-valued variants return that same representative together with the
//! `2*pi*i` lattice, since `mu * (2*pi*i / mu) * Z = 2*pi*i * Z`.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicBool, Ordering};

use serde::{Deserialize, Serialize};

use crate::calculus::{self, PointFn, ScaleFunction, ScalePoint, ToleranceConfig};
use crate::cylinder::{self, CylinderKind};
use crate::error::{Error, Result};
use crate::exec;
use crate::multivalue::{self, Complex, ComplexJson, MultiLog, TWO_PI_I};
use crate::timescale::{Segment, TimeScale};

/// The logarithms predating the cylinder-based definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LegacyKind {
    /// `int 2 / (tau + sigma(tau))`
    Huff,
    /// `int 1 / (tau + 2 mu(tau))`
    EulerCauchy,
    /// `int p^Delta / p`
    IntegralQuotient,
    /// `p^Delta(t) / p(t)`, pointwise
    Jackson,
    /// `int_1^t 1 / tau`
    Mozyrska,
}

impl LegacyKind {
    pub const ALL: [LegacyKind; 5] = [
        LegacyKind::Huff,
        LegacyKind::EulerCauchy,
        LegacyKind::IntegralQuotient,
        LegacyKind::Jackson,
        LegacyKind::Mozyrska,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LegacyKind::Huff => "huff",
            LegacyKind::EulerCauchy => "euler-cauchy",
            LegacyKind::IntegralQuotient => "integral-quotient",
            LegacyKind::Jackson => "jackson",
            LegacyKind::Mozyrska => "mozyrska",
        }
    }

    pub fn needs_function(self) -> bool {
        matches!(self, LegacyKind::IntegralQuotient | LegacyKind::Jackson)
    }
}

impl FromStr for LegacyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LegacyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown legacy logarithm `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LogVariant {
    DeltaMulti,
    DeltaPrincipal,
    NablaMulti,
    NablaPrincipal,
    CayleyMulti,
    CayleyPrincipal,
    /// The weighted family; multi-valued.
    Eta(f64),
    Legacy(LegacyKind),
}

impl LogVariant {
    pub fn is_multi(self) -> bool {
        matches!(
            self,
            LogVariant::DeltaMulti | LogVariant::NablaMulti | LogVariant::CayleyMulti | LogVariant::Eta(_)
        )
    }
}

impl fmt::Display for LogVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LogVariant::DeltaMulti => write!(f, "delta-multi"),
            LogVariant::DeltaPrincipal => write!(f, "delta-principal"),
            LogVariant::NablaMulti => write!(f, "nabla-multi"),
            LogVariant::NablaPrincipal => write!(f, "nabla-principal"),
            LogVariant::CayleyMulti => write!(f, "cayley-multi"),
            LogVariant::CayleyPrincipal => write!(f, "cayley-principal"),
            LogVariant::Eta(eta) => write!(f, "eta:{eta}"),
            LogVariant::Legacy(kind) => write!(f, "legacy:{}", kind.name()),
        }
    }
}

impl FromStr for LogVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "delta-multi" => LogVariant::DeltaMulti,
            "delta-principal" => LogVariant::DeltaPrincipal,
            "nabla-multi" => LogVariant::NablaMulti,
            "nabla-principal" => LogVariant::NablaPrincipal,
            "cayley-multi" => LogVariant::CayleyMulti,
            "cayley-principal" => LogVariant::CayleyPrincipal,
            _ => {
                if let Some(kind) = s.strip_prefix("legacy:") {
                    LogVariant::Legacy(kind.parse()?)
                } else if let Some(v) = s.strip_prefix("eta:") {
                    let eta: f64 = v
                        .parse()
                        .map_err(|_| Error::InvalidConfig(format!("bad eta in `{s}`")))?;
                    if !(0.0..=1.0).contains(&eta) {
                        return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {eta}")));
                    }
                    LogVariant::Eta(eta)
                } else {
                    return Err(Error::InvalidConfig(format!("unknown log variant `{s}`")));
                }
            }
        })
    }
}

/// Result of [`log_ts`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub variant: LogVariant,
    /// Principal value, or the representative of a multi-valued result.
    pub value: Complex,
    pub multivalued: bool,
    /// Whether any scattered point of the window contributed a term.
    pub scattered_contributed: bool,
}

impl LogValue {
    pub fn multi(&self) -> Option<MultiLog> {
        self.multivalued.then(|| MultiLog::new(self.value))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Family {
    Delta,
    Nabla,
    Cayley,
    Eta(f64),
}

fn family(variant: LogVariant) -> Option<Family> {
    match variant {
        LogVariant::DeltaMulti | LogVariant::DeltaPrincipal => Some(Family::Delta),
        LogVariant::NablaMulti | LogVariant::NablaPrincipal => Some(Family::Nabla),
        LogVariant::CayleyMulti | LogVariant::CayleyPrincipal => Some(Family::Cayley),
        LogVariant::Eta(eta) => Some(Family::Eta(eta)),
        LogVariant::Legacy(_) => None,
    }
}

/// Integrand of the logarithm for a cylinder family, evaluated at a scale
/// point seen from the delta side (`Delta`, `Cayley`, `Eta`) or the nabla side.
fn log_integrand(fam: Family, p: &ScaleFunction, pt: &ScalePoint, eps: f64) -> Result<Complex> {
    let pv = p.nonvanishing(pt.t, eps)?;
    if !pt.is_scattered() {
        return Ok(p.derivative_at(pt.t)? / pv);
    }
    let h = pt.gap;
    let other = p.nonvanishing(pt.neighbor, eps)?;
    let out = match fam {
        Family::Delta => {
            let d = (other - pv) / h;
            cylinder::xi(h, d / pv)
        }
        Family::Nabla => {
            // pt.t is left-scattered and other = p(rho(t))
            let d = (pv - other) / h;
            cylinder::xi_hat(h, d / pv)
        }
        Family::Cayley => {
            let sum = pv + other;
            if sum.norm() < eps * (pv.norm() + other.norm()) {
                return Err(Error::CayleyNotRegressive {
                    h,
                    z: Complex::new(f64::INFINITY, 0.0),
                    at: Some(pt.t),
                });
            }
            let d = (other - pv) / h;
            cylinder::cayley_psi(h, d * 2.0 / sum)
        }
        Family::Eta(eta) => {
            let den = pv * (1.0 - eta) + other * eta;
            if den.norm() < eps * (pv.norm() + other.norm()) {
                return Err(Error::EtaNotRegressive {
                    eta,
                    h,
                    z: Complex::new(f64::INFINITY, 0.0),
                    at: Some(pt.t),
                });
            }
            let d = (other - pv) / h;
            cylinder::eta_psi(eta, h, d / den)
        }
    };
    out.map_err(|e| e.at_point(pt.t))
}

/// Logarithm of `p` over the window from `s` to `t`.
///
/// Legacy variants use `s` as their base point `t0` (Mozyrska's always
/// uses 1).
pub fn log_ts(
    variant: LogVariant,
    p: &ScaleFunction,
    ts: &TimeScale,
    s: f64,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<LogValue> {
    let Some(fam) = family(variant) else {
        let LogVariant::Legacy(kind) = variant else { unreachable!() };
        let value = legacy_log(kind, Some(p), ts, s, t, cfg)?;
        return Ok(LogValue {
            variant,
            value,
            multivalued: false,
            scattered_contributed: window_has_jumps(ts, s, t)?,
        });
    };
    let scattered = AtomicBool::new(false);
    let integrand = |pt: &ScalePoint| {
        if pt.is_scattered() {
            scattered.store(true, Ordering::Relaxed);
        }
        log_integrand(fam, p, pt, cfg.eps_min)
    };
    let value = match fam {
        Family::Nabla => calculus::nabla_integral(&integrand, ts, s, t, cfg)?,
        _ => calculus::delta_integral(&integrand, ts, s, t, cfg)?,
    };
    Ok(LogValue {
        variant,
        value,
        multivalued: variant.is_multi(),
        scattered_contributed: scattered.load(Ordering::Relaxed),
    })
}

fn window_has_jumps(ts: &TimeScale, s: f64, t: f64) -> Result<bool> {
    Ok(ts.decompose(s.min(t), s.max(t))?.has_jumps())
}

/// `ell_p(t, s)`.
pub fn ell(p: &ScaleFunction, ts: &TimeScale, s: f64, t: f64, cfg: &ToleranceConfig) -> Result<MultiLog> {
    Ok(MultiLog::new(log_ts(LogVariant::DeltaMulti, p, ts, s, t, cfg)?.value))
}

/// `L_p(t, s)`.
pub fn principal_ell(p: &ScaleFunction, ts: &TimeScale, s: f64, t: f64, cfg: &ToleranceConfig) -> Result<Complex> {
    Ok(log_ts(LogVariant::DeltaPrincipal, p, ts, s, t, cfg)?.value)
}

/// Exponential built from any cylinder family:
/// `exp(int_s^t T_gap(coef(tau)))`, with a nabla integral for [`CylinderKind::Nabla`].
pub fn exp_ts<C: PointFn + ?Sized>(
    kind: CylinderKind,
    coef: &C,
    ts: &TimeScale,
    s: f64,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<Complex> {
    let integrand = |pt: &ScalePoint| {
        let z = coef.at(pt)?;
        kind.apply(pt.gap, z).map_err(|e| e.at_point(pt.t))
    };
    let exponent = if kind.is_nabla() {
        calculus::nabla_integral(&integrand, ts, s, t, cfg)?
    } else {
        calculus::delta_integral(&integrand, ts, s, t, cfg)?
    };
    multivalue::exp(exponent)
}

/// `e_p(t, s)`.
pub fn exp_delta<C: PointFn + ?Sized>(coef: &C, ts: &TimeScale, s: f64, t: f64, cfg: &ToleranceConfig) -> Result<Complex> {
    exp_ts(CylinderKind::Delta, coef, ts, s, t, cfg)
}

/// Nabla exponential `e^_p(t, s)`.
pub fn exp_nabla<C: PointFn + ?Sized>(coef: &C, ts: &TimeScale, s: f64, t: f64, cfg: &ToleranceConfig) -> Result<Complex> {
    exp_ts(CylinderKind::Nabla, coef, ts, s, t, cfg)
}

/// Cayley exponential `E_p(t, s)`.
pub fn exp_cayley<C: PointFn + ?Sized>(coef: &C, ts: &TimeScale, s: f64, t: f64, cfg: &ToleranceConfig) -> Result<Complex> {
    exp_ts(CylinderKind::Cayley, coef, ts, s, t, cfg)
}

/// Delta derivative of `L_p(., s)` at `t`: `Log(p(sigma)/p(t)) / mu` at
/// right-scattered points, `p'/p` at right-dense ones.
pub fn log_delta_derivative(p: &ScaleFunction, ts: &TimeScale, t: f64, cfg: &ToleranceConfig) -> Result<Complex> {
    let n = ts.locate_delta(t)?;
    let pv = p.nonvanishing(n.t, cfg.eps_min)?;
    if n.right_scattered() {
        let ps = p.nonvanishing(n.sigma, cfg.eps_min)?;
        Ok(multivalue::principal_log(ps / pv)? / n.mu())
    } else {
        Ok(p.derivative_at(n.t)? / pv)
    }
}

/// The logarithmic derivative `p^Delta / p` as a coefficient function.
pub fn log_derivative_coefficient<'a>(p: &'a ScaleFunction, eps: f64) -> impl Fn(&ScalePoint) -> Result<Complex> + Sync + 'a {
    move |pt: &ScalePoint| {
        let pv = p.nonvanishing(pt.t, eps)?;
        if pt.is_scattered() {
            let ps = p.nonvanishing(pt.neighbor, eps)?;
            Ok((ps - pv) / pt.gap / pv)
        } else {
            Ok(p.derivative_at(pt.t)? / pv)
        }
    }
}

/// Legacy logarithms, kept for comparison.
pub fn legacy_log(
    kind: LegacyKind,
    p: Option<&ScaleFunction>,
    ts: &TimeScale,
    t0: f64,
    t: f64,
    cfg: &ToleranceConfig,
) -> Result<Complex> {
    let need_p = || {
        p.ok_or_else(|| Error::InvalidConfig(format!("the {} logarithm needs a function p", kind.name())))
    };
    match kind {
        LegacyKind::Huff => {
            let f = |pt: &ScalePoint| Ok(Complex::new(2.0 / (pt.t + pt.neighbor), 0.0));
            calculus::delta_integral(&f, ts, t0, t, cfg)
        }
        LegacyKind::EulerCauchy => {
            let f = |pt: &ScalePoint| Ok(Complex::new(1.0 / (pt.t + 2.0 * pt.gap), 0.0));
            calculus::delta_integral(&f, ts, t0, t, cfg)
        }
        LegacyKind::IntegralQuotient => {
            let f = log_derivative_coefficient(need_p()?, cfg.eps_min);
            calculus::delta_integral(&f, ts, t0, t, cfg)
        }
        LegacyKind::Jackson => {
            let p = need_p()?;
            let pv = p.nonvanishing(ts.locate(t)?.t, cfg.eps_min)?;
            Ok(calculus::delta_derivative(p, ts, t)? / pv)
        }
        LegacyKind::Mozyrska => {
            if !ts.contains(1.0) {
                return Err(Error::OneNotInScale);
            }
            let f = |pt: &ScalePoint| Ok(Complex::new(1.0 / pt.t, 0.0));
            calculus::delta_integral(&f, ts, 1.0, t, cfg)
        }
    }
}

/// One line of an identity report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub identity: String,
    pub lhs: ComplexJson,
    pub rhs: ComplexJson,
    pub residual: f64,
    pub lattice_k: i64,
    pub pass: bool,
}

impl IdentityRow {
    /// Compare modulo `2*pi*i`.
    pub fn modular(name: impl Into<String>, lhs: Complex, rhs: Complex, tol: f64) -> Self {
        let (residual, k) = multivalue::lattice_residual(lhs, rhs, TWO_PI_I);
        IdentityRow {
            identity: name.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            residual,
            lattice_k: k,
            pass: residual <= tol,
        }
    }

    /// Compare as plain complex numbers.
    pub fn exact(name: impl Into<String>, lhs: Complex, rhs: Complex, tol: f64) -> Self {
        let residual = (lhs - rhs).norm();
        IdentityRow {
            identity: name.into(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            residual,
            lattice_k: 0,
            pass: residual <= tol,
        }
    }
}

/// Weights checked by the weighted-cylinder rows of [`identity_suite`].
pub const ETA_SWEEP: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// True when `p` is real and strictly positive at every scattered point of
/// the window and on a sample of each dense piece.
pub fn is_positive_real_on(p: &ScaleFunction, ts: &TimeScale, s: f64, t: f64) -> Result<bool> {
    let positive = |x: f64| -> Result<bool> {
        let v = p.value(x)?;
        Ok(v.re > 0.0 && v.im.abs() <= 1e-15 * v.re)
    };
    let (lo, hi) = (s.min(t), s.max(t));
    if !positive(ts.locate(lo)?.t)? {
        return Ok(false);
    }
    for seg in ts.decompose(lo, hi)?.segments() {
        match *seg {
            Segment::Jump { next, .. } => {
                if !positive(next)? {
                    return Ok(false);
                }
            }
            Segment::Continuous { a, b } => {
                for j in 0..=64 {
                    if !positive(a + (b - a) * j as f64 / 64.0)? {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

type RowJob<'a> = Box<dyn Fn() -> Result<Option<IdentityRow>> + Send + Sync + 'a>;

/// Evaluate both sides of the logarithm identities for `p`, `q` on a window.
///
/// Rows are sorted by identity name. The power row compares principal values
/// exactly when `p` is positive and real on the window, compares modulo
/// `2*pi*i` when `alpha` is an integer, and is omitted otherwise.
pub fn identity_suite(
    p: &ScaleFunction,
    q: &ScaleFunction,
    ts: &TimeScale,
    s: f64,
    t: f64,
    alpha: f64,
    cfg: &ToleranceConfig,
) -> Result<Vec<IdentityRow>> {
    cfg.validate()?;
    let tol = cfg.cmp_tol;
    let ell = |f: &ScaleFunction| log_ts(LogVariant::DeltaMulti, f, ts, s, t, cfg).map(|v| v.value);
    let big_l = |f: &ScaleFunction| log_ts(LogVariant::DeltaPrincipal, f, ts, s, t, cfg).map(|v| v.value);

    let mut jobs: Vec<RowJob> = vec![
        Box::new(move || {
            let lhs = multivalue::exp(big_l(p)?)?;
            let coef = log_derivative_coefficient(p, cfg.eps_min);
            let rhs = exp_delta(&coef, ts, s, t, cfg)?;
            Ok(Some(IdentityRow::exact("exp_log", lhs, rhs, tol)))
        }),
        Box::new(move || {
            let lhs = ell(&p.product(q))?;
            Ok(Some(IdentityRow::modular("product", lhs, ell(p)? + ell(q)?, tol)))
        }),
        Box::new(move || {
            let lhs = ell(&p.quotient(q))?;
            Ok(Some(IdentityRow::modular("quotient", lhs, ell(p)? - ell(q)?, tol)))
        }),
        Box::new(move || {
            let lhs = ell(&p.power(alpha))?;
            let rhs = ell(p)? * alpha;
            if is_positive_real_on(p, ts, s, t)? {
                Ok(Some(IdentityRow::exact("power", lhs, rhs, tol)))
            } else if alpha.fract() == 0.0 {
                Ok(Some(IdentityRow::modular("power", lhs, rhs, tol)))
            } else {
                Ok(None)
            }
        }),
        Box::new(move || {
            let lhs = log_ts(LogVariant::CayleyPrincipal, p, ts, s, t, cfg)?.value;
            Ok(Some(IdentityRow::exact("cayley_principal", lhs, big_l(p)?, tol)))
        }),
        Box::new(move || {
            let lhs = log_ts(LogVariant::CayleyMulti, p, ts, s, t, cfg)?.value;
            Ok(Some(IdentityRow::modular("cayley_multi", lhs, ell(p)?, tol)))
        }),
        Box::new(move || {
            let ratio = p.nonvanishing(ts.locate(t)?.t, cfg.eps_min)? / p.nonvanishing(ts.locate(s)?.t, cfg.eps_min)?;
            let rhs = multivalue::principal_log(ratio)?;
            Ok(Some(IdentityRow::modular("closed_form", ell(p)?, rhs, tol)))
        }),
    ];
    for eta in ETA_SWEEP {
        jobs.push(Box::new(move || {
            let lhs = log_ts(LogVariant::Eta(eta), p, ts, s, t, cfg)?.value;
            Ok(Some(IdentityRow::modular(format!("eta:{eta}"), lhs, ell(p)?, tol)))
        }));
    }

    let results = exec::map_coarse(cfg.execution, &jobs, |job| job());
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        if let Some(row) = r? {
            rows.push(row);
        }
    }
    rows.sort_by(|a, b| a.identity.cmp(&b.identity));
    Ok(rows)
}
