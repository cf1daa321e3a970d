//! Cylinder transformations and the circle operations on regressive values.
//!
//! Every transformation `T_h` reduces to the identity at `h = 0`. For
//! `h > 0` the principal versions use `Log`, and the multi-valued versions
//! return the principal value together with the period `2*pi*i / h`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::multivalue::{self, Complex, MultiLog, TWO_PI_I};

/// Relative guard for `1 + h*z ~ 0` style singularities.
pub const REGRESSIVE_GUARD: f64 = 1e-12;

fn vanishes(w: Complex, hz: Complex) -> bool {
    w.norm() < REGRESSIVE_GUARD * (1.0 + hz.norm())
}

fn check_h(h: f64) -> Result<()> {
    if h.is_finite() && h >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("graininess must be finite and nonnegative, got {h}")))
    }
}

/// Period of the multi-valued cylinders at graininess `h`.
pub fn period(h: f64) -> Complex {
    if h > 0.0 {
        TWO_PI_I / h
    } else {
        Complex::new(0.0, 0.0)
    }
}

pub fn is_regressive(h: f64, z: Complex) -> bool {
    !vanishes(1.0 + z * h, z * h)
}

pub fn is_nu_regressive(h: f64, z: Complex) -> bool {
    !vanishes(1.0 - z * h, z * h)
}

/// `h*z != +-2`.
pub fn is_cayley_regressive(h: f64, z: Complex) -> bool {
    let hz = z * h;
    !vanishes(1.0 + hz / 2.0, hz) && !vanishes(1.0 - hz / 2.0, hz)
}

pub fn is_eta_regressive(eta: f64, h: f64, z: Complex) -> bool {
    let hz = z * h;
    !vanishes(1.0 + hz * (1.0 - eta), hz) && !vanishes(1.0 - hz * eta, hz)
}

/// `xi_h(z) = Log(1 + z h) / h`, and `z` at `h = 0`.
pub fn xi(h: f64, z: Complex) -> Result<Complex> {
    check_h(h)?;
    if h == 0.0 {
        return Ok(z);
    }
    let w = 1.0 + z * h;
    if vanishes(w, z * h) {
        return Err(Error::NotRegressive { h, z, at: None });
    }
    let v = multivalue::principal_log(w)? / h;
    debug_assert!(v.im > -std::f64::consts::PI / h - 1e-9 && v.im <= std::f64::consts::PI / h + 1e-9);
    Ok(v)
}

/// Multi-valued `zeta_h(z) = log(1 + z h) / h`.
pub fn zeta(h: f64, z: Complex) -> Result<MultiLog> {
    Ok(MultiLog::with_period(xi(h, z)?, period(h)))
}

/// Nabla cylinder `-Log(1 - z h) / h`.
pub fn xi_hat(h: f64, z: Complex) -> Result<Complex> {
    check_h(h)?;
    if h == 0.0 {
        return Ok(z);
    }
    let w = 1.0 - z * h;
    if vanishes(w, z * h) {
        return Err(Error::NotNuRegressive { h, z, at: None });
    }
    Ok(-multivalue::principal_log(w)? / h)
}

pub fn zeta_hat(h: f64, z: Complex) -> Result<MultiLog> {
    Ok(MultiLog::with_period(xi_hat(h, z)?, period(h)))
}

/// Cayley cylinder `Log((1 + z h/2) / (1 - z h/2)) / h`.
pub fn cayley_psi(h: f64, z: Complex) -> Result<Complex> {
    check_h(h)?;
    if h == 0.0 {
        return Ok(z);
    }
    if !is_cayley_regressive(h, z) {
        return Err(Error::CayleyNotRegressive { h, z, at: None });
    }
    let hz = z * h;
    let ratio = (1.0 + hz / 2.0) / (1.0 - hz / 2.0);
    Ok(multivalue::principal_log(ratio)? / h)
}

pub fn cayley_psi_multi(h: f64, z: Complex) -> Result<MultiLog> {
    Ok(MultiLog::with_period(cayley_psi(h, z)?, period(h)))
}

/// Weighted cylinder `Log((1 + (1-eta) h z) / (1 - eta h z)) / h`.
pub fn eta_psi(eta: f64, h: f64, z: Complex) -> Result<Complex> {
    check_h(h)?;
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {eta}")));
    }
    if h == 0.0 {
        return Ok(z);
    }
    if !is_eta_regressive(eta, h, z) {
        return Err(Error::EtaNotRegressive { eta, h, z, at: None });
    }
    let hz = z * h;
    let ratio = (1.0 + hz * (1.0 - eta)) / (1.0 - hz * eta);
    Ok(multivalue::principal_log(ratio)? / h)
}

pub fn eta_psi_multi(eta: f64, h: f64, z: Complex) -> Result<MultiLog> {
    Ok(MultiLog::with_period(eta_psi(eta, h, z)?, period(h)))
}

/// `z (+) w = z + w + h z w`.
pub fn circle_plus(h: f64, z: Complex, w: Complex) -> Complex {
    z + w + z * w * h
}

/// `z (-) w = (z - w) / (1 + h w)`, the inverse of [`circle_plus`] in `w`.
pub fn circle_minus(h: f64, z: Complex, w: Complex) -> Result<Complex> {
    let den = 1.0 + w * h;
    if vanishes(den, w * h) {
        return Err(Error::NotRegressive { h, z: w, at: None });
    }
    Ok((z - w) / den)
}

/// `alpha (.) z`, the value with `1 + h (alpha (.) z) = (1 + h z)^alpha`
/// under the principal power.
pub fn circle_dot(h: f64, alpha: f64, z: Complex) -> Result<Complex> {
    if h == 0.0 {
        return Ok(z * alpha);
    }
    let base = 1.0 + z * h;
    if vanishes(base, z * h) {
        return Err(Error::NotRegressive { h, z, at: None });
    }
    Ok((multivalue::pow_real(base, alpha)? - 1.0) / h)
}

/// Selects one of the cylinder families by name (`delta`, `nabla`,
/// `cayley`, `eta:<v>`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CylinderKind {
    Delta,
    Nabla,
    Cayley,
    Eta(f64),
}

impl CylinderKind {
    /// Principal transform at graininess `h`.
    pub fn apply(self, h: f64, z: Complex) -> Result<Complex> {
        match self {
            CylinderKind::Delta => xi(h, z),
            CylinderKind::Nabla => xi_hat(h, z),
            CylinderKind::Cayley => cayley_psi(h, z),
            CylinderKind::Eta(eta) => eta_psi(eta, h, z),
        }
    }

    /// Multi-valued transform at graininess `h`.
    pub fn apply_multi(self, h: f64, z: Complex) -> Result<MultiLog> {
        Ok(MultiLog::with_period(self.apply(h, z)?, period(h)))
    }

    pub fn is_nabla(self) -> bool {
        matches!(self, CylinderKind::Nabla)
    }
}

impl fmt::Display for CylinderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CylinderKind::Delta => write!(f, "delta"),
            CylinderKind::Nabla => write!(f, "nabla"),
            CylinderKind::Cayley => write!(f, "cayley"),
            CylinderKind::Eta(eta) => write!(f, "eta:{eta}"),
        }
    }
}

impl FromStr for CylinderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(CylinderKind::Delta),
            "nabla" => Ok(CylinderKind::Nabla),
            "cayley" => Ok(CylinderKind::Cayley),
            _ => {
                let eta = s
                    .strip_prefix("eta:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidConfig(format!("unknown cylinder kind `{s}`")))?;
                if !(0.0..=1.0).contains(&eta) {
                    return Err(Error::InvalidConfig(format!("eta must lie in [0, 1], got {eta}")));
                }
                Ok(CylinderKind::Eta(eta))
            }
        }
    }
}
