//! Complex arithmetic with an explicit principal branch, and multi-valued
//! logarithm values represented as a representative plus a period lattice.
//!
//! The principal argument lives in `(-pi, pi]`. Points on the negative real
//! axis always get `+pi`, whatever the sign of their zero imaginary part.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = num_complex::Complex64;

/// Moduli below this are treated as zero by [`principal_log`].
pub const LOG_ZERO_GUARD: f64 = 1e-300;

/// The period `2*pi*i` of the complex logarithm.
pub const TWO_PI_I: Complex = Complex::new(0.0, TAU);

pub const I: Complex = Complex::new(0.0, 1.0);

/// Principal argument in `(-pi, pi]`.
pub fn principal_arg(z: Complex) -> f64 {
    if z.im == 0.0 {
        // covers both +0.0 and -0.0
        return if z.re < 0.0 { PI } else { 0.0 };
    }
    let a = z.im.atan2(z.re);
    if a <= -PI {
        PI
    } else {
        a
    }
}

/// `Log z = ln|z| + i Arg z`.
pub fn principal_log(z: Complex) -> Result<Complex> {
    let r = z.norm();
    if !r.is_finite() {
        return Err(Error::NonFinite);
    }
    if r < LOG_ZERO_GUARD {
        return Err(Error::LogOfZero);
    }
    Ok(Complex::new(r.ln(), principal_arg(z)))
}

pub fn div(z: Complex, w: Complex) -> Result<Complex> {
    if w.norm() == 0.0 {
        return Err(Error::DivisionByZero);
    }
    finite(z / w)
}

pub fn exp(z: Complex) -> Result<Complex> {
    finite(z.exp())
}

/// Principal power `z^alpha = exp(alpha * Log z)`.
///
/// Integer exponents use repeated multiplication, which agrees with the
/// principal definition and keeps real inputs exactly real.
pub fn pow_real(z: Complex, alpha: f64) -> Result<Complex> {
    if alpha.fract() == 0.0 && alpha.abs() <= 1024.0 {
        let n = alpha as i32;
        if n == 0 {
            return Ok(Complex::new(1.0, 0.0));
        }
        if z.norm() == 0.0 {
            return if n > 0 {
                Ok(Complex::new(0.0, 0.0))
            } else {
                Err(Error::DivisionByZero)
            };
        }
        return finite(z.powi(n));
    }
    if z.re > 0.0 && z.im == 0.0 {
        return finite(Complex::new(z.re.powf(alpha), 0.0));
    }
    let log = principal_log(z)?;
    finite((log * alpha).exp())
}

/// Principal square root, `Arg` in `(-pi/2, pi/2]`.
pub fn principal_sqrt(z: Complex) -> Complex {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            Complex::new(z.re.sqrt(), 0.0)
        } else {
            Complex::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

pub(crate) fn finite(z: Complex) -> Result<Complex> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(Error::NonFinite)
    }
}

/// Nearest lattice index `k` such that `a - b - k * period` is smallest.
///
/// `period` must be purely imaginary; a zero period yields `k = 0`.
pub fn lattice_index(a: Complex, b: Complex, period: Complex) -> i64 {
    if period.im == 0.0 {
        return 0;
    }
    ((a.im - b.im) / period.im).round() as i64
}

/// Distance between `a` and `b` modulo the lattice `period * Z`, together with
/// the minimizing lattice index.
pub fn lattice_residual(a: Complex, b: Complex, period: Complex) -> (f64, i64) {
    let k = lattice_index(a, b, period);
    ((a - b - period * k as f64).norm(), k)
}

/// Equality of complex logarithm values modulo `2*pi*i`.
pub fn mod2pi_equal(a: Complex, b: Complex, tol: f64) -> bool {
    lattice_residual(a, b, TWO_PI_I).0 <= tol
}

/// A multi-valued value `{ rep + period * k : k in Z }`.
///
/// Logarithms on time scales use `period = 2*pi*i`; the multi-valued cylinder
/// at graininess `h > 0` uses `2*pi*i / h`, and `h = 0` gives a zero period,
/// i.e. a single value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiLog {
    #[serde(with = "complex_serde")]
    pub rep: Complex,
    #[serde(with = "complex_serde")]
    pub period: Complex,
}

impl MultiLog {
    /// Logarithm-type value with period `2*pi*i`.
    pub fn new(rep: Complex) -> Self {
        MultiLog {
            rep,
            period: TWO_PI_I,
        }
    }

    pub fn with_period(rep: Complex, period: Complex) -> Self {
        MultiLog { rep, period }
    }

    pub fn single(rep: Complex) -> Self {
        MultiLog {
            rep,
            period: Complex::new(0.0, 0.0),
        }
    }

    pub fn is_single_valued(&self) -> bool {
        self.period.norm() == 0.0
    }

    /// The `k`-th member of the set.
    pub fn branch(&self, k: i64) -> Complex {
        self.rep + self.period * k as f64
    }

    pub fn contains(&self, z: Complex, tol: f64) -> bool {
        lattice_residual(z, self.rep, self.period).0 <= tol
    }

    /// Set equality; both values must share the same period.
    pub fn equals(&self, other: &MultiLog, tol: f64) -> bool {
        (self.period - other.period).norm() <= tol && self.contains(other.rep, tol)
    }
}

impl std::ops::Add for MultiLog {
    type Output = MultiLog;

    /// Minkowski sum; periods are expected to agree.
    fn add(self, rhs: MultiLog) -> MultiLog {
        let period = if self.is_single_valued() { rhs.period } else { self.period };
        MultiLog {
            rep: self.rep + rhs.rep,
            period,
        }
    }
}

/// `{"re": .., "im": ..}` form used in JSON output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for ComplexJson {
    fn from(z: Complex) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

impl From<ComplexJson> for Complex {
    fn from(z: ComplexJson) -> Self {
        Complex::new(z.re, z.im)
    }
}

/// Serde adapter writing a [`Complex`] as `{"re": .., "im": ..}`.
pub mod complex_serde {
    use super::{Complex, ComplexJson};
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex, s: S) -> Result<S::Ok, S::Error> {
        ComplexJson::from(*z).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex, D::Error> {
        ComplexJson::deserialize(d).map(Complex::from)
    }
}
