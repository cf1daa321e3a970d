//! Calculus on time scales with multi-valued logarithms.
//!
//! A [`TimeScale`] is a closed subset of the reals; [`calculus`] provides
//! delta/nabla derivatives and integrals over it, and [`logexp`] builds the
//! exponential and logarithm functions from the cylinder transforms in
//! [`cylinder`]. Values that are only defined modulo `2*pi*i` are carried as
//! [`MultiLog`].
//!
//! ```
//! use chronolog::{log_ts, LogVariant, ScaleFunction, TimeScale, ToleranceConfig};
//!
//! let ts: TimeScale = "union:[-inf,-4];[2,inf]".parse().unwrap();
//! let p = ScaleFunction::parse("t^3").unwrap();
//! let v = log_ts(LogVariant::DeltaPrincipal, &p, &ts, -5.0, 3.0, &ToleranceConfig::default()).unwrap();
//! assert!((v.value.im - std::f64::consts::PI).abs() < 1e-9);
//! ```

// `!(a > b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod cli;
pub mod cylinder;
pub mod error;
pub mod exec;
pub mod expr;
pub mod logexp;
pub mod multivalue;
pub mod timescale;

pub use calculus::{PointFn, ScaleFunction, ScalePoint, ToleranceConfig};
pub use cylinder::CylinderKind;
pub use error::{Error, Result};
pub use exec::Execution;
pub use expr::Expr;
pub use logexp::{identity_suite, legacy_log, log_ts, IdentityRow, LegacyKind, LogValue, LogVariant};
pub use multivalue::{Complex, MultiLog};
pub use timescale::{Segment, SegmentDecomposition, TimeScale};
