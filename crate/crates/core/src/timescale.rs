//! Time scales: closed subsets of the reals built from a handful of
//! representable families, with forward/backward jumps, graininess, and the
//! decomposition of an integration window into dense pieces and jumps.
//!
//! Points of discrete families are computed in floating point, so membership
//! is tested with the tolerance `MEMBERSHIP_TOL * max(1, |t|)`. Every query
//! snaps its argument onto the canonical floating-point value of the grid
//! point (`anchor + k*h`, `q.powi(k)`, ...), so jump chains are reproducible.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const MEMBERSHIP_TOL: f64 = 1e-12;

/// Upper bound on the number of segments a single window may produce.
pub const MAX_SEGMENTS: usize = 20_000_000;

fn tol_at(t: f64) -> f64 {
    MEMBERSHIP_TOL * t.abs().max(1.0)
}

/// Closed interval `[lo, hi]`; `lo` may be `-inf` and `hi` may be `+inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Reals,
    Uniform { step: f64, anchor: f64 },
    Q { ratio: f64 },
    Union(Vec<Interval>),
    Discrete(Vec<f64>),
    Alternating { alpha: f64, beta: f64 },
}

/// A validated time scale.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeScale {
    repr: Repr,
}

/// Local structure of the scale around one of its points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighborhood {
    /// Canonical value of the point.
    pub t: f64,
    pub sigma: f64,
    pub rho: f64,
    /// For right-dense points, the end of the dense run containing `t`.
    pub dense_until: f64,
    pub is_max: bool,
    pub is_min: bool,
}

impl Neighborhood {
    pub fn mu(&self) -> f64 {
        self.sigma - self.t
    }

    pub fn nu(&self) -> f64 {
        self.t - self.rho
    }

    pub fn right_scattered(&self) -> bool {
        self.sigma > self.t
    }

    pub fn left_scattered(&self) -> bool {
        self.rho < self.t
    }

    fn single(t: f64) -> Self {
        Neighborhood {
            t,
            sigma: t,
            rho: t,
            dense_until: t,
            is_max: false,
            is_min: false,
        }
    }
}

impl TimeScale {
    pub fn reals() -> Self {
        TimeScale { repr: Repr::Reals }
    }

    /// `anchor + step * Z`.
    pub fn uniform(step: f64, anchor: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidScale(format!("grid step must be positive, got {step}")));
        }
        if !anchor.is_finite() {
            return Err(Error::InvalidScale(format!("grid anchor must be finite, got {anchor}")));
        }
        Ok(TimeScale {
            repr: Repr::Uniform { step, anchor },
        })
    }

    /// `{ q^k : k = 0, 1, 2, ... }`.
    pub fn q_grid(ratio: f64) -> Result<Self> {
        if !(ratio.is_finite() && ratio > 1.0) {
            return Err(Error::InvalidScale(format!("q-grid ratio must exceed 1, got {ratio}")));
        }
        Ok(TimeScale {
            repr: Repr::Q { ratio },
        })
    }

    /// `{0, a, a+b, (a+b)+a, 2(a+b), ...}`.
    pub fn alternating(alpha: f64, beta: f64) -> Result<Self> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(alpha) || !ok(beta) {
            return Err(Error::InvalidScale("alternating steps must be positive".into()));
        }
        if alpha == beta {
            return Err(Error::InvalidScale("alternating steps must differ".into()));
        }
        Ok(TimeScale {
            repr: Repr::Alternating { alpha, beta },
        })
    }

    pub fn union(pieces: Vec<Interval>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::InvalidScale("interval union needs at least one piece".into()));
        }
        let n = pieces.len();
        for (i, p) in pieces.iter().enumerate() {
            if p.lo.is_nan() || p.hi.is_nan() || p.lo > p.hi {
                return Err(Error::InvalidScale(format!("bad interval [{}, {}]", p.lo, p.hi)));
            }
            if p.lo == f64::INFINITY || p.hi == f64::NEG_INFINITY {
                return Err(Error::InvalidScale(format!("bad interval [{}, {}]", p.lo, p.hi)));
            }
            if p.lo.is_infinite() && i != 0 {
                return Err(Error::InvalidScale("-inf only allowed at the left end".into()));
            }
            if p.hi.is_infinite() && i != n - 1 {
                return Err(Error::InvalidScale("inf only allowed at the right end".into()));
            }
        }
        for w in pieces.windows(2) {
            if !(w[1].lo > w[0].hi) {
                return Err(Error::InvalidScale(format!(
                    "intervals must be sorted with positive gaps: [{}, {}] then [{}, {}]",
                    w[0].lo, w[0].hi, w[1].lo, w[1].hi
                )));
            }
        }
        Ok(TimeScale {
            repr: Repr::Union(pieces),
        })
    }

    pub fn discrete(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidScale("a discrete set needs at least two points".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidScale("discrete points must be finite".into()));
        }
        if points.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidScale("discrete points must be strictly increasing".into()));
        }
        Ok(TimeScale {
            repr: Repr::Discrete(points),
        })
    }

    /// True for scales without any scattered point.
    pub fn is_reals(&self) -> bool {
        matches!(self.repr, Repr::Reals)
    }

    pub fn contains(&self, t: f64) -> bool {
        self.locate(t).is_ok()
    }

    /// Smallest point of the scale, if any.
    pub fn min_point(&self) -> Option<f64> {
        match &self.repr {
            Repr::Reals | Repr::Uniform { .. } => None,
            Repr::Q { .. } => Some(1.0),
            Repr::Alternating { .. } => Some(0.0),
            Repr::Union(p) => p.first().map(|i| i.lo).filter(|x| x.is_finite()),
            Repr::Discrete(p) => p.first().copied(),
        }
    }

    /// Largest point of the scale, if any.
    pub fn max_point(&self) -> Option<f64> {
        match &self.repr {
            Repr::Union(p) => p.last().map(|i| i.hi).filter(|x| x.is_finite()),
            Repr::Discrete(p) => p.last().copied(),
            _ => None,
        }
    }

    /// Jump structure at `t`, snapping `t` onto the canonical scale point.
    pub fn locate(&self, t: f64) -> Result<Neighborhood> {
        if !t.is_finite() {
            return Err(Error::PointNotInScale { t });
        }
        let miss = || Error::PointNotInScale { t };
        match &self.repr {
            Repr::Reals => Ok(Neighborhood {
                dense_until: f64::INFINITY,
                ..Neighborhood::single(t)
            }),
            Repr::Uniform { step, anchor } => {
                let k = ((t - anchor) / step).round();
                let point = |j: f64| anchor + j * step;
                if (point(k) - t).abs() > tol_at(t) {
                    return Err(miss());
                }
                let p = point(k);
                Ok(Neighborhood {
                    sigma: point(k + 1.0),
                    rho: point(k - 1.0),
                    ..Neighborhood::single(p)
                })
            }
            Repr::Q { ratio } => {
                if t <= 0.0 {
                    return Err(miss());
                }
                let k = (t.ln() / ratio.ln()).round();
                if k < 0.0 || k > i32::MAX as f64 - 1.0 {
                    return Err(miss());
                }
                let k = k as i32;
                let p = ratio.powi(k);
                if (p - t).abs() > MEMBERSHIP_TOL * t {
                    return Err(miss());
                }
                Ok(Neighborhood {
                    sigma: ratio.powi(k + 1),
                    rho: if k == 0 { p } else { ratio.powi(k - 1) },
                    is_min: k == 0,
                    ..Neighborhood::single(p)
                })
            }
            Repr::Alternating { alpha, beta } => {
                let point = |n: i64| alternating_point(*alpha, *beta, n);
                let m = (t / (alpha + beta)).floor() as i64;
                let n = (2 * m - 2..=2 * m + 3)
                    .filter(|n| *n >= 0)
                    .min_by(|a, b| {
                        (point(*a) - t)
                            .abs()
                            .total_cmp(&(point(*b) - t).abs())
                    })
                    .ok_or_else(miss)?;
                if (point(n) - t).abs() > tol_at(t) {
                    return Err(miss());
                }
                Ok(Neighborhood {
                    sigma: point(n + 1),
                    rho: if n == 0 { point(0) } else { point(n - 1) },
                    is_min: n == 0,
                    ..Neighborhood::single(point(n))
                })
            }
            Repr::Union(pieces) => {
                let tol = tol_at(t);
                let i = pieces
                    .iter()
                    .position(|p| t >= p.lo - tol && t <= p.hi + tol)
                    .ok_or_else(miss)?;
                let piece = pieces[i];
                let p = if (t - piece.hi).abs() <= tol {
                    piece.hi
                } else if (t - piece.lo).abs() <= tol {
                    piece.lo
                } else {
                    t
                };
                let last = i + 1 == pieces.len();
                let first = i == 0;
                let sigma = if p < piece.hi || last { p } else { pieces[i + 1].lo };
                let rho = if p > piece.lo || first { p } else { pieces[i - 1].hi };
                Ok(Neighborhood {
                    t: p,
                    sigma,
                    rho,
                    dense_until: if p < piece.hi { piece.hi } else { p },
                    is_max: last && p == piece.hi,
                    is_min: first && p == piece.lo,
                })
            }
            Repr::Discrete(points) => {
                let i = points.partition_point(|x| *x < t);
                let cand = [i.checked_sub(1), Some(i)]
                    .into_iter()
                    .flatten()
                    .filter(|j| *j < points.len())
                    .min_by(|a, b| (points[*a] - t).abs().total_cmp(&(points[*b] - t).abs()))
                    .ok_or_else(miss)?;
                if (points[cand] - t).abs() > tol_at(t) {
                    return Err(miss());
                }
                let n = points.len();
                let p = points[cand];
                Ok(Neighborhood {
                    sigma: if cand + 1 < n { points[cand + 1] } else { p },
                    rho: if cand > 0 { points[cand - 1] } else { p },
                    is_max: cand + 1 == n,
                    is_min: cand == 0,
                    ..Neighborhood::single(p)
                })
            }
        }
    }

    /// Forward jump `sigma(t)`.
    pub fn sigma(&self, t: f64) -> Result<f64> {
        Ok(self.locate(t)?.sigma)
    }

    /// Backward jump `rho(t)`.
    pub fn rho(&self, t: f64) -> Result<f64> {
        Ok(self.locate(t)?.rho)
    }

    /// Forward graininess `mu(t) = sigma(t) - t`.
    pub fn mu(&self, t: f64) -> Result<f64> {
        Ok(self.locate(t)?.mu())
    }

    /// Backward graininess `nu(t) = t - rho(t)`.
    pub fn nu(&self, t: f64) -> Result<f64> {
        Ok(self.locate(t)?.nu())
    }

    /// Locate `t` and reject a left-scattered maximum (delta quantities live on
    /// the kappa-restricted scale).
    pub fn locate_delta(&self, t: f64) -> Result<Neighborhood> {
        let n = self.locate(t)?;
        if n.is_max && n.left_scattered() {
            return Err(Error::KappaBoundary { t: n.t });
        }
        Ok(n)
    }

    /// Locate `t` and reject a right-scattered minimum.
    pub fn locate_nabla(&self, t: f64) -> Result<Neighborhood> {
        let n = self.locate(t)?;
        if n.is_min && n.right_scattered() {
            return Err(Error::KappaBoundary { t: n.t });
        }
        Ok(n)
    }

    /// Split `[s, t)` into dense pieces and scattered jumps, left to right.
    pub fn decompose(&self, s: f64, t: f64) -> Result<SegmentDecomposition> {
        let start = self.locate(s)?;
        let end = self.locate(t)?.t;
        if start.t > end {
            return Err(Error::InvalidConfig(format!(
                "decomposition needs s <= t, got s = {s}, t = {t}"
            )));
        }
        let mut segments = Vec::new();
        let mut cursor = start;
        while cursor.t < end {
            if segments.len() >= MAX_SEGMENTS {
                return Err(Error::UnboundedWindow { s, t });
            }
            if cursor.right_scattered() {
                segments.push(Segment::Jump {
                    tau: cursor.t,
                    mu: cursor.mu(),
                    next: cursor.sigma,
                });
                cursor = self.locate(cursor.sigma)?;
            } else {
                let b = cursor.dense_until.min(end);
                if !(b > cursor.t) {
                    return Err(Error::UnboundedWindow { s, t });
                }
                segments.push(Segment::Continuous { a: cursor.t, b });
                cursor = self.locate(b)?;
            }
        }
        Ok(SegmentDecomposition { segments })
    }

    /// Smallest scale point `>= x`.
    pub fn ceil_point(&self, x: f64) -> Option<f64> {
        let tol = tol_at(x);
        match &self.repr {
            Repr::Reals => Some(x),
            Repr::Uniform { step, anchor } => {
                let k = ((x - anchor) / step - 1e-9).ceil();
                Some(anchor + k * step)
            }
            Repr::Q { ratio } => {
                if x <= 1.0 {
                    return Some(1.0);
                }
                let k = (x.ln() / ratio.ln() - 1e-9).ceil();
                Some(ratio.powi(k as i32))
            }
            Repr::Alternating { alpha, beta } => {
                if x <= 0.0 {
                    return Some(0.0);
                }
                let m = (x / (alpha + beta)).floor() as i64;
                (2 * m - 2..=2 * m + 3)
                    .filter(|n| *n >= 0)
                    .map(|n| alternating_point(*alpha, *beta, n))
                    .find(|p| *p >= x - tol)
            }
            Repr::Union(pieces) => pieces.iter().find_map(|p| {
                if x < p.lo {
                    Some(p.lo)
                } else if x <= p.hi + tol {
                    Some(x.min(p.hi))
                } else {
                    None
                }
            }),
            Repr::Discrete(points) => points.iter().copied().find(|p| *p >= x - tol),
        }
    }

    /// Largest scale point `<= x`.
    pub fn floor_point(&self, x: f64) -> Option<f64> {
        let tol = tol_at(x);
        match &self.repr {
            Repr::Reals => Some(x),
            Repr::Uniform { step, anchor } => {
                let k = ((x - anchor) / step + 1e-9).floor();
                Some(anchor + k * step)
            }
            Repr::Q { ratio } => {
                if x < 1.0 - tol {
                    return None;
                }
                let k = (x.max(1.0).ln() / ratio.ln() + 1e-9).floor();
                Some(ratio.powi(k as i32))
            }
            Repr::Alternating { alpha, beta } => {
                if x < -tol {
                    return None;
                }
                let m = (x / (alpha + beta)).floor() as i64;
                (2 * m - 2..=2 * m + 3)
                    .rev()
                    .filter(|n| *n >= 0)
                    .map(|n| alternating_point(*alpha, *beta, n))
                    .find(|p| *p <= x + tol)
            }
            Repr::Union(pieces) => pieces.iter().rev().find_map(|p| {
                if x > p.hi {
                    Some(p.hi)
                } else if x >= p.lo - tol {
                    Some(x.max(p.lo))
                } else {
                    None
                }
            }),
            Repr::Discrete(points) => points.iter().rev().copied().find(|p| *p <= x + tol),
        }
    }

    /// Scale points in `[from, to]`: every scattered point, and dense runs
    /// sampled every `dense_step`, always including run endpoints.
    pub fn points(&self, from: f64, to: f64, dense_step: f64) -> Result<Vec<f64>> {
        if !(dense_step > 0.0) || !dense_step.is_finite() {
            return Err(Error::InvalidConfig(format!("sampling step must be positive, got {dense_step}")));
        }
        let (Some(first), Some(last)) = (self.ceil_point(from), self.floor_point(to)) else {
            return Ok(Vec::new());
        };
        if first > last {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for seg in self.decompose(first, last)?.segments() {
            match *seg {
                Segment::Jump { tau, .. } => out.push(tau),
                Segment::Continuous { a, b } => {
                    let n = ((b - a) / dense_step * (1.0 + 1e-12)).floor() as usize;
                    out.extend((0..=n).map(|j| a + j as f64 * dense_step).filter(|x| *x < b));
                }
            }
        }
        out.push(self.locate(last)?.t);
        Ok(out)
    }
}

fn alternating_point(alpha: f64, beta: f64, n: i64) -> f64 {
    let k = (n / 2) as f64;
    if n % 2 == 0 {
        k * (alpha + beta)
    } else {
        k * (alpha + beta) + alpha
    }
}

/// One piece of a window decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Segment {
    /// `[a, b]` is contained in the scale and `mu` vanishes on `[a, b)`.
    Continuous { a: f64, b: f64 },
    /// A right-scattered point `tau` with `sigma(tau) = next = tau + mu`.
    Jump { tau: f64, mu: f64, next: f64 },
}

impl Segment {
    pub fn length(&self) -> f64 {
        match *self {
            Segment::Continuous { a, b } => b - a,
            Segment::Jump { mu, .. } => mu,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SegmentDecomposition {
    segments: Vec<Segment>,
}

impl SegmentDecomposition {
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn into_segments(self) -> Vec<Segment> {
        self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn total_length(&self) -> f64 {
        self.segments.iter().map(Segment::length).sum()
    }

    pub fn has_jumps(&self) -> bool {
        self.segments.iter().any(|s| matches!(s, Segment::Jump { .. }))
    }

    /// Concatenation; adjacent dense pieces `[a, r]`, `[r, b]` are merged.
    pub fn concat(mut self, other: SegmentDecomposition) -> SegmentDecomposition {
        for seg in other.segments {
            match (self.segments.last_mut(), seg) {
                (Some(Segment::Continuous { b, .. }), Segment::Continuous { a: a2, b: b2 }) if *b == a2 => {
                    *b = b2;
                }
                _ => self.segments.push(seg),
            }
        }
        self
    }
}

fn fmt_num(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x}")
    }
}

impl fmt::Display for TimeScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::Reals => write!(f, "r"),
            Repr::Uniform { step, anchor } => {
                if *anchor == 0.0 {
                    write!(f, "hz:{step}")
                } else {
                    write!(f, "hz:{step}:{anchor}")
                }
            }
            Repr::Q { ratio } => write!(f, "q:{ratio}"),
            Repr::Alternating { alpha, beta } => write!(f, "alt:{alpha},{beta}"),
            Repr::Union(pieces) => {
                let body: Vec<String> = pieces
                    .iter()
                    .map(|p| format!("[{},{}]", fmt_num(p.lo), fmt_num(p.hi)))
                    .collect();
                write!(f, "union:{}", body.join(";"))
            }
            Repr::Discrete(points) => {
                let body: Vec<String> = points.iter().map(|p| fmt_num(*p)).collect();
                write!(f, "set:{}", body.join(","))
            }
        }
    }
}

fn parse_finite(s: &str) -> Result<f64> {
    let x: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::InvalidScale(format!("not a number: `{s}`")))?;
    if !x.is_finite() {
        return Err(Error::InvalidScale(format!("expected a finite number, got `{s}`")));
    }
    Ok(x)
}

fn parse_endpoint(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        other => parse_finite(other),
    }
}

impl FromStr for TimeScale {
    type Err = Error;

    /// `r` | `hz:<h>[:<anchor>]` | `q:<q>` | `alt:<alpha>,<beta>` |
    /// `union:[lo,hi](;[lo,hi])*` | `set:<p1>,<p2>,...`
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        if text == "r" {
            return Ok(TimeScale::reals());
        }
        let (tag, body) = text
            .split_once(':')
            .ok_or_else(|| Error::InvalidScale(format!("unrecognized time scale `{text}`")))?;
        match tag {
            "hz" => match body.split_once(':') {
                Some((h, anchor)) => TimeScale::uniform(parse_finite(h)?, parse_finite(anchor)?),
                None => TimeScale::uniform(parse_finite(body)?, 0.0),
            },
            "q" => TimeScale::q_grid(parse_finite(body)?),
            "alt" => {
                let (a, b) = body
                    .split_once(',')
                    .ok_or_else(|| Error::InvalidScale("alt needs `alpha,beta`".into()))?;
                TimeScale::alternating(parse_finite(a)?, parse_finite(b)?)
            }
            "union" => {
                let pieces = body
                    .split(';')
                    .map(|piece| {
                        let inner = piece
                            .trim()
                            .strip_prefix('[')
                            .and_then(|p| p.strip_suffix(']'))
                            .ok_or_else(|| Error::InvalidScale(format!("bad interval `{piece}`")))?;
                        let (lo, hi) = inner
                            .split_once(',')
                            .ok_or_else(|| Error::InvalidScale(format!("bad interval `{piece}`")))?;
                        Ok(Interval::new(parse_endpoint(lo)?, parse_endpoint(hi)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                TimeScale::union(pieces)
            }
            "set" => {
                let points = body.split(',').map(parse_finite).collect::<Result<Vec<_>>>()?;
                TimeScale::discrete(points)
            }
            _ => Err(Error::InvalidScale(format!("unrecognized time scale `{text}`"))),
        }
    }
}
