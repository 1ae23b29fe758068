//! The interval abstract domain over the float universe.
//!
//! `Pair(a, b)` abstracts `[a, b]` intersected with the non-NaN floats;
//! `Top` abstracts the whole universe including NaN. Abstract operations
//! take the four round-to-nearest corner results and return `Top` as soon
//! as NaN appears, which makes them over-approximate the floating-point
//! operations themselves rather than the exact real ones.

use crate::error::Error;
use crate::format::Format;
use crate::fp::Fp;
use crate::Result;
use std::fmt;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Interval {
    Pair(Fp, Fp),
    Top,
}

/// An abstract box: one interval per coordinate.
pub type AbsBox = Vec<Interval>;

impl Interval {
    pub fn pair(a: Fp, b: Fp) -> Result<Interval> {
        if a.is_nan() || b.is_nan() || !Fp::le(a, b) {
            return Err(Error::BadInterval);
        }
        Ok(Interval::Pair(a, b))
    }

    pub fn singleton(x: Fp) -> Result<Interval> {
        Interval::pair(x, x)
    }

    pub fn is_top(&self) -> bool {
        matches!(self, Interval::Top)
    }

    pub fn lo(&self) -> Option<Fp> {
        match self {
            Interval::Pair(a, _) => Some(*a),
            Interval::Top => None,
        }
    }

    pub fn hi(&self) -> Option<Fp> {
        match self {
            Interval::Pair(_, b) => Some(*b),
            Interval::Top => None,
        }
    }

    /// Concretization membership.
    pub fn contains(&self, x: Fp) -> bool {
        match self {
            Interval::Top => true,
            Interval::Pair(a, b) => !x.is_nan() && Fp::le(*a, x) && Fp::le(x, *b),
        }
    }

    /// Both endpoints finite (no infinities, not Top).
    pub fn is_finite_pair(&self) -> bool {
        matches!(self, Interval::Pair(a, b) if a.is_finite() && b.is_finite())
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interval::Top => write!(f, "Top"),
            Interval::Pair(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// How the exact image extrema of a unary float function are computed.
#[derive(Clone, Debug)]
pub enum PieceSpec {
    /// Monotone over the whole non-NaN universe: extrema at endpoints.
    Monotone,
    /// Monotone between consecutive listed turning points; the listed
    /// points are the positions where the direction changes, and must be
    /// sorted increasing.
    Breakpoints(Vec<Fp>),
    /// Enumerate the concretization; exact for any function, small formats
    /// only.
    Exhaustive,
}

fn hull_of_candidates(cands: impl IntoIterator<Item = Fp>) -> Interval {
    let mut lo: Option<Fp> = None;
    let mut hi: Option<Fp> = None;
    for c in cands {
        if c.is_nan() {
            return Interval::Top;
        }
        lo = Some(match lo {
            None => c,
            Some(l) => Fp::min(l, c),
        });
        hi = Some(match hi {
            None => c,
            Some(h) => Fp::max(h, c),
        });
    }
    Interval::Pair(lo.expect("non-empty candidate set"), hi.unwrap())
}

/// Exact image extrema of `f` over an interval, per the supplied monotone
/// piece description. `f` must map NaN to NaN.
pub fn lift_unary(
    fmt: &Format,
    f: &dyn Fn(Fp) -> Fp,
    spec: &PieceSpec,
    iv: &Interval,
) -> Interval {
    match iv {
        Interval::Top => Interval::Top,
        Interval::Pair(a, b) => match spec {
            PieceSpec::Monotone => hull_of_candidates([f(*a), f(*b)]),
            PieceSpec::Breakpoints(ts) => {
                let mut cands = vec![f(*a), f(*b)];
                for t in ts {
                    if Fp::le(*a, *t) && Fp::le(*t, *b) {
                        cands.push(f(*t));
                    }
                }
                hull_of_candidates(cands)
            }
            PieceSpec::Exhaustive => {
                let pts = fmt.enumerate(*a, *b).expect("non-NaN bounds");
                hull_of_candidates(pts.into_iter().map(f))
            }
        },
    }
}

/// Exhaustively confirm that a piece description computes the same image
/// extrema as enumeration, over every interval of the universe.
pub fn audit_lift(fmt: &Format, f: &dyn Fn(Fp) -> Fp, spec: &PieceSpec) -> Result<()> {
    let mut points = vec![Fp::NegInf];
    points.extend((0..fmt.finite_count()).map(|i| fmt.from_index(i)));
    points.push(Fp::PosInf);
    for i in 0..points.len() {
        for j in i..points.len() {
            let iv = Interval::Pair(points[i], points[j]);
            let got = lift_unary(fmt, f, spec, &iv);
            let want = lift_unary(fmt, f, &PieceSpec::Exhaustive, &iv);
            if got != want {
                return Err(Error::InternalConsistency(format!(
                    "piece description disagrees with enumeration on {iv}: {got} vs {want}"
                )));
            }
        }
    }
    Ok(())
}

fn corners(fmt: &Format, op: fn(&Format, Fp, Fp) -> Fp, x: &Interval, y: &Interval) -> Interval {
    match (x, y) {
        (Interval::Top, _) | (_, Interval::Top) => Interval::Top,
        (Interval::Pair(a, b), Interval::Pair(c, d)) => hull_of_candidates([
            op(fmt, *a, *c),
            op(fmt, *a, *d),
            op(fmt, *b, *c),
            op(fmt, *b, *d),
        ]),
    }
}

pub fn iv_add(fmt: &Format, x: &Interval, y: &Interval) -> Interval {
    corners(fmt, Format::add, x, y)
}

pub fn iv_sub(fmt: &Format, x: &Interval, y: &Interval) -> Interval {
    corners(fmt, Format::sub, x, y)
}

pub fn iv_mul(fmt: &Format, x: &Interval, y: &Interval) -> Interval {
    corners(fmt, Format::mul, x, y)
}

/// Interval counterpart of one affine row: left-associated interval sum of
/// `inputs[j] (*)# <w_j, w_j>` followed by `(+)# <bias, bias>`, in exactly
/// the concrete summation order.
pub fn iv_affine_row(fmt: &Format, weights: &[Fp], bias: Fp, inputs: &[Interval]) -> Interval {
    assert_eq!(weights.len(), inputs.len(), "row shape mismatch");
    let mut acc: Option<Interval> = None;
    for (w, iv) in weights.iter().zip(inputs) {
        let term = iv_mul(fmt, iv, &Interval::Pair(*w, *w));
        acc = Some(match acc {
            None => term,
            Some(a) => iv_add(fmt, &a, &term),
        });
    }
    let b = Interval::Pair(bias, bias);
    match acc {
        None => b,
        Some(a) => iv_add(fmt, &a, &b),
    }
}

/// Interval affine map: `iv_affine_row` per output coordinate.
pub fn iv_affine(
    fmt: &Format,
    weights: &[Vec<Fp>],
    bias: &[Fp],
    inputs: &[Interval],
) -> Result<Vec<Interval>> {
    if weights.len() != bias.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: bias.len(),
        });
    }
    for row in weights {
        if row.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                expected: row.len(),
                got: inputs.len(),
            });
        }
    }
    Ok(weights
        .iter()
        .zip(bias)
        .map(|(row, b)| iv_affine_row(fmt, row, *b, inputs))
        .collect())
}

impl Format {
    /// Parse `[lo,hi]` or `Top` in the bit-exact encoding.
    pub fn parse_interval(&self, s: &str) -> Result<Interval> {
        let s = s.trim();
        if s == "Top" {
            return Ok(Interval::Top);
        }
        let inner = s
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("interval must look like [lo,hi], got {s:?}")))?;
        let (lo, hi) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("interval must have two endpoints: {s:?}")))?;
        Interval::pair(self.parse_fp(lo)?, self.parse_fp(hi)?)
    }

    /// Parse a comma-separated list of intervals forming a box.
    pub fn parse_box(&self, s: &str) -> Result<AbsBox> {
        let mut out = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = s.as_bytes();
        for (i, &c) in bytes.iter().enumerate() {
            match c {
                b'[' => depth += 1,
                b']' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| Error::Parse("unbalanced brackets".into()))?
                }
                b',' if depth == 0 => {
                    out.push(self.parse_interval(&s[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        if start < s.len() || out.is_empty() {
            out.push(self.parse_interval(&s[start..])?);
        }
        Ok(out)
    }

    pub fn display_interval(&self, iv: &Interval) -> String {
        match iv {
            Interval::Top => "Top".into(),
            Interval::Pair(a, b) => format!("[{},{}]", self.display_fp(*a), self.display_fp(*b)),
        }
    }

    pub fn display_box(&self, b: &[Interval]) -> String {
        b.iter()
            .map(|iv| self.display_interval(iv))
            .collect::<Vec<_>>()
            .join(",")
    }
}
