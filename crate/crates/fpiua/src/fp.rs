//! Floating-point values and their exact arithmetic.
//!
//! A finite value is `(-1)^neg * mant * 2^(exp - M)` with the canonical-form
//! invariants enforced at construction: `mant < 2^(M+1)`, subnormals only at
//! `e_min`, and a single unsigned zero. All arithmetic goes through exact
//! integer scaling followed by round-to-nearest, ties-to-even.

use crate::error::Error;
use crate::format::{pow2_rational, Format};
use crate::Result;
use num::bigint::Sign;
use num::{BigInt, BigRational, Signed, Zero};
use std::cmp::Ordering;
use std::fmt;

/// One floating-point value. `Finite { neg, exp, mant }` denotes
/// `(-1)^neg * mant * 2^(exp - M)`; the format's `M` is implicit and
/// supplied by the operations.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Fp {
    Finite { neg: bool, exp: i32, mant: u64 },
    NegInf,
    PosInf,
    Nan,
}

/// Exact rational or an infinity: the input domain of rounding.
#[derive(Clone, Debug, PartialEq)]
pub enum ExtReal {
    Finite(BigRational),
    NegInf,
    PosInf,
}

impl Fp {
    pub fn zero() -> Fp {
        Fp::Finite {
            neg: false,
            exp: i32::MIN,
            mant: 0,
        }
    }

    /// Construct without canonical validation. Callers must uphold the
    /// format invariants; prefer [`Format::finite`].
    pub(crate) fn finite_unchecked(neg: bool, exp: i32, mant: u64) -> Fp {
        if mant == 0 {
            Fp::zero()
        } else {
            Fp::Finite { neg, exp, mant }
        }
    }

    pub fn is_nan(self) -> bool {
        matches!(self, Fp::Nan)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, Fp::Finite { .. })
    }

    pub fn is_zero(self) -> bool {
        matches!(self, Fp::Finite { mant: 0, .. })
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Fp::PosInf | Fp::NegInf)
    }

    /// Sign as -1/+1; zero reports +1, NaN reports +1.
    pub fn signum(self) -> i32 {
        match self {
            Fp::Finite { neg: true, mant, .. } if mant != 0 => -1,
            Fp::NegInf => -1,
            _ => 1,
        }
    }

    pub fn neg(self) -> Fp {
        match self {
            Fp::Finite { neg, exp, mant } if mant != 0 => Fp::Finite { neg: !neg, exp, mant },
            Fp::PosInf => Fp::NegInf,
            Fp::NegInf => Fp::PosInf,
            other => other,
        }
    }

    pub fn abs(self) -> Fp {
        match self {
            Fp::Finite { exp, mant, .. } => Fp::finite_unchecked(false, exp, mant),
            Fp::NegInf => Fp::PosInf,
            other => other,
        }
    }

    /// Total order over non-NaN values; `None` when either side is NaN.
    pub fn partial_cmp_total(a: Fp, b: Fp) -> Option<Ordering> {
        use Fp::*;
        match (a, b) {
            (Nan, _) | (_, Nan) => None,
            (NegInf, NegInf) | (PosInf, PosInf) => Some(Ordering::Equal),
            (NegInf, _) => Some(Ordering::Less),
            (_, NegInf) => Some(Ordering::Greater),
            (PosInf, _) => Some(Ordering::Greater),
            (_, PosInf) => Some(Ordering::Less),
            (Finite { .. }, Finite { .. }) => Some(cmp_finite(a, b)),
        }
    }

    /// Comparison that panics on NaN; use where NaN is excluded by invariant.
    pub fn cmp_non_nan(a: Fp, b: Fp) -> Ordering {
        Fp::partial_cmp_total(a, b).expect("NaN is excluded here by invariant")
    }

    pub fn lt(a: Fp, b: Fp) -> bool {
        Fp::cmp_non_nan(a, b) == Ordering::Less
    }

    pub fn le(a: Fp, b: Fp) -> bool {
        Fp::cmp_non_nan(a, b) != Ordering::Greater
    }

    pub fn min(a: Fp, b: Fp) -> Fp {
        if Fp::le(a, b) {
            a
        } else {
            b
        }
    }

    pub fn max(a: Fp, b: Fp) -> Fp {
        if Fp::le(a, b) {
            b
        } else {
            a
        }
    }
}

fn cmp_finite(a: Fp, b: Fp) -> Ordering {
    let (Fp::Finite { neg: na, exp: ea, mant: ma }, Fp::Finite { neg: nb, exp: eb, mant: mb }) =
        (a, b)
    else {
        unreachable!()
    };
    if ma == 0 && mb == 0 {
        return Ordering::Equal;
    }
    if ma == 0 {
        return if nb { Ordering::Greater } else { Ordering::Less };
    }
    if mb == 0 {
        return if na { Ordering::Less } else { Ordering::Greater };
    }
    match (na, nb) {
        (false, true) => Ordering::Greater,
        (true, false) => Ordering::Less,
        (false, false) => cmp_magnitude(ea, ma, eb, mb),
        (true, true) => cmp_magnitude(eb, mb, ea, ma),
    }
}

/// Canonical form makes magnitude order the lexicographic `(exp, mant)`
/// order: subnormals live at `e_min` with small mantissas.
fn cmp_magnitude(ea: i32, ma: u64, eb: i32, mb: u64) -> Ordering {
    (ea, ma).cmp(&(eb, mb))
}

impl ExtReal {
    pub fn from_rational(r: BigRational) -> ExtReal {
        ExtReal::Finite(r)
    }
}

/// Decomposition of a finite float into exponent, significand in `[0, 2)`,
/// and the `M+1` binary significand digits.
#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub exp: i32,
    pub significand: BigRational,
    pub digits: Vec<u8>,
}

impl Format {
    /// Canonical-form constructor.
    pub fn finite(&self, neg: bool, exp: i32, mant: u64) -> Result<Fp> {
        if mant == 0 {
            return Ok(Fp::zero());
        }
        if exp < self.e_min() || exp > self.e_max() {
            return Err(Error::NonCanonical(format!(
                "exponent {exp} outside [{}, {}]",
                self.e_min(),
                self.e_max()
            )));
        }
        if mant > self.mant_hi() {
            return Err(Error::NonCanonical(format!(
                "significand {mant} exceeds {}",
                self.mant_hi()
            )));
        }
        if exp > self.e_min() && mant < self.mant_lo() {
            return Err(Error::NonCanonical(format!(
                "significand {mant} is subnormal but exponent {exp} > e_min"
            )));
        }
        Ok(Fp::Finite { neg, exp, mant })
    }

    /// `x` as an exact rational; `None` for non-finite.
    pub fn to_rational(&self, x: Fp) -> Option<BigRational> {
        match x {
            Fp::Finite { mant: 0, .. } => Some(BigRational::zero()),
            Fp::Finite { neg, exp, mant } => {
                let mag = BigRational::from_integer(BigInt::from(mant))
                    * pow2_rational(exp as i64 - self.mant_bits() as i64);
                Some(if neg { -mag } else { mag })
            }
            _ => None,
        }
    }

    /// Round an exact dyadic value `(-1)^neg * mag * 2^exp2` to the format.
    pub fn round_dyadic_u128(&self, neg: bool, mag: u128, exp2: i32) -> Fp {
        if mag == 0 {
            return Fp::zero();
        }
        let m_bits = self.mant_bits() as i64;
        let bitlen = 128 - mag.leading_zeros() as i64;
        let e_val = bitlen - 1 + exp2 as i64;
        if e_val > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        let e_t = e_val.max(self.e_min() as i64);
        let shift = exp2 as i64 + m_bits - e_t;
        let (mut m, mut e) = if shift >= 0 {
            (((mag) << shift) as u64, e_t)
        } else {
            let s = -shift;
            if s >= 129 {
                (0u64, e_t)
            } else if s == 128 {
                let half = 1u128 << 127;
                let up = mag > half; // mag == half ties to even 0
                (up as u64, e_t)
            } else {
                let s = s as u32;
                let m_floor = (mag >> s) as u64;
                let rem = mag & ((1u128 << s) - 1);
                let half = 1u128 << (s - 1);
                let up = rem > half || (rem == half && (m_floor & 1) == 1);
                (m_floor + up as u64, e_t)
            }
        };
        if m == (1u64 << (self.mant_bits() + 1)) {
            m = self.mant_lo();
            e += 1;
        }
        if e > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        Fp::finite_unchecked(neg, e as i32, m)
    }

    /// Round an exact dyadic value with arbitrary-precision magnitude.
    pub fn round_dyadic_big(&self, neg: bool, mag: &BigInt, exp2: i64) -> Fp {
        if mag.is_zero() {
            return Fp::zero();
        }
        debug_assert!(mag.sign() == Sign::Plus);
        let m_bits = self.mant_bits() as i64;
        let bitlen = mag.bits() as i64;
        let e_val = bitlen - 1 + exp2;
        if e_val > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        let e_t = e_val.max(self.e_min() as i64);
        let shift = exp2 + m_bits - e_t;
        let (mut m, mut e) = if shift >= 0 {
            let m: BigInt = mag << (shift as usize);
            (u64::try_from(&m).expect("fits M+1 bits"), e_t)
        } else {
            let s = (-shift) as u64;
            if s >= bitlen as u64 + 1 {
                (0u64, e_t)
            } else {
                let m_floor: BigInt = mag >> (s as usize);
                let rem: BigInt = mag - (&m_floor << (s as usize));
                let half: BigInt = BigInt::from(1) << ((s - 1) as usize);
                let m_floor = u64::try_from(&m_floor).expect("fits M+1 bits");
                let up = match rem.cmp(&half) {
                    Ordering::Greater => true,
                    Ordering::Less => false,
                    Ordering::Equal => (m_floor & 1) == 1,
                };
                (m_floor + up as u64, e_t)
            }
        };
        if m == (1u64 << (self.mant_bits() + 1)) {
            m = self.mant_lo();
            e += 1;
        }
        if e > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        Fp::finite_unchecked(neg, e as i32, m)
    }

    /// Round an exact rational to the format: round to nearest, ties to the
    /// candidate with an even last significand bit, with `[Omega + c, +inf]`
    /// mapping to `+inf` (and symmetrically).
    pub fn round_rational(&self, x: &BigRational) -> Fp {
        if x.is_zero() {
            return Fp::zero();
        }
        let neg = x.is_negative();
        let p = x.numer().abs();
        let q = x.denom().clone();
        // 2^e <= p/q < 2^(e+1)
        let mut e = p.bits() as i64 - q.bits() as i64;
        let holds = |e: i64| -> bool {
            // q * 2^e <= p
            if e >= 0 {
                (&q << (e as usize)) <= p
            } else {
                (&p << ((-e) as usize)) >= q
            }
        };
        if !holds(e) {
            e -= 1;
        }
        debug_assert!(holds(e) && !holds(e + 1));
        if e > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        let e_t = e.max(self.e_min() as i64);
        let sh = self.mant_bits() as i64 - e_t;
        let (num2, den2) = if sh >= 0 {
            (&p << (sh as usize), q)
        } else {
            (p.clone(), &q << ((-sh) as usize))
        };
        let (m_floor, rem) = num::Integer::div_rem(&num2, &den2);
        let mut m = u64::try_from(&m_floor).expect("fits M+1 bits");
        let twice: BigInt = &rem << 1;
        let up = match twice.cmp(&den2) {
            Ordering::Greater => true,
            Ordering::Less => false,
            Ordering::Equal => (m & 1) == 1,
        };
        m += up as u64;
        let mut e = e_t;
        if m == (1u64 << (self.mant_bits() + 1)) {
            m = self.mant_lo();
            e += 1;
        }
        if e > self.e_max() as i64 {
            return if neg { Fp::NegInf } else { Fp::PosInf };
        }
        Fp::finite_unchecked(neg, e as i32, m)
    }

    /// Rounding, total on exact rationals and infinities.
    pub fn round(&self, x: &ExtReal) -> Fp {
        match x {
            ExtReal::Finite(r) => self.round_rational(r),
            ExtReal::NegInf => Fp::NegInf,
            ExtReal::PosInf => Fp::PosInf,
        }
    }

    /// `x (+) y = rnd(x + y)`; non-finite operands follow the usual rules
    /// (`inf + inf = inf`, `inf - inf = NaN`), with no negative zero.
    pub fn add(&self, x: Fp, y: Fp) -> Fp {
        use Fp::*;
        match (x, y) {
            (Nan, _) | (_, Nan) => Nan,
            (PosInf, NegInf) | (NegInf, PosInf) => Nan,
            (PosInf, _) | (_, PosInf) => PosInf,
            (NegInf, _) | (_, NegInf) => NegInf,
            (
                Finite { neg: na, exp: ea, mant: ma },
                Finite { neg: nb, exp: eb, mant: mb },
            ) => {
                if ma == 0 {
                    return y;
                }
                if mb == 0 {
                    return x;
                }
                let m_bits = self.mant_bits() as i64;
                let lo = ea.min(eb) as i64;
                let da = ea as i64 - lo;
                let db = eb as i64 - lo;
                let span = da.max(db) + m_bits + 3;
                if span <= 126 {
                    let va = (ma as i128) << da;
                    let vb = (mb as i128) << db;
                    let v = (if na { -va } else { va }) + (if nb { -vb } else { vb });
                    let neg = v < 0;
                    self.round_dyadic_u128(neg, v.unsigned_abs(), (lo - m_bits) as i32)
                } else {
                    let va = BigInt::from(ma) << (da as usize);
                    let vb = BigInt::from(mb) << (db as usize);
                    let v = (if na { -va } else { va }) + (if nb { -vb } else { vb });
                    let neg = v.is_negative();
                    self.round_dyadic_big(neg, &v.abs(), lo - m_bits)
                }
            }
        }
    }

    /// `x (-) y = rnd(x - y)`.
    pub fn sub(&self, x: Fp, y: Fp) -> Fp {
        self.add(x, y.neg())
    }

    /// `x (*) y = rnd(x * y)`; `0 * inf = NaN`.
    pub fn mul(&self, x: Fp, y: Fp) -> Fp {
        use Fp::*;
        match (x, y) {
            (Nan, _) | (_, Nan) => Nan,
            (PosInf | NegInf, b) if b.is_zero() => Nan,
            (a, PosInf | NegInf) if a.is_zero() => Nan,
            (a @ (PosInf | NegInf), b) | (b, a @ (PosInf | NegInf)) => {
                if a.signum() * b.signum() > 0 {
                    PosInf
                } else {
                    NegInf
                }
            }
            (
                Finite { neg: na, exp: ea, mant: ma },
                Finite { neg: nb, exp: eb, mant: mb },
            ) => {
                if ma == 0 || mb == 0 {
                    return Fp::zero();
                }
                let mag = (ma as u128) * (mb as u128);
                let m_bits = self.mant_bits() as i64;
                let exp2 = ea as i64 + eb as i64 - 2 * m_bits;
                debug_assert!(exp2 >= i32::MIN as i64 && exp2 <= i32::MAX as i64);
                self.round_dyadic_u128(na != nb, mag, exp2 as i32)
            }
        }
    }

    /// Left-associated floating-point summation; the empty sum is zero.
    pub fn sum_left_assoc<I: IntoIterator<Item = Fp>>(&self, xs: I) -> Fp {
        let mut acc = Fp::zero();
        let mut first = true;
        for x in xs {
            if first {
                acc = x;
                first = false;
            } else {
                acc = self.add(acc, x);
            }
        }
        if first {
            Fp::zero()
        } else {
            acc
        }
    }

    /// Smallest float strictly greater than `x`.
    pub fn succ(&self, x: Fp) -> Result<Fp> {
        match x {
            Fp::Nan => Err(Error::NanOperand),
            Fp::PosInf => Err(Error::StepPastInfinity),
            Fp::NegInf => Ok(self.max_finite().neg()),
            Fp::Finite { mant: 0, .. } => Ok(self.omega()),
            Fp::Finite { neg: false, exp, mant } => {
                if mant == self.mant_hi() {
                    if exp == self.e_max() {
                        Ok(Fp::PosInf)
                    } else {
                        Ok(Fp::finite_unchecked(false, exp + 1, self.mant_lo()))
                    }
                } else {
                    Ok(Fp::finite_unchecked(false, exp, mant + 1))
                }
            }
            Fp::Finite { neg: true, exp, mant } => {
                // toward zero
                if mant == self.mant_lo() && exp > self.e_min() {
                    Ok(Fp::finite_unchecked(true, exp - 1, self.mant_hi()))
                } else {
                    Ok(Fp::finite_unchecked(true, exp, mant - 1))
                }
            }
        }
    }

    /// Largest float strictly smaller than `x`.
    pub fn pred(&self, x: Fp) -> Result<Fp> {
        match x {
            Fp::Nan => Err(Error::NanOperand),
            Fp::NegInf => Err(Error::StepPastInfinity),
            _ => Ok(self.succ(x.neg())?.neg()),
        }
    }

    /// Exponent, significand in `[0, 2)`, and `M+1` significand digits of a
    /// finite float; zero reports `(e_min, 0, 0...0)`.
    pub fn decompose(&self, x: Fp) -> Result<Decomposition> {
        match x {
            Fp::Finite { exp, mant, .. } => {
                let exp = if mant == 0 { self.e_min() } else { exp };
                let significand = BigRational::from_integer(BigInt::from(mant))
                    * pow2_rational(-(self.mant_bits() as i64));
                let m = self.mant_bits();
                let digits = (0..=m).rev().map(|i| ((mant >> i) & 1) as u8).collect();
                Ok(Decomposition {
                    exp,
                    significand,
                    digits,
                })
            }
            other => Err(Error::NonFinite(other.to_string())),
        }
    }

    /// Canonical exponent of a finite nonzero float (`e_min` for subnormals).
    pub fn expo(&self, x: Fp) -> Result<i32> {
        Ok(self.decompose(x)?.exp)
    }

    /// The gap `succ(x) - x` above a finite non-maximal `x >= 0`, as the
    /// exponent `g` with gap `2^g`.
    pub fn gap_above_exp(&self, x: Fp) -> Result<i32> {
        let s = self.succ(x)?;
        if !s.is_finite() {
            return Err(Error::StepPastInfinity);
        }
        let d = self.to_rational(s).unwrap() - self.to_rational(x).unwrap();
        // gaps are always powers of two
        let mut e = 0i32;
        let mut v = d;
        let one = BigRational::from_integer(1.into());
        let two = BigRational::from_integer(2.into());
        while v < one {
            v *= &two;
            e -= 1;
        }
        while v >= two {
            v /= &two;
            e += 1;
        }
        debug_assert!(v == one, "gap between adjacent floats must be a power of two");
        Ok(e)
    }

    /// Parse the bit-exact text encoding: `s:e:m` for finite values with
    /// `s` in `{+,-}`, unbiased decimal exponent `e`, decimal significand
    /// `m`; `+inf`, `-inf`, `nan` for specials. Canonical form is enforced.
    pub fn parse_fp(&self, s: &str) -> Result<Fp> {
        let s = s.trim();
        match s {
            "+inf" => return Ok(Fp::PosInf),
            "-inf" => return Ok(Fp::NegInf),
            "nan" => return Ok(Fp::Nan),
            _ => {}
        }
        let mut parts = s.split(':');
        let (sign, exp, mant) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
            (Some(sgn), Some(e), Some(m), None) => (sgn, e, m),
            _ => return Err(Error::Parse(format!("bad float literal {s:?}"))),
        };
        let neg = match sign {
            "+" => false,
            "-" => true,
            _ => return Err(Error::Parse(format!("bad sign in {s:?}"))),
        };
        let exp: i32 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {s:?}")))?;
        let mant: u64 = mant
            .parse()
            .map_err(|_| Error::Parse(format!("bad significand in {s:?}")))?;
        if mant == 0 {
            if neg || exp != self.e_min() {
                return Err(Error::NonCanonical(format!(
                    "zero must be written +:{}:0",
                    self.e_min()
                )));
            }
            return Ok(Fp::zero());
        }
        self.finite(neg, exp, mant)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Fp::Finite { mant: 0, .. } => write!(f, "+:?:0"),
            Fp::Finite { neg, exp, mant } => {
                write!(f, "{}:{}:{}", if *neg { "-" } else { "+" }, exp, mant)
            }
            Fp::PosInf => write!(f, "+inf"),
            Fp::NegInf => write!(f, "-inf"),
            Fp::Nan => write!(f, "nan"),
        }
    }
}

impl Format {
    /// Render with the format's canonical zero exponent.
    pub fn display_fp(&self, x: Fp) -> String {
        match x {
            Fp::Finite { mant: 0, .. } => format!("+:{}:0", self.e_min()),
            other => other.to_string(),
        }
    }

    /// Decimal rendering of the exact value, for reports.
    pub fn display_decimal(&self, x: Fp) -> String {
        match x {
            Fp::PosInf => "+inf".into(),
            Fp::NegInf => "-inf".into(),
            Fp::Nan => "nan".into(),
            f => {
                let r = self.to_rational(f).unwrap();
                crate::tables::rational_to_decimal(&r, 10)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn e5m3() -> Format {
        Format::new(5, 3).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Scan-all-candidates rounding oracle over the enumerated universe.
    fn round_oracle(f: &Format, x: &BigRational) -> Fp {
        let omega_c = f.to_rational(f.max_finite()).unwrap() + f.overflow_c();
        if *x >= omega_c {
            return Fp::PosInf;
        }
        if *x <= -omega_c {
            return Fp::NegInf;
        }
        let mut best: Option<(BigRational, Fp)> = None;
        for i in 0..f.finite_count() {
            let y = f.from_index(i);
            let d = (f.to_rational(y).unwrap() - x).abs();
            best = match best {
                None => Some((d, y)),
                Some((bd, by)) => {
                    if d < bd {
                        Some((d, y))
                    } else if d == bd {
                        // tie: prefer even last significand bit
                        let mant_of = |v: Fp| match v {
                            Fp::Finite { mant, .. } => mant,
                            _ => unreachable!(),
                        };
                        if mant_of(y) % 2 == 0 {
                            Some((d, y))
                        } else {
                            Some((bd, by))
                        }
                    } else {
                        Some((bd, by))
                    }
                }
            };
        }
        best.unwrap().1
    }

    #[test]
    fn round_examples() {
        let f = e5m3();
        assert_eq!(f.round_rational(&q(0, 1)), Fp::zero());
        // Omega + c = 63488 maps to +inf
        assert_eq!(f.round_rational(&q(63488, 1)), Fp::PosInf);
        assert_eq!(f.round_rational(&q(63487, 1)), f.max_finite());
        // midpoint 1 + 2^-4 rounds to 1 (tie to even)
        assert_eq!(f.round_rational(&q(17, 16)), f.parse_fp("+:0:8").unwrap());
        assert_eq!(f.round_rational(&q(-63488, 1)), Fp::NegInf);
    }

    #[test]
    fn add_examples() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        let eps = f.eps_fp();
        assert_eq!(f.to_rational(eps).unwrap(), q(1, 16));
        // 1 (+) eps = 1 by ties-to-even
        assert_eq!(f.add(one, eps), one);
        // twenty ones saturate at 2^(M+1) = 16
        let sum = f.sum_left_assoc(std::iter::repeat(one).take(20));
        assert_eq!(f.to_rational(sum).unwrap(), q(16, 1));
        // inf (+) 0 = inf
        assert_eq!(f.add(Fp::PosInf, Fp::zero()), Fp::PosInf);
        assert_eq!(f.sub(Fp::NegInf, Fp::zero()), Fp::NegInf);
        assert_eq!(f.add(Fp::PosInf, Fp::NegInf), Fp::Nan);
        // omega + (-omega) = 0 exactly
        assert_eq!(f.add(f.omega(), f.omega().neg()), Fp::zero());
        // empty sum convention
        assert_eq!(f.sum_left_assoc(std::iter::empty()), Fp::zero());
    }

    #[test]
    fn mul_examples() {
        let f = e5m3();
        assert_eq!(f.mul(Fp::zero(), Fp::PosInf), Fp::Nan);
        assert_eq!(f.mul(Fp::NegInf, f.parse_fp("+:0:8").unwrap()), Fp::NegInf);
        let x = f.parse_fp("+:0:12").unwrap(); // 1.5
        let y = f.parse_fp("-:-1:10").unwrap(); // -0.625
        let z = f.mul(x, y);
        assert_eq!(f.to_rational(z).unwrap(), q(-15, 16)); // exact product
    }

    #[test]
    fn addition_not_associative_witness() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        let eps = f.eps_fp();
        let l = f.add(f.add(one, eps), one.neg());
        let r = f.add(one, f.add(eps, one.neg()));
        assert_eq!(l, Fp::zero());
        assert_eq!(f.to_rational(r).unwrap(), q(1, 16));
        assert_ne!(l, r);
    }

    #[test]
    fn commutativity_exhaustive_sample() {
        let f = e5m3();
        // stride over the universe to keep this quick but broad
        let n = f.finite_count();
        for i in (0..n).step_by(7) {
            for j in (0..n).step_by(11) {
                let (x, y) = (f.from_index(i), f.from_index(j));
                assert_eq!(f.add(x, y), f.add(y, x));
                assert_eq!(f.mul(x, y), f.mul(y, x));
            }
        }
    }

    #[test]
    fn succ_pred_examples() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        assert_eq!(f.to_rational(f.succ(one).unwrap()).unwrap(), q(9, 8));
        assert_eq!(f.succ(f.max_finite()).unwrap(), Fp::PosInf);
        assert_eq!(f.succ(Fp::zero()).unwrap(), f.omega());
        assert_eq!(f.pred(f.omega()).unwrap(), Fp::zero());
        assert_eq!(f.pred(Fp::zero()).unwrap(), f.omega().neg());
        assert!(f.succ(Fp::PosInf).is_err());
        assert!(f.succ(Fp::Nan).is_err());
        // succ agrees with enumeration order everywhere
        for i in 0..f.finite_count() - 1 {
            assert_eq!(f.succ(f.from_index(i)).unwrap(), f.from_index(i + 1));
        }
    }

    #[test]
    fn decompose_examples() {
        let f = e5m3();
        let x = f.parse_fp("+:0:12").unwrap(); // 1.5
        let d = f.decompose(x).unwrap();
        assert_eq!(d.exp, 0);
        assert_eq!(d.significand, q(3, 2));
        assert_eq!(d.digits, vec![1, 1, 0, 0]);
        let d0 = f.decompose(Fp::zero()).unwrap();
        assert_eq!((d0.exp, d0.digits.clone()), (-14, vec![0, 0, 0, 0]));
        let dw = f.decompose(f.omega()).unwrap();
        assert_eq!(dw.exp, -14);
        assert_eq!(dw.significand, q(1, 8));
        assert_eq!(dw.digits, vec![0, 0, 0, 1]);
        assert!(f.decompose(Fp::PosInf).is_err());
    }

    #[test]
    fn enumerate_counts() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        assert_eq!(f.enumerate(one.neg(), one).unwrap().len(), 241);
        assert_eq!(
            f.enumerate(f.max_finite().neg(), f.max_finite()).unwrap().len(),
            495
        );
        assert_eq!(f.enumerate(one, one).unwrap(), vec![one]);
        assert!(f.enumerate(Fp::Nan, one).is_err());
        assert_eq!(
            f.enumerate(Fp::NegInf, Fp::PosInf).unwrap().len() as u64,
            f.finite_count() + 2
        );
    }

    #[test]
    fn parse_display_roundtrip() {
        let f = e5m3();
        for i in (0..f.finite_count()).step_by(3) {
            let x = f.from_index(i);
            assert_eq!(f.parse_fp(&f.display_fp(x)).unwrap(), x);
        }
        for s in ["+inf", "-inf", "nan"] {
            assert_eq!(f.display_fp(f.parse_fp(s).unwrap()), s);
        }
        // non-canonical forms are rejected
        assert!(f.parse_fp("+:1:3").is_err()); // subnormal mantissa above e_min
        assert!(f.parse_fp("-:-14:0").is_err()); // negative zero
        assert!(f.parse_fp("+:99:8").is_err());
    }

    #[test]
    fn round_matches_oracle_exhaustive_midpoints() {
        let f = e5m3();
        // all values, all midpoints, all quarter-points in a band
        for i in 0..f.finite_count() - 1 {
            let x = f.to_rational(f.from_index(i)).unwrap();
            let y = f.to_rational(f.from_index(i + 1)).unwrap();
            let mid = (&x + &y) / BigRational::from_integer(2.into());
            let q1 = (&x + &mid) / BigRational::from_integer(2.into());
            for v in [x, mid, q1, y] {
                assert_eq!(f.round_rational(&v), round_oracle(&f, &v), "at {v}");
            }
        }
    }

    proptest! {
        #[test]
        fn round_matches_oracle_random(n in -200_000i64..200_000, d in 1i64..4096) {
            let f = e5m3();
            let v = q(n, d);
            prop_assert_eq!(f.round_rational(&v), round_oracle(&f, &v));
        }

        #[test]
        fn add_matches_rational_route(i in 0u64..495, j in 0u64..495) {
            let f = e5m3();
            let x = f.from_index(i);
            let y = f.from_index(j);
            let exact = f.to_rational(x).unwrap() + f.to_rational(y).unwrap();
            prop_assert_eq!(f.add(x, y), f.round_rational(&exact));
        }

        #[test]
        fn mul_matches_rational_route(i in 0u64..495, j in 0u64..495) {
            let f = e5m3();
            let x = f.from_index(i);
            let y = f.from_index(j);
            let exact = f.to_rational(x).unwrap() * f.to_rational(y).unwrap();
            prop_assert_eq!(f.mul(x, y), f.round_rational(&exact));
        }

        #[test]
        fn round_idempotent_and_monotone(i in 0u64..495, j in 0u64..495) {
            let f = e5m3();
            let x = f.from_index(i);
            let y = f.from_index(j);
            prop_assert_eq!(f.round_rational(&f.to_rational(x).unwrap()), x);
            if Fp::le(x, y) {
                let rx = f.round_rational(&f.to_rational(x).unwrap());
                let ry = f.round_rational(&f.to_rational(y).unwrap());
                prop_assert!(Fp::le(rx, ry));
            }
        }
    }

    #[test]
    fn rounding_error_bound() {
        // |rnd(x) - x| <= eps * |x| for normal results, <= omega/2 for subnormal
        let f = e5m3();
        let eps = f.eps();
        let half_omega = f.to_rational(f.omega()).unwrap() / BigRational::from_integer(2.into());
        for n in -4000i64..4000 {
            let x = q(3 * n + 1, 4096);
            let r = f.round_rational(&x);
            let Fp::Finite { exp, mant, .. } = r else { continue };
            let err = (f.to_rational(r).unwrap() - &x).abs();
            if mant >= f.mant_lo() || exp > f.e_min() {
                assert!(err <= &eps * x.abs());
            } else {
                assert!(err <= half_omega);
            }
        }
    }
}
