//! The `(E, M)` parameterization of a floating-point universe and its
//! derived constants.

use crate::error::Error;
use crate::fp::Fp;
use crate::Result;
use num::{BigInt, BigRational, One};
use std::fmt;

/// A floating-point format with an `E`-bit exponent and an `(M+1)`-bit
/// significand. Derived constants are always recomputed from `E` and `M`.
///
/// Standard formats satisfy `E >= 5` and `3 <= M <= 2^(E-1)`; relaxed
/// formats can be constructed for exploration but synthesis refuses them.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Format {
    exp_bits: u32,
    mant_bits: u32,
}

impl Format {
    /// A format satisfying the standing assumptions.
    pub fn new(exp_bits: u32, mant_bits: u32) -> Result<Self> {
        let f = Self::new_permissive(exp_bits, mant_bits)?;
        if !f.is_standard() {
            return Err(Error::InvalidFormat(format!(
                "E{exp_bits}M{mant_bits}: requires E >= 5 and 3 <= M <= 2^(E-1)"
            )));
        }
        Ok(f)
    }

    /// A format with only the structural bounds checked. Synthesis refuses
    /// formats that are not standard.
    pub fn new_permissive(exp_bits: u32, mant_bits: u32) -> Result<Self> {
        if exp_bits < 2 || exp_bits > 24 || mant_bits < 1 || mant_bits > 60 {
            return Err(Error::InvalidFormat(format!(
                "E{exp_bits}M{mant_bits}: exponent bits must be in [2,24], significand fraction bits in [1,60]"
            )));
        }
        Ok(Format {
            exp_bits,
            mant_bits,
        })
    }

    pub fn exp_bits(&self) -> u32 {
        self.exp_bits
    }

    /// `M`: number of fraction bits; significands carry `M+1` bits.
    pub fn mant_bits(&self) -> u32 {
        self.mant_bits
    }

    pub fn is_standard(&self) -> bool {
        self.exp_bits >= 5 && self.mant_bits >= 3 && (self.mant_bits as u64) <= (1u64 << (self.exp_bits - 1))
    }

    /// Smallest exponent, `-2^(E-1) + 2`.
    pub fn e_min(&self) -> i32 {
        -(1i32 << (self.exp_bits - 1)) + 2
    }

    /// Largest exponent, `2^(E-1) - 1`.
    pub fn e_max(&self) -> i32 {
        (1i32 << (self.exp_bits - 1)) - 1
    }

    /// Significand of a normal number lies in `[2^M, 2^(M+1))`.
    pub fn mant_lo(&self) -> u64 {
        1u64 << self.mant_bits
    }

    pub fn mant_hi(&self) -> u64 {
        (1u64 << (self.mant_bits + 1)) - 1
    }

    /// Smallest positive float `omega = 2^(e_min - M)`.
    pub fn omega(&self) -> Fp {
        Fp::finite_unchecked(false, self.e_min(), 1)
    }

    /// Largest finite float `Omega = 2^e_max * (2 - 2^-M)`.
    pub fn max_finite(&self) -> Fp {
        Fp::finite_unchecked(false, self.e_max(), self.mant_hi())
    }

    /// Machine epsilon `2^(-M - 1)` as an exact rational.
    pub fn eps(&self) -> BigRational {
        pow2_rational(-(self.mant_bits as i64) - 1)
    }

    /// Machine epsilon as a float (always representable).
    pub fn eps_fp(&self) -> Fp {
        self.round_pow2(-(self.mant_bits as i32) - 1)
            .expect("eps is representable in every format")
    }

    /// Overflow threshold offset `c = 2^e_max * eps`; rounding maps
    /// `[Omega + c, +inf]` to `+inf`.
    pub fn overflow_c(&self) -> BigRational {
        pow2_rational(self.e_max() as i64 - self.mant_bits as i64 - 1)
    }

    /// `2^k` as a float, when representable.
    pub fn round_pow2(&self, k: i32) -> Option<Fp> {
        let m = self.mant_bits as i32;
        if k >= self.e_min() && k <= self.e_max() {
            Some(Fp::finite_unchecked(false, k, self.mant_lo()))
        } else if k < self.e_min() && k >= self.e_min() - m {
            Some(Fp::finite_unchecked(
                false,
                self.e_min(),
                1u64 << (k - (self.e_min() - m)),
            ))
        } else {
            None
        }
    }

    /// Number of strictly positive finite floats.
    pub fn positive_count(&self) -> u64 {
        let per_binade = 1u64 << self.mant_bits;
        let binades = (self.e_max() - self.e_min()) as u64;
        // e_min binade holds subnormals and normals: 2^(M+1) - 1 values.
        (2 * per_binade - 1) + binades * per_binade
    }

    /// Number of finite floats including zero.
    pub fn finite_count(&self) -> u64 {
        2 * self.positive_count() + 1
    }

    /// Rank of a finite float in the total order, `0` for `-Omega` up to
    /// `finite_count() - 1` for `Omega`.
    pub fn index_of(&self, x: Fp) -> Option<u64> {
        match x {
            Fp::Finite { neg, exp, mant } => {
                let p = self.positive_count();
                if mant == 0 {
                    return Some(p);
                }
                let r = self.positive_rank(exp, mant);
                Some(if neg { p - r } else { p + r })
            }
            _ => None,
        }
    }

    fn positive_rank(&self, exp: i32, mant: u64) -> u64 {
        let m = self.mant_bits;
        if exp == self.e_min() {
            mant
        } else {
            let full = (1u64 << (m + 1)) - 1;
            full + ((exp - self.e_min() - 1) as u64) * (1u64 << m) + (mant - (1u64 << m)) + 1
        }
    }

    /// Inverse of [`Format::index_of`].
    pub fn from_index(&self, idx: u64) -> Fp {
        let p = self.positive_count();
        assert!(idx < self.finite_count(), "index out of range");
        if idx == p {
            return Fp::zero();
        }
        let (neg, r) = if idx > p { (false, idx - p) } else { (true, p - idx) };
        let m = self.mant_bits;
        let full = (1u64 << (m + 1)) - 1;
        if r <= full {
            Fp::finite_unchecked(neg, self.e_min(), r)
        } else {
            let q = r - full - 1;
            let exp = self.e_min() + 1 + (q >> m) as i32;
            let mant = (1u64 << m) + (q & ((1u64 << m) - 1));
            Fp::finite_unchecked(neg, exp, mant)
        }
    }

    /// Every float of `[lo, hi]` in increasing order, including infinite
    /// endpoints. Errors on NaN bounds.
    pub fn enumerate(&self, lo: Fp, hi: Fp) -> Result<Vec<Fp>> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::NanOperand);
        }
        let mut out = Vec::new();
        if Fp::le(lo, hi) {
            if lo == Fp::NegInf {
                out.push(Fp::NegInf);
            }
            let a = match lo {
                Fp::NegInf => 0,
                Fp::PosInf => self.finite_count(),
                f => self.index_of(f).unwrap(),
            };
            let b = match hi {
                Fp::PosInf => self.finite_count(),
                Fp::NegInf => 0,
                f => self.index_of(f).unwrap() + 1,
            };
            for i in a..b {
                out.push(self.from_index(i));
            }
            if hi == Fp::PosInf {
                out.push(Fp::PosInf);
            }
        }
        Ok(out)
    }

    /// Parse a header like `E5M3`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix('E')
            .ok_or_else(|| Error::Parse(format!("format must look like E5M3, got {s:?}")))?;
        let mpos = rest
            .find('M')
            .ok_or_else(|| Error::Parse(format!("format must look like E5M3, got {s:?}")))?;
        let e: u32 = rest[..mpos]
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent bits in {s:?}")))?;
        let m: u32 = rest[mpos + 1..]
            .parse()
            .map_err(|_| Error::Parse(format!("bad significand bits in {s:?}")))?;
        Self::new_permissive(e, m)
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}M{}", self.exp_bits, self.mant_bits)
    }
}

impl fmt::Debug for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{}M{}", self.exp_bits, self.mant_bits)
    }
}

/// `2^k` as an exact rational for any integer `k`.
pub fn pow2_rational(k: i64) -> BigRational {
    let one = BigInt::one();
    if k >= 0 {
        BigRational::new(one << (k as usize), BigInt::one())
    } else {
        BigRational::new(one, BigInt::one() << ((-k) as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e5m3() -> Format {
        Format::new(5, 3).unwrap()
    }

    #[test]
    fn derived_constants() {
        let f = e5m3();
        assert_eq!(f.e_min(), -14);
        assert_eq!(f.e_max(), 15);
        assert_eq!(f.to_rational(f.omega()).unwrap(), pow2_rational(-17));
        // Omega = 61440, c = 2048.
        assert_eq!(
            f.to_rational(f.max_finite()).unwrap(),
            BigRational::from_integer(61440.into())
        );
        assert_eq!(f.overflow_c(), BigRational::from_integer(2048.into()));
        assert_eq!(f.eps(), BigRational::new(1.into(), 16.into()));
    }

    #[test]
    fn census() {
        let f = e5m3();
        assert_eq!(f.finite_count(), 495);
        assert_eq!(f.positive_count(), 247);
    }

    #[test]
    fn index_roundtrip() {
        let f = e5m3();
        for i in 0..f.finite_count() {
            let x = f.from_index(i);
            assert_eq!(f.index_of(x), Some(i));
        }
        // Order agrees with value order.
        let mut prev = f.from_index(0);
        for i in 1..f.finite_count() {
            let x = f.from_index(i);
            assert!(Fp::lt(prev, x), "{prev} !< {x}");
            prev = x;
        }
    }

    #[test]
    fn parse_header() {
        assert_eq!(Format::parse("E5M3").unwrap(), e5m3());
        assert_eq!(Format::parse("E5M10").unwrap(), Format::new(5, 10).unwrap());
        assert!(Format::parse("5M3").is_err());
        assert!(Format::new(4, 3).is_err());
        assert!(Format::new_permissive(4, 3).is_ok());
    }

    #[test]
    fn standardness() {
        assert!(Format::new_permissive(5, 2).is_ok());
        assert!(!Format::new_permissive(5, 2).unwrap().is_standard());
        assert!(Format::new(8, 23).unwrap().is_standard());
    }
}
