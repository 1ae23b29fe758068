//! Arbitrary-precision dyadic interval arithmetic.
//!
//! Values are `m * 2^e` with a big-integer mantissa; enclosures are `[lo, hi]`
//! pairs with outward rounding at a working precision. This is the engine
//! behind correctly rounded activation functions: a real value is evaluated
//! to an enclosure that is tightened until both ends round to the same float.

use num::{BigInt, One, Signed, Zero};
use std::cmp::Ordering;

/// An exact dyadic rational `m * 2^e`.
#[derive(Clone, Debug)]
pub struct Dy {
    pub m: BigInt,
    pub e: i64,
}

impl Dy {
    pub fn zero() -> Dy {
        Dy {
            m: BigInt::zero(),
            e: 0,
        }
    }

    pub fn from_int(n: i64) -> Dy {
        Dy {
            m: BigInt::from(n),
            e: 0,
        }
    }

    pub fn new(m: BigInt, e: i64) -> Dy {
        Dy { m, e }
    }

    pub fn is_zero(&self) -> bool {
        self.m.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.m.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.m.is_negative()
    }

    /// Drop trailing zero bits so mantissas stay small.
    fn normalize(mut self) -> Dy {
        if self.m.is_zero() {
            self.e = 0;
            return self;
        }
        let tz = self.m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.m >>= tz;
            self.e += tz as i64;
        }
        self
    }

    pub fn neg(&self) -> Dy {
        Dy {
            m: -&self.m,
            e: self.e,
        }
    }

    pub fn add_exact(&self, other: &Dy) -> Dy {
        if self.m.is_zero() {
            return other.clone();
        }
        if other.m.is_zero() {
            return self.clone();
        }
        let e = self.e.min(other.e);
        let a = &self.m << ((self.e - e) as usize);
        let b = &other.m << ((other.e - e) as usize);
        Dy { m: a + b, e }.normalize()
    }

    pub fn sub_exact(&self, other: &Dy) -> Dy {
        self.add_exact(&other.neg())
    }

    pub fn mul_exact(&self, other: &Dy) -> Dy {
        Dy {
            m: &self.m * &other.m,
            e: self.e + other.e,
        }
        .normalize()
    }

    pub fn shift(&self, k: i64) -> Dy {
        Dy {
            m: self.m.clone(),
            e: self.e + k,
        }
    }

    pub fn cmp_dy(&self, other: &Dy) -> Ordering {
        self.sub_exact(other).m.sign().cmp(&num::bigint::Sign::NoSign)
    }

    /// `floor(log2 |x|)`; None for zero.
    pub fn log2_floor(&self) -> Option<i64> {
        if self.m.is_zero() {
            None
        } else {
            Some(self.m.bits() as i64 - 1 + self.e)
        }
    }

    /// `|x| < 2^k`; zero counts as below everything.
    pub fn mag_below(&self, k: i64) -> bool {
        self.log2_floor().map(|l| l + 1 <= k).unwrap_or(true)
    }

    pub fn abs(&self) -> Dy {
        Dy {
            m: self.m.abs(),
            e: self.e,
        }
    }

    /// Round toward -inf, keeping at most `p` mantissa bits.
    pub fn floor_to(&self, p: u32) -> Dy {
        self.round_dir(p, false)
    }

    /// Round toward +inf, keeping at most `p` mantissa bits.
    pub fn ceil_to(&self, p: u32) -> Dy {
        self.round_dir(p, true)
    }

    fn round_dir(&self, p: u32, up: bool) -> Dy {
        let bits = self.m.bits();
        if bits <= p as u64 {
            return self.clone();
        }
        let drop = (bits - p as u64) as usize;
        let mask_nonzero = {
            let low: BigInt = &self.m & ((BigInt::one() << drop) - 1);
            !low.is_zero()
        };
        // BigInt shr floors (arithmetic shift), so this is round-toward
        // minus infinity already; bump for the upward direction.
        let mut q: BigInt = &self.m >> drop;
        if up && mask_nonzero {
            q += 1;
        }
        Dy {
            m: q,
            e: self.e + drop as i64,
        }
        .normalize()
    }

    pub fn to_rational(&self) -> num::BigRational {
        let r = num::BigRational::from_integer(self.m.clone());
        r * crate::format::pow2_rational(self.e)
    }
}

/// A closed enclosure `[lo, hi]` of a real number.
#[derive(Clone, Debug)]
pub struct Enc {
    pub lo: Dy,
    pub hi: Dy,
}

impl Enc {
    pub fn point(d: Dy) -> Enc {
        Enc {
            lo: d.clone(),
            hi: d,
        }
    }

    pub fn from_int(n: i64) -> Enc {
        Enc::point(Dy::from_int(n))
    }

    pub fn valid(&self) -> bool {
        self.lo.cmp_dy(&self.hi) != Ordering::Greater
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn neg(&self) -> Enc {
        Enc {
            lo: self.hi.neg(),
            hi: self.lo.neg(),
        }
    }

    /// Width as an upper bound on `hi - lo`, by `floor(log2)`.
    pub fn width_log2(&self) -> Option<i64> {
        let w = self.hi.sub_exact(&self.lo);
        w.log2_floor().map(|l| l + 1)
    }
}

/// Working context: operations round outward to `p` mantissa bits.
#[derive(Clone, Copy)]
pub struct Ctx {
    pub p: u32,
}

impl Ctx {
    pub fn new(p: u32) -> Ctx {
        Ctx { p }
    }

    fn out(&self, lo: Dy, hi: Dy) -> Enc {
        let e = Enc {
            lo: lo.floor_to(self.p),
            hi: hi.ceil_to(self.p),
        };
        debug_assert!(e.valid());
        e
    }

    pub fn add(&self, a: &Enc, b: &Enc) -> Enc {
        self.out(a.lo.add_exact(&b.lo), a.hi.add_exact(&b.hi))
    }

    pub fn sub(&self, a: &Enc, b: &Enc) -> Enc {
        self.add(a, &b.neg())
    }

    pub fn mul(&self, a: &Enc, b: &Enc) -> Enc {
        let c = [
            a.lo.mul_exact(&b.lo),
            a.lo.mul_exact(&b.hi),
            a.hi.mul_exact(&b.lo),
            a.hi.mul_exact(&b.hi),
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for x in &c[1..] {
            if x.cmp_dy(&lo) == Ordering::Less {
                lo = x.clone();
            }
            if x.cmp_dy(&hi) == Ordering::Greater {
                hi = x.clone();
            }
        }
        self.out(lo, hi)
    }

    /// Division; `b` must not contain zero.
    pub fn div(&self, a: &Enc, b: &Enc) -> Enc {
        assert!(!b.contains_zero(), "division by an enclosure of zero");
        let q = |num: &Dy, den: &Dy, up: bool| -> Dy {
            // num/den rounded directionally to p+2 bits
            let extra = self.p as i64 + 2 - (num.m.bits() as i64 - den.m.bits() as i64);
            let sh = extra.max(0) as usize;
            let scaled = &num.m << sh;
            let (mut qi, r) = num::Integer::div_rem(&scaled, &den.m);
            // div_rem truncates toward zero
            let exact = r.is_zero();
            let qneg = qi.is_negative() || (qi.is_zero() && (num.m.is_negative() != den.m.is_negative()) && !exact);
            if !exact {
                if up && !qneg {
                    qi += 1;
                } else if !up && qneg {
                    qi -= 1;
                }
            }
            Dy {
                m: qi,
                e: num.e - den.e - sh as i64,
            }
            .normalize()
        };
        let c = [
            (a.lo.clone(), b.lo.clone()),
            (a.lo.clone(), b.hi.clone()),
            (a.hi.clone(), b.lo.clone()),
            (a.hi.clone(), b.hi.clone()),
        ];
        let lows: Vec<Dy> = c.iter().map(|(n, d)| q(n, d, false)).collect();
        let highs: Vec<Dy> = c.iter().map(|(n, d)| q(n, d, true)).collect();
        let mut lo = lows[0].clone();
        for x in &lows[1..] {
            if x.cmp_dy(&lo) == Ordering::Less {
                lo = x.clone();
            }
        }
        let mut hi = highs[0].clone();
        for x in &highs[1..] {
            if x.cmp_dy(&hi) == Ordering::Greater {
                hi = x.clone();
            }
        }
        self.out(lo, hi)
    }

    /// Division by a positive integer, directed outward. Much cheaper than
    /// the general enclosure division; used by the series loops.
    pub fn div_int(&self, a: &Enc, k: i64) -> Enc {
        assert!(k > 0);
        let q = |x: &Dy, up: bool| -> Dy {
            if x.m.is_zero() {
                return Dy::zero();
            }
            let want = self.p as i64 + 2;
            let sh = (want + 64 - x.m.bits() as i64).max(0) as usize;
            let scaled: BigInt = &x.m << sh;
            let (mut qi, r) = num::Integer::div_rem(&scaled, &BigInt::from(k));
            if !r.is_zero() {
                let neg = x.m.is_negative();
                if up && !neg {
                    qi += 1;
                } else if !up && neg {
                    qi -= 1;
                }
            }
            Dy {
                m: qi,
                e: x.e - sh as i64,
            }
            .normalize()
        };
        self.out(q(&a.lo, false), q(&a.hi, true))
    }

    /// Square root; `a` must be non-negative.
    pub fn sqrt(&self, a: &Enc) -> Enc {
        assert!(!a.lo.is_negative(), "sqrt of a negative enclosure");
        let root = |x: &Dy, up: bool| -> Dy {
            if x.m.is_zero() {
                return Dy::zero();
            }
            // scale to >= 2p+4 bits with an even exponent
            let want = (2 * self.p + 4) as i64;
            let mut sh = (want - x.m.bits() as i64).max(0);
            if (x.e - sh) % 2 != 0 {
                sh += 1;
            }
            let scaled: BigInt = &x.m << (sh as usize);
            let s = scaled.sqrt();
            let exact = (&s * &s) == scaled;
            let m = if up && !exact { &s + 1 } else { s };
            Dy {
                m,
                e: (x.e - sh) / 2,
            }
            .normalize()
        };
        self.out(root(&a.lo, false), root(&a.hi, true))
    }

    /// ln 2, cached per working precision.
    pub fn ln2(&self) -> Enc {
        use std::collections::HashMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<u32, Enc>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().unwrap().get(&self.p) {
            return e.clone();
        }
        let e = self.ln2_uncached();
        cache.lock().unwrap().insert(self.p, e.clone());
        e
    }

    /// ln 2 via 2*atanh(1/3) with exact tail bracketing.
    fn ln2_uncached(&self) -> Enc {
        let prec = self.p + 16;
        let scale = BigInt::one() << (prec as usize);
        let mut acc = BigInt::zero();
        let mut k = 0u32;
        let mut pow = BigInt::from(3u32); // 3^(2k+1)
        let nine = BigInt::from(9u32);
        loop {
            let term = &scale / (&pow * BigInt::from(2 * k + 1));
            if term.is_zero() {
                break;
            }
            acc += term;
            pow *= &nine;
            k += 1;
            assert!(k < 100_000, "ln2 series failed to converge");
        }
        // each floor costs < 1; tail of the true series past truncation is
        // < scale / (3^(2k+1) * (2k+1)) * 9/8 < dropped-term bound + 2
        let lo = Dy {
            m: &acc * 2,
            e: -(prec as i64),
        };
        let hi = Dy {
            m: (&acc + BigInt::from(k + 2)) * 2,
            e: -(prec as i64),
        };
        self.out(lo, hi)
    }

    /// pi, cached per working precision.
    pub fn pi(&self) -> Enc {
        use std::collections::HashMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<u32, Enc>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().unwrap().get(&self.p) {
            return e.clone();
        }
        let e = self.pi_uncached();
        cache.lock().unwrap().insert(self.p, e.clone());
        e
    }

    /// pi via Machin's formula with alternating-series bracketing.
    fn pi_uncached(&self) -> Enc {
        let prec = self.p + 16;
        let atan_inv = |q: u64| -> (BigInt, BigInt) {
            // returns (lower, upper) scaled by 2^prec
            let scale = BigInt::one() << (prec as usize);
            let q2 = BigInt::from(q) * BigInt::from(q);
            let mut pow = BigInt::from(q); // q^(2k+1)
            let mut k = 0u32;
            let mut acc = BigInt::zero();
            let mut err = BigInt::zero();
            loop {
                let term = &scale / (&pow * BigInt::from(2 * k + 1));
                if term.is_zero() {
                    // alternating tail bounded by first dropped term (+1 floor slack)
                    err += 1;
                    break;
                }
                if k % 2 == 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
                err += 1; // floor slack per term
                pow *= &q2;
                k += 1;
                assert!(k < 100_000, "atan series failed to converge");
            }
            // alternating series: truncation error bounded by next term < 1 ulp here
            (&acc - &err - 1, &acc + &err + 1)
        };
        let (l5, h5) = atan_inv(5);
        let (l239, h239) = atan_inv(239);
        let lo = Dy {
            m: l5 * 16 - h239 * 4,
            e: -(prec as i64),
        };
        let hi = Dy {
            m: h5 * 16 - l239 * 4,
            e: -(prec as i64),
        };
        self.out(lo, hi)
    }

    /// sqrt(pi), cached per working precision.
    fn sqrt_pi(&self) -> Enc {
        use std::collections::HashMap;
        use std::sync::{Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<HashMap<u32, Enc>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(e) = cache.lock().unwrap().get(&self.p) {
            return e.clone();
        }
        let e = self.sqrt(&self.pi());
        cache.lock().unwrap().insert(self.p, e.clone());
        e
    }

    /// e^x over an enclosure (monotone).
    pub fn exp(&self, a: &Enc) -> Enc {
        let lo = self.exp_point(&a.lo, false);
        let hi = self.exp_point(&a.hi, true);
        Enc { lo, hi }
    }

    fn exp_point(&self, x: &Dy, up: bool) -> Dy {
        let inner = Ctx::new(self.p + 32);
        // argument reduction x = k*ln2 + r with |r| <= 0.4
        let ln2 = inner.ln2();
        let k: i64 = {
            // k ~ x / ln2; a coarse rational estimate is fine, the residual
            // enclosure is computed exactly below.
            let num = x.to_rational();
            let den = ln2.lo.to_rational();
            let q = num / den;
            let fl = q.floor().to_integer();
            let half = num::BigRational::new(1.into(), 2.into());
            let rounded = if q - num::BigRational::from_integer(fl.clone()) >= half {
                fl + 1
            } else {
                fl
            };
            i64::try_from(&rounded).expect("reduction quotient fits i64")
        };
        let kln2 = inner.mul(&ln2, &Enc::from_int(k));
        let r = inner.sub(&Enc::point(x.clone()), &kln2);
        // Taylor around 0: terms r^i / i!
        let mut sum = Enc::from_int(1);
        let mut term = Enc::from_int(1);
        let mut i: i64 = 1;
        let cut = -(self.p as i64) - 8;
        loop {
            term = inner.mul(&term, &r);
            term = inner.div_int(&term, i);
            sum = inner.add(&sum, &term);
            if i >= 2 && term.lo.mag_below(cut) && term.hi.mag_below(cut) {
                break;
            }
            i += 1;
            assert!(i < 100_000, "exp series failed to converge");
        }
        // remaining terms are geometric with ratio <= |r|/(i+1) <= 1/4,
        // so the tail is below 2^cut * 2
        let tail = Dy {
            m: BigInt::one(),
            e: cut + 1,
        };
        let sum = Enc {
            lo: sum.lo.sub_exact(&tail),
            hi: sum.hi.add_exact(&tail),
        };
        let shifted = Enc {
            lo: sum.lo.shift(k),
            hi: sum.hi.shift(k),
        };
        if up {
            shifted.hi.ceil_to(self.p)
        } else {
            shifted.lo.floor_to(self.p)
        }
    }

    /// Natural log over a strictly positive enclosure (monotone).
    pub fn ln(&self, a: &Enc) -> Enc {
        assert!(a.lo.is_positive(), "ln of a non-positive enclosure");
        let lo = self.ln_point(&a.lo, false);
        let hi = self.ln_point(&a.hi, true);
        Enc { lo, hi }
    }

    fn ln_point(&self, x: &Dy, up: bool) -> Dy {
        let inner = Ctx::new(self.p + 32);
        // reduce: x = m * 2^k with m in [1, 2)
        let k = x.log2_floor().expect("positive");
        let m = Enc::point(x.shift(-k));
        // t = (m-1)/(m+1), ln m = 2 * atanh(t), |t| < 1/3
        let one = Enc::from_int(1);
        let t = inner.div(&inner.sub(&m, &one), &inner.add(&m, &one));
        let t2 = inner.mul(&t, &t);
        let mut sum = t.clone();
        let mut pow = t.clone();
        let mut j: i64 = 1;
        let cut = -(self.p as i64) - 8;
        loop {
            pow = inner.mul(&pow, &t2);
            let term = inner.div_int(&pow, 2 * j + 1);
            sum = inner.add(&sum, &term);
            if term.lo.mag_below(cut) && term.hi.mag_below(cut) {
                // geometric tail, ratio t^2 < 1/9
                let pad = Dy {
                    m: BigInt::one(),
                    e: cut + 1,
                };
                sum = Enc {
                    lo: sum.lo.sub_exact(&pad),
                    hi: sum.hi.add_exact(&pad),
                };
                break;
            }
            j += 1;
            assert!(j < 100_000, "ln series failed to converge");
        }
        let atanh2 = Enc {
            lo: sum.lo.shift(1),
            hi: sum.hi.shift(1),
        };
        let kl = inner.mul(&inner.ln2(), &Enc::from_int(k));
        let r = inner.add(&atanh2, &kl);
        if up {
            r.hi.ceil_to(self.p)
        } else {
            r.lo.floor_to(self.p)
        }
    }

    /// erf over an enclosure (monotone increasing).
    pub fn erf(&self, a: &Enc) -> Enc {
        let lo = self.erf_point(&a.lo, false);
        let hi = self.erf_point(&a.hi, true);
        Enc { lo, hi }
    }

    fn erf_point(&self, z: &Dy, up: bool) -> Dy {
        if z.is_zero() {
            return Dy::zero();
        }
        if z.is_negative() {
            return self.erf_point(&z.neg(), !up).neg();
        }
        // cutoff: for z >= 1, erfc(z) < exp(-z^2) <= 2^(-p-4) once z^2 >= p+4
        let z2_exact = z.mul_exact(z);
        let zbits = z.log2_floor().unwrap_or(0);
        if zbits >= 0 && z2_exact.cmp_dy(&Dy::from_int(self.p as i64 + 4)) != Ordering::Less {
            let one = Dy::from_int(1);
            let lo = Dy {
                m: (BigInt::one() << (self.p as usize)) - 1,
                e: -(self.p as i64),
            };
            return if up { one } else { lo };
        }
        // cancellation guard: the largest Taylor term is ~e^(z^2), and here
        // z^2 < p + 4, so ceil(z^2) guards the lost bits
        let z2_int = z2_exact
            .log2_floor()
            .map(|l| 1i64 << (l + 1).clamp(0, 40))
            .unwrap_or(1);
        let guard = (2 * z2_int + 64).min(1 << 22) as u32;
        let inner = Ctx::new(self.p + guard);
        let ze = Enc::point(z.clone());
        let z2 = inner.mul(&ze, &ze);
        // sum_{n>=0} (-1)^n z^(2n+1) / (n! (2n+1))
        let mut term = ze.clone(); // z^(2n+1)/n!
        let mut sum = term.clone();
        let mut n: i64 = 1;
        loop {
            term = inner.mul(&term, &z2);
            term = inner.div_int(&term, n);
            let contrib = inner.div_int(&term, 2 * n + 1);
            sum = if n % 2 == 1 {
                inner.sub(&sum, &contrib)
            } else {
                inner.add(&sum, &contrib)
            };
            let small = contrib.hi.mag_below(-(self.p as i64) - 8);
            let past_peak = Dy::from_int(n).cmp_dy(&z2.hi) == Ordering::Greater;
            if small && past_peak {
                // alternating from here on: error within last contribution
                let pad = contrib.hi.ceil_to(8);
                let pad = Dy {
                    m: pad.m.abs() + 1,
                    e: pad.e,
                };
                sum = Enc {
                    lo: sum.lo.sub_exact(&pad),
                    hi: sum.hi.add_exact(&pad),
                };
                break;
            }
            n += 1;
            assert!(n < 1_000_000, "erf series failed to converge");
        }
        // multiply by 2/sqrt(pi)
        let spi = inner.sqrt_pi();
        let r = inner.div(&sum, &spi);
        let r = Enc {
            lo: r.lo.shift(1),
            hi: r.hi.shift(1),
        };
        // clamp to [-1, 1]
        let one = Dy::from_int(1);
        let lo = if r.lo.cmp_dy(&one) == Ordering::Greater { one.clone() } else { r.lo };
        let hi = if r.hi.cmp_dy(&one) == Ordering::Greater { one.clone() } else { r.hi };
        if up {
            hi.ceil_to(self.p)
        } else {
            lo.floor_to(self.p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// The true value is known to lie in `[lo, hi]`; a correct, tight
    /// enclosure must overlap that bracket from inside or out.
    fn check_encloses(e: &Enc, lo: BigRational, hi: BigRational) {
        assert!(e.lo.to_rational() <= hi, "enclosure lies above the bracket");
        assert!(e.hi.to_rational() >= lo, "enclosure lies below the bracket");
        assert!(e.valid());
    }

    fn width_below(e: &Enc, log2: i64) {
        let w = e.hi.sub_exact(&e.lo);
        if let Some(l) = w.log2_floor() {
            assert!(l <= log2, "enclosure too wide: 2^{l} > 2^{log2}");
        }
    }

    #[test]
    fn constants() {
        let c = Ctx::new(128);
        // ln2 = 0.69314718055994530941...
        let ln2 = c.ln2();
        check_encloses(&ln2, q(693147180, 1_000_000_000), q(693147181, 1_000_000_000));
        width_below(&ln2, -120);
        // pi = 3.14159265358979...
        let pi = c.pi();
        check_encloses(&pi, q(3141592653, 1_000_000_000), q(3141592654, 1_000_000_000));
        width_below(&pi, -120);
    }

    #[test]
    fn exp_values() {
        let c = Ctx::new(128);
        let e1 = c.exp(&Enc::from_int(1));
        check_encloses(&e1, q(2718281828, 1_000_000_000), q(2718281829, 1_000_000_000));
        width_below(&e1, -110);
        let em1 = c.exp(&Enc::from_int(-1));
        check_encloses(&em1, q(367879441, 1_000_000_000), q(367879442, 1_000_000_000));
        // big argument: e^100 ~ 2.688e43
        let big = c.exp(&Enc::from_int(100));
        assert_eq!(big.lo.log2_floor(), Some(144));
        // zero stays a tight bracket of 1
        let e0 = c.exp(&Enc::from_int(0));
        check_encloses(&e0, q(1, 1), q(1, 1));
        width_below(&e0, -120);
    }

    #[test]
    fn ln_values() {
        let c = Ctx::new(128);
        let l2 = c.ln(&Enc::from_int(2));
        check_encloses(&l2, q(693147180, 1_000_000_000), q(693147181, 1_000_000_000));
        let l10 = c.ln(&Enc::from_int(10));
        check_encloses(&l10, q(2302585092, 1_000_000_000), q(2302585094, 1_000_000_000));
        let l1 = c.ln(&Enc::from_int(1));
        assert!(l1.contains_zero());
        width_below(&l1, -110);
    }

    #[test]
    fn erf_values() {
        let c = Ctx::new(128);
        // erf(1) = 0.842700792949714869...
        let e1 = c.erf(&Enc::from_int(1));
        check_encloses(&e1, q(842700792, 1_000_000_000), q(842700793, 1_000_000_000));
        width_below(&e1, -110);
        // erf(-1) = -erf(1)
        let em = c.erf(&Enc::from_int(-1));
        check_encloses(&em, q(-842700793, 1_000_000_000), q(-842700792, 1_000_000_000));
        // erf(30) rounds to 1 at this precision
        let ebig = c.erf(&Enc::from_int(30));
        assert!(ebig.hi.to_rational() <= q(1, 1));
        assert!(ebig.lo.to_rational() > q(99999, 100000));
    }

    #[test]
    fn sqrt_div() {
        let c = Ctx::new(128);
        let s2 = c.sqrt(&Enc::from_int(2));
        check_encloses(&s2, q(1414213562, 1_000_000_000), q(1414213563, 1_000_000_000));
        width_below(&s2, -110);
        let d = c.div(&Enc::from_int(1), &Enc::from_int(3));
        check_encloses(&d, q(1, 3), q(1, 3));
        width_below(&d, -110);
        let dneg = c.div(&Enc::from_int(-1), &Enc::from_int(3));
        check_encloses(&dneg, q(-1, 3), q(-1, 3));
    }

    #[test]
    fn directed_rounding_is_outward() {
        let c = Ctx::new(16);
        let d = c.div(&Enc::from_int(1), &Enc::from_int(7));
        assert!(d.lo.to_rational() < q(1, 7));
        assert!(d.hi.to_rational() > q(1, 7));
        let s = c.sub(&d.clone(), &d);
        assert!(s.contains_zero());
    }
}
