//! Correctly rounded activation functions.
//!
//! Every activation is the rounding of its exact real definition at each
//! float input: rational arithmetic where the value is rational (ReLU,
//! LeakyReLU, identity, ELU on the right), and escalating-precision dyadic
//! enclosures (64 up to 4096 bits) for transcendental values. A value whose
//! rounding the enclosure cannot decide raises a distinct error rather than
//! ever mis-rounding.

use crate::dyadic::{Ctx, Dy, Enc};
use crate::error::Error;
use crate::format::Format;
use crate::fp::Fp;
use crate::interval::{lift_unary, Interval, PieceSpec};
use crate::Result;
use num::{BigInt, BigRational};
use std::cmp::Ordering;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum ActivationKind {
    Relu,
    LeakyRelu,
    Gelu,
    Elu,
    Mish,
    Softplus,
    Sigmoid,
    Tanh,
    Identity,
}

impl ActivationKind {
    pub fn all() -> [ActivationKind; 9] {
        use ActivationKind::*;
        [Relu, LeakyRelu, Gelu, Elu, Mish, Softplus, Sigmoid, Tanh, Identity]
    }

    pub fn name(self) -> &'static str {
        use ActivationKind::*;
        match self {
            Relu => "relu",
            LeakyRelu => "leakyrelu",
            Gelu => "gelu",
            Elu => "elu",
            Mish => "mish",
            Softplus => "softplus",
            Sigmoid => "sigmoid",
            Tanh => "tanh",
            Identity => "identity",
        }
    }

    pub fn parse(s: &str) -> Result<ActivationKind> {
        ActivationKind::all()
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| Error::Parse(format!("unknown activation {s:?}")))
    }

    /// Limits at the infinite inputs, before rounding.
    fn limits(self) -> (LimitValue, LimitValue) {
        use ActivationKind::*;
        use LimitValue::*;
        match self {
            Relu => (Zero, PosInf),
            LeakyRelu => (NegInf, PosInf),
            Gelu => (Zero, PosInf),
            Elu => (MinusOne, PosInf),
            Mish => (Zero, PosInf),
            Softplus => (Zero, PosInf),
            Sigmoid => (Zero, One),
            Tanh => (MinusOne, One),
            Identity => (NegInf, PosInf),
        }
    }
}

enum LimitValue {
    Zero,
    One,
    MinusOne,
    PosInf,
    NegInf,
}

impl LimitValue {
    fn round(&self, fmt: &Format) -> Fp {
        match self {
            LimitValue::Zero => Fp::zero(),
            LimitValue::One => fmt.round_rational(&BigRational::from_integer(1.into())),
            LimitValue::MinusOne => fmt.round_rational(&BigRational::from_integer((-1).into())),
            LimitValue::PosInf => Fp::PosInf,
            LimitValue::NegInf => Fp::NegInf,
        }
    }
}

impl Format {
    fn round_dy(&self, d: &Dy) -> Fp {
        let neg = d.is_negative();
        self.round_dyadic_big(neg, &d.m.clone().max(-d.m.clone()), d.e)
    }

    fn fp_to_dy(&self, x: Fp) -> Dy {
        match x {
            Fp::Finite { neg, exp, mant } => {
                let m = BigInt::from(mant);
                Dy::new(if neg { -m } else { m }, exp as i64 - self.mant_bits() as i64)
            }
            _ => panic!("fp_to_dy on non-finite"),
        }
    }
}

/// Correctly rounded value of `act` at `x`, computed fresh (uncached).
pub fn correctly_rounded(fmt: &Format, act: ActivationKind, x: Fp) -> Result<Fp> {
    match x {
        Fp::Nan => Ok(Fp::Nan),
        Fp::NegInf => Ok(act.limits().0.round(fmt)),
        Fp::PosInf => Ok(act.limits().1.round(fmt)),
        Fp::Finite { .. } => rounded_finite(fmt, act, x),
    }
}

fn rounded_finite(fmt: &Format, act: ActivationKind, x: Fp) -> Result<Fp> {
    use ActivationKind::*;
    let nonneg = x.signum() > 0 || x.is_zero();
    // exact rational paths
    match act {
        Identity => return Ok(x),
        Relu => return Ok(if nonneg { x } else { Fp::zero() }),
        LeakyRelu => {
            if nonneg {
                return Ok(x);
            }
            let r = fmt.to_rational(x).unwrap() / BigRational::from_integer(100.into());
            return Ok(fmt.round_rational(&r));
        }
        Elu if nonneg => return Ok(x),
        Gelu | Mish | Tanh if x.is_zero() => return Ok(Fp::zero()),
        Softplus if x.is_zero() => {} // ln 2, irrational
        Sigmoid if x.is_zero() => {
            return Ok(fmt.round_rational(&BigRational::new(1.into(), 2.into())));
        }
        _ => {}
    }
    // escalating enclosure evaluation
    let xd = fmt.fp_to_dy(x);
    for p in [64u32, 128, 256, 512, 1024, 2048, 4096] {
        let enc = enclosure(act, &xd, p);
        let lo = fmt.round_dy(&enc.lo);
        let hi = fmt.round_dy(&enc.hi);
        if lo == hi {
            return Ok(lo);
        }
    }
    Err(Error::RoundingUndecided(
        format!("{}({})", act.name(), x),
        4096,
    ))
}

/// An enclosure of the exact real activation value at a finite input.
fn enclosure(act: ActivationKind, x: &Dy, p: u32) -> Enc {
    use ActivationKind::*;
    let c = Ctx::new(p);
    let xe = Enc::point(x.clone());
    match act {
        Identity | Relu | LeakyRelu => unreachable!("exact paths"),
        Sigmoid => sigmoid_enc(&c, &xe),
        Tanh => tanh_enc(&c, &xe),
        Softplus => softplus_enc(&c, &xe),
        Elu => {
            // x < 0 here: e^x - 1
            if far_below(x, p) {
                Enc {
                    lo: Dy::from_int(-1),
                    hi: Dy::from_int(-1).add_exact(&tiny(p)),
                }
            } else {
                c.sub(&c.exp(&xe), &Enc::from_int(1))
            }
        }
        Gelu => gelu_enc(&c, &xe),
        Mish => {
            let sp = softplus_enc(&c, &xe);
            let t = tanh_enc(&c, &sp);
            c.mul(&xe, &t)
        }
    }
}

fn tiny(p: u32) -> Dy {
    Dy::new(BigInt::from(1), -(p as i64) - 2)
}

/// `x <= -(p + 4)`: asymptotic regime for the saturating activations.
fn far_below(x: &Dy, p: u32) -> bool {
    x.cmp_dy(&Dy::from_int(-(p as i64) - 4)) != Ordering::Greater
}

fn far_above(x: &Dy, p: u32) -> bool {
    x.cmp_dy(&Dy::from_int(p as i64 + 4)) != Ordering::Less
}

fn sigmoid_enc(c: &Ctx, x: &Enc) -> Enc {
    let lo = sigmoid_point(c, &x.lo, false);
    let hi = sigmoid_point(c, &x.hi, true);
    Enc { lo, hi }
}

fn sigmoid_point(c: &Ctx, x: &Dy, up: bool) -> Dy {
    // 0 < sigmoid(x) < e^x for x < 0; 1 - e^(-x) < sigmoid(x) < 1 for x > 0
    if far_below(x, c.p) {
        return if up { tiny(c.p) } else { Dy::zero() };
    }
    if far_above(x, c.p) {
        return if up {
            Dy::from_int(1)
        } else {
            Dy::from_int(1).sub_exact(&tiny(c.p))
        };
    }
    let e = c.exp(&Enc::point(x.neg()));
    let r = c.div(&Enc::from_int(1), &c.add(&Enc::from_int(1), &e));
    if up {
        r.hi
    } else {
        r.lo
    }
}

fn tanh_enc(c: &Ctx, x: &Enc) -> Enc {
    let lo = tanh_point(c, &x.lo, false);
    let hi = tanh_point(c, &x.hi, true);
    Enc { lo, hi }
}

fn tanh_point(c: &Ctx, x: &Dy, up: bool) -> Dy {
    if x.is_zero() {
        return Dy::zero();
    }
    if far_above(&x.shift(1), c.p) {
        return if up {
            Dy::from_int(1)
        } else {
            Dy::from_int(1).sub_exact(&tiny(c.p))
        };
    }
    if far_below(&x.shift(1), c.p) {
        return if up {
            Dy::from_int(-1).add_exact(&tiny(c.p))
        } else {
            Dy::from_int(-1)
        };
    }
    // (e^2x - 1) / (e^2x + 1)
    let t = c.exp(&Enc::point(x.shift(1)));
    let r = c.div(
        &c.sub(&t, &Enc::from_int(1)),
        &c.add(&t, &Enc::from_int(1)),
    );
    if up {
        r.hi
    } else {
        r.lo
    }
}

fn softplus_enc(c: &Ctx, x: &Enc) -> Enc {
    let lo = softplus_point(c, &x.lo, false);
    let hi = softplus_point(c, &x.hi, true);
    Enc { lo, hi }
}

fn softplus_point(c: &Ctx, x: &Dy, up: bool) -> Dy {
    // 0 < softplus(x) < e^x for x < -1; x < softplus(x) < x + e^(-x) for x > 1
    if far_below(x, c.p) {
        return if up { tiny(c.p) } else { Dy::zero() };
    }
    if far_above(x, c.p) {
        return if up { x.add_exact(&tiny(c.p)) } else { x.clone() };
    }
    let t = c.exp(&Enc::point(x.clone()));
    let r = c.ln(&c.add(&Enc::from_int(1), &t));
    if up {
        r.hi
    } else {
        r.lo
    }
}

fn gelu_enc(c: &Ctx, x: &Enc) -> Enc {
    // x * (1 + erf(x / sqrt 2)) / 2, via the exact Gaussian CDF
    let s2 = c.sqrt(&Enc::from_int(2));
    let z = c.div(x, &s2);
    let e = c.erf(&z);
    let phi2 = c.add(&Enc::from_int(1), &e);
    let r = c.mul(x, &phi2);
    Enc {
        lo: r.lo.shift(-1),
        hi: r.hi.shift(-1),
    }
}

/// A fully tabulated activation over one format: values at every finite
/// float plus the two infinite limits, with the turning points of the
/// rounded function for exact interval lifting.
#[derive(Clone, Debug)]
pub struct SigmaTable {
    pub fmt: Format,
    pub name: String,
    values: Vec<Fp>,
    at_neg_inf: Fp,
    at_pos_inf: Fp,
    piece_spec: PieceSpec,
}

/// Largest universe we are willing to tabulate.
pub const MAX_TABULATED: u64 = 1 << 22;

impl SigmaTable {
    pub fn from_fn(
        fmt: &Format,
        name: &str,
        f: impl Fn(Fp) -> Result<Fp>,
        at_neg_inf: Fp,
        at_pos_inf: Fp,
    ) -> Result<SigmaTable> {
        if fmt.finite_count() > MAX_TABULATED {
            return Err(Error::InvalidFormat(format!(
                "{fmt} is too large to tabulate an activation over"
            )));
        }
        let n = fmt.finite_count();
        let mut values = Vec::with_capacity(n as usize);
        for i in 0..n {
            values.push(f(fmt.from_index(i))?);
        }
        let piece_spec = compute_piece_spec(fmt, &values);
        Ok(SigmaTable {
            fmt: *fmt,
            name: name.to_string(),
            values,
            at_neg_inf,
            at_pos_inf,
            piece_spec,
        })
    }

    pub fn eval(&self, x: Fp) -> Fp {
        match x {
            Fp::Nan => Fp::Nan,
            Fp::NegInf => self.at_neg_inf,
            Fp::PosInf => self.at_pos_inf,
            f => self.values[self.fmt.index_of(f).unwrap() as usize],
        }
    }

    pub fn piece_spec(&self) -> &PieceSpec {
        &self.piece_spec
    }

    pub fn is_monotone(&self) -> bool {
        matches!(self.piece_spec, PieceSpec::Monotone)
    }

    /// Exact image extrema over an interval.
    pub fn lift(&self, iv: &Interval) -> Interval {
        lift_unary(&self.fmt, &|x| self.eval(x), &self.piece_spec, iv)
    }

    /// Exhaustively confirm the piece description against enumeration.
    pub fn audit(&self) -> Result<()> {
        crate::interval::audit_lift(&self.fmt, &|x| self.eval(x), &self.piece_spec)
    }
}

/// Turning points of a tabulated function: floats where the direction of
/// travel flips, making the function monotone between consecutive entries.
fn compute_piece_spec(fmt: &Format, values: &[Fp]) -> PieceSpec {
    #[derive(PartialEq, Clone, Copy)]
    enum Dir {
        Flat,
        Up,
        Down,
    }
    let mut breaks = Vec::new();
    let mut dir = Dir::Flat;
    for i in 0..values.len() - 1 {
        let step = match Fp::partial_cmp_total(values[i], values[i + 1]) {
            Some(Ordering::Less) => Dir::Up,
            Some(Ordering::Greater) => Dir::Down,
            Some(Ordering::Equal) => continue,
            None => continue, // NaN entries are not produced by activations
        };
        match (dir, step) {
            (Dir::Flat, s) => dir = s,
            (Dir::Up, Dir::Down) | (Dir::Down, Dir::Up) => {
                breaks.push(fmt.from_index(i as u64));
                dir = step;
            }
            _ => {}
        }
    }
    if breaks.is_empty() {
        PieceSpec::Monotone
    } else {
        PieceSpec::Breakpoints(breaks)
    }
}

type Cache = Mutex<HashMap<(Format, ActivationKind), Arc<SigmaTable>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The tabulated correctly rounded activation for a format, cached
/// process-wide. Errors on formats too large to tabulate and on undecidable
/// roundings.
pub fn rounded_table(fmt: &Format, act: ActivationKind) -> Result<Arc<SigmaTable>> {
    if let Some(t) = cache().lock().unwrap().get(&(*fmt, act)) {
        return Ok(t.clone());
    }
    let table = SigmaTable::from_fn(
        fmt,
        act.name(),
        |x| correctly_rounded(fmt, act, x),
        act.limits().0.round(fmt),
        act.limits().1.round(fmt),
    )?;
    let arc = Arc::new(table);
    cache()
        .lock()
        .unwrap()
        .insert((*fmt, act), arc.clone());
    Ok(arc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e5m3() -> Format {
        Format::new(5, 3).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn exact_paths() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        assert_eq!(correctly_rounded(&f, ActivationKind::Relu, one.neg()).unwrap(), Fp::zero());
        assert_eq!(correctly_rounded(&f, ActivationKind::Relu, one).unwrap(), one);
        assert_eq!(correctly_rounded(&f, ActivationKind::Identity, Fp::PosInf).unwrap(), Fp::PosInf);
        // relu at -inf rounds the limit 0
        assert_eq!(correctly_rounded(&f, ActivationKind::Relu, Fp::NegInf).unwrap(), Fp::zero());
        assert_eq!(correctly_rounded(&f, ActivationKind::Sigmoid, Fp::NegInf).unwrap(), Fp::zero());
        assert_eq!(
            f.to_rational(correctly_rounded(&f, ActivationKind::Sigmoid, Fp::PosInf).unwrap()).unwrap(),
            q(1, 1)
        );
        assert_eq!(correctly_rounded(&f, ActivationKind::Tanh, Fp::Nan).unwrap(), Fp::Nan);
    }

    #[test]
    fn anchor_values() {
        let f = e5m3();
        let one = f.parse_fp("+:0:8").unwrap();
        // gelu(1) = 0.841344... rounds to 0.8125 at E5M3
        let g = correctly_rounded(&f, ActivationKind::Gelu, one).unwrap();
        assert_eq!(f.to_rational(g).unwrap(), q(13, 16));
        // sigmoid(1) = 0.731058... rounds to 0.75
        let s = correctly_rounded(&f, ActivationKind::Sigmoid, one).unwrap();
        assert_eq!(f.to_rational(s).unwrap(), q(3, 4));
        // tanh(1) = 0.761594... rounds to 0.75
        let t = correctly_rounded(&f, ActivationKind::Tanh, one).unwrap();
        assert_eq!(f.to_rational(t).unwrap(), q(3, 4));
        // softplus(1) = 1.313261... rounds to 1.375 (above the 1.3125 midpoint)
        let p = correctly_rounded(&f, ActivationKind::Softplus, one).unwrap();
        assert_eq!(f.to_rational(p).unwrap(), q(11, 8));
        // mish(1) = 0.865098... rounds to 0.875
        let m = correctly_rounded(&f, ActivationKind::Mish, one).unwrap();
        assert_eq!(f.to_rational(m).unwrap(), q(7, 8));
        // sigmoid(0) = 0.5 exactly
        let z = correctly_rounded(&f, ActivationKind::Sigmoid, Fp::zero()).unwrap();
        assert_eq!(f.to_rational(z).unwrap(), q(1, 2));
        // elu(-1) = e^-1 - 1 = -0.632... rounds to -0.625
        let e = correctly_rounded(&f, ActivationKind::Elu, one.neg()).unwrap();
        assert_eq!(f.to_rational(e).unwrap(), q(-5, 8));
    }

    #[test]
    fn saturation_far_out() {
        let f = e5m3();
        let big = f.max_finite();
        assert_eq!(
            f.to_rational(correctly_rounded(&f, ActivationKind::Sigmoid, big).unwrap()).unwrap(),
            q(1, 1)
        );
        assert_eq!(
            correctly_rounded(&f, ActivationKind::Sigmoid, big.neg()).unwrap(),
            Fp::zero()
        );
        assert_eq!(
            f.to_rational(correctly_rounded(&f, ActivationKind::Tanh, big.neg()).unwrap()).unwrap(),
            q(-1, 1)
        );
        // softplus(Omega) = Omega + tiny rounds back to Omega
        assert_eq!(
            correctly_rounded(&f, ActivationKind::Softplus, big).unwrap(),
            big
        );
        assert_eq!(
            f.to_rational(correctly_rounded(&f, ActivationKind::Elu, big.neg()).unwrap()).unwrap(),
            q(-1, 1)
        );
        // gelu(-Omega) collapses to zero
        assert_eq!(
            correctly_rounded(&f, ActivationKind::Gelu, big.neg()).unwrap(),
            Fp::zero()
        );
        assert_eq!(
            correctly_rounded(&f, ActivationKind::Mish, big.neg()).unwrap(),
            Fp::zero()
        );
        assert_eq!(correctly_rounded(&f, ActivationKind::Gelu, big).unwrap(), big);
    }

    #[test]
    fn tables_and_monotonicity() {
        let f = e5m3();
        use ActivationKind::*;
        for k in [Relu, LeakyRelu, Softplus, Sigmoid, Tanh, Identity, Elu] {
            let t = rounded_table(&f, k).unwrap();
            assert!(t.is_monotone(), "{} should be monotone over F", k.name());
        }
        for k in [Gelu, Mish] {
            let t = rounded_table(&f, k).unwrap();
            assert!(!t.is_monotone(), "{} dips below zero", k.name());
        }
    }

    #[test]
    fn piece_specs_audit_exhaustively() {
        let f = e5m3();
        for k in ActivationKind::all() {
            rounded_table(&f, k).unwrap().audit().unwrap();
        }
    }

    #[test]
    fn sampled_values_match_256bit_enclosures() {
        let f = e5m3();
        use ActivationKind::*;
        for k in [Gelu, Mish, Softplus, Sigmoid, Tanh, Elu] {
            let t = rounded_table(&f, k).unwrap();
            for i in (0..f.finite_count()).step_by(17) {
                let x = f.from_index(i);
                if matches!(k, Elu) && x.signum() > 0 {
                    continue;
                }
                if x.is_zero() {
                    continue;
                }
                let enc = enclosure(k, &f.fp_to_dy(x), 256);
                let lo = f.round_dy(&enc.lo);
                let hi = f.round_dy(&enc.hi);
                assert_eq!(lo, hi, "256-bit enclosure must separate candidates at {x}");
                assert_eq!(t.eval(x), lo);
            }
        }
    }

    #[test]
    fn lift_rounded_sigmoid_at_zero() {
        let f = e5m3();
        let t = rounded_table(&f, ActivationKind::Sigmoid).unwrap();
        let iv = Interval::singleton(Fp::zero()).unwrap();
        let half = f.round_rational(&q(1, 2));
        assert_eq!(t.lift(&iv), Interval::Pair(half, half));
    }
}
