//! Small text-rendering helpers for reports.

use num::{BigInt, BigRational, Signed, Zero};

/// Exact decimal rendering of a rational with up to `digits` fraction
/// digits; switches to scientific form when the magnitude is far from 1.
/// Rendering is for reports only and never feeds back into arithmetic.
pub fn rational_to_decimal(r: &BigRational, digits: u32) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigRational::from_integer(10.into());
    // decimal exponent: 10^k <= a < 10^(k+1)
    let mut k: i64 = 0;
    let mut scaled = a.clone();
    let one = BigRational::from_integer(1.into());
    while scaled >= ten {
        scaled /= &ten;
        k += 1;
    }
    while scaled < one {
        scaled *= &ten;
        k -= 1;
    }
    if (-5..=9).contains(&k) {
        // plain form, trimmed
        let scale = BigInt::from(10u32).pow(digits);
        let scaled = (a * BigRational::from_integer(scale.clone())).round().to_integer();
        let s = scaled.to_string();
        let s = format!("{:0>width$}", s, width = (digits + 1) as usize);
        let split = s.len() - digits as usize;
        let (int, frac) = s.split_at(split);
        let frac = frac.trim_end_matches('0');
        let body = if frac.is_empty() {
            int.to_string()
        } else {
            format!("{int}.{frac}")
        };
        format!("{}{}", if neg { "-" } else { "" }, body)
    } else {
        // scientific form with 6 significant digits
        let scale = BigInt::from(10u32).pow(6);
        let mantissa = (scaled * BigRational::from_integer(scale)).round().to_integer();
        let s = mantissa.to_string();
        let (lead, rest) = s.split_at(1);
        let rest = rest.trim_end_matches('0');
        let body = if rest.is_empty() {
            lead.to_string()
        } else {
            format!("{lead}.{rest}")
        };
        format!("{}{}e{}", if neg { "-" } else { "" }, body, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn renders() {
        assert_eq!(rational_to_decimal(&q(0, 1), 6), "0");
        assert_eq!(rational_to_decimal(&q(5, 128), 6), "0.039063");
        assert_eq!(rational_to_decimal(&q(9, 8), 6), "1.125");
        assert_eq!(rational_to_decimal(&q(-61440, 1), 6), "-61440");
        assert_eq!(rational_to_decimal(&q(64, 5), 6), "12.8");
        assert_eq!(rational_to_decimal(&q(1, 131072), 10), "7.629395e-6");
    }
}
