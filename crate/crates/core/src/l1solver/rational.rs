//! Best rational approximation under a denominator bound.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::L1Error;

pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

/// Per-coordinate reduced fractions `numerators[i] / denominators[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalVector {
    pub numerators: Vec<i64>,
    pub denominators: Vec<u64>,
    pub max_denominator: u64,
}

impl RationalVector {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators.iter().zip(&self.denominators).map(|(&p, &q)| p as f64 / q as f64).collect()
    }

    /// True when every coordinate equals the given integers exactly.
    pub fn equals_integers(&self, w: &[i64]) -> bool {
        self.len() == w.len() && self.denominators.iter().all(|&q| q == 1) && self.numerators == w
    }

    /// Same fractions, ignoring the bound each side was snapped with.
    pub fn same_values(&self, other: &RationalVector) -> bool {
        self.numerators == other.numerators && self.denominators == other.denominators
    }
}

impl fmt::Display for RationalVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, (p, q)) in self.numerators.iter().zip(&self.denominators).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            if *q == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}/{q}")?;
            }
        }
        write!(f, "]")
    }
}

pub fn snap_to_rational(w: &[f64], max_denominator: u64) -> Result<RationalVector, L1Error> {
    if max_denominator == 0 {
        return Err(L1Error::InvalidDenominator);
    }
    let mut numerators = Vec::with_capacity(w.len());
    let mut denominators = Vec::with_capacity(w.len());
    for &v in w {
        let (p, q) = snap_scalar(v, max_denominator)?;
        numerators.push(p);
        denominators.push(q);
    }
    Ok(RationalVector { numerators, denominators, max_denominator })
}

/// Closest fraction `p/q` to `x` with `1 ≤ q ≤ max_den`, found from the
/// continued-fraction convergents and the last semiconvergent. Works on the
/// exact binary value of `x`.
pub fn snap_scalar(x: f64, max_den: u64) -> Result<(i64, u64), L1Error> {
    if !x.is_finite() {
        return Err(L1Error::NonFinite);
    }
    if max_den == 0 {
        return Err(L1Error::InvalidDenominator);
    }
    if x.abs() >= 2f64.powi(52) {
        if x.abs() >= 9.2e18 {
            return Err(L1Error::NonFinite);
        }
        return Ok((x as i64, 1));
    }
    let negative = x < 0.0;
    let (n0, d0) = exact_fraction(x.abs());
    let (p, q) = limit_denominator(n0, d0, max_den as i128);
    let p = i64::try_from(p).map_err(|_| L1Error::NonFinite)?;
    Ok((if negative { -p } else { p }, q as u64))
}

/// `x = n / d` with `d` a power of two no larger than 2^62; below that
/// resolution the mantissa is rounded, far finer than any useful bound.
fn exact_fraction(x: f64) -> (i128, i128) {
    if x == 0.0 {
        return (0, 1);
    }
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = (bits & ((1u64 << 52) - 1)) as i128;
    let (mant, e) = if exp == 0 { (frac, -1074) } else { (frac | (1i128 << 52), exp - 1075) };
    if e >= 0 {
        return (mant << e, 1);
    }
    let shift = -e;
    if shift <= 62 {
        let g = mant.trailing_zeros().min(shift as u32) as i32;
        (mant >> g, 1i128 << (shift - g))
    } else {
        let drop = shift - 62;
        let n = if drop >= 127 { 0 } else { (mant + (1i128 << (drop - 1).min(126))) >> drop };
        if n == 0 {
            (0, 1)
        } else {
            let g = n.trailing_zeros().min(62) as i32;
            (n >> g, 1i128 << (62 - g))
        }
    }
}

fn limit_denominator(n: i128, d: i128, max_den: i128) -> (i128, i128) {
    if d <= max_den {
        let g = gcd(n, d);
        return (n / g, d / g);
    }
    let (n0, d0) = (n, d);
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let (mut num, mut den) = (n, d);
    loop {
        let a = num / den;
        let q2 = q0 + a * q1;
        if q2 > max_den {
            break;
        }
        let p2 = p0 + a * p1;
        p0 = p1;
        q0 = q1;
        p1 = p2;
        q1 = q2;
        let r = num - a * den;
        num = den;
        den = r;
        if den == 0 {
            break;
        }
    }
    if den == 0 {
        return (p1, q1);
    }
    let k = (max_den - q0) / q1;
    let (bp, bq) = (p0 + k * p1, q0 + k * q1);
    // Compare |p1/q1 - n0/d0| with |bp/bq - n0/d0| exactly.
    let e1 = (p1 * d0 - n0 * q1).abs() * bq;
    let e2 = (bp * d0 - n0 * bq).abs() * q1;
    if e1 <= e2 {
        (p1, q1)
    } else {
        (bp, bq)
    }
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn spec_examples() {
        assert_eq!(snap_scalar(0.333333333, 100).unwrap(), (1, 3));
        assert_eq!(snap_scalar(2.0, 1_000_000).unwrap(), (2, 1));
        assert_eq!(snap_scalar(0.142857142, 10).unwrap(), (1, 7));
        assert_eq!(snap_scalar(-2.5000000001, 1000).unwrap(), (-5, 2));
        assert_eq!(snap_scalar(0.0, 7).unwrap(), (0, 1));
    }

    #[test]
    fn semiconvergent_beats_convergent() {
        // pi with bound 100: 311/99 is a semiconvergent closer than 22/7.
        assert_eq!(snap_scalar(std::f64::consts::PI, 100).unwrap(), (311, 99));
        assert_eq!(snap_scalar(std::f64::consts::PI, 7).unwrap(), (22, 7));
        assert_eq!(snap_scalar(std::f64::consts::PI, 1000).unwrap(), (355, 113));
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(snap_scalar(f64::NAN, 10), Err(L1Error::NonFinite));
        assert_eq!(snap_to_rational(&[1.0], 0), Err(L1Error::InvalidDenominator));
    }

    #[test]
    fn display() {
        let r = snap_to_rational(&[1.0 / 3.0, -4.0], 10).unwrap();
        assert_eq!(r.to_string(), "[1/3, -4]");
        assert!(snap_to_rational(&[3.0, -1.0], 5).unwrap().equals_integers(&[3, -1]));
    }

    fn gcd64(a: i64, b: u64) -> u64 {
        gcd(a as i128, b as i128) as u64
    }

    proptest! {
        #[test]
        fn exact_on_bounded_rationals(p in -100_000i64..100_000, q in 1u64..1000) {
            let x = p as f64 / q as f64;
            let (sp, sq) = snap_scalar(x, 1000).unwrap();
            let g = gcd64(p, q);
            prop_assert_eq!((sp, sq), (p / g as i64, q / g));
            prop_assert!((sp as f64 / sq as f64 - x).abs() <= 1.0 / 1e6);
        }

        #[test]
        fn idempotent_and_reduced(x in -1e3f64..1e3, max_den in 1u64..1_000_000) {
            let (p, q) = snap_scalar(x, max_den).unwrap();
            prop_assert!(q >= 1 && q <= max_den);
            prop_assert_eq!(gcd64(p, q), 1);
            let again = snap_scalar(p as f64 / q as f64, max_den).unwrap();
            prop_assert_eq!(again, (p, q));
        }
    }
}
