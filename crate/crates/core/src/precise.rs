//! Double-double arithmetic.
//!
//! A value is the unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`, giving
//! roughly 106 bits of significand. Only what the closed-form evaluators need
//! is provided: the four field operations, `sqrt`, `ln`, `exp` and `powf`.
//! Potentials such as `2n² ln²n − n ln n [...]` lose eleven or more digits to
//! cancellation at `n ~ 1e5`; evaluating them here keeps ~20 correct digits.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    hi: f64,
    lo: f64,
}

const LN2: DoubleDouble = DoubleDouble {
    hi: std::f64::consts::LN_2,
    lo: 2.3190468138462996e-17,
};

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };

    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn hi(self) -> f64 {
        self.hi
    }

    pub fn lo(self) -> f64 {
        self.lo
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn is_finite(self) -> bool {
        self.hi.is_finite() && self.lo.is_finite()
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Exact multiplication by `2^k`.
    fn ldexp(self, k: i32) -> Self {
        let s = 2f64.powi(k);
        Self {
            hi: self.hi * s,
            lo: self.lo * s,
        }
    }

    pub fn recip(self) -> Self {
        Self::ONE / self
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return if self.hi == 0.0 {
                Self::ZERO
            } else {
                Self::from(f64::NAN)
            };
        }
        let y = Self::from(self.hi.sqrt());
        // one Newton step doubles the number of correct bits
        y + (self - y * y) / (y + y)
    }

    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from(if self.hi == 0.0 {
                f64::NEG_INFINITY
            } else {
                f64::NAN
            });
        }
        // x = m 2^e with m in [1/sqrt2, sqrt2)
        let mut e = self.hi.log2().floor() as i32;
        let mut m = self.ldexp(-e);
        if m.hi > std::f64::consts::SQRT_2 {
            m = m.ldexp(-1);
            e += 1;
        } else if m.hi < std::f64::consts::FRAC_1_SQRT_2 {
            m = m.ldexp(1);
            e -= 1;
        }
        // ln m = 2 atanh(s), s = (m-1)/(m+1), |s| <= 0.172
        let s = (m - Self::ONE) / (m + Self::ONE);
        let s2 = s * s;
        let mut term = s;
        let mut sum = s;
        let mut k = 1.0;
        loop {
            term = term * s2;
            let add = term / Self::from(2.0 * k + 1.0);
            sum = sum + add;
            if add.hi.abs() <= 1e-34 * sum.hi.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            k += 1.0;
        }
        LN2 * Self::from(e as f64) + sum.ldexp(1)
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::ZERO;
        }
        const SQUARINGS: i32 = 10;
        let k = (self.hi / LN2.hi).round();
        let r = (self - LN2 * Self::from(k)).ldexp(-SQUARINGS);
        let mut term = Self::ONE;
        let mut sum = Self::ONE;
        let mut j = 1.0;
        loop {
            term = term * r / Self::from(j);
            sum = sum + term;
            if term.hi.abs() <= 1e-36 {
                break;
            }
            j += 1.0;
        }
        for _ in 0..SQUARINGS {
            sum = sum * sum;
        }
        sum.ldexp(k as i32)
    }

    pub fn powf(self, exponent: f64) -> Self {
        if exponent == 0.0 {
            return Self::ONE;
        }
        if exponent == 1.0 {
            return self;
        }
        (self.ln() * Self::from(exponent)).exp()
    }
}

impl From<f64> for DoubleDouble {
    fn from(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }
}

impl From<u64> for DoubleDouble {
    fn from(n: u64) -> Self {
        // exact for every u64: split into two f64-representable halves
        let hi = (n >> 32) as f64 * 4294967296.0;
        let lo = (n & 0xffff_ffff) as f64;
        Self::new(hi, lo)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let q1 = self.hi / b.hi;
        let r = self - b * Self::from(q1);
        let q2 = r.hi / b.hi;
        let r = r - b * Self::from(q2);
        let q3 = r.hi / b.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from(q3)
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e} + {:e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference values from a 60-digit arbitrary precision evaluation,
    // split as (nearest f64, remainder).
    fn close(x: DoubleDouble, hi: f64, lo: f64, rel: f64) -> bool {
        let r = DoubleDouble::new(hi, lo);
        ((x - r).abs().to_f64() / r.abs().to_f64()) <= rel
    }

    #[test]
    fn logarithms_match_reference() {
        assert!(close(DoubleDouble::from(2.0).ln(), std::f64::consts::LN_2, 2.3190468138462996e-17, 1e-30));
        assert!(close(DoubleDouble::from(3.0).ln(), 1.0986122886681098, -9.07129723500153e-17, 1e-30));
        assert!(close(
            DoubleDouble::from(100000.0).ln(),
            11.512925464970229,
            -1.971996919909995e-16,
            1e-30
        ));
    }

    #[test]
    fn exponentials_match_reference() {
        assert!(close(DoubleDouble::ONE.exp(), std::f64::consts::E, 1.4456468917292502e-16, 1e-29));
        assert!(close(
            DoubleDouble::from(-7.25).exp(),
            0.000710174388842549,
            3.546078199295509e-20,
            1e-29
        ));
        assert!(close(
            DoubleDouble::from(7.0).powf(1.5),
            18.520259177452136,
            -1.7678647854413667e-15,
            1e-29
        ));
    }

    #[test]
    fn sqrt_and_division() {
        assert!(close(DoubleDouble::from(2.0).sqrt(), std::f64::consts::SQRT_2, -9.667293313452913e-17, 1e-31));
        let third = DoubleDouble::ONE / DoubleDouble::from(3.0);
        let back = third * DoubleDouble::from(3.0);
        assert!((back - DoubleDouble::ONE).abs().to_f64() < 1e-31);
    }

    #[test]
    fn cancellation_is_resolved() {
        // (1e16 + 1) - 1e16 is lost in f64 but exact here
        let big = DoubleDouble::from(1e16);
        let x = (big + DoubleDouble::ONE) - big;
        assert_eq!(x.to_f64(), 1.0);
        assert_eq!(DoubleDouble::from(u64::MAX - 1).lo() + DoubleDouble::from(u64::MAX - 1).hi(), (u64::MAX - 1) as f64);
    }

    #[test]
    fn ln_exp_roundtrip() {
        for &x in &[1e-8, 0.3, 1.0, 17.0, 12345.678, 1e12] {
            let d = DoubleDouble::from(x);
            let back = d.ln().exp();
            assert!(((back - d).abs().to_f64() / x) < 1e-28, "x = {x}");
        }
    }
}
