//! Fixed-point binary reals and complexes on top of `BigInt`.
//!
//! A value with precision `prec` is the integer mantissa divided by
//! 2^prec. All operands of one operation must share the same precision.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// x·y at precision `prec`.
pub(crate) fn fmul(x: &BigInt, y: &BigInt, prec: u32) -> BigInt {
    (x * y) >> prec
}


pub(crate) fn from_int(n: i64, prec: u32) -> BigInt {
    BigInt::from(n) << prec
}

/// √n for a nonnegative integer n.
pub(crate) fn sqrt_int(n: u64, prec: u32) -> BigInt {
    (BigInt::from(n) << (2 * prec)).sqrt()
}

/// atan(1/n) by its Taylor series.
fn atan_inv(n: u64, prec: u32) -> BigInt {
    let n2 = BigInt::from(n * n);
    let mut power = (BigInt::one() << prec) / n;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        let term = &power / (2 * k + 1);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        power /= &n2;
        k += 1;
    }
    sum
}

/// π = 16·atan(1/5) − 4·atan(1/239).
pub(crate) fn pi(prec: u32) -> BigInt {
    let g = prec + 16;
    (atan_inv(5, g) * 16u32 - atan_inv(239, g) * 4u32) >> 16u32
}

/// ln 2 = 2·Σ 1/((2k+1)·3^(2k+1)).
pub(crate) fn ln2(prec: u32) -> BigInt {
    let g = prec + 16;
    let mut power = (BigInt::one() << g) / 3u32;
    let mut sum = BigInt::zero();
    let mut k = 0u64;
    while !power.is_zero() {
        sum += &power / (2 * k + 1);
        power /= 9u32;
        k += 1;
    }
    (sum * 2u32) >> 16u32
}

/// Complex number with a fixed binary precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigFloatComplex {
    re: BigInt,
    im: BigInt,
    prec: u32,
}

impl BigFloatComplex {
    pub fn zero(prec: u32) -> Self {
        Self::from_parts(BigInt::zero(), BigInt::zero(), prec)
    }

    pub fn one(prec: u32) -> Self {
        Self::from_int(1, prec)
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        Self::from_parts(from_int(n, prec), BigInt::zero(), prec)
    }

    /// Mantissas of the real and imaginary parts at precision `prec`.
    pub fn from_parts(re: BigInt, im: BigInt, prec: u32) -> Self {
        BigFloatComplex { re, im, prec }
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn re_mantissa(&self) -> &BigInt {
        &self.re
    }

    pub fn im_mantissa(&self) -> &BigInt {
        &self.im
    }

    pub fn re_f64(&self) -> f64 {
        to_f64(&self.re, self.prec)
    }

    pub fn im_f64(&self) -> f64 {
        to_f64(&self.im, self.prec)
    }

    /// The same value at a different precision (truncating if lower).
    pub fn with_prec(&self, prec: u32) -> Self {
        let shift = |x: &BigInt| {
            if prec >= self.prec {
                x << (prec - self.prec)
            } else {
                x >> (self.prec - prec)
            }
        };
        Self::from_parts(shift(&self.re), shift(&self.im), prec)
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.prec, other.prec, "precision mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        Self::from_parts(&self.re + &other.re, &self.im + &other.im, self.prec)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        Self::from_parts(&self.re - &other.re, &self.im - &other.im, self.prec)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let p = self.prec;
        let re = (&self.re * &other.re - &self.im * &other.im) >> p;
        let im = (&self.re * &other.im + &self.im * &other.re) >> p;
        Self::from_parts(re, im, p)
    }

    pub fn square(&self) -> Self {
        let p = self.prec;
        let re = (&self.re * &self.re - &self.im * &self.im) >> p;
        let im = (&self.re * &self.im) >> (p - 1);
        Self::from_parts(re, im, p)
    }

    pub fn conj(&self) -> Self {
        Self::from_parts(self.re.clone(), -&self.im, self.prec)
    }

    /// |z|² as a real mantissa.
    pub fn norm_sqr(&self) -> BigInt {
        (&self.re * &self.re + &self.im * &self.im) >> self.prec
    }

    /// Division; `None` if the divisor is zero at this precision.
    pub fn div(&self, other: &Self) -> Option<Self> {
        self.check(other);
        let p = self.prec;
        let den = &other.re * &other.re + &other.im * &other.im;
        if den.is_zero() {
            return None;
        }
        let re = ((&self.re * &other.re + &self.im * &other.im) << p).div_floor(&den);
        let im = ((&self.im * &other.re - &self.re * &other.im) << p).div_floor(&den);
        Some(Self::from_parts(re, im, p))
    }

    /// Multiplication by 2^k (k may be negative).
    pub fn shl(&self, k: i64) -> Self {
        let s = |x: &BigInt| {
            if k >= 0 {
                x << k as u64
            } else {
                x >> (-k) as u64
            }
        };
        Self::from_parts(s(&self.re), s(&self.im), self.prec)
    }

    /// Upper bound on log2|z|, or `None` for zero.
    pub fn log2_bound(&self) -> Option<i64> {
        let m = self.re.abs().max(self.im.abs());
        if m.is_zero() {
            None
        } else {
            Some(m.bits() as i64 + 1 - self.prec as i64)
        }
    }

    /// e^z by halving, a Taylor series, and repeated squaring.
    pub fn exp(&self) -> Self {
        let p = self.prec;
        let s = (p as f64).sqrt() as u32 / 2 + 8;
        let g = p + s + 32;
        let z = self.with_prec(g).shl(-(s as i64));
        let mut term = Self::one(g);
        let mut sum = Self::one(g);
        let mut n = 1i64;
        loop {
            term = term.mul(&z);
            term.re /= n;
            term.im /= n;
            if term.re.is_zero() && term.im.is_zero() {
                break;
            }
            sum = sum.add(&term);
            n += 1;
        }
        for _ in 0..s {
            sum = sum.square();
        }
        sum.with_prec(p)
    }

    /// Nearest integer to the real part together with the distance to it,
    /// as a mantissa.
    pub fn round_real(&self) -> (BigInt, BigInt) {
        round(&self.re, self.prec)
    }
}

/// Nearest integer to a fixed-point real and the absolute residual mantissa.
pub(crate) fn round(x: &BigInt, prec: u32) -> (BigInt, BigInt) {
    let half = BigInt::one() << (prec - 1);
    let n = (x + &half).div_floor(&(BigInt::one() << prec));
    let residual = (x - (&n << prec)).abs();
    (n, residual)
}

pub(crate) fn to_f64(x: &BigInt, prec: u32) -> f64 {
    let shift = x.bits().saturating_sub(60);
    let top: f64 = (x >> shift).to_string().parse().unwrap_or(f64::NAN);
    top * 2f64.powi(shift as i32 - prec as i32)
}
