//! Residues modulo an odd prime in Montgomery form.
//!
//! Every residue is a fixed array of [`LIMBS`] 64-bit words, but the
//! arithmetic only touches the `n` low limbs the modulus actually needs,
//! so a 15-bit prime costs one word operation and a 257-bit prime five.

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Residues of primes below 2^320 fit.
pub const LIMBS: usize = 5;

/// A residue in Montgomery form. Only meaningful together with the
/// [`FpCtx`] that produced it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp(pub(crate) [u64; LIMBS]);

/// Montgomery context for a fixed odd prime.
#[derive(Clone, Debug)]
pub struct FpCtx {
    p: BigUint,
    n: usize,
    modulus: [u64; LIMBS],
    /// -p^{-1} mod 2^64
    inv: u64,
    r2: [u64; LIMBS],
    one: Fp,
}

#[inline(always)]
fn mac(a: u64, b: u64, c: u64, carry: u64) -> (u64, u64) {
    let t = (a as u128) + (b as u128) * (c as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

#[inline(always)]
fn adc(a: u64, b: u64, carry: u64) -> (u64, u64) {
    let t = (a as u128) + (b as u128) + (carry as u128);
    (t as u64, (t >> 64) as u64)
}

fn to_limbs(x: &BigUint) -> [u64; LIMBS] {
    let mut out = [0u64; LIMBS];
    for (i, d) in x.to_u64_digits().into_iter().enumerate() {
        out[i] = d;
    }
    out
}

fn from_limbs(x: &[u64]) -> BigUint {
    let mut bytes = Vec::with_capacity(x.len() * 8);
    for limb in x {
        bytes.extend_from_slice(&limb.to_le_bytes());
    }
    BigUint::from_bytes_le(&bytes)
}

impl FpCtx {
    /// Builds the context. The caller vouches for primality; only oddness
    /// and size are checked here.
    pub fn new(p: &BigUint) -> Result<Self> {
        if p.bits() > (64 * LIMBS) as u64 - 1 || p < &BigUint::from(3u32) || !p.bit(0) {
            return Err(Error::InvalidPrime(p.to_string()));
        }
        let n = p.bits().div_ceil(64) as usize;
        let modulus = to_limbs(p);
        let mut inv = 1u64;
        for _ in 0..63 {
            inv = inv.wrapping_mul(inv);
            inv = inv.wrapping_mul(modulus[0]);
        }
        let inv = inv.wrapping_neg();
        let r2 = to_limbs(&((BigUint::one() << (128 * n)) % p));
        let r1 = to_limbs(&((BigUint::one() << (64 * n)) % p));
        Ok(FpCtx {
            p: p.clone(),
            n,
            modulus,
            inv,
            r2,
            one: Fp(r1),
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.p
    }

    pub fn limbs(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn zero(&self) -> Fp {
        Fp([0; LIMBS])
    }

    #[inline]
    pub fn one(&self) -> Fp {
        self.one
    }

    #[inline]
    pub fn is_zero(&self, a: &Fp) -> bool {
        a.0[..self.n].iter().all(|&w| w == 0)
    }

    fn geq_modulus(&self, t: &[u64]) -> bool {
        for i in (0..self.n).rev() {
            if t[i] != self.modulus[i] {
                return t[i] > self.modulus[i];
            }
        }
        true
    }

    fn sub_modulus(&self, t: &mut [u64]) {
        let mut borrow = 0u64;
        for i in 0..self.n {
            let (d, b1) = t[i].overflowing_sub(self.modulus[i]);
            let (d, b2) = d.overflowing_sub(borrow);
            t[i] = d;
            borrow = (b1 | b2) as u64;
        }
    }

    #[inline]
    pub fn add(&self, a: &Fp, b: &Fp) -> Fp {
        let mut out = [0u64; LIMBS];
        let mut carry = 0;
        for i in 0..self.n {
            let (s, c) = adc(a.0[i], b.0[i], carry);
            out[i] = s;
            carry = c;
        }
        if carry != 0 || self.geq_modulus(&out) {
            self.sub_modulus(&mut out);
        }
        Fp(out)
    }

    #[inline]
    pub fn sub(&self, a: &Fp, b: &Fp) -> Fp {
        let mut out = [0u64; LIMBS];
        let mut borrow = 0u64;
        for i in 0..self.n {
            let (d, b1) = a.0[i].overflowing_sub(b.0[i]);
            let (d, b2) = d.overflowing_sub(borrow);
            out[i] = d;
            borrow = (b1 | b2) as u64;
        }
        if borrow != 0 {
            let mut carry = 0;
            for i in 0..self.n {
                let (s, c) = adc(out[i], self.modulus[i], carry);
                out[i] = s;
                carry = c;
            }
        }
        Fp(out)
    }

    #[inline]
    pub fn neg(&self, a: &Fp) -> Fp {
        self.sub(&self.zero(), a)
    }

    #[inline]
    pub fn double(&self, a: &Fp) -> Fp {
        self.add(a, a)
    }

    /// Montgomery product (CIOS).
    #[inline]
    pub fn mul(&self, a: &Fp, b: &Fp) -> Fp {
        let n = self.n;
        let mut t = [0u64; LIMBS + 2];
        for i in 0..n {
            let mut carry = 0;
            for j in 0..n {
                let (lo, hi) = mac(t[j], a.0[j], b.0[i], carry);
                t[j] = lo;
                carry = hi;
            }
            let (s, c) = adc(t[n], carry, 0);
            t[n] = s;
            t[n + 1] = c;

            let m = t[0].wrapping_mul(self.inv);
            let (_, mut carry) = mac(t[0], m, self.modulus[0], 0);
            for j in 1..n {
                let (lo, hi) = mac(t[j], m, self.modulus[j], carry);
                t[j - 1] = lo;
                carry = hi;
            }
            let (s, c) = adc(t[n], carry, 0);
            t[n - 1] = s;
            t[n] = t[n + 1] + c;
        }
        let mut out = [0u64; LIMBS];
        out[..n].copy_from_slice(&t[..n]);
        if t[n] != 0 || self.geq_modulus(&out) {
            self.sub_modulus(&mut out);
        }
        Fp(out)
    }

    #[inline]
    pub fn square(&self, a: &Fp) -> Fp {
        self.mul(a, a)
    }

    pub fn from_biguint(&self, x: &BigUint) -> Fp {
        let reduced = if x >= &self.p { x % &self.p } else { x.clone() };
        self.mul(&Fp(to_limbs(&reduced)), &Fp(self.r2))
    }

    pub fn from_u64(&self, x: u64) -> Fp {
        self.from_biguint(&BigUint::from(x))
    }

    pub fn from_i64(&self, x: i64) -> Fp {
        let v = self.from_u64(x.unsigned_abs());
        if x < 0 {
            self.neg(&v)
        } else {
            v
        }
    }

    /// Canonical limbs of the integer lift in `[0, p)`.
    pub fn canonical(&self, a: &Fp) -> [u64; LIMBS] {
        let mut unit = [0u64; LIMBS];
        unit[0] = 1;
        self.mul(a, &Fp(unit)).0
    }

    pub fn to_biguint(&self, a: &Fp) -> BigUint {
        from_limbs(&self.canonical(a)[..self.n])
    }

    pub fn pow(&self, base: &Fp, e: &BigUint) -> Fp {
        let mut acc = self.one;
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, base);
            }
        }
        acc
    }

    pub fn inv(&self, a: &Fp) -> Result<Fp> {
        if self.is_zero(a) {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(a, &(&self.p - 2u32)))
    }

    /// Legendre symbol of a residue.
    pub fn legendre(&self, a: &Fp) -> i8 {
        if self.is_zero(a) {
            return 0;
        }
        let e = (&self.p - 1u32) >> 1;
        if self.pow(a, &e) == self.one {
            1
        } else {
            -1
        }
    }

    /// Square root with the smaller integer lift, or `None` for non-residues.
    pub fn sqrt(&self, a: &Fp) -> Option<Fp> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if self.legendre(a) != 1 {
            return None;
        }
        let p_minus_1 = &self.p - 1u32;
        let s = p_minus_1.trailing_zeros().unwrap_or(0);
        let q = &p_minus_1 >> s;
        let mut z = self.from_u64(2);
        while self.legendre(&z) != -1 {
            z = self.add(&z, &self.one);
        }
        let mut m = s;
        let mut c = self.pow(&z, &q);
        let mut t = self.pow(a, &q);
        let mut r = self.pow(a, &((&q + 1u32) >> 1));
        while t != self.one {
            let mut i = 0u64;
            let mut t2 = t;
            while t2 != self.one {
                t2 = self.square(&t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.square(&b);
            }
            m = i;
            c = self.square(&b);
            t = self.mul(&t, &c);
            r = self.mul(&r, &b);
        }
        let other = self.neg(&r);
        if self.lift_lt(&other, &r) {
            Some(other)
        } else {
            Some(r)
        }
    }

    /// Compares integer lifts.
    pub fn lift_cmp(&self, a: &Fp, b: &Fp) -> std::cmp::Ordering {
        let ca = self.canonical(a);
        let cb = self.canonical(b);
        ca.iter().rev().cmp(cb.iter().rev())
    }

    fn lift_lt(&self, a: &Fp, b: &Fp) -> bool {
        self.lift_cmp(a, b) == std::cmp::Ordering::Less
    }

    pub fn from_canonical(&self, limbs: &[u64; LIMBS]) -> Fp {
        self.mul(&Fp(*limbs), &Fp(self.r2))
    }

    pub fn is_one(&self, a: &Fp) -> bool {
        *a == self.one
    }

    pub fn characteristic_is_small(&self) -> bool {
        self.p.bits() < 64 && !self.p.is_zero()
    }
}
