//! The quadratic extension F_{p^2} = F_p[s]/(s^2 - n), with n the least
//! positive quadratic non-residue mod p.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use rand::Rng;

use super::fp::{Fp, FpCtx, LIMBS};
use super::is_probable_prime;
use crate::error::{Error, Result};

/// An element a + b·s of F_{p^2}, coordinates in Montgomery form.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default)]
pub struct Fp2 {
    pub(crate) a: Fp,
    pub(crate) b: Fp,
}

/// Canonical integer lifts of an F_{p^2} element; orders by (a, b).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct JKey {
    a: [u64; LIMBS],
    b: [u64; LIMBS],
}

impl Ord for JKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.a
            .iter()
            .rev()
            .cmp(other.a.iter().rev())
            .then_with(|| self.b.iter().rev().cmp(other.b.iter().rev()))
    }
}

impl PartialOrd for JKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl JKey {
    pub fn is_fp(&self) -> bool {
        self.b.iter().all(|&w| w == 0)
    }

    /// Integer lifts (a, b) of a + b·s.
    pub fn coords(&self) -> (BigUint, BigUint) {
        let lift = |w: &[u64; LIMBS]| {
            BigUint::from_bytes_le(&w.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<_>>())
        };
        (lift(&self.a), lift(&self.b))
    }
}

impl std::fmt::Display for JKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (a, b) = self.coords();
        write!(f, "{a}+{b}*s")
    }
}

/// Field context: the prime, its Montgomery data and the fixed non-residue.
#[derive(Clone, Debug)]
pub struct FieldCtx {
    fp: FpCtx,
    p_int: BigInt,
    nonresidue: u64,
    nonresidue_fp: Fp,
    p_squared: BigUint,
}

impl FieldCtx {
    /// Validates `p` (prime, at least 5) and fixes the extension model.
    pub fn new(p: &BigUint) -> Result<Self> {
        if p < &BigUint::from(5u32) || !is_probable_prime(p) {
            return Err(Error::InvalidPrime(p.to_string()));
        }
        let fp = FpCtx::new(p)?;
        let mut n = 2u64;
        while fp.legendre(&fp.from_u64(n)) != -1 {
            n += 1;
        }
        let nonresidue_fp = fp.from_u64(n);
        Ok(FieldCtx {
            p_int: BigInt::from(p.clone()),
            p_squared: p * p,
            fp,
            nonresidue: n,
            nonresidue_fp,
        })
    }

    pub fn fp(&self) -> &FpCtx {
        &self.fp
    }

    pub fn p(&self) -> &BigUint {
        self.fp.modulus()
    }

    pub fn p_int(&self) -> &BigInt {
        &self.p_int
    }

    pub fn p_squared(&self) -> &BigUint {
        &self.p_squared
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    #[inline]
    pub fn zero(&self) -> Fp2 {
        Fp2::default()
    }

    #[inline]
    pub fn one(&self) -> Fp2 {
        Fp2 {
            a: self.fp.one(),
            b: self.fp.zero(),
        }
    }

    pub fn from_fp(&self, a: Fp) -> Fp2 {
        Fp2 {
            a,
            b: self.fp.zero(),
        }
    }

    pub fn from_i64(&self, x: i64) -> Fp2 {
        self.from_fp(self.fp.from_i64(x))
    }

    pub fn from_biguint(&self, x: &BigUint) -> Fp2 {
        self.from_fp(self.fp.from_biguint(x))
    }

    pub fn from_bigint(&self, x: &BigInt) -> Fp2 {
        self.from_biguint(&super::reduce_bigint(x, self.p()))
    }

    /// a + b·s from integer coordinates.
    pub fn from_coords(&self, a: &BigUint, b: &BigUint) -> Fp2 {
        Fp2 {
            a: self.fp.from_biguint(a),
            b: self.fp.from_biguint(b),
        }
    }

    pub fn coords(&self, x: &Fp2) -> (BigUint, BigUint) {
        (self.fp.to_biguint(&x.a), self.fp.to_biguint(&x.b))
    }

    #[inline]
    pub fn is_zero(&self, x: &Fp2) -> bool {
        self.fp.is_zero(&x.a) && self.fp.is_zero(&x.b)
    }

    #[inline]
    pub fn is_one(&self, x: &Fp2) -> bool {
        *x == self.one()
    }

    /// True iff x lies in the prime field.
    pub fn in_fp(&self, x: &Fp2) -> bool {
        self.fp.is_zero(&x.b)
    }

    #[inline]
    pub fn add(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        Fp2 {
            a: self.fp.add(&x.a, &y.a),
            b: self.fp.add(&x.b, &y.b),
        }
    }

    #[inline]
    pub fn sub(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        Fp2 {
            a: self.fp.sub(&x.a, &y.a),
            b: self.fp.sub(&x.b, &y.b),
        }
    }

    #[inline]
    pub fn neg(&self, x: &Fp2) -> Fp2 {
        Fp2 {
            a: self.fp.neg(&x.a),
            b: self.fp.neg(&x.b),
        }
    }

    #[inline]
    pub fn mul(&self, x: &Fp2, y: &Fp2) -> Fp2 {
        let f = &self.fp;
        if f.is_zero(&x.b) && f.is_zero(&y.b) {
            return self.from_fp(f.mul(&x.a, &y.a));
        }
        let ac = f.mul(&x.a, &y.a);
        let bd = f.mul(&x.b, &y.b);
        let cross = f.mul(&f.add(&x.a, &x.b), &f.add(&y.a, &y.b));
        Fp2 {
            a: f.add(&ac, &f.mul(&bd, &self.nonresidue_fp)),
            b: f.sub(&f.sub(&cross, &ac), &bd),
        }
    }

    #[inline]
    pub fn square(&self, x: &Fp2) -> Fp2 {
        self.mul(x, x)
    }

    /// Multiplication by an element of the prime field.
    #[inline]
    pub fn scale(&self, x: &Fp2, c: &Fp) -> Fp2 {
        Fp2 {
            a: self.fp.mul(&x.a, c),
            b: self.fp.mul(&x.b, c),
        }
    }

    /// The p-power Frobenius a + b·s ↦ a − b·s.
    pub fn frobenius(&self, x: &Fp2) -> Fp2 {
        Fp2 {
            a: x.a,
            b: self.fp.neg(&x.b),
        }
    }

    /// Norm to F_p: a² − n·b².
    pub fn norm(&self, x: &Fp2) -> Fp {
        let f = &self.fp;
        f.sub(
            &f.square(&x.a),
            &f.mul(&self.nonresidue_fp, &f.square(&x.b)),
        )
    }

    pub fn inv(&self, x: &Fp2) -> Result<Fp2> {
        if self.is_zero(x) {
            return Err(Error::DivisionByZero);
        }
        let n_inv = self.fp.inv(&self.norm(x))?;
        Ok(self.scale(&self.frobenius(x), &n_inv))
    }

    pub fn pow(&self, base: &Fp2, e: &BigUint) -> Fp2 {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, base);
            }
        }
        acc
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Fp2 {
        let bytes = (self.p().bits() as usize).div_ceil(8) + 8;
        let mut draw = || {
            let v: Vec<u8> = (0..bytes).map(|_| rng.gen()).collect();
            BigUint::from_bytes_le(&v)
        };
        let a = draw();
        let b = draw();
        self.from_coords(&a, &b)
    }

    pub fn key(&self, x: &Fp2) -> JKey {
        JKey {
            a: self.fp.canonical(&x.a),
            b: self.fp.canonical(&x.b),
        }
    }

    pub fn from_key(&self, k: &JKey) -> Fp2 {
        Fp2 {
            a: self.fp.from_canonical(&k.a),
            b: self.fp.from_canonical(&k.b),
        }
    }

    /// Canonical ordering by integer lifts (a, b).
    pub fn cmp(&self, x: &Fp2, y: &Fp2) -> Ordering {
        self.key(x).cmp(&self.key(y))
    }

    /// Decimal rendering `a+b*s`.
    pub fn display(&self, x: &Fp2) -> String {
        let (a, b) = self.coords(x);
        format!("{a}+{b}*s")
    }

    /// Parses the `a+b*s` rendering (a bare integer is accepted too).
    pub fn parse(&self, text: &str) -> Result<Fp2> {
        let t = text.trim();
        let (a, b) = match t.split_once('+') {
            Some((a, rest)) => {
                let b = rest
                    .strip_suffix("*s")
                    .ok_or_else(|| Error::Parse(format!("bad element {text}")))?;
                (a, b)
            }
            None => (t, "0"),
        };
        let parse = |s: &str| -> Result<BigUint> {
            s.trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad element {text}")))
        };
        Ok(self.from_coords(&parse(a)?, &parse(b)?))
    }
}
