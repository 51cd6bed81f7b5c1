//! Dense univariate polynomials over F_{p^2}, with root counting and
//! complete root extraction in F_{p^2}.

use std::cmp::Ordering;

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::arith::{FieldCtx, Fp2};
use crate::error::{Error, Result};

/// Coefficients low-to-high; the leading coefficient is nonzero unless the
/// polynomial is zero (empty vector).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Fp2>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Fp2) -> Self {
        Poly::from_coeffs(vec![c])
    }

    pub fn one(ctx: &FieldCtx) -> Self {
        Poly::constant(ctx.one())
    }

    /// The monomial x.
    pub fn x(ctx: &FieldCtx) -> Self {
        Poly::from_coeffs(vec![ctx.zero(), ctx.one()])
    }

    pub fn from_coeffs(mut coeffs: Vec<Fp2>) -> Self {
        while coeffs.last().is_some_and(|c| *c == Fp2::default()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// Monic polynomial with the given roots (repeats allowed).
    pub fn from_roots(ctx: &FieldCtx, roots: &[Fp2]) -> Self {
        let mut acc = Poly::one(ctx);
        for r in roots {
            let lin = Poly::from_coeffs(vec![ctx.neg(r), ctx.one()]);
            acc = acc.mul(ctx, &lin);
        }
        acc
    }

    pub fn coeffs(&self) -> &[Fp2] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Fp2> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> Fp2 {
        self.coeffs.get(i).copied().unwrap_or_default()
    }

    pub fn add(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| ctx.add(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn sub(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        Poly::from_coeffs(
            (0..n)
                .map(|i| ctx.sub(&self.coeff(i), &other.coeff(i)))
                .collect(),
        )
    }

    pub fn mul(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![ctx.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Fp2::default() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = ctx.add(&out[i + j], &ctx.mul(a, b));
            }
        }
        Poly::from_coeffs(out)
    }

    pub fn scale(&self, ctx: &FieldCtx, c: &Fp2) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|a| ctx.mul(a, c)).collect())
    }

    /// Scales to leading coefficient one (zero stays zero).
    pub fn monic(&self, ctx: &FieldCtx) -> Poly {
        match self.leading() {
            None => Poly::zero(),
            Some(lc) if ctx.is_one(lc) => self.clone(),
            Some(lc) => self.scale(ctx, &ctx.inv(lc).expect("leading coefficient is nonzero")),
        }
    }

    /// Euclidean division `self = q·divisor + r` with `deg r < deg divisor`.
    pub fn divrem(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<(Poly, Poly)> {
        let dd = divisor.degree().ok_or(Error::DivisionByZero)?;
        let lc_inv = ctx.inv(divisor.leading().unwrap())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly::zero(), self.clone()));
        }
        let mut quot = vec![ctx.zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = ctx.mul(&rem[k + dd], &lc_inv);
            if c == Fp2::default() {
                continue;
            }
            quot[k] = c;
            for (i, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + i] = ctx.sub(&rem[k + i], &ctx.mul(&c, dc));
            }
        }
        rem.truncate(dd);
        Ok((Poly::from_coeffs(quot), Poly::from_coeffs(rem)))
    }

    pub fn rem(&self, ctx: &FieldCtx, divisor: &Poly) -> Result<Poly> {
        Ok(self.divrem(ctx, divisor)?.1)
    }

    /// Monic greatest common divisor (zero iff both inputs are zero).
    pub fn gcd(&self, ctx: &FieldCtx, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(ctx, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(ctx)
    }

    pub fn derivative(&self, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| ctx.mul(c, &ctx.from_i64(i as i64)))
                .collect(),
        )
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &Fp2) -> Fp2 {
        self.coeffs
            .iter()
            .rev()
            .fold(ctx.zero(), |acc, c| ctx.add(&ctx.mul(&acc, x), c))
    }

    /// `self^e mod modulus` by square-and-multiply.
    pub fn powmod(&self, ctx: &FieldCtx, e: &BigUint, modulus: &Poly) -> Result<Poly> {
        let reducer = Reducer::new(ctx, modulus)?;
        let base = reducer.reduce(ctx, self.coeffs.clone());
        let mut acc = reducer.reduce(ctx, vec![ctx.one()]);
        for i in (0..e.bits()).rev() {
            acc = reducer.mulmod(ctx, &acc, &acc);
            if e.bit(i) {
                acc = reducer.mulmod(ctx, &acc, &base);
            }
        }
        Ok(Poly::from_coeffs(acc))
    }

    /// `x^e mod modulus`; multiplying by x is a shift, so this is cheaper
    /// than `powmod` with base x.
    pub fn x_powmod(ctx: &FieldCtx, e: &BigUint, modulus: &Poly) -> Result<Poly> {
        let reducer = Reducer::new(ctx, modulus)?;
        let mut acc = reducer.reduce(ctx, vec![ctx.one()]);
        for i in (0..e.bits()).rev() {
            acc = reducer.mulmod(ctx, &acc, &acc);
            if e.bit(i) {
                let mut shifted = Vec::with_capacity(acc.len() + 1);
                shifted.push(ctx.zero());
                shifted.extend_from_slice(&acc);
                acc = reducer.reduce(ctx, shifted);
            }
        }
        Ok(Poly::from_coeffs(acc))
    }

    /// Coefficientwise Frobenius.
    pub fn frobenius(&self, ctx: &FieldCtx) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| ctx.frobenius(c)).collect())
    }
}

/// Reduction modulo a fixed monic-normalized polynomial.
struct Reducer {
    modulus: Vec<Fp2>,
    lc_inv: Fp2,
    degree: usize,
}

impl Reducer {
    fn new(ctx: &FieldCtx, modulus: &Poly) -> Result<Self> {
        let degree = modulus.degree().ok_or(Error::ZeroModulus)?;
        if degree == 0 {
            return Err(Error::ZeroModulus);
        }
        Ok(Reducer {
            modulus: modulus.coeffs.clone(),
            lc_inv: ctx.inv(modulus.leading().unwrap())?,
            degree,
        })
    }

    fn reduce(&self, ctx: &FieldCtx, mut v: Vec<Fp2>) -> Vec<Fp2> {
        let dd = self.degree;
        while v.len() > dd {
            let top = v.len() - 1;
            let c = ctx.mul(&v[top], &self.lc_inv);
            if c != Fp2::default() {
                let shift = top - dd;
                for (i, mc) in self.modulus.iter().enumerate().take(dd) {
                    v[shift + i] = ctx.sub(&v[shift + i], &ctx.mul(&c, mc));
                }
            }
            v.pop();
        }
        while v.last().is_some_and(|c| *c == Fp2::default()) {
            v.pop();
        }
        v
    }

    fn mulmod(&self, ctx: &FieldCtx, a: &[Fp2], b: &[Fp2]) -> Vec<Fp2> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![ctx.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = ctx.add(&out[i + j], &ctx.mul(x, y));
            }
        }
        self.reduce(ctx, out)
    }
}

/// gcd(x^{p²} − x, f): the product of the distinct linear factors of f.
pub fn split_part(ctx: &FieldCtx, f: &Poly) -> Result<Poly> {
    let deg = f.degree().ok_or(Error::DivisionByZero)?;
    if deg == 0 {
        return Ok(Poly::one(ctx));
    }
    let f = f.monic(ctx);
    let xq = Poly::x_powmod(ctx, ctx.p_squared(), &f)?;
    let diff = xq.sub(ctx, &Poly::x(ctx));
    Ok(f.gcd(ctx, &diff))
}

/// Number of distinct roots of `f` in F_{p²}.
pub fn count_roots_fp2(ctx: &FieldCtx, f: &Poly) -> Result<usize> {
    Ok(split_part(ctx, f)?.degree().unwrap_or(0))
}

/// Number of distinct roots of `f` over the algebraic closure: the degree
/// of its radical. Below the characteristic this is deg f − deg gcd(f, f');
/// otherwise factors of multiplicity divisible by p are deflated through
/// x^p ↦ x and counted recursively.
pub fn distinct_root_count(ctx: &FieldCtx, f: &Poly) -> Result<usize> {
    let deg = f.degree().ok_or(Error::DivisionByZero)?;
    if deg == 0 {
        return Ok(0);
    }
    let df = f.derivative(ctx);
    if df.is_zero() {
        return distinct_root_count(ctx, &pth_root(ctx, f));
    }
    let g = f.gcd(ctx, &df);
    // w: one copy of each factor whose multiplicity is prime to p
    let w = f.divrem(ctx, &g)?.0;
    let mut rest = g;
    loop {
        let y = rest.gcd(ctx, &w);
        if y.degree().unwrap_or(0) == 0 {
            break;
        }
        rest = rest.divrem(ctx, &y)?.0;
    }
    let tail = if rest.degree().unwrap_or(0) == 0 {
        0
    } else {
        distinct_root_count(ctx, &pth_root(ctx, &rest))?
    };
    Ok(w.degree().unwrap_or(0) + tail)
}

/// g with g(x)^p = f(x), for f a polynomial in x^p. On F_{p²} the p-th root
/// of a coefficient is its Frobenius image.
fn pth_root(ctx: &FieldCtx, f: &Poly) -> Poly {
    let p = ctx.p().to_u64_digits()[0] as usize;
    Poly::from_coeffs(f.coeffs().iter().step_by(p).map(|c| ctx.frobenius(c)).collect())
}

/// The distinct roots of `f` in F_{p²}, sorted by integer lifts (a, b).
///
/// Splitting is randomized (seeded by `seed`), but the returned set does
/// not depend on the seed.
pub fn roots_fp2(ctx: &FieldCtx, f: &Poly, seed: u64) -> Result<Vec<Fp2>> {
    let g = split_part(ctx, f)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = (ctx.p_squared() - 1u32) >> 1;
    let mut roots = Vec::with_capacity(g.degree().unwrap_or(0));
    let mut stack = vec![g];
    while let Some(h) = stack.pop() {
        match h.degree() {
            None | Some(0) => continue,
            Some(1) => {
                let h = h.monic(ctx);
                roots.push(ctx.neg(&h.coeff(0)));
            }
            Some(k) => loop {
                let delta = ctx.random(&mut rng);
                let base = Poly::from_coeffs(vec![delta, ctx.one()]);
                let t = base.powmod(ctx, &half, &h)?;
                let d = h.gcd(ctx, &t.sub(ctx, &Poly::one(ctx)));
                let dd = d.degree().unwrap_or(0);
                if dd > 0 && dd < k {
                    let (q, _) = h.divrem(ctx, &d)?;
                    stack.push(d);
                    stack.push(q);
                    break;
                }
            },
        }
    }
    roots.sort_by(|x, y| ctx.cmp(x, y));
    Ok(roots)
}

/// Sorts elements by integer lifts.
pub fn sort_canonical(ctx: &FieldCtx, v: &mut [Fp2]) {
    v.sort_by(|x, y| ctx.cmp(x, y));
}

/// Compares two polynomials coefficientwise by canonical lifts.
pub fn cmp_poly(ctx: &FieldCtx, a: &Poly, b: &Poly) -> Ordering {
    a.coeffs
        .len()
        .cmp(&b.coeffs.len())
        .then_with(|| {
            a.coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| ctx.cmp(x, y))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
}
