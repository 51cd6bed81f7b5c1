//! Hilbert class polynomials by complex-analytic evaluation of j at the
//! CM points of reduced forms, with exact rounding and reduction mod p.

mod bigfloat;
mod cache;

pub use bigfloat::BigFloatComplex;
pub use cache::ClassPolyStore;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::arith::{reduce_bigint, FieldCtx};
use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::quadforms::{reduced_forms, Discriminant, ReducedForm};
use bigfloat::{fmul, ln2, pi, sqrt_int};

/// Largest |d| for which the precision heuristic is trusted.
pub const MAX_CLASSPOLY_DISCRIMINANT: u64 = 1_000_000;

/// Extra bits carried by `j_tau` beyond the requested precision.
const J_GUARD_BITS: u32 = 64;

/// A monic integer polynomial whose roots are the CM j-invariants of
/// discriminant d; coefficients low-to-high.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassPolynomial {
    d: Discriminant,
    coeffs: Vec<BigInt>,
}

impl ClassPolynomial {
    pub(crate) fn from_parts(d: Discriminant, coeffs: Vec<BigInt>) -> Self {
        ClassPolynomial { d, coeffs }
    }

    pub fn discriminant(&self) -> Discriminant {
        self.d
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Complex value at `z`, at the precision of `z`.
    pub fn eval_complex(&self, z: &BigFloatComplex) -> BigFloatComplex {
        let p = z.prec();
        self.coeffs.iter().rev().fold(BigFloatComplex::zero(p), |acc, c| {
            acc.mul(z).add(&BigFloatComplex::from_parts(
                c.clone() << p,
                BigInt::zero(),
                p,
            ))
        })
    }
}

/// Euler's product ∏(1 − qⁿ) via the pentagonal number theorem.
fn euler_product(q: &BigFloatComplex) -> BigFloatComplex {
    let p = q.prec();
    let mut sum = BigFloatComplex::one(p);
    let mut qn = q.clone();
    let mut a = q.clone();
    let mut n = 1u64;
    loop {
        if a.log2_bound().is_none() {
            break;
        }
        let pair = a.add(&a.mul(&qn));
        sum = if n % 2 == 1 { sum.sub(&pair) } else { sum.add(&pair) };
        // q^{g(n+1)} = q^{g(n)} · q^{3n+1}
        let q3n = qn.square().mul(&qn);
        a = a.mul(&q3n).mul(q);
        qn = qn.mul(q);
        n += 1;
    }
    sum
}

/// j(τ) at τ = (−b + √d)/(2a), to about `precision_bits` relative bits.
///
/// The result carries `precision_bits + 64` fractional bits.
pub fn j_tau(form: &ReducedForm, precision_bits: u32) -> Result<BigFloatComplex> {
    if precision_bits < 64 {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    let n = form.discriminant().unsigned_abs();
    let g = precision_bits + J_GUARD_BITS + 32;
    let pi_g = pi(g);
    let x = fmul(&pi_g, &sqrt_int(n, g), g) / form.a;
    let theta = -(&pi_g * form.b) / form.a;
    j_from_log_q(x, theta, g, precision_bits + J_GUARD_BITS)
}

/// j(τ) for τ = re + i·im with rational coordinates, im > 0.
pub fn j_at_tau(re: &BigRational, im: &BigRational, precision_bits: u32) -> Result<BigFloatComplex> {
    if precision_bits < 64 {
        return Err(Error::PrecisionTooLow(precision_bits));
    }
    if !im.is_positive() {
        return Err(Error::InvalidParameters("τ must lie in the upper half plane".into()));
    }
    let g = precision_bits + J_GUARD_BITS + 32;
    let two_pi = pi(g) << 1u32;
    let scale = |r: &BigRational| (&two_pi * r.numer()).div_floor(r.denom());
    j_from_log_q(scale(im), scale(re), g, precision_bits + J_GUARD_BITS)
}

/// j at q = e^{−x + iθ} (x ≥ 0 and θ as mantissas at precision g), using
/// j = (1 + 256 t)³/t with t = Δ(2τ)/Δ(τ) = q·(∏(1 − q²ⁿ)/∏(1 − qⁿ))²⁴.
/// q is handled as 2^{−k}·u with 1/2 < |u| ≤ 1 so j keeps relative precision.
fn j_from_log_q(x: BigInt, theta: BigInt, g: u32, out_prec: u32) -> Result<BigFloatComplex> {
    let l2 = ln2(g);
    let k = x.div_floor(&l2);
    let r = &x - &k * &l2;
    let k: i64 = k.try_into().map_err(|_| Error::Internal("exponent overflow".into()))?;
    let u = BigFloatComplex::from_parts(-r, theta, g).exp();
    let q = u.shl(-k);
    let ratio = euler_product(&q.square())
        .div(&euler_product(&q))
        .ok_or_else(|| Error::Internal("Euler product vanished".into()))?;
    let r3 = ratio.square().mul(&ratio);
    let r24 = r3.square().square().square();
    let t_scaled = u.mul(&r24);
    let t = t_scaled.shl(-k);
    let base = BigFloatComplex::one(g).add(&t.shl(8));
    let num = base.square().mul(&base);
    let j = num
        .shl(k)
        .div(&t_scaled)
        .ok_or_else(|| Error::Internal("t vanished".into()))?;
    Ok(j.with_prec(out_prec))
}

/// Initial bit budget: ⌈(π√|d|/ln 2)·Σ 1/a⌉ + 10·h + 64.
pub fn precision_heuristic(d: Discriminant, forms: &[ReducedForm]) -> u32 {
    let inv_sum: f64 = forms.iter().map(|f| 1.0 / f.a as f64).sum();
    let size = std::f64::consts::PI * (d.abs() as f64).sqrt() / std::f64::consts::LN_2 * inv_sum;
    size.ceil() as u32 + 10 * forms.len() as u32 + 64
}

/// Product of (x − j(τ_f)) over the forms, rounded; `None` if some
/// coefficient is not within 1/4 of an integer.
fn class_polynomial_at(forms: &[ReducedForm], bits: u32) -> Result<Option<Vec<BigInt>>> {
    let p = bits + J_GUARD_BITS;
    let mut acc: Vec<BigInt> = vec![BigInt::one() << p];
    let mul_factor = |acc: &Vec<BigInt>, factor: &[BigInt]| {
        // factor is monic, low-to-high, without its leading 1
        let mut out = vec![BigInt::zero(); acc.len() + factor.len()];
        for (i, a) in acc.iter().enumerate() {
            out[i + factor.len()] += a;
            for (k, f) in factor.iter().enumerate() {
                out[i + k] += (a * f) >> p;
            }
        }
        out
    };
    for form in forms {
        if form.b < 0 {
            // conjugate of (a, −b, c), covered there
            continue;
        }
        let j = j_tau(form, bits)?;
        if form.b == 0 || form.b == form.a || form.a == form.c {
            acc = mul_factor(&acc, &[-j.re_mantissa().clone()]);
        } else {
            let tr = -(j.re_mantissa() << 1u32);
            acc = mul_factor(&acc, &[j.norm_sqr(), tr]);
        }
    }
    if acc.len() != forms.len() + 1 {
        return Err(Error::Internal("class polynomial degree mismatch".into()));
    }
    let quarter = BigInt::one() << (p - 2);
    let mut coeffs = Vec::with_capacity(acc.len());
    for c in &acc {
        let (n, residual) = bigfloat::round(c, p);
        if residual >= quarter {
            return Ok(None);
        }
        coeffs.push(n);
    }
    if !coeffs.last().is_some_and(|c| c.is_one()) {
        return Ok(None);
    }
    Ok(Some(coeffs))
}

/// The Hilbert class polynomial of discriminant d with exact integer
/// coefficients. Precision starts at the heuristic and doubles up to three
/// times if rounding is not clean.
pub fn hilbert_class_polynomial(d: Discriminant) -> Result<ClassPolynomial> {
    if d.abs() > MAX_CLASSPOLY_DISCRIMINANT {
        return Err(Error::DiscriminantTooLarge(d.value()));
    }
    let forms = reduced_forms(d);
    let mut bits = precision_heuristic(d, &forms);
    for _ in 0..=3 {
        if let Some(coeffs) = class_polynomial_at(&forms, bits)? {
            return Ok(ClassPolynomial::from_parts(d, coeffs));
        }
        bits *= 2;
    }
    Err(Error::PrecisionFailure {
        d: d.value(),
        bits: bits / 2,
    })
}

/// Coefficientwise reduction mod p.
pub fn class_polynomial_mod_p(h: &ClassPolynomial, ctx: &FieldCtx) -> Poly {
    Poly::from_coeffs(
        h.coeffs
            .iter()
            .map(|c| ctx.from_biguint(&reduce_bigint(c, ctx.p())))
            .collect(),
    )
}

/// Largest absolute coefficient, in bits.
pub fn height_bits(h: &ClassPolynomial) -> u64 {
    h.coeffs.iter().map(|c| c.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_integer;
    use crate::poly::{count_roots_fp2, roots_fp2};
    use crate::quadforms::class_number;
    use num_bigint::BigUint;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    fn coeffs(d: i64) -> Vec<BigInt> {
        hilbert_class_polynomial(disc(d)).unwrap().coeffs().to_vec()
    }

    fn ints(v: &[&str]) -> Vec<BigInt> {
        v.iter().map(|s| s.parse().unwrap()).collect()
    }

    #[test]
    fn j_at_special_points() {
        let j = j_tau(&ReducedForm { a: 1, b: 0, c: 1 }, 200).unwrap();
        let (n, res) = j.round_real();
        assert_eq!(n, BigInt::from(1728));
        assert!(res.bits() + 190 < j.prec() as u64);
        assert!(j.im_mantissa().abs().bits() + 190 < j.prec() as u64);
        let j = j_tau(&ReducedForm { a: 1, b: 1, c: 1 }, 200).unwrap();
        assert!(j.re_mantissa().abs().bits() + 190 < j.prec() as u64);
        assert!(matches!(
            j_tau(&ReducedForm { a: 1, b: 0, c: 1 }, 32),
            Err(Error::PrecisionTooLow(32))
        ));
    }

    #[test]
    fn class_number_one_values() {
        // Classical rational CM j-invariants.
        let table: [(i64, &str); 13] = [
            (-3, "0"),
            (-4, "1728"),
            (-7, "-3375"),
            (-8, "8000"),
            (-11, "-32768"),
            (-12, "54000"),
            (-16, "287496"),
            (-19, "-884736"),
            (-27, "-12288000"),
            (-28, "16581375"),
            (-43, "-884736000"),
            (-67, "-147197952000"),
            (-163, "-262537412640768000"),
        ];
        for (d, j) in table {
            let c = coeffs(d);
            let j: BigInt = j.parse().unwrap();
            assert_eq!(c, vec![-j, BigInt::one()], "d={d}");
        }
    }

    #[test]
    fn small_class_number_polynomials() {
        assert_eq!(coeffs(-15), ints(&["-121287375", "191025", "1"]));
        assert_eq!(coeffs(-20), ints(&["-681472000", "-1264000", "1"]));
        assert_eq!(
            coeffs(-23),
            ints(&["12771880859375", "-5151296875", "3491750", "1"])
        );
    }

    #[test]
    fn orbit_sum_is_real() {
        let d = disc(-71);
        let forms = reduced_forms(d);
        let bits = 200;
        let mut sum = BigFloatComplex::zero(bits + J_GUARD_BITS);
        for f in &forms {
            sum = sum.add(&j_tau(f, bits).unwrap());
        }
        assert!(sum.im_mantissa().abs().bits() < (J_GUARD_BITS + 80) as u64);
    }

    #[test]
    fn roots_re_evaluate_small() {
        let h = hilbert_class_polynomial(disc(-23)).unwrap();
        for f in reduced_forms(disc(-23)) {
            let j = j_tau(&f, 300).unwrap();
            let v = h.eval_complex(&j);
            let bound = v.log2_bound().unwrap_or(i64::MIN);
            assert!(bound < -100, "log2 |H(j)| = {bound}");
        }
    }

    #[test]
    fn degrees_and_reproducibility() {
        for n in 3..=400i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            let h = hilbert_class_polynomial(d).unwrap();
            assert_eq!(h.degree(), class_number(d), "d={d}");
            assert!(h.coeffs().last().unwrap().is_one());
            if n % 97 == 0 {
                assert_eq!(h, hilbert_class_polynomial(d).unwrap());
            }
        }
    }

    #[test]
    fn reduction_examples() {
        let c7 = FieldCtx::new(&BigUint::from(7u32)).unwrap();
        let h4 = class_polynomial_mod_p(&hilbert_class_polynomial(disc(-4)).unwrap(), &c7);
        assert_eq!(h4.coeffs(), &[c7.from_i64(1), c7.one()]);
        let h3 = class_polynomial_mod_p(&hilbert_class_polynomial(disc(-3)).unwrap(), &c7);
        assert_eq!(h3, Poly::x(&c7));
    }

    #[test]
    fn roots_split_in_fp2() {
        let primes = [
            BigUint::from(20011u32),
            BigUint::from(1009u32),
            parse_integer("2^40+15").unwrap(),
        ];
        let ctxs: Vec<FieldCtx> = primes.iter().map(|p| FieldCtx::new(p).unwrap()).collect();
        for n in 3..=400i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            let h = hilbert_class_polynomial(d).unwrap();
            for ctx in &ctxs {
                // Only non-split d have all their CM roots in F_{p²}.
                if crate::arith::kronecker_i64(-n, ctx.p_int()).unwrap() == 1 {
                    continue;
                }
                let f = class_polynomial_mod_p(&h, ctx);
                assert_eq!(f.degree().unwrap(), h.degree());
                assert_eq!(count_roots_fp2(ctx, &f).unwrap(), h.degree(), "d={d} p={}", ctx.p());
                if n % 50 == 3 {
                    let roots = roots_fp2(ctx, &f, 1).unwrap();
                    for r in &roots {
                        assert!(roots.contains(&ctx.frobenius(r)));
                    }
                }
            }
        }
    }

    #[test]
    fn rejects_huge_discriminants() {
        assert!(matches!(
            hilbert_class_polynomial(disc(-1_000_003)),
            Err(Error::DiscriminantTooLarge(_))
        ));
    }
}
