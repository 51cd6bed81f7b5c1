//! Imaginary quadratic discriminants: validity, fundamental parts,
//! reduced forms, class numbers and the elementary norm formulas.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::{factor_u64, isqrt_u64, kronecker};
use crate::error::{Error, Result};

/// Largest |d| accepted; keeps trial division and i64 arithmetic cheap.
pub const MAX_ABS_DISCRIMINANT: i64 = 1 << 32;

/// A negative discriminant, d ≡ 0 or 1 (mod 4).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub struct Discriminant(i64);

impl Discriminant {
    pub fn new(d: i64) -> Result<Self> {
        if d >= 0 || !matches!(d.rem_euclid(4), 0 | 1) {
            return Err(Error::InvalidDiscriminant(d));
        }
        if d < -MAX_ABS_DISCRIMINANT {
            return Err(Error::DiscriminantTooLarge(d));
        }
        Ok(Discriminant(d))
    }

    pub fn value(self) -> i64 {
        self.0
    }

    pub fn abs(self) -> u64 {
        self.0.unsigned_abs()
    }

    pub fn is_fundamental(self) -> bool {
        fundamental_decomposition(self).1 == 1
    }
}

impl TryFrom<i64> for Discriminant {
    type Error = Error;
    fn try_from(d: i64) -> Result<Self> {
        Discriminant::new(d)
    }
}

impl From<Discriminant> for i64 {
    fn from(d: Discriminant) -> i64 {
        d.0
    }
}

impl fmt::Display for Discriminant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A reduced primitive positive definite form a x² + b xy + c y².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReducedForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl ReducedForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }
}

/// Writes d = f²·D with D fundamental.
pub fn fundamental_decomposition(d: Discriminant) -> (Discriminant, u64) {
    let n = d.abs();
    let mut squarefree = 1u64;
    let mut f = 1u64;
    for (q, e) in factor_u64(n) {
        f *= q.pow(e / 2);
        if e % 2 == 1 {
            squarefree *= q;
        }
    }
    let s = -(squarefree as i64);
    if s.rem_euclid(4) == 1 {
        (Discriminant(s), f)
    } else {
        // d = f²·s with s ≡ 2, 3 mod 4 forces 4 | f².
        debug_assert!(f % 2 == 0);
        (Discriminant(4 * s), f / 2)
    }
}

/// All reduced primitive forms of discriminant d, ascending by a then b.
pub fn reduced_forms(d: Discriminant) -> Vec<ReducedForm> {
    let n = d.abs();
    let a_max = isqrt_u64(n / 3) as i64;
    let d = d.value();
    let mut out = Vec::new();
    for a in 1..=a_max {
        for b in (1 - a)..=a {
            if (b - d).rem_euclid(2) != 0 {
                continue;
            }
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (a == c && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) != 1 {
                continue;
            }
            out.push(ReducedForm { a, b, c });
        }
    }
    out
}

pub fn class_number(d: Discriminant) -> usize {
    reduced_forms(d).len()
}

/// Fundamental discriminants D with −4M ≤ D < 0, ascending by |D|.
pub fn fundamental_discriminants(m: u64) -> Vec<Discriminant> {
    (3..=4 * m)
        .filter_map(|n| Discriminant::new(-(n as i64)).ok())
        .filter(|d| d.is_fundamental())
        .collect()
}

/// Fundamental D in [−4M, 0) that are non-squares mod p, i.e. (D/p) = −1.
pub fn valid_fundamental_discriminants(p: &BigUint, m: u64) -> Result<Vec<Discriminant>> {
    let p = BigInt::from(p.clone());
    let mut out = Vec::new();
    for d in fundamental_discriminants(m) {
        if kronecker(&BigInt::from(d.value()), &p)? == -1 {
            out.push(d);
        }
    }
    Ok(out)
}

/// Least norm of an element of the order of discriminant d outside ℤ.
pub fn min_nonint_norm(d: Discriminant) -> u64 {
    let n = d.abs();
    if n % 4 == 0 {
        n / 4
    } else {
        (n + 1) / 4
    }
}

/// ψ(n) = n·∏_{ℓ | n} (1 + 1/ℓ).
pub fn dedekind_psi(n: u64) -> u64 {
    factor_u64(n)
        .into_iter()
        .fold(n, |acc, (q, _)| acc / q * (q + 1))
}

/// Rational upper bound ⌈(2/π)√|d|·2³²⌉/2³² for reports.
pub fn minkowski_bound(d: Discriminant) -> BigRational {
    let scale = (1u64 << 32) as f64;
    let approx = 2.0 / std::f64::consts::PI * (d.abs() as f64).sqrt() * scale;
    // Add a little slack to cover f64 rounding.
    let numer = (approx * (1.0 + 1e-12)).ceil() as u64 + 1;
    BigRational::new(BigInt::from(numer), BigInt::from(1u64 << 32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_integer;
    use proptest::prelude::*;

    fn disc(d: i64) -> Discriminant {
        Discriminant::new(d).unwrap()
    }

    /// Exhaustive count of reduced primitive forms, without the a-bound.
    fn class_number_oracle(d: i64) -> usize {
        let n = -d;
        let mut count = 0;
        for a in 1..=n {
            for b in -a + 1..=a {
                let num = b * b - d;
                if num % (4 * a) != 0 {
                    continue;
                }
                let c = num / (4 * a);
                if c >= a && !(a == c && b < 0) && a.gcd(&b).gcd(&c) == 1 {
                    count += 1;
                }
            }
        }
        count
    }

    fn is_squarefree(n: u64) -> bool {
        factor_u64(n).iter().all(|&(_, e)| e == 1)
    }

    fn fundamental_oracle(d: i64) -> bool {
        let n = -d;
        if d.rem_euclid(4) == 1 {
            return is_squarefree(n as u64);
        }
        n % 4 == 0 && matches!((d / 4).rem_euclid(4), 2 | 3) && is_squarefree((n / 4) as u64)
    }

    #[test]
    fn validation() {
        assert!(Discriminant::new(-3).is_ok());
        assert!(Discriminant::new(-4).is_ok());
        assert!(matches!(Discriminant::new(-5), Err(Error::InvalidDiscriminant(-5))));
        assert!(Discriminant::new(0).is_err());
        assert!(Discriminant::new(5).is_err());
    }

    #[test]
    fn decomposition_examples() {
        assert_eq!(fundamental_decomposition(disc(-4)), (disc(-4), 1));
        assert_eq!(fundamental_decomposition(disc(-16)), (disc(-4), 2));
        assert_eq!(fundamental_decomposition(disc(-28)), (disc(-7), 2));
        assert_eq!(fundamental_decomposition(disc(-63)), (disc(-7), 3));
        assert_eq!(fundamental_decomposition(disc(-72)), (disc(-8), 3));
    }

    #[test]
    fn decomposition_exhaustive() {
        for n in 3..4000i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            let (big_d, f) = fundamental_decomposition(d);
            assert_eq!(big_d.value() * (f * f) as i64, -n);
            assert!(fundamental_oracle(big_d.value()), "{n}");
            assert_eq!(d.is_fundamental(), fundamental_oracle(-n), "{n}");
        }
    }

    #[test]
    fn reduced_form_examples() {
        assert_eq!(reduced_forms(disc(-4)), vec![ReducedForm { a: 1, b: 0, c: 1 }]);
        assert_eq!(reduced_forms(disc(-3)), vec![ReducedForm { a: 1, b: 1, c: 1 }]);
        let f23 = reduced_forms(disc(-23));
        assert_eq!(
            f23,
            vec![
                ReducedForm { a: 1, b: 1, c: 6 },
                ReducedForm { a: 2, b: -1, c: 3 },
                ReducedForm { a: 2, b: 1, c: 3 },
            ]
        );
        for f in &f23 {
            assert_eq!(f.discriminant(), -23);
        }
    }

    #[test]
    fn class_numbers_match_oracle() {
        for n in 3..=1000i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            assert_eq!(class_number(d), class_number_oracle(-n), "d=-{n}");
        }
    }

    #[test]
    fn class_number_conductor_bound() {
        for n in 3..=1000i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            let (big_d, f) = fundamental_decomposition(d);
            assert!(class_number(d) as u64 <= class_number(big_d) as u64 * dedekind_psi(f));
        }
    }

    #[test]
    fn valid_discriminants_large_prime() {
        let p = parse_integer("2^256+297").unwrap();
        let v = valid_fundamental_discriminants(&p, 100).unwrap();
        assert_eq!(v.len(), 62);
        let head: Vec<i64> = v.iter().take(14).map(|d| d.value()).collect();
        assert_eq!(
            head,
            vec![-7, -15, -20, -40, -43, -47, -55, -56, -59, -79, -83, -84, -91, -95]
        );
        assert_eq!(v.last().unwrap().value(), -399);
        let pi = BigInt::from(p);
        for d in &v {
            assert_eq!(kronecker(&BigInt::from(d.value()), &pi).unwrap(), -1);
            assert_eq!(fundamental_decomposition(*d), (*d, 1));
        }
    }

    #[test]
    fn valid_discriminants_small_prime() {
        let v = valid_fundamental_discriminants(&BigUint::from(20011u32), 12).unwrap();
        let vals: Vec<i64> = v.iter().map(|d| d.value()).collect();
        assert_eq!(vals, vec![-4, -7, -11, -20, -24, -35]);
        assert!(valid_fundamental_discriminants(&BigUint::from(20011u32), 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn norms_and_psi() {
        assert_eq!(min_nonint_norm(disc(-4)), 1);
        assert_eq!(min_nonint_norm(disc(-7)), 2);
        assert_eq!(min_nonint_norm(disc(-24)), 6);
        assert_eq!(dedekind_psi(1), 1);
        assert_eq!(dedekind_psi(6), 12);
        assert_eq!(dedekind_psi(8), 12);
    }

    #[test]
    fn min_norm_matches_form_minimum() {
        // The principal form x² + bxy + cy² takes its least value off x-axis at y = 1.
        for n in 3..=4000i64 {
            let Ok(d) = Discriminant::new(-n) else { continue };
            let b = n.rem_euclid(2);
            let c = (b * b + n) / 4;
            let least = (-10..=10).map(|x: i64| x * x + b * x + c).min().unwrap();
            assert_eq!(min_nonint_norm(d) as i64, least, "d=-{n}");
        }
    }

    #[test]
    fn minkowski_is_upper_bound() {
        for n in [3i64, 4, 23, 400, 1_000_000] {
            let b = minkowski_bound(disc(-n));
            let f = (b.numer().to_string().parse::<f64>().unwrap())
                / (b.denom().to_string().parse::<f64>().unwrap());
            assert!(f >= 2.0 / std::f64::consts::PI * (n as f64).sqrt());
        }
    }

    proptest! {
        #[test]
        fn norm_bound_equivalence(n in 3i64..4000, m in 1u64..1000) {
            if let Ok(d) = Discriminant::new(-n) {
                prop_assert_eq!(min_nonint_norm(d) <= m, -4 * m as i64 <= -n);
            }
        }

        #[test]
        fn reduced_forms_satisfy_invariants(n in 3i64..20000) {
            if let Ok(d) = Discriminant::new(-n) {
                let forms = reduced_forms(d);
                prop_assert!(!forms.is_empty());
                for f in forms {
                    prop_assert_eq!(f.discriminant(), -n);
                    prop_assert!(-f.a < f.b && f.b <= f.a && f.a <= f.c);
                    prop_assert!(f.a != f.c || f.b >= 0);
                }
            }
        }
    }
}
