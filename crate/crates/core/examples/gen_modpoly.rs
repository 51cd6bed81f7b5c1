//! Regenerates the embedded classical modular polynomial tables.
//!
//! Φ_ℓ(X, j) = ∏ (X − j_k) over j(ℓτ) and j((τ+b)/ℓ), b = 0..ℓ−1. The power
//! sums of the roots are integer q-series, p_i = j^i(q^ℓ) + ℓ·U_ℓ(j^i), where
//! U_ℓ keeps the exponents divisible by ℓ. Newton's identities give the
//! elementary symmetric functions e_m, and each e_m is rewritten as a
//! polynomial in j by cancelling its principal part. A nonzero remainder
//! aborts the run.
//!
//! Usage: cargo run --release --example gen_modpoly [out_dir]

use std::fs;
use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

const UNBOUNDED: i64 = i64::MAX / 4;

/// Σ coeffs[k]·q^(val+k) + O(q^prec).
#[derive(Clone, Debug)]
struct Series {
    val: i64,
    prec: i64,
    coeffs: Vec<BigInt>,
}

impl Series {
    fn constant(c: i64) -> Self {
        Series {
            val: 0,
            prec: UNBOUNDED,
            coeffs: vec![BigInt::from(c)],
        }
    }

    fn coeff(&self, n: i64) -> BigInt {
        assert!(n < self.prec, "coefficient {n} beyond precision {}", self.prec);
        if n < self.val {
            return BigInt::zero();
        }
        self.coeffs
            .get((n - self.val) as usize)
            .cloned()
            .unwrap_or_default()
    }

    /// Drops leading zeros inside the known range.
    fn trim(mut self) -> Self {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        let lead = lead.min((self.prec - self.val).max(0) as usize);
        self.coeffs.drain(..lead);
        self.val += lead as i64;
        self
    }

    fn mul(&self, other: &Series) -> Series {
        let val = self.val + other.val;
        let prec = (self.val.saturating_add(other.prec)).min(other.val.saturating_add(self.prec));
        let len = (prec - val).max(0) as usize;
        let len = len.min(self.coeffs.len() + other.coeffs.len());
        let mut out = vec![BigInt::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || i >= len {
                continue;
            }
            for (k, b) in other.coeffs.iter().enumerate().take(len - i) {
                out[i + k] += a * b;
            }
        }
        Series {
            val,
            prec,
            coeffs: out,
        }
        .trim()
    }

    fn add_scaled(&self, other: &Series, c: &BigInt) -> Series {
        let val = self.val.min(other.val);
        let prec = self.prec.min(other.prec);
        let top = prec.min(
            (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64),
        );
        let coeffs = (val..top)
            .map(|n| {
                let a = if n >= self.val && n < self.val + self.coeffs.len() as i64 {
                    self.coeffs[(n - self.val) as usize].clone()
                } else {
                    BigInt::zero()
                };
                let b = if n >= other.val && n < other.val + other.coeffs.len() as i64 {
                    &other.coeffs[(n - other.val) as usize] * c
                } else {
                    BigInt::zero()
                };
                a + b
            })
            .collect();
        Series { val, prec, coeffs }.trim()
    }

    /// f(q^l)
    fn subst_pow(&self, l: i64) -> Series {
        let mut coeffs = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                coeffs.extend(std::iter::repeat(BigInt::zero()).take(l as usize - 1));
            }
            coeffs.push(c.clone());
        }
        let prec = if self.prec >= UNBOUNDED {
            UNBOUNDED
        } else {
            (self.prec - 1) * l + 1
        };
        Series {
            val: self.val * l,
            prec,
            coeffs,
        }
    }

    /// Σ c_{ln} qⁿ
    fn u_op(&self, l: i64) -> Series {
        let val = Integer::div_ceil(&self.val, &l);
        let prec = Integer::div_ceil(&self.prec, &l);
        let coeffs = (val..prec)
            .take_while(|n| n * l < self.val + self.coeffs.len() as i64)
            .map(|n| self.coeff(n * l))
            .collect();
        Series { val, prec, coeffs }.trim()
    }

    fn div_exact(&self, m: i64) -> Series {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let (q, r) = c.div_rem(&BigInt::from(m));
                assert!(r.is_zero(), "inexact division in Newton identity");
                q
            })
            .collect();
        Series {
            val: self.val,
            prec: self.prec,
            coeffs,
        }
    }
}

/// j(q) = E4(q)³ / Δ(q) through q^(len−2).
fn j_series(len: usize) -> Series {
    // E4 = 1 + 240 Σ σ3(n) qⁿ
    let mut e4 = vec![BigInt::zero(); len];
    e4[0] = BigInt::one();
    for d in 1..len {
        let d3 = BigInt::from(d as u64).pow(3);
        for n in (d..len).step_by(d) {
            e4[n] += &d3 * 240u32;
        }
    }
    // ∏(1 − qⁿ) by the pentagonal number theorem
    let mut euler = vec![BigInt::zero(); len];
    euler[0] = BigInt::one();
    for k in 1i64.. {
        let g1 = (k * (3 * k - 1) / 2) as usize;
        if g1 >= len {
            break;
        }
        let sign = if k % 2 == 1 { -1 } else { 1 };
        euler[g1] += sign;
        let g2 = g1 + k as usize;
        if g2 < len {
            euler[g2] += sign;
        }
    }
    // inverse power series of the Euler product
    let mut inv = vec![BigInt::zero(); len];
    inv[0] = BigInt::one();
    for n in 1..len {
        let mut s = BigInt::zero();
        for k in 1..=n {
            if !euler[k].is_zero() {
                s -= &euler[k] * &inv[n - k];
            }
        }
        inv[n] = s;
    }
    let ser = |c: Vec<BigInt>, val: i64| Series {
        val,
        prec: val + len as i64,
        coeffs: c,
    };
    let inv = ser(inv, 0);
    let inv3 = inv.mul(&inv).mul(&inv);
    let inv6 = inv3.mul(&inv3);
    let inv12 = inv6.mul(&inv6);
    let inv24 = inv12.mul(&inv12);
    let e4 = ser(e4, 0);
    let num = e4.mul(&e4).mul(&e4);
    let mut j = num.mul(&inv24);
    j.val -= 1;
    j.prec -= 1;
    j
}

/// Dense coefficient matrix c[a][b] of X^a Y^b in Φ_l.
fn modular_polynomial(l: i64, extra: i64) -> Vec<Vec<BigInt>> {
    let n = (l + 1) as usize;
    let target = l * l + l + 1 + extra;
    let len = (l * (target + l + 1) + l + 4) as usize;
    let j = j_series(len);
    let mut jpow = vec![Series::constant(1), j.clone()];
    for i in 2..=n {
        let next = jpow[i - 1].mul(&j);
        jpow.push(next);
    }
    let power_sums: Vec<Series> = (0..=n)
        .map(|i| {
            if i == 0 {
                return Series::constant(0);
            }
            let a = jpow[i].subst_pow(l);
            let b = jpow[i].u_op(l);
            a.add_scaled(&b, &BigInt::from(l))
        })
        .collect();
    let mut e = vec![Series::constant(1)];
    for m in 1..=n {
        let mut acc = Series::constant(0);
        for i in 1..=m {
            let sign = if i % 2 == 1 { 1 } else { -1 };
            let term = e[m - i].mul(&power_sums[i]);
            acc = acc.add_scaled(&term, &BigInt::from(sign));
        }
        e.push(acc.div_exact(m as i64));
    }
    let mut phi = vec![vec![BigInt::zero(); n + 1]; n + 1];
    for (m, em) in e.iter().enumerate() {
        assert!(em.prec >= 1 + extra, "e_{m} known only to q^{}", em.prec);
        let mut rest = em.clone();
        let mut poly = vec![BigInt::zero(); n + 1];
        for k in (0..=n).rev() {
            let c = rest.coeff(-(k as i64));
            if c.is_zero() {
                continue;
            }
            rest = rest.add_scaled(&jpow[k], &-&c);
            poly[k] = c;
        }
        assert!(
            rest.coeffs.iter().all(|c| c.is_zero()),
            "e_{m} is not a polynomial in j"
        );
        let sign = if m % 2 == 0 { 1 } else { -1 };
        for (b, c) in poly.into_iter().enumerate() {
            phi[n - m][b] = c * sign;
        }
    }
    phi
}

fn main() {
    let out_dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data")));
    fs::create_dir_all(&out_dir).expect("create output directory");
    for l in [2i64, 3, 5, 7, 11, 13] {
        let phi = modular_polynomial(l, 8);
        let n = phi.len();
        let mut text = String::new();
        for a in 0..n {
            for b in 0..=a {
                assert_eq!(phi[a][b], phi[b][a], "Φ_{l} is not symmetric at ({a},{b})");
                if !phi[a][b].is_zero() {
                    text.push_str(&format!("{a} {b} {}\n", phi[a][b]));
                }
            }
        }
        let path = out_dir.join(format!("phi{l}.txt"));
        fs::write(&path, text).expect("write table");
        let height = phi.iter().flatten().map(|c| c.abs().bits()).max().unwrap_or(0);
        println!("wrote {} (height {height} bits)", path.display());
    }
}
