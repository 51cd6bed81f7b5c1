//! Exact integer, prime-field and quadratic-extension arithmetic.
//!
//! Integers live in `num-bigint`; residues mod p use a fixed-width
//! Montgomery representation (see [`fp`]) so that the hot loops of root
//! finding never allocate.

pub mod fp;
pub mod fp2;

pub use fp::{Fp, FpCtx};
pub use fp2::{FieldCtx, Fp2, JKey};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

/// Kronecker symbol (a/n) for odd positive n.
pub fn kronecker(a: &BigInt, n: &BigInt) -> Result<i8> {
    if n.sign() != Sign::Plus || n.is_even() {
        return Err(Error::UnsupportedModulus(n.to_string()));
    }
    let mut n = n.magnitude().clone();
    let mut a = a
        .mod_floor(&BigInt::from_biguint(Sign::Plus, n.clone()))
        .to_biguint()
        .unwrap();
    let mut result = 1i8;
    while !a.is_zero() {
        let tz = a.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            a >>= tz;
            let n8 = (&n % 8u32).to_u32().unwrap();
            if tz % 2 == 1 && (n8 == 3 || n8 == 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if (&a % 4u32) == BigUint::from(3u32) && (&n % 4u32) == BigUint::from(3u32) {
            result = -result;
        }
        a %= &n;
    }
    Ok(if n.is_one() { result } else { 0 })
}

/// Kronecker symbol for a machine-sized top argument.
pub fn kronecker_i64(a: i64, n: &BigInt) -> Result<i8> {
    kronecker(&BigInt::from(a), n)
}

const SMALL_PRIMES: [u32; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn miller_rabin_round(n: &BigUint, n_minus_1: &BigUint, d: &BigUint, s: u64, a: &BigUint) -> bool {
    let mut x = a.modpow(d, n);
    if x.is_one() || &x == n_minus_1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if &x == n_minus_1 {
            return true;
        }
        if x.is_one() {
            return false;
        }
    }
    false
}

/// Miller-Rabin with the first 25 prime bases plus 64 pseudo-random bases
/// (error below 2^-128 for composites that survive the fixed bases).
pub fn is_probable_prime(n: &BigUint) -> bool {
    if n < &BigUint::from(2u32) {
        return false;
    }
    for &sp in SMALL_PRIMES.iter() {
        let sp = BigUint::from(sp);
        if n == &sp {
            return true;
        }
        if (n % &sp).is_zero() {
            return false;
        }
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    for &b in SMALL_PRIMES.iter() {
        if !miller_rabin_round(n, &n_minus_1, &d, s, &BigUint::from(b)) {
            return false;
        }
    }
    // Bases derived from n itself keep the test deterministic.
    let mut seed = [0u8; 32];
    for (i, byte) in n.to_bytes_le().iter().enumerate() {
        seed[i % 32] ^= byte;
    }
    let mut rng = ChaCha20Rng::from_seed(seed);
    let bits = n.bits();
    for _ in 0..64 {
        let mut a = BigUint::from_bytes_le(
            &(0..bits.div_ceil(8)).map(|_| rng.gen::<u8>()).collect::<Vec<_>>(),
        );
        a = a % (n - 3u32) + 2u32;
        if !miller_rabin_round(n, &n_minus_1, &d, s, &a) {
            return false;
        }
    }
    true
}

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in SMALL_PRIMES.iter().take(12) {
        let sp = sp as u64;
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mul(r, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        r
    };
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    // These twelve bases are deterministic for all n < 3.3e24.
    'bases: for &a in SMALL_PRIMES.iter().take(12) {
        let mut x = pow(a as u64, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// All primes `<= n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut k = i * i;
            while k <= n {
                sieve[k] = false;
                k += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| is_p.then_some(k as u64))
        .collect()
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: &BigUint) -> BigUint {
    let mut c = n + 1u32;
    if c <= BigUint::from(2u32) {
        return BigUint::from(2u32);
    }
    if c.is_even() {
        c += 1u32;
    }
    while !is_probable_prime(&c) {
        c += 2u32;
    }
    c
}

/// Trial-division factorization, ascending primes with exponents.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Parses a decimal integer or an expression of the form `2^k+c` / `2^k-c`.
pub fn parse_integer(text: &str) -> Result<BigUint> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if let Some(rest) = t.strip_prefix("2^") {
        let split = rest.find(['+', '-']);
        let (exp, tail) = match split {
            Some(i) => (&rest[..i], &rest[i..]),
            None => (rest, ""),
        };
        let k: u32 = exp
            .parse()
            .map_err(|_| Error::Parse(format!("bad exponent in {text}")))?;
        let base = BigInt::one() << k;
        let value = if tail.is_empty() {
            base
        } else {
            let c: BigInt = tail[1..]
                .parse()
                .map_err(|_| Error::Parse(format!("bad offset in {text}")))?;
            if tail.starts_with('+') {
                base + c
            } else {
                base - c
            }
        };
        return value
            .to_biguint()
            .ok_or_else(|| Error::Parse(format!("{text} is negative")));
    }
    t.parse()
        .map_err(|_| Error::Parse(format!("not an integer: {text}")))
}

/// `x mod m` for a signed machine integer and a big modulus.
pub fn reduce_i64(x: i64, m: &BigUint) -> BigUint {
    let r = BigInt::from(x).mod_floor(&BigInt::from(m.clone()));
    r.to_biguint().unwrap()
}

/// Residue of a big signed integer modulo `m`.
pub fn reduce_bigint(x: &BigInt, m: &BigUint) -> BigUint {
    x.mod_floor(&BigInt::from(m.clone())).to_biguint().unwrap()
}
