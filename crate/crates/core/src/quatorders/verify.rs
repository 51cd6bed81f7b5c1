//! Random samples of maximal orders and the inequality checks run on them:
//! equality of the two intersection indices, the discriminant bound for
//! two optimally embedded quadratic orders, the distance bound between
//! orders with different small subfields, the prime-to-ℓ distance bound,
//! and existence of a non-integer element of norm ≤ ½p^{2/3} + ¼.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ell_neighbors, min_nonint_element, random_neighbor, order_distance, short_elements, QuaternionAlgebra, QuaternionOrder};
use crate::error::{Error, Result};
use crate::quadforms::{fundamental_decomposition, min_nonint_norm, Discriminant};

/// Length of the sampling walks, 2⌈log₂ p⌉: enough to reach every
/// isomorphism class while keeping coordinates small.
pub fn walk_length(alg: &QuaternionAlgebra) -> usize {
    2 * alg.p().bits() as usize
}

fn random_walk(
    alg: &QuaternionAlgebra,
    start: &QuaternionOrder,
    primes: &[u64],
    max_len: usize,
    rng: &mut ChaCha8Rng,
) -> Result<QuaternionOrder> {
    let mut cur = start.clone();
    for _ in 0..rng.gen_range(1..=max_len) {
        let l = *primes
            .choose(rng)
            .ok_or_else(|| Error::InvalidParameters("empty prime list".into()))?;
        cur = random_neighbor(alg, &cur, l, rng)?;
    }
    Ok(cur)
}

/// `count` maximal orders, each the end of an independent random
/// ℓ-neighbour walk from the standard order with 1 to [`walk_length`] steps.
pub fn sample_orders(alg: &QuaternionAlgebra, count: usize, primes: &[u64], seed: u64) -> Result<Vec<QuaternionOrder>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = alg.standard_maximal_order()?;
    let max_len = walk_length(alg);
    (0..count).map(|_| random_walk(alg, &start, primes, max_len, &mut rng)).collect()
}

/// Walk samples filtered to M-small orders, up to `count` of them within
/// `max_tries` walks.
pub fn sample_small_orders(
    alg: &QuaternionAlgebra,
    count: usize,
    m: u64,
    primes: &[u64],
    max_tries: usize,
    seed: u64,
) -> Result<Vec<QuaternionOrder>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = alg.standard_maximal_order()?;
    let max_len = walk_length(alg);
    let bound = BigInt::from(m);
    let mut out = Vec::new();
    for _ in 0..max_tries {
        if out.len() == count {
            break;
        }
        let o = random_walk(alg, &start, primes, max_len, &mut rng)?;
        if min_nonint_element(alg, &o, &bound)?.is_some() {
            out.push(o);
        }
    }
    Ok(out)
}

/// An optimally embedded quadratic order K ∩ O, identified by the
/// primitive direction of its pure part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmbeddedOrder {
    pub direction: [BigInt; 3],
    pub disc: Discriminant,
}

impl EmbeddedOrder {
    pub fn field(&self) -> Discriminant {
        fundamental_decomposition(self.disc).0
    }
}

fn primitive_direction(v: &[BigRational]) -> [BigInt; 3] {
    let l = v.iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| (x * &l).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, x| a.gcd(x));
    let mut out: [BigInt; 3] = std::array::from_fn(|i| &ints[i] / &g);
    if out.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative()) {
        for x in out.iter_mut() {
            *x = -&*x;
        }
    }
    out
}

/// Quadratic orders optimally embedded in O whose generator has norm ≤ m.
/// The pure part of a generator is primitive in its direction and
/// disc = −4·nrd(pure part).
pub fn embedded_orders(alg: &QuaternionAlgebra, o: &QuaternionOrder, m: u64) -> Result<Vec<EmbeddedOrder>> {
    let mut best: BTreeMap<[BigInt; 3], BigRational> = BTreeMap::new();
    for (a, _) in short_elements(alg, o, &BigInt::from(m))? {
        let v = a.pure();
        let q = alg.nrd(&v);
        let dir = primitive_direction(&v.0[1..]);
        match best.get(&dir) {
            Some(old) if *old <= q => {}
            _ => {
                best.insert(dir, q);
            }
        }
    }
    best.into_iter()
        .map(|(direction, q)| {
            let d = (q * BigRational::from_integer(BigInt::from(-4))).to_integer();
            let disc = Discriminant::new(
                d.to_i64().ok_or_else(|| Error::Internal("discriminant overflow".into()))?,
            )?;
            Ok(EmbeddedOrder { direction, disc })
        })
        .collect()
}

/// ⌈2√p⌉.
pub fn kaneko_bound(p: &BigUint) -> u64 {
    let r = (p * 4u32).sqrt();
    let r = if &r * &r == p * 4u32 { r } else { r + 1u32 };
    r.to_u64().unwrap_or(u64::MAX)
}

/// ⌈½p^{2/3} + ¼⌉, the least N with (4N − 1)³ ≥ 8p².
pub fn all_small_bound(p: &BigUint) -> BigUint {
    let target = p * p * 8u32;
    let est = p.to_f64().unwrap_or(f64::MAX).powf(2.0 / 3.0) / 2.0;
    let mut n = BigUint::from((est as u64).saturating_sub(2).max(1));
    loop {
        let t = &n * 4u32 - 1u32;
        if &t * &t * &t >= target {
            return n;
        }
        n += 1u32;
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct OrderInequalityReport {
    pub p: String,
    pub m: u64,
    pub orders: usize,
    pub small_orders: usize,
    pub index_pairs: usize,
    pub kaneko_pairs: usize,
    pub kaneko_same_field_pairs: usize,
    pub distance_pairs: usize,
    pub prime_to_ell_pairs: usize,
    pub prime_to_ell_skipped: usize,
    pub all_small_bound: String,
    pub all_small_checked: usize,
}

/// Runs every check on `sample`; any failed inequality is an error.
/// `index_pairs` random pairs are used for the intersection-index check and
/// `ells` for the prime-to-ℓ instances.
pub fn verify_order_inequalities(
    alg: &QuaternionAlgebra,
    sample: &[QuaternionOrder],
    m: u64,
    index_pairs: usize,
    ells: &[u64],
    seed: u64,
) -> Result<OrderInequalityReport> {
    let p = alg.p().clone();
    let pu = p.to_biguint().unwrap();
    let mut report = OrderInequalityReport {
        p: p.to_string(),
        m,
        orders: sample.len(),
        ..Default::default()
    };

    // intersection indices agree both ways
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..index_pairs {
        let a = &sample[rng.gen_range(0..sample.len())];
        let b = &sample[rng.gen_range(0..sample.len())];
        order_distance(alg, a, b)?;
        report.index_pairs += 1;
    }

    // every maximal order is small for ½p^{2/3} + ¼
    let c4 = all_small_bound(&pu);
    report.all_small_bound = c4.to_string();
    let c4i = BigInt::from(c4);
    for o in sample {
        if min_nonint_element(alg, o, &c4i)?.is_none() {
            return Err(Error::TheoremViolation(format!(
                "maximal order [{}] has no non-integer element of norm ≤ {c4i}",
                o.to_line()
            )));
        }
        report.all_small_checked += 1;
    }

    // discriminant bound for pairs of embedded orders; the scan bound 2√p
    // is where a second embedding can first appear
    let kb = kaneko_bound(&pu).max(m);
    let is_small = |e: &[EmbeddedOrder]| e.iter().any(|x| min_nonint_norm(x.disc) <= m);
    let mut pool: Vec<(QuaternionOrder, Vec<EmbeddedOrder>)> = Vec::new();
    for o in sample {
        let emb = embedded_orders(alg, o, kb)?;
        check_kaneko(&p, o, &emb, &mut report)?;
        pool.push((o.clone(), emb));
    }
    report.small_orders = pool.iter().filter(|(_, e)| is_small(e)).count();

    // orders with different small subfields are far apart
    let small: Vec<(&QuaternionOrder, Vec<Discriminant>)> = pool
        .iter()
        .filter(|(_, e)| is_small(e))
        .map(|(o, e)| {
            let fields = e.iter().filter(|x| min_nonint_norm(x.disc) <= m).map(|x| x.field()).collect();
            (o, fields)
        })
        .collect();
    for (i, (a, fa)) in small.iter().enumerate() {
        for (b, fb) in &small[i + 1..] {
            if !fa.iter().any(|x| fb.iter().any(|y| x != y)) {
                continue;
            }
            let d = order_distance(alg, a, b)?;
            if BigInt::from(4 * m * m) * &d * &d < p {
                return Err(Error::TheoremViolation(format!(
                    "orders with different {m}-small subfields at distance {d}"
                )));
            }
            report.distance_pairs += 1;
        }
    }

    // prime-to-ℓ distance between Z[ℓβ] and Z[β] embeddings; the ℓ-neighbours
    // of small orders supply the Z[ℓβ] side
    let mut extended = pool.clone();
    for (o, emb) in &pool {
        if !is_small(emb) {
            continue;
        }
        for &l in ells {
            for n in ell_neighbors(alg, o, l)? {
                let e = embedded_orders(alg, &n, kb)?;
                check_kaneko(&p, &n, &e, &mut report)?;
                extended.push((n, e));
            }
        }
    }
    for &l in ells {
        let l2 = (l * l) as i64;
        for (a, ea) in &extended {
            for (b, eb) in &extended {
                for down in ea {
                    let Some(up) = eb.iter().find(|e| e.disc.value() * l2 == down.disc.value()) else {
                        continue;
                    };
                    let d = order_distance(alg, a, b)?;
                    if (&d % l).is_zero() {
                        report.prime_to_ell_skipped += 1;
                        continue;
                    }
                    let beta_norm = min_nonint_norm(up.disc);
                    if &d * BigInt::from(4 * l * beta_norm) < p {
                        return Err(Error::TheoremViolation(format!(
                            "orders with Z[{l}β] and Z[β] (disc {}) at distance {d} prime to {l}",
                            up.disc
                        )));
                    }
                    report.prime_to_ell_pairs += 1;
                }
            }
        }
    }
    Ok(report)
}

fn check_kaneko(p: &BigInt, o: &QuaternionOrder, emb: &[EmbeddedOrder], report: &mut OrderInequalityReport) -> Result<()> {
    for (i, x) in emb.iter().enumerate() {
        for y in &emb[i + 1..] {
            let prod = BigInt::from(x.disc.abs()) * BigInt::from(y.disc.abs());
            let same = x.field() == y.field();
            let need = if same { p * p } else { p * 4 };
            if prod < need {
                return Err(Error::TheoremViolation(format!(
                    "order [{}] embeds discriminants {} and {} with product below {need}",
                    o.to_line(),
                    x.disc,
                    y.disc
                )));
            }
            report.kaneko_pairs += 1;
            if same {
                report.kaneko_same_field_pairs += 1;
            }
        }
    }
    Ok(())
}
