//! The definite quaternion algebra B = (−q, −p | ℚ) ramified at p and ∞,
//! its maximal orders as exact lattices, the index distance between
//! orders, ℓ-neighbours and short non-integer elements.
//!
//! Elements are w + xi + yj + zk with i² = −q, j² = −p, k = ij = −ji and
//! rational coordinates. Orders are stored as [`Lattice`]s in those
//! coordinates; two orders are equal iff their normal forms are.

pub mod lattice;
pub mod verify;

use std::collections::BTreeSet;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::{is_prime_u64, is_probable_prime, kronecker};
use crate::error::{Error, Result};
use crate::msmall::broker_q;
use lattice::{coefficient_box, for_each_in_box, gram, lll, Lattice, RatVec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuaternionAlgebra {
    p: BigInt,
    q: BigInt,
}

/// w + xi + yj + zk.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Quaternion(pub [BigRational; 4]);

/// Hilbert symbol (a, b)_v at a prime v, or at ∞ when v = 0.
pub fn hilbert_symbol(a: &BigInt, b: &BigInt, v: &BigInt) -> i8 {
    if v.is_zero() {
        return if a.is_negative() && b.is_negative() { -1 } else { 1 };
    }
    let vb = v.clone();
    let split = |x: &BigInt| {
        let mut u = x.clone();
        let mut e = 0u32;
        while (&u % &vb).is_zero() {
            u /= &vb;
            e += 1;
        }
        (e, u)
    };
    let (alpha, u) = split(a);
    let (beta, w) = split(b);
    if vb == BigInt::from(2) {
        let eps = |x: &BigInt| -> i64 { (x.mod_floor(&BigInt::from(4)).to_i64().unwrap() - 1) / 2 };
        let omega = |x: &BigInt| {
            let r = x.mod_floor(&BigInt::from(8)).to_i64().unwrap();
            (r * r - 1) / 8 % 2
        };
        let e = eps(&u) * eps(&w) + alpha as i64 * omega(&w) + beta as i64 * omega(&u);
        return if e % 2 == 0 { 1 } else { -1 };
    }
    let leg = |x: &BigInt| kronecker(x, &vb).unwrap();
    let mut s: i8 = 1;
    if (alpha * beta) % 2 == 1 && vb.mod_floor(&BigInt::from(4)) == BigInt::from(3) {
        s = -s;
    }
    if beta % 2 == 1 {
        s *= leg(&u);
    }
    if alpha % 2 == 1 {
        s *= leg(&w);
    }
    s
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn half(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl QuaternionAlgebra {
    /// The algebra for p ≥ 5 with q = 1 (p ≡ 3 mod 4), q = 2 (p ≡ 5 mod 8)
    /// or the least prime q ≡ 3 mod 4 with (−q/p) = −1 (p ≡ 1 mod 8).
    /// Ramification at exactly {p, ∞} is checked with Hilbert symbols.
    pub fn new(p: &BigUint) -> Result<Self> {
        if *p < BigUint::from(5u32) || !is_probable_prime(p) {
            return Err(Error::InvalidPrime(p.to_string()));
        }
        let r8 = (p % 8u32).to_u32().unwrap();
        let q: u64 = match r8 {
            3 | 7 => 1,
            5 => 2,
            _ => broker_q(p)?,
        };
        let alg = QuaternionAlgebra {
            p: BigInt::from(p.clone()),
            q: BigInt::from(q),
        };
        let ramified = alg.ramified_places();
        if ramified != [BigInt::zero(), alg.p.clone()] {
            return Err(Error::Internal(format!(
                "algebra (−{q}, −{p}) ramifies at {ramified:?}"
            )));
        }
        Ok(alg)
    }

    /// Places among {∞, 2, q, p} where (−q, −p)_v = −1, ascending, with ∞
    /// written as 0. Every other place is unramified since −q and −p are
    /// units there.
    pub fn ramified_places(&self) -> Vec<BigInt> {
        let a = -&self.q;
        let b = -&self.p;
        let mut places: BTreeSet<BigInt> = BTreeSet::from([BigInt::zero(), BigInt::from(2), self.p.clone()]);
        if self.q > BigInt::one() {
            places.insert(self.q.clone());
        }
        places
            .into_iter()
            .filter(|v| hilbert_symbol(&a, &b, v) == -1)
            .collect()
    }

    pub fn p(&self) -> &BigInt {
        &self.p
    }

    pub fn q(&self) -> &BigInt {
        &self.q
    }

    pub fn from_ints(&self, c: [i64; 4]) -> Quaternion {
        Quaternion(c.map(rat))
    }

    pub fn one(&self) -> Quaternion {
        self.from_ints([1, 0, 0, 0])
    }

    pub fn mul(&self, a: &Quaternion, b: &Quaternion) -> Quaternion {
        let [x0, x1, x2, x3] = &a.0;
        let [y0, y1, y2, y3] = &b.0;
        let q = BigRational::from_integer(self.q.clone());
        let p = BigRational::from_integer(self.p.clone());
        let qp = &q * &p;
        Quaternion([
            x0 * y0 - &q * x1 * y1 - &p * x2 * y2 - &qp * x3 * y3,
            x0 * y1 + x1 * y0 + &p * x2 * y3 - &p * x3 * y2,
            x0 * y2 + x2 * y0 - &q * x1 * y3 + &q * x3 * y1,
            x0 * y3 + x3 * y0 + x1 * y2 - x2 * y1,
        ])
    }

    pub fn nrd(&self, a: &Quaternion) -> BigRational {
        let [w, x, y, z] = &a.0;
        let q = BigRational::from_integer(self.q.clone());
        let p = BigRational::from_integer(self.p.clone());
        w * w + &q * x * x + &p * y * y + &q * &p * z * z
    }

    /// The bilinear form with nrd(a) = form(a, a).
    pub fn nrd_form(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        let q = BigRational::from_integer(self.q.clone());
        let p = BigRational::from_integer(self.p.clone());
        &a[0] * &b[0] + &q * &a[1] * &b[1] + &p * &a[2] * &b[2] + &q * &p * &a[3] * &b[3]
    }

    pub fn inv(&self, a: &Quaternion) -> Result<Quaternion> {
        let n = self.nrd(a);
        if n.is_zero() {
            return Err(Error::DivisionByZero);
        }
        Ok(a.conj().scale(&n.recip()))
    }

    /// The standard maximal order containing 1, i, j, k.
    pub fn standard_maximal_order(&self) -> Result<QuaternionOrder> {
        let p8 = self.p.mod_floor(&BigInt::from(8)).to_i64().unwrap();
        let gens: Vec<Quaternion> = if self.q.is_one() {
            // {1, i, (i+j)/2, (1+k)/2}
            vec![
                self.one(),
                self.from_ints([0, 1, 0, 0]),
                Quaternion([rat(0), half(1, 2), half(1, 2), rat(0)]),
                Quaternion([half(1, 2), rat(0), rat(0), half(1, 2)]),
            ]
        } else if p8 == 5 {
            // {(1+j+k)/2, (i+2j+k)/4, j, k}
            vec![
                Quaternion([half(1, 2), rat(0), half(1, 2), half(1, 2)]),
                Quaternion([rat(0), half(1, 4), half(1, 2), half(1, 4)]),
                self.from_ints([0, 0, 1, 0]),
                self.from_ints([0, 0, 0, 1]),
            ]
        } else {
            // {(1+i)/2, (j+k)/2, (i+ck)/q, k} with q | c²p + 1
            let q = self.q.to_i64().unwrap();
            let pm = self.p.mod_floor(&self.q).to_i64().unwrap();
            let c = (0..q)
                .find(|c| (c * c * pm + 1) % q == 0)
                .ok_or_else(|| Error::Internal(format!("−1/p is not a square mod {q}")))?;
            vec![
                Quaternion([half(1, 2), half(1, 2), rat(0), rat(0)]),
                Quaternion([rat(0), rat(0), half(1, 2), half(1, 2)]),
                Quaternion([rat(0), half(1, q), rat(0), half(c, q)]),
                self.from_ints([0, 0, 0, 1]),
            ]
        };
        let o = QuaternionOrder::from_generators(self, &gens)?;
        if !o.is_maximal(self) {
            return Err(Error::NonMaximalOrder(o.discriminant(self).to_string()));
        }
        Ok(o)
    }

    /// γ⁻¹ O γ.
    pub fn conjugate_order(&self, o: &QuaternionOrder, gamma: &Quaternion) -> Result<QuaternionOrder> {
        let gi = self.inv(gamma)?;
        let gens: Vec<Quaternion> = o
            .basis()
            .iter()
            .map(|b| self.mul(&self.mul(&gi, b), gamma))
            .collect();
        QuaternionOrder::from_generators(self, &gens)
    }
}

impl Quaternion {
    pub fn coords(&self) -> &[BigRational; 4] {
        &self.0
    }

    pub fn trd(&self) -> BigRational {
        &self.0[0] * rat(2)
    }

    pub fn conj(&self) -> Quaternion {
        let [w, x, y, z] = &self.0;
        Quaternion([w.clone(), -x, -y, -z])
    }

    pub fn add(&self, o: &Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] + &o.0[i]))
    }

    pub fn sub(&self, o: &Quaternion) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] - &o.0[i]))
    }

    pub fn scale(&self, c: &BigRational) -> Quaternion {
        Quaternion(std::array::from_fn(|i| &self.0[i] * c))
    }

    pub fn is_rational(&self) -> bool {
        self.0[1..].iter().all(|x| x.is_zero())
    }

    /// Pure part α − trd(α)/2.
    pub fn pure(&self) -> Quaternion {
        Quaternion([rat(0), self.0[1].clone(), self.0[2].clone(), self.0[3].clone()])
    }
}

impl std::fmt::Display for Quaternion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [w, x, y, z] = &self.0;
        write!(f, "{w} + {x}i + {y}j + {z}k")
    }
}

/// An order of B given by its lattice in (1, i, j, k) coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuaternionOrder {
    lattice: Lattice,
}

/// Smallest non-integer element of an order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShortElement {
    pub element: Quaternion,
    pub nrd: BigInt,
}

impl QuaternionOrder {
    /// The order spanned by `gens`, checked to contain 1, to be closed
    /// under multiplication and to have integral trace and norm on the
    /// basis.
    pub fn from_generators(alg: &QuaternionAlgebra, gens: &[Quaternion]) -> Result<Self> {
        let vecs: Vec<RatVec> = gens.iter().map(|g| g.0.to_vec()).collect();
        let o = QuaternionOrder {
            lattice: Lattice::from_generators(&vecs, 4)?,
        };
        o.check(alg)?;
        Ok(o)
    }

    fn check(&self, alg: &QuaternionAlgebra) -> Result<()> {
        if !self.contains(&alg.one()) {
            return Err(Error::InvalidParameters("lattice does not contain 1".into()));
        }
        let basis = self.basis();
        for a in &basis {
            if !a.trd().is_integer() || !alg.nrd(a).is_integer() {
                return Err(Error::InvalidParameters(format!("{a} is not integral")));
            }
            for b in &basis {
                if !self.contains(&alg.mul(a, b)) {
                    return Err(Error::InvalidParameters(
                        "lattice is not closed under multiplication".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn basis(&self) -> Vec<Quaternion> {
        self.lattice
            .basis()
            .into_iter()
            .map(|v| Quaternion(v.try_into().unwrap()))
            .collect()
    }

    pub fn contains(&self, a: &Quaternion) -> bool {
        self.lattice.contains(&a.0)
    }

    /// |det(trd(eₐ ē_b))|; equals p² exactly for maximal orders.
    pub fn discriminant(&self, alg: &QuaternionAlgebra) -> BigInt {
        let basis: Vec<RatVec> = self.lattice.basis();
        let g = gram(&basis, |a, b| alg.nrd_form(a, b) * rat(2));
        lattice::determinant(&g).abs().to_integer()
    }

    /// √discriminant, which is p for maximal orders.
    pub fn reduced_discriminant(&self, alg: &QuaternionAlgebra) -> BigInt {
        self.discriminant(alg).sqrt()
    }

    pub fn is_maximal(&self, alg: &QuaternionAlgebra) -> bool {
        self.discriminant(alg) == &alg.p * &alg.p
    }

    /// One line of 16 rationals, the basis rows in (1, i, j, k) coordinates.
    pub fn to_line(&self) -> String {
        self.basis()
            .iter()
            .flat_map(|b| b.0.iter().map(|x| x.to_string()))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn parse_line(alg: &QuaternionAlgebra, line: &str) -> Result<Self> {
        let vals = line
            .split_whitespace()
            .map(|t| t.parse::<BigRational>().map_err(|_| Error::Parse(t.to_string())))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 16 {
            return Err(Error::Parse(format!("expected 16 rationals, got {}", vals.len())));
        }
        let gens: Vec<Quaternion> = vals
            .chunks(4)
            .map(|c| Quaternion([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()]))
            .collect();
        Self::from_generators(alg, &gens)
    }
}

fn require_maximal(alg: &QuaternionAlgebra, o: &QuaternionOrder) -> Result<()> {
    if o.is_maximal(alg) {
        Ok(())
    } else {
        Err(Error::NonMaximalOrder(o.discriminant(alg).to_string()))
    }
}

/// [O : O ∩ O′] for maximal orders, checked equal to [O′ : O ∩ O′].
pub fn order_distance(alg: &QuaternionAlgebra, a: &QuaternionOrder, b: &QuaternionOrder) -> Result<BigInt> {
    require_maximal(alg, a)?;
    require_maximal(alg, b)?;
    if a == b {
        return Ok(BigInt::one());
    }
    let inter = a.lattice.intersect(&b.lattice)?;
    let da = a.lattice.index_of(&inter)?;
    let db = b.lattice.index_of(&inter)?;
    if da != db {
        return Err(Error::TheoremViolation(format!(
            "index of the intersection differs: {da} versus {db}"
        )));
    }
    Ok(da)
}

/// Left ideal O·x + O·n.
pub fn left_ideal(alg: &QuaternionAlgebra, o: &QuaternionOrder, x: &Quaternion, n: &BigInt) -> Result<Lattice> {
    let nr = BigRational::from_integer(n.clone());
    let mut gens: Vec<RatVec> = Vec::with_capacity(8);
    for b in o.basis() {
        gens.push(alg.mul(&b, x).0.to_vec());
        gens.push(b.scale(&nr).0.to_vec());
    }
    Lattice::from_generators(&gens, 4)
}

/// Right order of a lattice ideal I of reduced norm n: Ī·I / n.
pub fn right_order(alg: &QuaternionAlgebra, ideal: &Lattice, n: &BigInt) -> Result<QuaternionOrder> {
    let basis: Vec<Quaternion> = ideal
        .basis()
        .into_iter()
        .map(|v| Quaternion(v.try_into().unwrap()))
        .collect();
    let inv_n = BigRational::from_integer(n.clone()).recip();
    let mut gens = Vec::with_capacity(16);
    for a in &basis {
        for b in &basis {
            gens.push(alg.mul(&a.conj(), b).scale(&inv_n));
        }
    }
    QuaternionOrder::from_generators(alg, &gens)
}

/// The ℓ + 1 maximal orders at distance ℓ: right orders of the left ideals
/// O·x + O·ℓ with ℓ | nrd(x), x ∉ ℓO. Returned in normal-form order.
pub fn ell_neighbors(alg: &QuaternionAlgebra, o: &QuaternionOrder, l: u64) -> Result<Vec<QuaternionOrder>> {
    if !is_prime_u64(l) || alg.p == BigInt::from(l) || l > 13 {
        return Err(Error::InvalidParameters(format!("ℓ = {l} must be a prime ≤ 13 other than p")));
    }
    let basis = o.basis();
    let lb = BigInt::from(l);
    let li = l as i64;
    let mut ideals: BTreeSet<Vec<Vec<BigInt>>> = BTreeSet::new();
    let mut found = Vec::new();
    let mut c = [0i64; 4];
    loop {
        // next coefficient vector in [0, ℓ)⁴
        let mut i = 0;
        while i < 4 {
            c[i] += 1;
            if c[i] < li {
                break;
            }
            c[i] = 0;
            i += 1;
        }
        if i == 4 {
            break;
        }
        let x = basis
            .iter()
            .zip(c)
            .fold(Quaternion([rat(0), rat(0), rat(0), rat(0)]), |acc, (b, ci)| {
                acc.add(&b.scale(&rat(ci)))
            });
        let n = alg.nrd(&x).to_integer();
        if !(n % &lb).is_zero() {
            continue;
        }
        let ideal = left_ideal(alg, o, &x, &lb)?;
        // only norm-ℓ ideals: index ℓ² in O
        if o.lattice.index_of(&ideal)? != &lb * &lb {
            continue;
        }
        let key = ideal.int_rows().to_vec();
        let key = {
            let mut k = key;
            k.push(vec![ideal.denom().clone()]);
            k
        };
        if ideals.insert(key) {
            found.push(right_order(alg, &ideal, &lb)?);
        }
    }
    if found.len() as u64 != l + 1 {
        return Err(Error::Internal(format!(
            "found {} ideals of norm {l}, expected {}",
            found.len(),
            l + 1
        )));
    }
    for n in &found {
        require_maximal(alg, n)?;
    }
    found.sort_by(|a, b| a.to_line().cmp(&b.to_line()));
    Ok(found)
}

/// A uniformly random ℓ-neighbour: each norm-ℓ left ideal has the same
/// number ℓ² − 1 of generators x mod ℓO.
pub fn random_neighbor<R: rand::Rng + ?Sized>(
    alg: &QuaternionAlgebra,
    o: &QuaternionOrder,
    l: u64,
    rng: &mut R,
) -> Result<QuaternionOrder> {
    if !is_prime_u64(l) || alg.p == BigInt::from(l) || l > 13 {
        return Err(Error::InvalidParameters(format!("ℓ = {l} must be a prime ≤ 13 other than p")));
    }
    let basis = o.basis();
    let lb = BigInt::from(l);
    loop {
        let c: [i64; 4] = std::array::from_fn(|_| rng.gen_range(0..l as i64));
        if c.iter().all(|&x| x == 0) {
            continue;
        }
        let x = basis
            .iter()
            .zip(c)
            .fold(Quaternion([rat(0), rat(0), rat(0), rat(0)]), |acc, (b, ci)| {
                acc.add(&b.scale(&rat(ci)))
            });
        if !(alg.nrd(&x).to_integer() % &lb).is_zero() {
            continue;
        }
        let ideal = left_ideal(alg, o, &x, &lb)?;
        if o.lattice.index_of(&ideal)? != &lb * &lb {
            continue;
        }
        return right_order(alg, &ideal, &lb);
    }
}

/// Reduced basis of the trace-zero projection of O, as (x, y, z) vectors.
fn pure_projection(alg: &QuaternionAlgebra, o: &QuaternionOrder) -> Result<Vec<RatVec>> {
    let gens: Vec<RatVec> = o.basis().iter().map(|b| b.0[1..].to_vec()).collect();
    let proj = Lattice::from_generators(&gens, 3)?;
    let form = |a: &RatVec, b: &RatVec| {
        alg.nrd_form(&[rat(0), a[0].clone(), a[1].clone(), a[2].clone()], &[
            rat(0),
            b[0].clone(),
            b[1].clone(),
            b[2].clone(),
        ])
    };
    Ok(lll(proj.basis(), form))
}

/// Lifts a pure vector v of the projection to the element of O over it
/// with the smallest norm: v itself or 1/2 + v.
fn lift(o: &QuaternionOrder, v: &RatVec) -> Option<Quaternion> {
    let a = Quaternion([rat(0), v[0].clone(), v[1].clone(), v[2].clone()]);
    if o.contains(&a) {
        return Some(a);
    }
    let b = Quaternion([half(1, 2), v[0].clone(), v[1].clone(), v[2].clone()]);
    o.contains(&b).then_some(b)
}

/// Every element α ∈ O − ℤ with nrd(α) ≤ bound, up to adding integers that
/// do not lower the norm: for each pure vector v, all lifts t/2 + v with
/// t²/4 + nrd(v) ≤ bound.
pub fn short_elements(alg: &QuaternionAlgebra, o: &QuaternionOrder, bound: &BigInt) -> Result<Vec<(Quaternion, BigInt)>> {
    let basis = pure_projection(alg, o)?;
    let form = |a: &RatVec, b: &RatVec| {
        alg.nrd_form(&[rat(0), a[0].clone(), a[1].clone(), a[2].clone()], &[
            rat(0),
            b[0].clone(),
            b[1].clone(),
            b[2].clone(),
        ])
    };
    let g = gram(&basis, form);
    let m = BigRational::from_integer(bound.clone());
    let bx = coefficient_box(&g, &m)?;
    let mut out = Vec::new();
    let mut err = None;
    for_each_in_box(&bx, |c| {
        if c.iter().all(|&x| x == 0) || err.is_some() {
            return;
        }
        let v: RatVec = (0..3)
            .map(|k| (0..3).map(|i| &basis[i][k] * rat(c[i])).sum())
            .collect();
        let pure_norm = form(&v, &v);
        if pure_norm > m {
            return;
        }
        let Some(base) = lift(o, &v) else {
            err = Some(Error::Internal("pure vector without a lift".into()));
            return;
        };
        // the lifts over v are base + n for integers n
        let reach = lattice::floor_sqrt(&(&m - &pure_norm)).to_i64().unwrap_or(0) + 1;
        for n in -reach..=reach {
            let w = &base.0[0] + rat(n);
            let a = Quaternion([w, v[0].clone(), v[1].clone(), v[2].clone()]);
            let norm = alg.nrd(&a);
            if norm <= m {
                out.push((a, norm.to_integer()));
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0 .0.cmp(&b.0 .0)));
    out.dedup();
    Ok(out)
}

/// The non-integer element of least norm, if that norm is at most `bound`.
pub fn min_nonint_element(alg: &QuaternionAlgebra, o: &QuaternionOrder, bound: &BigInt) -> Result<Option<ShortElement>> {
    let basis = pure_projection(alg, o)?;
    let form = |a: &RatVec, b: &RatVec| {
        alg.nrd_form(&[rat(0), a[0].clone(), a[1].clone(), a[2].clone()], &[
            rat(0),
            b[0].clone(),
            b[1].clone(),
            b[2].clone(),
        ])
    };
    let g = gram(&basis, form);
    let m = BigRational::from_integer(bound.clone());
    let bx = coefficient_box(&g, &m)?;
    let mut best: Option<ShortElement> = None;
    let mut err = None;
    for_each_in_box(&bx, |c| {
        if c.iter().all(|&x| x == 0) || err.is_some() {
            return;
        }
        let v: RatVec = (0..3)
            .map(|k| (0..3).map(|i| &basis[i][k] * rat(c[i])).sum())
            .collect();
        if form(&v, &v) > m {
            return;
        }
        let Some(a) = lift(o, &v) else {
            err = Some(Error::Internal("pure vector without a lift".into()));
            return;
        };
        let n = alg.nrd(&a).to_integer();
        if BigRational::from_integer(n.clone()) > m {
            return;
        }
        let better = match &best {
            None => true,
            Some(b) => (&n, &a.0) < (&b.nrd, &b.element.0),
        };
        if better {
            best = Some(ShortElement { element: a, nrd: n });
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(best)
}
