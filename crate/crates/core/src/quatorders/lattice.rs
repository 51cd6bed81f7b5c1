//! Exact full-rank lattices in ℚⁿ: a common denominator with an integer
//! Hermite normal form, plus the rational linear algebra around it (duals,
//! sums, intersections, indices) and LLL reduction for a Gram matrix.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type RatVec = Vec<BigRational>;

/// Lattice spanned by the rows of `rows / denom`. Rows are in upper
/// triangular Hermite form with positive pivots and off-pivot entries
/// reduced into [0, pivot); `denom` is coprime to the entries jointly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    denom: BigInt,
    rows: Vec<Vec<BigInt>>,
}

/// Hermite normal form of the row span of an integer matrix with `n`
/// columns. Fails unless the span has full rank n.
pub fn hnf(mut gens: Vec<Vec<BigInt>>, n: usize) -> Result<Vec<Vec<BigInt>>> {
    gens.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for col in 0..n {
        loop {
            let pivot = gens
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|a, b| a.1[col].abs().cmp(&b.1[col].abs()))
                .map(|(i, _)| i);
            let Some(pi) = pivot else {
                return Err(Error::Internal(format!("lattice has rank below {n}")));
            };
            let prow = gens.swap_remove(pi);
            let mut done = true;
            for r in gens.iter_mut() {
                if r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&prow[col]);
                for k in col..n {
                    let t = &q * &prow[k];
                    r[k] -= t;
                }
                if !r[col].is_zero() {
                    done = false;
                }
            }
            gens.retain(|r| r.iter().any(|x| !x.is_zero()));
            if done {
                let mut prow = prow;
                if prow[col].is_negative() {
                    for x in prow.iter_mut() {
                        *x = -&*x;
                    }
                }
                out.push(prow);
                break;
            }
            gens.push(prow);
        }
    }
    // reduce entries above each pivot
    for col in 0..n {
        let (upper, lower) = out.split_at_mut(col);
        let prow = &lower[0];
        for r in upper.iter_mut() {
            let q = r[col].div_floor(&prow[col]);
            if !q.is_zero() {
                for k in col..n {
                    let t = &q * &prow[k];
                    r[k] -= t;
                }
            }
        }
    }
    Ok(out)
}

fn lcm_denominators<'a>(vs: impl Iterator<Item = &'a BigRational>) -> BigInt {
    vs.fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

impl Lattice {
    /// The lattice spanned by rational generators of length n.
    pub fn from_generators(gens: &[RatVec], n: usize) -> Result<Self> {
        let denom = lcm_denominators(gens.iter().flatten());
        let ints: Vec<Vec<BigInt>> = gens
            .iter()
            .map(|g| g.iter().map(|x| (x * &denom).to_integer()).collect())
            .collect();
        let rows = hnf(ints, n)?;
        Ok(Self::normalized(denom, rows))
    }

    fn normalized(denom: BigInt, mut rows: Vec<Vec<BigInt>>) -> Self {
        let g = rows.iter().flatten().fold(denom.clone(), |g, x| g.gcd(x));
        let denom = if g.is_one() {
            denom
        } else {
            for r in rows.iter_mut() {
                for x in r.iter_mut() {
                    *x = &*x / &g;
                }
            }
            denom / g
        };
        Lattice { denom, rows }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn int_rows(&self) -> &[Vec<BigInt>] {
        &self.rows
    }

    pub fn basis(&self) -> Vec<RatVec> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| BigRational::new(x.clone(), self.denom.clone()))
                    .collect()
            })
            .collect()
    }

    /// Integer coordinates of v in the basis, if v lies in the lattice.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        let n = self.dim();
        let mut w: Vec<BigInt> = Vec::with_capacity(n);
        for x in v {
            let y = x * &self.denom;
            if !y.is_integer() {
                return None;
            }
            w.push(y.to_integer());
        }
        let mut c = Vec::with_capacity(n);
        for col in 0..n {
            let (q, r) = w[col].div_rem(&self.rows[col][col]);
            if !r.is_zero() {
                return None;
            }
            for k in col..n {
                let t = &q * &self.rows[col][k];
                w[k] -= t;
            }
            c.push(q);
        }
        Some(c)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    /// |det| of the basis.
    pub fn covolume(&self) -> BigRational {
        let num = self
            .rows
            .iter()
            .enumerate()
            .fold(BigInt::one(), |acc, (i, r)| acc * &r[i]);
        BigRational::new(num, self.denom.pow(self.dim() as u32))
    }

    /// Dual lattice under the coordinate dot product.
    pub fn dual(&self) -> Result<Self> {
        let inv = invert(&self.basis())?;
        let n = self.dim();
        let gens: Vec<RatVec> = (0..n)
            .map(|c| (0..n).map(|r| inv[r][c].clone()).collect())
            .collect();
        Self::from_generators(&gens, n)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Self> {
        let mut gens = self.basis();
        gens.extend(other.basis());
        Self::from_generators(&gens, self.dim())
    }

    pub fn intersect(&self, other: &Lattice) -> Result<Self> {
        self.dual()?.sum(&other.dual()?)?.dual()
    }

    /// [self : sub] for a sublattice.
    pub fn index_of(&self, sub: &Lattice) -> Result<BigInt> {
        let r = sub.covolume() / self.covolume();
        if !r.is_integer() || !self.contains_lattice(sub) {
            return Err(Error::Internal("not a sublattice".into()));
        }
        Ok(r.to_integer())
    }
}

/// Inverse of a square rational matrix by Gauss-Jordan elimination.
pub fn invert(m: &[RatVec]) -> Result<Vec<RatVec>> {
    let n = m.len();
    let mut a: Vec<RatVec> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::Internal("singular matrix".into()))?;
        a.swap(col, piv);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                let (src, dst) = if r < col {
                    let (lo, hi) = a.split_at_mut(col);
                    (&hi[0], &mut lo[r])
                } else {
                    let (lo, hi) = a.split_at_mut(r);
                    (&lo[col], &mut hi[0])
                };
                for k in 0..2 * n {
                    let t = &f * &src[k];
                    dst[k] -= t;
                }
            }
        }
    }
    Ok(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn determinant(m: &[RatVec]) -> BigRational {
    let n = m.len();
    let mut a: Vec<RatVec> = m.to_vec();
    let mut det = BigRational::one();
    for col in 0..n {
        let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return BigRational::zero();
        };
        if piv != col {
            a.swap(col, piv);
            det = -det;
        }
        det *= &a[col][col];
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for k in col..n {
                let t = &f * &a[col][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Gram matrix of `basis` under the bilinear form `form`.
pub fn gram(basis: &[RatVec], form: impl Fn(&RatVec, &RatVec) -> BigRational) -> Vec<RatVec> {
    basis
        .iter()
        .map(|a| basis.iter().map(|b| form(a, b)).collect())
        .collect()
}

/// LLL reduction (δ = 3/4) of `basis` for the positive definite form
/// `form`, returning the reduced basis.
pub fn lll(mut basis: Vec<RatVec>, form: impl Fn(&RatVec, &RatVec) -> BigRational) -> Vec<RatVec> {
    let n = basis.len();
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let (mu, _) = gram_schmidt(&basis, &form);
            let r = mu[k][j].round();
            if !r.is_zero() {
                let bj = basis[j].clone();
                for (x, y) in basis[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
            }
        }
        let (mu, bstar) = gram_schmidt(&basis, &form);
        let lhs = &bstar[k];
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &bstar[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            basis.swap(k, k - 1);
            k = (k - 1).max(1);
        }
    }
    basis
}

/// Gram-Schmidt coefficients μ and squared lengths B*.
fn gram_schmidt(
    basis: &[RatVec],
    form: &impl Fn(&RatVec, &RatVec) -> BigRational,
) -> (Vec<RatVec>, RatVec) {
    let n = basis.len();
    let g = gram(basis, form);
    let mut mu = vec![vec![BigRational::zero(); n]; n];
    let mut bstar = vec![BigRational::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &bstar[k];
            }
            mu[i][j] = s / &bstar[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &bstar[k];
        }
        bstar[i] = s;
    }
    (mu, bstar)
}

/// ⌊√x⌋ for a nonnegative rational.
pub fn floor_sqrt(x: &BigRational) -> BigInt {
    let f = x.floor().to_integer();
    if f.is_negative() {
        return BigInt::zero();
    }
    f.sqrt()
}

/// Coefficient box certified to contain every vector v = Σ cᵢbᵢ with
/// form(v, v) ≤ bound: |cᵢ| ≤ √(bound · (G⁻¹)ᵢᵢ).
pub fn coefficient_box(g: &[RatVec], bound: &BigRational) -> Result<Vec<BigInt>> {
    let inv = invert(g)?;
    Ok((0..g.len()).map(|i| floor_sqrt(&(bound * &inv[i][i]))).collect())
}

/// Calls `f` for every integer vector in the symmetric box.
pub fn for_each_in_box(bounds: &[BigInt], mut f: impl FnMut(&[i64])) {
    let b: Vec<i64> = bounds.iter().map(|x| i64::try_from(x).unwrap_or(i64::MAX)).collect();
    let n = b.len();
    let mut c: Vec<i64> = b.iter().map(|x| -x).collect();
    loop {
        f(&c);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            if c[i] < b[i] {
                c[i] += 1;
                break;
            }
            c[i] = -b[i];
            i += 1;
        }
    }
}
