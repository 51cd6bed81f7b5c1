//! Exhaustive minimum of nrd over the non-integer elements of an order.

use msmall::quatorders::{Quaternion, QuaternionAlgebra, QuaternionOrder};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

pub fn combo(basis: &[Quaternion], c: &[i64; 4]) -> Quaternion {
    let mut acc = Quaternion(std::array::from_fn(|_| BigRational::zero()));
    for (b, &ci) in basis.iter().zip(c) {
        acc = acc.add(&b.scale(&BigRational::from_integer(BigInt::from(ci))));
    }
    acc
}

/// Half-widths of a coefficient box containing every x = Σ c_a b_a with
/// nrd(x) ≤ n: |c_a| ≤ √(2n·(G⁻¹)_aa) for the trace Gram matrix G.
fn box_widths(a: &QuaternionAlgebra, basis: &[Quaternion], n: f64) -> [i64; 4] {
    let mut g = [[0f64; 8]; 4];
    for r in 0..4 {
        for c in 0..4 {
            let t = a.mul(&basis[r], &basis[c].conj()).trd();
            g[r][c] = t.to_f64().unwrap();
        }
        g[r][4 + r] = 1.0;
    }
    for col in 0..4 {
        let piv = (col..4).max_by(|&x, &y| g[x][col].abs().total_cmp(&g[y][col].abs())).unwrap();
        g.swap(col, piv);
        let d = g[col][col];
        for v in g[col].iter_mut() {
            *v /= d;
        }
        for r in 0..4 {
            if r != col {
                let f = g[r][col];
                let row = g[col];
                for (x, y) in g[r].iter_mut().zip(row) {
                    *x -= f * y;
                }
            }
        }
    }
    std::array::from_fn(|i| (2.0 * n * g[i][4 + i]).max(0.0).sqrt().floor() as i64 + 1)
}

/// Pairwise size reduction b_i -= round(⟨b_i, b_j⟩ / ⟨b_j, b_j⟩)·b_j until
/// stable. The result is another basis of the same lattice.
fn size_reduce(a: &QuaternionAlgebra, mut basis: Vec<Quaternion>) -> Vec<Quaternion> {
    let form = |x: &Quaternion, y: &Quaternion| a.mul(x, &y.conj()).trd();
    let two = BigRational::from_integer(2.into());
    loop {
        let mut changed = false;
        for i in 0..4 {
            for j in 0..4 {
                let (gij, gjj) = (form(&basis[i], &basis[j]), form(&basis[j], &basis[j]));
                if i != j && gij.abs() * &two > gjj {
                    let t = (gij / gjj).round();
                    basis[i] = basis[i].sub(&basis[j].scale(&t));
                    changed = true;
                }
            }
        }
        if !changed {
            return basis;
        }
    }
}

pub fn brute_min(a: &QuaternionAlgebra, o: &QuaternionOrder, cap: u64) -> Option<BigInt> {
    let basis = size_reduce(a, o.basis());
    let w = box_widths(a, &basis, cap as f64);
    assert!(w.iter().map(|&x| 2 * x + 1).product::<i64>() < 2_000_000, "box too large: {w:?}");
    let mut best: Option<BigInt> = None;
    for c0 in -w[0]..=w[0] {
        for c1 in -w[1]..=w[1] {
            for c2 in -w[2]..=w[2] {
                for c3 in -w[3]..=w[3] {
                    let x = combo(&basis, &[c0, c1, c2, c3]);
                    if x.is_rational() {
                        continue;
                    }
                    let n = a.nrd(&x).to_integer();
                    if n <= BigInt::from(cap) && best.as_ref().is_none_or(|b| n < *b) {
                        best = Some(n);
                    }
                }
            }
        }
    }
    best
}

