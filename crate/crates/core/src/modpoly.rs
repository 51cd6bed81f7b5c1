//! Classical modular polynomials Φ_ℓ(x, y) for ℓ ≤ 13, embedded as text
//! tables, and their specializations Φ_ℓ(x, j) over F_{p^2}.
//!
//! Table format: lines `i j c` with i ≥ j, meaning c·(xⁱyʲ + xʲyⁱ) when
//! i > j and c·xⁱyʲ when i = j. The tables are produced by
//! `examples/gen_modpoly.rs`.

use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::arith::{reduce_bigint, FieldCtx, Fp2};
use crate::error::{Error, Result};
use crate::poly::{roots_fp2, Poly};

/// Levels with an embedded table.
pub const SUPPORTED_LEVELS: [u64; 6] = [2, 3, 5, 7, 11, 13];

const RAW_TABLES: [&str; 6] = [
    include_str!("../data/phi2.txt"),
    include_str!("../data/phi3.txt"),
    include_str!("../data/phi5.txt"),
    include_str!("../data/phi7.txt"),
    include_str!("../data/phi11.txt"),
    include_str!("../data/phi13.txt"),
];

/// Φ_ℓ with integer coefficients; `dense[a][b]` is the coefficient of xᵃyᵇ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularPolynomialTable {
    level: u64,
    entries: Vec<(usize, usize, BigInt)>,
    dense: Vec<Vec<BigInt>>,
}

impl ModularPolynomialTable {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Symmetric-storage entries (i ≥ j), nonzero coefficients only.
    pub fn entries(&self) -> &[(usize, usize, BigInt)] {
        &self.entries
    }

    pub fn coeff(&self, a: usize, b: usize) -> &BigInt {
        &self.dense[a][b]
    }

    /// Degree in each variable, ℓ + 1.
    pub fn degree(&self) -> usize {
        self.dense.len() - 1
    }

    /// Coefficients reduced into F_p ⊂ F_{p²}.
    pub fn reduce(&self, ctx: &FieldCtx) -> Result<ReducedModPoly> {
        if ctx.p() == &BigUint::from(self.level) {
            return Err(Error::InseparableLevel(self.level));
        }
        let coeffs = self
            .dense
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| ctx.from_biguint(&reduce_bigint(c, ctx.p())))
                    .collect()
            })
            .collect();
        Ok(ReducedModPoly {
            level: self.level,
            coeffs,
        })
    }
}

/// Parses and validates one table.
pub fn parse_table(level: u64, text: &str) -> Result<ModularPolynomialTable> {
    let bad = |why: String| Error::MalformedTable(format!("phi{level}: {why}"));
    let n = level as usize + 1;
    let mut dense = vec![vec![BigInt::zero(); n + 1]; n + 1];
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(bad(format!("line {} has {} fields", lineno + 1, fields.len())));
        }
        let i: usize = fields[0].parse().map_err(|_| bad(format!("line {}", lineno + 1)))?;
        let j: usize = fields[1].parse().map_err(|_| bad(format!("line {}", lineno + 1)))?;
        let c: BigInt = fields[2].parse().map_err(|_| bad(format!("line {}", lineno + 1)))?;
        if i < j || i > n {
            return Err(bad(format!("index ({i}, {j}) out of range")));
        }
        if !dense[i][j].is_zero() {
            return Err(bad(format!("duplicate entry ({i}, {j})")));
        }
        dense[i][j] = c.clone();
        dense[j][i] = c.clone();
        entries.push((i, j, c));
    }
    if !dense[n][0].is_one() {
        return Err(bad("x^(ℓ+1) is not monic".into()));
    }
    if dense[n - 1][n - 1] != BigInt::from(-1) {
        return Err(bad("x^ℓ·y^ℓ coefficient is not −1".into()));
    }
    if (1..=n).any(|b| !dense[n][b].is_zero()) {
        return Err(bad("degree exceeds ℓ + 1".into()));
    }
    Ok(ModularPolynomialTable {
        level,
        entries,
        dense,
    })
}

/// The embedded table for level ℓ, parsed once.
pub fn load_table(level: u64) -> Result<Arc<ModularPolynomialTable>> {
    static TABLES: OnceLock<Vec<Result<Arc<ModularPolynomialTable>>>> = OnceLock::new();
    let idx = SUPPORTED_LEVELS
        .iter()
        .position(|&l| l == level)
        .ok_or(Error::UnsupportedLevel(level))?;
    let tables = TABLES.get_or_init(|| {
        SUPPORTED_LEVELS
            .iter()
            .zip(RAW_TABLES)
            .map(|(&l, raw)| parse_table(l, raw).map(Arc::new))
            .collect()
    });
    match &tables[idx] {
        Ok(t) => Ok(Arc::clone(t)),
        Err(e) => Err(Error::MalformedTable(e.to_string())),
    }
}

/// Φ_ℓ with coefficients in F_p, ready for specialization.
#[derive(Clone, Debug)]
pub struct ReducedModPoly {
    level: u64,
    coeffs: Vec<Vec<Fp2>>,
}

impl ReducedModPoly {
    pub fn level(&self) -> u64 {
        self.level
    }

    /// Φ_ℓ(x, j) as a polynomial in x.
    pub fn specialize(&self, ctx: &FieldCtx, j: &Fp2) -> Poly {
        let n = self.coeffs.len();
        let mut powers = Vec::with_capacity(n);
        let mut acc = ctx.one();
        for _ in 0..n {
            powers.push(acc);
            acc = ctx.mul(&acc, j);
        }
        Poly::from_coeffs(
            self.coeffs
                .iter()
                .map(|row| {
                    row.iter()
                        .zip(&powers)
                        .fold(ctx.zero(), |s, (c, jp)| ctx.add(&s, &ctx.mul(c, jp)))
                })
                .collect(),
        )
    }

    pub fn eval(&self, ctx: &FieldCtx, x: &Fp2, y: &Fp2) -> Fp2 {
        self.specialize(ctx, y).eval(ctx, x)
    }

    /// Distinct roots in F_{p²} of Φ_ℓ(x, j), canonically sorted.
    pub fn roots(&self, ctx: &FieldCtx, j: &Fp2) -> Result<Vec<Fp2>> {
        roots_fp2(ctx, &self.specialize(ctx, j), 0)
    }

    /// Roots in F_{p²} with their multiplicities.
    pub fn roots_with_multiplicity(&self, ctx: &FieldCtx, j: &Fp2) -> Result<Vec<(Fp2, usize)>> {
        let f = self.specialize(ctx, j);
        let mut out = Vec::new();
        for r in roots_fp2(ctx, &f, 0)? {
            let lin = Poly::from_coeffs(vec![ctx.neg(&r), ctx.one()]);
            let mut g = f.clone();
            let mut mult = 0;
            loop {
                let (q, rem) = g.divrem(ctx, &lin)?;
                if !rem.is_zero() {
                    break;
                }
                mult += 1;
                g = q;
            }
            out.push((r, mult));
        }
        Ok(out)
    }
}

/// The F_{p²}-roots of Φ_ℓ(x, j): the j-invariants ℓ-isogenous to j.
pub fn phi_roots(ctx: &FieldCtx, level: u64, j: &Fp2) -> Result<Vec<Fp2>> {
    load_table(level)?.reduce(ctx)?.roots(ctx, j)
}
