//! The M-small atlas: every j-invariant in characteristic p with a
//! non-integer endomorphism of degree at most M, its supersingularity, the
//! partition of the supersingular ones by fundamental discriminant, the
//! Bröker seed curve and the supersingular enumeration.
//!
//! An M-small j is a root mod p of some H_d with −4M ≤ d < 0. Supersingular
//! roots (p not split in ℚ(√d)) all lie in F_{p²} and are stored exactly.
//! Ordinary roots may live in larger extensions; those in F_{p²} are stored
//! and the rest are counted as the degree of the squarefree part of
//! ∏ H_d mod p over split d.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::{BigInt, BigUint};
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::arith::{kronecker, FieldCtx, Fp2, JKey};
use crate::classpoly::{class_polynomial_mod_p, ClassPolyStore};
use crate::error::{Error, Result};
use crate::modpoly::load_table;
use crate::poly::{distinct_root_count, roots_fp2, Poly};
use crate::quadforms::{
    class_number, dedekind_psi, fundamental_decomposition, min_nonint_norm, Discriminant,
};

/// One M-small j-invariant in F_{p²}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MSmallRecord {
    #[serde(serialize_with = "ser_display")]
    pub j: JKey,
    /// Discriminants d ≥ −4M with H_d(j) ≡ 0 mod p, ascending by |d|.
    pub vanishing_discs: Vec<Discriminant>,
    pub supersingular: bool,
    pub min_endo_degree: u64,
    /// Fundamental part of the first vanishing d, for supersingular j.
    pub class_d: Option<Discriminant>,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

/// A supersingular j whose vanishing discriminants have two different
/// fundamental parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConflictRecord {
    #[serde(serialize_with = "ser_display")]
    pub j: JKey,
    pub first: Discriminant,
    pub second: Discriminant,
}

/// Ordinary M-small curves counted over the algebraic closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OrdinaryCount {
    /// Distinct ordinary j over F̄_p.
    pub distinct: usize,
    /// Of those, the ones in F_{p²} (also present as records).
    pub rational: usize,
    /// Σ h(d) over split d, counting shared roots repeatedly.
    pub with_multiplicity: usize,
}

#[derive(Clone, Copy, Debug)]
pub struct AtlasOptions {
    /// Also count ordinary curves (needs one polynomial of degree Σ h(d)).
    pub include_ordinary: bool,
    /// Seed for the randomized root splitting; does not affect results.
    pub seed: u64,
}

impl Default for AtlasOptions {
    fn default() -> Self {
        AtlasOptions {
            include_ordinary: true,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct MSmallAtlas {
    ctx: FieldCtx,
    m: u64,
    records: BTreeMap<JKey, MSmallRecord>,
    partition: BTreeMap<Discriminant, BTreeSet<JKey>>,
    conflicts: Vec<ConflictRecord>,
    ordinary: Option<OrdinaryCount>,
    supersingular_with_multiplicity: usize,
}

/// Result of processing one discriminant.
struct DiscRoots {
    d: Discriminant,
    supersingular: bool,
    roots: Vec<Fp2>,
    reduced: Option<Poly>,
}

/// All discriminants d with −4M ≤ d < 0, ascending by |d|.
pub fn discriminants_up_to(m: u64) -> Vec<Discriminant> {
    (3..=4 * m)
        .filter_map(|n| Discriminant::new(-(n as i64)).ok())
        .collect()
}

/// Whether p does not split in ℚ(√d) (inert or ramified).
pub fn is_nonsplit(d: Discriminant, p: &BigInt) -> Result<bool> {
    let (big_d, _) = fundamental_decomposition(d);
    Ok(kronecker(&BigInt::from(big_d.value()), p)? != 1)
}

pub fn build_atlas(p: &BigUint, m: u64, store: &ClassPolyStore) -> Result<MSmallAtlas> {
    build_atlas_with(p, m, store, AtlasOptions::default())
}

pub fn build_atlas_with(
    p: &BigUint,
    m: u64,
    store: &ClassPolyStore,
    opts: AtlasOptions,
) -> Result<MSmallAtlas> {
    let ctx = FieldCtx::new(p)?;
    if m == 0 || BigUint::from(m) >= *p {
        return Err(Error::InvalidParameters(format!(
            "M = {m} must satisfy 1 ≤ M < p"
        )));
    }
    let ds = discriminants_up_to(m);
    let per_d: Vec<DiscRoots> = ds
        .par_iter()
        .map(|&d| process_discriminant(&ctx, d, store, opts))
        .collect::<Result<Vec<_>>>()?;

    let mut records: BTreeMap<JKey, MSmallRecord> = BTreeMap::new();
    let mut supersingular_with_multiplicity = 0;
    let mut ordinary_product: Option<Poly> = opts.include_ordinary.then(|| Poly::one(&ctx));
    let mut ordinary_multiplicity = 0;
    for item in &per_d {
        let h = class_number(item.d);
        if item.supersingular {
            supersingular_with_multiplicity += h;
        } else {
            ordinary_multiplicity += h;
            if let (Some(prod), Some(f)) = (ordinary_product.as_mut(), item.reduced.as_ref()) {
                *prod = prod.mul(&ctx, f);
            }
        }
        for r in &item.roots {
            let key = ctx.key(r);
            let rec = records.entry(key).or_insert_with(|| MSmallRecord {
                j: key,
                vanishing_discs: Vec::new(),
                supersingular: item.supersingular,
                min_endo_degree: u64::MAX,
                class_d: None,
            });
            if rec.supersingular != item.supersingular {
                return Err(Error::Internal(format!(
                    "j = {key} is a root of both split and non-split class polynomials"
                )));
            }
            rec.vanishing_discs.push(item.d);
            rec.min_endo_degree = rec.min_endo_degree.min(min_nonint_norm(item.d));
        }
    }

    let mut partition: BTreeMap<Discriminant, BTreeSet<JKey>> = BTreeMap::new();
    let mut conflicts = Vec::new();
    for rec in records.values_mut().filter(|r| r.supersingular) {
        let first = fundamental_decomposition(rec.vanishing_discs[0]).0;
        rec.class_d = Some(first);
        partition.entry(first).or_default().insert(rec.j);
        for d in &rec.vanishing_discs[1..] {
            let other = fundamental_decomposition(*d).0;
            if other != first {
                conflicts.push(ConflictRecord {
                    j: rec.j,
                    first,
                    second: other,
                });
                break;
            }
        }
    }

    let ordinary = match ordinary_product {
        Some(prod) => {
            let rational = records.values().filter(|r| !r.supersingular).count();
            let distinct = if prod.degree().unwrap_or(0) == 0 {
                0
            } else {
                distinct_root_count(&ctx, &prod)?
            };
            if rational > distinct {
                return Err(Error::Internal(format!(
                    "{rational} rational ordinary roots exceed {distinct} distinct roots"
                )));
            }
            Some(OrdinaryCount {
                distinct,
                rational,
                with_multiplicity: ordinary_multiplicity,
            })
        }
        None => None,
    };

    Ok(MSmallAtlas {
        ctx,
        m,
        records,
        partition,
        conflicts,
        ordinary,
        supersingular_with_multiplicity,
    })
}

fn process_discriminant(
    ctx: &FieldCtx,
    d: Discriminant,
    store: &ClassPolyStore,
    opts: AtlasOptions,
) -> Result<DiscRoots> {
    let supersingular = is_nonsplit(d, ctx.p_int())?;
    if !supersingular && !opts.include_ordinary {
        return Ok(DiscRoots {
            d,
            supersingular,
            roots: Vec::new(),
            reduced: None,
        });
    }
    let h = store.get(d)?;
    let f = class_polynomial_mod_p(&h, ctx);
    let seed = opts.seed ^ d.abs();
    let roots = roots_fp2(ctx, &f, seed)?;
    if supersingular {
        // Every supersingular root lies in F_{p²}.
        let distinct = distinct_root_count(ctx, &f)?;
        if roots.len() != distinct {
            return Err(Error::Internal(format!(
                "H_{d} mod p has {distinct} distinct roots but only {} in F_p²",
                roots.len()
            )));
        }
    }
    Ok(DiscRoots {
        d,
        supersingular,
        roots,
        reduced: (!supersingular).then_some(f),
    })
}

impl MSmallAtlas {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn p(&self) -> &BigUint {
        self.ctx.p()
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// M-small j-invariants in F_{p²}, keyed canonically.
    pub fn records(&self) -> &BTreeMap<JKey, MSmallRecord> {
        &self.records
    }

    pub fn record(&self, j: &Fp2) -> Option<&MSmallRecord> {
        self.records.get(&self.ctx.key(j))
    }

    pub fn contains(&self, j: &Fp2) -> bool {
        self.records.contains_key(&self.ctx.key(j))
    }

    pub fn supersingular(&self) -> impl Iterator<Item = &MSmallRecord> {
        self.records.values().filter(|r| r.supersingular)
    }

    pub fn supersingular_count(&self) -> usize {
        self.supersingular().count()
    }

    /// Σ h(d) over non-split d (shared roots counted repeatedly).
    pub fn supersingular_with_multiplicity(&self) -> usize {
        self.supersingular_with_multiplicity
    }

    pub fn ordinary(&self) -> Option<OrdinaryCount> {
        self.ordinary
    }

    /// Distinct M-small j over F̄_p, if ordinary curves were counted.
    pub fn total_count(&self) -> Option<usize> {
        self.ordinary
            .map(|o| self.supersingular_count() + o.distinct)
    }

    /// Σ h(d) over all −4M ≤ d < 0.
    pub fn total_with_multiplicity(&self) -> Option<usize> {
        self.ordinary
            .map(|o| self.supersingular_with_multiplicity + o.with_multiplicity)
    }

    /// Whether p > 4M², where the classes are provably disjoint.
    pub fn disjointness_guaranteed(&self) -> bool {
        let m = BigUint::from(self.m);
        *self.p() > &m * &m * 4u32
    }

    pub fn conflicts(&self) -> &[ConflictRecord] {
        &self.conflicts
    }

    /// The classes T_D; fails if some j lies in two classes.
    pub fn partition(&self) -> Result<&BTreeMap<Discriminant, BTreeSet<JKey>>> {
        match self.conflicts.first() {
            Some(c) => Err(Error::PartitionConflict {
                j: c.j.to_string(),
                first: c.first.value(),
                second: c.second.value(),
            }),
            None => Ok(&self.partition),
        }
    }

    /// The classes keyed by the first vanishing fundamental part, even when
    /// conflicts exist.
    pub fn partition_unchecked(&self) -> &BTreeMap<Discriminant, BTreeSet<JKey>> {
        &self.partition
    }

    /// Supersingular share of the distinct M-small j-invariants.
    pub fn proportion_supersingular(&self) -> Result<Ratio<u64>> {
        let total = self.total_count().ok_or_else(|| {
            Error::NotApplicable("ordinary curves were not counted".into())
        })?;
        if total == 0 {
            return Err(Error::UndefinedProportion);
        }
        Ok(Ratio::new(self.supersingular_count() as u64, total as u64))
    }

    /// JSON export with fields p, M, counts, records and partition.
    pub fn to_json(&self) -> serde_json::Value {
        let partition: BTreeMap<String, Vec<String>> = self
            .partition
            .iter()
            .map(|(d, js)| (d.to_string(), js.iter().map(|j| j.to_string()).collect()))
            .collect();
        json!({
            "p": self.p().to_string(),
            "M": self.m,
            "nonresidue": self.ctx.nonresidue(),
            "supersingular": self.supersingular_count(),
            "supersingular_with_multiplicity": self.supersingular_with_multiplicity,
            "ordinary": self.ordinary,
            "total": self.total_count(),
            "total_with_multiplicity": self.total_with_multiplicity(),
            "partition_verified": self.conflicts.is_empty(),
            "disjointness_guaranteed": self.disjointness_guaranteed(),
            "conflicts": self.conflicts,
            "records": self.records.values().collect::<Vec<_>>(),
            "partition": partition,
        })
    }
}

/// A supersingular seed curve: j-invariant with its small discriminant −q.
/// `q = 0` marks the fixed curve j = 1728 used when p ≡ 3 mod 4.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BrokerSeed {
    pub q: u64,
    pub j: Fp2,
}

/// Least prime q ≡ 3 mod 4 with (−q/p) = −1.
pub fn broker_q(p: &BigUint) -> Result<u64> {
    let pi = BigInt::from(p.clone());
    let mut q = 3u64;
    loop {
        if crate::arith::is_prime_u64(q) && kronecker(&-BigInt::from(q), &pi)? == -1 {
            return Ok(q);
        }
        q += 4;
    }
}

/// Bröker's supersingular curve: j = 1728 for p ≡ 3 mod 4, otherwise the
/// canonically first root of H_{−q} mod p.
pub fn broker_generate(ctx: &FieldCtx, store: &ClassPolyStore) -> Result<BrokerSeed> {
    let p = ctx.p();
    if (p % 4u32) == BigUint::from(3u32) {
        return Ok(BrokerSeed {
            q: 0,
            j: ctx.from_i64(1728),
        });
    }
    let q = broker_q(p)?;
    let d = Discriminant::new(-(q as i64))?;
    let h = store.get(d)?;
    let roots = roots_fp2(ctx, &class_polynomial_mod_p(&h, ctx), 0)?;
    let j = *roots
        .first()
        .ok_or_else(|| Error::Internal(format!("H_{d} has no root mod p")))?;
    Ok(BrokerSeed { q, j })
}

/// ⌊p/12⌋ + ε with ε = 0, 1, 1, 2 for p ≡ 1, 5, 7, 11 mod 12.
pub fn expected_supersingular_count(p: &BigUint) -> Result<BigUint> {
    let r = (p % 12u32).to_u32().unwrap();
    let eps = match r {
        1 => 0u32,
        5 | 7 => 1,
        11 => 2,
        _ => return Err(Error::InvalidPrime(p.to_string())),
    };
    Ok(p / 12u32 + eps)
}

/// All supersingular j-invariants, canonically sorted: the closure of the
/// seed under 2-isogenies, checked against the exact count.
pub fn enumerate_supersingular(ctx: &FieldCtx, store: &ClassPolyStore) -> Result<Vec<Fp2>> {
    let seed = broker_generate(ctx, store)?.j;
    let phi2 = load_table(2)?.reduce(ctx)?;
    let mut seen: BTreeSet<JKey> = BTreeSet::new();
    let mut queue = VecDeque::new();
    seen.insert(ctx.key(&seed));
    queue.push_back(seed);
    while let Some(j) = queue.pop_front() {
        for n in phi2.roots(ctx, &j)? {
            if seen.insert(ctx.key(&n)) {
                queue.push_back(n);
            }
        }
    }
    let expected = expected_supersingular_count(ctx.p())?;
    if BigUint::from(seen.len()) != expected {
        return Err(Error::Internal(format!(
            "found {} supersingular j-invariants, expected {expected}",
            seen.len()
        )));
    }
    Ok(seen.iter().map(|k| ctx.from_key(k)).collect())
}

/// Size of one class T_D with its bounds.
#[derive(Clone, Debug, Serialize)]
pub struct ClassCount {
    pub d: Discriminant,
    pub size: usize,
    /// Σ h(f²D) over conductors with f²|D| ≤ 4M.
    pub class_number_sum: usize,
    /// h(D)·Σ ψ(f) over the same conductors.
    pub psi_bound: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub p: String,
    pub m: u64,
    pub classes: Vec<ClassCount>,
    pub supersingular: usize,
    pub total: Option<usize>,
    /// Σ h(d) over all −4M ≤ d < 0.
    pub class_number_total: usize,
    pub fp_nonempty: bool,
    pub broker_q: u64,
    pub lemma_predicate: bool,
}

/// Class sizes and totals against their class-number bounds; every
/// inequality is checked and a failure is an error.
pub fn counting_report(atlas: &MSmallAtlas, store: &ClassPolyStore) -> Result<CountingReport> {
    let m = atlas.m();
    let mut classes = Vec::new();
    for (d, js) in atlas.partition_unchecked() {
        let mut class_number_sum = 0;
        let mut psi_sum = 0;
        let mut f = 1u64;
        while f * f * d.abs() <= 4 * m {
            let df = Discriminant::new(d.value() * (f * f) as i64)?;
            class_number_sum += class_number(df);
            psi_sum += dedekind_psi(f);
            f += 1;
        }
        let psi_bound = class_number(*d) as u64 * psi_sum;
        let size = js.len();
        if size > class_number_sum || size as u64 > psi_bound || size > 2 * class_number_sum {
            return Err(Error::TheoremViolation(format!(
                "|T_{d}| = {size} exceeds Σh = {class_number_sum} or ψ-bound {psi_bound}"
            )));
        }
        classes.push(ClassCount {
            d: *d,
            size,
            class_number_sum,
            psi_bound,
        });
    }
    let class_number_total: usize = discriminants_up_to(m).into_iter().map(class_number).sum();
    let total = atlas.total_count();
    if let Some(t) = total {
        if t > class_number_total {
            return Err(Error::TheoremViolation(format!(
                "{t} M-small curves exceed Σ h(d) = {class_number_total}"
            )));
        }
    }
    if atlas.supersingular_count() > atlas.supersingular_with_multiplicity() {
        return Err(Error::Internal("supersingular count exceeds Σ h(d)".into()));
    }
    let fp_nonempty = atlas
        .supersingular()
        .any(|r| r.j.is_fp());
    let seed = broker_generate(atlas.ctx(), store)?;
    let lemma_predicate = m >= seed.q;
    if lemma_predicate && !fp_nonempty {
        return Err(Error::TheoremViolation(format!(
            "M = {m} ≥ q = {} but no M-small supersingular j lies in F_p",
            seed.q
        )));
    }
    Ok(CountingReport {
        p: atlas.p().to_string(),
        m,
        classes,
        supersingular: atlas.supersingular_count(),
        total,
        class_number_total,
        fp_nonempty,
        broker_q: seed.q,
        lemma_predicate,
    })
}

/// Supersingular and total counts only, with the same dedup as the atlas:
/// distinct roots over F̄_p of ∏ H_d over non-split and over split d.
pub fn count_msmall(p: &BigUint, m: u64, store: &ClassPolyStore) -> Result<(usize, usize)> {
    let ctx = FieldCtx::new(p)?;
    let mut ss = Poly::one(&ctx);
    let mut ord = Poly::one(&ctx);
    for d in discriminants_up_to(m) {
        let f = class_polynomial_mod_p(&*store.get(d)?, &ctx);
        if is_nonsplit(d, ctx.p_int())? {
            ss = ss.mul(&ctx, &f);
        } else {
            ord = ord.mul(&ctx, &f);
        }
    }
    let count = |f: &Poly| -> Result<usize> {
        if f.degree().unwrap_or(0) == 0 {
            Ok(0)
        } else {
            distinct_root_count(&ctx, f)
        }
    };
    let s = count(&ss)?;
    let o = count(&ord)?;
    Ok((s, s + o))
}
