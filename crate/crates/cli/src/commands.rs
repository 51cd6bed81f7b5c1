use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use msmall::arith::{next_prime, primes_up_to};
use msmall::classpoly::ClassPolyStore;
use msmall::isograph::{
    chain_primes, class_orbits, export_dot, max_certifiable_bound, separation_bound, supersingular_graph,
    verify_prime_exclusion, verify_theorem1,
};
use msmall::modpoly::SUPPORTED_LEVELS;
use msmall::msmall::{build_atlas, count_msmall, counting_report, MSmallAtlas};
use msmall::quatorders::verify::{sample_orders, sample_small_orders, verify_order_inequalities};
use msmall::quatorders::QuaternionAlgebra;

use crate::args::{Cli, Command, Suite, Target};
use crate::Failure;

/// Largest p for which the whole supersingular graph is enumerated.
pub const GRAPH_MAX_P: u64 = 2_000_000;
/// Largest p for the quaternion suite.
pub const QUAT_MAX_P: u64 = 1 << 31;
/// Largest M for atlas construction (class polynomials up to |d| = 4M).
pub const ATLAS_MAX_M: u64 = 1000;

const QUAT_SAMPLE: usize = 200;
const QUAT_SMALL: usize = 12;
const QUAT_SMALL_TRIES: usize = 4000;
const QUAT_INDEX_PAIRS: usize = 500;

pub fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Atlas { target, out } => atlas(target, out.as_deref()),
        Command::Verify {
            which,
            target,
            primes,
            l,
            out,
            seed,
        } => {
            check_target(target)?;
            match which {
                Suite::Thm1 => thm1(target, primes.as_deref(), out.as_deref()),
                Suite::Primeexcl => primeexcl(target, primes.as_deref(), *l, out.as_deref()),
                Suite::Quat => quat(target, primes.as_deref(), *seed, out.as_deref()),
                Suite::Counts => counts(target, out.as_deref()),
            }
        }
        Command::Histogram { p, m, count, out } => histogram(p, *m, *count, out),
        Command::Graph { target, primes, out } => graph(target, primes, out),
    }
}

fn check_m(p: &BigUint, m: u64) -> Result<(), Failure> {
    if m < 3 {
        return Err(Failure::Usage(format!("M = {m} must be at least 3")));
    }
    if BigUint::from(m) >= *p {
        return Err(Failure::Usage(format!("M = {m} must be below p = {p}")));
    }
    if m > ATLAS_MAX_M {
        return Err(Failure::Envelope(format!(
            "M = {m} exceeds the atlas envelope M ≤ {ATLAS_MAX_M}"
        )));
    }
    Ok(())
}

fn check_target(t: &Target) -> Result<(), Failure> {
    check_m(&t.p, t.m)
}

fn check_graph_p(p: &BigUint) -> Result<(), Failure> {
    if *p > BigUint::from(GRAPH_MAX_P) {
        return Err(Failure::Envelope(format!(
            "p = {p} exceeds the graph envelope p ≤ {GRAPH_MAX_P} (the whole supersingular graph is enumerated)"
        )));
    }
    Ok(())
}

fn check_primes(p: &BigUint, primes: &[u64]) -> Result<(), Failure> {
    if primes.is_empty() {
        return Err(Failure::Usage("empty prime list".into()));
    }
    for &l in primes {
        if !SUPPORTED_LEVELS.contains(&l) {
            return Err(Failure::Usage(format!(
                "prime {l} is not among the embedded levels {SUPPORTED_LEVELS:?}"
            )));
        }
        if BigUint::from(l) == *p {
            return Err(Failure::Usage(format!("prime {l} equals p")));
        }
    }
    Ok(())
}

fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(report).map_err(|e| Failure::Internal(e.to_string()))?;
    match out {
        Some(path) => write(path, &(text + "\n")),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn print_summary(a: &MSmallAtlas) -> Result<(), Failure> {
    println!("p = {}, M = {}", a.p(), a.m());
    for (d, js) in a.partition_unchecked() {
        println!("T_{d}: {} j-invariants", js.len());
    }
    println!("supersingular: {}", a.supersingular_count());
    if let Some(total) = a.total_count() {
        println!("total M-small: {total}");
    }
    let prop = a.proportion_supersingular()?;
    println!(
        "supersingular fraction: {} ≈ {}",
        prop,
        six_decimals(*prop.numer(), *prop.denom())
    );
    for c in a.conflicts() {
        println!("conflict: j = {} in T_{} and T_{}", c.j, c.first, c.second);
    }
    Ok(())
}

/// n/d rounded half-up to 6 decimals.
fn six_decimals(n: u64, d: u64) -> String {
    let scaled = (n as u128 * 2_000_000 + d as u128) / (2 * d as u128);
    format!("{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

fn atlas(t: &Target, out: Option<&Path>) -> Result<(), Failure> {
    check_target(t)?;
    let store = ClassPolyStore::in_memory();
    let a = build_atlas(&t.p, t.m, &store)?;
    print_summary(&a)?;
    if let Some(path) = out {
        write(path, &(serde_json::to_string_pretty(&a.to_json()).unwrap() + "\n"))?;
    }
    Ok(())
}

fn thm1(t: &Target, primes: Option<&[u64]>, out: Option<&Path>) -> Result<(), Failure> {
    let p = &t.p;
    let bound = separation_bound(p, t.m);
    if *p <= BigUint::from(4 * t.m * t.m) {
        return Err(Failure::Usage(format!("p = {p} must exceed 4M² = {}", 4 * t.m * t.m)));
    }
    let reach = max_certifiable_bound(p, &SUPPORTED_LEVELS, &[]);
    if bound > reach {
        return Err(Failure::Envelope(format!(
            "⌈√p/(2M)⌉ = {bound} needs every prime below {bound}; the embedded levels certify bounds up to {reach}"
        )));
    }
    check_graph_p(p)?;
    let hop = chain_primes(t.m).last().copied().unwrap_or(1);
    let primes: Vec<u64> = match primes {
        Some(ps) => ps.to_vec(),
        None => primes_up_to((bound - 1).max(hop))
            .into_iter()
            .filter(|l| BigUint::from(*l) != *p)
            .collect(),
    };
    check_primes(p, &primes)?;
    let store = ClassPolyStore::in_memory();
    let a = build_atlas(p, t.m, &store)?;
    let g = supersingular_graph(a.ctx(), &store, &primes)?;
    let r = verify_theorem1(&a, &g)?;
    eprintln!(
        "thm1: p = {p}, M = {}, {} cross-class pairs have no isogeny of degree < {} (√p/2M ≈ {:.2}); {} classes connected by primes {:?}",
        t.m,
        r.cross_pairs,
        r.bound,
        r.real_bound,
        r.classes.len(),
        r.chain_primes
    );
    emit(&r, out)
}

fn primeexcl(t: &Target, primes: Option<&[u64]>, l: u64, out: Option<&Path>) -> Result<(), Failure> {
    check_graph_p(&t.p)?;
    let primes = primes.map(<[u64]>::to_vec).unwrap_or_else(|| {
        SUPPORTED_LEVELS
            .iter()
            .copied()
            .filter(|q| BigUint::from(*q) != t.p)
            .collect()
    });
    check_primes(&t.p, &primes)?;
    if !primes.contains(&l) {
        return Err(Failure::Usage(format!("--l {l} must be one of the graph primes {primes:?}")));
    }
    let store = ClassPolyStore::in_memory();
    let a = build_atlas(&t.p, t.m, &store)?;
    let g = supersingular_graph(a.ctx(), &store, &primes)?;
    let r = verify_prime_exclusion(&a, &g, l)?;
    eprintln!(
        "primeexcl: {} pairs certified to bound {}; {}",
        r.pairs_checked, r.certified_bound, r.disclosure
    );
    emit(&r, out)
}

fn quat(t: &Target, primes: Option<&[u64]>, seed: u64, out: Option<&Path>) -> Result<(), Failure> {
    if t.p > BigUint::from(QUAT_MAX_P) {
        return Err(Failure::Envelope(format!("p = {} exceeds the quaternion envelope p < 2^31", t.p)));
    }
    let walk = primes.map(<[u64]>::to_vec).unwrap_or_else(|| vec![2, 3]);
    check_primes(&t.p, &walk)?;
    let alg = QuaternionAlgebra::new(&t.p)?;
    let mut sample = sample_orders(&alg, QUAT_SAMPLE, &walk, seed)?;
    sample.extend(sample_small_orders(&alg, QUAT_SMALL, t.m, &walk, QUAT_SMALL_TRIES, seed.wrapping_add(1))?);
    let r = verify_order_inequalities(&alg, &sample, t.m, QUAT_INDEX_PAIRS, &walk, seed.wrapping_add(2))?;
    eprintln!(
        "quat: {} orders ({} small), {} index pairs, {} double embeddings, {} differing-subfield pairs, {} prime-to-ℓ pairs, all orders {}-small",
        r.orders, r.small_orders, r.index_pairs, r.kaneko_pairs, r.distance_pairs, r.prime_to_ell_pairs, r.all_small_bound
    );
    emit(&r, out)
}

fn counts(t: &Target, out: Option<&Path>) -> Result<(), Failure> {
    let store = ClassPolyStore::in_memory();
    let a = build_atlas(&t.p, t.m, &store)?;
    let r = counting_report(&a, &store)?;
    eprintln!(
        "counts: {} supersingular in {} classes, all within their class-number bounds",
        r.supersingular,
        r.classes.len()
    );
    emit(&r, out)
}

fn histogram(start: &BigUint, m: u64, count: usize, out: &Path) -> Result<(), Failure> {
    if count == 0 {
        return Err(Failure::Usage("--count must be at least 1".into()));
    }
    let first = next_prime(start);
    check_m(&first, m)?;
    let mut primes = Vec::with_capacity(count);
    let mut p = first;
    for _ in 0..count {
        let next = next_prime(&p);
        primes.push(std::mem::replace(&mut p, next));
    }
    let store = ClassPolyStore::in_memory();
    let rows: Vec<(BigUint, usize, usize)> = primes
        .into_par_iter()
        .map(|p| count_msmall(&p, m, &store).map(|(ss, total)| (p, ss, total)))
        .collect::<Result<_, _>>()?;
    let mut csv = String::from("p,proportion\n");
    let mut inside = 0;
    for (p, ss, total) in &rows {
        if *total == 0 {
            return Err(Failure::Internal(format!("no M-small curves at p = {p}")));
        }
        // 0.4 ≤ ss/total ≤ 0.6, exactly
        if 5 * ss >= 2 * total && 5 * ss <= 3 * total {
            inside += 1;
        }
        csv.push_str(&format!("{p},{}\n", six_decimals(*ss as u64, *total as u64)));
    }
    write(out, &csv)?;
    println!(
        "{inside} of {} proportions lie in [0.4, 0.6]: {}",
        rows.len(),
        six_decimals(inside, rows.len() as u64)
    );
    Ok(())
}

fn graph(t: &Target, primes: &[u64], out: &Path) -> Result<(), Failure> {
    check_target(t)?;
    check_graph_p(&t.p)?;
    check_primes(&t.p, primes)?;
    let store = ClassPolyStore::in_memory();
    let a = build_atlas(&t.p, t.m, &store)?;
    let g = supersingular_graph(a.ctx(), &store, primes)?;
    let classes = class_orbits(&a, &g)?;
    let small: BTreeSet<usize> = classes.values().flatten().copied().collect();
    let comps = g.components(&small, primes);
    write(out, &export_dot(&g, &a, &store)?)?;
    println!(
        "{} vertices, {} classes, {} components of the M-small subgraph over primes {primes:?}",
        g.vertices().len(),
        classes.len(),
        comps.len()
    );
    if comps.len() < classes.len() {
        return Err(Failure::Assertion(format!(
            "{} components for {} classes: two classes share a component",
            comps.len(),
            classes.len()
        )));
    }
    Ok(())
}
