//! Supersingular ℓ-isogeny graphs on Galois orbits {j, j^p}, bounded
//! isogeny-distance certificates and the distance statements about the T_D
//! classes, plus DOT and CSV exports.
//!
//! Distances are multiplicative: a path of prime steps ℓ₁, …, ℓ_r has cost
//! ∏ ℓ_i. An isogeny of degree n < B factors into prime-degree steps whose
//! primes divide n, so a search over every prime below B is exhaustive for
//! degrees below B. Searches refuse to run when some prime below B is
//! missing from the graph.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{is_prime_u64, FieldCtx, Fp2, JKey};
use crate::classpoly::ClassPolyStore;
use crate::error::{Error, Result};
use crate::modpoly::load_table;
use crate::msmall::{broker_generate, enumerate_supersingular, MSmallAtlas};
use crate::quadforms::{min_nonint_norm, Discriminant};

/// The orbit {j, j^p}, represented by the smaller key.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GaloisOrbit {
    #[serde(serialize_with = "ser_display")]
    pub rep: JKey,
    pub size: u8,
}

fn ser_display<T: std::fmt::Display, S: serde::Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl GaloisOrbit {
    pub fn of(ctx: &FieldCtx, j: &Fp2) -> Self {
        let a = ctx.key(j);
        let b = ctx.key(&ctx.frobenius(j));
        GaloisOrbit {
            rep: a.min(b),
            size: if a == b { 1 } else { 2 },
        }
    }
}

impl std::fmt::Display for GaloisOrbit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.rep)
    }
}

#[derive(Clone, Debug)]
pub struct IsogenyGraph {
    ctx: FieldCtx,
    vertices: Vec<GaloisOrbit>,
    index: HashMap<GaloisOrbit, usize>,
    /// (from, to, ℓ) → number of ℓ-isogenies counted from the `from` side.
    edges: BTreeMap<(usize, usize, u64), usize>,
    /// Distinct neighbours per vertex, self-loops removed.
    adj: Vec<Vec<(usize, u64)>>,
    primes: Vec<u64>,
    complete: bool,
}

/// Builds the graph on the orbits of `vertices` with edges of every degree
/// in `primes`. The vertex set must be closed under conjugation.
pub fn build_graph(ctx: &FieldCtx, vertices: &[Fp2], primes: &[u64]) -> Result<IsogenyGraph> {
    let keys: BTreeSet<JKey> = vertices.iter().map(|j| ctx.key(j)).collect();
    for j in vertices {
        if !keys.contains(&ctx.key(&ctx.frobenius(j))) {
            return Err(Error::InvalidParameters(format!(
                "vertex set is not closed under conjugation at {}",
                ctx.display(j)
            )));
        }
    }
    let orbits: BTreeSet<GaloisOrbit> = vertices.iter().map(|j| GaloisOrbit::of(ctx, j)).collect();
    let vertices: Vec<GaloisOrbit> = orbits.into_iter().collect();
    let index: HashMap<GaloisOrbit, usize> =
        vertices.iter().enumerate().map(|(i, o)| (*o, i)).collect();
    let mut primes: Vec<u64> = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let reduced = primes
        .iter()
        .map(|&l| load_table(l)?.reduce(ctx))
        .collect::<Result<Vec<_>>>()?;

    let per_vertex: Vec<Vec<(usize, u64, usize)>> = vertices
        .par_iter()
        .map(|o| {
            let j = ctx.from_key(&o.rep);
            let mut out = Vec::new();
            for phi in &reduced {
                for (r, mult) in phi.roots_with_multiplicity(ctx, &j)? {
                    if let Some(&v) = index.get(&GaloisOrbit::of(ctx, &r)) {
                        out.push((v, phi.level(), mult));
                    }
                }
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut edges = BTreeMap::new();
    let mut adj = vec![Vec::new(); vertices.len()];
    for (u, list) in per_vertex.into_iter().enumerate() {
        for (v, l, mult) in list {
            *edges.entry((u, v, l)).or_insert(0) += mult;
            if u != v {
                adj[u].push((v, l));
            }
        }
    }
    for a in &mut adj {
        a.sort_unstable();
        a.dedup();
    }
    Ok(IsogenyGraph {
        ctx: ctx.clone(),
        vertices,
        index,
        edges,
        adj,
        primes,
        complete: false,
    })
}

/// The graph on every supersingular orbit.
pub fn supersingular_graph(
    ctx: &FieldCtx,
    store: &ClassPolyStore,
    primes: &[u64],
) -> Result<IsogenyGraph> {
    let all = enumerate_supersingular(ctx, store)?;
    let mut g = build_graph(ctx, &all, primes)?;
    g.complete = true;
    Ok(g)
}

/// Least B such that every prime below B, other than `excluded` and p, is
/// among `primes`.
pub fn max_certifiable_bound(p: &BigUint, primes: &[u64], excluded: &[u64]) -> u64 {
    let mut b = 2;
    loop {
        if is_prime_u64(b)
            && !excluded.contains(&b)
            && BigUint::from(b) != *p
            && !primes.contains(&b)
        {
            return b;
        }
        b += 1;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Verdict {
    /// Exact minimal degree with a witness path of (next orbit, ℓ) steps.
    Exact { degree: u64, path: Vec<(GaloisOrbit, u64)> },
    /// No isogeny of degree below the bound avoids the excluded primes.
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistanceCertificate {
    pub source: GaloisOrbit,
    pub target: GaloisOrbit,
    pub bound: u64,
    pub verdict: Verdict,
    pub primes: Vec<u64>,
}

impl IsogenyGraph {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn vertices(&self) -> &[GaloisOrbit] {
        &self.vertices
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Whether the graph contains every supersingular orbit.
    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn vertex_index(&self, o: &GaloisOrbit) -> Option<usize> {
        self.index.get(o).copied()
    }

    pub fn orbit_of(&self, j: &Fp2) -> Option<usize> {
        self.vertex_index(&GaloisOrbit::of(&self.ctx, j))
    }

    /// Directed edge multiplicities (from, to, ℓ) → count, self-loops included.
    pub fn edges(&self) -> &BTreeMap<(usize, usize, u64), usize> {
        &self.edges
    }

    pub fn has_edge(&self, u: usize, v: usize, l: u64) -> bool {
        self.edges.contains_key(&(u, v, l))
    }

    /// Distinct non-loop ℓ-neighbours of u.
    pub fn neighbours(&self, u: usize, l: u64) -> Vec<usize> {
        self.adj[u].iter().filter(|e| e.1 == l).map(|e| e.0).collect()
    }

    /// Connected components of the subgraph induced on `subset` using only
    /// edges of degree in `primes`.
    pub fn components(&self, subset: &BTreeSet<usize>, primes: &[u64]) -> Vec<BTreeSet<usize>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &s in subset {
            if !seen.insert(s) {
                continue;
            }
            let mut comp = BTreeSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, l) in &self.adj[u] {
                    if primes.contains(&l) && subset.contains(&v) && seen.insert(v) {
                        comp.insert(v);
                        queue.push_back(v);
                    }
                }
            }
            out.push(comp);
        }
        out
    }

    fn check_coverage(&self, bound: u64, excluded: &[u64]) -> Result<()> {
        let max = max_certifiable_bound(self.ctx.p(), &self.primes, excluded);
        if bound > max {
            return Err(Error::CoverageRefused { bound, missing: max });
        }
        Ok(())
    }

    /// Least-degree paths from `source` with cost below `bound`, avoiding
    /// the excluded primes: (cost, predecessor step) per reached vertex.
    fn search(&self, source: usize, bound: u64, excluded: &[u64]) -> HashMap<usize, (u64, Option<(usize, u64)>)> {
        let mut best: HashMap<usize, (u64, Option<(usize, u64)>)> = HashMap::new();
        let mut heap = BinaryHeap::new();
        best.insert(source, (1, None));
        heap.push(Reverse((1u64, source)));
        while let Some(Reverse((cost, u))) = heap.pop() {
            if best[&u].0 < cost {
                continue;
            }
            for &(v, l) in &self.adj[u] {
                if excluded.contains(&l) {
                    continue;
                }
                let c = cost.saturating_mul(l);
                if c >= bound {
                    continue;
                }
                let better = match best.get(&v) {
                    Some(&(old, _)) => c < old,
                    None => true,
                };
                if better {
                    best.insert(v, (c, Some((u, l))));
                    heap.push(Reverse((c, v)));
                }
            }
        }
        best
    }

    fn path_to(
        &self,
        found: &HashMap<usize, (u64, Option<(usize, u64)>)>,
        target: usize,
    ) -> Vec<(GaloisOrbit, u64)> {
        let mut path = Vec::new();
        let mut cur = target;
        while let Some((prev, l)) = found[&cur].1 {
            path.push((self.vertices[cur], l));
            cur = prev;
        }
        path.reverse();
        path
    }

    fn certificate(
        &self,
        found: &HashMap<usize, (u64, Option<(usize, u64)>)>,
        u: usize,
        v: usize,
        bound: u64,
        excluded: &[u64],
    ) -> DistanceCertificate {
        let verdict = match found.get(&v) {
            Some(&(degree, _)) => Verdict::Exact {
                degree,
                path: self.path_to(found, v),
            },
            None => Verdict::AtLeast,
        };
        DistanceCertificate {
            source: self.vertices[u],
            target: self.vertices[v],
            bound,
            verdict,
            primes: self
                .primes
                .iter()
                .copied()
                .filter(|l| !excluded.contains(l))
                .collect(),
        }
    }

    /// Exact distance below `bound` with witness, or the verdict "≥ bound".
    pub fn bounded_distance(
        &self,
        u: usize,
        v: usize,
        bound: u64,
        excluded: &[u64],
    ) -> Result<DistanceCertificate> {
        self.check_coverage(bound, excluded)?;
        let found = self.search(u, bound, excluded);
        Ok(self.certificate(&found, u, v, bound, excluded))
    }

    /// Certificates from one source to several targets in a single search.
    pub fn bounded_distances_from(
        &self,
        u: usize,
        targets: &[usize],
        bound: u64,
        excluded: &[u64],
    ) -> Result<Vec<DistanceCertificate>> {
        self.check_coverage(bound, excluded)?;
        let found = self.search(u, bound, excluded);
        Ok(targets
            .iter()
            .map(|&v| self.certificate(&found, u, v, bound, excluded))
            .collect())
    }

    /// Checks a witness path: every step is an edge and the degrees
    /// multiply to the claim.
    pub fn verify_certificate(&self, cert: &DistanceCertificate) -> bool {
        match &cert.verdict {
            Verdict::AtLeast => true,
            Verdict::Exact { degree, path } => {
                let Some(mut cur) = self.vertex_index(&cert.source) else {
                    return false;
                };
                let mut prod = 1u64;
                for (o, l) in path {
                    let Some(next) = self.vertex_index(o) else {
                        return false;
                    };
                    if !self.has_edge(cur, next, *l) || !cert.primes.contains(l) {
                        return false;
                    }
                    prod *= l;
                    cur = next;
                }
                Some(cur) == self.vertex_index(&cert.target)
                    && prod == *degree
                    && *degree < cert.bound
            }
        }
    }
}

/// The supersingular M-small orbits of the atlas grouped by class.
pub fn class_orbits(atlas: &MSmallAtlas, g: &IsogenyGraph) -> Result<BTreeMap<Discriminant, BTreeSet<usize>>> {
    let ctx = atlas.ctx();
    let mut out: BTreeMap<Discriminant, BTreeSet<usize>> = BTreeMap::new();
    for (d, js) in atlas.partition()? {
        for j in js {
            let v = g.orbit_of(&ctx.from_key(j)).ok_or_else(|| {
                Error::InvalidParameters(format!("j = {j} is not a vertex of the graph"))
            })?;
            out.entry(*d).or_default().insert(v);
        }
    }
    Ok(out)
}

/// ⌈√p / (2M)⌉, the least B with 4M²B² ≥ p.
pub fn separation_bound(p: &BigUint, m: u64) -> u64 {
    let four_m2 = BigUint::from(4 * m * m);
    let mut b = (p / &four_m2).sqrt().to_u64_digits().first().copied().unwrap_or(0);
    while &four_m2 * BigUint::from(b * b) < *p {
        b += 1;
    }
    b.max(1)
}

/// Primes ℓ ≤ (4/π)√M.
pub fn chain_primes(m: u64) -> Vec<u64> {
    let limit = 4.0 / std::f64::consts::PI * (m as f64).sqrt();
    (2..=limit.floor() as u64).filter(|&l| is_prime_u64(l)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortChainStatus {
    /// Every pair joined by at most 3 hops of distance ≤ ⌊(4/π)√M⌋.
    Holds,
    /// Some pair needs more than 3 such hops inside the class.
    NotObserved,
    /// Hop distances cannot be certified with the available primes.
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassConnectivity {
    pub d: Discriminant,
    pub orbits: usize,
    pub connected: bool,
    pub short_chain: ShortChainStatus,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem1Report {
    pub p: String,
    pub m: u64,
    pub bound: u64,
    pub real_bound: f64,
    pub cross_pairs: usize,
    pub separation_holds: bool,
    pub chain_primes: Vec<u64>,
    pub classes: Vec<ClassConnectivity>,
    pub certificates: Vec<DistanceCertificate>,
}

/// Checks that distinct classes are at distance ≥ ⌈√p/(2M)⌉ and that each
/// class is connected by prime steps ≤ (4/π)√M. `g` must contain every
/// supersingular orbit.
pub fn verify_theorem1(atlas: &MSmallAtlas, g: &IsogenyGraph) -> Result<Theorem1Report> {
    let p = atlas.p();
    let m = atlas.m();
    if !atlas.disjointness_guaranteed() {
        return Err(Error::NotApplicable(format!("p = {p} ≤ 4M² = {}", 4 * m * m)));
    }
    if !g.is_complete() {
        return Err(Error::InvalidParameters(
            "distance certification needs the full supersingular graph".into(),
        ));
    }
    let bound = separation_bound(p, m);
    let real_bound = p.to_string().parse::<f64>().unwrap_or(f64::INFINITY).sqrt() / (2.0 * m as f64);
    let classes = class_orbits(atlas, g)?;
    let class_of: HashMap<usize, Discriminant> = classes
        .iter()
        .flat_map(|(d, vs)| vs.iter().map(move |v| (*v, *d)))
        .collect();
    let members: Vec<usize> = class_of.keys().copied().collect::<BTreeSet<_>>().into_iter().collect();

    // (a): separation of distinct classes
    let mut certificates = Vec::new();
    let mut cross_pairs = 0;
    for (i, &u) in members.iter().enumerate() {
        let targets: Vec<usize> = members[i + 1..]
            .iter()
            .copied()
            .filter(|v| class_of[v] != class_of[&u])
            .collect();
        cross_pairs += targets.len();
        for cert in g.bounded_distances_from(u, &targets, bound, &[])? {
            if let Verdict::Exact { degree, .. } = &cert.verdict {
                return Err(Error::TheoremViolation(format!(
                    "orbits {} and {} in different classes are {degree}-isogenous, below {bound}",
                    cert.source, cert.target
                )));
            }
            certificates.push(cert);
        }
    }

    // (b): connectivity by small prime steps, and the short-chain form
    let cprimes = chain_primes(m);
    for l in &cprimes {
        if !g.primes().contains(l) {
            return Err(Error::CoverageRefused { bound: *l + 1, missing: *l });
        }
    }
    let hop = (4.0 / std::f64::consts::PI * (m as f64).sqrt()).floor() as u64;
    let mut class_reports = Vec::new();
    for (d, vs) in &classes {
        let comps = g.components(vs, &cprimes);
        if comps.len() != 1 {
            let a = comps[0].first().unwrap();
            let b = comps[1].first().unwrap();
            return Err(Error::TheoremViolation(format!(
                "T_{d} is disconnected: no chain of prime steps ≤ (4/π)√M from {} to {}",
                g.vertices()[*a],
                g.vertices()[*b]
            )));
        }
        class_reports.push(ClassConnectivity {
            d: *d,
            orbits: vs.len(),
            connected: true,
            short_chain: short_chain_status(g, vs, hop)?,
        });
    }
    Ok(Theorem1Report {
        p: p.to_string(),
        m,
        bound,
        real_bound,
        cross_pairs,
        separation_holds: true,
        chain_primes: cprimes,
        classes: class_reports,
        certificates,
    })
}

fn short_chain_status(g: &IsogenyGraph, class: &BTreeSet<usize>, hop: u64) -> Result<ShortChainStatus> {
    if hop + 1 > max_certifiable_bound(g.ctx().p(), g.primes(), &[]) {
        return Ok(ShortChainStatus::Inconclusive);
    }
    let list: Vec<usize> = class.iter().copied().collect();
    let mut near: HashMap<usize, BTreeSet<usize>> = HashMap::new();
    for &u in &list {
        let certs = g.bounded_distances_from(u, &list, hop + 1, &[])?;
        let reach = list
            .iter()
            .zip(&certs)
            .filter(|(_, c)| matches!(c.verdict, Verdict::Exact { .. }))
            .map(|(v, _)| *v)
            .collect();
        near.insert(u, reach);
    }
    for &u in &list {
        let mut frontier = BTreeSet::from([u]);
        for _ in 0..3 {
            let next: BTreeSet<usize> = frontier.iter().flat_map(|x| near[x].iter().copied()).collect();
            frontier.extend(next);
        }
        if frontier.len() != list.len() {
            return Ok(ShortChainStatus::NotObserved);
        }
    }
    Ok(ShortChainStatus::Holds)
}

#[derive(Clone, Debug, Serialize)]
pub struct PrimeExclusionReport {
    pub p: String,
    pub m: u64,
    pub l: u64,
    /// p·ℓ/(4M).
    pub theoretical_bound: f64,
    /// Bound actually certified with the available primes.
    pub certified_bound: u64,
    pub fully_certified: bool,
    pub small_orbits: usize,
    pub pairs_checked: usize,
    pub disclosure: String,
    pub certificates: Vec<DistanceCertificate>,
}

/// For each (M/ℓ²)-small orbit and each of its ℓ-neighbours, certifies that
/// no isogeny of degree prime to ℓ and below the certifiable bound joins
/// them.
pub fn verify_prime_exclusion(atlas: &MSmallAtlas, g: &IsogenyGraph, l: u64) -> Result<PrimeExclusionReport> {
    let m = atlas.m();
    let p = atlas.p();
    if !g.is_complete() {
        return Err(Error::InvalidParameters(
            "distance certification needs the full supersingular graph".into(),
        ));
    }
    if !g.primes().contains(&l) {
        return Err(Error::InvalidParameters(format!("graph has no {l}-isogeny edges")));
    }
    // (orbit, discriminants d of its small orders with norm ≤ M/ℓ²)
    let mut small: BTreeMap<usize, Vec<Discriminant>> = BTreeMap::new();
    for r in atlas.supersingular() {
        let ds: Vec<Discriminant> = r
            .vanishing_discs
            .iter()
            .copied()
            .filter(|d| min_nonint_norm(*d) * l * l <= m)
            .collect();
        if let (false, Some(u)) = (ds.is_empty(), g.orbit_of(&atlas.ctx().from_key(&r.j))) {
            small.insert(u, ds);
        }
    }
    if small.is_empty() {
        return Err(Error::NotApplicable(format!(
            "no supersingular j is {}-small",
            m / (l * l)
        )));
    }
    let pf = p.to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let theoretical_bound = pf * l as f64 / (4.0 * m as f64);
    let theory_ceil = {
        let num = p * BigUint::from(l);
        let den = BigUint::from(4 * m);
        let q = (&num + &den - 1u32) / den;
        q.to_u64_digits().first().copied().unwrap_or(0)
    };
    let sound = max_certifiable_bound(p, g.primes(), &[l]);
    let certified_bound = sound.min(theory_ceil);
    let fully_certified = certified_bound == theory_ceil;
    let mut certificates = Vec::new();
    for (&u, ds) in &small {
        let targets = designated_neighbours(atlas, g, u, ds, l)?;
        if targets.is_empty() {
            return Err(Error::TheoremViolation(format!(
                "orbit {} has no {l}-neighbour with a conductor-{l} suborder",
                g.vertices()[u]
            )));
        }
        for cert in g.bounded_distances_from(u, &targets, certified_bound, &[l])? {
            if let Verdict::Exact { degree, .. } = &cert.verdict {
                return Err(Error::TheoremViolation(format!(
                    "{l}-neighbours {} and {} joined by a degree-{degree} isogeny prime to {l}",
                    cert.source, cert.target
                )));
            }
            certificates.push(cert);
        }
    }
    let disclosure = if fully_certified {
        format!("bound {theoretical_bound:.1} fully certified")
    } else {
        format!(
            "certified only below {certified_bound} with primes {:?}; the bound {theoretical_bound:.1} is NOT certified",
            g.primes().iter().filter(|&&q| q != l).collect::<Vec<_>>()
        )
    };
    Ok(PrimeExclusionReport {
        p: p.to_string(),
        m,
        l,
        theoretical_bound,
        certified_bound,
        fully_certified,
        small_orbits: small.len(),
        pairs_checked: certificates.len(),
        disclosure,
        certificates,
    })
}

/// ℓ-neighbours v of u where some small order of discriminant d at u
/// becomes optimally embedded with conductor ℓ: H_{ℓ²d}(v) = 0 ≠ H_d(v).
fn designated_neighbours(
    atlas: &MSmallAtlas,
    g: &IsogenyGraph,
    u: usize,
    ds: &[Discriminant],
    l: u64,
) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for v in g.neighbours(u, l) {
        let Some(rec) = atlas.records().get(&g.vertices()[v].rep) else {
            continue;
        };
        for d in ds {
            let down = Discriminant::new(d.value() * (l * l) as i64)?;
            if rec.vanishing_discs.contains(&down) && !rec.vanishing_discs.contains(d) {
                out.push(v);
                break;
            }
        }
    }
    Ok(out)
}

const PALETTE: [&str; 12] = [
    "#e41a1c", "#377eb8", "#4daf4a", "#984ea3", "#ff7f00", "#ffff33", "#a65628", "#f781bf",
    "#66c2a5", "#fc8d62", "#8da0cb", "#e78ac3",
];

/// DOT rendering: one node per orbit, one edge line per isogeny counted
/// from the lower-index endpoint. M-small orbits are filled with their
/// class colour and labelled with the least non-integer endomorphism
/// degree; the seed curve is drawn as a square.
pub fn export_dot(g: &IsogenyGraph, atlas: &MSmallAtlas, store: &ClassPolyStore) -> Result<String> {
    let ctx = g.ctx();
    let seed = GaloisOrbit::of(ctx, &broker_generate(ctx, store)?.j);
    let colours: BTreeMap<Discriminant, &str> = atlas
        .partition_unchecked()
        .keys()
        .zip(PALETTE.iter().cycle())
        .map(|(d, c)| (*d, *c))
        .collect();
    let mut out = String::new();
    writeln!(out, "graph isogenies {{").unwrap();
    writeln!(out, "  node [shape=circle, fontsize=8];").unwrap();
    for (i, o) in g.vertices().iter().enumerate() {
        let mut attrs = vec![format!("tooltip=\"{}\"", o.rep)];
        match atlas.records().get(&o.rep).filter(|r| r.supersingular) {
            Some(rec) => {
                attrs.push(format!("label=\"{}\"", rec.min_endo_degree));
                attrs.push("style=filled".into());
                if let Some(d) = rec.class_d {
                    attrs.push(format!("fillcolor=\"{}\"", colours[&d]));
                    attrs.push(format!("class=\"{d}\""));
                }
            }
            None => attrs.push("label=\"\"".into()),
        }
        if *o == seed {
            attrs.push("shape=square".into());
        }
        writeln!(out, "  v{i} [{}];", attrs.join(", ")).unwrap();
    }
    for (&(u, v, l), &mult) in g.edges() {
        if u > v {
            continue;
        }
        for _ in 0..mult {
            writeln!(out, "  v{u} -- v{v} [label=\"{l}\"];").unwrap();
        }
    }
    writeln!(out, "}}").unwrap();
    Ok(out)
}

/// CSV with header `source,target,bound,verdict,path`; the path is a
/// space-separated list of `ℓ:orbit` steps.
pub fn certificates_csv(certs: &[DistanceCertificate]) -> String {
    let mut out = String::from("source,target,bound,verdict,path\n");
    for c in certs {
        let (verdict, path) = match &c.verdict {
            Verdict::Exact { degree, path } => (
                degree.to_string(),
                path.iter()
                    .map(|(o, l)| format!("{l}:{o}"))
                    .collect::<Vec<_>>()
                    .join(" "),
            ),
            Verdict::AtLeast => (format!(">={}", c.bound), String::new()),
        };
        writeln!(out, "{},{},{},{},{}", c.source, c.target, c.bound, verdict, path).unwrap();
    }
    out
}
