//! Brute-force ground truth: construct small finite groups as Cayley
//! tables, enumerate all their subgroups by closure extension, and check
//! the actual counts against `S(p,a)`, `f(r)`, the chain-length bound, and
//! the main bound `B(r)`.

pub mod cayley;
pub mod construct;

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigInt;
use serde_json::json;
use thiserror::Error;

use crate::certified::{certify_le, CertError, CertReal, Expr, Outcome, Verdict};
use crate::corollary::factorize;
use crate::report::{claim_outcome, combine_outcomes, interval_json, verdict_json, Certificate};
use crate::sgbound::{bound_b_expr, f_expr, subgroup_sum, trivial_bound, Bound};

pub use construct::{make_group, GroupKind};

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("order {0} exceeds the construction cap {1}")]
    OrderCap(usize, usize),
    #[error("enumeration requires order <= 512 or an elementary abelian group with k <= 7; got order {0}")]
    TooLargeToEnumerate(usize),
    #[error("subgroup count {bound} provably exceeds the cap {cap}")]
    ProvablyTooManySubgroups { cap: usize, bound: BigInt },
    #[error("not a valid group table: {0}")]
    Invalid(String),
    #[error("{p} does not divide the group order {order}")]
    NotADivisor { p: u64, order: usize },
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error(transparent)]
    Cayley(#[from] cayley::CayleyError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// Construction and enumeration caps.
#[derive(Debug, Clone)]
pub struct GroupLimits {
    pub max_order: usize,
    pub max_subgroups: usize,
}

impl Default for GroupLimits {
    fn default() -> Self {
        GroupLimits { max_order: 5000, max_subgroups: 1_000_000 }
    }
}

/// How associativity was verified for a table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AssocCheck {
    /// All `n^3` triples.
    Exhaustive,
    /// Deterministically seeded sample of this many triples.
    Sampled(u32),
}

/// A finite group as a validated Cayley table (row i, column j holds the
/// index of `x_i * x_j`).
#[derive(Debug, Clone)]
pub struct GroupTable {
    pub name: String,
    order: usize,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
    pub assoc_check: AssocCheck,
    /// Set by the elementary abelian constructor; enables the provable
    /// subgroup-count precheck.
    pub elementary_abelian: Option<(u64, u32)>,
}

const EXHAUSTIVE_ASSOC_LIMIT: usize = 128;
const SAMPLED_ASSOC_TRIPLES: u32 = 10_000;

impl GroupTable {
    /// Validate a raw table: index range, identity, latin-square rows and
    /// columns (hence inverses), and associativity — exhaustive up to order
    /// 128, a seeded sample of 10^4 triples above.
    pub fn validated(name: String, order: usize, table: Vec<u32>) -> Result<GroupTable, GroupError> {
        if order == 0 {
            return Err(GroupError::Invalid("order must be at least 1".into()));
        }
        if table.len() != order * order {
            return Err(GroupError::Invalid(format!(
                "table has {} entries, expected {}",
                table.len(),
                order * order
            )));
        }
        if let Some(bad) = table.iter().find(|&&x| x as usize >= order) {
            return Err(GroupError::Invalid(format!("entry {bad} out of range 0..{order}")));
        }
        let at = |i: usize, j: usize| table[i * order + j] as usize;

        // latin square: every row and column is a permutation
        let mut seen = vec![false; order];
        for i in 0..order {
            seen.fill(false);
            for j in 0..order {
                let v = at(i, j);
                if seen[v] {
                    return Err(GroupError::Invalid(format!("row {i} repeats element {v}")));
                }
                seen[v] = true;
            }
            seen.fill(false);
            for j in 0..order {
                let v = at(j, i);
                if seen[v] {
                    return Err(GroupError::Invalid(format!("column {i} repeats element {v}")));
                }
                seen[v] = true;
            }
        }

        let identity = (0..order)
            .find(|&e| (0..order).all(|x| at(e, x) == x && at(x, e) == x))
            .ok_or_else(|| GroupError::Invalid("no two-sided identity".into()))?;

        let mut inverse = vec![u32::MAX; order];
        for x in 0..order {
            let inv = (0..order)
                .find(|&y| at(x, y) == identity && at(y, x) == identity)
                .ok_or_else(|| GroupError::Invalid(format!("element {x} has no inverse")))?;
            inverse[x] = inv as u32;
        }

        let assoc_check = if order <= EXHAUSTIVE_ASSOC_LIMIT {
            for x in 0..order {
                for y in 0..order {
                    let xy = at(x, y);
                    for z in 0..order {
                        if at(xy, z) != at(x, at(y, z)) {
                            return Err(GroupError::Invalid(format!(
                                "associativity fails at ({x}, {y}, {z})"
                            )));
                        }
                    }
                }
            }
            AssocCheck::Exhaustive
        } else {
            // deterministic MMIX LCG so reports are reproducible
            let mut state = 0x9E3779B97F4A7C15u64 ^ (order as u64);
            let mut next = || {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                (state >> 33) as usize % order
            };
            for _ in 0..SAMPLED_ASSOC_TRIPLES {
                let (x, y, z) = (next(), next(), next());
                if at(at(x, y), z) != at(x, at(y, z)) {
                    return Err(GroupError::Invalid(format!(
                        "associativity fails at ({x}, {y}, {z})"
                    )));
                }
            }
            AssocCheck::Sampled(SAMPLED_ASSOC_TRIPLES)
        };

        Ok(GroupTable {
            name,
            order,
            table,
            identity: identity as u32,
            inverse,
            assoc_check,
            elementary_abelian: None,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    #[inline]
    pub fn op(&self, i: u32, j: u32) -> u32 {
        self.table[i as usize * self.order + j as usize]
    }

    pub fn inverse_of(&self, x: u32) -> u32 {
        self.inverse[x as usize]
    }

    pub fn raw_table(&self) -> &[u32] {
        &self.table
    }
}

/// A subgroup as a sorted set of element indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Subgroup {
    pub elements: Vec<u32>,
}

impl Subgroup {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.elements.binary_search(&x).is_ok()
    }

    /// Closure under the table's product and inverses, identity included.
    pub fn is_subgroup_of(&self, g: &GroupTable) -> bool {
        if !self.contains(g.identity()) {
            return false;
        }
        for &x in &self.elements {
            if !self.contains(g.inverse_of(x)) {
                return false;
            }
            for &y in &self.elements {
                if !self.contains(g.op(x, y)) {
                    return false;
                }
            }
        }
        true
    }
}

/// Result of a (possibly capped) enumeration; `complete` is false when the
/// cap was hit, and the partial list is returned flagged rather than
/// silently truncated.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub subgroups: Vec<Subgroup>,
    pub complete: bool,
}

struct MaskSet {
    mask: Vec<u64>,
    els: Vec<u32>,
}

impl MaskSet {
    fn new(words: usize) -> MaskSet {
        MaskSet { mask: vec![0; words], els: Vec::new() }
    }

    fn insert(&mut self, x: u32) -> bool {
        let w = (x / 64) as usize;
        let b = 1u64 << (x % 64);
        if self.mask[w] & b == 0 {
            self.mask[w] |= b;
            self.els.push(x);
            true
        } else {
            false
        }
    }

    fn contains(&self, x: u32) -> bool {
        self.mask[(x / 64) as usize] & (1u64 << (x % 64)) != 0
    }

    fn full_group(g: &GroupTable) -> MaskSet {
        let words = g.order().div_ceil(64);
        let mut s = MaskSet::new(words);
        for x in 0..g.order() as u32 {
            s.insert(x);
        }
        s
    }
}

/// Subgroup closure of `seed`, with the elements before `start` assumed
/// already closed among themselves. Early-exits to the full group as soon
/// as the element count passes the largest proper divisor of the order.
fn closure(g: &GroupTable, mut set: MaskSet, start: usize, giveup: usize) -> MaskSet {
    let mut i = start.max(1);
    while i < set.els.len() {
        let x = set.els[i];
        for j in 0..=i {
            let y = set.els[j];
            let a = g.op(x, y);
            let b = g.op(y, x);
            set.insert(a);
            set.insert(b);
            if set.els.len() > giveup {
                return MaskSet::full_group(g);
            }
        }
        i += 1;
    }
    set
}

fn smallest_prime_factor(n: usize) -> usize {
    if n <= 1 {
        return n;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return d;
        }
        d += 1;
    }
    n
}

/// Enumerate the complete set of subgroups by closure extension: seed with
/// all cyclic subgroups, repeatedly form `<H, g>` for coset representatives
/// `g` outside `H`, deduplicate by element set, to a fixpoint.
pub fn enumerate_subgroups(g: &GroupTable, cap: usize) -> Result<Enumeration, GroupError> {
    let n = g.order();
    let is_small_elem_ab = g.elementary_abelian.is_some_and(|(_, k)| k <= 7);
    if n > 512 && !is_small_elem_ab {
        return Err(GroupError::TooLargeToEnumerate(n));
    }
    if let Some((p, k)) = g.elementary_abelian {
        // exact count known in advance; refuse provable blowups
        let expected = subgroup_sum(k, p)?;
        if expected > BigInt::from(cap) {
            return Err(GroupError::ProvablyTooManySubgroups { cap, bound: expected });
        }
    }
    let words = n.div_ceil(64);
    // full group short-circuit: any closure larger than n / smallest prime
    // factor must be everything (its order divides n)
    let giveup = if n == 1 { 1 } else { n / smallest_prime_factor(n) };

    let mut seen: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut subgroups: Vec<MaskSet> = Vec::new();
    let mut frontier: Vec<usize> = Vec::new();

    let mut push = |set: MaskSet, subgroups: &mut Vec<MaskSet>, frontier: &mut Vec<usize>| {
        if !seen.contains_key(&set.mask) {
            seen.insert(set.mask.clone(), subgroups.len());
            frontier.push(subgroups.len());
            subgroups.push(set);
        }
    };

    // trivial subgroup and all cyclic subgroups
    let mut trivial = MaskSet::new(words);
    trivial.insert(g.identity());
    push(trivial, &mut subgroups, &mut frontier);
    for x in 0..n as u32 {
        let mut seed = MaskSet::new(words);
        seed.insert(g.identity());
        seed.insert(x);
        let closed = closure(g, seed, 0, giveup);
        push(closed, &mut subgroups, &mut frontier);
    }

    while let Some(idx) = frontier.pop() {
        if subgroups.len() > cap {
            break;
        }
        let base_els = subgroups[idx].els.clone();
        let base_mask = subgroups[idx].mask.clone();
        if base_els.len() == n {
            continue;
        }
        // only one representative per coset H*x generates each extension
        let mut covered = MaskSet { mask: base_mask.clone(), els: Vec::new() };
        for x in 0..n as u32 {
            if covered.contains(x) {
                continue;
            }
            for &h in &base_els {
                covered.insert(g.op(h, x));
            }
            let mut seed = MaskSet { mask: base_mask.clone(), els: base_els.clone() };
            seed.insert(x);
            let closed = closure(g, seed, base_els.len(), giveup);
            push(closed, &mut subgroups, &mut frontier);
        }
    }

    let complete = subgroups.len() <= cap;
    let mut out: Vec<Subgroup> = subgroups
        .into_iter()
        .map(|s| {
            let mut elements = s.els;
            elements.sort_unstable();
            Subgroup { elements }
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(Enumeration { subgroups: out, complete })
}

/// Sylow census: number of subgroups of maximal `p`-power order among the
/// enumerated subgroups, with the divisibility and congruence checks.
#[derive(Debug, Clone)]
pub struct SylowCensus {
    pub p: u64,
    pub sylow_order: usize,
    pub count: usize,
    /// `count <= order / p^a`
    pub divides_bound_ok: bool,
    /// `count = 1 mod p`
    pub congruence_ok: bool,
}

pub fn sylow_census(g: &GroupTable, subs: &[Subgroup], p: u64) -> Result<SylowCensus, GroupError> {
    let order = g.order();
    if p < 2 || order as u64 % p != 0 {
        return Err(GroupError::NotADivisor { p, order });
    }
    let mut pa = 1usize;
    let mut rest = order;
    while rest as u64 % p == 0 {
        rest /= p as usize;
        pa *= p as usize;
    }
    let count = subs.iter().filter(|h| h.len() == pa).count();
    Ok(SylowCensus {
        p,
        sylow_order: pa,
        count,
        divides_bound_ok: count <= order / pa,
        congruence_ok: count % p as usize == 1,
    })
}

/// Full bound report for one group: subgroup count against `f(r)`, the
/// chain-length bound `r^floor(log2 r)`, and the main bound `B(r)`.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub name: String,
    pub order: usize,
    pub subgroup_count: usize,
    pub complete: bool,
    pub f_bound: Bound,
    pub trivial_bound: Option<BigInt>,
    pub main_bound: CertReal,
    pub count_le_f: Verdict,
    pub count_le_trivial: Outcome,
    pub count_le_main: Verdict,
    pub outcome: Outcome,
}

pub fn check_theorem(
    g: &GroupTable,
    enumeration: &Enumeration,
    prec_cap: u32,
) -> Result<TheoremReport, GroupError> {
    let r = g.order() as u64;
    let count = enumeration.subgroups.len();
    let count_expr = Expr::int(count as i64);

    if r == 1 {
        // bound applies to non-identity groups; the trivial group has its
        // one subgroup and every bound degenerates to >= 1
        let b = CertReal::from_rational(&crate::sgbound::bound_coefficient(), 64);
        let v = Verdict::new(Outcome::Verified, 0, None);
        return Ok(TheoremReport {
            name: g.name.clone(),
            order: 1,
            subgroup_count: count,
            complete: enumeration.complete,
            f_bound: Bound::Exact(BigInt::from(1)),
            trivial_bound: None,
            main_bound: b,
            count_le_f: v.clone(),
            count_le_trivial: Outcome::Verified,
            count_le_main: v,
            outcome: if count == 1 { Outcome::Verified } else { Outcome::Refuted },
        });
    }

    let fact = factorize(r)?;
    let f = f_expr(&fact)?;
    let count_le_f = certify_le(&count_expr, &f, prec_cap)?;
    let f_bound = match f.exact() {
        Some(v) => Bound::Exact(v.to_integer()),
        None => Bound::Enclosure(f.eval(96)?),
    };

    let triv = trivial_bound(r)?;
    let count_le_trivial =
        if BigInt::from(count) <= triv { Outcome::Verified } else { Outcome::Refuted };

    let b_expr = bound_b_expr(r);
    let count_le_main = certify_le(&count_expr, &b_expr, prec_cap)?;
    let main_bound = b_expr.eval(96)?;

    let outcome = combine_outcomes([
        claim_outcome(&count_le_f),
        count_le_trivial,
        claim_outcome(&count_le_main),
        if enumeration.complete { Outcome::Verified } else { Outcome::Undetermined },
    ]);
    Ok(TheoremReport {
        name: g.name.clone(),
        order: g.order(),
        subgroup_count: count,
        complete: enumeration.complete,
        f_bound,
        trivial_bound: Some(triv),
        main_bound,
        count_le_f,
        count_le_trivial,
        count_le_main,
        outcome,
    })
}

pub fn theorem_report_json(r: &TheoremReport) -> serde_json::Value {
    json!({
        "group": r.name,
        "order": r.order,
        "subgroup_count": r.subgroup_count,
        "enumeration_complete": r.complete,
        "f_bound": match &r.f_bound {
            Bound::Exact(v) => json!(v.to_string()),
            Bound::Enclosure(c) => interval_json(c, 4),
        },
        "trivial_bound": r.trivial_bound.as_ref().map(|t| t.to_string()),
        "main_bound": interval_json(&r.main_bound, 4),
        "count_le_f": verdict_json(&r.count_le_f),
        "count_le_trivial": r.count_le_trivial,
        "count_le_main": verdict_json(&r.count_le_main),
        "outcome": r.outcome,
    })
}

/// The constructed desk-scale suite: every group of order below 16 up to
/// isomorphism, plus assorted families up to `max_order`.
pub fn desk_suite(max_order: usize) -> Result<Vec<GroupTable>, GroupError> {
    let limits = GroupLimits { max_order: max_order.max(15), ..GroupLimits::default() };
    let mut suite = Vec::new();

    // all 28 groups of order < 16, up to isomorphism
    for n in 1..16 {
        suite.push(construct::cyclic(n, &limits)?);
    }
    suite.push(construct::elementary_abelian(2, 2, &limits)?); // C2 x C2
    suite.push(construct::elementary_abelian(2, 3, &limits)?); // C2^3
    suite.push(construct::direct_product(
        &construct::cyclic(4, &limits)?,
        &construct::cyclic(2, &limits)?,
        &limits,
    )?); // C4 x C2
    suite.push(construct::elementary_abelian(3, 2, &limits)?); // C3 x C3
    suite.push(construct::direct_product(
        &construct::cyclic(6, &limits)?,
        &construct::cyclic(2, &limits)?,
        &limits,
    )?); // C6 x C2
    for n in [6, 8, 10, 12, 14] {
        suite.push(construct::dihedral(n, &limits)?);
    }
    suite.push(construct::dicyclic(2, &limits)?); // Q8
    suite.push(construct::dicyclic(3, &limits)?); // order 12
    suite.push(construct::alternating(4, &limits)?);

    // families beyond 16
    for n in [16usize, 24, 36, 60, 100, 128, 200, 256, 360, 512] {
        if n <= max_order {
            suite.push(construct::cyclic(n, &limits)?);
        }
    }
    for n in [16usize, 24, 32, 48, 64, 128, 256, 512] {
        if n <= max_order {
            suite.push(construct::dihedral(n, &limits)?);
        }
    }
    for (p, ks) in [(2u64, 4u32..=6), (3, 3..=4), (5, 2..=3), (7, 2..=2), (11, 2..=2)] {
        for k in ks {
            if (p as usize).pow(k) <= max_order {
                suite.push(construct::elementary_abelian(p, k, &limits)?);
            }
        }
    }
    // symmetric groups from degree 4 (degree 3 is the dihedral group of
    // order 6, already present)
    for n in [4u32, 5] {
        if [24usize, 120][(n - 4) as usize] <= max_order {
            suite.push(construct::symmetric(n, &limits)?);
        }
    }
    if 60 <= max_order {
        suite.push(construct::alternating(5, &limits)?);
    }
    for k in [4usize, 6, 8] {
        if 4 * k <= max_order {
            suite.push(construct::dicyclic(k, &limits)?);
        }
    }
    // a few products with known structure
    if 48 <= max_order {
        suite.push(construct::direct_product(
            &construct::symmetric(4, &limits)?,
            &construct::cyclic(2, &limits)?,
            &limits,
        )?);
    }
    if 36 <= max_order {
        suite.push(construct::direct_product(
            &construct::symmetric(3, &limits)?,
            &construct::symmetric(3, &limits)?,
            &limits,
        )?);
    }
    if 24 <= max_order {
        suite.push(construct::direct_product(
            &construct::dicyclic(2, &limits)?,
            &construct::cyclic(3, &limits)?,
            &limits,
        )?);
    }
    Ok(suite)
}

/// Run the bound checks over a suite of groups; one certificate per suite.
pub fn suite_certificate(max_order: usize, cap: usize, prec_cap: u32) -> Result<Certificate, GroupError> {
    let t0 = Instant::now();
    let suite = desk_suite(max_order)?;
    let reports = crate::parallel::map_slice(&suite, |g| -> Result<TheoremReport, GroupError> {
        let en = enumerate_subgroups(g, cap)?;
        check_theorem(g, &en, prec_cap)
    });
    let mut items = Vec::new();
    let mut outcomes = Vec::new();
    for r in reports {
        let r = r?;
        outcomes.push(r.outcome);
        items.push(json!({
            "group": r.name,
            "order": r.order,
            "subgroups": r.subgroup_count,
            "outcome": r.outcome,
        }));
    }
    let mut cert = Certificate::new(
        format!("groups/suite-le-{max_order}"),
        combine_outcomes(outcomes),
        prec_cap,
    )
    .with_detail(json!({
        "groups_checked": items.len(),
        "max_order": max_order,
        "reports": items,
    }));
    cert.elapsed_ms = t0.elapsed().as_millis() as u64;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::PREC_CAP_DEFAULT as CAP;

    fn limits() -> GroupLimits {
        GroupLimits::default()
    }

    fn count(g: &GroupTable) -> usize {
        enumerate_subgroups(g, 1_000_000).unwrap().subgroups.len()
    }

    #[test]
    fn cyclic_subgroups_equal_divisor_count() {
        // tau(12) = 6
        assert_eq!(count(&construct::cyclic(12, &limits()).unwrap()), 6);
        assert_eq!(count(&construct::cyclic(1, &limits()).unwrap()), 1);
        assert_eq!(count(&construct::cyclic(30, &limits()).unwrap()), 8);
    }

    #[test]
    fn symmetric_4_has_30_subgroups() {
        // brute-forced independently before the build
        let g = construct::symmetric(4, &limits()).unwrap();
        assert_eq!(count(&g), 30);
    }

    #[test]
    fn known_small_counts() {
        // all frozen from the independent enumeration oracle
        assert_eq!(count(&construct::alternating(4, &limits()).unwrap()), 10);
        assert_eq!(count(&construct::dicyclic(2, &limits()).unwrap()), 6); // Q8
        assert_eq!(count(&construct::dicyclic(3, &limits()).unwrap()), 8);
        assert_eq!(count(&construct::dihedral(8, &limits()).unwrap()), 10);
        assert_eq!(count(&construct::dihedral(12, &limits()).unwrap()), 16);
        assert_eq!(count(&construct::elementary_abelian(2, 4, &limits()).unwrap()), 67);
        assert_eq!(count(&construct::elementary_abelian(3, 3, &limits()).unwrap()), 28);
    }

    #[test]
    fn alternating_5_has_59_subgroups() {
        let g = construct::alternating(5, &limits()).unwrap();
        assert_eq!(count(&g), 59);
    }

    #[test]
    fn subgroups_pass_closure_and_lagrange() {
        let g = construct::symmetric(4, &limits()).unwrap();
        let en = enumerate_subgroups(&g, 1_000_000).unwrap();
        assert!(en.complete);
        for h in &en.subgroups {
            assert!(h.is_subgroup_of(&g));
            assert_eq!(g.order() % h.len(), 0, "Lagrange");
        }
    }

    #[test]
    fn enumeration_respects_caps() {
        let g = construct::symmetric(4, &limits()).unwrap();
        let en = enumerate_subgroups(&g, 10).unwrap();
        assert!(!en.complete);
        assert!(!en.subgroups.is_empty());

        let too_big = construct::cyclic(600, &limits()).unwrap();
        assert!(matches!(
            enumerate_subgroups(&too_big, 100),
            Err(GroupError::TooLargeToEnumerate(600))
        ));

        // elementary abelian precheck: count provably over the cap
        let e = construct::elementary_abelian(2, 6, &limits()).unwrap();
        assert!(matches!(
            enumerate_subgroups(&e, 1000),
            Err(GroupError::ProvablyTooManySubgroups { .. })
        ));
    }

    #[test]
    fn sylow_census_s4() {
        let g = construct::symmetric(4, &limits()).unwrap();
        let en = enumerate_subgroups(&g, 1_000_000).unwrap();
        let s2 = sylow_census(&g, &en.subgroups, 2).unwrap();
        assert_eq!((s2.count, s2.sylow_order), (3, 8));
        assert!(s2.divides_bound_ok && s2.congruence_ok);
        let s3 = sylow_census(&g, &en.subgroups, 3).unwrap();
        assert_eq!((s3.count, s3.sylow_order), (4, 3));
        assert!(s3.divides_bound_ok && s3.congruence_ok);
        assert!(sylow_census(&g, &en.subgroups, 5).is_err());

        let c12 = construct::cyclic(12, &limits()).unwrap();
        let en = enumerate_subgroups(&c12, 1_000_000).unwrap();
        let s2 = sylow_census(&c12, &en.subgroups, 2).unwrap();
        assert_eq!(s2.count, 1);
    }

    #[test]
    fn theorem_check_s4() {
        let g = construct::symmetric(4, &limits()).unwrap();
        let en = enumerate_subgroups(&g, 1_000_000).unwrap();
        let rep = check_theorem(&g, &en, CAP).unwrap();
        assert_eq!(rep.subgroup_count, 30);
        // f(24) = 24 * S(2,3) * S(3,1) = 24 * 16 * 2 = 768
        assert_eq!(rep.f_bound, Bound::Exact(BigInt::from(768)));
        assert_eq!(rep.outcome, Outcome::Verified);
    }

    #[test]
    fn theorem_check_trivial_group() {
        let g = construct::cyclic(1, &limits()).unwrap();
        let en = enumerate_subgroups(&g, 10).unwrap();
        let rep = check_theorem(&g, &en, CAP).unwrap();
        assert_eq!(rep.subgroup_count, 1);
        assert_eq!(rep.outcome, Outcome::Verified);
    }

    #[test]
    fn direct_product_count_is_supermultiplicative() {
        let c2 = construct::cyclic(2, &limits()).unwrap();
        let klein = construct::direct_product(&c2, &c2, &limits()).unwrap();
        assert_eq!(count(&klein), 5); // >= 2 * 2
        let s3 = construct::symmetric(3, &limits()).unwrap();
        let d12 = construct::direct_product(&s3, &c2, &limits()).unwrap();
        assert_eq!(count(&d12), 16); // >= 6 * 2
    }

    #[test]
    fn invalid_tables_rejected() {
        // 2x2 with a repeated row entry
        assert!(matches!(
            GroupTable::validated("bad".into(), 2, vec![0, 0, 1, 0]),
            Err(GroupError::Invalid(_))
        ));
        // subtraction mod 3: a latin square with no two-sided identity
        assert!(GroupTable::validated("bad".into(), 3, vec![0, 2, 1, 1, 0, 2, 2, 1, 0]).is_err());
        // wrong size
        assert!(GroupTable::validated("bad".into(), 2, vec![0, 1, 1]).is_err());
    }

    #[test]
    fn desk_suite_has_all_small_orders() {
        let suite = desk_suite(16).unwrap();
        let mut by_order = std::collections::HashMap::new();
        for g in &suite {
            if g.order() < 16 {
                *by_order.entry(g.order()).or_insert(0usize) += 1;
            }
        }
        // 1,2,3,5,7,11,13: one group; 4,6,9,10,14,15: per classification;
        // 8: five; 12: five
        assert_eq!(by_order[&8], 5);
        assert_eq!(by_order[&12], 5);
        assert_eq!(by_order[&4], 2);
        assert_eq!(by_order[&9], 2);
        let total: usize = by_order.values().sum();
        assert_eq!(total, 28);
    }
}
