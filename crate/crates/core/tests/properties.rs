//! Property tests and independent oracles.
//!
//! The subspace enumerator here is the independent ground truth for the
//! Gaussian-binomial values frozen in the unit tests: it never touches the
//! product formula it checks.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use proptest::prelude::*;

use sgcert_core::certified::{
    certified_compare, log2_enclosure, pow2_enclosure, CertReal, Dyadic, Expr, Outcome, Round,
};
use sgcert_core::corollary::{factorize, sweep, SweepRange};
use sgcert_core::sgbound::{gaussian_binomial, s_bound, shalev_check, Bound};

/// Enumerate all subspaces of the vector space F2^k by span extension:
/// start from the zero space, repeatedly adjoin an outside vector and close
/// under xor, deduplicating by element set.
fn xor_subspaces(k: u32) -> Vec<Vec<u32>> {
    let n: u32 = 1 << k;
    let close = |seed: Vec<u32>| -> Vec<u32> {
        let mut mask = vec![false; n as usize];
        let mut els: Vec<u32> = Vec::new();
        for v in seed {
            if !mask[v as usize] {
                mask[v as usize] = true;
                els.push(v);
            }
        }
        let mut i = 0;
        while i < els.len() {
            for j in 0..=i {
                let w = els[i] ^ els[j];
                if !mask[w as usize] {
                    mask[w as usize] = true;
                    els.push(w);
                }
            }
            i += 1;
        }
        els.sort_unstable();
        els
    };
    let mut seen = std::collections::BTreeSet::new();
    seen.insert(close(vec![0]));
    loop {
        let mut grew = false;
        let snapshot: Vec<Vec<u32>> = seen.iter().cloned().collect();
        for space in snapshot {
            for v in 1..n {
                if !space.contains(&v) {
                    let mut seed = space.clone();
                    seed.push(v);
                    if seen.insert(close(seed)) {
                        grew = true;
                    }
                }
            }
        }
        if !grew {
            return seen.into_iter().collect();
        }
    }
}

#[test]
fn subspace_oracle_confirms_gaussian_binomials() {
    // dimension-2 subspaces of F2^4: the frozen value 35
    let spaces = xor_subspaces(4);
    let dim2 = spaces.iter().filter(|s| s.len() == 4).count();
    assert_eq!(BigInt::from(dim2), gaussian_binomial(4, 2, 2).unwrap());
    assert_eq!(spaces.len(), 67); // = S(2,4)

    // all subspaces of F2^6: the frozen value 2825
    let spaces = xor_subspaces(6);
    assert_eq!(spaces.len(), 2825);
    for dim in 0..=6u32 {
        let count = spaces.iter().filter(|s| s.len() == (1usize << dim)).count();
        assert_eq!(BigInt::from(count), gaussian_binomial(6, dim, 2).unwrap(), "dim {dim}");
    }
}

#[test]
fn shalev_bound_holds_on_full_grid() {
    for p in [2u64, 3, 5, 7, 11, 13] {
        for a in 1..=10u32 {
            for k in 0..=a {
                let v = shalev_check(a, k, p, 4096).unwrap();
                assert!(v.is_verified(), "({a},{k},{p}): {v:?}");
            }
        }
    }
}

#[test]
fn s_is_monotone_dominating_for_small_exponents() {
    // f(r) >= S(p_i, a_i) factor monotonicity on a spread of orders
    for r in [12u64, 60, 71_896, 2_916, 407_850] {
        let fact = factorize(r).unwrap();
        let f = sgcert_core::sgbound::f_of_r(&fact, 96).unwrap();
        for &(p, a) in fact.pairs() {
            let s = s_bound(p, a, 96).unwrap();
            match (&f, &s.value) {
                (Bound::Exact(fv), Bound::Exact(sv)) => assert!(fv >= sv),
                (Bound::Enclosure(fe), Bound::Exact(sv)) => {
                    assert!(fe.hi() >= &Dyadic::from_bigint(sv.clone()))
                }
                (Bound::Enclosure(fe), Bound::Enclosure(se)) => assert!(fe.hi() >= se.lo()),
                (Bound::Exact(_), Bound::Enclosure(_)) => {
                    unreachable!("exact f cannot have enclosure factors")
                }
            }
        }
    }
}

#[test]
fn elementary_abelian_3_matches_gaussian_sums() {
    // the p = 3 half of the enumeration/formula equivalence, up to k = 5
    let limits = sgcert_core::groups::GroupLimits::default();
    for k in 1..=5u32 {
        let expected = sgcert_core::sgbound::subgroup_sum(k, 3).unwrap();
        let g = sgcert_core::groups::construct::elementary_abelian(3, k, &limits).unwrap();
        let count =
            sgcert_core::groups::enumerate_subgroups(&g, 1_000_000).unwrap().subgroups.len();
        assert_eq!(BigInt::from(count), expected, "k = {k}");
    }
}

#[test]
fn thousand_commuted_products_compare_equal() {
    // splitmix-style stream; every pair must short-circuit to Equal
    let mut state = 0xC0FFEEu64;
    let mut next = || {
        state = state.wrapping_add(0x9E3779B97F4A7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
        (z ^ (z >> 31)) % 1_000_000 + 2
    };
    for _ in 0..1000 {
        let (a, b) = (next(), next());
        if a == b {
            continue;
        }
        let lhs = Expr::prod([Expr::log2(a), Expr::log2(b)]);
        let rhs = Expr::prod([Expr::log2(b), Expr::log2(a)]);
        assert_eq!(certified_compare(&lhs, &rhs, 128).unwrap().outcome, Outcome::Equal);
        let order = certified_compare(&Expr::int(a as i64), &Expr::int(b as i64), 128).unwrap();
        let expected = if a < b { Outcome::Verified } else { Outcome::Refuted };
        assert_eq!(order.outcome, expected);
    }
}

#[test]
fn maximize_eps_ignores_pool_order() {
    let a = sgcert_core::lemmas::maximize_eps(&[13, 3, 17, 5, 11, 7, 23], None, 4096).unwrap();
    let b = sgcert_core::lemmas::maximize_eps(&[3, 5, 7, 11, 13, 17, 23], None, 4096).unwrap();
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, b.1);
}

#[test]
fn corollary_full_run_verifies_with_residual_classes() {
    let cert =
        sgcert_core::corollary::verify_corollary1(&sgcert_core::corollary::default_ranges(), 4096)
            .unwrap();
    assert_eq!(cert.outcome, Outcome::Verified, "{:?}", cert.detail);
    let classes: Vec<&str> = cert.detail["residual_classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(
        classes,
        vec!["p in {5, 7, 11, 13, 17}, a = 1", "p = 3, a <= 3", "p = 2, any a"]
    );
    assert_eq!(cert.detail["sweep"]["orders_checked"], 16_743);
    let coverage = cert.detail["coverage"].as_array().unwrap();
    assert_eq!(coverage.len(), 9);
    assert!(coverage.iter().all(|c| c["first_m_beyond_is_out"] == true));
}

#[test]
fn sweep_runs_are_deterministic() {
    let ranges = [SweepRange::new(23, 1, 8).unwrap(), SweepRange::new(3, 4, 40).unwrap()];
    let a = sweep(&ranges, 4096).unwrap();
    let b = sweep(&ranges, 4096).unwrap();
    assert_eq!(a.claim_id, b.claim_id);
    assert_eq!(a.outcome, b.outcome);
    assert_eq!(a.detail, b.detail); // elapsed_ms lives outside detail
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dyadic_rounding_brackets(mant in -1_000_000_000i64..1_000_000_000, exp in -40i64..40, bits in 4u32..48) {
        let x = Dyadic::new(BigInt::from(mant), exp);
        let lo = x.round(bits, Round::Down);
        let hi = x.round(bits, Round::Up);
        prop_assert!(lo <= x && x <= hi);
        prop_assert!(lo.mant_bits() <= bits as u64 + 1);
    }

    #[test]
    fn dyadic_field_identities(a in -100_000i64..100_000, b in -100_000i64..100_000, ea in -10i64..10, eb in -10i64..10) {
        let x = Dyadic::new(BigInt::from(a), ea);
        let y = Dyadic::new(BigInt::from(b), eb);
        prop_assert_eq!(x.add(&y).sub(&y), x.clone());
        prop_assert_eq!(x.mul(&y), y.mul(&x));
        prop_assert_eq!(x.add(&y), y.add(&x));
    }

    #[test]
    fn log2_enclosures_nest_and_contain(n in 2u64..1_000_000_000) {
        let coarse = log2_enclosure(&BigUint::from(n), 48).unwrap();
        let fine = log2_enclosure(&BigUint::from(n), 96).unwrap();
        prop_assert!(coarse.contains_interval(&fine));
        // 2^lo <= n <= 2^hi
        let back = pow2_enclosure(&fine, 64).unwrap();
        prop_assert!(back.contains(&Dyadic::from_u64(n)));
    }

    #[test]
    fn compare_agrees_with_integer_order(a in -1_000_000_000i64..1_000_000_000, b in -1_000_000_000i64..1_000_000_000) {
        let v = certified_compare(&Expr::int(a), &Expr::int(b), 256).unwrap();
        let expected = match a.cmp(&b) {
            std::cmp::Ordering::Less => Outcome::Verified,
            std::cmp::Ordering::Greater => Outcome::Refuted,
            std::cmp::Ordering::Equal => Outcome::Equal,
        };
        prop_assert_eq!(v.outcome, expected);
    }

    #[test]
    fn commuted_log_products_are_equal(a in 2u64..1_000_000, b in 2u64..1_000_000) {
        let lhs = Expr::prod([Expr::log2(a), Expr::log2(b)]);
        let rhs = Expr::prod([Expr::log2(b), Expr::log2(a)]);
        let v = certified_compare(&lhs, &rhs, 128).unwrap();
        prop_assert_eq!(v.outcome, Outcome::Equal);
    }

    #[test]
    fn factorization_reconstructs(n in 2u64..5_000_000) {
        let f = factorize(n).unwrap();
        prop_assert_eq!(f.value_u64(), Some(n));
        // strictly increasing primes with positive exponents is enforced by
        // construction; spot the coprime structure
        for w in f.pairs().windows(2) {
            prop_assert!(w[0].0 < w[1].0);
        }
    }

    #[test]
    fn sweep_range_counts(p_idx in 0usize..4, a in 1u32..3, m_max in 1u64..500) {
        let p = [2u64, 3, 5, 7][p_idx];
        let range = SweepRange::new(p, a, m_max).unwrap();
        let orders = range.orders();
        prop_assert_eq!(orders.len() as u64, range.coprime_count());
        prop_assert_eq!(orders.len() as u64, m_max - m_max / p);
        for r in orders {
            prop_assert_eq!(r % p.pow(a), 0);
            prop_assert!((r / p.pow(a)) % p != 0);
        }
    }

    #[test]
    fn interval_refinement_nests_through_pow(n in 2u64..100_000, num in 1i64..16, den in 1i64..16) {
        // b^e enclosures at doubling precision must nest
        let e = Expr::pow(Expr::int(n), Expr::ratio(num, den));
        let coarse = e.eval(64).unwrap();
        let fine = e.eval(128).unwrap();
        prop_assert!(coarse.contains_interval(&fine), "{:?} vs {:?}", coarse, fine);
        prop_assert!(!fine.width().is_negative());
    }

    #[test]
    fn pow2_monotone_in_exponent(a in -1_000i64..1_000, b in -1_000i64..1_000, den in 1i64..64) {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let xa = CertReal::from_rational(&num_rational::BigRational::new(a.into(), den.into()), 64);
        let xb = CertReal::from_rational(&num_rational::BigRational::new(b.into(), den.into()), 64);
        let pa = pow2_enclosure(&xa, 64).unwrap();
        let pb = pow2_enclosure(&xb, 64).unwrap();
        prop_assert!(pa.lo() <= pb.lo());
        prop_assert!(pa.hi() <= pb.hi());
    }

    #[test]
    fn enumerated_counts_bounded_by_s(p_idx in 0usize..2, k in 1u32..4) {
        // subgroup counts of elementary abelian groups never exceed the
        // S(p, a) table value
        let p = [2u64, 3][p_idx];
        let limits = sgcert_core::groups::GroupLimits::default();
        let g = sgcert_core::groups::construct::elementary_abelian(p, k, &limits).unwrap();
        let count = sgcert_core::groups::enumerate_subgroups(&g, 1_000_000)
            .unwrap()
            .subgroups
            .len();
        match s_bound(p, k, 96).unwrap().value {
            Bound::Exact(v) => prop_assert!(BigInt::from(count) <= v),
            Bound::Enclosure(e) => prop_assert!(&Dyadic::from_u64(count as u64) <= e.hi()),
        }
    }
}
