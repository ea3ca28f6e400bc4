//! The exceptional-range sweep: enumerate every order `r` in the lemmas'
//! exception ranges, factorize it, and certify
//! `f(r) <= 7.3722 * r^(log2(r)/4 + 1.5315)`.

use std::time::Instant;

use num_rational::BigRational;
use serde_json::json;

use crate::certified::{certify_le, CertError, CertReal, Expr, Outcome};
use crate::lemmas::{self, Membership};
use crate::parallel::{map_slice, map_slice_seq};
use crate::report::{combine_outcomes, interval_json, Certificate};
use crate::sgbound::{bound_coefficient, bound_epsilon, f_expr, is_prime, Factorization};

/// One exceptional range: the orders `{m * p^a : 1 <= m <= m_max, gcd(m,p) = 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepRange {
    pub p: u64,
    pub a: u32,
    pub m_max: u64,
}

impl SweepRange {
    pub fn new(p: u64, a: u32, m_max: u64) -> Result<SweepRange, CertError> {
        if !is_prime(p) {
            return Err(CertError::NotPrime(p));
        }
        if a == 0 || m_max == 0 {
            return Err(CertError::Domain("sweep range requires a >= 1 and m_max >= 1".into()));
        }
        let pa = p
            .checked_pow(a)
            .ok_or_else(|| CertError::Domain(format!("{p}^{a} overflows the sweep range")))?;
        m_max
            .checked_mul(pa)
            .ok_or_else(|| CertError::Domain(format!("{m_max}*{p}^{a} overflows u64")))?;
        Ok(SweepRange { p, a, m_max })
    }

    /// Number of generated orders: `m_max - floor(m_max / p)`.
    pub fn coprime_count(&self) -> u64 {
        self.m_max - self.m_max / self.p
    }

    pub fn orders(&self) -> Vec<u64> {
        let pa = self.p.pow(self.a);
        (1..=self.m_max).filter(|m| m % self.p != 0).map(|m| m * pa).collect()
    }
}

/// The default manifest, shipped as data so the ranges are auditable.
pub const DEFAULT_MANIFEST: &str = include_str!("../data/default_ranges.txt");

#[derive(Debug, thiserror::Error)]
pub enum ManifestError {
    #[error("line {line}: expected three fields `p a m_max`, got {got}")]
    FieldCount { line: usize, got: usize },
    #[error("line {line}: {field} is not a valid integer: {text}")]
    BadInteger { line: usize, field: &'static str, text: String },
    #[error("line {line}: {source}")]
    BadRange {
        line: usize,
        #[source]
        source: CertError,
    },
    #[error("manifest contains no ranges")]
    Empty,
}

/// Parse a sweep manifest: whitespace-separated `p a m_max` lines, `#`
/// comments.
pub fn parse_manifest(text: &str) -> Result<Vec<SweepRange>, ManifestError> {
    let mut ranges = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(ManifestError::FieldCount { line, got: fields.len() });
        }
        let parse = |field: &'static str, text: &str| -> Result<u64, ManifestError> {
            text.parse::<u64>().map_err(|_| ManifestError::BadInteger {
                line,
                field,
                text: text.to_string(),
            })
        };
        let p = parse("p", fields[0])?;
        let a = parse("a", fields[1])?;
        let m_max = parse("m_max", fields[2])?;
        let a = u32::try_from(a).map_err(|_| ManifestError::BadInteger {
            line,
            field: "a",
            text: fields[1].to_string(),
        })?;
        ranges.push(SweepRange::new(p, a, m_max).map_err(|source| ManifestError::BadRange { line, source })?);
    }
    if ranges.is_empty() {
        return Err(ManifestError::Empty);
    }
    Ok(ranges)
}

pub fn default_ranges() -> Vec<SweepRange> {
    parse_manifest(DEFAULT_MANIFEST).expect("embedded manifest must parse")
}

/// Complete prime factorization by trial division. Covers any `n` whose
/// second-largest prime factor is below 10^7 (all sweep ranges are far
/// below that); anything harder is an explicit error, never a wrong answer.
pub fn factorize(n: u64) -> Result<Factorization, CertError> {
    if n < 2 {
        return Err(CertError::Domain(format!("cannot factorize {n} < 2")));
    }
    const TRIAL_LIMIT: u64 = 10_000_000;
    let mut rest = n;
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut push = |p: u64, a: u32| pairs.push((p, a));
    let mut d = 2u64;
    while d <= TRIAL_LIMIT && d.checked_mul(d).is_some_and(|sq| sq <= rest) {
        if rest % d == 0 {
            let mut a = 0u32;
            while rest % d == 0 {
                rest /= d;
                a += 1;
            }
            push(d, a);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        // No factor <= 10^7 remains, so `rest` is prime iff it is below
        // 10^14; beyond that we refuse rather than guess.
        if rest > TRIAL_LIMIT * TRIAL_LIMIT {
            return Err(CertError::Domain(format!(
                "cofactor {rest} of {n} exceeds the trial-division range"
            )));
        }
        push(rest, 1);
    }
    Factorization::new(pairs)
}

/// Adjustable bound parameters; the defaults are the certified constants.
/// Lowering them is how the sweep's refutation path is exercised.
#[derive(Debug, Clone)]
pub struct BoundParams {
    pub coefficient: BigRational,
    pub epsilon: BigRational,
}

impl Default for BoundParams {
    fn default() -> Self {
        BoundParams { coefficient: bound_coefficient(), epsilon: bound_epsilon() }
    }
}

fn bound_expr_with(r: u64, params: &BoundParams) -> Expr {
    Expr::prod([
        Expr::Ratio(params.coefficient.clone()),
        Expr::pow(
            Expr::int(r),
            Expr::sum([
                Expr::prod([Expr::ratio(1, 4), Expr::log2(r)]),
                Expr::Ratio(params.epsilon.clone()),
            ]),
        ),
    ])
}

/// Per-order result used in the sweep reduction.
struct OrderCheck {
    r: u64,
    outcome: Outcome,
    ratio: Option<CertReal>,
}

fn check_order(r: u64, params: &BoundParams, prec_cap: u32) -> Result<OrderCheck, CertError> {
    let fact = factorize(r)?;
    let f = f_expr(&fact)?;
    let b = bound_expr_with(r, params);
    // One evaluation at the starting precision decides nearly every order
    // (the margins are huge); only straddles escalate through certify_le.
    let fv = f.eval(crate::certified::PREC_START)?;
    let bv = b.eval(crate::certified::PREC_START)?;
    let outcome = if fv.strictly_below(&bv) {
        Outcome::Verified
    } else if bv.strictly_below(&fv) {
        Outcome::Refuted
    } else {
        match certify_le(&f, &b, prec_cap)?.outcome {
            Outcome::Equal => Outcome::Verified,
            o => o,
        }
    };
    let ratio = fv.div(&bv).ok();
    Ok(OrderCheck { r, outcome, ratio })
}

/// Outcome of a sweep over a set of ranges.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub checked: u64,
    pub violations: Vec<u64>,
    pub undetermined: Vec<u64>,
    pub max_ratio: Option<CertReal>,
    pub max_ratio_r: Option<u64>,
}

fn sweep_reduce(checks: Vec<OrderCheck>) -> SweepOutcome {
    let mut out = SweepOutcome {
        checked: 0,
        violations: Vec::new(),
        undetermined: Vec::new(),
        max_ratio: None,
        max_ratio_r: None,
    };
    for c in checks {
        out.checked += 1;
        match c.outcome {
            Outcome::Verified | Outcome::Equal => {}
            Outcome::Refuted => out.violations.push(c.r),
            Outcome::Undetermined => out.undetermined.push(c.r),
        }
        if let Some(ratio) = c.ratio {
            let better = match &out.max_ratio {
                Some(best) => ratio.hi() > best.hi(),
                None => true,
            };
            if better {
                out.max_ratio = Some(ratio);
                out.max_ratio_r = Some(c.r);
            }
        }
    }
    out.violations.sort_unstable();
    out.undetermined.sort_unstable();
    out
}

fn run_sweep<F>(ranges: &[SweepRange], mapper: F) -> Result<SweepOutcome, CertError>
where
    F: Fn(&[u64]) -> Vec<Result<OrderCheck, CertError>>,
{
    let mut orders: Vec<u64> = Vec::new();
    for range in ranges {
        orders.extend(range.orders());
    }
    let mut checks = Vec::with_capacity(orders.len());
    for c in mapper(&orders) {
        checks.push(c?);
    }
    Ok(sweep_reduce(checks))
}

/// Sweep every generated order, data-parallel when enabled.
pub fn sweep_outcome(
    ranges: &[SweepRange],
    params: &BoundParams,
    prec_cap: u32,
) -> Result<SweepOutcome, CertError> {
    run_sweep(ranges, |orders| map_slice(orders, |&r| check_order(r, params, prec_cap)))
}

/// Sequential sweep; the benchmark baseline and the `parallel`-less path.
pub fn sweep_outcome_seq(
    ranges: &[SweepRange],
    params: &BoundParams,
    prec_cap: u32,
) -> Result<SweepOutcome, CertError> {
    run_sweep(ranges, |orders| map_slice_seq(orders, |&r| check_order(r, params, prec_cap)))
}

fn sweep_certificate(
    claim_id: &str,
    ranges: &[SweepRange],
    outcome: SweepOutcome,
    prec_cap: u32,
    elapsed_ms: u64,
) -> Certificate {
    let expected: u64 = ranges.iter().map(|r| r.coprime_count()).sum();
    let coverage_ok = expected == outcome.checked;
    let status = if !outcome.undetermined.is_empty() {
        Outcome::Undetermined
    } else if !outcome.violations.is_empty() || !coverage_ok {
        Outcome::Refuted
    } else {
        Outcome::Verified
    };
    let mut cert = Certificate::new(claim_id, status, prec_cap).with_detail(json!({
        "ranges": ranges.iter().map(|r| json!({"p": r.p, "a": r.a, "m_max": r.m_max})).collect::<Vec<_>>(),
        "orders_checked": outcome.checked,
        "coprime_count_expected": expected,
        "violations": outcome.violations,
        "undetermined": outcome.undetermined,
        "max_ratio": outcome.max_ratio.as_ref().map(|x| interval_json(x, 8)),
        "max_ratio_r": outcome.max_ratio_r,
    }));
    cert.elapsed_ms = elapsed_ms;
    cert
}

/// Certify `f(r) <= 7.3722 * r^(log2(r)/4 + 1.5315)` over every order the
/// ranges generate.
pub fn sweep(ranges: &[SweepRange], prec_cap: u32) -> Result<Certificate, CertError> {
    sweep_with(ranges, &BoundParams::default(), prec_cap)
}

/// Sweep against adjustable bound parameters.
pub fn sweep_with(
    ranges: &[SweepRange],
    params: &BoundParams,
    prec_cap: u32,
) -> Result<Certificate, CertError> {
    if ranges.is_empty() {
        return Err(CertError::Domain("sweep needs at least one range".into()));
    }
    let t0 = Instant::now();
    let outcome = sweep_outcome(ranges, params, prec_cap)?;
    Ok(sweep_certificate("corollary/sweep", ranges, outcome, prec_cap, t0.elapsed().as_millis() as u64))
}

/// The `(p, a)` pairs whose full exceptional ranges the manifest must cover
/// (everything outside the residual classes).
pub const REQUIRED_COVERAGE: &[(u64, u32)] =
    &[(19, 1), (23, 1), (5, 2), (7, 2), (5, 3), (3, 4), (3, 5), (3, 6), (3, 7)];

/// Residual classes the composite argument handles directly; ranges for
/// these are exempt from coverage.
pub fn residual_classes() -> Vec<String> {
    vec![
        "p in {5, 7, 11, 13, 17}, a = 1".to_string(),
        "p = 3, a <= 3".to_string(),
        "p = 2, any a".to_string(),
    ]
}

#[derive(Debug, thiserror::Error)]
pub enum CoverageError {
    #[error(
        "incomplete coverage for (p={p}, a={a}): manifest covers m <= {covered}, exceptions \
         extend to {needed}; missing cofactors [{}, {needed}]", covered + 1
    )]
    Incomplete { p: u64, a: u32, covered: u64, needed: u64 },
    #[error("manifest has no range for (p={p}, a={a})")]
    Missing { p: u64, a: u32 },
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// Reproduce the full computer check: certify that the manifest covers every
/// exceptional range outside the residual classes, then sweep all of it.
pub fn verify_corollary1(
    ranges: &[SweepRange],
    prec_cap: u32,
) -> Result<Certificate, CoverageError> {
    let t0 = Instant::now();
    let mut coverage = Vec::new();
    for &(p, a) in REQUIRED_COVERAGE {
        let range = ranges
            .iter()
            .find(|r| r.p == p && r.a == a)
            .ok_or(CoverageError::Missing { p, a })?;
        let (needed, _) = lemmas::max_exceptional_cofactor(p, a, prec_cap)?;
        if range.m_max < needed {
            return Err(CoverageError::Incomplete { p, a, covered: range.m_max, needed });
        }
        // anything past the certified maximum must be out of the set
        let mut beyond = range.m_max + 1;
        while beyond % p == 0 {
            beyond += 1;
        }
        let (mem, _) = lemmas::membership(p, a, beyond, prec_cap)?;
        coverage.push(json!({
            "p": p,
            "a": a,
            "manifest_m_max": range.m_max,
            "certified_max_m": needed,
            "first_m_beyond_is_out": mem == Membership::Out,
        }));
    }

    let sweep_cert = sweep(ranges, prec_cap)?;
    let sweep_outcome = sweep_cert.outcome;

    // The ranges with a >= 6 terminate: certified once more here because the
    // composite check leans on it.
    let termination = lemmas::tails::lemma6_termination_p3(prec_cap)?;

    let outcome = combine_outcomes([sweep_outcome, termination.outcome]);
    let mut cert = Certificate::new("corollary1", outcome, prec_cap).with_detail(json!({
        "coverage": coverage,
        "residual_classes": residual_classes(),
        "sweep": sweep_cert.detail,
        "a_ge_8_termination": termination.outcome,
    }));
    cert.elapsed_ms = t0.elapsed().as_millis() as u64;
    cert = cert.with_note(
        "every (p, a) outside the residual classes is swept to its certified maximal \
         cofactor; residual classes are handled by the composite argument",
    );
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::{Dyadic, PREC_CAP_DEFAULT};
    use crate::sgbound::bound_b_expr;
    use num_bigint::BigInt;

    const CAP: u32 = PREC_CAP_DEFAULT;

    #[test]
    fn factorize_examples() {
        let f = factorize(12).unwrap();
        assert_eq!(f.pairs(), &[(2, 2), (3, 1)]);
        let f = factorize(71_896).unwrap();
        assert_eq!(f.pairs(), &[(2, 3), (11, 1), (19, 1), (43, 1)]);
        let f = factorize(97).unwrap();
        assert_eq!(f.pairs(), &[(97, 1)]);
        assert!(factorize(1).is_err());
        assert!(factorize(0).is_err());
        // large prime cofactor within the certified range
        let f = factorize(2 * 999_999_937).unwrap();
        assert_eq!(f.pairs(), &[(2, 1), (999_999_937, 1)]);
    }

    #[test]
    fn manifest_parses_and_counts() {
        let ranges = default_ranges();
        assert_eq!(ranges.len(), 9);
        let coprime: u64 = ranges.iter().map(|r| r.coprime_count()).sum();
        assert_eq!(coprime, 16_743);
        let scanned: u64 = ranges.iter().map(|r| r.m_max).sum();
        assert_eq!(scanned, 20_246);
        // spot the coprime arithmetic: 3784 - floor(3784/19) = 3585
        let l19 = ranges.iter().find(|r| r.p == 19).unwrap();
        assert_eq!(l19.coprime_count(), 3_585);
    }

    #[test]
    fn manifest_errors_carry_line_numbers() {
        let err = parse_manifest("23 1\n").unwrap_err();
        assert!(matches!(err, ManifestError::FieldCount { line: 1, got: 2 }));
        let err = parse_manifest("# ok\n4 1 5\n").unwrap_err();
        assert!(matches!(err, ManifestError::BadRange { line: 2, .. }));
        let err = parse_manifest("23 x 5\n").unwrap_err();
        assert!(matches!(err, ManifestError::BadInteger { line: 1, field: "a", .. }));
        assert!(matches!(parse_manifest("# nothing\n").unwrap_err(), ManifestError::Empty));
    }

    #[test]
    fn single_range_sweeps() {
        // f(19) = 2 <= B(19)
        let cert = sweep(&[SweepRange::new(19, 1, 1).unwrap()], CAP).unwrap();
        assert_eq!(cert.outcome, Outcome::Verified);
        assert_eq!(cert.detail["orders_checked"], 1);
        // injected sanity path: r = 4 has f(4) = S(2,2) = 5 <= B(4)
        let cert = sweep(&[SweepRange::new(2, 2, 1).unwrap()], CAP).unwrap();
        assert_eq!(cert.outcome, Outcome::Verified);
    }

    #[test]
    fn weakened_bound_is_refuted_with_witness() {
        // dropping the leading coefficient to 1 pushes the worst orders over
        let params = BoundParams {
            coefficient: BigRational::from_integer(1.into()),
            epsilon: bound_epsilon(),
        };
        let ranges = [SweepRange::new(19, 1, 3_784).unwrap()];
        let cert = sweep_with(&ranges, &params, CAP).unwrap();
        assert_eq!(cert.outcome, Outcome::Refuted);
        let violations = cert.detail["violations"].as_array().unwrap();
        assert!(!violations.is_empty());
        // every reported violation must genuinely violate the weakened bound
        let r = violations[0].as_u64().unwrap();
        let check = check_order(r, &params, CAP).unwrap();
        assert_eq!(check.outcome, Outcome::Refuted);
    }

    #[test]
    fn coverage_gap_is_an_error() {
        let mut ranges = default_ranges();
        let idx = ranges.iter().position(|r| r.p == 5 && r.a == 2).unwrap();
        ranges[idx] = SweepRange::new(5, 2, 10).unwrap();
        let err = verify_corollary1(&ranges, CAP).unwrap_err();
        match err {
            CoverageError::Incomplete { p: 5, a: 2, covered: 10, needed: 16_314 } => {}
            other => panic!("unexpected error {other:?}"),
        }
        let msg = format!("{}", verify_corollary1(&ranges, CAP).unwrap_err());
        assert!(msg.contains("[11, 16314]"), "{msg}");
    }

    #[test]
    fn ratio_reporting_is_sane() {
        // tiny range where the max ratio is known to stay far below 1
        let ranges = [SweepRange::new(23, 1, 8).unwrap()];
        let cert = sweep(&ranges, CAP).unwrap();
        let hi = cert.detail["max_ratio"]["hi"].as_str().unwrap();
        assert!(hi.starts_with("0.0"), "max ratio {hi}");
    }

    #[test]
    fn f_values_spot_checked_against_oracle() {
        // f(71896) = 47569014672785408, evaluated independently
        let f = f_expr(&factorize(71_896).unwrap()).unwrap();
        let exact = f.exact().unwrap();
        assert_eq!(exact.to_integer(), BigInt::from(47_569_014_672_785_408u64));
        let b = bound_b_expr(71_896).eval(96).unwrap();
        assert!(b.lo() > &Dyadic::from_bigint(exact.to_integer()));
    }
}
