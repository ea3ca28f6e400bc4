//! Certified reproduction of the exception lemmas (indices 0 through 6) and
//! the scalar facts of the final composite argument: epsilon maximization,
//! the `r >= 16` and `r >= 68` thresholds, per-prime inequalities, and the
//! closing composite inequality.

pub mod tails;

use std::time::Instant;

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::certified::{
    certified_compare, certify_le, log2_interval, pow2_enclosure, CertError, CertReal, Dyadic,
    Expr, Outcome, Round, Verdict,
};
use crate::parallel::map_slice;
use crate::report::{claim_outcome, combine_outcomes, interval_json, verdict_json, Certificate};
use crate::sgbound::{bound_epsilon, is_prime, primes_up_to, s_expr};
use tails::{
    certify_positive, lemma1_quoted_instances, lemma6_tail_p_ge_5, lemma6_termination_p3,
    lemma_tail, poly_nonneg_on_ray, Step, TailCertificate,
};

/// Classification of the exception set of one `(p, a)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExceptionStatus {
    /// Finitely many exceptional cofactors, all found.
    FiniteSet,
    /// The inequality fails for every `r` (happens exactly when
    /// `p^a <= 16`, i.e. `a*log2(p) <= 4`).
    WholesaleException,
    /// No exceptional cofactor at all.
    NoException,
}

/// Exception data for one `(p, a)` pair: the cofactors `m` coprime to `p`
/// for which `r = m*p^a` satisfies `r*S(p,a) > p^(a*log2(r)/4)`.
#[derive(Debug, Clone)]
pub struct ExceptionReport {
    pub p: u64,
    pub a: u32,
    pub status: ExceptionStatus,
    pub max_m: Option<u64>,
    pub set: Option<Vec<u64>>,
    pub threshold: Option<CertReal>,
    /// Cofactors whose membership could not be decided at the precision cap.
    pub undetermined: Vec<u64>,
    pub notes: Vec<String>,
}

/// Threshold classification for one `(p, a)` pair.
#[derive(Debug, Clone)]
pub enum Threshold {
    /// `a*log2(p) <= 4`: the inequality fails for every `r`.
    Wholesale,
    /// Enclosure of `r* = 2^(log2(S) / (a*log2(p)/4 - 1))`; the inequality
    /// fails exactly for `r < r*` (strict), holds for `r > r*`.
    Finite(CertReal),
}

fn pow_checked(p: u64, a: u32) -> Result<u64, CertError> {
    p.checked_pow(a)
        .ok_or_else(|| CertError::Domain(format!("{p}^{a} overflows the sweep range")))
}

/// Whether `(p, a)` is a wholesale exception, decided exactly:
/// `a*log2(p) <= 4  <=>  p^a <= 16`.
pub fn is_wholesale(p: u64, a: u32) -> bool {
    p.checked_pow(a).is_some_and(|v| v <= 16)
}

/// Enclosure of the exception threshold `r*`, or `Wholesale`.
pub fn exception_threshold(p: u64, a: u32, prec: u32) -> Result<Threshold, CertError> {
    if !is_prime(p) {
        return Err(CertError::NotPrime(p));
    }
    if a == 0 {
        return Err(CertError::Domain("exception threshold requires a >= 1".into()));
    }
    if is_wholesale(p, a) {
        return Ok(Threshold::Wholesale);
    }
    let s = s_expr(p, a)?;
    let log_s = match s.exact() {
        Some(r) => {
            let n = r.to_integer();
            crate::certified::log2_enclosure(n.magnitude(), prec)?
        }
        None => log2_interval(&s.eval(prec)?, prec)?,
    };
    // denom = a*log2(p)/4 - 1 > 0 (guaranteed by the wholesale test above)
    let denom = Expr::sum([
        Expr::prod([Expr::ratio(i64::from(a), 4), Expr::log2(BigUint::from(p))]),
        Expr::int(-1),
    ])
    .eval(prec)?;
    let ratio = log_s.div(&denom)?;
    Ok(Threshold::Finite(pow2_enclosure(&ratio, prec)?))
}

/// Certified membership of one cofactor in the exception set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Membership {
    In,
    Out,
    Unknown,
}

/// Decide `r*S(p,a) > p^(a*log2(r)/4)` for `r = m*p^a` by certified
/// comparison (strict failure means membership).
pub fn membership(
    p: u64,
    a: u32,
    m: u64,
    prec_cap: u32,
) -> Result<(Membership, Verdict), CertError> {
    let pa = pow_checked(p, a)?;
    let r = m
        .checked_mul(pa)
        .ok_or_else(|| CertError::Domain(format!("{m}*{p}^{a} overflows the sweep range")))?;
    let lhs = Expr::prod([Expr::int(r), s_expr(p, a)?]);
    let rhs = Expr::pow(
        Expr::int(p),
        Expr::prod([Expr::ratio(i64::from(a), 4), Expr::log2(BigUint::from(r))]),
    );
    let v = certified_compare(&lhs, &rhs, prec_cap)?;
    let mem = match v.outcome {
        Outcome::Refuted => Membership::In,
        Outcome::Verified | Outcome::Equal => Membership::Out,
        Outcome::Undetermined => Membership::Unknown,
    };
    Ok((mem, v))
}

/// Exact exception set up to cofactor `cap`: every coprime `m <= cap` gets a
/// certified membership decision; boundary values are decided by certified
/// comparison, never by rounding.
pub fn exception_set(
    p: u64,
    a: u32,
    cap: u64,
    prec_cap: u32,
) -> Result<ExceptionReport, CertError> {
    if cap < 1 {
        return Err(CertError::Domain("exception set cap must be >= 1".into()));
    }
    if is_wholesale(p, a) {
        return Ok(ExceptionReport {
            p,
            a,
            status: ExceptionStatus::WholesaleException,
            max_m: None,
            set: None,
            threshold: None,
            undetermined: Vec::new(),
            notes: vec![format!(
                "{p}^{a} <= 16, so r*S > p^(a*log2(r)/4) for every r (the bound \
                 r^(a*log2(p)/4 - 1) is at most 1 < S)"
            )],
        });
    }
    let coprime: Vec<u64> = (1..=cap).filter(|m| m % p != 0).collect();
    let decisions = map_slice(&coprime, |&m| membership(p, a, m, prec_cap));
    let mut members = Vec::new();
    let mut undetermined = Vec::new();
    for (&m, d) in coprime.iter().zip(decisions.into_iter()) {
        match d?.0 {
            Membership::In => members.push(m),
            Membership::Out => {}
            Membership::Unknown => undetermined.push(m),
        }
    }
    // Downward closure in r: members must form a prefix of the coprime list.
    let prefix_len = members.len();
    if coprime[..prefix_len.min(coprime.len())] != members[..] {
        return Err(CertError::Domain(format!(
            "exception set of ({p},{a}) is not downward closed: {members:?}"
        )));
    }
    let threshold = match exception_threshold(p, a, 96)? {
        Threshold::Finite(t) => Some(t),
        Threshold::Wholesale => None,
    };
    let status =
        if members.is_empty() { ExceptionStatus::NoException } else { ExceptionStatus::FiniteSet };
    Ok(ExceptionReport {
        p,
        a,
        status,
        max_m: members.last().copied(),
        set: Some(members),
        threshold,
        undetermined,
        notes: Vec::new(),
    })
}

/// Fast certified determination of the largest exceptional cofactor: locate
/// the threshold enclosure, then certify membership on both sides of it.
/// Relies on downward closure, which holds because `p^a > 16` makes the
/// exponent gap `a*log2(p)/4 - 1` positive.
pub fn max_exceptional_cofactor(
    p: u64,
    a: u32,
    prec_cap: u32,
) -> Result<(u64, CertReal), CertError> {
    let pa = pow_checked(p, a)?;
    let pa_dyadic = Dyadic::from_u64(pa);
    let mut prec = 96u32;
    loop {
        let t = match exception_threshold(p, a, prec)? {
            Threshold::Wholesale => {
                return Err(CertError::Domain(format!("({p},{a}) is a wholesale exception")))
            }
            Threshold::Finite(t) => t,
        };
        let m_lo = u64::try_from(&t.lo().div(&pa_dyadic, 64, Round::Down).floor_bigint())
            .map_err(|_| CertError::Domain("threshold out of u64 range".into()))?;
        let m_hi = u64::try_from(&t.hi().div(&pa_dyadic, 64, Round::Up).floor_bigint())
            .map_err(|_| CertError::Domain("threshold out of u64 range".into()))?;
        if m_lo == m_hi {
            // No family member inside the enclosure: the largest coprime
            // m <= m_lo is the candidate. Certify both boundary sides.
            let mut cand = m_lo;
            while cand >= 1 && cand % p == 0 {
                cand -= 1;
            }
            if cand == 0 {
                return Err(CertError::Domain(format!("({p},{a}) has an empty exception set")));
            }
            let (inside, _) = membership(p, a, cand, prec_cap)?;
            let mut next = cand + 1;
            while next % p == 0 {
                next += 1;
            }
            let (outside, _) = membership(p, a, next, prec_cap)?;
            if inside == Membership::In && outside == Membership::Out {
                return Ok((cand, t));
            }
            return Err(CertError::Domain(format!(
                "boundary certification failed for ({p},{a}) at m = {cand}"
            )));
        }
        if prec >= prec_cap {
            return Err(CertError::PrecisionBudget(format!(
                "threshold enclosure for ({p},{a}) still straddles a family member at {prec} bits"
            )));
        }
        prec = (prec * 2).min(prec_cap);
    }
}

fn steps_json(steps: &[Step]) -> Value {
    Value::Array(
        steps
            .iter()
            .map(|s| {
                let mut v = verdict_json(&s.verdict);
                v["claim"] = Value::String(s.claim.clone());
                v
            })
            .collect(),
    )
}

fn tail_json(t: &TailCertificate) -> Value {
    json!({
        "a": t.a,
        "base_prime": t.base_prime,
        "outcome": t.outcome,
        "steps": steps_json(&t.steps),
        "notes": t.notes,
    })
}

/// Verify one lemma by index: 0 is the `S(p,a) <= 7.3722*p^(a*log2(r)/4)`
/// lemma, 1 through 5 the per-exponent exception lemmas, 6 the `a >= 6`
/// lemma.
pub fn verify_lemma(index: u8, prec_cap: u32) -> Result<Certificate, CertError> {
    let t0 = Instant::now();
    let mut cert = match index {
        0 => lemma0(prec_cap)?,
        1..=5 => lemma_exceptions(index, prec_cap)?,
        6 => lemma6(prec_cap)?,
        _ => return Err(CertError::Domain(format!("no lemma with index {index}"))),
    };
    cert.elapsed_ms = t0.elapsed().as_millis() as u64;
    Ok(cert)
}

/// Lemma 0: `S(p, a) <= 7.3722 * p^(a*log2(r)/4)` with `r = p^a`, certified
/// on the grid `a <= 10`, `p <= 97`, plus the `a >= 6` reduction to
/// `c(p) <= 7.3722` through the monotone decrease of `c`.
fn lemma0(prec_cap: u32) -> Result<Certificate, CertError> {
    let primes = primes_up_to(97);
    let mut grid: Vec<(u64, u32)> = Vec::new();
    for &p in &primes {
        for a in 1..=10u32 {
            grid.push((p, a));
        }
    }
    let results = map_slice(&grid, |&(p, a)| -> Result<Outcome, CertError> {
        let lhs = s_expr(p, a)?;
        let rhs = Expr::prod([
            Expr::ratio(73722, 10000),
            Expr::pow(
                Expr::int(p),
                Expr::prod([
                    Expr::ratio(i64::from(a) * i64::from(a), 4),
                    Expr::log2(BigUint::from(p)),
                ]),
            ),
        ]);
        Ok(claim_outcome(&certify_le(&lhs, &rhs, prec_cap)?))
    });
    let mut grid_outcomes = Vec::new();
    for r in results {
        grid_outcomes.push(r?);
    }
    let grid_outcome = combine_outcomes(grid_outcomes.iter().copied());

    // c(2) < 7.3722, the heart of the a >= 6 case
    let c2 = Expr::prod([Expr::ratio(2129, 1000), Expr::EulerC(2)]);
    let c2_verdict = certified_compare(&c2, &Expr::ratio(73722, 10000), prec_cap)?;

    // c(p) < 7.3722 for every grid prime (monotone decrease, spot-certified)
    let cps = map_slice(&primes, |&p| -> Result<Outcome, CertError> {
        let cp = Expr::prod([Expr::ratio(2129, 1000), Expr::EulerC(p)]);
        Ok(claim_outcome(&certified_compare(&cp, &Expr::ratio(73722, 10000), prec_cap)?))
    });
    let mut cp_outcomes = Vec::new();
    for r in cps {
        cp_outcomes.push(r?);
    }

    // a = 2 reading: the proof line is used as p + 3 <= 7.3722*p, i.e.
    // 6.3722*p - 3 >= 0 on [2, oo)
    let a2 = poly_nonneg_on_ray(
        &[Expr::ratio(-3, 1), Expr::ratio(63722, 10000)],
        &Expr::int(2),
        prec_cap,
    )?;

    // a = 1 instance: the printed constant "7.3722 * 2^(1/4) = 9.5136"
    // evaluates to about 8.7671; the inequality actually needed (>= 2 =
    // S(p,1)) holds regardless. Certify the needed fact, flag the printed
    // value.
    let pow_expr =
        Expr::prod([Expr::ratio(73722, 10000), Expr::pow(Expr::int(2), Expr::ratio(1, 4))]);
    let a1_needed = certified_compare(&Expr::int(2), &pow_expr, prec_cap)?;
    let printed = certified_compare(&pow_expr, &Expr::ratio(95136, 10000), prec_cap)?;
    let a1_value = pow_expr.eval(96)?;

    let outcome = combine_outcomes(
        [grid_outcome, claim_outcome(&c2_verdict), claim_outcome(&a2), claim_outcome(&a1_needed)]
            .into_iter()
            .chain(cp_outcomes.iter().copied()),
    );
    let mut cert = Certificate::new("lemma0", outcome, prec_cap).with_detail(json!({
        "grid": {"a": "1..=10", "p": "primes <= 97", "checks": grid.len(), "outcome": grid_outcome},
        "c2_lt_7_3722": verdict_json(&c2_verdict),
        "cp_lt_7_3722_all_grid_primes": combine_outcomes(cp_outcomes.iter().copied()),
        "a2_reversed_reading": verdict_json(&a2),
        "a1_needed_2_le": verdict_json(&a1_needed),
        "a1_printed_constant_check": verdict_json(&printed),
        "a1_value_7_3722_pow2_quarter": interval_json(&a1_value, 6),
    }));
    cert = cert
        .with_note(
            "a >= 6 reduces to c(p) <= 7.3722 because p^(a^2(log2 p - 1)/4) >= 1; \
             c(p) <= c(2) termwise in the Euler product",
        )
        .with_note(
            "exponent convention: S(p,a) = c(p)*p^(a^2/4) for a >= 6; the printed a^2/2 \
             exponent contradicts the even/odd tail derivation and is corrected here",
        )
        .with_note(
            "proof line read as p + 3 <= 7.3722p (the direction the argument needs), \
             certified as such",
        );
    // the value is certified strictly below the printed 9.5136, so the
    // printed equation is wrong; the needed inequality holds regardless
    if printed.outcome == Outcome::Verified {
        cert = cert.with_note(
            "printed constant discrepancy: 7.3722*2^(1/4) is about 8.7671, not 9.5136; \
             the needed inequality (>= 2) holds either way",
        );
    } else {
        cert = cert.with_note("printed constant 9.5136 could not be flagged as expected");
    }
    Ok(cert)
}

struct LemmaSpec {
    a: u32,
    /// `(p, stated max cofactor)` for the finitely-exceptional primes.
    finite: &'static [(u64, u64)],
    /// Primes certified to have no exceptions at all.
    empty: &'static [u64],
    /// Blanket exceptions with `p^a <= 16` (genuinely fail for every `r`).
    wholesale: &'static [u64],
    /// Primes the statement exempts wholesale although their exception
    /// range is finite (the final argument handles them separately).
    unclaimed_finite: &'static [u64],
    /// First prime covered by the tail argument.
    tail_p0: u64,
    notes: &'static [&'static str],
}

fn lemma_spec(index: u8) -> LemmaSpec {
    match index {
        1 => LemmaSpec {
            a: 1,
            finite: &[(19, 3_784), (23, 8)],
            empty: &[],
            wholesale: &[2, 3, 5, 7, 11, 13],
            unclaimed_finite: &[17],
            tail_p0: 29,
            notes: &[],
        },
        2 => LemmaSpec {
            a: 2,
            finite: &[(5, 16_314), (7, 6)],
            empty: &[11, 13, 17],
            wholesale: &[2, 3],
            unclaimed_finite: &[],
            tail_p0: 19,
            notes: &["the stated case split skips p = 17; its exception set is certified empty"],
        },
        3 => LemmaSpec {
            a: 3,
            finite: &[(5, 2)],
            empty: &[],
            wholesale: &[2],
            unclaimed_finite: &[3],
            tail_p0: 7,
            notes: &[
                "the hypothesis r/p^3 > 1 conflicts with the stated range including m = 1; \
                 m = 1 is included here, consistent with the downstream sweep",
            ],
        },
        4 => LemmaSpec {
            a: 4,
            finite: &[(3, 116)],
            empty: &[],
            wholesale: &[2],
            unclaimed_finite: &[],
            tail_p0: 5,
            notes: &[],
        },
        5 => LemmaSpec {
            a: 5,
            finite: &[(3, 11)],
            empty: &[],
            wholesale: &[],
            unclaimed_finite: &[2],
            tail_p0: 5,
            notes: &[],
        },
        _ => unreachable!(),
    }
}

fn lemma_exceptions(index: u8, prec_cap: u32) -> Result<Certificate, CertError> {
    let spec = lemma_spec(index);
    let a = spec.a;
    let mut outcomes = Vec::new();
    let mut detail = serde_json::Map::new();
    let mut notes: Vec<String> = spec.notes.iter().map(|s| s.to_string()).collect();

    // Finite ranges: certified threshold plus boundary memberships, then a
    // full certified scan for small ranges and a strided corroboration scan
    // for large ones. (The acceptance suite additionally runs the full scan
    // through `exception_set`.)
    let mut finite_json = Vec::new();
    for &(p, stated) in spec.finite {
        let (max_m, threshold) = max_exceptional_cofactor(p, a, prec_cap)?;
        let matched = max_m == stated;
        if !matched {
            notes.push(format!(
                "computed max cofactor {max_m} for p = {p} differs from the stated {stated}"
            ));
            outcomes.push(Outcome::Refuted);
        } else {
            outcomes.push(Outcome::Verified);
        }
        let scan_step = if stated <= 256 { 1 } else { 61 };
        let sample: Vec<u64> = (1..=stated).step_by(scan_step).filter(|m| m % p != 0).collect();
        let sample_results = map_slice(&sample, |&m| membership(p, a, m, prec_cap));
        for r in sample_results {
            let (mem, _) = r?;
            outcomes
                .push(if mem == Membership::In { Outcome::Verified } else { Outcome::Refuted });
        }
        finite_json.push(json!({
            "p": p,
            "stated_max_m": stated,
            "certified_max_m": max_m,
            "matches": matched,
            "threshold": interval_json(&threshold, 4),
            "memberships_checked": sample.len() + 2,
        }));
    }
    detail.insert("finite_ranges".into(), Value::Array(finite_json));

    // Certified-empty primes: non-membership at m = 1 extends upward.
    let mut empty_json = Vec::new();
    for &p in spec.empty {
        let (mem, v) = membership(p, a, 1, prec_cap)?;
        outcomes.push(if mem == Membership::Out { Outcome::Verified } else { Outcome::Refuted });
        empty_json.push(json!({"p": p, "m1": verdict_json(&v)}));
    }
    if !spec.empty.is_empty() {
        detail.insert("certified_empty".into(), Value::Array(empty_json));
        notes.push("non-membership at m = 1 extends to every cofactor by downward closure".into());
    }

    // Wholesale exceptions: p^a <= 16 decided exactly.
    let mut wholesale_json = Vec::new();
    for &p in spec.wholesale {
        let ok = is_wholesale(p, a);
        outcomes.push(if ok { Outcome::Verified } else { Outcome::Refuted });
        wholesale_json.push(json!({"p": p, "p_pow_a_le_16": ok}));
    }
    detail.insert("wholesale".into(), Value::Array(wholesale_json));

    // Exempt-but-finite primes: threshold noted, nothing claimed.
    let mut unclaimed_json = Vec::new();
    for &p in spec.unclaimed_finite {
        match exception_threshold(p, a, 96)? {
            Threshold::Finite(t) => {
                unclaimed_json.push(json!({"p": p, "threshold": interval_json(&t, 2)}));
            }
            Threshold::Wholesale => outcomes.push(Outcome::Refuted),
        }
    }
    if !spec.unclaimed_finite.is_empty() {
        detail.insert("exempt_finite".into(), Value::Array(unclaimed_json));
        notes.push(
            "statement exempts these primes wholesale although their exception range is \
             finite; threshold recorded, nothing claimed"
                .into(),
        );
    }

    // Tail: every prime from tail_p0 on.
    let tail = lemma_tail(a, spec.tail_p0, prec_cap)?;
    outcomes.push(tail.outcome);
    detail.insert("tail".into(), tail_json(&tail));

    if index == 1 {
        let quoted = lemma1_quoted_instances(prec_cap)?;
        outcomes.extend(quoted.iter().map(|s| claim_outcome(&s.verdict)));
        detail.insert("quoted_instances_p29".into(), steps_json(&quoted));
    }

    let mut cert = Certificate::new(format!("lemma{index}"), combine_outcomes(outcomes), prec_cap)
        .with_detail(Value::Object(detail));
    for n in notes {
        cert = cert.with_note(n);
    }
    Ok(cert)
}

/// Lemma 6 (`a >= 6`): for `p = 3` the exception set is exactly
/// `{729, 1458, 2187, 2916}` (from `a = 6`: `m` in `{1, 2, 4}`; `a = 7`:
/// `m = 1`; empty for `a >= 8`), and there are no exceptions for `p >= 5`.
fn lemma6(prec_cap: u32) -> Result<Certificate, CertError> {
    let mut outcomes = Vec::new();
    let mut detail = serde_json::Map::new();

    let mut union: Vec<u64> = Vec::new();
    let mut per_a = Vec::new();
    for a in 6..=7u32 {
        let report = exception_set(3, a, 8, prec_cap)?;
        let set = report.set.clone().unwrap_or_default();
        for &m in &set {
            union.push(m * 3u64.pow(a));
        }
        outcomes.push(if report.undetermined.is_empty() {
            Outcome::Verified
        } else {
            Outcome::Undetermined
        });
        per_a.push(json!({
            "a": a,
            "set_m": set,
            "threshold": report.threshold.as_ref().map(|t| interval_json(t, 4)),
        }));
    }
    union.sort_unstable();
    let stated: Vec<u64> = vec![729, 1_458, 2_187, 2_916];
    let matches = union == stated;
    outcomes.push(if matches { Outcome::Verified } else { Outcome::Refuted });
    detail.insert("p3_per_a".into(), Value::Array(per_a));
    detail.insert("p3_union".into(), json!(union));
    detail.insert("p3_stated".into(), json!(stated));

    let termination = lemma6_termination_p3(prec_cap)?;
    outcomes.push(termination.outcome);
    detail.insert("p3_termination_a_ge_8".into(), tail_json(&termination));

    let tail5 = lemma6_tail_p_ge_5(prec_cap)?;
    outcomes.push(tail5.outcome);
    detail.insert("p_ge_5_tail".into(), tail_json(&tail5));

    // p = 2 is exempted wholesale; for a >= 5 its exception range is finite
    // but unclaimed. Record the a = 6 threshold.
    if let Threshold::Finite(t) = exception_threshold(2, 6, 96)? {
        detail.insert("p2_a6_threshold_note".into(), interval_json(&t, 2));
    }

    let mut cert = Certificate::new("lemma6", combine_outcomes(outcomes), prec_cap)
        .with_detail(Value::Object(detail));
    if !matches {
        cert = cert.with_note(format!("p = 3 union set {union:?} differs from {stated:?}"));
    }
    cert = cert
        .with_note(
            "p = 2 is exempted wholesale; its per-a exception ranges are finite but unclaimed",
        )
        .with_note(
            "exponent convention: S(p,a) = c(p)*p^(a^2/4) for a >= 6; the printed a^2/2 \
             exponent contradicts the even/odd tail derivation and is corrected here",
        );
    Ok(cert)
}

/// Exact maximizing subset of `sum (1 - log2(p)/4)` over distinct primes in
/// the pool (a prime contributes iff its term is certified positive, i.e.
/// `log2(p) < 4`), plus a certified enclosure of the maximum.
pub fn maximize_eps(
    pool: &[u64],
    exclude: Option<&[u64]>,
    prec_cap: u32,
) -> Result<(Vec<u64>, CertReal), CertError> {
    if pool.is_empty() {
        return Err(CertError::Domain("empty prime pool".into()));
    }
    let mut subset = Vec::new();
    for &p in pool {
        if !is_prime(p) {
            return Err(CertError::NotPrime(p));
        }
        if exclude.is_some_and(|ex| ex.contains(&p)) || subset.contains(&p) {
            continue;
        }
        let v = certified_compare(&Expr::log2(BigUint::from(p)), &Expr::int(4), prec_cap)?;
        if v.outcome == Outcome::Verified {
            subset.push(p);
        }
    }
    subset.sort_unstable();
    if subset.is_empty() {
        return Ok((subset, CertReal::from_i64(0, 64)));
    }
    let value = Expr::sum(subset.iter().map(|&p| {
        Expr::sum([
            Expr::int(1),
            Expr::neg(Expr::prod([Expr::ratio(1, 4), Expr::log2(BigUint::from(p))])),
        ])
    }))
    .eval(96)?;
    Ok((subset, value))
}

/// Certify a maximize_eps value against a stated rounded constant.
pub fn eps_within(
    value: &CertReal,
    bound_num: i64,
    bound_den: i64,
    prec_cap: u32,
) -> Result<Verdict, CertError> {
    certify_le(
        &Expr::Ratio(value.hi().to_rational()),
        &Expr::ratio(bound_num, bound_den),
        prec_cap,
    )
}

fn composite_lhs(r: u64) -> Expr {
    Expr::prod([
        Expr::pow(
            Expr::ratio(r as i64, 3),
            Expr::sum([
                Expr::prod([
                    Expr::ratio(1, 4),
                    Expr::sum([Expr::log2(BigUint::from(r)), Expr::neg(Expr::log2(3u32))]),
                ]),
                Expr::ratio(9278, 10000),
            ]),
        ),
        Expr::ratio(r as i64 + 3, 3),
    ])
}

fn composite_rhs(r: u64) -> Expr {
    Expr::pow(
        Expr::int(r),
        Expr::sum([
            Expr::prod([Expr::ratio(1, 4), Expr::log2(BigUint::from(r))]),
            Expr::Ratio(bound_epsilon()),
        ]),
    )
}

/// The scalar checks of the final composite argument.
pub fn section4_checks(prec_cap: u32) -> Result<Vec<Certificate>, CertError> {
    let mut certs = Vec::new();

    // (i) 3*r^(1 - 2log2(3)/4) <= r^(1 - log2(3)/4) iff log2(r) >= 4, with
    // exact threshold r = 16. Dividing by r^(1 - log2(3)/2) and taking logs
    // reduces the claim to log2(3) <= log2(3)*log2(r)/4, i.e. log2(r) >= 4.
    {
        let t0 = Instant::now();
        let reduced =
            |r: u64| certified_compare(&Expr::int(4), &Expr::log2(BigUint::from(r)), prec_cap);
        let at16 = reduced(16)?;
        let at15 = reduced(15)?;
        let at17 = reduced(17)?;
        let direct = |r: u64| {
            let lhs = Expr::prod([
                Expr::int(3),
                Expr::pow(
                    Expr::int(r),
                    Expr::sum([
                        Expr::int(1),
                        Expr::neg(Expr::prod([Expr::ratio(1, 2), Expr::log2(3u32)])),
                    ]),
                ),
            ]);
            let rhs = Expr::pow(
                Expr::int(r),
                Expr::sum([
                    Expr::int(1),
                    Expr::neg(Expr::prod([Expr::ratio(1, 4), Expr::log2(3u32)])),
                ]),
            );
            certified_compare(&lhs, &rhs, prec_cap)
        };
        let d15 = direct(15)?;
        let d17 = direct(17)?;
        let d32 = direct(32)?;
        let ok = at16.outcome == Outcome::Equal
            && at15.outcome == Outcome::Refuted
            && at17.outcome == Outcome::Verified
            && d15.outcome == Outcome::Refuted
            && d17.outcome == Outcome::Verified
            && d32.outcome == Outcome::Verified;
        let mut cert = Certificate::new(
            "section4/threshold-r16",
            if ok { Outcome::Verified } else { Outcome::Refuted },
            prec_cap,
        )
        .with_detail(json!({
            "reduced_r16": verdict_json(&at16),
            "reduced_r15": verdict_json(&at15),
            "reduced_r17": verdict_json(&at17),
            "direct_r15": verdict_json(&d15),
            "direct_r17": verdict_json(&d17),
            "direct_r32": verdict_json(&d32),
        }))
        .with_note(
            "claim reduces exactly to log2(r) >= 4; at r = 16 the sides coincide, so the \
             boundary is certified in reduced form",
        );
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }

    // (ii) r*S(3,3) <= r^(eps - 0.9278) * 3^(3*log2(r)/4) for every r >= 68,
    // refuted at r = 67. In logs the margin is
    // D(r) = (eps - 0.9278 - 1 + (3/4)log2(3)) * log2(r) - log2(28),
    // increasing in r because its coefficient is positive.
    {
        let t0 = Instant::now();
        let claim = |r: u64| {
            let lhs = Expr::int(28 * r as i64);
            let rhs = Expr::prod([
                Expr::pow(Expr::int(r), Expr::ratio(6037, 10000)),
                Expr::pow(
                    Expr::int(3),
                    Expr::prod([Expr::ratio(3, 4), Expr::log2(BigUint::from(r))]),
                ),
            ]);
            certified_compare(&lhs, &rhs, prec_cap)
        };
        let at68 = claim(68)?;
        let at67 = claim(67)?;
        let kappa = Expr::sum([
            Expr::ratio(6037, 10000),
            Expr::int(-1),
            Expr::prod([Expr::ratio(3, 4), Expr::log2(3u32)]),
        ]);
        let kappa_pos = certify_positive(&kappa, prec_cap)?;
        let ok = at68.outcome == Outcome::Verified
            && at67.outcome == Outcome::Refuted
            && kappa_pos.outcome == Outcome::Verified;
        let mut cert = Certificate::new(
            "section4/s33-r68",
            if ok { Outcome::Verified } else { Outcome::Refuted },
            prec_cap,
        )
        .with_detail(json!({
            "r68": verdict_json(&at68),
            "r67": verdict_json(&at67),
            "log_margin_coefficient_positive": verdict_json(&kappa_pos),
        }))
        .with_note(
            "the log margin is linear in log2(r) with certified-positive coefficient, so \
             holding at 68 extends to every r >= 68 and failing at 67 extends down to 2",
        );
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }

    // (iii) per prime in {5,7,11,13,17}: log2(p) > 2 (so r^(log2(p)/2) > r)
    // and p^(eps - log2(p)/4) > 2.
    {
        let t0 = Instant::now();
        let mut items = Vec::new();
        let mut outcomes = Vec::new();
        for p in [5u64, 7, 11, 13, 17] {
            let log_gt_2 =
                certified_compare(&Expr::int(2), &Expr::log2(BigUint::from(p)), prec_cap)?;
            let pow_gt_2 = certified_compare(
                &Expr::int(2),
                &Expr::pow(
                    Expr::int(p),
                    Expr::sum([
                        Expr::Ratio(bound_epsilon()),
                        Expr::neg(Expr::prod([Expr::ratio(1, 4), Expr::log2(BigUint::from(p))])),
                    ]),
                ),
                prec_cap,
            )?;
            outcomes.push(claim_outcome(&log_gt_2));
            outcomes.push(claim_outcome(&pow_gt_2));
            items.push(json!({
                "p": p,
                "log2_gt_2": verdict_json(&log_gt_2),
                "pow_gt_2": verdict_json(&pow_gt_2),
            }));
        }
        let mut cert =
            Certificate::new("section4/per-prime", combine_outcomes(outcomes), prec_cap)
                .with_detail(Value::Array(items));
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }

    // (iv) the closing composite inequality
    // (r/3)^(log2(r/3)/4 + 0.9278) * (1 + r/3) <= r^(log2(r)/4 + eps),
    // certified for every r >= R0 by a monotone-difference argument with
    // discovered R0 = 6, plus explicit checks for 3 <= r < R0.
    {
        let t0 = Instant::now();
        let s = Expr::log2(3u32);
        // alpha = log2(3)/2 + (eps - 0.9278) - 1 > 0
        let alpha = Expr::sum([
            Expr::prod([Expr::ratio(1, 2), s.clone()]),
            Expr::ratio(6037, 10000),
            Expr::int(-1),
        ]);
        // beta = -log2(3)^2/4 + 0.9278*log2(3) + 1 > 0
        let beta = Expr::sum([
            Expr::neg(Expr::prod([Expr::ratio(1, 4), s.clone(), s.clone()])),
            Expr::prod([Expr::ratio(9278, 10000), s]),
            Expr::int(1),
        ]);
        let alpha_pos = certify_positive(&alpha, prec_cap)?;
        let beta_pos = certify_positive(&beta, prec_cap)?;
        // the tail derivation uses 1 + 3/r <= 3/2, i.e. r/2 - 3 >= 0 on [6, oo)
        let r0_step =
            poly_nonneg_on_ray(&[Expr::int(-3), Expr::ratio(1, 2)], &Expr::int(6), prec_cap)?;

        let mut spot_outcomes = Vec::new();
        let mut small = Vec::new();
        for r in 3..6u64 {
            let v = certify_le(&composite_lhs(r), &composite_rhs(r), prec_cap)?;
            spot_outcomes.push(claim_outcome(&v));
            small.push(json!({"r": r, "verdict": verdict_json(&v)}));
        }
        let spots: Vec<u64> = (6..=32).chain([64, 100, 1000]).collect();
        let spot_results =
            map_slice(&spots, |&r| certify_le(&composite_lhs(r), &composite_rhs(r), prec_cap));
        for v in spot_results {
            spot_outcomes.push(claim_outcome(&v?));
        }

        let outcome = combine_outcomes(
            [claim_outcome(&alpha_pos), claim_outcome(&beta_pos), claim_outcome(&r0_step)]
                .into_iter()
                .chain(spot_outcomes),
        );
        let mut cert = Certificate::new("section4/composite", outcome, prec_cap)
            .with_detail(json!({
                "discovered_R0": 6,
                "alpha_positive": verdict_json(&alpha_pos),
                "beta_positive": verdict_json(&beta_pos),
                "uses_r_ge_6_step": verdict_json(&r0_step),
                "explicit_below_R0": small,
                "spot_checks": {"range": "6..=32, 64, 100, 1000"},
            }))
            .with_note(
                "log difference >= alpha*log2(r) + beta for r >= 6 after bounding \
                 log2(1 + r/3) by log2(r) - log2(3) + log2(3/2); alpha, beta > 0 certified, \
                 so the difference is positive for every r >= 6",
            );
        cert.elapsed_ms = t0.elapsed().as_millis() as u64;
        certs.push(cert);
    }

    Ok(certs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::PREC_CAP_DEFAULT as CAP;

    #[test]
    fn wholesale_classification() {
        assert!(is_wholesale(2, 3));
        assert!(is_wholesale(2, 4)); // 16 <= 16 boundary
        assert!(!is_wholesale(2, 5));
        assert!(is_wholesale(3, 2)); // 9 <= 16
        assert!(!is_wholesale(3, 3)); // 27 > 16
        assert!(is_wholesale(13, 1));
        assert!(!is_wholesale(17, 1));
    }

    #[test]
    fn threshold_19_1() {
        // r* = 71902.18...; stated enclosure (71895, 71905)
        let t = match exception_threshold(19, 1, 96).unwrap() {
            Threshold::Finite(t) => t,
            _ => panic!("expected finite"),
        };
        assert!(t.lo() > &Dyadic::from_u64(71_895) && t.hi() < &Dyadic::from_u64(71_905));
        assert!(matches!(exception_threshold(2, 3, 96).unwrap(), Threshold::Wholesale));
    }

    #[test]
    fn max_cofactors_match_statements() {
        for (p, a, stated) in [
            (19u64, 1u32, 3_784u64),
            (23, 1, 8),
            (5, 2, 16_314),
            (7, 2, 6),
            (5, 3, 2),
            (3, 4, 116),
            (3, 5, 11),
        ] {
            let (m, _) = max_exceptional_cofactor(p, a, CAP).unwrap();
            assert_eq!(m, stated, "(p={p}, a={a})");
        }
    }

    #[test]
    fn exception_sets_small() {
        let r = exception_set(23, 1, 20, CAP).unwrap();
        assert_eq!(r.status, ExceptionStatus::FiniteSet);
        assert_eq!(r.max_m, Some(8));
        assert_eq!(r.set.unwrap(), (1..=8).collect::<Vec<_>>());
        assert!(r.undetermined.is_empty());

        let r = exception_set(3, 5, 20, CAP).unwrap();
        assert_eq!(r.max_m, Some(11));
        // multiples of 3 are excluded by coprimality
        assert_eq!(r.set.unwrap(), vec![1, 2, 4, 5, 7, 8, 10, 11]);

        let r = exception_set(5, 3, 10, CAP).unwrap();
        assert_eq!(r.max_m, Some(2));

        let r = exception_set(2, 3, 5, CAP).unwrap();
        assert_eq!(r.status, ExceptionStatus::WholesaleException);

        let r = exception_set(13, 2, 5, CAP).unwrap();
        assert_eq!(r.status, ExceptionStatus::NoException);
        assert_eq!(r.max_m, None);
    }

    #[test]
    fn membership_boundary_5_2() {
        // the tightest boundary in the whole suite
        let (m, _) = membership(5, 2, 16_314, CAP).unwrap();
        assert_eq!(m, Membership::In);
        let (m, _) = membership(5, 2, 16_316, CAP).unwrap();
        assert_eq!(m, Membership::Out);
    }

    #[test]
    fn verify_lemma_0() {
        let cert = verify_lemma(0, CAP).unwrap();
        assert_eq!(cert.outcome, Outcome::Verified, "{:?}", cert.detail);
        assert!(cert.notes.iter().any(|n| n.contains("8.7671")));
    }

    #[test]
    fn verify_lemmas_1_through_5() {
        for index in 1..=5u8 {
            let cert = verify_lemma(index, CAP).unwrap();
            assert_eq!(cert.outcome, Outcome::Verified, "lemma {index}: {:?}", cert.detail);
        }
    }

    #[test]
    fn verify_lemma_6_set() {
        let cert = verify_lemma(6, CAP).unwrap();
        assert_eq!(cert.outcome, Outcome::Verified, "{:?}", cert.detail);
        assert_eq!(cert.detail["p3_union"], json!([729, 1458, 2187, 2916]));
    }

    #[test]
    fn eps_maximization() {
        let pool = [3u64, 5, 7, 11, 13, 17, 19, 23];
        let (subset, value) = maximize_eps(&pool, None, CAP).unwrap();
        assert_eq!(subset, vec![3, 5, 7, 11, 13]);
        let (lo, hi) = value.to_decimal_pair(6);
        // 1.5314707863...
        assert!(lo.starts_with("1.53147") && hi.starts_with("1.53147"), "[{lo}, {hi}]");
        assert_eq!(eps_within(&value, 15315, 10000, CAP).unwrap().outcome, Outcome::Verified);

        let (subset, value) = maximize_eps(&pool, Some(&[3]), CAP).unwrap();
        assert_eq!(subset, vec![5, 7, 11, 13]);
        let (lo, hi) = value.to_decimal_pair(6);
        // 0.9277114115...
        assert!(lo.starts_with("0.92771") && hi.starts_with("0.92771"), "[{lo}, {hi}]");
        assert_eq!(eps_within(&value, 9278, 10000, CAP).unwrap().outcome, Outcome::Verified);

        let (subset, value) = maximize_eps(&[17], None, CAP).unwrap();
        assert!(subset.is_empty());
        assert!(value.is_point() && value.lo().is_zero());
    }

    #[test]
    fn section4_all_verified() {
        let certs = section4_checks(CAP).unwrap();
        assert_eq!(certs.len(), 4);
        for c in &certs {
            assert_eq!(c.outcome, Outcome::Verified, "{}: {:?}", c.claim_id, c.detail);
        }
    }
}
