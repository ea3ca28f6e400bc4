//! Arbitrary-precision interval arithmetic with directed rounding, and a
//! comparison engine that turns inequalities between log/power expressions
//! into certified verdicts.
//!
//! The trichotomy [`certified_compare`] decides `lhs < rhs`, `lhs > rhs`, or
//! exact equality, escalating the working precision (64 bits, doubling) up
//! to a caller-supplied cap. A `Verified`/`Refuted` verdict never changes
//! under further precision increase; when the cap is exhausted with
//! overlapping enclosures the result is an honest `Undetermined`.

pub mod dyadic;
pub mod expr;
pub mod interval;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dyadic::{Dyadic, Round};
pub use expr::Expr;
pub use interval::{
    log2_dyadic, log2_enclosure, log2_interval, pow2_dyadic, pow2_enclosure, CertReal,
};

/// Starting precision of the escalation schedule.
pub const PREC_START: u32 = 64;
/// Default precision cap; at the cap the engine reports `Undetermined`
/// rather than guessing.
pub const PREC_CAP_DEFAULT: u32 = 4096;

#[derive(Debug, Error)]
pub enum CertError {
    #[error("log2 of zero is undefined")]
    Log2OfZero,
    #[error("power base is not certified positive")]
    NonPositiveBase,
    #[error("interval divisor is not certified positive")]
    DivisorNotPositive,
    #[error("precision budget exceeded: {0}")]
    PrecisionBudget(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("domain error: {0}")]
    Domain(String),
}

/// Outcome of one certified comparison `lhs ? rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    /// `lhs < rhs` provably (disjoint enclosures), or a `<=` claim that
    /// reduced to exact equality.
    Verified,
    /// `lhs > rhs` provably.
    Refuted,
    /// Both sides reduce to the same exact rational.
    Equal,
    /// Precision cap exhausted with overlapping enclosures.
    Undetermined,
}

/// Final evaluated sides of a comparison, rendered as decimal intervals
/// (rounded outward) or exact rationals.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub lhs: String,
    pub rhs: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub outcome: Outcome,
    pub prec_used: u32,
    pub witness: Option<Witness>,
}

impl Verdict {
    pub fn new(outcome: Outcome, prec_used: u32, witness: Option<Witness>) -> Verdict {
        Verdict { outcome, prec_used, witness }
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.outcome, Outcome::Verified | Outcome::Equal)
    }
}

fn interval_witness(l: &CertReal, r: &CertReal) -> Witness {
    let digits = 12;
    let (llo, lhi) = l.to_decimal_pair(digits);
    let (rlo, rhi) = r.to_decimal_pair(digits);
    Witness { lhs: format!("[{llo}, {lhi}]"), rhs: format!("[{rlo}, {rhi}]") }
}

/// Escalation driver over any pair of enclosure producers. The closure is
/// called with increasing precision; enclosures are intersected across
/// rounds, so refinement is monotone by construction.
pub fn compare_enclosures<F>(prec_cap: u32, mut sides: F) -> Result<Verdict, CertError>
where
    F: FnMut(u32) -> Result<(CertReal, CertReal), CertError>,
{
    let mut prec = PREC_START.min(prec_cap.max(8));
    let mut acc: Option<(CertReal, CertReal)> = None;
    loop {
        let (l, r) = sides(prec)?;
        let (l, r) = match acc {
            Some((al, ar)) => {
                let l = al.intersect(&l).unwrap_or(al);
                let r = ar.intersect(&r).unwrap_or(ar);
                (l, r)
            }
            None => (l, r),
        };
        if l.strictly_below(&r) {
            return Ok(Verdict::new(Outcome::Verified, prec, Some(interval_witness(&l, &r))));
        }
        if r.strictly_below(&l) {
            return Ok(Verdict::new(Outcome::Refuted, prec, Some(interval_witness(&l, &r))));
        }
        if prec >= prec_cap {
            return Ok(Verdict::new(Outcome::Undetermined, prec, Some(interval_witness(&l, &r))));
        }
        acc = Some((l, r));
        prec = (prec * 2).min(prec_cap);
    }
}

/// Certified trichotomy between two expressions.
///
/// `Equal` is returned only for syntactic/rational coincidences; no attempt
/// is made to decide transcendental equalities.
pub fn certified_compare(lhs: &Expr, rhs: &Expr, prec_cap: u32) -> Result<Verdict, CertError> {
    match (lhs.exact(), rhs.exact()) {
        (Some(a), Some(b)) => {
            let outcome = match a.cmp(&b) {
                Ordering::Less => Outcome::Verified,
                Ordering::Greater => Outcome::Refuted,
                Ordering::Equal => Outcome::Equal,
            };
            return Ok(Verdict::new(
                outcome,
                0,
                Some(Witness { lhs: a.to_string(), rhs: b.to_string() }),
            ));
        }
        _ => {
            if lhs.normalize() == rhs.normalize() {
                return Ok(Verdict::new(
                    Outcome::Equal,
                    0,
                    Some(Witness { lhs: lhs.to_string(), rhs: rhs.to_string() }),
                ));
            }
        }
    }
    compare_enclosures(prec_cap, |prec| Ok((lhs.eval(prec)?, rhs.eval(prec)?)))
}

/// Certify the claim `lhs <= rhs`: verified when `lhs < rhs` is certified or
/// exact equality is detected.
pub fn certify_le(lhs: &Expr, rhs: &Expr, prec_cap: u32) -> Result<Verdict, CertError> {
    let mut v = certified_compare(lhs, rhs, prec_cap)?;
    if v.outcome == Outcome::Equal {
        v.outcome = Outcome::Verified;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_trichotomy() {
        let v = certified_compare(&Expr::log2(16u32), &Expr::int(4), 256).unwrap();
        assert_eq!(v.outcome, Outcome::Equal);
        assert_eq!(v.prec_used, 0);
        let v = certified_compare(&Expr::int(3), &Expr::int(5), 256).unwrap();
        assert_eq!(v.outcome, Outcome::Verified);
        let v = certified_compare(&Expr::ratio(7, 2), &Expr::int(3), 256).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted);
    }

    #[test]
    fn lemma_base_case_at_29() {
        // 2*29 < 29^(log2(29)/4): reference value 59.7138977... from an
        // independent high-precision evaluation.
        let lhs = Expr::int(58);
        let rhs = Expr::pow(Expr::int(29), Expr::prod([Expr::ratio(1, 4), Expr::log2(29u32)]));
        let v = certified_compare(&lhs, &rhs, 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Verified);
    }

    #[test]
    fn refuted_at_23_with_cofactor_8() {
        // 2*184 = 368 > 23^(log2(184)/4) = 364.133...
        let lhs = Expr::int(368);
        let rhs = Expr::pow(Expr::int(23), Expr::prod([Expr::ratio(1, 4), Expr::log2(184u32)]));
        let v = certified_compare(&lhs, &rhs, 4096).unwrap();
        assert_eq!(v.outcome, Outcome::Refuted);
    }

    #[test]
    fn syntactic_equality_of_commuted_products() {
        let a = Expr::prod([Expr::log2(10u32), Expr::log2(77u32)]);
        let b = Expr::prod([Expr::log2(77u32), Expr::log2(10u32)]);
        let v = certified_compare(&a, &b, 128).unwrap();
        assert_eq!(v.outcome, Outcome::Equal);
    }

    #[test]
    fn undetermined_when_transcendentally_equal() {
        // 2^(log2 3) vs 3: truly equal but not syntactically reducible, so
        // the honest answer at any cap is Undetermined.
        let lhs = Expr::pow(Expr::int(2), Expr::log2(3u32));
        let rhs = Expr::int(3);
        let v = certified_compare(&lhs, &rhs, 256).unwrap();
        assert_eq!(v.outcome, Outcome::Undetermined);
        assert_eq!(v.prec_used, 256);
    }

    #[test]
    fn le_maps_equal_to_verified() {
        let v = certify_le(&Expr::log2(16u32), &Expr::int(4), 128).unwrap();
        assert_eq!(v.outcome, Outcome::Verified);
    }
}
