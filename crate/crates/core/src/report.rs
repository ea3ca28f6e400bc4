//! Certificates: the machine-readable outcome of one verified claim.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::certified::{CertReal, Outcome, Verdict};

/// Outcome of one claim check, with enough structure to be replayed.
/// Intervals in `detail` are decimal strings rounded outward; big integers
/// are decimal strings, never JSON numbers.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Certificate {
    pub claim_id: String,
    pub outcome: Outcome,
    pub prec_used: u32,
    pub elapsed_ms: u64,
    pub detail: Value,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn new(claim_id: impl Into<String>, outcome: Outcome, prec_used: u32) -> Certificate {
        Certificate {
            claim_id: claim_id.into(),
            outcome,
            prec_used,
            elapsed_ms: 0,
            detail: Value::Null,
            notes: Vec::new(),
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Certificate {
        self.detail = detail;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Certificate {
        self.notes.push(note.into());
        self
    }

    /// Exit-code severity: verified 0, refuted 1, undetermined 2.
    pub fn severity(&self) -> i32 {
        outcome_severity(self.outcome)
    }
}

pub fn outcome_severity(outcome: Outcome) -> i32 {
    match outcome {
        Outcome::Verified | Outcome::Equal => 0,
        Outcome::Refuted => 1,
        Outcome::Undetermined => 2,
    }
}

/// Fold a verdict outcome into a claim-level outcome (`Equal` counts as
/// verified for `<=` claims).
pub fn claim_outcome(v: &Verdict) -> Outcome {
    match v.outcome {
        Outcome::Equal => Outcome::Verified,
        o => o,
    }
}

/// Worst outcome across a set of sub-verdicts.
pub fn combine_outcomes(outcomes: impl IntoIterator<Item = Outcome>) -> Outcome {
    let mut worst = Outcome::Verified;
    for o in outcomes {
        if outcome_severity(o) > outcome_severity(worst) {
            worst = o;
        }
    }
    worst
}

/// JSON rendering of an enclosure: decimal endpoints rounded outward.
pub fn interval_json(x: &CertReal, digits: u32) -> Value {
    let (lo, hi) = x.to_decimal_pair(digits);
    json!({
        "lo": lo,
        "hi": hi,
        "rounding": "outward",
        "decimals": digits,
        "prec_bits": x.prec(),
    })
}

/// JSON rendering of a verdict.
pub fn verdict_json(v: &Verdict) -> Value {
    match &v.witness {
        Some(w) => json!({
            "outcome": v.outcome,
            "prec_used": v.prec_used,
            "lhs": w.lhs,
            "rhs": w.rhs,
        }),
        None => json!({
            "outcome": v.outcome,
            "prec_used": v.prec_used,
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certified::Witness;

    #[test]
    fn severity_ordering() {
        assert_eq!(outcome_severity(Outcome::Verified), 0);
        assert_eq!(outcome_severity(Outcome::Equal), 0);
        assert_eq!(outcome_severity(Outcome::Refuted), 1);
        assert_eq!(outcome_severity(Outcome::Undetermined), 2);
        assert_eq!(
            combine_outcomes([Outcome::Verified, Outcome::Refuted, Outcome::Undetermined]),
            Outcome::Undetermined
        );
        assert_eq!(combine_outcomes([Outcome::Verified, Outcome::Refuted]), Outcome::Refuted);
    }

    #[test]
    fn certificate_roundtrip() {
        let cert = Certificate::new("lemma0/c(2)", Outcome::Verified, 96)
            .with_detail(json!({"constant": "c(2)"}))
            .with_note("printed constant differs");
        let text = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back.claim_id, cert.claim_id);
        assert_eq!(back.outcome, Outcome::Verified);
        assert_eq!(back.detail, cert.detail);
        assert_eq!(back.notes, cert.notes);
    }

    #[test]
    fn verdict_json_includes_witness() {
        let v = Verdict::new(
            Outcome::Refuted,
            64,
            Some(Witness { lhs: "368".into(), rhs: "[364.1, 364.2]".into() }),
        );
        let j = verdict_json(&v);
        assert_eq!(j["outcome"], "refuted");
        assert_eq!(j["lhs"], "368");
    }
}
