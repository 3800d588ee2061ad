//! Re-verification of base/obfuscated record pairs from their stored
//! payloads and provenance alone — no regeneration needed.

use crate::fol::Problem;
use crate::kinship::{verify_kinship, Verdict};
use crate::records::{ObfuscationRecord, Payload};
use crate::semantics::{check_equivalence, EquivVerdict};
use crate::series::decode;
use crate::spatial::{verify_invariance, InvarianceVerdict};

/// Outcome of re-checking one base/obfuscated pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairVerdict {
    Verified,
    Failed(String),
}

impl PairVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, PairVerdict::Verified)
    }

    fn fail(message: impl Into<String>) -> PairVerdict {
        PairVerdict::Failed(message.into())
    }
}

fn verify_fol(base: &Problem, obf: &Problem, max_domain: usize) -> PairVerdict {
    if base.premises.len() != obf.premises.len() {
        return PairVerdict::fail(format!(
            "premise count changed from {} to {}",
            base.premises.len(),
            obf.premises.len()
        ));
    }
    if base.conclusion != obf.conclusion {
        return PairVerdict::fail("the conclusion was altered");
    }
    for (i, (b, o)) in base.premises.iter().zip(&obf.premises).enumerate() {
        match check_equivalence(b, o, max_domain) {
            Ok(v) if v.is_equivalent() => {}
            Ok(EquivVerdict::CounterModel(m)) => {
                return PairVerdict::fail(format!(
                    "premise {i} is not equivalent; counter-model: {m:?}"
                ))
            }
            Ok(_) => unreachable!("non-equivalent verdicts are counter-models"),
            Err(e) => return PairVerdict::fail(format!("premise {i}: {e}")),
        }
    }
    PairVerdict::Verified
}

/// Re-checks that `obf` denotes the same question as `base`.
///
/// `max_domain` bounds the finite-model sweep for FOL pairs and is ignored
/// elsewhere.
pub fn verify_pair(
    base: &ObfuscationRecord,
    obf: &ObfuscationRecord,
    max_domain: usize,
) -> PairVerdict {
    if base.task != obf.task {
        return PairVerdict::fail(format!(
            "task changed from {} to {}",
            base.task.name(),
            obf.task.name()
        ));
    }
    if base.answer != obf.answer {
        return PairVerdict::fail("answers differ between variants");
    }
    match (&base.payload, &obf.payload) {
        (Payload::Fol { problem: b }, Payload::Fol { problem: o }) => verify_fol(b, o, max_domain),
        (
            Payload::BloodRelation { statement: b, .. },
            Payload::BloodRelation { statement: o, .. },
        ) => match verify_kinship(b, o) {
            Verdict::Equivalent => PairVerdict::Verified,
            Verdict::Ambiguous => PairVerdict::fail("the rewritten statement is ambiguous"),
            Verdict::Divergent(why) => PairVerdict::fail(why),
        },
        (
            Payload::NumberSeries {
                instance: Some(b), ..
            },
            Payload::NumberSeries { surface, .. },
        ) => {
            let Some(log) = &obf.provenance.mapping_log else {
                return PairVerdict::fail("encoded record carries no mapping log");
            };
            match decode(surface, log) {
                Ok(decoded) if decoded == *b => PairVerdict::Verified,
                Ok(_) => PairVerdict::fail("decoding the surface does not restore the base"),
                Err(e) => PairVerdict::fail(e.to_string()),
            }
        }
        (Payload::NumberSeries { instance: None, .. }, Payload::NumberSeries { .. }) => {
            PairVerdict::fail("base record carries no structured instance")
        }
        (Payload::Direction { path: b }, Payload::Direction { path: o }) => {
            match verify_invariance(b, o) {
                InvarianceVerdict::Invariant => PairVerdict::Verified,
                InvarianceVerdict::Drift { east, north } => PairVerdict::fail(format!(
                    "net displacement drifts by ({east} east, {north} north)"
                )),
            }
        }
        _ => PairVerdict::fail("payload kinds differ between variants"),
    }
}

/// Groups records by id and verifies every non-base variant against its
/// base. Returns the offending `(id, reason)` list, empty when all pass.
pub fn verify_records(records: &[ObfuscationRecord], max_domain: usize) -> Vec<(String, String)> {
    let mut failures = Vec::new();
    let mut by_id: std::collections::BTreeMap<&str, Vec<&ObfuscationRecord>> =
        std::collections::BTreeMap::new();
    for r in records {
        by_id.entry(&r.id).or_default().push(r);
    }
    for (id, group) in by_id {
        let base = group.iter().find(|r| r.variant.is_base());
        let Some(base) = base else {
            failures.push((id.to_string(), "no base variant in the file".to_string()));
            continue;
        };
        for r in group.iter().filter(|r| !r.variant.is_base()) {
            if let PairVerdict::Failed(why) = verify_pair(base, r, max_domain) {
                failures.push((id.to_string(), why));
            }
        }
    }
    failures
}
