//! Benchmark record schema and JSONL I/O.
//!
//! One record per line, snake_case keys. Base and obfuscated variants of the
//! same question share an `id` and must carry the identical answer string;
//! that invariant is enforced when a batch is written.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fol::Problem;
use crate::series::{MappingLog, SeriesInstance};
use crate::spatial::MovementPath;

/// Task family a record belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Fol,
    BloodRelation,
    NumberSeries,
    Direction,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Fol => "fol",
            Task::BloodRelation => "blood_relation",
            Task::NumberSeries => "number_series",
            Task::Direction => "direction",
        }
    }
}

/// Which rendering of the question a record holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Base,
    Obf,
    ObfL1,
    ObfL2,
    Type1,
    Type2,
    Type3,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::Base => "base",
            Variant::Obf => "obf",
            Variant::ObfL1 => "obf_l1",
            Variant::ObfL2 => "obf_l2",
            Variant::Type1 => "type1",
            Variant::Type2 => "type2",
            Variant::Type3 => "type3",
        }
    }

    pub fn is_base(self) -> bool {
        matches!(self, Variant::Base)
    }
}

/// Task-specific structured body of a record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Fol {
        problem: Problem,
    },
    BloodRelation {
        statement: String,
        question: String,
    },
    NumberSeries {
        /// The series as printed: decimal terms for base records, encoded
        /// tokens/sums/digests for obfuscated ones.
        surface: String,
        /// Structured instance; present on base records.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        instance: Option<SeriesInstance>,
    },
    Direction {
        path: MovementPath,
    },
}

impl Payload {
    pub fn task(&self) -> Task {
        match self {
            Payload::Fol { .. } => Task::Fol,
            Payload::BloodRelation { .. } => Task::BloodRelation,
            Payload::NumberSeries { .. } => Task::NumberSeries,
            Payload::Direction { .. } => Task::Direction,
        }
    }
}

/// How a record came to be, and what checks it has passed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct Provenance {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Human-readable rule/edit log, one entry per applied transformation.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub edits: Vec<String>,
    /// Forward mapping for encoded number series; inverts the encoding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mapping_log: Option<MappingLog>,
    /// Verification verdict recorded at generation time, when one was run.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<String>,
}

/// One benchmark question in one variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObfuscationRecord {
    pub id: String,
    pub task: Task,
    pub variant: Variant,
    pub question_text: String,
    pub payload: Payload,
    pub answer: String,
    #[serde(default)]
    pub provenance: Provenance,
}

/// One model prediction keyed by record id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub prediction: String,
}

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: {message}")]
    SchemaViolation { line: usize, message: String },
    #[error("records sharing id `{id}` carry different answers")]
    AnswerInvariance { id: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Checks the shared-id/shared-answer contract over a batch.
pub fn check_answer_invariance(records: &[ObfuscationRecord]) -> Result<(), RecordError> {
    let mut answers: BTreeMap<&str, &str> = BTreeMap::new();
    for r in records {
        match answers.get(r.id.as_str()) {
            Some(a) if *a != r.answer => {
                return Err(RecordError::AnswerInvariance { id: r.id.clone() })
            }
            Some(_) => {}
            None => {
                answers.insert(&r.id, &r.answer);
            }
        }
    }
    Ok(())
}

fn parse_line<T: for<'de> Deserialize<'de>>(line: &str, number: usize) -> Result<T, RecordError> {
    serde_json::from_str(line).map_err(|e| RecordError::SchemaViolation {
        line: number,
        message: e.to_string(),
    })
}

/// Reads a JSONL record file; blank lines are rejected, not skipped.
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<ObfuscationRecord>, RecordError> {
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        records.push(parse_line(&line?, i + 1)?);
    }
    Ok(records)
}

/// Writes records as JSONL after enforcing answer invariance.
pub fn write_records(
    path: impl AsRef<Path>,
    records: &[ObfuscationRecord],
) -> Result<(), RecordError> {
    check_answer_invariance(records)?;
    let mut out = BufWriter::new(File::create(path)?);
    for r in records {
        serde_json::to_writer(&mut out, r).map_err(|e| RecordError::SchemaViolation {
            line: 0,
            message: e.to_string(),
        })?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a JSONL predictions file into an id-keyed map.
pub fn read_predictions(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>, RecordError> {
    let reader = BufReader::new(File::open(path)?);
    let mut map = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let p: Prediction = parse_line(&line?, i + 1)?;
        map.insert(p.id, p.prediction);
    }
    Ok(map)
}

/// Writes predictions as JSONL, one object per line.
pub fn write_predictions(
    path: impl AsRef<Path>,
    predictions: &[Prediction],
) -> Result<(), RecordError> {
    let mut out = BufWriter::new(File::create(path)?);
    for p in predictions {
        serde_json::to_writer(&mut out, p).map_err(|e| RecordError::SchemaViolation {
            line: 0,
            message: e.to_string(),
        })?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fol::{parse_formula, Label};
    use crate::series::{decode, encode_type2, encode_type3};
    use crate::spatial::{net_displacement, random_path};
    use rand::{RngCore, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn fol_record(id: &str, variant: Variant) -> ObfuscationRecord {
        let problem = Problem::new(
            vec![parse_formula("forall x. (Human(x) -> Mammal(x))").unwrap()],
            parse_formula("~exists x. (Human(x) & ~Mammal(x))").unwrap(),
            Label::True,
        );
        ObfuscationRecord {
            id: id.to_string(),
            task: Task::Fol,
            variant,
            question_text: "Do the premises entail the conclusion?".to_string(),
            payload: Payload::Fol { problem },
            answer: "True".to_string(),
            provenance: Provenance {
                seed: Some(7),
                edits: vec!["double-negation at []".to_string()],
                ..Provenance::default()
            },
        }
    }

    fn series_record(id: &str, terms: &[i64]) -> ObfuscationRecord {
        let instance = SeriesInstance {
            terms: terms.to_vec(),
            hidden_index: None,
            answer: *terms.last().unwrap(),
            pattern_note: String::new(),
        };
        let surface = terms
            .iter()
            .map(i64::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        ObfuscationRecord {
            id: id.to_string(),
            task: Task::NumberSeries,
            variant: Variant::Base,
            question_text: format!("What comes next: {surface}?"),
            payload: Payload::NumberSeries {
                surface,
                instance: Some(instance),
            },
            answer: terms.last().unwrap().to_string(),
            provenance: Provenance::default(),
        }
    }

    fn direction_record(id: &str, seed: u64) -> ObfuscationRecord {
        let path = random_path(seed, 6, 9);
        let answer = net_displacement(&path).answer_string();
        ObfuscationRecord {
            id: id.to_string(),
            task: Task::Direction,
            variant: Variant::Base,
            question_text: "How far and in which direction from the start?".to_string(),
            payload: Payload::Direction { path },
            answer,
            provenance: Provenance {
                seed: Some(seed),
                ..Provenance::default()
            },
        }
    }

    fn kinship_record(id: &str, variant: Variant) -> ObfuscationRecord {
        ObfuscationRecord {
            id: id.to_string(),
            task: Task::BloodRelation,
            variant,
            question_text: "A is the brother of B. How is A related to B?".to_string(),
            payload: Payload::BloodRelation {
                statement: "A is the brother of B".to_string(),
                question: "How is A related to B?".to_string(),
            },
            answer: "brother".to_string(),
            provenance: Provenance::default(),
        }
    }

    #[test]
    fn mixed_records_round_trip_losslessly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut records = Vec::new();
        for i in 0..1000 {
            let id = format!("r{i:04}");
            records.push(match i % 4 {
                0 => fol_record(&id, Variant::Base),
                1 => kinship_record(&id, Variant::ObfL1),
                2 => series_record(&id, &[i, i + 2, i + 4]),
                _ => direction_record(&id, rng.next_u64()),
            });
        }
        write_records(&path, &records).unwrap();
        let back = read_records(&path).unwrap();
        assert_eq!(back, records);
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        let good = serde_json::to_string(&fol_record("a", Variant::Base)).unwrap();
        let mut f = File::create(&path).unwrap();
        for _ in 0..6 {
            writeln!(f, "{good}").unwrap();
        }
        writeln!(f, "{{ not json").unwrap();
        drop(f);
        match read_records(&path) {
            Err(RecordError::SchemaViolation { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected schema violation, got {other:?}"),
        }
    }

    #[test]
    fn shared_id_with_different_answers_is_rejected_at_write() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("records.jsonl");
        let base = kinship_record("k1", Variant::Base);
        let mut obf = kinship_record("k1", Variant::ObfL1);
        obf.answer = "sister".to_string();
        match write_records(&path, &[base, obf]) {
            Err(RecordError::AnswerInvariance { id }) => assert_eq!(id, "k1"),
            other => panic!("expected answer-invariance error, got {other:?}"),
        }
        assert!(!path.exists());
    }

    #[test]
    fn mapping_log_round_trips_decodability() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("series.jsonl");
        let base = series_record("s1", &[2, 4, 6, 8]);
        let instance = match &base.payload {
            Payload::NumberSeries { instance, .. } => instance.clone().unwrap(),
            _ => unreachable!(),
        };
        for encode in [encode_type2, encode_type3] {
            let (surface, log) = encode(&instance).unwrap();
            let obf = ObfuscationRecord {
                variant: Variant::Type2,
                question_text: format!("What comes next: {surface}?"),
                payload: Payload::NumberSeries {
                    surface: surface.clone(),
                    instance: None,
                },
                provenance: Provenance {
                    mapping_log: Some(log),
                    ..Provenance::default()
                },
                ..base.clone()
            };
            write_records(&path, &[base.clone(), obf]).unwrap();
            let back = read_records(&path).unwrap();
            let (surface_back, log_back) = match (&back[1].payload, &back[1].provenance.mapping_log)
            {
                (Payload::NumberSeries { surface, .. }, Some(log)) => (surface, log),
                other => panic!("unexpected shape {other:?}"),
            };
            assert_eq!(decode(surface_back, log_back).unwrap(), instance);
        }
    }

    #[test]
    fn predictions_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("preds.jsonl");
        let preds = vec![
            Prediction {
                id: "r1".to_string(),
                prediction: "brother".to_string(),
            },
            Prediction {
                id: "r2".to_string(),
                prediction: "5.83 km away, North-East".to_string(),
            },
        ];
        write_predictions(&path, &preds).unwrap();
        let map = read_predictions(&path).unwrap();
        assert_eq!(map.len(), 2);
        assert_eq!(map["r2"], "5.83 km away, North-East");
    }
}
