//! Answer normalization, exact-match accuracy, degradation statistics,
//! Cohen's κ, and a scoring harness with a pluggable model client.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

use crate::records::{ObfuscationRecord, Task, Variant};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("no pairs to score")]
    EmptyInput,
    #[error("task {task} has base accuracy 0, so relative degradation is undefined")]
    ZeroBaseAccuracy { task: String },
    #[error("label lists have lengths {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("chance agreement is 1 while observed agreement is {observed}")]
    DegenerateMarginals { observed: f64 },
    #[error("no prediction for record `{0}`")]
    MissingPrediction(String),
    #[error("client failed for record `{id}` after {attempts} attempts: {message}")]
    ClientFailure {
        id: String,
        attempts: usize,
        message: String,
    },
}

/// Canonical answer form: NFC, lowercased, punctuation replaced by spaces,
/// whitespace runs collapsed, trimmed. Idempotent.
pub fn normalize(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_gap = false;
    for c in text.nfc().flat_map(char::to_lowercase) {
        if c.is_alphanumeric() {
            if pending_gap && !out.is_empty() {
                out.push(' ');
            }
            pending_gap = false;
            out.push(c);
        } else {
            pending_gap = true;
        }
    }
    out
}

/// Fraction of `(prediction, gold)` pairs that match after normalization.
pub fn em_accuracy(pairs: &[(&str, &str)]) -> Result<f64, EvalError> {
    if pairs.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let hits = pairs
        .iter()
        .filter(|(pred, gold)| normalize(pred) == normalize(gold))
        .count();
    Ok(hits as f64 / pairs.len() as f64)
}

/// One task's accuracy cells entering the degradation aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskAccuracy {
    pub task: Task,
    pub base: f64,
    /// Obfuscated-variant accuracies; blood relation lists L1 then L2.
    pub obf: Vec<f64>,
}

/// Relative drop for one task in percent: the mean over its obfuscated
/// variants of (obf − base)/base × 100.
pub fn task_drop(cell: &TaskAccuracy) -> Result<f64, EvalError> {
    if cell.base == 0.0 {
        return Err(EvalError::ZeroBaseAccuracy {
            task: cell.task.name().to_string(),
        });
    }
    if cell.obf.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let sum: f64 = cell
        .obf
        .iter()
        .map(|o| (o - cell.base) / cell.base * 100.0)
        .sum();
    Ok(sum / cell.obf.len() as f64)
}

/// Headline degradation: the unweighted mean of the per-task drops.
pub fn degradation(cells: &[TaskAccuracy]) -> Result<f64, EvalError> {
    if cells.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut sum = 0.0;
    for cell in cells {
        sum += task_drop(cell)?;
    }
    Ok(sum / cells.len() as f64)
}

/// κ from pre-computed observed and chance agreement rates.
pub fn kappa_from_agreement(p_o: f64, p_e: f64) -> Result<f64, EvalError> {
    if (1.0 - p_e).abs() < 1e-12 {
        return if (1.0 - p_o).abs() < 1e-12 {
            Ok(1.0)
        } else {
            Err(EvalError::DegenerateMarginals { observed: p_o })
        };
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

/// Cohen's κ between two equal-length label lists.
pub fn cohen_kappa<T: Ord>(a: &[T], b: &[T]) -> Result<f64, EvalError> {
    if a.len() != b.len() {
        return Err(EvalError::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let n = a.len() as f64;
    let observed = a.iter().zip(b).filter(|(x, y)| x == y).count() as f64 / n;
    let mut counts_a: BTreeMap<&T, usize> = BTreeMap::new();
    let mut counts_b: BTreeMap<&T, usize> = BTreeMap::new();
    for x in a {
        *counts_a.entry(x).or_default() += 1;
    }
    for y in b {
        *counts_b.entry(y).or_default() += 1;
    }
    let chance: f64 = counts_a
        .iter()
        .map(|(label, ca)| {
            let cb = counts_b.get(label).copied().unwrap_or(0);
            (*ca as f64 / n) * (cb as f64 / n)
        })
        .sum();
    kappa_from_agreement(observed, chance)
}

/// Accuracy cell of a score report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub count: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Per-task, per-variant exact-match report with degradation figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub cells: BTreeMap<Task, BTreeMap<Variant, CellReport>>,
    /// Percent drop per task, for tasks with a base and an obfuscated cell.
    pub degradation_by_task: BTreeMap<Task, f64>,
    /// Unweighted mean of the per-task drops; absent without any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub headline_degradation: Option<f64>,
    pub total: usize,
}

impl ScoreReport {
    /// Aligned-column rendering for terminals.
    pub fn text_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<16} {:<8} {:>6} {:>8} {:>9}",
            "task", "variant", "count", "correct", "accuracy"
        );
        for (task, variants) in &self.cells {
            for (variant, cell) in variants {
                let _ = writeln!(
                    out,
                    "{:<16} {:<8} {:>6} {:>8} {:>9.3}",
                    task.name(),
                    variant.name(),
                    cell.count,
                    cell.correct,
                    cell.accuracy
                );
            }
        }
        if !self.degradation_by_task.is_empty() {
            let _ = writeln!(out, "{:<16} {:>10}", "degradation", "percent");
            for (task, drop) in &self.degradation_by_task {
                let _ = writeln!(out, "{:<16} {:>+10.2}", task.name(), drop);
            }
            if let Some(headline) = self.headline_degradation {
                let _ = writeln!(out, "{:<16} {:>+10.2}", "headline", headline);
            }
        }
        out
    }
}

fn prediction_key(record: &ObfuscationRecord) -> String {
    format!("{}/{}", record.id, record.variant.name())
}

fn build_report(rows: &[(Task, Variant, bool)]) -> Result<ScoreReport, EvalError> {
    let mut cells: BTreeMap<Task, BTreeMap<Variant, (usize, usize)>> = BTreeMap::new();
    for (task, variant, correct) in rows {
        let cell = cells
            .entry(*task)
            .or_default()
            .entry(*variant)
            .or_insert((0, 0));
        cell.0 += 1;
        cell.1 += usize::from(*correct);
    }
    let cells: BTreeMap<Task, BTreeMap<Variant, CellReport>> = cells
        .into_iter()
        .map(|(task, variants)| {
            let variants = variants
                .into_iter()
                .map(|(variant, (count, correct))| {
                    (
                        variant,
                        CellReport {
                            count,
                            correct,
                            accuracy: correct as f64 / count as f64,
                        },
                    )
                })
                .collect();
            (task, variants)
        })
        .collect();

    let mut degradation_by_task = BTreeMap::new();
    for (task, variants) in &cells {
        let Some(base) = variants.get(&Variant::Base) else {
            continue;
        };
        let obf: Vec<f64> = variants
            .iter()
            .filter(|(v, _)| !v.is_base())
            .map(|(_, cell)| cell.accuracy)
            .collect();
        if obf.is_empty() {
            continue;
        }
        let drop = task_drop(&TaskAccuracy {
            task: *task,
            base: base.accuracy,
            obf,
        })?;
        degradation_by_task.insert(*task, drop);
    }
    let headline_degradation = if degradation_by_task.is_empty() {
        None
    } else {
        Some(degradation_by_task.values().sum::<f64>() / degradation_by_task.len() as f64)
    };
    Ok(ScoreReport {
        total: rows.len(),
        cells,
        degradation_by_task,
        headline_degradation,
    })
}

/// Scores records against an id-keyed prediction map.
///
/// When a records batch holds several variants of one id, a prediction may
/// address a specific variant with the key `id/variant_name`; the composite
/// key is consulted first, then the bare id.
pub fn score_from_predictions(
    records: &[ObfuscationRecord],
    predictions: &BTreeMap<String, String>,
) -> Result<ScoreReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let pred = predictions
            .get(&prediction_key(r))
            .or_else(|| predictions.get(&r.id))
            .ok_or_else(|| EvalError::MissingPrediction(r.id.clone()))?;
        rows.push((r.task, r.variant, normalize(pred) == normalize(&r.answer)));
    }
    build_report(&rows)
}

/// Answers one question; errors are retried up to the configured bound.
pub trait ModelClient: Send + Sync {
    fn complete(&self, question: &str) -> Result<String, String>;
}

/// Retry/concurrency policy for client-driven scoring.
#[derive(Debug, Clone, Copy)]
pub struct ClientConfig {
    /// Retries after the first attempt.
    pub max_retries: usize,
    /// Upper bound on concurrent in-flight requests.
    pub max_in_flight: usize,
    /// First retry delay; doubles per subsequent retry.
    pub backoff: Duration,
}

impl Default for ClientConfig {
    fn default() -> Self {
        ClientConfig {
            max_retries: 2,
            max_in_flight: 4,
            backoff: Duration::from_millis(50),
        }
    }
}

/// Collects one prediction per record from a client, bounded-concurrently.
/// Results are joined by record key, so completion order is irrelevant.
pub fn collect_predictions(
    records: &[ObfuscationRecord],
    client: &dyn ModelClient,
    config: ClientConfig,
) -> Result<BTreeMap<String, String>, EvalError> {
    let next = AtomicUsize::new(0);
    let results: Mutex<BTreeMap<String, Result<String, EvalError>>> = Mutex::new(BTreeMap::new());
    let workers = config.max_in_flight.max(1).min(records.len().max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(record) = records.get(i) else {
                    break;
                };
                let mut attempt = 0;
                let outcome = loop {
                    match client.complete(&record.question_text) {
                        Ok(answer) => break Ok(answer),
                        Err(message) => {
                            if attempt >= config.max_retries {
                                break Err(EvalError::ClientFailure {
                                    id: record.id.clone(),
                                    attempts: attempt + 1,
                                    message,
                                });
                            }
                            if !config.backoff.is_zero() {
                                std::thread::sleep(
                                    config.backoff * (1u32 << attempt.min(16) as u32),
                                );
                            }
                            attempt += 1;
                        }
                    }
                };
                results
                    .lock()
                    .unwrap()
                    .insert(prediction_key(record), outcome);
            });
        }
    });
    let mut map = BTreeMap::new();
    for (key, outcome) in results.into_inner().unwrap() {
        map.insert(key, outcome?);
    }
    Ok(map)
}

/// Scores records by querying a model client for every question.
pub fn score_with_client(
    records: &[ObfuscationRecord],
    client: &dyn ModelClient,
    config: ClientConfig,
) -> Result<ScoreReport, EvalError> {
    if records.is_empty() {
        return Err(EvalError::EmptyInput);
    }
    let predictions = collect_predictions(records, client, config)?;
    score_from_predictions(records, &predictions)
}

/// Deterministic in-memory client for tests and offline smoke runs.
#[derive(Debug, Default)]
pub struct MockClient {
    answers: BTreeMap<String, String>,
    failures: Mutex<BTreeMap<String, usize>>,
}

impl MockClient {
    /// A client that answers every record's question with its gold answer.
    pub fn echo_gold(records: &[ObfuscationRecord]) -> MockClient {
        let answers = records
            .iter()
            .map(|r| (r.question_text.clone(), r.answer.clone()))
            .collect();
        MockClient {
            answers,
            failures: Mutex::new(BTreeMap::new()),
        }
    }

    /// Overrides the scripted answer for one question.
    pub fn with_answer(mut self, question: &str, answer: &str) -> MockClient {
        self.answers
            .insert(question.to_string(), answer.to_string());
        self
    }

    /// Makes the first `times` calls for `question` fail transiently.
    pub fn failing_first(self, question: &str, times: usize) -> MockClient {
        self.failures
            .lock()
            .unwrap()
            .insert(question.to_string(), times);
        self
    }
}

impl ModelClient for MockClient {
    fn complete(&self, question: &str) -> Result<String, String> {
        if let Some(left) = self.failures.lock().unwrap().get_mut(question) {
            if *left > 0 {
                *left -= 1;
                return Err("injected transient failure".to_string());
            }
        }
        self.answers
            .get(question)
            .cloned()
            .ok_or_else(|| "no scripted answer".to_string())
    }
}
