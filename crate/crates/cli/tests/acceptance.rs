//! Acceptance suite: one test per release gate, each printing a PASS line
//! (run with `--nocapture` to see them stream).

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use obfuskit_core::eval::{
    degradation, normalize, score_with_client, ClientConfig, MockClient, TaskAccuracy,
};
use obfuskit_core::fol::{export_prover9, parse_formula};
use obfuskit_core::kinship::{
    parse_chain, resolve, resolve_chain, tables, verify_entry, CanonicalRelation, FamilyGraph,
    Gender, ResolveOptions, Verdict,
};
use obfuskit_core::records::{
    write_records, ObfuscationRecord, Payload, Provenance, Task, Variant,
};
use obfuskit_core::rewrite::obfuscate_premises;
use obfuskit_core::sample::random_formula;
use obfuskit_core::semantics::{check_equivalence, EquivError, EquivVerdict};
use obfuskit_core::series::{
    decode, encode_type1, encode_type2, encode_type3, md5_hex, SeriesInstance,
};
use obfuskit_core::spatial::{
    insert_detours, net_displacement, random_path, verify_invariance, Direction, InvarianceVerdict,
    MovementPath,
};
use obfuskit_core::{Label, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn pass(line: &str) {
    println!("PASS: {line}");
}

/// Ten thousand seeded formulas survive obfuscation with no equivalence
/// refutation over domain sizes one through three.
#[test]
fn rewrite_sweep_never_refutes_equivalence() {
    const SWEEP: usize = 10_000;
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut budget_exceeded = 0usize;
    let mut checked = 0usize;
    for i in 0..SWEEP {
        let formula = random_formula(&mut rng);
        let base = Problem::new(vec![formula.clone()], formula, Label::True);
        let (obf, _) = obfuscate_premises(&base, i as u64, 4)
            .unwrap_or_else(|e| panic!("sample {i} failed to rewrite: {e}"));
        match check_equivalence(&base.premises[0], &obf.premises[0], 3) {
            Ok(EquivVerdict::CounterModel(m)) => {
                panic!("sample {i} refuted: {m:?}\nbase {:?}", base.premises[0])
            }
            Ok(_) => checked += 1,
            Err(EquivError::BudgetExceeded { largest_completed }) => {
                assert!(
                    largest_completed >= 1,
                    "sample {i} exhausted the budget \
                     before finishing any domain"
                );
                budget_exceeded += 1;
            }
            Err(e) => panic!("sample {i}: {e:?}"),
        }
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed < Duration::from_secs(300),
        "sweep took {elapsed:?}, budget is five minutes"
    );
    pass(&format!(
        "rewrite soundness sweep: {SWEEP} formulas, {checked} fully checked, \
         {budget_exceeded} hit the model budget, zero counter-models, {elapsed:?}"
    ));
}

fn worked_entailment_problem() -> Problem {
    Problem::new(
        vec![parse_formula("forall x. (Human(x) -> Mammal(x))").unwrap()],
        parse_formula("~exists x. (Human(x) & ~Mammal(x))").unwrap(),
        Label::True,
    )
}

/// The worked entailment example exports byte-for-byte to the golden file,
/// and a live prover on PATH accepts the export.
#[test]
fn prover9_export_matches_golden() {
    let exported = export_prover9(&worked_entailment_problem());
    assert_eq!(exported, include_str!("golden/human_mammal.p"));

    let mut live = "no prover9 on PATH, grammar golden only";
    if let Ok(which) = Command::new("which").arg("prover9").output() {
        if which.status.success() {
            let dir = TempDir::new().unwrap();
            let input = dir.path().join("human_mammal.p");
            fs::write(&input, &exported).unwrap();
            let run = Command::new("prover9")
                .arg("-f")
                .arg(&input)
                .output()
                .expect("prover9 should spawn");
            assert!(
                run.status.success(),
                "prover9 found no proof:\n{}",
                String::from_utf8_lossy(&run.stdout)
            );
            live = "live prover9 proof found";
        }
    }
    pass(&format!("prover9 export golden matched; {live}"));
}

/// The documented five-three pair and a thousand random detour insertions
/// all preserve net displacement exactly.
#[test]
fn path_detours_preserve_net_displacement() {
    use Direction::{East, North, South, West};
    let started = Instant::now();

    let base = MovementPath::from_km(&[(North, 5), (East, 3)]);
    let longer = MovementPath::from_km(&[
        (North, 6),
        (East, 4),
        (South, 6),
        (East, 3),
        (West, 4),
        (North, 5),
    ]);
    assert_eq!(
        verify_invariance(&base, &longer),
        InvarianceVerdict::Invariant
    );
    let shown = net_displacement(&base);
    assert_eq!(shown.distance_report(), "5.83");
    assert_eq!(shown.answer_string(), "5.83 km away, North-East");

    for seed in 0..1_000u64 {
        let path = random_path(seed, 6, 9);
        let pairs = 1 + (seed % 3) as usize;
        let with_detours = insert_detours(&path, pairs, seed.wrapping_mul(97), 1..=9)
            .unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(
            verify_invariance(&path, &with_detours),
            InvarianceVerdict::Invariant,
            "seed {seed} drifted"
        );
    }

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(&format!(
        "spatial invariance: worked pair shows 5.83 North-East, \
         1000 random detour insertions invariant, {elapsed:?}"
    ));
}

/// All three series codecs invert exactly on random instances, and the
/// digit goldens (MD5 strings, planet codepoint sums) hold.
#[test]
fn series_codecs_round_trip_and_match_goldens() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let encoders = [encode_type1, encode_type2, encode_type3];
    for i in 0..1_000 {
        let len = rng.gen_range(4..=7);
        let terms: Vec<i64> = (0..len).map(|_| rng.gen_range(0..=9_999)).collect();
        let hidden_index = if rng.gen_bool(0.5) {
            Some(rng.gen_range(0..len))
        } else {
            None
        };
        let answer = match hidden_index {
            Some(idx) => terms[idx],
            None => rng.gen_range(0..=9_999),
        };
        let instance = SeriesInstance {
            terms,
            hidden_index,
            answer,
            pattern_note: format!("random sweep {i}"),
        };
        for encode in encoders {
            let (surface, log) = encode(&instance).unwrap();
            let decoded = decode(&surface, &log).unwrap();
            assert_eq!(decoded, instance, "sweep {i} failed to round-trip");
        }
    }

    let digest_goldens = [
        "cfcd208495d565ef66e7dff9f98764da",
        "c4ca4238a0b923820dcc509a6f75849b",
        "c81e728d9d4c2f636f067f89cc14862c",
        "eccbc87e4b5ce2fe28308fd9f2a7baf3",
        "a87ff679a2f3e71d9181a67b7542122c",
        "e4da3b7fbbce2345d7772b0674a318d5",
        "1679091c5a880faf6fb5e6087eb1b2dc",
        "8f14e45fceea167a5a36dedd4bea2543",
        "c9f0f895fb98ab9159f51fd0297e236d",
        "45c48cce2e2d7fbdea1afc51c7c6ad26",
    ];
    for (d, want) in digest_goldens.iter().enumerate() {
        assert_eq!(md5_hex(&d.to_string()), *want, "digit {d}");
    }

    let sums: Vec<i64> = (0..=9)
        .map(|d| {
            let single = SeriesInstance {
                terms: vec![d],
                hidden_index: None,
                answer: 0,
                pattern_note: String::new(),
            };
            let (surface, _) = encode_type2(&single).unwrap();
            surface.parse::<i64>().unwrap()
        })
        .collect();
    let distinct: BTreeSet<i64> = sums.iter().copied().collect();
    assert_eq!(distinct.len(), 10, "codepoint sums collide: {sums:?}");
    assert_eq!(sums[4], 403, "digit 4 token sum");

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(&format!(
        "series codecs: 1000 instances round-trip under all three schemes, \
         digit digests and distinct token sums (digit 4 = 403) match, {elapsed:?}"
    ));
}

/// Every substitution-table row verifies equivalent, the grandfather
/// puzzle resolves to brother, and the father/wife example names a mother.
#[test]
fn kinship_tables_resolve_equivalent() {
    let started = Instant::now();

    let t = tables();
    for entry in t.l1.iter().chain(t.l2.iter()) {
        assert_eq!(
            verify_entry(entry),
            Ok(Verdict::Equivalent),
            "{}: {}",
            entry.word.name(),
            entry.surface
        );
    }

    let chain = parse_chain("son of only son of my grandfather").unwrap();
    assert_eq!(
        resolve_chain(&chain, &FamilyGraph::new()),
        Ok(CanonicalRelation::Brother)
    );

    let mut g = FamilyGraph::new();
    let c = g.add_person(Some("C"), Gender::Male);
    let f = g.add_person(Some("F"), Gender::Unknown);
    g.add_parent(c, f).unwrap();
    let wife_of_c = parse_chain("wife of C").unwrap();
    let resolution = resolve(&wife_of_c, &g, &ResolveOptions::default()).unwrap();
    assert_eq!(resolution.name(f), Ok(CanonicalRelation::Mother));

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    pass(&format!(
        "kinship soundness: {} table rows equivalent, grandfather puzzle \
         names a brother, the father's wife is the mother, {elapsed:?}",
        t.l1.len() + t.l2.len()
    ));
}

/// The aggregation rule reproduces the reference scorecard's headline drop
/// and returns exactly zero when nothing degrades.
#[test]
fn degradation_matches_reference_scorecard() {
    let cells = [
        TaskAccuracy {
            task: Task::Fol,
            base: 0.98,
            obf: vec![0.56],
        },
        TaskAccuracy {
            task: Task::BloodRelation,
            base: 0.52,
            obf: vec![0.46, 0.45],
        },
        TaskAccuracy {
            task: Task::NumberSeries,
            base: 0.77,
            obf: vec![0.60],
        },
        TaskAccuracy {
            task: Task::Direction,
            base: 0.64,
            obf: vec![0.44],
        },
    ];
    let headline = degradation(&cells).unwrap();
    assert!(
        (headline - (-27.00)).abs() < 0.5,
        "headline {headline} strays from -27.00"
    );

    let flat: Vec<TaskAccuracy> = cells
        .iter()
        .map(|c| TaskAccuracy {
            task: c.task,
            base: c.base,
            obf: vec![c.base; c.obf.len()],
        })
        .collect();
    assert_eq!(degradation(&flat).unwrap(), 0.0);

    pass(&format!(
        "degradation arithmetic: reference cells aggregate to {headline:.3}% \
         (within 0.5 pp of -27.00), flat cells to exactly 0%"
    ));
}

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_obfuskit"));
    cmd.env_remove("OBFUSKIT_CONCURRENCY");
    cmd
}

fn record(
    id: &str,
    task: Task,
    question: &str,
    payload: Payload,
    answer: &str,
) -> ObfuscationRecord {
    ObfuscationRecord {
        id: id.to_string(),
        task,
        variant: Variant::Base,
        question_text: question.to_string(),
        payload,
        answer: answer.to_string(),
        provenance: Provenance::default(),
    }
}

fn acceptance_inputs(dir: &Path) -> (PathBuf, PathBuf, PathBuf, PathBuf) {
    let fol = dir.join("fol.jsonl");
    let problem = worked_entailment_problem();
    write_records(
        &fol,
        &[record(
            "f0",
            Task::Fol,
            "does the conclusion follow?",
            Payload::Fol { problem },
            "True",
        )],
    )
    .unwrap();

    let kinship = dir.join("kinship.jsonl");
    write_records(
        &kinship,
        &[record(
            "k0",
            Task::BloodRelation,
            "A is the brother of B. How is A related to B?",
            Payload::BloodRelation {
                statement: "A is the brother of B".to_string(),
                question: "How is A related to B?".to_string(),
            },
            "brother",
        )],
    )
    .unwrap();

    let series = dir.join("series.jsonl");
    write_records(
        &series,
        &[record(
            "s0",
            Task::NumberSeries,
            "What comes next in the series: 5 16 516 27?",
            Payload::NumberSeries {
                surface: "5 16 516 27".to_string(),
                instance: Some(SeriesInstance {
                    terms: vec![5, 16, 516, 27],
                    hidden_index: None,
                    answer: 38,
                    pattern_note: "interleaved".to_string(),
                }),
            },
            "38",
        )],
    )
    .unwrap();

    let direction = dir.join("direction.jsonl");
    let path = MovementPath::from_km(&[(Direction::North, 5), (Direction::East, 3)]);
    let answer = net_displacement(&path).answer_string();
    write_records(
        &direction,
        &[record(
            "d0",
            Task::Direction,
            "you walk north then east",
            Payload::Direction { path },
            &answer,
        )],
    )
    .unwrap();

    (fol, kinship, series, direction)
}

/// Every generating subcommand produces byte-identical output across two
/// runs with the same inputs and seeds.
#[test]
fn generating_subcommands_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let (fol, kinship, series, direction) = acceptance_inputs(dir.path());

    let commands: Vec<(&str, Vec<String>)> = vec![
        (
            "fol obfuscate",
            vec![
                "fol".into(),
                "obfuscate".into(),
                "--in".into(),
                fol.display().to_string(),
                "--seed".into(),
                "42".into(),
            ],
        ),
        (
            "kinship obfuscate --level l1",
            vec![
                "kinship".into(),
                "obfuscate".into(),
                "--in".into(),
                kinship.display().to_string(),
                "--level".into(),
                "l1".into(),
                "--seed".into(),
                "7".into(),
            ],
        ),
        (
            "kinship obfuscate --level l2",
            vec![
                "kinship".into(),
                "obfuscate".into(),
                "--in".into(),
                kinship.display().to_string(),
                "--level".into(),
                "l2".into(),
                "--seed".into(),
                "7".into(),
            ],
        ),
        (
            "series encode --type 1",
            vec![
                "series".into(),
                "encode".into(),
                "--in".into(),
                series.display().to_string(),
                "--type".into(),
                "1".into(),
                "--seed".into(),
                "3".into(),
            ],
        ),
        (
            "series encode --type 2",
            vec![
                "series".into(),
                "encode".into(),
                "--in".into(),
                series.display().to_string(),
                "--type".into(),
                "2".into(),
                "--seed".into(),
                "3".into(),
            ],
        ),
        (
            "series encode --type 3",
            vec![
                "series".into(),
                "encode".into(),
                "--in".into(),
                series.display().to_string(),
                "--type".into(),
                "3".into(),
                "--seed".into(),
                "3".into(),
            ],
        ),
        (
            "direction obfuscate",
            vec![
                "direction".into(),
                "obfuscate".into(),
                "--in".into(),
                direction.display().to_string(),
                "--pairs".into(),
                "2".into(),
                "--seed".into(),
                "9".into(),
            ],
        ),
    ];

    for (label, args) in &commands {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out_path = dir
                .path()
                .join(format!("{}_{run}.jsonl", label.replace([' ', '-'], "_")));
            let status = bin()
                .args(args)
                .arg("--out")
                .arg(&out_path)
                .output()
                .expect("binary should spawn");
            assert!(
                status.status.success(),
                "{label} run {run}: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            outputs.push(fs::read(&out_path).unwrap());
        }
        assert_eq!(outputs[0], outputs[1], "{label} is not deterministic");
        assert!(!outputs[0].is_empty(), "{label} wrote nothing");
    }

    pass(&format!(
        "determinism: {} generating invocations byte-identical across reruns",
        commands.len()
    ));
}

/// An echo-gold mock client scores a perfect run, and answer normalization
/// behaves as documented.
#[test]
fn echo_gold_mock_scores_one() {
    let dir = TempDir::new().unwrap();
    let (fol, kinship, series, direction) = acceptance_inputs(dir.path());

    let mut records = Vec::new();
    for input in [&fol, &kinship, &series, &direction] {
        records.extend(obfuskit_core::records::read_records(input).unwrap());
    }
    let mock = MockClient::echo_gold(&records);
    let report = score_with_client(&records, &mock, ClientConfig::default()).unwrap();
    for (task, row) in &report.cells {
        for (variant, cell) in row {
            assert_eq!(
                cell.accuracy,
                1.0,
                "{}/{} should echo perfectly",
                task.name(),
                variant.name()
            );
        }
    }

    assert_eq!(normalize("Sister-in-law"), "sister in law");
    assert_eq!(
        normalize("  5.83 km away, North-East "),
        "5 83 km away north east"
    );
    for sample in ["", "a", "MiXeD CaSe!!", "tabs\tand\nnewlines", "Ωmega"] {
        assert_eq!(normalize(&normalize(sample)), normalize(sample));
    }

    pass(&format!(
        "scoring harness: echo-gold mock scores 1.0 over {} records, \
         normalization idempotent on the probe set",
        records.len()
    ));
}
