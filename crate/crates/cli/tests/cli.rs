//! End-to-end tests that drive the compiled `obfuskit` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use obfuskit_core::records::{
    write_predictions, write_records, ObfuscationRecord, Payload, Prediction, Provenance, Task,
    Variant,
};
use obfuskit_core::sample::random_problem;
use obfuskit_core::series::SeriesInstance;
use obfuskit_core::spatial::{net_displacement, random_path, substitute_surface, SurfaceStyle};
use obfuskit_core::Label;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_obfuskit"));
    cmd.env_remove("OBFUSKIT_CONCURRENCY");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary should spawn")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("process should exit normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout should be UTF-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr should be UTF-8")
}

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn path_str(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn base_record(
    id: String,
    task: Task,
    question: String,
    payload: Payload,
    answer: String,
) -> ObfuscationRecord {
    ObfuscationRecord {
        id,
        task,
        variant: Variant::Base,
        question_text: question,
        payload,
        answer,
        provenance: Provenance::default(),
    }
}

fn fol_bases(n: usize, seed: u64) -> Vec<ObfuscationRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let problem = random_problem(&mut rng);
            let answer = match problem.label {
                Label::True => "True",
                Label::False => "False",
            };
            base_record(
                format!("f{i}"),
                Task::Fol,
                format!("fol question {i}"),
                Payload::Fol { problem },
                answer.to_string(),
            )
        })
        .collect()
}

fn kinship_bases(words: &[&str]) -> Vec<ObfuscationRecord> {
    words
        .iter()
        .enumerate()
        .map(|(i, word)| {
            let statement = format!("A is the {word} of B");
            base_record(
                format!("k{i}"),
                Task::BloodRelation,
                format!("{statement}. How is A related to B?"),
                Payload::BloodRelation {
                    statement,
                    question: "How is A related to B?".to_string(),
                },
                (*word).to_string(),
            )
        })
        .collect()
}

fn series_bases(n: usize) -> Vec<ObfuscationRecord> {
    (0..n)
        .map(|i| {
            let start = 3 + i as i64;
            let step = 2 + i as i64;
            let terms: Vec<i64> = (0..5).map(|k| start + step * k).collect();
            let answer = start + step * 5;
            let surface = terms
                .iter()
                .map(i64::to_string)
                .collect::<Vec<_>>()
                .join(" ");
            base_record(
                format!("s{i}"),
                Task::NumberSeries,
                format!("What comes next in the series: {surface}?"),
                Payload::NumberSeries {
                    surface,
                    instance: Some(SeriesInstance {
                        terms,
                        hidden_index: None,
                        answer,
                        pattern_note: format!("arithmetic, step {step}"),
                    }),
                },
                answer.to_string(),
            )
        })
        .collect()
}

fn direction_bases(n: usize, seed: u64) -> Vec<ObfuscationRecord> {
    (0..n)
        .map(|i| {
            let path = random_path(seed + i as u64, 6, 9);
            let answer = net_displacement(&path).answer_string();
            let question = format!(
                "{} How far and in which direction are you from the starting point?",
                substitute_surface(&path, SurfaceStyle::Plain)
            );
            base_record(
                format!("d{i}"),
                Task::Direction,
                question,
                Payload::Direction { path },
                answer,
            )
        })
        .collect()
}

/// Runs the same generating command twice and checks the outputs byte-for-byte.
fn assert_deterministic(dir: &TempDir, args_for: impl Fn(&str) -> Vec<String>) {
    for name in ["rerun_a.jsonl", "rerun_b.jsonl"] {
        let args = args_for(path_str(dir, name).to_str().unwrap());
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = run(&refs);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let a = fs::read(path_str(dir, "rerun_a.jsonl")).unwrap();
    let b = fs::read(path_str(dir, "rerun_b.jsonl")).unwrap();
    assert_eq!(a, b, "same inputs and seed should produce identical bytes");
}

#[test]
fn help_texts_are_stable() {
    let cases: &[(&[&str], &str)] = &[
        (&["--help"], "help.txt"),
        (&["fol", "--help"], "help_fol.txt"),
        (&["fol", "obfuscate", "--help"], "help_fol_obfuscate.txt"),
        (
            &["fol", "export-prover9", "--help"],
            "help_fol_export_prover9.txt",
        ),
        (&["kinship", "--help"], "help_kinship.txt"),
        (
            &["kinship", "obfuscate", "--help"],
            "help_kinship_obfuscate.txt",
        ),
        (&["series", "--help"], "help_series.txt"),
        (&["series", "encode", "--help"], "help_series_encode.txt"),
        (&["direction", "--help"], "help_direction.txt"),
        (
            &["direction", "obfuscate", "--help"],
            "help_direction_obfuscate.txt",
        ),
        (&["verify", "--help"], "help_verify.txt"),
        (&["score", "--help"], "help_score.txt"),
    ];
    for (args, file) in cases {
        let out = run(args);
        assert_eq!(code(&out), 0, "{args:?} should exit 0");
        assert_eq!(stdout(&out), golden(file), "help for {args:?} drifted");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["frobnicate"]);
    assert_eq!(code(&out), 2);

    let out = run(&["fol", "obfuscate", "--in", "x.jsonl"]);
    assert_eq!(code(&out), 2, "missing required flags is a usage error");
}

#[test]
fn matching_input_and_output_paths_are_refused() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "both.jsonl");
    write_records(&file, &fol_bases(1, 0)).unwrap();
    let out = run(&[
        "fol",
        "obfuscate",
        "--in",
        file.to_str().unwrap(),
        "--out",
        file.to_str().unwrap(),
        "--seed",
        "1",
    ]);
    assert_eq!(code(&out), 2);
    assert!(
        stderr(&out).contains("never overwrite"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn missing_input_is_a_data_error() {
    let out = run(&["verify", "--in", "/nonexistent/definitely_not_here.jsonl"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn fol_obfuscate_round_trips_and_exports() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "base.jsonl");
    write_records(&input, &fol_bases(6, 11)).unwrap();

    let pairs = path_str(&dir, "pairs.jsonl");
    let out = run(&[
        "fol",
        "obfuscate",
        "--in",
        input.to_str().unwrap(),
        "--out",
        pairs.to_str().unwrap(),
        "--seed",
        "42",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("wrote 12 records"));

    let written = obfuskit_core::records::read_records(&pairs).unwrap();
    assert_eq!(written.len(), 12);
    for (i, chunk) in written.chunks(2).enumerate() {
        assert_eq!(chunk[0].id, format!("f{i}"));
        assert_eq!(chunk[0].variant, Variant::Base);
        assert_eq!(chunk[1].id, format!("f{i}"));
        assert_eq!(chunk[1].variant, Variant::Obf);
        let verdict = chunk[1].provenance.verdict.as_deref().unwrap_or("");
        assert!(verdict.starts_with("equivalent"), "verdict: {verdict}");
        assert!(!chunk[1].provenance.edits.is_empty());
    }

    let out = run(&["verify", "--in", pairs.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("verified 12 records"));

    let export = path_str(&dir, "p9");
    let out = run(&[
        "fol",
        "export-prover9",
        "--in",
        pairs.to_str().unwrap(),
        "--out-dir",
        export.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let mut files: Vec<String> = fs::read_dir(&export)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files.len(), 12);
    assert!(files.contains(&"f0_base.p".to_string()));
    assert!(files.contains(&"f0_obf.p".to_string()));
    for name in &files {
        let text = fs::read_to_string(export.join(name)).unwrap();
        assert!(text.contains("formulas(assumptions)."), "{name}");
        assert!(text.contains("formulas(goals)."), "{name}");
        assert!(text.ends_with("end_of_list.\n"), "{name}");
    }

    assert_deterministic(&dir, |out_path| {
        vec![
            "fol".into(),
            "obfuscate".into(),
            "--in".into(),
            input.to_str().unwrap().into(),
            "--out".into(),
            out_path.into(),
            "--seed".into(),
            "42".into(),
        ]
    });
}

#[test]
fn kinship_obfuscate_covers_both_levels() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "base.jsonl");
    write_records(
        &input,
        &kinship_bases(&["brother", "father", "mother", "uncle", "sister"]),
    )
    .unwrap();

    for (level, seed) in [("l1", "7"), ("l2", "11")] {
        let pairs = path_str(&dir, &format!("pairs_{level}.jsonl"));
        let out = run(&[
            "kinship",
            "obfuscate",
            "--in",
            input.to_str().unwrap(),
            "--out",
            pairs.to_str().unwrap(),
            "--level",
            level,
            "--seed",
            seed,
            "--verify",
        ]);
        assert_eq!(code(&out), 0, "{level} stderr: {}", stderr(&out));

        let out = run(&["verify", "--in", pairs.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{level} stderr: {}", stderr(&out));
        assert!(stdout(&out).contains("verified 10 records"));

        let expected = if level == "l1" {
            Variant::ObfL1
        } else {
            Variant::ObfL2
        };
        let written = obfuskit_core::records::read_records(&pairs).unwrap();
        for chunk in written.chunks(2) {
            assert_eq!(chunk[1].variant, expected);
            assert_ne!(chunk[0].question_text, chunk[1].question_text);
        }
    }

    assert_deterministic(&dir, |out_path| {
        vec![
            "kinship".into(),
            "obfuscate".into(),
            "--in".into(),
            input.to_str().unwrap().into(),
            "--out".into(),
            out_path.into(),
            "--level".into(),
            "l2".into(),
            "--seed".into(),
            "11".into(),
        ]
    });
}

#[test]
fn series_encode_round_trips_every_scheme() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "base.jsonl");
    write_records(&input, &series_bases(4)).unwrap();

    for ty in ["1", "2", "3"] {
        let pairs = path_str(&dir, &format!("pairs_{ty}.jsonl"));
        let out = run(&[
            "series",
            "encode",
            "--in",
            input.to_str().unwrap(),
            "--out",
            pairs.to_str().unwrap(),
            "--type",
            ty,
            "--seed",
            "3",
        ]);
        assert_eq!(code(&out), 0, "type {ty} stderr: {}", stderr(&out));

        let out = run(&["verify", "--in", pairs.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "type {ty} stderr: {}", stderr(&out));

        let written = obfuskit_core::records::read_records(&pairs).unwrap();
        for chunk in written.chunks(2) {
            let Payload::NumberSeries { surface, .. } = &chunk[1].payload else {
                panic!("series output should keep the series payload kind");
            };
            let term_tokens = surface.split(", ").flat_map(str::split_whitespace);
            match ty {
                "1" => assert!(
                    term_tokens
                        .clone()
                        .all(|tok| tok.chars().all(|c| c.is_ascii_alphabetic())),
                    "type 1 should be planet tokens: {surface}"
                ),
                "2" => assert!(
                    term_tokens
                        .clone()
                        .all(|tok| tok.chars().all(|c| c.is_ascii_digit())),
                    "type 2 should be decimal sums: {surface}"
                ),
                _ => assert!(
                    term_tokens.clone().all(|tok| {
                        tok.len() == 32 && tok.chars().all(|c| c.is_ascii_hexdigit())
                    }),
                    "type 3 should be MD5 digests: {surface}"
                ),
            }
            assert!(chunk[1].provenance.mapping_log.is_some());
        }
    }

    assert_deterministic(&dir, |out_path| {
        vec![
            "series".into(),
            "encode".into(),
            "--in".into(),
            input.to_str().unwrap().into(),
            "--out".into(),
            out_path.into(),
            "--type".into(),
            "1".into(),
            "--seed".into(),
            "3".into(),
        ]
    });
}

#[test]
fn direction_obfuscate_inserts_cancelling_detours() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "base.jsonl");
    write_records(&input, &direction_bases(4, 21)).unwrap();

    let pairs = path_str(&dir, "pairs.jsonl");
    let out = run(&[
        "direction",
        "obfuscate",
        "--in",
        input.to_str().unwrap(),
        "--out",
        pairs.to_str().unwrap(),
        "--pairs",
        "2",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let out = run(&["verify", "--in", pairs.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));

    let written = obfuskit_core::records::read_records(&pairs).unwrap();
    for chunk in written.chunks(2) {
        let (Payload::Direction { path: base }, Payload::Direction { path: obf }) =
            (&chunk[0].payload, &chunk[1].payload)
        else {
            panic!("direction output should keep the direction payload kind");
        };
        assert_eq!(
            obf.moves.len(),
            base.moves.len() + 4,
            "two cancelling pairs add four moves"
        );
        assert_eq!(chunk[0].answer, chunk[1].answer);
    }

    assert_deterministic(&dir, |out_path| {
        vec![
            "direction".into(),
            "obfuscate".into(),
            "--in".into(),
            input.to_str().unwrap().into(),
            "--out".into(),
            out_path.into(),
            "--pairs".into(),
            "2".into(),
            "--seed".into(),
            "9".into(),
        ]
    });
}

#[test]
fn failed_verification_exits_one_and_names_the_record() {
    let dir = TempDir::new().unwrap();
    let file = path_str(&dir, "pairs.jsonl");
    let mut records = kinship_bases(&["brother"]);
    let mut obf = records[0].clone();
    obf.variant = Variant::ObfL1;
    obf.payload = Payload::BloodRelation {
        statement: "A is the sister of B".to_string(),
        question: "How is A related to B?".to_string(),
    };
    records.push(obf);
    write_records(&file, &records).unwrap();

    let out = run(&["verify", "--in", file.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("`k0`"), "stderr: {}", stderr(&out));
}

#[test]
fn score_writes_a_report_and_flags_missing_predictions() {
    let dir = TempDir::new().unwrap();
    let records_path = path_str(&dir, "records.jsonl");
    let mut records = series_bases(2);
    records.extend(kinship_bases(&["brother", "father"]));
    write_records(&records_path, &records).unwrap();

    let preds: Vec<Prediction> = records
        .iter()
        .map(|r| Prediction {
            id: format!("{}/{}", r.id, r.variant.name()),
            prediction: r.answer.clone(),
        })
        .collect();
    let preds_path = path_str(&dir, "preds.jsonl");
    write_predictions(&preds_path, &preds).unwrap();

    let report_path = path_str(&dir, "report.json");
    let out = run(&[
        "score",
        "--records",
        records_path.to_str().unwrap(),
        "--preds",
        preds_path.to_str().unwrap(),
        "--report",
        report_path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("accuracy"));

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&report_path).unwrap()).unwrap();
    assert_eq!(report["total"], 4);
    assert_eq!(report["cells"]["number_series"]["base"]["accuracy"], 1.0);
    assert_eq!(report["cells"]["blood_relation"]["base"]["correct"], 2);

    let short_path = path_str(&dir, "short.jsonl");
    write_predictions(&short_path, &preds[1..]).unwrap();
    let out = run(&[
        "score",
        "--records",
        records_path.to_str().unwrap(),
        "--preds",
        short_path.to_str().unwrap(),
        "--report",
        path_str(&dir, "short_report.json").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("s0"), "stderr: {}", stderr(&out));
}

#[test]
fn concurrency_settings_do_not_change_output() {
    let dir = TempDir::new().unwrap();
    let input = path_str(&dir, "base.jsonl");
    write_records(&input, &fol_bases(8, 5)).unwrap();

    let mut outputs = Vec::new();
    for (n, name) in [("1", "one.jsonl"), ("8", "eight.jsonl")] {
        let out_path = path_str(&dir, name);
        let out = run(&[
            "--concurrency",
            n,
            "fol",
            "obfuscate",
            "--in",
            input.to_str().unwrap(),
            "--out",
            out_path.to_str().unwrap(),
            "--seed",
            "13",
            "--no-verify",
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
        outputs.push(fs::read(&out_path).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);

    let env_path = path_str(&dir, "env.jsonl");
    let out = bin()
        .env("OBFUSKIT_CONCURRENCY", "2")
        .args([
            "fol",
            "obfuscate",
            "--in",
            input.to_str().unwrap(),
            "--out",
            env_path.to_str().unwrap(),
            "--seed",
            "13",
            "--no-verify",
        ])
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(fs::read(&env_path).unwrap(), outputs[0]);
}
