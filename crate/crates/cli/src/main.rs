//! `obfuskit`: generate, verify, and score logically obfuscated reasoning
//! problems over a shared JSONL record schema.
//!
//! Exit codes: 0 success, 1 verification or data failure, 2 usage error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand, ValueEnum};

use obfuskit_core::eval::score_from_predictions;
use obfuskit_core::fol::{export_prover9, render_formula, Style};
use obfuskit_core::kinship::{substitute_once, verify_kinship, Level, Verdict};
use obfuskit_core::records::{
    read_predictions, read_records, write_records, ObfuscationRecord, Payload, Provenance,
    RecordError, Task, Variant,
};
use obfuskit_core::rewrite::obfuscate_premises;
use obfuskit_core::series::{
    encode_type1, encode_type2, encode_type3, MappingLog, SeriesError, SeriesInstance,
};
use obfuskit_core::spatial::{insert_detours, substitute_surface, SurfaceStyle};
use obfuskit_core::verify::{verify_pair, verify_records, PairVerdict};
use obfuskit_core::Problem;

/// Environment variable holding the default worker-pool size.
const CONCURRENCY_ENV: &str = "OBFUSKIT_CONCURRENCY";

#[derive(Parser)]
#[command(
    name = "obfuskit",
    version,
    about = "Generate, verify, and score logically obfuscated reasoning problems"
)]
struct Cli {
    /// Worker pool size for batch subcommands (default: $OBFUSKIT_CONCURRENCY or 4)
    #[arg(long, global = true, value_name = "N")]
    concurrency: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// First-order logic entailment problems
    #[command(subcommand)]
    Fol(FolCommand),
    /// Kinship (blood-relation) puzzles
    #[command(subcommand)]
    Kinship(KinshipCommand),
    /// Number-series puzzles
    #[command(subcommand)]
    Series(SeriesCommand),
    /// Direction-sense puzzles
    #[command(subcommand)]
    Direction(DirectionCommand),
    /// Re-verify base/obfuscated pairs from their stored provenance
    Verify(VerifyArgs),
    /// Score a predictions file against gold answers
    Score(ScoreArgs),
}

#[derive(Subcommand)]
enum FolCommand {
    /// Rewrite every premise into a seeded, equivalent obfuscated form
    Obfuscate(FolObfuscateArgs),
    /// Write each problem as a Prover9 input file
    ExportProver9(ExportProver9Args),
}

#[derive(Subcommand)]
enum KinshipCommand {
    /// Replace one relation word per statement with a table alternative
    Obfuscate(KinshipObfuscateArgs),
}

#[derive(Subcommand)]
enum SeriesCommand {
    /// Encode every series term with the chosen scheme
    Encode(SeriesEncodeArgs),
}

#[derive(Subcommand)]
enum DirectionCommand {
    /// Insert self-canceling detour pairs into every path
    Obfuscate(DirectionObfuscateArgs),
}

#[derive(Args)]
struct IoArgs {
    /// Input JSONL records
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Output JSONL records; must differ from the input
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
struct FolObfuscateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Base RNG seed; record i uses seed + i
    #[arg(long)]
    seed: u64,
    /// Rewrite steps applied to each premise
    #[arg(long, default_value_t = 4)]
    min_rules: usize,
    /// Re-check equivalence after rewriting (the default)
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    /// Skip the equivalence re-check
    #[arg(long)]
    no_verify: bool,
    /// Largest finite-model domain size for the re-check
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
}

#[derive(Args)]
struct ExportProver9Args {
    /// Input JSONL records
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Directory receiving one .p file per record
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    L1,
    L2,
}

#[derive(Args)]
struct KinshipObfuscateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Substitution depth
    #[arg(long, value_enum)]
    level: LevelArg,
    /// Base RNG seed; record i uses seed + i
    #[arg(long)]
    seed: u64,
    /// Re-resolve each rewritten statement against its base (off by default)
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct SeriesEncodeArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Encoding scheme: 1 planet tokens, 2 codepoint sums, 3 MD5 digests
    #[arg(long = "type", value_name = "1|2|3", value_parser = clap::value_parser!(u8).range(1..=3))]
    encoder: u8,
    /// Recorded in provenance; the encoders themselves are deterministic
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct DirectionObfuscateArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Self-canceling detour pairs inserted per path
    #[arg(long)]
    pairs: usize,
    /// Base RNG seed; record i uses seed + i
    #[arg(long)]
    seed: u64,
    /// Re-check displacement invariance (the default)
    #[arg(long, overrides_with = "no_verify")]
    verify: bool,
    /// Skip the invariance re-check
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// JSONL file holding base and obfuscated variants sharing ids
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Largest finite-model domain size for FOL pairs
    #[arg(long, default_value_t = 3)]
    max_domain: usize,
}

#[derive(Args)]
struct ScoreArgs {
    /// JSONL records with gold answers
    #[arg(long, value_name = "FILE")]
    records: PathBuf,
    /// JSONL predictions: one {"id", "prediction"} object per line
    #[arg(long, value_name = "FILE")]
    preds: PathBuf,
    /// Where the JSON report is written
    #[arg(long, value_name = "FILE")]
    report: PathBuf,
}

struct CliError {
    message: String,
    code: u8,
}

impl CliError {
    fn data(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            code: 1,
        }
    }

    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            message: message.into(),
            code: 2,
        }
    }
}

impl From<RecordError> for CliError {
    fn from(e: RecordError) -> CliError {
        CliError::data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> CliError {
        CliError::data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = effective_concurrency(cli.concurrency);
    match run(cli.command, workers) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn effective_concurrency(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(CONCURRENCY_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(4)
    .max(1)
}

fn run(command: Command, workers: usize) -> Result<(), CliError> {
    match command {
        Command::Fol(FolCommand::Obfuscate(args)) => fol_obfuscate(args, workers),
        Command::Fol(FolCommand::ExportProver9(args)) => fol_export(args),
        Command::Kinship(KinshipCommand::Obfuscate(args)) => kinship_obfuscate(args, workers),
        Command::Series(SeriesCommand::Encode(args)) => series_encode(args, workers),
        Command::Direction(DirectionCommand::Obfuscate(args)) => direction_obfuscate(args, workers),
        Command::Verify(args) => verify(args),
        Command::Score(args) => score(args),
    }
}

/// Maps items to values on a bounded worker pool, preserving input order.
fn par_map<T, U, F>(items: &[T], workers: usize, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(usize, &T) -> U + Sync,
{
    let workers = workers.max(1).min(items.len().max(1));
    let next = AtomicUsize::new(0);
    let out: Mutex<Vec<Option<U>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(item) = items.get(i) else { break };
                let value = f(i, item);
                out.lock().unwrap()[i] = Some(value);
            });
        }
    });
    out.into_inner()
        .unwrap()
        .into_iter()
        .map(|v| v.expect("every slot filled"))
        .collect()
}

/// Rejects output paths that would clobber the input.
fn guard_overwrite(input: &Path, out: &Path) -> Result<(), CliError> {
    fn resolved(p: &Path) -> PathBuf {
        let parent = match p.parent() {
            Some(q) if !q.as_os_str().is_empty() => q,
            _ => Path::new("."),
        };
        let parent = parent
            .canonicalize()
            .unwrap_or_else(|_| parent.to_path_buf());
        parent.join(p.file_name().unwrap_or_default())
    }
    if resolved(input) == resolved(out) {
        return Err(CliError::usage(
            "the output path equals the input path; outputs never overwrite inputs",
        ));
    }
    Ok(())
}

fn load_base_records(path: &Path, task: Task) -> Result<Vec<ObfuscationRecord>, CliError> {
    let records = read_records(path)?;
    for r in &records {
        if r.task != task {
            return Err(CliError::data(format!(
                "record `{}` has task {}, expected {}",
                r.id,
                r.task.name(),
                task.name()
            )));
        }
        if !r.variant.is_base() {
            return Err(CliError::data(format!(
                "record `{}` has variant {}, expected base",
                r.id,
                r.variant.name()
            )));
        }
    }
    Ok(records)
}

/// Runs one obfuscation batch: derives an obfuscated record per base record,
/// writes base/obf pairs in input order, and lists verification failures.
fn run_pair_batch<F>(io: &IoArgs, task: Task, workers: usize, make_obf: F) -> Result<(), CliError>
where
    F: Fn(usize, &ObfuscationRecord) -> Result<(ObfuscationRecord, Option<String>), String> + Sync,
{
    guard_overwrite(&io.input, &io.out)?;
    let bases = load_base_records(&io.input, task)?;
    let results = par_map(&bases, workers, |i, rec| make_obf(i, rec));

    let mut out = Vec::with_capacity(bases.len() * 2);
    let mut failures: Vec<(String, String)> = Vec::new();
    for (base, result) in bases.iter().zip(results) {
        match result {
            Ok((obf, failure)) => {
                if let Some(why) = failure {
                    failures.push((base.id.clone(), why));
                }
                out.push(base.clone());
                out.push(obf);
            }
            Err(message) => return Err(CliError::data(message)),
        }
    }
    write_records(&io.out, &out)?;
    if failures.is_empty() {
        println!("wrote {} records to {}", out.len(), io.out.display());
        Ok(())
    } else {
        for (id, why) in &failures {
            eprintln!("verification failed for `{id}`: {why}");
        }
        Err(CliError::data(format!(
            "verification failed for {} record(s)",
            failures.len()
        )))
    }
}

fn fol_question(p: &Problem) -> String {
    let premises: Vec<String> = p
        .premises
        .iter()
        .map(|f| render_formula(f, Style::NlTemplate))
        .collect();
    format!(
        "Premises: {}. Conclusion: {}. Does the conclusion follow from the premises? \
         Answer True or False.",
        premises.join(". "),
        render_formula(&p.conclusion, Style::NlTemplate)
    )
}

fn fol_obfuscate(args: FolObfuscateArgs, workers: usize) -> Result<(), CliError> {
    let do_verify = !args.no_verify;
    run_pair_batch(&args.io, Task::Fol, workers, |i, rec| {
        let Payload::Fol { problem } = &rec.payload else {
            return Err(format!("record `{}` has a non-fol payload", rec.id));
        };
        let seed = args.seed.wrapping_add(i as u64);
        let (obf_problem, traces) = obfuscate_premises(problem, seed, args.min_rules)
            .map_err(|e| format!("record `{}`: {e}", rec.id))?;
        let edits = traces
            .iter()
            .enumerate()
            .flat_map(|(p, trace)| {
                trace.steps.iter().map(move |s| {
                    format!(
                        "premise {p}: {:?} {:?} at {:?}",
                        s.rule.id, s.rule.direction, s.position
                    )
                })
            })
            .collect();
        let mut obf = ObfuscationRecord {
            id: rec.id.clone(),
            task: Task::Fol,
            variant: Variant::Obf,
            question_text: fol_question(&obf_problem),
            payload: Payload::Fol {
                problem: obf_problem,
            },
            answer: rec.answer.clone(),
            provenance: Provenance {
                seed: Some(seed),
                edits,
                ..Provenance::default()
            },
        };
        let mut failure = None;
        if do_verify {
            match verify_pair(rec, &obf, args.max_domain) {
                PairVerdict::Verified => {
                    obf.provenance.verdict =
                        Some(format!("equivalent over domains 1..={}", args.max_domain));
                }
                PairVerdict::Failed(why) => {
                    obf.provenance.verdict = Some(format!("failed: {why}"));
                    failure = Some(why);
                }
            }
        }
        Ok((obf, failure))
    })
}

fn sanitize_file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '-'
            }
        })
        .collect()
}

fn fol_export(args: ExportProver9Args) -> Result<(), CliError> {
    let records = read_records(&args.input)?;
    std::fs::create_dir_all(&args.out_dir)?;
    let mut written = 0usize;
    for r in &records {
        let Payload::Fol { problem } = &r.payload else {
            return Err(CliError::data(format!(
                "record `{}` has task {}, expected fol",
                r.id,
                r.task.name()
            )));
        };
        let name = format!("{}_{}.p", sanitize_file_stem(&r.id), r.variant.name());
        std::fs::write(args.out_dir.join(name), export_prover9(problem))?;
        written += 1;
    }
    println!("exported {written} problems to {}", args.out_dir.display());
    Ok(())
}

fn kinship_obfuscate(args: KinshipObfuscateArgs, workers: usize) -> Result<(), CliError> {
    let (level, variant) = match args.level {
        LevelArg::L1 => (Level::L1, Variant::ObfL1),
        LevelArg::L2 => (Level::L2, Variant::ObfL2),
    };
    run_pair_batch(&args.io, Task::BloodRelation, workers, |i, rec| {
        let Payload::BloodRelation {
            statement,
            question,
        } = &rec.payload
        else {
            return Err(format!("record `{}` has a non-kinship payload", rec.id));
        };
        let seed = args.seed.wrapping_add(i as u64);
        let sub = substitute_once(statement, level, seed)
            .map_err(|e| format!("record `{}`: {e}", rec.id))?;
        let mut obf = ObfuscationRecord {
            id: rec.id.clone(),
            task: Task::BloodRelation,
            variant,
            question_text: format!("{}. {}", sub.text, question),
            payload: Payload::BloodRelation {
                statement: sub.text.clone(),
                question: question.clone(),
            },
            answer: rec.answer.clone(),
            provenance: Provenance {
                seed: Some(seed),
                edits: vec![format!(
                    "replaced `{}` with `{}` at byte {}",
                    sub.word.name(),
                    sub.surface,
                    sub.span.0
                )],
                ..Provenance::default()
            },
        };
        let mut failure = None;
        if args.verify {
            match verify_kinship(statement, &sub.text) {
                Verdict::Equivalent => obf.provenance.verdict = Some("equivalent".to_string()),
                Verdict::Ambiguous => {
                    obf.provenance.verdict = Some("ambiguous".to_string());
                    failure = Some("the rewritten statement is ambiguous".to_string());
                }
                Verdict::Divergent(why) => {
                    obf.provenance.verdict = Some(format!("divergent: {why}"));
                    failure = Some(why);
                }
            }
        }
        Ok((obf, failure))
    })
}

fn series_encode(args: SeriesEncodeArgs, workers: usize) -> Result<(), CliError> {
    type Encoder = for<'a> fn(&'a SeriesInstance) -> Result<(String, MappingLog), SeriesError>;
    let (encode, variant): (Encoder, Variant) = match args.encoder {
        1 => (encode_type1, Variant::Type1),
        2 => (encode_type2, Variant::Type2),
        _ => (encode_type3, Variant::Type3),
    };
    run_pair_batch(&args.io, Task::NumberSeries, workers, |i, rec| {
        let Payload::NumberSeries {
            instance: Some(instance),
            ..
        } = &rec.payload
        else {
            return Err(format!(
                "record `{}` carries no structured series instance",
                rec.id
            ));
        };
        let (surface, log) = encode(instance).map_err(|e| format!("record `{}`: {e}", rec.id))?;
        let question_text = if instance.hidden_index.is_some() {
            format!("What is the hidden term of the series: {surface}?")
        } else {
            format!("What comes next in the series: {surface}?")
        };
        let obf = ObfuscationRecord {
            id: rec.id.clone(),
            task: Task::NumberSeries,
            variant,
            question_text,
            payload: Payload::NumberSeries {
                surface,
                instance: None,
            },
            answer: rec.answer.clone(),
            provenance: Provenance {
                seed: Some(args.seed.wrapping_add(i as u64)),
                edits: vec![format!(
                    "encoded every term with scheme type{}",
                    args.encoder
                )],
                mapping_log: Some(log),
                ..Provenance::default()
            },
        };
        // The mapping log must restore the base instance exactly; this is
        // cheap enough to check unconditionally.
        let failure = match verify_pair(rec, &obf, 1) {
            PairVerdict::Verified => None,
            PairVerdict::Failed(why) => Some(why),
        };
        let mut obf = obf;
        obf.provenance.verdict = Some(match &failure {
            None => "decodes to the base instance".to_string(),
            Some(why) => format!("failed: {why}"),
        });
        Ok((obf, failure))
    })
}

fn direction_obfuscate(args: DirectionObfuscateArgs, workers: usize) -> Result<(), CliError> {
    let do_verify = !args.no_verify;
    run_pair_batch(&args.io, Task::Direction, workers, |i, rec| {
        let Payload::Direction { path } = &rec.payload else {
            return Err(format!("record `{}` has a non-direction payload", rec.id));
        };
        let seed = args.seed.wrapping_add(i as u64);
        let obf_path = insert_detours(path, args.pairs, seed, 1..=9)
            .map_err(|e| format!("record `{}`: {e}", rec.id))?;
        let mut obf = ObfuscationRecord {
            id: rec.id.clone(),
            task: Task::Direction,
            variant: Variant::Obf,
            question_text: format!(
                "{} How far and in which direction are you from the starting point?",
                substitute_surface(&obf_path, SurfaceStyle::Plain)
            ),
            payload: Payload::Direction { path: obf_path },
            answer: rec.answer.clone(),
            provenance: Provenance {
                seed: Some(seed),
                edits: vec![format!(
                    "inserted {} self-canceling detour pair(s)",
                    args.pairs
                )],
                ..Provenance::default()
            },
        };
        let mut failure = None;
        if do_verify {
            match verify_pair(rec, &obf, 1) {
                PairVerdict::Verified => {
                    obf.provenance.verdict = Some("net displacement preserved".to_string());
                }
                PairVerdict::Failed(why) => {
                    obf.provenance.verdict = Some(format!("failed: {why}"));
                    failure = Some(why);
                }
            }
        }
        Ok((obf, failure))
    })
}

fn verify(args: VerifyArgs) -> Result<(), CliError> {
    let records = read_records(&args.input)?;
    let failures = verify_records(&records, args.max_domain);
    if failures.is_empty() {
        println!("verified {} records", records.len());
        Ok(())
    } else {
        for (id, why) in &failures {
            eprintln!("verification failed for `{id}`: {why}");
        }
        Err(CliError::data(format!(
            "verification failed for {} record(s)",
            failures.len()
        )))
    }
}

fn score(args: ScoreArgs) -> Result<(), CliError> {
    let records = read_records(&args.records)?;
    let predictions = read_predictions(&args.preds)?;
    let report = score_from_predictions(&records, &predictions)
        .map_err(|e| CliError::data(e.to_string()))?;
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::data(e.to_string()))?;
    std::fs::write(&args.report, json + "\n")?;
    print!("{}", report.text_table());
    Ok(())
}
