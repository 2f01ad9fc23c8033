//! Command-line front end. Owns file formats, manifests, and exit codes:
//! 0 = success with a result, 1 = clean run with no result, 2 = usage or
//! input error.

use crate::check;
use crate::engine::{
    iter_repair, summarize, EngineConfig, RepairTrace, ReportSummary, StopPolicy,
};
use crate::exec::{run_suite, TestSuite, DEFAULT_STEP_BUDGET};
use crate::faultloc::rank;
use crate::gen::{iterative_train, GeneratorModel, GrowthRow};
use crate::lang::{executable_lines, SourceProgram};
use crate::manifest::{write_sidecar, RunManifest};
use crate::perturb::{build_corpus, corpus_to_jsonl, CorpusSample, SeedProgram};
use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NO_RESULT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "iterfix",
    version = concat!(env!("CARGO_PKG_VERSION"), " (format ", "1", ")"),
    about = "Iterative test-driven repair for MiniLang programs"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Corpus construction from seed programs
    Corpus {
        #[command(subcommand)]
        command: CorpusCommand,
    },
    /// Train the patch-ranking model with iterative self-augmentation
    Train(TrainArgs),
    /// Rank suspicious lines for a failing program
    Fl(FlArgs),
    /// Search for plausible patches
    Repair(RepairArgs),
    /// Aggregate repair traces into an evolution summary
    Report(ReportArgs),
}

#[derive(Subcommand)]
pub enum CorpusCommand {
    /// Perturb seed programs into executed, filtered (buggy, fixed) pairs
    Generate(CorpusArgs),
}

#[derive(Args)]
pub struct CorpusArgs {
    /// Directory of <name>.mini programs with <name>.tests.json suites
    #[arg(long)]
    pub programs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long = "per-program", default_value_t = 20)]
    pub per_program: usize,
    /// 1 = single perturbations, 2 = composed two-line bugs
    #[arg(long, default_value_t = 1)]
    pub locations: u32,
}

#[derive(Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long = "max-iter", default_value_t = 3)]
    pub max_iter: u32,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "augmented-out")]
    pub augmented_out: Option<PathBuf>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Args)]
pub struct FlArgs {
    #[arg(long)]
    pub program: PathBuf,
    #[arg(long)]
    pub tests: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub top: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args)]
pub struct RepairArgs {
    #[arg(long)]
    pub program: PathBuf,
    #[arg(long)]
    pub tests: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long = "max-iter", default_value_t = 3)]
    pub max_iter: u32,
    #[arg(long, default_value_t = 50)]
    pub top: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long = "stop-policy", value_enum, default_value_t = StopPolicyArg::CollectAll)]
    pub stop_policy: StopPolicyArg,
    #[arg(long = "prune-worsening")]
    pub prune_worsening: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum StopPolicyArg {
    CollectAll,
    FirstPlausible,
}

#[derive(Args)]
pub struct ReportArgs {
    /// Directory of trace .json files (sidecars are ignored)
    #[arg(long)]
    pub traces: PathBuf,
    #[arg(long)]
    pub json: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn main_entry() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, String> {
    match cli.command {
        Command::Corpus { command: CorpusCommand::Generate(a) } => cmd_corpus(a),
        Command::Train(a) => cmd_train(a),
        Command::Fl(a) => cmd_fl(a),
        Command::Repair(a) => cmd_repair(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write_artifact(path: &Path, content: &str, manifest: &RunManifest, wall_ms: u64) -> Result<(), String> {
    std::fs::write(path, content).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    write_sidecar(path, manifest, wall_ms)
        .map_err(|e| format!("cannot write sidecar for {}: {e}", path.display()))
}

fn load_seed_programs(dir: &Path, manifest: &mut RunManifest) -> Result<Vec<SeedProgram>, String> {
    let entries = std::fs::read_dir(dir)
        .map_err(|e| format!("cannot read programs dir {}: {e}", dir.display()))?;
    let mut mini: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "mini"))
        .collect();
    mini.sort();
    if mini.is_empty() {
        return Err(format!("no .mini programs in {}", dir.display()));
    }
    let mut seeds = Vec::new();
    for p in mini {
        let stem = p.file_stem().unwrap().to_string_lossy().to_string();
        let tests = p.with_file_name(format!("{stem}.tests.json"));
        let src_text = read(&p)?;
        let suite_text = read(&tests)?;
        manifest.input_bytes(&p, src_text.as_bytes());
        manifest.input_bytes(&tests, suite_text.as_bytes());
        let suite = TestSuite::from_json(&suite_text)
            .map_err(|e| format!("bad suite {}: {e}", tests.display()))?;
        seeds.push(SeedProgram {
            name: stem,
            program: SourceProgram::from_file_text(&src_text),
            suite,
        });
    }
    Ok(seeds)
}

fn cmd_corpus(a: CorpusArgs) -> Result<i32, String> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("corpus generate", a.seed);
    manifest
        .flag("programs", a.programs.display())
        .flag("out", a.out.display())
        .flag("seed", a.seed)
        .flag("per-program", a.per_program)
        .flag("locations", a.locations);
    let seeds = load_seed_programs(&a.programs, &mut manifest)?;
    let (samples, stats) = build_corpus(&seeds, a.per_program, a.seed, a.locations)?;
    let mut content = format!(
        "{{\"manifest\":{}}}\n",
        serde_json::to_string(&manifest).unwrap()
    );
    content.push_str(&corpus_to_jsonl(&samples));
    content.push('\n');
    write_artifact(&a.out, &content, &manifest, start.elapsed().as_millis() as u64)?;
    println!(
        "kept {} samples from {} executed mutants across {} programs -> {}",
        samples.len(),
        stats.executed,
        seeds.len(),
        a.out.display()
    );
    Ok(if samples.is_empty() { EXIT_NO_RESULT } else { EXIT_OK })
}

/// Reads a corpus file, skipping a leading manifest line if present.
pub fn load_corpus(text: &str) -> Result<Vec<CorpusSample>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        if i == 0 {
            if let Ok(v) = serde_json::from_str::<serde_json::Value>(line) {
                if v.get("manifest").is_some() {
                    continue;
                }
            }
        }
        out.push(
            serde_json::from_str(line)
                .map_err(|e| format!("corpus line {}: {e}", i + 1))?,
        );
    }
    Ok(out)
}

fn growth_table(rows: &[GrowthRow]) -> String {
    let mut t = String::from("iteration  size  added\n");
    for r in rows {
        t.push_str(&format!("{:<9}  {:<4}  {}\n", r.iteration, r.size, r.added));
    }
    t
}

fn cmd_train(a: TrainArgs) -> Result<i32, String> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("train", a.seed);
    manifest
        .flag("corpus", a.corpus.display())
        .flag("k", a.k)
        .flag("max-iter", a.max_iter)
        .flag("out", a.out.display())
        .flag("seed", a.seed);
    if let Some(p) = &a.augmented_out {
        manifest.flag("augmented-out", p.display());
    }
    let corpus_text = read(&a.corpus)?;
    manifest.input_bytes(&a.corpus, corpus_text.as_bytes());
    let corpus = load_corpus(&corpus_text)?;
    let (model, s, rows) = iterative_train(&corpus, a.k, a.max_iter)?;

    let model_doc = serde_json::json!({
        "manifest": manifest,
        "weights": model.weights,
        "growth": rows,
    });
    let wall = start.elapsed().as_millis() as u64;
    write_artifact(
        &a.out,
        &format!("{}\n", serde_json::to_string_pretty(&model_doc).unwrap()),
        &manifest,
        wall,
    )?;
    if let Some(p) = &a.augmented_out {
        let mut content = format!(
            "{{\"manifest\":{}}}\n",
            serde_json::to_string(&manifest).unwrap()
        );
        content.push_str(&corpus_to_jsonl(&s));
        content.push('\n');
        write_artifact(p, &content, &manifest, wall)?;
    }
    print!("{}", growth_table(&rows));
    Ok(EXIT_OK)
}

fn load_program_and_suite(
    program: &Path,
    tests: &Path,
    manifest: &mut RunManifest,
) -> Result<(SourceProgram, TestSuite), String> {
    let src_text = read(program)?;
    let suite_text = read(tests)?;
    manifest.input_bytes(program, src_text.as_bytes());
    manifest.input_bytes(tests, suite_text.as_bytes());
    let suite = TestSuite::from_json(&suite_text)
        .map_err(|e| format!("bad suite {}: {e}", tests.display()))?;
    Ok((SourceProgram::from_file_text(&src_text), suite))
}

fn cmd_fl(a: FlArgs) -> Result<i32, String> {
    let mut manifest = RunManifest::new("fl", 0);
    let (program, suite) = load_program_and_suite(&a.program, &a.tests, &mut manifest)?;
    if !check::check(&program).is_empty() {
        return Err("program does not compile; fault localization needs a runnable program".into());
    }
    let report = run_suite(&program, &suite, DEFAULT_STEP_BUDGET);
    if report.failing == 0 {
        println!("no failing tests; nothing to localize");
        return Ok(EXIT_NO_RESULT);
    }
    let executable = executable_lines(program.ast().unwrap());
    let ranked = rank(&report, &executable, a.top);
    if a.json {
        println!("{}", serde_json::to_string_pretty(&ranked).unwrap());
    } else {
        println!("rank  line  score");
        for l in &ranked {
            println!("{:<4}  {:<4}  {:.6}", l.rank, l.line, l.score);
        }
    }
    Ok(if ranked.is_empty() { EXIT_NO_RESULT } else { EXIT_OK })
}

/// Reads a model file, accepting either the wrapped artifact document or a
/// bare weight map.
pub fn load_model(text: &str) -> Result<GeneratorModel, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("bad model file: {e}"))?;
    let weights = v.get("weights").unwrap_or(&v);
    let map: BTreeMap<String, f64> = serde_json::from_value(weights.clone())
        .map_err(|e| format!("bad model weights: {e}"))?;
    Ok(GeneratorModel { weights: map })
}

fn cmd_repair(a: RepairArgs) -> Result<i32, String> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("repair", a.seed);
    manifest
        .flag("program", a.program.display())
        .flag("tests", a.tests.display())
        .flag("model", a.model.display())
        .flag("k", a.k)
        .flag("max-iter", a.max_iter)
        .flag("top", a.top)
        .flag("seed", a.seed)
        .flag("out", a.out.display())
        .flag(
            "stop-policy",
            match a.stop_policy {
                StopPolicyArg::CollectAll => "collect-all",
                StopPolicyArg::FirstPlausible => "first-plausible",
            },
        )
        .flag("prune-worsening", a.prune_worsening);
    let (program, suite) = load_program_and_suite(&a.program, &a.tests, &mut manifest)?;
    let model_text = read(&a.model)?;
    manifest.input_bytes(&a.model, model_text.as_bytes());
    let model = load_model(&model_text)?;
    let config = EngineConfig {
        k: a.k,
        max_iter: a.max_iter,
        top_n: a.top,
        step_budget: DEFAULT_STEP_BUDGET,
        seed: a.seed,
        stop_policy: match a.stop_policy {
            StopPolicyArg::CollectAll => StopPolicy::CollectAll,
            StopPolicyArg::FirstPlausible => StopPolicy::FirstPlausible,
        },
        prune_worsening: a.prune_worsening,
    };
    let trace = iter_repair(&program, &suite, &config, &model)?;

    let doc = serde_json::json!({ "manifest": manifest, "trace": trace });
    write_artifact(
        &a.out,
        &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
        &manifest,
        start.elapsed().as_millis() as u64,
    )?;
    println!(
        "explored {} states, {} plausible patch(es) -> {}",
        trace.states.len(),
        trace.plausible.len(),
        a.out.display()
    );
    for p in &trace.plausible {
        println!("  {}", p.path);
    }
    Ok(if trace.plausible.is_empty() { EXIT_NO_RESULT } else { EXIT_OK })
}

#[derive(Deserialize)]
struct TraceDoc {
    trace: RepairTrace,
}

fn cmd_report(a: ReportArgs) -> Result<i32, String> {
    let start = Instant::now();
    let mut manifest = RunManifest::new("report", 0);
    manifest.flag("traces", a.traces.display()).flag("json", a.json);
    let entries = std::fs::read_dir(&a.traces)
        .map_err(|e| format!("cannot read traces dir {}: {e}", a.traces.display()))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension().is_some_and(|x| x == "json")
                && !p.to_string_lossy().ends_with(".manifest.json")
        })
        .collect();
    paths.sort();
    let mut traces = Vec::new();
    let mut wall_total: u64 = 0;
    for p in &paths {
        let text = read(p)?;
        manifest.input_bytes(p, text.as_bytes());
        let doc: TraceDoc =
            serde_json::from_str(&text).map_err(|e| format!("bad trace {}: {e}", p.display()))?;
        traces.push(doc.trace);
        // per-run wall clock lives in the sidecar, if one was kept
        let mut sc = p.as_os_str().to_owned();
        sc.push(".manifest.json");
        if let Ok(side) = std::fs::read_to_string(Path::new(&sc)) {
            if let Ok(v) = serde_json::from_str::<serde_json::Value>(&side) {
                wall_total += v.get("wall_ms").and_then(|w| w.as_u64()).unwrap_or(0);
            }
        }
    }
    let summary = summarize(&traces);
    if a.json {
        let doc = serde_json::json!({ "manifest": manifest, "summary": summary });
        let rendered = format!("{}\n", serde_json::to_string_pretty(&doc).unwrap());
        match &a.out {
            Some(out) => {
                write_artifact(out, &rendered, &manifest, start.elapsed().as_millis() as u64)?
            }
            None => print!("{rendered}"),
        }
    } else {
        print!("{}", human_report(&summary));
        println!("repair wall-clock total: {wall_total} ms");
        if let Some(out) = &a.out {
            let doc = serde_json::json!({ "manifest": manifest, "summary": summary });
            write_artifact(
                out,
                &format!("{}\n", serde_json::to_string_pretty(&doc).unwrap()),
                &manifest,
                start.elapsed().as_millis() as u64,
            )?;
        }
    }
    Ok(EXIT_OK)
}

fn human_report(s: &ReportSummary) -> String {
    let mut t = String::new();
    t.push_str(&format!("traces: {}\n", s.traces));
    t.push_str(&format!("bugs repaired: {}\n", s.repaired));
    t.push_str(&format!("plausible patches: {}\n", s.plausible_total));
    t.push_str("per-iteration plausible counts:\n");
    for (d, n) in &s.per_depth {
        t.push_str(&format!("  iteration {d}: {n}\n"));
    }
    t.push_str("evolution paths:\n");
    for (p, n) in &s.paths {
        t.push_str(&format!("  {p}: {n}\n"));
    }
    t.push_str(&format!(
        "fault localization runs: {} (re-executions: {})\n",
        s.fl_runs, s.fl_reexecutions
    ));
    t
}
