//! The `capless` command line: check, eval, trace, soundness and fmt.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{json, Value as Json};

use crate::checker::{type_synth, TypeContext, TypeError};
use crate::evaluator::{run, Config, RunError, Step, Store, DEFAULT_FUEL};
use crate::harness::{check_config, gen_well_typed, SoundnessReport};
use crate::surface::{
    parse_term, print_captures_in, print_exist_type, print_term, Diagnostic, PrintScope,
    SurfaceProgram,
};
use crate::syntax::{Answer, Term};

pub const EXIT_OK: i32 = 0;
pub const EXIT_TYPE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_STUCK: i32 = 4;
pub const EXIT_FUEL: i32 = 5;

const DEFAULT_GEN_SIZE: usize = 14;

#[derive(Parser, Debug)]
#[command(
    name = "capless",
    version,
    about = "Type checker and evaluator for the Capless calculus"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Emit one JSON record per input instead of text.
    #[arg(long)]
    json: bool,
    /// Maximum number of reduction steps.
    #[arg(long, default_value_t = DEFAULT_FUEL as u64, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Type-check programs and print their use-set and type.
    Check {
        #[command(flatten)]
        common: Common,
        /// Also print the typing derivation.
        #[arg(long)]
        trace: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Type-check, then evaluate programs to an answer.
    Eval {
        #[command(flatten)]
        common: Common,
        /// Print one line per reduction step.
        #[arg(long)]
        trace: bool,
        /// Skip type checking.
        #[arg(long)]
        unchecked: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Evaluate with a step-by-step trace (same as `eval --trace`).
    Trace {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        unchecked: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Check progress, preservation, termination and the capture monitor
    /// on every step of evaluation.
    Soundness {
        #[command(flatten)]
        common: Common,
        /// Also check COUNT generated programs starting at SEED.
        #[arg(long = "gen", num_args = 2, value_names = ["SEED", "COUNT"])]
        generate: Option<Vec<u64>>,
        /// Size budget of generated programs.
        #[arg(long, default_value_t = DEFAULT_GEN_SIZE)]
        size: usize,
        files: Vec<PathBuf>,
    },
    /// Print programs in canonical form.
    Fmt {
        /// Rewrite the files in place instead of printing them.
        #[arg(long)]
        write: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

/// What one input contributes: text for each stream and an exit code.
#[derive(Default)]
struct Output {
    out: String,
    err: String,
    code: i32,
}

impl Output {
    fn fail(mut self, code: i32) -> Self {
        self.code = self.code.max(code);
        self
    }
}

fn color_enabled() -> bool {
    match std::env::var("CAPLESS_COLOR").as_deref() {
        Ok("never") => false,
        Ok("always") => true,
        _ => std::io::stderr().is_terminal(),
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_cli(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_cli(
    args: impl IntoIterator<Item = OsString>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    let color = color_enabled();
    let outputs: Vec<Output> = match cli.command {
        Command::Check {
            common,
            trace,
            files,
        } => files
            .par_iter()
            .map(|f| check_file(f, &common, trace, color))
            .collect(),
        Command::Eval {
            common,
            trace,
            unchecked,
            files,
        } => files
            .par_iter()
            .map(|f| eval_file(f, &common, trace, unchecked, color))
            .collect(),
        Command::Trace {
            common,
            unchecked,
            files,
        } => files
            .par_iter()
            .map(|f| eval_file(f, &common, true, unchecked, color))
            .collect(),
        Command::Soundness {
            common,
            generate,
            size,
            files,
        } => soundness(&files, generate, size, &common, color),
        Command::Fmt { write, files } => files
            .par_iter()
            .map(|f| fmt_file(f, write, color))
            .collect(),
    };
    let mut code = EXIT_OK;
    for o in outputs {
        let _ = out.write_all(o.out.as_bytes());
        let _ = err.write_all(o.err.as_bytes());
        code = code.max(o.code);
    }
    code
}

struct Loaded {
    name: String,
    source: String,
    program: SurfaceProgram,
    term: Term,
}

/// Reads and parses a file, or produces the output reporting why not.
fn load(path: &Path, json: bool, color: bool) -> Result<Loaded, Output> {
    let name = path.display().to_string();
    let source = match std::fs::read_to_string(path) {
        Ok(s) => s,
        Err(e) => {
            let mut o = Output::default();
            if json {
                o.out = line(json!({"file": name, "status": "io-error", "message": e.to_string()}));
            } else {
                o.err = format!("error: cannot read {name}: {e}\n");
            }
            return Err(o.fail(EXIT_IO));
        }
    };
    match parse_term(&source) {
        Ok((program, term)) => Ok(Loaded {
            name,
            source,
            program,
            term,
        }),
        Err(diags) => {
            Err(diagnostics(&name, &source, &diags, "parse-error", json, color).fail(EXIT_PARSE))
        }
    }
}

fn diagnostics(
    name: &str,
    source: &str,
    diags: &[Diagnostic],
    status: &str,
    json: bool,
    color: bool,
) -> Output {
    let mut o = Output::default();
    if json {
        let records: Vec<_> = diags.iter().map(|d| d.record(source)).collect();
        o.out = line(json!({"file": name, "status": status, "diagnostics": records}));
    } else {
        for d in diags {
            o.err.push_str(&d.render(source, name, color));
        }
    }
    o
}

pub fn type_error_diagnostic(program: &SurfaceProgram, e: &TypeError) -> Diagnostic {
    Diagnostic::error(e.kind.code(), e.kind.to_string(), program.span_at(&e.path))
}

fn line(v: Json) -> String {
    let mut s = v.to_string();
    s.push('\n');
    s
}

fn check_file(path: &Path, common: &Common, trace: bool, color: bool) -> Output {
    let l = match load(path, common.json, color) {
        Ok(l) => l,
        Err(o) => return o,
    };
    match type_synth(&TypeContext::empty(), &l.term) {
        Ok(r) => {
            let use_set = print_captures_in(&PrintScope::new(), &r.use_set);
            let ty = print_exist_type(&r.ty);
            let mut o = Output::default();
            if common.json {
                let mut rec =
                    json!({"file": l.name, "status": "ok", "useSet": use_set, "type": ty});
                if trace {
                    rec["derivation"] = r.derivation.to_json();
                }
                o.out = line(rec);
            } else {
                o.out = format!("{}: OK  use-set={use_set}  type={ty}\n", l.name);
                if trace {
                    o.out.push_str(&r.derivation.render());
                }
            }
            o
        }
        Err(e) => {
            let d = type_error_diagnostic(&l.program, &e);
            diagnostics(&l.name, &l.source, &[d], "type-error", common.json, color).fail(EXIT_TYPE)
        }
    }
}

fn step_line(k: usize, s: &Step) -> String {
    let lookups: Vec<String> = s.lookups.iter().map(|l| l.to_string()).collect();
    format!(
        "#{k}  rule={}  lookups=[{}]  term={}\n",
        s.rule,
        lookups.join(", "),
        print_term(&s.focus)
    )
}

fn step_json(k: usize, s: &Step) -> Json {
    json!({
        "step": k,
        "rule": s.rule.name(),
        "lookups": s.lookups.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
        "focus": print_term(&s.focus),
    })
}

fn store_json(store: &Store) -> Json {
    store
        .iter()
        .map(|(l, v)| json!({"loc": l.to_string(), "value": print_term(&Term::val(v.clone()))}))
        .collect()
}

fn plural(n: usize) -> &'static str {
    if n == 1 {
        "binding"
    } else {
        "bindings"
    }
}

fn eval_file(path: &Path, common: &Common, trace: bool, unchecked: bool, color: bool) -> Output {
    let l = match load(path, common.json, color) {
        Ok(l) => l,
        Err(o) => return o,
    };
    if !unchecked {
        if let Err(e) = type_synth(&TypeContext::empty(), &l.term) {
            let d = type_error_diagnostic(&l.program, &e);
            return diagnostics(&l.name, &l.source, &[d], "type-error", common.json, color)
                .fail(EXIT_TYPE);
        }
    }
    let result = run(Config::new(l.term.clone()), common.fuel as usize);
    let steps = match &result {
        Ok(r) => &r.steps,
        Err(e) => e.steps(),
    };
    let mut o = Output::default();
    if common.json {
        let mut rec = json!({"file": l.name, "steps": steps.len()});
        match &result {
            Ok(r) => {
                rec["status"] = json!("answer");
                rec["answer"] = json!(print_term(&Term::Ans(r.answer.clone())));
                rec["store"] = store_json(&r.store);
            }
            Err(RunError::Stuck { reason, config, .. }) => {
                rec["status"] = json!("stuck");
                rec["reason"] = json!(reason.name());
                rec["message"] = json!(reason.to_string());
                rec["term"] = json!(print_term(&config.term));
                rec["store"] = store_json(&config.store);
            }
            Err(RunError::FuelExhausted { config, .. }) => {
                rec["status"] = json!("fuel-exhausted");
                rec["term"] = json!(print_term(&config.term));
                rec["store"] = store_json(&config.store);
            }
        }
        if trace {
            rec["trace"] = steps
                .iter()
                .enumerate()
                .map(|(k, s)| step_json(k, s))
                .collect();
        }
        o.out = line(rec);
    } else {
        let _ = writeln!(o.out, "== {}", l.name);
        if trace {
            for (k, s) in steps.iter().enumerate() {
                o.out.push_str(&step_line(k, s));
            }
        }
        match &result {
            Ok(r) => {
                let _ = writeln!(o.out, "answer={}", print_answer(&r.answer));
                let _ = writeln!(o.out, "steps: {}", steps.len());
                let _ = writeln!(o.out, "store: {} {}", r.store.len(), plural(r.store.len()));
            }
            Err(RunError::Stuck { reason, config, .. }) => {
                let _ = writeln!(o.out, "stuck after {} steps: {reason}", steps.len());
                let _ = writeln!(o.out, "term={}", print_term(&config.term));
            }
            Err(RunError::FuelExhausted { .. }) => {
                let _ = writeln!(o.out, "fuel exhausted after {} steps", steps.len());
            }
        }
    }
    match result {
        Ok(_) => o,
        Err(RunError::Stuck { .. }) => o.fail(EXIT_STUCK),
        Err(RunError::FuelExhausted { .. }) => o.fail(EXIT_FUEL),
    }
}

fn print_answer(a: &Answer) -> String {
    print_term(&Term::Ans(a.clone()))
}

enum Subject {
    File(PathBuf),
    Generated(u64),
}

fn soundness(
    files: &[PathBuf],
    generate: Option<Vec<u64>>,
    size: usize,
    common: &Common,
    color: bool,
) -> Vec<Output> {
    let mut subjects: Vec<Subject> = files.iter().cloned().map(Subject::File).collect();
    if let Some(g) = generate {
        let (seed, count) = (g[0], g[1]);
        subjects.extend((0..count).map(|i| Subject::Generated(seed.wrapping_add(i))));
    }
    let results: Vec<Result<SoundnessReport, Output>> = subjects
        .par_iter()
        .map(|s| match s {
            Subject::File(path) => {
                let l = load(path, common.json, color)?;
                let report = check_config(&l.name, Config::new(l.term), common.fuel as usize);
                if !report.all_ok() {
                    let target = counterexample_path(path);
                    if let Err(e) = write_counterexample(&target, &report) {
                        let mut o = Output::default();
                        o.err = format!("error: cannot write {}: {e}\n", target.display());
                        return Err(o.fail(EXIT_IO));
                    }
                }
                Ok(report)
            }
            Subject::Generated(seed) => {
                let t = gen_well_typed(*seed, size);
                let id = format!("gen-{seed}");
                let report = check_config(&id, Config::new(t), common.fuel as usize);
                if !report.all_ok() {
                    let target = PathBuf::from(format!("{id}.counterexample.json"));
                    let _ = write_counterexample(&target, &report);
                }
                Ok(report)
            }
        })
        .collect();
    let mut outputs = Vec::new();
    let mut table = String::new();
    let (mut total, mut failed, mut max_steps) = (0usize, 0usize, 0usize);
    let width = results
        .iter()
        .filter_map(|r| r.as_ref().ok())
        .map(|r| r.program.len())
        .max()
        .unwrap_or(0)
        .max(7);
    if !common.json {
        let _ = writeln!(
            table,
            "{:<width$} {:<6} {:<9} {:<13} {:<12} {:<8} {:>6}",
            "program", "typed", "progress", "preservation", "termination", "monitor", "steps"
        );
    }
    for r in results {
        match r {
            Err(o) => outputs.push(o),
            Ok(report) => {
                total += 1;
                max_steps = max_steps.max(report.steps.len());
                let ok = report.all_ok();
                if !ok {
                    failed += 1;
                }
                if common.json {
                    let mut o = Output::default();
                    o.out = line(serde_json::to_value(&report).expect("reports serialize"));
                    outputs.push(if ok { o } else { o.fail(EXIT_TYPE) });
                } else {
                    let flag = |b: bool| if b { "ok" } else { "FAIL" };
                    let _ = writeln!(
                        table,
                        "{:<width$} {:<6} {:<9} {:<13} {:<12} {:<8} {:>6}",
                        report.program,
                        flag(report.initial_typed),
                        flag(report.progress_ok),
                        flag(report.preservation_ok && report.store_monotonic),
                        flag(report.termination_ok),
                        flag(report.monitor_ok),
                        report.steps.len()
                    );
                    if !ok {
                        outputs.push(Output::default().fail(EXIT_TYPE));
                    }
                }
            }
        }
    }
    if !common.json {
        let _ = writeln!(
            table,
            "{total} programs, {failed} failed, max steps {max_steps}"
        );
        outputs.insert(
            0,
            Output {
                out: table,
                ..Output::default()
            },
        );
    }
    outputs
}

fn counterexample_path(input: &Path) -> PathBuf {
    let mut name = input
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".counterexample.json");
    input.with_file_name(name)
}

fn write_counterexample(target: &Path, report: &SoundnessReport) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(report).expect("reports serialize");
    std::fs::write(target, text + "\n")
}

fn fmt_file(path: &Path, write: bool, color: bool) -> Output {
    let l = match load(path, false, color) {
        Ok(l) => l,
        Err(o) => return o,
    };
    let mut printed = print_term(&l.term);
    printed.push('\n');
    let mut o = Output::default();
    if write {
        if printed != l.source {
            if let Err(e) = std::fs::write(path, &printed) {
                o.err = format!("error: cannot write {}: {e}\n", l.name);
                return o.fail(EXIT_IO);
            }
        }
    } else {
        o.out = printed;
    }
    o
}
