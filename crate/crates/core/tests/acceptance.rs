//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use capless::checker::{sub_type, subcapture, type_synth, Binding, Rule, TypeContext};
use capless::evaluator::{run, step_once, Config, ReductionRule, StepOutcome, Store};
use capless::harness::{
    check_soundness, enumerate, gen_well_typed, oracle_subcapture, Item, SubtypeOracle,
};
use capless::surface::{parse_term, print_term};
use capless::syntax::{
    Answer, Bound, Capture, CaptureSet, Loc, ShapeType, Syntax, Term, Type, Value, Var,
};
use proptest::prelude::*;
use proptest::test_runner::{Config as RunnerConfig, TestError, TestRunner};
use rayon::prelude::*;

const SEED: u64 = 42;
const GENERATED: u64 = 1000;
const GEN_SIZE: usize = 14;
const FUEL: usize = 10_000;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn corpus() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "capless"))
        .collect();
    files.sort();
    files
}

fn load(p: &Path) -> Term {
    let src = std::fs::read_to_string(p).unwrap();
    parse_term(&src)
        .unwrap_or_else(|d| panic!("{}: {d:?}", p.display()))
        .1
}

fn generated() -> Vec<Term> {
    (0..GENERATED)
        .into_par_iter()
        .map(|i| gen_well_typed(SEED + i, GEN_SIZE))
        .collect()
}

// 1 -------------------------------------------------------------------------

/// Every context of at most `n` bindings `x: Top^C` or `c <: B`, where `C`
/// and `B` range over the atoms bound earlier.
fn small_contexts(n: usize) -> Vec<TypeContext> {
    let mut out = vec![TypeContext::empty()];
    let mut frontier = vec![TypeContext::empty()];
    for _ in 0..n {
        let mut next = Vec::new();
        for ctx in &frontier {
            let atoms = atoms_of(ctx);
            for set in subsets(&atoms) {
                next.push(ctx.push(Binding::Term(Type::new(ShapeType::Top, set.clone()))));
                next.push(ctx.push(Binding::Capt(Bound::Set(set))));
            }
            next.push(ctx.push(Binding::Capt(Bound::Star)));
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

fn atoms_of(ctx: &TypeContext) -> Vec<Capture> {
    let d = ctx.depth();
    (0..d.term)
        .map(Capture::TermVar)
        .chain((0..d.capt).map(Capture::CaptVar))
        .collect()
}

fn subsets(atoms: &[Capture]) -> Vec<CaptureSet> {
    (0..1u32 << atoms.len())
        .map(|m| {
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, a)| *a)
                .collect()
        })
        .collect()
}

fn subcapture_oracle() -> Outcome {
    let mut checked = 0usize;
    let mut disagreements = Vec::new();
    let contexts = small_contexts(3);
    let results: Vec<(usize, Vec<String>)> = contexts
        .par_iter()
        .map(|ctx| {
            let sets = subsets(&atoms_of(ctx));
            let mut bad = Vec::new();
            for c1 in &sets {
                for c2 in &sets {
                    let alg = subcapture(ctx, c1, c2).unwrap();
                    let oracle = oracle_subcapture(ctx, c1, c2, 8).unwrap();
                    if alg != oracle {
                        bad.push(format!(
                            "{:?} ⊢ {c1:?} <: {c2:?}: checker {alg}, oracle {oracle}",
                            ctx.bindings()
                        ));
                    }
                }
            }
            (sets.len() * sets.len(), bad)
        })
        .collect();
    for (n, bad) in results {
        checked += n;
        disagreements.extend(bad);
    }
    if disagreements.is_empty() {
        pass(format!(
            "{checked} instances over {} contexts of up to 3 bindings, 0 disagreements",
            contexts.len()
        ))
    } else {
        fail(format!(
            "{} disagreements, first: {}",
            disagreements.len(),
            disagreements[0]
        ))
    }
}

// 2 -------------------------------------------------------------------------

fn subtype_contexts() -> Vec<TypeContext> {
    let fun = ShapeType::Fun(Box::new(Type::top()), Box::new(Type::top().into()));
    let singles = [
        Binding::Type(ShapeType::Top),
        Binding::Type(fun),
        Binding::Capt(Bound::Star),
        Binding::Capt(Bound::Set(CaptureSet::empty())),
        Binding::Term(Type::top()),
    ];
    let mut out = vec![TypeContext::empty()];
    for a in &singles {
        out.push(TypeContext::from_bindings([a.clone()]));
        for b in &singles {
            out.push(TypeContext::from_bindings([a.clone(), b.clone()]));
        }
    }
    // bounds that refer to the previous binding
    out.push(TypeContext::from_bindings([
        Binding::Type(ShapeType::Top),
        Binding::Type(ShapeType::TVar(0)),
    ]));
    out.push(TypeContext::from_bindings([
        Binding::Capt(Bound::Star),
        Binding::Capt(Bound::Set(CaptureSet::singleton(Capture::CaptVar(0)))),
    ]));
    out.push(TypeContext::from_bindings([
        Binding::Capt(Bound::Star),
        Binding::Term(Type::new(
            ShapeType::Top,
            CaptureSet::singleton(Capture::CaptVar(0)),
        )),
    ]));
    out
}

/// Depth of the exhaustive enumeration. Contexts binding both a type and a
/// capture variable multiply every shape by every capture set, so they are
/// covered at depth 1 exhaustively and by the depth-2 shape pairs of one
/// representative context.
fn envelope_depth(ctx: &TypeContext) -> usize {
    let d = ctx.depth();
    if d.ty > 0 && d.capt > 0 {
        1
    } else {
        2
    }
}

/// Compares checker and oracle on every same-kind pair of `items`.
fn agreement(ctx: &TypeContext, items: &[Item]) -> Result<(usize, Vec<String>), String> {
    let oracle = SubtypeOracle::build(ctx, items.to_vec()).map_err(|e| e.to_string())?;
    let members = items
        .iter()
        .map(|it| {
            oracle
                .member(it)
                .ok_or_else(|| format!("{it:?} outside the universe"))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut checked = 0;
    let mut bad = Vec::new();
    for (a, ma) in items.iter().zip(&members) {
        for (b, mb) in items.iter().zip(&members) {
            let alg = match (a, b) {
                (Item::Shape(x), Item::Shape(y)) => sub_type(ctx, x, y).unwrap(),
                (Item::Exist(x), Item::Exist(y)) => sub_type(ctx, x, y).unwrap(),
                _ => continue,
            };
            checked += 1;
            if oracle.relates(*ma, *mb) != alg {
                bad.push(format!(
                    "{:?} ⊢ {a:?} <: {b:?}: checker {alg}",
                    ctx.bindings()
                ));
            }
        }
    }
    Ok((checked, bad))
}

fn subtype_oracle() -> Outcome {
    let contexts = subtype_contexts();
    let representative =
        TypeContext::from_bindings([Binding::Type(ShapeType::Top), Binding::Capt(Bound::Star)]);
    let mut jobs: Vec<(TypeContext, Vec<Item>)> = contexts
        .iter()
        .map(|ctx| (ctx.clone(), enumerate(ctx, envelope_depth(ctx))))
        .collect();
    let shapes: Vec<Item> = enumerate(&representative, 2)
        .into_iter()
        .filter(|it| matches!(it, Item::Shape(_)))
        .collect();
    jobs.push((representative, shapes));
    let results: Vec<Result<(usize, Vec<String>), String>> = jobs
        .par_iter()
        .map(|(ctx, items)| agreement(ctx, items))
        .collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    for r in results {
        match r {
            Ok((n, b)) => {
                checked += n;
                bad.extend(b);
            }
            Err(e) => return fail(e),
        }
    }
    if bad.is_empty() {
        pass(format!(
            "{checked} pairs over {} contexts, 0 disagreements",
            contexts.len()
        ))
    } else {
        fail(format!("{} disagreements, first: {}", bad.len(), bad[0]))
    }
}

// 3 -------------------------------------------------------------------------

fn golden_matches(file: &Path, args: &[&str], golden: &str) -> Result<(), String> {
    let manifest = Path::new(env!("CARGO_MANIFEST_DIR"));
    let rel = file.strip_prefix(manifest).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_capless"))
        .args(args)
        .arg(rel)
        .env("CAPLESS_COLOR", "never")
        .current_dir(manifest)
        .output()
        .map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!(
            "{} {}: exit {:?}",
            args[0],
            rel.display(),
            o.status.code()
        ));
    }
    let expected = std::fs::read_to_string(manifest.join("tests/golden").join(golden))
        .map_err(|_| format!("missing golden {golden}"))?;
    if expected != String::from_utf8_lossy(&o.stdout) {
        return Err(format!("{golden} differs"));
    }
    Ok(())
}

fn rule_coverage() -> Outcome {
    let files = corpus();
    let mut typing = BTreeSet::new();
    let mut reduction = BTreeSet::new();
    for f in &files {
        let t = load(f);
        let r = match type_synth(&TypeContext::empty(), &t) {
            Ok(r) => r,
            Err(e) => return fail(format!("{}: {e}", f.display())),
        };
        typing.extend(r.derivation.rules());
        let done = match run(Config::new(t), FUEL) {
            Ok(done) => done,
            Err(e) => return fail(format!("{}: {e:?}", f.display())),
        };
        reduction.extend(done.steps.iter().map(|s| s.rule));
        let stem = f.file_stem().unwrap().to_string_lossy();
        if let Err(e) = golden_matches(f, &["check", "--trace"], &format!("{stem}.check")) {
            return fail(e);
        }
        if let Err(e) = golden_matches(f, &["trace"], &format!("{stem}.trace")) {
            return fail(e);
        }
    }
    let missing: Vec<&str> = Rule::TYPING
        .iter()
        .chain(Rule::SUBCAPTURING.iter())
        .chain(Rule::SUBTYPING.iter())
        .filter(|r| !typing.contains(*r))
        .map(|r| r.name())
        .chain(
            ReductionRule::ALL
                .iter()
                .filter(|r| !reduction.contains(*r))
                .map(|r| r.name()),
        )
        .collect();
    if files.len() < 30 {
        return fail(format!("only {} corpus programs", files.len()));
    }
    if !missing.is_empty() {
        return fail(format!("rules never exercised: {}", missing.join(", ")));
    }
    pass(format!(
        "{} programs cover {}+{}+{} static and {} reduction rules; goldens match",
        files.len(),
        Rule::TYPING.len(),
        Rule::SUBCAPTURING.len(),
        Rule::SUBTYPING.len(),
        ReductionRule::ALL.len()
    ))
}

// 4 -------------------------------------------------------------------------

fn soundness() -> Outcome {
    let mut subjects: Vec<(String, Term)> = corpus()
        .iter()
        .map(|f| {
            (
                f.file_name().unwrap().to_string_lossy().into_owned(),
                load(f),
            )
        })
        .collect();
    subjects.extend(
        generated()
            .into_iter()
            .enumerate()
            .map(|(i, t)| (format!("gen-{}", SEED + i as u64), t)),
    );
    let reports: Vec<Result<_, String>> = subjects
        .par_iter()
        .map(|(id, t)| check_soundness(id, t, FUEL).map_err(|e| format!("{id}: {e}")))
        .collect();
    let mut steps = 0;
    for r in &reports {
        match r {
            Err(e) => return fail(e.clone()),
            Ok(rep) if !rep.all_ok() => {
                return fail(format!("{}: {:?}", rep.program, rep.counterexample));
            }
            Ok(rep) => steps += rep.steps.len(),
        }
    }
    pass(format!(
        "{} programs ({} generated, seed {SEED}), {steps} steps; progress, preservation, termination, monitor and store monotonicity hold",
        reports.len(),
        GENERATED
    ))
}

// 5 -------------------------------------------------------------------------

fn answer() -> BoxedStrategy<Term> {
    prop_oneof![
        common::var().prop_map(|v| Term::Ans(Answer::Var(v))),
        (common::ty(), common::term()).prop_map(|(t, b)| Term::lam(t, b)),
        (common::shape(), common::term()).prop_map(|(s, b)| Term::tlam(s, b)),
        (common::bound(), common::term()).prop_map(|(c, b)| Term::clam(c, b)),
        (common::captures(), common::var()).prop_map(|(c, v)| Term::pack(c, v)),
    ]
    .boxed()
}

fn answers_are_inert() -> Outcome {
    let mut runner = TestRunner::new(RunnerConfig {
        cases: 10_000,
        failure_persistence: None,
        ..RunnerConfig::default()
    });
    let store = {
        let mut s = Store::new();
        for _ in 0..3 {
            s.alloc(Value::Lam(Type::top(), Box::new(Term::var(0))));
        }
        s
    };
    let result = runner.run(&answer(), |t| {
        prop_assert!(t.is_answer());
        let c = Config {
            store: store.clone(),
            term: t,
        };
        prop_assert!(matches!(step_once(&c), StepOutcome::AnswerReached(_)));
        Ok(())
    });
    match result {
        Ok(()) => pass("10000 random answers (with store locations) never step"),
        Err(e) => fail(e.to_string()),
    }
}

// 6 -------------------------------------------------------------------------

fn round_trip() -> Outcome {
    let mut programs: Vec<Term> = corpus().iter().map(|f| load(f)).collect();
    let corpus_count = programs.len();
    programs.extend(generated());
    for t in &programs {
        let text = print_term(t);
        let back = match parse_term(&text) {
            Ok((_, back)) => back,
            Err(d) => return fail(format!("{text}: {d:?}")),
        };
        if back != *t {
            return fail(format!("round trip changed {text}"));
        }
        if print_term(&back) != text {
            return fail(format!("fmt is not idempotent on {text}"));
        }
    }
    pass(format!(
        "{} programs ({corpus_count} corpus, {GENERATED} generated) reprint to themselves",
        programs.len()
    ))
}

// 7 -------------------------------------------------------------------------

fn substitution_laws() -> Outcome {
    use common::*;
    let config = RunnerConfig {
        cases: 10_000,
        failure_persistence: None,
        ..RunnerConfig::default()
    };
    let mut failures = Vec::new();
    fn record<T: std::fmt::Debug>(
        failures: &mut Vec<String>,
        name: &str,
        r: Result<(), TestError<T>>,
    ) {
        if let Err(e) = r {
            failures.push(format!("{name}: {e}"));
        }
    }
    let ns = || {
        (0..3usize).prop_map(|i| {
            [
                capless::syntax::Namespace::Term,
                capless::syntax::Namespace::Type,
                capless::syntax::Namespace::Capt,
            ][i]
        })
    };

    record(
        &mut failures,
        "shift round trip",
        TestRunner::new(config.clone()).run(&(term(), ns(), 0..3usize), |(t, ns, c)| {
            prop_assert_eq!(t.shifted(ns, 1, c).unwrap().shifted(ns, -1, c).unwrap(), t);
            Ok(())
        }),
    );
    record(
        &mut failures,
        "self substitution",
        TestRunner::new(config.clone()).run(&(term(), 0..FREE), |(t, i)| {
            prop_assert_eq!(t.subst_term(i, Var::Bound(i)), t.clone());
            prop_assert_eq!(t.subst_type(i, &ShapeType::TVar(i)), t.clone());
            prop_assert_eq!(
                t.subst_capt(i, &CaptureSet::singleton(Capture::CaptVar(i))),
                t
            );
            Ok(())
        }),
    );
    record(
        &mut failures,
        "term substitution vs named",
        TestRunner::new(config.clone()).run(&(term(), 0..FREE, 0..FREE), |(t, k, j)| {
            prop_assert_eq!(
                t.subst_term(k, Var::Bound(j)),
                named_subst(&t, |_| Replace::Term(k, NVar::X(j)))
            );
            Ok(())
        }),
    );
    record(
        &mut failures,
        "type substitution vs named",
        TestRunner::new(config.clone()).run(&(term(), 0..FREE, shape()), |(t, k, s)| {
            let expected = named_subst(&t, |sc| Replace::Type(k, name_shape(sc, &s)));
            prop_assert_eq!(t.subst_type(k, &s), expected);
            Ok(())
        }),
    );
    record(
        &mut failures,
        "capture substitution vs named",
        TestRunner::new(config.clone()).run(&(term(), 0..FREE, captures()), |(t, k, c)| {
            let expected = named_subst(&t, |sc| Replace::Capt(k, name_set(sc, &c)));
            prop_assert_eq!(t.subst_capt(k, &c), expected);
            Ok(())
        }),
    );
    record(
        &mut failures,
        "location substitution vs named",
        TestRunner::new(config).run(&(term(), 0..FREE, 0..3usize), |(t, k, l)| {
            let expected = named_subst(&t, |_| Replace::Term(k, NVar::L(Loc(l))));
            prop_assert_eq!(t.subst_term(k, Var::Loc(Loc(l))), expected);
            Ok(())
        }),
    );
    if failures.is_empty() {
        pass("6 laws × 10000 cases (shift round trip, self substitution, named agreement in all namespaces)")
    } else {
        fail(failures.join("; "))
    }
}

fn timed(limit: Option<Duration>, f: fn() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let mut o = f();
    let took = start.elapsed();
    if let Some(limit) = limit {
        if took > limit {
            o = fail(format!(
                "{} (took {:.1?}, limit {:.0?})",
                o.detail, took, limit
            ));
        }
    }
    (o, took)
}

fn main() {
    let criteria: [(&str, Option<Duration>, fn() -> Outcome); 7] = [
        (
            "subcapture oracle agreement",
            Some(Duration::from_secs(60)),
            subcapture_oracle,
        ),
        (
            "subtype oracle agreement",
            Some(Duration::from_secs(300)),
            subtype_oracle,
        ),
        ("rule coverage corpus", None, rule_coverage),
        ("empirical soundness", None, soundness),
        ("answer inertness", None, answers_are_inert),
        ("round trip and fmt idempotence", None, round_trip),
        ("substitution laws", None, substitution_laws),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let (o, took) = timed(limit, f);
        if !o.ok {
            failed += 1;
        }
        println!(
            "{} {}. {name}: {} [{:.1?}]",
            if o.ok { "PASS" } else { "FAIL" },
            i + 1,
            o.detail,
            took
        );
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
