//! Command-line front end. Machine-readable results go to stdout (optionally
//! as one JSON document with `--format json`), diagnostics to stderr.
//!
//! Exit codes: 0 success or YES or nonempty, 1 NO or infeasible or empty,
//! 2 usage or data error, 3 resource guard, 4 internal invariant.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ccsp::cardinality::CardinalityVector;
use ccsp::classifier::{classify, SearchLimits, Verdict};
use ccsp::error::Error;
use ccsp::instance::Instance;
use ccsp::language::ConstraintLanguage;
use ccsp::oracle;
use ccsp::reductions::{self, BipartiteGraph, BisCase, ReductionOutput};
use ccsp::relation::Relation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(
    name = "ccsp",
    about = "Decide, count and enumerate CSPs with global cardinality constraints",
    version
)]
struct Cli {
    /// Output format for results on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Worker threads for the consistency closure (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a language file; prints the verdict and, when tractable, the
    /// majority and minority operation tables.
    Classify { language: PathBuf },
    /// Decide the instance file's cardinality line: YES or NO.
    Solve {
        instance: PathBuf,
        /// Fall back to exhaustive search when the language is hard.
        #[arg(long)]
        force_oracle: bool,
    },
    /// Exact solution count for the cardinality line, or every nonzero
    /// (vector, count) pair with --all.
    Count {
        instance: PathBuf,
        #[arg(long)]
        all: bool,
        /// Fall back to exhaustive search when the language is hard.
        #[arg(long)]
        force_oracle: bool,
    },
    /// Every feasible cardinality vector, one per line, sorted.
    Enumerate { instance: PathBuf },
    /// Brute-force ground truth; works for any language.
    Oracle {
        instance: PathBuf,
        #[arg(long)]
        all: bool,
        /// Cap on the assignment space.
        #[arg(long, default_value_t = 10_000_000)]
        cap: usize,
    },
    /// Emit a seeded language/instance pair as <prefix>.cl and <prefix>.ci.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        domain_size: usize,
        #[arg(long, default_value_t = 5)]
        vars: usize,
        #[arg(long, default_value_t = 4)]
        constraints: usize,
        #[arg(long, default_value_t = 3)]
        max_arity: usize,
        /// Close the relations under random conservative operations so the
        /// language classifies tractable.
        #[arg(long)]
        tractable: bool,
        /// Output path prefix.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Apply a hardness transformer; writes <prefix>.cl, <prefix>.ci and a
    /// <prefix>.map.txt sidecar describing the cardinality correspondence.
    Reduce {
        #[command(subcommand)]
        kind: ReduceKind,
    },
    /// Run the acceptance suite and print one line per criterion.
    Selftest,
}

#[derive(Subcommand)]
enum ReduceKind {
    /// Lift an instance over a restricted language to its parent language.
    Restriction {
        instance: PathBuf,
        parent_language: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Split constraints on a conjunction-defined relation into conjuncts.
    PpAnd {
        instance: PathBuf,
        defined: String,
        conjunct1: String,
        conjunct2: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Eliminate an existentially defined relation via variable blocks.
    PpExists {
        instance: PathBuf,
        defined: String,
        wider: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Eliminate pinned-constant constraints through the block gadget.
    Constants {
        instance: PathBuf,
        target_language: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode a bipartite independent-set question over a witness relation.
    Bis {
        graph: PathBuf,
        k1: usize,
        k2: usize,
        language: PathBuf,
        relation: String,
        #[arg(value_parser = parse_case)]
        case: BisCase,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Compose a crossing pair of equivalence relations into a relation that
    /// is not a thick mapping.
    Crossing {
        language: PathBuf,
        alpha: String,
        beta: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn parse_case(s: &str) -> Result<BisCase, String> {
    match s {
        "1" => Ok(BisCase::Case1),
        "3a" => Ok(BisCase::Case3a),
        "3b" => Ok(BisCase::Case3b),
        other => Err(format!("unknown case {other:?}; expected 1, 3a or 3b")),
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Argument(_) | Error::Parse { .. } | Error::Io(_) => 2,
        Error::Resource(_) => 3,
        Error::Invariant(_) => 4,
    }
}

fn require_cardinality(instance: &Instance) -> Result<&CardinalityVector, Error> {
    instance.cardinality().ok_or_else(|| {
        Error::arg("the instance file has no cardinality line; add one or use --all")
    })
}

/// Ensures the language is tractable before running the polynomial pipeline,
/// pointing hard inputs at the oracle.
fn guard_tractable(instance: &Instance, force_oracle: bool) -> Result<bool, Error> {
    match classify(instance.language(), SearchLimits::default()).verdict {
        Verdict::Tractable => Ok(false),
        Verdict::Hard if force_oracle => Ok(true),
        Verdict::Hard => Err(Error::arg(
            "the language is hard; rerun with --force-oracle or use the oracle subcommand",
        )),
        Verdict::Inconclusive => Err(Error::resource(
            "classification inconclusive within the node limit",
        )),
    }
}

fn emit(format: Format, text: String, value: serde_json::Value) {
    match format {
        Format::Text => {
            if !text.is_empty() {
                println!("{text}");
            }
        }
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("valid json")),
    }
}

fn op_json(op: &ccsp::classifier::TernaryOperation) -> serde_json::Value {
    json!({ "domain_size": op.domain_size(), "table": op.table() })
}

fn run_classify(path: &Path, format: Format) -> Result<u8, Error> {
    let lang = ConstraintLanguage::load(path)?;
    let result = classify(&lang, SearchLimits::default());
    match result.verdict {
        Verdict::Tractable => {
            let m = result.majority.expect("tractable verdict carries operations");
            let h = result.minority.expect("tractable verdict carries operations");
            let text = format!(
                "TRACTABLE\n{}{}",
                m.to_text("majority", lang.domain()),
                h.to_text("minority", lang.domain())
            );
            emit(
                format,
                text.trim_end().to_string(),
                json!({
                    "command": "classify",
                    "verdict": "TRACTABLE",
                    "majority": op_json(&m),
                    "minority": op_json(&h),
                }),
            );
            Ok(0)
        }
        Verdict::Hard => {
            emit(
                format,
                "HARD".to_string(),
                json!({
                    "command": "classify",
                    "verdict": "HARD",
                    "reason": result.hard_reason,
                }),
            );
            Ok(0)
        }
        Verdict::Inconclusive => {
            emit(
                format,
                "INCONCLUSIVE".to_string(),
                json!({
                    "command": "classify",
                    "verdict": "INCONCLUSIVE",
                    "reason": result.hard_reason,
                }),
            );
            Ok(3)
        }
    }
}

fn run_solve(path: &Path, force_oracle: bool, format: Format) -> Result<u8, Error> {
    let instance = Instance::load(path)?;
    let pi = require_cardinality(&instance)?.clone();
    let feasible = if guard_tractable(&instance, force_oracle)? {
        oracle::brute_force_count(&instance, oracle::DEFAULT_ENUMERATION_CAP)?.get(&pi)
            > 0u32.into()
    } else {
        ccsp::solver::cardinality_decide(&instance, &pi)?
    };
    let answer = if feasible { "YES" } else { "NO" };
    emit(
        format,
        answer.to_string(),
        json!({ "command": "solve", "vector": pi.to_string(), "answer": answer }),
    );
    Ok(if feasible { 0 } else { 1 })
}

fn run_count(path: &Path, all: bool, force_oracle: bool, format: Format) -> Result<u8, Error> {
    let instance = Instance::load(path)?;
    let use_oracle = guard_tractable(&instance, force_oracle)?;
    let counts = if use_oracle {
        oracle::brute_force_count(&instance, oracle::DEFAULT_ENUMERATION_CAP)?
    } else {
        ccsp::counter::ext_count_instance(&instance)?
    };
    if all {
        let lines: Vec<String> = counts
            .iter()
            .map(|(v, c)| format!("{v} {c}"))
            .collect();
        let entries: Vec<serde_json::Value> = counts
            .iter()
            .map(|(v, c)| json!({ "vector": v.to_string(), "count": c.to_string() }))
            .collect();
        emit(
            format,
            lines.join("\n"),
            json!({ "command": "count", "all": true, "entries": entries }),
        );
        Ok(if counts.is_empty() { 1 } else { 0 })
    } else {
        let pi = require_cardinality(&instance)?;
        if pi.total() != instance.variable_count() {
            return Err(Error::arg(
                "cardinality total does not match the variable count",
            ));
        }
        let count = counts.get(pi);
        emit(
            format,
            count.to_string(),
            json!({
                "command": "count",
                "vector": pi.to_string(),
                "count": count.to_string(),
            }),
        );
        Ok(if count > 0u32.into() { 0 } else { 1 })
    }
}

fn run_enumerate(path: &Path, format: Format) -> Result<u8, Error> {
    let instance = Instance::load(path)?;
    guard_tractable(&instance, false)?;
    let vectors = ccsp::solver::feasible_vectors(&instance)?;
    let lines: Vec<String> = vectors.iter().map(|v| v.to_string()).collect();
    emit(
        format,
        lines.join("\n"),
        json!({
            "command": "enumerate",
            "vectors": vectors.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        }),
    );
    Ok(if vectors.is_empty() { 1 } else { 0 })
}

fn run_oracle(path: &Path, all: bool, cap: usize, format: Format) -> Result<u8, Error> {
    let instance = Instance::load(path)?;
    let counts = oracle::brute_force_count(&instance, cap)?;
    if all {
        let lines: Vec<String> = counts.iter().map(|(v, c)| format!("{v} {c}")).collect();
        let entries: Vec<serde_json::Value> = counts
            .iter()
            .map(|(v, c)| json!({ "vector": v.to_string(), "count": c.to_string() }))
            .collect();
        emit(
            format,
            lines.join("\n"),
            json!({ "command": "oracle", "all": true, "entries": entries }),
        );
        Ok(if counts.is_empty() { 1 } else { 0 })
    } else {
        let pi = require_cardinality(&instance)?;
        let count = counts.get(pi);
        emit(
            format,
            count.to_string(),
            json!({
                "command": "oracle",
                "vector": pi.to_string(),
                "count": count.to_string(),
            }),
        );
        Ok(if count > 0u32.into() { 0 } else { 1 })
    }
}

#[allow(clippy::too_many_arguments)]
fn run_gen(
    seed: u64,
    domain_size: usize,
    vars: usize,
    constraints: usize,
    max_arity: usize,
    tractable: bool,
    output: &Path,
    format: Format,
) -> Result<u8, Error> {
    let config = oracle::GeneratorConfig {
        seed,
        domain_size,
        variables: vars,
        constraints,
        max_arity,
        tractable_only: tractable,
    };
    let (language, instance, _) = oracle::generate(&config)?;
    let lang_path = output.with_extension("cl");
    let inst_path = output.with_extension("ci");
    language.save(&lang_path)?;
    let lang_file = lang_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    std::fs::write(&inst_path, instance.to_text(&lang_file))?;
    emit(
        format,
        format!("wrote {} and {}", lang_path.display(), inst_path.display()),
        json!({
            "command": "gen",
            "language": lang_path.display().to_string(),
            "instance": inst_path.display().to_string(),
        }),
    );
    Ok(0)
}

fn load_graph(path: &Path) -> Result<BipartiteGraph, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut left = None;
    let mut right = None;
    let mut edges = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.is_empty() {
            continue;
        }
        match tokens[0] {
            "left" => {
                left = Some(tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| {
                    Error::parse(lineno, "expected: left <count>")
                })?)
            }
            "right" => {
                right = Some(tokens.get(1).and_then(|t| t.parse().ok()).ok_or_else(|| {
                    Error::parse(lineno, "expected: right <count>")
                })?)
            }
            "edge" => {
                let u = tokens.get(1).and_then(|t| t.parse().ok());
                let w = tokens.get(2).and_then(|t| t.parse().ok());
                match (u, w) {
                    (Some(u), Some(w)) => edges.push((u, w)),
                    _ => return Err(Error::parse(lineno, "expected: edge <left> <right>")),
                }
            }
            other => return Err(Error::parse(lineno, format!("unknown directive {other:?}"))),
        }
    }
    let graph = BipartiteGraph {
        left: left.ok_or_else(|| Error::parse(1, "missing left line"))?,
        right: right.ok_or_else(|| Error::parse(1, "missing right line"))?,
        edges,
    };
    graph.validate()?;
    Ok(graph)
}

fn write_reduction(out: &ReductionOutput, output: &Path, format: Format) -> Result<u8, Error> {
    let lang_path = output.with_extension("cl");
    let inst_path = output.with_extension("ci");
    let map_path = output.with_extension("map.txt");
    out.instance.language().save(&lang_path)?;
    let lang_file = lang_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    std::fs::write(&inst_path, out.instance.to_text(&lang_file))?;
    std::fs::write(
        &map_path,
        format!("forward map: {}\nnotes: {}\n", out.forward_map, out.notes),
    )?;
    emit(
        format,
        format!(
            "wrote {}, {} and {}",
            lang_path.display(),
            inst_path.display(),
            map_path.display()
        ),
        json!({
            "command": "reduce",
            "language": lang_path.display().to_string(),
            "instance": inst_path.display().to_string(),
            "sidecar": map_path.display().to_string(),
            "forward_map": out.forward_map.to_string(),
            "notes": out.notes,
        }),
    );
    Ok(0)
}

fn run_reduce(kind: &ReduceKind, format: Format) -> Result<u8, Error> {
    match kind {
        ReduceKind::Restriction {
            instance,
            parent_language,
            output,
        } => {
            let inst = Instance::load(instance)?;
            let parent = ConstraintLanguage::load(parent_language)?;
            write_reduction(&reductions::reduce_restriction(&inst, &parent)?, output, format)
        }
        ReduceKind::PpAnd {
            instance,
            defined,
            conjunct1,
            conjunct2,
            output,
        } => {
            let inst = Instance::load(instance)?;
            write_reduction(
                &reductions::reduce_pp_conjunction(&inst, defined, conjunct1, conjunct2)?,
                output,
                format,
            )
        }
        ReduceKind::PpExists {
            instance,
            defined,
            wider,
            output,
        } => {
            let inst = Instance::load(instance)?;
            write_reduction(
                &reductions::reduce_pp_exists(&inst, defined, wider)?,
                output,
                format,
            )
        }
        ReduceKind::Constants {
            instance,
            target_language,
            output,
        } => {
            let inst = Instance::load(instance)?;
            let target = ConstraintLanguage::load(target_language)?;
            write_reduction(&reductions::reduce_constants(&inst, &target)?, output, format)
        }
        ReduceKind::Bis {
            graph,
            k1,
            k2,
            language,
            relation,
            case,
            output,
        } => {
            let g = load_graph(graph)?;
            let lang = ConstraintLanguage::load(language)?;
            write_reduction(
                &reductions::reduce_bis(&g, *k1, *k2, &lang, relation, *case)?,
                output,
                format,
            )
        }
        ReduceKind::Crossing {
            language,
            alpha,
            beta,
            output,
        } => {
            let lang = ConstraintLanguage::load(language)?;
            let get_partition = |name: &str| -> Result<ccsp::Partition, Error> {
                let rel: &Relation = lang
                    .relation(name)
                    .ok_or_else(|| Error::arg(format!("unknown relation {name:?}")))?;
                rel.as_partition().ok_or_else(|| {
                    Error::arg(format!("relation {name:?} is not an equivalence relation"))
                })
            };
            let a = get_partition(alpha)?;
            let b = get_partition(beta)?;
            let composed = reductions::crossing_to_nonthick(&a, &b)?;
            let mut out_lang = ConstraintLanguage::new(lang.domain().clone());
            out_lang.add_relation("composed", composed)?;
            let lang_path = output.with_extension("cl");
            out_lang.save(&lang_path)?;
            emit(
                format,
                format!("wrote {}", lang_path.display()),
                json!({
                    "command": "reduce",
                    "kind": "crossing",
                    "language": lang_path.display().to_string(),
                }),
            );
            Ok(0)
        }
    }
}

fn run_selftest(format: Format) -> u8 {
    let results = ccsp::acceptance::run_all();
    let mut all_passed = true;
    let mut lines = Vec::new();
    let mut entries = Vec::new();
    for r in &results {
        let status = if r.passed { "PASS" } else { "FAIL" };
        lines.push(format!(
            "criterion {} ({}): {}: {}",
            r.id, r.name, status, r.detail
        ));
        entries.push(json!({
            "id": r.id,
            "name": r.name,
            "passed": r.passed,
            "detail": r.detail,
        }));
        all_passed &= r.passed;
    }
    emit(
        format,
        lines.join("\n"),
        json!({ "command": "selftest", "criteria": entries, "passed": all_passed }),
    );
    if all_passed {
        0
    } else {
        1
    }
}

fn dispatch(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Classify { language } => run_classify(language, cli.format),
        Command::Solve {
            instance,
            force_oracle,
        } => run_solve(instance, *force_oracle, cli.format),
        Command::Count {
            instance,
            all,
            force_oracle,
        } => run_count(instance, *all, *force_oracle, cli.format),
        Command::Enumerate { instance } => run_enumerate(instance, cli.format),
        Command::Oracle { instance, all, cap } => run_oracle(instance, *all, *cap, cli.format),
        Command::Gen {
            seed,
            domain_size,
            vars,
            constraints,
            max_arity,
            tractable,
            output,
        } => run_gen(
            *seed,
            *domain_size,
            *vars,
            *constraints,
            *max_arity,
            *tractable,
            output,
            cli.format,
        ),
        Command::Reduce { kind } => run_reduce(kind, cli.format),
        Command::Selftest => Ok(run_selftest(cli.format)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // A failed build means a pool already exists, which is fine.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global();
    }
    match dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}
