//! Command-line front end.
//!
//! Exit protocol: 0 for success (and for "yes" from `decide`), 1 for a "no"
//! from `decide`, 2 for any error. Errors print a single machine-parsable
//! line `error: <code>: <message>` on stderr. JSON output is deterministic;
//! DOT is display-only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::derivers::{
    elk_materialize, eli_materialize, lazy_view, Budgets, DerivationStructure, DeriverKind,
};
use crate::emit;
use crate::generators::{
    deep_eli_theory, deep_meta, pad_depth_chain, parse_qbf, parse_tm, qbf_to_eli, tm_to_eli,
};
use crate::hypergraph::Proof;
use crate::logic::{normalize_eli, parse_gci, parse_theory, parse_theory_with_dialect, Dialect, Gci, Theory};
use crate::measures::{evaluate, measure_by_name, ThresholdSemantics};
use crate::optimizer::{
    brute_force_optimal, decide_depth_leq, decide_treesize_leq, dijkstra_optimal, ProofEvaluator,
    SearchOptions, DEFAULT_ENUMERATION_CAP,
};
use crate::weight::Weight;

pub const ENV_MAX_VERTICES: &str = "PROOFFORGE_MAX_VERTICES";

#[derive(Parser)]
#[command(name = "proofforge", disable_help_subcommand = true)]
#[command(about = "Optimal-proof search over EL/ELI derivation hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum DialectArg {
    El,
    Eli,
}

#[derive(Clone, Copy, ValueEnum)]
enum DeriverArg {
    Elk,
    Eli,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Depth,
    Treesize,
    Logdepth,
    Size,
}

#[derive(Clone, Copy, ValueEnum)]
enum BoundEncodingArg {
    Unary,
    Binary,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a theory file and report problems.
    Parse {
        file: PathBuf,
        #[arg(long, value_enum)]
        dialect: Option<DialectArg>,
    },
    /// Saturate a theory into its derivation structure.
    Saturate {
        file: PathBuf,
        #[command(flatten)]
        goal: GoalArgs,
        #[arg(long, value_enum)]
        deriver: Option<DeriverArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute an optimal proof for a goal.
    Prove {
        file: PathBuf,
        #[command(flatten)]
        goal: GoalArgs,
        #[arg(long, value_enum)]
        measure: Option<MeasureArg>,
        #[arg(long, value_enum)]
        deriver: Option<DeriverArg>,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        max_vertices: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        debug_invariants: bool,
    },
    /// Decide whether a proof within a weight bound exists (exit 0 yes, 1 no).
    Decide {
        /// Theory file; optional when --instance is given.
        file: Option<PathBuf>,
        #[command(flatten)]
        goal: GoalArgs,
        #[arg(long, value_enum)]
        measure: Option<MeasureArg>,
        /// Bound, as `N`, `N/D`, or a decimal.
        #[arg(long)]
        bound: Option<String>,
        /// Accepted for experiment labeling only; no semantic effect.
        #[arg(long, value_enum)]
        bound_encoding: Option<BoundEncodingArg>,
        #[arg(long, value_enum)]
        deriver: Option<DeriverArg>,
        #[arg(long)]
        max_vertices: Option<usize>,
        /// Write the witness proof (JSON) here when the answer is yes.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long)]
        debug_invariants: bool,
        /// Independent searches run concurrently when several instances are given.
        #[arg(long, default_value = "1")]
        jobs: usize,
    },
    /// Generate hardness instances (theory file plus `.inst.json` sidecar).
    #[command(subcommand)]
    Gen(GenCommand),
    /// Run the randomized invariant suites.
    Selftest {
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "1")]
        jobs: usize,
    },
}

#[derive(Args)]
struct GoalArgs {
    /// Goal sentence, e.g. "A <= B".
    #[arg(long)]
    goal: Option<String>,
    /// Instance sidecar (`BASE.inst.json`); provides goal, bound, and
    /// measure, with the theory at `BASE.thy`. Repeatable for `decide`.
    #[arg(long)]
    instance: Vec<PathBuf>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Append a fresh subsumption chain to an EL theory; the instance asks
    /// for a proof no deeper than the saturation's vertex count.
    Chain {
        theory: PathBuf,
        #[arg(long)]
        lhs: String,
        #[arg(long)]
        rhs: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Binary-counter ELI theory whose proofs are deeper than 2^bits.
    Deep {
        #[arg(long)]
        bits: usize,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode a quantified Boolean formula as a depth-bounded instance.
    Qbf {
        #[arg(long)]
        formula: String,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Encode a bounded Turing machine run as a tree-size-bounded instance.
    Tm {
        machine: PathBuf,
        #[arg(long)]
        word: String,
        #[arg(short, long)]
        output: PathBuf,
    },
}

/// The `.inst.json` sidecar: everything `decide` needs beyond the theory.
#[derive(Serialize, Deserialize)]
struct Sidecar {
    goal: String,
    measure: String,
    meta: BTreeMap<String, String>,
    threshold: String,
}

struct CliError {
    code: &'static str,
    message: String,
}

impl CliError {
    fn new(code: &'static str, message: impl Into<String>) -> CliError {
        CliError { code, message: message.into() }
    }
}

macro_rules! cli_err_from {
    ($ty:ty, $code:expr) => {
        impl From<$ty> for CliError {
            fn from(e: $ty) -> CliError {
                CliError::new($code, e.to_string())
            }
        }
    };
}
cli_err_from!(crate::logic::ParseError, "parse");
cli_err_from!(crate::logic::NormalizeError, "normalize");
cli_err_from!(crate::logic::EntailError, "entail");
cli_err_from!(crate::derivers::DeriverError, "deriver");
cli_err_from!(crate::generators::GenError, "gen");
cli_err_from!(crate::weight::WeightError, "bound");
cli_err_from!(std::io::Error, "io");
cli_err_from!(serde_json::Error, "json");

impl From<crate::optimizer::SearchError> for CliError {
    fn from(e: crate::optimizer::SearchError) -> CliError {
        use crate::optimizer::SearchError::*;
        let code = match &e {
            GoalAbsent(_) | Unreachable(_) => "unreachable",
            RequiresMonotone(_) => "measure",
            EnumerationCap { .. } | BudgetTooLarge(_) => "budget",
            InvariantViolation(_) => "invariant",
            Eval(_) => "measure",
            Deriver(_) => "deriver",
        };
        CliError::new(code, e.to_string())
    }
}

/// Entry point used by the binary and by tests. Returns the process exit
/// code and writes to the given sinks.
pub fn run<O: std::io::Write, E: std::io::Write>(
    argv: &[String],
    stdout: &mut O,
    stderr: &mut E,
) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let first = e.to_string().lines().next().unwrap_or("bad arguments").to_string();
                let _ = writeln!(stderr, "error: usage: {first}");
                return 2;
            }
            // --help / --version
            let _ = write!(stdout, "{e}");
            return 0;
        }
    };
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let message = e.message.replace('\n', " ");
            let _ = writeln!(stderr, "error: {}: {}", e.code, message);
            2
        }
    }
}

fn budgets_from(max_vertices: Option<usize>) -> Budgets {
    let mut budgets = Budgets::default();
    if let Some(n) = max_vertices {
        budgets.max_vertices = n;
    } else if let Ok(v) = std::env::var(ENV_MAX_VERTICES) {
        if let Ok(n) = v.parse() {
            budgets.max_vertices = n;
        }
    }
    budgets
}

fn load_theory(path: &Path, dialect: Option<DialectArg>) -> Result<Theory, CliError> {
    let text = fs::read_to_string(path)?;
    let theory = match dialect {
        None => parse_theory(&text)?,
        Some(DialectArg::El) => parse_theory_with_dialect(&text, Dialect::El)?,
        Some(DialectArg::Eli) => parse_theory_with_dialect(&text, Dialect::Eli)?,
    };
    Ok(theory)
}

fn deriver_kind(arg: Option<DeriverArg>, theory: &Theory) -> DeriverKind {
    match arg {
        Some(DeriverArg::Elk) => DeriverKind::Elk,
        Some(DeriverArg::Eli) => DeriverKind::Eli,
        None => match theory.dialect {
            Dialect::El => DeriverKind::Elk,
            Dialect::Eli => DeriverKind::Eli,
        },
    }
}

fn materialize(
    kind: DeriverKind,
    theory: &Theory,
    goal: &Gci,
    budgets: &Budgets,
) -> Result<DerivationStructure, CliError> {
    match kind {
        DeriverKind::Elk => Ok(elk_materialize(theory, goal, budgets)?),
        DeriverKind::Eli => {
            let normalized = normalize_eli(theory)?;
            Ok(eli_materialize(&normalized.theory, goal, budgets)?)
        }
    }
}

fn write_out(path: Option<&Path>, content: &str, stdout: &mut impl std::io::Write) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, content)?,
        None => {
            let _ = write!(stdout, "{content}");
        }
    }
    Ok(())
}

fn parse_goal(goal: &GoalArgs) -> Result<Option<Gci>, CliError> {
    match &goal.goal {
        Some(g) => Ok(Some(parse_gci(g)?)),
        None => Ok(None),
    }
}

fn measure_name(arg: MeasureArg) -> &'static str {
    match arg {
        MeasureArg::Depth => "depth",
        MeasureArg::Treesize => "treesize",
        MeasureArg::Logdepth => "logdepth",
        MeasureArg::Size => "size",
    }
}

fn dispatch(cli: Cli, stdout: &mut impl std::io::Write) -> Result<i32, CliError> {
    match cli.command {
        Command::Parse { file, dialect } => {
            let theory = load_theory(&file, dialect)?;
            let _ = writeln!(
                stdout,
                "ok: {} axioms, dialect {}",
                theory.axioms.len(),
                theory.dialect
            );
            Ok(0)
        }

        Command::Saturate { file, goal, deriver, format, max_vertices, output } => {
            let theory = load_theory(&file, None)?;
            let g = parse_goal(&goal)?
                .or_else(|| read_sidecar_goal(&goal).transpose().ok().flatten())
                .ok_or_else(|| CliError::new("usage", "saturate needs --goal or --instance"))?;
            let kind = deriver_kind(deriver, &theory);
            let ds = materialize(kind, &theory, &g, &budgets_from(max_vertices))?;
            let content = match format {
                FormatArg::Json => emit::structure_to_json(&ds),
                FormatArg::Dot => emit::structure_to_dot(&ds),
            };
            write_out(output.as_deref(), &content, stdout)?;
            let _ = writeln!(
                stdout,
                "vertices: {}\nedges: {}",
                ds.vertex_count(),
                ds.graph().edge_count()
            );
            Ok(0)
        }

        Command::Prove {
            file,
            goal,
            measure,
            deriver,
            format,
            max_vertices,
            output,
            debug_invariants,
        } => {
            let theory = load_theory(&file, None)?;
            let sidecar = read_one_sidecar(&goal)?;
            let g = match (parse_goal(&goal)?, &sidecar) {
                (Some(g), _) => g,
                (None, Some(sc)) => parse_gci(&sc.goal)?,
                (None, None) => {
                    return Err(CliError::new("usage", "prove needs --goal or --instance"))
                }
            };
            let mname = measure
                .map(measure_name)
                .or_else(|| sidecar.as_ref().map(|s| leak_name(&s.measure)))
                .unwrap_or("depth");
            let kind = deriver_kind(deriver, &theory);
            let ds = materialize(kind, &theory, &g, &budgets_from(max_vertices))?;
            let opts = SearchOptions { debug_invariants };

            let (weight_line, proof): (String, Proof) = if mname == "size" {
                let r = brute_force_optimal(&ds, ProofEvaluator::Size, DEFAULT_ENUMERATION_CAP)?;
                (format!("weight: {}", r.weight), r.proof)
            } else {
                let m = measure_by_name(mname)
                    .ok_or_else(|| CliError::new("measure", format!("unknown measure {mname}")))?;
                let r = dijkstra_optimal(&ds, &m, &opts)?;
                let mut line = format!("weight: {}", r.weight);
                if m.threshold_semantics() == ThresholdSemantics::Log2 {
                    let _ = write!(line, "\nlogdepth: {}", m.display_weight(&r.weight));
                }
                (line, r.proof)
            };
            let content = match format {
                FormatArg::Json => emit::proof_to_json(&proof, ds.theory()),
                FormatArg::Dot => emit::proof_to_dot(&proof, ds.theory()),
            };
            write_out(output.as_deref(), &content, stdout)?;
            let _ = writeln!(stdout, "{weight_line}");
            Ok(0)
        }

        Command::Decide {
            file,
            goal,
            measure,
            bound,
            bound_encoding: _,
            deriver,
            max_vertices,
            witness,
            debug_invariants,
            jobs,
        } => {
            let budgets = budgets_from(max_vertices);
            let opts = SearchOptions { debug_invariants };

            // Assemble the instance list: explicit sidecars, or one ad-hoc
            // instance from file/goal/bound/measure.
            struct Job {
                name: String,
                theory: Theory,
                goal: Gci,
                bound: Weight,
                measure: String,
            }
            let mut jobs_list: Vec<Job> = Vec::new();
            if goal.instance.is_empty() {
                let file = file
                    .ok_or_else(|| CliError::new("usage", "decide needs a theory file or --instance"))?;
                let theory = load_theory(&file, None)?;
                let g = parse_goal(&goal)?
                    .ok_or_else(|| CliError::new("usage", "decide needs --goal"))?;
                let bound = bound
                    .ok_or_else(|| CliError::new("usage", "decide needs --bound"))?;
                let mname = measure
                    .map(measure_name)
                    .ok_or_else(|| CliError::new("usage", "decide needs --measure"))?;
                jobs_list.push(Job {
                    name: file.display().to_string(),
                    theory,
                    goal: g,
                    bound: Weight::from_str(&bound)?,
                    measure: mname.to_string(),
                });
            } else {
                for sc_path in &goal.instance {
                    let sc: Sidecar = serde_json::from_str(&fs::read_to_string(sc_path)?)?;
                    let theory_path = sidecar_theory_path(sc_path);
                    let theory = match &file {
                        Some(f) => load_theory(f, None)?,
                        None => load_theory(&theory_path, None)?,
                    };
                    jobs_list.push(Job {
                        name: sc_path.display().to_string(),
                        theory,
                        goal: parse_gci(&sc.goal)?,
                        bound: match &bound {
                            Some(b) => Weight::from_str(b)?,
                            None => Weight::from_str(&sc.threshold)?,
                        },
                        measure: measure
                            .map(|m| measure_name(m).to_string())
                            .unwrap_or_else(|| sc.measure.clone()),
                    });
                }
            }

            let run_job = |job: &Job| -> Result<bool, CliError> {
                let kind = deriver_kind(deriver, &job.theory);
                let view = lazy_view(kind, &job.theory, &job.goal, budgets)?;
                let decision = match job.measure.as_str() {
                    "depth" | "logdepth" => {
                        // a log-depth bound q is the depth bound 2^q; bounds
                        // arrive pre-exponentiated in the sidecars
                        decide_depth_leq(&view, &job.goal, &job.bound, &opts)?
                    }
                    "treesize" => decide_treesize_leq(&view, &job.goal, &job.bound, &opts)?,
                    other => {
                        return Err(CliError::new(
                            "measure",
                            format!("decide supports depth and treesize, not {other}"),
                        ))
                    }
                };
                if let (Some(path), Some(w)) = (&witness, &decision.witness) {
                    let normalized_theory = match kind {
                        DeriverKind::Eli => normalize_eli(&job.theory)?.theory,
                        DeriverKind::Elk => job.theory.clone(),
                    };
                    fs::write(path, emit::proof_to_json(w, &normalized_theory))?;
                }
                Ok(decision.admissible)
            };

            let results: Vec<(String, Result<bool, CliError>)> = if jobs <= 1 || jobs_list.len() <= 1
            {
                jobs_list
                    .iter()
                    .map(|j| (j.name.clone(), run_job(j)))
                    .collect()
            } else {
                std::thread::scope(|scope| {
                    let chunks: Vec<_> = jobs_list.chunks((jobs_list.len() + jobs - 1) / jobs).collect();
                    let handles: Vec<_> = chunks
                        .into_iter()
                        .map(|chunk| {
                            scope.spawn(move || {
                                chunk
                                    .iter()
                                    .map(|j| (j.name.clone(), run_job(j)))
                                    .collect::<Vec<_>>()
                            })
                        })
                        .collect();
                    handles.into_iter().flat_map(|h| h.join().expect("job thread")).collect()
                })
            };

            let mut all_yes = true;
            for (name, r) in results {
                match r {
                    Ok(yes) => {
                        let _ = writeln!(stdout, "{name}: {}", if yes { "yes" } else { "no" });
                        all_yes &= yes;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(if all_yes { 0 } else { 1 })
        }

        Command::Gen(gen) => {
            let (base, theory, sidecar) = match gen {
                GenCommand::Chain { theory, lhs, rhs, output } => {
                    let t = load_theory(&theory, Some(DialectArg::El))?;
                    let inst = pad_depth_chain(&t, &lhs, &rhs)?;
                    (output, inst.theory.clone(), sidecar_of(&inst))
                }
                GenCommand::Deep { bits, output } => {
                    if bits == 0 {
                        return Err(CliError::new("gen", "deep needs at least one bit"));
                    }
                    let (theory, goal) = deep_eli_theory(bits);
                    let sc = Sidecar {
                        goal: goal.to_string(),
                        measure: "depth".into(),
                        meta: deep_meta(bits),
                        threshold: (1u64 << bits.min(62)).to_string(),
                    };
                    (output, theory, sc)
                }
                GenCommand::Qbf { formula, output } => {
                    let f = parse_qbf(&formula)?;
                    let inst = qbf_to_eli(&f)?;
                    (output, inst.theory.clone(), sidecar_of(&inst))
                }
                GenCommand::Tm { machine, word, output } => {
                    let m = parse_tm(&fs::read_to_string(&machine)?)?;
                    let inst = tm_to_eli(&m, &word)?;
                    (output, inst.theory.clone(), sidecar_of(&inst))
                }
            };
            let thy_path = base.with_extension("thy");
            let sc_path = base.with_extension("inst.json");
            fs::write(&thy_path, theory.print())?;
            fs::write(&sc_path, serde_json::to_string_pretty(&sidecar)?)?;
            let _ = writeln!(stdout, "wrote {} and {}", thy_path.display(), sc_path.display());
            Ok(0)
        }

        Command::Selftest { seed, jobs } => {
            let report = crate::cli::selftest::run(seed, jobs);
            for line in &report.lines {
                let _ = writeln!(stdout, "{line}");
            }
            if report.failed {
                Err(CliError::new("selftest", "one or more suites failed"))
            } else {
                Ok(0)
            }
        }
    }
}

fn leak_name(s: &str) -> &'static str {
    // measure names form a tiny closed set; map to static strings
    match s {
        "treesize" => "treesize",
        "logdepth" => "logdepth",
        "size" => "size",
        _ => "depth",
    }
}

fn sidecar_of(inst: &crate::generators::ReductionInstance) -> Sidecar {
    Sidecar {
        goal: inst.goal.to_string(),
        measure: inst.measure_name.clone(),
        meta: inst.meta.clone(),
        threshold: inst.threshold.to_string(),
    }
}

fn sidecar_theory_path(sc_path: &Path) -> PathBuf {
    // BASE.inst.json -> BASE.thy
    let s = sc_path.to_string_lossy();
    let base = s.strip_suffix(".inst.json").unwrap_or(&s);
    PathBuf::from(format!("{base}.thy"))
}

fn read_one_sidecar(goal: &GoalArgs) -> Result<Option<Sidecar>, CliError> {
    match goal.instance.as_slice() {
        [] => Ok(None),
        [p] => Ok(Some(serde_json::from_str(&fs::read_to_string(p)?)?)),
        _ => Err(CliError::new("usage", "this command takes at most one --instance")),
    }
}

fn read_sidecar_goal(goal: &GoalArgs) -> Option<Result<Gci, CliError>> {
    goal.instance.first().map(|p| {
        let sc: Sidecar = serde_json::from_str(&fs::read_to_string(p)?)?;
        Ok(parse_gci(&sc.goal)?)
    })
}

mod selftest {
    //! Seeded randomized invariant suites, smaller cousins of the
    //! acceptance criteria.

    use super::*;
    use crate::hypergraph::{find_homomorphism, unravel_with_map};
    use crate::measures::{check_monotone, depth_measure, tree_size_measure};
    use crate::testgen::{self, StructureParams};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    pub struct Report {
        pub lines: Vec<String>,
        pub failed: bool,
    }

    pub fn run(seed: u64, jobs: usize) -> Report {
        type Suite = (&'static str, fn(u64) -> Result<(), String>);
        let suites: Vec<Suite> = vec![
            ("oracle-equivalence", suite_oracle_equivalence),
            ("unraveling-invariance", suite_unraveling),
            ("homomorphic-image", suite_phi),
            ("monotonicity", suite_monotone),
            ("deciders-vs-search", suite_deciders),
            ("derivers-cross-check", suite_cross_check),
        ];
        let results: Vec<(String, Result<(), String>)> = if jobs <= 1 {
            suites.iter().map(|(n, f)| (n.to_string(), f(seed))).collect()
        } else {
            std::thread::scope(|scope| {
                suites
                    .iter()
                    .map(|&(n, f)| scope.spawn(move || (n.to_string(), f(seed))))
                    .collect::<Vec<_>>()
                    .into_iter()
                    .map(|h| h.join().expect("suite thread"))
                    .collect()
            })
        };
        let mut lines = Vec::new();
        let mut failed = false;
        for (name, r) in results {
            match r {
                Ok(()) => lines.push(format!("selftest {name}: ok")),
                Err(e) => {
                    lines.push(format!("selftest {name}: FAILED: {e}"));
                    failed = true;
                }
            }
        }
        Report { lines, failed }
    }

    fn suite_oracle_equivalence(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72_6163);
        let params = StructureParams::default();
        for i in 0..200 {
            let ds = testgen::random_structure(&mut rng, &params);
            for m in [depth_measure(), tree_size_measure()] {
                let greedy = dijkstra_optimal(&ds, &m, &SearchOptions::checked())
                    .map_err(|e| format!("instance {i}: {e}"))?;
                let brute =
                    brute_force_optimal(&ds, ProofEvaluator::Recursive(&m), 1_000_000)
                        .map_err(|e| format!("instance {i}: {e}"))?;
                if greedy.weight != brute.weight {
                    return Err(format!(
                        "instance {i}: {} disagreement {} vs {}",
                        m.name(),
                        greedy.weight,
                        brute.weight
                    ));
                }
            }
        }
        Ok(())
    }

    fn suite_unraveling(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x756e_7261);
        let params = StructureParams::default();
        for i in 0..100 {
            let p = testgen::random_proof(&mut rng, &params);
            let t = crate::hypergraph::unravel(&p);
            for m in [depth_measure(), tree_size_measure()] {
                let a = evaluate(&m, &p).map_err(|e| e.to_string())?;
                let b = evaluate(&m, &t).map_err(|e| e.to_string())?;
                if a != b {
                    return Err(format!("proof {i}: {} {} vs unraveled {}", m.name(), a, b));
                }
            }
        }
        Ok(())
    }

    fn suite_phi(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x7068_6921);
        let params = StructureParams::default();
        for i in 0..40 {
            let (ds, base) = testgen::random_proof_with_host(&mut rng, &params);
            let (tree, hom) = unravel_with_map(&base);
            // compose: tree -> base -> ds (base proofs reuse structure ids)
            let _ = &hom;
            let into_ds = find_homomorphism(tree.graph(), ds.graph())
                .ok_or_else(|| format!("triple {i}: unraveling must embed"))?;
            for m in [depth_measure(), tree_size_measure()] {
                let source = evaluate(&m, &tree).map_err(|e| e.to_string())?;
                let q = crate::hypergraph::collapse_image(&tree, &into_ds, ds.graph(), &m)
                    .map_err(|e| format!("triple {i}: {e}"))?;
                let collapsed = evaluate(&m, &q).map_err(|e| e.to_string())?;
                if collapsed > source {
                    return Err(format!(
                        "triple {i}: {} image minimum {} exceeds source {}",
                        m.name(),
                        collapsed,
                        source
                    ));
                }
            }
        }
        Ok(())
    }

    fn suite_monotone(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d6f_6e6f);
        let labels = vec![(
            vec![parse_gci("A <= B").unwrap()],
            parse_gci("A <= C").unwrap(),
        )];
        let mut multisets = Vec::new();
        for _ in 0..30 {
            let n = rng.gen_range(0..4);
            multisets.push((0..n).map(|_| Weight::from_u64(rng.gen_range(0..6))).collect());
        }
        for m in [depth_measure(), tree_size_measure()] {
            let v = check_monotone(&m, &labels, &multisets);
            if !v.is_empty() {
                return Err(format!("{} violated monotonicity: {:?}", m.name(), v[0]));
            }
        }
        Ok(())
    }

    fn suite_deciders(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6465_6369);
        let params = StructureParams::default();
        let opts = SearchOptions::checked();
        for i in 0..100 {
            let ds = Arc::new(testgen::random_structure(&mut rng, &params));
            let view = crate::derivers::MaterializedView::new(ds.clone());
            let goal = ds.goal().clone();
            for m in [depth_measure(), tree_size_measure()] {
                let opt = dijkstra_optimal(&ds, &m, &opts).map_err(|e| e.to_string())?.weight;
                for delta in [-1i64, 0, 1] {
                    let q = match offset(&opt, delta) {
                        Some(q) => q,
                        None => continue,
                    };
                    let expected = opt <= q;
                    let got = match m.name() {
                        "depth" => decide_depth_leq(&view, &goal, &q, &opts),
                        _ => decide_treesize_leq(&view, &goal, &q, &opts),
                    }
                    .map_err(|e| e.to_string())?;
                    if got.admissible != expected {
                        return Err(format!(
                            "instance {i}: {} decide({q}) = {} but optimum {opt}",
                            m.name(),
                            got.admissible
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    pub(super) fn offset(w: &Weight, delta: i64) -> Option<Weight> {
        if delta >= 0 {
            Some(w.clone() + &Weight::from_u64(delta as u64))
        } else {
            w.checked_sub(&Weight::from_u64((-delta) as u64))
        }
    }

    fn suite_cross_check(seed: u64) -> Result<(), String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6372_6f73);
        for i in 0..30 {
            let theory = testgen::random_el_theory(&mut rng, 5);
            let goal = parse_gci("A <= B").unwrap();
            let el = crate::logic::entails(&theory, &goal).map_err(|e| e.to_string())?;
            let normalized = normalize_eli(&Theory::new(Dialect::Eli, theory.axioms.clone()))
                .map_err(|e| e.to_string())?;
            let ds = eli_materialize(&normalized.theory, &goal, &Budgets::default())
                .map_err(|e| e.to_string())?;
            let eli = ds.goal_vertex().is_some();
            if el != eli {
                return Err(format!(
                    "theory {i}: EL says {el}, ELI says {eli}\n{}",
                    theory.print()
                ));
            }
        }
        Ok(())
    }
}
