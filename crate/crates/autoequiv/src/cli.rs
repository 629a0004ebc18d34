//! Command-line front end.
//!
//! Exit codes form the scripting contract: 0 for "valid" / "equivalent" /
//! "true", 1 for the negative verdict, 2 for any error (bad files, failed
//! preconditions, exhausted budgets). All stdout output is deterministic
//! byte-for-byte for identical inputs and flags.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::corpus::{random_multimodel, CorpusConfig};
use crate::equiv::{
    decide_algebra_equivalence, decide_model_equivalence, decide_multimodel_equivalence,
    verify_algebra_witness, verify_model_witness, verify_multimodel_witness, AlgebraDecision,
    ModelDecision, ModelEquivWitness, MultiModelDecision, MultiModelEquivWitness, MuPolicy,
};
use crate::error::{Error, Result};
use crate::format::{
    encode_multimodel, load_valid_multimodel, parse_permutation_spec, read_multimodel,
    write_multimodel,
};
use crate::graph::{is_connected, is_tree, model_to_graph};
use crate::model::{Model, MultiModel};
use crate::perm::{MultiSortedPermutation, PermGroup};
use crate::search::{algebra_automorphisms, model_automorphisms, relation_automorphisms, SearchBudget, DEFAULT_MAX_NODES};
use crate::transform::{apply_automorphism, complement, simple_graph_complement};

/// Largest group whose full element list is printed.
const PRINT_ELEMENTS_UP_TO: usize = 1000;

#[derive(Parser)]
#[command(
    name = "autoequiv",
    version,
    about = "Decide automorphic equivalence of finite algebras, models and multi-models"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and print its validation report
    Validate(ValidateArgs),
    /// Print the algebra's automorphism group and each interpretation's subgroup
    Aut(AutArgs),
    /// Decide automorphic equivalence of two files
    Equiv(EquivArgs),
    /// Apply an equivalence-preserving transformation and write the result
    Transform(TransformArgs),
    /// Evaluate a structural predicate of a graph file
    Graph(GraphArgs),
    /// Generate a seeded random multi-model file
    #[command(hide = true)]
    Gen(GenArgs),
}

#[derive(Args)]
struct ValidateArgs {
    path: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct AutArgs {
    path: PathBuf,
    /// Node budget for the searches (also settable via AUTOEQUIV_BUDGET)
    #[arg(long)]
    budget: Option<u64>,
    /// Compute relation-preserving bijections without the operation constraint
    #[arg(long)]
    relations_only: bool,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct EquivArgs {
    path_a: PathBuf,
    path_b: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    mode: Mode,
    /// Require one shared conjugating isomorphism for every interpretation pair
    #[arg(long)]
    strict_single_mu: bool,
    /// Node budget for the searches (also settable via AUTOEQUIV_BUDGET)
    #[arg(long)]
    budget: Option<u64>,
    /// Recheck the witness from scratch before reporting it
    #[arg(long)]
    verify: bool,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("kind").required(true).multiple(false)))]
struct TransformArgs {
    path: PathBuf,
    /// Push every interpretation forward along this algebra automorphism
    /// (cycle notation, e.g. "V:(1 3)(0 2)" or "id")
    #[arg(long, group = "kind")]
    sigma: Option<String>,
    /// Complement every tuple set in its full Cartesian tuple space
    #[arg(long, group = "kind")]
    complement: bool,
    /// Loop-free complement for simple graphs
    #[arg(long, group = "kind")]
    simple_complement: bool,
    /// Output path; stdout when omitted
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GraphArgs {
    path: PathBuf,
    #[arg(long, value_enum)]
    check: CheckKind,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    sorts: usize,
    #[arg(long, default_value_t = 3)]
    size_min: usize,
    #[arg(long, default_value_t = 5)]
    size_max: usize,
    #[arg(long, default_value_t = 1)]
    relations: usize,
    #[arg(long, default_value_t = 2)]
    max_arity: usize,
    #[arg(long, default_value_t = 1)]
    interpretations: usize,
    #[arg(long, default_value_t = 0.0)]
    operation_probability: f64,
    #[arg(long, default_value_t = 0.35)]
    density: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
enum Mode {
    Algebra,
    Model,
    #[default]
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    Tree,
    Connected,
}

/// Parses arguments from the environment and runs; returns the process exit
/// code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Validate(args) => cmd_validate(args),
        Command::Aut(args) => cmd_aut(args),
        Command::Equiv(args) => cmd_equiv(args),
        Command::Transform(args) => cmd_transform(args),
        Command::Graph(args) => cmd_graph(args),
        Command::Gen(args) => cmd_gen(args),
    }
}

fn resolve_budget(flag: Option<u64>) -> SearchBudget {
    let max_nodes = flag
        .or_else(|| std::env::var("AUTOEQUIV_BUDGET").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(DEFAULT_MAX_NODES);
    SearchBudget::with_max_nodes(max_nodes)
}

fn perm_json(p: &MultiSortedPermutation) -> serde_json::Value {
    let parts: Vec<serde_json::Value> = p
        .images()
        .iter()
        .enumerate()
        .map(|(i, arr)| json!({"sort": p.source().sorts()[i].name, "images": arr}))
        .collect();
    json!(parts)
}

fn group_json(group: &PermGroup) -> serde_json::Value {
    let mut value = json!({
        "order": group.order(),
        "generators": group.generators().iter().map(perm_json).collect::<Vec<_>>(),
    });
    if group.order() <= PRINT_ELEMENTS_UP_TO {
        value["elements"] = json!(group.elements().iter().map(perm_json).collect::<Vec<_>>());
    }
    value
}

fn print_group_text(heading: &str, group: &PermGroup) {
    println!("{heading}: order {}", group.order());
    println!("  generators ({}):", group.generators().len());
    for g in group.generators() {
        println!("    {g}");
    }
    if group.order() <= PRINT_ELEMENTS_UP_TO {
        println!("  elements ({}):", group.order());
        for e in group.elements() {
            println!("    {e}");
        }
    }
}

fn cmd_validate(args: ValidateArgs) -> Result<i32> {
    let mm = read_multimodel(&args.path)?;
    let violations = mm.validate();
    match args.format {
        OutputFormat::Text => {
            if violations.is_empty() {
                println!("valid");
            } else {
                println!("invalid");
                for v in &violations {
                    println!("  - {v}");
                }
            }
        }
        OutputFormat::Json => {
            let report = json!({
                "valid": violations.is_empty(),
                "violations": violations
                    .iter()
                    .map(|v| json!({"path": v.path, "message": v.message}))
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(if violations.is_empty() { 0 } else { 2 })
}

fn cmd_aut(args: AutArgs) -> Result<i32> {
    let mm = load_valid_multimodel(&args.path)?;
    let budget = resolve_budget(args.budget);
    let algebra_group = algebra_automorphisms(&mm.algebra, &budget)?;
    let interpretation_groups: Vec<(String, PermGroup)> = mm
        .interpretations
        .iter()
        .enumerate()
        .map(|(i, interp)| {
            let model = mm.model_at(i);
            let group = if args.relations_only {
                relation_automorphisms(&model, &budget)
            } else {
                model_automorphisms(&model, &budget)
            };
            group.map(|g| (interp.label.clone(), g))
        })
        .collect::<Result<_>>()?;

    match args.format {
        OutputFormat::Text => {
            print_group_text("Aut(A)", &algebra_group);
            for (label, group) in &interpretation_groups {
                print_group_text(&format!("Aut(f) {label:?}"), group);
            }
        }
        OutputFormat::Json => {
            let report = json!({
                "algebra": group_json(&algebra_group),
                "interpretations": interpretation_groups
                    .iter()
                    .map(|(label, g)| {
                        let mut v = group_json(g);
                        v["label"] = json!(label);
                        v
                    })
                    .collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(0)
}

enum EquivOutcome {
    Algebra(AlgebraDecision),
    Model(ModelDecision),
    Multi(MultiModelDecision),
}

fn single_model(mm: &MultiModel, path: &Path) -> Result<Model> {
    if mm.interpretations.len() != 1 {
        return Err(Error::Precondition(format!(
            "model mode needs exactly one interpretation, {} has {}",
            path.display(),
            mm.interpretations.len()
        )));
    }
    Ok(mm.model_at(0))
}

fn cmd_equiv(args: EquivArgs) -> Result<i32> {
    let mm1 = load_valid_multimodel(&args.path_a)?;
    let mm2 = load_valid_multimodel(&args.path_b)?;
    let budget = resolve_budget(args.budget);

    let outcome = match args.mode {
        Mode::Algebra => EquivOutcome::Algebra(decide_algebra_equivalence(
            &mm1.algebra,
            &mm2.algebra,
            &budget,
        )?),
        Mode::Model => EquivOutcome::Model(decide_model_equivalence(
            &single_model(&mm1, &args.path_a)?,
            &single_model(&mm2, &args.path_b)?,
            &budget,
        )?),
        Mode::Multi => {
            let policy = if args.strict_single_mu { MuPolicy::Shared } else { MuPolicy::PerPair };
            EquivOutcome::Multi(decide_multimodel_equivalence(&mm1, &mm2, &budget, policy)?)
        }
    };

    let verified = if args.verify {
        Some(verify_outcome(&mm1, &mm2, &args, &outcome, &budget)?)
    } else {
        None
    };
    if verified == Some(false) {
        return Err(Error::Precondition(
            "witness failed its independent recheck; this is an engine bug".into(),
        ));
    }

    let equivalent = print_equiv(&args, &outcome, verified)?;
    Ok(if equivalent { 0 } else { 1 })
}

fn verify_outcome(
    mm1: &MultiModel,
    mm2: &MultiModel,
    args: &EquivArgs,
    outcome: &EquivOutcome,
    budget: &SearchBudget,
) -> Result<bool> {
    match outcome {
        EquivOutcome::Algebra(AlgebraDecision::Equivalent(delta)) => {
            verify_algebra_witness(&mm1.algebra, &mm2.algebra, delta, budget)
        }
        EquivOutcome::Model(ModelDecision::Equivalent(w)) => verify_model_witness(
            &single_model(mm1, &args.path_a)?,
            &single_model(mm2, &args.path_b)?,
            w,
            budget,
        ),
        EquivOutcome::Multi(MultiModelDecision::Equivalent(w)) => {
            verify_multimodel_witness(mm1, mm2, w, budget)
        }
        _ => Ok(true),
    }
}

fn print_equiv(args: &EquivArgs, outcome: &EquivOutcome, verified: Option<bool>) -> Result<bool> {
    let mode_name = match args.mode {
        Mode::Algebra => "algebra",
        Mode::Model => "model",
        Mode::Multi => "multi",
    };
    let (equivalent, reason, witness_json, witness_text) = match outcome {
        EquivOutcome::Algebra(AlgebraDecision::Equivalent(delta)) => (
            true,
            None,
            json!({"bijection": perm_json(delta)}),
            vec![format!("bijection: {delta}")],
        ),
        EquivOutcome::Algebra(AlgebraDecision::NotEquivalent(r)) => {
            (false, Some(r.to_string()), json!(null), vec![])
        }
        EquivOutcome::Model(ModelDecision::Equivalent(ModelEquivWitness { conjugator })) => (
            true,
            None,
            json!({"conjugator": perm_json(conjugator)}),
            vec![format!("conjugator: {conjugator}")],
        ),
        EquivOutcome::Model(ModelDecision::NotEquivalent(r)) => {
            (false, Some(r.to_string()), json!(null), vec![])
        }
        EquivOutcome::Multi(MultiModelDecision::Equivalent(MultiModelEquivWitness {
            pairing,
            conjugators,
        })) => {
            let mut lines = vec![format!(
                "pairing: {}",
                pairing
                    .iter()
                    .map(|(i, j)| format!("{i}->{j}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            )];
            for ((i, j), mu) in pairing.iter().zip(conjugators) {
                lines.push(format!("conjugator[{i}->{j}]: {mu}"));
            }
            let witness = json!({
                "pairing": pairing,
                "conjugators": pairing
                    .iter()
                    .zip(conjugators)
                    .map(|(&(i, j), mu)| json!({"pair": [i, j], "map": perm_json(mu)}))
                    .collect::<Vec<_>>(),
            });
            (true, None, witness, lines)
        }
        EquivOutcome::Multi(MultiModelDecision::NotEquivalent(r)) => {
            (false, Some(r.to_string()), json!(null), vec![])
        }
    };

    match args.format {
        OutputFormat::Text => {
            if equivalent {
                println!("automorphically equivalent");
                for line in &witness_text {
                    println!("{line}");
                }
            } else {
                println!("not automorphically equivalent");
                if let Some(reason) = &reason {
                    println!("reason: {reason}");
                }
            }
            if let Some(v) = verified {
                println!("witness recheck: {}", if v { "ok" } else { "FAILED" });
            }
        }
        OutputFormat::Json => {
            let mut report = json!({
                "mode": mode_name,
                "equivalent": equivalent,
            });
            if equivalent {
                report["witness"] = witness_json;
            } else {
                report["reason"] = json!(reason);
            }
            if let Some(v) = verified {
                report["verified"] = json!(v);
            }
            println!("{}", serde_json::to_string_pretty(&report).unwrap());
        }
    }
    Ok(equivalent)
}

fn cmd_transform(args: TransformArgs) -> Result<i32> {
    let mm = load_valid_multimodel(&args.path)?;
    let out = if let Some(spec) = &args.sigma {
        let sigma = parse_permutation_spec(mm.domain(), spec)?;
        apply_automorphism(&mm, &sigma)?
    } else if args.complement {
        complement(&mm)
    } else {
        simple_graph_complement(&mm)?
    };
    match &args.output {
        Some(path) => write_multimodel(path, &out)?,
        None => print!("{}", encode_multimodel(&out)),
    }
    Ok(0)
}

fn cmd_graph(args: GraphArgs) -> Result<i32> {
    let mm = load_valid_multimodel(&args.path)?;
    let model = single_model(&mm, &args.path)?;
    let graph = model_to_graph(&model)?;
    let (name, result) = match args.check {
        CheckKind::Tree => ("tree", is_tree(&graph)),
        CheckKind::Connected => ("connected", is_connected(&graph)),
    };
    match args.format {
        OutputFormat::Text => println!("{result}"),
        OutputFormat::Json => {
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({"check": name, "result": result})).unwrap()
            );
        }
    }
    Ok(if result { 0 } else { 1 })
}

fn cmd_gen(args: GenArgs) -> Result<i32> {
    if args.size_min > args.size_max || args.size_min == 0 {
        return Err(Error::Precondition("size bounds must satisfy 1 <= min <= max".into()));
    }
    let cfg = CorpusConfig {
        sorts: (args.sorts, args.sorts),
        sort_size: (args.size_min, args.size_max),
        relations: (args.relations, args.relations),
        arity: (1, args.max_arity.max(1)),
        interpretations: (args.interpretations, args.interpretations),
        operation_probability: args.operation_probability,
        tuple_density: args.density,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut mm = random_multimodel(&cfg, &mut rng);
    mm.canonicalize();
    match &args.output {
        Some(path) => write_multimodel(path, &mm)?,
        None => print!("{}", encode_multimodel(&mm)),
    }
    Ok(0)
}
