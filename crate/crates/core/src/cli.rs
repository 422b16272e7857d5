//! Command-line front end.
//!
//! Exit status: 0 on success, 2 when `learn line` or `oracle line` proves
//! that no perfect line embedding exists, 3 when a search stopped on its
//! budget and the output is best-effort, 1 on any error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::embedding::{Embedding, Host};
use crate::error::Result;
use crate::euclidean::{
    learn_euclidean_imperfect, learn_euclidean_perfect, sample_lipschitz_partition, EuclideanConfig,
};
use crate::evaluation::{accuracy, min_distortion, AccuracyReport};
use crate::finite::{embed_into_finite_metric, FiniteMetric, FiniteMetricDocument, SearchOptions};
use crate::graph::SimilarityMetric;
use crate::instance::{generate_planted, parse_instance, Instance};
use crate::partition::well_linked_decomposition;
use crate::stats::{write_csv, ClusterStat};
use crate::tree::{annuli_partition, learn_tree_imperfect, learn_tree_perfect, TreeConfig};
use crate::{line, oracle};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INFEASIBLE: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "contrastive",
    version,
    about = "Learn metric embeddings from similar/dissimilar pair labels"
)]
struct Cli {
    /// Worker threads (results do not depend on it).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a planted instance.
    Generate(GenerateArgs),
    /// Check an instance and print its summary.
    Validate {
        #[arg(short, long)]
        input: PathBuf,
    },
    /// Learn an embedding.
    #[command(subcommand)]
    Learn(LearnCommand),
    /// Partition the objects.
    #[command(subcommand)]
    Partition(PartitionCommand),
    /// Embed into an explicit finite metric.
    #[command(subcommand)]
    Embed(EmbedCommand),
    /// Brute-force references for small instances.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Score an embedding against an instance.
    Evaluate {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        embedding: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
        /// Violations to print.
        #[arg(long, default_value_t = 10)]
        sample: usize,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum HostKind {
    Line,
    Euclidean,
    Tree,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    host: HostKind,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1.0)]
    u: f64,
    #[arg(long, default_value_t = 1.5)]
    l: f64,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: PathBuf,
    /// Also write the planted embedding.
    #[arg(long)]
    truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: PathBuf,
    /// Write the accuracy report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LearnArgs {
    #[command(flatten)]
    io: Common,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.5)]
    eps_prime: f64,
    /// Expected label noise; enables the imperfect-information learner.
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search nodes per cluster.
    #[arg(long, default_value_t = 4000)]
    enum_budget: u64,
    #[arg(long)]
    restarts: Option<usize>,
    /// Per-cluster statistics as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum LearnCommand {
    Line {
        #[command(flatten)]
        io: Common,
    },
    Euclidean {
        #[command(flatten)]
        args: LearnArgs,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Largest grid per cluster.
        #[arg(long, default_value_t = 20_000)]
        grid_budget: usize,
    },
    Tree {
        #[command(flatten)]
        args: LearnArgs,
        /// Largest tree the search may build.
        #[arg(long, default_value_t = 100_000)]
        tree_budget: usize,
    },
}

#[derive(Subcommand, Debug)]
enum PartitionCommand {
    Lipschitz {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Annuli {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        /// Ring width is `delta/2`; defaults to `8u/epsilon`.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    WellLinked {
        #[arg(short, long)]
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long)]
        alpha: f64,
    },
}

#[derive(Subcommand, Debug)]
enum EmbedCommand {
    Finite {
        #[command(flatten)]
        io: Common,
        /// Finite metric document `{points, matrix}`.
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 0.25)]
        epsilon: f64,
        #[arg(long, default_value_t = 0.0)]
        eps_prime: f64,
        /// Search nodes; unlimited when absent.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    Finite {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        host: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
    Line {
        #[command(flatten)]
        io: Common,
    },
    Tree {
        #[command(flatten)]
        io: Common,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        arity: usize,
        #[arg(long, default_value_t = 1.0)]
        c: f64,
    },
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status. Errors are printed to stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Some(j) = cli.jobs {
        // the global pool can only be set once per process; later calls keep the first
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build_global();
    }
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

fn read(path: &Path) -> Result<String> {
    Ok(fs::read_to_string(path)?)
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?)
}

fn load_embedding(path: &Path) -> Result<Embedding> {
    crate::embedding::parse_embedding(&read(path)?)
}

fn load_metric(path: &Path) -> Result<FiniteMetric> {
    let doc: FiniteMetricDocument = serde_json::from_str(&read(path)?)?;
    FiniteMetric::from_document(doc)
}

fn write(path: &Path, text: &str) -> Result<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write(path, &serde_json::to_string_pretty(value)?)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

/// Writes the embedding and its report, prints a one-line summary.
fn finish(
    inst: &Instance,
    emb: &Embedding,
    c: f64,
    io: &Common,
    stage: &str,
) -> Result<AccuracyReport> {
    let report = accuracy(inst, emb, c)?;
    write(&io.output, &emb.to_json())?;
    if let Some(path) = &io.report {
        write_json(path, &report)?;
    }
    log::info!(
        "stage={stage} objects={} constraints={} c={c} accuracy={}",
        inst.n(),
        report.total(),
        report.accuracy
    );
    println!("accuracy {} at c = {c}", report.accuracy);
    Ok(report)
}

fn write_stats(path: Option<&PathBuf>, stats: &[ClusterStat]) -> Result<()> {
    if let Some(p) = path {
        write_csv(stats, fs::File::create(p)?)?;
    }
    Ok(())
}

fn ids(inst: &Instance, members: &[usize]) -> Vec<String> {
    members.iter().map(|&i| inst.id(i).to_string()).collect()
}

fn id_pairs(inst: &Instance, pairs: &[(usize, usize)]) -> Vec<[String; 2]> {
    pairs
        .iter()
        .map(|&(a, b)| [inst.id(a).to_string(), inst.id(b).to_string()])
        .collect()
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Generate(a) => {
            let host = match a.host {
                HostKind::Line => Host::Line,
                HostKind::Euclidean => Host::Euclidean(a.d),
                HostKind::Tree => Host::Tree,
            };
            let (inst, truth) = generate_planted(host, a.n, a.u, a.l, a.noise, a.seed)?;
            write(&a.output, &inst.to_json())?;
            if let Some(p) = &a.truth {
                write(p, &truth.ground_embedding.to_json())?;
            }
            log::info!(
                "stage=generate host={host} n={} seed={} flipped={}",
                a.n,
                a.seed,
                truth.flipped.len()
            );
            Ok(EXIT_OK)
        }
        Command::Validate { input } => {
            let inst = load_instance(&input)?;
            print_json(&inst.validate())?;
            Ok(EXIT_OK)
        }
        Command::Evaluate {
            input,
            embedding,
            c,
            sample,
        } => {
            let inst = load_instance(&input)?;
            let emb = load_embedding(&embedding)?;
            let mut report = accuracy(&inst, &emb, c)?;
            let distortion = min_distortion(&inst, &emb)?;
            let violations = report.violated.len();
            report.violated.truncate(sample);
            print_json(&json!({
                "accuracy": report.accuracy,
                "c": c,
                "satisfied": report.satisfied(),
                "total": report.total(),
                "violations": violations,
                "violation_sample": report.violated,
                "min_distortion": if distortion.is_finite() { json!(distortion) } else { json!("inf") },
            }))?;
            Ok(EXIT_OK)
        }
        Command::Learn(l) => learn(l),
        Command::Partition(p) => partition(p),
        Command::Embed(EmbedCommand::Finite {
            io,
            host,
            epsilon,
            eps_prime,
            budget,
            seed,
        }) => {
            let inst = load_instance(&io.input)?;
            let metric = load_metric(&host)?;
            let opts = SearchOptions {
                budget: budget.unwrap_or(u64::MAX),
                seed,
                ..SearchOptions::exhaustive()
            };
            let (emb, found) = embed_into_finite_metric(&inst, &metric, epsilon, eps_prime, &opts)?;
            log::info!(
                "stage=embed-finite nodes={} complete={}",
                found.nodes,
                found.complete
            );
            finish(&inst, &emb, 1.0 + eps_prime, &io, "embed-finite")?;
            Ok(if found.complete { EXIT_OK } else { EXIT_BUDGET })
        }
        Command::Oracle(o) => run_oracle(o),
    }
}

fn learn(command: LearnCommand) -> Result<i32> {
    match command {
        LearnCommand::Line { io } => {
            let inst = load_instance(&io.input)?;
            match line::learn_line(&inst)? {
                Some(emb) => {
                    finish(&inst, &emb, 1.0, &io, "learn-line")?;
                    Ok(EXIT_OK)
                }
                None => {
                    log::info!("stage=learn-line verdict=infeasible");
                    println!("no perfect line embedding exists");
                    Ok(EXIT_INFEASIBLE)
                }
            }
        }
        LearnCommand::Euclidean {
            args,
            d,
            grid_budget,
        } => {
            let inst = load_instance(&args.io.input)?;
            let cfg = EuclideanConfig {
                grid_points: grid_budget,
                search_nodes: args.enum_budget,
                restarts: args.restarts,
                ..EuclideanConfig::default()
            };
            let out = match args.zeta {
                Some(z) => learn_euclidean_imperfect(
                    &inst,
                    d,
                    args.epsilon,
                    args.eps_prime,
                    z,
                    args.seed,
                    &cfg,
                )?,
                None => learn_euclidean_perfect(
                    &inst,
                    d,
                    args.epsilon,
                    args.eps_prime,
                    args.seed,
                    &cfg,
                )?,
            };
            log::info!(
                "stage=learn-euclidean seed={} restart={} clusters={} cut_similar={} budget_limited={}",
                args.seed,
                out.restart,
                out.clusters.len(),
                out.cut_similar,
                out.budget_limited
            );
            write_stats(args.csv.as_ref(), &out.stats)?;
            finish(
                &inst,
                &out.embedding,
                1.0 + args.eps_prime,
                &args.io,
                "learn-euclidean",
            )?;
            Ok(if out.budget_limited {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
        LearnCommand::Tree { args, tree_budget } => {
            let inst = load_instance(&args.io.input)?;
            let cfg = TreeConfig {
                search_nodes: args.enum_budget,
                restarts: args.restarts,
                size_budget: tree_budget,
                ..TreeConfig::default()
            };
            let out = match args.zeta {
                Some(z) => {
                    learn_tree_imperfect(&inst, args.epsilon, args.eps_prime, z, args.seed, &cfg)?
                }
                None => learn_tree_perfect(&inst, args.epsilon, args.eps_prime, args.seed, &cfg)?,
            };
            log::info!(
                "stage=learn-tree seed={} restart={} clusters={} tree_vertices={} budget_limited={}",
                args.seed,
                out.restart,
                out.clusters.len(),
                out.tree.len(),
                out.budget_limited
            );
            write_stats(args.csv.as_ref(), &out.stats)?;
            finish(
                &inst,
                &out.embedding,
                1.0 + args.eps_prime,
                &args.io,
                "learn-tree",
            )?;
            Ok(if out.budget_limited {
                EXIT_BUDGET
            } else {
                EXIT_OK
            })
        }
    }
}

fn partition(command: PartitionCommand) -> Result<i32> {
    let doc: Value = match command {
        PartitionCommand::Lipschitz {
            input,
            output,
            delta,
            seed,
        } => {
            let inst = load_instance(&input)?;
            let p = sample_lipschitz_partition(&SimilarityMetric::new(&inst), delta, seed)?;
            let doc = json!({
                "kind": "lipschitz",
                "delta": p.delta,
                "beta_target": p.beta_target,
                "clusters": p.clusters.iter().map(|c| ids(&inst, c)).collect::<Vec<_>>(),
                "cut_similar_pairs": id_pairs(&inst, &p.cut_similar_pairs),
            });
            write_json(&output, &doc)?;
            doc
        }
        PartitionCommand::Annuli {
            input,
            output,
            delta,
            epsilon,
            seed,
        } => {
            let inst = load_instance(&input)?;
            let delta = delta.unwrap_or(8.0 * inst.u() / epsilon);
            let p = annuli_partition(&inst, delta, seed)?;
            let rings: std::collections::BTreeMap<String, i64> = p
                .members
                .iter()
                .zip(&p.ring_index)
                .map(|(&x, &i)| (inst.id(x).to_string(), i))
                .collect();
            let doc = json!({
                "kind": "annuli",
                "delta": p.delta,
                "shift": p.shift,
                "v_star": inst.id(p.v_star),
                "rings": rings,
                "clusters": p.clusters.iter().map(|c| ids(&inst, c)).collect::<Vec<_>>(),
                "cut_similar_pairs": id_pairs(&inst, &p.cut_similar_pairs),
            });
            write_json(&output, &doc)?;
            doc
        }
        PartitionCommand::WellLinked {
            input,
            output,
            alpha,
        } => {
            let inst = load_instance(&input)?;
            let p = well_linked_decomposition(&inst, alpha)?;
            let doc = json!({
                "kind": "well-linked",
                "alpha": p.alpha,
                "chi": p.chi,
                "removed_edges": id_pairs(&inst, &p.removed_edges),
                "components": p.components.iter().map(|c| ids(&inst, c)).collect::<Vec<_>>(),
                "achieved_expansion": p.achieved_expansion,
            });
            write_json(&output, &doc)?;
            doc
        }
    };
    let clusters = doc
        .get("clusters")
        .or_else(|| doc.get("components"))
        .and_then(Value::as_array)
        .map_or(0, Vec::len);
    log::info!("stage=partition kind={} clusters={clusters}", doc["kind"]);
    println!("{clusters} clusters");
    Ok(EXIT_OK)
}

fn run_oracle(command: OracleCommand) -> Result<i32> {
    match command {
        OracleCommand::Finite { io, host, c } => {
            let inst = load_instance(&io.input)?;
            let metric = load_metric(&host)?;
            let r = oracle::brute_force_finite(&inst, &metric, c)?;
            finish(&inst, &r.embedding, c, &io, "oracle-finite")?;
            Ok(EXIT_OK)
        }
        OracleCommand::Line { io } => {
            let inst = load_instance(&io.input)?;
            match oracle::brute_force_line_feasible(&inst)? {
                Some(emb) => {
                    finish(&inst, &emb, 1.0, &io, "oracle-line")?;
                    Ok(EXIT_OK)
                }
                None => {
                    println!("no perfect line embedding exists");
                    Ok(EXIT_INFEASIBLE)
                }
            }
        }
        OracleCommand::Tree {
            io,
            alpha,
            depth,
            arity,
            c,
        } => {
            let inst = load_instance(&io.input)?;
            let r = oracle::brute_force_tree_small(&inst, alpha, depth, arity, c)?;
            finish(&inst, &r.embedding, c, &io, "oracle-tree")?;
            Ok(EXIT_OK)
        }
    }
}
