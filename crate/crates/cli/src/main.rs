//! `bidensity`: detect, score and verify communities in bipartite networks.

mod manifest;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bidensity::analysis::{self, SweepGrid};
use bidensity::bilpa::{self, BilpaConfig, ResidualTie};
use bidensity::exact::{self, SolveOptions};
use bidensity::generators::GeneratorSpec;
use bidensity::{data, output, quality, BipartiteGraph, Execution, Partition, Side};

use manifest::{Bundle, InputRef};

#[derive(Parser)]
#[command(
    name = "bidensity",
    version,
    about = "Community detection in bipartite networks by partition density"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run BiLPA and write memberships, quality, D(t) trace and matrices.
    Detect(DetectArgs),
    /// Find the density-optimal partition by exhaustive enumeration.
    Exact(ExactArgs),
    /// Evaluate and cross-check the ring and four-biclique closed forms.
    Analyze(AnalyzeArgs),
    /// Write a benchmark graph and its planted partition.
    Generate(GenerateArgs),
    /// Reorder the biadjacency matrix by community.
    Rearrange(RearrangeArgs),
    /// Score a membership file against a graph.
    Score(ScoreArgs),
}

#[derive(Args, Clone)]
#[group(required = true, multiple = false)]
struct InputArgs {
    /// Edge list: `u_id v_id [weight]` per line.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator spec such as `ring:2,2,4`, `four:2,5`, `chain:3x4,4x5`,
    /// `biclique:3,3` or `random:6,6,0.5,1`.
    #[arg(long = "gen")]
    generator: Option<String>,
    /// Bundled dataset.
    #[arg(long, value_enum)]
    dataset: Option<Dataset>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Dataset {
    SouthernWomen,
}

#[derive(Clone, Copy, ValueEnum)]
enum TieArg {
    Largest,
    Smallest,
}

#[derive(Args)]
struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1.0)]
    theta: f64,
    #[arg(long, default_value_t = 100)]
    iter_max: usize,
    /// Settle residual ties by a seeded draw.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum, default_value = "largest")]
    tie: TieArg,
    #[arg(long)]
    sequential: bool,
    #[arg(long, default_value = "bidensity-out")]
    out: PathBuf,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Community count.
    #[arg(long, conflicts_with = "k_max", required_unless_present = "k_max")]
    k: Option<usize>,
    /// Try every community count up to this one.
    #[arg(long)]
    k_max: Option<usize>,
    /// Labels allowed per node; above 1 allows overlap (needs --k).
    #[arg(long, default_value_t = 1, conflicts_with = "k_max")]
    max_memberships: usize,
    #[arg(long, env = "BIDENSITY_BUDGET", default_value_t = exact::DEFAULT_BUDGET)]
    budget: u64,
    /// Skip branches that cannot beat the incumbent.
    #[arg(long)]
    prune: bool,
    /// Also run BiLPA (theta 1) and report both densities.
    #[arg(long)]
    compare_bilpa: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5])]
    m: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [2, 3, 4, 5])]
    n: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    s_min: usize,
    #[arg(long, default_value_t = 40)]
    s_max: usize,
    /// Analyse the four-biclique network `M,N` instead of the ring sweep.
    #[arg(long, value_name = "M,N")]
    four_biclique: Vec<String>,
    #[arg(long, env = "BIDENSITY_TOLERANCE", default_value_t = analysis::DEFAULT_TOLERANCE)]
    tolerance: f64,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    spec: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RearrangeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    membership: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    membership: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

struct Loaded {
    graph: BipartiteGraph,
    truth: Option<Partition>,
    reference: InputRef,
}

fn load(args: &InputArgs) -> Result<Loaded> {
    if let Some(path) = &args.input {
        let graph = bidensity::graph::read_edge_list(path)?;
        return Ok(Loaded {
            graph,
            truth: None,
            reference: InputRef::Path(path.display().to_string()),
        });
    }
    if let Some(spec) = &args.generator {
        let spec: GeneratorSpec = spec.parse()?;
        let built = spec.build()?;
        return Ok(Loaded {
            graph: built.graph,
            truth: built.truth,
            reference: InputRef::Generator(spec.to_string()),
        });
    }
    match args.dataset {
        Some(Dataset::SouthernWomen) => Ok(Loaded {
            graph: data::southern_women(),
            truth: None,
            reference: InputRef::Dataset("southern-women".into()),
        }),
        None => bail!("one of --input, --gen or --dataset is required"),
    }
}

fn read_membership(g: &BipartiteGraph, path: &Path) -> Result<Partition> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(output::parse_membership(g, &text)?)
}

fn write_matrices(bundle: &mut Bundle, g: &BipartiteGraph, part: &Partition) -> Result<()> {
    let order = bilpa::rearrange_matrix(g, part)?;
    bundle.write("matrix.txt", &output::matrix_text(g, &order))?;
    bundle.write("matrix.pgm", &output::matrix_pgm(g, &order))?;
    Ok(())
}

fn write_scores(bundle: &mut Bundle, report: &quality::QualityReport) -> Result<()> {
    bundle.write("quality.txt", &report.to_key_value())?;
    bundle.write("communities.tsv", &report.to_table())?;
    Ok(())
}

fn overlap_ids(g: &BipartiteGraph, part: &Partition) -> Vec<String> {
    part.overlapping_nodes()
        .into_iter()
        .map(|(side, i)| g.id(side, i).to_string())
        .collect()
}

fn detect(args: DetectArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let g = &loaded.graph;
    let cfg = BilpaConfig {
        iter_max: args.iter_max,
        theta: args.theta,
        tie_shuffle_seed: args.seed,
        residual_tie: match args.tie {
            TieArg::Largest => ResidualTie::Largest,
            TieArg::Smallest => ResidualTie::Smallest,
        },
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        },
    };
    let out = bilpa::run(g, &cfg)?;

    let mut bundle = Bundle::create(&args.out, "detect", loaded.reference)?;
    bundle.config("iter_max", cfg.iter_max);
    bundle.config("theta", cfg.theta);
    bundle.config("seed", cfg.tie_shuffle_seed);
    bundle.config("tie", format!("{:?}", cfg.residual_tie).to_lowercase());
    bundle.write("membership.txt", &output::membership_to_string(g, &out.partition))?;
    write_scores(&mut bundle, &out.report)?;
    bundle.write("trace.tsv", &output::trace_to_string(&out.trace))?;
    write_matrices(&mut bundle, g, &out.partition)?;
    bundle.finish()?;

    let overlaps = overlap_ids(g, &out.partition);
    println!("communities\t{}", out.partition.community_count());
    println!("partition_density\t{}", out.report.partition_density);
    println!("sweeps\t{}", out.trace.sweeps_run);
    println!("overlapping\t{}", overlaps.len());
    if !overlaps.is_empty() {
        println!("overlapping_nodes\t{}", overlaps.join(","));
    }
    if let Some(truth) = &loaded.truth {
        let matches = truth.canonical_communities() == out.partition.canonical_communities();
        println!("matches_planted\t{matches}");
    }
    Ok(())
}

fn exact_cmd(args: ExactArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let g = &loaded.graph;
    let opts = SolveOptions {
        budget: args.budget,
        prune: args.prune,
        execution: Execution::default(),
    };
    let (k, res) = match (args.k, args.k_max) {
        (Some(k), _) if args.max_memberships > 1 => (k, exact::solve_model2_with(g, k, args.max_memberships, &opts)?),
        (Some(k), _) => (k, exact::solve_model1_with(g, k, &opts)?),
        (None, Some(k_max)) => exact::best_over_k_with(g, k_max, &opts)?,
        (None, None) => bail!("one of --k or --k-max is required"),
    };
    println!("k\t{k}");
    println!("partition_density\t{}", res.best_d);
    println!("optima\t{}", res.optima_count);
    println!("evaluated\t{}", res.evaluated);
    println!("communities\t{}", res.best_partition.community_count());
    let bilpa_out = if args.compare_bilpa {
        let b = bilpa::run(g, &BilpaConfig::default())?;
        println!("bilpa_partition_density\t{}", b.report.partition_density);
        println!("bilpa_communities\t{}", b.partition.community_count());
        Some(b)
    } else {
        None
    };

    if let Some(dir) = &args.out {
        let mut bundle = Bundle::create(dir, "exact", loaded.reference)?;
        bundle.config("k", k);
        bundle.config("k_max", args.k_max);
        bundle.config("max_memberships", args.max_memberships);
        bundle.config("budget", args.budget);
        bundle.config("prune", args.prune);
        bundle.write("membership.txt", &output::membership_to_string(g, &res.best_partition))?;
        write_scores(&mut bundle, &quality::partition_density(g, &res.best_partition)?)?;
        if let Some(b) = bilpa_out {
            bundle.write("bilpa_membership.txt", &output::membership_to_string(g, &b.partition))?;
        }
        bundle.finish()?;
    }
    Ok(())
}

fn parse_pair(text: &str) -> Result<(usize, usize)> {
    let (a, b) = text
        .split_once(',')
        .with_context(|| format!("expected M,N, got {text:?}"))?;
    Ok((a.trim().parse()?, b.trim().parse()?))
}

fn analyze(args: AnalyzeArgs) -> Result<()> {
    let csv = if args.four_biclique.is_empty() {
        let grid = SweepGrid {
            m: args.m,
            n: args.n,
            s: (args.s_min..=args.s_max).collect(),
        };
        let rows = analysis::sweep(&grid, args.tolerance, Execution::default())?;
        analysis::sweep_csv(&rows)
    } else {
        let mut csv = format!("{}\n", analysis::FOUR_CSV_HEADER);
        for pair in &args.four_biclique {
            let (m, n) = parse_pair(pair)?;
            let forms = analysis::four_biclique_forms(m, n)?;
            let check = analysis::cross_check_four_biclique(m, n, args.tolerance)?;
            csv.push_str(&analysis::four_biclique_csv_row(&forms, &check));
            csv.push('\n');
        }
        csv
    };
    match &args.out {
        Some(path) => std::fs::write(path, csv).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(csv.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(e.into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> Result<()> {
    let spec: GeneratorSpec = args.spec.parse()?;
    let built = spec.build()?;
    let mut bundle = Bundle::create(&args.out, "generate", InputRef::Generator(spec.to_string()))?;
    bundle.write("edges.tsv", &built.graph.to_edge_list_string())?;
    if let Some(truth) = &built.truth {
        bundle.write("truth.txt", &output::membership_to_string(&built.graph, truth))?;
    }
    bundle.finish()?;
    println!("u_nodes\t{}", built.graph.side_len(Side::U));
    println!("v_nodes\t{}", built.graph.side_len(Side::V));
    println!("edges\t{}", built.graph.edge_count());
    Ok(())
}

fn rearrange(args: RearrangeArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let part = read_membership(&loaded.graph, &args.membership)?;
    let mut bundle = Bundle::create(&args.out, "rearrange", loaded.reference)?;
    bundle.config("membership", args.membership.display().to_string());
    write_matrices(&mut bundle, &loaded.graph, &part)?;
    bundle.finish()?;
    Ok(())
}

fn score(args: ScoreArgs) -> Result<()> {
    let loaded = load(&args.input)?;
    let part = read_membership(&loaded.graph, &args.membership)?;
    let report = quality::partition_density(&loaded.graph, &part)?;
    print!("{}", report.to_key_value());
    if let Some(dir) = &args.out {
        let mut bundle = Bundle::create(dir, "score", loaded.reference)?;
        bundle.config("membership", args.membership.display().to_string());
        write_scores(&mut bundle, &report)?;
        bundle.finish()?;
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<bidensity::Error>() {
        Some(bidensity::Error::BudgetExceeded { .. }) => 2,
        Some(bidensity::Error::MismatchBeyondTolerance { .. }) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Detect(a) => detect(a),
        Command::Exact(a) => exact_cmd(a),
        Command::Analyze(a) => analyze(a),
        Command::Generate(a) => generate(a),
        Command::Rearrange(a) => rearrange(a),
        Command::Score(a) => score(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
