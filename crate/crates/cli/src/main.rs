mod experiment;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use emergent_spanner::export::{verify_graph, GraphFile};
use emergent_spanner::instance::{generate, random_geometric_matrix, Distribution};
use emergent_spanner::metric::Metric;
use emergent_spanner::order::{OrderStrategy, PairOrder};

use experiment::{metric_label, render_verify, run_instance, write_json, InstanceInfo, RunConfig, Summary};

#[derive(Parser)]
#[command(name = "emspan", version, about = "Uncoordinated spanners, greedy WSPDs and the agent simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated point set as CSV.
    Generate(GenerateArgs),
    /// Build, simulate and verify; write the summary and all exports.
    Run(RunArgs),
    /// Re-verify an exported graph against a point or matrix file.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum MetricArg {
    /// Generated coordinates under `--dist`.
    Euclidean,
    /// Shortest-path metric of a random geometric graph in the unit square.
    Graph,
}

#[derive(Args, Clone)]
struct GeneratorArgs {
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    dim: usize,
    /// uniform, grid, clustered or clustered:<k>:<sep>
    #[arg(long, default_value = "uniform")]
    dist: Distribution,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GeneratorArgs,
    /// Output file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Separation {
    /// Separation parameter, s > 1.
    #[arg(long)]
    s: Option<f64>,
    /// Target stretch 1 + ε, converted with s = 1 + 2/ε.
    #[arg(long)]
    epsilon: Option<f64>,
}

fn separation(s: Option<f64>, epsilon: Option<f64>) -> Result<Option<f64>> {
    match (s, epsilon) {
        (Some(s), None) => Ok(Some(s)),
        (None, Some(e)) if e > 0.0 && e.is_finite() => Ok(Some(1.0 + 2.0 / e)),
        (None, Some(e)) => bail!("epsilon must be positive, got {e}"),
        (None, None) => Ok(None),
        (Some(_), Some(_)) => bail!("give either --s or --epsilon, not both"),
    }
}

#[derive(Args)]
struct InputArgs {
    /// Point file (one point per line).
    #[arg(long, conflicts_with = "matrix")]
    points: Option<PathBuf>,
    /// Distance matrix file.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Skip the O(n^3) triangle-inequality check on matrix files.
    #[arg(long)]
    skip_triangle_check: bool,
}

impl InputArgs {
    fn load(&self) -> Result<Option<(Metric, String)>> {
        if let Some(p) = &self.points {
            let m = Metric::load_points(p).with_context(|| format!("reading {}", p.display()))?;
            return Ok(Some((m, format!("points:{}", p.display()))));
        }
        if let Some(p) = &self.matrix {
            let m = Metric::load_matrix(p, !self.skip_triangle_check)
                .with_context(|| format!("reading {}", p.display()))?;
            return Ok(Some((m, format!("matrix:{}", p.display()))));
        }
        Ok(None)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    gen: GeneratorArgs,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value_t = MetricArg::Euclidean)]
    metric: MetricArg,
    #[command(flatten)]
    sep: Separation,
    /// random, lex, rev-lex, dec or inc
    #[arg(long, default_value = "random")]
    order: OrderStrategy,
    /// Seed of the random order (defaults to --seed).
    #[arg(long)]
    order_seed: Option<u64>,
    /// Comma-separated list of n; one summary row per entry.
    #[arg(long, value_delimiter = ',')]
    sweep: Option<Vec<usize>>,
    /// Skip all-pairs local routing.
    #[arg(long)]
    skip_routes: bool,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Graph JSON written by `run`.
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// Separation parameter (defaults to the one in the graph file).
    #[arg(long, conflicts_with = "epsilon")]
    s: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Also write the report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => cmd_generate(a).map(|()| true),
        Command::Run(a) => cmd_run(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<()> {
    let g = &a.gen;
    if g.n == 0 {
        bail!("--n must be positive");
    }
    let m = generate(g.dist, g.n, g.dim, g.seed)?;
    let mut buf = Vec::new();
    m.write_csv(&mut buf)?;
    match &a.out {
        Some(p) => fs::write(p, buf).with_context(|| format!("writing {}", p.display()))?,
        None => std::io::stdout().write_all(&buf)?,
    }
    Ok(())
}

fn generated(gen: &GeneratorArgs, metric: MetricArg, n: usize) -> Result<(Metric, InstanceInfo)> {
    let (m, source, dim) = match metric {
        MetricArg::Euclidean => (generate(gen.dist, n, gen.dim, gen.seed)?, gen.dist.to_string(), Some(gen.dim)),
        MetricArg::Graph => (random_geometric_matrix(n, gen.seed)?, "random-geometric-graph".to_string(), None),
    };
    let info = InstanceInfo {
        source,
        metric: metric_label(&m),
        n,
        dim,
        seed: Some(gen.seed),
    };
    Ok((m, info))
}

#[derive(Serialize)]
struct SweepSummary {
    rows: Vec<Summary>,
    ok: bool,
}

fn cmd_run(a: RunArgs) -> Result<bool> {
    let s = separation(a.sep.s, a.sep.epsilon)?.expect("clap requires one");
    let cfg = RunConfig {
        s,
        epsilon: a.sep.epsilon,
        order: PairOrder {
            strategy: a.order.clone(),
            seed: a.order_seed.unwrap_or(a.gen.seed),
        },
        routes: !a.skip_routes,
    };
    if let Some(ns) = &a.sweep {
        if a.input.points.is_some() || a.input.matrix.is_some() {
            bail!("--sweep needs a generated instance, not an input file");
        }
        fs::create_dir_all(&a.out)?;
        let mut rows = Vec::new();
        for &n in ns {
            let (m, info) = generated(&a.gen, a.metric, n)?;
            let summary = run_instance(&m, info, &cfg, &a.out.join(format!("n{n}")))?;
            report(&summary);
            rows.push(summary);
        }
        let ok = rows.iter().all(|r| r.ok);
        write_json(&a.out.join("summary.json"), &SweepSummary { rows, ok })?;
        return Ok(ok);
    }
    let (m, info) = match a.input.load()? {
        Some((m, source)) => {
            let info = InstanceInfo {
                source,
                metric: metric_label(&m),
                n: m.len(),
                dim: m.dim_hint(),
                seed: None,
            };
            (m, info)
        }
        None => generated(&a.gen, a.metric, a.gen.n)?,
    };
    let summary = run_instance(&m, info, &cfg, &a.out)?;
    report(&summary);
    Ok(summary.ok)
}

fn report(s: &Summary) {
    let hops = s.max_hops.map_or("-".to_string(), |h| h.to_string());
    eprintln!(
        "n={} s={} edges={} messages={} max_store={} max_stretch={:.4} max_hops={hops} {}",
        s.instance.n,
        s.s,
        s.edges,
        s.messages,
        s.max_store,
        s.max_stretch,
        if s.ok { "ok" } else { "INVARIANT FAILURE" }
    );
}

fn cmd_verify(a: VerifyArgs) -> Result<bool> {
    let Some((m, _)) = a.input.load()? else {
        bail!("give --points or --matrix");
    };
    let text = fs::read_to_string(&a.graph).with_context(|| format!("reading {}", a.graph.display()))?;
    let file: GraphFile = serde_json::from_str(&text).context("graph file does not match the schema")?;
    let s = separation(a.s, a.epsilon)?.unwrap_or(file.s);
    let report = verify_graph(&m, &file, s)?;
    let rendered = render_verify(&report)?;
    print!("{rendered}");
    if let Some(p) = &a.out {
        fs::write(p, &rendered).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(report.is_clean())
}
