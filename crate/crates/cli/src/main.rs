//! `lodeqd`: corpus conversion, level solving, MAP-Elites experiments and
//! heatmap reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lodeqd_core::experiment::{
    load_corpus, read_archive, run_experiment, select_subset, write_report, ExperimentConfig, GeneratorSource, Subset,
};
use lodeqd_core::level::{parse_level_any, training_set_json, LevelStats};
use lodeqd_core::qd::{bin_for, BinIndex};
use lodeqd_core::solver::{solve_level, Position, SolveResult, DEFAULT_BUDGET};
use lodeqd_core::Level;

const AFTER_HELP: &str = "\
Exit codes: 0 success (for `solve`: level beatable), 2 `solve` found the level unbeatable, 1 error.

`evolve` writes <out>/<label>/run_NN/{archive.jsonl,metrics.csv}, <out>/<label>/aggregate.csv and \
<out>/<label>/heatmaps/. `report` writes heatmap.csv, heatmap_ground{0..9}.csv and heatmap_ground{0..9}.pgm. \
Relative paths are resolved against --workspace.";

#[derive(Parser)]
#[command(name = "lodeqd", version, about = "Quality-diversity search over Lode Runner level generators", after_help = AFTER_HELP)]
struct Cli {
    /// Directory that relative paths are resolved against.
    #[arg(long, global = true, default_value = ".")]
    workspace: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a directory of VGLC text levels to a training-set JSON array.
    Convert(ConvertArgs),
    /// Solve one level (VGLC text or JSON grid) and print the result as JSON.
    Solve(SolveArgs),
    /// Run MAP-Elites experiments from a config file plus overrides.
    Evolve(EvolveArgs),
    /// Build fitness heatmaps from one or more archive JSONL files.
    Report(ReportArgs),
    /// Print tile statistics and archive bin of levels.
    Stats(StatsArgs),
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    vglc_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Keep the first N levels in corpus order.
    #[arg(long, conflicts_with = "ids")]
    first: Option<usize>,
    /// Keep these 1-based level ids, in the given order.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    ids: Option<Vec<usize>>,
}

#[derive(Args)]
struct SolveArgs {
    level: PathBuf,
    /// First latent component, which seeds the spawn choice.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    latent0: f64,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct EvolveArgs {
    /// TOML or JSON experiment config (by extension; anything but .json is TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    runs: Option<usize>,
    #[arg(long)]
    evals: Option<usize>,
    #[arg(long)]
    init_size: Option<usize>,
    #[arg(long)]
    log_every: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    /// Master seed; run r uses seed + r.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replace the configured generators with the stub generator.
    #[arg(long, conflicts_with_all = ["manifest", "blob"])]
    stub: bool,
    #[arg(long, requires = "blob")]
    manifest: Option<PathBuf>,
    #[arg(long, requires = "manifest")]
    blob: Option<PathBuf>,
    /// Label for --stub or --manifest/--blob.
    #[arg(long)]
    label: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    archives: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(required = true)]
    levels: Vec<PathBuf>,
}

#[derive(Serialize)]
struct SolveOutput {
    spawn: Option<Position>,
    #[serde(flatten)]
    result: SolveResult,
    action_count: i64,
}

#[derive(Serialize)]
struct StatsOutput {
    file: PathBuf,
    #[serde(flatten)]
    stats: LevelStats,
    bin: BinIndex,
    histogram: [usize; 7],
}

fn read_level(path: &Path) -> Result<Level> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_level_any(&text).with_context(|| format!("parsing {}", path.display()))
}

fn convert(ws: &Path, args: ConvertArgs) -> Result<ExitCode> {
    let subset = match (args.first, args.ids) {
        (Some(n), None) => Subset::First(n),
        (None, Some(ids)) => Subset::Ids(ids),
        (None, None) => bail!("one of --first or --ids is required"),
        (Some(_), Some(_)) => unreachable!("clap rejects --first with --ids"),
    };
    let corpus = load_corpus(ws.join(&args.vglc_dir))?;
    let chosen = select_subset(&corpus, &subset)?;
    let levels: Vec<Level> = chosen.iter().map(|c| c.level.clone()).collect();
    let out = ws.join(&args.out);
    if let Some(parent) = out.parent() {
        fs::create_dir_all(parent)?;
    }
    fs::write(&out, training_set_json(&levels)).with_context(|| format!("writing {}", out.display()))?;
    eprintln!("wrote {} levels to {}", levels.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn solve(ws: &Path, args: SolveArgs) -> Result<ExitCode> {
    let level = read_level(&ws.join(&args.level))?;
    let (spawn, result) = solve_level(&level, args.latent0, args.budget);
    let beatable = result.beatable;
    let action_count = result.action_count();
    println!("{}", serde_json::to_string(&SolveOutput { spawn, result, action_count })?);
    Ok(if beatable { ExitCode::SUCCESS } else { ExitCode::from(2) })
}

fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let config = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    } else {
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    Ok(config)
}

fn evolve(ws: &Path, args: EvolveArgs) -> Result<ExitCode> {
    let mut config = match &args.config {
        Some(path) => load_config(&ws.join(path))?,
        None => ExperimentConfig::default(),
    };
    if let Some(v) = args.runs {
        config.runs = v;
    }
    if let Some(v) = args.evals {
        config.engine.total_evals = v;
    }
    if let Some(v) = args.init_size {
        config.engine.init_size = v;
    }
    if let Some(v) = args.log_every {
        config.engine.log_every = v;
    }
    if let Some(v) = args.batch_size {
        config.engine.batch_size = v;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.out {
        config.output_dir = v;
    }
    if args.stub {
        config.generators = vec![GeneratorSource::Stub { label: args.label.unwrap_or_else(|| "stub".into()) }];
    } else if let (Some(manifest), Some(blob)) = (args.manifest, args.blob) {
        let label = args.label.unwrap_or_else(|| "gan".into());
        config.generators = vec![GeneratorSource::Weights { label, manifest, blob }];
    }
    let summary = run_experiment(&config, ws)?;
    for run in &summary.runs {
        let m = run.final_metrics;
        eprintln!(
            "{} run {:02} seed {}: {} evals, {} occupied, {} beatable ({:.1}%)",
            run.label,
            run.run,
            run.seed,
            run.evaluations,
            m.occupied,
            m.beatable,
            100.0 * m.percent_beatable
        );
    }
    println!("{}", serde_json::to_string_pretty(&summary)?);
    Ok(ExitCode::SUCCESS)
}

fn report(ws: &Path, args: ReportArgs) -> Result<ExitCode> {
    let archives = args
        .archives
        .iter()
        .map(|p| read_archive(&ws.join(p)).with_context(|| format!("loading archive {}", p.display())))
        .collect::<Result<Vec<_>>>()?;
    for path in write_report(&archives, &ws.join(&args.out))? {
        println!("{}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn stats(ws: &Path, args: StatsArgs) -> Result<ExitCode> {
    for file in args.levels {
        let level = read_level(&ws.join(&file))?;
        let stats = level.stats();
        let out = StatsOutput { file, bin: bin_for(&stats), stats, histogram: level.histogram() };
        println!("{}", serde_json::to_string(&out)?);
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ws = cli.workspace.as_path();
    let outcome = match cli.command {
        Command::Convert(a) => convert(ws, a),
        Command::Solve(a) => solve(ws, a),
        Command::Evolve(a) => evolve(ws, a),
        Command::Report(a) => report(ws, a),
        Command::Stats(a) => stats(ws, a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        ExitCode::FAILURE
    })
}
