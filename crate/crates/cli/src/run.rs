//! `run`: execute GA and baseline schedulers over built-in presets, generated
//! classes, or instance files, then emit CSV rows and a per-class summary
//! table of mean best fitness.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use mcsched::baselines::{greedy_min_etc, random_search};
use mcsched::benchmark::{
    self, all_classes, BenchmarkError, HeterogeneityRanges, InstanceSpec, DEFAULT_EDGE_PROB,
};
use mcsched::fitness::evaluate;
use mcsched::ga::{evolve, GaConfig};
use mcsched::model::{Chromosome, CloudId, WorkloadInstance};

use crate::error::CliError;

#[derive(clap::Args)]
pub struct RunArgs {
    /// Built-in instance set: demo (9-task workload), small (512x16), or
    /// large (1024x32)
    #[arg(long, conflicts_with = "manifest")]
    pub preset: Option<String>,
    /// Manifest of a generated instance to load instead of a preset
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// ETC file (defaults to the manifest path with extension .etc)
    #[arg(long, requires = "manifest")]
    pub etc: Option<PathBuf>,
    /// Dependency file (defaults to the manifest path with extension .dep)
    #[arg(long, requires = "manifest")]
    pub dep: Option<PathBuf>,
    /// Comma-separated class filter for the small/large presets
    /// (default: all twelve classes)
    #[arg(long)]
    pub classes: Option<String>,
    /// Applications per generated instance
    #[arg(long)]
    pub apps: Option<usize>,
    /// Seed for instance generation
    #[arg(long)]
    pub instance_seed: Option<u64>,
    /// Probability of each possible within-application edge
    #[arg(long)]
    pub edge_prob: Option<f64>,
    /// Comma-separated optimizer seeds; one run per seed
    #[arg(long)]
    pub seeds: Option<String>,
    /// Comma-separated algorithms: ga, random, greedy, fixed
    /// (default: "ga,fixed" for the demo preset, "ga" otherwise)
    #[arg(long)]
    pub algos: Option<String>,
    /// GA population size
    #[arg(long)]
    pub population: Option<usize>,
    /// GA generation count
    #[arg(long)]
    pub generations: Option<usize>,
    /// GA crossover probability
    #[arg(long)]
    pub crossover_prob: Option<f64>,
    /// GA mutation probability
    #[arg(long)]
    pub mutation_prob: Option<f64>,
    /// GA elite count
    #[arg(long)]
    pub elites: Option<usize>,
    /// Evaluation budget for random search
    /// (default: population * generations)
    #[arg(long)]
    pub budget: Option<usize>,
    /// Run the (instance, seed, algorithm) jobs on a thread pool
    #[arg(long)]
    pub parallel: bool,
    /// Write CSV rows to this file instead of stdout
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// key=value file of defaults for the flags above; explicit flags win
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override the upper bound of the high task-heterogeneity draw
    #[arg(long)]
    pub task_range_hi: Option<f64>,
    /// Override the upper bound of the low task-heterogeneity draw
    #[arg(long)]
    pub task_range_lo: Option<f64>,
    /// Override the upper bound of the high machine-heterogeneity draw
    #[arg(long)]
    pub machine_range_hi: Option<f64>,
    /// Override the upper bound of the low machine-heterogeneity draw
    #[arg(long)]
    pub machine_range_lo: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Algo {
    Ga,
    Random,
    Greedy,
    Fixed,
}

impl Algo {
    fn name(self) -> &'static str {
        match self {
            Algo::Ga => "ga",
            Algo::Random => "random",
            Algo::Greedy => "greedy",
            Algo::Fixed => "fixed",
        }
    }

    fn parse(token: &str) -> Result<Self, CliError> {
        match token {
            "ga" => Ok(Algo::Ga),
            "random" => Ok(Algo::Random),
            "greedy" => Ok(Algo::Greedy),
            "fixed" => Ok(Algo::Fixed),
            other => Err(CliError::Usage(format!(
                "unknown algorithm {other:?} (expected ga, random, greedy, or fixed)"
            ))),
        }
    }
}

/// Everything `run` needs after merging defaults, the config file, and flags.
struct Settings {
    ga: GaConfig,
    seeds: Vec<u64>,
    algos: Option<Vec<Algo>>,
    budget: Option<usize>,
    apps: usize,
    instance_seed: u64,
    edge_prob: f64,
    ranges: HeterogeneityRanges,
    parallel: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            ga: GaConfig::default(),
            seeds: vec![0],
            algos: None,
            budget: None,
            apps: 20,
            instance_seed: 1,
            edge_prob: DEFAULT_EDGE_PROB,
            ranges: HeterogeneityRanges::default(),
            parallel: false,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value {value:?} for {key}")))
}

fn parse_seed_list(text: &str) -> Result<Vec<u64>, CliError> {
    let seeds: Vec<u64> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| parse_value("seeds", t))
        .collect::<Result<_, _>>()?;
    if seeds.is_empty() {
        return Err(CliError::Usage("need at least one seed".into()));
    }
    Ok(seeds)
}

fn parse_algo_list(text: &str) -> Result<Vec<Algo>, CliError> {
    let algos: Vec<Algo> = text
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(Algo::parse)
        .collect::<Result<_, _>>()?;
    if algos.is_empty() {
        return Err(CliError::Usage("need at least one algorithm".into()));
    }
    Ok(algos)
}

fn apply_config_file(settings: &mut Settings, path: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(path)?;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {line:?} is not key=value")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "population_size" => settings.ga.population_size = parse_value(key, value)?,
            "generations" => settings.ga.generations = parse_value(key, value)?,
            "crossover_prob" => settings.ga.crossover_prob = parse_value(key, value)?,
            "mutation_prob" => settings.ga.mutation_prob = parse_value(key, value)?,
            "elite_count" => settings.ga.elite_count = parse_value(key, value)?,
            "budget" => settings.budget = Some(parse_value(key, value)?),
            "seeds" => settings.seeds = parse_seed_list(value)?,
            "algos" => settings.algos = Some(parse_algo_list(value)?),
            "apps" => settings.apps = parse_value(key, value)?,
            "instance_seed" => settings.instance_seed = parse_value(key, value)?,
            "edge_prob" => settings.edge_prob = parse_value(key, value)?,
            "parallel" => settings.parallel = parse_value(key, value)?,
            "task_range_hi" => settings.ranges.task_hi = parse_value(key, value)?,
            "task_range_lo" => settings.ranges.task_lo = parse_value(key, value)?,
            "machine_range_hi" => settings.ranges.machine_hi = parse_value(key, value)?,
            "machine_range_lo" => settings.ranges.machine_lo = parse_value(key, value)?,
            other => return Err(CliError::Usage(format!("unknown config key {other:?}"))),
        }
    }
    Ok(())
}

fn apply_flags(settings: &mut Settings, args: &RunArgs) -> Result<(), CliError> {
    if let Some(v) = args.population {
        settings.ga.population_size = v;
    }
    if let Some(v) = args.generations {
        settings.ga.generations = v;
    }
    if let Some(v) = args.crossover_prob {
        settings.ga.crossover_prob = v;
    }
    if let Some(v) = args.mutation_prob {
        settings.ga.mutation_prob = v;
    }
    if let Some(v) = args.elites {
        settings.ga.elite_count = v;
    }
    if let Some(v) = args.budget {
        settings.budget = Some(v);
    }
    if let Some(text) = &args.seeds {
        settings.seeds = parse_seed_list(text)?;
    }
    if let Some(text) = &args.algos {
        settings.algos = Some(parse_algo_list(text)?);
    }
    if let Some(v) = args.apps {
        settings.apps = v;
    }
    if let Some(v) = args.instance_seed {
        settings.instance_seed = v;
    }
    if let Some(v) = args.edge_prob {
        settings.edge_prob = v;
    }
    if args.parallel {
        settings.parallel = true;
    }
    if let Some(v) = args.task_range_hi {
        settings.ranges.task_hi = v;
    }
    if let Some(v) = args.task_range_lo {
        settings.ranges.task_lo = v;
    }
    if let Some(v) = args.machine_range_hi {
        settings.ranges.machine_hi = v;
    }
    if let Some(v) = args.machine_range_lo {
        settings.ranges.machine_lo = v;
    }
    Ok(())
}

/// One instance the experiment runs against, plus its report labels.
struct Bench {
    class: String,
    dataset: String,
    apps: usize,
    instance: WorkloadInstance,
}

/// Loads the ETC/dependency files described by a manifest; companion files
/// default to the manifest path with the extension swapped.
pub fn load_from_manifest(
    manifest: &Path,
    etc_path: Option<&Path>,
    dep_path: Option<&Path>,
) -> Result<(InstanceSpec, WorkloadInstance), CliError> {
    let spec = benchmark::parse_manifest(manifest)?;
    let etc_path = etc_path.map(Path::to_path_buf).unwrap_or_else(|| manifest.with_extension("etc"));
    let dep_path = dep_path.map(Path::to_path_buf).unwrap_or_else(|| manifest.with_extension("dep"));
    let etc = benchmark::parse_etc_file(&etc_path, spec.tasks, spec.clouds)?;
    let dag = benchmark::parse_dep_file(&dep_path, spec.tasks)?;
    let app_of = benchmark::contiguous_app_map(spec.tasks, spec.applications);
    let instance = WorkloadInstance::new(etc, dag, app_of)?;
    Ok((spec, instance))
}

fn spec_usage(err: BenchmarkError) -> CliError {
    match err {
        BenchmarkError::UnknownClass(_) | BenchmarkError::InvalidSpec(_) => {
            CliError::Usage(err.to_string())
        }
        other => other.into(),
    }
}

fn build_benches(args: &RunArgs, settings: &Settings) -> Result<Vec<Bench>, CliError> {
    if let Some(manifest) = &args.manifest {
        let (spec, instance) =
            load_from_manifest(manifest, args.etc.as_deref(), args.dep.as_deref())?;
        return Ok(vec![Bench {
            class: spec.class.name(),
            dataset: spec.dataset(),
            apps: spec.applications,
            instance,
        }]);
    }
    let preset = args
        .preset
        .as_deref()
        .ok_or_else(|| CliError::Usage("choose an instance source: --preset or --manifest".into()))?;
    if preset == "demo" {
        let instance = benchmark::demo_nine_task();
        return Ok(vec![Bench {
            class: "demo".into(),
            dataset: format!("{}x{}", instance.tasks(), instance.clouds()),
            apps: instance.applications(),
            instance,
        }]);
    }
    let (tasks, clouds) = match preset {
        "small" => (512, 16),
        "large" => (1024, 32),
        other => {
            return Err(CliError::Usage(format!(
                "unknown preset {other:?} (expected demo, small, or large)"
            )))
        }
    };
    let classes = match &args.classes {
        Some(text) => text
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| t.parse().map_err(spec_usage))
            .collect::<Result<Vec<_>, _>>()?,
        None => all_classes(),
    };
    if classes.is_empty() {
        return Err(CliError::Usage("need at least one class".into()));
    }
    let mut benches = Vec::with_capacity(classes.len());
    for class in classes {
        let mut spec = InstanceSpec::new(class, tasks, clouds, settings.apps, settings.instance_seed);
        spec.edge_prob = settings.edge_prob;
        spec.ranges = settings.ranges;
        spec.validate().map_err(spec_usage)?;
        benches.push(Bench {
            class: class.name(),
            dataset: spec.dataset(),
            apps: spec.applications,
            instance: benchmark::generate_instance(&spec)?,
        });
    }
    Ok(benches)
}

/// One CSV row; the schema is
/// `class,dataset,apps,algo,seed,best_fitness_sum,best_makespan_max,generations,evaluations,runtime_ms`.
struct Row {
    class: String,
    dataset: String,
    apps: usize,
    algo: &'static str,
    seed: u64,
    best_fitness_sum: f64,
    best_makespan_max: f64,
    generations: usize,
    evaluations: usize,
    runtime_ms: u128,
}

pub const CSV_HEADER: &str =
    "class,dataset,apps,algo,seed,best_fitness_sum,best_makespan_max,generations,evaluations,runtime_ms";

fn execute(bench: &Bench, algo: Algo, seed: u64, settings: &Settings) -> Result<Row, CliError> {
    let started = Instant::now();
    let instance = &bench.instance;
    let (best, fitness, generations, evaluations) = match algo {
        Algo::Ga => {
            let config = GaConfig { seed, ..settings.ga.clone() };
            let result = evolve(instance, &config)?;
            if config.elite_count >= 1 && result.trace.windows(2).any(|w| w[1] > w[0]) {
                return Err(CliError::Internal(
                    "elitism invariant violated: best fitness regressed between generations"
                        .into(),
                ));
            }
            (result.best, result.best_fitness, config.generations, result.evaluations)
        }
        Algo::Random => {
            let budget = settings
                .budget
                .unwrap_or(settings.ga.population_size * settings.ga.generations);
            let result = random_search(instance, budget, seed)?;
            (result.best, result.best_fitness, 0, result.evaluations)
        }
        Algo::Greedy => {
            let genes = greedy_min_etc(instance);
            let fitness = evaluate(instance, &genes)?.makespan_sum;
            (genes, fitness, 0, 1)
        }
        Algo::Fixed => {
            let genes = Chromosome::uniform(instance.tasks(), CloudId(0));
            let fitness = evaluate(instance, &genes)?.makespan_sum;
            (genes, fitness, 0, 1)
        }
    };
    let best_makespan_max = evaluate(instance, &best)?.makespan_max;
    Ok(Row {
        class: bench.class.clone(),
        dataset: bench.dataset.clone(),
        apps: bench.apps,
        algo: algo.name(),
        seed,
        best_fitness_sum: fitness,
        best_makespan_max,
        generations,
        evaluations,
        runtime_ms: started.elapsed().as_millis(),
    })
}

fn csv_body(rows: &[Row]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            row.class,
            row.dataset,
            row.apps,
            row.algo,
            row.seed,
            row.best_fitness_sum,
            row.best_makespan_max,
            row.generations,
            row.evaluations,
            row.runtime_ms
        );
    }
    out
}

/// Mean best fitness per class and dataset, one table per algorithm. Classes
/// print in the canonical reporting order, then any remaining labels in
/// order of appearance.
fn summary(rows: &[Row]) -> String {
    let mut algos: Vec<&'static str> = Vec::new();
    for row in rows {
        if !algos.contains(&row.algo) {
            algos.push(row.algo);
        }
    }
    let mut columns: Vec<(String, usize)> = Vec::new();
    for row in rows {
        let column = (row.dataset.clone(), row.apps);
        if !columns.contains(&column) {
            columns.push(column);
        }
    }
    let canonical: Vec<String> = all_classes().iter().map(|c| c.name()).collect();
    let mut classes: Vec<String> = canonical
        .iter()
        .filter(|name| rows.iter().any(|r| &r.class == *name))
        .cloned()
        .collect();
    for row in rows {
        if !classes.contains(&row.class) {
            classes.push(row.class.clone());
        }
    }

    let label_width = classes.iter().map(String::len).max().unwrap_or(5).max(5) + 2;
    let mut out = String::new();
    for algo in algos {
        let _ = writeln!(out, "mean best_fitness_sum by class ({algo})");
        let _ = write!(out, "{:<label_width$}", "class");
        for (dataset, apps) in &columns {
            let _ = write!(out, "{:>18}", format!("{dataset} p{apps}"));
        }
        out.push('\n');
        for class in &classes {
            let _ = write!(out, "{class:<label_width$}");
            for (dataset, apps) in &columns {
                let matching: Vec<f64> = rows
                    .iter()
                    .filter(|r| {
                        r.algo == algo
                            && &r.class == class
                            && &r.dataset == dataset
                            && r.apps == *apps
                    })
                    .map(|r| r.best_fitness_sum)
                    .collect();
                if matching.is_empty() {
                    let _ = write!(out, "{:>18}", "-");
                } else {
                    let mean = matching.iter().sum::<f64>() / matching.len() as f64;
                    let _ = write!(out, "{:>18}", format!("{mean:.2}"));
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

pub fn run(args: &RunArgs) -> Result<(), CliError> {
    let mut settings = Settings::default();
    if let Some(path) = &args.config {
        apply_config_file(&mut settings, path)?;
    }
    apply_flags(&mut settings, args)?;
    settings.ga.validate()?;

    let benches = build_benches(args, &settings)?;
    let algos = match &settings.algos {
        Some(list) => list.clone(),
        None if args.preset.as_deref() == Some("demo") => vec![Algo::Ga, Algo::Fixed],
        None => vec![Algo::Ga],
    };

    let jobs: Vec<(usize, u64, Algo)> = benches
        .iter()
        .enumerate()
        .flat_map(|(b, _)| {
            let seeds = &settings.seeds;
            let algos = &algos;
            seeds
                .iter()
                .flat_map(move |&seed| algos.iter().map(move |&algo| (b, seed, algo)))
                .collect::<Vec<_>>()
        })
        .collect();

    let rows: Vec<Row> = if settings.parallel {
        jobs.par_iter()
            .map(|&(b, seed, algo)| execute(&benches[b], algo, seed, &settings))
            .collect::<Result<_, _>>()?
    } else {
        jobs.iter()
            .map(|&(b, seed, algo)| execute(&benches[b], algo, seed, &settings))
            .collect::<Result<_, _>>()?
    };

    let body = csv_body(&rows);
    match &args.csv {
        Some(path) => {
            std::fs::write(path, &body)?;
            println!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{body}"),
    }
    println!();
    print!("{}", summary(&rows));
    Ok(())
}
