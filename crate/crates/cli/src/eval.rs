//! `eval`: score one explicit schedule against an instance and print the
//! per-task waiting/completion breakdown.

use std::path::{Path, PathBuf};

use mcsched::benchmark;
use mcsched::fitness::evaluate;
use mcsched::model::{Chromosome, CloudId, TaskId, WorkloadInstance};

use crate::error::CliError;
use crate::run::load_from_manifest;

#[derive(clap::Args)]
pub struct EvalArgs {
    /// Built-in instance: demo (9 tasks) or demo14 (14 tasks)
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
    /// File holding one cloud index per task, whitespace-separated
    #[arg(long)]
    pub schedule: PathBuf,
}

/// Reads a schedule file: exactly one cloud index per task, any whitespace
/// layout, `#` comment lines allowed.
fn parse_schedule(path: &Path, tasks: usize) -> Result<Chromosome, CliError> {
    let text = std::fs::read_to_string(path)?;
    let mut genes = Vec::with_capacity(tasks);
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let cloud: usize = token.parse().map_err(|_| {
                CliError::Data(format!("schedule token {token:?} is not a cloud index"))
            })?;
            genes.push(CloudId(cloud));
        }
    }
    if genes.len() != tasks {
        return Err(CliError::Data(format!(
            "schedule holds {} entries but the instance has {} tasks",
            genes.len(),
            tasks
        )));
    }
    Ok(Chromosome::new(genes))
}

fn load_instance(args: &EvalArgs) -> Result<WorkloadInstance, CliError> {
    if let Some(manifest) = &args.manifest {
        let (_, instance) = load_from_manifest(manifest, args.etc.as_deref(), args.dep.as_deref())?;
        return Ok(instance);
    }
    match args.preset.as_deref() {
        Some("demo") => Ok(benchmark::demo_nine_task()),
        Some("demo14") => Ok(benchmark::demo_fourteen_task()),
        Some(other) => Err(CliError::Usage(format!(
            "unknown preset {other:?} (expected demo or demo14)"
        ))),
        None => Err(CliError::Usage(
            "choose an instance source: --preset or --manifest".into(),
        )),
    }
}

pub fn run(args: &EvalArgs) -> Result<(), CliError> {
    let instance = load_instance(args)?;
    let schedule = parse_schedule(&args.schedule, instance.tasks())?;
    let report = evaluate(&instance, &schedule).map_err(|e| CliError::Data(e.to_string()))?;

    println!("{:>5} {:>6} {:>10} {:>12}", "task", "cloud", "waiting", "completion");
    for task in 0..instance.tasks() {
        println!(
            "{:>5} {:>6} {:>10} {:>12}",
            task,
            schedule.gene(TaskId(task)).0,
            report.waiting[task],
            report.completion[task]
        );
    }
    println!();
    println!("makespan_sum={}", report.makespan_sum);
    println!("makespan_max={}", report.makespan_max);
    let loads: Vec<String> = report.cloud_load.iter().map(f64::to_string).collect();
    println!("cloud_load=[{}]", loads.join(", "));
    Ok(())
}
