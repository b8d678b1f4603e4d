//! `generate`: write one benchmark instance to disk as a flat ETC file, a
//! dependency matrix, and a provenance manifest.

use std::path::PathBuf;

use mcsched::benchmark::{self, BenchmarkError, EtcClass, InstanceSpec, DEFAULT_EDGE_PROB};

use crate::error::CliError;

#[derive(clap::Args)]
pub struct GenerateArgs {
    /// Instance class, e.g. u_c_hihi
    #[arg(long)]
    pub class: String,
    /// Dataset shape as <tasks>x<clouds>
    #[arg(long, default_value = "512x16")]
    pub size: String,
    /// Number of applications the tasks are split into
    #[arg(long, default_value_t = 20)]
    pub apps: usize,
    /// Generator seed
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Probability of each possible within-application edge
    #[arg(long, default_value_t = DEFAULT_EDGE_PROB)]
    pub edge_prob: f64,
    /// Directory the three files are written into
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
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

/// Splits a `<tasks>x<clouds>` shape argument.
pub fn parse_size(size: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("size {size:?} is not of the form <tasks>x<clouds>"));
    let (n, q) = size.split_once('x').ok_or_else(bad)?;
    Ok((n.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?))
}

/// Maps class/spec validation failures to usage errors, since they come
/// straight from flag values.
fn as_usage(err: BenchmarkError) -> CliError {
    match err {
        BenchmarkError::UnknownClass(_) | BenchmarkError::InvalidSpec(_) => {
            CliError::Usage(err.to_string())
        }
        other => other.into(),
    }
}

pub fn run(args: &GenerateArgs) -> Result<(), CliError> {
    let class: EtcClass = args.class.parse().map_err(as_usage)?;
    let (tasks, clouds) = parse_size(&args.size)?;
    let mut spec = InstanceSpec::new(class, tasks, clouds, args.apps, args.seed);
    spec.edge_prob = args.edge_prob;
    if let Some(r) = args.task_range_hi {
        spec.ranges.task_hi = r;
    }
    if let Some(r) = args.task_range_lo {
        spec.ranges.task_lo = r;
    }
    if let Some(r) = args.machine_range_hi {
        spec.ranges.machine_hi = r;
    }
    if let Some(r) = args.machine_range_lo {
        spec.ranges.machine_lo = r;
    }
    spec.validate().map_err(as_usage)?;

    let etc = benchmark::generate_etc(&spec)?;
    let (dag, _) = benchmark::generate_dag(&spec)?;
    std::fs::create_dir_all(&args.out)?;
    let base = args.out.join(spec.base_name());

    let etc_path = base.with_extension("etc");
    let dep_path = base.with_extension("dep");
    let manifest_path = base.with_extension("manifest");
    benchmark::write_etc_file(&etc_path, &etc)?;
    benchmark::write_dep_file(&dep_path, &dag)?;
    benchmark::write_manifest(&manifest_path, &spec)?;

    println!("wrote {}", etc_path.display());
    println!("wrote {}", dep_path.display());
    println!("wrote {}", manifest_path.display());
    Ok(())
}
