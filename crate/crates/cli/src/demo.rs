//! `demo`: print the built-in worked example — its ETC matrix, dependency
//! edges, and the scores of two reference schedules.

use mcsched::baselines::greedy_min_etc;
use mcsched::benchmark;
use mcsched::fitness::evaluate;
use mcsched::model::{Chromosome, CloudId, TaskId};

use crate::error::CliError;

#[derive(clap::Args)]
pub struct DemoArgs {
    /// Workload size: 9 (two applications) or 14 (three applications)
    #[arg(long, default_value_t = 9)]
    pub tasks: usize,
}

fn task_name(index: usize) -> char {
    (b'A' + index as u8) as char
}

pub fn run(args: &DemoArgs) -> Result<(), CliError> {
    let instance = match args.tasks {
        9 => benchmark::demo_nine_task(),
        14 => benchmark::demo_fourteen_task(),
        other => {
            return Err(CliError::Usage(format!(
                "demo workload has 9 or 14 tasks, not {other}"
            )))
        }
    };
    let n = instance.tasks();
    let q = instance.clouds();

    println!(
        "demo workload: {n} tasks across {} applications, {q} clouds",
        instance.applications()
    );
    println!();
    println!("expected time to compute (rows are tasks, columns are clouds):");
    for task in 0..n {
        let row: Vec<String> = instance.etc().row(TaskId(task)).iter().map(f64::to_string).collect();
        println!("  {}  [{}]", task_name(task), row.join(", "));
    }
    println!();
    println!("dependencies (task <- parents):");
    for task in 0..n {
        let parents = instance.dag().parents(TaskId(task));
        if parents.is_empty() {
            continue;
        }
        let names: Vec<String> = parents.iter().map(|p| task_name(p.0).to_string()).collect();
        println!("  {} <- {}", task_name(task), names.join(", "));
    }

    let everything_on_first = Chromosome::uniform(n, CloudId(0));
    let report = evaluate(&instance, &everything_on_first)?;
    println!();
    println!("schedule A: every task on cloud 0");
    println!(
        "  makespan_sum={}  makespan_max={}",
        report.makespan_sum, report.makespan_max
    );

    let greedy = greedy_min_etc(&instance);
    let report = evaluate(&instance, &greedy)?;
    let genes: Vec<String> = greedy.genes().iter().map(|c| c.0.to_string()).collect();
    println!();
    println!("schedule B: each task on its fastest cloud [{}]", genes.join(", "));
    println!(
        "  makespan_sum={}  makespan_max={}",
        report.makespan_sum, report.makespan_max
    );
    Ok(())
}
