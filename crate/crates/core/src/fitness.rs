//! Schedule evaluation: waiting times, completion times, and the two
//! makespan measures.
//!
//! A task's waiting time is the latest completion time among its parents
//! (zero for root tasks), and its completion time is its waiting time plus
//! its execution duration on the assigned cloud. The optimizer minimizes the
//! *sum* of completion times over all tasks; the *maximum* completion time is
//! also reported as a diagnostic, never used for selection.

use crate::model::{Chromosome, CloudId, ModelError, TaskId, WorkloadInstance};

/// Everything derived from evaluating one schedule against one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessReport {
    /// Waiting time per task: when the task may start.
    pub waiting: Vec<f64>,
    /// Completion time per task: waiting time plus execution duration.
    pub completion: Vec<f64>,
    /// Sum of completion times over all tasks; the fitness being minimized.
    pub makespan_sum: f64,
    /// Largest completion time; reported alongside but not optimized.
    pub makespan_max: f64,
    /// Total execution duration assigned to each cloud.
    pub cloud_load: Vec<f64>,
}

/// Evaluates `schedule` on `instance` in one pass over the topological
/// order. Fails if the schedule has the wrong length or assigns a cloud the
/// instance does not have.
pub fn evaluate(
    instance: &WorkloadInstance,
    schedule: &Chromosome,
) -> Result<FitnessReport, ModelError> {
    schedule.validate_for(instance)?;
    let n = instance.tasks();
    let etc = instance.etc();
    let dag = instance.dag();

    let mut waiting = vec![0.0; n];
    let mut completion = vec![0.0; n];
    for &t in instance.topological_order() {
        let mut ready = 0.0f64;
        for &parent in dag.parents(t) {
            ready = ready.max(completion[parent.0]);
        }
        waiting[t.0] = ready;
        completion[t.0] = ready + etc.cell(t, schedule.gene(t));
    }

    let makespan_sum = completion.iter().sum();
    let makespan_max = completion.iter().fold(0.0f64, |acc, &c| acc.max(c));
    Ok(FitnessReport {
        waiting,
        completion,
        makespan_sum,
        makespan_max,
        cloud_load: cloud_loads(instance, schedule),
    })
}

/// Total execution duration each cloud would carry under `schedule`. Callers
/// must pass a schedule that is valid for `instance`.
pub fn cloud_loads(instance: &WorkloadInstance, schedule: &Chromosome) -> Vec<f64> {
    let mut loads = vec![0.0; instance.clouds()];
    for t in 0..instance.tasks() {
        let cloud: CloudId = schedule.gene(TaskId(t));
        loads[cloud.0] += instance.etc().cell(TaskId(t), cloud);
    }
    loads
}

/// The cloud carrying the largest load; ties go to the lowest index.
pub fn busiest_cloud(report: &FitnessReport) -> CloudId {
    CloudId(argmax(&report.cloud_load))
}

/// The cloud carrying the smallest load; ties go to the lowest index.
pub fn least_utilized_cloud(report: &FitnessReport) -> CloudId {
    CloudId(argmin(&report.cloud_load))
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// Index of the smallest value; ties go to the lowest index.
pub(crate) fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}
