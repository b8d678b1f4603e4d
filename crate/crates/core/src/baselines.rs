//! Reference schedulers used as experimental controls: an equal-budget
//! random search and a greedy per-task heuristic.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fitness::{self, argmin};
use crate::ga::{check_instance, GaError, GaResult};
use crate::model::{Chromosome, CloudId, TaskId, WorkloadInstance};

/// Evaluates `budget` uniformly random schedules and returns the best one,
/// giving the optimizer an equal-evaluation-count control. Deterministic per
/// seed; the trace holds the running best after each evaluation, so a larger
/// budget with the same seed can only improve the result.
pub fn random_search(
    instance: &WorkloadInstance,
    budget: usize,
    seed: u64,
) -> Result<GaResult, GaError> {
    if budget == 0 {
        return Err(GaError::InvalidConfig("budget must be at least 1".into()));
    }
    check_instance(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Chromosome, f64)> = None;
    let mut trace = Vec::with_capacity(budget);
    for _ in 0..budget {
        let candidate = Chromosome::random(instance.tasks(), instance.clouds(), &mut rng);
        let score = fitness::evaluate(instance, &candidate)
            .expect("randomly drawn schedules are valid")
            .makespan_sum;
        if best.as_ref().map_or(true, |(_, f)| score < *f) {
            best = Some((candidate, score));
        }
        trace.push(best.as_ref().expect("just set").1);
    }
    let (best, best_fitness) = best.expect("budget is at least 1");
    Ok(GaResult { best, best_fitness, trace, evaluations: budget })
}

/// Assigns every task to its fastest cloud, ties to the lowest cloud index.
/// On an edgeless instance this minimizes the sum of completion times; with
/// dependencies it is merely a cheap heuristic, since waiting times are
/// ignored.
pub fn greedy_min_etc(instance: &WorkloadInstance) -> Chromosome {
    Chromosome::new(
        (0..instance.tasks())
            .map(|t| CloudId(argmin(instance.etc().row(TaskId(t)))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchmark::{demo_nine_task, generate_instance, InstanceSpec};
    use crate::model::{DependencyDag, EtcMatrix};

    fn edgeless_instance(tasks: usize, clouds: usize, seed: u64) -> WorkloadInstance {
        let mut spec = InstanceSpec::new("u_i_hihi".parse().unwrap(), tasks, clouds, 1, seed);
        spec.edge_prob = 0.0;
        generate_instance(&spec).unwrap()
    }

    #[test]
    fn greedy_picks_the_fastest_cloud_per_task() {
        let genes = greedy_min_etc(&demo_nine_task());
        assert_eq!(genes, Chromosome::from_indices([3, 3, 3, 2, 0, 0, 1, 1, 0]));
    }

    #[test]
    fn greedy_breaks_ties_toward_cloud_zero() {
        let etc = EtcMatrix::new(2, 3, vec![4.0; 6]).unwrap();
        let instance =
            WorkloadInstance::single_application(etc, DependencyDag::edgeless(2)).unwrap();
        assert_eq!(greedy_min_etc(&instance), Chromosome::from_indices([0, 0]));
    }

    #[test]
    fn greedy_is_optimal_without_dependencies() {
        let instance = edgeless_instance(12, 4, 3);
        let report = fitness::evaluate(&instance, &greedy_min_etc(&instance)).unwrap();
        let floor: f64 = (0..12)
            .map(|t| {
                instance.etc().row(TaskId(t)).iter().copied().fold(f64::INFINITY, f64::min)
            })
            .sum();
        assert_eq!(report.makespan_sum, floor);
    }

    #[test]
    fn random_search_is_deterministic_per_seed() {
        let instance = demo_nine_task();
        let a = random_search(&instance, 100, 5).unwrap();
        let b = random_search(&instance, 100, 5).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.evaluations, 100);
        assert_eq!(a.trace.len(), 100);
    }

    #[test]
    fn random_search_improves_with_budget_on_the_same_stream() {
        let instance = demo_nine_task();
        let short = random_search(&instance, 50, 8).unwrap();
        let long = random_search(&instance, 400, 8).unwrap();
        assert!(long.best_fitness <= short.best_fitness);
        // The running-best trace never increases.
        for window in long.trace.windows(2) {
            assert!(window[1] <= window[0]);
        }
    }

    #[test]
    fn random_search_on_one_cloud_finds_the_only_schedule() {
        let etc = EtcMatrix::new(3, 1, vec![2.0, 3.0, 4.0]).unwrap();
        let instance =
            WorkloadInstance::single_application(etc, DependencyDag::edgeless(3)).unwrap();
        let result = random_search(&instance, 7, 0).unwrap();
        assert_eq!(result.best, Chromosome::uniform(3, CloudId(0)));
        assert_eq!(result.best_fitness, 9.0);
    }

    #[test]
    fn random_search_with_budget_one_scores_a_single_draw() {
        let instance = demo_nine_task();
        let result = random_search(&instance, 1, 3).unwrap();
        let check = fitness::evaluate(&instance, &result.best).unwrap();
        assert_eq!(result.best_fitness, check.makespan_sum);
        assert_eq!(result.trace, vec![result.best_fitness]);
    }

    #[test]
    fn random_search_never_beats_the_exhaustive_optimum() {
        let instance = edgeless_instance(5, 3, 11);
        let mut optimum = f64::INFINITY;
        for code in 0..3usize.pow(5) {
            let genes: Vec<usize> = (0..5).map(|t| code / 3usize.pow(t as u32) % 3).collect();
            let schedule = Chromosome::from_indices(genes);
            let score = fitness::evaluate(&instance, &schedule).unwrap().makespan_sum;
            optimum = optimum.min(score);
        }
        let result = random_search(&instance, 243, 4).unwrap();
        assert!(result.best_fitness >= optimum);
    }

    #[test]
    fn random_search_rejects_a_zero_budget() {
        let instance = demo_nine_task();
        assert!(matches!(
            random_search(&instance, 0, 0),
            Err(GaError::InvalidConfig(_))
        ));
    }
}
