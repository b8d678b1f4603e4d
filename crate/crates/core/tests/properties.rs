//! Randomized invariant checks for the model, evaluator, operators, and
//! generators. Instances here carry integer-valued durations so that every
//! comparison can be exact: sums of small integers in doubles do not depend
//! on summation order.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use mcsched::baselines::random_search;
use mcsched::benchmark::{all_classes, generate_etc, generate_instance, Consistency, InstanceSpec};
use mcsched::fitness::{busiest_cloud, cloud_loads, evaluate, least_utilized_cloud};
use mcsched::ga::{crossover_one_point, evolve, mutate_load_balance, GaConfig};
use mcsched::model::{Chromosome, DependencyDag, EtcMatrix, TaskId, WorkloadInstance};

/// Builds an acyclic graph from a lower-triangular edge mask and a label
/// permutation, so parents may carry higher indices than their children.
fn dag_from_mask(n: usize, mask: &[bool], labels: &[usize]) -> DependencyDag {
    let mut edges = Vec::new();
    let mut k = 0;
    for child in 1..n {
        for parent in 0..child {
            if mask[k] {
                edges.push((labels[child], labels[parent]));
            }
            k += 1;
        }
    }
    DependencyDag::from_edges(n, &edges)
}

fn arb_dag(max_n: usize) -> impl Strategy<Value = DependencyDag> {
    (1..=max_n).prop_flat_map(|n| {
        (
            Just(n),
            proptest::collection::vec(proptest::bool::weighted(0.4), n * (n - 1) / 2),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|(n, mask, labels)| dag_from_mask(n, &mask, &labels))
    })
}

/// A single-application instance with integer durations in 1..=50.
fn arb_instance(max_n: usize, max_q: usize) -> impl Strategy<Value = WorkloadInstance> {
    (1..=max_n, 1..=max_q).prop_flat_map(|(n, q)| {
        (
            Just((n, q)),
            proptest::collection::vec(1..=50u32, n * q),
            proptest::collection::vec(proptest::bool::weighted(0.4), n * (n - 1) / 2),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        )
            .prop_map(|((n, q), cells, mask, labels)| {
                let etc =
                    EtcMatrix::new(n, q, cells.into_iter().map(f64::from).collect()).unwrap();
                WorkloadInstance::single_application(etc, dag_from_mask(n, &mask, &labels))
                    .unwrap()
            })
    })
}

fn arb_scheduled(
    max_n: usize,
    max_q: usize,
) -> impl Strategy<Value = (WorkloadInstance, Chromosome)> {
    arb_instance(max_n, max_q).prop_flat_map(|instance| {
        let genes = proptest::collection::vec(0..instance.clouds(), instance.tasks());
        (Just(instance), genes)
            .prop_map(|(instance, genes)| (instance, Chromosome::from_indices(genes)))
    })
}

/// Independent oracle: waiting times by memoized recursion over parents
/// instead of a topological pass.
fn recursive_waiting(
    instance: &WorkloadInstance,
    genes: &Chromosome,
    t: usize,
    memo: &mut Vec<Option<f64>>,
) -> f64 {
    if let Some(w) = memo[t] {
        return w;
    }
    let mut w = 0.0f64;
    for &p in instance.dag().parents(TaskId(t)) {
        let wp = recursive_waiting(instance, genes, p.0, memo);
        w = w.max(wp + instance.etc().cell(p, genes.gene(p)));
    }
    memo[t] = Some(w);
    w
}

fn recursive_sum_and_max(instance: &WorkloadInstance, genes: &Chromosome) -> (f64, f64) {
    let n = instance.tasks();
    let mut memo = vec![None; n];
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for t in 0..n {
        let completion = recursive_waiting(instance, genes, t, &mut memo)
            + instance.etc().cell(TaskId(t), genes.gene(TaskId(t)));
        sum += completion;
        max = max.max(completion);
    }
    (sum, max)
}

/// Best fitness over every possible chromosome; feasible for q^n small.
fn exhaustive_best(instance: &WorkloadInstance) -> f64 {
    let (n, q) = (instance.tasks(), instance.clouds());
    let mut best = f64::INFINITY;
    for code in 0..q.pow(n as u32) {
        let genes: Vec<usize> = (0..n).map(|t| code / q.pow(t as u32) % q).collect();
        let score = evaluate(instance, &Chromosome::from_indices(genes)).unwrap().makespan_sum;
        best = best.min(score);
    }
    best
}

proptest! {
    #[test]
    fn topological_order_is_a_parent_first_permutation(dag in arb_dag(12)) {
        let order = dag.topological_order().unwrap();
        let n = dag.tasks();
        let mut position = vec![usize::MAX; n];
        for (slot, &t) in order.iter().enumerate() {
            position[t.0] = slot;
        }
        prop_assert!(position.iter().all(|&p| p != usize::MAX), "not a permutation");
        for child in 0..n {
            for &parent in dag.parents(TaskId(child)) {
                prop_assert!(position[parent.0] < position[child]);
            }
        }
    }

    #[test]
    fn descendants_and_ancestors_are_mirror_closures(dag in arb_dag(12)) {
        let n = dag.tasks();
        // Ancestors computed independently: transitive closure over parents.
        let mut ancestors: Vec<Vec<bool>> = vec![vec![false; n]; n];
        let order = dag.topological_order().unwrap();
        for &t in &order {
            for &p in dag.parents(t) {
                let from_parent = ancestors[p.0].clone();
                let row = &mut ancestors[t.0];
                row[p.0] = true;
                for (slot, reachable) in row.iter_mut().zip(from_parent) {
                    *slot = *slot || reachable;
                }
            }
        }
        for t in 0..n {
            let down = dag.descendants(TaskId(t));
            for u in 0..n {
                let listed = down.contains(&TaskId(u));
                prop_assert_eq!(listed, ancestors[u][t], "t={} u={}", t, u);
                // Antisymmetry on acyclic graphs.
                if listed {
                    prop_assert!(!dag.descendants(TaskId(u)).contains(&TaskId(t)));
                }
            }
        }
    }

    #[test]
    fn waiting_is_zero_exactly_for_root_tasks((instance, genes) in arb_scheduled(12, 4)) {
        let report = evaluate(&instance, &genes).unwrap();
        for t in 0..instance.tasks() {
            let is_root = instance.dag().parents(TaskId(t)).is_empty();
            prop_assert_eq!(report.waiting[t] == 0.0, is_root);
        }
    }

    #[test]
    fn waiting_equals_latest_parent_completion((instance, genes) in arb_scheduled(12, 4)) {
        let report = evaluate(&instance, &genes).unwrap();
        for child in 0..instance.tasks() {
            let parents = instance.dag().parents(TaskId(child));
            let latest = parents.iter().map(|p| report.completion[p.0]).fold(0.0f64, f64::max);
            prop_assert_eq!(report.waiting[child], latest);
            for p in parents {
                let exec = instance.etc().cell(TaskId(child), genes.gene(TaskId(child)));
                prop_assert!(report.completion[child] >= report.completion[p.0] + exec);
            }
        }
    }

    #[test]
    fn report_fields_satisfy_their_defining_identities((instance, genes) in arb_scheduled(12, 4)) {
        let report = evaluate(&instance, &genes).unwrap();
        for t in 0..instance.tasks() {
            let exec = instance.etc().cell(TaskId(t), genes.gene(TaskId(t)));
            prop_assert_eq!(report.completion[t], report.waiting[t] + exec);
        }
        prop_assert_eq!(report.makespan_sum, report.completion.iter().sum::<f64>());
        prop_assert_eq!(
            report.makespan_max,
            report.completion.iter().fold(0.0f64, |a, &c| a.max(c))
        );
    }

    #[test]
    fn cloud_loads_sum_to_total_execution((instance, genes) in arb_scheduled(12, 4)) {
        let loads = cloud_loads(&instance, &genes);
        let by_cloud: f64 = loads.iter().sum();
        let by_task: f64 = (0..instance.tasks())
            .map(|t| instance.etc().cell(TaskId(t), genes.gene(TaskId(t))))
            .sum();
        prop_assert_eq!(by_cloud, by_task);
    }

    #[test]
    fn relabeling_tasks_preserves_the_report(
        (instance, genes) in arb_scheduled(10, 4),
        seed in any::<u64>(),
    ) {
        // Draw the label permutation from a seed, since its length must track
        // the instance drawn above.
        let n = instance.tasks();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..n).rev() {
            let j = rand::Rng::gen_range(&mut rng, 0..=i);
            perm.swap(i, j);
        }

        let mut rows = vec![Vec::new(); n];
        let mut new_genes = vec![0usize; n];
        for t in 0..n {
            rows[perm[t]] = instance.etc().row(TaskId(t)).to_vec();
            new_genes[perm[t]] = genes.gene(TaskId(t)).0;
        }
        let mut edges = Vec::new();
        for child in 0..n {
            for &parent in instance.dag().parents(TaskId(child)) {
                edges.push((perm[child], perm[parent.0]));
            }
        }
        let relabeled = WorkloadInstance::single_application(
            EtcMatrix::from_rows(&rows).unwrap(),
            DependencyDag::from_edges(n, &edges),
        )
        .unwrap();
        let relabeled_genes = Chromosome::from_indices(new_genes);

        let original = evaluate(&instance, &genes).unwrap();
        let mirrored = evaluate(&relabeled, &relabeled_genes).unwrap();
        prop_assert_eq!(original.makespan_sum, mirrored.makespan_sum);
        prop_assert_eq!(original.makespan_max, mirrored.makespan_max);
        prop_assert_eq!(original.cloud_load, mirrored.cloud_load);
        for t in 0..n {
            prop_assert_eq!(original.completion[t], mirrored.completion[perm[t]]);
        }
    }

    #[test]
    fn crossover_children_are_single_cut_recombinations(
        (instance, a) in arb_scheduled(12, 4),
        seed in any::<u64>(),
        filler in proptest::collection::vec(0..4usize, 12),
    ) {
        let n = instance.tasks();
        let b = Chromosome::from_indices(
            (0..n).map(|t| filler[t] % instance.clouds()),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (c1, c2) = crossover_one_point(&a, &b, &mut rng).unwrap();
        prop_assert_eq!(c1.len(), n);
        prop_assert_eq!(c2.len(), n);
        c1.validate_for(&instance).unwrap();
        c2.validate_for(&instance).unwrap();
        for j in 0..n {
            let (t, g1, g2) = (TaskId(j), c1.gene(TaskId(j)), c2.gene(TaskId(j)));
            prop_assert!(g1 == a.gene(t) || g1 == b.gene(t), "provenance broken at {}", j);
            prop_assert!(g2 == a.gene(t) || g2 == b.gene(t), "provenance broken at {}", j);
        }
        let consistent_cut = (1..n.max(2)).any(|k| {
            c1.genes()[..k] == a.genes()[..k]
                && c1.genes()[k..] == b.genes()[k..]
                && c2.genes()[..k] == b.genes()[..k]
                && c2.genes()[k..] == a.genes()[k..]
        });
        prop_assert!(n < 2 || consistent_cut, "no single cut explains both children");
    }

    #[test]
    fn mutation_moves_one_busiest_task_with_its_descendants(
        (instance, genes) in arb_scheduled(10, 4),
        seed in any::<u64>(),
    ) {
        let report = evaluate(&instance, &genes).unwrap();
        let busiest = busiest_cloud(&report);
        let least = least_utilized_cloud(&report);

        let mut mutated = genes.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        mutate_load_balance(&instance, &mut mutated, &mut rng).unwrap();
        mutated.validate_for(&instance).unwrap();

        let changed: Vec<usize> = (0..instance.tasks())
            .filter(|&t| mutated.gene(TaskId(t)) != genes.gene(TaskId(t)))
            .collect();
        // Even when every load ties (busiest == least), the operator still
        // relocates one busiest-cloud task plus its descendants there, so the
        // same predicate covers both cases; only the guarantee that something
        // changed needs the loads to differ.
        let explained = (0..instance.tasks()).any(|t| {
            let mut scope = vec![TaskId(t)];
            scope.extend(instance.dag().descendants(TaskId(t)));
            genes.gene(TaskId(t)) == busiest
                && changed.iter().all(|&u| scope.contains(&TaskId(u)))
                && scope.iter().all(|&u| mutated.gene(u) == least)
        });
        prop_assert!(explained, "changed set {:?} is not one task plus descendants", changed);
        if busiest != least {
            prop_assert!(!changed.is_empty(), "a busiest-cloud task must change clouds");
        }
    }

    #[test]
    fn evolve_is_deterministic_and_monotone_under_elitism(
        instance in arb_instance(8, 3),
        seed in any::<u64>(),
        elite in 1..=3usize,
    ) {
        let config = GaConfig {
            population_size: 8,
            generations: 12,
            elite_count: elite,
            seed,
            ..GaConfig::default()
        };
        let first = evolve(&instance, &config).unwrap();
        let second = evolve(&instance, &config).unwrap();
        prop_assert_eq!(&first, &second);
        for window in first.trace.windows(2) {
            prop_assert!(window[1] <= window[0]);
        }
        prop_assert_eq!(first.evaluations, 8 * 12);
        let check = evaluate(&instance, &first.best).unwrap();
        prop_assert_eq!(first.best_fitness, check.makespan_sum);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn topological_evaluation_matches_recursion_on_every_chromosome(
        instance in arb_instance(6, 3),
    ) {
        let (n, q) = (instance.tasks(), instance.clouds());
        for code in 0..q.pow(n as u32) {
            let genes: Vec<usize> = (0..n).map(|t| code / q.pow(t as u32) % q).collect();
            let schedule = Chromosome::from_indices(genes);
            let report = evaluate(&instance, &schedule).unwrap();
            let (sum, max) = recursive_sum_and_max(&instance, &schedule);
            prop_assert_eq!(report.makespan_sum, sum);
            prop_assert_eq!(report.makespan_max, max);
        }
    }

    #[test]
    fn search_never_reports_below_the_exhaustive_optimum(
        instance in arb_instance(6, 3),
        seed in any::<u64>(),
    ) {
        let optimum = exhaustive_best(&instance);
        let config = GaConfig {
            population_size: 16,
            generations: 15,
            seed,
            ..GaConfig::default()
        };
        let ga = evolve(&instance, &config).unwrap();
        prop_assert!(ga.best_fitness >= optimum);
        let random = random_search(&instance, 200, seed).unwrap();
        prop_assert!(random.best_fitness >= optimum);
    }

    #[test]
    fn generated_instances_are_well_formed_and_seed_stable(
        class_index in 0..12usize,
        n in 1..=30usize,
        q in 1..=8usize,
        p_raw in 1..=30usize,
        edge_prob in 0.0..=1.0f64,
        seed in any::<u64>(),
    ) {
        let mut spec = InstanceSpec::new(all_classes()[class_index], n, q, 1 + p_raw % n, seed);
        spec.edge_prob = edge_prob;

        let instance = generate_instance(&spec).unwrap();
        prop_assert_eq!(instance.tasks(), n);
        prop_assert_eq!(instance.clouds(), q);
        prop_assert_eq!(instance.applications(), spec.applications);
        for child in 0..n {
            for &parent in instance.dag().parents(TaskId(child)) {
                prop_assert_eq!(
                    instance.application_of(TaskId(child)),
                    instance.application_of(parent)
                );
            }
        }

        let etc = generate_etc(&spec).unwrap();
        let again = generate_etc(&spec).unwrap();
        prop_assert_eq!(&etc, &again);
        match spec.class.consistency {
            Consistency::Consistent => {
                for t in 0..n {
                    let row = etc.row(TaskId(t));
                    prop_assert!(row.windows(2).all(|w| w[0] <= w[1]));
                }
            }
            Consistency::Semiconsistent => {
                for t in 0..n {
                    let evens: Vec<f64> = etc.row(TaskId(t)).iter().step_by(2).copied().collect();
                    prop_assert!(evens.windows(2).all(|w| w[0] <= w[1]));
                }
            }
            Consistency::Inconsistent => {}
        }
    }
}
