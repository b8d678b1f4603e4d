//! The genetic algorithm: roulette-wheel selection over inverse fitness,
//! one-point crossover, load-balancing mutation, and elitism.
//!
//! Every random draw comes from a single ChaCha8 stream seeded from
//! [`GaConfig::seed`], and draws happen in a fixed order, so a run is fully
//! reproducible from its configuration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::fitness::{self, argmax, argmin};
use crate::model::{Chromosome, CloudId, ModelError, TaskId, WorkloadInstance};

/// Errors raised by the optimizer and its operators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GaError {
    #[error("fitness at index {index} must be positive and finite, found {value}")]
    ZeroFitness { index: usize, value: f64 },
    #[error("parents have different lengths: {left} and {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("population is empty")]
    EmptyPopulation,
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Tuning knobs for one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaConfig {
    /// Individuals per generation.
    pub population_size: usize,
    /// Generations to evolve; each evaluates the whole population once.
    pub generations: usize,
    /// Probability that a selected pair is recombined rather than cloned.
    pub crossover_prob: f64,
    /// Probability that each child is mutated.
    pub mutation_prob: f64,
    /// Best individuals copied unchanged into the next generation.
    pub elite_count: usize,
    /// Seed for the run's random stream.
    pub seed: u64,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 50,
            generations: 200,
            crossover_prob: 0.8,
            mutation_prob: 0.2,
            elite_count: 2,
            seed: 0,
        }
    }
}

impl GaConfig {
    /// Checks that the configuration can drive a run.
    pub fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 2 {
            return Err(GaError::InvalidConfig("population size must be at least 2".into()));
        }
        if self.generations == 0 {
            return Err(GaError::InvalidConfig("generation count must be at least 1".into()));
        }
        if self.elite_count >= self.population_size {
            return Err(GaError::InvalidConfig(format!(
                "elite count {} must be below the population size {}",
                self.elite_count, self.population_size
            )));
        }
        for (name, p) in [("crossover", self.crossover_prob), ("mutation", self.mutation_prob)] {
            if !(0.0..=1.0).contains(&p) || !p.is_finite() {
                return Err(GaError::InvalidConfig(format!(
                    "{name} probability must lie in [0, 1], found {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of one optimizer run.
#[derive(Debug, Clone, PartialEq)]
pub struct GaResult {
    /// Best schedule found across all generations.
    pub best: Chromosome,
    /// Fitness (sum of completion times) of [`GaResult::best`].
    pub best_fitness: f64,
    /// Best fitness within each generation's evaluated population.
    pub trace: Vec<f64>,
    /// Total schedule evaluations: population size times generations.
    pub evaluations: usize,
}

/// The population [`evolve`] starts from: `population_size` chromosomes with
/// every gene drawn uniformly at random from the instance's clouds, using a
/// fresh stream seeded from `config.seed`.
pub fn init_population(
    instance: &WorkloadInstance,
    config: &GaConfig,
) -> Result<Vec<Chromosome>, GaError> {
    config.validate()?;
    check_instance(instance)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    Ok(random_population(instance, config.population_size, &mut rng))
}

fn random_population(
    instance: &WorkloadInstance,
    size: usize,
    rng: &mut impl Rng,
) -> Vec<Chromosome> {
    (0..size).map(|_| Chromosome::random(instance.tasks(), instance.clouds(), rng)).collect()
}

pub(crate) fn check_instance(instance: &WorkloadInstance) -> Result<(), GaError> {
    if instance.tasks() == 0 {
        return Err(GaError::InvalidConfig("instance has no tasks".into()));
    }
    if instance.clouds() == 0 {
        return Err(GaError::InvalidConfig("instance has no clouds".into()));
    }
    Ok(())
}

/// Picks an index with probability proportional to `1 / fitness[i]`, so lower
/// fitness (better schedules) is selected more often.
pub fn roulette_select(fitness: &[f64], rng: &mut impl Rng) -> Result<usize, GaError> {
    if fitness.is_empty() {
        return Err(GaError::EmptyPopulation);
    }
    let mut total = 0.0;
    for (index, &value) in fitness.iter().enumerate() {
        if !(value > 0.0 && value.is_finite()) {
            return Err(GaError::ZeroFitness { index, value });
        }
        total += 1.0 / value;
    }
    let target = rng.gen_range(0.0..total);
    let mut acc = 0.0;
    for (index, &value) in fitness.iter().enumerate() {
        acc += 1.0 / value;
        if target < acc {
            return Ok(index);
        }
    }
    // Rounding can leave `target` at the boundary; the last index wins.
    Ok(fitness.len() - 1)
}

/// One-point crossover: draws a cut in `1..n` and swaps the tails. Parents of
/// length below two are returned unchanged without drawing.
pub fn crossover_one_point(
    a: &Chromosome,
    b: &Chromosome,
    rng: &mut impl Rng,
) -> Result<(Chromosome, Chromosome), GaError> {
    if a.len() != b.len() {
        return Err(GaError::LengthMismatch { left: a.len(), right: b.len() });
    }
    let n = a.len();
    if n < 2 {
        return Ok((a.clone(), b.clone()));
    }
    let cut = rng.gen_range(1..n);
    let mut left = a.genes()[..cut].to_vec();
    left.extend_from_slice(&b.genes()[cut..]);
    let mut right = b.genes()[..cut].to_vec();
    right.extend_from_slice(&a.genes()[cut..]);
    Ok((Chromosome::new(left), Chromosome::new(right)))
}

/// Load-balancing mutation: picks a uniformly random task on the most loaded
/// cloud and reassigns it, together with all of its transitive descendants,
/// to the least loaded cloud. Both clouds are chosen from the loads before
/// the move; ties go to the lowest cloud index.
pub fn mutate_load_balance(
    instance: &WorkloadInstance,
    schedule: &mut Chromosome,
    rng: &mut impl Rng,
) -> Result<(), GaError> {
    schedule.validate_for(instance)?;
    mutate_traced(instance, schedule, rng);
    Ok(())
}

/// The move a mutation performed, for tests that pin operator behavior.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct MutationMove {
    pub task: TaskId,
    pub from: CloudId,
    pub to: CloudId,
}

/// Mutation body; assumes `schedule` is valid for `instance`. Returns the
/// move made, or `None` for an empty schedule. Draws exactly one random
/// number: the position of the task among those on the busiest cloud.
pub(crate) fn mutate_traced(
    instance: &WorkloadInstance,
    schedule: &mut Chromosome,
    rng: &mut impl Rng,
) -> Option<MutationMove> {
    if schedule.is_empty() {
        return None;
    }
    let loads = fitness::cloud_loads(instance, schedule);
    let busiest = CloudId(argmax(&loads));
    let least = CloudId(argmin(&loads));
    let candidates: Vec<TaskId> = (0..instance.tasks())
        .map(TaskId)
        .filter(|&t| schedule.gene(t) == busiest)
        .collect();
    let task = candidates[rng.gen_range(0..candidates.len())];
    schedule.set_gene(task, least);
    for descendant in instance.dag().descendants(task) {
        schedule.set_gene(descendant, least);
    }
    Some(MutationMove { task, from: busiest, to: least })
}

/// Runs the genetic algorithm on `instance`.
///
/// Each generation evaluates every individual, records the generation's best
/// in the trace, then breeds the next population: the `elite_count` fittest
/// individuals are copied unchanged, and the rest are produced by selecting
/// two parents by roulette, recombining them with probability
/// `crossover_prob`, and mutating each child independently with probability
/// `mutation_prob`. The population bred after the final generation is never
/// evaluated, so `evaluations` is exactly `population_size * generations`.
pub fn evolve(instance: &WorkloadInstance, config: &GaConfig) -> Result<GaResult, GaError> {
    config.validate()?;
    check_instance(instance)?;

    let l = config.population_size;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population = random_population(instance, l, &mut rng);

    let mut trace = Vec::with_capacity(config.generations);
    let mut evaluations = 0;
    let mut best: Option<(Chromosome, f64)> = None;

    for _ in 0..config.generations {
        let fitness: Vec<f64> = population
            .iter()
            .map(|individual| {
                fitness::evaluate(instance, individual)
                    .expect("evolve only breeds valid schedules")
                    .makespan_sum
            })
            .collect();
        evaluations += l;

        let leader = argmin(&fitness);
        trace.push(fitness[leader]);
        if best.as_ref().map_or(true, |(_, f)| fitness[leader] < *f) {
            best = Some((population[leader].clone(), fitness[leader]));
        }

        let mut ranked: Vec<usize> = (0..l).collect();
        ranked.sort_by(|&a, &b| {
            fitness[a].partial_cmp(&fitness[b]).expect("fitness is finite").then(a.cmp(&b))
        });
        let mut next = Vec::with_capacity(l);
        for &idx in ranked.iter().take(config.elite_count) {
            next.push(population[idx].clone());
        }
        while next.len() < l {
            let father = &population[roulette_select(&fitness, &mut rng)?];
            let mother = &population[roulette_select(&fitness, &mut rng)?];
            let (mut first, mut second) = if rng.gen_bool(config.crossover_prob) {
                crossover_one_point(father, mother, &mut rng)?
            } else {
                (father.clone(), mother.clone())
            };
            if rng.gen_bool(config.mutation_prob) {
                mutate_traced(instance, &mut first, &mut rng);
            }
            if rng.gen_bool(config.mutation_prob) {
                mutate_traced(instance, &mut second, &mut rng);
            }
            next.push(first);
            if next.len() < l {
                next.push(second);
            }
        }
        population = next;
    }

    let (best, best_fitness) = best.expect("at least one generation ran");
    Ok(GaResult { best, best_fitness, trace, evaluations })
}
