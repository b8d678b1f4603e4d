//! Genetic-algorithm scheduling of DAG-structured applications onto
//! heterogeneous multi-cloud platforms.
//!
//! A workload is a set of applications, each a DAG of tasks; a schedule
//! assigns every task to one cloud. Execution durations come from an
//! expected-time-to-compute (ETC) matrix, and a task cannot start before all
//! of its parents have completed. The optimizer searches for assignments that
//! minimize the sum of task completion times.
//!
//! - [`model`]: ETC matrices, dependency DAGs, instances, chromosomes.
//! - [`fitness`]: waiting/completion times and the two makespan measures.
//! - [`ga`]: the genetic algorithm (roulette selection, one-point crossover,
//!   load-balancing mutation, elitism).
//! - [`benchmark`]: synthetic instance generation and on-disk formats.
//! - [`baselines`]: random-search and greedy reference schedulers.
//!
//! # Example
//!
//! ```
//! use mcsched::benchmark::demo_nine_task;
//! use mcsched::{evaluate, evolve, Chromosome, CloudId, GaConfig};
//!
//! let instance = demo_nine_task();
//!
//! // Putting all nine tasks on the first cloud totals 88 time units.
//! let everything_on_first = Chromosome::uniform(instance.tasks(), CloudId(0));
//! let report = evaluate(&instance, &everything_on_first)?;
//! assert_eq!(report.makespan_sum, 88.0);
//!
//! // A short evolutionary run finds something at least as good.
//! let config = GaConfig { population_size: 20, generations: 50, ..GaConfig::default() };
//! let result = evolve(&instance, &config)?;
//! assert!(result.best_fitness <= 88.0);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod baselines;
pub mod benchmark;
pub mod fitness;
pub mod ga;
pub mod model;

pub use fitness::{evaluate, FitnessReport};
pub use ga::{evolve, GaConfig, GaError, GaResult};
pub use model::{
    Chromosome, CloudId, DependencyDag, EtcMatrix, ModelError, TaskId, WorkloadInstance,
};
