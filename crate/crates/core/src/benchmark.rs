//! Synthetic instance generation and on-disk formats.
//!
//! ETC matrices come in twelve classes named `u_<x>_<vv><ww>`: `u` for the
//! uniform draws, `x` for consistency (`c`onsistent, `i`nconsistent,
//! `s`emiconsistent), `vv`/`ww` for high or low task/machine heterogeneity.
//! Dependency DAGs partition the tasks into contiguous applications and draw
//! edges within each application only, so they are acyclic by construction.
//! Generation is deterministic per seed. The module also ships a small
//! hand-authored demo workload used as the oracle fixture across the test
//! suites, and readers/writers for the flat instance files.

use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{DependencyDag, EtcMatrix, ModelError, TaskId, WorkloadInstance};

/// Errors raised while generating instances or reading instance files.
#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("invalid instance spec: {0}")]
    InvalidSpec(String),
    #[error("unknown instance class {0:?} (expected u_<c|i|s>_<hi|lo><hi|lo>)")]
    UnknownClass(String),
    #[error("expected {expected} values, found {found}")]
    TokenCount { expected: usize, found: usize },
    #[error("line {line}: {token:?} is not a number")]
    NonNumeric { line: usize, token: String },
    #[error("line {line}: {token:?} is not 0 or 1")]
    NonBinary { line: usize, token: String },
    #[error("line {line}: value {value} must be positive and finite")]
    NonPositive { line: usize, value: f64 },
    #[error("missing manifest key {0:?}")]
    MissingKey(&'static str),
    #[error("manifest key {key:?} has invalid value {value:?}")]
    InvalidValue { key: String, value: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// How the columns of a generated ETC row relate to each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Consistency {
    /// Every row sorted ascending: a cloud that is faster for one task is
    /// faster for all of them.
    Consistent,
    /// Rows left as drawn.
    Inconsistent,
    /// Only the even-indexed columns of each row are mutually sorted.
    Semiconsistent,
}

impl Consistency {
    fn code(self) -> char {
        match self {
            Consistency::Consistent => 'c',
            Consistency::Inconsistent => 'i',
            Consistency::Semiconsistent => 's',
        }
    }
}

impl fmt::Display for Consistency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let word = match self {
            Consistency::Consistent => "consistent",
            Consistency::Inconsistent => "inconsistent",
            Consistency::Semiconsistent => "semiconsistent",
        };
        f.write_str(word)
    }
}

impl FromStr for Consistency {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "consistent" => Ok(Consistency::Consistent),
            "inconsistent" => Ok(Consistency::Inconsistent),
            "semiconsistent" => Ok(Consistency::Semiconsistent),
            _ => Err(()),
        }
    }
}

/// Spread of the uniform draws: high or low.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Heterogeneity {
    Hi,
    Lo,
}

impl fmt::Display for Heterogeneity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Heterogeneity::Hi => "hi",
            Heterogeneity::Lo => "lo",
        })
    }
}

impl FromStr for Heterogeneity {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s {
            "hi" => Ok(Heterogeneity::Hi),
            "lo" => Ok(Heterogeneity::Lo),
            _ => Err(()),
        }
    }
}

/// One of the twelve ETC instance classes, e.g. `u_c_hilo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EtcClass {
    pub consistency: Consistency,
    pub task_het: Heterogeneity,
    pub machine_het: Heterogeneity,
}

impl EtcClass {
    pub fn new(consistency: Consistency, task_het: Heterogeneity, machine_het: Heterogeneity) -> Self {
        Self { consistency, task_het, machine_het }
    }

    /// The canonical class name, e.g. `u_s_lohi`.
    pub fn name(&self) -> String {
        format!("u_{}_{}{}", self.consistency.code(), self.task_het, self.machine_het)
    }
}

impl fmt::Display for EtcClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for EtcClass {
    type Err = BenchmarkError;

    fn from_str(name: &str) -> Result<Self, BenchmarkError> {
        let unknown = || BenchmarkError::UnknownClass(name.to_string());
        let rest = name.strip_prefix("u_").ok_or_else(unknown)?;
        let (code, hets) = rest.split_once('_').ok_or_else(unknown)?;
        let consistency = match code {
            "c" => Consistency::Consistent,
            "i" => Consistency::Inconsistent,
            "s" => Consistency::Semiconsistent,
            _ => return Err(unknown()),
        };
        if hets.len() != 4 {
            return Err(unknown());
        }
        let task_het = hets[..2].parse().map_err(|_| unknown())?;
        let machine_het = hets[2..].parse().map_err(|_| unknown())?;
        Ok(Self { consistency, task_het, machine_het })
    }
}

/// All twelve classes in the canonical reporting order used by the summary
/// tables: within each consistency family, hi-task classes first.
pub fn all_classes() -> Vec<EtcClass> {
    ["u_c_hihi", "u_c_hilo", "u_c_lolo", "u_c_lohi",
     "u_i_hihi", "u_i_lohi", "u_i_hilo", "u_i_lolo",
     "u_s_hihi", "u_s_hilo", "u_s_lolo", "u_s_lohi"]
        .iter()
        .map(|name| name.parse().expect("built-in class names are valid"))
        .collect()
}

/// Upper bounds of the uniform draws behind generated ETC cells. A cell is
/// `B(i) * m` with a per-task baseline `B(i) ~ U(1, task range)` and a
/// per-cell factor `m ~ U(1, machine range)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeterogeneityRanges {
    pub task_hi: f64,
    pub task_lo: f64,
    pub machine_hi: f64,
    pub machine_lo: f64,
}

impl Default for HeterogeneityRanges {
    fn default() -> Self {
        Self { task_hi: 3000.0, task_lo: 100.0, machine_hi: 1000.0, machine_lo: 10.0 }
    }
}

impl HeterogeneityRanges {
    fn task(&self, het: Heterogeneity) -> f64 {
        match het {
            Heterogeneity::Hi => self.task_hi,
            Heterogeneity::Lo => self.task_lo,
        }
    }

    fn machine(&self, het: Heterogeneity) -> f64 {
        match het {
            Heterogeneity::Hi => self.machine_hi,
            Heterogeneity::Lo => self.machine_lo,
        }
    }
}

/// Default probability of each possible within-application edge.
pub const DEFAULT_EDGE_PROB: f64 = 0.3;

/// A complete recipe for one generated instance.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSpec {
    /// Task count n.
    pub tasks: usize,
    /// Cloud count q.
    pub clouds: usize,
    pub class: EtcClass,
    /// Application count p; tasks are split into p contiguous blocks.
    pub applications: usize,
    /// Probability of each possible within-application edge.
    pub edge_prob: f64,
    pub seed: u64,
    pub ranges: HeterogeneityRanges,
}

impl InstanceSpec {
    pub fn new(class: EtcClass, tasks: usize, clouds: usize, applications: usize, seed: u64) -> Self {
        Self {
            tasks,
            clouds,
            class,
            applications,
            edge_prob: DEFAULT_EDGE_PROB,
            seed,
            ranges: HeterogeneityRanges::default(),
        }
    }

    /// The small published dataset shape: 512 tasks on 16 clouds.
    pub fn preset_512x16(class: EtcClass, applications: usize, seed: u64) -> Self {
        Self::new(class, 512, 16, applications, seed)
    }

    /// The large published dataset shape: 1024 tasks on 32 clouds.
    pub fn preset_1024x32(class: EtcClass, applications: usize, seed: u64) -> Self {
        Self::new(class, 1024, 32, applications, seed)
    }

    pub fn validate(&self) -> Result<(), BenchmarkError> {
        if self.applications < 1 || self.tasks < self.applications {
            return Err(BenchmarkError::InvalidSpec(format!(
                "need tasks >= applications >= 1, got {} tasks and {} applications",
                self.tasks, self.applications
            )));
        }
        if self.clouds < 1 {
            return Err(BenchmarkError::InvalidSpec("need at least one cloud".into()));
        }
        if !(0.0..=1.0).contains(&self.edge_prob) || !self.edge_prob.is_finite() {
            return Err(BenchmarkError::InvalidSpec(format!(
                "edge probability must lie in [0, 1], got {}",
                self.edge_prob
            )));
        }
        for (name, r) in [
            ("task hi", self.ranges.task_hi),
            ("task lo", self.ranges.task_lo),
            ("machine hi", self.ranges.machine_hi),
            ("machine lo", self.ranges.machine_lo),
        ] {
            if !(r > 1.0 && r.is_finite()) {
                return Err(BenchmarkError::InvalidSpec(format!(
                    "{name} range must exceed 1, got {r}"
                )));
            }
        }
        Ok(())
    }

    /// Base file name for this spec, e.g. `u_c_hihi_512x16_p20_s1`.
    pub fn base_name(&self) -> String {
        format!(
            "{}_{}x{}_p{}_s{}",
            self.class.name(),
            self.tasks,
            self.clouds,
            self.applications,
            self.seed
        )
    }

    /// Dataset label used in reports, e.g. `512x16`.
    pub fn dataset(&self) -> String {
        format!("{}x{}", self.tasks, self.clouds)
    }
}

/// Number of cells in the dependency matrix covering all applications: the
/// square of the total task count.
pub fn dependency_matrix_size(task_counts: &[usize]) -> usize {
    let total: usize = task_counts.iter().sum();
    total * total
}

/// Generates the ETC matrix for `spec`. Per task, one baseline draw from
/// `U(1, task range)` is followed by one per-cloud factor draw from
/// `U(1, machine range)`, in cloud order; the consistency class then decides
/// how each row is sorted.
pub fn generate_etc(spec: &InstanceSpec) -> Result<EtcMatrix, BenchmarkError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(0);
    let task_range = spec.ranges.task(spec.class.task_het);
    let machine_range = spec.ranges.machine(spec.class.machine_het);

    let mut rows = Vec::with_capacity(spec.tasks);
    for _ in 0..spec.tasks {
        let baseline = rng.gen_range(1.0..task_range);
        let mut row: Vec<f64> =
            (0..spec.clouds).map(|_| baseline * rng.gen_range(1.0..machine_range)).collect();
        match spec.class.consistency {
            Consistency::Consistent => {
                row.sort_by(|a, b| a.partial_cmp(b).expect("cells are finite"));
            }
            Consistency::Semiconsistent => {
                let mut evens: Vec<f64> = row.iter().step_by(2).copied().collect();
                evens.sort_by(|a, b| a.partial_cmp(b).expect("cells are finite"));
                for (value, slot) in evens.into_iter().zip(row.iter_mut().step_by(2)) {
                    *slot = value;
                }
            }
            Consistency::Inconsistent => {}
        }
        rows.push(row);
    }
    Ok(EtcMatrix::from_rows(&rows)?)
}

/// Splits `tasks` into `applications` contiguous block lengths; earlier
/// blocks take the remainder, so sizes differ by at most one.
fn block_sizes(tasks: usize, applications: usize) -> Vec<usize> {
    let base = tasks / applications;
    let extra = tasks % applications;
    (0..applications).map(|b| base + usize::from(b < extra)).collect()
}

/// The application membership map used for generated instances: contiguous
/// blocks whose sizes differ by at most one, larger blocks first. Useful for
/// rebuilding an instance from its flat files plus a manifest.
pub fn contiguous_app_map(tasks: usize, applications: usize) -> Vec<usize> {
    let mut app_of = Vec::with_capacity(tasks);
    for (app, size) in block_sizes(tasks, applications).into_iter().enumerate() {
        app_of.extend(std::iter::repeat(app).take(size));
    }
    app_of
}

/// Generates the dependency DAG and application map for `spec`. Within each
/// application block, every pair (later task, earlier task) becomes an edge
/// with probability `edge_prob`, drawn in (child, parent) index order; all
/// edges point backwards in index order, so the graph is acyclic, and no
/// edge crosses applications.
pub fn generate_dag(spec: &InstanceSpec) -> Result<(DependencyDag, Vec<usize>), BenchmarkError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(1);

    let app_of = contiguous_app_map(spec.tasks, spec.applications);
    let mut edges = Vec::new();
    let mut offset = 0;
    for size in block_sizes(spec.tasks, spec.applications) {
        for child in 1..size {
            for parent in 0..child {
                if rng.gen_bool(spec.edge_prob) {
                    edges.push((offset + child, offset + parent));
                }
            }
        }
        offset += size;
    }
    Ok((DependencyDag::from_edges(spec.tasks, &edges), app_of))
}

/// Generates the complete workload instance for `spec`.
pub fn generate_instance(spec: &InstanceSpec) -> Result<WorkloadInstance, BenchmarkError> {
    let etc = generate_etc(spec)?;
    let (dag, app_of) = generate_dag(spec)?;
    Ok(WorkloadInstance::new(etc, dag, app_of)?)
}

/// Writes an ETC matrix in the flat format: one positive decimal per line,
/// task-major.
pub fn write_etc_file(path: &Path, etc: &EtcMatrix) -> Result<(), BenchmarkError> {
    let mut out = String::new();
    for t in 0..etc.tasks() {
        for &cell in etc.row(TaskId(t)) {
            out.push_str(&format!("{cell}\n"));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads an ETC matrix from the flat format: whitespace-separated positive
/// decimals filled task-major, `#`-prefixed lines skipped. The first
/// `tasks * clouds` values are used; missing values are an error.
pub fn parse_etc_file(path: &Path, tasks: usize, clouds: usize) -> Result<EtcMatrix, BenchmarkError> {
    let text = fs::read_to_string(path)?;
    let expected = tasks * clouds;
    let mut cells = Vec::with_capacity(expected);
    'lines: for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let value: f64 = token
                .parse()
                .map_err(|_| BenchmarkError::NonNumeric { line: index + 1, token: token.into() })?;
            if !(value > 0.0 && value.is_finite()) {
                return Err(BenchmarkError::NonPositive { line: index + 1, value });
            }
            cells.push(value);
            if cells.len() == expected {
                break 'lines;
            }
        }
    }
    if cells.len() < expected {
        return Err(BenchmarkError::TokenCount { expected, found: cells.len() });
    }
    Ok(EtcMatrix::new(tasks, clouds, cells)?)
}

/// Writes a dependency matrix as `tasks` lines of space-separated 0/1, row
/// is the child.
pub fn write_dep_file(path: &Path, dag: &DependencyDag) -> Result<(), BenchmarkError> {
    let n = dag.tasks();
    let mut out = String::new();
    for child in 0..n {
        let row: Vec<&str> = (0..n)
            .map(|parent| if dag.depends_on(TaskId(child), TaskId(parent)) { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a dependency matrix: `tasks * tasks` whitespace-separated 0/1
/// entries filled row-major (row is the child), `#`-prefixed lines skipped.
/// Acyclicity is not checked here; instance construction does that.
pub fn parse_dep_file(path: &Path, tasks: usize) -> Result<DependencyDag, BenchmarkError> {
    let text = fs::read_to_string(path)?;
    let expected = tasks * tasks;
    let mut entries = Vec::with_capacity(expected);
    'lines: for (index, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        for token in line.split_whitespace() {
            let entry = match token {
                "0" => 0u8,
                "1" => 1u8,
                _ => {
                    return Err(BenchmarkError::NonBinary { line: index + 1, token: token.into() })
                }
            };
            entries.push(entry);
            if entries.len() == expected {
                break 'lines;
            }
        }
    }
    if entries.len() < expected {
        return Err(BenchmarkError::TokenCount { expected, found: entries.len() });
    }
    Ok(DependencyDag::new(tasks, entries)?)
}

/// Writes the provenance manifest for a generated instance: `key=value`
/// lines. The four draw ranges are recorded only when they differ from the
/// defaults.
pub fn write_manifest(path: &Path, spec: &InstanceSpec) -> Result<(), BenchmarkError> {
    let mut out = String::new();
    out.push_str(&format!("n={}\n", spec.tasks));
    out.push_str(&format!("q={}\n", spec.clouds));
    out.push_str(&format!("consistency={}\n", spec.class.consistency));
    out.push_str(&format!("task_het={}\n", spec.class.task_het));
    out.push_str(&format!("machine_het={}\n", spec.class.machine_het));
    out.push_str(&format!("p={}\n", spec.applications));
    out.push_str(&format!("edge_prob={}\n", spec.edge_prob));
    out.push_str(&format!("seed={}\n", spec.seed));
    let defaults = HeterogeneityRanges::default();
    for (key, value, fallback) in [
        ("task_range_hi", spec.ranges.task_hi, defaults.task_hi),
        ("task_range_lo", spec.ranges.task_lo, defaults.task_lo),
        ("machine_range_hi", spec.ranges.machine_hi, defaults.machine_hi),
        ("machine_range_lo", spec.ranges.machine_lo, defaults.machine_lo),
    ] {
        if value != fallback {
            out.push_str(&format!("{key}={value}\n"));
        }
    }
    fs::write(path, out)?;
    Ok(())
}

/// Reads a manifest back into an [`InstanceSpec`]. Unknown keys are ignored;
/// absent range keys fall back to the defaults.
pub fn parse_manifest(path: &Path) -> Result<InstanceSpec, BenchmarkError> {
    let text = fs::read_to_string(path)?;
    let mut pairs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some((key, value)) = line.split_once('=') {
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
    }
    let lookup = |key: &'static str| -> Result<&str, BenchmarkError> {
        pairs
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .ok_or(BenchmarkError::MissingKey(key))
    };
    fn parsed<T: FromStr>(key: &str, value: &str) -> Result<T, BenchmarkError> {
        value.parse().map_err(|_| BenchmarkError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
        })
    }

    let class = EtcClass {
        consistency: parsed("consistency", lookup("consistency")?)?,
        task_het: parsed("task_het", lookup("task_het")?)?,
        machine_het: parsed("machine_het", lookup("machine_het")?)?,
    };
    let mut ranges = HeterogeneityRanges::default();
    for (key, slot) in [
        ("task_range_hi", &mut ranges.task_hi),
        ("task_range_lo", &mut ranges.task_lo),
        ("machine_range_hi", &mut ranges.machine_hi),
        ("machine_range_lo", &mut ranges.machine_lo),
    ] {
        if let Ok(value) = lookup(key) {
            *slot = parsed(key, value)?;
        }
    }
    Ok(InstanceSpec {
        tasks: parsed("n", lookup("n")?)?,
        clouds: parsed("q", lookup("q")?)?,
        class,
        applications: parsed("p", lookup("p")?)?,
        edge_prob: parsed("edge_prob", lookup("edge_prob")?)?,
        seed: parsed("seed", lookup("seed")?)?,
        ranges,
    })
}

/// Execution durations of the hand-authored demo workload: fourteen tasks
/// A..N (indices 0..14) on four clouds.
const DEMO_ETC: [[f64; 4]; 14] = [
    [6.0, 10.0, 3.0, 2.0],
    [7.0, 9.0, 4.0, 3.0],
    [8.0, 8.0, 5.0, 4.0],
    [10.0, 7.0, 3.0, 5.0],
    [4.0, 8.0, 4.0, 6.0],
    [5.0, 5.0, 5.0, 7.0],
    [6.0, 4.0, 10.0, 8.0],
    [7.0, 6.0, 8.0, 9.0],
    [3.0, 3.0, 9.0, 9.0],
    [7.0, 4.0, 9.0, 8.0],
    [9.0, 4.0, 8.0, 7.0],
    [4.0, 6.0, 7.0, 10.0],
    [5.0, 6.0, 6.0, 3.0],
    [5.0, 8.0, 5.0, 4.0],
];

fn demo_etc(tasks: usize) -> EtcMatrix {
    let rows: Vec<Vec<f64>> = DEMO_ETC[..tasks].iter().map(|row| row.to_vec()).collect();
    EtcMatrix::from_rows(&rows).expect("demo durations are positive")
}

/// The nine-task demo workload: two applications on four clouds. Application
/// one is tasks 0..5 with 4 <- {0,1,2,3}; application two is tasks 5..9 with
/// 6 <- 5, 7 <- 5, 8 <- {6,7}. All oracle values in the test suites are
/// computed against this instance.
pub fn demo_nine_task() -> WorkloadInstance {
    let edges = [(4, 0), (4, 1), (4, 2), (4, 3), (6, 5), (7, 5), (8, 6), (8, 7)];
    let dag = DependencyDag::from_edges(9, &edges);
    let app_of = vec![0, 0, 0, 0, 0, 1, 1, 1, 1];
    WorkloadInstance::new(demo_etc(9), dag, app_of).expect("demo instance is well formed")
}

/// The fourteen-task variant: the nine-task demo plus a third application,
/// tasks 9..14 with 10 <- 9, 11 <- 10, 12 <- 11, 13 <- {11, 12}. Used for
/// exercising three-application plumbing, never as an oracle.
pub fn demo_fourteen_task() -> WorkloadInstance {
    let edges = [
        (4, 0),
        (4, 1),
        (4, 2),
        (4, 3),
        (6, 5),
        (7, 5),
        (8, 6),
        (8, 7),
        (10, 9),
        (11, 10),
        (12, 11),
        (13, 11),
        (13, 12),
    ];
    let dag = DependencyDag::from_edges(14, &edges);
    let app_of = vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 2];
    WorkloadInstance::new(demo_etc(14), dag, app_of).expect("demo instance is well formed")
}
