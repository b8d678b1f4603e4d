//! Domain types for the scheduling problem: ETC matrices, dependency DAGs,
//! workload instances, and chromosomes.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

/// Errors raised while constructing or validating domain types.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("task {0} depends on itself")]
    SelfLoop(usize),
    #[error("dependency cycle among tasks {0:?}")]
    Cycle(Vec<usize>),
    #[error("expected {expected} matrix entries, found {found}")]
    MatrixShape { expected: usize, found: usize },
    #[error("ETC cell ({task}, {cloud}) must be positive and finite, found {value}")]
    InvalidCell { task: usize, cloud: usize, value: f64 },
    #[error("dependency entry ({child}, {parent}) must be 0 or 1, found {value}")]
    NonBinaryDependency { child: usize, parent: usize, value: u8 },
    #[error("task counts disagree: ETC has {etc}, DAG has {dag}, application map has {apps}")]
    TaskCountMismatch { etc: usize, dag: usize, apps: usize },
    #[error("dependency of task {child} on task {parent} crosses applications")]
    CrossApplicationEdge { child: usize, parent: usize },
    #[error("gene {position} assigns cloud {cloud}, but the instance has only {clouds} clouds")]
    GeneOutOfRange { position: usize, cloud: usize, clouds: usize },
    #[error("schedule has {found} genes, instance has {expected} tasks")]
    GeneCountMismatch { expected: usize, found: usize },
}

/// Index of a task within an instance, in `[0, n)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TaskId(pub usize);

/// Index of a cloud within an instance, in `[0, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CloudId(pub usize);

impl fmt::Display for TaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for CloudId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Expected-time-to-compute matrix: cell `(i, j)` is the execution duration
/// (ms) of task `i` on cloud `j`. All cells are strictly positive and finite.
#[derive(Debug, Clone, PartialEq)]
pub struct EtcMatrix {
    tasks: usize,
    clouds: usize,
    cells: Vec<f64>,
}

impl EtcMatrix {
    /// Builds a matrix from row-major (task-major) cells.
    pub fn new(tasks: usize, clouds: usize, cells: Vec<f64>) -> Result<Self, ModelError> {
        if cells.len() != tasks * clouds {
            return Err(ModelError::MatrixShape {
                expected: tasks * clouds,
                found: cells.len(),
            });
        }
        for (i, &value) in cells.iter().enumerate() {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ModelError::InvalidCell {
                    task: i / clouds,
                    cloud: i % clouds,
                    value,
                });
            }
        }
        Ok(Self { tasks, clouds, cells })
    }

    /// Builds a matrix from one row per task.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, ModelError> {
        let tasks = rows.len();
        let clouds = rows.first().map_or(0, Vec::len);
        let mut cells = Vec::with_capacity(tasks * clouds);
        for row in rows {
            if row.len() != clouds {
                return Err(ModelError::MatrixShape {
                    expected: clouds,
                    found: row.len(),
                });
            }
            cells.extend_from_slice(row);
        }
        Self::new(tasks, clouds, cells)
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn clouds(&self) -> usize {
        self.clouds
    }

    /// Execution duration of task `t` on cloud `c`.
    pub fn cell(&self, t: TaskId, c: CloudId) -> f64 {
        debug_assert!(c.0 < self.clouds);
        self.cells[t.0 * self.clouds + c.0]
    }

    /// All durations of task `t`, indexed by cloud.
    pub fn row(&self, t: TaskId) -> &[f64] {
        &self.cells[t.0 * self.clouds..(t.0 + 1) * self.clouds]
    }
}

/// Precedence constraints as an n-by-n adjacency matrix. Entry `(i, j) = 1`
/// means task `i` depends on task `j`: `j` is a parent of `i` and must
/// complete before `i` starts (row is the child, column the parent).
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyDag {
    tasks: usize,
    dep: Vec<u8>,
    parents: Vec<Vec<TaskId>>,
    children: Vec<Vec<TaskId>>,
}

impl DependencyDag {
    /// Builds a DAG from row-major matrix entries. Checks shape and that every
    /// entry is 0 or 1; acyclicity is checked separately by [`validate`].
    ///
    /// [`validate`]: DependencyDag::validate
    pub fn new(tasks: usize, entries: Vec<u8>) -> Result<Self, ModelError> {
        if entries.len() != tasks * tasks {
            return Err(ModelError::MatrixShape {
                expected: tasks * tasks,
                found: entries.len(),
            });
        }
        let mut parents = vec![Vec::new(); tasks];
        let mut children = vec![Vec::new(); tasks];
        for (i, &value) in entries.iter().enumerate() {
            let (child, parent) = (i / tasks, i % tasks);
            match value {
                0 => {}
                1 => {
                    parents[child].push(TaskId(parent));
                    children[parent].push(TaskId(child));
                }
                _ => return Err(ModelError::NonBinaryDependency { child, parent, value }),
            }
        }
        Ok(Self { tasks, dep: entries, parents, children })
    }

    /// Builds a DAG from one row per child task.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self, ModelError> {
        let tasks = rows.len();
        let mut entries = Vec::with_capacity(tasks * tasks);
        for row in rows {
            if row.len() != tasks {
                return Err(ModelError::MatrixShape {
                    expected: tasks,
                    found: row.len(),
                });
            }
            entries.extend_from_slice(row);
        }
        Self::new(tasks, entries)
    }

    /// A DAG with no precedence constraints.
    pub fn edgeless(tasks: usize) -> Self {
        Self::new(tasks, vec![0; tasks * tasks]).expect("zero matrix is well formed")
    }

    /// Builds a DAG from `(child, parent)` pairs. Panics if an index is out of
    /// range; duplicate edges collapse.
    pub fn from_edges(tasks: usize, edges: &[(usize, usize)]) -> Self {
        let mut entries = vec![0u8; tasks * tasks];
        for &(child, parent) in edges {
            assert!(child < tasks && parent < tasks, "edge ({child}, {parent}) out of range");
            entries[child * tasks + parent] = 1;
        }
        Self::new(tasks, entries).expect("entries are binary by construction")
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    /// Whether `child` directly depends on `parent`.
    pub fn depends_on(&self, child: TaskId, parent: TaskId) -> bool {
        self.dep[child.0 * self.tasks + parent.0] == 1
    }

    /// Direct parents of `t` (the tasks `t` waits for), ascending.
    pub fn parents(&self, t: TaskId) -> &[TaskId] {
        &self.parents[t.0]
    }

    /// Direct children of `t`, ascending.
    pub fn children(&self, t: TaskId) -> &[TaskId] {
        &self.children[t.0]
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Checks that the diagonal is zero and the graph is acyclic.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.topological_order().map(|_| ())
    }

    /// Returns a permutation of `[0, n)` in which every parent precedes every
    /// child. Ready tasks are emitted lowest index first, so the order is
    /// deterministic. Fails with `SelfLoop` on a nonzero diagonal entry and
    /// with `Cycle` (carrying the residue after peeling zero-in-degree tasks)
    /// on a directed cycle.
    pub fn topological_order(&self) -> Result<Vec<TaskId>, ModelError> {
        for t in 0..self.tasks {
            if self.dep[t * self.tasks + t] == 1 {
                return Err(ModelError::SelfLoop(t));
            }
        }
        let mut unmet: Vec<usize> = self.parents.iter().map(Vec::len).collect();
        let mut ready: BinaryHeap<Reverse<usize>> = unmet
            .iter()
            .enumerate()
            .filter(|&(_, &count)| count == 0)
            .map(|(t, _)| Reverse(t))
            .collect();
        let mut order = Vec::with_capacity(self.tasks);
        let mut placed = vec![false; self.tasks];
        while let Some(Reverse(t)) = ready.pop() {
            order.push(TaskId(t));
            placed[t] = true;
            for &child in &self.children[t] {
                unmet[child.0] -= 1;
                if unmet[child.0] == 0 {
                    ready.push(Reverse(child.0));
                }
            }
        }
        if order.len() < self.tasks {
            let residue = (0..self.tasks).filter(|&t| !placed[t]).collect();
            return Err(ModelError::Cycle(residue));
        }
        Ok(order)
    }

    /// All tasks that depend on `t` directly or indirectly, ascending;
    /// excludes `t` itself.
    pub fn descendants(&self, t: TaskId) -> Vec<TaskId> {
        let mut seen = vec![false; self.tasks];
        let mut stack = vec![t];
        seen[t.0] = true;
        while let Some(u) = stack.pop() {
            for &child in &self.children[u.0] {
                if !seen[child.0] {
                    seen[child.0] = true;
                    stack.push(child);
                }
            }
        }
        seen[t.0] = false;
        (0..self.tasks).filter(|&u| seen[u]).map(TaskId).collect()
    }
}

/// A complete scheduling problem: an ETC matrix, a dependency DAG over the
/// same tasks, and a partition of the tasks into applications. Construction
/// validates the DAG and rejects edges that cross applications, so a built
/// instance is always safe to evaluate.
#[derive(Debug, Clone)]
pub struct WorkloadInstance {
    etc: EtcMatrix,
    dag: DependencyDag,
    app_of: Vec<usize>,
    applications: usize,
    topo: Vec<TaskId>,
}

impl WorkloadInstance {
    pub fn new(etc: EtcMatrix, dag: DependencyDag, app_of: Vec<usize>) -> Result<Self, ModelError> {
        if etc.tasks() != dag.tasks() || etc.tasks() != app_of.len() {
            return Err(ModelError::TaskCountMismatch {
                etc: etc.tasks(),
                dag: dag.tasks(),
                apps: app_of.len(),
            });
        }
        for child in 0..dag.tasks() {
            for &parent in dag.parents(TaskId(child)) {
                if app_of[child] != app_of[parent.0] {
                    return Err(ModelError::CrossApplicationEdge { child, parent: parent.0 });
                }
            }
        }
        let topo = dag.topological_order()?;
        let applications = app_of.iter().max().map_or(0, |&m| m + 1);
        Ok(Self { etc, dag, app_of, applications, topo })
    }

    /// An instance whose tasks all belong to one application.
    pub fn single_application(etc: EtcMatrix, dag: DependencyDag) -> Result<Self, ModelError> {
        let tasks = etc.tasks();
        Self::new(etc, dag, vec![0; tasks])
    }

    pub fn tasks(&self) -> usize {
        self.etc.tasks()
    }

    pub fn clouds(&self) -> usize {
        self.etc.clouds()
    }

    pub fn applications(&self) -> usize {
        self.applications
    }

    pub fn etc(&self) -> &EtcMatrix {
        &self.etc
    }

    pub fn dag(&self) -> &DependencyDag {
        &self.dag
    }

    pub fn application_of(&self, t: TaskId) -> usize {
        self.app_of[t.0]
    }

    /// Topological order cached at construction.
    pub fn topological_order(&self) -> &[TaskId] {
        &self.topo
    }
}

/// A candidate schedule: one cloud assignment per task.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Chromosome {
    genes: Vec<CloudId>,
}

impl Chromosome {
    pub fn new(genes: Vec<CloudId>) -> Self {
        Self { genes }
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> Self {
        Self::new(indices.into_iter().map(CloudId).collect())
    }

    /// A schedule that places every task on the same cloud.
    pub fn uniform(tasks: usize, cloud: CloudId) -> Self {
        Self::new(vec![cloud; tasks])
    }

    /// A schedule with each gene drawn uniformly from `[0, clouds)`.
    pub fn random(tasks: usize, clouds: usize, rng: &mut impl Rng) -> Self {
        Self::new((0..tasks).map(|_| CloudId(rng.gen_range(0..clouds))).collect())
    }

    pub fn len(&self) -> usize {
        self.genes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.genes.is_empty()
    }

    /// The cloud assigned to task `t`.
    pub fn gene(&self, t: TaskId) -> CloudId {
        self.genes[t.0]
    }

    pub fn set_gene(&mut self, t: TaskId, cloud: CloudId) {
        self.genes[t.0] = cloud;
    }

    pub fn genes(&self) -> &[CloudId] {
        &self.genes
    }

    /// Checks length and gene range against an instance.
    pub fn validate_for(&self, instance: &WorkloadInstance) -> Result<(), ModelError> {
        if self.genes.len() != instance.tasks() {
            return Err(ModelError::GeneCountMismatch {
                expected: instance.tasks(),
                found: self.genes.len(),
            });
        }
        for (position, &cloud) in self.genes.iter().enumerate() {
            if cloud.0 >= instance.clouds() {
                return Err(ModelError::GeneOutOfRange {
                    position,
                    cloud: cloud.0,
                    clouds: instance.clouds(),
                });
            }
        }
        Ok(())
    }
}
