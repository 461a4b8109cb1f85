//! Benchmark grid: solve seeded instances and tabulate achieved imbalance
//! against the guarantee.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::within_bound;
use crate::error::{Error, Result};
use crate::generators::{make_forest, random_balanced_colouring, ForestKind, ForestSpec};
use crate::solver::{solve, SolverConfig};

pub const CSV_HEADER: &str = "n,delta,family,seed,achieved,bound,certified_bound,millis";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BenchGrid {
    pub ns: Vec<usize>,
    pub families: Vec<ForestKind>,
    /// Degree cap for random forests and broom heads is `max(2, n / degree_divisor)`.
    pub degree_divisor: usize,
    pub seeds_per_cell: usize,
    /// Record wall-clock time. Off by default so reruns are byte-identical.
    pub timing: bool,
}

impl Default for BenchGrid {
    fn default() -> Self {
        BenchGrid {
            ns: vec![16, 32, 48, 64],
            families: vec![ForestKind::Path, ForestKind::Star, ForestKind::Random],
            degree_divisor: 8,
            seeds_per_cell: 5,
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub delta: usize,
    pub family: ForestKind,
    pub seed: u64,
    pub achieved: u64,
    pub bound: f64,
    /// Certificate name, with its bound when it has one (`interpolation:5`).
    pub certified_bound: String,
    pub millis: u128,
}

impl BenchRow {
    pub fn within_bound(&self) -> bool {
        within_bound(self.achieved, self.bound)
    }

    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.6},{},{}",
            self.n, self.delta, self.family, self.seed, self.achieved, self.bound, self.certified_bound, self.millis
        )
    }
}

/// Runs every `(n, family, seed)` cell in parallel; rows come back sorted by
/// `(n, family, seed)`.
pub fn run_bench(grid: &BenchGrid, seed: u64) -> Result<Vec<BenchRow>> {
    if grid.ns.is_empty() || grid.families.is_empty() || grid.seeds_per_cell == 0 || grid.degree_divisor == 0 {
        return Err(Error::invalid("bench grid needs sizes, families, seeds and a positive degree divisor"));
    }
    let cells: Vec<(usize, ForestKind, u64)> = grid
        .ns
        .iter()
        .flat_map(|&n| {
            grid.families
                .iter()
                .flat_map(move |&kind| (0..grid.seeds_per_cell as u64).map(move |s| (n, kind, seed.wrapping_add(s))))
        })
        .collect();
    let mut rows = cells
        .par_iter()
        .map(|&(n, kind, s)| run_cell(grid, n, kind, s))
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|a| (a.n, a.family.to_string(), a.seed));
    Ok(rows)
}

fn run_cell(grid: &BenchGrid, n: usize, kind: ForestKind, seed: u64) -> Result<BenchRow> {
    let graph = random_balanced_colouring(n, seed)?;
    let cap = match kind {
        ForestKind::Random | ForestKind::Broom => Some((n / grid.degree_divisor).max(2)),
        ForestKind::Star | ForestKind::Path => None,
    };
    let forest = make_forest(&ForestSpec::new(kind, n, cap, seed))?;
    let start = Instant::now();
    let result = solve(&forest, &graph, &SolverConfig::with_seed(seed))?;
    let millis = if grid.timing { start.elapsed().as_millis() } else { 0 };
    let certified_bound = match result.certificate.bound() {
        Some(b) => format!("{}:{}", result.certificate.name(), b),
        None => result.certificate.name().to_string(),
    };
    Ok(BenchRow {
        n,
        delta: forest.max_degree(),
        family: kind,
        seed,
        achieved: result.achieved,
        bound: result.theorem_bound.theorem3,
        certified_bound,
        millis,
    })
}

pub fn to_csv(rows: &[BenchRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&row.to_csv_line());
        out.push('\n');
    }
    out
}
