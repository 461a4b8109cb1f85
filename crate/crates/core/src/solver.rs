//! End-to-end search for a low-imbalance embedding.
//!
//! Dispatch:
//! - `n <= exact_threshold`: exact enumeration.
//! - `Δ >= n/2`: if the second degree is at least `Δ/2` and, in either
//!   orientation of the colours, some host vertex is red-poor (fewer than
//!   `n/4` red edges), build the embedding directly with
//!   [`greedy_star_balance`]. Otherwise place the top-degree vertex on the
//!   most balanced host vertex, sample anchored extensions of both signs and
//!   interpolate.
//! - otherwise: anchor the large-degree vertices `L_ε` inside the balanced
//!   host vertices when possible, sample both signs, interpolate.
//!
//! Every route ends with a first-improvement swap polish. Deciding the sign
//! of a partial placement exactly is exponential, so sampling stands in for
//! it; when sampling cannot find both signs the run falls back to weaker
//! routes and the certificate says so.

use std::borrow::Cow;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{epsilon_star, theorem3_bound, within_bound, xi, BoundReport};
use crate::colouring::ColouredCompleteGraph;
use crate::embedding::{Embedding, PartialEmbedding};
use crate::error::{Error, Result};
use crate::forest::Forest;
use crate::interpolate::{interpolate_traced, SignedPair, TraceStep};
use crate::oracle::{exact_min_imbalance_guarded, DEFAULT_MAX_N};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    Auto,
    InterpolateOnly,
    GreedyStar,
    LocalSearch,
}

impl std::str::FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "interpolate-only" => Ok(Strategy::InterpolateOnly),
            "greedy-star" => Ok(Strategy::GreedyStar),
            "local-search" => Ok(Strategy::LocalSearch),
            other => Err(Error::invalid(format!("unknown strategy {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EpsilonPolicy {
    /// `ε*` clamped to `[1/n, 1/8]`, or `1/8` when `ε*` is undefined.
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub seed: u64,
    pub max_restarts: usize,
    /// Samples per sign search.
    pub sample_budget: usize,
    /// Swap evaluations per polish.
    pub polish_budget: usize,
    pub epsilon: EpsilonPolicy,
    pub strategy: Strategy,
    /// Inputs with `n` at most this are solved by enumeration.
    pub exact_threshold: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            max_restarts: 200,
            sample_budget: 5000,
            polish_budget: 200_000,
            epsilon: EpsilonPolicy::Auto,
            strategy: Strategy::Auto,
            exact_threshold: 8,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(seed: u64) -> Self {
        SolverConfig {
            seed,
            ..Self::default()
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if self.max_restarts == 0 || self.sample_budget == 0 {
            return Err(Error::invalid("restart and sample budgets must be positive"));
        }
        if let EpsilonPolicy::Fixed(eps) = self.epsilon {
            if !(eps >= 1.0 / n as f64 && eps <= 0.125) {
                return Err(Error::invalid(format!("fixed ε = {eps} outside [1/n, 1/8]")));
            }
        }
        Ok(())
    }

    fn rng(&self, stream: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }

    /// The `ε` used to pick `L_ε` and the balanced host set.
    pub fn resolve_epsilon(&self, n: usize, max_degree: usize) -> f64 {
        let lo = 1.0 / n as f64;
        let raw = match self.epsilon {
            EpsilonPolicy::Fixed(e) => e,
            EpsilonPolicy::Auto => epsilon_star(n, xi(n, max_degree)).unwrap_or(0.125),
        };
        raw.min(0.125).max(lo)
    }
}

/// The guarantee that actually fired for a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Certificate {
    /// Exact optimum by enumeration.
    Optimal,
    /// Interpolation between opposite-sign embeddings: `|sum| <= Δ_I + δ < Δ + 1`.
    Interpolation { delta_i: usize, min_degree: usize, bound: usize },
    /// Interpolation where `Δ_I + δ` reached the generic `Δ + 1`.
    DeltaPlusOne { bound: usize },
    /// Direct large-degree construction, `|sum| <= n/4 + 4`.
    GreedyStar { bound: f64 },
    /// No guarantee; best found by search.
    Heuristic,
}

impl Certificate {
    pub fn bound(&self) -> Option<f64> {
        match *self {
            Certificate::Optimal | Certificate::Heuristic => None,
            Certificate::Interpolation { bound, .. } | Certificate::DeltaPlusOne { bound } => Some(bound as f64),
            Certificate::GreedyStar { bound } => Some(bound),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Certificate::Optimal => "optimal",
            Certificate::Interpolation { .. } => "interpolation",
            Certificate::DeltaPlusOne { .. } => "delta-plus-one",
            Certificate::GreedyStar { .. } => "greedy-star",
            Certificate::Heuristic => "heuristic",
        }
    }

    fn from_pair(pair: &SignedPair, forest: &Forest) -> Self {
        let bound = pair.guarantee(forest);
        if bound > forest.max_degree() {
            Certificate::DeltaPlusOne { bound }
        } else {
            Certificate::Interpolation {
                delta_i: pair.delta_i(),
                min_degree: forest.min_degree(),
                bound,
            }
        }
    }
}

/// Which branch of the dispatch produced the result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Exact,
    GreedyStar,
    AnchoredLargeDegree,
    AnchoredLargeSet,
    Unanchored,
    LocalSearch,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    pub restarts: usize,
    pub samples: usize,
    pub polish_evaluations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub embedding: Embedding,
    /// `|c(F')|`.
    pub achieved: u64,
    pub certificate: Certificate,
    pub route: Route,
    /// Interpolation steps of the winning run, before polishing.
    pub trace: Option<Vec<TraceStep>>,
    pub theorem_bound: BoundReport,
    /// `achieved <= theorem3_bound(n, Δ)`.
    pub within_theorem: bool,
    pub stats: SolveStats,
}

/// Serialisable summary of a [`SolveResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub map: Vec<usize>,
    pub sum: i64,
    pub achieved: u64,
    pub certificate: Certificate,
    pub route: Route,
    pub balanced_input: bool,
    pub within_theorem: bool,
    pub theorem_bound: BoundReport,
    pub stats: SolveStats,
}

impl SolveResult {
    pub fn report(&self, graph: &ColouredCompleteGraph) -> SolveReport {
        SolveReport {
            map: self.embedding.map().to_vec(),
            sum: self.embedding.sum(),
            achieved: self.achieved,
            certificate: self.certificate.clone(),
            route: self.route,
            balanced_input: graph.is_balanced(),
            within_theorem: self.within_theorem,
            theorem_bound: self.theorem_bound.clone(),
            stats: self.stats.clone(),
        }
    }
}

fn check_inputs(forest: &Forest, graph: &ColouredCompleteGraph) -> Result<()> {
    if forest.n() != graph.n() {
        return Err(Error::invalid(format!(
            "forest has {} vertices but the host is K_{}",
            forest.n(),
            graph.n()
        )));
    }
    Ok(())
}

/// Samples uniform extensions of `anchor` until one with sum `<= 0` and one
/// with sum `>= 0` have been seen. Returns the pair and the samples drawn.
pub fn find_signed_pair_with(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    anchor: Option<&PartialEmbedding>,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(SignedPair, usize)> {
    check_inputs(forest, graph)?;
    let empty;
    let anchor = match anchor {
        Some(a) => {
            if a.forest_n() != forest.n() || a.host_n() != graph.n() || !a.is_injective() {
                return Err(Error::invalid("anchor is not a valid partial embedding"));
            }
            a
        }
        None => {
            empty = PartialEmbedding::empty(forest.n(), graph.n());
            &empty
        }
    };
    let mut neg: Option<Embedding> = None;
    let mut pos: Option<Embedding> = None;
    for drawn in 1..=budget {
        let e = anchor.sample_extension(forest, graph, rng)?;
        if e.sum() <= 0 && neg.is_none() {
            neg = Some(e.clone());
        }
        if e.sum() >= 0 && pos.is_none() {
            pos = Some(e);
        }
        if let (Some(n), Some(p)) = (&neg, &pos) {
            return Ok((SignedPair::new(n.clone(), p.clone(), forest)?, drawn));
        }
    }
    Err(Error::SignSearchFailure {
        samples: budget,
        found_neg: neg.is_some(),
        found_pos: pos.is_some(),
    })
}

/// [`find_signed_pair_with`] seeded from `cfg.seed` with `cfg.sample_budget` samples.
pub fn find_signed_pair(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    anchor: Option<&PartialEmbedding>,
    cfg: &SolverConfig,
) -> Result<SignedPair> {
    if cfg.sample_budget == 0 {
        return Err(Error::invalid("sample budget must be positive"));
    }
    let mut rng = cfg.rng(0);
    find_signed_pair_with(forest, graph, anchor, cfg.sample_budget, &mut rng).map(|(p, _)| p)
}

/// `L_ε = {v : deg(v) >= 2/ε}`; at most `εn` vertices.
pub fn large_degree_set(forest: &Forest, eps: f64) -> Result<Vec<usize>> {
    let n = forest.n() as f64;
    if !(eps >= 1.0 / n && eps <= 0.125) {
        return Err(Error::invalid(format!("ε = {eps} outside [1/n, 1/8]")));
    }
    let set: Vec<usize> = (0..forest.n())
        .filter(|&v| forest.degree(v) as f64 * eps >= 2.0)
        .collect();
    assert!(set.len() as f64 <= eps * n + 1e-9, "|L_ε| = {} exceeds εn = {}", set.len(), eps * n);
    Ok(set)
}

/// Host vertices for [`greedy_star_balance`] in this orientation: `x` the
/// most balanced red-heavy vertex, `y` the vertex of least red degree other
/// than `x`. `None` unless `y` has fewer than `n/4` red edges.
pub fn greedy_star_hosts(graph: &ColouredCompleteGraph) -> Option<(usize, usize)> {
    let n = graph.n();
    let x = (0..n)
        .filter(|&v| 2 * graph.red_degree(v) + 1 >= n)
        .max_by_key(|&v| (graph.red_degree(v).min(graph.blue_degree(v)), std::cmp::Reverse(v)))?;
    let y = (0..n).filter(|&v| v != x).min_by_key(|&v| (graph.red_degree(v), v))?;
    (4 * graph.red_degree(y) < n).then_some((x, y))
}

/// The sets placed by [`greedy_star_balance`], for inspection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreedyStarEmbedding {
    pub embedding: Embedding,
    /// Neighbours of the top vertex placed on red neighbours of `x`.
    pub x_red: Vec<usize>,
    /// Neighbours of the top vertex placed on blue neighbours of `x`.
    pub x_blue: Vec<usize>,
    /// Neighbours of the second vertex placed on blue neighbours of `y`.
    pub y_blue: Vec<usize>,
}

/// Places the two highest-degree forest vertices on `x` (red-heavy and
/// nearly balanced) and `y` (red-poor), then forces `⌊3n/8⌋` red edges at
/// `x`, `⌊n/8⌋ - 1` blue edges at `x` and `⌊n/4⌋ - 1` blue edges at `y`.
/// The rest is placed by a seeded shuffle.
pub fn greedy_star_balance(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    x: usize,
    y: usize,
    seed: u64,
) -> Result<GreedyStarEmbedding> {
    check_inputs(forest, graph)?;
    let n = forest.n();
    let fail = |msg: String| Err(Error::Precondition(msg));
    if n < 8 {
        return fail(format!("needs n >= 8, got {n}"));
    }
    if x >= n || y >= n || x == y {
        return fail(format!("x = {x} and y = {y} must be distinct host vertices"));
    }
    let order = forest.by_degree();
    let (v1, v2) = (order[0], order[1]);
    if 2 * forest.degree(v1) < n || 4 * forest.degree(v2) < n {
        return fail(format!(
            "top degrees {} and {} below n/2 and n/4",
            forest.degree(v1),
            forest.degree(v2)
        ));
    }
    let balance_floor = (n as f64 / 4.0 - 1.0).ceil() as usize;
    if graph.red_degree(x).min(graph.blue_degree(x)) < balance_floor || 2 * graph.red_degree(x) < n - 1 {
        return fail(format!("x = {x} is not red-heavy and (n/4 - 1)-balanced"));
    }
    if 4 * graph.red_degree(y) >= n {
        return fail(format!("y = {y} has red degree {} >= n/4", graph.red_degree(y)));
    }

    let (nr, nb, ny) = (3 * n / 8, n / 8 - 1, n / 4 - 1);
    let around_v1: Vec<usize> = forest.neighbours(v1).iter().copied().filter(|&u| u != v2).collect();
    if around_v1.len() < nr + nb {
        return fail(format!("top vertex has {} usable neighbours, needs {}", around_v1.len(), nr + nb));
    }
    let x_red = around_v1[..nr].to_vec();
    let x_blue = around_v1[nr..nr + nb].to_vec();
    let y_blue: Vec<usize> = forest
        .neighbours(v2)
        .iter()
        .copied()
        .filter(|&u| u != v1 && !forest.has_edge(u, v1))
        .take(ny)
        .collect();
    if y_blue.len() < ny {
        return fail(format!("second vertex has {} private neighbours, needs {ny}", y_blue.len()));
    }

    let mut partial = PartialEmbedding::empty(n, n);
    partial.insert(v1, x)?;
    partial.insert(v2, y)?;
    let mut used = vec![false; n];
    used[x] = true;
    used[y] = true;
    let mut place = |vs: &[usize], targets: Vec<usize>, what: &str, used: &mut Vec<bool>| -> Result<()> {
        let free: Vec<usize> = targets.into_iter().filter(|&t| !used[t]).take(vs.len()).collect();
        if free.len() < vs.len() {
            return Err(Error::Precondition(format!("not enough {what} ({} < {})", free.len(), vs.len())));
        }
        for (&v, t) in vs.iter().zip(free) {
            used[t] = true;
            partial.insert(v, t)?;
        }
        Ok(())
    };
    place(&x_red, graph.red_neighbours(x).collect(), "red neighbours of x", &mut used)?;
    place(&x_blue, graph.blue_neighbours(x).collect(), "blue neighbours of x", &mut used)?;
    place(&y_blue, graph.blue_neighbours(y).collect(), "blue neighbours of y", &mut used)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let embedding = partial.sample_extension(forest, graph, &mut rng)?;

    let mut all: Vec<usize> = x_red.iter().chain(&x_blue).chain(&y_blue).copied().collect();
    all.sort_unstable();
    all.dedup();
    assert_eq!(all.len(), nr + nb + ny, "placed sets must be pairwise disjoint");
    assert!(x_red.iter().all(|&v| graph.is_red(x, embedding.image(v))));
    assert!(x_blue.iter().all(|&v| !graph.is_red(x, embedding.image(v))));
    assert!(y_blue.iter().all(|&v| !graph.is_red(y, embedding.image(v))));

    Ok(GreedyStarEmbedding {
        embedding,
        x_red,
        x_blue,
        y_blue,
    })
}

/// First-improvement descent over single transpositions, scanning pairs in
/// index order. Stops at a local optimum, at the parity floor, or after
/// `budget` evaluations. Returns the number of evaluations.
pub fn local_search(embedding: &mut Embedding, forest: &Forest, graph: &ColouredCompleteGraph, budget: usize) -> usize {
    let n = forest.n();
    let floor = (forest.edge_count() % 2) as u64;
    let mut evals = 0;
    loop {
        let mut improved = false;
        for u in 0..n {
            for v in u + 1..n {
                if embedding.imbalance() <= floor {
                    return evals;
                }
                if evals >= budget {
                    return evals;
                }
                evals += 1;
                let delta = embedding.swap_delta(forest, graph, u, v);
                if (embedding.sum() + delta).unsigned_abs() < embedding.imbalance() {
                    embedding
                        .swap_images(forest, graph, u, v)
                        .expect("distinct in-range vertices");
                    improved = true;
                }
            }
        }
        if !improved {
            return evals;
        }
    }
}

struct Candidate {
    embedding: Embedding,
    certificate: Certificate,
    route: Route,
    samples: usize,
    polish: usize,
    trace: Option<Vec<TraceStep>>,
}

impl Candidate {
    fn key(&self) -> (u64, &[usize]) {
        (self.embedding.imbalance(), self.embedding.map())
    }
}

struct Run<'a> {
    forest: &'a Forest,
    graph: &'a ColouredCompleteGraph,
    cfg: &'a SolverConfig,
    rng: ChaCha8Rng,
    samples: usize,
    trace: Option<Vec<TraceStep>>,
}

impl Run<'_> {
    fn pair(&mut self, anchor: Option<&PartialEmbedding>) -> Option<SignedPair> {
        match find_signed_pair_with(self.forest, self.graph, anchor, self.cfg.sample_budget, &mut self.rng) {
            Ok((pair, drawn)) => {
                self.samples += drawn;
                Some(pair)
            }
            Err(_) => {
                self.samples += self.cfg.sample_budget;
                None
            }
        }
    }

    fn interpolated(&mut self, anchor: Option<&PartialEmbedding>, route: Route) -> Option<(Embedding, Certificate, Route)> {
        let pair = self.pair(anchor)?;
        let trace = interpolate_traced(&pair, self.forest, self.graph).expect("pair built from this forest and host");
        self.trace = Some(trace.steps);
        Some((trace.result, Certificate::from_pair(&pair, self.forest), route))
    }

    fn random_start(&mut self) -> (Embedding, Certificate, Route) {
        let e = PartialEmbedding::empty(self.forest.n(), self.graph.n())
            .sample_extension(self.forest, self.graph, &mut self.rng)
            .expect("sizes checked");
        self.samples += 1;
        (e, Certificate::Heuristic, Route::LocalSearch)
    }

    fn large_degree(&mut self) -> Option<(Embedding, Certificate, Route)> {
        let (forest, graph) = (self.forest, self.graph);
        let n = forest.n();
        let order = forest.by_degree();
        let (v1, v2) = (order[0], order[1]);
        let (top, second) = (forest.degree(v1), forest.degree(v2));
        if 2 * second >= top {
            for negate in [false, true] {
                let oriented: Cow<'_, ColouredCompleteGraph> = if negate {
                    Cow::Owned(graph.negated())
                } else {
                    Cow::Borrowed(graph)
                };
                let Some((x, y)) = greedy_star_hosts(&oriented) else {
                    continue;
                };
                let seed = rand::Rng::gen(&mut self.rng);
                if let Ok(gs) = greedy_star_balance(forest, &oriented, x, y, seed) {
                    let e = Embedding::new(forest, graph, gs.embedding.map().to_vec()).expect("valid map");
                    let bound = n as f64 / 4.0 + 4.0;
                    let cert = if within_bound(e.imbalance(), bound) {
                        Certificate::GreedyStar { bound }
                    } else {
                        Certificate::Heuristic
                    };
                    return Some((e, cert, Route::GreedyStar));
                }
            }
        }

        let x = graph.most_balanced_vertex();
        let oriented: Cow<'_, ColouredCompleteGraph> = if 2 * graph.red_degree(x) + 1 >= n {
            Cow::Borrowed(graph)
        } else {
            Cow::Owned(graph.negated())
        };
        let poorest = (0..n)
            .filter(|&y| y != x)
            .min_by_key(|&y| (oriented.red_degree(y), y))
            .expect("n >= 2");

        let mut anchor = PartialEmbedding::empty(n, n);
        anchor.insert(v1, x).expect("fresh anchor");
        if 2 * second >= top {
            anchor.insert(v2, poorest).expect("poorest differs from x");
        }
        self.interpolated(Some(&anchor), Route::AnchoredLargeDegree)
    }

    fn large_set(&mut self) -> Option<(Embedding, Certificate, Route)> {
        let (forest, graph) = (self.forest, self.graph);
        let n = forest.n();
        let eps = self.cfg.resolve_epsilon(n, forest.max_degree());
        let large = large_degree_set(forest, eps).ok()?;
        if large.is_empty() {
            return None;
        }
        let r = ((0.25 - eps) * n as f64).ceil().max(0.0) as usize;
        let mut balanced = graph.r_balanced_vertices(r);
        if balanced.len() < large.len() {
            return None;
        }
        balanced.shuffle(&mut self.rng);
        let anchor = PartialEmbedding::from_pairs(n, n, large.iter().copied().zip(balanced)).expect("injective");
        self.interpolated(Some(&anchor), Route::AnchoredLargeSet)
    }

    fn pipeline(&mut self) -> (Embedding, Certificate, Route) {
        let (forest, n) = (self.forest, self.forest.n());
        let attempt = match self.cfg.strategy {
            Strategy::LocalSearch => Some(self.random_start()),
            Strategy::InterpolateOnly => self.interpolated(None, Route::Unanchored),
            Strategy::GreedyStar | Strategy::Auto => {
                let structured = if 2 * forest.max_degree() >= n && n >= 2 {
                    self.large_degree()
                } else {
                    self.large_set()
                };
                structured.or_else(|| self.interpolated(None, Route::Unanchored))
            }
        };
        attempt.unwrap_or_else(|| self.random_start())
    }
}

/// Finds a low-imbalance embedding of `forest` into `graph`.
pub fn solve(forest: &Forest, graph: &ColouredCompleteGraph, cfg: &SolverConfig) -> Result<SolveResult> {
    check_inputs(forest, graph)?;
    let n = forest.n();
    cfg.validate(n)?;
    let report = BoundReport::new(n, forest.max_degree(), None);
    let target = theorem3_bound(n, forest.max_degree());
    let finish = |c: Candidate, stats: SolveStats| {
        let achieved = c.embedding.imbalance();
        SolveResult {
            achieved,
            within_theorem: within_bound(achieved, target),
            embedding: c.embedding,
            certificate: c.certificate,
            route: c.route,
            trace: c.trace,
            theorem_bound: report.clone(),
            stats,
        }
    };

    if n <= cfg.exact_threshold {
        let exact = exact_min_imbalance_guarded(forest, graph, cfg.exact_threshold.max(DEFAULT_MAX_N))?;
        let c = Candidate {
            embedding: exact.witness,
            certificate: Certificate::Optimal,
            route: Route::Exact,
            samples: 0,
            polish: 0,
            trace: None,
        };
        return Ok(finish(c, SolveStats::default()));
    }

    let floor = (forest.edge_count() % 2) as u64;
    let mut best: Option<Candidate> = None;
    let mut stats = SolveStats::default();
    for restart in 0..cfg.max_restarts {
        let mut run = Run {
            forest,
            graph,
            cfg,
            rng: cfg.rng(restart as u64),
            samples: 0,
            trace: None,
        };
        let (mut embedding, certificate, route) = run.pipeline();
        let polish = if cfg.strategy == Strategy::InterpolateOnly {
            0
        } else {
            local_search(&mut embedding, forest, graph, cfg.polish_budget)
        };
        let cand = Candidate {
            embedding,
            certificate,
            route,
            samples: run.samples,
            polish,
            trace: run.trace,
        };
        stats.restarts += 1;
        stats.samples += cand.samples;
        stats.polish_evaluations += cand.polish;
        if best.as_ref().is_none_or(|b| cand.key() < b.key()) {
            best = Some(cand);
        }
        let b = best.as_ref().expect("just set");
        if b.embedding.imbalance() <= floor || within_bound(b.embedding.imbalance(), target) {
            break;
        }
    }
    Ok(finish(best.expect("max_restarts >= 1"), stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::Colour;
    use crate::generators::{c0_colouring, make_forest, random_balanced_colouring, ForestKind, ForestSpec};
    use crate::oracle::exact_min_imbalance;

    #[test]
    fn sign_search_fails_on_all_red() {
        let g = ColouredCompleteGraph::monochromatic(9, Colour::Red).unwrap();
        let f = make_forest(&ForestSpec::new(ForestKind::Path, 9, None, 0)).unwrap();
        let cfg = SolverConfig {
            sample_budget: 50,
            ..SolverConfig::default()
        };
        assert!(matches!(
            find_signed_pair(&f, &g, None, &cfg),
            Err(Error::SignSearchFailure { found_neg: false, found_pos: true, .. })
        ));
    }

    #[test]
    fn edgeless_pair_is_immediate() {
        let g = random_balanced_colouring(9, 0).unwrap();
        let f = Forest::edgeless(9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (pair, drawn) = find_signed_pair_with(&f, &g, None, 10, &mut rng).unwrap();
        assert_eq!(drawn, 1);
        assert_eq!(pair.neg(), pair.pos());
    }

    #[test]
    fn pair_success_rate_on_p9() {
        let f = make_forest(&ForestSpec::new(ForestKind::Path, 9, None, 0)).unwrap();
        let mut ok = 0;
        for seed in 0..200 {
            let g = random_balanced_colouring(9, seed).unwrap();
            if find_signed_pair(&f, &g, None, &SolverConfig::with_seed(seed)).is_ok() {
                ok += 1;
            }
        }
        assert!(ok >= 198, "success {ok}/200");
    }

    #[test]
    fn large_degree_set_examples() {
        let path = make_forest(&ForestSpec::new(ForestKind::Path, 40, None, 0)).unwrap();
        assert!(large_degree_set(&path, 0.125).unwrap().is_empty());
        let star = make_forest(&ForestSpec::new(ForestKind::Star, 20, None, 0)).unwrap();
        assert_eq!(large_degree_set(&star, 0.125).unwrap(), vec![0]);
        assert!(large_degree_set(&star, 0.2).is_err());
        for seed in 0..20 {
            let f = make_forest(&ForestSpec::new(ForestKind::Random, 64, Some(20), seed)).unwrap();
            for k in 1..=8 {
                let eps = (1.0 / 64.0f64).max(k as f64 / 64.0);
                let l = large_degree_set(&f, eps).unwrap();
                assert!(l.len() as f64 <= eps * 64.0);
            }
        }
    }

    #[test]
    fn star_in_c0_is_forced() {
        for n in [8usize, 12] {
            let g = c0_colouring(n).unwrap();
            let f = make_forest(&ForestSpec::new(ForestKind::Star, n, None, 0)).unwrap();
            for strategy in [Strategy::Auto, Strategy::InterpolateOnly, Strategy::GreedyStar, Strategy::LocalSearch] {
                let cfg = SolverConfig {
                    strategy,
                    exact_threshold: 0,
                    max_restarts: 3,
                    ..SolverConfig::default()
                };
                let r = solve(&f, &g, &cfg).unwrap();
                assert_eq!(r.achieved as usize, (n - 2) / 2);
                assert!(r.within_theorem);
            }
        }
    }

    #[test]
    fn exact_dispatch_matches_oracle() {
        for seed in 0..10 {
            let g = random_balanced_colouring(8, seed).unwrap();
            let f = make_forest(&ForestSpec::new(ForestKind::Random, 8, Some(3), seed)).unwrap();
            let r = solve(&f, &g, &SolverConfig::with_seed(seed)).unwrap();
            assert_eq!(r.certificate, Certificate::Optimal);
            assert_eq!(r.achieved, exact_min_imbalance(&f, &g).unwrap().value);
        }
    }

    #[test]
    fn deterministic() {
        let g = random_balanced_colouring(33, 5).unwrap();
        let f = make_forest(&ForestSpec::new(ForestKind::Random, 33, Some(6), 5)).unwrap();
        let cfg = SolverConfig::with_seed(17);
        assert_eq!(solve(&f, &g, &cfg).unwrap(), solve(&f, &g, &cfg).unwrap());
    }

    fn double_star(n: usize) -> Forest {
        // centres 0 and 1 adjacent; 0 takes ceil(n/2) - 1 leaves, 1 the rest
        let first = n.div_ceil(2);
        let mut edges = vec![(0, 1)];
        edges.extend((2..=first).map(|v| (0, v)));
        edges.extend((first + 1..n).map(|v| (1, v)));
        Forest::new(n, edges).unwrap()
    }

    /// A balanced colouring with a red-poor vertex: vertex `n-1` has no red
    /// edges, the remaining red edges are spread randomly.
    fn red_poor_colouring(n: usize, seed: u64) -> ColouredCompleteGraph {
        let total = n * (n - 1) / 2;
        let mut pairs: Vec<(usize, usize)> = (1..n - 1).flat_map(|i| (0..i).map(move |j| (i, j))).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        pairs.shuffle(&mut rng);
        ColouredCompleteGraph::from_red_edges(n, &pairs[..total / 2]).unwrap()
    }

    #[test]
    fn greedy_star_bound_on_double_star() {
        for n in [32usize, 64] {
            let f = double_star(n);
            for seed in 0..5 {
                let g = red_poor_colouring(n, seed);
                assert!(g.is_balanced());
                let (x, y) = greedy_star_hosts(&g).unwrap();
                let gs = greedy_star_balance(&f, &g, x, y, seed).unwrap();
                assert_eq!(gs.x_red.len(), 3 * n / 8);
                assert_eq!(gs.x_blue.len(), n / 8 - 1);
                assert_eq!(gs.y_blue.len(), n / 4 - 1);
                assert!(gs.embedding.imbalance() as f64 <= n as f64 / 4.0 + 4.0);
                let r = solve(&f, &g, &SolverConfig::with_seed(seed)).unwrap();
                assert_eq!(r.route, Route::GreedyStar);
                assert!(r.within_theorem);
            }
        }
    }

    #[test]
    fn greedy_star_rejects_bad_preconditions() {
        let g = random_balanced_colouring(32, 0).unwrap();
        let path = make_forest(&ForestSpec::new(ForestKind::Path, 32, None, 0)).unwrap();
        assert!(matches!(greedy_star_balance(&path, &g, 0, 1, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn hamiltonian_path_parity() {
        for seed in 0..10 {
            let g = random_balanced_colouring(16, seed).unwrap();
            let f = make_forest(&ForestSpec::new(ForestKind::Path, 16, None, 0)).unwrap();
            let r = solve(&f, &g, &SolverConfig::with_seed(seed)).unwrap();
            assert!(r.achieved % 2 == 1);
        }
    }

    #[test]
    fn config_validation() {
        let g = random_balanced_colouring(16, 0).unwrap();
        let f = make_forest(&ForestSpec::new(ForestKind::Path, 16, None, 0)).unwrap();
        let bad = SolverConfig {
            epsilon: EpsilonPolicy::Fixed(0.5),
            ..SolverConfig::default()
        };
        assert!(solve(&f, &g, &bad).is_err());
        let bad = SolverConfig {
            sample_budget: 0,
            ..SolverConfig::default()
        };
        assert!(solve(&f, &g, &bad).is_err());
        let short = Forest::edgeless(15).unwrap();
        assert!(solve(&short, &g, &SolverConfig::default()).is_err());
    }
}
