//! Exact ground truth by enumeration at small `n`.
//!
//! Full embeddings are enumerated depth-first, forest vertex `0` first and
//! host images in ascending order, so embeddings come out in lexicographic
//! order of their image tuple. Each edge is scored when its later endpoint
//! is placed; the number of unscored edges bounds how far the sum can still
//! move, which is what the pruning uses.

use serde::{Deserialize, Serialize};

use crate::colouring::ColouredCompleteGraph;
use crate::embedding::{Embedding, PartialEmbedding};
use crate::error::{Error, Result};
use crate::forest::Forest;

/// Largest `n` enumerated in full by [`exact_min_imbalance`].
pub const DEFAULT_MAX_N: usize = 10;

/// Default extension budget for sign queries (`10!`).
pub const DEFAULT_BUDGET: u128 = 3_628_800;

fn factorial(k: usize) -> u128 {
    (1..=k as u128).product()
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    ((n - k + 1) as u128..=n as u128).product()
}

fn check_sizes(forest: &Forest, graph: &ColouredCompleteGraph) -> Result<()> {
    if forest.n() != graph.n() {
        return Err(Error::invalid(format!(
            "forest has {} vertices but the host is K_{}",
            forest.n(),
            graph.n()
        )));
    }
    Ok(())
}

#[derive(Clone, Copy)]
enum Goal {
    /// Minimise `|sum|`, stopping at `floor`.
    MinAbs { floor: u64 },
    /// Track both the minimum and the maximum sum.
    Range,
}

struct Enumerator<'a> {
    forest: &'a Forest,
    graph: &'a ColouredCompleteGraph,
    /// Free forest vertices in ascending order.
    free: Vec<usize>,
    map: Vec<usize>,
    used: Vec<bool>,
    /// `remaining[k]`: edges scored at depth `>= k`.
    remaining: Vec<usize>,
    /// Endpoints of a path whose reversal is quotiented out.
    path_ends: Option<(usize, usize)>,
    goal: Goal,
    best_abs: Option<(u64, Vec<usize>)>,
    min: Option<(i64, Vec<usize>)>,
    max: Option<(i64, Vec<usize>)>,
    done: bool,
}

const UNSET: usize = usize::MAX;

impl<'a> Enumerator<'a> {
    fn new(forest: &'a Forest, graph: &'a ColouredCompleteGraph, fixed: &PartialEmbedding, goal: Goal) -> Self {
        let n = forest.n();
        let mut map = vec![UNSET; n];
        let mut used = vec![false; n];
        for (v, t) in fixed.entries() {
            map[v] = t;
            used[t] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&v| map[v] == UNSET).collect();
        let mut depth_of = vec![None; n];
        for (k, &v) in free.iter().enumerate() {
            depth_of[v] = Some(k);
        }
        let mut scored_at = vec![0usize; free.len() + 1];
        for &(u, v) in forest.edges() {
            match (depth_of[u], depth_of[v]) {
                (None, None) => {}
                (a, b) => scored_at[a.max(b).expect("one endpoint free")] += 1,
            }
        }
        let mut remaining = vec![0usize; free.len() + 1];
        for k in (0..free.len()).rev() {
            remaining[k] = remaining[k + 1] + scored_at[k];
        }
        Enumerator {
            forest,
            graph,
            free,
            map,
            used,
            remaining,
            path_ends: None,
            goal,
            best_abs: None,
            min: None,
            max: None,
            done: false,
        }
    }

    fn fixed_sum(&self) -> i64 {
        self.forest
            .edges()
            .iter()
            .filter(|&&(u, v)| self.map[u] != UNSET && self.map[v] != UNSET)
            .map(|&(u, v)| self.graph.sign(self.map[u], self.map[v]))
            .sum()
    }

    fn run(&mut self) {
        let s = self.fixed_sum();
        self.descend(0, s);
    }

    fn prune(&self, depth: usize, sum: i64) -> bool {
        let r = self.remaining[depth] as i64;
        match self.goal {
            Goal::MinAbs { .. } => match &self.best_abs {
                Some((best, _)) => (sum.abs() - r).max(0) as u64 >= *best,
                None => false,
            },
            Goal::Range => match (&self.min, &self.max) {
                (Some((lo, _)), Some((hi, _))) => sum - r >= *lo && sum + r <= *hi,
                _ => false,
            },
        }
    }

    fn leaf(&mut self, sum: i64) {
        match self.goal {
            Goal::MinAbs { floor } => {
                let abs = sum.unsigned_abs();
                if self.best_abs.as_ref().is_none_or(|(b, _)| abs < *b) {
                    self.best_abs = Some((abs, self.map.clone()));
                    if abs <= floor {
                        self.done = true;
                    }
                }
            }
            Goal::Range => {
                if self.min.as_ref().is_none_or(|(m, _)| sum < *m) {
                    self.min = Some((sum, self.map.clone()));
                }
                if self.max.as_ref().is_none_or(|(m, _)| sum > *m) {
                    self.max = Some((sum, self.map.clone()));
                }
            }
        }
    }

    fn descend(&mut self, depth: usize, sum: i64) {
        if self.done {
            return;
        }
        if depth == self.free.len() {
            self.leaf(sum);
            return;
        }
        if self.prune(depth, sum) {
            return;
        }
        let v = self.free[depth];
        for t in 0..self.graph.n() {
            if self.used[t] {
                continue;
            }
            if let Some((a, b)) = self.path_ends {
                if v == b && self.map[a] > t {
                    continue;
                }
            }
            let mut next = sum;
            for &w in self.forest.neighbours(v) {
                if self.map[w] != UNSET {
                    next += self.graph.sign(t, self.map[w]);
                }
            }
            self.map[v] = t;
            self.used[t] = true;
            self.descend(depth + 1, next);
            self.map[v] = UNSET;
            self.used[t] = false;
            if self.done {
                return;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinImbalance {
    pub value: u64,
    pub witness: Embedding,
}

/// Minimum `|c(f(F))|` over all embeddings, with the lexicographically first
/// optimal embedding found. Refuses full enumeration above [`DEFAULT_MAX_N`].
pub fn exact_min_imbalance(forest: &Forest, graph: &ColouredCompleteGraph) -> Result<MinImbalance> {
    exact_min_imbalance_guarded(forest, graph, DEFAULT_MAX_N)
}

/// As [`exact_min_imbalance`] with an explicit guard on `n`.
///
/// Spanning stars are handled for any `n` (the sum only depends on the
/// centre's image); paths enumerate one orientation only.
pub fn exact_min_imbalance_guarded(forest: &Forest, graph: &ColouredCompleteGraph, max_n: usize) -> Result<MinImbalance> {
    check_sizes(forest, graph)?;
    let n = forest.n();
    if let Some(centre) = forest.star_centre() {
        let x = (0..n)
            .min_by_key(|&x| (graph.signed_degree(x).unsigned_abs(), x))
            .expect("n >= 3");
        let mut leaves = (0..n).filter(|&t| t != x);
        let map = (0..n)
            .map(|v| if v == centre { x } else { leaves.next().expect("n - 1 leaves") })
            .collect();
        let witness = Embedding::new(forest, graph, map)?;
        return Ok(MinImbalance {
            value: witness.imbalance(),
            witness,
        });
    }
    if n > max_n {
        return Err(Error::Refused {
            needed: factorial(n),
            budget: factorial(max_n),
        });
    }
    let floor = (forest.edge_count() % 2) as u64;
    let mut e = Enumerator::new(forest, graph, &PartialEmbedding::empty(n, n), Goal::MinAbs { floor });
    e.path_ends = forest.path_endpoints().filter(|_| n >= 2);
    e.run();
    let (value, map) = e.best_abs.expect("at least one embedding");
    let witness = Embedding::new(forest, graph, map)?;
    debug_assert_eq!(witness.imbalance(), value);
    Ok(MinImbalance { value, witness })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignKind {
    /// Every extension has sum `>= 0`.
    Red,
    /// Every extension has sum `<= 0`.
    Blue,
    /// Every extension has sum exactly `0`; both red and blue.
    Zero,
    /// Extensions of both strict signs exist.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignVerdict {
    pub kind: SignKind,
    pub min_sum: i64,
    pub max_sum: i64,
    pub min_witness: Embedding,
    pub max_witness: Embedding,
}

impl SignVerdict {
    pub fn is_red(&self) -> bool {
        self.min_sum >= 0
    }

    pub fn is_blue(&self) -> bool {
        self.max_sum <= 0
    }

    pub fn is_mixed(&self) -> bool {
        self.kind == SignKind::Mixed
    }
}

fn kind_of(min: i64, max: i64) -> SignKind {
    match (min >= 0, max <= 0) {
        (true, true) => SignKind::Zero,
        (true, false) => SignKind::Red,
        (false, true) => SignKind::Blue,
        (false, false) => SignKind::Mixed,
    }
}

/// Exact range of sums over all full embeddings extending `partial`.
pub fn exact_sign(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    partial: &PartialEmbedding,
    budget: u128,
) -> Result<SignVerdict> {
    check_sizes(forest, graph)?;
    if partial.forest_n() != forest.n() || partial.host_n() != graph.n() {
        return Err(Error::invalid("partial embedding does not match the forest and host"));
    }
    if !partial.is_injective() {
        return Err(Error::invalid("partial embedding is not injective"));
    }
    let needed = factorial(forest.n() - partial.len());
    if needed > budget {
        return Err(Error::Refused { needed, budget });
    }
    Ok(sign_unchecked(forest, graph, partial))
}

fn sign_unchecked(forest: &Forest, graph: &ColouredCompleteGraph, partial: &PartialEmbedding) -> SignVerdict {
    let mut e = Enumerator::new(forest, graph, partial, Goal::Range);
    e.run();
    let (min_sum, min_map) = e.min.expect("at least one extension");
    let (max_sum, max_map) = e.max.expect("at least one extension");
    let build = |map| Embedding::new(forest, graph, map).expect("enumerated maps are bijections");
    SignVerdict {
        kind: kind_of(min_sum, max_sum),
        min_sum,
        max_sum,
        min_witness: build(min_map),
        max_witness: build(max_map),
    }
}

/// All injections `set -> targets`, lexicographic in the image tuple.
fn injections(forest_n: usize, host_n: usize, set: &[usize], targets: &[usize]) -> Vec<PartialEmbedding> {
    fn go(
        k: usize,
        set: &[usize],
        targets: &[usize],
        used: &mut Vec<bool>,
        current: &mut PartialEmbedding,
        out: &mut Vec<PartialEmbedding>,
    ) {
        if k == set.len() {
            out.push(current.clone());
            return;
        }
        for (i, &t) in targets.iter().enumerate() {
            if !used[i] {
                used[i] = true;
                current.set_unchecked(set[k], t);
                go(k + 1, set, targets, used, current, out);
                used[i] = false;
            }
        }
    }
    let mut targets = targets.to_vec();
    targets.sort_unstable();
    targets.dedup();
    let mut out = Vec::new();
    let mut current = PartialEmbedding::empty(forest_n, host_n);
    go(0, set, &targets, &mut vec![false; targets.len()], &mut current, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignFixing {
    pub fixing: bool,
    /// A placement of `L` inside `U` whose extensions take both strict signs.
    pub counterexample: Option<(PartialEmbedding, SignVerdict)>,
}

/// Whether every placement of `L` inside `U` fixes the sign of all its extensions.
pub fn is_sign_fixing(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    l: &[usize],
    u: &[usize],
    budget: u128,
) -> Result<SignFixing> {
    check_sizes(forest, graph)?;
    let n = forest.n();
    if let Some(&v) = l.iter().find(|&&v| v >= n) {
        return Err(Error::invalid(format!("forest vertex {v} out of range")));
    }
    if let Some(&t) = u.iter().find(|&&t| t >= n) {
        return Err(Error::invalid(format!("host vertex {t} out of range")));
    }
    let mut l_sorted = l.to_vec();
    l_sorted.sort_unstable();
    l_sorted.dedup();
    let mut u_sorted = u.to_vec();
    u_sorted.sort_unstable();
    u_sorted.dedup();
    let needed = falling_factorial(u_sorted.len(), l_sorted.len()).saturating_mul(factorial(n - l_sorted.len()));
    if needed > budget {
        return Err(Error::Refused { needed, budget });
    }
    for placement in injections(n, n, &l_sorted, &u_sorted) {
        let verdict = sign_unchecked(forest, graph, &placement);
        if verdict.is_mixed() {
            return Ok(SignFixing {
                fixing: false,
                counterexample: Some((placement, verdict)),
            });
        }
    }
    Ok(SignFixing {
        fixing: true,
        counterexample: None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinimalSignFixing {
    /// Inclusion-minimal sign-fixing subset of `L`.
    pub m: Vec<usize>,
    /// Vertices of `M` with at least two neighbours inside `M`.
    pub n_set: Vec<usize>,
}

/// Greedily drops vertices of `L` in ascending order while the rest stays
/// `U`-sign-fixing. Sign-fixing is monotone under supersets, so one pass
/// yields an inclusion-minimal set.
pub fn minimal_sign_fixing_subset(
    forest: &Forest,
    graph: &ColouredCompleteGraph,
    l: &[usize],
    u: &[usize],
    budget: u128,
) -> Result<MinimalSignFixing> {
    let start = is_sign_fixing(forest, graph, l, u, budget)?;
    if let Some((placement, verdict)) = start.counterexample {
        return Err(Error::Precondition(format!(
            "L is not U-sign-fixing: placement {:?} has extensions with sums {} and {}",
            placement.entries().collect::<Vec<_>>(),
            verdict.min_sum,
            verdict.max_sum
        )));
    }
    let mut m = l.to_vec();
    m.sort_unstable();
    m.dedup();
    let candidates = m.clone();
    for v in candidates {
        let without: Vec<usize> = m.iter().copied().filter(|&x| x != v).collect();
        if is_sign_fixing(forest, graph, &without, u, budget)?.fixing {
            m = without;
        }
    }
    let n_set: Vec<usize> = m.iter().copied().filter(|&v| forest.degree_within(v, &m) >= 2).collect();
    assert!(m.is_empty() || n_set.len() < m.len(), "N must be a proper subset of a non-empty M");
    Ok(MinimalSignFixing { m, n_set })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::Colour;
    use crate::generators::{c0_colouring, random_balanced_colouring};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain enumeration of every permutation via Heap's algorithm.
    fn brute_force_sums(forest: &Forest, graph: &ColouredCompleteGraph) -> Vec<i64> {
        let n = forest.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut c = vec![0usize; n];
        let score = |p: &[usize]| -> i64 { forest.edges().iter().map(|&(u, v)| graph.sign(p[u], p[v])).sum() };
        let mut out = vec![score(&perm)];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                out.push(score(&perm));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }

    fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Forest {
        Forest::new(n, (1..n).map(|v| (rng.gen_range(0..v), v))).unwrap()
    }

    #[test]
    fn min_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for seed in 0..30 {
            let g = random_balanced_colouring(8, seed).unwrap();
            let f = random_tree(7, &mut rng);
            let f = Forest::new(8, f.edges().iter().copied()).unwrap();
            let brute = brute_force_sums(&f, &g).into_iter().map(i64::unsigned_abs).min().unwrap();
            let got = exact_min_imbalance(&f, &g).unwrap();
            assert_eq!(got.value, brute);
            assert_eq!(got.witness.imbalance(), brute);
        }
    }

    #[test]
    fn path_and_star_shortcuts_match_brute_force() {
        for seed in 0..20 {
            let g = random_balanced_colouring(8, seed).unwrap();
            let path = Forest::new(8, (1..8).map(|v| (v - 1, v))).unwrap();
            let star = Forest::new(8, (1..8).map(|v| (3, (v + 3) % 8))).unwrap();
            for f in [path, star] {
                let brute = brute_force_sums(&f, &g).into_iter().map(i64::unsigned_abs).min().unwrap();
                assert_eq!(exact_min_imbalance(&f, &g).unwrap().value, brute);
            }
        }
    }

    #[test]
    fn min_examples() {
        let star = Forest::new(8, (1..8).map(|v| (0, v))).unwrap();
        assert_eq!(exact_min_imbalance(&star, &c0_colouring(8).unwrap()).unwrap().value, 3);
        let p4 = Forest::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let g = random_balanced_colouring(4, 3).unwrap();
        let v = exact_min_imbalance(&p4, &g).unwrap().value;
        assert!(v % 2 == 1 && v >= 1);
        let empty = Forest::edgeless(5).unwrap();
        assert_eq!(exact_min_imbalance(&empty, &random_balanced_colouring(5, 0).unwrap()).unwrap().value, 0);
        let big = Forest::new(11, (1..11).map(|v| (v / 2, v))).unwrap();
        let g11 = ColouredCompleteGraph::monochromatic(11, Colour::Red).unwrap();
        assert!(matches!(exact_min_imbalance(&big, &g11), Err(Error::Refused { .. })));
    }

    #[test]
    fn sign_matches_brute_force_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for seed in 0..20 {
            let g = random_balanced_colouring(8, seed).unwrap();
            let f = random_tree(8, &mut rng);
            let sums = brute_force_sums(&f, &g);
            let v = exact_sign(&f, &g, &PartialEmbedding::empty(8, 8), DEFAULT_BUDGET).unwrap();
            assert_eq!(v.min_sum, *sums.iter().min().unwrap());
            assert_eq!(v.max_sum, *sums.iter().max().unwrap());
            assert_eq!(v.min_witness.sum(), v.min_sum);
            assert_eq!(v.max_witness.sum(), v.max_sum);
            // balanced colourings average to zero over all embeddings
            assert!(v.kind == SignKind::Mixed || v.kind == SignKind::Zero);
        }
    }

    #[test]
    fn sign_of_full_embedding_is_its_sum() {
        let g = random_balanced_colouring(8, 1).unwrap();
        let f = Forest::new(8, [(0, 1), (1, 2), (1, 3), (4, 5)]).unwrap();
        let map = [3, 1, 4, 0, 5, 2, 7, 6];
        let p = PartialEmbedding::from_pairs(8, 8, map.iter().copied().enumerate()).unwrap();
        let v = exact_sign(&f, &g, &p, 1).unwrap();
        let e = Embedding::new(&f, &g, map.to_vec()).unwrap();
        assert_eq!((v.min_sum, v.max_sum), (e.sum(), e.sum()));
    }

    #[test]
    fn all_red_is_red() {
        let g = ColouredCompleteGraph::monochromatic(6, Colour::Red).unwrap();
        let f = Forest::new(6, [(0, 1), (1, 2)]).unwrap();
        let p = PartialEmbedding::from_pairs(6, 6, [(0, 4)]).unwrap();
        let v = exact_sign(&f, &g, &p, DEFAULT_BUDGET).unwrap();
        assert_eq!(v.kind, SignKind::Red);
        assert_eq!(v.min_sum, 2);
        assert!(exact_sign(&f, &g, &PartialEmbedding::empty(6, 6), 100).is_err());

        let fixing = is_sign_fixing(&f, &g, &[], &[0, 1, 2], DEFAULT_BUDGET).unwrap();
        assert!(fixing.fixing);
        let m = minimal_sign_fixing_subset(&f, &g, &[0, 1], &[0, 1, 2, 3], DEFAULT_BUDGET).unwrap();
        assert!(m.m.is_empty());
    }

    #[test]
    fn balanced_k4_path_is_not_sign_fixing_at_empty_set() {
        let f = Forest::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut found = false;
        for seed in 0..20 {
            let g = random_balanced_colouring(4, seed).unwrap();
            let v = exact_sign(&f, &g, &PartialEmbedding::empty(4, 4), DEFAULT_BUDGET).unwrap();
            if v.min_sum < 0 && v.max_sum > 0 {
                let res = is_sign_fixing(&f, &g, &[], &[0, 1, 2, 3], DEFAULT_BUDGET).unwrap();
                assert!(!res.fixing);
                let (_, witness) = res.counterexample.unwrap();
                assert!(witness.min_witness.sum() < 0 && witness.max_witness.sum() > 0);
                found = true;
            }
        }
        assert!(found);
    }

    #[test]
    fn precondition_error_when_not_fixing() {
        let f = Forest::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        for seed in 0..20 {
            let g = random_balanced_colouring(4, seed).unwrap();
            if !is_sign_fixing(&f, &g, &[], &[0, 1, 2, 3], DEFAULT_BUDGET).unwrap().fixing {
                assert!(matches!(
                    minimal_sign_fixing_subset(&f, &g, &[], &[0, 1, 2, 3], DEFAULT_BUDGET),
                    Err(Error::Precondition(_))
                ));
                return;
            }
        }
        panic!("no mixed instance found");
    }
}
