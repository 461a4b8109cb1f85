//! Embeddings of a forest into `K_n` and their colour sums.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::colouring::ColouredCompleteGraph;
use crate::error::{Error, Result};
use crate::forest::Forest;

/// `c(f(F))` recomputed from scratch over every forest edge.
pub fn subgraph_sum(graph: &ColouredCompleteGraph, map: &[usize], forest: &Forest) -> Result<i64> {
    if map.len() != forest.n() {
        return Err(Error::invalid(format!(
            "embedding covers {} vertices but the forest has {}",
            map.len(),
            forest.n()
        )));
    }
    if let Some(&t) = map.iter().find(|&&t| t >= graph.n()) {
        return Err(Error::invalid(format!("image {t} outside K_{}", graph.n())));
    }
    Ok(forest
        .edges()
        .iter()
        .map(|&(u, v)| graph.sign(map[u], map[v]))
        .sum())
}

/// A bijection `V(F) -> V(K_n)` with a cached colour sum.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Embedding {
    forward: Vec<usize>,
    inverse: Vec<usize>,
    sum: i64,
}

impl Embedding {
    pub fn new(forest: &Forest, graph: &ColouredCompleteGraph, forward: Vec<usize>) -> Result<Self> {
        if forest.n() != graph.n() {
            return Err(Error::invalid(format!(
                "forest has {} vertices but the host is K_{}",
                forest.n(),
                graph.n()
            )));
        }
        let n = graph.n();
        if forward.len() != n {
            return Err(Error::invalid(format!("map has length {}, expected {n}", forward.len())));
        }
        let mut inverse = vec![usize::MAX; n];
        for (v, &t) in forward.iter().enumerate() {
            if t >= n {
                return Err(Error::invalid(format!("image {t} of vertex {v} outside K_{n}")));
            }
            if inverse[t] != usize::MAX {
                return Err(Error::invalid(format!("vertices {} and {v} both map to {t}", inverse[t])));
            }
            inverse[t] = v;
        }
        let sum = subgraph_sum(graph, &forward, forest)?;
        Ok(Embedding { forward, inverse, sum })
    }

    pub fn identity(forest: &Forest, graph: &ColouredCompleteGraph) -> Result<Self> {
        Self::new(forest, graph, (0..forest.n()).collect())
    }

    pub fn map(&self) -> &[usize] {
        &self.forward
    }

    pub fn image(&self, v: usize) -> usize {
        self.forward[v]
    }

    /// The forest vertex sent to host vertex `t`.
    pub fn preimage(&self, t: usize) -> usize {
        self.inverse[t]
    }

    pub fn sum(&self) -> i64 {
        self.sum
    }

    pub fn imbalance(&self) -> u64 {
        self.sum.unsigned_abs()
    }

    pub fn n(&self) -> usize {
        self.forward.len()
    }

    /// Change in the sum if the images of `u` and `v` were exchanged.
    /// Only edges incident to `u` or `v` are rescored; the edge `uv` itself keeps its colour.
    pub fn swap_delta(&self, forest: &Forest, graph: &ColouredCompleteGraph, u: usize, v: usize) -> i64 {
        if u == v {
            return 0;
        }
        let (fu, fv) = (self.forward[u], self.forward[v]);
        let mut delta = 0;
        for &w in forest.neighbours(u) {
            if w != v {
                let fw = self.forward[w];
                delta += graph.sign(fv, fw) - graph.sign(fu, fw);
            }
        }
        for &w in forest.neighbours(v) {
            if w != u {
                let fw = self.forward[w];
                delta += graph.sign(fu, fw) - graph.sign(fv, fw);
            }
        }
        delta
    }

    /// Exchanges the images of `u` and `v`, updating the cached sum
    /// incrementally. Returns the change in the sum.
    pub fn swap_images(&mut self, forest: &Forest, graph: &ColouredCompleteGraph, u: usize, v: usize) -> Result<i64> {
        if u == v {
            return Err(Error::invalid(format!("cannot swap vertex {u} with itself")));
        }
        if u >= self.n() || v >= self.n() {
            return Err(Error::invalid(format!("swap ({u}, {v}) out of range")));
        }
        let delta = self.swap_delta(forest, graph, u, v);
        self.forward.swap(u, v);
        self.inverse[self.forward[u]] = u;
        self.inverse[self.forward[v]] = v;
        self.sum += delta;
        Ok(delta)
    }

    /// Vertices on which the two embeddings disagree (the set `I`).
    pub fn disagreement(&self, other: &Embedding) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.forward[v] != other.forward[v]).collect()
    }

    pub fn to_record(&self) -> EmbeddingRecord {
        EmbeddingRecord {
            map: self.forward.clone(),
            sum: self.sum,
        }
    }

    /// Rebuilds from a JSON record, rejecting a stale or wrong `sum`.
    pub fn from_record(forest: &Forest, graph: &ColouredCompleteGraph, record: EmbeddingRecord) -> Result<Self> {
        let emb = Embedding::new(forest, graph, record.map)?;
        if emb.sum != record.sum {
            return Err(Error::invalid(format!(
                "recorded sum {} does not match recomputed sum {}",
                record.sum, emb.sum
            )));
        }
        Ok(emb)
    }
}

/// JSON shape `{"map": [t0, ..], "sum": s}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub map: Vec<usize>,
    pub sum: i64,
}

/// An injective map from some forest vertices into `K_n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartialEmbedding {
    map: Vec<Option<usize>>,
    host_n: usize,
}

impl PartialEmbedding {
    pub fn empty(forest_n: usize, host_n: usize) -> Self {
        PartialEmbedding {
            map: vec![None; forest_n],
            host_n,
        }
    }

    pub fn from_pairs(forest_n: usize, host_n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut p = Self::empty(forest_n, host_n);
        for (v, t) in pairs {
            p.insert(v, t)?;
        }
        Ok(p)
    }

    pub fn insert(&mut self, v: usize, t: usize) -> Result<()> {
        if v >= self.map.len() || t >= self.host_n {
            return Err(Error::invalid(format!("pair ({v} -> {t}) out of range")));
        }
        if let Some(prev) = self.map[v] {
            if prev != t {
                return Err(Error::invalid(format!("vertex {v} already mapped to {prev}")));
            }
            return Ok(());
        }
        if let Some(other) = self.preimage(t) {
            return Err(Error::invalid(format!("vertices {other} and {v} both map to {t}")));
        }
        self.map[v] = Some(t);
        Ok(())
    }

    /// Sets `v -> t`, overwriting any previous image of `v`. Does not check injectivity.
    pub(crate) fn set_unchecked(&mut self, v: usize, t: usize) {
        self.map[v] = Some(t);
    }

    pub fn get(&self, v: usize) -> Option<usize> {
        self.map[v]
    }

    pub fn forest_n(&self) -> usize {
        self.map.len()
    }

    pub fn host_n(&self) -> usize {
        self.host_n
    }

    pub fn domain(&self) -> Vec<usize> {
        (0..self.map.len()).filter(|&v| self.map[v].is_some()).collect()
    }

    pub fn len(&self) -> usize {
        self.map.iter().flatten().count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn image(&self) -> Vec<usize> {
        let mut img: Vec<usize> = self.map.iter().flatten().copied().collect();
        img.sort_unstable();
        img
    }

    pub fn preimage(&self, t: usize) -> Option<usize> {
        self.map.iter().position(|&x| x == Some(t))
    }

    pub fn is_injective(&self) -> bool {
        let img = self.image();
        img.windows(2).all(|w| w[0] != w[1])
    }

    pub fn restrict(&self, set: &[usize]) -> PartialEmbedding {
        let mut p = Self::empty(self.map.len(), self.host_n);
        for &v in set {
            p.map[v] = self.map[v];
        }
        p
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().enumerate().filter_map(|(v, t)| t.map(|t| (v, t)))
    }

    pub fn is_extended_by(&self, emb: &Embedding) -> bool {
        self.entries().all(|(v, t)| emb.image(v) == t)
    }

    /// Uniformly random completion to a full embedding.
    pub fn sample_extension<R: Rng + ?Sized>(
        &self,
        forest: &Forest,
        graph: &ColouredCompleteGraph,
        rng: &mut R,
    ) -> Result<Embedding> {
        if self.map.len() != forest.n() || self.host_n != graph.n() {
            return Err(Error::invalid("partial embedding does not match the forest and host"));
        }
        let mut used = vec![false; self.host_n];
        for (_, t) in self.entries() {
            used[t] = true;
        }
        let mut free: Vec<usize> = (0..self.host_n).filter(|&t| !used[t]).collect();
        free.shuffle(rng);
        let mut free = free.into_iter();
        let forward = self
            .map
            .iter()
            .map(|t| t.unwrap_or_else(|| free.next().expect("host and forest have equal size")))
            .collect();
        Embedding::new(forest, graph, forward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::colouring::Colour;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_graph(n: usize, seed: u64) -> ColouredCompleteGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ColouredCompleteGraph::from_fn(n, |_, _| rng.gen_bool(0.5)).unwrap()
    }

    #[test]
    fn edgeless_sum_is_zero() {
        let g = random_graph(6, 0);
        let f = Forest::edgeless(6).unwrap();
        assert_eq!(Embedding::identity(&f, &g).unwrap().sum(), 0);
    }

    #[test]
    fn star_sum_is_signed_degree_of_centre_image() {
        let g = random_graph(8, 4);
        let star = Forest::new(8, (1..8).map(|v| (0, v))).unwrap();
        for x in 0..8 {
            let mut map: Vec<usize> = (0..8).collect();
            map.swap(0, x);
            let e = Embedding::new(&star, &g, map).unwrap();
            assert_eq!(e.sum(), g.signed_degree(x));
        }
    }

    #[test]
    fn path_sum_parity() {
        let p4 = Forest::new(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        for seed in 0..10 {
            let g = random_graph(4, seed);
            let s = Embedding::identity(&p4, &g).unwrap().sum();
            assert!([-3, -1, 1, 3].contains(&s));
        }
    }

    #[test]
    fn rejects_non_bijections() {
        let g = random_graph(4, 1);
        let f = Forest::edgeless(4).unwrap();
        assert!(Embedding::new(&f, &g, vec![0, 0, 1, 2]).is_err());
        assert!(Embedding::new(&f, &g, vec![0, 1, 2]).is_err());
        assert!(Embedding::new(&f, &g, vec![0, 1, 2, 4]).is_err());
        assert!(subgraph_sum(&g, &[0, 1], &f).is_err());
    }

    #[test]
    fn swap_rules() {
        let g = random_graph(8, 7);
        let f = Forest::new(8, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let mut e = Embedding::identity(&f, &g).unwrap();
        let before = e.clone();
        assert!(e.swap_images(&f, &g, 3, 3).is_err());
        // 5 and 6 are isolated
        assert_eq!(e.swap_images(&f, &g, 5, 6).unwrap(), 0);
        e.swap_images(&f, &g, 5, 6).unwrap();
        assert_eq!(e, before);
        e.swap_images(&f, &g, 1, 7).unwrap();
        e.swap_images(&f, &g, 1, 7).unwrap();
        assert_eq!(e, before);
    }

    #[test]
    fn incremental_matches_recomputation() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let g = random_graph(8, 2);
        let f = Forest::new(8, [(0, 1), (0, 2), (0, 3), (3, 4), (4, 5), (5, 6)]).unwrap();
        let mut e = Embedding::identity(&f, &g).unwrap();
        for _ in 0..500 {
            let u = rng.gen_range(0..8);
            let v = rng.gen_range(0..8);
            if u == v {
                continue;
            }
            let d = e.swap_images(&f, &g, u, v).unwrap();
            assert!(d.unsigned_abs() as usize <= 2 * (f.degree(u) + f.degree(v)));
            assert_eq!(e.sum(), subgraph_sum(&g, e.map(), &f).unwrap());
            for t in 0..8 {
                assert_eq!(e.image(e.preimage(t)), t);
            }
        }
    }

    #[test]
    fn record_roundtrip_checks_sum() {
        let g = ColouredCompleteGraph::monochromatic(3, Colour::Red).unwrap();
        let f = Forest::new(3, [(0, 1)]).unwrap();
        let e = Embedding::identity(&f, &g).unwrap();
        let json = serde_json::to_string(&e.to_record()).unwrap();
        assert_eq!(json, r#"{"map":[0,1,2],"sum":1}"#);
        let back: EmbeddingRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(Embedding::from_record(&f, &g, back).unwrap(), e);
        let bad = EmbeddingRecord { map: vec![0, 1, 2], sum: 3 };
        assert!(Embedding::from_record(&f, &g, bad).is_err());
    }

    #[test]
    fn partial_embedding_rules() {
        let mut p = PartialEmbedding::empty(5, 5);
        p.insert(0, 3).unwrap();
        assert!(p.insert(1, 3).is_err());
        assert!(p.insert(0, 2).is_err());
        p.insert(0, 3).unwrap();
        assert_eq!(p.domain(), vec![0]);
        let g = random_graph(5, 0);
        let f = Forest::new(5, [(0, 1)]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..20 {
            let e = p.sample_extension(&f, &g, &mut rng).unwrap();
            assert!(p.is_extended_by(&e));
        }
    }
}
